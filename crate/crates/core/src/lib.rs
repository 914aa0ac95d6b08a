//! Construction and exhaustive verification of the geometry of square-type
//! subspaces of an orthogonal space over a finite field of odd order.

pub mod gf;
pub mod linalg;
pub mod ortho;
pub mod geometry;
pub mod topology;
pub mod group;
pub mod lemmas;
