//! Small triangulations with known homology.

use super::TwoComplex;

/// Boundary of the tetrahedron, a 2-sphere.
pub fn tetrahedron_boundary() -> TwoComplex {
    TwoComplex::from_triangles(4, vec![[0, 1, 2], [0, 1, 3], [0, 2, 3], [1, 2, 3]]).unwrap()
}

/// Seven-vertex torus.
pub fn torus() -> TwoComplex {
    let mut ts = Vec::new();
    for i in 0..7u32 {
        ts.push([i, (i + 1) % 7, (i + 3) % 7]);
        ts.push([i, (i + 2) % 7, (i + 3) % 7]);
    }
    TwoComplex::from_triangles(7, ts).unwrap()
}

/// Six-vertex real projective plane.
pub fn projective_plane() -> TwoComplex {
    let ts = vec![
        [0, 1, 2], [0, 2, 3], [0, 3, 4], [0, 4, 5], [0, 5, 1],
        [1, 2, 4], [2, 3, 5], [3, 4, 1], [4, 5, 2], [5, 1, 3],
    ];
    TwoComplex::from_triangles(6, ts).unwrap()
}

/// A single filled triangle.
pub fn filled_triangle() -> TwoComplex {
    TwoComplex::from_triangles(3, vec![[0, 1, 2]]).unwrap()
}

/// Four vertices on a cycle, no triangles.
pub fn square_cycle() -> TwoComplex {
    TwoComplex::new(4, vec![[0, 1], [1, 2], [2, 3], [0, 3]], vec![]).unwrap()
}
