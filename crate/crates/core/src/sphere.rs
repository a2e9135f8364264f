//! Point sets and local charts on the unit sphere.

use std::collections::HashMap;
use std::sync::OnceLock;

use nalgebra::Vector3;

/// Vertices of an icosahedron refined `level` times by edge bisection,
/// projected onto the unit sphere. Level `k` has `10·4^k + 2` vertices.
pub fn icosphere(level: u32) -> Vec<Vector3<f64>> {
    let phi = (1.0 + 5f64.sqrt()) / 2.0;
    let mut vertices: Vec<Vector3<f64>> = [
        (-1.0, phi, 0.0),
        (1.0, phi, 0.0),
        (-1.0, -phi, 0.0),
        (1.0, -phi, 0.0),
        (0.0, -1.0, phi),
        (0.0, 1.0, phi),
        (0.0, -1.0, -phi),
        (0.0, 1.0, -phi),
        (phi, 0.0, -1.0),
        (phi, 0.0, 1.0),
        (-phi, 0.0, -1.0),
        (-phi, 0.0, 1.0),
    ]
    .iter()
    .map(|&(x, y, z)| Vector3::new(x, y, z).normalize())
    .collect();
    let mut faces: Vec<[usize; 3]> = vec![
        [0, 11, 5],
        [0, 5, 1],
        [0, 1, 7],
        [0, 7, 10],
        [0, 10, 11],
        [1, 5, 9],
        [5, 11, 4],
        [11, 10, 2],
        [10, 7, 6],
        [7, 1, 8],
        [3, 9, 4],
        [3, 4, 2],
        [3, 2, 6],
        [3, 6, 8],
        [3, 8, 9],
        [4, 9, 5],
        [2, 4, 11],
        [6, 2, 10],
        [8, 6, 7],
        [9, 8, 1],
    ];

    for _ in 0..level {
        let mut midpoints: HashMap<(usize, usize), usize> = HashMap::new();
        let mut midpoint = |a: usize, b: usize, vertices: &mut Vec<Vector3<f64>>| {
            let key = (a.min(b), a.max(b));
            *midpoints.entry(key).or_insert_with(|| {
                vertices.push((vertices[a] + vertices[b]).normalize());
                vertices.len() - 1
            })
        };
        let mut next = Vec::with_capacity(faces.len() * 4);
        for &[a, b, c] in &faces {
            let ab = midpoint(a, b, &mut vertices);
            let bc = midpoint(b, c, &mut vertices);
            let ca = midpoint(c, a, &mut vertices);
            next.extend_from_slice(&[[a, ab, ca], [b, bc, ab], [c, ca, bc], [ab, bc, ca]]);
        }
        faces = next;
    }
    vertices
}

/// Cached level-4 icosphere (2562 vertices).
pub fn icosphere4() -> &'static [Vector3<f64>] {
    static CACHE: OnceLock<Vec<Vector3<f64>>> = OnceLock::new();
    CACHE.get_or_init(|| icosphere(4))
}

/// `count` near-uniform directions on the upper hemisphere `z ≥ 0`
/// (Fibonacci lattice). Every chord direction is represented once up to sign.
pub fn fibonacci_hemisphere(count: usize) -> Vec<Vector3<f64>> {
    let golden_angle = std::f64::consts::PI * (3.0 - 5f64.sqrt());
    (0..count)
        .map(|i| {
            let z = (i as f64 + 0.5) / count as f64;
            let r = (1.0 - z * z).sqrt();
            let theta = golden_angle * i as f64;
            Vector3::new(r * theta.cos(), r * theta.sin(), z)
        })
        .collect()
}

/// Orthonormal pair spanning the tangent plane at the unit vector `m`.
pub fn tangent_basis(m: &Vector3<f64>) -> (Vector3<f64>, Vector3<f64>) {
    let helper = if m.x.abs() < 0.9 {
        Vector3::x()
    } else {
        Vector3::y()
    };
    let u = (helper - m * m.dot(&helper)).normalize();
    let v = m.cross(&u);
    (u, v)
}

/// Chart `(a, b) ↦ normalize(m + a·u + b·v)` around the unit vector `m`.
#[derive(Debug, Clone, Copy)]
pub struct TangentChart {
    center: Vector3<f64>,
    u: Vector3<f64>,
    v: Vector3<f64>,
}

impl TangentChart {
    pub fn new(center: Vector3<f64>) -> Self {
        let center = center.normalize();
        let (u, v) = tangent_basis(&center);
        Self { center, u, v }
    }

    pub fn point(&self, a: f64, b: f64) -> Vector3<f64> {
        (self.center + self.u * a + self.v * b).normalize()
    }
}

/// Unit vector from spherical angles (polar `theta`, azimuth `phi`).
pub fn from_angles(theta: f64, phi: f64) -> Vector3<f64> {
    Vector3::new(theta.sin() * phi.cos(), theta.sin() * phi.sin(), theta.cos())
}
