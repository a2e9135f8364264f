//! Random channels and states for property tests and sweeps.

use nalgebra::{DVector, Matrix3, Rotation3, UnitQuaternion, Vector3, Vector4};
use rand::Rng;
use num_complex::Complex64;
use rand_distr::StandardNormal;

use crate::bipartite::BipartiteState;

use crate::channel::{AffineMap, CanonicalParams};
use crate::minkowski::FourVector;

pub fn unit_vector<R: Rng + ?Sized>(rng: &mut R) -> Vector3<f64> {
    loop {
        let v = Vector3::new(
            rng.sample::<f64, _>(StandardNormal),
            rng.sample::<f64, _>(StandardNormal),
            rng.sample::<f64, _>(StandardNormal),
        );
        let n = v.norm();
        if n > 1e-12 {
            return v / n;
        }
    }
}

/// Haar-random rotation.
pub fn rotation<R: Rng + ?Sized>(rng: &mut R) -> Matrix3<f64> {
    let q = Vector4::new(
        rng.sample::<f64, _>(StandardNormal),
        rng.sample::<f64, _>(StandardNormal),
        rng.sample::<f64, _>(StandardNormal),
        rng.sample::<f64, _>(StandardNormal),
    );
    let q = UnitQuaternion::from_quaternion(nalgebra::Quaternion::from(q));
    let rot: Rotation3<f64> = q.into();
    rot.into_inner()
}

/// Canonical parameters with `α, β` uniform in `[0, 1]`, sorted uniform
/// `ω₁ ≤ ω₂`, and uniform `ξ`.
pub fn canonical_params<R: Rng + ?Sized>(rng: &mut R) -> CanonicalParams {
    let beta = rng.random::<f64>();
    canonical_params_with_beta(rng, beta)
}

pub fn canonical_params_with_beta<R: Rng + ?Sized>(rng: &mut R, beta: f64) -> CanonicalParams {
    let alpha = rng.random::<f64>();
    let (a, b) = (rng.random::<f64>(), rng.random::<f64>());
    CanonicalParams {
        alpha,
        beta,
        omega: [a.min(b), a.max(b), 1.0],
        xi: unit_vector(rng),
    }
}

/// A canonical map hidden behind random rotations on both sides.
pub fn rotated_canonical_map<R: Rng + ?Sized>(rng: &mut R) -> AffineMap {
    let p = canonical_params(rng);
    let map = AffineMap::from_canonical(&p).expect("sampled parameters are valid");
    map.conjugated(&rotation(rng), &rotation(rng))
}

/// Uniform point of the Bloch ball, as a state (`x₀ = 1`).
pub fn mixed_state<R: Rng + ?Sized>(rng: &mut R) -> FourVector {
    let r = rng.random::<f64>().cbrt();
    FourVector::state(unit_vector(rng) * r)
}

pub fn pure_state<R: Rng + ?Sized>(rng: &mut R) -> FourVector {
    FourVector::state(unit_vector(rng))
}

/// Gaussian random ket of dimension `dim`, normalized.
pub fn ket<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> DVector<Complex64> {
    let v = DVector::from_fn(dim, |_, _| {
        Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
    });
    let n = v.norm();
    v / Complex64::new(n, 0.0)
}

/// Mixture of two random kets of a `2 × n` system with a uniform weight.
pub fn rank2_state<R: Rng + ?Sized>(rng: &mut R, n: usize) -> BipartiteState {
    let p = rng.random_range(0.05..0.95);
    let mixture = [(p, ket(rng, 2 * n)), (1.0 - p, ket(rng, 2 * n))];
    BipartiteState::from_mixture(n, &mixture).expect("random mixture is a valid state")
}
