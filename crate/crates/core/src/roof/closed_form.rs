//! Closed-form roof data for special families of maps. These are independent
//! of the general solver and serve as references for it.

use nalgebra::Matrix4;

use crate::channel::{AffineMap, CanonicalParams};
use crate::error::{Error, Result};
use crate::minkowski::FourVector;

use super::validate_state;

/// Concurrence of the unital map `Λ = diag(λ)`:
/// `sqrt((1−w)x₀² + Σ(w−λᵢ²)xᵢ²)` with `w = max λᵢ²`.
pub fn unital_concurrence_closed_form(lambda: [f64; 3], state: &FourVector) -> Result<f64> {
    if lambda.iter().any(|l| !l.is_finite() || l.abs() > 1.0) {
        return Err(Error::OutOfRange(format!(
            "unital map needs max |λᵢ| ≤ 1, got {lambda:?}"
        )));
    }
    validate_state(state)?;
    let w = lambda.iter().map(|l| l * l).fold(0.0, f64::max);
    let q = (1.0 - w) * state.x0 * state.x0
        + (0..3)
            .map(|i| (w - lambda[i] * lambda[i]) * state.x[i] * state.x[i])
            .sum::<f64>();
    Ok(q.max(0.0).sqrt())
}

/// `β_c² = 1 + 2αγ − α − γ − 2 sqrt(α(1−α)γ(1−γ))`.
pub fn axial_critical_beta_sq(alpha: f64, gamma: f64) -> f64 {
    let root = (alpha * (1.0 - alpha) * gamma * (1.0 - gamma)).max(0.0).sqrt();
    1.0 + 2.0 * alpha * gamma - alpha - gamma - 2.0 * root
}

/// `w₀ = max(β², β_c²)` and flatness of the roof for the axial map.
///
/// The roof is flat when `β² ≥ β_c²` (kernel ⊇ span{e₁, e₂}) and also when
/// `γ(1−γ) = α(1−α)`, where the apex `(1, 0, 0, z₀)` runs off to infinity and
/// the kernel becomes `e₃`.
pub fn axial_w0_closed_form(alpha: f64, beta: f64, gamma: f64) -> Result<(f64, bool)> {
    AffineMap::axial(alpha, beta, gamma)?;
    let critical = axial_critical_beta_sq(alpha, gamma);
    let beta_sq = beta * beta;
    let (a, b) = axial_roots(alpha, gamma);
    let flat = beta_sq >= critical - 1e-12 || (a - b).abs() <= 1e-12;
    Ok((beta_sq.max(critical), flat))
}

fn axial_roots(alpha: f64, gamma: f64) -> (f64, f64) {
    (
        (gamma * (1.0 - gamma)).max(0.0).sqrt(),
        (alpha * (1.0 - alpha)).max(0.0).sqrt(),
    )
}

/// Apex height `z₀` of the conical roof; infinite when the roof is flat
/// along `e₃`, NaN when both square roots vanish.
pub fn axial_z0(alpha: f64, gamma: f64) -> f64 {
    let (a, b) = axial_roots(alpha, gamma);
    (a + b) / (a - b)
}

/// Unit-norm direction of `(1, 0, 0, z₀)`, well defined also for `z₀ = ±∞`.
/// `None` when `α, γ ∈ {0, 1}` both, where the kernel is two-dimensional.
pub fn axial_kernel_direction(alpha: f64, gamma: f64) -> Option<FourVector> {
    let (a, b) = axial_roots(alpha, gamma);
    let v = FourVector::new(a - b, 0.0, 0.0, a + b);
    let norm = v.euclidean_norm();
    (norm > 0.0).then(|| v.scale(1.0 / norm))
}

/// Cholesky factor of `Q_{w₀}`, `w₀ = αν²`, for a map on the boundary
/// (`β = 1`): `Q_{w₀} = R·Rᵀ` with
///
/// ```text
///     ⎡ 0  −ω₁ξ₁μ₁  −ω₂ξ₂μ₂  −ω₃ξ₃μ₃ ⎤
/// R = ⎢ 0    νμ₁       0        0     ⎥ ,   μᵢ = sqrt(α(1 − αωᵢ²)).
///     ⎢ 0     0       νμ₂       0     ⎥
///     ⎣ 0     0        0       νμ₃    ⎦
/// ```
pub fn cholesky_boundary_check(p: &CanonicalParams) -> Result<Matrix4<f64>> {
    p.validate()?;
    if p.beta != 1.0 {
        return Err(Error::OutOfRange(format!(
            "boundary factorization needs β = 1, got {}",
            p.beta
        )));
    }
    let nu = p.nu();
    let mut r = Matrix4::zeros();
    for i in 0..3 {
        let mu = (p.alpha * (1.0 - p.alpha * p.omega[i] * p.omega[i])).max(0.0).sqrt();
        r[(0, i + 1)] = -p.omega[i] * p.xi[i] * mu;
        r[(i + 1, i + 1)] = nu * mu;
    }
    Ok(r)
}

/// Light-like kernel vector `(1, ξᵢωᵢ/ν)` of `Q_{αν²}` for a boundary map.
pub fn boundary_kernel_vector(p: &CanonicalParams) -> FourVector {
    let nu = p.nu();
    FourVector::new(
        1.0,
        p.xi[0] * p.omega[0] / nu,
        p.xi[1] * p.omega[1] / nu,
        p.xi[2] * p.omega[2] / nu,
    )
}
