//! Positive trace-preserving qubit maps in affine form.
//!
//! A map acts on four-vectors as `(x₀, x⃗) ↦ (x₀, x₀·t + Λx⃗)`; it is positive
//! iff the image of the unit sphere stays inside the closed unit ball.

use nalgebra::{Matrix3, Matrix4, Vector3};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::minkowski::{from_four_vector, FourVector, Hermitian2};
use crate::simplex::NelderMead;
use crate::sphere::{icosphere4, TangentChart};

/// Absolute slack on `|t + Λm| ≤ 1` in the positivity test.
pub const POSITIVITY_TOL: f64 = 1e-9;
/// Smallest Choi eigenvalue still accepted as non-negative.
pub const CP_TOL: f64 = 1e-10;

const REFINE_CANDIDATES: usize = 32;
const REFINE_STARTS: usize = 4;
/// Cosine of the smallest angle between two refinement starts.
const START_SEPARATION: f64 = 0.97;

/// `x ↦ (x₀, x₀·t + Λx⃗)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AffineMap {
    pub lambda: Matrix3<f64>,
    pub t: Vector3<f64>,
}

impl AffineMap {
    pub fn new(lambda: Matrix3<f64>, t: Vector3<f64>) -> Self {
        Self { lambda, t }
    }

    pub fn identity() -> Self {
        Self::new(Matrix3::identity(), Vector3::zeros())
    }

    /// Every state goes to the maximally mixed state.
    pub fn completely_depolarizing() -> Self {
        Self::new(Matrix3::zeros(), Vector3::zeros())
    }

    /// Bistochastic map `Λ = diag(λ)`, `t = 0`. Positive iff `max |λᵢ| ≤ 1`.
    pub fn unital(lambda: [f64; 3]) -> Result<Self> {
        if lambda.iter().any(|l| !l.is_finite() || l.abs() > 1.0) {
            return Err(Error::OutOfRange(format!(
                "unital map needs max |λᵢ| ≤ 1, got {lambda:?}"
            )));
        }
        Ok(Self::new(
            Matrix3::from_diagonal(&Vector3::from(lambda)),
            Vector3::zeros(),
        ))
    }

    /// Map commuting with rotations about the third axis:
    /// `Λ = diag(β, β, α+γ−1)`, `t = (0, 0, α−γ)`.
    pub fn axial(alpha: f64, beta: f64, gamma: f64) -> Result<Self> {
        if ![alpha, beta, gamma].iter().all(|v| v.is_finite()) {
            return Err(Error::OutOfRange("axial parameters must be finite".into()));
        }
        let map = Self::new(
            Matrix3::from_diagonal(&Vector3::new(beta, beta, alpha + gamma - 1.0)),
            Vector3::new(0.0, 0.0, alpha - gamma),
        );
        map.check_positive()?;
        Ok(map)
    }

    /// `γ = 1`, `β = √α`.
    pub fn amplitude_damping(alpha: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&alpha) {
            return Err(Error::OutOfRange(format!(
                "amplitude damping needs α ∈ [0, 1], got {alpha}"
            )));
        }
        Self::axial(alpha, alpha.sqrt(), 1.0)
    }

    /// `Λ = diag(β, β, 1)`, `t = 0`.
    pub fn phase_damping(beta: f64) -> Result<Self> {
        Self::unital([beta, beta, 1.0])
    }

    /// `Λ = λ·I`, `t = 0`.
    pub fn depolarizing(lambda: f64) -> Result<Self> {
        Self::unital([lambda; 3])
    }

    pub fn from_canonical(p: &CanonicalParams) -> Result<Self> {
        p.validate()?;
        let nu = p.nu();
        let mut t = Vector3::zeros();
        let mut diag = Vector3::zeros();
        for i in 0..3 {
            t[i] = p.beta * p.xi[i] * (1.0 - p.alpha * p.omega[i] * p.omega[i]);
            diag[i] = p.alpha * p.beta * nu * p.omega[i];
        }
        Ok(Self::new(Matrix3::from_diagonal(&diag), t))
    }

    pub fn apply(&self, v: &FourVector) -> FourVector {
        FourVector {
            x0: v.x0,
            x: self.t * v.x0 + self.lambda * v.x,
        }
    }

    /// The map `x ↦ (x₀, O_out·(x₀ t + Λ O_inᵀ x⃗))`, i.e. this map with
    /// rotations applied on both sides. Positivity is preserved.
    pub fn conjugated(&self, out: &Matrix3<f64>, input: &Matrix3<f64>) -> Self {
        Self::new(out * self.lambda * input.transpose(), out * self.t)
    }

    /// Image of the Bloch sphere point `m` under the Bloch-vector part.
    pub fn image_of(&self, m: &Vector3<f64>) -> Vector3<f64> {
        self.t + self.lambda * m
    }

    /// `max |t + Λm|` over unit `m`: icosphere scan followed by local
    /// Nelder–Mead refinement from the best few vertices.
    pub fn max_image_norm(&self) -> f64 {
        let grid = icosphere4();
        let mut scored: Vec<(f64, usize)> = grid
            .iter()
            .enumerate()
            .map(|(i, m)| (self.image_of(m).norm_squared(), i))
            .collect();
        let top = REFINE_CANDIDATES.min(scored.len());
        scored.select_nth_unstable_by(top - 1, |a, b| b.0.total_cmp(&a.0));
        scored.truncate(top);
        scored.sort_by(|a, b| b.0.total_cmp(&a.0).then(a.1.cmp(&b.1)));

        // refine from the best vertex of each well-separated cluster
        let mut starts: Vec<Vector3<f64>> = Vec::new();
        for &(_, i) in &scored {
            let m = grid[i];
            if starts.len() < REFINE_STARTS && starts.iter().all(|s| s.dot(&m) < START_SEPARATION) {
                starts.push(m);
            }
        }

        let nm = NelderMead {
            max_iter: 200,
            f_tol: 1e-18,
            x_tol: 1e-12,
        };
        let mut best = scored[0].0;
        for m in starts {
            let chart = TangentChart::new(m);
            let min = nm.minimize(
                |x| -self.image_of(&chart.point(x[0], x[1])).norm_squared(),
                &[0.0, 0.0],
                0.05,
            );
            best = best.max(-min.value);
        }
        best.sqrt()
    }

    pub fn is_positive(&self) -> bool {
        self.max_image_norm() <= 1.0 + POSITIVITY_TOL
    }

    pub fn check_positive(&self) -> Result<()> {
        let max_norm = self.max_image_norm();
        if max_norm <= 1.0 + POSITIVITY_TOL {
            Ok(())
        } else {
            Err(Error::NotPositiveMap { max_norm })
        }
    }

    /// Action on an arbitrary complex 2×2 matrix, extended complex-linearly
    /// from the action on Hermitian matrices.
    pub fn apply_complex(&self, m: [[Complex64; 2]; 2]) -> [[Complex64; 2]; 2] {
        let i = Complex64::i();
        let x0 = m[0][0] + m[1][1];
        let x = [m[0][1] + m[1][0], -i * (m[0][1] - m[1][0]), m[0][0] - m[1][1]];
        let mut y = [Complex64::new(0.0, 0.0); 3];
        for (r, yr) in y.iter_mut().enumerate() {
            *yr = x0 * self.t[r];
            for (c, xc) in x.iter().enumerate() {
                *yr += *xc * self.lambda[(r, c)];
            }
        }
        [
            [(x0 + y[2]) * 0.5, (y[0] + i * y[1]) * 0.5],
            [(y[0] - i * y[1]) * 0.5, (x0 - y[2]) * 0.5],
        ]
    }

    pub fn choi_matrix(&self) -> ChoiMatrix {
        ChoiMatrix::of(self)
    }

    pub fn is_completely_positive(&self) -> bool {
        self.choi_matrix().min_eigenvalue() >= -CP_TOL
    }

    /// `Φ(ρ)` as a Hermitian matrix.
    pub fn apply_hermitian(&self, m: &Hermitian2) -> Hermitian2 {
        from_four_vector(&self.apply(&crate::minkowski::to_four_vector(m)))
    }
}

/// Canonical coordinates of a stochastic map up to rotations on both sides.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CanonicalParams {
    pub alpha: f64,
    pub beta: f64,
    /// `0 ≤ ω₁ ≤ ω₂ ≤ ω₃ = 1`.
    pub omega: [f64; 3],
    /// Unit vector; for `β = 1` the point where the image touches the sphere.
    pub xi: Vector3<f64>,
}

impl CanonicalParams {
    pub fn new(alpha: f64, beta: f64, omega: [f64; 3], xi: Vector3<f64>) -> Result<Self> {
        let p = Self {
            alpha,
            beta,
            omega,
            xi,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        let in_unit = |v: f64| (0.0..=1.0).contains(&v);
        if !in_unit(self.alpha) {
            return Err(Error::OutOfRange(format!("α = {} not in [0, 1]", self.alpha)));
        }
        if !in_unit(self.beta) {
            return Err(Error::OutOfRange(format!("β = {} not in [0, 1]", self.beta)));
        }
        let [w1, w2, w3] = self.omega;
        if !(0.0 <= w1 && w1 <= w2 && w2 <= w3 && w3 == 1.0) {
            return Err(Error::OutOfRange(format!(
                "ω must satisfy 0 ≤ ω₁ ≤ ω₂ ≤ ω₃ = 1, got {:?}",
                self.omega
            )));
        }
        if !((self.xi.norm() - 1.0).abs() <= 1e-12) {
            return Err(Error::OutOfRange(format!(
                "ξ must be a unit vector, |ξ| = {}",
                self.xi.norm()
            )));
        }
        Ok(())
    }

    /// `ν = sqrt(Σ ξᵢ² ωᵢ²)`.
    pub fn nu(&self) -> f64 {
        (0..3)
            .map(|i| (self.xi[i] * self.omega[i]).powi(2))
            .sum::<f64>()
            .sqrt()
    }

    /// The same parameters moved onto the boundary of the positive maps.
    pub fn on_boundary(&self) -> Self {
        Self { beta: 1.0, ..*self }
    }
}

/// `J = Σᵢⱼ |i⟩⟨j| ⊗ Φ(|i⟩⟨j|)`, row index `2i + a`.
///
/// This is the column-stacking convention; the row-stacking one differs by a
/// permutation, which does not change the spectrum.
#[derive(Debug, Clone, PartialEq)]
pub struct ChoiMatrix(pub Matrix4<Complex64>);

impl ChoiMatrix {
    pub fn of(phi: &AffineMap) -> Self {
        let zero = Complex64::new(0.0, 0.0);
        let one = Complex64::new(1.0, 0.0);
        let mut j = Matrix4::from_element(zero);
        for i in 0..2 {
            for k in 0..2 {
                let mut unit = [[zero; 2]; 2];
                unit[i][k] = one;
                let image = phi.apply_complex(unit);
                for a in 0..2 {
                    for b in 0..2 {
                        j[(2 * i + a, 2 * k + b)] = image[a][b];
                    }
                }
            }
        }
        Self(j)
    }

    pub fn trace(&self) -> f64 {
        self.0.trace().re
    }

    /// Eigenvalues in ascending order.
    pub fn eigenvalues(&self) -> Vec<f64> {
        let herm = (self.0 + self.0.adjoint()) * Complex64::new(0.5, 0.0);
        let mut ev: Vec<f64> = herm.symmetric_eigenvalues().iter().copied().collect();
        ev.sort_by(f64::total_cmp);
        ev
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eigenvalues()[0]
    }
}
