//! Convex roof of the concurrence of a stochastic qubit map.
//!
//! For a map Φ and a real parameter `w` the quadratic form
//! `q_w(x) = Φ(x)·Φ(x) − w x·x = 4(det Φ(ρ) − w det ρ)` agrees with the
//! squared concurrence on pure states. There is exactly one `w₀` for which
//! `Q_w` is positive semidefinite, degenerate, and has a space- or light-like
//! kernel vector `n`; then `C(ρ) = sqrt(q_{w₀}(ρ))` on the whole Bloch ball.
//! The kernel also fixes the leaves of the roof: lines parallel to `n⃗` when
//! `n₀ = 0` (flat roof), otherwise lines through the apex `n`.
//!
//! `w₀` is the lower end of the interval of `w` with `Q_w ⪰ 0`. Both ends
//! are degeneracy points, i.e. real eigenvalues of `η·Q₀`, so the solver
//! tests those candidates and falls back to a concave bisection on
//! `λ_min(Q_w)` when the eigenvalue route yields nothing usable.

pub mod closed_form;

use log::warn;
use nalgebra::{DMatrix, Matrix4, SymmetricEigen, Vector3, Vector4};
use serde::{Deserialize, Serialize};

use crate::channel::AffineMap;
use crate::error::{Error, Result};
use crate::minkowski::{
    causal_class, from_four_vector, CausalClass, FourVector, MinkowskiMetric, DEFAULT_TAU_CAUSAL,
};

pub use closed_form::{
    axial_critical_beta_sq, axial_kernel_direction, axial_w0_closed_form, axial_z0,
    boundary_kernel_vector, cholesky_boundary_check, unital_concurrence_closed_form,
};

pub const DEFAULT_TOL_PSD: f64 = 1e-10;
/// Slack on `x₀ = 1` and `|x⃗| ≤ 1` when validating states.
pub const STATE_TOL: f64 = 1e-9;

/// PSD windows narrower than this are checked for numerical degeneracy.
const NARROW_WINDOW: f64 = 1e-6;
const SCHUR_MAX_ITER: usize = 500;
const BISECTION_STEPS: usize = 200;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    /// Relative to the Frobenius norm of `Q₀`.
    pub psd: f64,
    /// On the Minkowski square of a unit-norm vector.
    pub causal: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            psd: DEFAULT_TOL_PSD,
            causal: DEFAULT_TAU_CAUSAL,
        }
    }
}

/// `Q_w = Q₀ − w·η` for a fixed map.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadraticForm {
    pub matrix: Matrix4<f64>,
    pub w: f64,
}

impl QuadraticForm {
    pub fn new(phi: &AffineMap, w: f64) -> Self {
        Self {
            matrix: base_matrix(phi) - MinkowskiMetric::matrix() * w,
            w,
        }
    }

    pub fn eval(&self, x: &FourVector) -> f64 {
        let v = x.to_vec4();
        v.dot(&(self.matrix * v))
    }

    pub fn apply(&self, x: &FourVector) -> Vector4<f64> {
        self.matrix * x.to_vec4()
    }

    pub fn min_eigenvalue(&self) -> f64 {
        min_eigenvalue(&self.matrix)
    }
}

/// `Q₀`: the form `x ↦ Φ(x)·Φ(x)` as a symmetric matrix.
pub fn base_matrix(phi: &AffineMap) -> Matrix4<f64> {
    let tl = phi.lambda.transpose() * phi.t;
    let ltl = phi.lambda.transpose() * phi.lambda;
    let mut q = Matrix4::zeros();
    q[(0, 0)] = 1.0 - phi.t.norm_squared();
    for i in 0..3 {
        q[(0, i + 1)] = -tl[i];
        q[(i + 1, 0)] = -tl[i];
        for j in 0..3 {
            // symmetrize explicitly so Q is exactly symmetric
            let v = 0.5 * (ltl[(i, j)] + ltl[(j, i)]);
            q[(i + 1, j + 1)] = -v;
        }
    }
    q
}

pub fn build_q(phi: &AffineMap, w: f64) -> QuadraticForm {
    QuadraticForm::new(phi, w)
}

fn min_eigenvalue(m: &Matrix4<f64>) -> f64 {
    m.symmetric_eigenvalues().min()
}

/// How `w₀` was located.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SolveMethod {
    Pencil,
    Bisection,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RoofSolution {
    pub w0: f64,
    /// `[w₁, w₂]`, the set of `w` with `Q_w ⪰ 0`; `w₀ = w₁`.
    pub psd_interval: (f64, f64),
    /// Orthonormal basis of `ker Q_{w₀}`.
    pub kernel_basis: Vec<FourVector>,
    pub flat: bool,
    /// Representative kernel vector: `n₀ = 0` when flat, else `n₀ = 1`.
    pub n: FourVector,
    pub n_class: CausalClass,
    /// `Q_{w₀}`.
    pub form: QuadraticForm,
    pub method: SolveMethod,
    /// The PSD window collapsed to a point within numerical precision.
    pub degenerate_window: bool,
    pub tolerances: Tolerances,
}

impl RoofSolution {
    /// `ker Q_{w₀}` is the whole space, so the concurrence vanishes identically.
    pub fn is_full_kernel(&self) -> bool {
        self.kernel_basis.len() == 4
    }

    pub fn concurrence(&self, state: &FourVector) -> Result<f64> {
        validate_state(state)?;
        Ok(self.concurrence_unchecked(state))
    }

    /// `sqrt(q_{w₀}(x))` without validating `x`; negative round-off is clamped.
    pub fn concurrence_unchecked(&self, x: &FourVector) -> f64 {
        let q = self.form.eval(x);
        if q < 0.0 {
            if q < -1e-12 {
                warn!("clamping negative q_w0 = {q:e} to zero");
            }
            0.0
        } else {
            q.sqrt()
        }
    }

    /// Two-component decomposition along the leaf through `state`.
    pub fn decomposition(&self, state: &FourVector) -> Result<Decomposition> {
        validate_state(state)?;
        let r = state.x;
        let radius = r.norm();
        if radius >= 1.0 - 1e-12 {
            return Ok(Decomposition {
                components: vec![Component {
                    weight: 1.0,
                    pure: FourVector::state(r / radius),
                }],
                degenerate_leaf: false,
            });
        }

        let (direction, degenerate_leaf) = if self.is_full_kernel() {
            let d = if radius > 1e-12 { r / radius } else { Vector3::z() };
            (d, true)
        } else if self.flat {
            (self.n.x.normalize(), false)
        } else {
            (canonical_sign(r - self.n.x).normalize(), false)
        };
        Ok(Decomposition {
            components: chord(&r, &direction),
            degenerate_leaf,
        })
    }
}

/// Rejects four-vectors that are not states of the closed Bloch ball.
pub fn validate_state(state: &FourVector) -> Result<()> {
    if !state.x0.is_finite() || (state.x0 - 1.0).abs() > STATE_TOL {
        return Err(Error::InvalidState(format!(
            "trace component must be 1, got {}",
            state.x0
        )));
    }
    let r = state.x.norm();
    if !r.is_finite() || r > 1.0 + STATE_TOL {
        return Err(Error::InvalidState(format!(
            "Bloch vector length {r} exceeds 1"
        )));
    }
    Ok(())
}

/// Intersections of the line `r + s·u` with the unit sphere and the weights
/// that recombine them into `r`. `u` must be a unit vector and `|r| < 1`.
pub(crate) fn chord(r: &Vector3<f64>, u: &Vector3<f64>) -> Vec<Component> {
    let b = r.dot(u);
    let disc = (b * b + 1.0 - r.norm_squared()).sqrt();
    let s_plus = -b + disc;
    let s_minus = -b - disc;
    let plus = (r + u * s_plus).normalize();
    let minus = (r + u * s_minus).normalize();
    let width = s_plus - s_minus;
    vec![
        Component {
            weight: -s_minus / width,
            pure: FourVector::state(plus),
        },
        Component {
            weight: s_plus / width,
            pure: FourVector::state(minus),
        },
    ]
}

/// Flips `v` so its largest-magnitude component is positive.
fn canonical_sign(v: Vector3<f64>) -> Vector3<f64> {
    let k = v.iamax();
    if v[k] < 0.0 {
        -v
    } else {
        v
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Component {
    pub weight: f64,
    pub pure: FourVector,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Decomposition {
    pub components: Vec<Component>,
    /// `C ≡ 0`; the chord is an arbitrary diameter through the state.
    pub degenerate_leaf: bool,
}

impl Decomposition {
    pub fn reconstruct(&self) -> FourVector {
        self.components
            .iter()
            .fold(FourVector::new(0.0, 0.0, 0.0, 0.0), |acc, c| {
                acc + c.pure.scale(c.weight)
            })
    }

    pub fn total_weight(&self) -> f64 {
        self.components.iter().map(|c| c.weight).sum()
    }

    /// `Σ pⱼ f(πⱼ)`.
    pub fn average<F: Fn(&FourVector) -> f64>(&self, f: F) -> f64 {
        self.components.iter().map(|c| c.weight * f(&c.pure)).sum()
    }
}

/// `2·sqrt(det Φ(π))`, the concurrence of a pure input.
pub fn pure_concurrence(phi: &AffineMap, pure: &FourVector) -> f64 {
    2.0 * from_four_vector(&phi.apply(pure)).det().max(0.0).sqrt()
}

#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct RoofSolver {
    pub tolerances: Tolerances,
}

impl RoofSolver {
    pub fn new(tolerances: Tolerances) -> Self {
        Self { tolerances }
    }

    pub fn solve(&self, phi: &AffineMap) -> Result<RoofSolution> {
        phi.check_positive()?;
        self.solve_unchecked(phi)
    }

    /// As [`solve`](Self::solve) but trusts the caller that `phi` is positive.
    pub fn solve_unchecked(&self, phi: &AffineMap) -> Result<RoofSolution> {
        let q0 = base_matrix(phi);
        let eta = MinkowskiMetric::matrix();
        let scale = q0.norm().max(1.0);
        let psd_tol = self.tolerances.psd * scale;
        let kernel_tol = 10.0 * psd_tol;
        let lambda_min = |w: f64| min_eigenvalue(&(q0 - eta * w));

        let candidates = pencil_candidates(&q0, scale);
        let passing: Vec<f64> = candidates
            .iter()
            .flatten()
            .copied()
            .filter(|&w| lambda_min(w) >= -psd_tol)
            .collect();

        let (mut w1, mut w2, method) = if passing.is_empty() {
            let (lo, hi) = match &candidates {
                Some(c) if !c.is_empty() => (
                    c.iter().copied().fold(0.0, f64::min) - 1.0,
                    c.iter().copied().fold(1.0, f64::max) + 1.0,
                ),
                _ => (-1.0, 2.0),
            };
            let (a, b) = bisect_window(&lambda_min, lo, hi, psd_tol)?;
            (a, b, SolveMethod::Bisection)
        } else {
            let lo = passing.iter().copied().fold(f64::INFINITY, f64::min);
            let hi = passing.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            (lo, hi, SolveMethod::Pencil)
        };

        // A tangential (defective) degeneracy splits into a pair of roots
        // about sqrt(eps) apart; their midpoint is the accurate estimate.
        let mut degenerate_window = false;
        if w2 - w1 <= NARROW_WINDOW {
            let mid = 0.5 * (w1 + w2);
            if lambda_min(mid) <= kernel_tol {
                w1 = mid;
                w2 = mid;
                degenerate_window = true;
            }
        }

        let form = QuadraticForm {
            matrix: q0 - eta * w1,
            w: w1,
        };
        let kernel = kernel_of(&form.matrix, kernel_tol);
        let (flat, n) = representative(&form.matrix, &kernel, kernel_tol);
        let n_class = causal_class(&n, self.tolerances.causal)?;
        if n_class == CausalClass::TimeLike {
            return Err(Error::NoPsdWindow(format!(
                "kernel vector at w1 = {w1} is time-like"
            )));
        }

        if !degenerate_window && w2 - w1 > NARROW_WINDOW {
            let upper = kernel_of(&(q0 - eta * w2), kernel_tol);
            if !upper.is_empty() && min_minkowski_square(&upper) <= self.tolerances.causal {
                return Err(Error::AmbiguousW0 { w1, w2 });
            }
        }

        Ok(RoofSolution {
            w0: w1,
            psd_interval: (w1, w2),
            kernel_basis: kernel,
            flat,
            n,
            n_class,
            form,
            method,
            degenerate_window,
            tolerances: self.tolerances,
        })
    }
}

/// Real parts of the (nearly) real eigenvalues of `η·Q₀`; `None` when the
/// Schur iteration fails to converge.
///
/// Eigenvalues are read off the quasi-triangular factor directly. A 2×2
/// block whose discriminant is negative only through round-off (a split
/// double root) contributes its mean, which is accurate to machine precision.
fn pencil_candidates(q0: &Matrix4<f64>, scale: f64) -> Option<Vec<f64>> {
    let pencil = MinkowskiMetric::matrix() * q0;
    let schur = nalgebra::Schur::try_new(pencil, f64::EPSILON, SCHUR_MAX_ITER)?;
    let (_, t) = schur.unpack();
    let mut out = Vec::with_capacity(4);
    let mut i = 0;
    while i < 4 {
        if i + 1 < 4 && t[(i + 1, i)] != 0.0 {
            let (a, b, c, d) = (t[(i, i)], t[(i, i + 1)], t[(i + 1, i)], t[(i + 1, i + 1)]);
            let mean = 0.5 * (a + d);
            let half = 0.5 * (a - d);
            let disc = half * half + b * c;
            if disc >= 0.0 {
                let root = disc.sqrt();
                out.extend([mean - root, mean + root]);
            } else if (-disc).sqrt() <= 1e-6 * scale {
                out.push(mean);
            }
            i += 2;
        } else {
            out.push(t[(i, i)]);
            i += 1;
        }
    }
    out.retain(|w| w.is_finite());
    out.sort_by(f64::total_cmp);
    Some(out)
}

/// Locates `[w₁, w₂]` from the concave function `λ_min(Q_w)` alone.
fn bisect_window<F: Fn(f64) -> f64>(f: &F, lo: f64, hi: f64, tol: f64) -> Result<(f64, f64)> {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let (mut a, mut b) = (lo, hi);
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    for _ in 0..BISECTION_STEPS {
        if (b - a).abs() <= 1e-15 * (1.0 + a.abs()) {
            break;
        }
        if fc > fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
    }
    let peak = 0.5 * (a + b);
    let f_peak = f(peak);
    if f_peak < -tol {
        return Err(Error::NoPsdWindow(format!(
            "max of λ_min(Q_w) is {f_peak:e} at w = {peak}"
        )));
    }
    let root = |mut inside: f64, mut outside: f64| {
        for _ in 0..BISECTION_STEPS {
            let mid = 0.5 * (inside + outside);
            if mid == inside || mid == outside {
                break;
            }
            if f(mid) >= -tol {
                inside = mid;
            } else {
                outside = mid;
            }
        }
        inside
    };
    Ok((root(peak, lo), root(peak, hi)))
}

/// Orthonormal eigenvectors of the symmetric `m` with `|λ| ≤ tol`; falls back
/// to the eigenvector of smallest `|λ|` if none qualifies.
fn kernel_of(m: &Matrix4<f64>, tol: f64) -> Vec<FourVector> {
    let eig = SymmetricEigen::new(*m);
    let mut idx: Vec<usize> = (0..4)
        .filter(|&i| eig.eigenvalues[i].abs() <= tol)
        .collect();
    if idx.is_empty() {
        let best = (0..4)
            .min_by(|&a, &b| eig.eigenvalues[a].abs().total_cmp(&eig.eigenvalues[b].abs()))
            .unwrap_or(0);
        warn!(
            "no eigenvalue of Q_w0 within {tol:e} of zero; using {:e}",
            eig.eigenvalues[best]
        );
        idx.push(best);
    }
    idx.iter()
        .map(|&i| FourVector::from_vec4(&eig.eigenvectors.column(i).into_owned()))
        .collect()
}

/// Smallest Minkowski square over unit vectors of the span of `basis`
/// (orthonormal), i.e. the smallest eigenvalue of `Kᵀ η K`.
fn min_minkowski_square(basis: &[FourVector]) -> f64 {
    let k = basis.len();
    let gram = DMatrix::from_fn(k, k, |i, j| {
        crate::minkowski::minkowski_dot(&basis[i], &basis[j])
    });
    gram.symmetric_eigenvalues().min()
}

/// Picks the kernel vector that fixes the leaves, and decides flatness.
fn representative(q: &Matrix4<f64>, kernel: &[FourVector], tol: f64) -> (bool, FourVector) {
    let vecs: Vec<Vector4<f64>> = kernel.iter().map(|v| v.to_vec4()).collect();
    let combo = if vecs.len() >= 2 {
        // combination of two kernel vectors with vanishing time component
        let (j, _) = vecs
            .iter()
            .enumerate()
            .map(|(i, v)| (i, v[0].abs()))
            .fold((0, -1.0), |acc, x| if x.1 > acc.1 { x } else { acc });
        let i = if j == 0 { 1 } else { 0 };
        let v = vecs[i] * vecs[j][0] - vecs[j] * vecs[i][0];
        if v.norm() > 1e-12 {
            v
        } else {
            vecs[i]
        }
    } else {
        vecs[0]
    };

    let mut spatial = combo;
    spatial[0] = 0.0;
    if spatial.norm() > 1e-12 {
        spatial /= spatial.norm();
        if (q * spatial).norm() <= tol {
            let x = canonical_sign(Vector3::new(spatial[1], spatial[2], spatial[3]));
            return (true, FourVector::new(0.0, x[0], x[1], x[2]));
        }
    }

    let v = vecs[0];
    (false, FourVector::from_vec4(&(v / v[0])))
}

pub fn solve_w0(phi: &AffineMap) -> Result<RoofSolution> {
    RoofSolver::default().solve(phi)
}

pub fn concurrence(phi: &AffineMap, state: &FourVector) -> Result<f64> {
    validate_state(state)?;
    solve_w0(phi)?.concurrence(state)
}

pub fn optimal_decomposition(phi: &AffineMap, state: &FourVector) -> Result<Decomposition> {
    validate_state(state)?;
    solve_w0(phi)?.decomposition(state)
}

#[cfg(test)]
mod tests;
