//! Rank-two states of `2 × n` systems reduced to qubit maps.
//!
//! If `ρ = Σᵢⱼ ρᵢⱼ |vᵢ⟩⟨vⱼ|` is supported on `span{v₁, v₂}`, every
//! decomposition of `ρ` lives in that plane and `Tr_B` restricted to it is the
//! completely positive qubit map `Φ(σ) = Σᵢⱼ σᵢⱼ Dᵢⱼ` with `Dᵢⱼ = Tr_B |vᵢ⟩⟨vⱼ|`.
//! The concurrence of `ρ` is the concurrence of `Φ` at the coefficient state
//! `(ρᵢⱼ)`.

use nalgebra::{DMatrix, DVector, Matrix4, SymmetricEigen};
use num_complex::Complex64;
use serde::Serialize;

use crate::channel::AffineMap;
use crate::error::{Error, Result};
use crate::minkowski::{from_four_vector, to_four_vector, FourVector, Hermitian2};
use crate::roof::{RoofSolution, RoofSolver};

/// Eigenvalues below this fraction of the largest one count as zero.
pub const RANK_CUTOFF: f64 = 1e-9;
const PSD_TOL: f64 = 1e-10;
const TRACE_TOL: f64 = 1e-12;
const HERMITIAN_TOL: f64 = 1e-10;

pub type Block = [[Complex64; 2]; 2];

fn czero() -> Complex64 {
    Complex64::new(0.0, 0.0)
}

/// Density operator of a `2 × n` system, product basis ordered with the
/// second factor fastest (`index = a·n + b`).
#[derive(Debug, Clone)]
pub struct BipartiteState {
    n: usize,
    matrix: DMatrix<Complex64>,
    /// Descending.
    eigenvalues: Vec<f64>,
    eigenvectors: Vec<DVector<Complex64>>,
    rank: usize,
}

impl BipartiteState {
    pub fn new(n: usize, matrix: DMatrix<Complex64>) -> Result<Self> {
        if n == 0 {
            return Err(Error::Dimensions("second factor must have n ≥ 1".into()));
        }
        let dim = 2 * n;
        if matrix.nrows() != dim || matrix.ncols() != dim {
            return Err(Error::Dimensions(format!(
                "expected a {dim}×{dim} matrix for dims (2, {n}), got {}×{}",
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        let asym = (&matrix - matrix.adjoint()).camax();
        if !(asym <= HERMITIAN_TOL) {
            return Err(Error::InvalidState(format!(
                "matrix is not Hermitian (max |ρ − ρ†| = {asym:e})"
            )));
        }
        let matrix = (&matrix + matrix.adjoint()).map(|z| z * 0.5);
        let trace = matrix.trace().re;
        if (trace - 1.0).abs() > TRACE_TOL {
            return Err(Error::InvalidState(format!("trace is {trace}, expected 1")));
        }

        let eig = SymmetricEigen::new(matrix.clone());
        let mut order: Vec<usize> = (0..dim).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
        let eigenvalues: Vec<f64> = order.iter().map(|&i| eig.eigenvalues[i]).collect();
        if eigenvalues[dim - 1] < -PSD_TOL {
            return Err(Error::InvalidState(format!(
                "matrix is not positive semidefinite (eigenvalue {:e})",
                eigenvalues[dim - 1]
            )));
        }
        let eigenvectors = order
            .iter()
            .map(|&i| fix_phase(eig.eigenvectors.column(i).into_owned()))
            .collect();
        let cutoff = RANK_CUTOFF * eigenvalues[0];
        let rank = eigenvalues.iter().filter(|&&l| l > cutoff).count();
        Ok(Self {
            n,
            matrix,
            eigenvalues,
            eigenvectors,
            rank,
        })
    }

    /// `Σ pₖ |ψₖ⟩⟨ψₖ|` with each ket normalized; weights must be non-negative
    /// and sum to one.
    pub fn from_mixture(n: usize, mixture: &[(f64, DVector<Complex64>)]) -> Result<Self> {
        let dim = 2 * n;
        let total: f64 = mixture.iter().map(|(p, _)| p).sum();
        if mixture.iter().any(|(p, _)| !(*p >= 0.0)) || (total - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidState(format!(
                "mixture weights must be non-negative and sum to 1 (sum {total})"
            )));
        }
        let mut rho = DMatrix::from_element(dim, dim, czero());
        for (p, ket) in mixture {
            if ket.len() != dim {
                return Err(Error::Dimensions(format!(
                    "ket has {} entries, expected {dim}",
                    ket.len()
                )));
            }
            let norm = ket.norm();
            if norm == 0.0 {
                return Err(Error::InvalidState("zero ket in mixture".into()));
            }
            let k = ket / Complex64::new(norm, 0.0);
            rho += (&k * k.adjoint()) * Complex64::new(p / total, 0.0);
        }
        Self::new(n, rho)
    }

    pub fn pure(n: usize, ket: DVector<Complex64>) -> Result<Self> {
        Self::from_mixture(n, &[(1.0, ket)])
    }

    pub fn dims(&self) -> (usize, usize) {
        (2, self.n)
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.matrix
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    fn require_rank_two(&self) -> Result<()> {
        if self.rank > 2 {
            Err(Error::RankTooHigh { rank: self.rank })
        } else {
            Ok(())
        }
    }

    /// Eigenvectors of the two largest eigenvalues, each with its
    /// largest-magnitude component made real and positive.
    pub fn support_basis(&self) -> Result<[DVector<Complex64>; 2]> {
        self.require_rank_two()?;
        Ok([self.eigenvectors[0].clone(), self.eigenvectors[1].clone()])
    }

    /// `(⟨vᵢ|ρ|vⱼ⟩)` for an orthonormal pair spanning the support, as a
    /// qubit state.
    pub fn coefficient_state(&self, basis: &[DVector<Complex64>; 2]) -> FourVector {
        let mut block = [[czero(); 2]; 2];
        for i in 0..2 {
            let rv = &self.matrix * &basis[i];
            for j in 0..2 {
                // ⟨v_j|ρ|v_i⟩ = block[j][i]
                block[j][i] = basis[j].dotc(&rv);
            }
        }
        let v = to_four_vector(&Hermitian2::from_complex(block));
        v.scale(1.0 / v.x0)
    }
}

/// Multiplies `v` by the phase that makes its largest-magnitude entry real
/// and positive.
fn fix_phase(v: DVector<Complex64>) -> DVector<Complex64> {
    let mut best = 0;
    for (i, z) in v.iter().enumerate() {
        if z.norm() > v[best].norm() * (1.0 + 1e-12) {
            best = i;
        }
    }
    let z = v[best];
    if z.norm() == 0.0 {
        return v;
    }
    let phase = z.conj() / z.norm();
    v.map(|x| x * phase)
}

/// `Tr_B |u⟩⟨v|` for kets of a `2 × n` system.
pub fn partial_trace_outer(n: usize, u: &DVector<Complex64>, v: &DVector<Complex64>) -> Block {
    let mut out = [[czero(); 2]; 2];
    for a in 0..2 {
        for c in 0..2 {
            out[a][c] = (0..n).map(|b| u[a * n + b] * v[c * n + b].conj()).sum();
        }
    }
    out
}

/// The qubit map induced by the partial trace on `span{v₁, v₂}`.
#[derive(Debug, Clone)]
pub struct InducedMap {
    pub basis: [DVector<Complex64>; 2],
    /// `blocks[i][j] = Dᵢⱼ = Tr_B |vᵢ⟩⟨vⱼ|`.
    pub blocks: [[Block; 2]; 2],
    pub map: AffineMap,
}

impl InducedMap {
    pub fn from_basis(n: usize, basis: [DVector<Complex64>; 2]) -> Self {
        let mut blocks = [[[[czero(); 2]; 2]; 2]; 2];
        for (i, row) in blocks.iter_mut().enumerate() {
            for (j, block) in row.iter_mut().enumerate() {
                *block = partial_trace_outer(n, &basis[i], &basis[j]);
            }
        }
        let mut induced = Self {
            basis,
            blocks,
            map: AffineMap::identity(),
        };
        induced.map = induced.affine_form();
        induced
    }

    /// `Σᵢⱼ σᵢⱼ Dᵢⱼ`.
    pub fn apply_matrix(&self, sigma: &Block) -> Block {
        let mut out = [[czero(); 2]; 2];
        for i in 0..2 {
            for j in 0..2 {
                for a in 0..2 {
                    for c in 0..2 {
                        out[a][c] += sigma[i][j] * self.blocks[i][j][a][c];
                    }
                }
            }
        }
        out
    }

    fn image(&self, v: &FourVector) -> FourVector {
        let sigma = from_four_vector(v).to_complex();
        to_four_vector(&Hermitian2::from_complex(self.apply_matrix(&sigma)))
    }

    /// Reads `(Λ, t)` off the images of the identity and the three axes.
    fn affine_form(&self) -> AffineMap {
        let t = self.image(&FourVector::new(1.0, 0.0, 0.0, 0.0)).x;
        let mut lambda = nalgebra::Matrix3::zeros();
        for k in 0..3 {
            let mut e = FourVector::new(0.0, 0.0, 0.0, 0.0);
            e.x[k] = 1.0;
            lambda.set_column(k, &self.image(&e).x);
        }
        AffineMap::new(lambda, t)
    }
}

pub fn induced_map(s: &BipartiteState) -> Result<InducedMap> {
    let basis = s.support_basis()?;
    Ok(InducedMap::from_basis(s.n, basis))
}

/// Concurrence of a rank-≤2 state together with the roof data it came from.
#[derive(Debug, Clone)]
pub struct Reduction {
    pub induced: InducedMap,
    pub coefficient_state: FourVector,
    /// `None` for pure inputs, which need no roof.
    pub roof: Option<RoofSolution>,
    pub concurrence: f64,
}

pub fn reduce(s: &BipartiteState, solver: &RoofSolver) -> Result<Reduction> {
    let induced = induced_map(s)?;
    let coefficient_state = s.coefficient_state(&induced.basis);
    if s.rank <= 1 {
        let marginal = Hermitian2::from_complex(partial_trace_outer(
            s.n,
            &induced.basis[0],
            &induced.basis[0],
        ));
        let concurrence = 2.0 * marginal.det().max(0.0).sqrt();
        return Ok(Reduction {
            induced,
            coefficient_state,
            roof: None,
            concurrence,
        });
    }
    // a partial trace is completely positive, hence positive
    let roof = solver.solve_unchecked(&induced.map)?;
    let concurrence = roof.concurrence_unchecked(&coefficient_state);
    Ok(Reduction {
        induced,
        coefficient_state,
        roof: Some(roof),
        concurrence,
    })
}

pub fn concurrence_2xn(s: &BipartiteState) -> Result<f64> {
    Ok(reduce(s, &RoofSolver::default())?.concurrence)
}

/// Two-qubit concurrence `max(0, λ₁ − λ₂ − λ₃ − λ₄)`, with `λᵢ` the
/// square roots of the eigenvalues of `ρ (σ_y⊗σ_y) ρ* (σ_y⊗σ_y)`, descending.
pub fn wootters_concurrence(s: &BipartiteState) -> Result<f64> {
    if s.n != 2 {
        return Err(Error::Dimensions(format!(
            "Wootters formula needs dims (2, 2), got (2, {})",
            s.n
        )));
    }
    let rho = Matrix4::from_iterator(s.matrix.iter().copied());
    let one = Complex64::new(1.0, 0.0);
    let mut flip = Matrix4::from_element(czero());
    flip[(0, 3)] = -one;
    flip[(1, 2)] = one;
    flip[(2, 1)] = one;
    flip[(3, 0)] = -one;
    let tilde = flip * rho.conjugate() * flip;

    let eig = SymmetricEigen::new(rho);
    let sqrt_vals = eig
        .eigenvalues
        .map(|l| Complex64::new(l.max(0.0).sqrt(), 0.0));
    let sqrt_rho =
        eig.eigenvectors * Matrix4::from_diagonal(&sqrt_vals) * eig.eigenvectors.adjoint();
    let m = sqrt_rho * tilde * sqrt_rho;
    let m = (m + m.adjoint()) * Complex64::new(0.5, 0.0);
    let mut lambdas: Vec<f64> = m
        .symmetric_eigenvalues()
        .iter()
        .map(|&mu| mu.max(0.0).sqrt())
        .collect();
    lambdas.sort_by(|a, b| b.total_cmp(a));
    Ok((lambdas[0] - lambdas[1] - lambdas[2] - lambdas[3]).max(0.0))
}

/// Binary entropy in bits.
pub fn binary_entropy(x: f64) -> f64 {
    let term = |p: f64| if p <= 0.0 { 0.0 } else { -p * p.log2() };
    term(x) + term(1.0 - x)
}

/// `h((1 + sqrt(1 − c²))/2)`.
pub fn eof_from_concurrence(c: f64) -> Result<f64> {
    if !(-1e-12..=1.0 + 1e-12).contains(&c) {
        return Err(Error::OutOfRange(format!(
            "concurrence must lie in [0, 1], got {c}"
        )));
    }
    let c = c.clamp(0.0, 1.0);
    Ok(binary_entropy(0.5 * (1.0 + (1.0 - c * c).sqrt())))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EofBound {
    pub value: f64,
    /// The roof is flat (or the state pure), so the value is the
    /// entanglement of formation itself rather than a lower bound.
    pub exact: bool,
}

pub fn eof_bound(s: &BipartiteState) -> Result<EofBound> {
    let r = reduce(s, &RoofSolver::default())?;
    Ok(EofBound {
        value: eof_from_concurrence(r.concurrence)?,
        exact: r.roof.as_ref().is_none_or(|roof| roof.flat),
    })
}
