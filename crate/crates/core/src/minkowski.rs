//! Hermitian 2×2 matrices as points of Minkowski space.
//!
//! A Hermitian matrix `ρ = ½(x₀ I + x⃗·σ⃗)` is identified with the four-vector
//! `(x₀, x⃗)`. Under this map `det ρ = ¼ x·x` for the signature `(+,−,−,−)`,
//! so positive matrices form the forward light cone and qubit states are the
//! slice `x₀ = 1` of it.

use nalgebra::{Matrix4, Vector3, Vector4};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default tolerance on the Minkowski square of a unit-norm vector.
pub const DEFAULT_TAU_CAUSAL: f64 = 1e-9;

/// A point `(x₀, x⃗)` of Minkowski space.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FourVector {
    pub x0: f64,
    pub x: Vector3<f64>,
}

impl FourVector {
    pub const fn new(x0: f64, x1: f64, x2: f64, x3: f64) -> Self {
        Self {
            x0,
            x: Vector3::new(x1, x2, x3),
        }
    }

    /// The qubit state with Bloch vector `bloch`.
    pub fn state(bloch: Vector3<f64>) -> Self {
        Self { x0: 1.0, x: bloch }
    }

    pub fn from_vec4(v: &Vector4<f64>) -> Self {
        Self::new(v[0], v[1], v[2], v[3])
    }

    pub fn to_vec4(&self) -> Vector4<f64> {
        Vector4::new(self.x0, self.x[0], self.x[1], self.x[2])
    }

    pub fn to_array(&self) -> [f64; 4] {
        [self.x0, self.x[0], self.x[1], self.x[2]]
    }

    pub fn euclidean_norm(&self) -> f64 {
        self.to_vec4().norm()
    }

    pub fn scale(&self, s: f64) -> Self {
        Self {
            x0: s * self.x0,
            x: self.x * s,
        }
    }

    /// `s·self + (1 − s)·other`.
    pub fn lerp(&self, other: &Self, s: f64) -> Self {
        Self {
            x0: s * self.x0 + (1.0 - s) * other.x0,
            x: self.x * s + other.x * (1.0 - s),
        }
    }

    pub fn minkowski_square(&self) -> f64 {
        minkowski_dot(self, self)
    }
}

impl std::ops::Add for FourVector {
    type Output = FourVector;

    fn add(self, rhs: Self) -> Self {
        Self {
            x0: self.x0 + rhs.x0,
            x: self.x + rhs.x,
        }
    }
}

impl std::ops::Sub for FourVector {
    type Output = FourVector;

    fn sub(self, rhs: Self) -> Self {
        Self {
            x0: self.x0 - rhs.x0,
            x: self.x - rhs.x,
        }
    }
}

/// Hermitian 2×2 matrix stored as its two diagonal entries and the upper
/// off-diagonal entry `m₀₁`; `m₁₀` is its conjugate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Hermitian2 {
    pub m00: f64,
    pub m11: f64,
    pub m01: Complex64,
}

impl Hermitian2 {
    pub const fn new(m00: f64, m11: f64, m01: Complex64) -> Self {
        Self { m00, m11, m01 }
    }

    pub fn diag(m00: f64, m11: f64) -> Self {
        Self::new(m00, m11, Complex64::new(0.0, 0.0))
    }

    /// Hermitian part of an arbitrary complex 2×2 matrix given row-major.
    pub fn from_complex(m: [[Complex64; 2]; 2]) -> Self {
        Self {
            m00: m[0][0].re,
            m11: m[1][1].re,
            m01: (m[0][1] + m[1][0].conj()) * 0.5,
        }
    }

    pub fn m10(&self) -> Complex64 {
        self.m01.conj()
    }

    pub fn trace(&self) -> f64 {
        self.m00 + self.m11
    }

    pub fn det(&self) -> f64 {
        self.m00 * self.m11 - self.m01.norm_sqr()
    }

    pub fn to_complex(&self) -> [[Complex64; 2]; 2] {
        [
            [Complex64::new(self.m00, 0.0), self.m01],
            [self.m10(), Complex64::new(self.m11, 0.0)],
        ]
    }
}

/// The constant metric `η = diag(+1, −1, −1, −1)`.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct MinkowskiMetric;

impl MinkowskiMetric {
    pub const SIGNATURE: [f64; 4] = [1.0, -1.0, -1.0, -1.0];

    pub fn matrix() -> Matrix4<f64> {
        Matrix4::from_diagonal(&Vector4::from(Self::SIGNATURE))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CausalClass {
    TimeLike,
    LightLike,
    SpaceLike,
}

/// `(m₀₀+m₁₁, 2 Re m₀₁, 2 Im m₀₁, m₀₀−m₁₁)`, i.e. `ρ₀₁ = ½(x₁ + i x₂)`.
pub fn to_four_vector(m: &Hermitian2) -> FourVector {
    FourVector::new(
        m.m00 + m.m11,
        2.0 * m.m01.re,
        2.0 * m.m01.im,
        m.m00 - m.m11,
    )
}

pub fn from_four_vector(v: &FourVector) -> Hermitian2 {
    Hermitian2 {
        m00: 0.5 * (v.x0 + v.x[2]),
        m11: 0.5 * (v.x0 - v.x[2]),
        m01: Complex64::new(0.5 * v.x[0], 0.5 * v.x[1]),
    }
}

pub fn minkowski_dot(a: &FourVector, b: &FourVector) -> f64 {
    a.x0 * b.x0 - a.x.dot(&b.x)
}

/// Determinant of the matrix represented by `v`, i.e. `¼ v·v`.
pub fn det_from_vector(v: &FourVector) -> f64 {
    0.25 * minkowski_dot(v, v)
}

/// Causal class of `v` after scaling it to unit Euclidean norm.
pub fn causal_class(v: &FourVector, tau_causal: f64) -> Result<CausalClass> {
    let norm = v.euclidean_norm();
    if norm == 0.0 || !norm.is_finite() {
        return Err(Error::ZeroVector);
    }
    let square = v.scale(1.0 / norm).minkowski_square();
    Ok(if square > tau_causal {
        CausalClass::TimeLike
    } else if square < -tau_causal {
        CausalClass::SpaceLike
    } else {
        CausalClass::LightLike
    })
}
