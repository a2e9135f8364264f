//! JSON descriptors for channels, qubit states and bipartite states.

use std::path::Path;

use nalgebra::{DMatrix, DVector, Matrix3, Vector3};
use num_complex::Complex64;
use qubit_roof::minkowski::to_four_vector;
use qubit_roof::{AffineMap, BipartiteState, CanonicalParams, FourVector, Hermitian2};
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::CliError;

type Pair = [f64; 2];

fn complex(p: &Pair) -> Complex64 {
    Complex64::new(p[0], p[1])
}

pub fn read_json(path: &Path) -> Result<Value, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::parse(format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text)
        .map_err(|e| CliError::parse(format!("malformed JSON in {}: {e}", path.display())))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CanonicalSpec {
    pub alpha: f64,
    pub beta: f64,
    pub omega: [f64; 3],
    pub xi: [f64; 3],
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum NamedChannel {
    Identity,
    CompletelyDepolarizing,
    Unital { lambda: [f64; 3] },
    Axial { alpha: f64, beta: f64, gamma: f64 },
    AmplitudeDamping { alpha: f64 },
    PhaseDamping { beta: f64 },
    Depolarizing { lambda: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ChannelDescriptor {
    Affine { lambda: [[f64; 3]; 3], t: [f64; 3] },
    Canonical(CanonicalSpec),
    Named(NamedChannel),
}

fn field<T: serde::de::DeserializeOwned>(value: &Value, what: &str) -> Result<T, CliError> {
    serde_json::from_value(value.clone()).map_err(|e| CliError::parse(format!("invalid {what}: {e}")))
}

fn only_keys(obj: &serde_json::Map<String, Value>, allowed: &[&str], what: &str) -> Result<(), CliError> {
    match obj.keys().find(|k| !allowed.contains(&k.as_str())) {
        Some(k) => Err(CliError::parse(format!("unexpected key \"{k}\" in {what}"))),
        None => Ok(()),
    }
}

impl ChannelDescriptor {
    pub fn from_value(value: &Value) -> Result<Self, CliError> {
        let obj = value
            .as_object()
            .ok_or_else(|| CliError::parse("channel descriptor must be a JSON object"))?;
        if let Some(c) = obj.get("canonical") {
            only_keys(obj, &["canonical"], "channel descriptor")?;
            return Ok(Self::Canonical(field(c, "canonical parameters")?));
        }
        if let Some(n) = obj.get("named") {
            only_keys(obj, &["named"], "channel descriptor")?;
            return Ok(Self::Named(field(n, "named channel")?));
        }
        if obj.contains_key("lambda") || obj.contains_key("t") {
            only_keys(obj, &["lambda", "t"], "channel descriptor")?;
            let lambda = obj
                .get("lambda")
                .ok_or_else(|| CliError::parse("channel descriptor lacks \"lambda\""))?;
            let t = obj
                .get("t")
                .ok_or_else(|| CliError::parse("channel descriptor lacks \"t\""))?;
            return Ok(Self::Affine {
                lambda: field(lambda, "lambda (3×3 row-major)")?,
                t: field(t, "t (3-vector)")?,
            });
        }
        Err(CliError::parse(
            "channel descriptor needs \"lambda\"/\"t\", \"canonical\" or \"named\"",
        ))
    }

    pub fn read(path: &Path) -> Result<Self, CliError> {
        Self::from_value(&read_json(path)?)
    }

    pub fn to_map(&self) -> Result<AffineMap, CliError> {
        let map = match *self {
            Self::Affine { lambda, t } => {
                let m = Matrix3::from_fn(|i, j| lambda[i][j]);
                if m.iter().chain(t.iter()).any(|x| !x.is_finite()) {
                    return Err(CliError::parse("channel entries must be finite"));
                }
                AffineMap::new(m, Vector3::from(t))
            }
            Self::Canonical(c) => {
                let p = CanonicalParams::new(c.alpha, c.beta, c.omega, Vector3::from(c.xi))?;
                AffineMap::from_canonical(&p)?
            }
            Self::Named(n) => match n {
                NamedChannel::Identity => AffineMap::identity(),
                NamedChannel::CompletelyDepolarizing => AffineMap::completely_depolarizing(),
                NamedChannel::Unital { lambda } => AffineMap::unital(lambda)?,
                NamedChannel::Axial { alpha, beta, gamma } => AffineMap::axial(alpha, beta, gamma)?,
                NamedChannel::AmplitudeDamping { alpha } => AffineMap::amplitude_damping(alpha)?,
                NamedChannel::PhaseDamping { beta } => AffineMap::phase_damping(beta)?,
                NamedChannel::Depolarizing { lambda } => AffineMap::depolarizing(lambda)?,
            },
        };
        Ok(map)
    }
}

const HERMITIAN_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub enum StateDescriptor {
    Bloch([f64; 3]),
    Matrix([[Pair; 2]; 2]),
}

impl StateDescriptor {
    pub fn from_value(value: &Value) -> Result<Self, CliError> {
        let obj = value
            .as_object()
            .ok_or_else(|| CliError::parse("state descriptor must be a JSON object"))?;
        if let Some(b) = obj.get("bloch") {
            only_keys(obj, &["bloch"], "state descriptor")?;
            return Ok(Self::Bloch(field(b, "bloch vector")?));
        }
        if let Some(m) = obj.get("matrix") {
            only_keys(obj, &["matrix"], "state descriptor")?;
            return Ok(Self::Matrix(field(m, "2×2 density matrix of [re, im] pairs")?));
        }
        Err(CliError::parse("state descriptor needs \"bloch\" or \"matrix\""))
    }

    pub fn read(path: &Path) -> Result<Self, CliError> {
        Self::from_value(&read_json(path)?)
    }

    /// The state as a four-vector; validity (trace, ball) is checked by the
    /// solver.
    pub fn to_four_vector(&self) -> Result<FourVector, CliError> {
        let v = match self {
            Self::Bloch(b) => FourVector::state(Vector3::from(*b)),
            Self::Matrix(m) => {
                let z = [[complex(&m[0][0]), complex(&m[0][1])], [complex(&m[1][0]), complex(&m[1][1])]];
                let asym = (z[0][1] - z[1][0].conj())
                    .norm()
                    .max(z[0][0].im.abs())
                    .max(z[1][1].im.abs());
                if asym > HERMITIAN_TOL {
                    return Err(CliError::invalid_state(format!(
                        "density matrix is not Hermitian (deviation {asym:e})"
                    )));
                }
                to_four_vector(&Hermitian2::from_complex(z))
            }
        };
        if !(v.x0.is_finite() && v.x.iter().all(|x| x.is_finite())) {
            return Err(CliError::parse("state entries must be finite"));
        }
        Ok(v)
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
pub struct MixtureTerm {
    pub weight: f64,
    pub ket: Vec<Pair>,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
struct BipartiteRaw {
    dims: [usize; 2],
    mixture: Option<Vec<MixtureTerm>>,
    matrix: Option<Vec<Pair>>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum BipartiteDescriptor {
    Mixture { n: usize, terms: Vec<MixtureTerm> },
    Matrix { n: usize, entries: Vec<Pair> },
}

impl BipartiteDescriptor {
    pub fn from_value(value: &Value) -> Result<Self, CliError> {
        let raw: BipartiteRaw = field(value, "bipartite state descriptor")?;
        let [a, n] = raw.dims;
        if a != 2 || n == 0 {
            return Err(CliError::parse(format!(
                "dims must be [2, n] with n ≥ 1, got [{a}, {n}]"
            )));
        }
        match (raw.mixture, raw.matrix) {
            (Some(terms), None) => Ok(Self::Mixture { n, terms }),
            (None, Some(entries)) => Ok(Self::Matrix { n, entries }),
            _ => Err(CliError::parse(
                "bipartite descriptor needs exactly one of \"mixture\" or \"matrix\"",
            )),
        }
    }

    pub fn read(path: &Path) -> Result<Self, CliError> {
        Self::from_value(&read_json(path)?)
    }

    pub fn to_state(&self) -> Result<BipartiteState, CliError> {
        match self {
            Self::Mixture { n, terms } => {
                let mixture: Vec<(f64, DVector<Complex64>)> = terms
                    .iter()
                    .map(|t| (t.weight, DVector::from_iterator(t.ket.len(), t.ket.iter().map(complex))))
                    .collect();
                Ok(BipartiteState::from_mixture(*n, &mixture)?)
            }
            Self::Matrix { n, entries } => {
                let dim = 2 * n;
                if entries.len() != dim * dim {
                    return Err(CliError::parse(format!(
                        "matrix needs {} row-major entries for dims [2, {n}], got {}",
                        dim * dim,
                        entries.len()
                    )));
                }
                let m = DMatrix::from_row_iterator(dim, dim, entries.iter().map(complex));
                Ok(BipartiteState::new(*n, m)?)
            }
        }
    }
}
