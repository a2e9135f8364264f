//! Brute-force minimization of `Σ pⱼ C(πⱼ)` over convex decompositions.
//!
//! Independent of the quadratic-form machinery: only the pure-state
//! concurrence `2√det Φ(π)` is evaluated. Every value returned is achieved by
//! an explicit decomposition, so it is an upper bound on the true roof.

use nalgebra::Vector3;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bipartite::{binary_entropy, induced_map, BipartiteState};
use crate::channel::AffineMap;
use crate::error::{Error, Result};
use crate::minkowski::FourVector;
use crate::roof::{chord, pure_concurrence, validate_state};
use crate::simplex::NelderMead;
use crate::sphere::{fibonacci_hemisphere, from_angles, TangentChart};

const BOUNDARY: f64 = 1e-12;
pub const SUFFICIENCY_TOL: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct OracleConfig {
    /// Chord directions scanned on the hemisphere.
    pub grid_resolution: usize,
    pub refine_iterations: usize,
    pub n_points: usize,
    pub restarts: usize,
    pub seed: u64,
}

impl Default for OracleConfig {
    fn default() -> Self {
        Self {
            grid_resolution: 256,
            refine_iterations: 200,
            n_points: 2,
            restarts: 16,
            seed: 0x5EED,
        }
    }
}

impl OracleConfig {
    pub fn with_points(self, n_points: usize) -> Self {
        Self { n_points, ..self }
    }

    pub fn validate(&self) -> Result<()> {
        if self.grid_resolution < 16 {
            return Err(Error::InvalidConfig(format!(
                "grid_resolution must be at least 16, got {}",
                self.grid_resolution
            )));
        }
        if !(2..=8).contains(&self.n_points) {
            return Err(Error::InvalidConfig(format!(
                "n_points must lie in 2..=8, got {}",
                self.n_points
            )));
        }
        if self.restarts == 0 {
            return Err(Error::InvalidConfig("restarts must be positive".into()));
        }
        Ok(())
    }
}

/// Best decomposition found by a search.
#[derive(Debug, Clone, PartialEq)]
pub struct Candidate {
    pub value: f64,
    pub components: Vec<(f64, FourVector)>,
}

/// Minimizes `Σ pⱼ cost(πⱼ)` over decompositions of `state` into
/// `cfg.n_points` pure states.
pub fn minimize_roof<F>(cost: &F, state: &FourVector, cfg: &OracleConfig) -> Result<Candidate>
where
    F: Fn(&FourVector) -> f64 + Sync,
{
    cfg.validate()?;
    validate_state(state)?;
    let r = state.x;
    let len = r.norm();
    if len >= 1.0 - BOUNDARY {
        let pure = FourVector::state(r / len);
        return Ok(Candidate {
            value: cost(&pure),
            components: vec![(1.0, pure)],
        });
    }
    let (best2, direction) = chord_search(cost, &r, cfg);
    if cfg.n_points == 2 {
        return Ok(best2);
    }
    Ok(multi_point_search(cost, &r, cfg, &direction, best2))
}

fn chord_value<F: Fn(&FourVector) -> f64>(cost: &F, r: &Vector3<f64>, u: &Vector3<f64>) -> Candidate {
    let parts = chord(r, u);
    let value = parts.iter().map(|c| c.weight * cost(&c.pure)).sum();
    Candidate {
        value,
        components: parts.into_iter().map(|c| (c.weight, c.pure)).collect(),
    }
}

fn better(a: Candidate, b: Candidate) -> Candidate {
    if b.value < a.value {
        b
    } else {
        a
    }
}

fn chord_search<F>(cost: &F, r: &Vector3<f64>, cfg: &OracleConfig) -> (Candidate, Vector3<f64>)
where
    F: Fn(&FourVector) -> f64 + Sync,
{
    let grid = fibonacci_hemisphere(cfg.grid_resolution);
    let mut scored: Vec<(f64, usize)> = grid
        .par_iter()
        .enumerate()
        .map(|(i, u)| (chord_value(cost, r, u).value, i))
        .collect();
    scored.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    let step = 2.0 / (cfg.grid_resolution as f64).sqrt();
    let nm = NelderMead::new(cfg.refine_iterations);
    let refined: Vec<(Candidate, Vector3<f64>)> = scored
        .iter()
        .take(cfg.restarts)
        .collect::<Vec<_>>()
        .par_iter()
        .map(|&&(_, i)| {
            let chart = TangentChart::new(grid[i]);
            let m = nm.minimize(
                |p| chord_value(cost, r, &chart.point(p[0], p[1])).value,
                &[0.0, 0.0],
                step,
            );
            let u = chart.point(m.x[0], m.x[1]);
            (chord_value(cost, r, &u), u)
        })
        .collect();
    refined
        .into_iter()
        .reduce(|a, b| if b.0.value < a.0.value { b } else { a })
        .expect("restarts ≥ 1")
}

/// Decomposition with `k − 2` free pure points `Pⱼ` carrying total weight `t`,
/// the remainder `(r − t·c)/(1 − t)` split along a chord. `t` is a fraction of
/// the largest value keeping the remainder inside the ball, so every
/// parameter vector describes a valid decomposition.
struct MultiPoint<'a> {
    r: &'a Vector3<f64>,
    free: usize,
}

impl MultiPoint<'_> {
    fn dim(&self) -> usize {
        3 * self.free + 3
    }

    fn decode(&self, p: &[f64]) -> Vec<(f64, Vector3<f64>)> {
        let k = self.free;
        let points: Vec<Vector3<f64>> = (0..k).map(|j| from_angles(p[2 * j], p[2 * j + 1])).collect();
        let logits = &p[2 * k..3 * k];
        let top = logits.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let exp: Vec<f64> = logits.iter().map(|l| (l - top).exp()).collect();
        let z: f64 = exp.iter().sum();
        let weights: Vec<f64> = exp.iter().map(|e| e / z).collect();
        let centroid: Vector3<f64> = points.iter().zip(&weights).map(|(q, w)| q * *w).sum();

        // largest t with |r − t·c| ≤ 1 − t; the gap is convex in t
        let gap = |t: f64| (self.r - centroid * t).norm() - (1.0 - t);
        let (mut lo, mut hi) = (0.0, 1.0);
        for _ in 0..60 {
            let mid = 0.5 * (lo + hi);
            if gap(mid) <= 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let t = lo / (1.0 + (-p[3 * k]).exp());
        let rest = (self.r - centroid * t) / (1.0 - t);
        let mut out: Vec<(f64, Vector3<f64>)> =
            points.iter().zip(&weights).map(|(q, w)| (t * w, *q)).collect();
        let len = rest.norm();
        if len >= 1.0 - BOUNDARY {
            out.push((1.0 - t, rest / len));
        } else {
            let u = from_angles(p[3 * k + 1], p[3 * k + 2]);
            for c in chord(&rest, &u) {
                out.push(((1.0 - t) * c.weight, c.pure.x));
            }
        }
        out
    }

    fn evaluate<F: Fn(&FourVector) -> f64>(&self, cost: &F, p: &[f64]) -> Candidate {
        let components: Vec<(f64, FourVector)> = self
            .decode(p)
            .into_iter()
            .map(|(w, q)| (w, FourVector::state(q)))
            .collect();
        Candidate {
            value: components.iter().map(|(w, q)| w * cost(q)).sum(),
            components,
        }
    }
}

fn restart_seed(base: u64, restart: usize) -> u64 {
    base ^ (restart as u64 + 1).wrapping_mul(0x9E37_79B9_7F4A_7C15)
}

fn multi_point_search<F>(
    cost: &F,
    r: &Vector3<f64>,
    cfg: &OracleConfig,
    direction: &Vector3<f64>,
    best2: Candidate,
) -> Candidate
where
    F: Fn(&FourVector) -> f64 + Sync,
{
    let problem = MultiPoint {
        r,
        free: cfg.n_points - 2,
    };
    let dim = problem.dim();
    let nm = NelderMead::new(cfg.refine_iterations * dim);
    let theta = direction.z.clamp(-1.0, 1.0).acos();
    let phi = direction.y.atan2(direction.x);

    let results: Vec<Candidate> = (0..cfg.restarts)
        .into_par_iter()
        .map(|restart| {
            let mut rng = ChaCha8Rng::seed_from_u64(restart_seed(cfg.seed, restart));
            let mut start = Vec::with_capacity(dim);
            for _ in 0..problem.free {
                start.push(rng.random_range(-1.0f64..1.0).acos());
                start.push(rng.random_range(0.0..std::f64::consts::TAU));
            }
            for _ in 0..problem.free {
                start.push(rng.sample(StandardNormal));
            }
            if restart == 0 {
                // start next to the best chord with the free points nearly unweighted
                start.extend([-4.0, theta, phi]);
            } else {
                start.push(rng.sample(StandardNormal));
                start.push(rng.random_range(-1.0f64..1.0).acos());
                start.push(rng.random_range(0.0..std::f64::consts::TAU));
            }
            let m = nm.minimize(|p| problem.evaluate(cost, p).value, &start, 0.5);
            problem.evaluate(cost, &m.x)
        })
        .collect();
    results.into_iter().fold(best2, better)
}

pub fn brute_force_concurrence(phi: &AffineMap, state: &FourVector, cfg: &OracleConfig) -> Result<f64> {
    phi.check_positive()?;
    let cost = |pi: &FourVector| pure_concurrence(phi, pi);
    Ok(minimize_roof(&cost, state, cfg)?.value)
}

/// Entanglement of formation of a rank-≤2 state, minimized directly over
/// decompositions of its coefficient state with the entropy of the marginal
/// as pure-state cost.
pub fn brute_force_eof(s: &BipartiteState, cfg: &OracleConfig) -> Result<f64> {
    let induced = induced_map(s)?;
    let state = s.coefficient_state(&induced.basis);
    let phi = induced.map;
    let cost = |pi: &FourVector| {
        let y = phi.apply(pi);
        binary_entropy(0.5 * (1.0 + (y.x.norm() / y.x0).min(1.0)))
    };
    Ok(minimize_roof(&cost, &state, cfg)?.value)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SufficiencyReport {
    pub min2: f64,
    pub min3: f64,
    pub min4: f64,
    pub tol: f64,
    pub two_point_sufficient: bool,
}

pub fn two_point_sufficiency(
    phi: &AffineMap,
    state: &FourVector,
    cfg: &OracleConfig,
) -> Result<SufficiencyReport> {
    let min2 = brute_force_concurrence(phi, state, &cfg.with_points(2))?;
    let min3 = brute_force_concurrence(phi, state, &cfg.with_points(3))?;
    let min4 = brute_force_concurrence(phi, state, &cfg.with_points(4))?;
    let tol = SUFFICIENCY_TOL;
    Ok(SufficiencyReport {
        min2,
        min3,
        min4,
        tol,
        two_point_sufficient: min2 <= min3 + tol && min2 <= min4 + tol,
    })
}
