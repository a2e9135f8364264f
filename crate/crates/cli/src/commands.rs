//! One function per subcommand; each returns a report or a classified error.

use std::time::Instant;

use qubit_roof::bipartite::{eof_bound, reduce as reduce_state};
use qubit_roof::oracle::{brute_force_concurrence, two_point_sufficiency, OracleConfig};
use qubit_roof::roof::{pure_concurrence, validate_state};
use qubit_roof::{AffineMap, FourVector, RoofSolver, Tolerances};

use crate::error::CliError;
use crate::input::{BipartiteDescriptor, ChannelDescriptor, StateDescriptor};
use crate::report::{
    ChannelChecks, ChannelEcho, DecompositionReport, OracleReport, ReductionReport, RoofReport, RunReport,
};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Settings {
    pub tolerances: Tolerances,
    pub seed: u64,
    pub timing: bool,
}

impl Default for Settings {
    fn default() -> Self {
        Self {
            tolerances: Tolerances::default(),
            seed: OracleConfig::default().seed,
            timing: false,
        }
    }
}

impl Settings {
    pub fn validate(&self) -> Result<(), CliError> {
        let t = self.tolerances;
        if !(t.psd > 0.0 && t.psd.is_finite() && t.causal > 0.0 && t.causal.is_finite()) {
            return Err(CliError::parse("tolerances must be positive and finite"));
        }
        Ok(())
    }

    pub fn solver(&self) -> RoofSolver {
        RoofSolver::new(self.tolerances)
    }
}

fn elapsed_ms(start: Instant) -> f64 {
    start.elapsed().as_secs_f64() * 1e3
}

fn finish(mut report: RunReport, settings: &Settings, start: Instant) -> RunReport {
    if settings.timing {
        report.timing_ms = Some(elapsed_ms(start));
    }
    report
}

fn state_vector(state: &StateDescriptor) -> Result<FourVector, CliError> {
    let v = state.to_four_vector()?;
    validate_state(&v)?;
    Ok(v)
}

pub fn channel_info(channel: &ChannelDescriptor, settings: &Settings) -> Result<RunReport, CliError> {
    let start = Instant::now();
    settings.validate()?;
    let map = channel.to_map()?;
    let roof = settings.solver().solve(&map)?;
    let mut report = RunReport::new("channel-info", settings.tolerances, &map);
    report.checks = Some(ChannelChecks::of(&map));
    report.roof = Some((&roof).into());
    Ok(finish(report, settings, start))
}

pub fn concurrence(
    channel: &ChannelDescriptor,
    state: &StateDescriptor,
    oracle: bool,
    decompose: bool,
    settings: &Settings,
) -> Result<RunReport, CliError> {
    let start = Instant::now();
    settings.validate()?;
    let map = channel.to_map()?;
    let roof = settings.solver().solve(&map)?;
    let x = state_vector(state)?;
    let c = roof.concurrence(&x)?;

    let mut report = RunReport::new("concurrence", settings.tolerances, &map);
    report.checks = Some(ChannelChecks::of(&map));
    report.roof = Some((&roof).into());
    report.state = Some(x.x.into());
    report.concurrence = Some(c);
    if decompose {
        let d = roof.decomposition(&x)?;
        report.decomposition = Some(DecompositionReport::new(&d, |p| pure_concurrence(&map, p)));
    }
    if oracle {
        let cfg = OracleConfig {
            seed: settings.seed,
            ..OracleConfig::default()
        };
        report.oracle = Some(run_oracle(&map, &x, c, &cfg, false)?);
    }
    Ok(finish(report, settings, start))
}

fn run_oracle(
    map: &AffineMap,
    x: &FourVector,
    roof_value: f64,
    cfg: &OracleConfig,
    sufficiency: bool,
) -> Result<OracleReport, CliError> {
    let value = brute_force_concurrence(map, x, cfg)?;
    let sufficiency = if sufficiency {
        Some(two_point_sufficiency(map, x, cfg)?)
    } else {
        None
    };
    Ok(OracleReport {
        config: *cfg,
        value,
        gap: value - roof_value,
        sufficiency,
    })
}

pub fn oracle(
    channel: &ChannelDescriptor,
    state: &StateDescriptor,
    cfg: &OracleConfig,
    sufficiency: bool,
    settings: &Settings,
) -> Result<RunReport, CliError> {
    let start = Instant::now();
    settings.validate()?;
    cfg.validate()?;
    let map = channel.to_map()?;
    let roof = settings.solver().solve(&map)?;
    let x = state_vector(state)?;
    let c = roof.concurrence(&x)?;

    let mut report = RunReport::new("oracle", settings.tolerances, &map);
    report.roof = Some((&roof).into());
    report.state = Some(x.x.into());
    report.concurrence = Some(c);
    report.oracle = Some(run_oracle(&map, &x, c, cfg, sufficiency)?);
    Ok(finish(report, settings, start))
}

fn pairs(v: &nalgebra::DVector<num_complex::Complex64>) -> Vec<[f64; 2]> {
    v.iter().map(|z| [z.re, z.im]).collect()
}

pub fn reduce(
    bipartite: &BipartiteDescriptor,
    then_concurrence: bool,
    settings: &Settings,
) -> Result<RunReport, CliError> {
    let start = Instant::now();
    settings.validate()?;
    let state = bipartite.to_state()?;
    let reduction = reduce_state(&state, &settings.solver())?;
    let induced = &reduction.induced;

    let mut blocks = [[[[[0.0; 2]; 2]; 2]; 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            for a in 0..2 {
                for b in 0..2 {
                    let z = induced.blocks[i][j][a][b];
                    blocks[i][j][a][b] = [z.re, z.im];
                }
            }
        }
    }
    let mut report = RunReport::new("reduce", settings.tolerances, &induced.map);
    report.reduction = Some(ReductionReport {
        dims: [2, state.dims().1],
        rank: state.rank(),
        eigenvalues: state.eigenvalues().to_vec(),
        basis: [pairs(&induced.basis[0]), pairs(&induced.basis[1])],
        blocks,
        induced: ChannelEcho::from(&induced.map),
        coefficient_state: reduction.coefficient_state.x.into(),
        completely_positive: induced.map.is_completely_positive(),
    });
    if then_concurrence {
        report.roof = reduction.roof.as_ref().map(RoofReport::from);
        report.state = Some(reduction.coefficient_state.x.into());
        report.concurrence = Some(reduction.concurrence);
        report.eof_bound = Some(eof_bound(&state)?);
    }
    Ok(finish(report, settings, start))
}
