//! Parameter sweeps over a channel template.
//!
//! A template is a channel descriptor in which some numbers are replaced by
//! strings `"$name"`; each `--param name=start:stop:count` fills one of them
//! with `count` evenly spaced values. Rows follow the lexicographic order of
//! the grid, first parameter slowest, regardless of evaluation order.

use std::io::Write;
use std::str::FromStr;

use rayon::prelude::*;
use serde_json::Value;

use qubit_roof::{FourVector, RoofSolution};

use crate::commands::Settings;
use crate::error::{CliError, ExitCode};
use crate::input::ChannelDescriptor;
use crate::report::format_f64;

#[derive(Debug, Clone, PartialEq)]
pub struct ParamRange {
    pub name: String,
    pub start: f64,
    pub stop: f64,
    pub count: usize,
}

impl ParamRange {
    pub fn values(&self) -> Vec<f64> {
        match self.count {
            0 => Vec::new(),
            1 => vec![self.start],
            n => (0..n)
                .map(|i| {
                    let s = i as f64 / (n - 1) as f64;
                    self.start + s * (self.stop - self.start)
                })
                .collect(),
        }
    }
}

impl FromStr for ParamRange {
    type Err = CliError;

    /// `name=start:stop:count` or `name=value`.
    fn from_str(s: &str) -> Result<Self, CliError> {
        let bad = || CliError::parse(format!("parameter range \"{s}\" is not name=start:stop:count"));
        let (name, spec) = s.split_once('=').ok_or_else(bad)?;
        let name = name.trim();
        if name.is_empty() || !name.chars().all(|c| c.is_ascii_alphanumeric() || c == '_') {
            return Err(bad());
        }
        let parts: Vec<&str> = spec.split(':').collect();
        let num = |t: &str| t.trim().parse::<f64>().ok().filter(|x| x.is_finite());
        let (start, stop, count) = match parts.as_slice() {
            [v] => {
                let v = num(v).ok_or_else(bad)?;
                (v, v, 1)
            }
            [a, b, n] => (
                num(a).ok_or_else(bad)?,
                num(b).ok_or_else(bad)?,
                n.trim().parse::<usize>().map_err(|_| bad())?,
            ),
            _ => return Err(bad()),
        };
        Ok(Self {
            name: name.to_string(),
            start,
            stop,
            count,
        })
    }
}

/// Cartesian product of the ranges, first range slowest.
pub fn grid(ranges: &[ParamRange]) -> Vec<Vec<f64>> {
    let mut points = vec![Vec::new()];
    for r in ranges {
        let values = r.values();
        points = points
            .into_iter()
            .flat_map(|p| {
                values.iter().map(move |&v| {
                    let mut q = p.clone();
                    q.push(v);
                    q
                })
            })
            .collect();
    }
    points
}

fn placeholders(value: &Value, out: &mut Vec<String>) {
    match value {
        Value::String(s) => {
            if let Some(name) = s.strip_prefix('$') {
                out.push(name.to_string());
            }
        }
        Value::Array(items) => items.iter().for_each(|v| placeholders(v, out)),
        Value::Object(map) => map.values().for_each(|v| placeholders(v, out)),
        _ => {}
    }
}

/// Checks that every placeholder has a range and every range a placeholder.
pub fn check_template(template: &Value, ranges: &[ParamRange]) -> Result<(), CliError> {
    let mut names = Vec::new();
    placeholders(template, &mut names);
    if names.is_empty() {
        return Err(CliError::parse("template has no \"$name\" placeholders"));
    }
    for n in &names {
        if !ranges.iter().any(|r| &r.name == n) {
            return Err(CliError::parse(format!("placeholder \"${n}\" has no --param range")));
        }
    }
    for (i, r) in ranges.iter().enumerate() {
        if !names.contains(&r.name) {
            return Err(CliError::parse(format!("parameter \"{}\" does not occur in the template", r.name)));
        }
        if ranges[..i].iter().any(|q| q.name == r.name) {
            return Err(CliError::parse(format!("parameter \"{}\" given twice", r.name)));
        }
    }
    Ok(())
}

pub fn substitute(template: &Value, ranges: &[ParamRange], values: &[f64]) -> Value {
    match template {
        Value::String(s) => match s.strip_prefix('$').and_then(|n| ranges.iter().position(|r| r.name == n)) {
            Some(i) => serde_json::Number::from_f64(values[i]).map_or(Value::Null, Value::Number),
            None => template.clone(),
        },
        Value::Array(items) => Value::Array(items.iter().map(|v| substitute(v, ranges, values)).collect()),
        Value::Object(map) => Value::Object(
            map.iter()
                .map(|(k, v)| (k.clone(), substitute(v, ranges, values)))
                .collect(),
        ),
        other => other.clone(),
    }
}

/// `count` states on the diameter along the third axis, from the south to
/// the north pole.
pub fn axis_states(count: usize) -> Vec<FourVector> {
    let axis = ParamRange {
        name: String::new(),
        start: -1.0,
        stop: 1.0,
        count,
    };
    axis.values()
        .into_iter()
        .map(|z| FourVector::new(1.0, 0.0, 0.0, z))
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct Row {
    pub params: Vec<f64>,
    pub state: Option<[f64; 3]>,
    pub w0: Option<f64>,
    pub psd_interval: Option<[f64; 2]>,
    pub flat: Option<bool>,
    pub concurrence: Option<f64>,
    pub status: ExitCode,
    pub error: String,
}

impl Row {
    fn failed(params: &[f64], state: Option<&FourVector>, e: CliError) -> Self {
        Self {
            params: params.to_vec(),
            state: state.map(|s| s.x.into()),
            w0: None,
            psd_interval: None,
            flat: None,
            concurrence: None,
            status: e.exit,
            error: e.message,
        }
    }

    fn solved(params: &[f64], roof: &RoofSolution) -> Self {
        Self {
            params: params.to_vec(),
            state: None,
            w0: Some(roof.w0),
            psd_interval: Some([roof.psd_interval.0, roof.psd_interval.1]),
            flat: Some(roof.flat),
            concurrence: None,
            status: ExitCode::Ok,
            error: String::new(),
        }
    }
}

fn solve_point(template: &Value, ranges: &[ParamRange], params: &[f64], settings: &Settings) -> Result<RoofSolution, CliError> {
    let channel = ChannelDescriptor::from_value(&substitute(template, ranges, params))?;
    let map = channel.to_map()?;
    Ok(settings.solver().solve(&map)?)
}

pub fn run(
    template: &Value,
    ranges: &[ParamRange],
    states: &[FourVector],
    settings: &Settings,
) -> Result<Vec<Row>, CliError> {
    settings.validate()?;
    check_template(template, ranges)?;
    let points = grid(ranges);
    let rows: Vec<Vec<Row>> = points
        .par_iter()
        .map(|params| {
            let roof = solve_point(template, ranges, params, settings);
            if states.is_empty() {
                return vec![match roof {
                    Ok(r) => Row::solved(params, &r),
                    Err(e) => Row::failed(params, None, e),
                }];
            }
            states
                .iter()
                .map(|s| match &roof {
                    Err(e) => Row::failed(params, Some(s), e.clone()),
                    Ok(r) => match r.concurrence(s) {
                        Ok(c) => Row {
                            state: Some(s.x.into()),
                            concurrence: Some(c),
                            ..Row::solved(params, r)
                        },
                        Err(e) => Row::failed(params, Some(s), e.into()),
                    },
                })
                .collect()
        })
        .collect();
    Ok(rows.into_iter().flatten().collect())
}

pub fn write_csv<W: Write>(out: W, ranges: &[ParamRange], with_state: bool, rows: &[Row]) -> Result<(), CliError> {
    let io = |e: csv::Error| CliError::internal(format!("writing CSV failed: {e}"));
    let mut w = csv::Writer::from_writer(out);
    let mut header: Vec<String> = ranges.iter().map(|r| r.name.clone()).collect();
    if with_state {
        header.extend(["x1", "x2", "x3"].map(String::from));
    }
    header.extend(["w0", "psd_lo", "psd_hi", "flat", "concurrence", "status", "error"].map(String::from));
    w.write_record(&header).map_err(io)?;

    let num = |x: Option<f64>| x.map(format_f64).unwrap_or_default();
    for row in rows {
        let mut record: Vec<String> = row.params.iter().map(|&p| format_f64(p)).collect();
        if with_state {
            match row.state {
                Some(s) => record.extend(s.map(format_f64)),
                None => record.extend([String::new(), String::new(), String::new()]),
            }
        }
        record.push(num(row.w0));
        record.push(num(row.psd_interval.map(|p| p[0])));
        record.push(num(row.psd_interval.map(|p| p[1])));
        record.push(row.flat.map(|f| f.to_string()).unwrap_or_default());
        record.push(num(row.concurrence));
        record.push(row.status.code().to_string());
        record.push(row.error.clone());
        w.write_record(&record).map_err(io)?;
    }
    w.flush().map_err(|e| CliError::internal(format!("writing CSV failed: {e}")))?;
    Ok(())
}
