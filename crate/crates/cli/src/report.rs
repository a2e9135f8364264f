//! Run reports and their JSON encoding.
//!
//! Every float is written with 17 significant digits (`{:.16e}`), enough for
//! an exact round trip; field order follows the struct declarations.

use std::io;

use serde::Serialize;
use serde_json::ser::{Formatter, PrettyFormatter};

use qubit_roof::bipartite::EofBound;
use qubit_roof::oracle::{OracleConfig, SufficiencyReport};
use qubit_roof::roof::SolveMethod;
use qubit_roof::{AffineMap, CausalClass, Decomposition, FourVector, RoofSolution, Tolerances};

pub const TOOL_NAME: &str = "qubit-roof";
pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

/// Pretty JSON with floats in full-precision scientific notation.
pub struct ExactFormatter<'a> {
    pretty: PrettyFormatter<'a>,
}

impl Default for ExactFormatter<'_> {
    fn default() -> Self {
        Self {
            pretty: PrettyFormatter::with_indent(b"  "),
        }
    }
}

pub fn format_f64(value: f64) -> String {
    format!("{value:.16e}")
}

impl Formatter for ExactFormatter<'_> {
    fn write_f64<W: ?Sized + io::Write>(&mut self, writer: &mut W, value: f64) -> io::Result<()> {
        writer.write_all(format_f64(value).as_bytes())
    }

    fn begin_array<W: ?Sized + io::Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.pretty.begin_array(writer)
    }

    fn end_array<W: ?Sized + io::Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.pretty.end_array(writer)
    }

    fn begin_array_value<W: ?Sized + io::Write>(&mut self, writer: &mut W, first: bool) -> io::Result<()> {
        self.pretty.begin_array_value(writer, first)
    }

    fn end_array_value<W: ?Sized + io::Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.pretty.end_array_value(writer)
    }

    fn begin_object<W: ?Sized + io::Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.pretty.begin_object(writer)
    }

    fn end_object<W: ?Sized + io::Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.pretty.end_object(writer)
    }

    fn begin_object_key<W: ?Sized + io::Write>(&mut self, writer: &mut W, first: bool) -> io::Result<()> {
        self.pretty.begin_object_key(writer, first)
    }

    fn begin_object_value<W: ?Sized + io::Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.pretty.begin_object_value(writer)
    }

    fn end_object_value<W: ?Sized + io::Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.pretty.end_object_value(writer)
    }
}

pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut out = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut out, ExactFormatter::default());
    value.serialize(&mut ser).expect("reports serialize to memory");
    out.push(b'\n');
    String::from_utf8(out).expect("JSON is UTF-8")
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Tool {
    pub name: &'static str,
    pub version: &'static str,
}

impl Default for Tool {
    fn default() -> Self {
        Self {
            name: TOOL_NAME,
            version: TOOL_VERSION,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ChannelEcho {
    pub lambda: [[f64; 3]; 3],
    pub t: [f64; 3],
}

impl From<&AffineMap> for ChannelEcho {
    fn from(m: &AffineMap) -> Self {
        let mut lambda = [[0.0; 3]; 3];
        for (i, row) in lambda.iter_mut().enumerate() {
            for (j, x) in row.iter_mut().enumerate() {
                *x = m.lambda[(i, j)];
            }
        }
        Self {
            lambda,
            t: m.t.into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ChannelChecks {
    pub positive: bool,
    pub completely_positive: bool,
    pub max_image_norm: f64,
    pub choi_min_eigenvalue: f64,
}

impl ChannelChecks {
    pub fn of(m: &AffineMap) -> Self {
        Self {
            positive: m.is_positive(),
            completely_positive: m.is_completely_positive(),
            max_image_norm: m.max_image_norm(),
            choi_min_eigenvalue: m.choi_matrix().min_eigenvalue(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RoofReport {
    pub w0: f64,
    pub psd_interval: [f64; 2],
    pub flat: bool,
    pub full_kernel: bool,
    pub kernel_vector: [f64; 4],
    pub kernel_class: CausalClass,
    pub kernel_dimension: usize,
    pub method: SolveMethod,
    pub degenerate_window: bool,
}

impl From<&RoofSolution> for RoofReport {
    fn from(r: &RoofSolution) -> Self {
        Self {
            w0: r.w0,
            psd_interval: [r.psd_interval.0, r.psd_interval.1],
            flat: r.flat,
            full_kernel: r.is_full_kernel(),
            kernel_vector: r.n.to_array(),
            kernel_class: r.n_class,
            kernel_dimension: r.kernel_basis.len(),
            method: r.method,
            degenerate_window: r.degenerate_window,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComponentReport {
    pub weight: f64,
    pub bloch: [f64; 3],
    pub concurrence: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DecompositionReport {
    pub components: Vec<ComponentReport>,
    pub degenerate_leaf: bool,
    pub average_concurrence: f64,
}

impl DecompositionReport {
    pub fn new(d: &Decomposition, pure_value: impl Fn(&FourVector) -> f64) -> Self {
        Self {
            components: d
                .components
                .iter()
                .map(|c| ComponentReport {
                    weight: c.weight,
                    bloch: c.pure.x.into(),
                    concurrence: pure_value(&c.pure),
                })
                .collect(),
            degenerate_leaf: d.degenerate_leaf,
            average_concurrence: d.average(&pure_value),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OracleReport {
    pub config: OracleConfig,
    pub value: f64,
    /// Oracle minus roof; non-negative up to round-off.
    pub gap: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sufficiency: Option<SufficiencyReport>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReductionReport {
    pub dims: [usize; 2],
    pub rank: usize,
    pub eigenvalues: Vec<f64>,
    /// Support basis, each ket as `[re, im]` pairs.
    pub basis: [Vec<[f64; 2]>; 2],
    /// `blocks[i][j] = Tr_B |vᵢ⟩⟨vⱼ|` as 2×2 arrays of `[re, im]`.
    pub blocks: [[[[[f64; 2]; 2]; 2]; 2]; 2],
    pub induced: ChannelEcho,
    pub coefficient_state: [f64; 3],
    pub completely_positive: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunReport {
    pub tool: Tool,
    pub command: &'static str,
    pub tolerances: Tolerances,
    pub channel: ChannelEcho,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub checks: Option<ChannelChecks>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reduction: Option<ReductionReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub roof: Option<RoofReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub state: Option<[f64; 3]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub concurrence: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub eof_bound: Option<EofBound>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub decomposition: Option<DecompositionReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub oracle: Option<OracleReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timing_ms: Option<f64>,
}

impl RunReport {
    pub fn new(command: &'static str, tolerances: Tolerances, channel: &AffineMap) -> Self {
        Self {
            tool: Tool::default(),
            command,
            tolerances,
            channel: channel.into(),
            checks: None,
            reduction: None,
            roof: None,
            state: None,
            concurrence: None,
            eof_bound: None,
            decomposition: None,
            oracle: None,
            timing_ms: None,
        }
    }

    pub fn to_json(&self) -> String {
        to_json(self)
    }
}
