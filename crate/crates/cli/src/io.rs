//! File formats and report schemas: the integral text format, JSON plan
//! files, the run report, and the sweep CSV.
//!
//! Integral files are line oriented. The header names the orbital count
//! and optionally the electron count and occupation vector; the body
//! holds `value p q r s` entries with 1-based indices:
//!
//! ```text
//! # comments and blank lines are ignored
//! norb 4
//! nelec 2
//! occ 1 1 0 0
//! -1.0   1 1 0 0      # one-body entry t_11
//! 0.35   1 2 2 1      # two-body entry V_1221
//! 0.7    0 0 0 0      # scalar core energy
//! ```
//!
//! One-body entries may name either triangle; the missing transpose is
//! completed. Duplicate lines for the same ordered entry sum. The form
//! `(i, 0, 0, 0)` is reserved and rejected.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};
use trotterc_core::circuit::Circuit;
use trotterc_core::hamiltonian::SpinOrbitalIntegrals;
use trotterc_core::optimizer::{PassKind, PassReport};
use trotterc_core::synth::{QubitOrder, SubtermOrder, SynthStyle};
use trotterc_core::trotter::{CompiledStep, OrderStrategy, TrotterPlan, TsOrder};

use crate::sim::{ScalingFit, ScalingPoint, SpectralResult};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, thiserror::Error)]
#[error("line {line}: {message}")]
pub struct IntegralParseError {
    pub line: usize,
    pub message: String,
}

fn err(line: usize, message: impl Into<String>) -> IntegralParseError {
    IntegralParseError {
        line,
        message: message.into(),
    }
}

/// Parses the integral text format into validated integrals.
pub fn parse_integrals(text: &str) -> Result<SpinOrbitalIntegrals, IntegralParseError> {
    let mut norb: Option<(usize, usize)> = None; // (value, line)
    let mut nelec: Option<usize> = None;
    let mut occ: Option<(Vec<u8>, usize)> = None;
    let mut t_raw: BTreeMap<(usize, usize), f64> = BTreeMap::new();
    let mut ints: Option<SpinOrbitalIntegrals> = None;

    for (idx, raw) in text.lines().enumerate() {
        let lineno = idx + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        match fields[0] {
            "norb" => {
                if norb.is_some() {
                    return Err(err(lineno, "duplicate norb header"));
                }
                let n: usize = fields
                    .get(1)
                    .and_then(|s| s.parse().ok())
                    .filter(|&n| n > 0)
                    .ok_or_else(|| err(lineno, "norb needs a positive integer"))?;
                if fields.len() != 2 {
                    return Err(err(lineno, "norb takes exactly one value"));
                }
                norb = Some((n, lineno));
                ints = Some(SpinOrbitalIntegrals::new(n));
            }
            "nelec" => {
                let n: usize = fields
                    .get(1)
                    .and_then(|s| s.parse().ok())
                    .ok_or_else(|| err(lineno, "nelec needs an integer"))?;
                nelec = Some(n);
            }
            "occ" => {
                let values: Result<Vec<u8>, _> = fields[1..]
                    .iter()
                    .map(|s| s.parse::<u8>().map_err(|_| err(lineno, "occ entries must be 0 or 1")))
                    .collect();
                occ = Some((values?, lineno));
            }
            _ => {
                let ints = ints
                    .as_mut()
                    .ok_or_else(|| err(lineno, "entry before the norb header"))?;
                if fields.len() != 5 {
                    return Err(err(lineno, "entries are `value p q r s`"));
                }
                let value: f64 = fields[0]
                    .parse()
                    .map_err(|_| err(lineno, format!("bad value `{}`", fields[0])))?;
                let idxs: Vec<usize> = fields[1..]
                    .iter()
                    .map(|s| {
                        s.parse::<usize>()
                            .map_err(|_| err(lineno, format!("bad index `{s}`")))
                    })
                    .collect::<Result<_, _>>()?;
                let n = ints.n_orbitals();
                for &i in &idxs {
                    if i > n {
                        return Err(err(
                            lineno,
                            format!("index {i} exceeds norb {n} in entry ({value} {idxs:?})"),
                        ));
                    }
                }
                match (idxs[0], idxs[1], idxs[2], idxs[3]) {
                    (0, 0, 0, 0) => {
                        ints.set_core_energy(ints.core_energy() + value);
                    }
                    (i, j, 0, 0) if i > 0 && j > 0 => {
                        *t_raw.entry((i - 1, j - 1)).or_default() += value;
                    }
                    (i, 0, 0, 0) if i > 0 => {
                        return Err(err(lineno, "the (i, 0, 0, 0) entry form is reserved"));
                    }
                    (p, q, r, s) if p > 0 && q > 0 && r > 0 && s > 0 => {
                        ints.add_v([p - 1, q - 1, r - 1, s - 1], value)
                            .map_err(|e| err(lineno, e.to_string()))?;
                    }
                    _ => {
                        return Err(err(lineno, "zero indices are only valid as trailing padding"));
                    }
                }
            }
        }
    }

    let (n, _) = norb.ok_or_else(|| err(0, "missing norb header"))?;
    let mut ints = ints.expect("norb implies integrals");

    // One-body symmetry completion: a single triangle may be given; if
    // both are, they must agree.
    for (&(p, q), &value) in &t_raw {
        if p > q {
            continue;
        }
        let transpose = t_raw.get(&(q, p)).copied();
        let resolved = match transpose {
            Some(other) if p != q => {
                if (other - value).abs() > 1e-12 * value.abs().max(1.0) {
                    return Err(err(
                        0,
                        format!(
                            "asymmetric one-body entries for ({}, {}): {} vs {}",
                            p + 1,
                            q + 1,
                            value,
                            other
                        ),
                    ));
                }
                value
            }
            _ => value,
        };
        ints.set_t(p, q, resolved).map_err(|e| err(0, e.to_string()))?;
    }
    for (&(p, q), &value) in &t_raw {
        if p > q && !t_raw.contains_key(&(q, p)) {
            ints.set_t(q, p, value).map_err(|e| err(0, e.to_string()))?;
        }
    }

    if let Some((values, lineno)) = occ {
        if values.len() != n {
            return Err(err(lineno, format!("occ needs {n} entries, got {}", values.len())));
        }
        ints.set_occupation(values.clone())
            .map_err(|e| err(lineno, e.to_string()))?;
        if let Some(e) = nelec {
            let total: usize = values.iter().map(|&v| v as usize).sum();
            if total != e {
                return Err(err(lineno, format!("occ sums to {total} but nelec is {e}")));
            }
        }
    }
    Ok(ints)
}

/// Serializes integrals back to the text format; `parse_integrals` of
/// the output reproduces the input exactly.
pub fn serialize_integrals(ints: &SpinOrbitalIntegrals) -> String {
    let n = ints.n_orbitals();
    let mut out = format!("norb {n}\n");
    if let Some(occ) = ints.occupation() {
        let total: usize = occ.iter().map(|&v| v as usize).sum();
        let _ = writeln!(out, "nelec {total}");
        out.push_str("occ");
        for v in occ {
            let _ = write!(out, " {v}");
        }
        out.push('\n');
    }
    if ints.core_energy() != 0.0 {
        let _ = writeln!(out, "{} 0 0 0 0", ints.core_energy());
    }
    for p in 0..n {
        for q in p..n {
            let value = ints.t(p, q);
            if value != 0.0 {
                let _ = writeln!(out, "{} {} {} 0 0", value, p + 1, q + 1);
            }
        }
    }
    for ([p, q, r, s], value) in ints.v_entries() {
        let _ = writeln!(out, "{} {} {} {} {}", value, p + 1, q + 1, r + 1, s + 1);
    }
    out
}

// ---------------------------------------------------------------------
// CLI-facing option names, shared by flags and plan files.
// ---------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, clap::ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StyleArg {
    Standard,
    #[default]
    Cz,
    Ancilla,
}

impl From<StyleArg> for SynthStyle {
    fn from(a: StyleArg) -> Self {
        match a {
            StyleArg::Standard => SynthStyle::Standard,
            StyleArg::Cz => SynthStyle::StringCz,
            StyleArg::Ancilla => SynthStyle::Ancilla,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, clap::ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OrderArg {
    #[default]
    Lex,
    Magnitude,
    Interleaved,
}

impl From<OrderArg> for OrderStrategy {
    fn from(a: OrderArg) -> Self {
        match a {
            OrderArg::Lex => OrderStrategy::Lexicographic,
            OrderArg::Magnitude => OrderStrategy::Magnitude,
            OrderArg::Interleaved => OrderStrategy::Interleaved,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, clap::ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum QubitOrderArg {
    #[default]
    Interleaved,
    Halfup,
}

impl From<QubitOrderArg> for QubitOrder {
    fn from(a: QubitOrderArg) -> Self {
        match a {
            QubitOrderArg::Interleaved => QubitOrder::Interleaved,
            QubitOrderArg::Halfup => QubitOrder::HalfUp,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, clap::ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SubtermOrderArg {
    #[default]
    Baseline,
    Optimized,
}

impl From<SubtermOrderArg> for SubtermOrder {
    fn from(a: SubtermOrderArg) -> Self {
        match a {
            SubtermOrderArg::Baseline => SubtermOrder::Baseline,
            SubtermOrderArg::Optimized => SubtermOrder::Optimized,
        }
    }
}

fn arg_name<T: clap::ValueEnum>(v: T) -> String {
    v.to_possible_value().expect("no skipped variants").get_name().to_string()
}

// ---------------------------------------------------------------------
// Plan files
// ---------------------------------------------------------------------

/// A simulation plan: either step compilation + eigenphase readout over
/// a set of Trotter numbers, or the built-in single-qubit
/// scaling counterexample.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PlanFile {
    Spectral(SpectralPlan),
    CounterexampleScaling(CounterexamplePlan),
}

fn default_time() -> f64 {
    1.0
}

fn default_ts() -> u8 {
    1
}

fn default_true() -> bool {
    true
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SpectralPlan {
    /// Trotter numbers to evaluate.
    pub n_values: Vec<usize>,
    #[serde(default)]
    pub style: StyleArg,
    #[serde(default)]
    pub order: OrderArg,
    #[serde(default)]
    pub qubit_order: QubitOrderArg,
    #[serde(default)]
    pub subterm_order: SubtermOrderArg,
    /// 1 = first order, 2 = second order.
    #[serde(default = "default_ts")]
    pub ts_order: u8,
    #[serde(default)]
    pub diagonal_fix: bool,
    #[serde(default)]
    pub nest: bool,
    #[serde(default = "default_true")]
    pub cancel: bool,
    #[serde(default = "default_time")]
    pub total_time: f64,
    #[serde(default)]
    pub energy_shift: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CounterexamplePlan {
    pub n_values: Vec<usize>,
    #[serde(default = "default_time")]
    pub total_time: f64,
}

impl SpectralPlan {
    pub fn trotter_plan(&self, n_steps: usize) -> Result<TrotterPlan, String> {
        let ts_order = match self.ts_order {
            1 => TsOrder::First,
            2 => TsOrder::Second,
            other => return Err(format!("ts_order must be 1 or 2, got {other}")),
        };
        Ok(TrotterPlan {
            order_strategy: self.order.into(),
            ts_order,
            n_steps,
            total_time: self.total_time,
            style: self.style.into(),
            qubit_order: self.qubit_order.into(),
            subterm_order: self.subterm_order.into(),
            diagonal_fix: self.diagonal_fix,
            nest: self.nest,
            cancel: self.cancel,
            energy_shift: self.energy_shift,
            ..TrotterPlan::default()
        })
    }
}

/// Output of `simulate` with a spectral plan.
#[derive(Debug, Serialize, Deserialize)]
pub struct SimulateOutput {
    pub schema_version: u32,
    pub results: Vec<SpectralRow>,
    /// Log-log fit over the (n, error) series when 3+ points exist.
    pub fit: Option<ScalingFit>,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct SpectralRow {
    pub n: usize,
    #[serde(flatten)]
    pub result: SpectralResult,
}

/// Output of `simulate` with the counterexample plan.
#[derive(Debug, Serialize, Deserialize)]
pub struct CounterexampleOutput {
    pub schema_version: u32,
    pub points: Vec<ScalingPoint>,
    pub fit: ScalingFit,
}

// ---------------------------------------------------------------------
// Run report
// ---------------------------------------------------------------------

/// Everything `compile` reports about an emitted circuit.
#[derive(Debug, Serialize)]
pub struct RunReport {
    pub schema_version: u32,
    /// Wall-clock stamp; excluded from golden comparisons.
    pub generated_unix_ms: u128,
    pub config: ConfigEcho,
    pub qubits: QubitsEcho,
    pub gate_counts: GateCountsEcho,
    pub depth: DepthEcho,
    pub passes: Option<PassEcho>,
    pub nesting: Option<NestingEcho>,
    pub spectral: Option<Vec<SpectralResult>>,
}

#[derive(Debug, Serialize)]
pub struct ConfigEcho {
    pub input: String,
    pub style: String,
    pub order: String,
    pub qubit_order: String,
    pub subterm_order: String,
    pub ts_order: u8,
    pub delta_t: f64,
    pub nest: bool,
    pub cancel: bool,
    pub diagonal_fix: bool,
    pub prune_threshold: f64,
    pub energy_shift: f64,
}

#[derive(Debug, Serialize)]
pub struct QubitsEcho {
    pub system: usize,
    pub parity: usize,
    pub phase: bool,
}

#[derive(Debug, Serialize)]
pub struct GateCountsEcho {
    pub by_kind: BTreeMap<String, usize>,
    pub total: usize,
}

#[derive(Debug, Serialize)]
pub struct DepthEcho {
    pub fanout_on: usize,
    pub fanout_off: usize,
}

#[derive(Debug, Serialize)]
pub struct PassEcho {
    pub gates_before: usize,
    pub gates_after: usize,
    pub depth_before: usize,
    pub depth_after: usize,
    pub cancellations: BTreeMap<String, usize>,
    pub converged: bool,
}

impl From<&PassReport> for PassEcho {
    fn from(r: &PassReport) -> Self {
        Self {
            gates_before: r.gates_before,
            gates_after: r.gates_after,
            depth_before: r.depth_before,
            depth_after: r.depth_after,
            cancellations: r
                .cancellations
                .iter()
                .map(|(k, &v)| (pass_name(*k).to_string(), v))
                .collect(),
            converged: r.converged,
        }
    }
}

fn pass_name(kind: PassKind) -> &'static str {
    kind.name()
}

#[derive(Debug, Serialize)]
pub struct NestingEcho {
    pub layers: usize,
    pub widest_layer: usize,
    pub kept: bool,
}

/// Assembles the report for a compiled step.
pub fn run_report(
    input: &str,
    step: &CompiledStep,
    plan: &TrotterPlan,
    style: StyleArg,
    order: OrderArg,
    qubit_order: QubitOrderArg,
    subterm_order: SubtermOrderArg,
) -> RunReport {
    let counts = step.circuit.gate_counts();
    RunReport {
        schema_version: SCHEMA_VERSION,
        generated_unix_ms: std::time::SystemTime::now()
            .duration_since(std::time::UNIX_EPOCH)
            .map(|d| d.as_millis())
            .unwrap_or(0),
        config: ConfigEcho {
            input: input.to_string(),
            style: arg_name(style),
            order: arg_name(order),
            qubit_order: arg_name(qubit_order),
            subterm_order: arg_name(subterm_order),
            ts_order: match step.ts_order {
                TsOrder::First => 1,
                TsOrder::Second => 2,
            },
            delta_t: step.delta_t,
            nest: plan.nest,
            cancel: plan.cancel,
            diagonal_fix: plan.diagonal_fix,
            prune_threshold: plan.prune_threshold,
            energy_shift: plan.energy_shift,
        },
        qubits: QubitsEcho {
            system: step.circuit.n_system(),
            parity: step.circuit.n_parity(),
            phase: step.circuit.has_phase(),
        },
        gate_counts: GateCountsEcho {
            total: counts.total(),
            by_kind: counts
                .by_kind
                .iter()
                .map(|(k, &v)| (k.name().to_string(), v))
                .collect(),
        },
        depth: DepthEcho {
            fanout_on: step.circuit.parallel_depth(true),
            fanout_off: step.circuit.parallel_depth(false),
        },
        passes: step.pass_report.as_ref().map(PassEcho::from),
        nesting: step.layers.as_ref().map(|layers| NestingEcho {
            layers: layers.len(),
            widest_layer: layers.iter().map(Vec::len).max().unwrap_or(0),
            kept: step.nested_kept,
        }),
        spectral: None,
    }
}

/// Counts/depth-only report for `report --in CIRCUIT`.
#[derive(Debug, Serialize)]
pub struct CircuitReport {
    pub schema_version: u32,
    pub qubits: QubitsEcho,
    pub gate_counts: GateCountsEcho,
    pub depth: DepthEcho,
}

pub fn circuit_report(circuit: &Circuit) -> CircuitReport {
    let counts = circuit.gate_counts();
    CircuitReport {
        schema_version: SCHEMA_VERSION,
        qubits: QubitsEcho {
            system: circuit.n_system(),
            parity: circuit.n_parity(),
            phase: circuit.has_phase(),
        },
        gate_counts: GateCountsEcho {
            total: counts.total(),
            by_kind: counts
                .by_kind
                .iter()
                .map(|(k, &v)| (k.name().to_string(), v))
                .collect(),
        },
        depth: DepthEcho {
            fanout_on: circuit.parallel_depth(true),
            fanout_off: circuit.parallel_depth(false),
        },
    }
}

// ---------------------------------------------------------------------
// Sweep CSV
// ---------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub n: usize,
    pub ordering: String,
    pub fix: bool,
    pub style: String,
    pub error_hartree: f64,
}

pub const SWEEP_CSV_HEADER: &str = "n,ordering,fix,style,error_hartree";

/// Fixed-column CSV; rows print in the order given.
pub fn sweep_csv(rows: &[SweepRow]) -> String {
    let mut out = String::from(SWEEP_CSV_HEADER);
    out.push('\n');
    for row in rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{:e}",
            row.n,
            row.ordering,
            if row.fix { "on" } else { "off" },
            row.style,
            row.error_hartree
        );
    }
    out
}

/// Writes through a sibling temp file and renames, so failures never
/// leave a partial file behind.
pub fn write_atomic(path: &Path, contents: &str) -> std::io::Result<()> {
    let tmp = path.with_extension("tmp~");
    std::fs::write(&tmp, contents)?;
    std::fs::rename(&tmp, path)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_basic_entries() {
        let ints = parse_integrals("norb 2\n0.5 1 1 0 0\n").unwrap();
        assert_eq!(ints.t(0, 0), 0.5);

        let ints = parse_integrals("norb 2\n-0.25 1 2 2 1\n").unwrap();
        assert_eq!(ints.v([0, 1, 1, 0]), -0.25);
    }

    #[test]
    fn parse_completes_one_body_symmetry() {
        let ints = parse_integrals("norb 2\n0.3 1 2 0 0\n").unwrap();
        assert_eq!(ints.t(0, 1), 0.3);
        assert_eq!(ints.t(1, 0), 0.3);
        // Lower triangle alone works too.
        let ints = parse_integrals("norb 2\n0.3 2 1 0 0\n").unwrap();
        assert_eq!(ints.t(0, 1), 0.3);
    }

    #[test]
    fn parse_rejects_asymmetric_one_body() {
        let e = parse_integrals("norb 2\n0.3 1 2 0 0\n0.4 2 1 0 0\n").unwrap_err();
        assert!(e.message.contains("asymmetric"));
    }

    #[test]
    fn parse_sums_duplicates() {
        let text = "norb 2\n0.5 1 1 0 0\n0.25 1 1 0 0\n0.1 1 2 2 1\n0.2 1 2 2 1\n";
        let ints = parse_integrals(text).unwrap();
        assert_eq!(ints.t(0, 0), 0.75);
        assert!((ints.v([0, 1, 1, 0]) - 0.30000000000000004).abs() < 1e-18);
    }

    #[test]
    fn parse_errors_carry_line_numbers() {
        let e = parse_integrals("norb 2\nbogus line here\n").unwrap_err();
        assert_eq!(e.line, 2);
        let e = parse_integrals("norb 2\n0.5 1 3 0 0\n").unwrap_err();
        assert_eq!(e.line, 2);
        assert!(e.message.contains("exceeds norb"));
        let e = parse_integrals("0.5 1 1 0 0\n").unwrap_err();
        assert_eq!(e.line, 1);
        let e = parse_integrals("norb 2\n0.5 1 0 0 0\n").unwrap_err();
        assert!(e.message.contains("reserved"));
    }

    #[test]
    fn parse_header_extras() {
        let text = "norb 2\nnelec 1\nocc 1 0\n0.5 1 1 0 0\n1.25 0 0 0 0\n";
        let ints = parse_integrals(text).unwrap();
        assert_eq!(ints.occupation().unwrap(), &[1, 0]);
        assert_eq!(ints.core_energy(), 1.25);

        let e = parse_integrals("norb 2\nnelec 2\nocc 1 0\n").unwrap_err();
        assert!(e.message.contains("nelec"));
        let e = parse_integrals("norb 2\nocc 1 0 1\n").unwrap_err();
        assert!(e.message.contains("2 entries"));
    }

    #[test]
    fn integrals_round_trip() {
        let mut ints = SpinOrbitalIntegrals::new(3);
        ints.set_t(0, 0, -1.5).unwrap();
        ints.set_t(0, 2, 0.123456789012345).unwrap();
        ints.set_v([0, 1, 1, 0], 0.7).unwrap();
        ints.set_v([2, 1, 0, 1], -0.03).unwrap();
        ints.set_occupation(vec![1, 0, 1]).unwrap();
        ints.set_core_energy(0.25);
        let text = serialize_integrals(&ints);
        let parsed = parse_integrals(&text).unwrap();
        assert_eq!(parsed, ints);
    }

    #[test]
    fn plan_file_round_trip() {
        let json = r#"{
            "kind": "spectral",
            "n_values": [2, 4, 8],
            "order": "interleaved",
            "ts_order": 2,
            "diagonal_fix": true
        }"#;
        let plan: PlanFile = serde_json::from_str(json).unwrap();
        match &plan {
            PlanFile::Spectral(p) => {
                assert_eq!(p.n_values, vec![2, 4, 8]);
                assert_eq!(p.order, OrderArg::Interleaved);
                assert!(p.cancel); // default on
                let tp = p.trotter_plan(4).unwrap();
                assert_eq!(tp.ts_order, TsOrder::Second);
                assert!((tp.delta_t() - 0.25).abs() < 1e-15);
            }
            other => panic!("wrong plan {other:?}"),
        }
        let json = r#"{"kind": "counterexample_scaling", "n_values": [4, 8]}"#;
        let plan: PlanFile = serde_json::from_str(json).unwrap();
        assert!(matches!(plan, PlanFile::CounterexampleScaling(_)));
    }

    #[test]
    fn sweep_csv_format() {
        let rows = vec![SweepRow {
            n: 8,
            ordering: "lex".into(),
            fix: false,
            style: "cz".into(),
            error_hartree: 0.00125,
        }];
        let csv = sweep_csv(&rows);
        let mut lines = csv.lines();
        assert_eq!(lines.next().unwrap(), "n,ordering,fix,style,error_hartree");
        assert_eq!(lines.next().unwrap(), "8,lex,off,cz,1.25e-3");
    }

    #[test]
    fn atomic_write_leaves_no_temp() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("out.txt");
        write_atomic(&path, "hello\n").unwrap();
        assert_eq!(std::fs::read_to_string(&path).unwrap(), "hello\n");
        let leftovers: Vec<_> = std::fs::read_dir(dir.path())
            .unwrap()
            .map(|e| e.unwrap().file_name())
            .collect();
        assert_eq!(leftovers.len(), 1);
    }
}
