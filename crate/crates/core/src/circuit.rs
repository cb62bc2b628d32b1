//! The gate IR: typed gates over system qubits plus ancillas, gate
//! counting, the parallel-depth metric, and the line-oriented text
//! format.
//!
//! Qubit numbering is flat: system qubits `0..n_system`, then the parity
//! ancilla pool, then (last) the phase-estimation ancilla that controls
//! every rotation.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

/// A primitive gate. `Crz` applies `diag(e^{-i a/2}, e^{+i a/2})` to the
/// target when the control is set; `Phase` applies `diag(1, e^{i a})`;
/// `Cz` executes Z on the target when the control is set. `H` and the Y
/// pair are the X- and Y-basis changes (`H Z H = X`, `Y Z Y+ = Y`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Gate {
    Cnot { control: usize, target: usize },
    Had { q: usize },
    YBasis { q: usize },
    YBasisDag { q: usize },
    Cz { control: usize, target: usize },
    Crz { control: usize, target: usize, angle: f64 },
    Phase { q: usize, angle: f64 },
}

impl Gate {
    pub fn kind(&self) -> GateKind {
        match self {
            Self::Cnot { .. } => GateKind::Cnot,
            Self::Had { .. } => GateKind::Had,
            Self::YBasis { .. } => GateKind::YBasis,
            Self::YBasisDag { .. } => GateKind::YBasisDag,
            Self::Cz { .. } => GateKind::Cz,
            Self::Crz { .. } => GateKind::Crz,
            Self::Phase { .. } => GateKind::Phase,
        }
    }

    /// The qubits this gate touches (control first for two-qubit kinds).
    pub fn qubits(&self) -> QubitPair {
        match *self {
            Self::Cnot { control, target }
            | Self::Cz { control, target }
            | Self::Crz { control, target, .. } => QubitPair(control, Some(target)),
            Self::Had { q } | Self::YBasis { q } | Self::YBasisDag { q } | Self::Phase { q, .. } => {
                QubitPair(q, None)
            }
        }
    }

    pub fn touches(&self, q: usize) -> bool {
        let QubitPair(a, b) = self.qubits();
        a == q || b == Some(q)
    }
}

/// One or two qubit indices.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct QubitPair(pub usize, pub Option<usize>);

impl QubitPair {
    pub fn iter(self) -> impl Iterator<Item = usize> {
        core::iter::once(self.0).chain(self.1)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum GateKind {
    Cnot,
    Had,
    YBasis,
    YBasisDag,
    Cz,
    Crz,
    Phase,
}

impl GateKind {
    pub const ALL: [GateKind; 7] = [
        GateKind::Cnot,
        GateKind::Had,
        GateKind::YBasis,
        GateKind::YBasisDag,
        GateKind::Cz,
        GateKind::Crz,
        GateKind::Phase,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Self::Cnot => "CNOT",
            Self::Had => "HAD",
            Self::YBasis => "YBASIS",
            Self::YBasisDag => "YBASIS_DAG",
            Self::Cz => "CZ",
            Self::Crz => "CRZ",
            Self::Phase => "PHASE",
        }
    }
}

impl fmt::Display for GateKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Where a gate came from, for cancellation audits. `term` counts
/// scheduled terms in emission order; `subterm` indexes the subterm
/// within its term where applicable.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GateTag {
    pub term: u32,
    pub subterm: Option<u16>,
    pub role: GateRole,
}

/// Structural role of a tagged gate within its term block.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GateRole {
    /// String parity compute, before the subterms.
    StringOpen,
    /// String parity uncompute, after the subterms.
    StringClose,
    /// The controlled-Z pair folding the string parity into a subterm
    /// target.
    StringCz,
    /// Basis changes, operator-qubit ladders and rotations of one
    /// subterm.
    Subterm,
    /// Identity-component phase bookkeeping on the phase ancilla.
    PhaseShift,
}

/// An ordered gate list over `n_system` system qubits, `n_parity`
/// parity ancillas and an optional phase ancilla (always the last
/// index).
#[derive(Debug, Clone, PartialEq)]
pub struct Circuit {
    gates: Vec<Gate>,
    tags: Vec<Option<GateTag>>,
    n_system: usize,
    n_parity: usize,
    has_phase: bool,
}

impl Circuit {
    pub fn new(n_system: usize, n_parity: usize, has_phase: bool) -> Self {
        Self {
            gates: Vec::new(),
            tags: Vec::new(),
            n_system,
            n_parity,
            has_phase,
        }
    }

    pub fn n_system(&self) -> usize {
        self.n_system
    }

    pub fn n_parity(&self) -> usize {
        self.n_parity
    }

    pub fn has_phase(&self) -> bool {
        self.has_phase
    }

    /// Total qubit count including ancillas.
    pub fn n_qubits(&self) -> usize {
        self.n_system + self.n_parity + usize::from(self.has_phase)
    }

    pub fn parity_qubit(&self, slot: usize) -> usize {
        debug_assert!(slot < self.n_parity);
        self.n_system + slot
    }

    pub fn phase_qubit(&self) -> Option<usize> {
        self.has_phase.then(|| self.n_system + self.n_parity)
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn tags(&self) -> &[Option<GateTag>] {
        &self.tags
    }

    pub fn len(&self) -> usize {
        self.gates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gates.is_empty()
    }

    pub fn push(&mut self, gate: Gate) {
        self.push_tagged(gate, None);
    }

    pub fn push_tagged(&mut self, gate: Gate, tag: Option<GateTag>) {
        debug_assert!(self.gate_in_range(&gate));
        self.gates.push(gate);
        self.tags.push(tag);
    }

    /// Appends another circuit over the same registry.
    pub fn extend(&mut self, other: &Circuit) {
        debug_assert_eq!(self.n_qubits(), other.n_qubits());
        self.gates.extend_from_slice(&other.gates);
        self.tags.extend_from_slice(&other.tags);
    }

    /// Same registry, new gate list (used by the optimizer passes).
    pub fn with_gates(&self, gates: Vec<Gate>, tags: Vec<Option<GateTag>>) -> Self {
        debug_assert_eq!(gates.len(), tags.len());
        Self {
            gates,
            tags,
            n_system: self.n_system,
            n_parity: self.n_parity,
            has_phase: self.has_phase,
        }
    }

    fn gate_in_range(&self, gate: &Gate) -> bool {
        let n = self.n_qubits();
        let QubitPair(a, b) = gate.qubits();
        a < n && b.map_or(true, |t| t < n && t != a)
    }

    pub fn validate(&self) -> Result<(), CircuitError> {
        for (i, gate) in self.gates.iter().enumerate() {
            let QubitPair(a, b) = gate.qubits();
            if b == Some(a) {
                return Err(CircuitError::ControlEqualsTarget { position: i });
            }
            let n = self.n_qubits();
            if a >= n || b.map_or(false, |t| t >= n) {
                return Err(CircuitError::QubitOutOfRange { position: i, n });
            }
        }
        Ok(())
    }

    /// Exact counts by gate kind.
    pub fn gate_counts(&self) -> GateCounts {
        let mut by_kind = BTreeMap::new();
        for g in &self.gates {
            *by_kind.entry(g.kind()).or_insert(0usize) += 1;
        }
        GateCounts { by_kind }
    }

    /// Greedy ASAP layering depth. A gate enters the earliest layer in
    /// which all of its qubits are free. With `phase_fanout_rule` set,
    /// rotations controlled by the phase ancilla conflict only through
    /// their targets, matching the accounting in which the phase state
    /// is fanned out onto scratch ancillas.
    pub fn parallel_depth(&self, phase_fanout_rule: bool) -> usize {
        self.layering(phase_fanout_rule)
            .into_iter()
            .max()
            .map_or(0, |l| l + 1)
    }

    /// Layer index assigned to each gate by the ASAP schedule.
    pub fn layering(&self, phase_fanout_rule: bool) -> Vec<usize> {
        let n = self.n_qubits();
        let phase = self.phase_qubit();
        let mut frontier = alloc::vec![0usize; n]; // next free layer per qubit
        let mut layers = Vec::with_capacity(self.gates.len());
        for gate in &self.gates {
            let fanned = phase_fanout_rule
                && matches!(gate, Gate::Crz { control, .. } if Some(*control) == phase);
            let layer = match (fanned, gate) {
                (true, Gate::Crz { target, .. }) => frontier[*target],
                _ => gate.qubits().iter().map(|q| frontier[q]).max().unwrap_or(0),
            };
            for q in gate.qubits().iter() {
                let claims = !(fanned && Some(q) == phase);
                if claims {
                    frontier[q] = layer + 1;
                } else {
                    // The fanout copy still keeps later phase-wire gates
                    // ordered after this rotation.
                    frontier[q] = frontier[q].max(layer + 1);
                }
            }
            layers.push(layer);
        }
        layers
    }

    /// Serializes to the line format: a `qubits` header then one gate
    /// per line (`KIND q0 [q1] [angle]`). Angles print in shortest
    /// round-trip form, so parsing recovers them bit-exactly.
    pub fn to_text(&self) -> String {
        let mut out = format!(
            "qubits {} {} {}\n",
            self.n_system,
            self.n_parity,
            u8::from(self.has_phase)
        );
        for gate in &self.gates {
            match *gate {
                Gate::Cnot { control, target } => {
                    out += &format!("CNOT {control} {target}\n");
                }
                Gate::Had { q } => out += &format!("HAD {q}\n"),
                Gate::YBasis { q } => out += &format!("YBASIS {q}\n"),
                Gate::YBasisDag { q } => out += &format!("YBASIS_DAG {q}\n"),
                Gate::Cz { control, target } => out += &format!("CZ {control} {target}\n"),
                Gate::Crz {
                    control,
                    target,
                    angle,
                } => out += &format!("CRZ {control} {target} {angle}\n"),
                Gate::Phase { q, angle } => out += &format!("PHASE {q} {angle}\n"),
            }
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Self, CircuitFormatError> {
        let mut circuit: Option<Circuit> = None;
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let mut fields = line.split_whitespace();
            let head = fields.next().expect("nonempty line");
            let rest: Vec<&str> = fields.collect();
            let err = |what: &str| CircuitFormatError {
                line: lineno + 1,
                message: what.to_string(),
            };
            if circuit.is_none() {
                if head != "qubits" {
                    return Err(err("expected `qubits` header"));
                }
                if rest.len() != 3 {
                    return Err(err("header needs `qubits <system> <parity> <phase>`"));
                }
                let n_system = parse_usize(rest[0]).ok_or_else(|| err("bad system count"))?;
                let n_parity = parse_usize(rest[1]).ok_or_else(|| err("bad parity count"))?;
                let has_phase = match rest[2] {
                    "0" => false,
                    "1" => true,
                    _ => return Err(err("phase flag must be 0 or 1")),
                };
                circuit = Some(Circuit::new(n_system, n_parity, has_phase));
                continue;
            }
            let c = circuit.as_mut().expect("header parsed");
            let q = |s: &str| parse_usize(s).ok_or_else(|| err("bad qubit index"));
            let angle = |s: &str| s.parse::<f64>().map_err(|_| err("bad angle"));
            let gate = match (head, rest.as_slice()) {
                ("CNOT", [a, b]) => Gate::Cnot {
                    control: q(a)?,
                    target: q(b)?,
                },
                ("HAD", [a]) => Gate::Had { q: q(a)? },
                ("YBASIS", [a]) => Gate::YBasis { q: q(a)? },
                ("YBASIS_DAG", [a]) => Gate::YBasisDag { q: q(a)? },
                ("CZ", [a, b]) => Gate::Cz {
                    control: q(a)?,
                    target: q(b)?,
                },
                ("CRZ", [a, b, x]) => Gate::Crz {
                    control: q(a)?,
                    target: q(b)?,
                    angle: angle(x)?,
                },
                ("PHASE", [a, x]) => Gate::Phase {
                    q: q(a)?,
                    angle: angle(x)?,
                },
                _ => return Err(err("unrecognized gate line")),
            };
            let n = c.n_qubits();
            let QubitPair(a, b) = gate.qubits();
            if a >= n || b.map_or(false, |t| t >= n) {
                return Err(err("qubit index outside header range"));
            }
            if b == Some(a) {
                return Err(err("control equals target"));
            }
            c.gates.push(gate);
            c.tags.push(None);
        }
        circuit.ok_or(CircuitFormatError {
            line: 0,
            message: "missing `qubits` header".to_string(),
        })
    }
}

fn parse_usize(s: &str) -> Option<usize> {
    s.parse::<usize>().ok()
}

/// Gate totals by kind.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct GateCounts {
    pub by_kind: BTreeMap<GateKind, usize>,
}

impl GateCounts {
    pub fn get(&self, kind: GateKind) -> usize {
        self.by_kind.get(&kind).copied().unwrap_or(0)
    }

    pub fn total(&self) -> usize {
        self.by_kind.values().sum()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum CircuitError {
    QubitOutOfRange { position: usize, n: usize },
    ControlEqualsTarget { position: usize },
}

impl fmt::Display for CircuitError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::QubitOutOfRange { position, n } => {
                write!(f, "gate {position} references a qubit outside 0..{n}")
            }
            Self::ControlEqualsTarget { position } => {
                write!(f, "gate {position} has control == target")
            }
        }
    }
}

impl core::error::Error for CircuitError {}

#[derive(Debug, Clone, PartialEq)]
pub struct CircuitFormatError {
    pub line: usize,
    pub message: String,
}

impl fmt::Display for CircuitFormatError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "line {}: {}", self.line, self.message)
    }
}

impl core::error::Error for CircuitFormatError {}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn gate_counts_examples() {
        let c = Circuit::new(2, 0, false);
        assert_eq!(c.gate_counts().total(), 0);

        let mut c = Circuit::new(3, 0, false);
        c.push(Gate::Cnot { control: 0, target: 1 });
        c.push(Gate::Cnot { control: 1, target: 2 });
        c.push(Gate::Had { q: 0 });
        let counts = c.gate_counts();
        assert_eq!(counts.get(GateKind::Cnot), 2);
        assert_eq!(counts.get(GateKind::Had), 1);
        assert_eq!(counts.get(GateKind::Cz), 0);
        assert_eq!(counts.total(), 3);
    }

    #[test]
    fn depth_empty_circuit_is_zero() {
        let c = Circuit::new(4, 0, true);
        assert_eq!(c.parallel_depth(false), 0);
        assert_eq!(c.parallel_depth(true), 0);
    }

    #[test]
    fn depth_disjoint_gates_share_a_layer() {
        let mut c = Circuit::new(4, 0, false);
        c.push(Gate::Cnot { control: 0, target: 1 });
        c.push(Gate::Cnot { control: 2, target: 3 });
        assert_eq!(c.parallel_depth(false), 1);
    }

    #[test]
    fn depth_phase_fanout_rule() {
        let mut c = Circuit::new(3, 0, true);
        let phase = c.phase_qubit().unwrap();
        c.push(Gate::Crz { control: phase, target: 1, angle: 0.3 });
        c.push(Gate::Crz { control: phase, target: 2, angle: 0.4 });
        assert_eq!(c.parallel_depth(true), 1);
        assert_eq!(c.parallel_depth(false), 2);
        // Same-target rotations serialize either way.
        c.push(Gate::Crz { control: phase, target: 1, angle: 0.5 });
        assert_eq!(c.parallel_depth(true), 2);
    }

    #[test]
    fn depth_never_exceeds_gate_count_and_fanout_helps() {
        let mut c = Circuit::new(3, 1, true);
        let phase = c.phase_qubit().unwrap();
        c.push(Gate::Had { q: 0 });
        c.push(Gate::Cnot { control: 0, target: 1 });
        c.push(Gate::Crz { control: phase, target: 1, angle: 0.1 });
        c.push(Gate::Crz { control: phase, target: 2, angle: 0.2 });
        c.push(Gate::Phase { q: phase, angle: 0.7 });
        assert!(c.parallel_depth(true) <= c.len());
        assert!(c.parallel_depth(true) <= c.parallel_depth(false));
    }

    #[test]
    fn layering_preserves_per_qubit_order() {
        let mut c = Circuit::new(3, 0, true);
        let phase = c.phase_qubit().unwrap();
        c.push(Gate::Had { q: 0 });
        c.push(Gate::Cnot { control: 0, target: 1 });
        c.push(Gate::Crz { control: phase, target: 0, angle: 0.1 });
        c.push(Gate::Crz { control: phase, target: 2, angle: 0.2 });
        c.push(Gate::Phase { q: phase, angle: 0.3 });
        c.push(Gate::Cnot { control: 1, target: 0 });
        for fanout in [false, true] {
            let layers = c.layering(fanout);
            for q in 0..c.n_qubits() {
                let per_qubit: Vec<usize> = c
                    .gates()
                    .iter()
                    .zip(&layers)
                    .filter(|(g, _)| g.touches(q))
                    .map(|(_, &l)| l)
                    .collect();
                // Restriction to each qubit must be non-decreasing; equal
                // layers may only happen for fanned-out rotations on the
                // phase wire.
                for w in per_qubit.windows(2) {
                    assert!(w[0] <= w[1] || (fanout && q == c.phase_qubit().unwrap()));
                }
            }
        }
    }

    #[test]
    fn text_round_trip_bit_exact() {
        let mut c = Circuit::new(3, 1, true);
        let phase = c.phase_qubit().unwrap();
        c.push(Gate::Had { q: 0 });
        c.push(Gate::YBasisDag { q: 2 });
        c.push(Gate::Cnot { control: 0, target: 2 });
        c.push(Gate::Cz { control: 3, target: 2 });
        c.push(Gate::Crz {
            control: phase,
            target: 2,
            angle: -0.123456789123456789,
        });
        c.push(Gate::Phase { q: phase, angle: core::f64::consts::PI / 3.0 });
        c.push(Gate::YBasis { q: 2 });
        let parsed = Circuit::from_text(&c.to_text()).unwrap();
        assert_eq!(parsed.gates(), c.gates());
        assert_eq!(parsed.n_qubits(), c.n_qubits());
    }

    #[test]
    fn text_parse_errors_carry_line_numbers() {
        let err = Circuit::from_text("qubits 2 0 0\nCNOT 0 5\n").unwrap_err();
        assert_eq!(err.line, 2);
        let err = Circuit::from_text("CNOT 0 1\n").unwrap_err();
        assert_eq!(err.line, 1);
        assert!(Circuit::from_text("").is_err());
        let err = Circuit::from_text("qubits 2 0 0\nFLIP 0\n").unwrap_err();
        assert!(err.message.contains("unrecognized"));
    }

    proptest! {
        #[test]
        fn prop_text_round_trip(gates in proptest::collection::vec((0u8..7, 0usize..4, 0usize..4, -3.0f64..3.0), 0..40)) {
            let mut c = Circuit::new(4, 1, true);
            for (kind, a, b, angle) in gates {
                let b = if a == b { (b + 1) % 5 } else { b };
                let gate = match kind {
                    0 => Gate::Cnot { control: a, target: b },
                    1 => Gate::Had { q: a },
                    2 => Gate::YBasis { q: a },
                    3 => Gate::YBasisDag { q: a },
                    4 => Gate::Cz { control: a, target: b },
                    5 => Gate::Crz { control: a, target: b, angle },
                    _ => Gate::Phase { q: a, angle },
                };
                c.push(gate);
            }
            let rt = Circuit::from_text(&c.to_text()).unwrap();
            prop_assert_eq!(rt.gates(), c.gates());
        }

        #[test]
        fn prop_depth_bounds(gates in proptest::collection::vec((0usize..5, 0usize..5), 1..60)) {
            let mut c = Circuit::new(4, 0, true);
            for (a, b) in gates {
                if a == b {
                    c.push(Gate::Had { q: a });
                } else {
                    c.push(Gate::Cnot { control: a, target: b });
                }
            }
            let d_on = c.parallel_depth(true);
            let d_off = c.parallel_depth(false);
            prop_assert!(d_on <= d_off);
            prop_assert!(d_off <= c.len());
            prop_assert!(d_on >= 1);
        }
    }
}
