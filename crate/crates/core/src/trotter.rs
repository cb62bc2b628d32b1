//! Term ordering and assembly of full controlled Trotter steps.
//!
//! A step compiles `exp(i H dt)` as an ordered product of per-term
//! circuits, first order as a single sweep, second order as half-angle
//! forward and reverse sweeps. The interleaved strategy exploits the
//! Hartree-Fock structure: diagonal terms first (they all commute), then
//! for each orbital pair the hop together with the number-dressed hops
//! that share its endpoints, then the bulk of double excitations.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::vec::Vec;
use core::fmt;

use crate::circuit::Circuit;
use crate::hamiltonian::{FermionTerm, IntegralsError, SpinOrbitalIntegrals, TermKind};
use crate::optimizer::{self, PassReport};
use crate::synth::{self, QubitOrder, SubtermOrder, SynthError, SynthOptions, SynthStyle, TermSchedule};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OrderStrategy {
    Lexicographic,
    Magnitude,
    Interleaved,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TsOrder {
    First,
    Second,
}

/// Everything that determines an emitted step circuit.
#[derive(Debug, Clone, PartialEq)]
pub struct TrotterPlan {
    pub order_strategy: OrderStrategy,
    pub ts_order: TsOrder,
    /// Trotter number n; the step timestep is `total_time / n_steps`.
    pub n_steps: usize,
    pub total_time: f64,
    pub style: SynthStyle,
    pub qubit_order: QubitOrder,
    pub subterm_order: SubtermOrder,
    pub diagonal_fix: bool,
    pub nest: bool,
    pub cancel: bool,
    /// Merged coefficients at or below this magnitude are dropped.
    pub prune_threshold: f64,
    /// Constant subtracted from the encoded Hamiltonian (as a phase on
    /// the control wire) and added back by energy extraction; keeps
    /// eigenphases inside the principal branch for large spectra.
    pub energy_shift: f64,
}

impl Default for TrotterPlan {
    fn default() -> Self {
        Self {
            order_strategy: OrderStrategy::Lexicographic,
            ts_order: TsOrder::First,
            n_steps: 1,
            total_time: 1.0,
            style: SynthStyle::StringCz,
            qubit_order: QubitOrder::Interleaved,
            subterm_order: SubtermOrder::Baseline,
            diagonal_fix: false,
            nest: false,
            cancel: false,
            prune_threshold: crate::hamiltonian::DEFAULT_PRUNE_THRESHOLD,
            energy_shift: 0.0,
        }
    }
}

impl TrotterPlan {
    pub fn delta_t(&self) -> f64 {
        self.total_time / self.n_steps as f64
    }

    pub fn synth_options(&self) -> SynthOptions {
        SynthOptions {
            style: self.style,
            qubit_order: self.qubit_order,
            subterm_order: self.subterm_order,
            delta_t: self.delta_t(),
        }
    }

    pub fn validate(&self) -> Result<(), BuildError> {
        if self.n_steps == 0 {
            return Err(BuildError::InvalidPlan("n_steps must be at least 1"));
        }
        if !(self.total_time > 0.0) {
            return Err(BuildError::InvalidPlan("total_time must be positive"));
        }
        if self.prune_threshold < 0.0 {
            return Err(BuildError::InvalidPlan("prune_threshold must be nonnegative"));
        }
        Ok(())
    }
}

/// Orders classified terms for execution.
///
/// * `Lexicographic`: by `(kind, indices)`.
/// * `Magnitude`: by descending `|coefficient|` (ties lexicographic).
/// * `Interleaved`: the diagonal block, then per endpoint pair the hop
///   followed by its number-dressed hops, then all double excitations
///   lexicographically.
pub fn order_terms(terms: &[FermionTerm], strategy: OrderStrategy) -> Vec<FermionTerm> {
    let mut out: Vec<FermionTerm>;
    match strategy {
        OrderStrategy::Lexicographic => {
            out = terms.to_vec();
            out.sort_by(lex_cmp);
        }
        OrderStrategy::Magnitude => {
            out = terms.to_vec();
            out.sort_by(|a, b| {
                libm::fabs(b.coefficient())
                    .total_cmp(&libm::fabs(a.coefficient()))
                    .then_with(|| lex_cmp(a, b))
            });
        }
        OrderStrategy::Interleaved => {
            let mut diagonal: Vec<FermionTerm> = Vec::new();
            let mut doubles: Vec<FermionTerm> = Vec::new();
            let mut hops: BTreeMap<(usize, usize), Vec<FermionTerm>> = BTreeMap::new();
            let mut dressed: BTreeMap<(usize, usize), Vec<FermionTerm>> = BTreeMap::new();
            let mut pairs: BTreeSet<(usize, usize)> = BTreeSet::new();
            for term in terms {
                match *term {
                    FermionTerm::Pp { .. } | FermionTerm::Pqqp { .. } => {
                        diagonal.push(term.clone())
                    }
                    FermionTerm::Pq { p, q, .. } => {
                        pairs.insert((p, q));
                        hops.entry((p, q)).or_default().push(term.clone());
                    }
                    FermionTerm::Pqqr { p, r, .. } => {
                        pairs.insert((p, r));
                        dressed.entry((p, r)).or_default().push(term.clone());
                    }
                    FermionTerm::Pqrs { .. } => doubles.push(term.clone()),
                }
            }
            diagonal.sort_by(lex_cmp);
            doubles.sort_by(lex_cmp);
            out = diagonal;
            for pair in pairs {
                if let Some(mut h) = hops.remove(&pair) {
                    h.sort_by(lex_cmp);
                    out.append(&mut h);
                }
                if let Some(mut d) = dressed.remove(&pair) {
                    d.sort_by(lex_cmp);
                    out.append(&mut d);
                }
            }
            out.append(&mut doubles);
        }
    }
    out
}

fn lex_cmp(a: &FermionTerm, b: &FermionTerm) -> core::cmp::Ordering {
    (a.kind(), a.indices()).cmp(&(b.kind(), b.indices()))
}

/// A compiled Trotter step plus the bookkeeping needed to check it.
#[derive(Debug, Clone)]
pub struct CompiledStep {
    pub circuit: Circuit,
    /// Emitted term order and parity slots (the forward sweep for a
    /// second-order step).
    pub schedule: TermSchedule,
    /// Nesting layers (original index space) when nesting ran.
    pub layers: Option<Vec<Vec<FermionTerm>>>,
    /// False if the nested order lost the depth comparison against the
    /// strategy order and was discarded.
    pub nested_kept: bool,
    pub pass_report: Option<PassReport>,
    pub options: SynthOptions,
    pub ts_order: TsOrder,
    pub delta_t: f64,
    pub energy_shift: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub enum BuildError {
    InvalidPlan(&'static str),
    Integrals(IntegralsError),
    Synth(SynthError),
}

impl fmt::Display for BuildError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::InvalidPlan(msg) => write!(f, "invalid plan: {msg}"),
            Self::Integrals(e) => e.fmt(f),
            Self::Synth(e) => e.fmt(f),
        }
    }
}

impl core::error::Error for BuildError {}

impl From<IntegralsError> for BuildError {
    fn from(e: IntegralsError) -> Self {
        Self::Integrals(e)
    }
}

impl From<SynthError> for BuildError {
    fn from(e: SynthError) -> Self {
        Self::Synth(e)
    }
}

/// Classifies, orders, optionally nests, synthesizes and optionally
/// cancels one full controlled Trotter step over
/// `integrals.n_orbitals()` system qubits.
pub fn build_trotter_step(
    integrals: &SpinOrbitalIntegrals,
    plan: &TrotterPlan,
) -> Result<CompiledStep, BuildError> {
    plan.validate()?;
    let working = if plan.diagonal_fix {
        integrals.apply_diagonal_fix(plan.delta_t())?
    } else {
        integrals.clone()
    };
    let terms = working.classify_terms(plan.prune_threshold);
    let ordered = order_terms(&terms, plan.order_strategy);
    build_step_from_terms(&ordered, integrals.n_orbitals(), plan)
}

/// Step assembly from an already ordered term list (the strategy order).
pub fn build_step_from_terms(
    ordered: &[FermionTerm],
    n_qubits: usize,
    plan: &TrotterPlan,
) -> Result<CompiledStep, BuildError> {
    plan.validate()?;
    let opts = plan.synth_options();

    let sequential = TermSchedule::sequential(ordered);
    if !plan.nest {
        let (circuit, report) = assemble(&sequential, &opts, n_qubits, plan)?;
        return Ok(CompiledStep {
            circuit,
            schedule: sequential,
            layers: None,
            nested_kept: false,
            pass_report: report,
            options: opts,
            ts_order: plan.ts_order,
            delta_t: plan.delta_t(),
            energy_shift: plan.energy_shift,
        });
    }

    // Nesting runs in qubit space. Under the interleaved strategy only
    // the trailing double-excitation block is repacked; otherwise the
    // whole list is.
    let perm = synth::qubit_permutation(plan.qubit_order, n_qubits);
    let inverse = invert(&perm);
    let nest_from = match plan.order_strategy {
        OrderStrategy::Interleaved => ordered
            .iter()
            .position(|t| t.kind() == TermKind::PQRS)
            .unwrap_or(ordered.len()),
        _ => 0,
    };
    let mapped: Vec<FermionTerm> = ordered[nest_from..]
        .iter()
        .map(|t| t.relabel(&perm))
        .collect();
    let layers_mapped = optimizer::nest_schedule(&mapped, n_qubits);
    let layers: Vec<Vec<FermionTerm>> = layers_mapped
        .iter()
        .map(|layer| layer.iter().map(|t| t.relabel(&inverse)).collect())
        .collect();
    let mut nested = TermSchedule::sequential(&ordered[..nest_from]);
    let tail = optimizer::schedule_from_layers(&layers);
    nested.n_slots = tail.n_slots;
    nested.entries.extend(tail.entries);

    let (nested_circuit, nested_report) = assemble(&nested, &opts, n_qubits, plan)?;
    let (plain_circuit, plain_report) = assemble(&sequential, &opts, n_qubits, plan)?;
    // The packed order must never lose to the strategy order on depth;
    // fall back when the greedy packing happens to hurt.
    if nested_circuit.parallel_depth(true) <= plain_circuit.parallel_depth(true) {
        Ok(CompiledStep {
            circuit: nested_circuit,
            schedule: nested,
            layers: Some(layers),
            nested_kept: true,
            pass_report: nested_report,
            options: opts,
            ts_order: plan.ts_order,
            delta_t: plan.delta_t(),
            energy_shift: plan.energy_shift,
        })
    } else {
        Ok(CompiledStep {
            circuit: plain_circuit,
            schedule: sequential,
            layers: Some(layers),
            nested_kept: false,
            pass_report: plain_report,
            options: opts,
            ts_order: plan.ts_order,
            delta_t: plan.delta_t(),
            energy_shift: plan.energy_shift,
        })
    }
}

fn assemble(
    schedule: &TermSchedule,
    opts: &SynthOptions,
    n_qubits: usize,
    plan: &TrotterPlan,
) -> Result<(Circuit, Option<PassReport>), BuildError> {
    let mut circuit = synth::new_step_circuit(schedule, opts, n_qubits);
    if plan.energy_shift != 0.0 {
        let phase = circuit.phase_qubit().expect("step circuits have a phase wire");
        circuit.push(crate::circuit::Gate::Phase {
            q: phase,
            angle: -plan.energy_shift * plan.delta_t(),
        });
    }
    match plan.ts_order {
        TsOrder::First => {
            synth::emit_schedule(&mut circuit, schedule, opts, 1.0, 0)?;
        }
        TsOrder::Second => {
            synth::emit_schedule(&mut circuit, schedule, opts, 0.5, 0)?;
            let reversed = TermSchedule {
                entries: schedule.entries.iter().rev().cloned().collect(),
                n_slots: schedule.n_slots,
            };
            let base = schedule.entries.len() as u32;
            synth::emit_schedule(&mut circuit, &reversed, opts, 0.5, base)?;
        }
    }
    if plan.cancel {
        let (cancelled, report) = optimizer::run_pipeline(&circuit, &DEFAULT_PASSES);
        Ok((cancelled, Some(report)))
    } else {
        Ok((circuit, None))
    }
}

use optimizer::DEFAULT_PASSES;

fn invert(perm: &[usize]) -> Vec<usize> {
    let mut inv = alloc::vec![0usize; perm.len()];
    for (i, &p) in perm.iter().enumerate() {
        inv[p] = i;
    }
    inv
}
