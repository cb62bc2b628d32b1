//! Per-term circuit synthesis.
//!
//! Every term compiles to gates implementing the controlled unitary
//! `exp(i * c * dt * H_term)` on the phase ancilla's |1> branch. The
//! Pauli strings of the term are taken from [`jw_expand`]; within a term
//! they commute, so the product of per-string exponentials realizes the
//! term exactly and all approximation error lives between terms.
//!
//! Three styles are supported:
//!
//! * `Standard` conjugates each subterm rotation by its own full CNOT
//!   ladder over the string (cost linear in the string length per
//!   subterm).
//! * `StringCz` computes the string parity once per term onto the last
//!   string qubit and folds it into every subterm through a pair of
//!   controlled-Z gates, so the ladder appears once per term.
//! * `Ancilla` accumulates the string parity onto a dedicated parity
//!   ancilla with CNOTs that all share that target, which is what lets
//!   the optimizer cancel any matching pair between consecutive terms.

use alloc::vec::Vec;
use core::fmt;

use crate::circuit::{Circuit, Gate, GateRole, GateTag};
use crate::hamiltonian::FermionTerm;
use crate::pauli::{enumerate_subterms, jw_expand, PauliError, PauliLetter, PauliString};

pub use crate::pauli::SubtermOrder;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SynthStyle {
    Standard,
    StringCz,
    Ancilla,
}

/// Assignment of spin-orbital modes to qubit wires.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QubitOrder {
    /// Orbital-major, spin-minor: mode `(i, s)` on wire `2i + s`.
    Interleaved,
    /// All up-spin modes first, then all down-spin modes.
    HalfUp,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SynthOptions {
    pub style: SynthStyle,
    pub qubit_order: QubitOrder,
    pub subterm_order: SubtermOrder,
    pub delta_t: f64,
}

impl SynthOptions {
    pub fn validate(&self) -> Result<(), SynthError> {
        if self.delta_t > 0.0 {
            Ok(())
        } else {
            Err(SynthError::InvalidDeltaT(self.delta_t))
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum SynthError {
    InvalidDeltaT(f64),
    Pauli(PauliError),
}

impl fmt::Display for SynthError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::InvalidDeltaT(dt) => write!(f, "delta_t must be positive, got {dt}"),
            Self::Pauli(e) => e.fmt(f),
        }
    }
}

impl core::error::Error for SynthError {}

impl From<PauliError> for SynthError {
    fn from(e: PauliError) -> Self {
        Self::Pauli(e)
    }
}

/// Wire assignment for spin orbital `(i, spin)` indexed as `2i + spin`,
/// over `2 * n_spatial` modes.
pub fn qubit_map(order: QubitOrder, n_spatial: usize) -> Vec<usize> {
    qubit_permutation(order, 2 * n_spatial)
}

/// [`qubit_map`] generalized to any qubit count: modes at even positions
/// count as spin-up. Reduces to the spec'd map for even counts.
pub fn qubit_permutation(order: QubitOrder, n_qubits: usize) -> Vec<usize> {
    match order {
        QubitOrder::Interleaved => (0..n_qubits).collect(),
        QubitOrder::HalfUp => {
            let n_up = n_qubits.div_ceil(2);
            (0..n_qubits)
                .map(|k| if k % 2 == 0 { k / 2 } else { n_up + k / 2 })
                .collect()
        }
    }
}

/// The term with indices pushed through the layout permutation, i.e. the
/// operator the emitted gates act on.
pub fn mapped_term(term: &FermionTerm, order: QubitOrder, n_qubits: usize) -> FermionTerm {
    term.relabel(&qubit_permutation(order, n_qubits))
}

/// One term plus the parity-ancilla slot its string parity uses
/// (meaningful for the `Ancilla` style only).
#[derive(Debug, Clone, PartialEq)]
pub struct ScheduledTerm {
    pub term: FermionTerm,
    pub slot: usize,
}

/// An ordered term sequence with parity-ancilla assignments.
#[derive(Debug, Clone, PartialEq)]
pub struct TermSchedule {
    pub entries: Vec<ScheduledTerm>,
    pub n_slots: usize,
}

impl TermSchedule {
    /// All terms in the given order on slot 0.
    pub fn sequential(terms: &[FermionTerm]) -> Self {
        Self {
            entries: terms
                .iter()
                .map(|t| ScheduledTerm {
                    term: t.clone(),
                    slot: 0,
                })
                .collect(),
            n_slots: 1,
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = &FermionTerm> {
        self.entries.iter().map(|e| &e.term)
    }
}

/// Compiles a single term; see [`synth_schedule`].
pub fn synth_term(
    term: &FermionTerm,
    opts: &SynthOptions,
    n_qubits: usize,
) -> Result<Circuit, SynthError> {
    synth_sequence(core::slice::from_ref(term), opts, n_qubits)
}

/// Compiles terms in order on a single parity slot. Pure concatenation
/// of per-term circuits; cancellation is the optimizer's job.
pub fn synth_sequence(
    terms: &[FermionTerm],
    opts: &SynthOptions,
    n_qubits: usize,
) -> Result<Circuit, SynthError> {
    synth_schedule(&TermSchedule::sequential(terms), opts, n_qubits)
}

/// Compiles a scheduled term sequence into one circuit.
pub fn synth_schedule(
    schedule: &TermSchedule,
    opts: &SynthOptions,
    n_qubits: usize,
) -> Result<Circuit, SynthError> {
    opts.validate()?;
    let mut circuit = new_step_circuit(schedule, opts, n_qubits);
    emit_schedule(&mut circuit, schedule, opts, 1.0, 0)?;
    Ok(circuit)
}

/// Registry for a step over `n_qubits` system qubits: a parity pool for
/// the ancilla style, and always a phase ancilla.
pub(crate) fn new_step_circuit(
    schedule: &TermSchedule,
    opts: &SynthOptions,
    n_qubits: usize,
) -> Circuit {
    let n_parity = match opts.style {
        SynthStyle::Ancilla => schedule.n_slots.max(1),
        _ => 0,
    };
    Circuit::new(n_qubits, n_parity, true)
}

/// Emits every scheduled term into `circuit`, scaling angles by
/// `dt_scale` (used for half-step sweeps) and numbering terms from
/// `term_id_base`.
pub(crate) fn emit_schedule(
    circuit: &mut Circuit,
    schedule: &TermSchedule,
    opts: &SynthOptions,
    dt_scale: f64,
    term_id_base: u32,
) -> Result<(), SynthError> {
    for (i, entry) in schedule.entries.iter().enumerate() {
        emit_term(
            circuit,
            &entry.term,
            opts,
            opts.delta_t * dt_scale,
            term_id_base + i as u32,
            entry.slot,
        )?;
    }
    Ok(())
}

fn emit_term(
    circuit: &mut Circuit,
    term: &FermionTerm,
    opts: &SynthOptions,
    dt: f64,
    term_id: u32,
    slot: usize,
) -> Result<(), SynthError> {
    if term.coefficient() == 0.0 {
        return Ok(());
    }
    let n = circuit.n_system();
    let mapped = mapped_term(term, opts.qubit_order, n);
    let strings = jw_expand(&mapped, n)?;
    let phase = circuit.phase_qubit().expect("step circuits carry a phase ancilla");

    let mut diagonal: Vec<&PauliString> = Vec::new();
    let mut active: Vec<&PauliString> = Vec::new();
    for s in &strings {
        if s.is_identity() {
            // Identity component: a pure phase on the controlled branch.
            circuit.push_tagged(
                Gate::Phase {
                    q: phase,
                    angle: s.coefficient * dt,
                },
                Some(GateTag {
                    term: term_id,
                    subterm: None,
                    role: GateRole::PhaseShift,
                }),
            );
        } else if s.xy_positions().is_empty() {
            diagonal.push(s);
        } else {
            active.push(s);
        }
    }

    let mut subterm_id: u16 = 0;
    for s in &diagonal {
        let tag = GateTag {
            term: term_id,
            subterm: Some(subterm_id),
            role: GateRole::Subterm,
        };
        emit_chained_rotation(circuit, &s.z_positions(), &[], phase, -2.0 * s.coefficient * dt, tag);
        subterm_id += 1;
    }

    if active.is_empty() {
        return Ok(());
    }

    // All non-diagonal strings of one term share their operator sites.
    let ops = active[0].xy_positions();
    debug_assert!(active.iter().all(|s| s.xy_positions() == ops));
    let rot_target = *ops.last().expect("active strings have operator sites");

    // Subterm execution order: the configured pattern sequence over the
    // operator sites, refined by the full letter string for the
    // number-operator variants that share a pattern.
    let patterns = enumerate_subterms(mapped.kind(), opts.subterm_order)
        .map(|p| p.into_iter().collect::<Vec<_>>())
        .unwrap_or_default();
    let pattern_rank = |s: &PauliString| {
        let pat: Vec<PauliLetter> = ops.iter().map(|&q| s.letters[q]).collect();
        patterns
            .iter()
            .position(|p| *p == pat)
            .unwrap_or(patterns.len())
    };
    active.sort_by(|a, b| {
        pattern_rank(a)
            .cmp(&pattern_rank(b))
            .then_with(|| a.letters.cmp(&b.letters))
    });

    // The string sites every subterm shares; factored out once per term
    // for the parity-reuse styles.
    let mut shared_z: Vec<usize> = active[0].z_positions();
    for s in &active[1..] {
        let zs = s.z_positions();
        shared_z.retain(|q| zs.contains(q));
    }

    let factored = !matches!(opts.style, SynthStyle::Standard) && !shared_z.is_empty();
    let parity_wire = match opts.style {
        SynthStyle::Ancilla => circuit.parity_qubit(slot),
        _ => *shared_z.last().unwrap_or(&0),
    };

    if factored {
        let open = GateTag {
            term: term_id,
            subterm: None,
            role: GateRole::StringOpen,
        };
        match opts.style {
            SynthStyle::StringCz => {
                for w in shared_z.windows(2) {
                    circuit.push_tagged(
                        Gate::Cnot {
                            control: w[0],
                            target: w[1],
                        },
                        Some(open),
                    );
                }
            }
            SynthStyle::Ancilla => {
                for &z in &shared_z {
                    circuit.push_tagged(
                        Gate::Cnot {
                            control: z,
                            target: parity_wire,
                        },
                        Some(open),
                    );
                }
            }
            SynthStyle::Standard => unreachable!(),
        }
        circuit.push_tagged(
            Gate::Cz {
                control: parity_wire,
                target: rot_target,
            },
            Some(GateTag {
                term: term_id,
                subterm: None,
                role: GateRole::StringCz,
            }),
        );
    }

    for s in &active {
        let tag = GateTag {
            term: term_id,
            subterm: Some(subterm_id),
            role: GateRole::Subterm,
        };
        subterm_id += 1;
        let angle = -2.0 * s.coefficient * dt;
        // Basis changes into the Z basis at the operator sites.
        for &q in &ops {
            match s.letters[q] {
                PauliLetter::X => circuit.push_tagged(Gate::Had { q }, Some(tag)),
                PauliLetter::Y => circuit.push_tagged(Gate::YBasisDag { q }, Some(tag)),
                _ => unreachable!("operator sites carry X or Y"),
            }
        }
        let extra_z: Vec<usize> = if matches!(opts.style, SynthStyle::Standard) {
            s.z_positions()
        } else {
            s.z_positions()
                .into_iter()
                .filter(|q| !shared_z.contains(q))
                .collect()
        };
        if matches!(opts.style, SynthStyle::Standard) {
            // Single ladder over the full support, rotation at the end.
            let mut support: Vec<usize> = ops.iter().copied().chain(extra_z).collect();
            support.sort_unstable();
            emit_chained_rotation(circuit, &support, &[], phase, angle, tag);
        } else {
            emit_chained_rotation(circuit, &ops, &extra_z, phase, angle, tag);
        }
        for &q in ops.iter().rev() {
            match s.letters[q] {
                PauliLetter::X => circuit.push_tagged(Gate::Had { q }, Some(tag)),
                PauliLetter::Y => circuit.push_tagged(Gate::YBasis { q }, Some(tag)),
                _ => unreachable!(),
            }
        }
    }

    if factored {
        circuit.push_tagged(
            Gate::Cz {
                control: parity_wire,
                target: rot_target,
            },
            Some(GateTag {
                term: term_id,
                subterm: None,
                role: GateRole::StringCz,
            }),
        );
        let close = GateTag {
            term: term_id,
            subterm: None,
            role: GateRole::StringClose,
        };
        match opts.style {
            SynthStyle::StringCz => {
                for w in shared_z.windows(2).rev() {
                    circuit.push_tagged(
                        Gate::Cnot {
                            control: w[0],
                            target: w[1],
                        },
                        Some(close),
                    );
                }
            }
            SynthStyle::Ancilla => {
                for &z in shared_z.iter().rev() {
                    circuit.push_tagged(
                        Gate::Cnot {
                            control: z,
                            target: parity_wire,
                        },
                        Some(close),
                    );
                }
            }
            SynthStyle::Standard => unreachable!(),
        }
    }
    Ok(())
}

/// Emits the standard-style block for `exp(i * coeff * dt * P)` with `P`
/// a single weighted Pauli string, controlled on the phase ancilla.
/// Identity strings become a phase on the control wire. Building block
/// for step circuits over raw Pauli-term Hamiltonians.
pub fn emit_controlled_string_exp(circuit: &mut Circuit, string: &PauliString, dt: f64) {
    let phase = circuit
        .phase_qubit()
        .expect("controlled exponentials need a phase ancilla");
    let theta = string.coefficient * dt;
    if string.is_identity() {
        circuit.push(Gate::Phase {
            q: phase,
            angle: theta,
        });
        return;
    }
    let tag = GateTag {
        term: 0,
        subterm: None,
        role: GateRole::Subterm,
    };
    let ops = string.xy_positions();
    for &q in &ops {
        match string.letters[q] {
            PauliLetter::X => circuit.push(Gate::Had { q }),
            PauliLetter::Y => circuit.push(Gate::YBasisDag { q }),
            _ => unreachable!(),
        }
    }
    let support = string.support();
    emit_chained_rotation(circuit, &support, &[], phase, -2.0 * theta, tag);
    for &q in ops.iter().rev() {
        match string.letters[q] {
            PauliLetter::X => circuit.push(Gate::Had { q }),
            PauliLetter::Y => circuit.push(Gate::YBasis { q }),
            _ => unreachable!(),
        }
    }
}

/// Parity ladder over `chain`, wrap CNOTs from `extra` onto the chain
/// end, a phase-controlled rotation there, then the mirror image.
fn emit_chained_rotation(
    circuit: &mut Circuit,
    chain: &[usize],
    extra: &[usize],
    phase: usize,
    angle: f64,
    tag: GateTag,
) {
    let target = *chain.last().expect("rotation needs a target qubit");
    for w in chain.windows(2) {
        circuit.push_tagged(
            Gate::Cnot {
                control: w[0],
                target: w[1],
            },
            Some(tag),
        );
    }
    for &v in extra {
        circuit.push_tagged(
            Gate::Cnot {
                control: v,
                target,
            },
            Some(tag),
        );
    }
    circuit.push_tagged(
        Gate::Crz {
            control: phase,
            target,
            angle,
        },
        Some(tag),
    );
    for &v in extra.iter().rev() {
        circuit.push_tagged(
            Gate::Cnot {
                control: v,
                target,
            },
            Some(tag),
        );
    }
    for w in chain.windows(2).rev() {
        circuit.push_tagged(
            Gate::Cnot {
                control: w[0],
                target: w[1],
            },
            Some(tag),
        );
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::GateKind;

    fn opts(style: SynthStyle) -> SynthOptions {
        SynthOptions {
            style,
            qubit_order: QubitOrder::Interleaved,
            subterm_order: SubtermOrder::Baseline,
            delta_t: 0.1,
        }
    }

    #[test]
    fn qubit_map_examples() {
        assert_eq!(qubit_map(QubitOrder::Interleaved, 2), vec![0, 1, 2, 3]);
        // Up modes land on wires 0..2, down modes on 2..4.
        assert_eq!(qubit_map(QubitOrder::HalfUp, 2), vec![0, 2, 1, 3]);
    }

    #[test]
    fn qubit_permutation_is_bijective() {
        for order in [QubitOrder::Interleaved, QubitOrder::HalfUp] {
            for n in 1..9 {
                let perm = qubit_permutation(order, n);
                let mut seen = alloc::vec![false; n];
                for &p in &perm {
                    assert!(!seen[p]);
                    seen[p] = true;
                }
                // Inverting twice is the identity.
                let mut inv = alloc::vec![0usize; n];
                for (i, &p) in perm.iter().enumerate() {
                    inv[p] = i;
                }
                let double: Vec<usize> = (0..n).map(|i| perm[inv[i]]).collect();
                assert_eq!(double, (0..n).collect::<Vec<_>>());
            }
        }
    }

    #[test]
    fn zero_coefficient_term_is_empty() {
        let term = FermionTerm::Pq {
            p: 0,
            q: 1,
            coefficient: 0.0,
        };
        let c = synth_term(&term, &opts(SynthStyle::Standard), 2).unwrap();
        assert!(c.is_empty());
    }

    #[test]
    fn invalid_delta_t_rejected() {
        let term = FermionTerm::Pp {
            p: 0,
            coefficient: 1.0,
        };
        let mut o = opts(SynthStyle::Standard);
        o.delta_t = 0.0;
        assert!(matches!(
            synth_term(&term, &o, 1),
            Err(SynthError::InvalidDeltaT(_))
        ));
    }

    #[test]
    fn pp_term_is_phase_plus_rotation() {
        let term = FermionTerm::Pp {
            p: 0,
            coefficient: 0.5,
        };
        let c = synth_term(&term, &opts(SynthStyle::Standard), 1).unwrap();
        let kinds: Vec<GateKind> = c.gates().iter().map(|g| g.kind()).collect();
        assert_eq!(kinds, vec![GateKind::Phase, GateKind::Crz]);
    }

    #[test]
    fn pq_standard_gate_tally() {
        // Hand tally for the ladder-per-subterm construction on a
        // distance-2 hop: two subterms, each 4 basis gates, a 2-CNOT
        // ladder each way, one rotation.
        let term = FermionTerm::Pq {
            p: 0,
            q: 2,
            coefficient: 1.0,
        };
        let c = synth_term(&term, &opts(SynthStyle::Standard), 3).unwrap();
        let counts = c.gate_counts();
        assert_eq!(counts.get(GateKind::Cnot), 8);
        assert_eq!(counts.get(GateKind::Crz), 2);
        assert_eq!(counts.get(GateKind::Had), 4);
        assert_eq!(counts.get(GateKind::YBasis), 2);
        assert_eq!(counts.get(GateKind::YBasisDag), 2);
        assert_eq!(counts.get(GateKind::Cz), 0);
    }

    #[test]
    fn pq_string_cz_factors_the_string() {
        let term = FermionTerm::Pq {
            p: 0,
            q: 2,
            coefficient: 1.0,
        };
        let c = synth_term(&term, &opts(SynthStyle::StringCz), 3).unwrap();
        let counts = c.gate_counts();
        // String of length 1: no ladder CNOTs, just the CZ pair; op
        // ladder is one CNOT per side per subterm.
        assert_eq!(counts.get(GateKind::Cz), 2);
        assert_eq!(counts.get(GateKind::Cnot), 4);
        assert_eq!(counts.get(GateKind::Crz), 2);
        assert!(c.gates().iter().all(|g| !g.touches(3) || matches!(g, Gate::Crz { .. })));
    }

    #[test]
    fn pq_ancilla_accumulates_on_the_pool_wire() {
        let term = FermionTerm::Pq {
            p: 0,
            q: 3,
            coefficient: 1.0,
        };
        let c = synth_term(&term, &opts(SynthStyle::Ancilla), 4).unwrap();
        assert_eq!(c.n_parity(), 1);
        let ancilla = c.parity_qubit(0);
        let onto_ancilla = c
            .gates()
            .iter()
            .filter(|g| matches!(g, Gate::Cnot { target, .. } if *target == ancilla))
            .count();
        // String {1, 2} written and erased once for the whole term.
        assert_eq!(onto_ancilla, 4);
        let czs = c
            .gates()
            .iter()
            .filter(|g| matches!(g, Gate::Cz { control, .. } if *control == ancilla))
            .count();
        assert_eq!(czs, 2);
    }

    #[test]
    fn adjacent_hop_has_no_string_machinery() {
        let term = FermionTerm::Pq {
            p: 1,
            q: 2,
            coefficient: 1.0,
        };
        for style in [SynthStyle::Standard, SynthStyle::StringCz, SynthStyle::Ancilla] {
            let c = synth_term(&term, &opts(style), 4).unwrap();
            assert_eq!(c.gate_counts().get(GateKind::Cz), 0, "{style:?}");
        }
    }

    #[test]
    fn subterm_order_changes_gate_sequence_not_counts() {
        let term = FermionTerm::Pqrs {
            p: 0,
            q: 1,
            r: 2,
            s: 3,
            coefficient: 1.0,
        };
        let mut base = opts(SynthStyle::StringCz);
        let mut optd = base;
        base.subterm_order = SubtermOrder::Baseline;
        optd.subterm_order = SubtermOrder::Optimized;
        let cb = synth_term(&term, &base, 4).unwrap();
        let co = synth_term(&term, &optd, 4).unwrap();
        assert_ne!(cb.gates(), co.gates());
        assert_eq!(cb.gate_counts(), co.gate_counts());
    }

    #[test]
    fn halfup_places_gates_on_mapped_wires() {
        // Mode pair (0, 1) sits on wires (0, 2) under HalfUp with two
        // spatial orbitals, so the hop grows a string over wire 1.
        let term = FermionTerm::Pq {
            p: 0,
            q: 1,
            coefficient: 1.0,
        };
        let mut o = opts(SynthStyle::Standard);
        o.qubit_order = QubitOrder::HalfUp;
        let c = synth_term(&term, &o, 4).unwrap();
        assert!(c.gates().iter().any(|g| g.touches(2)));
        assert!(!c.gates().iter().any(|g| g.touches(3)));
    }

    #[test]
    fn schedule_slots_pick_parity_wires() {
        let t1 = FermionTerm::Pq {
            p: 0,
            q: 2,
            coefficient: 1.0,
        };
        let t2 = FermionTerm::Pq {
            p: 3,
            q: 5,
            coefficient: 1.0,
        };
        let schedule = TermSchedule {
            entries: alloc::vec![
                ScheduledTerm { term: t1, slot: 0 },
                ScheduledTerm { term: t2, slot: 1 },
            ],
            n_slots: 2,
        };
        let c = synth_schedule(&schedule, &opts(SynthStyle::Ancilla), 6).unwrap();
        assert_eq!(c.n_parity(), 2);
        let a0 = c.parity_qubit(0);
        let a1 = c.parity_qubit(1);
        assert!(c.gates().iter().any(|g| g.touches(a0)));
        assert!(c.gates().iter().any(|g| g.touches(a1)));
    }

    #[test]
    fn sequence_is_concatenation_of_terms() {
        let t1 = FermionTerm::Pp {
            p: 0,
            coefficient: 1.0,
        };
        let t2 = FermionTerm::Pq {
            p: 0,
            q: 1,
            coefficient: 0.5,
        };
        let o = opts(SynthStyle::Standard);
        let seq = synth_sequence(&[t1.clone(), t2.clone()], &o, 2).unwrap();
        let c1 = synth_term(&t1, &o, 2).unwrap();
        let c2 = synth_term(&t2, &o, 2).unwrap();
        let mut expected = c1.gates().to_vec();
        expected.extend_from_slice(c2.gates());
        assert_eq!(seq.gates(), expected.as_slice());
    }
}
