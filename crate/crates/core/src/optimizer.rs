//! Cancellation passes and the nesting scheduler.
//!
//! Both passes are unitary-preserving rewrites of the gate list:
//!
//! * [`cancel_adjacent`] removes self-inverse pairs with no intervening
//!   gate on either qubit, which is what telescopes the CNOT ladders of
//!   consecutive terms sharing a string prefix.
//! * [`cancel_commuting_cnots`] works on runs of CNOTs sharing a target
//!   (the parity ancilla): all of them commute, so any two with the same
//!   source cancel regardless of position in the run.
//!
//! [`nest_schedule`] packs terms into layers that may execute
//! concurrently. Two terms are layer-compatible when their operator
//! sites are disjoint, each term's operator sites meet the other's
//! string region an even number of times, and every pair of their Pauli
//! strings commutes; the last condition also guarantees the reordering
//! done by the packing never changes the step unitary.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;

use crate::circuit::{Circuit, Gate, GateTag};
use crate::hamiltonian::FermionTerm;
use crate::pauli::jw_expand;
use crate::synth::{ScheduledTerm, TermSchedule};

/// Safety valve for pass iteration.
pub const MAX_PASS_SWEEPS: usize = 100;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum PassKind {
    CancelAdjacent,
    CancelCommutingCnots,
}

impl PassKind {
    pub fn name(self) -> &'static str {
        match self {
            Self::CancelAdjacent => "adjacent",
            Self::CancelCommutingCnots => "commuting_cnots",
        }
    }
}

/// Default pipeline: both cancellation rules to a joint fixed point.
pub const DEFAULT_PASSES: [PassKind; 2] = [PassKind::CancelAdjacent, PassKind::CancelCommutingCnots];

/// What a pipeline run did to the circuit.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PassReport {
    pub gates_before: usize,
    pub gates_after: usize,
    pub depth_before: usize,
    pub depth_after: usize,
    /// Cancelled pairs per rule.
    pub cancellations: BTreeMap<PassKind, usize>,
    /// False only if the sweep cap was hit before reaching a fixed
    /// point.
    pub converged: bool,
}

/// Removes adjacent self-inverse pairs (CNOT/CNOT, H/H, Y/Y+, CZ/CZ) to
/// a fixed point. "Adjacent" means no gate in between touches either
/// qubit of the pair.
pub fn cancel_adjacent(circuit: &Circuit) -> Circuit {
    cancel_adjacent_counted(circuit).0
}

fn cancel_adjacent_counted(circuit: &Circuit) -> (Circuit, usize) {
    let mut gates = circuit.gates().to_vec();
    let mut tags = circuit.tags().to_vec();
    let mut removed_pairs = 0;
    for _ in 0..MAX_PASS_SWEEPS {
        let removed = adjacent_sweep(&mut gates, &mut tags, circuit.n_qubits());
        if removed == 0 {
            break;
        }
        removed_pairs += removed;
    }
    (circuit.with_gates(gates, tags), removed_pairs)
}

fn adjacent_sweep(gates: &mut Vec<Gate>, tags: &mut Vec<Option<GateTag>>, n_qubits: usize) -> usize {
    let mut alive = vec![true; gates.len()];
    let mut last_on_qubit: Vec<Option<usize>> = vec![None; n_qubits];
    let mut removed = 0;
    for i in 0..gates.len() {
        let gate = gates[i];
        let qubits = gate.qubits();
        let candidate = last_on_qubit[qubits.0];
        let aligned = candidate.is_some() && qubits.iter().all(|q| last_on_qubit[q] == candidate);
        if aligned {
            let j = candidate.expect("aligned candidate");
            if inverse_pair(&gates[j], &gate) {
                alive[i] = false;
                alive[j] = false;
                removed += 1;
                for q in qubits.iter() {
                    // The previous gate on these wires is unknown now;
                    // the next sweep picks up any new adjacency.
                    last_on_qubit[q] = None;
                }
                continue;
            }
        }
        for q in qubits.iter() {
            last_on_qubit[q] = Some(i);
        }
    }
    if removed > 0 {
        compact(gates, tags, &alive);
    }
    removed
}

fn inverse_pair(a: &Gate, b: &Gate) -> bool {
    match (a, b) {
        (
            Gate::Cnot {
                control: c1,
                target: t1,
            },
            Gate::Cnot {
                control: c2,
                target: t2,
            },
        ) => c1 == c2 && t1 == t2,
        (Gate::Had { q: q1 }, Gate::Had { q: q2 }) => q1 == q2,
        (Gate::YBasis { q: q1 }, Gate::YBasisDag { q: q2 })
        | (Gate::YBasisDag { q: q1 }, Gate::YBasis { q: q2 }) => q1 == q2,
        (
            Gate::Cz {
                control: c1,
                target: t1,
            },
            Gate::Cz {
                control: c2,
                target: t2,
            },
        ) => (c1, t1) == (c2, t2) || (c1, t1) == (t2, c2),
        _ => false,
    }
}

fn compact(gates: &mut Vec<Gate>, tags: &mut Vec<Option<GateTag>>, alive: &[bool]) {
    let mut w = 0;
    for r in 0..gates.len() {
        if alive[r] {
            gates[w] = gates[r];
            tags[w] = tags[r];
            w += 1;
        }
    }
    gates.truncate(w);
    tags.truncate(w);
}

/// Cancels equal-source CNOT pairs inside maximal same-target runs.
///
/// A run for target `T` is interrupted by any non-member gate touching
/// `T`; a pending source `b` is invalidated by any other gate touching
/// `b`. Within a run all members commute, so surviving order is
/// irrelevant to the unitary.
pub fn cancel_commuting_cnots(circuit: &Circuit) -> Circuit {
    cancel_commuting_cnots_counted(circuit).0
}

fn cancel_commuting_cnots_counted(circuit: &Circuit) -> (Circuit, usize) {
    let mut gates = circuit.gates().to_vec();
    let mut tags = circuit.tags().to_vec();
    let mut removed_pairs = 0;
    for _ in 0..MAX_PASS_SWEEPS {
        let removed = commuting_sweep(&mut gates, &mut tags, circuit.n_qubits());
        if removed == 0 {
            break;
        }
        removed_pairs += removed;
    }
    (circuit.with_gates(gates, tags), removed_pairs)
}

fn commuting_sweep(
    gates: &mut Vec<Gate>,
    tags: &mut Vec<Option<GateTag>>,
    n_qubits: usize,
) -> usize {
    // pending[target][source] = stack of unpaired run members.
    let mut pending: Vec<BTreeMap<usize, Vec<usize>>> = vec![BTreeMap::new(); n_qubits];
    let mut alive = vec![true; gates.len()];
    let mut removed = 0;
    for i in 0..gates.len() {
        let gate = gates[i];
        if let Gate::Cnot { control, target } = gate {
            // Touching `control` ends its own run and invalidates it as
            // a pending source elsewhere; touching `target` invalidates
            // it as a pending source in other runs.
            pending[control].clear();
            for (t, run) in pending.iter_mut().enumerate() {
                if t != target {
                    run.remove(&control);
                    run.remove(&target);
                }
            }
            let run = &mut pending[target];
            if let Some(stack) = run.get_mut(&control) {
                if let Some(j) = stack.pop() {
                    alive[i] = false;
                    alive[j] = false;
                    removed += 1;
                    if stack.is_empty() {
                        run.remove(&control);
                    }
                    continue;
                }
            }
            run.entry(control).or_default().push(i);
        } else {
            for q in gate.qubits().iter() {
                pending[q].clear();
                for run in pending.iter_mut() {
                    run.remove(&q);
                }
            }
        }
    }
    if removed > 0 {
        compact(gates, tags, &alive);
    }
    removed
}

/// Applies `passes` in order, repeating the whole list until nothing
/// changes (each rule can expose work for the other).
pub fn run_pipeline(circuit: &Circuit, passes: &[PassKind]) -> (Circuit, PassReport) {
    let gates_before = circuit.len();
    let depth_before = circuit.parallel_depth(true);
    let mut current = circuit.clone();
    let mut cancellations: BTreeMap<PassKind, usize> = BTreeMap::new();
    let mut converged = passes.is_empty();
    for _ in 0..MAX_PASS_SWEEPS {
        let mut changed = false;
        for &pass in passes {
            let (next, removed) = match pass {
                PassKind::CancelAdjacent => cancel_adjacent_counted(&current),
                PassKind::CancelCommutingCnots => cancel_commuting_cnots_counted(&current),
            };
            if removed > 0 {
                *cancellations.entry(pass).or_default() += removed;
                changed = true;
            }
            current = next;
        }
        if !changed {
            converged = true;
            break;
        }
    }
    let report = PassReport {
        gates_before,
        gates_after: current.len(),
        depth_before,
        depth_after: current.parallel_depth(true),
        cancellations,
        converged,
    };
    (current, report)
}

/// Pauli-string footprint of a term used by the nesting rule.
struct TermInfo {
    term: FermionTerm,
    /// Operator sites (X/Y letters).
    ops: u64,
    /// String region (any Z letter across the expansion).
    zs: u64,
    /// Symplectic (x, z) masks per string, for pairwise commutation.
    strings: Vec<(u64, u64)>,
    magnitude: f64,
}

fn term_info(term: &FermionTerm, n_qubits: usize) -> TermInfo {
    assert!(n_qubits <= 64, "nesting masks hold at most 64 qubits");
    let mut ops = 0u64;
    let mut zs = 0u64;
    let mut strings = Vec::new();
    for s in jw_expand(term, n_qubits).expect("terms fit the register") {
        let mut xmask = 0u64;
        let mut zmask = 0u64;
        for (q, &l) in s.letters.iter().enumerate() {
            match l {
                crate::pauli::PauliLetter::I => {}
                crate::pauli::PauliLetter::X => xmask |= 1 << q,
                crate::pauli::PauliLetter::Y => {
                    xmask |= 1 << q;
                    zmask |= 1 << q;
                }
                crate::pauli::PauliLetter::Z => zmask |= 1 << q,
            }
        }
        ops |= xmask;
        zs |= zmask & !xmask;
        strings.push((xmask, zmask));
    }
    TermInfo {
        term: term.clone(),
        ops,
        zs,
        magnitude: libm::fabs(term.coefficient()),
        strings,
    }
}

fn infos_compatible(a: &TermInfo, b: &TermInfo) -> bool {
    if a.ops & b.ops != 0 {
        return false;
    }
    if (a.ops & b.zs).count_ones() % 2 != 0 || (b.ops & a.zs).count_ones() % 2 != 0 {
        return false;
    }
    // Pairwise string commutation keeps the packing reorder exact even
    // for the diagonal and number-operator-dressed kinds, whose string
    // regions vary between subterms.
    a.strings.iter().all(|&(xa, za)| {
        b.strings.iter().all(|&(xb, zb)| {
            ((xa & zb).count_ones() + (xb & za).count_ones()) % 2 == 0
        })
    })
}

/// Whether two terms may share a nesting layer.
pub fn nesting_compatible(a: &FermionTerm, b: &FermionTerm, n_qubits: usize) -> bool {
    infos_compatible(&term_info(a, n_qubits), &term_info(b, n_qubits))
}

/// Greedy first-fit packing of terms into concurrently executable
/// layers, visiting terms in the given (strategy) order. A term lands
/// in the layer right after the last one holding something it is
/// incompatible with, so it only ever moves past terms it commutes
/// with, which keeps the reordered product exactly equal to the
/// original one.
pub fn nest_schedule(terms: &[FermionTerm], n_qubits: usize) -> Vec<Vec<FermionTerm>> {
    let infos: Vec<TermInfo> = terms.iter().map(|t| term_info(t, n_qubits)).collect();
    let mut layers: Vec<Vec<usize>> = Vec::new();
    for idx in 0..infos.len() {
        let mut bound = 0;
        for (li, layer) in layers.iter().enumerate() {
            if layer
                .iter()
                .any(|&m| !infos_compatible(&infos[m], &infos[idx]))
            {
                bound = li + 1;
            }
        }
        if bound == layers.len() {
            layers.push(vec![idx]);
        } else {
            layers[bound].push(idx);
        }
    }
    layers
        .into_iter()
        .map(|layer| layer.into_iter().map(|i| infos[i].term.clone()).collect())
        .collect()
}

/// Flattens nesting layers into a schedule: layer-major order, parity
/// slot = position within the layer (round-robin across the pool).
pub fn schedule_from_layers(layers: &[Vec<FermionTerm>]) -> TermSchedule {
    let n_slots = layers.iter().map(Vec::len).max().unwrap_or(0).max(1);
    let entries = layers
        .iter()
        .flat_map(|layer| {
            layer.iter().enumerate().map(|(slot, term)| ScheduledTerm {
                term: term.clone(),
                slot,
            })
        })
        .collect();
    TermSchedule { entries, n_slots }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn circuit_with(gates: &[Gate]) -> Circuit {
        let mut c = Circuit::new(6, 1, true);
        for &g in gates {
            c.push(g);
        }
        c
    }

    fn cnot(control: usize, target: usize) -> Gate {
        Gate::Cnot { control, target }
    }

    #[test]
    fn adjacent_cancels_identical_cnot_pair() {
        let c = circuit_with(&[cnot(0, 1), cnot(0, 1)]);
        assert!(cancel_adjacent(&c).is_empty());
    }

    #[test]
    fn adjacent_skips_disjoint_intervening_gate() {
        let c = circuit_with(&[Gate::Had { q: 0 }, cnot(1, 2), Gate::Had { q: 0 }]);
        let out = cancel_adjacent(&c);
        assert_eq!(out.gates(), &[cnot(1, 2)]);
    }

    #[test]
    fn adjacent_leaves_non_pairs() {
        let c = circuit_with(&[cnot(0, 1), cnot(0, 2)]);
        assert_eq!(cancel_adjacent(&c).len(), 2);
        // Reversed roles do not cancel either.
        let c = circuit_with(&[cnot(0, 1), cnot(1, 0)]);
        assert_eq!(cancel_adjacent(&c).len(), 2);
    }

    #[test]
    fn adjacent_cancels_y_basis_pair_and_unordered_cz() {
        let c = circuit_with(&[
            Gate::YBasisDag { q: 2 },
            Gate::YBasis { q: 2 },
            Gate::Cz { control: 0, target: 3 },
            Gate::Cz { control: 3, target: 0 },
        ]);
        assert!(cancel_adjacent(&c).is_empty());
    }

    #[test]
    fn adjacent_telescopes_ladder_against_inverse() {
        // L = 0->1->2->3 followed by its mirror image collapses fully,
        // needing one sweep per nesting level.
        let c = circuit_with(&[
            cnot(0, 1),
            cnot(1, 2),
            cnot(2, 3),
            cnot(2, 3),
            cnot(1, 2),
            cnot(0, 1),
        ]);
        assert!(cancel_adjacent(&c).is_empty());
    }

    #[test]
    fn adjacent_blocked_by_rotation_on_shared_wire() {
        let c = circuit_with(&[
            cnot(0, 1),
            Gate::Crz { control: 6, target: 1, angle: 0.1 },
            cnot(0, 1),
        ]);
        assert_eq!(cancel_adjacent(&c).len(), 3);
    }

    #[test]
    fn commuting_cancels_reversed_source_sets() {
        let a = 6; // parity ancilla wire in this registry
        let c = circuit_with(&[cnot(1, a), cnot(2, a), cnot(2, a), cnot(1, a)]);
        assert!(cancel_commuting_cnots(&c).is_empty());
    }

    #[test]
    fn commuting_cancels_any_order_leaving_difference() {
        let a = 6;
        let c = circuit_with(&[
            cnot(1, a),
            cnot(2, a),
            cnot(3, a),
            cnot(3, a),
            cnot(2, a),
        ]);
        let out = cancel_commuting_cnots(&c);
        assert_eq!(out.gates(), &[cnot(1, a)]);
    }

    #[test]
    fn commuting_blocked_by_rotation_on_target() {
        let a = 6;
        let c = circuit_with(&[
            cnot(1, a),
            Gate::Crz { control: 7, target: a, angle: 0.2 },
            cnot(1, a),
        ]);
        assert_eq!(cancel_commuting_cnots(&c).len(), 3);
    }

    #[test]
    fn commuting_blocked_by_gate_on_source() {
        let a = 6;
        let c = circuit_with(&[cnot(1, a), Gate::Had { q: 1 }, cnot(1, a)]);
        assert_eq!(cancel_commuting_cnots(&c).len(), 3);
    }

    #[test]
    fn pipeline_empty_pass_list_is_identity() {
        let c = circuit_with(&[cnot(0, 1), cnot(0, 1)]);
        let (out, report) = run_pipeline(&c, &[]);
        assert_eq!(out.gates(), c.gates());
        assert_eq!(report.gates_before, report.gates_after);
        assert!(report.cancellations.is_empty());
        assert!(report.converged);
    }

    #[test]
    fn pipeline_reaches_fixed_point() {
        let c = circuit_with(&[cnot(0, 1), cnot(0, 1), Gate::Had { q: 2 }]);
        let (once, report) = run_pipeline(&c, &DEFAULT_PASSES);
        assert_eq!(report.cancellations[&PassKind::CancelAdjacent], 1);
        let (twice, report2) = run_pipeline(&once, &DEFAULT_PASSES);
        assert_eq!(once.gates(), twice.gates());
        assert!(report2.cancellations.is_empty());
    }

    #[test]
    fn nesting_spec_pairs() {
        // Hop 0..5 nests the hop 2..4 sitting inside its string.
        let h16 = FermionTerm::Pq { p: 0, q: 5, coefficient: 1.0 };
        let h35 = FermionTerm::Pq { p: 2, q: 4, coefficient: 0.5 };
        assert!(nesting_compatible(&h16, &h35, 6));

        // Double excitation (0,3|2,5) against the hop 1..4: the hop's
        // sites meet the string region twice.
        let h1436 = FermionTerm::Pqrs { p: 0, q: 3, r: 2, s: 5, coefficient: 1.0 };
        let h25 = FermionTerm::Pq { p: 1, q: 4, coefficient: 0.5 };
        assert!(nesting_compatible(&h1436, &h25, 6));

        // Crossing hops intersect oddly and stay sequential.
        let h13 = FermionTerm::Pq { p: 0, q: 2, coefficient: 1.0 };
        let h24 = FermionTerm::Pq { p: 1, q: 3, coefficient: 0.5 };
        assert!(!nesting_compatible(&h13, &h24, 4));
    }

    #[test]
    fn nesting_rejects_noncommuting_diagonal_overlap() {
        // The even-intersection count alone would admit this pair; the
        // commutation check keeps the density term out of the layer.
        let quartic = FermionTerm::Pqrs { p: 0, q: 1, r: 2, s: 3, coefficient: 1.0 };
        let density = FermionTerm::Pqqp { p: 0, q: 1, coefficient: 1.0 };
        assert!(!nesting_compatible(&quartic, &density, 4));
    }

    #[test]
    fn nesting_symmetry_on_samples() {
        let terms = [
            FermionTerm::Pq { p: 0, q: 5, coefficient: 1.0 },
            FermionTerm::Pq { p: 2, q: 4, coefficient: 0.5 },
            FermionTerm::Pqrs { p: 0, q: 3, r: 2, s: 5, coefficient: 0.3 },
            FermionTerm::Pp { p: 1, coefficient: 0.2 },
            FermionTerm::Pqqp { p: 2, q: 3, coefficient: 0.7 },
            FermionTerm::Pqqr { p: 0, q: 3, r: 5, coefficient: 0.4 },
        ];
        for a in &terms {
            for b in &terms {
                assert_eq!(
                    nesting_compatible(a, b, 6),
                    nesting_compatible(b, a, 6),
                    "{a:?} vs {b:?}"
                );
            }
        }
    }

    #[test]
    fn nest_schedule_packs_compatible_pair() {
        let h16 = FermionTerm::Pq { p: 0, q: 5, coefficient: 1.0 };
        let h35 = FermionTerm::Pq { p: 2, q: 4, coefficient: 0.5 };
        let layers = nest_schedule(&[h35.clone(), h16.clone()], 6);
        assert_eq!(layers.len(), 1);
        assert_eq!(layers[0].len(), 2);
        // Magnitude-descending greedy order puts the larger term first.
        assert_eq!(layers[0][0], h16);
        let schedule = schedule_from_layers(&layers);
        assert_eq!(schedule.n_slots, 2);
        assert_eq!(schedule.entries[0].slot, 0);
        assert_eq!(schedule.entries[1].slot, 1);
    }

    #[test]
    fn nest_schedule_keeps_incompatible_terms_apart() {
        let h13 = FermionTerm::Pq { p: 0, q: 2, coefficient: 1.0 };
        let h24 = FermionTerm::Pq { p: 1, q: 3, coefficient: 0.5 };
        let layers = nest_schedule(&[h13, h24], 4);
        assert_eq!(layers.len(), 2);
    }

    proptest! {
        #[test]
        fn prop_passes_never_grow_gate_count(ops in proptest::collection::vec((0u8..3, 0usize..5, 0usize..5), 1..80)) {
            let mut c = Circuit::new(5, 1, true);
            for (kind, a, b) in ops {
                let b = if a == b { (b + 1) % 6 } else { b };
                let g = match kind {
                    0 => Gate::Cnot { control: a, target: b },
                    1 => Gate::Had { q: a },
                    _ => Gate::Cz { control: a, target: b },
                };
                c.push(g);
            }
            let (out, report) = run_pipeline(&c, &DEFAULT_PASSES);
            prop_assert!(out.len() <= c.len());
            prop_assert_eq!(report.gates_before, c.len());
            prop_assert_eq!(report.gates_after, out.len());
            prop_assert!(report.converged);
        }
    }
}
