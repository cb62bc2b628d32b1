//! Compiler core for controlled Trotter-Suzuki evolution circuits of
//! second-quantized electronic-structure Hamiltonians.
//!
//! The crate is organized as a pipeline:
//!
//! * [`hamiltonian`] ingests one- and two-body integrals, classifies them
//!   into canonical fermionic terms and applies the finite-timestep
//!   coefficient correction.
//! * [`pauli`] expands fermionic terms into Pauli strings under the
//!   Jordan-Wigner encoding and enumerates subterms.
//! * [`circuit`] is the gate IR: typed gates over system qubits, a pool of
//!   parity ancillas and one phase-estimation ancilla, plus gate counting
//!   and the parallel-depth metric.
//! * [`synth`] emits per-term controlled-evolution circuits in three styles
//!   and handles qubit-layout permutations.
//! * [`optimizer`] runs cancellation passes and the nesting scheduler.
//! * [`trotter`] orders terms and assembles full first/second-order
//!   controlled Trotter steps.
//!
//! Everything here is `no_std` (with `alloc`); IO, file formats and the
//! exact simulator live in the companion `trotterc` crate.

#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod circuit;
pub mod hamiltonian;
pub mod optimizer;
pub mod pauli;
pub mod synth;
pub mod trotter;

pub use circuit::{Circuit, Gate, GateCounts, GateKind};
pub use hamiltonian::{EffectiveFrequencies, FermionTerm, SpinOrbitalIntegrals, TermKind};
pub use pauli::{PauliLetter, PauliString};
pub use synth::{QubitOrder, SubtermOrder, SynthOptions, SynthStyle};
pub use trotter::{CompiledStep, OrderStrategy, TrotterPlan, TsOrder};
