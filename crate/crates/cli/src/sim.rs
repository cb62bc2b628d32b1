//! Dense exact simulation: circuit unitaries, spectra, Trotter-error
//! measurement and the scaling experiments.
//!
//! The phase ancilla never becomes entangled in compiled circuits (it
//! only ever controls diagonal rotations), so instead of simulating it
//! the kernels substitute its basis value: rotations controlled by it
//! become plain rotations on the |1> branch and identity on the |0>
//! branch. Parity ancillas are simulated and must return to |0>.
//!
//! Eigenpairs of a step unitary come from the Cayley transform
//! `K = i (I - U)(I + U)^{-1}`, which is Hermitian for unitary `U`,
//! shares its eigenvectors, and maps the eigenphase `phi` to
//! `tan(phi / 2)`. That keeps everything inside the principal branch
//! `(-pi, pi)` by construction.

use nalgebra::{Complex, DMatrix, DVector, SymmetricEigen};
use trotterc_core::circuit::{Circuit, Gate};
use trotterc_core::hamiltonian::{FermionTerm, SpinOrbitalIntegrals};
use trotterc_core::pauli::{bit_mask, PauliLetter, PauliString, MAX_DENSE_QUBITS};
use trotterc_core::synth::emit_controlled_string_exp;
use trotterc_core::trotter::{CompiledStep, TsOrder};

pub type C64 = Complex<f64>;

const ONE: C64 = C64::new(1.0, 0.0);
const ZERO: C64 = C64::new(0.0, 0.0);
const FRAC_1_SQRT_2: f64 = core::f64::consts::FRAC_1_SQRT_2;

/// Ancillas must come back to |0> at least this cleanly.
const PARITY_RESIDUAL_TOL: f64 = 1e-9;

#[derive(Debug, thiserror::Error)]
pub enum SimError {
    #[error("dense simulation over {n_qubits} qubits exceeds the {limit}-qubit ceiling")]
    TooLarge { n_qubits: usize, limit: usize },
    #[error("gate {position} would entangle the phase ancilla; compiled circuits keep it classical")]
    NonClassicalPhase { position: usize },
    #[error("parity ancillas did not return to |0> (residual {residual:.3e})")]
    ParityNotRestored { residual: f64 },
    #[error("step unitary has an eigenphase at the branch cut; shift the Hamiltonian or shrink delta_t")]
    BranchCut,
    #[error("eigenphase spread {spread:.3} * delta_t exceeds the principal branch; set an energy shift")]
    BranchUnsafe { spread: f64 },
}

/// Column-major block of state vectors over the active (non-phase)
/// qubits.
struct StateBlock {
    dim: usize,
    data: Vec<C64>,
}

impl StateBlock {
    fn identity(dim: usize) -> Self {
        let mut data = vec![ZERO; dim * dim];
        for j in 0..dim {
            data[j * dim + j] = ONE;
        }
        Self { dim, data }
    }

    fn basis_columns(dim: usize, columns: &[usize]) -> Self {
        let mut data = vec![ZERO; dim * columns.len()];
        for (c, &j) in columns.iter().enumerate() {
            data[c * dim + j] = ONE;
        }
        Self { dim, data }
    }

    fn columns_mut(&mut self) -> impl Iterator<Item = &mut [C64]> {
        self.data.chunks_exact_mut(self.dim)
    }
}

fn apply_gate(
    block: &mut StateBlock,
    gate: &Gate,
    n_active: usize,
    phase_wire: Option<usize>,
    phase_set: bool,
    position: usize,
) -> Result<(), SimError> {
    let is_phase = |q: usize| Some(q) == phase_wire;
    let mask = |q: usize| bit_mask(q, n_active);
    match *gate {
        Gate::Cnot { control, target } => {
            if is_phase(target) {
                return Err(SimError::NonClassicalPhase { position });
            }
            if is_phase(control) {
                if phase_set {
                    for col in block.columns_mut() {
                        kernel_x(col, mask(target));
                    }
                }
            } else {
                for col in block.columns_mut() {
                    kernel_cnot(col, mask(control), mask(target));
                }
            }
        }
        Gate::Had { q } => {
            if is_phase(q) {
                return Err(SimError::NonClassicalPhase { position });
            }
            for col in block.columns_mut() {
                kernel_had(col, mask(q));
            }
        }
        Gate::YBasis { q } | Gate::YBasisDag { q } => {
            if is_phase(q) {
                return Err(SimError::NonClassicalPhase { position });
            }
            let dag = matches!(gate, Gate::YBasisDag { .. });
            for col in block.columns_mut() {
                kernel_ybasis(col, mask(q), dag);
            }
        }
        Gate::Cz { control, target } => match (is_phase(control), is_phase(target)) {
            (true, true) => return Err(SimError::NonClassicalPhase { position }),
            (true, false) | (false, true) => {
                // CZ is symmetric; the non-phase wire gets a plain Z on
                // the |1> branch.
                let q = if is_phase(control) { target } else { control };
                if phase_set {
                    for col in block.columns_mut() {
                        kernel_z(col, mask(q));
                    }
                }
            }
            (false, false) => {
                for col in block.columns_mut() {
                    kernel_cz(col, mask(control), mask(target));
                }
            }
        },
        Gate::Crz {
            control,
            target,
            angle,
        } => {
            if is_phase(target) {
                return Err(SimError::NonClassicalPhase { position });
            }
            if is_phase(control) {
                if phase_set {
                    for col in block.columns_mut() {
                        kernel_rz(col, mask(target), angle);
                    }
                }
            } else {
                for col in block.columns_mut() {
                    kernel_crz(col, mask(control), mask(target), angle);
                }
            }
        }
        Gate::Phase { q, angle } => {
            if is_phase(q) {
                if phase_set {
                    let factor = C64::new(0.0, angle).exp();
                    for v in block.data.iter_mut() {
                        *v *= factor;
                    }
                }
            } else {
                for col in block.columns_mut() {
                    kernel_phase(col, mask(q), angle);
                }
            }
        }
    }
    Ok(())
}

fn kernel_x(col: &mut [C64], m: usize) {
    for i in 0..col.len() {
        if i & m == 0 {
            col.swap(i, i | m);
        }
    }
}

fn kernel_cnot(col: &mut [C64], c: usize, t: usize) {
    for i in 0..col.len() {
        if i & c != 0 && i & t == 0 {
            col.swap(i, i | t);
        }
    }
}

fn kernel_z(col: &mut [C64], m: usize) {
    for (i, v) in col.iter_mut().enumerate() {
        if i & m != 0 {
            *v = -*v;
        }
    }
}

fn kernel_cz(col: &mut [C64], c: usize, t: usize) {
    for (i, v) in col.iter_mut().enumerate() {
        if i & c != 0 && i & t != 0 {
            *v = -*v;
        }
    }
}

fn kernel_had(col: &mut [C64], m: usize) {
    for i in 0..col.len() {
        if i & m == 0 {
            let (a, b) = (col[i], col[i | m]);
            col[i] = (a + b) * FRAC_1_SQRT_2;
            col[i | m] = (a - b) * FRAC_1_SQRT_2;
        }
    }
}

/// `Y = (1/sqrt2) [[1, i], [i, 1]]`, or its adjoint.
fn kernel_ybasis(col: &mut [C64], m: usize, dag: bool) {
    let i_unit = if dag { C64::new(0.0, -1.0) } else { C64::new(0.0, 1.0) };
    for i in 0..col.len() {
        if i & m == 0 {
            let (a, b) = (col[i], col[i | m]);
            col[i] = (a + i_unit * b) * FRAC_1_SQRT_2;
            col[i | m] = (i_unit * a + b) * FRAC_1_SQRT_2;
        }
    }
}

fn kernel_rz(col: &mut [C64], m: usize, angle: f64) {
    let minus = C64::new(0.0, -angle / 2.0).exp();
    let plus = C64::new(0.0, angle / 2.0).exp();
    for (i, v) in col.iter_mut().enumerate() {
        *v *= if i & m == 0 { minus } else { plus };
    }
}

fn kernel_crz(col: &mut [C64], c: usize, t: usize, angle: f64) {
    let minus = C64::new(0.0, -angle / 2.0).exp();
    let plus = C64::new(0.0, angle / 2.0).exp();
    for (i, v) in col.iter_mut().enumerate() {
        if i & c != 0 {
            *v *= if i & t == 0 { minus } else { plus };
        }
    }
}

fn kernel_phase(col: &mut [C64], m: usize, angle: f64) {
    let factor = C64::new(0.0, angle).exp();
    for (i, v) in col.iter_mut().enumerate() {
        if i & m != 0 {
            *v *= factor;
        }
    }
}

/// Unitary of the circuit on the system + parity space, with the phase
/// ancilla projected onto `phase_state`.
pub fn circuit_unitary(circuit: &Circuit, phase_state: u8) -> Result<DMatrix<C64>, SimError> {
    let n_active = circuit.n_system() + circuit.n_parity();
    if circuit.n_qubits() > MAX_DENSE_QUBITS {
        return Err(SimError::TooLarge {
            n_qubits: circuit.n_qubits(),
            limit: MAX_DENSE_QUBITS,
        });
    }
    let dim = 1usize << n_active;
    let mut block = StateBlock::identity(dim);
    run(&mut block, circuit, n_active, phase_state)?;
    Ok(DMatrix::from_vec(dim, dim, block.data))
}

fn run(
    block: &mut StateBlock,
    circuit: &Circuit,
    n_active: usize,
    phase_state: u8,
) -> Result<(), SimError> {
    let phase_wire = circuit.phase_qubit();
    for (position, gate) in circuit.gates().iter().enumerate() {
        apply_gate(block, gate, n_active, phase_wire, phase_state == 1, position)?;
    }
    Ok(())
}

/// The controlled evolution on the system qubits alone: phase ancilla at
/// |1>, parity ancillas in and out at |0>. Errors out if the ancillas do
/// not disentangle.
pub fn controlled_system_unitary(circuit: &Circuit) -> Result<DMatrix<C64>, SimError> {
    let n_sys = circuit.n_system();
    let n_anc = circuit.n_parity();
    if circuit.n_qubits() > MAX_DENSE_QUBITS {
        return Err(SimError::TooLarge {
            n_qubits: circuit.n_qubits(),
            limit: MAX_DENSE_QUBITS,
        });
    }
    let dim_sys = 1usize << n_sys;
    let dim = 1usize << (n_sys + n_anc);
    let columns: Vec<usize> = (0..dim_sys).map(|j| j << n_anc).collect();
    let mut block = StateBlock::basis_columns(dim, &columns);
    run(&mut block, circuit, n_sys + n_anc, 1)?;

    let mut out = DMatrix::zeros(dim_sys, dim_sys);
    let mut residual: f64 = 0.0;
    for (c, col) in block.data.chunks_exact(dim).enumerate() {
        for (i, &v) in col.iter().enumerate() {
            if i & ((1 << n_anc) - 1) == 0 {
                out[(i >> n_anc, c)] = v;
            } else {
                residual = residual.max(v.norm());
            }
        }
    }
    if residual > PARITY_RESIDUAL_TOL {
        return Err(SimError::ParityNotRestored { residual });
    }
    Ok(out)
}

/// Max-norm distance between two matrices.
pub fn max_abs_diff(a: &DMatrix<C64>, b: &DMatrix<C64>) -> f64 {
    (a - b).iter().map(|v| v.norm()).fold(0.0, f64::max)
}

/// Frobenius distance.
pub fn frobenius_distance(a: &DMatrix<C64>, b: &DMatrix<C64>) -> f64 {
    (a - b).norm()
}

/// `max_k |U e_k - lambda_k e_k|`-style unitarity defect `|U+ U - I|`.
pub fn unitarity_defect(u: &DMatrix<C64>) -> f64 {
    let n = u.nrows();
    frobenius_distance(&(u.adjoint() * u), &DMatrix::identity(n, n))
}

/// Dense real symmetric matrix of a term (sum of its Jordan-Wigner
/// strings); real because every string carries an even Y count.
pub fn term_matrix(term: &FermionTerm, n_qubits: usize) -> DMatrix<f64> {
    let dim = 1usize << n_qubits;
    let mut h = DMatrix::zeros(dim, dim);
    for s in trotterc_core::pauli::jw_expand(term, n_qubits).expect("term fits register") {
        add_string_real(&mut h, &s);
    }
    h
}

fn add_string_real(h: &mut DMatrix<f64>, s: &PauliString) {
    let n = s.n_qubits();
    let dim = 1usize << n;
    let mut flips = 0usize;
    for (q, &l) in s.letters.iter().enumerate() {
        if matches!(l, PauliLetter::X | PauliLetter::Y) {
            flips |= bit_mask(q, n);
        }
    }
    for col in 0..dim {
        let mut phase = C64::new(s.coefficient, 0.0);
        for (q, &l) in s.letters.iter().enumerate() {
            let b = col & bit_mask(q, n) != 0;
            match l {
                PauliLetter::I | PauliLetter::X => {}
                PauliLetter::Y => {
                    phase *= if b { C64::new(0.0, -1.0) } else { C64::new(0.0, 1.0) }
                }
                PauliLetter::Z => {
                    if b {
                        phase = -phase;
                    }
                }
            }
        }
        debug_assert!(phase.im.abs() < 1e-12);
        h[(col ^ flips, col)] += phase.re;
    }
}

/// `exp(i * theta * H)` for real symmetric `H`.
pub fn exp_i_real_symmetric(h: &DMatrix<f64>, theta: f64) -> DMatrix<C64> {
    let se = SymmetricEigen::new(h.clone());
    let dim = h.nrows();
    let v = se.eigenvectors.map(|x| C64::new(x, 0.0));
    let mut d = DMatrix::zeros(dim, dim);
    for k in 0..dim {
        d[(k, k)] = C64::new(0.0, theta * se.eigenvalues[k]).exp();
    }
    &v * d * v.adjoint()
}

/// The step unitary a compiled circuit is supposed to implement: the
/// ordered product of per-term exponentials over the mapped terms, with
/// the second-order form mirroring the emitted half-angle sweeps.
pub fn evolution_oracle(
    mapped_terms: &[FermionTerm],
    n_qubits: usize,
    delta_t: f64,
    ts_order: TsOrder,
) -> DMatrix<C64> {
    let dim = 1usize << n_qubits;
    let mut acc: DMatrix<C64> = DMatrix::identity(dim, dim);
    let mut step = |term: &FermionTerm, dt: f64| {
        let e = exp_i_real_symmetric(&term_matrix(term, n_qubits), dt);
        acc = &e * &acc;
    };
    match ts_order {
        TsOrder::First => {
            for term in mapped_terms {
                step(term, delta_t);
            }
        }
        TsOrder::Second => {
            for term in mapped_terms {
                step(term, delta_t / 2.0);
            }
            for term in mapped_terms.iter().rev() {
                step(term, delta_t / 2.0);
            }
        }
    }
    acc
}

/// Mapped terms of a compiled step in emitted order, i.e. the operators
/// [`evolution_oracle`] should exponentiate to reproduce its circuit.
pub fn emitted_terms(step: &CompiledStep) -> Vec<FermionTerm> {
    step.schedule
        .terms()
        .map(|t| {
            trotterc_core::synth::mapped_term(t, step.options.qubit_order, step.circuit.n_system())
        })
        .collect()
}

/// Eigenphases (in `(-pi, pi)`) and eigenvectors of a unitary matrix,
/// via the Cayley transform.
pub fn unitary_eigensystem(u: &DMatrix<C64>) -> Result<(Vec<f64>, DMatrix<C64>), SimError> {
    let n = u.nrows();
    let id: DMatrix<C64> = DMatrix::identity(n, n);
    let a = &id + u;
    let inv = a.lu().try_inverse().ok_or(SimError::BranchCut)?;
    let mut k = (&id - u) * inv * C64::new(0.0, 1.0);
    // Clean floating-point skew before the Hermitian eigensolver.
    let kh = k.adjoint();
    k = (&k + kh) * C64::new(0.5, 0.0);
    let se = SymmetricEigen::new(k);
    let phases: Vec<f64> = se.eigenvalues.iter().map(|&h| 2.0 * h.atan()).collect();
    Ok((phases, se.eigenvectors))
}

/// Exact spectrum of the Hamiltonian over the full Fock space.
#[derive(Debug, Clone)]
pub struct Spectrum {
    /// All eigenvalues ascending, shifted by the core energy.
    pub eigenvalues: Vec<f64>,
    pub ground_energy: f64,
    pub ground_vector: DVector<f64>,
    /// Gap below 1e-10: eigenphase matching is unreliable.
    pub degenerate: bool,
}

/// Dense diagonalization of the full Hamiltonian.
pub fn exact_spectrum(integrals: &SpinOrbitalIntegrals) -> Result<Spectrum, SimError> {
    let n = integrals.n_orbitals();
    if n > 12 {
        return Err(SimError::TooLarge {
            n_qubits: n,
            limit: 12,
        });
    }
    let dim = 1usize << n;
    let mut h = DMatrix::zeros(dim, dim);
    for term in integrals.classify_terms(0.0) {
        for s in trotterc_core::pauli::jw_expand(&term, n).expect("classified terms are canonical") {
            add_string_real(&mut h, &s);
        }
    }
    let se = SymmetricEigen::new(h);
    let mut order: Vec<usize> = (0..dim).collect();
    order.sort_by(|&a, &b| se.eigenvalues[a].total_cmp(&se.eigenvalues[b]));
    let eigenvalues: Vec<f64> = order
        .iter()
        .map(|&k| se.eigenvalues[k] + integrals.core_energy())
        .collect();
    let ground_vector = se.eigenvectors.column(order[0]).into_owned();
    let degenerate = dim > 1 && (eigenvalues[1] - eigenvalues[0]).abs() < 1e-10;
    Ok(Spectrum {
        ground_energy: eigenvalues[0],
        eigenvalues,
        ground_vector,
        degenerate,
    })
}

/// Ground-energy readout of one compiled step.
#[derive(Debug, Clone, serde::Serialize, serde::Deserialize)]
pub struct SpectralResult {
    pub exact_ground_energy: f64,
    pub trotter_energy: f64,
    pub error: f64,
    /// Fidelity |<v|psi0>|^2 of the matched eigenvector.
    pub overlap: f64,
    /// Set when the best overlap is at most 1/2; the energy is then not
    /// trustworthy and downstream reporting must not use it silently.
    pub ambiguous: bool,
}

/// Checks that all eigenphases stay inside the principal branch for the
/// given step.
pub fn branch_safe(spectrum: &Spectrum, core_energy: f64, energy_shift: f64, delta_t: f64) -> Result<(), SimError> {
    let spread = spectrum
        .eigenvalues
        .iter()
        .map(|e| (e - core_energy - energy_shift).abs())
        .fold(0.0, f64::max);
    if spread * delta_t >= core::f64::consts::PI * 0.98 {
        Err(SimError::BranchUnsafe { spread })
    } else {
        Ok(())
    }
}

/// Diagonalizes the controlled step unitary, matches the eigenvector of
/// largest overlap with the exact ground state, and converts its
/// eigenphase back into an energy.
pub fn trotter_ground_energy(
    step: &CompiledStep,
    spectrum: &Spectrum,
    core_energy: f64,
) -> Result<SpectralResult, SimError> {
    let u = controlled_system_unitary(&step.circuit)?;
    let (phases, vectors) = unitary_eigensystem(&u)?;
    let reference = spectrum.ground_vector.map(|x| C64::new(x, 0.0));
    let mut best = (0usize, -1.0f64);
    for k in 0..phases.len() {
        let overlap = vectors.column(k).dotc(&reference).norm_sqr();
        if overlap > best.1 {
            best = (k, overlap);
        }
    }
    let (k, overlap) = best;
    let trotter_energy = phases[k] / step.delta_t + step.energy_shift + core_energy;
    Ok(SpectralResult {
        exact_ground_energy: spectrum.ground_energy,
        trotter_energy,
        error: (trotter_energy - spectrum.ground_energy).abs(),
        overlap,
        ambiguous: overlap <= 0.5,
    })
}

/// `Delta = i sum_{j<k} [H_j, H_k] * dt / 2` for the given term order;
/// the leading correction the first-order split evolves under.
pub fn delta_operator(terms: &[FermionTerm], n_qubits: usize, delta_t: f64) -> DMatrix<C64> {
    let dim = 1usize << n_qubits;
    let mats: Vec<DMatrix<f64>> = terms.iter().map(|t| term_matrix(t, n_qubits)).collect();
    let mut acc: DMatrix<f64> = DMatrix::zeros(dim, dim);
    for j in 0..mats.len() {
        for k in (j + 1)..mats.len() {
            acc += &mats[j] * &mats[k] - &mats[k] * &mats[j];
        }
    }
    // The commutator sum is real antisymmetric; times i it is Hermitian
    // and purely imaginary.
    acc.map(|x| C64::new(0.0, x * delta_t / 2.0))
}

/// Controlled first-order step circuit for a raw Pauli-term Hamiltonian
/// (the appendix-style single-qubit experiments).
pub fn pauli_step_circuit(strings: &[PauliString], delta_t: f64) -> Circuit {
    let n = strings.first().map_or(1, PauliString::n_qubits);
    let mut circuit = Circuit::new(n, 0, true);
    for s in strings {
        emit_controlled_string_exp(&mut circuit, s, delta_t);
    }
    circuit
}

/// Log-log least-squares fit of an error-vs-n series.
#[derive(Debug, Clone, serde::Serialize, serde::Deserialize)]
pub struct ScalingFit {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
    /// Points dropped for nonpositive error.
    pub excluded: usize,
}

#[derive(Debug, thiserror::Error)]
pub enum FitError {
    #[error("scaling fit needs at least 3 usable points, got {kept}")]
    TooFewPoints { kept: usize },
}

/// Fits `log10(error) = intercept + slope * log10(n)`, excluding
/// nonpositive errors.
pub fn error_scaling_fit(points: &[(f64, f64)]) -> Result<ScalingFit, FitError> {
    let usable: Vec<(f64, f64)> = points
        .iter()
        .filter(|&&(_, err)| err > 0.0)
        .map(|&(n, err)| (n.log10(), err.log10()))
        .collect();
    let excluded = points.len() - usable.len();
    if usable.len() < 3 {
        return Err(FitError::TooFewPoints { kept: usable.len() });
    }
    let (slope, intercept, r_squared) = linear_fit(&usable);
    Ok(ScalingFit {
        slope,
        intercept,
        r_squared,
        excluded,
    })
}

/// Ordinary least squares `y = intercept + slope * x`; returns
/// `(slope, intercept, r^2)`.
pub fn linear_fit(points: &[(f64, f64)]) -> (f64, f64, f64) {
    let n = points.len() as f64;
    let sx: f64 = points.iter().map(|p| p.0).sum();
    let sy: f64 = points.iter().map(|p| p.1).sum();
    let (mx, my) = (sx / n, sy / n);
    let sxx: f64 = points.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss_res: f64 = points
        .iter()
        .map(|p| {
            let e = p.1 - (intercept + slope * p.0);
            e * e
        })
        .sum();
    let ss_tot: f64 = points.iter().map(|p| (p.1 - my) * (p.1 - my)).sum();
    let r_squared = if ss_tot == 0.0 { 1.0 } else { 1.0 - ss_res / ss_tot };
    (slope, intercept, r_squared)
}

/// One point of an error-scaling experiment.
#[derive(Debug, Clone, serde::Serialize, serde::Deserialize)]
pub struct ScalingPoint {
    pub n: usize,
    pub error: f64,
}

/// The four-term single-qubit sequence X, Z, -X, -Z whose exact sum
/// vanishes. Its maximally degenerate ground state breaks the usual
/// first-order error cancellation, so the measured slope is -1 instead
/// of -2.
pub fn counterexample_scaling(
    n_values: &[usize],
    total_time: f64,
) -> Result<(Vec<ScalingPoint>, ScalingFit), SimError> {
    use PauliLetter::{X, Z};
    let strings: Vec<PauliString> = [(X, 1.0), (Z, 1.0), (X, -1.0), (Z, -1.0)]
        .into_iter()
        .map(|(l, coefficient)| PauliString {
            letters: vec![l],
            coefficient,
        })
        .collect();
    let mut points = Vec::new();
    for &n in n_values {
        let dt = total_time / n as f64;
        let circuit = pauli_step_circuit(&strings, dt);
        let u = controlled_system_unitary(&circuit)?;
        let (phases, _) = unitary_eigensystem(&u)?;
        // H = 0 exactly, so every eigenphase is pure Trotter error; take
        // the one closest to the true energy 0.
        let error = phases
            .iter()
            .map(|p| (p / dt).abs())
            .fold(f64::INFINITY, f64::min);
        points.push(ScalingPoint { n, error });
    }
    let fit = error_scaling_fit(
        &points
            .iter()
            .map(|p| (p.n as f64, p.error))
            .collect::<Vec<_>>(),
    )
    .map_err(|_| SimError::BranchCut)?;
    Ok((points, fit))
}
