//! Second-quantized Hamiltonian data: integral tensors, term
//! classification, Hartree-Fock diagnostics and the corrected-Hamiltonian
//! transformation.
//!
//! The Hamiltonian is
//!
//! ```text
//! H = sum_pq t_pq c+_p c_q  +  1/2 sum_pqrs V_pqrs c+_p c+_q c_r c_s
//! ```
//!
//! over `N` spin orbitals, one qubit per orbital. Every nonzero entry is
//! classified into one of five canonical Hermitian term shapes (see
//! [`FermionTerm`]); index permutations that reach the same canonical term
//! are merged with the fermionic signs picked up along the way.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

/// Default pruning threshold for merged term coefficients, in Hartree.
pub const DEFAULT_PRUNE_THRESHOLD: f64 = 1e-12;

/// Switch-over point below which `f_correction` uses its Taylor series.
const F_SERIES_CUTOFF: f64 = 1e-4;

/// One- and two-body integrals over `N` spin orbitals.
///
/// `t` is dense and kept symmetric by construction (`set_t` writes both
/// entries). `v` is a sparse map keyed by `(p, q, r, s)`; hermiticity of
/// the induced operator is the caller's responsibility and is checked by
/// the matrix oracle in tests rather than enforced here.
#[derive(Debug, Clone, PartialEq)]
pub struct SpinOrbitalIntegrals {
    n_orbitals: usize,
    t: Vec<f64>,
    v: BTreeMap<[usize; 4], f64>,
    occupation: Option<Vec<u8>>,
    core_energy: f64,
}

impl SpinOrbitalIntegrals {
    pub fn new(n_orbitals: usize) -> Self {
        Self {
            n_orbitals,
            t: vec![0.0; n_orbitals * n_orbitals],
            v: BTreeMap::new(),
            occupation: None,
            core_energy: 0.0,
        }
    }

    pub fn n_orbitals(&self) -> usize {
        self.n_orbitals
    }

    pub fn t(&self, p: usize, q: usize) -> f64 {
        self.t[p * self.n_orbitals + q]
    }

    /// Sets `t_pq` and `t_qp` at once; the one-body tensor of a real
    /// Hamiltonian is symmetric, so asymmetric states are unrepresentable.
    pub fn set_t(&mut self, p: usize, q: usize, value: f64) -> Result<(), IntegralsError> {
        self.check_index(p)?;
        self.check_index(q)?;
        self.t[p * self.n_orbitals + q] = value;
        self.t[q * self.n_orbitals + p] = value;
        Ok(())
    }

    pub fn v(&self, key: [usize; 4]) -> f64 {
        self.v.get(&key).copied().unwrap_or(0.0)
    }

    pub fn set_v(&mut self, key: [usize; 4], value: f64) -> Result<(), IntegralsError> {
        for &i in &key {
            self.check_index(i)?;
        }
        if value == 0.0 {
            self.v.remove(&key);
        } else {
            self.v.insert(key, value);
        }
        Ok(())
    }

    /// Adds onto an existing `v` entry (duplicate input lines sum).
    pub fn add_v(&mut self, key: [usize; 4], value: f64) -> Result<(), IntegralsError> {
        let current = self.v(key);
        self.set_v(key, current + value)
    }

    /// Iterates stored two-body entries in key order.
    pub fn v_entries(&self) -> impl Iterator<Item = ([usize; 4], f64)> + '_ {
        self.v.iter().map(|(k, &val)| (*k, val))
    }

    pub fn occupation(&self) -> Option<&[u8]> {
        self.occupation.as_deref()
    }

    pub fn set_occupation(&mut self, occ: Vec<u8>) -> Result<(), IntegralsError> {
        if occ.len() != self.n_orbitals {
            return Err(IntegralsError::OccupationLength {
                expected: self.n_orbitals,
                got: occ.len(),
            });
        }
        if let Some(&bad) = occ.iter().find(|&&n| n > 1) {
            return Err(IntegralsError::OccupationValue(bad));
        }
        self.occupation = Some(occ);
        Ok(())
    }

    /// Constant energy offset carried alongside the tensors (the scalar
    /// entry of an integral file). Not part of any term; reporting code
    /// adds it back onto energies.
    pub fn core_energy(&self) -> f64 {
        self.core_energy
    }

    pub fn set_core_energy(&mut self, e: f64) {
        self.core_energy = e;
    }

    fn check_index(&self, i: usize) -> Result<(), IntegralsError> {
        if i >= self.n_orbitals {
            Err(IntegralsError::IndexOutOfRange {
                index: i,
                n_orbitals: self.n_orbitals,
            })
        } else {
            Ok(())
        }
    }

    /// Classifies every entry into canonical terms, merging index
    /// permutations with their fermionic signs and dropping merged
    /// coefficients with `|c| <= threshold`.
    ///
    /// Output is sorted by `(kind, indices)` and therefore deterministic.
    pub fn classify_terms(&self, threshold: f64) -> Vec<FermionTerm> {
        classify_terms(self, threshold)
    }

    /// Residual of the Hartree-Fock stationarity rule
    /// `t_pq + kappa * sum_r V_prrq n_r = 0` for `p != q`.
    ///
    /// `kappa` selects the normalization convention (`0.5` matches the
    /// 1/2 prefactor of the two-body sum; `1.0` is the unweighted form).
    /// Returns a dense row-major `N x N` array with zero diagonal.
    pub fn hf_sum_rule_residual(&self, kappa: f64) -> Result<Vec<f64>, IntegralsError> {
        let occ = self
            .occupation
            .as_ref()
            .ok_or(IntegralsError::MissingOccupation)?;
        let n = self.n_orbitals;
        let mut residual = vec![0.0; n * n];
        for p in 0..n {
            for q in 0..n {
                if p == q {
                    continue;
                }
                let mut acc = self.t(p, q);
                for (r, &n_r) in occ.iter().enumerate() {
                    if n_r == 1 {
                        acc += kappa * self.v([p, r, r, q]);
                    }
                }
                residual[p * n + q] = acc;
            }
        }
        Ok(residual)
    }

    /// Effective diagonal frequencies `omega_p = t_pp + 1/2 sum_q V_pqqp`.
    pub fn effective_frequencies(&self) -> EffectiveFrequencies {
        let n = self.n_orbitals;
        let mut omega = vec![0.0; n];
        for (p, w) in omega.iter_mut().enumerate() {
            *w = self.t(p, p);
        }
        for (&[p, q, r, s], &value) in &self.v {
            if q == r && s == p {
                omega[p] += 0.5 * value;
            }
        }
        EffectiveFrequencies { omega }
    }

    /// Rescales off-diagonal entries by `f(delta_t * delta_omega)` to
    /// compensate the finite-timestep perturbative energy shift:
    ///
    /// * `t_pq  <- t_pq  * f(dt * (w_p - w_q))`
    /// * `V_pqrs <- V_pqrs * f(dt * (w_p + w_q - w_r - w_s))`
    ///
    /// Diagonal entries see a zero frequency difference and are unchanged
    /// (`f(0) = 1`). `f` is even, so the symmetry of `t` and hermiticity
    /// of the induced operator are preserved.
    pub fn apply_diagonal_fix(&self, delta_t: f64) -> Result<Self, IntegralsError> {
        let EffectiveFrequencies { omega } = self.effective_frequencies();
        let n = self.n_orbitals;
        let mut out = self.clone();
        for p in 0..n {
            for q in (p + 1)..n {
                let x = delta_t * (omega[p] - omega[q]);
                let scale = f_correction(x).map_err(|_| IntegralsError::FixOutOfDomain {
                    entry: [p, q, 0, 0],
                    argument: x,
                })?;
                let scaled = self.t(p, q) * scale;
                out.t[p * n + q] = scaled;
                out.t[q * n + p] = scaled;
            }
        }
        for (&key, &value) in &self.v {
            let [p, q, r, s] = key;
            let x = delta_t * (omega[p] + omega[q] - omega[r] - omega[s]);
            let scale = f_correction(x).map_err(|_| IntegralsError::FixOutOfDomain {
                entry: key,
                argument: x,
            })?;
            out.v.insert(key, value * scale);
        }
        Ok(out)
    }
}

/// The effective diagonal frequencies `omega_p`, in Hartree.
#[derive(Debug, Clone, PartialEq)]
pub struct EffectiveFrequencies {
    pub omega: Vec<f64>,
}

/// Timestep-correction factor `f(x) = sqrt(2 (1 - cos x) / (x sin x))`,
/// with `f(0) = 1` and a series branch near zero for stability.
///
/// The closed form is valid on `(-pi, pi)`; outside, `sin x` changes sign
/// and the expression is singular, so the domain is rejected. On the
/// domain `f` is even, `>= 1`, and increases away from zero.
pub fn f_correction(x: f64) -> Result<f64, FDomainError> {
    if !(libm::fabs(x) < core::f64::consts::PI) {
        return Err(FDomainError { x });
    }
    if libm::fabs(x) < F_SERIES_CUTOFF {
        let x2 = x * x;
        Ok(1.0 + x2 / 24.0 + 7.0 * x2 * x2 / 5760.0)
    } else {
        Ok(libm::sqrt(2.0 * (1.0 - libm::cos(x)) / (x * libm::sin(x))))
    }
}

/// Argument outside `(-pi, pi)` passed to [`f_correction`].
#[derive(Debug, Clone, PartialEq)]
pub struct FDomainError {
    pub x: f64,
}

impl fmt::Display for FDomainError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "timestep correction argument {} outside (-pi, pi)",
            self.x
        )
    }
}

impl core::error::Error for FDomainError {}

#[derive(Debug, Clone, PartialEq)]
pub enum IntegralsError {
    IndexOutOfRange { index: usize, n_orbitals: usize },
    OccupationLength { expected: usize, got: usize },
    OccupationValue(u8),
    MissingOccupation,
    FixOutOfDomain { entry: [usize; 4], argument: f64 },
}

impl fmt::Display for IntegralsError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::IndexOutOfRange { index, n_orbitals } => {
                write!(f, "orbital index {index} out of range for N={n_orbitals}")
            }
            Self::OccupationLength { expected, got } => {
                write!(f, "occupation vector length {got}, expected {expected}")
            }
            Self::OccupationValue(v) => write!(f, "occupation entries must be 0 or 1, got {v}"),
            Self::MissingOccupation => write!(f, "operation requires an occupation vector"),
            Self::FixOutOfDomain { entry, argument } => write!(
                f,
                "diagonal fix argument {argument} for entry {entry:?} outside (-pi, pi); reduce delta_t"
            ),
        }
    }
}

impl core::error::Error for IntegralsError {}

/// Which of the five canonical term shapes a [`FermionTerm`] is.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum TermKind {
    PP,
    PQ,
    PQQP,
    PQQR,
    PQRS,
}

impl fmt::Display for TermKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Self::PP => "PP",
            Self::PQ => "PQ",
            Self::PQQP => "PQQP",
            Self::PQQR => "PQQR",
            Self::PQRS => "PQRS",
        };
        f.write_str(s)
    }
}

/// One classified Hermitian term of the Hamiltonian, with canonical
/// indices. Coefficients are in Hartree and include the 1/2 prefactor of
/// the two-body sum where applicable.
///
/// The operator each variant stands for (`n_p = c+_p c_p`):
///
/// * `Pp`:   `c * n_p`
/// * `Pq`:   `c * (c+_p c_q + c+_q c_p)`, `p < q`
/// * `Pqqp`: `c * n_p n_q`, `p < q`
/// * `Pqqr`: `c * (c+_p c_r + c+_r c_p) n_q`, `p < r`, `q` distinct
/// * `Pqrs`: `c * (c+_p c+_q c_r c_s + c+_r c+_s c_p c_q)`,
///   `p < q`, `r < s`, `(p, q) < (r, s)`, all distinct
#[derive(Debug, Clone, PartialEq)]
pub enum FermionTerm {
    Pp { p: usize, coefficient: f64 },
    Pq { p: usize, q: usize, coefficient: f64 },
    Pqqp { p: usize, q: usize, coefficient: f64 },
    Pqqr { p: usize, q: usize, r: usize, coefficient: f64 },
    Pqrs { p: usize, q: usize, r: usize, s: usize, coefficient: f64 },
}

impl FermionTerm {
    pub fn kind(&self) -> TermKind {
        match self {
            Self::Pp { .. } => TermKind::PP,
            Self::Pq { .. } => TermKind::PQ,
            Self::Pqqp { .. } => TermKind::PQQP,
            Self::Pqqr { .. } => TermKind::PQQR,
            Self::Pqrs { .. } => TermKind::PQRS,
        }
    }

    pub fn coefficient(&self) -> f64 {
        match *self {
            Self::Pp { coefficient, .. }
            | Self::Pq { coefficient, .. }
            | Self::Pqqp { coefficient, .. }
            | Self::Pqqr { coefficient, .. }
            | Self::Pqrs { coefficient, .. } => coefficient,
        }
    }

    pub fn with_coefficient(&self, coefficient: f64) -> Self {
        let mut out = self.clone();
        match &mut out {
            Self::Pp { coefficient: c, .. }
            | Self::Pq { coefficient: c, .. }
            | Self::Pqqp { coefficient: c, .. }
            | Self::Pqqr { coefficient: c, .. }
            | Self::Pqrs { coefficient: c, .. } => *c = coefficient,
        }
        out
    }

    /// The orbital indices in stored order.
    pub fn indices(&self) -> Vec<usize> {
        match *self {
            Self::Pp { p, .. } => vec![p],
            Self::Pq { p, q, .. } | Self::Pqqp { p, q, .. } => vec![p, q],
            Self::Pqqr { p, q, r, .. } => vec![p, q, r],
            Self::Pqrs { p, q, r, s, .. } => vec![p, q, r, s],
        }
    }

    /// Largest index referenced.
    pub fn max_index(&self) -> usize {
        self.indices().into_iter().max().expect("nonempty")
    }

    /// Relabels orbital indices through `perm` (mode `m` becomes
    /// `perm[m]`) and re-canonicalizes, folding fermionic reordering
    /// signs into the coefficient.
    pub fn relabel(&self, perm: &[usize]) -> Self {
        match *self {
            Self::Pp { p, coefficient } => Self::Pp {
                p: perm[p],
                coefficient,
            },
            Self::Pq { p, q, coefficient } => {
                let (a, b) = sort2(perm[p], perm[q]);
                // c+_a c_b + h.c. is symmetric under relabeling.
                Self::Pq {
                    p: a,
                    q: b,
                    coefficient,
                }
            }
            Self::Pqqp { p, q, coefficient } => {
                let (a, b) = sort2(perm[p], perm[q]);
                Self::Pqqp {
                    p: a,
                    q: b,
                    coefficient,
                }
            }
            Self::Pqqr { p, q, r, coefficient } => {
                let (a, b) = sort2(perm[p], perm[r]);
                Self::Pqqr {
                    p: a,
                    q: perm[q],
                    r: b,
                    coefficient,
                }
            }
            Self::Pqrs {
                p,
                q,
                r,
                s,
                coefficient,
            } => {
                let (c1, c2, s1) = sort2_signed(perm[p], perm[q]);
                let (a1, a2, s2) = sort2_signed(perm[r], perm[s]);
                let coefficient = coefficient * s1 * s2;
                // The Hermitian pair is symmetric under swapping the
                // creation pair with the annihilation pair.
                if (c1, c2) <= (a1, a2) {
                    Self::Pqrs {
                        p: c1,
                        q: c2,
                        r: a1,
                        s: a2,
                        coefficient,
                    }
                } else {
                    Self::Pqrs {
                        p: a1,
                        q: a2,
                        r: c1,
                        s: c2,
                        coefficient,
                    }
                }
            }
        }
    }

    /// Sort key: `(kind, indices)`.
    fn sort_key(&self) -> (TermKind, Vec<usize>) {
        (self.kind(), self.indices())
    }
}

fn sort2(a: usize, b: usize) -> (usize, usize) {
    if a <= b {
        (a, b)
    } else {
        (b, a)
    }
}

fn sort2_signed(a: usize, b: usize) -> (usize, usize, f64) {
    if a < b {
        (a, b, 1.0)
    } else {
        (b, a, -1.0)
    }
}

/// Accumulator key identifying one canonical term.
#[derive(PartialEq, Eq, PartialOrd, Ord)]
enum TermKey {
    Pp(usize),
    Pq(usize, usize),
    Pqqp(usize, usize),
    Pqqr(usize, usize, usize),
    Pqrs(usize, usize, usize, usize),
}

/// Split accumulation for terms of the form `w * (Op + Op^dagger)`:
/// contributions landing on `Op` and on `Op^dagger` are tracked apart and
/// averaged at the end, so a Hermitian input tensor yields exactly the
/// printed coefficients while a lopsided one is hermitized.
#[derive(Default, Clone, Copy)]
struct SplitCoeff {
    forward: f64,
    backward: f64,
}

fn classify_terms(integrals: &SpinOrbitalIntegrals, threshold: f64) -> Vec<FermionTerm> {
    let n = integrals.n_orbitals;
    let mut diag: BTreeMap<TermKey, f64> = BTreeMap::new();
    let mut split: BTreeMap<TermKey, SplitCoeff> = BTreeMap::new();

    for p in 0..n {
        let tpp = integrals.t(p, p);
        if tpp != 0.0 {
            *diag.entry(TermKey::Pp(p)).or_default() += tpp;
        }
        for q in (p + 1)..n {
            let tpq = integrals.t(p, q);
            let tqp = integrals.t(q, p);
            if tpq != 0.0 || tqp != 0.0 {
                let e = split.entry(TermKey::Pq(p, q)).or_default();
                e.forward += tpq;
                e.backward += tqp;
            }
        }
    }

    for (&[p, q, r, s], &value) in &integrals.v {
        // c+_p c+_q c_r c_s, weight value / 2 from the two-body prefactor.
        if p == q || r == s {
            continue; // c+c+ or cc on one orbital vanishes
        }
        let half = 0.5 * value;
        let (c1, c2, s1) = sort2_signed(p, q);
        let (a1, a2, s2) = sort2_signed(r, s);
        let sign = s1 * s2;
        let cre = [c1, c2];
        let ann = [a1, a2];
        if cre == ann {
            // Sorted form c+_x c+_y c_x c_y = -n_x n_y.
            *diag.entry(TermKey::Pqqp(c1, c2)).or_default() += -sign * half;
        } else if let Some(x) = shared_index(cre, ann) {
            // One orbital shared between the pairs: a dressed hopping
            // c+_e c_f n_x. Sign rule: +1 when x sits in the second
            // creation slot, -1 in the first; +1 in the first
            // annihilation slot, -1 in the second.
            let e = if cre[0] == x { cre[1] } else { cre[0] };
            let f = if ann[0] == x { ann[1] } else { ann[0] };
            let sc = if cre[1] == x { 1.0 } else { -1.0 };
            let sa = if ann[0] == x { 1.0 } else { -1.0 };
            let w = sign * sc * sa * half;
            let entry = split
                .entry(TermKey::Pqqr(e.min(f), x, e.max(f)))
                .or_default();
            if e < f {
                entry.forward += w;
            } else {
                entry.backward += w;
            }
        } else {
            let w = sign * half;
            let (key, fwd) = if (c1, c2) <= (a1, a2) {
                (TermKey::Pqrs(c1, c2, a1, a2), true)
            } else {
                (TermKey::Pqrs(a1, a2, c1, c2), false)
            };
            let entry = split.entry(key).or_default();
            if fwd {
                entry.forward += w;
            } else {
                entry.backward += w;
            }
        }
    }

    let mut terms = Vec::new();
    for (key, w) in diag {
        push_term(&mut terms, key, w, threshold);
    }
    for (key, sc) in split {
        push_term(&mut terms, key, 0.5 * (sc.forward + sc.backward), threshold);
    }
    terms.sort_by(|a, b| a.sort_key().cmp(&b.sort_key()));
    terms
}

fn shared_index(cre: [usize; 2], ann: [usize; 2]) -> Option<usize> {
    cre.into_iter().find(|x| ann.contains(x))
}

fn push_term(terms: &mut Vec<FermionTerm>, key: TermKey, coefficient: f64, threshold: f64) {
    if libm::fabs(coefficient) <= threshold {
        return;
    }
    terms.push(match key {
        TermKey::Pp(p) => FermionTerm::Pp { p, coefficient },
        TermKey::Pq(p, q) => FermionTerm::Pq { p, q, coefficient },
        TermKey::Pqqp(p, q) => FermionTerm::Pqqp { p, q, coefficient },
        TermKey::Pqqr(p, x, r) => FermionTerm::Pqqr {
            p,
            q: x,
            r,
            coefficient,
        },
        TermKey::Pqrs(p, q, r, s) => FermionTerm::Pqrs {
            p,
            q,
            r,
            s,
            coefficient,
        },
    });
}

/// Rebuilds an integral tensor whose classification reproduces `terms`
/// exactly (up to pruning). Inverse of [`classify_terms`] on canonical
/// term lists; used for round-trip checks and fixture generation.
pub fn reconstruct_integrals(
    terms: &[FermionTerm],
    n_orbitals: usize,
) -> Result<SpinOrbitalIntegrals, IntegralsError> {
    let mut out = SpinOrbitalIntegrals::new(n_orbitals);
    for term in terms {
        let c = term.coefficient();
        match *term {
            FermionTerm::Pp { p, .. } => out.set_t(p, p, c)?,
            FermionTerm::Pq { p, q, .. } => out.set_t(p, q, c)?,
            FermionTerm::Pqqp { p, q, .. } => out.add_v([p, q, q, p], 2.0 * c)?,
            FermionTerm::Pqqr { p, q, r, .. } => {
                out.add_v([p, q, q, r], 2.0 * c)?;
                out.add_v([r, q, q, p], 2.0 * c)?;
            }
            FermionTerm::Pqrs { p, q, r, s, .. } => {
                out.add_v([p, q, r, s], 2.0 * c)?;
                out.add_v([s, r, q, p], 2.0 * c)?;
            }
        }
    }
    Ok(out)
}

/// Human-readable term label such as `PQRS(0,1,2,3)`, used in
/// diagnostics.
pub fn term_label(term: &FermionTerm) -> String {
    use core::fmt::Write;
    let mut s = String::new();
    let _ = write!(s, "{}(", term.kind());
    for (i, idx) in term.indices().iter().enumerate() {
        if i > 0 {
            s.push(',');
        }
        let _ = write!(s, "{idx}");
    }
    s.push(')');
    s
}
