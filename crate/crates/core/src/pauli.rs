//! Pauli-string algebra and the Jordan-Wigner expansion of fermionic
//! terms.
//!
//! Fermionic operators are encoded with a Z string on all qubits below
//! the operator site:
//!
//! ```text
//! c+_p = Z_0 ... Z_{p-1} (X_p - i Y_p) / 2
//! c_p  = Z_0 ... Z_{p-1} (X_p + i Y_p) / 2
//! ```
//!
//! Term expansions are computed symbolically from these ladder operators,
//! so every sign falls out of the product algebra instead of a
//! transcribed table. Qubit 0 maps to the most significant bit of a
//! basis-state index.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use num_complex::Complex64;

use crate::hamiltonian::{FermionTerm, TermKind};

/// Largest qubit count for which dense matrices are built.
pub const MAX_DENSE_QUBITS: usize = 14;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum PauliLetter {
    I,
    X,
    Y,
    Z,
}

impl PauliLetter {
    /// Single-letter product `self * other` as (letter, i^k phase).
    fn mul(self, other: Self) -> (Self, Quadrant) {
        use PauliLetter::*;
        match (self, other) {
            (I, a) | (a, I) => (a, Quadrant::One),
            (a, b) if a == b => (I, Quadrant::One),
            (X, Y) => (Z, Quadrant::PlusI),
            (Y, X) => (Z, Quadrant::MinusI),
            (Y, Z) => (X, Quadrant::PlusI),
            (Z, Y) => (X, Quadrant::MinusI),
            (Z, X) => (Y, Quadrant::PlusI),
            (X, Z) => (Y, Quadrant::MinusI),
            _ => unreachable!(),
        }
    }
}

impl fmt::Display for PauliLetter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let c = match self {
            Self::I => 'I',
            Self::X => 'X',
            Self::Y => 'Y',
            Self::Z => 'Z',
        };
        write!(f, "{c}")
    }
}

/// Power of `i` accumulated by letter products.
#[derive(Clone, Copy)]
enum Quadrant {
    One,
    PlusI,
    MinusI,
}

impl Quadrant {
    fn factor(self) -> Complex64 {
        match self {
            Self::One => Complex64::new(1.0, 0.0),
            Self::PlusI => Complex64::new(0.0, 1.0),
            Self::MinusI => Complex64::new(0.0, -1.0),
        }
    }
}

/// A real-weighted tensor product of Pauli letters over all system
/// qubits.
#[derive(Debug, Clone, PartialEq)]
pub struct PauliString {
    pub letters: Vec<PauliLetter>,
    pub coefficient: f64,
}

impl PauliString {
    pub fn identity(n_qubits: usize, coefficient: f64) -> Self {
        Self {
            letters: vec![PauliLetter::I; n_qubits],
            coefficient,
        }
    }

    pub fn n_qubits(&self) -> usize {
        self.letters.len()
    }

    pub fn x_count(&self) -> usize {
        self.letters.iter().filter(|&&l| l == PauliLetter::X).count()
    }

    pub fn y_count(&self) -> usize {
        self.letters.iter().filter(|&&l| l == PauliLetter::Y).count()
    }

    /// Positions carrying X or Y (the operator sites of a term).
    pub fn xy_positions(&self) -> Vec<usize> {
        self.positions(|l| matches!(l, PauliLetter::X | PauliLetter::Y))
    }

    /// Positions carrying Z (the string sites).
    pub fn z_positions(&self) -> Vec<usize> {
        self.positions(|l| l == PauliLetter::Z)
    }

    /// All non-identity positions.
    pub fn support(&self) -> Vec<usize> {
        self.positions(|l| l != PauliLetter::I)
    }

    fn positions(&self, pred: impl Fn(PauliLetter) -> bool) -> Vec<usize> {
        self.letters
            .iter()
            .enumerate()
            .filter(|(_, &l)| pred(l))
            .map(|(i, _)| i)
            .collect()
    }

    pub fn is_identity(&self) -> bool {
        self.letters.iter().all(|&l| l == PauliLetter::I)
    }

    /// True when the two strings commute as operators: they anticommute
    /// at an even number of positions.
    pub fn commutes_with(&self, other: &Self) -> bool {
        let anti = self
            .letters
            .iter()
            .zip(&other.letters)
            .filter(|(&a, &b)| a != PauliLetter::I && b != PauliLetter::I && a != b)
            .count();
        anti % 2 == 0
    }

    /// Dense row-major `2^N x 2^N` matrix of the weighted string.
    ///
    /// Pauli strings are signed permutations, so the matrix is built in
    /// `O(2^N)` column writes rather than by Kronecker products.
    pub fn matrix(&self) -> Result<Vec<Complex64>, ResourceError> {
        let n = self.n_qubits();
        if n > MAX_DENSE_QUBITS {
            return Err(ResourceError {
                n_qubits: n,
                limit: MAX_DENSE_QUBITS,
            });
        }
        let dim = 1usize << n;
        let mut out = vec![Complex64::new(0.0, 0.0); dim * dim];
        let mut flip_mask = 0usize;
        for (q, &l) in self.letters.iter().enumerate() {
            if matches!(l, PauliLetter::X | PauliLetter::Y) {
                flip_mask |= bit_mask(q, n);
            }
        }
        for col in 0..dim {
            let mut phase = Complex64::new(self.coefficient, 0.0);
            for (q, &l) in self.letters.iter().enumerate() {
                let b = col & bit_mask(q, n) != 0;
                match l {
                    PauliLetter::I | PauliLetter::X => {}
                    PauliLetter::Y => {
                        phase *= if b {
                            Complex64::new(0.0, -1.0)
                        } else {
                            Complex64::new(0.0, 1.0)
                        };
                    }
                    PauliLetter::Z => {
                        if b {
                            phase = -phase;
                        }
                    }
                }
            }
            let row = col ^ flip_mask;
            out[row * dim + col] = phase;
        }
        Ok(out)
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:+e} * ", self.coefficient)?;
        for l in &self.letters {
            write!(f, "{l}")?;
        }
        Ok(())
    }
}

/// Index bit carrying qubit `q` out of `n` (qubit 0 = most significant).
pub fn bit_mask(q: usize, n: usize) -> usize {
    1usize << (n - 1 - q)
}

/// Too many qubits for a dense matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct ResourceError {
    pub n_qubits: usize,
    pub limit: usize,
}

impl fmt::Display for ResourceError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "dense matrix over {} qubits exceeds the {}-qubit ceiling",
            self.n_qubits, self.limit
        )
    }
}

impl core::error::Error for ResourceError {}

#[derive(Debug, Clone, PartialEq)]
pub enum PauliError {
    IndexOutOfRange { index: usize, n_qubits: usize },
    Resource(ResourceError),
    /// Expansion produced a non-real coefficient; indicates a broken
    /// term invariant upstream.
    NonRealCoefficient { imag: f64 },
}

impl fmt::Display for PauliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::IndexOutOfRange { index, n_qubits } => {
                write!(f, "orbital index {index} out of range for {n_qubits} qubits")
            }
            Self::Resource(e) => e.fmt(f),
            Self::NonRealCoefficient { imag } => {
                write!(f, "expansion produced imaginary coefficient {imag}")
            }
        }
    }
}

impl core::error::Error for PauliError {}

/// Sum of Pauli strings with complex weights; the working representation
/// inside the ladder-operator products.
#[derive(Clone)]
struct OperatorSum {
    n: usize,
    strings: BTreeMap<Vec<PauliLetter>, Complex64>,
}

impl OperatorSum {
    fn zero(n: usize) -> Self {
        Self {
            n,
            strings: BTreeMap::new(),
        }
    }

    fn ladder(p: usize, n: usize, dagger: bool) -> Self {
        let mut x = vec![PauliLetter::Z; p];
        x.push(PauliLetter::X);
        x.resize(n, PauliLetter::I);
        let mut y = vec![PauliLetter::Z; p];
        y.push(PauliLetter::Y);
        y.resize(n, PauliLetter::I);
        let im = if dagger { -0.5 } else { 0.5 };
        let mut strings = BTreeMap::new();
        strings.insert(x, Complex64::new(0.5, 0.0));
        strings.insert(y, Complex64::new(0.0, im));
        Self { n, strings }
    }

    fn add_assign(&mut self, other: &Self) {
        for (letters, &w) in &other.strings {
            let entry = self
                .strings
                .entry(letters.clone())
                .or_insert(Complex64::new(0.0, 0.0));
            *entry += w;
            if entry.re == 0.0 && entry.im == 0.0 {
                self.strings.remove(letters);
            }
        }
    }

    fn mul(&self, other: &Self) -> Self {
        let mut out = Self::zero(self.n);
        for (la, &wa) in &self.strings {
            for (lb, &wb) in &other.strings {
                let mut phase = Complex64::new(1.0, 0.0);
                let letters: Vec<PauliLetter> = la
                    .iter()
                    .zip(lb)
                    .map(|(&a, &b)| {
                        let (l, q) = a.mul(b);
                        phase *= q.factor();
                        l
                    })
                    .collect();
                let entry = out
                    .strings
                    .entry(letters)
                    .or_insert(Complex64::new(0.0, 0.0));
                *entry += wa * wb * phase;
            }
        }
        out.strings.retain(|_, w| w.re != 0.0 || w.im != 0.0);
        out
    }

    fn scale(&mut self, factor: f64) {
        for w in self.strings.values_mut() {
            *w *= factor;
        }
    }
}

fn ladder_product(n: usize, ops: &[(usize, bool)]) -> OperatorSum {
    let mut acc = OperatorSum::ladder(ops[0].0, n, ops[0].1);
    for &(p, dag) in &ops[1..] {
        acc = acc.mul(&OperatorSum::ladder(p, n, dag));
    }
    acc
}

/// Expands a canonical term into its exact Pauli representation
/// (including identity components). Output strings are sorted by
/// letters, carry real coefficients, and have even X and Y counts.
pub fn jw_expand(term: &FermionTerm, n_qubits: usize) -> Result<Vec<PauliString>, PauliError> {
    if let Some(&index) = term.indices().iter().find(|&&i| i >= n_qubits) {
        return Err(PauliError::IndexOutOfRange {
            index,
            n_qubits,
        });
    }
    let c = term.coefficient();
    let n = n_qubits;
    let mut sum = match *term {
        FermionTerm::Pp { p, .. } => ladder_product(n, &[(p, true), (p, false)]),
        FermionTerm::Pq { p, q, .. } => {
            let mut a = ladder_product(n, &[(p, true), (q, false)]);
            a.add_assign(&ladder_product(n, &[(q, true), (p, false)]));
            a
        }
        FermionTerm::Pqqp { p, q, .. } => {
            ladder_product(n, &[(p, true), (p, false), (q, true), (q, false)])
        }
        FermionTerm::Pqqr { p, q, r, .. } => {
            let mut a = ladder_product(n, &[(p, true), (r, false), (q, true), (q, false)]);
            a.add_assign(&ladder_product(
                n,
                &[(r, true), (p, false), (q, true), (q, false)],
            ));
            a
        }
        FermionTerm::Pqrs { p, q, r, s, .. } => {
            let mut a = ladder_product(n, &[(p, true), (q, true), (r, false), (s, false)]);
            a.add_assign(&ladder_product(
                n,
                &[(r, true), (s, true), (p, false), (q, false)],
            ));
            a
        }
    };
    sum.scale(c);

    let mut out = Vec::with_capacity(sum.strings.len());
    for (letters, w) in sum.strings {
        if libm::fabs(w.im) > 1e-12 * (1.0 + libm::fabs(c)) {
            return Err(PauliError::NonRealCoefficient { imag: w.im });
        }
        if w.re == 0.0 {
            continue;
        }
        out.push(PauliString {
            letters,
            coefficient: w.re,
        });
    }
    Ok(out)
}

/// Requested order for the subterm sequence of a term.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SubtermOrder {
    /// The conventional order: all-X, all-Y, then mixed pairs.
    Baseline,
    /// Reordered so consecutive subterms differ in exactly two basis
    /// positions, letting adjacent basis changes cancel.
    Optimized,
}

/// Term kinds without subterms have nothing to enumerate.
#[derive(Debug, Clone, PartialEq)]
pub struct NoSubtermsError {
    pub kind: TermKind,
}

impl fmt::Display for NoSubtermsError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} terms are diagonal and have no subterms", self.kind)
    }
}

impl core::error::Error for NoSubtermsError {}

/// The X/Y letter patterns over a term's operator sites, in execution
/// order. Every pattern has even X and even Y counts.
pub fn enumerate_subterms(
    kind: TermKind,
    order: SubtermOrder,
) -> Result<Vec<Vec<PauliLetter>>, NoSubtermsError> {
    use PauliLetter::{X, Y};
    match kind {
        TermKind::PP | TermKind::PQQP => Err(NoSubtermsError { kind }),
        TermKind::PQ | TermKind::PQQR => Ok(vec![vec![X, X], vec![Y, Y]]),
        TermKind::PQRS => Ok(match order {
            SubtermOrder::Baseline => vec![
                vec![X, X, X, X],
                vec![Y, Y, Y, Y],
                vec![X, X, Y, Y],
                vec![Y, Y, X, X],
                vec![X, Y, X, Y],
                vec![X, Y, Y, X],
                vec![Y, X, X, Y],
                vec![Y, X, Y, X],
            ],
            SubtermOrder::Optimized => vec![
                vec![X, X, X, X],
                vec![X, X, Y, Y],
                vec![Y, Y, Y, Y],
                vec![Y, Y, X, X],
                vec![X, Y, Y, X],
                vec![Y, X, Y, X],
                vec![Y, X, X, Y],
                vec![X, Y, X, Y],
            ],
        }),
    }
}


#[cfg(test)]
mod tests {
    use super::test_matrices::*;
    use super::*;
    use proptest::prelude::*;

    fn string(letters: &[PauliLetter], coefficient: f64) -> PauliString {
        PauliString {
            letters: letters.to_vec(),
            coefficient,
        }
    }

    #[test]
    fn letter_products_match_matrices() {
        use PauliLetter::*;
        for &a in &[I, X, Y, Z] {
            for &b in &[I, X, Y, Z] {
                let (l, q) = a.mul(b);
                let lhs = letter_matrix(a).mul(&letter_matrix(b));
                let mut rhs = Dense::zeros(2);
                rhs.add_scaled(&letter_matrix(l), q.factor());
                assert!(lhs.max_abs_diff(&rhs) < 1e-15, "{a}{b}");
            }
        }
    }

    #[test]
    fn jw_pp_is_half_identity_minus_half_z() {
        use PauliLetter::*;
        let term = FermionTerm::Pp {
            p: 0,
            coefficient: 0.5,
        };
        let strings = jw_expand(&term, 1).unwrap();
        assert_eq!(
            strings,
            vec![string(&[I], 0.25), string(&[Z], -0.25)]
        );
    }

    #[test]
    fn jw_pq_hopping_with_string() {
        use PauliLetter::*;
        let term = FermionTerm::Pq {
            p: 0,
            q: 2,
            coefficient: 1.0,
        };
        let strings = jw_expand(&term, 3).unwrap();
        assert_eq!(
            strings,
            vec![string(&[X, Z, X], 0.5), string(&[Y, Z, Y], 0.5)]
        );
    }

    #[test]
    fn jw_pqrs_frozen_sign_table() {
        use PauliLetter::*;
        let term = FermionTerm::Pqrs {
            p: 0,
            q: 1,
            r: 2,
            s: 3,
            coefficient: 1.0,
        };
        let strings = jw_expand(&term, 4).unwrap();
        assert_eq!(strings.len(), 8);
        for s in &strings {
            assert!((s.coefficient.abs() - 0.125).abs() < 1e-15);
            assert_eq!(s.x_count() % 2, 0);
            assert_eq!(s.y_count() % 2, 0);
        }
        // Signs fixed once by the ladder-matrix oracle and frozen here.
        let table = [
            (vec![X, X, X, X], -0.125),
            (vec![X, X, Y, Y], 0.125),
            (vec![X, Y, X, Y], -0.125),
            (vec![X, Y, Y, X], -0.125),
            (vec![Y, X, X, Y], -0.125),
            (vec![Y, X, Y, X], -0.125),
            (vec![Y, Y, X, X], 0.125),
            (vec![Y, Y, Y, Y], -0.125),
        ];
        for (letters, coeff) in table {
            assert!(
                strings
                    .iter()
                    .any(|s| s.letters == letters && (s.coefficient - coeff).abs() < 1e-15),
                "missing {letters:?} {coeff}"
            );
        }
    }

    #[test]
    fn jw_rejects_out_of_range_index() {
        let term = FermionTerm::Pq {
            p: 0,
            q: 5,
            coefficient: 1.0,
        };
        assert_eq!(
            jw_expand(&term, 3),
            Err(PauliError::IndexOutOfRange {
                index: 5,
                n_qubits: 3
            })
        );
    }

    #[test]
    fn jw_matches_ladder_oracle_on_samples() {
        let samples = [
            (FermionTerm::Pp { p: 1, coefficient: -0.7 }, 3),
            (FermionTerm::Pq { p: 0, q: 1, coefficient: 0.3 }, 2),
            (FermionTerm::Pq { p: 1, q: 3, coefficient: -1.1 }, 4),
            (FermionTerm::Pqqp { p: 0, q: 2, coefficient: 0.9 }, 3),
            (FermionTerm::Pqqr { p: 0, q: 2, r: 3, coefficient: 0.5 }, 4),
            (FermionTerm::Pqqr { p: 0, q: 1, r: 3, coefficient: 0.5 }, 4),
            (FermionTerm::Pqqr { p: 1, q: 0, r: 2, coefficient: -0.4 }, 3),
            (FermionTerm::Pqrs { p: 0, q: 1, r: 2, s: 3, coefficient: 1.0 }, 4),
            (FermionTerm::Pqrs { p: 0, q: 2, r: 1, s: 3, coefficient: -0.6 }, 4),
            (FermionTerm::Pqrs { p: 0, q: 3, r: 1, s: 2, coefficient: 0.8 }, 4),
        ];
        for (term, n) in samples {
            let diff = expansion_matrix(&term, n).max_abs_diff(&term_matrix_oracle(&term, n));
            assert!(diff < 1e-12, "{term:?}: {diff}");
        }
    }

    #[test]
    fn jw_strings_have_even_xy_counts_and_real_weights() {
        let terms = [
            FermionTerm::Pq { p: 0, q: 3, coefficient: 0.2 },
            FermionTerm::Pqqr { p: 0, q: 2, r: 1, coefficient: 0.2 },
            FermionTerm::Pqrs { p: 0, q: 1, r: 2, s: 3, coefficient: 0.2 },
        ];
        for term in terms {
            for s in jw_expand(&term, 4).unwrap() {
                assert_eq!(s.x_count() % 2, 0);
                assert_eq!(s.y_count() % 2, 0);
            }
        }
    }

    #[test]
    fn pauli_matrix_examples() {
        use PauliLetter::*;
        let id = string(&[I], 1.0).matrix().unwrap();
        assert_eq!(id[0], Complex64::new(1.0, 0.0));
        assert_eq!(id[3], Complex64::new(1.0, 0.0));
        assert_eq!(id[1], Complex64::new(0.0, 0.0));

        let z = string(&[Z], 1.0).matrix().unwrap();
        assert_eq!(z[0], Complex64::new(1.0, 0.0));
        assert_eq!(z[3], Complex64::new(-1.0, 0.0));

        // X_0 Z_1 against an explicit Kronecker product.
        let xz = string(&[X, Z], -2.0).matrix().unwrap();
        let mut oracle = letter_matrix(X).kron(&letter_matrix(Z));
        for v in oracle.a.iter_mut() {
            *v *= Complex64::new(-2.0, 0.0);
        }
        let got = Dense { dim: 4, a: xz };
        assert!(got.max_abs_diff(&oracle) < 1e-15);
    }

    #[test]
    fn pauli_matrix_resource_guard() {
        let s = PauliString::identity(MAX_DENSE_QUBITS + 1, 1.0);
        assert!(matches!(s.matrix(), Err(ResourceError { .. })));
    }

    #[test]
    fn subterm_enumeration() {
        use PauliLetter::*;
        assert_eq!(
            enumerate_subterms(TermKind::PQ, SubtermOrder::Baseline).unwrap(),
            vec![vec![X, X], vec![Y, Y]]
        );
        assert!(enumerate_subterms(TermKind::PP, SubtermOrder::Baseline).is_err());
        assert!(enumerate_subterms(TermKind::PQQP, SubtermOrder::Optimized).is_err());

        for order in [SubtermOrder::Baseline, SubtermOrder::Optimized] {
            let pats = enumerate_subterms(TermKind::PQRS, order).unwrap();
            assert_eq!(pats.len(), 8);
            for p in &pats {
                assert_eq!(p.iter().filter(|&&l| l == X).count() % 2, 0);
                assert_eq!(p.iter().filter(|&&l| l == Y).count() % 2, 0);
            }
        }
        // The optimized order changes basis at exactly two positions per
        // step.
        let pats = enumerate_subterms(TermKind::PQRS, SubtermOrder::Optimized).unwrap();
        for w in pats.windows(2) {
            let changed = w[0].iter().zip(&w[1]).filter(|(a, b)| a != b).count();
            assert_eq!(changed, 2, "{w:?}");
        }
    }

    proptest! {
        #[test]
        fn prop_jw_matches_ladder_oracle(seed in 0u64..400) {
            // Cheap deterministic term sampler over N = 4.
            let n = 4usize;
            let mut state = seed.wrapping_mul(0x9E37_79B9_7F4A_7C15).wrapping_add(1);
            let mut next = move |m: usize| {
                state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                ((state >> 33) as usize) % m
            };
            let coeff = (next(2001) as f64 - 1000.0) / 500.0;
            prop_assume!(coeff != 0.0);
            let term = match next(5) {
                0 => FermionTerm::Pp { p: next(n), coefficient: coeff },
                1 => {
                    let p = next(n - 1);
                    FermionTerm::Pq { p, q: p + 1 + next(n - p - 1), coefficient: coeff }
                }
                2 => {
                    let p = next(n - 1);
                    FermionTerm::Pqqp { p, q: p + 1 + next(n - p - 1), coefficient: coeff }
                }
                3 => {
                    let p = next(n - 1);
                    let r = p + 1 + next(n - p - 1);
                    let mut q = next(n);
                    while q == p || q == r {
                        q = next(n);
                    }
                    FermionTerm::Pqqr { p, q, r, coefficient: coeff }
                }
                _ => FermionTerm::Pqrs { p: 0, q: 1, r: 2, s: 3, coefficient: coeff },
            };
            let diff = expansion_matrix(&term, n)
                .max_abs_diff(&term_matrix_oracle(&term, n));
            prop_assert!(diff < 1e-12);
        }

        #[test]
        fn prop_commutes_with_is_symmetric(a in proptest::collection::vec(0u8..4, 5),
                                           b in proptest::collection::vec(0u8..4, 5)) {
            let conv = |v: &Vec<u8>| PauliString {
                letters: v.iter().map(|&k| match k {
                    0 => PauliLetter::I,
                    1 => PauliLetter::X,
                    2 => PauliLetter::Y,
                    _ => PauliLetter::Z,
                }).collect(),
                coefficient: 1.0,
            };
            let (sa, sb) = (conv(&a), conv(&b));
            prop_assert_eq!(sa.commutes_with(&sb), sb.commutes_with(&sa));
        }
    }
}
