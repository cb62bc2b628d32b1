//! Bundled model Hamiltonians: a tiny four-spin-orbital two-electron
//! system for ordering experiments, and synthetic dense
//! double-excitation sets for the depth-scaling runs. The `fixtures/`
//! files in this crate are the serialized output of these generators; a
//! test keeps them in sync.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use trotterc_core::hamiltonian::{reconstruct_integrals, FermionTerm, SpinOrbitalIntegrals};

/// Orbital counts of the bundled dense sets.
pub const DENSE_SIZES: [usize; 4] = [6, 8, 10, 12];

/// Seed used for the committed dense fixture files.
pub const DENSE_SEED: u64 = 0x5eed_1234;

/// A small closed-shell model with a known Hartree-Fock occupation:
/// orbitals 0 and 1 filled, weak hops, moderate density-density
/// couplings and one double excitation. The ground state is
/// nondegenerate and the spectrum fits comfortably inside the
/// eigenphase branch for timesteps up to ~0.5.
pub fn tiny_model() -> SpinOrbitalIntegrals {
    let mut ints = SpinOrbitalIntegrals::new(4);
    ints.set_t(0, 0, -1.0).unwrap();
    ints.set_t(1, 1, -0.8).unwrap();
    ints.set_t(2, 2, -0.2).unwrap();
    ints.set_t(3, 3, -0.1).unwrap();
    ints.set_t(0, 1, 0.02).unwrap();
    ints.set_t(0, 2, 0.05).unwrap();
    ints.set_t(2, 3, 0.03).unwrap();
    // Density-density couplings.
    ints.set_v([0, 1, 1, 0], 0.70).unwrap();
    ints.set_v([0, 2, 2, 0], 0.40).unwrap();
    ints.set_v([0, 3, 3, 0], 0.30).unwrap();
    ints.set_v([1, 2, 2, 1], 0.30).unwrap();
    ints.set_v([1, 3, 3, 1], 0.40).unwrap();
    ints.set_v([2, 3, 3, 2], 0.25).unwrap();
    // One dressed hop and one double excitation, with their conjugates.
    ints.set_v([0, 2, 2, 3], 0.12).unwrap();
    ints.set_v([3, 2, 2, 0], 0.12).unwrap();
    ints.set_v([0, 1, 2, 3], 0.20).unwrap();
    ints.set_v([3, 2, 1, 0], 0.20).unwrap();
    ints.set_occupation(vec![1, 1, 0, 0]).unwrap();
    ints
}

/// Every canonical double-excitation term over `n_orbitals` spin
/// orbitals, plus a small diagonal, with deterministic pseudo-random
/// coefficients. "Dense" in the sense the string-cancellation analysis
/// assumes: no `(p, q, r, s)` combination is zero.
pub fn dense_pqrs(n_orbitals: usize, seed: u64) -> SpinOrbitalIntegrals {
    let terms = dense_pqrs_terms(n_orbitals, seed);
    reconstruct_integrals(&terms, n_orbitals).expect("generated indices are in range")
}

/// The term list behind [`dense_pqrs`], for callers that feed the
/// compiler directly.
pub fn dense_pqrs_terms(n_orbitals: usize, seed: u64) -> Vec<FermionTerm> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ n_orbitals as u64);
    let mut coeff = |scale: f64| {
        let magnitude: f64 = rng.random_range(0.01..0.1);
        let sign = if rng.random_bool(0.5) { 1.0 } else { -1.0 };
        sign * magnitude * scale
    };
    let mut terms = Vec::new();
    for p in 0..n_orbitals {
        terms.push(FermionTerm::Pp {
            p,
            coefficient: coeff(3.0),
        });
    }
    for p in 0..n_orbitals {
        for q in (p + 1)..n_orbitals {
            for r in 0..n_orbitals {
                for s in (r + 1)..n_orbitals {
                    if (p, q) >= (r, s) || r == p || r == q || s == p || s == q {
                        continue;
                    }
                    terms.push(FermionTerm::Pqrs {
                        p,
                        q,
                        r,
                        s,
                        coefficient: coeff(1.0),
                    });
                }
            }
        }
    }
    terms
}

/// Absolute path of a bundled fixture file.
pub fn fixture_path(name: &str) -> std::path::PathBuf {
    std::path::Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("fixtures")
        .join(name)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::io::{parse_integrals, serialize_integrals};

    #[test]
    fn tiny_model_is_well_posed() {
        let ints = tiny_model();
        let spectrum = crate::sim::exact_spectrum(&ints).unwrap();
        assert!(!spectrum.degenerate);
        // Comfortably inside the branch at dt = 0.5.
        let spread = spectrum
            .eigenvalues
            .iter()
            .map(|e| e.abs())
            .fold(0.0, f64::max);
        assert!(spread * 0.5 < core::f64::consts::PI);
        // The occupation [1,1,0,0] should describe the ground state
        // reasonably (it is a model of a closed-shell molecule).
        assert!(spectrum.ground_energy < -1.2);
    }

    #[test]
    fn dense_sets_are_dense_and_deterministic() {
        let terms = dense_pqrs_terms(6, DENSE_SEED);
        let quartics = terms
            .iter()
            .filter(|t| matches!(t, FermionTerm::Pqrs { .. }))
            .count();
        // 45 disjoint ordered pair-of-pairs on 6 orbitals.
        assert_eq!(quartics, 45);
        assert!(terms.iter().all(|t| t.coefficient() != 0.0));
        assert_eq!(dense_pqrs_terms(6, DENSE_SEED), terms);

        let ints = dense_pqrs(6, DENSE_SEED);
        let classified = ints.classify_terms(1e-12);
        assert_eq!(classified.len(), terms.len());
    }

    /// Regenerates the committed fixture files. Run manually:
    /// `cargo test -p trotterc write_fixture_files -- --ignored`
    #[test]
    #[ignore]
    fn write_fixture_files() {
        std::fs::create_dir_all(fixture_path("")).unwrap();
        std::fs::write(fixture_path("tiny_4so.ints"), serialize_integrals(&tiny_model())).unwrap();
        for n in DENSE_SIZES {
            std::fs::write(
                fixture_path(&format!("dense_pqrs_n{n}.ints")),
                serialize_integrals(&dense_pqrs(n, DENSE_SEED)),
            )
            .unwrap();
        }
    }

    #[test]
    fn fixture_files_match_generators() {
        let tiny = std::fs::read_to_string(fixture_path("tiny_4so.ints")).unwrap();
        assert_eq!(parse_integrals(&tiny).unwrap(), tiny_model());
        for n in DENSE_SIZES {
            let text =
                std::fs::read_to_string(fixture_path(&format!("dense_pqrs_n{n}.ints"))).unwrap();
            assert_eq!(parse_integrals(&text).unwrap(), dense_pqrs(n, DENSE_SEED));
        }
    }
}
