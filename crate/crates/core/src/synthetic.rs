//! Seeded generators for test and benchmark Hamiltonians.

use std::collections::HashSet;

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::encoding::{encode, EncodingKind, EncodingSpec, Provenance, WeightedPauliHamiltonian, DEFAULT_CUTOFF};
use crate::error::Result;
use crate::pauli::{words_for, PauliString, WeightedPauli};
use crate::vibrational::{build_second_quantized, BuildOptions, PesTerm, VibProblem};

fn log_uniform(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> f64 {
    (rng.random_range(lo.ln()..=hi.ln())).exp()
}

fn random_sign(rng: &mut ChaCha8Rng) -> f64 {
    if rng.random_bool(0.5) {
        1.0
    } else {
        -1.0
    }
}

/// `n_terms` distinct non-identity Pauli strings on `n_qubits` qubits with
/// random signs and magnitudes log-uniform in `[min_abs, max_abs]`.
/// Fewer terms are returned when the space of strings is smaller.
pub fn random_pauli_hamiltonian(
    n_terms: usize,
    n_qubits: usize,
    min_abs: f64,
    max_abs: f64,
    seed: u64,
) -> WeightedPauliHamiltonian {
    assert!(n_qubits >= 1 && min_abs > 0.0 && max_abs >= min_abs);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let available = if n_qubits >= 32 {
        usize::MAX
    } else {
        (1usize << (2 * n_qubits)) - 1
    };
    let target = n_terms.min(available);
    let words = words_for(n_qubits);
    let mut seen = HashSet::new();
    let mut terms = Vec::with_capacity(target);
    while terms.len() < target {
        let mut x = vec![0u64; words];
        let mut z = vec![0u64; words];
        for q in 0..n_qubits {
            let s: u8 = rng.random_range(0..4);
            x[q / 64] |= u64::from(s & 1) << (q % 64);
            z[q / 64] |= u64::from(s >> 1) << (q % 64);
        }
        let p = PauliString::from_masks(n_qubits, x, z).expect("masks fit the width");
        if p.is_identity() || !seen.insert(p.clone()) {
            continue;
        }
        let c = random_sign(&mut rng) * log_uniform(&mut rng, min_abs, max_abs);
        terms.push(WeightedPauli::new(c, p));
    }
    WeightedPauliHamiltonian::new(n_qubits, terms, Provenance::default()).expect("distinct Hermitian strings")
}

/// Random subset of at most `n` terms, kept in their original order.
pub fn subsample(h: &WeightedPauliHamiltonian, n: usize, seed: u64) -> WeightedPauliHamiltonian {
    if n >= h.len() {
        return h.clone();
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut idx = sample(&mut rng, h.len(), n).into_vec();
    idx.sort_unstable();
    WeightedPauliHamiltonian {
        n_qubits: h.n_qubits,
        terms: idx.into_iter().map(|i| h.terms[i].clone()).collect(),
        meta: h.meta.clone(),
    }
}

/// Shape of a chain-like anharmonic force field.
#[derive(Debug, Clone, PartialEq)]
pub struct VibrationalConfig {
    pub n_modes: usize,
    pub modals: usize,
    pub encoding: EncodingKind,
    /// Couplings only between modes at most this far apart along the chain.
    pub window: usize,
    /// Include three-mode `Q_l Q_m Q_n` couplings.
    pub three_mode: bool,
    /// Multiplier applied once per additional coupled mode.
    pub coupling_decay: f64,
    pub omega_range: (f64, f64),
    pub cutoff: f64,
}

impl VibrationalConfig {
    /// Unary-encoded chain with quartic force-field terms up to three-mode couplings.
    pub fn chain(n_modes: usize, modals: usize) -> Self {
        VibrationalConfig {
            n_modes,
            modals,
            encoding: EncodingKind::Unary,
            window: 2,
            three_mode: true,
            coupling_decay: 0.2,
            omega_range: (200.0, 3500.0),
            cutoff: DEFAULT_CUTOFF,
        }
    }
}

/// Random quartic force field on a chain: one-mode cubic and quartic terms,
/// two-mode `Q_l Q_m²`, `Q_l² Q_m` and `Q_l² Q_m²` terms within the window and
/// optionally three-mode `Q_l Q_m Q_n` terms, with magnitudes shrinking by
/// `coupling_decay` per extra mode.
pub fn chain_force_field(cfg: &VibrationalConfig, seed: u64) -> Result<(VibProblem, Vec<PesTerm>)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (lo, hi) = cfg.omega_range;
    let omegas: Vec<f64> = (0..cfg.n_modes).map(|_| log_uniform(&mut rng, lo, hi)).collect();
    let order = if cfg.three_mode { 3 } else { 2 }.min(cfg.n_modes);
    let problem = VibProblem::new(cfg.n_modes, order, cfg.modals, omegas)?;
    let mut pes = Vec::new();
    let mag = |rng: &mut ChaCha8Rng, lo: f64, hi: f64, extra_modes: i32| {
        random_sign(rng) * log_uniform(rng, lo, hi) * cfg.coupling_decay.powi(extra_modes)
    };
    for l in 0..cfg.n_modes {
        pes.push(PesTerm::new(vec![l], vec![3], mag(&mut rng, 5.0, 50.0, 0)));
        pes.push(PesTerm::new(vec![l], vec![4], mag(&mut rng, 0.5, 5.0, 0)));
    }
    if order >= 2 {
        for l in 0..cfg.n_modes {
            for m in l + 1..cfg.n_modes.min(l + cfg.window + 1) {
                pes.push(PesTerm::new(vec![l, m], vec![1, 2], mag(&mut rng, 5.0, 50.0, 1)));
                pes.push(PesTerm::new(vec![l, m], vec![2, 1], mag(&mut rng, 5.0, 50.0, 1)));
                pes.push(PesTerm::new(vec![l, m], vec![2, 2], mag(&mut rng, 0.5, 5.0, 1)));
            }
        }
    }
    if order >= 3 {
        for l in 0..cfg.n_modes {
            for m in l + 1..cfg.n_modes.min(l + cfg.window + 1) {
                for n in m + 1..cfg.n_modes.min(l + cfg.window + 1) {
                    pes.push(PesTerm::new(vec![l, m, n], vec![1, 1, 1], mag(&mut rng, 5.0, 50.0, 2)));
                }
            }
        }
    }
    Ok((problem, pes))
}

/// Encoded qubit Hamiltonian of [`chain_force_field`].
pub fn vibrational_hamiltonian(cfg: &VibrationalConfig, seed: u64) -> Result<WeightedPauliHamiltonian> {
    let (problem, pes) = chain_force_field(cfg, seed)?;
    let sq = build_second_quantized(&problem, &pes, BuildOptions::default())?;
    let spec = EncodingSpec::new(cfg.encoding, cfg.n_modes, cfg.modals).with_cutoff(cfg.cutoff);
    let mut h = encode(&sq, &spec)?;
    h.meta.source = Some(format!("synthetic chain L={} d={} seed={seed}", cfg.n_modes, cfg.modals));
    Ok(h)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::encoding::locality_stats;

    #[test]
    fn random_hamiltonian_is_reproducible_and_distinct() {
        let a = random_pauli_hamiltonian(100, 7, 1e-4, 1e2, 42);
        let b = random_pauli_hamiltonian(100, 7, 1e-4, 1e2, 42);
        assert_eq!(a, b);
        assert_eq!(a.len(), 100);
        assert!(a.terms.iter().all(|t| !t.pauli.is_identity()));
        assert!(a.terms.iter().all(|t| (1e-4..=1e2).contains(&t.coeff.abs())));
    }

    #[test]
    fn random_hamiltonian_saturates_small_spaces() {
        assert_eq!(random_pauli_hamiltonian(100, 1, 1.0, 1.0, 0).len(), 3);
    }

    #[test]
    fn chain_hamiltonian_is_local() {
        let h = vibrational_hamiltonian(&VibrationalConfig::chain(5, 4), 1).unwrap();
        assert_eq!(h.n_qubits, 20);
        assert!(locality_stats(&h).max_weight <= 6);
        let s = subsample(&h, 10, 0);
        assert_eq!(s.len(), 10);
    }
}
