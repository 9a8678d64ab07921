//! Greedy packing of Pauli exponentials into layers of disjoint support.
//!
//! Terms are visited in a random order. A term whose support is disjoint from
//! the current layer joins it; a term that overlaps closes the layer and opens
//! the next one. The ratio of terms to layers estimates how much a product
//! formula step can be parallelized.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::encoding::WeightedPauliHamiltonian;
use crate::error::{Error, Result};
use crate::pauli::PauliString;

pub const DEFAULT_RUNS: usize = 100;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LayeringStrategy {
    /// Single pass: a conflict always starts a new layer.
    #[default]
    Scan,
    /// Each term goes into the first open layer it fits; not part of the
    /// reference procedure, kept for comparison.
    FirstFit,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LayeringStats {
    pub n_terms: usize,
    pub runs: usize,
    pub seed: u64,
    pub strategy: LayeringStrategy,
    pub ratios: Vec<f64>,
    pub layer_counts: Vec<usize>,
    pub mean_ratio: f64,
    pub min_ratio: f64,
    pub max_ratio: f64,
    pub std_ratio: f64,
}

fn overlaps(a: &[u64], b: &[u64]) -> bool {
    a.iter().zip(b).any(|(x, y)| x & y != 0)
}

fn union_into(acc: &mut [u64], b: &[u64]) {
    for (x, y) in acc.iter_mut().zip(b) {
        *x |= y;
    }
}

/// Layers produced by scanning `supports` in the order given by `order`.
/// Each layer lists indices into `supports`.
pub fn scan_layers(supports: &[Vec<u64>], order: &[usize], strategy: LayeringStrategy) -> Vec<Vec<usize>> {
    let words = supports.first().map_or(0, Vec::len);
    let mut layers: Vec<Vec<usize>> = Vec::new();
    let mut occupied: Vec<Vec<u64>> = Vec::new();
    for &i in order {
        let s = &supports[i];
        let slot = match strategy {
            LayeringStrategy::Scan => occupied.last().filter(|occ| !overlaps(occ, s)).map(|_| layers.len() - 1),
            LayeringStrategy::FirstFit => occupied.iter().position(|occ| !overlaps(occ, s)),
        };
        match slot {
            Some(k) => {
                layers[k].push(i);
                union_into(&mut occupied[k], s);
            }
            None => {
                layers.push(vec![i]);
                let mut occ = vec![0u64; words];
                union_into(&mut occ, s);
                occupied.push(occ);
            }
        }
    }
    layers
}

/// Layer count of the literal scan over `terms` in the order `order`.
pub fn scan_layers_in_order(terms: &[PauliString], order: &[usize]) -> usize {
    let supports: Vec<Vec<u64>> = terms.iter().map(PauliString::support_words).collect();
    scan_layers(&supports, order, LayeringStrategy::Scan).len()
}

/// Layer count after shuffling `terms` with a generator seeded by `seed`.
pub fn greedy_layers(terms: &[PauliString], seed: u64) -> Result<usize> {
    if terms.is_empty() {
        return Err(Error::argument("cannot layer an empty list of terms"));
    }
    let supports: Vec<Vec<u64>> = terms.iter().map(PauliString::support_words).collect();
    Ok(shuffled_layers(&supports, seed, LayeringStrategy::Scan).len())
}

fn shuffled_layers(supports: &[Vec<u64>], seed: u64, strategy: LayeringStrategy) -> Vec<Vec<usize>> {
    let mut order: Vec<usize> = (0..supports.len()).collect();
    order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    scan_layers(supports, &order, strategy)
}

/// Layering statistics over `runs` shuffles with the literal scan. Run `i`
/// uses seed `seed + i`.
pub fn depth_ratio(h: &WeightedPauliHamiltonian, runs: usize, seed: u64) -> Result<LayeringStats> {
    depth_ratio_with(h, runs, seed, LayeringStrategy::Scan)
}

pub fn depth_ratio_with(
    h: &WeightedPauliHamiltonian,
    runs: usize,
    seed: u64,
    strategy: LayeringStrategy,
) -> Result<LayeringStats> {
    if runs == 0 {
        return Err(Error::argument("runs must be >= 1"));
    }
    if h.is_empty() {
        return Err(Error::argument("cannot layer an empty Hamiltonian"));
    }
    let supports: Vec<Vec<u64>> = h.terms.iter().map(|t| t.pauli.support_words()).collect();
    let layer_counts: Vec<usize> = (0..runs)
        .into_par_iter()
        .map(|i| shuffled_layers(&supports, seed.wrapping_add(i as u64), strategy).len())
        .collect();
    let n = h.len();
    let ratios: Vec<f64> = layer_counts.iter().map(|&c| n as f64 / c as f64).collect();
    let mean = ratios.iter().sum::<f64>() / runs as f64;
    let var = ratios.iter().map(|r| (r - mean).powi(2)).sum::<f64>() / runs as f64;
    Ok(LayeringStats {
        n_terms: n,
        runs,
        seed,
        strategy,
        min_ratio: ratios.iter().copied().fold(f64::INFINITY, f64::min),
        max_ratio: ratios.iter().copied().fold(0.0, f64::max),
        mean_ratio: mean,
        std_ratio: var.sqrt(),
        ratios,
        layer_counts,
    })
}
