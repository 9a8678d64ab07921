//! Commutator scaling of a Pauli-sum Hamiltonian,
//! `α_p(S) = Σ_{i_0..i_p ∈ S} ‖[H_{i_p}, [..., [H_{i_1}, H_{i_0}]]]‖`,
//! exactly and through threshold-splitting bounds.
//!
//! Every nested commutator of weighted Pauli strings is either zero or has norm
//! `2^p ∏|c|`, and it is non-zero iff each `P_i` (i ≥ 1) anticommutes with an
//! odd number of the strings nested inside it. Because the symplectic form is
//! bilinear, that parity equals the symplectic product of `P_i` with the XOR of
//! the inner strings, so the admissible choices for level `k + 1` are the
//! symmetric difference of the anticommutation neighbourhoods of the strings
//! already chosen. The enumeration walks only admissible prefixes.

use std::sync::atomic::{AtomicBool, AtomicU64, Ordering};
use std::time::Instant;

use rayon::prelude::*;
use serde::{Serialize, Serializer};

use crate::encoding::WeightedPauliHamiltonian;
use crate::error::{Error, Result};
use crate::pauli::symplectic_parity;

/// Default cap on parity checks for one exact evaluation.
pub const DEFAULT_BUDGET: u64 = 10_000_000_000;

/// Above this many strings the neighbourhood lists are not materialized.
const ADJACENCY_LIMIT: usize = 20_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ScalingMode {
    Exact,
    Crude,
    Split,
}

/// How the triangle-inequality cross terms of the splitting bound are weighted.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum BoundConvention {
    /// Cross terms `C(p+1,k) N_big^{p+1-k} N_small^k` and crude bound
    /// `N(S)^{p+1}`, without the `2^p` that a nested commutator of norm-bounded
    /// operators can carry. Matches the usual tabulated formulas; can fall
    /// below the exact α when many terms anticommute.
    #[default]
    Unscaled,
    /// Every cross term carries the commutator factor (`2^p` for the binomial
    /// terms, 2 for the refined second-order terms). Always a valid upper bound.
    Rigorous,
}

#[derive(Debug, Clone, Copy)]
pub struct ScalingOptions {
    pub budget: u64,
    pub convention: BoundConvention,
    /// Use `N_small α₁(S_big) + N_big (α₁(S) − α₁(S_big))` for the p = 2
    /// single-small cross term.
    pub refine_second_order: bool,
    /// One further split level for p = 2: also refines the two-small cross
    /// term using `α₁(S_small)`.
    pub extra_level: bool,
}

impl Default for ScalingOptions {
    fn default() -> Self {
        ScalingOptions {
            budget: DEFAULT_BUDGET,
            convention: BoundConvention::Unscaled,
            refine_second_order: true,
            extra_level: false,
        }
    }
}

fn ser_tol<S: Serializer>(tol: &f64, s: S) -> std::result::Result<S::Ok, S::Error> {
    if tol.is_infinite() {
        s.serialize_str("inf")
    } else {
        s.serialize_f64(*tol)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScalingResult {
    pub p: usize,
    pub mode: ScalingMode,
    pub convention: BoundConvention,
    pub lower: f64,
    pub upper: f64,
    #[serde(serialize_with = "ser_tol")]
    pub tol: f64,
    pub n_big: usize,
    pub n_small: usize,
    pub norm_big: f64,
    pub norm_small: f64,
    /// Non-zero nested commutators found while enumerating `S_big`.
    pub tuples_evaluated: u64,
    pub parity_checks: u64,
    pub wall_time_s: f64,
}

/// Outcome of an exact enumeration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExactAlpha {
    pub value: f64,
    pub tuples: u64,
    pub checks: u64,
}

/// Sum in a fixed binary tree over the slice order.
pub(crate) fn pairwise_sum(v: &[f64]) -> f64 {
    match v.len() {
        0 => 0.0,
        1 => v[0],
        n if n <= 8 => v.iter().sum(),
        n => pairwise_sum(&v[..n / 2]) + pairwise_sum(&v[n / 2..]),
    }
}

fn check_subset(h: &WeightedPauliHamiltonian, subset: &[usize]) -> Result<()> {
    if let Some(&i) = subset.iter().find(|&&i| i >= h.terms.len()) {
        return Err(Error::argument(format!(
            "subset index {i} out of range for {} terms",
            h.terms.len()
        )));
    }
    Ok(())
}

/// `N(S) = Σ_{i∈S} |c_i|`.
pub fn term_norm_sum(h: &WeightedPauliHamiltonian, subset: &[usize]) -> Result<f64> {
    check_subset(h, subset)?;
    let v: Vec<f64> = subset.iter().map(|&i| h.terms[i].coeff.abs()).collect();
    Ok(pairwise_sum(&v))
}

/// `(Σ|c_i|)^{p+1}`.
pub fn crude_bound(h: &WeightedPauliHamiltonian, p: usize) -> f64 {
    let all: Vec<usize> = (0..h.terms.len()).collect();
    let n = term_norm_sum(h, &all).expect("full index set is valid");
    n.powi(p as i32 + 1)
}

/// Crude bound packaged as a [`ScalingResult`].
pub fn crude_result(h: &WeightedPauliHamiltonian, p: usize, convention: BoundConvention) -> ScalingResult {
    let start = Instant::now();
    let all: Vec<usize> = (0..h.terms.len()).collect();
    let n = term_norm_sum(h, &all).expect("full index set is valid");
    let factor = match convention {
        BoundConvention::Unscaled => 1.0,
        BoundConvention::Rigorous => 2f64.powi(p as i32),
    };
    ScalingResult {
        p,
        mode: ScalingMode::Crude,
        convention,
        lower: 0.0,
        upper: factor * n.powi(p as i32 + 1),
        tol: f64::INFINITY,
        n_big: 0,
        n_small: h.terms.len(),
        norm_big: 0.0,
        norm_small: n,
        tuples_evaluated: 0,
        parity_checks: 0,
        wall_time_s: start.elapsed().as_secs_f64(),
    }
}

/// Terms of a subset packed into flat word arrays.
struct Packed {
    words: usize,
    x: Vec<u64>,
    z: Vec<u64>,
    w: Vec<f64>,
}

impl Packed {
    fn new(h: &WeightedPauliHamiltonian, subset: &[usize]) -> Self {
        let words = crate::pauli::words_for(h.n_qubits);
        let mut x = Vec::with_capacity(words * subset.len());
        let mut z = Vec::with_capacity(words * subset.len());
        let mut w = Vec::with_capacity(subset.len());
        for &i in subset {
            let t = &h.terms[i];
            x.extend_from_slice(t.pauli.x_words());
            z.extend_from_slice(t.pauli.z_words());
            w.push(t.coeff.abs());
        }
        Packed { words, x, z, w }
    }

    fn len(&self) -> usize {
        self.w.len()
    }

    #[inline]
    fn xs(&self, i: usize) -> &[u64] {
        &self.x[i * self.words..(i + 1) * self.words]
    }

    #[inline]
    fn zs(&self, i: usize) -> &[u64] {
        &self.z[i * self.words..(i + 1) * self.words]
    }

    #[inline]
    fn anticommute(&self, i: usize, j: usize) -> bool {
        symplectic_parity(self.xs(i), self.zs(i), self.xs(j), self.zs(j))
    }

    #[inline]
    fn anticommute_mask(&self, i: usize, mx: &[u64], mz: &[u64]) -> bool {
        symplectic_parity(self.xs(i), self.zs(i), mx, mz)
    }
}

/// Shared accounting for the parity-check budget.
struct Budget {
    limit: u64,
    spent: AtomicU64,
    exceeded: AtomicBool,
}

impl Budget {
    fn new(limit: u64) -> Self {
        Budget {
            limit,
            spent: AtomicU64::new(0),
            exceeded: AtomicBool::new(false),
        }
    }

    /// Records `n` checks; false once the budget is gone.
    fn charge(&self, n: u64) -> bool {
        let total = self.spent.fetch_add(n, Ordering::Relaxed) + n;
        if total > self.limit {
            self.exceeded.store(true, Ordering::Relaxed);
        }
        !self.exceeded.load(Ordering::Relaxed)
    }

    fn finish(&self) -> Result<u64> {
        let spent = self.spent.load(Ordering::Relaxed);
        if self.exceeded.load(Ordering::Relaxed) {
            return Err(Error::ResourceLimit {
                budget: self.limit,
                spent,
            });
        }
        Ok(spent)
    }
}

/// Exact `α_p` over `subset` with the default budget.
pub fn alpha_exact(h: &WeightedPauliHamiltonian, p: usize, subset: &[usize]) -> Result<f64> {
    alpha_exact_with(h, p, subset, DEFAULT_BUDGET).map(|r| r.value)
}

/// Exact `α_p` over `subset`, failing with [`Error::ResourceLimit`] once more
/// than `budget` parity checks would be spent.
pub fn alpha_exact_with(h: &WeightedPauliHamiltonian, p: usize, subset: &[usize], budget: u64) -> Result<ExactAlpha> {
    if p == 0 {
        return Err(Error::argument("product-formula order p must be >= 1"));
    }
    check_subset(h, subset)?;
    let packed = Packed::new(h, subset);
    let n = packed.len();
    if n < 2 {
        return Ok(ExactAlpha {
            value: 0.0,
            tuples: 0,
            checks: 0,
        });
    }
    let budget = Budget::new(budget);
    if (n as u64).saturating_mul(n as u64) > budget.limit {
        budget.charge((n as u64).saturating_mul(n as u64));
        budget.finish()?;
    }
    let scale = 2f64.powi(p as i32);
    let (partials, tuples): (Vec<f64>, Vec<u64>) = if p == 1 {
        alpha_one_rows(&packed, &budget)
    } else if n <= ADJACENCY_LIMIT {
        enumerate_adjacency(&packed, p, &budget)
    } else {
        enumerate_streaming(&packed, p, &budget)
    };
    let checks = budget.finish()?;
    Ok(ExactAlpha {
        value: scale * pairwise_sum(&partials),
        tuples: tuples.iter().sum(),
        checks,
    })
}

fn alpha_one_rows(packed: &Packed, budget: &Budget) -> (Vec<f64>, Vec<u64>) {
    let n = packed.len();
    (0..n)
        .into_par_iter()
        .map(|i| {
            if !budget.charge(n as u64) {
                return (0.0, 0);
            }
            let mut s = 0.0;
            let mut count = 0;
            for j in 0..n {
                if packed.anticommute(i, j) {
                    s += packed.w[j];
                    count += 1;
                }
            }
            (packed.w[i] * s, count)
        })
        .unzip()
}

fn enumerate_adjacency(packed: &Packed, p: usize, budget: &Budget) -> (Vec<f64>, Vec<u64>) {
    let n = packed.len();
    let adj: Vec<Vec<u32>> = (0..n)
        .into_par_iter()
        .map(|i| {
            budget.charge(n as u64);
            (0..n).filter(|&j| packed.anticommute(i, j)).map(|j| j as u32).collect()
        })
        .collect();
    if budget.exceeded.load(Ordering::Relaxed) {
        return (vec![0.0], vec![0]);
    }
    (0..n)
        .into_par_iter()
        .map(|i0| {
            let mut levels: Vec<Vec<u32>> = vec![Vec::new(); p + 1];
            levels[1] = adj[i0].clone();
            let mut walk = Walk {
                adj: &adj,
                w: &packed.w,
                p,
                budget,
                tuples: 0,
                pending: 0,
            };
            let s = walk.descend(&mut levels, 1);
            budget.charge(walk.pending);
            (packed.w[i0] * s, walk.tuples)
        })
        .unzip()
}

struct Walk<'a> {
    adj: &'a [Vec<u32>],
    w: &'a [f64],
    p: usize,
    budget: &'a Budget,
    tuples: u64,
    pending: u64,
}

impl Walk<'_> {
    /// Sum over admissible choices at `level` given candidates `levels[level]`.
    fn descend(&mut self, levels: &mut [Vec<u32>], level: usize) -> f64 {
        let cand = std::mem::take(&mut levels[level]);
        let mut s = 0.0;
        if level == self.p {
            for &t in &cand {
                s += self.w[t as usize];
            }
            self.tuples += cand.len() as u64;
            self.pending += cand.len() as u64;
        } else {
            for &t in &cand {
                if self.pending > 1 << 16 {
                    if !self.budget.charge(self.pending) {
                        self.pending = 0;
                        break;
                    }
                    self.pending = 0;
                }
                let next = &self.adj[t as usize];
                self.pending += (cand.len() + next.len()) as u64;
                if level + 1 == self.p {
                    // last level: sum over the symmetric difference without materializing it
                    let inner = sym_diff_weight(&cand, next, self.w);
                    self.tuples += inner.1;
                    s += self.w[t as usize] * inner.0;
                } else {
                    let mut buf = std::mem::take(&mut levels[level + 1]);
                    sym_diff_into(&cand, next, &mut buf);
                    levels[level + 1] = buf;
                    s += self.w[t as usize] * self.descend(levels, level + 1);
                }
            }
        }
        levels[level] = cand;
        s
    }
}

fn sym_diff_into(a: &[u32], b: &[u32], out: &mut Vec<u32>) {
    out.clear();
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => {
                out.push(a[i]);
                i += 1;
            }
            std::cmp::Ordering::Greater => {
                out.push(b[j]);
                j += 1;
            }
            std::cmp::Ordering::Equal => {
                i += 1;
                j += 1;
            }
        }
    }
    out.extend_from_slice(&a[i..]);
    out.extend_from_slice(&b[j..]);
}

fn sym_diff_weight(a: &[u32], b: &[u32], w: &[f64]) -> (f64, u64) {
    let (mut i, mut j) = (0, 0);
    let mut s = 0.0;
    let mut count = 0;
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => {
                s += w[a[i] as usize];
                count += 1;
                i += 1;
            }
            std::cmp::Ordering::Greater => {
                s += w[b[j] as usize];
                count += 1;
                j += 1;
            }
            std::cmp::Ordering::Equal => {
                i += 1;
                j += 1;
            }
        }
    }
    for &t in a[i..].iter().chain(&b[j..]) {
        s += w[t as usize];
        count += 1;
    }
    (s, count)
}

/// Mask-based enumeration for sets too large for neighbourhood lists.
fn enumerate_streaming(packed: &Packed, p: usize, budget: &Budget) -> (Vec<f64>, Vec<u64>) {
    let n = packed.len();
    (0..n)
        .into_par_iter()
        .map(|i0| {
            let mut mx = packed.xs(i0).to_vec();
            let mut mz = packed.zs(i0).to_vec();
            let mut tuples = 0;
            let s = stream_level(packed, p, 1, &mut mx, &mut mz, budget, &mut tuples);
            (packed.w[i0] * s, tuples)
        })
        .unzip()
}

fn stream_level(
    packed: &Packed,
    p: usize,
    level: usize,
    mx: &mut [u64],
    mz: &mut [u64],
    budget: &Budget,
    tuples: &mut u64,
) -> f64 {
    let n = packed.len();
    if !budget.charge(n as u64) {
        return 0.0;
    }
    let mut s = 0.0;
    for t in 0..n {
        if !packed.anticommute_mask(t, mx, mz) {
            continue;
        }
        if level == p {
            s += packed.w[t];
            *tuples += 1;
        } else {
            xor_into(mx, packed.xs(t));
            xor_into(mz, packed.zs(t));
            s += packed.w[t] * stream_level(packed, p, level + 1, mx, mz, budget, tuples);
            xor_into(mx, packed.xs(t));
            xor_into(mz, packed.zs(t));
        }
    }
    s
}

fn xor_into(a: &mut [u64], b: &[u64]) {
    for (x, y) in a.iter_mut().zip(b) {
        *x ^= y;
    }
}

fn binomial(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// Splitting bounds at threshold `tol` with default options.
pub fn alpha_bounds(h: &WeightedPauliHamiltonian, p: usize, tol: f64) -> Result<ScalingResult> {
    alpha_bounds_with(h, p, tol, &ScalingOptions::default())
}

/// Splits the terms into `S_big = {|c| > tol}` and `S_small`; the lower bound
/// is `α_p(S_big)` and the upper bound adds the cross terms of all tuples that
/// touch `S_small`. `tol = 0` gives the exact value, `tol = ∞` the crude bound.
pub fn alpha_bounds_with(
    h: &WeightedPauliHamiltonian,
    p: usize,
    tol: f64,
    opts: &ScalingOptions,
) -> Result<ScalingResult> {
    if tol.is_nan() || tol < 0.0 {
        return Err(Error::argument(format!("tolerance must be >= 0, got {tol}")));
    }
    if p == 0 {
        return Err(Error::argument("product-formula order p must be >= 1"));
    }
    let start = Instant::now();
    let (big, small): (Vec<usize>, Vec<usize>) = (0..h.terms.len()).partition(|&i| h.terms[i].coeff.abs() > tol);
    let nb = term_norm_sum(h, &big)?;
    let ns = term_norm_sum(h, &small)?;
    let exact = alpha_exact_with(h, p, &big, opts.budget)?;
    let mut checks = exact.checks;
    let lower = exact.value;

    let (commutator_factor, refined_factor) = match opts.convention {
        BoundConvention::Unscaled => (1.0, 1.0),
        BoundConvention::Rigorous => (2f64.powi(p as i32), 2.0),
    };
    let cross = |k: usize| commutator_factor * binomial(p + 1, k) * nb.powi((p + 1 - k) as i32) * ns.powi(k as i32);

    let upper = if small.is_empty() {
        lower
    } else if p == 2 && opts.refine_second_order && !big.is_empty() {
        let all: Vec<usize> = (0..h.terms.len()).collect();
        let a1_all = alpha_exact_with(h, 1, &all, opts.budget)?;
        let a1_big = alpha_exact_with(h, 1, &big, opts.budget)?;
        checks += a1_all.checks + a1_big.checks;
        let (one_small, two_small) = if opts.extra_level {
            let a1_small = alpha_exact_with(h, 1, &small, opts.budget)?;
            checks += a1_small.checks;
            let mixed = (a1_all.value - a1_big.value - a1_small.value).max(0.0);
            (
                refined_factor * (ns * a1_big.value + nb * mixed),
                refined_factor * (nb * a1_small.value + ns * mixed),
            )
        } else {
            let mixed = (a1_all.value - a1_big.value).max(0.0);
            (refined_factor * (ns * a1_big.value + nb * mixed), cross(2))
        };
        lower + one_small + two_small + cross(3)
    } else {
        lower + (1..=p + 1).map(cross).sum::<f64>()
    };

    let mode = if small.is_empty() {
        ScalingMode::Exact
    } else {
        ScalingMode::Split
    };
    Ok(ScalingResult {
        p,
        mode,
        convention: opts.convention,
        lower,
        upper,
        tol,
        n_big: big.len(),
        n_small: small.len(),
        norm_big: nb,
        norm_small: ns,
        tuples_evaluated: exact.tuples,
        parity_checks: checks,
        wall_time_s: start.elapsed().as_secs_f64(),
    })
}
