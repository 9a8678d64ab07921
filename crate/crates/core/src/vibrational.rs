//! L-mode vibrational Hamiltonians in a harmonic-oscillator modal basis.
//!
//! The potential is supplied as a polynomial in dimensionless normal
//! coordinates. The harmonic part `ω_l (−½∂² + ½Q²)` of every mode is folded
//! analytically into the diagonal `ω_l (n + ½)`, so PES terms describe only the
//! anharmonic remainder and couplings.

use std::collections::{BTreeMap, HashMap};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VibProblem {
    pub n_modes: usize,
    pub truncation_order: usize,
    pub modals: usize,
    #[serde(rename = "omegas_cm1")]
    pub omegas: Vec<f64>,
    /// Optional per-mode modal counts; sizing always uses the uniform `modals`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub modals_per_mode: Option<Vec<usize>>,
}

impl VibProblem {
    pub fn new(n_modes: usize, truncation_order: usize, modals: usize, omegas: Vec<f64>) -> Result<Self> {
        let p = VibProblem {
            n_modes,
            truncation_order,
            modals,
            omegas,
            modals_per_mode: None,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_modes == 0 {
            return Err(Error::validation("n_modes must be at least 1"));
        }
        if self.truncation_order == 0 || self.truncation_order > self.n_modes {
            return Err(Error::validation(format!(
                "truncation_order must satisfy 1 <= D <= L, got D={} L={}",
                self.truncation_order, self.n_modes
            )));
        }
        if self.modals < 2 {
            return Err(Error::validation(format!("modals must be >= 2, got {}", self.modals)));
        }
        if self.omegas.len() != self.n_modes {
            return Err(Error::validation(format!(
                "expected {} harmonic frequencies, got {}",
                self.n_modes,
                self.omegas.len()
            )));
        }
        if let Some((l, w)) = self.omegas.iter().enumerate().find(|(_, w)| !(**w > 0.0 && w.is_finite())) {
            return Err(Error::validation(format!("omega of mode {l} must be positive, got {w}")));
        }
        if let Some(per_mode) = &self.modals_per_mode {
            if per_mode.len() != self.n_modes {
                return Err(Error::validation("modals_per_mode length must equal n_modes"));
            }
            if per_mode.iter().any(|&d| d == 0 || d > self.modals) {
                return Err(Error::validation(
                    "modals_per_mode entries must lie in 1..=modals",
                ));
            }
        }
        Ok(())
    }
}

/// One monomial `coeff · ∏ Q_{modes[i]}^{powers[i]}` of the anharmonic PES.
/// An empty `modes` list is the constant `V_0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PesTerm {
    pub modes: Vec<usize>,
    pub powers: Vec<u32>,
    #[serde(rename = "coeff_cm1")]
    pub coeff: f64,
}

impl PesTerm {
    pub fn new(modes: Vec<usize>, powers: Vec<u32>, coeff: f64) -> Self {
        PesTerm { modes, powers, coeff }
    }

    fn check(&self, index: usize, problem: &VibProblem) -> Result<()> {
        let bad = |why: String| {
            Error::validation(format!(
                "PES term {index} (modes {:?}, powers {:?}): {why}",
                self.modes, self.powers
            ))
        };
        if self.modes.len() != self.powers.len() {
            return Err(bad("modes and powers differ in length".into()));
        }
        if self.modes.len() > problem.truncation_order {
            return Err(bad(format!(
                "couples {} modes but truncation order is {}",
                self.modes.len(),
                problem.truncation_order
            )));
        }
        if let Some(&m) = self.modes.iter().find(|&&m| m >= problem.n_modes) {
            return Err(bad(format!("mode index {m} out of range for {} modes", problem.n_modes)));
        }
        if self.modes.windows(2).any(|w| w[0] >= w[1]) {
            return Err(bad("mode indices must be strictly increasing".into()));
        }
        if self.powers.contains(&0) {
            return Err(bad("powers must be >= 1".into()));
        }
        if !self.coeff.is_finite() {
            return Err(bad("coefficient is not finite".into()));
        }
        Ok(())
    }
}

/// `a†_raise a_lower` acting on one mode.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct SqFactor {
    pub mode: usize,
    pub raise: usize,
    pub lower: usize,
}

impl SqFactor {
    pub fn new(mode: usize, raise: usize, lower: usize) -> Self {
        SqFactor { mode, raise, lower }
    }

    pub fn adjoint(self) -> Self {
        SqFactor {
            mode: self.mode,
            raise: self.lower,
            lower: self.raise,
        }
    }
}

/// Product of transfer operators on distinct modes, modes ascending.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SqTerm {
    #[serde(rename = "coeff_cm1")]
    pub coeff: f64,
    pub factors: Vec<SqFactor>,
}

impl SqTerm {
    pub fn new(coeff: f64, factors: Vec<SqFactor>) -> Self {
        SqTerm { coeff, factors }
    }

    pub fn adjoint_factors(&self) -> Vec<SqFactor> {
        self.factors.iter().map(|f| f.adjoint()).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SecondQuantizedHamiltonian {
    pub n_modes: usize,
    pub modals: usize,
    /// Energy offset `V_0` (identity term).
    #[serde(default, rename = "constant_cm1")]
    pub constant: f64,
    pub terms: Vec<SqTerm>,
}

impl SecondQuantizedHamiltonian {
    /// Largest number of modes coupled by a single term.
    pub fn coupling_order(&self) -> usize {
        self.terms.iter().map(|t| t.factors.len()).max().unwrap_or(0)
    }

    pub fn max_abs_coeff(&self) -> f64 {
        self.terms.iter().map(|t| t.coeff.abs()).fold(0.0, f64::max)
    }

    /// Structural checks: mode/modal ranges and strictly increasing modes.
    pub fn validate(&self) -> Result<()> {
        for (i, t) in self.terms.iter().enumerate() {
            if !t.coeff.is_finite() {
                return Err(Error::validation(format!("term {i}: coefficient is not finite")));
            }
            if t.factors.windows(2).any(|w| w[0].mode >= w[1].mode) {
                return Err(Error::validation(format!(
                    "term {i}: factor modes must be strictly increasing"
                )));
            }
            for f in &t.factors {
                if f.mode >= self.n_modes {
                    return Err(Error::validation(format!(
                        "term {i}: mode {} out of range for {} modes",
                        f.mode, self.n_modes
                    )));
                }
                if f.raise >= self.modals || f.lower >= self.modals {
                    return Err(Error::validation(format!(
                        "term {i}: modal index ({}, {}) out of range for {} modals",
                        f.raise, f.lower, self.modals
                    )));
                }
            }
        }
        Ok(())
    }
}

/// `⟨m|Q^k|n⟩` for the dimensionless oscillator, `Q = (a + a†)/√2`.
///
/// Evaluated by applying the tridiagonal `Q` `k` times to `|n⟩` in a basis of
/// `d + k` levels, which is large enough for the result to be exact.
pub fn ho_matrix_element(m: usize, n: usize, k: u32, d: usize) -> Result<f64> {
    if m >= d || n >= d {
        return Err(Error::argument(format!(
            "modal indices ({m}, {n}) must be below basis size {d}"
        )));
    }
    let gap = m.abs_diff(n);
    if gap > k as usize || (k as usize - gap) % 2 == 1 {
        return Ok(0.0);
    }
    let size = d + k as usize;
    let off: Vec<f64> = (0..size - 1).map(|i| ((i + 1) as f64 / 2.0).sqrt()).collect();
    let mut v = vec![0.0; size];
    v[n] = 1.0;
    let mut next = vec![0.0; size];
    for _ in 0..k {
        for i in 0..size {
            let lo = if i > 0 { off[i - 1] * v[i - 1] } else { 0.0 };
            let hi = if i + 1 < size { off[i] * v[i + 1] } else { 0.0 };
            next[i] = lo + hi;
        }
        std::mem::swap(&mut v, &mut next);
    }
    Ok(v[m])
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BuildOptions {
    /// Terms with `|coeff| <= cutoff` are dropped; zero keeps every non-zero integral.
    pub cutoff: f64,
}

impl Default for BuildOptions {
    fn default() -> Self {
        BuildOptions { cutoff: 0.0 }
    }
}

/// Assembles the second-quantized Hamiltonian from harmonic frequencies and
/// anharmonic PES monomials. Integrals are products of one-mode
/// `⟨k|Q^p|h⟩` elements; identical operator products are merged.
pub fn build_second_quantized(
    problem: &VibProblem,
    pes: &[PesTerm],
    opts: BuildOptions,
) -> Result<SecondQuantizedHamiltonian> {
    problem.validate()?;
    if !(opts.cutoff >= 0.0) {
        return Err(Error::argument("assembly cutoff must be >= 0"));
    }
    for (i, t) in pes.iter().enumerate() {
        t.check(i, problem)?;
    }
    let d = problem.modals;

    let mut tables: HashMap<u32, Vec<f64>> = HashMap::new();
    for t in pes {
        for &k in &t.powers {
            if let std::collections::hash_map::Entry::Vacant(e) = tables.entry(k) {
                let mut tab = vec![0.0; d * d];
                for a in 0..d {
                    for b in 0..d {
                        tab[a * d + b] = ho_matrix_element(a, b, k, d)?;
                    }
                }
                e.insert(tab);
            }
        }
    }

    let mut acc: BTreeMap<Vec<SqFactor>, f64> = BTreeMap::new();
    for (l, &w) in problem.omegas.iter().enumerate() {
        for n in 0..d {
            *acc.entry(vec![SqFactor::new(l, n, n)]).or_insert(0.0) += w * (n as f64 + 0.5);
        }
    }

    let mut constant = 0.0;
    let contributions: Vec<Vec<(Vec<SqFactor>, f64)>> = pes
        .par_iter()
        .map(|t| pes_integrals(t, d, &tables))
        .collect();
    for (t, contrib) in pes.iter().zip(contributions) {
        if t.modes.is_empty() {
            constant += t.coeff;
        }
        for (key, v) in contrib {
            *acc.entry(key).or_insert(0.0) += v;
        }
    }

    let terms = acc
        .into_iter()
        .filter(|(_, c)| *c != 0.0 && c.abs() > opts.cutoff)
        .map(|(factors, coeff)| SqTerm { coeff, factors })
        .collect();
    Ok(SecondQuantizedHamiltonian {
        n_modes: problem.n_modes,
        modals: d,
        constant,
        terms,
    })
}

fn pes_integrals(t: &PesTerm, d: usize, tables: &HashMap<u32, Vec<f64>>) -> Vec<(Vec<SqFactor>, f64)> {
    let m = t.modes.len();
    if m == 0 {
        return Vec::new();
    }
    let per_mode: Vec<Vec<(usize, usize, f64)>> = t
        .powers
        .iter()
        .map(|k| {
            let tab = &tables[k];
            (0..d * d)
                .filter(|&i| tab[i] != 0.0)
                .map(|i| (i / d, i % d, tab[i]))
                .collect()
        })
        .collect();
    let mut out = Vec::new();
    let mut idx = vec![0usize; m];
    if per_mode.iter().any(|v| v.is_empty()) {
        return out;
    }
    loop {
        let mut value = t.coeff;
        let mut key = Vec::with_capacity(m);
        for (j, &i) in idx.iter().enumerate() {
            let (k, h, e) = per_mode[j][i];
            value *= e;
            key.push(SqFactor::new(t.modes[j], k, h));
        }
        out.push((key, value));
        // odometer over the non-zero one-mode elements
        let mut j = m;
        loop {
            if j == 0 {
                return out;
            }
            j -= 1;
            idx[j] += 1;
            if idx[j] < per_mode[j].len() {
                break;
            }
            idx[j] = 0;
        }
    }
}

fn binomial(n: u128, k: u128) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut r = 1u128;
    for i in 0..k {
        r = r * (n - i) / (i + 1);
    }
    r
}

/// Number of summands of the second-quantized Hamiltonian, zeros included:
/// `Σ_{m=1}^{D} C(L, m) · d^{2m}`.
pub fn count_terms(n_modes: usize, modals: usize, order: usize) -> Result<u128> {
    if order == 0 || order > n_modes {
        return Err(Error::argument(format!(
            "truncation order must satisfy 1 <= D <= L, got D={order} L={n_modes}"
        )));
    }
    if modals == 0 {
        return Err(Error::argument("modals must be >= 1"));
    }
    let d2 = (modals as u128).pow(2);
    let mut total = 0u128;
    for m in 1..=order as u32 {
        let term = binomial(n_modes as u128, m as u128)
            .checked_mul(d2.checked_pow(m).ok_or_else(|| Error::argument("term count overflows"))?)
            .ok_or_else(|| Error::argument("term count overflows"))?;
        total = total
            .checked_add(term)
            .ok_or_else(|| Error::argument("term count overflows"))?;
    }
    Ok(total)
}

/// Vibrational modes of a linear polyyne: `6 · n_triple_bonds + 1`.
pub fn polyyne_modes(n_triple_bonds: i64) -> Result<usize> {
    if n_triple_bonds < 1 {
        return Err(Error::argument(format!(
            "number of triple bonds must be >= 1, got {n_triple_bonds}"
        )));
    }
    Ok(6 * n_triple_bonds as usize + 1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use vibrest_oracle::dense;

    fn as_plain(sq: &SecondQuantizedHamiltonian) -> Vec<(f64, Vec<(usize, usize, usize)>)> {
        sq.terms
            .iter()
            .map(|t| (t.coeff, t.factors.iter().map(|f| (f.mode, f.raise, f.lower)).collect()))
            .collect()
    }

    #[test]
    fn ho_elements_small_cases() {
        assert!((ho_matrix_element(0, 1, 1, 4).unwrap() - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-15);
        assert_eq!(ho_matrix_element(0, 0, 1, 4).unwrap(), 0.0);
        assert!((ho_matrix_element(0, 0, 2, 4).unwrap() - 0.5).abs() < 1e-15);
        assert_eq!(ho_matrix_element(2, 2, 0, 4).unwrap(), 1.0);
        assert!(ho_matrix_element(4, 0, 1, 4).is_err());
    }

    #[test]
    fn ho_q_squared_ground_matches_diagonalization() {
        let v = dense::ho_element_by_eigen(0, 0, 2, 8);
        assert!((v - 0.5).abs() < 1e-12);
        assert!((ho_matrix_element(0, 0, 2, 2).unwrap() - v).abs() < 1e-12);
    }

    #[test]
    fn ho_elements_agree_with_eigen_oracle_and_selection_rule() {
        for d in 2..6 {
            for k in 0..7u32 {
                for m in 0..d {
                    for n in 0..d {
                        let got = ho_matrix_element(m, n, k, d).unwrap();
                        let want = dense::ho_element_by_eigen(m, n, k, d + k as usize + 2);
                        assert!((got - want).abs() < 1e-10 * (1.0 + want.abs()), "m={m} n={n} k={k}");
                        let gap = m.abs_diff(n);
                        if gap > k as usize || (k as usize + gap) % 2 == 1 {
                            assert_eq!(got, 0.0);
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn pure_harmonic_single_mode() {
        let p = VibProblem::new(1, 1, 2, vec![1000.0]).unwrap();
        let sq = build_second_quantized(&p, &[], BuildOptions::default()).unwrap();
        assert_eq!(sq.terms.len(), 2);
        assert_eq!(sq.terms[0], SqTerm::new(500.0, vec![SqFactor::new(0, 0, 0)]));
        assert_eq!(sq.terms[1], SqTerm::new(1500.0, vec![SqFactor::new(0, 1, 1)]));
    }

    #[test]
    fn linear_pes_term_gives_off_diagonal_pair() {
        let p = VibProblem::new(1, 1, 2, vec![1000.0]).unwrap();
        let c = 30.0;
        let sq = build_second_quantized(&p, &[PesTerm::new(vec![0], vec![1], c)], BuildOptions::default()).unwrap();
        let off: Vec<_> = sq.terms.iter().filter(|t| t.factors[0].raise != t.factors[0].lower).collect();
        assert_eq!(off.len(), 2);
        for t in off {
            assert!((t.coeff - c / 2f64.sqrt()).abs() < 1e-12);
        }
    }

    #[test]
    fn bilinear_coupling_matches_kronecker_oracle() {
        let c = 12.5;
        let p = VibProblem::new(2, 2, 3, vec![1.0, 1.0]).unwrap();
        let sq = build_second_quantized(&p, &[PesTerm::new(vec![0, 1], vec![1, 1], c)], BuildOptions::default())
            .unwrap();
        // Dense: ω(n+½) on each mode plus c·Q⊗Q.
        let q = dense::oscillator_q(3).map(|v| num_complex::Complex64::new(v, 0.0));
        let mut h = dense::kron(&q, &q) * num_complex::Complex64::new(c, 0.0);
        let mut diag = dense::CMatrix::zeros(3, 3);
        for n in 0..3 {
            diag[(n, n)] = num_complex::Complex64::new(n as f64 + 0.5, 0.0);
        }
        h += dense::kron(&diag, &dense::identity(3)) + dense::kron(&dense::identity(3), &diag);
        let got = dense::bosonic_operator(2, 3, &as_plain(&sq));
        assert!(dense::max_abs_diff(&got, &h) < 1e-12);
    }

    #[test]
    fn assembled_operator_is_hermitian() {
        let p = VibProblem::new(3, 3, 3, vec![900.0, 1400.0, 2100.0]).unwrap();
        let pes = vec![
            PesTerm::new(vec![0], vec![3], 15.0),
            PesTerm::new(vec![1], vec![4], 3.0),
            PesTerm::new(vec![0, 2], vec![1, 2], -7.0),
            PesTerm::new(vec![0, 1, 2], vec![1, 1, 1], 2.5),
        ];
        let sq = build_second_quantized(&p, &pes, BuildOptions::default()).unwrap();
        let map: HashMap<Vec<SqFactor>, f64> = sq.terms.iter().map(|t| (t.factors.clone(), t.coeff)).collect();
        for t in &sq.terms {
            assert_eq!(map[&t.adjoint_factors()], t.coeff);
        }
        let m = dense::bosonic_operator(3, 3, &as_plain(&sq));
        assert!(dense::max_abs_diff(&m, &m.adjoint()) < 1e-12);
        assert!(sq.terms.len() as u128 <= count_terms(3, 3, 3).unwrap());
    }

    #[test]
    fn harmonic_spectrum_recovered() {
        let omegas = [612.0, 1974.0, 3289.0];
        for l in 1..=3 {
            for d in 2..=4 {
                let p = VibProblem::new(l, l, d, omegas[..l].to_vec()).unwrap();
                let sq = build_second_quantized(&p, &[], BuildOptions::default()).unwrap();
                let eig = dense::hermitian_eigenvalues(&dense::bosonic_operator(l, d, &as_plain(&sq)));
                let mut want: Vec<f64> = (0..d.pow(l as u32))
                    .map(|b| {
                        dense::modal_digits(b, l, d)
                            .iter()
                            .zip(&omegas)
                            .map(|(&n, w)| w * (n as f64 + 0.5))
                            .sum()
                    })
                    .collect();
                want.sort_by(|a, b| a.partial_cmp(b).unwrap());
                for (g, w) in eig.iter().zip(&want) {
                    assert!((g - w).abs() <= 1e-10 * w.abs());
                }
            }
        }
    }

    #[test]
    fn invalid_pes_term_is_named() {
        let p = VibProblem::new(2, 2, 2, vec![1.0, 1.0]).unwrap();
        let err = build_second_quantized(&p, &[PesTerm::new(vec![0, 5], vec![1, 1], 1.0)], BuildOptions::default())
            .unwrap_err()
            .to_string();
        assert!(err.contains("PES term 0"), "{err}");
        assert!(err.contains("mode index 5"), "{err}");
        let err = build_second_quantized(&p, &[PesTerm::new(vec![1, 0], vec![1, 1], 1.0)], BuildOptions::default());
        assert!(err.is_err());
    }

    #[test]
    fn constant_goes_to_offset() {
        let p = VibProblem::new(1, 1, 2, vec![100.0]).unwrap();
        let sq = build_second_quantized(&p, &[PesTerm::new(vec![], vec![], 42.0)], BuildOptions::default()).unwrap();
        assert_eq!(sq.constant, 42.0);
        assert_eq!(sq.terms.len(), 2);
    }

    #[test]
    fn assembly_cutoff_drops_small_terms() {
        let p = VibProblem::new(1, 1, 3, vec![100.0]).unwrap();
        let pes = [PesTerm::new(vec![0], vec![1], 1e-3)];
        let all = build_second_quantized(&p, &pes, BuildOptions::default()).unwrap();
        let cut = build_second_quantized(&p, &pes, BuildOptions { cutoff: 1e-2 }).unwrap();
        assert_eq!(cut.terms.len(), 3);
        assert!(all.terms.len() > cut.terms.len());
    }

    #[test]
    fn problem_validation() {
        assert!(VibProblem::new(2, 3, 2, vec![1.0, 1.0]).is_err());
        assert!(VibProblem::new(2, 1, 1, vec![1.0, 1.0]).is_err());
        assert!(VibProblem::new(2, 1, 2, vec![1.0, -1.0]).is_err());
        assert!(VibProblem::new(2, 1, 2, vec![1.0]).is_err());
    }

    #[test]
    fn count_terms_table_values() {
        assert_eq!(count_terms(7, 4, 3).unwrap(), 148_848);
        assert_eq!(count_terms(13, 4, 3).unwrap(), 1_191_632);
        assert_eq!(count_terms(1, 1, 1).unwrap(), 1);
        assert!(count_terms(2, 4, 3).is_err());
    }

    #[test]
    fn count_terms_matches_enumeration() {
        // Brute force: every nonempty mode subset of size <= D times every choice of (k, h) per mode.
        for l in 1..=5usize {
            for d in 1..=3usize {
                for dd in 1..=l.min(3) {
                    let mut n = 0u128;
                    for mask in 1u32..(1 << l) {
                        let m = mask.count_ones() as usize;
                        if m > dd {
                            continue;
                        }
                        let mut tuples = 1u128;
                        for _ in 0..m {
                            let mut pairs = 0;
                            for _k in 0..d {
                                for _h in 0..d {
                                    pairs += 1;
                                }
                            }
                            tuples *= pairs;
                        }
                        n += tuples;
                    }
                    assert_eq!(count_terms(l, d, dd).unwrap(), n, "L={l} d={d} D={dd}");
                }
            }
        }
    }

    #[test]
    fn polyyne_mode_counts() {
        assert_eq!(polyyne_modes(1).unwrap(), 7);
        assert_eq!(polyyne_modes(3).unwrap(), 19);
        assert_eq!(polyyne_modes(80).unwrap(), 481);
        assert!(polyyne_modes(0).is_err());
        assert!(polyyne_modes(-2).is_err());
    }
}
