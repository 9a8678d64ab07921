//! Acceptance checks, one function per criterion. Each returns an
//! [`Outcome`]; the `acceptance` test target runs them all and reports.

use std::time::{Duration, Instant};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use vibrest_cli::{count_rows, count_table, CountArgs};
use vibrest_core::costing::{self, Approach, QpeConfig};
use vibrest_core::encoding::{binary_bits, locality_stats, EncodingKind, EncodingSpec, WeightedPauliHamiltonian};
use vibrest_core::layering::{depth_ratio, scan_layers_in_order};
use vibrest_core::pauli::{nested_commutator, PauliString, Sigma, WeightedPauli};
use vibrest_core::scaling::{
    alpha_bounds, alpha_bounds_with, alpha_exact, crude_bound, crude_result, BoundConvention, ScalingOptions,
};
use vibrest_core::synthetic::{random_pauli_hamiltonian, subsample, vibrational_hamiltonian, VibrationalConfig};
use vibrest_core::vibrational::{build_second_quantized, BuildOptions, SecondQuantizedHamiltonian, SqFactor, SqTerm, VibProblem};
use vibrest_core::encode;
use vibrest_oracle::dense;

#[derive(Debug, Clone)]
pub struct Outcome {
    pub id: u32,
    pub title: &'static str,
    pub passed: bool,
    pub detail: String,
    /// Informational lines that do not affect the verdict.
    pub notes: Vec<String>,
    pub elapsed: Duration,
}

impl Outcome {
    fn new(id: u32, title: &'static str, start: Instant, passed: bool, detail: String, notes: Vec<String>) -> Self {
        Outcome {
            id,
            title,
            passed,
            detail,
            notes,
            elapsed: start.elapsed(),
        }
    }
}

fn log_uniform(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> f64 {
    rng.random_range(lo.ln()..hi.ln()).exp()
}

fn body(p: &PauliString) -> String {
    (0..p.n_qubits()).map(|q| p.get(q).as_char()).collect()
}

fn weighted_matrix(w: &WeightedPauli) -> dense::CMatrix {
    let phase = Complex64::new(0.0, 1.0).powu(w.pauli.phase().exponent() as u32);
    dense::pauli_matrix(&body(&w.pauli)) * (phase * w.coeff)
}

fn terms_of(h: &WeightedPauliHamiltonian) -> Vec<(f64, String)> {
    h.terms.iter().map(|t| (t.coeff, body(&t.pauli))).collect()
}

fn rel_close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * a.abs().max(b.abs())
}

pub fn term_count_table() -> Outcome {
    let start = Instant::now();
    let expected: [(usize, usize, u128); 7] = [
        (7, 4, 148848),
        (7, 6, 1660428),
        (13, 4, 1191632),
        (13, 6, 13445172),
        (19, 4, 4013104),
        (19, 6, 45431964),
        (25, 4, 9498000),
    ];
    let rows = count_rows(&CountArgs {
        triple_bonds: vec![1, 2, 3, 4],
        modes: vec![],
        modals: vec![4, 6],
        truncation: 3,
    });
    let elapsed = start.elapsed();
    let mut mismatches = Vec::new();
    match rows {
        Ok(rows) => {
            for (l, d, n) in expected {
                match rows.iter().find(|r| r.modes == l && r.modals == d) {
                    Some(r) if r.n_terms == n => {}
                    Some(r) => mismatches.push(format!("({l},{d}) gave {} want {n}", r.n_terms)),
                    None => mismatches.push(format!("({l},{d}) missing")),
                }
            }
        }
        Err(e) => mismatches.push(e.to_string()),
    }
    let fast = elapsed < Duration::from_secs(1);
    let passed = mismatches.is_empty() && fast;
    let detail = if passed {
        format!("7/7 values exact in {:.3} ms", elapsed.as_secs_f64() * 1e3)
    } else {
        format!("mismatches {mismatches:?}, runtime {elapsed:?}")
    };
    Outcome::new(1, "term counts N_H for polyyne chains", start, passed, detail, vec![])
}

pub fn qubit_footprints() -> Outcome {
    let start = Instant::now();
    let rows = count_rows(&CountArgs {
        triple_bonds: vec![],
        modes: vec![7, 481],
        modals: vec![4, 10],
        truncation: 3,
    })
    .expect("valid sizes");
    let get = |l: usize, d: usize| rows.iter().find(|r| r.modes == l && r.modals == d).expect("row present");
    let small = get(7, 4);
    let big = get(481, 10);
    let table = count_table(&rows);
    let checks = [
        ("unary(7,4)=28", small.unary_qubits == 28),
        ("binary(7,4)=14", small.binary_qubits == 14),
        ("unary(481,10)=4810", big.unary_qubits == 4810),
        ("binary(481,10)=1924", big.binary_qubits == 1924),
        ("fractional packing 1598 noted", big.binary_qubits_fractional == 1598 && table.contains("1598")),
    ];
    let failed: Vec<&str> = checks.iter().filter(|c| !c.1).map(|c| c.0).collect();
    let notes = vec![big.note.clone().unwrap_or_default()];
    Outcome::new(
        2,
        "qubit footprints",
        start,
        failed.is_empty(),
        if failed.is_empty() {
            "28 / 14 / 4810 / 1924 exact, packing note surfaced".into()
        } else {
            format!("failed: {failed:?}")
        },
        notes,
    )
}

fn random_string(rng: &mut ChaCha8Rng, n: usize) -> PauliString {
    let ops: Vec<(usize, Sigma)> = (0..n)
        .map(|q| (q, [Sigma::I, Sigma::X, Sigma::Y, Sigma::Z][rng.random_range(0..4)]))
        .collect();
    PauliString::from_sparse(n, &ops).expect("in range")
}

pub fn nested_commutators_vs_dense() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0003);
    let mut worst = 0.0f64;
    let mut nonzero = 0;
    let mut errors = 0;
    for _ in 0..1000 {
        let n = rng.random_range(1..=6);
        let p = rng.random_range(1..=3);
        let seq: Vec<WeightedPauli> = (0..=p)
            .map(|_| {
                let sign = if rng.random_bool(0.5) { 1.0 } else { -1.0 };
                WeightedPauli::new(sign * rng.random_range(0.1..3.0), random_string(&mut rng, n))
            })
            .collect();
        let mats: Vec<dense::CMatrix> = seq.iter().map(weighted_matrix).collect();
        let want = dense::nested_commutator(&mats);
        let got = match nested_commutator(&seq) {
            Ok(Some(w)) => {
                nonzero += 1;
                weighted_matrix(&w)
            }
            Ok(None) => dense::CMatrix::zeros(1 << n, 1 << n),
            Err(_) => {
                errors += 1;
                continue;
            }
        };
        worst = worst.max(dense::max_abs_diff(&got, &want));
    }
    let fast = start.elapsed() < Duration::from_secs(60);
    let passed = worst <= 1e-10 && errors == 0 && fast;
    Outcome::new(
        3,
        "nested commutators match dense recursion",
        start,
        passed,
        format!("1000 cases ({nonzero} non-zero), max |diff| = {worst:.2e}, errors = {errors}"),
        vec![],
    )
}

struct SandwichTally {
    checked: usize,
    exact_fail: usize,
    crude_fail: usize,
    sandwich_fail: usize,
    instances_failing: usize,
    worst_excess: f64,
}

fn sandwich_run(convention: BoundConvention) -> SandwichTally {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0004);
    let opts = ScalingOptions {
        convention,
        ..Default::default()
    };
    let mut t = SandwichTally {
        checked: 0,
        exact_fail: 0,
        crude_fail: 0,
        sandwich_fail: 0,
        instances_failing: 0,
        worst_excess: 0.0,
    };
    for k in 0..50 {
        let n_terms = rng.random_range(20..=200);
        let n_qubits = rng.random_range(4..=20);
        let h = random_pauli_hamiltonian(n_terms, n_qubits, 1e-4, 1e2, 4000 + k);
        let all: Vec<usize> = (0..h.len()).collect();
        let mut mags: Vec<f64> = h.terms.iter().map(|t| t.coeff.abs()).collect();
        mags.sort_by(f64::total_cmp);
        let q = |f: f64| mags[((mags.len() - 1) as f64 * f).round() as usize];
        let tols = [0.0, q(0.25), q(0.5), q(0.75), f64::INFINITY];
        let mut bad = false;
        for p in 1..=2 {
            let exact = alpha_exact(&h, p, &all).expect("within budget");
            let crude = match convention {
                BoundConvention::Unscaled => crude_bound(&h, p),
                BoundConvention::Rigorous => crude_result(&h, p, convention).upper,
            };
            for &tol in &tols {
                let r = alpha_bounds_with(&h, p, tol, &opts).expect("within budget");
                t.checked += 1;
                if tol == 0.0 && !(rel_close(r.lower, exact, 1e-12) && rel_close(r.upper, exact, 1e-12)) {
                    t.exact_fail += 1;
                    bad = true;
                }
                if tol.is_infinite() && !rel_close(r.upper, crude, 1e-12) {
                    t.crude_fail += 1;
                    bad = true;
                }
                let slack = 1e-12 * exact.max(1e-300);
                if r.lower > exact + slack || exact > r.upper + slack {
                    t.sandwich_fail += 1;
                    t.worst_excess = t.worst_excess.max(exact / r.upper);
                    bad = true;
                }
            }
        }
        t.instances_failing += bad as usize;
    }
    t
}

pub fn bound_sandwich() -> Outcome {
    let start = Instant::now();
    let t = sandwich_run(BoundConvention::Unscaled);
    let fast = start.elapsed() < Duration::from_secs(600);
    let passed = t.exact_fail == 0 && t.crude_fail == 0 && t.sandwich_fail == 0 && fast;
    let detail = format!(
        "{} (H, p, tol) checks on 50 Hamiltonians: tol=0 equality failures {}, tol=inf crude-identity failures {}, \
         sandwich violations {} on {} Hamiltonians (worst alpha/upper = {:.3})",
        t.checked, t.exact_fail, t.crude_fail, t.sandwich_fail, t.instances_failing, t.worst_excess
    );
    let r = sandwich_run(BoundConvention::Rigorous);
    let notes = vec![
        "violations come from cross terms and the crude bound (sum |c|)^(p+1) lacking the 2^p factor a nested commutator can carry"
            .to_string(),
        format!(
            "with --convention rigorous the same {} checks give {} sandwich violations and {} tol=0 failures",
            r.checked, r.sandwich_fail, r.exact_fail
        ),
    ];
    Outcome::new(4, "split bounds sandwich the exact scaling", start, passed, detail, notes)
}

pub fn homogeneity() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0005);
    let mut worst = 0.0f64;
    let mut checks = 0;
    for k in 0..20 {
        let h = random_pauli_hamiltonian(rng.random_range(10..=150), rng.random_range(2..=16), 1e-3, 1e2, 5000 + k);
        let all: Vec<usize> = (0..h.len()).collect();
        for p in 1..=2 {
            let a = alpha_exact(&h, p, &all).expect("within budget");
            for g in [0.5, 2.0, 10.0] {
                let b = alpha_exact(&h.scaled(g), p, &all).expect("within budget");
                let want = g.powi(p as i32 + 1) * a;
                worst = worst.max((b - want).abs() / want.abs().max(f64::MIN_POSITIVE));
                checks += 1;
            }
        }
    }
    Outcome::new(
        5,
        "alpha is homogeneous of degree p+1",
        start,
        worst <= 1e-10,
        format!("{checks} checks, max relative error {worst:.2e}"),
        vec![],
    )
}

fn random_hermitian_sq(rng: &mut ChaCha8Rng, n_modes: usize, d: usize) -> SecondQuantizedHamiltonian {
    let mut terms = Vec::new();
    let f = SqFactor::new;
    for _ in 0..rng.random_range(1..6) {
        let (m, k, h, c) = (rng.random_range(0..n_modes), rng.random_range(0..d), rng.random_range(0..d), rng.random_range(-5.0..5.0));
        terms.push(SqTerm::new(c, vec![f(m, k, h)]));
        if k != h {
            terms.push(SqTerm::new(c, vec![f(m, h, k)]));
        }
    }
    if n_modes > 1 {
        for _ in 0..rng.random_range(0..6) {
            let (k0, h0, k1, h1) = (rng.random_range(0..d), rng.random_range(0..d), rng.random_range(0..d), rng.random_range(0..d));
            let c = rng.random_range(-5.0..5.0);
            terms.push(SqTerm::new(c, vec![f(0, k0, h0), f(1, k1, h1)]));
            if (k0, k1) != (h0, h1) {
                terms.push(SqTerm::new(c, vec![f(0, h0, k0), f(1, h1, k1)]));
            }
        }
    }
    // merge repeats so every operator product appears once
    let mut merged: std::collections::BTreeMap<Vec<SqFactor>, f64> = Default::default();
    for t in terms {
        *merged.entry(t.factors).or_insert(0.0) += t.coeff;
    }
    SecondQuantizedHamiltonian {
        n_modes,
        modals: d,
        constant: 0.0,
        terms: merged.into_iter().map(|(k, c)| SqTerm::new(c, k)).collect(),
    }
}

fn code_states(kind: EncodingKind, n_modes: usize, d: usize) -> Vec<usize> {
    match kind {
        EncodingKind::Unary => dense::unary_embedding(n_modes, d),
        EncodingKind::Binary => dense::binary_embedding(n_modes, d, binary_bits(d)),
    }
}

pub fn encoding_equivalence() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0006);
    let mut worst = 0.0f64;
    let mut failures = Vec::new();
    let mut builds = 0;
    for _ in 0..30 {
        let n_modes = rng.random_range(1..=2);
        let d = rng.random_range(2..=4);
        let sq = random_hermitian_sq(&mut rng, n_modes, d);
        let plain: Vec<(f64, Vec<(usize, usize, usize)>)> = sq
            .terms
            .iter()
            .map(|t| (t.coeff, t.factors.iter().map(|f| (f.mode, f.raise, f.lower)).collect()))
            .collect();
        let boson = dense::bosonic_operator(n_modes, d, &plain);
        for kind in [EncodingKind::Unary, EncodingKind::Binary] {
            let h = match encode(&sq, &EncodingSpec::new(kind, n_modes, d).with_cutoff(0.0)) {
                Ok(h) => h,
                Err(e) => {
                    failures.push(e.to_string());
                    continue;
                }
            };
            builds += 1;
            if kind == EncodingKind::Unary && locality_stats(&h).max_weight > 2 * n_modes {
                failures.push(format!("unary weight {} on {n_modes} modes", locality_stats(&h).max_weight));
            }
            let m = dense::pauli_sum_on_states(&terms_of(&h), &code_states(kind, n_modes, d));
            worst = worst.max(dense::max_abs_diff(&m, &boson));
        }
    }
    let mut max_weight = 0;
    for (l, d) in [(3, 2), (3, 4), (4, 3), (5, 4)] {
        let h = vibrational_hamiltonian(&VibrationalConfig::chain(l, d), l as u64).expect("chain builds");
        builds += 1;
        max_weight = max_weight.max(locality_stats(&h).max_weight);
    }
    let passed = worst <= 1e-12 && failures.is_empty() && max_weight <= 6;
    Outcome::new(
        6,
        "encodings reproduce the bosonic operator",
        start,
        passed,
        format!(
            "60 encodings of 30 operators, max entry error {worst:.2e}; {builds} builds checked, unary three-mode max weight {max_weight}; failures {failures:?}"
        ),
        vec![],
    )
}

pub fn harmonic_spectrum() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0007);
    let mut worst = 0.0f64;
    let mut cases = 0;
    for l in 1..=3usize {
        for d in 2..=4usize {
            let omegas: Vec<f64> = (0..l).map(|_| log_uniform(&mut rng, 200.0, 3500.0)).collect();
            let problem = VibProblem::new(l, 1, d, omegas.clone()).expect("valid problem");
            let sq = build_second_quantized(&problem, &[], BuildOptions::default()).expect("harmonic builds");
            let mut want: Vec<f64> = (0..d.pow(l as u32))
                .map(|b| {
                    dense::modal_digits(b, l, d)
                        .iter()
                        .zip(&omegas)
                        .map(|(&n, w)| w * (n as f64 + 0.5))
                        .sum()
                })
                .collect();
            want.sort_by(f64::total_cmp);
            for kind in [EncodingKind::Unary, EncodingKind::Binary] {
                let h = encode(&sq, &EncodingSpec::new(kind, l, d).with_cutoff(0.0)).expect("encodes");
                let m = dense::pauli_sum_on_states(&terms_of(&h), &code_states(kind, l, d));
                let got = dense::hermitian_eigenvalues(&m);
                for (g, w) in got.iter().zip(&want) {
                    worst = worst.max((g - w).abs() / w.abs());
                }
                cases += 1;
            }
        }
    }
    Outcome::new(
        7,
        "encoded harmonic spectrum",
        start,
        worst <= 1e-10,
        format!("{cases} (L, d, encoding) cases, max relative eigenvalue error {worst:.2e}"),
        vec![],
    )
}

pub fn costing_identities() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0008);
    let mut problems = Vec::new();
    for i in 0..10 {
        let alpha = log_uniform(&mut rng, 1e-4, 1e2);
        let t = log_uniform(&mut rng, 1e-1, 1e2);
        let g = log_uniform(&mut rng, 1e-2, 1e2);
        let eps = log_uniform(&mut rng, 1e-3, 1e-1);
        let p = if i % 2 == 0 { 1 } else { 2 };
        let r1 = costing::trotter_steps(alpha, t, eps, p, 1.0).expect("valid");
        let r2 = costing::trotter_steps(g.powi(p as i32 + 1) * alpha, t / g, eps, p, 1.0).expect("valid");
        if r1 != r2 {
            problems.push(format!("rescaling {alpha:e},{t:e},{g:e}: {r1} vs {r2}"));
        }
    }

    let h = subsample(
        &vibrational_hamiltonian(&VibrationalConfig::chain(4, 3), 8).expect("chain builds"),
        200,
        3,
    );
    let mut mags: Vec<f64> = h.terms.iter().map(|t| t.coeff.abs()).collect();
    mags.sort_by(f64::total_cmp);
    let base = alpha_bounds(&h, 2, mags[mags.len() / 2]).expect("within budget");
    let eps_grid = [0.5, 1.0, 2.0];
    let alpha_grid = [1.0, 2.0, 4.0];
    let mut ab = None;
    for approach in [Approach::A, Approach::B] {
        let mut grid = [[0u128; 3]; 3];
        for (i, &m) in alpha_grid.iter().enumerate() {
            let mut s = base.clone();
            s.upper *= m;
            for (j, &e) in eps_grid.iter().enumerate() {
                let cfg = QpeConfig {
                    epsilon_nu: e,
                    approach,
                    ..Default::default()
                };
                grid[i][j] = costing::qpe_budget(&h, &s, &cfg).expect("budget").r_total;
            }
        }
        for i in 0..3 {
            for j in 0..2 {
                if grid[i][j] < grid[i][j + 1] {
                    problems.push(format!("approach {approach}: R increases with eps_nu at alpha x{}", alpha_grid[i]));
                }
                if grid[j][i] > grid[j + 1][i] {
                    problems.push(format!("approach {approach}: R decreases with alpha at eps_nu {}", eps_grid[i]));
                }
            }
        }
        if approach == Approach::A {
            ab = Some(grid[0][1]);
        } else if let Some(a) = ab {
            let ratio = a as f64 / grid[0][1] as f64;
            let n = costing::ancilla_count(costing::norm_beta(&h), 1.0).expect("positive") as f64;
            if !(ratio.is_finite() && ratio > 0.0) {
                problems.push(format!("A/B ratio {ratio}"));
            }
            return Outcome::new(
                8,
                "costing identities",
                start,
                problems.is_empty(),
                if problems.is_empty() {
                    "rescaling exact on 10 triples; R monotone over the 3x3 (eps_nu, alpha) grid for A and B".into()
                } else {
                    format!("{problems:?}")
                },
                vec![format!(
                    "R_total(A)/R_total(B) = {ratio:.4e} at eps_nu = 1 with n = {n}; ratio/n^2 = {:.4e}",
                    ratio / (n * n)
                )],
            );
        }
    }
    unreachable!("both approaches evaluated")
}

/// Lexicographic permutations of `0..n`.
fn permutations(n: usize) -> Vec<Vec<usize>> {
    let mut cur: Vec<usize> = (0..n).collect();
    let mut out = vec![cur.clone()];
    loop {
        let Some(i) = (0..n.saturating_sub(1)).rev().find(|&i| cur[i] < cur[i + 1]) else {
            return out;
        };
        let j = (i + 1..n).rev().find(|&j| cur[j] > cur[i]).expect("successor exists");
        cur.swap(i, j);
        cur[i + 1..].reverse();
        out.push(cur.clone());
    }
}

fn ham(strings: &[&str]) -> WeightedPauliHamiltonian {
    WeightedPauliHamiltonian::new(
        strings[0].len(),
        strings
            .iter()
            .map(|s| WeightedPauli::new(1.0, s.parse().expect("valid string")))
            .collect(),
        Default::default(),
    )
    .expect("distinct strings")
}

pub fn layering() -> Outcome {
    let start = Instant::now();
    let mut problems = Vec::new();
    let disjoint = ham(&["XIIIIIII", "IYIIIIII", "IIZIIIII", "IIIXIIII", "IIIIYIII", "IIIIIZII", "IIIIIIXI", "IIIIIIIY"]);
    let s = depth_ratio(&disjoint, 100, 1).expect("layers");
    if !s.ratios.iter().all(|&r| r == 8.0) {
        problems.push(format!("disjoint ratios {:?}", s.mean_ratio));
    }
    let conflict = ham(&["XIII", "YIII", "ZIII", "XXII", "ZIZI", "YIIX"]);
    let s = depth_ratio(&conflict, 100, 1).expect("layers");
    if !s.ratios.iter().all(|&r| r == 1.0) {
        problems.push(format!("conflict ratios {:?}", s.mean_ratio));
    }
    // scan-rule layer counts of {X0, X1, X0X1, Z2} in lexicographic order of
    // the 24 orderings, tabulated by a separate script
    const TABLE: [usize; 24] = [2, 2, 3, 3, 2, 3, 2, 2, 3, 3, 2, 3, 2, 2, 2, 2, 2, 2, 2, 3, 2, 3, 2, 2];
    let four: Vec<PauliString> = ["XII", "IXI", "XXI", "IIZ"].iter().map(|s| s.parse().expect("valid")).collect();
    let got: Vec<usize> = permutations(4).iter().map(|o| scan_layers_in_order(&four, o)).collect();
    let matched = got.iter().zip(TABLE).filter(|(g, t)| **g == *t).count();
    if matched != 24 {
        problems.push(format!("permutation table {got:?}"));
    }
    let h = vibrational_hamiltonian(&VibrationalConfig::chain(5, 3), 2).expect("chain builds");
    if depth_ratio(&h, 50, 77).expect("layers") != depth_ratio(&h, 50, 77).expect("layers") {
        problems.push("fixed seed not reproducible".into());
    }
    let trend: Vec<String> = (2..=5)
        .map(|d| {
            let h = vibrational_hamiltonian(&VibrationalConfig::chain(5, d), 1).expect("chain builds");
            format!("d={d}: {:.4}", depth_ratio(&h, 100, 0).expect("layers").mean_ratio)
        })
        .collect();
    Outcome::new(
        9,
        "greedy layering",
        start,
        problems.is_empty(),
        if problems.is_empty() {
            format!("disjoint ratio 8 and conflict ratio 1 exact, {matched}/24 orderings match, seeded runs reproducible")
        } else {
            format!("{problems:?}")
        },
        vec![
            format!("mean ratio on synthetic unary chains (L=5, 100 runs): {}", trend.join(", ")),
            "absolute ratios for the reference molecules are not reproducible without their Hamiltonians".into(),
        ],
    )
}

pub fn split_versus_crude_trend() -> Outcome {
    let start = Instant::now();
    let mut problems = Vec::new();
    let mut lines = Vec::new();
    let mut prev: [f64; 2] = [0.0; 2];
    for l in [7usize, 13, 19] {
        let h = vibrational_hamiltonian(&VibrationalConfig::chain(l, 4), 1).expect("chain builds");
        let mut mags: Vec<f64> = h.terms.iter().map(|t| t.coeff.abs()).collect();
        mags.sort_by(|a, b| b.total_cmp(a));
        let tol = mags[1024.min(mags.len() - 1)];
        let split = alpha_bounds(&h, 2, tol).expect("within budget");
        let crude = crude_result(&h, 2, BoundConvention::Unscaled);
        let mut line = format!("L={l}: {} terms, |big|={}", h.len(), split.n_big);
        for (k, approach) in [Approach::A, Approach::B].into_iter().enumerate() {
            let cfg = QpeConfig {
                approach,
                ..Default::default()
            };
            let rs = costing::qpe_budget(&h, &split, &cfg).expect("budget").r_total;
            let rc = costing::qpe_budget(&h, &crude, &cfg).expect("budget").r_total;
            let ratio = rc as f64 / rs as f64;
            if rs > rc {
                problems.push(format!("L={l} {approach}: R_split {rs} > R_crude {rc}"));
            }
            if ratio < prev[k] {
                problems.push(format!("L={l} {approach}: ratio {ratio:.3} below previous {:.3}", prev[k]));
            }
            prev[k] = ratio;
            line += &format!(", {approach}: R_split={rs} R_crude={rc} ratio={ratio:.3}");
        }
        lines.push(line);
    }
    let fast = start.elapsed() < Duration::from_secs(1800);
    Outcome::new(
        10,
        "split bound gains grow with chain length",
        start,
        problems.is_empty() && fast,
        if problems.is_empty() {
            "R_split <= R_crude for L = 7, 13, 19 and R_crude/R_split non-decreasing (approaches A and B)".into()
        } else {
            format!("{problems:?}")
        },
        lines,
    )
}

/// Every criterion in order.
pub fn all() -> Vec<fn() -> Outcome> {
    vec![
        term_count_table,
        qubit_footprints,
        nested_commutators_vs_dense,
        bound_sandwich,
        homogeneity,
        encoding_equivalence,
        harmonic_spectrum,
        costing_identities,
        layering,
        split_versus_crude_trend,
    ]
}
