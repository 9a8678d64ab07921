//! Phase-estimation resource budgets for Trotterized vibrational Hamiltonians.
//!
//! The Hamiltonian is shifted and scaled to `H̃ = (H + βI) / 2β` with
//! `β = Σ|c_i|`, so its spectrum lies in `[0, 1]` and the commutator scaling of
//! `H̃` is `α / (2β)^{p+1}`.

use serde::{Deserialize, Serialize};

use crate::encoding::WeightedPauliHamiltonian;
use crate::error::{Error, Result};
use crate::pauli::Sigma;
use crate::scaling::{pairwise_sum, ScalingMode, ScalingResult};

/// How the Trotter error is budgeted against the phase-estimation error.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Approach {
    /// Per-power error `ε_T = 1/(8n)` charged against the success probability.
    A,
    /// The Trotterized unitary is treated as an effective Hamiltonian with
    /// `ε_T = ε_ν / 2β`.
    B,
}

impl std::fmt::Display for Approach {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Approach::A => "A",
            Approach::B => "B",
        })
    }
}

impl std::str::FromStr for Approach {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "A" | "a" => Ok(Approach::A),
            "B" | "b" => Ok(Approach::B),
            _ => Err(Error::argument(format!("unknown approach '{s}', expected A or B"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QpeConfig {
    /// Target accuracy in cm⁻¹.
    pub epsilon_nu: f64,
    pub p: usize,
    pub approach: Approach,
    /// Constant in front of the step-count expression.
    pub prefactor: f64,
    /// Mean Paulis-per-layer ratio used to turn gate counts into depth.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub layering_ratio: Option<f64>,
}

impl Default for QpeConfig {
    fn default() -> Self {
        QpeConfig {
            epsilon_nu: 1.0,
            p: 2,
            approach: Approach::A,
            prefactor: 1.0,
            layering_ratio: None,
        }
    }
}

impl QpeConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.epsilon_nu > 0.0 && self.epsilon_nu.is_finite()) {
            return Err(Error::argument(format!("epsilon_nu must be > 0, got {}", self.epsilon_nu)));
        }
        if !(self.prefactor > 0.0 && self.prefactor.is_finite()) {
            return Err(Error::argument(format!("prefactor must be > 0, got {}", self.prefactor)));
        }
        if self.p == 0 || (self.p > 2 && self.p % 2 == 1) {
            return Err(Error::argument(format!(
                "product-formula order must be 1 or even, got {}",
                self.p
            )));
        }
        if let Some(r) = self.layering_ratio {
            if !(r >= 1.0 && r.is_finite()) {
                return Err(Error::argument(format!("layering ratio must be >= 1, got {r}")));
            }
        }
        Ok(())
    }
}

/// Gate counts of a circuit fragment.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct GateCount {
    pub two_qubit: u128,
    pub rotations: u128,
    pub cliffords: u128,
}

impl GateCount {
    pub fn total(&self) -> u128 {
        self.two_qubit + self.rotations + self.cliffords
    }

    fn add(self, o: GateCount) -> GateCount {
        GateCount {
            two_qubit: self.two_qubit + o.two_qubit,
            rotations: self.rotations + o.rotations,
            cliffords: self.cliffords + o.cliffords,
        }
    }

    fn sub(self, o: GateCount) -> GateCount {
        GateCount {
            two_qubit: self.two_qubit - o.two_qubit,
            rotations: self.rotations - o.rotations,
            cliffords: self.cliffords - o.cliffords,
        }
    }

    fn times(self, k: u128) -> Result<GateCount> {
        let m = |v: u128| v.checked_mul(k).ok_or_else(|| Error::argument("gate count overflows u128"));
        Ok(GateCount {
            two_qubit: m(self.two_qubit)?,
            rotations: m(self.rotations)?,
            cliffords: m(self.cliffords)?,
        })
    }
}

/// Controlled exponential of one Pauli string of weight `w`: a CNOT ladder of
/// `2(w − 1)` gates plus one extra two-qubit gate for the ancilla control, one
/// rotation, and two basis-change Cliffords per X or Y factor. The identity
/// costs nothing.
pub fn exponential_cost(pauli: &crate::pauli::PauliString) -> GateCount {
    let w = pauli.weight() as u128;
    if w == 0 {
        return GateCount::default();
    }
    let xy = (0..pauli.n_qubits())
        .filter(|&q| matches!(pauli.get(q), Sigma::X | Sigma::Y))
        .count() as u128;
    GateCount {
        two_qubit: 2 * (w - 1) + 1,
        rotations: 1,
        cliffords: 2 * xy,
    }
}

/// `β = Σ|c_i|`.
pub fn norm_beta(h: &WeightedPauliHamiltonian) -> f64 {
    let v: Vec<f64> = h.terms.iter().map(|t| t.coeff.abs()).collect();
    pairwise_sum(&v)
}

/// Ceiling that treats values within a relative 1e-12 of an integer as that
/// integer, so rounding noise cannot add a step.
fn snapped_ceil(v: f64) -> f64 {
    let r = v.round();
    if (v - r).abs() <= 1e-12 * v.abs().max(1.0) {
        r
    } else {
        v.ceil()
    }
}

/// Phase-register size `⌈log₂(8β/ε_ν)⌉`, zero when `8β ≤ ε_ν`.
pub fn ancilla_count(beta: f64, epsilon_nu: f64) -> Result<u32> {
    if !(beta > 0.0 && beta.is_finite()) || !(epsilon_nu > 0.0 && epsilon_nu.is_finite()) {
        return Err(Error::argument(format!(
            "beta and epsilon_nu must be positive, got {beta} and {epsilon_nu}"
        )));
    }
    let x = 8.0 * beta / epsilon_nu;
    if x <= 1.0 {
        return Ok(0);
    }
    Ok(snapped_ceil(x.log2()) as u32)
}

/// Steps `⌈prefactor · α^{1/p} t^{1+1/p} / ε_T^{1/p}⌉`, at least 1.
pub fn trotter_steps(alpha: f64, t: f64, epsilon_t: f64, p: usize, prefactor: f64) -> Result<u128> {
    if !(t > 0.0 && t.is_finite()) {
        return Err(Error::argument(format!("evolution time must be > 0, got {t}")));
    }
    if !(epsilon_t > 0.0 && epsilon_t.is_finite()) {
        return Err(Error::argument(format!("Trotter error must be > 0, got {epsilon_t}")));
    }
    if !(alpha >= 0.0 && alpha.is_finite()) {
        return Err(Error::argument(format!("alpha must be finite and >= 0, got {alpha}")));
    }
    if p == 0 {
        return Err(Error::argument("product-formula order p must be >= 1"));
    }
    if alpha == 0.0 {
        return Ok(1);
    }
    let v = prefactor * (alpha * t.powi(p as i32 + 1) / epsilon_t).powf(1.0 / p as f64);
    let r = snapped_ceil(v).max(1.0);
    if !(r < 3.4e38) {
        return Err(Error::argument("Trotter step count overflows u128"));
    }
    Ok(r as u128)
}

/// Exponentials in one step of the order-`p` product formula over `n_terms` terms.
pub fn exponentials_per_step(n_terms: usize, p: usize) -> Result<u128> {
    let n = n_terms as u128;
    match p {
        1 => Ok(n),
        2 => Ok((2 * n).saturating_sub(1)),
        p if p % 2 == 0 => Ok(2 * 5u128.pow((p / 2 - 1) as u32) * n),
        _ => Err(Error::argument(format!("no product formula of odd order {p} > 1"))),
    }
}

/// Gates of one product-formula step, in the order the terms are listed.
pub fn step_gate_cost(h: &WeightedPauliHamiltonian, p: usize) -> Result<GateCount> {
    let sweep = h
        .terms
        .iter()
        .map(|t| exponential_cost(&t.pauli))
        .fold(GateCount::default(), GateCount::add);
    match p {
        1 => Ok(sweep),
        2 => {
            // forward and backward sweeps share the middle exponential
            let last = h.terms.last().map(|t| exponential_cost(&t.pauli)).unwrap_or_default();
            Ok(sweep.times(2)?.sub(last))
        }
        p if p % 2 == 0 => sweep.times(2 * 5u128.pow((p / 2 - 1) as u32)),
        _ => Err(Error::argument(format!("no product formula of odd order {p} > 1"))),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResourceReport {
    pub approach: Approach,
    pub p: usize,
    pub epsilon_nu: f64,
    pub bound_mode: ScalingMode,
    pub n_terms: usize,
    pub n_qubits: usize,
    pub n_ancilla: u32,
    pub beta: f64,
    pub alpha_upper: f64,
    /// Commutator scaling of the shifted and scaled Hamiltonian.
    pub alpha_scaled: f64,
    pub epsilon_t: f64,
    /// One entry per evolution power `2^j` (approach A) or the single step count (approach B).
    pub r_per_power: Vec<u128>,
    pub r_total: u128,
    pub exponentials_per_step: u128,
    pub gates_per_step: GateCount,
    pub gates: GateCount,
    pub gates_total: u128,
    pub layering_ratio: Option<f64>,
    pub depth_estimate: u128,
    /// `0.75 − 2nε_T`: success probability guaranteed under approach A bookkeeping.
    pub success_probability_floor: f64,
    pub assumptions: Vec<String>,
}

/// Trotter steps and gate counts for phase estimation on `h` to accuracy
/// `cfg.epsilon_nu`, using `scaling.upper` as the commutator scaling.
pub fn qpe_budget(h: &WeightedPauliHamiltonian, scaling: &ScalingResult, cfg: &QpeConfig) -> Result<ResourceReport> {
    cfg.validate()?;
    if scaling.p != cfg.p {
        return Err(Error::argument(format!(
            "scaling computed for p={} but the budget asks for p={}",
            scaling.p, cfg.p
        )));
    }
    if !(scaling.upper.is_finite() && scaling.upper >= 0.0) {
        return Err(Error::argument(format!("scaling upper bound must be finite, got {}", scaling.upper)));
    }
    let beta = norm_beta(h);
    if beta == 0.0 {
        return Err(Error::Degenerate(
            "Hamiltonian has zero coefficient norm; nothing to estimate".into(),
        ));
    }
    let p = cfg.p;
    let mut assumptions = vec![
        format!("beta = sum |c_i| = {beta:e} cm^-1; H~ = (H + beta I)/(2 beta)"),
        format!("alpha(H~) = alpha_upper / (2 beta)^{}", p + 1),
        format!(
            "r = ceil({} * alpha^(1/p) * t^(1+1/p) / eps_T^(1/p)), r = 1 when alpha = 0",
            cfg.prefactor
        ),
        "gate model per weight-w exponential: 2(w-1) CNOT + 1 controlled-rotation CNOT, 1 rotation, 2 Cliffords per X/Y factor; identity free".into(),
    ];
    assumptions.push(match p {
        1 => "first-order step: N_H exponentials".into(),
        2 => "second-order step: forward and backward sweeps sharing the middle exponential, 2 N_H - 1 exponentials".into(),
        _ => format!(
            "order-{p} Suzuki step: 2 * 5^{} * N_H exponentials, stage boundaries not merged",
            p / 2 - 1
        ),
    });

    let mut n = ancilla_count(beta, cfg.epsilon_nu)?;
    if n == 0 {
        n = 1;
        assumptions.push("8 beta <= eps_nu: phase register clamped to 1 qubit".into());
    }
    let alpha_scaled = scaling.upper / (2.0 * beta).powi(p as i32 + 1);

    let (epsilon_t, r_per_power, r_total) = match cfg.approach {
        Approach::A => {
            let eps_t = 1.0 / (8.0 * n as f64);
            let r: Vec<u128> = (0..n)
                .map(|j| trotter_steps(alpha_scaled, 2f64.powi(j as i32), eps_t, p, cfg.prefactor))
                .collect::<Result<_>>()?;
            let total = r
                .iter()
                .try_fold(0u128, |a, &b| a.checked_add(b))
                .ok_or_else(|| Error::argument("total step count overflows u128"))?;
            assumptions.push(format!("approach A: eps_T = 1/(8n), t = 2^j for j = 0..{}", n - 1));
            (eps_t, r, total)
        }
        Approach::B => {
            let eps_t = cfg.epsilon_nu / (2.0 * beta);
            let r = trotter_steps(alpha_scaled, 1.0, eps_t, p, cfg.prefactor)?;
            let reps = (1u128 << n) - 1;
            let total = r
                .checked_mul(reps)
                .ok_or_else(|| Error::argument("total step count overflows u128"))?;
            assumptions.push("approach B: eps_T = eps_nu/(2 beta), t = 1, repeated 2^n - 1 times".into());
            (eps_t, vec![r], total)
        }
    };

    let exps = exponentials_per_step(h.len(), p)?;
    let gates_per_step = step_gate_cost(h, p)?;
    let gates = gates_per_step.times(r_total)?;
    let gates_total = gates.total();
    let depth_estimate = match cfg.layering_ratio {
        Some(ratio) => {
            assumptions.push(format!("depth = ceil(gates_total / {ratio}) from the layering ratio"));
            (gates_total as f64 / ratio).ceil() as u128
        }
        None => {
            assumptions.push("no layering ratio supplied: depth = gates_total".into());
            gates_total
        }
    };
    Ok(ResourceReport {
        approach: cfg.approach,
        p,
        epsilon_nu: cfg.epsilon_nu,
        bound_mode: scaling.mode,
        n_terms: h.len(),
        n_qubits: h.n_qubits,
        n_ancilla: n,
        beta,
        alpha_upper: scaling.upper,
        alpha_scaled,
        epsilon_t,
        r_per_power,
        r_total,
        exponentials_per_step: exps,
        gates_per_step,
        gates,
        gates_total,
        layering_ratio: cfg.layering_ratio,
        depth_estimate,
        success_probability_floor: 0.75 - 2.0 * n as f64 * epsilon_t,
        assumptions,
    })
}

/// `R_total(A) / R_total(B)`.
pub fn approach_ratio(a: &ResourceReport, b: &ResourceReport) -> f64 {
    a.r_total as f64 / b.r_total as f64
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::encoding::Provenance;
    use crate::pauli::{PauliString, WeightedPauli};
    use crate::scaling::{alpha_bounds, crude_result, BoundConvention};
    use crate::synthetic;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use vibrest_oracle::dense;

    fn ham(terms: &[(f64, &str)]) -> WeightedPauliHamiltonian {
        let n = terms[0].1.len();
        WeightedPauliHamiltonian::new(
            n,
            terms
                .iter()
                .map(|(c, s)| WeightedPauli::new(*c, s.parse::<PauliString>().unwrap()))
                .collect(),
            Provenance::default(),
        )
        .unwrap()
    }

    #[test]
    fn beta_examples() {
        assert_eq!(norm_beta(&ham(&[(1.5, "X"), (-0.5, "Z")])), 2.0);
        assert_eq!(norm_beta(&ham(&[(-3.0, "XY")])), 3.0);
    }

    #[test]
    fn beta_dominates_spectral_norm() {
        for seed in 0..5 {
            let h = synthetic::random_pauli_hamiltonian(30, 6, 0.01, 10.0, seed);
            let mut m = dense::CMatrix::zeros(64, 64);
            for t in &h.terms {
                let body: String = (0..6).map(|q| t.pauli.get(q).as_char()).collect();
                m += dense::pauli_matrix(&body) * num_complex::Complex64::new(t.coeff, 0.0);
            }
            let spec = dense::hermitian_eigenvalues(&m);
            let norm = spec.iter().fold(0.0f64, |a, v| a.max(v.abs()));
            assert!(norm_beta(&h) >= norm - 1e-9);
        }
    }

    #[test]
    fn ancilla_examples() {
        assert_eq!(ancilla_count(1000.0, 1.0).unwrap(), 13);
        assert_eq!(ancilla_count(1.0 / 8.0, 1.0).unwrap(), 0);
        assert_eq!(ancilla_count(4096.0, 1.0).unwrap(), 15);
        assert!(ancilla_count(0.0, 1.0).is_err());
    }

    #[test]
    fn trotter_step_examples() {
        assert_eq!(trotter_steps(0.0, 5.0, 0.1, 2, 1.0).unwrap(), 1);
        assert_eq!(trotter_steps(1.0, 1.0, 1.0, 2, 1.0).unwrap(), 1);
        assert_eq!(trotter_steps(4.0, 1.0, 1.0, 2, 1.0).unwrap(), 2);
        assert_eq!(trotter_steps(1e-12, 1.0, 1.0, 2, 1.0).unwrap(), 1);
        assert!(trotter_steps(1.0, 0.0, 0.1, 2, 1.0).is_err());
        assert!(trotter_steps(1.0, 1.0, -0.1, 2, 1.0).is_err());
    }

    #[test]
    fn halving_error_scales_by_root_two() {
        let (a, t, e): (f64, f64, f64) = (3.7, 8.0, 1e-3);
        let v1 = (a * t.powi(3) / e).sqrt();
        let v2 = (a * t.powi(3) / (e / 2.0)).sqrt();
        assert!((v2 / v1 - 2f64.sqrt()).abs() < 1e-12);
        assert_eq!(trotter_steps(a, t, e, 2, 1.0).unwrap(), v1.ceil() as u128);
        assert_eq!(trotter_steps(a, t, e / 2.0, 2, 1.0).unwrap(), v2.ceil() as u128);
    }

    #[test]
    fn rescaling_invariance() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for _ in 0..200 {
            let alpha = 10f64.powf(rng.random_range(-6.0..2.0));
            let t = 10f64.powf(rng.random_range(-2.0..2.0));
            let g = 10f64.powf(rng.random_range(-3.0..3.0));
            let e = 10f64.powf(rng.random_range(-4.0..-1.0));
            for p in [1usize, 2, 4] {
                let r1 = trotter_steps(alpha, t, e, p, 1.0).unwrap();
                let r2 = trotter_steps(g.powi(p as i32 + 1) * alpha, t / g, e, p, 1.0).unwrap();
                assert_eq!(r1, r2);
            }
        }
    }

    #[test]
    fn commuting_hamiltonian_uses_one_step_per_power() {
        let h = ham(&[(700.0, "ZI"), (300.0, "IZ")]);
        let s = alpha_bounds(&h, 2, 0.0).unwrap();
        assert_eq!(s.upper, 0.0);
        let a = qpe_budget(&h, &s, &QpeConfig::default()).unwrap();
        assert_eq!(a.n_ancilla, 13);
        assert_eq!(a.r_per_power, vec![1; 13]);
        assert_eq!(a.r_total, 13);
        let b = qpe_budget(&h, &s, &QpeConfig { approach: Approach::B, ..Default::default() }).unwrap();
        assert_eq!(b.r_per_power, vec![1]);
        assert_eq!(b.r_total, (1 << 13) - 1);
    }

    #[test]
    fn doubling_accuracy_target_drops_one_ancilla() {
        let h = synthetic::random_pauli_hamiltonian(40, 6, 1.0, 100.0, 3);
        let s = alpha_bounds(&h, 2, 0.0).unwrap();
        let run = |eps| {
            qpe_budget(&h, &s, &QpeConfig { epsilon_nu: eps, approach: Approach::B, ..Default::default() }).unwrap()
        };
        let (r05, r1, r2) = (run(0.5), run(1.0), run(2.0));
        assert_eq!(r05.n_ancilla, r1.n_ancilla + 1);
        assert_eq!(r1.n_ancilla, r2.n_ancilla + 1);
        assert!(r05.r_per_power[0] >= r1.r_per_power[0]);
        assert!(r1.r_per_power[0] >= r2.r_per_power[0]);
    }

    #[test]
    fn split_bound_never_costs_more_than_crude_on_chain() {
        let h = synthetic::vibrational_hamiltonian(&synthetic::VibrationalConfig::chain(4, 3), 5).unwrap();
        let h = synthetic::subsample(&h, 100, 1);
        let crude = crude_result(&h, 2, BoundConvention::Unscaled);
        let split = alpha_bounds(&h, 2, 0.0).unwrap();
        for approach in [Approach::A, Approach::B] {
            let cfg = QpeConfig { approach, ..Default::default() };
            let rc = qpe_budget(&h, &crude, &cfg).unwrap();
            let rs = qpe_budget(&h, &split, &cfg).unwrap();
            assert!(rs.r_total <= rc.r_total);
        }
    }

    #[test]
    fn gate_totals_are_self_consistent() {
        let h = synthetic::random_pauli_hamiltonian(25, 5, 0.1, 10.0, 1);
        let s = alpha_bounds(&h, 2, 0.0).unwrap();
        let r = qpe_budget(&h, &s, &QpeConfig { layering_ratio: Some(2.5), ..Default::default() }).unwrap();
        assert_eq!(r.gates_total, r.gates_per_step.total() * r.r_total);
        assert_eq!(r.gates.two_qubit, r.gates_per_step.two_qubit * r.r_total);
        assert_eq!(r.exponentials_per_step, 49);
        assert_eq!(r.depth_estimate, (r.gates_total as f64 / 2.5).ceil() as u128);
        assert!(r.r_total >= *r.r_per_power.iter().max().unwrap());
    }

    #[test]
    fn gate_model_for_single_strings() {
        let c = exponential_cost(&"XIZY".parse().unwrap());
        assert_eq!(c, GateCount { two_qubit: 5, rotations: 1, cliffords: 4 });
        assert_eq!(exponential_cost(&"III".parse().unwrap()).total(), 0);
        let h = ham(&[(1.0, "XI"), (1.0, "ZZ")]);
        // XI: 1 CNOT + 1 rotation + 2 Cliffords; ZZ: 3 CNOT + 1 rotation
        assert_eq!(step_gate_cost(&h, 1).unwrap().total(), 8);
        assert_eq!(step_gate_cost(&h, 2).unwrap().total(), 12);
        assert_eq!(step_gate_cost(&h, 4).unwrap().total(), 80);
        assert!(step_gate_cost(&h, 3).is_err());
    }

    #[test]
    fn zero_norm_is_degenerate() {
        let h = ham(&[(0.0, "X")]);
        let s = crude_result(&h, 2, BoundConvention::Unscaled);
        assert!(matches!(qpe_budget(&h, &s, &QpeConfig::default()), Err(Error::Degenerate(_))));
    }

    #[test]
    fn unit_change_leaves_steps_invariant() {
        let h = synthetic::random_pauli_hamiltonian(30, 5, 0.5, 50.0, 4);
        let g = 1.4387769; // cm^-1 to K
        let hs = h.scaled(g);
        for approach in [Approach::A, Approach::B] {
            let a = qpe_budget(&h, &alpha_bounds(&h, 2, 0.0).unwrap(), &QpeConfig { approach, ..Default::default() }).unwrap();
            let b = qpe_budget(
                &hs,
                &alpha_bounds(&hs, 2, 0.0).unwrap(),
                &QpeConfig { approach, epsilon_nu: g, ..Default::default() },
            )
            .unwrap();
            assert_eq!(a.n_ancilla, b.n_ancilla);
            assert_eq!(a.r_per_power, b.r_per_power);
        }
    }

    proptest! {
        #[test]
        fn steps_monotone_in_alpha_and_error(a in 1e-6f64..1e3, k in 1.0f64..10.0, e in 1e-4f64..0.1, p in prop_oneof![Just(1usize), Just(2), Just(4)]) {
            let r = trotter_steps(a, 4.0, e, p, 1.0).unwrap();
            prop_assert!(trotter_steps(a * k, 4.0, e, p, 1.0).unwrap() >= r);
            prop_assert!(trotter_steps(a, 4.0, e * k, p, 1.0).unwrap() <= r);
        }
    }
}
