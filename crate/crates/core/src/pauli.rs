//! Bit-packed Pauli strings.
//!
//! A string on `n` qubits is stored as two little-endian word vectors: qubit
//! `q` lives at bit `q % 64` of word `q / 64`. The X mask marks qubits carrying
//! X or Y, the Z mask marks qubits carrying Z or Y. The overall phase is an
//! exponent of `i` modulo 4, so the operator is `i^phase * (σ_0 ⊗ σ_1 ⊗ ...)`
//! with every `σ_q ∈ {I, X, Y, Z}`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const WORD: usize = 64;

pub(crate) fn words_for(n_qubits: usize) -> usize {
    n_qubits.div_ceil(WORD)
}

/// Single-qubit Pauli operator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Sigma {
    I,
    X,
    Y,
    Z,
}

impl Sigma {
    fn bits(self) -> (bool, bool) {
        match self {
            Sigma::I => (false, false),
            Sigma::X => (true, false),
            Sigma::Y => (true, true),
            Sigma::Z => (false, true),
        }
    }

    fn from_bits(x: bool, z: bool) -> Self {
        match (x, z) {
            (false, false) => Sigma::I,
            (true, false) => Sigma::X,
            (true, true) => Sigma::Y,
            (false, true) => Sigma::Z,
        }
    }

    pub fn as_char(self) -> char {
        match self {
            Sigma::I => 'I',
            Sigma::X => 'X',
            Sigma::Y => 'Y',
            Sigma::Z => 'Z',
        }
    }

    pub fn from_char(c: char) -> Option<Self> {
        match c {
            'I' => Some(Sigma::I),
            'X' => Some(Sigma::X),
            'Y' => Some(Sigma::Y),
            'Z' => Some(Sigma::Z),
            _ => None,
        }
    }
}

/// Power of `i`: 0 → +1, 1 → +i, 2 → −1, 3 → −i.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Phase(u8);

impl Phase {
    pub const ONE: Phase = Phase(0);
    pub const I: Phase = Phase(1);
    pub const MINUS_ONE: Phase = Phase(2);
    pub const MINUS_I: Phase = Phase(3);

    pub fn from_exponent(e: u32) -> Self {
        Phase((e % 4) as u8)
    }

    pub fn exponent(self) -> u8 {
        self.0
    }

    /// True for ±1.
    pub fn is_real(self) -> bool {
        self.0 % 2 == 0
    }

    pub fn mul(self, other: Phase) -> Phase {
        Phase((self.0 + other.0) % 4)
    }

    fn prefix(self) -> &'static str {
        match self.0 {
            0 => "",
            1 => "i",
            2 => "-",
            _ => "-i",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PauliString {
    n_qubits: usize,
    x: Vec<u64>,
    z: Vec<u64>,
    phase: Phase,
}

impl PauliString {
    pub fn identity(n_qubits: usize) -> Self {
        let w = words_for(n_qubits);
        PauliString {
            n_qubits,
            x: vec![0; w],
            z: vec![0; w],
            phase: Phase::ONE,
        }
    }

    /// Builds a string from `(qubit, σ)` pairs; unlisted qubits carry identity.
    pub fn from_sparse(n_qubits: usize, ops: &[(usize, Sigma)]) -> Result<Self> {
        let mut p = PauliString::identity(n_qubits);
        for &(q, s) in ops {
            if q >= n_qubits {
                return Err(Error::argument(format!(
                    "qubit {q} out of range for {n_qubits}-qubit string"
                )));
            }
            p.set(q, s);
        }
        Ok(p)
    }

    /// Builds a phase-free string from raw masks. Bits beyond `n_qubits` must be zero.
    pub fn from_masks(n_qubits: usize, x: Vec<u64>, z: Vec<u64>) -> Result<Self> {
        let w = words_for(n_qubits);
        if x.len() != w || z.len() != w {
            return Err(Error::argument(format!(
                "mask length must be {w} words for {n_qubits} qubits"
            )));
        }
        let tail = n_qubits % WORD;
        if tail != 0 {
            let keep = (1u64 << tail) - 1;
            if (x[w - 1] | z[w - 1]) & !keep != 0 {
                return Err(Error::argument("mask bits set beyond n_qubits"));
            }
        }
        Ok(PauliString {
            n_qubits,
            x,
            z,
            phase: Phase::ONE,
        })
    }

    pub fn with_phase(mut self, phase: Phase) -> Self {
        self.phase = phase;
        self
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn x_words(&self) -> &[u64] {
        &self.x
    }

    pub fn z_words(&self) -> &[u64] {
        &self.z
    }

    pub fn phase(&self) -> Phase {
        self.phase
    }

    pub fn get(&self, q: usize) -> Sigma {
        let (w, b) = (q / WORD, q % WORD);
        Sigma::from_bits(self.x[w] >> b & 1 == 1, self.z[w] >> b & 1 == 1)
    }

    fn set(&mut self, q: usize, s: Sigma) {
        let (w, b) = (q / WORD, q % WORD);
        let (xb, zb) = s.bits();
        let m = 1u64 << b;
        self.x[w] = (self.x[w] & !m) | if xb { m } else { 0 };
        self.z[w] = (self.z[w] & !m) | if zb { m } else { 0 };
    }

    /// Number of qubits acted on non-trivially.
    pub fn weight(&self) -> usize {
        self.x
            .iter()
            .zip(&self.z)
            .map(|(x, z)| (x | z).count_ones() as usize)
            .sum()
    }

    /// Support as packed words (`x | z`).
    pub fn support_words(&self) -> Vec<u64> {
        self.x.iter().zip(&self.z).map(|(x, z)| x | z).collect()
    }

    /// Qubit indices in the support, ascending.
    pub fn support(&self) -> Vec<usize> {
        (0..self.n_qubits)
            .filter(|&q| self.get(q) != Sigma::I)
            .collect()
    }

    pub fn is_identity(&self) -> bool {
        self.x.iter().chain(&self.z).all(|&w| w == 0)
    }

    /// Hermitian strings carry phase ±1.
    pub fn is_hermitian(&self) -> bool {
        self.phase.is_real()
    }

    fn check_dims(&self, other: &PauliString) -> Result<()> {
        if self.n_qubits != other.n_qubits {
            return Err(Error::Dimension {
                left: self.n_qubits,
                right: other.n_qubits,
            });
        }
        Ok(())
    }

    /// Symplectic inner product `x_a·z_b + z_a·x_b (mod 2)`.
    pub fn anticommutes(&self, other: &PauliString) -> Result<bool> {
        self.check_dims(other)?;
        Ok(symplectic_parity(&self.x, &self.z, &other.x, &other.z))
    }

    pub fn commutes(&self, other: &PauliString) -> Result<bool> {
        self.anticommutes(other).map(|a| !a)
    }

    /// Operator product `self · other` with exact phase.
    pub fn product(&self, other: &PauliString) -> Result<PauliString> {
        self.check_dims(other)?;
        // Per qubit, σ(x,z) = i^{xz} X^x Z^z; moving Z^{z_a} past X^{x_b} costs (−1)^{z_a x_b}.
        let mut e: u32 = self.phase.0 as u32 + other.phase.0 as u32;
        let mut x = Vec::with_capacity(self.x.len());
        let mut z = Vec::with_capacity(self.z.len());
        for i in 0..self.x.len() {
            let (xa, za, xb, zb) = (self.x[i], self.z[i], other.x[i], other.z[i]);
            let (xr, zr) = (xa ^ xb, za ^ zb);
            e += (xa & za).count_ones();
            e += (xb & zb).count_ones();
            e += 2 * (za & xb).count_ones();
            // i^{-xr zr} converts X^x Z^z back to the Y form
            e += 3 * (xr & zr).count_ones();
            x.push(xr);
            z.push(zr);
        }
        Ok(PauliString {
            n_qubits: self.n_qubits,
            x,
            z,
            phase: Phase::from_exponent(e),
        })
    }
}

#[inline]
pub(crate) fn symplectic_parity(xa: &[u64], za: &[u64], xb: &[u64], zb: &[u64]) -> bool {
    let mut acc = 0u64;
    for i in 0..xa.len() {
        acc ^= (xa[i] & zb[i]) ^ (za[i] & xb[i]);
    }
    acc.count_ones() & 1 == 1
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.phase.prefix())?;
        for q in 0..self.n_qubits {
            write!(f, "{}", self.get(q).as_char())?;
        }
        Ok(())
    }
}

impl FromStr for PauliString {
    type Err = Error;

    /// Accepts an optional phase prefix (`+`, `-`, `i`, `+i`, `-i`) followed by
    /// characters from `IXYZ`, qubit 0 first.
    fn from_str(s: &str) -> Result<Self> {
        let (phase, body) = if let Some(rest) = s.strip_prefix("-i") {
            (Phase::MINUS_I, rest)
        } else if let Some(rest) = s.strip_prefix("+i") {
            (Phase::I, rest)
        } else if let Some(rest) = s.strip_prefix('i') {
            (Phase::I, rest)
        } else if let Some(rest) = s.strip_prefix('-') {
            (Phase::MINUS_ONE, rest)
        } else if let Some(rest) = s.strip_prefix('+') {
            (Phase::ONE, rest)
        } else {
            (Phase::ONE, s)
        };
        let n = body.chars().count();
        let mut p = PauliString::identity(n);
        for (q, c) in body.chars().enumerate() {
            let sigma = Sigma::from_char(c).ok_or_else(|| {
                Error::argument(format!("invalid Pauli character {c:?} in {s:?}"))
            })?;
            p.set(q, sigma);
        }
        p.phase = phase;
        Ok(p)
    }
}

impl Serialize for PauliString {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for PauliString {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// A Hamiltonian term `coeff · pauli`. `‖coeff · P‖ = |coeff|`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeightedPauli {
    pub coeff: f64,
    pub pauli: PauliString,
}

impl WeightedPauli {
    pub fn new(coeff: f64, pauli: PauliString) -> Self {
        WeightedPauli { coeff, pauli }
    }

    pub fn norm(&self) -> f64 {
        self.coeff.abs()
    }
}

/// Nested commutator of weighted Pauli strings, listed in written order:
/// `seq = [A_p, ..., A_1, A_0]` denotes `[A_p, [..., [A_1, A_0]]]`.
///
/// Returns `None` when the commutator vanishes, otherwise the single weighted
/// string `2^p · (c_p ··· c_0) · (P_p ··· P_0)`; the string carries the exact
/// phase of the ordered product. The commutator is non-zero iff every element
/// except the innermost anticommutes with an odd number of the elements nested
/// inside it.
pub fn nested_commutator(seq: &[WeightedPauli]) -> Result<Option<WeightedPauli>> {
    nested_commutator_counted(seq).map(|(r, _)| r)
}

/// As [`nested_commutator`], also returning the number of anticommutation
/// checks performed (at most `p(p+1)/2`).
pub fn nested_commutator_counted(seq: &[WeightedPauli]) -> Result<(Option<WeightedPauli>, usize)> {
    if seq.len() < 2 {
        return Err(Error::argument(
            "nested commutator needs at least two operators (p >= 1)",
        ));
    }
    let n = seq[0].pauli.n_qubits();
    for w in seq {
        w.pauli.check_dims(&seq[0].pauli)?;
        if !w.pauli.is_hermitian() {
            return Err(Error::argument(format!(
                "nested commutator expects Hermitian strings, got {}",
                w.pauli
            )));
        }
    }
    if seq.iter().any(|w| w.coeff == 0.0) {
        return Ok((None, 0));
    }
    let p = seq.len() - 1;
    let mut checks = 0;
    // Innermost element is seq[p]; walk outward.
    for k in (0..p).rev() {
        let mut odd = false;
        for inner in &seq[k + 1..] {
            checks += 1;
            odd ^= seq[k].pauli.anticommutes(&inner.pauli)?;
        }
        if !odd {
            return Ok((None, checks));
        }
    }
    let mut prod = PauliString::identity(n);
    let mut coeff = (1u64 << p) as f64;
    for w in seq {
        prod = prod.product(&w.pauli)?;
        coeff *= w.coeff;
    }
    Ok((Some(WeightedPauli::new(coeff, prod)), checks))
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;
    use proptest::prelude::*;
    use vibrest_oracle::dense;

    fn ps(s: &str) -> PauliString {
        s.parse().unwrap()
    }

    fn wp(c: f64, s: &str) -> WeightedPauli {
        WeightedPauli::new(c, ps(s))
    }

    fn phase_value(p: Phase) -> Complex64 {
        match p.exponent() {
            0 => Complex64::new(1.0, 0.0),
            1 => Complex64::new(0.0, 1.0),
            2 => Complex64::new(-1.0, 0.0),
            _ => Complex64::new(0.0, -1.0),
        }
    }

    fn matrix_of(p: &PauliString) -> dense::CMatrix {
        let body: String = (0..p.n_qubits()).map(|q| p.get(q).as_char()).collect();
        dense::pauli_matrix(&body) * phase_value(p.phase())
    }

    #[test]
    fn single_qubit_anticommutation() {
        assert!(ps("X").anticommutes(&ps("Z")).unwrap());
        assert!(!ps("XI").anticommutes(&ps("IZ")).unwrap());
        assert!(!ps("XY").anticommutes(&ps("YX")).unwrap());
    }

    #[test]
    fn xy_yx_commute_per_dense_matrices() {
        let a = dense::pauli_matrix("XY");
        let b = dense::pauli_matrix("YX");
        let c = &a * &b - &b * &a;
        assert!(c.iter().all(|v| v.norm() < 1e-14));
    }

    #[test]
    fn dimension_mismatch_is_an_error() {
        assert!(matches!(
            ps("XX").anticommutes(&ps("X")),
            Err(Error::Dimension { left: 2, right: 1 })
        ));
        assert!(ps("XX").product(&ps("XXX")).is_err());
    }

    #[test]
    fn x_times_z_is_minus_i_y() {
        assert_eq!(ps("X").product(&ps("Z")).unwrap(), ps("-iY"));
    }

    #[test]
    fn xy_times_zz_matches_dense_product() {
        let r = ps("XY").product(&ps("ZZ")).unwrap();
        assert_eq!(r.to_string(), "YX");
        let expect = dense::pauli_matrix("XY") * dense::pauli_matrix("ZZ");
        assert!(dense::max_abs_diff(&matrix_of(&r), &expect) < 1e-14);
    }

    #[test]
    fn parse_rejects_bad_chars() {
        assert!("XQ".parse::<PauliString>().is_err());
    }

    #[test]
    fn masks_beyond_width_rejected() {
        assert!(PauliString::from_masks(3, vec![0b1000], vec![0]).is_err());
        assert!(PauliString::from_masks(3, vec![0b100], vec![0b1]).is_ok());
    }

    #[test]
    fn words_cross_64_qubit_boundary() {
        let n = 130;
        let a = PauliString::from_sparse(n, &[(0, Sigma::X), (64, Sigma::Z), (129, Sigma::Y)]).unwrap();
        let b = PauliString::from_sparse(n, &[(64, Sigma::X)]).unwrap();
        assert_eq!(a.weight(), 3);
        assert!(a.anticommutes(&b).unwrap());
        assert_eq!(a.support(), vec![0, 64, 129]);
        let s = a.to_string();
        assert_eq!(s.parse::<PauliString>().unwrap(), a);
    }

    #[test]
    fn commutator_of_x_and_y() {
        let r = nested_commutator(&[wp(1.0, "X"), wp(1.0, "Y")]).unwrap().unwrap();
        // 2·(X·Y) = 2i·Z
        assert_eq!(r.pauli, ps("iZ"));
        assert_eq!(r.coeff, 2.0);
        assert_eq!(r.norm(), 2.0);
    }

    #[test]
    fn z_with_xy_commutator_vanishes() {
        let seq = [wp(1.0, "Z"), wp(1.0, "X"), wp(1.0, "Y")];
        assert!(nested_commutator(&seq).unwrap().is_none());
    }

    #[test]
    fn nested_commutator_argument_errors() {
        assert!(nested_commutator(&[]).is_err());
        assert!(nested_commutator(&[wp(1.0, "X")]).is_err());
        assert!(nested_commutator(&[wp(1.0, "X"), wp(1.0, "XX")]).is_err());
    }

    #[test]
    fn check_count_bounded_by_triangle_number() {
        let seq = [wp(1.0, "XZ"), wp(1.0, "ZX"), wp(2.0, "YI"), wp(-1.0, "IY")];
        let (_, checks) = nested_commutator_counted(&seq).unwrap();
        assert!(checks <= 3 * 4 / 2);
    }

    fn arb_pauli(n: usize) -> impl Strategy<Value = PauliString> {
        proptest::collection::vec(0u8..4, n).prop_map(|v| {
            v.into_iter()
                .map(|k| ['I', 'X', 'Y', 'Z'][k as usize])
                .collect::<String>()
                .parse()
                .unwrap()
        })
    }

    fn arb_pair() -> impl Strategy<Value = (PauliString, PauliString)> {
        (1usize..=6).prop_flat_map(|n| (arb_pauli(n), arb_pauli(n)))
    }

    fn arb_triple() -> impl Strategy<Value = (PauliString, PauliString, PauliString)> {
        (1usize..=5).prop_flat_map(|n| (arb_pauli(n), arb_pauli(n), arb_pauli(n)))
    }

    proptest! {
        #[test]
        fn anticommutes_is_symmetric_and_irreflexive((a, b) in arb_pair()) {
            prop_assert_eq!(a.anticommutes(&b).unwrap(), b.anticommutes(&a).unwrap());
            prop_assert!(!a.anticommutes(&a).unwrap());
        }

        #[test]
        fn product_matches_dense((a, b) in arb_pair(), pa in 0u32..4, pb in 0u32..4) {
            let a = a.with_phase(Phase::from_exponent(pa));
            let b = b.with_phase(Phase::from_exponent(pb));
            let r = a.product(&b).unwrap();
            let expect = matrix_of(&a) * matrix_of(&b);
            prop_assert!(dense::max_abs_diff(&matrix_of(&r), &expect) < 1e-12);
        }

        #[test]
        fn product_is_associative((a, b, c) in arb_triple()) {
            let l = a.product(&b).unwrap().product(&c).unwrap();
            let r = a.product(&b.product(&c).unwrap()).unwrap();
            prop_assert_eq!(l, r);
        }

        #[test]
        fn hermitian_square_is_identity(a in (1usize..=8).prop_flat_map(arb_pauli), neg in any::<bool>()) {
            let a = if neg { a.with_phase(Phase::MINUS_ONE) } else { a };
            let sq = a.product(&a).unwrap();
            prop_assert!(sq.is_identity());
            prop_assert_eq!(sq.phase(), Phase::ONE);
        }

        #[test]
        fn text_round_trip(a in (0usize..=70).prop_flat_map(arb_pauli), e in 0u32..4) {
            let a = a.with_phase(Phase::from_exponent(e));
            let s = a.to_string();
            prop_assert_eq!(s.parse::<PauliString>().unwrap(), a);
        }

        #[test]
        fn p1_commutator_nonzero_iff_anticommuting((a, b) in arb_pair()) {
            let r = nested_commutator(&[WeightedPauli::new(1.5, a.clone()), WeightedPauli::new(-0.5, b.clone())]).unwrap();
            prop_assert_eq!(r.is_some(), a.anticommutes(&b).unwrap());
        }
    }
}
