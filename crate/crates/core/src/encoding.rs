//! Bosonic-to-qubit encodings of second-quantized vibrational Hamiltonians.
//!
//! Unary: one qubit per modal, qubit `l·d + k` is |1⟩ when modal `k` of mode
//! `l` is occupied. A transfer `a†_k a_h` becomes `σ⁺_k σ⁻_h` (or the number
//! projector `(I − Z_k)/2` when `k = h`), with `σ± = (X ∓ iY)/2`.
//!
//! Binary: `ceil(log2 d)` qubits per mode holding the modal index, most
//! significant bit on the lowest qubit of the block. `|k⟩⟨h|` expands into a
//! product of the four single-qubit transitions
//! `|0⟩⟨0| = (I+Z)/2`, `|1⟩⟨1| = (I−Z)/2`, `|0⟩⟨1| = (X+iY)/2`, `|1⟩⟨0| = (X−iY)/2`.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pauli::{words_for, Phase, PauliString, WeightedPauli};
use crate::vibrational::{SecondQuantizedHamiltonian, SqFactor};

/// Qubit-level cutoff applied after merging, in cm⁻¹.
pub const DEFAULT_CUTOFF: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EncodingKind {
    Unary,
    Binary,
}

impl fmt::Display for EncodingKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            EncodingKind::Unary => "unary",
            EncodingKind::Binary => "binary",
        })
    }
}

impl FromStr for EncodingKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "unary" => Ok(EncodingKind::Unary),
            "binary" => Ok(EncodingKind::Binary),
            other => Err(Error::argument(format!("unknown encoding {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EncodingSpec {
    pub kind: EncodingKind,
    pub n_modes: usize,
    pub modals: usize,
    pub cutoff: f64,
}

impl EncodingSpec {
    pub fn new(kind: EncodingKind, n_modes: usize, modals: usize) -> Self {
        EncodingSpec {
            kind,
            n_modes,
            modals,
            cutoff: DEFAULT_CUTOFF,
        }
    }

    pub fn with_cutoff(mut self, cutoff: f64) -> Self {
        self.cutoff = cutoff;
        self
    }

    pub fn qubits_per_mode(&self) -> usize {
        match self.kind {
            EncodingKind::Unary => self.modals,
            EncodingKind::Binary => binary_bits(self.modals),
        }
    }

    fn validate(&self) -> Result<()> {
        if self.modals == 0 || self.n_modes == 0 {
            return Err(Error::argument("encoding needs at least one mode and one modal"));
        }
        if !(self.cutoff >= 0.0) {
            return Err(Error::argument("cutoff must be >= 0"));
        }
        if self.qubits_per_mode() > 64 {
            return Err(Error::argument("more than 64 qubits per mode is not supported"));
        }
        Ok(())
    }
}

/// `ceil(log2 d)`.
pub fn binary_bits(modals: usize) -> usize {
    if modals <= 1 {
        0
    } else {
        (usize::BITS - (modals - 1).leading_zeros()) as usize
    }
}

/// System qubits: `L·d` (unary) or `L·ceil(log2 d)` (binary).
pub fn qubit_count(spec: &EncodingSpec) -> usize {
    spec.n_modes * spec.qubits_per_mode()
}

/// `round(L · log2 d)`, the fractional-bit count some sizing tables quote for
/// binary encodings. Not realizable when `d` is not a power of two.
pub fn binary_qubits_fractional(n_modes: usize, modals: usize) -> usize {
    (n_modes as f64 * (modals as f64).log2()).round() as usize
}

/// Integer → bitstring map used by the binary encoder.
pub trait ModalCode: Sync {
    fn bits(&self, modals: usize) -> usize;
    fn codeword(&self, modal: usize) -> u64;
}

/// Positional binary.
#[derive(Debug, Clone, Copy, Default)]
pub struct StandardBinary;

impl ModalCode for StandardBinary {
    fn bits(&self, modals: usize) -> usize {
        binary_bits(modals)
    }

    fn codeword(&self, modal: usize) -> u64 {
        modal as u64
    }
}

/// Where a qubit Hamiltonian came from.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub encoding: Option<EncodingKind>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n_modes: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub modals: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cutoff: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub source: Option<String>,
}

/// `H = Σ c_i P_i` with real coefficients and distinct phase-free strings.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeightedPauliHamiltonian {
    pub n_qubits: usize,
    pub terms: Vec<WeightedPauli>,
    #[serde(default)]
    pub meta: Provenance,
}

impl WeightedPauliHamiltonian {
    /// Validates widths, finiteness and uniqueness. Strings with phase −1 have
    /// the sign folded into the coefficient.
    pub fn new(n_qubits: usize, terms: Vec<WeightedPauli>, meta: Provenance) -> Result<Self> {
        let mut seen = HashMap::with_capacity(terms.len());
        let mut out = Vec::with_capacity(terms.len());
        for (i, mut t) in terms.into_iter().enumerate() {
            if t.pauli.n_qubits() != n_qubits {
                return Err(Error::Dimension {
                    left: n_qubits,
                    right: t.pauli.n_qubits(),
                });
            }
            if !t.coeff.is_finite() {
                return Err(Error::validation(format!("term {i}: coefficient is not finite")));
            }
            match t.pauli.phase() {
                Phase::ONE => {}
                Phase::MINUS_ONE => {
                    t.coeff = -t.coeff;
                    t.pauli = t.pauli.with_phase(Phase::ONE);
                }
                _ => {
                    return Err(Error::validation(format!(
                        "term {i}: string {} is not Hermitian",
                        t.pauli
                    )))
                }
            }
            if let Some(prev) = seen.insert(t.pauli.clone(), i) {
                return Err(Error::validation(format!(
                    "terms {prev} and {i} repeat the string {}",
                    t.pauli
                )));
            }
            out.push(t);
        }
        Ok(WeightedPauliHamiltonian {
            n_qubits,
            terms: out,
            meta,
        })
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Copy keeping only terms with `|c| > cutoff`.
    pub fn filtered(&self, cutoff: f64) -> Self {
        WeightedPauliHamiltonian {
            n_qubits: self.n_qubits,
            terms: self.terms.iter().filter(|t| t.coeff.abs() > cutoff).cloned().collect(),
            meta: Provenance {
                cutoff: Some(self.meta.cutoff.map_or(cutoff, |c| c.max(cutoff))),
                ..self.meta.clone()
            },
        }
    }

    /// Copy with every coefficient multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> Self {
        WeightedPauliHamiltonian {
            n_qubits: self.n_qubits,
            terms: self
                .terms
                .iter()
                .map(|t| WeightedPauli::new(t.coeff * factor, t.pauli.clone()))
                .collect(),
            meta: self.meta.clone(),
        }
    }
}

type Key = (Vec<u64>, Vec<u64>);

/// Local Pauli expansion on one mode's qubit block: `(coefficient, x bits, z bits)`.
type LocalExpansion = Vec<(Complex64, u64, u64)>;

fn unary_transfer(k: usize, h: usize) -> LocalExpansion {
    let (bk, bh) = (1u64 << k, 1u64 << h);
    if k == h {
        return vec![(Complex64::new(0.5, 0.0), 0, 0), (Complex64::new(-0.5, 0.0), 0, bk)];
    }
    let q = 0.25;
    vec![
        // X_k X_h
        (Complex64::new(q, 0.0), bk | bh, 0),
        // i X_k Y_h
        (Complex64::new(0.0, q), bk | bh, bh),
        // −i Y_k X_h
        (Complex64::new(0.0, -q), bk | bh, bk),
        // Y_k Y_h
        (Complex64::new(q, 0.0), bk | bh, bk | bh),
    ]
}

fn binary_transfer(code: &dyn ModalCode, modals: usize, k: usize, h: usize) -> LocalExpansion {
    let bits = code.bits(modals);
    let (ck, ch) = (code.codeword(k), code.codeword(h));
    let mut acc: LocalExpansion = vec![(Complex64::new(1.0, 0.0), 0, 0)];
    for j in 0..bits {
        let shift = bits - 1 - j;
        let (a, b) = ((ck >> shift) & 1, (ch >> shift) & 1);
        let m = 1u64 << j;
        let half = 0.5;
        let pair: [(Complex64, u64, u64); 2] = match (a, b) {
            (0, 0) => [(Complex64::new(half, 0.0), 0, 0), (Complex64::new(half, 0.0), 0, m)],
            (1, 1) => [(Complex64::new(half, 0.0), 0, 0), (Complex64::new(-half, 0.0), 0, m)],
            // |0⟩⟨1| = (X + iY)/2
            (0, 1) => [(Complex64::new(half, 0.0), m, 0), (Complex64::new(0.0, half), m, m)],
            // |1⟩⟨0| = (X − iY)/2
            _ => [(Complex64::new(half, 0.0), m, 0), (Complex64::new(0.0, -half), m, m)],
        };
        acc = acc
            .iter()
            .flat_map(|&(c, x, z)| pair.iter().map(move |&(c2, x2, z2)| (c * c2, x | x2, z | z2)))
            .collect();
    }
    acc
}

fn check_hermitian(sq: &SecondQuantizedHamiltonian) -> Result<()> {
    let mut sums: HashMap<&[SqFactor], f64> = HashMap::with_capacity(sq.terms.len());
    for t in &sq.terms {
        *sums.entry(t.factors.as_slice()).or_insert(0.0) += t.coeff;
    }
    for (i, t) in sq.terms.iter().enumerate() {
        let adj = t.adjoint_factors();
        if adj == t.factors {
            continue;
        }
        let own = sums[t.factors.as_slice()];
        let partner = sums.get(adj.as_slice()).copied();
        let ok = partner.is_some_and(|p| (p - own).abs() <= 1e-12 * own.abs().max(p.abs()).max(1.0));
        if !ok {
            return Err(Error::validation(format!(
                "second-quantized term {i} ({:?}, coeff {}) has no Hermitian conjugate partner",
                t.factors, t.coeff
            )));
        }
    }
    Ok(())
}

/// Encodes with the standard positional binary code for binary encodings.
pub fn encode(sq: &SecondQuantizedHamiltonian, spec: &EncodingSpec) -> Result<WeightedPauliHamiltonian> {
    encode_with_code(sq, spec, &StandardBinary)
}

pub fn encode_with_code(
    sq: &SecondQuantizedHamiltonian,
    spec: &EncodingSpec,
    code: &dyn ModalCode,
) -> Result<WeightedPauliHamiltonian> {
    spec.validate()?;
    if sq.n_modes != spec.n_modes || sq.modals != spec.modals {
        return Err(Error::validation(format!(
            "Hamiltonian has {} modes x {} modals but encoding expects {} x {}",
            sq.n_modes, sq.modals, spec.n_modes, spec.modals
        )));
    }
    sq.validate()?;
    check_hermitian(sq)?;

    let qpm = match spec.kind {
        EncodingKind::Unary => spec.modals,
        EncodingKind::Binary => code.bits(spec.modals),
    };
    let n_qubits = spec.n_modes * qpm;
    let words = words_for(n_qubits);

    let local = |f: &SqFactor| match spec.kind {
        EncodingKind::Unary => unary_transfer(f.raise, f.lower),
        EncodingKind::Binary => binary_transfer(code, spec.modals, f.raise, f.lower),
    };

    let mut contributions: Vec<(Key, Complex64)> = sq
        .terms
        .par_iter()
        .flat_map_iter(|t| {
            let mut acc: Vec<(Key, Complex64)> =
                vec![((vec![0; words], vec![0; words]), Complex64::new(t.coeff, 0.0))];
            for f in &t.factors {
                let offset = f.mode * qpm;
                let exp = local(f);
                acc = acc
                    .iter()
                    .flat_map(|((x, z), c)| {
                        exp.iter().map(move |&(c2, lx, lz)| {
                            let mut x = x.clone();
                            let mut z = z.clone();
                            scatter(&mut x, lx, offset);
                            scatter(&mut z, lz, offset);
                            ((x, z), c * c2)
                        })
                    })
                    .collect();
            }
            acc
        })
        .collect();
    if sq.constant != 0.0 {
        contributions.push(((vec![0; words], vec![0; words]), Complex64::new(sq.constant, 0.0)));
    }

    // Sorting by (string, value) makes the merged sums independent of input order.
    contributions.par_sort_unstable_by(|a, b| {
        a.0.cmp(&b.0)
            .then(a.1.re.total_cmp(&b.1.re))
            .then(a.1.im.total_cmp(&b.1.im))
    });
    let mut merged: BTreeMap<Key, Complex64> = BTreeMap::new();
    for (k, c) in contributions {
        *merged.entry(k).or_insert(Complex64::new(0.0, 0.0)) += c;
    }

    let scale = sq.max_abs_coeff().max(sq.constant.abs()).max(1.0);
    let mut terms = Vec::with_capacity(merged.len());
    for ((x, z), c) in merged {
        if c.im.abs() > 1e-12 * scale {
            return Err(Error::validation(format!(
                "encoded coefficient has imaginary part {:e}; input is not Hermitian",
                c.im
            )));
        }
        if c.re.abs() > spec.cutoff && c.re != 0.0 {
            terms.push(WeightedPauli::new(c.re, PauliString::from_masks(n_qubits, x, z)?));
        }
    }
    Ok(WeightedPauliHamiltonian {
        n_qubits,
        terms,
        meta: Provenance {
            encoding: Some(spec.kind),
            n_modes: Some(spec.n_modes),
            modals: Some(spec.modals),
            cutoff: Some(spec.cutoff),
            source: None,
        },
    })
}

fn scatter(words: &mut [u64], local: u64, offset: usize) {
    if local == 0 {
        return;
    }
    let (w, b) = (offset / 64, offset % 64);
    words[w] |= local << b;
    if b != 0 && w + 1 < words.len() {
        words[w + 1] |= local >> (64 - b);
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LocalityStats {
    /// weight → number of terms
    pub histogram: BTreeMap<usize, usize>,
    pub max_weight: usize,
    pub mean_weight: f64,
}

pub fn locality_stats(h: &WeightedPauliHamiltonian) -> LocalityStats {
    let mut histogram = BTreeMap::new();
    let mut total = 0usize;
    for t in &h.terms {
        let w = t.pauli.weight();
        *histogram.entry(w).or_insert(0) += 1;
        total += w;
    }
    LocalityStats {
        max_weight: histogram.keys().next_back().copied().unwrap_or(0),
        mean_weight: if h.terms.is_empty() {
            0.0
        } else {
            total as f64 / h.terms.len() as f64
        },
        histogram,
    }
}
