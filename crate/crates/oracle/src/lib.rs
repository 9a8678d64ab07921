//! Dense reference computations for the test suites.
//!
//! Everything here works on explicit `2^n × 2^n` (or `d^L × d^L`) matrices and
//! deliberately shares no code with the bit-packed implementation it checks.
//! Qubit 0 is the leftmost Kronecker factor (most significant basis bit).

pub mod dense {
    use nalgebra::{DMatrix, SymmetricEigen};
    use num_complex::Complex64;

    pub type CMatrix = DMatrix<Complex64>;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    pub fn sigma(ch: char) -> CMatrix {
        let o = c(0.0, 0.0);
        let l = c(1.0, 0.0);
        let i = c(0.0, 1.0);
        match ch {
            'I' => CMatrix::from_row_slice(2, 2, &[l, o, o, l]),
            'X' => CMatrix::from_row_slice(2, 2, &[o, l, l, o]),
            'Y' => CMatrix::from_row_slice(2, 2, &[o, -i, i, o]),
            'Z' => CMatrix::from_row_slice(2, 2, &[l, o, o, -l]),
            _ => panic!("bad Pauli character {ch:?}"),
        }
    }

    pub fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
        a.kronecker(b)
    }

    pub fn identity(dim: usize) -> CMatrix {
        CMatrix::identity(dim, dim)
    }

    /// Matrix of a phase-free Pauli string written over `IXYZ`.
    pub fn pauli_matrix(body: &str) -> CMatrix {
        let mut m = identity(1);
        for ch in body.chars() {
            m = kron(&m, &sigma(ch));
        }
        m
    }

    /// `Σ c_t P_t` restricted to the computational basis states `states`
    /// (qubit 0 is the most significant bit), built entry by entry from the
    /// single-qubit matrices so the full register never has to fit in memory.
    pub fn pauli_sum_on_states(terms: &[(f64, String)], states: &[usize]) -> CMatrix {
        let mut m = CMatrix::zeros(states.len(), states.len());
        for (c, body) in terms {
            let n = body.chars().count();
            let factors: Vec<CMatrix> = body.chars().map(sigma).collect();
            for (r, &a) in states.iter().enumerate() {
                for (col, &b) in states.iter().enumerate() {
                    let mut v = Complex64::new(*c, 0.0);
                    for (q, f) in factors.iter().enumerate() {
                        let shift = n - 1 - q;
                        v *= f[((a >> shift) & 1, (b >> shift) & 1)];
                        if v == Complex64::new(0.0, 0.0) {
                            break;
                        }
                    }
                    m[(r, col)] += v;
                }
            }
        }
        m
    }

    pub fn commutator(a: &CMatrix, b: &CMatrix) -> CMatrix {
        a * b - b * a
    }

    /// `[A_0, [A_1, ..., [A_{p-1}, A_p]]]` for `ops = [A_0, ..., A_p]`, evaluated recursively.
    pub fn nested_commutator(ops: &[CMatrix]) -> CMatrix {
        assert!(ops.len() >= 2);
        let mut acc = ops[ops.len() - 1].clone();
        for op in ops[..ops.len() - 1].iter().rev() {
            acc = commutator(op, &acc);
        }
        acc
    }

    pub fn max_abs_diff(a: &CMatrix, b: &CMatrix) -> f64 {
        assert_eq!(a.shape(), b.shape());
        a.iter().zip(b.iter()).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
    }

    /// Eigenvalues of a Hermitian matrix, ascending.
    pub fn hermitian_eigenvalues(m: &CMatrix) -> Vec<f64> {
        let eig = SymmetricEigen::new(m.clone());
        let mut v: Vec<f64> = eig.eigenvalues.iter().copied().collect();
        v.sort_by(|a, b| a.partial_cmp(b).unwrap());
        v
    }

    pub fn spectral_norm(m: &CMatrix) -> f64 {
        hermitian_eigenvalues(m).iter().fold(0.0, |a, &b| a.max(b.abs()))
    }

    /// `|k⟩⟨h|` on a `d`-level mode.
    pub fn transition(d: usize, k: usize, h: usize) -> CMatrix {
        let mut m = CMatrix::zeros(d, d);
        m[(k, h)] = c(1.0, 0.0);
        m
    }

    /// Dense operator `Σ c · ⊗_l (|k_l⟩⟨h_l| or I)` on `n_modes` modes of
    /// dimension `d`; each factor is `(mode, raise, lower)`. Mode 0 is leftmost.
    pub fn bosonic_operator(
        n_modes: usize,
        d: usize,
        terms: &[(f64, Vec<(usize, usize, usize)>)],
    ) -> CMatrix {
        let dim = d.pow(n_modes as u32);
        let mut total = CMatrix::zeros(dim, dim);
        for (coeff, factors) in terms {
            let mut m = identity(1);
            for mode in 0..n_modes {
                let f = factors.iter().find(|f| f.0 == mode);
                let local = match f {
                    Some(&(_, k, h)) => transition(d, k, h),
                    None => identity(d),
                };
                m = kron(&m, &local);
            }
            total += m * c(*coeff, 0.0);
        }
        total
    }

    /// Mixed-radix digits of a bosonic basis index, mode 0 most significant.
    pub fn modal_digits(mut index: usize, n_modes: usize, d: usize) -> Vec<usize> {
        let mut digits = vec![0; n_modes];
        for l in (0..n_modes).rev() {
            digits[l] = index % d;
            index /= d;
        }
        digits
    }

    /// Register index of each bosonic basis state under the one-hot layout
    /// (qubit `l·d + k` set for the occupied modal `k` of mode `l`).
    pub fn unary_embedding(n_modes: usize, d: usize) -> Vec<usize> {
        let nq = n_modes * d;
        (0..d.pow(n_modes as u32))
            .map(|b| {
                let digits = modal_digits(b, n_modes, d);
                digits
                    .iter()
                    .enumerate()
                    .map(|(l, &k)| 1usize << (nq - 1 - (l * d + k)))
                    .sum()
            })
            .collect()
    }

    /// Register index of each bosonic basis state under positional binary
    /// with `bits` qubits per mode, most significant bit first.
    pub fn binary_embedding(n_modes: usize, d: usize, bits: usize) -> Vec<usize> {
        (0..d.pow(n_modes as u32))
            .map(|b| {
                modal_digits(b, n_modes, d)
                    .iter()
                    .fold(0usize, |acc, &k| (acc << bits) | k)
            })
            .collect()
    }

    pub fn restrict(m: &CMatrix, idx: &[usize]) -> CMatrix {
        CMatrix::from_fn(idx.len(), idx.len(), |r, c| m[(idx[r], idx[c])])
    }

    /// Embeds an operator on the listed basis states into a register of size `dim`.
    pub fn embed(m: &CMatrix, idx: &[usize], dim: usize) -> CMatrix {
        let mut out = CMatrix::zeros(dim, dim);
        for (r, &ir) in idx.iter().enumerate() {
            for (cc, &ic) in idx.iter().enumerate() {
                out[(ir, ic)] = m[(r, cc)];
            }
        }
        out
    }

    /// Dimensionless oscillator coordinate `Q = (a + a†)/√2` truncated to `size` levels.
    pub fn oscillator_q(size: usize) -> DMatrix<f64> {
        let mut q = DMatrix::zeros(size, size);
        for i in 0..size.saturating_sub(1) {
            let v = ((i + 1) as f64 / 2.0).sqrt();
            q[(i, i + 1)] = v;
            q[(i + 1, i)] = v;
        }
        q
    }

    /// `⟨m|Q^k|n⟩` through the eigendecomposition of the truncated `Q`.
    /// Exact whenever `size > max(m, n) + k`.
    pub fn ho_element_by_eigen(m: usize, n: usize, k: u32, size: usize) -> f64 {
        let eig = SymmetricEigen::new(oscillator_q(size));
        let v = &eig.eigenvectors;
        (0..size)
            .map(|j| v[(m, j)] * eig.eigenvalues[j].powi(k as i32) * v[(n, j)])
            .sum()
    }
}
