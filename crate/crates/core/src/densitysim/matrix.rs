//! In-place kernels on dense `2^n x 2^n` register matrices.
//!
//! Row-major storage. Qubit `q` of an `n`-qubit register lives in bit
//! `n - 1 - q` of a basis index, so qubit 0 is the most significant bit and
//! `|q0 q1 ... q(n-1)>` reads left to right.

use num_complex::Complex;

use crate::Real;

pub(crate) type Mat2<T> = [[Complex<T>; 2]; 2];

#[inline]
pub(crate) fn qubit_mask(n_qubits: usize, qubit: usize) -> usize {
    1 << (n_qubits - 1 - qubit)
}

#[derive(Clone, Debug, PartialEq)]
pub(crate) struct RegisterMatrix<T> {
    pub n_qubits: usize,
    pub data: Vec<Complex<T>>,
}

impl<T: Real> RegisterMatrix<T> {
    pub fn zeros(n_qubits: usize) -> Self {
        let dim = 1usize << n_qubits;
        Self {
            n_qubits,
            data: vec![Complex::new(T::zero(), T::zero()); dim * dim],
        }
    }

    pub fn identity(n_qubits: usize) -> Self {
        let mut m = Self::zeros(n_qubits);
        let dim = m.dim();
        for i in 0..dim {
            m.data[i * dim + i] = Complex::new(T::one(), T::zero());
        }
        m
    }

    #[inline]
    pub fn dim(&self) -> usize {
        1 << self.n_qubits
    }

    #[inline]
    pub fn at(&self, row: usize, col: usize) -> Complex<T> {
        self.data[row * self.dim() + col]
    }

    pub fn trace(&self) -> Complex<T> {
        let dim = self.dim();
        (0..dim).fold(Complex::new(T::zero(), T::zero()), |acc, i| {
            acc + self.data[i * dim + i]
        })
    }

    /// `M <- U M` with `U` acting on one qubit.
    pub fn left_1q(&mut self, qubit: usize, u: &Mat2<T>) {
        let dim = self.dim();
        let mask = qubit_mask(self.n_qubits, qubit);
        for r0 in (0..dim).filter(|r| r & mask == 0) {
            let r1 = r0 | mask;
            for c in 0..dim {
                let a = self.data[r0 * dim + c];
                let b = self.data[r1 * dim + c];
                self.data[r0 * dim + c] = u[0][0] * a + u[0][1] * b;
                self.data[r1 * dim + c] = u[1][0] * a + u[1][1] * b;
            }
        }
    }

    /// `M <- M U^dagger` with `U` acting on one qubit.
    pub fn right_1q_dagger(&mut self, qubit: usize, u: &Mat2<T>) {
        let dim = self.dim();
        let mask = qubit_mask(self.n_qubits, qubit);
        let d00 = u[0][0].conj();
        let d01 = u[0][1].conj();
        let d10 = u[1][0].conj();
        let d11 = u[1][1].conj();
        for row in self.data.chunks_exact_mut(dim) {
            for c0 in (0..dim).filter(|c| c & mask == 0) {
                let c1 = c0 | mask;
                let a = row[c0];
                let b = row[c1];
                row[c0] = a * d00 + b * d01;
                row[c1] = a * d10 + b * d11;
            }
        }
    }

    /// `M <- U M U^dagger` for a single-qubit `U`.
    pub fn conjugate_1q(&mut self, qubit: usize, u: &Mat2<T>) {
        self.left_1q(qubit, u);
        self.right_1q_dagger(qubit, u);
    }

    /// `M <- D M D^dagger` for a diagonal single-qubit `D = diag(d0, d1)`.
    pub fn conjugate_diag_1q(&mut self, qubit: usize, d0: Complex<T>, d1: Complex<T>) {
        let dim = self.dim();
        let mask = qubit_mask(self.n_qubits, qubit);
        let phase = |i: usize| if i & mask == 0 { d0 } else { d1 };
        for (r, row) in self.data.chunks_exact_mut(dim).enumerate() {
            let pr = phase(r);
            for (c, v) in row.iter_mut().enumerate() {
                *v = pr * *v * phase(c).conj();
            }
        }
    }

    /// Permutation matrix of a CNOT as an index map (an involution).
    #[inline]
    fn cnot_map(&self, control: usize, target: usize) -> impl Fn(usize) -> usize {
        let cm = qubit_mask(self.n_qubits, control);
        let tm = qubit_mask(self.n_qubits, target);
        move |i| if i & cm != 0 { i ^ tm } else { i }
    }

    /// `M <- P M P^T` for the CNOT permutation `P`.
    pub fn conjugate_cnot(&mut self, control: usize, target: usize) {
        let dim = self.dim();
        let p = self.cnot_map(control, target);
        for r in 0..dim {
            let pr = p(r);
            for c in 0..dim {
                let src = pr * dim + p(c);
                let dst = r * dim + c;
                if src > dst {
                    self.data.swap(src, dst);
                }
            }
        }
    }

    /// `M <- P M` for the CNOT permutation `P`.
    pub fn left_cnot(&mut self, control: usize, target: usize) {
        let dim = self.dim();
        let p = self.cnot_map(control, target);
        for r in 0..dim {
            let pr = p(r);
            if pr > r {
                for c in 0..dim {
                    self.data.swap(r * dim + c, pr * dim + c);
                }
            }
        }
    }

    /// `M <- (1 - q) M + q (I/2 (x) Tr_qubit M)`.
    ///
    /// Diagonal blocks (equal bit on `qubit` for row and column) mix with their
    /// partner block; off-diagonal blocks only shrink.
    pub fn depolarize_1q(&mut self, qubit: usize, q: T) {
        let dim = self.dim();
        let mask = qubit_mask(self.n_qubits, qubit);
        let half = T::of(0.5) * q;
        let keep = T::one() - half;
        let shrink = T::one() - q;
        for r0 in (0..dim).filter(|r| r & mask == 0) {
            let r1 = r0 | mask;
            for c0 in (0..dim).filter(|c| c & mask == 0) {
                let c1 = c0 | mask;
                let a = self.data[r0 * dim + c0];
                let d = self.data[r1 * dim + c1];
                self.data[r0 * dim + c0] = a * keep + d * half;
                self.data[r1 * dim + c1] = d * keep + a * half;
                self.data[r0 * dim + c1] = self.data[r0 * dim + c1] * shrink;
                self.data[r1 * dim + c0] = self.data[r1 * dim + c0] * shrink;
            }
        }
    }

    /// `M <- (1 - q) M + q (I/4 (x) Tr_{a,b} M)`.
    pub fn depolarize_2q(&mut self, qa: usize, qb: usize, q: T) {
        let dim = self.dim();
        let ma = qubit_mask(self.n_qubits, qa);
        let mb = qubit_mask(self.n_qubits, qb);
        let both = ma | mb;
        let offsets = [0, mb, ma, ma | mb];
        let quarter = T::of(0.25) * q;
        let shrink = T::one() - q;
        for r0 in (0..dim).filter(|r| r & both == 0) {
            for c0 in (0..dim).filter(|c| c & both == 0) {
                let mut block_trace = Complex::new(T::zero(), T::zero());
                for &s in &offsets {
                    block_trace = block_trace + self.data[(r0 | s) * dim + (c0 | s)];
                }
                let mixed = block_trace * quarter;
                for &sr in &offsets {
                    for &sc in &offsets {
                        let idx = (r0 | sr) * dim + (c0 | sc);
                        let v = self.data[idx] * shrink;
                        self.data[idx] = if sr == sc { v + mixed } else { v };
                    }
                }
            }
        }
    }

    /// `Re Tr(A B)`.
    pub fn trace_product_re(&self, other: &Self) -> T {
        let dim = self.dim();
        let mut acc = T::zero();
        for r in 0..dim {
            for c in 0..dim {
                let a = self.data[r * dim + c];
                let b = other.data[c * dim + r];
                acc = acc + (a.re * b.re - a.im * b.im);
            }
        }
        acc
    }

    pub fn max_abs_diff(&self, other: &Self) -> T {
        self.data
            .iter()
            .zip(&other.data)
            .fold(T::zero(), |m, (a, b)| m.max((*a - *b).norm()))
    }

    pub fn hermiticity_error(&self) -> T {
        let dim = self.dim();
        let mut worst = T::zero();
        for r in 0..dim {
            for c in r..dim {
                let d = self.data[r * dim + c] - self.data[c * dim + r].conj();
                worst = worst.max(d.norm());
            }
        }
        worst
    }

    pub fn to_nalgebra(&self) -> nalgebra::DMatrix<num_complex::Complex64> {
        let dim = self.dim();
        nalgebra::DMatrix::from_fn(dim, dim, |r, c| {
            let v = self.at(r, c);
            num_complex::Complex64::new(v.re.as_f64(), v.im.as_f64())
        })
    }
}
