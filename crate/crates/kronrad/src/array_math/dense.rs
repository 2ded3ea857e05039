//! Small dense complex matrices and the Hermitian factorizations the
//! detector algebra needs.
//!
//! Every matrix in this crate is tiny (at most the virtual-array dimension
//! `M·N`, i.e. tens of rows), so the implementations favour clarity and
//! numerical robustness over blocking: row-major storage, straightforward
//! `O(n³)` Cholesky, and a values-only complex Jacobi sweep for Hermitian
//! eigenvalues. Factorizations never panic on bad input — rank and
//! positivity guards return [`Error`](crate::Error) variants instead.

use crate::error::{Error, Result};
use crate::scalar::{czero, RadarScalar, C};
use num_complex::Complex;
use std::ops::{Index, IndexMut};

// ───────────────────────── vector helpers ─────────────────────────

/// Inner product `⟨a, b⟩ = Σ conj(a_i)·b_i` (conjugate-linear in `a`).
#[inline]
pub fn inner<T: RadarScalar>(a: &[C<T>], b: &[C<T>]) -> C<T> {
    debug_assert_eq!(a.len(), b.len());
    a.iter()
        .zip(b.iter())
        .fold(czero(), |acc, (x, y)| acc + x.conj() * y)
}

/// Squared Euclidean norm `Σ |a_i|²`.
#[inline]
pub fn norm2<T: RadarScalar>(a: &[C<T>]) -> T {
    a.iter().map(|x| x.norm_sqr()).sum()
}

/// Euclidean norm.
#[inline]
pub fn norm<T: RadarScalar>(a: &[C<T>]) -> T {
    norm2(a).sqrt()
}

/// Largest entry magnitude of a complex slice.
#[inline]
pub fn max_abs<T: RadarScalar>(a: &[C<T>]) -> T {
    a.iter().map(|x| x.norm()).fold(T::zero(), T::max)
}

// ───────────────────────── matrix type ─────────────────────────

/// Dense complex matrix in row-major order.
#[derive(Debug, Clone, PartialEq)]
pub struct CMat<T: RadarScalar> {
    rows: usize,
    cols: usize,
    data: Vec<C<T>>,
}

impl<T: RadarScalar> CMat<T> {
    /// All-zeros matrix.
    pub fn zeros(rows: usize, cols: usize) -> Self {
        CMat {
            rows,
            cols,
            data: vec![czero(); rows * cols],
        }
    }

    /// Identity matrix.
    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Complex::new(T::one(), T::zero());
        }
        m
    }

    /// Builds a matrix from a closure over `(row, col)`.
    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> C<T>) -> Self {
        let mut m = Self::zeros(rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                m[(i, j)] = f(i, j);
            }
        }
        m
    }

    /// Builds a matrix whose columns are the given equal-length vectors.
    pub fn from_cols(cols: &[Vec<C<T>>]) -> Result<Self> {
        if cols.is_empty() {
            return Err(Error::InvalidDimension("from_cols: no columns".into()));
        }
        let rows = cols[0].len();
        if rows == 0 {
            return Err(Error::InvalidDimension("from_cols: empty columns".into()));
        }
        if cols.iter().any(|c| c.len() != rows) {
            return Err(Error::DimensionMismatch(
                "from_cols: columns have unequal lengths".into(),
            ));
        }
        Ok(Self::from_fn(rows, cols.len(), |i, j| cols[j][i]))
    }

    /// Number of rows.
    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    /// Number of columns.
    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    /// Row `i` as a contiguous slice.
    #[inline]
    pub fn row(&self, i: usize) -> &[C<T>] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    /// Column `j` copied into a vector.
    pub fn col(&self, j: usize) -> Vec<C<T>> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    /// Conjugate (Hermitian) transpose.
    pub fn hermitian(&self) -> CMat<T> {
        CMat::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    /// Matrix product `self · rhs`.
    pub fn matmul(&self, rhs: &CMat<T>) -> CMat<T> {
        assert_eq!(
            self.cols, rhs.rows,
            "matmul: inner dimensions must agree ({}x{} · {}x{})",
            self.rows, self.cols, rhs.rows, rhs.cols
        );
        let mut out = CMat::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let aik = self[(i, k)];
                if aik == czero() {
                    continue;
                }
                for j in 0..rhs.cols {
                    out[(i, j)] += aik * rhs[(k, j)];
                }
            }
        }
        out
    }

    /// Matrix–vector product `self · x`.
    pub fn mul_vec(&self, x: &[C<T>]) -> Vec<C<T>> {
        assert_eq!(self.cols, x.len(), "mul_vec: dimension mismatch");
        (0..self.rows)
            .map(|i| {
                self.row(i)
                    .iter()
                    .zip(x.iter())
                    .fold(czero(), |acc, (a, b)| acc + a * b)
            })
            .collect()
    }

    /// Entrywise sum `self + rhs`.
    pub fn add(&self, rhs: &CMat<T>) -> CMat<T> {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        CMat::from_fn(self.rows, self.cols, |i, j| self[(i, j)] + rhs[(i, j)])
    }

    /// Entrywise difference `self - rhs`.
    pub fn sub(&self, rhs: &CMat<T>) -> CMat<T> {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        CMat::from_fn(self.rows, self.cols, |i, j| self[(i, j)] - rhs[(i, j)])
    }

    /// Scales every entry by a complex factor.
    pub fn scale(&self, s: C<T>) -> CMat<T> {
        CMat::from_fn(self.rows, self.cols, |i, j| self[(i, j)] * s)
    }

    /// Entrywise (Hadamard) product `self ⊙ rhs`.
    pub fn hadamard(&self, rhs: &CMat<T>) -> CMat<T> {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        CMat::from_fn(self.rows, self.cols, |i, j| self[(i, j)] * rhs[(i, j)])
    }

    /// Outer product `a · b^H` of two vectors.
    pub fn outer(a: &[C<T>], b: &[C<T>]) -> CMat<T> {
        CMat::from_fn(a.len(), b.len(), |i, j| a[i] * b[j].conj())
    }

    /// Kronecker product `self ⊗ rhs`.
    pub fn kron(&self, rhs: &CMat<T>) -> CMat<T> {
        let mut out = CMat::zeros(self.rows * rhs.rows, self.cols * rhs.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                let aij = self[(i, j)];
                for p in 0..rhs.rows {
                    for q in 0..rhs.cols {
                        out[(i * rhs.rows + p, j * rhs.cols + q)] = aij * rhs[(p, q)];
                    }
                }
            }
        }
        out
    }

    /// Frobenius norm.
    pub fn fro_norm(&self) -> T {
        norm(&self.data)
    }

    /// Largest entry magnitude.
    pub fn max_abs(&self) -> T {
        max_abs(&self.data)
    }

    /// Largest entrywise deviation `max |self - rhs|`.
    pub fn max_abs_diff(&self, rhs: &CMat<T>) -> T {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        let mut d = T::zero();
        for i in 0..self.rows {
            for j in 0..self.cols {
                d = d.max((self[(i, j)] - rhs[(i, j)]).norm());
            }
        }
        d
    }

    /// Checks Hermitian symmetry to an absolute entrywise tolerance.
    pub fn is_hermitian(&self, tol: T) -> bool {
        if self.rows != self.cols {
            return false;
        }
        for i in 0..self.rows {
            for j in i..self.cols {
                if (self[(i, j)] - self[(j, i)].conj()).norm() > tol {
                    return false;
                }
            }
        }
        true
    }

    /// Raw data slice (row-major).
    #[inline]
    pub fn as_slice(&self) -> &[C<T>] {
        &self.data
    }

    // ───────────────────────── factorizations ─────────────────────────

    /// Cholesky factorization `A = L·L^H` of a Hermitian positive-definite
    /// matrix, with a relative pivot guard: factorization fails once a
    /// pivot drops to `pivot_rel` times the largest initial diagonal entry.
    pub fn cholesky(&self, pivot_rel: f64) -> Result<Cholesky<T>> {
        if self.rows != self.cols {
            return Err(Error::InvalidDimension(format!(
                "cholesky: matrix must be square, got {}x{}",
                self.rows, self.cols
            )));
        }
        let n = self.rows;
        let mut max_diag = T::zero();
        for i in 0..n {
            max_diag = max_diag.max(self[(i, i)].re.abs());
        }
        let floor = T::lit(pivot_rel) * max_diag.max(T::min_positive_value());
        let mut l = CMat::zeros(n, n);
        for j in 0..n {
            let mut d = self[(j, j)].re;
            for k in 0..j {
                d -= l[(j, k)].norm_sqr();
            }
            if d <= floor {
                return Err(Error::NotPositiveDefinite(format!(
                    "pivot {:.3e} at index {} (guard {:.3e})",
                    d.as_f64(),
                    j,
                    floor.as_f64()
                )));
            }
            let ljj = d.sqrt();
            l[(j, j)] = Complex::new(ljj, T::zero());
            for i in (j + 1)..n {
                let mut s = self[(i, j)];
                for k in 0..j {
                    s -= l[(i, k)] * l[(j, k)].conj();
                }
                l[(i, j)] = s / ljj;
            }
        }
        Ok(Cholesky { l })
    }

    /// Eigenvalues of a Hermitian matrix, ascending, via cyclic complex
    /// Jacobi rotations (values only — no eigenvectors are accumulated).
    ///
    /// The input is symmetrized as `(A + A^H)/2` before iterating, so tiny
    /// Hermitian-symmetry violations from accumulated round-off are
    /// tolerated silently.
    pub fn hermitian_eigenvalues(&self) -> Result<Vec<T>> {
        if self.rows != self.cols {
            return Err(Error::InvalidDimension(format!(
                "hermitian_eigenvalues: matrix must be square, got {}x{}",
                self.rows, self.cols
            )));
        }
        let n = self.rows;
        if n == 0 {
            return Ok(Vec::new());
        }
        // Work on the Hermitian part.
        let mut a = CMat::from_fn(n, n, |i, j| {
            (self[(i, j)] + self[(j, i)].conj()) * Complex::new(T::lit(0.5), T::zero())
        });
        let scale = a.fro_norm().max(T::min_positive_value());
        let tol = T::lit(1e-14) * scale;
        for _sweep in 0..60 {
            let mut off = T::zero();
            for p in 0..n {
                for q in (p + 1)..n {
                    off += a[(p, q)].norm_sqr();
                }
            }
            if off.sqrt() <= tol {
                break;
            }
            for p in 0..n {
                for q in (p + 1)..n {
                    let g = a[(p, q)];
                    let gmag = g.norm();
                    if gmag <= tol * T::lit(1e-2) {
                        continue;
                    }
                    // Phase factor turning the 2x2 pivot block real, then a
                    // classical symmetric Jacobi rotation on that block.
                    let phase = g / Complex::new(gmag, T::zero());
                    let app = a[(p, p)].re;
                    let aqq = a[(q, q)].re;
                    let tau = (aqq - app) / (gmag + gmag);
                    let t = if tau >= T::zero() {
                        T::one() / (tau + (T::one() + tau * tau).sqrt())
                    } else {
                        -T::one() / (-tau + (T::one() + tau * tau).sqrt())
                    };
                    let c = T::one() / (T::one() + t * t).sqrt();
                    let s = t * c;
                    let cc = Complex::new(c, T::zero());
                    let ss = Complex::new(s, T::zero());
                    let sp = phase * ss;
                    // Column update A ← A·U with the plane rotation
                    // U = [[c, s], [-s·e^{-iα}, c·e^{-iα}]].
                    for i in 0..n {
                        let aip = a[(i, p)];
                        let aiq = a[(i, q)];
                        a[(i, p)] = aip * cc - aiq * sp.conj();
                        a[(i, q)] = aip * ss + aiq * phase.conj() * cc;
                    }
                    // Row update A ← U^H·A.
                    for j in 0..n {
                        let apj = a[(p, j)];
                        let aqj = a[(q, j)];
                        a[(p, j)] = apj * cc - aqj * sp;
                        a[(q, j)] = apj * ss + aqj * phase * cc;
                    }
                    // Clean the pivot pair against round-off drift.
                    a[(p, q)] = czero();
                    a[(q, p)] = czero();
                    a[(p, p)] = Complex::new(a[(p, p)].re, T::zero());
                    a[(q, q)] = Complex::new(a[(q, q)].re, T::zero());
                }
            }
        }
        let mut evals: Vec<T> = (0..n).map(|i| a[(i, i)].re).collect();
        evals.sort_by(|x, y| x.partial_cmp(y).expect("eigenvalues are finite"));
        Ok(evals)
    }

    /// Singular values, descending, computed from the Hermitian eigenvalues
    /// of the Gram matrix (adequate at this crate's matrix sizes).
    pub fn singular_values(&self) -> Result<Vec<T>> {
        let gram = if self.rows >= self.cols {
            self.hermitian().matmul(self)
        } else {
            self.matmul(&self.hermitian())
        };
        let mut sv: Vec<T> = gram
            .hermitian_eigenvalues()?
            .into_iter()
            .map(|x| x.max(T::zero()).sqrt())
            .collect();
        sv.reverse();
        Ok(sv)
    }
}

impl<T: RadarScalar> Index<(usize, usize)> for CMat<T> {
    type Output = C<T>;
    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &C<T> {
        debug_assert!(i < self.rows && j < self.cols);
        &self.data[i * self.cols + j]
    }
}

impl<T: RadarScalar> IndexMut<(usize, usize)> for CMat<T> {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C<T> {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.data[i * self.cols + j]
    }
}

/// Lower-triangular Cholesky factor of a Hermitian positive-definite matrix.
#[derive(Debug, Clone)]
pub struct Cholesky<T: RadarScalar> {
    l: CMat<T>,
}

impl<T: RadarScalar> Cholesky<T> {
    /// Dimension of the factored matrix.
    #[inline]
    pub fn dim(&self) -> usize {
        self.l.rows()
    }

    /// The lower-triangular factor `L`.
    #[inline]
    pub fn factor(&self) -> &CMat<T> {
        &self.l
    }

    /// Solves `A·x = b` by forward/back substitution.
    pub fn solve(&self, b: &[C<T>]) -> Vec<C<T>> {
        let n = self.dim();
        assert_eq!(b.len(), n, "cholesky solve: dimension mismatch");
        // Forward: L·y = b.
        let mut y = b.to_vec();
        for i in 0..n {
            for k in 0..i {
                let lik = self.l[(i, k)];
                let yk = y[k];
                y[i] -= lik * yk;
            }
            y[i] /= self.l[(i, i)];
        }
        // Backward: L^H·x = y.
        for i in (0..n).rev() {
            for k in (i + 1)..n {
                let lki = self.l[(k, i)].conj();
                let yk = y[k];
                y[i] -= lki * yk;
            }
            y[i] /= self.l[(i, i)];
        }
        y
    }

    /// Full inverse `A^{-1}`, built column by column.
    pub fn inverse(&self) -> CMat<T> {
        let n = self.dim();
        let mut inv = CMat::zeros(n, n);
        let mut e = vec![czero(); n];
        for j in 0..n {
            e[j] = Complex::new(T::one(), T::zero());
            let x = self.solve(&e);
            for i in 0..n {
                inv[(i, j)] = x[i];
            }
            e[j] = czero();
        }
        inv
    }
}
