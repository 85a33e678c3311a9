//! Dense complex matrices and Hermitian operators with memoized spectra.

use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Neg, Sub};
use std::sync::OnceLock;

use num_complex::Complex;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Relative Hermiticity tolerance applied at [`HermOp`] construction.
pub const HERMITIAN_TOL: f64 = 1e-12;

/// Dense complex matrix, column-major storage.
#[derive(Clone, PartialEq)]
pub struct CMat<T> {
    rows: usize,
    cols: usize,
    data: Vec<Complex<T>>,
}

impl<T: fmt::Debug> fmt::Debug for CMat<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "CMat {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows.min(8) {
            write!(f, "  ")?;
            for j in 0..self.cols.min(8) {
                let z = &self.data[i + j * self.rows];
                write!(f, "({:.4?}, {:.4?}) ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

impl<T: Real> CMat<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![Complex::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        Self::scalar(n, Complex::one())
    }

    /// `z` times the identity.
    pub fn scalar(n: usize, z: Complex<T>) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = z;
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Complex<T>) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for j in 0..cols {
            for i in 0..rows {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    pub fn from_column_major(rows: usize, cols: usize, data: Vec<Complex<T>>) -> Self {
        assert_eq!(data.len(), rows * cols, "column-major buffer length");
        Self { rows, cols, data }
    }

    /// Builds a matrix from real rows, e.g. `CMat::from_real_rows(&[&[0.0, 1.0], &[1.0, 0.0]])`.
    pub fn from_real_rows(rows: &[&[T]]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        assert!(rows.iter().all(|row| row.len() == c), "ragged rows");
        Self::from_fn(r, c, |i, j| Complex::new(rows[i][j], T::zero()))
    }

    pub fn from_diag(diag: &[Complex<T>]) -> Self {
        let mut m = Self::zeros(diag.len(), diag.len());
        for (i, &z) in diag.iter().enumerate() {
            m[(i, i)] = z;
        }
        m
    }

    pub fn from_real_diag(diag: &[T]) -> Self {
        let mut m = Self::zeros(diag.len(), diag.len());
        for (i, &x) in diag.iter().enumerate() {
            m[(i, i)] = Complex::new(x, T::zero());
        }
        m
    }

    /// Assembles `[[a, b], [c, d]]`.
    pub fn block2(a: &Self, b: &Self, c: &Self, d: &Self) -> Self {
        assert_eq!(a.rows, b.rows);
        assert_eq!(c.rows, d.rows);
        assert_eq!(a.cols, c.cols);
        assert_eq!(b.cols, d.cols);
        let (r0, c0) = (a.rows, a.cols);
        Self::from_fn(a.rows + c.rows, a.cols + b.cols, |i, j| match (i < r0, j < c0) {
            (true, true) => a[(i, j)],
            (true, false) => b[(i, j - c0)],
            (false, true) => c[(i - r0, j)],
            (false, false) => d[(i - r0, j - c0)],
        })
    }

    pub fn block_diag(a: &Self, d: &Self) -> Self {
        Self::block2(a, &Self::zeros(a.rows, d.cols), &Self::zeros(d.rows, a.cols), d)
    }

    /// Copies the `rows x cols` block starting at `(r0, c0)`.
    pub fn block(&self, r0: usize, c0: usize, rows: usize, cols: usize) -> Self {
        assert!(r0 + rows <= self.rows && c0 + cols <= self.cols, "block out of range");
        Self::from_fn(rows, cols, |i, j| self[(r0 + i, c0 + j)])
    }

    /// Selects the given columns, in order.
    pub fn columns(&self, idx: &[usize]) -> Self {
        Self::from_fn(self.rows, idx.len(), |i, j| self[(i, idx[j])])
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn as_slice(&self) -> &[Complex<T>] {
        &self.data
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn matmul(&self, rhs: &Self) -> Self {
        assert_eq!(self.cols, rhs.rows, "matmul: {}x{} times {}x{}", self.rows, self.cols, rhs.rows, rhs.cols);
        if self.rows == 0 || rhs.cols == 0 || self.cols == 0 {
            return Self::zeros(self.rows, rhs.cols);
        }
        T::matmul(self, rhs)
    }

    pub fn mul_vec(&self, v: &[Complex<T>]) -> Vec<Complex<T>> {
        assert_eq!(self.cols, v.len());
        let mut out = vec![Complex::zero(); self.rows];
        for (j, &x) in v.iter().enumerate() {
            let col = &self.data[j * self.rows..(j + 1) * self.rows];
            for (o, &a) in out.iter_mut().zip(col) {
                *o = *o + a * x;
            }
        }
        out
    }

    pub fn scale(&self, z: Complex<T>) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&x| x * z).collect(),
        }
    }

    pub fn scale_real(&self, x: T) -> Self {
        self.scale(Complex::new(x, T::zero()))
    }

    /// Multiplies column `j` by `d[j]`, i.e. `self * diag(d)`.
    pub fn scale_columns(&self, d: &[Complex<T>]) -> Self {
        assert_eq!(d.len(), self.cols);
        let mut out = self.clone();
        for (j, &z) in d.iter().enumerate() {
            for x in &mut out.data[j * self.rows..(j + 1) * self.rows] {
                *x = *x * z;
            }
        }
        out
    }

    pub fn trace(&self) -> Complex<T> {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).fold(Complex::zero(), |a, b| a + b)
    }

    pub fn frobenius_norm(&self) -> T {
        self.data.iter().map(|z| z.norm_sqr()).sum::<T>().sqrt()
    }

    pub fn max_abs(&self) -> T {
        self.data.iter().map(|z| z.norm()).fold(T::zero(), T::max)
    }

    /// Largest singular value.
    pub fn op_norm(&self) -> T {
        op_norm(self)
    }

    /// `(M + M*) / 2`.
    pub fn hermitian_part(&self) -> Self {
        (self + &self.adjoint()).scale_real(T::lit(0.5))
    }

    /// `||M* M - 1||`.
    pub fn unitarity_defect(&self) -> T {
        (&self.adjoint().matmul(self) - &Self::identity(self.cols)).op_norm()
    }

    pub fn inverse(&self) -> Self {
        assert!(self.is_square(), "inverse of non-square matrix");
        T::inverse(self)
    }

    pub fn is_real(&self) -> bool {
        self.data.iter().all(|z| z.im == T::zero())
    }
}

impl<T> Index<(usize, usize)> for CMat<T> {
    type Output = Complex<T>;

    fn index(&self, (i, j): (usize, usize)) -> &Complex<T> {
        debug_assert!(i < self.rows && j < self.cols);
        &self.data[i + j * self.rows]
    }
}

impl<T> IndexMut<(usize, usize)> for CMat<T> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex<T> {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.data[i + j * self.rows]
    }
}

impl<T: Real> Add for &CMat<T> {
    type Output = CMat<T>;

    fn add(self, rhs: &CMat<T>) -> CMat<T> {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols), "add: shape mismatch");
        CMat {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(&a, &b)| a + b).collect(),
        }
    }
}

impl<T: Real> Sub for &CMat<T> {
    type Output = CMat<T>;

    fn sub(self, rhs: &CMat<T>) -> CMat<T> {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols), "sub: shape mismatch");
        CMat {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(&a, &b)| a - b).collect(),
        }
    }
}

impl<T: Real> Mul for &CMat<T> {
    type Output = CMat<T>;

    fn mul(self, rhs: &CMat<T>) -> CMat<T> {
        self.matmul(rhs)
    }
}

impl<T: Real> Neg for &CMat<T> {
    type Output = CMat<T>;

    fn neg(self) -> CMat<T> {
        self.scale_real(-T::one())
    }
}

/// Largest singular value of `m`; zero for empty matrices.
pub fn op_norm<T: Real>(m: &CMat<T>) -> T {
    if m.rows() == 0 || m.cols() == 0 {
        return T::zero();
    }
    if m.max_abs() == T::zero() {
        return T::zero();
    }
    T::singular_values(m)
        .ok()
        .and_then(|s| s.first().copied())
        // SVD did not converge: fall back on the Hermitian route through M*M
        .unwrap_or_else(|| {
            let g = m.adjoint().matmul(m).hermitian_part();
            T::herm_eigenvalues(&g)
                .map(|v| v.last().copied().unwrap_or_else(T::zero).max(T::zero()).sqrt())
                .unwrap_or_else(|_| m.frobenius_norm())
        })
}

/// Eigenvalues (ascending) with a unitary matrix of eigenvectors as columns.
#[derive(Clone, Debug)]
pub struct Eigen<T> {
    pub values: Vec<T>,
    pub vectors: CMat<T>,
}

#[derive(Clone, Debug)]
enum Repr<T> {
    Dense,
    /// Real symmetric tridiagonal storage; `dense` is filled on demand.
    Tridiagonal { diag: Vec<T>, off: Vec<T> },
}

/// Hermitian operator with lazily computed, memoized spectral data.
///
/// Values are immutable once built; the memo cells are safe to fill from
/// several threads at once (a racing thread may compute a decomposition twice,
/// but only one result is kept).
#[derive(Clone)]
pub struct HermOp<T: Real> {
    dim: usize,
    repr: Repr<T>,
    dense: OnceLock<CMat<T>>,
    spectrum: OnceLock<Vec<T>>,
    eigen: OnceLock<Eigen<T>>,
}

impl<T: Real> fmt::Debug for HermOp<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("HermOp")
            .field("dim", &self.dim)
            .field("tridiagonal", &matches!(self.repr, Repr::Tridiagonal { .. }))
            .finish()
    }
}

impl<T: Real> HermOp<T> {
    /// Validates Hermiticity to [`HERMITIAN_TOL`] relative (Frobenius) and
    /// stores the symmetrized matrix.
    pub fn new(m: CMat<T>) -> Result<Self> {
        if !m.is_square() {
            return Err(Error::DimensionMismatch {
                expected: "square matrix".into(),
                found: format!("{}x{}", m.rows(), m.cols()),
            });
        }
        let adj = m.adjoint();
        let deviation = (&m - &adj).frobenius_norm();
        let norm = m.frobenius_norm();
        let tol = T::tol(HERMITIAN_TOL);
        if deviation > tol * norm {
            return Err(Error::NotHermitian {
                deviation: deviation.as_f64(),
                norm: norm.as_f64(),
                tolerance: tol.as_f64(),
            });
        }
        let sym = (&m + &adj).scale_real(T::lit(0.5));
        Ok(Self::from_dense_unchecked(sym))
    }

    /// Wraps a matrix already known to be exactly Hermitian.
    pub(crate) fn from_dense_unchecked(m: CMat<T>) -> Self {
        let dim = m.rows();
        let dense = OnceLock::new();
        let _ = dense.set(m);
        Self {
            dim,
            repr: Repr::Dense,
            dense,
            spectrum: OnceLock::new(),
            eigen: OnceLock::new(),
        }
    }

    pub fn from_real_diag(diag: &[T]) -> Self {
        let mut op = Self::from_dense_unchecked(CMat::from_real_diag(diag));
        let mut values = diag.to_vec();
        let mut order: Vec<usize> = (0..diag.len()).collect();
        order.sort_by(|&a, &b| diag[a].partial_cmp(&diag[b]).expect("finite diagonal"));
        values.sort_by(|a, b| a.partial_cmp(b).expect("finite diagonal"));
        let vectors = CMat::identity(diag.len()).columns(&order);
        op.eigen = OnceLock::new();
        let _ = op.eigen.set(Eigen { values, vectors });
        op
    }

    /// Real symmetric tridiagonal operator. `off[i]` couples entries `i` and `i + 1`.
    pub fn tridiagonal(diag: Vec<T>, off: Vec<T>) -> Result<Self> {
        if diag.is_empty() || off.len() + 1 != diag.len() {
            return Err(Error::DimensionMismatch {
                expected: format!("off-diagonal of length {}", diag.len().saturating_sub(1)),
                found: format!("{}", off.len()),
            });
        }
        Ok(Self {
            dim: diag.len(),
            repr: Repr::Tridiagonal { diag, off },
            dense: OnceLock::new(),
            spectrum: OnceLock::new(),
            eigen: OnceLock::new(),
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Diagonal and off-diagonal when the operator was built as tridiagonal.
    pub fn tridiagonal_parts(&self) -> Option<(&[T], &[T])> {
        match &self.repr {
            Repr::Tridiagonal { diag, off } => Some((diag, off)),
            Repr::Dense => None,
        }
    }

    pub fn matrix(&self) -> &CMat<T> {
        self.dense.get_or_init(|| match &self.repr {
            Repr::Tridiagonal { diag, off } => {
                let n = diag.len();
                let mut m = CMat::zeros(n, n);
                for i in 0..n {
                    m[(i, i)] = Complex::new(diag[i], T::zero());
                    if i + 1 < n {
                        m[(i, i + 1)] = Complex::new(off[i], T::zero());
                        m[(i + 1, i)] = Complex::new(off[i], T::zero());
                    }
                }
                m
            }
            Repr::Dense => unreachable!("dense operators are stored at construction"),
        })
    }

    /// Ascending eigenvalues.
    pub fn eigenvalues(&self) -> Result<&[T]> {
        if let Some(e) = self.eigen.get() {
            return Ok(&e.values);
        }
        if let Some(s) = self.spectrum.get() {
            return Ok(s);
        }
        let values = match &self.repr {
            Repr::Tridiagonal { diag, off } => T::tridiag_eigenvalues(diag, off)?,
            Repr::Dense => T::herm_eigenvalues(self.matrix())?,
        };
        Ok(self.spectrum.get_or_init(|| values))
    }

    pub fn eigen(&self) -> Result<&Eigen<T>> {
        if let Some(e) = self.eigen.get() {
            return Ok(e);
        }
        let eig = match &self.repr {
            Repr::Tridiagonal { diag, off } => {
                let n = diag.len();
                let (values, vecs) = T::tridiag_eigen(diag, off)?;
                let data = vecs.into_iter().map(|x| Complex::new(x, T::zero())).collect();
                Eigen {
                    values,
                    vectors: CMat::from_column_major(n, n, data),
                }
            }
            Repr::Dense => {
                let (values, vectors) = T::herm_eigen(self.matrix())?;
                Eigen { values, vectors }
            }
        };
        Ok(self.eigen.get_or_init(|| eig))
    }

    pub fn min_eigenvalue(&self) -> Result<T> {
        Ok(self.eigenvalues()?.first().copied().unwrap_or_else(T::zero))
    }

    pub fn max_eigenvalue(&self) -> Result<T> {
        Ok(self.eigenvalues()?.last().copied().unwrap_or_else(T::zero))
    }

    /// Operator norm, `max |λ|`.
    pub fn norm(&self) -> Result<T> {
        Ok(self.eigenvalues()?.iter().fold(T::zero(), |m, &x| m.max(x.abs())))
    }

    /// `U f(Λ) U*`.
    pub fn func_calc(&self, f: impl Fn(T) -> Complex<T>) -> Result<CMat<T>> {
        self.try_func_calc(|x| Some(f(x)))
    }

    /// Like [`HermOp::func_calc`], but `f` may refuse an eigenvalue, which is
    /// reported as [`Error::Domain`].
    pub fn try_func_calc(&self, f: impl Fn(T) -> Option<Complex<T>>) -> Result<CMat<T>> {
        let eig = self.eigen()?;
        let fv = eig
            .values
            .iter()
            .map(|&x| {
                f(x).filter(|z| z.re.is_finite() && z.im.is_finite())
                    .ok_or(Error::Domain { eigenvalue: x.as_f64() })
            })
            .collect::<Result<Vec<_>>>()?;
        let scaled = eig.vectors.scale_columns(&fv);
        Ok(scaled.matmul(&eig.vectors.adjoint()))
    }

    /// Same spectral calculus, for real-valued `f`, returned as a Hermitian operator.
    pub fn map_real(&self, f: impl Fn(T) -> T) -> Result<HermOp<T>> {
        let m = self.func_calc(|x| Complex::new(f(x), T::zero()))?;
        Ok(Self::from_dense_unchecked(m.hermitian_part()))
    }

    /// Frobenius distance between the two matrices.
    pub fn distance(&self, other: &Self) -> T {
        if let (Some((d1, o1)), Some((d2, o2))) = (self.tridiagonal_parts(), other.tridiagonal_parts()) {
            if d1.len() == d2.len() {
                let dd: T = d1.iter().zip(d2).map(|(a, b)| (*a - *b).powi(2)).sum();
                let oo: T = o1.iter().zip(o2).map(|(a, b)| (*a - *b).powi(2)).sum();
                return (dd + oo + oo).sqrt();
            }
        }
        (self.matrix() - other.matrix()).frobenius_norm()
    }

    pub fn frobenius_norm(&self) -> T {
        match &self.repr {
            Repr::Tridiagonal { diag, off } => {
                let dd: T = diag.iter().map(|x| x.powi(2)).sum();
                let oo: T = off.iter().map(|x| x.powi(2)).sum();
                (dd + oo + oo).sqrt()
            }
            Repr::Dense => self.matrix().frobenius_norm(),
        }
    }
}

/// Hermitian eigendecomposition: ascending eigenvalues and unitary eigenvectors.
pub fn herm_eig<T: Real>(m: &HermOp<T>) -> Result<(Vec<T>, CMat<T>)> {
    let e = m.eigen()?;
    Ok((e.values.clone(), e.vectors.clone()))
}

/// Spectral functional calculus `f(M) = U f(Λ) U*`.
pub fn func_calc<T: Real>(m: &HermOp<T>, f: impl Fn(T) -> Complex<T>) -> Result<CMat<T>> {
    m.func_calc(f)
}

/// Real number as a complex scalar.
pub fn re<T: Real>(x: T) -> Complex<T> {
    Complex::new(x, T::zero())
}

/// The imaginary unit.
pub fn imag_unit<T: Real>() -> Complex<T> {
    Complex::new(T::zero(), T::one())
}
