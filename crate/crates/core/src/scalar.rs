//! Working precision.
//!
//! Everything in the crate is generic over [`Real`], implemented for `f32` and
//! `f64`. The dense kernels (Hermitian eigendecomposition, SVD, LU inverse,
//! matrix product, real symmetric tridiagonal eigensolver) are dispatched
//! through the trait so that generic code never has to name the backend's
//! field bounds.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use faer::dyn_stack::{MemBuffer, MemStack};
use faer::linalg::evd::{self, ComputeEigenvectors};
use faer::linalg::solvers::DenseSolveCore;
use faer::{Accum, Mat, MatRef, Side};
use num_complex::Complex;
use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};

use crate::error::{Error, Result};
use crate::linalg::CMat;

/// Real scalar type backing [`CMat`] entries.
pub trait Real:
    Float + FloatConst + FromPrimitive + ToPrimitive + Debug + Display + Default + Sum + Send + Sync + 'static
{
    /// Converts an `f64` literal into the working precision.
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("finite literal")
    }

    /// Lossy conversion used for error payloads and reports.
    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    /// `nominal` when the precision can resolve it, otherwise a small multiple
    /// of machine epsilon.
    fn tol(nominal: f64) -> Self {
        let floor = Self::epsilon() * Self::lit(256.0);
        let nominal = Self::lit(nominal);
        if nominal > floor {
            nominal
        } else {
            floor
        }
    }

    fn herm_eigen(m: &CMat<Self>) -> Result<(Vec<Self>, CMat<Self>)>;
    fn herm_eigenvalues(m: &CMat<Self>) -> Result<Vec<Self>>;
    /// Full SVD `m = U diag(s) V*`, singular values non-increasing.
    fn svd(m: &CMat<Self>) -> Result<(CMat<Self>, Vec<Self>, CMat<Self>)>;
    fn singular_values(m: &CMat<Self>) -> Result<Vec<Self>>;
    fn matmul(a: &CMat<Self>, b: &CMat<Self>) -> CMat<Self>;
    fn inverse(m: &CMat<Self>) -> CMat<Self>;
    /// Eigenvalues of the real symmetric tridiagonal matrix with diagonal
    /// `diag` and off-diagonal `off` (`off.len() + 1 == diag.len()`).
    fn tridiag_eigenvalues(diag: &[Self], off: &[Self]) -> Result<Vec<Self>>;
    /// Eigenvalues and real column-major eigenvectors of a symmetric
    /// tridiagonal matrix.
    fn tridiag_eigen(diag: &[Self], off: &[Self]) -> Result<(Vec<Self>, Vec<Self>)>;
}

fn backend_err(what: &str, e: impl Debug) -> Error {
    Error::Backend(format!("{what}: {e:?}"))
}

macro_rules! impl_real {
    ($t:ty) => {
        impl Real for $t {
            fn herm_eigen(m: &CMat<Self>) -> Result<(Vec<Self>, CMat<Self>)> {
                let a = view(m);
                let evd = a
                    .self_adjoint_eigen(Side::Lower)
                    .map_err(|e| backend_err("hermitian eigendecomposition", e))?;
                let s = evd.S().column_vector();
                let values = (0..m.rows()).map(|i| s[i].re).collect();
                Ok((values, from_faer(evd.U())))
            }

            fn herm_eigenvalues(m: &CMat<Self>) -> Result<Vec<Self>> {
                view(m)
                    .self_adjoint_eigenvalues(Side::Lower)
                    .map_err(|e| backend_err("hermitian eigenvalues", e))
            }

            fn svd(m: &CMat<Self>) -> Result<(CMat<Self>, Vec<Self>, CMat<Self>)> {
                let svd = view(m).svd().map_err(|e| backend_err("svd", e))?;
                let s = svd.S().column_vector();
                let k = m.rows().min(m.cols());
                let values = (0..k).map(|i| s[i].re).collect();
                Ok((from_faer(svd.U()), values, from_faer(svd.V())))
            }

            fn singular_values(m: &CMat<Self>) -> Result<Vec<Self>> {
                view(m)
                    .singular_values()
                    .map_err(|e| backend_err("singular values", e))
            }

            fn matmul(a: &CMat<Self>, b: &CMat<Self>) -> CMat<Self> {
                assert_eq!(a.cols(), b.rows(), "matmul inner dimension");
                let mut out = Mat::<Complex<$t>>::zeros(a.rows(), b.cols());
                faer::linalg::matmul::matmul(
                    out.as_mut(),
                    Accum::Replace,
                    view(a),
                    view(b),
                    Complex::new(1.0, 0.0),
                    faer::get_global_parallelism(),
                );
                from_faer(out.as_ref())
            }

            fn inverse(m: &CMat<Self>) -> CMat<Self> {
                from_faer(view(m).partial_piv_lu().inverse().as_ref())
            }

            fn tridiag_eigenvalues(diag: &[Self], off: &[Self]) -> Result<Vec<Self>> {
                tridiag_impl::<$t>(diag, off, false).map(|(v, _)| v)
            }

            fn tridiag_eigen(diag: &[Self], off: &[Self]) -> Result<(Vec<Self>, Vec<Self>)> {
                tridiag_impl::<$t>(diag, off, true)
            }
        }
    };
}

impl_real!(f32);
impl_real!(f64);

fn view<T: Real>(m: &CMat<T>) -> MatRef<'_, Complex<T>> {
    MatRef::from_column_major_slice(m.as_slice(), m.rows(), m.cols())
}

fn from_faer<T: Real>(m: MatRef<'_, Complex<T>>) -> CMat<T> {
    let (r, c) = (m.nrows(), m.ncols());
    let mut data = Vec::with_capacity(r * c);
    for j in 0..c {
        for i in 0..r {
            data.push(m[(i, j)]);
        }
    }
    CMat::from_column_major(r, c, data)
}

fn tridiag_impl<T>(diag: &[T], off: &[T], vectors: bool) -> Result<(Vec<T>, Vec<T>)>
where
    T: Real + faer::traits::RealField,
{
    let n = diag.len();
    if n == 0 {
        return Ok((Vec::new(), Vec::new()));
    }
    assert_eq!(off.len() + 1, n, "tridiagonal off-diagonal length");
    let d = faer::Col::<T>::from_fn(n, |i| diag[i]);
    let e = faer::Col::<T>::from_fn(n, |i| if i + 1 < n { off[i] } else { T::zero() });
    let mut s = faer::diag::Diag::<T>::zeros(n);
    let mut u = if vectors { Some(Mat::<T>::zeros(n, n)) } else { None };
    let par = faer::get_global_parallelism();
    let compute = if vectors {
        ComputeEigenvectors::Yes
    } else {
        ComputeEigenvectors::No
    };
    let mut mem = MemBuffer::new(evd::self_adjoint_evd_scratch::<T>(n, compute, par, Default::default()));
    evd::tridiagonal_self_adjoint_evd(
        d.as_diagonal(),
        e.as_diagonal(),
        s.as_mut(),
        u.as_mut().map(|u| u.as_mut()),
        par,
        MemStack::new(&mut mem),
        Default::default(),
    )
    .map_err(|e| backend_err("tridiagonal eigendecomposition", e))?;
    let col = s.column_vector();
    let mut order: Vec<usize> = (0..n).collect();
    // the QR path does not guarantee ascending order
    order.sort_by(|&a, &b| col[a].partial_cmp(&col[b]).expect("finite eigenvalues"));
    let values: Vec<T> = order.iter().map(|&i| col[i]).collect();
    let mut vecs = Vec::new();
    if let Some(u) = u {
        vecs.reserve(n * n);
        for &j in &order {
            for i in 0..n {
                vecs.push(u[(i, j)]);
            }
        }
    }
    Ok((values, vecs))
}
