//! Seeded random operators for property checks and the identity suite.

use num_complex::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::linalg::{CMat, HermOp};
use crate::scalar::Real;

pub type SeededRng = ChaCha8Rng;

pub fn seeded(seed: u64) -> SeededRng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn uniform<T: Real>(rng: &mut impl Rng, scale: f64) -> T {
    T::lit(rng.random_range(-scale..=scale))
}

/// Entries with independent real and imaginary parts uniform on `[-scale, scale]`.
pub fn random_matrix<T: Real>(rng: &mut impl Rng, rows: usize, cols: usize, scale: f64) -> CMat<T> {
    CMat::from_fn(rows, cols, |_, _| Complex::new(uniform(rng, scale), uniform(rng, scale)))
}

pub fn random_real_matrix<T: Real>(rng: &mut impl Rng, rows: usize, cols: usize, scale: f64) -> CMat<T> {
    CMat::from_fn(rows, cols, |_, _| Complex::new(uniform(rng, scale), T::zero()))
}

pub fn random_hermitian<T: Real>(rng: &mut impl Rng, n: usize, scale: f64) -> HermOp<T> {
    let m = random_matrix::<T>(rng, n, n, scale);
    HermOp::from_dense_unchecked(m.hermitian_part())
}

/// Random matrix rescaled to operator norm `radius`.
pub fn random_contraction<T: Real>(rng: &mut impl Rng, n: usize, radius: f64) -> CMat<T> {
    let m = random_matrix::<T>(rng, n, n, 1.0);
    let norm = m.op_norm();
    if norm == T::zero() {
        return m;
    }
    m.scale_real(T::lit(radius) / norm)
}

/// Random Hermitian matrix rescaled to operator norm `radius`.
pub fn random_hermitian_contraction<T: Real>(rng: &mut impl Rng, n: usize, radius: f64) -> HermOp<T> {
    let h = random_hermitian::<T>(rng, n, 1.0);
    let norm = h.norm().unwrap_or_else(|_| T::one());
    if norm == T::zero() {
        return h;
    }
    HermOp::from_dense_unchecked(h.matrix().scale_real(T::lit(radius) / norm))
}

/// Haar-like random unitary from the eigenvectors of a random Hermitian matrix.
pub fn random_unitary<T: Real>(rng: &mut impl Rng, n: usize) -> CMat<T> {
    let h = random_hermitian::<T>(rng, n, 1.0);
    h.eigen().expect("eigendecomposition of random Hermitian").vectors.clone()
}

/// Uniform sample in `[lo, hi]`.
pub fn uniform_in(rng: &mut impl Rng, lo: f64, hi: f64) -> f64 {
    rng.random_range(lo..=hi)
}

/// Random unit vector in `C^n`.
pub fn random_unit_vector<T: Real>(rng: &mut impl Rng, n: usize) -> Vec<Complex<T>> {
    loop {
        let v: Vec<Complex<T>> = (0..n).map(|_| Complex::new(uniform(rng, 1.0), uniform(rng, 1.0))).collect();
        let norm = v.iter().map(|z| z.norm_sqr()).sum::<T>().sqrt();
        if norm > T::lit(1e-3) {
            return v.into_iter().map(|z| z / norm).collect();
        }
    }
}
