//! Explicit homotopies on a discretized `L²[0, 1]` and on matrices.
//!
//! The shrinking and stretching isometries
//!
//! ```text
//! u_s f(x) = s^{-1/2} f(x/s)              on [0, s],  zero beyond,
//! v_s f(x) = (1-s)^{-1/2} f((x-s)/(1-s))  on [s, 1],  zero before,
//! ```
//!
//! are discretized by Galerkin projection onto cell indicators: with
//! `e_j = √n 1_{cell_j}` the entry `⟨e_i, u_s e_j⟩` is `n s^{-1/2} |cell_i ∩ s·cell_j|`.
//! A compression of `[0, 1]` onto `[0, s]` has rank about `s n` on the grid, so
//! the discrete `u_s` cannot be an isometry in operator norm. It is one on
//! smooth functions, and [`low_mode_isometry_defect`] measures exactly that.
//! Away from `s = 1/2` a source cell can straddle two target cells and
//! `u_s u_s* + v_s v_s*` is no longer the identity.
//!
//! The contractions are parametrized so that `t = 0` gives the first operator
//! and `t = 1` the second, continuously in between:
//!
//! ```text
//! h_t = (1-t) u_{1-t} a u_{1-t}* + t v_{1-t} b v_{1-t}*
//! H_t = (1-t)⁻¹ u_{1-t} A u_{1-t}* + t⁻¹ v_{1-t} B v_{1-t}*
//! ```
//!
//! Endpoints are returned as clones of the inputs, so they are exact.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::linalg::{re, CMat, HermOp};
use crate::scalar::Real;

/// Smallest singular value accepted as injective.
pub const INJECTIVITY_TOL: f64 = 1e-10;
/// Distance of the spectrum of `u` from `-1` below which the logarithm is refused.
pub const BRANCH_CUT_TOL: f64 = 1e-8;
/// Number of cosine modes used by [`low_mode_isometry_defect`] by default.
pub const DEFAULT_LOW_MODES: usize = 16;

/// Uniform midpoint grid on `[0, 1]` with equal quadrature weights.
#[derive(Clone, Debug, PartialEq)]
pub struct GridSpace {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl GridSpace {
    pub fn new(n_points: usize) -> Result<Self> {
        if n_points == 0 {
            return Err(Error::Parameter("grid needs at least one point".into()));
        }
        let h = 1.0 / n_points as f64;
        Ok(Self {
            nodes: (0..n_points).map(|j| (j as f64 + 0.5) * h).collect(),
            weights: vec![h; n_points],
        })
    }

    pub fn n_points(&self) -> usize {
        self.nodes.len()
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// The first `count` orthonormal cosine modes `cos(π k x)` sampled at the
    /// nodes, as columns.
    pub fn cosine_modes<T: Real>(&self, count: usize) -> CMat<T> {
        let n = self.n_points();
        CMat::from_fn(n, count.min(n), |j, k| {
            let scale = if k == 0 { (1.0 / n as f64).sqrt() } else { (2.0 / n as f64).sqrt() };
            re(T::lit(scale * (std::f64::consts::PI * k as f64 * self.nodes[j]).cos()))
        })
    }

    /// `Σ_k w(k) q_k q_k*` over the full cosine basis: the grid version of a
    /// compact operator with smooth eigenfunctions.
    pub fn smooth_operator<T: Real>(&self, weight: impl Fn(usize) -> f64) -> HermOp<T> {
        let q = self.cosine_modes::<T>(self.n_points());
        let w: Vec<Complex<T>> = (0..q.cols()).map(|k| re(T::lit(weight(k)))).collect();
        HermOp::from_dense_unchecked(q.scale_columns(&w).matmul(&q.adjoint()).hermitian_part())
    }
}

/// Sparse column storage of a discretized isometry.
#[derive(Clone, Debug)]
pub struct GridMap {
    n: usize,
    cols: Vec<Vec<(usize, f64)>>,
}

impl GridMap {
    fn identity(n: usize) -> Self {
        Self {
            n,
            cols: (0..n).map(|j| vec![(j, 1.0)]).collect(),
        }
    }

    /// Column `j` is the image of cell `j` under `x ↦ offset + scale·x`, in cell units.
    fn affine(n: usize, offset: f64, scale: f64) -> Self {
        let amp = scale.sqrt().recip();
        let cols = (0..n)
            .map(|j| {
                let lo = offset + scale * j as f64;
                let hi = offset + scale * (j + 1) as f64;
                let first = (lo.floor() as usize).min(n - 1);
                let last = (hi.ceil() as usize).min(n);
                (first..last)
                    .filter_map(|i| {
                        let overlap = hi.min(i as f64 + 1.0) - lo.max(i as f64);
                        (overlap > 0.0).then_some((i, amp * overlap))
                    })
                    .collect()
            })
            .collect();
        Self { n, cols }
    }

    /// `u_s`, `s ∈ (0, 1]`.
    pub fn shrink(s: f64, grid: &GridSpace) -> Result<Self> {
        if !(s > 0.0 && s <= 1.0) {
            return Err(Error::Parameter(format!("shrink parameter {s} outside (0, 1]")));
        }
        let n = grid.n_points();
        Ok(if s == 1.0 { Self::identity(n) } else { Self::affine(n, 0.0, s) })
    }

    /// `v_s`, `s ∈ [0, 1)`.
    pub fn stretch(s: f64, grid: &GridSpace) -> Result<Self> {
        if !(0.0..1.0).contains(&s) {
            return Err(Error::Parameter(format!("stretch parameter {s} outside [0, 1)")));
        }
        let n = grid.n_points();
        Ok(if s == 0.0 {
            Self::identity(n)
        } else {
            Self::affine(n, s * n as f64, 1.0 - s)
        })
    }

    pub fn to_dense<T: Real>(&self) -> CMat<T> {
        let mut m = CMat::zeros(self.n, self.n);
        for (j, col) in self.cols.iter().enumerate() {
            for &(i, v) in col {
                m[(i, j)] = re(T::lit(v));
            }
        }
        m
    }

    /// `U M U*` in `O(n²)`.
    pub fn conjugate<T: Real>(&self, m: &CMat<T>) -> CMat<T> {
        let n = self.n;
        // W = M U*, column i of W collects M e_j weighted by U_ij
        let mut w = CMat::zeros(n, n);
        for (j, col) in self.cols.iter().enumerate() {
            for &(i, v) in col {
                let v = T::lit(v);
                for r in 0..n {
                    let add = m[(r, j)] * v;
                    w[(r, i)] = w[(r, i)] + add;
                }
            }
        }
        // U W, row j of W lands on the rows touched by column j of U
        let mut out = CMat::zeros(n, n);
        for (j, col) in self.cols.iter().enumerate() {
            for &(i, v) in col {
                let v = T::lit(v);
                for c in 0..n {
                    let add = w[(j, c)] * v;
                    out[(i, c)] = out[(i, c)] + add;
                }
            }
        }
        out
    }
}

/// Dense `u_t`.
pub fn shrink_isometry<T: Real>(t: f64, grid: &GridSpace) -> Result<CMat<T>> {
    Ok(GridMap::shrink(t, grid)?.to_dense())
}

/// Dense `v_t`.
pub fn stretch_isometry<T: Real>(t: f64, grid: &GridSpace) -> Result<CMat<T>> {
    Ok(GridMap::stretch(t, grid)?.to_dense())
}

/// `u ⊕ u`, the isometry used on graded (doubled) spaces.
pub fn paired<T: Real>(u: &CMat<T>) -> CMat<T> {
    CMat::block_diag(u, u)
}

/// `‖Q* U* U Q - 1‖` on the span `Q` of the lowest `modes` cosine modes.
pub fn low_mode_isometry_defect<T: Real>(u: &CMat<T>, grid: &GridSpace, modes: usize) -> T {
    let q = grid.cosine_modes::<T>(modes);
    let uq = u.matmul(&q);
    (&uq.adjoint().matmul(&uq) - &CMat::identity(q.cols())).op_norm()
}

/// `‖u_t u_t* + v_t v_t* - 1‖`.
pub fn complementarity_defect<T: Real>(t: f64, grid: &GridSpace) -> Result<T> {
    let u = shrink_isometry::<T>(t, grid)?;
    let v = stretch_isometry::<T>(t, grid)?;
    let sum = &u.matmul(&u.adjoint()) + &v.matmul(&v.adjoint());
    Ok((&sum - &CMat::identity(grid.n_points())).op_norm())
}

fn check_unit_interval(t: f64) -> Result<()> {
    if (0.0..=1.0).contains(&t) {
        Ok(())
    } else {
        Err(Error::Parameter(format!("homotopy parameter {t} outside [0, 1]")))
    }
}

fn check_grid<T: Real>(m: &CMat<T>, grid: &GridSpace) -> Result<()> {
    let n = grid.n_points();
    if m.rows() == n && m.cols() == n {
        Ok(())
    } else {
        Err(Error::DimensionMismatch {
            expected: format!("{n}x{n} on the grid"),
            found: format!("{}x{}", m.rows(), m.cols()),
        })
    }
}

/// Smallest singular value.
pub fn min_singular<T: Real>(m: &CMat<T>) -> Result<T> {
    Ok(T::singular_values(m)?.last().copied().unwrap_or_else(T::zero))
}

fn check_injective<T: Real>(m: &CMat<T>) -> Result<()> {
    let s = min_singular(m)?;
    if s < T::lit(INJECTIVITY_TOL) {
        Err(Error::Degenerate {
            min_singular: s.as_f64(),
            tolerance: INJECTIVITY_TOL,
        })
    } else {
        Ok(())
    }
}

/// Contraction of injective compact operators from `a` (`t = 0`) to `b` (`t = 1`).
pub fn compact_contraction<T: Real>(t: f64, a: &CMat<T>, b: &CMat<T>, grid: &GridSpace) -> Result<CMat<T>> {
    check_unit_interval(t)?;
    check_grid(a, grid)?;
    check_grid(b, grid)?;
    check_injective(a)?;
    check_injective(b)?;
    Ok(compact_unchecked(t, a, b, grid))
}

fn compact_unchecked<T: Real>(t: f64, a: &CMat<T>, b: &CMat<T>, grid: &GridSpace) -> CMat<T> {
    if t == 0.0 {
        return a.clone();
    }
    if t == 1.0 {
        return b.clone();
    }
    let s = 1.0 - t;
    let u = GridMap::shrink(s, grid).expect("s in (0, 1)");
    let v = GridMap::stretch(s, grid).expect("s in (0, 1)");
    &u.conjugate(a).scale_real(T::lit(s)) + &v.conjugate(b).scale_real(T::lit(t))
}

fn check_invertible<T: Real>(a: &HermOp<T>) -> Result<()> {
    let m = a.eigenvalues()?.iter().fold(T::infinity(), |m, x| m.min(x.abs()));
    if m < T::lit(INJECTIVITY_TOL) {
        Err(Error::Degenerate {
            min_singular: m.as_f64(),
            tolerance: INJECTIVITY_TOL,
        })
    } else {
        Ok(())
    }
}

/// Contraction of invertible operators from `A` (`t = 0`) to `B` (`t = 1`);
/// its inverse tracks [`compact_contraction`] of the inverses.
pub fn invertible_contraction<T: Real>(t: f64, a: &HermOp<T>, b: &HermOp<T>, grid: &GridSpace) -> Result<HermOp<T>> {
    check_unit_interval(t)?;
    check_grid(a.matrix(), grid)?;
    check_grid(b.matrix(), grid)?;
    check_invertible(a)?;
    check_invertible(b)?;
    if t == 0.0 {
        return Ok(a.clone());
    }
    if t == 1.0 {
        return Ok(b.clone());
    }
    let s = 1.0 - t;
    let u = GridMap::shrink(s, grid)?;
    let v = GridMap::stretch(s, grid)?;
    let h = &u.conjugate(a.matrix()).scale_real(T::lit(1.0 / s)) + &v.conjugate(b.matrix()).scale_real(T::lit(1.0 / t));
    Ok(HermOp::from_dense_unchecked(h.hermitian_part()))
}

/// `diag(0.9/(j + 1))`, a positive injective contraction of norm `0.9`.
pub fn default_compactifier<T: Real>(n: usize) -> HermOp<T> {
    let d: Vec<T> = (0..n).map(|j| T::lit(0.9 / (j as f64 + 1.0))).collect();
    HermOp::from_real_diag(&d)
}

/// `H'_t = C_t A C_t` with `C_t = ((1-t) + t k)⁻¹`.
pub fn compactify_homotopy<T: Real>(t: f64, a: &HermOp<T>, k: &HermOp<T>) -> Result<HermOp<T>> {
    check_unit_interval(t)?;
    if a.dim() != k.dim() {
        return Err(Error::DimensionMismatch {
            expected: format!("compactifier of dimension {}", a.dim()),
            found: format!("{}", k.dim()),
        });
    }
    let (lo, hi) = (k.min_eigenvalue()?, k.max_eigenvalue()?);
    if !(lo > T::zero()) || !(hi < T::one()) {
        return Err(Error::Parameter(format!(
            "compactifier must be positive with norm below 1, spectrum is [{lo}, {hi}]"
        )));
    }
    if t == 0.0 {
        return Ok(a.clone());
    }
    let (s, t) = (T::lit(1.0 - t), T::lit(t));
    let c = k.func_calc(|x| re(T::one() / (s + t * x)))?;
    Ok(HermOp::from_dense_unchecked(c.matmul(a.matrix()).matmul(&c).hermitian_part()))
}

/// `exp(t log u)` with the principal logarithm. The eigenbasis of `u` comes
/// from the Hermitian `i(1 - u)(1 + u)⁻¹`.
pub fn unitary_log_retraction<T: Real>(t: f64, u: &CMat<T>) -> Result<CMat<T>> {
    check_unit_interval(t)?;
    if !u.is_square() {
        return Err(Error::DimensionMismatch {
            expected: "square matrix".into(),
            found: format!("{}x{}", u.rows(), u.cols()),
        });
    }
    let defect = u.unitarity_defect();
    if defect > T::tol(1e-8) {
        return Err(Error::NotUnitary {
            defect: defect.as_f64(),
        });
    }
    let n = u.rows();
    let one = CMat::identity(n);
    let plus = &one + u;
    let gap = min_singular(&plus)?;
    if gap <= T::lit(BRANCH_CUT_TOL) {
        return Err(Error::BranchCut {
            distance: gap.as_f64(),
            tolerance: BRANCH_CUT_TOL,
        });
    }
    if t == 0.0 {
        return Ok(one);
    }
    if t == 1.0 {
        return Ok(u.clone());
    }
    let i = Complex::new(T::zero(), T::one());
    let generator = (&one - u).matmul(&plus.inverse()).scale(i);
    let basis = HermOp::from_dense_unchecked(generator.hermitian_part());
    let w = &basis.eigen()?.vectors;
    let diag = w.adjoint().matmul(u).matmul(w);
    let t = T::lit(t);
    let phases: Vec<Complex<T>> = (0..n).map(|k| Complex::from_polar(T::one(), t * diag[(k, k)].arg())).collect();
    Ok(w.scale_columns(&phases).matmul(&w.adjoint()))
}

/// Increments of a path sampled on a uniform grid of `[0, 1]`.
#[derive(Clone, Debug)]
pub struct LipschitzProfile {
    pub ts: Vec<f64>,
    /// `‖h(ts[k+1]) - h(ts[k])‖`.
    pub increments: Vec<f64>,
    /// Largest increment divided by the step.
    pub constant: f64,
}

pub fn lipschitz_profile<T: Real>(points: usize, h: impl Fn(f64) -> Result<CMat<T>>) -> Result<LipschitzProfile> {
    let points = points.max(2);
    let ts: Vec<f64> = (0..points).map(|k| k as f64 / (points - 1) as f64).collect();
    let values = ts.iter().map(|&t| h(t)).collect::<Result<Vec<_>>>()?;
    let increments: Vec<f64> = values.windows(2).map(|w| (&w[1] - &w[0]).op_norm().as_f64()).collect();
    let step = 1.0 / (points - 1) as f64;
    let constant = increments.iter().fold(0.0f64, |m, &d| m.max(d / step));
    Ok(LipschitzProfile {
        ts,
        increments,
        constant,
    })
}

/// The smooth compact pair used for the discretization checks:
/// cosine-mode weights `1/(k+1)` and `1/(k+1)²`.
pub fn reference_pair<T: Real>(grid: &GridSpace) -> (HermOp<T>, HermOp<T>) {
    let a = grid.smooth_operator(|k| 1.0 / (k as f64 + 1.0));
    let b = grid.smooth_operator(|k| 1.0 / ((k as f64 + 1.0) * (k as f64 + 1.0)));
    (a, b)
}

/// `E* M E` for the piecewise-constant prolongation `E` from `n` to `2n` cells.
fn restrict_to_coarse<T: Real>(m: &CMat<T>) -> CMat<T> {
    let n = m.rows() / 2;
    let half = T::lit(0.5);
    CMat::from_fn(n, n, |i, j| {
        (m[(2 * i, 2 * j)] + m[(2 * i + 1, 2 * j)] + m[(2 * i, 2 * j + 1)] + m[(2 * i + 1, 2 * j + 1)]) * half
    })
}

/// Discretization tolerance `δ(n)` of [`compact_contraction`] on the
/// [`reference_pair`]: the largest distance, over `ts`, between the path on
/// `n` cells and the path on `2n` cells compressed back to `n`.
pub fn discretization_defect<T: Real>(n: usize, ts: &[f64]) -> Result<f64> {
    let coarse = GridSpace::new(n)?;
    let fine = GridSpace::new(2 * n)?;
    let (ac, bc) = reference_pair::<T>(&coarse);
    let (af, bf) = reference_pair::<T>(&fine);
    let mut worst = 0.0f64;
    for &t in ts {
        check_unit_interval(t)?;
        let hc = compact_unchecked(t, ac.matrix(), bc.matrix(), &coarse);
        let hf = restrict_to_coarse(&compact_unchecked(t, af.matrix(), bf.matrix(), &fine));
        worst = worst.max((&hc - &hf).op_norm().as_f64());
    }
    Ok(worst)
}

/// One row of [`homotopy_sweep`].
#[derive(Clone, Debug, PartialEq)]
pub struct HomotopySample {
    pub t: f64,
    /// Smallest singular value of the compact contraction.
    pub compact_min_singular: f64,
    /// Smallest `|λ|` of the invertible contraction.
    pub invertible_min_abs: f64,
    /// `‖h*h - 1‖` of the log retraction of `u`.
    pub retraction_unitarity: f64,
    /// `‖JhJ - h*‖` of the log retraction of `u`.
    pub retraction_odd_defect: f64,
}

/// Samples both contractions on the [`reference_pair`] and the log retraction
/// of `u` at `points` equispaced `t ∈ [0, 1]`.
pub fn homotopy_sweep(grid: &GridSpace, points: usize, u: &CMat<f64>) -> Result<Vec<HomotopySample>> {
    let points = points.max(2);
    let (a, b) = reference_pair::<f64>(grid);
    let (ia, ib) = (a.map_real(|x| 1.0 / x)?, b.map_real(|x| 1.0 / x)?);
    (0..points)
        .map(|k| {
            let t = k as f64 / (points - 1) as f64;
            let h = compact_contraction(t, a.matrix(), b.matrix(), grid)?;
            let r = invertible_contraction(t, &ia, &ib, grid)?;
            let l = unitary_log_retraction(t, u)?;
            Ok(HomotopySample {
                t,
                compact_min_singular: min_singular(&h)?,
                invertible_min_abs: r.eigenvalues()?.iter().fold(f64::INFINITY, |m, x| m.min(x.abs())),
                retraction_unitarity: l.unitarity_defect(),
                retraction_odd_defect: crate::transforms::odd_unitary_defect(&l),
            })
        })
        .collect()
}
