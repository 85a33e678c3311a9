//! The operator `-d²/dt²` on `[0, 1]` with `ψ(0) = 0` and the Robin
//! condition `x₀ψ(1) - x₁ψ'(1) = 0`, parametrized by `x = [x₀ : x₁] ∈ ℝP¹`.
//!
//! Discretization: unknowns `ψ_1, …, ψ_n` at `t_j = j h`, `h = 1/n`, central
//! second differences, and a ghost node `ψ_{n+1}` eliminated through the
//! central-difference form of the boundary condition. The resulting matrix is
//! symmetric in the coordinates `g_j = ψ_j` (`j < n`), `g_n = ψ_n/√2`
//! (trapezoidal weight at the end node), so it is stored as a real symmetric
//! tridiagonal operator.
//!
//! At the Dirichlet point `x = [1 : 0]` the boundary node is removed from the
//! coupling and given the eigenvalue [`dirichlet_penalty`], far outside any
//! practical window. It stands in for the eigenvalue that escapes to infinity
//! as `x₁ → 0` and keeps the dimension constant around the loop.
//!
//! Eigenvalue oracles (substituting `sinh(μt)` and `sin(μt)` into the boundary
//! condition):
//!
//! * `λ = -μ² < 0`: `x₀ sinh μ = x₁ μ cosh μ`, exists iff `x₁/x₀ ∈ (0, 1)`;
//! * `λ = 0`: iff `x = [1 : 1]`, eigenfunction `ψ = t`;
//! * `λ = μ² > 0`: `x₀ sin μ = x₁ μ cos μ`.

use std::f64::consts::PI;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::linalg::HermOp;
use crate::scalar::Real;

/// Smallest supported grid.
pub const MIN_GRID: usize = 16;
/// Default spectral window half-width for [`spectral_graph`].
pub const DEFAULT_WINDOW: f64 = 50.0;
/// Coordinates smaller than this are treated as exact zeros.
const SNAP: f64 = 1e-12;
const ROOT_TOL: f64 = 1e-12;

/// Point of the real projective line, normalized so `x₀² + x₁² = 1` with
/// `x₀ > 0`, or `x = [0 : 1]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ProjectivePoint {
    x0: f64,
    x1: f64,
}

impl ProjectivePoint {
    pub fn new(x0: f64, x1: f64) -> Result<Self> {
        if !(x0.is_finite() && x1.is_finite()) || (x0 == 0.0 && x1 == 0.0) {
            return Err(Error::Parameter(format!("[{x0} : {x1}] is not a projective point")));
        }
        let r = x0.hypot(x1);
        let (mut a, mut b) = (x0 / r, x1 / r);
        if a.abs() < SNAP {
            a = 0.0;
        }
        if b.abs() < SNAP {
            b = 0.0;
        }
        if a < 0.0 || (a == 0.0 && b < 0.0) {
            a = -a;
            b = -b;
        }
        let r = a.hypot(b);
        Ok(Self { x0: a / r, x1: b / r })
    }

    /// `[cos θ : sin θ]`; period `π`.
    pub fn from_angle(theta: f64) -> Self {
        Self::new(theta.cos(), theta.sin()).expect("unit vector")
    }

    pub fn dirichlet() -> Self {
        Self { x0: 1.0, x1: 0.0 }
    }

    pub fn neumann() -> Self {
        Self { x0: 0.0, x1: 1.0 }
    }

    pub fn x0(&self) -> f64 {
        self.x0
    }

    pub fn x1(&self) -> f64 {
        self.x1
    }

    /// Angle in `[0, π)` with `self = [cos θ : sin θ]`.
    pub fn angle(&self) -> f64 {
        self.x1.atan2(self.x0).rem_euclid(PI)
    }

    /// `x₁/x₀`, infinite at the Neumann point.
    pub fn slope(&self) -> f64 {
        if self.x0 == 0.0 {
            f64::INFINITY
        } else {
            self.x1 / self.x0
        }
    }

    pub fn is_dirichlet(&self) -> bool {
        self.x1 == 0.0
    }

    /// `x = [1 : 1]` up to rounding.
    pub fn is_linear_null(&self) -> bool {
        (self.x0 - self.x1).abs() < SNAP
    }
}

/// Discretized `A_x`.
#[derive(Clone, Debug)]
pub struct RobinOperator<T: Real> {
    pub parameter: ProjectivePoint,
    pub grid_n: usize,
    pub matrix: HermOp<T>,
}

impl<T: Real> RobinOperator<T> {
    pub fn step(&self) -> f64 {
        1.0 / self.grid_n as f64
    }
}

/// Eigenvalue assigned to the decoupled boundary node at the Dirichlet point.
pub fn dirichlet_penalty(n: usize) -> f64 {
    let h = 1.0 / n as f64;
    4e3 / (h * h)
}

/// Central differences with ghost-point elimination of the Robin condition.
pub fn assemble_robin_operator<T: Real>(x: ProjectivePoint, n: usize) -> Result<RobinOperator<T>> {
    if n < MIN_GRID {
        return Err(Error::Parameter(format!("grid must have at least {MIN_GRID} points, got {n}")));
    }
    let h = 1.0 / n as f64;
    let inv = 1.0 / (h * h);
    let mut diag = vec![2.0 * inv; n];
    let mut off = vec![-inv; n - 1];
    if x.is_dirichlet() {
        off[n - 2] = 0.0;
        diag[n - 1] = dirichlet_penalty(n);
    } else {
        // x₁ψ_{n+1} = x₁ψ_{n-1} + 2h x₀ψ_n, scaled into symmetric coordinates
        off[n - 2] = -std::f64::consts::SQRT_2 * inv;
        diag[n - 1] = (2.0 - 2.0 * h * x.x0() / x.x1()) * inv;
    }
    let matrix = HermOp::tridiagonal(
        diag.into_iter().map(T::lit).collect(),
        off.into_iter().map(T::lit).collect(),
    )?;
    Ok(RobinOperator {
        parameter: x,
        grid_n: n,
        matrix,
    })
}

fn bisect(mut lo: f64, mut hi: f64, f: impl Fn(f64) -> f64) -> f64 {
    let mut flo = f(lo);
    while hi - lo > ROOT_TOL * hi.abs().max(1.0) {
        let mid = 0.5 * (lo + hi);
        let fm = f(mid);
        if fm == 0.0 {
            return mid;
        }
        if (fm > 0.0) == (flo > 0.0) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Root `μ > 0` of `tanh μ = r μ` for `r ∈ (0, 1)`.
pub fn negative_branch_root(r: f64) -> Option<f64> {
    if !(r > 0.0 && r < 1.0) {
        return None;
    }
    Some(bisect(0.0, 1.0 / r, |m| {
        if m == 0.0 {
            1.0
        } else {
            m.tanh() - r * m
        }
    }))
}

/// The lowest `count` eigenvalues of the continuous operator, ascending.
pub fn analytic_eigenvalues(x: ProjectivePoint, count: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(count);
    if count == 0 {
        return out;
    }
    let r = x.slope();
    if x.is_linear_null() {
        out.push(0.0);
    } else if let Some(mu) = negative_branch_root(r) {
        out.push(-mu * mu);
    }
    // μ - atan2(x₁μ, x₀) = kπ; monotone beyond its minimum
    let phase = |m: f64| m - (x.x1() * m).atan2(x.x0());
    let mu_floor = if r > 1.0 && r.is_finite() {
        (r - 1.0).sqrt() / r
    } else {
        0.0
    };
    let mut k = if phase(mu_floor) < 0.0 || x.x0() == 0.0 { 0 } else { 1 };
    while out.len() < count {
        let level = k as f64 * PI;
        let lo = mu_floor.max(level - PI / 2.0 - 1.0).max(0.0);
        let hi = level + PI / 2.0 + 1.0;
        let mu = bisect(lo, hi, |m| phase(m) - level);
        out.push(mu * mu);
        k += 1;
    }
    out
}

/// Eigenvalues of `A_{x(θ)}` inside `[-window, window]` with their index in
/// the full ascending spectrum.
#[derive(Clone, Debug, PartialEq)]
pub struct GraphSample {
    pub theta: f64,
    pub branches: Vec<(usize, f64)>,
}

/// Samples the spectral graph at `θ_k = kπ/loop_samples`, `k < loop_samples`.
pub fn spectral_graph(loop_samples: usize, n: usize, window: f64) -> Result<Vec<GraphSample>> {
    if loop_samples < 16 {
        return Err(Error::Parameter(format!("need at least 16 loop samples, got {loop_samples}")));
    }
    if !(window > 0.0) {
        return Err(Error::Parameter(format!("window must be positive, got {window}")));
    }
    (0..loop_samples)
        .into_par_iter()
        .map(|k| {
            let theta = k as f64 * PI / loop_samples as f64;
            let op = assemble_robin_operator::<f64>(ProjectivePoint::from_angle(theta), n)?;
            let branches = op
                .matrix
                .eigenvalues()?
                .iter()
                .enumerate()
                .filter(|(_, l)| l.abs() <= window)
                .map(|(i, &l)| (i, l))
                .collect();
            Ok(GraphSample { theta, branches })
        })
        .collect()
}

/// Brackets `(θ_k, θ_{k+1})` in which the lowest eigenvalue changes sign.
pub fn zero_crossings(graph: &[GraphSample]) -> Vec<(f64, f64)> {
    let lowest = |s: &GraphSample| s.branches.iter().find(|(i, _)| *i == 0).map(|&(_, l)| l);
    graph
        .windows(2)
        .filter_map(|w| match (lowest(&w[0]), lowest(&w[1])) {
            (Some(a), Some(b)) if (a < 0.0) != (b < 0.0) => Some((w[0].theta, w[1].theta)),
            _ => None,
        })
        .collect()
}

/// `(μ, mass)` for the negative eigenvalue `-μ²`: `mass` is the share of the
/// normalized eigenfunction's `L²` mass on `[0, 0.9]`.
pub fn eigenfunction_concentration(x: ProjectivePoint, n: usize) -> Result<(f64, f64)> {
    let op = assemble_robin_operator::<f64>(x, n)?;
    let eig = op.matrix.eigen()?;
    let lambda = eig.values[0];
    if lambda >= 0.0 {
        return Err(Error::Domain { eigenvalue: lambda });
    }
    let h = op.step();
    let mut total = 0.0;
    let mut left = 0.0;
    for j in 0..n {
        let g = eig.vectors[(j, 0)].norm_sqr();
        total += g;
        if (j + 1) as f64 * h <= 0.9 + 1e-12 {
            left += g;
        }
    }
    Ok(((-lambda).sqrt(), left / total))
}

/// One point of the Riesz/gap comparison near the Dirichlet point.
#[derive(Clone, Debug, PartialEq)]
pub struct DichotomyRow {
    pub x1: f64,
    /// Certified lower bound on `‖φ(A_x) - φ(A_[1:0])‖`.
    pub riesz_lower_bound: f64,
    /// `‖p(A_x) - p(A_[1:0])‖`.
    pub gap_dist: f64,
}

/// Compares `A_[1:x1]` with the Dirichlet operator on an `n`-point grid.
///
/// `φ(A_[1:0]) ≥ 0`, so for a unit eigenvector `v` of the lowest eigenvalue
/// `λ` of `A_x`, `⟨v, (φ(A_[1:0]) - φ(A_x)) v⟩ ≥ -φ(λ)`; the bound is
/// `max(0, -φ(λ))`.
pub fn dichotomy_row(x1: f64, n: usize) -> Result<DichotomyRow> {
    let dirichlet = assemble_robin_operator::<f64>(ProjectivePoint::dirichlet(), n)?.matrix;
    let op = assemble_robin_operator::<f64>(ProjectivePoint::new(1.0, x1)?, n)?.matrix;
    let lowest = op.min_eigenvalue()?;
    Ok(DichotomyRow {
        x1,
        riesz_lower_bound: (-lowest / (1.0 + lowest * lowest).sqrt()).max(0.0),
        gap_dist: crate::metrics::gap_dist_hermitian(&op, &dirichlet)?,
    })
}

/// [`dichotomy_row`] at `points` log-spaced `x₁` from `lo` to `hi`.
pub fn dichotomy_sweep(points: usize, lo: f64, hi: f64, n: usize) -> Result<Vec<DichotomyRow>> {
    if points < 2 || !(lo > 0.0) || !(hi > lo) {
        return Err(Error::Parameter(format!(
            "need at least 2 points on 0 < lo < hi, got {points} on [{lo}, {hi}]"
        )));
    }
    let ratio = hi / lo;
    (0..points)
        .into_par_iter()
        .map(|k| {
            let x1 = if k + 1 == points {
                hi
            } else {
                lo * ratio.powf(k as f64 / (points - 1) as f64)
            };
            dichotomy_row(x1, n)
        })
        .collect()
}
