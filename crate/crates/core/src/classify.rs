//! Spectral predicates and decompositions of Hermitian operators.
//!
//! A [`SymmetricTuple`] `τ` is a finite set of reals symmetric about zero.
//! An operator belongs to the covering set `X_τ` when no point of `τ` is an
//! eigenvalue. Essential spectrum has no meaning in finite dimension, so only
//! this point-spectrum condition is checked.

use crate::error::{Error, Result};
use crate::linalg::{re, CMat, HermOp};
use crate::scalar::Real;

/// Eigenvalues closer than this to a window edge make the window ill-posed.
pub const WINDOW_EDGE_TOL: f64 = 1e-9;
/// Default separation between the spectrum and the points of a tuple.
pub const DEFAULT_GAP: f64 = 1e-6;

/// Non-empty, strictly ascending finite set of reals, closed under negation.
#[derive(Clone, Debug, PartialEq)]
pub struct SymmetricTuple<T> {
    points: Vec<T>,
}

impl<T: Real> SymmetricTuple<T> {
    /// Sorts `points` and checks that they are distinct and symmetric.
    pub fn new(mut points: Vec<T>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::Parameter("symmetric tuple must be non-empty".into()));
        }
        if points.iter().any(|x| !x.is_finite()) {
            return Err(Error::Parameter("symmetric tuple points must be finite".into()));
        }
        points.sort_by(|a, b| a.partial_cmp(b).expect("finite points"));
        if points.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::Parameter("symmetric tuple points must be distinct".into()));
        }
        let n = points.len();
        for k in 0..n {
            if points[k] != -points[n - 1 - k] {
                return Err(Error::Parameter(format!(
                    "symmetric tuple is not symmetric: {} has no partner",
                    points[k]
                )));
            }
        }
        Ok(Self { points })
    }

    /// `{±x : x ∈ magnitudes}`; zero is kept once.
    pub fn from_magnitudes(magnitudes: &[T]) -> Result<Self> {
        let mut pts = Vec::with_capacity(2 * magnitudes.len());
        for &m in magnitudes {
            let m = m.abs();
            pts.push(m);
            if m != T::zero() {
                pts.push(-m);
            }
        }
        pts.sort_by(|a, b| a.partial_cmp(b).expect("finite points"));
        pts.dedup();
        Self::new(pts)
    }

    pub fn points(&self) -> &[T] {
        &self.points
    }

    pub fn union(&self, other: &Self) -> Self {
        let mut pts: Vec<T> = self.points.iter().chain(&other.points).copied().collect();
        pts.sort_by(|a, b| a.partial_cmp(b).expect("finite points"));
        pts.dedup();
        Self { points: pts }
    }

    /// Convex hull `[min τ, max τ] = [-max τ, max τ]`.
    pub fn hull(&self) -> (T, T) {
        (self.points[0], self.points[self.points.len() - 1])
    }
}

/// Orthogonal splitting of an operator along the spectral subspace `V` of a
/// tuple hull.
#[derive(Clone, Debug)]
pub struct SplitOperator<T: Real> {
    /// Orthonormal columns spanning `V`.
    pub window_basis: CMat<T>,
    /// Orthonormal columns spanning `V⊥`.
    pub complement_basis: CMat<T>,
    /// Restriction to `V`.
    pub finite_part: HermOp<T>,
    /// Restriction to `V⊥`.
    pub infinite_part: HermOp<T>,
}

impl<T: Real> SplitOperator<T> {
    /// `W diag(A', A'') W*` with `W = [window_basis | complement_basis]`.
    pub fn reassemble(&self) -> CMat<T> {
        let v = &self.window_basis;
        let q = &self.complement_basis;
        let mut out = v.matmul(self.finite_part.matrix()).matmul(&v.adjoint());
        if q.cols() > 0 {
            out = &out + &q.matmul(self.infinite_part.matrix()).matmul(&q.adjoint());
        }
        out
    }
}

fn collision<T: Real>(values: &[T], edges: &[T]) -> Result<()> {
    let tol = T::lit(WINDOW_EDGE_TOL);
    for &x in values {
        for &e in edges {
            if (x - e).abs() < tol {
                return Err(Error::BoundaryCollision {
                    eigenvalue: x.as_f64(),
                    edge: e.as_f64(),
                    tolerance: WINDOW_EDGE_TOL,
                });
            }
        }
    }
    Ok(())
}

/// Indices (into the ascending spectrum) of eigenvalues inside `[lo, hi]`
/// and outside it.
fn partition<T: Real>(values: &[T], lo: T, hi: T) -> (Vec<usize>, Vec<usize>) {
    (0..values.len()).partition(|&k| values[k] >= lo && values[k] <= hi)
}

/// Spectral projection `1_{[lo, hi]}(A)`.
pub fn window_projection<T: Real>(a: &HermOp<T>, lo: T, hi: T) -> Result<CMat<T>> {
    if lo > hi {
        return Err(Error::Parameter(format!("empty window [{lo}, {hi}]")));
    }
    let eig = a.eigen()?;
    collision(&eig.values, &[lo, hi])?;
    let (inside, _) = partition(&eig.values, lo, hi);
    let v = eig.vectors.columns(&inside);
    Ok(v.matmul(&v.adjoint()))
}

/// `true` iff every point of `tau` is at distance at least `gap` from the spectrum.
pub fn covering_membership<T: Real>(a: &HermOp<T>, tau: &SymmetricTuple<T>, gap: T) -> Result<bool> {
    Ok(first_obstruction(a.eigenvalues()?, tau, gap).is_none())
}

fn first_obstruction<T: Real>(values: &[T], tau: &SymmetricTuple<T>, gap: T) -> Option<(T, T)> {
    for &p in tau.points() {
        for &x in values {
            if (x - p).abs() < gap {
                return Some((x, p));
            }
        }
    }
    None
}

/// Splits `A` into its parts on the spectral subspace of `hull(tau)` and its
/// complement. The eigenvectors are used as bases, so both parts come out
/// diagonal up to rounding.
pub fn split_finite_infinite<T: Real>(a: &HermOp<T>, tau: &SymmetricTuple<T>) -> Result<SplitOperator<T>> {
    let eig = a.eigen()?;
    let gap = T::lit(WINDOW_EDGE_TOL);
    if let Some((x, p)) = first_obstruction(&eig.values, tau, gap) {
        return Err(Error::NotInCovering {
            eigenvalue: x.as_f64(),
            point: p.as_f64(),
            gap: WINDOW_EDGE_TOL,
        });
    }
    let (lo, hi) = tau.hull();
    let (inside, outside) = partition(&eig.values, lo, hi);
    let v = eig.vectors.columns(&inside);
    let q = eig.vectors.columns(&outside);
    let m = a.matrix();
    let restrict = |basis: &CMat<T>| HermOp::from_dense_unchecked(basis.adjoint().matmul(m).matmul(basis).hermitian_part());
    Ok(SplitOperator {
        finite_part: restrict(&v),
        infinite_part: restrict(&q),
        window_basis: v,
        complement_basis: q,
    })
}

/// Basis of the spectral subspace of `A` outside `[-c, c]`, eigenvalues ascending.
pub fn complement_basis<T: Real>(a: &HermOp<T>, c: T) -> Result<CMat<T>> {
    let eig = a.eigen()?;
    collision(&eig.values, &[-c, c])?;
    let (_, outside) = partition(&eig.values, -c, c);
    Ok(eig.vectors.columns(&outside))
}

/// `A` compressed to the complement of its `[-c, c]` spectral subspace, in
/// the basis of [`complement_basis`]. Feeding this back to
/// [`density_surgery`] leaves `A` unchanged.
pub fn complement_restriction<T: Real>(a: &HermOp<T>, c: T) -> Result<HermOp<T>> {
    let q = complement_basis(a, c)?;
    Ok(HermOp::from_dense_unchecked(
        q.adjoint().matmul(a.matrix()).matmul(&q).hermitian_part(),
    ))
}

/// Replaces `A` on the complement of its `[-c, c]` spectral subspace by `B`:
/// `A' = A p + Q B Q*` with `p = 1_{[-c,c]}(A)` and `Q` from [`complement_basis`].
///
/// `B` must have no spectrum in `[-c, c]`. Then `‖κ(A') - κ(A)‖ < ε` as soon
/// as `|κ(c) - 1| < ε/2`, see [`surgery_cutoff`].
pub fn density_surgery<T: Real>(a: &HermOp<T>, c: T, b: &HermOp<T>) -> Result<HermOp<T>> {
    if !(c > T::zero()) {
        return Err(Error::Parameter(format!("surgery cutoff must be positive, got {c}")));
    }
    let eig = a.eigen()?;
    collision(&eig.values, &[-c, c])?;
    let (inside, outside) = partition(&eig.values, -c, c);
    if b.dim() != outside.len() {
        return Err(Error::DimensionMismatch {
            expected: format!("replacement of dimension {}", outside.len()),
            found: format!("{}", b.dim()),
        });
    }
    if let Some(&x) = b.eigenvalues()?.iter().find(|x| x.abs() <= c) {
        return Err(Error::SurgeryViolation {
            eigenvalue: x.as_f64(),
            c: c.as_f64(),
        });
    }
    let v = eig.vectors.columns(&inside);
    let lam: Vec<_> = inside.iter().map(|&k| re(eig.values[k])).collect();
    let mut out = v.scale_columns(&lam).matmul(&v.adjoint());
    if !outside.is_empty() {
        let q = eig.vectors.columns(&outside);
        out = &out + &q.matmul(b.matrix()).matmul(&q.adjoint());
    }
    Ok(HermOp::from_dense_unchecked(out.hermitian_part()))
}

/// Smallest cutoff `c` with `|κ(c) - 1| ≤ eps / 2`, where `|κ(c) - 1| = 2/√(1 + c²)`.
pub fn surgery_cutoff(eps: f64) -> f64 {
    let r = 4.0 / eps;
    (r * r - 1.0).max(0.0).sqrt()
}

/// Number of eigenvalues below `threshold`.
pub fn negative_count<T: Real>(a: &HermOp<T>, threshold: T) -> Result<usize> {
    Ok(a.eigenvalues()?.iter().filter(|&&x| x < threshold).count())
}

/// Worst case of the surgery bound over random instances at one `ε`.
#[derive(Clone, Debug, PartialEq, serde::Serialize)]
pub struct SurgeryStats {
    pub eps: f64,
    pub cutoff: f64,
    pub trials: usize,
    /// Largest `‖κ(A') - κ(A)‖` seen.
    pub max_cayley_dist: f64,
    /// Trials with `‖κ(A') - κ(A)‖ ≥ ε`.
    pub violations: usize,
}

/// Random `A` of dimension `n` with spectrum spread over `[-3c, 3c]`, kept at
/// least `c/100` away from `±c`, and a random replacement with spectrum in
/// `±[c(1 + 1/100), 3c]` for its part outside `[-c, c]`.
fn surgery_instance(rng: &mut crate::random::SeededRng, n: usize, c: f64) -> Result<(HermOp<f64>, HermOp<f64>)> {
    use crate::random::{random_unitary, uniform_in};
    let margin = c / 100.0;
    let values: Vec<f64> = (0..n)
        .map(|_| loop {
            let x = uniform_in(rng, -3.0 * c, 3.0 * c);
            if (x.abs() - c).abs() > margin {
                break x;
            }
        })
        .collect();
    let u = random_unitary::<f64>(rng, n);
    let d: Vec<_> = values.iter().map(|&x| re(x)).collect();
    let a = HermOp::new(u.scale_columns(&d).matmul(&u.adjoint()).hermitian_part())?;
    let outside = values.iter().filter(|x| x.abs() > c).count();
    let replacement: Vec<_> = (0..outside)
        .map(|_| {
            let m = uniform_in(rng, c + margin, 3.0 * c);
            if uniform_in(rng, 0.0, 1.0) < 0.5 {
                re(-m)
            } else {
                re(m)
            }
        })
        .collect();
    let w = random_unitary::<f64>(rng, outside.max(1));
    let b = if outside == 0 {
        HermOp::from_real_diag(&[])
    } else {
        HermOp::new(w.scale_columns(&replacement).matmul(&w.adjoint()).hermitian_part())?
    };
    Ok((a, b))
}

/// Checks `‖κ(A') - κ(A)‖ < ε` for `A' = density_surgery(A, c, B)` with
/// `c = surgery_cutoff(ε)` over `trials` random instances of dimension `n`.
pub fn surgery_trials(seed: u64, eps: f64, trials: usize, n: usize) -> Result<SurgeryStats> {
    if !(eps > 0.0 && eps < 4.0) {
        return Err(Error::Parameter(format!("surgery tolerance must lie in (0, 4), got {eps}")));
    }
    let c = surgery_cutoff(eps);
    let mut rng = crate::random::seeded(seed);
    let mut worst = 0.0f64;
    let mut violations = 0;
    for _ in 0..trials {
        let (a, b) = surgery_instance(&mut rng, n, c)?;
        let after = density_surgery(&a, c, &b)?;
        let d = (&crate::transforms::cayley(&after)? - &crate::transforms::cayley(&a)?).op_norm();
        worst = worst.max(d);
        if d >= eps {
            violations += 1;
        }
    }
    Ok(SurgeryStats {
        eps,
        cutoff: c,
        trials,
        max_cayley_dist: worst,
        violations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random::{random_hermitian, seeded};
    use crate::transforms::cayley;

    fn diag(x: &[f64]) -> HermOp<f64> {
        HermOp::from_real_diag(x)
    }

    #[test]
    fn tuple_validation() {
        assert!(SymmetricTuple::new(vec![0.5, -0.5]).is_ok());
        assert!(SymmetricTuple::new(vec![0.0]).is_ok());
        assert!(SymmetricTuple::<f64>::new(vec![]).is_err());
        assert!(SymmetricTuple::new(vec![-1.0, 0.5]).is_err());
        assert!(SymmetricTuple::new(vec![1.0, 1.0, -1.0]).is_err());
        let t = SymmetricTuple::from_magnitudes(&[2.0, 0.0, 1.0]).unwrap();
        assert_eq!(t.points(), &[-2.0, -1.0, 0.0, 1.0, 2.0]);
        assert_eq!(t.hull(), (-2.0, 2.0));
    }

    #[test]
    fn window_projection_examples() {
        let p = window_projection(&diag(&[-2.0, 0.0, 3.0]), -1.0, 1.0).unwrap();
        assert!((&p - &CMat::from_real_diag(&[0.0, 1.0, 0.0])).max_abs() < 1e-15);
        let mut rng = seeded(1);
        let a = random_hermitian::<f64>(&mut rng, 7, 1.0);
        let all = window_projection(&a, -100.0, 100.0).unwrap();
        assert!((&all - &CMat::identity(7)).op_norm() < 1e-12);
        let err = window_projection(&diag(&[1.0, 3.0]), -1.0, 1.0).unwrap_err();
        assert!(matches!(err, Error::BoundaryCollision { eigenvalue, .. } if eigenvalue == 1.0));
    }

    #[test]
    fn window_projection_commutes() {
        let mut rng = seeded(2);
        for _ in 0..10 {
            let a = random_hermitian::<f64>(&mut rng, 9, 2.0);
            let Ok(p) = window_projection(&a, -0.7, 1.3) else { continue };
            let comm = &p.matmul(a.matrix()) - &a.matrix().matmul(&p);
            assert!(comm.op_norm() < 1e-9);
        }
    }

    #[test]
    fn membership_examples() {
        let tau = SymmetricTuple::new(vec![-0.5, 0.5]).unwrap();
        assert!(covering_membership(&diag(&[1.0, -1.0]), &tau, 0.1).unwrap());
        assert!(!covering_membership(&diag(&[0.5]), &tau, 0.1).unwrap());
    }

    #[test]
    fn split_examples() {
        let tau = SymmetricTuple::new(vec![-1.0, 1.0]).unwrap();
        let s = split_finite_infinite(&diag(&[-3.0, 0.2, 5.0]), &tau).unwrap();
        assert_eq!(s.finite_part.dim(), 1);
        assert!((s.finite_part.matrix()[(0, 0)].re - 0.2).abs() < 1e-15);
        let far = SymmetricTuple::new(vec![-0.1, 0.1]).unwrap();
        let s = split_finite_infinite(&diag(&[-3.0, 5.0]), &far).unwrap();
        assert_eq!(s.finite_part.dim(), 0);
        assert_eq!(s.infinite_part.dim(), 2);
        assert!(matches!(
            split_finite_infinite(&diag(&[1.0]), &tau),
            Err(Error::NotInCovering { .. })
        ));
        let mut rng = seeded(3);
        let a = random_hermitian::<f64>(&mut rng, 10, 2.0);
        let s = split_finite_infinite(&a, &SymmetricTuple::new(vec![-1.234, 1.234]).unwrap()).unwrap();
        assert!((&s.reassemble() - a.matrix()).op_norm() < 1e-9);
        for &x in s.finite_part.eigenvalues().unwrap() {
            assert!(x.abs() < 1.234 + 1e-9);
        }
        for &x in s.infinite_part.eigenvalues().unwrap() {
            assert!(x.abs() > 1.234 - 1e-9);
        }
    }

    #[test]
    fn surgery_bound_holds() {
        for eps in [0.5, 0.1, 0.02] {
            let st = surgery_trials(9, eps, 20, 6).unwrap();
            assert_eq!(st.violations, 0, "{st:?}");
            assert!(st.max_cayley_dist < eps);
            let k = crate::transforms::cayley_scalar(st.cutoff);
            assert!((k - num_complex::Complex::new(1.0, 0.0)).norm() <= eps / 2.0 + 1e-12);
        }
        assert!(surgery_trials(0, 0.0, 1, 2).is_err());
    }

    #[test]
    fn surgery_examples() {
        let a = diag(&[-5.0, 1.0, 7.0]);
        let b = diag(&[6.0, 6.0]);
        let out = density_surgery(&a, 2.0, &b).unwrap();
        assert!((out.matrix() - &CMat::from_real_diag(&[6.0, 1.0, 6.0])).max_abs() < 1e-15);
        let d = (&cayley(&out).unwrap() - &cayley(&a).unwrap()).op_norm();
        assert!((d - 0.709299).abs() < 1e-5, "{d}");
        let same = density_surgery(&a, 2.0, &complement_restriction(&a, 2.0).unwrap()).unwrap();
        assert_eq!(same.matrix(), a.matrix());
        assert!(matches!(
            density_surgery(&a, 2.0, &diag(&[6.0, 1.0])),
            Err(Error::SurgeryViolation { eigenvalue, .. }) if eigenvalue == 1.0
        ));
        assert!(matches!(
            density_surgery(&a, 2.0, &diag(&[6.0])),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn cutoff_meets_half_epsilon() {
        for eps in [0.5, 0.1, 0.02] {
            let c = surgery_cutoff(eps) * 1.0001;
            assert!((crate::transforms::cayley_scalar(c) - re(1.0)).norm() < eps / 2.0);
        }
    }

    #[test]
    fn negative_count_examples() {
        assert_eq!(negative_count(&diag(&[1.0, 2.0, 3.0]), 0.0).unwrap(), 0);
        assert_eq!(negative_count(&diag(&[-1.0, 2.0]), 0.0).unwrap(), 1);
    }
}
