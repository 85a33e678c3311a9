//! Maps between operators, the unit ball, graph projections and unitaries.
//!
//! * bounded transform `φ(A) = A (1 + A*A)^{-1/2}` and its inverse on the open ball,
//! * graph projection `p(A)` on `H ⊕ H` and its ball counterpart `p̃(a)`,
//!   with `p = p̃ ∘ φ`,
//! * Cayley transform `κ(A) = (A - i)(A + i)^{-1}` and `κ̃(a) = (a - i√(1 - a²))²`,
//!   with `κ = κ̃ ∘ φ`,
//! * the unitary `ψ_v(p)` attached to a Lagrangian projection,
//! * the odd embedding `A ↦ [[0, A*], [A, 0]]` and `ι(p) = v(1 - 2p)v`.
//!
//! In finite dimension the image of `φ` is exactly the open unit ball, so
//! [`inverse_bounded_transform`] requires `‖a‖ < 1` strictly.
//!
//! Square roots of `1 - a*a` are taken through the singular values of `a`;
//! values of `1 - s²` that are negative by rounding are clamped to zero.

use num_complex::Complex;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::linalg::{imag_unit, re, CMat, HermOp};
use crate::scalar::Real;

/// Idempotency and self-adjointness tolerance for [`GraphProjection::new`].
pub const PROJECTION_TOL: f64 = 1e-10;
/// Anticommutator tolerance for the Lagrangian condition.
pub const LAGRANGIAN_TOL: f64 = 1e-8;
/// `‖a‖` may exceed one by this much before a ball map refuses it.
pub const BALL_SLACK: f64 = 1e-10;
/// [`inverse_bounded_transform`] refuses `‖a‖ ≥ 1 - INVERSE_MARGIN`.
pub const INVERSE_MARGIN: f64 = 1e-8;

/// Orthogonal projection on the doubled space `H ⊕ H`.
#[derive(Clone, Debug)]
pub struct GraphProjection<T> {
    matrix: CMat<T>,
}

impl<T: Real> GraphProjection<T> {
    /// Validates `p² = p = p*` to [`PROJECTION_TOL`] in operator norm.
    pub fn new(matrix: CMat<T>) -> Result<Self> {
        if !matrix.is_square() || !matrix.rows().is_multiple_of(2) {
            return Err(Error::DimensionMismatch {
                expected: "square matrix of even dimension".into(),
                found: format!("{}x{}", matrix.rows(), matrix.cols()),
            });
        }
        let (idem, adj) = projection_defects(&matrix);
        let tol = T::tol(PROJECTION_TOL);
        if idem > tol || adj > tol {
            return Err(Error::NotProjection {
                idempotency: idem.as_f64(),
                adjointness: adj.as_f64(),
            });
        }
        Ok(Self {
            matrix: matrix.hermitian_part(),
        })
    }

    /// For matrices that are projections by construction.
    pub(crate) fn from_parts(matrix: CMat<T>) -> Self {
        Self {
            matrix: matrix.hermitian_part(),
        }
    }

    /// `p₀`, the projection onto `H ⊕ 0` (graph of the zero operator).
    pub fn horizontal(n: usize) -> Self {
        let one = CMat::identity(n);
        let zero = CMat::zeros(n, n);
        Self::from_parts(CMat::block2(&one, &zero, &zero, &zero))
    }

    /// `p_∞`, the projection onto `0 ⊕ H`.
    pub fn vertical(n: usize) -> Self {
        let one = CMat::identity(n);
        let zero = CMat::zeros(n, n);
        Self::from_parts(CMat::block2(&zero, &zero, &zero, &one))
    }

    pub fn matrix(&self) -> &CMat<T> {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    /// Dimension of `H`.
    pub fn half_dim(&self) -> usize {
        self.matrix.rows() / 2
    }

    /// `(‖p² - p‖, ‖p - p*‖)`.
    pub fn defects(&self) -> (T, T) {
        projection_defects(&self.matrix)
    }

    /// `2p - 1`.
    pub fn reflection(&self) -> CMat<T> {
        &self.matrix.scale_real(T::lit(2.0)) - &CMat::identity(self.dim())
    }

    /// `‖I(2p - 1) + (2p - 1)I‖`.
    pub fn lagrangian_defect(&self) -> T {
        let i = Symplectics::<T>::new(self.half_dim()).i;
        let r = self.reflection();
        (&i.matmul(&r) + &r.matmul(&i)).op_norm()
    }

    pub fn distance(&self, other: &Self) -> T {
        (&self.matrix - &other.matrix).op_norm()
    }
}

fn projection_defects<T: Real>(m: &CMat<T>) -> (T, T) {
    let idem = (&m.matmul(m) - m).op_norm();
    let adj = (m - &m.adjoint()).op_norm();
    (idem, adj)
}

/// The fixed symmetries and conjugating unitaries on `H ⊕ H`, `dim H = n`.
#[derive(Clone, Debug)]
pub struct Symplectics<T> {
    pub n: usize,
    /// `[[0, -i], [i, 0]]`, the symplectic symmetry.
    pub i: CMat<T>,
    /// `[[1, 0], [0, -1]]`, the grading.
    pub j: CMat<T>,
    /// `(1/√2) [[-1, i], [1, i]]`, satisfies `J = v I v*`.
    pub v_lag: CMat<T>,
    /// `[[1, 0], [0, i]]`, satisfies `v² = J`.
    pub v_odd: CMat<T>,
}

impl<T: Real> Symplectics<T> {
    pub fn new(n: usize) -> Self {
        let blocks = |a: Complex<T>, b: Complex<T>, c: Complex<T>, d: Complex<T>| {
            CMat::block2(
                &CMat::scalar(n, a),
                &CMat::scalar(n, b),
                &CMat::scalar(n, c),
                &CMat::scalar(n, d),
            )
        };
        let (o, z, i) = (Complex::<T>::one(), Complex::<T>::zero(), imag_unit::<T>());
        let h = T::FRAC_1_SQRT_2();
        Self {
            n,
            i: blocks(z, -i, i, z),
            j: blocks(o, z, z, -o),
            v_lag: blocks(re(-h), i * h, re(h), i * h),
            v_odd: blocks(o, z, z, i),
        }
    }
}

/// `L diag(d) R*`.
fn sandwich<T: Real>(l: &CMat<T>, d: &[T], r: &CMat<T>) -> CMat<T> {
    let dz: Vec<Complex<T>> = d.iter().map(|&x| re(x)).collect();
    l.scale_columns(&dz).matmul(&r.adjoint())
}

fn require_square<T: Real>(a: &CMat<T>) -> Result<()> {
    if a.is_square() {
        Ok(())
    } else {
        Err(Error::DimensionMismatch {
            expected: "square matrix".into(),
            found: format!("{}x{}", a.rows(), a.cols()),
        })
    }
}

/// `s / (1 + s²)` without overflow for large `s`.
fn graph_offdiag<T: Real>(s: T) -> T {
    if s.abs() <= T::one() {
        s / (T::one() + s * s)
    } else {
        T::one() / (s + T::one() / s)
    }
}

fn graph_diag<T: Real>(s: T) -> (T, T) {
    // (1/(1+s²), s²/(1+s²))
    if s.abs() <= T::one() {
        let d = T::one() + s * s;
        (T::one() / d, s * s / d)
    } else {
        let r = T::one() / (s * s);
        (r / (T::one() + r), T::one() / (T::one() + r))
    }
}

/// Singular values within a few ulps of one are taken as exactly one:
/// `√(1 - s²)` would otherwise turn `1e-16` of rounding into `1e-8`.
fn snap_unit<T: Real>(s: T) -> T {
    if s >= T::one() - T::epsilon() * T::lit(64.0) {
        T::one()
    } else {
        s
    }
}

/// `√(1 - s²)` with rounding-negative arguments clamped to zero.
pub fn unit_complement<T: Real>(s: T) -> T {
    (T::one() - s * s).max(T::zero()).sqrt()
}

/// `φ(A) = A (1 + A*A)^{-1/2}`.
pub fn bounded_transform<T: Real>(a: &CMat<T>) -> Result<CMat<T>> {
    require_square(a)?;
    if a.rows() == 0 {
        return Ok(a.clone());
    }
    let (w, s, v) = T::svd(a)?;
    let f: Vec<T> = s.iter().map(|&x| x / (T::one() + x * x).sqrt()).collect();
    Ok(sandwich(&w, &f, &v))
}

/// `φ` on a Hermitian operator, computed through its eigenvalues.
pub fn bounded_transform_hermitian<T: Real>(a: &HermOp<T>) -> Result<HermOp<T>> {
    a.map_real(|x| x / (T::one() + x * x).sqrt())
}

/// `φ⁻¹(a) = a (1 - a*a)^{-1/2}` for `‖a‖ < 1 - INVERSE_MARGIN`.
pub fn inverse_bounded_transform<T: Real>(a: &CMat<T>) -> Result<CMat<T>> {
    require_square(a)?;
    if a.rows() == 0 {
        return Ok(a.clone());
    }
    let (w, s, v) = T::svd(a)?;
    let limit = T::one() - T::lit(INVERSE_MARGIN);
    let top = s.first().copied().unwrap_or_else(T::zero);
    if top >= limit {
        return Err(Error::OutOfBall {
            norm: top.as_f64(),
            limit: limit.as_f64(),
        });
    }
    let f: Vec<T> = s.iter().map(|&x| x / (T::one() - x * x).sqrt()).collect();
    Ok(sandwich(&w, &f, &v))
}

/// Orthogonal projection onto the graph of `A`:
/// `[[(1+A*A)⁻¹, (1+A*A)⁻¹A*], [A(1+A*A)⁻¹, 1-(1+AA*)⁻¹]]`.
pub fn graph_projection<T: Real>(a: &CMat<T>) -> Result<GraphProjection<T>> {
    require_square(a)?;
    let n = a.rows();
    if n == 0 {
        return Ok(GraphProjection::from_parts(CMat::zeros(0, 0)));
    }
    let (w, s, v) = T::svd(a)?;
    let (d11, d22): (Vec<T>, Vec<T>) = s.iter().map(|&x| graph_diag(x)).unzip();
    let off: Vec<T> = s.iter().map(|&x| graph_offdiag(x)).collect();
    let p11 = sandwich(&v, &d11, &v);
    let p21 = sandwich(&w, &off, &v);
    let p12 = p21.adjoint();
    let p22 = sandwich(&w, &d22, &w);
    Ok(GraphProjection::from_parts(CMat::block2(&p11, &p12, &p21, &p22)))
}

/// [`graph_projection`] for a Hermitian operator through its eigendecomposition;
/// accurate for operators with very large eigenvalues.
pub fn graph_projection_hermitian<T: Real>(a: &HermOp<T>) -> Result<GraphProjection<T>> {
    let eig = a.eigen()?;
    let u = &eig.vectors;
    let (d11, d22): (Vec<T>, Vec<T>) = eig.values.iter().map(|&x| graph_diag(x)).unzip();
    let off: Vec<T> = eig.values.iter().map(|&x| graph_offdiag(x)).collect();
    let p11 = sandwich(u, &d11, u);
    let p21 = sandwich(u, &off, u);
    let p12 = p21.adjoint();
    let p22 = sandwich(u, &d22, u);
    Ok(GraphProjection::from_parts(CMat::block2(&p11, &p12, &p21, &p22)))
}

fn check_ball<T: Real>(top: T) -> Result<()> {
    let limit = T::one() + T::lit(BALL_SLACK);
    if top > limit {
        Err(Error::OutOfBall {
            norm: top.as_f64(),
            limit: limit.as_f64(),
        })
    } else {
        Ok(())
    }
}

/// `p̃(a) = [[1 - a*a, √(1-a*a) a*], [a √(1-a*a), aa*]]` for `‖a‖ ≤ 1`.
pub fn ball_projection<T: Real>(a: &CMat<T>) -> Result<GraphProjection<T>> {
    require_square(a)?;
    if a.rows() == 0 {
        return Ok(GraphProjection::from_parts(CMat::zeros(0, 0)));
    }
    let (w, s, v) = T::svd(a)?;
    check_ball(s.first().copied().unwrap_or_else(T::zero))?;
    let s: Vec<T> = s.into_iter().map(snap_unit).collect();
    let d11: Vec<T> = s.iter().map(|&x| T::one() - x * x).collect();
    let off: Vec<T> = s.iter().map(|&x| x * unit_complement(x)).collect();
    let d22: Vec<T> = s.iter().map(|&x| x * x).collect();
    let p11 = sandwich(&v, &d11, &v);
    let p21 = sandwich(&w, &off, &v);
    let p12 = p21.adjoint();
    let p22 = sandwich(&w, &d22, &w);
    Ok(GraphProjection::from_parts(CMat::block2(&p11, &p12, &p21, &p22)))
}

/// Scalar Cayley transform `(λ - i)/(λ + i)`.
pub fn cayley_scalar<T: Real>(x: T) -> Complex<T> {
    let i = imag_unit::<T>();
    (re(x) - i) / (re(x) + i)
}

/// Scalar `κ̃(s) = (s - i√(1 - s²))²` on `[-1, 1]`.
pub fn cayley_ball_scalar<T: Real>(s: T) -> Complex<T> {
    let s = s.max(-T::one()).min(T::one());
    let z = Complex::new(s, -unit_complement(s));
    z * z
}

/// `κ(A) = (A - i)(A + i)⁻¹`.
pub fn cayley<T: Real>(a: &HermOp<T>) -> Result<CMat<T>> {
    a.func_calc(cayley_scalar)
}

/// `κ̃(a)` for a Hermitian contraction.
pub fn cayley_ball<T: Real>(a: &HermOp<T>) -> Result<CMat<T>> {
    check_ball(a.norm()?)?;
    a.func_calc(cayley_ball_scalar)
}

/// `ψ_v(p)`: conjugating by `v_lag` turns a Lagrangian reflection `2p - 1` into
/// `[[0, u*], [u, 0]]`; returns `u`.
pub fn lagrangian_to_unitary<T: Real>(p: &GraphProjection<T>) -> Result<CMat<T>> {
    let n = p.half_dim();
    let sym = Symplectics::<T>::new(n);
    let r = p.reflection();
    let anticommutator = (&sym.i.matmul(&r) + &r.matmul(&sym.i)).op_norm();
    if anticommutator > T::lit(LAGRANGIAN_TOL) {
        return Err(Error::NotLagrangian {
            anticommutator: anticommutator.as_f64(),
        });
    }
    let q = sym.v_lag.matmul(&r).matmul(&sym.v_lag.adjoint());
    Ok(q.block(n, 0, n, n))
}

/// `Â = [[0, A*], [A, 0]]`, odd with respect to the grading `J`.
pub fn odd_embedding<T: Real>(a: &CMat<T>) -> Result<HermOp<T>> {
    require_square(a)?;
    let n = a.rows();
    let z = CMat::zeros(n, n);
    Ok(HermOp::from_dense_unchecked(CMat::block2(&z, &a.adjoint(), a, &z)))
}

/// `ι(p) = v(1 - 2p)v` with `v = v_odd`; lands in `{u : JuJ = u*}`.
pub fn proj_to_unitary<T: Real>(p: &GraphProjection<T>) -> Result<CMat<T>> {
    let (idem, adj) = p.defects();
    let tol = T::tol(PROJECTION_TOL);
    if idem > tol || adj > tol {
        return Err(Error::NotProjection {
            idempotency: idem.as_f64(),
            adjointness: adj.as_f64(),
        });
    }
    let v = Symplectics::<T>::new(p.half_dim()).v_odd;
    let r = (-&p.reflection()).matmul(&v);
    Ok(v.matmul(&r))
}

/// `‖JuJ - u*‖`, zero exactly on the odd unitaries.
pub fn odd_unitary_defect<T: Real>(u: &CMat<T>) -> T {
    let j = Symplectics::<T>::new(u.rows() / 2).j;
    (&j.matmul(u).matmul(&j) - &u.adjoint()).op_norm()
}

/// Checks the factorization
/// `p̃(a) - p₀ = diag(-a*, a) · [[a, -√(1-aa*)], [√(1-a*a), a*]]`
/// and returns its deviation in operator norm. The second factor must be
/// unitary to `1e-10`.
pub fn fredholm_factor_check<T: Real>(a: &CMat<T>) -> Result<T> {
    require_square(a)?;
    let n = a.rows();
    let (w, s, v) = T::svd(a)?;
    check_ball(s.first().copied().unwrap_or_else(T::zero))?;
    let c: Vec<T> = s.iter().map(|&x| unit_complement(snap_unit(x))).collect();
    let root_star = sandwich(&v, &c, &v); // √(1 - a*a)
    let root = sandwich(&w, &c, &w); // √(1 - aa*)
    let factor = CMat::block2(a, &-&root, &root_star, &a.adjoint());
    let defect = factor.unitarity_defect();
    if defect > T::tol(1e-10) {
        return Err(Error::NotUnitary {
            defect: defect.as_f64(),
        });
    }
    let z = CMat::zeros(n, n);
    let diag = CMat::block2(&-&a.adjoint(), &z, &z, a);
    let lhs = ball_projection(a)?.matrix() - GraphProjection::horizontal(n).matrix();
    Ok((&lhs - &diag.matmul(&factor)).op_norm())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random::{random_contraction, random_hermitian_contraction, random_matrix, random_unitary, seeded};

    fn scalar(x: f64) -> CMat<f64> {
        CMat::from_real_diag(&[x])
    }

    fn close(a: &CMat<f64>, b: &CMat<f64>, tol: f64) {
        let d = (a - b).op_norm();
        assert!(d < tol, "distance {d:e} >= {tol:e}\n{a:?}\n{b:?}");
    }

    #[test]
    fn bounded_transform_examples() {
        close(&bounded_transform(&CMat::zeros(3, 3)).unwrap(), &CMat::zeros(3, 3), 1e-15);
        close(&bounded_transform(&scalar(1.0)).unwrap(), &scalar(0.5f64.sqrt()), 1e-14);
        let a = CMat::from_real_rows(&[&[0.0, 2.0], &[2.0, 0.0]]);
        let k = 2.0 / 5f64.sqrt();
        close(
            &bounded_transform(&a).unwrap(),
            &CMat::from_real_rows(&[&[0.0, k], &[k, 0.0]]),
            1e-14,
        );
    }

    #[test]
    fn inverse_bounded_transform_examples() {
        close(&inverse_bounded_transform(&CMat::zeros(2, 2)).unwrap(), &CMat::zeros(2, 2), 1e-15);
        close(&inverse_bounded_transform(&scalar(0.5f64.sqrt())).unwrap(), &scalar(1.0), 1e-12);
        assert!(matches!(
            inverse_bounded_transform(&scalar(1.0)),
            Err(Error::OutOfBall { .. })
        ));
        let mut rng = seeded(21);
        let a = random_hermitian_contraction::<f64>(&mut rng, 6, 0.9);
        let back = bounded_transform(&inverse_bounded_transform(a.matrix()).unwrap()).unwrap();
        close(&back, a.matrix(), 1e-8);
    }

    #[test]
    fn graph_projection_examples() {
        close(
            graph_projection(&CMat::zeros(2, 2)).unwrap().matrix(),
            GraphProjection::horizontal(2).matrix(),
            1e-15,
        );
        let half = CMat::from_real_rows(&[&[0.5, 0.5], &[0.5, 0.5]]);
        close(graph_projection(&scalar(1.0)).unwrap().matrix(), &half, 1e-14);
        let mut rng = seeded(2);
        for n in 1..=8 {
            let a = random_matrix::<f64>(&mut rng, n, n, 2.0);
            let p = graph_projection(&a).unwrap();
            let (idem, adj) = p.defects();
            assert!(idem < 1e-10 && adj < 1e-10);
            // block (1,1) is the resolvent (1 + A*A)^{-1}
            let res = (&CMat::identity(n) + &a.adjoint().matmul(&a)).inverse();
            close(&p.matrix().block(0, 0, n, n), &res, 1e-10);
        }
    }

    #[test]
    fn ball_projection_examples() {
        close(
            ball_projection(&CMat::zeros(3, 3)).unwrap().matrix(),
            GraphProjection::horizontal(3).matrix(),
            1e-15,
        );
        let mut rng = seeded(8);
        let u = random_unitary::<f64>(&mut rng, 4);
        close(ball_projection(&u).unwrap().matrix(), GraphProjection::vertical(4).matrix(), 1e-12);
        let a = CMat::from_real_rows(&[&[0.0, 2.0], &[2.0, 0.0]]);
        close(
            ball_projection(&bounded_transform(&a).unwrap()).unwrap().matrix(),
            graph_projection(&a).unwrap().matrix(),
            1e-9,
        );
        assert!(matches!(ball_projection(&scalar(1.1)), Err(Error::OutOfBall { .. })));
    }

    #[test]
    fn cayley_examples() {
        let i = imag_unit::<f64>();
        close(&cayley(&HermOp::from_real_diag(&[0.0, 0.0])).unwrap(), &CMat::scalar(2, re(-1.0)), 1e-15);
        close(&cayley(&HermOp::from_real_diag(&[1.0])).unwrap(), &CMat::scalar(1, -i), 1e-15);
        let big = cayley(&HermOp::from_real_diag(&[1e6])).unwrap();
        assert!((big[(0, 0)] - re(1.0)).norm() < 2e-6);
    }

    #[test]
    fn cayley_ball_examples() {
        let i = imag_unit::<f64>();
        close(&cayley_ball(&HermOp::from_real_diag(&[0.0])).unwrap(), &scalar(-1.0), 1e-15);
        close(&cayley_ball(&HermOp::from_real_diag(&[1.0, -1.0])).unwrap(), &CMat::identity(2), 1e-15);
        let h = 0.5f64.sqrt();
        close(&cayley_ball(&HermOp::from_real_diag(&[h])).unwrap(), &CMat::scalar(1, -i), 1e-15);
    }

    #[test]
    fn lagrangian_unitary_endpoints() {
        let p_inf = GraphProjection::<f64>::vertical(3);
        close(&lagrangian_to_unitary(&p_inf).unwrap(), &CMat::identity(3), 1e-15);
        let p0 = GraphProjection::<f64>::horizontal(3);
        close(&lagrangian_to_unitary(&p0).unwrap(), &CMat::scalar(3, re(-1.0)), 1e-15);
    }

    #[test]
    fn lagrangian_unitary_matches_cayley_ball() {
        let mut rng = seeded(4);
        for n in [1, 2, 5] {
            let a = random_hermitian_contraction::<f64>(&mut rng, n, 0.95);
            let p = ball_projection(a.matrix()).unwrap();
            close(&lagrangian_to_unitary(&p).unwrap(), &cayley_ball(&a).unwrap(), 1e-9);
        }
    }

    #[test]
    fn non_lagrangian_rejected() {
        // graph of a non-Hermitian operator
        let a = CMat::from_real_rows(&[&[0.0, 1.0], &[0.0, 0.0]]);
        let p = graph_projection(&a).unwrap();
        assert!(matches!(lagrangian_to_unitary(&p), Err(Error::NotLagrangian { .. })));
    }

    #[test]
    fn odd_embedding_examples() {
        let e = odd_embedding(&scalar(1.0)).unwrap();
        close(e.matrix(), &CMat::from_real_rows(&[&[0.0, 1.0], &[1.0, 0.0]]), 0.0 + 1e-300);
        let ev = e.eigenvalues().unwrap();
        assert!((ev[0] + 1.0).abs() < 1e-14 && (ev[1] - 1.0).abs() < 1e-14);
        assert_eq!(odd_embedding(&CMat::<f64>::zeros(2, 2)).unwrap().matrix().max_abs(), 0.0);
        let mut rng = seeded(9);
        for n in 1..=8 {
            let a = random_matrix::<f64>(&mut rng, n, n, 1.0);
            let e = odd_embedding(&a).unwrap();
            let j = Symplectics::<f64>::new(n).j;
            // JÂJ = -Â holds exactly, entry by entry
            assert_eq!(&j.matmul(e.matrix()).matmul(&j), &-e.matrix());
            let mut sv = f64::singular_values(&a).unwrap();
            let mut expect: Vec<f64> = sv.iter().map(|x| -x).collect();
            sv.reverse();
            expect.reverse();
            expect.sort_by(|a, b| a.partial_cmp(b).unwrap());
            let mut all = expect.clone();
            all.extend(sv);
            all.sort_by(|a, b| a.partial_cmp(b).unwrap());
            for (x, y) in e.eigenvalues().unwrap().iter().zip(&all) {
                assert!((x - y).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn proj_to_unitary_examples() {
        close(&proj_to_unitary(&GraphProjection::<f64>::vertical(2)).unwrap(), &CMat::identity(4), 1e-15);
        close(
            &proj_to_unitary(&GraphProjection::<f64>::horizontal(2)).unwrap(),
            &CMat::scalar(4, re(-1.0)),
            1e-15,
        );
        let mut rng = seeded(10);
        for n in [1, 3, 6] {
            let a = random_hermitian_contraction::<f64>(&mut rng, n, 0.9);
            let p = ball_projection(a.matrix()).unwrap();
            let u = proj_to_unitary(&p).unwrap();
            assert!(odd_unitary_defect(&u) < 1e-10);
            let hat = odd_embedding(a.matrix()).unwrap();
            close(&u, &cayley_ball(&hat).unwrap(), 1e-9);
        }
    }

    #[test]
    fn proj_to_unitary_rejects_non_projection() {
        let m = CMat::<f64>::from_real_diag(&[0.5, 0.0]);
        assert!(matches!(
            proj_to_unitary(&GraphProjection::from_parts(m)),
            Err(Error::NotProjection { .. })
        ));
    }

    #[test]
    fn fredholm_factorization() {
        assert!(fredholm_factor_check(&CMat::<f64>::zeros(3, 3)).unwrap() < 1e-10);
        let mut rng = seeded(12);
        let u = random_unitary::<f64>(&mut rng, 3);
        assert!(fredholm_factor_check(&u).unwrap() < 1e-10);
        for n in [1, 4, 7] {
            let a = random_contraction::<f64>(&mut rng, n, 0.97);
            assert!(fredholm_factor_check(&a).unwrap() < 1e-9);
        }
        assert!(matches!(fredholm_factor_check(&scalar(2.0)), Err(Error::OutOfBall { .. })));
    }

    #[test]
    fn symplectic_constants() {
        let s = Symplectics::<f64>::new(3);
        let id = CMat::identity(6);
        for sym in [&s.i, &s.j] {
            close(sym, &sym.adjoint(), 1e-15);
            close(&sym.matmul(sym), &id, 1e-12);
        }
        assert!(s.v_lag.unitarity_defect() < 1e-12);
        assert!(s.v_odd.unitarity_defect() < 1e-12);
        assert_eq!(s.v_odd.matmul(&s.v_odd), s.j);
        close(&s.v_lag.matmul(&s.i).matmul(&s.v_lag.adjoint()), &s.j, 1e-12);
    }
}
