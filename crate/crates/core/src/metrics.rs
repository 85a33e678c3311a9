//! Distances realizing the two topologies on operators: the Riesz distance
//! `‖φ(A) - φ(B)‖` and the gap distance `‖p(A) - p(B)‖`. All norms are
//! operator norms.

use crate::error::{Error, Result};
use crate::linalg::{CMat, HermOp};
use crate::scalar::Real;
use crate::transforms::{
    ball_projection, bounded_transform, bounded_transform_hermitian, graph_projection, graph_projection_hermitian,
};

fn same_shape(a: (usize, usize), b: (usize, usize)) -> Result<()> {
    if a == b {
        Ok(())
    } else {
        Err(Error::DimensionMismatch {
            expected: format!("{}x{}", a.0, a.1),
            found: format!("{}x{}", b.0, b.1),
        })
    }
}

/// `‖φ(A) - φ(B)‖`.
pub fn riesz_dist<T: Real>(a: &CMat<T>, b: &CMat<T>) -> Result<T> {
    same_shape((a.rows(), a.cols()), (b.rows(), b.cols()))?;
    Ok((&bounded_transform(a)? - &bounded_transform(b)?).op_norm())
}

/// [`riesz_dist`] through the eigendecompositions.
pub fn riesz_dist_hermitian<T: Real>(a: &HermOp<T>, b: &HermOp<T>) -> Result<T> {
    same_shape((a.dim(), a.dim()), (b.dim(), b.dim()))?;
    let fa = bounded_transform_hermitian(a)?;
    let fb = bounded_transform_hermitian(b)?;
    Ok((fa.matrix() - fb.matrix()).op_norm())
}

/// `‖p(A) - p(B)‖`, at most one.
pub fn gap_dist<T: Real>(a: &CMat<T>, b: &CMat<T>) -> Result<T> {
    same_shape((a.rows(), a.cols()), (b.rows(), b.cols()))?;
    Ok(graph_projection(a)?.distance(&graph_projection(b)?))
}

/// The gap distance computed as `‖p̃(φ(A)) - p̃(φ(B))‖`.
pub fn gap_dist_via_ball<T: Real>(a: &CMat<T>, b: &CMat<T>) -> Result<T> {
    same_shape((a.rows(), a.cols()), (b.rows(), b.cols()))?;
    let pa = ball_projection(&bounded_transform(a)?)?;
    let pb = ball_projection(&bounded_transform(b)?)?;
    Ok(pa.distance(&pb))
}

/// [`gap_dist`] through the eigendecompositions; stays accurate when the
/// operators have eigenvalues far beyond one.
pub fn gap_dist_hermitian<T: Real>(a: &HermOp<T>, b: &HermOp<T>) -> Result<T> {
    same_shape((a.dim(), a.dim()), (b.dim(), b.dim()))?;
    Ok(graph_projection_hermitian(a)?.distance(&graph_projection_hermitian(b)?))
}

/// `max_k |λ_k(A) - λ_k(B)|` over the ascending spectra. By Weyl's inequality
/// this never exceeds `‖A - B‖`.
pub fn weyl_gap<T: Real>(a: &HermOp<T>, b: &HermOp<T>) -> Result<T> {
    same_shape((a.dim(), a.dim()), (b.dim(), b.dim()))?;
    let (ea, eb) = (a.eigenvalues()?, b.eigenvalues()?);
    Ok(ea.iter().zip(eb).fold(T::zero(), |m, (x, y)| m.max((*x - *y).abs())))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random::{random_hermitian, random_matrix, random_unitary, seeded};

    fn scalar(x: f64) -> CMat<f64> {
        CMat::from_real_diag(&[x])
    }

    #[test]
    fn riesz_examples() {
        let mut rng = seeded(1);
        let a = random_matrix::<f64>(&mut rng, 5, 5, 2.0);
        let b = random_matrix::<f64>(&mut rng, 5, 5, 2.0);
        assert!(riesz_dist(&a, &a).unwrap() < 1e-15);
        assert!((riesz_dist(&scalar(0.0), &scalar(1.0)).unwrap() - 0.5f64.sqrt()).abs() < 1e-14);
        assert!((riesz_dist(&a, &b).unwrap() - riesz_dist(&b, &a).unwrap()).abs() < 1e-14);
        assert!(matches!(riesz_dist(&a, &scalar(1.0)), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn gap_examples() {
        let mut rng = seeded(2);
        let a = random_matrix::<f64>(&mut rng, 4, 4, 2.0);
        assert!(gap_dist(&a, &a).unwrap() < 1e-14);
        let u = random_unitary::<f64>(&mut rng, 4);
        // the graph of a unitary sits at 45 degrees to both axes
        assert!((gap_dist(&CMat::zeros(4, 4), &u).unwrap() - 0.5f64.sqrt()).abs() < 1e-12);
        // while its ball projection is the vertical one
        let d = ball_projection(&CMat::zeros(4, 4)).unwrap().distance(&ball_projection(&u).unwrap());
        assert!((d - 1.0).abs() < 1e-12);
        for _ in 0..200 {
            let a = random_matrix::<f64>(&mut rng, 3, 3, 5.0);
            let b = random_matrix::<f64>(&mut rng, 3, 3, 5.0);
            assert!(gap_dist(&a, &b).unwrap() <= 1.0 + 1e-12);
        }
    }

    #[test]
    fn gap_two_routes_agree() {
        let mut rng = seeded(3);
        for n in 1..=8 {
            let a = random_matrix::<f64>(&mut rng, n, n, 3.0);
            let b = random_matrix::<f64>(&mut rng, n, n, 3.0);
            let d1 = gap_dist(&a, &b).unwrap();
            let d2 = gap_dist_via_ball(&a, &b).unwrap();
            assert!((d1 - d2).abs() < 1e-9);
            let (ha, hb) = (random_hermitian::<f64>(&mut rng, n, 3.0), random_hermitian::<f64>(&mut rng, n, 3.0));
            let d3 = gap_dist_hermitian(&ha, &hb).unwrap();
            let d4 = gap_dist(ha.matrix(), hb.matrix()).unwrap();
            assert!((d3 - d4).abs() < 1e-9);
            let r1 = riesz_dist_hermitian(&ha, &hb).unwrap();
            let r2 = riesz_dist(ha.matrix(), hb.matrix()).unwrap();
            assert!((r1 - r2).abs() < 1e-9);
        }
    }

    #[test]
    fn weyl_examples() {
        let a = HermOp::from_real_diag(&[0.0]);
        assert_eq!(weyl_gap(&a, &a).unwrap(), 0.0);
        assert_eq!(weyl_gap(&a, &HermOp::from_real_diag(&[1.0])).unwrap(), 1.0);
        let mut rng = seeded(4);
        for _ in 0..200 {
            let a = random_hermitian::<f64>(&mut rng, 5, 2.0);
            let b = random_hermitian::<f64>(&mut rng, 5, 2.0);
            assert!(weyl_gap(&a, &b).unwrap() <= (a.matrix() - b.matrix()).op_norm() + 1e-12);
        }
    }

    #[test]
    fn triangle_inequalities() {
        let mut rng = seeded(5);
        for _ in 0..30 {
            let [a, b, c] = [0, 1, 2].map(|_| random_matrix::<f64>(&mut rng, 4, 4, 3.0));
            assert!(riesz_dist(&a, &c).unwrap() <= riesz_dist(&a, &b).unwrap() + riesz_dist(&b, &c).unwrap() + 1e-9);
            assert!(gap_dist(&a, &c).unwrap() <= gap_dist(&a, &b).unwrap() + gap_dist(&b, &c).unwrap() + 1e-9);
        }
    }

    #[test]
    fn weyl_bounds_riesz() {
        let mut rng = seeded(6);
        for _ in 0..50 {
            let a = random_hermitian::<f64>(&mut rng, 6, 4.0);
            let b = random_hermitian::<f64>(&mut rng, 6, 4.0);
            let fa = bounded_transform_hermitian(&a).unwrap();
            let fb = bounded_transform_hermitian(&b).unwrap();
            assert!(weyl_gap(&fa, &fb).unwrap() <= riesz_dist(a.matrix(), b.matrix()).unwrap() + 1e-9);
        }
    }
}
