//! Randomized check of the algebraic identities tying the transforms together.
//!
//! Every check returns a deviation in operator norm; the suite keeps the
//! maximum of each over all trials. Trial `k` draws its operators from a
//! generator seeded with `seed + k`, so the result does not depend on the
//! number of worker threads.

use num_complex::Complex;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::Result;
use crate::linalg::{imag_unit, re, CMat};
use crate::random::{
    random_contraction, random_hermitian, random_hermitian_contraction, random_matrix, random_unit_vector, seeded,
    uniform_in,
};
use crate::scalar::Real;
use crate::transforms::{
    ball_projection, bounded_transform, bounded_transform_hermitian, cayley, cayley_ball, fredholm_factor_check,
    graph_projection, graph_projection_hermitian, inverse_bounded_transform, odd_embedding, proj_to_unitary,
    unit_complement, Symplectics,
};

/// Entry scale of the random unbounded-side operators.
pub const OPERATOR_SCALE: f64 = 2.0;
/// Operator norm of the random strict contractions.
pub const CONTRACTION_RADIUS: f64 = 0.95;

pub const CHECK_NAMES: [&str; 12] = [
    "ball_projection_of_bounded_transform",
    "ball_cayley_of_bounded_transform",
    "resolvent_identity",
    "fredholm_factorization",
    "lagrangian_anticommutator",
    "odd_unitary_square",
    "one_minus_ball_cayley",
    "ball_cayley_plus_one",
    "convexity_witness",
    "symplectic_conjugation",
    "inverse_after_forward",
    "forward_after_inverse",
];

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct IdentityCheck {
    pub name: &'static str,
    pub max_deviation: f64,
}

fn deviations<T: Real>(seed: u64, n: usize) -> Result<[f64; 12]> {
    let mut rng = seeded(seed);
    let one = CMat::<T>::identity(n);
    let i = imag_unit::<T>();

    let a_op = random_matrix::<T>(&mut rng, n, n, OPERATOR_SCALE);
    let a = bounded_transform(&a_op)?;
    let h_op = random_hermitian::<T>(&mut rng, n, OPERATOR_SCALE);
    let h = bounded_transform_hermitian(&h_op)?;
    let c = random_contraction::<T>(&mut rng, n, CONTRACTION_RADIUS);
    let hc = random_hermitian_contraction::<T>(&mut rng, n, CONTRACTION_RADIUS);

    let ball_graph = ball_projection(&a)?.distance(&graph_projection(&a_op)?);
    let ball_cayley = (&cayley_ball(&h)? - &cayley(&h_op)?).op_norm();

    let resolvent = (&one + &a_op.adjoint().matmul(&a_op)).inverse();
    let resolvent = (&resolvent - &(&one - &a.adjoint().matmul(&a))).op_norm();

    let fredholm = fredholm_factor_check(&c)?;
    let lagrangian = graph_projection_hermitian(&h_op)?.lagrangian_defect();
    let odd_square = (&proj_to_unitary(&ball_projection(&c)?)? - &cayley_ball(&odd_embedding(&c)?)?).op_norm();

    // 1 - κ̃(a) = 2(1 - a²) + 2ia√(1 - a²) and κ̃(a) + 1 = 2a(a - i√(1 - a²))
    let root = hc.func_calc(|x| re(unit_complement(x)))?;
    let hm = hc.matrix();
    let kt = cayley_ball(&hc)?;
    let sq = hm.matmul(hm);
    let lhs = &one - &kt;
    let rhs = &(&one - &sq).scale_real(T::lit(2.0)) + &hm.matmul(&root).scale(i * re(T::lit(2.0)));
    let one_minus = (&lhs - &rhs).op_norm();
    let lhs = &kt + &one;
    let rhs = hm.matmul(&(hm - &root.scale(i))).scale_real(T::lit(2.0));
    let plus_one = (&lhs - &rhs).op_norm();

    // ‖a_s ξ‖ ≤ (1-s)‖a₀ξ‖ + s‖a₁ξ‖ < ‖ξ‖
    let r1 = uniform_in(&mut rng, 0.1, CONTRACTION_RADIUS);
    let a1 = random_contraction::<T>(&mut rng, n, r1);
    let mut convexity = 0.0f64;
    for s in [0.25, 0.5, 0.75] {
        let st = T::lit(s);
        let a_s = &c.scale_real(T::one() - st) + &a1.scale_real(st);
        for _ in 0..50 {
            let xi = random_unit_vector::<T>(&mut rng, n);
            let norm = |m: &CMat<T>| {
                m.mul_vec(&xi)
                    .iter()
                    .map(Complex::norm_sqr)
                    .fold(T::zero(), |acc, x| acc + x)
                    .sqrt()
                    .as_f64()
            };
            let bound = (1.0 - s) * norm(&c) + s * norm(&a1);
            let excess = (norm(&a_s) - bound).max(0.0);
            let strict = (norm(&a_s) - 1.0).max(0.0);
            convexity = convexity.max(excess).max(strict);
        }
    }

    let sym = Symplectics::<T>::new(n);
    let conj = (&sym.v_lag.matmul(&sym.i).matmul(&sym.v_lag.adjoint()) - &sym.j).op_norm();

    let back = (&inverse_bounded_transform(&a)? - &a_op).op_norm() / (T::one() + a_op.op_norm());
    let forth = (&bounded_transform(&inverse_bounded_transform(&c)?)? - &c).op_norm();

    Ok([
        ball_graph.as_f64(),
        ball_cayley.as_f64(),
        resolvent.as_f64(),
        fredholm.as_f64(),
        lagrangian.as_f64(),
        odd_square.as_f64(),
        one_minus.as_f64(),
        plus_one.as_f64(),
        convexity,
        conj.as_f64(),
        back.as_f64(),
        forth.as_f64(),
    ])
}

/// Runs `trials` random instances with dimensions cycling through `1..=max_dim`.
pub fn run_identity_suite<T: Real>(seed: u64, max_dim: usize, trials: usize) -> Result<Vec<IdentityCheck>> {
    let max_dim = max_dim.max(1);
    let per_trial = (0..trials)
        .into_par_iter()
        .map(|k| deviations::<T>(seed.wrapping_add(k as u64), 1 + k % max_dim))
        .collect::<Result<Vec<_>>>()?;
    Ok(CHECK_NAMES
        .iter()
        .enumerate()
        .map(|(j, &name)| IdentityCheck {
            name,
            max_deviation: per_trial.iter().map(|d| d[j]).fold(0.0, f64::max),
        })
        .collect())
}

/// Largest deviation across all checks.
pub fn worst(checks: &[IdentityCheck]) -> f64 {
    checks.iter().map(|c| c.max_deviation).fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn suite_small_run() {
        let checks = run_identity_suite::<f64>(7, 6, 40).unwrap();
        assert_eq!(checks.len(), CHECK_NAMES.len());
        for c in &checks {
            assert!(c.max_deviation <= 1e-9, "{} = {:e}", c.name, c.max_deviation);
        }
    }

    #[test]
    fn imaginary_part_of_one_minus_ball_cayley_is_positive() {
        // a = 1/2: 1 - κ̃ = 3/2 + i√3/2
        let z = Complex::new(1.0, 0.0) - crate::transforms::cayley_ball_scalar(0.5f64);
        assert!((z.re - 1.5).abs() < 1e-15);
        assert!((z.im - 0.75f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn suite_is_deterministic() {
        assert_eq!(
            run_identity_suite::<f64>(11, 4, 12).unwrap(),
            run_identity_suite::<f64>(11, 4, 12).unwrap()
        );
    }

    #[test]
    fn single_precision_suite_is_loose_but_sane() {
        let checks = run_identity_suite::<f32>(3, 4, 10).unwrap();
        assert!(worst(&checks) < 1e-2);
    }
}
