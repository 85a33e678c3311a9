//! Integer spectral flow along sampled paths of Hermitian operators.
//!
//! Each subinterval `[θ_lo, θ_hi]` of the partition gets a window radius `a`
//! and contributes
//!
//! ```text
//! #{λ ∈ [0, a) at θ_hi} - #{λ ∈ [0, a) at θ_lo}
//! ```
//!
//! which is the net number of upward zero crossings as long as no eigenvalue
//! crosses `±a` inside the subinterval. A subinterval is accepted when both
//! ends have the same number of eigenvalues in `[-a, a]` and those eigenvalues,
//! matched in order, move by less than `a/2`; otherwise it is bisected.
//!
//! The radius is placed in the middle of the widest gap of
//! `{0} ∪ {|λ| < window0 at either end} ∪ {window0}`, which keeps both `0`
//! and `±a` as far as possible from the endpoint spectra. Eigenvalues far
//! outside the window never enter the count, so an eigenvalue escaping to
//! `+∞` and returning from `-∞` (as in graph-continuous families) is ignored.

use std::sync::Arc;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::HermOp;
use crate::scalar::Real;

/// Smallest window radius.
pub const MIN_RADIUS: f64 = 1e-7;
/// Eigenvalues this close to a window edge make the count ambiguous.
pub const EDGE_TOL: f64 = 1e-9;
/// Endpoint operators of closed or concatenated paths must agree to this
/// relative Frobenius distance.
pub const ENDPOINT_TOL: f64 = 1e-9;

pub type Generator<T> = Arc<dyn Fn(f64) -> Result<HermOp<T>> + Send + Sync>;

/// A path `θ ↦ A(θ)` on `[θ_a, θ_b]`, with initial sample points.
#[derive(Clone)]
pub struct OperatorPath<T: Real> {
    generator: Generator<T>,
    theta_a: f64,
    theta_b: f64,
    samples: Vec<f64>,
    closed: bool,
}

impl<T: Real> std::fmt::Debug for OperatorPath<T> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("OperatorPath")
            .field("theta_a", &self.theta_a)
            .field("theta_b", &self.theta_b)
            .field("samples", &self.samples.len())
            .field("closed", &self.closed)
            .finish()
    }
}

fn endpoint_gap<T: Real>(a: &HermOp<T>, b: &HermOp<T>) -> Result<()> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch {
            expected: format!("dimension {}", a.dim()),
            found: format!("{}", b.dim()),
        });
    }
    let d = a.distance(b).as_f64();
    let scale = 1.0 + a.frobenius_norm().as_f64().max(b.frobenius_norm().as_f64());
    if d > ENDPOINT_TOL * scale {
        return Err(Error::EndpointMismatch { distance: d });
    }
    Ok(())
}

impl<T: Real> OperatorPath<T> {
    /// Open path on `[theta_a, theta_b]` sampled at `samples + 1` equispaced points.
    pub fn open(
        generator: impl Fn(f64) -> Result<HermOp<T>> + Send + Sync + 'static,
        theta_a: f64,
        theta_b: f64,
        samples: usize,
    ) -> Result<Self> {
        Self::check_domain(theta_a, theta_b, samples)?;
        let step = (theta_b - theta_a) / samples as f64;
        let mut pts: Vec<f64> = (0..samples).map(|k| theta_a + k as f64 * step).collect();
        pts.push(theta_b);
        Ok(Self {
            generator: Arc::new(generator),
            theta_a,
            theta_b,
            samples: pts,
            closed: false,
        })
    }

    /// Loop on `[theta_a, theta_b]` with `A(theta_a) = A(theta_b)`, sampled at
    /// `samples` equispaced points. The generator is called with parameters
    /// reduced into `[theta_a, theta_b)`.
    pub fn closed(
        generator: impl Fn(f64) -> Result<HermOp<T>> + Send + Sync + 'static,
        theta_a: f64,
        theta_b: f64,
        samples: usize,
    ) -> Result<Self> {
        Self::check_domain(theta_a, theta_b, samples)?;
        let generator: Generator<T> = Arc::new(generator);
        endpoint_gap(&generator(theta_a)?, &generator(theta_b)?)?;
        let step = (theta_b - theta_a) / samples as f64;
        Ok(Self {
            generator,
            theta_a,
            theta_b,
            samples: (0..samples).map(|k| theta_a + k as f64 * step).collect(),
            closed: true,
        })
    }

    fn check_domain(theta_a: f64, theta_b: f64, samples: usize) -> Result<()> {
        if !(theta_b > theta_a) || samples == 0 {
            return Err(Error::Parameter(format!(
                "need theta_a < theta_b and at least one sample, got [{theta_a}, {theta_b}] with {samples}"
            )));
        }
        Ok(())
    }

    pub fn domain(&self) -> (f64, f64) {
        (self.theta_a, self.theta_b)
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn is_closed(&self) -> bool {
        self.closed
    }

    /// `A(θ)`; for loops `θ` is taken modulo the period.
    pub fn eval(&self, theta: f64) -> Result<HermOp<T>> {
        let theta = if self.closed {
            let period = self.theta_b - self.theta_a;
            self.theta_a + (theta - self.theta_a).rem_euclid(period)
        } else {
            theta
        };
        (self.generator)(theta)
    }

    /// Same path with twice as many initial samples.
    pub fn refined(&self) -> Self {
        let mut pts = Vec::with_capacity(2 * self.samples.len());
        for w in self.samples.windows(2) {
            pts.push(w[0]);
            pts.push(0.5 * (w[0] + w[1]));
        }
        let last = *self.samples.last().expect("non-empty samples");
        pts.push(last);
        if self.closed {
            pts.push(0.5 * (last + self.theta_b));
        }
        Self {
            samples: pts,
            ..self.clone()
        }
    }

    /// `θ ↦ A(θ_a + θ_b - θ)`.
    pub fn reversed(&self) -> Self {
        let g = self.generator.clone();
        let (a, b) = (self.theta_a, self.theta_b);
        let mut pts: Vec<f64> = self.samples.iter().map(|&t| a + b - t).collect();
        pts.reverse();
        if self.closed {
            // keep theta_a as a sample: the reflected list starts just above it
            pts.pop();
            pts.insert(0, a);
        }
        Self {
            generator: Arc::new(move |t| g(a + b - t)),
            samples: pts,
            ..self.clone()
        }
    }

    /// Concatenation: `other` runs after `self`, shifted to start at `self`'s end.
    pub fn concat(&self, other: &Self) -> Result<Self> {
        endpoint_gap(&self.eval(self.theta_b)?, &other.eval(other.theta_a)?)?;
        let shift = self.theta_b - other.theta_a;
        let mid = self.theta_b;
        let (first, second) = (self.clone(), other.clone());
        let generator: Generator<T> = Arc::new(move |t| {
            if t <= mid {
                first.eval(t)
            } else {
                second.eval(t - shift)
            }
        });
        let mut pts = self.samples.clone();
        if self.closed {
            pts.push(mid);
        }
        pts.extend(other.samples.iter().map(|&t| t + shift).filter(|&t| t > mid));
        if other.closed {
            pts.push(other.theta_b + shift);
        }
        Ok(Self {
            generator,
            theta_a: self.theta_a,
            theta_b: other.theta_b + shift,
            samples: pts,
            closed: false,
        })
    }

    /// Partition points including the closing endpoint of a loop.
    fn nodes(&self) -> Vec<f64> {
        let mut pts = self.samples.clone();
        if self.closed {
            pts.push(self.theta_b);
        }
        pts
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Crossing {
    pub theta_lo: f64,
    pub theta_hi: f64,
    /// `+1` for an eigenvalue moving up through zero, `-1` for down.
    pub direction: i64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SpecFlowReport {
    pub flow: i64,
    pub partition: Vec<f64>,
    pub window_radii: Vec<f64>,
    pub crossings: Vec<Crossing>,
}

fn count_in<T: Real>(values: &[T], lo: f64, hi: f64, hi_closed: bool) -> usize {
    values
        .iter()
        .filter(|v| {
            let v = v.as_f64();
            v >= lo && (v < hi || (hi_closed && v <= hi))
        })
        .count()
}

fn in_window<T: Real>(values: &[T], a: f64) -> Vec<f64> {
    values.iter().map(|v| v.as_f64()).filter(|v| v.abs() <= a).collect()
}

/// Middle of the widest gap in `{0} ∪ {|λ| < window0} ∪ {window0}`.
fn choose_radius<T: Real>(left: &[T], right: &[T], window0: f64) -> f64 {
    let mut pts: Vec<f64> = left
        .iter()
        .chain(right)
        .map(|v| v.as_f64().abs())
        .filter(|&v| v < window0)
        .collect();
    pts.push(0.0);
    pts.push(window0);
    pts.sort_by(|a, b| a.partial_cmp(b).expect("finite eigenvalues"));
    let (lo, hi) = pts
        .windows(2)
        .map(|w| (w[0], w[1]))
        .max_by(|x, y| (x.1 - x.0).partial_cmp(&(y.1 - y.0)).expect("finite gaps"))
        .expect("at least two points");
    (0.5 * (lo + hi)).max(MIN_RADIUS)
}

fn pinned<T: Real>(values: &[T], a: f64) -> Option<f64> {
    values
        .iter()
        .map(|v| v.as_f64())
        .find(|v| (v.abs() - a).abs() < EDGE_TOL)
}

struct Bracket<'a, T> {
    lo: f64,
    hi: f64,
    left: &'a [T],
    right: &'a [T],
}

/// Window radius for a bracket, nudged by ±10% off an eigenvalue at the edge.
fn settle_radius<T: Real>(b: &Bracket<'_, T>, window0: f64) -> Result<f64> {
    let a = choose_radius(b.left, b.right, window0);
    for cand in [a, 1.1 * a, 0.9 * a] {
        if pinned(b.left, cand).is_none() && pinned(b.right, cand).is_none() {
            return Ok(cand);
        }
    }
    let eigenvalue = pinned(b.left, a).or_else(|| pinned(b.right, a)).unwrap_or(a);
    Err(Error::Conditioning {
        eigenvalue,
        radius: a,
        theta_lo: b.lo,
        theta_hi: b.hi,
    })
}

fn converged<T: Real>(left: &[T], right: &[T], a: f64) -> bool {
    let (l, r) = (in_window(left, a), in_window(right, a));
    l.len() == r.len() && l.iter().zip(&r).all(|(x, y)| (x - y).abs() < 0.5 * a)
}

fn spectrum<T: Real>(path: &OperatorPath<T>, theta: f64) -> Result<Vec<T>> {
    Ok(path.eval(theta)?.eigenvalues()?.to_vec())
}

/// Spectral flow along `path`, bisecting brackets at most `max_depth` times.
pub fn spectral_flow<T: Real>(path: &OperatorPath<T>, window0: f64, max_depth: usize) -> Result<SpecFlowReport> {
    if !(window0 > 0.0) {
        return Err(Error::Parameter(format!("initial window must be positive, got {window0}")));
    }
    let mut nodes = path.nodes();
    if path.closed {
        let base = spectrum(path, nodes[0])?;
        if base.iter().any(|v| v.as_f64().abs() < EDGE_TOL) {
            let half = 0.5 * (nodes[1] - nodes[0]);
            nodes.iter_mut().for_each(|t| *t += half);
        }
    }
    let spectra = nodes
        .par_iter()
        .map(|&t| spectrum(path, t))
        .collect::<Result<Vec<_>>>()?;
    if !path.closed {
        for s in [&spectra[0], &spectra[spectra.len() - 1]] {
            if let Some(v) = s.iter().map(|v| v.as_f64()).find(|v| v.abs() < EDGE_TOL) {
                return Err(Error::Parameter(format!(
                    "open path endpoint has eigenvalue {v:e} within {EDGE_TOL:e} of zero"
                )));
            }
        }
    }
    let dim = spectra[0].len();
    if spectra.iter().any(|s| s.len() != dim) {
        return Err(Error::DimensionMismatch {
            expected: format!("operators of dimension {dim} along the path"),
            found: "varying dimensions".into(),
        });
    }

    let mut report = SpecFlowReport {
        flow: 0,
        partition: vec![nodes[0]],
        window_radii: Vec::new(),
        crossings: Vec::new(),
    };
    for k in 0..nodes.len() - 1 {
        refine(
            path,
            Bracket {
                lo: nodes[k],
                hi: nodes[k + 1],
                left: &spectra[k],
                right: &spectra[k + 1],
            },
            window0,
            max_depth,
            0,
            &mut report,
        )?;
    }
    Ok(report)
}

fn refine<T: Real>(
    path: &OperatorPath<T>,
    b: Bracket<'_, T>,
    window0: f64,
    max_depth: usize,
    depth: usize,
    report: &mut SpecFlowReport,
) -> Result<()> {
    let a = settle_radius(&b, window0)?;
    if converged(b.left, b.right, a) {
        let net = count_in(b.right, 0.0, a, false) as i64 - count_in(b.left, 0.0, a, false) as i64;
        report.flow += net;
        report.partition.push(b.hi);
        report.window_radii.push(a);
        let direction = net.signum();
        for _ in 0..net.abs() {
            report.crossings.push(Crossing {
                theta_lo: b.lo,
                theta_hi: b.hi,
                direction,
            });
        }
        return Ok(());
    }
    if depth >= max_depth {
        return Err(Error::NonConvergence {
            theta_lo: b.lo,
            theta_hi: b.hi,
            depth,
        });
    }
    let mid = 0.5 * (b.lo + b.hi);
    let middle = spectrum(path, mid)?;
    refine(
        path,
        Bracket {
            lo: b.lo,
            hi: mid,
            left: b.left,
            right: &middle,
        },
        window0,
        max_depth,
        depth + 1,
        report,
    )?;
    refine(
        path,
        Bracket {
            lo: mid,
            hi: b.hi,
            left: &middle,
            right: b.right,
        },
        window0,
        max_depth,
        depth + 1,
        report,
    )
}

/// `θ ↦ A_{[cos θ : sin θ]}` on `[0, π]` as a closed loop.
pub fn robin_loop(n: usize, samples: usize) -> Result<OperatorPath<f64>> {
    crate::sturm::assemble_robin_operator::<f64>(crate::sturm::ProjectivePoint::dirichlet(), n)?;
    OperatorPath::closed(
        move |theta| {
            let x = crate::sturm::ProjectivePoint::from_angle(theta);
            Ok(crate::sturm::assemble_robin_operator::<f64>(x, n)?.matrix)
        },
        0.0,
        std::f64::consts::PI,
        samples,
    )
}

/// `t ↦ diag(t - 1/2, 2)` on `[0, 1]`: one upward crossing.
pub fn crossing_path(samples: usize) -> Result<OperatorPath<f64>> {
    OperatorPath::open(|t| Ok(HermOp::from_real_diag(&[t - 0.5, 2.0])), 0.0, 1.0, samples)
}

/// The constant path at `diag(-1, 1)`.
pub fn constant_path(samples: usize) -> Result<OperatorPath<f64>> {
    OperatorPath::open(|_| Ok(HermOp::from_real_diag(&[-1.0, 1.0])), 0.0, 1.0, samples)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sturm::ProjectivePoint;

    #[test]
    fn crossing_and_constant() {
        let r = spectral_flow(&crossing_path(8).unwrap(), 10.0, 20).unwrap();
        assert_eq!(r.flow, 1);
        assert_eq!(r.crossings.len(), 1);
        assert!(r.crossings[0].theta_lo <= 0.5 && r.crossings[0].theta_hi >= 0.5);
        assert_eq!(r.flow, r.crossings.iter().map(|c| c.direction).sum::<i64>());
        assert_eq!(spectral_flow(&constant_path(8).unwrap(), 10.0, 20).unwrap().flow, 0);
    }

    #[test]
    fn reversal_and_concatenation() {
        let p = crossing_path(7).unwrap();
        assert_eq!(spectral_flow(&p.reversed(), 10.0, 20).unwrap().flow, -1);
        let there_and_back = p.concat(&p.reversed()).unwrap();
        assert_eq!(spectral_flow(&there_and_back, 10.0, 20).unwrap().flow, 0);
        let eps = 1e-3;
        let g = |t: f64| Ok(HermOp::from_real_diag(&[t - 0.5, 2.0]));
        let first = OperatorPath::open(g, 0.0, 0.5 - eps, 5).unwrap();
        let second = OperatorPath::open(g, 0.5 - eps, 1.0, 5).unwrap();
        let f1 = spectral_flow(&first, 10.0, 20).unwrap().flow;
        let f2 = spectral_flow(&second, 10.0, 20).unwrap().flow;
        assert_eq!(f1 + f2, 1);
        assert_eq!(spectral_flow(&first.concat(&second).unwrap(), 10.0, 20).unwrap().flow, 1);
        let jump = OperatorPath::open(|_| Ok(HermOp::from_real_diag(&[5.0, 2.0])), 0.0, 1.0, 3).unwrap();
        assert!(matches!(first.concat(&jump), Err(Error::EndpointMismatch { .. })));
    }

    #[test]
    fn non_convergence_is_reported() {
        // an eigenvalue jumping out of the window cannot be resolved by bisection
        let p = OperatorPath::open(
            |t| Ok(HermOp::from_real_diag(&[if t < 0.3 { -1.0 } else { 100.0 }])),
            0.0,
            1.0,
            4,
        )
        .unwrap();
        assert!(matches!(spectral_flow(&p, 10.0, 6), Err(Error::NonConvergence { .. })));
    }

    #[test]
    fn closed_loop_requires_matching_ends() {
        let bad = OperatorPath::closed(|t| Ok(HermOp::from_real_diag(&[t])), 0.0, 1.0, 4);
        assert!(matches!(bad, Err(Error::EndpointMismatch { .. })));
    }

    #[test]
    fn closed_loop_base_point_rotation() {
        // loop whose base point has a zero eigenvalue; flow around it is 0
        let p = OperatorPath::closed(
            |t| Ok(HermOp::from_real_diag(&[(std::f64::consts::TAU * t).sin(), 3.0])),
            0.0,
            1.0,
            16,
        )
        .unwrap();
        let r = spectral_flow(&p, 10.0, 20).unwrap();
        assert_eq!(r.flow, 0);
        assert!(r.partition[0] > 0.0);
    }

    #[test]
    fn robin_loop_has_flow_one() {
        let r = spectral_flow(&robin_loop(200, 32).unwrap(), 50.0, 30).unwrap();
        assert_eq!(r.flow, 1);
        assert_eq!(r.crossings.len(), 1);
        let c = &r.crossings[0];
        assert!(c.theta_lo <= std::f64::consts::FRAC_PI_4 + 1e-12 && c.theta_hi >= std::f64::consts::FRAC_PI_4 - 1e-12);
    }

    #[test]
    fn robin_halves_add_up() {
        let n = 200;
        let half = |lo: f64, hi: f64| {
            OperatorPath::open(
                move |theta| Ok(crate::sturm::assemble_robin_operator::<f64>(ProjectivePoint::from_angle(theta), n)?.matrix),
                lo,
                hi,
                16,
            )
            .unwrap()
        };
        let pi = std::f64::consts::PI;
        let (first, second) = (half(0.0, 0.5 * pi), half(0.5 * pi, pi));
        let f1 = spectral_flow(&first, 50.0, 30).unwrap().flow;
        let f2 = spectral_flow(&second, 50.0, 30).unwrap().flow;
        assert_eq!((f1, f2), (1, 0));
        assert_eq!(spectral_flow(&first.concat(&second).unwrap(), 50.0, 30).unwrap().flow, 1);
    }

    #[test]
    fn open_endpoint_on_zero_rejected() {
        let p = OperatorPath::open(|t| Ok(HermOp::from_real_diag(&[t, 1.0])), 0.0, 1.0, 4).unwrap();
        assert!(matches!(spectral_flow(&p, 10.0, 20), Err(Error::Parameter(_))));
    }

    #[test]
    fn refined_sampling_keeps_flow() {
        let p = robin_loop(120, 16).unwrap();
        let q = p.refined();
        assert_eq!(q.samples().len(), 32);
        assert_eq!(
            spectral_flow(&p, 50.0, 30).unwrap().flow,
            spectral_flow(&q, 50.0, 30).unwrap().flow
        );
    }
}
