//! Quadrature and special-function infrastructure.
//!
//! Everything downstream is built from three primitives:
//!
//! * [`integrate`] / [`integrate_breaks`]: globally adaptive bisection with a
//!   15-point Gauss–Legendre panel rule. The panel error is estimated as the
//!   difference between the panel value and the sum of its two halves.
//! * [`integrate_pv`]: Cauchy principal values by singularity subtraction,
//!   ```text
//!   PV ∫_a^b g(t)/(t−s) dt = ∫_a^b (g(t)−g(s))/(t−s) dt + g(s)·ln((b−s)/(s−a))
//!   ```
//! * [`dawson`]: F(x) = e^{−x²}∫₀^x e^{t²} dt.
//!
//! Semi-infinite integrals with a Gaussian weight e^{−μ²} are truncated at
//! [`QuadConfig::mu_cut`], where the weight is below 10⁻²⁷.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::num::NonZeroUsize;
use std::sync::OnceLock;

use gauss_quad::hermite::GaussHermite;
use nalgebra::{DMatrix, SymmetricEigen};
use gauss_quad::legendre::GaussLegendre;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const PANEL_ORDER: usize = 15;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct QuadConfig {
    pub abs_tol: f64,
    pub rel_tol: f64,
    /// Truncation point for e^{−μ²}-weighted semi-infinite integrals.
    pub mu_cut: f64,
    pub max_subdivisions: usize,
}

impl Default for QuadConfig {
    fn default() -> Self {
        QuadConfig {
            abs_tol: 1e-10,
            rel_tol: 1e-10,
            mu_cut: 8.0,
            max_subdivisions: 4000,
        }
    }
}

impl QuadConfig {
    /// Default configuration with both tolerances set to `tol`.
    pub fn with_tol(tol: f64) -> Self {
        QuadConfig {
            abs_tol: tol,
            rel_tol: tol,
            ..Default::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.abs_tol > 0.0 && self.rel_tol > 0.0) {
            return Err(Error::InvalidConfig(format!(
                "tolerances must be positive (abs_tol = {}, rel_tol = {})",
                self.abs_tol, self.rel_tol
            )));
        }
        if !(self.mu_cut >= 6.0) {
            return Err(Error::InvalidConfig(format!(
                "mu_cut must be at least 6 (got {})",
                self.mu_cut
            )));
        }
        if self.max_subdivisions < 1 {
            return Err(Error::InvalidConfig("max_subdivisions must be >= 1".into()));
        }
        Ok(())
    }

    fn target(&self, value: f64) -> f64 {
        self.abs_tol.max(self.rel_tol * value.abs())
    }
}

/// Gauss–Legendre nodes and weights on [−1, 1].
pub fn legendre_rule(order: usize) -> Vec<(f64, f64)> {
    let degree = NonZeroUsize::new(order).expect("rule order must be positive");
    GaussLegendre::new(degree)
        .as_node_weight_pairs()
        .to_vec()
}

fn panel_rule() -> &'static [(f64, f64)] {
    static RULE: OnceLock<Vec<(f64, f64)>> = OnceLock::new();
    RULE.get_or_init(|| legendre_rule(PANEL_ORDER))
}

/// Gauss–Hermite rule for the weight e^{−μ²}/√π, i.e. the weights sum to one.
pub fn hermite_rule(n: usize) -> Vec<(f64, f64)> {
    let degree = NonZeroUsize::new(n).expect("rule order must be positive");
    let norm = std::f64::consts::PI.sqrt();
    let mut rule: Vec<(f64, f64)> = GaussHermite::new(degree)
        .as_node_weight_pairs()
        .iter()
        .map(|&(x, w)| (x, w / norm))
        .collect();
    rule.sort_by(|a, b| a.0.total_cmp(&b.0));
    rule
}

/// Gauss rule for the half-range weight 2e^{−μ²}/√π on [0, ∞), weights summing to one.
///
/// Recurrence coefficients come from the discretized Stieltjes procedure on a
/// composite Gauss–Legendre rule over [0, 12]; nodes and weights then follow
/// from the Jacobi matrix (Golub–Welsch).
pub fn half_hermite_rule(n: usize) -> Vec<(f64, f64)> {
    assert!(n > 0, "rule order must be positive");
    let base = legendre_rule(20);
    let (panels, upper) = (192, 12.0);
    let width = upper / panels as f64;
    let mut xs = Vec::with_capacity(panels * base.len());
    let mut ws: Vec<f64> = Vec::with_capacity(panels * base.len());
    for p in 0..panels {
        let mid = (p as f64 + 0.5) * width;
        for &(t, w) in &base {
            let x = mid + 0.5 * width * t;
            xs.push(x);
            ws.push(0.5 * width * w * (-x * x).exp());
        }
    }
    let mass: f64 = ws.iter().sum();
    ws.iter_mut().for_each(|w| *w /= mass);
    // Orthonormal three-term recurrence q_{k+1}b_{k+1} = (x − a_k)q_k − b_k q_{k−1}.
    let mut alpha = Vec::with_capacity(n);
    let mut offdiag = Vec::with_capacity(n);
    let mut prev = vec![0.0; xs.len()];
    let mut cur = vec![1.0; xs.len()];
    let mut b = 0.0;
    for _ in 0..n {
        let a: f64 = ws.iter().zip(&cur).zip(&xs).map(|((w, q), x)| w * x * q * q).sum();
        let r: Vec<f64> = (0..xs.len())
            .map(|i| (xs[i] - a) * cur[i] - b * prev[i])
            .collect();
        b = ws.iter().zip(&r).map(|(w, v)| w * v * v).sum::<f64>().sqrt();
        alpha.push(a);
        offdiag.push(b);
        prev = cur;
        cur = r.into_iter().map(|v| v / b).collect();
    }
    let jacobi = DMatrix::from_fn(n, n, |i, j| {
        if i == j {
            alpha[i]
        } else if i.abs_diff(j) == 1 {
            offdiag[i.min(j)]
        } else {
            0.0
        }
    });
    let eig = SymmetricEigen::new(jacobi);
    let mut rule: Vec<(f64, f64)> = (0..n)
        .map(|k| (eig.eigenvalues[k], eig.eigenvectors[(0, k)].powi(2)))
        .collect();
    rule.sort_by(|a, b| a.0.total_cmp(&b.0));
    rule
}

fn panel<F: FnMut(f64) -> f64>(f: &mut F, a: f64, b: f64) -> f64 {
    let half = 0.5 * (b - a);
    let mid = 0.5 * (a + b);
    panel_rule()
        .iter()
        .map(|&(x, w)| w * f(mid + half * x))
        .sum::<f64>()
        * half
}

struct Segment {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
    halves: (f64, f64),
}

impl Segment {
    /// Refine a panel whose single-rule value is `coarse` into its two halves.
    fn new<F: FnMut(f64) -> f64>(f: &mut F, a: f64, b: f64, coarse: f64) -> Self {
        let m = 0.5 * (a + b);
        let left = panel(f, a, m);
        let right = panel(f, m, b);
        let value = left + right;
        Segment {
            a,
            b,
            value,
            error: (coarse - value).abs(),
            halves: (left, right),
        }
    }
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.error.total_cmp(&other.error) == Ordering::Equal
    }
}
impl Eq for Segment {}
impl PartialOrd for Segment {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Segment {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

/// ∫_a^b f with estimated error ≤ max(abs_tol, rel_tol·|result|).
pub fn integrate<F: FnMut(f64) -> f64>(f: F, a: f64, b: f64, cfg: &QuadConfig) -> Result<f64> {
    if !(a < b) {
        return Err(Error::domain(format!("integration interval [{a}, {b}] is empty")));
    }
    integrate_breaks(f, &[a, b], cfg)
}

/// Adaptive integration over `[points[0], points[last]]`, with every interior
/// point used as an initial panel edge. Points must be strictly increasing.
pub fn integrate_breaks<F: FnMut(f64) -> f64>(
    mut f: F,
    points: &[f64],
    cfg: &QuadConfig,
) -> Result<f64> {
    if points.len() < 2 || points.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(Error::domain(format!(
            "break points must be strictly increasing: {points:?}"
        )));
    }
    let mut heap = BinaryHeap::new();
    for w in points.windows(2) {
        let coarse = panel(&mut f, w[0], w[1]);
        heap.push(Segment::new(&mut f, w[0], w[1], coarse));
    }
    let (mut value, mut error) = heap
        .iter()
        .fold((0.0, 0.0), |(v, e), s: &Segment| (v + s.value, e + s.error));
    let mut splits = 0usize;
    loop {
        if !value.is_finite() {
            return Err(Error::NonConvergence {
                estimate: value,
                error_bound: error,
            });
        }
        if error <= cfg.target(value) {
            return Ok(value);
        }
        if splits >= cfg.max_subdivisions {
            return Err(Error::NonConvergence {
                estimate: value,
                error_bound: error,
            });
        }
        let worst = heap.pop().expect("heap is never empty");
        let m = 0.5 * (worst.a + worst.b);
        if !(worst.a < m && m < worst.b) {
            // Interval collapsed to floating-point resolution.
            return Err(Error::NonConvergence {
                estimate: value,
                error_bound: error,
            });
        }
        let left = Segment::new(&mut f, worst.a, m, worst.halves.0);
        let right = Segment::new(&mut f, m, worst.b, worst.halves.1);
        value += left.value + right.value - worst.value;
        error += left.error + right.error - worst.error;
        heap.push(left);
        heap.push(right);
        splits += 1;
        if splits.is_multiple_of(256) {
            // Refresh the running sums to keep cancellation drift out of the error test.
            (value, error) = heap.iter().fold((0.0, 0.0), |(v, e), s| (v + s.value, e + s.error));
        }
    }
}

/// Complex-valued integrand, integrated as two real quadratures.
pub fn integrate_complex<F: FnMut(f64) -> Complex64>(
    mut f: F,
    points: &[f64],
    cfg: &QuadConfig,
) -> Result<Complex64> {
    let re = integrate_breaks(|t| f(t).re, points, cfg)?;
    let im = integrate_breaks(|t| f(t).im, points, cfg)?;
    Ok(Complex64::new(re, im))
}

/// ∫ over [a, mu_cut] of an integrand carrying an e^{−μ²} weight.
pub fn integrate_gaussian_tail<F: FnMut(f64) -> f64>(f: F, a: f64, cfg: &QuadConfig) -> Result<f64> {
    integrate(f, a, cfg.mu_cut, cfg)
}

/// Cauchy principal value PV ∫_a^b g(t)/(t − s) dt for a < s < b.
pub fn integrate_pv<G: FnMut(f64) -> f64>(
    g: G,
    a: f64,
    b: f64,
    s: f64,
    cfg: &QuadConfig,
) -> Result<f64> {
    integrate_pv_breaks(g, &[a, b], s, cfg)
}

/// Principal value with extra panel edges; `s` must lie strictly inside the
/// outer interval and is inserted as an edge.
pub fn integrate_pv_breaks<G: FnMut(f64) -> f64>(
    mut g: G,
    points: &[f64],
    s: f64,
    cfg: &QuadConfig,
) -> Result<f64> {
    let (a, b) = match (points.first(), points.last()) {
        (Some(&a), Some(&b)) if points.len() >= 2 => (a, b),
        _ => return Err(Error::domain("principal value needs an interval")),
    };
    if !(a < s && s < b) {
        return Err(Error::domain(format!(
            "singular point {s} must lie strictly inside ({a}, {b})"
        )));
    }
    let gs = g(s);
    let mut edges: Vec<f64> = points.to_vec();
    edges.push(s);
    edges.sort_by(f64::total_cmp);
    edges.dedup();
    let regular = integrate_breaks(
        |t| {
            let d = t - s;
            if d == 0.0 {
                0.0
            } else {
                (g(t) - gs) / d
            }
        },
        &edges,
        cfg,
    )?;
    Ok(regular + gs * ((b - s) / (s - a)).ln())
}

const DAWSON_SERIES_LIMIT: f64 = 6.0;

/// Dawson's integral F(x) = e^{−x²}∫₀^x e^{t²} dt.
///
/// For |x| ≤ 6 the positive-term series e^{−x²} Σ x^{2n+1}/(n!(2n+1)) is
/// summed (no cancellation); beyond that the asymptotic series
/// 1/(2x)·Σ (2k−1)!!/(2x²)^k, whose smallest term is below 10⁻¹⁶.
pub fn dawson(x: f64) -> f64 {
    let ax = x.abs();
    if ax == 0.0 {
        return 0.0;
    }
    let value = if ax <= DAWSON_SERIES_LIMIT {
        let x2 = ax * ax;
        let mut term = ax;
        let mut sum = ax;
        let mut n = 0.0;
        loop {
            n += 1.0;
            term *= x2 / n;
            let contrib = term / (2.0 * n + 1.0);
            sum += contrib;
            if contrib < 1e-17 * sum {
                break;
            }
        }
        (-x2).exp() * sum
    } else {
        let inv = 1.0 / (2.0 * ax * ax);
        let mut term = 1.0;
        let mut sum = 1.0;
        let mut k = 0.0;
        loop {
            k += 1.0;
            let next = term * (2.0 * k - 1.0) * inv;
            if next >= term || next < 1e-18 {
                break;
            }
            term = next;
            sum += term;
        }
        sum / (2.0 * ax)
    };
    value.copysign(x)
}
