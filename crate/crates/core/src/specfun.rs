//! The dispersion function of the constant-frequency BGK equation.
//!
//! ```text
//! λ₀(z) = (1/√π) ∫ e^{−τ²} τ dτ/(τ − z)
//! λ(z)  = −1/2 + (3/2 − z²) λ₀(z)
//! ```
//!
//! On the real axis the boundary values are λ±(μ) = λ(μ) ± i√π μ e^{−μ²}(3/2 − μ²),
//! with λ(μ) the principal value, and θ(μ) = arg λ⁺(μ) is the continuous branch
//! with θ(0) = 0. θ increases monotonically from 0 through π at μ₁ = √(3/2) to
//! 2π at infinity.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{dawson, integrate_breaks, QuadConfig};

/// μ₁ = √(3/2), the positive zero of 3/2 − μ².
pub const MU1: f64 = 1.224_744_871_391_589;

pub const SQRT_PI: f64 = 1.772_453_850_905_516;

/// Beyond this modulus λ and λ₀ are summed from their asymptotic series.
const ASYMPTOTIC_RADIUS: f64 = 6.0;
/// Below this |Im z| the quadrature route is replaced by Taylor continuation
/// of the boundary value.
const NEAR_AXIS: f64 = 0.05;

fn specfun_quad() -> QuadConfig {
    QuadConfig {
        abs_tol: 1e-14,
        rel_tol: 1e-13,
        ..QuadConfig::default()
    }
}

/// λ₀ on the real axis, 1 − 2μF(μ) with F the Dawson integral.
pub fn lambda0_real(mu: f64) -> f64 {
    1.0 - 2.0 * mu * dawson(mu)
}

/// Gaussian moments (1/√π)∫τ^{2k}e^{−τ²} = (2k−1)!!/2^k.
fn gaussian_moment_ratio(k: usize) -> f64 {
    (2.0 * k as f64 - 1.0) / 2.0
}

/// Asymptotic series λ₀(z) ≈ −Σ_{k≥1} m_k z^{−2k}.
fn lambda0_series(z: Complex64) -> Complex64 {
    let w = (z * z).inv();
    let mut m = 0.5;
    let mut power = w;
    let mut sum = Complex64::new(0.0, 0.0);
    let mut last = f64::INFINITY;
    for k in 1..200 {
        if k > 1 {
            m *= gaussian_moment_ratio(k);
            power *= w;
        }
        let term = power * m;
        // Asymptotic series: stop at the smallest term.
        if term.norm() >= last {
            break;
        }
        last = term.norm();
        sum += term;
        if last < 1e-18 * sum.norm() {
            break;
        }
    }
    -sum
}

/// Asymptotic series λ(z) ≈ Σ_{k≥2} (k−1) m_k z^{−2k}; the leading 1/2 cancels
/// analytically, so no digits are lost to cancellation.
fn lambda_series(z: Complex64) -> Complex64 {
    let w = (z * z).inv();
    let mut m = 0.5;
    let mut power = w;
    let mut sum = Complex64::new(0.0, 0.0);
    let mut last = f64::INFINITY;
    for k in 2..200 {
        m *= gaussian_moment_ratio(k);
        power *= w;
        let term = power * (m * (k as f64 - 1.0));
        if term.norm() >= last {
            break;
        }
        last = term.norm();
        sum += term;
        if last < 1e-18 * sum.norm() {
            break;
        }
    }
    sum
}

/// Upper-half-plane continuation of Z(z) = (1/√π)∫e^{−t²}/(t−z)dt from the
/// boundary value at x = Re z, using Z′ = −2(1 + zZ) to generate Taylor
/// coefficients. Valid for 0 ≤ y ≲ 0.1.
fn plasma_z_near_axis(x: f64, y: f64) -> Complex64 {
    let d0 = Complex64::new(-2.0 * dawson(x), SQRT_PI * (-x * x).exp());
    let d1 = -2.0 - 2.0 * x * d0;
    // e_n = Z^{(n)}(x) y^n / n!, so that Z(x + iy) = Σ e_n iⁿ.
    let mut prev = d0;
    let mut cur = d1 * y;
    let i = Complex64::i();
    let mut ipow = i;
    let mut sum = d0 + cur * ipow;
    for n in 1..80 {
        let next = (cur * x + prev * y) * (-2.0 * y / (n as f64 + 1.0));
        prev = cur;
        cur = next;
        ipow *= i;
        sum += cur * ipow;
        if cur.norm() < 1e-18 && n > 2 {
            break;
        }
    }
    sum
}

fn lambda0_upper(z: Complex64) -> Complex64 {
    debug_assert!(z.im > 0.0);
    if z.norm() >= ASYMPTOTIC_RADIUS {
        return lambda0_series(z);
    }
    if z.im < NEAR_AXIS {
        return 1.0 + z * plasma_z_near_axis(z.re, z.im);
    }
    lambda0_quadrature(z)
}

fn lambda0_quadrature(z: Complex64) -> Complex64 {
    let cfg = specfun_quad();
    let cut = cfg.mu_cut;
    let mut edges = vec![-cut, 0.0, cut];
    if z.re.abs() < cut && z.re != 0.0 {
        edges.push(z.re);
        edges.sort_by(f64::total_cmp);
    }
    let integrand = |t: f64| (-t * t).exp() * t / Complex64::new(t - z.re, -z.im);
    let re = integrate_breaks(|t| integrand(t).re, &edges, &cfg);
    let im = integrate_breaks(|t| integrand(t).im, &edges, &cfg);
    match (re, im) {
        (Ok(re), Ok(im)) => Complex64::new(re, im) / SQRT_PI,
        // Quadrature at these tolerances only fails for pathological inputs;
        // the continuation is still accurate to a few digits there.
        _ => 1.0 + z * plasma_z_near_axis(z.re, z.im),
    }
}

/// λ₀(z) off the real axis (Cauchy integral), or the principal value on it.
pub fn lambda0_complex(z: Complex64) -> Complex64 {
    if z.im == 0.0 {
        Complex64::new(lambda0_real(z.re), 0.0)
    } else if z.im > 0.0 {
        lambda0_upper(z)
    } else {
        lambda0_upper(z.conj()).conj()
    }
}

/// Principal-value (real-axis) λ(μ) = (λ⁺ + λ⁻)/2.
pub fn lambda_pv(mu: f64) -> f64 {
    if mu.abs() >= ASYMPTOTIC_RADIUS {
        lambda_series(Complex64::new(mu, 0.0)).re
    } else {
        -0.5 + (1.5 - mu * mu) * lambda0_real(mu)
    }
}

/// λ(z) = −1/2 + (3/2 − z²)λ₀(z); principal value for real z.
pub fn lambda(z: Complex64) -> Complex64 {
    if z.im == 0.0 {
        return Complex64::new(lambda_pv(z.re), 0.0);
    }
    if z.norm() >= ASYMPTOTIC_RADIUS {
        let upper = if z.im > 0.0 { z } else { z.conj() };
        let v = lambda_series(upper);
        return if z.im > 0.0 { v } else { v.conj() };
    }
    -0.5 + (1.5 - z * z) * lambda0_complex(z)
}

/// Im λ⁺(μ) = √π μ e^{−μ²}(3/2 − μ²).
pub fn lambda_jump_half(mu: f64) -> f64 {
    SQRT_PI * mu * (-mu * mu).exp() * (1.5 - mu * mu)
}

/// Boundary value from above; λ⁻(μ) is its conjugate.
pub fn lambda_plus(mu: f64) -> Complex64 {
    Complex64::new(lambda_pv(mu), lambda_jump_half(mu))
}

/// sin θ(μ)/(3/2 − μ²) = √π μ e^{−μ²}/|λ⁺(μ)|, regular at μ₁.
pub fn sin_theta_over_q(mu: f64) -> f64 {
    SQRT_PI * mu * (-mu * mu).exp() / lambda_plus(mu).norm()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DispersionSample {
    pub mu: f64,
    pub lambda_pv: f64,
    pub lambda_plus: Complex64,
    pub theta: f64,
}

/// Monotone cubic (Fritsch–Carlson) interpolation, used as the branch
/// reference between unwrapped nodes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Interpolation {
    MonotoneCubic,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThetaTable {
    nodes: Vec<f64>,
    values: Vec<f64>,
    slopes: Vec<f64>,
    interpolation: Interpolation,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThetaGrid {
    pub upper: f64,
    pub base_nodes: usize,
    /// Maximum number of bisections of a single base interval.
    pub max_refinement: usize,
}

impl Default for ThetaGrid {
    fn default() -> Self {
        ThetaGrid {
            upper: 8.0,
            base_nodes: 2048,
            max_refinement: 30,
        }
    }
}

/// Largest phase step accepted between neighbouring nodes.
const UNWRAP_STEP: f64 = 0.5 * PI;

fn wrap(d: f64) -> f64 {
    let mut d = d % (2.0 * PI);
    if d > PI {
        d -= 2.0 * PI;
    } else if d <= -PI {
        d += 2.0 * PI;
    }
    d
}

fn raw_arg(mu: f64) -> f64 {
    let l = lambda_plus(mu);
    l.im.atan2(l.re)
}

impl ThetaTable {
    pub fn build(cfg: &QuadConfig) -> Result<Self> {
        Self::build_with(&ThetaGrid {
            upper: cfg.mu_cut,
            ..ThetaGrid::default()
        })
    }

    /// Unwrap arg λ⁺ along a uniform base grid refined geometrically towards μ₁.
    pub fn build_with(grid: &ThetaGrid) -> Result<Self> {
        if !(grid.upper > MU1) || grid.base_nodes < 2 {
            return Err(Error::InvalidConfig(format!(
                "theta grid must extend past mu1 with at least 2 nodes: {grid:?}"
            )));
        }
        let mut seeds: Vec<f64> = (0..grid.base_nodes)
            .map(|i| grid.upper * i as f64 / (grid.base_nodes - 1) as f64)
            .collect();
        // Geometric clustering around μ₁, where θ crosses π.
        for k in 1..=20 {
            let d = 0.05 * 0.5f64.powi(k);
            seeds.extend([MU1 - d, MU1 + d]);
        }
        seeds.push(MU1);
        seeds.sort_by(f64::total_cmp);
        seeds.dedup_by(|a, b| (*a - *b).abs() < 1e-15);

        let mut nodes = vec![seeds[0]];
        let mut values = vec![raw_arg(seeds[0])];
        if values[0].abs() > 1e-15 {
            return Err(Error::Internal(format!("arg λ⁺(0) = {} != 0", values[0])));
        }
        values[0] = 0.0;
        for &next in &seeds[1..] {
            let start = *nodes.last().unwrap();
            let mut stack = vec![(next, 0usize)];
            let mut left = start;
            while let Some((right, depth)) = stack.pop() {
                let step = wrap(raw_arg(right) - raw_arg(left));
                if step.abs() > UNWRAP_STEP {
                    if depth >= grid.max_refinement {
                        return Err(Error::ThetaResolution {
                            mu: left,
                            step,
                            depth,
                        });
                    }
                    stack.push((right, depth + 1));
                    stack.push((0.5 * (left + right), depth + 1));
                    continue;
                }
                let value = values.last().unwrap() + step;
                nodes.push(right);
                values.push(value);
                left = right;
            }
        }
        // Re-anchor every node to the exact atan2 branch nearest its unwrapped value.
        for (v, &mu) in values.iter_mut().zip(&nodes) {
            let a = raw_arg(mu);
            *v = a + 2.0 * PI * ((*v - a) / (2.0 * PI)).round();
        }
        let last = *values.last().unwrap();
        if (last - 2.0 * PI).abs() > 1e-6 {
            return Err(Error::Internal(format!(
                "theta does not reach 2π at mu = {}: {last}",
                grid.upper
            )));
        }
        if values.windows(2).any(|w| w[1] < w[0]) {
            return Err(Error::Internal("unwrapped theta is not monotone".into()));
        }
        let slopes = pchip_slopes(&nodes, &values);
        Ok(ThetaTable {
            nodes,
            values,
            slopes,
            interpolation: Interpolation::MonotoneCubic,
        })
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn interpolation(&self) -> Interpolation {
        self.interpolation
    }

    pub fn upper(&self) -> f64 {
        *self.nodes.last().unwrap()
    }

    /// Monotone cubic interpolant of the tabulated θ.
    pub fn interpolate(&self, mu: f64) -> f64 {
        let n = self.nodes.len();
        if mu <= self.nodes[0] {
            return self.values[0];
        }
        if mu >= self.nodes[n - 1] {
            return self.values[n - 1];
        }
        let i = self.nodes.partition_point(|&x| x <= mu) - 1;
        let (x0, x1) = (self.nodes[i], self.nodes[i + 1]);
        let h = x1 - x0;
        let t = (mu - x0) / h;
        let (y0, y1) = (self.values[i], self.values[i + 1]);
        let (d0, d1) = (self.slopes[i], self.slopes[i + 1]);
        let t2 = t * t;
        let t3 = t2 * t;
        (2.0 * t3 - 3.0 * t2 + 1.0) * y0
            + (t3 - 2.0 * t2 + t) * h * d0
            + (-2.0 * t3 + 3.0 * t2) * y1
            + (t3 - t2) * h * d1
    }

    /// Number of 2π turns to add to atan2 at μ to land on the continuous branch.
    fn branch(&self, mu: f64, arg: f64) -> f64 {
        ((self.interpolate(mu) - arg) / (2.0 * PI)).round()
    }

    /// θ(μ) for μ ≥ 0: exact atan2 of λ⁺ placed on the branch selected by the table.
    pub fn theta(&self, mu: f64) -> f64 {
        let a = raw_arg(mu);
        a + 2.0 * PI * self.branch(mu, a)
    }

    /// θ(μ) − 2π without the cancellation of forming θ first.
    pub fn theta_deficit(&self, mu: f64) -> f64 {
        let a = raw_arg(mu);
        let k = self.branch(mu, a);
        if k == 1.0 {
            a
        } else {
            a + 2.0 * PI * (k - 1.0)
        }
    }

    pub fn sample(&self, mu: f64) -> DispersionSample {
        DispersionSample {
            mu,
            lambda_pv: lambda_pv(mu),
            lambda_plus: lambda_plus(mu),
            theta: self.theta(mu),
        }
    }
}

fn pchip_slopes(x: &[f64], y: &[f64]) -> Vec<f64> {
    let n = x.len();
    let delta: Vec<f64> = (0..n - 1).map(|i| (y[i + 1] - y[i]) / (x[i + 1] - x[i])).collect();
    let mut d = vec![0.0; n];
    if n == 2 {
        d[0] = delta[0];
        d[1] = delta[0];
        return d;
    }
    for i in 1..n - 1 {
        let (a, b) = (delta[i - 1], delta[i]);
        if a * b <= 0.0 {
            d[i] = 0.0;
        } else {
            let h0 = x[i] - x[i - 1];
            let h1 = x[i + 1] - x[i];
            let w1 = 2.0 * h1 + h0;
            let w2 = h1 + 2.0 * h0;
            d[i] = (w1 + w2) / (w1 / a + w2 / b);
        }
    }
    let end = |h0: f64, h1: f64, d0: f64, d1: f64| {
        let s = ((2.0 * h0 + h1) * d0 - h0 * d1) / (h0 + h1);
        if s * d0 <= 0.0 {
            0.0
        } else if d0 * d1 <= 0.0 && s.abs() > 3.0 * d0.abs() {
            3.0 * d0
        } else {
            s
        }
    };
    d[0] = end(x[1] - x[0], x[2] - x[1], delta[0], delta[1]);
    d[n - 1] = end(
        x[n - 1] - x[n - 2],
        x[n - 2] - x[n - 3],
        delta[n - 2],
        delta[n - 3],
    );
    d
}
