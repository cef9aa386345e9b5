//! Density, velocity and temperature across the half-space.
//!
//! With J(x) = (1/√π)∫₀^∞ e^{−x/η}A(η)dη = (V₁g_T − ε_T)m₀(x) + g_T m₁(x):
//!
//! ```text
//! δn/n₀ = ε_n − g_T x + J(x)
//! U(x)  = U
//! δT/T₀ = ε_T + g_T x − J(x) = ε_T(1 + m₀) + g_T(x − V₁m₀ − m₁)
//! ```
//!
//! The same fields are also computed as direct velocity moments of h(x, μ)
//! ([`MomentGrid`]) and from the tabulated closed forms
//! δn = [K_TT(1 − m₀) − x + V₁m₀ + m₁]g_T + K_TU(1 − m₀)(2U),
//! δT = [x − m₁ + K_TT(1 + m₀)]g_T + K_TU(1 + m₀)(2U).

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::legendre_rule;
use crate::riemann::RiemannData;
use crate::specfun::{MU1, SQRT_PI};
use crate::spectrum::HalfSpaceSolution;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProfilePoint {
    pub x: f64,
    pub delta_n: f64,
    pub u: f64,
    #[serde(rename = "delta_T")]
    pub delta_t: f64,
    pub m0: f64,
    pub m1: f64,
}

/// m_k(x), k ∈ {0, 1}.
pub fn m_kernel(sol: &HalfSpaceSolution<'_>, x: f64, k: u8) -> Result<f64> {
    if !(x >= 0.0) {
        return Err(Error::domain(format!("m_k needs x >= 0, got {x}")));
    }
    if k > 1 {
        return Err(Error::domain(format!("m_k is defined for k = 0, 1 (got {k})")));
    }
    Ok(sol.basis.kernel(x, k as i32))
}

/// J(x) = (1/√π)∫₀^∞ e^{−x/η}A(η)dη.
fn continuum_moment(sol: &HalfSpaceSolution<'_>, x: f64) -> f64 {
    sol.a_moment(x) / SQRT_PI
}

pub fn density_profile(sol: &HalfSpaceSolution<'_>, x: f64) -> f64 {
    sol.jumps.eps_n - sol.input.g_t * x + continuum_moment(sol, x)
}

pub fn velocity_profile(sol: &HalfSpaceSolution<'_>, _x: f64) -> f64 {
    sol.input.u
}

pub fn temperature_profile(sol: &HalfSpaceSolution<'_>, x: f64) -> f64 {
    sol.jumps.eps_t + sol.input.g_t * x - continuum_moment(sol, x)
}

/// The tabulated closed form for δn/n₀ in terms of K_TT, K_TU and m_k.
pub fn density_profile_published(sol: &HalfSpaceSolution<'_>, x: f64) -> f64 {
    let (m0, m1) = (sol.basis.kernel(x, 0), sol.basis.kernel(x, 1));
    let k = &sol.coefficients;
    (k.k_tt * (1.0 - m0) - x + sol.rd.v1() * m0 + m1) * sol.input.g_t
        + k.k_tu * (1.0 - m0) * 2.0 * sol.input.u
}

/// The tabulated closed form for δT/T₀ in terms of K_TT, K_TU and m_k.
pub fn temperature_profile_published(sol: &HalfSpaceSolution<'_>, x: f64) -> f64 {
    let (m0, m1) = (sol.basis.kernel(x, 0), sol.basis.kernel(x, 1));
    let k = &sol.coefficients;
    (x - m1 + k.k_tt * (1.0 + m0)) * sol.input.g_t + k.k_tu * (1.0 + m0) * 2.0 * sol.input.u
}

pub fn profile_point(sol: &HalfSpaceSolution<'_>, x: f64) -> Result<ProfilePoint> {
    Ok(ProfilePoint {
        x,
        delta_n: density_profile(sol, x),
        u: velocity_profile(sol, x),
        delta_t: temperature_profile(sol, x),
        m0: m_kernel(sol, x, 0)?,
        m1: m_kernel(sol, x, 1)?,
    })
}

/// Profile rows for every x, in input order.
pub fn profile(sol: &HalfSpaceSolution<'_>, xs: &[f64]) -> Result<Vec<ProfilePoint>> {
    xs.par_iter().map(|&x| profile_point(sol, x)).collect()
}

/// `points` values from `x_min` to `x_max`, equally spaced in log x.
pub fn geometric_grid(x_min: f64, x_max: f64, points: usize) -> Result<Vec<f64>> {
    if !(x_min > 0.0 && x_max > x_min && x_max.is_finite()) || points < 2 {
        return Err(Error::domain(format!(
            "geometric grid needs 0 < x_min < x_max and at least 2 points \
             (got {x_min}, {x_max}, {points})"
        )));
    }
    let r = (x_max / x_min).ln() / (points - 1) as f64;
    let mut xs: Vec<f64> = (0..points).map(|i| x_min * (r * i as f64).exp()).collect();
    xs[points - 1] = x_max;
    Ok(xs)
}

/// The default profile grid: 64 points from 10⁻² to 20.
pub fn default_grid() -> Vec<f64> {
    geometric_grid(1e-2, 20.0, 64).expect("valid default grid")
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DirectMoments {
    /// (1/√π)∫e^{−μ²}h dμ
    pub density: f64,
    /// (1/√π)∫e^{−μ²}μh dμ
    pub velocity: f64,
    /// (2/√π)∫e^{−μ²}(μ² − 1/2)h dμ
    pub temperature: f64,
}

/// Composite Gauss–Legendre rule on [−cut, cut] for velocity moments of h,
/// geometric towards μ = 0 from both sides, with x̂ cached at positive nodes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MomentGrid {
    nodes: Vec<f64>,
    weights: Vec<f64>,
    /// x̂(μ) for μ > 0, NaN otherwise.
    x_hat: Vec<f64>,
}

impl MomentGrid {
    pub fn new(rd: &RiemannData) -> Result<Self> {
        let cut = rd.cut();
        let mut half = vec![0.0];
        for k in (0..20).rev() {
            half.push(MU1 * 0.5f64.powi(k));
        }
        for k in 1..=16 {
            let t = k as f64 / 16.0;
            half.push(MU1 + (cut - MU1) * t.powf(1.5));
        }
        let mut edges: Vec<f64> = half.iter().rev().map(|&e| -e).collect();
        edges.extend_from_slice(&half[1..]);
        // 20-point panels: never coincident with the 16-point spectral nodes,
        // where the subtracted principal value would lose a term.
        let rule = legendre_rule(20);
        let mut nodes = Vec::new();
        let mut weights = Vec::new();
        for w in edges.windows(2) {
            let (h, m) = (0.5 * (w[1] - w[0]), 0.5 * (w[0] + w[1]));
            for &(x, wt) in &rule {
                nodes.push(m + h * x);
                weights.push(h * wt);
            }
        }
        let x_hat = nodes
            .par_iter()
            .map(|&mu| if mu > 0.0 { rd.x_hat(mu) } else { Ok(f64::NAN) })
            .collect::<Result<Vec<f64>>>()?;
        Ok(MomentGrid {
            nodes,
            weights,
            x_hat,
        })
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn direct_moments(&self, sol: &HalfSpaceSolution<'_>, x: f64) -> Result<DirectMoments> {
        if !(x >= 0.0) {
            return Err(Error::domain(format!("moments need x >= 0, got {x}")));
        }
        let (mut n, mut u, mut t) = (0.0, 0.0, 0.0);
        for ((&mu, &w), &xh) in self.nodes.iter().zip(&self.weights).zip(&self.x_hat) {
            let xh = (mu > 0.0).then_some(xh);
            let wh = w * (-mu * mu).exp() * sol.h_with(x, mu, xh);
            n += wh;
            u += wh * mu;
            t += wh * (mu * mu - 0.5);
        }
        Ok(DirectMoments {
            density: n / SQRT_PI,
            velocity: u / SQRT_PI,
            temperature: 2.0 * t / SQRT_PI,
        })
    }
}
