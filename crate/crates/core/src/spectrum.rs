//! Continuous spectrum and the half-space solution.
//!
//! Eigenfunctions of the characteristic equation, in the sense of distributions:
//!
//! ```text
//! Φ(η, μ) = (η/√π)(3/2 − μ²) P 1/(η − μ) + e^{η²} λ(η) δ(η − μ)
//! ```
//!
//! The solution is h(x, μ) = h_as(x, μ) + ∫₀^∞ e^{−x/η} Φ(η, μ) A(η) dη with
//!
//! ```text
//! A(η) = [(V₁ + η)g_T − ε_T] e^{−η²} / (x̂(η)|λ⁺(η)|)
//! N(z) = (1/√π) ∫₀^∞ η A(η)/(η − z) dη,   (z² − 3/2)N(z) = h_as(0, z) + (C₀ + C₁z)/X(z)
//! ```
//!
//! Integrals over η use a fixed composite Gauss–Legendre grid ([`SpectralBasis`])
//! with x̂ and |λ⁺| cached at the nodes.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::jumps::{h_asymptotic, jump_coefficients, solve_jumps, Convention, JumpCoefficients, JumpResult, ProblemInput};
use crate::numerics::{integrate_pv_breaks, legendre_rule, QuadConfig};
use crate::riemann::RiemannData;
use crate::specfun::{lambda, lambda_plus, MU1, SQRT_PI};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EigenfunctionParts {
    pub eta: f64,
    /// e^{η²}λ(η), the weight of δ(η − μ).
    pub delta_weight: f64,
}

impl EigenfunctionParts {
    /// (η/√π)(3/2 − μ²)/(η − μ), to be read as a principal value.
    pub fn pv_part(&self, mu: f64) -> f64 {
        self.eta / SQRT_PI * (1.5 - mu * mu) / (self.eta - mu)
    }
}

pub fn phi_parts(eta: f64) -> Result<EigenfunctionParts> {
    if !(eta > 0.0) || !eta.is_finite() {
        return Err(Error::domain(format!("eigenfunction needs eta > 0, got {eta}")));
    }
    Ok(EigenfunctionParts {
        eta,
        delta_weight: (eta * eta).exp() * lambda(Complex64::new(eta, 0.0)).re,
    })
}

/// (n₀, n₁, n₂) = ∫ e^{−μ²} μ^k Φ(η, μ) dμ for k = 0, 1, 2.
pub fn eigenfunction_moments(eta: f64, quad: &QuadConfig) -> Result<[f64; 3]> {
    let parts = phi_parts(eta)?;
    let l = quad.mu_cut.max(eta + 1.0);
    let lam = lambda(Complex64::new(eta, 0.0)).re;
    let mut out = [0.0; 3];
    for (k, slot) in out.iter_mut().enumerate() {
        // (η/√π) PV∫ g/(η − μ) = −(η/√π) PV∫ g/(μ − η)
        let g = |mu: f64| (-mu * mu).exp() * mu.powi(k as i32) * (1.5 - mu * mu);
        let pv = integrate_pv_breaks(g, &[-l, -MU1, 0.0, MU1, l], eta, quad)?;
        // The δ term contributes e^{η²}λ(η)·e^{−η²}η^k without forming e^{η²}.
        *slot = -parts.eta / SQRT_PI * pv + lam * eta.powi(k as i32);
    }
    Ok(out)
}

/// Composite Gauss–Legendre grid on [0, cut]: geometric panels towards 0,
/// graded panels beyond μ₁.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectralBasis {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
    /// x̂(η) at the nodes.
    pub x_hat: Vec<f64>,
    /// e^{−η²}/(x̂(η)|λ⁺(η)|) at the nodes, so that A = driver·core.
    pub core: Vec<f64>,
    pub cut: f64,
}

const PANEL_NODES: usize = 16;
const PANELS_EACH_SIDE: usize = 16;

impl SpectralBasis {
    pub const NODES: usize = 2 * PANEL_NODES * PANELS_EACH_SIDE;

    pub fn new(rd: &RiemannData) -> Result<Self> {
        let cut = rd.cut();
        let mut edges = vec![0.0];
        for k in (0..PANELS_EACH_SIDE).rev() {
            edges.push(MU1 * 0.5f64.powi(k as i32));
        }
        for k in 1..=PANELS_EACH_SIDE {
            let t = k as f64 / PANELS_EACH_SIDE as f64;
            edges.push(MU1 + (cut - MU1) * t.powf(1.5));
        }
        let rule = legendre_rule(PANEL_NODES);
        let mut nodes = Vec::with_capacity(Self::NODES);
        let mut weights = Vec::with_capacity(Self::NODES);
        for w in edges.windows(2) {
            let (h, m) = (0.5 * (w[1] - w[0]), 0.5 * (w[0] + w[1]));
            for &(x, wt) in &rule {
                nodes.push(m + h * x);
                weights.push(h * wt);
            }
        }
        let x_hat = nodes
            .par_iter()
            .map(|&eta| rd.x_hat(eta))
            .collect::<Result<Vec<f64>>>()?;
        let core: Vec<f64> = nodes
            .iter()
            .zip(&x_hat)
            .map(|(&eta, &x)| (-eta * eta).exp() / (x * lambda_plus(eta).norm()))
            .collect();
        if core.iter().any(|c| !(c.is_finite() && *c >= 0.0)) {
            return Err(Error::Internal("spectral kernel is not positive and finite".into()));
        }
        Ok(SpectralBasis {
            nodes,
            weights,
            x_hat,
            core,
            cut,
        })
    }

    /// m_k(x) = (1/√π)∫₀^∞ e^{−x/η−η²} η^k / (x̂(η)|λ⁺(η)|) dη.
    pub fn kernel(&self, x: f64, k: i32) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .zip(&self.core)
            .map(|((&eta, &w), &c)| w * decay(x, eta) * eta.powi(k) * c)
            .sum::<f64>()
            / SQRT_PI
    }
}

/// e^{−x/η}, taken as 1 at x = 0.
fn decay(x: f64, eta: f64) -> f64 {
    if x == 0.0 {
        1.0
    } else {
        (-x / eta).exp()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectralCoefficient {
    pub eta: f64,
    pub a_value: f64,
    /// η is within 10⁻³ of μ₁, where the sin θ form is a removable 0/0.
    pub regular: bool,
}

/// The half-space solution for one driver and convention.
#[derive(Debug, Clone)]
pub struct HalfSpaceSolution<'a> {
    pub rd: &'a RiemannData,
    pub basis: &'a SpectralBasis,
    pub input: ProblemInput,
    pub coefficients: JumpCoefficients,
    pub jumps: JumpResult,
    /// Overall sign of A(η), chosen by the boundary residual.
    pub a_sign: f64,
    /// A(η) at the basis nodes.
    a_nodes: Vec<f64>,
}

/// Velocities at which the two candidate signs of A are compared.
const SIGN_PROBES: [f64; 3] = [0.3, 0.8, 2.0];

impl<'a> HalfSpaceSolution<'a> {
    /// Solve for the jumps and fix the sign of A by the boundary residual.
    pub fn new(
        rd: &'a RiemannData,
        basis: &'a SpectralBasis,
        input: ProblemInput,
        convention: Convention,
    ) -> Result<Self> {
        input.validate()?;
        let coefficients = jump_coefficients(rd, convention)?;
        let jumps = solve_jumps(&input, &coefficients, rd);
        let plus = Self::with_sign(rd, basis, input, coefficients, jumps, 1.0);
        if input.is_zero() {
            return Ok(plus);
        }
        let minus = Self::with_sign(rd, basis, input, coefficients, jumps, -1.0);
        let score = |s: &Self| -> Result<f64> {
            SIGN_PROBES
                .iter()
                .map(|&mu| s.boundary_residual(mu))
                .sum::<Result<f64>>()
        };
        if score(&minus)? < score(&plus)? {
            Ok(minus)
        } else {
            Ok(plus)
        }
    }

    pub fn with_sign(
        rd: &'a RiemannData,
        basis: &'a SpectralBasis,
        input: ProblemInput,
        coefficients: JumpCoefficients,
        jumps: JumpResult,
        a_sign: f64,
    ) -> Self {
        let mut s = HalfSpaceSolution {
            rd,
            basis,
            input,
            coefficients,
            jumps,
            a_sign,
            a_nodes: Vec::new(),
        };
        s.a_nodes = basis
            .nodes
            .iter()
            .zip(&basis.core)
            .map(|(&eta, &c)| a_sign * s.driver(eta) * c)
            .collect();
        s
    }

    /// (V₁ + η)g_T − ε_T = C₀ + C₁η.
    pub fn driver(&self, eta: f64) -> f64 {
        self.jumps.c0 + self.jumps.c1 * eta
    }

    /// A(η) in the modulus form, regular at μ₁.
    pub fn a_coefficient(&self, eta: f64) -> Result<SpectralCoefficient> {
        if !(eta > 0.0) {
            return Err(Error::domain(format!("A(eta) needs eta > 0, got {eta}")));
        }
        let d = self.driver(eta);
        let a_value = if d == 0.0 {
            0.0
        } else {
            self.a_sign * d * (-eta * eta).exp() / (self.rd.x_hat(eta)? * lambda_plus(eta).norm())
        };
        Ok(SpectralCoefficient {
            eta,
            a_value,
            regular: (eta - MU1).abs() < 1e-3,
        })
    }

    /// A(η) = −driver·sin θ/(√π η x̂(η)(η² − 3/2)); singular in form at μ₁.
    pub fn a_coefficient_sine_form(&self, eta: f64) -> Result<f64> {
        if !(eta > 0.0) || eta == MU1 {
            return Err(Error::domain(format!("sine form undefined at eta = {eta}")));
        }
        let theta = self.rd.theta_table.theta(eta);
        Ok(-self.a_sign * self.driver(eta) * theta.sin()
            / (SQRT_PI * eta * self.rd.x_hat(eta)? * (eta * eta - 1.5)))
    }

    /// e^{μ²}λ(μ)A(μ) for μ > 0, assembled as driver·cos θ/x̂.
    fn discrete_weight(&self, mu: f64, x_hat: f64) -> f64 {
        let l = lambda_plus(mu);
        self.a_sign * self.driver(mu) * (l.re / l.norm()) / x_hat
    }

    /// (1/√π)∫₀^∞ e^{−x/η} ηA(η)/(η − μ) dη, as a principal value for 0 < μ < cut.
    pub fn continuum_integral(&self, x: f64, mu: f64) -> Result<f64> {
        let x_hat = if mu > 0.0 && mu < self.basis.cut {
            Some(self.rd.x_hat(mu)?)
        } else {
            None
        };
        Ok(self.continuum_with(x, mu, x_hat))
    }

    /// `x_hat` must be x̂(μ) whenever 0 < μ < cut.
    fn continuum_with(&self, x: f64, mu: f64, x_hat: Option<f64>) -> f64 {
        let b = self.basis;
        let f = |j: usize| decay(x, b.nodes[j]) * b.nodes[j] * self.a_nodes[j];
        let sum = match x_hat {
            Some(xh) if mu > 0.0 && mu < b.cut => {
                let a_mu = self.a_sign * self.driver(mu) * (-mu * mu).exp()
                    / (xh * lambda_plus(mu).norm());
                let fs = decay(x, mu) * mu * a_mu;
                let mut acc = 0.0;
                let last = b.nodes.len() - 1;
                for j in 0..=last {
                    let d = b.nodes[j] - mu;
                    acc += b.weights[j]
                        * if d != 0.0 {
                            (f(j) - fs) / d
                        } else {
                            // The limit is f′(μ); take it from the neighbours.
                            let (l, r) = (j.saturating_sub(1), (j + 1).min(last));
                            (f(r) - f(l)) / (b.nodes[r] - b.nodes[l])
                        };
                }
                acc + fs * ((b.cut - mu) / mu).ln()
            }
            _ => (0..b.nodes.len())
                .map(|j| b.weights[j] * f(j) / (b.nodes[j] - mu))
                .sum(),
        };
        sum / SQRT_PI
    }

    /// |h_as(0, μ) + e^{μ²}λ(μ)A(μ) + (3/2 − μ²)(1/√π)PV∫ηA/(η − μ) dη| for μ > 0.
    pub fn boundary_residual(&self, mu: f64) -> Result<f64> {
        if !(mu > 0.0) {
            return Err(Error::domain(format!("boundary residual needs mu > 0, got {mu}")));
        }
        if self.input.is_zero() {
            return Ok(0.0);
        }
        Ok(self.h_with(0.0, mu, Some(self.rd.x_hat(mu)?)).abs())
    }

    /// h(x, μ) for x ≥ 0.
    pub fn h_distribution(&self, x: f64, mu: f64) -> Result<f64> {
        if !(x >= 0.0) {
            return Err(Error::domain(format!("h needs x >= 0, got {x}")));
        }
        if self.input.is_zero() {
            return Ok(0.0);
        }
        let x_hat = if mu > 0.0 {
            Some(self.rd.x_hat(mu)?)
        } else {
            None
        };
        Ok(self.h_with(x, mu, x_hat))
    }

    /// h(x, μ) with x̂(μ) precomputed for μ > 0 (ignored for μ ≤ 0).
    pub fn h_with(&self, x: f64, mu: f64, x_hat: Option<f64>) -> f64 {
        let mut h = h_asymptotic(x, mu, &self.jumps, &self.input);
        if self.input.is_zero() {
            return h;
        }
        if let (true, Some(xh)) = (mu > 0.0, x_hat) {
            h += decay(x, mu) * self.discrete_weight(mu, xh);
        }
        h + (1.5 - mu * mu) * self.continuum_with(x, mu, x_hat)
    }

    /// N(z) by quadrature over the basis, subtracting at s = clamp(Re z, 0, cut).
    pub fn n_function_quadrature(&self, z: Complex64) -> Result<Complex64> {
        if z.im == 0.0 && z.re >= 0.0 {
            return Err(Error::domain(format!(
                "N is evaluated on the cut at {z}; use the boundary-value forms"
            )));
        }
        let b = self.basis;
        let s = z.re.clamp(0.0, b.cut);
        let fs = if s > 0.0 && s < b.cut {
            s * self.a_coefficient(s)?.a_value
        } else {
            0.0
        };
        let mut acc = Complex64::new(0.0, 0.0);
        for j in 0..b.nodes.len() {
            let f = b.nodes[j] * self.a_nodes[j];
            acc += b.weights[j] * (f - fs) / (b.nodes[j] - z);
        }
        let logs = (b.cut - z).ln() - (-z).ln();
        Ok((acc + fs * logs) / SQRT_PI)
    }

    /// N(z) = [h_as(0, z) + (C₀ + C₁z)/X(z)]/(z² − 3/2).
    pub fn n_function(&self, z: Complex64) -> Result<Complex64> {
        let (r, inp) = (&self.jumps, &self.input);
        let h_as = r.eps_n + r.eps_t + 2.0 * inp.u * z + (z * z - 1.5) * (r.eps_t - inp.g_t * z);
        if self.input.is_zero() {
            return Ok(Complex64::new(0.0, 0.0));
        }
        let x = self.rd.x_function(z)?;
        Ok((h_as + (r.c0 + r.c1 * z) / x) / (z * z - 1.5))
    }

    /// ∫₀^∞ e^{−x/η} A(η) dη.
    pub fn a_moment(&self, x: f64) -> f64 {
        let b = self.basis;
        (0..b.nodes.len())
            .map(|j| b.weights[j] * decay(x, b.nodes[j]) * self.a_nodes[j])
            .sum()
    }
}

/// Tolerances used for the eigenfunction moment checks.
pub fn moment_quad() -> QuadConfig {
    QuadConfig {
        abs_tol: 1e-13,
        rel_tol: 1e-13,
        ..QuadConfig::default()
    }
}
