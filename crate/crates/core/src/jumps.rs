//! Temperature and concentration jumps.
//!
//! The general solution (z² − 3/2)N(z) = h_as(0, z) + (C₀ + C₁z)/X(z) has a
//! third-order pole at infinity; C₁ = g_T and C₀ = V₁g_T − ε_T lower it to one.
//! Regularity of N at ±μ₁ then gives two linear conditions
//!
//! ```text
//! C₀ + C₁μ₁ + X(μ₁)(ε_n + ε_T + 2Uμ₁) = 0
//! C₀ − C₁μ₁ + X(−μ₁)(ε_n + ε_T − 2Uμ₁) = 0
//! ```
//!
//! which fix ε_T = K_TT·g_T + K_TU·(2U) and ε_n = K_nT·g_T + K_nU·(2U).

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::riemann::{HalfSum, RiemannData};
use crate::specfun::MU1;

/// How X(μ₁) enters the pole conditions and which formulas produce K_nT, K_nU.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Convention {
    /// X(μ₁) = +x̂(μ₁) and the tabulated closed forms for all four coefficients.
    #[default]
    Published,
    /// X(μ₁) = +x̂(μ₁), with K_nT, K_nU from solving the pole conditions.
    Magnitude,
    /// X(μ₁) = (X⁺ + X⁻)/2 = −x̂(μ₁), solving the pole conditions.
    BoundaryValue,
}

impl Convention {
    pub const ALL: [Convention; 3] = [
        Convention::Published,
        Convention::Magnitude,
        Convention::BoundaryValue,
    ];

    pub fn half_sum(self) -> HalfSum {
        match self {
            Convention::Published | Convention::Magnitude => HalfSum::Magnitude,
            Convention::BoundaryValue => HalfSum::BoundaryValue,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Convention::Published => "published",
            Convention::Magnitude => "magnitude",
            Convention::BoundaryValue => "boundary-value",
        }
    }
}

impl std::fmt::Display for Convention {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for Convention {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Convention::ALL
            .into_iter()
            .find(|c| c.name() == s)
            .ok_or_else(|| {
                Error::InvalidConfig(format!(
                    "unknown convention {s:?}; expected published, magnitude or boundary-value"
                ))
            })
    }
}

/// Far-field drivers: g_T = (d ln T/dx) at infinity and the mass velocity U.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct ProblemInput {
    pub g_t: f64,
    pub u: f64,
}

impl ProblemInput {
    pub fn new(g_t: f64, u: f64) -> Self {
        ProblemInput { g_t, u }
    }

    pub fn validate(&self) -> Result<()> {
        if self.g_t.is_finite() && self.u.is_finite() {
            Ok(())
        } else {
            Err(Error::domain(format!("non-finite drivers: {self:?}")))
        }
    }

    pub fn is_zero(&self) -> bool {
        self.g_t == 0.0 && self.u == 0.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct JumpCoefficients {
    pub k_tt: f64,
    pub k_tu: f64,
    pub k_nt: f64,
    pub k_nu: f64,
    pub convention: Convention,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct JumpResult {
    pub eps_t: f64,
    pub eps_n: f64,
    pub c0: f64,
    pub c1: f64,
    pub convention: Convention,
}

/// X(μ₁)X(−μ₁), snapped to the exact ±2/3 when the computed product confirms it.
fn product(xp: f64, xm: f64) -> f64 {
    let p = xp * xm;
    let exact = 2.0 / 3.0 * p.signum();
    if (p - exact).abs() < 1e-6 {
        exact
    } else {
        p
    }
}

pub fn jump_coefficients(rd: &RiemannData, convention: Convention) -> Result<JumpCoefficients> {
    let xp = rd.x_at_mu1(convention.half_sum());
    let xm = rd.x_hat_pair().1;
    let v1 = rd.v1();
    let d = xp - xm;
    if d == 0.0 || !d.is_finite() {
        return Err(Error::Internal(format!(
            "degenerate pole conditions: X(mu1) = {xp}, X(-mu1) = {xm}"
        )));
    }
    let p = product(xp, xm);
    let k_tt = v1 - MU1 * (xp + xm) / d;
    let k_tu = -2.0 * MU1 * p / d;
    let (k_nt, k_nu) = match convention {
        Convention::Published => (
            v1 + MU1 * (xp + xm - 2.0) / d,
            -MU1 * (xp + xm - 2.0 * p) / d,
        ),
        // From the −μ₁ condition: ε_n + ε_T = (ε_T − (V₁ − μ₁)g_T)/X(−μ₁) + 2Uμ₁.
        Convention::Magnitude | Convention::BoundaryValue => (
            k_tt * (1.0 / xm - 1.0) - (v1 - MU1) / xm,
            k_tu * (1.0 / xm - 1.0) + MU1,
        ),
    };
    Ok(JumpCoefficients {
        k_tt,
        k_tu,
        k_nt,
        k_nu,
        convention,
    })
}

pub fn solve_jumps(input: &ProblemInput, kc: &JumpCoefficients, rd: &RiemannData) -> JumpResult {
    let two_u = 2.0 * input.u;
    let eps_t = kc.k_tt * input.g_t + kc.k_tu * two_u;
    let eps_n = kc.k_nt * input.g_t + kc.k_nu * two_u;
    JumpResult {
        eps_t,
        eps_n,
        c0: rd.v1() * input.g_t - eps_t,
        c1: input.g_t,
        convention: kc.convention,
    }
}

/// Residuals of the two pole conditions, with X(μ₁) taken per the result's convention.
pub fn pole_condition_residuals(
    result: &JumpResult,
    input: &ProblemInput,
    rd: &RiemannData,
) -> (f64, f64) {
    pole_condition_residuals_with(result, input, rd, result.convention.half_sum())
}

pub fn pole_condition_residuals_with(
    result: &JumpResult,
    input: &ProblemInput,
    rd: &RiemannData,
    half_sum: HalfSum,
) -> (f64, f64) {
    let xp = rd.x_at_mu1(half_sum);
    let xm = rd.x_hat_pair().1;
    let s = result.eps_n + result.eps_t;
    let plus = result.c0 + result.c1 * MU1 + xp * (s + 2.0 * input.u * MU1);
    let minus = result.c0 - result.c1 * MU1 + xm * (s - 2.0 * input.u * MU1);
    (plus.abs(), minus.abs())
}

/// Chapman–Enskog asymptote ε_n + ε_T + 2Uμ + (μ² − 3/2)[ε_T + g_T(x − μ)].
pub fn h_asymptotic(x: f64, mu: f64, result: &JumpResult, input: &ProblemInput) -> f64 {
    result.eps_n
        + result.eps_t
        + 2.0 * input.u * mu
        + (mu * mu - 1.5) * (result.eps_t + input.g_t * (x - mu))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::{hermite_rule, QuadConfig};
    use approx::assert_abs_diff_eq;
    use std::sync::OnceLock;

    fn data() -> &'static RiemannData {
        static RD: OnceLock<RiemannData> = OnceLock::new();
        RD.get_or_init(|| RiemannData::build(&QuadConfig::default()).unwrap())
    }

    fn solve(g_t: f64, u: f64, c: Convention) -> (ProblemInput, JumpResult) {
        let rd = data();
        let input = ProblemInput::new(g_t, u);
        let kc = jump_coefficients(rd, c).unwrap();
        (input, solve_jumps(&input, &kc, rd))
    }

    #[test]
    fn tabulated_coefficients() {
        let kc = jump_coefficients(data(), Convention::Published).unwrap();
        assert_abs_diff_eq!(kc.k_tt, 1.3068, epsilon = 1e-3);
        assert_abs_diff_eq!(kc.k_tu, -0.4443, epsilon = 1e-3);
        assert_abs_diff_eq!(kc.k_nt.abs(), 3.3207, epsilon = 1e-3);
        assert_abs_diff_eq!(kc.k_nu, -0.8958, epsilon = 1e-3);
    }

    #[test]
    fn pole_condition_coefficients() {
        let m = jump_coefficients(data(), Convention::Magnitude).unwrap();
        let p = jump_coefficients(data(), Convention::Published).unwrap();
        assert_eq!((m.k_tt, m.k_tu), (p.k_tt, p.k_tu));
        assert_abs_diff_eq!(m.k_nu, -0.8958, epsilon = 1e-3);
        let b = jump_coefficients(data(), Convention::BoundaryValue).unwrap();
        // Pinned from an independent solve of the same 2×2 system.
        assert_abs_diff_eq!(b.k_tt, 1.527_810_8, epsilon = 1e-6);
        assert_abs_diff_eq!(b.k_tu, -0.406_050_3, epsilon = 1e-6);
        assert_abs_diff_eq!(b.k_nt, -0.918_735_3, epsilon = 1e-6);
        assert_abs_diff_eq!(b.k_nu, -0.713_183_6, epsilon = 1e-6);
    }

    #[test]
    fn solve_examples() {
        let (_, r) = solve(0.0, 0.0, Convention::Published);
        assert_eq!((r.eps_t, r.eps_n, r.c0, r.c1), (0.0, 0.0, 0.0, 0.0));
        let (_, r) = solve(1.0, 0.0, Convention::Published);
        assert_abs_diff_eq!(r.eps_t, 1.3068, epsilon = 1e-3);
        assert_eq!(r.c1, 1.0);
        assert_abs_diff_eq!(r.c0, data().v1() - r.eps_t, epsilon = 1e-15);
        let (_, r) = solve(0.0, 0.5, Convention::Published);
        assert_abs_diff_eq!(r.eps_t, -0.4443, epsilon = 1e-3);
        assert_abs_diff_eq!(r.eps_n, -0.8958, epsilon = 1e-3);
    }

    #[test]
    fn k_form_matches_raw_expression() {
        let rd = data();
        let (xp, xm) = rd.x_hat_pair();
        let (g, u) = (0.7, -0.3);
        let (_, r) = solve(g, u, Convention::Published);
        let raw = rd.v1() * g - MU1 * (xp + xm) / (xp - xm) * g
            - 2.0 * MU1 * (2.0 / 3.0) / (xp - xm) * (2.0 * u);
        assert_abs_diff_eq!(r.eps_t, raw, epsilon = 1e-12);
    }

    #[test]
    fn back_substitution() {
        for c in [Convention::Magnitude, Convention::BoundaryValue] {
            for (g, u) in [(1.0, 0.0), (0.0, 1.0), (0.4, -0.7)] {
                let (input, r) = solve(g, u, c);
                let (a, b) = pole_condition_residuals(&r, &input, data());
                assert!(a < 1e-8 && b < 1e-8, "{c}: ({a}, {b})");
            }
        }
        let (input, r) = solve(0.0, 0.0, Convention::BoundaryValue);
        assert_eq!(pole_condition_residuals(&r, &input, data()), (0.0, 0.0));
    }

    #[test]
    fn flipped_half_sum_is_detected() {
        let (input, r) = solve(1.0, 0.0, Convention::BoundaryValue);
        let (a, _) = pole_condition_residuals_with(&r, &input, data(), HalfSum::Magnitude);
        assert!(a > 0.1);
        // The tabulated K_nT does not satisfy the +μ₁ condition.
        let (input, r) = solve(1.0, 0.0, Convention::Published);
        let (a, b) = pole_condition_residuals(&r, &input, data());
        assert!(a > 0.1 || b > 0.1);
    }

    #[test]
    fn asymptote_moments() {
        let rule = hermite_rule(24);
        let (input, r) = solve(1.0, 0.3, Convention::BoundaryValue);
        for x in [0.0, 2.0, 7.5] {
            let m = |w: &dyn Fn(f64) -> f64| -> f64 {
                rule.iter().map(|&(mu, wt)| wt * w(mu) * h_asymptotic(x, mu, &r, &input)).sum()
            };
            assert_abs_diff_eq!(m(&|_| 1.0), r.eps_n - x, epsilon = 1e-12);
            assert_abs_diff_eq!(m(&|mu| mu), 0.3, epsilon = 1e-12);
            assert_abs_diff_eq!(m(&|mu| 2.0 * (mu * mu - 0.5)), r.eps_t + x, epsilon = 1e-12);
        }
        let zero = JumpResult {
            eps_t: 0.0,
            eps_n: 0.0,
            c0: 0.0,
            c1: 0.0,
            convention: Convention::Published,
        };
        assert_eq!(h_asymptotic(0.0, 0.0, &zero, &ProblemInput::default()), 0.0);
    }

    #[test]
    fn convention_names_round_trip() {
        for c in Convention::ALL {
            assert_eq!(c.name().parse::<Convention>().unwrap(), c);
        }
        assert!("minus".parse::<Convention>().is_err());
    }
}
