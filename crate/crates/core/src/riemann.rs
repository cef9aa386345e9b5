//! The homogeneous Riemann problem X⁺ = (λ⁺/λ⁻) X⁻ on the positive half line.
//!
//! ```text
//! V(z) = (1/π) ∫₀^∞ (θ(t) − 2π)/(t − z) dt,     X(z) = e^{V(z)}/z²
//! V(z) = Σ V_n z^{−n},   V_n = −(1/π) ∫₀^∞ t^{n−1}(θ(t) − 2π) dt
//! ```
//!
//! On the cut the boundary values are V± = V_pv ± i(θ − 2π), so
//! X±(μ) = x̂(μ) e^{±i(θ(μ)−2π)} with x̂(μ) = e^{V_pv(μ)}/μ² > 0.
//! θ − 2π decays like μ⁷e^{−μ²}, so every integral stops at `QuadConfig::mu_cut`.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{integrate_breaks, integrate_complex, integrate_pv_breaks, QuadConfig};
use crate::specfun::{lambda, lambda_plus, sin_theta_over_q, ThetaTable, MU1, SQRT_PI};

/// Which value stands in for X at μ₁ where the pole conditions need it.
///
/// Both boundary values X±(μ₁) equal −x̂(μ₁) because θ(μ₁) = π; the tabulated
/// coefficients are obtained by using +x̂(μ₁) instead.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum HalfSum {
    /// +x̂(μ₁)
    Magnitude,
    /// (X⁺(μ₁) + X⁻(μ₁))/2 = −x̂(μ₁)
    BoundaryValue,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RiemannData {
    pub theta_table: ThetaTable,
    /// (V₁, V₂, V₃)
    pub v_moments: [f64; 3],
    /// c in λ(z) = c·X(z)X(−z), fitted at z = 10i.
    pub factorization_constant: f64,
    pub quad: QuadConfig,
    x_hat_mu1: f64,
    x_hat_minus_mu1: f64,
}

/// Conservative bound for |θ(μ) − 2π| beyond the cut: (4/3)√π μ⁷ e^{−μ²}, doubled.
fn deficit_tail_bound(n: u32, cut: f64) -> f64 {
    // ∫_c^∞ t^{k} e^{−t²} dt ≤ c^{k−1} e^{−c²} for c² ≥ k, with k = n + 6.
    let k = n as f64 + 6.0;
    let c = cut.max(k.sqrt());
    2.0 * (4.0 / 3.0) * SQRT_PI * c.powf(k - 1.0) * (-c * c).exp() / PI
}

impl RiemannData {
    pub fn build(quad: &QuadConfig) -> Result<Self> {
        quad.validate()?;
        let theta_table = ThetaTable::build(quad)?;
        let mut rd = RiemannData {
            theta_table,
            v_moments: [0.0; 3],
            factorization_constant: f64::NAN,
            quad: *quad,
            x_hat_mu1: f64::NAN,
            x_hat_minus_mu1: f64::NAN,
        };
        for n in 1..=3 {
            rd.v_moments[n - 1] = rd.v_moment(n as u32)?;
        }
        rd.x_hat_mu1 = rd.x_hat(MU1)?;
        rd.x_hat_minus_mu1 = rd.x_hat(-MU1)?;
        let z = Complex64::new(0.0, 10.0);
        let ratio = lambda(z) / (rd.x_function(z)? * rd.x_function(-z)?);
        if ratio.im.abs() > 1e-6 * ratio.re.abs() {
            return Err(Error::Internal(format!(
                "factorization ratio at 10i is not real: {ratio}"
            )));
        }
        rd.factorization_constant = ratio.re;
        Ok(rd)
    }

    pub fn cut(&self) -> f64 {
        self.quad.mu_cut
    }

    pub fn v1(&self) -> f64 {
        self.v_moments[0]
    }

    /// θ(μ) − 2π, the numerator of every Cauchy integral here.
    pub fn deficit(&self, mu: f64) -> f64 {
        self.theta_table.theta_deficit(mu)
    }

    /// Panel edges on [0, cut] at the features of θ.
    fn edges(&self) -> Vec<f64> {
        let mut e = vec![0.0, 0.5, 1.0, MU1, 2.0, 3.0, 4.5];
        e.push(self.cut());
        e.retain(|&x| x <= self.cut());
        e.sort_by(f64::total_cmp);
        e.dedup_by(|a, b| (*a - *b).abs() < 1e-12);
        e
    }

    fn edges_with(&self, s: f64) -> Vec<f64> {
        let mut e = self.edges();
        if s > 0.0 && s < self.cut() {
            e.push(s);
            e.sort_by(f64::total_cmp);
            e.dedup();
        }
        e
    }

    /// V_n = −(1/π)∫₀^∞ t^{n−1}(θ − 2π) dt.
    pub fn v_moment(&self, n: u32) -> Result<f64> {
        if n == 0 {
            return Err(Error::domain("moment index starts at 1"));
        }
        let bound = deficit_tail_bound(n, self.cut());
        if bound > self.quad.abs_tol {
            return Err(Error::Truncation {
                bound,
                tol: self.quad.abs_tol,
            });
        }
        let k = (n - 1) as i32;
        let integral =
            integrate_breaks(|t| t.powi(k) * self.deficit(t), &self.edges(), &self.quad)?;
        Ok(-integral / PI)
    }

    /// V(z) off the cut [0, ∞).
    ///
    /// The numerator is subtracted at s = clamp(Re z, 0, cut) so the integrand
    /// stays bounded as z approaches the cut or the origin:
    /// ∫(f(t) − f(s))/(t − z) dt + f(s)·[ln(cut − z) − ln(−z)].
    pub fn v_function(&self, z: Complex64) -> Result<Complex64> {
        if !z.is_finite() {
            return Err(Error::domain(format!("V evaluated at non-finite z = {z}")));
        }
        if z.im == 0.0 && z.re >= 0.0 {
            return Err(Error::domain(format!(
                "z = {z} lies on the cut; use v_boundary for the boundary values"
            )));
        }
        let cut = self.cut();
        let s = z.re.clamp(0.0, cut);
        let fs = self.deficit(s);
        let regular = integrate_complex(
            |t| Complex64::new(self.deficit(t) - fs, 0.0) / (t - z),
            &self.edges_with(s),
            &self.quad,
        )?;
        let logs = (cut - z).ln() - (-z).ln();
        Ok((regular + fs * logs) / PI)
    }

    /// Principal value V(μ) for μ > 0; the boundary values are V ± i(θ − 2π).
    pub fn v_boundary(&self, mu: f64) -> Result<f64> {
        if !(mu > 0.0) || !mu.is_finite() {
            return Err(Error::domain(format!(
                "boundary value requested at mu = {mu}; needs mu > 0"
            )));
        }
        cauchy_pv(|t| self.deficit(t), mu, &self.edges(), &self.quad)
    }

    /// (V⁺(μ), V⁻(μ)).
    pub fn v_boundary_pair(&self, mu: f64) -> Result<(Complex64, Complex64)> {
        let v = self.v_boundary(mu)?;
        let d = self.deficit(mu);
        Ok((Complex64::new(v, d), Complex64::new(v, -d)))
    }

    /// X(z) = e^{V(z)}/z² off the cut.
    pub fn x_function(&self, z: Complex64) -> Result<Complex64> {
        if z == Complex64::new(0.0, 0.0) {
            return Err(Error::domain("X is evaluated at z = 0"));
        }
        Ok(self.v_function(z)?.exp() / (z * z))
    }

    /// x̂(μ) = e^{V(μ)}/μ², with the principal value for μ > 0.
    pub fn x_hat(&self, mu: f64) -> Result<f64> {
        if mu == 0.0 || !mu.is_finite() {
            return Err(Error::domain(format!("x_hat needs finite mu != 0, got {mu}")));
        }
        let v = if mu > 0.0 {
            self.v_boundary(mu)?
        } else {
            self.v_function(Complex64::new(mu, 0.0))?.re
        };
        Ok(v.exp() / (mu * mu))
    }

    /// (X⁺(μ), X⁻(μ)) = x̂(μ)e^{±i(θ−2π)} for μ > 0.
    pub fn boundary_values(&self, mu: f64) -> Result<(Complex64, Complex64)> {
        if !(mu > 0.0) {
            return Err(Error::domain(format!("boundary values need mu > 0, got {mu}")));
        }
        let x = self.x_hat(mu)?;
        let d = self.deficit(mu);
        Ok((Complex64::from_polar(x, d), Complex64::from_polar(x, -d)))
    }

    /// Cached x̂(μ₁) and x̂(−μ₁).
    pub fn x_hat_pair(&self) -> (f64, f64) {
        (self.x_hat_mu1, self.x_hat_minus_mu1)
    }

    /// The value used for X(μ₁) in the pole conditions.
    pub fn x_at_mu1(&self, half_sum: HalfSum) -> f64 {
        match half_sum {
            HalfSum::Magnitude => self.x_hat_mu1,
            HalfSum::BoundaryValue => -self.x_hat_mu1,
        }
    }

    /// |λ(z) − c·X(z)X(−z)| / |λ(z)|.
    pub fn factorization_residual(&self, z: Complex64, c: f64) -> Result<f64> {
        let l = lambda(z);
        let p = self.x_function(z)? * self.x_function(-z)?;
        Ok((l - c * p).norm() / l.norm())
    }

    /// Relative defect of |λ⁺(μ)| = |c|·x̂(μ)x̂(−μ) for μ > 0.
    pub fn boundary_modulus_residual(&self, mu: f64) -> Result<f64> {
        let l = lambda_plus(mu).norm();
        let p = self.factorization_constant.abs() * self.x_hat(mu)? * self.x_hat(-mu)?;
        Ok((l - p).abs() / l)
    }

    /// K₁ = −(1/π)∫₀^∞ sin θ/(x̂(μ)(3/2 − μ²)) dμ.
    pub fn contour_integral(&self) -> Result<f64> {
        let integral = integrate_breaks(
            |mu| {
                if mu == 0.0 {
                    return 0.0;
                }
                match self.x_hat(mu) {
                    Ok(x) => sin_theta_over_q(mu) / x,
                    Err(_) => f64::NAN,
                }
            },
            &self.edges(),
            &self.quad,
        )?;
        Ok(-integral / PI)
    }

    /// −V₁ + 1/(2μ₁X(−μ₁)) − 1/(2μ₁X(μ₁)) with X(μ₁) taken per `half_sum`.
    pub fn contour_identity_rhs(&self, half_sum: HalfSum) -> f64 {
        let xp = self.x_at_mu1(half_sum);
        let xm = self.x_hat_minus_mu1;
        -self.v1() + 1.0 / (2.0 * MU1 * xm) - 1.0 / (2.0 * MU1 * xp)
    }

    pub fn contour_identity_residual(&self, half_sum: HalfSum) -> Result<f64> {
        Ok((self.contour_integral()? - self.contour_identity_rhs(half_sum)).abs())
    }
}

/// (1/π) PV∫₀^cut f(t)/(t − μ) dt; plain quadrature once μ is past the cut.
fn cauchy_pv<F: Fn(f64) -> f64>(f: F, mu: f64, edges: &[f64], quad: &QuadConfig) -> Result<f64> {
    let cut = *edges.last().expect("edges are non-empty");
    let value = if mu < cut {
        integrate_pv_breaks(&f, edges, mu, quad)?
    } else {
        integrate_breaks(|t| f(t) / (t - mu), edges, quad)?
    };
    Ok(value / PI)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use std::sync::OnceLock;

    pub(crate) fn data() -> &'static RiemannData {
        static RD: OnceLock<RiemannData> = OnceLock::new();
        RD.get_or_init(|| RiemannData::build(&QuadConfig::default()).unwrap())
    }

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn laurent_moments() {
        let rd = data();
        let [v1, v2, v3] = rd.v_moments;
        assert_abs_diff_eq!(v1, 2.6470, epsilon = 1e-3);
        assert_abs_diff_eq!(v2, 2.5, epsilon = 1e-6);
        assert_abs_diff_eq!(v3, 3.7153, epsilon = 1e-3);
        // Independent evaluation (unwrapped phase, cubic interpolation, adaptive quadrature).
        assert_abs_diff_eq!(v1, 2.647_044_737_1, epsilon = 1e-8);
        assert_abs_diff_eq!(v3, 3.715_266_137_8, epsilon = 1e-8);
    }

    #[test]
    fn high_moments_report_truncation() {
        assert!(matches!(data().v_moment(60), Err(Error::Truncation { .. })));
        assert!(matches!(data().v_moment(0), Err(Error::Domain(_))));
    }

    #[test]
    fn v_at_negative_mu1() {
        let v = data().v_function(c(-MU1, 0.0)).unwrap();
        assert_eq!(v.im, 0.0);
        assert_abs_diff_eq!(v.re.exp() / 1.5, 0.1732, epsilon = 1e-3);
    }

    #[test]
    fn v_decays_like_first_moment() {
        let rd = data();
        let z = c(0.0, 100.0);
        let v = rd.v_function(z).unwrap();
        assert!(v.norm() <= rd.v1() / 100.0 + 1e-4);
        assert!(((v * z).re - rd.v1()).abs() < 0.01 * rd.v1());
    }

    #[test]
    fn schwarz_symmetry() {
        let z = c(1.0, 2.0);
        let a = data().v_function(z).unwrap();
        let b = data().v_function(z.conj()).unwrap();
        assert!((a.conj() - b).norm() < 1e-12);
    }

    #[test]
    fn cut_is_rejected() {
        let rd = data();
        assert!(matches!(rd.v_function(c(2.0, 0.0)), Err(Error::Domain(_))));
        assert!(matches!(rd.v_boundary(0.0), Err(Error::Domain(_))));
        assert!(matches!(rd.v_boundary(-1.0), Err(Error::Domain(_))));
        assert!(matches!(rd.x_hat(0.0), Err(Error::Domain(_))));
        assert!(matches!(rd.x_function(c(0.0, 0.0)), Err(Error::Domain(_))));
    }

    #[test]
    fn boundary_limit_from_above() {
        let rd = data();
        let mu = 2.0;
        let (vp, vm) = rd.v_boundary_pair(mu).unwrap();
        let mut last = f64::INFINITY;
        for eps in [1e-3, 1e-4] {
            let up = rd.v_function(c(mu, eps)).unwrap();
            let down = rd.v_function(c(mu, -eps)).unwrap();
            let err = (up - vp).norm();
            assert!(err < 20.0 * eps, "eps {eps}: {up} vs {vp}");
            assert!(err < last);
            assert!((down - vm).norm() < 20.0 * eps);
            last = err;
        }
    }

    #[test]
    fn zero_numerator_gives_zero() {
        let edges = [0.0, 1.0, 8.0];
        for mu in [0.3, MU1, 5.0, 9.0] {
            let v = cauchy_pv(|_| 0.0, mu, &edges, &QuadConfig::default()).unwrap();
            assert_eq!(v, 0.0);
        }
    }

    #[test]
    fn x_hat_values() {
        let rd = data();
        let (xp, xm) = rd.x_hat_pair();
        assert_abs_diff_eq!(xp, 3.8483, epsilon = 1e-3);
        assert_abs_diff_eq!(xm, 0.1732, epsilon = 1e-3);
        assert_abs_diff_eq!(xp * xm, 2.0 / 3.0, epsilon = 1e-6);
        assert_abs_diff_eq!(xp, 3.848_420_780_4, epsilon = 1e-8);
        assert_abs_diff_eq!(xm, 0.173_231_230_3, epsilon = 1e-8);
        // μ²x̂(μ) = e^{V(μ)} → 1, but only like V₁/μ.
        let [v1, v2, v3] = rd.v_moments;
        let mu = 50.0f64;
        let tail = v1 / mu + v2 / mu.powi(2) + v3 / mu.powi(3);
        assert_abs_diff_eq!((rd.x_hat(mu).unwrap() * mu * mu).ln(), tail, epsilon = 1e-5);
        assert_abs_diff_eq!(rd.x_hat(5000.0).unwrap() * 25e6, 1.0, epsilon = 1e-3);
    }

    #[test]
    fn x_bounded_near_origin() {
        let rd = data();
        let a = rd.x_function(c(0.0, 1e-3)).unwrap();
        let b = rd.x_function(c(0.0, 1e-5)).unwrap();
        let d = rd.x_function(c(-1e-5, 0.0)).unwrap();
        assert!(a.norm() < 10.0 && b.norm() < 10.0);
        assert!((a - b).norm() < 0.05 * a.norm());
        assert!((b - d).norm() < 0.05 * b.norm());
    }

    #[test]
    fn factorization() {
        let rd = data();
        let cst = rd.factorization_constant;
        assert_abs_diff_eq!(cst, 0.75, epsilon = 1e-8);
        for z in [c(0.0, 2.0), c(0.5, 0.5), c(-1.0, 0.3), c(3.0, 1.0)] {
            let r = rd.factorization_residual(z, cst).unwrap();
            assert!(r < 1e-8, "z = {z}: {r}");
        }
        assert!(rd.factorization_residual(c(0.0, 2.0), -0.75).unwrap() > 1.0);
        assert!(rd.boundary_modulus_residual(1.0).unwrap() < 1e-8);
    }

    #[test]
    fn boundary_values_at_mu1() {
        let rd = data();
        let (xp, xm) = rd.boundary_values(MU1).unwrap();
        let x = rd.x_hat_pair().0;
        assert!((xp + x).norm() < 1e-9);
        assert!((xm + x).norm() < 1e-9);
        assert_eq!(rd.x_at_mu1(HalfSum::BoundaryValue), -x);
    }

    #[test]
    fn contour_identity() {
        let rd = data();
        let k1 = rd.contour_integral().unwrap();
        assert!(rd.contour_identity_residual(HalfSum::BoundaryValue).unwrap() < 1e-6, "K1 = {k1}");
        assert!(rd.contour_identity_residual(HalfSum::Magnitude).unwrap() > 0.1);
    }

    #[test]
    fn contour_integrand_regular_at_mu1() {
        let rd = data();
        let th = &rd.theta_table;
        for mu in [MU1 - 1e-6, MU1 + 1e-6] {
            let direct = th.theta(mu).sin() / (1.5 - mu * mu);
            assert!(direct.is_finite());
            assert!((direct - sin_theta_over_q(mu)).abs() < 1e-6);
        }
        // sin θ/(3/2 − μ²) → θ′(μ₁)/(2μ₁) > 0.
        let h = 1e-5;
        let slope = (th.theta(MU1 + h) - th.theta(MU1 - h)) / (2.0 * h);
        assert_abs_diff_eq!(sin_theta_over_q(MU1), slope / (2.0 * MU1), epsilon = 1e-6);
    }
}
