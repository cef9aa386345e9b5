use num_complex::Complex64;
use proptest::prelude::*;
use smolbgk::jumps::{jump_coefficients, solve_jumps, Convention, ProblemInput};
use smolbgk::numerics::{hermite_rule, integrate_breaks, integrate_pv};
use smolbgk::oracle::{conservation_check, OracleState, VelocityRule};
use smolbgk::profiles::geometric_grid;
use smolbgk::riemann::RiemannData;
use smolbgk::specfun::lambda0_complex;
use smolbgk::QuadConfig;
use std::sync::OnceLock;

fn riemann() -> &'static RiemannData {
    static R: OnceLock<RiemannData> = OnceLock::new();
    R.get_or_init(|| RiemannData::build(&QuadConfig::default()).unwrap())
}

fn off_axis() -> impl Strategy<Value = Complex64> {
    (-7.0..7.0f64, 0.01..4.0f64, any::<bool>())
        .prop_map(|(re, im, up)| Complex64::new(re, if up { im } else { -im }))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn lambda0_schwarz_reflection(z in off_axis()) {
        let a = lambda0_complex(z.conj());
        let b = lambda0_complex(z).conj();
        prop_assert!((a - b).norm() <= 1e-12 * (1.0 + b.norm()));
    }

    #[test]
    fn lambda0_is_even(z in off_axis()) {
        let a = lambda0_complex(-z);
        let b = lambda0_complex(z);
        prop_assert!((a - b).norm() <= 1e-11 * (1.0 + b.norm()));
    }

    #[test]
    fn jumps_are_linear(g1 in -3.0..3.0f64, u1 in -3.0..3.0f64, g2 in -3.0..3.0f64,
                        u2 in -3.0..3.0f64, a in -2.0..2.0f64) {
        let rd = riemann();
        for convention in Convention::ALL {
            let kc = jump_coefficients(rd, convention).unwrap();
            let s = |g: f64, u: f64| solve_jumps(&ProblemInput::new(g, u), &kc, rd);
            let (r1, r2) = (s(g1, u1), s(g2, u2));
            let r = s(a * g1 + g2, a * u1 + u2);
            prop_assert!((r.eps_t - (a * r1.eps_t + r2.eps_t)).abs() < 1e-12);
            prop_assert!((r.eps_n - (a * r1.eps_n + r2.eps_n)).abs() < 1e-12);
        }
    }

    #[test]
    fn factorization_holds_off_the_cut(z in off_axis()) {
        let rd = riemann();
        prop_assume!(z.norm() > 0.05);
        let r = rd.factorization_residual(z, rd.factorization_constant).unwrap();
        prop_assert!(r < 1e-8, "residual {r} at {z}");
    }

    #[test]
    fn principal_value_matches_symmetric_excision(s in -0.9..0.9f64, c in -2.0..2.0f64) {
        let g = |t: f64| (c * t).cos() + t * t;
        let cfg = QuadConfig::with_tol(1e-12);
        let pv = integrate_pv(g, -1.0, 1.0, s, &cfg).unwrap();
        // Excise (s − δ, s + δ) with edges refined geometrically towards it.
        let delta = 1e-9;
        let mut left = vec![-1.0];
        let mut right = vec![1.0];
        for k in (0..30).rev() {
            let d = delta * 2f64.powi(k);
            if s - d > -1.0 { left.push(s - d); }
            if s + d < 1.0 { right.push(s + d); }
        }
        right.reverse();
        let f = |t: f64| g(t) / (t - s);
        let loose = QuadConfig::with_tol(1e-10);
        let brute = integrate_breaks(f, &left, &loose).unwrap() + integrate_breaks(f, &right, &loose).unwrap();
        prop_assert!((pv - brute).abs() < 1e-7, "pv {pv} brute {brute}");
    }

    #[test]
    fn velocity_rules_conserve_collision_invariants(
        values in prop::collection::vec(-5.0..5.0f64, 16 * 4),
        n in 3usize..16,
        half_range in any::<bool>(),
    ) {
        let rule = if half_range {
            VelocityRule::HalfRange.nodes(2 * (n / 2).max(3))
        } else {
            hermite_rule(n)
        };
        let n = rule.len();
        let x = vec![0.0, 1.0, 2.0, 3.0];
        let h = (0..n).map(|k| (0..4).map(|i| values[k * 4 + i]).collect()).collect();
        let state = OracleState {
            mu: rule.iter().map(|r| r.0).collect(),
            weights: rule.iter().map(|r| r.1).collect(),
            x,
            h,
        };
        let (a, b, c) = conservation_check(&state);
        prop_assert!(a < 1e-11 && b < 1e-11 && c < 1e-11, "{a} {b} {c}");
    }

    #[test]
    fn geometric_grid_is_increasing(lo in 1e-4..1.0f64, ratio in 1.5..1e4f64, n in 2usize..200) {
        let xs = geometric_grid(lo, lo * ratio, n).unwrap();
        prop_assert_eq!(xs.len(), n);
        prop_assert!(xs.windows(2).all(|w| w[1] > w[0]));
        prop_assert_eq!(xs[n - 1], lo * ratio);
    }
}

#[test]
fn equispaced_rule_breaks_conservation() {
    // Eight equally spaced velocities on [−2, 2] with normalized Gaussian
    // weights do not reproduce ⟨μ²⟩ = 1/2 and ⟨μ⁴⟩ = 3/4.
    let mu: Vec<f64> = (0..8).map(|k| -2.0 + 4.0 * k as f64 / 7.0).collect();
    let raw: Vec<f64> = mu.iter().map(|m| (-m * m).exp()).collect();
    let total: f64 = raw.iter().sum();
    let state = OracleState {
        weights: raw.iter().map(|w| w / total).collect(),
        h: mu.iter().map(|m| vec![1.0 + m * m]).collect(),
        mu,
        x: vec![0.0],
    };
    let (number, _, energy) = conservation_check(&state);
    assert!(number > 1e-3 && energy > 1e-3, "defects {number} {energy}");
}
