use proptest::prelude::*;
use thzlink_core::specfun::{
    digamma, gamma, gauss_2f1_reg, meijer_g_contour, reg_lower_gamma, rgamma, upper_inc_gamma,
    MeijerGSpec,
};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn gamma_recurrence(x in 0.05f64..60.0) {
        let lhs = gamma(x + 1.0);
        let rhs = x * gamma(x);
        prop_assert!(((lhs - rhs) / lhs).abs() < 1e-11, "x={x}: {lhs} vs {rhs}");
    }

    #[test]
    fn gamma_recurrence_negative(x in -8.0f64..-0.01) {
        prop_assume!((x - x.round()).abs() > 1e-3);
        let lhs = gamma(x + 1.0);
        let rhs = x * gamma(x);
        prop_assert!(((lhs - rhs) / lhs).abs() < 1e-11, "x={x}: {lhs} vs {rhs}");
    }

    #[test]
    fn digamma_recurrence(x in 0.05f64..100.0) {
        let d = digamma(x + 1.0).unwrap() - digamma(x).unwrap() - 1.0 / x;
        prop_assert!(d.abs() < 1e-11 * (1.0 + 1.0 / x), "x={x}: {d}");
    }

    #[test]
    fn lower_gamma_monotone(a in 0.1f64..20.0, x in 0.0f64..50.0, dx in 1e-3f64..5.0) {
        let p0 = reg_lower_gamma(a, x).unwrap();
        let p1 = reg_lower_gamma(a, x + dx).unwrap();
        prop_assert!((0.0..=1.0).contains(&p0) && p1 >= p0, "a={a} x={x}: {p0} {p1}");
    }

    #[test]
    fn upper_gamma_negative_order_recurrence(s in -6.0f64..3.0, x in 0.05f64..30.0) {
        prop_assume!((s - s.round()).abs() > 1e-3);
        // Γ(s+1, x) = sΓ(s, x) + x^s e^{−x}
        let lhs = upper_inc_gamma(s + 1.0, x).unwrap();
        let rhs = s * upper_inc_gamma(s, x).unwrap() + x.powf(s) * (-x).exp();
        let scale = lhs.abs().max(x.powf(s) * (-x).exp());
        prop_assert!((lhs - rhs).abs() <= 1e-10 * scale, "s={s} x={x}: {lhs} vs {rhs}");
    }

    #[test]
    fn regularized_2f1_at_zero(a in -5.0f64..5.0, b in -5.0f64..5.0, c in 0.1f64..8.0) {
        let v = gauss_2f1_reg(a, b, c, 0.0).unwrap();
        prop_assert!((v - rgamma(c)).abs() <= 1e-14 * rgamma(c).abs().max(1e-300), "{v}");
    }
}

#[test]
fn meijer_contour_reproduces_upper_gamma() {
    // Γ(s, x) = G^{2,0}_{1,2}(x | 1; 0, s)
    for &s in &[-2.5, -0.5, 0.7, 3.0] {
        let spec = MeijerGSpec::new(2, 0, vec![1.0], vec![0.0, s]).unwrap();
        for i in 0..100 {
            let x = 0.05 * 1.05f64.powi(i);
            let want = upper_inc_gamma(s, x).unwrap();
            let got = meijer_g_contour(&spec, x).unwrap();
            assert!(
                (got - want).abs() <= 1e-9 * want.abs().max(1e-300),
                "s={s} x={x}: {got} vs {want}"
            );
        }
    }
}
