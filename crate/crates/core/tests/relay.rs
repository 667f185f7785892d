use thzlink_core::analytic::{
    avg_snr_relay, capacity_lb_relay, closed, end_to_end_cdf, Formulas, Method, RelayScenario,
};
use thzlink_core::channels::{
    thz_snr_cdf, FadingParams, PointingParams, RfChannelConstants, ThzChannelConstants,
};
use thzlink_core::oracle::integrals::{quad_cdf, quad_expectation, SnrLaw, Weight};
use thzlink_core::oracle::mc::{estimate_sweep, McConfig, McLink, McQuantity};
use thzlink_core::oracle::quad::Scheme;

fn pointing() -> PointingParams {
    PointingParams::new(8.5448, 0.1172).unwrap()
}

/// Hops with comparable mean SNR, so that every cross term matters.
fn balanced(mu1: f64, mu2: f64, g2: f64) -> RelayScenario {
    let thz = ThzChannelConstants::new(FadingParams::new(2.0, mu1, 1.0).unwrap(), pointing(), 1.0)
        .unwrap();
    let g1 = g2 / closed::thz_mean_snr(&thz);
    RelayScenario::new(
        thz.with_gamma0(g1).unwrap(),
        RfChannelConstants::new(FadingParams::new(2.0, mu2, 1.0).unwrap(), g2).unwrap(),
    )
}

#[test]
fn thz_cdf_matches_quadrature_for_fractional_mu() {
    let s = balanced(2.5, 4.0, 30.0);
    for i in 0..25 {
        let g = 0.5 * 1.3f64.powi(i);
        let cf = thz_snr_cdf(&s.thz, g).unwrap();
        let q = quad_cdf(SnrLaw::Thz(&s.thz), g, Scheme::GaussKronrod)
            .unwrap()
            .value;
        assert!((cf - q).abs() < 1e-8, "γ={g}: {cf} vs {q}");
    }
}

#[test]
fn relay_cdf_matches_quadrature() {
    let s = balanced(4.0, 2.0, 10.0);
    for &g in &[0.3, 2.0, 9.0, 40.0] {
        let cf = end_to_end_cdf(&s, g).unwrap();
        let q = quad_cdf(SnrLaw::Relay(&s.thz, &s.rf), g, Scheme::TanhSinh)
            .unwrap()
            .value;
        assert!((cf - q).abs() < 1e-8, "γ={g}: {cf} vs {q}");
    }
}

#[test]
fn average_snr_terms_match_their_integrals() {
    for &(mu1, mu2, g2) in &[(4.0, 4.0, 20.0), (2.5, 1.5, 100.0), (1.0, 3.0, 5.0)] {
        let s = balanced(mu1, mu2, g2);
        let t = closed::avg_snr_terms(&s.thz, &s.rf).unwrap();
        let q12 = quad_expectation(
            SnrLaw::ThzTimesRfCdf(&s.thz, &s.rf),
            Weight::Snr,
            None,
            Scheme::GaussKronrod,
        )
        .unwrap()
        .value;
        let q21 = quad_expectation(
            SnrLaw::RfTimesThzCdf(&s.thz, &s.rf),
            Weight::Snr,
            None,
            Scheme::GaussKronrod,
        )
        .unwrap()
        .value;
        assert!(
            ((t.gamma12 - q12) / q12).abs() < 1e-8,
            "γ12 {} vs {q12}",
            t.gamma12
        );
        assert!(
            ((t.gamma21 - q21) / q21).abs() < 1e-8,
            "γ21 {} vs {q21}",
            t.gamma21
        );
        let r = avg_snr_relay(&s, Formulas::Derived).unwrap();
        assert_eq!(r.method, Method::ClosedForm, "{:?}", r.flags);
    }
}

#[test]
fn capacity_terms_match_their_integrals() {
    for &(mu1, mu2, g2) in &[(4.0, 4.0, 20.0), (2.0, 3.0, 300.0), (1.0, 1.0, 3.0)] {
        let s = balanced(mu1, mu2, g2);
        let t = closed::capacity_terms(&s.thz, &s.rf).unwrap();
        let q12 = quad_expectation(
            SnrLaw::ThzTimesRfCdf(&s.thz, &s.rf),
            Weight::Log2Snr,
            None,
            Scheme::GaussKronrod,
        )
        .unwrap()
        .value;
        let q21 = quad_expectation(
            SnrLaw::RfTimesThzCdf(&s.thz, &s.rf),
            Weight::Log2Snr,
            None,
            Scheme::GaussKronrod,
        )
        .unwrap()
        .value;
        assert!(
            (t.eta12 - q12).abs() < 1e-7 * q12.abs().max(1.0),
            "η12 {} vs {q12}",
            t.eta12
        );
        assert!(
            (t.eta21 - q21).abs() < 1e-7 * q21.abs().max(1.0),
            "η21 {} vs {q21}",
            t.eta21
        );
        let r = capacity_lb_relay(&s, Formulas::Derived).unwrap();
        assert_eq!(r.method, Method::ClosedForm, "{:?}", r.flags);
    }
}

#[test]
fn fractional_mu_capacity_takes_quadrature_path() {
    let r = capacity_lb_relay(&balanced(2.5, 4.0, 30.0), Formulas::Derived).unwrap();
    assert_eq!(r.method, Method::Quadrature);
    assert!(r.flags.iter().any(|f| f.contains("non-integer")));
}

#[test]
fn printed_average_snr_is_flagged() {
    let r = avg_snr_relay(&balanced(4.0, 4.0, 20.0), Formulas::Printed).unwrap();
    assert!(
        r.flags.iter().any(|f| f.contains("deviates")),
        "{:?}",
        r.flags
    );
}

#[test]
fn monte_carlo_agrees_with_closed_forms() {
    let s = balanced(4.0, 4.0, 20.0);
    let cfg = McConfig::new(2024, 400_000, 16).unwrap();
    let th = 10.0;
    let qs = [
        McQuantity::Outage(th),
        McQuantity::AvgSnr,
        McQuantity::CapacityLb,
        McQuantity::Capacity,
    ];
    let e = &estimate_sweep(
        &McLink::relay(&s).unwrap(),
        &[(s.thz.gamma0, s.rf.gamma0)],
        &qs,
        &cfg,
    )
    .unwrap()[0];
    let cf = [
        end_to_end_cdf(&s, th).unwrap(),
        avg_snr_relay(&s, Formulas::Derived).unwrap().value,
        capacity_lb_relay(&s, Formulas::Derived).unwrap().value,
    ];
    for (c, m) in cf.iter().zip(e) {
        assert!((c - m.mean).abs() < 3.0 * m.std_error, "{c} vs {m:?}");
    }
    assert!(cf[2] <= e[3].mean);
}
