//! Invariant suite behind `thzlink validate`.

use thzlink_core::analytic::{
    avg_snr_relay, capacity_lb_relay, closed, end_to_end_cdf, Formulas, Method, RelayScenario,
    AVG_SNR_TOLERANCE, CAPACITY_TOLERANCE, NOT_FINITE,
};
use thzlink_core::channels::{
    alpha_mu_pdf, faded_free_snr_at, pointing_pdf, rf_snr_cdf, thz_combined_pdf, thz_snr_cdf,
    FadingParams, PointingParams, RfChannelConstants, ThzChannelConstants,
};
use thzlink_core::oracle::integrals::{quad_cdf, quad_expectation, quad_mass, SnrLaw, Weight};
use thzlink_core::oracle::mc::{estimate_sweep, McLink, McQuantity};
use thzlink_core::oracle::quad::Scheme;
use thzlink_core::specfun::{
    digamma, gamma, gauss_2f1_reg, meijer_g_contour, rgamma, upper_inc_gamma, MeijerGSpec,
};

use crate::config::ScenarioConfig;
use crate::error::{CliError, CliResult};
use crate::sweep::{outage_se, MIN_RESOLVABLE_OUTAGE};

pub const NORMALIZATION_TOL: f64 = 1e-6;
pub const CDF_TOL: f64 = 1e-8;
pub const POINTING_FREE_TOL: f64 = 1e-3;
pub const AGREEMENT_SE: f64 = 3.0;

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub measured: f64,
    pub tolerance: f64,
    pub detail: String,
}

impl Check {
    fn bound(name: impl Into<String>, measured: f64, tolerance: f64) -> Self {
        Check {
            name: name.into(),
            passed: measured <= tolerance,
            measured,
            tolerance,
            detail: String::new(),
        }
    }

    fn flag(name: impl Into<String>, passed: bool, detail: impl Into<String>) -> Self {
        Check {
            name: name.into(),
            passed,
            measured: f64::NAN,
            tolerance: f64::NAN,
            detail: detail.into(),
        }
    }

    fn failed(name: impl Into<String>, e: impl std::fmt::Display) -> Self {
        Self::flag(name, false, e.to_string())
    }
}

pub fn render(checks: &[Check]) -> String {
    let mut s = String::new();
    for c in checks {
        let status = if c.passed { "PASS" } else { "FAIL" };
        if c.measured.is_nan() {
            s.push_str(&format!("{status} {}: {}\n", c.name, c.detail));
        } else {
            s.push_str(&format!(
                "{status} {}: measured {:.3e}, tolerance {:.1e}",
                c.name, c.measured, c.tolerance
            ));
            if !c.detail.is_empty() {
                s.push_str(&format!(" ({})", c.detail));
            }
            s.push('\n');
        }
    }
    let failed = checks.iter().filter(|c| !c.passed).count();
    s.push_str(&format!("{} checks, {failed} failed\n", checks.len()));
    s
}

fn log_grid(lo: f64, hi: f64, n: usize) -> impl Iterator<Item = f64> {
    let r = (hi / lo).ln() / (n - 1) as f64;
    (0..n).map(move |i| lo * (r * i as f64).exp())
}

fn mass_error(q: thzlink_core::Result<f64>) -> f64 {
    q.map(|v| (v - 1.0).abs()).unwrap_or(f64::INFINITY)
}

fn normalization(c: &ScenarioConfig, s: &RelayScenario) -> Vec<Check> {
    let amp = |f: FadingParams| {
        mass_error(
            quad_mass(
                |x| alpha_mu_pdf(&f, x).unwrap_or(f64::NAN),
                f.omega,
                60.0 * f.omega,
                Scheme::TanhSinh,
            )
            .map(|q| q.value),
        )
    };
    let p = c.pointing;
    let combined_scale = p.s0 * c.thz_fading.omega;
    vec![
        Check::bound(
            "normalization: THz α-μ amplitude",
            amp(c.thz_fading),
            NORMALIZATION_TOL,
        ),
        Check::bound(
            "normalization: RF α-μ amplitude",
            amp(c.rf_fading),
            NORMALIZATION_TOL,
        ),
        Check::bound(
            "normalization: pointing gain",
            mass_error(
                quad_mass(
                    |x| pointing_pdf(&p, x).unwrap_or(f64::NAN),
                    p.s0,
                    p.s0,
                    Scheme::GaussKronrod,
                )
                .map(|q| q.value),
            ),
            NORMALIZATION_TOL,
        ),
        Check::bound(
            "normalization: combined THz gain",
            mass_error(
                quad_mass(
                    |x| thz_combined_pdf(&s.thz, x).unwrap_or(f64::NAN),
                    combined_scale,
                    60.0 * combined_scale,
                    Scheme::TanhSinh,
                )
                .map(|q| q.value),
            ),
            NORMALIZATION_TOL,
        ),
        Check::bound(
            "normalization: THz SNR",
            mass_error(
                quad_expectation(SnrLaw::Thz(&s.thz), Weight::One, None, Scheme::GaussKronrod)
                    .map(|q| q.value),
            ),
            NORMALIZATION_TOL,
        ),
        Check::bound(
            "normalization: RF SNR",
            mass_error(
                quad_expectation(SnrLaw::Rf(&s.rf), Weight::One, None, Scheme::GaussKronrod)
                    .map(|q| q.value),
            ),
            NORMALIZATION_TOL,
        ),
    ]
}

fn cdf_shape(s: &RelayScenario) -> Vec<Check> {
    let hi = 1e3 * s.thz.gamma0.max(s.rf.gamma0);
    let lo = 1e-6 * s.thz.gamma0.min(s.rf.gamma0);
    let grid: Vec<f64> = log_grid(lo, hi, 200).collect();
    let mono = |name: &str, f: &dyn Fn(f64) -> thzlink_core::Result<f64>| {
        let mut prev = 0.0;
        for &g in &grid {
            match f(g) {
                Ok(v) if (0.0..=1.0).contains(&v) && v >= prev => prev = v,
                Ok(v) => {
                    return Check::flag(
                        name,
                        false,
                        format!("F({g:.3e}) = {v:.6e} after {prev:.6e}"),
                    )
                }
                Err(e) => return Check::failed(name, e),
            }
        }
        Check::flag(name, true, "non-decreasing in [0, 1] on 200 points")
    };
    vec![
        mono("CDF monotonicity: THz hop", &|g| thz_snr_cdf(&s.thz, g)),
        mono("CDF monotonicity: RF hop", &|g| rf_snr_cdf(&s.rf, g)),
        mono("CDF monotonicity: relay", &|g| end_to_end_cdf(s, g)),
    ]
}

fn thz_cdf_vs_quadrature(s: &RelayScenario) -> Check {
    let name = format!(
        "THz CDF closed form vs quadrature (μ = {})",
        s.thz.fading.mu
    );
    let mean = closed::thz_mean_snr(&s.thz);
    let mut worst: f64 = 0.0;
    for g in log_grid(1e-4 * mean, 30.0 * mean, 100) {
        let cf = thz_snr_cdf(&s.thz, g);
        let q = quad_cdf(SnrLaw::Thz(&s.thz), g, Scheme::GaussKronrod);
        match (cf, q) {
            (Ok(a), Ok(b)) => worst = worst.max((a - b.value).abs()),
            (Err(e), _) | (_, Err(e)) => return Check::failed(name, e),
        }
    }
    Check::bound(name, worst, CDF_TOL)
}

/// Closed form overflowed and the documented quadrature path was taken.
fn overflowed(r: &thzlink_core::analytic::PerfReport) -> bool {
    r.method == Method::Quadrature && r.flags.iter().any(|f| f == NOT_FINITE)
}

fn closed_forms(c: &ScenarioConfig, probes: &[RelayScenario], formulas: Formulas) -> Vec<Check> {
    let mut out = Vec::new();
    let (mut avg_worst, mut cap_worst): (f64, f64) = (0.0, 0.0);
    let mut avg_path = Ok(());
    let mut cap_path = Ok(());
    let integer_mu = c.thz_fading.integer_mu().is_some() && c.rf_fading.integer_mu().is_some();
    let common_alpha = c.thz_fading.alpha == c.rf_fading.alpha;
    for s in probes {
        match avg_snr_relay(s, formulas) {
            Ok(r) => {
                if common_alpha {
                    avg_worst = avg_worst.max(r.uncertainty / r.value.abs());
                    if r.method != Method::ClosedForm && !overflowed(&r) {
                        avg_path = Err(format!("closed form rejected: {:?}", r.flags));
                    }
                } else if r.method != Method::Quadrature {
                    avg_path = Err("unequal α should use quadrature".into());
                }
            }
            Err(e) => avg_path = Err(e.to_string()),
        }
        match capacity_lb_relay(s, formulas) {
            Ok(r) => {
                if integer_mu && common_alpha {
                    cap_worst = cap_worst.max(r.uncertainty / r.value.abs().max(1.0));
                    if r.method != Method::ClosedForm && !overflowed(&r) {
                        cap_path = Err(format!("closed form rejected: {:?}", r.flags));
                    }
                } else if r.method != Method::Quadrature || r.flags.is_empty() {
                    cap_path = Err("expected a flagged quadrature path".into());
                }
            }
            Err(e) => cap_path = Err(e.to_string()),
        }
    }
    if common_alpha {
        out.push(Check::bound(
            "average SNR closed form vs quadrature",
            avg_worst,
            AVG_SNR_TOLERANCE,
        ));
    }
    out.push(match avg_path {
        Ok(()) => Check::flag(
            "average SNR path selection",
            true,
            if common_alpha {
                "closed form"
            } else {
                "quadrature (unequal α)"
            },
        ),
        Err(e) => Check::flag("average SNR path selection", false, e),
    });
    if integer_mu && common_alpha {
        out.push(Check::bound(
            "capacity closed form vs quadrature",
            cap_worst,
            CAPACITY_TOLERANCE,
        ));
    }
    out.push(match cap_path {
        Ok(()) => Check::flag(
            "capacity path selection",
            true,
            if integer_mu && common_alpha {
                "closed form"
            } else {
                "flagged quadrature path"
            },
        ),
        Err(e) => Check::flag("capacity path selection", false, e),
    });
    out
}

fn monte_carlo(
    c: &ScenarioConfig,
    base: &RelayScenario,
    probes: &[RelayScenario],
) -> CliResult<Vec<Check>> {
    let th = thzlink_core::channels::db_to_linear(c.gamma_th_db[0]);
    let qs = [
        McQuantity::Outage(th),
        McQuantity::AvgSnr,
        McQuantity::CapacityLb,
    ];
    let pts: Vec<(f64, f64)> = probes.iter().map(|s| (s.thz.gamma0, s.rf.gamma0)).collect();
    let link = McLink::relay(base).map_err(CliError::at("relay sampler"))?;
    let est =
        estimate_sweep(&link, &pts, &qs, &c.mc).map_err(CliError::at("validation Monte Carlo"))?;
    let (mut z_out, mut z_avg, mut z_cap): (f64, f64, f64) = (0.0, 0.0, 0.0);
    for (s, e) in probes.iter().zip(&est) {
        let cf_out = end_to_end_cdf(s, th).map_err(CliError::at("relay CDF"))?;
        if e[0].mean >= MIN_RESOLVABLE_OUTAGE {
            z_out = z_out.max((cf_out - e[0].mean).abs() / outage_se(cf_out, &e[0]));
        }
        let avg = avg_snr_relay(s, Formulas::Derived)
            .map_err(CliError::at("average SNR"))?
            .value;
        z_avg = z_avg.max((avg - e[1].mean).abs() / e[1].std_error);
        let cap = capacity_lb_relay(s, Formulas::Derived)
            .map_err(CliError::at("capacity"))?
            .value;
        z_cap = z_cap.max((cap - e[2].mean).abs() / e[2].std_error);
    }
    let n = c.mc.samples;
    Ok(vec![
        Check {
            detail: format!("{n} samples, standard errors"),
            ..Check::bound("Monte Carlo: outage", z_out, AGREEMENT_SE)
        },
        Check {
            detail: format!("{n} samples, standard errors"),
            ..Check::bound("Monte Carlo: average SNR", z_avg, AGREEMENT_SE)
        },
        Check {
            detail: format!("{n} samples, standard errors"),
            ..Check::bound("Monte Carlo: E[log2 γ]", z_cap, AGREEMENT_SE)
        },
    ])
}

fn special_functions() -> Vec<Check> {
    let mut rec: f64 = 0.0;
    let mut dig: f64 = 0.0;
    let mut hyp: f64 = 0.0;
    for i in 0..100 {
        let x = 0.05 + 0.37 * i as f64;
        rec = rec.max(((gamma(x + 1.0) - x * gamma(x)) / gamma(x + 1.0)).abs());
        if let (Ok(a), Ok(b)) = (digamma(x + 1.0), digamma(x)) {
            dig = dig.max((a - b - 1.0 / x).abs());
        } else {
            dig = f64::INFINITY;
        }
        let cpar = 0.1 + 0.08 * i as f64;
        hyp = hyp.max(
            gauss_2f1_reg(1.3, -2.2, cpar, 0.0)
                .map(|v| (v - rgamma(cpar)).abs())
                .unwrap_or(f64::INFINITY),
        );
    }
    let mut g_err: f64 = 0.0;
    for &s in &[-1.5, 0.5, 2.0] {
        let spec = MeijerGSpec::new(2, 0, vec![1.0], vec![0.0, s]).expect("valid G spec");
        for x in log_grid(0.05, 20.0, 100) {
            let err = match (meijer_g_contour(&spec, x), upper_inc_gamma(s, x)) {
                (Ok(a), Ok(b)) => (a - b).abs() / b.abs(),
                _ => f64::INFINITY,
            };
            g_err = g_err.max(err);
        }
    }
    vec![
        Check::bound("special functions: Γ(x+1) = xΓ(x)", rec, 1e-11),
        Check::bound("special functions: ψ(x+1) = ψ(x) + 1/x", dig, 1e-11),
        Check::bound("special functions: regularized 2F1 at z = 0", hyp, 1e-14),
        Check::bound(
            "special functions: Meijer G contour vs Γ(s, x)",
            g_err,
            1e-9,
        ),
    ]
}

fn pointing_free(c: &ScenarioConfig, gamma0: f64) -> Vec<Check> {
    let name = "pointing-free reduction (S0 = 1, φ = 1e4)";
    let limit = PointingParams::new(1e4, 1.0)
        .and_then(|p| ThzChannelConstants::new(c.thz_fading, p, gamma0));
    let rf = RfChannelConstants::new(c.thz_fading, gamma0);
    let (thz, rf) = match (limit, rf) {
        (Ok(a), Ok(b)) => (a, b),
        (Err(e), _) | (_, Err(e)) => return vec![Check::failed(name, e)],
    };
    let mean = closed::rf_mean_snr(&rf);
    let mut worst: f64 = 0.0;
    for g in log_grid(1e-3 * mean, 20.0 * mean, 100) {
        match (thz_snr_cdf(&thz, g), rf_snr_cdf(&rf, g)) {
            (Ok(a), Ok(b)) => worst = worst.max((a - b).abs()),
            (Err(e), _) | (_, Err(e)) => return vec![Check::failed(name, e)],
        }
    }
    let ratio = (closed::thz_mean_snr(&thz) / mean - 1.0).abs();
    vec![
        Check::bound(format!("{name}: CDF vs α-μ"), worst, POINTING_FREE_TOL),
        Check::bound(format!("{name}: mean SNR vs α-μ"), ratio, POINTING_FREE_TOL),
    ]
}

/// Runs every check; operational failures are recorded as failed checks.
/// Runs every check; `formulas` selects which closed forms are compared
/// against quadrature.
pub fn run_suite(c: &ScenarioConfig, formulas: Formulas) -> CliResult<Vec<Check>> {
    let cfg_err = |e: thzlink_core::Error| CliError::Config(e.to_string());
    let points = c.sweep.points();
    let mid = points[points.len() / 2];
    let scenario_at = |x: f64| -> CliResult<RelayScenario> {
        let thz = ThzChannelConstants::new(
            c.thz_fading,
            c.pointing,
            faded_free_snr_at(&c.thz, x).map_err(cfg_err)?,
        )
        .map_err(cfg_err)?;
        let rf =
            RfChannelConstants::new(c.rf_fading, faded_free_snr_at(&c.rf, x).map_err(cfg_err)?)
                .map_err(cfg_err)?;
        Ok(RelayScenario::new(thz, rf))
    };
    let base = scenario_at(mid)?;
    let probe_x: Vec<f64> = [
        0,
        points.len() / 4,
        points.len() / 2,
        3 * points.len() / 4,
        points.len() - 1,
    ]
    .iter()
    .map(|&i| points[i])
    .collect();
    let probes = probe_x
        .iter()
        .map(|&x| scenario_at(x))
        .collect::<CliResult<Vec<_>>>()?;

    let mut checks = normalization(c, &base);
    checks.extend(cdf_shape(&base));
    checks.push(thz_cdf_vs_quadrature(&base));
    checks.extend(closed_forms(c, &probes, formulas));
    checks.extend(monte_carlo(c, &base, &probes)?);
    checks.extend(special_functions());
    checks.extend(pointing_free(c, base.thz.gamma0));
    Ok(checks)
}
