//! Acceptance suite. Prints one PASS/FAIL line per criterion and fails if
//! any criterion fails.

use std::path::Path;
use std::process::Command;
use std::sync::OnceLock;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use thzlink_cli::commands::{
    avg_snr_claim, outage_claim, se_gap_claim, se_relative_claim, AGREEMENT_SE,
};
use thzlink_cli::sweep::{outage_agrees, within, AvgSnrRow, CapacityRow, OutageRow};
use thzlink_cli::{Engine, ScenarioConfig};
use thzlink_core::analytic::{
    avg_snr_relay, capacity_lb_relay, closed, Formulas, Method, RelayScenario,
};
use thzlink_core::channels::{
    alpha_mu_pdf, exact_coupling_constants, pointing_pdf, thz_combined_pdf, thz_snr_cdf,
    FadingParams, PointingParams, RfChannelConstants, ThzChannelConstants,
};
use thzlink_core::oracle::integrals::{
    quad_cdf, quad_expectation, quad_log_gamma_integral, quad_logmean, quad_mass, quad_mean,
    SnrLaw, Weight,
};
use thzlink_core::oracle::quad::Scheme;

type Verdict = Result<String, String>;

fn engine() -> &'static Engine {
    static E: OnceLock<Engine> = OnceLock::new();
    E.get_or_init(|| Engine::new(ScenarioConfig::default(), Formulas::Derived).unwrap())
}

struct Rows {
    outage: Vec<OutageRow>,
    avg: Vec<AvgSnrRow>,
    cap: Vec<CapacityRow>,
}

/// Monte Carlo tables at the reference settings; built once, on first use.
fn rows() -> &'static Rows {
    static R: OnceLock<Rows> = OnceLock::new();
    R.get_or_init(|| {
        let e = engine();
        Rows {
            outage: e.outage_rows().unwrap(),
            avg: e.avg_snr_rows().unwrap(),
            cap: e.capacity_rows().unwrap(),
        }
    })
}

fn rel(a: f64, b: f64) -> f64 {
    ((a - b) / b).abs()
}

fn spread(n: usize, lo: f64, hi: f64) -> Vec<f64> {
    (0..n)
        .map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64)
        .collect()
}

fn log_grid(n: usize, lo: f64, hi: f64) -> Vec<f64> {
    spread(n, lo.ln(), hi.ln())
        .into_iter()
        .map(f64::exp)
        .collect()
}

fn gate(worst: f64, tol: f64, what: &str) -> Verdict {
    let msg = format!("{what}: worst {worst:.3e} (tolerance {tol:.0e})");
    if worst <= tol {
        Ok(msg)
    } else {
        Err(msg)
    }
}

/// Unit-mass error of every density for one parameter set.
fn mass_errors(thz_f: FadingParams, rf_f: FadingParams, p: PointingParams) -> Result<f64, String> {
    let e = |q: thzlink_core::Result<f64>, what: &str| {
        q.map(|v| (v - 1.0).abs())
            .map_err(|e| format!("{what}: {e}"))
    };
    let amp = |f: FadingParams, what: &str| {
        e(
            quad_mass(
                |x| alpha_mu_pdf(&f, x).unwrap_or(f64::NAN),
                f.omega,
                60.0 * f.omega,
                Scheme::TanhSinh,
            )
            .map(|q| q.value),
            what,
        )
    };
    let thz = ThzChannelConstants::new(thz_f, p, 1.0).map_err(|e| e.to_string())?;
    let rf = RfChannelConstants::new(rf_f, 1.0).map_err(|e| e.to_string())?;
    let scale = p.s0 * thz_f.omega;
    let errs = [
        amp(thz_f, "THz amplitude")?,
        amp(rf_f, "RF amplitude")?,
        e(
            quad_mass(
                |x| pointing_pdf(&p, x).unwrap_or(f64::NAN),
                p.s0,
                p.s0,
                Scheme::GaussKronrod,
            )
            .map(|q| q.value),
            "pointing gain",
        )?,
        e(
            quad_mass(
                |x| thz_combined_pdf(&thz, x).unwrap_or(f64::NAN),
                scale,
                60.0 * scale,
                Scheme::TanhSinh,
            )
            .map(|q| q.value),
            "combined THz gain",
        )?,
        e(
            quad_expectation(SnrLaw::Thz(&thz), Weight::One, None, Scheme::GaussKronrod)
                .map(|q| q.value),
            "THz SNR",
        )?,
        e(
            quad_expectation(SnrLaw::Rf(&rf), Weight::One, None, Scheme::GaussKronrod)
                .map(|q| q.value),
            "RF SNR",
        )?,
    ];
    Ok(errs.into_iter().fold(0.0, f64::max))
}

fn normalization() -> Verdict {
    let c = ScenarioConfig::default();
    let mut worst = mass_errors(c.thz_fading, c.rf_fading, c.pointing)?;
    let mut rng = ChaCha12Rng::seed_from_u64(20);
    for _ in 0..20 {
        let f = |rng: &mut ChaCha12Rng| {
            FadingParams::new(rng.random_range(1.0..4.0), rng.random_range(0.5..6.0), 1.0)
        };
        let thz_f = f(&mut rng).unwrap();
        let rf_f = f(&mut rng).unwrap();
        let p =
            PointingParams::new(rng.random_range(2.0..20.0), rng.random_range(0.05..1.0)).unwrap();
        let e =
            mass_errors(thz_f, rf_f, p).map_err(|e| format!("{thz_f:?} {rf_f:?} {p:?}: {e}"))?;
        if !(e <= 1e-6) {
            return Err(format!("{thz_f:?} {rf_f:?} {p:?}: mass error {e:.3e}"));
        }
        worst = worst.max(e);
    }
    gate(worst, 1e-6, "six densities, reference + 20 random sets")
}

fn thz_cdf() -> Verdict {
    let base = engine().relay_at(30.0).map_err(|e| e.to_string())?.thz;
    let mut worst: f64 = 0.0;
    for mu in [4.0, 2.5] {
        let f = FadingParams::new(base.fading.alpha, mu, base.fading.omega).unwrap();
        let thz = ThzChannelConstants::new(f, base.pointing, base.gamma0).unwrap();
        let mean = closed::thz_mean_snr(&thz);
        for g in log_grid(100, 1e-3 * mean, 30.0 * mean) {
            let cf = thz_snr_cdf(&thz, g).map_err(|e| e.to_string())?;
            let q = quad_cdf(SnrLaw::Thz(&thz), g, Scheme::GaussKronrod)
                .map_err(|e| e.to_string())?
                .value;
            worst = worst.max((cf - q).abs());
        }
    }
    gate(
        worst,
        1e-8,
        "max |CDF − quadrature|, μ = 4 and 2.5, 100 points each",
    )
}

fn avg_snr() -> Verdict {
    let mut worst: f64 = 0.0;
    let mut printed: f64 = 0.0;
    for x in spread(20, 0.0, 60.0) {
        let s = engine().relay_at(x).map_err(|e| e.to_string())?;
        let q = |law, w| quad_expectation(law, w, None, Scheme::GaussKronrod).map(|q| q.value);
        let r = avg_snr_relay(&s, Formulas::Derived).map_err(|e| e.to_string())?;
        if r.method != Method::ClosedForm {
            return Err(format!("{x} dB: closed form not used: {:?}", r.flags));
        }
        let oracle = quad_mean(SnrLaw::Relay(&s.thz, &s.rf), Scheme::GaussKronrod)
            .map_err(|e| e.to_string())?
            .value;
        let pairs = [
            (r.value, oracle),
            (
                r.term("gamma1").expect("term"),
                q(SnrLaw::Thz(&s.thz), Weight::Snr).map_err(|e| e.to_string())?,
            ),
            (
                r.term("gamma2").expect("term"),
                q(SnrLaw::Rf(&s.rf), Weight::Snr).map_err(|e| e.to_string())?,
            ),
            (
                r.term("gamma12").expect("term"),
                q(SnrLaw::ThzTimesRfCdf(&s.thz, &s.rf), Weight::Snr).map_err(|e| e.to_string())?,
            ),
            (
                r.term("gamma21").expect("term"),
                q(SnrLaw::RfTimesThzCdf(&s.thz, &s.rf), Weight::Snr).map_err(|e| e.to_string())?,
            ),
        ];
        for (cf, o) in pairs {
            worst = worst.max(rel(cf, o));
        }
        let p = avg_snr_relay(&s, Formulas::Printed).map_err(|e| e.to_string())?;
        printed = printed.max(rel(p.value, oracle));
    }
    gate(
        worst,
        1e-6,
        "relative error of total and each term, 20 points",
    )
    .map(|m| format!("{m}; printed forms deviate by up to {printed:.3e} relative"))
}

/// Bivariate-G arguments (ρ, β, C, B1, χ) entering the two capacity cross terms.
fn bivariate_args(s: &RelayScenario) -> Vec<[f64; 5]> {
    let (thz, rf) = (&s.thz, &s.rf);
    let (beta, c1p) = exact_coupling_constants(thz, rf);
    let half = 0.5 * thz.fading.alpha;
    let mut v: Vec<[f64; 5]> = (0..rf.fading.mu.round() as usize)
        .map(|k| {
            [
                thz.b() + k as f64,
                beta,
                thz.c1,
                thz.b1,
                thz.gamma0.powf(half),
            ]
        })
        .collect();
    v.push([
        rf.fading.mu + thz.b(),
        rf.b2,
        c1p,
        thz.b1,
        rf.gamma0.powf(half),
    ]);
    v
}

fn capacity() -> Verdict {
    let (mut worst, mut worst_g, mut worst_t): (f64, f64, f64) = (0.0, 0.0, 0.0);
    for x in spread(10, 0.0, 60.0) {
        let s = engine().relay_at(x).map_err(|e| e.to_string())?;
        let r = capacity_lb_relay(&s, Formulas::Derived).map_err(|e| e.to_string())?;
        if r.method != Method::ClosedForm {
            return Err(format!("{x} dB: closed form not used: {:?}", r.flags));
        }
        let q = quad_logmean(SnrLaw::Relay(&s.thz, &s.rf), Scheme::GaussKronrod)
            .map_err(|e| e.to_string())?
            .value;
        worst = worst.max(rel(r.value, q));
        for laws in [
            SnrLaw::ThzTimesRfCdf(&s.thz, &s.rf),
            SnrLaw::RfTimesThzCdf(&s.thz, &s.rf),
        ] {
            let name = if matches!(laws, SnrLaw::ThzTimesRfCdf(..)) {
                "eta12"
            } else {
                "eta21"
            };
            let o = quad_expectation(laws, Weight::Log2Snr, None, Scheme::GaussKronrod)
                .map_err(|e| e.to_string())?;
            // η12 is a small difference of O(1) quantities, so it is judged on the bit scale.
            worst_t =
                worst_t.max((r.term(name).expect("term") - o.value).abs() / o.value.abs().max(1.0));
        }
        for [rho, beta, c, b1, chi] in bivariate_args(&s) {
            let g = closed::log_gamma_integral(rho, beta, c, b1, chi).map_err(|e| e.to_string())?;
            let o = quad_log_gamma_integral(rho, beta, c, b1, chi, Scheme::GaussKronrod)
                .map_err(|e| e.to_string())?;
            worst_g = worst_g.max(rel(g, o.value));
        }
    }
    let total = gate(worst, 1e-4, "η relative error, 10 points");
    let g = gate(worst_g, 1e-5, "bivariate-G integrals relative error");
    let terms = gate(worst_t, 1e-5, "η12, η21 error relative to max(|q|, 1)");
    let parts = [total, g, terms];
    let text = parts
        .iter()
        .map(|p| p.clone().unwrap_or_else(|e| e))
        .collect::<Vec<_>>()
        .join("; ");
    if parts.iter().all(Result::is_ok) {
        Ok(text)
    } else {
        Err(text)
    }
}

fn monte_carlo() -> Verdict {
    let r = rows();
    let (mut checked, mut ok, mut direct_checked, mut direct_ok) = (0, 0, 0, 0);
    let mut misses = Vec::new();
    for row in &r.outage {
        if let Some(a) = outage_agrees(row.relay_cf, &row.relay_mc, AGREEMENT_SE) {
            checked += 1;
            ok += usize::from(a);
            if !a {
                misses.push(format!(
                    "outage at {} dB / {} dB",
                    row.p_over_sigma2_db, row.gamma_th_db
                ));
            }
        }
        if let Some(a) = outage_agrees(row.direct_cf, &row.direct_mc, AGREEMENT_SE) {
            direct_checked += 1;
            direct_ok += usize::from(a);
        }
    }
    for row in &r.avg {
        if !within(row.relay_cf, &row.relay_mc, AGREEMENT_SE) {
            misses.push(format!("average SNR at {} dB", row.p_over_sigma2_db));
        }
    }
    for row in &r.cap {
        if !within(row.eta_relay_cf, &row.eta_relay_mc_lb, AGREEMENT_SE) {
            misses.push(format!("E[log2 γ] at {} dB", row.p_over_sigma2_db));
        }
    }
    let n = r.avg.len();
    let avg_ok = n - misses.iter().filter(|m| m.starts_with("average")).count();
    let cap_ok = n - misses.iter().filter(|m| m.starts_with("E[")).count();
    let msg = format!(
        "relay within {AGREEMENT_SE} SE at 10^6 samples: outage {ok}/{checked}, average SNR {avg_ok}/{n}, \
         E[log2 γ] {cap_ok}/{n}; direct link outage {direct_ok}/{direct_checked} (informational)"
    );
    if misses.is_empty() {
        Ok(msg)
    } else {
        Err(format!("{msg}; misses: {}", misses.join(", ")))
    }
}

fn claims() -> Verdict {
    let r = rows();
    let a = outage_claim(engine()).map_err(|e| e.to_string())?;
    let b = avg_snr_claim(&r.avg);
    let gap = se_gap_claim(&r.cap);
    let relative = se_relative_claim(&r.cap);
    let mark = |h: bool| if h { "holds" } else { "fails" };
    let msg = format!(
        "(a) {}: {}\n      (b) {}: {}\n      (c) {}: {}; {}",
        mark(a.holds),
        a.detail,
        mark(b.holds),
        b.detail,
        mark(gap.holds && relative.holds),
        gap.detail,
        relative.detail
    );
    if a.holds && b.holds && gap.holds && relative.holds {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn lower_bound() -> Verdict {
    let r = rows();
    let bad: Vec<f64> = r
        .cap
        .iter()
        .filter(|c| {
            !(c.eta_relay_cf
                <= c.cap_relay_mc_true.mean + AGREEMENT_SE * c.cap_relay_mc_true.std_error)
        })
        .map(|c| c.p_over_sigma2_db)
        .collect();
    let msg = format!(
        "η ≤ E[log2(1+γ)] + {AGREEMENT_SE} SE at {}/{} points",
        r.cap.len() - bad.len(),
        r.cap.len()
    );
    if bad.is_empty() {
        Ok(msg)
    } else {
        Err(format!("{msg}; violated at {bad:?} dB"))
    }
}

fn reproduce(out: &Path) -> Result<(), String> {
    let o = Command::new(env!("CARGO_BIN_EXE_thzlink"))
        .args(["reproduce-paper", "--seed", "1", "--out"])
        .arg(out)
        .env_remove("THZLINK_THREADS")
        .output()
        .map_err(|e| e.to_string())?;
    if o.status.success() {
        Ok(())
    } else {
        Err(String::from_utf8_lossy(&o.stderr).into_owned())
    }
}

fn determinism() -> Verdict {
    let dir = tempfile::TempDir::new().map_err(|e| e.to_string())?;
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    reproduce(&a)?;
    reproduce(&b)?;
    for f in ["fig1a.csv", "fig1b.csv", "fig2.csv"] {
        let read = |d: &Path| std::fs::read(d.join(f)).map_err(|e| format!("{f}: {e}"));
        if read(&a)? != read(&b)? {
            return Err(format!("{f} differs between runs"));
        }
    }
    Ok("two runs with seed 1: fig1a.csv, fig1b.csv, fig2.csv byte-identical".into())
}

fn main() {
    let criteria: [(u32, &str, fn() -> Verdict, Option<u64>); 8] = [
        (1, "normalization", normalization, Some(60)),
        (2, "THz CDF vs quadrature", thz_cdf, Some(60)),
        (3, "average SNR closed form", avg_snr, Some(300)),
        (4, "capacity closed form", capacity, Some(600)),
        (5, "Monte Carlo agreement", monte_carlo, Some(600)),
        (6, "headline comparisons", claims, Some(600)),
        (7, "lower-bound property", lower_bound, None),
        (8, "determinism", determinism, None),
    ];
    let mut failed = Vec::new();
    for (id, name, run, limit) in criteria {
        let t = Instant::now();
        let verdict = std::panic::catch_unwind(run).unwrap_or_else(|_| Err("panicked".into()));
        let took = t.elapsed();
        let verdict = match (verdict, limit) {
            (Ok(m), Some(s)) if took > Duration::from_secs(s) => {
                Err(format!("{m}; runtime over {s} s"))
            }
            (v, _) => v,
        };
        let (status, detail) = match &verdict {
            Ok(m) => ("PASS", m),
            Err(m) => ("FAIL", m),
        };
        println!(
            "{status} criterion {id} ({name}): {detail} [{:.1} s]",
            took.as_secs_f64()
        );
        if verdict.is_err() {
            failed.push(id);
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
