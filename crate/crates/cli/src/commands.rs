use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::config::ScenarioConfig;
use crate::error::{CliError, CliResult};
use crate::sweep::{self, outage_agrees, within, AvgSnrRow, CapacityRow, Engine, OutageRow};
use crate::validate;

/// Relay outage must beat the direct link by this factor.
pub const OUTAGE_FACTOR: f64 = 100.0;
pub const OUTAGE_CLAIM_POINT_DB: f64 = 40.0;
pub const OUTAGE_CLAIM_THRESHOLD_DB: f64 = 12.0;
/// Minimum relay − direct average-SNR gap across the sweep, dB.
pub const AVG_SNR_GAP_DB: f64 = 15.0;
/// Spectral-efficiency gap at the top of the sweep, bits/s/Hz, and its allowance.
pub const SE_GAP_BITS: f64 = 5.0;
pub const SE_GAP_ALLOWANCE: f64 = 0.5;
/// Minimum relative spectral-efficiency gain over the upper half of the sweep.
pub const SE_RELATIVE_GAIN: f64 = 0.25;
/// CF–MC agreement, in standard errors.
pub const AGREEMENT_SE: f64 = 3.0;

fn prepare(out: &Path) -> CliResult<()> {
    fs::create_dir_all(out)?;
    Ok(())
}

/// Agreement lines printed after a table run.
fn outage_report(rows: &[OutageRow]) -> String {
    let (mut checked, mut ok) = (0, 0);
    for r in rows {
        for (cf, mc) in [(r.relay_cf, &r.relay_mc), (r.direct_cf, &r.direct_mc)] {
            if let Some(a) = outage_agrees(cf, mc, AGREEMENT_SE) {
                checked += 1;
                ok += usize::from(a);
            }
        }
    }
    format!("outage: {ok}/{checked} resolvable closed-form cells within {AGREEMENT_SE} SE of Monte Carlo")
}

fn avg_report(rows: &[AvgSnrRow]) -> String {
    let ok = rows
        .iter()
        .filter(|r| {
            within(r.relay_cf, &r.relay_mc, AGREEMENT_SE)
                && within(r.direct_cf, &r.direct_mc, AGREEMENT_SE)
        })
        .count();
    format!(
        "avg-snr: {ok}/{} rows with both closed forms within {AGREEMENT_SE} SE of Monte Carlo",
        rows.len()
    )
}

fn capacity_report(rows: &[CapacityRow]) -> String {
    let agree = rows
        .iter()
        .filter(|r| within(r.eta_relay_cf, &r.eta_relay_mc_lb, AGREEMENT_SE))
        .count();
    let bound = rows
        .iter()
        .filter(|r| {
            r.eta_relay_cf
                <= r.cap_relay_mc_true.mean + AGREEMENT_SE * r.cap_relay_mc_true.std_error
        })
        .count();
    format!(
        "capacity: {agree}/{n} rows with E[log2 γ] within {AGREEMENT_SE} SE of Monte Carlo; \
         {bound}/{n} rows with the bound below E[log2(1+γ)] + {AGREEMENT_SE} SE",
        n = rows.len()
    )
}

pub fn outage(engine: &Engine, out: &Path) -> CliResult<String> {
    prepare(out)?;
    let rows = engine.outage_rows()?;
    sweep::write_csv(&out.join("outage.csv"), &rows)?;
    Ok(outage_report(&rows))
}

pub fn avg_snr(engine: &Engine, out: &Path) -> CliResult<String> {
    prepare(out)?;
    let rows = engine.avg_snr_rows()?;
    sweep::write_csv(&out.join("avg_snr.csv"), &rows)?;
    Ok(avg_report(&rows))
}

pub fn capacity(engine: &Engine, out: &Path) -> CliResult<String> {
    prepare(out)?;
    let rows = engine.capacity_rows()?;
    sweep::write_csv(&out.join("capacity.csv"), &rows)?;
    Ok(capacity_report(&rows))
}

pub fn validate(engine: &Engine, out: &Path) -> CliResult<String> {
    prepare(out)?;
    let checks = validate::run_suite(&engine.config, engine.formulas)?;
    let report = validate::render(&checks);
    fs::write(out.join("validate.txt"), &report)?;
    let failed = checks.iter().filter(|c| !c.passed).count();
    if failed > 0 {
        return Err(CliError::Validation(format!(
            "{failed} of {} checks failed\n{report}",
            checks.len()
        )));
    }
    Ok(report)
}

/// Outcome of one headline comparison.
#[derive(Debug, Clone, PartialEq)]
pub struct Claim {
    pub name: &'static str,
    pub holds: bool,
    pub detail: String,
}

/// Outage factor at the claim point, from the closed forms.
pub fn outage_claim(engine: &Engine) -> CliResult<Claim> {
    let th = thzlink_core::channels::db_to_linear(OUTAGE_CLAIM_THRESHOLD_DB);
    let at = format!("P/σ² = {OUTAGE_CLAIM_POINT_DB} dB");
    let relay =
        thzlink_core::analytic::outage_probability(&engine.relay_at(OUTAGE_CLAIM_POINT_DB)?, th)
            .map_err(CliError::at(at.clone()))?;
    let direct = thzlink_core::channels::thz_snr_cdf(&engine.direct_at(OUTAGE_CLAIM_POINT_DB)?, th)
        .map_err(CliError::at(at))?;
    let ratio = direct / relay;
    Ok(Claim {
        name: "relay outage at most 1/100 of direct",
        holds: relay <= direct / OUTAGE_FACTOR,
        detail: format!(
            "P/σ² = {OUTAGE_CLAIM_POINT_DB} dB, γ_th = {OUTAGE_CLAIM_THRESHOLD_DB} dB: relay {relay:.4e}, \
             direct {direct:.4e}, ratio {ratio:.2} (needs ≥ {OUTAGE_FACTOR}); margin {:.2}×",
            ratio / OUTAGE_FACTOR
        ),
    })
}

pub fn avg_snr_claim(rows: &[AvgSnrRow]) -> Claim {
    let gaps: Vec<(f64, f64)> = rows
        .iter()
        .map(|r| {
            (
                r.p_over_sigma2_db,
                10.0 * (r.relay_cf / r.direct_cf).log10(),
            )
        })
        .collect();
    let (x, min) =
        gaps.iter().copied().fold(
            (f64::NAN, f64::INFINITY),
            |a, b| if b.1 < a.1 { b } else { a },
        );
    let max = gaps.iter().map(|g| g.1).fold(f64::NEG_INFINITY, f64::max);
    Claim {
        name: "relay average SNR more than 15 dB above direct across the sweep",
        holds: min > AVG_SNR_GAP_DB,
        detail: format!(
            "gap {min:.3} dB (at {x} dB) to {max:.3} dB (needs > {AVG_SNR_GAP_DB}); margin {:.3} dB",
            min - AVG_SNR_GAP_DB
        ),
    }
}

/// Upper half of the sweep.
fn upper_half(rows: &[CapacityRow]) -> &[CapacityRow] {
    &rows[rows.len() / 2..]
}

pub fn se_gap_claim(rows: &[CapacityRow]) -> Claim {
    let top = rows.last().expect("non-empty sweep");
    let gap = top.eta_relay_cf - top.eta_direct_cf;
    Claim {
        name: "spectral-efficiency gain of about 5 bits/s/Hz at high P/σ²",
        holds: (gap - SE_GAP_BITS).abs() <= SE_GAP_ALLOWANCE,
        detail: format!(
            "at {} dB: relay {:.4}, direct {:.4}, gap {gap:.4} bits/s/Hz (needs {SE_GAP_BITS} ± {SE_GAP_ALLOWANCE})",
            top.p_over_sigma2_db, top.eta_relay_cf, top.eta_direct_cf
        ),
    }
}

/// (η_relay − η_direct)/|η_direct| over the upper half of the sweep.
pub fn relative_gains(rows: &[CapacityRow]) -> Vec<(f64, f64)> {
    upper_half(rows)
        .iter()
        .map(|r| {
            (
                r.p_over_sigma2_db,
                (r.eta_relay_cf - r.eta_direct_cf) / r.eta_direct_cf.abs(),
            )
        })
        .collect()
}

pub fn se_relative_claim(rows: &[CapacityRow]) -> Claim {
    let gains = relative_gains(rows);
    let (x, min) =
        gains.iter().copied().fold(
            (f64::NAN, f64::INFINITY),
            |a, b| if b.1 < a.1 { b } else { a },
        );
    Claim {
        name: "relative spectral-efficiency gain of at least 25% at mid-to-high P/σ²",
        holds: min >= SE_RELATIVE_GAIN,
        detail: format!(
            "minimum {:.2}% at {x} dB over P/σ² ≥ {} dB (needs ≥ {:.0}%)",
            100.0 * min,
            upper_half(rows)[0].p_over_sigma2_db,
            100.0 * SE_RELATIVE_GAIN
        ),
    }
}

pub fn pass(b: bool) -> &'static str {
    if b {
        "PASS"
    } else {
        "FAIL"
    }
}

pub fn reproduce_paper(engine: &Engine, out: &Path) -> CliResult<String> {
    prepare(out)?;
    let outage_rows = engine.outage_rows()?;
    let avg_rows = engine.avg_snr_rows()?;
    let cap_rows = engine.capacity_rows()?;
    sweep::write_csv(&out.join("fig1a.csv"), &outage_rows)?;
    sweep::write_csv(&out.join("fig1b.csv"), &avg_rows)?;
    sweep::write_csv(&out.join("fig2.csv"), &cap_rows)?;

    let claims = [
        outage_claim(engine)?,
        avg_snr_claim(&avg_rows),
        se_gap_claim(&cap_rows),
        se_relative_claim(&cap_rows),
    ];
    let [g_thz, g_rf, g_direct] = engine.path_gains_db()?;
    let c = &engine.config;
    let mut s = String::new();
    let _ = writeln!(s, "thzlink reproduction summary");
    let _ = writeln!(
        s,
        "path gains: THz hop {g_thz:.6} dB ({} m), RF hop {g_rf:.6} dB ({} m), direct THz {g_direct:.6} dB ({} m)",
        c.thz.distance_m, c.rf.distance_m, c.direct.distance_m
    );
    let _ = writeln!(
        s,
        "fading α={} μ={} (THz), α={} μ={} (RF); pointing φ={} S0={}",
        c.thz_fading.alpha,
        c.thz_fading.mu,
        c.rf_fading.alpha,
        c.rf_fading.mu,
        c.pointing.phi,
        c.pointing.s0
    );
    let _ = writeln!(
        s,
        "monte carlo: seed {} samples {} substreams {}",
        c.mc.seed, c.mc.samples, c.mc.substreams
    );
    if engine.formulas == thzlink_core::analytic::Formulas::Printed {
        let _ = writeln!(s, "closed forms: printed (strict)");
    }
    let _ = writeln!(s);
    for claim in &claims {
        let _ = writeln!(
            s,
            "[{}] {}: {}",
            pass(claim.holds),
            claim.name,
            claim.detail
        );
    }
    let _ = writeln!(s);
    let _ = writeln!(s, "{}", outage_report(&outage_rows));
    let _ = writeln!(s, "{}", avg_report(&avg_rows));
    let _ = writeln!(s, "{}", capacity_report(&cap_rows));
    let flagged = cap_rows.iter().filter(|r| !r.flags.is_empty()).count()
        + avg_rows.iter().filter(|r| !r.flags.is_empty()).count();
    let _ = writeln!(s, "flagged rows: {flagged}");
    fs::write(out.join("summary.txt"), &s)?;
    Ok(s)
}

pub fn load_config(path: Option<&Path>) -> CliResult<ScenarioConfig> {
    match path {
        Some(p) => ScenarioConfig::from_path(p),
        None => Ok(ScenarioConfig::default()),
    }
}
