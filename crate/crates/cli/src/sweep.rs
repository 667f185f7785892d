//! Evaluation of the three sweep tables. Every sweep point is computed
//! independently; rows come back ordered by the sweep axis.

use rayon::prelude::*;
use thzlink_core::analytic::{
    avg_snr_relay, capacity_lb_relay, closed, outage_probability, rate_from_spectral_efficiency,
    Formulas, RelayScenario,
};
use thzlink_core::channels::{
    db_to_linear, faded_free_snr_at, linear_to_db, path_gain, thz_snr_cdf, RfChannelConstants,
    ThzChannelConstants,
};
use thzlink_core::oracle::mc::{estimate_sweep, Estimate, McConfig, McLink, McQuantity};

use crate::config::ScenarioConfig;
use crate::error::{CliError, CliResult};
use crate::format::sci;

/// Seed offset of the direct-link Monte Carlo run.
const DIRECT_SEED_MIX: u64 = 0x9e37_79b9_7f4a_7c15;

/// Outage comparisons need at least this estimated probability.
pub const MIN_RESOLVABLE_OUTAGE: f64 = 1e-4;

pub struct Engine {
    pub config: ScenarioConfig,
    pub formulas: Formulas,
    relay: RelayScenario,
    direct: ThzChannelConstants,
}

fn at_db(x: f64) -> String {
    format!("P/σ² = {x} dB")
}

impl Engine {
    pub fn new(config: ScenarioConfig, formulas: Formulas) -> CliResult<Self> {
        let cfg_err = |e: thzlink_core::Error| CliError::Config(e.to_string());
        let thz =
            ThzChannelConstants::new(config.thz_fading, config.pointing, 1.0).map_err(cfg_err)?;
        let rf = RfChannelConstants::new(config.rf_fading, 1.0).map_err(cfg_err)?;
        Ok(Engine {
            relay: RelayScenario::new(thz, rf),
            direct: thz,
            config,
            formulas,
        })
    }

    pub fn points(&self) -> Vec<f64> {
        self.config.sweep.points()
    }

    /// Faded-free SNRs (γ1⁰, γ2⁰, γ_direct⁰) at one sweep point.
    pub fn faded_free(&self, x_db: f64) -> CliResult<(f64, f64, f64)> {
        let f = |b| faded_free_snr_at(b, x_db).map_err(CliError::at(at_db(x_db)));
        Ok((
            f(&self.config.thz)?,
            f(&self.config.rf)?,
            f(&self.config.direct)?,
        ))
    }

    pub fn relay_at(&self, x_db: f64) -> CliResult<RelayScenario> {
        let (g1, g2, _) = self.faded_free(x_db)?;
        self.relay
            .with_gamma0(g1, g2)
            .map_err(CliError::at(at_db(x_db)))
    }

    pub fn direct_at(&self, x_db: f64) -> CliResult<ThzChannelConstants> {
        let (_, _, gd) = self.faded_free(x_db)?;
        self.direct
            .with_gamma0(gd)
            .map_err(CliError::at(at_db(x_db)))
    }

    fn mc_relay(&self, quantities: &[McQuantity]) -> CliResult<Vec<Vec<Estimate>>> {
        let pts = self
            .points()
            .iter()
            .map(|&x| self.faded_free(x).map(|(a, b, _)| (a, b)))
            .collect::<CliResult<Vec<_>>>()?;
        let link = McLink::relay(&self.relay).map_err(CliError::at("relay sampler"))?;
        estimate_sweep(&link, &pts, quantities, &self.config.mc)
            .map_err(CliError::at("relay Monte Carlo"))
    }

    fn mc_direct(&self, quantities: &[McQuantity]) -> CliResult<Vec<Vec<Estimate>>> {
        let pts = self
            .points()
            .iter()
            .map(|&x| self.faded_free(x).map(|(_, _, d)| (d, 1.0)))
            .collect::<CliResult<Vec<_>>>()?;
        let link = McLink::direct(&self.direct).map_err(CliError::at("direct sampler"))?;
        let cfg = McConfig {
            seed: self.config.mc.seed ^ DIRECT_SEED_MIX,
            ..self.config.mc
        };
        estimate_sweep(&link, &pts, quantities, &cfg).map_err(CliError::at("direct Monte Carlo"))
    }

    pub fn outage_rows(&self) -> CliResult<Vec<OutageRow>> {
        let ths: Vec<f64> = self.config.gamma_th_db.clone();
        let qs: Vec<McQuantity> = ths
            .iter()
            .map(|&t| McQuantity::Outage(db_to_linear(t)))
            .collect();
        let relay_mc = self.mc_relay(&qs)?;
        let direct_mc = self.mc_direct(&qs)?;
        let points = self.points();
        let cf: Vec<Vec<(f64, f64)>> = points
            .par_iter()
            .map(|&x| {
                let s = self.relay_at(x)?;
                let d = self.direct_at(x)?;
                ths.iter()
                    .map(|&t| {
                        let where_ = || format!("{}, γ_th = {t} dB", at_db(x));
                        let th = db_to_linear(t);
                        Ok((
                            outage_probability(&s, th).map_err(CliError::at(where_()))?,
                            thz_snr_cdf(&d, th).map_err(CliError::at(where_()))?,
                        ))
                    })
                    .collect()
            })
            .collect::<CliResult<_>>()?;
        let mut rows = Vec::new();
        for (i, &x) in points.iter().enumerate() {
            for (j, &t) in ths.iter().enumerate() {
                rows.push(OutageRow {
                    p_over_sigma2_db: x,
                    gamma_th_db: t,
                    relay_cf: cf[i][j].0,
                    relay_mc: relay_mc[i][j],
                    direct_cf: cf[i][j].1,
                    direct_mc: direct_mc[i][j],
                });
            }
        }
        Ok(rows)
    }

    pub fn avg_snr_rows(&self) -> CliResult<Vec<AvgSnrRow>> {
        let relay_mc = self.mc_relay(&[McQuantity::AvgSnr])?;
        let direct_mc = self.mc_direct(&[McQuantity::AvgSnr])?;
        let points = self.points();
        points
            .par_iter()
            .enumerate()
            .map(|(i, &x)| {
                let r = avg_snr_relay(&self.relay_at(x)?, self.formulas)
                    .map_err(CliError::at(at_db(x)))?;
                Ok(AvgSnrRow {
                    p_over_sigma2_db: x,
                    relay_cf: r.value,
                    relay_mc: relay_mc[i][0],
                    direct_cf: closed::thz_mean_snr(&self.direct_at(x)?),
                    direct_mc: direct_mc[i][0],
                    flags: r.flags,
                })
            })
            .collect()
    }

    pub fn capacity_rows(&self) -> CliResult<Vec<CapacityRow>> {
        let relay_mc = self.mc_relay(&[McQuantity::CapacityLb, McQuantity::Capacity])?;
        let direct_mc = self.mc_direct(&[McQuantity::Capacity])?;
        let bandwidth = self.config.thz.bandwidth_hz;
        let points = self.points();
        points
            .par_iter()
            .enumerate()
            .map(|(i, &x)| {
                let r = capacity_lb_relay(&self.relay_at(x)?, self.formulas)
                    .map_err(CliError::at(at_db(x)))?;
                let direct =
                    closed::thz_log_snr(&self.direct_at(x)?).map_err(CliError::at(at_db(x)))?;
                let rate = rate_from_spectral_efficiency(r.value.max(0.0), bandwidth)
                    .map_err(CliError::at(at_db(x)))?;
                Ok(CapacityRow {
                    p_over_sigma2_db: x,
                    eta_relay_cf: r.value,
                    eta_relay_mc_lb: relay_mc[i][0],
                    cap_relay_mc_true: relay_mc[i][1],
                    eta_direct_cf: direct,
                    cap_direct_mc_true: direct_mc[i][0],
                    rate_relay_bps: rate,
                    flags: r.flags,
                })
            })
            .collect()
    }

    /// Path gains (THz, RF, direct) in dB.
    pub fn path_gains_db(&self) -> CliResult<[f64; 3]> {
        let g = |b| {
            path_gain(b)
                .map(linear_to_db)
                .map_err(|e| CliError::Config(e.to_string()))
        };
        Ok([
            g(&self.config.thz)?,
            g(&self.config.rf)?,
            g(&self.config.direct)?,
        ])
    }
}

/// One CSV table.
pub trait Row {
    fn header() -> &'static [&'static str];
    fn cells(&self) -> Vec<String>;
}

fn finite(v: &[f64]) -> Vec<String> {
    v.iter().map(|&x| sci(x)).collect()
}

fn db(x: f64) -> f64 {
    linear_to_db(x)
}

/// Standard error of 10·log10 of a mean, to first order.
fn se_db(e: &Estimate) -> f64 {
    10.0 / std::f64::consts::LN_10 * e.std_error / e.mean
}

#[derive(Debug, Clone, PartialEq)]
pub struct OutageRow {
    pub p_over_sigma2_db: f64,
    pub gamma_th_db: f64,
    pub relay_cf: f64,
    pub relay_mc: Estimate,
    pub direct_cf: f64,
    pub direct_mc: Estimate,
}

impl Row for OutageRow {
    fn header() -> &'static [&'static str] {
        &[
            "p_over_sigma2_db",
            "gamma_th_db",
            "outage_relay_cf",
            "outage_relay_mc",
            "outage_relay_mc_se",
            "outage_direct_cf",
            "outage_direct_mc",
            "outage_direct_mc_se",
        ]
    }

    fn cells(&self) -> Vec<String> {
        finite(&[
            self.p_over_sigma2_db,
            self.gamma_th_db,
            self.relay_cf,
            self.relay_mc.mean,
            self.relay_mc.std_error,
            self.direct_cf,
            self.direct_mc.mean,
            self.direct_mc.std_error,
        ])
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AvgSnrRow {
    pub p_over_sigma2_db: f64,
    pub relay_cf: f64,
    pub relay_mc: Estimate,
    pub direct_cf: f64,
    pub direct_mc: Estimate,
    pub flags: Vec<String>,
}

impl Row for AvgSnrRow {
    fn header() -> &'static [&'static str] {
        &[
            "p_over_sigma2_db",
            "avg_snr_relay_cf_db",
            "avg_snr_relay_mc_db",
            "avg_snr_direct_cf_db",
            "avg_snr_direct_mc_db",
            "avg_snr_relay_mc_se_db",
            "avg_snr_direct_mc_se_db",
            "flags",
        ]
    }

    fn cells(&self) -> Vec<String> {
        let mut c = finite(&[
            self.p_over_sigma2_db,
            db(self.relay_cf),
            db(self.relay_mc.mean),
            db(self.direct_cf),
            db(self.direct_mc.mean),
            se_db(&self.relay_mc),
            se_db(&self.direct_mc),
        ]);
        c.push(self.flags.join("; "));
        c
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CapacityRow {
    pub p_over_sigma2_db: f64,
    pub eta_relay_cf: f64,
    pub eta_relay_mc_lb: Estimate,
    pub cap_relay_mc_true: Estimate,
    pub eta_direct_cf: f64,
    pub cap_direct_mc_true: Estimate,
    pub rate_relay_bps: f64,
    pub flags: Vec<String>,
}

impl Row for CapacityRow {
    fn header() -> &'static [&'static str] {
        &[
            "p_over_sigma2_db",
            "eta_relay_cf",
            "eta_relay_mc_lb",
            "cap_relay_mc_true",
            "eta_direct_cf",
            "cap_direct_mc_true",
            "rate_relay_bps",
            "eta_relay_mc_lb_se",
            "cap_relay_mc_true_se",
            "cap_direct_mc_true_se",
            "flags",
        ]
    }

    fn cells(&self) -> Vec<String> {
        let mut c = finite(&[
            self.p_over_sigma2_db,
            self.eta_relay_cf,
            self.eta_relay_mc_lb.mean,
            self.cap_relay_mc_true.mean,
            self.eta_direct_cf,
            self.cap_direct_mc_true.mean,
            self.rate_relay_bps,
            self.eta_relay_mc_lb.std_error,
            self.cap_relay_mc_true.std_error,
            self.cap_direct_mc_true.std_error,
        ]);
        c.push(self.flags.join("; "));
        c
    }
}

/// Writes a table as CSV, refusing non-finite cells.
pub fn write_csv<R: Row>(path: &std::path::Path, rows: &[R]) -> CliResult<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(R::header())?;
    for r in rows {
        let cells = r.cells();
        if let Some(bad) = cells[..]
            .iter()
            .find(|c| matches!(c.as_str(), "NaN" | "inf" | "-inf"))
        {
            return Err(CliError::Numeric {
                point: format!("{} row {}", path.display(), cells[0]),
                source: thzlink_core::Error::Overflow {
                    func: "write_csv",
                    detail: format!("cell {bad}"),
                },
            });
        }
        w.write_record(&cells)?;
    }
    w.flush()?;
    Ok(())
}

/// `|cf − mc| ≤ k·se`.
pub fn within(cf: f64, mc: &Estimate, k: f64) -> bool {
    (cf - mc.mean).abs() <= k * mc.std_error
}

/// Standard error of an outage estimate: the sample value, floored by the
/// binomial error at the closed-form probability (an estimate of exactly 0
/// or 1 has a zero sample error).
pub fn outage_se(cf: f64, mc: &Estimate) -> f64 {
    let p = cf.clamp(0.0, 1.0);
    mc.std_error.max((p * (1.0 - p) / mc.samples as f64).sqrt())
}

/// Closed-form outage within `k` standard errors, where resolvable.
pub fn outage_agrees(cf: f64, mc: &Estimate, k: f64) -> Option<bool> {
    (mc.mean >= MIN_RESOLVABLE_OUTAGE).then(|| (cf - mc.mean).abs() <= k * outage_se(cf, mc))
}
