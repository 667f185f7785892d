//! Scenario configuration: a flat JSON object with dotted keys such as
//! `thz.distance_m` or `rf.fading.mu`. Every key has a default, so `{}` is
//! the reference scenario. Nested objects are flattened into dotted keys;
//! unknown keys are rejected.

use std::collections::BTreeMap;
use std::path::Path;

use serde_json::{Map, Value};
use thzlink_core::channels::{FadingParams, LinkBudget, LinkKind, PointingParams};
use thzlink_core::oracle::mc::McConfig;

use crate::error::{CliError, CliResult};

pub const SWEEP_AXIS: &str = "P_over_sigma2_dB";

/// Default for every accepted key.
fn defaults() -> BTreeMap<&'static str, Value> {
    let num = |x: f64| Value::from(x);
    BTreeMap::from([
        ("thz.distance_m", num(40.0)),
        ("thz.carrier_hz", num(275e9)),
        ("thz.tx_gain_dbi", num(55.0)),
        ("thz.rx_gain_dbi", num(55.0)),
        ("thz.tx_power_dbm", num(30.0)),
        ("thz.absorption_per_m", num(0.0033)),
        ("thz.fading.alpha", num(2.0)),
        ("thz.fading.mu", num(4.0)),
        ("thz.fading.omega", num(1.0)),
        ("thz.pointing.phi", num(8.5448)),
        ("thz.pointing.s0", num(0.1172)),
        ("rf.distance_m", num(50.0)),
        ("rf.carrier_hz", num(2e9)),
        ("rf.tx_gain_dbi", num(36.0)),
        ("rf.rx_gain_dbi", num(36.0)),
        ("rf.tx_power_dbm", num(30.0)),
        ("rf.fading.alpha", num(2.0)),
        ("rf.fading.mu", num(4.0)),
        ("rf.fading.omega", num(1.0)),
        ("link.bandwidth_hz", num(10e9)),
        ("link.noise_psd_w_per_hz", num(3.8e-17)),
        ("direct.distance_m", num(90.0)),
        ("sweep.axis", Value::from(SWEEP_AXIS)),
        ("sweep.start", num(0.0)),
        ("sweep.stop", num(60.0)),
        ("sweep.step", num(2.0)),
        ("outage.gamma_th_db", Value::from(vec![12.0, 15.0])),
        ("mc.seed", Value::from(1u64)),
        ("mc.samples", Value::from(1_000_000u64)),
        ("mc.substreams", Value::from(64u64)),
    ])
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sweep {
    pub start: f64,
    pub stop: f64,
    pub step: f64,
}

impl Sweep {
    /// start, start + step, … up to stop inclusive.
    pub fn points(&self) -> Vec<f64> {
        let n = ((self.stop - self.start) / self.step + 1e-9).floor() as usize;
        (0..=n).map(|i| self.start + i as f64 * self.step).collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioConfig {
    pub thz: LinkBudget,
    pub thz_fading: FadingParams,
    pub pointing: PointingParams,
    pub rf: LinkBudget,
    pub rf_fading: FadingParams,
    /// THz budget of the direct source–destination link.
    pub direct: LinkBudget,
    pub sweep: Sweep,
    pub gamma_th_db: Vec<f64>,
    pub mc: McConfig,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        Self::from_map(defaults()).expect("defaults are valid")
    }
}

fn flatten(prefix: &str, obj: &Map<String, Value>, out: &mut BTreeMap<String, Value>) {
    for (k, v) in obj {
        let key = if prefix.is_empty() {
            k.clone()
        } else {
            format!("{prefix}.{k}")
        };
        match v {
            Value::Object(inner) => flatten(&key, inner, out),
            other => {
                out.insert(key, other.clone());
            }
        }
    }
}

fn number(map: &BTreeMap<&'static str, Value>, key: &str) -> CliResult<f64> {
    map[key]
        .as_f64()
        .filter(|x| x.is_finite())
        .ok_or_else(|| CliError::Config(format!("{key} must be a finite number")))
}

fn count(map: &BTreeMap<&'static str, Value>, key: &str) -> CliResult<u64> {
    let v = &map[key];
    v.as_u64()
        .or_else(|| {
            v.as_f64()
                .filter(|x| *x >= 0.0 && x.fract() == 0.0 && *x < 2f64.powi(64))
                .map(|x| x as u64)
        })
        .ok_or_else(|| CliError::Config(format!("{key} must be a non-negative integer")))
}

impl ScenarioConfig {
    pub fn from_json_str(text: &str) -> CliResult<Self> {
        let value: Value = serde_json::from_str(text)
            .map_err(|e| CliError::Config(format!("invalid JSON: {e}")))?;
        let obj = value
            .as_object()
            .ok_or_else(|| CliError::Config("config must be a JSON object".into()))?;
        let mut given = BTreeMap::new();
        flatten("", obj, &mut given);
        let mut map = defaults();
        for (k, v) in given {
            match map.get_mut(k.as_str()) {
                Some(slot) => *slot = v,
                None => return Err(CliError::Config(format!("unknown key {k}"))),
            }
        }
        Self::from_map(map)
    }

    pub fn from_path(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_json_str(&text)
    }

    fn from_map(map: BTreeMap<&'static str, Value>) -> CliResult<Self> {
        let n = |k| number(&map, k);
        let bad = |e: thzlink_core::Error| CliError::Config(e.to_string());
        let bandwidth_hz = n("link.bandwidth_hz")?;
        let noise_psd_w_per_hz = n("link.noise_psd_w_per_hz")?;
        let thz = LinkBudget {
            kind: LinkKind::Thz,
            distance_m: n("thz.distance_m")?,
            carrier_hz: n("thz.carrier_hz")?,
            tx_gain_dbi: n("thz.tx_gain_dbi")?,
            rx_gain_dbi: n("thz.rx_gain_dbi")?,
            tx_power_dbm: n("thz.tx_power_dbm")?,
            noise_psd_w_per_hz,
            bandwidth_hz,
            absorption_per_m: n("thz.absorption_per_m")?,
        };
        let rf = LinkBudget {
            kind: LinkKind::Rf,
            distance_m: n("rf.distance_m")?,
            carrier_hz: n("rf.carrier_hz")?,
            tx_gain_dbi: n("rf.tx_gain_dbi")?,
            rx_gain_dbi: n("rf.rx_gain_dbi")?,
            tx_power_dbm: n("rf.tx_power_dbm")?,
            noise_psd_w_per_hz,
            bandwidth_hz,
            absorption_per_m: 0.0,
        };
        let direct = LinkBudget {
            distance_m: n("direct.distance_m")?,
            ..thz
        };
        for b in [&thz, &rf, &direct] {
            b.validate().map_err(bad)?;
        }
        let thz_fading = FadingParams::new(
            n("thz.fading.alpha")?,
            n("thz.fading.mu")?,
            n("thz.fading.omega")?,
        )
        .map_err(bad)?;
        let rf_fading = FadingParams::new(
            n("rf.fading.alpha")?,
            n("rf.fading.mu")?,
            n("rf.fading.omega")?,
        )
        .map_err(bad)?;
        let pointing =
            PointingParams::new(n("thz.pointing.phi")?, n("thz.pointing.s0")?).map_err(bad)?;

        if map["sweep.axis"].as_str() != Some(SWEEP_AXIS) {
            return Err(CliError::Config(format!(
                "sweep.axis must be \"{SWEEP_AXIS}\""
            )));
        }
        let sweep = Sweep {
            start: n("sweep.start")?,
            stop: n("sweep.stop")?,
            step: n("sweep.step")?,
        };
        if !(sweep.start < sweep.stop) || !(sweep.step > 0.0) {
            return Err(CliError::Config(format!(
                "sweep needs start < stop and step > 0 (got {}, {}, {})",
                sweep.start, sweep.stop, sweep.step
            )));
        }
        let gamma_th_db = map["outage.gamma_th_db"]
            .as_array()
            .and_then(|a| {
                a.iter()
                    .map(|v| v.as_f64().filter(|x| x.is_finite()))
                    .collect::<Option<Vec<_>>>()
            })
            .ok_or_else(|| {
                CliError::Config("outage.gamma_th_db must be an array of numbers".into())
            })?;
        if gamma_th_db.is_empty() {
            return Err(CliError::Config(
                "outage.gamma_th_db must not be empty".into(),
            ));
        }
        let mc = McConfig {
            seed: count(&map, "mc.seed")?,
            samples: count(&map, "mc.samples")? as usize,
            substreams: count(&map, "mc.substreams")? as usize,
        };
        mc.validate().map_err(bad)?;
        Ok(ScenarioConfig {
            thz,
            thz_fading,
            pointing,
            rf,
            rf_fading,
            direct,
            sweep,
            gamma_th_db,
            mc,
        })
    }

    /// Applies `--seed` / `--samples` overrides.
    pub fn with_mc_overrides(
        mut self,
        seed: Option<u64>,
        samples: Option<usize>,
    ) -> CliResult<Self> {
        if let Some(s) = seed {
            self.mc.seed = s;
        }
        if let Some(n) = samples {
            self.mc.samples = n;
            self.mc.substreams = self.mc.substreams.min(n);
        }
        self.mc
            .validate()
            .map_err(|e| CliError::Config(e.to_string()))?;
        Ok(self)
    }
}
