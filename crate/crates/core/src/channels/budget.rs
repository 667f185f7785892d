//! Deterministic link budgets: path gain, antenna gains and noise power,
//! reduced to the faded-free SNR γ⁰.

use std::f64::consts::PI;

use crate::error::{Error, Result};

const SPEED_OF_LIGHT: f64 = 299_792_458.0;

/// Which propagation model a budget uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LinkKind {
    /// Free-space loss with exponential molecular absorption.
    Thz,
    /// Empirical dB-domain loss 32.4 + 17.3 log10 d + 20 log10 f_GHz.
    Rf,
}

/// Deterministic description of one hop.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkBudget {
    pub kind: LinkKind,
    pub distance_m: f64,
    pub carrier_hz: f64,
    pub tx_gain_dbi: f64,
    pub rx_gain_dbi: f64,
    pub tx_power_dbm: f64,
    pub noise_psd_w_per_hz: f64,
    pub bandwidth_hz: f64,
    /// Power absorption coefficient κ in m⁻¹; ignored for RF.
    pub absorption_per_m: f64,
}

impl LinkBudget {
    pub fn validate(&self) -> Result<()> {
        let checks = [
            (self.distance_m > 0.0, "distance_m must be > 0"),
            (self.carrier_hz > 0.0, "carrier_hz must be > 0"),
            (self.bandwidth_hz > 0.0, "bandwidth_hz must be > 0"),
            (
                self.noise_psd_w_per_hz > 0.0,
                "noise_psd_w_per_hz must be > 0",
            ),
            (self.absorption_per_m >= 0.0, "absorption_per_m must be ≥ 0"),
            (
                self.tx_gain_dbi.is_finite()
                    && self.rx_gain_dbi.is_finite()
                    && self.tx_power_dbm.is_finite(),
                "gains and power must be finite",
            ),
        ];
        for (ok, msg) in checks {
            if !ok {
                return Err(Error::InvalidParameter(format!(
                    "{:?} budget: {msg}",
                    self.kind
                )));
            }
        }
        Ok(())
    }

    /// Noise power N0·B in watts.
    pub fn noise_power_w(&self) -> f64 {
        self.noise_psd_w_per_hz * self.bandwidth_hz
    }

    /// Transmit power in watts.
    pub fn tx_power_w(&self) -> f64 {
        db_to_linear(self.tx_power_dbm - 30.0)
    }
}

pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

pub fn linear_to_db(x: f64) -> f64 {
    10.0 * x.log10()
}

/// RF path loss in dB, d in meters and f in Hz.
pub fn rf_path_loss_db(distance_m: f64, carrier_hz: f64) -> Result<f64> {
    if !(distance_m > 0.0) || !(carrier_hz > 0.0) {
        return Err(Error::domain(
            "rf_path_loss_db",
            format!("d={distance_m}, f={carrier_hz} must be > 0"),
        ));
    }
    Ok(32.4 + 17.3 * distance_m.log10() + 20.0 * (1e-9 * carrier_hz).log10())
}

/// THz power gain |h|² = (λ/4πd)² G_t G_r e^{−κd}.
pub fn thz_path_gain(budget: &LinkBudget) -> Result<f64> {
    budget.validate()?;
    let lambda = SPEED_OF_LIGHT / budget.carrier_hz;
    let fspl = (lambda / (4.0 * PI * budget.distance_m)).powi(2);
    let gains = db_to_linear(budget.tx_gain_dbi + budget.rx_gain_dbi);
    Ok(fspl * gains * (-budget.absorption_per_m * budget.distance_m).exp())
}

/// Power gain |h|² of either kind of hop.
pub fn path_gain(budget: &LinkBudget) -> Result<f64> {
    match budget.kind {
        LinkKind::Thz => thz_path_gain(budget),
        LinkKind::Rf => {
            budget.validate()?;
            let loss = rf_path_loss_db(budget.distance_m, budget.carrier_hz)?;
            Ok(db_to_linear(budget.tx_gain_dbi + budget.rx_gain_dbi - loss))
        }
    }
}

/// γ⁰ = P |h|² / (N0 B), linear.
pub fn faded_free_snr(budget: &LinkBudget) -> Result<f64> {
    Ok(budget.tx_power_w() * path_gain(budget)? / budget.noise_power_w())
}

/// γ⁰ on the P/σ² sweep axis: the ratio P/σ² (dB) times the path gain.
pub fn faded_free_snr_at(budget: &LinkBudget, p_over_sigma2_db: f64) -> Result<f64> {
    Ok(db_to_linear(p_over_sigma2_db) * path_gain(budget)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn thz() -> LinkBudget {
        LinkBudget {
            kind: LinkKind::Thz,
            distance_m: 40.0,
            carrier_hz: 275e9,
            tx_gain_dbi: 55.0,
            rx_gain_dbi: 55.0,
            tx_power_dbm: 6.0,
            noise_psd_w_per_hz: 3.8e-17,
            bandwidth_hz: 10e9,
            absorption_per_m: 0.0033,
        }
    }

    #[test]
    fn rf_loss_values() {
        assert_relative_eq!(rf_path_loss_db(1.0, 1e9).unwrap(), 32.4, epsilon = 1e-12);
        let v = 32.4 + 17.3 * 50f64.log10() + 20.0 * 2f64.log10();
        assert_relative_eq!(rf_path_loss_db(50.0, 2e9).unwrap(), v, epsilon = 1e-12);
        assert!((rf_path_loss_db(50.0, 2e9).unwrap() - 67.81).abs() < 5e-3);
        assert!((rf_path_loss_db(10.0, 2e9).unwrap() - 55.72).abs() < 5e-3);
        assert!(rf_path_loss_db(0.0, 1e9).is_err());
    }

    #[test]
    fn identity_budget() {
        // d = λ/4π makes the free-space factor 1
        let f = 1e11;
        let b = LinkBudget {
            distance_m: SPEED_OF_LIGHT / f / (4.0 * PI),
            carrier_hz: f,
            tx_gain_dbi: 0.0,
            rx_gain_dbi: 0.0,
            absorption_per_m: 0.0,
            ..thz()
        };
        assert_relative_eq!(thz_path_gain(&b).unwrap(), 1.0, max_relative = 1e-14);
    }

    #[test]
    fn thz_budget_golden() {
        // FSPL −113.2757 dB, gains +110 dB, absorption −0.5732 dB
        let g_db = linear_to_db(thz_path_gain(&thz()).unwrap());
        assert!((g_db + 3.848_906).abs() < 1e-6, "{g_db}");
    }

    #[test]
    fn power_and_noise_linearity() {
        let b = thz();
        let g = faded_free_snr(&b).unwrap();
        let up = LinkBudget {
            tx_power_dbm: b.tx_power_dbm + linear_to_db(2.0),
            ..b
        };
        assert_relative_eq!(faded_free_snr(&up).unwrap(), 2.0 * g, max_relative = 1e-12);
        let noisy = LinkBudget {
            noise_psd_w_per_hz: 3.0 * b.noise_psd_w_per_hz,
            ..b
        };
        assert_relative_eq!(
            faded_free_snr(&noisy).unwrap(),
            g / 3.0,
            max_relative = 1e-12
        );
    }
}
