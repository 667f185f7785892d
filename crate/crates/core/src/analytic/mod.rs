//! End-to-end performance of the decode-and-forward relay: outage through
//! F = F1 + F2 − F1F2, the average SNR E[min(γ1, γ2)] and the capacity
//! bound E[log2 min(γ1, γ2)], plus the direct THz baseline.
//!
//! The closed forms are checked against the quadrature oracle on every call.
//! A derived closed form that misses its tolerance is replaced by the
//! quadrature value and flagged; a printed one is reported as is, with the
//! measured deviation in its flags.

pub mod closed;
pub mod printed;

use crate::channels::{
    coupling_constants, exact_coupling_constants, rf_snr_cdf, thz_snr_cdf, RfChannelConstants,
    ThzChannelConstants,
};
use crate::error::{Error, Result};
use crate::oracle::integrals::{quad_logmean, quad_mean, SnrLaw};
use crate::oracle::quad::Scheme;

pub use closed::{AvgSnrTerms, CapacityTerms};

/// Relative tolerance of the average-SNR closed form against quadrature.
pub const AVG_SNR_TOLERANCE: f64 = 1e-6;
/// Tolerance of the capacity closed form, relative to max(|η|, 1).
pub const CAPACITY_TOLERANCE: f64 = 1e-4;

/// The two hops of a relay link and their coupling constants.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RelayScenario {
    pub thz: ThzChannelConstants,
    pub rf: RfChannelConstants,
    /// (B2′, C1′) in the square-root form.
    pub coupling: (f64, f64),
}

impl RelayScenario {
    pub fn new(thz: ThzChannelConstants, rf: RfChannelConstants) -> Self {
        RelayScenario {
            thz,
            rf,
            coupling: coupling_constants(&thz, &rf),
        }
    }

    /// Same hops at new faded-free SNRs.
    pub fn with_gamma0(&self, gamma1: f64, gamma2: f64) -> Result<Self> {
        Ok(Self::new(
            self.thz.with_gamma0(gamma1)?,
            self.rf.with_gamma0(gamma2)?,
        ))
    }

    /// Coupling constants in the α-power form used by the closed forms.
    pub fn exact_coupling(&self) -> (f64, f64) {
        exact_coupling_constants(&self.thz, &self.rf)
    }

    /// True when the stored coupling matches the two γ⁰ values to 1e−12.
    pub fn coupling_consistent(&self) -> bool {
        let (b, c) = coupling_constants(&self.thz, &self.rf);
        ((b - self.coupling.0) / b).abs() <= 1e-12 && ((c - self.coupling.1) / c).abs() <= 1e-12
    }

    /// Whether both hops share α, which the closed forms require.
    pub fn common_alpha(&self) -> bool {
        closed::same_alpha(&self.thz, &self.rf).is_ok()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Quantity {
    Outage,
    AvgSnr,
    CapacityLb,
    SpectralEff,
    Rate,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    ClosedForm,
    Quadrature,
    MonteCarlo,
}

/// Which closed forms to evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Formulas {
    /// Re-derived forms with the exact coupling constants.
    #[default]
    Derived,
    /// The typeset forms, symbol for symbol.
    Printed,
}

/// One performance figure with its provenance.
#[derive(Debug, Clone, PartialEq)]
pub struct PerfReport {
    pub quantity: Quantity,
    pub method: Method,
    pub value: f64,
    pub unit: &'static str,
    /// Standard error (Monte Carlo) or error bound (closed form, quadrature).
    pub uncertainty: f64,
    pub flags: Vec<String>,
    /// Named component terms, when the quantity has any.
    pub terms: Vec<(&'static str, f64)>,
    pub samples: Option<usize>,
    pub seed: Option<u64>,
}

impl PerfReport {
    pub fn new(quantity: Quantity, method: Method, value: f64, unit: &'static str) -> Self {
        PerfReport {
            quantity,
            method,
            value,
            unit,
            uncertainty: 0.0,
            flags: Vec::new(),
            terms: Vec::new(),
            samples: None,
            seed: None,
        }
    }

    pub fn term(&self, name: &str) -> Option<f64> {
        self.terms.iter().find(|(n, _)| *n == name).map(|(_, v)| *v)
    }
}

/// F(γ) = F1 + F2 − F1F2 of min(γ1, γ2), evaluated as 1 − (1 − F1)(1 − F2)
/// so that rounding keeps it monotone.
pub fn end_to_end_cdf(s: &RelayScenario, gamma: f64) -> Result<f64> {
    let f1 = thz_snr_cdf(&s.thz, gamma)?;
    let f2 = rf_snr_cdf(&s.rf, gamma)?;
    Ok((1.0 - (1.0 - f1) * (1.0 - f2)).clamp(0.0, 1.0))
}

/// P(min(γ1, γ2) < γ_th).
pub fn outage_probability(s: &RelayScenario, gamma_th: f64) -> Result<f64> {
    end_to_end_cdf(s, gamma_th)
}

fn relative_gap(a: f64, b: f64, floor: f64) -> f64 {
    (a - b).abs() / b.abs().max(floor)
}

/// Average end-to-end SNR E[min(γ1, γ2)] with its four terms.
/// Flag raised when a closed form overflows, e.g. for a very large pointing
/// ratio φ/α; the quadrature value is used instead.
pub const NOT_FINITE: &str = "closed form not finite: quadrature path used";

pub fn avg_snr_relay(s: &RelayScenario, formulas: Formulas) -> Result<PerfReport> {
    let oracle = quad_mean(SnrLaw::Relay(&s.thz, &s.rf), Scheme::GaussKronrod)?;
    if !s.common_alpha() {
        let mut r = PerfReport::new(Quantity::AvgSnr, Method::Quadrature, oracle.value, "linear");
        r.uncertainty = oracle.abs_error;
        r.flags
            .push("hops differ in α: quadrature path used".into());
        return Ok(r);
    }
    let terms = match formulas {
        Formulas::Derived => closed::avg_snr_terms(&s.thz, &s.rf)?,
        Formulas::Printed => AvgSnrTerms {
            gamma1: printed::gamma1(&s.thz),
            gamma2: closed::rf_mean_snr(&s.rf),
            gamma12: printed::gamma12(&s.thz, &s.rf)?,
            gamma21: printed::gamma21(&s.thz, &s.rf)?,
        },
    };
    let cf = terms.total();
    let mut r = PerfReport::new(Quantity::AvgSnr, Method::ClosedForm, cf, "linear");
    r.terms = vec![
        ("gamma1", terms.gamma1),
        ("gamma2", terms.gamma2),
        ("gamma12", terms.gamma12),
        ("gamma21", terms.gamma21),
    ];
    let gap = relative_gap(cf, oracle.value, 0.0);
    r.uncertainty = (cf - oracle.value).abs().max(oracle.abs_error);
    if formulas == Formulas::Printed {
        r.flags.push("printed formulas".into());
    }
    if !cf.is_finite() {
        r.flags.push(NOT_FINITE.into());
    } else if !(gap <= AVG_SNR_TOLERANCE) {
        r.flags.push(format!(
            "closed form deviates from quadrature by {gap:.3e} relative"
        ));
    }
    if !(gap <= AVG_SNR_TOLERANCE) {
        if formulas == Formulas::Derived {
            r.method = Method::Quadrature;
            r.value = oracle.value;
            r.uncertainty = oracle.abs_error;
        }
    }
    Ok(r)
}

/// Ergodic-capacity lower bound E[log2 min(γ1, γ2)] in bits/s/Hz.
pub fn capacity_lb_relay(s: &RelayScenario, formulas: Formulas) -> Result<PerfReport> {
    let oracle = quad_logmean(SnrLaw::Relay(&s.thz, &s.rf), Scheme::GaussKronrod)?;
    let quadrature_path = |why: &str| {
        let mut r = PerfReport::new(
            Quantity::CapacityLb,
            Method::Quadrature,
            oracle.value,
            "bit/s/Hz",
        );
        r.uncertainty = oracle.abs_error;
        r.flags.push(format!("{why}: quadrature path used"));
        r
    };
    if !s.common_alpha() {
        return Ok(quadrature_path("hops differ in α"));
    }
    if s.thz.fading.integer_mu().is_none() || s.rf.fading.integer_mu().is_none() {
        return Ok(quadrature_path("non-integer μ"));
    }
    let terms = match formulas {
        Formulas::Derived => closed::capacity_terms(&s.thz, &s.rf)?,
        Formulas::Printed => CapacityTerms {
            eta1: printed::eta1(&s.thz)?,
            eta2: printed::eta2(&s.rf)?,
            eta12: printed::eta12(&s.thz, &s.rf)?,
            eta21: printed::eta21(&s.thz, &s.rf)?,
        },
    };
    let cf = terms.total();
    let mut r = PerfReport::new(Quantity::CapacityLb, Method::ClosedForm, cf, "bit/s/Hz");
    r.terms = vec![
        ("eta1", terms.eta1),
        ("eta2", terms.eta2),
        ("eta12", terms.eta12),
        ("eta21", terms.eta21),
    ];
    let gap = relative_gap(cf, oracle.value, 1.0);
    r.uncertainty = (cf - oracle.value).abs().max(oracle.abs_error);
    if formulas == Formulas::Printed {
        r.flags.push("printed formulas".into());
    }
    if !cf.is_finite() {
        r.flags.push(NOT_FINITE.into());
    } else if !(gap <= CAPACITY_TOLERANCE) {
        r.flags
            .push(format!("closed form deviates from quadrature by {gap:.3e}"));
    }
    if !(gap <= CAPACITY_TOLERANCE) {
        if formulas == Formulas::Derived {
            r.method = Method::Quadrature;
            r.value = oracle.value;
            r.uncertainty = oracle.abs_error;
        }
    }
    Ok(r)
}

/// Direct THz link: outage F1(γ_th), average SNR E[γ1] and bound E[log2 γ1].
pub fn direct_thz_baseline(thz: &ThzChannelConstants, gamma_th: f64) -> Result<[PerfReport; 3]> {
    let outage = PerfReport::new(
        Quantity::Outage,
        Method::ClosedForm,
        thz_snr_cdf(thz, gamma_th)?,
        "probability",
    );
    let avg = PerfReport::new(
        Quantity::AvgSnr,
        Method::ClosedForm,
        closed::thz_mean_snr(thz),
        "linear",
    );
    let cap = PerfReport::new(
        Quantity::CapacityLb,
        Method::ClosedForm,
        closed::thz_log_snr(thz)?,
        "bit/s/Hz",
    );
    Ok([outage, avg, cap])
}

/// Data rate = spectral efficiency × bandwidth.
pub fn rate_from_spectral_efficiency(eff: f64, bandwidth_hz: f64) -> Result<f64> {
    if !(eff >= 0.0) || !(bandwidth_hz > 0.0) {
        return Err(Error::domain(
            "rate_from_spectral_efficiency",
            format!("efficiency {eff} must be ≥ 0 and bandwidth {bandwidth_hz} > 0"),
        ));
    }
    Ok(eff * bandwidth_hz)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channels::{FadingParams, PointingParams};

    fn scenario(g1: f64, g2: f64) -> RelayScenario {
        let f = FadingParams::new(2.0, 4.0, 1.0).unwrap();
        RelayScenario::new(
            ThzChannelConstants::new(f, PointingParams::new(8.5448, 0.1172).unwrap(), g1).unwrap(),
            RfChannelConstants::new(f, g2).unwrap(),
        )
    }

    #[test]
    fn cdf_edges() {
        let s = scenario(40.0, 250.0);
        assert_eq!(end_to_end_cdf(&s, 0.0).unwrap(), 0.0);
        assert!((end_to_end_cdf(&s, 1e7).unwrap() - 1.0).abs() < 1e-15);
        for &g in &[1.0, 10.0, 60.0] {
            let f = end_to_end_cdf(&s, g).unwrap();
            assert!(f >= thz_snr_cdf(&s.thz, g).unwrap() && f >= rf_snr_cdf(&s.rf, g).unwrap());
        }
    }

    #[test]
    fn derived_average_snr_agrees() {
        let s = scenario(40.0, 250.0);
        let r = avg_snr_relay(&s, Formulas::Derived).unwrap();
        assert_eq!(r.method, Method::ClosedForm, "{:?}", r.flags);
        assert!(r.value < closed::thz_mean_snr(&s.thz).min(closed::rf_mean_snr(&s.rf)));
    }

    #[test]
    fn derived_capacity_agrees() {
        let s = scenario(40.0, 250.0);
        let r = capacity_lb_relay(&s, Formulas::Derived).unwrap();
        assert_eq!(r.method, Method::ClosedForm, "{:?} {r:?}", r.flags);
    }

    #[test]
    fn rates() {
        assert_eq!(rate_from_spectral_efficiency(0.0, 1e9).unwrap(), 0.0);
        assert_eq!(rate_from_spectral_efficiency(1.0, 1e9).unwrap(), 1e9);
        assert_eq!(rate_from_spectral_efficiency(5.0, 1e10).unwrap(), 5e10);
        assert!(rate_from_spectral_efficiency(-1.0, 1e9).is_err());
    }
}
