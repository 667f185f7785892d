//! Quadrature oracles for the defining integrals of the closed forms.
//!
//! Every SNR-domain integral is taken over the substituted variable
//! x = (γ/γ_ref)^{α/2} of one hop, split on a geometric grid that brackets
//! both hops' bulk, and truncated at a point beyond which the mass of the
//! dominating gamma law is below 10⁻¹⁷.

use crate::channels::{
    rf_snr_cdf, rf_snr_pdf, thz_snr_cdf, thz_snr_pdf, RfChannelConstants, ThzChannelConstants,
};
use crate::error::{Error, Result};
use crate::oracle::quad::{integrate_pieces, Quadrature, Scheme, Tolerance};
use crate::specfun::{reg_upper_gamma, upper_inc_gamma};

/// Tail mass left out by the truncation.
pub const TAIL_MASS: f64 = 1e-17;

/// Which density (or density × CDF product) is integrated.
#[derive(Debug, Clone, Copy)]
pub enum SnrLaw<'a> {
    Thz(&'a ThzChannelConstants),
    Rf(&'a RfChannelConstants),
    /// f = f1(1 − F2) + f2(1 − F1) of min(γ1, γ2).
    Relay(&'a ThzChannelConstants, &'a RfChannelConstants),
    /// f1·F2, the integrand family of the γ12/η12 terms.
    ThzTimesRfCdf(&'a ThzChannelConstants, &'a RfChannelConstants),
    /// f2·F1, the integrand family of the γ21/η21 terms.
    RfTimesThzCdf(&'a ThzChannelConstants, &'a RfChannelConstants),
}

/// Function of γ multiplying the density.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Weight {
    One,
    Snr,
    Log2Snr,
}

impl Weight {
    fn apply(self, gamma: f64) -> f64 {
        match self {
            Weight::One => 1.0,
            Weight::Snr => gamma,
            Weight::Log2Snr => gamma.log2(),
        }
    }
}

/// Smallest x with Q(a, x) ≤ eps.
pub fn gamma_tail_point(a: f64, eps: f64) -> Result<f64> {
    let mut hi = a + 10.0;
    while reg_upper_gamma(a, hi)? > eps {
        hi *= 2.0;
        if hi > 1e12 {
            return Err(Error::no_conv(
                "gamma_tail_point",
                format!("a={a}, eps={eps}"),
            ));
        }
    }
    let mut lo = 0.0;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if reg_upper_gamma(a, mid)? > eps {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= 1e-12 * hi {
            break;
        }
    }
    Ok(hi)
}

/// SNR scale (bulk) and truncation point of one hop.
struct HopRange {
    bulk: f64,
    tail: f64,
    head: f64,
}

fn thz_range(c: &ThzChannelConstants) -> Result<HopRange> {
    let (mu, alpha) = (c.fading.mu, c.fading.alpha);
    let to_snr = |u: f64| c.gamma0 * (u / c.c1).powf(2.0 / alpha);
    // U = G·W ≤ G, so the Gamma(μ) tail bounds the tail of U; the extra
    // shape covers the γ and log weights
    let tail = gamma_tail_point(mu + 2.0 / alpha + 1.0, TAIL_MASS)?;
    Ok(HopRange {
        bulk: to_snr(mu.max(0.5)),
        tail: to_snr(tail),
        head: to_snr(1e-9 * mu.min(1.0)),
    })
}

fn rf_range(c: &RfChannelConstants) -> Result<HopRange> {
    let (mu, alpha) = (c.fading.mu, c.fading.alpha);
    let to_snr = |v: f64| c.gamma0 * (v / c.b2).powf(2.0 / alpha);
    let tail = gamma_tail_point(mu + 2.0 / alpha + 1.0, TAIL_MASS)?;
    Ok(HopRange {
        bulk: to_snr(mu.max(0.5)),
        tail: to_snr(tail),
        head: to_snr(1e-9 * mu.min(1.0)),
    })
}

impl<'a> SnrLaw<'a> {
    /// (γ_ref, α_ref) of the substituted variable.
    fn reference(&self) -> (f64, f64) {
        match self {
            SnrLaw::Thz(c) | SnrLaw::Relay(c, _) | SnrLaw::ThzTimesRfCdf(c, _) => {
                (c.gamma0, c.fading.alpha)
            }
            SnrLaw::Rf(r) | SnrLaw::RfTimesThzCdf(_, r) => (r.gamma0, r.fading.alpha),
        }
    }

    fn density(&self, gamma: f64) -> Result<f64> {
        Ok(match self {
            SnrLaw::Thz(c) => thz_snr_pdf(c, gamma)?,
            SnrLaw::Rf(r) => rf_snr_pdf(r, gamma)?,
            SnrLaw::Relay(c, r) => {
                thz_snr_pdf(c, gamma)? * (1.0 - rf_snr_cdf(r, gamma)?)
                    + rf_snr_pdf(r, gamma)? * (1.0 - thz_snr_cdf(c, gamma)?)
            }
            SnrLaw::ThzTimesRfCdf(c, r) => thz_snr_pdf(c, gamma)? * rf_snr_cdf(r, gamma)?,
            SnrLaw::RfTimesThzCdf(c, r) => rf_snr_pdf(r, gamma)? * thz_snr_cdf(c, gamma)?,
        })
    }

    /// (lowest bulk, highest bulk, tail, head) in SNR units.
    fn span(&self) -> Result<(f64, f64, f64, f64)> {
        let pair = |a: HopRange, b: HopRange, tail: f64| {
            (
                a.bulk.min(b.bulk),
                a.bulk.max(b.bulk),
                tail,
                a.head.min(b.head),
            )
        };
        Ok(match self {
            SnrLaw::Thz(c) => {
                let r = thz_range(c)?;
                (r.bulk, r.bulk, r.tail, r.head)
            }
            SnrLaw::Rf(c) => {
                let r = rf_range(c)?;
                (r.bulk, r.bulk, r.tail, r.head)
            }
            SnrLaw::Relay(c, r) => {
                let (a, b) = (thz_range(c)?, rf_range(r)?);
                let t = a.tail.min(b.tail);
                pair(a, b, t)
            }
            SnrLaw::ThzTimesRfCdf(c, r) => {
                let (a, b) = (thz_range(c)?, rf_range(r)?);
                let t = a.tail;
                pair(a, b, t)
            }
            SnrLaw::RfTimesThzCdf(c, r) => {
                let (a, b) = (thz_range(c)?, rf_range(r)?);
                let t = b.tail;
                pair(a, b, t)
            }
        })
    }
}

/// Geometric breakpoints in the substituted variable covering (0, upper].
fn breaks(lo: f64, upper: f64) -> Vec<f64> {
    let mut pts = vec![0.0];
    let mut x = lo;
    while x < upper {
        pts.push(x);
        x *= 2.0;
    }
    pts.push(upper);
    pts
}

fn oracle_tolerance() -> Tolerance {
    Tolerance {
        abs: 1e-14,
        rel: 1e-12,
    }
}

/// ∫₀^upper f(x) dx for a density with a possible endpoint singularity,
/// split geometrically toward zero from `scale` and toward `upper`.
pub fn quad_mass<F: Fn(f64) -> f64>(
    f: F,
    scale: f64,
    upper: f64,
    scheme: Scheme,
) -> Result<Quadrature> {
    if !(scale > 0.0) || !(upper > 0.0) {
        return Err(Error::domain(
            "quad_mass",
            format!("scale={scale}, upper={upper}"),
        ));
    }
    let mid = scale.min(0.5 * upper);
    let mut pts: Vec<f64> = (0..48).rev().map(|k| mid * 0.5f64.powi(k)).collect();
    pts.insert(0, 0.0);
    let mut x = 2.0 * mid;
    while x < 0.5 * upper {
        pts.push(x);
        x *= 2.0;
    }
    let mut gap = upper - pts.last().copied().unwrap_or(0.0);
    let mut near: Vec<f64> = Vec::new();
    while gap > upper * 1e-12 {
        gap *= 0.5;
        near.push(upper - gap);
    }
    pts.extend(near.into_iter().filter(|&p| p > mid));
    pts.push(upper);
    pts.dedup();
    integrate_pieces(f, &pts, scheme, oracle_tolerance())
}

/// ∫ w(γ) f(γ) dγ over [0, upper_snr] (or the truncated full range when
/// `upper_snr` is None), integrated over the substituted variable.
pub fn quad_expectation(
    law: SnrLaw<'_>,
    weight: Weight,
    upper_snr: Option<f64>,
    scheme: Scheme,
) -> Result<Quadrature> {
    let (gref, aref) = law.reference();
    let (low_bulk, _high_bulk, tail, head) = law.span()?;
    let to_x = |g: f64| (g / gref).powf(0.5 * aref);
    let top = match upper_snr {
        Some(g) => {
            if g < 0.0 {
                return Err(Error::domain("quad_expectation", format!("γ={g} < 0")));
            }
            g.min(tail)
        }
        None => tail,
    };
    if top == 0.0 {
        return Ok(Quadrature {
            value: 0.0,
            abs_error: 0.0,
            evaluations: 0,
        });
    }
    let xt = to_x(top);
    let lo = to_x(head).min(1e-6 * to_x(low_bulk)).min(0.5 * xt);
    let pts = breaks(lo, xt);
    let p = 2.0 / aref;
    let integrand = |x: f64| {
        let gamma = gref * x.powf(p);
        let jac = gref * p * x.powf(p - 1.0);
        match law.density(gamma) {
            Ok(d) if d == 0.0 => 0.0,
            Ok(d) => weight.apply(gamma) * d * jac,
            Err(_) => f64::NAN,
        }
    };
    integrate_pieces(integrand, &pts, scheme, oracle_tolerance())
}

/// ∫₀^γ f(γ') dγ' for a single hop or the relay.
pub fn quad_cdf(law: SnrLaw<'_>, gamma: f64, scheme: Scheme) -> Result<Quadrature> {
    quad_expectation(law, Weight::One, Some(gamma), scheme)
}

/// E[γ] by quadrature.
pub fn quad_mean(law: SnrLaw<'_>, scheme: Scheme) -> Result<Quadrature> {
    quad_expectation(law, Weight::Snr, None, scheme)
}

/// E[log2 γ] by quadrature.
pub fn quad_logmean(law: SnrLaw<'_>, scheme: Scheme) -> Result<Quadrature> {
    quad_expectation(law, Weight::Log2Snr, None, scheme)
}

/// ∫₀^∞ t^{ρ−1} e^{−βt} Γ(B1, Ct) ln(χt) dt, the log-weighted integrand
/// behind the bivariate-G capacity terms.
pub fn quad_log_gamma_integral(
    rho: f64,
    beta: f64,
    c: f64,
    b1: f64,
    chi: f64,
    scheme: Scheme,
) -> Result<Quadrature> {
    if !(rho + b1.min(0.0) > 0.0 && beta >= 0.0 && c > 0.0 && chi > 0.0 && beta + c > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "log-gamma integral needs ρ + min(B1, 0) > 0, β ≥ 0, C, χ > 0 (ρ={rho}, β={beta}, C={c}, B1={b1}, χ={chi})"
        )));
    }
    let rate = beta + c;
    let shape = rho + b1.max(0.0) + 2.0;
    let upper = gamma_tail_point(shape, 1e-19)? / rate;
    let lo = 1e-9 * (rho / rate).min(1.0 / rate);
    let f = |t: f64| {
        let g = upper_inc_gamma(b1, c * t).unwrap_or(f64::NAN);
        ((rho - 1.0) * t.ln() - beta * t).exp() * g * (chi * t).ln()
    };
    integrate_pieces(f, &breaks(lo, upper), scheme, oracle_tolerance())
}

/// Same integrand without the logarithm: ∫ t^{m−1} e^{−βt} Γ(ν, Ct) dt.
pub fn quad_power_gamma_integral(
    m: f64,
    nu: f64,
    c: f64,
    beta: f64,
    scheme: Scheme,
) -> Result<Quadrature> {
    if !(m > 0.0 && m + nu > 0.0 && c > 0.0 && beta >= 0.0) {
        return Err(Error::InvalidParameter(format!(
            "power-gamma integral needs m > 0, m + ν > 0, C > 0 (m={m}, ν={nu}, C={c})"
        )));
    }
    let rate = beta + c;
    let upper = gamma_tail_point(m + nu.max(0.0) + 2.0, 1e-19)? / rate;
    let lo = 1e-9 * (m / rate).min(1.0 / rate);
    let f = |t: f64| {
        let g = upper_inc_gamma(nu, c * t).unwrap_or(f64::NAN);
        ((m - 1.0) * t.ln() - beta * t).exp() * g
    };
    integrate_pieces(f, &breaks(lo, upper), scheme, oracle_tolerance())
}
