//! The average-SNR and capacity cross terms exactly as typeset, for
//! comparison against the re-derived forms.
//!
//! Every symbol is taken literally: A1 with Ω^α, A2 = μ^μ/Ω^{αμ}, the
//! square-root coupling constants B2′ and C1′, the summation symbol K read as
//! k, and the RF/THz μ chosen by the hop each factor belongs to. Two printed
//! bivariate-G arguments are negative or inverted; the contour integral is
//! taken at their absolute value.

use std::f64::consts::LN_2;

use crate::analytic::closed::{rf_log_snr, rf_mean_snr, thz_log_snr};
use crate::channels::{coupling_constants, RfChannelConstants, ThzChannelConstants};
use crate::error::{Error, Result};
use crate::specfun::{
    bivariate_meijer_g, digamma, gamma, gauss_2f1_reg, meijer_g, BivariateGSpec, MeijerGSpec,
};

fn gamma_block(b1: f64) -> Result<MeijerGSpec> {
    MeijerGSpec::new(2, 0, vec![1.0], vec![b1, 0.0])
}

fn log_block() -> Result<MeijerGSpec> {
    MeijerGSpec::new(1, 2, vec![1.0, 1.0], vec![1.0, 0.0])
}

fn printed_bivariate(outer_a: f64, b1: f64, x: f64, y: f64) -> Result<f64> {
    let spec = BivariateGSpec::new(1, vec![outer_a], vec![], gamma_block(b1)?, log_block()?)?;
    bivariate_meijer_g(&spec, x, y.abs())
}

fn integer_mu(mu: f64) -> Result<usize> {
    let r = mu.round();
    if (mu - r).abs() < 1e-9 && r >= 1.0 {
        Ok(r as usize)
    } else {
        Err(Error::Usage(format!(
            "printed capacity sums need integer μ (μ={mu})"
        )))
    }
}

/// THz average SNR with the printed constants.
pub fn gamma1(thz: &ThzChannelConstants) -> f64 {
    let (alpha, phi) = (thz.fading.alpha, thz.pointing.phi);
    let (a1, b1, c1) = (thz.printed_a1(), thz.b1, thz.c1);
    a1 * c1.powf(-(phi + 2.0) / alpha) * thz.gamma0 * gamma((alpha * b1 + phi + 2.0) / alpha)
        / (phi + 2.0)
}

/// γ12 as typeset.
pub fn gamma12(thz: &ThzChannelConstants, rf: &RfChannelConstants) -> Result<f64> {
    let (b2p, _) = coupling_constants(thz, rf);
    let (alpha, mu, phi) = (thz.fading.alpha, thz.fading.mu, thz.pointing.phi);
    let (a1, b1, c1) = (thz.printed_a1(), thz.b1, thz.c1);
    let z = -c1 / b2p;
    let p1 = (alpha * b1 + phi + 2.0) / alpha;
    let p2 = (alpha * (b1 + mu) + phi + 2.0) / alpha;
    let p3 = (alpha * b1 + alpha + phi + 2.0) / alpha;
    let inner = alpha * gauss_2f1_reg(p1, p2, p3, z)? / (alpha * b1 + phi + 2.0)
        - gamma(b1) * gauss_2f1_reg(b1, p2, 1.0 + b1, z)?;
    let bracket = a1
        * b2p.powf(-(phi + 2.0) / alpha)
        * thz.gamma0
        * (gamma(b1) * gamma((alpha * mu + phi + 2.0) / alpha)
            + b2p.powf(-b1) * c1.powf(b1) * gamma(p2) * inner);
    Ok(gamma1(thz) - bracket / ((phi + 2.0) * gamma(mu)))
}

/// γ21 as typeset.
pub fn gamma21(thz: &ThzChannelConstants, rf: &RfChannelConstants) -> Result<f64> {
    let (_, c1p) = coupling_constants(thz, rf);
    let (alpha, phi) = (thz.fading.alpha, thz.pointing.phi);
    let mu = rf.fading.mu;
    let (a1, b1, c1) = (thz.printed_a1(), thz.b1, thz.c1);
    let (a2, b2) = (rf.a2, rf.b2);
    let gm = gamma(thz.fading.mu);
    let z = -b2 / c1p;
    let q = 2.0 / alpha;
    let first = a1 * c1.powf(-phi / alpha) * gm * rf_mean_snr(rf) / phi;
    let t1 = -gamma(1.0 + q + 2.0 * mu)
        * gauss_2f1_reg(1.0 + q + mu, 1.0 + q + 2.0 * mu, 2.0 + q + mu, z)?
        / (alpha * mu + alpha + 2.0);
    let t2 = gamma((alpha * (mu + b1 + 1.0) + phi + 2.0) / alpha)
        * gauss_2f1_reg(
            (alpha * mu + alpha + phi + 2.0) / alpha,
            (alpha * (mu + b1 + 1.0) + phi + 2.0) / alpha,
            (alpha * (mu + 2.0) + phi + 2.0) / alpha,
            z,
        )?
        / (alpha * mu + alpha + phi + 2.0);
    let pref = alpha
        * a1
        * a2
        * c1.powf(-phi / alpha)
        * c1p.powf(-(alpha * mu + alpha + 2.0) / alpha)
        * rf.gamma0;
    Ok(first + pref * (t1 + t2) / (phi * gm))
}

/// η1 as typeset (natural logs, printed A1).
pub fn eta1(thz: &ThzChannelConstants) -> Result<f64> {
    let (alpha, mu, phi) = (thz.fading.alpha, thz.fading.mu, thz.pointing.phi);
    let (a1, c1) = (thz.printed_a1(), thz.c1);
    let num =
        -2.0 * (alpha + phi * c1.ln()) + alpha * phi * thz.gamma0.ln() + 2.0 * phi * digamma(mu)?;
    Ok(a1 * c1.powf(-phi / alpha) * gamma(mu) * num / (alpha * phi * phi * LN_2))
}

/// η12 as typeset, including the leading "+" on the sum.
pub fn eta12(thz: &ThzChannelConstants, rf: &RfChannelConstants) -> Result<f64> {
    let n = integer_mu(rf.fading.mu)?;
    let (b2p, _) = coupling_constants(thz, rf);
    let (alpha, phi) = (thz.fading.alpha, thz.pointing.phi);
    let (a1, b1, c1) = (thz.printed_a1(), thz.b1, thz.c1);
    let chi = thz.gamma0.powf(0.5 * alpha);
    let mut sum = 0.0;
    for k in 0..n {
        let kf = k as f64;
        let outer = 1.0 - phi / alpha - kf;
        let g_a = printed_bivariate(outer, b1, c1 / b2p, chi / b2p)?;
        let g_b = printed_bivariate(outer, b1, c1 / b2p, 1.0 / (-chi / b2p))?;
        sum += 2.0 * a1 * b2p.powf(-phi / alpha) / (alpha * alpha * LN_2 * gamma(kf + 1.0))
            * (g_a - g_b);
    }
    Ok(eta1(thz)? + sum)
}

/// η21 as typeset.
pub fn eta21(thz: &ThzChannelConstants, rf: &RfChannelConstants) -> Result<f64> {
    let n = integer_mu(thz.fading.mu)?;
    let (_, c1p) = coupling_constants(thz, rf);
    let (alpha, phi) = (thz.fading.alpha, thz.pointing.phi);
    let mu = rf.fading.mu;
    let (a1, b1, c1) = (thz.printed_a1(), thz.b1, thz.c1);
    let (a2, b2) = (rf.a2, rf.b2);
    let gm = gamma(thz.fading.mu);
    let chi = rf.gamma0.powf(0.5 * alpha);
    let b = phi / alpha;
    let first = a1 * c1.powf(b) * gm / phi * rf_log_snr(rf)?;
    let outer = 1.0 - mu - b;
    let g_a = printed_bivariate(outer, b1, c1p / b2, chi / b2)?;
    let g_b = printed_bivariate(outer, b1, c1p / b2, -chi / b2)?;
    let second = 2.0 * a1 * a2 * c1.powf(-b) * c1p * b2.powf(-(mu + b)) / (gm * phi * LN_2 * alpha)
        * (g_a - g_b);
    let p = b2 + c1p;
    let spec = MeijerGSpec::new(1, 3, vec![1.0, 1.0, 1.0 - mu], vec![1.0, 0.0])?;
    let mut third = 0.0;
    for k in 0..n {
        let kf = k as f64;
        let ga = meijer_g(&spec, chi / p)?;
        let gb = meijer_g(&spec, p / chi)?;
        third += 2.0 * a1 * a2 * c1.powf(-b) * c1p.powf(kf) * p.powf(mu + kf)
            / (alpha * phi * LN_2 * gamma(kf + 1.0))
            * (ga - gb);
    }
    Ok(first + second - third)
}

/// E[log2 γ2] printed form equals the derived one; re-exported for symmetry.
pub fn eta2(rf: &RfChannelConstants) -> Result<f64> {
    rf_log_snr(rf)
}

/// The printed η1 agrees with the derived one whenever Ω = 1.
pub fn eta1_matches_derived(thz: &ThzChannelConstants) -> Result<bool> {
    Ok((eta1(thz)? - thz_log_snr(thz)?).abs() <= 1e-12 * thz_log_snr(thz)?.abs().max(1.0))
}
