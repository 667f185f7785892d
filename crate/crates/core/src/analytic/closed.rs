//! Closed-form average SNR and capacity-bound terms, re-derived from the
//! defining integrals with the exact coupling constants.
//!
//! Writing t = (γ/γ1⁰)^{α/2} for the THz hop, C1·t = G·W with G ~ Gamma(μ1)
//! and W ~ Beta(b, 1), b = φ/α, and the RF CDF becomes P(μ2, β t) with
//! β = B2 (γ1⁰/γ2⁰)^{α/2}. In the RF variable τ the THz CDF is
//! P(μ1, C1′τ) + (C1′τ)^b Γ(B1, C1′τ)/Γ(μ1). Both hops must share α.

use std::f64::consts::LN_2;

use crate::channels::{exact_coupling_constants, RfChannelConstants, ThzChannelConstants};
use crate::error::{Error, Result};
use crate::specfun::{
    bivariate_meijer_g, digamma, gauss_2f1, ln_gamma, BivariateGSpec, MeijerGSpec,
};

pub(crate) fn same_alpha(thz: &ThzChannelConstants, rf: &RfChannelConstants) -> Result<()> {
    if (thz.fading.alpha - rf.fading.alpha).abs() > 1e-12 * thz.fading.alpha {
        return Err(Error::Usage(format!(
            "closed forms need a common α (THz α={}, RF α={})",
            thz.fading.alpha, rf.fading.alpha
        )));
    }
    Ok(())
}

/// ln of ∫₀^∞ x^{m−1} e^{−βx} Γ(ν, ax) dx
/// = a^ν Γ(m+ν) / (m (a+β)^{m+ν}) ₂F₁(1, m+ν; m+1; β/(a+β)).
pub(crate) fn ln_upper_laplace(m: f64, nu: f64, a: f64, beta: f64) -> Result<f64> {
    if !(m > 0.0 && m + nu > 0.0 && a > 0.0 && beta >= 0.0) {
        return Err(Error::InvalidParameter(format!(
            "upper Laplace integral needs m > 0, m+ν > 0, a > 0, β ≥ 0 (m={m}, ν={nu}, a={a}, β={beta})"
        )));
    }
    let s = a + beta;
    let f = gauss_2f1(1.0, m + nu, m + 1.0, beta / s)?;
    Ok(nu * a.ln() + ln_gamma(m + nu) - m.ln() - (m + nu) * s.ln() + f.ln())
}

/// ln of ∫₀^∞ x^{m−1} e^{−βx} γ(ν, ax) dx
/// = a^ν Γ(m+ν) / (ν (a+β)^{m+ν}) ₂F₁(1, m+ν; ν+1; a/(a+β)).
pub(crate) fn ln_lower_laplace(m: f64, nu: f64, a: f64, beta: f64) -> Result<f64> {
    if !(nu > 0.0 && m + nu > 0.0 && a > 0.0 && beta > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "lower Laplace integral needs ν > 0, m+ν > 0, a, β > 0 (m={m}, ν={nu}, a={a}, β={beta})"
        )));
    }
    let s = a + beta;
    let f = gauss_2f1(1.0, m + nu, nu + 1.0, a / s)?;
    Ok(nu * a.ln() + ln_gamma(m + nu) - nu.ln() - (m + nu) * s.ln() + f.ln())
}

/// The four terms of E[min(γ1, γ2)] = γ1 + γ2 − γ12 − γ21.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AvgSnrTerms {
    pub gamma1: f64,
    pub gamma2: f64,
    pub gamma12: f64,
    pub gamma21: f64,
}

impl AvgSnrTerms {
    pub fn total(&self) -> f64 {
        self.gamma1 + self.gamma2 - self.gamma12 - self.gamma21
    }
}

/// E[γ1] = γ1⁰ C1^{−2/α} Γ(μ+2/α)/Γ(μ) · φ/(φ+2).
pub fn thz_mean_snr(thz: &ThzChannelConstants) -> f64 {
    let (alpha, mu, phi) = (thz.fading.alpha, thz.fading.mu, thz.pointing.phi);
    let q = 2.0 / alpha;
    thz.gamma0 * (-q * thz.c1.ln() + ln_gamma(mu + q) - ln_gamma(mu)).exp() * phi / (phi + 2.0)
}

/// E[γ2] = γ2⁰ B2^{−2/α} Γ(μ+2/α)/Γ(μ).
pub fn rf_mean_snr(rf: &RfChannelConstants) -> f64 {
    let (alpha, mu) = (rf.fading.alpha, rf.fading.mu);
    let q = 2.0 / alpha;
    rf.gamma0 * (-q * rf.b2.ln() + ln_gamma(mu + q) - ln_gamma(mu)).exp()
}

/// γ12 = ∫ γ f1 F2 dγ.
pub fn gamma12(thz: &ThzChannelConstants, rf: &RfChannelConstants) -> Result<f64> {
    same_alpha(thz, rf)?;
    let (beta, _) = exact_coupling_constants(thz, rf);
    let (alpha, mu1, mu2) = (thz.fading.alpha, thz.fading.mu, rf.fading.mu);
    let (b, b1, c1) = (thz.b(), thz.b1, thz.c1);
    let s = 2.0 / alpha + b;
    // tail integral ∫_τ^∞ t^{s−1}Γ(B1, C1 t) dt = (C1^{−s}Γ(B1+s, C1τ) − τ^sΓ(B1, C1τ))/s
    let ln_pref = b.ln() + b * c1.ln() - ln_gamma(mu1) - s.ln() + mu2 * beta.ln() - ln_gamma(mu2);
    let first = (ln_pref - s * c1.ln() + ln_upper_laplace(mu2, b1 + s, c1, beta)?).exp();
    let second = (ln_pref + ln_upper_laplace(mu2 + s, b1, c1, beta)?).exp();
    Ok(thz.gamma0 * (first - second))
}

/// γ21 = ∫ γ f2 F1 dγ.
pub fn gamma21(thz: &ThzChannelConstants, rf: &RfChannelConstants) -> Result<f64> {
    same_alpha(thz, rf)?;
    let (_, c1p) = exact_coupling_constants(thz, rf);
    let (alpha, mu1, mu2) = (thz.fading.alpha, thz.fading.mu, rf.fading.mu);
    let (b, b1, b2) = (thz.b(), thz.b1, rf.b2);
    let m = mu2 + 2.0 / alpha;
    let ln_pref = mu2 * b2.ln() - ln_gamma(mu2) - ln_gamma(mu1);
    let lower = (ln_pref + ln_lower_laplace(m, mu1, c1p, b2)?).exp();
    let rest = (ln_pref + b * c1p.ln() + ln_upper_laplace(m + b, b1, c1p, b2)?).exp();
    Ok(rf.gamma0 * (lower + rest))
}

pub fn avg_snr_terms(thz: &ThzChannelConstants, rf: &RfChannelConstants) -> Result<AvgSnrTerms> {
    Ok(AvgSnrTerms {
        gamma1: thz_mean_snr(thz),
        gamma2: rf_mean_snr(rf),
        gamma12: gamma12(thz, rf)?,
        gamma21: gamma21(thz, rf)?,
    })
}

/// The four terms of the bound η = η1 + η2 − η12 − η21 (bits/s/Hz).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CapacityTerms {
    pub eta1: f64,
    pub eta2: f64,
    pub eta12: f64,
    pub eta21: f64,
}

impl CapacityTerms {
    pub fn total(&self) -> f64 {
        self.eta1 + self.eta2 - self.eta12 - self.eta21
    }
}

/// E[log2 γ1] = [ln γ1⁰ + (2/α)(ψ(μ) − ln C1) − 2/φ]/ln 2.
pub fn thz_log_snr(thz: &ThzChannelConstants) -> Result<f64> {
    let (alpha, mu, phi) = (thz.fading.alpha, thz.fading.mu, thz.pointing.phi);
    let q = 2.0 / alpha;
    Ok((thz.gamma0.ln() + q * (digamma(mu)? - thz.c1.ln()) - 2.0 / phi) / LN_2)
}

/// E[log2 γ2] = [ln γ2⁰ + (2/α)(ψ(μ) − ln B2)]/ln 2.
pub fn rf_log_snr(rf: &RfChannelConstants) -> Result<f64> {
    let q = 2.0 / rf.fading.alpha;
    Ok((rf.gamma0.ln() + q * (digamma(rf.fading.mu)? - rf.b2.ln())) / LN_2)
}

fn gamma_block(b1: f64) -> Result<MeijerGSpec> {
    // Γ(B1, x) = G^{2,0}_{1,2}(x | 1; B1, 0)
    MeijerGSpec::new(2, 0, vec![1.0], vec![b1, 0.0])
}

fn log_block() -> Result<MeijerGSpec> {
    // ln(1 + x) = G^{1,2}_{2,2}(x | 1, 1; 1, 0)
    MeijerGSpec::new(1, 2, vec![1.0, 1.0], vec![1.0, 0.0])
}

fn inverted_log_block() -> Result<MeijerGSpec> {
    // ln(1 + 1/x) = G^{2,1}_{2,2}(x | 0, 1; 0, 0)
    MeijerGSpec::new(2, 1, vec![0.0, 1.0], vec![0.0, 0.0])
}

/// ∫₀^∞ t^{ρ−1} e^{−βt} Γ(B1, Ct) ln(χt) dt through two bivariate Meijer
/// G values, using ln(χt) = ln(1 + χt) − ln(1 + 1/(χt)).
pub fn log_gamma_integral(rho: f64, beta: f64, c: f64, b1: f64, chi: f64) -> Result<f64> {
    let (x, y) = (c / beta, chi / beta);
    let up = BivariateGSpec::product_integral(rho, gamma_block(b1)?, log_block()?)?;
    let down = BivariateGSpec::product_integral(rho, gamma_block(b1)?, inverted_log_block()?)?;
    let g_up = bivariate_meijer_g(&up, x, y)?;
    let g_down = bivariate_meijer_g(&down, x, y)?;
    Ok(beta.powf(-rho) * (g_up - g_down))
}

fn integer_order(mu: f64, which: &str) -> Result<usize> {
    let r = mu.round();
    if (mu - r).abs() < 1e-9 && r >= 1.0 {
        Ok(r as usize)
    } else {
        Err(Error::Usage(format!(
            "closed-form capacity needs integer μ on the {which} hop (μ={mu})"
        )))
    }
}

/// η12 = ∫ log2 γ f1 F2 dγ (integer RF μ).
pub fn eta12(thz: &ThzChannelConstants, rf: &RfChannelConstants) -> Result<f64> {
    same_alpha(thz, rf)?;
    let n = integer_order(rf.fading.mu, "RF")?;
    let (beta, _) = exact_coupling_constants(thz, rf);
    let (alpha, mu1) = (thz.fading.alpha, thz.fading.mu);
    let (b, b1, c1) = (thz.b(), thz.b1, thz.c1);
    let chi = thz.gamma0.powf(0.5 * alpha);
    let ln_pref = b.ln() + b * c1.ln() - ln_gamma(mu1);
    let mut sum = 0.0;
    for k in 0..n {
        let kf = k as f64;
        let l = log_gamma_integral(b + kf, beta, c1, b1, chi)?;
        sum += (ln_pref + kf * beta.ln() - ln_gamma(kf + 1.0)).exp() * l;
    }
    Ok(thz_log_snr(thz)? - 2.0 / (alpha * LN_2) * sum)
}

/// η21 = ∫ log2 γ f2 F1 dγ (integer THz μ).
pub fn eta21(thz: &ThzChannelConstants, rf: &RfChannelConstants) -> Result<f64> {
    same_alpha(thz, rf)?;
    let n = integer_order(thz.fading.mu, "THz")?;
    let (_, c1p) = exact_coupling_constants(thz, rf);
    let (alpha, mu1, mu2) = (thz.fading.alpha, thz.fading.mu, rf.fading.mu);
    let (b, b1, b2) = (thz.b(), thz.b1, rf.b2);
    let chi = rf.gamma0.powf(0.5 * alpha);
    let lnchi = chi.ln();
    // ∫ τ^{m−1} e^{−pτ} ln(χτ) dτ = Γ(m) p^{−m} (ln χ + ψ(m) − ln p), scaled by B2^{μ2}/Γ(μ2)
    let log_moment = |m: f64, p: f64| -> Result<f64> {
        let scale = (mu2 * b2.ln() - ln_gamma(mu2) + ln_gamma(m) - m * p.ln()).exp();
        Ok(scale * (lnchi + digamma(m)? - p.ln()))
    };
    let mut acc = log_moment(mu2, b2)?;
    let p = b2 + c1p;
    for k in 0..n {
        let kf = k as f64;
        acc -= (kf * c1p.ln() - ln_gamma(kf + 1.0)).exp() * log_moment(mu2 + kf, p)?;
    }
    let l = log_gamma_integral(mu2 + b, b2, c1p, b1, chi)?;
    acc += (mu2 * b2.ln() - ln_gamma(mu2) + b * c1p.ln() - ln_gamma(mu1)).exp() * l;
    Ok(2.0 / (alpha * LN_2) * acc)
}

pub fn capacity_terms(thz: &ThzChannelConstants, rf: &RfChannelConstants) -> Result<CapacityTerms> {
    Ok(CapacityTerms {
        eta1: thz_log_snr(thz)?,
        eta2: rf_log_snr(rf)?,
        eta12: eta12(thz, rf)?,
        eta21: eta21(thz, rf)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::integrals::{quad_log_gamma_integral, quad_power_gamma_integral};
    use crate::oracle::quad::Scheme;

    #[test]
    fn laplace_integrals_match_quadrature() {
        for &(m, nu, a, beta) in &[
            (4.0, -0.2724, 291.2, 0.7),
            (5.0, 4.0, 30.0, 4.0),
            (2.5, 1.3, 0.4, 9.0),
        ] {
            let cf = ln_upper_laplace(m, nu, a, beta).unwrap().exp();
            let q = quad_power_gamma_integral(m, nu, a, beta, Scheme::GaussKronrod)
                .unwrap()
                .value;
            assert!(
                ((cf - q) / q).abs() < 1e-10,
                "{m} {nu} {a} {beta}: {cf} vs {q}"
            );
        }
        // lower form: Γ(m)β^{−m}Γ(ν) minus the upper form
        let (m, nu, a, beta) = (5.0, 4.0, 30.0, 4.0);
        let lower = ln_lower_laplace(m, nu, a, beta).unwrap().exp();
        let upper = ln_upper_laplace(m, nu, a, beta).unwrap().exp();
        let whole = (ln_gamma(m) - m * beta.ln() + ln_gamma(nu)).exp();
        assert!(((lower + upper) / whole - 1.0).abs() < 1e-12);
    }

    #[test]
    fn log_integral_matches_quadrature() {
        let (rho, beta, c, b1, chi) = (4.2724, 0.7, 291.2, -0.2724, 31.6);
        let g = log_gamma_integral(rho, beta, c, b1, chi).unwrap();
        let q = quad_log_gamma_integral(rho, beta, c, b1, chi, Scheme::TanhSinh)
            .unwrap()
            .value;
        assert!(((g - q) / q).abs() < 1e-6, "{g} vs {q}");
    }
}
