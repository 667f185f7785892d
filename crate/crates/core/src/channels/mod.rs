//! Channel statistics for the two hops and the link budgets that set their
//! faded-free SNRs.
//!
//! THz hop: |h| = h_f·h_p with α-μ fading h_f and power-law pointing gain
//! h_p ∈ (0, S0]. With t = |h|^α the normalized variable U = C1·t is the
//! product of a Gamma(μ) variate and a Beta(φ/α, 1) variate, which gives the
//! density b u^{b−1} Γ(B1, u)/Γ(μ) with b = φ/α. All THz densities are
//! evaluated through that form with the scaled incomplete gamma, so they stay
//! finite when Γ(B1, ·) alone would overflow (large φ).
//!
//! RF hop: α-μ fading only, B2·|h|^α ~ Gamma(μ).

mod budget;

pub use budget::{
    db_to_linear, faded_free_snr, faded_free_snr_at, linear_to_db, path_gain, rf_path_loss_db,
    thz_path_gain, LinkBudget, LinkKind,
};

use crate::error::{Error, Result};
use crate::oracle::quad::{integrate_pieces, Scheme, Tolerance};
use crate::specfun::{ln_gamma, reg_lower_gamma, upper_inc_gamma, upper_inc_gamma_scaled};

const INTEGER_TOL: f64 = 1e-9;
/// Required agreement between the closed-form and quadrature A1.
pub const A1_AGREEMENT: f64 = 1e-9;

/// α-μ fading triple of one hop.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FadingParams {
    pub alpha: f64,
    pub mu: f64,
    pub omega: f64,
}

impl FadingParams {
    pub fn new(alpha: f64, mu: f64, omega: f64) -> Result<Self> {
        if !(alpha > 0.0 && mu > 0.0 && omega > 0.0)
            || !(alpha.is_finite() && mu.is_finite() && omega.is_finite())
        {
            return Err(Error::InvalidParameter(format!(
                "fading needs α, μ, Ω > 0 (got {alpha}, {mu}, {omega})"
            )));
        }
        Ok(FadingParams { alpha, mu, omega })
    }

    /// μ as an integer when it is within 1e−9 of one.
    pub fn integer_mu(&self) -> Option<usize> {
        let r = self.mu.round();
        ((self.mu - r).abs() < INTEGER_TOL && r >= 1.0).then_some(r as usize)
    }
}

/// Pointing-error pair (φ, S0).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PointingParams {
    pub phi: f64,
    pub s0: f64,
}

impl PointingParams {
    pub fn new(phi: f64, s0: f64) -> Result<Self> {
        if !(phi > 0.0 && phi.is_finite() && s0 > 0.0 && s0 <= 1.0) {
            return Err(Error::InvalidParameter(format!(
                "pointing needs φ > 0 and 0 < S0 ≤ 1 (got {phi}, {s0})"
            )));
        }
        Ok(PointingParams { phi, s0 })
    }
}

/// Normalized α-μ amplitude density
/// α μ^μ x^{αμ−1}/(Ω^{αμ} Γ(μ)) · exp(−μ x^α/Ω^α).
pub fn alpha_mu_pdf(p: &FadingParams, x: f64) -> Result<f64> {
    if !(x > 0.0) {
        return Err(Error::domain("alpha_mu_pdf", format!("x={x} must be > 0")));
    }
    let y = x / p.omega;
    let ln = p.alpha.ln() + p.mu * p.mu.ln() + (p.alpha * p.mu - 1.0) * y.ln()
        - p.mu * y.powf(p.alpha)
        - ln_gamma(p.mu)
        - p.omega.ln();
    Ok(ln.exp())
}

/// Pointing gain density φ S0^{−φ} x^{φ−1} on (0, S0], zero above S0.
pub fn pointing_pdf(p: &PointingParams, x: f64) -> Result<f64> {
    if !(x > 0.0) {
        return Err(Error::domain("pointing_pdf", format!("x={x} must be > 0")));
    }
    if x > p.s0 {
        return Ok(0.0);
    }
    Ok(p.phi / p.s0 * (x / p.s0).powf(p.phi - 1.0))
}

/// Constants of the THz combined-channel density A1 x^{φ−1} Γ(B1, C1 x^α).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThzChannelConstants {
    /// Normalizing constant; overflows to +∞ for extreme φ, where the
    /// normalized forms used internally stay finite.
    pub a1: f64,
    pub b1: f64,
    pub c1: f64,
    pub gamma0: f64,
    pub fading: FadingParams,
    pub pointing: PointingParams,
}

fn check_gamma0(g: f64) -> Result<()> {
    if g > 0.0 && g.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!(
            "faded-free SNR γ⁰={g} must be > 0"
        )))
    }
}

/// u^{μ−1} e^{−u} g(B1, u) with g the scaled incomplete gamma. Near zero
/// with B1 > 0 the scaling overflows, so it is evaluated as u^{b−1} Γ(B1, u).
fn u_kernel(mu: f64, b1: f64, u: f64) -> Result<f64> {
    if b1 > 0.0 && u < 1.0 {
        let b = mu - b1;
        return Ok(((b - 1.0) * u.ln()).exp() * upper_inc_gamma(b1, u)?);
    }
    Ok(((mu - 1.0) * u.ln() - u).exp() * upper_inc_gamma_scaled(b1, u)?)
}

/// ∫₀^∞ u^{μ−1} e^{−u} g(B1, u) du with g the scaled incomplete gamma;
/// equals Γ(μ)/b analytically.
fn normalization_integral(mu: f64, b1: f64) -> Result<f64> {
    let f = |u: f64| u_kernel(mu, b1, u).unwrap_or(f64::NAN);
    let top = mu + 40.0 + 12.0 * mu.sqrt();
    let mut brk = vec![0.0, 1e-3, 0.1, 1.0];
    let mut x = 2.0;
    while x < top {
        brk.push(x);
        x += 2.0 + mu.sqrt();
    }
    brk.push(top);
    integrate_pieces(
        f,
        &brk,
        Scheme::TanhSinh,
        Tolerance {
            abs: 1e-15,
            rel: 1e-13,
        },
    )
    .map(|q| q.value)
}

impl ThzChannelConstants {
    /// Builds the constants and checks the closed-form A1 against a
    /// quadrature renormalization of the density.
    pub fn new(fading: FadingParams, pointing: PointingParams, gamma0: f64) -> Result<Self> {
        check_gamma0(gamma0)?;
        let (alpha, mu, omega) = (fading.alpha, fading.mu, fading.omega);
        let (phi, s0) = (pointing.phi, pointing.s0);
        let b = phi / alpha;
        let b1 = mu - b;
        let c1 = mu / (omega * s0).powf(alpha);
        let ln_a1 = phi.ln() + b * mu.ln() - phi * (s0 * omega).ln() - ln_gamma(mu);
        let numeric = normalization_integral(mu, b1)?;
        let analytic = (ln_gamma(mu) - b.ln()).exp();
        if ((numeric - analytic) / analytic).abs() > A1_AGREEMENT {
            return Err(Error::no_conv(
                "ThzChannelConstants",
                format!("A1 renormalization {numeric:e} vs closed form {analytic:e}"),
            ));
        }
        Ok(ThzChannelConstants {
            a1: ln_a1.exp(),
            b1,
            c1,
            gamma0,
            fading,
            pointing,
        })
    }

    /// Same channel at a different faded-free SNR.
    pub fn with_gamma0(&self, gamma0: f64) -> Result<Self> {
        check_gamma0(gamma0)?;
        Ok(ThzChannelConstants { gamma0, ..*self })
    }

    /// b = φ/α.
    pub fn b(&self) -> f64 {
        self.pointing.phi / self.fading.alpha
    }

    /// A1 with Ω^α in place of Ω^φ in the denominator.
    pub fn printed_a1(&self) -> f64 {
        let (alpha, mu, omega) = (self.fading.alpha, self.fading.mu, self.fading.omega);
        let (phi, s0) = (self.pointing.phi, self.pointing.s0);
        phi * s0.powf(-phi) * mu.powf(phi / alpha) / (omega.powf(alpha) * ln_gamma(mu).exp())
    }

    /// Density of U = C1·|h|^α.
    pub fn u_pdf(&self, u: f64) -> Result<f64> {
        if !(u > 0.0) {
            return Err(Error::domain("thz u density", format!("u={u} must be > 0")));
        }
        let mu = self.fading.mu;
        Ok(self.b() * (-ln_gamma(mu)).exp() * u_kernel(mu, self.b1, u)?)
    }

    /// Distribution function of U.
    pub fn u_cdf(&self, u: f64) -> Result<f64> {
        if u < 0.0 || u.is_nan() {
            return Err(Error::domain("thz u cdf", format!("u={u} must be ≥ 0")));
        }
        if u == 0.0 {
            return Ok(0.0);
        }
        if u.is_infinite() {
            return Ok(1.0);
        }
        let mu = self.fading.mu;
        let p = reg_lower_gamma(mu, u)?;
        let rest = u * (-ln_gamma(mu)).exp() * u_kernel(mu, self.b1, u)?;
        Ok((p + rest).min(1.0))
    }

    /// u = C1 (γ/γ1⁰)^{α/2}.
    pub fn u_of_snr(&self, gamma: f64) -> f64 {
        self.c1 * (gamma / self.gamma0).powf(0.5 * self.fading.alpha)
    }
}

/// Combined fading–pointing amplitude density A1 x^{φ−1} Γ(B1, C1 x^α).
pub fn thz_combined_pdf(c: &ThzChannelConstants, x: f64) -> Result<f64> {
    if !(x > 0.0) {
        return Err(Error::domain(
            "thz_combined_pdf",
            format!("x={x} must be > 0"),
        ));
    }
    let alpha = c.fading.alpha;
    let u = c.c1 * x.powf(alpha);
    if u == 0.0 {
        return Ok(0.0);
    }
    Ok(alpha * u / x * c.u_pdf(u)?)
}

fn snr_density_at_zero(exponent: f64) -> f64 {
    // density ~ γ^{exponent}
    if exponent > 0.0 {
        0.0
    } else {
        f64::INFINITY
    }
}

/// THz SNR density f1(γ).
pub fn thz_snr_pdf(c: &ThzChannelConstants, gamma: f64) -> Result<f64> {
    if gamma < 0.0 || gamma.is_nan() {
        return Err(Error::domain(
            "thz_snr_pdf",
            format!("γ={gamma} must be ≥ 0"),
        ));
    }
    if gamma == 0.0 {
        return Ok(snr_density_at_zero(
            0.5 * c.fading.alpha * c.fading.mu - 1.0,
        ));
    }
    let u = c.u_of_snr(gamma);
    if u == 0.0 {
        return Ok(snr_density_at_zero(
            0.5 * c.fading.alpha * c.fading.mu - 1.0,
        ));
    }
    Ok(c.u_pdf(u)? * 0.5 * c.fading.alpha * u / gamma)
}

/// THz SNR distribution function F1(γ), valid for any μ > 0.
pub fn thz_snr_cdf(c: &ThzChannelConstants, gamma: f64) -> Result<f64> {
    if gamma < 0.0 || gamma.is_nan() {
        return Err(Error::domain(
            "thz_snr_cdf",
            format!("γ={gamma} must be ≥ 0"),
        ));
    }
    c.u_cdf(c.u_of_snr(gamma))
}

/// Constants of the RF α-μ hop.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RfChannelConstants {
    pub a2: f64,
    pub b2: f64,
    pub gamma0: f64,
    pub fading: FadingParams,
}

impl RfChannelConstants {
    pub fn new(fading: FadingParams, gamma0: f64) -> Result<Self> {
        check_gamma0(gamma0)?;
        let (alpha, mu, omega) = (fading.alpha, fading.mu, fading.omega);
        Ok(RfChannelConstants {
            a2: (mu * mu.ln() - alpha * mu * omega.ln()).exp(),
            b2: mu / omega.powf(alpha),
            gamma0,
            fading,
        })
    }

    pub fn with_gamma0(&self, gamma0: f64) -> Result<Self> {
        check_gamma0(gamma0)?;
        Ok(RfChannelConstants { gamma0, ..*self })
    }

    /// v = B2 (γ/γ2⁰)^{α/2}, a Gamma(μ) variate.
    pub fn v_of_snr(&self, gamma: f64) -> f64 {
        self.b2 * (gamma / self.gamma0).powf(0.5 * self.fading.alpha)
    }
}

/// RF SNR density f2(γ).
pub fn rf_snr_pdf(c: &RfChannelConstants, gamma: f64) -> Result<f64> {
    if gamma < 0.0 || gamma.is_nan() {
        return Err(Error::domain(
            "rf_snr_pdf",
            format!("γ={gamma} must be ≥ 0"),
        ));
    }
    let exponent = 0.5 * c.fading.alpha * c.fading.mu - 1.0;
    let v = c.v_of_snr(gamma);
    if gamma == 0.0 || v == 0.0 {
        return Ok(snr_density_at_zero(exponent));
    }
    let mu = c.fading.mu;
    let gamma_pdf = ((mu - 1.0) * v.ln() - v - ln_gamma(mu)).exp();
    Ok(gamma_pdf * 0.5 * c.fading.alpha * v / gamma)
}

/// RF SNR distribution function F2(γ) = 1 − Γ(μ, B2 (γ/γ2⁰)^{α/2})/Γ(μ).
pub fn rf_snr_cdf(c: &RfChannelConstants, gamma: f64) -> Result<f64> {
    if gamma < 0.0 || gamma.is_nan() {
        return Err(Error::domain(
            "rf_snr_cdf",
            format!("γ={gamma} must be ≥ 0"),
        ));
    }
    reg_lower_gamma(c.fading.mu, c.v_of_snr(gamma))
}

/// (B2′, C1′) = (B2 √(γ1⁰/γ2⁰), C1 √(γ2⁰/γ1⁰)).
pub fn coupling_constants(thz: &ThzChannelConstants, rf: &RfChannelConstants) -> (f64, f64) {
    let r = (thz.gamma0 / rf.gamma0).sqrt();
    (rf.b2 * r, thz.c1 / r)
}

/// Coupling constants that map each hop's CDF onto the other hop's
/// variable: B2 (γ1⁰/γ2⁰)^{α/2} and C1 (γ2⁰/γ1⁰)^{α/2}. They coincide with
/// [`coupling_constants`] only for α = 1.
pub fn exact_coupling_constants(thz: &ThzChannelConstants, rf: &RfChannelConstants) -> (f64, f64) {
    let r = thz.gamma0 / rf.gamma0;
    (
        rf.b2 * r.powf(0.5 * rf.fading.alpha),
        thz.c1 * r.powf(-0.5 * thz.fading.alpha),
    )
}
