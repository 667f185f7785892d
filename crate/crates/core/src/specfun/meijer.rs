//! Univariate Meijer G-function of real argument.
//!
//! G^{m,n}_{p,q}(x | a; b) = (1/2πi) ∫_L Φ(s) x^s ds with
//! Φ(s) = Π_{j<m} Γ(b_j − s) Π_{j<n} Γ(1 − a_j + s) / (Π_{j≥m} Γ(1 − b_j + s) Π_{j≥n} Γ(a_j − s)).
//!
//! L is a vertical line Re s = c separating the two pole families. The value
//! is the trapezoidal sum along L with step halving; the real-axis minimum of
//! |Φ(c) x^c| fixes c so that cancellation along the line stays small.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::specfun::complex::ln_gamma_c;
use crate::specfun::gamma::upper_inc_gamma;

/// Parameters of a univariate Meijer G-function.
#[derive(Debug, Clone, PartialEq)]
pub struct MeijerGSpec {
    pub m: usize,
    pub n: usize,
    pub a: Vec<f64>,
    pub b: Vec<f64>,
}

impl MeijerGSpec {
    pub fn new(m: usize, n: usize, a: Vec<f64>, b: Vec<f64>) -> Result<Self> {
        if m > b.len() || n > a.len() {
            return Err(Error::InvalidParameter(format!(
                "orders m={m}, n={n} exceed q={}, p={}",
                b.len(),
                a.len()
            )));
        }
        if a.iter().chain(b.iter()).any(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter(
                "non-finite Meijer G parameter".into(),
            ));
        }
        for (i, ai) in a.iter().take(n).enumerate() {
            for (j, bj) in b.iter().take(m).enumerate() {
                let gap = ai - bj;
                let r = gap.round();
                if r >= 1.0 && (gap - r).abs() < 1e-12 {
                    return Err(Error::PoleCollision {
                        upper: i,
                        lower: j,
                        gap,
                    });
                }
            }
        }
        Ok(MeijerGSpec { m, n, a, b })
    }

    pub fn p(&self) -> usize {
        self.a.len()
    }

    pub fn q(&self) -> usize {
        self.b.len()
    }

    /// m + n − (p + q)/2; the vertical-line integral needs this positive.
    pub fn delta(&self) -> f64 {
        (self.m + self.n) as f64 - 0.5 * (self.p() + self.q()) as f64
    }

    /// ln Φ(s), modulo 2πi.
    pub fn ln_kernel(&self, s: Complex64) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for (j, &bj) in self.b.iter().enumerate() {
            if j < self.m {
                acc += ln_gamma_c(bj - s);
            } else {
                acc -= ln_gamma_c(1.0 - bj + s);
            }
        }
        for (j, &aj) in self.a.iter().enumerate() {
            if j < self.n {
                acc += ln_gamma_c(1.0 - aj + s);
            } else {
                acc -= ln_gamma_c(aj - s);
            }
        }
        acc
    }

    /// Open interval of admissible Re s for the contour, (max a_j − 1, min b_j)
    /// over the pole-carrying factors.
    pub fn strip(&self) -> (f64, f64) {
        let lo = self.a[..self.n]
            .iter()
            .map(|a| a - 1.0)
            .fold(f64::NEG_INFINITY, f64::max);
        let hi = self.b[..self.m]
            .iter()
            .copied()
            .fold(f64::INFINITY, f64::min);
        (lo, hi)
    }

    /// Matches one of the closed-form reductions; returns its value.
    fn reduction(&self, x: f64) -> Option<Result<f64>> {
        let close = |u: f64, v: f64| (u - v).abs() < 1e-14;
        match (self.m, self.n, self.p(), self.q()) {
            (1, 0, 0, 1) => Some(Ok(x.powf(self.b[0]) * (-x).exp())),
            (2, 0, 1, 2) => {
                let (a, b0, b1) = (self.a[0], self.b[0], self.b[1]);
                let (s, shift) = if close(a, b1 + 1.0) {
                    (b0 - b1, b1)
                } else if close(a, b0 + 1.0) {
                    (b1 - b0, b0)
                } else {
                    return None;
                };
                Some(upper_inc_gamma(s, x).map(|g| x.powf(shift) * g))
            }
            (1, 2, 2, 2) => {
                let beta = self.b[1];
                let one = beta + 1.0;
                if close(self.a[0], one) && close(self.a[1], one) && close(self.b[0], one) {
                    Some(Ok(x.powf(beta) * x.ln_1p()))
                } else {
                    None
                }
            }
            _ => None,
        }
    }
}

/// Minimizes a unimodal function on [lo, hi] by golden-section search.
pub(crate) fn golden_min(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
    let r = 0.5 * (5f64.sqrt() - 1.0);
    let mut x1 = hi - r * (hi - lo);
    let mut x2 = lo + r * (hi - lo);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    for _ in 0..80 {
        if (hi - lo).abs() < 1e-6 {
            break;
        }
        if f1 < f2 || f2.is_nan() {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - r * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + r * (hi - lo);
            f2 = f(x2);
        }
    }
    0.5 * (lo + hi)
}

/// Search interval for the contour abscissa inside an open strip.
pub(crate) fn contour_search_range(lo: f64, hi: f64) -> Result<(f64, f64)> {
    if !(lo < hi) {
        return Err(Error::Contour(format!(
            "left poles reach {lo}, right poles start at {hi}"
        )));
    }
    Ok(match (lo.is_finite(), hi.is_finite()) {
        (true, true) => {
            let margin = 0.25 * (hi - lo).min(1.0);
            (lo + margin, hi - margin)
        }
        (true, false) => (lo + 0.25, lo + 60.0),
        (false, true) => (hi - 60.0, hi - 0.25),
        (false, false) => (-30.0, 30.0),
    })
}

/// Contour quadrature of the Mellin–Barnes integral, bypassing the
/// closed-form reductions.
pub fn meijer_g_contour(spec: &MeijerGSpec, x: f64) -> Result<f64> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::domain("meijer_g", format!("x={x} must be > 0")));
    }
    if spec.delta() <= 0.0 {
        return Err(Error::Contour(format!(
            "m+n−(p+q)/2 = {} ≤ 0: integrand does not decay on a vertical line",
            spec.delta()
        )));
    }
    let (lo, hi) = spec.strip();
    let (clo, chi) = contour_search_range(lo, hi)?;
    let lnx = x.ln();
    let c = golden_min(
        |c| spec.ln_kernel(Complex64::new(c, 0.0)).re + c * lnx,
        clo,
        chi,
    );
    let integrand = |y: f64| -> Complex64 {
        let s = Complex64::new(c, y);
        (spec.ln_kernel(s) + s * lnx).exp()
    };

    // truncation: march out until the modulus has decayed far below its peak
    let peak = integrand(0.0).norm();
    let mut y_max = 1.0;
    let mut quiet = 0;
    let mut max_seen = peak;
    let mut y = 0.0;
    while quiet < 6 {
        y += 0.5;
        if y > 4000.0 {
            return Err(Error::Contour(format!(
                "integrand fails to decay along Re s = {c}"
            )));
        }
        let v = integrand(y).norm();
        max_seen = max_seen.max(v);
        if v < 1e-18 * max_seen {
            quiet += 1;
        } else {
            quiet = 0;
            y_max = y + 0.5;
        }
    }

    let f = |y: f64| integrand(y).re / PI;
    let mut h = (PI / (lnx.abs() + 4.0)).min(0.5);
    let mut n = (y_max / h).ceil() as usize;
    h = y_max / n as f64;
    let mut sum = 0.5 * f(0.0) + (1..=n).map(|k| f(k as f64 * h)).sum::<f64>();
    let mut abs_sum: f64 = (0..=n).map(|k| f(k as f64 * h).abs()).sum::<f64>();
    let mut prev = sum * h;
    for _level in 0..14 {
        let odd: f64 = (0..n).map(|k| f((2 * k + 1) as f64 * h * 0.5)).sum();
        abs_sum += (0..n)
            .map(|k| f((2 * k + 1) as f64 * h * 0.5).abs())
            .sum::<f64>();
        sum += odd;
        n *= 2;
        h *= 0.5;
        let cur = sum * h;
        let scale = abs_sum * h;
        if (cur - prev).abs() <= 1e-12 * cur.abs() + 1e-15 * scale {
            return Ok(cur);
        }
        prev = cur;
    }
    Err(Error::Contour(format!(
        "trapezoidal sum unresolved at x={x} (c={c}, Y={y_max}, spec={spec:?})"
    )))
}

/// Meijer G-function G^{m,n}_{p,q}(x | a; b) for x > 0.
///
/// The exponential, incomplete-gamma and log(1+x) members of the family are
/// returned from their closed forms; everything else goes through
/// [`meijer_g_contour`].
pub fn meijer_g(spec: &MeijerGSpec, x: f64) -> Result<f64> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::domain("meijer_g", format!("x={x} must be > 0")));
    }
    if let Some(v) = spec.reduction(x) {
        return v;
    }
    meijer_g_contour(spec, x)
}
