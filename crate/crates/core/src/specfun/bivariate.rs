//! Extended generalized bivariate Meijer G-function.
//!
//! G[x, y] = (1/(2πi)²) ∬ Ψ(s₁+s₂) Φ₁(s₁) Φ₂(s₂) x^{s₁} y^{s₂} ds₁ ds₂
//!
//! where Φ₁, Φ₂ are the Mellin–Barnes kernels of two univariate blocks and
//! the outer kernel is
//!
//! Ψ(u) = Π_{j<n₀} Γ(1 − a⁰_j + u) / (Π_{j≥n₀} Γ(a⁰_j − u) Π_j Γ(1 − b⁰_j + u)).
//!
//! This is the form produced by
//! ∫₀^∞ t^{ρ−1} e^{−σt} G₁(ωt) G₂(ηt) dt = σ^{−ρ} G[ω/σ, η/σ] with a single
//! outer upper parameter a⁰ = 1 − ρ. Evaluation is a tensor trapezoidal rule
//! on the two vertical contours; Ψ depends only on s₁+s₂, so on a common step
//! it is tabulated once along the diagonal.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::specfun::complex::ln_gamma_c;
use crate::specfun::meijer::{contour_search_range, golden_min, MeijerGSpec};

/// Parameters of the bivariate G^{0,n₀:m₁,n₁:m₂,n₂}_{p₀,q₀:p₁,q₁:p₂,q₂}.
#[derive(Debug, Clone, PartialEq)]
pub struct BivariateGSpec {
    pub outer_n: usize,
    pub outer_a: Vec<f64>,
    pub outer_b: Vec<f64>,
    pub first: MeijerGSpec,
    pub second: MeijerGSpec,
}

impl BivariateGSpec {
    pub fn new(
        outer_n: usize,
        outer_a: Vec<f64>,
        outer_b: Vec<f64>,
        first: MeijerGSpec,
        second: MeijerGSpec,
    ) -> Result<Self> {
        if outer_n > outer_a.len() {
            return Err(Error::InvalidParameter(format!(
                "outer n={outer_n} exceeds p={}",
                outer_a.len()
            )));
        }
        if outer_a.iter().chain(&outer_b).any(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter("non-finite outer parameter".into()));
        }
        Ok(BivariateGSpec {
            outer_n,
            outer_a,
            outer_b,
            first,
            second,
        })
    }

    /// Kernel of the Laplace-type product integral
    /// ∫ t^{ρ−1} e^{−σt} G₁(ωt) G₂(ηt) dt.
    pub fn product_integral(rho: f64, first: MeijerGSpec, second: MeijerGSpec) -> Result<Self> {
        Self::new(1, vec![1.0 - rho], vec![], first, second)
    }

    fn ln_outer(&self, u: Complex64) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for (j, &a) in self.outer_a.iter().enumerate() {
            if j < self.outer_n {
                acc += ln_gamma_c(1.0 - a + u);
            } else {
                acc -= ln_gamma_c(a - u);
            }
        }
        for &b in &self.outer_b {
            acc -= ln_gamma_c(1.0 - b + u);
        }
        acc
    }

    /// Lower bound on Re(s₁+s₂) from the outer numerator poles.
    fn outer_floor(&self) -> f64 {
        self.outer_a[..self.outer_n]
            .iter()
            .map(|a| a - 1.0)
            .fold(f64::NEG_INFINITY, f64::max)
    }
}

/// Diagnostics attached to a successful evaluation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BivariateDiagnostics {
    pub c1: f64,
    pub c2: f64,
    pub y1_max: f64,
    pub y2_max: f64,
    pub step: f64,
    pub last_change: f64,
}

const MAX_GRID_POINTS: usize = 40_000_000;

fn decay_extent(f: impl Fn(f64) -> f64, label: &str) -> Result<f64> {
    // f returns ln|·| along the contour
    let mut peak = f(0.0);
    let mut y = 0.0;
    let mut extent = 1.0;
    let mut quiet = 0;
    while quiet < 6 {
        y += 0.5;
        if y > 2000.0 {
            return Err(Error::Contour(format!("{label} kernel does not decay")));
        }
        let v = f(y);
        peak = peak.max(v);
        if v < peak - 41.0 {
            quiet += 1;
        } else {
            quiet = 0;
            extent = y + 0.5;
        }
    }
    Ok(extent)
}

/// Extended bivariate Meijer G at x, y > 0 via double Mellin–Barnes
/// quadrature.
pub fn bivariate_meijer_g(spec: &BivariateGSpec, x: f64, y: f64) -> Result<f64> {
    bivariate_meijer_g_diag(spec, x, y).map(|(v, _)| v)
}

/// As [`bivariate_meijer_g`], also returning contour and truncation data.
pub fn bivariate_meijer_g_diag(
    spec: &BivariateGSpec,
    x: f64,
    y: f64,
) -> Result<(f64, BivariateDiagnostics)> {
    if !(x > 0.0 && y > 0.0) || !x.is_finite() || !y.is_finite() {
        return Err(Error::domain(
            "bivariate_meijer_g",
            format!("arguments x={x}, y={y} must be > 0"),
        ));
    }
    let (lo1, hi1) = spec.first.strip();
    let (lo2, hi2) = spec.second.strip();
    let (r1lo, r1hi) = contour_search_range(lo1, hi1)?;
    let (r2lo, r2hi) = contour_search_range(lo2, hi2)?;
    let floor = spec.outer_floor() + 0.25;
    if r1hi + r2hi <= floor {
        return Err(Error::Contour(format!(
            "outer poles require Re(s1+s2) > {floor}, blocks allow at most {}",
            r1hi + r2hi
        )));
    }
    let (lnx, lny) = (x.ln(), y.ln());
    let objective = |c1: f64, c2: f64| {
        spec.ln_outer(Complex64::new(c1 + c2, 0.0)).re
            + spec.first.ln_kernel(Complex64::new(c1, 0.0)).re
            + spec.second.ln_kernel(Complex64::new(c2, 0.0)).re
            + c1 * lnx
            + c2 * lny
    };
    // coordinate descent inside {c1+c2 ≥ floor}
    let mut c2 = if r2hi - r2lo > 0.0 {
        0.5 * (r2lo + r2hi)
    } else {
        r2lo
    };
    if r1hi + c2 < floor {
        c2 = r2hi;
    }
    let mut c1 = 0.5 * (r1lo.max(floor - c2) + r1hi);
    for _ in 0..4 {
        let lo = r1lo.max(floor - c2);
        c1 = golden_min(|c| objective(c, c2), lo, r1hi.max(lo));
        let lo = r2lo.max(floor - c1);
        c2 = golden_min(|c| objective(c1, c), lo, r2hi.max(lo));
    }

    let ln_a = |t: f64| {
        let s = Complex64::new(c1, t);
        spec.first.ln_kernel(s) + s * lnx
    };
    let ln_b = |t: f64| {
        let s = Complex64::new(c2, t);
        spec.second.ln_kernel(s) + s * lny
    };
    let ln_c = |t: f64| spec.ln_outer(Complex64::new(c1 + c2, t));
    let outer0 = ln_c(0.0).re;
    // outer factor can exceed its axis value off the diagonal only through
    // denominator gammas; bound the extents with the worst-case growth
    let y1_max = decay_extent(|t| ln_a(t).re + (ln_c(t).re - outer0).max(0.0), "first")?;
    let y2_max = decay_extent(|t| ln_b(t).re + (ln_c(t).re - outer0).max(0.0), "second")?;

    let mut h = (PI / (lnx.abs().max(lny.abs()) + 4.0)).min(0.4);
    let mut prev: Option<f64> = None;
    let mut last_change = f64::INFINITY;
    for _level in 0..8 {
        let n1 = (y1_max / h).ceil() as usize;
        let n2 = (y2_max / h).ceil() as usize;
        if (2 * n1 + 1) * (2 * n2 + 1) > MAX_GRID_POINTS {
            break;
        }
        let a: Vec<Complex64> = (0..=2 * n1)
            .map(|i| ln_a((i as f64 - n1 as f64) * h))
            .collect();
        let b: Vec<Complex64> = (0..=2 * n2)
            .map(|j| ln_b((j as f64 - n2 as f64) * h))
            .collect();
        let nc = n1 + n2;
        let c: Vec<Complex64> = (0..=2 * nc)
            .map(|k| ln_c((k as f64 - nc as f64) * h))
            .collect();
        let off = |v: &[Complex64]| v.iter().map(|z| z.re).fold(f64::NEG_INFINITY, f64::max);
        let (oa, ob, oc) = (off(&a), off(&b), off(&c));
        let ea: Vec<Complex64> = a.iter().map(|z| (z - oa).exp()).collect();
        let eb: Vec<Complex64> = b.iter().map(|z| (z - ob).exp()).collect();
        let ec: Vec<Complex64> = c.iter().map(|z| (z - oc).exp()).collect();
        let mut total = Complex64::new(0.0, 0.0);
        let mut magnitude = 0.0;
        for (i, ai) in ea.iter().enumerate() {
            let mut row = Complex64::new(0.0, 0.0);
            for (j, bj) in eb.iter().enumerate() {
                let term = bj * ec[i + j];
                row += term;
                magnitude += (ai * term).norm();
            }
            total += ai * row;
        }
        let scale = (oa + ob + oc).exp() * h * h / (4.0 * PI * PI);
        let value = total.re * scale;
        let magnitude = magnitude * scale;
        if let Some(p) = prev {
            last_change = (value - p).abs();
            if last_change <= 1e-10 * value.abs() + 1e-14 * magnitude {
                return Ok((
                    value,
                    BivariateDiagnostics {
                        c1,
                        c2,
                        y1_max,
                        y2_max,
                        step: h,
                        last_change,
                    },
                ));
            }
        }
        prev = Some(value);
        h *= 0.5;
    }
    Err(Error::Contour(format!(
        "double Mellin–Barnes sum unresolved: x={x}, y={y}, c=({c1:.4}, {c2:.4}), \
         truncation=({y1_max}, {y2_max}), step={h}, last change={last_change:e}, spec={spec:?}"
    )))
}
