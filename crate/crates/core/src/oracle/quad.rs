//! Two independent quadrature engines on finite intervals: globally adaptive
//! Gauss–Kronrod (7/15) bisection and level-doubling tanh-sinh.
//!
//! Semi-infinite oracle integrals are truncated by the caller at a certified
//! tail point and split at breakpoints, then handed to either engine.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{Error, Result};

/// Result of a quadrature with its estimated absolute error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Quadrature {
    pub value: f64,
    pub abs_error: f64,
    pub evaluations: usize,
}

impl Quadrature {
    fn zero() -> Self {
        Quadrature {
            value: 0.0,
            abs_error: 0.0,
            evaluations: 0,
        }
    }

    fn absorb(&mut self, other: Quadrature) {
        self.value += other.value;
        self.abs_error += other.abs_error;
        self.evaluations += other.evaluations;
    }
}

/// Which engine to run on each piece.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scheme {
    GaussKronrod,
    TanhSinh,
}

/// Absolute and relative accuracy request; a piece is accepted when its
/// error estimate is below max(abs, rel·|value|).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerance {
    pub abs: f64,
    pub rel: f64,
}

impl Default for Tolerance {
    fn default() -> Self {
        Tolerance {
            abs: 1e-13,
            rel: 1e-12,
        }
    }
}

impl Tolerance {
    fn target(&self, value: f64) -> f64 {
        self.abs.max(self.rel * value.abs())
    }
}

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

fn check(v: f64, x: f64) -> Result<f64> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::domain(
            "quadrature",
            format!("integrand is {v} at x={x}"),
        ))
    }
}

/// One 15-point Kronrod panel with QUADPACK error scaling.
fn gk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> Result<(f64, f64)> {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = check(f(center), center)?;
    let mut kron = fc * WGK[7];
    let mut gauss = fc * WG[3];
    let mut fv = [(0.0, 0.0); 7];
    for j in 0..7 {
        let dx = half * XGK[j];
        let f1 = check(f(center - dx), center - dx)?;
        let f2 = check(f(center + dx), center + dx)?;
        fv[j] = (f1, f2);
        kron += WGK[j] * (f1 + f2);
        if j % 2 == 1 {
            gauss += WG[j / 2] * (f1 + f2);
        }
    }
    let mean = 0.5 * kron;
    let mut asc = WGK[7] * (fc - mean).abs();
    for j in 0..7 {
        asc += WGK[j] * ((fv[j].0 - mean).abs() + (fv[j].1 - mean).abs());
    }
    let value = kron * half;
    asc *= half.abs();
    let mut err = ((kron - gauss) * half).abs();
    if asc != 0.0 && err != 0.0 {
        err = asc * (200.0 * err / asc).powf(1.5).min(1.0);
    }
    err = err.max(50.0 * f64::EPSILON * value.abs());
    Ok((value, err))
}

struct Panel {
    a: f64,
    b: f64,
    value: f64,
    err: f64,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.err == other.err
    }
}
impl Eq for Panel {}
impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Panel {
    fn cmp(&self, other: &Self) -> Ordering {
        self.err.total_cmp(&other.err)
    }
}

const MAX_PANELS: usize = 4000;
const ROUNDOFF_STALLS: usize = 50;
const ROUNDOFF_SLACK: f64 = 1e3;

/// Globally adaptive Gauss–Kronrod on [a, b]: the panel with the largest
/// error is bisected until the summed error meets the tolerance.
pub fn gauss_kronrod<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    tol: Tolerance,
) -> Result<Quadrature> {
    if a == b {
        return Ok(Quadrature::zero());
    }
    let (v, e) = gk15(&f, a, b)?;
    let mut heap = BinaryHeap::new();
    heap.push(Panel {
        a,
        b,
        value: v,
        err: e,
    });
    let (mut total, mut total_err) = (v, e);
    let mut evals = 15;
    let mut stalled = 0;
    while total_err > tol.target(total) {
        // Bisection no longer reduces the error: the integrand is at its
        // rounding floor. Accept when that floor is close to the target.
        if stalled >= ROUNDOFF_STALLS && total_err <= ROUNDOFF_SLACK * tol.target(total) {
            break;
        }
        if heap.len() >= MAX_PANELS {
            return Err(Error::no_conv(
                "gauss_kronrod",
                format!("[{a}, {b}]: error {total_err:e} after {MAX_PANELS} panels"),
            ));
        }
        let worst = heap.pop().expect("heap never empties");
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a.min(worst.b) || mid >= worst.a.max(worst.b) {
            // cannot bisect further; accept what remains
            heap.push(worst);
            break;
        }
        let (v1, e1) = gk15(&f, worst.a, mid)?;
        let (v2, e2) = gk15(&f, mid, worst.b)?;
        evals += 30;
        if e1 + e2 >= 0.99 * worst.err {
            stalled += 1;
        }
        total += v1 + v2 - worst.value;
        total_err += e1 + e2 - worst.err;
        heap.push(Panel {
            a: worst.a,
            b: mid,
            value: v1,
            err: e1,
        });
        heap.push(Panel {
            a: mid,
            b: worst.b,
            value: v2,
            err: e2,
        });
    }
    // resum to shed the drift of the running updates
    let value: f64 = heap.iter().map(|p| p.value).sum();
    let abs_error: f64 = heap.iter().map(|p| p.err).sum();
    Ok(Quadrature {
        value,
        abs_error,
        evaluations: evals,
    })
}

const TS_MAX_LEVEL: usize = 12;
const TS_U_MAX: f64 = 6.5;

/// Tanh-sinh (double-exponential) quadrature on [a, b]. Node offsets from
/// both endpoints are formed directly so endpoint singularities are never
/// sampled at the endpoint itself.
pub fn tanh_sinh<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: Tolerance) -> Result<Quadrature> {
    if a == b {
        return Ok(Quadrature::zero());
    }
    let half = 0.5 * (b - a);
    let center = 0.5 * (a + b);
    let hpi = std::f64::consts::FRAC_PI_2;
    let mut evals = 1;
    // contribution of the node at u (u > 0 gives a mirrored pair)
    let node_pair = |u: f64, evals: &mut usize| -> Result<Option<f64>> {
        let s = hpi * u.sinh();
        let w = hpi * u.cosh() / s.cosh().powi(2);
        // distance of the node from the nearer endpoint, scaled to [−1, 1]
        let d = 2.0 / (1.0 + (2.0 * s).exp());
        let off = half * d;
        if w * half.abs() < 1e-300 || off == 0.0 {
            return Ok(None);
        }
        // a side whose node rounds onto its endpoint is dropped on its own;
        // the other side may still sit next to a singularity
        let xl = a + off;
        let xr = b - off;
        let mut acc = 0.0;
        let mut live = false;
        if xl != a {
            acc += check(f(xl), xl)?;
            *evals += 1;
            live = true;
        }
        if xr != b {
            acc += check(f(xr), xr)?;
            *evals += 1;
            live = true;
        }
        Ok(live.then_some(w * acc))
    };
    let mut h = 1.0;
    let mut sum = hpi * check(f(center), center)?;
    let mut k = 1;
    loop {
        let u = k as f64 * h;
        if u > TS_U_MAX {
            break;
        }
        match node_pair(u, &mut evals)? {
            Some(v) => sum += v,
            None => break,
        }
        k += 1;
    }
    let mut estimate = sum * h * half;
    let mut err = f64::INFINITY;
    for _ in 1..=TS_MAX_LEVEL {
        h *= 0.5;
        let mut k = 1;
        loop {
            let u = k as f64 * h;
            if u > TS_U_MAX {
                break;
            }
            match node_pair(u, &mut evals)? {
                Some(v) => sum += v,
                None => break,
            }
            k += 2;
        }
        let next = sum * h * half;
        err = (next - estimate).abs();
        estimate = next;
        if err <= 0.1 * tol.target(estimate) {
            return Ok(Quadrature {
                value: estimate,
                abs_error: err,
                evaluations: evals,
            });
        }
    }
    if err <= tol.target(estimate) {
        return Ok(Quadrature {
            value: estimate,
            abs_error: err,
            evaluations: evals,
        });
    }
    Err(Error::no_conv(
        "tanh_sinh",
        format!("[{a}, {b}]: level difference {err:e} at finest level"),
    ))
}

/// Integrate over consecutive pieces [breaks[i], breaks[i+1]].
pub fn integrate_pieces<F: Fn(f64) -> f64>(
    f: F,
    breaks: &[f64],
    scheme: Scheme,
    tol: Tolerance,
) -> Result<Quadrature> {
    if breaks.len() < 2 || breaks.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(Error::InvalidParameter(format!(
            "breakpoints must be strictly increasing: {breaks:?}"
        )));
    }
    // A piece only needs to be accurate relative to the whole integral, so
    // tail pieces get an absolute target from a one-panel estimate of it.
    let mut rough = 0.0;
    for w in breaks.windows(2) {
        rough += gk15(&f, w[0], w[1]).map(|(v, _)| v.abs()).unwrap_or(0.0);
    }
    let piece_tol = Tolerance {
        abs: tol.abs.max(tol.rel * rough),
        rel: tol.rel,
    };
    let mut acc = Quadrature::zero();
    for w in breaks.windows(2) {
        let piece = match scheme {
            Scheme::GaussKronrod => gauss_kronrod(&f, w[0], w[1], piece_tol),
            Scheme::TanhSinh => tanh_sinh(&f, w[0], w[1], piece_tol),
        }
        .map_err(|e| match e {
            Error::NonConvergence { func, detail } => Error::NonConvergence {
                func,
                detail: format!("{detail}; split points {breaks:?}"),
            },
            other => other,
        })?;
        acc.absorb(piece);
    }
    Ok(acc)
}

/// Breakpoints 0 < … < upper: geometric toward zero, uniform near `scale`.
pub fn default_breaks(scale: f64, upper: f64) -> Vec<f64> {
    let mut pts = vec![0.0];
    let mut x = scale * 1e-6;
    while x < 0.5 * scale.min(upper) {
        pts.push(x);
        x *= 10.0;
    }
    let mut y = 0.5 * scale;
    while y < upper {
        if y > *pts.last().unwrap() {
            pts.push(y);
        }
        y += 0.5 * scale;
    }
    pts.push(upper);
    pts.dedup();
    pts
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn polynomial_and_exponential() {
        let tol = Tolerance::default();
        for scheme in [Scheme::GaussKronrod, Scheme::TanhSinh] {
            let q = integrate_pieces(|x| 3.0 * x * x, &[0.0, 2.0], scheme, tol).unwrap();
            assert_relative_eq!(q.value, 8.0, max_relative = 1e-13);
            let q = integrate_pieces(|x: f64| (-x).exp(), &[0.0, 1.0, 40.0], scheme, tol).unwrap();
            assert_relative_eq!(q.value, 1.0 - (-40.0f64).exp(), max_relative = 1e-12);
        }
    }

    #[test]
    fn endpoint_singularity() {
        // ∫₀¹ x^{−1/2} dx = 2 and ∫₀¹ ln x dx = −1
        let tol = Tolerance {
            abs: 1e-12,
            rel: 1e-11,
        };
        let a = tanh_sinh(|x: f64| x.powf(-0.5), 0.0, 1.0, tol).unwrap();
        assert_relative_eq!(a.value, 2.0, max_relative = 1e-11);
        let b = gauss_kronrod(|x: f64| x.powf(-0.5), 0.0, 1.0, tol).unwrap();
        assert_relative_eq!(b.value, 2.0, max_relative = 1e-10);
        let c = gauss_kronrod(|x: f64| x.ln(), 0.0, 1.0, tol).unwrap();
        assert_relative_eq!(c.value, -1.0, max_relative = 1e-11);
    }

    #[test]
    fn schemes_agree_on_peaked_integrand() {
        let f = |x: f64| x.powf(3.3) * (-x * x).exp() / (1.0 + x);
        let br = default_breaks(1.0, 12.0);
        let tol = Tolerance::default();
        let a = integrate_pieces(f, &br, Scheme::GaussKronrod, tol).unwrap();
        let b = integrate_pieces(f, &br, Scheme::TanhSinh, tol).unwrap();
        assert_relative_eq!(a.value, b.value, max_relative = 1e-11);
    }

    #[test]
    fn rejects_bad_breaks_and_nan() {
        assert!(
            integrate_pieces(|x| x, &[1.0, 0.0], Scheme::TanhSinh, Tolerance::default()).is_err()
        );
        assert!(gauss_kronrod(|_| f64::NAN, 0.0, 1.0, Tolerance::default()).is_err());
    }
}
