//! Gauss hypergeometric function ₂F₁ and its regularized form ₂F̃₁ on the
//! real axis z < 1.
//!
//! Negative arguments are first mapped into [0, 1) by the Pfaff
//! transformation ₂F₁(a,b;c;z) = (1−z)^{−a} ₂F₁(a, c−b; c; z/(z−1)). Arguments
//! that land close to 1 are finished with the 1−z connection formulas,
//! including the logarithmic cases where c−a−b is an integer.

use crate::error::{Error, Result};
use crate::specfun::gamma::{digamma_real, gamma, ln_gamma, pochhammer, rgamma};

const MAX_TERMS: usize = 200_000;
/// Beyond this |w| the power series is replaced by the 1−w connection.
const SERIES_LIMIT: f64 = 0.9;
const INTEGER_TOL: f64 = 1e-9;

fn nonpositive_integer(x: f64) -> Option<usize> {
    if x <= 0.0 && x == x.floor() {
        Some((-x) as usize)
    } else {
        None
    }
}

fn near_integer(x: f64) -> Option<i64> {
    let r = x.round();
    if (x - r).abs() < INTEGER_TOL {
        Some(r as i64)
    } else {
        None
    }
}

/// Plain power series Σ (a)_n (b)_n / ((c)_n n!) z^n.
fn series(a: f64, b: f64, c: f64, z: f64) -> Result<f64> {
    let mut term = 1.0;
    let mut sum = 1.0;
    let mut small_run = 0;
    for n in 0..MAX_TERMS {
        let nf = n as f64;
        term *= (a + nf) * (b + nf) / ((c + nf) * (nf + 1.0)) * z;
        sum += term;
        if term == 0.0 {
            return Ok(sum);
        }
        if term.abs() <= 1e-17 * sum.abs() {
            small_run += 1;
            if small_run >= 3 {
                return Ok(sum);
            }
        } else {
            small_run = 0;
        }
    }
    Err(Error::no_conv(
        "gauss_2f1",
        format!("power series a={a}, b={b}, c={c}, z={z}"),
    ))
}

/// Terminating case: a or b a non-positive integer; returns the regularized
/// polynomial.
fn polynomial_reg(a: f64, b: f64, c: f64, z: f64, degree: usize) -> f64 {
    let mut sum = 0.0;
    let mut coeff = 1.0;
    for n in 0..=degree {
        if n > 0 {
            let nf = (n - 1) as f64;
            coeff *= (a + nf) * (b + nf) / n as f64 * z;
        }
        sum += coeff * rgamma(c + n as f64);
    }
    sum
}

/// ₂F₁(a, b; a+b+m; z) for integer m ≥ 0 and 0 < 1−z < 1.
fn log_case(a: f64, b: f64, m: usize, z: f64) -> Result<f64> {
    let c = a + b + m as f64;
    let y = 1.0 - z;
    let ln_y = y.ln();
    let mut finite = 0.0;
    if m > 0 {
        let pre = gamma(m as f64) * gamma(c) * rgamma(a + m as f64) * rgamma(b + m as f64);
        let mut t = 1.0;
        for n in 0..m {
            if n > 0 {
                let nf = (n - 1) as f64;
                t *= (a + nf) * (b + nf) / ((nf + 1.0) * (1.0 - m as f64 + nf)) * y;
            }
            finite += t;
        }
        finite *= pre;
    }
    let mf = m as f64;
    let pre = gamma(c) * rgamma(a) * rgamma(b);
    if pre == 0.0 {
        return Ok(finite);
    }
    let mut t = 1.0 / gamma(mf + 1.0);
    let mut sum = 0.0;
    let mut converged = false;
    for n in 0..MAX_TERMS {
        let nf = n as f64;
        if n > 0 {
            t *= (a + mf + nf - 1.0) * (b + mf + nf - 1.0) / (nf * (nf + mf)) * y;
        }
        let bracket = ln_y - digamma_real(nf + 1.0) - digamma_real(nf + mf + 1.0)
            + digamma_real(a + nf + mf)
            + digamma_real(b + nf + mf);
        let term = t * bracket;
        sum += term;
        if n > 4 && term.abs() <= 1e-17 * sum.abs().max(1e-300) && t.abs() <= 1e-17 {
            converged = true;
            break;
        }
        if t == 0.0 {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(Error::no_conv(
            "gauss_2f1",
            format!("logarithmic connection a={a}, b={b}, m={m}, z={z}"),
        ));
    }
    let sign = if m % 2 == 0 { 1.0 } else { -1.0 };
    Ok(finite - sign * y.powi(m as i32) * pre * sum)
}

/// ₂F₁ for 0 ≤ z < 1, c not a non-positive integer.
fn unit_interval(a: f64, b: f64, c: f64, z: f64) -> Result<f64> {
    if z <= SERIES_LIMIT {
        return series(a, b, c, z);
    }
    let y = 1.0 - z;
    let excess = c - a - b;
    match near_integer(excess) {
        Some(m) if m >= 0 => log_case(a, b, m as usize, z),
        Some(_) => {
            // Euler: (1−z)^{c−a−b} ₂F₁(c−a, c−b; c; z) flips the sign of c−a−b
            let inner = unit_interval(c - a, c - b, c, z)?;
            Ok(y.powf(excess) * inner)
        }
        None => {
            let g1 = gamma(c) * gamma(excess) * rgamma(c - a) * rgamma(c - b);
            let g2 = gamma(c) * gamma(-excess) * rgamma(a) * rgamma(b);
            let mut v = 0.0;
            if g1 != 0.0 {
                v += g1 * series(a, b, 1.0 - excess, y)?;
            }
            if g2 != 0.0 {
                v += g2 * y.powf(excess) * series(c - a, c - b, 1.0 + excess, y)?;
            }
            Ok(v)
        }
    }
}

/// ₂F₁(a, b; c; z) for real z < 1 and c not a non-positive integer (unless
/// the series terminates first).
pub fn gauss_2f1(a: f64, b: f64, c: f64, z: f64) -> Result<f64> {
    if [a, b, c, z].iter().any(|v| v.is_nan()) {
        return Err(Error::domain("gauss_2f1", "NaN argument"));
    }
    if z >= 1.0 {
        return Err(Error::domain("gauss_2f1", format!("z={z} outside z < 1")));
    }
    if nonpositive_integer(c).is_some() {
        let terminates = [a, b]
            .iter()
            .filter_map(|&p| nonpositive_integer(p))
            .any(|deg| (deg as f64) < -c + 1.0);
        if !terminates {
            return Err(Error::domain(
                "gauss_2f1",
                format!("c={c} is a pole; use gauss_2f1_reg"),
            ));
        }
    }
    let v = gauss_2f1_reg(a, b, c, z)?;
    if nonpositive_integer(c).is_some() {
        // terminating before the pole: plain series is exact
        return series(a, b, c, z);
    }
    Ok(v * gamma(c))
}

fn unregularized(a: f64, b: f64, c: f64, z: f64) -> Result<f64> {
    if z == 0.0 {
        return Ok(1.0);
    }
    if z > 0.0 {
        return unit_interval(a, b, c, z);
    }
    // Pfaff; take the form whose second parameter terminates when possible
    let w = z / (z - 1.0);
    let oz = 1.0 - z;
    if nonpositive_integer(c - b).is_some() || nonpositive_integer(c - a).is_none() {
        Ok(oz.powf(-a) * unit_interval(a, c - b, c, w)?)
    } else {
        Ok(oz.powf(-b) * unit_interval(c - a, b, c, w)?)
    }
}

/// Regularized Gauss hypergeometric ₂F̃₁(a,b;c;z) = ₂F₁(a,b;c;z)/Γ(c), finite
/// for every real c. The contract domain is z ≤ 0; any z < 1 is accepted.
pub fn gauss_2f1_reg(a: f64, b: f64, c: f64, z: f64) -> Result<f64> {
    if [a, b, c, z].iter().any(|v| v.is_nan()) {
        return Err(Error::domain("gauss_2f1_reg", "NaN argument"));
    }
    if z >= 1.0 {
        return Err(Error::domain(
            "gauss_2f1_reg",
            format!("z={z} outside z < 1"),
        ));
    }
    let degree = [a, b].iter().filter_map(|&p| nonpositive_integer(p)).min();
    if let Some(d) = degree {
        return Ok(polynomial_reg(a, b, c, z, d));
    }
    if let Some(m) = nonpositive_integer(c) {
        // lim_{c→−m} ₂F₁/Γ(c) = (a)_{m+1}(b)_{m+1} z^{m+1}/(m+1)! ₂F₁(a+m+1, b+m+1; m+2; z)
        let k = m + 1;
        let pre = pochhammer(a, k)
            * pochhammer(b, k)
            * z.powi(k as i32)
            * (-ln_gamma(k as f64 + 1.0)).exp();
        let kf = k as f64;
        return Ok(pre * unregularized(a + kf, b + kf, kf + 1.0, z)?);
    }
    let v = unregularized(a, b, c, z)? * rgamma(c);
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::Overflow {
            func: "gauss_2f1_reg",
            detail: format!("a={a}, b={b}, c={c}, z={z}"),
        })
    }
}
