//! Complex log-gamma used by the Mellin–Barnes integrands.

use std::f64::consts::PI;

use num_complex::Complex64;

const LN_SQRT_2PI: f64 = 0.918_938_533_204_672_8;
const LANCZOS_G: f64 = 7.0;
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_9,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_1,
    -176.615_029_162_140_6,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_572e-6,
    1.505_632_735_149_311_6e-7,
];

/// ln sin(πz) modulo 2πi, stable for large |Im z|.
fn ln_sin_pi(z: Complex64) -> Complex64 {
    if z.im.abs() < 4.0 {
        return (z * PI).sin().ln();
    }
    let flip = z.im < 0.0;
    let z = if flip { z.conj() } else { z };
    // sin(πz) = e^{−iπz}(e^{2iπz} − 1)/(2i), |e^{2iπz}| = e^{−2π Im z}
    let i = Complex64::i();
    let e2 = (i * 2.0 * PI * z).exp();
    let v = -i * PI * z + ((e2 - 1.0) / (i * 2.0)).ln();
    if flip {
        v.conj()
    } else {
        v
    }
}

/// ln Γ(z) for complex z, correct modulo 2πi (callers exponentiate).
pub fn ln_gamma_c(z: Complex64) -> Complex64 {
    if z.re < 0.5 {
        return Complex64::new(PI.ln(), 0.0) - ln_sin_pi(z) - ln_gamma_c(1.0 - z);
    }
    let zm = z - 1.0;
    let mut acc = Complex64::new(LANCZOS[0], 0.0);
    for (k, c) in LANCZOS.iter().enumerate().skip(1) {
        acc += c / (zm + k as f64);
    }
    let t = zm + LANCZOS_G + 0.5;
    (zm + 0.5) * t.ln() - t + acc.ln() + LN_SQRT_2PI
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::specfun::gamma::ln_gamma;
    use approx::assert_relative_eq;

    #[test]
    fn real_axis_agrees() {
        for &x in &[0.3, 1.0, 2.5, 7.2, 30.0] {
            let v = ln_gamma_c(Complex64::new(x, 0.0));
            assert_relative_eq!(v.re, ln_gamma(x), epsilon = 1e-13);
        }
    }

    #[test]
    fn modulus_on_vertical_line() {
        // |Γ(1/2 + iy)|² = π / cosh(πy)
        for &y in &[0.5, 3.0, 10.0, 60.0] {
            let v = ln_gamma_c(Complex64::new(0.5, y));
            assert_relative_eq!(2.0 * v.re, PI.ln() - (PI * y).cosh().ln(), epsilon = 1e-11);
            let w = ln_gamma_c(Complex64::new(-2.5, -y));
            // Γ(−5/2 + iy) from the recurrence Γ(z+3) = z(z+1)(z+2)Γ(z)
            let z = Complex64::new(-2.5, -y);
            let up = ln_gamma_c(z + 3.0) - (z * (z + 1.0) * (z + 2.0)).ln();
            assert_relative_eq!(
                w.exp().re,
                up.exp().re,
                max_relative = 1e-10,
                epsilon = 1e-300
            );
        }
    }
}
