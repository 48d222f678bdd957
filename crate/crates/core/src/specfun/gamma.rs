use core::f64::consts::PI;
use num_complex::Complex64;

use crate::{Error, Result};
#[allow(unused_imports)]
use num_traits::Float;

// B_{2k} / (2k (2k-1)) for k = 1..8
const STIRLING: [f64; 8] = [
    1.0 / 12.0,
    -1.0 / 360.0,
    1.0 / 1260.0,
    -1.0 / 1680.0,
    1.0 / 1188.0,
    -691.0 / 360_360.0,
    1.0 / 156.0,
    -3617.0 / 122_400.0,
];

const SHIFT_RADIUS: f64 = 15.0;

/// Principal branch of `log Γ(z)`.
///
/// For `Re z >= 1/2` the branch is the analytic continuation from the
/// positive real axis (Stirling series after upward shifting). For
/// `Re z < 1/2` the reflection formula is used and the imaginary part is
/// only defined modulo `2π`, which is immaterial for `exp(log Γ)`.
pub fn log_gamma_complex(z: Complex64) -> Result<Complex64> {
    if z.im == 0.0 && z.re <= 0.0 && z.re == z.re.round() {
        return Err(Error::Pole(z.re));
    }
    if z.re < 0.5 {
        let ln_pi = PI.ln();
        return Ok(Complex64::new(ln_pi, 0.0) - ln_sin_pi(z) - log_gamma_right(Complex64::new(1.0, 0.0) - z));
    }
    Ok(log_gamma_right(z))
}

fn log_gamma_right(z: Complex64) -> Complex64 {
    let mut w = z;
    let mut shift = Complex64::new(0.0, 0.0);
    while w.norm() < SHIFT_RADIUS {
        shift += w.ln();
        w += 1.0;
    }
    let inv = w.inv();
    let inv2 = inv * inv;
    let mut series = Complex64::new(0.0, 0.0);
    let mut pow = inv;
    for c in STIRLING {
        series += pow * c;
        pow *= inv2;
    }
    (w - 0.5) * w.ln() - w + 0.5 * (2.0 * PI).ln() + series - shift
}

/// `log sin(πz)` without overflow for large `|Im z|`.
fn ln_sin_pi(z: Complex64) -> Complex64 {
    let i = Complex64::new(0.0, 1.0);
    let w = z * PI;
    if w.im.abs() < 20.0 {
        return w.sin().ln();
    }
    // sin w = ∓e^{∓iw}(1 − e^{±2iw})/(2i) for Im w ≷ 0
    let ln2 = 2.0f64.ln();
    if w.im > 0.0 {
        -i * w + Complex64::new(-ln2, 0.5 * PI) + (Complex64::new(1.0, 0.0) - (2.0 * i * w).exp()).ln()
    } else {
        i * w + Complex64::new(-ln2, -0.5 * PI) + (Complex64::new(1.0, 0.0) - (-2.0 * i * w).exp()).ln()
    }
}

/// `Γ(z)` as `exp(log Γ(z))`; zero is returned for `1/Γ` at poles by [`recip_gamma`].
pub fn gamma_complex(z: Complex64) -> Result<Complex64> {
    Ok(log_gamma_complex(z)?.exp())
}

/// `1/Γ(z)`, entire: zero at the non-positive integers.
pub fn recip_gamma(z: Complex64) -> Complex64 {
    match log_gamma_complex(z) {
        Ok(l) => (-l).exp(),
        Err(_) => Complex64::new(0.0, 0.0),
    }
}

/// Real `Γ(x)` for `x > 0`.
pub fn gamma(x: f64) -> f64 {
    libm::tgamma(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn factorials() {
        assert!(log_gamma_complex(c(1.0, 0.0)).unwrap().norm() < 1e-15);
        let l5 = log_gamma_complex(c(5.0, 0.0)).unwrap();
        assert!((l5.re - 24f64.ln()).abs() < 1e-14 && l5.im.abs() < 1e-15);
        let half = log_gamma_complex(c(0.5, 0.0)).unwrap();
        assert!((half.re - 0.5 * PI.ln()).abs() < 1e-14);
    }

    #[test]
    fn poles_are_rejected() {
        assert_eq!(log_gamma_complex(c(0.0, 0.0)), Err(Error::Pole(0.0)));
        assert_eq!(log_gamma_complex(c(-3.0, 0.0)), Err(Error::Pole(-3.0)));
        assert!(recip_gamma(c(-2.0, 0.0)).norm() == 0.0);
    }

    #[test]
    fn recurrence_holds_off_axis() {
        for &(x, y) in &[(0.3, 4.0), (2.5, -30.0), (-1.7, 0.4), (-4.2, 60.0), (0.75, 99.0)] {
            let z = c(x, y);
            let lhs = gamma_complex(z + 1.0).unwrap();
            let rhs = gamma_complex(z).unwrap() * z;
            assert!((lhs - rhs).norm() <= 1e-12 * lhs.norm(), "z = {z}");
        }
    }

    #[test]
    fn golden_value_on_critical_line() {
        // |Γ(1/2 + 10i)| and its log, 30-digit reference
        let l = log_gamma_complex(c(0.5, 10.0)).unwrap();
        assert!((l - c(-14.789_024_734_744_293, 13.030_020_034_911_09)).norm() < 1e-12);
        assert!((l.re.exp() / 3.777_532_112_850_109e-7 - 1.0).abs() < 1e-12);
    }

    #[test]
    fn modulus_on_imaginary_axis() {
        // |Γ(iy)|² = π / (y sinh(πy))
        for &y in &[0.5, 3.0, 10.0, 50.0, 100.0] {
            let l = log_gamma_complex(c(0.0, y)).unwrap();
            let want = 0.5 * (PI / (y * (PI * y).sinh())).ln();
            assert!((l.re - want).abs() < 1e-12 * want.abs().max(1.0), "y = {y}");
        }
    }
}
