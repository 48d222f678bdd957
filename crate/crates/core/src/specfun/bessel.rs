use core::f64::consts::PI;

use super::dd::Dd;
use super::gamma::gamma;
#[allow(unused_imports)]
use num_traits::Float;

const SERIES_LIMIT: f64 = 30.0;

/// Bessel function of the first kind `J_ν(x)` for `ν >= 0`, `x >= 0`.
///
/// Power series summed in double-double arithmetic for `x <= 30`, Hankel's
/// asymptotic expansion beyond.
pub fn bessel_j(nu: f64, x: f64) -> f64 {
    debug_assert!(nu >= 0.0 && x >= 0.0);
    if x == 0.0 {
        return if nu == 0.0 { 1.0 } else { 0.0 };
    }
    if x <= SERIES_LIMIT {
        series(nu, x)
    } else {
        hankel(nu, x)
    }
}

fn series(nu: f64, x: f64) -> f64 {
    let q = Dd::from_f64(0.25 * x * x);
    let mut term = Dd::ONE;
    let mut sum = Dd::ONE;
    let mut k = 0.0;
    loop {
        k += 1.0;
        let den = Dd::from_f64(k) * Dd::from_f64(k + nu);
        term = -(term * q) / den;
        sum = sum + term;
        if term.hi.abs() < 1e-34 * sum.hi.abs().max(1e-300) && k > 0.5 * x {
            break;
        }
        if k > 400.0 {
            break;
        }
    }
    let lead = (0.5 * x).powf(nu) / gamma(nu + 1.0);
    lead * sum.to_f64()
}

fn hankel(nu: f64, x: f64) -> f64 {
    let mu = 4.0 * nu * nu;
    let mut p = 1.0;
    let mut q = 0.0;
    let mut a = 1.0; // a_k(ν) / x^k
    let mut prev = f64::INFINITY;
    for k in 1..60 {
        let kf = k as f64;
        let odd = 2.0 * kf - 1.0;
        a *= (mu - odd * odd) / (kf * 8.0 * x);
        if a.abs() > prev || a == 0.0 {
            break;
        }
        prev = a.abs();
        // even k enter P with sign (-1)^{k/2}, odd k enter Q with sign (-1)^{(k-1)/2}
        match k % 4 {
            0 => p += a,
            1 => q += a,
            2 => p -= a,
            _ => q -= a,
        }
        if a.abs() < 1e-17 {
            break;
        }
    }
    let chi = x - (0.5 * nu + 0.25) * PI;
    (2.0 / (PI * x)).sqrt() * (p * chi.cos() - q * chi.sin())
}
