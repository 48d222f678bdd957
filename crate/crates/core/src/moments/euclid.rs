use core::f64::consts::PI;

use super::radial::sin_power_integral;
use crate::error::domain;
use crate::quad::{pairwise_sum, GaussLegendre};
use crate::specfun::{berry_covariance, gamma, sphere_area};
use crate::{Estimate, Result};
#[allow(unused_imports)]
use num_traits::Float;

/// Volume of the intersection of two balls of radius `R` in `R^n` whose
/// centres are `s` apart: twice a cap of half-angle `acos(s / 2R)`.
fn lens_volume(n: usize, radius: f64, s: f64) -> f64 {
    if s >= 2.0 * radius {
        return 0.0;
    }
    let theta = (0.5 * s / radius).acos();
    let unit_slice = PI.powf(0.5 * (n as f64 - 1.0)) / gamma(0.5 * (n as f64 + 1.0));
    2.0 * unit_slice * radius.powi(n as i32) * sin_power_integral(n, theta)
}

/// Pair-distance density of two uniform points in a Euclidean ball,
/// normalized so that it integrates to `vol(B_R)²`.
pub fn euclid_pair_density(n: usize, radius: f64, s: f64) -> f64 {
    if !(s > 0.0) || s >= 2.0 * radius {
        return 0.0;
    }
    sphere_area(n - 1) * s.powi(n as i32 - 1) * lens_volume(n, radius, s)
}

/// `q! ∫∫_{B_R × B_R} C_{n,λ}(|x − y|)^q dx dy` in `R^n`, with the Berry
/// covariance `C_{n,λ}`. The error estimate compares 20- and 10-point rules
/// on the same panels.
pub fn euclid_variance(n: usize, lambda: f64, radius: f64, q: usize) -> Result<Estimate> {
    if n < 2 {
        return Err(domain!("dimension must be at least 2"));
    }
    if !(lambda > 0.0) || !(radius > 0.0) || !radius.is_finite() {
        return Err(domain!("need λ > 0 and a finite positive radius"));
    }
    let frequency = q.max(1) as f64 * lambda.sqrt();
    let width = (0.05 * radius).min(0.5 * PI / frequency);
    let span = 2.0 * radius;
    let panels = (span / width).ceil() as usize;
    let h = span / panels as f64;
    let qi = q as i32;
    let g = |s: f64| berry_covariance(n, lambda, s).powi(qi) * euclid_pair_density(n, radius, s);
    let (fine, coarse) = (GaussLegendre::new(20), GaussLegendre::new(10));
    let hi = pairwise_sum((0..panels).map(|k| fine.integrate(k as f64 * h, (k + 1) as f64 * h, g)));
    let lo = pairwise_sum((0..panels).map(|k| coarse.integrate(k as f64 * h, (k + 1) as f64 * h, g)));
    let fact: f64 = (1..=q).map(|k| k as f64).product();
    Ok(Estimate { value: fact * hi, abs_err: fact * (hi - lo).abs(), degraded: !hi.is_finite() })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ball(n: usize, r: f64) -> f64 {
        PI.powf(0.5 * n as f64) / gamma(0.5 * n as f64 + 1.0) * r.powi(n as i32)
    }

    #[test]
    fn planar_lens_matches_the_circle_formula() {
        let (r, s) = (1.7f64, 0.9f64);
        let want = 2.0 * r * r * (s / (2.0 * r)).acos() - 0.5 * s * (4.0 * r * r - s * s).sqrt();
        assert!((lens_volume(2, r, s) - want).abs() < 1e-13);
        assert!((lens_volume(3, r, 0.0) - ball(3, r)).abs() < 1e-12);
    }

    #[test]
    fn zeroth_order_is_volume_squared() {
        for n in 2..=4 {
            let v = euclid_variance(n, 4.0, 2.5, 0).unwrap();
            assert!((v.value / ball(n, 2.5).powi(2) - 1.0).abs() < 1e-10, "n={n}");
        }
    }
}
