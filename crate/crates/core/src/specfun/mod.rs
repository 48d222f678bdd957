//! Special functions: gamma, Bessel, Gauss hypergeometric, and the
//! spherical function of `H^n` with its asymptotic approximants.

mod asymptotic;
mod bessel;
pub mod dd;
mod gamma;
mod hyp2f1;
mod spherical;
mod table;

use core::f64::consts::PI;

pub use asymptotic::{
    asymptotic_tail, asymptotic_tail_with, berry_covariance, bessel_approx, bessel_approx_uniform,
    calibrate_tail_constant, harish_chandra_c, main_term, main_term_literal, spectral_density,
    tail_constant, AsymptoticBand, TailGrid,
};
pub use bessel::bessel_j;
pub use gamma::{gamma, gamma_complex, log_gamma_complex, recip_gamma};
pub use hyp2f1::{hyp2f1, Hyp2f1, PFAFF_LIMIT};
pub use spherical::{
    integrate_radial, small_radius_series, spherical_f, CovarianceRoute, RadialState, SeriesValue,
    AUTO_THRESHOLD, ODE_RTOL, ODE_START,
};
pub use table::CovarianceTable;
#[allow(unused_imports)]
use num_traits::Float;

/// Surface area `ω_k` of the unit sphere `S^k ⊂ R^{k+1}`; `ω_0 = 2`.
pub fn sphere_area(k: usize) -> f64 {
    let h = 0.5 * (k as f64 + 1.0);
    2.0 * PI.powf(h) / gamma(h)
}
