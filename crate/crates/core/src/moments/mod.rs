//! Deterministic moment integrals: variances of polyspectra, the Fourier
//! transform of a ball, the Leray second moment, Monte Carlo contraction
//! integrals, their Euclidean counterparts and log-log scaling fits.

mod euclid;
mod fit;
mod radial;
mod variance;

pub use euclid::{euclid_pair_density, euclid_variance};
pub use fit::{scaling_fit, Hypothesis, ScalingFit};
pub use radial::{
    pair_distance_density, radial_double_integral, radial_double_integral_nested, sin_power_integral, PairDistanceRule,
    Weighting,
};
pub use variance::{
    ball_fourier, contraction_mc, fourier_transform_ball, fourier_zeros, leray_second_moment, variance_cq, BallFourier,
    McEstimate, Method, MomentEngine, Power, VarianceResult,
};
