use alloc::vec::Vec;

use crate::error::domain;
use crate::{Error, Result};
#[allow(unused_imports)]
use num_traits::Float;

/// Model for a log-log regression.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Hypothesis {
    /// `y = c x^b`.
    PurePower,
    /// `y = c x^b log x`; `slope0` is the hypothesized exponent used for
    /// the drift of `y x^{−slope0} / log x` over the top decade.
    PowerWithLog { slope0: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScalingFit {
    pub grid: Vec<(f64, f64)>,
    pub hypothesis: Hypothesis,
    pub slope: f64,
    pub intercept: f64,
    /// Largest `|y_fit / y − 1|` over the grid.
    pub max_rel_residual: f64,
    /// Max/min of `y x^{−slope0} / log x` over `x >= x_max / 10`.
    pub log_correction_ratio_drift: Option<f64>,
}

pub const MIN_FIT_POINTS: usize = 5;

/// Least-squares fit of `log y` against `log x`. Under `PowerWithLog` the
/// regressand is `log y − log log x`, so every `x` must exceed 1.
pub fn scaling_fit(grid: &[(f64, f64)], hypothesis: Hypothesis) -> Result<ScalingFit> {
    if grid.len() < MIN_FIT_POINTS {
        return Err(Error::TooFewSamples { needed: MIN_FIT_POINTS, got: grid.len() });
    }
    let mut grid = grid.to_vec();
    grid.sort_by(|a, b| a.0.total_cmp(&b.0));
    if grid.iter().any(|&(x, y)| !(x > 0.0 && y > 0.0)) {
        return Err(domain!("scaling fits need positive parameters and values"));
    }
    let with_log = matches!(hypothesis, Hypothesis::PowerWithLog { .. });
    if with_log && grid[0].0 <= 1.0 {
        return Err(domain!("log-corrected fits need parameters above 1"));
    }
    let shift = |x: f64| if with_log { x.ln().ln() } else { 0.0 };
    let pts: Vec<(f64, f64)> = grid.iter().map(|&(x, y)| (x.ln(), y.ln() - shift(x))).collect();
    let k = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / k;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / k;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    if sxx == 0.0 {
        return Err(domain!("scaling fit needs distinct parameters"));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let max_rel_residual = pts
        .iter()
        .map(|&(lx, ly)| ((intercept + slope * lx - ly).exp() - 1.0).abs())
        .fold(0.0, f64::max);
    let log_correction_ratio_drift = match hypothesis {
        Hypothesis::PurePower => None,
        Hypothesis::PowerWithLog { slope0 } => {
            let top = grid[grid.len() - 1].0 / 10.0;
            let ratios: Vec<f64> = grid
                .iter()
                .filter(|p| p.0 >= top * (1.0 - 1e-12))
                .map(|&(x, y)| y * x.powf(-slope0) / x.ln())
                .collect();
            let max = ratios.iter().copied().fold(f64::MIN, f64::max);
            let min = ratios.iter().copied().fold(f64::MAX, f64::min);
            Some(max / min)
        }
    };
    Ok(ScalingFit { grid, hypothesis, slope, intercept, max_rel_residual, log_correction_ratio_drift })
}
