//! Distributional statistics: Wasserstein-1 distance to a Gaussian, CLT
//! reports for polyspectra and the local Berry-limit harness.

use hyperwave_core::chaos::{mean_var, summarize, Kernel, McPlan};
use hyperwave_core::hypgeo::distance_polar;
use hyperwave_core::moments::variance_cq;
use hyperwave_core::specfun::{berry_covariance, CovarianceTable};
use hyperwave_core::SpectralParams;
use rayon::ThreadPool;
use statrs::distribution::{ContinuousCDF, Normal};

use crate::orchestrate::run_kernel;
use crate::{Error, Result};

pub const MIN_W1_SAMPLES: usize = 100;

/// `W₁` between the empirical measure of `samples` and `N(0, var)`, by the
/// order-statistics estimator `(1/K) Σ |x_(i) − Φ_var^{−1}((i − ½)/K)|`.
pub fn wasserstein1_gaussian(samples: &[f64], var: f64) -> Result<f64> {
    if !(var > 0.0) || !var.is_finite() {
        return Err(Error::Stats(format!("reference variance must be positive, got {var}")));
    }
    if samples.len() < MIN_W1_SAMPLES {
        return Err(Error::Stats(format!("need at least {MIN_W1_SAMPLES} samples, got {}", samples.len())));
    }
    if samples.iter().any(|x| !x.is_finite()) {
        return Err(Error::Stats("samples must be finite".into()));
    }
    let mut sorted = samples.to_vec();
    sorted.sort_by(f64::total_cmp);
    let normal = Normal::new(0.0, var.sqrt()).map_err(|e| Error::Stats(e.to_string()))?;
    let k = sorted.len() as f64;
    let total: f64 = sorted
        .iter()
        .enumerate()
        .map(|(i, x)| (x - normal.inverse_cdf((i as f64 + 0.5) / k)).abs())
        .sum();
    Ok(total / k)
}

/// Distance of normalized polyspectrum samples to the variance-matched
/// Gaussian.
#[derive(Debug, Clone, PartialEq)]
pub struct CltReport {
    pub n: usize,
    pub q: usize,
    pub radius: f64,
    pub alpha: f64,
    pub samples: usize,
    pub spatial_points: usize,
    pub seed: u64,
    /// Sample variance of the raw estimates.
    pub empirical_variance: f64,
    /// `C^{n,q}_{R,λ}` from the deterministic quadrature.
    pub theoretical_variance: f64,
    /// Mean jackknife estimate of the spatial-sampling variance.
    pub spatial_noise: f64,
    pub w1_to_gaussian: f64,
    /// Odd orders carry no CLT claim; their reports are descriptive.
    pub clt_claim: bool,
}

impl CltReport {
    /// Samples are divided by `√C^{n,q}`; the reference Gaussian has the
    /// variance of the normalized samples.
    pub const NORMALIZATION: &'static str = "h/sqrt(C_nq) vs N(0, var(h)/C_nq)";

    /// `(empirical − spatial noise) / theoretical`.
    pub fn corrected_variance_ratio(&self) -> f64 {
        (self.empirical_variance - self.spatial_noise) / self.theoretical_variance
    }
}

pub fn clt_report(pool: &ThreadPool, plan: &McPlan, q: usize) -> Result<CltReport> {
    if q == 0 {
        return Err(Error::Stats("the zeroth polyspectrum is the constant m(B_R)".into()));
    }
    let samples = run_kernel(pool, plan, Kernel::Hermite(q))?;
    let theory = variance_cq(&plan.params, plan.radius, q)?.value;
    let summary = summarize(&samples);
    let scale = theory.abs().sqrt();
    let z: Vec<f64> = samples.iter().map(|s| s.estimate / scale).collect();
    let (_, gamma2) = mean_var(&z);
    Ok(CltReport {
        n: plan.params.n(),
        q,
        radius: plan.radius,
        alpha: plan.params.alpha(),
        samples: samples.len(),
        spatial_points: plan.spatial_points,
        seed: plan.seed,
        empirical_variance: summary.variance,
        theoretical_variance: theory,
        spatial_noise: summary.spatial_noise,
        w1_to_gaussian: wasserstein1_gaussian(&z, gamma2)?,
        clt_claim: Kernel::Hermite(q).has_clt_claim(),
    })
}

/// Supremum of the local-limit deviation at one eigenvalue.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LocalLimitPoint {
    pub lambda: f64,
    pub sup_dev: f64,
    /// Set when the grid reaches beyond `√λ / 2`.
    pub outside_window: bool,
}

/// For each `λ`, the largest `|F_{n,λ}(d(exp(v/√λ), exp(v'/√λ))) − C_{n,1}(|v − v'|)|`
/// over `|v|, |v'| <= extent`, using isotropy to reduce to the two radii and
/// the angle between them, each sampled at `grid_points` values.
pub fn local_limit_sup(lambdas: &[f64], n: usize, extent: f64, grid_points: usize) -> Result<Vec<LocalLimitPoint>> {
    if grid_points < 2 || !(extent > 0.0) {
        return Err(Error::Stats("need at least two grid points and a positive extent".into()));
    }
    let mut out = Vec::with_capacity(lambdas.len());
    for &lambda in lambdas {
        let p = SpectralParams::from_lambda(n, lambda)?;
        let root = lambda.sqrt();
        let table = CovarianceTable::new(p, 2.0 * extent / root * (1.0 + 1e-9))?;
        let step = extent / (grid_points - 1) as f64;
        let angle_step = std::f64::consts::PI / (grid_points - 1) as f64;
        let mut sup = 0.0f64;
        for i in 0..grid_points {
            let a = i as f64 * step;
            for j in 0..grid_points {
                let b = j as f64 * step;
                for k in 0..grid_points {
                    let theta = k as f64 * angle_step;
                    let d = distance_polar(a / root, b / root, theta).min(table.r_max());
                    let euclid = (a * a + b * b - 2.0 * a * b * theta.cos()).max(0.0).sqrt();
                    let dev = (table.value(d)? - berry_covariance(n, 1.0, euclid)).abs();
                    sup = sup.max(dev);
                }
            }
        }
        out.push(LocalLimitPoint { lambda, sup_dev: sup, outside_window: extent >= 0.5 * root });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use hyperwave_core::rng::stream;
    use rand::Rng;

    /// Box–Muller normals, enough for test inputs.
    fn standard_normals(count: usize, seed: u64) -> Vec<f64> {
        let mut rng = stream(seed, 0);
        (0..count)
            .map(|_| {
                let u: f64 = 1.0 - rng.random::<f64>();
                let v: f64 = rng.random();
                (-2.0 * u.ln()).sqrt() * (2.0 * std::f64::consts::PI * v).cos()
            })
            .collect()
    }

    #[test]
    fn gaussian_samples_are_close() {
        let x = standard_normals(10_000, 3);
        assert!(wasserstein1_gaussian(&x, 1.0).unwrap() < 0.03);
    }

    #[test]
    fn zeros_sit_at_mean_absolute_value() {
        let w = wasserstein1_gaussian(&vec![0.0; 4000], 1.0).unwrap();
        assert!((w - (2.0 / std::f64::consts::PI).sqrt()).abs() < 2e-3);
        assert!(wasserstein1_gaussian(&vec![0.0; 4000], 0.0).is_err());
        assert!(wasserstein1_gaussian(&[0.0; 99], 1.0).is_err());
    }

    #[test]
    fn scale_equivariance() {
        let x = standard_normals(500, 8);
        let b = 3.5;
        let scaled: Vec<f64> = x.iter().map(|v| b * v).collect();
        let lhs = wasserstein1_gaussian(&scaled, b * b * 1.3).unwrap();
        let rhs = b * wasserstein1_gaussian(&x, 1.3).unwrap();
        assert!((lhs - rhs).abs() < 1e-12 * rhs);
    }

    #[test]
    fn coincident_arguments_have_no_deviation() {
        let pts = local_limit_sup(&[400.0], 2, 2.0, 2).unwrap();
        assert!(pts[0].sup_dev < 0.05);
        let single = local_limit_sup(&[100.0], 2, 1e-9, 2).unwrap();
        assert!(single[0].sup_dev < 1e-9);
        assert!(local_limit_sup(&[100.0], 2, 5.0, 3).unwrap()[0].outside_window);
    }
}
