//! The acceptance suite: thirteen numerical criteria, each reported as one
//! pass/fail line with the measured quantities. Shared by the `reproduce`
//! command and the `acceptance` test target.

use std::f64::consts::PI;
use std::sync::Arc;
use std::time::Instant;

use hyperwave_core::chaos::{
    hermite, indicator_coeffs, leray_b_norm_sq, mean_var, normal_cdf, normal_pdf, summarize, Kernel, McPlan,
};
use hyperwave_core::hypgeo::{ball_volume, random_direction, sample_uniform_ball};
use hyperwave_core::moments::{
    contraction_mc, euclid_variance, fourier_zeros, scaling_fit, Hypothesis, Method, MomentEngine, PairDistanceRule,
    Power,
};
use hyperwave_core::quad::GaussHermite;
use hyperwave_core::rng::{stream, AUX_DOMAIN};
use hyperwave_core::specfun::{
    asymptotic_tail, calibrate_tail_constant, integrate_radial, spherical_f, tail_constant, CovarianceRoute,
    TailGrid, ODE_RTOL,
};
use hyperwave_core::waves::{covariance_matrix, superposition_covariance};
use hyperwave_core::SpectralParams;
use rayon::ThreadPool;
use serde::{Deserialize, Serialize};

use crate::orchestrate::{par_map, run_kernel, run_plan};
use crate::stats::{clt_report, local_limit_sup};
use crate::Result;

/// Problem sizes. `Desk` uses the sizes the criteria are stated for;
/// `Quick` shrinks every Monte Carlo budget for smoke runs, so its verdicts
/// are not meaningful.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Profile {
    Desk,
    Quick,
}

#[derive(Debug, Clone, Copy)]
struct Sizes {
    radial_points: usize,
    contraction_samples: usize,
    clt_realizations: usize,
    clt_points: usize,
    clt_block: usize,
    functional_realizations: usize,
    functional_points: usize,
    functional_block: usize,
    local_grid: usize,
    superposition_draws: usize,
}

impl Profile {
    fn sizes(self) -> Sizes {
        match self {
            Profile::Desk => Sizes {
                radial_points: 60,
                contraction_samples: 1_000_000,
                clt_realizations: 2000,
                clt_points: 2000,
                clt_block: 100,
                functional_realizations: 2000,
                functional_points: 1000,
                functional_block: 50,
                local_grid: 21,
                superposition_draws: 8,
            },
            Profile::Quick => Sizes {
                radial_points: 12,
                contraction_samples: 20_000,
                clt_realizations: 200,
                clt_points: 200,
                clt_block: 50,
                functional_realizations: 200,
                functional_points: 200,
                functional_block: 50,
                local_grid: 7,
                superposition_draws: 2,
            },
        }
    }
}

/// Outcome of one criterion.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Criterion {
    pub id: u8,
    pub title: &'static str,
    pub passed: bool,
    pub detail: String,
    pub seconds: f64,
}

impl Criterion {
    pub fn line(&self) -> String {
        let status = if self.passed { "PASS" } else { "FAIL" };
        format!("criterion {:>2} {status} {} ({:.1} s): {}", self.id, self.title, self.seconds, self.detail)
    }
}

pub const TITLES: [&str; 13] = [
    "covariance routes agree",
    "uniform exponential bound",
    "asymptotic remainder certificate",
    "variance asymptotics in lambda",
    "variance asymptotics in R",
    "hyperbolic vs Euclidean fourth chaos",
    "contraction decay",
    "central limit for the second polyspectrum",
    "first-order variance via Fourier transform",
    "Leray measure",
    "excursion volume",
    "local Berry limit",
    "identity suites",
];

/// Runs the selected criteria (all when `only` is empty), calling
/// `report` as each one finishes.
pub fn run_suite<F: FnMut(&Criterion)>(
    profile: Profile,
    seed: u64,
    pool: &ThreadPool,
    only: &[u8],
    mut report: F,
) -> Vec<Criterion> {
    let sizes = profile.sizes();
    let mut results = Vec::new();
    for id in 1..=13u8 {
        if !only.is_empty() && !only.contains(&id) {
            continue;
        }
        let start = Instant::now();
        let outcome = match id {
            1 => routes_agree(&sizes),
            2 => uniform_bound(&sizes),
            3 => tail_certificate(),
            4 => lambda_regime(pool),
            5 => radius_regime(pool),
            6 => euclid_discrepancy(pool),
            7 => contraction_decay(&sizes, seed, pool),
            8 => clt(&sizes, seed, pool),
            9 => fourier(),
            10 => leray(&sizes, seed, pool),
            11 => excursion(&sizes, seed, pool),
            12 => local_limit(&sizes),
            _ => identities(&sizes, seed),
        };
        let (passed, detail) = outcome.unwrap_or_else(|e| (false, format!("error: {e}")));
        let c = Criterion { id, title: TITLES[id as usize - 1], passed, detail, seconds: start.elapsed().as_secs_f64() };
        report(&c);
        results.push(c);
    }
    results
}

type Outcome = Result<(bool, String)>;

fn params(n: usize, alpha: f64) -> Result<SpectralParams> {
    Ok(SpectralParams::new(n, alpha)?)
}

fn log_grid(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    (0..count).map(|k| lo * (hi / lo).powf(k as f64 / (count - 1) as f64)).collect()
}

fn band(values: &[f64]) -> f64 {
    let max = values.iter().copied().fold(f64::MIN, f64::max);
    let min = values.iter().copied().fold(f64::MAX, f64::min);
    max / min
}

fn fmt_list(values: &[f64]) -> String {
    let parts: Vec<String> = values.iter().map(|v| format!("{v:.3}")).collect();
    format!("[{}]", parts.join(", "))
}

const ROUTE_TOL: f64 = 1e-6;

/// Routes are compared relative to the local amplitude `√(F² + F'²/λ)`,
/// which does not vanish at the zeros of `F`.
fn routes_agree(sizes: &Sizes) -> Outcome {
    let start = Instant::now();
    let radii = log_grid(1e-3, 6.0, sizes.radial_points);
    let mut worst = 0.0f64;
    let mut worst_at = (0, 0.0, 0.0);
    let mut worst_residual = 0.0f64;
    for n in [2usize, 3, 4] {
        for alpha in [1.0, 5.0, 20.0, 50.0] {
            let p = params(n, alpha)?;
            let lambda = p.lambda();
            let reference = integrate_radial(&p, &radii, ODE_RTOL);
            for state in &reference {
                let r = state.r;
                let amp = (state.value * state.value + state.derivative * state.derivative / lambda).sqrt();
                let values = [
                    spherical_f(&p, r, CovarianceRoute::Hypergeometric)?.value,
                    spherical_f(&p, r, CovarianceRoute::Ode)?.value,
                    spherical_f(&p, r, CovarianceRoute::Quadrature)?.value,
                ];
                for i in 0..3 {
                    for j in i + 1..3 {
                        let dev = (values[i] - values[j]).abs() / amp;
                        if dev > worst {
                            worst = dev;
                            worst_at = (n, alpha, r);
                        }
                    }
                }
                // radial equation applied to the quadrature route
                let h = (0.01 / alpha.max(1.0)).min(0.5 * r);
                let f = |x: f64| spherical_f(&p, x, CovarianceRoute::Quadrature).map(|e| e.value);
                let (fm, f0, fp) = (f(r - h)?, values[2], f(r + h)?);
                let d1 = (fp - fm) / (2.0 * h);
                let d2 = (fp - 2.0 * f0 + fm) / (h * h);
                let residual = (d2 + (n as f64 - 1.0) / r.tanh() * d1 + lambda * f0).abs() / lambda;
                worst_residual = worst_residual.max(residual);
            }
        }
    }
    let secs = start.elapsed().as_secs_f64();
    let passed = worst <= ROUTE_TOL && worst_residual < 1e-4 && secs < 60.0;
    Ok((
        passed,
        format!(
            "max route gap {worst:.2e} (tol {ROUTE_TOL:e}) at n={} α={} r={:.4}; max ODE residual/λ {worst_residual:.2e} (tol 1e-4); {secs:.1} s (limit 60 s)",
            worst_at.0, worst_at.1, worst_at.2
        ),
    ))
}

fn uniform_bound(sizes: &Sizes) -> Outcome {
    let coarse = log_grid(1e-3, 6.0, sizes.radial_points);
    let fine = log_grid(1e-3, 6.0, 10 * sizes.radial_points);
    let mut passed = true;
    let mut parts = Vec::new();
    for n in [2usize, 3, 4] {
        let mut maxima = [0.0f64; 2];
        for alpha in [1.0, 5.0, 20.0, 50.0] {
            let p = params(n, alpha)?;
            for (slot, grid) in [&coarse, &fine].into_iter().enumerate() {
                for s in integrate_radial(&p, grid, ODE_RTOL) {
                    maxima[slot] = maxima[slot].max(s.value.abs() * (p.sigma() * s.r).exp());
                }
            }
        }
        let ok = maxima.iter().all(|m| m.is_finite()) && maxima[0] < 1.01 * maxima[1] && maxima[1] < 1.01 * maxima[0];
        passed &= ok;
        parts.push(format!("n={n}: max {:.4} vs finer {:.4}", maxima[0], maxima[1]));
    }
    Ok((passed, parts.join("; ")))
}

fn tail_certificate() -> Outcome {
    let holdout = TailGrid::holdout();
    let calibration = TailGrid::calibration();
    let mut violations = 0usize;
    let mut checked = 0usize;
    let mut parts = Vec::new();
    for n in 2..=6usize {
        let frozen = tail_constant(n)?;
        let live = calibrate_tail_constant(n, &calibration)?;
        for &alpha in &holdout.alphas {
            let p = params(n, alpha)?;
            for s in integrate_radial(&p, &holdout.radii, ODE_RTOL) {
                checked += 1;
                if !asymptotic_tail(&p, s.r)?.contains(s.value) {
                    violations += 1;
                }
            }
        }
        parts.push(format!("K_{n}={frozen:.4} (recalibrated {live:.4})"));
    }
    Ok((violations == 0, format!("{violations} violations on {checked} hold-out points; {}", parts.join(", "))))
}

fn lambda_regime(pool: &ThreadPool) -> Outcome {
    let radius = 2.0;
    let alphas = log_grid(10.0, 100.0, 12);
    let mut passed = true;
    let mut parts = Vec::new();
    for n in [2usize, 3] {
        let rule = Arc::new(PairDistanceRule::new(n, radius, 6.0 * 100.0)?);
        let rows = par_map(pool, &alphas, |&a| {
            let e = MomentEngine::with_rule(params(n, a)?, rule.clone())?;
            let mut row = Vec::new();
            for q in [2, 4, 6] {
                row.push((e.params().lambda(), e.variance(q, Power::Signed, Method::ExactAngular)?.value));
            }
            Ok(row)
        })?;
        let column = |k: usize| rows.iter().map(|r| r[k]).collect::<Vec<_>>();
        let sigma = 0.5 * (n as f64 - 1.0);
        let s2 = scaling_fit(&column(0), Hypothesis::PurePower)?.slope;
        let s6 = scaling_fit(&column(2), Hypothesis::PurePower)?.slope;
        let ok2 = (s2 + sigma).abs() <= 0.05;
        let ok6 = (s6 + sigma + 0.5).abs() <= 0.1;
        passed &= ok2 && ok6;
        parts.push(format!("n={n}: q=2 slope {s2:.4} (want {:.2}±0.05), q=6 slope {s6:.4} (want {:.2}±0.1)", -sigma, -sigma - 0.5));
        if n == 2 {
            let pure = scaling_fit(&column(1), Hypothesis::PurePower)?;
            let logged = scaling_fit(&column(1), Hypothesis::PowerWithLog { slope0: -1.0 })?;
            let drift = logged.log_correction_ratio_drift.unwrap_or(f64::INFINITY);
            let ok_drift = drift < 1.2;
            let ok_select = pure.max_rel_residual > logged.max_rel_residual;
            passed &= ok_drift && ok_select;
            parts.push(format!(
                "n=2 q=4: drift of value·λ/log λ over top decade {drift:.4} (want <1.2), residual pure {:.3e} vs log {:.3e} (want pure > log)",
                pure.max_rel_residual, logged.max_rel_residual
            ));
        }
    }
    Ok((passed, parts.join("; ")))
}

fn radius_regime(pool: &ThreadPool) -> Outcome {
    let radii: Vec<f64> = (3..=8).map(f64::from).collect();
    let mut passed = true;
    let mut parts = Vec::new();
    for n in [2usize, 3] {
        let rows = par_map(pool, &radii, |&r| {
            let e = MomentEngine::new(params(n, 2.0)?, r, 6)?;
            let m = ball_volume(n, r)?;
            let v = |q| e.variance(q, Power::Signed, Method::ExactAngular).map(|v| v.value);
            Ok([v(2)? / (r * m), v(4)? / m, v(6)? / m, v(2)? / m])
        })?;
        for (k, label) in [(0usize, "q=2 value/(R·m)"), (1, "q=4 value/m"), (2, "q=6 value/m")] {
            let col: Vec<f64> = rows.iter().map(|r| r[k]).collect();
            let b = band(&col);
            passed &= b < 2.0;
            parts.push(format!("n={n} {label} band {b:.3} {}", fmt_list(&col)));
        }
        let q2m: Vec<f64> = rows.iter().map(|r| r[3]).collect();
        parts.push(format!("n={n} q=2 value/m {}", fmt_list(&q2m)));
    }
    Ok((passed, parts.join("; ")))
}

fn euclid_discrepancy(pool: &ThreadPool) -> Outcome {
    let radii: Vec<f64> = (3..=8).map(f64::from).collect();
    let hyper = par_map(pool, &radii, |&r| {
        let e = MomentEngine::new(params(2, 2.0)?, r, 4)?;
        Ok(e.variance(4, Power::Signed, Method::ExactAngular)?.value / ball_volume(2, r)?)
    })?;
    let euclid_radii = [5.0, 10.0, 20.0, 40.0];
    let euclid = par_map(pool, &euclid_radii, |&r| Ok(euclid_variance(2, 4.0, r, 4)?.value / (PI * r * r)))?;
    let hyper_drift = band(&hyper);
    let growth = euclid[3] / euclid[0];
    let increasing = euclid.windows(2).all(|w| w[1] > w[0]);
    Ok((
        hyper_drift < 2.0 && growth > 1.5 && increasing,
        format!(
            "hyperbolic value/m drift {hyper_drift:.3} (want <2) {}; Euclidean value/(πR²) growth {growth:.3} (want >1.5) {}",
            fmt_list(&hyper),
            fmt_list(&euclid)
        ),
    ))
}

fn contraction_decay(sizes: &Sizes, seed: u64, pool: &ThreadPool) -> Outcome {
    let n = 2usize;
    let sigma = 0.5;
    let lambda_cases: Vec<(f64, f64)> = [2.0, 4.0, 8.0, 16.0].iter().map(|&a| (a, 2.0)).collect();
    let radius_cases: Vec<(f64, f64)> = [2.0, 3.0, 4.0, 5.0].iter().map(|&r| (2.0, r)).collect();
    let all: Vec<(usize, (f64, f64))> = lambda_cases.iter().chain(&radius_cases).copied().enumerate().collect();
    let ratios = par_map(pool, &all, |&(k, (alpha, r))| {
        let p = params(n, alpha)?;
        let mut rng = stream(seed, AUX_DOMAIN + 700 + k as u64);
        let c = contraction_mc(&p, r, 1, 1, sizes.contraction_samples, &mut rng)?;
        let v = MomentEngine::new(p, r, 2)?.variance(2, Power::Signed, Method::ExactAngular)?.value;
        Ok((p.lambda(), r, c.value / (v * v), c.std_error / c.value.abs()))
    })?;
    let (lam, rad) = ratios.split_at(4);
    let lam_fit = scaling_fit_loose(lam.iter().map(|x| (x.0, x.2)).collect())?;
    let rad_fit = scaling_fit_loose(rad.iter().map(|x| (x.1, x.2)).collect())?;
    let want_lam = -(sigma + 2.0);
    let passed = (lam_fit - want_lam).abs() <= 0.4 && (rad_fit + 1.0).abs() <= 0.4;
    let xs = |v: &[(f64, f64, f64, f64)]| {
        v.iter().map(|x| format!("{:.3e}(±{:.0}%)", x.2, 100.0 * x.3)).collect::<Vec<_>>().join(", ")
    };
    Ok((
        passed,
        format!(
            "λ-slope {lam_fit:.3} (want {want_lam:.1}±0.4) X=[{}]; R-slope {rad_fit:.3} (want -1±0.4) X=[{}]",
            xs(lam),
            xs(rad)
        ),
    ))
}

/// Least-squares log-log slope for short grids.
fn scaling_fit_loose(points: Vec<(f64, f64)>) -> Result<f64> {
    if points.iter().any(|p| !(p.1 > 0.0)) {
        return Err(crate::Error::Stats("non-positive contraction ratio".into()));
    }
    let k = points.len() as f64;
    let lx: Vec<f64> = points.iter().map(|p| p.0.ln()).collect();
    let ly: Vec<f64> = points.iter().map(|p| p.1.ln()).collect();
    let mx = lx.iter().sum::<f64>() / k;
    let my = ly.iter().sum::<f64>() / k;
    let sxy: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = lx.iter().map(|x| (x - mx) * (x - mx)).sum();
    Ok(sxy / sxx)
}

fn clt(sizes: &Sizes, seed: u64, pool: &ThreadPool) -> Outcome {
    let plan = |alpha: f64, r: f64| -> Result<McPlan> {
        Ok(McPlan::new(params(2, alpha)?, r, sizes.clt_points, sizes.clt_realizations, seed)
            .with_design_block(sizes.clt_block))
    };
    let mut passed = true;
    let mut parts = Vec::new();
    for (label, cases) in [("α", [(10.0, 2.0), (30.0, 2.0), (100.0, 2.0)]), ("R", [(2.0, 3.0), (2.0, 5.0), (2.0, 7.0)])] {
        let mut w = Vec::new();
        let mut ratios = Vec::new();
        for (alpha, r) in cases {
            let rep = clt_report(pool, &plan(alpha, r)?, 2)?;
            w.push(rep.w1_to_gaussian);
            ratios.push(rep.corrected_variance_ratio());
        }
        let decreasing = w.windows(2).all(|p| p[1] < p[0]);
        let terminal = w[2] < 0.08;
        passed &= decreasing && terminal;
        parts.push(format!(
            "over {label}: W1 {} (want decreasing, last <0.08), variance ratio {}",
            fmt_list(&w),
            fmt_list(&ratios)
        ));
    }
    Ok((passed, parts.join("; ")))
}

fn fourier() -> Outcome {
    let p = |a| params(2, a);
    let mut ratios = Vec::new();
    for alpha in [5.0, 10.0, 20.0, 40.0] {
        if let Some(r) = MomentEngine::new(p(alpha)?, 2.0, 1)?.ball_fourier()?.ratio {
            ratios.push(r);
        }
    }
    let spread = band(&ratios) - 1.0;
    let zeros = fourier_zeros(2, 2.0, 1.0, 50.0, 0.25)?;
    let shown: Vec<f64> = zeros.iter().take(4).copied().collect();
    Ok((
        spread < 0.01 && zeros.len() >= 3 && ratios.len() >= 2,
        format!(
            "C1/f_R² = {} (spread {spread:.2e}, want <1%); {} zeros of f_R on [1,50], first {}",
            fmt_list(&ratios),
            zeros.len(),
            fmt_list(&shown)
        ),
    ))
}

fn leray(sizes: &Sizes, seed: u64, pool: &ThreadPool) -> Outcome {
    let (n, radius, alpha) = (2usize, 1.5, 10.0);
    let eps = [0.1, 0.05, 0.025];
    let p = params(n, alpha)?;
    let plan = McPlan::new(p, radius, sizes.functional_points, sizes.functional_realizations, seed ^ 0x1e7a)
        .with_design_block(sizes.functional_block);
    let kernels: Vec<Kernel> = eps.iter().map(|&e| Kernel::Leray(e)).collect();
    let rows = run_plan(pool, &plan, &kernels)?;
    let m = ball_volume(n, radius)?;
    let target = m / (2.0 * PI).sqrt();
    let k = rows.len() as f64;
    let mut passed = true;
    let mut parts = Vec::new();
    let mut means = Vec::new();
    for (j, e) in eps.iter().enumerate() {
        let s = summarize(&rows.iter().map(|r| r[j]).collect::<Vec<_>>());
        let ok = (s.mean - target).abs() <= 4.0 * s.std_error;
        passed &= ok;
        means.push(s.mean);
        parts.push(format!("ε={e}: mean {:.4}±{:.4}", s.mean, s.std_error));
    }
    parts.push(format!("target m/√(2π) = {target:.4}"));
    for j in 0..eps.len() - 1 {
        let diffs: Vec<f64> = rows.iter().map(|r| r[j].estimate - r[j + 1].estimate).collect();
        let (d, v) = mean_var(&diffs);
        let se = (v / k).sqrt();
        let ok = d.abs() <= 4.0 * se;
        passed &= ok;
        parts.push(format!("Δ(ε{},ε{}) {d:.4}±{se:.4}", j, j + 1));
    }
    let last = eps.len() - 1;
    let second = rows.iter().map(|r| r[last].estimate.powi(2) - r[last].spatial_noise_var).sum::<f64>() / k;
    let engine = MomentEngine::new(p, radius, 4)?;
    let quad = engine.leray_second_moment()?;
    let rel = second / quad.value - 1.0;
    passed &= rel.abs() <= 0.1 && !quad.degraded;
    parts.push(format!("second moment MC {second:.4} vs quadrature {:.4} ({:+.1}%)", quad.value, 100.0 * rel));
    // boundedness in λ and the fourth-chaos control of the remainder
    let alphas = [5.0, 10.0, 20.0, 40.0, 80.0];
    let rows = par_map(pool, &alphas, |&a| {
        let e = MomentEngine::new(params(n, a)?, radius, 4)?;
        let l2 = e.leray_second_moment()?.value;
        let c2 = e.variance(2, Power::Signed, Method::ExactAngular)?.value;
        let c4 = e.variance(4, Power::Signed, Method::ExactAngular)?.value;
        Ok((l2, (l2 - m * m / (2.0 * PI) - c2 / (8.0 * PI)) / c4))
    })?;
    let l2s: Vec<f64> = rows.iter().map(|r| r.0).collect();
    let remainders: Vec<f64> = rows.iter().map(|r| r.1).collect();
    let bounded = band(&l2s) < 2.0 && remainders.iter().all(|&x| x > 0.0) && band(&remainders) < 2.0;
    passed &= bounded;
    parts.push(format!(
        "E[L²] over α∈{{5..80}} {} ; (E[L²]−m²/2π−C2/8π)/C4 {}",
        fmt_list(&l2s),
        fmt_list(&remainders)
    ));
    Ok((passed, parts.join("; ")))
}

fn excursion(sizes: &Sizes, seed: u64, pool: &ThreadPool) -> Outcome {
    let (n, radius, t) = (2usize, 1.5, 1.0);
    let m = ball_volume(n, radius)?;
    let scale = t * t * normal_pdf(t).powi(2) / 4.0;
    let mut passed = true;
    let mut parts = Vec::new();
    let mut ratios = Vec::new();
    for (k, alpha) in [10.0, 20.0].into_iter().enumerate() {
        let p = params(n, alpha)?;
        let plan = McPlan::new(p, radius, sizes.functional_points, sizes.functional_realizations, seed ^ (0xe0 + k as u64))
            .with_design_block(sizes.functional_block);
        let s = summarize(&run_kernel(pool, &plan, Kernel::Excursion(t))?);
        let c2 = MomentEngine::new(p, radius, 2)?.variance(2, Power::Signed, Method::ExactAngular)?.value;
        let ratio = (s.variance - s.spatial_noise) / (scale * c2);
        let mean_ok = (s.mean - m * normal_cdf(t)).abs() <= 4.0 * s.std_error;
        passed &= mean_ok;
        ratios.push(ratio);
        parts.push(format!(
            "α={alpha}: mean {:.4}±{:.4} (want {:.4}), variance ratio {ratio:.3}",
            s.mean,
            s.std_error,
            m * normal_cdf(t)
        ));
    }
    let stable = band(&ratios) < 1.3;
    passed &= stable;
    parts.push(format!("ratio spread {:.3} (want <1.3)", band(&ratios)));
    Ok((passed, parts.join("; ")))
}

fn local_limit(sizes: &Sizes) -> Outcome {
    let pts = local_limit_sup(&[1e2, 1e3, 1e4], 2, 5.0, sizes.local_grid)?;
    let sups: Vec<f64> = pts.iter().map(|p| p.sup_dev).collect();
    let decreasing = sups.windows(2).all(|w| w[1] < w[0]);
    let terminal = sups[2] < 0.05;
    let note = if pts.iter().any(|p| p.outside_window) { " (λ=100 grid reaches √λ/2)" } else { "" };
    Ok((decreasing && terminal, format!("sup deviation at λ=1e2,1e3,1e4: {}{note}; want decreasing, last <0.05", fmt_list_e(&sups))))
}

fn fmt_list_e(values: &[f64]) -> String {
    let parts: Vec<String> = values.iter().map(|v| format!("{v:.3e}")).collect();
    format!("[{}]", parts.join(", "))
}

fn identities(sizes: &Sizes, seed: u64) -> Outcome {
    let start = Instant::now();
    let mut parts = Vec::new();
    // generating function, q <= 12
    let mut gen_err = 0.0f64;
    for i in 0..=8 {
        for j in 0..=8 {
            let (s, t) = (-2.0 + 0.5 * i as f64, -2.0 + 0.5 * j as f64);
            let mut sum = 0.0;
            let mut coeff = 1.0;
            for q in 0..=12 {
                if q > 0 {
                    coeff *= t / q as f64;
                }
                sum += hermite(q, s) * coeff;
            }
            gen_err = gen_err.max((sum - (s * t - 0.5 * t * t).exp()).abs());
        }
    }
    let gen_ok = gen_err <= 1e-8;
    parts.push(format!("generating function (q≤12) max error {gen_err:.2e} (tol 1e-8)"));
    // orthogonality
    let gh = GaussHermite::new(200);
    let mut orth_err = 0.0f64;
    for p in 0..=10usize {
        for q in 0..=10usize {
            let v = gh.expect(|x| hermite(p, x) * hermite(q, x));
            let fact: f64 = (1..=q).map(|k| k as f64).product();
            let want = if p == q { fact } else { 0.0 };
            orth_err = orth_err.max((v - want).abs() / fact.max(1.0));
        }
    }
    let orth_ok = orth_err <= 1e-9;
    parts.push(format!("orthogonality max error {orth_err:.2e} (tol 1e-9)"));
    // Σ ψ_q² / q!
    let t = 1.0;
    let a = indicator_coeffs(t, 40);
    let mut fact = 1.0;
    let mut psi_sum = 0.0;
    for (q, aq) in a.iter().enumerate().skip(1) {
        fact *= q as f64;
        psi_sum += aq * aq * fact;
    }
    let psi_err = (psi_sum - normal_cdf(t) * (1.0 - normal_cdf(t))).abs();
    let psi_ok = psi_err <= 1e-6;
    parts.push(format!("Σψ²/q! (q≤40) error {psi_err:.2e} (tol 1e-6)"));
    // power series
    let mut series_errs = Vec::new();
    for x in [0.0f64, 0.3, 0.6, 0.9] {
        let sum: f64 = (0..=40).map(|l| leray_b_norm_sq(l) * x.powi(2 * l as i32) * 2.0 * PI).sum();
        series_errs.push((sum - 1.0 / (1.0 - x * x).sqrt()).abs());
    }
    let series_ok = series_errs.iter().all(|&e| e <= 1e-6);
    parts.push(format!("power series (ℓ≤40) errors at x=0,.3,.6,.9 {} (tol 1e-6)", fmt_list_e(&series_errs)));
    // superposition covariance convergence
    let p = params(2, 5.0)?;
    let mut rng = stream(seed, AUX_DOMAIN + 1300);
    let points = sample_uniform_ball(2, 1.0, 20, &mut rng)?;
    let exact = covariance_matrix(&points, &p)?;
    let counts = [16usize, 64, 256, 1024, 4096];
    let mut grid = Vec::new();
    for &waves in &counts {
        let mut acc = 0.0;
        for _ in 0..sizes.superposition_draws {
            let dirs: Vec<Vec<f64>> = (0..waves).map(|_| random_direction(2, &mut rng)).collect();
            let approx = superposition_covariance(&points, &p, &dirs)?;
            let sq: f64 = exact.as_slice().iter().zip(approx.as_slice()).map(|(a, b)| (a - b) * (a - b)).sum();
            acc += sq / exact.as_slice().len() as f64;
        }
        grid.push((waves as f64, (acc / sizes.superposition_draws as f64).sqrt()));
    }
    let slope = scaling_fit(&grid, Hypothesis::PurePower)?.slope;
    let slope_ok = (slope + 0.5).abs() <= 0.1;
    parts.push(format!("superposition covariance RMS error slope {slope:.3} (want -0.5±0.1)"));
    let secs = start.elapsed().as_secs_f64();
    parts.push(format!("{secs:.1} s (limit 30 s)"));
    Ok((gen_ok && orth_ok && psi_ok && series_ok && slope_ok && secs < 30.0, parts.join("; ")))
}

/// Writes `report.csv` rows: one per criterion.
pub fn write_report<W: std::io::Write>(out: W, results: &[Criterion]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["criterion", "title", "status", "seconds", "detail"])?;
    for c in results {
        w.write_record([
            c.id.to_string(),
            c.title.to_string(),
            if c.passed { "pass" } else { "fail" }.to_string(),
            format!("{:.1}", c.seconds),
            c.detail.clone(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quick_identity_suite_reports_every_subcheck() {
        let pool = crate::orchestrate::pool(1).unwrap();
        let r = run_suite(Profile::Quick, 1, &pool, &[13], |_| {});
        assert_eq!(r.len(), 1);
        for key in ["generating", "orthogonality", "Σψ²", "power series", "superposition"] {
            assert!(r[0].detail.contains(key), "{}", r[0].detail);
        }
    }

    #[test]
    fn report_has_one_row_per_criterion() {
        let rows = vec![
            Criterion { id: 1, title: TITLES[0], passed: true, detail: "a, b".into(), seconds: 0.5 },
            Criterion { id: 2, title: TITLES[1], passed: false, detail: "c".into(), seconds: 1.0 },
        ];
        let mut buf = Vec::new();
        write_report(&mut buf, &rows).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().count(), 3);
        assert!(text.contains("\"a, b\""));
        assert!(rows[1].line().contains("FAIL"));
    }
}
