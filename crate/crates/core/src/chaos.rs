//! Hermite polynomials, chaos projections and Monte Carlo estimators of
//! integral functionals `∫_{B_R} G(u(x)) dm_n(x)`.
//!
//! Every estimator is `m_n(B_R) · (1/M) Σ_i G(u(x_i))` over `M` uniform
//! points. Realizations are grouped into design blocks: the realizations of
//! one block share a point design and one covariance factorization, and
//! different blocks use independent designs. Conditional on its design a
//! realization is an exact field sample, so every estimate has the same law
//! as with per-realization designs; for centred kernels the estimates are
//! also uncorrelated, because their conditional means vanish.

use alloc::sync::Arc;
use alloc::vec::Vec;
use core::f64::consts::{PI, SQRT_2};

use crate::error::domain;
use crate::hypgeo::{ball_volume, BallSampler};
use crate::quad::{GaussHermite, GaussLegendre};
use crate::rng::{stream, DESIGN_DOMAIN};
use crate::waves::{GaussianSampler, SeedRecord};
use crate::{Error, Result, SpectralParams};
#[allow(unused_imports)]
use num_traits::Float;

/// Probabilists' Hermite polynomial `H_q(x)` by the three-term recurrence.
pub fn hermite(q: usize, x: f64) -> f64 {
    let (mut h0, mut h1) = (1.0, x);
    if q == 0 {
        return h0;
    }
    for k in 1..q {
        let h2 = x * h1 - k as f64 * h0;
        h0 = h1;
        h1 = h2;
    }
    h1
}

/// `[H_0(x), …, H_{q_max}(x)]`.
pub fn hermite_all(q_max: usize, x: f64) -> Vec<f64> {
    let mut h = Vec::with_capacity(q_max + 1);
    h.push(1.0);
    if q_max >= 1 {
        h.push(x);
    }
    for k in 1..q_max {
        let next = x * h[k] - k as f64 * h[k - 1];
        h.push(next);
    }
    h
}

pub fn normal_pdf(x: f64) -> f64 {
    (-0.5 * x * x).exp() / (2.0 * PI).sqrt()
}

pub fn normal_cdf(x: f64) -> f64 {
    0.5 * libm::erfc(-x / SQRT_2)
}

fn factorial(q: usize) -> f64 {
    (1..=q).map(|k| k as f64).product()
}

/// Chaos data attached to one order `q`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct HermiteCoeffs {
    pub q: usize,
}

impl HermiteCoeffs {
    pub fn new(q: usize) -> Self {
        HermiteCoeffs { q }
    }

    /// `ψ_0 = Φ(t)`, `ψ_q(t) = −H_{q−1}(t) φ(t)` for `q >= 1`.
    pub fn psi(&self, t: f64) -> f64 {
        if self.q == 0 {
            normal_cdf(t)
        } else {
            -hermite(self.q - 1, t) * normal_pdf(t)
        }
    }

    /// Coefficient `b_q = H_q(0) φ(0) / q!` of the Leray density.
    pub fn leray_b(&self) -> f64 {
        hermite(self.q, 0.0) * normal_pdf(0.0) / factorial(self.q)
    }
}

/// `binom(2ℓ, ℓ) / (2π 4^ℓ)`, the squared normalized Leray coefficient,
/// computed as a running product to avoid overflow.
pub fn leray_b_norm_sq(ell: usize) -> f64 {
    let mut c = 1.0;
    for k in 1..=ell {
        c *= (2 * k - 1) as f64 / (2 * k) as f64;
    }
    c / (2.0 * PI)
}

/// `A_0(t) = Φ(t)`, `A_q(t) = ψ_q(t) / q!`.
pub fn indicator_coeffs(t: f64, q_max: usize) -> Vec<f64> {
    let h = hermite_all(q_max.saturating_sub(1), t);
    let phi = normal_pdf(t);
    let mut out = Vec::with_capacity(q_max + 1);
    out.push(normal_cdf(t));
    let mut fact = 1.0;
    for q in 1..=q_max {
        fact *= q as f64;
        out.push(-h[q - 1] * phi / fact);
    }
    out
}

/// Threshold above which a projection coefficient counts towards the rank.
pub const RANK_THRESHOLD: f64 = 1e-10;
const HERMITE_NODES: usize = 200;
const PANEL_HALF_RANGE: f64 = 37.0;

/// Chaos coefficients `c_q = (1/q!) E[G(N) H_q(N)]` of a function `G`.
#[derive(Debug, Clone, PartialEq)]
pub struct Projection {
    pub coeffs: Vec<f64>,
    /// Smallest `q >= 1` with `|c_q| > RANK_THRESHOLD`.
    pub rank: Option<usize>,
    /// Set when the coefficients move under node refinement.
    pub divergent: bool,
}

/// Projects `g` on `H_0, …, H_{q_max}`. Smooth functions use 200-node
/// Gauss–Hermite; functions with jumps or kinks should list them in
/// `breakpoints`, which switches to Gauss–Legendre panels between them.
pub fn project_function<G: Fn(f64) -> f64>(g: G, q_max: usize, breakpoints: &[f64]) -> Projection {
    let (coeffs, coarse) = if breakpoints.is_empty() {
        (hermite_rule(&g, q_max, HERMITE_NODES), hermite_rule(&g, q_max, HERMITE_NODES * 3 / 4))
    } else {
        (panel_rule(&g, q_max, breakpoints, 0.25), panel_rule(&g, q_max, breakpoints, 0.5))
    };
    let divergent = coeffs
        .iter()
        .zip(&coarse)
        .any(|(a, b)| !a.is_finite() || (a - b).abs() > 1e-6 * a.abs().max(1.0));
    let rank = (1..=q_max).find(|&q| coeffs[q].abs() > RANK_THRESHOLD);
    Projection { coeffs, rank, divergent }
}

fn hermite_rule<G: Fn(f64) -> f64>(g: &G, q_max: usize, nodes: usize) -> Vec<f64> {
    let rule = GaussHermite::new(nodes);
    let mut acc = alloc::vec![0.0; q_max + 1];
    for (&x, &w) in rule.nodes.iter().zip(&rule.weights) {
        let gx = g(x);
        for (a, h) in acc.iter_mut().zip(hermite_all(q_max, x)) {
            *a += w * gx * h;
        }
    }
    scale_by_factorial(acc)
}

fn panel_rule<G: Fn(f64) -> f64>(g: &G, q_max: usize, breakpoints: &[f64], max_len: f64) -> Vec<f64> {
    let mut cuts: Vec<f64> = breakpoints.iter().copied().filter(|b| b.abs() < PANEL_HALF_RANGE).collect();
    cuts.push(-PANEL_HALF_RANGE);
    cuts.push(PANEL_HALF_RANGE);
    cuts.sort_by(f64::total_cmp);
    cuts.dedup();
    let rule = GaussLegendre::new(24);
    let mut acc = alloc::vec![0.0; q_max + 1];
    for pair in cuts.windows(2) {
        let pieces = ((pair[1] - pair[0]) / max_len).ceil().max(1.0) as usize;
        let width = (pair[1] - pair[0]) / pieces as f64;
        for k in 0..pieces {
            let a = pair[0] + k as f64 * width;
            let (mid, half) = (a + 0.5 * width, 0.5 * width);
            for (&t, &w) in rule.nodes.iter().zip(&rule.weights) {
                let x = mid + half * t;
                let weight = w * half * normal_pdf(x) * g(x);
                for (c, h) in acc.iter_mut().zip(hermite_all(q_max, x)) {
                    *c += weight * h;
                }
            }
        }
    }
    scale_by_factorial(acc)
}

fn scale_by_factorial(mut acc: Vec<f64>) -> Vec<f64> {
    let mut fact = 1.0;
    for (q, a) in acc.iter_mut().enumerate() {
        if q > 0 {
            fact *= q as f64;
        }
        *a /= fact;
    }
    acc
}

/// Pointwise kernel `G` of an integral functional `m_n(B_R)·mean G(u(x_i))`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Kernel {
    /// `H_q(u)`: the polyspectrum `h^{n,q}_{R,λ}`.
    Hermite(usize),
    /// `1{u <= t}`: the excursion volume `Φ_{R,λ}(t)`.
    Excursion(f64),
    /// `1{|u| <= ε} / (2ε)`: the Leray approximation `L^ε_{R,λ}`.
    Leray(f64),
}

impl Kernel {
    pub fn eval(&self, u: f64) -> f64 {
        match *self {
            Kernel::Hermite(q) => hermite(q, u),
            Kernel::Excursion(t) => f64::from(u8::from(u <= t)),
            Kernel::Leray(eps) => f64::from(u8::from(u.abs() <= eps)) / (2.0 * eps),
        }
    }

    /// Whether a Gaussian limit is claimed for the functional. Odd Hermite
    /// orders and the nodal excursion `t = 0`, where only odd chaoses
    /// survive, are reported without one.
    pub fn has_clt_claim(&self) -> bool {
        match *self {
            Kernel::Hermite(q) => q >= 2 && q % 2 == 0,
            Kernel::Excursion(t) => t != 0.0,
            Kernel::Leray(_) => true,
        }
    }

    /// Exact mean of the functional divided by `m_n(B_R)`.
    pub fn mean_density(&self) -> f64 {
        match *self {
            Kernel::Hermite(q) => f64::from(u8::from(q == 0)),
            Kernel::Excursion(t) => normal_cdf(t),
            Kernel::Leray(eps) => (normal_cdf(eps) - normal_cdf(-eps)) / (2.0 * eps),
        }
    }
}

/// One Monte Carlo estimate of an integral functional.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PolyspectrumSample {
    pub kernel: Kernel,
    pub estimate: f64,
    pub spatial_points: usize,
    /// Jackknife estimate of the variance contributed by spatial sampling.
    pub spatial_noise_var: f64,
    pub seed: SeedRecord,
}

/// Number of delete-one blocks in the spatial jackknife.
pub const JACKKNIFE_BLOCKS: usize = 20;

/// Mean and delete-one-block jackknife variance of the mean of `y`.
pub fn jackknife_mean(y: &[f64], blocks: usize) -> (f64, f64) {
    let n = y.len();
    let mean = y.iter().sum::<f64>() / n as f64;
    let b = blocks.min(n);
    if b < 2 {
        return (mean, 0.0);
    }
    let total: f64 = y.iter().sum();
    let mut partial = Vec::with_capacity(b);
    for k in 0..b {
        let (lo, hi) = (k * n / b, (k + 1) * n / b);
        let s: f64 = y[lo..hi].iter().sum();
        partial.push((total - s) / (n - (hi - lo)) as f64);
    }
    let avg = partial.iter().sum::<f64>() / b as f64;
    let var = partial.iter().map(|p| (p - avg) * (p - avg)).sum::<f64>() * (b - 1) as f64 / b as f64;
    (mean, var)
}

/// Monte Carlo configuration shared by all functional estimators.
#[derive(Debug, Clone, PartialEq)]
pub struct McPlan {
    pub params: SpectralParams,
    pub radius: f64,
    pub spatial_points: usize,
    pub realizations: usize,
    pub seed: u64,
    /// Realizations per point design; 1 draws a fresh design every time.
    pub design_block: usize,
}

impl McPlan {
    pub fn new(params: SpectralParams, radius: f64, spatial_points: usize, realizations: usize, seed: u64) -> Self {
        McPlan { params, radius, spatial_points, realizations, seed, design_block: 1 }
    }

    pub fn with_design_block(mut self, block: usize) -> Self {
        self.design_block = block.max(1);
        self
    }

    pub fn design_count(&self) -> usize {
        self.realizations.div_ceil(self.design_block)
    }

    fn validate(&self) -> Result<()> {
        if self.realizations == 0 {
            return Err(domain!("need at least one realization"));
        }
        if self.spatial_points < 2 {
            return Err(Error::TooFewSamples { needed: 2, got: self.spatial_points });
        }
        Ok(())
    }

    /// Runs the realizations of design block `design`, returning for each
    /// realization one sample per kernel.
    pub fn run_design(&self, design: usize, kernels: &[Kernel]) -> Result<Vec<Vec<PolyspectrumSample>>> {
        self.validate()?;
        let volume = ball_volume(self.params.n(), self.radius)?;
        let sampler = BallSampler::new(self.params.n(), self.radius)?;
        let mut rng = stream(self.seed, DESIGN_DOMAIN + design as u64);
        let points = Arc::new(sampler.sample_many(self.spatial_points, &mut rng));
        let field = GaussianSampler::new(points, &self.params)?;
        let first = design * self.design_block;
        let last = (first + self.design_block).min(self.realizations);
        let mut out = Vec::with_capacity(last.saturating_sub(first));
        let mut y = alloc::vec![0.0; self.spatial_points];
        for k in first..last {
            let realization = field.realize_stream(self.seed, k as u64);
            let seed = SeedRecord { seed: self.seed, stream: k as u64 };
            let mut row = Vec::with_capacity(kernels.len());
            for kernel in kernels {
                for (yi, &u) in y.iter_mut().zip(&realization.values) {
                    *yi = volume * kernel.eval(u);
                }
                let (estimate, spatial_noise_var) = jackknife_mean(&y, JACKKNIFE_BLOCKS);
                row.push(PolyspectrumSample { kernel: *kernel, estimate, spatial_points: self.spatial_points, spatial_noise_var, seed });
            }
            out.push(row);
        }
        Ok(out)
    }

    /// All realizations in order, one design block after another.
    pub fn run(&self, kernels: &[Kernel]) -> Result<Vec<Vec<PolyspectrumSample>>> {
        let mut all = Vec::with_capacity(self.realizations);
        for d in 0..self.design_count() {
            all.extend(self.run_design(d, kernels)?);
        }
        Ok(all)
    }
}

fn single_kernel(plan: &McPlan, kernel: Kernel) -> Result<Vec<PolyspectrumSample>> {
    Ok(plan.run(&[kernel])?.into_iter().map(|mut row| row.remove(0)).collect())
}

/// Samples of the polyspectrum `h^{n,q}_{R,λ} = ∫_{B_R} H_q(u) dm_n`.
pub fn polyspectrum_mc(plan: &McPlan, q: usize) -> Result<Vec<PolyspectrumSample>> {
    single_kernel(plan, Kernel::Hermite(q))
}

/// Samples of the excursion volume `m_n{x ∈ B_R : u(x) <= t}`.
pub fn excursion_volume_mc(plan: &McPlan, t: f64) -> Result<Vec<PolyspectrumSample>> {
    single_kernel(plan, Kernel::Excursion(t))
}

/// Samples of `L^ε` for every `ε` in `eps`, from the same realizations.
pub fn leray_mc(plan: &McPlan, eps: &[f64]) -> Result<Vec<Vec<PolyspectrumSample>>> {
    if let Some(bad) = eps.iter().find(|e| !(**e > 0.0)) {
        return Err(domain!("ε must be positive, got {bad}"));
    }
    let kernels: Vec<Kernel> = eps.iter().map(|&e| Kernel::Leray(e)).collect();
    plan.run(&kernels)
}

/// Sample mean, sample variance (divisor `K − 1`) and standard error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SampleSummary {
    pub count: usize,
    pub mean: f64,
    pub variance: f64,
    pub std_error: f64,
    /// Mean of the per-sample spatial-noise variances.
    pub spatial_noise: f64,
}

pub fn summarize(samples: &[PolyspectrumSample]) -> SampleSummary {
    let values: Vec<f64> = samples.iter().map(|s| s.estimate).collect();
    let (mean, variance) = mean_var(&values);
    let k = samples.len().max(1) as f64;
    let spatial_noise = samples.iter().map(|s| s.spatial_noise_var).sum::<f64>() / k;
    SampleSummary { count: samples.len(), mean, variance, std_error: (variance / k).sqrt(), spatial_noise }
}

/// Mean and unbiased variance.
pub fn mean_var(x: &[f64]) -> (f64, f64) {
    let n = x.len();
    if n == 0 {
        return (f64::NAN, f64::NAN);
    }
    let mean = x.iter().sum::<f64>() / n as f64;
    if n == 1 {
        return (mean, 0.0);
    }
    let var = x.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1) as f64;
    (mean, var)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn low_order_values() {
        assert_eq!(hermite(2, 0.0), -1.0);
        assert_eq!(hermite(4, 1.0), -2.0);
        assert_eq!(hermite(3, 2.0), 2.0);
        assert_eq!(hermite_all(4, 1.0), alloc::vec![1.0, 1.0, 0.0, -2.0, -2.0]);
    }

    #[test]
    fn orthogonality_under_gaussian_weight() {
        let gh = GaussHermite::new(200);
        for p in 0..=10 {
            for q in 0..=10 {
                let v = gh.expect(|x| hermite(p, x) * hermite(q, x));
                let want = if p == q { factorial(q) } else { 0.0 };
                assert!((v - want).abs() < 1e-9 * want.max(1.0), "p={p} q={q}: {v}");
            }
        }
    }

    #[test]
    fn generating_function() {
        for i in 0..=8 {
            for j in 0..=8 {
                let (s, t) = (-2.0 + 0.5 * i as f64, -2.0 + 0.5 * j as f64);
                let mut sum = 0.0;
                let mut tq = 1.0;
                for q in 0..=60 {
                    if q > 0 {
                        tq *= t / q as f64;
                    }
                    sum += hermite(q, s) * tq;
                }
                let want = (s * t - 0.5 * t * t).exp();
                assert!((sum - want).abs() < 1e-8 * want.max(1.0), "s={s} t={t}");
            }
        }
    }

    #[test]
    fn leray_coefficient_normalizations_agree() {
        assert!((HermiteCoeffs::new(0).leray_b() - 1.0 / (2.0 * PI).sqrt()).abs() < 1e-15);
        for q in (1..20).step_by(2) {
            assert_eq!(HermiteCoeffs::new(q).leray_b(), 0.0);
        }
        for ell in 0..15 {
            let b = HermiteCoeffs::new(2 * ell).leray_b();
            let lhs = factorial(2 * ell) * b * b;
            assert!((lhs / leray_b_norm_sq(ell) - 1.0).abs() < 1e-12, "ℓ={ell}");
        }
    }

    #[test]
    fn indicator_coefficient_identities() {
        let a = indicator_coeffs(0.0, 10);
        for q in (2..=10).step_by(2) {
            assert_eq!(a[q], 0.0);
        }
        // partial sums of Σ ψ_q² / q! rise towards Φ(1 − Φ), slowly
        let t = 1.0;
        let a = indicator_coeffs(t, 400);
        let partial = |k: usize| (1..=k).map(|q| a[q] * a[q] * factorial(q)).sum::<f64>();
        assert!((partial(40) - 0.121_268_210_627_289_59).abs() < 1e-12);
        let want = normal_cdf(t) * (1.0 - normal_cdf(t));
        assert!(partial(40) < partial(150) && partial(150) < want);
        assert!(want - partial(150) < 0.55 * (want - partial(40)));
        let far = indicator_coeffs(10.0, 6);
        assert!((far[0] - 1.0).abs() < 1e-14);
        assert!(far[1..].iter().all(|c| c.abs() < 1e-13));
    }

    #[test]
    fn projections_of_polynomials() {
        let p = project_function(|x| hermite(3, x), 6, &[]);
        assert_eq!(p.rank, Some(3));
        assert!((p.coeffs[3] - 1.0).abs() < 1e-12);
        assert!(p.coeffs.iter().enumerate().all(|(q, c)| q == 3 || c.abs() < 1e-11));
        let sq = project_function(|x| x * x, 6, &[]);
        assert_eq!(sq.rank, Some(2));
        assert!((sq.coeffs[0] - 1.0).abs() < 1e-12 && (sq.coeffs[2] - 1.0).abs() < 1e-12);
        assert!(!sq.divergent);
    }

    #[test]
    fn projection_of_indicator_matches_closed_form() {
        let t = 1.0;
        let want = indicator_coeffs(t, 12);
        let got = project_function(|x| f64::from(u8::from(x <= t)), 12, &[t]);
        for q in 0..=12 {
            assert!((got.coeffs[q] - want[q]).abs() < 1e-8, "q={q}");
        }
        assert_eq!(got.rank, Some(1));
    }

    #[test]
    fn growth_beyond_gaussian_tails_is_flagged() {
        let p = project_function(|x| (0.6 * x * x).exp(), 2, &[]);
        assert!(p.divergent);
    }

    #[test]
    fn jackknife_of_iid_values_matches_variance_of_mean() {
        use rand::Rng;
        let mut rng = stream(5, 0);
        let y: Vec<f64> = (0..4000).map(|_| rng.random::<f64>()).collect();
        let (m, v) = jackknife_mean(&y, 20);
        let (mm, var) = mean_var(&y);
        assert!((m - mm).abs() < 1e-12);
        assert!((v / (var / 4000.0) - 1.0).abs() < 0.7);
        let (_, zero) = jackknife_mean(&[3.0; 40], 20);
        assert_eq!(zero, 0.0);
    }

    fn plan() -> McPlan {
        McPlan::new(SpectralParams::new(2, 4.0).unwrap(), 1.0, 60, 40, 11).with_design_block(8)
    }

    #[test]
    fn zeroth_polyspectrum_is_the_volume() {
        let m = ball_volume(2, 1.0).unwrap();
        for s in polyspectrum_mc(&plan(), 0).unwrap() {
            assert!((s.estimate - m).abs() < 1e-12 * m);
            assert!(s.spatial_noise_var < 1e-20);
        }
    }

    #[test]
    fn excursion_above_all_values_is_the_volume() {
        let m = ball_volume(2, 1.0).unwrap();
        assert!(excursion_volume_mc(&plan(), 10.0).unwrap().iter().all(|s| (s.estimate - m).abs() < 1e-12 * m));
    }

    #[test]
    fn runs_are_reproducible_and_split_by_design() {
        let p = plan();
        let whole = p.run(&[Kernel::Hermite(2)]).unwrap();
        assert_eq!(whole.len(), 40);
        let third = p.run_design(2, &[Kernel::Hermite(2)]).unwrap();
        assert_eq!(third[0][0], whole[16][0]);
        assert_eq!(whole[16][0].seed.stream, 16);
    }

    #[test]
    fn leray_rejects_nonpositive_eps() {
        assert!(leray_mc(&plan(), &[0.1, 0.0]).is_err());
    }

    #[test]
    fn nodal_excursion_carries_no_clt_claim() {
        assert!(!Kernel::Excursion(0.0).has_clt_claim());
        assert!(Kernel::Excursion(1.0).has_clt_claim());
        assert!(!Kernel::Hermite(3).has_clt_claim());
        assert!(Kernel::Hermite(4).has_clt_claim());
        let even: Vec<f64> = (1..=4).map(|k| HermiteCoeffs::new(2 * k).psi(0.0)).collect();
        assert!(even.iter().all(|v| v.abs() < 1e-15));
    }
}
