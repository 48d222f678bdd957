use alloc::sync::Arc;
use alloc::vec::Vec;
use core::f64::consts::PI;

use rand::Rng;

use super::radial::{PairDistanceRule, Weighting};
use crate::error::domain;
use crate::hypgeo::{ball_volume, distance, BallSampler};
use crate::quad::GaussLegendre;
use crate::specfun::{small_radius_series, sphere_area, CovarianceTable, ODE_START};
use crate::{Estimate, Result, SpectralParams};
#[allow(unused_imports)]
use num_traits::Float;

/// How a variance value was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    ExactAngular,
    SandwichLower,
    SandwichUpper,
    MonteCarlo,
}

impl Method {
    pub fn as_str(&self) -> &'static str {
        match self {
            Method::ExactAngular => "exact_angular",
            Method::SandwichLower => "sandwich_lower",
            Method::SandwichUpper => "sandwich_upper",
            Method::MonteCarlo => "montecarlo",
        }
    }

    fn weighting(self) -> Result<Weighting> {
        match self {
            Method::ExactAngular => Ok(Weighting::Exact),
            Method::SandwichLower => Ok(Weighting::SandwichLower),
            Method::SandwichUpper => Ok(Weighting::SandwichUpper),
            Method::MonteCarlo => Err(domain!("Monte Carlo variances come from the chaos estimators")),
        }
    }
}

/// Integrand `F^q` or `|F|^q`; the latter bounds odd-order variances.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Power {
    Signed,
    Absolute,
}

/// `C^{n,q}_{R,λ} = var(h^{n,q}_{R,λ}) = q! ∫∫ F(d(x, y))^q`, recorded both
/// with and without the `q!`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VarianceResult {
    pub n: usize,
    pub q: usize,
    pub radius: f64,
    pub alpha: f64,
    pub lambda: f64,
    pub value: f64,
    pub value_per_qfact: f64,
    pub method: Method,
    pub power: Power,
    pub est_abs_error: f64,
}

/// Covariance table and pair-distance rule for one `(n, α, R)`.
#[derive(Debug, Clone)]
pub struct MomentEngine {
    params: SpectralParams,
    table: CovarianceTable,
    rule: Arc<PairDistanceRule>,
}

impl MomentEngine {
    /// Resolves integrands up to `F^{max_q}`.
    pub fn new(params: SpectralParams, radius: f64, max_q: usize) -> Result<Self> {
        let rule = PairDistanceRule::new(params.n(), radius, max_q.max(1) as f64 * params.alpha())?;
        Self::with_rule(params, Arc::new(rule))
    }

    /// Shares a rule across parameter values; the rule must resolve the
    /// highest frequency `q·α` that will be integrated.
    pub fn with_rule(params: SpectralParams, rule: Arc<PairDistanceRule>) -> Result<Self> {
        if rule.dim() != params.n() {
            return Err(domain!("rule is for n = {}, parameters for n = {}", rule.dim(), params.n()));
        }
        let table = CovarianceTable::new(params, rule.span())?;
        Ok(MomentEngine { params, table, rule })
    }

    pub fn params(&self) -> &SpectralParams {
        &self.params
    }

    pub fn radius(&self) -> f64 {
        self.rule.radius()
    }

    pub fn table(&self) -> &CovarianceTable {
        &self.table
    }

    fn f(&self, s: f64) -> f64 {
        self.table.value(s.min(self.table.r_max())).unwrap_or(f64::NAN)
    }

    pub fn variance(&self, q: usize, power: Power, method: Method) -> Result<VarianceResult> {
        let qi = q as i32;
        let integral = match power {
            Power::Signed => self.rule.integrate(|s| self.f(s).powi(qi), method.weighting()?),
            Power::Absolute => self.rule.integrate(|s| self.f(s).abs().powi(qi), method.weighting()?),
        };
        if integral.degraded {
            return Err(domain!("non-finite variance integral for q = {q}"));
        }
        let fact: f64 = (1..=q).map(|k| k as f64).product();
        Ok(VarianceResult {
            n: self.params.n(),
            q,
            radius: self.radius(),
            alpha: self.params.alpha(),
            lambda: self.params.lambda(),
            value: fact * integral.value,
            value_per_qfact: integral.value,
            method,
            power,
            est_abs_error: fact * integral.abs_err,
        })
    }

    /// `f_R(α) = ω_{n−1} ∫₀^R F(r) sinh(r)^{n−1} dr`.
    pub fn fourier_transform(&self) -> f64 {
        radial_transform(&self.params, self.radius(), |r| self.f(r))
    }

    pub fn ball_fourier(&self) -> Result<BallFourier> {
        let f_r = self.fourier_transform();
        let c1 = self.variance(1, Power::Signed, Method::ExactAngular)?.value;
        let ratio = (f_r.abs() > FOURIER_GUARD).then(|| c1 / (f_r * f_r));
        Ok(BallFourier { alpha: self.params.alpha(), f_r, ratio })
    }

    /// `(1/2π) ∫∫ (1 − F(d(x, y))²)^{−1/2}`, the second moment of the Leray
    /// measure. `1 − F` comes from the power series below the ODE start so
    /// that the integrable `1/s` endpoint is evaluated without cancellation.
    pub fn leray_second_moment(&self) -> Result<Estimate> {
        let mut singular = false;
        let est = self.rule.integrate(
            |s| {
                let (f, one_minus) = if s < ODE_START {
                    let series = small_radius_series(&self.params, s);
                    (series.value, series.one_minus)
                } else {
                    let f = self.f(s);
                    (f, 1.0 - f)
                };
                let gap = one_minus * (1.0 + f);
                if gap < 1e-14 && s > 1e-8 {
                    singular = true;
                }
                1.0 / (2.0 * PI * gap.sqrt())
            },
            Weighting::Exact,
        );
        Ok(Estimate { degraded: est.degraded || singular, ..est })
    }
}

/// Below this `|f_R|` the Fourier ratio is not reported.
pub const FOURIER_GUARD: f64 = 1e-10;

fn radial_transform<F: Fn(f64) -> f64>(p: &SpectralParams, radius: f64, f: F) -> f64 {
    let rule = GaussLegendre::new(20);
    let width = 0.05f64.min(0.5 * PI / p.alpha().max(1.0));
    let panels = (radius / width).ceil().max(1.0) as usize;
    let h = radius / panels as f64;
    let k = p.n() as i32 - 1;
    let sum: f64 = (0..panels)
        .map(|j| rule.integrate(j as f64 * h, (j + 1) as f64 * h, |r| f(r) * r.sinh().powi(k)))
        .sum();
    sphere_area(p.n() - 1) * sum
}

/// `f_R(α)` and the ratio `C^{n,1}/f_R(α)²` (absent near zeros of `f_R`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BallFourier {
    pub alpha: f64,
    pub f_r: f64,
    pub ratio: Option<f64>,
}

pub fn variance_cq(p: &SpectralParams, radius: f64, q: usize) -> Result<VarianceResult> {
    MomentEngine::new(*p, radius, q)?.variance(q, Power::Signed, Method::ExactAngular)
}

pub fn ball_fourier(p: &SpectralParams, radius: f64) -> Result<BallFourier> {
    MomentEngine::new(*p, radius, 1)?.ball_fourier()
}

pub fn leray_second_moment(p: &SpectralParams, radius: f64) -> Result<Estimate> {
    // (1 − F²)^{−1/2} carries harmonics of every order; resolve a few
    MomentEngine::new(*p, radius, 4)?.leray_second_moment()
}

/// `f_R(α)` alone, tabulating `F` only up to `R`.
pub fn fourier_transform_ball(p: &SpectralParams, radius: f64) -> Result<f64> {
    ball_volume(p.n(), radius)?;
    let table = CovarianceTable::new(*p, radius)?;
    Ok(radial_transform(p, radius, |r| table.value(r.min(table.r_max())).unwrap_or(f64::NAN)))
}

/// Zeros of `α ↦ f_R(α)` on `[lo, hi]`, bracketed by sign changes on a grid
/// of spacing `step` and refined by bisection.
pub fn fourier_zeros(n: usize, radius: f64, lo: f64, hi: f64, step: f64) -> Result<Vec<f64>> {
    if !(lo > 0.0 && hi > lo && step > 0.0) {
        return Err(domain!("need 0 < lo < hi and a positive step"));
    }
    let eval = |a: f64| -> Result<f64> { fourier_transform_ball(&SpectralParams::new(n, a)?, radius) };
    let count = ((hi - lo) / step).ceil() as usize;
    let mut zeros = Vec::new();
    let (mut a0, mut f0) = (lo, eval(lo)?);
    for k in 1..=count {
        let a1 = (lo + k as f64 * step).min(hi);
        let f1 = eval(a1)?;
        if f0 == 0.0 {
            zeros.push(a0);
        } else if f0 * f1 < 0.0 {
            let (mut l, mut h, mut fl) = (a0, a1, f0);
            while h - l > 1e-10 * h {
                let m = 0.5 * (l + h);
                let fm = eval(m)?;
                if fm * fl <= 0.0 {
                    h = m;
                } else {
                    l = m;
                    fl = fm;
                }
            }
            zeros.push(0.5 * (l + h));
        }
        a0 = a1;
        f0 = f1;
    }
    Ok(zeros)
}

/// Monte Carlo value with its standard error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McEstimate {
    pub value: f64,
    pub std_error: f64,
    pub samples: usize,
}

/// Plain Monte Carlo over `B_R⁴` of
/// `F(d(x,y))^a F(d(y,z))^b F(d(z,w))^a F(d(w,x))^b`; with `a = r` and
/// `b = q − r` this is the contraction integral of order `(q, r)`.
pub fn contraction_mc<R: Rng + ?Sized>(
    p: &SpectralParams,
    radius: f64,
    a: usize,
    b: usize,
    samples: usize,
    rng: &mut R,
) -> Result<McEstimate> {
    if samples < 2 {
        return Err(crate::Error::TooFewSamples { needed: 2, got: samples });
    }
    let volume = ball_volume(p.n(), radius)?;
    let sampler = BallSampler::new(p.n(), radius)?;
    let table = CovarianceTable::new(*p, 2.0 * radius)?;
    let f = |x: &crate::HyperPoint, y: &crate::HyperPoint| -> Result<f64> {
        let d = distance(x, y)?.min(table.r_max());
        table.value(d)
    };
    let (ai, bi) = (a as i32, b as i32);
    let (mut mean, mut m2) = (0.0, 0.0);
    for k in 0..samples {
        let pts: [crate::HyperPoint; 4] = core::array::from_fn(|_| sampler.sample(rng));
        let [x, y, z, w] = &pts;
        let v = f(x, y)?.powi(ai) * f(y, z)?.powi(bi) * f(z, w)?.powi(ai) * f(w, x)?.powi(bi);
        // Welford update
        let delta = v - mean;
        mean += delta / (k + 1) as f64;
        m2 += delta * (v - mean);
    }
    let var = m2 / (samples - 1) as f64;
    let scale = volume.powi(4);
    Ok(McEstimate { value: scale * mean, std_error: scale * (var / samples as f64).sqrt(), samples })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::stream;

    fn params(n: usize, alpha: f64) -> SpectralParams {
        SpectralParams::new(n, alpha).unwrap()
    }

    #[test]
    fn zeroth_order_is_volume_squared() {
        let v = variance_cq(&params(2, 7.0), 1.5, 0).unwrap();
        let m = ball_volume(2, 1.5).unwrap();
        assert!((v.value / (m * m) - 1.0).abs() < 1e-10);
        assert_eq!(v.value, v.value_per_qfact);
    }

    #[test]
    fn factorial_convention_is_recorded() {
        let v = variance_cq(&params(3, 4.0), 1.0, 3).unwrap();
        assert!((v.value / v.value_per_qfact - 6.0).abs() < 1e-12);
        assert_eq!(v.method.as_str(), "exact_angular");
    }

    #[test]
    fn sandwich_brackets_even_orders() {
        let e = MomentEngine::new(params(2, 6.0), 2.0, 4).unwrap();
        for q in [2, 4] {
            let lo = e.variance(q, Power::Signed, Method::SandwichLower).unwrap().value;
            let ex = e.variance(q, Power::Signed, Method::ExactAngular).unwrap().value;
            let hi = e.variance(q, Power::Signed, Method::SandwichUpper).unwrap().value;
            assert!(lo <= ex && ex <= hi, "q={q}: {lo} {ex} {hi}");
        }
    }

    #[test]
    fn absolute_power_dominates() {
        let e = MomentEngine::new(params(2, 9.0), 2.0, 3).unwrap();
        let signed = e.variance(3, Power::Signed, Method::ExactAngular).unwrap().value;
        let abs = e.variance(3, Power::Absolute, Method::ExactAngular).unwrap().value;
        assert!(signed.abs() <= abs);
    }

    #[test]
    fn fourier_transform_of_small_ball_is_its_volume() {
        let p = params(3, 5.0);
        let r = 1e-3;
        let ratio = fourier_transform_ball(&p, r).unwrap() / ball_volume(3, r).unwrap();
        assert!((ratio - 1.0).abs() < 1e-5);
    }

    #[test]
    fn first_order_variance_is_the_squared_transform() {
        let b = ball_fourier(&params(2, 5.0), 2.0).unwrap();
        assert!((b.ratio.unwrap() - 1.0).abs() < 1e-6, "{:?}", b);
    }

    #[test]
    fn leray_moment_exceeds_its_constant_term() {
        let p = params(2, 8.0);
        let v = leray_second_moment(&p, 1.0).unwrap();
        let m = ball_volume(2, 1.0).unwrap();
        assert!(!v.degraded);
        assert!(v.value > m * m / (2.0 * PI));
    }

    #[test]
    fn contraction_of_order_zero_is_volume_to_the_fourth() {
        let mut rng = stream(1, 0);
        let c = contraction_mc(&params(2, 3.0), 1.0, 0, 0, 100, &mut rng).unwrap();
        let m = ball_volume(2, 1.0).unwrap();
        assert!((c.value / m.powi(4) - 1.0).abs() < 1e-12);
        assert!(c.std_error < 1e-9);
    }
}
