//! Sampling the hyperbolic random wave.
//!
//! Exact finite-dimensional laws come from a Cholesky factor of the
//! covariance matrix `F(d(x_i, x_j))`. The finite superposition of plane
//! waves with random phases and directions is the approximate route; its
//! real part scaled by `√2` has unit variance and, given the directions,
//! covariance `(1/N) Σ_j Re[e(x, ϑ_j) e(y, ϑ_j)*]`, whose average over
//! directions is `F`.

use alloc::sync::Arc;
use alloc::vec::Vec;
use core::f64::consts::{PI, SQRT_2};
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::domain;
use crate::hypgeo::{distance, random_direction};
use crate::linalg::{Cholesky, Matrix};
use crate::rng::stream;
use crate::specfun::{spherical_f, CovarianceRoute, CovarianceTable};
use crate::{Error, HyperPoint, Result, SpectralParams};
#[allow(unused_imports)]
use num_traits::Float;

/// Default cap on the number of points sampled jointly.
pub const MAX_POINTS: usize = 4000;

/// `e_n(x, α, u) = [x, (1, u)]^{−σ+iα}` with `[x, (1, u)] = x₀ − Σ xᵢuᵢ`.
pub fn plane_wave(x: &HyperPoint, p: &SpectralParams, u: &[f64]) -> Result<Complex64> {
    let pairing = horocyclic_pairing(x.coords(), u)?;
    Ok((Complex64::new(-p.sigma(), p.alpha()) * pairing.ln()).exp())
}

fn horocyclic_pairing(x: &[f64], u: &[f64]) -> Result<f64> {
    if u.len() + 1 != x.len() {
        return Err(domain!("direction has {} components, point has {}", u.len(), x.len()));
    }
    let s = x[0] - x[1..].iter().zip(u).map(|(a, b)| a * b).sum::<f64>();
    if !(s > 0.0) {
        return Err(domain!("pairing with the light cone must be positive, got {s}"));
    }
    Ok(s)
}

fn check_dims(points: &[HyperPoint], p: &SpectralParams) -> Result<()> {
    if points.is_empty() {
        return Err(domain!("point set is empty"));
    }
    if let Some(bad) = points.iter().find(|x| x.dim() != p.n()) {
        return Err(Error::InvalidPoint(alloc::format!("point of dimension {} in H^{}", bad.dim(), p.n())));
    }
    Ok(())
}

fn pairwise_distances(points: &[HyperPoint]) -> Result<(Vec<f64>, f64)> {
    let m = points.len();
    let mut d = Vec::with_capacity(m * (m - 1) / 2);
    let mut max = 0.0f64;
    for i in 0..m {
        for j in 0..i {
            let v = distance(&points[i], &points[j])?;
            max = max.max(v);
            d.push(v);
        }
    }
    Ok((d, max))
}

fn fill_symmetric(m: usize, dist: &[f64], mut f: impl FnMut(f64) -> Result<f64>) -> Result<Matrix> {
    let mut a = Matrix::zeros(m);
    let mut k = 0;
    for i in 0..m {
        a.set(i, i, 1.0);
        for j in 0..i {
            let v = f(dist[k])?;
            k += 1;
            a.set(i, j, v);
            a.set(j, i, v);
        }
    }
    Ok(a)
}

/// `F(d(x_i, x_j))` from a [`CovarianceTable`] spanning the largest
/// pairwise distance; entries agree with the auto route to about `1e-10`.
pub fn covariance_matrix(points: &[HyperPoint], p: &SpectralParams) -> Result<Matrix> {
    check_dims(points, p)?;
    let (dist, max) = pairwise_distances(points)?;
    let table = CovarianceTable::new(*p, max)?;
    fill_symmetric(points.len(), &dist, |d| table.value(d))
}

/// `F(d(x_i, x_j))` evaluated pointwise along `route`. Returns the matrix
/// and whether any entry was flagged as degraded.
pub fn covariance_matrix_route(points: &[HyperPoint], p: &SpectralParams, route: CovarianceRoute) -> Result<(Matrix, bool)> {
    check_dims(points, p)?;
    let (dist, _) = pairwise_distances(points)?;
    let mut degraded = false;
    let a = fill_symmetric(points.len(), &dist, |d| {
        let e = spherical_f(p, d, route)?;
        degraded |= e.degraded;
        Ok(e.value)
    })?;
    Ok((a, degraded))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Provenance {
    Cholesky,
    Superposition { waves: usize },
}

/// Seed and stream index a realization was drawn from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SeedRecord {
    pub seed: u64,
    pub stream: u64,
}

#[derive(Debug, Clone)]
pub struct FieldRealization {
    pub params: SpectralParams,
    pub points: Arc<Vec<HyperPoint>>,
    pub values: Vec<f64>,
    pub provenance: Provenance,
    pub seed: Option<SeedRecord>,
}

/// Exact sampler for a fixed point set: the covariance is factorized once.
#[derive(Debug, Clone)]
pub struct GaussianSampler {
    params: SpectralParams,
    points: Arc<Vec<HyperPoint>>,
    factor: Cholesky,
}

impl GaussianSampler {
    pub fn new(points: Arc<Vec<HyperPoint>>, p: &SpectralParams) -> Result<Self> {
        Self::with_cap(points, p, MAX_POINTS)
    }

    pub fn with_cap(points: Arc<Vec<HyperPoint>>, p: &SpectralParams, cap: usize) -> Result<Self> {
        if points.len() > cap {
            return Err(Error::TooManyPoints { count: points.len(), cap });
        }
        let cov = covariance_matrix(&points, p)?;
        let factor = Cholesky::factor(&cov)?;
        Ok(GaussianSampler { params: *p, points, factor })
    }

    pub fn points(&self) -> &Arc<Vec<HyperPoint>> {
        &self.points
    }

    pub fn jitter(&self) -> f64 {
        self.factor.jitter()
    }

    /// Field values `L z` for i.i.d. standard normal `z` drawn from `rng`.
    pub fn values<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<f64> {
        let z: Vec<f64> = (0..self.points.len()).map(|_| rng.sample(StandardNormal)).collect();
        self.factor.mul_vec(&z)
    }

    pub fn realize<R: Rng + ?Sized>(&self, rng: &mut R) -> FieldRealization {
        FieldRealization {
            params: self.params,
            points: Arc::clone(&self.points),
            values: self.values(rng),
            provenance: Provenance::Cholesky,
            seed: None,
        }
    }

    /// Realization drawn from stream `(seed, index)`.
    pub fn realize_stream(&self, seed: u64, index: u64) -> FieldRealization {
        let mut rng = stream(seed, index);
        let mut f = self.realize(&mut rng);
        f.seed = Some(SeedRecord { seed, stream: index });
        f
    }
}

/// `realizations` exact samples on `points`; realization `k` uses stream
/// `(seed, k)`, so results do not depend on how work is scheduled.
pub fn sample_gaussian_field(points: Arc<Vec<HyperPoint>>, p: &SpectralParams, realizations: usize, seed: u64) -> Result<Vec<FieldRealization>> {
    let sampler = GaussianSampler::new(points, p)?;
    Ok((0..realizations as u64).map(|k| sampler.realize_stream(seed, k)).collect())
}

/// Finite superposition `u^N(x) = N^{−1/2} Σ_j e^{iφ_j} e_n(x, α, ϑ_j)`.
#[derive(Debug, Clone)]
pub struct Superposition {
    pub params: SpectralParams,
    pub phases: Vec<f64>,
    pub directions: Vec<Vec<f64>>,
}

impl Superposition {
    pub fn draw<R: Rng + ?Sized>(p: &SpectralParams, waves: usize, rng: &mut R) -> Result<Self> {
        if waves == 0 {
            return Err(domain!("superposition needs at least one wave"));
        }
        let mut phases = Vec::with_capacity(waves);
        let mut directions = Vec::with_capacity(waves);
        for _ in 0..waves {
            phases.push(2.0 * PI * rng.random::<f64>());
            directions.push(random_direction(p.n(), rng));
        }
        Ok(Superposition { params: *p, phases, directions })
    }

    pub fn waves(&self) -> usize {
        self.phases.len()
    }

    pub fn complex_value(&self, x: &HyperPoint) -> Result<Complex64> {
        let mut acc = Complex64::new(0.0, 0.0);
        for (phi, u) in self.phases.iter().zip(&self.directions) {
            acc += Complex64::from_polar(1.0, *phi) * plane_wave(x, &self.params, u)?;
        }
        Ok(acc / (self.waves() as f64).sqrt())
    }
}

/// Complex superposition values and the unit-variance real field `√2 Re u^N`.
#[derive(Debug, Clone)]
pub struct SuperpositionSample {
    pub complex: Vec<Complex64>,
    pub real: FieldRealization,
}

pub fn sample_superposition<R: Rng + ?Sized>(points: Arc<Vec<HyperPoint>>, p: &SpectralParams, waves: usize, rng: &mut R) -> Result<SuperpositionSample> {
    check_dims(&points, p)?;
    let sup = Superposition::draw(p, waves, rng)?;
    let complex = points.iter().map(|x| sup.complex_value(x)).collect::<Result<Vec<_>>>()?;
    let values = complex.iter().map(|z| SQRT_2 * z.re).collect();
    Ok(SuperpositionSample {
        complex,
        real: FieldRealization { params: *p, points, values, provenance: Provenance::Superposition { waves }, seed: None },
    })
}

/// Covariance of `√2 Re u^N` given the directions:
/// `(1/N) Σ_j Re[e(x_i, ϑ_j) e(x_k, ϑ_j)*]`.
pub fn superposition_covariance(points: &[HyperPoint], p: &SpectralParams, directions: &[Vec<f64>]) -> Result<Matrix> {
    check_dims(points, p)?;
    if directions.is_empty() {
        return Err(domain!("no directions"));
    }
    let m = points.len();
    let mut waves = Vec::with_capacity(m);
    for x in points {
        let row = directions.iter().map(|u| plane_wave(x, p, u)).collect::<Result<Vec<_>>>()?;
        waves.push(row);
    }
    let norm = 1.0 / directions.len() as f64;
    let mut c = Matrix::zeros(m);
    for i in 0..m {
        for k in 0..=i {
            let s: f64 = waves[i].iter().zip(&waves[k]).map(|(a, b)| (a * b.conj()).re).sum();
            c.set(i, k, s * norm);
            c.set(k, i, s * norm);
        }
    }
    Ok(c)
}

/// Result of [`verify_eigenfunction`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EigenCheck {
    /// `|□f − λ e_n| / (λ |e_n|)`.
    pub residual: f64,
    /// Set when the step lies outside `[1e-5, 1e-2]`.
    pub step_warning: bool,
}

/// Checks `Δ e_n = λ e_n` by extending `e_n` to the degree-0 homogeneous
/// function `f(X) = ([X, (1, u)] / √[X, X])^{−σ+iα}` near the hyperboloid and
/// applying the central-difference d'Alembertian `∂₀² − Σ ∂ᵢ²` with step `h`.
pub fn verify_eigenfunction(x: &HyperPoint, p: &SpectralParams, u: &[f64], h: f64) -> Result<EigenCheck> {
    if !(h > 0.0) || !h.is_finite() {
        return Err(domain!("step must be positive, got {h}"));
    }
    let expo = Complex64::new(-p.sigma(), p.alpha());
    let f = |y: &[f64]| -> Result<Complex64> {
        let norm = y[0] * y[0] - y[1..].iter().map(|v| v * v).sum::<f64>();
        if !(norm > 0.0) {
            return Err(domain!("stencil left the future cone; reduce the step"));
        }
        let pairing = horocyclic_pairing(y, u)? / norm.sqrt();
        Ok((expo * pairing.ln()).exp())
    };
    let base = x.coords();
    let centre = f(base)?;
    let mut y = base.to_vec();
    let mut box_f = Complex64::new(0.0, 0.0);
    for k in 0..base.len() {
        y[k] = base[k] + h;
        let plus = f(&y)?;
        y[k] = base[k] - h;
        let minus = f(&y)?;
        y[k] = base[k];
        let second = (plus - 2.0 * centre + minus) / (h * h);
        if k == 0 {
            box_f += second;
        } else {
            box_f -= second;
        }
    }
    let lambda = p.lambda();
    let residual = (box_f - centre * lambda).norm() / (lambda * centre.norm());
    Ok(EigenCheck { residual, step_warning: !(1e-5..=1e-2).contains(&h) })
}
