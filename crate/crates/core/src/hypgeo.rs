//! Hyperboloid model of `H^n`.
//!
//! Points live on the upper sheet `{x : x₀² − x₁² − … − x_n² = 1, x₀ > 0}`
//! of Minkowski space `R^{1,n}`. Volumes use the normalization
//! `dm_n = sinh(r)^{n−1} dr dς_{n−1}` in geodesic polar coordinates.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::domain;
use crate::quad::{self, GaussLegendre, Tolerance};
use crate::specfun::sphere_area;
use crate::{Error, Result};
#[allow(unused_imports)]
use num_traits::Float;

/// Pairings below `1 − DISTANCE_CLAMP` are treated as invalid input.
pub const DISTANCE_CLAMP: f64 = 1e-9;

/// Dimension and wavenumber of a hyperbolic random wave. `σ = (n−1)/2` and
/// `λ = σ² + α²` are derived on demand, so they cannot drift apart.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralParams {
    n: usize,
    alpha: f64,
}

impl SpectralParams {
    pub fn new(n: usize, alpha: f64) -> Result<Self> {
        if n < 2 {
            return Err(domain!("dimension must be at least 2, got {n}"));
        }
        if !(alpha > 0.0) || !alpha.is_finite() {
            return Err(domain!("wavenumber must be positive and finite, got {alpha}"));
        }
        Ok(SpectralParams { n, alpha })
    }

    /// Parameters with eigenvalue `λ`, which must exceed `σ²`.
    pub fn from_lambda(n: usize, lambda: f64) -> Result<Self> {
        let sigma = (n as f64 - 1.0) / 2.0;
        let a2 = lambda - sigma * sigma;
        if !(a2 > 0.0) {
            return Err(domain!("eigenvalue {lambda} must exceed σ² = {}", sigma * sigma));
        }
        Self::new(n, a2.sqrt())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn sigma(&self) -> f64 {
        (self.n as f64 - 1.0) / 2.0
    }

    pub fn lambda(&self) -> f64 {
        let s = self.sigma();
        s * s + self.alpha * self.alpha
    }
}

/// Minkowski form `[x, y] = x₀y₀ − Σ xᵢyᵢ`.
pub fn minkowski(x: &[f64], y: &[f64]) -> f64 {
    debug_assert_eq!(x.len(), y.len());
    x[0] * y[0] - x[1..].iter().zip(&y[1..]).map(|(a, b)| a * b).sum::<f64>()
}

/// A point of `H^n` in ambient coordinates `(x₀, …, x_n)`.
#[derive(Debug, Clone, PartialEq)]
pub struct HyperPoint {
    coords: Vec<f64>,
}

impl HyperPoint {
    /// Rescales a future-timelike vector onto the hyperboloid.
    pub fn new(coords: Vec<f64>) -> Result<Self> {
        if coords.len() < 3 {
            return Err(Error::InvalidPoint(alloc::format!(
                "need at least 3 ambient coordinates, got {}",
                coords.len()
            )));
        }
        if coords.iter().any(|c| !c.is_finite()) {
            return Err(Error::InvalidPoint("non-finite coordinate".into()));
        }
        let q = minkowski(&coords, &coords);
        if !(coords[0] > 0.0) || !(q > 0.0) {
            return Err(Error::InvalidPoint(alloc::format!("[x,x] = {q}, x₀ = {} is not future timelike", coords[0])));
        }
        let scale = 1.0 / q.sqrt();
        let mut coords = coords;
        if (q - 1.0).abs() > 1e-15 {
            coords.iter_mut().for_each(|c| *c *= scale);
        }
        Ok(HyperPoint { coords })
    }

    /// The point lifted from spatial coordinates: `x₀ = sqrt(1 + |x|²)`.
    pub fn from_spatial(spatial: &[f64]) -> Self {
        let x0 = (1.0 + spatial.iter().map(|v| v * v).sum::<f64>()).sqrt();
        let mut coords = Vec::with_capacity(spatial.len() + 1);
        coords.push(x0);
        coords.extend_from_slice(spatial);
        HyperPoint { coords }
    }

    /// The base point `(1, 0, …, 0)` of `H^n`.
    pub fn origin(n: usize) -> Self {
        let mut coords = vec![0.0; n + 1];
        coords[0] = 1.0;
        HyperPoint { coords }
    }

    /// Geodesic polar coordinates about the origin: radius `r`, unit `direction` in `R^n`.
    pub fn from_polar(r: f64, direction: &[f64]) -> Self {
        let (s, c) = (r.sinh(), r.cosh());
        let mut coords = Vec::with_capacity(direction.len() + 1);
        coords.push(c);
        coords.extend(direction.iter().map(|u| s * u));
        HyperPoint { coords }
    }

    pub fn dim(&self) -> usize {
        self.coords.len() - 1
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    /// Distance to the origin.
    pub fn radius(&self) -> f64 {
        let s: f64 = self.coords[1..].iter().map(|v| v * v).sum::<f64>().sqrt();
        s.asinh()
    }
}

/// Riemannian distance `acosh [x, y]`.
pub fn distance(x: &HyperPoint, y: &HyperPoint) -> Result<f64> {
    if x.dim() != y.dim() {
        return Err(Error::InvalidPoint("points of different dimension".into()));
    }
    distance_raw(&x.coords, &y.coords)
}

pub(crate) fn distance_raw(x: &[f64], y: &[f64]) -> Result<f64> {
    let p = minkowski(x, y);
    if p < 1.0 - DISTANCE_CLAMP {
        return Err(Error::InvalidPoint(alloc::format!("Minkowski pairing {p} < 1")));
    }
    if p > 2.0 {
        return Ok(p.acosh());
    }
    // [x−y, x−y] = 2(1 − p) = −4 sinh²(d/2); differencing first keeps
    // nearby points accurate
    let t0 = x[0] - y[0];
    let spatial: f64 = x[1..].iter().zip(&y[1..]).map(|(a, b)| (a - b) * (a - b)).sum();
    let q = (spatial - t0 * t0).max(0.0);
    Ok(2.0 * (0.5 * q.sqrt()).asinh())
}

/// First hyperbolic law of cosines: the distance between points at radii
/// `r1`, `r2` from a common vertex, separated by angle `theta` there.
pub fn distance_polar(r1: f64, r2: f64, theta: f64) -> f64 {
    // cosh d − 1 = 2 sinh²((r1−r2)/2) + 2 sinh r1 sinh r2 sin²(θ/2), evaluated
    // as d = 2 asinh(sqrt(·/2)) to keep small distances accurate.
    let a = (0.5 * (r1 - r2)).sinh();
    let b = (0.5 * theta).sin();
    let half = a * a + r1.sinh() * r2.sinh() * b * b;
    2.0 * half.max(0.0).sqrt().asinh()
}

/// Orthonormal frame of the tangent space at `base` (Minkowski Gram–Schmidt
/// of the projected spatial basis vectors).
pub fn tangent_frame(base: &HyperPoint) -> Vec<Vec<f64>> {
    let n = base.dim();
    let x = base.coords();
    let mut frame: Vec<Vec<f64>> = Vec::with_capacity(n);
    for i in 1..=n {
        let mut e = vec![0.0; n + 1];
        e[i] = 1.0;
        // project onto x^⊥:  e − [e, x] x
        let ex = minkowski(&e, x);
        for (ek, xk) in e.iter_mut().zip(x) {
            *ek -= ex * xk;
        }
        for f in &frame {
            // tangent vectors are spacelike; g(u, v) = −[u, v]
            let c = -minkowski(&e, f);
            for (ek, fk) in e.iter_mut().zip(f) {
                *ek -= c * fk;
            }
        }
        let norm = (-minkowski(&e, &e)).sqrt();
        e.iter_mut().for_each(|v| *v /= norm);
        frame.push(e);
    }
    frame
}

/// Riemannian exponential map; `v` is expressed in [`tangent_frame`]`(base)`.
pub fn exp_map(base: &HyperPoint, v: &[f64]) -> Result<HyperPoint> {
    let n = base.dim();
    if v.len() != n {
        return Err(domain!("tangent vector has {} components, expected {n}", v.len()));
    }
    let t = v.iter().map(|a| a * a).sum::<f64>().sqrt();
    if t == 0.0 {
        return Ok(base.clone());
    }
    let frame = tangent_frame(base);
    let mut dir = vec![0.0; n + 1];
    for (vi, f) in v.iter().zip(&frame) {
        for (d, fk) in dir.iter_mut().zip(f) {
            *d += vi / t * fk;
        }
    }
    let (c, s) = (t.cosh(), t.sinh());
    let coords = base.coords().iter().zip(&dir).map(|(b, d)| c * b + s * d).collect();
    HyperPoint::new(coords)
}

/// `∫₀^R sinh(r)^k dr`.
pub fn sinh_power_integral(k: usize, r: f64) -> f64 {
    match k {
        0 => r,
        // cosh r − 1 = 2 sinh²(r/2)
        1 => {
            let s = (0.5 * r).sinh();
            2.0 * s * s
        }
        // (sinh 2r − 2r) / 4
        2 => {
            if r < 0.1 {
                // series avoids the cancellation in sinh 2r − 2r
                let r2 = r * r;
                r * r2 / 3.0 * (1.0 + r2 / 5.0 * (1.0 + 2.0 * r2 / 21.0 * (1.0 + r2 / 18.0)))
            } else {
                ((2.0 * r).sinh() - 2.0 * r) / 4.0
            }
        }
        _ => {
            let panels = ((r / 0.5).ceil() as usize).max(1);
            let breaks: Vec<f64> = (0..=panels).map(|i| r * i as f64 / panels as f64).collect();
            let f = |t: f64| t.sinh().powi(k as i32);
            quad::integrate_adaptive(f, &breaks, Tolerance::rel(1e-13))
                .map(|(v, _)| v)
                .unwrap_or(f64::NAN)
        }
    }
}

/// Volume of the geodesic ball `B_R`: `ω_{n−1} ∫₀^R sinh(r)^{n−1} dr`.
pub fn ball_volume(n: usize, radius: f64) -> Result<f64> {
    if n < 2 {
        return Err(domain!("dimension must be at least 2"));
    }
    if !(radius > 0.0) || !radius.is_finite() {
        return Err(domain!("ball radius must be positive, got {radius}"));
    }
    Ok(sphere_area(n - 1) * sinh_power_integral(n - 1, radius))
}

/// Uniform sampler on `B_R` with a tabulated radial inverse CDF.
#[derive(Debug, Clone)]
pub struct BallSampler {
    n: usize,
    radius: f64,
    nodes: Vec<f64>,
    cdf: Vec<f64>,
    pdf: Vec<f64>,
}

const CDF_NODES: usize = 4096;

impl BallSampler {
    pub fn new(n: usize, radius: f64) -> Result<Self> {
        let total = ball_volume(n, radius)? / sphere_area(n - 1);
        let k = (n - 1) as i32;
        let gl = GaussLegendre::new(8);
        let h = radius / (CDF_NODES - 1) as f64;
        let mut nodes = Vec::with_capacity(CDF_NODES);
        let mut cdf = Vec::with_capacity(CDF_NODES);
        let mut pdf = Vec::with_capacity(CDF_NODES);
        let mut acc = 0.0;
        for i in 0..CDF_NODES {
            let r = if i + 1 == CDF_NODES { radius } else { h * i as f64 };
            if i > 0 {
                acc += gl.integrate(nodes[i - 1], r, |t| t.sinh().powi(k));
            }
            nodes.push(r);
            cdf.push(acc / total);
            pdf.push(r.sinh().powi(k) / total);
        }
        // rescale away the quadrature residue so the table ends exactly at 1
        let last = *cdf.last().unwrap();
        cdf.iter_mut().for_each(|c| *c /= last);
        pdf.iter_mut().for_each(|p| *p /= last);
        Ok(BallSampler { n, radius, nodes, cdf, pdf })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    /// Radial CDF `m_n(B_r) / m_n(B_R)` from the table.
    pub fn radial_cdf(&self, r: f64) -> f64 {
        if r <= 0.0 {
            return 0.0;
        }
        if r >= self.radius {
            return 1.0;
        }
        let i = (self.nodes.partition_point(|&t| t <= r) - 1).min(CDF_NODES - 2);
        self.hermite(i, r)
    }

    fn hermite(&self, i: usize, r: f64) -> f64 {
        let (x0, x1) = (self.nodes[i], self.nodes[i + 1]);
        let h = x1 - x0;
        let t = (r - x0) / h;
        let (t2, t3) = (t * t, t * t * t);
        let h00 = 2.0 * t3 - 3.0 * t2 + 1.0;
        let h10 = t3 - 2.0 * t2 + t;
        let h01 = -2.0 * t3 + 3.0 * t2;
        let h11 = t3 - t2;
        h00 * self.cdf[i] + h10 * h * self.pdf[i] + h01 * self.cdf[i + 1] + h11 * h * self.pdf[i + 1]
    }

    /// Inverse of the radial CDF by bisection on the cubic Hermite interpolant.
    pub fn radius_quantile(&self, u: f64) -> f64 {
        let i = (self.cdf.partition_point(|&c| c <= u).max(1) - 1).min(CDF_NODES - 2);
        let (mut lo, mut hi) = (self.nodes[i], self.nodes[i + 1]);
        while hi - lo > 1e-12 * self.radius.max(1.0) {
            let mid = 0.5 * (lo + hi);
            if self.hermite(i, mid) < u {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> HyperPoint {
        let u: f64 = rng.random();
        let r = self.radius_quantile(u);
        let dir = random_direction(self.n, rng);
        HyperPoint::from_polar(r, &dir)
    }

    pub fn sample_many<R: Rng + ?Sized>(&self, count: usize, rng: &mut R) -> Vec<HyperPoint> {
        (0..count).map(|_| self.sample(rng)).collect()
    }
}

/// Uniform direction on `S^{n−1}` from a normalized Gaussian vector.
pub fn random_direction<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..n).map(|_| rng.sample::<f64, _>(StandardNormal)).collect();
        let norm = v.iter().map(|a| a * a).sum::<f64>().sqrt();
        if norm > 1e-12 {
            return v.into_iter().map(|a| a / norm).collect();
        }
    }
}

/// `count` i.i.d. uniform points of `B_R`.
pub fn sample_uniform_ball<R: Rng + ?Sized>(n: usize, radius: f64, count: usize, rng: &mut R) -> Result<Vec<HyperPoint>> {
    if count == 0 {
        return Err(domain!("count must be at least 1"));
    }
    Ok(BallSampler::new(n, radius)?.sample_many(count, rng))
}

/// Length of the geodesic arc from a point at distance `r` from the centre
/// of `B_R` to the boundary sphere, leaving at angle `psi` from the direction
/// towards the centre (`psi = 0` passes through the centre, length `R + r`;
/// `psi = π` points straight out, length `R − r`).
pub fn boundary_distance(n: usize, radius: f64, r: f64, psi: f64) -> Result<f64> {
    if n < 2 {
        return Err(domain!("dimension must be at least 2"));
    }
    if !(r >= 0.0 && r < radius) {
        return Err(domain!("need 0 <= r < R, got r = {r}, R = {radius}"));
    }
    if !(0.0..=PI).contains(&psi) {
        return Err(domain!("angle must lie in [0, π], got {psi}"));
    }
    let (mut lo, mut hi) = ((radius - r).max(0.0), radius + r);
    // d(s) = distance_polar(r, s, psi) is increasing in s on the bracket
    while hi - lo > 1e-12 * radius.max(1.0) {
        let mid = 0.5 * (lo + hi);
        if distance_polar(r, mid, psi) < radius {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Closed form of [`boundary_distance`] in the hyperbolic plane.
pub fn boundary_distance_planar(radius: f64, r: f64, psi: f64) -> f64 {
    let (sr, cr) = (r.sinh(), r.cosh());
    let (sr_big, cr_big) = (radius.sinh(), radius.cosh());
    let sp = psi.sin();
    let root = (sr_big * sr_big - sp * sp * sr * sr).max(0.0).sqrt();
    let c = (cr_big * cr + psi.cos() * sr * root) / (1.0 + sp * sp * sr * sr);
    c.max(1.0).acosh()
}

/// Linear map of `R^{1,n}` preserving the Minkowski form and the upper sheet.
#[derive(Debug, Clone, PartialEq)]
pub struct Isometry {
    dim: usize,
    /// Row-major `(n+1) × (n+1)`.
    matrix: Vec<f64>,
}

impl Isometry {
    pub fn identity(n: usize) -> Self {
        let m = n + 1;
        let mut matrix = vec![0.0; m * m];
        for i in 0..m {
            matrix[i * m + i] = 1.0;
        }
        Isometry { dim: n, matrix }
    }

    /// Checks `MᵀηM = η` and time orientation.
    pub fn from_matrix(n: usize, matrix: Vec<f64>) -> Result<Self> {
        let iso = Isometry { dim: n, matrix };
        if iso.matrix.len() != (n + 1) * (n + 1) {
            return Err(domain!("matrix must be {0}×{0}", n + 1));
        }
        let defect = iso.form_defect();
        if defect > 1e-10 || iso.matrix[0] <= 0.0 {
            return Err(domain!("matrix does not preserve the upper sheet (defect {defect:e})"));
        }
        Ok(iso)
    }

    /// Spatial rotation `diag(1, Q)` for orthogonal `Q` (row-major `n × n`).
    pub fn rotation(n: usize, q: &[f64]) -> Result<Self> {
        let m = n + 1;
        let mut matrix = vec![0.0; m * m];
        matrix[0] = 1.0;
        for i in 0..n {
            for j in 0..n {
                matrix[(i + 1) * m + j + 1] = q[i * n + j];
            }
        }
        Self::from_matrix(n, matrix)
    }

    /// Boost of rapidity `beta` along the unit spatial direction `u`.
    pub fn boost(u: &[f64], beta: f64) -> Self {
        let n = u.len();
        let m = n + 1;
        let (c, s) = (beta.cosh(), beta.sinh());
        let mut matrix = vec![0.0; m * m];
        matrix[0] = c;
        for i in 0..n {
            matrix[i + 1] = s * u[i];
            matrix[(i + 1) * m] = s * u[i];
            for j in 0..n {
                let delta = if i == j { 1.0 } else { 0.0 };
                matrix[(i + 1) * m + j + 1] = delta + (c - 1.0) * u[i] * u[j];
            }
        }
        Isometry { dim: n, matrix }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn matrix(&self) -> &[f64] {
        &self.matrix
    }

    pub fn compose(&self, other: &Isometry) -> Isometry {
        let m = self.dim + 1;
        let mut out = vec![0.0; m * m];
        for i in 0..m {
            for k in 0..m {
                let a = self.matrix[i * m + k];
                for j in 0..m {
                    out[i * m + j] += a * other.matrix[k * m + j];
                }
            }
        }
        Isometry { dim: self.dim, matrix: out }
    }

    pub fn apply(&self, x: &HyperPoint) -> HyperPoint {
        let m = self.dim + 1;
        let c = x.coords();
        let coords: Vec<f64> = (0..m).map(|i| (0..m).map(|j| self.matrix[i * m + j] * c[j]).sum()).collect();
        HyperPoint::new(coords).expect("isometries preserve the hyperboloid")
    }

    /// `max |MᵀηM − η|`.
    pub fn form_defect(&self) -> f64 {
        let m = self.dim + 1;
        let eta = |i: usize| if i == 0 { 1.0 } else { -1.0 };
        let mut worst: f64 = 0.0;
        for i in 0..m {
            for j in 0..m {
                let v: f64 = (0..m).map(|k| eta(k) * self.matrix[k * m + i] * self.matrix[k * m + j]).sum();
                let target = if i == j { eta(i) } else { 0.0 };
                worst = worst.max((v - target).abs());
            }
        }
        worst
    }
}

/// Haar-distributed rotation of `R^n` with determinant one (row-major).
pub fn random_rotation<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Vec<f64> {
    // Gram–Schmidt on Gaussian columns gives a Haar element of O(n).
    let mut cols: Vec<Vec<f64>> = Vec::with_capacity(n);
    while cols.len() < n {
        let mut v: Vec<f64> = (0..n).map(|_| rng.sample::<f64, _>(StandardNormal)).collect();
        for c in &cols {
            let d: f64 = v.iter().zip(c).map(|(a, b)| a * b).sum();
            v.iter_mut().zip(c).for_each(|(a, b)| *a -= d * b);
        }
        let norm = v.iter().map(|a| a * a).sum::<f64>().sqrt();
        if norm > 1e-8 {
            cols.push(v.into_iter().map(|a| a / norm).collect());
        }
    }
    let mut q = vec![0.0; n * n];
    for (j, c) in cols.iter().enumerate() {
        for i in 0..n {
            q[i * n + j] = c[i];
        }
    }
    if determinant(&q, n) < 0.0 {
        for i in 0..n {
            q[i * n] = -q[i * n];
        }
    }
    q
}

fn determinant(a: &[f64], n: usize) -> f64 {
    let mut m = a.to_vec();
    let mut det = 1.0;
    for col in 0..n {
        let pivot = (col..n).max_by(|&i, &j| m[i * n + col].abs().total_cmp(&m[j * n + col].abs())).unwrap();
        if m[pivot * n + col] == 0.0 {
            return 0.0;
        }
        if pivot != col {
            for k in 0..n {
                m.swap(pivot * n + k, col * n + k);
            }
            det = -det;
        }
        let p = m[col * n + col];
        det *= p;
        for i in col + 1..n {
            let f = m[i * n + col] / p;
            for k in col..n {
                m[i * n + k] -= f * m[col * n + k];
            }
        }
    }
    det
}

/// Maximal boost rapidity drawn by [`random_isometry`].
pub const MAX_RAPIDITY: f64 = 2.0;

/// A rotation of the spatial block followed by a boost of rapidity uniform
/// in `[0, MAX_RAPIDITY]` along a uniform direction.
pub fn random_isometry<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Isometry {
    let q = random_rotation(n, rng);
    let rot = Isometry::rotation(n, &q).expect("orthogonal matrix");
    let u = random_direction(n, rng);
    let beta = MAX_RAPIDITY * rng.random::<f64>();
    Isometry::boost(&u, beta).compose(&rot)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::stream;

    #[test]
    fn params_derive_sigma_and_lambda() {
        let p = SpectralParams::new(3, 2.0).unwrap();
        assert_eq!(p.sigma(), 1.0);
        assert_eq!(p.lambda(), 5.0);
        let q = SpectralParams::from_lambda(2, 100.25).unwrap();
        assert!((q.alpha() - 10.0).abs() < 1e-14);
        assert!(SpectralParams::new(2, 0.0).is_err());
        assert!(SpectralParams::new(1, 1.0).is_err());
    }

    #[test]
    fn construction_renormalizes_and_rejects_spacelike() {
        let p = HyperPoint::new(vec![2.0, 0.0, 0.0]).unwrap();
        assert_eq!(p.coords(), &[1.0, 0.0, 0.0]);
        assert!(HyperPoint::new(vec![1.0, 2.0, 0.0]).is_err());
        assert!(HyperPoint::new(vec![-1.0, 0.0, 0.0]).is_err());
    }

    #[test]
    fn distance_examples() {
        let o = HyperPoint::origin(3);
        assert_eq!(distance(&o, &o).unwrap(), 0.0);
        let t = 1.5f64;
        let x = HyperPoint::new(vec![t.cosh(), t.sinh(), 0.0, 0.0]).unwrap();
        assert!((distance(&x, &o).unwrap() - t).abs() < 1e-14);
    }

    #[test]
    fn distance_rejects_inconsistent_pairing() {
        let x = [1.0, 0.0, 0.0];
        let y = [0.5, 0.0, 0.0];
        assert!(distance_raw(&x, &y).is_err());
        // rounding just below 1 is clamped
        let y = [1.0 - 5e-10, 0.0, 0.0];
        assert_eq!(distance_raw(&x, &y).unwrap(), 0.0);
    }

    #[test]
    fn polar_distance_edge_cases() {
        assert!(distance_polar(1.3, 1.3, 0.0).abs() < 1e-15);
        assert!((distance_polar(0.7, 1.9, PI) - 2.6).abs() < 1e-14);
        let direct = (1f64.cosh() * 1f64.cosh()).acosh();
        assert!((distance_polar(1.0, 1.0, PI / 2.0) - direct).abs() < 1e-14);
        let a = HyperPoint::from_polar(1.0, &[1.0, 0.0]);
        let b = HyperPoint::from_polar(1.0, &[0.0, 1.0]);
        assert!((distance(&a, &b).unwrap() - direct).abs() < 1e-13);
    }

    #[test]
    fn exp_map_examples() {
        let o = HyperPoint::origin(2);
        assert_eq!(exp_map(&o, &[0.0, 0.0]).unwrap(), o);
        let x = exp_map(&o, &[0.8, 0.0]).unwrap();
        assert!((x.coords()[0] - 0.8f64.cosh()).abs() < 1e-14);
        assert!((x.coords()[1] - 0.8f64.sinh()).abs() < 1e-14);
        let mut rng = stream(1, 0);
        for _ in 0..50 {
            let base = BallSampler::new(3, 2.0).unwrap().sample(&mut rng);
            let v: Vec<f64> = (0..3).map(|_| rng.sample::<f64, _>(StandardNormal)).collect();
            let norm = v.iter().map(|a| a * a).sum::<f64>().sqrt();
            let y = exp_map(&base, &v).unwrap();
            assert!((distance(&base, &y).unwrap() - norm).abs() < 1e-10);
        }
    }

    #[test]
    fn frame_is_orthonormal_and_tangent() {
        let base = HyperPoint::from_polar(1.7, &[0.6, 0.0, 0.8]);
        let frame = tangent_frame(&base);
        for (i, f) in frame.iter().enumerate() {
            assert!(minkowski(f, base.coords()).abs() < 1e-12);
            for (j, g) in frame.iter().enumerate() {
                let want = if i == j { -1.0 } else { 0.0 };
                assert!((minkowski(f, g) - want).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn volume_closed_forms_and_limits() {
        assert!((ball_volume(2, 1.0).unwrap() - 2.0 * PI * (1f64.cosh() - 1.0)).abs() < 1e-14);
        let r = 1e-4;
        assert!((ball_volume(2, r).unwrap() / (PI * r * r) - 1.0).abs() < 1e-8);
        let r = 2.0f64;
        let want3 = PI * ((2.0 * r).sinh() - 2.0 * r);
        assert!((ball_volume(3, r).unwrap() - want3).abs() < 1e-12 * want3);
        // quadrature path against closed form ∫ sinh³ = cosh³/3 − cosh + 2/3
        let c = r.cosh();
        let want4 = sphere_area(3) * (c * c * c / 3.0 - c + 2.0 / 3.0);
        let got4 = ball_volume(4, r).unwrap();
        assert!((got4 - want4).abs() < 1e-10 * want4);
        assert!((got4.ln() - 3.0 * r).abs() < 3.0);
        assert!(ball_volume(2, 0.0).is_err());
    }

    #[test]
    fn boundary_distance_extremes_and_planar_formula() {
        assert!((boundary_distance(2, 3.0, 1.0, PI).unwrap() - 2.0).abs() < 1e-11);
        assert!((boundary_distance(2, 3.0, 1.0, 0.0).unwrap() - 4.0).abs() < 1e-11);
        let bis = boundary_distance(2, 3.0, 1.0, PI / 3.0).unwrap();
        let closed = boundary_distance_planar(3.0, 1.0, PI / 3.0);
        assert!((bis - closed).abs() < 1e-9, "{bis} vs {closed}");
        assert!(boundary_distance(3, 1.0, 1.0, 0.5).is_err());
    }

    #[test]
    fn boundary_exit_point_lies_on_sphere() {
                let (big_r, r, psi) = (2.5, 1.2, 1.1);
        let s = boundary_distance(2, big_r, r, psi).unwrap();
        // the first frame vector at x is the outward radial direction
        let x = HyperPoint::from_polar(r, &[1.0, 0.0]);
        let v = [-s * psi.cos(), s * psi.sin()];
        let y = exp_map(&x, &v).unwrap();
        assert!((y.radius() - big_r).abs() < 1e-9, "{}", y.radius());
    }

    #[test]
    fn isometry_identity_and_invariants() {
        let id = Isometry::identity(3);
        let z = Isometry::boost(&[1.0, 0.0, 0.0], 0.0).compose(&Isometry::rotation(3, &[1., 0., 0., 0., 1., 0., 0., 0., 1.]).unwrap());
        assert_eq!(id, z);
        let mut rng = stream(3, 0);
        for n in 2..5 {
            let g = random_isometry(n, &mut rng);
            assert!(g.form_defect() < 1e-10);
            let gx = g.apply(&HyperPoint::origin(n));
            assert!((minkowski(gx.coords(), gx.coords()) - 1.0).abs() < 1e-10);
            assert!(gx.coords()[0] > 0.0);
        }
    }

    #[test]
    fn isometries_preserve_distance_matrices() {
        let mut rng = stream(4, 0);
        let sampler = BallSampler::new(3, 2.0).unwrap();
        let pts = sampler.sample_many(10, &mut rng);
        let g = random_isometry(3, &mut rng);
        let img: Vec<_> = pts.iter().map(|p| g.apply(p)).collect();
        for i in 0..10 {
            for j in 0..10 {
                let d0 = distance(&pts[i], &pts[j]).unwrap();
                let d1 = distance(&img[i], &img[j]).unwrap();
                assert!((d0 - d1).abs() < 1e-9, "{d0} vs {d1}");
            }
        }
    }

    #[test]
    fn sampler_support_determinism_and_half_radius_mass() {
        let sampler = BallSampler::new(2, 3.0).unwrap();
        let a = sampler.sample_many(200, &mut stream(9, 1));
        let b = sampler.sample_many(200, &mut stream(9, 1));
        assert_eq!(a, b);
        assert!(a.iter().all(|p| p.radius() <= 3.0 + 1e-12));
        let count = 40_000;
        let pts = sampler.sample_many(count, &mut stream(9, 2));
        let inside = pts.iter().filter(|p| p.radius() <= 1.5).count() as f64 / count as f64;
        let want = ball_volume(2, 1.5).unwrap() / ball_volume(2, 3.0).unwrap();
        let se = (want * (1.0 - want) / count as f64).sqrt();
        assert!((inside - want).abs() < 4.0 * se, "{inside} vs {want}");
    }

    #[test]
    fn radial_table_matches_exact_cdf() {
        for n in 2..5 {
            let s = BallSampler::new(n, 2.5).unwrap();
            let total = sinh_power_integral(n - 1, 2.5);
            for i in 1..20 {
                let r = 2.5 * i as f64 / 20.0;
                let want = sinh_power_integral(n - 1, r) / total;
                assert!((s.radial_cdf(r) - want).abs() < 1e-12);
                assert!((s.radius_quantile(want) - r).abs() < 1e-9);
            }
        }
    }
}
