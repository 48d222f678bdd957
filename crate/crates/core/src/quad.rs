//! Quadrature rules.
//!
//! Gauss–Legendre and Gauss–Hermite node generation, a globally adaptive
//! Gauss–Kronrod (7, 15) integrator over a list of initial panels, and a
//! tanh–sinh rule for integrands with endpoint singularities.

use alloc::vec::Vec;
use core::f64::consts::PI;

use crate::{Error, Result};
#[allow(unused_imports)]
use num_traits::Float;

/// Nodes and weights of an `n`-point rule on `[-1, 1]`.
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussLegendre {
    pub fn new(n: usize) -> Self {
        assert!(n >= 1);
        let mut nodes = alloc::vec![0.0; n];
        let mut weights = alloc::vec![0.0; n];
        let m = n.div_ceil(2);
        for i in 0..m {
            let mut z = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 1.0;
            for _ in 0..100 {
                let (p, d) = legendre_with_derivative(n, z);
                dp = d;
                let dz = p / d;
                z -= dz;
                if dz.abs() < 1e-16 {
                    let (_, d) = legendre_with_derivative(n, z);
                    dp = d;
                    break;
                }
            }
            nodes[i] = -z;
            nodes[n - 1 - i] = z;
            let w = 2.0 / ((1.0 - z * z) * dp * dp);
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        GaussLegendre { nodes, weights }
    }

    /// Applies the rule on `[a, b]`.
    pub fn integrate<F: FnMut(f64) -> f64>(&self, a: f64, b: f64, mut f: F) -> f64 {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| w * f(mid + half * x))
            .sum::<f64>()
            * half
    }
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let k = k as f64;
        let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    if n == 0 {
        return (1.0, 0.0);
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Gauss–Hermite rule for the standard normal weight: `Σ w_i g(x_i) ≈ E[g(Z)]`.
#[derive(Debug, Clone)]
pub struct GaussHermite {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussHermite {
    pub fn new(n: usize) -> Self {
        assert!(n >= 2);
        // Roots of the orthonormal physicists' Hermite function are
        // bracketed by a sign scan and polished by safeguarded Newton steps,
        // then rescaled to the probabilists' weight.
        let nf = n as f64;
        let eval = |z: f64| -> (f64, f64) {
            let mut p1 = 0.751_125_544_464_942_5; // π^{-1/4}
            let mut p2 = 0.0;
            for j in 0..n {
                let p3 = p2;
                p2 = p1;
                let jf = j as f64;
                p1 = z * (2.0 / (jf + 1.0)).sqrt() * p2 - (jf / (jf + 1.0)).sqrt() * p3;
            }
            (p1, (2.0 * nf).sqrt() * p2)
        };
        let z_max = (2.0 * nf + 1.0).sqrt() + 1.0;
        let step = 0.25 * core::f64::consts::PI / (2.0 * nf + 1.0).sqrt();
        let mut positive = Vec::with_capacity(n / 2 + 1);
        let mut lo = if n % 2 == 1 { step * 1e-3 } else { 0.0 };
        let (mut f_lo, _) = eval(lo);
        while lo < z_max {
            let hi = lo + step;
            let (f_hi, _) = eval(hi);
            if f_lo == 0.0 || f_lo.signum() != f_hi.signum() {
                let (mut a, mut b) = (lo, hi);
                let mut z = 0.5 * (a + b);
                for _ in 0..100 {
                    let (p, dp) = eval(z);
                    if p == 0.0 {
                        break;
                    }
                    if p.signum() == f_lo.signum() { a = z } else { b = z }
                    let newton = z - p / dp;
                    let next = if newton > a && newton < b { newton } else { 0.5 * (a + b) };
                    let done = (next - z).abs() <= 1e-15 * next.abs().max(1.0);
                    z = next;
                    if done {
                        break;
                    }
                }
                positive.push(z);
            }
            lo = hi;
            f_lo = f_hi;
        }
        let mut x = Vec::with_capacity(n);
        let mut w = Vec::with_capacity(n);
        let mut push = |z: f64| {
            let (_, dp) = eval(z);
            x.push(z);
            w.push(2.0 / (dp * dp));
        };
        for &z in positive.iter().rev() {
            push(-z);
        }
        if n % 2 == 1 {
            push(0.0);
        }
        for &z in &positive {
            push(z);
        }
        assert_eq!(x.len(), n, "Gauss–Hermite root scan missed nodes");
        let sqrt_pi = PI.sqrt();
        let nodes = x.iter().map(|&t| t * core::f64::consts::SQRT_2).collect();
        let weights = w.iter().map(|&t| t / sqrt_pi).collect();
        GaussHermite { nodes, weights }
    }

    pub fn expect<F: FnMut(f64) -> f64>(&self, mut g: F) -> f64 {
        self.nodes.iter().zip(&self.weights).map(|(&x, &w)| w * g(x)).sum()
    }
}

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

/// One Gauss–Kronrod (7, 15) panel: returns (integral, |integral| mass, error estimate).
pub fn gk15<F: FnMut(f64) -> f64>(f: &mut F, a: f64, b: f64) -> (f64, f64, f64) {
    let half = 0.5 * (b - a);
    let mid = 0.5 * (a + b);
    let fc = f(mid);
    let mut kronrod = WGK[7] * fc;
    let mut gauss = WG[3] * fc;
    let mut mass = WGK[7] * fc.abs();
    for j in 0..7 {
        let dx = half * XGK[j];
        let f1 = f(mid - dx);
        let f2 = f(mid + dx);
        kronrod += WGK[j] * (f1 + f2);
        mass += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            gauss += WG[j / 2] * (f1 + f2);
        }
    }
    let k = kronrod * half;
    let g = gauss * half;
    (k, mass * half.abs(), (k - g).abs())
}

#[derive(Debug, Clone, Copy)]
pub struct Tolerance {
    pub abs: f64,
    pub rel: f64,
    pub max_panels: usize,
}

impl Tolerance {
    pub fn rel(rel: f64) -> Self {
        Tolerance { abs: 0.0, rel, max_panels: 20_000 }
    }

    pub fn with_abs(mut self, abs: f64) -> Self {
        self.abs = abs;
        self
    }
}

#[derive(Debug, Clone, Copy)]
struct Panel {
    a: f64,
    b: f64,
    value: f64,
    mass: f64,
    err: f64,
}

/// Globally adaptive Gauss–Kronrod integration starting from the panels
/// delimited by `breaks` (sorted, at least two entries). The relative
/// tolerance is measured against the integral of `|f|`, which keeps the
/// criterion meaningful for oscillatory integrands with cancellation.
///
/// Returns `(value, error estimate)`; `Err` if the panel budget is exhausted
/// before the tolerance is met, carrying the achieved error.
pub fn integrate_adaptive<F: FnMut(f64) -> f64>(
    mut f: F,
    breaks: &[f64],
    tol: Tolerance,
) -> Result<(f64, f64)> {
    let mut panels: Vec<Panel> = Vec::with_capacity(breaks.len() * 2);
    let mut mass = 0.0;
    for w in breaks.windows(2) {
        if w[1] > w[0] {
            let (value, m, err) = gk15(&mut f, w[0], w[1]);
            mass += m;
            panels.push(Panel { a: w[0], b: w[1], value, mass: m, err });
        }
    }
    loop {
        let total_err: f64 = panels.iter().map(|p| p.err).sum();
        let target = tol.abs.max(tol.rel * mass);
        if total_err <= target {
            let value = pairwise_sum(panels.iter().map(|p| p.value));
            return Ok((value, total_err));
        }
        if panels.len() >= tol.max_panels {
            return Err(Error::NoConvergence { achieved: total_err / mass.max(f64::MIN_POSITIVE) });
        }
        // Split every panel carrying more than its share of the error.
        let share = target / panels.len() as f64;
        let mut next = Vec::with_capacity(panels.len() * 2);
        let mut split_any = false;
        for p in panels.drain(..) {
            let width = p.b - p.a;
            if p.err > share && width > 1e-14 * (p.a.abs() + p.b.abs()).max(1e-300) {
                split_any = true;
                let m = 0.5 * (p.a + p.b);
                let (v1, m1, e1) = gk15(&mut f, p.a, m);
                let (v2, m2, e2) = gk15(&mut f, m, p.b);
                mass += m1 + m2 - p.mass;
                next.push(Panel { a: p.a, b: m, value: v1, mass: m1, err: e1 });
                next.push(Panel { a: m, b: p.b, value: v2, mass: m2, err: e2 });
            } else {
                next.push(p);
            }
        }
        panels = next;
        if !split_any {
            let total_err: f64 = panels.iter().map(|p| p.err).sum();
            return Err(Error::NoConvergence { achieved: total_err / mass.max(f64::MIN_POSITIVE) });
        }
    }
}

/// Convenience wrapper over a single interval.
pub fn integrate<F: FnMut(f64) -> f64>(f: F, a: f64, b: f64, tol: Tolerance) -> Result<(f64, f64)> {
    integrate_adaptive(f, &[a, b], tol)
}

/// Tanh–sinh (double exponential) quadrature on `[a, b]`.
///
/// The integrand receives the abscissa together with its distances to both
/// endpoints, computed without cancellation, so that endpoint singularities
/// can be evaluated accurately.
pub fn tanh_sinh<F: FnMut(f64, f64, f64) -> f64>(mut f: F, a: f64, b: f64, rel_tol: f64) -> (f64, f64) {
    if b <= a {
        return (0.0, 0.0);
    }
    let half = 0.5 * (b - a);
    let tmax = 4.5;
    let mut h = 0.5;
    let mut eval = |t: f64| -> f64 {
        let u = 0.5 * PI * t.sinh();
        let cu = u.cosh();
        let w = 0.5 * PI * t.cosh() / (cu * cu);
        // distance from the nearer endpoint in units of half-width
        let e = 1.0 / (u.abs().exp() * cu);
        let (da, db) = if u < 0.0 { (half * e, half * (2.0 - e)) } else { (half * (2.0 - e), half * e) };
        let x = if u < 0.0 { a + da } else { b - db };
        if w == 0.0 || da <= 0.0 || db <= 0.0 {
            return 0.0;
        }
        w * f(x, da, db)
    };
    let mut sum = eval(0.0);
    let mut k = 1;
    while (k as f64) * h <= tmax {
        let t = k as f64 * h;
        sum += eval(t) + eval(-t);
        k += 1;
    }
    let mut estimate = sum * h * half;
    let mut err = f64::INFINITY;
    for _ in 0..8 {
        h *= 0.5;
        let mut add = 0.0;
        let mut k = 1;
        while (k as f64) * h <= tmax {
            let t = k as f64 * h;
            add += eval(t) + eval(-t);
            k += 2;
        }
        sum += add;
        let next = sum * h * half;
        err = (next - estimate).abs();
        estimate = next;
        if err <= rel_tol * estimate.abs() || err < 1e-300 {
            break;
        }
    }
    (estimate, err)
}

/// Pairwise summation; result independent of how the input was produced.
pub fn pairwise_sum<I: IntoIterator<Item = f64>>(values: I) -> f64 {
    let v: Vec<f64> = values.into_iter().collect();
    fn rec(s: &[f64]) -> f64 {
        if s.len() <= 16 {
            s.iter().sum()
        } else {
            let (l, r) = s.split_at(s.len() / 2);
            rec(l) + rec(r)
        }
    }
    rec(&v)
}
