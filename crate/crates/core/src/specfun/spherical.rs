//! The spherical function `F_{n,λ}(r)`, the covariance of the hyperbolic
//! random wave, evaluated along three independent routes:
//!
//! * `Ode`: the radial eigenvalue equation
//!   `F'' + (n−1) coth(r) F' + λF = 0`, `F(0) = 1`, `F'(0) = 0`,
//!   started at `r₀ = 1e-3` from the hypergeometric power series and
//!   integrated with an embedded Dormand–Prince 5(4) pair;
//! * `Quadrature`: the spherical average
//!   `(ω_{n−2}/ω_{n−1}) ∫₀^π (cosh r − sinh r cos θ)^{−σ+iα} sin^{n−2}θ dθ`
//!   on panels of phase length at most `π/2`;
//! * `Hypergeometric`: `₂F₁((σ+iα)/2, (σ−iα)/2; n/2; −sinh²r)`.

use alloc::vec::Vec;
use core::f64::consts::PI;
use num_complex::Complex64;

use super::hyp2f1::{hyp2f1, PFAFF_LIMIT};
use super::sphere_area;
use crate::error::domain;
use crate::quad::GaussLegendre;
use crate::{Estimate, Result, SpectralParams};
#[allow(unused_imports)]
use num_traits::Float;

/// Starting radius of the ODE route.
pub const ODE_START: f64 = 1e-3;
/// Default relative (amplitude-scaled) tolerance of the ODE route.
pub const ODE_RTOL: f64 = 1e-12;
const QUAD_PANEL_TOL: f64 = 1e-13;
const DEGRADED_ABOVE: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CovarianceRoute {
    Ode,
    Quadrature,
    Hypergeometric,
    /// Hypergeometric while `tanh²r <= AUTO_THRESHOLD` and the series
    /// keeps its accuracy, ODE otherwise.
    Auto,
}

/// `tanh²r` threshold of the automatic route.
pub const AUTO_THRESHOLD: f64 = PFAFF_LIMIT;

/// `F_{n,λ}(r)` along the requested route.
pub fn spherical_f(p: &SpectralParams, r: f64, route: CovarianceRoute) -> Result<Estimate> {
    if !(r >= 0.0) || !r.is_finite() {
        return Err(domain!("radius must be finite and non-negative, got {r}"));
    }
    if r == 0.0 {
        return Ok(Estimate::exact(1.0));
    }
    match route {
        CovarianceRoute::Ode => Ok(ode_route(p, r)),
        CovarianceRoute::Quadrature => Ok(quadrature_route(p, r)),
        CovarianceRoute::Hypergeometric => hypergeometric_route(p, r),
        CovarianceRoute::Auto => {
            let t = r.tanh();
            if t * t <= AUTO_THRESHOLD {
                let h = hypergeometric_route(p, r)?;
                if !h.degraded {
                    return Ok(h);
                }
            }
            Ok(ode_route(p, r))
        }
    }
}

fn hypergeometric_route(p: &SpectralParams, r: f64) -> Result<Estimate> {
    let (a, b, c) = family(p);
    let s = r.sinh();
    let h = hyp2f1(a, b, c, -s * s)?;
    // the exact value is real; a large imaginary part signals lost accuracy
    let err = h.err + h.value.im.abs();
    Ok(Estimate { value: h.value.re, abs_err: err, degraded: h.degraded || err > DEGRADED_ABOVE })
}

fn family(p: &SpectralParams) -> (Complex64, Complex64, Complex64) {
    let s = p.sigma();
    let al = p.alpha();
    (
        Complex64::new(0.5 * s, 0.5 * al),
        Complex64::new(0.5 * s, -0.5 * al),
        Complex64::new(0.5 * p.n() as f64, 0.0),
    )
}

/// Power series of `F` and `F'` in `z = −sinh²r`, plus `1 − F` without
/// cancellation. Intended for `λ sinh²r` of order one or less.
#[derive(Debug, Clone, Copy)]
pub struct SeriesValue {
    pub value: f64,
    pub derivative: f64,
    pub one_minus: f64,
}

pub fn small_radius_series(p: &SpectralParams, r: f64) -> SeriesValue {
    if r == 0.0 {
        return SeriesValue { value: 1.0, derivative: 0.0, one_minus: 0.0 };
    }
    let half_sigma = 0.5 * p.sigma();
    let quarter_a2 = 0.25 * p.alpha() * p.alpha();
    let c = 0.5 * p.n() as f64;
    let sh = r.sinh();
    let z = -sh * sh;
    let mut term = 1.0;
    let mut tail = 0.0; // Σ_{k≥1} t_k
    let mut dz = 0.0; // Σ_{k≥1} k t_k / z
    for k in 0..500 {
        let kf = k as f64;
        let ab = (half_sigma + kf) * (half_sigma + kf) + quarter_a2;
        term *= ab / ((c + kf) * (kf + 1.0)) * z;
        tail += term;
        dz += (kf + 1.0) * term / z;
        if term.abs() <= 1e-18 * tail.abs() && kf > 2.0 {
            break;
        }
    }
    // dF/dr = dF/dz · (−2 sinh r cosh r)
    let derivative = dz * (-2.0 * sh * r.cosh());
    SeriesValue { value: 1.0 + tail, derivative, one_minus: -tail }
}

/// State of the radial ODE: value and derivative of `F`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RadialState {
    pub r: f64,
    pub value: f64,
    pub derivative: f64,
}

impl RadialState {
    /// Second derivative from the equation itself.
    pub fn second_derivative(&self, p: &SpectralParams) -> f64 {
        if self.r == 0.0 {
            return -p.lambda() / p.n() as f64;
        }
        -(p.n() as f64 - 1.0) / self.r.tanh() * self.derivative - p.lambda() * self.value
    }
}

fn rhs(p: &SpectralParams, r: f64, y: [f64; 2]) -> [f64; 2] {
    [y[1], -(p.n() as f64 - 1.0) / r.tanh() * y[1] - p.lambda() * y[0]]
}

// Dormand–Prince 5(4) tableau
const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;
const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const B1: f64 = 35.0 / 384.0;
const B3: f64 = 500.0 / 1113.0;
const B4: f64 = 125.0 / 192.0;
const B5: f64 = -2187.0 / 6784.0;
const B6: f64 = 11.0 / 84.0;
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

/// Integrates the radial equation from the series start and reports the
/// state at every radius in `stops` (ascending, all `>= ODE_START`).
pub fn integrate_radial(p: &SpectralParams, stops: &[f64], rtol: f64) -> Vec<RadialState> {
    let start = small_radius_series(p, ODE_START);
    let mut r = ODE_START;
    let mut y = [start.value, start.derivative];
    let sqrt_lambda = p.lambda().sqrt();
    let mut h = 0.05 / sqrt_lambda.max(1.0) * 0.1;
    let mut out = Vec::with_capacity(stops.len());
    let mut k1 = rhs(p, r, y);
    for &stop in stops {
        while r < stop {
            let last = stop - r <= h * 1.0000001;
            let step = if last { stop - r } else { h };
            let y2 = [y[0] + step * A21 * k1[0], y[1] + step * A21 * k1[1]];
            let k2 = rhs(p, r + C2 * step, y2);
            let y3 = [
                y[0] + step * (A31 * k1[0] + A32 * k2[0]),
                y[1] + step * (A31 * k1[1] + A32 * k2[1]),
            ];
            let k3 = rhs(p, r + C3 * step, y3);
            let y4 = [
                y[0] + step * (A41 * k1[0] + A42 * k2[0] + A43 * k3[0]),
                y[1] + step * (A41 * k1[1] + A42 * k2[1] + A43 * k3[1]),
            ];
            let k4 = rhs(p, r + C4 * step, y4);
            let y5 = [
                y[0] + step * (A51 * k1[0] + A52 * k2[0] + A53 * k3[0] + A54 * k4[0]),
                y[1] + step * (A51 * k1[1] + A52 * k2[1] + A53 * k3[1] + A54 * k4[1]),
            ];
            let k5 = rhs(p, r + C5 * step, y5);
            let y6 = [
                y[0] + step * (A61 * k1[0] + A62 * k2[0] + A63 * k3[0] + A64 * k4[0] + A65 * k5[0]),
                y[1] + step * (A61 * k1[1] + A62 * k2[1] + A63 * k3[1] + A64 * k4[1] + A65 * k5[1]),
            ];
            let k6 = rhs(p, r + step, y6);
            let yn = [
                y[0] + step * (B1 * k1[0] + B3 * k3[0] + B4 * k4[0] + B5 * k5[0] + B6 * k6[0]),
                y[1] + step * (B1 * k1[1] + B3 * k3[1] + B4 * k4[1] + B5 * k5[1] + B6 * k6[1]),
            ];
            let r_next = if last { stop } else { r + step };
            let k7 = rhs(p, r_next, yn);
            let e = [
                step * (E1 * k1[0] + E3 * k3[0] + E4 * k4[0] + E5 * k5[0] + E6 * k6[0] + E7 * k7[0]),
                step * (E1 * k1[1] + E3 * k3[1] + E4 * k4[1] + E5 * k5[1] + E6 * k6[1] + E7 * k7[1]),
            ];
            // error measured against the local oscillation amplitude
            let amp = |s: [f64; 2]| (s[0] * s[0] + s[1] * s[1] / p.lambda()).sqrt();
            let scale = rtol * amp(y).max(amp(yn)) + 1e-300;
            let err = (e[0].abs() / scale).max(e[1].abs() / (scale * sqrt_lambda));
            if err <= 1.0 {
                r = r_next;
                y = yn;
                k1 = k7;
            }
            let factor = if err == 0.0 { 5.0 } else { (0.9 * err.powf(-0.2)).clamp(0.2, 5.0) };
            if err <= 1.0 || !last {
                h *= factor;
            } else {
                h = step * factor;
            }
        }
        out.push(RadialState { r, value: y[0], derivative: y[1] });
    }
    out
}

fn ode_route(p: &SpectralParams, r: f64) -> Estimate {
    if r <= ODE_START {
        let s = small_radius_series(p, r);
        return Estimate { value: s.value, abs_err: 1e-16, degraded: false };
    }
    let st = integrate_radial(p, &[r], ODE_RTOL)[0];
    // global error grows roughly with the number of oscillations traversed
    let amp = (st.value * st.value + st.derivative * st.derivative / p.lambda()).sqrt();
    let err = ODE_RTOL * amp * (1.0 + p.alpha() * r);
    Estimate { value: st.value, abs_err: err, degraded: err > DEGRADED_ABOVE }
}

/// Panel boundaries in `θ` at equal steps of `u = log(cosh r − sinh r cos θ)`,
/// so the phase `αu` advances by at most `π/2` per panel.
fn phase_panels(p: &SpectralParams, r: f64) -> Vec<f64> {
    let count = ((2.0 * r * p.alpha()) / (0.5 * PI)).ceil().max(1.0) as usize;
    let (em, sh) = ((-r).exp(), r.sinh());
    let mut breaks = Vec::with_capacity(count + 1);
    breaks.push(0.0);
    for k in 1..count {
        let u = -r + 2.0 * r * k as f64 / count as f64;
        // e^u = e^{−r} + 2 sinh r sin²(θ/2)
        let s2 = ((u.exp() - em) / (2.0 * sh)).clamp(0.0, 1.0);
        breaks.push(2.0 * s2.sqrt().asin());
    }
    breaks.push(PI);
    breaks
}

fn quadrature_route(p: &SpectralParams, r: f64) -> Estimate {
    let n = p.n();
    let expo = Complex64::new(-p.sigma(), p.alpha());
    let (em, sh) = ((-r).exp(), r.sinh());
    let integrand = |theta: f64| -> Complex64 {
        let s = (0.5 * theta).sin();
        let base = em + 2.0 * sh * s * s;
        let w = theta.sin().powi(n as i32 - 2);
        (expo * base.ln()).exp() * w
    };
    let breaks = phase_panels(p, r);
    let rules = [GaussLegendre::new(16), GaussLegendre::new(32), GaussLegendre::new(64), GaussLegendre::new(128)];
    let apply = |rule: &GaussLegendre, a: f64, b: f64| -> (Complex64, f64) {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        let mut acc = Complex64::new(0.0, 0.0);
        let mut mass = 0.0;
        for (&x, &w) in rule.nodes.iter().zip(&rule.weights) {
            let v = integrand(mid + half * x);
            acc += v * w;
            mass += v.norm() * w;
        }
        (acc * half, mass * half)
    };
    let mut total = Complex64::new(0.0, 0.0);
    let mut err = 0.0;
    let mut degraded = false;
    for pair in breaks.windows(2) {
        let (a, b) = (pair[0], pair[1]);
        let (mut prev, _) = apply(&rules[0], a, b);
        let mut converged = false;
        for rule in &rules[1..] {
            let (next, mass) = apply(rule, a, b);
            let diff = (next - prev).norm();
            prev = next;
            if diff <= QUAD_PANEL_TOL * mass + 1e-300 {
                err += diff;
                converged = true;
                break;
            }
        }
        if !converged {
            degraded = true;
            err += prev.norm() * 1e-10;
        }
        total += prev;
    }
    let scale = sphere_area(n - 2) / sphere_area(n - 1);
    let value = total * scale;
    let abs_err = err * scale + value.im.abs();
    Estimate { value: value.re, abs_err, degraded: degraded || abs_err > DEGRADED_ABOVE }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(n: usize, alpha: f64) -> SpectralParams {
        SpectralParams::new(n, alpha).unwrap()
    }

    fn exact_n3(alpha: f64, r: f64) -> f64 {
        (alpha * r).sin() / (alpha * r.sinh())
    }

    #[test]
    fn value_at_origin_is_one() {
        for route in [CovarianceRoute::Ode, CovarianceRoute::Quadrature, CovarianceRoute::Hypergeometric, CovarianceRoute::Auto] {
            assert_eq!(spherical_f(&params(4, 7.0), 0.0, route).unwrap().value, 1.0);
        }
    }

    #[test]
    fn derivative_vanishes_at_origin() {
        let p = params(2, 3.0);
        let h = 1e-4;
        // F extends evenly to r < 0
        let fp = spherical_f(&p, h, CovarianceRoute::Auto).unwrap().value;
        let fm = spherical_f(&p, (-h).abs(), CovarianceRoute::Auto).unwrap().value;
        assert!(((fp - fm) / (2.0 * h)).abs() < 1e-6);
        // F'(r) = −(λ/n) r + O(r³)
        let s = small_radius_series(&p, h);
        assert!((s.derivative / (-p.lambda() / 2.0 * h) - 1.0).abs() < 1e-6);
        let ode = integrate_radial(&p, &[2e-3], ODE_RTOL)[0];
        assert!((ode.derivative / (-p.lambda() / 2.0 * 2e-3) - 1.0).abs() < 1e-3);
    }

    #[test]
    fn all_routes_match_closed_form_in_three_dimensions() {
        for &alpha in &[1.0, 5.0, 20.0, 50.0] {
            let p = params(3, alpha);
            for &r in &[1e-3, 0.01, 0.3, 1.0, 2.5, 4.0, 6.0] {
                let want = exact_n3(alpha, r);
                let amp = 1.0 / (alpha * r.sinh()).max(1e-300);
                let amp = amp.min(1.0);
                for route in [CovarianceRoute::Ode, CovarianceRoute::Quadrature, CovarianceRoute::Hypergeometric] {
                    let got = spherical_f(&p, r, route).unwrap();
                    assert!(
                        (got.value - want).abs() <= 1e-9 * amp,
                        "{route:?} α={alpha} r={r}: {} vs {want}",
                        got.value
                    );
                }
            }
        }
    }

    #[test]
    fn series_one_minus_has_no_cancellation() {
        let p = params(2, 40.0);
        let r = 1e-5;
        let s = small_radius_series(&p, r);
        // leading term λ sinh²r / (2n)
        let lead = p.lambda() * r.sinh().powi(2) / 4.0;
        assert!((s.one_minus / lead - 1.0).abs() < 1e-3);
    }

    #[test]
    fn ode_states_satisfy_second_derivative_identity() {
        let p = params(2, 4.0);
        let st = integrate_radial(&p, &[1.0, 2.0], ODE_RTOL);
        assert_eq!(st.len(), 2);
        assert!((st[1].r - 2.0).abs() < 1e-15);
        let origin = RadialState { r: 0.0, value: 1.0, derivative: 0.0 };
        assert!((origin.second_derivative(&p) + p.lambda() / 2.0).abs() < 1e-14);
    }
}
