use alloc::vec::Vec;

use super::spherical::{integrate_radial, small_radius_series, RadialState, ODE_RTOL, ODE_START};
use crate::error::domain;
use crate::{Estimate, Result, SpectralParams};
#[allow(unused_imports)]
use num_traits::Float;

/// Nodes per unit of `α r` are `1 / NODE_PHASE`.
const NODE_PHASE: f64 = 0.1;

/// Dense tabulation of `F_{n,λ}` on `[0, r_max]` for repeated evaluation.
///
/// Values and first derivatives come from one ODE sweep, second derivatives
/// from the equation; evaluation is quintic Hermite interpolation, accurate
/// to about `1e-11` relative to the local amplitude.
#[derive(Debug, Clone)]
pub struct CovarianceTable {
    params: SpectralParams,
    step: f64,
    r_max: f64,
    nodes: Vec<[f64; 3]>,
}

impl CovarianceTable {
    pub fn new(params: SpectralParams, r_max: f64) -> Result<Self> {
        if !(r_max >= 0.0) || !r_max.is_finite() {
            return Err(domain!("table range must be finite and non-negative, got {r_max}"));
        }
        let step = NODE_PHASE / params.alpha().max(1.0);
        let count = (r_max / step).ceil() as usize + 1;
        let radii: Vec<f64> = (0..=count).map(|k| k as f64 * step).collect();
        let split = radii.partition_point(|&r| r < ODE_START);
        let mut states: Vec<RadialState> = radii[..split]
            .iter()
            .map(|&r| {
                let s = small_radius_series(&params, r);
                RadialState { r, value: s.value, derivative: s.derivative }
            })
            .collect();
        states.extend(integrate_radial(&params, &radii[split..], ODE_RTOL));
        let nodes = states
            .iter()
            .map(|st| [st.value, st.derivative, st.second_derivative(&params)])
            .collect();
        Ok(CovarianceTable { params, step, r_max: count as f64 * step, nodes })
    }

    pub fn params(&self) -> &SpectralParams {
        &self.params
    }

    pub fn r_max(&self) -> f64 {
        self.r_max
    }

    /// `F(r)` for `0 <= r <= r_max`.
    pub fn value(&self, r: f64) -> Result<f64> {
        if !(r >= 0.0) || r > self.r_max {
            return Err(domain!("r = {r} outside the table range [0, {}]", self.r_max));
        }
        let pos = r / self.step;
        let k = (pos.floor() as usize).min(self.nodes.len() - 2);
        let t = pos - k as f64;
        Ok(quintic_hermite(&self.nodes[k], &self.nodes[k + 1], self.step, t))
    }

    pub fn estimate(&self, r: f64) -> Result<Estimate> {
        let v = self.value(r)?;
        Ok(Estimate { value: v, abs_err: 1e-10, degraded: false })
    }
}

fn quintic_hermite(a: &[f64; 3], b: &[f64; 3], h: f64, t: f64) -> f64 {
    let t2 = t * t;
    let t3 = t2 * t;
    let t4 = t3 * t;
    let t5 = t4 * t;
    let h00 = 1.0 - 10.0 * t3 + 15.0 * t4 - 6.0 * t5;
    let h10 = t - 6.0 * t3 + 8.0 * t4 - 3.0 * t5;
    let h20 = 0.5 * (t2 - 3.0 * t3 + 3.0 * t4 - t5);
    let h01 = 10.0 * t3 - 15.0 * t4 + 6.0 * t5;
    let h11 = -4.0 * t3 + 7.0 * t4 - 3.0 * t5;
    let h21 = 0.5 * (t3 - 2.0 * t4 + t5);
    h00 * a[0] + h10 * h * a[1] + h20 * h * h * a[2] + h01 * b[0] + h11 * h * b[1] + h21 * h * h * b[2]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::specfun::{spherical_f, CovarianceRoute};

    #[test]
    fn reproduces_quintic_polynomials() {
        let f = |x: f64| [x.powi(5) - 2.0 * x * x, 5.0 * x.powi(4) - 4.0 * x, 20.0 * x.powi(3) - 4.0];
        let (x0, h) = (0.3, 0.7);
        for &t in &[0.0, 0.25, 0.5, 0.9, 1.0] {
            let got = quintic_hermite(&f(x0), &f(x0 + h), h, t);
            assert!((got - f(x0 + t * h)[0]).abs() < 1e-14);
        }
    }

    #[test]
    fn matches_auto_route() {
        for &(n, alpha) in &[(2, 1.0), (2, 37.0), (3, 12.0), (4, 60.0)] {
            let p = SpectralParams::new(n, alpha).unwrap();
            let table = CovarianceTable::new(p, 4.0).unwrap();
            assert_eq!(table.value(0.0).unwrap(), 1.0);
            for k in 0..97 {
                let r = 0.0413 * k as f64 + 1e-4;
                let want = spherical_f(&p, r, CovarianceRoute::Auto).unwrap().value;
                let got = table.value(r).unwrap();
                assert!((got - want).abs() < 1e-9, "n={n} α={alpha} r={r}: {got} vs {want}");
            }
        }
    }

    #[test]
    fn rejects_out_of_range() {
        let table = CovarianceTable::new(SpectralParams::new(2, 3.0).unwrap(), 1.0).unwrap();
        assert!(table.value(table.r_max() + 1e-9).is_err());
        assert!(table.value(-1.0).is_err());
    }
}
