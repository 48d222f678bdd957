use hyperwave_core::chaos::{hermite, mean_var, normal_cdf, Kernel, McPlan};
use hyperwave_core::hypgeo::sample_uniform_ball;
use hyperwave_core::rng::stream;
use hyperwave_core::waves::sample_gaussian_field;
use hyperwave_core::SpectralParams;
use proptest::prelude::*;
use std::sync::Arc;

proptest! {
    #[test]
    fn hermite_three_term_recurrence(q in 1usize..30, x in -6.0..6.0f64) {
        let lhs = hermite(q + 1, x);
        let rhs = x * hermite(q, x) - q as f64 * hermite(q - 1, x);
        prop_assert!((lhs - rhs).abs() <= 1e-12 * (1.0 + lhs.abs()));
    }

    #[test]
    fn hermite_parity(q in 0usize..25, x in 0.0..5.0f64) {
        let sign = if q % 2 == 0 { 1.0 } else { -1.0 };
        prop_assert!((hermite(q, -x) - sign * hermite(q, x)).abs() <= 1e-12 * (1.0 + hermite(q, x).abs()));
    }
}

#[test]
fn gaussian_marginal_passes_kolmogorov_smirnov() {
    let p = SpectralParams::new(2, 4.0).unwrap();
    let points = Arc::new(sample_uniform_ball(2, 1.0, 5, &mut stream(3, 0)).unwrap());
    let fields = sample_gaussian_field(points, &p, 10_000, 11).unwrap();
    let mut x: Vec<f64> = fields.iter().map(|f| f.values[2]).collect();
    x.sort_by(f64::total_cmp);
    let k = x.len() as f64;
    let ks = x
        .iter()
        .enumerate()
        .map(|(i, &v)| (normal_cdf(v) - i as f64 / k).abs().max(((i + 1) as f64 / k - normal_cdf(v)).abs()))
        .fold(0.0, f64::max);
    assert!(ks < 1.63 / k.sqrt(), "KS {ks}");
}

#[test]
fn second_and_third_polyspectra_are_uncorrelated() {
    let plan = McPlan::new(SpectralParams::new(2, 5.0).unwrap(), 1.0, 150, 400, 5).with_design_block(40);
    let rows = plan.run(&[Kernel::Hermite(2), Kernel::Hermite(3)]).unwrap();
    let prod: Vec<f64> = rows.iter().map(|r| r[0].estimate * r[1].estimate).collect();
    let (m, v) = mean_var(&prod);
    let se = (v / prod.len() as f64).sqrt();
    assert!(m.abs() < 4.0 * se, "covariance {m} with SE {se}");
}

#[test]
fn leray_samples_load_negatively_on_the_second_chaos() {
    let plan = McPlan::new(SpectralParams::new(2, 5.0).unwrap(), 1.0, 300, 400, 8).with_design_block(40);
    let rows = plan.run(&[Kernel::Leray(0.05), Kernel::Hermite(2), Kernel::Hermite(4)]).unwrap();
    let y: Vec<f64> = rows.iter().map(|r| r[0].estimate).collect();
    let h2: Vec<f64> = rows.iter().map(|r| r[1].estimate).collect();
    let h4: Vec<f64> = rows.iter().map(|r| r[2].estimate).collect();
    let (my, _) = mean_var(&y);
    let (m2, v2) = mean_var(&h2);
    let (m4, v4) = mean_var(&h4);
    let k = y.len() as f64 - 1.0;
    let c2 = y.iter().zip(&h2).map(|(a, b)| (a - my) * (b - m2)).sum::<f64>() / k;
    let c4 = y.iter().zip(&h4).map(|(a, b)| (a - my) * (b - m4)).sum::<f64>() / k;
    // chaos components are orthogonal, so simple regressions recover the coefficients
    let b2 = c2 / v2;
    let b4 = c4 / v4;
    let want2 = -1.0 / (2.0 * (2.0 * std::f64::consts::PI).sqrt());
    assert!(b2 < 0.0 && (b2 / want2 - 1.0).abs() < 0.25, "b2 {b2} vs {want2}");
    assert!(b4 > 0.0, "b4 {b4}");
}
