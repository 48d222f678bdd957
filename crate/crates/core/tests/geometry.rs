use hyperwave_core::hypgeo::{
    ball_volume, distance, distance_polar, random_direction, random_isometry, sample_uniform_ball, sinh_power_integral,
    BallSampler,
};
use hyperwave_core::rng::stream;
use hyperwave_core::HyperPoint;
use proptest::prelude::*;

fn point(n: usize, r: f64, seed: u64) -> HyperPoint {
    let dir = random_direction(n, &mut stream(seed, 1));
    HyperPoint::from_polar(r, &dir)
}

proptest! {
    #[test]
    fn distance_is_a_symmetric_nonnegative_metric(n in 2usize..6, r1 in 0.0..4.0f64, r2 in 0.0..4.0f64, r3 in 0.0..4.0f64, seed in any::<u64>()) {
        let (x, y, z) = (point(n, r1, seed), point(n, r2, seed ^ 1), point(n, r3, seed ^ 2));
        let dxy = distance(&x, &y).unwrap();
        prop_assert!(dxy >= 0.0);
        prop_assert_eq!(dxy, distance(&y, &x).unwrap());
        prop_assert!(distance(&x, &x).unwrap() < 1e-7);
        let (dyz, dxz) = (distance(&y, &z).unwrap(), distance(&x, &z).unwrap());
        prop_assert!(dxz <= dxy + dyz + 1e-9);
    }

    #[test]
    fn isometries_preserve_distance(n in 2usize..5, r1 in 0.0..3.0f64, r2 in 0.0..3.0f64, seed in any::<u64>()) {
        let (x, y) = (point(n, r1, seed), point(n, r2, seed ^ 7));
        let g = random_isometry(n, &mut stream(seed, 9));
        let before = distance(&x, &y).unwrap();
        let after = distance(&g.apply(&x), &g.apply(&y)).unwrap();
        prop_assert!((before - after).abs() <= 1e-8 * (1.0 + before));
    }

    #[test]
    fn polar_distance_matches_ambient_distance(r1 in 0.0..5.0f64, r2 in 0.0..5.0f64, theta in 0.0..std::f64::consts::PI) {
        let x = HyperPoint::from_polar(r1, &[1.0, 0.0]);
        let y = HyperPoint::from_polar(r2, &[theta.cos(), theta.sin()]);
        let d = distance(&x, &y).unwrap();
        prop_assert!((distance_polar(r1, r2, theta) - d).abs() <= 1e-9 * (1.0 + d) + 1e-7);
    }

    #[test]
    fn ball_volume_increases_with_radius(n in 2usize..7, r in 0.01..5.0f64, dr in 0.001..1.0f64) {
        prop_assert!(ball_volume(n, r + dr).unwrap() > ball_volume(n, r).unwrap());
    }
}

#[test]
fn volume_closed_forms_match_quadrature() {
    use std::f64::consts::PI;
    for r in [0.3, 1.0, 2.5, 4.0] {
        let two = 2.0 * PI * sinh_power_integral(1, r);
        let three = 4.0 * PI * sinh_power_integral(2, r);
        assert!((ball_volume(2, r).unwrap() / (2.0 * PI * (r.cosh() - 1.0)) - 1.0).abs() < 1e-10);
        assert!((ball_volume(3, r).unwrap() / (PI * ((2.0 * r).sinh() - 2.0 * r)) - 1.0).abs() < 1e-10);
        assert!((two / ball_volume(2, r).unwrap() - 1.0).abs() < 1e-10);
        assert!((three / ball_volume(3, r).unwrap() - 1.0).abs() < 1e-10);
    }
}

#[test]
fn sampled_radii_pass_kolmogorov_smirnov() {
    let count = 100_000;
    for (n, radius) in [(2usize, 2.0), (3, 1.5)] {
        let sampler = BallSampler::new(n, radius).unwrap();
        let pts = sample_uniform_ball(n, radius, count, &mut stream(17, n as u64)).unwrap();
        let mut radii: Vec<f64> = pts.iter().map(HyperPoint::radius).collect();
        radii.sort_by(f64::total_cmp);
        let total = sinh_power_integral(n - 1, radius);
        let mut ks = 0.0f64;
        for (i, &r) in radii.iter().enumerate() {
            let cdf = sinh_power_integral(n - 1, r) / total;
            assert!((cdf - sampler.radial_cdf(r)).abs() < 1e-9);
            ks = ks.max((cdf - i as f64 / count as f64).abs()).max(((i + 1) as f64 / count as f64 - cdf).abs());
        }
        assert!(ks < 1.63 / (count as f64).sqrt(), "n={n}: KS {ks}");
    }
}
