use hyperwave_core::hypgeo::{random_direction, random_isometry, sample_uniform_ball};
use hyperwave_core::rng::stream;
use hyperwave_core::waves::{covariance_matrix, superposition_covariance};
use hyperwave_core::{HyperPoint, SpectralParams};
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn covariance_law_is_isometry_invariant(n in 2usize..4, alpha in 0.5..20.0f64, seed in any::<u64>()) {
        let p = SpectralParams::new(n, alpha).unwrap();
        let mut rng = stream(seed, 0);
        let pts = sample_uniform_ball(n, 2.0, 12, &mut rng).unwrap();
        let g = random_isometry(n, &mut rng);
        let moved: Vec<HyperPoint> = pts.iter().map(|x| g.apply(x)).collect();
        let (a, b) = (covariance_matrix(&pts, &p).unwrap(), covariance_matrix(&moved, &p).unwrap());
        for (u, v) in a.as_slice().iter().zip(b.as_slice()) {
            prop_assert!((u - v).abs() < 1e-8);
        }
    }
}

#[test]
fn superposition_covariance_converges_like_inverse_root() {
    let p = SpectralParams::new(2, 5.0).unwrap();
    let mut rng = stream(31, 0);
    let pts = sample_uniform_ball(2, 1.0, 15, &mut rng).unwrap();
    let exact = covariance_matrix(&pts, &p).unwrap();
    let mut grid = Vec::new();
    for waves in [64usize, 256, 1024] {
        let mut dev = 0.0;
        let draws = 12;
        for _ in 0..draws {
            let dirs: Vec<Vec<f64>> = (0..waves).map(|_| random_direction(2, &mut rng)).collect();
            let approx = superposition_covariance(&pts, &p, &dirs).unwrap();
            dev += exact.as_slice().iter().zip(approx.as_slice()).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        }
        grid.push((waves as f64, dev / draws as f64));
    }
    assert!(grid.windows(2).all(|w| w[1].1 < w[0].1), "{grid:?}");
    let (first, last) = (grid[0], grid[2]);
    let slope = (last.1 / first.1).ln() / (last.0 / first.0).ln();
    assert!((-0.7..=-0.3).contains(&slope), "slope {slope}");
}
