use glocal::diagnostics::*;
use proptest::prelude::*;
use rand::Rng;
use rand_distr::StandardNormal;

use glocal::RngStream;

fn white(n: usize, seed: u64) -> Vec<f64> {
    let mut rng = RngStream::new(seed, 0);
    (0..n).map(|_| rng.sample(StandardNormal)).collect()
}

fn ar1(n: usize, rho: f64, seed: u64) -> Vec<f64> {
    let mut rng = RngStream::new(seed, 0);
    let mut x = rng.sample::<f64, _>(StandardNormal) / (1.0 - rho * rho).sqrt();
    (0..n)
        .map(|_| {
            x = rho * x + rng.sample::<f64, _>(StandardNormal);
            x
        })
        .collect()
}

#[test]
fn white_noise_acf_and_ess() {
    let x = white(100_000, 1);
    let acf = autocorrelation(&x, 5).unwrap();
    assert_eq!(acf[0], 1.0);
    assert!(acf[1].abs() < 0.02);
    let y = white(10_000, 2);
    let ess = effective_sample_size(&y).unwrap();
    assert!((ess / 10_000.0 - 1.0).abs() < 0.1, "{ess}");
    assert!(ess <= 10_000.0);
}

#[test]
fn ar1_acf_and_ess() {
    let n = 100_000;
    let x = ar1(n, 0.9, 3);
    let acf = autocorrelation(&x, 3).unwrap();
    assert!((acf[1] - 0.9).abs() < 0.02);
    let ess = effective_sample_size(&x).unwrap();
    let want = n as f64 * 0.1 / 1.9;
    assert!((ess / want - 1.0).abs() < 0.15, "{ess} vs {want}");
}

#[test]
fn ess_of_constant_series_is_an_error() {
    assert!(effective_sample_size(&[1.0; 50]).is_err());
}

#[test]
fn rhat_examples() {
    let chains: Vec<Vec<f64>> = (0..3).map(|c| white(10_000, 10 + c)).collect();
    let refs: Vec<&[f64]> = chains.iter().map(|c| c.as_slice()).collect();
    assert!(gelman_rubin(&refs).unwrap() < 1.01);
    let mut shifted = chains.clone();
    shifted[2].iter_mut().for_each(|x| *x += 5.0);
    let refs: Vec<&[f64]> = shifted.iter().map(|c| c.as_slice()).collect();
    assert!(gelman_rubin(&refs).unwrap() > 1.1);
    assert!(gelman_rubin(&refs[..1]).is_err());
}

#[test]
fn mise_of_shifted_normal_matches_closed_form() {
    let grid: Vec<f64> = (0..100).map(|i| -6.0 + 12.0 * i as f64 / 99.0).collect();
    let pdf = |x: f64, m: f64| (-(x - m).powi(2) / 2.0).exp() / (2.0 * std::f64::consts::PI).sqrt();
    let truth: Vec<f64> = grid.iter().map(|&x| pdf(x, 0.0)).collect();
    let est: Vec<f64> = grid.iter().map(|&x| pdf(x, 0.1)).collect();
    // integral of (phi(x) - phi(x - d))^2 is (1 - exp(-d^2 / 4)) / sqrt(pi)
    let want = (1.0 - (-0.0025f64).exp()) / std::f64::consts::PI.sqrt();
    assert!((mise(&est, &truth, &grid).unwrap() - want).abs() < 1e-6);
    assert_eq!(mise(&truth, &truth, &grid).unwrap(), 0.0);
}

proptest! {
    #[test]
    fn ari_is_symmetric_and_relabel_invariant(
        a in prop::collection::vec(0usize..4, 2..30),
        seed in any::<u64>(),
    ) {
        let mut rng = RngStream::new(seed, 0);
        let b: Vec<usize> = a.iter().map(|_| rng.random_range(0..3)).collect();
        let ab = adjusted_rand_index(&a, &b).unwrap();
        prop_assert!((ab - adjusted_rand_index(&b, &a).unwrap()).abs() < 1e-12);
        let relabeled: Vec<usize> = a.iter().map(|x| 10 - x).collect();
        prop_assert!((ab - adjusted_rand_index(&relabeled, &b).unwrap()).abs() < 1e-12);
        prop_assert!((adjusted_rand_index(&a, &relabeled).unwrap() - 1.0).abs() < 1e-12);
        prop_assert!((-1.0..=1.0 + 1e-12).contains(&ab));
    }

    #[test]
    fn ess_and_rhat_are_affine_invariant(scale in 0.01f64..100.0, shift in -50.0f64..50.0, seed in any::<u64>()) {
        let x = ar1(500, 0.5, seed);
        let y: Vec<f64> = x.iter().map(|v| scale * v + shift).collect();
        let (ex, ey) = (effective_sample_size(&x).unwrap(), effective_sample_size(&y).unwrap());
        prop_assert!((ex - ey).abs() < 1e-6 * ex);
        let x2 = ar1(500, 0.5, seed ^ 1);
        let y2: Vec<f64> = x2.iter().map(|v| scale * v + shift).collect();
        let rx = gelman_rubin(&[&x, &x2]).unwrap();
        let ry = gelman_rubin(&[&y, &y2]).unwrap();
        prop_assert!((rx - ry).abs() < 1e-9);
    }

    #[test]
    fn mise_is_nonnegative(e in prop::collection::vec(-1.0f64..1.0, 5), t in prop::collection::vec(-1.0f64..1.0, 5)) {
        let grid = [0.0, 0.25, 0.5, 0.75, 1.0];
        let m = mise(&e, &t, &grid).unwrap();
        prop_assert!(m >= 0.0);
        prop_assert_eq!(m == 0.0, e == t);
    }
}
