use glocal::diagnostics::*;
use glocal::Error;

#[test]
fn ari_examples() {
    assert_eq!(adjusted_rand_index(&[1, 1, 2, 2], &[2, 2, 1, 1]).unwrap(), 1.0);
    assert_eq!(adjusted_rand_index(&[1, 1, 2, 2], &[1, 2, 1, 2]).unwrap(), -0.5);
    assert_eq!(adjusted_rand_index(&[0, 0, 0], &[5, 5, 5]).unwrap(), 1.0);
    assert!(adjusted_rand_index(&[1], &[1]).is_err());
    assert!(adjusted_rand_index(&[1, 2], &[1]).is_err());
}

#[test]
fn acf_lag_zero_and_constant() {
    let x = [1.0, 3.0, 2.0, 5.0, 4.0];
    assert_eq!(autocorrelation(&x, 2).unwrap()[0], 1.0);
    assert_eq!(autocorrelation(&[2.0; 8], 1), Err(Error::ConstantSeries));
    assert!(autocorrelation(&x, 5).is_err());
}

#[test]
fn rhat_needs_two_chains() {
    let a = [0.0, 1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 7.0, 8.0, 9.0];
    assert_eq!(gelman_rubin(&[&a]), Err(Error::TooFewChains(1)));
    assert!((gelman_rubin(&[&a, &a]).unwrap() - ((9.0f64 / 10.0).sqrt())).abs() < 1e-12);
}

#[test]
fn mise_zero_on_identity() {
    let g = [0.0, 0.5, 1.0];
    assert_eq!(mise(&[1.0, 2.0, 3.0], &[1.0, 2.0, 3.0], &g).unwrap(), 0.0);
    assert!(mise(&[1.0], &[1.0, 2.0], &g).is_err());
}
