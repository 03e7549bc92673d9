use glocal::ChainConfig;

#[test]
fn retention_arithmetic() {
    let c = ChainConfig::new(100, 30, 7).unwrap();
    assert_eq!(c.retained(), 10);
    assert_eq!((1..=100).filter(|&i| c.keeps(i)).count(), 10);
    assert!(ChainConfig::new(10, 10, 1).is_err());
    assert!(ChainConfig::new(10, 5, 6).is_err());
    assert!(ChainConfig::new(10, 0, 0).is_err());
}

#[test]
fn default_keeps_about_a_thousand() {
    let c = ChainConfig::with_iterations(50_000);
    assert_eq!(c.burn_in, 12_500);
    assert!((1000..1100).contains(&c.retained()));
    assert_eq!(ChainConfig::with_iterations(400).retained(), 300);
}
