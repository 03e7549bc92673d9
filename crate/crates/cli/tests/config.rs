use glocal::Hyperparams;
use glocal::Mode;
use glocal_cli::config::*;

#[test]
fn defaults() {
    let c = RunConfig::from_toml("", &Overrides::default()).unwrap();
    assert_eq!((c.truncation.global, c.truncation.local), (20, 20));
    assert_eq!(c.hyper, Hyperparams::default());
    assert_eq!(c.chain.burn_in, 5000);
    assert_eq!(c.chain.retained(), 1000);
    assert_eq!(c.source, None);
}

#[test]
fn flags_beat_file() {
    let text = r#"
        preset = "moderate"
        seed = 5
        mode = "hdp"
        [chain]
        iterations = 400
        burn_in = 100
        thin = 3
    "#;
    let c = RunConfig::from_toml(text, &Overrides::default()).unwrap();
    assert_eq!((c.seed, c.mode), (5, Mode::Hdp));
    assert_eq!((c.chain.iterations, c.chain.burn_in, c.chain.thin), (400, 100, 3));
    let o = Overrides {
        seed: Some(9),
        mode: Some(Mode::Glocal),
        preset: Some("hard_global".into()),
        ..Overrides::default()
    };
    let c = RunConfig::from_toml(text, &o).unwrap();
    assert_eq!((c.seed, c.mode), (9, Mode::Glocal));
    assert_eq!(c.source, Some(DataSource::Preset("hard_global".into())));
}

#[test]
fn rejects_bad_files() {
    assert!(RunConfig::from_toml("bogus = 1", &Overrides::default()).is_err());
    assert!(RunConfig::from_toml("manifest = \"m.csv\"\npreset = \"x\"", &Overrides::default()).is_err());
    assert!(RunConfig::from_toml("[truncation]\nglobal = 5\nlocal = 2", &Overrides::default()).is_err());
    assert!(RunConfig::from_toml("[chain]\niterations = 10\nburn_in = 10", &Overrides::default()).is_err());
}

#[test]
fn nested_priors() {
    let text = "[priors]\nalpha_shape = 2.0\n[priors.nig_global]\nprecision = 0.01\n";
    let c = RunConfig::from_toml(text, &Overrides::default()).unwrap();
    assert_eq!(c.hyper.alpha_shape, 2.0);
    assert_eq!(c.hyper.alpha_rate, 0.1);
    assert_eq!(c.hyper.nig_global.precision, 0.01);
    assert_eq!(c.hyper.nig_global.shape, 0.1);
}
