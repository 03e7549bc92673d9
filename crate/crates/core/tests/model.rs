use approx::assert_abs_diff_eq;
use glocal::model::*;
use glocal::Error;

fn two_groups() -> GroupedDataset {
    GroupedDataset::new(
        2,
        vec![
            GroupData::new(
                "a",
                1,
                vec![
                    Observation::new(vec![0.5], vec![1.0, 2.0]),
                    Observation::new(vec![-0.5], vec![0.0, 1.0]),
                ],
            ),
            GroupData::new(
                "b",
                0,
                vec![
                    Observation::new(vec![], vec![1.0, 1.0]),
                    Observation::new(vec![], vec![3.0, 1.0]),
                    Observation::new(vec![], vec![2.0, 2.0]),
                ],
            ),
        ],
    )
}

#[test]
fn valid_dataset_passes() {
    let data = two_groups();
    assert_eq!(validate_dataset(&data).unwrap(), &data);
}

#[test]
fn nan_is_reported_with_position() {
    let mut data = two_groups();
    data.groups[1].observations[2].global[0] = f64::NAN;
    let err = validate_dataset(&data).unwrap_err();
    assert_eq!(
        err,
        Error::NonFinite {
            group: 2,
            row: 3,
            what: "global",
            column: 1
        }
    );
    assert!(err.to_string().contains("group 2, row 3"));
}

#[test]
fn short_local_row_is_a_dimension_error() {
    let mut data = two_groups();
    data.groups[0].local_dim = 2;
    match validate_dataset(&data).unwrap_err() {
        Error::RowDimension {
            group: 1,
            row: 1,
            found: 1,
            expected: 2,
            ..
        } => {}
        e => panic!("unexpected {e:?}"),
    }
}

#[test]
fn empty_group_rejected() {
    let mut data = two_groups();
    data.groups[1].observations.clear();
    assert_eq!(validate_dataset(&data), Err(Error::EmptyGroup { group: 2 }));
}

#[test]
fn truncation_bounds() {
    assert!(Truncation::new(3, 3).is_ok());
    assert!(Truncation::new(0, 3).is_err());
    assert!(Truncation::new(4, 3).is_err());
}

#[test]
fn standard_normal_at_mode() {
    let v = log_density_global(&[0.0], &Atom::new(vec![0.0], 1.0)).unwrap();
    assert_abs_diff_eq!(v, -0.918_938_533_204_672_7, epsilon = 1e-12);
    let v = log_density_local(&[2.0], Some(&Atom::new(vec![2.0], 1.0)), 1).unwrap();
    assert_abs_diff_eq!(v, -0.918_938_533_204_672_7, epsilon = 1e-12);
}

// Per-coordinate oracle: the isotropic density factorizes into 1-d normals.
fn normal_1d(x: f64, m: f64, v: f64) -> f64 {
    (-(x - m).powi(2) / (2.0 * v)).exp() / (2.0 * std::f64::consts::PI * v).sqrt()
}

#[test]
fn isotropic_density_factorizes() {
    let got = log_density_global(&[1.0, 1.0], &Atom::new(vec![0.0, 0.0], 2.0)).unwrap();
    let want = normal_1d(1.0, 0.0, 2.0).ln() * 2.0;
    assert_abs_diff_eq!(got, want, epsilon = 1e-12);

    let x = [0.3, -1.2, 2.5];
    let mu = [0.1, 0.4, 1.0];
    let got = log_density_local(&x, Some(&Atom::new(mu.to_vec(), 0.7)), 3).unwrap();
    let want: f64 = x.iter().zip(&mu).map(|(a, m)| normal_1d(*a, *m, 0.7).ln()).sum();
    assert_abs_diff_eq!(got, want, epsilon = 1e-12);
}

#[test]
fn local_density_is_one_without_local_variables() {
    assert_eq!(log_density_local(&[], None, 0).unwrap(), 0.0);
    let a = Atom::new(vec![5.0], 0.1);
    assert_eq!(log_density_local(&[], Some(&a), 0).unwrap(), 0.0);
}

#[test]
fn density_argument_errors() {
    let a = Atom::new(vec![0.0, 0.0], 1.0);
    assert!(log_density_global(&[0.0], &a).is_err());
    assert!(log_density_global(&[0.0], &Atom::new(vec![0.0], 0.0)).is_err());
    assert!(log_density_local(&[0.0], Some(&a), 2).is_err());
}

#[test]
fn global_density_integrates_to_one() {
    let atom = Atom::new(vec![0.7], 1.3);
    let (lo, hi, n) = (-20.0, 20.0, 40_001);
    let h = (hi - lo) / (n - 1) as f64;
    let mut total = 0.0;
    for i in 0..n {
        let x = lo + h * i as f64;
        let w = if i == 0 || i == n - 1 { 0.5 } else { 1.0 };
        total += w * log_density_global(&[x], &atom).unwrap().exp();
    }
    assert!((total * h - 1.0).abs() < 1e-4);
}

proptest::proptest! {
    #[test]
    fn global_density_is_radially_symmetric(
        mu in proptest::collection::vec(-5.0f64..5.0, 3),
        d in proptest::collection::vec(-3.0f64..3.0, 3),
        var in 0.01f64..10.0,
    ) {
        let atom = Atom::new(mu.clone(), var);
        let plus: Vec<f64> = mu.iter().zip(&d).map(|(m, d)| m + d).collect();
        let minus: Vec<f64> = mu.iter().zip(&d).map(|(m, d)| m - d).collect();
        let a = log_density_global(&plus, &atom).unwrap();
        let b = log_density_global(&minus, &atom).unwrap();
        proptest::prop_assert!((a - b).abs() < 1e-9);
    }
}
