use glocal::synth::*;
use glocal::RngStream;

#[test]
fn all_local_shapes() {
    let d = generate_seeded(&preset("well_separated").unwrap().with_seed(3)).unwrap();
    assert_eq!(d.dataset.group_sizes(), vec![100, 110, 115]);
    assert_eq!(d.dataset.local_dims(), vec![1, 2, 3]);
    assert_eq!(d.dataset.global_dim, 2);
    assert_eq!(d.params.global_atoms.len(), 8);
    assert_eq!(d.params.local_atoms.iter().map(Vec::len).collect::<Vec<_>>(), vec![6, 7, 5]);
    d.dataset.validate().unwrap();
}

#[test]
fn same_seed_same_dataset() {
    let spec = preset("moderate").unwrap().with_seed(42);
    assert_eq!(generate_seeded(&spec).unwrap(), generate_seeded(&spec).unwrap());
    assert_ne!(generate_seeded(&spec).unwrap(), generate_seeded(&spec.clone().with_seed(43)).unwrap());
}

#[test]
fn label_frequencies_follow_drawn_weights() {
    let mut spec = preset("well_separated").unwrap();
    spec.sizes = vec![100_000, 5, 5];
    let d = generate(&spec, &mut RngStream::new(8, 0)).unwrap();
    let mut counts = [0usize; 6];
    for &t in &d.true_local_labels[0] {
        counts[t] += 1;
    }
    for (c, p) in counts.iter().zip(&d.params.pi[0]) {
        assert!((*c as f64 / 1e5 - p).abs() < 0.01);
    }
}

#[test]
fn global_labels_compose_tables() {
    for name in ["well_separated", "no_local_group1", "one_local_informative", "one_local_noise", "hard_global"] {
        for seed in 0..4 {
            let d = generate_seeded(&preset(name).unwrap().with_seed(seed)).unwrap();
            d.dataset.validate().unwrap();
            for j in 0..3 {
                for (t, k) in d.true_local_labels[j].iter().zip(&d.true_global_labels[j]) {
                    assert_eq!(d.params.k_table[j][*t], *k);
                    assert!(*t < d.spec.local_components[j] && *k < d.spec.global_components);
                }
            }
        }
    }
}

#[test]
fn noise_preset_has_no_local_mixture() {
    let d = generate_seeded(&preset("one_local_noise").unwrap()).unwrap();
    assert!(d.params.local_atoms[0].is_empty());
    assert_eq!(d.dataset.local_dims(), vec![1, 0, 0]);
}

#[test]
fn hdp_1d_fixed_parameters() {
    let d = generate_hdp_1d(&mut RngStream::new(0, 0)).unwrap();
    let means: Vec<f64> = d.params.global_atoms.iter().map(|a| a.mean[0]).collect();
    assert_eq!(means, vec![-6.0, -2.0, 2.0, 6.0]);
    assert!(d.params.global_atoms.iter().all(|a| a.var == vec![1.0]));
    assert_eq!(d.dataset.group_sizes(), vec![100; 3]);
    assert!(d.true_global_labels[0].iter().all(|&k| k < 2));
}

#[test]
fn hdp_1d_group3_frequency() {
    let mut spec = preset("hdp_1d").unwrap();
    spec.sizes = vec![10, 10, 100_000];
    let d = generate(&spec, &mut RngStream::new(1, 0)).unwrap();
    let f = d.true_global_labels[2].iter().filter(|&&k| k == 2).count() as f64 / 1e5;
    assert!((f - 0.6).abs() < 0.01);
    assert!(d.true_global_labels[0].iter().all(|&k| k < 2));
}
