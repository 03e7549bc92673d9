use glocal::summary::*;
use glocal::synth::{generate, preset};
use glocal::{run_chain, Atom, ChainConfig, Hyperparams, Mode, RngStream, Truncation};

fn draw(t: Vec<Vec<usize>>, k: Vec<Vec<usize>>, params: Option<DrawParams>) -> Draw {
    Draw {
        iteration: 1,
        t_labels: t,
        k_table: k,
        alpha: 1.0,
        gamma: 1.0,
        log_posterior: 0.0,
        params,
    }
}

fn draws(list: Vec<Draw>, sizes: Vec<usize>, local_dims: Vec<usize>, l: usize, t: usize) -> PosteriorDraws {
    PosteriorDraws {
        mode: Mode::Glocal,
        truncation: Truncation::new(l, t).unwrap(),
        group_sizes: sizes,
        local_dims,
        draws: list,
        trace: vec![],
    }
}

#[test]
fn constant_local_labels_give_one_local_cluster() {
    let list = (0..5).map(|b| draw(vec![vec![1, 1, 1]], vec![vec![0, b % 2]], None)).collect();
    let r = summarize(&draws(list, vec![3], vec![1], 2, 2)).unwrap();
    let local = r.local[0].as_ref().unwrap();
    assert_eq!(local.n_clusters, 1);
    assert_eq!(local.labels, vec![1, 1, 1]);
}

#[test]
fn reported_global_count_is_distinct_labels_of_chosen_draw() {
    let list = vec![
        draw(vec![vec![0, 1], vec![0, 0]], vec![vec![2, 3], vec![3]], None),
        draw(vec![vec![0, 0], vec![0, 0]], vec![vec![2, 3], vec![2]], None),
        draw(vec![vec![0, 1], vec![0, 0]], vec![vec![2, 3], vec![3]], None),
    ];
    let d = draws(list, vec![2, 2], vec![0, 1], 4, 4);
    let r = summarize(&d).unwrap();
    let chosen = derive_global_labels(&d.draws[r.chosen_draw_index]);
    assert_eq!(r.global_labels, chosen);
    assert_eq!(r.n_global_clusters, count_distinct(&chosen));
    assert_eq!(r.group_global_labels(1), &chosen[2..]);
    assert!(r.local[0].is_none());
    assert!(r.local[1].is_some());
}

#[test]
fn two_draw_density_is_mean_of_draw_densities() {
    let make = |w: f64, m: f64| {
        draw(
            vec![vec![0]],
            vec![vec![0, 1]],
            Some(DrawParams {
                log_beta: vec![0.5f64.ln(); 2],
                log_pi: vec![vec![w.ln(), (1.0 - w).ln()]],
                phi: vec![Atom::new(vec![m], 1.0), Atom::new(vec![3.0], 0.5)],
                psi: vec![vec![]],
            }),
        )
    };
    let grid = linspace(-4.0, 6.0, 57);
    let one = posterior_density_grid(&draws(vec![make(0.3, -1.0)], vec![1], vec![0], 2, 2), 0, &grid).unwrap();
    let two = posterior_density_grid(&draws(vec![make(0.8, 0.5)], vec![1], vec![0], 2, 2), 0, &grid).unwrap();
    let both = posterior_density_grid(&draws(vec![make(0.3, -1.0), make(0.8, 0.5)], vec![1], vec![0], 2, 2), 0, &grid).unwrap();
    for (i, &y) in grid.iter().enumerate() {
        let direct = |w: f64, m: f64| {
            let n = |x: f64, mu: f64, v: f64| (-(x - mu).powi(2) / (2.0 * v)).exp() / (2.0 * std::f64::consts::PI * v).sqrt();
            w * n(y, m, 1.0) + (1.0 - w) * n(y, 3.0, 0.5)
        };
        assert!((one[i] - direct(0.3, -1.0)).abs() < 1e-12);
        assert!((both[i] - 0.5 * (one[i] + two[i])).abs() < 1e-12);
    }
}

#[test]
fn fitted_summary_respects_truncation_and_blocks() {
    let mut spec = preset("well_separated").unwrap();
    spec.sizes = vec![30, 30, 30];
    let data = generate(&spec, &mut RngStream::new(1, 0)).unwrap().dataset;
    let trunc = Truncation::new(3, 5).unwrap();
    let cfg = ChainConfig::new(300, 100, 4).unwrap();
    let d = run_chain(&data, &Hyperparams::default(), trunc, &cfg, Mode::Glocal, &mut RngStream::new(2, 0)).unwrap();
    let r = summarize(&d).unwrap();
    assert!(r.n_global_clusters <= 3);
    assert!(r.local.iter().flatten().all(|l| l.n_clusters <= 5));

    let all = coclustering_matrix(&d.global_label_sequences()).unwrap();
    let group2: Vec<Vec<usize>> = d.global_label_sequences().iter().map(|z| z[30..60].to_vec()).collect();
    assert_eq!(all.block(30..60), coclustering_matrix(&group2).unwrap());
}
