use glocal::model::log_posterior_terms;
use glocal::{log_posterior, Atom, GroupData, GroupedDataset, Hyperparams, Mode, NigPrior, Observation, SamplerState, Truncation};
use proptest::prelude::*;
use statrs::distribution::{Continuous, Gamma, InverseGamma, Normal};
use statrs::function::gamma::ln_gamma;

fn hyper() -> Hyperparams {
    Hyperparams {
        alpha_shape: 2.0,
        alpha_rate: 1.0,
        gamma_shape: 3.0,
        gamma_rate: 2.0,
        nig_global: NigPrior::new(0.0, 1.0, 2.0, 1.0).unwrap(),
        nig_local: NigPrior::new(0.5, 2.0, 3.0, 1.5).unwrap(),
    }
}

fn tiny() -> (GroupedDataset, SamplerState) {
    let data = GroupedDataset::new(
        1,
        vec![GroupData::new(
            "g",
            1,
            vec![Observation::new(vec![0.5], vec![1.0]), Observation::new(vec![-1.0], vec![2.0])],
        )],
    );
    let state = SamplerState {
        log_beta: vec![0.3f64.ln(), 0.7f64.ln()],
        log_pi: vec![vec![0.6f64.ln(), 0.4f64.ln()]],
        phi: vec![Atom::new(vec![0.0], 1.0), Atom::new(vec![2.0], 0.5)],
        psi: vec![vec![Atom::new(vec![0.2], 2.0), Atom::new(vec![-1.0], 0.8)]],
        t_labels: vec![vec![0, 1]],
        k_table: vec![vec![1, 0]],
        alpha: 1.5,
        gamma: 2.0,
    };
    (data, state)
}

fn npdf(x: f64, m: f64, v: f64) -> f64 {
    Normal::new(m, v.sqrt()).unwrap().ln_pdf(x)
}

fn nig(mu: f64, var: f64, m0: f64, l0: f64, a: f64, b: f64) -> f64 {
    npdf(mu, m0, var / l0) + InverseGamma::new(a, b).unwrap().ln_pdf(var)
}

fn dir2(p: [f64; 2], conc: f64) -> f64 {
    let a = conc / 2.0;
    ln_gamma(conc) - 2.0 * ln_gamma(a) + (a - 1.0) * (p[0].ln() + p[1].ln())
}

/// Augmented likelihood and joint prior of the tiny state, term by term.
fn scripted() -> (f64, f64) {
    // observation 1: t = 1, k_1 = 2; observation 2: t = 2, k_2 = 1
    let local = npdf(0.5, 0.2, 2.0) + npdf(-1.0, -1.0, 0.8);
    let global = npdf(1.0, 2.0, 0.5) + npdf(2.0, 0.0, 1.0);
    let assign = 0.6f64.ln() + 0.4f64.ln() + 0.7f64.ln() + 0.3f64.ln();
    let atoms = nig(0.0, 1.0, 0.0, 1.0, 2.0, 1.0)
        + nig(2.0, 0.5, 0.0, 1.0, 2.0, 1.0)
        + nig(0.2, 2.0, 0.5, 2.0, 3.0, 1.5)
        + nig(-1.0, 0.8, 0.5, 2.0, 3.0, 1.5);
    let weights = dir2([0.6, 0.4], 1.5) + dir2([0.3, 0.7], 2.0);
    let conc = Gamma::new(2.0, 1.0).unwrap().ln_pdf(1.5) + Gamma::new(3.0, 2.0).unwrap().ln_pdf(2.0);
    let local_prior = nig(0.2, 2.0, 0.5, 2.0, 3.0, 1.5) + nig(-1.0, 0.8, 0.5, 2.0, 3.0, 1.5);
    let total = local + global + assign + atoms + weights + conc;
    (total, total - local - local_prior)
}

#[test]
fn tiny_state_matches_scripted_evaluation() {
    let (data, state) = tiny();
    let trunc = Truncation::new(2, 2).unwrap();
    let (want, _) = scripted();
    let got = log_posterior(&state, &data, &hyper(), trunc, Mode::Glocal).unwrap();
    assert!((got - want).abs() < 1e-10, "{got} vs {want}");
}

#[test]
fn hdp_value_drops_local_terms() {
    let (data, state) = tiny();
    let trunc = Truncation::new(2, 2).unwrap();
    let (_, want) = scripted();
    let mut hdp_state = state.clone();
    hdp_state.psi = vec![vec![]];
    let got = log_posterior(&hdp_state, &data, &hyper(), trunc, Mode::Hdp).unwrap();
    assert!((got - want).abs() < 1e-10);
    let terms = log_posterior_terms(&state, &data, &hyper(), trunc, Mode::Glocal).unwrap();
    let reduced = terms.total() - terms.local_likelihood - terms.local_atom_prior;
    assert!((got - reduced).abs() < 1e-10);
}

#[test]
fn duplicated_observation_adds_its_own_terms() {
    let (mut data, mut state) = tiny();
    let trunc = Truncation::new(2, 2).unwrap();
    let h = hyper();
    let before = log_posterior(&state, &data, &h, trunc, Mode::Glocal).unwrap();
    let dup = data.groups[0].observations[1].clone();
    data.groups[0].observations.push(dup);
    state.t_labels[0].push(1);
    let after = log_posterior(&state, &data, &h, trunc, Mode::Glocal).unwrap();
    let added = npdf(-1.0, -1.0, 0.8) + npdf(2.0, 0.0, 1.0) + 0.4f64.ln();
    assert!((after - before - added).abs() < 1e-10);
}

#[test]
fn inconsistent_state_is_rejected() {
    let (data, mut state) = tiny();
    state.t_labels[0].pop();
    assert!(log_posterior(&state, &data, &hyper(), Truncation::new(2, 2).unwrap(), Mode::Glocal).is_err());
}

proptest! {
    #[test]
    fn permuting_rows_with_labels_keeps_value(
        rows in prop::collection::vec((-5.0f64..5.0, -5.0f64..5.0, 0usize..3), 2..8),
        seed in any::<u64>(),
    ) {
        let obs: Vec<Observation> = rows.iter().map(|&(l, g, _)| Observation::new(vec![l], vec![g])).collect();
        let labels: Vec<usize> = rows.iter().map(|r| r.2).collect();
        let data = GroupedDataset::new(1, vec![GroupData::new("g", 1, obs.clone())]);
        let trunc = Truncation::new(2, 3).unwrap();
        let state = SamplerState {
            log_beta: vec![0.4f64.ln(), 0.6f64.ln()],
            log_pi: vec![vec![0.2f64.ln(), 0.3f64.ln(), 0.5f64.ln()]],
            phi: vec![Atom::new(vec![-1.0], 1.5), Atom::new(vec![1.0], 0.7)],
            psi: vec![vec![Atom::new(vec![0.0], 1.0), Atom::new(vec![2.0], 0.3), Atom::new(vec![-2.0], 3.0)]],
            t_labels: vec![labels.clone()],
            k_table: vec![vec![0, 1, 1]],
            alpha: 0.7,
            gamma: 1.3,
        };
        let h = hyper();
        let base = log_posterior(&state, &data, &h, trunc, Mode::Glocal).unwrap();
        let mut order: Vec<usize> = (0..obs.len()).collect();
        order.rotate_left((seed as usize) % obs.len());
        order.swap(0, obs.len() - 1);
        let pdata = GroupedDataset::new(1, vec![GroupData::new("g", 1, order.iter().map(|&i| obs[i].clone()).collect())]);
        let mut pstate = state.clone();
        pstate.t_labels[0] = order.iter().map(|&i| labels[i]).collect();
        let permuted = log_posterior(&pstate, &pdata, &h, trunc, Mode::Glocal).unwrap();
        prop_assert!((base - permuted).abs() < 1e-9 * base.abs().max(1.0));
    }
}
