//! Seeded Monte Carlo checks of the probabilistic statements.

mod common;

use rand_distr::{Binomial, Distribution};
use tfactor::blowup::ratio_to_f64;
use tfactor::bounds::chernoff_tail;
use tfactor::graph::{generate_bipartite, generate_gnp};
use tfactor::labeling::{run_procedure1, LabelingConfig};
use tfactor::pipeline::{pack_bootstrap, plan_bootstrap, PipelineConfig};
use tfactor::tree::TreeTemplate;

use common::rng;

#[test]
fn chernoff_bound_dominates_binomial_frequency() {
    let (n, mu, eps) = (10_000u64, 5000.0, 0.05);
    let bin = Binomial::new(n, 0.5).unwrap();
    let mut r = rng(7);
    let trials = 100_000;
    let far = (0..trials)
        .filter(|_| (bin.sample(&mut r) as f64 - mu).abs() > eps * mu)
        .count();
    let bound = chernoff_tail(mu, eps);
    assert!(
        far as f64 / trials as f64 <= bound.value,
        "{far} of {trials} vs {}",
        bound.value
    );
}

#[test]
fn gnp_edge_count_concentrates() {
    let (n, p) = (500, 0.3);
    let pairs = (n * (n - 1) / 2) as f64;
    let sd = (pairs * p * (1.0 - p)).sqrt();
    for seed in 0..5 {
        let m = generate_gnp(n, p, seed).unwrap().edge_count() as f64;
        assert!((m - pairs * p).abs() < 5.0 * sd, "seed {seed}: {m}");
    }
}

#[test]
fn bipartite_edges_cross_and_concentrate() {
    let (nu, p) = (300, 0.4);
    let g = generate_bipartite(nu, p, 11).unwrap();
    assert!(g.edges().iter().all(|&(u, v)| u < nu && v >= nu));
    let pairs = (nu * nu) as f64;
    let sd = (pairs * p * (1.0 - p)).sqrt();
    assert!((g.edge_count() as f64 - pairs * p).abs() < 5.0 * sd);
}

#[test]
fn appearance_counts_average_r_times_q() {
    let g = generate_gnp(200, 0.5, 3).unwrap();
    for t in [2, 4] {
        let fam = run_procedure1(
            &g,
            &TreeTemplate::path(t).unwrap(),
            &LabelingConfig::new(0.5, 3).with_r(120),
        )
        .unwrap();
        let rq = 120.0 * ratio_to_f64(fam.q);
        let mean =
            fam.appearance_counts.iter().map(|&c| c as f64).sum::<f64>() / g.edge_count() as f64;
        assert!(
            (mean - rq).abs() < 0.03 * rq,
            "t = {t}: mean {mean} vs {rq}"
        );
    }
}

#[test]
fn bootstrap_within_part_share_is_one_over_tau() {
    let (n, tau, p) = (1200, 12, 0.2);
    let g = generate_gnp(n, p, 42).unwrap();
    let template = TreeTemplate::path(3).unwrap();
    let cfg = PipelineConfig::new(0.5, 42).with_r(1);
    let plan = plan_bootstrap(n, &template, tau, &cfg).unwrap();
    let res = pack_bootstrap(&g, &template, &plan, &cfg).unwrap();
    let loss = res.loss_breakdown.unwrap();
    // within-block pairs are (ell - 1) / (n - 1) of all pairs, about 1 / tau
    let share = loss.within_part as f64 / res.total_edges as f64;
    let expected = (n / tau - 1) as f64 / (n - 1) as f64;
    assert!(
        (share - expected).abs() <= 0.2 * expected,
        "{share} vs {expected}"
    );
}
