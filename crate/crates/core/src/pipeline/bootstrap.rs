//! Packing through a complete quotient graph.
//!
//! The host's vertices are cut, in index order, into `tau` blocks of `ell`.
//! `K_tau` is packed with `T`-factors by the pseudo-random pipeline; every
//! quotient edge used by a quotient factor stands for the `ell x ell`
//! bipartite graph between two blocks, which is decomposed into perfect
//! matchings. Zipping the `j`-th matchings along a quotient factor gives a
//! `T`-factor of the host.

use std::collections::{BTreeMap, BTreeSet};

use rayon::prelude::*;
use serde::Serialize;

use super::{
    audit_factors, check_feasibility, coverage_ratio, pack_pseudo, smallest_tau, PackingResult,
    PipelineConfig, PipelineKind,
};
use crate::error::{check_epsilon, Error, Result};
use crate::graph::Graph;
use crate::matching::{pack_bipartite, MatchingFamily};
use crate::rng::{self, tag};
use crate::tree::{assemble_copies, TFactor, TreeTemplate};

/// Where the host edges that no factor covers went.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct LossBreakdown {
    /// Both endpoints in the same block.
    pub within_part: usize,
    /// Between two blocks whose quotient edge no quotient factor uses.
    pub uncovered_pair: usize,
    /// In a used block pair but not in any emitted factor.
    pub matching_shortfall: usize,
}

#[derive(Debug, Clone)]
pub struct BootstrapPlan {
    pub tau: usize,
    pub ell: usize,
    pub t: usize,
    pub epsilon: f64,
    /// `tau / eps^2`.
    pub c_constant: f64,
    /// `max(tau1, eps^-3)`.
    pub tau0: Option<u64>,
    /// Smallest quotient size meeting the pseudo-random side condition for
    /// `(eps^3, 1)`-regular graphs at the configured slack.
    pub tau1: Option<u64>,
    /// The `T`-factor packing of `K_tau`.
    pub kplan: PackingResult,
}

/// Packs `K_tau` with `cfg` (its own seed stream) and records the advisory
/// quotient-size thresholds.
pub fn plan_bootstrap(
    n: usize,
    template: &TreeTemplate,
    tau: usize,
    cfg: &PipelineConfig,
) -> Result<BootstrapPlan> {
    check_epsilon(cfg.epsilon)?;
    let t = template.t();
    if tau == 0 || !n.is_multiple_of(tau) {
        return Err(Error::Divisibility { n, t: tau });
    }
    if !tau.is_multiple_of(t) {
        return Err(Error::Divisibility { n: tau, t });
    }
    let outer_cfg = PipelineConfig {
        seed: rng::derive_seed(cfg.seed, tag::OUTER, 0),
        ..cfg.clone()
    };
    let kplan = pack_pseudo(&Graph::complete(tau), template, &outer_cfg)?;
    let tau1 = smallest_tau(cfg.epsilon.powi(3), cfg.slack);
    let tau0 = tau1.map(|t1| t1.max(cfg.epsilon.powi(-3).ceil() as u64));
    Ok(BootstrapPlan {
        tau,
        ell: n / tau,
        t,
        epsilon: cfg.epsilon,
        c_constant: tau as f64 / (cfg.epsilon * cfg.epsilon),
        tau0,
        tau1,
        kplan,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OuterFactorPacking {
    pub index: usize,
    /// `(block a, block b, family size)` per quotient edge of the factor.
    pub pairs: Vec<(usize, usize, usize)>,
    pub factors: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BootstrapSummary {
    pub tau: usize,
    pub ell: usize,
    pub c_constant: f64,
    pub tau0: Option<u64>,
    pub tau1: Option<u64>,
    pub outer_factors: usize,
    pub outer_covered_edges: usize,
    pub outer_total_edges: usize,
    pub per_outer_factor: Vec<OuterFactorPacking>,
}

pub fn pack_bootstrap(
    g: &Graph,
    template: &TreeTemplate,
    plan: &BootstrapPlan,
    cfg: &PipelineConfig,
) -> Result<PackingResult> {
    let (n, t, tau, ell) = (g.n(), template.t(), plan.tau, plan.ell);
    if tau * ell != n {
        return Err(Error::DimensionMismatch(format!(
            "plan covers {tau} x {ell} vertices, graph has {n}"
        )));
    }
    if plan.t != t || tau % t != 0 {
        return Err(Error::Divisibility { n: tau, t });
    }
    let blocks: Vec<Vec<usize>> = (0..tau)
        .map(|k| (k * ell..(k + 1) * ell).collect())
        .collect();
    let outer = &plan.kplan.factors;

    let mut diagnostics = Vec::new();
    if outer.is_empty() {
        diagnostics.push(format!(
            "packing K_{tau} produced no T-factors; nothing can be lifted (raise r or tau)"
        ));
    }

    // Oriented block pairs (a, b) per tree edge of every quotient copy.
    let mut wanted = BTreeSet::new();
    for f in outer {
        for c in &f.copies {
            wanted.extend(c.edges.iter().copied());
        }
    }
    let families: BTreeMap<(usize, usize), MatchingFamily> = wanted
        .into_par_iter()
        .map(|(a, b)| {
            let (base_a, base_b) = (a * ell, b * ell);
            let local: Vec<(usize, usize)> = blocks[a]
                .iter()
                .flat_map(|&u| {
                    g.neighbors(u)
                        .iter()
                        .filter(|&&v| v / ell == b)
                        .map(move |&v| (u - base_a, v - base_b))
                })
                .collect();
            let mut rng = rng::stream(cfg.seed, tag::PAIR, (a * tau + b) as u64);
            Ok(((a, b), pack_bipartite(ell, &local, &mut rng)?))
        })
        .collect::<Result<_>>()?;

    let mut factors = Vec::new();
    let mut per_outer_factor = Vec::with_capacity(outer.len());
    for (fi, f) in outer.iter().enumerate() {
        let pairs: Vec<(usize, usize, usize)> = f
            .copies
            .iter()
            .flat_map(|c| {
                c.edges
                    .iter()
                    .map(|&(a, b)| (a, b, families[&(a, b)].len()))
            })
            .collect();
        let count = pairs.iter().map(|p| p.2).min().unwrap_or(0);
        for j in 0..count {
            let mut copies = Vec::with_capacity(n / t);
            for c in &f.copies {
                let parts: Vec<&[usize]> =
                    c.vertices.iter().map(|&a| blocks[a].as_slice()).collect();
                let matchings: Vec<Vec<(usize, usize)>> = c
                    .edges
                    .iter()
                    .map(|&(a, b)| {
                        families[&(a, b)].matchings[j]
                            .iter()
                            .map(|&(x, y)| (a * ell + x, b * ell + y))
                            .collect()
                    })
                    .collect();
                copies.extend(assemble_copies(&parts, n, template, &matchings)?);
            }
            factors.push(TFactor { copies });
        }
        per_outer_factor.push(OuterFactorPacking {
            index: fi,
            pairs,
            factors: count,
        });
    }
    audit_factors(g, template, &factors)?;

    let used: BTreeSet<(usize, usize)> = families
        .keys()
        .map(|&(a, b)| (a.min(b), a.max(b)))
        .collect();
    let mut within_part = 0;
    let mut uncovered_pair = 0;
    for &(u, v) in g.edges() {
        let (a, b) = (u / ell, v / ell);
        if a == b {
            within_part += 1;
        } else if !used.contains(&(a.min(b), a.max(b))) {
            uncovered_pair += 1;
        }
    }
    let covered_edges: usize = factors.iter().map(TFactor::edge_count).sum();
    let total_edges = g.edge_count();
    let loss = LossBreakdown {
        within_part,
        uncovered_pair,
        matching_shortfall: total_edges - within_part - uncovered_pair - covered_edges,
    };

    Ok(PackingResult {
        kind: PipelineKind::Bootstrap,
        n,
        t,
        factors,
        covered_edges,
        total_edges,
        coverage: coverage_ratio(covered_edges, total_edges),
        per_blowup: Vec::new(),
        kappa: None,
        target: None,
        feasibility: check_feasibility(n, g.density(), cfg.epsilon, cfg.slack),
        loss_breakdown: Some(loss),
        bootstrap: Some(BootstrapSummary {
            tau,
            ell,
            c_constant: plan.c_constant,
            tau0: plan.tau0,
            tau1: plan.tau1,
            outer_factors: outer.len(),
            outer_covered_edges: plan.kplan.covered_edges,
            outer_total_edges: plan.kplan.total_edges,
            per_outer_factor,
        }),
        diagnostics,
    })
}
