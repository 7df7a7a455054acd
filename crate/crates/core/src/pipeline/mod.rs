//! End-to-end packing pipelines.
//!
//! [`pack_pseudo`] and [`pack_random`] share one flow: label the host edges
//! against random layouts, decompose every super-edge of every `Ĝ_i` into
//! perfect matchings, and zip the `j`-th matchings of a blow-up's super-edges
//! into its `j`-th `T`-factor. They differ only in the matching-count target
//! reported for audit. [`bootstrap`] packs a complete quotient graph first and
//! lifts its factors through the bipartite pairs of the host.

mod bootstrap;
mod feasibility;

use num_rational::Ratio;
use rayon::prelude::*;
use serde::Serialize;

use crate::blowup::ratio_to_f64;
use crate::error::{check_epsilon, Error, Result};
use crate::graph::Graph;
use crate::labeling::{kappa_report, run_procedure1, KappaSummary, LabeledFamily, LabelingConfig};
use crate::matching::{fk_pseudo_target, fk_random_delta, pack_bipartite};
use crate::rng::{self, tag};
use crate::tree::{assemble_copies, check_edge_disjoint, verify_tfactor, TFactor, TreeTemplate};

pub use bootstrap::{
    pack_bootstrap, plan_bootstrap, BootstrapPlan, BootstrapSummary, LossBreakdown,
    OuterFactorPacking,
};
pub use feasibility::{check_feasibility, smallest_tau, Condition, FeasibilityReport};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PipelineConfig {
    pub epsilon: f64,
    pub seed: u64,
    pub scale: f64,
    pub r_override: Option<usize>,
    /// Ratio at which an asymptotic `>>` condition is reported as met.
    pub slack: f64,
}

impl PipelineConfig {
    pub fn new(epsilon: f64, seed: u64) -> Self {
        PipelineConfig {
            epsilon,
            seed,
            scale: 1.0,
            r_override: None,
            slack: 1.0,
        }
    }

    pub fn with_r(mut self, r: usize) -> Self {
        self.r_override = Some(r);
        self
    }

    pub fn with_scale(mut self, scale: f64) -> Self {
        self.scale = scale;
        self
    }

    pub fn with_slack(mut self, slack: f64) -> Self {
        self.slack = slack;
        self
    }

    fn labeling(&self) -> LabelingConfig {
        LabelingConfig {
            epsilon: self.epsilon,
            seed: self.seed,
            scale: self.scale,
            r_override: self.r_override,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PipelineKind {
    Pseudo,
    Random,
    Bootstrap,
}

/// Matching-family sizes of one `Ĝ_i` and the factors zipped from them.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BlowupPacking {
    pub index: usize,
    pub sigma: Vec<usize>,
    pub hat_edges: usize,
    /// One family size per super-edge, in template edge order.
    pub matching_counts: Vec<usize>,
    pub factors: usize,
    /// `factors / target`, absent when the target is zero.
    pub target_ratio: Option<f64>,
}

/// The family size the matching lemma guarantees per super-edge, evaluated
/// for this run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MatchingTarget {
    /// `"pseudo"`: `(1 - eta^(1/3)) d nu` with `eta = 7 eps`, `d = p / kappa`.
    /// `"random"`: `(1 - delta) q nu` with `q = p / ((1 + eps) kappa)`.
    pub rule: &'static str,
    /// Appearance count used as `kappa`: `r q_cross` for the `r` used.
    pub kappa: f64,
    pub density: f64,
    /// `eta` for the pseudo rule, `delta` for the random one.
    pub loss: f64,
    pub vacuous: bool,
    pub target: f64,
    pub min_family: usize,
    pub ratio: Option<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct PackingResult {
    pub kind: PipelineKind,
    pub n: usize,
    pub t: usize,
    #[serde(skip)]
    pub factors: Vec<TFactor>,
    pub covered_edges: usize,
    pub total_edges: usize,
    #[serde(skip)]
    pub coverage: Ratio<u64>,
    pub per_blowup: Vec<BlowupPacking>,
    pub kappa: Option<KappaSummary>,
    pub target: Option<MatchingTarget>,
    pub feasibility: FeasibilityReport,
    pub loss_breakdown: Option<LossBreakdown>,
    pub bootstrap: Option<BootstrapSummary>,
    pub diagnostics: Vec<String>,
}

impl PackingResult {
    pub fn coverage_f64(&self) -> f64 {
        ratio_to_f64(self.coverage)
    }
}

pub(crate) fn coverage_ratio(covered: usize, total: usize) -> Ratio<u64> {
    if total == 0 {
        Ratio::from_integer(0)
    } else {
        Ratio::new(covered as u64, total as u64)
    }
}

/// Packing pipeline for pseudo-random hosts.
pub fn pack_pseudo(
    g: &Graph,
    template: &TreeTemplate,
    cfg: &PipelineConfig,
) -> Result<PackingResult> {
    let fam = run_procedure1(g, template, &cfg.labeling())?;
    pack_family(g, template, &fam, cfg, PipelineKind::Pseudo)
}

/// Same flow as [`pack_pseudo`], reporting the random-pair target.
pub fn pack_random(
    g: &Graph,
    template: &TreeTemplate,
    cfg: &PipelineConfig,
) -> Result<PackingResult> {
    let fam = run_procedure1(g, template, &cfg.labeling())?;
    pack_family(g, template, &fam, cfg, PipelineKind::Random)
}

/// Packs an already labeled family (e.g. built from fixed layouts).
pub fn pack_family(
    g: &Graph,
    template: &TreeTemplate,
    fam: &LabeledFamily,
    cfg: &PipelineConfig,
    kind: PipelineKind,
) -> Result<PackingResult> {
    check_epsilon(cfg.epsilon)?;
    let (n, t) = (g.n(), template.t());
    let per_edge = template.edges().len();

    let packed: Vec<(Vec<TFactor>, BlowupPacking)> = fam
        .blowups
        .par_iter()
        .zip(&fam.hat_graphs)
        .enumerate()
        .map(|(i, (blowup, hat))| {
            let layout = &blowup.layout;
            let parts: Vec<&[usize]> = (0..t).map(|k| layout.part(k)).collect();
            let mut families = Vec::with_capacity(per_edge);
            for (k, &(a, b)) in template.edges().iter().enumerate() {
                let local: Vec<(usize, usize)> = hat
                    .iter()
                    .filter_map(|&(u, v)| {
                        let (pu, pv) = (layout.part_of(u), layout.part_of(v));
                        if (pu, pv) == (a, b) {
                            Some((layout.position(u), layout.position(v)))
                        } else if (pu, pv) == (b, a) {
                            Some((layout.position(v), layout.position(u)))
                        } else {
                            None
                        }
                    })
                    .collect();
                let mut rng = rng::stream(cfg.seed, tag::MATCH, (i * per_edge + k) as u64);
                families.push(pack_bipartite(layout.nu(), &local, &mut rng)?);
            }
            let count = families.iter().map(|f| f.len()).min().unwrap_or(0);
            let mut factors = Vec::with_capacity(count);
            for j in 0..count {
                let matchings: Vec<Vec<(usize, usize)>> = families
                    .iter()
                    .zip(template.edges())
                    .map(|(f, &(a, b))| {
                        f.matchings[j]
                            .iter()
                            .map(|&(x, y)| (parts[a][x], parts[b][y]))
                            .collect()
                    })
                    .collect();
                factors.push(TFactor {
                    copies: assemble_copies(&parts, n, template, &matchings)?,
                });
            }
            Ok((
                factors,
                BlowupPacking {
                    index: i,
                    sigma: layout.sigma().to_vec(),
                    hat_edges: hat.len(),
                    matching_counts: families.iter().map(|f| f.len()).collect(),
                    factors: count,
                    target_ratio: None,
                },
            ))
        })
        .collect::<Result<_>>()?;

    let (factor_lists, mut per_blowup): (Vec<Vec<TFactor>>, Vec<BlowupPacking>) =
        packed.into_iter().unzip();
    let factors: Vec<TFactor> = factor_lists.into_iter().flatten().collect();
    audit_factors(g, template, &factors)?;

    let p_hat = g.density();
    let nu = n / t;
    let kappa_eff = fam.r as f64 * ratio_to_f64(fam.q);
    let min_family = per_blowup
        .iter()
        .flat_map(|b| b.matching_counts.iter().copied())
        .min()
        .unwrap_or(0);
    let target = (kappa_eff > 0.0).then(|| {
        let (rule, density, loss, vacuous, target) = match kind {
            PipelineKind::Random => {
                let q = p_hat / ((1.0 + cfg.epsilon) * kappa_eff);
                let delta = fk_random_delta(nu as f64, q);
                (
                    "random",
                    q,
                    delta.value,
                    delta.vacuous,
                    (1.0 - delta.value) * q * nu as f64,
                )
            }
            _ => {
                let eta = 7.0 * cfg.epsilon;
                let d = p_hat / kappa_eff;
                (
                    "pseudo",
                    d,
                    eta,
                    eta >= 1.0,
                    fk_pseudo_target(eta, d, nu) as f64,
                )
            }
        };
        MatchingTarget {
            rule,
            kappa: kappa_eff,
            density,
            loss,
            vacuous,
            target,
            min_family,
            ratio: (target > 0.0).then(|| min_family as f64 / target),
        }
    });
    if let Some(tg) = target.as_ref().filter(|tg| tg.target > 0.0) {
        for b in &mut per_blowup {
            b.target_ratio = Some(b.factors as f64 / tg.target);
        }
    }

    let feasibility = check_feasibility(n, p_hat, cfg.epsilon, cfg.slack);
    let mut diagnostics = Vec::new();
    if !feasibility.all_pass() {
        diagnostics.push(format!(
            "asymptotic side conditions not met at slack {} (see feasibility)",
            cfg.slack
        ));
    }
    if fam.r < fam.r_full {
        diagnostics.push(format!(
            "using r = {} layouts, full count is {}",
            fam.r, fam.r_full
        ));
    }

    let covered_edges: usize = factors.iter().map(TFactor::edge_count).sum();
    let total_edges = g.edge_count();
    Ok(PackingResult {
        kind,
        n,
        t,
        factors,
        covered_edges,
        total_edges,
        coverage: coverage_ratio(covered_edges, total_edges),
        per_blowup,
        kappa: Some(kappa_report(fam, cfg.epsilon)),
        target,
        feasibility,
        loss_breakdown: None,
        bootstrap: None,
        diagnostics,
    })
}

/// Every factor must verify against `g` and no edge may be used twice.
pub(crate) fn audit_factors(g: &Graph, template: &TreeTemplate, factors: &[TFactor]) -> Result<()> {
    factors
        .par_iter()
        .try_for_each(|f| verify_tfactor(g, template, f))
        .map_err(Error::Unverified)?;
    check_edge_disjoint(factors).map_err(Error::Unverified)
}

/// Exact covered fraction of `g`'s edges, after re-verifying every factor.
pub fn coverage_of(
    result: &PackingResult,
    g: &Graph,
    template: &TreeTemplate,
) -> Result<Ratio<u64>> {
    audit_factors(g, template, &result.factors)?;
    let covered: usize = result.factors.iter().map(TFactor::edge_count).sum();
    Ok(coverage_ratio(covered, g.edge_count()))
}
