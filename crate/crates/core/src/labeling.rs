//! Random layout families and edge labeling.
//!
//! `r` independent uniform layouts give blow-ups `G_1..G_r`. Every host edge
//! contained in at least one blow-up is labeled with a uniformly chosen index
//! among those containing it; `Ĝ_i` is the set of edges labeled `i`. The
//! `Ĝ_i` are edge-disjoint by construction.

use std::collections::BTreeMap;

use num_rational::Ratio;
use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::blowup::{
    build_blowup, crossing_probability, ratio_to_f64, BlowupGraph, PermutationLayout,
};
use crate::error::{check_epsilon, Error, Result};
use crate::graph::Graph;
use crate::rng::{self, tag};
use crate::tree::TreeTemplate;

/// Number of layouts: `ceil(scale * 30/eps^2 * t^2/(t-1) * ln n)`.
pub fn r_value(epsilon: f64, t: usize, n: usize, scale: f64) -> Result<usize> {
    check_epsilon(epsilon)?;
    if t < 2 || n < 2 || scale.is_nan() || scale <= 0.0 {
        return Err(Error::InvalidParameter(format!(
            "r_value needs t >= 2, n >= 2, scale > 0 (got t = {t}, n = {n}, scale = {scale})"
        )));
    }
    let t = t as f64;
    let r = scale * 30.0 / (epsilon * epsilon) * (t * t / (t - 1.0)) * (n as f64).ln();
    Ok(r.ceil() as usize)
}

/// Typical number of blow-ups containing an edge: `60/eps^2 * ln n`.
pub fn kappa(epsilon: f64, n: usize) -> f64 {
    60.0 / (epsilon * epsilon) * (n as f64).ln()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LabelingConfig {
    pub epsilon: f64,
    pub seed: u64,
    /// Multiplies the layout count; `1.0` is the full count.
    pub scale: f64,
    /// Exact layout count, overriding `scale`.
    pub r_override: Option<usize>,
}

impl LabelingConfig {
    pub fn new(epsilon: f64, seed: u64) -> Self {
        LabelingConfig {
            epsilon,
            seed,
            scale: 1.0,
            r_override: None,
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
}

#[derive(Debug, Clone)]
pub struct LabeledFamily {
    pub r: usize,
    /// Layout count at `scale = 1`, for reporting next to the used `r`.
    pub r_full: usize,
    pub epsilon: f64,
    pub blowups: Vec<BlowupGraph>,
    /// Per host edge rank: the chosen blow-up index, `None` if no blow-up
    /// contains the edge.
    pub labels: Vec<Option<usize>>,
    /// Per host edge rank: the number of blow-ups containing it.
    pub appearance_counts: Vec<u32>,
    /// `Ĝ_i` as sorted host edges.
    pub hat_graphs: Vec<Vec<(usize, usize)>>,
    pub kappa_target: f64,
    pub q: Ratio<u64>,
}

impl LabeledFamily {
    pub fn unlabeled_count(&self) -> usize {
        self.labels.iter().filter(|l| l.is_none()).count()
    }

    pub fn labeled_count(&self) -> usize {
        self.labels.len() - self.unlabeled_count()
    }
}

/// Draws the layouts from the `(seed, "layout", i)` streams, then labels.
pub fn run_procedure1(
    g: &Graph,
    template: &TreeTemplate,
    cfg: &LabelingConfig,
) -> Result<LabeledFamily> {
    let (n, t) = (g.n(), template.t());
    if t < 2 {
        return Err(Error::InvalidTree(
            "template needs at least one edge".into(),
        ));
    }
    if n % t != 0 {
        return Err(Error::Divisibility { n, t });
    }
    let r = match cfg.r_override {
        Some(r) => r,
        None => r_value(cfg.epsilon, t, n, cfg.scale)?,
    };
    let layouts = (0..r)
        .into_par_iter()
        .map(|i| PermutationLayout::random(n, t, &mut rng::stream(cfg.seed, tag::LAYOUT, i as u64)))
        .collect::<Result<Vec<_>>>()?;
    label_with_layouts(g, template, layouts, cfg)
}

/// Labels host edges against explicitly supplied layouts.
pub fn label_with_layouts(
    g: &Graph,
    template: &TreeTemplate,
    layouts: Vec<PermutationLayout>,
    cfg: &LabelingConfig,
) -> Result<LabeledFamily> {
    check_epsilon(cfg.epsilon)?;
    let (n, t) = (g.n(), template.t());
    if n % t != 0 {
        return Err(Error::Divisibility { n, t });
    }
    let q = crossing_probability(t, n)?;
    let r = layouts.len();
    let blowups = layouts
        .into_par_iter()
        .map(|l| build_blowup(g, &l, template, false))
        .collect::<Result<Vec<_>>>()?;

    let adj = template.adjacency_matrix();
    let (labels, appearance_counts): (Vec<Option<usize>>, Vec<u32>) = g
        .edges()
        .par_iter()
        .enumerate()
        .map(|(rank, &(u, v))| {
            let containing: Vec<usize> = blowups
                .iter()
                .enumerate()
                .filter(|(_, b)| adj[b.layout.part_of(u) * t + b.layout.part_of(v)])
                .map(|(i, _)| i)
                .collect();
            let label = (!containing.is_empty()).then(|| {
                let mut rng = rng::stream(cfg.seed, tag::LABEL, rank as u64);
                containing[rng.random_range(0..containing.len())]
            });
            (label, containing.len() as u32)
        })
        .unzip();

    let mut hat_graphs = vec![Vec::new(); r];
    for (&e, label) in g.edges().iter().zip(&labels) {
        if let Some(i) = *label {
            hat_graphs[i].push(e);
        }
    }

    Ok(LabeledFamily {
        r,
        r_full: r_value(cfg.epsilon, t, n.max(2), 1.0)?,
        epsilon: cfg.epsilon,
        blowups,
        labels,
        appearance_counts,
        hat_graphs,
        kappa_target: kappa(cfg.epsilon, n),
        q,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HistogramBin {
    pub appearances: u32,
    pub edges: usize,
}

/// Appearance-count statistics of a labeled family.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct KappaSummary {
    pub r: usize,
    pub r_full: usize,
    pub kappa_target: f64,
    /// `r q`, the mean appearance count for the `r` actually used.
    pub expected_count: f64,
    pub min: u32,
    pub max: u32,
    pub mean: f64,
    /// Fraction of edges outside `(1 ± eps) kappa_target`.
    pub fraction_outside_kappa_band: f64,
    /// Fraction of edges outside `(1 ± eps) r q`.
    pub fraction_outside_expected_band: f64,
    pub unlabeled_edges: usize,
    pub histogram: Vec<HistogramBin>,
}

pub fn kappa_report(fam: &LabeledFamily, epsilon: f64) -> KappaSummary {
    let counts = &fam.appearance_counts;
    let m = counts.len();
    let expected_count = fam.r as f64 * ratio_to_f64(fam.q);
    let outside = |center: f64| {
        if m == 0 {
            return 0.0;
        }
        let (lo, hi) = ((1.0 - epsilon) * center, (1.0 + epsilon) * center);
        counts
            .iter()
            .filter(|&&c| (c as f64) < lo || (c as f64) > hi)
            .count() as f64
            / m as f64
    };
    let mut hist = BTreeMap::new();
    for &c in counts {
        *hist.entry(c).or_insert(0usize) += 1;
    }
    KappaSummary {
        r: fam.r,
        r_full: fam.r_full,
        kappa_target: fam.kappa_target,
        expected_count,
        min: counts.iter().copied().min().unwrap_or(0),
        max: counts.iter().copied().max().unwrap_or(0),
        mean: if m == 0 {
            0.0
        } else {
            counts.iter().map(|&c| c as f64).sum::<f64>() / m as f64
        },
        fraction_outside_kappa_band: outside(fam.kappa_target),
        fraction_outside_expected_band: outside(expected_count),
        unlabeled_edges: fam.unlabeled_count(),
        histogram: hist
            .into_iter()
            .map(|(appearances, edges)| HistogramBin { appearances, edges })
            .collect(),
    }
}
