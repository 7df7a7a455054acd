//! Permutation layouts, blow-ups of the template tree, super-edge regularity,
//! and the exact crossing probability of a fixed edge.

use num_rational::Ratio;
use rand::seq::SliceRandom;
use rand::Rng;
use serde::Serialize;

use crate::error::{check_epsilon, check_probability, Error, Result};
use crate::graph::{sorted_intersection_len, BitRows, Graph, DEFAULT_BITSET_THRESHOLD};
use crate::tree::TreeTemplate;

/// A permutation `sigma` of `{0..n-1}` cut into `t` consecutive blocks of
/// `nu = n / t`; block `i` is part `i`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PermutationLayout {
    sigma: Vec<usize>,
    t: usize,
    nu: usize,
    #[serde(skip)]
    part_of: Vec<usize>,
    #[serde(skip)]
    position: Vec<usize>,
}

impl PermutationLayout {
    pub fn identity(n: usize, t: usize) -> Result<Self> {
        build_layout(n, t, (0..n).collect())
    }

    /// Uniform layout drawn with a Fisher-Yates shuffle.
    pub fn random(n: usize, t: usize, rng: &mut impl Rng) -> Result<Self> {
        let mut sigma: Vec<usize> = (0..n).collect();
        sigma.shuffle(rng);
        build_layout(n, t, sigma)
    }

    pub fn n(&self) -> usize {
        self.sigma.len()
    }

    pub fn t(&self) -> usize {
        self.t
    }

    pub fn nu(&self) -> usize {
        self.nu
    }

    pub fn sigma(&self) -> &[usize] {
        &self.sigma
    }

    pub fn part(&self, i: usize) -> &[usize] {
        &self.sigma[i * self.nu..(i + 1) * self.nu]
    }

    pub fn part_of(&self, v: usize) -> usize {
        self.part_of[v]
    }

    /// Index of `v` inside its part.
    pub fn position(&self, v: usize) -> usize {
        self.position[v]
    }
}

pub fn build_layout(n: usize, t: usize, sigma: Vec<usize>) -> Result<PermutationLayout> {
    if t == 0 || !n.is_multiple_of(t) {
        return Err(Error::Divisibility { n, t });
    }
    if sigma.len() != n {
        return Err(Error::InvalidParameter(format!(
            "permutation has length {}, expected {n}",
            sigma.len()
        )));
    }
    let nu = n / t;
    let mut part_of = vec![usize::MAX; n];
    let mut position = vec![0; n];
    for (k, &v) in sigma.iter().enumerate() {
        if v >= n || part_of[v] != usize::MAX {
            return Err(Error::InvalidParameter(format!(
                "not a permutation of 0..{n}: entry {v} at index {k}"
            )));
        }
        part_of[v] = k / nu;
        position[v] = k % nu;
    }
    Ok(PermutationLayout {
        sigma,
        t,
        nu,
        part_of,
        position,
    })
}

/// `G_sigma` (or the prime variant `G'_sigma`): host edges kept by a layout.
#[derive(Debug, Clone, Serialize)]
pub struct BlowupGraph {
    pub layout: PermutationLayout,
    #[serde(skip)]
    pub template: TreeTemplate,
    /// Sorted `(u, v)` with `u < v`.
    pub kept_edges: Vec<(usize, usize)>,
    /// When set, every cross-part edge is kept, not only super-edge ones.
    pub prime: bool,
}

impl BlowupGraph {
    pub fn super_edges(&self) -> &[(usize, usize)] {
        self.template.edges()
    }
}

/// Keeps the host edges that join two parts adjacent in `template`, or all
/// cross-part edges when `prime` is set. Edges inside a part are dropped.
pub fn build_blowup(
    g: &Graph,
    layout: &PermutationLayout,
    template: &TreeTemplate,
    prime: bool,
) -> Result<BlowupGraph> {
    if layout.t() != template.t() || layout.n() != g.n() {
        return Err(Error::DimensionMismatch(format!(
            "graph n = {}, layout (n, t) = ({}, {}), template t = {}",
            g.n(),
            layout.n(),
            layout.t(),
            template.t()
        )));
    }
    let adj = template.adjacency_matrix();
    let t = template.t();
    let kept_edges = g
        .edges()
        .iter()
        .copied()
        .filter(|&(u, v)| {
            let (pu, pv) = (layout.part_of(u), layout.part_of(v));
            pu != pv && (prime || adj[pu * t + pv])
        })
        .collect();
    Ok(BlowupGraph {
        layout: layout.clone(),
        template: template.clone(),
        kept_edges,
        prime,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PairRegularityReport {
    pub pair: (usize, usize),
    pub super_edge: bool,
    pub epsilon: f64,
    pub p: f64,
    pub min_cross_degree: usize,
    pub max_within_codegree: usize,
    pub ok: bool,
}

/// One report per super-edge; the blow-up is `(eps, p)`-regular iff all are ok.
pub fn certify_blowup(b: &BlowupGraph, epsilon: f64, p: f64) -> Result<Vec<PairRegularityReport>> {
    certify_blowup_with(b, epsilon, p, false)
}

pub fn is_regular_blowup(reports: &[PairRegularityReport]) -> bool {
    reports.iter().all(|r| r.ok)
}

/// With `strict`, every pair of distinct parts is checked (meaningful for the
/// prime variant); otherwise only super-edges.
pub fn certify_blowup_with(
    b: &BlowupGraph,
    epsilon: f64,
    p: f64,
    strict: bool,
) -> Result<Vec<PairRegularityReport>> {
    check_epsilon(epsilon)?;
    check_probability(p)?;
    let layout = &b.layout;
    let t = layout.t();
    let nu = layout.nu();

    let pairs: Vec<(usize, usize)> = if strict {
        (0..t)
            .flat_map(|i| (i + 1..t).map(move |j| (i, j)))
            .collect()
    } else {
        b.super_edges().to_vec()
    };
    let mut index = vec![usize::MAX; t * t];
    for (k, &(i, j)) in pairs.iter().enumerate() {
        index[i * t + j] = k;
        index[j * t + i] = k;
    }

    // For pair k = (i, j): lists[k].0 holds, per vertex of part i, its
    // neighbours in part j (as positions); lists[k].1 the converse.
    type Adjacency = Vec<Vec<usize>>;
    let mut lists: Vec<(Adjacency, Adjacency)> =
        vec![(vec![Vec::new(); nu], vec![Vec::new(); nu]); pairs.len()];
    for &(u, v) in &b.kept_edges {
        let (pu, pv) = (layout.part_of(u), layout.part_of(v));
        let k = index[pu * t + pv];
        if k == usize::MAX {
            continue;
        }
        let (x, y) = if pu == pairs[k].0 { (u, v) } else { (v, u) };
        lists[k].0[layout.position(x)].push(layout.position(y));
        lists[k].1[layout.position(y)].push(layout.position(x));
    }

    let nuf = nu as f64;
    let reports = pairs
        .iter()
        .zip(lists)
        .map(|(&pair, (mut left, mut right))| {
            left.iter_mut().for_each(|l| l.sort_unstable());
            right.iter_mut().for_each(|l| l.sort_unstable());
            let min_cross_degree = left.iter().chain(&right).map(Vec::len).min().unwrap_or(0);
            let max_within_codegree =
                side_max_codegree(&left, nu).max(side_max_codegree(&right, nu));
            PairRegularityReport {
                pair,
                super_edge: b.template.is_edge(pair.0, pair.1),
                epsilon,
                p,
                min_cross_degree,
                max_within_codegree,
                ok: min_cross_degree as f64 >= (1.0 - epsilon) * nuf * p
                    && max_within_codegree as f64 <= (1.0 + epsilon) * nuf * p * p,
            }
        })
        .collect();
    Ok(reports)
}

/// Maximum number of common neighbours of two rows (same side) of a
/// bipartite adjacency given as sorted per-row lists.
fn side_max_codegree(rows: &[Vec<usize>], cols: usize) -> usize {
    if rows.len() <= DEFAULT_BITSET_THRESHOLD {
        BitRows::from_fn(rows.len(), cols, |r| rows[r].iter().copied())
            .max_pair_overlap()
            .1
    } else {
        let mut best = 0;
        for a in 0..rows.len() {
            for b in a + 1..rows.len() {
                best = best.max(sorted_intersection_len(&rows[a], &rows[b]));
            }
        }
        best
    }
}

/// Probability that a fixed pair of vertices lands across some super-edge of
/// a uniformly random layout: `2(t-1)/t^2 * (1 + 1/(n-1))`.
pub fn crossing_probability(t: usize, n: usize) -> Result<Ratio<u64>> {
    if t < 2 {
        return Err(Error::InvalidParameter(format!("need t >= 2, got {t}")));
    }
    if !n.is_multiple_of(t) {
        return Err(Error::Divisibility { n, t });
    }
    let (t, n) = (t as u64, n as u64);
    Ok(Ratio::new(2 * (t - 1), t * t) * Ratio::new(n, n - 1))
}

pub fn ratio_to_f64(r: Ratio<u64>) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}
