//! Edge-disjoint perfect matchings in a balanced bipartite pair, extracted
//! greedily, plus the target counts the packing analysis promises.

use std::collections::VecDeque;

use rand::seq::SliceRandom;
use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::rng::{self, tag};

const NONE: usize = usize::MAX;

/// Perfect matchings `A -> B` peeled off a bipartite pair, in extraction
/// order, and the edges left over.
///
/// Pairs are `(a, b)` in the caller's coordinates; [`pack_bipartite`] uses
/// local indices `0..nu` on both sides.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MatchingFamily {
    pub nu: usize,
    pub matchings: Vec<Vec<(usize, usize)>>,
    pub residual: Vec<(usize, usize)>,
}

impl MatchingFamily {
    pub fn len(&self) -> usize {
        self.matchings.len()
    }

    pub fn is_empty(&self) -> bool {
        self.matchings.is_empty()
    }
}

/// Packs a bipartite [`Graph`] whose sides are `0..nu` and `nu..2nu`.
/// Returned pairs are in graph coordinates.
pub fn pack_matchings(pair: &Graph, seed: u64) -> Result<MatchingFamily> {
    let n = pair.n();
    if n == 0 || !n.is_multiple_of(2) {
        return Err(Error::UnbalancedPair(format!(
            "{n} vertices cannot form two equal sides"
        )));
    }
    let nu = n / 2;
    let mut local = Vec::with_capacity(pair.edge_count());
    for &(u, v) in pair.edges() {
        if u >= nu || v < nu {
            return Err(Error::UnbalancedPair(format!(
                "edge ({u}, {v}) does not cross sides 0..{nu} / {nu}..{n}"
            )));
        }
        local.push((u, v - nu));
    }
    let mut rng = rng::stream(seed, tag::MATCH, 0);
    let mut fam = pack_bipartite(nu, &local, &mut rng)?;
    let lift = |list: &mut Vec<(usize, usize)>| list.iter_mut().for_each(|e| e.1 += nu);
    fam.matchings.iter_mut().for_each(lift);
    lift(&mut fam.residual);
    Ok(fam)
}

/// Greedy extraction: repeatedly find a maximum matching; while it is perfect,
/// record it and delete its edges. Vertex and adjacency order are reshuffled
/// from `rng` before every round.
///
/// `edges` are `(a, b)` with `a, b < nu`, no duplicates.
pub fn pack_bipartite(
    nu: usize,
    edges: &[(usize, usize)],
    rng: &mut impl Rng,
) -> Result<MatchingFamily> {
    if nu == 0 {
        return Err(Error::UnbalancedPair("empty sides".into()));
    }
    let mut adj: Vec<Vec<usize>> = vec![Vec::new(); nu];
    for &(a, b) in edges {
        if a >= nu || b >= nu {
            return Err(Error::UnbalancedPair(format!(
                "edge ({a}, {b}) outside sides of size {nu}"
            )));
        }
        adj[a].push(b);
    }
    let mut hk = HopcroftKarp::new(nu);
    let mut order: Vec<usize> = (0..nu).collect();
    let mut matchings = Vec::new();
    loop {
        if adj.iter().any(Vec::is_empty) {
            break;
        }
        order.shuffle(rng);
        adj.iter_mut().for_each(|l| l.shuffle(rng));
        if hk.run(&adj, &order) < nu {
            break;
        }
        let m: Vec<(usize, usize)> = (0..nu).map(|a| (a, hk.mate_left[a])).collect();
        for &(a, b) in &m {
            let i = adj[a]
                .iter()
                .position(|&x| x == b)
                .expect("matched edge present");
            adj[a].swap_remove(i);
        }
        matchings.push(m);
    }
    let mut residual: Vec<(usize, usize)> = adj
        .iter()
        .enumerate()
        .flat_map(|(a, l)| l.iter().map(move |&b| (a, b)))
        .collect();
    residual.sort_unstable();
    Ok(MatchingFamily {
        nu,
        matchings,
        residual,
    })
}

/// Maximum bipartite matching by shortest augmenting paths in phases.
struct HopcroftKarp {
    mate_left: Vec<usize>,
    mate_right: Vec<usize>,
    dist: Vec<usize>,
    cursor: Vec<usize>,
}

impl HopcroftKarp {
    fn new(nu: usize) -> Self {
        HopcroftKarp {
            mate_left: vec![NONE; nu],
            mate_right: vec![NONE; nu],
            dist: vec![NONE; nu],
            cursor: vec![0; nu],
        }
    }

    /// Size of a maximum matching of `adj`; left vertices are tried in `order`.
    fn run(&mut self, adj: &[Vec<usize>], order: &[usize]) -> usize {
        self.mate_left.fill(NONE);
        self.mate_right.fill(NONE);
        let mut size = 0;
        while self.bfs(adj, order) {
            self.cursor.fill(0);
            for &a in order {
                if self.mate_left[a] == NONE && self.dfs(adj, a) {
                    size += 1;
                }
            }
        }
        size
    }

    fn bfs(&mut self, adj: &[Vec<usize>], order: &[usize]) -> bool {
        let mut queue = VecDeque::new();
        for &a in order {
            if self.mate_left[a] == NONE {
                self.dist[a] = 0;
                queue.push_back(a);
            } else {
                self.dist[a] = NONE;
            }
        }
        let mut found = false;
        while let Some(a) = queue.pop_front() {
            for &b in &adj[a] {
                match self.mate_right[b] {
                    NONE => found = true,
                    a2 if self.dist[a2] == NONE => {
                        self.dist[a2] = self.dist[a] + 1;
                        queue.push_back(a2);
                    }
                    _ => {}
                }
            }
        }
        found
    }

    fn dfs(&mut self, adj: &[Vec<usize>], a: usize) -> bool {
        while self.cursor[a] < adj[a].len() {
            let b = adj[a][self.cursor[a]];
            self.cursor[a] += 1;
            let next = self.mate_right[b];
            if next == NONE || (self.dist[next] == self.dist[a] + 1 && self.dfs(adj, next)) {
                self.mate_left[a] = b;
                self.mate_right[b] = a;
                return true;
            }
        }
        self.dist[a] = NONE;
        false
    }
}

/// Guaranteed family size for an `(eta, d)`-regular pair:
/// `floor((1 - eta^(1/3)) d nu)`, clamped at zero.
pub fn fk_pseudo_target(eta: f64, d: f64, nu: usize) -> u64 {
    let raw = (1.0 - eta.cbrt()) * d * nu as f64;
    // absorb rounding in values like 0.1 * 10 = 0.999...
    let floored = (raw * (1.0 + 1e-12) + 1e-12).floor();
    if floored > 0.0 {
        floored as u64
    } else {
        0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DeltaBound {
    pub value: f64,
    /// `value >= 1`: the family-size guarantee is empty.
    pub vacuous: bool,
}

/// Loss term `(16 ln nu / (nu p))^(1/2)` for a random bipartite pair.
pub fn fk_random_delta(nu: f64, p: f64) -> DeltaBound {
    let value = (16.0 * nu.ln() / (nu * p)).sqrt();
    DeltaBound {
        value,
        vacuous: value >= 1.0,
    }
}
