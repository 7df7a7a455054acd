//! Simple undirected graphs on `{0..n-1}`, random generators, edge-list I/O
//! and degree/co-degree regularity certification.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use rand::Rng;
use serde::Serialize;

use crate::error::{check_epsilon, check_probability, Error, ParseErrorKind, Result};
use crate::rng::{self, tag};

/// Vertex count up to which co-degrees are computed with bitset rows.
pub const DEFAULT_BITSET_THRESHOLD: usize = 4096;

/// Immutable simple undirected graph.
///
/// Edges are stored once as `(u, v)` with `u < v`, sorted lexicographically;
/// the position of an edge in [`Graph::edges`] is its *rank*.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    n: usize,
    edges: Vec<(usize, usize)>,
    adj: Vec<Vec<usize>>,
}

impl Graph {
    /// Builds a graph, rejecting self-loops, duplicates and out-of-range ids.
    /// Endpoint order within a pair does not matter.
    pub fn new(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        let mut list = Vec::new();
        for (u, v) in edges {
            if u >= n || v >= n {
                return Err(Error::InvalidParameter(format!(
                    "edge ({u}, {v}) has an endpoint outside 0..{n}"
                )));
            }
            if u == v {
                return Err(Error::InvalidParameter(format!("self-loop at vertex {u}")));
            }
            list.push((u.min(v), u.max(v)));
        }
        list.sort_unstable();
        if let Some(w) = list.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::InvalidParameter(format!(
                "duplicate edge ({}, {})",
                w[0].0, w[0].1
            )));
        }
        Ok(Self::from_sorted(n, list))
    }

    /// `edges` must already be normalized, sorted and duplicate free.
    pub(crate) fn from_sorted(n: usize, edges: Vec<(usize, usize)>) -> Self {
        debug_assert!(edges.windows(2).all(|w| w[0] < w[1]));
        let mut adj = vec![Vec::new(); n];
        for &(u, v) in &edges {
            adj[u].push(v);
            adj[v].push(u);
        }
        for list in &mut adj {
            list.sort_unstable();
        }
        Graph { n, edges, adj }
    }

    pub fn empty(n: usize) -> Self {
        Self::from_sorted(n, Vec::new())
    }

    pub fn complete(n: usize) -> Self {
        let edges = (0..n)
            .flat_map(|u| (u + 1..n).map(move |v| (u, v)))
            .collect();
        Self::from_sorted(n, edges)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adj[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].len()
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        u < self.n && v < self.n && self.adj[u].binary_search(&v).is_ok()
    }

    /// Rank of edge `{u, v}` in [`Graph::edges`].
    pub fn edge_rank(&self, u: usize, v: usize) -> Option<usize> {
        self.edges.binary_search(&(u.min(v), u.max(v))).ok()
    }

    /// Number of common neighbours of `u` and `v`.
    pub fn codegree(&self, u: usize, v: usize) -> usize {
        sorted_intersection_len(&self.adj[u], &self.adj[v])
    }

    /// Fraction of the `C(n, 2)` pairs that are edges.
    pub fn density(&self) -> f64 {
        let pairs = self.n * self.n.saturating_sub(1) / 2;
        if pairs == 0 {
            0.0
        } else {
            self.edges.len() as f64 / pairs as f64
        }
    }

    /// Edge-list text: `"n m"` followed by one `"u v"` line per edge.
    pub fn to_edge_list(&self) -> String {
        let mut out = String::with_capacity(12 * (self.edges.len() + 1));
        let _ = writeln!(out, "{} {}", self.n, self.edges.len());
        for &(u, v) in &self.edges {
            let _ = writeln!(out, "{u} {v}");
        }
        out
    }

    pub fn parse_edge_list(text: &str) -> Result<Self> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty());

        let (header_line, header) = lines
            .next()
            .ok_or_else(|| Error::parse(1, ParseErrorKind::Malformed, "missing \"n m\" header"))?;
        let (n, m) = parse_pair(header_line, header)?;

        let mut edges = Vec::with_capacity(m);
        let mut seen = std::collections::HashSet::with_capacity(m);
        for (line, text) in lines {
            let (u, v) = parse_pair(line, text)?;
            if u >= n || v >= n {
                return Err(Error::parse(
                    line,
                    ParseErrorKind::VertexOutOfRange,
                    format!("edge ({u}, {v}) with n = {n}"),
                ));
            }
            if u == v {
                return Err(Error::parse(
                    line,
                    ParseErrorKind::SelfLoop,
                    format!("vertex {u}"),
                ));
            }
            let e = (u.min(v), u.max(v));
            if !seen.insert(e) {
                return Err(Error::parse(
                    line,
                    ParseErrorKind::DuplicateEdge,
                    format!("edge ({}, {})", e.0, e.1),
                ));
            }
            edges.push(e);
            if edges.len() > m {
                return Err(Error::parse(
                    line,
                    ParseErrorKind::CountMismatch,
                    format!("header declares {m} edges"),
                ));
            }
        }
        if edges.len() != m {
            return Err(Error::parse(
                header_line,
                ParseErrorKind::CountMismatch,
                format!("header declares {m} edges, found {}", edges.len()),
            ));
        }
        edges.sort_unstable();
        Ok(Self::from_sorted(n, edges))
    }
}

fn parse_pair(line: usize, text: &str) -> Result<(usize, usize)> {
    let mut it = text.split_whitespace();
    let parsed = match (it.next(), it.next(), it.next()) {
        (Some(a), Some(b), None) => a.parse().ok().zip(b.parse().ok()),
        _ => None,
    };
    parsed.ok_or_else(|| {
        Error::parse(
            line,
            ParseErrorKind::Malformed,
            format!("expected two integers, got {text:?}"),
        )
    })
}

pub fn read_edge_list(path: impl AsRef<Path>) -> Result<Graph> {
    Graph::parse_edge_list(&fs::read_to_string(path)?)
}

pub fn write_edge_list(g: &Graph, path: impl AsRef<Path>) -> Result<()> {
    fs::write(path, g.to_edge_list())?;
    Ok(())
}

/// `G(n, p)`: each of the `C(n, 2)` pairs independently with probability `p`.
pub fn generate_gnp(n: usize, p: f64, seed: u64) -> Result<Graph> {
    check_probability(p)?;
    let mut rng = rng::stream(seed, tag::GNP, 0);
    let mut edges = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            if rng.random_bool(p) {
                edges.push((u, v));
            }
        }
    }
    Ok(Graph::from_sorted(n, edges))
}

/// Random bipartite graph on sides `0..nu` and `nu..2nu`; each of the `nu^2`
/// cross pairs independently with probability `p`.
pub fn generate_bipartite(nu: usize, p: f64, seed: u64) -> Result<Graph> {
    check_probability(p)?;
    let mut rng = rng::stream(seed, tag::BIPARTITE, 0);
    let mut edges = Vec::new();
    for a in 0..nu {
        for b in 0..nu {
            if rng.random_bool(p) {
                edges.push((a, nu + b));
            }
        }
    }
    Ok(Graph::from_sorted(2 * nu, edges))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RegularityReport {
    pub epsilon: f64,
    pub p: f64,
    pub degree_ok: bool,
    pub codegree_ok: bool,
    pub min_degree: usize,
    pub max_codegree: usize,
    pub worst_degree_vertex: Option<usize>,
    pub worst_codegree_pair: Option<(usize, usize)>,
}

impl RegularityReport {
    pub fn is_regular(&self) -> bool {
        self.degree_ok && self.codegree_ok
    }
}

/// Checks every degree against `(1-eps) n p` and every co-degree against
/// `(1+eps) n p^2`.
pub fn certify_regular(g: &Graph, epsilon: f64, p: f64) -> Result<RegularityReport> {
    certify_regular_with(g, epsilon, p, DEFAULT_BITSET_THRESHOLD)
}

pub fn certify_regular_with(
    g: &Graph,
    epsilon: f64,
    p: f64,
    bitset_threshold: usize,
) -> Result<RegularityReport> {
    check_epsilon(epsilon)?;
    check_probability(p)?;
    let n = g.n();

    let (worst_degree_vertex, min_degree) = (0..n)
        .map(|v| (v, g.degree(v)))
        .min_by_key(|&(v, d)| (d, v))
        .map_or((None, 0), |(v, d)| (Some(v), d));

    let (worst_codegree_pair, max_codegree) = if n <= bitset_threshold {
        let rows = BitRows::from_fn(n, n, |u| g.neighbors(u).iter().copied());
        rows.max_pair_overlap()
    } else {
        max_codegree_by_wedges(g)
    };

    let nf = n as f64;
    Ok(RegularityReport {
        epsilon,
        p,
        degree_ok: min_degree as f64 >= (1.0 - epsilon) * nf * p,
        codegree_ok: max_codegree as f64 <= (1.0 + epsilon) * nf * p * p,
        min_degree,
        max_codegree,
        worst_degree_vertex,
        worst_codegree_pair,
    })
}

fn max_codegree_by_wedges(g: &Graph) -> (Option<(usize, usize)>, usize) {
    let n = g.n();
    let mut best: (Option<(usize, usize)>, usize) = (None, 0);
    let mut counts = vec![0usize; n];
    let mut touched = Vec::new();
    for u in 0..n {
        for &w in g.neighbors(u) {
            for &v in g.neighbors(w) {
                if v > u {
                    if counts[v] == 0 {
                        touched.push(v);
                    }
                    counts[v] += 1;
                }
            }
        }
        touched.sort_unstable();
        for &v in &touched {
            if best.0.is_none() || counts[v] > best.1 {
                best = (Some((u, v)), counts[v]);
            }
            counts[v] = 0;
        }
        touched.clear();
        if best.0.is_none() && u + 1 < n {
            best = (Some((u, u + 1)), 0);
        }
    }
    best
}

pub(crate) fn sorted_intersection_len(a: &[usize], b: &[usize]) -> usize {
    let (mut i, mut j, mut c) = (0, 0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                c += 1;
                i += 1;
                j += 1;
            }
        }
    }
    c
}

/// Dense 0/1 rows over a fixed column range, used for co-degree counting.
pub(crate) struct BitRows {
    words: usize,
    bits: Vec<u64>,
    rows: usize,
}

impl BitRows {
    pub(crate) fn new(rows: usize, cols: usize) -> Self {
        let words = cols.div_ceil(64).max(1);
        BitRows {
            words,
            bits: vec![0; rows * words],
            rows,
        }
    }

    pub(crate) fn from_fn<I>(rows: usize, cols: usize, mut row: impl FnMut(usize) -> I) -> Self
    where
        I: IntoIterator<Item = usize>,
    {
        let mut out = Self::new(rows, cols);
        for r in 0..rows {
            for c in row(r) {
                out.set(r, c);
            }
        }
        out
    }

    pub(crate) fn set(&mut self, row: usize, col: usize) {
        self.bits[row * self.words + col / 64] |= 1 << (col % 64);
    }

    fn row(&self, r: usize) -> &[u64] {
        &self.bits[r * self.words..(r + 1) * self.words]
    }

    /// Largest `|row(a) & row(b)|` over `a < b`, with the lexicographically
    /// first pair attaining it. `(None, 0)` with fewer than two rows.
    pub(crate) fn max_pair_overlap(&self) -> (Option<(usize, usize)>, usize) {
        let mut best: (Option<(usize, usize)>, usize) = (None, 0);
        for a in 0..self.rows {
            let ra = self.row(a);
            for b in a + 1..self.rows {
                let c: usize = ra
                    .iter()
                    .zip(self.row(b))
                    .map(|(x, y)| (x & y).count_ones() as usize)
                    .sum();
                if best.0.is_none() || c > best.1 {
                    best = (Some((a, b)), c);
                }
            }
        }
        best
    }
}
