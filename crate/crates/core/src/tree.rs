//! Tree templates, unrooted tree isomorphism, and `T`-factors.

use std::fmt;
use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use serde::Serialize;

use crate::blowup::PermutationLayout;
use crate::error::{Error, ParseErrorKind, Result};
use crate::graph::Graph;

/// A tree on vertex set `{0..t-1}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TreeTemplate {
    t: usize,
    edges: Vec<(usize, usize)>,
    adj: Vec<Vec<usize>>,
}

impl TreeTemplate {
    /// Validates that `edges` form a spanning tree of `{0..t-1}`.
    /// Forests and cyclic inputs are rejected, never repaired.
    pub fn new(t: usize, edges: Vec<(usize, usize)>) -> Result<Self> {
        if t == 0 {
            return Err(Error::InvalidTree(
                "a tree needs at least one vertex".into(),
            ));
        }
        if edges.len() != t - 1 {
            return Err(Error::InvalidTree(format!(
                "{} edges on {t} vertices, expected {}",
                edges.len(),
                t - 1
            )));
        }
        let mut adj = vec![Vec::new(); t];
        let mut normalized = Vec::with_capacity(edges.len());
        for &(i, j) in &edges {
            if i >= t || j >= t {
                return Err(Error::InvalidTree(format!("edge ({i}, {j}) out of range")));
            }
            if i == j {
                return Err(Error::InvalidTree(format!("self-loop at {i}")));
            }
            if adj[i].contains(&j) {
                return Err(Error::InvalidTree(format!("duplicate edge ({i}, {j})")));
            }
            adj[i].push(j);
            adj[j].push(i);
            normalized.push((i.min(j), i.max(j)));
        }
        // t-1 edges and connected <=> tree.
        let mut seen = vec![false; t];
        let mut stack = vec![0];
        seen[0] = true;
        let mut reached = 1;
        while let Some(v) = stack.pop() {
            for &w in &adj[v] {
                if !seen[w] {
                    seen[w] = true;
                    reached += 1;
                    stack.push(w);
                }
            }
        }
        if reached != t {
            return Err(Error::InvalidTree(
                "edges do not connect all vertices (forest or cycle)".into(),
            ));
        }
        Ok(TreeTemplate {
            t,
            edges: normalized,
            adj,
        })
    }

    pub fn path(t: usize) -> Result<Self> {
        Self::new(t, (1..t).map(|i| (i - 1, i)).collect())
    }

    pub fn star(t: usize) -> Result<Self> {
        Self::new(t, (1..t).map(|i| (0, i)).collect())
    }

    pub fn t(&self) -> usize {
        self.t
    }

    /// Tree edges `(i, j)` with `i < j`, in input order.
    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adj[v]
    }

    pub fn is_edge(&self, i: usize, j: usize) -> bool {
        i < self.t && self.adj[i].contains(&j)
    }

    /// `t x t` adjacency matrix, row-major.
    pub(crate) fn adjacency_matrix(&self) -> Vec<bool> {
        let mut m = vec![false; self.t * self.t];
        for &(i, j) in &self.edges {
            m[i * self.t + j] = true;
            m[j * self.t + i] = true;
        }
        m
    }

    /// One or two centers, found by repeatedly stripping leaves.
    pub fn centers(&self) -> Vec<usize> {
        if self.t <= 2 {
            return (0..self.t).collect();
        }
        let mut degree: Vec<usize> = self.adj.iter().map(Vec::len).collect();
        let mut layer: Vec<usize> = (0..self.t).filter(|&v| degree[v] == 1).collect();
        let mut remaining = self.t;
        while remaining > 2 {
            remaining -= layer.len();
            let mut next = Vec::new();
            for &leaf in &layer {
                for &w in &self.adj[leaf] {
                    degree[w] -= 1;
                    if degree[w] == 1 {
                        next.push(w);
                    }
                }
            }
            layer = next;
        }
        layer.sort_unstable();
        layer
    }

    /// AHU encoding rooted at `root`: a leaf is `()`, an inner vertex wraps
    /// its children's sorted encodings.
    fn rooted_encoding(&self, root: usize) -> String {
        let mut parent = vec![usize::MAX; self.t];
        let mut order = Vec::with_capacity(self.t);
        let mut stack = vec![root];
        parent[root] = root;
        while let Some(v) = stack.pop() {
            order.push(v);
            for &w in &self.adj[v] {
                if parent[w] == usize::MAX {
                    parent[w] = v;
                    stack.push(w);
                }
            }
        }
        let mut child_codes: Vec<Vec<String>> = vec![Vec::new(); self.t];
        let mut code = vec![String::new(); self.t];
        for &v in order.iter().rev() {
            let mut kids = std::mem::take(&mut child_codes[v]);
            kids.sort_unstable();
            let mut s = String::with_capacity(2 + kids.iter().map(String::len).sum::<usize>());
            s.push('(');
            kids.iter().for_each(|k| s.push_str(k));
            s.push(')');
            if v != root {
                child_codes[parent[v]].push(s);
            } else {
                code[v] = s;
            }
        }
        std::mem::take(&mut code[root])
    }

    /// Canonical form of the unlabeled tree: the smallest encoding over its
    /// centers.
    pub fn canonical_form(&self) -> String {
        self.centers()
            .into_iter()
            .map(|c| self.rooted_encoding(c))
            .min()
            .unwrap_or_default()
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty());
        let (line, header) = lines
            .next()
            .ok_or_else(|| Error::parse(1, ParseErrorKind::Malformed, "missing \"t\" header"))?;
        let t: usize = header.parse().map_err(|_| {
            Error::parse(
                line,
                ParseErrorKind::Malformed,
                format!("bad vertex count {header:?}"),
            )
        })?;
        let mut edges = Vec::new();
        for (line, text) in lines {
            let mut it = text.split_whitespace().map(str::parse::<usize>);
            let (i, j) = match (it.next(), it.next(), it.next()) {
                (Some(Ok(i)), Some(Ok(j)), None) => (i, j),
                _ => {
                    return Err(Error::parse(
                        line,
                        ParseErrorKind::Malformed,
                        format!("expected \"i j\", got {text:?}"),
                    ))
                }
            };
            if i >= t || j >= t {
                return Err(Error::parse(
                    line,
                    ParseErrorKind::VertexOutOfRange,
                    format!("edge ({i}, {j}) with t = {t}"),
                ));
            }
            if i == j {
                return Err(Error::parse(
                    line,
                    ParseErrorKind::SelfLoop,
                    format!("vertex {i}"),
                ));
            }
            edges.push((i, j));
        }
        Self::new(t, edges)
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("{}\n", self.t);
        for &(i, j) in &self.edges {
            let _ = writeln!(out, "{i} {j}");
        }
        out
    }
}

pub fn read_tree(path: impl AsRef<Path>) -> Result<TreeTemplate> {
    TreeTemplate::parse(&fs::read_to_string(path)?)
}

/// True iff the two trees are isomorphic as unlabeled trees.
pub fn ahu_isomorphic(a: &TreeTemplate, b: &TreeTemplate) -> bool {
    a.t == b.t && a.edges.len() == b.edges.len() && a.canonical_form() == b.canonical_form()
}

/// One copy of `T` inside the host graph.
///
/// Copies produced by this crate list `vertices[i]` as the image of tree
/// vertex `i`, and `edges[k]` as the image of `T.edges()[k]`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TreeCopy {
    pub vertices: Vec<usize>,
    pub edges: Vec<(usize, usize)>,
}

/// `n / t` vertex-disjoint copies of `T` covering every host vertex.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize)]
pub struct TFactor {
    pub copies: Vec<TreeCopy>,
}

impl TFactor {
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.copies
            .iter()
            .flat_map(|c| c.edges.iter().map(|&(u, v)| (u.min(v), u.max(v))))
    }

    pub fn edge_count(&self) -> usize {
        self.copies.iter().map(|c| c.edges.len()).sum()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "violation", rename_all = "snake_case")]
pub enum FactorViolation {
    /// Host vertex count is not a multiple of `t`.
    Indivisible {
        n: usize,
        t: usize,
    },
    CopyCount {
        expected: usize,
        found: usize,
    },
    CopyShape {
        copy: usize,
        vertices: usize,
        edges: usize,
    },
    VertexOutOfRange {
        copy: usize,
        vertex: usize,
    },
    NonDisjoint {
        vertex: usize,
        first_copy: usize,
        second_copy: usize,
    },
    NotSpanning {
        vertex: usize,
    },
    /// An edge whose endpoints are not both among the copy's vertices.
    ForeignEdge {
        copy: usize,
        edge: (usize, usize),
    },
    NonSubgraph {
        copy: usize,
        edge: (usize, usize),
    },
    NotIsomorphic {
        copy: usize,
    },
    /// Two factors of a packing share a host edge.
    SharedEdge {
        edge: (usize, usize),
        first_factor: usize,
        second_factor: usize,
    },
}

impl fmt::Display for FactorViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use FactorViolation::*;
        match *self {
            Indivisible { n, t } => write!(f, "host size {n} not divisible by {t}"),
            CopyCount { expected, found } => {
                write!(f, "size mismatch: {found} copies, expected {expected}")
            }
            CopyShape {
                copy,
                vertices,
                edges,
            } => {
                write!(f, "copy {copy} has {vertices} vertices and {edges} edges")
            }
            VertexOutOfRange { copy, vertex } => {
                write!(f, "copy {copy} uses vertex {vertex} outside the host")
            }
            NonDisjoint {
                vertex,
                first_copy,
                second_copy,
            } => write!(
                f,
                "non-disjoint: vertex {vertex} in copies {first_copy} and {second_copy}"
            ),
            NotSpanning { vertex } => write!(f, "vertex {vertex} is not covered"),
            ForeignEdge { copy, edge } => write!(
                f,
                "copy {copy} edge ({}, {}) leaves its vertex set",
                edge.0, edge.1
            ),
            NonSubgraph { copy, edge } => write!(
                f,
                "non-subgraph: copy {copy} uses edge ({}, {}) absent from the host",
                edge.0, edge.1
            ),
            NotIsomorphic { copy } => write!(f, "copy {copy} is not isomorphic to the template"),
            SharedEdge {
                edge,
                first_factor,
                second_factor,
            } => write!(
                f,
                "edge ({}, {}) used by factors {first_factor} and {second_factor}",
                edge.0, edge.1
            ),
        }
    }
}

/// Checks that `f` is a `T`-factor of `g`; reports the first violation found.
pub fn verify_tfactor(
    g: &Graph,
    template: &TreeTemplate,
    f: &TFactor,
) -> std::result::Result<(), FactorViolation> {
    let (n, t) = (g.n(), template.t());
    if n % t != 0 {
        return Err(FactorViolation::Indivisible { n, t });
    }
    if f.copies.len() != n / t {
        return Err(FactorViolation::CopyCount {
            expected: n / t,
            found: f.copies.len(),
        });
    }
    let mut owner = vec![usize::MAX; n];
    for (ci, copy) in f.copies.iter().enumerate() {
        if copy.vertices.len() != t || copy.edges.len() != t - 1 {
            return Err(FactorViolation::CopyShape {
                copy: ci,
                vertices: copy.vertices.len(),
                edges: copy.edges.len(),
            });
        }
        for &v in &copy.vertices {
            if v >= n {
                return Err(FactorViolation::VertexOutOfRange {
                    copy: ci,
                    vertex: v,
                });
            }
            if owner[v] != usize::MAX {
                return Err(FactorViolation::NonDisjoint {
                    vertex: v,
                    first_copy: owner[v],
                    second_copy: ci,
                });
            }
            owner[v] = ci;
        }
    }
    if let Some(v) = owner.iter().position(|&o| o == usize::MAX) {
        return Err(FactorViolation::NotSpanning { vertex: v });
    }
    let target = template.canonical_form();
    for (ci, copy) in f.copies.iter().enumerate() {
        let mut local = Vec::with_capacity(copy.edges.len());
        for &(u, v) in &copy.edges {
            let edge = (u.min(v), u.max(v));
            if u >= n || v >= n || owner[u] != ci || owner[v] != ci {
                return Err(FactorViolation::ForeignEdge { copy: ci, edge });
            }
            if !g.has_edge(u, v) {
                return Err(FactorViolation::NonSubgraph { copy: ci, edge });
            }
            let pos = |x| copy.vertices.iter().position(|&w| w == x).unwrap();
            local.push((pos(u), pos(v)));
        }
        match TreeTemplate::new(t, local) {
            Ok(tree) if tree.canonical_form() == target => {}
            _ => return Err(FactorViolation::NotIsomorphic { copy: ci }),
        }
    }
    Ok(())
}

/// Checks that no host edge is used by two of `factors`.
pub fn check_edge_disjoint(factors: &[TFactor]) -> std::result::Result<(), FactorViolation> {
    let mut owner = std::collections::HashMap::new();
    for (fi, f) in factors.iter().enumerate() {
        for e in f.edges() {
            if let Some(prev) = owner.insert(e, fi) {
                return Err(FactorViolation::SharedEdge {
                    edge: e,
                    first_factor: prev,
                    second_factor: fi,
                });
            }
        }
    }
    Ok(())
}

/// Combines one perfect matching per tree edge into a `T`-factor.
///
/// `matchings[k]` must be a perfect matching between the parts of tree edge
/// `T.edges()[k] = (i, j)`; pairs may be given in either orientation.
pub fn assemble_factor(
    layout: &PermutationLayout,
    template: &TreeTemplate,
    matchings: &[Vec<(usize, usize)>],
) -> Result<TFactor> {
    if layout.t() != template.t() {
        return Err(Error::DimensionMismatch(format!(
            "layout has {} parts, template has {} vertices",
            layout.t(),
            template.t()
        )));
    }
    let parts: Vec<&[usize]> = (0..layout.t()).map(|i| layout.part(i)).collect();
    Ok(TFactor {
        copies: assemble_copies(&parts, layout.n(), template, matchings)?,
    })
}

/// Core of [`assemble_factor`] over arbitrary equal-size disjoint parts of a
/// host with `n` vertices.
pub(crate) fn assemble_copies(
    parts: &[&[usize]],
    n: usize,
    template: &TreeTemplate,
    matchings: &[Vec<(usize, usize)>],
) -> Result<Vec<TreeCopy>> {
    let t = template.t();
    if matchings.len() != template.edges().len() {
        return Err(Error::InvalidMatching(format!(
            "{} matchings for {} tree edges",
            matchings.len(),
            template.edges().len()
        )));
    }
    let nu = parts.first().map_or(0, |p| p.len());
    let mut part_of = vec![usize::MAX; n];
    for (i, part) in parts.iter().enumerate() {
        for &v in *part {
            part_of[v] = i;
        }
    }

    // partner[k][v]: the vertex matched to v by the matching of tree edge k.
    let mut partner = vec![vec![usize::MAX; n]; matchings.len()];
    for (k, (m, &(i, j))) in matchings.iter().zip(template.edges()).enumerate() {
        if m.len() != nu {
            return Err(Error::InvalidMatching(format!(
                "matching {k} has {} pairs, parts have {nu} vertices",
                m.len()
            )));
        }
        for &(x, y) in m {
            let (a, b) = match (part_of.get(x), part_of.get(y)) {
                (Some(&px), Some(&py)) if px == i && py == j => (x, y),
                (Some(&px), Some(&py)) if px == j && py == i => (y, x),
                _ => {
                    return Err(Error::InvalidMatching(format!(
                        "pair ({x}, {y}) of matching {k} does not join parts {i} and {j}"
                    )))
                }
            };
            if partner[k][a] != usize::MAX || partner[k][b] != usize::MAX {
                return Err(Error::InvalidMatching(format!(
                    "matching {k} is not perfect: vertex reused in ({x}, {y})"
                )));
            }
            partner[k][a] = b;
            partner[k][b] = a;
        }
    }

    let mut copies = Vec::with_capacity(nu);
    for &root in parts.first().copied().unwrap_or(&[]) {
        let mut vertices = vec![usize::MAX; t];
        vertices[0] = root;
        let mut stack = vec![0usize];
        while let Some(i) = stack.pop() {
            for (k, &(a, b)) in template.edges().iter().enumerate() {
                let j = match (a == i, b == i) {
                    (true, _) => b,
                    (_, true) => a,
                    _ => continue,
                };
                if vertices[j] == usize::MAX {
                    vertices[j] = partner[k][vertices[i]];
                    stack.push(j);
                }
            }
        }
        let edges = template
            .edges()
            .iter()
            .map(|&(a, b)| (vertices[a], vertices[b]))
            .collect();
        copies.push(TreeCopy { vertices, edges });
    }
    Ok(copies)
}

/// Text export of a list of factors.
///
/// ```text
/// factors <count> <n> <t>
/// factor <index>
/// <v_0> ... <v_{t-1}> : <u_1> <w_1> ... <u_{t-1}> <w_{t-1}>
/// ```
/// with one copy line per copy.
pub fn factors_to_text(n: usize, t: usize, factors: &[TFactor]) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "factors {} {n} {t}", factors.len());
    for (fi, f) in factors.iter().enumerate() {
        let _ = writeln!(out, "factor {fi}");
        for c in &f.copies {
            let vs: Vec<String> = c.vertices.iter().map(usize::to_string).collect();
            let es: Vec<String> = c.edges.iter().map(|(u, v)| format!("{u} {v}")).collect();
            let _ = writeln!(out, "{} : {}", vs.join(" "), es.join(" "));
        }
    }
    out
}

/// Parses [`factors_to_text`] output, returning `(n, t, factors)`.
pub fn parse_factors(text: &str) -> Result<(usize, usize, Vec<TFactor>)> {
    let malformed = |line: usize, what: &str| Error::parse(line, ParseErrorKind::Malformed, what);
    let nums = |line: usize, s: &str| -> Result<Vec<usize>> {
        s.split_whitespace()
            .map(|x| x.parse().map_err(|_| malformed(line, "expected integers")))
            .collect()
    };
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty());
    let (hl, header) = lines.next().ok_or_else(|| malformed(1, "missing header"))?;
    let head = header
        .strip_prefix("factors")
        .ok_or_else(|| malformed(hl, "header must start with \"factors\""))?;
    let h = nums(hl, head)?;
    let [count, n, t] = h[..] else {
        return Err(malformed(hl, "header must be \"factors <count> <n> <t>\""));
    };

    let mut factors: Vec<TFactor> = Vec::with_capacity(count);
    for (line, text) in lines {
        if let Some(rest) = text.strip_prefix("factor") {
            nums(line, rest)?;
            factors.push(TFactor::default());
            continue;
        }
        let current = factors
            .last_mut()
            .ok_or_else(|| malformed(line, "copy line before any \"factor\" line"))?;
        let (vs, es) = text
            .split_once(':')
            .ok_or_else(|| malformed(line, "copy line needs \"vertices : edges\""))?;
        let vertices = nums(line, vs)?;
        let flat = nums(line, es)?;
        if flat.len() % 2 != 0 {
            return Err(malformed(line, "odd number of edge endpoints"));
        }
        let edges = flat.chunks(2).map(|c| (c[0], c[1])).collect();
        current.copies.push(TreeCopy { vertices, edges });
    }
    if factors.len() != count {
        return Err(Error::parse(
            hl,
            ParseErrorKind::CountMismatch,
            format!("header declares {count} factors, found {}", factors.len()),
        ));
    }
    Ok((n, t, factors))
}
