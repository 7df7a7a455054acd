#![allow(dead_code)]

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use tfactor::tree::TreeTemplate;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Labeled tree from a Prüfer sequence over `0..t`.
pub fn tree_from_prufer(t: usize, seq: &[usize]) -> TreeTemplate {
    assert_eq!(seq.len() + 2, t.max(2));
    if t == 1 {
        return TreeTemplate::new(1, vec![]).unwrap();
    }
    let mut degree = vec![1usize; t];
    for &x in seq {
        degree[x] += 1;
    }
    let mut edges = Vec::with_capacity(t - 1);
    for &x in seq {
        let leaf = (0..t).find(|&v| degree[v] == 1).unwrap();
        edges.push((leaf, x));
        degree[leaf] -= 1;
        degree[x] -= 1;
    }
    let rest: Vec<usize> = (0..t).filter(|&v| degree[v] == 1).collect();
    edges.push((rest[0], rest[1]));
    TreeTemplate::new(t, edges).unwrap()
}

pub fn random_tree(t: usize, rng: &mut impl Rng) -> TreeTemplate {
    if t <= 2 {
        return TreeTemplate::path(t).unwrap();
    }
    let seq: Vec<usize> = (0..t - 2).map(|_| rng.random_range(0..t)).collect();
    tree_from_prufer(t, &seq)
}

/// All labeled trees on `t` vertices (t^(t-2) of them).
pub fn all_trees(t: usize) -> Vec<TreeTemplate> {
    if t <= 2 {
        return vec![TreeTemplate::path(t).unwrap()];
    }
    let len = t - 2;
    let total = t.pow(len as u32);
    (0..total)
        .map(|mut code| {
            let seq: Vec<usize> = (0..len)
                .map(|_| {
                    let d = code % t;
                    code /= t;
                    d
                })
                .collect();
            tree_from_prufer(t, &seq)
        })
        .collect()
}

/// Calls `f` on every permutation of `0..n` (Heap's algorithm).
pub fn for_each_permutation(n: usize, mut f: impl FnMut(&[usize])) {
    let mut a: Vec<usize> = (0..n).collect();
    let mut c = vec![0usize; n];
    f(&a);
    let mut i = 0;
    while i < n {
        if c[i] < i {
            if i % 2 == 0 {
                a.swap(0, i);
            } else {
                a.swap(c[i], i);
            }
            f(&a);
            c[i] += 1;
            i = 0;
        } else {
            c[i] = 0;
            i += 1;
        }
    }
}

/// Isomorphism by trying every bijection.
pub fn brute_force_isomorphic(a: &TreeTemplate, b: &TreeTemplate) -> bool {
    if a.t() != b.t() {
        return false;
    }
    let mut found = false;
    for_each_permutation(a.t(), |perm| {
        if !found && a.edges().iter().all(|&(i, j)| b.is_edge(perm[i], perm[j])) {
            found = true;
        }
    });
    found
}

/// Edges `(a, b)` of a `d`-regular bipartite graph on sides `0..nu`: the cells
/// of a shuffled cyclic Latin square holding one of `d` chosen symbols.
pub fn latin_regular(nu: usize, d: usize, rng: &mut impl Rng) -> Vec<(usize, usize)> {
    let mut rows: Vec<usize> = (0..nu).collect();
    let mut cols: Vec<usize> = (0..nu).collect();
    let mut symbols: Vec<usize> = (0..nu).collect();
    rows.shuffle(rng);
    cols.shuffle(rng);
    symbols.shuffle(rng);
    let chosen = &symbols[..d];
    let mut edges = Vec::with_capacity(nu * d);
    for (a, &row) in rows.iter().enumerate() {
        for (b, &col) in cols.iter().enumerate() {
            if chosen.contains(&((a + b) % nu)) {
                edges.push((row, col));
            }
        }
    }
    edges
}
