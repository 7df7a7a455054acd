//! The asymptotic side conditions, evaluated at finite `n`.
//!
//! Each condition has the form `lhs >> rhs`; it is reported as the ratio
//! `lhs / rhs` and counted as passing when the ratio reaches `slack`.

use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Condition {
    pub lhs: f64,
    pub rhs: f64,
    pub ratio: f64,
    pub pass: bool,
}

impl Condition {
    fn new(lhs: f64, rhs: f64, slack: f64) -> Self {
        let ratio = if rhs > 0.0 {
            lhs / rhs
        } else if lhs > 0.0 {
            f64::INFINITY
        } else {
            0.0
        };
        Condition {
            lhs,
            rhs,
            ratio,
            pass: ratio >= slack,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FeasibilityReport {
    pub n: usize,
    pub p: f64,
    pub epsilon: f64,
    pub slack: f64,
    /// `eps^6 n p^4` vs `ln^3 n`: packing of pseudo-random graphs.
    pub thm1: Condition,
    /// `eps^4 n p` vs `ln^2 n`: packing of random graphs.
    pub thm2: Condition,
    /// `eps^2 n p^2` vs `ln n`: `G(n, p)` is `(eps, p)`-regular.
    pub gnp_regularity: Condition,
    /// `eps^2 n p^4` vs `ln n`: a random layout keeps super-edges regular.
    pub blowup_lemma: Condition,
    /// `eps^6 n p^2` vs `ln^3 n`: co-degrees survive the labeling.
    pub hat_codegree: Condition,
}

impl FeasibilityReport {
    pub fn all_pass(&self) -> bool {
        [
            self.thm1,
            self.thm2,
            self.gnp_regularity,
            self.blowup_lemma,
            self.hat_codegree,
        ]
        .iter()
        .all(|c| c.pass)
    }
}

pub fn check_feasibility(n: usize, p: f64, epsilon: f64, slack: f64) -> FeasibilityReport {
    let nf = n as f64;
    let ln = nf.ln().max(0.0);
    let e2 = epsilon * epsilon;
    FeasibilityReport {
        n,
        p,
        epsilon,
        slack,
        thm1: Condition::new(e2.powi(3) * nf * p.powi(4), ln.powi(3), slack),
        thm2: Condition::new(e2 * e2 * nf * p, ln.powi(2), slack),
        gnp_regularity: Condition::new(e2 * nf * p * p, ln, slack),
        blowup_lemma: Condition::new(e2 * nf * p.powi(4), ln, slack),
        hat_codegree: Condition::new(e2.powi(3) * nf * p * p, ln.powi(3), slack),
    }
}

/// Smallest `tau >= 2` for which the pseudo-random packing condition holds
/// for a `(delta, 1)`-regular graph on `tau` vertices, i.e.
/// `delta^6 tau >= slack ln^3 tau`. `None` if no `tau < 2^62` qualifies.
pub fn smallest_tau(delta: f64, slack: f64) -> Option<u64> {
    let holds = |tau: u64| check_feasibility(tau as usize, 1.0, delta, slack).thm1.pass;
    // tau / ln^3 tau decreases up to e^3 and increases afterwards.
    if let Some(tau) = (2..=64).find(|&tau| holds(tau)) {
        return Some(tau);
    }
    let mut hi = 128u64;
    while !holds(hi) {
        if hi >= 1 << 62 {
            return None;
        }
        hi *= 2;
    }
    let mut lo = hi / 2;
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if holds(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Some(hi)
}
