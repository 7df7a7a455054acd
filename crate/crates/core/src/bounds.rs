//! Tail-bound calculators for the two concentration inequalities the
//! analysis uses.

use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TailBound {
    pub value: f64,
    /// The bound says nothing (`value >= 1`).
    pub vacuous: bool,
}

impl TailBound {
    fn new(value: f64) -> Self {
        TailBound {
            value,
            vacuous: value >= 1.0,
        }
    }
}

/// Chernoff bound for a binomial with mean `mu`:
/// `P[|X - mu| > eps mu] <= 2 exp(-eps^2 mu / 3)`.
pub fn chernoff_tail(mu: f64, epsilon: f64) -> TailBound {
    TailBound::new(2.0 * (-epsilon * epsilon * mu / 3.0).exp())
}

/// Which element count goes into the permutation bound's denominator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
pub enum Denominator {
    /// The permutation size `n` itself.
    #[default]
    N,
    /// `n - 1`, for a permutation of the remaining elements after one is
    /// exposed.
    NMinusOne,
}

/// Concentration for a `C`-Lipschitz function of a uniform permutation:
/// `P[|X - E X| >= dev] <= 2 exp(-2 dev^2 / (C^2 n))`.
pub fn permutation_tail(n: u64, lipschitz: f64, deviation: f64) -> TailBound {
    permutation_tail_with(n, lipschitz, deviation, Denominator::N)
}

pub fn permutation_tail_with(
    n: u64,
    lipschitz: f64,
    deviation: f64,
    denominator: Denominator,
) -> TailBound {
    let count = match denominator {
        Denominator::N => n,
        Denominator::NMinusOne => n.saturating_sub(1),
    } as f64;
    TailBound::new(2.0 * (-2.0 * deviation * deviation / (lipschitz * lipschitz * count)).exp())
}
