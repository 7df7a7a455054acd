//! Randomized packing of edge-disjoint tree factors.
//!
//! A host graph on `n` vertices is split by random permutations into `t`
//! equal parts laid out like a fixed tree `T` (a "blow-up" of `T`). Every
//! host edge is assigned to one of the blow-ups that contains it, each
//! blow-up's super-edges are decomposed into edge-disjoint perfect matchings,
//! and one matching per super-edge is combined into a spanning `T`-factor.
//!
//! Besides the packing pipelines the crate ships the certifiers used to audit
//! a run: degree/co-degree regularity, factor verification, exact crossing
//! probabilities and the concentration bounds the analysis relies on.

pub mod blowup;
pub mod bounds;
mod error;
pub mod graph;
pub mod labeling;
pub mod matching;
pub mod pipeline;
pub mod rng;
pub mod tree;

pub use error::{Error, ParseErrorKind, Result};

/// Crate version embedded in every report.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
