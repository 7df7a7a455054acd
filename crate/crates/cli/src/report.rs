//! Serialized report shapes and CSV rendering.

use std::fmt::Write;

use serde::Serialize;
use tfactor::blowup::PairRegularityReport;
use tfactor::bounds::{Denominator, TailBound};
use tfactor::graph::RegularityReport;
use tfactor::labeling::KappaSummary;
use tfactor::matching::DeltaBound;
use tfactor::pipeline::{
    BlowupPacking, BootstrapSummary, FeasibilityReport, LossBreakdown, MatchingTarget,
    PackingResult,
};
use tfactor::tree::FactorViolation;

use crate::config::ResolvedConfig;

/// Exact coverage plus its decimal value.
#[derive(Debug, Clone, Serialize)]
pub struct Coverage {
    pub num: u64,
    pub den: u64,
    pub value: f64,
}

impl Coverage {
    pub fn new(covered: usize, total: usize) -> Self {
        if total == 0 {
            return Coverage {
                num: 0,
                den: 1,
                value: 0.0,
            };
        }
        let r = num_rational::Ratio::new(covered as u64, total as u64);
        Coverage {
            num: *r.numer(),
            den: *r.denom(),
            value: covered as f64 / total as f64,
        }
    }
}

#[derive(Debug, Serialize)]
pub struct PackReport {
    pub config: ResolvedConfig,
    pub kind: tfactor::pipeline::PipelineKind,
    pub feasibility: FeasibilityReport,
    pub kappa_summary: Option<KappaSummary>,
    pub per_blowup: Vec<BlowupPacking>,
    pub matching_target: Option<MatchingTarget>,
    pub factors_count: usize,
    pub covered_edges: usize,
    pub total_edges: usize,
    pub coverage: Coverage,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub loss_breakdown: Option<LossBreakdown>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bootstrap: Option<BootstrapSummary>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub sweep: Vec<SweepRow>,
    pub diagnostics: Vec<String>,
    pub seed: u64,
    pub version: &'static str,
}

impl PackReport {
    pub fn new(config: ResolvedConfig, res: PackingResult, sweep: Vec<SweepRow>) -> Self {
        PackReport {
            seed: config.seed,
            config,
            kind: res.kind,
            feasibility: res.feasibility,
            kappa_summary: res.kappa,
            per_blowup: res.per_blowup,
            matching_target: res.target,
            factors_count: res.factors.len(),
            covered_edges: res.covered_edges,
            total_edges: res.total_edges,
            coverage: Coverage::new(res.covered_edges, res.total_edges),
            loss_breakdown: res.loss_breakdown,
            bootstrap: res.bootstrap,
            sweep,
            diagnostics: res.diagnostics,
            version: tfactor::VERSION,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SweepRow {
    pub r: usize,
    pub factors: usize,
    pub covered_edges: usize,
    pub total_edges: usize,
    pub coverage: Coverage,
}

impl SweepRow {
    pub fn new(r: usize, res: &PackingResult) -> Self {
        SweepRow {
            r,
            factors: res.factors.len(),
            covered_edges: res.covered_edges,
            total_edges: res.total_edges,
            coverage: Coverage::new(res.covered_edges, res.total_edges),
        }
    }
}

pub fn sweep_csv(rows: &[SweepRow]) -> String {
    let mut s =
        String::from("r,factors,covered_edges,total_edges,coverage_num,coverage_den,coverage\n");
    for row in rows {
        let c = &row.coverage;
        writeln!(
            s,
            "{},{},{},{},{},{},{}",
            row.r, row.factors, row.covered_edges, row.total_edges, c.num, c.den, c.value
        )
        .unwrap();
    }
    s
}

pub fn histogram_csv(k: &KappaSummary) -> String {
    let mut s = String::from("appearances,edges\n");
    for bin in &k.histogram {
        writeln!(s, "{},{}", bin.appearances, bin.edges).unwrap();
    }
    s
}

#[derive(Debug, Serialize)]
pub struct BlowupCertificate {
    pub regular: bool,
    pub sigma: Vec<usize>,
    pub pairs: Vec<PairRegularityReport>,
}

#[derive(Debug, Serialize)]
pub struct CertifyReport {
    pub config: ResolvedConfig,
    pub regular: bool,
    pub regularity: RegularityReport,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub blowup: Option<BlowupCertificate>,
    pub feasibility: FeasibilityReport,
    pub seed: u64,
    pub version: &'static str,
}

#[derive(Debug, Serialize)]
pub struct ChernoffEntry {
    pub mu: f64,
    pub epsilon: f64,
    pub bound: TailBound,
}

#[derive(Debug, Serialize)]
pub struct PermutationEntry {
    pub n: usize,
    pub lipschitz: f64,
    pub deviation: f64,
    pub denominator: Denominator,
    pub bound: TailBound,
}

#[derive(Debug, Serialize)]
pub struct DeltaEntry {
    pub nu: f64,
    pub p: f64,
    pub bound: DeltaBound,
}

#[derive(Debug, Default, Serialize)]
pub struct BoundsReport {
    pub config: Option<ResolvedConfig>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub chernoff: Option<ChernoffEntry>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub permutation: Option<PermutationEntry>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub fk_random_delta: Option<DeltaEntry>,
    pub version: &'static str,
}

impl BoundsReport {
    pub fn is_empty(&self) -> bool {
        self.chernoff.is_none() && self.permutation.is_none() && self.fk_random_delta.is_none()
    }
}

#[derive(Debug, Serialize)]
pub struct ViolationEntry {
    /// Index of the failing factor; absent for a cross-factor shared edge.
    pub factor: Option<usize>,
    pub message: String,
    pub detail: FactorViolation,
}

#[derive(Debug, Serialize)]
pub struct VerifyReport {
    pub config: ResolvedConfig,
    pub valid: bool,
    pub factors_count: usize,
    pub covered_edges: usize,
    pub total_edges: usize,
    pub coverage: Coverage,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub violation: Option<ViolationEntry>,
    pub seed: u64,
    pub version: &'static str,
}
