//! `tfactor`: batch front-end for the tree-factor packing pipelines.
//!
//! Exit codes: 0 success, 1 internal error, 2 configuration, 3 I/O,
//! 4 divisibility, 5 failed verification, 6 malformed input file. Errors are
//! printed to stderr as one JSON object with an `error` category.

mod config;
mod report;

use std::path::Path;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use tfactor::blowup::{build_blowup, certify_blowup, is_regular_blowup, PermutationLayout};
use tfactor::bounds::{chernoff_tail, permutation_tail_with, Denominator};
use tfactor::graph::{certify_regular, generate_gnp, read_edge_list, Graph};
use tfactor::matching::fk_random_delta;
use tfactor::pipeline::{
    check_feasibility, pack_bootstrap, pack_pseudo, pack_random, plan_bootstrap, PackingResult,
    PipelineConfig,
};
use tfactor::rng::{self, tag};
use tfactor::tree::{
    check_edge_disjoint, factors_to_text, parse_factors, read_tree, verify_tfactor, TreeTemplate,
};

use config::{ConfigArgs, ResolvedConfig, TreeShape};
use report::*;

#[derive(Parser)]
#[command(
    name = "tfactor",
    version,
    about = "Pack edge-disjoint tree factors into random graphs"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write a G(n, p) edge list.
    Gen(ConfigArgs),
    /// Check (eps, p)-regularity of a host and optionally of a random blow-up.
    Certify(ConfigArgs),
    /// Pack with the pseudo-random pipeline.
    PackPseudo(ConfigArgs),
    /// Pack with the random-graph pipeline.
    PackRandom(ConfigArgs),
    /// Pack through a complete quotient on tau blocks.
    PackBootstrap(ConfigArgs),
    /// Evaluate the tail bounds.
    Bounds(ConfigArgs),
    /// Verify a factor file against a host and tree.
    Verify(ConfigArgs),
}

#[derive(Debug)]
pub enum CliError {
    Config(String),
    Io(String),
    Divisibility(String),
    Parse(String),
    Verification(String),
    Internal(String),
}

impl CliError {
    fn category(&self) -> (&'static str, u8, &str) {
        match self {
            CliError::Config(m) => ("config", 2, m),
            CliError::Io(m) => ("io", 3, m),
            CliError::Divisibility(m) => ("divisibility", 4, m),
            CliError::Verification(m) => ("verification", 5, m),
            CliError::Parse(m) => ("parse", 6, m),
            CliError::Internal(m) => ("internal", 1, m),
        }
    }
}

impl From<tfactor::Error> for CliError {
    fn from(e: tfactor::Error) -> Self {
        use tfactor::Error as E;
        let msg = e.to_string();
        match e {
            E::Divisibility { .. } => CliError::Divisibility(msg),
            E::InvalidParameter(_) => CliError::Config(msg),
            E::Parse { .. } | E::InvalidTree(_) => CliError::Parse(msg),
            E::Io(_) => CliError::Io(msg),
            E::Unverified(_) => CliError::Verification(msg),
            _ => CliError::Internal(msg),
        }
    }
}

type CliResult<T> = Result<T, CliError>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let (category, code, message) = e.category();
            eprintln!(
                "{}",
                serde_json::json!({ "error": category, "message": message })
            );
            ExitCode::from(code)
        }
    }
}

fn run(cmd: Command) -> CliResult<()> {
    match cmd {
        Command::Gen(a) => gen(a.layered()?),
        Command::Certify(a) => certify(a.layered()?),
        Command::PackPseudo(a) => pack(a.layered()?, Mode::Pseudo),
        Command::PackRandom(a) => pack(a.layered()?, Mode::Random),
        Command::PackBootstrap(a) => pack(a.layered()?, Mode::Bootstrap),
        Command::Bounds(a) => bounds(a.layered()?),
        Command::Verify(a) => verify(a.layered()?),
    }
}

fn write_out(path: Option<&Path>, text: &str) -> CliResult<()> {
    match path {
        Some(p) => {
            std::fs::write(p, text).map_err(|e| CliError::Io(format!("{}: {e}", p.display())))
        }
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn emit<T: serde::Serialize>(path: Option<&Path>, report: &T) -> CliResult<()> {
    let mut text =
        serde_json::to_string_pretty(report).map_err(|e| CliError::Internal(e.to_string()))?;
    text.push('\n');
    write_out(path, &text)
}

/// Reads `--input` or generates `G(n, p)` from the seed.
fn host(a: &ConfigArgs, cfg: &mut ResolvedConfig) -> CliResult<Graph> {
    let p = a.p()?;
    let g = match &a.input {
        Some(path) => {
            let g = read_edge_list(path)?;
            if let Some(n) = a.n.filter(|&n| n != g.n()) {
                return Err(CliError::Config(format!(
                    "--n {n} disagrees with the {} vertices of {}",
                    g.n(),
                    path.display()
                )));
            }
            cfg.input = Some(path.display().to_string());
            g
        }
        None => {
            let n = ConfigArgs::require(a.n, "n")?;
            let p = ConfigArgs::require(p, "p")?;
            generate_gnp(n, p, cfg.seed)?
        }
    };
    cfg.n = Some(g.n());
    cfg.p = Some(p.unwrap_or_else(|| g.density()));
    Ok(g)
}

fn template(a: &ConfigArgs, cfg: &mut ResolvedConfig) -> CliResult<TreeTemplate> {
    let tree = match &a.tree {
        Some(path) => {
            let tree = read_tree(path)?;
            if let Some(t) = a.t.filter(|&t| t != tree.t()) {
                return Err(CliError::Config(format!(
                    "--t {t} disagrees with the order-{} tree in {}",
                    tree.t(),
                    path.display()
                )));
            }
            cfg.tree = Some(path.display().to_string());
            tree
        }
        None => {
            let t = ConfigArgs::require(a.t, "t")?;
            let shape = a.tree_shape.unwrap_or(TreeShape::Path);
            cfg.tree = Some(format!("{shape:?}").to_lowercase());
            match shape {
                TreeShape::Path => TreeTemplate::path(t)?,
                TreeShape::Star => TreeTemplate::star(t)?,
            }
        }
    };
    cfg.t = Some(tree.t());
    Ok(tree)
}

fn check_divides(t: usize, n: usize, what: &str) -> CliResult<()> {
    if t == 0 || !n.is_multiple_of(t) {
        return Err(CliError::Divisibility(format!(
            "{what}: {n} is not divisible by {t}"
        )));
    }
    Ok(())
}

fn gen(a: ConfigArgs) -> CliResult<()> {
    let n = ConfigArgs::require(a.n, "n")?;
    let p = ConfigArgs::require(a.p()?, "p")?;
    let g = generate_gnp(n, p, a.seed())?;
    write_out(a.output.as_deref(), &g.to_edge_list())
}

fn certify(a: ConfigArgs) -> CliResult<()> {
    let mut cfg = ResolvedConfig::new("certify", a.seed());
    let epsilon = a.epsilon()?;
    cfg.epsilon = Some(epsilon);
    let g = host(&a, &mut cfg)?;
    let p = cfg.p.unwrap_or(0.0);
    let regularity = certify_regular(&g, epsilon, p)?;
    let blowup = if a.blowup {
        let tree = template(&a, &mut cfg)?;
        check_divides(tree.t(), g.n(), "t | n")?;
        let layout =
            PermutationLayout::random(g.n(), tree.t(), &mut rng::stream(cfg.seed, tag::LAYOUT, 0))?;
        let b = build_blowup(&g, &layout, &tree, false)?;
        let pairs = certify_blowup(&b, epsilon, p)?;
        Some(BlowupCertificate {
            regular: is_regular_blowup(&pairs),
            sigma: layout.sigma().to_vec(),
            pairs,
        })
    } else {
        None
    };
    let slack = a.slack()?;
    cfg.slack = Some(slack);
    emit(
        a.output.as_deref(),
        &CertifyReport {
            feasibility: check_feasibility(g.n(), p, epsilon, slack),
            regular: regularity.is_regular(),
            regularity,
            blowup,
            seed: cfg.seed,
            version: tfactor::VERSION,
            config: cfg,
        },
    )
}

#[derive(Clone, Copy)]
enum Mode {
    Pseudo,
    Random,
    Bootstrap,
}

impl Mode {
    fn name(self) -> &'static str {
        match self {
            Mode::Pseudo => "pack-pseudo",
            Mode::Random => "pack-random",
            Mode::Bootstrap => "pack-bootstrap",
        }
    }
}

fn pack(a: ConfigArgs, mode: Mode) -> CliResult<()> {
    let mut cfg = ResolvedConfig::new(mode.name(), a.seed());
    let epsilon = a.epsilon()?;
    let (scale, slack) = (a.scale()?, a.slack()?);
    cfg.epsilon = Some(epsilon);
    cfg.scale = Some(scale);
    cfg.slack = Some(slack);
    cfg.r_override = a.r_override;
    if matches!(mode, Mode::Bootstrap) {
        cfg.tau = Some(ConfigArgs::require(a.tau, "tau")?);
        cfg.outer_r = a.outer_r.or(a.r_override);
    }
    let tree = template(&a, &mut cfg)?;
    let g = host(&a, &mut cfg)?;
    check_divides(tree.t(), g.n(), "t | n")?;
    if let Some(tau) = cfg.tau {
        check_divides(tree.t(), tau, "t | tau")?;
        check_divides(tau, g.n(), "tau | n")?;
    }

    let base = PipelineConfig {
        epsilon,
        seed: cfg.seed,
        scale,
        r_override: a.r_override,
        slack,
    };
    let run_with = |r: Option<usize>| -> CliResult<PackingResult> {
        Ok(match mode {
            Mode::Pseudo => pack_pseudo(
                &g,
                &tree,
                &PipelineConfig {
                    r_override: r,
                    ..base.clone()
                },
            )?,
            Mode::Random => pack_random(
                &g,
                &tree,
                &PipelineConfig {
                    r_override: r,
                    ..base.clone()
                },
            )?,
            Mode::Bootstrap => {
                let outer = PipelineConfig {
                    r_override: r,
                    ..base.clone()
                };
                let plan = plan_bootstrap(g.n(), &tree, cfg.tau.unwrap_or(0), &outer)?;
                pack_bootstrap(&g, &tree, &plan, &base)?
            }
        })
    };
    let primary_r = match mode {
        Mode::Bootstrap => cfg.outer_r,
        _ => a.r_override,
    };
    let result = run_with(primary_r)?;

    let sweep = match &a.sweep_r {
        Some(rs) => rs
            .iter()
            .map(|&r| run_with(Some(r)).map(|res| SweepRow::new(r, &res)))
            .collect::<CliResult<Vec<_>>>()?,
        None => Vec::new(),
    };
    if let Some(path) = &a.sweep_csv {
        if sweep.is_empty() {
            return Err(CliError::Config("--sweep-csv needs --sweep-r".into()));
        }
        write_out(Some(path), &sweep_csv(&sweep))?;
    }
    if let Some(path) = &a.csv {
        match &result.kappa {
            Some(k) => write_out(Some(path), &histogram_csv(k))?,
            None => {
                return Err(CliError::Config(
                    "--csv histogram is only produced by pack-pseudo and pack-random".into(),
                ))
            }
        }
    }
    if let Some(path) = &a.factors {
        write_out(
            Some(path),
            &factors_to_text(result.n, result.t, &result.factors),
        )?;
    }
    emit(a.output.as_deref(), &PackReport::new(cfg, result, sweep))
}

fn bounds(a: ConfigArgs) -> CliResult<()> {
    let mut cfg = ResolvedConfig::new("bounds", a.seed());
    let mut report = BoundsReport::default();
    if let Some(mu) = a.mu {
        let epsilon = a.epsilon()?;
        cfg.epsilon = Some(epsilon);
        if mu < 0.0 {
            return Err(CliError::Config(format!(
                "mu must be non-negative, got {mu}"
            )));
        }
        report.chernoff = Some(ChernoffEntry {
            mu,
            epsilon,
            bound: chernoff_tail(mu, epsilon),
        });
    }
    if let Some(deviation) = a.deviation {
        let n = ConfigArgs::require(a.n, "n")?;
        let lipschitz = a.lipschitz.unwrap_or(1.0);
        if lipschitz.is_nan() || lipschitz <= 0.0 || deviation < 0.0 {
            return Err(CliError::Config(
                "lipschitz must be positive and deviation non-negative".into(),
            ));
        }
        cfg.n = Some(n);
        let denominator = if a.n_minus_one {
            Denominator::NMinusOne
        } else {
            Denominator::N
        };
        report.permutation = Some(PermutationEntry {
            n,
            lipschitz,
            deviation,
            denominator,
            bound: permutation_tail_with(n as u64, lipschitz, deviation, denominator),
        });
    }
    if let Some(nu) = a.nu {
        let p = ConfigArgs::require(a.p()?, "p")?;
        cfg.p = Some(p);
        report.fk_random_delta = Some(DeltaEntry {
            nu,
            p,
            bound: fk_random_delta(nu, p),
        });
    }
    if report.is_empty() {
        return Err(CliError::Config(
            "bounds needs --mu, --deviation (with --n) or --nu (with --p)".into(),
        ));
    }
    report.config = Some(cfg);
    report.version = tfactor::VERSION;
    emit(a.output.as_deref(), &report)
}

fn verify(a: ConfigArgs) -> CliResult<()> {
    let mut cfg = ResolvedConfig::new("verify", a.seed());
    let path = a
        .factors
        .as_deref()
        .ok_or_else(|| CliError::Config("--factors is required".into()))?;
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    let (n, t, factors) = parse_factors(&text)?;
    let tree = template(
        &ConfigArgs {
            t: a.t.or(Some(t)),
            ..a.clone()
        },
        &mut cfg,
    )?;
    let g = host(&a, &mut cfg)?;
    if g.n() != n || tree.t() != t {
        return Err(CliError::Config(format!(
            "factor file is for n = {n}, t = {t}; host has n = {}, tree has t = {}",
            g.n(),
            tree.t()
        )));
    }
    let mut failure = None;
    for (i, f) in factors.iter().enumerate() {
        if let Err(v) = verify_tfactor(&g, &tree, f) {
            failure = Some((Some(i), v));
            break;
        }
    }
    if failure.is_none() {
        if let Err(v) = check_edge_disjoint(&factors) {
            failure = Some((None, v));
        }
    }
    let covered: usize = factors.iter().map(|f| f.edge_count()).sum();
    let report = VerifyReport {
        valid: failure.is_none(),
        factors_count: factors.len(),
        covered_edges: covered,
        total_edges: g.edge_count(),
        coverage: Coverage::new(covered, g.edge_count()),
        violation: failure.as_ref().map(|(factor, v)| ViolationEntry {
            factor: *factor,
            message: v.to_string(),
            detail: v.clone(),
        }),
        seed: cfg.seed,
        version: tfactor::VERSION,
        config: cfg,
    };
    emit(a.output.as_deref(), &report)?;
    match failure {
        None => Ok(()),
        Some((Some(i), v)) => Err(CliError::Verification(format!("factor {i}: {v}"))),
        Some((None, v)) => Err(CliError::Verification(v.to_string())),
    }
}
