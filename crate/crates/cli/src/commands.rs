use std::path::PathBuf;

use frachs::energy::{
    coercivity_bound, negative_energy_witness, verify_growth, GrowthMesh, GrowthReport, WitnessSummary,
};
use frachs::fracops::{operator_selftest, sobolev_norm, SelftestReport};
use frachs::scenario::Scenario;
use frachs::solver::{
    bvp_weak_residual, concentration_sweep, minimize, solve_bvp, uniform_bound_constant, BvpResidual, SolveResult,
    SolverConfig, SweepReport, SweepTrends,
};
use frachs::spaces::{lambda_norm, verify_potential, EmbeddingConstants, PotentialReport};
use frachs::{Error, Problem};
use serde::Serialize;

use crate::artifacts::{fmt_real, signal_csv, timestamp, to_json, ArtifactWriter, Csv};
use crate::config::{Effective, ExperimentConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Command {
    Check,
    Solve,
    Bvp,
    Sweep,
    OpsSelftest,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Self::Check => "check",
            Self::Solve => "solve",
            Self::Bvp => "bvp",
            Self::Sweep => "sweep",
            Self::OpsSelftest => "ops-selftest",
        }
    }
}

/// Process exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Exit {
    Success,
    Failure,
    Config,
    NotConverged,
    Flagged,
}

impl Exit {
    pub fn code(self) -> i32 {
        match self {
            Self::Success => 0,
            Self::Failure => 1,
            Self::Config => 2,
            Self::NotConverged => 3,
            Self::Flagged => 4,
        }
    }

    fn from_error(e: &Error) -> Self {
        match e {
            Error::Parameter { .. }
            | Error::Interval { .. }
            | Error::GridLength(_)
            | Error::GridSpacing(_)
            | Error::Order(_)
            | Error::SweepLadder
            | Error::BelowThreshold { .. }
            | Error::NotNormalized { .. } => Self::Config,
            Error::Divergence { .. } => Self::NotConverged,
            _ => Self::Failure,
        }
    }
}

pub struct Invocation {
    pub command: Command,
    pub config: ExperimentConfig,
    pub out_dir: PathBuf,
    /// Upper bound on sweep worker threads.
    pub thread_cap: Option<usize>,
}

#[derive(Serialize)]
struct Versions {
    frachs: &'static str,
    frachs_cli: &'static str,
}

#[derive(Serialize)]
struct Manifest<'a> {
    command: &'static str,
    config_hash: String,
    config: String,
    effective: &'a Effective,
    lambda_threshold: Option<f64>,
    lambdas: Vec<f64>,
    threads: usize,
    versions: Versions,
    started: u64,
    finished: u64,
    exit_code: i32,
    files: Vec<String>,
}

struct Context {
    effective: Effective,
    hash: String,
    scenario: Scenario<f64>,
    threshold: Option<f64>,
    lambdas: Vec<f64>,
}

/// Runs one command end to end and returns its exit status. Reports and
/// manifests are written to `inv.out_dir`; diagnostics go to stderr.
pub fn execute(inv: &Invocation) -> Exit {
    let started = timestamp();
    let mut effective = match inv.config.resolve() {
        Ok(e) => e,
        Err(e) => {
            eprintln!("error: {e}");
            return Exit::Config;
        }
    };
    if let Some(cap) = inv.thread_cap {
        effective.solver.threads = effective.solver.threads.min(cap.max(1));
    }
    let scenario = match Scenario::build(effective.scenario.clone()) {
        Ok(s) => s,
        Err(e) => {
            eprintln!("error: invalid scenario: {e}");
            return Exit::Config;
        }
    };
    if inv.command == Command::Sweep {
        let v = effective.ladder.values();
        if v.len() < 3 || v.windows(2).any(|w| w[1] < w[0]) {
            eprintln!("error: {}", Error::SweepLadder);
            return Exit::Config;
        }
    }
    let mut writer = match ArtifactWriter::new(&inv.out_dir, inv.command.name(), &inv.config.short_hash()) {
        Ok(w) => w,
        Err(e) => {
            eprintln!("error: cannot create {}: {e}", inv.out_dir.display());
            return Exit::Failure;
        }
    };
    let mut ctx = Context { effective, hash: inv.config.hash(), scenario, threshold: None, lambdas: Vec::new() };
    let result = match inv.command {
        Command::Check => cmd_check(&mut ctx, &mut writer),
        Command::Solve => cmd_solve(&mut ctx, &mut writer),
        Command::Bvp => cmd_bvp(&mut ctx, &mut writer),
        Command::Sweep => cmd_sweep(&mut ctx, &mut writer),
        Command::OpsSelftest => cmd_ops_selftest(&mut ctx, &mut writer),
    };
    let exit = match result {
        Ok(exit) => exit,
        Err(Failure::Core(e)) => {
            eprintln!("error: {e}");
            Exit::from_error(&e)
        }
        Err(Failure::Io(e)) => {
            eprintln!("error: writing artifacts: {e}");
            Exit::Failure
        }
    };
    let manifest = Manifest {
        command: inv.command.name(),
        config_hash: ctx.hash.clone(),
        config: inv.config.canonical(),
        effective: &ctx.effective,
        lambda_threshold: ctx.threshold,
        lambdas: ctx.lambdas.clone(),
        threads: ctx.effective.solver.threads,
        versions: Versions { frachs: frachs::VERSION, frachs_cli: env!("CARGO_PKG_VERSION") },
        started,
        finished: timestamp(),
        exit_code: exit.code(),
        files: writer.written().to_vec(),
    };
    if let Err(e) = writer.write(".manifest.json", &to_json(&manifest)) {
        eprintln!("error: writing manifest: {e}");
        return Exit::Failure;
    }
    exit
}

enum Failure {
    Core(Error),
    Io(std::io::Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Self::Core(e)
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Self::Io(e)
    }
}

type Outcome = Result<Exit, Failure>;

impl Context {
    fn constants(&mut self) -> Result<EmbeddingConstants<f64>, Failure> {
        let c = self.scenario.constants()?;
        self.threshold = Some(c.lambda_threshold);
        Ok(c)
    }

    fn problem(&mut self, constants: EmbeddingConstants<f64>) -> Result<Problem, Failure> {
        self.lambdas = self.effective.single_lambda.resolve(constants.lambda_threshold);
        Ok(self.scenario.problem(constants, self.lambdas[0])?)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Admissibility {
    pub pass: bool,
    pub label: &'static str,
    pub product: Option<f64>,
    pub constants: Option<EmbeddingConstants<f64>>,
    pub detail: Option<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct CheckReport {
    pub config_hash: String,
    pub pass: bool,
    pub failures: Vec<String>,
    pub admissibility: Admissibility,
    pub potential: PotentialReport,
    pub growth: GrowthReport,
}

/// Hypothesis checks on a scenario, without solving anything.
pub fn check_scenario(scenario: &Scenario<f64>, config_hash: String) -> CheckReport {
    const ADMISSIBILITY: &str = "(L1) admissibility";
    let admissibility = match scenario.constants() {
        Ok(c) => Admissibility {
            pass: true,
            label: ADMISSIBILITY,
            product: Some(c.admissibility_product()),
            constants: Some(c),
            detail: None,
        },
        Err(e) => Admissibility {
            pass: false,
            label: ADMISSIBILITY,
            product: match e {
                Error::Inadmissible { product } => Some(product),
                _ => None,
            },
            constants: None,
            detail: Some(e.to_string()),
        },
    };
    let potential = verify_potential(&scenario.potential, &scenario.grid);
    let mesh = GrowthMesh::standard(scenario.grid, scenario.dim(), scenario.potential.vanishing);
    let growth = verify_growth(&scenario.nonlinearity, &mesh);

    let mut failures = Vec::new();
    if !admissibility.pass {
        failures.push(format!("{}: {}", ADMISSIBILITY, admissibility.detail.clone().unwrap_or_default()));
    }
    for v in &potential.violations {
        failures.push(format!("{}: {} points, worst {:e}", v.label, v.count, v.worst));
    }
    for (label, c) in [("(W1) growth", growth.w1), ("(W2) growth", growth.w2), ("gradient consistency", growth.consistency)] {
        if !c.pass {
            failures.push(format!("{label}: worst margin {:e} at t = {}, |u| = {:e}", c.worst_margin, c.t, c.u_norm));
        }
    }
    CheckReport { config_hash, pass: failures.is_empty(), failures, admissibility, potential, growth }
}

fn cmd_check(ctx: &mut Context, out: &mut ArtifactWriter) -> Outcome {
    let report = check_scenario(&ctx.scenario, ctx.hash.clone());
    ctx.threshold = report.admissibility.constants.map(|c| c.lambda_threshold);
    out.write(".json", &to_json(&report))?;
    if let Some(c) = report.admissibility.constants {
        println!(
            "C_alpha = {:.6}, |{{l<k}}| = {:.6}, product = {:.6}, theta0 = {:.6}, Lambda = {:.6}",
            c.c_alpha,
            c.sublevel_measure,
            c.admissibility_product(),
            c.theta0,
            c.lambda_threshold
        );
    }
    for f in &report.failures {
        println!("FAIL {f}");
    }
    println!("check: {}", if report.pass { "pass" } else { "fail" });
    Ok(if report.pass { Exit::Success } else { Exit::Failure })
}

#[derive(Serialize)]
struct SolveReport<'a> {
    config_hash: &'a str,
    lambda: f64,
    lambda_threshold: f64,
    theta0: f64,
    c_alpha: f64,
    sublevel_measure: f64,
    energy: f64,
    grad_norm: f64,
    iterations: usize,
    converged: bool,
    norm_lambda: f64,
    sup_norm: f64,
    lower_bound_minimum: f64,
    uniform_bound: f64,
    witness: Option<WitnessSummary<f64>>,
    bvp_residual: Option<BvpResidual<f64>>,
    result: &'a SolveResult<f64>,
}

fn solve_report<'a>(
    ctx: &'a Context,
    prob: &Problem,
    c: &EmbeddingConstants<f64>,
    r: &'a SolveResult<f64>,
    bvp_residual: Option<BvpResidual<f64>>,
) -> Result<SolveReport<'a>, Failure> {
    Ok(SolveReport {
        config_hash: &ctx.hash,
        lambda: prob.lambda(),
        lambda_threshold: c.lambda_threshold,
        theta0: c.theta0,
        c_alpha: c.c_alpha,
        sublevel_measure: c.sublevel_measure,
        energy: r.energy,
        grad_norm: r.grad_norm,
        iterations: r.iterations,
        converged: r.converged,
        norm_lambda: lambda_norm(&r.u, prob.sampled_potential(), prob.lambda(), prob.order())?,
        sup_norm: r.u.sup_norm(),
        lower_bound_minimum: coercivity_bound(prob).minimum(),
        uniform_bound: uniform_bound_constant(prob),
        witness: negative_energy_witness(prob).ok().map(|w| w.summary()),
        bvp_residual,
        result: r,
    })
}

fn cmd_solve(ctx: &mut Context, out: &mut ArtifactWriter) -> Outcome {
    let c = ctx.constants()?;
    let prob = ctx.problem(c)?;
    let r = minimize(&prob, &ctx.effective.solver)?;
    out.write(".csv", &signal_csv(&r.u))?;
    out.write(".json", &to_json(&solve_report(ctx, &prob, &c, &r, None)?))?;
    println!(
        "lambda = {:.6} ({:.3} Lambda): energy = {:e}, grad = {:e}, iterations = {}, converged = {}",
        prob.lambda(),
        prob.lambda() / c.lambda_threshold,
        r.energy,
        r.grad_norm,
        r.iterations,
        r.converged
    );
    Ok(if r.converged { Exit::Success } else { Exit::NotConverged })
}

fn cmd_bvp(ctx: &mut Context, out: &mut ArtifactWriter) -> Outcome {
    let c = ctx.constants()?;
    let prob = ctx.problem(c)?;
    let cfg: &SolverConfig = &ctx.effective.solver;
    let r = solve_bvp(&prob, cfg)?;
    let residual = bvp_weak_residual(&r.u, &prob, cfg.probes, cfg.seed)?;
    out.write(".csv", &signal_csv(&r.u))?;
    out.write(".json", &to_json(&solve_report(ctx, &prob, &c, &r, Some(residual))?))?;
    println!(
        "c_tilde = {:e}, ||u~||_alpha = {:e}, grad = {:e}, weak residual = {:e} (whole line), {:e} (on I), converged = {}",
        r.energy,
        sobolev_norm(&r.u, prob.order()),
        r.grad_norm,
        residual.whole_line,
        residual.interval,
        r.converged
    );
    Ok(if r.converged { Exit::Success } else { Exit::NotConverged })
}

#[derive(Serialize)]
struct SweepOutput<'a> {
    config_hash: &'a str,
    constants: EmbeddingConstants<f64>,
    trends: SweepTrends,
    report: &'a SweepReport<f64>,
}

pub const SWEEP_COLUMNS: [&str; 11] = [
    "lambda",
    "c_lambda",
    "c_tilde",
    "tail_mass",
    "weighted_mass",
    "dist_alpha",
    "norm_lambda",
    "grad_norm",
    "iterations",
    "converged",
    "flags",
];

fn sweep_csv(report: &SweepReport<f64>) -> String {
    let mut csv = Csv::new(&SWEEP_COLUMNS);
    for r in &report.rows {
        csv.row([
            fmt_real(r.lambda),
            fmt_real(r.c_lambda),
            fmt_real(r.c_tilde),
            fmt_real(r.tail_mass),
            fmt_real(r.weighted_mass),
            fmt_real(r.dist_alpha),
            fmt_real(r.norm_lambda),
            fmt_real(r.grad_norm),
            r.iterations.to_string(),
            r.converged.to_string(),
            r.flags.join("; ").replace(',', ";"),
        ]);
    }
    csv.into_string()
}

fn cmd_sweep(ctx: &mut Context, out: &mut ArtifactWriter) -> Outcome {
    let c = ctx.constants()?;
    let template = ctx.scenario.problem(c, c.lambda_threshold)?;
    ctx.lambdas = ctx.effective.ladder.resolve(c.lambda_threshold);
    let report = concentration_sweep(&template, &ctx.lambdas, &ctx.effective.solver)?;
    out.write(".csv", &sweep_csv(&report))?;
    let trends = report.trends();
    out.write(".json", &to_json(&SweepOutput { config_hash: &ctx.hash, constants: c, trends, report: &report }))?;
    println!("c_tilde = {:e}, ||u~||_alpha = {:e}, C = {:e}", report.c_tilde, report.bvp_norm_alpha, report.uniform_bound);
    println!("{:>12} {:>13} {:>11} {:>11} {:>11} {:>9}", "lambda", "c_lambda", "tail_mass", "dist_alpha", "norm", "flags");
    for r in &report.rows {
        println!(
            "{:>12.4} {:>13.6e} {:>11.3e} {:>11.3e} {:>11.3e} {:>9}",
            r.lambda,
            r.c_lambda,
            r.tail_mass,
            r.dist_alpha,
            r.norm_lambda,
            if r.flagged() { r.flags.join("; ") } else { "-".into() }
        );
    }
    println!("{trends:?}");
    Ok(if report.flagged() { Exit::Flagged } else { Exit::Success })
}

fn cmd_ops_selftest(ctx: &mut Context, out: &mut ArtifactWriter) -> Outcome {
    let report: SelftestReport =
        operator_selftest(ctx.scenario.grid, ctx.scenario.order, ctx.effective.selftest_trials, ctx.effective.scenario.seed);
    out.write(".json", &to_json(&report))?;
    for c in &report.checks {
        println!(
            "{:<18} worst {:>10.3e}  tol {:>8.1e}  {}{}",
            c.name,
            c.worst,
            c.tolerance,
            if c.pass { "ok" } else { "FAIL" },
            c.detail.as_deref().map(|d| format!("  ({d})")).unwrap_or_default()
        );
    }
    println!("ops-selftest: {}", if report.pass { "pass" } else { "fail" });
    Ok(if report.pass { Exit::Success } else { Exit::Failure })
}
