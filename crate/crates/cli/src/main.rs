mod args;
mod error;
mod input;
mod manifest;
mod report;

use clap::Parser;
use serde::Serialize;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use propest::baselines::{mr_estimate, one_sided_pvalue, storey_estimate, PValueVector};
use propest::simharness::{self, ScenarioConfig};
use propest::{
    default_speed, estimate, Edges, EstimateResult, KernelPair, LocationShiftFamily, NullSpec,
    QuadratureConfig, WeightFn,
};

use args::{
    BaselineArgs, Cli, Command, EstimateArgs, FamilyArgs, KernelTableArgs, NullArgs, NullKind,
    QuadArgs, SimulateArgs, SummaryArgs,
};
use error::CliError;
use manifest::RunManifest;
use report::GroupSummary;

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("propest: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    if let Some(n) = cli.threads {
        if n == 0 {
            return Err(CliError::Usage("--threads must be positive".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Input(e.to_string()))?;
    }
    match &cli.command {
        Command::Estimate(a) => cmd_estimate(a),
        Command::Baselines(a) => cmd_baselines(a),
        Command::Simulate(a) => cmd_simulate(a),
        Command::KernelTable(a) => cmd_kernel_table(a),
        Command::Summary(a) => cmd_summary(a),
    }
}

fn family(args: &FamilyArgs) -> Result<LocationShiftFamily, CliError> {
    Ok(LocationShiftFamily::new(args.family.into(), args.scale)?)
}

fn quad(args: &QuadArgs) -> Result<QuadratureConfig, CliError> {
    Ok(QuadratureConfig::new(
        args.quad_norm,
        args.quad_rule.into(),
    )?)
}

fn required(value: Option<f64>, flag: &str, null: &str) -> Result<f64, CliError> {
    value.ok_or_else(|| CliError::Usage(format!("--null {null} requires --{flag}")))
}

fn null_spec(args: &NullArgs) -> Result<NullSpec, CliError> {
    let spec = match args.null {
        NullKind::Point => NullSpec::Point {
            mu0: required(args.mu0, "mu0", "point")?,
        },
        NullKind::Bounded => NullSpec::BoundedOpen {
            a: required(args.a, "a", "bounded")?,
            b: required(args.b, "b", "bounded")?,
        },
        NullKind::BoundedClosed => NullSpec::BoundedClosed {
            a: required(args.a, "a", "bounded-closed")?,
            b: required(args.b, "b", "bounded-closed")?,
        },
        NullKind::OneSided => NullSpec::OneSidedOpen {
            b: required(args.b, "b", "one-sided")?,
        },
        NullKind::OneSidedClosed => NullSpec::OneSidedClosed {
            b: required(args.b, "b", "one-sided-closed")?,
        },
        NullKind::ExtTrunc2norm => {
            let a = required(args.a, "a", "ext-trunc2norm")?;
            let b = required(args.b, "b", "ext-trunc2norm")?;
            let phi = WeightFn::truncated_square(a.abs().max(b.abs()));
            NullSpec::extension(phi, a, b, Edges::from(args.ext_edges))
        }
    };
    spec.validate()
        .map_err(|e| CliError::Usage(e.to_string()))?;
    Ok(spec)
}

fn create(path: &Path) -> Result<BufWriter<File>, CliError> {
    File::create(path)
        .map(BufWriter::new)
        .map_err(|e| CliError::io(path, e))
}

fn emit_json<T: Serialize>(value: &T, out: Option<&PathBuf>) -> Result<(), CliError> {
    match out {
        Some(path) => {
            let mut w = create(path)?;
            serde_json::to_writer_pretty(&mut w, value)?;
            writeln!(w)
                .and_then(|_| w.flush())
                .map_err(|e| CliError::io(path, e))
        }
        None => {
            let stdout = io::stdout();
            let mut w = stdout.lock();
            serde_json::to_writer_pretty(&mut w, value)?;
            writeln!(w).map_err(|e| CliError::io(Path::new("<stdout>"), e))
        }
    }
}

#[derive(Serialize)]
struct EstimateOutput {
    #[serde(flatten)]
    result: EstimateResult,
    manifest: RunManifest,
}

fn cmd_estimate(args: &EstimateArgs) -> Result<(), CliError> {
    let start = Instant::now();
    let z = input::read_observations(&args.input)?;
    let pair = KernelPair::compose(
        null_spec(&args.null)?,
        family(&args.family)?,
        args.omega.into(),
        quad(&args.quad)?,
    )?;
    let t = match args.t {
        Some(t) => t,
        None => default_speed(z.len(), args.gamma)?,
    };
    let result = estimate(&z, &pair, t)?;
    let manifest = RunManifest::new("estimate", args, None, start.elapsed().as_secs_f64());
    emit_json(&EstimateOutput { result, manifest }, args.out.as_ref())
}

#[derive(Serialize)]
struct BaselineOutput {
    m: usize,
    b: f64,
    lambda: f64,
    mr_pi1_hat: f64,
    storey_pi1_hat: f64,
    manifest: RunManifest,
}

fn cmd_baselines(args: &BaselineArgs) -> Result<(), CliError> {
    let start = Instant::now();
    let z = input::read_observations(&args.input)?;
    let fam = family(&args.family)?;
    let p = PValueVector::new(
        z.iter()
            .map(|&x| one_sided_pvalue(x, args.b, &fam))
            .collect(),
    )?;
    let mr_pi1_hat = mr_estimate(&p)?;
    let storey_pi1_hat = storey_estimate(&p, args.lambda)?;
    let out = BaselineOutput {
        m: p.len(),
        b: args.b,
        lambda: args.lambda,
        mr_pi1_hat,
        storey_pi1_hat,
        manifest: RunManifest::new("baselines", args, None, start.elapsed().as_secs_f64()),
    };
    emit_json(&out, args.out.as_ref())
}

#[derive(Serialize)]
struct SimulationSummary {
    manifest: RunManifest,
    t_used: f64,
    config: ScenarioConfig,
    csv: String,
    estimators: Vec<GroupSummary>,
}

fn summary_path(args: &SimulateArgs) -> PathBuf {
    args.summary
        .clone()
        .unwrap_or_else(|| args.out.with_extension("summary.json"))
}

fn cmd_simulate(args: &SimulateArgs) -> Result<(), CliError> {
    let start = Instant::now();
    let mut config = ScenarioConfig::new(args.scenario.into(), args.m, args.sparsity.into());
    config.reps = args.reps;
    config.seed = args.seed;
    config.gamma = args.gamma;
    config.omega = args.omega.into();
    config.quad = quad(&args.quad)?;
    config.estimators = args.estimators.iter().map(|&e| e.into()).collect();
    config.storey_lambda = args.lambda;
    config
        .validate()
        .map_err(|e| CliError::Usage(e.to_string()))?;

    let report = simharness::run(&config)?;
    let rows = report::rows_from_report(&report);
    let mut w = create(&args.out)?;
    report::write_rows(&rows, &mut w)?;
    w.flush().map_err(|e| CliError::io(&args.out, e))?;

    let summary = SimulationSummary {
        manifest: RunManifest::new(
            "simulate",
            args,
            Some(args.seed),
            start.elapsed().as_secs_f64(),
        ),
        t_used: report.t_used,
        config: report.config.clone(),
        csv: args.out.display().to_string(),
        estimators: report::summarize(&rows),
    };
    emit_json(&summary, Some(&summary_path(args)))
}

fn parse_grid(spec: &str) -> Result<Vec<f64>, CliError> {
    let parts: Vec<&str> = spec.split(':').collect();
    let bad = || CliError::Usage(format!("--grid expects lo:hi:step, got `{spec}`"));
    if parts.len() != 3 {
        return Err(bad());
    }
    let nums: Vec<f64> = parts
        .iter()
        .map(|p| p.trim().parse::<f64>().map_err(|_| bad()))
        .collect::<Result<_, _>>()?;
    let (lo, hi, step) = (nums[0], nums[1], nums[2]);
    if !(lo.is_finite() && hi.is_finite() && step > 0.0 && hi >= lo) {
        return Err(bad());
    }
    let n = ((hi - lo) / step + 1e-9).floor() as usize;
    if n > 10_000_000 {
        return Err(CliError::Usage("--grid has too many points".into()));
    }
    Ok((0..=n).map(|i| lo + i as f64 * step).collect())
}

fn cmd_kernel_table(args: &KernelTableArgs) -> Result<(), CliError> {
    let grid = parse_grid(&args.grid)?;
    let pair = KernelPair::compose(
        null_spec(&args.null)?,
        family(&args.family)?,
        args.omega.into(),
        quad(&args.quad)?,
    )?;
    let kernel = pair.prepare(args.t_k.unwrap_or(args.t))?;
    let sink: Box<dyn Write> = match &args.out {
        Some(path) => Box::new(create(path)?),
        None => Box::new(io::stdout().lock()),
    };
    let mut w = csv::Writer::from_writer(sink);
    w.write_record(["grid_value", "psi", "k"])?;
    for &x in &grid {
        let psi = pair.eval_psi(args.t, x);
        let k = kernel.k(x);
        w.write_record([format!("{x}"), format!("{psi}"), format!("{k}")])?;
    }
    w.flush().map_err(|e| CliError::Input(e.to_string()))
}

#[derive(Serialize)]
struct SummaryOutput {
    estimators: Vec<GroupSummary>,
}

fn cmd_summary(args: &SummaryArgs) -> Result<(), CliError> {
    let file = File::open(&args.input).map_err(|e| CliError::io(&args.input, e))?;
    let rows = report::read_rows(file)?;
    if rows.is_empty() {
        return Err(CliError::Input(format!(
            "{}: no rows",
            args.input.display()
        )));
    }
    emit_json(
        &SummaryOutput {
            estimators: report::summarize(&rows),
        },
        None,
    )
}
