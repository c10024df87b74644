use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use descent_cli::runner::{exit_code, run, summary, RunOptions};
use descent_cli::scenario::{margin_from_env, parse_window, resolve, ConfigError, Overrides, Scenario, SpacetimeSpec};
use descent_cli::{demo, registry};
use descent_core::report::DescentReport;

#[derive(Parser)]
#[command(name = "descent-wb", about = "Exact descent checks for lattice field theories")]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args, Clone)]
struct Common {
    /// Write the JSON report here.
    #[arg(long, global = true)]
    report: Option<PathBuf>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Time window `t0..t1` for every lattice.
    #[arg(long, global = true)]
    window: Option<String>,
    /// Region cap for sampled universes.
    #[arg(long, global = true)]
    max_universe: Option<usize>,
    #[arg(long, global = true, default_value_t = 1)]
    jobs: usize,
    /// Skip remaining checks after the first unexpected verdict.
    #[arg(long, global = true)]
    fail_fast: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum BackendArg {
    Plane,
    Cylinder,
}

#[derive(Args, Clone)]
struct LatticeArgs {
    /// Restrict to one backend; both built-in lattices otherwise.
    #[arg(long, value_enum)]
    backend: Option<BackendArg>,
    #[arg(long, default_value_t = 6)]
    circumference: i64,
    /// Spatial span `x0..x1` on the plane.
    #[arg(long)]
    span: Option<String>,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run a scenario file.
    Run { scenario: PathBuf },
    /// Run a curated scenario.
    Demo { name: String },
    /// Causality checks on one lattice or the built-in pair.
    CheckCausality(LatticeArgs),
    /// Site, precostack and cover-extension checks.
    CheckSite(LatticeArgs),
    /// List the check registry.
    List,
}

fn lattice_scenario(name: &str, checks: &[&str], a: &LatticeArgs, window: Option<(i64, i64)>) -> Result<Scenario, ConfigError> {
    let mut s = Scenario::new(name, checks);
    if let Some(b) = a.backend {
        let w = window.unwrap_or((0, 7));
        let spec = match b {
            BackendArg::Plane => {
                let span = a.span.as_deref().map(parse_window).transpose()?.unwrap_or((0, 8));
                SpacetimeSpec::plane(w, span)
            }
            BackendArg::Cylinder => SpacetimeSpec::cylinder(a.circumference, w),
        };
        s.spacetimes = vec![spec];
    }
    Ok(s)
}

fn write_report(path: &Option<PathBuf>, r: &DescentReport) -> Result<(), ConfigError> {
    if let Some(p) = path {
        std::fs::write(p, r.to_json()).map_err(|e| ConfigError(format!("{}: {e}", p.display())))?;
    }
    Ok(())
}

fn main_inner(cli: Cli) -> Result<i32, ConfigError> {
    let c = &cli.common;
    let window = c.window.as_deref().map(parse_window).transpose()?;
    let overrides = Overrides { seed: c.seed, window, max_universe: c.max_universe, margin: margin_from_env()? };
    let opts = RunOptions { jobs: c.jobs.max(1), fail_fast: c.fail_fast, timestamp: None };
    let (scenario, is_demo) = match &cli.cmd {
        Cmd::List => {
            for s in registry::REGISTRY {
                let exp: Vec<String> = s.expected.iter().map(|v| format!("{v:?}").to_lowercase()).collect();
                println!("{:<40} expect {:<5} {}", s.id, exp.join("|"), s.about);
            }
            return Ok(0);
        }
        Cmd::Run { scenario } => (Scenario::load(scenario)?, false),
        Cmd::Demo { name } => {
            let s = demo::scenario(name)
                .ok_or_else(|| ConfigError(format!("unknown demo {name:?}; known: {}", demo::NAMES.join(", "))))?;
            (s, true)
        }
        Cmd::CheckCausality(a) => (
            lattice_scenario(
                "check-causality",
                &["causality.double-complement", "causality.development-inside-complement", "causality.lemmas"],
                a,
                window,
            )?,
            false,
        ),
        Cmd::CheckSite(a) => (
            lattice_scenario(
                "check-site",
                &["site.localization-oracle", "site.embedding-faithful", "site.precostack", "site.refuse-non-d-stable", "cover.extension"],
                a,
                window,
            )?,
            false,
        ),
    };
    let report_path = c
        .report
        .clone()
        .or_else(|| scenario.output.report.clone().map(PathBuf::from))
        .or_else(|| is_demo.then(|| PathBuf::from(format!("{}.report.json", scenario.name))));
    let resolved = resolve(scenario, &overrides)?;
    let report = run(&resolved, &opts);
    write_report(&report_path, &report)?;
    if report_path.is_none() {
        print!("{}", report.to_json());
        eprint!("{}", summary(&report));
    } else {
        print!("{}", summary(&report));
        if let Some(p) = &report_path {
            println!("report written to {}", p.display());
        }
    }
    Ok(exit_code(&report))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match main_inner(cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("configuration error: {e}");
            ExitCode::from(2)
        }
    }
}
