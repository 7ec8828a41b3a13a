use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use tricomi::harness::config::{
    ExponentsConfig, GeometryConfig, ModelConfig, SymbolsConfig,
};
use tricomi::harness::{parse_config, run_scenario, HarnessError, Manifest, RunConfig, Scenario};

#[derive(Debug, Parser)]
#[command(name = "tricomi", version, about = "Numerical experiments for the semilinear generalized Tricomi equation")]
struct Cli {
    /// Directory for CSV/JSON outputs and manifest.json (overrides the config).
    #[arg(long, global = true)]
    output_dir: Option<PathBuf>,
    /// Worker threads for the parallel sections (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Seed for randomised sample points (overrides the config).
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct ConfigArg {
    /// TOML run configuration.
    #[arg(long)]
    config: PathBuf,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run whatever scenario the config names.
    Run(ConfigArg),
    /// Critical exponents and weight windows, printed as CSV.
    Exponents {
        #[arg(long, default_value_t = 1)]
        m: u32,
        #[arg(long, default_value_t = 3)]
        n: u32,
        #[arg(long)]
        p: Option<f64>,
        /// Ranges such as `m=1..6 n=3..8` (inclusive).
        #[arg(long, num_args = 2, value_names = ["M_RANGE", "N_RANGE"])]
        sweep: Option<Vec<String>>,
    },
    /// Cone inequalities for the weight phase, printed as CSV.
    CheckGeometry {
        #[arg(long)]
        m: u32,
        #[arg(long = "M", default_value_t = 2.0)]
        big_m: f64,
        #[arg(long = "T0", default_value_t = 0.5)]
        t0: f64,
        #[arg(long)]
        nu: Option<f64>,
    },
    /// Mode symbols on a (t, lambda) grid, written to symbols.csv.
    Symbols {
        #[arg(long)]
        m: u32,
        /// `t_max,lambda_max,n`
        #[arg(long, default_value = "10,10,50")]
        grid: String,
    },
    SolveLinear(ConfigArg),
    SolveSemilinear(ConfigArg),
    SweepP {
        #[command(flatten)]
        config: ConfigArg,
        /// Comma-separated exponents, overriding `semilinear.p_grid`.
        #[arg(long, value_delimiter = ',')]
        p_grid: Option<Vec<f64>>,
    },
    VerifyStrichartz(ConfigArg),
}

fn load(path: &PathBuf) -> Result<RunConfig> {
    let text = fs::read_to_string(path).map_err(|source| HarnessError::Io {
        path: path.display().to_string(),
        source,
    })?;
    Ok(parse_config(&text)?)
}

fn load_as(path: &PathBuf, scenario: Scenario) -> Result<RunConfig> {
    let mut config = load(path)?;
    config.scenario = scenario;
    Ok(config)
}

fn parse_range(spec: &str, key: &str) -> Result<[u32; 2]> {
    let rest = spec
        .strip_prefix(key)
        .and_then(|s| s.strip_prefix('='))
        .ok_or_else(|| HarnessError::Validation(format!("expected `{key}=a..b`, got {spec:?}")))?;
    let (a, b) = rest
        .split_once("..")
        .ok_or_else(|| HarnessError::Validation(format!("expected a range `a..b`, got {rest:?}")))?;
    let parse = |s: &str| {
        s.trim_start_matches('=')
            .parse::<u32>()
            .map_err(|e| HarnessError::Validation(format!("bad range bound {s:?}: {e}")))
    };
    let (lo, hi) = (parse(a)?, parse(b)?);
    if lo > hi {
        bail!(HarnessError::Validation(format!("empty range {spec:?}")));
    }
    Ok([lo, hi])
}

fn model(m: u32, n: u32) -> ModelConfig {
    ModelConfig { m, n, p: None, eps: None, big_m: 2.0 }
}

fn build_config(command: Command) -> Result<(RunConfig, bool)> {
    Ok(match command {
        Command::Run(c) => (load(&c.config)?, false),
        Command::Exponents { m, n, p, sweep } => {
            let mut config = RunConfig::minimal(Scenario::Exponents, ModelConfig { p, ..model(m, n) });
            if let Some(s) = sweep {
                let (ms, ns) = if s[0].starts_with('n') { (&s[1], &s[0]) } else { (&s[0], &s[1]) };
                config.exponents = Some(ExponentsConfig {
                    sweep_m: Some(parse_range(ms, "m")?),
                    sweep_n: Some(parse_range(ns, "n")?),
                });
            }
            (config, true)
        }
        Command::CheckGeometry { m, big_m, t0, nu } => {
            let mut config =
                RunConfig::minimal(Scenario::CheckGeometry, ModelConfig { big_m, ..model(m, 3) });
            config.geometry = Some(GeometryConfig { t0, nu, ..GeometryConfig::default() });
            (config, true)
        }
        Command::Symbols { m, grid } => {
            let parts: Vec<&str> = grid.split(',').collect();
            let [t, l, k] = parts.as_slice() else {
                bail!(HarnessError::Validation(format!("--grid expects t_max,lambda_max,n, got {grid:?}")));
            };
            let bad = |e: String| HarnessError::Validation(format!("--grid: {e}"));
            let mut config = RunConfig::minimal(Scenario::Symbols, model(m, 3));
            config.symbols = Some(SymbolsConfig {
                t_max: t.trim().parse().map_err(|e| bad(format!("{e}")))?,
                lambda_max: l.trim().parse().map_err(|e| bad(format!("{e}")))?,
                n: k.trim().parse().map_err(|e| bad(format!("{e}")))?,
            });
            (config, false)
        }
        Command::SolveLinear(c) => (load_as(&c.config, Scenario::SolveLinear)?, false),
        Command::SolveSemilinear(c) => (load_as(&c.config, Scenario::SolveSemilinear)?, false),
        Command::SweepP { config, p_grid } => {
            let mut config = load_as(&config.config, Scenario::SweepP)?;
            if let Some(g) = p_grid {
                let mut s = config.semilinear_or_default();
                s.p_grid = Some(g);
                config.semilinear = Some(s);
            }
            (config, false)
        }
        Command::VerifyStrichartz(c) => (load_as(&c.config, Scenario::VerifyStrichartz)?, false),
    })
}

fn print_primary(manifest: &Manifest, dir: &std::path::Path) -> Result<()> {
    for file in manifest.outputs.iter().filter(|f| f.name.ends_with(".csv")) {
        let path = dir.join(&file.name);
        print!("{}", fs::read_to_string(&path).with_context(|| format!("reading {}", path.display()))?);
    }
    Ok(())
}

fn run(cli: Cli) -> Result<()> {
    if let Some(threads) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
            .context("configuring the worker pool")?;
    }
    let (mut config, echo) = build_config(cli.command)?;
    if let Some(dir) = cli.output_dir {
        config.output_dir = dir;
    }
    if let Some(seed) = cli.seed {
        config.seed = seed;
    }
    let manifest = run_scenario(&config)?;
    if echo {
        print_primary(&manifest, &config.output_dir)?;
    } else {
        eprintln!(
            "{}: wrote {} file(s) to {} (checksum {})",
            manifest.scenario.name(),
            manifest.outputs.len(),
            config.output_dir.display(),
            manifest.checksum
        );
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            let code = err.downcast_ref::<HarnessError>().map_or(1, HarnessError::exit_code);
            ExitCode::from(code)
        }
    }
}
