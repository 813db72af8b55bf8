//! Command-line front end: config resolution and the experiment commands.
//!
//! Every command writes `resolved_config.json` next to its artifacts. Values
//! come from, in increasing priority: command defaults, the `--config` TOML
//! file, command-line flags.

use std::f64::consts::PI;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};

use crate::analysis::{
    convergence_series, ConvergenceSeries, SeriesOptions, SlopeWindow, SpecTemplate,
    DEFAULT_SAMPLE_PAIRS, OMEGA_INFLATION,
};
use crate::error::{Error, Result};
use crate::grid::{linspace, Grid};
use crate::io::{self, fmt_num};
use crate::kernel::{self, ActivationKernel, SigmoidalGenerator, DEFAULT_TRUNCATION};
use crate::operator::{
    boundedness_constant, shift_constant, DomainBox, FunctionSource, IndexSet, OperatorSpec,
    StancuParams,
};
use crate::par;
use crate::signals::{self, EcgModel, SampledSignal, NOISE_GENERATOR};

pub const THREADS_ENV: &str = "STANCU_NNO_THREADS";
pub const DEFAULT_SEED: u64 = 42;
pub const TABLE_RESOLUTIONS: [u32; 6] = [100, 200, 400, 600, 800, 1000];

#[derive(Debug, Parser)]
#[command(name = "stancu-nno", version, about = "Stancu-type neural network operator experiments")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Approximate a test function for several (alpha, beta) pairs.
    Approximate(RunArgs),
    /// Maximum error E_n over a sweep of n, with fitted log-log slope.
    Converge(RunArgs),
    /// Classical nodes k/n against perturbed nodes (k + alpha)/(n + beta).
    Nodes(RunArgs),
    /// Denoise a seeded noisy synthetic ECG.
    Denoise(RunArgs),
    /// Run the activation kernel invariant suite.
    KernelCheck(RunArgs),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Approximate(_) => "approximate",
            Command::Converge(_) => "converge",
            Command::Nodes(_) => "nodes",
            Command::Denoise(_) => "denoise",
            Command::KernelCheck(_) => "kernel-check",
        }
    }

    pub fn args(&self) -> &RunArgs {
        match self {
            Command::Approximate(a)
            | Command::Converge(a)
            | Command::Nodes(a)
            | Command::Denoise(a)
            | Command::KernelCheck(a) => a,
        }
    }
}

#[derive(Debug, Clone, Default, Args)]
pub struct RunArgs {
    /// TOML config file.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, default_value = "out")]
    pub out: PathBuf,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub n: Option<u32>,
    #[arg(long)]
    pub alpha: Option<f64>,
    #[arg(long)]
    pub beta: Option<f64>,
    #[arg(long = "noise-std")]
    pub noise_std: Option<f64>,
    #[arg(long = "grid-size")]
    pub grid_size: Option<usize>,
    /// denoise: sweep the table resolutions instead of a single n.
    #[arg(long)]
    pub batch: bool,
    /// denoise: read samples from a signal CSV instead of generating them.
    #[arg(long)]
    pub signal: Option<PathBuf>,
    /// kernel-check: truncation half-width for sums over all integers.
    #[arg(long)]
    pub truncation: Option<u32>,
}

/// Contents of a `--config` file. Every key is optional.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub domain: Option<[f64; 2]>,
    pub alpha: Option<f64>,
    pub beta: Option<f64>,
    pub n: Option<u32>,
    pub n_list: Option<Vec<u32>>,
    pub pairs: Option<Vec<[f64; 2]>>,
    pub function: Option<String>,
    pub constant: Option<f64>,
    pub grid_size: Option<usize>,
    pub seed: Option<u64>,
    pub noise_std: Option<f64>,
    pub batch: Option<bool>,
    pub batch_n: Option<Vec<u32>>,
    pub truncation: Option<u32>,
    pub generator: Option<String>,
    pub slope_window: Option<[u32; 2]>,
    pub sample_pairs: Option<usize>,
    pub synthetic_errors: Option<bool>,
    pub signal: Option<PathBuf>,
}

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(format!("config file: {}", e.message())))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_toml(&text)
    }
}

/// Fully resolved settings for one run; serialized as `resolved_config.json`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResolvedConfig {
    pub command: String,
    pub domain: [f64; 2],
    pub alpha: f64,
    pub beta: f64,
    pub n: u32,
    pub n_list: Vec<u32>,
    pub pairs: Vec<[f64; 2]>,
    pub function: String,
    pub constant: f64,
    pub grid_size: usize,
    pub seed: u64,
    pub noise_std: f64,
    pub batch: bool,
    pub batch_n: Vec<u32>,
    pub truncation: u32,
    pub generator: String,
    pub slope_window: Option<[u32; 2]>,
    pub sample_pairs: usize,
    pub synthetic_errors: bool,
    pub signal: Option<PathBuf>,
    #[serde(skip)]
    pub out: PathBuf,
}

fn field_error(field: &str, msg: impl std::fmt::Display) -> Error {
    Error::Config(format!("field '{field}': {msg}"))
}

impl ResolvedConfig {
    pub fn resolve(command: &str, file: RunConfig, args: &RunArgs) -> Result<Self> {
        let (n, alpha, beta, grid_size, function) = match command {
            "approximate" => (50, 0.0, 0.0, 1001, "paper"),
            "converge" => (1000, 0.5, 0.5, 2001, "paper"),
            "nodes" => (50, 0.5, 0.5, 0, "paper"),
            "denoise" => (1000, 0.5, 1.0, signals::DEFAULT_EVAL_POINTS, "ecg"),
            "kernel-check" => (50, 0.0, 0.0, 0, "paper"),
            other => return Err(Error::Config(format!("unknown command '{other}'"))),
        };
        let pair_flag = args.alpha.is_some() || args.beta.is_some() || file.alpha.is_some() || file.beta.is_some();
        let alpha = args.alpha.or(file.alpha).unwrap_or(alpha);
        let beta = args.beta.or(file.beta).unwrap_or(beta);
        let n = args.n.or(file.n).unwrap_or(n);
        let pairs = match (&file.pairs, pair_flag) {
            (_, true) => vec![[alpha, beta]],
            (Some(p), false) => p.clone(),
            (None, false) => vec![[0.0, 0.0], [0.5, 0.5], [1.0, 2.0]],
        };
        let n_list = match (args.n, file.n_list) {
            (Some(n), _) => vec![n],
            (None, Some(list)) => list,
            (None, None) => (1..=100).map(|i| 10 * i).collect(),
        };

        let cfg = Self {
            command: command.to_string(),
            domain: file.domain.unwrap_or([0.0, 1.0]),
            alpha,
            beta,
            n,
            n_list,
            pairs,
            function: file.function.unwrap_or_else(|| function.to_string()),
            constant: file.constant.unwrap_or(1.0),
            grid_size: args.grid_size.or(file.grid_size).unwrap_or(grid_size),
            seed: args.seed.or(file.seed).unwrap_or(DEFAULT_SEED),
            noise_std: args.noise_std.or(file.noise_std).unwrap_or(0.15),
            batch: args.batch || file.batch.unwrap_or(false),
            batch_n: file.batch_n.unwrap_or_else(|| TABLE_RESOLUTIONS.to_vec()),
            truncation: args.truncation.or(file.truncation).unwrap_or(DEFAULT_TRUNCATION),
            generator: file.generator.unwrap_or_else(|| "logistic".to_string()),
            slope_window: file.slope_window,
            sample_pairs: file.sample_pairs.unwrap_or(DEFAULT_SAMPLE_PAIRS),
            synthetic_errors: file.synthetic_errors.unwrap_or(false),
            signal: args.signal.clone().or(file.signal),
            out: args.out.clone(),
        };
        cfg.validate()?;
        Ok(cfg)
    }

    fn validate(&self) -> Result<()> {
        DomainBox::interval(self.domain[0], self.domain[1]).map_err(|e| field_error("domain", e))?;
        StancuParams::new(self.alpha, self.beta).map_err(|e| field_error("alpha/beta", e))?;
        for p in &self.pairs {
            StancuParams::new(p[0], p[1]).map_err(|e| field_error("pairs", e))?;
        }
        if self.n == 0 {
            return Err(field_error("n", "must be at least 1"));
        }
        if self.n_list.is_empty() || self.n_list.contains(&0) {
            return Err(field_error("n_list", "needs positive resolutions"));
        }
        if self.n_list.windows(2).any(|w| w[0] >= w[1]) {
            return Err(field_error("n_list", "must be strictly ascending"));
        }
        if self.batch_n.windows(2).any(|w| w[0] >= w[1]) || self.batch_n.iter().any(|&n| n < 2) {
            return Err(field_error("batch_n", "must be strictly ascending with n >= 2"));
        }
        let needs_grid = matches!(self.command.as_str(), "approximate" | "converge" | "denoise");
        if needs_grid && self.grid_size == 0 {
            return Err(field_error("grid_size", "must be positive"));
        }
        if !(self.noise_std >= 0.0 && self.noise_std.is_finite()) {
            return Err(field_error("noise_std", "must be a finite value >= 0"));
        }
        if let Some([lo, hi]) = self.slope_window {
            if lo > hi {
                return Err(field_error("slope_window", "lower end exceeds upper end"));
            }
        }
        SigmoidalGenerator::from_name(&self.generator).map_err(|e| field_error("generator", e))?;
        test_function(&self.function, self.constant)?;
        Ok(())
    }

    pub fn domain_box(&self) -> Result<DomainBox> {
        DomainBox::interval(self.domain[0], self.domain[1])
    }

    pub fn params(&self) -> Result<StancuParams> {
        StancuParams::new(self.alpha, self.beta)
    }

    pub fn kernel(&self) -> Result<ActivationKernel> {
        Ok(ActivationKernel::new(SigmoidalGenerator::from_name(&self.generator)?, 1)?
            .with_truncation(self.truncation))
    }

    fn grid(&self) -> Vec<f64> {
        linspace(self.domain[0], self.domain[1], self.grid_size)
    }
}

type TestFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// Named one-dimensional test functions.
pub fn test_function(name: &str, constant: f64) -> Result<TestFn> {
    Ok(match name {
        "paper" => Arc::new(|s: f64| (s - 0.5).abs() + (6.0 * PI * s).sin()),
        "identity" => Arc::new(|s: f64| s),
        "constant" => Arc::new(move |_: f64| constant),
        "ecg" => {
            let model = EcgModel::default();
            Arc::new(move |s: f64| model.eval(s))
        }
        other => {
            return Err(field_error(
                "function",
                format!("unknown '{other}' (expected paper, identity, constant or ecg)"),
            ))
        }
    })
}

fn source_of(f: &TestFn) -> FunctionSource {
    let f = Arc::clone(f);
    FunctionSource::analytic(move |s: &[f64]| f(s[0]))
}

#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub files: Vec<PathBuf>,
    /// `false` when an internal check of the command failed.
    pub passed: bool,
    pub summary: String,
}

/// Parses nothing; runs an already-parsed command.
pub fn run(command: &Command) -> Result<RunOutcome> {
    let args = command.args();
    let file = match &args.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    let cfg = ResolvedConfig::resolve(command.name(), file, args)?;
    run_resolved(&cfg)
}

pub fn run_resolved(cfg: &ResolvedConfig) -> Result<RunOutcome> {
    std::fs::create_dir_all(&cfg.out).map_err(|e| Error::io(&cfg.out, e))?;
    let resolved = cfg.out.join("resolved_config.json");
    io::write_json(&resolved, cfg)?;
    let mut outcome = match cfg.command.as_str() {
        "approximate" => cmd_approximate(cfg),
        "converge" => cmd_converge(cfg),
        "nodes" => cmd_nodes(cfg),
        "denoise" => cmd_denoise(cfg),
        "kernel-check" => cmd_kernel_check(cfg),
        other => Err(Error::Config(format!("unknown command '{other}'"))),
    }?;
    outcome.files.insert(0, resolved);
    Ok(outcome)
}

fn pair_label(p: &[f64; 2]) -> String {
    format!("F_a{}_b{}", p[0], p[1])
}

/// Columns `s, f_true, F_a<alpha>_b<beta>...` on a uniform grid.
pub fn cmd_approximate(cfg: &ResolvedConfig) -> Result<RunOutcome> {
    let f = test_function(&cfg.function, cfg.constant)?;
    let grid = cfg.grid();
    let points = Grid::from_1d(grid.clone());
    let columns = cfg
        .pairs
        .iter()
        .map(|p| {
            OperatorSpec::new(
                cfg.domain_box()?,
                cfg.kernel()?,
                cfg.n,
                StancuParams::new(p[0], p[1])?,
                source_of(&f),
            )?
            .evaluate_grid(&points)
        })
        .collect::<Result<Vec<_>>>()?;

    let labels: Vec<String> = cfg.pairs.iter().map(pair_label).collect();
    let mut header = vec!["s", "f_true"];
    header.extend(labels.iter().map(String::as_str));
    let rows = grid.iter().enumerate().map(|(i, &s)| {
        let mut row = vec![fmt_num(s), fmt_num(f(s))];
        row.extend(columns.iter().map(|c| fmt_num(c[i])));
        row
    });
    let path = cfg.out.join("approximate.csv");
    io::write_csv(&path, &header, rows)?;
    Ok(RunOutcome {
        files: vec![path],
        passed: true,
        summary: format!(
            "approximated '{}' at n={} for {} parameter pair(s) on {} points",
            cfg.function,
            cfg.n,
            cfg.pairs.len(),
            grid.len()
        ),
    })
}

#[derive(Serialize)]
struct ConvergenceJson<'a> {
    function: &'a str,
    alpha: f64,
    beta: f64,
    grid_size: usize,
    synthetic_errors: bool,
    rate_constant: f64,
    omega_inflation: f64,
    bound_holds: bool,
    #[serde(flatten)]
    series: &'a ConvergenceSeries,
}

pub fn cmd_converge(cfg: &ResolvedConfig) -> Result<RunOutcome> {
    let window = match cfg.slope_window {
        Some([min_n, max_n]) => SlopeWindow::Range { min_n, max_n },
        None => SlopeWindow::UpperHalf,
    };
    let template = SpecTemplate {
        domain: cfg.domain_box()?,
        kernel: cfg.kernel()?,
        params: cfg.params()?,
        source: source_of(&test_function(&cfg.function, cfg.constant)?),
    };
    let series = if cfg.synthetic_errors {
        let errors: Vec<(u32, f64)> = cfg.n_list.iter().map(|&n| (n, 1.0 / f64::from(n))).collect();
        ConvergenceSeries::from_errors(&errors, window)?
    } else {
        let f = test_function(&cfg.function, cfg.constant)?;
        let truth = move |s: &[f64]| f(s[0]);
        let options = SeriesOptions {
            window,
            bound_pairs: Some(cfg.sample_pairs),
        };
        convergence_series(&template, &truth, &cfg.n_list, &Grid::from_1d(cfg.grid()), options)?
    };
    let bound_holds = series
        .entries
        .iter()
        .all(|e| e.bound.is_none_or(|b| e.report.max_error <= b));
    let rate_constant = boundedness_constant(&template.kernel)
        * (2.0 + shift_constant(&template.domain, &template.params));

    let csv_path = cfg.out.join("convergence.csv");
    io::write_series_csv(&csv_path, &series)?;
    let json_path = cfg.out.join("convergence.json");
    io::write_json(
        &json_path,
        &ConvergenceJson {
            function: &cfg.function,
            alpha: cfg.alpha,
            beta: cfg.beta,
            grid_size: cfg.grid_size,
            synthetic_errors: cfg.synthetic_errors,
            rate_constant,
            omega_inflation: OMEGA_INFLATION,
            bound_holds,
            series: &series,
        },
    )?;
    let slope = series
        .fitted_slope
        .map_or_else(|| "degenerate".to_string(), |s| format!("{s:.4}"));
    Ok(RunOutcome {
        files: vec![csv_path, json_path],
        passed: bound_holds,
        summary: format!(
            "{} resolutions, fitted slope {slope}, bound {}",
            series.entries.len(),
            if bound_holds { "holds" } else { "VIOLATED" }
        ),
    })
}

#[derive(Serialize)]
struct NodesJson {
    n: u32,
    alpha: f64,
    beta: f64,
    shift_constant: f64,
    max_abs_shift: f64,
    shift_bound: f64,
    enclosure: (f64, f64),
    enclosure_holds: bool,
}

/// Columns `k, classical_node, stancu_node, shift`.
pub fn cmd_nodes(cfg: &ResolvedConfig) -> Result<RunOutcome> {
    let domain = cfg.domain_box()?;
    let params = cfg.params()?;
    let index = IndexSet::new(&domain, cfg.n)?;
    let (lo, hi) = index.ranges()[0];
    let nf = f64::from(cfg.n);
    let rows: Vec<(i64, f64, f64)> = (lo..=hi)
        .map(|k| (k, k as f64 / nf, params.node(k, cfg.n)))
        .collect();

    let c1 = shift_constant(&domain, &params);
    let max_abs_shift = rows.iter().map(|r| (r.2 - r.1).abs()).fold(0.0, f64::max);
    let shift_bound = c1 / nf;
    let enclosure = crate::operator::node_bounds(&domain, cfg.n, &params)[0];
    let enclosure_holds = rows.iter().all(|r| enclosure.0 <= r.2 && r.2 <= enclosure.1);

    let csv_path = cfg.out.join("nodes.csv");
    io::write_csv(
        &csv_path,
        &["k", "classical_node", "stancu_node", "shift"],
        rows.iter()
            .map(|&(k, c, s)| vec![k.to_string(), fmt_num(c), fmt_num(s), fmt_num(s - c)]),
    )?;
    let json_path = cfg.out.join("nodes.json");
    let passed = max_abs_shift <= shift_bound && enclosure_holds;
    io::write_json(
        &json_path,
        &NodesJson {
            n: cfg.n,
            alpha: cfg.alpha,
            beta: cfg.beta,
            shift_constant: c1,
            max_abs_shift,
            shift_bound,
            enclosure,
            enclosure_holds,
        },
    )?;
    Ok(RunOutcome {
        files: vec![csv_path, json_path],
        passed,
        summary: format!(
            "{} nodes, max |shift| {max_abs_shift:.6e} <= C1/n {shift_bound:.6e}: {passed}",
            rows.len()
        ),
    })
}

#[derive(Serialize)]
struct DenoiseJson {
    rmse: f64,
    params: signals::DenoiseParams,
    seed: u64,
    generator: &'static str,
    eval_points: usize,
    reconstruction_argmax: f64,
}

#[derive(Serialize)]
struct BatchJson {
    generator: &'static str,
    rows: Vec<BatchRow>,
}

#[derive(Serialize)]
struct BatchRow {
    n: u32,
    rmse: f64,
    params: signals::DenoiseParams,
}

pub fn cmd_denoise(cfg: &ResolvedConfig) -> Result<RunOutcome> {
    let model = EcgModel::default();
    let params = cfg.params()?;
    let grid = linspace(0.0, 1.0, cfg.grid_size);

    if cfg.batch {
        let results = par::map_slice(&cfg.batch_n, |&n| {
            let signal = signals::sample_noisy(&model, n, cfg.noise_std, cfg.seed)?;
            signals::denoise(&signal, params, &grid, &model)
        })
        .into_iter()
        .collect::<Result<Vec<_>>>()?;
        let csv_path = cfg.out.join("denoise_batch.csv");
        io::write_csv(
            &csv_path,
            &["n", "rmse"],
            results.iter().map(|r| vec![r.params.n.to_string(), fmt_num(r.rmse)]),
        )?;
        let json_path = cfg.out.join("denoise_batch.json");
        io::write_json(
            &json_path,
            &BatchJson {
                generator: NOISE_GENERATOR,
                rows: results
                    .iter()
                    .map(|r| BatchRow {
                        n: r.params.n,
                        rmse: r.rmse,
                        params: r.params,
                    })
                    .collect(),
            },
        )?;
        let table = results
            .iter()
            .map(|r| format!("n={:>5}  rmse={:.5}", r.params.n, r.rmse))
            .collect::<Vec<_>>()
            .join("\n");
        return Ok(RunOutcome {
            files: vec![csv_path, json_path],
            passed: true,
            summary: table,
        });
    }

    let signal: SampledSignal = match &cfg.signal {
        Some(path) => io::read_signal_csv(path)?,
        None => signals::sample_noisy(&model, cfg.n, cfg.noise_std, cfg.seed)?,
    };
    let result = signals::denoise(&signal, params, &grid, &model)?;

    let signal_path = cfg.out.join("signal.csv");
    io::write_signal_csv(&signal_path, &signal)?;
    let csv_path = cfg.out.join("denoise.csv");
    io::write_denoise_csv(&csv_path, &result, &signal)?;
    let json_path = cfg.out.join("denoise.json");
    io::write_json(
        &json_path,
        &DenoiseJson {
            rmse: result.rmse,
            params: result.params,
            seed: signal.seed,
            generator: NOISE_GENERATOR,
            eval_points: grid.len(),
            reconstruction_argmax: result.argmax(),
        },
    )?;
    Ok(RunOutcome {
        files: vec![signal_path, csv_path, json_path],
        passed: true,
        summary: format!("n={} rmse={:.6}", signal.n, result.rmse),
    })
}

pub fn cmd_kernel_check(cfg: &ResolvedConfig) -> Result<RunOutcome> {
    let report = kernel::run_checks(&cfg.kernel()?);
    let path = cfg.out.join("kernel_check.json");
    io::write_json(&path, &report)?;
    let summary = report
        .checks
        .iter()
        .map(|c| {
            format!(
                "[{}] {:<26} residual {:.3e} (threshold {:.1e})",
                if c.passed { "PASS" } else { "FAIL" },
                c.name,
                c.residual,
                c.threshold
            )
        })
        .collect::<Vec<_>>()
        .join("\n");
    Ok(RunOutcome {
        files: vec![path],
        passed: report.all_passed,
        summary,
    })
}
