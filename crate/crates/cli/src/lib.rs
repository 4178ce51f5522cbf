//! Command-line front end: argument definitions and command execution.

pub mod report;
pub mod table;

use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use netrev::certificates::{ratio_certificate, CertificateKind, CertificateParams};
use netrev::netmodel::{
    gadget, generate, load_network, save_network, to_edge_list, GadgetKind, GeneratorKind,
    GeneratorParams,
};
use netrev::oracle::{best_ie_exhaustive, best_strategy_search, simulate, simulate_random_ie};
use netrev::revenue::{
    generalized_ie_revenue, ie_revenue, random_ie_revenue, IeStrategy, Strategy,
};
use netrev::rng::DEFAULT_SEED;
use netrev::sdprelax::{sdp_ie, SdpIeParams, SolverOptions};
use netrev::strategies::{
    generalized_ie, ie_bipartite, ie_tuned, round_to_ie, AlphaSchedule, GieMode, RoundingSchedule,
};
use netrev::SocialNetwork;

use report::{to_sorted_json, ExperimentReport, InstanceDescriptor};
use table::{run_table, table_csv, TableOptions};

pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_VALIDATION: i32 = 2;
pub const EXIT_NOT_CONVERGED: i32 = 3;

#[derive(Debug, Parser)]
#[command(
    name = "netrev",
    version,
    about = "Revenue-maximizing marketing strategies on social networks"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct Common {
    /// Network file: edge list, or JSON when the extension is `.json`.
    #[arg(long)]
    pub input: PathBuf,
    /// Write the report here instead of standard output.
    #[arg(long)]
    pub output: Option<PathBuf>,
    #[arg(long, env = "NETREV_SEED", default_value_t = DEFAULT_SEED)]
    pub seed: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum GenKind {
    Cycle,
    Path,
    CompleteDag,
    Bipartite,
    Random,
    ExtendedTriangle,
    ThreePath,
    SetTriangle,
    SetEdge,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum IeMode {
    Baseline,
    Tuned,
    Bipartite,
    Rounding,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum GieModeArg {
    PaperQ,
    Optimize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OracleMethod {
    Exhaustive,
    Search,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ScheduleArg {
    Piecewise,
    Constant,
    Directed,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate a network.
    Gen {
        #[arg(long, value_enum)]
        kind: GenKind,
        #[arg(long, default_value_t = 0)]
        n: usize,
        #[arg(long)]
        directed: bool,
        #[arg(long, default_value_t = 1.0)]
        density: f64,
        #[arg(long, default_value_t = 1.0)]
        weight_min: f64,
        #[arg(long, default_value_t = 1.0)]
        weight_max: f64,
        /// Size of the first side of a bipartite network.
        #[arg(long)]
        left: Option<usize>,
        /// Directed random networks only get edges `i -> j` with `i < j`.
        #[arg(long)]
        acyclic: bool,
        /// Exploit price of the set-edge gadget.
        #[arg(long = "pricing-prob", default_value_t = 0.5)]
        pricing_prob: f64,
        #[arg(long)]
        output: Option<PathBuf>,
        #[arg(long, env = "NETREV_SEED", default_value_t = DEFAULT_SEED)]
        seed: u64,
    },
    /// Exact expected revenue of a strategy file.
    Eval {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        strategy: PathBuf,
    },
    /// Influence-and-exploit strategies.
    Ie {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum, default_value_t = IeMode::Tuned)]
        mode: IeMode,
        /// Exploit price of the baseline strategy.
        #[arg(long = "pricing-prob")]
        pricing_prob: Option<f64>,
        /// Comma-separated influence set for bipartite mode.
        #[arg(long, value_delimiter = ',')]
        side_a: Vec<usize>,
        /// JSON array of pricing probabilities for rounding mode.
        #[arg(long)]
        prices: Option<PathBuf>,
    },
    /// Generalized IE with K pricing classes.
    Gie {
        #[command(flatten)]
        common: Common,
        #[arg(long = "K", default_value_t = 6)]
        k: usize,
        #[arg(long, value_enum, default_value_t = GieModeArg::PaperQ)]
        mode: GieModeArg,
    },
    /// Relaxation plus rotated hyperplane rounding.
    SdpIe {
        #[command(flatten)]
        common: Common,
        #[arg(long = "pricing-prob")]
        pricing_prob: Option<f64>,
        #[arg(long)]
        gamma: Option<f64>,
        #[arg(long, default_value_t = 1000)]
        trials: usize,
        #[arg(long)]
        rank: Option<usize>,
        #[arg(long)]
        max_iter: Option<usize>,
        /// Compare with the exhaustive best IE at the same price.
        #[arg(long)]
        oracle: bool,
    },
    /// Ground-truth search.
    Oracle {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum, default_value_t = OracleMethod::Exhaustive)]
        method: OracleMethod,
        /// Fix the exploit price of the exhaustive search.
        #[arg(long = "pricing-prob")]
        pricing_prob: Option<f64>,
    },
    /// Numeric certificate of an approximation-ratio expression.
    Certify {
        #[arg(long)]
        kind: CertificateKind,
        #[arg(long)]
        p: Option<f64>,
        #[arg(long)]
        gamma: Option<f64>,
        #[arg(long)]
        lambda: Option<f64>,
        #[arg(long)]
        directed: bool,
        #[arg(long, value_enum)]
        schedule: Option<ScheduleArg>,
        /// Constant schedule slope.
        #[arg(long, default_value_t = 1.43)]
        alpha: f64,
        /// Comma-separated class probabilities.
        #[arg(long, value_delimiter = ',')]
        q: Vec<f64>,
        #[arg(long)]
        grid_step: Option<f64>,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Monte Carlo simulation of the offer process.
    Simulate {
        #[command(flatten)]
        common: Common,
        /// Strategy file; without it, random IE with `--q` and `--pricing-prob`.
        #[arg(long)]
        strategy: Option<PathBuf>,
        #[arg(long)]
        q: Option<f64>,
        #[arg(long = "pricing-prob")]
        pricing_prob: Option<f64>,
        #[arg(long, default_value_t = 1_000_000)]
        trials: u64,
    },
    /// Every strategy family on every instance of a corpus directory.
    Table {
        #[arg(long)]
        corpus: PathBuf,
        #[arg(long, default_value_t = 1)]
        jobs: usize,
        #[arg(long, default_value_t = 1000)]
        trials: usize,
        #[arg(long, default_value_t = 20)]
        oracle_limit: usize,
        #[arg(long)]
        csv: Option<PathBuf>,
        #[arg(long)]
        output: Option<PathBuf>,
        #[arg(long, env = "NETREV_SEED", default_value_t = DEFAULT_SEED)]
        seed: u64,
    },
}

#[derive(Debug)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.message)
    }
}

impl From<netrev::Error> for CliError {
    fn from(e: netrev::Error) -> Self {
        let code = match e {
            netrev::Error::Io(_) => EXIT_FAILURE,
            _ => EXIT_VALIDATION,
        };
        CliError {
            code,
            message: e.to_string(),
        }
    }
}

fn invalid(message: impl Into<String>) -> CliError {
    CliError {
        code: EXIT_VALIDATION,
        message: message.into(),
    }
}

/// Result of one command: text for the output sink and the exit code.
#[derive(Debug)]
pub struct Outcome {
    pub text: String,
    pub output: Option<PathBuf>,
    pub code: i32,
}

impl Outcome {
    fn json(value: &impl serde::Serialize, output: Option<PathBuf>) -> Self {
        Outcome {
            text: to_sorted_json(value) + "\n",
            output,
            code: 0,
        }
    }
}

fn instance(path: &Path) -> Result<(SocialNetwork, InstanceDescriptor), CliError> {
    let g = load_network(path)?;
    let name = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    let desc = InstanceDescriptor::new(name, &g);
    Ok((g, desc))
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError {
        code: EXIT_FAILURE,
        message: format!("{}: {e}", path.display()),
    })?;
    serde_json::from_str(&text).map_err(|e| invalid(format!("{}: {e}", path.display())))
}

fn finish(mut r: ExperimentReport, start: Instant) -> ExperimentReport {
    r.wall_time_s = start.elapsed().as_secs_f64();
    r
}

pub fn run(cli: Cli) -> Result<Outcome, CliError> {
    let start = Instant::now();
    match cli.command {
        Command::Gen {
            kind,
            n,
            directed,
            density,
            weight_min,
            weight_max,
            left,
            acyclic,
            pricing_prob,
            output,
            seed,
        } => {
            let params = GeneratorParams {
                n,
                directed,
                weight_min,
                weight_max,
                density,
                seed,
                left,
                acyclic,
            };
            let g = match kind {
                GenKind::Cycle => generate(GeneratorKind::Cycle, &params)?,
                GenKind::Path => generate(GeneratorKind::Path, &params)?,
                GenKind::CompleteDag => generate(GeneratorKind::CompleteDag, &params)?,
                GenKind::Bipartite => generate(GeneratorKind::Bipartite, &params)?,
                GenKind::Random => generate(GeneratorKind::Random, &params)?,
                GenKind::ExtendedTriangle => gadget(GadgetKind::ExtendedTriangle)?,
                GenKind::ThreePath => gadget(GadgetKind::ThreePath)?,
                GenKind::SetTriangle => gadget(GadgetKind::SetTriangle)?,
                GenKind::SetEdge => gadget(GadgetKind::SetEdge { p: pricing_prob })?,
            };
            match output {
                Some(path) => {
                    save_network(&g, &path)?;
                    let desc = InstanceDescriptor::new(path.display().to_string(), &g);
                    Ok(Outcome::json(
                        &json!({ "instance": desc, "seed": seed }),
                        None,
                    ))
                }
                None => Ok(Outcome {
                    text: to_edge_list(&g)?,
                    output: None,
                    code: 0,
                }),
            }
        }
        Command::Eval { common, strategy } => {
            let (g, desc) = instance(&common.input)?;
            let s: Strategy = read_json(&strategy)?;
            let revenue = s.expected_revenue(&g)?;
            let params = serde_json::to_value(&s).expect("strategy serializes");
            let r = ExperimentReport::new(desc, &g, s.family(), params, revenue, None);
            Ok(Outcome::json(&finish(r, start), common.output))
        }
        Command::Ie {
            common,
            mode,
            pricing_prob,
            side_a,
            prices,
        } => {
            let (g, desc) = instance(&common.input)?;
            let seed = common.seed;
            let r = match mode {
                IeMode::Baseline => {
                    let s = IeStrategy::new(Vec::new(), pricing_prob.unwrap_or(2.0 / 3.0))?;
                    let revenue = ie_revenue(&g, &s)?;
                    ExperimentReport::new(
                        desc,
                        &g,
                        "ie_baseline",
                        json!({ "strategy": s }),
                        revenue,
                        None,
                    )
                }
                IeMode::Tuned => {
                    let t = ie_tuned(&g, seed)?;
                    let sample_revenue = ie_revenue(&g, &t.sample)?;
                    let params = json!({ "q": t.q, "p": t.p, "sample": t.sample, "sample_revenue": sample_revenue });
                    ExperimentReport::new(
                        desc,
                        &g,
                        "ie_tuned",
                        params,
                        t.expected_revenue,
                        Some(seed),
                    )
                }
                IeMode::Bipartite => {
                    let s = ie_bipartite(&g, &side_a)?;
                    let revenue = ie_revenue(&g, &s)?;
                    ExperimentReport::new(
                        desc,
                        &g,
                        "ie_bipartite",
                        json!({ "strategy": s }),
                        revenue,
                        None,
                    )
                }
                IeMode::Rounding => {
                    let path = prices.ok_or_else(|| invalid("rounding mode needs --prices"))?;
                    let p: Vec<f64> = read_json(&path)?;
                    let out = round_to_ie(&g, &p, seed)?;
                    let sample_revenue = ie_revenue(&g, &out.strategy)?;
                    let params = json!({
                        "prices": p,
                        "schedule": out.schedule,
                        "inclusion_probabilities": out.inclusion_probabilities,
                        "sample": out.strategy,
                        "sample_revenue": sample_revenue,
                    });
                    ExperimentReport::new(
                        desc,
                        &g,
                        "ie_rounding",
                        params,
                        out.expected_revenue,
                        Some(seed),
                    )
                }
            };
            Ok(Outcome::json(&finish(r, start), common.output))
        }
        Command::Gie { common, k, mode } => {
            let (g, desc) = instance(&common.input)?;
            let m = match mode {
                GieModeArg::PaperQ => GieMode::PaperQ,
                GieModeArg::Optimize => GieMode::Optimize,
            };
            let s = generalized_ie(&g, k, m, common.seed)?;
            let revenue = generalized_ie_revenue(&g, &s)?;
            let params = json!({ "K": s.classes, "q": s.q, "prices": s.prices() });
            let r = ExperimentReport::new(
                desc,
                &g,
                "generalized_ie",
                params,
                revenue,
                Some(common.seed),
            );
            Ok(Outcome::json(&finish(r, start), common.output))
        }
        Command::SdpIe {
            common,
            pricing_prob,
            gamma,
            trials,
            rank,
            max_iter,
            oracle,
        } => {
            let (g, desc) = instance(&common.input)?;
            let defaults = SdpIeParams::defaults(g.directedness());
            let params = SdpIeParams {
                p: pricing_prob.unwrap_or(defaults.p),
                gamma: gamma.unwrap_or(defaults.gamma),
                trials,
                seed: common.seed,
            };
            let mut solver = SolverOptions {
                rank,
                seed: common.seed,
                ..Default::default()
            };
            if let Some(m) = max_iter {
                solver.max_iter = m;
            }
            let out = sdp_ie(&g, &params, &solver)?;
            let details = json!({
                "p": params.p,
                "gamma": params.gamma,
                "trials": params.trials,
                "strategy": out.strategy,
                "expected_revenue": out.expected_revenue,
                "sdp_objective": out.sdp_objective,
                "solver_converged": out.solver_converged,
                "solver_iterations": out.solver_iterations,
                "max_violation": out.max_violation,
            });
            let mut r =
                ExperimentReport::new(desc, &g, "sdp_ie", details, out.revenue, Some(common.seed));
            if oracle {
                let best = best_ie_exhaustive(&g, Some(params.p))?;
                r = r.with_oracle("exhaustive_best_ie_fixed_p", best.best_value);
            }
            let mut outcome = Outcome::json(&finish(r, start), common.output);
            if !out.solver_converged {
                outcome.code = EXIT_NOT_CONVERGED;
            }
            Ok(outcome)
        }
        Command::Oracle {
            common,
            method,
            pricing_prob,
        } => {
            let (g, desc) = instance(&common.input)?;
            let report = match method {
                OracleMethod::Exhaustive => best_ie_exhaustive(&g, pricing_prob)?,
                OracleMethod::Search => best_strategy_search(&g)?,
            };
            let v = json!({ "instance": desc, "report": report, "wall_time_s": start.elapsed().as_secs_f64() });
            Ok(Outcome::json(&v, common.output))
        }
        Command::Certify {
            kind,
            p,
            gamma,
            lambda,
            directed,
            schedule,
            alpha,
            q,
            grid_step,
            output,
        } => {
            let schedule = schedule.map(|s| match s {
                ScheduleArg::Piecewise => RoundingSchedule::undirected(),
                ScheduleArg::Constant => RoundingSchedule {
                    alpha: AlphaSchedule::Constant { alpha },
                    ..RoundingSchedule::undirected()
                },
                ScheduleArg::Directed => RoundingSchedule::directed(),
            });
            let params = CertificateParams {
                p,
                gamma,
                schedule,
                lambda,
                directed: directed.then_some(true),
                q: (!q.is_empty()).then_some(q),
                grid_step,
            };
            let report = ratio_certificate(kind, &params)?;
            let mut v = serde_json::to_value(&report).expect("certificate serializes");
            v["wall_time_s"] = json!(start.elapsed().as_secs_f64());
            Ok(Outcome::json(&v, output))
        }
        Command::Simulate {
            common,
            strategy,
            q,
            pricing_prob,
            trials,
        } => {
            let (g, desc) = instance(&common.input)?;
            let (family, params, sim, expected) = match strategy {
                Some(path) => {
                    let s: Strategy = read_json(&path)?;
                    let sim = simulate(&g, &s, trials, common.seed)?;
                    let expected = s.expected_revenue(&g)?;
                    (
                        s.family().to_string(),
                        serde_json::to_value(&s).expect("strategy serializes"),
                        sim,
                        expected,
                    )
                }
                None => {
                    let q =
                        q.ok_or_else(|| invalid("give --strategy, or --q and --pricing-prob"))?;
                    let p =
                        pricing_prob.ok_or_else(|| invalid("random IE needs --pricing-prob"))?;
                    let sim = simulate_random_ie(&g, q, p, trials, common.seed)?;
                    (
                        "random_ie".to_string(),
                        json!({ "q": q, "p": p }),
                        sim,
                        random_ie_revenue(&g, q, p)?,
                    )
                }
            };
            let z = if sim.standard_error > 0.0 {
                (sim.mean_revenue - expected) / sim.standard_error
            } else {
                0.0
            };
            let v = json!({
                "instance": desc,
                "family": family,
                "parameters": params,
                "simulation": sim,
                "expected_revenue": expected,
                "z_score": z,
                "seed": common.seed,
                "wall_time_s": start.elapsed().as_secs_f64(),
            });
            Ok(Outcome::json(&v, common.output))
        }
        Command::Table {
            corpus,
            jobs,
            trials,
            oracle_limit,
            csv,
            output,
            seed,
        } => {
            if jobs == 0 {
                return Err(invalid("--jobs must be at least 1"));
            }
            let report = run_table(&TableOptions {
                corpus,
                jobs,
                seed,
                trials,
                oracle_limit,
            })?;
            if let Some(path) = csv {
                std::fs::write(&path, table_csv(&report)).map_err(|e| CliError {
                    code: EXIT_FAILURE,
                    message: format!("{}: {e}", path.display()),
                })?;
            }
            Ok(Outcome::json(&report, output))
        }
    }
}

/// Parses `args`, runs the command and writes its output; returns the exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_VALIDATION } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match run(cli) {
        Ok(outcome) => {
            match &outcome.output {
                Some(path) => {
                    if let Err(e) = std::fs::write(path, &outcome.text) {
                        eprintln!("error: {}: {e}", path.display());
                        return EXIT_FAILURE;
                    }
                }
                None => print!("{}", outcome.text),
            }
            if outcome.code == EXIT_NOT_CONVERGED {
                eprintln!("warning: relaxation solver did not converge");
            }
            outcome.code
        }
        Err(e) => {
            eprintln!("error: {e}");
            e.code
        }
    }
}
