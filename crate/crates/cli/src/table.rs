//! End-to-end comparison of every strategy family over an instance corpus.

use std::path::{Path, PathBuf};
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::json;

use netrev::netmodel::load_network;
use netrev::oracle::{best_ie_exhaustive, EXHAUSTIVE_LIMIT};
use netrev::revenue::{generalized_ie_revenue, ie_revenue};
use netrev::sdprelax::{sdp_ie, SdpIeParams, SolverOptions};
use netrev::strategies::{generalized_ie, ie_baseline, ie_tuned, GieMode};
use netrev::{Result, SocialNetwork};

use crate::report::{ExperimentReport, InstanceDescriptor};

pub const FAMILIES: [&str; 5] = [
    "ie_baseline",
    "ie_tuned",
    "generalized_ie",
    "sdp_ie",
    "oracle_best_ie",
];

#[derive(Clone, Debug)]
pub struct TableOptions {
    pub corpus: PathBuf,
    pub jobs: usize,
    pub seed: u64,
    pub trials: usize,
    /// Largest instance handed to the exhaustive oracle.
    pub oracle_limit: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TableReport {
    pub corpus: String,
    pub seed: u64,
    pub rows: Vec<ExperimentReport>,
    pub wall_time_s: f64,
}

/// Network files of a corpus directory, sorted by file name.
pub fn corpus_files(dir: &Path) -> Result<Vec<PathBuf>> {
    let mut files: Vec<PathBuf> = std::fs::read_dir(dir)?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| {
            p.extension()
                .is_some_and(|x| x == "txt" || x == "json" || x == "edges")
        })
        .collect();
    files.sort();
    Ok(files)
}

fn timed<T>(f: impl FnOnce() -> Result<T>) -> Result<(T, f64)> {
    let start = Instant::now();
    let v = f()?;
    Ok((v, start.elapsed().as_secs_f64()))
}

/// All families on one instance; rows follow [`FAMILIES`].
pub fn instance_rows(
    name: &str,
    g: &SocialNetwork,
    opts: &TableOptions,
) -> Result<Vec<ExperimentReport>> {
    let desc = InstanceDescriptor::new(name, g);
    let report = |family: &str, params, revenue, seed, secs| {
        let mut r = ExperimentReport::new(desc.clone(), g, family, params, revenue, seed);
        r.wall_time_s = secs;
        r
    };
    let mut rows = Vec::new();

    let (base, t) = timed(|| {
        let s = ie_baseline(g);
        Ok((ie_revenue(g, &s)?, s))
    })?;
    rows.push(report(
        "ie_baseline",
        json!({ "strategy": base.1 }),
        base.0,
        None,
        t,
    ));

    let (tuned, t) = timed(|| ie_tuned(g, opts.seed))?;
    rows.push(report(
        "ie_tuned",
        json!({ "q": tuned.q, "p": tuned.p }),
        tuned.expected_revenue,
        Some(opts.seed),
        t,
    ));

    let (gie, t) = timed(|| {
        let s = generalized_ie(g, 6, GieMode::PaperQ, opts.seed)?;
        Ok((generalized_ie_revenue(g, &s)?, s))
    })?;
    rows.push(report(
        "generalized_ie",
        json!({ "K": gie.1.classes, "q": gie.1.q }),
        gie.0,
        None,
        t,
    ));

    let params = SdpIeParams {
        trials: opts.trials,
        seed: opts.seed,
        ..SdpIeParams::defaults(g.directedness())
    };
    let solver = SolverOptions {
        seed: opts.seed,
        ..Default::default()
    };
    let (sdp, t) = timed(|| sdp_ie(g, &params, &solver))?;
    rows.push(report(
        "sdp_ie",
        json!({
            "p": params.p,
            "gamma": params.gamma,
            "trials": params.trials,
            "strategy": sdp.strategy,
            "expected_revenue": sdp.expected_revenue,
            "sdp_objective": sdp.sdp_objective,
            "solver_converged": sdp.solver_converged,
            "max_violation": sdp.max_violation,
        }),
        sdp.revenue,
        Some(opts.seed),
        t,
    ));

    if g.n() <= opts.oracle_limit.min(EXHAUSTIVE_LIMIT) {
        let (oracle, t) = timed(|| best_ie_exhaustive(g, None))?;
        rows = rows
            .into_iter()
            .map(|r| r.with_oracle("exhaustive_best_ie", oracle.best_value))
            .collect();
        rows.push(
            report(
                "oracle_best_ie",
                json!({ "strategy": oracle.best_witness }),
                oracle.best_value,
                None,
                t,
            )
            .with_oracle("exhaustive_best_ie", oracle.best_value),
        );
    }
    Ok(rows)
}

pub fn run_table(opts: &TableOptions) -> Result<TableReport> {
    let start = Instant::now();
    let files = corpus_files(&opts.corpus)?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(opts.jobs)
        .build()
        .map_err(|e| {
            netrev::Error::Validation(format!("cannot start {} workers: {e}", opts.jobs))
        })?;
    let per_instance: Vec<Vec<ExperimentReport>> = pool.install(|| {
        files
            .par_iter()
            .map(|path| {
                let g = load_network(path)?;
                let name = path
                    .file_stem()
                    .map(|s| s.to_string_lossy().into_owned())
                    .unwrap_or_default();
                instance_rows(&name, &g, opts)
            })
            .collect::<Result<_>>()
    })?;
    Ok(TableReport {
        corpus: opts.corpus.display().to_string(),
        seed: opts.seed,
        rows: per_instance.into_iter().flatten().collect(),
        wall_time_s: start.elapsed().as_secs_f64(),
    })
}

#[derive(Serialize)]
struct CsvRow<'a> {
    instance: &'a str,
    n: usize,
    directed: bool,
    family: &'a str,
    revenue: f64,
    upper_bound: f64,
    ratio: f64,
    oracle_value: Option<f64>,
    oracle_ratio: Option<f64>,
    seed: Option<u64>,
    wall_time_s: f64,
}

pub fn table_csv(report: &TableReport) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in &report.rows {
        w.serialize(CsvRow {
            instance: &r.instance.name,
            n: r.instance.n,
            directed: r.instance.directed,
            family: &r.family,
            revenue: r.revenue,
            upper_bound: r.upper_bound,
            ratio: r.ratio,
            oracle_value: r.oracle.as_ref().map(|o| o.value),
            oracle_ratio: r.oracle.as_ref().map(|o| o.ratio),
            seed: r.seed,
            wall_time_s: r.wall_time_s,
        })
        .expect("csv row serializes");
    }
    String::from_utf8(w.into_inner().expect("in-memory writer")).expect("csv is utf-8")
}
