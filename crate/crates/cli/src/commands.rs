use std::fs::File;
use std::io::BufWriter;
use std::path::Path;
use std::time::Instant;

use pmprivacy::ingest::{ingest_bytes, CsvMapping, InputFormat, TimestampFormat};
use pmprivacy::{
    build_log, build_problem, k_anonymize, risk_profile, stats, utility_of, AnonymizationConfig,
    EventLog, LogStats, RiskCell, RiskProfile, TransportProblem,
};
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use crate::args::{Command, FormatArg, GridArgs, InputArgs};
use crate::report::Report;
use crate::{Failure, Status};

const MAX_REPORTED_RECORD_ERRORS: usize = 10;

pub fn run(command: &Command) -> Result<Report, Failure> {
    match command {
        Command::Stats { log, input } => cmd_stats(log, input),
        Command::Risk { log, input, grid } => cmd_risk(log, input, grid),
        Command::Utility {
            original,
            anonymized,
            input,
            plan_out,
            debug_unbalance,
        } => cmd_utility(original, anonymized, input, plan_out.as_deref(), *debug_unbalance),
        Command::Sweep {
            log,
            input,
            k_values,
            strategy,
            grid,
        } => cmd_sweep(log, input, k_values, *strategy, grid),
    }
}

struct Timer(Vec<(&'static str, f64)>);

impl Timer {
    fn phase<T>(&mut self, name: &'static str, f: impl FnOnce() -> T) -> T {
        let start = Instant::now();
        let out = f();
        self.0.push((name, start.elapsed().as_secs_f64()));
        out
    }
}

struct Loaded {
    log: EventLog,
    summary: Value,
}

fn load(path: &Path, input: &InputArgs) -> Result<Loaded, Failure> {
    let format = match input.format {
        Some(FormatArg::Csv) => InputFormat::Csv,
        Some(FormatArg::Xes) => InputFormat::Xes,
        None => InputFormat::from_path(path).ok_or_else(|| Failure {
            status: Status::Usage,
            message: format!("cannot infer the format of {}; pass --format csv|xes", path.display()),
        })?,
    };
    let bytes = std::fs::read(path).map_err(|e| Failure {
        status: Status::Input,
        message: format!("cannot read {}: {e}", path.display()),
    })?;
    let mapping = CsvMapping::new(&input.case_col, &input.activity_col, &input.time_col);
    let timestamps = input
        .time_format
        .clone()
        .map_or(TimestampFormat::Iso8601, TimestampFormat::Custom);
    let ingested = ingest_bytes(&bytes, format, &mapping, &timestamps).map_err(|e| Failure {
        status: Status::of(&e),
        message: format!("{}: {e}", path.display()),
    })?;

    let what = if format == InputFormat::Csv { "row" } else { "event" };
    if let Some(first) = ingested.errors.first() {
        if input.strict {
            return Err(Failure {
                status: Status::Input,
                message: format!("{}: {what} {}: {}", path.display(), first.index, first.message),
            });
        }
        for e in ingested.errors.iter().take(MAX_REPORTED_RECORD_ERRORS) {
            eprintln!("warning: {}: skipped {what} {}: {}", path.display(), e.index, e.message);
        }
        if ingested.errors.len() > MAX_REPORTED_RECORD_ERRORS {
            eprintln!(
                "warning: {}: {} more {what}s skipped",
                path.display(),
                ingested.errors.len() - MAX_REPORTED_RECORD_ERRORS
            );
        }
    }
    let log = build_log(&ingested.events).map_err(|e| Failure {
        status: Status::of(&e),
        message: format!("{}: {e}", path.display()),
    })?;
    let digest = Sha256::digest(&bytes);
    let summary = json!({
        "path": path.display().to_string(),
        "sha256": format!("{digest:x}"),
        "format": if format == InputFormat::Csv { "csv" } else { "xes" },
        "events": ingested.events.len(),
        "rejected_records": ingested.errors.len(),
    });
    Ok(Loaded { log, summary })
}

fn stats_json(s: &LogStats<f64>) -> Value {
    json!({
        "n_traces": s.n_traces,
        "n_variants": s.n_variants,
        "n_events": s.n_events,
        "n_unique_activities": s.n_unique_activities,
        "trace_uniqueness": s.trace_uniqueness,
    })
}

/// Success and failure counts of a computed grid.
#[derive(Default)]
struct Tally {
    ok: usize,
    failed: Option<Status>,
}

impl Tally {
    fn fail(&mut self, status: Status) {
        self.failed.get_or_insert(status);
    }

    fn status(&self) -> Status {
        match self.failed {
            None => Status::Ok,
            Some(_) if self.ok > 0 => Status::Partial,
            Some(s) => s,
        }
    }
}

fn cells_json(profile: &RiskProfile<f64>, tally: &mut Tally) -> Vec<Value> {
    profile
        .cells
        .iter()
        .map(|(&(bk_type, size), cell)| {
            let mut v = json!({ "type": bk_type.as_str(), "size": size });
            let fields = match cell {
                RiskCell::Score(s) => {
                    tally.ok += 1;
                    json!({ "status": "ok", "cd": s.cd, "td": s.td, "n_candidates": s.n_candidates })
                }
                RiskCell::NoCandidates => {
                    tally.ok += 1;
                    json!({ "status": "no_candidates" })
                }
                RiskCell::ResourceLimit { reached, cap } => {
                    tally.fail(Status::ResourceLimit);
                    json!({ "status": "resource_limit", "reached": reached, "cap": cap })
                }
            };
            v.as_object_mut()
                .unwrap()
                .extend(fields.as_object().unwrap().clone());
            v
        })
        .collect()
}

fn cmd_stats(path: &Path, input: &InputArgs) -> Result<Report, Failure> {
    let mut timer = Timer(Vec::new());
    let loaded = timer.phase("ingest", || load(path, input))?;
    let s = timer.phase("stats", || stats::<f64>(&loaded.log));
    Ok(Report {
        command: "stats",
        inputs: vec![loaded.summary],
        results: stats_json(&s),
        timing: timer.0,
        status: Status::Ok,
    })
}

fn cmd_risk(path: &Path, input: &InputArgs, grid: &GridArgs) -> Result<Report, Failure> {
    let mut timer = Timer(Vec::new());
    let loaded = timer.phase("ingest", || load(path, input))?;
    let profile = timer.phase("risk", || {
        risk_profile::<f64>(&loaded.log, &grid.types.0, &grid.sizes.0, grid.aggregation, grid.cap)
    })?;
    let mut tally = Tally::default();
    let cells = cells_json(&profile, &mut tally);
    Ok(Report {
        command: "risk",
        inputs: vec![loaded.summary],
        results: json!({
            "aggregation": grid.aggregation.as_str(),
            "cap": grid.cap,
            "cells": cells,
            "log_stats": stats_json(&profile.log_stats),
        }),
        timing: timer.0,
        status: tally.status(),
    })
}

fn cmd_utility(
    original: &Path,
    anonymized: &Path,
    input: &InputArgs,
    plan_out: Option<&Path>,
    debug_unbalance: bool,
) -> Result<Report, Failure> {
    let mut timer = Timer(Vec::new());
    let (a, b) = timer.phase("ingest", || Ok::<_, Failure>((load(original, input)?, load(anonymized, input)?)))?;
    let transport = timer.phase("cost_matrix", || build_problem::<f64>(&a.log, &b.log))?;
    let problem = if debug_unbalance {
        let mut supplies = transport.problem.supplies().to_vec();
        supplies[0] += 1e-3;
        TransportProblem::new(
            supplies,
            transport.problem.demands().to_vec(),
            transport.problem.costs().to_vec(),
        )?
    } else {
        transport.problem.clone()
    };
    let report = timer.phase("solve", || utility_of(&problem))?;
    if let Some(path) = plan_out {
        let file = File::create(path).map_err(|e| Failure {
            status: Status::Input,
            message: format!("cannot write {}: {e}", path.display()),
        })?;
        transport.write_plan_csv(&report.plan, BufWriter::new(file))?;
    }
    Ok(Report {
        command: "utility",
        inputs: vec![a.summary, b.summary],
        results: json!({
            "ul": report.ul,
            "du": report.du,
            "n_sources": problem.n_sources(),
            "n_sinks": problem.n_sinks(),
            "n_flows": report.plan.flows.len(),
            "pivots": report.plan.pivots,
            "plan_out": plan_out.map(|p| p.display().to_string()),
        }),
        timing: timer.0,
        status: Status::Ok,
    })
}

fn cmd_sweep(
    path: &Path,
    input: &InputArgs,
    k_values: &[u64],
    strategy: pmprivacy::Strategy,
    grid: &GridArgs,
) -> Result<Report, Failure> {
    let mut timer = Timer(Vec::new());
    let loaded = timer.phase("ingest", || load(path, input))?;
    let mut ks = k_values.to_vec();
    ks.sort_unstable();
    ks.dedup();
    let mut tally = Tally::default();
    let records = timer.phase("sweep", || {
        ks.iter()
            .map(|&k| sweep_point(&loaded.log, k, strategy, grid, &mut tally))
            .collect::<Result<Vec<_>, Failure>>()
    })?;
    Ok(Report {
        command: "sweep",
        inputs: vec![loaded.summary],
        results: json!({
            "strategy": strategy.as_str(),
            "aggregation": grid.aggregation.as_str(),
            "cap": grid.cap,
            "records": records,
        }),
        timing: timer.0,
        status: tally.status(),
    })
}

/// One k of a sweep. Failures specific to this k become an error record;
/// only configuration mistakes abort the whole sweep.
fn sweep_point(
    log: &EventLog,
    k: u64,
    strategy: pmprivacy::Strategy,
    grid: &GridArgs,
    tally: &mut Tally,
) -> Result<Value, Failure> {
    let outcome = (|| {
        let cfg = AnonymizationConfig::new(k, strategy)?;
        let anon = k_anonymize(log, &cfg)?;
        let transport = build_problem::<f64>(log, &anon)?;
        let utility = utility_of(&transport.problem)?;
        let profile = risk_profile::<f64>(&anon, &grid.types.0, &grid.sizes.0, grid.aggregation, grid.cap)?;
        Ok::<_, pmprivacy::Error>((anon, utility, profile))
    })();
    match outcome {
        Ok((anon, utility, profile)) => {
            let mut cells = Tally::default();
            let risk = cells_json(&profile, &mut cells);
            match cells.failed {
                Some(s) => tally.fail(s),
                None => tally.ok += 1,
            }
            Ok(json!({
                "k": k,
                "status": "ok",
                "ul": utility.ul,
                "du": utility.du,
                "log_stats": stats_json(&stats(&anon)),
                "risk": risk,
            }))
        }
        Err(e @ pmprivacy::Error::Config(_)) => Err(e.into()),
        Err(e) => {
            tally.fail(Status::of(&e));
            Ok(json!({ "k": k, "status": "error", "error": e.to_string() }))
        }
    }
}
