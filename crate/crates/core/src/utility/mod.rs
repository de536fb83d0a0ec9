//! Data utility as an earth mover's distance between the variant
//! distributions of two logs, with normalized edit distance as ground cost.
//!
//! `ul` is the cost of the cheapest reallocation of frequency mass from the
//! original log's variants to the anonymized log's variants; `du = 1 - ul`.

mod simplex;

use std::io::Write;
use std::sync::Arc;

use rayon::prelude::*;

use crate::distance::normalized_distance;
use crate::error::{Error, Result};
use crate::event_log::{ActivityTable, EventLog, Variant};
use crate::scalar::{approx_eq, sum, Scalar};

pub use self::simplex::solve;

/// A balanced transportation problem: `supplies` (rows) are moved to
/// `demands` (columns) at `cost[i * n_sinks + j]` per unit.
///
/// Construction validates the problem, so every value of this type has
/// positive masses, balanced totals of one and costs in `[0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct TransportProblem<T> {
    supplies: Vec<T>,
    demands: Vec<T>,
    cost: Vec<T>,
}

impl<T: Scalar> TransportProblem<T> {
    pub fn new(supplies: Vec<T>, demands: Vec<T>, cost: Vec<T>) -> Result<Self> {
        if supplies.is_empty() || demands.is_empty() {
            return Err(Error::Input("transport problem needs sources and sinks".into()));
        }
        if cost.len() != supplies.len() * demands.len() {
            return Err(Error::Input(format!(
                "cost matrix has {} entries, expected {} x {}",
                cost.len(),
                supplies.len(),
                demands.len()
            )));
        }
        if let Some(c) = cost.iter().find(|c| **c < T::zero() || **c > T::one()) {
            return Err(Error::Input(format!("cost {c} outside [0, 1]")));
        }
        if let Some(m) = supplies.iter().chain(&demands).find(|m| **m <= T::zero()) {
            return Err(Error::Unbalanced(format!("non-positive mass {m}")));
        }
        let tol = T::feasibility_tolerance();
        let (total_supply, total_demand) = (sum(&supplies), sum(&demands));
        if !approx_eq(&total_supply, &total_demand, &tol) {
            return Err(Error::Unbalanced(format!(
                "source mass {total_supply} != sink mass {total_demand}"
            )));
        }
        if !approx_eq(&total_supply, &T::one(), &tol) {
            return Err(Error::Unbalanced(format!(
                "masses sum to {total_supply}, expected 1"
            )));
        }
        Ok(TransportProblem {
            supplies,
            demands,
            cost,
        })
    }

    pub fn n_sources(&self) -> usize {
        self.supplies.len()
    }

    pub fn n_sinks(&self) -> usize {
        self.demands.len()
    }

    pub fn supplies(&self) -> &[T] {
        &self.supplies
    }

    pub fn demands(&self) -> &[T] {
        &self.demands
    }

    pub fn cost(&self, source: usize, sink: usize) -> &T {
        &self.cost[source * self.demands.len() + sink]
    }

    /// Row-major cost matrix.
    pub fn costs(&self) -> &[T] {
        &self.cost
    }

    /// `Σ flow × cost` of an arbitrary plan.
    pub fn objective_of(&self, flows: &[(usize, usize, T)]) -> T {
        flows.iter().fold(T::zero(), |acc, (i, j, f)| {
            acc + f.clone() * self.cost(*i, *j).clone()
        })
    }
}

/// A reallocation: strictly positive flows sorted by `(source, sink)`.
#[derive(Debug, Clone, PartialEq)]
pub struct TransportPlan<T> {
    pub flows: Vec<(usize, usize, T)>,
    pub objective: T,
    /// Simplex pivots performed after the initial basis.
    pub pivots: usize,
}

impl<T: Scalar> TransportPlan<T> {
    pub fn flow(&self, source: usize, sink: usize) -> T {
        self.flows
            .binary_search_by(|(i, j, _)| (*i, *j).cmp(&(source, sink)))
            .map(|k| self.flows[k].2.clone())
            .unwrap_or_else(|_| T::zero())
    }

    pub fn row_sums(&self, n_sources: usize) -> Vec<T> {
        let mut out = vec![T::zero(); n_sources];
        for (i, _, f) in &self.flows {
            out[*i] = out[*i].clone() + f.clone();
        }
        out
    }

    pub fn column_sums(&self, n_sinks: usize) -> Vec<T> {
        let mut out = vec![T::zero(); n_sinks];
        for (_, j, f) in &self.flows {
            out[*j] = out[*j].clone() + f.clone();
        }
        out
    }
}

/// A transport problem between two logs, remembering which variant each
/// row and column stands for.
///
/// Rows are the original log's variants, columns the anonymized log's (the
/// transpose of a tableau that lists the anonymized variants as rows).
#[derive(Debug, Clone)]
pub struct LogTransport<T> {
    pub problem: TransportProblem<T>,
    pub sources: Vec<Variant>,
    pub sinks: Vec<Variant>,
    pub activities: Arc<ActivityTable>,
}

impl<T: Scalar> LogTransport<T> {
    /// Writes `source,sink,mass,cost` rows for every positive flow.
    pub fn write_plan_csv<W: Write>(&self, plan: &TransportPlan<T>, out: W) -> Result<()> {
        let fmt = |v: &Variant| {
            let labels: Vec<&str> = v.iter().map(|&a| self.activities.label(a)).collect();
            format!("<{}>", labels.join(","))
        };
        let mut w = csv::Writer::from_writer(out);
        let to_io = |e: csv::Error| Error::Io(e.into());
        w.write_record(["source", "sink", "mass", "cost"]).map_err(to_io)?;
        for (i, j, f) in &plan.flows {
            w.write_record([
                fmt(&self.sources[*i]),
                fmt(&self.sinks[*j]),
                f.to_f64().to_string(),
                self.problem.cost(*i, *j).to_f64().to_string(),
            ])
            .map_err(to_io)?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Puts both logs' variants into one activity id space.
fn align(original: &EventLog, anonymized: &EventLog) -> Result<(Arc<ActivityTable>, Vec<Variant>)> {
    let (a, b) = (original.activities(), anonymized.activities());
    if a.is_compatible_with(b) {
        let table = if a.len() >= b.len() { a } else { b };
        let sinks = anonymized.variants().iter().map(|(v, _)| v.clone()).collect();
        return Ok((Arc::clone(table), sinks));
    }
    let mut table = (**a).clone();
    let mut sinks = Vec::with_capacity(anonymized.n_variants());
    for (v, _) in anonymized.variants() {
        let ids = v
            .iter()
            .map(|&x| table.intern(b.label(x)))
            .collect::<Result<Vec<_>>>()?;
        sinks.push(Variant::new(ids)?);
    }
    Ok((Arc::new(table), sinks))
}

/// Sources are the original log's variants with their relative
/// frequencies, sinks the anonymized log's; costs are pairwise normalized
/// edit distances. Both sides are in canonical variant order.
pub fn build_problem<T: Scalar>(original: &EventLog, anonymized: &EventLog) -> Result<LogTransport<T>> {
    let (activities, sink_variants) = align(original, anonymized)?;
    let mut sinks: Vec<(Variant, u64)> = sink_variants
        .into_iter()
        .zip(anonymized.variants().iter().map(|(_, c)| *c))
        .collect();
    sinks.sort_by(|a, b| a.0.cmp(&b.0));

    let n_total = original.total_traces();
    let m_total = anonymized.total_traces();
    let supplies: Vec<T> = original
        .variants()
        .iter()
        .map(|(_, c)| T::from_ratio(*c, n_total))
        .collect();
    let demands: Vec<T> = sinks.iter().map(|(_, c)| T::from_ratio(*c, m_total)).collect();
    let cost: Vec<T> = original
        .variants()
        .par_iter()
        .flat_map_iter(|(s, _)| {
            sinks
                .iter()
                .map(move |(d, _)| normalized_distance::<T>(s, d))
        })
        .collect();

    Ok(LogTransport {
        problem: TransportProblem::new(supplies, demands, cost)?,
        sources: original.variants().iter().map(|(v, _)| v.clone()).collect(),
        sinks: sinks.into_iter().map(|(v, _)| v).collect(),
        activities,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct UtilityReport<T> {
    /// Minimal utility loss.
    pub ul: T,
    /// `1 - ul`.
    pub du: T,
    pub plan: TransportPlan<T>,
}

/// Data utility preserved by `anonymized` with respect to `original`.
pub fn data_utility<T: Scalar>(original: &EventLog, anonymized: &EventLog) -> Result<UtilityReport<T>> {
    let transport = build_problem::<T>(original, anonymized)?;
    utility_of(&transport.problem)
}

pub fn utility_of<T: Scalar>(problem: &TransportProblem<T>) -> Result<UtilityReport<T>> {
    let plan = solve(problem)?;
    let ul = plan.objective.clone();
    Ok(UtilityReport {
        du: T::one() - ul.clone(),
        ul,
        plan,
    })
}
