//! Per-replication CSV rows and their grouped summaries.

use serde::{Deserialize, Serialize};
use std::io::{Read, Write};

use propest::simharness::SimulationReport;
use propest::summation::{mean, sample_sd};

use crate::error::CliError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExcessRow {
    pub scenario: String,
    pub m: usize,
    pub sparsity: String,
    pub estimator: String,
    pub rep: usize,
    pub excess: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroupSummary {
    pub scenario: String,
    pub m: usize,
    pub sparsity: String,
    pub estimator: String,
    pub reps: usize,
    pub mean_excess: f64,
    pub sd_excess: f64,
}

pub fn rows_from_report(report: &SimulationReport) -> Vec<ExcessRow> {
    let c = &report.config;
    report
        .estimators
        .iter()
        .flat_map(|e| {
            e.per_rep_excess
                .iter()
                .enumerate()
                .map(move |(rep, &excess)| ExcessRow {
                    scenario: c.scenario.to_string(),
                    m: c.m,
                    sparsity: c.sparsity.to_string(),
                    estimator: e.estimator.to_string(),
                    rep,
                    excess,
                })
        })
        .collect()
}

/// Write rows with the shortest representation that parses back to the same `f64`.
pub fn write_rows<W: Write>(rows: &[ExcessRow], sink: W) -> Result<(), CliError> {
    let mut w = csv::Writer::from_writer(sink);
    w.write_record(["scenario", "m", "sparsity", "estimator", "rep", "excess"])?;
    for r in rows {
        w.write_record([
            r.scenario.clone(),
            r.m.to_string(),
            r.sparsity.clone(),
            r.estimator.clone(),
            r.rep.to_string(),
            format!("{}", r.excess),
        ])?;
    }
    w.flush().map_err(|e| CliError::Input(e.to_string()))?;
    Ok(())
}

pub fn read_rows<R: Read>(source: R) -> Result<Vec<ExcessRow>, CliError> {
    let mut reader = csv::Reader::from_reader(source);
    reader
        .deserialize()
        .map(|r| r.map_err(CliError::from))
        .collect()
}

/// Mean and sd of the excess per (scenario, m, sparsity, estimator), in order of first appearance.
pub fn summarize(rows: &[ExcessRow]) -> Vec<GroupSummary> {
    let mut groups: Vec<(GroupSummary, Vec<f64>)> = Vec::new();
    for r in rows {
        let key = |g: &GroupSummary| {
            g.scenario == r.scenario
                && g.m == r.m
                && g.sparsity == r.sparsity
                && g.estimator == r.estimator
        };
        match groups.iter_mut().find(|(g, _)| key(g)) {
            Some((_, values)) => values.push(r.excess),
            None => groups.push((
                GroupSummary {
                    scenario: r.scenario.clone(),
                    m: r.m,
                    sparsity: r.sparsity.clone(),
                    estimator: r.estimator.clone(),
                    reps: 0,
                    mean_excess: 0.0,
                    sd_excess: 0.0,
                },
                vec![r.excess],
            )),
        }
    }
    groups
        .into_iter()
        .map(|(mut g, values)| {
            g.reps = values.len();
            g.mean_excess = mean(&values);
            g.sd_excess = sample_sd(&values);
            g
        })
        .collect()
}
