//! Configuration-driven θ × t sweeps and probe optimization runs.

use rayon::prelude::*;

use super::config::{ExperimentConfig, ProbeChoice};
use super::output::{Cell, Series, Table};
use super::ExperimentError;
use crate::metrology::{cramer_rao_bound, fi_qfi_ratio, metrology_trajectory, MetrologyReport};
use crate::optimize::{Objective, OptimizationResult, ProbeProblem, ProbeResponse};
use crate::probe::ProbeSpec;

/// One sweep cell: the report and the probe it was computed for.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub report: MetrologyReport,
    pub probe: ProbeSpec,
}

fn probe_columns(dim: usize) -> Vec<String> {
    (1..dim)
        .map(|i| format!("alpha_{i}"))
        .chain((1..dim).map(|i| format!("gamma_{i}")))
        .collect()
}

fn probe_cells(p: &ProbeSpec) -> impl Iterator<Item = Cell> + '_ {
    p.angles.iter().chain(&p.phases).map(|&v| Cell::Real(v))
}

/// One report per (θ, t), θ-major, in configuration order.
pub fn run_sweep(config: &ExperimentConfig) -> Result<Vec<SweepRow>, ExperimentError> {
    let thetas = config.theta.values();
    let t_range: Vec<usize> = config.steps().collect();
    let rows: Vec<Vec<SweepRow>> = match &config.probe {
        ProbeChoice::Fixed { probe } => thetas
            .par_iter()
            .map(|&theta| {
                let reports = metrology_trajectory(&config.family, config.dim, theta, probe, config.t_max)?;
                Ok(reports
                    .into_iter()
                    .filter(|r| r.t >= config.t_min)
                    .map(|mut report| {
                        report.crlb = cramer_rao_bound(report.qfi, config.measurements);
                        SweepRow {
                            report,
                            probe: probe.clone(),
                        }
                    })
                    .collect())
            })
            .collect::<Result<_, ExperimentError>>()?,
        ProbeChoice::Optimize { objective, .. } => {
            let opts = config.optimize_options();
            let cells: Vec<(f64, usize)> = thetas
                .iter()
                .flat_map(|&th| t_range.iter().map(move |&t| (th, t)))
                .collect();
            let flat = cells
                .par_iter()
                .map(|&(theta, t)| {
                    let problem = ProbeProblem::new(config.family, config.dim, theta, t);
                    let response = ProbeResponse::new(&problem)?;
                    let best = crate::optimize::optimize_response(&response, *objective, &opts)?;
                    let pair = response.pair(&best.best_probe.amplitudes());
                    let mut report = MetrologyReport::from_pair(theta, &pair);
                    report.crlb = cramer_rao_bound(report.qfi, config.measurements);
                    Ok(SweepRow {
                        report,
                        probe: best.best_probe,
                    })
                })
                .collect::<Result<Vec<_>, ExperimentError>>()?;
            flat.chunks(t_range.len()).map(<[SweepRow]>::to_vec).collect()
        }
    };
    Ok(rows.into_iter().flatten().collect())
}

pub fn sweep_table(dim: usize, rows: &[SweepRow]) -> Table {
    let mut cols: Vec<String> = ["theta", "t", "qfi", "fi", "ratio", "entropy", "crlb"]
        .map(String::from)
        .to_vec();
    cols.extend(probe_columns(dim));
    let mut table = Table::new(cols);
    for row in rows {
        let r = &row.report;
        let mut cells = vec![
            r.theta.into(),
            r.t.into(),
            r.qfi.into(),
            r.fi.into(),
            r.ratio.into(),
            r.entropy.into(),
            r.crlb.into(),
        ];
        cells.extend(probe_cells(&row.probe));
        table.push(cells);
    }
    table
}

/// QFI curves for plotting: one series per t over θ, or a single series over
/// t when the θ grid has one point.
pub fn sweep_series(rows: &[SweepRow], value: impl Fn(&MetrologyReport) -> f64) -> Vec<Series> {
    let mut ts: Vec<usize> = rows.iter().map(|r| r.report.t).collect();
    ts.sort_unstable();
    ts.dedup();
    let single_theta = rows.iter().all(|r| r.report.theta == rows[0].report.theta);
    if single_theta {
        return vec![Series {
            label: format!("theta={}", super::output::format_real(rows.first().map_or(0.0, |r| r.report.theta))),
            points: rows.iter().map(|r| (r.report.t as f64, value(&r.report))).collect(),
        }];
    }
    ts.into_iter()
        .map(|t| Series {
            label: format!("t={t}"),
            points: rows
                .iter()
                .filter(|r| r.report.t == t)
                .map(|r| (r.report.theta, value(&r.report)))
                .collect(),
        })
        .collect()
}

/// Optimization outcome for one (θ, t) cell.
#[derive(Debug, Clone, PartialEq)]
pub struct OptimizeRow {
    pub theta: f64,
    pub t: usize,
    pub result: OptimizationResult,
    pub qfi: f64,
    pub fi: f64,
}

/// Optimizes the probe at every (θ, t) of the configuration, giving the
/// argmax trajectory in t for each θ. Fixed-probe configurations are
/// optimized for the QFI with default settings.
pub fn run_optimize(config: &ExperimentConfig) -> Result<Vec<OptimizeRow>, ExperimentError> {
    let objective = match config.probe {
        ProbeChoice::Optimize { objective, .. } => objective,
        ProbeChoice::Fixed { .. } => Objective::Qfi,
    };
    let opts = config.optimize_options();
    let cells: Vec<(f64, usize)> = config
        .theta
        .values()
        .into_iter()
        .flat_map(|th| config.steps().map(move |t| (th, t)))
        .collect();
    cells
        .par_iter()
        .map(|&(theta, t)| {
            let problem = ProbeProblem::new(config.family, config.dim, theta, t);
            let response = ProbeResponse::new(&problem)?;
            let result = crate::optimize::optimize_response(&response, objective, &opts)?;
            let chi = result.best_probe.amplitudes();
            Ok(OptimizeRow {
                theta,
                t,
                qfi: response.qfi(&chi),
                fi: response.fi(&chi),
                result,
            })
        })
        .collect()
}

pub fn optimize_table(dim: usize, rows: &[OptimizeRow]) -> Table {
    let mut cols: Vec<String> = [
        "theta",
        "t",
        "objective",
        "value",
        "qfi",
        "fi",
        "ratio",
        "converged",
        "evaluations",
        "grid_resolution",
    ]
    .map(String::from)
    .to_vec();
    cols.extend(probe_columns(dim));
    cols.extend((0..dim).map(|k| format!("abs_chi_{k}")));
    let mut table = Table::new(cols);
    for row in rows {
        let r = &row.result;
        let mut cells = vec![
            row.theta.into(),
            row.t.into(),
            r.objective.to_string().into(),
            r.best_value.into(),
            row.qfi.into(),
            row.fi.into(),
            fi_qfi_ratio(row.fi, row.qfi).ok().into(),
            r.converged.into(),
            r.evaluations.into(),
            r.grid_resolution.into(),
        ];
        cells.extend(probe_cells(&r.best_probe));
        cells.extend(r.best_probe.amplitudes().iter().map(|c| Cell::Real(c.norm())));
        table.push(cells);
    }
    table
}
