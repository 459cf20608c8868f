//! Data behind the published figures, regenerated from the simulator.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_3, FRAC_PI_4, PI, TAU};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::output::{Cell, Series, Table};
use super::ExperimentError;
use crate::coin::{Axis, CoinFamily};
use crate::metrology::{metrology_trajectory, MetrologyReport};
use crate::optimize::{maximize_over_theta, optimize_probe, Objective, OptimizeOptions, ProbeProblem, ThetaSearch};
use crate::probe::ProbeSpec;

pub const FIGURE_IDS: [&str; 11] = ["1a", "1b", "2", "3a", "3b", "3c", "3d", "4", "5a", "5b", "5c"];

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FigureOptions {
    /// Points on θ (or α₁) axes.
    pub axis_points: usize,
    /// Last step for the figures plotted against t.
    pub t_long: usize,
    /// Last step for the asymptotic-rate figure.
    pub t_rate: usize,
    pub seed: u64,
}

impl Default for FigureOptions {
    fn default() -> Self {
        Self {
            axis_points: 201,
            t_long: 40,
            t_rate: 10,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FigureData {
    pub id: String,
    pub title: String,
    pub x_label: String,
    pub y_label: String,
    pub table: Table,
    pub series: Vec<Series>,
}

fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n < 2 {
        return vec![lo];
    }
    let h = (hi - lo) / (n - 1) as f64;
    (0..n).map(|i| if i + 1 == n { hi } else { lo + h * i as f64 }).collect()
}

fn lowest(dim: usize) -> ProbeSpec {
    ProbeSpec::lowest(dim).expect("D >= 2")
}

fn middle_qutrit() -> ProbeSpec {
    ProbeSpec::new(vec![PI, PI], vec![0.0, 0.0]).expect("in range")
}

fn qubit(alpha: f64) -> ProbeSpec {
    ProbeSpec::new(vec![alpha], vec![0.0]).expect("in range")
}

/// Reports for t = 1..=t_max at each θ, in θ order.
fn trajectories(family: CoinFamily, dim: usize, thetas: &[f64], probe: &ProbeSpec, t_max: usize) -> Result<Vec<Vec<MetrologyReport>>, ExperimentError> {
    thetas
        .par_iter()
        .map(|&th| Ok(metrology_trajectory(&family, dim, th, probe, t_max)?))
        .collect()
}

fn per_t_series(thetas: &[f64], traj: &[Vec<MetrologyReport>], value: impl Fn(&MetrologyReport) -> f64) -> Vec<Series> {
    let t_max = traj.first().map_or(0, Vec::len);
    (0..t_max)
        .map(|k| Series {
            label: format!("t={}", k + 1),
            points: thetas.iter().zip(traj).map(|(&th, r)| (th, value(&r[k]))).collect(),
        })
        .collect()
}

/// θ vs QFI for x- and y-rotations with a fixed optimal probe, t = 1..6.
fn xy_qfi_vs_theta(id: &str, dim: usize, probe: ProbeSpec, opts: &FigureOptions) -> Result<FigureData, ExperimentError> {
    let thetas = linspace(0.0, 2.0 * TAU, opts.axis_points);
    let x = trajectories(CoinFamily::rotation(Axis::X), dim, &thetas, &probe, 6)?;
    let y = trajectories(CoinFamily::rotation(Axis::Y), dim, &thetas, &probe, 6)?;
    let mut table = Table::new(["theta", "t", "qfi_x", "qfi_y"]);
    for ((&th, rx), ry) in thetas.iter().zip(&x).zip(&y) {
        for (a, b) in rx.iter().zip(ry) {
            table.push(vec![th.into(), a.t.into(), a.qfi.into(), b.qfi.into()]);
        }
    }
    Ok(FigureData {
        id: id.into(),
        title: format!("Max QFI, x/y rotation, D = {dim}"),
        x_label: "theta".into(),
        y_label: "H".into(),
        table,
        series: per_t_series(&thetas, &y, |r| r.qfi),
    })
}

fn fi_vs_theta(id: &str, alpha: f64, opts: &FigureOptions) -> Result<FigureData, ExperimentError> {
    let thetas = linspace(0.0, TAU, opts.axis_points);
    let traj = trajectories(CoinFamily::rotation(Axis::Y), 2, &thetas, &qubit(alpha), 6)?;
    let mut table = Table::new(["theta", "t", "fi", "qfi"]);
    for (&th, rs) in thetas.iter().zip(&traj) {
        for r in rs {
            table.push(vec![th.into(), r.t.into(), r.fi.into(), r.qfi.into()]);
        }
    }
    Ok(FigureData {
        id: id.into(),
        title: format!("Position FI, y rotation, D = 2, alpha_1 = {}", super::output::format_real(alpha)),
        x_label: "theta".into(),
        y_label: "F".into(),
        table,
        series: per_t_series(&thetas, &traj, |r| r.fi),
    })
}

fn fi_vs_alpha(id: &str, theta: f64, opts: &FigureOptions) -> Result<FigureData, ExperimentError> {
    let alphas = linspace(0.0, PI, opts.axis_points);
    let family = CoinFamily::rotation(Axis::Y);
    let traj: Vec<Vec<MetrologyReport>> = alphas
        .par_iter()
        .map(|&a| Ok(metrology_trajectory(&family, 2, theta, &qubit(a), 6)?))
        .collect::<Result<_, ExperimentError>>()?;
    let mut table = Table::new(["alpha_1", "t", "fi", "qfi"]);
    for (&a, rs) in alphas.iter().zip(&traj) {
        for r in rs {
            table.push(vec![a.into(), r.t.into(), r.fi.into(), r.qfi.into()]);
        }
    }
    Ok(FigureData {
        id: id.into(),
        title: format!("Position FI, y rotation, D = 2, theta = {}", super::output::format_real(theta)),
        x_label: "alpha_1".into(),
        y_label: "F".into(),
        table,
        series: per_t_series(&alphas, &traj, |r| r.fi),
    })
}

fn ratio_vs_t(opts: &FigureOptions) -> Result<FigureData, ExperimentError> {
    let thetas = [0.0, PI / 6.0, FRAC_PI_3, FRAC_PI_2, 2.0 * FRAC_PI_3, 5.0 * PI / 6.0, PI];
    let traj = trajectories(CoinFamily::rotation(Axis::Y), 3, &thetas, &middle_qutrit(), opts.t_long)?;
    let mut table = Table::new(["theta", "t", "ratio", "fi", "qfi"]);
    let mut series = Vec::new();
    for (&th, rs) in thetas.iter().zip(&traj) {
        for r in rs {
            table.push(vec![th.into(), r.t.into(), r.ratio.into(), r.fi.into(), r.qfi.into()]);
        }
        series.push(Series {
            label: format!("theta={:.4}", th),
            points: rs.iter().filter_map(|r| r.ratio.map(|v| (r.t as f64, v))).collect(),
        });
    }
    Ok(FigureData {
        id: "2".into(),
        title: "FI/QFI ratio, y rotation, D = 3, probe |0>".into(),
        x_label: "t".into(),
        y_label: "R".into(),
        table,
        series,
    })
}

/// max over probes (and θ for x/y) of H / t², for t = 1..=t_rate.
fn asymptotic_rates(opts: &FigureOptions) -> Result<FigureData, ExperimentError> {
    let mut table = Table::new(["t", "axis", "dim", "theta", "max_qfi", "rate"]);
    let mut series = Vec::new();
    let probe_opts = OptimizeOptions {
        seed: opts.seed,
        ..OptimizeOptions::default()
    };
    for axis in [Axis::Z, Axis::X, Axis::Y] {
        for dim in 2..=4 {
            let mut points = Vec::new();
            for t in 1..=opts.t_rate {
                let (theta, value) = match axis {
                    // θ-independent: any θ will do
                    Axis::Z => {
                        let r = optimize_probe(&ProbeProblem::new(CoinFamily::rotation(axis), dim, 0.5, t), Objective::Qfi, &probe_opts)?;
                        (0.5, r.best_value)
                    }
                    _ => {
                        let mut search = ThetaSearch::new(0.0, TAU, 16 * t + 17);
                        search.scan.seed = opts.seed;
                        search.finish = probe_opts;
                        let r = maximize_over_theta(CoinFamily::rotation(axis), dim, t, Objective::Qfi, &search)?;
                        (r.theta, r.value)
                    }
                };
                let rate = value / (t * t) as f64;
                table.push(vec![t.into(), axis.as_str().into(), dim.into(), theta.into(), value.into(), rate.into()]);
                points.push((t as f64, rate));
            }
            series.push(Series {
                label: format!("{axis} D={dim}"),
                points,
            });
        }
    }
    Ok(FigureData {
        id: "4".into(),
        title: "Maximum QFI / t^2".into(),
        x_label: "t".into(),
        y_label: "max H / t^2".into(),
        table,
        series,
    })
}

fn grover_vs_theta(id: &str, dim: usize, probe: ProbeSpec, opts: &FigureOptions) -> Result<FigureData, ExperimentError> {
    let thetas = linspace(0.0, 0.99, opts.axis_points);
    let traj = trajectories(CoinFamily::Grover, dim, &thetas, &probe, 6)?;
    let mut table = Table::new(["theta", "t", "qfi", "reference"]);
    for (&th, rs) in thetas.iter().zip(&traj) {
        for r in rs {
            table.push(vec![th.into(), r.t.into(), r.qfi.into(), (2.0 / (1.0 - th * th)).into()]);
        }
    }
    let mut series = per_t_series(&thetas, &traj, |r| r.qfi);
    if dim == 2 {
        series.push(Series {
            label: "2/(1-theta^2)".into(),
            points: thetas.iter().map(|&th| (th, 2.0 / (1.0 - th * th))).collect(),
        });
    }
    Ok(FigureData {
        id: id.into(),
        title: format!("QFI, generalized Grover coin, D = {dim}"),
        x_label: "theta".into(),
        y_label: "H".into(),
        table,
        series,
    })
}

fn grover_vs_t(opts: &FigureOptions) -> Result<FigureData, ExperimentError> {
    let runs: [(&str, usize, f64, ProbeSpec); 4] = [
        ("hadamard_d2", 2, std::f64::consts::FRAC_1_SQRT_2, lowest(2)),
        ("grover_d3", 3, 1.0 / 3f64.sqrt(), middle_qutrit()),
        ("half_d2", 2, 0.5, lowest(2)),
        ("half_d3", 3, 0.5, middle_qutrit()),
    ];
    let traj: Vec<Vec<MetrologyReport>> = runs
        .par_iter()
        .map(|(_, dim, th, p)| Ok(metrology_trajectory(&CoinFamily::Grover, *dim, *th, p, opts.t_long)?))
        .collect::<Result<_, ExperimentError>>()?;
    let mut cols = vec!["t".to_string()];
    cols.extend(runs.iter().map(|r| r.0.to_string()));
    let mut table = Table::new(cols);
    for k in 0..opts.t_long {
        let mut row: Vec<Cell> = vec![(k + 1).into()];
        row.extend(traj.iter().map(|rs| Cell::Real(rs[k].qfi)));
        table.push(row);
    }
    let series = runs
        .iter()
        .zip(&traj)
        .map(|(r, rs)| Series {
            label: r.0.into(),
            points: rs.iter().map(|m| (m.t as f64, m.qfi)).collect(),
        })
        .collect();
    Ok(FigureData {
        id: "5c".into(),
        title: "QFI vs t, Hadamard, Grover and theta = 1/2".into(),
        x_label: "t".into(),
        y_label: "H".into(),
        table,
        series,
    })
}

pub fn emit_figure_data(id: &str, opts: &FigureOptions) -> Result<FigureData, ExperimentError> {
    match id {
        "1a" => xy_qfi_vs_theta("1a", 2, lowest(2), opts),
        "1b" => xy_qfi_vs_theta("1b", 3, middle_qutrit(), opts),
        "2" => ratio_vs_t(opts),
        "3a" => fi_vs_theta("3a", 0.0, opts),
        "3b" => fi_vs_theta("3b", FRAC_PI_4, opts),
        "3c" => fi_vs_alpha("3c", FRAC_PI_3, opts),
        "3d" => fi_vs_alpha("3d", FRAC_PI_2, opts),
        "4" => asymptotic_rates(opts),
        "5a" => grover_vs_theta("5a", 2, lowest(2), opts),
        "5b" => grover_vs_theta("5b", 3, middle_qutrit(), opts),
        "5c" => grover_vs_t(opts),
        other => Err(ExperimentError::UnknownFigure(other.into())),
    }
}
