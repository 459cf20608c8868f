//! Flat `key = value` configuration files with dotted keys.
//!
//! ```text
//! # y-rotation, qubit coin
//! coin.family = rotation
//! coin.axis = y
//! coin.dim = 2
//! theta.min = 0
//! theta.max = 4*pi
//! theta.count = 201
//! t.max = 6
//! probe.angles = 0
//! probe.phases = 0
//! output.formats = csv, svg
//! ```
//!
//! Real-valued entries accept small arithmetic expressions over numbers,
//! `pi` and `sqrt(..)`, e.g. `pi/3` or `1/sqrt(3)`.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::figures::FigureOptions;
use super::ExperimentError;
use crate::coin::{Axis, CoinFamily};
use crate::optimize::{Objective, OptimizeOptions};
use crate::probe::ProbeSpec;

/// Largest number of steps a configuration may request.
pub const MAX_STEPS: usize = 4096;
/// Largest θ grid a configuration may request.
pub const MAX_THETA_POINTS: usize = 1_000_000;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ThetaGrid {
    Range { min: f64, max: f64, count: usize },
    List { values: Vec<f64> },
}

impl ThetaGrid {
    pub fn values(&self) -> Vec<f64> {
        match self {
            ThetaGrid::List { values } => values.clone(),
            ThetaGrid::Range { min, max, count } => {
                if *count == 1 {
                    return vec![*min];
                }
                let h = (max - min) / (*count - 1) as f64;
                (0..*count)
                    .map(|i| if i + 1 == *count { *max } else { min + h * i as f64 })
                    .collect()
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum ProbeChoice {
    Fixed { probe: ProbeSpec },
    Optimize { objective: Objective, grid_resolution: usize, random_starts: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct OutputSet {
    pub csv: bool,
    pub jsonl: bool,
    pub svg: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub family: CoinFamily,
    pub dim: usize,
    pub theta: ThetaGrid,
    pub t_min: usize,
    pub t_max: usize,
    pub probe: ProbeChoice,
    pub outputs: OutputSet,
    /// Stem of the output file names.
    pub name: String,
    /// Repetitions N in the Cramér–Rao bound 1/(N H).
    pub measurements: usize,
    pub seed: u64,
}

impl ExperimentConfig {
    pub fn from_file(path: &Path) -> Result<Self, ExperimentError> {
        let text = std::fs::read_to_string(path).map_err(|e| ExperimentError::Usage {
            field: "--config".into(),
            message: format!("cannot read {}: {e}", path.display()),
        })?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self, ExperimentError> {
        let mut raw = RawConfig::parse(text)?;
        let config = Self::from_raw(&mut raw)?;
        raw.finish()?;
        Ok(config)
    }

    fn from_raw(raw: &mut RawConfig) -> Result<Self, ExperimentError> {
        let dim = raw.integer("coin.dim")?.ok_or_else(|| usage("coin.dim", "is required"))?;
        if dim < 2 {
            return Err(usage("coin.dim", "must be at least 2"));
        }
        let family = parse_family(raw)?;
        let theta = parse_theta(raw)?;
        if let ThetaGrid::List { values } = &theta {
            for (i, v) in values.iter().enumerate() {
                family
                    .check_theta(*v)
                    .map_err(|e| usage(&format!("theta.values[{i}]"), &e.to_string()))?;
            }
        }
        if let ThetaGrid::Range { min, max, .. } = theta {
            for (key, v) in [("theta.min", min), ("theta.max", max)] {
                family.check_theta(v).map_err(|e| usage(key, &e.to_string()))?;
            }
        }
        // build once to surface unsupported family/dimension pairs as usage errors
        family
            .build(dim, theta.values()[0])
            .map_err(|e| usage("coin.family", &e.to_string()))?;

        let t_min = raw.integer("t.min")?.unwrap_or(1);
        let t_max = raw.integer("t.max")?.ok_or_else(|| usage("t.max", "is required"))?;
        if t_min < 1 {
            return Err(usage("t.min", "must be at least 1"));
        }
        if t_max < t_min {
            return Err(usage("t.max", "must not be below t.min"));
        }
        if t_max > MAX_STEPS {
            return Err(usage("t.max", &format!("exceeds the engine horizon of {MAX_STEPS} steps")));
        }

        let probe = parse_probe(raw, dim)?;
        let outputs = parse_outputs(raw)?;
        let name = raw.take("output.name").map(|(v, _)| v).unwrap_or_else(|| "run".into());
        if name.is_empty() || name.contains(['/', '\\']) {
            return Err(usage("output.name", "must be a plain, nonempty file stem"));
        }
        let measurements = raw.integer("measurements")?.unwrap_or(1);
        if measurements == 0 {
            return Err(usage("measurements", "must be at least 1"));
        }
        let seed = raw.integer("seed")?.unwrap_or(0) as u64;
        Ok(Self {
            family,
            dim,
            theta,
            t_min,
            t_max,
            probe,
            outputs,
            name,
            measurements,
            seed,
        })
    }

    pub fn steps(&self) -> std::ops::RangeInclusive<usize> {
        self.t_min..=self.t_max
    }

    pub fn optimize_options(&self) -> OptimizeOptions {
        let mut opts = OptimizeOptions {
            seed: self.seed,
            ..OptimizeOptions::default()
        };
        if let ProbeChoice::Optimize {
            grid_resolution,
            random_starts,
            ..
        } = self.probe
        {
            opts.grid_resolution = grid_resolution;
            opts.random_starts = random_starts;
        }
        opts
    }
}

fn usage(field: &str, message: &str) -> ExperimentError {
    ExperimentError::Usage {
        field: field.into(),
        message: message.into(),
    }
}

fn parse_family(raw: &mut RawConfig) -> Result<CoinFamily, ExperimentError> {
    let (kind, _) = raw
        .take("coin.family")
        .ok_or_else(|| usage("coin.family", "is required"))?;
    let axis = raw.take("coin.axis");
    let family = match kind.as_str() {
        "rotation" => {
            let (a, _) = axis.ok_or_else(|| usage("coin.axis", "is required for rotation coins"))?;
            let axis: Axis = a.parse().map_err(|_| usage("coin.axis", "must be x, y or z"))?;
            return Ok(CoinFamily::rotation(axis));
        }
        "embedded-z" => CoinFamily::EmbeddedRotationZ,
        "embedded-u2" => CoinFamily::EmbeddedU2 {
            xi: raw.real("coin.xi")?.unwrap_or(0.0),
            zeta: raw.real("coin.zeta")?.unwrap_or(0.0),
        },
        "grover" => CoinFamily::Grover,
        "grover-composition" => CoinFamily::GroverComposition,
        other => {
            return Err(usage(
                "coin.family",
                &format!(
                    "unknown family `{other}` (expected rotation, embedded-z, embedded-u2, grover or grover-composition)"
                ),
            ))
        }
    };
    if axis.is_some() {
        return Err(usage("coin.axis", "only applies to rotation coins"));
    }
    Ok(family)
}

fn parse_theta(raw: &mut RawConfig) -> Result<ThetaGrid, ExperimentError> {
    if let Some(values) = raw.reals("theta.values")? {
        for key in ["theta.min", "theta.max", "theta.count"] {
            if raw.has(key) {
                return Err(usage(key, "cannot be combined with theta.values"));
            }
        }
        if values.is_empty() {
            return Err(usage("theta.values", "must not be empty"));
        }
        return Ok(ThetaGrid::List { values });
    }
    let min = raw.real("theta.min")?.ok_or_else(|| usage("theta.min", "is required (or give theta.values)"))?;
    let max = raw.real("theta.max")?.unwrap_or(min);
    let count = raw.integer("theta.count")?.unwrap_or(1);
    if count == 0 {
        return Err(usage("theta.count", "must be at least 1"));
    }
    if count > MAX_THETA_POINTS {
        return Err(usage("theta.count", &format!("must not exceed {MAX_THETA_POINTS}")));
    }
    if max < min {
        return Err(usage("theta.max", "must not be below theta.min"));
    }
    if count > 1 && max == min {
        return Err(usage("theta.count", "a degenerate range needs theta.count = 1"));
    }
    Ok(ThetaGrid::Range { min, max, count })
}

fn parse_probe(raw: &mut RawConfig, dim: usize) -> Result<ProbeChoice, ExperimentError> {
    let mode = raw.take("probe.mode").map(|(v, _)| v).unwrap_or_else(|| "fixed".into());
    match mode.as_str() {
        "fixed" => {
            for key in ["probe.objective", "probe.grid", "probe.restarts"] {
                if raw.has(key) {
                    return Err(usage(key, "only applies with probe.mode = optimize"));
                }
            }
            let angles = raw.reals("probe.angles")?.unwrap_or_else(|| vec![0.0; dim - 1]);
            let phases = raw.reals("probe.phases")?.unwrap_or_else(|| vec![0.0; dim - 1]);
            for (key, v) in [("probe.angles", &angles), ("probe.phases", &phases)] {
                if v.len() != dim - 1 {
                    return Err(usage(key, &format!("needs {} entries for D = {dim}, got {}", dim - 1, v.len())));
                }
            }
            let probe = ProbeSpec::new(angles, phases).map_err(|e| usage("probe", &e.to_string()))?;
            Ok(ProbeChoice::Fixed { probe })
        }
        "optimize" => {
            for key in ["probe.angles", "probe.phases"] {
                if raw.has(key) {
                    return Err(usage(key, "only applies with probe.mode = fixed"));
                }
            }
            let objective = match raw.take("probe.objective").map(|(v, _)| v).as_deref() {
                None | Some("qfi") => Objective::Qfi,
                Some("fi") => Objective::Fi,
                Some(other) => return Err(usage("probe.objective", &format!("unknown objective `{other}` (qfi or fi)"))),
            };
            let defaults = OptimizeOptions::default();
            let grid_resolution = raw.integer("probe.grid")?.unwrap_or(defaults.grid_resolution);
            if grid_resolution < crate::optimize::MIN_GRID_RESOLUTION {
                return Err(usage(
                    "probe.grid",
                    &format!("must be at least {}", crate::optimize::MIN_GRID_RESOLUTION),
                ));
            }
            let random_starts = raw.integer("probe.restarts")?.unwrap_or(defaults.random_starts);
            Ok(ProbeChoice::Optimize {
                objective,
                grid_resolution,
                random_starts,
            })
        }
        other => Err(usage("probe.mode", &format!("unknown mode `{other}` (fixed or optimize)"))),
    }
}

/// Settings read by the `figure` command: `figure.points`, `figure.t_long`,
/// `figure.t_rate`, `seed` and `output.formats`. All keys are optional.
#[derive(Debug, Clone, PartialEq)]
pub struct FigureConfig {
    pub options: FigureOptions,
    pub outputs: OutputSet,
}

impl FigureConfig {
    pub fn from_file(path: &Path) -> Result<Self, ExperimentError> {
        let text = std::fs::read_to_string(path).map_err(|e| ExperimentError::Usage {
            field: "--config".into(),
            message: format!("cannot read {}: {e}", path.display()),
        })?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self, ExperimentError> {
        let mut raw = RawConfig::parse(text)?;
        let mut options = FigureOptions::default();
        if let Some(n) = raw.integer("figure.points")? {
            if n < 2 {
                return Err(usage("figure.points", "must be at least 2"));
            }
            options.axis_points = n;
        }
        for (key, slot) in [("figure.t_long", &mut options.t_long), ("figure.t_rate", &mut options.t_rate)] {
            if let Some(t) = raw.integer(key)? {
                if t == 0 || t > MAX_STEPS {
                    return Err(usage(key, &format!("must lie in 1..={MAX_STEPS}")));
                }
                *slot = t;
            }
        }
        options.seed = raw.integer("seed")?.unwrap_or(0) as u64;
        let outputs = parse_outputs(&mut raw)?;
        raw.finish()?;
        Ok(Self { options, outputs })
    }
}

impl Default for FigureConfig {
    fn default() -> Self {
        Self {
            options: FigureOptions::default(),
            outputs: OutputSet {
                csv: true,
                ..OutputSet::default()
            },
        }
    }
}

fn parse_outputs(raw: &mut RawConfig) -> Result<OutputSet, ExperimentError> {
    let Some((list, _)) = raw.take("output.formats") else {
        return Ok(OutputSet {
            csv: true,
            ..OutputSet::default()
        });
    };
    let mut out = OutputSet::default();
    for item in list.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        match item {
            "csv" => out.csv = true,
            "jsonl" => out.jsonl = true,
            "svg" => out.svg = true,
            other => return Err(usage("output.formats", &format!("unknown format `{other}` (csv, jsonl, svg)"))),
        }
    }
    if out == OutputSet::default() {
        return Err(usage("output.formats", "must name at least one format"));
    }
    Ok(out)
}

/// Key/value pairs with the line they came from; keys are consumed as they
/// are read so that leftovers can be reported as unknown.
struct RawConfig {
    entries: BTreeMap<String, (String, usize)>,
}

impl RawConfig {
    fn parse(text: &str) -> Result<Self, ExperimentError> {
        let mut entries = BTreeMap::new();
        for (n, line) in text.lines().enumerate() {
            let line_no = n + 1;
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                usage(&format!("line {line_no}"), "expected `key = value`")
            })?;
            let key = key.trim();
            let valid = !key.is_empty()
                && key.split('.').all(|part| {
                    !part.is_empty() && part.chars().all(|c| c.is_ascii_alphanumeric() || c == '_')
                });
            if !valid {
                return Err(usage(&format!("line {line_no}"), &format!("invalid key `{key}`")));
            }
            if let Some((_, first)) = entries.insert(key.to_string(), (value.trim().to_string(), line_no)) {
                return Err(usage(key, &format!("set twice (lines {first} and {line_no})")));
            }
        }
        Ok(Self { entries })
    }

    fn has(&self, key: &str) -> bool {
        self.entries.contains_key(key)
    }

    fn take(&mut self, key: &str) -> Option<(String, usize)> {
        self.entries.remove(key)
    }

    fn real(&mut self, key: &str) -> Result<Option<f64>, ExperimentError> {
        self.take(key)
            .map(|(v, _)| eval_real(&v).map_err(|m| usage(key, &m)))
            .transpose()
    }

    fn reals(&mut self, key: &str) -> Result<Option<Vec<f64>>, ExperimentError> {
        self.take(key)
            .map(|(v, _)| {
                v.split(',')
                    .map(str::trim)
                    .filter(|s| !s.is_empty())
                    .enumerate()
                    .map(|(i, item)| eval_real(item).map_err(|m| usage(&format!("{key}[{i}]"), &m)))
                    .collect()
            })
            .transpose()
    }

    fn integer(&mut self, key: &str) -> Result<Option<usize>, ExperimentError> {
        self.take(key)
            .map(|(v, _)| {
                v.parse::<usize>()
                    .map_err(|_| usage(key, &format!("`{v}` is not a nonnegative integer")))
            })
            .transpose()
    }

    fn finish(self) -> Result<(), ExperimentError> {
        match self.entries.into_iter().next() {
            Some((key, (_, line))) => Err(usage(&key, &format!("unknown key (line {line})"))),
            None => Ok(()),
        }
    }
}

/// Evaluates an arithmetic expression in f64 with `pi` and `sqrt(x)` bound.
pub fn eval_real(text: &str) -> Result<f64, String> {
    let mut names = |name: &str, args: Vec<f64>| match (name, args.as_slice()) {
        ("pi", []) => Some(std::f64::consts::PI),
        ("sqrt", [x]) => Some(x.sqrt()),
        _ => None,
    };
    let v = fasteval::ez_eval(text, &mut names).map_err(|e| format!("cannot evaluate `{text}`: {e:?}"))?;
    if !v.is_finite() {
        return Err(format!("`{text}` is not finite"));
    }
    Ok(v)
}
