//! Probe-state optimization.
//!
//! Objectives are evaluated from D fully evolved basis-state derivative pairs:
//! since U^t and ∂θU^t are linear, the pair for a probe χ is Σ_k χ_k (ψ_k, ∂ψ_k).
//! The QFI then reduces to Gram matrices of those D pairs, and the position FI
//! to a superposition of D grids, so a probe evaluation never re-runs the walk.

use std::f64::consts::{FRAC_PI_2, PI, TAU};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::coin::{Axis, CoinFamily};
use crate::error::{domain, Result};
use crate::index::CoinIndexSet;
use crate::metrology::{qfi_pure, PROB_EPS};
use crate::probe::{write_amplitudes, ProbeSpec};
use crate::simplex::{self, NelderMeadOptions};
use crate::walk::DerivativePair;

pub const DEFAULT_GRID_RESOLUTION: usize = 21;
pub const MIN_GRID_RESOLUTION: usize = 5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Objective {
    Qfi,
    Fi,
}

impl std::fmt::Display for Objective {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Objective::Qfi => "qfi",
            Objective::Fi => "fi",
        })
    }
}

/// Coin family, dimension, parameter value and time step being probed.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProbeProblem {
    pub family: CoinFamily,
    pub dim: usize,
    pub theta: f64,
    pub t: usize,
}

impl ProbeProblem {
    pub fn new(family: CoinFamily, dim: usize, theta: f64, t: usize) -> Self {
        Self { family, dim, theta, t }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OptimizationResult {
    pub best_probe: ProbeSpec,
    pub best_value: f64,
    pub objective: Objective,
    pub evaluations: usize,
    pub grid_resolution: usize,
    pub converged: bool,
}

/// Evolved basis-state pairs for one [`ProbeProblem`], reduced to Gram
/// matrices so that a probe evaluation costs O(D²) per term.
#[derive(Debug, Clone)]
pub struct ProbeResponse {
    dim: usize,
    pairs: Vec<DerivativePair>,
    /// ⟨∂ψ_j|∂ψ_k⟩, row-major
    dd: Vec<Complex64>,
    /// ⟨ψ_j|∂ψ_k⟩
    pd: Vec<Complex64>,
    /// per occupied site x: Σ_m ψ_j*(x,m) ψ_k(x,m)
    site_pp: Vec<Complex64>,
    /// per occupied site x: Σ_m ψ_j*(x,m) ∂ψ_k(x,m)
    site_pd: Vec<Complex64>,
}

impl ProbeResponse {
    pub fn new(problem: &ProbeProblem) -> Result<Self> {
        let dim = problem.dim;
        problem.family.check_theta(problem.theta)?;
        let coin = problem.family.build(dim, problem.theta)?;
        let pairs = (0..dim)
            .map(|k| {
                let mut chi = vec![Complex64::new(0.0, 0.0); dim];
                chi[k] = Complex64::new(1.0, 0.0);
                DerivativePair::from_coin_amplitudes(&chi, problem.t.max(1))?.evolve_steps(&coin, problem.t)
            })
            .collect::<Result<Vec<_>>>()?;
        let gram = |f: &dyn Fn(usize, usize) -> Complex64| -> Vec<Complex64> {
            (0..dim * dim).map(|i| f(i / dim, i % dim)).collect()
        };
        let dd = gram(&|j, k| pairs[j].dstate.inner(&pairs[k].dstate));
        let pd = gram(&|j, k| pairs[j].state.inner(&pairs[k].dstate));

        let states: Vec<&[Complex64]> = pairs.iter().map(|p| p.state.as_slice()).collect();
        let dstates: Vec<&[Complex64]> = pairs.iter().map(|p| p.dstate.as_slice()).collect();
        let site_gram = |a: &[&[Complex64]], b: &[&[Complex64]], x: usize| -> Vec<Complex64> {
            let r = x * dim..(x + 1) * dim;
            gram(&|j, k| {
                a[j][r.clone()]
                    .iter()
                    .zip(&b[k][r.clone()])
                    .map(|(u, v)| u.conj() * v)
                    .sum()
            })
        };
        let mut site_pp = Vec::new();
        let mut site_pd = Vec::new();
        for x in 0..pairs[0].state.num_sites() {
            let pp = site_gram(&states, &states, x);
            if pp.iter().all(|c| c.norm_sqr() == 0.0) {
                continue;
            }
            site_pp.extend(pp);
            site_pd.extend(site_gram(&states, &dstates, x));
        }
        Ok(Self {
            dim,
            pairs,
            dd,
            pd,
            site_pp,
            site_pd,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    fn quadratic(m: &[Complex64], chi: &[Complex64]) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for (row, cj) in m.chunks_exact(chi.len()).zip(chi) {
            let r: Complex64 = row.iter().zip(chi).map(|(a, c)| a * c).sum();
            acc += cj.conj() * r;
        }
        acc
    }

    /// QFI of the normalized probe with amplitudes `chi`.
    pub fn qfi(&self, chi: &[Complex64]) -> f64 {
        let dd = Self::quadratic(&self.dd, chi).re;
        let pd = Self::quadratic(&self.pd, chi).norm_sqr();
        (4.0 * (dd - pd)).max(0.0)
    }

    /// Full derivative pair of the probe with amplitudes `chi`.
    pub fn pair(&self, chi: &[Complex64]) -> DerivativePair {
        DerivativePair::superpose(&self.pairs, chi).expect("response pairs share one grid")
    }

    /// Position FI with the same p(x) cutoff as [`crate::metrology::fi_position`].
    pub fn fi(&self, chi: &[Complex64]) -> f64 {
        let d2 = self.dim * self.dim;
        let mut total = 0.0;
        for (pp, pd) in self.site_pp.chunks_exact(d2).zip(self.site_pd.chunks_exact(d2)) {
            let p = Self::quadratic(pp, chi).re;
            if p >= PROB_EPS {
                let dp = 2.0 * Self::quadratic(pd, chi).re;
                total += dp * dp / p;
            }
        }
        total
    }

    pub fn value(&self, objective: Objective, chi: &[Complex64]) -> f64 {
        match objective {
            Objective::Qfi => self.qfi(chi),
            Objective::Fi => self.fi(chi),
        }
    }

    pub fn probe_value(&self, objective: Objective, probe: &ProbeSpec) -> f64 {
        self.value(objective, &probe.amplitudes())
    }
}

/// Uniform lattice over the probe parameters: `resolution` angle nodes on
/// [0, π] and `resolution - 1` phase nodes on [0, 2π).
#[derive(Debug, Clone, Copy)]
struct Lattice {
    dim: usize,
    resolution: usize,
}

impl Lattice {
    fn angle_step(&self) -> f64 {
        PI / (self.resolution - 1) as f64
    }

    fn phase_step(&self) -> f64 {
        TAU / (self.resolution - 1) as f64
    }

    fn len(&self) -> u128 {
        let n = (self.dim - 1) as u32;
        (self.resolution as u128).pow(n) * ((self.resolution - 1) as u128).pow(n)
    }

    /// Decodes a node index into lattice digits, α_1 most significant,
    /// then α_2, ..., γ_1, ..., γ_{D-1}.
    fn digits(&self, mut idx: u64, angles: &mut [usize], phases: &mut [usize]) {
        let n = self.dim - 1;
        let pr = (self.resolution - 1) as u64;
        for j in (0..n).rev() {
            phases[j] = (idx % pr) as usize;
            idx /= pr;
        }
        let ar = self.resolution as u64;
        for j in (0..n).rev() {
            angles[j] = (idx % ar) as usize;
            idx /= ar;
        }
    }

    fn node(&self, idx: u64) -> (Vec<f64>, Vec<f64>) {
        let n = self.dim - 1;
        let mut a = vec![0; n];
        let mut g = vec![0; n];
        self.digits(idx, &mut a, &mut g);
        (
            a.iter().map(|&i| i as f64 * self.angle_step()).collect(),
            g.iter().map(|&i| i as f64 * self.phase_step()).collect(),
        )
    }
}

/// Precomputed sin/cos of the half angles and the phase factors on the lattice.
struct LatticeTables {
    half_sin: Vec<f64>,
    half_cos: Vec<f64>,
    phase: Vec<Complex64>,
}

impl LatticeTables {
    fn new(lattice: &Lattice) -> Self {
        let (half_sin, half_cos) = (0..lattice.resolution)
            .map(|i| (0.5 * i as f64 * lattice.angle_step()).sin_cos())
            .unzip();
        let phase = (0..lattice.resolution - 1)
            .map(|i| Complex64::from_polar(1.0, i as f64 * lattice.phase_step()))
            .collect();
        Self {
            half_sin,
            half_cos,
            phase,
        }
    }

    /// Same map as [`write_amplitudes`], from lattice digits.
    fn amplitudes(&self, angles: &[usize], phases: &[usize], prefix: &mut [f64], out: &mut [Complex64]) {
        let dim = out.len();
        prefix[0] = 1.0;
        for (i, &a) in angles.iter().enumerate() {
            prefix[i + 1] = prefix[i] * self.half_sin[a];
        }
        out[0] = Complex64::new(self.half_cos[angles[0]], 0.0);
        out[1] = self.phase[phases[0]] * prefix[dim - 1];
        for k in 2..dim {
            out[k] = self.phase[phases[k - 1]] * (prefix[dim - k] * self.half_cos[angles[dim - k]]);
        }
    }
}

fn better(candidate: f64, incumbent: f64) -> bool {
    candidate > incumbent + 1e-12 * incumbent.abs().max(1.0)
}

/// Number of lattice nodes for a given dimension and resolution.
pub fn lattice_size(dim: usize, resolution: usize) -> u128 {
    Lattice { dim, resolution }.len()
}

/// Largest odd resolution (≥ 5, ≤ `preferred`) whose lattice fits in `max_nodes`.
pub fn resolution_for_budget(dim: usize, preferred: usize, max_nodes: u128) -> usize {
    let mut res = preferred.max(MIN_GRID_RESOLUTION);
    while res > MIN_GRID_RESOLUTION && lattice_size(dim, res) > max_nodes {
        res -= if res % 2 == 1 && res - 2 >= MIN_GRID_RESOLUTION { 2 } else { 1 };
    }
    res
}

/// Exhaustive lattice search; ties go to the lexicographically smallest (α, γ).
pub fn grid_search_response(
    response: &ProbeResponse,
    objective: Objective,
    resolution: usize,
) -> Result<OptimizationResult> {
    if resolution < MIN_GRID_RESOLUTION {
        return Err(domain(format!(
            "grid resolution {resolution} is below the minimum {MIN_GRID_RESOLUTION}"
        )));
    }
    let dim = response.dim();
    let lattice = Lattice { dim, resolution };
    let total = u64::try_from(lattice.len())
        .map_err(|_| domain("probe lattice too large"))?;
    const CHUNK: u64 = 2048;
    let chunks = total.div_ceil(CHUNK);

    let tables = LatticeTables::new(&lattice);
    let per_chunk: Vec<(f64, u64)> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let n = dim - 1;
            let mut angles = vec![0; n];
            let mut phases = vec![0; n];
            let mut prefix = vec![0.0; dim];
            let mut chi = vec![Complex64::new(0.0, 0.0); dim];
            let mut best = (f64::NEG_INFINITY, u64::MAX);
            for idx in c * CHUNK..((c + 1) * CHUNK).min(total) {
                lattice.digits(idx, &mut angles, &mut phases);
                tables.amplitudes(&angles, &phases, &mut prefix, &mut chi);
                let v = response.value(objective, &chi);
                if best.1 == u64::MAX || better(v, best.0) {
                    best = (v, idx);
                }
            }
            best
        })
        .collect();

    let mut best = per_chunk[0];
    for &cand in &per_chunk[1..] {
        if better(cand.0, best.0) {
            best = cand;
        }
    }
    let (angles, phases) = lattice.node(best.1);
    Ok(OptimizationResult {
        best_probe: ProbeSpec::new(angles, phases)?,
        best_value: best.0,
        objective,
        evaluations: total as usize,
        grid_resolution: resolution,
        converged: true,
    })
}

pub fn grid_search(
    problem: &ProbeProblem,
    objective: Objective,
    resolution: usize,
) -> Result<OptimizationResult> {
    grid_search_response(&ProbeResponse::new(problem)?, objective, resolution)
}

/// Nelder–Mead ascent from `start` with γ wrapped and α reflected into range.
/// Never returns a probe worse than `start`.
pub fn refine_response(
    response: &ProbeResponse,
    objective: Objective,
    start: &ProbeSpec,
    opts: NelderMeadOptions,
) -> Result<OptimizationResult> {
    start.validate()?;
    let dim = response.dim();
    if start.dim != dim {
        return Err(domain(format!(
            "start probe has D = {}, problem has D = {dim}",
            start.dim
        )));
    }
    let start_value = response.probe_value(objective, start);
    let mut chi = vec![Complex64::new(0.0, 0.0); dim];
    let minimum = simplex::minimize(
        |x| {
            let p = ProbeSpec::from_params_folded(dim, x);
            write_amplitudes(&p.angles, &p.phases, &mut chi);
            -response.value(objective, &chi)
        },
        &start.to_params(),
        opts,
    );
    let found = ProbeSpec::from_params_folded(dim, &minimum.x);
    let found_value = -minimum.value;
    let (best_probe, best_value) = if better(found_value, start_value) {
        (found, found_value)
    } else {
        (start.clone(), start_value)
    };
    Ok(OptimizationResult {
        best_probe,
        best_value,
        objective,
        evaluations: minimum.evaluations + 1,
        grid_resolution: 0,
        converged: minimum.converged,
    })
}

pub fn refine(
    problem: &ProbeProblem,
    objective: Objective,
    start: &ProbeSpec,
) -> Result<OptimizationResult> {
    refine_response(
        &ProbeResponse::new(problem)?,
        objective,
        start,
        NelderMeadOptions::default(),
    )
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OptimizeOptions {
    /// Preferred lattice resolution; lowered for large D to respect `max_grid_nodes`.
    pub grid_resolution: usize,
    pub max_grid_nodes: u64,
    /// Extra simplex starts drawn uniformly from the probe space.
    pub random_starts: usize,
    pub seed: u64,
    pub simplex_step: f64,
    pub diameter_tol: f64,
    pub max_iterations: usize,
}

impl Default for OptimizeOptions {
    fn default() -> Self {
        Self {
            grid_resolution: DEFAULT_GRID_RESOLUTION,
            max_grid_nodes: 1_000_000,
            random_starts: 4,
            seed: 0,
            simplex_step: 0.2,
            diameter_tol: 1e-8,
            max_iterations: 20_000,
        }
    }
}

impl OptimizeOptions {
    fn simplex(&self) -> NelderMeadOptions {
        NelderMeadOptions {
            initial_step: self.simplex_step,
            diameter_tol: self.diameter_tol,
            max_iterations: self.max_iterations,
        }
    }
}

/// Random probe drawn uniformly in (α, γ) coordinates.
pub fn random_probe<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> ProbeSpec {
    let n = dim - 1;
    ProbeSpec {
        dim,
        angles: (0..n).map(|_| rng.random_range(0.0..=PI)).collect(),
        phases: (0..n).map(|_| rng.random_range(0.0..TAU)).collect(),
    }
}

/// Lattice search followed by simplex refinement from the lattice argmax and
/// from `random_starts` seeded random probes.
pub fn optimize_response(
    response: &ProbeResponse,
    objective: Objective,
    opts: &OptimizeOptions,
) -> Result<OptimizationResult> {
    let dim = response.dim();
    let resolution = resolution_for_budget(dim, opts.grid_resolution, opts.max_grid_nodes as u128);
    let grid = grid_search_response(response, objective, resolution)?;
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut starts = vec![grid.best_probe.clone()];
    starts.extend((0..opts.random_starts).map(|_| random_probe(dim, &mut rng)));

    let refined = starts
        .par_iter()
        .map(|s| refine_response(response, objective, s, opts.simplex()))
        .collect::<Result<Vec<_>>>()?;

    let mut evaluations = grid.evaluations;
    let mut best = OptimizationResult {
        grid_resolution: resolution,
        ..grid
    };
    for r in refined {
        evaluations += r.evaluations;
        if better(r.best_value, best.best_value) {
            best.best_probe = r.best_probe;
            best.best_value = r.best_value;
            best.converged = r.converged;
        }
    }
    best.evaluations = evaluations;
    Ok(best)
}

pub fn optimize_probe(
    problem: &ProbeProblem,
    objective: Objective,
    opts: &OptimizeOptions,
) -> Result<OptimizationResult> {
    optimize_response(&ProbeResponse::new(problem)?, objective, opts)
}

/// Best value over θ of the probe-optimized objective.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThetaOptimum {
    pub theta: f64,
    pub value: f64,
    pub probe: ProbeSpec,
}

/// Settings for [`maximize_over_theta`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThetaSearch {
    pub lo: f64,
    pub hi: f64,
    /// Uniform scan nodes, endpoints included.
    pub scan_points: usize,
    /// Probe optimization used during the scan and the bracket search.
    pub scan: OptimizeOptions,
    /// Probe optimization at the final θ.
    pub finish: OptimizeOptions,
    /// Width at which the golden-section bracket stops.
    pub theta_tol: f64,
}

impl ThetaSearch {
    pub fn new(lo: f64, hi: f64, scan_points: usize) -> Self {
        Self {
            lo,
            hi,
            scan_points,
            scan: OptimizeOptions {
                grid_resolution: 7,
                ..OptimizeOptions::default()
            },
            finish: OptimizeOptions::default(),
            theta_tol: 1e-7,
        }
    }
}

/// Maximizes the probe-optimized objective over θ: a uniform scan, then a
/// golden-section search in the two cells around the best node, then a full
/// probe optimization at the winner.
pub fn maximize_over_theta(
    family: CoinFamily,
    dim: usize,
    t: usize,
    objective: Objective,
    search: &ThetaSearch,
) -> Result<ThetaOptimum> {
    let (lo, hi) = (search.lo, search.hi);
    if search.scan_points < 3 || !(hi > lo) {
        return Err(domain("theta scan needs at least 3 points on a nonempty interval"));
    }
    let eval = |theta: f64, opts: &OptimizeOptions| -> Result<ThetaOptimum> {
        let r = optimize_probe(&ProbeProblem::new(family, dim, theta, t), objective, opts)?;
        Ok(ThetaOptimum {
            theta,
            value: r.best_value,
            probe: r.best_probe,
        })
    };
    let h = (hi - lo) / (search.scan_points - 1) as f64;
    let scan = (0..search.scan_points)
        .into_par_iter()
        .map(|i| eval(lo + h * i as f64, &search.scan))
        .collect::<Result<Vec<_>>>()?;
    let mut best = scan[0].clone();
    for s in &scan[1..] {
        if better(s.value, best.value) {
            best = s.clone();
        }
    }

    let golden = (5f64.sqrt() - 1.0) / 2.0;
    let (mut a, mut b) = ((best.theta - h).max(lo), (best.theta + h).min(hi));
    let mut c = b - golden * (b - a);
    let mut d = a + golden * (b - a);
    let mut fc = eval(c, &search.scan)?;
    let mut fd = eval(d, &search.scan)?;
    while b - a > search.theta_tol {
        if fc.value >= fd.value {
            b = d;
            d = c;
            fd = fc;
            c = b - golden * (b - a);
            fc = eval(c, &search.scan)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + golden * (b - a);
            fd = eval(d, &search.scan)?;
        }
    }
    for cand in [fc, fd] {
        if better(cand.value, best.value) {
            best = cand;
        }
    }
    let problem = ProbeProblem::new(family, dim, best.theta, t);
    let response = ProbeResponse::new(&problem)?;
    let full = optimize_response(&response, objective, &search.finish)?;
    let warm = refine_response(&response, objective, &best.probe, search.finish.simplex())?;
    let winner = if better(warm.best_value, full.best_value) { warm } else { full };
    Ok(ThetaOptimum {
        theta: best.theta,
        value: winner.best_value,
        probe: winner.best_probe,
    })
}

/// (|−M⟩ + |+M⟩)/√2: the probe maximizing the z-rotation QFI.
pub fn optimal_probe_z(dim: usize) -> Result<ProbeSpec> {
    optimal_probe_z_with_phase(dim, 0.0)
}

/// (|−M⟩ + e^{iγ}|+M⟩)/√2.
pub fn optimal_probe_z_with_phase(dim: usize, gamma: f64) -> Result<ProbeSpec> {
    CoinIndexSet::new(dim)?;
    let mut angles = vec![0.0; dim - 1];
    let mut phases = vec![0.0; dim - 1];
    angles[0] = FRAC_PI_2;
    phases[dim - 2] = crate::probe::wrap_phase(gamma);
    ProbeSpec::new(angles, phases)
}

/// D = 2 probes jointly optimal for two rotation axes.
pub fn joint_optimal_probes_2d(a: Axis, b: Axis) -> Result<ProbeSpec> {
    let (angle, phase) = match (a, b) {
        (Axis::X, Axis::Z) | (Axis::Z, Axis::X) => (FRAC_PI_2, FRAC_PI_2),
        (Axis::X, Axis::Y) | (Axis::Y, Axis::X) => (0.0, 0.0),
        (Axis::Y, Axis::Z) | (Axis::Z, Axis::Y) => (FRAC_PI_2, 0.0),
        _ => {
            return Err(domain(format!(
                "joint optimum needs two distinct axes, got {a}{b}"
            )))
        }
    };
    ProbeSpec::new(vec![angle], vec![phase])
}

/// |⟨ψ(t)|∂θψ(t)⟩| and the single-step value |⟨φ|C†∂θC|φ⟩|.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OrthogonalityResidual {
    pub residual: f64,
    pub single_step: f64,
}

pub fn orthogonality_residual(problem: &ProbeProblem, probe: &ProbeSpec) -> Result<OrthogonalityResidual> {
    let coin = problem.family.build(problem.dim, problem.theta)?;
    let pair = DerivativePair::new(probe, problem.t.max(1))?.evolve_steps(&coin, problem.t)?;
    let chi = probe.amplitudes();
    let g = coin.generator_product();
    let d = problem.dim;
    let mut single = Complex64::new(0.0, 0.0);
    for j in 0..d {
        for k in 0..d {
            single += chi[j].conj() * g[(j, k)] * chi[k];
        }
    }
    Ok(OrthogonalityResidual {
        residual: pair.overlap().norm(),
        single_step: single.norm(),
    })
}

/// QFI of a probe by direct evolution (no basis superposition).
pub fn probe_qfi(problem: &ProbeProblem, probe: &ProbeSpec) -> Result<f64> {
    let coin = problem.family.build(problem.dim, problem.theta)?;
    let pair = DerivativePair::new(probe, problem.t.max(1))?.evolve_steps(&coin, problem.t)?;
    Ok(qfi_pure(&pair))
}
