//! Walker ⊗ coin pure states and the one-step evolution U = S(1 ⊗ C).
//!
//! Amplitudes live on a dense, origin-centered grid of 2·M·t_max + 1 sites,
//! each holding D coin components. Row `x + M·t_max` stores site `x`.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::coin::CoinOperator;
use crate::error::{domain, Result, WalkError};
use crate::index::CoinIndexSet;
use crate::probe::{make_probe, ProbeSpec};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

#[derive(Debug, Clone, PartialEq)]
pub struct WalkState {
    index: CoinIndexSet,
    t_max: usize,
    t: usize,
    amps: Vec<Complex64>,
}

impl WalkState {
    /// All-zero grid for a D-level coin and horizon `t_max`.
    pub fn zeros(dim: usize, t_max: usize) -> Result<Self> {
        if t_max < 1 {
            return Err(domain("walk horizon t_max must be at least 1"));
        }
        let index = CoinIndexSet::new(dim)?;
        let sites = 2 * index.max_shift() * t_max + 1;
        Ok(Self {
            index,
            t_max,
            t: 0,
            amps: vec![ZERO; sites * dim],
        })
    }

    pub fn dim(&self) -> usize {
        self.index.dim()
    }

    pub fn index_set(&self) -> &CoinIndexSet {
        &self.index
    }

    pub fn max_shift(&self) -> usize {
        self.index.max_shift()
    }

    pub fn t(&self) -> usize {
        self.t
    }

    pub fn t_max(&self) -> usize {
        self.t_max
    }

    pub fn num_sites(&self) -> usize {
        self.amps.len() / self.dim()
    }

    /// Largest |x| representable on the grid.
    pub fn reach(&self) -> i64 {
        (self.max_shift() * self.t_max) as i64
    }

    /// Site coordinates in row order.
    pub fn positions(&self) -> impl Iterator<Item = i64> {
        let r = self.reach();
        -r..=r
    }

    fn row_of(&self, x: i64) -> Option<usize> {
        let r = self.reach();
        (-r..=r).contains(&x).then(|| (x + r) as usize)
    }

    /// Amplitude at site `x` and coin basis position `k`; zero off-grid.
    pub fn amplitude(&self, x: i64, k: usize) -> Complex64 {
        match self.row_of(x) {
            Some(row) if k < self.dim() => self.amps[row * self.dim() + k],
            _ => ZERO,
        }
    }

    /// Coin components at site `x`.
    pub fn site(&self, x: i64) -> Option<&[Complex64]> {
        let d = self.dim();
        self.row_of(x).map(|row| &self.amps[row * d..(row + 1) * d])
    }

    /// Raw row-major grid (sites × D).
    pub fn as_slice(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    /// ⟨self|other⟩.
    pub fn inner(&self, other: &WalkState) -> Complex64 {
        debug_assert_eq!(self.amps.len(), other.amps.len());
        self.amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    /// Largest |x| carrying a nonzero amplitude, if any.
    pub fn support_radius(&self) -> Option<i64> {
        let d = self.dim();
        self.positions()
            .zip(self.amps.chunks(d))
            .filter(|(_, row)| row.iter().any(|a| *a != ZERO))
            .map(|(x, _)| x.abs())
            .max()
    }

    /// Applies 1 ⊗ `coin` and then the conditional shift. Does not touch `t`.
    fn shifted_coin_apply(&self, coin: &[Complex64], occupied: i64, out: &mut [Complex64]) {
        let d = self.dim();
        let r = self.reach();
        let mut local = vec![ZERO; d];
        for x in -occupied..=occupied {
            let row = (x + r) as usize;
            let src = &self.amps[row * d..(row + 1) * d];
            if src.iter().all(|a| *a == ZERO) {
                continue;
            }
            for (i, l) in local.iter_mut().enumerate() {
                *l = coin[i * d..(i + 1) * d]
                    .iter()
                    .zip(src)
                    .map(|(c, s)| c * s)
                    .sum();
            }
            for (k, v) in local.iter().enumerate() {
                let dest = (row as i64 + self.index.shift(k)) as usize;
                out[dest * d + k] += *v;
            }
        }
    }

    fn check_step(&self, coin: &CoinOperator) -> Result<()> {
        if coin.dim != self.dim() {
            return Err(WalkError::DimensionMismatch {
                state: self.dim(),
                coin: coin.dim,
            });
        }
        if self.t >= self.t_max {
            return Err(WalkError::Capacity {
                t: self.t + 1,
                t_max: self.t_max,
            });
        }
        Ok(())
    }

    fn occupied_radius(&self) -> i64 {
        (self.max_shift() * self.t) as i64
    }
}

fn flatten(m: &DMatrix<Complex64>) -> Vec<Complex64> {
    let d = m.nrows();
    (0..d * d).map(|i| m[(i / d, i % d)]).collect()
}

/// Walker localized at the origin with coin state given by `probe`.
pub fn initial_state(probe: &ProbeSpec, t_max: usize) -> Result<WalkState> {
    let chi = make_probe(probe)?;
    let mut state = WalkState::zeros(probe.dim, t_max)?;
    let row = state.row_of(0).expect("origin is always on the grid");
    let d = state.dim();
    state.amps[row * d..(row + 1) * d].copy_from_slice(&chi);
    Ok(state)
}

/// One walk step U = S(1 ⊗ C).
pub fn step(state: &WalkState, coin: &CoinOperator) -> Result<WalkState> {
    state.check_step(coin)?;
    let mut out = vec![ZERO; state.amps.len()];
    state.shifted_coin_apply(&flatten(&coin.matrix), state.occupied_radius(), &mut out);
    Ok(WalkState {
        index: state.index.clone(),
        t_max: state.t_max,
        t: state.t + 1,
        amps: out,
    })
}

/// A state with its (unnormalized) θ-derivative |∂θψ⟩.
#[derive(Debug, Clone, PartialEq)]
pub struct DerivativePair {
    pub state: WalkState,
    pub dstate: WalkState,
}

impl DerivativePair {
    /// Pair at t = 0: the parameter lives only in the coin, so ∂θψ(0) = 0.
    pub fn new(probe: &ProbeSpec, t_max: usize) -> Result<Self> {
        let state = initial_state(probe, t_max)?;
        let dstate = WalkState::zeros(probe.dim, t_max)?;
        Ok(Self { state, dstate })
    }

    /// Pair at t = 0 from raw coin amplitudes (need not be normalized).
    pub fn from_coin_amplitudes(chi: &[Complex64], t_max: usize) -> Result<Self> {
        let mut state = WalkState::zeros(chi.len(), t_max)?;
        let d = state.dim();
        let row = state.row_of(0).expect("origin is always on the grid");
        state.amps[row * d..(row + 1) * d].copy_from_slice(chi);
        let dstate = WalkState::zeros(d, t_max)?;
        Ok(Self { state, dstate })
    }

    pub fn t(&self) -> usize {
        self.state.t
    }

    /// ⟨ψ|∂θψ⟩.
    pub fn overlap(&self) -> Complex64 {
        self.state.inner(&self.dstate)
    }

    /// Advances `steps` times with the same coin.
    pub fn evolve_steps(mut self, coin: &CoinOperator, steps: usize) -> Result<Self> {
        for _ in 0..steps {
            self = evolve_with_derivative(self, coin)?;
        }
        Ok(self)
    }

    /// Superposes pairs with coefficients `coeffs` (linearity of U^t and ∂θU^t).
    pub fn superpose(pairs: &[DerivativePair], coeffs: &[Complex64]) -> Result<Self> {
        let first = pairs
            .first()
            .ok_or_else(|| domain("cannot superpose an empty set of pairs"))?;
        if pairs.len() != coeffs.len() {
            return Err(domain("one coefficient per pair is required"));
        }
        let mut out = first.clone();
        out.state.amps.iter_mut().for_each(|a| *a = ZERO);
        out.dstate.amps.iter_mut().for_each(|a| *a = ZERO);
        for (pair, &c) in pairs.iter().zip(coeffs) {
            if pair.state.amps.len() != out.state.amps.len() || pair.t() != out.t() {
                return Err(domain("superposed pairs must share grid and time"));
            }
            if c == ZERO {
                continue;
            }
            for (o, a) in out.state.amps.iter_mut().zip(&pair.state.amps) {
                *o += c * a;
            }
            for (o, a) in out.dstate.amps.iter_mut().zip(&pair.dstate.amps) {
                *o += c * a;
            }
        }
        Ok(out)
    }
}

/// |∂ψ(t+1)⟩ = U|∂ψ(t)⟩ + (∂θU)|ψ(t)⟩ with ∂θU = S(1 ⊗ ∂θC), then |ψ⟩ ← U|ψ⟩.
pub fn evolve_with_derivative(pair: DerivativePair, coin: &CoinOperator) -> Result<DerivativePair> {
    let DerivativePair { state, dstate } = pair;
    state.check_step(coin)?;
    let occupied = state.occupied_radius();
    let c = flatten(&coin.matrix);
    let dc = flatten(&coin.derivative);

    let mut new_d = vec![ZERO; dstate.amps.len()];
    dstate.shifted_coin_apply(&c, occupied, &mut new_d);
    state.shifted_coin_apply(&dc, occupied, &mut new_d);

    let mut new_s = vec![ZERO; state.amps.len()];
    state.shifted_coin_apply(&c, occupied, &mut new_s);

    let t = state.t + 1;
    Ok(DerivativePair {
        state: WalkState {
            amps: new_s,
            t,
            ..state
        },
        dstate: WalkState {
            amps: new_d,
            t,
            ..dstate
        },
    })
}

/// p(x) = Σ_m |ψ(x, m)|² in row order (see [`WalkState::positions`]).
pub fn position_distribution(state: &WalkState) -> Vec<f64> {
    state
        .amps
        .chunks(state.dim())
        .map(|row| row.iter().map(|a| a.norm_sqr()).sum())
        .collect()
}

/// Coin reduced density matrix Tr_p |ψ⟩⟨ψ|.
pub fn coin_density_matrix(state: &WalkState) -> DMatrix<Complex64> {
    let d = state.dim();
    let mut rho = DMatrix::<Complex64>::zeros(d, d);
    for row in state.amps.chunks(d) {
        for i in 0..d {
            if row[i] == ZERO {
                continue;
            }
            for j in 0..d {
                rho[(i, j)] += row[i] * row[j].conj();
            }
        }
    }
    rho
}

/// Von Neumann entropy (natural log) of the walker/coin bipartition.
///
/// The nonzero spectrum of the coin reduced state equals the squared Schmidt
/// coefficients of the sites × coin amplitude matrix.
pub fn entanglement_entropy(state: &WalkState) -> f64 {
    let eig = coin_density_matrix(state).symmetric_eigen();
    eig.eigenvalues
        .iter()
        .filter(|&&l| l > 1e-300)
        .map(|&l| -l * l.ln())
        .sum::<f64>()
        .max(0.0)
}
