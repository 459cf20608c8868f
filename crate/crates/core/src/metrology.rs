//! Quantum and classical Fisher information of the walk.

use log::warn;
use serde::{Deserialize, Serialize};

use crate::coin::CoinFamily;
use crate::error::{domain, Result, WalkError};
use crate::probe::ProbeSpec;
use crate::walk::{entanglement_entropy, initial_state, step, DerivativePair, WalkState};

/// Sites with p(x) below this are treated as outside the support.
pub const PROB_EPS: f64 = 1e-12;
/// Ratios are undefined below this QFI.
pub const QFI_EPS: f64 = 1e-12;
pub const DEFAULT_FIDELITY_STEP: f64 = 1e-4;
/// Below this step 1 - |⟨ψ_θ|ψ_{θ+δθ}⟩| is dominated by rounding.
pub const MIN_FIDELITY_STEP: f64 = 1e-6;
pub const MAX_FIDELITY_STEP: f64 = 1e-2;

/// Pairwise (cascade) summation; the reduction tree depends only on the length.
pub fn pairwise_sum(values: &[f64]) -> f64 {
    if values.len() <= 8 {
        return values.iter().sum();
    }
    let (a, b) = values.split_at(values.len() / 2);
    pairwise_sum(a) + pairwise_sum(b)
}

/// Evolves the probe under `family` at `theta` for `t` steps, tracking ∂θψ.
pub fn evolve_pair(
    family: &CoinFamily,
    dim: usize,
    theta: f64,
    probe: &ProbeSpec,
    t: usize,
) -> Result<DerivativePair> {
    let coin = family.build(dim, theta)?;
    DerivativePair::new(probe, t.max(1))?.evolve_steps(&coin, t)
}

/// Pure-state QFI 4(⟨∂ψ|∂ψ⟩ - |⟨∂ψ|ψ⟩|²), clamped at zero.
pub fn qfi_pure(pair: &DerivativePair) -> f64 {
    let dd = pair.dstate.norm_sqr();
    let overlap = pair.overlap().norm_sqr();
    (4.0 * (dd - overlap)).max(0.0)
}

/// QFI from the fidelity between two independent evolutions at θ and θ + δθ.
pub fn qfi_fidelity(
    family: &CoinFamily,
    dim: usize,
    theta: f64,
    probe: &ProbeSpec,
    t: usize,
    dtheta: f64,
) -> Result<f64> {
    if !(dtheta > 0.0 && dtheta <= MAX_FIDELITY_STEP) {
        return Err(domain(format!(
            "fidelity step {dtheta} outside (0, {MAX_FIDELITY_STEP}]"
        )));
    }
    if dtheta < MIN_FIDELITY_STEP {
        return Err(WalkError::Unreliable(format!(
            "fidelity step {dtheta:e} is below {MIN_FIDELITY_STEP:e}; 1 - |overlap| would be lost to rounding"
        )));
    }
    family.check_theta(theta)?;
    family.check_theta(theta + dtheta)?;
    let evolve = |th: f64| -> Result<_> {
        let coin = family.build(dim, th)?;
        let mut s = initial_state(probe, t.max(1))?;
        for _ in 0..t {
            s = step(&s, &coin)?;
        }
        Ok(s)
    };
    let a = evolve(theta)?;
    let b = evolve(theta + dtheta)?;
    Ok(8.0 * infidelity(&a, &b) / (dtheta * dtheta))
}

/// 1 - |⟨a|b⟩| between the rays of `a` and `b`. The squared sine is the
/// norm of the part of b orthogonal to a, which keeps the small difference
/// out of a cancellation.
fn infidelity(a: &WalkState, b: &WalkState) -> f64 {
    let (na, nb) = (a.norm_sqr(), b.norm_sqr());
    let proj = a.inner(b) / na;
    let perp: f64 = a
        .as_slice()
        .iter()
        .zip(b.as_slice())
        .map(|(x, y)| (y - proj * x).norm_sqr())
        .sum();
    let sin_sq = (perp / nb).clamp(0.0, 1.0);
    let cos = (1.0 - sin_sq).sqrt();
    sin_sq / (1.0 + cos)
}

/// Richardson-extrapolated fidelity QFI, 2 H(δθ/2) - H(δθ). The one-sided
/// estimator's leading error is linear in δθ.
pub fn qfi_fidelity_richardson(
    family: &CoinFamily,
    dim: usize,
    theta: f64,
    probe: &ProbeSpec,
    t: usize,
    dtheta: f64,
) -> Result<f64> {
    let coarse = qfi_fidelity(family, dim, theta, probe, t, dtheta)?;
    let fine = qfi_fidelity(family, dim, theta, probe, t, 0.5 * dtheta)?;
    Ok(2.0 * fine - coarse)
}

/// Position-measurement Fisher information plus the number of zero-probability
/// sites whose probability derivative was not negligible.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FisherInfo {
    pub value: f64,
    pub boundary_warnings: usize,
}

/// ∂θp(x) = 2 Re Σ_m ψ*(x,m) ∂θψ(x,m), in row order.
pub fn probability_derivative(pair: &DerivativePair) -> Vec<f64> {
    let d = pair.state.dim();
    pair.state
        .as_slice()
        .chunks(d)
        .zip(pair.dstate.as_slice().chunks(d))
        .map(|(psi, dpsi)| {
            2.0 * psi
                .iter()
                .zip(dpsi)
                .map(|(a, b)| (a.conj() * b).re)
                .sum::<f64>()
        })
        .collect()
}

pub fn fi_position_detailed(pair: &DerivativePair) -> FisherInfo {
    let d = pair.state.dim();
    let dp = probability_derivative(pair);
    let mut warnings = 0;
    let terms: Vec<f64> = pair
        .state
        .as_slice()
        .chunks(d)
        .zip(&dp)
        .map(|(row, &dpx)| {
            let px: f64 = row.iter().map(|a| a.norm_sqr()).sum();
            if px < PROB_EPS {
                if dpx.abs() >= PROB_EPS.sqrt() {
                    warnings += 1;
                }
                0.0
            } else {
                dpx * dpx / px
            }
        })
        .collect();
    if warnings > 0 {
        warn!(
            "{warnings} site(s) at the edge of the support have p(x) < {PROB_EPS:e} but |dp/dθ| >= {:e}; their FI contribution was dropped",
            PROB_EPS.sqrt()
        );
    }
    FisherInfo {
        value: pairwise_sum(&terms),
        boundary_warnings: warnings,
    }
}

/// Whether some site probability sits on the FI cutoff to within `rel`, so
/// that rounding alone decides if its term is kept.
pub fn straddles_cutoff(pair: &DerivativePair, rel: f64) -> bool {
    let d = pair.state.dim();
    pair.state
        .as_slice()
        .chunks(d)
        .map(|row| row.iter().map(|a| a.norm_sqr()).sum::<f64>())
        .any(|p| (p - PROB_EPS).abs() <= rel * PROB_EPS)
}

/// F = Σ_x (∂θp(x))² / p(x) for a walker position measurement.
pub fn fi_position(pair: &DerivativePair) -> f64 {
    fi_position_detailed(pair).value
}

/// R = F / H; undefined when H is numerically zero.
pub fn fi_qfi_ratio(fi: f64, qfi: f64) -> Result<f64> {
    if qfi <= QFI_EPS {
        return Err(WalkError::UndefinedRatio {
            qfi,
            threshold: QFI_EPS,
        });
    }
    Ok(fi / qfi)
}

/// Maps information about θ̃ = 2 arccos θ to information about θ: 4 H̃ / (1 - θ²).
/// The same Jacobian applies to the classical FI.
pub fn reparametrized_qfi(h_tilde: f64, theta: f64) -> Result<f64> {
    let gap = 1.0 - theta * theta;
    if !(gap > 0.0) {
        return Err(domain(format!("reparametrization needs |theta| < 1, got {theta}")));
    }
    Ok(4.0 * h_tilde / gap)
}

pub fn reparametrized_fi(f_tilde: f64, theta: f64) -> Result<f64> {
    reparametrized_qfi(f_tilde, theta)
}

/// Quantum Cramér–Rao variance bound 1 / (n·H); infinite when H = 0.
pub fn cramer_rao_bound(qfi: f64, measurements: usize) -> f64 {
    if qfi <= 0.0 || measurements == 0 {
        f64::INFINITY
    } else {
        1.0 / (measurements as f64 * qfi)
    }
}

/// Per-(θ, t) estimation summary.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetrologyReport {
    pub theta: f64,
    pub t: usize,
    pub qfi: f64,
    pub fi: f64,
    /// None when the QFI is below [`QFI_EPS`].
    pub ratio: Option<f64>,
    pub entropy: f64,
    /// Variance bound for a single measurement.
    pub crlb: f64,
}

impl MetrologyReport {
    pub fn from_pair(theta: f64, pair: &DerivativePair) -> Self {
        let qfi = qfi_pure(pair);
        let fi = fi_position(pair);
        Self {
            theta,
            t: pair.t(),
            qfi,
            fi,
            ratio: fi_qfi_ratio(fi, qfi).ok(),
            entropy: entanglement_entropy(&pair.state),
            crlb: cramer_rao_bound(qfi, 1),
        }
    }
}

/// Reports for t = 1..=t_max from a single evolution.
pub fn metrology_trajectory(
    family: &CoinFamily,
    dim: usize,
    theta: f64,
    probe: &ProbeSpec,
    t_max: usize,
) -> Result<Vec<MetrologyReport>> {
    let coin = family.build(dim, theta)?;
    let mut pair = DerivativePair::new(probe, t_max)?;
    let mut out = Vec::with_capacity(t_max);
    for _ in 0..t_max {
        pair = crate::walk::evolve_with_derivative(pair, &coin)?;
        out.push(MetrologyReport::from_pair(theta, &pair));
    }
    Ok(out)
}
