//! Pure coin states on the generalized Bloch hypersphere.
//!
//! A D-level probe is described by D-1 polar angles α_i ∈ [0, π] and D-1
//! phases γ_i ∈ [0, 2π). The amplitude on the lowest coin index is real and
//! nonnegative, which fixes the global phase.

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Result, WalkError};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProbeSpec {
    pub dim: usize,
    pub angles: Vec<f64>,
    pub phases: Vec<f64>,
}

impl ProbeSpec {
    pub fn new(angles: Vec<f64>, phases: Vec<f64>) -> Result<Self> {
        let dim = angles.len() + 1;
        let spec = Self { dim, angles, phases };
        spec.validate()?;
        Ok(spec)
    }

    /// The lowest coin basis state |i_1⟩ (all angles zero).
    pub fn lowest(dim: usize) -> Result<Self> {
        if dim < 2 {
            return Err(WalkError::InvalidDimension {
                dim,
                reason: "coin dimension must be at least 2",
            });
        }
        Self::new(vec![0.0; dim - 1], vec![0.0; dim - 1])
    }

    /// Basis state number `k` (0-based, ascending coin index).
    pub fn basis(dim: usize, k: usize) -> Result<Self> {
        if k >= dim {
            return Err(domain(format!("basis index {k} out of range for D = {dim}")));
        }
        let mut amps = vec![Complex64::new(0.0, 0.0); dim];
        amps[k] = Complex64::new(1.0, 0.0);
        Self::from_amplitudes(&amps)
    }

    pub fn validate(&self) -> Result<()> {
        if self.dim < 2 {
            return Err(WalkError::InvalidDimension {
                dim: self.dim,
                reason: "coin dimension must be at least 2",
            });
        }
        if self.angles.len() != self.dim - 1 || self.phases.len() != self.dim - 1 {
            return Err(domain(format!(
                "D = {} probe needs {} angles and phases, got {} and {}",
                self.dim,
                self.dim - 1,
                self.angles.len(),
                self.phases.len()
            )));
        }
        for (i, &a) in self.angles.iter().enumerate() {
            if !(0.0..=PI).contains(&a) {
                return Err(domain(format!("angle alpha_{} = {a} outside [0, pi]", i + 1)));
            }
        }
        for (i, &g) in self.phases.iter().enumerate() {
            if !(0.0..TAU).contains(&g) {
                return Err(domain(format!("phase gamma_{} = {g} outside [0, 2pi)", i + 1)));
            }
        }
        Ok(())
    }

    /// Inverts the hypersphere map. Any global phase of `amps` is discarded;
    /// the input is normalized first.
    pub fn from_amplitudes(amps: &[Complex64]) -> Result<Self> {
        let dim = amps.len();
        if dim < 2 {
            return Err(WalkError::InvalidDimension {
                dim,
                reason: "coin dimension must be at least 2",
            });
        }
        let norm = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if !(norm > 0.0) || !norm.is_finite() {
            return Err(domain("probe amplitudes must have a finite nonzero norm"));
        }
        let mags: Vec<f64> = amps.iter().map(|a| a.norm() / norm).collect();

        let mut angles = Vec::with_capacity(dim - 1);
        let mut remaining = 1.0_f64;
        for j in 1..dim {
            let idx = if j == 1 { 0 } else { dim + 1 - j };
            let alpha = if remaining > 1e-300 {
                2.0 * (mags[idx] / remaining).clamp(0.0, 1.0).acos()
            } else {
                0.0
            };
            remaining *= (0.5 * alpha).sin();
            angles.push(alpha);
        }

        let reference = if mags[0] > 1e-14 {
            amps[0].arg()
        } else {
            amps.iter()
                .find(|a| a.norm() / norm > 1e-14)
                .map(|a| a.arg())
                .unwrap_or(0.0)
        };
        let phases = (1..dim)
            .map(|k| {
                if mags[k] > 1e-14 {
                    wrap_phase(amps[k].arg() - reference)
                } else {
                    0.0
                }
            })
            .collect();
        Self::new(angles, phases)
    }

    /// Flattened (α_1..α_{D-1}, γ_1..γ_{D-1}).
    pub fn to_params(&self) -> Vec<f64> {
        self.angles.iter().chain(self.phases.iter()).copied().collect()
    }

    /// Builds a probe from unconstrained coordinates, folding angles into
    /// [0, π] by reflection and phases into [0, 2π) periodically.
    pub fn from_params_folded(dim: usize, params: &[f64]) -> Self {
        let n = dim - 1;
        Self {
            dim,
            angles: params[..n].iter().map(|&a| reflect_angle(a)).collect(),
            phases: params[n..2 * n].iter().map(|&g| wrap_phase(g)).collect(),
        }
    }

    pub fn amplitudes(&self) -> Vec<Complex64> {
        probe_amplitudes(&self.angles, &self.phases)
    }
}

/// Amplitudes χ over the ascending coin basis for a validated probe.
pub fn make_probe(spec: &ProbeSpec) -> Result<Vec<Complex64>> {
    spec.validate()?;
    Ok(spec.amplitudes())
}

fn probe_amplitudes(angles: &[f64], phases: &[f64]) -> Vec<Complex64> {
    let mut amps = vec![Complex64::new(0.0, 0.0); angles.len() + 1];
    write_amplitudes(angles, phases, &mut amps);
    amps
}

/// Hypersphere map into a caller-provided buffer of length D. No range checks.
pub(crate) fn write_amplitudes(angles: &[f64], phases: &[f64], out: &mut [Complex64]) {
    let dim = angles.len() + 1;
    debug_assert_eq!(out.len(), dim);
    // running product of sin(α_j/2), j = 1..=i
    let mut sines = 1.0;
    let mut prefix = [1.0_f64; 32];
    let mut prefix_vec;
    let prefix: &mut [f64] = if dim <= 32 {
        &mut prefix[..dim]
    } else {
        prefix_vec = vec![1.0; dim];
        &mut prefix_vec
    };
    for (i, a) in angles.iter().enumerate() {
        sines *= (0.5 * a).sin();
        prefix[i + 1] = sines;
    }
    let phase = |g: f64| Complex64::from_polar(1.0, g);
    out[0] = Complex64::new((0.5 * angles[0]).cos(), 0.0);
    out[1] = phase(phases[0]) * prefix[dim - 1];
    for k in 2..dim {
        out[k] = phase(phases[k - 1]) * (prefix[dim - k] * (0.5 * angles[dim - k]).cos());
    }
}

pub(crate) fn wrap_phase(g: f64) -> f64 {
    let w = g.rem_euclid(TAU);
    // rem_euclid can round up to exactly 2π for tiny negative inputs
    if w >= TAU {
        0.0
    } else {
        w
    }
}

pub(crate) fn reflect_angle(a: f64) -> f64 {
    let w = a.rem_euclid(TAU);
    if w > PI {
        TAU - w
    } else {
        w
    }
}
