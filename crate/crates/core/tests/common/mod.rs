//! Reference implementations for integration tests. Nothing here calls into
//! the walk engine; only plain matrices and vectors.

#![allow(dead_code)]

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub type M = DMatrix<Complex64>;

pub const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

pub fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Spin operators on the basis |s⟩, |s-1⟩, ..., |-s⟩.
pub fn spin_ops(dim: usize) -> [M; 3] {
    let s = (dim as f64 - 1.0) / 2.0;
    let m_of = |k: usize| s - k as f64;
    let mut jp = M::zeros(dim, dim);
    for k in 1..dim {
        // J+ |m⟩ = sqrt((s - m)(s + m + 1)) |m + 1⟩
        let m = m_of(k);
        jp[(k - 1, k)] = c(((s - m) * (s + m + 1.0)).sqrt());
    }
    let jm = jp.adjoint();
    let jx = (&jp + &jm) * c(0.5);
    let jy = (&jp - &jm) * Complex64::new(0.0, -0.5);
    let jz = M::from_fn(dim, dim, |r, col| if r == col { c(m_of(r)) } else { c(0.0) });
    [jx, jy, jz]
}

pub fn axis_index(axis: qwalk::Axis) -> usize {
    match axis {
        qwalk::Axis::X => 0,
        qwalk::Axis::Y => 1,
        qwalk::Axis::Z => 2,
    }
}

/// exp(A) by scaling and squaring of a truncated Taylor series.
pub fn expm(a: &M) -> M {
    let n = a.nrows();
    let norm: f64 = a.iter().map(|z| z.norm()).sum();
    let squarings = if norm > 0.5 { (norm / 0.5).log2().ceil() as u32 } else { 0 };
    let scaled = a * c(0.5f64.powi(squarings as i32));
    let mut term = M::identity(n, n);
    let mut sum = M::identity(n, n);
    for k in 1..=30 {
        term = &term * &scaled * c(1.0 / k as f64);
        sum += &term;
    }
    for _ in 0..squarings {
        sum = &sum * &sum;
    }
    sum
}

pub fn rotation(dim: usize, axis: qwalk::Axis, theta: f64) -> M {
    let j = &spin_ops(dim)[axis_index(axis)];
    expm(&(j * (-I * theta)))
}

pub fn max_diff(a: &M, b: &M) -> f64 {
    a.iter().zip(b.iter()).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

/// Walker shifts for coin index k, ascending.
pub fn shifts(dim: usize) -> Vec<i64> {
    let d = dim as i64;
    if d % 2 == 1 {
        (0..d).map(|k| k - (d - 1) / 2).collect()
    } else {
        (0..d).map(|k| if k < d / 2 { k - d / 2 } else { k - d / 2 + 1 }).collect()
    }
}

/// Walk amplitudes as a dense (position, coin) table over x ∈ [-R, R].
#[derive(Debug, Clone)]
pub struct RefWalk {
    pub dim: usize,
    pub radius: i64,
    pub amps: Vec<Vec<Complex64>>,
}

impl RefWalk {
    pub fn start(chi: &[Complex64], steps: usize) -> Self {
        let dim = chi.len();
        let radius = (dim / 2 * steps) as i64;
        let mut amps = vec![vec![c(0.0); dim]; (2 * radius + 1) as usize];
        amps[radius as usize] = chi.to_vec();
        Self { dim, radius, amps }
    }

    pub fn step(&self, coin: &M) -> Self {
        let sh = shifts(self.dim);
        let mut out = vec![vec![c(0.0); self.dim]; self.amps.len()];
        for (row, psi) in self.amps.iter().enumerate() {
            if psi.iter().all(|a| a.norm_sqr() == 0.0) {
                continue;
            }
            for k in 0..self.dim {
                let v: Complex64 = (0..self.dim).map(|j| coin[(k, j)] * psi[j]).sum();
                let target = row as i64 + sh[k];
                assert!(target >= 0 && (target as usize) < out.len(), "walker left the grid");
                out[target as usize][k] += v;
            }
        }
        Self { amps: out, ..*self }
    }

    pub fn run(chi: &[Complex64], coin: &M, steps: usize) -> Self {
        let mut w = Self::start(chi, steps);
        for _ in 0..steps {
            w = w.step(coin);
        }
        w
    }

    pub fn flat(&self) -> Vec<Complex64> {
        self.amps.iter().flatten().copied().collect()
    }

    pub fn probabilities(&self) -> Vec<f64> {
        self.amps.iter().map(|r| r.iter().map(|a| a.norm_sqr()).sum()).collect()
    }

    pub fn inner(&self, other: &Self) -> Complex64 {
        self.flat().iter().zip(other.flat()).map(|(a, b)| a.conj() * b).sum()
    }
}

/// Fourth-order central difference of a vector-valued function of θ.
pub fn central_diff(f: impl Fn(f64) -> Vec<Complex64>, theta: f64, h: f64) -> Vec<Complex64> {
    let (m2, m1, p1, p2) = (f(theta - 2.0 * h), f(theta - h), f(theta + h), f(theta + 2.0 * h));
    (0..m1.len())
        .map(|i| (m2[i] - p2[i] + (p1[i] - m1[i]) * 8.0) / (12.0 * h))
        .collect()
}

/// 4(⟨∂ψ|∂ψ⟩ - |⟨ψ|∂ψ⟩|²) from raw vectors.
pub fn qfi_from(psi: &[Complex64], dpsi: &[Complex64]) -> f64 {
    let dd: f64 = dpsi.iter().map(|a| a.norm_sqr()).sum();
    let pd: Complex64 = psi.iter().zip(dpsi).map(|(a, b)| a.conj() * b).sum();
    4.0 * (dd - pd.norm_sqr())
}

/// Haar-ish random normalized coin state.
pub fn random_state(dim: usize, r: &mut impl Rng) -> Vec<Complex64> {
    loop {
        let v: Vec<Complex64> = (0..dim)
            .map(|_| Complex64::new(gauss(r), gauss(r)))
            .collect();
        let n: f64 = v.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if n > 1e-6 {
            return v.into_iter().map(|a| a / n).collect();
        }
    }
}

fn gauss(r: &mut impl Rng) -> f64 {
    let u: f64 = r.random::<f64>().max(1e-300);
    let v: f64 = r.random();
    (-2.0 * u.ln()).sqrt() * (std::f64::consts::TAU * v).cos()
}

/// 4 t² Var(λ) for a diagonal coin diag(e^{-iθλ_k}).
pub fn diagonal_coin_qfi(weights: &[f64], eigen: &[f64], t: usize) -> f64 {
    let mean: f64 = weights.iter().zip(eigen).map(|(w, l)| w * l).sum();
    let second: f64 = weights.iter().zip(eigen).map(|(w, l)| w * l * l).sum();
    4.0 * (t * t) as f64 * (second - mean * mean)
}
