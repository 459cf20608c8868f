//! Single-parameter coin operators and their analytic θ-derivatives.
//!
//! Matrices are written in the ascending coin basis: row/column k is the
//! coin state with shift i_{k+1} (see [`crate::index::CoinIndexSet`]). The
//! spin generators use the standard table ordering T_z = diag(s, s-1, ..., -s),
//! so `exp(-iθT_z)` puts e^{-isθ} on the lowest coin index.

use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Result, WalkError};

pub type CMatrix = DMatrix<Complex64>;

/// Grover coins are only defined up to θ = 1 - GROVER_EPS; the derivative
/// contains 1/√(1-θ²).
pub const GROVER_EPS: f64 = 1e-9;

const I: Complex64 = Complex64::new(0.0, 1.0);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Axis {
    X,
    Y,
    Z,
}

impl Axis {
    pub const ALL: [Axis; 3] = [Axis::X, Axis::Y, Axis::Z];

    pub fn as_str(self) -> &'static str {
        match self {
            Axis::X => "x",
            Axis::Y => "y",
            Axis::Z => "z",
        }
    }
}

impl fmt::Display for Axis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Axis {
    type Err = WalkError;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "x" => Ok(Axis::X),
            "y" => Ok(Axis::Y),
            "z" => Ok(Axis::Z),
            other => Err(domain(format!("unknown rotation axis {other:?}"))),
        }
    }
}

/// Spin-s rotation generator about one axis.
#[derive(Debug, Clone, PartialEq)]
pub struct GeneratorSet {
    pub dim: usize,
    pub axis: Axis,
    pub matrix: CMatrix,
}

/// Which single-parameter coin a [`CoinOperator`] belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum CoinFamily {
    /// exp(-iθ T_axis).
    Rotation { axis: Axis },
    /// diag(e^{-iθ/2}, 1, ..., 1, e^{iθ/2}), D ≥ 3.
    EmbeddedRotationZ,
    /// Euler-angle U(2) block on the extreme coin states, ξ and ζ held fixed.
    EmbeddedU2 { xi: f64, zeta: f64 },
    /// Generalized Grover coin, D ∈ {2, 3}, θ ∈ [0, 1).
    Grover,
    /// i·R_y(θ̃)·R_z(π): the D = 2 Grover coin in the angle θ̃ = 2 arccos θ.
    GroverComposition,
}

impl CoinFamily {
    pub fn rotation(axis: Axis) -> Self {
        CoinFamily::Rotation { axis }
    }

    pub fn build(&self, dim: usize, theta: f64) -> Result<CoinOperator> {
        match *self {
            CoinFamily::Rotation { axis } => rotation_coin(dim, axis, theta),
            CoinFamily::EmbeddedRotationZ => embedded_rotation_z(dim, theta),
            CoinFamily::EmbeddedU2 { xi, zeta } => embedded_u2_coin(dim, xi, theta, zeta),
            CoinFamily::Grover => grover_coin(dim, theta),
            CoinFamily::GroverComposition => grover_composition_coin(dim, theta),
        }
    }

    /// Checks that `theta` is inside the family's parameter domain.
    pub fn check_theta(&self, theta: f64) -> Result<()> {
        if !theta.is_finite() {
            return Err(domain(format!("theta must be finite, got {theta}")));
        }
        if let CoinFamily::Grover = self {
            if !(0.0..=1.0 - GROVER_EPS).contains(&theta) {
                return Err(domain(format!(
                    "Grover parameter {theta} outside [0, 1 - {GROVER_EPS:e}]"
                )));
            }
        }
        Ok(())
    }

    /// Whether every coin matrix of the family has real entries.
    pub fn is_real(&self) -> bool {
        matches!(
            self,
            CoinFamily::Rotation { axis: Axis::Y } | CoinFamily::Grover | CoinFamily::GroverComposition
        )
    }

    pub fn name(&self) -> String {
        match self {
            CoinFamily::Rotation { axis } => format!("rotation-{axis}"),
            CoinFamily::EmbeddedRotationZ => "embedded-z".to_string(),
            CoinFamily::EmbeddedU2 { .. } => "embedded-u2".to_string(),
            CoinFamily::Grover => "grover".to_string(),
            CoinFamily::GroverComposition => "grover-composition".to_string(),
        }
    }
}

impl fmt::Display for CoinFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CoinFamily::EmbeddedU2 { xi, zeta } => write!(f, "embedded-u2(xi={xi}, zeta={zeta})"),
            other => f.write_str(&other.name()),
        }
    }
}

/// A D×D unitary coin at a given θ together with ∂θ of its matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct CoinOperator {
    pub dim: usize,
    pub family: CoinFamily,
    pub theta: f64,
    pub matrix: CMatrix,
    pub derivative: CMatrix,
}

impl CoinOperator {
    /// max |C†C - I| entrywise.
    pub fn unitarity_defect(&self) -> f64 {
        let prod = self.matrix.adjoint() * &self.matrix;
        max_abs_diff(&prod, &CMatrix::identity(self.dim, self.dim))
    }

    /// C†∂θC, which is anti-Hermitian for any unitary family.
    pub fn generator_product(&self) -> CMatrix {
        self.matrix.adjoint() * &self.derivative
    }
}

pub(crate) fn max_abs_diff(a: &CMatrix, b: &CMatrix) -> f64 {
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

fn check_dim(dim: usize) -> Result<()> {
    if dim < 2 {
        return Err(WalkError::InvalidDimension {
            dim,
            reason: "coin dimension must be at least 2",
        });
    }
    Ok(())
}

fn real(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

fn from_rows(rows: &[&[Complex64]]) -> CMatrix {
    let n = rows.len();
    CMatrix::from_fn(n, n, |r, c| rows[r][c])
}

/// Spin generator T_axis in dimension `dim`.
///
/// D ∈ {2, 3, 4} come from the tabulated matrices; larger D use the ladder
/// matrix elements ⟨m+1|T_+|m⟩ = √(s(s+1) - m(m+1)).
pub fn spin_generators(dim: usize, axis: Axis) -> Result<GeneratorSet> {
    check_dim(dim)?;
    let matrix = match dim {
        2..=4 => tabulated_generator(dim, axis),
        _ => ladder_generator(dim, axis),
    };
    Ok(GeneratorSet { dim, axis, matrix })
}

fn tabulated_generator(dim: usize, axis: Axis) -> CMatrix {
    let z = real(0.0);
    match (dim, axis) {
        (2, Axis::X) => from_rows(&[&[z, real(0.5)], &[real(0.5), z]]),
        (2, Axis::Y) => from_rows(&[&[z, -0.5 * I], &[0.5 * I, z]]),
        (2, Axis::Z) => from_rows(&[&[real(0.5), z], &[z, real(-0.5)]]),
        (3, Axis::X) => {
            let a = real(1.0 / 2f64.sqrt());
            from_rows(&[&[z, a, z], &[a, z, a], &[z, a, z]])
        }
        (3, Axis::Y) => {
            let a = I / 2f64.sqrt();
            from_rows(&[&[z, -a, z], &[a, z, -a], &[z, a, z]])
        }
        (3, Axis::Z) => from_rows(&[&[real(1.0), z, z], &[z, z, z], &[z, z, real(-1.0)]]),
        (4, Axis::X) => {
            let a = real(3f64.sqrt() / 2.0);
            let b = real(1.0);
            from_rows(&[&[z, a, z, z], &[a, z, b, z], &[z, b, z, a], &[z, z, a, z]])
        }
        (4, Axis::Y) => {
            let a = I * (3f64.sqrt() / 2.0);
            let b = I;
            from_rows(&[
                &[z, -a, z, z],
                &[a, z, -b, z],
                &[z, b, z, -a],
                &[z, z, a, z],
            ])
        }
        (4, Axis::Z) => CMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![
            real(1.5),
            real(0.5),
            real(-0.5),
            real(-1.5),
        ])),
        _ => unreachable!("tabulated generators cover D = 2, 3, 4"),
    }
}

pub(crate) fn ladder_generator(dim: usize, axis: Axis) -> CMatrix {
    let s = (dim as f64 - 1.0) / 2.0;
    // Generator basis k carries m = s - k, so T_+ raises k -> k - 1.
    let mut raise = CMatrix::zeros(dim, dim);
    for k in 1..dim {
        let m = s - k as f64;
        raise[(k - 1, k)] = real((s * (s + 1.0) - m * (m + 1.0)).sqrt());
    }
    let lower = raise.adjoint();
    match axis {
        Axis::X => (&raise + &lower) * real(0.5),
        Axis::Y => (&raise - &lower) * (-0.5 * I),
        Axis::Z => CMatrix::from_fn(dim, dim, |r, c| {
            if r == c {
                real(s - r as f64)
            } else {
                real(0.0)
            }
        }),
    }
}

/// exp(-iθ T) for Hermitian T via its eigendecomposition.
pub(crate) fn hermitian_exp(generator: &CMatrix, theta: f64) -> CMatrix {
    let dim = generator.nrows();
    let is_diag = (0..dim).all(|r| (0..dim).all(|c| r == c || generator[(r, c)] == real(0.0)));
    if is_diag {
        return CMatrix::from_fn(dim, dim, |r, c| {
            if r == c {
                (-I * theta * generator[(r, r)].re).exp()
            } else {
                real(0.0)
            }
        });
    }
    let eig = generator.clone().symmetric_eigen();
    let phases = CMatrix::from_fn(dim, dim, |r, c| {
        if r == c {
            (-I * theta * eig.eigenvalues[r]).exp()
        } else {
            real(0.0)
        }
    });
    &eig.eigenvectors * phases * eig.eigenvectors.adjoint()
}

/// Spin rotation R_axis(θ) = exp(-iθ T_axis) with derivative -i T_axis R_axis(θ).
pub fn rotation_coin(dim: usize, axis: Axis, theta: f64) -> Result<CoinOperator> {
    let generator = spin_generators(dim, axis)?.matrix;
    if !theta.is_finite() {
        return Err(domain(format!("theta must be finite, got {theta}")));
    }
    let matrix = hermitian_exp(&generator, theta);
    let derivative = (&generator * &matrix) * (-I);
    Ok(CoinOperator {
        dim,
        family: CoinFamily::Rotation { axis },
        theta,
        matrix,
        derivative,
    })
}

/// z-rotation of a qubit placed on the extreme coin states of a D ≥ 3 coin.
pub fn embedded_rotation_z(dim: usize, theta: f64) -> Result<CoinOperator> {
    if dim < 3 {
        return Err(WalkError::InvalidDimension {
            dim,
            reason: "embedded rotations need D >= 3",
        });
    }
    let lo = (-0.5 * I * theta).exp();
    let hi = (0.5 * I * theta).exp();
    let mut matrix = CMatrix::identity(dim, dim);
    let mut derivative = CMatrix::zeros(dim, dim);
    matrix[(0, 0)] = lo;
    matrix[(dim - 1, dim - 1)] = hi;
    derivative[(0, 0)] = -0.5 * I * lo;
    derivative[(dim - 1, dim - 1)] = 0.5 * I * hi;
    Ok(CoinOperator {
        dim,
        family: CoinFamily::EmbeddedRotationZ,
        theta,
        matrix,
        derivative,
    })
}

/// Euler-angle U(2) coin, corner-embedded for D > 2. θ is the estimated parameter.
pub fn embedded_u2_coin(dim: usize, xi: f64, theta: f64, zeta: f64) -> Result<CoinOperator> {
    check_dim(dim)?;
    let sum = (-0.5 * I * (xi + zeta)).exp();
    let diff = (0.5 * I * (xi - zeta)).exp();
    let (s, c) = (0.5 * theta).sin_cos();
    let block = [
        [sum * c, -diff * s],
        [diff.conj() * s, sum.conj() * c],
    ];
    let dblock = [
        [-0.5 * sum * s, -0.5 * diff * c],
        [0.5 * diff.conj() * c, -0.5 * sum.conj() * s],
    ];
    let mut matrix = CMatrix::identity(dim, dim);
    let mut derivative = CMatrix::zeros(dim, dim);
    let corners = [0, dim - 1];
    for (bi, &r) in corners.iter().enumerate() {
        for (bj, &col) in corners.iter().enumerate() {
            matrix[(r, col)] = block[bi][bj];
            derivative[(r, col)] = dblock[bi][bj];
        }
    }
    Ok(CoinOperator {
        dim,
        family: CoinFamily::EmbeddedU2 { xi, zeta },
        theta,
        matrix,
        derivative,
    })
}

/// Generalized Grover coin for D = 2 and D = 3.
pub fn grover_coin(dim: usize, theta: f64) -> Result<CoinOperator> {
    if !matches!(dim, 2 | 3) {
        return Err(WalkError::UnsupportedDimension {
            dim,
            what: "generalized Grover coin",
        });
    }
    CoinFamily::Grover.check_theta(theta)?;
    let r = (1.0 - theta * theta).sqrt();
    let dr = -theta / r;
    let (matrix, derivative) = if dim == 2 {
        (
            from_rows(&[&[real(theta), real(r)], &[real(r), real(-theta)]]),
            from_rows(&[&[real(1.0), real(dr)], &[real(dr), real(-1.0)]]),
        )
    } else {
        let t2 = theta * theta;
        let q = real(theta * (2.0 - 2.0 * t2).sqrt());
        let dq = real(2f64.sqrt() * (1.0 - 2.0 * t2) / r);
        let corner = real(-t2);
        let anti = real(1.0 - t2);
        let mid = real(2.0 * t2 - 1.0);
        let dcorner = real(-2.0 * theta);
        let danti = real(-2.0 * theta);
        let dmid = real(4.0 * theta);
        (
            from_rows(&[&[corner, q, anti], &[q, mid, q], &[anti, q, corner]]),
            from_rows(&[&[dcorner, dq, danti], &[dq, dmid, dq], &[danti, dq, dcorner]]),
        )
    };
    Ok(CoinOperator {
        dim,
        family: CoinFamily::Grover,
        theta,
        matrix,
        derivative,
    })
}

/// The D = 2 Grover coin written as i·R_y(θ̃)·R_z(π); `theta` is θ̃.
pub fn grover_composition_coin(dim: usize, theta: f64) -> Result<CoinOperator> {
    if dim != 2 {
        return Err(WalkError::UnsupportedDimension {
            dim,
            what: "Grover rotation composition",
        });
    }
    let ry = rotation_coin(2, Axis::Y, theta)?;
    let rz = rotation_coin(2, Axis::Z, std::f64::consts::PI)?;
    Ok(CoinOperator {
        dim,
        family: CoinFamily::GroverComposition,
        theta,
        matrix: (&ry.matrix * &rz.matrix) * I,
        derivative: (&ry.derivative * &rz.matrix) * I,
    })
}
