//! Coin index bookkeeping.
//!
//! A D-level coin is a spin s = (D-1)/2. Basis state k (0-based, ascending)
//! carries the spin projection m_s = -s + k and moves the walker by an integer
//! shift m. For odd D the shifts are -s..=s; for even D they are
//! -(s+1/2)..=(s+1/2) with 0 removed, so no even-D coin state stays in place.

use crate::error::{Result, WalkError};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoinIndexSet {
    dim: usize,
    shifts: Vec<i64>,
}

impl CoinIndexSet {
    pub fn new(dim: usize) -> Result<Self> {
        if dim < 2 {
            return Err(WalkError::InvalidDimension {
                dim,
                reason: "coin dimension must be at least 2",
            });
        }
        let shifts = if dim % 2 == 1 {
            let s = (dim as i64 - 1) / 2;
            (-s..=s).collect()
        } else {
            let top = dim as i64 / 2;
            (-top..=top).filter(|&m| m != 0).collect()
        };
        Ok(Self { dim, shifts })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Spin quantum number s = (D-1)/2.
    pub fn spin(&self) -> f64 {
        (self.dim as f64 - 1.0) / 2.0
    }

    /// Largest shift M: s for integer spin, s + 1/2 for half-integer spin.
    pub fn max_shift(&self) -> usize {
        self.dim / 2
    }

    /// Integer shifts i_1 < i_2 < ... < i_D.
    pub fn shifts(&self) -> &[i64] {
        &self.shifts
    }

    pub fn shift(&self, k: usize) -> i64 {
        self.shifts[k]
    }

    /// Spin projection m_s of basis state `k`.
    pub fn spin_projection(&self, k: usize) -> f64 {
        k as f64 - self.spin()
    }

    /// Basis position of shift `m`, if `m` belongs to the set.
    pub fn position_of(&self, m: i64) -> Option<usize> {
        self.shifts.binary_search(&m).ok()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn odd_dimension_includes_zero() {
        let set = CoinIndexSet::new(3).unwrap();
        assert_eq!(set.shifts(), &[-1, 0, 1]);
        assert_eq!(set.max_shift(), 1);
        assert_eq!(set.spin(), 1.0);
    }

    #[test]
    fn even_dimension_skips_zero() {
        let set = CoinIndexSet::new(4).unwrap();
        assert_eq!(set.shifts(), &[-2, -1, 1, 2]);
        assert_eq!(set.max_shift(), 2);
        assert_eq!(set.spin_projection(0), -1.5);
        assert_eq!(set.spin_projection(3), 1.5);
        assert_eq!(set.position_of(0), None);
        assert_eq!(set.position_of(1), Some(2));

        let two = CoinIndexSet::new(2).unwrap();
        assert_eq!(two.shifts(), &[-1, 1]);
        assert_eq!(two.max_shift(), 1);
    }

    #[test]
    fn rejects_trivial_coin() {
        assert!(matches!(
            CoinIndexSet::new(1),
            Err(WalkError::InvalidDimension { dim: 1, .. })
        ));
    }
}
