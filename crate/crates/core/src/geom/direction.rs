use core::fmt;

use nalgebra::DVector;

use crate::prelude::*;
use crate::{Error, Result};

/// A unit vector of R^n.
#[derive(Clone, PartialEq)]
pub struct Direction(DVector<f64>);

impl Direction {
    /// Normalizes `v`; fails on zero or non-finite input.
    pub fn new(v: DVector<f64>) -> Result<Self> {
        let norm = v.norm();
        if !norm.is_finite() || norm <= f64::MIN_POSITIVE {
            return Err(Error::InvalidMeasure(format!(
                "cannot normalize vector of norm {norm}"
            )));
        }
        Ok(Direction(v / norm))
    }

    pub fn from_slice(v: &[f64]) -> Result<Self> {
        Self::new(DVector::from_column_slice(v))
    }

    /// Keeps `v` bit for bit when its length is 1 to within 1e−12, so that
    /// stored unit vectors read back unchanged; otherwise normalizes.
    pub fn from_unit_slice(v: &[f64]) -> Result<Self> {
        let d = DVector::from_column_slice(v);
        if (d.norm() - 1.0).abs() <= 1e-12 {
            Ok(Direction(d))
        } else {
            Self::new(d)
        }
    }

    /// `(cos θ, sin θ)`.
    pub fn from_angle(theta: f64) -> Self {
        Direction(DVector::from_column_slice(&[theta.cos(), theta.sin()]))
    }

    /// Wraps a vector already known to have unit length.
    pub(crate) fn from_unit(v: DVector<f64>) -> Self {
        debug_assert!((v.norm() - 1.0).abs() < 1e-9);
        Direction(v)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn as_vector(&self) -> &DVector<f64> {
        &self.0
    }

    pub fn coords(&self) -> &[f64] {
        self.0.as_slice()
    }

    pub fn dot(&self, v: &DVector<f64>) -> f64 {
        self.0.dot(v)
    }

    /// Angle in `[0, π]` between the two directions.
    pub fn angle_to(&self, other: &Direction) -> f64 {
        // atan2 form stays accurate for nearly (anti)parallel pairs.
        let cos = self.0.dot(&other.0);
        let sin = (&self.0 - &other.0 * cos).norm();
        sin.atan2(cos)
    }

    /// Polar angle in `(-π, π]` (2D only).
    pub fn polar_angle(&self) -> f64 {
        self.0[1].atan2(self.0[0])
    }

    pub fn neg(&self) -> Direction {
        Direction(-&self.0)
    }
}

impl fmt::Debug for Direction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_tuple("Direction")
            .field(&self.0.as_slice())
            .finish()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn normalizes_input() {
        let d = Direction::from_slice(&[3.0, 4.0]).unwrap();
        assert!((d.as_vector().norm() - 1.0).abs() < 1e-15);
        assert!((d.coords()[0] - 0.6).abs() < 1e-15);
    }

    #[test]
    fn rejects_zero() {
        assert!(Direction::from_slice(&[0.0, 0.0, 0.0]).is_err());
        assert!(Direction::from_slice(&[f64::NAN, 1.0]).is_err());
    }

    #[test]
    fn small_angles_are_resolved() {
        let a = Direction::from_angle(0.0);
        let b = Direction::from_angle(1e-11);
        assert!((a.angle_to(&b) - 1e-11).abs() < 1e-20);
        assert!((a.angle_to(&b.neg()) - (core::f64::consts::PI - 1e-11)).abs() < 1e-15);
    }
}
