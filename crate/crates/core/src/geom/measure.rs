use nalgebra::DVector;

use super::{check_dim, Direction};
use crate::prelude::*;
use crate::{Error, Result};

/// Atoms closer than this angle (radians) are merged on construction.
pub const MERGE_TOL: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq)]
pub struct Atom {
    pub xi: Direction,
    pub weight: f64,
}

/// Finite atomic measure `Σ c_i δ_{ξ_i}` on the unit sphere.
///
/// Weights are strictly positive and directions pairwise distinct; atoms
/// sharing a direction are merged by summing their weights.
#[derive(Clone, Debug, PartialEq)]
pub struct SphericalMeasure {
    dim: usize,
    atoms: Vec<Atom>,
}

impl SphericalMeasure {
    pub fn new(dim: usize, atoms: impl IntoIterator<Item = (Direction, f64)>) -> Result<Self> {
        check_dim(dim)?;
        let mut merged: Vec<Atom> = Vec::new();
        for (xi, weight) in atoms {
            if xi.dim() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: xi.dim(),
                });
            }
            if !(weight.is_finite() && weight > 0.0) {
                return Err(Error::InvalidMeasure(format!(
                    "atom weight {weight} is not strictly positive"
                )));
            }
            match merged.iter_mut().find(|a| a.xi.angle_to(&xi) <= MERGE_TOL) {
                Some(a) => a.weight += weight,
                None => merged.push(Atom { xi, weight }),
            }
        }
        if merged.is_empty() {
            return Err(Error::EmptyMeasure);
        }
        Ok(SphericalMeasure { dim, atoms: merged })
    }

    /// Convenience constructor from raw (unnormalized) coordinates.
    pub fn from_raw(dim: usize, atoms: &[(&[f64], f64)]) -> Result<Self> {
        let parsed = atoms
            .iter()
            .map(|(v, w)| Direction::from_slice(v).map(|d| (d, *w)))
            .collect::<Result<Vec<_>>>()?;
        Self::new(dim, parsed)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn total_mass(&self) -> f64 {
        self.atoms.iter().map(|a| a.weight).sum()
    }

    pub fn directions(&self) -> Vec<Direction> {
        self.atoms.iter().map(|a| a.xi.clone()).collect()
    }

    pub fn weights(&self) -> Vec<f64> {
        self.atoms.iter().map(|a| a.weight).collect()
    }

    /// `Σ c_i ξ_i`.
    pub fn center_defect(&self) -> DVector<f64> {
        let mut s = DVector::zeros(self.dim);
        for a in &self.atoms {
            s += a.xi.as_vector() * a.weight;
        }
        s
    }

    /// `∫ f dμ`.
    pub fn integrate(&self, f: impl Fn(&Direction) -> f64) -> f64 {
        self.atoms.iter().map(|a| f(&a.xi) * a.weight).sum()
    }

    pub fn scaled(&self, factor: f64) -> Result<Self> {
        Self::new(
            self.dim,
            self.atoms.iter().map(|a| (a.xi.clone(), a.weight * factor)),
        )
    }

    /// Index of the atom within `tol` radians of `xi`.
    pub fn find(&self, xi: &Direction, tol: f64) -> Option<usize> {
        self.atoms.iter().position(|a| a.xi.angle_to(xi) <= tol)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn duplicates_merge() {
        let mu = SphericalMeasure::from_raw(
            2,
            &[(&[1.0, 0.0], 1.0), (&[2.0, 0.0], 0.5), (&[0.0, 1.0], 1.0)],
        )
        .unwrap();
        assert_eq!(mu.len(), 2);
        assert_eq!(mu.atoms()[0].weight, 1.5);
    }

    #[test]
    fn rejects_nonpositive_weight() {
        assert!(SphericalMeasure::from_raw(2, &[(&[1.0, 0.0], 0.0)]).is_err());
        assert!(SphericalMeasure::from_raw(2, &[(&[1.0, 0.0], -1.0)]).is_err());
    }

    #[test]
    fn rejects_dimension_mismatch() {
        assert!(matches!(
            SphericalMeasure::from_raw(2, &[(&[1.0, 0.0, 0.0], 1.0)]),
            Err(Error::DimensionMismatch { .. })
        ));
        assert!(SphericalMeasure::from_raw(4, &[(&[1.0, 0.0, 0.0, 0.0], 1.0)]).is_err());
    }
}
