use core::f64::consts::PI;

use nalgebra::{DMatrix, DVector};

use super::{check_dim, sampling, Direction, SphericalMeasure};
use crate::linalg::{min_norm_solve, sym_eigen};
use crate::prelude::*;
use crate::{Error, Result};

/// Singular-value threshold for the spanning test.
pub const SPAN_TOL: f64 = 1e-10;
/// Angular tolerance for `ξ_i ≈ −ξ_j`.
pub const ANTIPODAL_TOL: f64 = 1e-9;
/// Relative tolerance of the centering test.
const CENTER_TOL: f64 = 1e-9;

/// Outcome of the existence conditions on a spherical measure.
#[derive(Clone, Debug, PartialEq)]
pub struct MeasureConditions {
    /// No `ζ ≠ 0` is orthogonal to every atom.
    pub spans: bool,
    /// `|Σ c_i ξ_i| ≤ 1e−9 · max(1, total mass)`.
    pub centered: bool,
    pub center_defect: DVector<f64>,
    /// Index pairs `(i, j)`, `i < j`, with `ξ_i ≈ −ξ_j`.
    pub antipodal_pairs: Vec<(usize, usize)>,
    /// Smallest singular value of the direction matrix.
    pub min_singular_value: f64,
}

impl MeasureConditions {
    /// Both necessary conditions hold.
    pub fn admissible(&self) -> bool {
        self.spans && self.centered
    }
}

pub fn check_measure_conditions(mu: &SphericalMeasure) -> MeasureConditions {
    check_measure_conditions_with_tol(mu, SPAN_TOL, ANTIPODAL_TOL)
}

pub fn check_measure_conditions_with_tol(
    mu: &SphericalMeasure,
    span_tol: f64,
    antipodal_tol: f64,
) -> MeasureConditions {
    let dim = mu.dim();
    let mut gram = DMatrix::zeros(dim, dim);
    for a in mu.atoms() {
        let x = a.xi.as_vector();
        gram += x * x.transpose();
    }
    let (eig, _) = sym_eigen(&gram);
    let min_singular_value = eig.first().copied().unwrap_or(0.0).max(0.0).sqrt();
    let center_defect = mu.center_defect();
    let centered = center_defect.norm() <= CENTER_TOL * mu.total_mass().max(1.0);
    let atoms = mu.atoms();
    let mut antipodal_pairs = Vec::new();
    for i in 0..atoms.len() {
        for j in i + 1..atoms.len() {
            if atoms[i].xi.angle_to(&atoms[j].xi.neg()) <= antipodal_tol {
                antipodal_pairs.push((i, j));
            }
        }
    }
    MeasureConditions {
        spans: min_singular_value > span_tol,
        centered,
        center_defect,
        antipodal_pairs,
        min_singular_value,
    }
}

/// Unit vector orthogonal to `x`, built from the coordinate axis least
/// aligned with it.
fn rotation_partner(x: &DVector<f64>) -> DVector<f64> {
    if x.len() == 2 {
        return DVector::from_column_slice(&[-x[1], x[0]]);
    }
    let k = (0..x.len())
        .min_by(|&a, &b| x[a].abs().total_cmp(&x[b].abs()))
        .unwrap_or(0);
    let mut e = DVector::zeros(x.len());
    e[k] = 1.0;
    let t = &e - x * x.dot(&e);
    let n = t.norm();
    t / n
}

/// Minimal-norm weight change restoring `Σ c_i ξ_i = 0`.
fn recenter(dirs: &[Direction], weights: &mut [f64]) -> Result<()> {
    let dim = dirs[0].dim();
    let xi = DMatrix::from_fn(dim, dirs.len(), |r, c| dirs[c].coords()[r]);
    let defect = dirs
        .iter()
        .zip(weights.iter())
        .fold(DVector::zeros(dim), |acc, (d, &c)| acc + d.as_vector() * c);
    let delta = min_norm_solve(&xi, &(-defect))
        .ok_or_else(|| Error::InvalidMeasure("directions do not span".into()))?;
    for (w, d) in weights.iter_mut().zip(delta.iter()) {
        *w += d;
    }
    Ok(())
}

/// Rotates the second member of every antipodal pair by `eps` radians and
/// re-centers the weights by a least-squares correction.
///
/// A measure without antipodal pairs is returned unchanged.
pub fn perturb_antipodal(mu: &SphericalMeasure, eps: f64) -> Result<SphericalMeasure> {
    if !(eps > 0.0 && eps.is_finite()) {
        return Err(Error::PerturbationFailed {
            eps,
            reason: "eps must be positive".into(),
        });
    }
    let cond = check_measure_conditions(mu);
    if cond.antipodal_pairs.is_empty() {
        return Ok(mu.clone());
    }
    let mut dirs = mu.directions();
    let mut weights = mu.weights();
    let mut moved = vec![false; dirs.len()];
    for &(_, j) in &cond.antipodal_pairs {
        if moved[j] {
            continue;
        }
        let x = dirs[j].as_vector().clone();
        let t = rotation_partner(&x);
        dirs[j] = Direction::new(x * eps.cos() + t * eps.sin())?;
        moved[j] = true;
    }
    recenter(&dirs, &mut weights)?;
    if let Some(w) = weights.iter().find(|w| **w <= 0.0) {
        return Err(Error::PerturbationFailed {
            eps,
            reason: format!("weight correction gives {w:.3e}; try a smaller eps"),
        });
    }
    let out = SphericalMeasure::new(mu.dim(), dirs.into_iter().zip(weights))?;
    if !check_measure_conditions(&out).antipodal_pairs.is_empty() {
        return Err(Error::PerturbationFailed {
            eps,
            reason: "rotated atom is antipodal to another atom".into(),
        });
    }
    Ok(out)
}

/// Quadrature of `density` with `m` atoms, re-centered exactly.
///
/// The circle uses `m` equal arcs starting at angle 0; the sphere uses a
/// Fibonacci lattice. Atoms where the density vanishes are dropped.
pub fn discretize_measure(
    dim: usize,
    density: impl Fn(&Direction) -> f64,
    m: usize,
) -> Result<SphericalMeasure> {
    check_dim(dim)?;
    if m < dim + 1 {
        return Err(Error::TooFewAtoms {
            got: m,
            min: dim + 1,
        });
    }
    let (dirs, w) = if dim == 2 {
        (sampling::uniform_circle(m, 0.0), 2.0 * PI / m as f64)
    } else {
        (sampling::fibonacci_sphere(m, 0.5), 4.0 * PI / m as f64)
    };
    let mut kept = Vec::with_capacity(m);
    let mut weights = Vec::with_capacity(m);
    for d in dirs {
        let f = density(&d);
        if !f.is_finite() || f < 0.0 {
            return Err(Error::InvalidMeasure(format!("density value {f} at {d:?}")));
        }
        if f > 0.0 {
            weights.push(f * w);
            kept.push(d);
        }
    }
    if kept.is_empty() {
        return Err(Error::EmptyMeasure);
    }
    if kept.len() < dim + 1 {
        return Err(Error::TooFewAtoms {
            got: kept.len(),
            min: dim + 1,
        });
    }
    recenter(&kept, &mut weights)?;
    if let Some(w) = weights.iter().find(|w| **w <= 0.0) {
        return Err(Error::InvalidMeasure(format!(
            "centering forces a nonpositive weight {w:.3e}"
        )));
    }
    let mu = SphericalMeasure::new(dim, kept.into_iter().zip(weights))?;
    if !check_measure_conditions(&mu).spans {
        return Err(Error::InvalidMeasure("atoms do not span".into()));
    }
    Ok(mu)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cross() -> SphericalMeasure {
        SphericalMeasure::from_raw(
            2,
            &[
                (&[1.0, 0.0], 1.0),
                (&[-1.0, 0.0], 1.0),
                (&[0.0, 1.0], 1.0),
                (&[0.0, -1.0], 1.0),
            ],
        )
        .unwrap()
    }

    #[test]
    fn cross_is_admissible_with_two_pairs() {
        let c = check_measure_conditions(&cross());
        assert!(c.spans && c.centered);
        assert_eq!(c.antipodal_pairs.len(), 2);
    }

    #[test]
    fn two_axes_not_centered() {
        let mu = SphericalMeasure::from_raw(2, &[(&[1.0, 0.0], 1.0), (&[0.0, 1.0], 1.0)]).unwrap();
        let c = check_measure_conditions(&mu);
        assert!(c.spans && !c.centered);
        assert!(
            (c.center_defect[0] - 1.0).abs() < 1e-15 && (c.center_defect[1] - 1.0).abs() < 1e-15
        );
    }

    #[test]
    fn one_axis_does_not_span() {
        let mu = SphericalMeasure::from_raw(2, &[(&[1.0, 0.0], 1.0), (&[-1.0, 0.0], 1.0)]).unwrap();
        let c = check_measure_conditions(&mu);
        assert!(!c.spans && c.centered);
    }

    #[test]
    fn perturbation_removes_pairs_and_recenters() {
        let out = perturb_antipodal(&cross(), 1e-3).unwrap();
        let c = check_measure_conditions(&out);
        assert_eq!(out.len(), 4);
        assert!(c.antipodal_pairs.is_empty());
        assert!(c.center_defect.norm() <= 1e-12);
    }

    #[test]
    fn perturbation_is_noop_without_pairs() {
        let mu = discretize_measure(2, |_| 1.0, 7).unwrap();
        assert_eq!(perturb_antipodal(&mu, 1e-3).unwrap(), mu);
    }

    #[test]
    fn unequal_pair_gets_centered() {
        let mu = SphericalMeasure::from_raw(
            2,
            &[
                (&[1.0, 0.0], 2.0),
                (&[-1.0, 0.0], 1.0),
                (&[-0.5, 0.75f64.sqrt()], 1.0),
                (&[-0.5, -(0.75f64.sqrt())], 1.0),
            ],
        )
        .unwrap();
        let out = perturb_antipodal(&mu, 1e-3).unwrap();
        let c = check_measure_conditions(&out);
        assert!(c.centered && c.antipodal_pairs.is_empty());
        assert!(c.center_defect.norm() <= 1e-12);
    }

    #[test]
    fn uniform_density_on_octagon() {
        let mu = discretize_measure(2, |_| 1.0, 8).unwrap();
        assert_eq!(mu.len(), 8);
        assert!((mu.total_mass() - 2.0 * PI).abs() < 1e-12);
        assert!(check_measure_conditions(&mu).centered);
    }

    #[test]
    fn cosine_density_mass() {
        let mu = discretize_measure(2, |d| 1.0 + 0.5 * d.coords()[0], 64).unwrap();
        assert!(check_measure_conditions(&mu).centered);
        assert!((mu.total_mass() - 2.0 * PI).abs() < 1e-3);
    }

    #[test]
    fn too_few_atoms_and_zero_density() {
        assert!(matches!(
            discretize_measure(2, |_| 1.0, 2),
            Err(Error::TooFewAtoms { .. })
        ));
        assert!(matches!(
            discretize_measure(2, |_| 0.0, 16),
            Err(Error::EmptyMeasure)
        ));
    }
}
