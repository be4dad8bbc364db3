//! Deterministic direction sets on S¹ and S².

use core::f64::consts::PI;

use nalgebra::DVector;

use super::Direction;
use crate::prelude::*;

/// `π (3 − √5)`.
pub const GOLDEN_ANGLE: f64 = 2.399_963_229_728_653;

/// Low-discrepancy directions: golden-angle sequence on S¹, Fibonacci
/// lattice on S². `seed` rotates the whole set.
pub fn directions(dim: usize, count: usize, seed: u64) -> Vec<Direction> {
    let offset = (seed as f64) * 0.618_033_988_749_894_9;
    match dim {
        2 => (0..count)
            .map(|k| Direction::from_angle(2.0 * PI * offset + k as f64 * GOLDEN_ANGLE))
            .collect(),
        3 => fibonacci_sphere(count, offset),
        _ => Vec::new(),
    }
}

/// `count` equally spaced angles `θ_k = θ_0 + 2πk/count` on S¹.
pub fn uniform_circle(count: usize, theta0: f64) -> Vec<Direction> {
    (0..count)
        .map(|k| Direction::from_angle(theta0 + 2.0 * PI * k as f64 / count as f64))
        .collect()
}

/// Near-uniform points on S² (each carries area `4π / count`).
pub fn fibonacci_sphere(count: usize, offset: f64) -> Vec<Direction> {
    (0..count)
        .map(|k| {
            let z = 1.0 - (2.0 * k as f64 + 1.0) / count as f64;
            let r = (1.0 - z * z).max(0.0).sqrt();
            let phi = k as f64 * GOLDEN_ANGLE + 2.0 * PI * offset;
            Direction::from_unit(DVector::from_column_slice(&[
                r * phi.cos(),
                r * phi.sin(),
                z,
            ]))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sets_are_unit_and_reproducible() {
        for dim in [2, 3] {
            let a = directions(dim, 100, 7);
            let b = directions(dim, 100, 7);
            assert_eq!(a, b);
            for d in &a {
                assert!((d.as_vector().norm() - 1.0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn fibonacci_is_nearly_centered() {
        let pts = fibonacci_sphere(2000, 0.0);
        let mut s = DVector::zeros(3);
        for p in &pts {
            s += p.as_vector();
        }
        assert!(s.norm() / 2000.0 < 1e-3);
    }
}
