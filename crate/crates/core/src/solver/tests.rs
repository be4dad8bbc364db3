use core::f64::consts::PI;

use nalgebra::DVector;
use proptest::prelude::*;

use super::*;
use crate::geom::{
    gauss_map_measure, hausdorff_distance, sampling::uniform_circle, wulff_shape, Direction,
    SphericalMeasure,
};

fn from_weights(dirs: &[Direction], w: &[f64]) -> SphericalMeasure {
    SphericalMeasure::new(dirs[0].dim(), dirs.iter().cloned().zip(w.iter().copied())).unwrap()
}

fn spread(p: &Polytope) -> f64 {
    let h: Vec<f64> = (0..p.facets().len()).map(|f| p.facet_offset(f)).collect();
    let mean = h.iter().sum::<f64>() / h.len() as f64;
    h.iter().map(|x| (x - mean).abs()).fold(0.0, f64::max) / mean
}

fn accepted_residuals_monotone(o: &SolveOutcome) -> bool {
    let acc: Vec<f64> = o
        .history
        .iter()
        .filter(|r| r.accepted)
        .map(|r| r.residual)
        .collect();
    acc.windows(2).all(|w| w[1] <= w[0])
}

#[test]
fn p_exception() {
    assert_eq!(handle_p_exception(3.0, 2), 2.999);
    assert_eq!(handle_p_exception(2.0, 2), 2.0);
    assert_eq!(handle_p_exception(4.0, 3), 3.999);
    assert_eq!(handle_p_exception(3.0 + 1e-7, 2), 2.999);
    assert_eq!(handle_p_exception(3.01, 2), 3.01);
}

#[test]
fn classical_square() {
    let mu = from_weights(&uniform_circle(4, 0.0), &[2.0; 4]);
    let out = solve_classical(&mu, &SolveConfig::default()).unwrap();
    assert!(out.converged && out.residual <= 1e-8, "{}", out.residual);
    for v in out.polytope.vertices() {
        assert!((v[0].abs() - 1.0).abs() < 1e-9 && (v[1].abs() - 1.0).abs() < 1e-9);
    }
    assert!((out.gamma - 4.0).abs() < 1e-8);
}

#[test]
fn classical_rejects_uncentered() {
    let dirs = uniform_circle(4, 0.0);
    let mu = from_weights(&dirs, &[1.0, 2.0, 1.0, 1.0]);
    assert!(matches!(
        solve_classical(&mu, &SolveConfig::default()),
        Err(Error::Inadmissible(_))
    ));
}

#[test]
fn classical_cube_in_space() {
    let cube = wulff_shape(
        &SupportVector::new(
            [
                [1., 0., 0.],
                [-1., 0., 0.],
                [0., 1., 0.],
                [0., -1., 0.],
                [0., 0., 1.],
                [0., 0., -1.],
            ]
            .iter()
            .map(|v| Direction::from_slice(v).unwrap())
            .collect(),
            vec![0.5, 1.5, 1.0, 1.0, 0.7, 1.3],
        )
        .unwrap(),
    )
    .unwrap();
    let mu = SphericalMeasure::new(3, gauss_map_measure(&cube).unwrap()).unwrap();
    let out = solve_classical(&mu, &SolveConfig::default()).unwrap();
    assert!(out.converged, "{}", out.residual);
    let c = cube.centroid().clone();
    let d = hausdorff_distance(&cube.translated(&-c), &out.polytope, 64).unwrap();
    assert!(d < 1e-6, "{d}");
}

#[test]
fn classical_random_solid_in_space() {
    let dirs = crate::geom::sampling::fibonacci_sphere(14, 0.5);
    let h: Vec<f64> = (0..14)
        .map(|i| 1.0 + 0.3 * ((i * 7 % 5) as f64 / 5.0))
        .collect();
    let body = wulff_shape(&SupportVector::new(dirs, h).unwrap()).unwrap();
    let mu = SphericalMeasure::new(3, gauss_map_measure(&body).unwrap()).unwrap();
    let out = solve_classical(&mu, &SolveConfig::default()).unwrap();
    assert!(out.converged, "{}", out.residual);
    let c = body.centroid().clone();
    let d = hausdorff_distance(&body.translated(&-c), &out.polytope, 256).unwrap();
    assert!(d < 1e-6, "{d}");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn classical_round_trip(
        gaps in prop::collection::vec(0.2f64..1.0, 5..10),
        heights in prop::collection::vec(0.5f64..1.5, 10),
    ) {
        let total: f64 = gaps.iter().sum();
        let mut acc = 0.0;
        let dirs: Vec<Direction> = gaps.iter().map(|g| {
            let d = Direction::from_angle(2.0 * PI * acc / total);
            acc += g;
            d
        }).collect();
        let body = wulff_shape(&SupportVector::new(dirs, heights[..gaps.len()].to_vec()).unwrap()).unwrap();
        let mu = SphericalMeasure::new(2, gauss_map_measure(&body).unwrap()).unwrap();
        let out = solve_classical(&mu, &SolveConfig::default()).unwrap();
        prop_assert!(out.converged);
        let c = body.centroid().clone();
        let d = hausdorff_distance(&body.translated(&-c), &out.polytope, 256).unwrap();
        prop_assert!(d <= 1e-6, "{}", d);
    }
}

#[test]
fn discrete_square() {
    let mu = from_weights(&uniform_circle(4, 0.0), &[1.0; 4]);
    let out = solve_discrete(&mu, &SolveConfig::new(2.0)).unwrap();
    assert!(out.converged, "{out:?}");
    assert!(out.residual <= 1e-2 && (out.gamma - 1.0).abs() <= 1e-3);
    assert!(out.diagnostics.perturbed);
    assert!(out.polytope.centroid().norm() < 1e-9);
    assert_eq!(out.polytope.facets().len(), 4);
    assert!(spread(&out.polytope) < 1e-2);
}

#[test]
fn discrete_octagon_cubic() {
    let mu = from_weights(&uniform_circle(8, 0.0), &[1.0; 8]);
    let out = solve_discrete(&mu, &SolveConfig::new(3.0)).unwrap();
    assert!(out.converged, "{out:?}");
    assert_eq!(out.diagnostics.p_effective, 2.999);
    assert!(spread(&out.polytope) <= 1e-2);
}

#[test]
fn discrete_rejects_inadmissible() {
    let mu = SphericalMeasure::from_raw(2, &[(&[1.0, 0.0], 1.0), (&[0.0, 1.0], 1.0)]).unwrap();
    assert!(matches!(
        solve_discrete(&mu, &SolveConfig::new(2.0)),
        Err(Error::Inadmissible(_))
    ));
}

/// Weights `1 + 0.5 cos 2θ` on five directions, re-centered.
fn lopsided() -> SphericalMeasure {
    let dirs = uniform_circle(5, 0.3);
    let w: Vec<f64> = dirs
        .iter()
        .map(|d| 1.0 + 0.5 * (2.0 * d.polar_angle()).cos())
        .collect();
    let defect = from_weights(&dirs, &w).center_defect();
    let a = nalgebra::DMatrix::from_fn(2, dirs.len(), |r, c| dirs[c].coords()[r]);
    let corr = crate::linalg::min_norm_solve(&a, &(-defect)).unwrap();
    let w: Vec<f64> = w.iter().zip(corr.iter()).map(|(w, c)| w + c).collect();
    from_weights(&dirs, &w)
}

#[test]
fn discrete_fixed_point_iterates() {
    let mu = lopsided();
    let out = solve_discrete(&mu, &SolveConfig::new(2.0)).unwrap();
    assert!(out.converged, "{:?}", out.history);
    assert!(out.iterations > 0);
    assert!(accepted_residuals_monotone(&out));
    assert!(out.history[0].residual > out.residual);
    assert!((out.gamma - 1.0).abs() <= 1e-3);
    let total: f64 = out.mu_p.masses.iter().sum();
    assert!((total / mu.total_mass() - 1.0).abs() < 1e-2);
}

#[test]
fn discrete_fixed_point_p_below_two() {
    let out = solve_discrete(&lopsided(), &SolveConfig::new(1.5)).unwrap();
    assert!(out.converged, "{:?}", out.history);
}

#[test]
fn gradient_mode_decreases_objective() {
    let mu = lopsided();
    let cfg = SolveConfig {
        mode: UpdateMode::Gradient { fd_every: 3 },
        max_iter: 12,
        ..SolveConfig::new(2.0)
    };
    let out = solve_discrete(&mu, &cfg).unwrap();
    let c = mu.weights();
    let objective = |h: &[f64]| c.iter().zip(h).map(|(c, h)| c * h).sum::<f64>();
    // Normalized objective Σ c_i λ h_i with λ = Γ^{-1} at n = 2, p = 2.
    let acc: Vec<f64> = out
        .history
        .iter()
        .filter(|r| r.accepted)
        .map(|r| objective(&r.heights) / r.gamma)
        .collect();
    assert!(acc.len() > 1);
    assert!(acc.windows(2).all(|w| w[1] < w[0]), "{acc:?}");
    assert!(!out.diagnostics.fd_checks.is_empty());
}

#[test]
fn gradient_mode_refuses_critical_exponent() {
    let mu = lopsided();
    let cfg = SolveConfig {
        mode: UpdateMode::Gradient { fd_every: 3 },
        ..SolveConfig::new(2.98)
    };
    assert!(matches!(
        solve_discrete(&mu, &cfg),
        Err(Error::InvalidConfig(_))
    ));
}

#[test]
fn general_uniform_density() {
    let out = solve_general(2, |_| 1.0, &[8, 16], &SolveConfig::new(2.0)).unwrap();
    assert!(out.completed());
    assert_eq!(out.stages.len(), 2);
    assert!(out.stages[1].hausdorff_to_previous.unwrap() < 0.1);
    let finest = out.finest().unwrap();
    assert!(finest.converged && spread(&finest.polytope) < 1e-2);
}

#[test]
fn general_uniform_density_stabilizes() {
    let out = solve_general(2, |_| 1.0, &[8, 16, 32], &SolveConfig::new(2.0)).unwrap();
    assert!(out.completed());
    let d: Vec<f64> = out.stages[1..]
        .iter()
        .map(|s| s.hausdorff_to_previous.unwrap())
        .collect();
    assert!(d[1] < d[0], "{d:?}");
}

#[test]
fn general_cos2_density() {
    let density = |d: &Direction| 1.0 + 0.5 * (2.0 * d.polar_angle()).cos();
    let out = solve_general(2, density, &[16, 32], &SolveConfig::new(2.0)).unwrap();
    assert!(out.completed(), "{:?}", out.failure);
    for s in &out.stages {
        assert!(s.outcome.converged && s.outcome.residual <= 2e-2, "m = {}: {}", s.m, s.outcome.residual);
    }
}

#[test]
fn general_empty_schedule() {
    assert!(matches!(
        solve_general(2, |_| 1.0, &[], &SolveConfig::default()),
        Err(Error::EmptySchedule)
    ));
}

#[test]
fn general_reports_failing_stage() {
    let out = solve_general(2, |_| 1.0, &[8, 2], &SolveConfig::new(2.0)).unwrap();
    assert_eq!(out.stages.len(), 1);
    assert!(matches!(out.failure, Some(Error::Stage { .. })));
}

#[test]
fn measure_is_translation_invariant() {
    use crate::measure::{canonical_solution, pharm_measure};
    use crate::mesh::MeshOptions;
    let body = wulff_shape(
        &SupportVector::new(uniform_circle(5, 0.3), vec![1.0, 1.2, 0.9, 1.1, 1.0]).unwrap(),
    )
    .unwrap();
    let moved = body.translated(&DVector::from_column_slice(&[0.3, -0.2]));
    let cfg = crate::fem::SolverConfig::new(2.5);
    let opts = MeshOptions {
        min_edges: 1,
        ..MeshOptions::with_h(0.05)
    };
    let (a, _) = canonical_solution(&body, 0.5, 1.0, &opts, None, &cfg).unwrap();
    let (b, _) = canonical_solution(&moved, 0.5, 1.0, &opts, None, &cfg).unwrap();
    let ma = pharm_measure(&body, &a).unwrap();
    let mb = pharm_measure(&moved, &b).unwrap();
    for (x, y) in ma.masses.iter().zip(&mb.masses) {
        assert!((x - y).abs() <= 1e-6 * x, "{x} {y}");
    }
}
