use core::f64::consts::PI;

use super::*;
use crate::fem::{boundary_gradient, family_solve};
use crate::geom::{sampling::uniform_circle, wulff_shape, SupportVector};
use crate::mesh::build_ring_with;

fn gon(k: usize) -> Polytope {
    wulff_shape(&SupportVector::new(uniform_circle(k, 0.0), vec![1.0; k]).unwrap()).unwrap()
}

fn canonical(p: &Polytope, exp: f64, h: f64) -> (PHarmSolution, MeasureAtomMap) {
    let (sol, _) = canonical_solution(
        p,
        0.5,
        1.0,
        &MeshOptions::with_h(h),
        None,
        &SolverConfig::new(exp),
    )
    .unwrap();
    let mu = pharm_measure(p, &sol).unwrap();
    (sol, mu)
}

/// `|u'(1)|^{p−1}` for the radial solution with `u(0.5) = 1`, `u(1) = 0`.
fn disk_density(p: f64) -> f64 {
    let slope = if p == 2.0 {
        1.0 / 2f64.ln()
    } else {
        let a = (p - 2.0) / (p - 1.0);
        a / (1.0 - 0.5f64.powf(a))
    };
    slope.abs().powf(p - 1.0)
}

#[test]
fn disk_mass_harmonic() {
    let (_, mu) = canonical(&gon(64), 2.0, 0.02);
    let expected = 2.0 * PI * disk_density(2.0);
    assert!(
        (mu.total_mass / expected - 1.0).abs() < 0.02,
        "{}",
        mu.total_mass
    );
    assert_eq!(mu.total_mass, mu.masses.iter().sum::<f64>());
    assert!(mu.masses.iter().all(|m| *m > 0.0));
}

#[test]
fn disk_mass_cubic() {
    let (_, mu) = canonical(&gon(64), 3.0, 0.02);
    let expected = 2.0 * PI * disk_density(3.0);
    assert!((expected - 18.31).abs() < 0.01);
    assert!(
        (mu.total_mass / expected - 1.0).abs() < 0.03,
        "{}",
        mu.total_mass
    );
}

#[test]
fn square_atoms_equal() {
    for p in [1.5, 2.0, 3.0] {
        let (_, mu) = canonical(&gon(4), p, 0.05);
        let mean = mu.total_mass / 4.0;
        for m in &mu.masses {
            assert!((m / mean - 1.0).abs() < 0.01, "p = {p}: {:?}", mu.masses);
        }
        assert!(mu.center_defect.norm() < 1e-2 * mu.total_mass);
    }
}

#[test]
fn total_mass_is_boundary_quadrature() {
    let (sol, mu) = canonical(&gon(6), 2.5, 0.05);
    let direct: f64 = boundary_gradient(&sol)
        .iter()
        .map(|f| f.grad.powf(1.5) * f.length)
        .sum();
    assert!((mu.total_mass - direct).abs() <= 1e-12 * direct);
}

#[test]
fn gamma_on_disk() {
    let p = gon(64);
    let (_, mu) = canonical(&p, 2.0, 0.02);
    let g = gamma(&p, &mu);
    assert_eq!(g.value, g.contributions.iter().sum::<f64>());
    // Every support value is 1.
    assert!((g.value - mu.total_mass).abs() < 1e-9 * g.value);
    assert!((g.value / (2.0 * PI * disk_density(2.0)) - 1.0).abs() < 0.02);
}

#[test]
fn gamma_of_zero_measure() {
    let p = gon(4);
    let mu = MeasureAtomMap::new(uniform_circle(4, 0.0), vec![0.0; 4]).unwrap();
    assert_eq!(gamma(&p, &mu).value, 0.0);
}

#[test]
fn gamma_dilation_family() {
    let omega = gon(8);
    for p in [2.0, 3.0] {
        let opts = MeshOptions::with_h(0.05);
        let (ring, mesh, _) = build_ring_with(&omega, 0.5, &opts, None).unwrap();
        let cfg = SolverConfig::new(p);
        let base = solve_dirichlet(Arc::new(mesh), |_| 1.0, &cfg).unwrap();
        let g0 = gamma(&omega, &pharm_measure(&omega, &base).unwrap()).value;
        let m = family_solve(&base, &ring, &omega, 0.1, &cfg).unwrap();
        let g1 = gamma(&m.body, &pharm_measure(&m.body, &m.solution).unwrap()).value;
        let expected = 1.1f64.powf(3.0 - p);
        assert!(
            (g1 / g0 / expected - 1.0).abs() < 0.02,
            "p = {p}: {}",
            g1 / g0
        );
    }
}

#[test]
fn tag_mismatch_detected() {
    let (sol, _) = canonical(&gon(8), 2.0, 0.05);
    assert!(matches!(
        pharm_measure(&gon(4), &sol),
        Err(Error::TagMismatch(_))
    ));
    let rotated =
        wulff_shape(&SupportVector::new(uniform_circle(8, 0.1), vec![1.0; 8]).unwrap()).unwrap();
    assert!(matches!(
        pharm_measure(&rotated, &sol),
        Err(Error::TagMismatch(_))
    ));
}

#[test]
fn residual_cases() {
    let dirs = uniform_circle(4, 0.0);
    let mu = SphericalMeasure::new(2, dirs.iter().cloned().zip([1.0, 2.0, 1.0, 2.0])).unwrap();
    let same = MeasureAtomMap::new(dirs.clone(), vec![1.0, 2.0, 1.0, 2.0]).unwrap();
    assert_eq!(residual(&same, &mu).unwrap(), 0.0);
    let double = same.scaled(2.0).unwrap();
    assert!((residual(&double, &mu).unwrap() - 1.0).abs() < 1e-15);
    let off = MeasureAtomMap::new(dirs.clone(), vec![1.0, 2.25, 1.0, 2.0]).unwrap();
    assert!((residual(&off, &mu).unwrap() - 0.25 / 6.0).abs() < 1e-15);
    let other = MeasureAtomMap::new(uniform_circle(4, 0.3), vec![1.0; 4]).unwrap();
    assert!(matches!(
        residual(&other, &mu),
        Err(Error::DirectionMismatch)
    ));
    let short = MeasureAtomMap::new(dirs[..3].to_vec(), vec![1.0; 3]).unwrap();
    assert!(matches!(
        residual(&short, &mu),
        Err(Error::DirectionMismatch)
    ));
}

#[test]
fn atoms_on_larger_normal_set() {
    let dirs = uniform_circle(8, 0.0);
    let mu = MeasureAtomMap::new(uniform_circle(4, 0.0), vec![1.0; 4]).unwrap();
    let wide = mu.on_normals(&dirs).unwrap();
    assert_eq!(wide.masses, vec![1.0, 0.0, 1.0, 0.0, 1.0, 0.0, 1.0, 0.0]);
    assert!(matches!(
        mu.on_normals(&dirs[..4]),
        Err(Error::DirectionMismatch)
    ));
}

#[test]
fn polygons_converge_weakly_to_disk() {
    let targets: Vec<Polytope> = [8, 16, 32, 64].into_iter().map(gon).collect();
    let rows = weak_convergence_probe(&targets, &gon(256), &ProbeConfig::new(2.0, 0.02)).unwrap();
    for w in rows.windows(2) {
        assert!(w[1].mass_gap < w[0].mass_gap, "{rows:?}");
        assert!(w[1].hausdorff < w[0].hausdorff);
    }
    assert!(rows[3].mass_gap <= 0.01, "{rows:?}");
}
