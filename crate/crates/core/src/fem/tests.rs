use super::*;
use crate::geom::{sampling::uniform_circle, wulff_shape, SupportVector};
use crate::mesh::{build_ring_with, mesh_annulus, MeshOptions};

fn gon(k: usize) -> crate::Polytope {
    // Circumscribed about the unit circle, vertices on radius 1/cos(π/k).
    wulff_shape(&SupportVector::new(uniform_circle(k, 0.0), vec![1.0; k]).unwrap()).unwrap()
}

fn disk_mesh(h: f64) -> Arc<SimplicialMesh> {
    let (m, _) = mesh_annulus(&gon(64), [0.0, 0.0], 0.5, &MeshOptions::with_h(h), None).unwrap();
    Arc::new(m)
}

/// Radial p-harmonic function with u(0.5) = 1 and u(1) = 0.
fn radial(p: f64, r: f64) -> f64 {
    if p == 2.0 {
        r.ln() / 0.5f64.ln()
    } else {
        let a = (p - 2.0) / (p - 1.0);
        (r.powf(a) - 1.0) / (0.5f64.powf(a) - 1.0)
    }
}

fn max_error(sol: &PHarmSolution, p: f64) -> f64 {
    sol.mesh()
        .nodes()
        .iter()
        .zip(&sol.nodal_values)
        .map(|(x, u)| {
            // The polygon is not the unit circle; compare where the disk
            // oracle applies, inside radius cos(π/64).
            let r = x[0].hypot(x[1]);
            if r <= (PI_64).cos() {
                (u - radial(p, r)).abs()
            } else {
                0.0
            }
        })
        .fold(0.0, f64::max)
}

const PI_64: f64 = core::f64::consts::PI / 64.0;

#[test]
fn harmonic_matches_log() {
    let sol = solve_dirichlet(disk_mesh(0.02), |_| 1.0, &SolverConfig::new(2.0)).unwrap();
    assert!(max_error(&sol, 2.0) < 1e-3, "{}", max_error(&sol, 2.0));
    let v = evaluate(&sol, [0.75, 0.0]).unwrap();
    assert!((v - (1.0f64 / 0.75).ln() / 2f64.ln()).abs() < 1e-3);
    let flux = boundary_gradient(&sol);
    let mean = flux.iter().map(|f| f.grad * f.length).sum::<f64>()
        / flux.iter().map(|f| f.length).sum::<f64>();
    assert!((mean / (1.0 / 2f64.ln()) - 1.0).abs() < 0.02, "{mean}");
}

#[test]
fn cubic_matches_sqrt_profile() {
    let sol = solve_dirichlet(disk_mesh(0.02), |_| 1.0, &SolverConfig::new(3.0)).unwrap();
    assert!(max_error(&sol, 3.0) < 5e-3, "{}", max_error(&sol, 3.0));
    let flux = boundary_gradient(&sol);
    let expected = 1.0 / (2.0 * (1.0 - 0.5f64.sqrt()));
    for f in &flux {
        assert!((f.grad / expected - 1.0).abs() < 0.03, "{}", f.grad);
        assert!(f.tangential <= 0.05 * f.grad);
    }
    let e = &sol.stats.energy_history;
    assert!(e.windows(2).all(|w| w[1] <= w[0] * (1.0 + 1e-12)));
}

#[test]
fn zero_data_gives_zero() {
    let sol = solve_dirichlet(disk_mesh(0.05 * 0.4), |_| 0.0, &SolverConfig::new(1.5)).unwrap();
    assert!(sol.nodal_values.iter().all(|&u| u == 0.0));
}

#[test]
fn max_principle_and_interpolation() {
    let sol = solve_dirichlet(disk_mesh(0.02), |_| 1.0, &SolverConfig::new(1.5)).unwrap();
    assert!(sol
        .nodal_values
        .iter()
        .all(|&u| (-1e-12..=1.0 + 1e-12).contains(&u)));
    let m = sol.mesh();
    let x = m.nodes()[100];
    assert_eq!(evaluate(&sol, x).unwrap(), sol.nodal_values[100]);
    let t = m.triangles()[7];
    let c = [0, 1].map(|k| t.iter().map(|&i| m.nodes()[i][k]).sum::<f64>() / 3.0);
    let mean = t.iter().map(|&i| sol.nodal_values[i]).sum::<f64>() / 3.0;
    assert!((evaluate(&sol, c).unwrap() - mean).abs() < 1e-14);
    assert!(matches!(
        evaluate(&sol, [5.0, 0.0]),
        Err(Error::OutOfDomain { .. })
    ));
}

#[test]
fn rejects_bad_exponent() {
    assert!(matches!(
        solve_dirichlet(disk_mesh(0.02), |_| 1.0, &SolverConfig::new(1.0)),
        Err(Error::InvalidExponent(_))
    ));
}

fn total_mass(sol: &PHarmSolution) -> f64 {
    boundary_gradient(sol)
        .iter()
        .map(|f| f.grad.powf(sol.p - 1.0) * f.length)
        .sum()
}

#[test]
fn family_at_zero_restricts_base() {
    let p = gon(8);
    let (ring, mesh, _) = build_ring_with(&p, 0.5, &MeshOptions::with_h(0.05), None).unwrap();
    let cfg = SolverConfig::new(3.0);
    let base = solve_dirichlet(Arc::new(mesh), |_| 1.0, &cfg).unwrap();
    let fam = family_solve(&base, &ring, &p, 0.0, &cfg).unwrap();
    let (m0, m1) = (total_mass(&base), total_mass(&fam.solution));
    assert!((m0 - m1).abs() <= 1e-6 * m0, "{m0} {m1}");
}

#[test]
fn dilation_family_scales_mass() {
    let p = gon(8);
    let (ring, mesh, _) = build_ring_with(&p, 0.5, &MeshOptions::with_h(0.05), None).unwrap();
    for (exp, cfg) in [
        (0.0, SolverConfig::new(2.0)),
        (-1.0, SolverConfig::new(3.0)),
    ] {
        let base = solve_dirichlet(Arc::new(mesh.clone()), |_| 1.0, &cfg).unwrap();
        let f0 = family_solve(&base, &ring, &p, 0.0, &cfg).unwrap();
        let f1 = family_solve(&base, &ring, &p, 0.1, &cfg).unwrap();
        let ratio = total_mass(&f1.solution) / total_mass(&f0.solution);
        assert!((ratio / 1.1f64.powf(exp) - 1.0).abs() < 0.01, "{ratio}");
    }
}

#[test]
fn family_rejects_large_t() {
    let p = gon(8);
    let (ring, mesh, _) = build_ring_with(&p, 0.5, &MeshOptions::with_h(0.05), None).unwrap();
    let cfg = SolverConfig::new(2.0);
    let base = solve_dirichlet(Arc::new(mesh), |_| 1.0, &cfg).unwrap();
    assert!(matches!(
        family_solve(&base, &ring, &p, 0.9, &cfg),
        Err(Error::FamilyParameter { .. })
    ));
}
