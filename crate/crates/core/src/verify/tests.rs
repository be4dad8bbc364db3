use super::*;

#[test]
fn sphere_areas() {
    assert!((sphere_area(2) - 2.0 * PI).abs() < 1e-14);
    assert!((sphere_area(3) - 4.0 * PI).abs() < 1e-13);
    assert!((sphere_area(4) - 2.0 * PI * PI).abs() < 1e-12);
}

#[test]
fn ball_oracle_values() {
    let o = ball_oracle(2, 2.0, 1.0, 0.5, 1.0).unwrap();
    assert!((o.density - 1.0 / 2f64.ln()).abs() < 1e-14);
    assert!((o.total_mass - 9.0647).abs() < 1e-4);
    let o = ball_oracle(2, 3.0, 1.0, 0.5, 1.0).unwrap();
    // u = a r² + b with a(1/4 − 1) = 1, so |u'(1)| = 8/3.
    assert!((o.density - 2.9142).abs() < 1e-4, "{}", o.density);
    assert!((o.total_mass - 18.310).abs() < 1e-3);
    let o = ball_oracle(2, 2.0, 1.0, 0.5, 0.0).unwrap();
    assert_eq!((o.density, o.total_mass), (0.0, 0.0));
}

#[test]
fn ball_oracle_boundary_values() {
    for (n, p) in [(2, 1.5), (2, 2.0), (2, 3.0), (3, 2.0), (3, 3.0), (3, 4.5)] {
        let o = ball_oracle(n, p, 2.0, 0.7, 1.3).unwrap();
        assert!(o.u.value(2.0).abs() < 1e-12);
        assert!((o.u.value(0.7) - 1.3).abs() < 1e-12);
        // Radial p-Laplacian: r^{n−1}|u'|^{p−2}u' is constant.
        let flux = |r: f64| r.powi(n as i32 - 1) * o.u.slope(r).abs().powf(p - 2.0) * o.u.slope(r);
        assert!((flux(0.9) / flux(1.7) - 1.0).abs() < 1e-12);
    }
}

#[test]
fn ball_oracle_rejects_bad_radii() {
    assert!(matches!(
        ball_oracle(2, 2.0, 1.0, 1.0, 1.0),
        Err(Error::InvalidRing(_))
    ));
    assert!(matches!(
        ball_oracle(2, 2.0, 1.0, 0.0, 1.0),
        Err(Error::InvalidRing(_))
    ));
    assert!(matches!(
        ball_oracle(2, 1.0, 1.0, 0.5, 1.0),
        Err(Error::InvalidExponent(_))
    ));
}

#[test]
fn check_result_pass_rule() {
    let ctx = CheckContext::new(2.0, 2, 0.1);
    let r = CheckResult::relative("a", 1.01, 1.0, 0.02, ctx.clone());
    assert!(r.passed && (r.rel_error - 0.01).abs() < 1e-12);
    assert!(!r.clone().with_tolerance(1e-12).passed);
    let nan = CheckResult::relative("b", f64::NAN, 1.0, 1.0, ctx.clone());
    assert!(!nan.passed);
    let err = CheckResult::failed("c", 0.1, ctx, &Error::EmptySchedule);
    assert!(!err.passed && err.context.note.is_some());
}

#[test]
fn scaling_law_coarse() {
    let base = FamilyBase::new(&regular_polygon(16).unwrap(), 3.0, 0.05).unwrap();
    let [total, atoms] = scaling_check(&base, 0.1).unwrap();
    assert!(total.passed && atoms.passed, "{total:?} {atoms:?}");
    assert!((total.expected - 1.0 / 1.1).abs() < 1e-12);
}

#[test]
fn scaling_at_zero_is_exact() {
    let base = FamilyBase::new(&regular_polygon(8).unwrap(), 2.0, 0.05).unwrap();
    let [total, atoms] = scaling_check(&base, 0.0).unwrap();
    assert!(total.rel_error < 1e-9 && atoms.measured < 1e-9);
}

#[test]
fn selfadjoint_same_body_is_exact() {
    let base = FamilyBase::new(&regular_polygon(16).unwrap(), 2.0, 0.05).unwrap();
    let q = regular_polygon(4).unwrap();
    let r = selfadjoint_check(&base, &q, &q, 0.02).unwrap();
    assert_eq!(r.rel_error, 0.0);
}

#[test]
fn hadamard_dilation_coarse() {
    let omega = regular_polygon(16).unwrap();
    let base = FamilyBase::new(&omega, 2.0, 0.05).unwrap();
    let r = hadamard_check(&base, &omega, 0.02).unwrap();
    assert!(r.passed, "{r:?}");
}

#[test]
fn absurd_tolerance_reports_failures() {
    let cfg = BatteryConfig {
        ps: vec![2.0],
        mesh_h: 0.08,
        gon: 16,
        classical_polygons: 2,
        weak_convergence: false,
        tolerance_override: Some(1e-12),
        ..BatteryConfig::default()
    };
    let out = run_battery(&cfg);
    assert!(out.len() >= 6);
    assert!(out.iter().any(|r| !r.passed));
    assert!(out.iter().all(|r| r.tolerance == 1e-12));
    let table = format_table(&out);
    assert_eq!(table.lines().count(), out.len() + 2);
}
