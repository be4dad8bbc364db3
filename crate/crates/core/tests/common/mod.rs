#![allow(dead_code)]

use std::f64::consts::PI;

use nalgebra::{DVector, Matrix3, Vector3};
use pharmink_core::geom::{
    gauss_map_measure, hausdorff_distance, minkowski_sum, radial_function, support_function,
    volume, volume_by_radial_quadrature, wulff_shape, Direction, Point, Polytope, SupportVector,
};
use proptest::prelude::*;
use proptest::test_runner::{Config, RngSeed, TestCaseError};

pub fn config(cases: u32) -> Config {
    Config {
        cases,
        rng_seed: RngSeed::Fixed(0),
        failure_persistence: None,
        ..Config::default()
    }
}

fn pt(v: &[f64]) -> Point {
    DVector::from_column_slice(v)
}

/// Hull of random points in the annulus `0.5 ≤ r ≤ 1.5` about a random
/// offset, translated so its centroid is the origin.
pub fn polygon() -> impl Strategy<Value = Polytope> {
    (
        prop::collection::vec((0.0..2.0 * PI, 0.5f64..1.5), 5..16),
        (-2.0f64..2.0, -2.0f64..2.0),
    )
        .prop_filter_map("flat hull", |(pts, (ox, oy))| {
            let pts: Vec<Point> = pts
                .iter()
                .map(|(a, r)| pt(&[ox + r * a.cos(), oy + r * a.sin()]))
                .collect();
            let p = Polytope::from_points(2, &pts).ok()?;
            p.require_solid().ok()?;
            Some(p.translated(&-p.centroid().clone()))
        })
}

/// Hull of random points on a shell in space, centroid at the origin.
pub fn polytope3() -> impl Strategy<Value = Polytope> {
    prop::collection::vec((0.0..2.0 * PI, -1.0f64..1.0, 0.7f64..1.3), 8..20).prop_filter_map(
        "flat hull",
        |pts| {
            let pts: Vec<Point> = pts
                .iter()
                .map(|(a, z, r)| {
                    let s = (1.0 - z * z).sqrt();
                    pt(&[r * s * a.cos(), r * s * a.sin(), r * z])
                })
                .collect();
            let p = Polytope::from_points(3, &pts).ok()?;
            p.require_solid().ok()?;
            Some(p.translated(&-p.centroid().clone()))
        },
    )
}

pub fn direction2() -> impl Strategy<Value = Direction> {
    (0.0..2.0 * PI).prop_map(Direction::from_angle)
}

pub fn direction3() -> impl Strategy<Value = Direction> {
    (0.0..2.0 * PI, -1.0f64..1.0).prop_map(|(a, z)| {
        let s = (1.0 - z * z).sqrt();
        Direction::from_slice(&[s * a.cos(), s * a.sin(), z]).unwrap()
    })
}

/// Every vertex of `a` is within `tol` of a vertex of `b` and vice versa.
pub fn same_vertices(a: &[Point], b: &[Point], tol: f64) -> bool {
    let covered = |x: &[Point], y: &[Point]| {
        x.iter()
            .all(|v| y.iter().any(|w| (v - w).norm() <= tol))
    };
    covered(a, b) && covered(b, a)
}

fn err(msg: String) -> TestCaseError {
    TestCaseError::fail(msg)
}

/// Support values at the facet normals rebuild the same body.
pub fn support_round_trip(p: &Polytope) -> Result<(), TestCaseError> {
    let q = wulff_shape(&p.facet_support_vector()).map_err(|e| err(format!("{e}")))?;
    if !same_vertices(p.vertices(), q.vertices(), 1e-9) {
        return Err(err(format!("{:?} vs {:?}", p.vertices(), q.vertices())));
    }
    Ok(())
}

/// `h_{P+Q} = h_P + h_Q` at the given directions to 1e−12.
pub fn minkowski_additive(p: &Polytope, q: &Polytope, dirs: &[Direction]) -> Result<(), TestCaseError> {
    let s = minkowski_sum(p, q).map_err(|e| err(format!("{e}")))?;
    for d in dirs {
        let y = d.as_vector();
        let gap = support_function(&s, y).unwrap()
            - support_function(p, y).unwrap()
            - support_function(q, y).unwrap();
        if gap.abs() > 1e-12 {
            return Err(err(format!("additivity gap {gap:e}")));
        }
    }
    Ok(())
}

/// `h_P(λy) = λ h_P(y)` and `r_{λP} = λ r_P` for `λ ∈ {0.5, 2}`.
pub fn homogeneous(p: &Polytope, dirs: &[Direction]) -> Result<(), TestCaseError> {
    for lam in [0.5, 2.0] {
        let scaled = p.scaled(lam);
        for d in dirs {
            let y = d.as_vector();
            let h = support_function(p, y).unwrap();
            let hl = support_function(p, &(y * lam)).unwrap();
            prop_assert!((hl - lam * h).abs() <= 1e-12 * (1.0 + h.abs()));
            let r = radial_function(p, d).unwrap();
            let rl = radial_function(&scaled, d).unwrap();
            prop_assert!((rl - lam * r).abs() <= 1e-12 * (1.0 + r));
        }
    }
    Ok(())
}

/// Direct Hausdorff distance between two polygons: the largest distance
/// from a point of either boundary to the other body, sampled densely.
pub fn hausdorff_brute(p: &Polytope, q: &Polytope) -> f64 {
    let dist_to = |body: &Polytope, x: &Point| -> f64 {
        if body.contains(x, 0.0) {
            return 0.0;
        }
        body.facets()
            .iter()
            .map(|f| {
                let a = &body.vertices()[f.vertices[0]];
                let b = &body.vertices()[f.vertices[1]];
                let ab = b - a;
                let t = ((x - a).dot(&ab) / ab.norm_squared()).clamp(0.0, 1.0);
                (x - (a + ab * t)).norm()
            })
            .fold(f64::INFINITY, f64::min)
    };
    let one_way = |from: &Polytope, to: &Polytope| {
        from.vertices()
            .iter()
            .map(|v| dist_to(to, v))
            .fold(0.0, f64::max)
    };
    one_way(p, q).max(one_way(q, p))
}

/// Hausdorff distance: support-function form equals the direct distance,
/// is symmetric and satisfies the triangle inequality.
pub fn hausdorff_metric(a: &Polytope, b: &Polytope, c: &Polytope) -> Result<(), TestCaseError> {
    let d = |x: &Polytope, y: &Polytope| hausdorff_distance(x, y, 256).unwrap();
    let (ab, ba, bc, ac) = (d(a, b), d(b, a), d(b, c), d(a, c));
    prop_assert!((ab - ba).abs() <= 1e-9, "asymmetric {} {}", ab, ba);
    prop_assert!(ac <= ab + bc + 1e-9, "triangle {} > {} + {}", ac, ab, bc);
    // Convex bodies: the farthest point of a body from the other is a vertex.
    let direct = hausdorff_brute(a, b);
    prop_assert!((ab - direct).abs() <= 1e-9, "support form {} vs direct {}", ab, direct);
    Ok(())
}

/// `Σ area_i ξ_i = 0`, computed from the facet measure.
pub fn closed(p: &Polytope) -> Result<(), TestCaseError> {
    let atoms = gauss_map_measure(p).map_err(|e| err(format!("{e}")))?;
    let sum = atoms
        .iter()
        .fold(DVector::zeros(p.dim()), |acc, (xi, a)| acc + xi.as_vector() * *a);
    prop_assert!(sum.norm() <= 1e-9, "closure defect {:e}", sum.norm());
    Ok(())
}

/// Exact area against `½ ∫ r²` on 4096 arcs.
pub fn radial_volume_agree(p: &Polytope) -> Result<(), TestCaseError> {
    let (v, _) = volume(p);
    let q = volume_by_radial_quadrature(p, 4096).unwrap();
    prop_assert!((q / v - 1.0).abs() <= 1e-4, "area {} vs quadrature {}", v, q);
    Ok(())
}

/// `P ⊆ Q` exactly when `h_P ≤ h_Q` on both facet-normal sets.
pub fn inclusion_order(p: &Polytope, q: &Polytope) -> Result<(), TestCaseError> {
    let by_vertices = p.vertices().iter().all(|v| q.contains(v, 1e-9));
    let mut normals: Vec<Direction> = (0..p.facets().len()).map(|f| p.facet_normal(f).clone()).collect();
    normals.extend((0..q.facets().len()).map(|f| q.facet_normal(f).clone()));
    let by_support = normals.iter().all(|n| {
        support_function(p, n.as_vector()).unwrap() <= support_function(q, n.as_vector()).unwrap() + 1e-9
    });
    prop_assert_eq!(by_vertices, by_support);
    Ok(())
}

/// Vertices of `{x : ⟨x, ξ_i⟩ ≤ h_i}` in space by solving every triple of
/// planes and keeping the feasible points.
pub fn brute_vertices3(normals: &[Direction], heights: &[f64]) -> Vec<Point> {
    let m = normals.len();
    let row = |i: usize| Vector3::from_column_slice(normals[i].coords());
    let mut out: Vec<Point> = Vec::new();
    for i in 0..m {
        for j in i + 1..m {
            for k in j + 1..m {
                let a = Matrix3::from_rows(&[row(i).transpose(), row(j).transpose(), row(k).transpose()]);
                let Some(inv) = a.try_inverse() else { continue };
                if a.determinant().abs() < 1e-10 {
                    continue;
                }
                let x = inv * Vector3::new(heights[i], heights[j], heights[k]);
                let feasible = (0..m).all(|l| row(l).dot(&x) <= heights[l] + 1e-9);
                let x = pt(x.as_slice());
                if feasible && !out.iter().any(|v| (v - &x).norm() <= 1e-7) {
                    out.push(x);
                }
            }
        }
    }
    out
}

/// Random bounded support vector in space: the six axis normals plus random
/// extra normals.
pub fn support_vector3() -> impl Strategy<Value = SupportVector> {
    (
        prop::collection::vec(direction3(), 0..10),
        prop::collection::vec(0.5f64..1.5, 16),
    )
        .prop_map(|(extra, heights)| {
            let mut normals: Vec<Direction> = [
                [1.0, 0.0, 0.0],
                [-1.0, 0.0, 0.0],
                [0.0, 1.0, 0.0],
                [0.0, -1.0, 0.0],
                [0.0, 0.0, 1.0],
                [0.0, 0.0, -1.0],
            ]
            .iter()
            .map(|v| Direction::from_slice(v).unwrap())
            .collect();
            normals.extend(extra);
            let h = heights[..normals.len()].to_vec();
            SupportVector::new(normals, h).unwrap()
        })
}

pub fn wulff_matches_brute_force(h: &SupportVector) -> Result<(), TestCaseError> {
    let p = wulff_shape(h).map_err(|e| err(format!("{e}")))?;
    let brute = brute_vertices3(&h.normals, &h.heights);
    prop_assert!(
        same_vertices(p.vertices(), &brute, 1e-7),
        "{} vertices vs {} by brute force",
        p.vertices().len(),
        brute.len()
    );
    Ok(())
}
