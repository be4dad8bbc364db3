use core::f64::consts::PI;

use super::{BoundaryElement, BoundaryTag, ConvexRing, SimplicialMesh, MARGIN_FACTOR};
use crate::geom::{Direction, Polytope};
use crate::prelude::*;
use crate::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub struct MeshOptions {
    /// Target edge length on the outer boundary.
    pub target_h: f64,
    /// Fewest edges allowed on one facet.
    pub min_edges: usize,
    /// Split the end segments of facets meeting at a sharp corner.
    pub corner_grading: bool,
    /// Turning angle (radians) above which a corner counts as sharp.
    pub grading_angle: f64,
}

impl MeshOptions {
    pub fn with_h(target_h: f64) -> Self {
        MeshOptions {
            target_h,
            ..Self::default()
        }
    }

    fn validate(&self) -> Result<()> {
        if !(self.target_h > 0.0 && self.target_h.is_finite()) {
            return Err(Error::InvalidConfig(format!("mesh size {}", self.target_h)));
        }
        if self.min_edges == 0 {
            return Err(Error::InvalidConfig("min_edges must be at least 1".into()));
        }
        Ok(())
    }
}

impl Default for MeshOptions {
    fn default() -> Self {
        MeshOptions {
            target_h: 0.05,
            min_edges: 4,
            corner_grading: true,
            grading_angle: 20f64.to_radians(),
        }
    }
}

/// Per-facet edge counts and layer counts of a mesh, keyed by facet normal.
#[derive(Clone, Debug, PartialEq)]
pub struct MeshLayout {
    pub facets: Vec<FacetLayout>,
    /// Layers of the margin annulus (0 for a single-zone mesh).
    pub margin_layers: usize,
    pub ring_layers: usize,
    /// Diagonal choice per quad of the ring zone, row by row from the inner
    /// circle; `true` splits along the diagonal leaving the inner-left node.
    pub diagonals: Vec<bool>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct FacetLayout {
    pub normal: Direction,
    pub edges: usize,
    pub grade_start: bool,
    pub grade_end: bool,
}

impl MeshLayout {
    /// The layout of the ring zone alone, for meshes on the inner circle.
    pub fn ring_only(&self) -> MeshLayout {
        MeshLayout {
            margin_layers: 0,
            ..self.clone()
        }
    }

    fn find(&self, normal: &Direction) -> Option<&FacetLayout> {
        self.facets
            .iter()
            .find(|f| f.normal.angle_to(normal) <= 1e-9)
    }
}

/// Canonical ring about the centroid of `p` and its mesh.
///
/// `inner_radius = shrink · dist(centroid, ∂P)`; the mesh fills the extended
/// ring from the margin circle `0.8 · inner_radius` out to `∂P`.
pub fn build_ring(
    p: &Polytope,
    shrink: f64,
    target_h: f64,
) -> Result<(ConvexRing, SimplicialMesh)> {
    let (ring, mesh, _) = build_ring_with(p, shrink, &MeshOptions::with_h(target_h), None)?;
    Ok((ring, mesh))
}

pub fn build_ring_with(
    p: &Polytope,
    shrink: f64,
    opts: &MeshOptions,
    layout: Option<&MeshLayout>,
) -> Result<(ConvexRing, SimplicialMesh, MeshLayout)> {
    if p.dim() != 2 {
        return Err(Error::UnsupportedDimension(p.dim()));
    }
    p.require_solid()?;
    if !(shrink > 0.0 && shrink < 1.0) {
        return Err(Error::InvalidRing(format!(
            "shrink {shrink} outside (0, 1)"
        )));
    }
    let c = p.centroid();
    let inner = shrink * p.boundary_distance(c);
    let ring = ConvexRing::new(p.clone(), [c[0], c[1]], inner, MARGIN_FACTOR * inner)?;
    let (mesh, layout) = mesh_zones(
        p,
        ring.inner_center,
        &[ring.margin_inner_radius, ring.inner_radius],
        opts,
        layout,
    )?;
    Ok((ring, mesh, layout))
}

/// Single-zone mesh between the circle `|x − center| = rho` and `∂outer`.
pub fn mesh_annulus(
    outer: &Polytope,
    center: [f64; 2],
    rho: f64,
    opts: &MeshOptions,
    layout: Option<&MeshLayout>,
) -> Result<(SimplicialMesh, MeshLayout)> {
    mesh_zones(outer, center, &[rho], opts, layout)
}

fn ccw_span(from: f64, to: f64) -> f64 {
    let mut g = to - from;
    while g <= 0.0 {
        g += 2.0 * PI;
    }
    while g > 2.0 * PI {
        g -= 2.0 * PI;
    }
    g
}

/// Parameters in `[0, 1)` of the nodes on one facet, uniform in angle with
/// optional halved end segments.
fn fractions(fl: &FacetLayout) -> Vec<f64> {
    let k = fl.edges as f64;
    let mut s: Vec<f64> = (0..fl.edges).map(|i| i as f64 / k).collect();
    if fl.grade_start {
        s.insert(1, 0.5 / k);
    }
    if fl.grade_end && !(fl.edges == 1 && fl.grade_start) {
        s.push((k - 0.5) / k);
    }
    s
}

fn mesh_zones(
    outer: &Polytope,
    center: [f64; 2],
    radii: &[f64],
    opts: &MeshOptions,
    layout: Option<&MeshLayout>,
) -> Result<(SimplicialMesh, MeshLayout)> {
    opts.validate()?;
    if outer.dim() != 2 {
        return Err(Error::UnsupportedDimension(outer.dim()));
    }
    outer.require_solid()?;
    let rho0 = radii[0];
    let rho = *radii.last().unwrap_or(&rho0);
    let cv = nalgebra::DVector::from_column_slice(&center);
    if !(rho0 > 0.0) || outer.boundary_distance(&cv) <= rho {
        return Err(Error::InvalidRing(format!(
            "circle of radius {rho} about {center:?} not inside the outer body"
        )));
    }

    let nf = outer.facets().len();
    let angle_of = |x: &nalgebra::DVector<f64>| (x[1] - center[1]).atan2(x[0] - center[0]);
    let mut facet_layouts = Vec::with_capacity(nf);
    for f in 0..nf {
        let normal = outer.facet_normal(f).clone();
        let prev = outer.facet_normal((f + nf - 1) % nf);
        let next = outer.facet_normal((f + 1) % nf);
        let fresh = || -> Result<FacetLayout> {
            let len = outer.facets()[f].area;
            let k = (len / opts.target_h - 1e-9).ceil().max(1.0) as usize;
            if k < opts.min_edges && layout.is_none() {
                return Err(Error::MeshTooCoarse {
                    facet: f,
                    length: len,
                    h: opts.target_h,
                    min_edges: opts.min_edges,
                });
            }
            let sharp =
                |o: &Direction| opts.corner_grading && normal.angle_to(o) >= opts.grading_angle;
            Ok(FacetLayout {
                normal: normal.clone(),
                edges: k,
                grade_start: sharp(prev),
                grade_end: sharp(next),
            })
        };
        let fl = match layout.and_then(|l| l.find(&normal)) {
            Some(fl) => fl.clone(),
            None => fresh()?,
        };
        facet_layouts.push(fl);
    }

    // Outer nodes, counter-clockwise, each facet contributing its start vertex
    // and interior nodes.
    let mut outer_pts: Vec<[f64; 2]> = Vec::new();
    let mut seg_facet: Vec<usize> = Vec::new();
    for (f, fl) in facet_layouts.iter().enumerate() {
        let (lo, hi) = outer.facet_endpoints(f);
        let (phi0, phi1) = (angle_of(lo), angle_of(hi));
        let span = ccw_span(phi0, phi1);
        let xi = outer.facet_normal(f).coords();
        let off = outer.facet_offset(f);
        let gap = off - (xi[0] * center[0] + xi[1] * center[1]);
        for (i, s) in fractions(fl).into_iter().enumerate() {
            let pt = if i == 0 {
                [lo[0], lo[1]]
            } else {
                let phi = phi0 + s * span;
                let d = [phi.cos(), phi.sin()];
                let r = gap / (xi[0] * d[0] + xi[1] * d[1]);
                [center[0] + r * d[0], center[1] + r * d[1]]
            };
            outer_pts.push(pt);
            seg_facet.push(f);
        }
    }
    let n = outer_pts.len();
    let rel: Vec<([f64; 2], f64)> = outer_pts
        .iter()
        .map(|p| {
            let d = [p[0] - center[0], p[1] - center[1]];
            let r = d[0].hypot(d[1]);
            ([d[0] / r, d[1] / r], r)
        })
        .collect();

    let dphi = 2.0 * PI / n as f64;
    let (margin_layers, ring_layers) = match layout {
        Some(l) => (l.margin_layers, l.ring_layers),
        None => {
            let mean_log = rel.iter().map(|(_, r)| (r / rho).ln()).sum::<f64>() / n as f64;
            let ring = ((mean_log / dphi).round() as usize).max(2);
            let margin = if radii.len() > 1 {
                (((rho / rho0).ln() / dphi).round() as usize).max(1)
            } else {
                0
            };
            (margin, ring)
        }
    };
    if (radii.len() > 1) != (margin_layers > 0) {
        return Err(Error::InvalidConfig(
            "layout zones do not match the ring".into(),
        ));
    }
    let layers = margin_layers + ring_layers;

    let mut nodes = Vec::with_capacity(n * (layers + 1));
    for j in 0..=layers {
        for (k, (d, r_out)) in rel.iter().enumerate() {
            let r = if j < margin_layers {
                rho0 * (rho / rho0).powf(j as f64 / margin_layers as f64)
            } else if j < layers {
                let s = (j - margin_layers) as f64 / ring_layers as f64;
                rho * (r_out / rho).powf(s)
            } else {
                nodes.push(outer_pts[k]);
                continue;
            };
            nodes.push([center[0] + r * d[0], center[1] + r * d[1]]);
        }
    }

    let id = |j: usize, k: usize| j * n + k % n;
    let dist2 = |a: usize, b: usize, nodes: &[[f64; 2]]| {
        let (p, q) = (nodes[a], nodes[b]);
        (p[0] - q[0]).powi(2) + (p[1] - q[1]).powi(2)
    };
    let mut triangles = Vec::with_capacity(2 * n * layers);
    let mut boundary = Vec::with_capacity(2 * n);
    let mut diagonals = vec![false; n * ring_layers];
    for j in 0..layers {
        for k in 0..n {
            let (a, b, c, d) = (id(j, k), id(j, k + 1), id(j + 1, k + 1), id(j + 1, k));
            let t0 = triangles.len();
            let q = j.checked_sub(margin_layers).map(|r| r * n + k);
            let reuse = layout
                .filter(|l| l.diagonals.len() == n * ring_layers)
                .zip(q)
                .map(|(l, q)| l.diagonals[q]);
            let ac = reuse.unwrap_or_else(|| dist2(a, c, &nodes) <= dist2(b, d, &nodes));
            if let Some(q) = q {
                diagonals[q] = ac;
            }
            let (inner_tri, outer_tri) = if ac {
                triangles.push([a, c, b]);
                triangles.push([a, d, c]);
                (t0, t0 + 1)
            } else {
                triangles.push([a, d, b]);
                triangles.push([b, d, c]);
                (t0, t0 + 1)
            };
            if j == 0 {
                boundary.push(BoundaryElement {
                    nodes: [a, b],
                    tag: BoundaryTag::Inner,
                    triangle: inner_tri,
                });
            }
            if j + 1 == layers {
                boundary.push(BoundaryElement {
                    nodes: [d, c],
                    tag: BoundaryTag::Outer(seg_facet[k]),
                    triangle: outer_tri,
                });
            }
        }
    }
    let interface = if margin_layers > 0 {
        (0..n).map(|k| id(margin_layers, k)).collect()
    } else {
        Vec::new()
    };
    let mut mesh = SimplicialMesh::from_parts(
        nodes,
        triangles,
        boundary,
        opts.target_h,
        center,
        rho0,
        interface,
    )?;
    let layout = MeshLayout {
        facets: facet_layouts,
        margin_layers,
        ring_layers,
        diagonals,
    };
    mesh.set_layout(layout.clone());
    Ok((mesh, layout))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::{sampling::uniform_circle, wulff_shape, SupportVector};
    use crate::mesh::NodeKind;

    pub(crate) fn regular(k: usize, h: f64) -> Polytope {
        wulff_shape(&SupportVector::new(uniform_circle(k, 0.0), vec![h; k]).unwrap()).unwrap()
    }

    #[test]
    fn square_ring_contract() {
        let (ring, mesh) = build_ring(&regular(4, 1.0), 0.5, 0.05).unwrap();
        assert!((ring.inner_radius - 0.5).abs() < 1e-12);
        assert!((ring.margin_inner_radius - 0.4).abs() < 1e-12);
        for f in 0..4 {
            assert!(mesh.elements_with(BoundaryTag::Outer(f)).count() >= 20);
        }
        assert!(mesh.min_angle_deg() >= 15.0, "{}", mesh.min_angle_deg());
    }

    #[test]
    fn octagon_symmetric_counts() {
        let (_, mesh) = build_ring(&regular(8, 1.0), 0.5, 0.05).unwrap();
        let counts: Vec<usize> = (0..8)
            .map(|f| mesh.elements_with(BoundaryTag::Outer(f)).count())
            .collect();
        assert!(counts.iter().all(|&c| c == counts[0]));
        assert!(mesh.min_angle_deg() >= 15.0);
    }

    #[test]
    fn outer_nodes_on_facets() {
        let p = regular(8, 1.0);
        let (_, mesh) = build_ring(&p, 0.5, 0.05).unwrap();
        for b in mesh.boundary() {
            if let BoundaryTag::Outer(f) = b.tag {
                let xi = p.facet_normal(f).coords();
                for &v in &b.nodes {
                    let x = mesh.nodes()[v];
                    assert!((xi[0] * x[0] + xi[1] * x[1] - p.facet_offset(f)).abs() < 1e-9);
                }
            }
        }
    }

    #[test]
    fn area_and_inner_circle() {
        let p = regular(64, 1.0);
        let (ring, mesh) = build_ring(&p, 0.5, 0.02).unwrap();
        for (x, k) in mesh.nodes().iter().zip(mesh.node_kinds()) {
            if *k == NodeKind::Inner {
                assert!((x[0].hypot(x[1]) - ring.margin_inner_radius).abs() < 1e-12);
            }
        }
        assert!(mesh.min_angle_deg() >= 15.0);
        assert!(!mesh.interface_nodes().is_empty());
        let fine = mesh.refine().unwrap();
        let disk = core::f64::consts::PI * ring.margin_inner_radius.powi(2);
        let exact = crate::geom::volume(&p).0 - disk;
        assert!((fine.total_area() - exact).abs() / exact < 1e-4);
        assert_eq!(fine.triangles().len(), 4 * mesh.triangles().len());
        assert_eq!(fine.boundary().len(), 2 * mesh.boundary().len());
        assert!(fine.min_angle_deg() >= 15.0);
        for (x, k) in fine.nodes().iter().zip(fine.node_kinds()) {
            if *k == NodeKind::Inner {
                assert!((x[0].hypot(x[1]) - ring.margin_inner_radius).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn too_coarse_is_rejected() {
        assert!(matches!(
            build_ring(&regular(64, 1.0), 0.5, 0.1),
            Err(Error::MeshTooCoarse { .. })
        ));
    }

    #[test]
    fn layout_reuse_keeps_counts() {
        let p = regular(8, 1.0);
        let (ring, _, layout) = build_ring_with(&p, 0.5, &MeshOptions::with_h(0.05), None).unwrap();
        let big = p.scaled(1.1);
        let opts = MeshOptions::with_h(0.05);
        let l = layout.ring_only();
        let (m0, _) =
            mesh_annulus(&p, ring.inner_center, ring.inner_radius, &opts, Some(&l)).unwrap();
        let (m1, _) =
            mesh_annulus(&big, ring.inner_center, ring.inner_radius, &opts, Some(&l)).unwrap();
        assert_eq!(m0.nodes().len(), m1.nodes().len());
        assert_eq!(m0.triangles(), m1.triangles());
    }
}
