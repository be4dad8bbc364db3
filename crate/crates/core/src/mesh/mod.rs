//! Triangulations of the convex ring between a circle and a polygon.
//!
//! Meshes are layered log-polar grids: nodes sit on rays from the ring
//! center, one ray per boundary node of the polygon, and layers are
//! geometric in the radius. The canonical ring carries two zones: a thin
//! circular annulus between the margin circle and the inner circle, and the
//! ring proper between the inner circle and the polygon. Family meshes reuse
//! the outer zone with the same [`MeshLayout`], so node counts stay fixed
//! while the polygon moves.

mod build;
mod locate;
mod refine;

pub use build::{build_ring, build_ring_with, mesh_annulus, MeshLayout, MeshOptions};
pub use locate::Locator;

use crate::geom::Polytope;
use crate::prelude::*;
use crate::{Error, Result};

/// Ratio `margin_inner_radius / inner_radius`.
pub const MARGIN_FACTOR: f64 = 0.8;

/// Annular domain between a circle and a convex outer body.
#[derive(Clone, Debug)]
pub struct ConvexRing {
    pub outer: Polytope,
    pub inner_center: [f64; 2],
    pub inner_radius: f64,
    /// Radius of the extended ring's inner circle.
    pub margin_inner_radius: f64,
}

impl ConvexRing {
    pub fn new(
        outer: Polytope,
        inner_center: [f64; 2],
        inner_radius: f64,
        margin_inner_radius: f64,
    ) -> Result<Self> {
        outer.require_solid()?;
        if outer.dim() != 2 {
            return Err(Error::UnsupportedDimension(outer.dim()));
        }
        if !(margin_inner_radius > 0.0 && margin_inner_radius < inner_radius) {
            return Err(Error::InvalidRing(format!(
                "need 0 < margin radius {margin_inner_radius} < inner radius {inner_radius}"
            )));
        }
        let c = nalgebra::DVector::from_column_slice(&inner_center);
        let clearance = outer.boundary_distance(&c) - inner_radius;
        if clearance < 0.1 * outer.inradius_estimate() {
            return Err(Error::InvalidRing(format!(
                "inner circle clearance {clearance:.3e} below 0.1 x inradius"
            )));
        }
        Ok(ConvexRing {
            outer,
            inner_center,
            inner_radius,
            margin_inner_radius,
        })
    }

    /// Same circles around a different outer body.
    pub fn with_outer(&self, outer: Polytope) -> Result<Self> {
        ConvexRing::new(
            outer,
            self.inner_center,
            self.inner_radius,
            self.margin_inner_radius,
        )
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum BoundaryTag {
    /// On the facet with this index in the outer polytope.
    Outer(usize),
    Inner,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NodeKind {
    Interior,
    Outer,
    Inner,
}

/// A boundary edge with its tag and adjacent triangle.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BoundaryElement {
    pub nodes: [usize; 2],
    pub tag: BoundaryTag,
    pub triangle: usize,
}

/// Conforming triangulation with tagged boundary edges.
#[derive(Clone, Debug)]
pub struct SimplicialMesh {
    nodes: Vec<[f64; 2]>,
    triangles: Vec<[usize; 3]>,
    boundary: Vec<BoundaryElement>,
    kinds: Vec<NodeKind>,
    h: f64,
    center: [f64; 2],
    inner_radius: f64,
    /// Node indices on the interface circle of a two-zone mesh.
    interface: Vec<usize>,
    locator: Locator,
    layout: Option<MeshLayout>,
}

impl SimplicialMesh {
    pub(crate) fn from_parts(
        nodes: Vec<[f64; 2]>,
        triangles: Vec<[usize; 3]>,
        boundary: Vec<BoundaryElement>,
        h: f64,
        center: [f64; 2],
        inner_radius: f64,
        interface: Vec<usize>,
    ) -> Result<Self> {
        let mut kinds = vec![NodeKind::Interior; nodes.len()];
        for b in &boundary {
            let k = match b.tag {
                BoundaryTag::Outer(_) => NodeKind::Outer,
                BoundaryTag::Inner => NodeKind::Inner,
            };
            for &n in &b.nodes {
                if kinds[n] != NodeKind::Interior && kinds[n] != k {
                    return Err(Error::InvalidMesh(format!("node {n} on both boundaries")));
                }
                kinds[n] = k;
            }
        }
        for (t, tri) in triangles.iter().enumerate() {
            if signed_area(&nodes, tri) <= 0.0 {
                return Err(Error::InvalidMesh(format!(
                    "triangle {t} not positively oriented"
                )));
            }
        }
        let locator = Locator::new(&nodes, &triangles);
        Ok(SimplicialMesh {
            nodes,
            triangles,
            boundary,
            kinds,
            h,
            center,
            inner_radius,
            interface,
            locator,
            layout: None,
        })
    }

    pub fn nodes(&self) -> &[[f64; 2]] {
        &self.nodes
    }

    pub fn triangles(&self) -> &[[usize; 3]] {
        &self.triangles
    }

    pub fn boundary(&self) -> &[BoundaryElement] {
        &self.boundary
    }

    pub fn node_kinds(&self) -> &[NodeKind] {
        &self.kinds
    }

    /// Nominal mesh size: mean outer edge length target.
    pub fn h(&self) -> f64 {
        self.h
    }

    pub fn center(&self) -> [f64; 2] {
        self.center
    }

    /// Radius of the meshed inner circle.
    pub fn inner_radius(&self) -> f64 {
        self.inner_radius
    }

    pub fn interface_nodes(&self) -> &[usize] {
        &self.interface
    }

    /// Layout the mesh was generated with; `None` after refinement.
    pub fn layout(&self) -> Option<&MeshLayout> {
        self.layout.as_ref()
    }

    pub(crate) fn set_layout(&mut self, layout: MeshLayout) {
        self.layout = Some(layout);
    }

    /// Triangle containing `x` with barycentric coordinates.
    pub fn locate(&self, x: [f64; 2]) -> Option<(usize, [f64; 3])> {
        self.locator.locate(&self.nodes, &self.triangles, x)
    }

    pub fn triangle_area(&self, t: usize) -> f64 {
        signed_area(&self.nodes, &self.triangles[t])
    }

    pub fn total_area(&self) -> f64 {
        (0..self.triangles.len())
            .map(|t| self.triangle_area(t))
            .sum()
    }

    /// Smallest interior angle over all triangles, in degrees.
    pub fn min_angle_deg(&self) -> f64 {
        self.triangles
            .iter()
            .map(|t| {
                let p = t.map(|i| self.nodes[i]);
                (0..3)
                    .map(|k| {
                        let (a, b, c) = (p[k], p[(k + 1) % 3], p[(k + 2) % 3]);
                        let u = [b[0] - a[0], b[1] - a[1]];
                        let v = [c[0] - a[0], c[1] - a[1]];
                        let cross = u[0] * v[1] - u[1] * v[0];
                        let dot = u[0] * v[0] + u[1] * v[1];
                        cross.abs().atan2(dot).to_degrees()
                    })
                    .fold(f64::INFINITY, f64::min)
            })
            .fold(f64::INFINITY, f64::min)
    }

    /// Boundary edges carrying `tag`.
    pub fn elements_with(&self, tag: BoundaryTag) -> impl Iterator<Item = &BoundaryElement> {
        self.boundary.iter().filter(move |b| b.tag == tag)
    }

    pub fn edge_length(&self, b: &BoundaryElement) -> f64 {
        let (p, q) = (self.nodes[b.nodes[0]], self.nodes[b.nodes[1]]);
        (q[0] - p[0]).hypot(q[1] - p[1])
    }

    /// Uniform red refinement; see [`refine::refine`].
    pub fn refine(&self) -> Result<SimplicialMesh> {
        refine::refine(self)
    }
}

pub(crate) fn signed_area(nodes: &[[f64; 2]], t: &[usize; 3]) -> f64 {
    let (a, b, c) = (nodes[t[0]], nodes[t[1]], nodes[t[2]]);
    0.5 * ((b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0]))
}
