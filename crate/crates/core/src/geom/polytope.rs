use nalgebra::{DMatrix, DVector};

use super::degeneracy::{detect_degenerate, DegeneracyReport, DEFAULT_SLAB_FACTOR};
use super::hull::{hull2, hull3};
use super::{check_dim, Direction, Point};
use crate::prelude::*;
use crate::{Error, Result};

/// Closed half-space `⟨x, normal⟩ ≤ offset`.
#[derive(Clone, Debug, PartialEq)]
pub struct Halfspace {
    pub normal: Direction,
    pub offset: f64,
}

/// A facet: the face of the body on one supporting half-space.
#[derive(Clone, Debug, PartialEq)]
pub struct Facet {
    /// Index into [`Polytope::halfspaces`].
    pub halfspace: usize,
    /// Vertex indices. In 2D `[start, end]` counter-clockwise; in 3D a
    /// counter-clockwise loop seen from outside.
    pub vertices: Vec<usize>,
    /// `H^{n-1}` measure (length in 2D, area in 3D).
    pub area: f64,
}

/// Convex polytope with both representations.
///
/// `halfspaces` keeps every constraint the body was built from; a constraint
/// without a facet is inactive (redundant or touching in a lower-dimensional
/// face). In 2D, facets are sorted by the polar angle of their normal.
#[derive(Clone, Debug)]
pub struct Polytope {
    dim: usize,
    halfspaces: Vec<Halfspace>,
    vertices: Vec<Point>,
    facets: Vec<Facet>,
    centroid: Point,
    volume: f64,
    inradius_estimate: f64,
    degeneracy: Option<DegeneracyReport>,
}

fn scale_of(points: &[Point]) -> f64 {
    points
        .iter()
        .map(|p| p.amax())
        .fold(0.0f64, f64::max)
        .max(1.0)
}

fn plane_basis(normal: &DVector<f64>) -> (DVector<f64>, DVector<f64>) {
    let k = normal.iamin();
    let mut e = DVector::zeros(3);
    e[k] = 1.0;
    let u = (&e - normal * normal.dot(&e)).normalize();
    let w = DVector::from_column_slice(&[
        normal[1] * u[2] - normal[2] * u[1],
        normal[2] * u[0] - normal[0] * u[2],
        normal[0] * u[1] - normal[1] * u[0],
    ]);
    (u, w)
}

impl Polytope {
    /// Builds the body from constraints and candidate vertices.
    ///
    /// Candidates are deduplicated, infeasible ones dropped, and only points
    /// incident to `dim` independent constraints are kept. Each constraint
    /// whose incident vertices span a face of positive measure becomes a facet.
    pub(crate) fn assemble(
        dim: usize,
        halfspaces: Vec<Halfspace>,
        candidates: Vec<Point>,
    ) -> Result<Polytope> {
        check_dim(dim)?;
        let scale = scale_of(&candidates);
        let tol = 1e-10 * scale;

        let mut verts: Vec<Point> = Vec::new();
        for c in candidates {
            if c.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: c.len(),
                });
            }
            if !c.iter().all(|x| x.is_finite()) {
                return Err(Error::InvalidPolytope("non-finite vertex".into()));
            }
            let feasible = halfspaces
                .iter()
                .all(|hs| hs.normal.dot(&c) <= hs.offset + 1e3 * tol);
            if feasible && !verts.iter().any(|v| (v - &c).amax() <= tol) {
                verts.push(c);
            }
        }

        let incident: Vec<Vec<usize>> = halfspaces
            .iter()
            .map(|hs| {
                (0..verts.len())
                    .filter(|&v| (hs.normal.dot(&verts[v]) - hs.offset).abs() <= 10.0 * tol)
                    .collect()
            })
            .collect();

        if !halfspaces.is_empty() {
            // Keep vertices that are pinned by `dim` independent constraints.
            let mut keep = vec![false; verts.len()];
            for (v, k) in keep.iter_mut().enumerate() {
                let normals: Vec<&DVector<f64>> = incident
                    .iter()
                    .enumerate()
                    .filter(|(_, inc)| inc.contains(&v))
                    .map(|(h, _)| halfspaces[h].normal.as_vector())
                    .collect();
                if normals.len() >= dim {
                    let m = DMatrix::from_fn(dim, normals.len(), |r, c| normals[c][r]);
                    let sv = (&m * m.transpose()).symmetric_eigenvalues();
                    *k = sv.iter().all(|&s| s > 1e-18);
                }
            }
            if keep.iter().any(|k| !k) && keep.iter().filter(|k| **k).count() > dim {
                let kept = verts
                    .into_iter()
                    .zip(&keep)
                    .filter_map(|(v, k)| k.then_some(v))
                    .collect();
                return Self::assemble(dim, halfspaces, kept);
            }
        }

        let mut facets = Vec::new();
        for (h, hs) in halfspaces.iter().enumerate() {
            let inc = &incident[h];
            if inc.len() < dim {
                continue;
            }
            let facet = if dim == 2 {
                let t =
                    DVector::from_column_slice(&[-hs.normal.coords()[1], hs.normal.coords()[0]]);
                let (lo, hi) = inc.iter().fold((inc[0], inc[0]), |(lo, hi), &v| {
                    let s = t.dot(&verts[v]);
                    (
                        if s < t.dot(&verts[lo]) { v } else { lo },
                        if s > t.dot(&verts[hi]) { v } else { hi },
                    )
                });
                let area = t.dot(&verts[hi]) - t.dot(&verts[lo]);
                Facet {
                    halfspace: h,
                    vertices: vec![lo, hi],
                    area,
                }
            } else {
                let (u, w) = plane_basis(hs.normal.as_vector());
                let mean = inc
                    .iter()
                    .fold(DVector::zeros(3), |acc, &v| acc + &verts[v])
                    / inc.len() as f64;
                let mut ordered: Vec<(f64, usize)> = inc
                    .iter()
                    .map(|&v| {
                        let d = &verts[v] - &mean;
                        (w.dot(&d).atan2(u.dot(&d)), v)
                    })
                    .collect();
                ordered.sort_by(|a, b| a.0.total_cmp(&b.0));
                let loop_: Vec<usize> = ordered.into_iter().map(|(_, v)| v).collect();
                let mut area = 0.0;
                for k in 0..loop_.len() {
                    let a = &verts[loop_[k]] - &mean;
                    let b = &verts[loop_[(k + 1) % loop_.len()]] - &mean;
                    area += 0.5 * (u.dot(&a) * w.dot(&b) - w.dot(&a) * u.dot(&b));
                }
                Facet {
                    halfspace: h,
                    vertices: loop_,
                    area,
                }
            };
            if facet.area > 1e-12 * scale.powi(dim as i32 - 1) {
                facets.push(facet);
            }
        }
        if dim == 2 {
            facets.sort_by(|a, b| {
                halfspaces[a.halfspace]
                    .normal
                    .polar_angle()
                    .total_cmp(&halfspaces[b.halfspace].normal.polar_angle())
            });
        }

        let mut p = Polytope {
            dim,
            halfspaces,
            vertices: verts,
            facets,
            centroid: DVector::zeros(dim),
            volume: 0.0,
            inradius_estimate: 0.0,
            degeneracy: None,
        };
        p.finish();
        Ok(p)
    }

    fn finish(&mut self) {
        let dim = self.dim;
        if self.vertices.is_empty() {
            self.degeneracy = Some(detect_degenerate(self, 0.0));
            return;
        }
        let mean = self
            .vertices
            .iter()
            .fold(DVector::zeros(dim), |acc, v| acc + v)
            / self.vertices.len() as f64;
        // Cone decomposition from the vertex mean.
        let mut vol = 0.0;
        let mut moment = DVector::zeros(dim);
        for f in &self.facets {
            let hs = &self.halfspaces[f.halfspace];
            let height = hs.offset - hs.normal.dot(&mean);
            let cone = f.area * height / dim as f64;
            let fc = self.facet_centroid(f);
            let cone_c = &mean + (fc - &mean) * (dim as f64 / (dim as f64 + 1.0));
            vol += cone;
            moment += cone_c * cone;
        }
        self.volume = vol.max(0.0);
        self.centroid = if vol > 0.0 { moment / vol } else { mean };
        self.inradius_estimate = self
            .facets
            .iter()
            .map(|f| {
                let hs = &self.halfspaces[f.halfspace];
                hs.offset - hs.normal.dot(&self.centroid)
            })
            .fold(f64::INFINITY, f64::min)
            .max(0.0);
        if self.facets.is_empty() {
            self.inradius_estimate = 0.0;
        }
        let report = detect_degenerate(self, DEFAULT_SLAB_FACTOR * self.diameter());
        if report.is_slab || self.facets.len() < dim + 1 {
            self.degeneracy = Some(report);
        }
    }

    fn facet_centroid(&self, f: &Facet) -> Point {
        if self.dim == 2 {
            return (&self.vertices[f.vertices[0]] + &self.vertices[f.vertices[1]]) * 0.5;
        }
        let v0 = &self.vertices[f.vertices[0]];
        let mut total = 0.0;
        let mut c = DVector::zeros(3);
        for k in 1..f.vertices.len() - 1 {
            let a = &self.vertices[f.vertices[k]] - v0;
            let b = &self.vertices[f.vertices[k + 1]] - v0;
            let area = 0.5
                * DVector::from_column_slice(&[
                    a[1] * b[2] - a[2] * b[1],
                    a[2] * b[0] - a[0] * b[2],
                    a[0] * b[1] - a[1] * b[0],
                ])
                .norm();
            c += (v0 + &self.vertices[f.vertices[k]] + &self.vertices[f.vertices[k + 1]])
                * (area / 3.0);
            total += area;
        }
        if total > 0.0 {
            c / total
        } else {
            v0.clone()
        }
    }

    /// Rebuilds a body from stored constraints and vertices. Vertices are
    /// kept as given, so a serialized body reads back bit for bit.
    pub fn from_parts(dim: usize, halfspaces: Vec<Halfspace>, vertices: Vec<Point>) -> Result<Polytope> {
        if let Some(h) = halfspaces.iter().find(|h| h.normal.dim() != dim) {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: h.normal.dim(),
            });
        }
        Self::assemble(dim, halfspaces, vertices)
    }

    /// Convex hull of a finite point set.
    pub fn from_points(dim: usize, points: &[Point]) -> Result<Polytope> {
        check_dim(dim)?;
        if points.is_empty() {
            return Err(Error::InvalidPolytope("empty point set".into()));
        }
        if let Some(p) = points.iter().find(|p| p.len() != dim) {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: p.len(),
            });
        }
        let scale = scale_of(points);
        if dim == 2 {
            let pts: Vec<[f64; 2]> = points.iter().map(|p| [p[0], p[1]]).collect();
            let h = hull2(&pts);
            if h.len() < 3 {
                return Self::assemble(
                    dim,
                    Vec::new(),
                    h.iter().map(|&i| points[i].clone()).collect(),
                );
            }
            let mut halfspaces = Vec::with_capacity(h.len());
            for k in 0..h.len() {
                let a = &points[h[k]];
                let b = &points[h[(k + 1) % h.len()]];
                let e = b - a;
                let normal = Direction::new(DVector::from_column_slice(&[e[1], -e[0]]))?;
                let offset = normal.dot(a);
                halfspaces.push(Halfspace { normal, offset });
            }
            let verts = h.iter().map(|&i| points[i].clone()).collect();
            return Self::assemble(dim, halfspaces, verts);
        }
        let pts: Vec<[f64; 3]> = points.iter().map(|p| [p[0], p[1], p[2]]).collect();
        let Some(tris) = hull3(&pts) else {
            // Planar or smaller: keep the extreme points without facets.
            let mut uniq: Vec<Point> = Vec::new();
            for p in points {
                if !uniq.iter().any(|q| (q - p).amax() <= 1e-10 * scale) {
                    uniq.push(p.clone());
                }
            }
            return Self::assemble(dim, Vec::new(), uniq);
        };
        let mut halfspaces: Vec<Halfspace> = Vec::new();
        let mut used = Vec::new();
        for t in &tris {
            let (a, b, c) = (&points[t[0]], &points[t[1]], &points[t[2]]);
            let e1 = b - a;
            let e2 = c - a;
            let n = DVector::from_column_slice(&[
                e1[1] * e2[2] - e1[2] * e2[1],
                e1[2] * e2[0] - e1[0] * e2[2],
                e1[0] * e2[1] - e1[1] * e2[0],
            ]);
            if n.norm() <= 1e-14 * scale * scale {
                continue;
            }
            let normal = Direction::new(n)?;
            let offset = normal.dot(a);
            let dup = halfspaces.iter().any(|hs| {
                (hs.normal.as_vector() - normal.as_vector()).amax() <= 1e-9
                    && (hs.offset - offset).abs() <= 1e-9 * scale
            });
            if !dup {
                halfspaces.push(Halfspace { normal, offset });
            }
            used.extend_from_slice(t);
        }
        used.sort_unstable();
        used.dedup();
        let verts = used.into_iter().map(|i| points[i].clone()).collect();
        Self::assemble(dim, halfspaces, verts)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn halfspaces(&self) -> &[Halfspace] {
        &self.halfspaces
    }

    pub fn vertices(&self) -> &[Point] {
        &self.vertices
    }

    pub fn facets(&self) -> &[Facet] {
        &self.facets
    }

    pub fn facet_normal(&self, facet: usize) -> &Direction {
        &self.halfspaces[self.facets[facet].halfspace].normal
    }

    pub fn facet_offset(&self, facet: usize) -> f64 {
        self.halfspaces[self.facets[facet].halfspace].offset
    }

    /// Endpoints of a 2D facet, counter-clockwise.
    pub fn facet_endpoints(&self, facet: usize) -> (&Point, &Point) {
        let f = &self.facets[facet];
        (&self.vertices[f.vertices[0]], &self.vertices[f.vertices[1]])
    }

    /// Whether the constraint `halfspace` carries a facet.
    pub fn is_active(&self, halfspace: usize) -> bool {
        self.facets.iter().any(|f| f.halfspace == halfspace)
    }

    pub fn centroid(&self) -> &Point {
        &self.centroid
    }

    pub fn inradius_estimate(&self) -> f64 {
        self.inradius_estimate
    }

    pub(crate) fn cached_volume(&self) -> f64 {
        self.volume
    }

    pub fn degeneracy(&self) -> Option<&DegeneracyReport> {
        self.degeneracy.as_ref()
    }

    pub fn diameter(&self) -> f64 {
        let mut d: f64 = 0.0;
        for (i, a) in self.vertices.iter().enumerate() {
            for b in &self.vertices[i + 1..] {
                d = d.max((a - b).norm());
            }
        }
        d
    }

    /// `Σ_facets area · normal`; zero for a closed boundary.
    pub fn closure_defect(&self) -> DVector<f64> {
        self.facets.iter().fold(DVector::zeros(self.dim), |acc, f| {
            acc + self.halfspaces[f.halfspace].normal.as_vector() * f.area
        })
    }

    /// Distance from `x` to the boundary along facet normals (negative outside).
    pub fn boundary_distance(&self, x: &Point) -> f64 {
        self.facets
            .iter()
            .map(|f| {
                let hs = &self.halfspaces[f.halfspace];
                hs.offset - hs.normal.dot(x)
            })
            .fold(f64::INFINITY, f64::min)
    }

    pub fn contains(&self, x: &Point, tol: f64) -> bool {
        self.halfspaces
            .iter()
            .all(|hs| hs.normal.dot(x) <= hs.offset + tol)
    }

    /// The body moved by `shift`.
    pub fn translated(&self, shift: &Point) -> Polytope {
        let mut p = self.clone();
        for hs in &mut p.halfspaces {
            hs.offset += hs.normal.dot(shift);
        }
        for v in &mut p.vertices {
            *v += shift;
        }
        p.centroid += shift;
        p
    }

    /// The body dilated about the origin by `factor > 0`.
    pub fn scaled(&self, factor: f64) -> Polytope {
        let mut p = self.clone();
        for hs in &mut p.halfspaces {
            hs.offset *= factor;
        }
        for v in &mut p.vertices {
            *v *= factor;
        }
        for f in &mut p.facets {
            f.area *= factor.powi(self.dim as i32 - 1);
        }
        p.centroid *= factor;
        p.volume *= factor.powi(self.dim as i32);
        p.inradius_estimate *= factor;
        if let Some(d) = &mut p.degeneracy {
            d.thickness *= factor;
        }
        p
    }

    /// Normals and offsets of the facets, in facet order.
    pub fn facet_support_vector(&self) -> super::SupportVector {
        super::SupportVector {
            normals: (0..self.facets.len())
                .map(|f| self.facet_normal(f).clone())
                .collect(),
            heights: (0..self.facets.len())
                .map(|f| self.facet_offset(f))
                .collect(),
        }
    }

    /// Error unless the body has interior.
    pub fn require_solid(&self) -> Result<()> {
        match &self.degeneracy {
            Some(d) => Err(Error::Degenerate(d.clone())),
            None => Ok(()),
        }
    }
}
