use core::f64::consts::PI;

use nalgebra::DVector;

use super::hull::hull3;
use super::polytope::{Halfspace, Polytope};
use super::{check_dim, Direction};
use crate::prelude::*;
use crate::{Error, Result};

/// Support values `h_i` prescribed at fixed normals `ξ_i`.
#[derive(Clone, Debug, PartialEq)]
pub struct SupportVector {
    pub normals: Vec<Direction>,
    pub heights: Vec<f64>,
}

impl SupportVector {
    pub fn new(normals: Vec<Direction>, heights: Vec<f64>) -> Result<Self> {
        let s = SupportVector { normals, heights };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        if self.normals.len() != self.heights.len() {
            return Err(Error::InvalidPolytope(format!(
                "{} normals but {} heights",
                self.normals.len(),
                self.heights.len()
            )));
        }
        if self.normals.is_empty() {
            return Err(Error::InvalidPolytope("no constraints".into()));
        }
        let dim = self.normals[0].dim();
        check_dim(dim)?;
        if let Some(n) = self.normals.iter().find(|n| n.dim() != dim) {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: n.dim(),
            });
        }
        if let Some(h) = self.heights.iter().find(|h| !(h.is_finite() && **h > 0.0)) {
            return Err(Error::InvalidPolytope(format!(
                "support height {h} is not strictly positive"
            )));
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.normals[0].dim()
    }

    pub fn len(&self) -> usize {
        self.normals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.normals.is_empty()
    }

    pub fn scaled(&self, factor: f64) -> SupportVector {
        SupportVector {
            normals: self.normals.clone(),
            heights: self.heights.iter().map(|h| h * factor).collect(),
        }
    }
}

/// Wulff shape `∩_i {x : ⟨x, ξ_i⟩ ≤ h_i}`.
///
/// Constraints that do not carry a facet stay in the H-representation but
/// are reported inactive by [`Polytope::is_active`]. A numerically thin
/// result carries a [`super::DegeneracyReport`].
pub fn wulff_shape(h: &SupportVector) -> Result<Polytope> {
    h.validate()?;
    let halfspaces: Vec<Halfspace> = h
        .normals
        .iter()
        .zip(&h.heights)
        .map(|(n, &o)| Halfspace {
            normal: n.clone(),
            offset: o,
        })
        .collect();
    let candidates = match h.dim() {
        2 => vertices_2d(&halfspaces)?,
        _ => vertices_3d(&halfspaces)?,
    };
    Polytope::assemble(h.dim(), halfspaces, candidates)
}

fn intersect_lines(a: &Halfspace, b: &Halfspace) -> DVector<f64> {
    let (n1, n2) = (a.normal.coords(), b.normal.coords());
    let det = n1[0] * n2[1] - n1[1] * n2[0];
    DVector::from_column_slice(&[
        (a.offset * n2[1] - b.offset * n1[1]) / det,
        (n1[0] * b.offset - n2[0] * a.offset) / det,
    ])
}

/// Counter-clockwise angle from `a` to `b` in `[0, 2π)`.
fn ccw_gap(a: f64, b: f64) -> f64 {
    let mut g = b - a;
    while g < 0.0 {
        g += 2.0 * PI;
    }
    while g >= 2.0 * PI {
        g -= 2.0 * PI;
    }
    g
}

/// Angular sort, adjacent-line intersection and pruning of lines whose
/// neighbours meet inside their halfplane.
fn vertices_2d(hs: &[Halfspace]) -> Result<Vec<DVector<f64>>> {
    let mut order: Vec<usize> = (0..hs.len()).collect();
    order.sort_by(|&a, &b| {
        hs[a]
            .normal
            .polar_angle()
            .total_cmp(&hs[b].normal.polar_angle())
            .then(hs[a].offset.total_cmp(&hs[b].offset))
    });
    // Parallel duplicates: keep the tightest.
    order.dedup_by(|b, a| hs[*a].normal.angle_to(&hs[*b].normal) <= 1e-12);
    if order.len() > 1 {
        let (first, last) = (order[0], order[order.len() - 1]);
        if hs[first].normal.angle_to(&hs[last].normal) <= 1e-12 {
            if hs[last].offset < hs[first].offset {
                let n = order.len();
                order.swap(0, n - 1);
            }
            order.pop();
            order.sort_by(|&a, &b| {
                hs[a]
                    .normal
                    .polar_angle()
                    .total_cmp(&hs[b].normal.polar_angle())
            });
        }
    }
    if order.len() < 3 {
        return Err(Error::Unbounded);
    }
    let angle = |i: usize| hs[i].normal.polar_angle();
    let gap_limit = PI - 1e-12;
    for k in 0..order.len() {
        let next = order[(k + 1) % order.len()];
        if ccw_gap(angle(order[k]), angle(next)) >= gap_limit {
            return Err(Error::Unbounded);
        }
    }

    let scale = hs.iter().map(|h| h.offset.abs()).fold(1.0f64, f64::max);
    let mut active = order;
    loop {
        let m = active.len();
        let mut removed = false;
        for k in 0..m {
            let prev = active[(k + m - 1) % m];
            let cur = active[k];
            let next = active[(k + 1) % m];
            if ccw_gap(angle(prev), angle(next)) >= gap_limit {
                continue;
            }
            let x = intersect_lines(&hs[prev], &hs[next]);
            if hs[cur].normal.dot(&x) <= hs[cur].offset + 1e-12 * scale {
                active.remove(k);
                removed = true;
                break;
            }
        }
        if !removed || active.len() < 3 {
            break;
        }
    }
    let m = active.len();
    Ok((0..m)
        .map(|k| intersect_lines(&hs[active[k]], &hs[active[(k + 1) % m]]))
        .collect())
}

/// Primal vertices from the facets of the hull of the dual points `ξ_i / h_i`.
fn vertices_3d(hs: &[Halfspace]) -> Result<Vec<DVector<f64>>> {
    let dual: Vec<[f64; 3]> = hs
        .iter()
        .map(|h| {
            let c = h.normal.coords();
            [c[0] / h.offset, c[1] / h.offset, c[2] / h.offset]
        })
        .collect();
    let tris = hull3(&dual).ok_or(Error::Unbounded)?;
    let scale = dual
        .iter()
        .flat_map(|p| p.iter())
        .fold(0.0f64, |m, c| m.max(c.abs()));
    let mut verts = Vec::with_capacity(tris.len());
    for t in tris {
        let (a, b, c) = (dual[t[0]], dual[t[1]], dual[t[2]]);
        let e1 = [b[0] - a[0], b[1] - a[1], b[2] - a[2]];
        let e2 = [c[0] - a[0], c[1] - a[1], c[2] - a[2]];
        let n = [
            e1[1] * e2[2] - e1[2] * e2[1],
            e1[2] * e2[0] - e1[0] * e2[2],
            e1[0] * e2[1] - e1[1] * e2[0],
        ];
        let norm = (n[0] * n[0] + n[1] * n[1] + n[2] * n[2]).sqrt();
        if norm <= 1e-14 * scale * scale {
            continue;
        }
        let d = (n[0] * a[0] + n[1] * a[1] + n[2] * a[2]) / norm;
        // The origin must be strictly inside the dual hull. Slivers through
        // coplanar dual points may come out flipped; the vertex n/d is
        // orientation independent.
        let sliver = norm <= 1e-8 * scale * scale;
        if d.abs() <= 1e-12 * scale || (d < 0.0 && !sliver) {
            return Err(Error::Unbounded);
        }
        verts.push(DVector::from_column_slice(&[
            n[0] / norm / d,
            n[1] / norm / d,
            n[2] / norm / d,
        ]));
    }
    Ok(verts)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::sampling::uniform_circle;

    fn sv(normals: Vec<Direction>, heights: Vec<f64>) -> SupportVector {
        SupportVector::new(normals, heights).unwrap()
    }

    #[test]
    fn square_from_axis_normals() {
        let p = wulff_shape(&sv(uniform_circle(4, 0.0), vec![1.0; 4])).unwrap();
        assert_eq!(p.vertices().len(), 4);
        for v in p.vertices() {
            assert!((v[0].abs() - 1.0).abs() < 1e-14 && (v[1].abs() - 1.0).abs() < 1e-14);
        }
        assert!(p.degeneracy().is_none());
    }

    #[test]
    fn redundant_diagonal_is_inactive() {
        let mut normals = uniform_circle(4, 0.0);
        normals.push(Direction::from_slice(&[1.0, 1.0]).unwrap());
        let p = wulff_shape(&sv(normals, vec![1.0, 1.0, 1.0, 1.0, 2.0])).unwrap();
        assert_eq!(p.facets().len(), 4);
        assert!(!p.is_active(4));
        assert_eq!(p.vertices().len(), 4);
    }

    #[test]
    fn touching_constraint_is_inactive() {
        let mut normals = uniform_circle(4, 0.0);
        normals.push(Direction::from_slice(&[1.0, 1.0]).unwrap());
        let p = wulff_shape(&sv(normals, vec![1.0, 1.0, 1.0, 1.0, 2f64.sqrt()])).unwrap();
        assert!(!p.is_active(4));
        assert_eq!(p.vertices().len(), 4);
    }

    #[test]
    fn half_circle_of_normals_is_unbounded() {
        let normals = vec![
            Direction::from_angle(0.0),
            Direction::from_angle(1.0),
            Direction::from_angle(PI),
        ];
        assert!(matches!(
            wulff_shape(&sv(normals, vec![1.0; 3])),
            Err(Error::Unbounded)
        ));
        let two = vec![Direction::from_angle(0.0), Direction::from_angle(PI)];
        assert!(matches!(
            wulff_shape(&sv(two, vec![1.0; 2])),
            Err(Error::Unbounded)
        ));
    }

    #[test]
    fn cube_from_axis_normals() {
        let mut normals = Vec::new();
        for k in 0..3 {
            for s in [1.0, -1.0] {
                let mut v = [0.0; 3];
                v[k] = s;
                normals.push(Direction::from_slice(&v).unwrap());
            }
        }
        let p = wulff_shape(&sv(normals, vec![0.5; 6])).unwrap();
        assert_eq!(p.vertices().len(), 8);
        assert_eq!(p.facets().len(), 6);
        for f in p.facets() {
            assert!((f.area - 1.0).abs() < 1e-12);
            assert_eq!(f.vertices.len(), 4);
        }
    }

    #[test]
    fn rejects_nonpositive_heights() {
        assert!(SupportVector::new(uniform_circle(4, 0.0), vec![1.0, 0.0, 1.0, 1.0]).is_err());
    }
}
