//! Convex hulls of finite point sets in the plane and in space.

use alloc::collections::BTreeSet;

use crate::prelude::*;

fn cross2(o: [f64; 2], a: [f64; 2], b: [f64; 2]) -> f64 {
    (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])
}

/// Andrew's monotone chain. Returns hull indices counter-clockwise, without
/// collinear points. Fewer than three indices means the set is degenerate.
pub(crate) fn hull2(points: &[[f64; 2]]) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..points.len()).collect();
    idx.sort_by(|&a, &b| {
        points[a][0]
            .total_cmp(&points[b][0])
            .then(points[a][1].total_cmp(&points[b][1]))
    });
    idx.dedup_by(|a, b| points[*a] == points[*b]);
    if idx.len() < 3 {
        return idx;
    }
    let mut lower: Vec<usize> = Vec::new();
    for &i in &idx {
        while lower.len() >= 2
            && cross2(
                points[lower[lower.len() - 2]],
                points[lower[lower.len() - 1]],
                points[i],
            ) <= 0.0
        {
            lower.pop();
        }
        lower.push(i);
    }
    let mut upper: Vec<usize> = Vec::new();
    for &i in idx.iter().rev() {
        while upper.len() >= 2
            && cross2(
                points[upper[upper.len() - 2]],
                points[upper[upper.len() - 1]],
                points[i],
            ) <= 0.0
        {
            upper.pop();
        }
        upper.push(i);
    }
    lower.pop();
    upper.pop();
    lower.extend(upper);
    lower
}

type V3 = [f64; 3];

fn sub(a: V3, b: V3) -> V3 {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}
fn cross(a: V3, b: V3) -> V3 {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}
fn dot(a: V3, b: V3) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

/// Deterministic jitter in `[-1, 1)` for index `i` and axis `k`.
fn jitter(i: usize, k: usize) -> f64 {
    let mut x = (i as u64)
        .wrapping_mul(0x9E37_79B9_7F4A_7C15)
        .wrapping_add((k as u64 + 1).wrapping_mul(0xBF58_476D_1CE4_E5B9));
    x ^= x >> 31;
    x = x.wrapping_mul(0x94D0_49BB_1331_11EB);
    x ^= x >> 29;
    (x >> 11) as f64 / (1u64 << 52) as f64 - 1.0
}

struct Face {
    v: [usize; 3],
    n: V3,
    d: f64,
}

impl Face {
    fn new(p: &[V3], v: [usize; 3]) -> Face {
        let n = cross(sub(p[v[1]], p[v[0]]), sub(p[v[2]], p[v[0]]));
        let d = dot(n, p[v[0]]);
        Face { v, n, d }
    }
    fn dist(&self, x: V3) -> f64 {
        dot(self.n, x) - self.d
    }
}

/// Incremental hull in R³ on a symbolically perturbed copy of the points.
///
/// Returns outward-oriented triangles referencing the input indices, or
/// `None` when the set is (numerically) contained in a plane. Coplanar
/// input may produce triangles through non-extreme points; callers resolve
/// facets from the original coordinates.
pub(crate) fn hull3(points: &[V3]) -> Option<Vec<[usize; 3]>> {
    let n = points.len();
    if n < 4 {
        return None;
    }
    let scale = points
        .iter()
        .flat_map(|p| p.iter())
        .fold(0.0f64, |m, &c| m.max(c.abs()))
        .max(f64::MIN_POSITIVE);
    let amp = 1e-11 * scale;
    let p: Vec<V3> = points
        .iter()
        .enumerate()
        .map(|(i, q)| {
            [
                q[0] + amp * jitter(i, 0),
                q[1] + amp * jitter(i, 1),
                q[2] + amp * jitter(i, 2),
            ]
        })
        .collect();

    // Initial tetrahedron from extreme points.
    let i0 = (0..n).min_by(|&a, &b| p[a][0].total_cmp(&p[b][0]))?;
    let d2 = |a: V3, b: V3| dot(sub(a, b), sub(a, b));
    let i1 = (0..n).max_by(|&a, &b| d2(p[a], p[i0]).total_cmp(&d2(p[b], p[i0])))?;
    let e = sub(p[i1], p[i0]);
    let i2 = (0..n).max_by(|&a, &b| {
        let ca = cross(e, sub(p[a], p[i0]));
        let cb = cross(e, sub(p[b], p[i0]));
        dot(ca, ca).total_cmp(&dot(cb, cb))
    })?;
    let nrm = cross(e, sub(p[i2], p[i0]));
    let i3 = (0..n).max_by(|&a, &b| {
        dot(nrm, sub(p[a], p[i0]))
            .abs()
            .total_cmp(&dot(nrm, sub(p[b], p[i0])).abs())
    })?;
    let vol = dot(nrm, sub(p[i3], p[i0]));
    let nn = dot(nrm, nrm).sqrt();
    if nn <= 1e-12 * scale * scale || vol.abs() / nn <= 1e-9 * scale {
        return None;
    }
    let mut faces: Vec<Option<Face>> = Vec::new();
    let tet = [i0, i1, i2, i3];
    let centroid = [0, 1, 2].map(|k| tet.iter().map(|&i| p[i][k]).sum::<f64>() / 4.0);
    for f in [[i0, i1, i2], [i0, i1, i3], [i0, i2, i3], [i1, i2, i3]] {
        let mut face = Face::new(&p, f);
        if face.dist(centroid) > 0.0 {
            face = Face::new(&p, [f[0], f[2], f[1]]);
        }
        faces.push(Some(face));
    }

    let eps = 1e-14 * scale * scale;
    for i in 0..n {
        if tet.contains(&i) {
            continue;
        }
        let visible: Vec<usize> = faces
            .iter()
            .enumerate()
            .filter_map(|(k, f)| f.as_ref().filter(|f| f.dist(p[i]) > eps).map(|_| k))
            .collect();
        if visible.is_empty() {
            continue;
        }
        let mut edges = BTreeSet::new();
        for &k in &visible {
            let v = faces[k].as_ref().map(|f| f.v).unwrap_or_default();
            for j in 0..3 {
                edges.insert((v[j], v[(j + 1) % 3]));
            }
        }
        let horizon: Vec<(usize, usize)> = edges
            .iter()
            .filter(|&&(a, b)| !edges.contains(&(b, a)))
            .copied()
            .collect();
        for &k in &visible {
            faces[k] = None;
        }
        for (a, b) in horizon {
            faces.push(Some(Face::new(&p, [a, b, i])));
        }
    }
    Some(faces.into_iter().flatten().map(|f| f.v).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn square_with_interior_and_collinear_points() {
        let pts = [
            [0.0, 0.0],
            [1.0, 0.0],
            [1.0, 1.0],
            [0.0, 1.0],
            [0.5, 0.5],
            [0.5, 0.0],
        ];
        let h = hull2(&pts);
        assert_eq!(h.len(), 4);
        assert!(!h.contains(&4) && !h.contains(&5));
    }

    #[test]
    fn cube_hull_has_twelve_triangles() {
        let mut pts = Vec::new();
        for i in 0..8 {
            pts.push([
                (i & 1) as f64 * 2.0 - 1.0,
                ((i >> 1) & 1) as f64 * 2.0 - 1.0,
                ((i >> 2) & 1) as f64 * 2.0 - 1.0,
            ]);
        }
        pts.push([0.0, 0.0, 0.0]);
        let tris = hull3(&pts).unwrap();
        assert_eq!(tris.len(), 12);
        assert!(tris.iter().all(|t| !t.contains(&8)));
    }

    #[test]
    fn planar_set_is_rejected() {
        let pts = [
            [0.0, 0.0, 0.0],
            [1.0, 0.0, 0.0],
            [0.0, 1.0, 0.0],
            [1.0, 1.0, 0.0],
        ];
        assert!(hull3(&pts).is_none());
    }
}
