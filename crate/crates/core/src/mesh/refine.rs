use alloc::collections::BTreeMap;

use super::{BoundaryElement, BoundaryTag, SimplicialMesh};
use crate::prelude::*;
use crate::Result;

/// Uniform red refinement: every triangle splits into four.
///
/// Midpoints of edges on the inner circle, and on the interface circle of a
/// two-zone mesh, are pushed back onto their circle. Tags are inherited.
pub(crate) fn refine(mesh: &SimplicialMesh) -> Result<SimplicialMesh> {
    let c = mesh.center();
    let mut nodes = mesh.nodes().to_vec();
    let on_circle: BTreeMap<(usize, usize), f64> = {
        let mut m = BTreeMap::new();
        for b in mesh.boundary() {
            if b.tag == BoundaryTag::Inner {
                m.insert(key(b.nodes[0], b.nodes[1]), mesh.inner_radius());
            }
        }
        let iface = mesh.interface_nodes();
        for k in 0..iface.len() {
            let (a, b) = (iface[k], iface[(k + 1) % iface.len()]);
            let x = nodes[a];
            m.insert(key(a, b), (x[0] - c[0]).hypot(x[1] - c[1]));
        }
        m
    };
    let mut mids: BTreeMap<(usize, usize), usize> = BTreeMap::new();
    let mut mid = |a: usize, b: usize, nodes: &mut Vec<[f64; 2]>| -> usize {
        *mids.entry(key(a, b)).or_insert_with(|| {
            let (p, q) = (nodes[a], nodes[b]);
            let mut m = [(p[0] + q[0]) / 2.0, (p[1] + q[1]) / 2.0];
            if let Some(&r) = on_circle.get(&key(a, b)) {
                let d = [m[0] - c[0], m[1] - c[1]];
                let s = r / d[0].hypot(d[1]);
                m = [c[0] + s * d[0], c[1] + s * d[1]];
            }
            nodes.push(m);
            nodes.len() - 1
        })
    };

    let mut triangles = Vec::with_capacity(4 * mesh.triangles().len());
    for t in mesh.triangles() {
        let m: [usize; 3] = [0, 1, 2].map(|i| mid(t[i], t[(i + 1) % 3], &mut nodes));
        triangles.push([t[0], m[0], m[2]]);
        triangles.push([m[0], t[1], m[1]]);
        triangles.push([m[2], m[1], t[2]]);
        triangles.push([m[0], m[1], m[2]]);
    }

    let mut boundary = Vec::with_capacity(2 * mesh.boundary().len());
    for b in mesh.boundary() {
        let t = mesh.triangles()[b.triangle];
        let m = mid(b.nodes[0], b.nodes[1], &mut nodes);
        // Corner child `k` of a triangle holds its vertex `t[k]`.
        let child = |corner: usize| {
            let local = (0..3).find(|&k| t[k] == corner).unwrap_or(0);
            4 * b.triangle + local
        };
        boundary.push(BoundaryElement {
            nodes: [b.nodes[0], m],
            tag: b.tag,
            triangle: child(b.nodes[0]),
        });
        boundary.push(BoundaryElement {
            nodes: [m, b.nodes[1]],
            tag: b.tag,
            triangle: child(b.nodes[1]),
        });
    }

    let mut interface = Vec::new();
    let iface = mesh.interface_nodes();
    for k in 0..iface.len() {
        interface.push(iface[k]);
        interface.push(mids[&key(iface[k], iface[(k + 1) % iface.len()])]);
    }
    SimplicialMesh::from_parts(
        nodes,
        triangles,
        boundary,
        mesh.h() / 2.0,
        c,
        mesh.inner_radius(),
        interface,
    )
}

fn key(a: usize, b: usize) -> (usize, usize) {
    (a.min(b), a.max(b))
}
