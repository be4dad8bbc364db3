use crate::prelude::*;

/// Uniform bucket grid over the triangles' bounding boxes.
#[derive(Clone, Debug)]
pub struct Locator {
    origin: [f64; 2],
    cell: f64,
    nx: usize,
    ny: usize,
    starts: Vec<u32>,
    items: Vec<u32>,
}

impl Locator {
    pub(crate) fn new(nodes: &[[f64; 2]], triangles: &[[usize; 3]]) -> Self {
        let (mut lo, mut hi) = ([f64::INFINITY; 2], [f64::NEG_INFINITY; 2]);
        for p in nodes {
            for k in 0..2 {
                lo[k] = lo[k].min(p[k]);
                hi[k] = hi[k].max(p[k]);
            }
        }
        let span = (hi[0] - lo[0]).max(hi[1] - lo[1]).max(f64::MIN_POSITIVE);
        let side = (triangles.len() as f64).sqrt().ceil().max(1.0);
        let cell = span / side;
        let nx = ((hi[0] - lo[0]) / cell).floor() as usize + 1;
        let ny = ((hi[1] - lo[1]) / cell).floor() as usize + 1;
        let mut loc = Locator {
            origin: lo,
            cell,
            nx,
            ny,
            starts: Vec::new(),
            items: Vec::new(),
        };
        let boxes: Vec<(usize, usize, usize, usize)> = triangles
            .iter()
            .map(|t| {
                let xs = t.map(|i| nodes[i][0]);
                let ys = t.map(|i| nodes[i][1]);
                let (i0, j0) = loc.cell_of([
                    xs.iter().copied().fold(f64::INFINITY, f64::min),
                    ys.iter().copied().fold(f64::INFINITY, f64::min),
                ]);
                let (i1, j1) = loc.cell_of([
                    xs.iter().copied().fold(f64::NEG_INFINITY, f64::max),
                    ys.iter().copied().fold(f64::NEG_INFINITY, f64::max),
                ]);
                (i0, j0, i1, j1)
            })
            .collect();
        let mut counts = vec![0u32; nx * ny + 1];
        for &(i0, j0, i1, j1) in &boxes {
            for j in j0..=j1 {
                for i in i0..=i1 {
                    counts[j * nx + i + 1] += 1;
                }
            }
        }
        for c in 1..counts.len() {
            counts[c] += counts[c - 1];
        }
        let mut fill = counts.clone();
        let mut items = vec![0u32; counts[nx * ny] as usize];
        for (t, &(i0, j0, i1, j1)) in boxes.iter().enumerate() {
            for j in j0..=j1 {
                for i in i0..=i1 {
                    let b = j * nx + i;
                    items[fill[b] as usize] = t as u32;
                    fill[b] += 1;
                }
            }
        }
        loc.starts = counts;
        loc.items = items;
        loc
    }

    fn cell_of(&self, x: [f64; 2]) -> (usize, usize) {
        let i = ((x[0] - self.origin[0]) / self.cell).floor().max(0.0) as usize;
        let j = ((x[1] - self.origin[1]) / self.cell).floor().max(0.0) as usize;
        (i.min(self.nx - 1), j.min(self.ny - 1))
    }

    /// Triangle containing `x` and its barycentric coordinates. Points on
    /// shared edges resolve to the candidate with the largest smallest
    /// coordinate; points farther than `1e−10` (relative) outside every
    /// triangle give `None`.
    pub fn locate(
        &self,
        nodes: &[[f64; 2]],
        triangles: &[[usize; 3]],
        x: [f64; 2],
    ) -> Option<(usize, [f64; 3])> {
        let inside = x[0] >= self.origin[0] - self.cell
            && x[1] >= self.origin[1] - self.cell
            && x[0] <= self.origin[0] + self.cell * (self.nx + 1) as f64
            && x[1] <= self.origin[1] + self.cell * (self.ny + 1) as f64;
        if !inside {
            return None;
        }
        let (i, j) = self.cell_of(x);
        let b = j * self.nx + i;
        let mut best: Option<(usize, [f64; 3], f64)> = None;
        for &t in &self.items[self.starts[b] as usize..self.starts[b + 1] as usize] {
            let t = t as usize;
            let lam = barycentric(nodes, &triangles[t], x);
            let m = lam[0].min(lam[1]).min(lam[2]);
            if best.is_none_or(|(_, _, bm)| m > bm) {
                best = Some((t, lam, m));
            }
        }
        best.filter(|(_, _, m)| *m >= -1e-10)
            .map(|(t, lam, _)| (t, lam))
    }
}

pub(crate) fn barycentric(nodes: &[[f64; 2]], t: &[usize; 3], x: [f64; 2]) -> [f64; 3] {
    let (a, b, c) = (nodes[t[0]], nodes[t[1]], nodes[t[2]]);
    let det = (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0]);
    let l1 = ((x[0] - a[0]) * (c[1] - a[1]) - (x[1] - a[1]) * (c[0] - a[0])) / det;
    let l2 = ((b[0] - a[0]) * (x[1] - a[1]) - (b[1] - a[1]) * (x[0] - a[0])) / det;
    [1.0 - l1 - l2, l1, l2]
}
