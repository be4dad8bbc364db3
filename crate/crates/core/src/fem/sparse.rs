//! Compressed sparse rows with a fixed pattern and Jacobi-preconditioned CG.

use alloc::collections::BTreeSet;

use crate::prelude::*;

/// Symmetric matrix over the free nodes of a mesh.
#[derive(Clone, Debug)]
pub(crate) struct Csr {
    pub n: usize,
    pub row_start: Vec<usize>,
    pub cols: Vec<usize>,
    pub vals: Vec<f64>,
}

impl Csr {
    /// Pattern of all couplings between free nodes that share a triangle.
    /// Returns the matrix and, per triangle, the value slot of each local
    /// pair `(a, b)` (`usize::MAX` when either node is constrained).
    pub fn pattern(
        triangles: &[[usize; 3]],
        dof: &[Option<usize>],
        n: usize,
    ) -> (Csr, Vec<[usize; 9]>) {
        let mut rows: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); n];
        for t in triangles {
            for &a in t {
                for &b in t {
                    if let (Some(i), Some(j)) = (dof[a], dof[b]) {
                        rows[i].insert(j);
                    }
                }
            }
        }
        let mut row_start = Vec::with_capacity(n + 1);
        let mut cols = Vec::new();
        row_start.push(0);
        for r in &rows {
            cols.extend(r.iter().copied());
            row_start.push(cols.len());
        }
        let csr = Csr {
            n,
            vals: vec![0.0; cols.len()],
            row_start,
            cols,
        };
        let slots = triangles
            .iter()
            .map(|t| {
                let mut s = [usize::MAX; 9];
                for (la, &a) in t.iter().enumerate() {
                    for (lb, &b) in t.iter().enumerate() {
                        if let (Some(i), Some(j)) = (dof[a], dof[b]) {
                            s[3 * la + lb] = csr.slot(i, j);
                        }
                    }
                }
                s
            })
            .collect();
        (csr, slots)
    }

    fn slot(&self, i: usize, j: usize) -> usize {
        let row = &self.cols[self.row_start[i]..self.row_start[i + 1]];
        self.row_start[i] + row.binary_search(&j).unwrap_or(0)
    }

    pub fn clear(&mut self) {
        self.vals.iter_mut().for_each(|v| *v = 0.0);
    }

    pub fn mul(&self, x: &[f64], y: &mut [f64]) {
        for (i, yi) in y.iter_mut().enumerate() {
            let (s, e) = (self.row_start[i], self.row_start[i + 1]);
            *yi = self.cols[s..e]
                .iter()
                .zip(&self.vals[s..e])
                .map(|(&j, &v)| v * x[j])
                .sum();
        }
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.vals[self.slot(i, i)]).collect()
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Solves `A x = b` in place from the initial `x`. Returns the iteration
/// count, or `None` if the relative residual did not reach `tol`.
pub(crate) fn pcg(a: &Csr, b: &[f64], x: &mut [f64], tol: f64, max_iter: usize) -> Option<usize> {
    let n = a.n;
    let inv_diag: Vec<f64> = a.diagonal().iter().map(|d| 1.0 / d).collect();
    let mut r = vec![0.0; n];
    a.mul(x, &mut r);
    for i in 0..n {
        r[i] = b[i] - r[i];
    }
    let bnorm = dot(b, b).sqrt().max(f64::MIN_POSITIVE);
    if dot(&r, &r).sqrt() <= tol * bnorm {
        return Some(0);
    }
    let mut z: Vec<f64> = r.iter().zip(&inv_diag).map(|(r, d)| r * d).collect();
    let mut p = z.clone();
    let mut rz = dot(&r, &z);
    let mut ap = vec![0.0; n];
    for it in 1..=max_iter {
        a.mul(&p, &mut ap);
        let alpha = rz / dot(&p, &ap);
        for i in 0..n {
            x[i] += alpha * p[i];
            r[i] -= alpha * ap[i];
        }
        if dot(&r, &r).sqrt() <= tol * bnorm {
            return Some(it);
        }
        for i in 0..n {
            z[i] = r[i] * inv_diag[i];
        }
        let rz_new = dot(&r, &z);
        let beta = rz_new / rz;
        rz = rz_new;
        for i in 0..n {
            p[i] = z[i] + beta * p[i];
        }
    }
    None
}
