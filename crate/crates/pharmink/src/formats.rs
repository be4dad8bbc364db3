//! Measure and polytope JSON.
//!
//! ```text
//! measure:  {"dim": n, "atoms": [{"xi": [..], "c": w}, ...]}
//! polytope: {"dim": n, "normals": [[..]], "heights": [..], "vertices": [[..]]}
//! ```
//!
//! Floats are written with 17 significant digits. A polytope keeps every
//! half-space it was built from, active or not.

use std::fs;
use std::path::Path;

use nalgebra::DVector;
use pharmink_core::geom::{Halfspace, Polytope, SphericalMeasure};
use pharmink_core::{Direction, MeasureAtomMap};
use serde::{Deserialize, Serialize};

use crate::error::{io_err, IoError, Result};
use crate::float;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AtomEntry {
    #[serde(serialize_with = "float::vec::serialize")]
    pub xi: Vec<f64>,
    #[serde(serialize_with = "float::serialize")]
    pub c: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MeasureFile {
    pub dim: usize,
    pub atoms: Vec<AtomEntry>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PolytopeFile {
    pub dim: usize,
    #[serde(serialize_with = "float::vec2::serialize")]
    pub normals: Vec<Vec<f64>>,
    #[serde(serialize_with = "float::vec::serialize")]
    pub heights: Vec<f64>,
    #[serde(serialize_with = "float::vec2::serialize")]
    pub vertices: Vec<Vec<f64>>,
}

impl MeasureFile {
    pub fn from_atoms<'a>(dim: usize, atoms: impl IntoIterator<Item = (&'a Direction, f64)>) -> Self {
        MeasureFile {
            dim,
            atoms: atoms
                .into_iter()
                .map(|(xi, c)| AtomEntry {
                    xi: xi.coords().to_vec(),
                    c,
                })
                .collect(),
        }
    }

    pub fn from_measure(mu: &SphericalMeasure) -> Self {
        Self::from_atoms(mu.dim(), mu.atoms().iter().map(|a| (&a.xi, a.weight)))
    }

    pub fn from_atom_map(dim: usize, mu: &MeasureAtomMap) -> Self {
        Self::from_atoms(dim, mu.normals.iter().zip(mu.masses.iter().copied()))
    }

    fn directions(&self) -> pharmink_core::Result<Vec<(Direction, f64)>> {
        self.atoms
            .iter()
            .map(|a| {
                if a.xi.len() != self.dim {
                    return Err(pharmink_core::Error::DimensionMismatch {
                        expected: self.dim,
                        found: a.xi.len(),
                    });
                }
                Direction::from_unit_slice(&a.xi).map(|d| (d, a.c))
            })
            .collect()
    }

    /// Target measure; atoms must have positive weight.
    pub fn to_measure(&self) -> pharmink_core::Result<SphericalMeasure> {
        SphericalMeasure::new(self.dim, self.directions()?)
    }

    /// Atom map; zero masses are allowed.
    pub fn to_atom_map(&self) -> pharmink_core::Result<MeasureAtomMap> {
        let (normals, masses) = self.directions()?.into_iter().unzip();
        MeasureAtomMap::new(normals, masses)
    }
}

impl PolytopeFile {
    pub fn from_polytope(p: &Polytope) -> Self {
        PolytopeFile {
            dim: p.dim(),
            normals: p.halfspaces().iter().map(|h| h.normal.coords().to_vec()).collect(),
            heights: p.halfspaces().iter().map(|h| h.offset).collect(),
            vertices: p.vertices().iter().map(|v| v.as_slice().to_vec()).collect(),
        }
    }

    pub fn to_polytope(&self) -> pharmink_core::Result<Polytope> {
        if self.normals.len() != self.heights.len() {
            return Err(pharmink_core::Error::InvalidPolytope(format!(
                "{} normals but {} heights",
                self.normals.len(),
                self.heights.len()
            )));
        }
        let halfspaces = self
            .normals
            .iter()
            .zip(&self.heights)
            .map(|(n, &offset)| {
                Direction::from_unit_slice(n).map(|normal| Halfspace { normal, offset })
            })
            .collect::<pharmink_core::Result<Vec<_>>>()?;
        let vertices = self
            .vertices
            .iter()
            .map(|v| DVector::from_column_slice(v))
            .collect();
        Polytope::from_parts(self.dim, halfspaces, vertices)
    }
}

/// Serializes to pretty JSON text.
pub fn to_json<T: Serialize>(value: &T) -> Result<String> {
    serde_json::to_string_pretty(value).map_err(|e| IoError::Config(e.to_string()))
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = to_json(value)?;
    text.push('\n');
    fs::write(path, text).map_err(io_err(path))
}

pub fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T> {
    let text = fs::read_to_string(path).map_err(io_err(path))?;
    serde_json::from_str(&text).map_err(|source| IoError::Json {
        path: path.to_path_buf(),
        source,
    })
}

fn content<T>(path: &Path, r: pharmink_core::Result<T>) -> Result<T> {
    r.map_err(|source| IoError::Content {
        path: path.to_path_buf(),
        source,
    })
}

pub fn read_measure(path: &Path) -> Result<SphericalMeasure> {
    let file: MeasureFile = read_json(path)?;
    content(path, file.to_measure())
}

pub fn write_measure(path: &Path, mu: &SphericalMeasure) -> Result<()> {
    write_json(path, &MeasureFile::from_measure(mu))
}

pub fn read_polytope(path: &Path) -> Result<Polytope> {
    let file: PolytopeFile = read_json(path)?;
    content(path, file.to_polytope())
}

pub fn write_polytope(path: &Path, p: &Polytope) -> Result<()> {
    write_json(path, &PolytopeFile::from_polytope(p))
}
