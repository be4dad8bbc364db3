use std::f64::consts::PI;
use std::path::{Path, PathBuf};

use pharmink_core::Direction;
use serde::{Deserialize, Serialize};

use crate::error::{IoError, Result};

/// The exact settings of one command, written next to every output.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub command: String,
    /// Exponents; `solve` uses the first.
    pub p: Vec<f64>,
    pub dim: usize,
    /// Mesh size: relative to the circle center's boundary distance for
    /// `solve`, absolute for `verify`.
    pub target_h: f64,
    pub shrink: f64,
    pub tol: Option<f64>,
    pub max_iter: usize,
    pub m_schedule: Vec<usize>,
    pub dt: f64,
    pub seed: u64,
    pub classical: bool,
    pub density: Option<String>,
    pub input: Option<PathBuf>,
    pub out: Option<PathBuf>,
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(IoError::Config(msg));
        if self.p.is_empty() {
            return bad("no exponent given".into());
        }
        if let Some(p) = self.p.iter().find(|p| !(**p > 1.0 && p.is_finite())) {
            return bad(format!("p = {p} outside (1, inf)"));
        }
        if !matches!(self.dim, 2 | 3) {
            return bad(format!("dim = {} not in {{2, 3}}", self.dim));
        }
        if !(self.target_h > 0.0 && self.target_h.is_finite()) {
            return bad(format!("mesh h = {} must be positive", self.target_h));
        }
        if !(self.shrink > 0.0 && self.shrink < 1.0) {
            return bad(format!("shrink = {} outside (0, 1)", self.shrink));
        }
        if let Some(t) = self.tol.filter(|t| !(*t > 0.0 && t.is_finite())) {
            return bad(format!("tol = {t} must be positive"));
        }
        if self.max_iter == 0 {
            return bad("max-iter must be positive".into());
        }
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return bad(format!("dt = {} must be positive", self.dt));
        }
        if self.m_schedule.is_empty() {
            return bad("empty m schedule".into());
        }
        if let Some(d) = &self.density {
            Density::parse(d, self.dim)?;
        }
        Ok(())
    }

    pub fn write_to(&self, dir: &Path) -> Result<()> {
        crate::formats::write_json(&dir.join(RUN_CONFIG_FILE), self)
    }
}

pub const RUN_CONFIG_FILE: &str = "run_config.json";

/// Densities selectable by `--density <name:params>`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Density {
    /// `c` everywhere: `const:c`, or `uniform` for `c = 1`.
    Const(f64),
    /// `1 + a cos(kθ)` on the circle: `cos:a,k`.
    Cos { a: f64, k: u32 },
}

impl Density {
    pub fn parse(spec: &str, dim: usize) -> Result<Density> {
        let (name, params) = spec.split_once(':').unwrap_or((spec, ""));
        let nums = params
            .split(',')
            .filter(|s| !s.trim().is_empty())
            .map(|s| s.trim().parse::<f64>())
            .collect::<std::result::Result<Vec<_>, _>>()
            .map_err(|e| IoError::Config(format!("density {spec}: {e}")))?;
        let bad = |msg: &str| Err(IoError::Config(format!("density {spec}: {msg}")));
        match (name, nums.as_slice()) {
            ("uniform", []) => Ok(Density::Const(1.0)),
            ("const", [c]) if *c > 0.0 => Ok(Density::Const(*c)),
            ("const", _) => bad("expected one positive value"),
            ("cos", _) if dim != 2 => bad("defined on the circle only"),
            ("cos", [a, k]) if a.abs() < 1.0 && *k >= 0.0 && k.fract() == 0.0 => Ok(Density::Cos {
                a: *a,
                k: *k as u32,
            }),
            ("cos", _) => bad("expected a,k with |a| < 1 and integer k >= 0"),
            _ => bad("unknown name (uniform, const:c, cos:a,k)"),
        }
    }

    pub fn eval(&self, xi: &Direction) -> f64 {
        match *self {
            Density::Const(c) => c,
            Density::Cos { a, k } => {
                let theta = xi.polar_angle().rem_euclid(2.0 * PI);
                1.0 + a * (f64::from(k) * theta).cos()
            }
        }
    }
}
