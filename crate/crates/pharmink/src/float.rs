//! Floats as JSON numbers with 17 significant digits, enough to read every
//! `f64` back bit for bit.

use serde::ser::{Error as _, SerializeSeq};
use serde::Serializer;
use serde_json::value::RawValue;

pub fn format(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn serialize<S: Serializer>(x: &f64, s: S) -> Result<S::Ok, S::Error> {
    if !x.is_finite() {
        return Err(S::Error::custom(format!("non-finite float {x}")));
    }
    let raw = RawValue::from_string(format(*x)).map_err(S::Error::custom)?;
    serde::Serialize::serialize(&*raw, s)
}

struct F17<'a>(&'a f64);

impl serde::Serialize for F17<'_> {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        serialize(self.0, s)
    }
}

struct Row<'a>(&'a [f64]);

impl serde::Serialize for Row<'_> {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(self.0.len()))?;
        for x in self.0 {
            seq.serialize_element(&F17(x))?;
        }
        seq.end()
    }
}

pub mod vec {
    use super::*;

    pub fn serialize<S: Serializer>(v: &[f64], s: S) -> Result<S::Ok, S::Error> {
        serde::Serialize::serialize(&Row(v), s)
    }
}

pub mod vec2 {
    use super::*;

    pub fn serialize<S: Serializer>(v: &[Vec<f64>], s: S) -> Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(v.len()))?;
        for row in v {
            seq.serialize_element(&Row(row))?;
        }
        seq.end()
    }
}
