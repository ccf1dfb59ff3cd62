//! JSON formats: curve files and result files.
//!
//! A curve file looks like
//!
//! ```json
//! {"dimension": 2, "nodes": [
//!   {"t": 0.0, "value": [0.0, 0.0]},
//!   {"t": 0.5, "left": [0.0, 0.0], "right": [1.0, 0.0]},
//!   {"t": 1.0, "value": [1.0, 0.0]}]}
//! ```
//!
//! where `value` is shorthand for equal left and right values. Every float is
//! written with 17 significant digits, so files round-trip exactly.

use std::collections::BTreeMap;
use std::io;

use serde::{Deserialize, Serialize};
use serde_json::ser::{Formatter, PrettyFormatter};
use sha2::{Digest, Sha256};

use crate::curve::{Node, SbvCurve};
use crate::error::{Error, Result};
use crate::gtransform::Reparam;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum NodeFile {
    Point { t: f64, value: Vec<f64> },
    Jump { t: f64, left: Vec<f64>, right: Vec<f64> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CurveFile {
    pub dimension: usize,
    pub nodes: Vec<NodeFile>,
}

impl CurveFile {
    pub fn from_curve(c: &SbvCurve) -> Self {
        let nodes = c
            .nodes()
            .iter()
            .map(|n| {
                if n.is_jump() {
                    NodeFile::Jump {
                        t: n.t,
                        left: n.left.clone(),
                        right: n.right.clone(),
                    }
                } else {
                    NodeFile::Point {
                        t: n.t,
                        value: n.left.clone(),
                    }
                }
            })
            .collect();
        CurveFile {
            dimension: c.dimension(),
            nodes,
        }
    }

    /// The curve as stored, without validation.
    pub fn to_curve_unchecked(&self) -> SbvCurve {
        let nodes = self
            .nodes
            .iter()
            .map(|n| match n {
                NodeFile::Point { t, value } => Node::point(*t, value.clone()),
                NodeFile::Jump { t, left, right } => Node::jump(*t, left.clone(), right.clone()),
            })
            .collect();
        SbvCurve::from_raw(self.dimension, nodes)
    }

    pub fn to_curve(&self) -> Result<SbvCurve> {
        let c = self.to_curve_unchecked();
        let v = c.validate();
        if v.is_empty() {
            Ok(c)
        } else {
            Err(Error::InvalidCurve(v))
        }
    }
}

/// Parses JSON text into a [`CurveFile`]; syntax and schema errors are
/// reported as [`Error::InvalidInput`].
pub fn parse_curve_file(text: &str) -> Result<CurveFile> {
    serde_json::from_str(text).map_err(|e| Error::InvalidInput(format!("curve file: {e}")))
}

pub fn parse_curve(text: &str) -> Result<SbvCurve> {
    parse_curve_file(text)?.to_curve()
}

pub fn curve_to_json(c: &SbvCurve) -> String {
    to_json_string(&CurveFile::from_curve(c))
}

/// Pretty-printing formatter that writes floats with 17 significant digits.
pub struct Digits17<'a>(PrettyFormatter<'a>);

impl Default for Digits17<'_> {
    fn default() -> Self {
        Digits17(PrettyFormatter::with_indent(b"  "))
    }
}

impl Formatter for Digits17<'_> {
    fn write_f64<W: ?Sized + io::Write>(&mut self, writer: &mut W, value: f64) -> io::Result<()> {
        if value == 0.0 {
            // keeps the sign of negative zero
            return write!(writer, "{}", if value.is_sign_negative() { "-0.0" } else { "0.0" });
        }
        write!(writer, "{value:.16e}")
    }

    fn write_f32<W: ?Sized + io::Write>(&mut self, writer: &mut W, value: f32) -> io::Result<()> {
        self.write_f64(writer, value as f64)
    }

    fn begin_array<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_array(w)
    }

    fn end_array<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_array(w)
    }

    fn begin_array_value<W: ?Sized + io::Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.0.begin_array_value(w, first)
    }

    fn end_array_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_array_value(w)
    }

    fn begin_object<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_object(w)
    }

    fn end_object<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_object(w)
    }

    fn begin_object_key<W: ?Sized + io::Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.0.begin_object_key(w, first)
    }

    fn begin_object_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_object_value(w)
    }

    fn end_object_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_object_value(w)
    }
}

/// Serialises any value with [`Digits17`], followed by a newline.
pub fn to_json_string<T: Serialize>(value: &T) -> String {
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, Digits17::default());
    value
        .serialize(&mut ser)
        .expect("in-memory serialisation cannot fail");
    buf.push(b'\n');
    String::from_utf8(buf).expect("serde_json writes UTF-8")
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InputDigest {
    pub path: String,
    pub sha256: String,
}

impl InputDigest {
    pub fn new(path: &str, bytes: &[u8]) -> Self {
        InputDigest {
            path: path.to_string(),
            sha256: hex::encode(Sha256::digest(bytes)),
        }
    }
}

/// Output of every CLI command that computes something.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ResultFile {
    /// The command line that produced the file.
    pub command: Vec<String>,
    pub inputs: Vec<InputDigest>,
    pub outputs: BTreeMap<String, f64>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub series: BTreeMap<String, Vec<f64>>,
    /// Knot lists `(x, y)` of reparametrisations and similar maps.
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub knots: BTreeMap<String, Vec<(f64, f64)>>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub correspondences: Vec<(Vec<f64>, Vec<f64>)>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub curve: Option<CurveFile>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

impl ResultFile {
    pub fn add_knots(&mut self, name: &str, r: &Reparam) {
        self.knots.insert(name.to_string(), r.knots().to_vec());
    }

    pub fn to_json(&self) -> String {
        to_json_string(self)
    }

    pub fn parse(text: &str) -> Result<ResultFile> {
        serde_json::from_str(text).map_err(|e| Error::InvalidInput(format!("result file: {e}")))
    }
}
