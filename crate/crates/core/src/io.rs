//! Tensor files and raster export.
//!
//! A tensor file is JSON with 1-based indices:
//!
//! ```json
//! { "order": 4, "dim": 3, "symmetric": true,
//!   "entries": [ { "idx": [1, 1, 1, 1], "re": 5.0 },
//!                { "idx": [1, 1, 1, 2], "re": -0.1, "im": 0.0 } ] }
//! ```
//!
//! With `"symmetric": true` every `idx` is a sorted representative and its
//! value is copied to all permutations.

use std::collections::HashSet;
use std::fmt::Write as _;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::regions::{GridRaster, RegionKind};
use crate::tensor::Tensor;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TensorFile {
    pub order: usize,
    pub dim: usize,
    #[serde(default)]
    pub symmetric: bool,
    pub entries: Vec<FileEntry>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileEntry {
    pub idx: Vec<usize>,
    pub re: f64,
    #[serde(default, skip_serializing_if = "is_zero")]
    pub im: f64,
}

fn is_zero(v: &f64) -> bool {
    *v == 0.0
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FileError {
    #[error("malformed tensor file: {0}")]
    Syntax(String),
    #[error("invalid header: {0}")]
    Header(String),
    #[error("entry {entry}: {message}")]
    Entry { entry: usize, message: String },
}

impl TensorFile {
    pub fn from_tensor(t: &Tensor) -> Self {
        let symmetric = t.built_symmetric();
        let entries = t
            .entries()
            .filter(|(idx, _)| !symmetric || idx.windows(2).all(|w| w[0] <= w[1]))
            .map(|(idx, v)| FileEntry {
                idx: idx.iter().map(|k| k + 1).collect(),
                re: v.re,
                im: v.im,
            })
            .collect();
        TensorFile {
            order: t.order(),
            dim: t.dim(),
            symmetric,
            entries,
        }
    }

    /// Validates the schema and builds the tensor. Entry numbers in errors are
    /// 0-based positions in the `entries` array.
    pub fn to_tensor(&self) -> Result<Tensor, FileError> {
        if self.order < 2 {
            return Err(FileError::Header(format!("order must be >= 2, got {}", self.order)));
        }
        if self.dim < 1 {
            return Err(FileError::Header(format!("dim must be >= 1, got {}", self.dim)));
        }
        let mut seen = HashSet::new();
        let mut tuples = Vec::with_capacity(self.entries.len());
        for (entry, e) in self.entries.iter().enumerate() {
            let fail = |message: String| FileError::Entry { entry, message };
            if e.idx.len() != self.order {
                return Err(fail(format!(
                    "index has {} components, expected {}",
                    e.idx.len(),
                    self.order
                )));
            }
            if let Some(k) = e.idx.iter().find(|&&k| k < 1 || k > self.dim) {
                return Err(fail(format!("index {k} outside 1..={}", self.dim)));
            }
            if !e.re.is_finite() || !e.im.is_finite() {
                return Err(fail("value is not finite".into()));
            }
            if self.symmetric && e.idx.windows(2).any(|w| w[0] > w[1]) {
                return Err(fail(format!("unsorted representative {:?}", e.idx)));
            }
            if !seen.insert(e.idx.clone()) {
                return Err(fail(format!("duplicate index {:?}", e.idx)));
            }
            tuples.push((
                e.idx.iter().map(|k| k - 1).collect::<Vec<_>>(),
                Complex64::new(e.re, e.im),
            ));
        }
        Tensor::build(self.order, self.dim, tuples, self.symmetric)
            .map_err(|e| FileError::Header(e.to_string()))
    }
}

pub fn parse_tensor_file(text: &[u8]) -> Result<Tensor, FileError> {
    let file: TensorFile =
        serde_json::from_slice(text).map_err(|e| FileError::Syntax(e.to_string()))?;
    file.to_tensor()
}

pub fn serialize_tensor(t: &Tensor) -> String {
    let mut s = serde_json::to_string_pretty(&TensorFile::from_tensor(t))
        .expect("tensor file serializes");
    s.push('\n');
    s
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RasterFormat {
    Pgm,
    Csv,
    Svg,
}

impl std::str::FromStr for RasterFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "pgm" => Ok(RasterFormat::Pgm),
            "csv" => Ok(RasterFormat::Csv),
            "svg" => Ok(RasterFormat::Svg),
            other => Err(format!("unknown raster format '{other}'")),
        }
    }
}

/// Encodes a raster. PGM is plain `P2` with members black (0) and the top row
/// at the largest imaginary part; CSV lists every cell center at full
/// precision; SVG draws member cells and, for `gamma`, the exact disk outlines.
pub fn write_raster(g: &GridRaster, format: RasterFormat) -> Vec<u8> {
    match format {
        RasterFormat::Pgm => write_pgm(g),
        RasterFormat::Csv => write_csv(g),
        RasterFormat::Svg => write_svg(g),
    }
    .into_bytes()
}

fn write_pgm(g: &GridRaster) -> String {
    let mut out = format!("P2\n{} {}\n255\n", g.cols, g.rows);
    for r in 0..g.rows {
        let line: Vec<&str> = (0..g.cols)
            .map(|c| if g.get(r, c) { "0" } else { "255" })
            .collect();
        out.push_str(&line.join(" "));
        out.push('\n');
    }
    out
}

fn write_csv(g: &GridRaster) -> String {
    let mut out = String::from("re,im,member\n");
    for r in 0..g.rows {
        for c in 0..g.cols {
            let z = g.center(r, c);
            writeln!(out, "{:?},{:?},{}", z.re, z.im, u8::from(g.get(r, c))).unwrap();
        }
    }
    out
}

/// SVG in complex-plane units: x = Re z, y = -Im z.
fn write_svg(g: &GridRaster) -> String {
    let w = &g.window;
    let cw = w.width() / g.cols as f64;
    let ch = w.height() / g.rows as f64;
    let mut out = String::new();
    writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" viewBox="{:?} {:?} {:?} {:?}" preserveAspectRatio="none" width="{}" height="{}">"#,
        w.re_min,
        -w.im_max,
        w.width().max(f64::MIN_POSITIVE),
        w.height().max(f64::MIN_POSITIVE),
        g.cols,
        g.rows
    )
    .unwrap();
    writeln!(out, r##"<g fill="#000000" stroke="none">"##).unwrap();
    for r in 0..g.rows {
        for c in 0..g.cols {
            if g.get(r, c) {
                writeln!(
                    out,
                    r#"<rect x="{:?}" y="{:?}" width="{:?}" height="{:?}"/>"#,
                    w.re_min + c as f64 * cw,
                    -w.im_max + r as f64 * ch,
                    cw,
                    ch
                )
                .unwrap();
            }
        }
    }
    writeln!(out, "</g>").unwrap();
    if g.region.kind() == RegionKind::Gamma {
        writeln!(
            out,
            r##"<g fill="none" stroke="#d03030" vector-effect="non-scaling-stroke">"##
        )
        .unwrap();
        for (a, r) in &g.disks {
            writeln!(
                out,
                r#"<circle cx="{:?}" cy="{:?}" r="{:?}" vector-effect="non-scaling-stroke"/>"#,
                a.re, -a.im, r
            )
            .unwrap();
        }
        writeln!(out, "</g>").unwrap();
    }
    out.push_str("</svg>\n");
    out
}
