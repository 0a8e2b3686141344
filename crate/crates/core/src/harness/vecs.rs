//! fvecs / bvecs readers.
//!
//! Each record is a little-endian `i32` dimension followed by that many
//! components: `f32` for fvecs, `u8` for bvecs. All records in a file must
//! share one dimension. Components are widened to `f64`.

use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::Path;

use crate::error::{LshError, Result};
use crate::vector::RealVector;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Component {
    F32,
    U8,
}

impl Component {
    fn width(self) -> usize {
        match self {
            Component::F32 => 4,
            Component::U8 => 1,
        }
    }
}

fn parse(bytes: &[u8], component: Component) -> Result<Vec<RealVector>> {
    let mut out = Vec::new();
    let mut pos = 0usize;
    let mut dim: Option<usize> = None;
    while pos < bytes.len() {
        let start = pos as u64;
        let header = bytes
            .get(pos..pos + 4)
            .ok_or_else(|| LshError::format(start, "truncated record header"))?;
        let d = i32::from_le_bytes(header.try_into().unwrap());
        if d <= 0 {
            return Err(LshError::format(start, format!("non-positive dimension {d}")));
        }
        let d = d as usize;
        if let Some(expected) = dim {
            if expected != d {
                return Err(LshError::format(
                    start,
                    format!("record dimension {d} differs from {expected}"),
                ));
            }
        }
        dim = Some(d);
        let body_len = d * component.width();
        let body = bytes.get(pos + 4..pos + 4 + body_len).ok_or_else(|| {
            LshError::format(
                start,
                format!(
                    "truncated record: need {body_len} component bytes, {} available",
                    bytes.len() - pos - 4
                ),
            )
        })?;
        let comps: Vec<f64> = match component {
            Component::F32 => body
                .chunks_exact(4)
                .map(|c| f64::from(f32::from_le_bytes(c.try_into().unwrap())))
                .collect(),
            Component::U8 => body.iter().map(|&b| f64::from(b)).collect(),
        };
        let v = RealVector::new(comps).map_err(|e| LshError::format(start, e.to_string()))?;
        out.push(v);
        pos += 4 + body_len;
    }
    Ok(out)
}

pub fn parse_fvecs(bytes: &[u8]) -> Result<Vec<RealVector>> {
    parse(bytes, Component::F32)
}

pub fn parse_bvecs(bytes: &[u8]) -> Result<Vec<RealVector>> {
    parse(bytes, Component::U8)
}

pub fn read_fvecs(path: impl AsRef<Path>) -> Result<Vec<RealVector>> {
    parse_fvecs(&fs::read(path)?)
}

pub fn read_bvecs(path: impl AsRef<Path>) -> Result<Vec<RealVector>> {
    parse_bvecs(&fs::read(path)?)
}

/// Writes vectors as fvecs. Components are narrowed to `f32`.
pub fn write_fvecs(path: impl AsRef<Path>, vectors: &[RealVector]) -> Result<()> {
    let mut out = BufWriter::new(File::create(path)?);
    for v in vectors {
        out.write_all(&(v.dim() as i32).to_le_bytes())?;
        for &c in v.as_slice() {
            out.write_all(&(c as f32).to_le_bytes())?;
        }
    }
    out.flush()?;
    Ok(())
}
