//! Grid files: one JSON header line, then CSV rows or little-endian `f64`s.
//!
//! Values at or above `sentinel` read as `+inf`; `+inf` is written as the
//! sentinel.

use serde::{Deserialize, Serialize};

use super::GridFn;
use crate::error::{Error, Result};

pub const GRID_SCHEMA: &str = "convexval/grid@1";
pub const DEFAULT_SENTINEL: f64 = 1e300;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Encoding {
    Csv,
    F64le,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridHeader {
    pub schema: String,
    #[serde(rename = "box")]
    pub bounds: Vec<[f64; 2]>,
    pub resolution: Vec<usize>,
    pub sentinel: f64,
    pub encoding: Encoding,
    #[serde(default)]
    pub convex: bool,
}

pub fn write_grid(g: &GridFn, encoding: Encoding) -> Vec<u8> {
    let header = GridHeader {
        schema: GRID_SCHEMA.into(),
        bounds: g.lo.iter().zip(&g.hi).map(|(a, b)| [*a, *b]).collect(),
        resolution: g.res.clone(),
        sentinel: DEFAULT_SENTINEL,
        encoding,
        convex: g.convex,
    };
    let mut out = serde_json::to_vec(&header).expect("header serializes");
    out.push(b'\n');
    let encode = |v: f64| if v.is_finite() { v } else { DEFAULT_SENTINEL };
    match encoding {
        Encoding::Csv => {
            let row = *g.res.last().unwrap();
            for chunk in g.values.chunks(row) {
                let line: Vec<String> = chunk.iter().map(|v| format!("{:?}", encode(*v))).collect();
                out.extend_from_slice(line.join(",").as_bytes());
                out.push(b'\n');
            }
        }
        Encoding::F64le => {
            for v in &g.values {
                out.extend_from_slice(&encode(*v).to_le_bytes());
            }
        }
    }
    out
}

pub fn read_grid(bytes: &[u8]) -> Result<GridFn> {
    let split = bytes
        .iter()
        .position(|b| *b == b'\n')
        .ok_or_else(|| Error::Parse("line 1: missing grid header".into()))?;
    let header: GridHeader = serde_json::from_slice(&bytes[..split])
        .map_err(|e| Error::Parse(format!("line 1: grid header: {e}")))?;
    if header.schema != GRID_SCHEMA {
        return Err(Error::Parse(format!(
            "line 1: unsupported schema {:?}",
            header.schema
        )));
    }
    let body = &bytes[split + 1..];
    let decode = |v: f64| if v >= header.sentinel { f64::INFINITY } else { v };
    let values: Vec<f64> = match header.encoding {
        Encoding::Csv => {
            let text = std::str::from_utf8(body).map_err(|e| Error::Parse(format!("grid body: {e}")))?;
            let mut values = Vec::new();
            for (i, line) in text.lines().enumerate() {
                if line.trim().is_empty() {
                    continue;
                }
                for field in line.split(',') {
                    let v: f64 = field.trim().parse().map_err(|e| {
                        Error::Parse(format!("line {}: {:?}: {e}", i + 2, field.trim()))
                    })?;
                    values.push(decode(v));
                }
            }
            values
        }
        Encoding::F64le => {
            if body.len() % 8 != 0 {
                return Err(Error::Parse(format!(
                    "binary body of {} bytes is not a whole number of f64s",
                    body.len()
                )));
            }
            body.chunks_exact(8)
                .map(|c| decode(f64::from_le_bytes(c.try_into().unwrap())))
                .collect()
        }
    };
    let mut g = GridFn::new(
        header.bounds.iter().map(|b| b[0]).collect(),
        header.bounds.iter().map(|b| b[1]).collect(),
        header.resolution,
        values,
    )?;
    g.convex = header.convex;
    Ok(g)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> GridFn {
        GridFn::sample(&[-1.0, 0.0], &[1.0, 2.0], &[3, 4], |x| {
            if x[1] > 1.5 {
                f64::INFINITY
            } else {
                x[0] * x[0] + 0.1 * x[1]
            }
        })
        .unwrap()
    }

    #[test]
    fn round_trips() {
        let g = sample();
        for enc in [Encoding::Csv, Encoding::F64le] {
            let back = read_grid(&write_grid(&g, enc)).unwrap();
            assert_eq!(back, g);
        }
    }

    #[test]
    fn reports_line_of_bad_value() {
        let mut bytes = write_grid(&sample(), Encoding::Csv);
        let text = String::from_utf8(bytes.clone()).unwrap().replacen("0.1", "zz", 1);
        bytes = text.into_bytes();
        let err = read_grid(&bytes).unwrap_err().to_string();
        assert!(err.contains("line "), "{err}");
    }
}
