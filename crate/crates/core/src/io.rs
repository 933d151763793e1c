//! Function files.
//!
//! Radial profiles and affine maxima are JSON objects tagged by `kind`:
//!
//! ```json
//! {"schema":"convexval/function@1","kind":"radial_pl","base":0,
//!  "segments":[[0,1],[1,3]],"tail":{"rule":"none"},"domain_bound":"inf"}
//! ```
//!
//! Grids use the header-plus-data format of [`crate::grid::io`]; the reader
//! recognises them by the schema on the first line.
//!
//! Tail rules: `none`; `factorial` and `linear` extend the listed segments;
//! `gk`, `gk_inverse`, `conjugate`, `scaled` and `shifted` wrap the profile
//! in `of` (or, for `gk` without `of`, the listed segments); `vlt` and
//! `uzeta` are closed constructions. For every rule other than `none`,
//! `factorial` and `linear`, the listed segments are a preview of the first
//! knots and are ignored on reading.

use serde::{Deserialize, Serialize};

use crate::embed::{build_uzeta, build_vlt, compose_gk, compose_gk_inverse};
use crate::error::{Error, Result};
use crate::grid::io::{read_grid, write_grid, Encoding, GRID_SCHEMA};
use crate::grid::{AffineMax, GridFn};
use crate::profile::{PLProfile, Source, TailRule};
use crate::scalar::Bound;
use crate::zeta::ScalarZeta;

pub const FUNCTION_SCHEMA: &str = "convexval/function@1";

/// Knots listed for lazy profiles.
pub const PREVIEW_KNOTS: usize = 12;

#[derive(Clone, Debug)]
pub enum Function {
    Radial(PLProfile),
    Affine(AffineMax),
    Grid(GridFn),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
enum BoundJson {
    Finite(f64),
    Named(String),
}

impl BoundJson {
    fn from_bound(b: Bound<f64>) -> Self {
        match b {
            Bound::At(d) => BoundJson::Finite(d + 0.0),
            Bound::Unbounded => BoundJson::Named("inf".into()),
        }
    }

    fn to_bound(&self) -> Result<Bound<f64>> {
        match self {
            BoundJson::Finite(d) => Ok(Bound::At(*d)),
            BoundJson::Named(s) if matches!(s.as_str(), "inf" | "infinity" | "+inf") => Ok(Bound::Unbounded),
            BoundJson::Named(s) => Err(Error::Parse(format!("domain_bound {s:?} is neither a number nor \"inf\""))),
        }
    }
}

fn default_bound() -> BoundJson {
    BoundJson::Named("inf".into())
}

fn default_schema() -> String {
    FUNCTION_SCHEMA.into()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize, Default)]
#[serde(tag = "rule", rename_all = "snake_case")]
enum TailJson {
    #[default]
    None,
    Factorial {
        radius_step: f64,
    },
    Linear {
        level_step: f64,
        slope_step: f64,
    },
    Gk {
        k: u32,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        of: Option<Box<RadialJson>>,
    },
    GkInverse {
        k: u32,
        of: Box<RadialJson>,
    },
    Conjugate {
        of: Box<RadialJson>,
    },
    Scaled {
        factor: f64,
        of: Box<RadialJson>,
    },
    Shifted {
        offset: f64,
        of: Box<RadialJson>,
    },
    Vlt {
        t: f64,
        l: u64,
    },
    Uzeta {
        zeta: ScalarZeta,
        n: usize,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
struct RadialJson {
    #[serde(default)]
    base: f64,
    #[serde(default)]
    segments: Vec<[f64; 2]>,
    #[serde(default)]
    tail: TailJson,
    #[serde(default = "default_bound")]
    domain_bound: BoundJson,
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
enum FunctionJson {
    RadialPl {
        #[serde(default = "default_schema")]
        schema: String,
        #[serde(flatten)]
        profile: RadialJson,
    },
    Affine {
        #[serde(default = "default_schema")]
        schema: String,
        #[serde(flatten)]
        function: AffineMax,
    },
}

fn finite_part(r: &RadialJson) -> Result<PLProfile> {
    let segments: Vec<(f64, f64)> = r.segments.iter().map(|s| (s[0], s[1])).collect();
    if segments.is_empty() {
        return Err(Error::Parse("radial_pl needs at least one segment".into()));
    }
    PLProfile::new(r.base, &segments, r.domain_bound.to_bound()?)
}

fn to_profile(r: &RadialJson) -> Result<PLProfile> {
    let inner = |of: &RadialJson| to_profile(of);
    match &r.tail {
        TailJson::None => finite_part(r),
        TailJson::Factorial { radius_step } => PLProfile::with_tail(
            finite_part(r)?,
            TailRule::Factorial {
                radius_step: *radius_step,
            },
        ),
        TailJson::Linear {
            level_step,
            slope_step,
        } => PLProfile::with_tail(
            finite_part(r)?,
            TailRule::Linear {
                level_step: *level_step,
                slope_step: *slope_step,
            },
        ),
        TailJson::Gk { k, of } => match of {
            Some(of) => compose_gk(*k, &inner(of)?),
            None => compose_gk(*k, &finite_part(r)?),
        },
        TailJson::GkInverse { k, of } => compose_gk_inverse(*k, &inner(of)?),
        TailJson::Conjugate { of } => Ok(inner(of)?.conjugate()),
        TailJson::Scaled { factor, of } => inner(of)?.scaled(*factor),
        TailJson::Shifted { offset, of } => Ok(inner(of)?.shifted(*offset)),
        TailJson::Vlt { t, l } => build_vlt(*t, *l),
        TailJson::Uzeta { zeta, n } => build_uzeta(zeta, *n),
    }
}

fn listed(p: &PLProfile, limit: Option<usize>) -> (f64, Vec<[f64; 2]>) {
    let knots: Vec<_> = match limit {
        Some(n) => p.iter_knots().take(n).collect(),
        None => p.iter_knots().collect(),
    };
    // `+ 0.0` turns `-0.0` into `0.0`.
    let segments = knots.iter().map(|k| [k.radius + 0.0, k.slope + 0.0]).collect();
    (p.base() + 0.0, segments)
}

fn from_profile(p: &PLProfile) -> RadialJson {
    let bound = BoundJson::from_bound(p.bound());
    let Some(source) = p.source() else {
        let (base, segments) = listed(p, None);
        return RadialJson {
            base,
            segments,
            tail: TailJson::None,
            domain_bound: bound,
        };
    };
    let wrap = |q: &PLProfile| Box::new(from_profile(q));
    let tail = match source {
        Source::Tail { prefix, rule } => {
            let (base, segments) = listed(prefix, None);
            let tail = match rule {
                TailRule::Factorial { radius_step } => TailJson::Factorial {
                    radius_step: *radius_step,
                },
                TailRule::Linear {
                    level_step,
                    slope_step,
                } => TailJson::Linear {
                    level_step: *level_step,
                    slope_step: *slope_step,
                },
            };
            return RadialJson {
                base,
                segments,
                tail,
                domain_bound: bound,
            };
        }
        Source::Conjugate(of) => TailJson::Conjugate { of: wrap(of) },
        Source::Scaled { of, factor } => TailJson::Scaled {
            factor: *factor,
            of: wrap(of),
        },
        Source::Shifted { of, offset } => TailJson::Shifted {
            offset: *offset,
            of: wrap(of),
        },
        Source::Gk { k, inner } => TailJson::Gk {
            k: *k,
            of: Some(wrap(inner)),
        },
        Source::GkInverse { k, inner } => TailJson::GkInverse {
            k: *k,
            of: wrap(inner),
        },
        Source::Vlt { t, l } => TailJson::Vlt { t: *t, l: *l },
        Source::Uzeta { zeta, n } => TailJson::Uzeta {
            zeta: zeta.clone(),
            n: *n,
        },
    };
    let (base, segments) = listed(p, Some(PREVIEW_KNOTS));
    RadialJson {
        base,
        segments,
        tail,
        domain_bound: bound,
    }
}

fn parse_error(e: serde_json::Error) -> Error {
    Error::Parse(format!("line {} column {}: {e}", e.line(), e.column()))
}

/// Reads a radial, affine or grid function file.
pub fn read_function(bytes: &[u8]) -> Result<Function> {
    let first = bytes.split(|b| *b == b'\n').next().unwrap_or_default();
    if let Ok(header) = serde_json::from_slice::<serde_json::Value>(first) {
        if header.get("schema").and_then(|s| s.as_str()) == Some(GRID_SCHEMA) {
            return read_grid(bytes).map(Function::Grid);
        }
    }
    match serde_json::from_slice::<FunctionJson>(bytes).map_err(parse_error)? {
        FunctionJson::RadialPl { schema, profile } => {
            check_schema(&schema)?;
            to_profile(&profile).map(Function::Radial)
        }
        FunctionJson::Affine { schema, function } => {
            check_schema(&schema)?;
            AffineMax::new(function.dims, function.pieces, function.constraints).map(Function::Affine)
        }
    }
}

fn check_schema(schema: &str) -> Result<()> {
    if schema == FUNCTION_SCHEMA {
        Ok(())
    } else {
        Err(Error::Parse(format!("unsupported schema {schema:?}, expected {FUNCTION_SCHEMA:?}")))
    }
}

pub fn write_radial(p: &PLProfile) -> String {
    let doc = FunctionJson::RadialPl {
        schema: FUNCTION_SCHEMA.into(),
        profile: from_profile(p),
    };
    serde_json::to_string_pretty(&doc).expect("function serializes")
}

pub fn write_affine(u: &AffineMax) -> String {
    let doc = FunctionJson::Affine {
        schema: FUNCTION_SCHEMA.into(),
        function: u.clone(),
    };
    serde_json::to_string_pretty(&doc).expect("function serializes")
}

/// Grids are written as CSV unless `encoding` says otherwise.
pub fn write_function(f: &Function, encoding: Encoding) -> Vec<u8> {
    match f {
        Function::Radial(p) => (write_radial(p) + "\n").into_bytes(),
        Function::Affine(u) => (write_affine(u) + "\n").into_bytes(),
        Function::Grid(g) => write_grid(g, encoding),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::gauge_from_vertices;

    fn radial(bytes: &str) -> PLProfile {
        match read_function(bytes.as_bytes()).unwrap() {
            Function::Radial(p) => p,
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn finite_round_trip() {
        let p = PLProfile::new(0.5, &[(0.0, 1.0), (1.0, 3.0)], Bound::At(4.0)).unwrap();
        let q = radial(&write_radial(&p));
        assert!(p.canonical_eq(&q));
    }

    #[test]
    fn minimal_radial_input() {
        let p = radial(r#"{"kind":"radial_pl","base":0,"segments":[[0,1]],"tail":{"rule":"none"},"domain_bound":"inf"}"#);
        let c = p.conjugate();
        assert_eq!(c.bound(), Bound::At(1.0));
        let json = write_radial(&c);
        assert!(json.contains("\"domain_bound\": 1.0"), "{json}");
    }

    #[test]
    fn lazy_profiles_rebuild_from_their_rule() {
        let base = PLProfile::linear(0.0, 1.0).unwrap();
        let g = compose_gk(2, &base).unwrap();
        let json = write_radial(&g);
        assert!(json.contains("\"rule\": \"gk\""));
        let back = radial(&json);
        assert!(back.agrees_to(&g, 500.0));

        let short = radial(r#"{"kind":"radial_pl","base":0,"segments":[[0,1]],"tail":{"rule":"gk","k":2}}"#);
        assert!(short.agrees_to(&g, 500.0));

        let c = g.conjugate();
        assert!(radial(&write_radial(&c)).agrees_to(&c, 50.0));

        let v = build_vlt(0.0, 10).unwrap();
        assert!(radial(&write_radial(&v)).agrees_to(&v, 3.0));
    }

    #[test]
    fn affine_and_grid_files() {
        let gauge = gauge_from_vertices(&[[-1.0, -1.0], [1.0, -1.0], [1.0, 1.0], [-1.0, 1.0]]).unwrap();
        match read_function(write_affine(&gauge).as_bytes()).unwrap() {
            Function::Affine(a) => assert_eq!(a, gauge),
            other => panic!("{other:?}"),
        }
        let g = GridFn::sample_square(1, -1.0, 1.0, 5, |x| x[0] * x[0]).unwrap();
        match read_function(&write_function(&Function::Grid(g.clone()), Encoding::Csv)).unwrap() {
            Function::Grid(h) => assert_eq!(h.values, g.values),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn errors_carry_positions() {
        let err = read_function(b"{\"kind\": \"radial_pl\",\n \"base\": [}").unwrap_err();
        assert!(err.to_string().contains("line 2"), "{err}");
        assert!(read_function(br#"{"kind":"radial_pl","segments":[],"domain_bound":"big"}"#).is_err());
        assert!(read_function(br#"{"kind":"radial_pl","schema":"other@9","segments":[[0,1]]}"#).is_err());
    }
}
