//! Map-spec documents (JSON) and sampled self-map validation.
//!
//! ```text
//! {"builtin": "avg_shift_phi"}
//! {"builtin": "sola_ex2_phi", "swap": true}
//! {"num": [[1, 0], [0, -1]], "den": [[2, -1], [-1, 0]]}
//! {"blend": {"s": 0.9, "w1": 0.3, "c": [0.1, -0.2]}}
//! ```
//!
//! Coefficients are bare reals or `[re, im]` pairs.

use num_complex::Complex64;
use serde_json::{json, Value};
use std::path::Path;

use super::{poly2, BlendMap, Builtin, RationalMap, ScalarMap};
use crate::error::{Error, Result};
use crate::sampling::{BidiskSampler, DEFAULT_SEED};

pub const VALIDATION_SAMPLES: usize = 4096;
const SCHUR_SLACK: f64 = 1e-9;
const DEN_FLOOR: f64 = 1e-9;

pub fn parse_map_spec(text: &str) -> Result<ScalarMap> {
    let doc: Value = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    let obj = doc.as_object().ok_or_else(|| Error::Parse("map spec must be an object".into()))?;

    if let Some(name) = obj.get("builtin") {
        let name = name.as_str().ok_or_else(|| Error::Parse("builtin must be a string".into()))?;
        let swapped = match obj.get("swap") {
            None => false,
            Some(v) => v.as_bool().ok_or_else(|| Error::Parse("swap must be a boolean".into()))?,
        };
        return Ok(ScalarMap::Builtin { kind: name.parse()?, swapped });
    }
    if let Some(b) = obj.get("blend") {
        let num = |k: &str| {
            b.get(k).and_then(Value::as_f64).ok_or_else(|| Error::Parse(format!("blend.{k} must be a number")))
        };
        let c = match b.get("c") {
            Some(v) => complex_entry(v)?,
            None => Complex64::new(0.0, 0.0),
        };
        return Ok(ScalarMap::Blend(BlendMap::new(num("s")?, num("w1")?, c)?));
    }
    match (obj.get("num"), obj.get("den")) {
        (Some(n), Some(d)) => Ok(ScalarMap::Rational(RationalMap::new(matrix(n)?, matrix(d)?)?)),
        _ => Err(Error::Parse("map spec needs 'builtin', 'blend' or both 'num' and 'den'".into())),
    }
}

fn matrix(v: &Value) -> Result<Vec<Vec<Complex64>>> {
    let rows = v.as_array().ok_or_else(|| Error::Parse("coefficients must be nested arrays".into()))?;
    rows.iter()
        .map(|row| {
            row.as_array()
                .ok_or_else(|| Error::Parse("coefficient rows must be arrays".into()))?
                .iter()
                .map(complex_entry)
                .collect()
        })
        .collect()
}

fn complex_entry(v: &Value) -> Result<Complex64> {
    if let Some(x) = v.as_f64() {
        return Ok(Complex64::new(x, 0.0));
    }
    match v.as_array().map(Vec::as_slice) {
        Some([re, im]) => match (re.as_f64(), im.as_f64()) {
            (Some(re), Some(im)) => Ok(Complex64::new(re, im)),
            _ => Err(Error::Parse(format!("bad complex entry {v}"))),
        },
        _ => Err(Error::Parse(format!("bad complex entry {v}"))),
    }
}

/// Serializes a map back to a spec document.
pub fn to_spec(m: &ScalarMap) -> String {
    let entry = |c: &Complex64| if c.im == 0.0 { json!(c.re) } else { json!([c.re, c.im]) };
    let mat = |m: &[Vec<Complex64>]| -> Value {
        Value::Array(m.iter().map(|row| Value::Array(row.iter().map(entry).collect())).collect())
    };
    let v = match m {
        ScalarMap::Builtin { kind, swapped: false } => json!({ "builtin": kind.name() }),
        ScalarMap::Builtin { kind, swapped: true } => json!({ "builtin": kind.name(), "swap": true }),
        ScalarMap::Rational(r) => json!({ "num": mat(&r.num), "den": mat(&r.den) }),
        ScalarMap::Blend(b) => json!({ "blend": { "s": b.s, "w1": b.w1, "c": [b.c.re, b.c.im] } }),
    };
    serde_json::to_string_pretty(&v).expect("spec values are finite")
}

/// Sampled check that `m` maps the bidisk into the closed disk.
pub fn validate_map(m: &ScalarMap) -> Result<()> {
    let sampler = BidiskSampler::new(DEFAULT_SEED);
    let mut sup = 0.0f64;
    for i in 0..VALIDATION_SAMPLES {
        let p = sampler.point(i);
        if let ScalarMap::Rational(r) = m {
            let d = poly2(&r.den, p.z1, p.z2).norm();
            if d < DEN_FLOOR {
                return Err(Error::DenominatorVanishes(d));
            }
        }
        let v = m.eval(p.z1, p.z2).map_err(|e| match e {
            Error::DenominatorNearZero(d) => Error::DenominatorVanishes(d),
            other => other,
        })?;
        sup = sup.max(v.norm());
    }
    if sup > 1.0 + SCHUR_SLACK {
        return Err(Error::NotASelfMap(sup));
    }
    Ok(())
}

pub fn load_map(text: &str) -> Result<ScalarMap> {
    let m = parse_map_spec(text)?;
    validate_map(&m)?;
    Ok(m)
}

pub fn load_map_file(path: &Path) -> Result<ScalarMap> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    load_map(&text)
}

/// `builtin:<name>` or a path to a spec document.
pub fn resolve_map(source: &str) -> Result<ScalarMap> {
    match source.strip_prefix("builtin:") {
        Some(name) => Ok(ScalarMap::builtin(name.parse::<Builtin>()?)),
        None => load_map_file(Path::new(source)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn coefficient_spec_reproduces_herve() {
        let m = load_map(r#"{"num": [[1, 0], [0, -1]], "den": [[2, -1], [-1, 0]]}"#).unwrap();
        let v = m.eval(Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0)).unwrap();
        assert!((v - 0.5).norm() < 1e-15);
    }

    #[test]
    fn builtin_spec() {
        let m = load_map(r#"{"builtin": "avg_shift_phi"}"#).unwrap();
        assert_eq!(m, ScalarMap::builtin(Builtin::AvgShiftPhi));
        let s = load_map(r#"{"builtin": "avg_shift_phi", "swap": true}"#).unwrap();
        assert_eq!(s, m.swap_args());
    }

    #[test]
    fn rejects_non_self_map() {
        assert!(matches!(load_map(r#"{"num": [[2]], "den": [[1]]}"#), Err(Error::NotASelfMap(_))));
    }

    #[test]
    fn rejects_vanishing_denominator() {
        let r = load_map(r#"{"num": [[1e-13]], "den": [[1e-12]]}"#);
        assert!(matches!(r, Err(Error::DenominatorVanishes(_))), "{r:?}");
        let r = load_map(r#"{"num": [[1]], "den": [[0]]}"#);
        assert!(matches!(r, Err(Error::DenominatorVanishes(_))), "{r:?}");
    }

    #[test]
    fn parse_errors() {
        for bad in ["", "[]", r#"{"num": [[1]]}"#, r#"{"builtin": "nope"}"#, r#"{"num": [["x"]], "den": [[1]]}"#] {
            assert!(parse_map_spec(bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn complex_entries_round_trip() {
        let text = r#"{"num": [[[0.1, 0.2], 0.3], [0.25]], "den": [[1.5]]}"#;
        let m = load_map(text).unwrap();
        let again = load_map(&to_spec(&m)).unwrap();
        assert_eq!(m, again);
    }
}
