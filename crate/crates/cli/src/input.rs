use std::fs;

use affdual::algebra::{algebra_from_json, algebra_to_value, builtin};
use affdual::partial::PartialHom;
use affdual::{Elem, Error, FiniteAlgebra, Result, TupleCode};
use serde_json::Value;

use crate::report::Input;

/// Collects the raw bytes of everything a command reads.
#[derive(Default)]
pub struct Inputs {
    pub list: Vec<Input>,
}

impl Inputs {
    fn read(&mut self, path: &str) -> Result<String> {
        let text = fs::read_to_string(path).map_err(|e| Error::malformed(path, e.to_string()))?;
        self.list.push(Input {
            label: path.to_string(),
            bytes: text.clone().into_bytes(),
        });
        Ok(text)
    }

    /// `builtin:<name>` or a path to an algebra JSON file.
    pub fn algebra(&mut self, source: &str) -> Result<FiniteAlgebra> {
        if let Some(name) = source.strip_prefix("builtin:") {
            let alg = builtin::by_name(name).ok_or_else(|| {
                Error::malformed(
                    "--builtin",
                    format!(
                        "unknown builtin `{name}`; known: {}",
                        builtin::NAMES.join(", ")
                    ),
                )
            })?;
            let bytes = serde_json::to_vec(&algebra_to_value(&alg)).expect("plain JSON");
            self.list.push(Input {
                label: source.to_string(),
                bytes,
            });
            return Ok(alg);
        }
        let text = self.read(source)?;
        algebra_from_json(&text).map_err(|e| match e {
            Error::Malformed { path, message } => {
                Error::malformed(format!("{source}: {path}"), message)
            }
            other => other,
        })
    }

    pub fn partial_hom(&mut self, path: &str, base_size: usize) -> Result<PartialHom> {
        let text = self.read(path)?;
        let value: Value = serde_json::from_str(&text).map_err(|e| {
            Error::malformed(
                format!("{path}: line {}, column {}", e.line(), e.column()),
                e.to_string(),
            )
        })?;
        PartialHom::from_json(&value, base_size).map_err(|e| match e {
            Error::Malformed { path: p, message } => {
                Error::malformed(format!("{path}: {p}"), message)
            }
            other => other,
        })
    }

    pub fn suite(&mut self, path: &str) -> Result<Vec<FiniteAlgebra>> {
        let text = self.read(path)?;
        let value: Value = serde_json::from_str(&text).map_err(|e| {
            Error::malformed(
                format!("{path}: line {}, column {}", e.line(), e.column()),
                e.to_string(),
            )
        })?;
        let items = match &value {
            Value::Array(a) => a,
            Value::Object(o) => o.get("algebras").and_then(Value::as_array).ok_or_else(|| {
                Error::malformed(format!("{path}: $.algebras"), "expected a list")
            })?,
            _ => return Err(Error::malformed(path, "expected a list of algebras")),
        };
        items
            .iter()
            .enumerate()
            .map(|(i, v)| match v {
                Value::String(s) => builtin::by_name(s.strip_prefix("builtin:").unwrap_or(s))
                    .ok_or_else(|| {
                        Error::malformed(format!("{path}: [{i}]"), format!("unknown builtin `{s}`"))
                    }),
                _ => affdual::algebra::algebra_from_value(v)
                    .map_err(|e| Error::malformed(format!("{path}: [{i}]"), e.to_string())),
            })
            .collect()
    }
}

/// Element lists: `full`, comma-separated codes, or a JSON list of codes
/// or of `n`-tuples.
pub fn parse_elements(text: &str, base: usize, n: usize) -> Result<Vec<Elem>> {
    let total = base
        .checked_pow(n as u32)
        .ok_or_else(|| Error::limit("power", format!("{base}^{n}"), usize::MAX))?;
    let bad = |m: String| Error::malformed("element list", m);
    let codes: Vec<usize> = if text.trim() == "full" {
        (0..total).collect()
    } else if text.trim_start().starts_with('[') {
        let v: Value = serde_json::from_str(text).map_err(|e| bad(e.to_string()))?;
        let items = v.as_array().ok_or_else(|| bad("expected a list".into()))?;
        items
            .iter()
            .map(|item| match item {
                Value::Number(x) => x
                    .as_u64()
                    .map(|c| c as usize)
                    .ok_or_else(|| bad(format!("bad code {x}"))),
                Value::Array(t) => {
                    if t.len() != n {
                        return Err(bad(format!("expected {n} coordinates, found {}", t.len())));
                    }
                    let t: Vec<Elem> = t
                        .iter()
                        .map(|c| {
                            c.as_u64()
                                .filter(|&c| (c as usize) < base)
                                .map(|c| c as Elem)
                        })
                        .collect::<Option<_>>()
                        .ok_or_else(|| bad(format!("bad tuple {item}")))?;
                    Ok(TupleCode::encode(&t, base))
                }
                other => Err(bad(format!("unexpected {other}"))),
            })
            .collect::<Result<_>>()?
    } else {
        text.split(',')
            .filter(|s| !s.trim().is_empty())
            .map(|s| {
                s.trim()
                    .parse::<usize>()
                    .map_err(|e| bad(format!("`{s}`: {e}")))
            })
            .collect::<Result<_>>()?
    };
    if let Some(c) = codes.iter().find(|&&c| c >= total) {
        return Err(bad(format!("code {c} outside A^{n} of size {total}")));
    }
    let mut out: Vec<Elem> = codes.into_iter().map(|c| c as Elem).collect();
    out.sort_unstable();
    out.dedup();
    Ok(out)
}

/// A map given as comma-separated values, one per element.
pub fn parse_map(text: &str, domain: usize, codomain: usize) -> Result<Vec<Elem>> {
    let vals = parse_elements_raw(text)?;
    if vals.len() != domain {
        return Err(Error::malformed(
            "map",
            format!("expected {domain} values, found {}", vals.len()),
        ));
    }
    if let Some(v) = vals.iter().find(|&&v| v as usize >= codomain) {
        return Err(Error::malformed(
            "map",
            format!("value {v} outside carrier of size {codomain}"),
        ));
    }
    Ok(vals)
}

fn parse_elements_raw(text: &str) -> Result<Vec<Elem>> {
    if text.trim_start().starts_with('[') {
        serde_json::from_str(text).map_err(|e| Error::malformed("map", e.to_string()))
    } else {
        text.split(',')
            .map(|s| {
                s.trim()
                    .parse::<Elem>()
                    .map_err(|e| Error::malformed("map", format!("`{s}`: {e}")))
            })
            .collect()
    }
}
