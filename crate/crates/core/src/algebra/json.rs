use serde_json::{json, Value};

use super::{Elem, FiniteAlgebra, Operation, TupleCode};
use crate::error::{Error, Result};

/// Parses the algebra JSON format. Tables are nested lists whose innermost
/// index is the last argument; a nullary table is a one-element list.
pub fn algebra_from_json(text: &str) -> Result<FiniteAlgebra> {
    let value: Value = serde_json::from_str(text).map_err(|e| {
        Error::malformed(
            format!("line {}, column {}", e.line(), e.column()),
            e.to_string(),
        )
    })?;
    algebra_from_value(&value)
}

pub fn algebra_from_value(value: &Value) -> Result<FiniteAlgebra> {
    let obj = value
        .as_object()
        .ok_or_else(|| Error::malformed("$", "expected an object"))?;
    let name = match obj.get("name") {
        None => "unnamed".to_string(),
        Some(Value::String(s)) => s.clone(),
        Some(_) => return Err(Error::malformed("$.name", "expected a string")),
    };
    let size = obj
        .get("size")
        .and_then(Value::as_u64)
        .ok_or_else(|| Error::malformed("$.size", "expected a positive integer"))?
        as usize;
    if size == 0 {
        return Err(Error::malformed("$.size", "expected a positive integer"));
    }
    let ops = obj
        .get("operations")
        .and_then(Value::as_array)
        .ok_or_else(|| Error::malformed("$.operations", "expected a list"))?;
    let mut parsed = Vec::with_capacity(ops.len());
    for (i, op) in ops.iter().enumerate() {
        let path = format!("$.operations[{i}]");
        let op_name = op
            .get("name")
            .and_then(Value::as_str)
            .ok_or_else(|| Error::malformed(format!("{path}.name"), "expected a string"))?;
        let arity = op
            .get("arity")
            .and_then(Value::as_u64)
            .ok_or_else(|| Error::malformed(format!("{path}.arity"), "expected an integer"))?
            as usize;
        let count = (size as u128)
            .checked_pow(arity as u32)
            .unwrap_or(u128::MAX);
        if count > 1 << 26 {
            return Err(Error::limit(format!("{path}.table"), count, 1 << 26));
        }
        let table_value = op
            .get("table")
            .ok_or_else(|| Error::malformed(format!("{path}.table"), "missing"))?;
        let mut table = vec![0 as Elem; count as usize];
        if arity == 0 {
            let v = match table_value.as_array().map(Vec::as_slice) {
                Some([v]) => v,
                _ => {
                    return Err(Error::malformed(
                        format!("{path}.table"),
                        "nullary table must be a one-element list",
                    ))
                }
            };
            table[0] = entry(v, size, &format!("{path}.table[0]"))?;
        } else {
            let mut args = vec![0 as Elem; arity];
            fill(
                table_value,
                size,
                0,
                &mut args,
                &mut table,
                &format!("{path}.table"),
            )?;
        }
        parsed.push(Operation {
            name: op_name.to_string(),
            arity,
            table,
        });
    }
    FiniteAlgebra::new(name, size, parsed)
}

fn entry(v: &Value, size: usize, path: &str) -> Result<Elem> {
    match v.as_u64() {
        Some(x) if (x as usize) < size => Ok(x as Elem),
        Some(x) => Err(Error::malformed(
            path,
            format!("entry {x} outside 0..{size}"),
        )),
        None => Err(Error::malformed(path, "expected a carrier element")),
    }
}

fn fill(
    v: &Value,
    size: usize,
    depth: usize,
    args: &mut Vec<Elem>,
    table: &mut [Elem],
    path: &str,
) -> Result<()> {
    let list = v
        .as_array()
        .ok_or_else(|| Error::malformed(path, "expected a nested list"))?;
    if list.len() != size {
        return Err(Error::malformed(
            path,
            format!("expected {size} entries, found {}", list.len()),
        ));
    }
    for (x, item) in list.iter().enumerate() {
        args[depth] = x as Elem;
        let sub = format!("{path}[{x}]");
        if depth + 1 == args.len() {
            table[TupleCode::encode(args, size)] = entry(item, size, &sub)?;
        } else {
            fill(item, size, depth + 1, args, table, &sub)?;
        }
    }
    Ok(())
}

pub fn algebra_to_value(alg: &FiniteAlgebra) -> Value {
    let size = super::Algebra::size(alg);
    let ops: Vec<Value> = alg
        .operations()
        .iter()
        .map(|op| {
            let table = if op.arity == 0 {
                json!([op.table[0]])
            } else {
                nest(&op.table, size, op.arity, &mut vec![0; op.arity], 0)
            };
            json!({"name": op.name, "arity": op.arity, "table": table})
        })
        .collect();
    json!({"name": alg.name(), "size": size, "operations": ops})
}

fn nest(table: &[Elem], size: usize, arity: usize, args: &mut Vec<Elem>, depth: usize) -> Value {
    Value::Array(
        (0..size)
            .map(|x| {
                args[depth] = x as Elem;
                if depth + 1 == arity {
                    json!(table[TupleCode::encode(args, size)])
                } else {
                    nest(table, size, arity, args, depth + 1)
                }
            })
            .collect(),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{builtin, Algebra};

    #[test]
    fn innermost_index_is_last_argument() {
        let text = r#"{"name":"sub","size":2,"operations":[
            {"name":"f","arity":2,"table":[[0,0],[1,0]]}]}"#;
        let a = algebra_from_json(text).unwrap();
        // f(1,0) = 1, f(0,1) = 0
        assert_eq!(a.apply(0, &[1, 0]), 1);
        assert_eq!(a.apply(0, &[0, 1]), 0);
    }

    #[test]
    fn round_trips_builtins() {
        for alg in [
            builtin::sec6(),
            builtin::affine_space(3),
            builtin::z4_shift(),
        ] {
            let back = algebra_from_value(&algebra_to_value(&alg)).unwrap();
            assert_eq!(back, alg);
        }
    }

    #[test]
    fn schema_errors_name_the_field() {
        let text =
            r#"{"name":"z","size":4,"operations":[{"name":"neg","arity":1,"table":[0,3,7,1]}]}"#;
        match algebra_from_json(text).unwrap_err() {
            Error::Malformed { path, .. } => assert_eq!(path, "$.operations[0].table[2]"),
            e => panic!("{e}"),
        }
        assert!(matches!(
            algebra_from_json("{\"size\": }").unwrap_err(),
            Error::Malformed { .. }
        ));
    }
}
