//! JSON interchange for semilinear sets and Diophantine systems.
//!
//! Integers are serialized as decimal strings so arbitrary-precision values
//! survive any JSON implementation; parsing also accepts plain JSON numbers
//! for convenience.
//!
//! ```json
//! {"dim": 2, "components": [{"base": ["0","0"], "periods": [["1","0"]]}]}
//! {"matrix": [["2","-3"]], "rhs": ["0"]}
//! ```

use num::bigint::BigInt;
use serde_json::{json, Value};

use crate::semilinear::{DiophantineSystem, LinearSet, SemiLinearSet, SlError, Vector};

fn int_to_value(x: &BigInt) -> Value {
    Value::String(x.to_string())
}

fn value_to_int(v: &Value) -> Result<BigInt, SlError> {
    match v {
        Value::String(s) => s.parse::<BigInt>().map_err(|_| SlError::Json {
            msg: format!("`{s}` is not a decimal integer"),
        }),
        Value::Number(n) => {
            if let Some(i) = n.as_i64() {
                Ok(BigInt::from(i))
            } else if let Some(u) = n.as_u64() {
                Ok(BigInt::from(u))
            } else {
                Err(SlError::Json {
                    msg: format!("number {n} is not an integer"),
                })
            }
        }
        other => Err(SlError::Json {
            msg: format!("expected integer, got {other}"),
        }),
    }
}

fn vector_to_value(v: &Vector) -> Value {
    Value::Array(v.entries().iter().map(int_to_value).collect())
}

fn value_to_vector(v: &Value) -> Result<Vector, SlError> {
    let arr = v.as_array().ok_or_else(|| SlError::Json {
        msg: format!("expected array of integers, got {v}"),
    })?;
    Ok(Vector::new(
        arr.iter().map(value_to_int).collect::<Result<_, _>>()?,
    ))
}

/// Serializes a semilinear set.
pub fn semilinear_to_json(m: &SemiLinearSet) -> Value {
    json!({
        "dim": m.dim(),
        "components": m.components().iter().map(|l| json!({
            "base": vector_to_value(l.base()),
            "periods": l.periods().iter().map(vector_to_value).collect::<Vec<_>>(),
        })).collect::<Vec<_>>(),
    })
}

/// Parses a semilinear set, validating dimensions and nonnegativity.
pub fn semilinear_from_json(v: &Value) -> Result<SemiLinearSet, SlError> {
    let dim = v
        .get("dim")
        .and_then(Value::as_u64)
        .ok_or_else(|| SlError::Json {
            msg: "missing numeric field `dim`".to_owned(),
        })? as usize;
    let comps = v
        .get("components")
        .and_then(Value::as_array)
        .ok_or_else(|| SlError::Json {
            msg: "missing array field `components`".to_owned(),
        })?;
    let mut components = Vec::new();
    for c in comps {
        let base = value_to_vector(c.get("base").ok_or_else(|| SlError::Json {
            msg: "component missing `base`".to_owned(),
        })?)?;
        let periods = c
            .get("periods")
            .and_then(Value::as_array)
            .ok_or_else(|| SlError::Json {
                msg: "component missing array `periods`".to_owned(),
            })?
            .iter()
            .map(value_to_vector)
            .collect::<Result<Vec<_>, _>>()?;
        components.push(LinearSet::new(base, periods)?);
    }
    SemiLinearSet::new(dim, components)
}

/// Serializes a Diophantine system `A·x ≥ c`.
pub fn dioph_to_json(d: &DiophantineSystem) -> Value {
    json!({
        "matrix": d.rows().iter().map(vector_to_value).collect::<Vec<_>>(),
        "rhs": vector_to_value(d.rhs()),
    })
}

/// Parses a Diophantine system.
pub fn dioph_from_json(v: &Value) -> Result<DiophantineSystem, SlError> {
    let rows = v
        .get("matrix")
        .and_then(Value::as_array)
        .ok_or_else(|| SlError::Json {
            msg: "missing array field `matrix`".to_owned(),
        })?
        .iter()
        .map(value_to_vector)
        .collect::<Result<Vec<_>, _>>()?;
    let rhs = value_to_vector(v.get("rhs").ok_or_else(|| SlError::Json {
        msg: "missing field `rhs`".to_owned(),
    })?)?;
    DiophantineSystem::new(rows, rhs)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn semilinear_round_trip() {
        let l = LinearSet::new(
            Vector::from_i64s(&[0, 3]),
            vec![Vector::from_i64s(&[1, 0]), Vector::from_i64s(&[2, 2])],
        )
        .unwrap();
        let m = SemiLinearSet::new(2, vec![l]).unwrap();
        let v = semilinear_to_json(&m);
        let m2 = semilinear_from_json(&v).unwrap();
        assert_eq!(m, m2);
        // Integers are rendered as strings.
        assert_eq!(v["components"][0]["base"][1], Value::String("3".into()));
    }

    #[test]
    fn dioph_round_trip_and_numbers_accepted() {
        let d = DiophantineSystem::new(vec![Vector::from_i64s(&[2, -3])], Vector::from_i64s(&[0]))
            .unwrap();
        let v = dioph_to_json(&d);
        assert_eq!(dioph_from_json(&v).unwrap(), d);
        let numeric: Value = serde_json::json!({"matrix": [[2, -3]], "rhs": [0]});
        assert_eq!(dioph_from_json(&numeric).unwrap(), d);
    }

    #[test]
    fn big_integers_survive() {
        let big = "123456789012345678901234567890";
        let v: Value = serde_json::json!({
            "dim": 1,
            "components": [{"base": [big], "periods": []}],
        });
        let m = semilinear_from_json(&v).unwrap();
        assert_eq!(m.components()[0].base().get(0).to_string(), big);
        let back = semilinear_to_json(&m);
        assert_eq!(back["components"][0]["base"][0], Value::String(big.into()));
    }

    #[test]
    fn malformed_inputs_error() {
        assert!(semilinear_from_json(&serde_json::json!({"dim": 1})).is_err());
        assert!(semilinear_from_json(&serde_json::json!({
            "dim": 1, "components": [{"base": ["x"], "periods": []}]
        }))
        .is_err());
        // Negative base entries are rejected by validation.
        assert!(semilinear_from_json(&serde_json::json!({
            "dim": 1, "components": [{"base": ["-1"], "periods": []}]
        }))
        .is_err());
    }
}
