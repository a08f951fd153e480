//! The map description format:
//! `{"n_in": n, "components": [[{"re": …, "im": …, "exp": [e_1, …, e_n]}, …], …]}`.

use std::fmt;
use std::path::Path;

use lienorm_core::holo::{PolynomialMap, Term};
use lienorm_core::Complex64;
use serde_json::{Map, Value};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MapFileError(pub String);

impl fmt::Display for MapFileError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for MapFileError {}

fn err<T>(msg: impl Into<String>) -> Result<T, MapFileError> {
    Err(MapFileError(msg.into()))
}

fn number(obj: &Map<String, Value>, key: &str, at: &str) -> Result<f64, MapFileError> {
    match obj.get(key) {
        Some(Value::Number(n)) => n
            .as_f64()
            .filter(|v| v.is_finite())
            .map_or_else(|| err(format!("{at}: \"{key}\" is not finite")), Ok),
        Some(_) => err(format!("{at}: \"{key}\" must be a number")),
        None => err(format!("{at}: missing \"{key}\"")),
    }
}

fn term(value: &Value, n_in: usize, at: &str) -> Result<Term, MapFileError> {
    let Value::Object(obj) = value else {
        return err(format!("{at}: expected an object"));
    };
    if let Some(k) = obj
        .keys()
        .find(|k| !matches!(k.as_str(), "re" | "im" | "exp"))
    {
        return err(format!("{at}: unknown field \"{k}\""));
    }
    let coeff = Complex64::new(number(obj, "re", at)?, number(obj, "im", at)?);
    let Some(Value::Array(exp)) = obj.get("exp") else {
        return err(format!(
            "{at}: \"exp\" must be an array of nonnegative integers"
        ));
    };
    if exp.len() != n_in {
        return err(format!(
            "{at}: \"exp\" has {} entries, expected n_in = {n_in}",
            exp.len()
        ));
    }
    let exponents = exp
        .iter()
        .enumerate()
        .map(|(k, e)| {
            e.as_u64().and_then(|v| u32::try_from(v).ok()).map_or_else(
                || {
                    err(format!(
                        "{at}: exponent {k} must be a nonnegative integer, got {e}"
                    ))
                },
                Ok,
            )
        })
        .collect::<Result<Vec<u32>, _>>()?;
    Ok(Term::new(coeff, exponents))
}

pub fn parse_map(text: &str) -> Result<PolynomialMap, MapFileError> {
    let doc: Value =
        serde_json::from_str(text).map_err(|e| MapFileError(format!("invalid JSON: {e}")))?;
    let Value::Object(root) = doc else {
        return err("top level must be an object");
    };
    if let Some(k) = root
        .keys()
        .find(|k| !matches!(k.as_str(), "n_in" | "components"))
    {
        return err(format!("unknown field \"{k}\""));
    }
    let n_in = match root.get("n_in").and_then(Value::as_u64) {
        Some(n) if n > 0 => n as usize,
        _ => return err("\"n_in\" must be a positive integer"),
    };
    let Some(Value::Array(comps)) = root.get("components") else {
        return err("\"components\" must be an array of term arrays");
    };
    let components = comps
        .iter()
        .enumerate()
        .map(|(c, comp)| {
            let Value::Array(terms) = comp else {
                return err(format!("component {c}: expected an array of terms"));
            };
            terms
                .iter()
                .enumerate()
                .map(|(t, v)| term(v, n_in, &format!("component {c}, term {t}")))
                .collect()
        })
        .collect::<Result<Vec<Vec<Term>>, _>>()?;
    PolynomialMap::new(n_in, components).map_err(|e| MapFileError(e.to_string()))
}

pub fn read_map(path: &Path) -> Result<PolynomialMap, MapFileError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| MapFileError(format!("{}: {e}", path.display())))?;
    parse_map(&text)
}
