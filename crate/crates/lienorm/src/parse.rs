//! Command-line literals: complex numbers `<re>[+|-]<im>i`, comma lists.

use lienorm_core::Complex64;

fn finite(s: &str) -> Result<f64, String> {
    let v: f64 = s.parse().map_err(|_| format!("'{s}' is not a number"))?;
    if v.is_finite() {
        Ok(v)
    } else {
        Err(format!("'{s}' is not finite"))
    }
}

/// Parses `1.5`, `-2i`, `1+0i`, `0.5-1e-3i`. Spaces are rejected.
pub fn parse_complex(s: &str) -> Result<Complex64, String> {
    if s.is_empty() {
        return Err("empty complex literal".into());
    }
    if s.chars().any(char::is_whitespace) {
        return Err(format!("'{s}': complex literals may not contain spaces"));
    }
    let Some(body) = s.strip_suffix('i') else {
        return Ok(Complex64::new(finite(s)?, 0.0));
    };
    let bytes = body.as_bytes();
    let split = (1..bytes.len())
        .rev()
        .find(|&k| matches!(bytes[k], b'+' | b'-') && !matches!(bytes[k - 1], b'e' | b'E'));
    let imag = |t: &str| match t {
        "" | "+" => Ok(1.0),
        "-" => Ok(-1.0),
        _ => finite(t),
    };
    match split {
        Some(k) => Ok(Complex64::new(finite(&body[..k])?, imag(&body[k..])?)),
        None => Ok(Complex64::new(0.0, imag(body)?)),
    }
    .map_err(|e: String| format!("'{s}': {e}"))
}

pub fn parse_complex_list(s: &str) -> Result<Vec<Complex64>, String> {
    s.split(',').map(parse_complex).collect()
}

pub fn parse_real_list(s: &str) -> Result<Vec<f64>, String> {
    s.split(',').map(finite).collect()
}
