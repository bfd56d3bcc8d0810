//! Parsing of `--params`, `--grid` and complex literals.

use std::collections::BTreeMap;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Parses `1.5`, `-2i`, `i`, `0.5-1e-3i` and similar.
pub fn parse_complex(s: &str) -> Result<Complex64> {
    let s: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    let bad = || Error::InvalidInput(format!("'{s}' is not a number"));
    let num = |x: &str| -> Result<f64> {
        match x {
            "" | "+" => Ok(1.0),
            "-" => Ok(-1.0),
            _ => x.parse::<f64>().map_err(|_| bad()),
        }
    };
    if s.is_empty() {
        return Err(bad());
    }
    let Some(body) = s.strip_suffix('i') else {
        return Ok(Complex64::new(s.parse::<f64>().map_err(|_| bad())?, 0.0));
    };
    let bytes = body.as_bytes();
    let split = (1..bytes.len())
        .rev()
        .find(|&k| (bytes[k] == b'+' || bytes[k] == b'-') && !matches!(bytes[k - 1], b'e' | b'E'));
    match split {
        Some(k) => {
            let re = body[..k].parse::<f64>().map_err(|_| bad())?;
            Ok(Complex64::new(re, num(&body[k..])?))
        }
        None => Ok(Complex64::new(0.0, num(body)?)),
    }
}

/// `key=value,key=value` with complex values.
pub fn parse_params(s: &str) -> Result<BTreeMap<String, Complex64>> {
    let mut out = BTreeMap::new();
    for part in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        let (k, v) = part
            .split_once('=')
            .ok_or_else(|| Error::InvalidInput(format!("parameter '{part}' is not key=value")))?;
        let key = canonical_key(k.trim());
        if out.insert(key.clone(), parse_complex(v)?).is_some() {
            return Err(Error::InvalidInput(format!("parameter '{key}' given twice")));
        }
    }
    Ok(out)
}

fn canonical_key(k: &str) -> String {
    match k {
        "U0" | "u0star" | "U0*" => "u0".into(),
        "delta0" => "d0".into(),
        "delta1" => "d1".into(),
        "delta2" => "d2".into(),
        other => other.to_string(),
    }
}

/// `start:stop:n` with at least two points.
pub fn parse_grid(s: &str) -> Result<Vec<f64>> {
    let parts: Vec<&str> = s.split(':').collect();
    let bad = || Error::InvalidInput(format!("grid '{s}' is not start:stop:n"));
    if parts.len() != 3 {
        return Err(bad());
    }
    let a: f64 = parts[0].trim().parse().map_err(|_| bad())?;
    let b: f64 = parts[1].trim().parse().map_err(|_| bad())?;
    let n: usize = parts[2].trim().parse().map_err(|_| bad())?;
    if n < 2 || !(a.is_finite() && b.is_finite()) || a >= b {
        return Err(bad());
    }
    Ok(linspace(a, b, n))
}

pub fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    (0..n).map(|j| if j + 1 == n { b } else { a + (b - a) * j as f64 / (n - 1) as f64 }).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn complex_literals() {
        let c = |re, im| Complex64::new(re, im);
        assert_eq!(parse_complex("1.5").unwrap(), c(1.5, 0.0));
        assert_eq!(parse_complex("-2i").unwrap(), c(0.0, -2.0));
        assert_eq!(parse_complex("i").unwrap(), c(0.0, 1.0));
        assert_eq!(parse_complex("-i").unwrap(), c(0.0, -1.0));
        assert_eq!(parse_complex("1-2i").unwrap(), c(1.0, -2.0));
        assert_eq!(parse_complex("1e-3+2.5e-2i").unwrap(), c(1e-3, 2.5e-2));
        assert_eq!(parse_complex("-1e+2-i").unwrap(), c(-100.0, -1.0));
        assert!(parse_complex("abc").is_err());
        assert!(parse_complex("").is_err());
    }

    #[test]
    fn params_and_grid() {
        let p = parse_params("u0=3, delta0=1,d1=-2").unwrap();
        assert_eq!(p["d0"], Complex64::new(1.0, 0.0));
        assert_eq!(p["u0"], Complex64::new(3.0, 0.0));
        assert!(parse_params("d0=1,d0=2").is_err());
        let g = parse_grid("-1:1:5").unwrap();
        assert_eq!(g, vec![-1.0, -0.5, 0.0, 0.5, 1.0]);
        assert!(parse_grid("1:0:5").is_err());
        assert!(parse_grid("0:1").is_err());
    }
}
