//! Grid specifications such as `lambda_db=10,20;rho=0.05:1:0.05;beta=0,0.25,1`.
//!
//! Each axis is a comma-separated list of numbers or inclusive ranges
//! `start:stop:step`.

use std::collections::BTreeMap;

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Grid {
    axes: BTreeMap<String, Vec<f64>>,
}

impl Grid {
    /// Parses `spec`, accepting only the axis names in `allowed`.
    pub fn parse(spec: &str, allowed: &[&str]) -> Result<Grid, String> {
        let mut axes = BTreeMap::new();
        for part in spec.split(';').map(str::trim).filter(|p| !p.is_empty()) {
            let (key, values) = part
                .split_once('=')
                .ok_or_else(|| format!("grid axis `{part}` is not of the form name=values"))?;
            let key = key.trim();
            if !allowed.contains(&key) {
                return Err(format!(
                    "unknown grid axis `{key}` (expected one of {})",
                    allowed.join(", ")
                ));
            }
            let mut list = Vec::new();
            for item in values.split(',').map(str::trim) {
                parse_item(item, &mut list).map_err(|e| format!("grid axis `{key}`: {e}"))?;
            }
            if axes.insert(key.to_string(), list).is_some() {
                return Err(format!("grid axis `{key}` given twice"));
            }
        }
        Ok(Grid { axes })
    }

    pub fn get(&self, key: &str) -> Option<&[f64]> {
        self.axes.get(key).map(Vec::as_slice)
    }

    /// Axis values, or `default` when the axis is absent.
    pub fn or(&self, key: &str, default: Vec<f64>) -> Vec<f64> {
        self.get(key).map_or(default, <[f64]>::to_vec)
    }
}

fn number(s: &str) -> Result<f64, String> {
    let v: f64 = s
        .trim()
        .parse()
        .map_err(|_| format!("`{s}` is not a number"))?;
    if v.is_finite() {
        Ok(v)
    } else {
        Err(format!("`{s}` is not finite"))
    }
}

fn parse_item(item: &str, out: &mut Vec<f64>) -> Result<(), String> {
    let fields: Vec<&str> = item.split(':').collect();
    match fields.as_slice() {
        [v] => out.push(number(v)?),
        [start, stop, step] => {
            let (start, stop, step) = (number(start)?, number(stop)?, number(step)?);
            if step <= 0.0 || stop < start {
                return Err(format!(
                    "range `{item}` needs start <= stop and a positive step"
                ));
            }
            // Index-based so that rounding cannot drop the endpoint.
            let count = ((stop - start) / step + 1e-9).floor() as usize;
            if count > 1_000_000 {
                return Err(format!("range `{item}` has too many points"));
            }
            out.extend((0..=count).map(|i| start + i as f64 * step));
        }
        _ => return Err(format!("`{item}` is neither a number nor start:stop:step")),
    }
    Ok(())
}

/// Integer axis values.
pub fn integers<T: TryFrom<u64>>(key: &str, values: &[f64]) -> Result<Vec<T>, String> {
    values
        .iter()
        .map(|&v| {
            if v < 0.0 || v.fract() != 0.0 {
                return Err(format!(
                    "grid axis `{key}`: {v} is not a nonnegative integer"
                ));
            }
            T::try_from(v as u64).map_err(|_| format!("grid axis `{key}`: {v} is out of range"))
        })
        .collect()
}
