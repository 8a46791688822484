//! Check tolerances and their `CRCARTAN_TOL` overrides.
//!
//! `CRCARTAN_TOL` is either a single number, which replaces every tolerance,
//! or a comma-separated list of `check=value` pairs, e.g.
//! `cartan.curvature=1e-9,fefferman.ricci=1e-6`. A pair whose key ends in `*`
//! matches every check with that prefix.

use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, Default)]
pub struct Tolerances {
    all: Option<f64>,
    pairs: Vec<(String, f64)>,
}

fn number(s: &str) -> Result<f64, String> {
    match s.trim().parse::<f64>() {
        Ok(v) if v.is_finite() && v >= 0.0 => Ok(v),
        _ => Err(format!("bad tolerance `{}`", s.trim())),
    }
}

impl Tolerances {
    pub fn parse(s: &str) -> Result<Tolerances, String> {
        let s = s.trim();
        if s.is_empty() {
            return Ok(Tolerances::default());
        }
        if !s.contains('=') {
            return Ok(Tolerances { all: Some(number(s)?), pairs: Vec::new() });
        }
        let mut pairs = Vec::new();
        for item in s.split(',') {
            let (k, v) = item.split_once('=').ok_or_else(|| format!("expected check=value, got `{item}`"))?;
            pairs.push((k.trim().to_string(), number(v)?));
        }
        Ok(Tolerances { all: None, pairs })
    }

    pub fn from_env() -> Result<Tolerances, String> {
        match std::env::var("CRCARTAN_TOL") {
            Ok(s) => Tolerances::parse(&s).map_err(|e| format!("CRCARTAN_TOL: {e}")),
            Err(_) => Ok(Tolerances::default()),
        }
    }

    /// Tolerance for `check`, the last matching override winning.
    pub fn get(&self, check: &str, default: f64) -> f64 {
        let mut t = self.all.unwrap_or(default);
        for (k, v) in &self.pairs {
            let hit = match k.strip_suffix('*') {
                Some(prefix) => check.starts_with(prefix),
                None => k == check,
            };
            if hit {
                t = *v;
            }
        }
        t
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Bound {
    /// Passes when `value ≤ tolerance`.
    Max,
    /// Passes when `value ≥ tolerance`.
    Min,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Residual {
    pub name: String,
    pub value: f64,
    pub tolerance: f64,
    pub bound: Bound,
    pub pass: bool,
}

impl Residual {
    pub fn max(name: &str, value: f64, default: f64, tols: &Tolerances) -> Residual {
        let tolerance = tols.get(name, default);
        Residual { name: name.to_string(), value, tolerance, bound: Bound::Max, pass: value <= tolerance }
    }

    pub fn min(name: &str, value: f64, default: f64, tols: &Tolerances) -> Residual {
        let tolerance = tols.get(name, default);
        Residual { name: name.to_string(), value, tolerance, bound: Bound::Min, pass: value >= tolerance }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn overrides() {
        let t = Tolerances::parse("").unwrap();
        assert_eq!(t.get("a", 1e-9), 1e-9);
        let t = Tolerances::parse("1e-4").unwrap();
        assert_eq!(t.get("a", 1e-9), 1e-4);
        let t = Tolerances::parse("cartan.*=1e-3, cartan.curvature=1e-5").unwrap();
        assert_eq!(t.get("cartan.metric", 1e-9), 1e-3);
        assert_eq!(t.get("cartan.curvature", 1e-9), 1e-5);
        assert_eq!(t.get("jets.fd", 1e-6), 1e-6);
        assert!(Tolerances::parse("x=abc").is_err());
        assert!(Tolerances::parse("-1").is_err());
    }

    #[test]
    fn nan_never_passes() {
        let t = Tolerances::default();
        assert!(!Residual::max("a", f64::NAN, 1.0, &t).pass);
        assert!(!Residual::min("a", f64::NAN, 1.0, &t).pass);
    }
}
