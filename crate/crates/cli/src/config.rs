//! Effective configuration: flags, then a `key=value` file, then defaults.

use std::collections::BTreeMap;
use std::fmt::Display;
use std::fs;
use std::path::Path;
use std::str::FromStr;

use crate::Failure;

#[derive(Debug, Default)]
pub struct Settings {
    file: BTreeMap<String, String>,
    effective: BTreeMap<String, String>,
}

impl Settings {
    pub fn load(path: Option<&Path>) -> Result<Self, Failure> {
        let mut file = BTreeMap::new();
        if let Some(path) = path {
            let text = fs::read_to_string(path).map_err(|e| Failure::Usage(format!("cannot read config {}: {e}", path.display())))?;
            for (no, line) in text.lines().enumerate() {
                let line = line.trim();
                if line.is_empty() || line.starts_with('#') {
                    continue;
                }
                let (key, value) =
                    line.split_once('=').ok_or_else(|| Failure::Usage(format!("config line {}: expected key=value", no + 1)))?;
                file.insert(key.trim().replace('_', "-"), value.trim().to_string());
            }
        }
        Ok(Self { file, effective: BTreeMap::new() })
    }

    /// Resolves one setting and records it in the effective configuration.
    pub fn pick<T>(&mut self, key: &str, flag: Option<T>, default: T) -> Result<T, Failure>
    where
        T: FromStr + Display,
        T::Err: Display,
    {
        let value = match (flag, self.file.get(key)) {
            (Some(v), _) => v,
            (None, Some(text)) => text.parse().map_err(|e| Failure::Usage(format!("config key {key}: {e}")))?,
            (None, None) => default,
        };
        self.effective.insert(key.to_string(), value.to_string());
        Ok(value)
    }

    pub fn record(&mut self, key: &str, value: impl Display) {
        self.effective.insert(key.to_string(), value.to_string());
    }

    pub fn forget(&mut self, key: &str) {
        self.effective.remove(key);
    }

    /// `key=value` pairs in key order, space separated.
    pub fn header(&self) -> String {
        self.effective.iter().map(|(k, v)| format!("{k}={v}")).collect::<Vec<_>>().join(" ")
    }

    pub fn as_json(&self) -> serde_json::Value {
        serde_json::to_value(&self.effective).expect("string map serializes")
    }
}

/// Inclusive integer ranges: `3`, `0..3` or `0,2,5`.
pub fn parse_index_list(text: &str) -> Result<Vec<usize>, Failure> {
    let bad = || Failure::Usage(format!("bad index list {text:?}"));
    if let Some((a, b)) = text.split_once("..") {
        let a: usize = a.trim().parse().map_err(|_| bad())?;
        let b: usize = b.trim().trim_start_matches('=').parse().map_err(|_| bad())?;
        if b < a {
            return Err(bad());
        }
        return Ok((a..=b).collect());
    }
    text.split(',').map(|s| s.trim().parse().map_err(|_| bad())).collect()
}

pub fn parse_f64_list(text: &str) -> Result<Vec<f64>, Failure> {
    text.split(',').map(|s| s.trim().parse::<f64>().map_err(|_| Failure::Usage(format!("bad number {s:?} in {text:?}")))).collect()
}

/// A length given either absolutely or as a multiple of a quarter period,
/// e.g. `1.7K` or `0.25K'`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Scaled {
    Abs(f64),
    K(f64),
    KPrime(f64),
}

impl Scaled {
    pub fn resolve(self, big_k: f64, big_kp: f64) -> f64 {
        match self {
            Scaled::Abs(x) => x,
            Scaled::K(x) => x * big_k,
            Scaled::KPrime(x) => x * big_kp,
        }
    }
}

impl FromStr for Scaled {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        let s = s.trim();
        let num = |t: &str| t.trim().parse::<f64>().map_err(|_| format!("bad length {s:?}"));
        if let Some(t) = s.strip_suffix("K'") {
            Ok(Scaled::KPrime(num(t)?))
        } else if let Some(t) = s.strip_suffix('K') {
            Ok(Scaled::K(num(t)?))
        } else {
            Ok(Scaled::Abs(num(s)?))
        }
    }
}

impl Display for Scaled {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Scaled::Abs(x) => write!(f, "{x}"),
            Scaled::K(x) => write!(f, "{x}K"),
            Scaled::KPrime(x) => write!(f, "{x}K'"),
        }
    }
}
