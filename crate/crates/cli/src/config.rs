//! Flag values that can come from the command line or a JSON config file.

use std::path::{Path, PathBuf};
use std::str::FromStr;

use cartan_core::geometry::{BodySpec, ConvexBody};
use serde::{Deserialize, Deserializer};

use crate::CliError;

/// A positive sample count; accepts `1000000`, `1e6` or `"1e6"`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SampleCount(pub u64);

impl FromStr for SampleCount {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let s = s.trim().replace('_', "");
        if let Ok(v) = s.parse::<u64>() {
            return Self::from_u64(v);
        }
        let v: f64 = s.parse().map_err(|_| format!("`{s}` is not a sample count"))?;
        Self::from_f64(v)
    }
}

impl SampleCount {
    fn from_u64(v: u64) -> Result<Self, String> {
        if v == 0 {
            return Err("sample counts must be positive".into());
        }
        Ok(Self(v))
    }

    fn from_f64(v: f64) -> Result<Self, String> {
        if !(v.is_finite() && v >= 1.0 && v.fract() == 0.0 && v <= u64::MAX as f64) {
            return Err(format!("{v} is not a positive whole sample count"));
        }
        Ok(Self(v as u64))
    }
}

impl<'de> Deserialize<'de> for SampleCount {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Int(u64),
            Float(f64),
            Text(String),
        }
        let parsed = match Raw::deserialize(d)? {
            Raw::Int(v) => Self::from_u64(v),
            Raw::Float(v) => Self::from_f64(v),
            Raw::Text(s) => s.parse(),
        };
        parsed.map_err(serde::de::Error::custom)
    }
}

/// Epsilon grid: `start:stop:count` (inclusive) or a comma list.
#[derive(Clone, Debug, PartialEq)]
pub struct EpsGrid(pub Vec<f64>);

impl FromStr for EpsGrid {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let bad = || format!("`{s}` is not an epsilon grid (start:stop:count or a,b,c)");
        let values = if s.contains(':') {
            let parts: Vec<&str> = s.split(':').collect();
            let [a, b, k] = parts[..] else { return Err(bad()) };
            let a: f64 = a.trim().parse().map_err(|_| bad())?;
            let b: f64 = b.trim().parse().map_err(|_| bad())?;
            let k: usize = k.trim().parse().map_err(|_| bad())?;
            match k {
                0 => return Err(bad()),
                1 => vec![a],
                _ => (0..k).map(|i| a + (b - a) * i as f64 / (k - 1) as f64).collect(),
            }
        } else {
            s.split(',')
                .map(|p| p.trim().parse::<f64>().map_err(|_| bad()))
                .collect::<Result<_, _>>()?
        };
        Ok(Self(values))
    }
}

impl<'de> Deserialize<'de> for EpsGrid {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            List(Vec<f64>),
            Text(String),
        }
        match Raw::deserialize(d)? {
            Raw::List(v) => Ok(Self(v)),
            Raw::Text(s) => s.parse().map_err(serde::de::Error::custom),
        }
    }
}

/// A body given as a path to a JSON spec or as inline JSON.
#[derive(Clone, Debug, PartialEq)]
pub enum BodyArg {
    Path(PathBuf),
    Inline(BodySpec),
}

impl FromStr for BodyArg {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        if s.trim_start().starts_with('{') {
            serde_json::from_str(s).map(BodyArg::Inline).map_err(|e| format!("invalid body JSON: {e}"))
        } else {
            Ok(BodyArg::Path(PathBuf::from(s)))
        }
    }
}

impl<'de> Deserialize<'de> for BodyArg {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Path(PathBuf),
            Inline(BodySpec),
        }
        Ok(match Raw::deserialize(d)? {
            Raw::Path(p) => BodyArg::Path(p),
            Raw::Inline(b) => BodyArg::Inline(b),
        })
    }
}

impl BodyArg {
    /// Paths read from a config file are relative to that file.
    pub fn rebase(self, dir: &Path) -> Self {
        match self {
            BodyArg::Path(p) if p.is_relative() => BodyArg::Path(dir.join(p)),
            other => other,
        }
    }

    /// Reads and validates the body, returning it with its canonical spec.
    pub fn load(&self, what: &str) -> Result<(ConvexBody, BodySpec), CliError> {
        let spec = match self {
            BodyArg::Inline(s) => s.clone(),
            BodyArg::Path(p) => {
                let text = std::fs::read_to_string(p)
                    .map_err(|e| CliError::Validation(format!("cannot read {what} from {}: {e}", p.display())))?;
                serde_json::from_str(&text)
                    .map_err(|e| CliError::Validation(format!("invalid {what} in {}: {e}", p.display())))?
            }
        };
        let body = spec
            .build()
            .map_err(|e| CliError::Validation(format!("invalid {what}: {e}")))?;
        let canonical = BodySpec::from(&body);
        Ok((body, canonical))
    }
}

/// `Some` from the flag, falling back to the config file.
pub fn pick<T>(flag: Option<T>, file: Option<T>) -> Option<T> {
    flag.or(file)
}

pub fn required<T>(value: Option<T>, name: &str) -> Result<T, CliError> {
    value.ok_or_else(|| CliError::Validation(format!("--{name} is required")))
}
