//! Flat `key = value` experiment configuration.

use std::fmt::Write as _;
use std::str::FromStr;

use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum ConfigError {
    #[error("line {line}: unknown key {key:?}")]
    UnknownKey { line: usize, key: String },
    #[error("line {line}: expected `key = value`")]
    Malformed { line: usize },
    #[error("line {line}: key {key:?} given twice")]
    Repeated { line: usize, key: String },
    #[error("{key}: cannot parse {value:?}")]
    BadValue { key: String, value: String },
    #[error("missing preset name")]
    MissingPreset,
}

/// Every key a config file may hold, in serialization order.
pub const KEYS: [&str; 17] = [
    "preset",
    "seed",
    "n",
    "p",
    "d",
    "k",
    "ell",
    "ells",
    "sizes",
    "trials",
    "samples",
    "seeds",
    "runs",
    "pairs",
    "failure_prob",
    "out",
    "csv",
];

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct ExperimentConfig {
    pub preset: String,
    pub seed: u64,
    pub n: Option<usize>,
    pub p: Option<f64>,
    pub d: Option<usize>,
    pub k: Option<usize>,
    pub ell: Option<usize>,
    pub ells: Option<Vec<usize>>,
    pub sizes: Option<Vec<usize>>,
    pub trials: Option<usize>,
    pub samples: Option<usize>,
    pub seeds: Option<usize>,
    pub runs: Option<usize>,
    pub pairs: Option<usize>,
    pub failure_prob: Option<f64>,
    #[serde(skip)]
    pub out: Option<String>,
    #[serde(skip)]
    pub csv: Option<String>,
}

fn parse<T: FromStr>(key: &str, value: &str) -> Result<T, ConfigError> {
    value.parse().map_err(|_| ConfigError::BadValue {
        key: key.into(),
        value: value.into(),
    })
}

fn parse_list(key: &str, value: &str) -> Result<Vec<usize>, ConfigError> {
    value.split(',').map(|v| parse(key, v.trim())).collect()
}

fn join(list: &[usize]) -> String {
    list.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(",")
}

impl ExperimentConfig {
    pub fn new(preset: &str, seed: u64) -> Self {
        ExperimentConfig {
            preset: preset.into(),
            seed,
            ..Default::default()
        }
    }

    /// Sets one key from its text form.
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), ConfigError> {
        match key {
            "preset" => self.preset = value.into(),
            "seed" => self.seed = parse(key, value)?,
            "n" => self.n = Some(parse(key, value)?),
            "p" => self.p = Some(parse(key, value)?),
            "d" => self.d = Some(parse(key, value)?),
            "k" => self.k = Some(parse(key, value)?),
            "ell" => self.ell = Some(parse(key, value)?),
            "ells" => self.ells = Some(parse_list(key, value)?),
            "sizes" => self.sizes = Some(parse_list(key, value)?),
            "trials" => self.trials = Some(parse(key, value)?),
            "samples" => self.samples = Some(parse(key, value)?),
            "seeds" => self.seeds = Some(parse(key, value)?),
            "runs" => self.runs = Some(parse(key, value)?),
            "pairs" => self.pairs = Some(parse(key, value)?),
            "failure_prob" => self.failure_prob = Some(parse(key, value)?),
            "out" => self.out = Some(value.into()),
            "csv" => self.csv = Some(value.into()),
            _ => {
                return Err(ConfigError::UnknownKey {
                    line: 0,
                    key: key.into(),
                })
            }
        }
        Ok(())
    }

    fn get(&self, key: &str) -> Option<String> {
        match key {
            "preset" => Some(self.preset.clone()),
            "seed" => Some(self.seed.to_string()),
            "n" => self.n.map(|v| v.to_string()),
            "p" => self.p.map(|v| format!("{v:?}")),
            "d" => self.d.map(|v| v.to_string()),
            "k" => self.k.map(|v| v.to_string()),
            "ell" => self.ell.map(|v| v.to_string()),
            "ells" => self.ells.as_deref().map(join),
            "sizes" => self.sizes.as_deref().map(join),
            "trials" => self.trials.map(|v| v.to_string()),
            "samples" => self.samples.map(|v| v.to_string()),
            "seeds" => self.seeds.map(|v| v.to_string()),
            "runs" => self.runs.map(|v| v.to_string()),
            "pairs" => self.pairs.map(|v| v.to_string()),
            "failure_prob" => self.failure_prob.map(|v| format!("{v:?}")),
            "out" => self.out.clone(),
            "csv" => self.csv.clone(),
            _ => None,
        }
    }

    pub fn from_text(text: &str) -> Result<Self, ConfigError> {
        let mut cfg = ExperimentConfig::default();
        let mut seen = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let l = raw.trim();
            if l.is_empty() || l.starts_with('#') {
                continue;
            }
            let (key, value) = l.split_once('=').ok_or(ConfigError::Malformed { line })?;
            let (key, value) = (key.trim(), value.trim());
            if !KEYS.contains(&key) {
                return Err(ConfigError::UnknownKey { line, key: key.into() });
            }
            if seen.contains(&key) {
                return Err(ConfigError::Repeated { line, key: key.into() });
            }
            seen.push(key);
            cfg.set(key, value)?;
        }
        if cfg.preset.is_empty() {
            return Err(ConfigError::MissingPreset);
        }
        Ok(cfg)
    }

    /// Keys that are set, one per line, in [`KEYS`] order.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for key in KEYS {
            if let Some(v) = self.get(key) {
                let _ = writeln!(out, "{key} = {v}");
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn roundtrip_is_faithful() {
        let text = "preset = thm-sparsifier\nseed = 7\nn = 1000\np = 0.06907755278982138\nsizes = 128,256\nfailure_prob = 0.05\n";
        let cfg = ExperimentConfig::from_text(text).unwrap();
        assert_eq!(cfg.p.unwrap().to_bits(), 0.06907755278982138f64.to_bits());
        assert_eq!(cfg.to_text(), text);
        assert_eq!(ExperimentConfig::from_text(&cfg.to_text()).unwrap(), cfg);
    }

    #[test]
    fn unknown_and_malformed_keys_rejected() {
        assert_eq!(
            ExperimentConfig::from_text("preset = x\nalpha = 3\n"),
            Err(ConfigError::UnknownKey { line: 2, key: "alpha".into() })
        );
        assert_eq!(
            ExperimentConfig::from_text("preset x\n"),
            Err(ConfigError::Malformed { line: 1 })
        );
        assert!(matches!(ExperimentConfig::from_text("seed = 1\n"), Err(ConfigError::MissingPreset)));
        assert!(matches!(
            ExperimentConfig::from_text("preset = x\nn = -4\n"),
            Err(ConfigError::BadValue { .. })
        ));
        assert!(matches!(
            ExperimentConfig::from_text("preset = x\nn = 4\nn = 5\n"),
            Err(ConfigError::Repeated { line: 3, .. })
        ));
    }
}
