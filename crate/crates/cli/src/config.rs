//! Flat key-value experiment configuration.
//!
//! The on-disk form is one `key = value` pair per line (`#` comments
//! allowed). The same map is echoed verbatim into the JSON run manifest,
//! and a manifest file is itself accepted wherever a config is expected,
//! so a finished run can be replayed from its manifest alone.
//!
//! Keys: `experiment` (decay | approx | recognize), `graphon`
//! (flat | steep | tight), `p`, `d`, `c`, `n_grid` (comma separated,
//! strictly increasing), `replicates`, `seed`, `ordering`
//! (natural | spectral | both), `restarts`, `workers`, `max_n`,
//! `timings` (on | off).

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use robinson_gauge::GraphonSpec;

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExperimentKind {
    Decay,
    Approx,
    Recognize,
}

impl ExperimentKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            ExperimentKind::Decay => "decay",
            ExperimentKind::Approx => "approx",
            ExperimentKind::Recognize => "recognize",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GraphonChoice {
    Flat { p: f64, d: f64 },
    Steep { p: f64, c: f64 },
    Tight,
}

impl GraphonChoice {
    pub fn spec(&self) -> Result<GraphonSpec, CliError> {
        Ok(match *self {
            GraphonChoice::Flat { p, d } => GraphonSpec::flat(p, d)?,
            GraphonChoice::Steep { p, c } => GraphonSpec::steep(p, c)?,
            GraphonChoice::Tight => GraphonSpec::TightExample,
        })
    }

    pub fn name(&self) -> &'static str {
        match self {
            GraphonChoice::Flat { .. } => "flat",
            GraphonChoice::Steep { .. } => "steep",
            GraphonChoice::Tight => "tight",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OrderingChoice {
    Natural,
    Spectral,
    Both,
}

impl OrderingChoice {
    pub fn as_str(&self) -> &'static str {
        match self {
            OrderingChoice::Natural => "natural",
            OrderingChoice::Spectral => "spectral",
            OrderingChoice::Both => "both",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub kind: ExperimentKind,
    pub graphon: GraphonChoice,
    pub n_grid: Vec<usize>,
    pub replicates: usize,
    pub seed: u64,
    pub ordering: OrderingChoice,
    /// Hill-climb starts for the gauge lower estimator (0 = structured
    /// candidate scan only, which keeps the estimator uniform in `n`).
    pub restarts: usize,
    pub workers: usize,
    pub max_n: usize,
    /// Write measured per-record wall time. Off by default so identical
    /// configs produce byte-identical CSVs.
    pub timings: bool,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            kind: ExperimentKind::Decay,
            graphon: GraphonChoice::Flat { p: 0.5, d: 0.3 },
            n_grid: vec![256, 512, 1024, 2048, 4096],
            replicates: 10,
            seed: 1,
            ordering: OrderingChoice::Natural,
            restarts: 0,
            workers: 4,
            max_n: 8192,
            timings: false,
        }
    }
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<(), CliError> {
        if self.replicates == 0 {
            return Err(CliError::config("replicates must be >= 1"));
        }
        if self.n_grid.is_empty() {
            return Err(CliError::config("n_grid must not be empty"));
        }
        if !self.n_grid.windows(2).all(|w| w[0] < w[1]) {
            return Err(CliError::config("n_grid must be strictly increasing"));
        }
        if let Some(&max) = self.n_grid.last() {
            if max > self.max_n {
                return Err(CliError::config(format!(
                    "n = {max} exceeds max_n = {} (raise max_n explicitly)",
                    self.max_n
                )));
            }
        }
        if self.kind == ExperimentKind::Decay && matches!(self.graphon, GraphonChoice::Tight) {
            return Err(CliError::config(
                "decay runs need a flat or steep graphon (tight never decays)",
            ));
        }
        self.graphon.spec().map(|_| ())
    }

    /// Canonical key-value form; echoed into manifests byte for byte.
    pub fn to_map(&self) -> BTreeMap<String, String> {
        let mut m = BTreeMap::new();
        m.insert("experiment".into(), self.kind.as_str().into());
        m.insert("graphon".into(), self.graphon.name().into());
        match self.graphon {
            GraphonChoice::Flat { p, d } => {
                m.insert("p".into(), format!("{p}"));
                m.insert("d".into(), format!("{d}"));
            }
            GraphonChoice::Steep { p, c } => {
                m.insert("p".into(), format!("{p}"));
                m.insert("c".into(), format!("{c}"));
            }
            GraphonChoice::Tight => {}
        }
        m.insert(
            "n_grid".into(),
            self.n_grid
                .iter()
                .map(|n| n.to_string())
                .collect::<Vec<_>>()
                .join(","),
        );
        m.insert("replicates".into(), self.replicates.to_string());
        m.insert("seed".into(), self.seed.to_string());
        m.insert("ordering".into(), self.ordering.as_str().into());
        m.insert("restarts".into(), self.restarts.to_string());
        m.insert("workers".into(), self.workers.to_string());
        m.insert("max_n".into(), self.max_n.to_string());
        m.insert("timings".into(), if self.timings { "on" } else { "off" }.into());
        m
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for (k, v) in self.to_map() {
            let _ = writeln!(out, "{k} = {v}");
        }
        out
    }

    pub fn from_map(map: &BTreeMap<String, String>) -> Result<Self, CliError> {
        let mut cfg = ExperimentConfig::default();
        let get = |k: &str| map.get(k).map(String::as_str);
        if let Some(kind) = get("experiment") {
            cfg.kind = match kind {
                "decay" => ExperimentKind::Decay,
                "approx" => ExperimentKind::Approx,
                "recognize" => ExperimentKind::Recognize,
                other => return Err(CliError::config(format!("unknown experiment '{other}'"))),
            };
        }
        let parse_f = |k: &str| -> Result<Option<f64>, CliError> {
            get(k)
                .map(|v| {
                    v.parse::<f64>()
                        .map_err(|_| CliError::config(format!("bad float for '{k}': {v}")))
                })
                .transpose()
        };
        let parse_u = |k: &str| -> Result<Option<u64>, CliError> {
            get(k)
                .map(|v| {
                    v.parse::<u64>()
                        .map_err(|_| CliError::config(format!("bad integer for '{k}': {v}")))
                })
                .transpose()
        };
        if let Some(name) = get("graphon") {
            cfg.graphon = match name {
                "flat" => GraphonChoice::Flat {
                    p: parse_f("p")?.unwrap_or(0.5),
                    d: parse_f("d")?.unwrap_or(0.3),
                },
                "steep" => GraphonChoice::Steep {
                    p: parse_f("p")?.unwrap_or(0.9),
                    c: parse_f("c")?.unwrap_or(0.8),
                },
                "tight" => GraphonChoice::Tight,
                other => return Err(CliError::config(format!("unknown graphon '{other}'"))),
            };
        }
        if let Some(grid) = get("n_grid") {
            let ns: Result<Vec<usize>, _> = grid
                .split(',')
                .map(|s| s.trim().parse::<usize>())
                .collect();
            cfg.n_grid = ns.map_err(|_| CliError::config(format!("bad n_grid: {grid}")))?;
        }
        if let Some(v) = parse_u("replicates")? {
            cfg.replicates = v as usize;
        }
        if let Some(v) = parse_u("seed")? {
            cfg.seed = v;
        }
        if let Some(ord) = get("ordering") {
            cfg.ordering = match ord {
                "natural" => OrderingChoice::Natural,
                "spectral" => OrderingChoice::Spectral,
                "both" => OrderingChoice::Both,
                other => return Err(CliError::config(format!("unknown ordering '{other}'"))),
            };
        }
        if let Some(v) = parse_u("restarts")? {
            cfg.restarts = v as usize;
        }
        if let Some(v) = parse_u("workers")? {
            cfg.workers = (v as usize).max(1);
        }
        if let Some(v) = parse_u("max_n")? {
            cfg.max_n = v as usize;
        }
        if let Some(v) = get("timings") {
            cfg.timings = match v {
                "on" | "true" | "1" => true,
                "off" | "false" | "0" => false,
                other => return Err(CliError::config(format!("bad timings flag '{other}'"))),
            };
        }
        for key in map.keys() {
            const KNOWN: &[&str] = &[
                "experiment",
                "graphon",
                "p",
                "d",
                "c",
                "n_grid",
                "replicates",
                "seed",
                "ordering",
                "restarts",
                "workers",
                "max_n",
                "timings",
            ];
            if !KNOWN.contains(&key.as_str()) {
                return Err(CliError::config(format!("unknown config key '{key}'")));
            }
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn parse_text(text: &str) -> Result<Self, CliError> {
        let trimmed = text.trim_start();
        if trimmed.starts_with('{') {
            // a JSON run manifest; replay from its embedded config
            let manifest: serde_json::Value = serde_json::from_str(trimmed)
                .map_err(|e| CliError::config(format!("bad manifest JSON: {e}")))?;
            let cfg_map = manifest
                .get("config")
                .and_then(|v| v.as_object())
                .ok_or_else(|| CliError::config("manifest has no 'config' object"))?;
            let mut map = BTreeMap::new();
            for (k, v) in cfg_map {
                let s = v
                    .as_str()
                    .ok_or_else(|| CliError::config("manifest config values must be strings"))?;
                map.insert(k.clone(), s.to_string());
            }
            return Self::from_map(&map);
        }
        let mut map = BTreeMap::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (k, v) = line.split_once('=').ok_or_else(|| {
                CliError::config(format!("line {}: expected 'key = value'", lineno + 1))
            })?;
            map.insert(k.trim().to_string(), v.trim().to_string());
        }
        Self::from_map(&map)
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        Self::parse_text(&std::fs::read_to_string(path)?)
    }
}
