//! Flat `key = value` experiment files.
//!
//! ```text
//! # mu sweep at the reference configuration
//! vary = mu
//! values = 0.1, 0.2, 0.3
//! measures = Walk, Forest
//! methods = Spectral
//! replicates = 10
//! ```
//!
//! Generator keys (`n`, `m`, `tau1`, `tau2`, `cmin`, `cmax`, `mu`, `kmax`,
//! `max_retries`) set the fixed base parameters. `values` defaults to the
//! standard grid of the varied parameter; size limits are written
//! `cmin:cmax`.

use std::collections::HashSet;
use std::str::FromStr;

use super::{ExperimentConfig, HarnessError, Method, Vary};
use crate::clustering::RowScaling;
use crate::kernels::Measure;

fn parse_num<T: FromStr>(key: &str, value: &str) -> Result<T, String> {
    value
        .parse()
        .map_err(|_| format!("'{value}' is not a valid value for {key}"))
}

fn parse_list<T>(value: &str, f: impl Fn(&str) -> Result<T, String>) -> Result<Vec<T>, String> {
    let items: Vec<&str> = value
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .collect();
    if items.is_empty() {
        return Err("empty list".into());
    }
    items.into_iter().map(f).collect()
}

fn parse_bool(key: &str, value: &str) -> Result<bool, String> {
    match value.to_ascii_lowercase().as_str() {
        "true" | "yes" | "1" => Ok(true),
        "false" | "no" | "0" => Ok(false),
        _ => Err(format!("'{value}' is not a boolean for {key}")),
    }
}

pub fn parse_config(text: &str) -> Result<ExperimentConfig, HarnessError> {
    let mut config = ExperimentConfig::default();
    let mut seen = HashSet::new();
    let mut raw_values: Option<(usize, String)> = None;
    let mut vary_set = false;

    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let err = |message: String| HarnessError::Config {
            line: line_no,
            message,
        };
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| err(format!("expected 'key = value', got '{line}'")))?;
        let (key, value) = (key.trim().to_ascii_lowercase(), value.trim());
        if !seen.insert(key.clone()) {
            return Err(err(format!("duplicate key '{key}'")));
        }
        let base = &mut config.base;
        let applied: Result<(), String> = match key.as_str() {
            "n" => parse_num(&key, value).map(|v| base.n = v),
            "m" => parse_num(&key, value).map(|v| base.m = v),
            "tau1" => parse_num(&key, value).map(|v| base.tau1 = v),
            "tau2" => parse_num(&key, value).map(|v| base.tau2 = v),
            "cmin" => parse_num(&key, value).map(|v| base.cmin = v),
            "cmax" => parse_num(&key, value).map(|v| base.cmax = v),
            "mu" => parse_num(&key, value).map(|v| base.mu = v),
            "kmax" => parse_num(&key, value).map(|v| base.kmax = Some(v)),
            "max_retries" => parse_num(&key, value).map(|v| base.max_retries = v),
            "vary" => Vary::from_str(value).map(|v| {
                config.vary = v;
                vary_set = true;
            }),
            "values" => {
                raw_values = Some((line_no, value.to_string()));
                Ok(())
            }
            "measures" => parse_list(value, |s| s.parse::<Measure>().map_err(|e| e.to_string()))
                .map(|v| config.measures = v),
            "methods" => parse_list(value, Method::from_str).map(|v| config.methods = v),
            "replicates" => parse_num(&key, value).map(|v| config.replicates = v),
            "alpha_points" => parse_num(&key, value).map(|v| config.alpha_points = v),
            "alpha_max" => parse_num(&key, value).map(|v| config.alpha_max = v),
            "kmeans_seed" => parse_num(&key, value).map(|v| config.kmeans_seed = v),
            "master_seed" => parse_num(&key, value).map(|v| config.master_seed = v),
            "kmeans_restarts" => parse_num(&key, value).map(|v| config.kmeans_restarts = v),
            "ward_max" => parse_num(&key, value).map(|v| config.ward_max = v),
            "skip_ceiling" => parse_num(&key, value).map(|v| config.skip_ceiling = v),
            "embedding_rows" => match value.to_ascii_lowercase().as_str() {
                "unit" => {
                    config.embedding_rows = RowScaling::UnitRows;
                    Ok(())
                }
                "raw" => {
                    config.embedding_rows = RowScaling::Raw;
                    Ok(())
                }
                _ => Err(format!(
                    "embedding_rows must be 'unit' or 'raw', got '{value}'"
                )),
            },
            "verify_equivalence" => parse_bool(&key, value).map(|v| config.verify_equivalence = v),
            _ => Err(format!("unknown key '{key}'")),
        };
        applied.map_err(err)?;
    }

    config.values = match raw_values {
        Some((line, text)) => parse_list(&text, |s| config.vary.parse_value(s))
            .map_err(|message| HarnessError::Config { line, message })?,
        None if vary_set => config.vary.standard_values(),
        None => config.values,
    };
    config.validate()?;
    Ok(config)
}
