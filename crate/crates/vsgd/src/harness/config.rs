//! Flat key-value config files: one `key = value` per line, `#` comments.
//!
//! Experiment file keys: `task`, `optimizer`, `epochs`, `seeds` (a count or a
//! comma list), `eta0`, `gamma`, `tau`, `mu`, `c`, `lambda`, `data_dir`,
//! `n_train`, `n_test`, `dim`, `classes`, `separation`, `jitter`, `hidden`
//! (comma list of hidden widths), `steps`, `sigma`, `theta0`, `period`,
//! `jump_scale`, `n0`.
//!
//! Grid file keys: `preset = paper` for the published search menus, or
//! explicit `eta0` / `gamma` / `tau` / `mu` comma lists (`gamma` accepts
//! `a/b` fractions and is in per-epoch units).

use super::{BenchError, ExperimentConfig, GridSpec, OptimizerKind, Task};
use std::path::{Path, PathBuf};

fn read_pairs(text: &str) -> Result<Vec<(String, String)>, BenchError> {
    let mut pairs = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return Err(BenchError::Usage(format!(
                "config line {}: expected 'key = value', got '{raw}'",
                lineno + 1
            )));
        };
        pairs.push((
            key.trim().to_ascii_lowercase(),
            value.trim().to_string(),
        ));
    }
    Ok(pairs)
}

fn parse_f64(key: &str, value: &str) -> Result<f64, BenchError> {
    value
        .parse::<f64>()
        .map_err(|_| BenchError::Usage(format!("{key}: not a number: '{value}'")))
}

fn parse_usize(key: &str, value: &str) -> Result<usize, BenchError> {
    value
        .parse::<usize>()
        .map_err(|_| BenchError::Usage(format!("{key}: not a count: '{value}'")))
}

/// A float or an `a/b` fraction.
fn parse_ratio(key: &str, value: &str) -> Result<f64, BenchError> {
    if let Some((num, den)) = value.split_once('/') {
        let n = parse_f64(key, num.trim())?;
        let d = parse_f64(key, den.trim())?;
        if d == 0.0 {
            return Err(BenchError::Usage(format!("{key}: division by zero")));
        }
        return Ok(n / d);
    }
    parse_f64(key, value)
}

fn parse_list<T>(
    key: &str,
    value: &str,
    item: impl Fn(&str, &str) -> Result<T, BenchError>,
) -> Result<Vec<T>, BenchError> {
    value
        .split(',')
        .map(|v| item(key, v.trim()))
        .collect::<Result<Vec<_>, _>>()
}

pub fn parse_config_str(text: &str) -> Result<ExperimentConfig, BenchError> {
    let pairs = read_pairs(text)?;
    let task = pairs
        .iter()
        .find(|(k, _)| k == "task")
        .map(|(_, v)| Task::parse(v))
        .transpose()?
        .ok_or_else(|| BenchError::Usage("config needs a 'task' key".into()))?;
    let optimizer = pairs
        .iter()
        .find(|(k, _)| k == "optimizer")
        .map(|(_, v)| OptimizerKind::parse(v))
        .transpose()?
        .ok_or_else(|| BenchError::Usage("config needs an 'optimizer' key".into()))?;

    let mut cfg = ExperimentConfig::for_task(task, optimizer);
    for (key, value) in &pairs {
        match key.as_str() {
            "task" | "optimizer" => {}
            "epochs" => cfg.epochs = parse_usize(key, value)?,
            "seeds" => {
                cfg.seeds = if value.contains(',') {
                    parse_list(key, value, |k, v| {
                        v.parse::<u64>()
                            .map_err(|_| BenchError::Usage(format!("{k}: bad seed '{v}'")))
                    })?
                } else {
                    let n = parse_usize(key, value)? as u64;
                    (0..n).collect()
                };
            }
            "eta0" => cfg.hyper.eta0 = Some(parse_f64(key, value)?),
            "gamma" => cfg.hyper.gamma = Some(parse_ratio(key, value)?),
            "tau" => cfg.hyper.tau = Some(parse_f64(key, value)?),
            "mu" => cfg.hyper.mu = Some(parse_f64(key, value)?),
            "c" => cfg.hyper.c = Some(parse_f64(key, value)?),
            "lambda" => cfg.lambda = parse_f64(key, value)?,
            "data_dir" => cfg.data_dir = Some(PathBuf::from(value)),
            "n_train" => cfg.n_train = parse_usize(key, value)?,
            "n_test" => cfg.n_test = parse_usize(key, value)?,
            "dim" => cfg.dim = parse_usize(key, value)?,
            "classes" => cfg.classes = parse_usize(key, value)?,
            "separation" => cfg.separation = parse_f64(key, value)?,
            "jitter" => cfg.jitter = parse_f64(key, value)?,
            "hidden" => cfg.hidden = parse_list(key, value, parse_usize)?,
            "steps" => cfg.quad_steps = parse_usize(key, value)?,
            "sigma" => cfg.quad_sigma = parse_f64(key, value)?,
            "theta0" => cfg.quad_theta0 = parse_f64(key, value)?,
            "period" => cfg.shift_period = parse_usize(key, value)? as u64,
            "jump_scale" => cfg.jump_scale = Some(parse_f64(key, value)?),
            "n0" => cfg.warmup_n0 = Some(parse_usize(key, value)?),
            other => {
                return Err(BenchError::Usage(format!("unknown config key '{other}'")));
            }
        }
    }
    Ok(cfg)
}

pub fn parse_config_file(path: impl AsRef<Path>) -> Result<ExperimentConfig, BenchError> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| {
        BenchError::Usage(format!("cannot read config {}: {e}", path.display()))
    })?;
    parse_config_str(&text)
}

pub fn parse_grid_str(text: &str) -> Result<GridSpec, BenchError> {
    let pairs = read_pairs(text)?;
    if pairs.iter().any(|(k, v)| k == "preset" && v == "paper") {
        let mut grid = GridSpec::published();
        // Explicit lists still override preset menus.
        for (key, value) in &pairs {
            apply_grid_key(&mut grid, key, value, true)?;
        }
        return Ok(grid);
    }
    let mut grid = GridSpec::empty();
    for (key, value) in &pairs {
        apply_grid_key(&mut grid, key, value, false)?;
    }
    if grid.eta0.is_empty() && grid.gamma.is_empty() && grid.tau.is_empty() && grid.mu.is_empty() {
        return Err(BenchError::Usage(
            "grid file defines no values; use 'preset = paper' or explicit lists".into(),
        ));
    }
    Ok(grid)
}

fn apply_grid_key(
    grid: &mut GridSpec,
    key: &str,
    value: &str,
    allow_preset: bool,
) -> Result<(), BenchError> {
    match key {
        "preset" if allow_preset => Ok(()),
        "eta0" => {
            grid.eta0 = parse_list(key, value, parse_f64)?;
            Ok(())
        }
        "gamma" => {
            grid.gamma = parse_list(key, value, parse_ratio)?;
            Ok(())
        }
        "tau" => {
            grid.tau = parse_list(key, value, parse_f64)?;
            Ok(())
        }
        "mu" => {
            grid.mu = parse_list(key, value, parse_f64)?;
            Ok(())
        }
        other => Err(BenchError::Usage(format!("unknown grid key '{other}'"))),
    }
}

pub fn parse_grid_file(path: impl AsRef<Path>) -> Result<GridSpec, BenchError> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path)
        .map_err(|e| BenchError::Usage(format!("cannot read grid {}: {e}", path.display())))?;
    parse_grid_str(&text)
}
