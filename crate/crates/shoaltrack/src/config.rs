//! `key = value` scenario files for `simulate`. `#` starts a comment; keys
//! left out keep their defaults.
//!
//! ```text
//! seed = 7
//! fish_count = 20
//! frames = 200
//! tank_width = 1280
//! tank_height = 720
//! initial_heading = horizontal
//! miss_rate = 0
//! ```

use std::collections::BTreeSet;

use shoaltrack_core::synth::{CorruptionModel, InitialHeading, ShoalScenario};

use crate::error::{IoError, Result};

#[derive(Debug, Clone, PartialEq, Default)]
pub struct SimulationConfig {
    pub scenario: ShoalScenario,
    pub corruption: CorruptionModel,
    /// Seed of the detection corruption stream. Defaults to `seed + 1`.
    pub corruption_seed: Option<u64>,
}

impl SimulationConfig {
    pub fn corruption_seed(&self) -> u64 {
        self.corruption_seed.unwrap_or(self.scenario.seed.wrapping_add(1))
    }
}

pub const KEYS: &[&str] = &[
    "seed",
    "fish_count",
    "frames",
    "tank_width",
    "tank_height",
    "speed_min",
    "speed_max",
    "heading_noise_sigma",
    "turn_probability",
    "box_size_min",
    "box_size_max",
    "initial_heading",
    "miss_rate",
    "fp_rate_per_frame",
    "jitter_sigma",
    "tp_score_mean",
    "fp_score_mean",
    "score_sigma",
    "fp_box_size_min",
    "fp_box_size_max",
    "corruption_seed",
];

fn real(v: &str, line: usize, key: &str) -> Result<f64> {
    match v.parse::<f64>() {
        Ok(x) if x.is_finite() => Ok(x),
        _ => Err(IoError::parse(line, format!("{key}: '{v}' is not a finite number"))),
    }
}

fn int<T: std::str::FromStr>(v: &str, line: usize, key: &str) -> Result<T> {
    v.parse().map_err(|_| IoError::parse(line, format!("{key}: '{v}' is not a non-negative integer")))
}

pub fn parse_simulation_config(text: &str) -> Result<SimulationConfig> {
    let mut cfg = SimulationConfig::default();
    let mut seen = BTreeSet::new();
    for (k, raw) in text.lines().enumerate() {
        let line = k + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let Some((key, value)) = content.split_once('=') else {
            return Err(IoError::parse(line, format!("expected 'key = value', found '{content}'")));
        };
        let (key, v) = (key.trim(), value.trim());
        if !KEYS.contains(&key) {
            return Err(IoError::parse(line, format!("unknown key '{key}'")));
        }
        if !seen.insert(key.to_string()) {
            return Err(IoError::parse(line, format!("key '{key}' given twice")));
        }
        let s = &mut cfg.scenario;
        let c = &mut cfg.corruption;
        match key {
            "seed" => s.seed = int(v, line, key)?,
            "fish_count" => s.fish_count = int(v, line, key)?,
            "frames" => s.frames = int(v, line, key)?,
            "tank_width" => s.tank.0 = real(v, line, key)?,
            "tank_height" => s.tank.1 = real(v, line, key)?,
            "speed_min" => s.speed_range.0 = real(v, line, key)?,
            "speed_max" => s.speed_range.1 = real(v, line, key)?,
            "heading_noise_sigma" => s.heading_noise_sigma = real(v, line, key)?,
            "turn_probability" => s.turn_probability = real(v, line, key)?,
            "box_size_min" => s.box_size_range.0 = real(v, line, key)?,
            "box_size_max" => s.box_size_range.1 = real(v, line, key)?,
            "initial_heading" => {
                s.initial_heading = match v {
                    "uniform" => InitialHeading::Uniform,
                    "horizontal" => InitialHeading::Horizontal,
                    _ => {
                        return Err(IoError::parse(
                            line,
                            format!("initial_heading: '{v}' is not uniform or horizontal"),
                        ))
                    }
                }
            }
            "miss_rate" => c.miss_rate = real(v, line, key)?,
            "fp_rate_per_frame" => c.fp_rate_per_frame = real(v, line, key)?,
            "jitter_sigma" => c.jitter_sigma = real(v, line, key)?,
            "tp_score_mean" => c.tp_score_mean = real(v, line, key)?,
            "fp_score_mean" => c.fp_score_mean = real(v, line, key)?,
            "score_sigma" => c.score_sigma = real(v, line, key)?,
            "fp_box_size_min" => c.fp_box_size.0 = real(v, line, key)?,
            "fp_box_size_max" => c.fp_box_size.1 = real(v, line, key)?,
            "corruption_seed" => cfg.corruption_seed = Some(int(v, line, key)?),
            _ => unreachable!("key list and match arms disagree"),
        }
    }
    Ok(cfg)
}
