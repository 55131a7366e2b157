//! Experiment configuration: defaults, flat key = value config files, and
//! command-line overrides.
//!
//! Precedence is defaults < config file < flags; flags carry the same
//! names as the file keys. Angles are radians unless a value carries a
//! `deg` suffix.

use std::path::PathBuf;

use quadbell_core::bell::RunConfig;
use quadbell_core::lhv::Representation;
use quadbell_core::oracle::BellAngles;
use quadbell_core::SqueezeParameter;

/// Keys accepted in config files, mirrored one-to-one by flags.
pub const CONFIG_KEYS: [&str; 11] = [
    "chi", "chi_grid", "angles", "representation", "samples", "seed", "chunks", "epsilon",
    "out_csv", "out_json", "dump_cap",
];

/// Command-line overrides; every field mirrors a config-file key.
#[derive(Debug, Clone, Default, clap::Args)]
pub struct Overrides {
    /// Squeeze strength χ (single value).
    #[arg(long, global = true, value_name = "CHI", conflicts_with = "chi_grid")]
    pub chi: Option<f64>,

    /// Comma-separated χ grid, e.g. 0.1,0.5,1.0.
    #[arg(long, global = true, value_name = "LIST")]
    pub chi_grid: Option<String>,

    /// Analyzer angles θ_A,θ_A',θ_B,θ_B' in radians; append `deg` for
    /// degrees (e.g. 0,45deg,22.5deg,67.5deg).
    #[arg(long, global = true, value_name = "A,A',B,B'")]
    pub angles: Option<String>,

    /// Count-rate representation: eq3 (dark-noise subtracted) or eq4
    /// (intensity with -1/2 offsets).
    #[arg(long, global = true, value_name = "REP")]
    pub representation: Option<String>,

    /// Monte Carlo samples (per angle pair for correlation commands).
    #[arg(long, global = true)]
    pub samples: Option<u64>,

    /// Master seed for the random streams.
    #[arg(long, global = true)]
    pub seed: Option<u64>,

    /// Number of chunks (also substreams) per estimate; >= 32 for
    /// error-bar commands.
    #[arg(long, global = true)]
    pub chunks: Option<u32>,

    /// Relative epsilon of the degenerate-denominator guard.
    #[arg(long, global = true)]
    pub epsilon: Option<f64>,

    /// CSV output path (stdout when omitted).
    #[arg(long, global = true, value_name = "PATH")]
    pub out_csv: Option<PathBuf>,

    /// JSON summary output path (omitted: no JSON).
    #[arg(long, global = true, value_name = "PATH")]
    pub out_json: Option<PathBuf>,

    /// Maximum rows sample-dump will write.
    #[arg(long, global = true)]
    pub dump_cap: Option<u64>,
}

/// Fully resolved experiment configuration.
#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub chi_grid: Vec<f64>,
    pub angles: BellAngles,
    pub representation: Representation,
    pub samples: u64,
    pub seed: u64,
    pub chunks: u32,
    pub epsilon: f64,
    pub out_csv: Option<PathBuf>,
    pub out_json: Option<PathBuf>,
    pub dump_cap: u64,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            chi_grid: vec![0.2],
            angles: BellAngles::default(),
            representation: Representation::WignerIntensity,
            samples: 1_000_000,
            seed: 7,
            chunks: 64,
            epsilon: quadbell_core::bell::DEFAULT_EPSILON,
            out_csv: None,
            out_json: None,
            dump_cap: 1_000_000,
        }
    }
}

impl ExperimentConfig {
    /// Merge defaults, an optional config file and the flag overrides.
    pub fn resolve(file_text: Option<&str>, overrides: &Overrides) -> Result<Self, String> {
        let mut cfg = Self::default();
        let mut file_chi: Option<f64> = None;
        let mut file_grid: Option<Vec<f64>> = None;

        if let Some(text) = file_text {
            let entries = parse_key_values(text)?;
            for (key, value) in &entries {
                match key.as_str() {
                    "chi" => file_chi = Some(parse_number(value, "chi")?),
                    "chi_grid" => file_grid = Some(parse_grid(value)?),
                    "angles" => cfg.angles = parse_angles(value)?,
                    "representation" => cfg.representation = value.parse()?,
                    "samples" => cfg.samples = parse_integer(value, "samples")?,
                    "seed" => cfg.seed = parse_integer(value, "seed")?,
                    "chunks" => {
                        cfg.chunks = parse_integer(value, "chunks")?
                            .try_into()
                            .map_err(|_| "chunks out of range".to_string())?
                    }
                    "epsilon" => cfg.epsilon = parse_number(value, "epsilon")?,
                    "out_csv" => cfg.out_csv = Some(PathBuf::from(value)),
                    "out_json" => cfg.out_json = Some(PathBuf::from(value)),
                    "dump_cap" => cfg.dump_cap = parse_integer(value, "dump_cap")?,
                    other => return Err(format!("unknown config key {other:?}")),
                }
            }
            if file_chi.is_some() && file_grid.is_some() {
                return Err("config sets both chi and chi_grid".into());
            }
        }

        if overrides.chi.is_some() && overrides.chi_grid.is_some() {
            return Err("--chi conflicts with --chi-grid".into());
        }
        let flag_grid = overrides
            .chi_grid
            .as_deref()
            .map(parse_grid)
            .transpose()?;

        cfg.chi_grid = match (overrides.chi, flag_grid, file_chi, file_grid) {
            (Some(chi), _, _, _) => vec![chi],
            (None, Some(grid), _, _) => grid,
            (None, None, Some(chi), _) => vec![chi],
            (None, None, None, Some(grid)) => grid,
            _ => cfg.chi_grid,
        };

        if let Some(angles) = overrides.angles.as_deref() {
            cfg.angles = parse_angles(angles)?;
        }
        if let Some(rep) = overrides.representation.as_deref() {
            cfg.representation = rep.parse()?;
        }
        if let Some(samples) = overrides.samples {
            cfg.samples = samples;
        }
        if let Some(seed) = overrides.seed {
            cfg.seed = seed;
        }
        if let Some(chunks) = overrides.chunks {
            cfg.chunks = chunks;
        }
        if let Some(epsilon) = overrides.epsilon {
            cfg.epsilon = epsilon;
        }
        if overrides.out_csv.is_some() {
            cfg.out_csv = overrides.out_csv.clone();
        }
        if overrides.out_json.is_some() {
            cfg.out_json = overrides.out_json.clone();
        }
        if let Some(cap) = overrides.dump_cap {
            cfg.dump_cap = cap;
        }

        cfg.check_common()?;
        Ok(cfg)
    }

    fn check_common(&self) -> Result<(), String> {
        if self.chi_grid.is_empty() {
            return Err("chi grid is empty".into());
        }
        for &chi in &self.chi_grid {
            SqueezeParameter::new(chi).map_err(|e| e.to_string())?;
        }
        if !self.angles.is_finite() {
            return Err("angles must be finite".into());
        }
        if !self.epsilon.is_finite() || self.epsilon < 0.0 {
            return Err("epsilon must be finite and >= 0".into());
        }
        if self.samples == 0 {
            return Err("samples must be >= 1".into());
        }
        Ok(())
    }

    /// Extra constraints for the commands that produce error bars.
    pub fn check_error_bars(&self) -> Result<(), String> {
        if self.chunks < 32 {
            return Err(format!(
                "error-bar commands need chunks >= 32, got {}",
                self.chunks
            ));
        }
        if self.samples < self.chunks as u64 {
            return Err(format!(
                "need samples >= chunks, got {} < {}",
                self.samples, self.chunks
            ));
        }
        Ok(())
    }

    pub fn run_config(&self) -> RunConfig {
        RunConfig {
            samples: self.samples,
            chunks: self.chunks,
            epsilon: self.epsilon,
        }
    }

    pub fn angle_list(&self) -> [f64; 4] {
        [
            self.angles.theta_a,
            self.angles.theta_a_prime,
            self.angles.theta_b,
            self.angles.theta_b_prime,
        ]
    }
}

/// Parse `key = value` lines; `#` starts a comment, blank lines ignored.
pub fn parse_key_values(text: &str) -> Result<Vec<(String, String)>, String> {
    let mut entries = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return Err(format!("line {}: expected key = value", lineno + 1));
        };
        let key = key.trim().to_string();
        let value = value.trim().to_string();
        if !CONFIG_KEYS.contains(&key.as_str()) {
            return Err(format!("line {}: unknown config key {key:?}", lineno + 1));
        }
        if value.is_empty() {
            return Err(format!("line {}: empty value for {key:?}", lineno + 1));
        }
        entries.push((key, value));
    }
    Ok(entries)
}

fn parse_number(value: &str, key: &str) -> Result<f64, String> {
    value
        .trim()
        .parse::<f64>()
        .map_err(|_| format!("invalid number for {key}: {value:?}"))
}

fn parse_integer(value: &str, key: &str) -> Result<u64, String> {
    value
        .trim()
        .parse::<u64>()
        .map_err(|_| format!("invalid integer for {key}: {value:?}"))
}

fn parse_grid(value: &str) -> Result<Vec<f64>, String> {
    let grid: Result<Vec<f64>, String> = value
        .split(',')
        .map(|part| parse_number(part, "chi_grid"))
        .collect();
    let grid = grid?;
    if grid.is_empty() {
        return Err("chi_grid is empty".into());
    }
    Ok(grid)
}

/// One angle, radians by default, degrees with a `deg` suffix.
pub fn parse_angle(value: &str) -> Result<f64, String> {
    let trimmed = value.trim();
    if let Some(stripped) = trimmed.strip_suffix("deg") {
        Ok(parse_number(stripped, "angle")? * std::f64::consts::PI / 180.0)
    } else {
        parse_number(trimmed, "angle")
    }
}

pub fn parse_angles(value: &str) -> Result<BellAngles, String> {
    let parts: Vec<&str> = value.split(',').collect();
    if parts.len() != 4 {
        return Err(format!(
            "angles need exactly 4 comma-separated values, got {}",
            parts.len()
        ));
    }
    let mut out = [0.0; 4];
    for (slot, part) in parts.iter().enumerate() {
        out[slot] = parse_angle(part)?;
    }
    Ok(BellAngles::new(out[0], out[1], out[2], out[3]))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_resolve() {
        let cfg = ExperimentConfig::resolve(None, &Overrides::default()).unwrap();
        assert_eq!(cfg.chi_grid, vec![0.2]);
        assert_eq!(cfg.samples, 1_000_000);
        assert_eq!(cfg.representation, Representation::WignerIntensity);
    }

    #[test]
    fn file_and_flags_merge_with_flag_precedence() {
        let file = "chi = 0.5\nsamples = 1000\nrepresentation = eq3\n# comment\nseed = 9\n";
        let overrides = Overrides {
            samples: Some(2000),
            ..Default::default()
        };
        let cfg = ExperimentConfig::resolve(Some(file), &overrides).unwrap();
        assert_eq!(cfg.chi_grid, vec![0.5]);
        assert_eq!(cfg.samples, 2000);
        assert_eq!(cfg.seed, 9);
        assert_eq!(cfg.representation, Representation::QuadratureDerived);
    }

    #[test]
    fn rejects_unknown_keys_and_bad_lines() {
        assert!(parse_key_values("bogus = 1").is_err());
        assert!(parse_key_values("chi 0.5").is_err());
        assert!(ExperimentConfig::resolve(Some("chi = -1"), &Overrides::default()).is_err());
        assert!(ExperimentConfig::resolve(
            Some("chi = 0.1\nchi_grid = 0.1,0.2"),
            &Overrides::default()
        )
        .is_err());
    }

    #[test]
    fn angle_parsing_with_degree_suffix() {
        let angles = parse_angles("0,45deg,22.5deg,67.5deg").unwrap();
        assert!((angles.theta_a_prime - std::f64::consts::FRAC_PI_4).abs() < 1e-15);
        assert!((angles.theta_b - std::f64::consts::FRAC_PI_8).abs() < 1e-15);
        assert!((angles.theta_b_prime - 3.0 * std::f64::consts::FRAC_PI_8).abs() < 1e-15);
        assert!(parse_angles("1,2,3").is_err());
        assert!(parse_angles("1,2,3,nope").is_err());
    }

    #[test]
    fn error_bar_constraints() {
        let few_chunks = ExperimentConfig {
            chunks: 16,
            ..Default::default()
        };
        assert!(few_chunks.check_error_bars().is_err());
        let few_samples = ExperimentConfig {
            samples: 10,
            ..Default::default()
        };
        assert!(few_samples.check_error_bars().is_err());
    }
}
