//! Run configuration: defaults, then a `key=value` file, then flags.

use crate::CliError;
use intrinsic_metrics::experiments::DEFAULT_SEED;
use intrinsic_metrics::{MetricConfig, ScalingMode};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Command {
    /// Monte Carlo checks of the sampling and constant lemmas.
    Validate,
    /// Scaled sphere polytopes against the ball, with a rate fit.
    Theorem1,
    /// Expected missed volume of beta polytopes against its asymptotics.
    Rate,
    /// Local search for a better approximating polytope.
    Optimize,
    /// Closed-form constants.
    Constants,
    /// Expected length of a one-dimensional beta polytope.
    #[serde(rename = "appendixB")]
    AppendixB,
}

impl Command {
    pub const ALL: [Command; 6] = [
        Command::Validate,
        Command::Theorem1,
        Command::Rate,
        Command::Optimize,
        Command::Constants,
        Command::AppendixB,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Command::Validate => "validate",
            Command::Theorem1 => "theorem1",
            Command::Rate => "rate",
            Command::Optimize => "optimize",
            Command::Constants => "constants",
            Command::AppendixB => "appendixB",
        }
    }
}

impl fmt::Display for Command {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Command {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Command::ALL
            .into_iter()
            .find(|c| c.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| {
                let names: Vec<_> = Command::ALL.iter().map(|c| c.name()).collect();
                format!("unknown command `{s}` (expected one of {})", names.join(", "))
            })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

/// Every setting a run depends on. Written next to each output so the run
/// can be repeated.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub command: Command,
    pub n: Option<usize>,
    pub j: Option<usize>,
    pub n_grid: Vec<usize>,
    pub reps: usize,
    pub seed: u64,
    pub beta: Option<f64>,
    pub l: usize,
    pub budget: usize,
    pub cfg: MetricConfig,
    pub scaling: ScalingMode,
    pub output: Option<PathBuf>,
    pub format: Format,
}

/// Keys accepted in config files and as `--key value` flags.
pub const KEYS: [&str; 15] = [
    "n",
    "j",
    "N",
    "reps",
    "seed",
    "beta",
    "l",
    "budget",
    "subspaces",
    "volume_samples",
    "exact_low_dim",
    "scaling",
    "scaling_replicates",
    "output",
    "format",
];

const DEFAULT_REPS: usize = 100;
const DEFAULT_BUDGET: usize = 200;
const DEFAULT_SCALING_REPLICATES: usize = 2000;

/// Parses `key=value` lines. Blank lines and `#` comments are skipped.
pub fn parse_file_text(text: &str) -> Result<BTreeMap<String, String>, CliError> {
    let mut out = BTreeMap::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| CliError::Config(format!("line {}: expected key=value, got `{line}`", lineno + 1)))?;
        let key = key.trim();
        check_key(key)?;
        out.insert(key.to_string(), value.trim().to_string());
    }
    Ok(out)
}

fn check_key(key: &str) -> Result<(), CliError> {
    if KEYS.contains(&key) {
        Ok(())
    } else {
        Err(CliError::Config(format!(
            "unknown key `{key}`; valid keys are: {}",
            KEYS.join(", ")
        )))
    }
}

fn value<T: FromStr>(map: &BTreeMap<String, String>, key: &str) -> Result<Option<T>, CliError>
where
    T::Err: fmt::Display,
{
    map.get(key)
        .map(|raw| {
            raw.parse::<T>()
                .map_err(|e| CliError::Config(format!("malformed value for `{key}`: `{raw}` ({e})")))
        })
        .transpose()
}

fn grid(map: &BTreeMap<String, String>) -> Result<Vec<usize>, CliError> {
    let Some(raw) = map.get("N") else {
        return Ok(Vec::new());
    };
    raw.split(',')
        .map(|s| {
            s.trim()
                .parse::<usize>()
                .map_err(|e| CliError::Config(format!("malformed value for `N`: `{raw}` ({e})")))
        })
        .collect()
}

impl RunConfig {
    /// Builds a config from merged settings, later maps overriding earlier
    /// ones, then validates it for the command.
    pub fn from_layers(command: Command, layers: &[BTreeMap<String, String>]) -> Result<Self, CliError> {
        let mut map = BTreeMap::new();
        for layer in layers {
            for (k, v) in layer {
                check_key(k)?;
                map.insert(k.clone(), v.clone());
            }
        }
        let defaults = MetricConfig::default();
        let cfg = MetricConfig {
            subspace_samples: value(&map, "subspaces")?.unwrap_or(defaults.subspace_samples),
            volume_samples: value(&map, "volume_samples")?.unwrap_or(defaults.volume_samples),
            tol: defaults.tol,
            exact_low_dim: value(&map, "exact_low_dim")?.unwrap_or(defaults.exact_low_dim),
        };
        let replicates = value(&map, "scaling_replicates")?.unwrap_or(DEFAULT_SCALING_REPLICATES);
        let scaling = match map.get("scaling").map(String::as_str) {
            None | Some("asymptotic") => ScalingMode::Asymptotic,
            Some("empirical") => ScalingMode::Empirical {
                replicates,
                volume_samples: cfg.volume_samples,
            },
            Some("none") => ScalingMode::None,
            Some(other) => {
                return Err(CliError::Config(format!(
                    "malformed value for `scaling`: `{other}` (expected asymptotic, empirical or none)"
                )))
            }
        };
        let format = match map.get("format").map(String::as_str) {
            None | Some("csv") => Format::Csv,
            Some("json") => Format::Json,
            Some(other) => {
                return Err(CliError::Config(format!(
                    "malformed value for `format`: `{other}` (expected csv or json)"
                )))
            }
        };
        let rc = RunConfig {
            command,
            n: value(&map, "n")?,
            j: value(&map, "j")?,
            n_grid: grid(&map)?,
            reps: value(&map, "reps")?.unwrap_or(DEFAULT_REPS),
            seed: value(&map, "seed")?.unwrap_or(DEFAULT_SEED),
            beta: value(&map, "beta")?,
            l: value(&map, "l")?.unwrap_or(1),
            budget: value(&map, "budget")?.unwrap_or(DEFAULT_BUDGET),
            cfg,
            scaling,
            output: map.get("output").map(PathBuf::from),
            format,
        };
        rc.validate()?;
        Ok(rc)
    }

    fn require<T: Copy>(&self, v: Option<T>, key: &str) -> Result<T, CliError> {
        v.ok_or_else(|| CliError::Config(format!("`{}` requires `{key}`", self.command)))
    }

    fn require_grid(&self) -> Result<(), CliError> {
        if self.n_grid.is_empty() {
            return Err(CliError::Config(format!("`{}` requires `N`", self.command)));
        }
        Ok(())
    }

    pub fn dim(&self) -> Result<usize, CliError> {
        self.require(self.n, "n")
    }

    pub fn sub_dim(&self) -> Result<usize, CliError> {
        self.require(self.j, "j")
    }

    pub fn beta_value(&self) -> Result<f64, CliError> {
        self.require(self.beta, "beta")
    }

    /// Checks that the command has what it needs and that values are in
    /// range. Runs before any computation.
    pub fn validate(&self) -> Result<(), CliError> {
        let bad = |key: &str, why: &str| Err(CliError::Config(format!("invalid `{key}`: {why}")));
        if self.cfg.subspace_samples == 0 {
            return bad("subspaces", "must be at least 1");
        }
        if self.cfg.volume_samples == 0 {
            return bad("volume_samples", "must be at least 1");
        }
        if self.reps == 0 {
            return bad("reps", "must be at least 1");
        }
        if let ScalingMode::Empirical { replicates: 0, .. } = self.scaling {
            return bad("scaling_replicates", "must be at least 1");
        }
        if let Some(b) = self.beta {
            if !(b >= -1.0) || !b.is_finite() {
                return bad("beta", "must be a finite number ≥ −1");
            }
        }
        let nj = |rc: &Self| -> Result<(usize, usize), CliError> {
            let (n, j) = (rc.dim()?, rc.sub_dim()?);
            if n == 0 {
                return Err(CliError::Config("invalid `n`: must be at least 1".into()));
            }
            if j == 0 || j > n {
                return Err(CliError::Config(format!("invalid `j`: must lie in 1..={n}")));
            }
            Ok((n, j))
        };
        let grid_at_least = |rc: &Self, min: usize| -> Result<(), CliError> {
            rc.require_grid()?;
            if let Some(&small) = rc.n_grid.iter().find(|&&v| v < min) {
                return Err(CliError::Config(format!("invalid `N`: {small} is below the minimum {min}")));
            }
            Ok(())
        };
        match self.command {
            Command::Validate => {}
            Command::Theorem1 => {
                let (n, _) = nj(self)?;
                if n < 2 {
                    return bad("n", "the construction needs n ≥ 2");
                }
                grid_at_least(self, n + 1)?;
                if self.n_grid.len() < 3 {
                    return bad("N", "a rate fit needs at least 3 grid values");
                }
            }
            Command::Rate => {
                let n = self.dim()?;
                if n == 0 {
                    return bad("n", "must be at least 1");
                }
                if self.reps < 2 {
                    return bad("reps", "a missed-volume mean needs at least 2 replicates");
                }
                self.beta_value()?;
                grid_at_least(self, n + 1)?;
                if self.n_grid.len() < 2 {
                    return bad("N", "a rate fit needs at least 2 grid values");
                }
            }
            Command::Optimize => {
                let (n, _) = nj(self)?;
                if n < 2 {
                    return bad("n", "the search needs n ≥ 2");
                }
                grid_at_least(self, n + 1)?;
                if self.n_grid.len() != 1 {
                    return bad("N", "give a single vertex count");
                }
            }
            Command::Constants => {
                let (_, _) = nj(self)?;
                if self.beta_value()? <= -1.0 && self.dim()? == 1 {
                    return bad("beta", "n = 1 needs β > −1");
                }
                if self.l == 0 {
                    return bad("l", "must be at least 1");
                }
            }
            Command::AppendixB => {
                if self.beta_value()? <= -1.0 {
                    return bad("beta", "must exceed −1");
                }
                grid_at_least(self, 1)?;
            }
        }
        Ok(())
    }

    /// Settings in `key=value` form, readable back by [`parse_file_text`].
    pub fn to_pairs(&self) -> BTreeMap<String, String> {
        let mut m = BTreeMap::new();
        if let Some(n) = self.n {
            m.insert("n".into(), n.to_string());
        }
        if let Some(j) = self.j {
            m.insert("j".into(), j.to_string());
        }
        if !self.n_grid.is_empty() {
            let g: Vec<String> = self.n_grid.iter().map(|v| v.to_string()).collect();
            m.insert("N".into(), g.join(","));
        }
        if let Some(b) = self.beta {
            m.insert("beta".into(), format!("{b:?}"));
        }
        m.insert("reps".into(), self.reps.to_string());
        m.insert("seed".into(), self.seed.to_string());
        m.insert("l".into(), self.l.to_string());
        m.insert("budget".into(), self.budget.to_string());
        m.insert("subspaces".into(), self.cfg.subspace_samples.to_string());
        m.insert("volume_samples".into(), self.cfg.volume_samples.to_string());
        m.insert("exact_low_dim".into(), self.cfg.exact_low_dim.to_string());
        m.insert("scaling".into(), self.scaling.to_string());
        if let ScalingMode::Empirical { replicates, .. } = self.scaling {
            m.insert("scaling_replicates".into(), replicates.to_string());
        }
        m
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn flags(pairs: &[(&str, &str)]) -> BTreeMap<String, String> {
        pairs.iter().map(|(k, v)| (k.to_string(), v.to_string())).collect()
    }

    #[test]
    fn file_lines_and_comments() {
        let m = parse_file_text("# header\nn = 4\n\nj=2 # trailing\nN=50,100\n").unwrap();
        assert_eq!(m["n"], "4");
        assert_eq!(m["j"], "2");
        assert_eq!(m["N"], "50,100");
    }

    #[test]
    fn unknown_key_lists_valid_keys() {
        let err = parse_file_text("dimension=3\n").unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("dimension"));
        assert!(msg.contains("volume_samples"));
        assert_eq!(err.exit_code(), 2);
    }

    #[test]
    fn malformed_value_names_the_key() {
        let err = RunConfig::from_layers(Command::Theorem1, &[flags(&[("n", "four")])]).unwrap_err();
        assert!(err.to_string().contains("`n`"));
        assert_eq!(err.exit_code(), 2);
    }

    #[test]
    fn later_layers_win() {
        let file = flags(&[("n", "3"), ("j", "1"), ("N", "10,20,30"), ("seed", "1")]);
        let cli = flags(&[("seed", "9")]);
        let rc = RunConfig::from_layers(Command::Theorem1, &[file, cli]).unwrap();
        assert_eq!(rc.seed, 9);
        assert_eq!(rc.n, Some(3));
    }

    #[test]
    fn pairs_round_trip() {
        let file = flags(&[
            ("n", "3"),
            ("j", "3"),
            ("N", "10,20,30"),
            ("scaling", "empirical"),
            ("scaling_replicates", "17"),
            ("beta", "0.25"),
        ]);
        let rc = RunConfig::from_layers(Command::Theorem1, &[file]).unwrap();
        let again = RunConfig::from_layers(Command::Theorem1, &[rc.to_pairs()]).unwrap();
        assert_eq!(rc, again);
    }

    #[test]
    fn per_command_requirements() {
        let missing = RunConfig::from_layers(Command::Theorem1, &[flags(&[("j", "2"), ("N", "10,20,30")])]);
        assert!(missing.unwrap_err().to_string().contains("`n`"));
        let short = RunConfig::from_layers(Command::Theorem1, &[flags(&[("n", "3"), ("j", "2"), ("N", "10,20")])]);
        assert!(short.is_err());
        let small = RunConfig::from_layers(Command::Theorem1, &[flags(&[("n", "3"), ("j", "2"), ("N", "3,10,20")])]);
        assert!(small.unwrap_err().to_string().contains("`N`"));
        assert!(RunConfig::from_layers(Command::Validate, &[]).is_ok());
        assert!(RunConfig::from_layers(Command::AppendixB, &[flags(&[("N", "5")])]).is_err());
    }
}
