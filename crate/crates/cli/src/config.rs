use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::experiments;

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    experiment: String,
    seed: Option<u64>,
    output_dir: Option<PathBuf>,
    samples: Option<usize>,
    #[serde(default)]
    grid: RawGrid,
    #[serde(default)]
    kernel: RawKernel,
    #[serde(default)]
    ladder: RawLadder,
    #[serde(default)]
    tolerances: RawTolerances,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawGrid {
    omega: Option<f64>,
    n: Option<usize>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawKernel {
    kind: Option<String>,
    beta: Option<f64>,
    orders: Option<Vec<f64>>,
    alpha: Option<f64>,
    c: Option<f64>,
    phi: Option<Phi>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawLadder {
    y: Option<Vec<f64>>,
    y_points: Option<usize>,
    x_points: Option<usize>,
    n_max: Option<usize>,
    min_count: Option<usize>,
    xi: Option<Vec<f64>>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawTolerances {
    distance: Option<f64>,
    quasinilpotent: Option<f64>,
    relative: Option<f64>,
    band: Option<f64>,
    witness: Option<f64>,
}

/// Multiplication symbol: a constant or one of the named functions `x`, `x^2`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Phi {
    Constant(f64),
    Named(String),
}

impl Phi {
    pub fn eval(&self, x: f64) -> f64 {
        match self {
            Phi::Constant(c) => *c,
            Phi::Named(name) if name == "x" => x,
            Phi::Named(_) => x * x,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Tolerances {
    pub distance: f64,
    pub quasinilpotent: f64,
    pub relative: f64,
    pub band: f64,
    /// `None`: 5% of the larger side modulus.
    pub witness: Option<f64>,
}

/// Everything an experiment reads, with defaults filled in; echoed verbatim
/// into the summary.
#[derive(Debug, Clone, Serialize)]
pub struct Config {
    pub experiment: String,
    pub seed: u64,
    pub output_dir: PathBuf,
    pub samples: usize,
    pub omega: f64,
    pub n: usize,
    pub kernel_kind: String,
    pub beta: f64,
    pub orders: Vec<f64>,
    pub alpha: f64,
    pub c: f64,
    pub phi: Phi,
    /// Explicit `Im λ` values; empty means the adaptive ladder.
    pub y: Vec<f64>,
    pub y_points: usize,
    pub x_points: usize,
    pub n_max: usize,
    pub min_count: usize,
    pub xi: Vec<f64>,
    pub tolerances: Tolerances,
}

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("invalid config: {0}")]
    Parse(#[from] toml::de::Error),
    #[error("unknown experiment `{0}`; run `triangulab list`")]
    UnknownExperiment(String),
    #[error("invalid value: {0}")]
    Invalid(String),
}

pub fn load(path: &Path) -> Result<Config, ConfigError> {
    let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io { path: path.to_owned(), source })?;
    parse(&text)
}

pub fn parse(text: &str) -> Result<Config, ConfigError> {
    let raw: RawConfig = toml::from_str(text)?;
    let d = experiments::defaults(&raw.experiment).ok_or_else(|| ConfigError::UnknownExperiment(raw.experiment.clone()))?;
    let k = raw.kernel;
    let l = raw.ladder;
    let t = raw.tolerances;
    let n = raw.grid.n.unwrap_or(d.n);
    let cfg = Config {
        experiment: raw.experiment,
        seed: raw.seed.unwrap_or(0),
        output_dir: raw.output_dir.unwrap_or_else(|| PathBuf::from("triangulab-out")),
        samples: raw.samples.unwrap_or(d.samples),
        omega: raw.grid.omega.unwrap_or(1.0),
        n,
        kernel_kind: k.kind.unwrap_or_else(|| d.kind.to_owned()),
        beta: k.beta.unwrap_or(d.beta),
        orders: k.orders.unwrap_or_else(|| d.orders.to_vec()),
        alpha: k.alpha.unwrap_or(1.0),
        c: k.c.unwrap_or(0.0),
        phi: k.phi.unwrap_or(d.phi),
        y: l.y.unwrap_or_default(),
        y_points: l.y_points.unwrap_or(16),
        x_points: l.x_points.unwrap_or(64),
        n_max: l.n_max.unwrap_or(n),
        min_count: l.min_count.unwrap_or(triangulab_core::resolvent::DEFAULT_MIN_COUNT),
        xi: l.xi.unwrap_or_else(|| d.xi.clone()),
        tolerances: Tolerances {
            distance: t.distance.unwrap_or(d.distance),
            quasinilpotent: t.quasinilpotent.unwrap_or(1e-6),
            relative: t.relative.unwrap_or(d.relative),
            band: t.band.unwrap_or(d.band),
            witness: t.witness,
        },
    };
    validate(&cfg)?;
    Ok(cfg)
}

fn validate(c: &Config) -> Result<(), ConfigError> {
    let bad = |msg: String| Err(ConfigError::Invalid(msg));
    if !(c.omega > 0.0 && c.omega.is_finite()) {
        return bad(format!("grid.omega must be positive, got {}", c.omega));
    }
    if c.n < 2 {
        return bad(format!("grid.n must be at least 2, got {}", c.n));
    }
    if c.samples == 0 {
        return bad("samples must be positive".into());
    }
    if !(c.beta > 0.0 && c.beta.is_finite()) || c.orders.iter().any(|b| !(*b > 0.0 && b.is_finite())) {
        return bad("kernel orders must be positive".into());
    }
    if c.orders.is_empty() {
        return bad("kernel.orders must not be empty".into());
    }
    if !c.alpha.is_finite() || !c.c.is_finite() {
        return bad("kernel.alpha and kernel.c must be finite".into());
    }
    if let Phi::Named(name) = &c.phi {
        if name != "x" && name != "x^2" {
            return bad(format!("kernel.phi must be a number, \"x\" or \"x^2\", got \"{name}\""));
        }
    }
    if !experiments::KERNEL_KINDS.contains(&c.kernel_kind.as_str()) {
        return bad(format!("kernel.kind must be one of {:?}, got \"{}\"", experiments::KERNEL_KINDS, c.kernel_kind));
    }
    if c.y.iter().any(|y| *y == 0.0 || !y.is_finite()) {
        return bad("ladder.y entries must be finite and nonzero".into());
    }
    if c.y_points < 2 || c.x_points == 0 || c.n_max == 0 {
        return bad("ladder.y_points >= 2, ladder.x_points >= 1 and ladder.n_max >= 1 required".into());
    }
    if c.xi.is_empty() || c.xi.iter().any(|x| !x.is_finite()) {
        return bad("ladder.xi must hold finite values".into());
    }
    let t = &c.tolerances;
    if [t.distance, t.quasinilpotent, t.relative, t.band].iter().any(|v| v.is_nan() || *v <= 0.0) || t.witness.is_some_and(|w| w.is_nan() || w <= 0.0) {
        return bad("tolerances must be positive".into());
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_are_filled() {
        let c = parse("experiment = \"semigroup-ebeta\"").unwrap();
        assert_eq!(c.n, 256);
        assert_eq!(c.orders, vec![0.5, 1.0, 1.5]);
        assert_eq!(c.n_max, 256);
    }

    #[test]
    fn strict_schema() {
        assert!(matches!(parse("experiment = \"witness\"\ncolour = 3"), Err(ConfigError::Parse(_))));
        assert!(matches!(parse("experiment = \"witness\"\n[grid]\nm = 3"), Err(ConfigError::Parse(_))));
        assert!(matches!(parse("experiment = \"nope\""), Err(ConfigError::UnknownExperiment(_))));
        assert!(matches!(parse("experiment = \"witness\"\n[grid]\nn = 0"), Err(ConfigError::Invalid(_))));
        assert!(matches!(parse("experiment = \"levinson\"\n[kernel]\nphi = \"sin\""), Err(ConfigError::Invalid(_))));
        assert!(parse("experiment = \"levinson\"\n[kernel]\nphi = \"x^2\"").is_ok());
    }

    #[test]
    fn shipped_configs_parse() {
        let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs");
        let mut count = 0;
        for entry in std::fs::read_dir(dir).unwrap() {
            let path = entry.unwrap().path();
            if path.extension().is_some_and(|e| e == "toml") {
                load(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
                count += 1;
            }
        }
        assert!(count >= 5);
    }
}
