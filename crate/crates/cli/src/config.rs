//! TOML run configuration.
//!
//! Every key is optional; command-line flags override whatever the file
//! sets. Only the section matching the invoked command is read.
//!
//! ```toml
//! output = "runs/figure1"
//!
//! [params]
//! l = 1e-5
//! omega = 8.5e-4
//!
//! [simulate]
//! periods = 2
//! plot_script = true
//! ```

use std::path::{Path, PathBuf};

use serde::Deserialize;

use crate::error::{CliError, CliResult};

#[derive(Debug, Default, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub output: Option<PathBuf>,
    #[serde(default)]
    pub params: ParamsSection,
    #[serde(default)]
    pub simulate: SimulateSection,
    #[serde(default)]
    pub fourier: FourierSection,
    #[serde(default)]
    pub fock: FockSection,
    #[serde(default)]
    pub grid: GridSection,
    #[serde(default)]
    pub sweep: SweepSection,
}

#[derive(Debug, Default, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParamsSection {
    pub l: Option<f64>,
    pub omega: Option<f64>,
    pub mass: Option<f64>,
}

#[derive(Debug, Default, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimulateSection {
    pub periods: Option<f64>,
    pub steps_per_period: Option<usize>,
    pub t_end: Option<f64>,
    pub dt: Option<f64>,
    pub closed_form: Option<bool>,
    pub plot_script: Option<bool>,
}

#[derive(Debug, Default, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FourierSection {
    pub periods: Option<usize>,
    pub harmonics: Option<usize>,
    pub component: Option<String>,
    pub steps_per_period: Option<usize>,
}

#[derive(Debug, Default, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FockSection {
    pub dim: Option<usize>,
    pub backend: Option<String>,
    pub levels: Option<usize>,
    pub dump_matrix: Option<bool>,
}

#[derive(Debug, Default, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSection {
    pub rho_max: Option<f64>,
    pub points: Option<usize>,
    pub variant: Option<String>,
    pub levels: Option<usize>,
}

#[derive(Debug, Default, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSection {
    pub workflow: Option<String>,
    pub l: Option<Values>,
    pub omega: Option<Values>,
    pub jobs: Option<usize>,
}

/// A list of numbers, either as a TOML array or as a string accepted by
/// [`parse_values`].
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(untagged)]
pub enum Values {
    List(Vec<f64>),
    Spec(String),
}

impl Values {
    pub fn resolve(&self) -> CliResult<Vec<f64>> {
        match self {
            Values::List(v) => Ok(v.clone()),
            Values::Spec(s) => parse_values(s),
        }
    }
}

impl RunConfig {
    pub fn load(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", path.display())))?;
        Self::parse(&text)
            .map_err(|e| CliError::Usage(format!("invalid config {}: {e}", path.display())))
    }

    pub fn parse(text: &str) -> Result<Self, toml::de::Error> {
        toml::from_str(text)
    }
}

/// `"a,b,c"` lists values; `"start:stop:count"` is `count` evenly spaced
/// values including both ends.
pub fn parse_values(spec: &str) -> CliResult<Vec<f64>> {
    let bad = |what: &str| CliError::Usage(format!("bad value list `{spec}`: {what}"));
    let number = |s: &str| s.trim().parse::<f64>().map_err(|e| bad(&e.to_string()));
    if spec.contains(':') {
        let parts: Vec<&str> = spec.split(':').collect();
        if parts.len() != 3 {
            return Err(bad("expected start:stop:count"));
        }
        let (start, stop) = (number(parts[0])?, number(parts[1])?);
        let count: usize = parts[2]
            .trim()
            .parse()
            .map_err(|_| bad("count must be an integer"))?;
        return Ok(match count {
            0 => Vec::new(),
            1 => vec![start],
            _ => (0..count)
                .map(|i| start + (stop - start) * i as f64 / (count - 1) as f64)
                .collect(),
        });
    }
    spec.split(',')
        .filter(|s| !s.trim().is_empty())
        .map(number)
        .collect()
}
