//! TOML experiment configuration.
//!
//! ```toml
//! [experiment]
//! kind = "ensemble"        # ensemble | sweep_vmax | sweep_L | sweep_k | excited | semiclassical | homogenized
//! n_eigs = 1
//! s = 1
//! oracle = false
//!
//! [potential]
//! dist = "bernoulli:0.5:10"
//! L = 2000                 # or a list
//! k = 1.0                  # or a list
//! vmax = [0.5, 1.0]        # sweep_vmax only
//!
//! [grid]
//! M = 32
//! max_nodes = 4000000
//!
//! [solver]
//! tol = 1e-12
//!
//! [seeds]
//! list = [7, 11]
//! range = [1, 50]          # inclusive, appended to `list`
//!
//! [homogenized]
//! gamma_c = [5.0]
//! target_ratio = [1.1]
//! ```
//!
//! Unknown keys are errors.

use std::path::Path;

use serde::{de, Deserialize, Deserializer};

use crate::experiments::{ExperimentConfig, ExperimentKind, DEFAULT_MAX_NODES};
use crate::potential::Distribution;
use crate::{Error, Result};

#[derive(Debug, Deserialize)]
#[serde(untagged)]
enum OneOrMany<T> {
    One(T),
    Many(Vec<T>),
}

impl<T> OneOrMany<T> {
    fn into_vec(self) -> Vec<T> {
        match self {
            OneOrMany::One(x) => vec![x],
            OneOrMany::Many(v) => v,
        }
    }
}

fn from_str<'de, D, T>(d: D) -> std::result::Result<T, D::Error>
where
    D: Deserializer<'de>,
    T: std::str::FromStr,
    T::Err: std::fmt::Display,
{
    String::deserialize(d)?.parse().map_err(de::Error::custom)
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileConfig {
    experiment: ExperimentSection,
    potential: PotentialSection,
    #[serde(default)]
    grid: GridSection,
    #[serde(default)]
    solver: SolverSection,
    seeds: SeedsSection,
    #[serde(default)]
    homogenized: HomogenizedSection,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ExperimentSection {
    #[serde(deserialize_with = "from_str")]
    kind: ExperimentKind,
    n_eigs: Option<usize>,
    s: Option<usize>,
    #[serde(default)]
    oracle: bool,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct PotentialSection {
    #[serde(deserialize_with = "from_str")]
    dist: Distribution,
    #[serde(rename = "L")]
    len: OneOrMany<usize>,
    k: Option<OneOrMany<f64>>,
    vmax: Option<OneOrMany<f64>>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct GridSection {
    #[serde(rename = "M")]
    per_cell: Option<usize>,
    max_nodes: Option<usize>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct SolverSection {
    tol: Option<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct SeedsSection {
    #[serde(default)]
    list: Vec<u64>,
    range: Option<[u64; 2]>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct HomogenizedSection {
    gamma_c: Option<OneOrMany<f64>>,
    target_ratio: Option<OneOrMany<f64>>,
}

/// Parses and validates a configuration document.
pub fn parse_config(text: &str) -> Result<ExperimentConfig> {
    let file: FileConfig = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
    let mut seeds = file.seeds.list;
    if let Some([lo, hi]) = file.seeds.range {
        if lo > hi {
            return Err(Error::Config(format!("seed range [{lo}, {hi}] is empty")));
        }
        seeds.extend(lo..=hi);
    }
    let mut cfg = ExperimentConfig::new(file.experiment.kind, file.potential.dist);
    cfg.lengths = file.potential.len.into_vec();
    if let Some(k) = file.potential.k {
        cfg.couplings = k.into_vec();
    }
    cfg.vmax = file.potential.vmax.map_or_else(Vec::new, OneOrMany::into_vec);
    if let Some(m) = file.grid.per_cell {
        cfg.per_cell = m;
    }
    cfg.max_nodes = file.grid.max_nodes.unwrap_or(DEFAULT_MAX_NODES);
    if let Some(tol) = file.solver.tol {
        cfg.tol = tol;
    }
    cfg.n_eigs = file.experiment.n_eigs.unwrap_or(1);
    cfg.s = file.experiment.s.unwrap_or(1);
    cfg.oracle = file.experiment.oracle;
    cfg.seeds = seeds;
    cfg.gamma_c = file.homogenized.gamma_c.map_or_else(Vec::new, OneOrMany::into_vec);
    cfg.target_ratio = file
        .homogenized
        .target_ratio
        .map_or_else(Vec::new, OneOrMany::into_vec);
    cfg.validate()?;
    Ok(cfg)
}

pub fn load_config(path: &Path) -> Result<ExperimentConfig> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_config(&text).map_err(|e| match e {
        Error::Config(msg) => Error::Config(format!("{}: {msg}", path.display())),
        other => other,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"
[experiment]
kind = "ensemble"

[potential]
dist = "bernoulli:0.5:10"
L = 200

[seeds]
range = [1, 5]
"#;

    #[test]
    fn minimal_defaults() {
        let cfg = parse_config(MINIMAL).unwrap();
        assert_eq!(cfg.kind, ExperimentKind::Ensemble);
        assert_eq!(cfg.lengths, vec![200]);
        assert_eq!(cfg.couplings, vec![1.0]);
        assert_eq!(cfg.seeds, vec![1, 2, 3, 4, 5]);
        assert_eq!(cfg.per_cell, 32);
        assert_eq!(cfg.n_eigs, 1);
    }

    #[test]
    fn lists_and_integers_as_floats() {
        let text = MINIMAL.replace("L = 200", "L = [10, 20]\nk = [1, 2.5]")
            + "list = [9]\n";
        let cfg = parse_config(&text).unwrap();
        assert_eq!(cfg.lengths, vec![10, 20]);
        assert_eq!(cfg.couplings, vec![1.0, 2.5]);
        assert_eq!(cfg.seeds, vec![9, 1, 2, 3, 4, 5]);
    }

    #[test]
    fn unknown_key_names_line() {
        let text = MINIMAL.replace("L = 200", "L = 200\ncolour = 3");
        let msg = parse_config(&text).unwrap_err().to_string();
        assert!(msg.contains("colour"), "{msg}");
        assert!(msg.contains("line 8"), "{msg}");
    }

    #[test]
    fn bad_values_rejected() {
        for (from, to) in [
            ("range = [1, 5]", "list = []"),
            ("range = [1, 5]", "range = [5, 1]"),
            ("\"ensemble\"", "\"nonsense\""),
            ("bernoulli:0.5:10", "bernoulli:1.5:10"),
            ("L = 200", "L = 0"),
            ("L = 200", "L = -3"),
        ] {
            let text = MINIMAL.replace(from, to);
            assert!(matches!(parse_config(&text), Err(Error::Config(_))), "{to}");
        }
        assert!(parse_config("[experiment]\nkind = \"ensemble\"\n").is_err());
    }

    #[test]
    fn homogenized_section() {
        let text = MINIMAL.replace("\"ensemble\"", "\"homogenized\"")
            + "[homogenized]\ngamma_c = 5\ntarget_ratio = [1.1, 1.2]\n";
        let cfg = parse_config(&text).unwrap();
        assert_eq!(cfg.gamma_c, vec![5.0]);
        assert_eq!(cfg.target_ratio, vec![1.1, 1.2]);
    }
}
