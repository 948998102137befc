use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::caps::SizeCaps;
use crate::error::{Error, Result};
use crate::limits::SequenceSpec;
use crate::rational::Rational;
use crate::rings::MetricKind;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    #[default]
    Json,
    Csv,
}

/// Defaults for a run, read from a TOML file. Explicit flags override
/// every field.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub command: Option<String>,
    pub metric: Option<MetricKind>,
    pub tolerance: Option<Rational>,
    pub epsilons: Option<Vec<Rational>>,
    pub format: Option<Format>,
    pub out: Option<PathBuf>,
    pub approx: Option<bool>,
    pub caps: Option<SizeCaps>,
    pub sequence: Option<SequenceSpec>,
}

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::InvalidArgument(format!("config: {e}")))
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Serialization(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::InvalidArgument(format!("cannot read {}: {e}", path.display())))?;
        Self::from_toml(&text)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::limits::{Extent, Family};

    #[test]
    fn round_trips() {
        let full = RunConfig {
            command: Some("converge".into()),
            metric: Some(MetricKind::SquaredNormalized),
            tolerance: Some(Rational::frac(1, 100)),
            epsilons: Some(vec![Rational::frac(1, 2), Rational::frac(1, 10)]),
            format: Some(Format::Csv),
            out: Some(PathBuf::from("out/report.csv")),
            approx: Some(true),
            caps: Some(SizeCaps { max_points: 20_000, ..SizeCaps::default() }),
            sequence: Some(SequenceSpec::new(
                Family::Dirichlet { a: 4, b: 3 },
                7,
                Extent::Count(12),
                MetricKind::Normalized,
            )),
        };
        let text = full.to_toml().unwrap();
        assert_eq!(RunConfig::from_toml(&text).unwrap(), full);
        let empty = RunConfig::default();
        assert_eq!(RunConfig::from_toml(&empty.to_toml().unwrap()).unwrap(), empty);
    }

    #[test]
    fn reads_hand_written_files() {
        let text = r#"
tolerance = "1/50"
format = "csv"

[caps]
max_points = 12000

[sequence]
family = "primes"
start = 11
extent = { up_to = 101 }
kind = "normalized"
"#;
        let c = RunConfig::from_toml(text).unwrap();
        assert_eq!(c.tolerance, Some(Rational::frac(1, 50)));
        let caps = c.caps.unwrap();
        assert_eq!((caps.max_points, caps.node_budget), (12_000, SizeCaps::default().node_budget));
        assert_eq!(c.sequence.unwrap().extent, Extent::UpTo(101));
        assert!(RunConfig::from_toml("bogus = 1").is_err());
    }
}
