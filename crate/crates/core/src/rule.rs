use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::Error;

/// Scoring rules, all oriented as losses (lower is better).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Rule {
    Brier,
    Log,
    Spherical,
    Rps,
    Quadratic,
    Crps,
}

impl Rule {
    pub const CATEGORICAL: [Rule; 4] = [Rule::Brier, Rule::Log, Rule::Spherical, Rule::Rps];
    pub const DENSITY: [Rule; 4] = [Rule::Quadratic, Rule::Log, Rule::Spherical, Rule::Crps];

    pub fn name(self) -> &'static str {
        match self {
            Rule::Brier => "brier",
            Rule::Log => "log",
            Rule::Spherical => "spherical",
            Rule::Rps => "rps",
            Rule::Quadratic => "quadratic",
            Rule::Crps => "crps",
        }
    }

    pub fn is_categorical(self) -> bool {
        Self::CATEGORICAL.contains(&self)
    }

    pub fn is_density(self) -> bool {
        Self::DENSITY.contains(&self)
    }
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Rule {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "brier" => Ok(Rule::Brier),
            "log" | "logarithmic" | "ignorance" => Ok(Rule::Log),
            "spherical" => Ok(Rule::Spherical),
            "rps" => Ok(Rule::Rps),
            "quadratic" | "qs" => Ok(Rule::Quadratic),
            "crps" => Ok(Rule::Crps),
            other => Err(Error::InvalidConfig(format!("unknown rule `{other}`"))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_roundtrip() {
        for r in [
            Rule::Brier,
            Rule::Log,
            Rule::Spherical,
            Rule::Rps,
            Rule::Quadratic,
            Rule::Crps,
        ] {
            assert_eq!(r.name().parse::<Rule>().unwrap(), r);
        }
        assert!("energy".parse::<Rule>().is_err());
        assert!(Rule::Log.is_categorical() && Rule::Log.is_density());
        assert!(!Rule::Brier.is_density());
        assert!(!Rule::Crps.is_categorical());
    }
}
