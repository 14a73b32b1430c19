use std::path::Path;

use numerics::{parse_real, MIN_PRECISION};
use serde::{Deserialize, Serialize};

use crate::factor::Factor;
use crate::spec::CircleMapSpec;
use crate::CircleMapError;

/// Environment override for the default mantissa width.
pub const PRECISION_ENV: &str = "RENORMLAB_PRECISION_BITS";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FactorEntry {
    /// "critical" (default) or "diffeo".
    #[serde(default)]
    pub kind: Option<String>,
    #[serde(default)]
    pub beta: Option<String>,
    #[serde(default)]
    pub d: Option<u32>,
    #[serde(default)]
    pub amplitude: Option<String>,
}

/// On-disk map description (TOML). Decimal strings are parsed at the full
/// working precision.
///
/// ```toml
/// family = "composition"
/// omega = "0.6180339887498948482045868343656381177203"
/// precision_bits = 256
///
/// [[factors]]
/// beta = "0"
/// d = 3
/// ```
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MapSpecFile {
    pub family: String,
    pub omega: String,
    #[serde(default)]
    pub factors: Vec<FactorEntry>,
    #[serde(default)]
    pub precision_bits: Option<u32>,
}

fn default_precision() -> u32 {
    std::env::var(PRECISION_ENV).ok().and_then(|v| v.parse().ok()).unwrap_or(MIN_PRECISION)
}

impl MapSpecFile {
    pub fn parse(text: &str) -> Result<Self, CircleMapError> {
        toml::from_str(text).map_err(|e| CircleMapError::SpecFile(e.to_string()))
    }

    /// Build the map. `precision` overrides the file's own width.
    pub fn build(&self, precision: Option<u32>) -> Result<CircleMapSpec, CircleMapError> {
        if self.family != "composition" {
            return Err(CircleMapError::SpecFile(format!("unknown family {:?}", self.family)));
        }
        let prec = precision.or(self.precision_bits).unwrap_or_else(default_precision);
        if prec < MIN_PRECISION {
            return Err(CircleMapError::SpecFile(format!("precision_bits must be at least {MIN_PRECISION}")));
        }
        let omega = parse_real(&self.omega, prec)?;
        let factors = self
            .factors
            .iter()
            .map(|f| match f.kind.as_deref().unwrap_or("critical") {
                "critical" => {
                    let beta = parse_real(f.beta.as_deref().unwrap_or("0"), prec)?;
                    let d = f.d.ok_or_else(|| CircleMapError::SpecFile("critical factor needs d".into()))?;
                    Factor::critical(beta, d)
                }
                "diffeo" => {
                    let a = f.amplitude.as_deref().ok_or_else(|| CircleMapError::SpecFile("diffeo needs amplitude".into()))?;
                    Factor::diffeo(parse_real(a, prec)?)
                }
                other => Err(CircleMapError::SpecFile(format!("unknown factor kind {other:?}"))),
            })
            .collect::<Result<Vec<_>, _>>()?;
        CircleMapSpec::new(omega, factors, prec)
    }

    /// Inverse of `build`, with decimals long enough to round-trip.
    pub fn from_spec(spec: &CircleMapSpec) -> Self {
        let factors = spec
            .factors()
            .iter()
            .map(|f| match f {
                Factor::Critical(h) => FactorEntry {
                    kind: None,
                    beta: Some(numerics::to_decimal(&h.beta)),
                    d: Some(h.d),
                    amplitude: None,
                },
                Factor::Diffeo { amplitude } => FactorEntry {
                    kind: Some("diffeo".into()),
                    beta: None,
                    d: None,
                    amplitude: Some(numerics::to_decimal(amplitude)),
                },
            })
            .collect();
        MapSpecFile {
            family: "composition".into(),
            omega: numerics::to_decimal(spec.omega()),
            factors,
            precision_bits: Some(spec.prec()),
        }
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("map spec serializes")
    }
}

pub fn read_map_spec(path: &Path, precision: Option<u32>) -> Result<CircleMapSpec, CircleMapError> {
    let text = std::fs::read_to_string(path).map_err(|e| CircleMapError::SpecFile(format!("{}: {e}", path.display())))?;
    MapSpecFile::parse(&text)?.build(precision)
}
