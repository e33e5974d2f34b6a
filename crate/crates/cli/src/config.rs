//! Run configuration: a JSON file with exact integer inputs only.
//!
//! ```json
//! {
//!   "polynomial": [1, 0, 1],
//!   "assume_maximal": true,
//!   "family": { "prime_power": { "k": 2, "norm_bound": 100000000 } },
//!   "truncation": { "norm_cutoff": 10000 },
//!   "region": { "radius": 700 }
//! }
//! ```
//!
//! Polynomials are coefficient lists, lowest degree first. An explicit family
//! is a list of ideals, each a list of generators, each a coefficient list
//! in the power basis: `{"explicit": [[[4]], [[9]]]}`.

use std::path::Path;
use std::sync::Arc;

use bfree::{build_bfamily, BFamily, FamilySpec, FieldOrder, OrderOptions, Region, RingElement};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::CliError;

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub polynomial: Vec<i64>,
    #[serde(default)]
    pub assume_maximal: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub degree_cap: Option<usize>,
    pub family: FamilyConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub truncation: Option<Truncation>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub region: Option<RegionConfig>,
    /// Minimum number of missed classes per level (entropy); 1 when absent.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub s: Vec<u64>,
    /// Points of a shape: all 2^k cylinders (cylinder) or CRT shape (scan).
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub shape: Vec<Vec<i64>>,
    /// A single cylinder pattern, used instead of `shape`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pattern: Option<PatternConfig>,
    /// Box sides n for entropy estimates on {0..n-1}^d.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub sizes: Vec<u64>,
    /// Cube sides for zero-window scans.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub sides: Vec<u64>,
    /// Rational primes for the factor table; primes up to 50 when absent.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub primes: Vec<u64>,
    /// Random group points tested by `fibers`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub samples: Option<usize>,
    #[serde(default = "default_digits")]
    pub digits: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub point_budget: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub term_budget: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

fn default_digits() -> usize {
    12
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum FamilyConfig {
    Explicit(Vec<Vec<Vec<i64>>>),
    PrimePower { k: u32, norm_bound: u64 },
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum Truncation {
    Levels(usize),
    NormCutoff(u64),
}

/// Either a centered cube `{"radius": n}` or explicit bounds.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RegionConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub radius: Option<i64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lo: Option<Vec<i64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub hi: Option<Vec<i64>>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PatternConfig {
    #[serde(default)]
    pub ones: Vec<Vec<i64>>,
    #[serde(default)]
    pub zeros: Vec<Vec<i64>>,
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        Self::parse(&text).map_err(|e| match e {
            CliError::Config(m) => CliError::Config(format!("{}:{m}", path.display())),
            other => other,
        })
    }

    /// serde_json reports line, column and the offending field.
    pub fn parse(text: &str) -> Result<Self, CliError> {
        serde_json::from_str(text)
            .map_err(|e| CliError::Config(format!("{}:{}: {e}", e.line(), e.column())))
    }

    /// SHA-256 of the canonical serialization (fixed field order, no
    /// whitespace, defaults filled in).
    pub fn hash(&self) -> [u8; 32] {
        Sha256::digest(serde_json::to_vec(self).expect("config serializes")).into()
    }
}

fn field_err(field: &str, e: impl std::fmt::Display) -> CliError {
    CliError::Config(format!("field `{field}`: {e}"))
}

/// Everything a command needs, built once from the config.
pub struct Setup {
    pub config: RunConfig,
    pub order: Arc<FieldOrder>,
    pub family: BFamily,
    /// Number of family levels in use.
    pub levels: usize,
    pub seed: u64,
}

impl Setup {
    pub fn new(config: RunConfig) -> Result<Self, CliError> {
        let mut opts = OrderOptions { assume_maximal: config.assume_maximal, ..Default::default() };
        if let Some(cap) = config.degree_cap {
            opts.degree_cap = cap;
        }
        let order = Arc::new(
            FieldOrder::with_options(&config.polynomial, opts).map_err(|e| CliError::from_lib_in("polynomial", e))?,
        );
        let spec = match &config.family {
            FamilyConfig::PrimePower { k, norm_bound } => FamilySpec::PrimePower { k: *k, norm_bound: *norm_bound },
            FamilyConfig::Explicit(ideals) => {
                let mut gens = Vec::with_capacity(ideals.len());
                for (i, ideal) in ideals.iter().enumerate() {
                    let elems = ideal
                        .iter()
                        .enumerate()
                        .map(|(j, c)| {
                            order.element(c).map_err(|e| field_err(&format!("family.explicit[{i}][{j}]"), e))
                        })
                        .collect::<Result<Vec<_>, _>>()?;
                    gens.push(elems);
                }
                FamilySpec::Explicit(gens)
            }
        };
        let family = build_bfamily(&order, spec).map_err(|e| CliError::from_lib_in("family", e))?;
        let levels = match config.truncation {
            None => family.len(),
            Some(Truncation::Levels(l)) if l <= family.len() => l,
            Some(Truncation::Levels(l)) => {
                return Err(field_err("truncation.levels", format!("{l} exceeds the {} stored ideals", family.len())))
            }
            Some(Truncation::NormCutoff(c)) => family.truncation_for_norm(c),
        };
        if !config.s.is_empty() && config.s.len() > levels {
            return Err(field_err("s", format!("{} entries for {levels} levels", config.s.len())));
        }
        let seed = config.seed.unwrap_or(0);
        Ok(Setup { config, order, family, levels, seed })
    }

    pub fn degree(&self) -> usize {
        self.order.degree()
    }

    pub fn region(&self) -> Result<Region, CliError> {
        let rc = self.config.region.as_ref().ok_or_else(|| field_err("region", "required by this command"))?;
        let d = self.degree();
        let region = match (rc.radius, &rc.lo, &rc.hi) {
            (Some(n), None, None) if n >= 0 => Region::centered(d, n),
            (None, Some(lo), Some(hi)) => {
                if lo.len() != d || hi.len() != d {
                    return Err(field_err("region", format!("bounds must have {d} coordinates")));
                }
                Region::new(lo.clone(), hi.clone()).map_err(|e| field_err("region", e))?
            }
            _ => return Err(field_err("region", "give either a nonnegative radius or both lo and hi")),
        };
        Ok(region)
    }

    pub fn point(&self, field: &str, coords: &[i64]) -> Result<RingElement, CliError> {
        self.order.element(coords).map_err(|e| field_err(field, e))
    }

    pub fn shape(&self) -> Result<Vec<RingElement>, CliError> {
        self.config.shape.iter().enumerate().map(|(i, c)| self.point(&format!("shape[{i}]"), c)).collect()
    }

    pub fn point_budget(&self) -> u64 {
        self.config.point_budget.unwrap_or(bfree::geometry::DEFAULT_POINT_BUDGET)
    }

    /// Hash of the fields that determine a sieve window, so that commands
    /// with different reporting parameters share one cached window.
    pub fn window_key(&self, region: &Region) -> [u8; 32] {
        let key = serde_json::json!({
            "polynomial": self.config.polynomial,
            "assume_maximal": self.config.assume_maximal,
            "family": self.config.family,
            "levels": self.levels,
            "lo": region.lo(),
            "hi": region.hi(),
        });
        Sha256::digest(serde_json::to_vec(&key).expect("key serializes")).into()
    }
}
