//! Matrix spec files, in TOML or JSON.

use std::path::Path;

use bandinv::apps::{AbsorbingSpec, AbsorbingVariant};
use bandinv::{BandSpec, Extent, HomogeneousSpec, Rates, Truncation};
use serde::{Deserialize, Serialize};

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, Serialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum ExtentKind {
    #[default]
    Finite,
    Infinite,
}

#[derive(Debug, Clone, Copy, PartialEq, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct Triple {
    pub bd: f64,
    pub bu: f64,
    pub bz: f64,
}

impl Triple {
    fn rates(&self) -> Rates {
        Rates::new(self.bd, self.bu, self.bz)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, Serialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum TruncationKind {
    Special,
    #[default]
    Generic,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, Serialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum VariantKind {
    #[default]
    Isolated,
    Homogeneous,
}

#[derive(Debug, Clone, PartialEq, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct AbsorbingTable {
    pub bd: f64,
    pub bu: f64,
    pub bz: f64,
    #[serde(default)]
    pub variant: VariantKind,
}

/// Polynomial rates `c[0] + c[1] i + c[2] i^2 + ...` for rows past the prefix.
#[derive(Debug, Clone, PartialEq, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct Polynomial {
    pub bd: Vec<f64>,
    pub bu: Vec<f64>,
    #[serde(default)]
    pub bz: Vec<f64>,
}

fn poly(c: &[f64], i: usize) -> f64 {
    let x = i as f64;
    c.iter().rev().fold(0.0, |acc, a| acc * x + a)
}

#[derive(Debug, Clone, PartialEq, Deserialize, Serialize, Default)]
#[serde(deny_unknown_fields)]
pub struct SpecFile {
    #[serde(default)]
    pub extent: ExtentKind,
    /// Last row index of a finite matrix (so it has `l + 1` rows).
    pub l: Option<usize>,
    #[serde(default)]
    pub bd: Vec<f64>,
    #[serde(default)]
    pub bu: Vec<f64>,
    #[serde(default)]
    pub bz: Vec<f64>,
    pub homogeneous: Option<Triple>,
    #[serde(default)]
    pub truncation: TruncationKind,
    /// Rows after the explicit prefix share these rates.
    pub tail: Option<Triple>,
    pub polynomial: Option<Polynomial>,
    pub absorbing: Option<AbsorbingTable>,
    /// Cost rates for `value-function`.
    pub cost: Option<Vec<f64>>,
    /// Discount rate for `value-function`.
    pub alpha: Option<f64>,
}

/// What a spec file describes once its rules are resolved.
#[derive(Debug, Clone)]
pub enum Model {
    Band(BandSpec),
    Homogeneous(HomogeneousSpec),
    Absorbing(AbsorbingSpec),
}

impl Model {
    pub fn band(&self) -> Result<BandSpec, CliError> {
        Ok(match self {
            Model::Band(b) => b.clone(),
            Model::Homogeneous(h) => h.to_band()?,
            Model::Absorbing(a) => a.to_band()?,
        })
    }
}

fn schema(msg: impl Into<String>) -> CliError {
    CliError::Schema(msg.into())
}

impl SpecFile {
    pub fn parse(text: &str, json: bool) -> Result<Self, CliError> {
        if json {
            serde_json::from_str(text).map_err(|e| schema(e.to_string()))
        } else {
            toml::from_str(text).map_err(|e| schema(e.to_string()))
        }
    }

    /// Reads a file; `.json` files are JSON, everything else TOML.
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Io(path.display().to_string(), e))?;
        let json = path.extension().is_some_and(|e| e.eq_ignore_ascii_case("json"));
        Self::parse(&text, json)
    }

    fn extent(&self) -> Result<Extent, CliError> {
        match self.extent {
            ExtentKind::Infinite => {
                if self.l.is_some() {
                    return Err(schema("`l` only applies to finite matrices"));
                }
                Ok(Extent::Infinite)
            }
            ExtentKind::Finite => {
                let rows = match (self.l, self.bd.len()) {
                    (Some(l), 0) => l + 1,
                    (Some(l), n) if n != l + 1 => {
                        return Err(schema(format!("`l = {l}` needs {} rows but the arrays have {n}", l + 1)))
                    }
                    (_, 0) => return Err(schema("a finite matrix needs `l` or rate arrays")),
                    (_, n) => n,
                };
                Ok(Extent::Finite(rows))
            }
        }
    }

    fn prefix(&self) -> Result<Vec<Rates>, CliError> {
        let (d, u, z) = (self.bd.len(), self.bu.len(), self.bz.len());
        if d != u || d != z {
            return Err(schema(format!("rate arrays have mismatched lengths (bd {d}, bu {u}, bz {z})")));
        }
        Ok((0..d).map(|i| Rates::new(self.bd[i], self.bu[i], self.bz[i])).collect())
    }

    pub fn model(&self) -> Result<Model, CliError> {
        let extent = self.extent()?;
        let rules = [self.homogeneous.is_some(), self.tail.is_some(), self.polynomial.is_some(), self.absorbing.is_some()];
        if rules.iter().filter(|x| **x).count() > 1 {
            return Err(schema("use at most one of `homogeneous`, `tail`, `polynomial`, `absorbing`"));
        }
        let prefix = self.prefix()?;
        if let Some(h) = &self.homogeneous {
            if !prefix.is_empty() {
                return Err(schema("`homogeneous` cannot be combined with rate arrays"));
            }
            let truncation = match self.truncation {
                TruncationKind::Special => Truncation::Special,
                TruncationKind::Generic => Truncation::Generic,
            };
            return Ok(Model::Homogeneous(HomogeneousSpec::new(h.bd, h.bu, h.bz, extent).with_truncation(truncation)));
        }
        if let Some(a) = &self.absorbing {
            if !prefix.is_empty() {
                return Err(schema("`absorbing` cannot be combined with rate arrays"));
            }
            let variant = match a.variant {
                VariantKind::Isolated => AbsorbingVariant::Isolated,
                VariantKind::Homogeneous => AbsorbingVariant::Homogeneous,
            };
            return Ok(Model::Absorbing(AbsorbingSpec::new(a.bd, a.bu, a.bz, extent).with_variant(variant)));
        }
        match extent {
            Extent::Finite(_) => {
                if self.tail.is_some() || self.polynomial.is_some() {
                    return Err(schema("`tail` and `polynomial` need `extent = \"infinite\"`"));
                }
                Ok(Model::Band(BandSpec::finite(prefix)))
            }
            Extent::Infinite => {
                let n = prefix.len();
                if let Some(t) = self.tail {
                    let tail = t.rates();
                    let spec = BandSpec::infinite(move |i| if i < n { prefix[i] } else { tail });
                    return Ok(Model::Band(spec.with_homogeneous_tail(n)));
                }
                if let Some(p) = self.polynomial.clone() {
                    let spec = BandSpec::infinite(move |i| {
                        if i < n {
                            prefix[i]
                        } else {
                            Rates::new(poly(&p.bd, i), poly(&p.bu, i), if i == 0 { 0.0 } else { poly(&p.bz, i) })
                        }
                    });
                    return Ok(Model::Band(spec));
                }
                Err(schema("an infinite matrix needs `homogeneous`, `tail`, `polynomial` or `absorbing`"))
            }
        }
    }
}
