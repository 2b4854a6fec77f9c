//! Run configuration: JSON schema and conversion to library types.

use std::collections::BTreeMap;
use std::path::Path;

use anyhow::{anyhow, bail, Context, Result};
use hypemb_core::cochain::{Cochain, CochainSpec, Domain};
use hypemb_core::group::{FactorSpec, GroupModel, RelativeGenerators, Window};
use hypemb_core::{CoefficientKind, ConedSpace, FamilyCochain, RelativeMetric};
use serde::Deserialize;
use serde_json::Value;

use crate::encode::{parse_rational, parse_tuple};

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub model: ModelConfig,
    pub space: SpaceConfig,
    pub window: WindowConfig,
    #[serde(default)]
    pub cochain_family: Vec<CochainConfig>,
    #[serde(default)]
    pub params: BTreeMap<String, Value>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelConfig {
    pub factors: Vec<FactorConfig>,
    pub relative_generators: GeneratorMode,
}

#[derive(Debug, Deserialize, Clone, Copy, PartialEq, Eq)]
#[serde(rename_all = "snake_case")]
pub enum GeneratorMode {
    None,
    FactorGenerators,
}

#[derive(Debug, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum FactorConfig {
    FreeAbelian { rank: usize, generators: Vec<String> },
    Cyclic { order: u64, generators: Vec<String> },
    Free { rank: usize, generators: Vec<String> },
    FiniteTable { table: Vec<Vec<u32>>, generator_elements: Vec<u32>, generators: Vec<String> },
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpaceConfig {
    #[serde(default = "one")]
    pub separation: u64,
    pub relative_metric: MetricMode,
}

fn one() -> u64 {
    1
}

#[derive(Debug, Deserialize, Clone, Copy, PartialEq, Eq)]
#[serde(rename_all = "snake_case")]
pub enum MetricMode {
    InfinityOffdiag,
    WordMetric,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WindowConfig {
    pub radius: usize,
    /// One entry per factor; `null` for finite factors.
    pub truncation: Vec<Option<u64>>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CochainConfig {
    pub kernel: String,
    pub degree: usize,
    #[serde(default = "scalar")]
    pub coefficients: String,
    #[serde(default)]
    pub params: BTreeMap<String, Value>,
}

fn scalar() -> String {
    "scalar".into()
}

/// Invalid input, as opposed to a failed check. Maps to exit status 2.
#[derive(Debug)]
pub struct ConfigError(pub String);

impl ConfigError {
    pub fn new(msg: impl Into<String>) -> Self {
        ConfigError(msg.into())
    }
}

impl std::fmt::Display for ConfigError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for ConfigError {}

/// A validated configuration.
pub struct Loaded {
    pub space: ConedSpace,
    pub window: Window,
    pub family: Option<FamilyCochain>,
    pub params: BTreeMap<String, Value>,
}

impl Loaded {
    pub fn model(&self) -> &GroupModel {
        self.space.model()
    }

    pub fn family(&self) -> Result<&FamilyCochain> {
        Ok(self.family.as_ref().ok_or_else(|| ConfigError::new("this command needs a cochain_family"))?)
    }

    pub fn param_u64(&self, key: &str, default: u64) -> Result<u64> {
        match self.params.get(key) {
            None => Ok(default),
            Some(v) => Ok(v.as_u64().ok_or_else(|| ConfigError::new(format!("params.{key} must be a non-negative integer")))?),
        }
    }
}

pub fn read(path: &Path) -> Result<RunConfig> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))
}

pub fn load(config: RunConfig, radius: Option<usize>, degree: Option<usize>) -> Result<Loaded> {
    let factors = config
        .model
        .factors
        .into_iter()
        .map(|f| {
            Ok(match f {
                FactorConfig::FreeAbelian { rank, generators } => FactorSpec::free_abelian(rank, generators)?,
                FactorConfig::Cyclic { order, generators } => {
                    let [name]: [String; 1] =
                        generators.try_into().map_err(|_| anyhow!("cyclic factors take exactly one generator name"))?;
                    FactorSpec::cyclic(order, name)?
                }
                FactorConfig::Free { rank, generators } => FactorSpec::free(rank, generators)?,
                FactorConfig::FiniteTable { table, generator_elements, generators } => {
                    FactorSpec::finite_table(table, generator_elements, generators)?
                }
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let generators = match config.model.relative_generators {
        GeneratorMode::None => RelativeGenerators::None,
        GeneratorMode::FactorGenerators => RelativeGenerators::FactorGenerators,
    };
    let model = GroupModel::new(factors, generators)?;
    let metric = match config.space.relative_metric {
        MetricMode::InfinityOffdiag => RelativeMetric::InfinityOffDiagonal,
        MetricMode::WordMetric => RelativeMetric::WordMetric,
    };
    if config.window.truncation.len() != model.factors().len() {
        bail!("window.truncation needs one entry per factor");
    }
    for (i, (t, f)) in config.window.truncation.iter().zip(model.factors()).enumerate() {
        if t.is_none() && f.is_infinite() {
            bail!("window.truncation[{i}] is required for the infinite factor {i}");
        }
    }
    let window = Window::new(radius.unwrap_or(config.window.radius), config.window.truncation);
    let space = ConedSpace::new(model, config.space.separation, metric)?;
    let family = if config.cochain_family.is_empty() {
        None
    } else {
        if config.cochain_family.len() != space.model().factors().len() {
            bail!("cochain_family needs one entry per factor");
        }
        let entries = config
            .cochain_family
            .iter()
            .enumerate()
            .map(|(i, c)| cochain(space.model(), i, c, degree))
            .collect::<Result<Vec<_>>>()?;
        Some(FamilyCochain::new(space.model(), entries)?)
    };
    Ok(Loaded { space, window, family, params: config.params })
}

fn rationals(params: &BTreeMap<String, Value>, key: &str) -> Result<Vec<hypemb_core::Rational>> {
    params
        .get(key)
        .and_then(Value::as_array)
        .ok_or_else(|| anyhow!("params.{key} must be an array of rationals"))?
        .iter()
        .map(parse_rational)
        .collect()
}

/// One family entry, living on factor `factor`.
pub fn cochain(model: &GroupModel, factor: usize, c: &CochainConfig, degree: Option<usize>) -> Result<CochainSpec> {
    let kind = match c.coefficients.as_str() {
        "scalar" => CoefficientKind::Scalar,
        "edge_function" => CoefficientKind::EdgeFunction,
        other => bail!("unknown coefficient kind {other:?}"),
    };
    let degree = degree.unwrap_or(c.degree);
    let spec = match c.kernel.as_str() {
        "zero" => CochainSpec::zero(degree, kind, Domain::Factor(factor)),
        "volume_zn" => CochainSpec::volume(model, factor)?,
        "homomorphism" => CochainSpec::homomorphism(model, factor, rationals(&c.params, "weights")?)?,
        "homomorphism_cup" => {
            CochainSpec::cup(model, factor, rationals(&c.params, "alpha")?, rationals(&c.params, "beta")?)?
        }
        "edge_flow" => CochainSpec::edge_flow(model, factor)?,
        "edge_flow_delta" => CochainSpec::edge_flow_delta(model, factor)?,
        "table" => {
            let rows = c.params.get("entries").and_then(Value::as_array).ok_or_else(|| anyhow!("table needs params.entries"))?;
            let mut entries = BTreeMap::new();
            for row in rows {
                let pair = row.as_array().filter(|p| p.len() == 2).ok_or_else(|| anyhow!("table rows are [tuple, value]"))?;
                entries.insert(parse_tuple(model, &pair[0])?, parse_rational(&pair[1])?);
            }
            CochainSpec::table(degree, Domain::Factor(factor), entries)?
        }
        other => bail!("unknown kernel {other:?}"),
    };
    if spec.degree() != degree {
        bail!("kernel {} has degree {}, config says {degree}", c.kernel, spec.degree());
    }
    if spec.kind() != kind {
        bail!("kernel {} takes {:?} coefficients", c.kernel, spec.kind());
    }
    let alternate = c.params.get("alternate").and_then(Value::as_bool).unwrap_or(false);
    Ok(if alternate { spec.alternation() } else { spec })
}
