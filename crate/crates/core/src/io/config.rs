//! JSON tool configuration: model axes, per-axis strategies, simulation and
//! repetition-scoring parameters. Unknown keys are rejected; everything else
//! is validated and defaulted by [`ToolConfig::resolve`].

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::aliasing::AliasScanParams;
use crate::error::{Error, Result};
use crate::io::presets;
use crate::norepeat::{default_window, NoRepeatConfig, Normalization};
use crate::rope::{Axis, AxisRope, FrequencySpec, ModelRopeConfig};
use crate::strategies::{AxisPlan, Strategy, TasrParams, YarnParams};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ToolConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub description: Option<String>,
    pub model: ModelSection,
    #[serde(default)]
    pub strategies: Vec<StrategyBlock>,
    #[serde(default)]
    pub simulation: SimulationSection,
    #[serde(default)]
    pub norepeat: NoRepeatSection,
    /// Published per-setting bases kept for reference; never used in computation.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub references: Vec<ReferenceBase>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelSection {
    pub axes: Vec<AxisSection>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AxisSection {
    pub axis: Axis,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub d_prime: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub base: Option<f64>,
    /// Explicit frequencies; overrides generation from `base`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub thetas: Option<Vec<f64>>,
    pub train_len: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub intrinsic_k: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StrategyBlock {
    pub axis: Axis,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scale: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub target_len: Option<u64>,
    pub strategy: StrategySection,
}

fn default_alpha() -> f64 {
    1.0
}

fn default_beta() -> f64 {
    32.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "kebab-case", deny_unknown_fields)]
pub enum StrategySection {
    Pe,
    Pi,
    Ntk,
    Yarn {
        #[serde(default = "default_alpha")]
        alpha: f64,
        #[serde(default = "default_beta")]
        beta: f64,
    },
    Tasr {
        total_timesteps: u64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        switch_timestep: Option<u64>,
        timestep: u64,
    },
    Riflex {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        k: Option<usize>,
    },
    RiflexBase {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        k: Option<usize>,
    },
    RiflexAllLow {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        k: Option<usize>,
    },
    RiflexMulti {
        ks: Vec<usize>,
    },
}

impl StrategySection {
    /// Parameter-free form of a strategy name, as accepted on the command line.
    pub fn from_name(name: &str) -> Result<Self> {
        Ok(match name {
            "pe" => Self::Pe,
            "pi" => Self::Pi,
            "ntk" => Self::Ntk,
            "yarn" => Self::Yarn {
                alpha: default_alpha(),
                beta: default_beta(),
            },
            "tasr" => Self::Tasr {
                total_timesteps: 1000,
                switch_timestep: None,
                timestep: 1000,
            },
            "riflex" => Self::Riflex { k: None },
            "riflex-base" => Self::RiflexBase { k: None },
            "riflex-all-low" => Self::RiflexAllLow { k: None },
            other => {
                return Err(Error::param(
                    "strategy",
                    format!(
                        "unknown strategy `{other}` (expected pe, pi, ntk, yarn, tasr, riflex, riflex-base, riflex-all-low)"
                    ),
                ))
            }
        })
    }

    pub fn name(&self) -> &'static str {
        match self {
            Self::Pe => "pe",
            Self::Pi => "pi",
            Self::Ntk => "ntk",
            Self::Yarn { .. } => "yarn",
            Self::Tasr { .. } => "tasr",
            Self::Riflex { .. } => "riflex",
            Self::RiflexBase { .. } => "riflex-base",
            Self::RiflexAllLow { .. } => "riflex-all-low",
            Self::RiflexMulti { .. } => "riflex-multi",
        }
    }

    /// Replaces the component index of the riflex family.
    pub fn with_k(self, k: usize) -> Self {
        match self {
            Self::Riflex { .. } => Self::Riflex { k: Some(k) },
            Self::RiflexBase { .. } => Self::RiflexBase { k: Some(k) },
            Self::RiflexAllLow { .. } => Self::RiflexAllLow { k: Some(k) },
            other => other,
        }
    }

    /// Resolves to a concrete strategy; riflex-family `k` falls back to `intrinsic_k`.
    pub fn resolve(&self, field: &str, intrinsic_k: Option<usize>) -> Result<Strategy<f64>> {
        let need_k = |k: Option<usize>| {
            k.or(intrinsic_k).ok_or_else(|| {
                Error::Config(format!(
                    "{field}.k: required (no intrinsic_k recorded for this axis)"
                ))
            })
        };
        Ok(match self {
            Self::Pe => Strategy::Pe,
            Self::Pi => Strategy::Pi,
            Self::Ntk => Strategy::Ntk,
            Self::Yarn { alpha, beta } => {
                if !(alpha < beta) {
                    return Err(Error::Config(format!(
                        "{field}: alpha ({alpha}) must be < beta ({beta})"
                    )));
                }
                Strategy::Yarn(YarnParams {
                    alpha: *alpha,
                    beta: *beta,
                })
            }
            Self::Tasr {
                total_timesteps,
                switch_timestep,
                timestep,
            } => {
                let params = match switch_timestep {
                    Some(s) => TasrParams::with_switch(*total_timesteps, *s),
                    None => TasrParams::new(*total_timesteps),
                }
                .map_err(|e| Error::Config(format!("{field}: {e}")))?;
                if timestep > total_timesteps {
                    return Err(Error::Config(format!(
                        "{field}.timestep: {timestep} outside [0, {total_timesteps}]"
                    )));
                }
                Strategy::Tasr {
                    params,
                    timestep: *timestep,
                }
            }
            Self::Riflex { k } => Strategy::Riflex { k: need_k(*k)? },
            Self::RiflexBase { k } => Strategy::RiflexBase { k: need_k(*k)? },
            Self::RiflexAllLow { k } => Strategy::RiflexAllLow { k: need_k(*k)? },
            Self::RiflexMulti { ks } => Strategy::RiflexMulti { ks: ks.clone() },
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimulationSection {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub axis: Option<Axis>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub positions: Option<usize>,
    #[serde(default = "default_alias_threshold")]
    pub alias_threshold: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub min_separation: Option<usize>,
}

fn default_alias_threshold() -> f64 {
    0.999
}

impl Default for SimulationSection {
    fn default() -> Self {
        Self {
            axis: None,
            positions: None,
            alias_threshold: default_alias_threshold(),
            min_separation: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NoRepeatSection {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub axis: Option<Axis>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub expected_period: Option<usize>,
    #[serde(default = "default_threshold")]
    pub threshold: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub window: Option<usize>,
    #[serde(default)]
    pub normalize: Normalization,
}

fn default_threshold() -> f64 {
    100.0
}

impl Default for NoRepeatSection {
    fn default() -> Self {
        Self {
            axis: None,
            expected_period: None,
            threshold: default_threshold(),
            window: None,
            normalize: Normalization::None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReferenceBase {
    pub setting: String,
    pub axis: Axis,
    pub base: f64,
}

/// Validated configuration with every default filled in.
#[derive(Debug, Clone)]
pub struct ResolvedConfig {
    pub name: Option<String>,
    pub model: ModelRopeConfig<f64>,
    pub intrinsic: BTreeMap<Axis, usize>,
    pub plans: BTreeMap<Axis, AxisPlan<f64>>,
    pub simulation_axis: Axis,
    pub positions: usize,
    pub scan: AliasScanParams<f64>,
    pub norepeat_axis: Axis,
    pub expected_period: Option<usize>,
    pub norepeat_threshold: f64,
    pub norepeat_window: Option<usize>,
    pub normalize: Normalization,
    pub references: Vec<ReferenceBase>,
}

impl ResolvedConfig {
    pub fn norepeat_config(&self) -> Result<NoRepeatConfig<f64>> {
        let period = self.expected_period.ok_or_else(|| {
            Error::Config(
                "norepeat.expected_period: required (no intrinsic_k to derive it from)".into(),
            )
        })?;
        let window = self
            .norepeat_window
            .unwrap_or_else(|| default_window(period));
        Ok(
            NoRepeatConfig::with(period, self.norepeat_threshold, window)
                .map_err(|e| Error::Config(format!("norepeat: {e}")))?
                .normalized(self.normalize),
        )
    }

    /// Extrapolation factor planned for `axis`, if any.
    pub fn scale(&self, axis: Axis) -> Option<f64> {
        self.plans.get(&axis).map(|p| p.scale)
    }
}

/// Parses JSON text; syntax errors carry line and column.
pub fn parse_config(text: &str) -> Result<ToolConfig> {
    serde_json::from_str(text).map_err(|e| Error::Config(format!("parse error: {e}")))
}

/// Loads a config file, or a bundled preset when `path` is `preset:<name>`.
pub fn load_config(path: &str) -> Result<ToolConfig> {
    let text = match path.strip_prefix("preset:") {
        Some(name) => presets::preset(name)
            .ok_or_else(|| {
                Error::Config(format!(
                    "unknown preset `{name}` (available: {})",
                    presets::names().join(", ")
                ))
            })?
            .to_string(),
        None => std::fs::read_to_string(Path::new(path))
            .map_err(|e| Error::Config(format!("{path}: {e}")))?,
    };
    parse_config(&text)
}

impl ToolConfig {
    fn axis_section(&self, axis: Axis) -> Option<&AxisSection> {
        self.model.axes.iter().find(|a| a.axis == axis)
    }

    fn build_spec(field: &str, a: &AxisSection) -> Result<FrequencySpec<f64>> {
        if let Some(thetas) = &a.thetas {
            if let Some(d) = a.d_prime {
                if d != 2 * thetas.len() {
                    return Err(Error::Config(format!(
                        "{field}.d_prime: {d} does not match {} thetas",
                        thetas.len()
                    )));
                }
            }
            return FrequencySpec::from_thetas(thetas.clone(), a.base)
                .map_err(|e| Error::Config(format!("{field}.thetas: {e}")));
        }
        let d_prime = a.d_prime.ok_or_else(|| {
            Error::Config(format!("{field}.d_prime: required when thetas are absent"))
        })?;
        if d_prime < 2 || d_prime % 2 != 0 {
            return Err(Error::Config(format!(
                "{field}.d_prime: {d_prime} must be even and >= 2"
            )));
        }
        let base = a.base.ok_or_else(|| {
            Error::Config(format!("{field}.base: required when thetas are absent"))
        })?;
        FrequencySpec::from_base(base, d_prime)
            .map_err(|e| Error::Config(format!("{field}.base: {e}")))
    }

    /// Validates every field and fills defaults.
    pub fn resolve(&self) -> Result<ResolvedConfig> {
        if self.model.axes.is_empty() {
            return Err(Error::Config(
                "model.axes: at least one axis required".into(),
            ));
        }
        let mut axes = Vec::new();
        let mut intrinsic = BTreeMap::new();
        for (i, a) in self.model.axes.iter().enumerate() {
            let field = format!("model.axes[{i}]");
            if self.model.axes[..i].iter().any(|b| b.axis == a.axis) {
                return Err(Error::Config(format!(
                    "{field}.axis: duplicate axis `{}`",
                    a.axis
                )));
            }
            if a.train_len < 2 {
                return Err(Error::Config(format!(
                    "{field}.train_len: {} must be >= 2",
                    a.train_len
                )));
            }
            let spec = Self::build_spec(&field, a)?;
            if let Some(k) = a.intrinsic_k {
                if k == 0 || k > spec.len() {
                    return Err(Error::Config(format!(
                        "{field}.intrinsic_k: {k} outside 1..={}",
                        spec.len()
                    )));
                }
                intrinsic.insert(a.axis, k);
            }
            axes.push(AxisRope {
                axis: a.axis,
                spec,
                train_len: a.train_len,
            });
        }
        let model = ModelRopeConfig::new(axes).map_err(|e| Error::Config(format!("model: {e}")))?;

        let mut plans = BTreeMap::new();
        for (i, b) in self.strategies.iter().enumerate() {
            let field = format!("strategies[{i}]");
            let axis = self
                .axis_section(b.axis)
                .ok_or_else(|| Error::Config(format!("{field}.axis: unknown axis `{}`", b.axis)))?;
            let scale = match (b.scale, b.target_len) {
                (Some(s), None) => s,
                (None, Some(t)) => t as f64 / axis.train_len as f64,
                (Some(_), Some(_)) => {
                    return Err(Error::Config(format!(
                        "{field}: give either scale or target_len, not both"
                    )))
                }
                (None, None) => {
                    return Err(Error::Config(format!("{field}.scale: required")));
                }
            };
            if !(scale >= 1.0) || !scale.is_finite() {
                return Err(Error::Config(format!(
                    "{field}.scale: {scale} must be >= 1"
                )));
            }
            let strategy = b
                .strategy
                .resolve(&format!("{field}.strategy"), axis.intrinsic_k)?;
            if let Some(k) = strategy.intrinsic_k() {
                let len = model.axis(b.axis)?.spec.len();
                if k == 0 || k > len {
                    return Err(Error::Config(format!(
                        "{field}.strategy.k: {k} outside 1..={len}"
                    )));
                }
                if k == 1
                    && matches!(
                        strategy,
                        Strategy::RiflexBase { .. } | Strategy::RiflexAllLow { .. }
                    )
                {
                    return Err(Error::Config(format!(
                        "{field}.strategy.k: base-form strategies need k >= 2"
                    )));
                }
            }
            if plans.insert(b.axis, AxisPlan { strategy, scale }).is_some() {
                return Err(Error::Config(format!(
                    "{field}.axis: more than one strategy for `{}`",
                    b.axis
                )));
            }
        }

        let first = model.axes()[0].axis;
        let sim = &self.simulation;
        let simulation_axis = sim
            .axis
            .or_else(|| plans.keys().next().copied())
            .unwrap_or(first);
        let sim_axis = model.axis(simulation_axis).map_err(|_| {
            Error::Config(format!("simulation.axis: unknown axis `{simulation_axis}`"))
        })?;
        let scale = plans.get(&simulation_axis).map_or(2.0, |p| p.scale);
        let positions = sim
            .positions
            .unwrap_or_else(|| (sim_axis.train_len as f64 * scale).ceil() as usize);
        if positions < 2 {
            return Err(Error::Config("simulation.positions: must be >= 2".into()));
        }
        let scan = AliasScanParams::new(
            sim.alias_threshold,
            sim.min_separation
                .unwrap_or_else(|| sim_axis.train_len.div_ceil(4) as usize),
        )
        .map_err(|e| Error::Config(format!("simulation: {e}")))?;

        let nr = &self.norepeat;
        let norepeat_axis = nr.axis.unwrap_or(first);
        let nr_axis = model
            .axis(norepeat_axis)
            .map_err(|_| Error::Config(format!("norepeat.axis: unknown axis `{norepeat_axis}`")))?;
        let expected_period = match nr.expected_period {
            Some(0) => {
                return Err(Error::Config(
                    "norepeat.expected_period: must be >= 1".into(),
                ))
            }
            Some(p) => Some(p),
            None => intrinsic
                .get(&norepeat_axis)
                .map(|&k| (std::f64::consts::TAU / nr_axis.spec.thetas()[k - 1]).round() as usize),
        };
        if !(nr.threshold > 0.0) || !nr.threshold.is_finite() {
            return Err(Error::Config(format!(
                "norepeat.threshold: {} must be positive",
                nr.threshold
            )));
        }

        Ok(ResolvedConfig {
            name: self.name.clone(),
            model,
            intrinsic,
            plans,
            simulation_axis,
            positions,
            scan,
            norepeat_axis,
            expected_period,
            norepeat_threshold: nr.threshold,
            norepeat_window: nr.window,
            normalize: nr.normalize,
            references: self.references.clone(),
        })
    }
}

/// Serializable view of a resolved config, printed by `--print-effective-config`.
#[derive(Debug, Clone, Serialize)]
pub struct EffectiveConfig {
    pub name: Option<String>,
    pub model: Vec<EffectiveAxis>,
    pub strategies: Vec<EffectiveStrategy>,
    pub simulation: EffectiveSimulation,
    pub norepeat: EffectiveNoRepeat,
    pub references: Vec<ReferenceBase>,
}

#[derive(Debug, Clone, Serialize)]
pub struct EffectiveAxis {
    pub axis: Axis,
    pub d_prime: usize,
    pub base: Option<f64>,
    pub train_len: u64,
    pub thetas: Vec<f64>,
    pub intrinsic_k: Option<usize>,
    pub intrinsic_period: Option<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct EffectiveStrategy {
    pub axis: Axis,
    pub scale: f64,
    pub target_len: f64,
    pub strategy: Strategy<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct EffectiveSimulation {
    pub axis: Axis,
    pub positions: usize,
    pub alias_threshold: f64,
    pub min_separation: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct EffectiveNoRepeat {
    pub axis: Axis,
    pub expected_period: Option<usize>,
    pub threshold: f64,
    pub window: Option<usize>,
    pub normalize: Normalization,
}

impl From<&ResolvedConfig> for EffectiveConfig {
    fn from(r: &ResolvedConfig) -> Self {
        let model = r
            .model
            .axes()
            .iter()
            .map(|a| {
                let k = r.intrinsic.get(&a.axis).copied();
                EffectiveAxis {
                    axis: a.axis,
                    d_prime: a.spec.d_prime(),
                    base: a.spec.base(),
                    train_len: a.train_len,
                    thetas: a.spec.thetas().to_vec(),
                    intrinsic_k: k,
                    intrinsic_period: k.map(|k| std::f64::consts::TAU / a.spec.thetas()[k - 1]),
                }
            })
            .collect();
        let strategies = r
            .plans
            .iter()
            .map(|(&axis, plan)| EffectiveStrategy {
                axis,
                scale: plan.scale,
                target_len: plan.scale * r.model.axis(axis).map_or(0, |a| a.train_len) as f64,
                strategy: plan.strategy.clone(),
            })
            .collect();
        Self {
            name: r.name.clone(),
            model,
            strategies,
            simulation: EffectiveSimulation {
                axis: r.simulation_axis,
                positions: r.positions,
                alias_threshold: r.scan.alias_threshold,
                min_separation: r.scan.min_separation,
            },
            norepeat: EffectiveNoRepeat {
                axis: r.norepeat_axis,
                expected_period: r.expected_period,
                threshold: r.norepeat_threshold,
                window: r
                    .expected_period
                    .map(|p| r.norepeat_window.unwrap_or_else(|| default_window(p))),
                normalize: r.normalize,
            },
            references: r.references.clone(),
        }
    }
}
