//! Length-extrapolation strategies: each maps a [`FrequencySpec`] to an
//! adjusted frequency vector for generating `s` times the training length.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rope::{Axis, FrequencySpec, ModelRopeConfig};
use crate::scalar::Real;

/// Training length `L` and extrapolation factor `s = L'/L`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ExtrapolationParams<T> {
    pub train_len: u64,
    pub scale: T,
}

impl<T: Real> ExtrapolationParams<T> {
    pub fn new(train_len: u64, scale: T) -> Result<Self> {
        if train_len == 0 {
            return Err(Error::param("train_len", "must be positive"));
        }
        if !(scale >= T::one()) || !scale.is_finite() {
            return Err(Error::param(
                "scale",
                format!("must be finite and >= 1, got {scale}"),
            ));
        }
        Ok(Self { train_len, scale })
    }

    pub fn from_lengths(train_len: u64, target_len: u64) -> Result<Self> {
        if train_len == 0 {
            return Err(Error::param("train_len", "must be positive"));
        }
        if target_len < train_len {
            return Err(Error::param(
                "target_len",
                format!("must be >= train_len ({train_len}), got {target_len}"),
            ));
        }
        Self::new(train_len, T::from_len(target_len) / T::from_len(train_len))
    }

    /// `L * s`, possibly non-integer.
    pub fn target_len(&self) -> T {
        T::from_len(self.train_len) * self.scale
    }

    /// Largest frequency that stays within one cycle over `L * s`: `2π / (L s)`.
    pub fn single_cycle_limit(&self) -> T {
        T::TAU() / self.target_len()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct YarnParams<T> {
    pub alpha: T,
    pub beta: T,
}

impl<T: Real> Default for YarnParams<T> {
    fn default() -> Self {
        Self {
            alpha: T::one(),
            beta: T::lit(32.0),
        }
    }
}

impl<T: Real> YarnParams<T> {
    /// Blend weight: 1 above `beta`, 0 below `alpha`, linear in between.
    pub fn gamma(&self, r: T) -> T {
        if r > self.beta {
            T::one()
        } else if r < self.alpha {
            T::zero()
        } else {
            (r - self.alpha) / (self.beta - self.alpha)
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct TasrParams {
    pub total_timesteps: u64,
    pub switch_timestep: u64,
}

impl TasrParams {
    /// Switch at `T / 2` (integer division).
    pub fn new(total_timesteps: u64) -> Result<Self> {
        Self::with_switch(total_timesteps, total_timesteps / 2)
    }

    pub fn with_switch(total_timesteps: u64, switch_timestep: u64) -> Result<Self> {
        if total_timesteps == 0 {
            return Err(Error::param("total_timesteps", "must be positive"));
        }
        if switch_timestep > total_timesteps {
            return Err(Error::param(
                "switch_timestep",
                format!("must lie in [0, {total_timesteps}], got {switch_timestep}"),
            ));
        }
        Ok(Self {
            total_timesteps,
            switch_timestep,
        })
    }
}

/// Output of a strategy. Indices are 1-based.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StrategyResult<T> {
    pub strategy: String,
    pub thetas_old: Vec<T>,
    pub thetas_new: Vec<T>,
    pub modified_indices: Vec<usize>,
    /// Base of the resulting spectrum when it is still fully base-generated.
    pub base: Option<T>,
    /// Base whose component `k` meets the single-cycle limit (riflex-base, riflex-all-low).
    pub intrinsic_base: Option<T>,
    /// The strategy had nothing to change (e.g. the intrinsic component already fits).
    pub no_op: bool,
    pub notes: Vec<String>,
}

impl<T: Real> StrategyResult<T> {
    fn build(
        name: impl Into<String>,
        spec: &FrequencySpec<T>,
        thetas_new: Vec<T>,
        base: Option<T>,
    ) -> Self {
        let modified_indices = spec
            .thetas()
            .iter()
            .zip(&thetas_new)
            .enumerate()
            .filter(|(_, (a, b))| a != b)
            .map(|(i, _)| i + 1)
            .collect();
        Self {
            strategy: name.into(),
            thetas_old: spec.thetas().to_vec(),
            thetas_new,
            modified_indices,
            base,
            intrinsic_base: None,
            no_op: false,
            notes: Vec::new(),
        }
    }

    /// The adjusted spectrum as a spec.
    pub fn to_spec(&self) -> FrequencySpec<T> {
        FrequencySpec::from_thetas(self.thetas_new.clone(), self.base)
            .expect("strategies keep frequencies positive")
    }
}

/// Position extrapolation: frequencies unchanged.
pub fn pe<T: Real>(spec: &FrequencySpec<T>, _params: &ExtrapolationParams<T>) -> StrategyResult<T> {
    StrategyResult::build("pe", spec, spec.thetas().to_vec(), spec.base())
}

/// Position interpolation: `theta_j / s`.
pub fn pi<T: Real>(spec: &FrequencySpec<T>, params: &ExtrapolationParams<T>) -> StrategyResult<T> {
    let s = params.scale;
    let thetas = spec.thetas().iter().map(|&t| t / s).collect();
    let base = if s == T::one() { spec.base() } else { None };
    StrategyResult::build("pi", spec, thetas, base)
}

/// NTK-aware base rescaling: `(lambda b)^(-2(j-1)/d')` with `lambda = s^(d'/(d'-2))`.
pub fn ntk<T: Real>(
    spec: &FrequencySpec<T>,
    params: &ExtrapolationParams<T>,
) -> Result<StrategyResult<T>> {
    let d_prime = spec.d_prime();
    if d_prime < 4 {
        return Err(Error::DegenerateDimension(
            "ntk needs d_prime >= 4 (lambda = s^(d'/(d'-2)) is undefined at d' = 2)".into(),
        ));
    }
    let base = spec.base().ok_or(Error::MissingBase("ntk"))?;
    let d = T::from_len(d_prime as u64);
    let two = T::lit(2.0);
    let lambda = params.scale.powf(d / (d - two));
    let new_base = lambda * base;
    let thetas = (0..spec.len())
        .map(|i| {
            if i == 0 {
                T::one()
            } else {
                new_base.powf(-(two * T::from_len(i as u64)) / d)
            }
        })
        .collect();
    Ok(StrategyResult::build("ntk", spec, thetas, Some(new_base)))
}

/// Ramp blend between keeping `theta_j` and dividing it by `s`, driven by the
/// repeat count `r_j = L theta_j / 2π` over the training length.
pub fn yarn<T: Real>(
    spec: &FrequencySpec<T>,
    params: &ExtrapolationParams<T>,
    yarn: &YarnParams<T>,
) -> Result<StrategyResult<T>> {
    if !(yarn.alpha < yarn.beta) {
        return Err(Error::InvalidThresholds {
            alpha: yarn.alpha.to_f64_lossy(),
            beta: yarn.beta.to_f64_lossy(),
        });
    }
    let len = T::from_len(params.train_len);
    let s = params.scale;
    let repeat = |t: T| len * t / T::TAU();
    let thetas = spec
        .thetas()
        .iter()
        .map(|&t| {
            let g = yarn.gamma(repeat(t));
            g * t + (T::one() - g) * t / s
        })
        .collect();
    let mut out = StrategyResult::build("yarn", spec, thetas, None);
    if out.modified_indices.is_empty() {
        out.base = spec.base();
    }
    let r_first = repeat(spec.thetas()[0]);
    let r_last = repeat(spec.thetas()[spec.len() - 1]);
    if !(r_last <= yarn.alpha && yarn.beta <= r_first) {
        out.notes.push(format!(
            "thresholds outside the admissible range r_last ({r_last}) <= alpha ({}) < beta ({}) <= r_1 ({r_first})",
            yarn.alpha, yarn.beta
        ));
    }
    Ok(out)
}

/// Timestep switch: PI for `t > switch_timestep`, NTK otherwise.
pub fn tasr<T: Real>(
    spec: &FrequencySpec<T>,
    params: &ExtrapolationParams<T>,
    tasr: &TasrParams,
    t: u64,
) -> Result<StrategyResult<T>> {
    if t > tasr.total_timesteps {
        return Err(Error::TimestepOutOfRange {
            t,
            total: tasr.total_timesteps,
        });
    }
    let mut out = if t > tasr.switch_timestep {
        let mut r = pi(spec, params);
        r.strategy = "tasr(pi)".into();
        r
    } else {
        let mut r = ntk(spec, params)?;
        r.strategy = "tasr(ntk)".into();
        r
    };
    out.notes.push(format!(
        "timestep {t} of {}, switch at {}",
        tasr.total_timesteps, tasr.switch_timestep
    ));
    Ok(out)
}

/// Sets `theta_k = 2π / (L s)`; every other component is left bit-identical.
/// If `theta_k` already fits within one cycle the result is a flagged no-op.
pub fn riflex<T: Real>(
    spec: &FrequencySpec<T>,
    params: &ExtrapolationParams<T>,
    k: usize,
) -> Result<StrategyResult<T>> {
    spec.check_index(k)?;
    let limit = params.single_cycle_limit();
    let mut thetas = spec.thetas().to_vec();
    let no_op = thetas[k - 1] <= limit;
    if !no_op {
        thetas[k - 1] = limit;
    }
    let base = if no_op { spec.base() } else { None };
    let mut out = StrategyResult::build("riflex", spec, thetas, base);
    if no_op {
        out.no_op = true;
        out.notes.push(format!(
            "theta_{k} = {} already <= 2π/(L s) = {limit}; nothing to change",
            spec.thetas()[k - 1]
        ));
    }
    Ok(out)
}

/// Base `b'` with `b'^(-2(k-1)/d') = 2π / (L s)`.
pub fn intrinsic_base<T: Real>(
    d_prime: usize,
    params: &ExtrapolationParams<T>,
    k: usize,
) -> Result<T> {
    if k == 1 {
        return Err(Error::DegenerateIntrinsic);
    }
    let d = T::from_len(d_prime as u64);
    let exponent = d / (T::lit(2.0) * T::from_len(k as u64 - 1));
    Ok((params.target_len() / T::TAU()).powf(exponent))
}

/// RIFLEx expressed as a base for checkpoint configs that parameterise the
/// intrinsic component by its own base. Only component `k` is modified; the
/// other components keep the original values.
pub fn riflex_base_form<T: Real>(
    spec: &FrequencySpec<T>,
    params: &ExtrapolationParams<T>,
    k: usize,
) -> Result<(T, StrategyResult<T>)> {
    if k == 1 {
        return Err(Error::DegenerateIntrinsic);
    }
    spec.check_index(k)?;
    let new_base = intrinsic_base(spec.d_prime(), params, k)?;
    let mut out = riflex(spec, params, k)?;
    out.strategy = "riflex-base".into();
    out.intrinsic_base = Some(new_base);
    Ok((new_base, out))
}

/// Raises the base for every component `j >= k` so that component `k` meets
/// the single-cycle limit; components `j < k` are untouched.
pub fn riflex_all_low<T: Real>(
    spec: &FrequencySpec<T>,
    params: &ExtrapolationParams<T>,
    k: usize,
) -> Result<StrategyResult<T>> {
    if k == 1 {
        return Err(Error::DegenerateIntrinsic);
    }
    spec.check_index(k)?;
    let limit = params.single_cycle_limit();
    let new_base = intrinsic_base(spec.d_prime(), params, k)?;
    let mut thetas = spec.thetas().to_vec();
    let no_op = thetas[k - 1] <= limit;
    if !no_op {
        let d = T::from_len(spec.d_prime() as u64);
        let two = T::lit(2.0);
        thetas[k - 1] = limit;
        for (i, theta) in thetas.iter_mut().enumerate().skip(k) {
            *theta = new_base.powf(-(two * T::from_len(i as u64)) / d);
        }
    }
    let mut out = StrategyResult::build(
        "riflex-all-low",
        spec,
        thetas,
        if no_op { spec.base() } else { None },
    );
    out.intrinsic_base = Some(new_base);
    if no_op {
        out.no_op = true;
        out.notes.push(format!(
            "theta_{k} already <= 2π/(L s) = {limit}; nothing to change"
        ));
    } else if spec.thetas()[k..]
        .iter()
        .zip(&out.thetas_new[k..])
        .any(|(old, new)| new > old)
    {
        out.notes.push(
            "some components below k were raised; the input spectrum is not base-generated".into(),
        );
    }
    Ok(out)
}

/// Applies [`riflex`] to each listed component in turn. Experimental: for
/// models whose intrinsic component varies between samples.
pub fn riflex_multi<T: Real>(
    spec: &FrequencySpec<T>,
    params: &ExtrapolationParams<T>,
    ks: &[usize],
) -> Result<StrategyResult<T>> {
    if ks.is_empty() {
        return Err(Error::param("k", "at least one component required"));
    }
    let mut current = spec.clone();
    for &k in ks {
        current = riflex(&current, params, k)?.to_spec();
    }
    let base = if current.thetas() == spec.thetas() {
        spec.base()
    } else {
        None
    };
    let mut out = StrategyResult::build("riflex-multi", spec, current.into_thetas(), base);
    out.no_op = out.modified_indices.is_empty();
    out.notes
        .push("experimental: several intrinsic components".into());
    Ok(out)
}

/// A strategy with its strategy-specific parameters.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "name", rename_all = "kebab-case")]
pub enum Strategy<T> {
    Pe,
    Pi,
    Ntk,
    Yarn(YarnParams<T>),
    Tasr { params: TasrParams, timestep: u64 },
    Riflex { k: usize },
    RiflexBase { k: usize },
    RiflexAllLow { k: usize },
    RiflexMulti { ks: Vec<usize> },
}

impl<T: Real> Strategy<T> {
    pub fn name(&self) -> &'static str {
        match self {
            Strategy::Pe => "pe",
            Strategy::Pi => "pi",
            Strategy::Ntk => "ntk",
            Strategy::Yarn(_) => "yarn",
            Strategy::Tasr { .. } => "tasr",
            Strategy::Riflex { .. } => "riflex",
            Strategy::RiflexBase { .. } => "riflex-base",
            Strategy::RiflexAllLow { .. } => "riflex-all-low",
            Strategy::RiflexMulti { .. } => "riflex-multi",
        }
    }

    /// The component the strategy targets, if any.
    pub fn intrinsic_k(&self) -> Option<usize> {
        match self {
            Strategy::Riflex { k } | Strategy::RiflexBase { k } | Strategy::RiflexAllLow { k } => {
                Some(*k)
            }
            _ => None,
        }
    }

    pub fn apply(
        &self,
        spec: &FrequencySpec<T>,
        params: &ExtrapolationParams<T>,
    ) -> Result<StrategyResult<T>> {
        match self {
            Strategy::Pe => Ok(pe(spec, params)),
            Strategy::Pi => Ok(pi(spec, params)),
            Strategy::Ntk => ntk(spec, params),
            Strategy::Yarn(y) => yarn(spec, params, y),
            Strategy::Tasr {
                params: tp,
                timestep,
            } => tasr(spec, params, tp, *timestep),
            Strategy::Riflex { k } => riflex(spec, params, *k),
            Strategy::RiflexBase { k } => riflex_base_form(spec, params, *k).map(|(_, r)| r),
            Strategy::RiflexAllLow { k } => riflex_all_low(spec, params, *k),
            Strategy::RiflexMulti { ks } => riflex_multi(spec, params, ks),
        }
    }
}

/// Strategy and extrapolation factor for one axis.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AxisPlan<T> {
    pub strategy: Strategy<T>,
    pub scale: T,
}

/// Per-axis strategy results keyed by axis.
pub type AxisResults<T> = BTreeMap<Axis, StrategyResult<T>>;

/// Transforms each planned axis independently; unplanned axes are copied.
pub fn apply_strategy_multi<T: Real>(
    config: &ModelRopeConfig<T>,
    plans: &BTreeMap<Axis, AxisPlan<T>>,
) -> Result<(ModelRopeConfig<T>, AxisResults<T>)> {
    let mut out = config.clone();
    let mut results = BTreeMap::new();
    for (&axis, plan) in plans {
        let entry = out.axis_mut(axis)?;
        let params = ExtrapolationParams::new(entry.train_len, plan.scale)?;
        let result = plan.strategy.apply(&entry.spec, &params)?;
        entry.spec = result.to_spec();
        results.insert(axis, result);
    }
    Ok((out, results))
}
