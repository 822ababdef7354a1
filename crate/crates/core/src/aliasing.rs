//! Encoding-level aliasing simulator.
//!
//! Content repetition in an extrapolated model shows up here as phase
//! collisions: two distant positions whose positional signatures nearly
//! coincide. Slow motion shows up as a smaller adjacent-position delta
//! envelope. Both are proxies computed from the encodings alone; no model
//! output is involved.

use rayon::prelude::*;
use serde::Serialize;

use crate::diagnostics::{check_non_repetition, delta_envelope, NonRepetition};
use crate::error::{Error, Result};
use crate::rope::{positional_signature, Axis, FrequencySpec, ModelRopeConfig};
use crate::scalar::Real;
use crate::strategies::{AxisPlan, ExtrapolationParams, StrategyResult};

/// Dense, row-major `P x P` cosine-similarity matrix over positions `0..P`.
#[derive(Debug, Clone, PartialEq)]
pub struct SimilarityMatrix<T> {
    size: usize,
    values: Vec<T>,
}

impl<T: Real> SimilarityMatrix<T> {
    pub fn size(&self) -> usize {
        self.size
    }

    pub fn get(&self, p: usize, q: usize) -> T {
        self.values[p * self.size + q]
    }

    pub fn row(&self, p: usize) -> &[T] {
        &self.values[p * self.size..(p + 1) * self.size]
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn from_rows(size: usize, values: Vec<T>) -> Result<Self> {
        if values.len() != size * size {
            return Err(Error::DimensionMismatch {
                expected: size * size,
                actual: values.len(),
            });
        }
        Ok(Self { size, values })
    }
}

fn restricted_signature<T: Real>(
    p: u64,
    spec: &FrequencySpec<T>,
    subset: Option<&[usize]>,
) -> Vec<T> {
    let full = positional_signature(p, spec);
    match subset {
        None => full,
        Some(js) => js
            .iter()
            .flat_map(|&j| [full[2 * j - 2], full[2 * j - 1]])
            .collect(),
    }
}

fn validate_subset<T: Real>(spec: &FrequencySpec<T>, subset: Option<&[usize]>) -> Result<()> {
    if let Some(js) = subset {
        if js.is_empty() {
            return Err(Error::EmptySubset);
        }
        for &j in js {
            spec.check_index(j)?;
        }
    }
    Ok(())
}

/// Pairwise cosine similarity of positional signatures, optionally restricted
/// to the 1-based components in `subset`. Rows are computed in parallel; each
/// entry is an independent dot product, so the result does not depend on the
/// thread schedule.
pub fn signature_matrix<T: Real>(
    spec: &FrequencySpec<T>,
    positions: usize,
    subset: Option<&[usize]>,
) -> Result<SimilarityMatrix<T>> {
    if positions == 0 {
        return Err(Error::param("positions", "must be >= 1"));
    }
    validate_subset(spec, subset)?;
    let signatures: Vec<Vec<T>> = (0..positions as u64)
        .into_par_iter()
        .map(|p| restricted_signature(p, spec, subset))
        .collect();
    let norms: Vec<T> = signatures
        .iter()
        .map(|s| s.iter().fold(T::zero(), |acc, v| acc + *v * *v).sqrt())
        .collect();
    let mut values = vec![T::zero(); positions * positions];
    values
        .par_chunks_mut(positions)
        .enumerate()
        .for_each(|(p, row)| {
            let a = &signatures[p];
            for (q, cell) in row.iter_mut().enumerate() {
                let dot = a
                    .iter()
                    .zip(&signatures[q])
                    .fold(T::zero(), |acc, (x, y)| acc + *x * *y);
                *cell = dot / (norms[p] * norms[q]);
            }
        });
    Ok(SimilarityMatrix {
        size: positions,
        values,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AliasScanParams<T> {
    pub alias_threshold: T,
    pub min_separation: usize,
}

impl<T: Real> AliasScanParams<T> {
    pub fn new(alias_threshold: T, min_separation: usize) -> Result<Self> {
        if !(alias_threshold > T::zero() && alias_threshold <= T::one()) {
            return Err(Error::param(
                "alias_threshold",
                format!("must lie in (0, 1], got {alias_threshold}"),
            ));
        }
        if min_separation == 0 {
            return Err(Error::param("min_separation", "must be >= 1"));
        }
        Ok(Self {
            alias_threshold,
            min_separation,
        })
    }

    /// Threshold 0.999 and minimum separation `ceil(L / 4)`.
    pub fn for_train_len(train_len: u64) -> Self {
        Self {
            alias_threshold: T::lit(0.999),
            min_separation: (train_len.div_ceil(4)).max(1) as usize,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Alias<T> {
    pub p: usize,
    pub p_prime: usize,
    pub similarity: T,
}

/// Smallest `p` with some `p' <= p - min_separation` whose similarity reaches
/// the threshold; `p'` is the most similar such position (ties: smallest).
pub fn scan_first_alias<T: Real>(
    matrix: &SimilarityMatrix<T>,
    params: &AliasScanParams<T>,
) -> Option<Alias<T>> {
    let sep = params.min_separation;
    for p in sep..matrix.size {
        let row = matrix.row(p);
        let mut best: Option<(usize, T)> = None;
        for (q, &sim) in row[..=p - sep].iter().enumerate() {
            if sim >= params.alias_threshold && best.is_none_or(|(_, b)| sim > b) {
                best = Some((q, sim));
            }
        }
        if let Some((p_prime, similarity)) = best {
            return Some(Alias {
                p,
                p_prime,
                similarity,
            });
        }
    }
    None
}

/// Estimates the first repetition position from the encodings alone: the
/// first alias of the full-spectrum matrix over `probe_len` positions.
pub fn propose_observed_n<T: Real>(
    spec: &FrequencySpec<T>,
    probe_len: usize,
    params: &AliasScanParams<T>,
) -> Result<u64> {
    if probe_len < 4 {
        return Err(Error::param("probe_len", "must be >= 4"));
    }
    let m = signature_matrix(spec, probe_len, None)?;
    scan_first_alias(&m, params)
        .map(|a| a.p as u64)
        .ok_or(Error::NoRepetitionFound { probe_len })
}

/// Mean over components of the adjacent-position delta envelope.
pub fn motion_proxy<T: Real>(spec: &FrequencySpec<T>) -> T {
    let sum = spec
        .thetas()
        .iter()
        .fold(T::zero(), |acc, &t| acc + delta_envelope(t));
    sum / T::from_len(spec.len() as u64)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScanSummary<T> {
    /// 1-based components the scan was restricted to; `None` means all.
    pub components: Option<Vec<usize>>,
    pub first_alias: Option<Alias<T>>,
}

/// Quantitative analog of a side-by-side extrapolation comparison for one
/// strategy on one axis.
#[derive(Debug, Clone, Serialize)]
pub struct SimilarityReport<T> {
    pub strategy: String,
    pub axis: Axis,
    pub train_len: u64,
    pub scale: T,
    pub positions: usize,
    pub scan: AliasScanParams<T>,
    pub thetas: Vec<T>,
    pub modified_indices: Vec<usize>,
    pub full_spectrum: ScanSummary<T>,
    pub intrinsic: Option<ScanSummary<T>>,
    pub motion_proxy: T,
    pub baseline_motion_proxy: T,
    pub non_repetition: Option<NonRepetition<T>>,
    #[serde(skip)]
    pub matrix: SimilarityMatrix<T>,
    #[serde(skip)]
    pub intrinsic_matrix: Option<SimilarityMatrix<T>>,
    #[serde(skip)]
    pub result: StrategyResult<T>,
}

impl<T: Real> SimilarityReport<T> {
    /// First alias of the intrinsic scan when one was requested, else of the full scan.
    pub fn first_alias(&self) -> Option<Alias<T>> {
        self.intrinsic
            .as_ref()
            .and_then(|s| s.first_alias)
            .or(self.full_spectrum.first_alias)
    }

    /// Whether either scan found an alias.
    pub fn any_alias(&self) -> bool {
        self.full_spectrum.first_alias.is_some()
            || self
                .intrinsic
                .as_ref()
                .is_some_and(|s| s.first_alias.is_some())
    }
}

/// Applies `plan` to `axis`, builds the full-spectrum (and, when `intrinsic_k`
/// is given, the intrinsic-component) similarity matrix over `positions`
/// (default `ceil(s L)`), scans both for aliases and computes motion proxies.
pub fn strategy_report<T: Real>(
    config: &ModelRopeConfig<T>,
    axis: Axis,
    plan: &AxisPlan<T>,
    positions: Option<usize>,
    scan: &AliasScanParams<T>,
    intrinsic_k: Option<usize>,
) -> Result<SimilarityReport<T>> {
    let entry = config.axis(axis)?;
    let params = ExtrapolationParams::new(entry.train_len, plan.scale)?;
    let result = plan.strategy.apply(&entry.spec, &params)?;
    let spec = result.to_spec();
    let positions = match positions {
        Some(p) => p,
        None => params
            .target_len()
            .ceil()
            .to_usize()
            .ok_or_else(|| Error::param("positions", "s * L not representable"))?,
    };
    let matrix = signature_matrix(&spec, positions, None)?;
    let full_spectrum = ScanSummary {
        components: None,
        first_alias: scan_first_alias(&matrix, scan),
    };
    let (intrinsic, intrinsic_matrix, non_repetition) = match intrinsic_k {
        Some(k) => {
            let m = signature_matrix(&spec, positions, Some(&[k]))?;
            let summary = ScanSummary {
                components: Some(vec![k]),
                first_alias: scan_first_alias(&m, scan),
            };
            let check = check_non_repetition(&spec, entry.train_len, plan.scale, k)?;
            (Some(summary), Some(m), Some(check))
        }
        None => (None, None, None),
    };
    Ok(SimilarityReport {
        strategy: result.strategy.clone(),
        axis,
        train_len: entry.train_len,
        scale: plan.scale,
        positions,
        scan: *scan,
        thetas: result.thetas_new.clone(),
        modified_indices: result.modified_indices.clone(),
        full_spectrum,
        intrinsic,
        motion_proxy: motion_proxy(&spec),
        baseline_motion_proxy: motion_proxy(&entry.spec),
        non_repetition,
        matrix,
        intrinsic_matrix,
        result,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rope::make_frequencies;
    use crate::strategies::{pi, riflex, Strategy};
    use std::f64::consts::{PI, TAU};

    fn single(theta: f64) -> FrequencySpec<f64> {
        FrequencySpec::from_thetas(vec![theta], None).unwrap()
    }

    #[test]
    fn exact_period_entries() {
        let n = 24;
        let m = signature_matrix(&single(TAU / n as f64), 2 * n, None).unwrap();
        for p in 0..n {
            assert!((m.get(p, p + n) - 1.0).abs() < 1e-9);
        }
        let one = signature_matrix(&make_frequencies(100.0_f64, 8).unwrap(), 1, None).unwrap();
        assert_eq!(one.size(), 1);
        assert!((one.get(0, 0) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn symmetric_unit_diagonal() {
        let spec = make_frequencies(37.0_f64, 12).unwrap();
        let m = signature_matrix(&spec, 50, None).unwrap();
        for p in 0..50 {
            assert!((m.get(p, p) - 1.0).abs() < 1e-12);
            for q in 0..50 {
                assert_eq!(m.get(p, q), m.get(q, p));
            }
        }
    }

    #[test]
    fn subset_errors() {
        let spec = make_frequencies(37.0, 4).unwrap();
        assert!(matches!(
            signature_matrix(&spec, 10, Some(&[])),
            Err(Error::EmptySubset)
        ));
        assert!(signature_matrix(&spec, 10, Some(&[3])).is_err());
        assert!(signature_matrix(&spec, 0, None).is_err());
    }

    #[test]
    fn pe_single_component_alias() {
        let l = 64_u64;
        let spec = single(2.0 * TAU / l as f64);
        let m = signature_matrix(&spec, 2 * l as usize, None).unwrap();
        let a = scan_first_alias(&m, &AliasScanParams::for_train_len(l)).unwrap();
        assert_eq!((a.p, a.p_prime), (32, 0));
        assert!(a.similarity >= 0.999);
    }

    #[test]
    fn riflex_intrinsic_no_alias() {
        let l = 64_u64;
        let s = 2.0;
        let spec = FrequencySpec::from_thetas(vec![1.0, 2.0 * TAU / l as f64], None).unwrap();
        let r = riflex(&spec, &ExtrapolationParams::new(l, s).unwrap(), 2).unwrap();
        let m = signature_matrix(&r.to_spec(), (l as f64 * s).ceil() as usize, Some(&[2])).unwrap();
        let strict = AliasScanParams::new(1.0 - 1e-6, 1).unwrap();
        assert!(scan_first_alias(&m, &strict).is_none());
    }

    #[test]
    fn threshold_one_needs_exact_match() {
        let m = signature_matrix(&single(0.7), 40, None).unwrap();
        let p = AliasScanParams::new(1.0, 5).unwrap();
        assert!(scan_first_alias(&m, &p).is_none());
        assert!(AliasScanParams::<f64>::new(0.0, 5).is_err());
        assert!(AliasScanParams::<f64>::new(1.1, 5).is_err());
        assert!(AliasScanParams::<f64>::new(0.9, 0).is_err());
    }

    #[test]
    fn propose_dominated_spectrum() {
        let n = 20.0;
        let spec = FrequencySpec::from_thetas(vec![TAU / n, 1e-5, 1e-6], None).unwrap();
        let params = AliasScanParams::new(0.999, 5).unwrap();
        let got = propose_observed_n(&spec, 64, &params).unwrap();
        assert!((got as f64 - n).abs() <= 1.0);
        assert!(propose_observed_n(&spec, 3, &params).is_err());
    }

    #[test]
    fn propose_none_after_riflex() {
        let l = 32_u64;
        let s = 2.0;
        let spec = FrequencySpec::from_thetas(vec![2.0 * TAU / l as f64], None).unwrap();
        let r = riflex(&spec, &ExtrapolationParams::new(l, s).unwrap(), 1).unwrap();
        let params = AliasScanParams::for_train_len(l);
        assert!(matches!(
            propose_observed_n(&r.to_spec(), 64, &params),
            Err(Error::NoRepetitionFound { .. })
        ));
    }

    #[test]
    fn motion_proxy_examples() {
        assert!((motion_proxy(&single(PI)) - 2.0).abs() < 1e-15);
        let spec = make_frequencies(10000.0, 16).unwrap();
        let half = pi(&spec, &ExtrapolationParams::new(16, 2.0).unwrap()).to_spec();
        assert!(motion_proxy(&half) < motion_proxy(&spec));
    }

    #[test]
    fn report_contains_both_scans() {
        let cfg = ModelRopeConfig::single(Axis::Time, make_frequencies(10000.0, 16).unwrap(), 13)
            .unwrap();
        let plan = AxisPlan {
            strategy: Strategy::Riflex { k: 2 },
            scale: 2.0,
        };
        let scan = AliasScanParams::for_train_len(13);
        let r = strategy_report(&cfg, Axis::Time, &plan, None, &scan, Some(2)).unwrap();
        assert_eq!(r.positions, 26);
        assert!(r.intrinsic.as_ref().unwrap().first_alias.is_none());
        assert!(r.non_repetition.unwrap().satisfied);
        assert!(strategy_report(&cfg, Axis::Width, &plan, None, &scan, None).is_err());
    }
}
