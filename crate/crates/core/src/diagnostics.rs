//! Per-component periods, repeat counts, motion-rate envelopes, intrinsic
//! frequency identification and the non-repetition check.
//!
//! Component indices are 1-based everywhere in this module's outputs.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::rope::FrequencySpec;
use crate::scalar::Real;

fn check_theta<T: Real>(theta: T) -> Result<()> {
    if !(theta > T::zero()) || !theta.is_finite() {
        return Err(Error::param(
            "theta",
            format!("must be positive and finite, got {theta}"),
        ));
    }
    Ok(())
}

/// Positions per full rotation, `2π / theta`.
pub fn period<T: Real>(theta: T) -> Result<T> {
    check_theta(theta)?;
    Ok(T::TAU() / theta)
}

/// Cycles elapsed over `len` positions, `len * theta / 2π`. `len` is real so
/// that extrapolated lengths `s * L` with non-integer `s` are expressible.
pub fn repeat_count<T: Real>(theta: T, len: T) -> Result<T> {
    check_theta(theta)?;
    if !(len >= T::one()) || !len.is_finite() {
        return Err(Error::param("len", format!("must be >= 1, got {len}")));
    }
    Ok(len * theta / T::TAU())
}

/// Signed change `cos((p+1) theta) - cos(p theta)` between adjacent positions.
pub fn adjacent_delta<T: Real>(theta: T, p: u64) -> T {
    let p = T::from_len(p);
    ((p + T::one()) * theta).cos() - (p * theta).cos()
}

/// Position-free envelope of [`adjacent_delta`]: `2 sin(min(theta, π) / 2)`.
pub fn delta_envelope<T: Real>(theta: T) -> T {
    let two = T::lit(2.0);
    two * (theta.min(T::PI()) / two).sin()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DiagnosticsRow<T> {
    pub j: usize,
    pub theta: T,
    pub period: T,
    pub repeat_count: T,
    pub max_adjacent_delta: T,
}

/// One row per component, sorted by `j`.
pub fn diagnostics_table<T: Real>(
    spec: &FrequencySpec<T>,
    len: T,
) -> Result<Vec<DiagnosticsRow<T>>> {
    spec.thetas()
        .iter()
        .enumerate()
        .map(|(i, &theta)| {
            Ok(DiagnosticsRow {
                j: i + 1,
                theta,
                period: period(theta)?,
                repeat_count: repeat_count(theta, len)?,
                max_adjacent_delta: delta_envelope(theta),
            })
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IntrinsicResult<T> {
    pub k: usize,
    pub observed_first_repetition: u64,
    pub matched_period: T,
    pub gap: T,
    /// Another component sat at exactly the same distance from `N`.
    pub tie: bool,
}

/// `k = argmin_j |N_j - N|`, ties resolved toward the smaller `j`.
pub fn identify_intrinsic<T: Real>(
    spec: &FrequencySpec<T>,
    observed_n: u64,
) -> Result<IntrinsicResult<T>> {
    if observed_n == 0 {
        return Err(Error::param("observed_n", "must be >= 1"));
    }
    let n = T::from_len(observed_n);
    let mut best: Option<(usize, T, T)> = None;
    let mut tie = false;
    for (i, &theta) in spec.thetas().iter().enumerate() {
        let p = period(theta)?;
        let gap = (p - n).abs();
        match best {
            Some((_, _, g)) if gap < g => {
                best = Some((i + 1, p, gap));
                tie = false;
            }
            Some((_, _, g)) if gap == g => tie = true,
            Some(_) => {}
            None => best = Some((i + 1, p, gap)),
        }
    }
    let (k, matched_period, gap) = best.expect("spec has at least one component");
    Ok(IntrinsicResult {
        k,
        observed_first_repetition: observed_n,
        matched_period,
        gap,
        tie,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NonRepetition<T> {
    pub k: usize,
    pub satisfied: bool,
    /// `2π/(L s) - theta_k`; non-negative when satisfied (up to rounding).
    pub margin: T,
    pub limit: T,
    pub theta_k: T,
}

/// Relative slack, in units of machine epsilon, allowed when comparing
/// `theta_k` against `2π/(L s)`. Algebraically equal quantities computed by
/// different routes (e.g. `(2π/L)/s`) must count as on the boundary.
const BOUNDARY_ULPS: f64 = 8.0;

/// Checks `theta_k <= 2π / (L s)`: component `k` completes at most one cycle
/// over the extrapolated length.
pub fn check_non_repetition<T: Real>(
    spec: &FrequencySpec<T>,
    train_len: u64,
    scale: T,
    k: usize,
) -> Result<NonRepetition<T>> {
    let theta_k = spec.theta(k)?;
    if !(scale > T::zero()) {
        return Err(Error::param("scale", "must be positive"));
    }
    let limit = T::TAU() / (T::from_len(train_len) * scale);
    let slack = limit * T::epsilon() * T::lit(BOUNDARY_ULPS);
    Ok(NonRepetition {
        k,
        satisfied: theta_k <= limit + slack,
        margin: limit - theta_k,
        limit,
        theta_k,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rope::make_frequencies;
    use std::f64::consts::{PI, TAU};

    #[test]
    fn period_examples() {
        assert_eq!(period(PI).unwrap(), 2.0);
        assert!((period(TAU / 49.0).unwrap() - 49.0).abs() < 1e-12);
        assert!((period(0.031_415_926_535_897_93_f64).unwrap() - 200.0).abs() < 1e-9);
        assert!(period(0.0_f64).is_err());
        assert!(period(-1.0_f64).is_err());
    }

    #[test]
    fn repeat_count_examples() {
        assert!((repeat_count(1.0, TAU).unwrap() - 1.0).abs() < 1e-15);
        let len = 64.0;
        let theta = 2.0 * TAU / len;
        assert!((repeat_count(theta, len).unwrap() - 2.0).abs() < 1e-12);
        assert!((repeat_count(theta, 2.0 * len).unwrap() - 4.0).abs() < 1e-12);
        let theta = 0.5 * TAU / len;
        assert!((repeat_count(theta, 2.0 * len).unwrap() - 1.0).abs() < 1e-12);
        assert!(repeat_count(1.0, 0.5).is_err());
        assert!(repeat_count(0.0, 10.0).is_err());
    }

    #[test]
    fn adjacent_delta_examples() {
        assert!((adjacent_delta(PI, 0) + 2.0).abs() < 1e-15);
        assert!(adjacent_delta(1e-12_f64, 5).abs() < 1e-20);
        assert_eq!(adjacent_delta(1.0, 3), 4f64.cos() - 3f64.cos());
    }

    #[test]
    fn delta_bounded_by_envelope() {
        for &theta in &[0.01, 0.3, 1.0, 2.5, PI] {
            for p in 0..200 {
                assert!(adjacent_delta(theta, p).abs() <= delta_envelope(theta) + 1e-12);
            }
        }
        assert_eq!(delta_envelope(4.0_f64), 2.0);
    }

    #[test]
    fn table_examples() {
        let spec = make_frequencies(10000.0, 4).unwrap();
        let rows = diagnostics_table(&spec, TAU).unwrap();
        assert_eq!(rows.len(), 2);
        assert!((rows[0].repeat_count - 1.0).abs() < 1e-15);
        assert!((rows[1].repeat_count - 0.01).abs() < 1e-15);
        assert_eq!(rows[0].j, 1);

        let spec = make_frequencies(10000.0, 64).unwrap();
        let rows = diagnostics_table(&spec, 49.0).unwrap();
        assert_eq!(rows.len(), 32);
        assert!(rows
            .windows(2)
            .all(|w| w[1].repeat_count < w[0].repeat_count
                && w[1].max_adjacent_delta <= w[0].max_adjacent_delta));
    }

    #[test]
    fn intrinsic_examples() {
        let periods = [50.0, 100.0, 200.0, 400.0];
        let spec =
            FrequencySpec::from_thetas(periods.iter().map(|p| TAU / p).collect(), None).unwrap();
        let r = identify_intrinsic(&spec, 178).unwrap();
        assert_eq!(r.k, 3);
        assert!((r.gap - 22.0).abs() < 1e-9);
        assert!(!r.tie);

        let spec =
            FrequencySpec::from_thetas(vec![TAU / 10.0, TAU / 20.0, TAU / 40.0], None).unwrap();
        let r = identify_intrinsic(&spec, 20).unwrap();
        assert_eq!(r.k, 2);
        assert!(r.gap < 1e-12);
    }

    #[test]
    fn intrinsic_tie_prefers_higher_frequency() {
        let spec = FrequencySpec::from_thetas(vec![PI / 5.0, PI / 15.0], None).unwrap();
        let r = identify_intrinsic(&spec, 20).unwrap();
        assert_eq!(r.k, 1);
        assert!(r.tie);
        assert!(identify_intrinsic(&spec, 0).is_err());
    }

    #[test]
    fn non_repetition_examples() {
        let len = 64_u64;
        let theta_k = 2.0 * TAU / len as f64;
        let spec = FrequencySpec::from_thetas(vec![1.0, theta_k], None).unwrap();
        let c = check_non_repetition(&spec, len, 2.0, 2).unwrap();
        assert!(!c.satisfied);
        assert!(c.margin < 0.0);

        for len in [7_u64, 13, 33, 64, 129, 500] {
            for s in [1.5, 2.0, 2.3, 3.0] {
                let theta = TAU / len as f64;
                let pi = FrequencySpec::from_thetas(vec![theta / s], None).unwrap();
                assert!(check_non_repetition(&pi, len, s, 1).unwrap().satisfied);
            }
        }
        assert!(check_non_repetition(&spec, len, 2.0, 3).is_err());
    }
}
