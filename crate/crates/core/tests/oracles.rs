//! Library results against naive recomputations.

use std::f64::consts::{PI, TAU};

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use riflex_core::{
    aggregate, diagnostics_table, find_anchor, make_frequencies, norepeat_score, scan_first_alias,
    signature_matrix, AliasScanParams, FrameSequence, FrequencySpec, NoRepeatConfig, Normalization,
};

fn cosine_oracle(thetas: &[f64], p: usize, q: usize) -> f64 {
    // Each component contributes cos((p - q) theta); every signature has norm sqrt(n).
    let d = p as f64 - q as f64;
    thetas.iter().map(|t| (d * t).cos()).sum::<f64>() / thetas.len() as f64
}

#[test]
fn similarity_matrix_matches_cosines() {
    let spec = make_frequencies(300.0, 10).unwrap();
    let m = signature_matrix(&spec, 60, None).unwrap();
    for p in 0..60 {
        for q in 0..60 {
            assert!((m.get(p, q) - cosine_oracle(spec.thetas(), p, q)).abs() < 1e-12);
        }
    }
    let sub = signature_matrix(&spec, 60, Some(&[2, 4])).unwrap();
    let picked = [spec.thetas()[1], spec.thetas()[3]];
    for p in 0..60 {
        for q in 0..60 {
            assert!((sub.get(p, q) - cosine_oracle(&picked, p, q)).abs() < 1e-12);
        }
    }
}

fn brute_alias(m: &[Vec<f64>], thr: f64, sep: usize) -> Option<(usize, usize)> {
    for (p, row) in m.iter().enumerate() {
        let mut best: Option<(usize, f64)> = None;
        for (q, &sim) in row.iter().enumerate() {
            if q + sep <= p && sim >= thr && best.is_none_or(|(_, b)| sim > b) {
                best = Some((q, sim));
            }
        }
        if let Some((q, _)) = best {
            return Some((p, q));
        }
    }
    None
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn alias_scan_matches_brute_force(
        periods in prop::collection::vec(3.0f64..80.0, 1..5),
        n in 8usize..90,
        thr in 0.9f64..0.9999,
        sep in 1usize..20,
    ) {
        let thetas: Vec<f64> = periods.iter().map(|p| TAU / p).collect();
        let spec = FrequencySpec::from_thetas(thetas.clone(), None).unwrap();
        let m = signature_matrix(&spec, n, None).unwrap();
        let dense: Vec<Vec<f64>> = (0..n).map(|p| m.row(p).to_vec()).collect();
        let got = scan_first_alias(&m, &AliasScanParams::new(thr, sep).unwrap()).map(|a| (a.p, a.p_prime));
        prop_assert_eq!(got, brute_alias(&dense, thr, sep));
    }
}

#[test]
fn single_component_alias_at_its_period() {
    for n in [12_usize, 25, 49, 64] {
        let spec = FrequencySpec::from_thetas(vec![TAU / n as f64], None).unwrap();
        let m = signature_matrix(&spec, 3 * n, None).unwrap();
        let a = scan_first_alias(&m, &AliasScanParams::new(0.999, n.div_ceil(4)).unwrap()).unwrap();
        assert_eq!((a.p, a.p_prime), (n, 0));
    }
}

#[test]
fn diagnostics_match_formulas() {
    let spec = make_frequencies(10_000.0, 12).unwrap();
    for row in diagnostics_table(&spec, 49.0).unwrap() {
        let theta = 10_000f64.powf(-2.0 * (row.j - 1) as f64 / 12.0);
        assert!((row.theta - theta).abs() <= 1e-15 * theta);
        assert!((row.period - 2.0 * PI / theta).abs() <= 1e-12 * row.period);
        assert!((row.repeat_count - 49.0 * theta / (2.0 * PI)).abs() <= 1e-12 * row.repeat_count);
        let brute = (0..10_000)
            .map(|p| (((p + 1) as f64 * theta).cos() - (p as f64 * theta).cos()).abs())
            .fold(0.0, f64::max);
        assert!(brute <= row.max_adjacent_delta + 1e-12);
    }
}

fn random_video(rng: &mut ChaCha8Rng) -> FrameSequence<f64> {
    let h = rng.gen_range(1..=32);
    let w = rng.gen_range(1..=32);
    let c = if rng.gen_bool(0.5) { 1 } else { 3 };
    let n = rng.gen_range(8..=64);
    let frames = (0..n)
        .map(|_| (0..h * w * c).map(|_| rng.gen_range(0.0..255.0)).collect())
        .collect();
    FrameSequence::new(h, w, c, frames).unwrap()
}

fn l2(a: &[f64], b: &[f64]) -> f64 {
    let mut s = 0.0;
    for i in 0..a.len() {
        s += (a[i] - b[i]) * (a[i] - b[i]);
    }
    s.sqrt()
}

/// Nested-loop recomputation of anchor search and mean head distance.
fn brute_norepeat(seq: &FrameSequence<f64>, cfg: &NoRepeatConfig<f64>) -> (usize, f64) {
    let f = seq.frame_count();
    let lo = cfg.expected_period.saturating_sub(cfg.search_window).max(1);
    let hi = (cfg.expected_period + cfg.search_window).min(f - 1);
    let mut anchor = lo;
    for t in lo..=hi {
        if l2(seq.frame(t), seq.frame(0)) < l2(seq.frame(anchor), seq.frame(0)) {
            anchor = t;
        }
    }
    let mut total = 0.0;
    for i in 0..f - anchor {
        total += l2(seq.frame(anchor + i), seq.frame(i));
    }
    (anchor, total / (f - anchor) as f64)
}

#[test]
fn norepeat_matches_nested_loops() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    for _ in 0..50 {
        let seq = random_video(&mut rng);
        let period = rng.gen_range(2..seq.frame_count());
        let cfg = NoRepeatConfig::with(period, 100.0, rng.gen_range(0..6)).unwrap();
        let got = norepeat_score(&seq, &cfg).unwrap();
        let (anchor, mean) = brute_norepeat(&seq, &cfg);
        assert_eq!(got.anchor_index, anchor);
        assert!((got.mean_distance - mean).abs() <= 1e-9 * mean.max(1.0));
    }
}

fn looped(period: usize, frames: usize, len: usize, rng: &mut ChaCha8Rng) -> FrameSequence<f64> {
    let base: Vec<Vec<f64>> = (0..period)
        .map(|_| (0..len).map(|_| rng.gen_range(0.0..255.0)).collect())
        .collect();
    FrameSequence::new(
        1,
        len,
        1,
        (0..frames).map(|t| base[t % period].clone()).collect(),
    )
    .unwrap()
}

#[test]
fn norepeat_invariances() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..20 {
        let seq = random_video(&mut rng);
        let period = rng.gen_range(2..seq.frame_count());
        let cfg = NoRepeatConfig::with(period, 100.0, 2).unwrap();
        let base = norepeat_score(&seq, &cfg).unwrap();
        let shift = rng.gen_range(-50.0..50.0);
        let scale = rng.gen_range(0.1..4.0);
        let map = |g: &dyn Fn(f64) -> f64| {
            FrameSequence::new(
                seq.height(),
                seq.width(),
                seq.channels(),
                seq.frames()
                    .iter()
                    .map(|f| f.iter().map(|v| g(*v)).collect())
                    .collect(),
            )
            .unwrap()
        };
        let shifted = norepeat_score(&map(&|v| v + shift), &cfg).unwrap();
        assert_eq!(shifted.anchor_index, base.anchor_index);
        assert!(
            (shifted.mean_distance - base.mean_distance).abs()
                <= 1e-9 * base.mean_distance.max(1.0)
        );
        let scaled = norepeat_score(&map(&|v| v * scale), &cfg).unwrap();
        assert!(
            (scaled.mean_distance - scale * base.mean_distance).abs()
                <= 1e-9 * base.mean_distance.max(1.0)
        );
        let rms = norepeat_score(&seq, &cfg.normalized(Normalization::PerPixelRms)).unwrap();
        let n = (seq.height() * seq.width() * seq.channels()) as f64;
        assert!(
            (rms.mean_distance * n.sqrt() - base.mean_distance).abs()
                <= 1e-9 * base.mean_distance.max(1.0)
        );
    }
}

#[test]
fn loops_found_and_threshold_monotone() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut reports = Vec::new();
    for period in [4_usize, 9, 17, 32] {
        let seq = looped(period, 3 * period, 48, &mut rng);
        let cfg = NoRepeatConfig::with(period, 100.0, 1).unwrap();
        assert_eq!(find_anchor(&seq, &cfg).unwrap(), period);
        let r = norepeat_score(&seq, &cfg).unwrap();
        assert_eq!(r.mean_distance, 0.0);
        assert!(!r.is_nonrepetitive);
        reports.push(r);
    }
    assert_eq!(aggregate(&reports).unwrap(), 0.0);

    let seq = random_video(&mut rng);
    let mut last = true;
    for thr in [1.0, 10.0, 100.0, 1_000.0, 10_000.0, 1e6] {
        let r = norepeat_score(&seq, &NoRepeatConfig::with(4, thr, 2).unwrap()).unwrap();
        assert!(last || !r.is_nonrepetitive);
        last = r.is_nonrepetitive;
    }
}
