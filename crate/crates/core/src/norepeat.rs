//! Repetition scoring for decoded frame sequences.
//!
//! A video is scored by locating the frame near the expected period that is
//! closest to the first frame, then averaging the L2 distance between the
//! sequence from that anchor onward and the head of the video. Distances are
//! raw (un-normalised) by default, so the threshold depends on resolution and
//! pixel scale.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Frames of uniform `height x width x channels`, each stored row-major with
/// interleaved channels.
#[derive(Debug, Clone, PartialEq)]
pub struct FrameSequence<T> {
    height: usize,
    width: usize,
    channels: usize,
    frames: Vec<Vec<T>>,
}

impl<T: Real> FrameSequence<T> {
    pub fn new(height: usize, width: usize, channels: usize, frames: Vec<Vec<T>>) -> Result<Self> {
        if height == 0 || width == 0 || channels == 0 {
            return Err(Error::FrameMismatch(format!(
                "frame dimensions must be positive, got {height}x{width}x{channels}"
            )));
        }
        if frames.len() < 2 {
            return Err(Error::DegenerateSequence(format!(
                "need at least 2 frames, got {}",
                frames.len()
            )));
        }
        let len = height * width * channels;
        for (i, f) in frames.iter().enumerate() {
            if f.len() != len {
                return Err(Error::FrameMismatch(format!(
                    "frame {i} has {} values, expected {len}",
                    f.len()
                )));
            }
            if f.iter().any(|v| !v.is_finite()) {
                return Err(Error::FrameMismatch(format!(
                    "frame {i} has non-finite values"
                )));
            }
        }
        Ok(Self {
            height,
            width,
            channels,
            frames,
        })
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn channels(&self) -> usize {
        self.channels
    }

    pub fn frame_count(&self) -> usize {
        self.frames.len()
    }

    pub fn frames(&self) -> &[Vec<T>] {
        &self.frames
    }

    pub fn frame(&self, i: usize) -> &[T] {
        &self.frames[i]
    }

    fn values_per_frame(&self) -> usize {
        self.height * self.width * self.channels
    }
}

/// Euclidean norm of the element-wise difference.
pub fn frame_l2<T: Real>(a: &[T], b: &[T]) -> Result<T> {
    if a.len() != b.len() {
        return Err(Error::FrameMismatch(format!(
            "cannot compare frames of {} and {} values",
            a.len(),
            b.len()
        )));
    }
    Ok(a.iter()
        .zip(b)
        .fold(T::zero(), |acc, (x, y)| {
            let d = *x - *y;
            acc + d * d
        })
        .sqrt())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Normalization {
    /// Raw L2 over all values.
    #[default]
    None,
    /// L2 divided by `sqrt(H W C)`.
    PerPixelRms,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NoRepeatConfig<T> {
    pub expected_period: usize,
    pub threshold: T,
    pub search_window: usize,
    pub normalize: Normalization,
}

impl<T: Real> NoRepeatConfig<T> {
    /// Threshold 100 and a window of `ceil(0.1 * expected_period)`.
    pub fn new(expected_period: usize) -> Result<Self> {
        Self::with(
            expected_period,
            T::lit(100.0),
            default_window(expected_period),
        )
    }

    pub fn with(expected_period: usize, threshold: T, search_window: usize) -> Result<Self> {
        if expected_period == 0 {
            return Err(Error::param("expected_period", "must be >= 1"));
        }
        if !(threshold > T::zero()) || !threshold.is_finite() {
            return Err(Error::param(
                "threshold",
                format!("must be positive, got {threshold}"),
            ));
        }
        Ok(Self {
            expected_period,
            threshold,
            search_window,
            normalize: Normalization::None,
        })
    }

    pub fn normalized(mut self, normalize: Normalization) -> Self {
        self.normalize = normalize;
        self
    }
}

/// `ceil(0.1 * expected_period)`.
pub fn default_window(expected_period: usize) -> usize {
    expected_period.div_ceil(10)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NoRepeatReport<T> {
    pub anchor_index: usize,
    pub mean_distance: T,
    pub is_nonrepetitive: bool,
    pub per_frame_distances: Vec<T>,
}

fn distance<T: Real>(seq: &FrameSequence<T>, a: usize, b: usize, norm: Normalization) -> Result<T> {
    let d = frame_l2(seq.frame(a), seq.frame(b))?;
    Ok(match norm {
        Normalization::None => d,
        Normalization::PerPixelRms => d / T::from_len(seq.values_per_frame() as u64).sqrt(),
    })
}

/// Frame in `[N_k - W, N_k + W]` (clipped to `[1, frame_count - 1]`) closest
/// to frame 0; ties go to the earliest frame.
pub fn find_anchor<T: Real>(seq: &FrameSequence<T>, cfg: &NoRepeatConfig<T>) -> Result<usize> {
    let lo = cfg.expected_period.saturating_sub(cfg.search_window).max(1);
    let hi = cfg
        .expected_period
        .saturating_add(cfg.search_window)
        .min(seq.frame_count() - 1);
    if lo > hi {
        return Err(Error::EmptyWindow);
    }
    let mut best = (lo, distance(seq, lo, 0, cfg.normalize)?);
    for t in lo + 1..=hi {
        let d = distance(seq, t, 0, cfg.normalize)?;
        if d < best.1 {
            best = (t, d);
        }
    }
    Ok(best.0)
}

/// Compares frames from the anchor onward with the head of the sequence.
/// Non-repetitive iff the mean distance strictly exceeds the threshold.
pub fn norepeat_score<T: Real>(
    seq: &FrameSequence<T>,
    cfg: &NoRepeatConfig<T>,
) -> Result<NoRepeatReport<T>> {
    let anchor = find_anchor(seq, cfg)?;
    let per_frame_distances = (0..seq.frame_count() - anchor)
        .map(|i| distance(seq, anchor + i, i, cfg.normalize))
        .collect::<Result<Vec<T>>>()?;
    let sum = per_frame_distances
        .iter()
        .fold(T::zero(), |acc, d| acc + *d);
    let mean_distance = sum / T::from_len(per_frame_distances.len() as u64);
    Ok(NoRepeatReport {
        anchor_index: anchor,
        mean_distance,
        is_nonrepetitive: mean_distance > cfg.threshold,
        per_frame_distances,
    })
}

/// Fraction of reports classified non-repetitive.
pub fn aggregate<T: Real>(reports: &[NoRepeatReport<T>]) -> Result<T> {
    if reports.is_empty() {
        return Err(Error::EmptyReports);
    }
    let hits = reports.iter().filter(|r| r.is_nonrepetitive).count();
    Ok(T::from_len(hits as u64) / T::from_len(reports.len() as u64))
}
