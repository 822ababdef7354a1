//! Rotary position embedding: frequency generation, single- and multi-axis
//! application, and relative-position dot products.
//!
//! Frequency pairs are interleaved: component `j` (1-based) rotates the pair
//! `(x[2j-2], x[2j-1])`. Rotations are evaluated directly at angle `p * theta_j`
//! for every position; nothing is accumulated incrementally.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Frequency vector of one rotary axis.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FrequencySpec<T> {
    d_prime: usize,
    base: Option<T>,
    thetas: Vec<T>,
}

impl<T: Real> FrequencySpec<T> {
    /// `theta_j = base^(-2(j-1)/d_prime)` for `j = 1..=d_prime/2`.
    pub fn from_base(base: T, d_prime: usize) -> Result<Self> {
        check_dimension(d_prime)?;
        if !(base > T::zero()) || !base.is_finite() {
            return Err(Error::InvalidBase {
                base: base.to_f64_lossy(),
            });
        }
        let d = T::from_len(d_prime as u64);
        let two = T::lit(2.0);
        let thetas = (0..d_prime / 2)
            .map(|i| {
                if i == 0 {
                    T::one()
                } else {
                    base.powf(-(two * T::from_len(i as u64)) / d)
                }
            })
            .collect();
        Ok(Self {
            d_prime,
            base: Some(base),
            thetas,
        })
    }

    /// Builds a spec from explicit frequencies. `base` is recorded only as
    /// metadata for strategies that need it (NTK).
    pub fn from_thetas(thetas: Vec<T>, base: Option<T>) -> Result<Self> {
        if thetas.is_empty() {
            return Err(Error::InvalidDimension { d_prime: 0 });
        }
        for (i, &t) in thetas.iter().enumerate() {
            if !(t > T::zero()) || !t.is_finite() {
                return Err(Error::InvalidFrequency {
                    j: i + 1,
                    theta: t.to_f64_lossy(),
                });
            }
        }
        if let Some(b) = base {
            if !(b > T::zero()) || !b.is_finite() {
                return Err(Error::InvalidBase {
                    base: b.to_f64_lossy(),
                });
            }
        }
        Ok(Self {
            d_prime: 2 * thetas.len(),
            base,
            thetas,
        })
    }

    pub fn d_prime(&self) -> usize {
        self.d_prime
    }

    /// Number of frequency components, `d_prime / 2`.
    pub fn len(&self) -> usize {
        self.thetas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.thetas.is_empty()
    }

    pub fn base(&self) -> Option<T> {
        self.base
    }

    pub fn thetas(&self) -> &[T] {
        &self.thetas
    }

    /// Frequency of the 1-based component `j`.
    pub fn theta(&self, j: usize) -> Result<T> {
        self.check_index(j)?;
        Ok(self.thetas[j - 1])
    }

    pub(crate) fn check_index(&self, j: usize) -> Result<()> {
        if j == 0 || j > self.thetas.len() {
            return Err(Error::IndexOutOfRange {
                k: j,
                len: self.thetas.len(),
            });
        }
        Ok(())
    }

    pub fn into_thetas(self) -> Vec<T> {
        self.thetas
    }
}

/// Alias for [`FrequencySpec::from_base`].
pub fn make_frequencies<T: Real>(base: T, d_prime: usize) -> Result<FrequencySpec<T>> {
    FrequencySpec::from_base(base, d_prime)
}

fn check_dimension(d_prime: usize) -> Result<()> {
    if d_prime < 2 || !d_prime.is_multiple_of(2) {
        return Err(Error::InvalidDimension { d_prime });
    }
    Ok(())
}

fn check_len<T>(x: &[T], expected: usize) -> Result<()> {
    if x.len() != expected {
        return Err(Error::DimensionMismatch {
            expected,
            actual: x.len(),
        });
    }
    Ok(())
}

fn rotate_into<T: Real>(x: &[T], p: u64, thetas: &[T], out: &mut [T]) {
    let pos = T::from_len(p);
    for ((pair, theta), dst) in x.chunks_exact(2).zip(thetas).zip(out.chunks_exact_mut(2)) {
        let (sin, cos) = (pos * *theta).sin_cos();
        dst[0] = pair[0] * cos - pair[1] * sin;
        dst[1] = pair[0] * sin + pair[1] * cos;
    }
}

/// Rotates each interleaved pair of `x` by `p * theta_j`.
pub fn apply_rope<T: Real>(x: &[T], p: u64, spec: &FrequencySpec<T>) -> Result<Vec<T>> {
    check_len(x, spec.d_prime)?;
    let mut out = vec![T::zero(); x.len()];
    rotate_into(x, p, &spec.thetas, &mut out);
    Ok(out)
}

/// `<apply_rope(x, p), apply_rope(y, q)>`.
pub fn rope_dot<T: Real>(x: &[T], p: u64, y: &[T], q: u64, spec: &FrequencySpec<T>) -> Result<T> {
    let rx = apply_rope(x, p, spec)?;
    let ry = apply_rope(y, q, spec)?;
    Ok(rx
        .iter()
        .zip(&ry)
        .fold(T::zero(), |acc, (a, b)| acc + *a * *b))
}

/// Embedding of the vector whose every pair is `(1, 0)`: pairs `(cos p theta_j, sin p theta_j)`.
pub fn positional_signature<T: Real>(p: u64, spec: &FrequencySpec<T>) -> Vec<T> {
    let pos = T::from_len(p);
    let mut out = Vec::with_capacity(spec.d_prime);
    for theta in &spec.thetas {
        let (sin, cos) = (pos * *theta).sin_cos();
        out.push(cos);
        out.push(sin);
    }
    out
}

/// Axis label of a multi-axis rotary layout.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Axis {
    #[serde(alias = "t")]
    Time,
    #[serde(alias = "h")]
    Height,
    #[serde(alias = "w")]
    Width,
}

impl Axis {
    pub fn as_str(self) -> &'static str {
        match self {
            Axis::Time => "time",
            Axis::Height => "height",
            Axis::Width => "width",
        }
    }
}

impl fmt::Display for Axis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for Axis {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "time" | "t" => Ok(Axis::Time),
            "height" | "h" => Ok(Axis::Height),
            "width" | "w" => Ok(Axis::Width),
            other => Err(Error::UnknownAxis(other.to_string())),
        }
    }
}

/// Integer position on up to three axes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PositionVector(Vec<u64>);

impl PositionVector {
    pub fn new(coords: Vec<u64>) -> Result<Self> {
        if coords.is_empty() || coords.len() > 3 {
            return Err(Error::param(
                "position",
                format!("expected 1 to 3 coordinates, got {}", coords.len()),
            ));
        }
        Ok(Self(coords))
    }

    pub fn coords(&self) -> &[u64] {
        &self.0
    }
}

/// One axis of a model's rotary layout.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AxisRope<T> {
    pub axis: Axis,
    pub spec: FrequencySpec<T>,
    pub train_len: u64,
}

/// Per-axis frequency specs and training lengths, in slice order.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ModelRopeConfig<T> {
    axes: Vec<AxisRope<T>>,
}

impl<T: Real> ModelRopeConfig<T> {
    pub fn new(axes: Vec<AxisRope<T>>) -> Result<Self> {
        if axes.is_empty() || axes.len() > 3 {
            return Err(Error::Config(format!(
                "expected 1 to 3 axes, got {}",
                axes.len()
            )));
        }
        for (i, a) in axes.iter().enumerate() {
            if axes[..i].iter().any(|b| b.axis == a.axis) {
                return Err(Error::DuplicateAxis(a.axis.to_string()));
            }
            if a.train_len < 2 {
                return Err(Error::param(
                    format!("{}.train_len", a.axis),
                    format!("must be >= 2, got {}", a.train_len),
                ));
            }
        }
        Ok(Self { axes })
    }

    pub fn single(axis: Axis, spec: FrequencySpec<T>, train_len: u64) -> Result<Self> {
        Self::new(vec![AxisRope {
            axis,
            spec,
            train_len,
        }])
    }

    pub fn axes(&self) -> &[AxisRope<T>] {
        &self.axes
    }

    pub fn axis(&self, axis: Axis) -> Result<&AxisRope<T>> {
        self.axes
            .iter()
            .find(|a| a.axis == axis)
            .ok_or_else(|| Error::UnknownAxis(axis.to_string()))
    }

    pub(crate) fn axis_mut(&mut self, axis: Axis) -> Result<&mut AxisRope<T>> {
        self.axes
            .iter_mut()
            .find(|a| a.axis == axis)
            .ok_or_else(|| Error::UnknownAxis(axis.to_string()))
    }

    /// Sum of rotary dimensions over all axes.
    pub fn total_dim(&self) -> usize {
        self.axes.iter().map(|a| a.spec.d_prime).sum()
    }
}

/// Encodes each axis's contiguous slice of `x` at that axis's coordinate and
/// concatenates the results in axis order.
pub fn apply_rope_multi<T: Real>(
    x: &[T],
    p: &PositionVector,
    config: &ModelRopeConfig<T>,
) -> Result<Vec<T>> {
    check_len(x, config.total_dim())?;
    if p.coords().len() != config.axes.len() {
        return Err(Error::DimensionMismatch {
            expected: config.axes.len(),
            actual: p.coords().len(),
        });
    }
    let mut out = vec![T::zero(); x.len()];
    let mut offset = 0;
    for (axis, &coord) in config.axes.iter().zip(p.coords()) {
        let d = axis.spec.d_prime;
        rotate_into(
            &x[offset..offset + d],
            coord,
            &axis.spec.thetas,
            &mut out[offset..offset + d],
        );
        offset += d;
    }
    Ok(out)
}
