//! Rotary position embedding (RoPE) frequency toolkit for length
//! extrapolation.
//!
//! The crate computes RoPE frequencies and embeddings, adjusts them with the
//! common extrapolation strategies (PE, PI, NTK, YaRN, TASR) and with
//! intrinsic-frequency reduction (RIFLEx and its base-form variants), reports
//! per-component periods and repeat counts, simulates encoding-level aliasing,
//! and scores frame sequences for repetition.
//!
//! All numeric code is generic over [`Real`] (`f32` or `f64`); the `*F64` and
//! `*F32` aliases below name the concrete instantiations.

// `!(x > 0)` style guards are deliberate: they reject NaN as well.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod aliasing;
pub mod diagnostics;
pub mod error;
pub mod io;
pub mod norepeat;
pub mod rope;
pub mod scalar;
pub mod strategies;

pub use aliasing::{
    motion_proxy, propose_observed_n, scan_first_alias, signature_matrix, strategy_report, Alias,
    AliasScanParams, ScanSummary, SimilarityMatrix, SimilarityReport,
};
pub use diagnostics::{
    adjacent_delta, check_non_repetition, delta_envelope, diagnostics_table, identify_intrinsic,
    period, repeat_count, DiagnosticsRow, IntrinsicResult, NonRepetition,
};
pub use error::{Error, Result};
pub use norepeat::{
    aggregate, find_anchor, frame_l2, norepeat_score, FrameSequence, NoRepeatConfig,
    NoRepeatReport, Normalization,
};
pub use rope::{
    apply_rope, apply_rope_multi, make_frequencies, positional_signature, rope_dot, Axis, AxisRope,
    FrequencySpec, ModelRopeConfig, PositionVector,
};
pub use scalar::Real;
pub use strategies::{
    apply_strategy_multi, ntk, pe, pi, riflex, riflex_all_low, riflex_base_form, riflex_multi,
    tasr, yarn, AxisPlan, ExtrapolationParams, Strategy, StrategyResult, TasrParams, YarnParams,
};

pub type FrequencySpecF64 = FrequencySpec<f64>;
pub type FrequencySpecF32 = FrequencySpec<f32>;
pub type ModelRopeConfigF64 = ModelRopeConfig<f64>;
pub type ModelRopeConfigF32 = ModelRopeConfig<f32>;
pub type ExtrapolationParamsF64 = ExtrapolationParams<f64>;
pub type ExtrapolationParamsF32 = ExtrapolationParams<f32>;
pub type StrategyResultF64 = StrategyResult<f64>;
pub type StrategyResultF32 = StrategyResult<f32>;
pub type StrategyF64 = Strategy<f64>;
pub type SimilarityMatrixF64 = SimilarityMatrix<f64>;
pub type SimilarityReportF64 = SimilarityReport<f64>;
pub type FrameSequenceF64 = FrameSequence<f64>;
pub type FrameSequenceF32 = FrameSequence<f32>;
pub type NoRepeatConfigF64 = NoRepeatConfig<f64>;
pub type NoRepeatReportF64 = NoRepeatReport<f64>;
