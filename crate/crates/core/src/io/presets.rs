//! Bundled reference configurations.
//!
//! The `references` entries in each preset are published fine-tuning bases,
//! kept as documentation constants. They depend on checkpoint details
//! (latent lengths, rotary dimensions) and are not recomputed here.

const PRESETS: &[(&str, &str)] = &[
    (
        "cogvideox-both",
        include_str!("../../presets/cogvideox-both.json"),
    ),
    (
        "cogvideox-temporal",
        include_str!("../../presets/cogvideox-temporal.json"),
    ),
    (
        "hunyuan-latent",
        include_str!("../../presets/hunyuan-latent.json"),
    ),
    (
        "hunyuan-temporal",
        include_str!("../../presets/hunyuan-temporal.json"),
    ),
];

/// Published intrinsic-component bases: `(model, setting, axis, base)`.
pub const PUBLISHED_INTRINSIC_BASES: &[(&str, &str, &str, f64)] = &[
    ("CogVideoX-5B", "2x temporal", "time", 1e5),
    ("HunyuanVideo", "2x temporal", "time", 560.0),
    ("CogVideoX-5B", "3x temporal", "time", 1e6),
    ("CogVideoX-5B", "2x spatial", "height", 1e6),
    ("CogVideoX-5B", "2x spatial", "width", 5e4),
    ("CogVideoX-5B", "2x temporal and spatial", "time", 1e5),
    ("CogVideoX-5B", "2x temporal and spatial", "height", 1e6),
    ("CogVideoX-5B", "2x temporal and spatial", "width", 5e4),
];

/// Published NoRepeat score (percent) of fine-tuned HunyuanVideo at 2x. Needs
/// generated videos to reproduce.
pub const PUBLISHED_HUNYUAN_FINETUNED_NOREPEAT: f64 = 89.0;

pub fn preset(name: &str) -> Option<&'static str> {
    PRESETS
        .iter()
        .find(|(n, _)| *n == name)
        .map(|(_, text)| *text)
}

pub fn names() -> Vec<&'static str> {
    PRESETS.iter().map(|(n, _)| *n).collect()
}
