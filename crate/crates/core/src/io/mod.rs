//! Configuration loading, report serialization, frame decoding and SVG export.

pub mod config;
pub mod format;
pub mod frames;
pub mod presets;
pub mod schema;
pub mod svg;
