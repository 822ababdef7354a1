//! Grayscale SVG heatmaps of similarity matrices.
//!
//! Each cell `(p, q)` is a unit square at `x = q, y = p` filled with gray
//! level `round(255 * (1 - sim))`, clamped to `[0, 255]`: similarity 1 is
//! black, similarity 0 or below is white.

use std::fmt::Write;

use crate::aliasing::SimilarityMatrix;
use crate::scalar::Real;

pub fn shade<T: Real>(sim: T) -> u8 {
    let v = (255.0 * (1.0 - sim.to_f64_lossy())).round();
    v.clamp(0.0, 255.0) as u8
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
}

pub fn heatmap<T: Real>(matrix: &SimilarityMatrix<T>, title: &str) -> String {
    let n = matrix.size();
    let mut out = String::with_capacity(64 + n * n * 64);
    out.push_str("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n");
    let _ = writeln!(
        out,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{n}\" height=\"{n}\" viewBox=\"0 0 {n} {n}\" shape-rendering=\"crispEdges\">"
    );
    let _ = writeln!(out, "<title>{}</title>", escape(title));
    for p in 0..n {
        for (q, &sim) in matrix.row(p).iter().enumerate() {
            let s = shade(sim);
            let _ = writeln!(
                out,
                "<rect x=\"{q}\" y=\"{p}\" width=\"1\" height=\"1\" fill=\"rgb({s},{s},{s})\"/>"
            );
        }
    }
    out.push_str("</svg>\n");
    out
}
