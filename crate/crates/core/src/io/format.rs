//! Deterministic JSON and CSV output.
//!
//! Every float is written with 17 significant digits in scientific notation
//! (`{:.16e}`), which round-trips `f64` exactly and gives byte-identical
//! output for identical inputs.

use std::io;

use serde::Serialize;
use serde_json::ser::{Formatter, PrettyFormatter};

use crate::aliasing::SimilarityMatrix;
use crate::diagnostics::DiagnosticsRow;
use crate::error::Result;
use crate::scalar::Real;

/// Formats a float with 17 significant digits.
pub fn fmt_float<T: Real>(x: T) -> String {
    format!("{:.16e}", x.to_f64_lossy())
}

/// Pretty JSON formatter that writes floats with 17 significant digits.
struct FixedFloats<'a>(PrettyFormatter<'a>);

impl Formatter for FixedFloats<'_> {
    fn write_f32<W: ?Sized + io::Write>(&mut self, writer: &mut W, value: f32) -> io::Result<()> {
        write!(writer, "{:.16e}", value as f64)
    }

    fn write_f64<W: ?Sized + io::Write>(&mut self, writer: &mut W, value: f64) -> io::Result<()> {
        write!(writer, "{value:.16e}")
    }

    fn begin_array<W: ?Sized + io::Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.0.begin_array(writer)
    }

    fn end_array<W: ?Sized + io::Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.0.end_array(writer)
    }

    fn begin_array_value<W: ?Sized + io::Write>(
        &mut self,
        writer: &mut W,
        first: bool,
    ) -> io::Result<()> {
        self.0.begin_array_value(writer, first)
    }

    fn end_array_value<W: ?Sized + io::Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.0.end_array_value(writer)
    }

    fn begin_object<W: ?Sized + io::Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.0.begin_object(writer)
    }

    fn end_object<W: ?Sized + io::Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.0.end_object(writer)
    }

    fn begin_object_key<W: ?Sized + io::Write>(
        &mut self,
        writer: &mut W,
        first: bool,
    ) -> io::Result<()> {
        self.0.begin_object_key(writer, first)
    }

    fn end_object_key<W: ?Sized + io::Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.0.end_object_key(writer)
    }

    fn begin_object_value<W: ?Sized + io::Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.0.begin_object_value(writer)
    }

    fn end_object_value<W: ?Sized + io::Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.0.end_object_value(writer)
    }
}

/// Pretty-printed JSON with fixed float formatting and a trailing newline.
pub fn to_json<S: Serialize + ?Sized>(value: &S) -> Result<String> {
    let mut buf = Vec::new();
    let mut ser =
        serde_json::Serializer::with_formatter(&mut buf, FixedFloats(PrettyFormatter::new()));
    value.serialize(&mut ser)?;
    buf.push(b'\n');
    Ok(String::from_utf8(buf).expect("serde_json emits UTF-8"))
}

fn csv_string(records: impl IntoIterator<Item = Vec<String>>) -> Result<String> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new());
    for r in records {
        w.write_record(&r)?;
    }
    let bytes = w.into_inner().map_err(|e| e.into_error())?;
    Ok(String::from_utf8(bytes).expect("csv of UTF-8 fields"))
}

pub const DIAGNOSTICS_HEADER: [&str; 5] =
    ["j", "theta", "period", "repeat_count", "max_adjacent_delta"];

/// `j,theta,period,repeat_count,max_adjacent_delta`.
pub fn diagnostics_csv<T: Real>(rows: &[DiagnosticsRow<T>]) -> Result<String> {
    let header = DIAGNOSTICS_HEADER.iter().map(|s| s.to_string()).collect();
    csv_string(std::iter::once(header).chain(rows.iter().map(|r| {
        vec![
            r.j.to_string(),
            fmt_float(r.theta),
            fmt_float(r.period),
            fmt_float(r.repeat_count),
            fmt_float(r.max_adjacent_delta),
        ]
    })))
}

/// Dense row-major matrix; the header row is `p` followed by the positions,
/// and each data row starts with its own position.
pub fn matrix_csv<T: Real>(matrix: &SimilarityMatrix<T>) -> Result<String> {
    let n = matrix.size();
    let header = std::iter::once("p".to_string())
        .chain((0..n).map(|q| q.to_string()))
        .collect();
    csv_string(std::iter::once(header).chain((0..n).map(|p| {
        std::iter::once(p.to_string())
            .chain(matrix.row(p).iter().map(|v| fmt_float(*v)))
            .collect()
    })))
}

/// Generic CSV from a fixed header and string rows.
pub fn table_csv(header: &[&str], rows: Vec<Vec<String>>) -> Result<String> {
    let header = header.iter().map(|s| s.to_string()).collect();
    csv_string(std::iter::once(header).chain(rows))
}
