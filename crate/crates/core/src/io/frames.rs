//! Frame input: directories of numbered binary PGM (P5) / PPM (P6) files and
//! the raw `RFLX1` container.
//!
//! `RFLX1` layout: the 6 bytes `RFLX1\n`, one line of JSON
//! `{"height":H,"width":W,"channels":C,"frames":F,"dtype":"f32le"}` ending in
//! `\n`, then `F * H * W * C` little-endian `f32` values, frame after frame,
//! each frame row-major with interleaved channels.

use std::fs;
use std::io::{BufRead, BufReader, Read, Write};
use std::path::{Path, PathBuf};

use image::{DynamicImage, ImageFormat};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::norepeat::FrameSequence;

pub const RFLX_MAGIC: &[u8; 6] = b"RFLX1\n";

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RflxHeader {
    pub height: usize,
    pub width: usize,
    pub channels: usize,
    pub frames: usize,
    pub dtype: String,
}

fn decode_err(path: &Path, msg: impl std::fmt::Display) -> Error {
    Error::Decode(format!("{}: {msg}", path.display()))
}

/// Decodes one binary PGM/PPM file into `(height, width, channels, values)`.
/// Samples keep their decoded scale (0-255 for 8-bit, 0-65535 for 16-bit).
pub fn read_netpbm(path: &Path) -> Result<(usize, usize, usize, Vec<f64>)> {
    let bytes = fs::read(path)?;
    if !(bytes.starts_with(b"P5") || bytes.starts_with(b"P6")) {
        return Err(decode_err(path, "not a binary PGM (P5) or PPM (P6) file"));
    }
    let img = image::load_from_memory_with_format(&bytes, ImageFormat::Pnm)
        .map_err(|e| decode_err(path, e))?;
    let (w, h) = (img.width() as usize, img.height() as usize);
    let (c, values): (usize, Vec<f64>) = match img {
        DynamicImage::ImageLuma8(b) => (1, b.into_raw().into_iter().map(f64::from).collect()),
        DynamicImage::ImageRgb8(b) => (3, b.into_raw().into_iter().map(f64::from).collect()),
        DynamicImage::ImageLuma16(b) => (1, b.into_raw().into_iter().map(f64::from).collect()),
        DynamicImage::ImageRgb16(b) => (3, b.into_raw().into_iter().map(f64::from).collect()),
        other => {
            return Err(decode_err(
                path,
                format!("unsupported pixel layout {:?}", other.color()),
            ))
        }
    };
    Ok((h, w, c, values))
}

fn frame_sort_key(path: &Path) -> (u64, String) {
    let stem = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    let digits: String = stem
        .chars()
        .rev()
        .skip_while(|c| !c.is_ascii_digit())
        .take_while(|c| c.is_ascii_digit())
        .collect::<Vec<_>>()
        .into_iter()
        .rev()
        .collect();
    (digits.parse().unwrap_or(u64::MAX), stem)
}

/// Reads every `.pgm` / `.ppm` file in `dir`, ordered by the last run of
/// digits in the file name.
pub fn read_frame_dir(dir: &Path) -> Result<FrameSequence<f64>> {
    let mut paths: Vec<PathBuf> = fs::read_dir(dir)?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| {
            p.is_file()
                && p.extension()
                    .and_then(|e| e.to_str())
                    .is_some_and(|e| e.eq_ignore_ascii_case("pgm") || e.eq_ignore_ascii_case("ppm"))
        })
        .collect();
    paths.sort_by_key(|p| frame_sort_key(p));
    if paths.is_empty() {
        return Err(decode_err(dir, "no .pgm or .ppm frames found"));
    }
    let mut dims = None;
    let mut frames = Vec::with_capacity(paths.len());
    for p in &paths {
        let (h, w, c, values) = read_netpbm(p)?;
        match dims {
            None => dims = Some((h, w, c)),
            Some(d) if d != (h, w, c) => {
                return Err(Error::FrameMismatch(format!(
                    "{}: {h}x{w}x{c} differs from first frame {}x{}x{}",
                    p.display(),
                    d.0,
                    d.1,
                    d.2
                )))
            }
            Some(_) => {}
        }
        frames.push(values);
    }
    let (h, w, c) = dims.expect("at least one frame");
    FrameSequence::new(h, w, c, frames)
}

pub fn read_rflx(path: &Path) -> Result<FrameSequence<f64>> {
    let mut r = BufReader::new(fs::File::open(path)?);
    let mut magic = [0u8; 6];
    r.read_exact(&mut magic)
        .map_err(|_| decode_err(path, "truncated header"))?;
    if &magic != RFLX_MAGIC {
        return Err(decode_err(path, "missing RFLX1 magic"));
    }
    let mut line = String::new();
    r.read_line(&mut line)?;
    let header: RflxHeader = serde_json::from_str(line.trim_end())
        .map_err(|e| decode_err(path, format!("bad header: {e}")))?;
    if header.dtype != "f32le" {
        return Err(decode_err(
            path,
            format!("unsupported dtype `{}`", header.dtype),
        ));
    }
    let per_frame = header.height * header.width * header.channels;
    let mut data = Vec::new();
    r.read_to_end(&mut data)?;
    let expected = per_frame * header.frames * 4;
    if data.len() != expected {
        return Err(decode_err(
            path,
            format!("expected {expected} payload bytes, found {}", data.len()),
        ));
    }
    let values: Vec<f64> = data
        .chunks_exact(4)
        .map(|b| f32::from_le_bytes([b[0], b[1], b[2], b[3]]) as f64)
        .collect();
    let frames = if per_frame == 0 {
        Vec::new()
    } else {
        values.chunks(per_frame).map(|c| c.to_vec()).collect()
    };
    FrameSequence::new(header.height, header.width, header.channels, frames)
}

/// Writes `seq` as an `RFLX1` container (values narrowed to `f32`).
pub fn write_rflx(path: &Path, seq: &FrameSequence<f64>) -> Result<()> {
    let header = RflxHeader {
        height: seq.height(),
        width: seq.width(),
        channels: seq.channels(),
        frames: seq.frame_count(),
        dtype: "f32le".into(),
    };
    let mut out = Vec::new();
    out.extend_from_slice(RFLX_MAGIC);
    out.extend_from_slice(serde_json::to_string(&header)?.as_bytes());
    out.push(b'\n');
    for frame in seq.frames() {
        for v in frame {
            out.extend_from_slice(&(*v as f32).to_le_bytes());
        }
    }
    fs::File::create(path)?.write_all(&out)?;
    Ok(())
}

/// Writes one 8-bit frame as binary PGM (1 channel) or PPM (3 channels).
pub fn write_netpbm(
    path: &Path,
    height: usize,
    width: usize,
    channels: usize,
    values: &[u8],
) -> Result<()> {
    let magic = match channels {
        1 => "P5",
        3 => "P6",
        c => {
            return Err(Error::FrameMismatch(format!(
                "netpbm supports 1 or 3 channels, got {c}"
            )))
        }
    };
    if values.len() != height * width * channels {
        return Err(Error::FrameMismatch(format!(
            "{} samples for a {height}x{width}x{channels} image",
            values.len()
        )));
    }
    let mut f = std::io::BufWriter::new(fs::File::create(path)?);
    write!(f, "{magic}\n{width} {height}\n255\n")?;
    f.write_all(values)?;
    f.flush()?;
    Ok(())
}

/// Loads a frame directory or an `RFLX1` file.
pub fn load_frames(path: &Path) -> Result<FrameSequence<f64>> {
    if path.is_dir() {
        read_frame_dir(path)
    } else {
        read_rflx(path)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rflx_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("v.rflx");
        let frames = (0..3)
            .map(|t| (0..12).map(|i| (t * 12 + i) as f64 * 0.5).collect())
            .collect();
        let seq = FrameSequence::new(2, 2, 3, frames).unwrap();
        write_rflx(&path, &seq).unwrap();
        assert_eq!(read_rflx(&path).unwrap(), seq);
        assert_eq!(load_frames(&path).unwrap(), seq);
    }

    #[test]
    fn rflx_rejects_bad_input() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("bad.rflx");
        fs::write(&path, b"RFLX2\n{}\n").unwrap();
        assert!(matches!(read_rflx(&path), Err(Error::Decode(_))));
        fs::write(
            &path,
            b"RFLX1\n{\"height\":1,\"width\":1,\"channels\":1,\"frames\":2,\"dtype\":\"f32le\"}\n\0\0\0\0",
        )
        .unwrap();
        assert!(matches!(read_rflx(&path), Err(Error::Decode(_))));
    }

    #[test]
    fn netpbm_directory() {
        let dir = tempfile::tempdir().unwrap();
        for t in [10_u8, 2, 1] {
            let vals: Vec<u8> = (0..6).map(|i| t * 10 + i).collect();
            write_netpbm(&dir.path().join(format!("frame_{t}.ppm")), 1, 2, 3, &vals).unwrap();
        }
        let seq = read_frame_dir(dir.path()).unwrap();
        assert_eq!((seq.height(), seq.width(), seq.channels()), (1, 2, 3));
        assert_eq!(seq.frame(0)[0], 10.0);
        assert_eq!(seq.frame(1)[0], 20.0);
        assert_eq!(seq.frame(2)[5], 105.0);
    }

    #[test]
    fn pgm_gray_and_mismatch() {
        let dir = tempfile::tempdir().unwrap();
        write_netpbm(&dir.path().join("0.pgm"), 2, 2, 1, &[0, 1, 2, 255]).unwrap();
        write_netpbm(&dir.path().join("1.pgm"), 2, 2, 1, &[3, 3, 3, 3]).unwrap();
        let seq = read_frame_dir(dir.path()).unwrap();
        assert_eq!(seq.channels(), 1);
        assert_eq!(seq.frame(0), &[0.0, 1.0, 2.0, 255.0]);
        write_netpbm(&dir.path().join("2.pgm"), 1, 2, 1, &[3, 3]).unwrap();
        assert!(matches!(
            read_frame_dir(dir.path()),
            Err(Error::FrameMismatch(_))
        ));
    }

    #[test]
    fn rejects_ascii_netpbm() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("a.pgm");
        fs::write(&p, b"P2\n1 1\n255\n7\n").unwrap();
        assert!(matches!(read_netpbm(&p), Err(Error::Decode(_))));
    }
}
