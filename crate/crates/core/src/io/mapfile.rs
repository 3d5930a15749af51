//! Saliency map files: 8-bit binary PGM for viewing, PFM for lossless chaining.
//!
//! PFM maps are single-channel (`Pf`), little-endian (scale `-1`), stored
//! bottom row first. PGM maps are min-max normalized and rounded to 0..=255.

use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::map::{normalize_minmax, SaliencyMap};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MapFormat {
    Pgm8,
    Pfm,
}

impl MapFormat {
    pub fn extension(self) -> &'static str {
        match self {
            MapFormat::Pgm8 => "pgm",
            MapFormat::Pfm => "pfm",
        }
    }
}

impl FromStr for MapFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "pgm8" | "pgm" => Ok(MapFormat::Pgm8),
            "pfm" => Ok(MapFormat::Pfm),
            _ => Err(Error::InvalidArgument(format!("unknown map format `{s}`"))),
        }
    }
}

pub fn encode_pgm8(m: &SaliencyMap) -> Vec<u8> {
    let mut out = format!("P5\n{} {}\n255\n", m.width(), m.height()).into_bytes();
    out.extend(
        normalize_minmax(m)
            .values()
            .iter()
            .map(|v| (v * 255.0).round().clamp(0.0, 255.0) as u8),
    );
    out
}

pub fn encode_pfm(m: &SaliencyMap) -> Vec<u8> {
    let mut out = format!("Pf\n{} {}\n-1.0\n", m.width(), m.height()).into_bytes();
    for row in m.values().chunks_exact(m.width()).rev() {
        for &v in row {
            out.extend_from_slice(&(v as f32).to_le_bytes());
        }
    }
    out
}

pub fn write_map(m: &SaliencyMap, path: &Path, format: MapFormat) -> Result<()> {
    let bytes = match format {
        MapFormat::Pgm8 => encode_pgm8(m),
        MapFormat::Pfm => encode_pfm(m),
    };
    fs::write(path, bytes)?;
    Ok(())
}

/// Splits off `count` whitespace-separated header tokens; returns them and the payload offset.
fn header_tokens(bytes: &[u8], count: usize) -> Option<(Vec<String>, usize)> {
    let mut tokens = Vec::new();
    let mut i = 0;
    while tokens.len() < count {
        while i < bytes.len() && bytes[i].is_ascii_whitespace() {
            i += 1;
        }
        let start = i;
        while i < bytes.len() && !bytes[i].is_ascii_whitespace() {
            i += 1;
        }
        if start == i {
            return None;
        }
        tokens.push(String::from_utf8_lossy(&bytes[start..i]).into_owned());
    }
    // exactly one whitespace byte separates the header from the payload
    (i < bytes.len()).then_some((tokens, i + 1))
}

pub fn decode_pfm(bytes: &[u8], path: &Path) -> Result<SaliencyMap> {
    let bad = |reason: &str| Error::MapFormat {
        path: path.to_path_buf(),
        reason: reason.to_string(),
    };
    let (tok, offset) = header_tokens(bytes, 4).ok_or_else(|| bad("truncated header"))?;
    if tok[0] != "Pf" {
        return Err(bad("only single-channel `Pf` maps are supported"));
    }
    let w: usize = tok[1].parse().map_err(|_| bad("bad width"))?;
    let h: usize = tok[2].parse().map_err(|_| bad("bad height"))?;
    let scale: f64 = tok[3].parse().map_err(|_| bad("bad scale"))?;
    if w == 0 || h == 0 || scale == 0.0 {
        return Err(bad("zero dimension or scale"));
    }
    let payload = &bytes[offset..];
    if payload.len() != w * h * 4 {
        return Err(bad("payload size does not match dimensions"));
    }
    let mut values = vec![0.0; w * h];
    for (k, chunk) in payload.chunks_exact(4).enumerate() {
        let raw = [chunk[0], chunk[1], chunk[2], chunk[3]];
        let v = if scale < 0.0 {
            f32::from_le_bytes(raw)
        } else {
            f32::from_be_bytes(raw)
        };
        let (row_from_bottom, x) = (k / w, k % w);
        values[(h - 1 - row_from_bottom) * w + x] = v as f64;
    }
    SaliencyMap::new(w, h, values).map_err(|e| bad(&e.to_string()))
}

pub fn decode_pgm8(bytes: &[u8], path: &Path) -> Result<SaliencyMap> {
    let bad = |reason: &str| Error::MapFormat {
        path: path.to_path_buf(),
        reason: reason.to_string(),
    };
    let (tok, offset) = header_tokens(bytes, 4).ok_or_else(|| bad("truncated header"))?;
    if tok[0] != "P5" || tok[3] != "255" {
        return Err(bad("expected an 8-bit binary `P5` map"));
    }
    let w: usize = tok[1].parse().map_err(|_| bad("bad width"))?;
    let h: usize = tok[2].parse().map_err(|_| bad("bad height"))?;
    let payload = &bytes[offset..];
    if w == 0 || h == 0 || payload.len() != w * h {
        return Err(bad("payload size does not match dimensions"));
    }
    SaliencyMap::new(w, h, payload.iter().map(|&b| b as f64 / 255.0).collect())
        .map_err(|e| bad(&e.to_string()))
}

/// Reads a `.pfm` or `.pgm` map, chosen by extension.
pub fn read_map(path: &Path) -> Result<SaliencyMap> {
    let bytes = fs::read(path)?;
    match path.extension().and_then(|e| e.to_str()) {
        Some("pgm") => decode_pgm8(&bytes, path),
        _ => decode_pfm(&bytes, path),
    }
}

pub fn frame_file_name(k: usize, format: MapFormat) -> String {
    format!("frame_{k:05}.{}", format.extension())
}

/// Writes one file per frame as `frame_00000.<ext>`, creating `dir`.
pub fn write_sequence(dir: &Path, maps: &[SaliencyMap], format: MapFormat) -> Result<()> {
    fs::create_dir_all(dir)?;
    for (k, m) in maps.iter().enumerate() {
        write_map(m, &dir.join(frame_file_name(k, format)), format)?;
    }
    Ok(())
}

/// Lists `frame_*.pfm` files in `dir`, sorted by name.
pub fn sequence_paths(dir: &Path) -> Result<Vec<PathBuf>> {
    let mut paths: Vec<PathBuf> = fs::read_dir(dir)?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| {
            p.extension().is_some_and(|e| e == "pfm")
                && p.file_name()
                    .and_then(|n| n.to_str())
                    .is_some_and(|n| n.starts_with("frame_"))
        })
        .collect();
    paths.sort();
    if paths.is_empty() {
        return Err(Error::InvalidArgument(format!(
            "no frame_*.pfm maps in {}",
            dir.display()
        )));
    }
    Ok(paths)
}

pub fn read_sequence(dir: &Path) -> Result<Vec<SaliencyMap>> {
    sequence_paths(dir)?.iter().map(|p| read_map(p)).collect()
}
