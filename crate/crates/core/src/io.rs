//! NLT1 tensor files, 16-bit PGM images and CSV output.
//!
//! An NLT1 file is one ASCII header line
//! `NLT1 <VOL|TRN|MSK> <d0> <d1> <d2> <m0> <m1> <m2>\n` followed by the
//! payload with the last axis fastest: little-endian `f64` for volumes and
//! transients, one byte (0 or 1) per scan point for masks. The metadata is
//! the voxel pitch for VOL, the wall pitch and bin width for TRN, and zeros
//! for MSK (whose `d2` is 1).

use std::fs;
use std::io::Write;
use std::path::Path;

use crate::error::{Error, Result};
use crate::grid::{ScanMask, Transient, TransientGrid, Volume, VolumeGrid};
use crate::metrics::{DepthIntensityMap, MetricsReport, CSV_HEADER};

const MAGIC: &str = "NLT1";
const MAX_HEADER: usize = 512;

#[derive(Clone, Debug, PartialEq)]
pub enum Tensor {
    Volume(Volume),
    Transient(Transient),
    Mask(ScanMask),
}

impl Tensor {
    pub fn kind(&self) -> &'static str {
        match self {
            Tensor::Volume(_) => "VOL",
            Tensor::Transient(_) => "TRN",
            Tensor::Mask(_) => "MSK",
        }
    }
}

fn format_err<T>(offset: usize, message: impl Into<String>) -> Result<T> {
    Err(Error::Format {
        offset: offset as u64,
        message: message.into(),
    })
}

/// Shortest round-trip decimal, switching to exponent notation outside
/// `[1e-4, 1e16)`.
pub fn format_float(x: f64) -> String {
    let a = x.abs();
    if x != 0.0 && !(1e-4..1e16).contains(&a) {
        format!("{x:e}")
    } else {
        format!("{x}")
    }
}

pub fn header(t: &Tensor) -> String {
    let (dims, meta) = match t {
        Tensor::Volume(v) => (v.grid().dims(), v.grid().pitch()),
        Tensor::Transient(tr) => {
            let g = tr.grid();
            let [wx, wy] = g.wall_pitch();
            (g.dims(), [wx, wy, g.bin_width()])
        }
        Tensor::Mask(m) => {
            let [a, b] = m.dims();
            ([a, b, 1], [0.0; 3])
        }
    };
    let meta: Vec<String> = meta.iter().map(|&m| format_float(m)).collect();
    format!(
        "{MAGIC} {} {} {} {} {}\n",
        t.kind(),
        dims[0],
        dims[1],
        dims[2],
        meta.join(" ")
    )
}

pub fn encode(t: &Tensor) -> Vec<u8> {
    let mut out = header(t).into_bytes();
    match t {
        Tensor::Volume(v) => v
            .data()
            .iter()
            .for_each(|x| out.extend_from_slice(&x.to_le_bytes())),
        Tensor::Transient(tr) => tr
            .data()
            .iter()
            .for_each(|x| out.extend_from_slice(&x.to_le_bytes())),
        Tensor::Mask(m) => out.extend(m.as_slice().iter().map(|&b| b as u8)),
    }
    out
}

pub fn decode(bytes: &[u8]) -> Result<Tensor> {
    let end = match bytes.iter().take(MAX_HEADER).position(|&b| b == b'\n') {
        Some(e) => e,
        None if bytes.len() < MAX_HEADER => {
            return format_err(bytes.len(), "header line is not terminated")
        }
        None => return format_err(MAX_HEADER, "header line too long"),
    };
    let line = &bytes[..end];
    if let Some(p) = line.iter().position(|b| !b.is_ascii()) {
        return format_err(p, "header is not ASCII");
    }
    let line = std::str::from_utf8(line).expect("ascii is utf-8");
    let tokens: Vec<(usize, &str)> = line
        .split(' ')
        .scan(0usize, |pos, tok| {
            let start = *pos;
            *pos += tok.len() + 1;
            Some((start, tok))
        })
        .collect();
    if tokens.first().map(|t| t.1) != Some(MAGIC) {
        return format_err(0, "bad magic, expected NLT1");
    }
    if tokens.len() != 8 {
        return format_err(
            end,
            format!("expected 8 header fields, found {}", tokens.len()),
        );
    }
    let kind = tokens[1].1;
    let mut dims = [0usize; 3];
    for (d, &(pos, tok)) in dims.iter_mut().zip(&tokens[2..5]) {
        *d = tok
            .parse()
            .or_else(|_| format_err(pos, format!("bad dimension '{tok}'")))?;
        if *d == 0 {
            return format_err(pos, "zero dimension");
        }
    }
    let mut meta = [0.0f64; 3];
    for (m, &(pos, tok)) in meta.iter_mut().zip(&tokens[5..8]) {
        *m = tok
            .parse()
            .or_else(|_| format_err(pos, format!("bad metadata '{tok}'")))?;
    }
    let count = dims[0]
        .checked_mul(dims[1])
        .and_then(|n| n.checked_mul(dims[2]))
        .ok_or(Error::Format {
            offset: tokens[2].0 as u64,
            message: "dimension overflow".into(),
        })?;
    let start = end + 1;
    let elem = if kind == "MSK" { 1 } else { 8 };
    let need = count.checked_mul(elem).ok_or(Error::Format {
        offset: tokens[2].0 as u64,
        message: "dimension overflow".into(),
    })?;
    let payload = &bytes[start..];
    if payload.len() < need {
        return format_err(
            bytes.len(),
            format!("truncated payload: {} of {need} bytes", payload.len()),
        );
    }
    if payload.len() > need {
        return format_err(start + need, "trailing bytes after payload");
    }
    let floats = || -> Vec<f64> {
        payload
            .chunks_exact(8)
            .map(|c| f64::from_le_bytes(c.try_into().expect("8-byte chunk")))
            .collect()
    };
    let meta_err = |e: Error| Error::Format {
        offset: tokens[5].0 as u64,
        message: e.to_string(),
    };
    let payload_err = |e: Error| Error::Format {
        offset: start as u64,
        message: e.to_string(),
    };
    match kind {
        "VOL" => {
            let g = VolumeGrid::from_pitch(dims[0], dims[1], dims[2], meta).map_err(meta_err)?;
            Ok(Tensor::Volume(
                Volume::new(g, floats()).map_err(payload_err)?,
            ))
        }
        "TRN" => {
            let g =
                TransientGrid::from_pitch(dims[0], dims[1], dims[2], [meta[0], meta[1]], meta[2])
                    .map_err(meta_err)?;
            Ok(Tensor::Transient(
                Transient::new(g, floats()).map_err(payload_err)?,
            ))
        }
        "MSK" => {
            if dims[2] != 1 {
                return format_err(tokens[4].0, "mask must have d2 = 1");
            }
            let mut scanned = Vec::with_capacity(count);
            for (i, &b) in payload.iter().enumerate() {
                match b {
                    0 => scanned.push(false),
                    1 => scanned.push(true),
                    _ => return format_err(start + i, format!("mask byte {b} is not 0 or 1")),
                }
            }
            if scanned.iter().any(|&s| s) {
                Ok(Tensor::Mask(
                    ScanMask::new(dims[0], dims[1], scanned).map_err(payload_err)?,
                ))
            } else {
                Ok(Tensor::Mask(ScanMask::empty(dims[0], dims[1])))
            }
        }
        other => format_err(tokens[1].0, format!("unknown kind '{other}'")),
    }
}

pub fn write_tensor(path: impl AsRef<Path>, t: &Tensor) -> Result<()> {
    fs::write(path, encode(t))?;
    Ok(())
}

pub fn read_tensor(path: impl AsRef<Path>) -> Result<Tensor> {
    decode(&fs::read(path)?)
}

fn wrong_kind(found: &Tensor, want: &str) -> Error {
    Error::Format {
        offset: 5,
        message: format!("expected {want}, found {}", found.kind()),
    }
}

pub fn read_volume(path: impl AsRef<Path>) -> Result<Volume> {
    match read_tensor(path)? {
        Tensor::Volume(v) => Ok(v),
        other => Err(wrong_kind(&other, "VOL")),
    }
}

pub fn read_transient(path: impl AsRef<Path>) -> Result<Transient> {
    match read_tensor(path)? {
        Tensor::Transient(t) => Ok(t),
        other => Err(wrong_kind(&other, "TRN")),
    }
}

pub fn read_mask(path: impl AsRef<Path>) -> Result<ScanMask> {
    match read_tensor(path)? {
        Tensor::Mask(m) => Ok(m),
        other => Err(wrong_kind(&other, "MSK")),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Channel {
    Intensity,
    Depth,
}

/// P5 image, `nx` wide and `ny` high, big-endian 16-bit samples. Background
/// depth is written as 0.
pub fn encode_pgm(map: &DepthIntensityMap, channel: Channel) -> Vec<u8> {
    let (nx, ny) = (map.nx, map.ny);
    let mut out = format!("P5\n{nx} {ny}\n65535\n").into_bytes();
    for j in 0..ny {
        for i in 0..nx {
            let p = i * ny + j;
            let v = match channel {
                Channel::Intensity => map.intensity[p],
                Channel::Depth if map.foreground[p] && map.z_max > 0.0 => map.depth[p] / map.z_max,
                Channel::Depth => 0.0,
            };
            let q = (v.clamp(0.0, 1.0) * 65535.0).round() as u16;
            out.extend_from_slice(&q.to_be_bytes());
        }
    }
    out
}

pub fn write_image(
    map: &DepthIntensityMap,
    path: impl AsRef<Path>,
    channel: Channel,
) -> Result<()> {
    fs::write(path, encode_pgm(map, channel))?;
    Ok(())
}

/// `iter,energy` rows, entry 0 being the starting point.
pub fn write_energy_csv(path: impl AsRef<Path>, energies: &[f64]) -> Result<()> {
    let mut out = String::from("iter,energy\n");
    for (k, e) in energies.iter().enumerate() {
        out.push_str(&format!("{k},{e:e}\n"));
    }
    fs::write(path, out)?;
    Ok(())
}

pub fn write_metrics_csv(path: impl AsRef<Path>, rows: &[MetricsReport]) -> Result<()> {
    let mut out = format!("{CSV_HEADER}\n");
    for r in rows {
        out.push_str(&r.csv_row());
        out.push('\n');
    }
    fs::write(path, out)?;
    Ok(())
}

/// Appends one row, writing the header first when the file is new or empty.
pub fn append_metrics_csv(path: impl AsRef<Path>, row: &MetricsReport) -> Result<()> {
    let path = path.as_ref();
    let fresh = fs::metadata(path).map(|m| m.len() == 0).unwrap_or(true);
    let mut f = fs::OpenOptions::new()
        .create(true)
        .append(true)
        .open(path)?;
    if fresh {
        writeln!(f, "{CSV_HEADER}")?;
    }
    writeln!(f, "{}", row.csv_row())?;
    Ok(())
}
