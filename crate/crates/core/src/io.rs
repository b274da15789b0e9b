//! CSV and binary-frame encodings of paths, position ensembles and jump lists.
//!
//! Binary frame layout, little-endian throughout:
//!
//! | field   | type      |
//! |---------|-----------|
//! | magic   | `b"LWFRAME\0"` |
//! | version | u16 |
//! | kind    | u16 (walk kind code, or 16 for jump lists) |
//! | dim     | u32 |
//! | seed    | u64 |
//! | ncols   | u32 |
//! | nparams | u32 |
//! | nrows   | u64 |
//! | params  | `nparams` × f64 |
//! | rows    | `nrows × ncols` × f64 |
//!
//! Path frames have columns `trajectory_id, epoch, x1..xd` and one parameter,
//! the horizon. Jump-list frames have columns
//! `list_id, epoch, magnitude, u1..ud` and parameters
//! `eps, drift_s, drift_l (d values), tau_max of every list`.

use std::io::{Read, Write};

use crate::error::{Error, Result};
use crate::limit::CoupledJumpList;
use crate::walk::{WalkKind, WalkPath};

pub const FRAME_MAGIC: &[u8; 8] = b"LWFRAME\0";
pub const FRAME_VERSION: u16 = 1;
pub const JUMP_LIST_KIND: u16 = 16;

fn io_err(e: std::io::Error) -> Error {
    Error::Format(e.to_string())
}

/// `trajectory_id,epoch,x1..xd`, one row per renewal epoch.
pub fn write_paths_csv<W: Write>(paths: &[WalkPath], mut out: W) -> std::io::Result<()> {
    let dim = paths.first().map_or(1, |p| p.dim);
    let mut header = vec!["trajectory_id".to_string(), "epoch".to_string()];
    header.extend((1..=dim).map(|i| format!("x{i}")));
    writeln!(out, "{}", header.join(","))?;
    for (id, p) in paths.iter().enumerate() {
        for k in 0..p.len() {
            write!(out, "{id},{:e}", p.epochs[k])?;
            for v in p.position_row(k) {
                write!(out, ",{v:e}")?;
            }
            writeln!(out)?;
        }
    }
    Ok(())
}

/// `trajectory_id,t,x1..xd`; `positions[j]` holds trajectory `j` at every time, row-major.
pub fn write_positions_csv<W: Write>(
    dim: usize,
    times: &[f64],
    positions: &[Vec<f64>],
    mut out: W,
) -> std::io::Result<()> {
    let mut header = vec!["trajectory_id".to_string(), "t".to_string()];
    header.extend((1..=dim).map(|i| format!("x{i}")));
    writeln!(out, "{}", header.join(","))?;
    for (id, rows) in positions.iter().enumerate() {
        for (m, &t) in times.iter().enumerate() {
            write!(out, "{id},{t:e}")?;
            for v in &rows[m * dim..(m + 1) * dim] {
                write!(out, ",{v:e}")?;
            }
            writeln!(out)?;
        }
    }
    Ok(())
}

/// Parsed frame header.
#[derive(Debug, Clone, PartialEq)]
pub struct FrameHeader {
    pub version: u16,
    pub kind: u16,
    pub dim: u32,
    pub seed: u64,
    pub ncols: u32,
    pub params: Vec<f64>,
    pub nrows: u64,
}

fn write_header<W: Write>(out: &mut W, h: &FrameHeader) -> std::io::Result<()> {
    out.write_all(FRAME_MAGIC)?;
    out.write_all(&h.version.to_le_bytes())?;
    out.write_all(&h.kind.to_le_bytes())?;
    out.write_all(&h.dim.to_le_bytes())?;
    out.write_all(&h.seed.to_le_bytes())?;
    out.write_all(&h.ncols.to_le_bytes())?;
    out.write_all(&(h.params.len() as u32).to_le_bytes())?;
    out.write_all(&h.nrows.to_le_bytes())?;
    for p in &h.params {
        out.write_all(&p.to_le_bytes())?;
    }
    Ok(())
}

fn read_array<const N: usize, R: Read>(r: &mut R) -> Result<[u8; N]> {
    let mut b = [0u8; N];
    r.read_exact(&mut b).map_err(io_err)?;
    Ok(b)
}

fn read_f64<R: Read>(r: &mut R) -> Result<f64> {
    Ok(f64::from_le_bytes(read_array::<8, _>(r)?))
}

/// Reads and checks a frame header.
pub fn read_header<R: Read>(r: &mut R) -> Result<FrameHeader> {
    let magic = read_array::<8, _>(r)?;
    if &magic != FRAME_MAGIC {
        return Err(Error::Format("not a levywalk frame (bad magic)".into()));
    }
    let version = u16::from_le_bytes(read_array(r)?);
    if version != FRAME_VERSION {
        return Err(Error::Format(format!(
            "unsupported frame version {version}"
        )));
    }
    let kind = u16::from_le_bytes(read_array(r)?);
    let dim = u32::from_le_bytes(read_array(r)?);
    let seed = u64::from_le_bytes(read_array(r)?);
    let ncols = u32::from_le_bytes(read_array(r)?);
    let nparams = u32::from_le_bytes(read_array(r)?);
    let nrows = u64::from_le_bytes(read_array(r)?);
    let params = (0..nparams)
        .map(|_| read_f64(r))
        .collect::<Result<Vec<_>>>()?;
    Ok(FrameHeader {
        version,
        kind,
        dim,
        seed,
        ncols,
        params,
        nrows,
    })
}

/// Writes paths of one kind, dimension and horizon into a single frame.
pub fn write_path_frame<W: Write>(paths: &[WalkPath], seed: u64, mut out: W) -> Result<()> {
    let first = paths
        .first()
        .ok_or_else(|| Error::Input("no paths to write".into()))?;
    if paths
        .iter()
        .any(|p| p.kind != first.kind || p.dim != first.dim || p.horizon != first.horizon)
    {
        return Err(Error::Input(
            "paths in one frame must share kind, dimension and horizon".into(),
        ));
    }
    let nrows: usize = paths.iter().map(WalkPath::len).sum();
    let header = FrameHeader {
        version: FRAME_VERSION,
        kind: first.kind.code(),
        dim: first.dim as u32,
        seed,
        ncols: first.dim as u32 + 2,
        params: vec![first.horizon],
        nrows: nrows as u64,
    };
    write_header(&mut out, &header).map_err(io_err)?;
    for (id, p) in paths.iter().enumerate() {
        for k in 0..p.len() {
            out.write_all(&(id as f64).to_le_bytes()).map_err(io_err)?;
            out.write_all(&p.epochs[k].to_le_bytes()).map_err(io_err)?;
            for v in p.position_row(k) {
                out.write_all(&v.to_le_bytes()).map_err(io_err)?;
            }
        }
    }
    Ok(())
}

/// Inverse of [`write_path_frame`].
pub fn read_path_frame<R: Read>(mut r: R) -> Result<(FrameHeader, Vec<WalkPath>)> {
    let h = read_header(&mut r)?;
    let kind = WalkKind::from_code(h.kind)
        .ok_or_else(|| Error::Format(format!("frame kind {} is not a walk", h.kind)))?;
    let dim = h.dim as usize;
    if h.ncols as usize != dim + 2 || h.params.len() != 1 {
        return Err(Error::Format("path frame has an unexpected shape".into()));
    }
    let horizon = h.params[0];
    let mut paths: Vec<WalkPath> = Vec::new();
    for _ in 0..h.nrows {
        let id = read_f64(&mut r)? as usize;
        let epoch = read_f64(&mut r)?;
        if id == paths.len() {
            paths.push(WalkPath {
                kind,
                dim,
                horizon,
                epochs: Vec::new(),
                positions: Vec::new(),
            });
        } else if id + 1 != paths.len() {
            return Err(Error::Format(format!(
                "trajectory ids out of order at id {id}"
            )));
        }
        let p = paths.last_mut().unwrap();
        p.epochs.push(epoch);
        for _ in 0..dim {
            p.positions.push(read_f64(&mut r)?);
        }
    }
    Ok((h, paths))
}

/// Writes jump lists sharing dimension, cutoff and drifts into a single frame.
pub fn write_jump_frame<W: Write>(lists: &[CoupledJumpList], seed: u64, mut out: W) -> Result<()> {
    let first = lists
        .first()
        .ok_or_else(|| Error::Input("no jump lists to write".into()))?;
    if lists.iter().any(|l| {
        l.dim() != first.dim()
            || l.eps() != first.eps()
            || l.drift_s() != first.drift_s()
            || l.drift_l() != first.drift_l()
    }) {
        return Err(Error::Input(
            "jump lists in one frame must share dimension, cutoff and drifts".into(),
        ));
    }
    let dim = first.dim();
    let mut params = vec![first.eps(), first.drift_s()];
    params.extend_from_slice(first.drift_l());
    params.extend(lists.iter().map(CoupledJumpList::tau_max));
    let nrows: usize = lists.iter().map(CoupledJumpList::len).sum();
    let header = FrameHeader {
        version: FRAME_VERSION,
        kind: JUMP_LIST_KIND,
        dim: dim as u32,
        seed,
        ncols: dim as u32 + 3,
        params,
        nrows: nrows as u64,
    };
    write_header(&mut out, &header).map_err(io_err)?;
    for (id, l) in lists.iter().enumerate() {
        for j in 0..l.len() {
            out.write_all(&(id as f64).to_le_bytes()).map_err(io_err)?;
            out.write_all(&l.epochs()[j].to_le_bytes())
                .map_err(io_err)?;
            out.write_all(&l.magnitudes()[j].to_le_bytes())
                .map_err(io_err)?;
            for v in &l.directions()[j * dim..(j + 1) * dim] {
                out.write_all(&v.to_le_bytes()).map_err(io_err)?;
            }
        }
    }
    Ok(())
}

/// Inverse of [`write_jump_frame`]; every list is re-validated.
pub fn read_jump_frame<R: Read>(mut r: R) -> Result<(FrameHeader, Vec<CoupledJumpList>)> {
    let h = read_header(&mut r)?;
    if h.kind != JUMP_LIST_KIND {
        return Err(Error::Format(format!(
            "frame kind {} is not a jump list",
            h.kind
        )));
    }
    let dim = h.dim as usize;
    if h.ncols as usize != dim + 3 || h.params.len() < 2 + dim {
        return Err(Error::Format(
            "jump-list frame has an unexpected shape".into(),
        ));
    }
    let (eps, drift_s) = (h.params[0], h.params[1]);
    let drift_l = h.params[2..2 + dim].to_vec();
    let taus = &h.params[2 + dim..];
    let mut parts: Vec<(Vec<f64>, Vec<f64>, Vec<f64>)> = vec![Default::default(); taus.len()];
    let mut last = 0usize;
    for _ in 0..h.nrows {
        let id = read_f64(&mut r)? as usize;
        if id >= taus.len() || id < last {
            return Err(Error::Format(format!("list id {id} out of order or range")));
        }
        last = id;
        let part = &mut parts[id];
        part.0.push(read_f64(&mut r)?);
        part.1.push(read_f64(&mut r)?);
        for _ in 0..dim {
            part.2.push(read_f64(&mut r)?);
        }
    }
    let lists = parts
        .into_iter()
        .zip(taus)
        .map(|((e, m, u), &tau)| {
            CoupledJumpList::new(dim, tau, eps, e, m, u, drift_s, drift_l.clone())
        })
        .collect::<Result<Vec<_>>>()?;
    Ok((h, lists))
}
