//! `RTG1` binary graph files and CSV edge export.
//!
//! Layout, all integers little-endian:
//!
//! ```text
//! magic        4 bytes  "RTG1"
//! node_count   u64      n
//! edge_count   u64      e
//! node_ids     n x u64  ascending user ids
//! offsets      (n+1) x u64
//! neighbors    e x u32  row-major target indices
//! weights      e x u64
//! ```
//!
//! Only directed graphs are stored; the undirected projection is recomputed on load.

use std::fs;
use std::io::{BufWriter, Write};
use std::path::Path;

use super::RetweetGraph;
use crate::error::{Error, Result};

pub const RTG_MAGIC: &[u8; 4] = b"RTG1";

pub fn encode_rtg(g: &RetweetGraph) -> Result<Vec<u8>> {
    if !g.is_directed() {
        return Err(Error::Argument("RTG1 files hold directed graphs only".into()));
    }
    let n = g.node_count();
    let e = g.neighbor_array().len();
    let mut buf = Vec::with_capacity(20 + 8 * n + 8 * (n + 1) + 12 * e);
    buf.extend_from_slice(RTG_MAGIC);
    buf.extend_from_slice(&(n as u64).to_le_bytes());
    buf.extend_from_slice(&(e as u64).to_le_bytes());
    for id in g.node_ids() {
        buf.extend_from_slice(&id.to_le_bytes());
    }
    for &o in g.offsets() {
        buf.extend_from_slice(&(o as u64).to_le_bytes());
    }
    for &v in g.neighbor_array() {
        buf.extend_from_slice(&v.to_le_bytes());
    }
    for &w in g.weight_array() {
        buf.extend_from_slice(&w.to_le_bytes());
    }
    Ok(buf)
}

struct Cursor<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn take(&mut self, len: usize) -> Result<&'a [u8]> {
        let end = self
            .pos
            .checked_add(len)
            .filter(|&end| end <= self.bytes.len())
            .ok_or_else(|| Error::Format("RTG1 file truncated".into()))?;
        let s = &self.bytes[self.pos..end];
        self.pos = end;
        Ok(s)
    }

    fn u64(&mut self) -> Result<u64> {
        Ok(u64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }

    fn u32(&mut self) -> Result<u32> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().unwrap()))
    }

    fn u64s(&mut self, count: usize) -> Result<Vec<u64>> {
        (0..count).map(|_| self.u64()).collect()
    }
}

pub fn decode_rtg(bytes: &[u8]) -> Result<RetweetGraph> {
    let mut c = Cursor { bytes, pos: 0 };
    if c.take(4)? != RTG_MAGIC {
        return Err(Error::Format("bad magic, expected RTG1".into()));
    }
    let n = c.u64()? as usize;
    let e = c.u64()? as usize;
    // Reject absurd headers before allocating.
    if n.saturating_mul(16).saturating_add(e.saturating_mul(12)) > bytes.len() {
        return Err(Error::Format("RTG1 header counts exceed file size".into()));
    }
    let ids = c.u64s(n)?;
    let offsets = c.u64s(n + 1)?.into_iter().map(|o| o as usize).collect();
    let neighbors = (0..e).map(|_| c.u32()).collect::<Result<Vec<_>>>()?;
    let weights = c.u64s(e)?;
    if c.pos != bytes.len() {
        return Err(Error::Format("trailing bytes after RTG1 payload".into()));
    }
    RetweetGraph::from_raw_parts(ids, offsets, neighbors, weights, true)
}

pub fn write_rtg(g: &RetweetGraph, path: &Path) -> Result<()> {
    let bytes = encode_rtg(g)?;
    fs::write(path, bytes).map_err(|e| Error::io(path, e))
}

pub fn read_rtg(path: &Path) -> Result<RetweetGraph> {
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    decode_rtg(&bytes)
}

/// `src,dst,weight` rows; an optional `#` comment line goes first.
pub fn write_edges_csv(g: &RetweetGraph, path: &Path, header_comment: Option<&str>) -> Result<()> {
    let file = fs::File::create(path).map_err(|e| Error::io(path, e))?;
    let mut out = BufWriter::new(file);
    let io = |e| Error::io(path, e);
    if let Some(c) = header_comment {
        writeln!(out, "# {c}").map_err(io)?;
    }
    writeln!(out, "src,dst,weight").map_err(io)?;
    for (u, v, w) in g.edges() {
        writeln!(out, "{u},{v},{w}").map_err(io)?;
    }
    out.flush().map_err(io)
}
