//! On-disk formats.
//!
//! PIMX layout (all little-endian): `b"PIMX"`, `u16` version (1), `u32 k`,
//! `u64 d`, `k*d` `f64` values row-major, `u64` byte length, then a UTF-8
//! JSON array of `{label, kind}` objects, one per row.
//!
//! Histogram CSV: a `# d=<d> total=<n>` line, then `index,count` rows.

use super::{BitstringHistogram, DistributionMatrix, RowKind};
use crate::error::{Error, Result};
use crate::labels::ErrorLabel;
use serde::{Deserialize, Serialize};
use std::io::{BufRead, Read, Write};

const MAGIC: &[u8; 4] = b"PIMX";
const VERSION: u16 = 1;

#[derive(Serialize, Deserialize)]
struct RowMeta {
    label: ErrorLabel,
    kind: RowKind,
}

fn fmt_err(msg: impl Into<String>) -> Error {
    Error::Format(msg.into())
}

pub fn write_pimx<W: Write>(mut w: W, pi: &DistributionMatrix) -> Result<()> {
    w.write_all(MAGIC)?;
    w.write_all(&VERSION.to_le_bytes())?;
    w.write_all(&(pi.k() as u32).to_le_bytes())?;
    w.write_all(&(pi.d() as u64).to_le_bytes())?;
    let mut buf = Vec::with_capacity(pi.d() * 8);
    for i in 0..pi.k() {
        buf.clear();
        for v in pi.row(i) {
            buf.extend_from_slice(&v.to_le_bytes());
        }
        w.write_all(&buf)?;
    }
    let meta: Vec<RowMeta> =
        pi.labels().iter().zip(pi.kinds()).map(|(l, k)| RowMeta { label: l.clone(), kind: *k }).collect();
    let json = serde_json::to_vec(&meta)?;
    w.write_all(&(json.len() as u64).to_le_bytes())?;
    w.write_all(&json)?;
    w.flush()?;
    Ok(())
}

fn read_array<const N: usize, R: Read>(r: &mut R) -> Result<[u8; N]> {
    let mut b = [0u8; N];
    r.read_exact(&mut b).map_err(|e| fmt_err(format!("truncated PIMX header: {e}")))?;
    Ok(b)
}

pub fn read_pimx<R: Read>(mut r: R) -> Result<DistributionMatrix> {
    if &read_array::<4, _>(&mut r)? != MAGIC {
        return Err(fmt_err("bad magic, not a PIMX file"));
    }
    let version = u16::from_le_bytes(read_array(&mut r)?);
    if version != VERSION {
        return Err(fmt_err(format!("unsupported PIMX version {version}")));
    }
    let k = u32::from_le_bytes(read_array(&mut r)?) as usize;
    let d = u64::from_le_bytes(read_array(&mut r)?) as usize;
    let len = k.checked_mul(d).and_then(|n| n.checked_mul(8)).ok_or_else(|| fmt_err("matrix size overflows"))?;
    let mut raw = vec![0u8; len];
    r.read_exact(&mut raw).map_err(|e| fmt_err(format!("truncated PIMX body: {e}")))?;
    let data: Vec<f64> = raw.chunks_exact(8).map(|c| f64::from_le_bytes(c.try_into().unwrap())).collect();
    let jlen = u64::from_le_bytes(read_array(&mut r)?) as usize;
    let mut json = vec![0u8; jlen];
    r.read_exact(&mut json).map_err(|e| fmt_err(format!("truncated PIMX labels: {e}")))?;
    let meta: Vec<RowMeta> = serde_json::from_slice(&json)?;
    if meta.len() != k {
        return Err(fmt_err(format!("{} label entries for k={k}", meta.len())));
    }
    let (labels, kinds) = meta.into_iter().map(|m| (m.label, m.kind)).unzip();
    DistributionMatrix::new(d, data, labels, kinds)
}

pub fn write_histogram_csv<W: Write>(mut w: W, h: &BitstringHistogram) -> Result<()> {
    writeln!(w, "# d={} total={}", h.d(), h.total())?;
    writeln!(w, "index,count")?;
    for &(j, c) in h.support() {
        writeln!(w, "{j},{c}")?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_histogram_csv<R: BufRead>(r: R) -> Result<BitstringHistogram> {
    let mut lines = r.lines().enumerate();
    let (_, meta) = lines.next().ok_or_else(|| fmt_err("empty histogram file"))?;
    let meta = meta?;
    let mut d = None;
    let mut total = None;
    for tok in meta.trim_start_matches('#').split_whitespace() {
        if let Some(v) = tok.strip_prefix("d=") {
            d = Some(v.parse::<u64>().map_err(|e| fmt_err(format!("line 1: bad d: {e}")))?);
        } else if let Some(v) = tok.strip_prefix("total=") {
            total = Some(v.parse::<u64>().map_err(|e| fmt_err(format!("line 1: bad total: {e}")))?);
        }
    }
    let d = d.ok_or_else(|| fmt_err("line 1: missing d=<d> metadata"))?;
    match lines.next() {
        Some((_, Ok(h))) if h.trim() == "index,count" => {}
        _ => return Err(fmt_err("line 2: expected header index,count")),
    }
    let mut pairs = Vec::new();
    for (ln, line) in lines {
        let line = line?;
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let (a, b) = line.split_once(',').ok_or_else(|| fmt_err(format!("line {}: expected index,count", ln + 1)))?;
        let j = a.trim().parse::<u64>().map_err(|e| fmt_err(format!("line {}: bad index: {e}", ln + 1)))?;
        let c = b.trim().parse::<u64>().map_err(|e| fmt_err(format!("line {}: bad count: {e}", ln + 1)))?;
        pairs.push((j, c));
    }
    let h = BitstringHistogram::from_pairs(d, pairs)?;
    if let Some(t) = total {
        if t != h.total() {
            return Err(fmt_err(format!("metadata total {t} but counts sum to {}", h.total())));
        }
    }
    Ok(h)
}
