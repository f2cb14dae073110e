//! `EMB1`: magic `EMB1`, little-endian `u32` rows and dim, then rows x dim little-endian
//! IEEE-754 binary32 values in row-major order. Row ids live in a sidecar text file
//! (`<path>.ids`, one id per line).

use std::fs;
use std::path::{Path, PathBuf};

use super::{EmbedError, EmbeddingMatrix};
use crate::Scalar;

pub const EMB1_MAGIC: &[u8; 4] = b"EMB1";

pub fn ids_path(path: &Path) -> PathBuf {
    let mut p = path.as_os_str().to_owned();
    p.push(".ids");
    PathBuf::from(p)
}

/// Serializes values as binary32; `f64` inputs are rounded to nearest.
pub fn write_emb1_bytes<S: Scalar>(m: &EmbeddingMatrix<S>) -> Result<Vec<u8>, EmbedError> {
    let rows = u32::try_from(m.rows()).map_err(|_| EmbedError::Format("too many rows for EMB1".into()))?;
    let dim = u32::try_from(m.dim()).map_err(|_| EmbedError::Format("dimension too large for EMB1".into()))?;
    let mut out = Vec::with_capacity(12 + m.data().len() * 4);
    out.extend_from_slice(EMB1_MAGIC);
    out.extend_from_slice(&rows.to_le_bytes());
    out.extend_from_slice(&dim.to_le_bytes());
    for &v in m.data() {
        let v = v.to_f32().ok_or(EmbedError::Format("value not representable as f32".into()))?;
        if !v.is_finite() {
            return Err(EmbedError::Format("value overflows f32".into()));
        }
        out.extend_from_slice(&v.to_le_bytes());
    }
    Ok(out)
}

pub fn read_emb1_bytes<S: Scalar>(bytes: &[u8]) -> Result<EmbeddingMatrix<S>, EmbedError> {
    if bytes.len() < 12 || &bytes[..4] != EMB1_MAGIC {
        return Err(EmbedError::Format("missing EMB1 header".into()));
    }
    let rows = u32::from_le_bytes(bytes[4..8].try_into().unwrap()) as usize;
    let dim = u32::from_le_bytes(bytes[8..12].try_into().unwrap()) as usize;
    let expected = rows
        .checked_mul(dim)
        .and_then(|n| n.checked_mul(4))
        .ok_or_else(|| EmbedError::Format("header size overflow".into()))?;
    let body = &bytes[12..];
    if body.len() != expected {
        return Err(EmbedError::Format(format!(
            "{rows} x {dim} matrix needs {expected} payload bytes, found {}",
            body.len()
        )));
    }
    let data = body
        .chunks_exact(4)
        .map(|c| S::from_f32(f32::from_le_bytes(c.try_into().unwrap())).unwrap_or_else(S::nan))
        .collect();
    EmbeddingMatrix::new(rows, dim, data)
}

/// Reads a matrix and, when present, its `.ids` sidecar.
pub fn read_emb1<S: Scalar>(path: &Path) -> Result<EmbeddingMatrix<S>, EmbedError> {
    let io = |source| EmbedError::Io {
        path: path.to_path_buf(),
        source,
    };
    let bytes = fs::read(path).map_err(io)?;
    let m = read_emb1_bytes(&bytes)?;
    let sidecar = ids_path(path);
    if sidecar.exists() {
        let text = fs::read_to_string(&sidecar).map_err(|source| EmbedError::Io { path: sidecar, source })?;
        let ids = text.lines().map(|l| l.strip_suffix('\r').unwrap_or(l).to_string()).collect();
        return m.with_ids(ids);
    }
    Ok(m)
}

/// Writes a matrix and, when it carries ids, the `.ids` sidecar.
pub fn write_emb1<S: Scalar>(m: &EmbeddingMatrix<S>, path: &Path) -> Result<(), EmbedError> {
    let bytes = write_emb1_bytes(m)?;
    fs::write(path, bytes).map_err(|source| EmbedError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    if let Some(ids) = m.ids() {
        if let Some(bad) = ids.iter().find(|id| id.contains(['\n', '\r'])) {
            return Err(EmbedError::Ids(format!("id {bad:?} contains a line break")));
        }
        let mut text = ids.join("\n");
        text.push('\n');
        let sidecar = ids_path(path);
        fs::write(&sidecar, text).map_err(|source| EmbedError::Io { path: sidecar, source })?;
    }
    Ok(())
}
