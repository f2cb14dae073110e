//! Small text formats shared by several subcommands.

use std::path::Path;

use anyhow::{bail, Context, Result};
use serde::Serialize;

pub fn read_text(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

pub fn write_text(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

pub fn write_json(path: &Path, value: &impl Serialize) -> Result<()> {
    write_text(path, &to_json(value)?)
}

pub fn to_json(value: &impl Serialize) -> Result<String> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    Ok(s)
}

/// Non-empty, non-comment lines of a tab-separated file, split into exactly `cols` fields.
fn table(path: &Path, cols: usize) -> Result<Vec<(usize, Vec<String>)>> {
    let text = read_text(path)?;
    let mut rows = Vec::new();
    for (i, line) in text.lines().enumerate() {
        if line.trim().is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<String> = line.split('\t').map(str::to_string).collect();
        if fields.len() != cols {
            bail!("{}:{}: expected {cols} tab-separated fields, found {}", path.display(), i + 1, fields.len());
        }
        rows.push((i + 1, fields));
    }
    Ok(rows)
}

/// `id<TAB>frame_count` lines.
pub fn read_lengths(path: &Path) -> Result<Vec<(String, usize)>> {
    table(path, 2)?
        .into_iter()
        .map(|(line, f)| {
            let n = f[1]
                .trim()
                .parse()
                .with_context(|| format!("{}:{line}: bad frame count {:?}", path.display(), f[1]))?;
            Ok((f[0].clone(), n))
        })
        .collect()
}

/// `key<TAB>value` lines.
pub fn read_pairs_table(path: &Path) -> Result<Vec<(String, String)>> {
    Ok(table(path, 2)?.into_iter().map(|(_, mut f)| (f.remove(0), f.remove(0))).collect())
}

/// `id<TAB>space-separated units` lines.
pub fn read_units(path: &Path) -> Result<Vec<(String, Vec<u32>)>> {
    table(path, 2)?
        .into_iter()
        .map(|(line, f)| {
            let units = unitforge::corpus::parse_units(&f[1]).map_err(|m| anyhow::anyhow!("{}:{line}: {m}", path.display()))?;
            Ok((f[0].clone(), units))
        })
        .collect()
}

pub fn format_units(rows: &[(String, Vec<u32>)]) -> String {
    let mut out = String::new();
    for (id, units) in rows {
        out.push_str(id);
        out.push('\t');
        let strs: Vec<String> = units.iter().map(u32::to_string).collect();
        out.push_str(&strs.join(" "));
        out.push('\n');
    }
    out
}

/// One segment per line.
pub fn read_lines(path: &Path) -> Result<Vec<String>> {
    Ok(read_text(path)?.lines().map(str::to_string).collect())
}
