//! TSV and JSONL manifest readers and writers.
//!
//! TSV: optional `#key=value` metadata lines, then a header naming the columns, then one
//! record per line. Fields are raw (no quoting); tabs and newlines inside fields are
//! rejected on write. Absent optional fields are empty strings.
//!
//! JSONL: an optional first line `{"__meta__": {...}}`, then one object per record using
//! the same field names as the TSV header. Absent optional fields are missing keys, so
//! JSONL can distinguish an empty text from no text; TSV cannot.

use std::fs;
use std::path::Path;
use std::str::FromStr;

use serde_json::{Map, Value};

use super::types::format_units;
use super::{CorpusError, Manifest, Utterance, STANDARD_COLUMNS};

const META_KEY: &str = "__meta__";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ManifestFormat {
    Tsv,
    Jsonl,
}

impl ManifestFormat {
    /// Guesses the format from a file extension; anything but `.jsonl`/`.json` is TSV.
    pub fn from_path(path: &Path) -> Self {
        match path.extension().and_then(|e| e.to_str()) {
            Some("jsonl") | Some("json") => Self::Jsonl,
            _ => Self::Tsv,
        }
    }
}

impl FromStr for ManifestFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "tsv" => Ok(Self::Tsv),
            "jsonl" => Ok(Self::Jsonl),
            other => Err(format!("unknown manifest format {other:?} (expected tsv or jsonl)")),
        }
    }
}

/// Space-separated decimal unit ids.
pub fn parse_units(s: &str) -> Result<Vec<u32>, String> {
    s.split_ascii_whitespace()
        .map(|t| t.parse::<u32>().map_err(|_| format!("bad unit id {t:?}")))
        .collect()
}

pub fn read_manifest(path: &Path, format: ManifestFormat) -> Result<Manifest, CorpusError> {
    let text = fs::read_to_string(path).map_err(|source| CorpusError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    read_manifest_str(&text, format)
}

pub fn read_manifest_str(text: &str, format: ManifestFormat) -> Result<Manifest, CorpusError> {
    match format {
        ManifestFormat::Tsv => read_tsv(text),
        ManifestFormat::Jsonl => read_jsonl(text),
    }
}

pub fn write_manifest(m: &Manifest, path: &Path, format: ManifestFormat) -> Result<(), CorpusError> {
    let text = write_manifest_string(m, format)?;
    fs::write(path, text).map_err(|source| CorpusError::Io {
        path: path.to_path_buf(),
        source,
    })
}

pub fn write_manifest_string(m: &Manifest, format: ManifestFormat) -> Result<String, CorpusError> {
    match format {
        ManifestFormat::Tsv => write_tsv(m),
        ManifestFormat::Jsonl => Ok(write_jsonl(m)),
    }
}

fn push_with_line(m: &mut Manifest, utt: Utterance, line: usize) -> Result<(), CorpusError> {
    m.push(utt).map_err(|e| match e {
        CorpusError::DuplicateId { id, .. } => CorpusError::DuplicateId { id, line },
        CorpusError::InvalidRecord(msg) => CorpusError::Parse { line, msg },
        other => other,
    })
}

fn read_tsv(text: &str) -> Result<Manifest, CorpusError> {
    let mut m = Manifest::new();
    let mut header: Option<Vec<&str>> = None;
    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = raw.strip_suffix('\r').unwrap_or(raw);
        let Some(cols) = header.as_ref() else {
            if let Some(meta) = line.strip_prefix('#') {
                let (k, v) = meta.split_once('=').ok_or_else(|| CorpusError::Parse {
                    line: line_no,
                    msg: "metadata line must be #key=value".into(),
                })?;
                m.set_meta(k, v);
                continue;
            }
            let cols: Vec<&str> = line.split('\t').collect();
            for required in ["id", "lang"] {
                if !cols.contains(&required) {
                    return Err(CorpusError::Parse {
                        line: line_no,
                        msg: format!("header lacks required column {required:?}"),
                    });
                }
            }
            for (j, c) in cols.iter().enumerate() {
                if c.is_empty() || cols[..j].contains(c) {
                    return Err(CorpusError::Parse {
                        line: line_no,
                        msg: format!("empty or repeated column name {c:?}"),
                    });
                }
                m.declare_column(*c);
            }
            header = Some(cols);
            continue;
        };
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split('\t').collect();
        if fields.len() != cols.len() {
            return Err(CorpusError::Parse {
                line: line_no,
                msg: format!("expected {} columns, found {}", cols.len(), fields.len()),
            });
        }
        let mut utt = Utterance::default();
        for (&name, &value) in cols.iter().zip(&fields) {
            let opt = (!value.is_empty()).then(|| value.to_string());
            match name {
                "id" => utt.id = value.to_string(),
                "lang" => utt.lang = value.to_string(),
                "audio" => utt.audio_ref = opt,
                "speaker" => utt.speaker = opt,
                "text" => utt.text = opt,
                "duration_s" => {
                    utt.duration_s = match opt {
                        None => None,
                        Some(v) => Some(v.parse::<f64>().map_err(|_| CorpusError::Parse {
                            line: line_no,
                            msg: format!("unparsable duration {v:?}"),
                        })?),
                    }
                }
                "units" => {
                    utt.units = match opt {
                        None => None,
                        Some(v) => Some(parse_units(&v).map_err(|msg| CorpusError::Parse { line: line_no, msg })?),
                    }
                }
                other => {
                    if let Some(v) = opt {
                        utt.extra.insert(other.to_string(), v);
                    }
                }
            }
        }
        push_with_line(&mut m, utt, line_no)?;
    }
    if header.is_none() {
        return Err(CorpusError::Parse {
            line: 1,
            msg: "missing header row".into(),
        });
    }
    Ok(m)
}

fn check_tsv_field(field: &str, value: &str) -> Result<(), CorpusError> {
    if value.contains(['\t', '\n', '\r']) {
        return Err(CorpusError::Unwritable {
            field: field.to_string(),
            reason: "contains a tab or line break".into(),
        });
    }
    Ok(())
}

fn write_tsv(m: &Manifest) -> Result<String, CorpusError> {
    let mut out = String::new();
    for (k, v) in m.meta() {
        if k.contains(['=', '\n', '\r']) || v.contains(['\n', '\r']) {
            return Err(CorpusError::Unwritable {
                field: format!("meta {k}"),
                reason: "metadata keys cannot contain '=' or line breaks".into(),
            });
        }
        out.push_str(&format!("#{k}={v}\n"));
    }
    let columns: Vec<&str> = STANDARD_COLUMNS
        .iter()
        .copied()
        .chain(m.extra_columns().iter().map(String::as_str))
        .collect();
    out.push_str(&columns.join("\t"));
    out.push('\n');
    for r in m.records() {
        for (j, col) in columns.iter().enumerate() {
            let value = r.field(col).unwrap_or_default();
            check_tsv_field(col, &value)?;
            if j > 0 {
                out.push('\t');
            }
            out.push_str(&value);
        }
        out.push('\n');
    }
    Ok(out)
}

fn read_jsonl(text: &str) -> Result<Manifest, CorpusError> {
    let mut m = Manifest::new();
    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        if raw.trim().is_empty() {
            continue;
        }
        let perr = |msg: String| CorpusError::Parse { line: line_no, msg };
        let value: Value = serde_json::from_str(raw).map_err(|e| perr(e.to_string()))?;
        let Value::Object(obj) = value else {
            return Err(perr("expected a json object".into()));
        };
        if let Some(meta) = obj.get(META_KEY) {
            if !m.is_empty() || obj.len() != 1 {
                return Err(perr("metadata object must be the first line and stand alone".into()));
            }
            let Value::Object(meta) = meta else {
                return Err(perr("metadata must be an object".into()));
            };
            for (k, v) in meta {
                m.set_meta(k.clone(), value_to_string(v));
            }
            continue;
        }
        let utt = utterance_from_json(obj).map_err(perr)?;
        push_with_line(&mut m, utt, line_no)?;
    }
    Ok(m)
}

fn value_to_string(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

fn utterance_from_json(obj: Map<String, Value>) -> Result<Utterance, String> {
    let mut utt = Utterance::default();
    let string = |key: &str, v: &Value| -> Result<String, String> {
        v.as_str().map(str::to_string).ok_or_else(|| format!("{key} must be a string"))
    };
    for (key, v) in obj {
        if v.is_null() {
            continue;
        }
        match key.as_str() {
            "id" => utt.id = string("id", &v)?,
            "lang" => utt.lang = string("lang", &v)?,
            "audio" => utt.audio_ref = Some(string("audio", &v)?),
            "speaker" => utt.speaker = Some(string("speaker", &v)?),
            "text" => utt.text = Some(string("text", &v)?),
            "duration_s" => {
                let d = match &v {
                    Value::Number(n) => n.as_f64(),
                    Value::String(s) => s.parse::<f64>().ok(),
                    _ => None,
                };
                utt.duration_s = Some(d.ok_or_else(|| format!("unparsable duration {v}"))?);
            }
            "units" => {
                let units = match &v {
                    Value::String(s) => parse_units(s)?,
                    Value::Array(items) => items
                        .iter()
                        .map(|x| {
                            x.as_u64()
                                .and_then(|u| u32::try_from(u).ok())
                                .ok_or_else(|| format!("bad unit id {x}"))
                        })
                        .collect::<Result<_, _>>()?,
                    _ => return Err("units must be an array or a string".into()),
                };
                utt.units = Some(units);
            }
            _ => {
                utt.extra.insert(key, value_to_string(&v));
            }
        }
    }
    if utt.id.is_empty() {
        return Err("missing id".into());
    }
    Ok(utt)
}

fn write_jsonl(m: &Manifest) -> String {
    let mut out = String::new();
    if !m.meta().is_empty() {
        let meta: Map<String, Value> = m.meta().iter().map(|(k, v)| (k.clone(), Value::String(v.clone()))).collect();
        let mut wrapper = Map::new();
        wrapper.insert(META_KEY.into(), Value::Object(meta));
        out.push_str(&Value::Object(wrapper).to_string());
        out.push('\n');
    }
    for r in m.records() {
        let mut obj = Map::new();
        obj.insert("id".into(), r.id.clone().into());
        obj.insert("lang".into(), r.lang.clone().into());
        if let Some(a) = &r.audio_ref {
            obj.insert("audio".into(), a.clone().into());
        }
        if let Some(d) = r.duration_s {
            obj.insert("duration_s".into(), d.into());
        }
        if let Some(s) = &r.speaker {
            obj.insert("speaker".into(), s.clone().into());
        }
        if let Some(t) = &r.text {
            obj.insert("text".into(), t.clone().into());
        }
        if let Some(u) = &r.units {
            obj.insert("units".into(), format_units(u).into());
        }
        for (k, v) in &r.extra {
            obj.insert(k.clone(), v.clone().into());
        }
        out.push_str(&Value::Object(obj).to_string());
        out.push('\n');
    }
    out
}
