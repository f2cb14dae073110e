use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};

use super::CorpusError;

/// Column names of the standard manifest fields, in TSV header order.
pub const STANDARD_COLUMNS: [&str; 7] = ["id", "lang", "audio", "duration_s", "speaker", "text", "units"];

/// One corpus record.
///
/// `extra` holds any columns beyond the standard ones; readers preserve them and writers emit
/// them after the standard columns.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct Utterance {
    pub id: String,
    pub lang: String,
    pub audio_ref: Option<String>,
    pub duration_s: Option<f64>,
    pub speaker: Option<String>,
    pub text: Option<String>,
    /// Unit ids. The vocabulary size is not part of the manifest; see
    /// [`UnitSequence`](crate::quantize::UnitSequence) for validated sequences.
    pub units: Option<Vec<u32>>,
    pub extra: BTreeMap<String, String>,
}

impl Utterance {
    pub fn new(id: impl Into<String>, lang: impl Into<String>) -> Self {
        Self {
            id: id.into(),
            lang: lang.into(),
            ..Default::default()
        }
    }

    pub fn validate(&self) -> Result<(), CorpusError> {
        if self.id.is_empty() {
            return Err(CorpusError::InvalidRecord("empty id".into()));
        }
        if let Some(d) = self.duration_s {
            if !d.is_finite() || d < 0.0 {
                return Err(CorpusError::InvalidRecord(format!(
                    "{}: duration_s must be finite and >= 0, got {d}",
                    self.id
                )));
            }
        }
        Ok(())
    }

    /// Reads a field by column name, rendered as a string.
    pub fn field(&self, name: &str) -> Option<String> {
        match name {
            "id" => Some(self.id.clone()),
            "lang" => Some(self.lang.clone()),
            "audio" => self.audio_ref.clone(),
            "duration_s" => self.duration_s.map(|d| d.to_string()),
            "speaker" => self.speaker.clone(),
            "text" => self.text.clone(),
            "units" => self.units.as_ref().map(|u| format_units(u)),
            other => self.extra.get(other).cloned(),
        }
    }

    /// Writes a field by column name, parsing typed columns.
    pub fn set_field(&mut self, name: &str, value: String) -> Result<(), CorpusError> {
        match name {
            "id" | "lang" => {
                return Err(CorpusError::InvalidRecord(format!("field {name:?} is read-only")));
            }
            "audio" => self.audio_ref = Some(value),
            "duration_s" => {
                let d: f64 = value
                    .trim()
                    .parse()
                    .map_err(|_| CorpusError::InvalidRecord(format!("unparsable duration {value:?}")))?;
                self.duration_s = Some(d);
                self.validate()?;
            }
            "speaker" => self.speaker = Some(value),
            "text" => self.text = Some(value),
            "units" => {
                let units = super::parse_units(&value)
                    .map_err(|msg| CorpusError::InvalidRecord(format!("{}: {msg}", self.id)))?;
                self.units = Some(units);
            }
            other => {
                self.extra.insert(other.to_string(), value);
            }
        }
        Ok(())
    }
}

pub(crate) fn format_units(units: &[u32]) -> String {
    let mut out = String::with_capacity(units.len() * 4);
    for (i, u) in units.iter().enumerate() {
        if i > 0 {
            out.push(' ');
        }
        out.push_str(&u.to_string());
    }
    out
}

/// A time span inside one audio file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Segment {
    pub audio_id: String,
    pub start_s: f64,
    pub end_s: f64,
}

impl Segment {
    pub fn new(audio_id: impl Into<String>, start_s: f64, end_s: f64) -> Result<Self, CorpusError> {
        let seg = Self {
            audio_id: audio_id.into(),
            start_s,
            end_s,
        };
        seg.validate()?;
        Ok(seg)
    }

    pub fn validate(&self) -> Result<(), CorpusError> {
        if !(self.start_s.is_finite() && self.end_s.is_finite()) || self.start_s < 0.0 || self.start_s >= self.end_s {
            return Err(CorpusError::InvalidSegment(format!(
                "{}: [{}, {}] must satisfy 0 <= start < end",
                self.audio_id, self.start_s, self.end_s
            )));
        }
        Ok(())
    }

    pub fn duration(&self) -> f64 {
        self.end_s - self.start_s
    }

    /// Length of the intersection with `other`, ignoring `audio_id`.
    pub fn intersection(&self, other: &Segment) -> f64 {
        (self.end_s.min(other.end_s) - self.start_s.max(other.start_s)).max(0.0)
    }
}

/// Ordered collection of utterances with unique ids.
#[derive(Debug, Clone, Default)]
pub struct Manifest {
    records: Vec<Utterance>,
    meta: BTreeMap<String, String>,
    columns: Vec<String>,
    index: HashMap<String, usize>,
}

impl PartialEq for Manifest {
    fn eq(&self, other: &Self) -> bool {
        self.records == other.records && self.meta == other.meta
    }
}

impl Manifest {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_records(records: impl IntoIterator<Item = Utterance>) -> Result<Self, CorpusError> {
        let mut m = Self::new();
        for r in records {
            m.push(r)?;
        }
        Ok(m)
    }

    /// Appends a record. Fails on a duplicate id (the error carries line 0; readers fill in
    /// the real line number).
    pub fn push(&mut self, utt: Utterance) -> Result<(), CorpusError> {
        utt.validate()?;
        if self.index.contains_key(&utt.id) {
            return Err(CorpusError::DuplicateId { id: utt.id, line: 0 });
        }
        for key in utt.extra.keys() {
            if !self.columns.iter().any(|c| c == key) {
                self.columns.push(key.clone());
            }
        }
        self.index.insert(utt.id.clone(), self.records.len());
        self.records.push(utt);
        Ok(())
    }

    pub fn records(&self) -> &[Utterance] {
        &self.records
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn get(&self, id: &str) -> Option<&Utterance> {
        self.index.get(id).map(|&i| &self.records[i])
    }

    pub fn meta(&self) -> &BTreeMap<String, String> {
        &self.meta
    }

    pub fn set_meta(&mut self, key: impl Into<String>, value: impl Into<String>) {
        self.meta.insert(key.into(), value.into());
    }

    /// Non-standard column names, in first-seen order.
    pub fn extra_columns(&self) -> &[String] {
        &self.columns
    }

    /// Declares an extra column so that it is written even when no record carries it.
    pub fn declare_column(&mut self, name: impl Into<String>) {
        let name = name.into();
        if !STANDARD_COLUMNS.contains(&name.as_str()) && !self.columns.contains(&name) {
            self.columns.push(name);
        }
    }

    pub fn into_records(self) -> Vec<Utterance> {
        self.records
    }
}
