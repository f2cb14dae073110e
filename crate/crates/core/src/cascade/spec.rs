use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{AdapterKind, CascadeError, FilterSpec};

/// An adapter declared inside a pipeline file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AdapterDecl {
    pub kind: AdapterKind,
    pub uri: String,
}

/// One stage: feed field `input` of every record through `adapter`, store the result in `output`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StageSpec {
    pub adapter: String,
    #[serde(rename = "in")]
    pub input: String,
    #[serde(rename = "out")]
    pub output: String,
}

/// Pipeline configuration, read from JSON:
///
/// ```json
/// {
///   "adapters": {"mt": {"kind": "mt", "uri": "mock:upper"}},
///   "stages":   [{"adapter": "mt", "in": "text", "out": "mt_text"}],
///   "filters":  [{"kind": "min_length", "params": {"field": "mt_text", "min_chars": 3}}]
/// }
/// ```
///
/// The `adapters` table is optional; library callers may register adapters directly.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PipelineSpec {
    #[serde(default)]
    pub adapters: BTreeMap<String, AdapterDecl>,
    #[serde(default)]
    pub stages: Vec<StageSpec>,
    #[serde(default)]
    pub filters: Vec<FilterSpec>,
}

impl PipelineSpec {
    pub fn from_json(text: &str) -> Result<Self, CascadeError> {
        serde_json::from_str(text).map_err(|e| CascadeError::InvalidSpec(e.to_string()))
    }

    pub fn read(path: &Path) -> Result<Self, CascadeError> {
        let text = std::fs::read_to_string(path).map_err(|source| CascadeError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::from_json(&text)
    }

    /// Checks the field flow against the columns available in the source manifest.
    ///
    /// A stage may read a source column or the output of an earlier stage. Reading a field
    /// that only the stage itself or a later stage produces is a cycle. Filters see every
    /// field after the last stage.
    pub fn validate<'a>(&self, source_columns: impl IntoIterator<Item = &'a str>) -> Result<(), CascadeError> {
        let mut available: BTreeSet<&str> = source_columns.into_iter().collect();
        for (i, stage) in self.stages.iter().enumerate() {
            if matches!(stage.output.as_str(), "id" | "lang") {
                return Err(CascadeError::InvalidSpec(format!(
                    "stage {i} writes read-only field {:?}",
                    stage.output
                )));
            }
            if stage.output.is_empty() || stage.input.is_empty() {
                return Err(CascadeError::InvalidSpec(format!("stage {i} has an empty field name")));
            }
            if !available.contains(stage.input.as_str()) {
                if self.stages[i..].iter().any(|s| s.output == stage.input) {
                    return Err(CascadeError::CyclicDependency {
                        stage: i,
                        field: stage.input.clone(),
                    });
                }
                return Err(CascadeError::UnresolvedField {
                    field: stage.input.clone(),
                    user: format!("stage {i}"),
                });
            }
            available.insert(stage.output.as_str());
        }
        for (i, f) in self.filters.iter().enumerate() {
            f.validate()
                .map_err(|m| CascadeError::InvalidSpec(format!("filter {i} ({}): {m}", f.kind())))?;
            for field in f.fields() {
                if !available.contains(field) {
                    return Err(CascadeError::UnresolvedField {
                        field: field.to_string(),
                        user: format!("filter {i} ({})", f.kind()),
                    });
                }
            }
        }
        Ok(())
    }
}
