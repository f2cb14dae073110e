use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{Adapter, AdapterError, CascadeError, PipelineSpec};
use crate::corpus::{Manifest, Utterance, STANDARD_COLUMNS};

/// Adapters by the name stages refer to them with.
pub type AdapterRegistry = BTreeMap<String, Box<dyn Adapter>>;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StageReport {
    pub adapter: String,
    pub input_field: String,
    pub output_field: String,
    pub invocations: usize,
    pub errors: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FilterReport {
    pub kind: String,
    pub entering: usize,
    pub dropped: usize,
    /// Share of the records entering this filter that it dropped, in percent (0 when none entered).
    pub drop_pct: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DroppedRecord {
    pub id: String,
    /// `adapter_error` or `filter:<index>:<kind>`.
    pub reason: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

/// Bookkeeping for one run. `output + dropped_adapter_error + Σ filters[i].dropped == input`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CascadeReport {
    pub input: usize,
    pub output: usize,
    pub dropped_adapter_error: usize,
    pub stages: Vec<StageReport>,
    pub filters: Vec<FilterReport>,
    pub dropped: Vec<DroppedRecord>,
}

#[derive(Debug, Clone)]
pub struct CascadeOutput {
    pub manifest: Manifest,
    pub report: CascadeReport,
}

/// Runs the stages of `spec` over `src`, then its filters, preserving input order.
///
/// A record whose input field is missing, or whose adapter call fails, is dropped with
/// reason `adapter_error` and takes no part in later stages.
pub fn run_cascade(src: &Manifest, spec: &PipelineSpec, adapters: &AdapterRegistry) -> Result<CascadeOutput, CascadeError> {
    let columns: Vec<&str> = STANDARD_COLUMNS
        .iter()
        .copied()
        .chain(src.extra_columns().iter().map(String::as_str))
        .collect();
    spec.validate(columns)?;
    for stage in &spec.stages {
        if !adapters.contains_key(&stage.adapter) {
            return Err(CascadeError::UnknownAdapter(stage.adapter.clone()));
        }
    }

    let mut records: Vec<Utterance> = src.records().to_vec();
    let mut alive = vec![true; records.len()];
    let mut dropped = Vec::new();
    let mut stage_reports = Vec::with_capacity(spec.stages.len());

    for stage in &spec.stages {
        let adapter = &adapters[&stage.adapter];
        let mut pending = Vec::new();
        let mut inputs = Vec::new();
        let mut errors = 0;
        for (i, rec) in records.iter().enumerate() {
            if !alive[i] {
                continue;
            }
            match rec.field(&stage.input) {
                Some(v) => {
                    pending.push(i);
                    inputs.push(v);
                }
                None => {
                    alive[i] = false;
                    errors += 1;
                    dropped.push(DroppedRecord {
                        id: rec.id.clone(),
                        reason: "adapter_error".into(),
                        detail: Some(AdapterError::MissingInput(stage.input.clone()).to_string()),
                    });
                }
            }
        }
        let mut results = adapter.invoke_batch(&inputs);
        if results.len() != inputs.len() {
            let err = AdapterError::Misaligned {
                expected: inputs.len(),
                got: results.len(),
            };
            results = vec![Err(err); inputs.len()];
        }
        for (i, r) in pending.iter().copied().zip(results) {
            let outcome = r.map_err(|e| e.to_string()).and_then(|value| {
                records[i].set_field(&stage.output, value).map_err(|e| e.to_string())
            });
            if let Err(detail) = outcome {
                alive[i] = false;
                errors += 1;
                dropped.push(DroppedRecord {
                    id: records[i].id.clone(),
                    reason: "adapter_error".into(),
                    detail: Some(detail),
                });
            }
        }
        log::debug!(
            "stage {} ({} -> {}): {} calls, {} errors",
            stage.adapter,
            stage.input,
            stage.output,
            inputs.len(),
            errors
        );
        stage_reports.push(StageReport {
            adapter: stage.adapter.clone(),
            input_field: stage.input.clone(),
            output_field: stage.output.clone(),
            invocations: inputs.len(),
            errors,
        });
    }
    let dropped_adapter_error = dropped.len();

    let mut filter_reports = Vec::with_capacity(spec.filters.len());
    for (fi, filter) in spec.filters.iter().enumerate() {
        let mut entering = 0;
        let mut n_dropped = 0;
        for (i, rec) in records.iter().enumerate() {
            if !alive[i] {
                continue;
            }
            entering += 1;
            if !filter.keep(|name| rec.field(name)) {
                alive[i] = false;
                n_dropped += 1;
                dropped.push(DroppedRecord {
                    id: rec.id.clone(),
                    reason: format!("filter:{fi}:{}", filter.kind()),
                    detail: None,
                });
            }
        }
        filter_reports.push(FilterReport {
            kind: filter.kind().to_string(),
            entering,
            dropped: n_dropped,
            drop_pct: if entering == 0 {
                0.0
            } else {
                100.0 * n_dropped as f64 / entering as f64
            },
        });
    }

    let mut out = Manifest::new();
    for (k, v) in src.meta() {
        out.set_meta(k.clone(), v.clone());
    }
    for c in src.extra_columns() {
        out.declare_column(c.clone());
    }
    for stage in &spec.stages {
        out.declare_column(stage.output.clone());
    }
    for (rec, keep) in records.into_iter().zip(alive) {
        if keep {
            out.push(rec)?;
        }
    }

    let report = CascadeReport {
        input: src.len(),
        output: out.len(),
        dropped_adapter_error,
        stages: stage_reports,
        filters: filter_reports,
        dropped,
    };
    Ok(CascadeOutput { manifest: out, report })
}
