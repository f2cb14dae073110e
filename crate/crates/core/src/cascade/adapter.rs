use std::collections::BTreeMap;
use std::fmt;
use std::io::{Read, Write};
use std::path::Path;
use std::process::{Command, Stdio};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::CascadeError;

/// Model family an adapter stands in for.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AdapterKind {
    Asr,
    Mt,
    T2u,
    T2ut,
    S2t,
    Vocoder,
}

impl AdapterKind {
    pub const ALL: [AdapterKind; 6] = [Self::Asr, Self::Mt, Self::T2u, Self::T2ut, Self::S2t, Self::Vocoder];

    pub fn as_str(self) -> &'static str {
        match self {
            Self::Asr => "asr",
            Self::Mt => "mt",
            Self::T2u => "t2u",
            Self::T2ut => "t2ut",
            Self::S2t => "s2t",
            Self::Vocoder => "vocoder",
        }
    }
}

impl fmt::Display for AdapterKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for AdapterKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::ALL
            .into_iter()
            .find(|k| k.as_str() == s)
            .ok_or_else(|| format!("unknown adapter kind {s:?}"))
    }
}

/// Failure of one adapter invocation. Cloneable so batch failures can be fanned out per input.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum AdapterError {
    #[error("adapter rejected input {input:?}: {msg}")]
    Rejected { input: String, msg: String },
    #[error("no entry for input {0:?}")]
    NotFound(String),
    #[error("command failed: {0}")]
    Exec(String),
    #[error("command returned {got} output lines for {expected} inputs")]
    Misaligned { expected: usize, got: usize },
    #[error("missing input field {0:?}")]
    MissingInput(String),
}

/// A model invocation target. Implementations must be deterministic per input.
pub trait Adapter: Send + Sync {
    fn kind(&self) -> AdapterKind;
    fn name(&self) -> &str;
    /// Opaque descriptor of what is invoked (the URI). Part of the cache key.
    fn endpoint(&self) -> &str;
    /// Maps each input to an output, one result per input, in order.
    fn invoke_batch(&self, inputs: &[String]) -> Vec<Result<String, AdapterError>>;

    fn invoke(&self, input: &str) -> Result<String, AdapterError> {
        self.invoke_batch(&[input.to_string()]).pop().unwrap_or(Err(AdapterError::Misaligned {
            expected: 1,
            got: 0,
        }))
    }
}

/// In-process behaviours reachable through `mock:` URIs.
#[derive(Debug, Clone, PartialEq)]
pub enum MockBehavior {
    Identity,
    Upper,
    Lower,
    /// Each character becomes the unit `code point % 1000`; units are space separated.
    Units,
    Empty,
    Fail,
    FailOn(String),
    Table(BTreeMap<String, String>),
}

impl MockBehavior {
    fn apply(&self, input: &str) -> Result<String, AdapterError> {
        match self {
            Self::Identity => Ok(input.to_string()),
            Self::Upper => Ok(input.to_uppercase()),
            Self::Lower => Ok(input.to_lowercase()),
            Self::Units => Ok(input
                .chars()
                .map(|c| (u32::from(c) % 1000).to_string())
                .collect::<Vec<_>>()
                .join(" ")),
            Self::Empty => Ok(String::new()),
            Self::Fail => Err(AdapterError::Rejected {
                input: input.to_string(),
                msg: "mock failure".into(),
            }),
            Self::FailOn(bad) if input == bad => Err(AdapterError::Rejected {
                input: input.to_string(),
                msg: "mock failure".into(),
            }),
            Self::FailOn(_) => Ok(input.to_string()),
            Self::Table(t) => t.get(input).cloned().ok_or_else(|| AdapterError::NotFound(input.to_string())),
        }
    }
}

/// Parses a `key<TAB>value` table. Blank lines and lines starting with `#` are skipped.
pub(crate) fn parse_table(text: &str) -> Result<BTreeMap<String, String>, String> {
    let mut table = BTreeMap::new();
    for (i, line) in text.lines().enumerate() {
        if line.trim().is_empty() || line.starts_with('#') {
            continue;
        }
        let (k, v) = line
            .split_once('\t')
            .ok_or_else(|| format!("line {}: expected key<TAB>value", i + 1))?;
        if table.insert(k.to_string(), v.to_string()).is_some() {
            return Err(format!("line {}: duplicate key {k:?}", i + 1));
        }
    }
    Ok(table)
}

#[derive(Debug, Clone)]
pub struct MockAdapter {
    kind: AdapterKind,
    name: String,
    endpoint: String,
    behavior: MockBehavior,
}

impl MockAdapter {
    pub fn new(kind: AdapterKind, name: impl Into<String>, behavior: MockBehavior) -> Self {
        let endpoint = match &behavior {
            MockBehavior::Identity => "mock:identity".to_string(),
            MockBehavior::Upper => "mock:upper".into(),
            MockBehavior::Lower => "mock:lower".into(),
            MockBehavior::Units => "mock:units".into(),
            MockBehavior::Empty => "mock:empty".into(),
            MockBehavior::Fail => "mock:fail".into(),
            MockBehavior::FailOn(s) => format!("mock:fail-on:{s}"),
            MockBehavior::Table(t) => format!("mock:table#{}", t.len()),
        };
        Self {
            kind,
            name: name.into(),
            endpoint,
            behavior,
        }
    }

    pub fn behavior(&self) -> &MockBehavior {
        &self.behavior
    }
}

impl Adapter for MockAdapter {
    fn kind(&self) -> AdapterKind {
        self.kind
    }

    fn name(&self) -> &str {
        &self.name
    }

    fn endpoint(&self) -> &str {
        &self.endpoint
    }

    fn invoke_batch(&self, inputs: &[String]) -> Vec<Result<String, AdapterError>> {
        inputs.iter().map(|s| self.behavior.apply(s)).collect()
    }
}

/// Runs `sh -c <command>` once per batch: inputs on stdin one per line, outputs read back
/// line-aligned from stdout.
#[derive(Debug, Clone)]
pub struct ExecAdapter {
    kind: AdapterKind,
    name: String,
    endpoint: String,
    command: String,
}

impl ExecAdapter {
    pub fn new(kind: AdapterKind, name: impl Into<String>, command: impl Into<String>) -> Self {
        let command = command.into();
        Self {
            kind,
            name: name.into(),
            endpoint: format!("exec:{command}"),
            command,
        }
    }

    fn run(&self, stdin_text: String) -> Result<String, AdapterError> {
        let mut child = Command::new("sh")
            .arg("-c")
            .arg(&self.command)
            .stdin(Stdio::piped())
            .stdout(Stdio::piped())
            .stderr(Stdio::piped())
            .spawn()
            .map_err(|e| AdapterError::Exec(format!("spawn {:?}: {e}", self.command)))?;
        let mut stdin = child.stdin.take().expect("piped stdin");
        // Feed stdin from a separate thread so a chatty child cannot deadlock on a full pipe.
        let writer = std::thread::spawn(move || stdin.write_all(stdin_text.as_bytes()));
        let mut stdout = String::new();
        let read = child.stdout.take().expect("piped stdout").read_to_string(&mut stdout);
        let mut stderr = String::new();
        if let Some(mut e) = child.stderr.take() {
            let _ = e.read_to_string(&mut stderr);
        }
        let status = child.wait().map_err(|e| AdapterError::Exec(e.to_string()))?;
        let write_res = writer.join().map_err(|_| AdapterError::Exec("stdin writer panicked".into()))?;
        if !status.success() {
            return Err(AdapterError::Exec(format!("{:?} exited with {status}: {}", self.command, stderr.trim())));
        }
        read.map_err(|e| AdapterError::Exec(format!("reading stdout: {e}")))?;
        // A child that exits without consuming stdin is fine once it succeeded.
        if let Err(e) = write_res {
            if e.kind() != std::io::ErrorKind::BrokenPipe {
                return Err(AdapterError::Exec(format!("writing stdin: {e}")));
            }
        }
        Ok(stdout)
    }
}

impl Adapter for ExecAdapter {
    fn kind(&self) -> AdapterKind {
        self.kind
    }

    fn name(&self) -> &str {
        &self.name
    }

    fn endpoint(&self) -> &str {
        &self.endpoint
    }

    fn invoke_batch(&self, inputs: &[String]) -> Vec<Result<String, AdapterError>> {
        if inputs.is_empty() {
            return Vec::new();
        }
        // Inputs with embedded newlines would break line alignment; they fail individually.
        let sendable: Vec<usize> = (0..inputs.len())
            .filter(|&i| !inputs[i].contains(['\n', '\r']))
            .collect();
        let mut out: Vec<Result<String, AdapterError>> = inputs
            .iter()
            .map(|s| {
                Err(AdapterError::Rejected {
                    input: s.clone(),
                    msg: "input contains a line break".into(),
                })
            })
            .collect();
        if sendable.is_empty() {
            return out;
        }
        let mut payload = String::new();
        for &i in &sendable {
            payload.push_str(&inputs[i]);
            payload.push('\n');
        }
        match self.run(payload) {
            Ok(stdout) => {
                let lines: Vec<&str> = stdout.lines().collect();
                if lines.len() != sendable.len() {
                    let err = AdapterError::Misaligned {
                        expected: sendable.len(),
                        got: lines.len(),
                    };
                    for &i in &sendable {
                        out[i] = Err(err.clone());
                    }
                } else {
                    for (&i, line) in sendable.iter().zip(lines) {
                        out[i] = Ok(line.to_string());
                    }
                }
            }
            Err(e) => {
                for &i in &sendable {
                    out[i] = Err(e.clone());
                }
            }
        }
        out
    }
}

/// Builds an adapter from a URI.
///
/// Recognised forms: `mock:identity`, `mock:upper`, `mock:lower`, `mock:units`, `mock:empty`,
/// `mock:fail`, `mock:fail-on:<input>`, `mock:table:<path>` (or just `mock:<path>`) and
/// `exec:<shell command>`. Relative table paths are resolved against `base_dir` when given.
pub fn resolve_adapter(
    name: &str,
    kind: AdapterKind,
    uri: &str,
    base_dir: Option<&Path>,
) -> Result<Box<dyn Adapter>, CascadeError> {
    let bad = |msg: &str| CascadeError::BadUri {
        uri: uri.to_string(),
        msg: msg.to_string(),
    };
    if let Some(cmd) = uri.strip_prefix("exec:") {
        if cmd.trim().is_empty() {
            return Err(bad("empty command"));
        }
        return Ok(Box::new(ExecAdapter::new(kind, name, cmd)));
    }
    let rest = uri.strip_prefix("mock:").ok_or_else(|| bad("expected a mock: or exec: scheme"))?;
    let behavior = match rest {
        "identity" => MockBehavior::Identity,
        "upper" => MockBehavior::Upper,
        "lower" => MockBehavior::Lower,
        "units" => MockBehavior::Units,
        "empty" => MockBehavior::Empty,
        "fail" => MockBehavior::Fail,
        _ => {
            if let Some(s) = rest.strip_prefix("fail-on:") {
                MockBehavior::FailOn(s.to_string())
            } else {
                let p = rest.strip_prefix("table:").unwrap_or(rest);
                if p.is_empty() {
                    return Err(bad("empty table path"));
                }
                let path = match base_dir {
                    Some(base) if Path::new(p).is_relative() => base.join(p),
                    _ => Path::new(p).to_path_buf(),
                };
                let text = std::fs::read_to_string(&path).map_err(|source| CascadeError::Io {
                    path: path.clone(),
                    source,
                })?;
                MockBehavior::Table(parse_table(&text).map_err(|m| bad(&m))?)
            }
        }
    };
    let mut adapter = MockAdapter::new(kind, name, behavior);
    adapter.endpoint = uri.to_string();
    Ok(Box::new(adapter))
}
