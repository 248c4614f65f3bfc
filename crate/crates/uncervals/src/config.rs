//! Layered run configuration and run manifests.
//!
//! A resolved configuration starts from built-in defaults, is overlaid with
//! an optional JSON or TOML file, and then with command-line flags. Objects
//! merge key by key; an object whose tag (`type`, `model` or `method`)
//! differs from the one below it replaces it wholesale.

use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::error::{CliError, Result};
use crate::io::{read_config_file, write_json};

const TAG_KEYS: [&str; 3] = ["type", "model", "method"];

fn tag_of(v: &Map<String, Value>) -> Option<(&'static str, &Value)> {
    TAG_KEYS.iter().find_map(|k| v.get(*k).map(|t| (*k, t)))
}

/// Deep merge of `overlay` into `base`; tags are compared below the root only.
pub fn merge(base: &mut Value, overlay: &Value) {
    match (base, overlay) {
        (Value::Object(b), Value::Object(o)) => merge_entries(b, o),
        (b, o) => *b = o.clone(),
    }
}

fn merge_entries(b: &mut Map<String, Value>, o: &Map<String, Value>) {
    for (k, v) in o {
        match b.get_mut(k) {
            Some(slot) => merge_nested(slot, v),
            None => {
                b.insert(k.clone(), v.clone());
            }
        }
    }
}

fn merge_nested(base: &mut Value, overlay: &Value) {
    match (base, overlay) {
        (Value::Object(b), Value::Object(o)) => {
            let replaces = match (tag_of(b), tag_of(o)) {
                (Some((kb, tb)), Some((ko, to))) => kb == ko && tb != to,
                _ => false,
            };
            if replaces {
                *b = o.clone();
            } else {
                merge_entries(b, o);
            }
        }
        (b, o) => *b = o.clone(),
    }
}

/// Flags collected as a nested object from dotted keys.
#[derive(Debug, Default, Clone)]
pub struct Overrides(Value);

impl Overrides {
    pub fn new() -> Self {
        Overrides(Value::Object(Map::new()))
    }

    pub fn set<T: Serialize>(&mut self, dotted: &str, value: Option<T>) -> &mut Self {
        if let Some(v) = value {
            let v = serde_json::to_value(v).expect("flag value serialises");
            let mut node = &mut self.0;
            let mut parts = dotted.split('.').peekable();
            while let Some(part) = parts.next() {
                let map = node.as_object_mut().expect("override nodes are objects");
                if parts.peek().is_none() {
                    map.insert(part.to_string(), v);
                    break;
                }
                node = map.entry(part.to_string()).or_insert_with(|| Value::Object(Map::new()));
            }
        }
        self
    }

    pub fn value(&self) -> &Value {
        &self.0
    }
}

fn lookup<'a>(v: &'a Value, dotted: &str) -> Option<&'a Value> {
    dotted.split('.').try_fold(v, |node, part| node.get(part))
}

/// Configuration file (if any) plus flag overrides for one invocation.
#[derive(Debug, Clone)]
pub struct Sources {
    pub file_path: Option<PathBuf>,
    pub file: Value,
    pub flags: Overrides,
}

impl Sources {
    pub fn new(file_path: Option<&Path>, flags: Overrides) -> Result<Self> {
        let file = match file_path {
            Some(p) => read_config_file(p)?,
            None => Value::Object(Map::new()),
        };
        if !file.is_object() {
            return Err(CliError::format(file_path.unwrap(), "configuration must be a table"));
        }
        Ok(Self { file_path: file_path.map(Path::to_path_buf), file, flags })
    }

    /// Exactly this resolved value, with no file and no flags.
    pub fn fixed(config: Value) -> Self {
        Self { file_path: None, file: config, flags: Overrides::new() }
    }

    /// Highest-precedence explicit value for `dotted`.
    pub fn get(&self, dotted: &str) -> Option<&Value> {
        lookup(self.flags.value(), dotted).or_else(|| lookup(&self.file, dotted))
    }

    pub fn get_as<T: DeserializeOwned>(&self, dotted: &str) -> Result<Option<T>> {
        self.get(dotted)
            .map(|v| {
                serde_json::from_value(v.clone())
                    .map_err(|e| CliError::Usage(format!("invalid value for `{dotted}`: {e}")))
            })
            .transpose()
    }

    /// Like [`Sources::resolve`] but for the subtree at top-level `key`.
    pub fn resolve_at<T: DeserializeOwned>(&self, key: &str, defaults: Value) -> Result<T> {
        let mut v = defaults;
        if let Some(f) = self.file.get(key) {
            merge(&mut v, f);
        }
        if let Some(f) = self.flags.value().get(key) {
            merge(&mut v, f);
        }
        serde_json::from_value(v).map_err(|e| CliError::Usage(format!("invalid `{key}` configuration: {e}")))
    }

    /// Layers file and flags over `defaults` and deserialises the result.
    pub fn resolve<T: DeserializeOwned>(&self, defaults: Value) -> Result<(T, Value)> {
        let mut v = defaults;
        merge(&mut v, &self.file);
        merge(&mut v, self.flags.value());
        let t =
            serde_json::from_value(v.clone()).map_err(|e| CliError::Usage(format!("invalid configuration: {e}")))?;
        Ok((t, v))
    }
}

/// Record of one run: enough to replay it exactly.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub tool: String,
    pub version: String,
    pub command: String,
    pub seed: Option<u64>,
    /// Fully resolved configuration the command ran with.
    pub config: Value,
    /// Configuration file given on the command line, if any.
    pub config_file: Option<PathBuf>,
    /// Values set by flags, which took precedence over the file.
    pub flags: Value,
}

impl Manifest {
    pub fn new(command: &str, seed: Option<u64>, config: Value, sources: &Sources) -> Self {
        Self {
            tool: env!("CARGO_PKG_NAME").into(),
            version: env!("CARGO_PKG_VERSION").into(),
            command: command.into(),
            seed,
            config,
            config_file: sources.file_path.clone(),
            flags: sources.flags.value().clone(),
        }
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        write_json(path, self)
    }
}

/// `manifest.json` next to the primary output unless a path is given.
pub fn manifest_path(explicit: Option<&Path>, primary_output: &Path) -> PathBuf {
    match explicit {
        Some(p) => p.to_path_buf(),
        None => primary_output.parent().unwrap_or(Path::new("")).join("manifest.json"),
    }
}
