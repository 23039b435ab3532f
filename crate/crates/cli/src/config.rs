//! Assembling a JSON config from a file, `--set` overrides and inline flags.

use std::path::Path;

use serde_json::{Map, Value};
use zsigmondy_core::{Error, Result};

pub fn load(path: Option<&Path>) -> Result<Value> {
    let Some(path) = path else {
        return Ok(Value::Object(Map::new()));
    };
    let text = std::fs::read_to_string(path).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
    let value: Value = serde_json::from_str(&text).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
    if !value.is_object() {
        return Err(Error::Parse(format!("{}: config must be a JSON object", path.display())));
    }
    Ok(value)
}

/// Sets `a.b.c` in a nested object, creating intermediate objects.
pub fn set_path(root: &mut Value, path: &str, value: Value) -> Result<()> {
    let mut cur = root;
    let parts: Vec<&str> = path.split('.').collect();
    for (i, part) in parts.iter().enumerate() {
        if part.is_empty() {
            return Err(Error::Parse(format!("bad key {path:?}")));
        }
        let obj = match cur {
            Value::Object(m) => m,
            _ => return Err(Error::Parse(format!("{path:?}: {part:?} is not inside an object"))),
        };
        if i + 1 == parts.len() {
            obj.insert(part.to_string(), value);
            return Ok(());
        }
        cur = obj.entry(part.to_string()).or_insert_with(|| Value::Object(Map::new()));
    }
    unreachable!("split yields at least one part")
}

/// Applies a `key=value` override; the value is read as JSON when it
/// parses, else as a string.
pub fn apply_override(root: &mut Value, text: &str) -> Result<()> {
    let (key, raw) = text
        .split_once('=')
        .ok_or_else(|| Error::Parse(format!("override {text:?} is not key=value")))?;
    let value = serde_json::from_str(raw).unwrap_or_else(|_| Value::String(raw.to_string()));
    set_path(root, key.trim(), value)
}

/// `1,2,3` as a list of strings.
pub fn list(text: &str) -> Value {
    Value::Array(
        text.split([',', ';'])
            .map(str::trim)
            .filter(|s| !s.is_empty())
            .map(|s| Value::String(s.to_string()))
            .collect(),
    )
}

/// Sets `spec.kind`, clearing the params when the kind changes.
pub fn set_kind(root: &mut Value, kind: &str) -> Result<()> {
    let current = root.pointer("/spec/kind").and_then(Value::as_str).map(str::to_owned);
    if current.as_deref() != Some(kind) {
        set_path(root, "spec.params", Value::Object(Map::new()))?;
    }
    set_path(root, "spec.kind", Value::String(kind.to_string()))
}
