use serde_json::{Map, Value};

use crate::error::{Error, Result};

/// Applies `key.path=value` to a JSON object. The value is read as JSON when
/// it parses and as a plain string otherwise; missing objects on the path are
/// created.
pub fn apply_override(target: &mut Value, spec: &str) -> Result<()> {
    let (key, raw) = spec
        .split_once('=')
        .ok_or_else(|| Error::Config(format!("override {spec:?} is not of the form key=value")))?;
    let path: Vec<&str> = key.trim().split('.').collect();
    if path.iter().any(|seg| seg.is_empty()) {
        return Err(Error::Config(format!("override key {key:?} has an empty segment")));
    }
    let value = serde_json::from_str::<Value>(raw).unwrap_or_else(|_| Value::String(raw.to_string()));
    let mut node = target;
    for (i, seg) in path.iter().enumerate() {
        if node.is_null() {
            *node = Value::Object(Map::new());
        }
        let map = node
            .as_object_mut()
            .ok_or_else(|| Error::Config(format!("override {key:?}: {} is not an object", path[..i].join("."))))?;
        if i + 1 == path.len() {
            map.insert(seg.to_string(), value);
            return Ok(());
        }
        node = map.entry(seg.to_string()).or_insert(Value::Null);
    }
    unreachable!("path has at least one segment")
}
