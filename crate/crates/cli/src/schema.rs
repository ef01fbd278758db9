//! Structural validation of emitted JSON against the shipped report schema
//! (`docs/report.schema.json`). The validator covers the subset of JSON
//! Schema the document uses — `type` (single or list), `properties`,
//! `required`, `additionalProperties: false`, `items`, and `enum` — and every
//! report is checked before it is written anywhere.

use serde_json::Value;

use crate::config::CliError;

/// Schema document shipped with the repository.
pub const REPORT_SCHEMA: &str = include_str!("../../../docs/report.schema.json");

/// Parse and validate a serialized report against the shipped schema.
pub fn validate_report_json(json: &str) -> Result<(), CliError> {
    let value: Value = serde_json::from_str(json)
        .map_err(|e| CliError::Run(format!("emitted report is not valid JSON: {e}")))?;
    let schema: Value = serde_json::from_str(REPORT_SCHEMA)
        .map_err(|e| CliError::Run(format!("shipped schema is not valid JSON: {e}")))?;
    validate(&value, &schema, "$")
        .map_err(|m| CliError::Run(format!("report violates its schema: {m}")))
}

/// Recursive structural check; `path` is a JSON-pointer-style location used
/// in error messages.
pub fn validate(value: &Value, schema: &Value, path: &str) -> Result<(), String> {
    let obj = match schema.as_object() {
        Some(o) => o,
        None => return Err(format!("{path}: schema node is not an object")),
    };

    if let Some(allowed) = obj.get("enum") {
        let list = allowed
            .as_array()
            .ok_or_else(|| format!("{path}: schema enum is not an array"))?;
        if !list.contains(value) {
            return Err(format!("{path}: value {value} is not one of {allowed}"));
        }
        return Ok(());
    }

    if let Some(ty) = obj.get("type") {
        let names: Vec<&str> = match ty {
            Value::String(s) => vec![s.as_str()],
            Value::Array(list) => list.iter().filter_map(Value::as_str).collect(),
            _ => return Err(format!("{path}: schema type is neither string nor list")),
        };
        if !names.iter().any(|n| matches_type(value, n)) {
            return Err(format!(
                "{path}: value has type {}, expected one of {names:?}",
                type_name(value)
            ));
        }
    }

    if let Some(map) = value.as_object() {
        let props = obj.get("properties").and_then(Value::as_object);
        if let Some(required) = obj.get("required").and_then(Value::as_array) {
            for name in required.iter().filter_map(Value::as_str) {
                if !map.contains_key(name) {
                    return Err(format!("{path}: missing required field '{name}'"));
                }
            }
        }
        if obj.get("additionalProperties") == Some(&Value::Bool(false)) {
            for key in map.keys() {
                if !props.is_some_and(|p| p.contains_key(key)) {
                    return Err(format!("{path}: unexpected field '{key}'"));
                }
            }
        }
        if let Some(props) = props {
            for (key, sub) in props {
                if let Some(field) = map.get(key) {
                    validate(field, sub, &format!("{path}.{key}"))?;
                }
            }
        }
    }

    if let (Some(items), Some(list)) = (obj.get("items"), value.as_array()) {
        for (i, entry) in list.iter().enumerate() {
            validate(entry, items, &format!("{path}[{i}]"))?;
        }
    }

    Ok(())
}

fn matches_type(value: &Value, name: &str) -> bool {
    match name {
        "object" => value.is_object(),
        "array" => value.is_array(),
        "string" => value.is_string(),
        "boolean" => value.is_boolean(),
        "null" => value.is_null(),
        "integer" => value.as_number().is_some_and(|n| n.is_i64() || n.is_u64()),
        "number" => value.is_number(),
        _ => false,
    }
}

fn type_name(value: &Value) -> &'static str {
    match value {
        Value::Null => "null",
        Value::Bool(_) => "boolean",
        Value::Number(_) => "number",
        Value::String(_) => "string",
        Value::Array(_) => "array",
        Value::Object(_) => "object",
    }
}
