//! Typed parameter schemas shared by algorithm contracts and trainers.

use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ParamKind {
    String,
    Int,
    Real,
    Bool,
}

impl ParamKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ParamKind::String => "string",
            ParamKind::Int => "int",
            ParamKind::Real => "real",
            ParamKind::Bool => "bool",
        }
    }
}

impl fmt::Display for ParamKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum ParamValue {
    Str(String),
    Int(i64),
    Real(f64),
    Bool(bool),
}

impl fmt::Display for ParamValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ParamValue::Str(s) => f.write_str(s),
            ParamValue::Int(i) => write!(f, "{i}"),
            ParamValue::Real(x) => write!(f, "{x}"),
            ParamValue::Bool(b) => write!(f, "{b}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("parameter {key:?}: {reason}")]
pub struct ParamError {
    pub key: String,
    pub reason: String,
}

impl ParamError {
    pub fn new(key: &str, reason: impl Into<String>) -> Self {
        ParamError {
            key: key.to_string(),
            reason: reason.into(),
        }
    }
}

impl ParamValue {
    /// Converts to `kind`. Strings are parsed (so CLI text works for every
    /// kind); integers widen to reals; nothing else converts.
    pub fn coerce(&self, kind: ParamKind) -> Option<ParamValue> {
        match (self, kind) {
            (ParamValue::Str(s), ParamKind::String) => Some(ParamValue::Str(s.clone())),
            (ParamValue::Str(s), ParamKind::Int) => s.trim().parse().ok().map(ParamValue::Int),
            (ParamValue::Str(s), ParamKind::Real) => s.trim().parse().ok().map(ParamValue::Real),
            (ParamValue::Str(s), ParamKind::Bool) => s.trim().parse().ok().map(ParamValue::Bool),
            (ParamValue::Int(i), ParamKind::Int) => Some(ParamValue::Int(*i)),
            (ParamValue::Int(i), ParamKind::Real) => Some(ParamValue::Real(*i as f64)),
            (ParamValue::Real(x), ParamKind::Real) => Some(ParamValue::Real(*x)),
            (ParamValue::Bool(b), ParamKind::Bool) => Some(ParamValue::Bool(*b)),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ParamSpec {
    pub name: String,
    pub kind: ParamKind,
    pub required: bool,
    pub default: Option<ParamValue>,
    pub description: String,
}

impl ParamSpec {
    pub fn required(name: &str, kind: ParamKind, description: &str) -> Self {
        ParamSpec {
            name: name.to_string(),
            kind,
            required: true,
            default: None,
            description: description.to_string(),
        }
    }

    /// Optional parameter; `default` of `None` means "absent unless given".
    pub fn optional(name: &str, kind: ParamKind, default: Option<ParamValue>, description: &str) -> Self {
        ParamSpec {
            name: name.to_string(),
            kind,
            required: false,
            default,
            description: description.to_string(),
        }
    }

    /// One-line rendering such as `order:int (required)`.
    pub fn summary(&self) -> String {
        match (&self.default, self.required) {
            (_, true) => format!("{}:{} (required)", self.name, self.kind),
            (Some(d), false) => format!("{}:{}={d}", self.name, self.kind),
            (None, false) => format!("{}:{}?", self.name, self.kind),
        }
    }
}

/// Validated parameters: every value has its declared kind.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Params {
    values: BTreeMap<String, ParamValue>,
}

impl Params {
    /// Checks `raw` against `schema`: unknown keys, missing required keys
    /// and uncoercible values are rejected with the offending key.
    pub fn validate(schema: &[ParamSpec], raw: &BTreeMap<String, ParamValue>) -> Result<Params, ParamError> {
        if let Some(key) = raw.keys().find(|k| !schema.iter().any(|s| &s.name == *k)) {
            return Err(ParamError::new(key, "unknown parameter"));
        }
        let mut values = BTreeMap::new();
        for spec in schema {
            match raw.get(&spec.name) {
                Some(v) => {
                    let typed = v.coerce(spec.kind).ok_or_else(|| {
                        ParamError::new(&spec.name, format!("expected {}, got {v:?}", spec.kind))
                    })?;
                    values.insert(spec.name.clone(), typed);
                }
                None if spec.required => {
                    return Err(ParamError::new(&spec.name, "required parameter missing"))
                }
                None => {
                    if let Some(d) = &spec.default {
                        values.insert(spec.name.clone(), d.clone());
                    }
                }
            }
        }
        Ok(Params { values })
    }

    pub fn get(&self, key: &str) -> Option<&ParamValue> {
        self.values.get(key)
    }

    pub fn str(&self, key: &str) -> Option<&str> {
        match self.values.get(key) {
            Some(ParamValue::Str(s)) => Some(s),
            _ => None,
        }
    }

    pub fn int(&self, key: &str) -> Option<i64> {
        match self.values.get(key) {
            Some(ParamValue::Int(i)) => Some(*i),
            _ => None,
        }
    }

    pub fn real(&self, key: &str) -> Option<f64> {
        match self.values.get(key) {
            Some(ParamValue::Real(x)) => Some(*x),
            _ => None,
        }
    }

    pub fn bool(&self, key: &str) -> Option<bool> {
        match self.values.get(key) {
            Some(ParamValue::Bool(b)) => Some(*b),
            _ => None,
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &ParamValue)> {
        self.values.iter().map(|(k, v)| (k.as_str(), v))
    }
}

/// Converts a TOML table into raw parameters. Nested tables, arrays and
/// dates are not parameters.
pub fn params_from_toml(table: &toml::Table) -> Result<BTreeMap<String, ParamValue>, ParamError> {
    table
        .iter()
        .map(|(k, v)| {
            let value = match v {
                toml::Value::String(s) => ParamValue::Str(s.clone()),
                toml::Value::Integer(i) => ParamValue::Int(*i),
                toml::Value::Float(x) => ParamValue::Real(*x),
                toml::Value::Boolean(b) => ParamValue::Bool(*b),
                other => {
                    return Err(ParamError::new(k, format!("unsupported value type {}", other.type_str())))
                }
            };
            Ok((k.clone(), value))
        })
        .collect()
}
