use serde_json::{json, Value};
use stellar::{AmalgamError, ComplexError, HfError, LimitError, MapError, SeqError};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Parse(String),
    #[error("{message}")]
    Validation { invariant: String, message: String },
}

/// The variant name of an error, used as the violated invariant.
fn variant(e: &impl std::fmt::Debug) -> String {
    let d = format!("{e:?}");
    d.split(|c: char| !c.is_alphanumeric() && c != '_').next().unwrap_or("").to_string()
}

/// Innermost variant for wrapper variants such as `Map(Complex(..))`.
fn leaf(e: &impl std::fmt::Debug) -> String {
    let d = format!("{e:?}");
    let names: Vec<&str> = d.split('(').map(str::trim).collect();
    let wrappers = ["Map", "Seq", "Complex", "Hf"];
    names
        .iter()
        .find(|n| !wrappers.contains(n))
        .map(|n| n.split(|c: char| !c.is_alphanumeric() && c != '_').next().unwrap_or("").to_string())
        .unwrap_or_else(|| variant(e))
}

fn parse_kind(e: &HfError) -> &'static str {
    match e {
        HfError::Parse { .. } | HfError::InvalidAtomName(_) => "ParseError",
        _ => "ValidationError",
    }
}

/// `{"error": kind, "invariant": name, "message": text}`.
pub fn classify(err: &anyhow::Error) -> Value {
    let msg = format!("{err:#}");
    let (kind, invariant) = if let Some(e) = err.downcast_ref::<CliError>() {
        match e {
            CliError::Parse(_) => ("ParseError", "well-formed input".to_string()),
            CliError::Validation { invariant, .. } => ("ValidationError", invariant.clone()),
        }
    } else if let Some(e) = err.downcast_ref::<HfError>() {
        (parse_kind(e), variant(e))
    } else if let Some(e) = err.downcast_ref::<ComplexError>() {
        match e {
            ComplexError::Hf(h) => (parse_kind(h), variant(h)),
            _ => ("ValidationError", variant(e)),
        }
    } else if let Some(e) = err.downcast_ref::<MapError>() {
        match e {
            MapError::Hf(h) => (parse_kind(h), variant(h)),
            _ => ("ValidationError", leaf(e)),
        }
    } else if let Some(e) = err.downcast_ref::<SeqError>() {
        ("ValidationError", variant(e))
    } else if let Some(e) = err.downcast_ref::<AmalgamError>() {
        match e {
            AmalgamError::PreconditionFailed { condition, .. } => ("PreconditionFailed", condition.to_string()),
            _ => ("ValidationError", leaf(e)),
        }
    } else if let Some(e) = err.downcast_ref::<LimitError>() {
        ("ValidationError", leaf(e))
    } else if err.downcast_ref::<std::io::Error>().is_some() {
        ("IoError", "readable input".to_string())
    } else {
        ("Error", String::new())
    };
    json!({ "error": kind, "invariant": invariant, "message": msg })
}
