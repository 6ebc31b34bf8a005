use std::collections::BTreeSet;
use std::path::Path;

use anyhow::{Context, Result};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use stellar::complex::ComplexJson;
use stellar::simap::ExprJson;
use stellar::{Complex, Guardrails, HfSet, MapExpr, Ur};

use crate::error::CliError;

pub fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

pub fn write(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

pub fn parse_json<T: for<'de> Deserialize<'de>>(text: &str, what: &str) -> Result<T> {
    serde_json::from_str(text).map_err(|e| CliError::Parse(format!("{what}: {e}")).into())
}

pub fn pretty(v: &impl Serialize) -> String {
    serde_json::to_string_pretty(v).expect("serializable") + "\n"
}

pub fn load_complex(path: &Path) -> Result<Complex> {
    let raw: ComplexJson = parse_json(&read(path)?, &path.display().to_string())?;
    let c = raw.into_complex()?;
    c.check_guardrails(&Guardrails::from_env())?;
    Ok(c)
}

pub fn parse_set(ur: &Ur, text: &str) -> Result<HfSet> {
    Ok(ur.parse(text.trim())?)
}

/// `[{a},{b}]` as text, or a JSON array of set encodings.
pub fn parse_list(text: &str) -> Result<Vec<HfSet>> {
    let t = text.trim();
    if let Ok(v) = serde_json::from_str::<Vec<HfSet>>(t) {
        return Ok(v);
    }
    let inner = t
        .strip_prefix('[')
        .and_then(|r| r.strip_suffix(']'))
        .ok_or_else(|| CliError::Parse(format!("expected a bracketed list, got `{t}`")))?;
    let mut out = Vec::new();
    let (mut depth, mut start) = (0i32, 0usize);
    for (i, ch) in inner.char_indices() {
        match ch {
            '{' => depth += 1,
            '}' => depth -= 1,
            ',' if depth == 0 => {
                out.push(stellar::hfset::parse(inner[start..i].trim())?);
                start = i + 1;
            }
            _ => {}
        }
    }
    if !inner[start..].trim().is_empty() {
        out.push(stellar::hfset::parse(inner[start..].trim())?);
    }
    Ok(out)
}

pub fn checked_list(ur: &Ur, text: &str) -> Result<Vec<HfSet>> {
    let v = parse_list(text)?;
    for s in &v {
        ur.check(s)?;
    }
    Ok(v)
}

/// The urelements named by `--ur a,b,c`, or else the support of the given sets.
pub fn ur_from(names: Option<&str>, sets: &[&[HfSet]]) -> Result<Ur> {
    match names {
        Some(n) => Ok(Ur::new(n.split(',').map(str::trim).filter(|s| !s.is_empty()))?),
        None => {
            let atoms: BTreeSet<String> = sets
                .iter()
                .flat_map(|v| v.iter())
                .flat_map(|s| s.support())
                .filter_map(|a| a.atom_name().map(str::to_string))
                .collect();
            Ok(Ur::new(atoms)?)
        }
    }
}

/// Map file: `{"expr": ..., "assignment": [[v, f(v)], ...]}`; a bare expression is accepted too.
#[derive(Deserialize)]
#[serde(untagged)]
enum MapFile {
    Wrapped {
        expr: ExprJson,
        #[serde(default)]
        assignment: Option<Vec<(HfSet, HfSet)>>,
    },
    Bare(ExprJson),
}

pub fn load_map(path: &Path) -> Result<MapExpr> {
    let file: MapFile = parse_json(&read(path)?, &path.display().to_string())?;
    let (expr, assignment) = match file {
        MapFile::Wrapped { expr, assignment } => (expr, assignment),
        MapFile::Bare(expr) => (expr, None),
    };
    let m = expr.build()?;
    if let Some(pairs) = assignment {
        let table: Vec<(HfSet, HfSet)> = m.map().vertex_map().iter().map(|(a, b)| (a.clone(), b.clone())).collect();
        let mut given = pairs;
        given.sort();
        if given != table {
            return Err(CliError::Validation {
                invariant: "assignment matches expression".into(),
                message: format!("{}: the stored vertex table differs from the evaluated expression", path.display()),
            }
            .into());
        }
    }
    Ok(m)
}

pub fn map_json(m: &MapExpr) -> Value {
    json!({
        "expr": m.to_json(),
        "assignment": m.map().vertex_map().iter().collect::<Vec<_>>(),
        "classes": m.classes(),
    })
}

pub fn complex_json(c: &Complex) -> Value {
    serde_json::to_value(c).expect("serializable")
}
