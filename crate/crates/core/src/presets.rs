//! Named preset algebras and the plain-text algebra spec file format.
//!
//! ```text
//! algebra n=3
//! basis 1 e1 e2
//! mul e1 e1 = 1*e2
//! ```

use std::collections::BTreeSet;

use thiserror::Error;

use crate::algebra::{AlgebraError, StructureConstants};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SourceError {
    #[error("unknown preset `{0}` (expected dual, trunc:<k> or square:<r>)")]
    UnknownPreset(String),
    #[error("spec file line {line}: {msg}")]
    Syntax { line: usize, msg: String },
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
}

/// `1, e1, ..., e_{n-1}`.
pub fn labels(n: usize) -> Vec<String> {
    std::iter::once("1".to_string()).chain((1..n).map(|i| format!("e{i}"))).collect()
}

/// R[ε]/(ε²).
pub fn dual() -> StructureConstants {
    trunc(2).expect("valid preset")
}

/// R[ε]/(ε^k): basis `1, ε, ..., ε^{k-1}`.
pub fn trunc(k: usize) -> Result<StructureConstants, AlgebraError> {
    StructureConstants::from_fn(labels(k), |i, j, l| if i + j == l { 1.0 } else { 0.0 })
}

/// R[x_1..x_r]/(all degree-2 monomials): basis `1, x_1, ..., x_r`.
pub fn square(r: usize) -> Result<StructureConstants, AlgebraError> {
    StructureConstants::from_fn(
        labels(r + 1),
        |i, j, l| {
            if (i == 0 && j == l) || (j == 0 && i == l) {
                1.0
            } else {
                0.0
            }
        },
    )
}

/// Resolves `dual`, `trunc:k` or `square:r`.
pub fn preset(name: &str) -> Result<StructureConstants, SourceError> {
    let unknown = || SourceError::UnknownPreset(name.to_string());
    let name = name.trim();
    if name == "dual" {
        return Ok(dual());
    }
    let (kind, arg) = name.split_once(':').ok_or_else(unknown)?;
    let k: usize = arg.trim().parse().map_err(|_| unknown())?;
    match kind.trim() {
        "trunc" if k >= 1 => Ok(trunc(k)?),
        "square" => Ok(square(k)?),
        _ => Err(unknown()),
    }
}

/// Parses the algebra spec file format.
pub fn parse_spec(text: &str) -> Result<StructureConstants, SourceError> {
    let mut lines =
        text.lines().enumerate().map(|(i, l)| (i + 1, l.trim())).filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
    let err = |line: usize, msg: &str| SourceError::Syntax { line, msg: msg.to_string() };

    let (ln, header) = lines.next().ok_or_else(|| err(1, "empty spec file"))?;
    let n: usize = header
        .strip_prefix("algebra")
        .map(str::trim)
        .and_then(|r| r.strip_prefix("n="))
        .and_then(|v| v.trim().parse().ok())
        .filter(|&n| n > 0)
        .ok_or_else(|| err(ln, "expected `algebra n=<int>`"))?;

    let (ln, basis_line) = lines.next().ok_or_else(|| err(ln + 1, "missing basis line"))?;
    let names: Vec<String> = basis_line
        .strip_prefix("basis")
        .ok_or_else(|| err(ln, "expected `basis <names>`"))?
        .split_whitespace()
        .map(str::to_string)
        .collect();
    if names.len() != n {
        return Err(err(ln, &format!("basis lists {} names, expected {n}", names.len())));
    }
    if names[0] != "1" {
        return Err(err(ln, "first basis name must be `1`"));
    }
    if names.iter().collect::<BTreeSet<_>>().len() != n {
        return Err(err(ln, "duplicate basis name"));
    }
    let index = |ln: usize, name: &str| {
        names.iter().position(|x| x == name).ok_or_else(|| err(ln, &format!("unknown basis name `{name}`")))
    };

    let mut c = vec![0.0; n * n * n];
    for j in 0..n {
        c[j * n + j] = 1.0;
        c[(j * n) * n + j] = 1.0;
    }
    let mut seen = BTreeSet::new();
    for (ln, line) in lines {
        let body = line.strip_prefix("mul").ok_or_else(|| err(ln, "expected `mul`"))?;
        let (lhs, rhs) = body.split_once('=').ok_or_else(|| err(ln, "missing `=`"))?;
        let ops: Vec<&str> = lhs.split_whitespace().collect();
        if ops.len() != 2 {
            return Err(err(ln, "expected two factors before `=`"));
        }
        let (i, j) = (index(ln, ops[0])?, index(ln, ops[1])?);
        if i == 0 || j == 0 {
            return Err(err(ln, "products with the unit are implicit"));
        }
        if !seen.insert((i.min(j), i.max(j))) {
            return Err(err(ln, "product given twice"));
        }
        for (k, coef) in parse_combination(rhs).map_err(|m| err(ln, &m))? {
            let k = index(ln, &k)?;
            c[(i * n + j) * n + k] += coef;
            if i != j {
                c[(j * n + i) * n + k] += coef;
            }
        }
    }
    Ok(StructureConstants::new(names, c)?)
}

/// `<coef>*<name> [± <coef>*<name> ...]`, or `0`.
fn parse_combination(text: &str) -> Result<Vec<(String, f64)>, String> {
    let text = text.trim();
    if text == "0" {
        return Ok(Vec::new());
    }
    let mut out = Vec::new();
    let mut rest = text;
    let mut sign = 1.0;
    loop {
        rest = rest.trim_start();
        if let Some(r) = rest.strip_prefix('-') {
            sign = -sign;
            rest = r;
            continue;
        }
        if let Some(r) = rest.strip_prefix('+') {
            rest = r;
            continue;
        }
        let end = rest
            .char_indices()
            .skip(1)
            .find(|&(i, ch)| {
                // a sign only ends the term once the name after `*` has started
                let seen = &rest[..i];
                (ch == '+' || ch == '-') && seen.contains('*') && !seen.trim_end().ends_with('*')
            })
            .map(|(i, _)| i)
            .unwrap_or(rest.len());
        let term = rest[..end].trim();
        let (coef, name) = term.split_once('*').ok_or_else(|| format!("term `{term}` is not <coef>*<name>"))?;
        let coef: f64 = coef.trim().parse().map_err(|_| format!("bad coefficient `{}`", coef.trim()))?;
        out.push((name.trim().to_string(), sign * coef));
        sign = 1.0;
        rest = &rest[end..];
        if rest.trim().is_empty() {
            break;
        }
    }
    Ok(out)
}
