//! Element literals `1.0 + 2.0 e1 + 0.5 e2` and point literals
//! (semicolon-separated element literals).

use thiserror::Error;

use crate::algebra::AlgebraElement;
use crate::prolong::APoint;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LiteralError {
    #[error("bad element literal `{text}`: {msg}")]
    Bad { text: String, msg: String },
}

fn bad(text: &str, msg: impl Into<String>) -> LiteralError {
    LiteralError::Bad { text: text.to_string(), msg: msg.into() }
}

/// Parses an element literal against the basis `labels` (`labels[0]` is the unit).
///
/// Terms are `<real>` (unit), `<real> <name>` or `<real>*<name>`, joined by
/// `+` or `-`. Repeated names accumulate.
pub fn parse_element(text: &str, labels: &[String]) -> Result<AlgebraElement, LiteralError> {
    let mut coeffs = vec![0.0; labels.len()];
    let tokens = tokenize(text).map_err(|m| bad(text, m))?;
    if tokens.is_empty() {
        return Err(bad(text, "empty literal"));
    }
    let mut i = 0;
    let mut sign = 1.0;
    let mut expect_term = true;
    while i < tokens.len() {
        match tokens[i].as_str() {
            "+" | "-" => {
                if tokens[i] == "-" {
                    sign = -sign;
                }
                expect_term = true;
                i += 1;
            }
            tok => {
                if !expect_term {
                    return Err(bad(text, format!("missing `+` before `{tok}`")));
                }
                let value: f64 = tok.parse().map_err(|_| bad(text, format!("`{tok}` is not a number")))?;
                i += 1;
                let mut index = 0;
                if i < tokens.len() && tokens[i] == "*" {
                    i += 1;
                }
                if i < tokens.len() && !matches!(tokens[i].as_str(), "+" | "-") {
                    let name = &tokens[i];
                    index = labels
                        .iter()
                        .position(|l| l == name)
                        .ok_or_else(|| bad(text, format!("unknown basis name `{name}`")))?;
                    i += 1;
                }
                coeffs[index] += sign * value;
                sign = 1.0;
                expect_term = false;
            }
        }
    }
    if expect_term {
        return Err(bad(text, "dangling sign"));
    }
    Ok(AlgebraElement::new(coeffs))
}

fn tokenize(text: &str) -> Result<Vec<String>, String> {
    let mut out = Vec::new();
    let b = text.as_bytes();
    let mut i = 0;
    while i < b.len() {
        let c = b[i];
        if c.is_ascii_whitespace() {
            i += 1;
        } else if c == b'+' || c == b'-' || c == b'*' {
            out.push((c as char).to_string());
            i += 1;
        } else if c.is_ascii_digit() || c == b'.' {
            let start = i;
            while i < b.len() && (b[i].is_ascii_digit() || b[i] == b'.') {
                i += 1;
            }
            // exponent: e/E followed by optional sign and digits
            if i < b.len() && (b[i] == b'e' || b[i] == b'E') {
                let mut j = i + 1;
                if j < b.len() && (b[j] == b'+' || b[j] == b'-') {
                    j += 1;
                }
                if j < b.len() && b[j].is_ascii_digit() {
                    while j < b.len() && b[j].is_ascii_digit() {
                        j += 1;
                    }
                    i = j;
                }
            }
            out.push(text[start..i].to_string());
        } else if c.is_ascii_alphanumeric() || c == b'_' {
            let start = i;
            while i < b.len() && (b[i].is_ascii_alphanumeric() || b[i] == b'_') {
                i += 1;
            }
            out.push(text[start..i].to_string());
        } else {
            return Err(format!("unexpected character `{}`", c as char));
        }
    }
    Ok(out)
}

/// Parses `X^1; X^2; ...`.
pub fn parse_point(text: &str, labels: &[String]) -> Result<APoint, LiteralError> {
    text.split(';').map(|part| parse_element(part, labels)).collect::<Result<Vec<_>, _>>().map(APoint::new)
}

/// Shortest round-trip rendering of every coefficient: `9 + 12 e1`.
pub fn format_element(a: &AlgebraElement, labels: &[String]) -> String {
    let mut out = format!("{}", a.coeffs[0]);
    for (c, name) in a.coeffs.iter().zip(labels).skip(1) {
        if c.is_sign_negative() && *c != 0.0 {
            out.push_str(&format!(" - {} {name}", -c));
        } else {
            out.push_str(&format!(" + {} {name}", c.abs()));
        }
    }
    out
}
