//! Line-oriented reports: `CHECK <name> PASS|FAIL detail=<value>` and `NOTE`
//! lines, then `---` and a `KEY=VALUE` block.

use std::fmt::Write;

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Report {
    lines: Vec<String>,
    summary: Vec<(String, String)>,
    all_passed: bool,
    checks: usize,
}

/// 17 significant digits.
pub fn num(x: f64) -> String {
    format!("{x:.16e}")
}

impl Report {
    pub fn new() -> Self {
        Report { all_passed: true, ..Default::default() }
    }

    pub fn check(&mut self, name: &str, pass: bool, detail: impl AsRef<str>) {
        self.checks += 1;
        self.all_passed &= pass;
        let verdict = if pass { "PASS" } else { "FAIL" };
        self.lines.push(format!("CHECK {name} {verdict} detail={}", detail.as_ref()));
    }

    pub fn note(&mut self, text: impl AsRef<str>) {
        self.lines.push(format!("NOTE {}", text.as_ref()));
    }

    pub fn key(&mut self, key: impl Into<String>, value: impl ToString) {
        self.summary.push((key.into(), value.to_string()));
    }

    pub fn key_num(&mut self, key: impl Into<String>, value: f64) {
        self.summary.push((key.into(), num(value)));
    }

    pub fn all_passed(&self) -> bool {
        self.all_passed
    }

    pub fn check_count(&self) -> usize {
        self.checks
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        for l in &self.lines {
            writeln!(out, "{l}").unwrap();
        }
        out.push_str("---\n");
        for (k, v) in &self.summary {
            writeln!(out, "{k}={v}").unwrap();
        }
        out
    }
}
