//! Result types of the subcommands. Each has a JSON form and a plain-text form.

use std::fmt;

use serde::{Deserialize, Serialize};
use tsw_core::groupring::QHFraction;
use tsw_core::linkdata::CheckResult;
use tsw_core::sw::SwTable;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValidateReport {
    pub ok: bool,
    pub checks: Vec<CheckResult>,
    #[serde(default)]
    pub ambiguous_signs: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HomologyReport {
    pub group: String,
    pub b1: usize,
    pub invariant_factors: Vec<i64>,
    pub torsion_order: u64,
    pub meridians: Vec<String>,
    /// 1-based components whose meridian has finite order.
    pub finite_order: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EulerClass {
    pub class: String,
    pub charge: Vec<i64>,
    pub chern: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EulerReport {
    pub b1: usize,
    pub window: Option<i64>,
    pub classes: Vec<EulerClass>,
}

/// A tau or Delta value: numerator terms over a product of (h - 1) factors.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ElementReport {
    pub quantity: String,
    pub charge: Vec<i64>,
    pub orientation: String,
    pub orientation_sign: i64,
    pub value: String,
    pub numerator: Vec<(String, String)>,
    pub denominator: Vec<String>,
}

impl ElementReport {
    pub fn new(quantity: &str, charge: Vec<i64>, orientation: &str, sign: i64, x: &QHFraction) -> Self {
        let g = x.group();
        ElementReport {
            quantity: quantity.into(),
            charge,
            orientation: orientation.into(),
            orientation_sign: sign,
            value: x.to_string(),
            numerator: x.num.terms().iter().map(|(h, c)| (g.fmt_element(h), c.to_string())).collect(),
            denominator: x.den.iter().map(|h| format!("{}-1", g.fmt_element(h))).collect(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SwSingle {
    pub charge: Vec<i64>,
    pub class: String,
    pub value: i64,
    pub direction: Option<String>,
    pub global_sign: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SwReport {
    pub method: String,
    pub table: SwTable,
    /// Sign of the split closed form relative to the neutral-coefficient extraction.
    pub relative_sign: i64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FileChecks {
    pub file: String,
    pub b1: usize,
    pub checks: Vec<CheckResult>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SelftestReport {
    pub ok: bool,
    pub files: Vec<FileChecks>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ErrorReport {
    pub error: String,
    pub message: String,
}

fn checks(f: &mut fmt::Formatter<'_>, cs: &[CheckResult]) -> fmt::Result {
    for c in cs {
        let mark = if c.ok { "ok  " } else { "FAIL" };
        if c.detail.is_empty() {
            writeln!(f, "  {mark} {}", c.name)?;
        } else {
            writeln!(f, "  {mark} {} ({})", c.name, c.detail)?;
        }
    }
    Ok(())
}

impl fmt::Display for ValidateReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        checks(f, &self.checks)?;
        if !self.ambiguous_signs.is_empty() {
            writeln!(f, "  sign undetermined for sublinks {}", self.ambiguous_signs.join(" "))?;
        }
        writeln!(f, "{}", if self.ok { "valid" } else { "INVALID" })
    }
}

impl fmt::Display for HomologyReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "H_1 = {}", self.group)?;
        writeln!(f, "b1 = {}, |Tors| = {}", self.b1, self.torsion_order)?;
        for (i, x) in self.meridians.iter().enumerate() {
            writeln!(f, "[t{}] = {}", i + 1, x)?;
        }
        Ok(())
    }
}

impl fmt::Display for EulerReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(w) = self.window {
            writeln!(f, "{} classes with free coordinates in [-{w}, {w}]", self.classes.len())?;
        } else {
            writeln!(f, "{} classes", self.classes.len())?;
        }
        for c in &self.classes {
            writeln!(f, "{:<16} k = {:<16} c = {}", c.class, fmt_vec(&c.charge), c.chern)?;
        }
        Ok(())
    }
}

impl fmt::Display for ElementReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{}(k = {}) = {}", self.quantity, fmt_vec(&self.charge), self.value)?;
        if self.orientation_sign != 1 || self.orientation != "link" {
            writeln!(f, "orientation: {} (factor {})", self.orientation, self.orientation_sign)?;
        }
        Ok(())
    }
}

impl fmt::Display for SwSingle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "SW(k = {}) = {}", fmt_vec(&self.charge), self.value)?;
        if let Some(d) = &self.direction {
            writeln!(f, "direction: {d}")?;
        }
        writeln!(f, "global sign: {}", self.global_sign)
    }
}

impl fmt::Display for SwReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let t = &self.table;
        writeln!(f, "{} classes, b1 = {}, window {} ({})", t.entries.len(), t.b1, t.window, self.method)?;
        if let Some(d) = &t.direction {
            writeln!(f, "direction: {d}")?;
        }
        for e in &t.entries {
            writeln!(f, "{:<16} k = {:<16} {}", e.class, fmt_vec(&e.charge), e.value)?;
        }
        if !t.boundary_zero {
            writeln!(f, "warning: nonzero values on the window boundary")?;
        }
        writeln!(f, "global sign: {}", t.global_sign)
    }
}

impl fmt::Display for SelftestReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for fc in &self.files {
            writeln!(f, "{} (b1 = {})", fc.file, fc.b1)?;
            checks(f, &fc.checks)?;
        }
        writeln!(f, "{}", if self.ok { "all checks passed" } else { "FAILURES" })
    }
}

pub fn fmt_vec(v: &[i64]) -> String {
    format!("({})", v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(","))
}
