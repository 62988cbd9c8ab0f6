//! Check rows and report assembly.
//!
//! Every row records both sides of one inequality or identity, a
//! dimensionless slack with the convention pass <=> slack >= -tolerance,
//! and a stable anchor string naming the mathematical fact being checked.
//! Comparison rows are normalized (ratios for positive quantities), so the
//! tolerances are scale-free.

use std::io::Write;
use std::path::Path;

use serde::Serialize;

use crate::error::Result;

#[derive(Debug, Clone, Serialize)]
pub struct CheckRow {
    pub case_id: String,
    pub check: String,
    pub lhs: f64,
    pub rhs: f64,
    pub slack: f64,
    pub tolerance: f64,
    pub pass: bool,
    pub anchor: String,
}

impl CheckRow {
    /// Claim lhs <= rhs for positive quantities; slack = 1 - lhs/rhs.
    pub fn upper_bound(
        case_id: impl Into<String>,
        check: impl Into<String>,
        anchor: impl Into<String>,
        lhs: f64,
        rhs: f64,
        tolerance: f64,
    ) -> Self {
        let slack = 1.0 - lhs / rhs;
        Self {
            case_id: case_id.into(),
            check: check.into(),
            lhs,
            rhs,
            slack,
            tolerance,
            pass: slack >= -tolerance,
            anchor: anchor.into(),
        }
    }

    /// Claim lhs >= rhs for positive quantities; slack = lhs/rhs - 1.
    pub fn lower_bound(
        case_id: impl Into<String>,
        check: impl Into<String>,
        anchor: impl Into<String>,
        lhs: f64,
        rhs: f64,
        tolerance: f64,
    ) -> Self {
        let slack = lhs / rhs - 1.0;
        Self {
            case_id: case_id.into(),
            check: check.into(),
            lhs,
            rhs,
            slack,
            tolerance,
            pass: slack >= -tolerance,
            anchor: anchor.into(),
        }
    }

    /// Claim lhs = rhs; slack = -|lhs - rhs| / scale.
    pub fn equality(
        case_id: impl Into<String>,
        check: impl Into<String>,
        anchor: impl Into<String>,
        lhs: f64,
        rhs: f64,
        scale: f64,
        tolerance: f64,
    ) -> Self {
        let slack = -((lhs - rhs).abs() / scale.abs().max(1e-300));
        Self {
            case_id: case_id.into(),
            check: check.into(),
            lhs,
            rhs,
            slack,
            tolerance,
            pass: slack >= -tolerance,
            anchor: anchor.into(),
        }
    }

    /// A raw violation magnitude (already scale-free): slack = -violation.
    pub fn violation(
        case_id: impl Into<String>,
        check: impl Into<String>,
        anchor: impl Into<String>,
        violation: f64,
        tolerance: f64,
    ) -> Self {
        let slack = -violation;
        Self {
            case_id: case_id.into(),
            check: check.into(),
            lhs: violation,
            rhs: 0.0,
            slack,
            tolerance,
            pass: slack >= -tolerance,
            anchor: anchor.into(),
        }
    }
}

/// Deterministic collection of check rows with summary accounting.
#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub label: String,
    pub seed: u64,
    pub rows: Vec<CheckRow>,
}

#[derive(Debug, Serialize)]
struct Summary<'a> {
    label: &'a str,
    seed: u64,
    total: usize,
    passed: usize,
    failed: usize,
    failures: Vec<&'a CheckRow>,
}

impl Report {
    pub fn new(label: impl Into<String>, seed: u64) -> Self {
        Self {
            label: label.into(),
            seed,
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: CheckRow) {
        self.rows.push(row);
    }

    pub fn extend(&mut self, rows: Vec<CheckRow>) {
        self.rows.extend(rows);
    }

    pub fn total(&self) -> usize {
        self.rows.len()
    }

    pub fn failed(&self) -> usize {
        self.rows.iter().filter(|r| !r.pass).count()
    }

    pub fn all_pass(&self) -> bool {
        self.failed() == 0
    }

    /// CSV with a deterministic header recording the seed.
    pub fn write_csv<W: Write>(&self, w: &mut W) -> Result<()> {
        writeln!(w, "# report = {}", self.label)?;
        writeln!(w, "# seed = {}", self.seed)?;
        writeln!(w, "case,check,lhs,rhs,slack,tolerance,pass,anchor")?;
        for r in &self.rows {
            writeln!(
                w,
                "{},{},{:.12e},{:.12e},{:.6e},{:.1e},{},{}",
                r.case_id, r.check, r.lhs, r.rhs, r.slack, r.tolerance, r.pass, r.anchor
            )?;
        }
        Ok(())
    }

    pub fn save_csv(&self, path: &Path) -> Result<()> {
        let mut f = std::io::BufWriter::new(std::fs::File::create(path)?);
        self.write_csv(&mut f)
    }

    pub fn to_json_summary(&self) -> String {
        let failures: Vec<&CheckRow> = self.rows.iter().filter(|r| !r.pass).collect();
        let summary = Summary {
            label: &self.label,
            seed: self.seed,
            total: self.total(),
            passed: self.total() - self.failed(),
            failed: self.failed(),
            failures,
        };
        serde_json::to_string_pretty(&summary).expect("report serializes")
    }

    pub fn save_json_summary(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_json_summary())?;
        Ok(())
    }

    /// One line per failing row, then the totals.
    pub fn print_summary(&self) {
        for r in self.rows.iter().filter(|r| !r.pass) {
            println!(
                "FAIL {} / {}: lhs = {:.6e}, rhs = {:.6e}, slack = {:.3e} (tol {:.1e}) [{}]",
                r.case_id, r.check, r.lhs, r.rhs, r.slack, r.tolerance, r.anchor
            );
        }
        println!(
            "{}: {} checks, {} passed, {} failed",
            self.label,
            self.total(),
            self.total() - self.failed(),
            self.failed()
        );
    }
}
