use std::fmt;
use std::io::Write;

use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Relation {
    /// `statistic <= bound + tolerance`
    AtMost,
    /// `statistic >= bound − tolerance`
    AtLeast,
    /// `|statistic − bound| <= tolerance`
    Within,
}

impl Relation {
    fn symbol(self) -> &'static str {
        match self {
            Relation::AtMost => "<=",
            Relation::AtLeast => ">=",
            Relation::Within => "~=",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckRow {
    pub check: String,
    pub statistic: f64,
    pub bound: f64,
    pub tolerance: f64,
    pub relation: Relation,
    pub passed: bool,
}

impl CheckRow {
    pub fn new(
        check: impl Into<String>,
        statistic: f64,
        relation: Relation,
        bound: f64,
        tolerance: f64,
    ) -> Self {
        let passed = match relation {
            Relation::AtMost => statistic <= bound + tolerance,
            Relation::AtLeast => statistic >= bound - tolerance,
            Relation::Within => (statistic - bound).abs() <= tolerance,
        };
        Self {
            check: check.into(),
            statistic,
            bound,
            tolerance,
            relation,
            passed,
        }
    }

    pub fn at_most(check: impl Into<String>, statistic: f64, bound: f64, tolerance: f64) -> Self {
        Self::new(check, statistic, Relation::AtMost, bound, tolerance)
    }

    pub fn at_least(check: impl Into<String>, statistic: f64, bound: f64, tolerance: f64) -> Self {
        Self::new(check, statistic, Relation::AtLeast, bound, tolerance)
    }

    pub fn within(check: impl Into<String>, statistic: f64, bound: f64, tolerance: f64) -> Self {
        Self::new(check, statistic, Relation::Within, bound, tolerance)
    }
}

impl fmt::Display for CheckRow {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "[{}] {}: {:.6e} {} {:.6e} (tol {:.3e})",
            if self.passed { "PASS" } else { "FAIL" },
            self.check,
            self.statistic,
            self.relation.symbol(),
            self.bound,
            self.tolerance
        )
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report {
    pub suite: String,
    pub rows: Vec<CheckRow>,
    /// Items left out, e.g. strata with too few draws.
    pub skipped: Vec<String>,
}

impl Report {
    pub fn new(suite: impl Into<String>) -> Self {
        Self {
            suite: suite.into(),
            rows: Vec::new(),
            skipped: Vec::new(),
        }
    }

    pub fn passed(&self) -> bool {
        !self.rows.is_empty() && self.rows.iter().all(|r| r.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &CheckRow> {
        self.rows.iter().filter(|r| !r.passed)
    }

    pub fn push(&mut self, row: CheckRow) {
        self.rows.push(row);
    }
}

impl fmt::Display for Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let failed = self.failures().count();
        writeln!(
            f,
            "== {} : {} checks, {} failed, {} skipped",
            self.suite,
            self.rows.len(),
            failed,
            self.skipped.len()
        )?;
        for row in &self.rows {
            writeln!(f, "{row}")?;
        }
        for s in &self.skipped {
            writeln!(f, "[SKIP] {s}")?;
        }
        Ok(())
    }
}

/// CSV with columns `suite,check,statistic,relation,bound,tolerance,pass`.
pub fn write_reports_csv<W: Write>(reports: &[Report], out: W) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record([
        "suite",
        "check",
        "statistic",
        "relation",
        "bound",
        "tolerance",
        "pass",
    ])?;
    for rep in reports {
        for row in &rep.rows {
            w.write_record([
                rep.suite.as_str(),
                row.check.as_str(),
                &format!("{:.11e}", row.statistic),
                row.relation.symbol(),
                &format!("{:.11e}", row.bound),
                &format!("{:.11e}", row.tolerance),
                if row.passed { "pass" } else { "fail" },
            ])?;
        }
    }
    w.flush()?;
    Ok(())
}
