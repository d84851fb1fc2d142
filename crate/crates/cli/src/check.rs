use anyhow::Result;
use pinch_core::check::{run_all, CheckOptions, CheckOutcome, CheckReport};
use pinch_core::threshold::ThresholdOptions;
use serde::{Deserialize, Serialize};

use crate::args::CheckArgs;
use crate::output::{emit, sig, CsvRow};
use crate::Status;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckRecord {
    pub name: String,
    pub passed: bool,
    /// Largest violation; `None` when the suite could not measure one.
    pub worst: Option<f64>,
    pub tolerance: f64,
    pub parameterized: bool,
    pub detail: String,
}

impl From<&CheckOutcome> for CheckRecord {
    fn from(o: &CheckOutcome) -> Self {
        Self {
            name: o.name.into(),
            passed: o.passed,
            worst: o.worst.is_finite().then_some(o.worst),
            tolerance: o.tolerance,
            parameterized: o.parameterized,
            detail: o.detail.clone(),
        }
    }
}

impl CsvRow for CheckRecord {
    const HEADER: &'static [&'static str] = &["name", "passed", "worst", "tolerance", "parameterized", "detail"];

    fn cells(&self) -> Vec<String> {
        vec![
            self.name.clone(),
            self.passed.to_string(),
            self.worst.map(sig).unwrap_or_else(|| "-".into()),
            sig(self.tolerance),
            self.parameterized.to_string(),
            self.detail.clone(),
        ]
    }
}

pub fn matrix(report: &CheckReport) -> String {
    let width = report.outcomes.iter().map(|o| o.name.len()).max().unwrap_or(0);
    let mut out = String::new();
    for o in &report.outcomes {
        let worst = if o.worst.is_finite() {
            format!("{:.3e}", o.worst)
        } else {
            "-".into()
        };
        out.push_str(&format!(
            "{:<width$}  {}  worst {:>10}  tol {:.0e}{}  {}\n",
            o.name,
            if o.passed { "PASS" } else { "FAIL" },
            worst,
            o.tolerance,
            if o.parameterized { "*" } else { " " },
            o.detail
        ));
    }
    out
}

#[derive(Debug, Serialize)]
pub struct CheckDocument {
    pub command: &'static str,
    pub all_passed: bool,
    pub outcomes: Vec<CheckRecord>,
}

pub fn run(args: &CheckArgs) -> Result<Status> {
    let options = CheckOptions {
        tol: args.tol,
        psi_perturbation: args.inject_psi_perturbation,
        dimensions: args.n.to_vec(),
        threshold: ThresholdOptions {
            scan_step: args.scan_step,
            ..ThresholdOptions::default()
        },
    };
    let report = run_all(&options);
    let table = matrix(&report);
    let document = CheckDocument {
        command: "check",
        all_passed: report.all_passed(),
        outcomes: report.outcomes.iter().map(CheckRecord::from).collect(),
    };

    // The matrix goes to stdout unless the data itself is being streamed there.
    if args.output.out.is_none() && args.output.format.is_some() {
        eprint!("{table}");
    } else {
        print!("{table}");
    }
    if args.output.out.is_some() || args.output.format.is_some() {
        emit(&args.output, &document.outcomes, &document)?;
    }

    if report.all_passed() {
        Ok(Status::Success)
    } else {
        let names: Vec<&str> = report.failures().map(|o| o.name).collect();
        Ok(Status::Failed(format!("failed checks: {}", names.join(", "))))
    }
}
