use anyhow::Result;
use pinch_core::threshold::{
    table1_report, Discrepancy, Table1Row, ThresholdOptions, ThresholdWarning, VariantVerdict, TABLE_MATCH_TOLERANCE,
};
use pinch_core::PsiVariant;
use serde::{Deserialize, Serialize};

use crate::args::Table1Args;
use crate::output::{emit, fixed5, opt, round5, round_sig, sig, CsvRow};
use crate::Status;

/// One output row; numbers are stored already rounded to their printed precision.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Table1Record {
    pub n: usize,
    pub delta_n_listing: Option<f64>,
    pub delta_n_proposition: Option<f64>,
    pub table1_value: Option<f64>,
    pub deviation_listing: Option<f64>,
    pub deviation_proposition: Option<f64>,
    /// `variant:count` pairs, e.g. `listing:1;proposition:0`.
    pub crossings: String,
    pub notes: String,
}

impl Table1Record {
    pub fn from_row(row: &Table1Row) -> Self {
        let field = |v: PsiVariant, f: fn(&pinch_core::threshold::VariantOutcome) -> Option<f64>| {
            row.outcome(v).and_then(f).map(round_sig)
        };
        let crossings = row
            .outcomes
            .iter()
            .map(|o| match o.crossing_count() {
                Some(c) => format!("{}:{c}", o.variant),
                None => format!("{}:error", o.variant),
            })
            .collect::<Vec<_>>()
            .join(";");
        let notes = row
            .outcomes
            .iter()
            .filter_map(|o| {
                if let Some(e) = &o.error {
                    Some(format!("{}: {e}", o.variant))
                } else if o.threshold.as_ref().and_then(|t| t.warning) == Some(ThresholdWarning::MultipleCrossings) {
                    Some(format!(
                        "{}: several crossings on the grid, the first one is used",
                        o.variant
                    ))
                } else {
                    None
                }
            })
            .collect::<Vec<_>>()
            .join("; ");
        Self {
            n: row.n,
            delta_n_listing: field(PsiVariant::Listing, |o| o.delta_n()),
            delta_n_proposition: field(PsiVariant::Proposition, |o| o.delta_n()),
            table1_value: row.table_value.map(round5),
            deviation_listing: field(PsiVariant::Listing, |o| o.deviation),
            deviation_proposition: field(PsiVariant::Proposition, |o| o.deviation),
            crossings,
            notes,
        }
    }
}

impl CsvRow for Table1Record {
    const HEADER: &'static [&'static str] = &[
        "n",
        "delta_n_listing",
        "delta_n_proposition",
        "table1_value",
        "deviation_listing",
        "deviation_proposition",
        "crossings",
        "notes",
    ];

    fn cells(&self) -> Vec<String> {
        vec![
            self.n.to_string(),
            opt(self.delta_n_listing, sig),
            opt(self.delta_n_proposition, sig),
            opt(self.table1_value, fixed5),
            opt(self.deviation_listing, sig),
            opt(self.deviation_proposition, sig),
            self.crossings.clone(),
            self.notes.clone(),
        ]
    }
}

pub fn parse_csv(bytes: &[u8]) -> Result<Vec<Table1Record>> {
    Ok(csv::Reader::from_reader(bytes)
        .deserialize()
        .collect::<Result<_, _>>()?)
}

#[derive(Debug, Serialize)]
pub struct Table1Parameters {
    pub n_min: usize,
    pub n_max: usize,
    pub variants: Vec<PsiVariant>,
    pub tol: f64,
    pub scan_step: f64,
    pub integration_tol: f64,
    pub match_tolerance: f64,
}

#[derive(Debug, Serialize)]
pub struct Table1Document {
    pub command: &'static str,
    pub parameters: Table1Parameters,
    pub rows: Vec<Table1Record>,
    pub verdicts: Vec<VariantVerdict>,
    pub matching_variants: Vec<PsiVariant>,
    /// Rows outside tolerance, listed only when no variant matches the table.
    pub discrepancies: Vec<Discrepancy>,
    pub fallback_holds: bool,
}

pub fn run(args: &Table1Args) -> Result<Status> {
    let dims = args.n.to_vec();
    let variants = args.variant.variants();
    let options = ThresholdOptions {
        tol: args.tol,
        scan_step: args.scan_step,
        ..ThresholdOptions::default()
    };
    let report = table1_report(&dims, &variants, &options);
    let rows: Vec<Table1Record> = report.rows.iter().map(Table1Record::from_row).collect();

    for v in &report.verdicts {
        let dev = v
            .max_abs_deviation
            .map(|d| format!("{d:.2e}"))
            .unwrap_or_else(|| "n/a".into());
        eprintln!(
            "{}: {}/{} rows computed, max |δ − table| = {dev}, {}",
            v.variant,
            v.rows_computed,
            report.rows.len(),
            if v.matches_table {
                "matches the table"
            } else {
                "does not match the table"
            }
        );
    }
    let reference_rows = report.rows.iter().any(|r| r.table_value.is_some());
    if reference_rows && report.matching_variants.is_empty() {
        eprintln!(
            "no variant within {TABLE_MATCH_TOLERANCE} of every published row; fallback criterion {}",
            if report.fallback_holds() { "holds" } else { "fails" }
        );
    }

    let failed: Vec<usize> = report.rows.iter().filter(|r| !r.has_result()).map(|r| r.n).collect();
    let document = Table1Document {
        command: "table1",
        parameters: Table1Parameters {
            n_min: *args.n.0.start(),
            n_max: *args.n.0.end(),
            variants,
            tol: options.tol,
            scan_step: options.scan_step,
            integration_tol: options.integration_tol,
            match_tolerance: TABLE_MATCH_TOLERANCE,
        },
        fallback_holds: report.fallback_holds(),
        rows,
        verdicts: report.verdicts,
        matching_variants: report.matching_variants,
        discrepancies: report.discrepancies,
    };
    emit(&args.output, &document.rows, &document)?;

    Ok(if failed.is_empty() {
        Status::Success
    } else {
        Status::Failed(format!("no threshold under any requested variant for n = {failed:?}"))
    })
}
