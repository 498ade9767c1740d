//! Result tables written after a classification run.

use std::collections::{BTreeMap, BTreeSet};
use std::path::{Path, PathBuf};

use catsd_core::engine::AssignmentReport;
use catsd_core::Exact;
use serde::{Deserialize, Serialize};

use crate::bundle::{write_atomic, BundleError};
use crate::table::{Cell, Sheet};

pub const ASSIGNMENTS: &str = "assignments.csv";
pub const MAX_LIKENESS: &str = "max_likeness.csv";
pub const REFERENCE_LIKENESS: &str = "reference_likeness.csv";
pub const TRACES: &str = "traces.json";

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Detail {
    #[default]
    Summary,
    Full,
}

/// Two decimals, half away from zero.
pub fn two_decimals(x: f64) -> String {
    match Exact::from_f64(x) {
        Some(e) => format!("{:.2}", e.round_dp(2).to_f64()),
        None => x.to_string(),
    }
}

/// Membership matrix: one column per category plus the dummy column, `1` for member.
pub fn assignments(report: &AssignmentReport) -> Sheet {
    let mut sheet = Sheet::new(
        std::iter::once("action".to_owned())
            .chain(report.categories.iter().map(|c| c.name.clone()))
            .chain(std::iter::once(report.dummy_category_name.clone())),
    );
    let flag = |b: bool| Cell::from(if b { "1" } else { "0" });
    for a in &report.actions {
        let mut row = vec![Cell::from(a.action.as_str())];
        row.extend(a.categories.iter().map(|c| flag(c.accepted)));
        row.push(flag(a.assigned_to_dummy));
        sheet.push(row);
    }
    sheet
}

/// `δ(a, B_h)` per category.
pub fn max_likeness(report: &AssignmentReport) -> Sheet {
    let mut sheet =
        Sheet::new(std::iter::once("action".to_owned()).chain(report.categories.iter().map(|c| c.name.clone())));
    for a in &report.actions {
        let mut row = vec![Cell::from(a.action.as_str())];
        row.extend(a.categories.iter().map(|c| Cell::from(two_decimals(c.likeness))));
        sheet.push(row);
    }
    sheet
}

/// `δ(a, b)` for every reference action; headers are qualified by category only when ids repeat.
pub fn reference_likeness(report: &AssignmentReport) -> Sheet {
    let Some(first) = report.actions.first() else {
        return Sheet::new(["action"]);
    };
    let refs: Vec<(String, String)> = first
        .categories
        .iter()
        .flat_map(|c| {
            c.comparisons
                .iter()
                .map(move |t| (c.category.to_string(), t.reference.to_string()))
        })
        .collect();
    let mut seen = BTreeSet::new();
    let repeated: BTreeSet<&str> = refs
        .iter()
        .filter(|(_, r)| !seen.insert(r.as_str()))
        .map(|(_, r)| r.as_str())
        .collect();
    let headers = refs.iter().map(|(c, r)| {
        if repeated.contains(r.as_str()) {
            format!("{c}/{r}")
        } else {
            r.clone()
        }
    });
    let mut sheet = Sheet::new(std::iter::once("action".to_owned()).chain(headers));
    for a in &report.actions {
        let mut row = vec![Cell::from(a.action.as_str())];
        row.extend(
            a.categories
                .iter()
                .flat_map(|c| c.comparisons.iter().map(|t| Cell::from(two_decimals(t.likeness)))),
        );
        sheet.push(row);
    }
    sheet
}

pub fn result_files(report: &AssignmentReport, detail: Detail) -> BTreeMap<String, Vec<u8>> {
    let mut files = BTreeMap::new();
    files.insert(ASSIGNMENTS.to_owned(), assignments(report).to_csv());
    if detail == Detail::Full {
        files.insert(MAX_LIKENESS.to_owned(), max_likeness(report).to_csv());
        files.insert(REFERENCE_LIKENESS.to_owned(), reference_likeness(report).to_csv());
        let mut traces = serde_json::to_vec_pretty(report).expect("serializable");
        traces.push(b'\n');
        files.insert(TRACES.to_owned(), traces);
    }
    files
}

pub fn write_results(report: &AssignmentReport, detail: Detail, dir: &Path) -> Result<Vec<PathBuf>, BundleError> {
    let mut written = Vec::new();
    for (name, data) in result_files(report, detail) {
        let path = dir.join(name);
        write_atomic(&path, &data)?;
        written.push(path);
    }
    Ok(written)
}
