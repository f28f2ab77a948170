//! CSV emission and parsing for benchmark rows. Reals are written with 17
//! significant digits, so a parse of an emitted file gives back the same bits.

use std::path::Path;

use super::{Experiment, RipProbeRow, SummaryRow, TrialRecord};
use crate::error::{Error, Result};
use crate::model::format_real;

const RECORD_HEADER: [&str; 13] = [
    "experiment",
    "algorithm",
    "t",
    "trial",
    "seed",
    "relative_error",
    "success",
    "runtime",
    "iterations_run",
    "stop_reason",
    "error_l2",
    "optimal_error",
    "invariant_violations",
];

const SUMMARY_HEADER: [&str; 8] = [
    "algorithm",
    "t",
    "success_probability",
    "mean_relative_error",
    "mean_runtime",
    "trials",
    "mean_error_l2",
    "mean_optimal_error",
];

const RIP_HEADER: [&str; 7] = ["trial", "seed", "order", "delta", "method", "subsets", "growth_law_holds"];

fn to_string_with<T>(header: &[&str], rows: &[T], fields: impl Fn(&T) -> Vec<String>) -> String {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new());
    // Writing into a Vec cannot fail.
    w.write_record(header).expect("in-memory write");
    for row in rows {
        w.write_record(fields(row)).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 fields")
}

fn write_file(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).map_err(|e| Error::io(path, e))
}

fn read_file(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::io(path, e))
}

pub fn records_to_string(records: &[TrialRecord]) -> String {
    to_string_with(&RECORD_HEADER, records, |r| {
        vec![
            r.experiment.tag().to_string(),
            r.algorithm.clone(),
            r.t.to_string(),
            r.trial.to_string(),
            r.seed.to_string(),
            format_real(r.relative_error),
            r.success.to_string(),
            format_real(r.runtime),
            r.iterations_run.to_string(),
            r.stop_reason.clone(),
            format_real(r.error_l2),
            format_real(r.optimal_error),
            r.invariant_violations.to_string(),
        ]
    })
}

pub fn summaries_to_string(rows: &[SummaryRow]) -> String {
    to_string_with(&SUMMARY_HEADER, rows, |s| {
        vec![
            s.algorithm.clone(),
            s.t.to_string(),
            format_real(s.success_probability),
            format_real(s.mean_relative_error),
            format_real(s.mean_runtime),
            s.trials.to_string(),
            format_real(s.mean_error_l2),
            format_real(s.mean_optimal_error),
        ]
    })
}

pub fn rip_rows_to_string(rows: &[RipProbeRow]) -> String {
    to_string_with(&RIP_HEADER, rows, |r| {
        vec![
            r.trial.to_string(),
            r.seed.to_string(),
            r.order.to_string(),
            format_real(r.delta),
            r.method.clone(),
            r.subsets.to_string(),
            r.growth_law_holds.to_string(),
        ]
    })
}

pub fn write_records(path: &Path, records: &[TrialRecord]) -> Result<()> {
    write_file(path, &records_to_string(records))
}

pub fn write_summaries(path: &Path, rows: &[SummaryRow]) -> Result<()> {
    write_file(path, &summaries_to_string(rows))
}

pub fn write_rip_rows(path: &Path, rows: &[RipProbeRow]) -> Result<()> {
    write_file(path, &rip_rows_to_string(rows))
}

/// Parses rows after checking the header; `source` names the input in errors.
fn parse_with<T>(
    text: &str,
    source: &Path,
    header: &[&str],
    row: impl Fn(&Fields<'_>) -> std::result::Result<T, String>,
) -> Result<Vec<T>> {
    let mut reader = csv::ReaderBuilder::new().from_reader(text.as_bytes());
    let found = reader
        .headers()
        .map_err(|e| Error::parse(source, e.to_string()))?
        .clone();
    if found.iter().ne(header.iter().copied()) {
        return Err(Error::parse(
            source,
            format!("unexpected header {:?}", found.iter().collect::<Vec<_>>()),
        ));
    }
    let mut out = Vec::new();
    for (i, rec) in reader.records().enumerate() {
        let rec = rec.map_err(|e| Error::parse(source, e.to_string()))?;
        let fields = Fields(&rec);
        out.push(row(&fields).map_err(|m| Error::parse(source, format!("row {}: {m}", i + 1)))?);
    }
    Ok(out)
}

struct Fields<'a>(&'a csv::StringRecord);

impl Fields<'_> {
    fn str(&self, i: usize) -> std::result::Result<&str, String> {
        self.0.get(i).ok_or_else(|| format!("missing field {i}"))
    }

    fn parse<T: std::str::FromStr>(&self, i: usize) -> std::result::Result<T, String> {
        let s = self.str(i)?;
        s.parse().map_err(|_| format!("cannot parse field {i}: {s:?}"))
    }
}

pub fn parse_records(text: &str) -> Result<Vec<TrialRecord>> {
    parse_records_from(text, Path::new("<records>"))
}

fn parse_records_from(text: &str, source: &Path) -> Result<Vec<TrialRecord>> {
    parse_with(text, source, &RECORD_HEADER, |f| {
        Ok(TrialRecord {
            experiment: f.str(0)?.parse::<Experiment>().map_err(|e| e.to_string())?,
            algorithm: f.str(1)?.to_string(),
            t: f.parse(2)?,
            trial: f.parse(3)?,
            seed: f.parse(4)?,
            relative_error: f.parse(5)?,
            success: f.parse(6)?,
            runtime: f.parse(7)?,
            iterations_run: f.parse(8)?,
            stop_reason: f.str(9)?.to_string(),
            error_l2: f.parse(10)?,
            optimal_error: f.parse(11)?,
            invariant_violations: f.parse(12)?,
        })
    })
}

pub fn parse_summaries(text: &str) -> Result<Vec<SummaryRow>> {
    parse_summaries_from(text, Path::new("<summaries>"))
}

fn parse_summaries_from(text: &str, source: &Path) -> Result<Vec<SummaryRow>> {
    parse_with(text, source, &SUMMARY_HEADER, |f| {
        Ok(SummaryRow {
            algorithm: f.str(0)?.to_string(),
            t: f.parse(1)?,
            success_probability: f.parse(2)?,
            mean_relative_error: f.parse(3)?,
            mean_runtime: f.parse(4)?,
            trials: f.parse(5)?,
            mean_error_l2: f.parse(6)?,
            mean_optimal_error: f.parse(7)?,
        })
    })
}

pub fn parse_rip_rows(text: &str) -> Result<Vec<RipProbeRow>> {
    parse_with(text, Path::new("<rip rows>"), &RIP_HEADER, |f| {
        Ok(RipProbeRow {
            trial: f.parse(0)?,
            seed: f.parse(1)?,
            order: f.parse(2)?,
            delta: f.parse(3)?,
            method: f.str(4)?.to_string(),
            subsets: f.parse(5)?,
            growth_law_holds: f.parse(6)?,
        })
    })
}

pub fn read_records(path: &Path) -> Result<Vec<TrialRecord>> {
    parse_records_from(&read_file(path)?, path)
}

pub fn read_summaries(path: &Path) -> Result<Vec<SummaryRow>> {
    parse_summaries_from(&read_file(path)?, path)
}
