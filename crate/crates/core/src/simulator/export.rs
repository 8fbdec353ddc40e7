//! CSV and JSON export of traces and run results.

use crate::error::Result;
use crate::types::{RunResult, TraceEntry};
use std::io::Write;

pub const TRACE_HEADER: [&str; 10] = [
    "run_id",
    "algorithm",
    "seed",
    "m",
    "r",
    "k",
    "z",
    "prog",
    "s_budget",
    "query_norm",
];

pub fn write_trace_header<W: Write>(w: &mut csv::Writer<W>) -> Result<()> {
    w.write_record(TRACE_HEADER).map_err(csv_err)
}

pub fn write_trace_rows<W: Write>(
    w: &mut csv::Writer<W>,
    run_id: &str,
    algorithm: &str,
    seed: u64,
    trace: &[TraceEntry],
) -> Result<()> {
    for e in trace {
        let z = e.z.map(|z| z.to_string()).unwrap_or_default();
        w.write_record([
            run_id.to_string(),
            algorithm.to_string(),
            seed.to_string(),
            e.machine.to_string(),
            e.round.to_string(),
            e.k.to_string(),
            z,
            e.prog.to_string(),
            e.s_budget.to_string(),
            e.query.norm().to_string(),
        ])
        .map_err(csv_err)?;
    }
    Ok(())
}

/// Whole trace as CSV text, header included.
pub fn trace_csv(run_id: &str, algorithm: &str, seed: u64, trace: &[TraceEntry]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    write_trace_header(&mut w)?;
    write_trace_rows(&mut w, run_id, algorithm, seed, trace)?;
    let bytes = w
        .into_inner()
        .map_err(|e| crate::error::Error::Io(e.into_error()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

pub fn run_result_json(result: &RunResult) -> Result<String> {
    Ok(serde_json::to_string_pretty(result)?)
}

pub(crate) fn csv_err(e: csv::Error) -> crate::error::Error {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => crate::error::Error::Io(io),
        other => crate::error::Error::Io(std::io::Error::other(format!("{other:?}"))),
    }
}
