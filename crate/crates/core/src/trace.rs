//! CSV trace files: one row per recorded iteration, floats at 17 significant digits.

use std::io::{Read, Write};

use thiserror::Error;

use crate::solver::IterationRecord;

#[derive(Debug, Error)]
pub enum TraceError {
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error("unexpected trace header: {0}")]
    Header(String),
    #[error("row {row}: cannot parse column {column}: {value:?}")]
    Parse {
        row: usize,
        column: String,
        value: String,
    },
}

pub fn header(n_terms: usize) -> Vec<String> {
    let mut h: Vec<String> = [
        "k",
        "eta",
        "beta",
        "f_value",
        "g_smoothed_total",
        "F_beta",
        "F_or_nan",
    ]
    .iter()
    .map(|s| s.to_string())
    .collect();
    h.extend((1..=n_terms).map(|j| format!("feas_gap_{j}")));
    h.push("lmo_inner_iters".into());
    h.push("elapsed_ms".into());
    h
}

fn float(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn write_trace<W: Write>(
    out: W,
    trace: &[IterationRecord],
    n_terms: usize,
) -> Result<(), TraceError> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(header(n_terms))?;
    for r in trace {
        let mut row = vec![
            r.k.to_string(),
            float(r.eta),
            float(r.beta),
            float(r.f_value),
            float(r.g_smoothed_total),
            float(r.f_beta),
            float(r.f_or_nan),
        ];
        row.extend(r.feas_gaps.iter().map(|&g| float(g)));
        row.push(r.lmo_inner_iters.to_string());
        row.push(float(r.elapsed_ms));
        w.write_record(&row)?;
    }
    w.flush().map_err(csv::Error::from)?;
    Ok(())
}

pub fn read_trace<R: Read>(input: R) -> Result<Vec<IterationRecord>, TraceError> {
    let mut rd = csv::Reader::from_reader(input);
    let head: Vec<String> = rd.headers()?.iter().map(str::to_string).collect();
    if head.len() < 9 {
        return Err(TraceError::Header(head.join(",")));
    }
    let n_terms = head.len() - 9;
    if head != header(n_terms) {
        return Err(TraceError::Header(head.join(",")));
    }
    let mut out = Vec::new();
    for (row, rec) in rd.records().enumerate() {
        let rec = rec?;
        let get = |i: usize| rec.get(i).unwrap_or("");
        let f = |i: usize| -> Result<f64, TraceError> {
            get(i).parse::<f64>().map_err(|_| TraceError::Parse {
                row,
                column: head[i].clone(),
                value: get(i).to_string(),
            })
        };
        let u = |i: usize| -> Result<usize, TraceError> {
            get(i).parse::<usize>().map_err(|_| TraceError::Parse {
                row,
                column: head[i].clone(),
                value: get(i).to_string(),
            })
        };
        let feas_gaps = (0..n_terms)
            .map(|j| f(7 + j))
            .collect::<Result<Vec<_>, _>>()?;
        out.push(IterationRecord {
            k: u(0)?,
            eta: f(1)?,
            beta: f(2)?,
            f_value: f(3)?,
            g_smoothed_total: f(4)?,
            f_beta: f(5)?,
            f_or_nan: f(6)?,
            feas_gaps,
            lmo_inner_iters: u(7 + n_terms)?,
            elapsed_ms: f(8 + n_terms)?,
        });
    }
    Ok(out)
}
