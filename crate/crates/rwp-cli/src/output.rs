//! Output rendering: CSV tables and JSON documents, written to a file or
//! stdout. Formatting is deterministic so identical scenarios produce
//! byte-identical files.

use crate::args::Format;
use rwp_core::harness::{
    write_reports_csv, write_reports_json, HarnessError, ModelComparison, RunReport, SojournRow,
};
use rwp_core::models::Trace;
use serde_json::json;
use std::io::Write;
use std::path::Path;

pub fn sink(path: Option<&Path>) -> Result<Box<dyn Write>, HarnessError> {
    Ok(match path {
        Some(p) => Box::new(std::io::BufWriter::new(std::fs::File::create(p)?)),
        None => Box::new(std::io::stdout().lock()),
    })
}

pub fn write_trace<W: Write>(
    trace: &Trace,
    format: Format,
    out: &mut W,
) -> Result<(), HarnessError> {
    match format {
        Format::Csv => trace.write_csv(out)?,
        Format::Json => {
            let records: Vec<_> = trace
                .periods
                .iter()
                .map(|p| {
                    json!({
                        "period": p.period,
                        "x0": p.start.x,
                        "y0": p.start.y,
                        "x1": p.end.x,
                        "y1": p.end.y,
                        "velocity": p.velocity,
                        "pause": p.pause,
                    })
                })
                .collect();
            serde_json::to_writer_pretty(&mut *out, &records)
                .map_err(std::io::Error::other)?;
            writeln!(out)?;
        }
    }
    Ok(())
}

pub fn write_reports<W: Write>(
    reports: &[RunReport],
    format: Format,
    out: &mut W,
) -> Result<(), HarnessError> {
    match format {
        Format::Csv => write_reports_csv(reports, out)?,
        Format::Json => write_reports_json(reports, out)?,
    }
    Ok(())
}

pub fn write_sojourn_table<W: Write>(
    report: &RunReport,
    rows: &[SojournRow],
    format: Format,
    out: &mut W,
) -> Result<(), HarnessError> {
    match format {
        Format::Csv => {
            writeln!(out, "t,pdf,cdf,empirical_cdf")?;
            for r in rows {
                writeln!(out, "{},{},{},{}", r.t, r.pdf, r.cdf, r.empirical_cdf)?;
            }
        }
        Format::Json => {
            let doc = json!({
                "report": report,
                "table": rows
                    .iter()
                    .map(|r| json!({
                        "t": r.t,
                        "pdf": r.pdf,
                        "cdf": r.cdf,
                        "empirical_cdf": r.empirical_cdf,
                    }))
                    .collect::<Vec<_>>(),
            });
            serde_json::to_writer_pretty(&mut *out, &doc).map_err(std::io::Error::other)?;
            writeln!(out)?;
        }
    }
    Ok(())
}

pub fn write_comparison<W: Write>(
    cmp: &ModelComparison,
    format: Format,
    out: &mut W,
) -> Result<(), HarnessError> {
    match format {
        Format::Csv => {
            writeln!(out, "table,x,proposed,classical,levy")?;
            for r in &cmp.length_ccdf {
                writeln!(
                    out,
                    "length_ccdf,{},{},{},{}",
                    r.x, r.proposed, r.classical, r.levy
                )?;
            }
            for r in &cmp.switch_rate_ccdf {
                writeln!(
                    out,
                    "switch_rate_ccdf,{},{},{},{}",
                    r.x, r.proposed, r.classical, r.levy
                )?;
            }
        }
        Format::Json => {
            let row = |r: &rwp_core::harness::ComparisonRow| {
                json!({
                    "x": r.x,
                    "proposed": r.proposed,
                    "classical": r.classical,
                    "levy": r.levy,
                })
            };
            let doc = json!({
                "lambda": cmp.lambda,
                "levy_mean_length": cmp.levy_mean_length,
                "length_ccdf": cmp.length_ccdf.iter().map(row).collect::<Vec<_>>(),
                "switch_rate_ccdf": cmp.switch_rate_ccdf.iter().map(row).collect::<Vec<_>>(),
            });
            serde_json::to_writer_pretty(&mut *out, &doc).map_err(std::io::Error::other)?;
            writeln!(out)?;
        }
    }
    Ok(())
}

pub fn write_sweep<W: Write>(
    rows: &[(Option<f64>, RunReport)],
    format: Format,
    out: &mut W,
) -> Result<(), HarnessError> {
    match format {
        Format::Csv => {
            writeln!(out, "metric,mu,mean,var,reps,ci95,seed,analytic")?;
            for (mu, r) in rows {
                let mu = mu.map(|m| m.to_string()).unwrap_or_default();
                let analytic = r.analytic.map(|a| a.to_string()).unwrap_or_default();
                writeln!(
                    out,
                    "{},{},{},{},{},{},{},{}",
                    r.metric, mu, r.mean, r.var, r.reps, r.ci95, r.seed, analytic
                )?;
            }
        }
        Format::Json => {
            let doc: Vec<_> = rows
                .iter()
                .map(|(mu, r)| {
                    json!({
                        "metric": r.metric,
                        "mu": mu,
                        "mean": r.mean,
                        "var": r.var,
                        "reps": r.reps,
                        "ci95": r.ci95,
                        "seed": r.seed,
                        "analytic": r.analytic,
                    })
                })
                .collect();
            serde_json::to_writer_pretty(&mut *out, &doc).map_err(std::io::Error::other)?;
            writeln!(out)?;
        }
    }
    Ok(())
}
