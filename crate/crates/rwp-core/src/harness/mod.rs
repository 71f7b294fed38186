//! Scenario configuration, the Monte-Carlo engine with confidence
//! intervals, deployment ingestion, and the figure-style experiments the
//! CLI exposes.

mod experiments;
mod ingest;

pub use experiments::{
    calibrate_lambda, hex_side_for_cell_area, loglog_slope, run_handover_experiment,
    run_model_comparison, run_pvt_handover_sweep, run_sojourn_experiment, AnalyticCompanions,
    ComparisonRow, HandoverOutcome, ModelComparison, ModelComparisonConfig, SojournOutcome,
    SojournRow, SweepPoint,
};
pub use ingest::{ingest_deployment, Deployment};

use crate::analytics::AnalyticsError;
use crate::models::{MobilityParams, ModelError};
use crate::numerics::{NumericsError, RandomStream};
use crate::voronoi::VoronoiError;
use rayon::prelude::*;
use serde::Serialize;
use std::io::Write;
use std::path::PathBuf;

#[derive(Debug, thiserror::Error)]
pub enum HarnessError {
    #[error("unsupported mobility for sojourn analysis: {0}")]
    UnsupportedMobility(String),
    #[error("input file error: {0}")]
    Io(#[from] std::io::Error),
    #[error("line {line}: cannot parse {content:?} as x,y")]
    ParseRow { line: usize, content: String },
    #[error("deployment file needs at least two parseable rows, found {0}")]
    TooFewRows(usize),
    #[error("deployment bounding box is degenerate; points span no area")]
    DegenerateBoundingBox,
    #[error("could not draw a movement period inside the observation window after {0} attempts")]
    SegmentRejection(usize),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Analytics(#[from] AnalyticsError),
    #[error(transparent)]
    Voronoi(#[from] VoronoiError),
    #[error(transparent)]
    Numerics(#[from] NumericsError),
}

/// Network layout under study.
#[derive(Clone, Debug)]
pub enum NetworkSpec {
    /// Hexagonal tessellation with the given side length.
    Hex { side: f64 },
    /// Poisson point process of the given intensity.
    Ppp { mu: f64 },
    /// Real deployment read from a CSV of `x,y` rows.
    Deployment { path: PathBuf },
}

/// Metrics an experiment can produce.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Metric {
    Handover,
    Sojourn,
}

/// A fully specified experiment: mobility law, network layout, replication
/// count and master seed. Reports are pure functions of a scenario.
#[derive(Clone, Debug)]
pub struct Scenario {
    pub mobility: MobilityParams,
    pub network: NetworkSpec,
    pub replications: usize,
    pub master_seed: u64,
    pub outputs: Vec<Metric>,
}

/// Monte-Carlo estimate bundle. `ci95` is the normal-approximation
/// half-width `1.96·sqrt(var/reps)`; unreliable below a few dozen
/// replications, and every acceptance run uses thousands.
#[derive(Clone, Debug, Serialize)]
pub struct RunReport {
    pub metric: String,
    pub mean: f64,
    pub var: f64,
    pub reps: usize,
    pub ci95: f64,
    pub seed: u64,
    pub analytic: Option<f64>,
    #[serde(skip)]
    pub wall_time_secs: f64,
}

/// Runs `replications` independent simulations, one RandomStream per
/// replication keyed by `(master_seed, index)`. Results come back in
/// replication order no matter how many worker threads run, so the
/// downstream reduction is deterministic.
pub fn replicate<F>(
    replications: usize,
    master_seed: u64,
    threads: Option<usize>,
    sim: F,
) -> Vec<f64>
where
    F: Fn(u64, &mut RandomStream) -> f64 + Sync,
{
    let run = |i: usize| {
        let mut stream = RandomStream::new(master_seed, i as u64);
        sim(i as u64, &mut stream)
    };
    match threads {
        Some(1) => (0..replications).map(run).collect(),
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .expect("thread pool")
            .install(|| (0..replications).into_par_iter().map(run).collect()),
        None => (0..replications).into_par_iter().map(run).collect(),
    }
}

#[derive(Clone, Copy, Debug)]
pub struct McEstimate {
    pub mean: f64,
    pub var: f64,
    pub n: usize,
}

impl McEstimate {
    pub fn ci95(&self) -> f64 {
        if self.n < 2 {
            return 0.0;
        }
        1.96 * (self.var / self.n as f64).sqrt()
    }

    pub fn into_report(
        self,
        metric: impl Into<String>,
        seed: u64,
        analytic: Option<f64>,
        wall_time_secs: f64,
    ) -> RunReport {
        RunReport {
            metric: metric.into(),
            mean: self.mean,
            var: self.var,
            reps: self.n,
            ci95: self.ci95(),
            seed,
            analytic,
            wall_time_secs,
        }
    }
}

/// Mean and sample variance by a single ordered Welford pass.
pub fn estimate(values: &[f64]) -> McEstimate {
    let mut mean = 0.0f64;
    let mut m2 = 0.0f64;
    for (i, &v) in values.iter().enumerate() {
        let n = (i + 1) as f64;
        let delta = v - mean;
        mean += delta / n;
        m2 += delta * (v - mean);
    }
    let n = values.len();
    McEstimate {
        mean,
        var: if n > 1 { m2 / (n as f64 - 1.0) } else { 0.0 },
        n,
    }
}

/// CSV rows with the report schema `metric,mean,var,reps,ci95,seed,analytic`.
pub fn write_reports_csv<W: Write>(reports: &[RunReport], w: &mut W) -> std::io::Result<()> {
    writeln!(w, "metric,mean,var,reps,ci95,seed,analytic")?;
    for r in reports {
        let analytic = r.analytic.map(|a| a.to_string()).unwrap_or_default();
        writeln!(
            w,
            "{},{},{},{},{},{},{}",
            r.metric, r.mean, r.var, r.reps, r.ci95, r.seed, analytic
        )?;
    }
    Ok(())
}

/// JSON report array with the schema
/// `{metric, mean, var, reps, ci95, seed, analytic}`.
pub fn write_reports_json<W: Write>(reports: &[RunReport], w: &mut W) -> std::io::Result<()> {
    serde_json::to_writer_pretty(&mut *w, reports)?;
    writeln!(w)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn estimate_matches_two_pass_formulas() {
        let values = [1.0, 2.0, 4.0, 8.0];
        let e = estimate(&values);
        assert!((e.mean - 3.75).abs() < 1e-15);
        let mean = 3.75;
        let var: f64 =
            values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / 3.0;
        assert!((e.var - var).abs() < 1e-14);
        assert!((e.ci95() - 1.96 * (var / 4.0).sqrt()).abs() < 1e-14);
    }

    #[test]
    fn replicate_is_order_stable_across_thread_counts() {
        let sim = |_i: u64, s: &mut RandomStream| s.next_f64();
        let one = replicate(500, 99, Some(1), sim);
        let four = replicate(500, 99, Some(4), sim);
        let auto = replicate(500, 99, None, sim);
        assert_eq!(one, four);
        assert_eq!(one, auto);
    }

    #[test]
    fn report_json_schema() {
        let r = RunReport {
            metric: "handovers_per_period".into(),
            mean: 0.5,
            var: 0.25,
            reps: 100,
            ci95: 0.098,
            seed: 7,
            analytic: Some(0.49),
            wall_time_secs: 123.0,
        };
        let json = serde_json::to_string(&r).unwrap();
        let mut last = 0;
        for key in ["metric", "mean", "var", "reps", "ci95", "seed", "analytic"] {
            let pos = json
                .find(&format!("\"{key}\""))
                .unwrap_or_else(|| panic!("missing key {key}"));
            assert!(pos > last || key == "metric", "key {key} out of order");
            last = pos;
        }
        assert!(!json.contains("wall_time"));
    }
}
