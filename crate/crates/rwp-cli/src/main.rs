//! `rwp` — planar random-waypoint mobility traces and cellular
//! handover/sojourn analytics with Monte-Carlo cross-validation.

mod args;
mod output;

use args::{Cli, Command};
use clap::Parser;
use output::{sink, write_comparison, write_reports, write_sojourn_table, write_trace};
use rwp_core::harness::{
    hex_side_for_cell_area, loglog_slope, run_handover_experiment, run_model_comparison,
    run_pvt_handover_sweep, run_sojourn_experiment, HandoverOutcome, HarnessError, Metric,
    ModelComparisonConfig, NetworkSpec, RunReport, Scenario, SojournOutcome,
};
use rwp_core::models::{generate_rwp_trace, LevyParams, ModelError, Window};
use rwp_core::numerics::{NumericsError, RandomStream};
use rwp_core::voronoi::VoronoiError;
use rwp_core::Point;

fn main() {
    // clap itself exits with code 2 on usage errors.
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => {}
        // A reader closing the pipe (e.g. `rwp ... | head`) is not an error.
        Err(HarnessError::Io(e)) if e.kind() == std::io::ErrorKind::BrokenPipe => {}
        Err(err) => {
            eprintln!("error: {err}");
            std::process::exit(exit_code(&err));
        }
    }
}

/// Exit codes: 2 invalid arguments, 3 input-file errors, 4 numerical
/// convergence failures.
fn exit_code(err: &HarnessError) -> i32 {
    fn numerics_code(e: &NumericsError) -> i32 {
        match e {
            NumericsError::Convergence { .. } => 4,
            NumericsError::Domain(_) => 2,
        }
    }
    match err {
        HarnessError::Io(_)
        | HarnessError::ParseRow { .. }
        | HarnessError::TooFewRows(_)
        | HarnessError::DegenerateBoundingBox => 3,
        HarnessError::Numerics(e) => numerics_code(e),
        HarnessError::Voronoi(VoronoiError::Numerics(e)) => numerics_code(e),
        HarnessError::Voronoi(_) => 1,
        HarnessError::Analytics(rwp_core::analytics::AnalyticsError::Numerics(e)) => {
            numerics_code(e)
        }
        HarnessError::Model(_) | HarnessError::UnsupportedMobility(_) => 2,
        HarnessError::Analytics(_) => 2,
        HarnessError::SegmentRejection(_) => 1,
    }
}

fn analytic_row(metric: &str, value: f64, seed: u64) -> RunReport {
    RunReport {
        metric: metric.into(),
        mean: value,
        var: 0.0,
        reps: 0,
        ci95: 0.0,
        seed,
        analytic: None,
        wall_time_secs: 0.0,
    }
}

fn run(cli: Cli) -> Result<(), HarnessError> {
    match cli.command {
        Command::Trace(a) => {
            let mobility = a.mobility.build()?;
            let window = a.window()?;
            let start = match window {
                Window::Infinite => Point::ORIGIN,
                Window::Reflect { width, height } => Point::new(0.5 * width, 0.5 * height),
            };
            let mut stream = RandomStream::new(a.run.seed, 0);
            let trace =
                generate_rwp_trace(&mobility, start, a.periods, &window, &mut stream)?;
            let mut out = sink(a.run.out.as_deref())?;
            write_trace(&trace, a.run.format, &mut out)?;
            Ok(())
        }
        Command::Stats(a) => {
            let levy = LevyParams {
                alpha: a.alpha,
                beta: a.beta,
                l_min: a.lmin,
                l_max: a.lmax()?,
                s_min: a.smin,
                s_max: a.smax,
                velocity: a.mobility.velocity()?,
            };
            let config = ModelComparisonConfig {
                levy,
                pause: a.mobility.pause()?,
                window: a.window()?,
                n_periods: a.periods,
                master_seed: a.run.seed,
                length_grid: None,
                rate_grid: None,
            };
            let cmp = run_model_comparison(&config)?;
            let mut out = sink(a.run.out.as_deref())?;
            write_comparison(&cmp, a.run.format, &mut out)?;
            Ok(())
        }
        Command::Hex(a) => {
            let mobility = a.mobility.build()?;
            let scenario = Scenario {
                mobility,
                network: NetworkSpec::Hex { side: a.d },
                replications: a.run.reps,
                master_seed: a.run.seed,
                outputs: vec![if a.sojourn { Metric::Sojourn } else { Metric::Handover }],
            };
            let mut out = sink(a.run.out.as_deref())?;
            if a.sojourn {
                match run_sojourn_experiment(&scenario, a.grid, a.run.threads)? {
                    SojournOutcome::Hex { report, bounds } => {
                        let seed = report.seed;
                        let rows = vec![
                            report,
                            analytic_row("hex_sojourn_lower", bounds.lower, seed),
                            analytic_row("hex_sojourn_upper", bounds.upper, seed),
                        ];
                        write_reports(&rows, a.run.format, &mut out)?;
                    }
                    SojournOutcome::Pvt { .. } => unreachable!("hex network"),
                }
            } else {
                let HandoverOutcome { report, companions } =
                    run_handover_experiment(&scenario, a.run.threads)?;
                let seed = report.seed;
                let mut rows = vec![report];
                if let Some(approx) = companions.hex_approx {
                    rows.push(analytic_row("hex_approx", approx.expected, seed));
                    rows.push(analytic_row("hex_approx_lower", approx.lower, seed));
                    rows.push(analytic_row("hex_approx_upper", approx.upper, seed));
                }
                write_reports(&rows, a.run.format, &mut out)?;
            }
            Ok(())
        }
        Command::Pvt(a) => {
            let mobility = a.mobility.build()?;
            let scenario = Scenario {
                mobility,
                network: NetworkSpec::Ppp { mu: a.mu },
                replications: a.run.reps,
                master_seed: a.run.seed,
                outputs: vec![if a.sojourn { Metric::Sojourn } else { Metric::Handover }],
            };
            let mut out = sink(a.run.out.as_deref())?;
            if a.sojourn {
                match run_sojourn_experiment(&scenario, a.grid, a.run.threads)? {
                    SojournOutcome::Pvt { report, rows } => {
                        write_sojourn_table(&report, &rows, a.run.format, &mut out)?;
                    }
                    SojournOutcome::Hex { .. } => unreachable!("ppp network"),
                }
            } else {
                let HandoverOutcome { report, .. } =
                    run_handover_experiment(&scenario, a.run.threads)?;
                write_reports(&[report], a.run.format, &mut out)?;
            }
            Ok(())
        }
        Command::Deploy(a) => {
            let mobility = a.mobility.build()?;
            let deployment = rwp_core::harness::ingest_deployment(&a.file)?;
            let scenario = Scenario {
                mobility,
                network: NetworkSpec::Deployment {
                    path: a.file.clone(),
                },
                replications: a.run.reps,
                master_seed: a.run.seed,
                outputs: vec![Metric::Handover],
            };
            let HandoverOutcome { report, companions } =
                run_handover_experiment(&scenario, a.run.threads)?;
            let seed = report.seed;
            let mut rows = vec![report];
            if let Some(hex) = companions.hex_exact {
                rows.push(analytic_row("hex_exact", hex, seed));
            }
            if let Some(approx) = companions.hex_approx {
                rows.push(analytic_row("hex_approx", approx.expected, seed));
            }
            rows.push(analytic_row("deployment_mu", deployment.mu, seed));
            rows.push(analytic_row("deployment_hex_side", deployment.hex_side, seed));
            let mut out = sink(a.run.out.as_deref())?;
            write_reports(&rows, a.run.format, &mut out)?;
            Ok(())
        }
        Command::Sweep(a) => {
            let mobility = a.mobility.build()?;
            let mus = a.mu_values()?;
            let mut rows: Vec<(Option<f64>, RunReport)> = Vec::new();
            match a.network {
                args::SweepNetwork::Pvt => {
                    let points =
                        run_pvt_handover_sweep(mobility, &mus, a.run.reps, a.run.seed, a.run.threads)?;
                    for p in points {
                        rows.push((Some(p.mu), p.report));
                    }
                }
                args::SweepNetwork::Hex => {
                    for &mu in &mus {
                        let d = hex_side_for_cell_area(1.0 / mu);
                        let scenario = Scenario {
                            mobility,
                            network: NetworkSpec::Hex { side: d },
                            replications: a.run.reps,
                            master_seed: a.run.seed,
                            outputs: vec![Metric::Handover],
                        };
                        let outcome = run_handover_experiment(&scenario, a.run.threads)?;
                        rows.push((Some(mu), outcome.report));
                    }
                }
            }
            let slope = loglog_slope(
                &rows
                    .iter()
                    .map(|(mu, r)| (mu.unwrap(), r.mean))
                    .collect::<Vec<_>>(),
            );
            rows.push((
                None,
                analytic_row("loglog_slope", slope, a.run.seed),
            ));
            let mut out = sink(a.run.out.as_deref())?;
            output::write_sweep(&rows, a.run.format, &mut out)?;
            Ok(())
        }
    }
}

// Re-exported for the argument parser's validation errors.
pub(crate) fn invalid(msg: String) -> HarnessError {
    HarnessError::Model(ModelError::InvalidParameter(msg))
}
