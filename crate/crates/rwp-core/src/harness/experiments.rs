//! The experiments behind the CLI: handover Monte-Carlo with analytic
//! companions, sojourn analytics and simulation, intensity sweeps, and the
//! three-way mobility-model comparison.

use super::{estimate, ingest_deployment, replicate, HarnessError, NetworkSpec, RunReport, Scenario};
use crate::analytics::mean_transition_time;
use crate::geom::{Point, Rect, Segment};
use crate::hexgrid::{
    expected_handovers_approx, expected_handovers_exact, sojourn_time_hex, HandoverApprox,
    HexGrid, SojournHex,
};
use crate::models::{
    empirical_stats, generate_classical_rwp_trace, generate_levy_trace, generate_rwp_trace,
    sample_transition_length, LevyParams, MobilityParams, PauseLaw, VelocityLaw, Window,
};
use crate::numerics::{q_raw, RandomStream};
use crate::voronoi::{
    count_voronoi_crossings, expected_handovers_pvt, first_boundary_hit, sample_ppp,
    sojourn_distribution_pvt,
};
use std::f64::consts::PI;
use std::time::Instant;

/// Analytic values reported next to a Monte-Carlo handover estimate.
#[derive(Clone, Copy, Debug, Default)]
pub struct AnalyticCompanions {
    pub hex_exact: Option<f64>,
    pub hex_approx: Option<HandoverApprox>,
    pub pvt: Option<f64>,
}

#[derive(Clone, Debug)]
pub struct HandoverOutcome {
    pub report: RunReport,
    pub companions: AnalyticCompanions,
}

/// Uniform point in the origin-centered hexagon, by rejection from its
/// bounding box.
fn sample_in_hexagon(side: f64, stream: &mut RandomStream) -> Point {
    let apothem = 0.5 * 3f64.sqrt() * side;
    loop {
        let p = Point::new(
            stream.next_range(-side, side),
            stream.next_range(-apothem, apothem),
        );
        let inside = (0..3).all(|k| {
            let n = Point::unit(PI / 6.0 + k as f64 * PI / 3.0);
            p.dot(n).abs() <= apothem
        });
        if inside {
            return p;
        }
    }
}

/// One movement period and its crossing count, per network model.
///
/// The crossing count of a period depends only on the path, so the start
/// point is the typical point of the layout: uniform within a cell for the
/// hexagonal grid, the origin of a fresh tessellation draw for the PPP, and
/// uniform within the observation window for a fixed deployment.
pub fn run_handover_experiment(
    scenario: &Scenario,
    threads: Option<usize>,
) -> Result<HandoverOutcome, HarnessError> {
    scenario.mobility.validate()?;
    let params = scenario.mobility;
    let started = Instant::now();

    let (values, companions) = match &scenario.network {
        NetworkSpec::Hex { side } => {
            let grid = HexGrid::new(*side).map_err(|_| {
                HarnessError::Model(crate::models::ModelError::InvalidParameter(format!(
                    "hexagon side must be positive, got {side}"
                )))
            })?;
            let values = replicate(
                scenario.replications,
                scenario.master_seed,
                threads,
                |_i, stream| {
                    let start = sample_in_hexagon(grid.side(), stream);
                    let angle = stream.next_angle();
                    let length = sample_transition_length(&params, stream);
                    let seg = Segment::new(start, start + Point::unit(angle) * length);
                    grid.count_crossings(&seg) as f64
                },
            );
            let companions = AnalyticCompanions {
                hex_exact: Some(expected_handovers_exact(&params, *side)?),
                hex_approx: Some(expected_handovers_approx(params.lambda, *side)),
                pvt: None,
            };
            (values, companions)
        }
        NetworkSpec::Ppp { mu } => {
            let mu = *mu;
            let values = replicate(
                scenario.replications,
                scenario.master_seed,
                threads,
                |_i, stream| {
                    let angle = stream.next_angle();
                    let length = sample_transition_length(&params, stream);
                    let seg = Segment::new(Point::ORIGIN, Point::unit(angle) * length);
                    let field = sample_ppp(mu, Rect::around_segment(&seg), stream)
                        .expect("ppp sampling with validated intensity");
                    count_voronoi_crossings(&field, &seg).expect("walk on fresh field") as f64
                },
            );
            let companions = AnalyticCompanions {
                hex_exact: None,
                hex_approx: None,
                pvt: Some(expected_handovers_pvt(mu, params.lambda)),
            };
            (values, companions)
        }
        NetworkSpec::Deployment { path } => {
            let deployment = ingest_deployment(path)?;
            let field = &deployment.field;
            let window = field.observation_window();
            const MAX_ATTEMPTS: usize = 10_000;
            let values = replicate(
                scenario.replications,
                scenario.master_seed,
                threads,
                |_i, stream| {
                    // Redraw until the whole period fits the window; a NaN
                    // marks exhaustion and fails the run afterwards.
                    for _ in 0..MAX_ATTEMPTS {
                        let start = Point::new(
                            stream.next_range(window.x_min, window.x_max),
                            stream.next_range(window.y_min, window.y_max),
                        );
                        let angle = stream.next_angle();
                        let length = sample_transition_length(&params, stream);
                        let seg = Segment::new(start, start + Point::unit(angle) * length);
                        if window.contains(seg.b) {
                            return count_voronoi_crossings(field, &seg)
                                .expect("walk inside observation window")
                                as f64;
                        }
                    }
                    f64::NAN
                },
            );
            if values.iter().any(|v| v.is_nan()) {
                return Err(HarnessError::SegmentRejection(MAX_ATTEMPTS));
            }
            let companions = AnalyticCompanions {
                hex_exact: Some(expected_handovers_exact(&params, deployment.hex_side)?),
                hex_approx: Some(expected_handovers_approx(
                    params.lambda,
                    deployment.hex_side,
                )),
                pvt: Some(expected_handovers_pvt(deployment.mu, params.lambda)),
            };
            (values, companions)
        }
    };

    let analytic = companions.pvt.or(companions.hex_exact);
    let report = estimate(&values).into_report(
        "handovers_per_period",
        scenario.master_seed,
        analytic,
        started.elapsed().as_secs_f64(),
    );
    Ok(HandoverOutcome { report, companions })
}

/// One sojourn-table row: analytic pdf and cdf next to the simulated cdf.
#[derive(Clone, Copy, Debug)]
pub struct SojournRow {
    pub t: f64,
    pub pdf: f64,
    pub cdf: f64,
    pub empirical_cdf: f64,
}

#[derive(Clone, Debug)]
pub enum SojournOutcome {
    Hex {
        report: RunReport,
        bounds: SojournHex,
    },
    Pvt {
        report: RunReport,
        rows: Vec<SojournRow>,
    },
}

/// Sojourn-time analysis. Restricted to constant velocity with no pause;
/// other laws are rejected.
///
/// Hexagonal layouts get the quadrature value with its disc bounds; PPP
/// layouts get the analytic distribution on a grid next to the empirical
/// cdf of simulated boundary-hit times.
pub fn run_sojourn_experiment(
    scenario: &Scenario,
    grid_points: usize,
    threads: Option<usize>,
) -> Result<SojournOutcome, HarnessError> {
    scenario.mobility.validate()?;
    let params = scenario.mobility;
    if params.pause != PauseLaw::NoPause {
        return Err(HarnessError::UnsupportedMobility(
            "sojourn analysis covers the simplified model: no pause time".into(),
        ));
    }
    if !matches!(params.velocity, VelocityLaw::Constant(_)) {
        return Err(HarnessError::UnsupportedMobility(
            "sojourn analysis covers the simplified model: constant velocity".into(),
        ));
    }
    let mean_t = mean_transition_time(&params)?;
    let started = Instant::now();

    match &scenario.network {
        NetworkSpec::Hex { side } => {
            let bounds = sojourn_time_hex(params.lambda, *side, mean_t)?;
            let report = RunReport {
                metric: "hex_sojourn_time".into(),
                mean: bounds.value,
                var: 0.0,
                reps: 0,
                ci95: 0.0,
                seed: scenario.master_seed,
                analytic: Some(bounds.value),
                wall_time_secs: started.elapsed().as_secs_f64(),
            };
            Ok(SojournOutcome::Hex { report, bounds })
        }
        NetworkSpec::Ppp { mu } => {
            let mu = *mu;
            let grid_points = grid_points.max(2);
            let t_grid: Vec<f64> = (0..grid_points)
                .map(|k| mean_t * k as f64 / grid_points as f64)
                .collect();
            let dist = sojourn_distribution_pvt(&params, mu, &t_grid)?;

            let lambda = params.lambda;
            let cap = 12.0 / mu.sqrt();
            let samples = replicate(
                scenario.replications,
                scenario.master_seed,
                threads,
                move |_i, stream| {
                    let angle = stream.next_angle();
                    let probe = Segment::new(Point::ORIGIN, Point::unit(angle) * cap);
                    let field = sample_ppp(mu, Rect::around_segment(&probe), stream)
                        .expect("ppp sampling with validated intensity");
                    let r = first_boundary_hit(&field, Point::ORIGIN, angle, cap)
                        .expect("probe inside observation window")
                        .unwrap_or(cap);
                    mean_t * (1.0 - 2.0 * q_raw((2.0 * PI * lambda).sqrt() * r))
                },
            );

            let mut sorted = samples.clone();
            sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
            let n = sorted.len() as f64;
            let rows: Vec<SojournRow> = dist
                .grid
                .iter()
                .map(|p| {
                    let below = sorted.partition_point(|&s| s <= p.t);
                    SojournRow {
                        t: p.t,
                        pdf: p.pdf,
                        cdf: p.cdf,
                        empirical_cdf: below as f64 / n,
                    }
                })
                .collect();

            let report = estimate(&samples).into_report(
                "pvt_sojourn_time",
                scenario.master_seed,
                Some(dist.mean()),
                started.elapsed().as_secs_f64(),
            );
            Ok(SojournOutcome::Pvt { report, rows })
        }
        NetworkSpec::Deployment { .. } => Err(HarnessError::UnsupportedMobility(
            "deployment networks support the handover metric only".into(),
        )),
    }
}

/// One point of an intensity sweep.
#[derive(Clone, Debug)]
pub struct SweepPoint {
    pub mu: f64,
    pub report: RunReport,
}

/// Handover Monte-Carlo across PPP intensities, for scaling studies.
pub fn run_pvt_handover_sweep(
    mobility: MobilityParams,
    mus: &[f64],
    replications: usize,
    master_seed: u64,
    threads: Option<usize>,
) -> Result<Vec<SweepPoint>, HarnessError> {
    mus.iter()
        .map(|&mu| {
            let scenario = Scenario {
                mobility,
                network: NetworkSpec::Ppp { mu },
                replications,
                master_seed,
                outputs: vec![super::Metric::Handover],
            };
            let outcome = run_handover_experiment(&scenario, threads)?;
            Ok(SweepPoint {
                mu,
                report: outcome.report,
            })
        })
        .collect()
}

/// Least-squares slope of `ln y` against `ln x`.
pub fn loglog_slope(points: &[(f64, f64)]) -> f64 {
    let n = points.len() as f64;
    let (mut sx, mut sy, mut sxx, mut sxy) = (0.0, 0.0, 0.0, 0.0);
    for &(x, y) in points {
        let (lx, ly) = (x.ln(), y.ln());
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    (n * sxy - sx * sy) / (n * sxx - sx * sx)
}

/// Side length of the hexagon with the given cell area.
pub fn hex_side_for_cell_area(area: f64) -> f64 {
    (2.0 * area / (3.0 * 3f64.sqrt())).sqrt()
}

/// Waypoint intensity giving the planar model the same mean transition
/// length: inverts `E[L] = 1/(2√λ)`.
pub fn calibrate_lambda(mean_transition_length: f64) -> f64 {
    1.0 / (4.0 * mean_transition_length * mean_transition_length)
}

/// Configuration of the three-model comparison. The two waypoint models
/// share the Levy walk's velocity law; the planar model's λ is calibrated
/// to the Levy mean transition length.
#[derive(Clone, Debug)]
pub struct ModelComparisonConfig {
    pub levy: LevyParams,
    /// Pause law used by both waypoint models (the Levy walk keeps its own
    /// power-law pauses).
    pub pause: PauseLaw,
    pub window: Window,
    pub n_periods: usize,
    pub master_seed: u64,
    pub length_grid: Option<Vec<f64>>,
    pub rate_grid: Option<Vec<f64>>,
}

#[derive(Clone, Copy, Debug)]
pub struct ComparisonRow {
    pub x: f64,
    pub proposed: f64,
    pub classical: f64,
    pub levy: f64,
}

#[derive(Clone, Debug)]
pub struct ModelComparison {
    pub lambda: f64,
    pub levy_mean_length: f64,
    pub length_ccdf: Vec<ComparisonRow>,
    pub switch_rate_ccdf: Vec<ComparisonRow>,
}

fn log_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    let (llo, lhi) = (lo.ln(), hi.ln());
    (0..n)
        .map(|i| (llo + (lhi - llo) * i as f64 / (n - 1) as f64).exp())
        .collect()
}

/// Generates one trace per model on a shared window and reports the CCDFs
/// of transition length and direction switch rate on shared grids.
pub fn run_model_comparison(
    config: &ModelComparisonConfig,
) -> Result<ModelComparison, HarnessError> {
    config.levy.validate()?;
    config.pause.validate()?;
    config.window.validate()?;
    let levy_mean = config.levy.mean_transition_length();
    let lambda = calibrate_lambda(levy_mean);
    let proposed_params = MobilityParams::new(lambda, config.levy.velocity, config.pause)?;

    let (v_lo, v_hi) = match config.levy.velocity {
        VelocityLaw::Constant(v) => (v, v),
        VelocityLaw::UniformRange { min, max } => (min, max),
    };
    let length_grid = config
        .length_grid
        .clone()
        .unwrap_or_else(|| log_grid(config.levy.l_min / 4.0, config.levy.l_max, 60));
    let rate_grid = config.rate_grid.clone().unwrap_or_else(|| {
        let d_lo = 0.5 / (config.levy.l_max / v_lo + config.levy.s_max);
        let d_hi = 2.0 / (config.levy.l_min / v_hi + config.levy.s_min);
        log_grid(d_lo, d_hi, 60)
    });
    // Radial occupancy is not part of the comparison; one wide bin.
    let radial_edges = [0.0, 1e300];

    let start = match config.window {
        Window::Infinite => Point::ORIGIN,
        Window::Reflect { width, height } => Point::new(0.5 * width, 0.5 * height),
    };
    let proposed_trace = generate_rwp_trace(
        &proposed_params,
        start,
        config.n_periods,
        &config.window,
        &mut RandomStream::new(config.master_seed, 0),
    )?;
    let classical_trace = generate_classical_rwp_trace(
        &config.window,
        &config.levy.velocity,
        &config.pause,
        config.n_periods,
        &mut RandomStream::new(config.master_seed, 1),
    )?;
    let levy_trace = generate_levy_trace(
        &config.levy,
        start,
        config.n_periods,
        &config.window,
        &mut RandomStream::new(config.master_seed, 2),
    )?;

    let proposed = empirical_stats(&proposed_trace, &length_grid, &rate_grid, &radial_edges);
    let classical = empirical_stats(&classical_trace, &length_grid, &rate_grid, &radial_edges);
    let levy = empirical_stats(&levy_trace, &length_grid, &rate_grid, &radial_edges);

    let combine = |grid: &[f64], a: &[f64], b: &[f64], c: &[f64]| {
        grid.iter()
            .zip(a.iter().zip(b.iter().zip(c)))
            .map(|(&x, (&pa, (&pb, &pc)))| ComparisonRow {
                x,
                proposed: pa,
                classical: pb,
                levy: pc,
            })
            .collect::<Vec<_>>()
    };

    Ok(ModelComparison {
        lambda,
        levy_mean_length: levy_mean,
        length_ccdf: combine(
            &length_grid,
            &proposed.length_ccdf,
            &classical.length_ccdf,
            &levy.length_ccdf,
        ),
        switch_rate_ccdf: combine(
            &rate_grid,
            &proposed.switch_rate_ccdf,
            &classical.switch_rate_ccdf,
            &levy.switch_rate_ccdf,
        ),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::Metric;

    fn no_pause(lambda: f64, v: f64) -> MobilityParams {
        MobilityParams::new(lambda, VelocityLaw::Constant(v), PauseLaw::NoPause).unwrap()
    }

    #[test]
    fn calibration_inverts_mean_length() {
        assert!((calibrate_lambda(0.5) - 1.0).abs() < 1e-15);
        assert!((calibrate_lambda(1.0) - 0.25).abs() < 1e-15);
    }

    #[test]
    fn hex_side_matches_cell_area() {
        let d = hex_side_for_cell_area(1.0 / 400.0);
        assert!((1.5 * 3f64.sqrt() * d * d - 1.0 / 400.0).abs() < 1e-18);
    }

    #[test]
    fn hex_handover_mc_brackets_analytic() {
        let scenario = Scenario {
            mobility: no_pause(1.0, 1.0),
            network: NetworkSpec::Hex { side: 1.0 },
            replications: 20_000,
            master_seed: 42,
            outputs: vec![Metric::Handover],
        };
        let outcome = run_handover_experiment(&scenario, None).unwrap();
        let analytic = outcome.companions.hex_exact.unwrap();
        assert!(
            (outcome.report.mean - analytic).abs() < 3.0 * outcome.report.ci95 / 1.96,
            "mean {} vs analytic {analytic}",
            outcome.report.mean
        );
        let approx = outcome.companions.hex_approx.unwrap();
        assert!(approx.lower <= approx.expected && approx.expected <= approx.upper);
    }

    #[test]
    fn pvt_handover_mc_brackets_analytic() {
        let scenario = Scenario {
            mobility: no_pause(4.0, 1.0),
            network: NetworkSpec::Ppp { mu: PI * PI },
            replications: 4000,
            master_seed: 7,
            outputs: vec![Metric::Handover],
        };
        let outcome = run_handover_experiment(&scenario, None).unwrap();
        let analytic = outcome.companions.pvt.unwrap();
        assert!((analytic - 1.0).abs() < 1e-12);
        assert!(
            (outcome.report.mean - analytic).abs() < 3.0 * outcome.report.ci95 / 1.96,
            "mean {}",
            outcome.report.mean
        );
    }

    #[test]
    fn sojourn_rejects_unsupported_mobility() {
        let paused = MobilityParams::new(
            1.0,
            VelocityLaw::Constant(1.0),
            PauseLaw::Constant(0.5),
        )
        .unwrap();
        let scenario = Scenario {
            mobility: paused,
            network: NetworkSpec::Hex { side: 1.0 },
            replications: 10,
            master_seed: 1,
            outputs: vec![Metric::Sojourn],
        };
        assert!(matches!(
            run_sojourn_experiment(&scenario, 10, None),
            Err(HarnessError::UnsupportedMobility(_))
        ));
    }

    #[test]
    fn hex_sojourn_outcome_carries_bounds() {
        let scenario = Scenario {
            mobility: no_pause(1.0, 1.0),
            network: NetworkSpec::Hex { side: 1.0 },
            replications: 0,
            master_seed: 1,
            outputs: vec![Metric::Sojourn],
        };
        match run_sojourn_experiment(&scenario, 10, None).unwrap() {
            SojournOutcome::Hex { report, bounds } => {
                assert!(bounds.lower <= report.mean && report.mean <= bounds.upper);
            }
            other => panic!("expected hex outcome, got {other:?}"),
        }
    }

    #[test]
    fn sweep_slope_is_half() {
        let points = run_pvt_handover_sweep(
            no_pause(1.0, 1.0),
            &[1.0, 4.0, 16.0, 64.0],
            2500,
            11,
            None,
        )
        .unwrap();
        let slope = loglog_slope(
            &points
                .iter()
                .map(|p| (p.mu, p.report.mean))
                .collect::<Vec<_>>(),
        );
        assert!((slope - 0.5).abs() < 0.03, "slope = {slope}");
    }

    #[test]
    fn model_comparison_orders_the_models() {
        let levy = LevyParams {
            alpha: 1.0,
            beta: 1.0,
            l_min: 0.1,
            l_max: 100.0,
            s_min: 0.1,
            s_max: 10.0,
            velocity: VelocityLaw::Constant(1.0),
        };
        let mean_len = levy.mean_transition_length();
        let config = ModelComparisonConfig {
            levy,
            pause: PauseLaw::TruncatedPowerLaw {
                beta: 1.0,
                s_min: 0.1,
                s_max: 10.0,
            },
            window: Window::Reflect {
                width: 1000.0,
                height: 1000.0,
            },
            n_periods: 100_000,
            master_seed: 3,
            length_grid: Some(vec![0.1, mean_len, 10.0 * mean_len, 50.0]),
            rate_grid: None,
        };
        let cmp = run_model_comparison(&config).unwrap();
        // Calibration: lambda = 1/(4 E[L]^2), so the calibrated model's mean
        // transition length equals the Levy mean.
        let want = calibrate_lambda(cmp.levy_mean_length);
        assert!((cmp.lambda - want).abs() < 1e-15);
        assert!((0.5 / cmp.lambda.sqrt() - mean_len).abs() < 1e-12);

        // The planar model's CCDF at its own mean length is e^{-pi/4}.
        let at_mean = &cmp.length_ccdf[1];
        assert!(
            (at_mean.proposed - 0.455938127765996).abs() < 0.01,
            "ccdf at mean = {}",
            at_mean.proposed
        );

        // Classical transitions are much longer than calibrated-lambda ones:
        // its CCDF dominates at mid lengths.
        let mid = &cmp.length_ccdf[2];
        assert!(
            mid.classical > mid.proposed,
            "classical {} vs proposed {}",
            mid.classical,
            mid.proposed
        );
    }
}
