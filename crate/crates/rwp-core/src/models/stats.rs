//! Empirical statistics of movement traces: CCDFs of transition length and
//! direction switch rate, and the time-weighted radial occupancy histogram.

use super::Trace;
use crate::geom::Point;

/// Time-weighted radial occupancy relative to each period's own start.
///
/// `time_fraction[b]` is the fraction of total trace time spent at a radial
/// distance in `[edges[b], edges[b+1])` from the starting waypoint of the
/// period in progress; pauses count at the radius of the reached waypoint.
#[derive(Clone, Debug)]
pub struct RadialHistogram {
    pub edges: Vec<f64>,
    pub time_fraction: Vec<f64>,
    /// Fraction of time spent beyond the last edge.
    pub outside_fraction: f64,
    pub total_time: f64,
}

#[derive(Clone, Debug)]
pub struct EmpiricalStats {
    pub length_grid: Vec<f64>,
    pub length_ccdf: Vec<f64>,
    pub rate_grid: Vec<f64>,
    pub switch_rate_ccdf: Vec<f64>,
    pub radial: RadialHistogram,
    pub n_periods: usize,
}

/// 200 uniform radial bins on `[0, 3/sqrt(lambda)]`.
pub fn default_radial_edges(lambda: f64) -> Vec<f64> {
    let hi = 3.0 / lambda.sqrt();
    (0..=200).map(|i| hi * i as f64 / 200.0).collect()
}

/// Empirical CCDFs and radial occupancy for a trace, evaluated on
/// caller-supplied grids.
pub fn empirical_stats(
    trace: &Trace,
    length_grid: &[f64],
    rate_grid: &[f64],
    radial_edges: &[f64],
) -> EmpiricalStats {
    assert!(!trace.is_empty(), "empirical_stats requires a nonempty trace");
    assert!(radial_edges.len() >= 2, "need at least two radial edges");

    let mut lengths = Vec::new();
    let mut rates = Vec::new();
    let mut bins = vec![0.0f64; radial_edges.len() - 1];
    let mut outside = 0.0f64;
    let mut total_time = 0.0f64;

    for group in trace.period_groups() {
        let origin = group[0].start;
        let mut length = 0.0;
        let mut duration = 0.0;
        for leg in group {
            length += leg.length();
            duration += leg.duration();
            deposit_leg(origin, leg.start, leg.end, leg.travel_time(), radial_edges, &mut bins, &mut outside);
            if leg.pause > 0.0 {
                deposit_at(leg.end.dist(origin), leg.pause, radial_edges, &mut bins, &mut outside);
            }
        }
        total_time += duration;
        lengths.push(length);
        if duration > 0.0 {
            rates.push(1.0 / duration);
        }
    }

    let n = lengths.len() as f64;
    let length_ccdf = length_grid
        .iter()
        .map(|&x| lengths.iter().filter(|&&l| l > x).count() as f64 / n)
        .collect();
    let nr = rates.len().max(1) as f64;
    let switch_rate_ccdf = rate_grid
        .iter()
        .map(|&x| rates.iter().filter(|&&d| d > x).count() as f64 / nr)
        .collect();

    if total_time > 0.0 {
        for b in bins.iter_mut() {
            *b /= total_time;
        }
        outside /= total_time;
    }

    EmpiricalStats {
        length_grid: length_grid.to_vec(),
        length_ccdf,
        rate_grid: rate_grid.to_vec(),
        switch_rate_ccdf,
        radial: RadialHistogram {
            edges: radial_edges.to_vec(),
            time_fraction: bins,
            outside_fraction: outside,
            total_time,
        },
        n_periods: trace.n_periods(),
    }
}

fn deposit_at(r: f64, time: f64, edges: &[f64], bins: &mut [f64], outside: &mut f64) {
    if r >= *edges.last().unwrap() || r < edges[0] {
        *outside += time;
        return;
    }
    let b = edges.partition_point(|&e| e <= r) - 1;
    bins[b.min(bins.len() - 1)] += time;
}

/// Distributes a straight leg's travel time over radial bins measured from
/// `origin`. The squared radius along the leg is quadratic in the path
/// parameter, so each bin edge crossing solves a quadratic; the radius is
/// monotone on either side of the closest approach.
fn deposit_leg(
    origin: Point,
    start: Point,
    end: Point,
    travel_time: f64,
    edges: &[f64],
    bins: &mut [f64],
    outside: &mut f64,
) {
    if travel_time <= 0.0 {
        return;
    }
    let d = start - origin;
    let v = end - start;
    let c0 = d.norm2();
    let c1 = 2.0 * d.dot(v);
    let c2 = v.norm2();
    if c2 == 0.0 {
        deposit_at(c0.sqrt(), travel_time, edges, bins, outside);
        return;
    }
    let r_at = |t: f64| (c0 + c1 * t + c2 * t * t).max(0.0).sqrt();

    // Split at the closest approach so each piece has monotone radius.
    let t_vertex = -c1 / (2.0 * c2);
    let mut cuts = vec![0.0f64];
    if t_vertex > 0.0 && t_vertex < 1.0 {
        cuts.push(t_vertex);
    }
    cuts.push(1.0);

    for pair in cuts.windows(2) {
        let (t0, t1) = (pair[0], pair[1]);
        let (r0, r1) = (r_at(t0), r_at(t1));
        let (r_lo, r_hi) = if r0 <= r1 { (r0, r1) } else { (r1, r0) };

        // Crossing times for every edge strictly inside the radius range.
        let mut ts = vec![t0];
        let lo_idx = edges.partition_point(|&e| e <= r_lo);
        for &e in &edges[lo_idx..] {
            if e >= r_hi {
                break;
            }
            let disc = c1 * c1 - 4.0 * c2 * (c0 - e * e);
            if disc <= 0.0 {
                continue;
            }
            let sq = disc.sqrt();
            // Increasing piece sits right of the vertex, decreasing left.
            let t = if r1 >= r0 {
                (-c1 + sq) / (2.0 * c2)
            } else {
                (-c1 - sq) / (2.0 * c2)
            };
            if t > t0 && t < t1 {
                ts.push(t);
            }
        }
        ts.push(t1);
        ts.sort_by(|a, b| a.partial_cmp(b).unwrap());

        for seg in ts.windows(2) {
            let dt = seg[1] - seg[0];
            if dt <= 0.0 {
                continue;
            }
            let r_mid = r_at(0.5 * (seg[0] + seg[1]));
            deposit_at(r_mid, dt * travel_time, edges, bins, outside);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::MovementPeriod;

    fn single_period(length: f64, velocity: f64, pause: f64) -> Trace {
        Trace {
            periods: vec![MovementPeriod {
                period: 0,
                start: Point::ORIGIN,
                end: Point::new(length, 0.0),
                velocity,
                pause,
            }],
        }
    }

    #[test]
    fn single_period_ccdf() {
        let trace = single_period(1.0, 1.0, 0.0);
        let stats = empirical_stats(&trace, &[0.5, 1.5], &[0.5, 1.5], &[0.0, 1.0, 2.0]);
        assert_eq!(stats.length_ccdf, vec![1.0, 0.0]);
        // D = 1/T = 1 for this period.
        assert_eq!(stats.switch_rate_ccdf, vec![1.0, 0.0]);
    }

    #[test]
    fn switch_rate_is_speed_over_length_without_pause() {
        let trace = single_period(2.0, 4.0, 0.0);
        // D = v / L = 2.
        let stats = empirical_stats(&trace, &[1.0], &[1.9, 2.1], &[0.0, 4.0]);
        assert_eq!(stats.switch_rate_ccdf, vec![1.0, 0.0]);
    }

    #[test]
    fn radial_occupancy_uniform_along_outward_leg() {
        // A radial leg of length 1 at unit speed spends dt = dr in each bin.
        let trace = single_period(1.0, 1.0, 0.0);
        let edges: Vec<f64> = (0..=10).map(|i| i as f64 * 0.2).collect();
        let stats = empirical_stats(&trace, &[1.0], &[1.0], &edges);
        for b in 0..5 {
            assert!(
                (stats.radial.time_fraction[b] - 0.2).abs() < 1e-12,
                "bin {b}: {}",
                stats.radial.time_fraction[b]
            );
        }
        for b in 5..10 {
            assert_eq!(stats.radial.time_fraction[b], 0.0);
        }
        assert_eq!(stats.radial.outside_fraction, 0.0);
    }

    #[test]
    fn pause_time_lands_at_waypoint_radius() {
        let trace = single_period(1.0, 1.0, 3.0);
        let edges = vec![0.0, 0.9, 1.1, 2.0];
        let stats = empirical_stats(&trace, &[1.0], &[1.0], &edges);
        // Total time 4: 0.9 moving in bin 0, 0.1 moving + 3 paused in bin 1.
        assert!((stats.radial.time_fraction[0] - 0.9 / 4.0).abs() < 1e-12);
        assert!((stats.radial.time_fraction[1] - 3.1 / 4.0).abs() < 1e-12);
        assert_eq!(stats.radial.time_fraction[2], 0.0);
    }

    #[test]
    fn folded_leg_time_is_conserved() {
        // Two chained legs of one period, the second heading back inward.
        let trace = Trace {
            periods: vec![
                MovementPeriod {
                    period: 0,
                    start: Point::ORIGIN,
                    end: Point::new(1.0, 0.0),
                    velocity: 1.0,
                    pause: 0.0,
                },
                MovementPeriod {
                    period: 0,
                    start: Point::new(1.0, 0.0),
                    end: Point::new(0.25, 0.6),
                    velocity: 1.0,
                    pause: 0.5,
                },
            ],
        };
        let edges: Vec<f64> = (0..=8).map(|i| i as f64 * 0.25).collect();
        let stats = empirical_stats(&trace, &[1.0], &[1.0], &edges);
        let deposited: f64 =
            stats.radial.time_fraction.iter().sum::<f64>() + stats.radial.outside_fraction;
        assert!((deposited - 1.0).abs() < 1e-12);
        assert!((stats.radial.total_time - trace.periods.iter().map(|p| p.duration()).sum::<f64>()).abs() < 1e-12);
    }
}
