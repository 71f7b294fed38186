//! Hexagonal tessellation geometry and the hexagonal handover and sojourn
//! analytics.
//!
//! Orientation is fixed: the cell containing the origin is centered there
//! with vertices at (±d, 0) and (±d/2, ±√3d/2). Crossing counts for a
//! single segment depend on orientation, but every expectation taken over
//! the isotropic direction law is orientation-invariant.

use crate::analytics::{mean_transition_time, moving_fraction, AnalyticsError};
use crate::geom::{Point, Segment};
use crate::models::MobilityParams;
use crate::numerics::{integrate_1d, q_raw, NumericsError, QuadSpec};
use std::f64::consts::PI;

#[derive(Debug, Clone, thiserror::Error)]
pub enum HexError {
    #[error("hexagon side must be positive, got {0}")]
    InvalidSide(f64),
}

/// Axial coordinates of a hexagonal cell; the origin cell is (0, 0).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct HexIndex {
    pub q: i64,
    pub r: i64,
}

impl HexIndex {
    pub fn new(q: i64, r: i64) -> Self {
        HexIndex { q, r }
    }
}

const NEIGHBORS: [(i64, i64); 6] = [(1, 0), (1, -1), (0, -1), (-1, 0), (-1, 1), (0, 1)];

/// A hexagonal grid of side length `d` in the fixed orientation above.
#[derive(Clone, Copy, Debug)]
pub struct HexGrid {
    side: f64,
}

impl HexGrid {
    pub fn new(side: f64) -> Result<Self, HexError> {
        if !(side > 0.0) || !side.is_finite() {
            return Err(HexError::InvalidSide(side));
        }
        Ok(HexGrid { side })
    }

    pub fn side(&self) -> f64 {
        self.side
    }

    /// Cell area `3√3 d²/2`.
    pub fn cell_area(&self) -> f64 {
        1.5 * 3f64.sqrt() * self.side * self.side
    }

    /// Radius of the equal-area disc, `R = sqrt(area/π)`.
    pub fn ring_radius(&self) -> f64 {
        (self.cell_area() / PI).sqrt()
    }

    /// Distance from a cell center to its edges.
    pub fn apothem(&self) -> f64 {
        0.5 * 3f64.sqrt() * self.side
    }

    pub fn cell_center(&self, idx: HexIndex) -> Point {
        let q = idx.q as f64;
        let r = idx.r as f64;
        Point::new(
            1.5 * self.side * q,
            3f64.sqrt() * self.side * (r + 0.5 * q),
        )
    }

    /// Index of the hexagon containing `p`.
    ///
    /// A hexagonal cell is the set of points nearer to its center than to
    /// any other center, so boundary points resolve by the half-open rule:
    /// exact ties go to the lexicographically smaller `(q, r)`.
    pub fn point_to_cell(&self, p: Point) -> HexIndex {
        debug_assert!(p.is_finite());
        let qf = 2.0 / 3.0 * p.x / self.side;
        let rf = (-p.x / 3.0 + 3f64.sqrt() / 3.0 * p.y) / self.side;
        let rounded = axial_round(qf, rf);
        let mut best = rounded;
        let mut best_d = p.dist2(self.cell_center(rounded));
        for (dq, dr) in NEIGHBORS {
            let cand = HexIndex::new(rounded.q + dq, rounded.r + dr);
            let d = p.dist2(self.cell_center(cand));
            if d < best_d || (d == best_d && cand < best) {
                best = cand;
                best_d = d;
            }
        }
        best
    }

    /// Largest parameter interval end at which the segment is still inside
    /// the (closed) cell, i.e. the earliest exit; infinite if it never exits.
    fn exit_param(&self, idx: HexIndex, seg: &Segment) -> f64 {
        let c = self.cell_center(idx);
        let h = self.apothem();
        let v = seg.direction();
        let rel = seg.a - c;
        let mut t_exit = f64::INFINITY;
        for k in 0..6 {
            let angle = PI / 6.0 + k as f64 * PI / 3.0;
            let n = Point::unit(angle);
            let den = v.dot(n);
            if den > 0.0 {
                let t = (h - rel.dot(n)) / den;
                if t < t_exit {
                    t_exit = t;
                }
            }
        }
        t_exit
    }

    /// Exact number of distinct cell-boundary crossings along the open
    /// segment, by incremental traversal.
    ///
    /// A vertex hit counts once, into the cell that contains the segment's
    /// continuation: the walk probes the interior at a parametric offset of
    /// +1e-9 of the segment length past each exit.
    pub fn count_crossings(&self, seg: &Segment) -> usize {
        const NUDGE: f64 = 1e-9;
        let mut t = 0.0f64;
        let mut cell = self.point_to_cell(seg.a);
        let mut count = 0usize;
        loop {
            let t_exit = self.exit_param(cell, seg);
            if t_exit >= 1.0 {
                return count;
            }
            t = (t_exit.max(t) + NUDGE).min(1.0);
            let next = self.point_to_cell(seg.point_at(t));
            if next != cell {
                count += 1;
                cell = next;
            }
            if t >= 1.0 {
                return count;
            }
        }
    }
}

fn axial_round(qf: f64, rf: f64) -> HexIndex {
    let sf = -qf - rf;
    let mut q = qf.round();
    let mut r = rf.round();
    let s = sf.round();
    let dq = (q - qf).abs();
    let dr = (r - rf).abs();
    let ds = (s - sf).abs();
    if dq > dr && dq > ds {
        q = -r - s;
    } else if dr > ds {
        r = -q - s;
    }
    HexIndex::new(q as i64, r as i64)
}

/// Ring approximation of the expected handovers per movement period, with
/// its closed-form sandwich bounds.
#[derive(Clone, Copy, Debug)]
pub struct HandoverApprox {
    pub expected: f64,
    pub lower: f64,
    pub upper: f64,
}

/// Ring-approximate expected handovers per movement period:
/// `Σ_{n≥0} exp(-(3√3/2)(2n+1)² λd²)`, summed until a term drops below
/// 1e-16 of the partial sum, plus the Gaussian-tail bounds.
pub fn expected_handovers_approx(lambda: f64, d: f64) -> HandoverApprox {
    assert!(lambda > 0.0 && d > 0.0, "lambda and d must be positive");
    let x = lambda * d * d;
    let c = 1.5 * 3f64.sqrt() * x;
    let mut sum = 0.0f64;
    for n in 0u64.. {
        let m = (2 * n + 1) as f64;
        let term = (-c * m * m).exp();
        sum += term;
        if term <= 1e-16 * sum || term == 0.0 {
            break;
        }
    }
    let scale = (PI / (6.0 * 3f64.sqrt() * x)).sqrt();
    let q = q_raw((3.0 * 3f64.sqrt() * x).sqrt());
    HandoverApprox {
        expected: sum,
        lower: scale * q,
        upper: scale * (1.0 - q),
    }
}

/// Gap between the upper and lower sandwich bounds as a function of λd².
pub fn approx_gap(lambda_d2: f64) -> f64 {
    let a = expected_handovers_approx(lambda_d2, 1.0);
    a.upper - a.lower
}

/// Exact expected handovers per movement period from the generalized
/// Buffon's-needle argument: `E[N] = E[T]·(4√3/(3π))·E[V]/d`.
pub fn expected_handovers_exact(params: &MobilityParams, d: f64) -> Result<f64, AnalyticsError> {
    assert!(d > 0.0, "cell side must be positive");
    let et = mean_transition_time(params)?;
    Ok(et * 4.0 * 3f64.sqrt() / (3.0 * PI) * params.velocity.mean() / d)
}

/// Exact handover rate `H = E[N]/(E[T] + E[S])`.
pub fn handover_rate_exact(params: &MobilityParams, d: f64) -> Result<f64, AnalyticsError> {
    let p = moving_fraction(params)?;
    Ok(p * 4.0 * 3f64.sqrt() / (3.0 * PI) * params.velocity.mean() / d)
}

/// Asymptotic approximate handover rate, valid for small λd²:
/// `H ≈ sqrt(π/(6√3 λ)) / (2d (E[T]+E[S]))`.
pub fn handover_rate_asymptotic(params: &MobilityParams, d: f64) -> Result<f64, AnalyticsError> {
    assert!(d > 0.0, "cell side must be positive");
    let et = mean_transition_time(params)?;
    let period = et + params.pause.mean();
    Ok((PI / (6.0 * 3f64.sqrt() * params.lambda)).sqrt() / (2.0 * d) / period)
}

/// Sojourn time in the connection-initiating cell with its inscribed- and
/// circumscribed-disc bounds.
#[derive(Clone, Copy, Debug)]
pub struct SojournHex {
    pub value: f64,
    pub lower: f64,
    pub upper: f64,
}

/// Expected sojourn time in the cell where the connection is initiated,
/// for a node co-located with its serving site.
///
/// Evaluated in polar form, `S_T = E[T]·(√λ/π)·∫∫ e^{-λπr²} dr dθ` over the
/// hexagon, which removes the 1/r pole of the Cartesian integrand; the
/// inner radial integral is a Gaussian tail, leaving one smooth angular
/// quadrature per call.
pub fn sojourn_time_hex(
    lambda: f64,
    d: f64,
    mean_transition: f64,
) -> Result<SojournHex, NumericsError> {
    assert!(lambda > 0.0 && d > 0.0, "lambda and d must be positive");
    let apothem = 0.5 * 3f64.sqrt() * d;
    let scale = (2.0 * PI * lambda).sqrt();
    // One sixth of the angular integral; r_hex is smooth inside the sector.
    let spec = QuadSpec {
        rel_tol: 1e-8,
        ..QuadSpec::default_1d()
    };
    let sixth = integrate_1d(
        |theta| {
            let r_hex = apothem / (theta - PI / 6.0).cos();
            1.0 - 2.0 * q_raw(scale * r_hex)
        },
        0.0,
        PI / 3.0,
        &spec,
    )?;
    let value = mean_transition / (2.0 * PI) * 6.0 * sixth.value;
    let lower = mean_transition * (1.0 - 2.0 * q_raw((1.5 * PI * lambda).sqrt() * d));
    let upper = mean_transition * (1.0 - 2.0 * q_raw(scale * d));
    Ok(SojournHex {
        value,
        lower,
        upper,
    })
}
