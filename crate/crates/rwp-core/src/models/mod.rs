//! Movement-trace generators: the planar random-waypoint model with
//! Rayleigh transition lengths, the classical bounded-domain RWP model,
//! and a truncated Levy walk, plus empirical statistics for comparing them.

mod stats;

pub use stats::{empirical_stats, default_radial_edges, EmpiricalStats, RadialHistogram};

use crate::geom::Point;
use crate::numerics::RandomStream;
use std::f64::consts::PI;
use std::io::Write;

#[derive(Debug, Clone, thiserror::Error)]
pub enum ModelError {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("the classical waypoint model requires a finite window")]
    InfiniteWindow,
    #[error("trace start ({0}, {1}) lies outside the reflecting window")]
    StartOutsideWindow(f64, f64),
}

/// Velocity law for one movement period.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum VelocityLaw {
    Constant(f64),
    UniformRange { min: f64, max: f64 },
}

impl VelocityLaw {
    pub fn validate(&self) -> Result<(), ModelError> {
        match *self {
            VelocityLaw::Constant(v) if v > 0.0 && v.is_finite() => Ok(()),
            VelocityLaw::Constant(v) => Err(ModelError::InvalidParameter(format!(
                "constant velocity must be positive, got {v}"
            ))),
            VelocityLaw::UniformRange { min, max } if min > 0.0 && min <= max && max.is_finite() => {
                Ok(())
            }
            VelocityLaw::UniformRange { min, max } => Err(ModelError::InvalidParameter(format!(
                "uniform velocity needs 0 < min <= max, got [{min}, {max}]"
            ))),
        }
    }

    pub fn mean(&self) -> f64 {
        match *self {
            VelocityLaw::Constant(v) => v,
            VelocityLaw::UniformRange { min, max } => 0.5 * (min + max),
        }
    }

    /// E[1/V]; finite because `min > 0` is enforced at construction.
    pub fn mean_inverse(&self) -> f64 {
        match *self {
            VelocityLaw::Constant(v) => 1.0 / v,
            VelocityLaw::UniformRange { min, max } => {
                if min == max {
                    1.0 / min
                } else {
                    (max.ln() - min.ln()) / (max - min)
                }
            }
        }
    }

    pub fn sample(&self, stream: &mut RandomStream) -> f64 {
        match *self {
            VelocityLaw::Constant(v) => v,
            VelocityLaw::UniformRange { min, max } => stream.next_range(min, max),
        }
    }
}

/// Pause law at each waypoint. Power-law pauses are truncated so every
/// moment stays finite.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum PauseLaw {
    NoPause,
    Constant(f64),
    TruncatedPowerLaw { beta: f64, s_min: f64, s_max: f64 },
}

impl PauseLaw {
    pub fn validate(&self) -> Result<(), ModelError> {
        match *self {
            PauseLaw::NoPause => Ok(()),
            PauseLaw::Constant(s) if s >= 0.0 && s.is_finite() => Ok(()),
            PauseLaw::Constant(s) => Err(ModelError::InvalidParameter(format!(
                "constant pause must be nonnegative, got {s}"
            ))),
            PauseLaw::TruncatedPowerLaw { beta, s_min, s_max }
                if beta > 0.0 && beta < 2.0 && s_min > 0.0 && s_max >= s_min => Ok(()),
            PauseLaw::TruncatedPowerLaw { beta, s_min, s_max } => {
                Err(ModelError::InvalidParameter(format!(
                    "power-law pause needs beta in (0,2) and 0 < s_min <= s_max, \
                     got beta={beta}, [{s_min}, {s_max}]"
                )))
            }
        }
    }

    pub fn mean(&self) -> f64 {
        match *self {
            PauseLaw::NoPause => 0.0,
            PauseLaw::Constant(s) => s,
            PauseLaw::TruncatedPowerLaw { beta, s_min, s_max } => {
                truncated_pareto_mean(beta, s_min, s_max)
            }
        }
    }

    pub fn sample(&self, stream: &mut RandomStream) -> f64 {
        match *self {
            PauseLaw::NoPause => 0.0,
            PauseLaw::Constant(s) => s,
            PauseLaw::TruncatedPowerLaw { beta, s_min, s_max } => {
                sample_truncated_pareto(beta, s_min, s_max, stream)
            }
        }
    }
}

/// Mean of the truncated Pareto density ∝ x^{-1-exponent} on [lo, hi].
pub fn truncated_pareto_mean(exponent: f64, lo: f64, hi: f64) -> f64 {
    if lo == hi {
        return lo;
    }
    let norm = exponent / (lo.powf(-exponent) - hi.powf(-exponent));
    if (exponent - 1.0).abs() < 1e-12 {
        norm * (hi / lo).ln()
    } else {
        norm * (hi.powf(1.0 - exponent) - lo.powf(1.0 - exponent)) / (1.0 - exponent)
    }
}

/// Inverse-transform draw from the truncated Pareto density
/// ∝ x^{-1-exponent} on [lo, hi].
pub fn sample_truncated_pareto(
    exponent: f64,
    lo: f64,
    hi: f64,
    stream: &mut RandomStream,
) -> f64 {
    if lo == hi {
        return lo;
    }
    let a = lo.powf(-exponent);
    let b = hi.powf(-exponent);
    let u = stream.next_f64();
    (a - u * (a - b)).powf(-1.0 / exponent)
}

/// Parameters of the planar random-waypoint model: waypoint intensity and
/// the velocity and pause laws.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MobilityParams {
    pub lambda: f64,
    pub velocity: VelocityLaw,
    pub pause: PauseLaw,
}

impl MobilityParams {
    pub fn new(lambda: f64, velocity: VelocityLaw, pause: PauseLaw) -> Result<Self, ModelError> {
        let p = MobilityParams {
            lambda,
            velocity,
            pause,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<(), ModelError> {
        if !(self.lambda > 0.0) || !self.lambda.is_finite() {
            return Err(ModelError::InvalidParameter(format!(
                "lambda must be positive, got {}",
                self.lambda
            )));
        }
        self.velocity.validate()?;
        self.pause.validate()
    }

    /// E[L] = 1/(2√λ) for Rayleigh transition lengths.
    pub fn mean_transition_length(&self) -> f64 {
        0.5 / self.lambda.sqrt()
    }
}

/// Parameters of the truncated Levy walk: power-law transition lengths and
/// pauses, both truncated, with an explicit velocity law.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LevyParams {
    pub alpha: f64,
    pub beta: f64,
    pub l_min: f64,
    pub l_max: f64,
    pub s_min: f64,
    pub s_max: f64,
    pub velocity: VelocityLaw,
}

impl LevyParams {
    pub fn validate(&self) -> Result<(), ModelError> {
        if !(self.alpha > 0.0 && self.alpha < 2.0) {
            return Err(ModelError::InvalidParameter(format!(
                "levy alpha must lie in (0, 2), got {}",
                self.alpha
            )));
        }
        if !(self.beta > 0.0 && self.beta < 2.0) {
            return Err(ModelError::InvalidParameter(format!(
                "levy beta must lie in (0, 2), got {}",
                self.beta
            )));
        }
        if !(self.l_min > 0.0 && self.l_min < self.l_max) {
            return Err(ModelError::InvalidParameter(format!(
                "levy lengths need 0 < l_min < l_max, got [{}, {}]",
                self.l_min, self.l_max
            )));
        }
        if !(self.s_min > 0.0 && self.s_min <= self.s_max) {
            return Err(ModelError::InvalidParameter(format!(
                "levy pauses need 0 < s_min <= s_max, got [{}, {}]",
                self.s_min, self.s_max
            )));
        }
        self.velocity.validate()
    }

    pub fn mean_transition_length(&self) -> f64 {
        truncated_pareto_mean(self.alpha, self.l_min, self.l_max)
    }
}

/// Simulation window. The planar model runs on the infinite plane; finite
/// runs fold paths back in by specular reflection.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Window {
    Infinite,
    Reflect { width: f64, height: f64 },
}

impl Window {
    pub fn validate(&self) -> Result<(), ModelError> {
        match *self {
            Window::Infinite => Ok(()),
            Window::Reflect { width, height } if width > 0.0 && height > 0.0 => Ok(()),
            Window::Reflect { width, height } => Err(ModelError::InvalidParameter(format!(
                "reflecting window needs positive extent, got {width} x {height}"
            ))),
        }
    }

    fn contains(&self, p: Point) -> bool {
        match *self {
            Window::Infinite => true,
            Window::Reflect { width, height } => {
                p.x >= 0.0 && p.x <= width && p.y >= 0.0 && p.y <= height
            }
        }
    }
}

/// One straight movement leg: start and target waypoint, the velocity on
/// the way, and the pause on arrival.
///
/// With a reflecting window one logical movement period folds into several
/// chained legs sharing the same `period` index; the pause sits on the
/// last leg of the group.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MovementPeriod {
    pub period: usize,
    pub start: Point,
    pub end: Point,
    pub velocity: f64,
    pub pause: f64,
}

impl MovementPeriod {
    pub fn length(&self) -> f64 {
        self.start.dist(self.end)
    }

    pub fn travel_time(&self) -> f64 {
        self.length() / self.velocity
    }

    /// Travel time plus pause.
    pub fn duration(&self) -> f64 {
        self.travel_time() + self.pause
    }
}

/// An ordered movement trace. Consecutive entries chain exactly: each
/// entry starts where the previous one ended.
#[derive(Clone, Debug, PartialEq, Default)]
pub struct Trace {
    pub periods: Vec<MovementPeriod>,
}

impl Trace {
    pub fn len(&self) -> usize {
        self.periods.len()
    }

    pub fn is_empty(&self) -> bool {
        self.periods.is_empty()
    }

    /// Number of logical movement periods (waypoint draws).
    pub fn n_periods(&self) -> usize {
        self.periods.last().map_or(0, |p| p.period + 1)
    }

    /// Groups of legs belonging to one logical movement period.
    pub fn period_groups(&self) -> impl Iterator<Item = &[MovementPeriod]> {
        self.periods.chunk_by(|a, b| a.period == b.period)
    }

    /// Writes the trace as CSV with header `period,x0,y0,x1,y1,velocity,pause`.
    pub fn write_csv<W: Write>(&self, w: &mut W) -> std::io::Result<()> {
        writeln!(w, "period,x0,y0,x1,y1,velocity,pause")?;
        for p in &self.periods {
            writeln!(
                w,
                "{},{},{},{},{},{},{}",
                p.period, p.start.x, p.start.y, p.end.x, p.end.y, p.velocity, p.pause
            )?;
        }
        Ok(())
    }
}

/// Rayleigh transition-length draw by inverse transform:
/// `l = sqrt(-ln(1-u)/(λπ))`.
pub fn sample_transition_length(params: &MobilityParams, stream: &mut RandomStream) -> f64 {
    let u = stream.next_f64();
    transition_length_from_uniform(params.lambda, u)
}

#[inline]
pub(crate) fn transition_length_from_uniform(lambda: f64, u: f64) -> f64 {
    (-(1.0 - u).ln() / (lambda * PI)).sqrt()
}

/// Folds one straight move into the window by specular reflection,
/// preserving total path length. Returns the chain of straight legs.
fn reflect_move(start: Point, angle: f64, length: f64, width: f64, height: f64) -> Vec<(Point, Point)> {
    let mut dir = Point::unit(angle);
    let mut p = start;
    let mut remaining = length;
    let mut legs = Vec::with_capacity(1);
    loop {
        let tx = if dir.x > 0.0 {
            (width - p.x) / dir.x
        } else if dir.x < 0.0 {
            -p.x / dir.x
        } else {
            f64::INFINITY
        };
        let ty = if dir.y > 0.0 {
            (height - p.y) / dir.y
        } else if dir.y < 0.0 {
            -p.y / dir.y
        } else {
            f64::INFINITY
        };
        let t_wall = tx.min(ty).max(0.0);
        if t_wall >= remaining {
            legs.push((p, p + dir * remaining));
            return legs;
        }
        let mut q = p + dir * t_wall;
        // Land exactly on the wall so containment holds bit-exactly.
        if tx <= ty {
            q.x = if dir.x > 0.0 { width } else { 0.0 };
        }
        if ty <= tx {
            q.y = if dir.y > 0.0 { height } else { 0.0 };
        }
        if t_wall > 0.0 {
            legs.push((p, q));
        }
        if tx <= ty {
            dir.x = -dir.x;
        }
        if ty <= tx {
            dir.y = -dir.y;
        }
        remaining -= t_wall;
        p = q;
    }
}

struct MoveDraw {
    angle: f64,
    length: f64,
    velocity: f64,
    pause: f64,
}

fn push_move(
    trace: &mut Trace,
    period: usize,
    start: Point,
    draw: MoveDraw,
    window: &Window,
) -> Point {
    match *window {
        Window::Infinite => {
            let end = start + Point::unit(draw.angle) * draw.length;
            trace.periods.push(MovementPeriod {
                period,
                start,
                end,
                velocity: draw.velocity,
                pause: draw.pause,
            });
            end
        }
        Window::Reflect { width, height } => {
            let legs = reflect_move(start, draw.angle, draw.length, width, height);
            let n = legs.len();
            for (i, (a, b)) in legs.into_iter().enumerate() {
                trace.periods.push(MovementPeriod {
                    period,
                    start: a,
                    end: b,
                    velocity: draw.velocity,
                    pause: if i + 1 == n { draw.pause } else { 0.0 },
                });
            }
            trace.periods.last().map(|p| p.end).unwrap_or(start)
        }
    }
}

/// Generates a trace of the planar random-waypoint model: per period an
/// isotropic direction, a Rayleigh transition length, and independent
/// velocity and pause draws.
pub fn generate_rwp_trace(
    params: &MobilityParams,
    start: Point,
    n_periods: usize,
    window: &Window,
    stream: &mut RandomStream,
) -> Result<Trace, ModelError> {
    params.validate()?;
    window.validate()?;
    if !window.contains(start) {
        return Err(ModelError::StartOutsideWindow(start.x, start.y));
    }
    let mut trace = Trace::default();
    let mut pos = start;
    for period in 0..n_periods {
        let draw = MoveDraw {
            angle: stream.next_angle(),
            length: sample_transition_length(params, stream),
            velocity: params.velocity.sample(stream),
            pause: params.pause.sample(stream),
        };
        pos = push_move(&mut trace, period, pos, draw, window);
    }
    Ok(trace)
}

/// Generates a classical random-waypoint trace: waypoints i.i.d. uniform on
/// the finite window, with the same velocity and pause treatment.
pub fn generate_classical_rwp_trace(
    window: &Window,
    velocity: &VelocityLaw,
    pause: &PauseLaw,
    n_periods: usize,
    stream: &mut RandomStream,
) -> Result<Trace, ModelError> {
    velocity.validate()?;
    pause.validate()?;
    window.validate()?;
    let (width, height) = match *window {
        Window::Infinite => return Err(ModelError::InfiniteWindow),
        Window::Reflect { width, height } => (width, height),
    };
    let mut trace = Trace::default();
    let mut pos = Point::new(stream.next_range(0.0, width), stream.next_range(0.0, height));
    for period in 0..n_periods {
        let next = Point::new(stream.next_range(0.0, width), stream.next_range(0.0, height));
        trace.periods.push(MovementPeriod {
            period,
            start: pos,
            end: next,
            velocity: velocity.sample(stream),
            pause: pause.sample(stream),
        });
        pos = next;
    }
    Ok(trace)
}

/// Generates a truncated Levy walk: power-law transition lengths and pauses
/// (both truncated Pareto), isotropic directions.
pub fn generate_levy_trace(
    params: &LevyParams,
    start: Point,
    n_periods: usize,
    window: &Window,
    stream: &mut RandomStream,
) -> Result<Trace, ModelError> {
    params.validate()?;
    window.validate()?;
    if !window.contains(start) {
        return Err(ModelError::StartOutsideWindow(start.x, start.y));
    }
    let mut trace = Trace::default();
    let mut pos = start;
    for period in 0..n_periods {
        let draw = MoveDraw {
            angle: stream.next_angle(),
            length: sample_truncated_pareto(params.alpha, params.l_min, params.l_max, stream),
            velocity: params.velocity.sample(stream),
            pause: sample_truncated_pareto(params.beta, params.s_min, params.s_max, stream),
        };
        pos = push_move(&mut trace, period, pos, draw, window);
    }
    Ok(trace)
}
