//! Poisson-Voronoi network model: PPP sampling, nearest-site queries and
//! cell walks, the closed-form handover rate, and the sojourn-time
//! distribution built on the linear contact density.

use crate::analytics::{mean_transition_time, moving_fraction, AnalyticsError};
use crate::geom::{Point, Rect, Segment};
use crate::models::MobilityParams;
use crate::numerics::{
    integrate_1d, integrate_2d, q_inverse, NumericsError, QuadSpec, RandomStream,
};
use std::f64::consts::PI;

#[derive(Debug, Clone, thiserror::Error)]
pub enum VoronoiError {
    #[error("point field must contain at least one site")]
    EmptyField,
    #[error("site ({0}, {1}) lies outside the generation region")]
    SiteOutsideRegion(f64, f64),
    #[error("cell walk exceeded {0} steps; the input is degenerate")]
    WalkStalled(usize),
    #[error("domain error: {0}")]
    Domain(String),
    #[error(transparent)]
    Numerics(#[from] NumericsError),
    #[error(transparent)]
    Analytics(#[from] AnalyticsError),
}

/// Default guard margin around an observation region: the Voronoi cell of a
/// site is determined by its near neighbors, and 6/√μ of slack keeps the
/// edge-effect bias on crossing counts below measurement noise.
pub fn default_guard_margin(mu: f64) -> f64 {
    6.0 / mu.sqrt()
}

const WALK_STEP_LIMIT: usize = 1_000_000;

/// A finite planar set of base-station sites with its generation region and
/// guard margin. Queries are only valid inside the observation window (the
/// generation region shrunk by the guard).
#[derive(Clone, Debug)]
pub struct PointField {
    points: Vec<Point>,
    generation_region: Rect,
    observation_window: Rect,
    guard_margin: f64,
    index: Option<GridIndex>,
}

impl PointField {
    pub fn new(
        points: Vec<Point>,
        generation_region: Rect,
        guard_margin: f64,
    ) -> Result<Self, VoronoiError> {
        let observation_window = generation_region.shrink(guard_margin);
        Self::with_windows(points, generation_region, observation_window, guard_margin)
    }

    /// Constructor with both rectangles stated explicitly, so callers that
    /// sampled into an expanded region keep their observation window
    /// bit-exact rather than recovering it by arithmetic.
    pub fn with_windows(
        points: Vec<Point>,
        generation_region: Rect,
        observation_window: Rect,
        guard_margin: f64,
    ) -> Result<Self, VoronoiError> {
        if points.is_empty() {
            return Err(VoronoiError::EmptyField);
        }
        for p in &points {
            if !generation_region.contains(*p) {
                return Err(VoronoiError::SiteOutsideRegion(p.x, p.y));
            }
        }
        Ok(PointField {
            points,
            generation_region,
            observation_window,
            guard_margin,
            index: None,
        })
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn generation_region(&self) -> Rect {
        self.generation_region
    }

    pub fn guard_margin(&self) -> f64 {
        self.guard_margin
    }

    /// Where queries are valid: the generation region minus the guard.
    pub fn observation_window(&self) -> Rect {
        self.observation_window
    }

    /// Builds the uniform grid-bucket index used to accelerate
    /// nearest-site queries.
    pub fn with_index(mut self) -> Self {
        self.index = Some(GridIndex::build(&self.points, &self.generation_region));
        self
    }

    /// Index of the site closest to `p`; exact ties resolve to the smallest
    /// site index.
    pub fn nearest(&self, p: Point) -> usize {
        match &self.index {
            Some(idx) => idx.nearest(&self.points, p),
            None => nearest_linear(&self.points, p),
        }
    }
}

fn nearest_linear(points: &[Point], p: Point) -> usize {
    let mut best = 0usize;
    let mut best_d = p.dist2(points[0]);
    for (i, site) in points.iter().enumerate().skip(1) {
        let d = p.dist2(*site);
        if d < best_d {
            best = i;
            best_d = d;
        }
    }
    best
}

/// Uniform grid bucketing over the generation region.
#[derive(Clone, Debug)]
struct GridIndex {
    x0: f64,
    y0: f64,
    cell: f64,
    nx: usize,
    ny: usize,
    buckets: Vec<Vec<u32>>,
}

impl GridIndex {
    fn build(points: &[Point], region: &Rect) -> Self {
        let n = points.len().max(1);
        let area = region.area().max(f64::MIN_POSITIVE);
        let cell = (area / n as f64).sqrt().max(1e-12);
        let nx = (region.width() / cell).ceil().max(1.0) as usize;
        let ny = (region.height() / cell).ceil().max(1.0) as usize;
        let mut buckets = vec![Vec::new(); nx * ny];
        let clamp = |v: f64, hi: usize| (v.max(0.0) as usize).min(hi - 1);
        for (i, p) in points.iter().enumerate() {
            let bx = clamp((p.x - region.x_min) / cell, nx);
            let by = clamp((p.y - region.y_min) / cell, ny);
            buckets[by * nx + bx].push(i as u32);
        }
        GridIndex {
            x0: region.x_min,
            y0: region.y_min,
            cell,
            nx,
            ny,
            buckets,
        }
    }

    fn nearest(&self, points: &[Point], p: Point) -> usize {
        let clamp = |v: f64, hi: usize| (v.max(0.0) as usize).min(hi - 1);
        let bx = clamp((p.x - self.x0) / self.cell, self.nx) as isize;
        let by = clamp((p.y - self.y0) / self.cell, self.ny) as isize;
        let mut best = usize::MAX;
        let mut best_d = f64::INFINITY;
        let max_ring = self.nx.max(self.ny) as isize;
        for ring in 0..=max_ring {
            // A site in a bucket at Chebyshev distance `ring` is at least
            // (ring - 1) cells away; stop once that exceeds the best match.
            if best < usize::MAX && (ring - 1) as f64 * self.cell > best_d.sqrt() {
                break;
            }
            for dy in -ring..=ring {
                for dx in -ring..=ring {
                    if dx.abs().max(dy.abs()) != ring {
                        continue;
                    }
                    let (x, y) = (bx + dx, by + dy);
                    if x < 0 || y < 0 || x >= self.nx as isize || y >= self.ny as isize {
                        continue;
                    }
                    for &i in &self.buckets[y as usize * self.nx + x as usize] {
                        let i = i as usize;
                        let d = p.dist2(points[i]);
                        if d < best_d || (d == best_d && i < best) {
                            best = i;
                            best_d = d;
                        }
                    }
                }
            }
        }
        best
    }
}

/// Draws one Poisson variate by Knuth's product method, chunked so the
/// exponential never underflows.
fn sample_poisson(mean: f64, stream: &mut RandomStream) -> usize {
    let mut remaining = mean;
    let mut count = 0usize;
    while remaining > 0.0 {
        let chunk = remaining.min(256.0);
        let floor = (-chunk).exp();
        let mut prod = 1.0f64;
        loop {
            prod *= stream.next_f64();
            if prod <= floor {
                break;
            }
            count += 1;
        }
        remaining -= chunk;
    }
    count
}

/// Samples a homogeneous PPP of intensity `mu` whose generation region is
/// the caller's region expanded by the default guard margin, so Voronoi
/// cells near the caller region are edge-effect free.
pub fn sample_ppp(
    mu: f64,
    region: Rect,
    stream: &mut RandomStream,
) -> Result<PointField, VoronoiError> {
    if !(mu > 0.0) || !mu.is_finite() {
        return Err(VoronoiError::Domain(format!(
            "intensity must be positive, got {mu}"
        )));
    }
    let guard = default_guard_margin(mu);
    let generation = region.expand(guard);
    if generation.is_empty() {
        return Err(VoronoiError::Domain(
            "generation region must be nonempty".into(),
        ));
    }
    let mut points = Vec::new();
    loop {
        let count = sample_poisson(mu * generation.area(), stream);
        points.clear();
        points.reserve(count);
        for _ in 0..count {
            points.push(Point::new(
                stream.next_range(generation.x_min, generation.x_max),
                stream.next_range(generation.y_min, generation.y_max),
            ));
        }
        // An empty draw cannot support any query; it has vanishing
        // probability at the intensities in use.
        if !points.is_empty() {
            break;
        }
    }
    PointField::with_windows(points, generation, region, guard)
}

/// Outcome of one bisector-walk step: the earliest parameter in `(after, 1]`
/// at which some other site becomes closer than `current`.
fn next_bisector_crossing(
    points: &[Point],
    current: usize,
    seg: &Segment,
    after: f64,
) -> Option<f64> {
    let a = seg.a;
    let v = seg.direction();
    let site = points[current];
    let da = a - site;
    let mut best: Option<f64> = None;
    for (j, other) in points.iter().enumerate() {
        if j == current {
            continue;
        }
        let dj = a - *other;
        // g(t) = |P(t)-x_j|^2 - |P(t)-x_s|^2 is linear in t; a crossing into
        // j needs a negative slope.
        let g0 = dj.norm2() - da.norm2();
        let slope = 2.0 * v.dot(site - *other);
        if slope >= 0.0 {
            continue;
        }
        let t = -g0 / slope;
        if t > after && t <= 1.0 && best.is_none_or(|b| t < b) {
            best = Some(t);
        }
    }
    best
}

/// Exact number of Voronoi-boundary crossings along the open segment, by
/// the incremental bisector walk.
///
/// The walk advances past each crossing with a +1e-9 relative parametric
/// nudge and re-queries the nearest site, which resolves measure-zero
/// vertex hits without double counting.
pub fn count_voronoi_crossings(field: &PointField, seg: &Segment) -> Result<usize, VoronoiError> {
    let window = field.observation_window();
    assert!(
        window.contains(seg.a) && window.contains(seg.b),
        "segment endpoints must lie inside the observation window"
    );
    const NUDGE: f64 = 1e-9;
    let mut t = 0.0f64;
    let mut cell = field.nearest(seg.a);
    let mut count = 0usize;
    for _ in 0..WALK_STEP_LIMIT {
        let Some(t_cross) = next_bisector_crossing(&field.points, cell, seg, t) else {
            return Ok(count);
        };
        t = (t_cross + NUDGE).min(1.0);
        let next = field.nearest(seg.point_at(t));
        if next != cell {
            count += 1;
            cell = next;
        }
        if t >= 1.0 {
            return Ok(count);
        }
    }
    Err(VoronoiError::WalkStalled(WALK_STEP_LIMIT))
}

/// Distance from `origin` to the first Voronoi-cell boundary along `dir`,
/// up to `max_len`; `None` when no boundary is hit within range.
pub fn first_boundary_hit(
    field: &PointField,
    origin: Point,
    direction: f64,
    max_len: f64,
) -> Result<Option<f64>, VoronoiError> {
    let seg = Segment::new(origin, origin + Point::unit(direction) * max_len);
    let window = field.observation_window();
    assert!(
        window.contains(seg.a) && window.contains(seg.b),
        "probe segment must lie inside the observation window"
    );
    const NUDGE: f64 = 1e-9;
    let mut t = 0.0f64;
    let cell = field.nearest(origin);
    for _ in 0..WALK_STEP_LIMIT {
        let Some(t_cross) = next_bisector_crossing(&field.points, cell, &seg, t) else {
            return Ok(None);
        };
        t = (t_cross + NUDGE).min(1.0);
        if field.nearest(seg.point_at(t)) != cell {
            return Ok(Some(t_cross * max_len));
        }
        if t >= 1.0 {
            return Ok(None);
        }
    }
    Err(VoronoiError::WalkStalled(WALK_STEP_LIMIT))
}

/// Expected handovers per movement period on a Poisson-Voronoi layout:
/// `E[N] = (2/π)·sqrt(μ/λ)`.
pub fn expected_handovers_pvt(mu: f64, lambda: f64) -> f64 {
    assert!(mu > 0.0 && lambda > 0.0, "intensities must be positive");
    2.0 / PI * (mu / lambda).sqrt()
}

/// Handover rate `H = E[N]/(E[T]+E[S])`; with no pause and constant
/// velocity ν this reduces to `(4/π)·ν·sqrt(μ)`.
pub fn handover_rate_pvt(params: &MobilityParams, mu: f64) -> Result<f64, AnalyticsError> {
    let en = expected_handovers_pvt(mu, params.lambda);
    let et = mean_transition_time(params)?;
    let p = moving_fraction(params)?;
    Ok(en * p / et)
}

/// The closed-form linear-contact integrand over the `(α, β)` triangle.
#[derive(Clone, Copy, Debug)]
pub struct LinearContactIntegrand {
    pub mu: f64,
}

impl LinearContactIntegrand {
    fn a0(theta: f64) -> f64 {
        1.0 - theta / PI
    }

    fn a1(theta: f64) -> f64 {
        (2.0 * theta).sin() / (2.0 * PI)
    }

    fn b0(beta: f64) -> f64 {
        ((PI - beta) * beta.cos() + beta.sin()) / PI
    }

    /// Area of the union of the two discs pinned by the triangle geometry.
    pub fn v2(&self, r: f64, alpha: f64, beta: f64) -> f64 {
        let s = (alpha + beta).sin();
        let rho = r * beta.sin() / s;
        let third2 = r * r + rho * rho - 2.0 * r * rho * alpha.cos();
        PI * rho * rho * (Self::a0(alpha) + Self::a1(alpha))
            + PI * third2 * (Self::a0(beta) + Self::a1(beta))
    }

    /// Integrand of the double integral defining the contact density.
    pub fn eval(&self, r: f64, alpha: f64, beta: f64) -> f64 {
        let s = (alpha + beta).sin();
        if s <= 0.0 {
            return 0.0;
        }
        let exponent = self.mu * self.v2(r, alpha, beta);
        if exponent > 700.0 {
            // exp underflows long before the prefactor can overflow.
            return 0.0;
        }
        r.powi(3) * alpha.sin().powi(2) * beta.sin() / s.powi(4)
            * Self::b0(beta)
            * (-exponent).exp()
    }
}

/// Linear contact density `h_l(r)` of the Poisson-Voronoi boundary set:
/// `h_l(r) = 4πμ² ∫∫ r³ sin²α sinβ / sin⁴(α+β) · b₀(β) · e^{-μV₂} dβ dα`
/// over `{0 < α < π, 0 < β < π - α}`.
///
/// At exactly r = 0 the cubic prefactor makes the value 0, but the
/// right-limit is positive: the corner divergence of the double integral
/// cancels the prefactor, and `h_l(0+) = 4√μ/π`, the boundary-crossing
/// intensity per unit length. The discontinuity is a single point and does
/// not affect any integral of the density.
pub fn linear_contact_density(mu: f64, r: f64) -> Result<f64, NumericsError> {
    linear_contact_density_with_spec(mu, r, &QuadSpec::default_2d())
}

pub fn linear_contact_density_with_spec(
    mu: f64,
    r: f64,
    spec: &QuadSpec,
) -> Result<f64, NumericsError> {
    assert!(mu > 0.0, "intensity must be positive");
    assert!(r >= 0.0, "contact distance must be nonnegative");
    if r == 0.0 {
        return Ok(0.0);
    }
    // As r -> 0 the mass of the double integral migrates into nested
    // boundary layers of width ~r at the degenerate corner, which the
    // quadrature resolves poorly, while the density itself flattens at its
    // right-limit. Below r sqrt(mu) = 1e-4 the limit matches the integral
    // to better than 5e-5 relative (the deviation shrinks linearly in r).
    if r * mu.sqrt() < 1e-4 {
        return Ok(4.0 * mu.sqrt() / PI);
    }
    let integrand = LinearContactIntegrand { mu };
    let q = integrate_2d(|alpha, beta| integrand.eval(r, alpha, beta), spec)?;
    Ok(4.0 * PI * mu * mu * q.value)
}

/// Sojourn-time distribution on a grid: pdf and cdf of the time spent in
/// the cell containing the start of the movement period.
#[derive(Clone, Debug)]
pub struct SojournPoint {
    pub t: f64,
    pub pdf: f64,
    pub cdf: f64,
}

#[derive(Clone, Debug)]
pub struct SojournDistribution {
    pub mean_transition_time: f64,
    pub lambda: f64,
    pub mu: f64,
    pub grid: Vec<SojournPoint>,
}

impl SojournDistribution {
    /// Mean sojourn time from the grid by the tail formula
    /// `E[S_T] = ∫ (1 - F) dt`, extended to `E[T]` where F pins to one.
    pub fn mean(&self) -> f64 {
        let mut acc = 0.0;
        for w in self.grid.windows(2) {
            acc += (1.0 - 0.5 * (w[0].cdf + w[1].cdf)) * (w[1].t - w[0].t);
        }
        if let Some(last) = self.grid.last() {
            acc += (1.0 - last.cdf) * (self.mean_transition_time - last.t);
        }
        acc
    }
}

/// Distribution of the sojourn time `S_T` in the Poisson-Voronoi cell of
/// the typical point, on the caller's time grid in `[0, E[T])`.
///
/// `f(t) = exp(Q⁻¹(p)²/2) · h_l(x) / (2√λ·E[T])` with `p = (1 - t/E[T])/2`
/// and `x = Q⁻¹(p)/√(2πλ)`; the cdf accumulates `∫ h_l` between the mapped
/// grid abscissae, and `F(t) = 1` for `t ≥ E[T]`.
pub fn sojourn_distribution_pvt(
    params: &MobilityParams,
    mu: f64,
    t_grid: &[f64],
) -> Result<SojournDistribution, VoronoiError> {
    assert!(mu > 0.0, "intensity must be positive");
    let et = mean_transition_time(params)?;
    if t_grid.is_empty() {
        return Err(VoronoiError::Domain("time grid must be nonempty".into()));
    }
    for w in t_grid.windows(2) {
        if w[1] <= w[0] {
            return Err(VoronoiError::Domain(
                "time grid must be strictly increasing".into(),
            ));
        }
    }
    if t_grid[0] < 0.0 || *t_grid.last().unwrap() >= et {
        return Err(VoronoiError::Domain(format!(
            "time grid must lie within [0, E[T]) = [0, {et})"
        )));
    }

    let lambda = params.lambda;
    let sqrt_2pl = (2.0 * PI * lambda).sqrt();
    let pdf_spec = QuadSpec::default_2d();
    let cdf_spec = QuadSpec {
        rel_tol: 1e-5,
        abs_tol: 1e-10,
        max_subdivisions: 400,
    };

    let mut grid = Vec::with_capacity(t_grid.len());
    let mut prev_x = 0.0f64;
    let mut cdf = 0.0f64;
    for &t in t_grid {
        let p = 0.5 * (1.0 - t / et);
        let xq = if t == 0.0 { 0.0 } else { q_inverse(p)? };
        let x = xq / sqrt_2pl;
        let pdf = if x == 0.0 {
            0.0
        } else {
            (0.5 * xq * xq).exp() / (2.0 * lambda.sqrt() * et)
                * linear_contact_density_with_spec(mu, x, &pdf_spec)?
        };
        if x > prev_x {
            let inner_failure = std::cell::RefCell::new(None::<NumericsError>);
            let inc = integrate_1d(
                |r| {
                    if r == 0.0 {
                        return 0.0;
                    }
                    linear_contact_density_with_spec(mu, r, &cdf_spec).unwrap_or_else(|e| {
                        inner_failure.borrow_mut().get_or_insert(e);
                        0.0
                    })
                },
                prev_x,
                x,
                &QuadSpec {
                    rel_tol: 1e-5,
                    abs_tol: 1e-9,
                    max_subdivisions: 200,
                },
            )?;
            if let Some(e) = inner_failure.into_inner() {
                return Err(e.into());
            }
            cdf = (cdf + inc.value).min(1.0);
            prev_x = x;
        }
        grid.push(SojournPoint { t, pdf, cdf });
    }

    Ok(SojournDistribution {
        mean_transition_time: et,
        lambda,
        mu,
        grid,
    })
}
