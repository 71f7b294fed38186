//! Adaptive quadrature on Gauss–Kronrod 7–15 panels.
//!
//! The driver is globally adaptive with bisection subdivision: the panel
//! with the largest error estimate splits first, ties resolve to the
//! leftmost panel, and the final sum runs left to right, so results are
//! bit-stable across runs.

// The node and weight tables keep their published digits.
#![allow(clippy::excessive_precision)]

use super::NumericsError;

/// Tolerances and subdivision budget for the adaptive integrators.
#[derive(Clone, Copy, Debug)]
pub struct QuadSpec {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_subdivisions: usize,
}

impl QuadSpec {
    /// Defaults for one-dimensional integrals.
    pub fn default_1d() -> Self {
        QuadSpec {
            rel_tol: 1e-8,
            abs_tol: 1e-12,
            max_subdivisions: 2000,
        }
    }

    /// Defaults for the two-dimensional triangle integrals.
    pub fn default_2d() -> Self {
        QuadSpec {
            rel_tol: 1e-6,
            abs_tol: 1e-12,
            max_subdivisions: 400,
        }
    }

    fn validate(&self) -> Result<(), NumericsError> {
        if !(self.rel_tol > 0.0) || !self.rel_tol.is_finite() {
            return Err(NumericsError::Domain("rel_tol must be positive".into()));
        }
        if !(self.abs_tol >= 0.0) || !self.abs_tol.is_finite() {
            return Err(NumericsError::Domain("abs_tol must be nonnegative".into()));
        }
        if self.max_subdivisions < 1 {
            return Err(NumericsError::Domain(
                "max_subdivisions must be at least 1".into(),
            ));
        }
        Ok(())
    }
}

/// A quadrature result with its conservative error bound.
#[derive(Clone, Copy, Debug)]
pub struct Quadrature {
    pub value: f64,
    pub error_bound: f64,
    pub subdivisions: usize,
}

// Gauss-Kronrod 7-15 abscissae and weights on [-1, 1] (QUADPACK dqk15).
const XGK: [f64; 8] = [
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144838258730,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
];
const WGK: [f64; 8] = [
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
];
const WG: [f64; 4] = [
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
];

#[derive(Clone, Copy)]
struct Panel {
    a: f64,
    b: f64,
    value: f64,
    err: f64,
}

/// One GK15 panel with the QUADPACK error estimate.
fn gk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> Panel {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);

    let mut resg = WG[3] * fc;
    let mut resk = WGK[7] * fc;
    let mut resabs = WGK[7] * fc.abs();
    let mut fv = [0.0f64; 15];
    fv[7] = fc;

    for i in 0..7 {
        let x = half * XGK[i];
        let f1 = f(center - x);
        let f2 = f(center + x);
        fv[i] = f1;
        fv[14 - i] = f2;
        resk += WGK[i] * (f1 + f2);
        resabs += WGK[i] * (f1.abs() + f2.abs());
        if i % 2 == 1 {
            resg += WG[i / 2] * (f1 + f2);
        }
    }

    let reskh = 0.5 * resk;
    let mut resasc = WGK[7] * (fc - reskh).abs();
    for i in 0..7 {
        resasc += WGK[i] * ((fv[i] - reskh).abs() + (fv[14 - i] - reskh).abs());
    }

    let value = resk * half;
    let resabs = resabs * half.abs();
    let resasc = resasc * half.abs();
    let mut err = ((resk - resg) * half).abs();
    if resasc != 0.0 && err != 0.0 {
        err = resasc * (200.0 * err / resasc).powf(1.5).min(1.0);
    }
    let tiny = f64::MIN_POSITIVE / (50.0 * f64::EPSILON);
    if resabs > tiny {
        err = err.max(50.0 * f64::EPSILON * resabs);
    }
    Panel { a, b, value, err }
}

fn ordered_sums(panels: &[Panel]) -> (f64, f64) {
    let mut value = 0.0;
    let mut err = 0.0;
    for p in panels {
        value += p.value;
        err += p.err;
    }
    (value, err)
}

/// Adaptive estimate of `∫_a^b f` with estimated error at most
/// `max(abs_tol, rel_tol·|result|)`.
///
/// Exceeding the subdivision budget returns a convergence failure that
/// carries the best estimate and its error bound.
pub fn integrate_1d<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    spec: &QuadSpec,
) -> Result<Quadrature, NumericsError> {
    spec.validate()?;
    if !(a < b) || !a.is_finite() || !b.is_finite() {
        return Err(NumericsError::Domain(format!(
            "integration bounds must be finite with a < b, got [{a}, {b}]"
        )));
    }

    // Panels stay ordered by position: a split replaces the parent by its
    // two halves in place, so the final summation runs left to right.
    let mut panels = vec![gk15(&f, a, b)];
    let mut subdivisions = 0usize;

    loop {
        let (value, err) = ordered_sums(&panels);
        let tol = spec.abs_tol.max(spec.rel_tol * value.abs());
        if err <= tol {
            return Ok(Quadrature {
                value,
                error_bound: err,
                subdivisions,
            });
        }
        if subdivisions >= spec.max_subdivisions {
            return Err(NumericsError::Convergence {
                estimate: value,
                error_bound: err,
                subdivisions,
            });
        }

        let mut worst = 0usize;
        for (i, p) in panels.iter().enumerate() {
            if p.err > panels[worst].err {
                worst = i;
            }
        }
        let Panel { a: pa, b: pb, .. } = panels[worst];
        let mid = 0.5 * (pa + pb);
        if mid <= pa || mid >= pb {
            // Interval at floating-point resolution; cannot refine further.
            return Err(NumericsError::Convergence {
                estimate: value,
                error_bound: err,
                subdivisions,
            });
        }
        panels[worst] = gk15(&f, pa, mid);
        panels.insert(worst + 1, gk15(&f, mid, pb));
        subdivisions += 1;
    }
}

/// `∫_0^∞ f(t) dt` through the substitution `t = u/(1-u)`, which maps the
/// half line onto (0, 1).
pub fn integrate_semi_infinite<F: Fn(f64) -> f64>(
    f: F,
    spec: &QuadSpec,
) -> Result<Quadrature, NumericsError> {
    integrate_1d(
        |u| {
            let w = 1.0 - u;
            f(u / w) / (w * w)
        },
        0.0,
        1.0,
        spec,
    )
}

/// Adaptive estimate of `∫∫ f(α, β) dβ dα` over the triangle
/// `{0 < α < π, 0 < β < π - α}`.
///
/// The inner integral substitutes `β = (π - α)u`, `u ∈ (0, 1)`, which keeps
/// the near-degenerate corner `α + β → π` away from the quadrature nodes.
pub fn integrate_2d<F: Fn(f64, f64) -> f64>(
    f: F,
    spec: &QuadSpec,
) -> Result<Quadrature, NumericsError> {
    spec.validate()?;
    let inner_spec = QuadSpec {
        rel_tol: spec.rel_tol * 0.1,
        abs_tol: spec.abs_tol * 0.1,
        max_subdivisions: spec.max_subdivisions,
    };
    let inner_failure = std::cell::RefCell::new(None::<NumericsError>);
    let outer = integrate_1d(
        |alpha| {
            let span = std::f64::consts::PI - alpha;
            let inner = integrate_1d(|u| f(alpha, span * u), 0.0, 1.0, &inner_spec);
            match inner {
                Ok(q) => span * q.value,
                Err(e) => {
                    if let NumericsError::Convergence { estimate, .. } = e {
                        inner_failure.borrow_mut().get_or_insert(e.clone());
                        span * estimate
                    } else {
                        *inner_failure.borrow_mut() = Some(e);
                        0.0
                    }
                }
            }
        },
        0.0,
        std::f64::consts::PI,
        spec,
    )?;
    match inner_failure.into_inner() {
        None => Ok(outer),
        Some(NumericsError::Convergence { .. }) => Err(NumericsError::Convergence {
            estimate: outer.value,
            error_bound: outer.error_bound,
            subdivisions: outer.subdivisions,
        }),
        Some(e) => Err(e),
    }
}
