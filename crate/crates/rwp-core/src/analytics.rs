//! Closed-form stochastic properties of the planar random-waypoint model:
//! transition time, direction switch rate, and the waypoint and spatial
//! node distributions.

use crate::models::{MobilityParams, PauseLaw, VelocityLaw};
use crate::numerics::{integrate_1d, q_raw, NumericsError, QuadSpec};
use std::f64::consts::PI;

#[derive(Debug, Clone, thiserror::Error)]
pub enum AnalyticsError {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("diverging expectation: {0}")]
    Divergence(String),
    #[error("the spatial density has an integrable pole at r = 0; evaluate at r > 0")]
    SingularPoint,
    #[error(transparent)]
    Numerics(#[from] NumericsError),
}

/// P(T > t | params) where T = L/V is the transition time.
///
/// For a constant velocity this is `exp(-λπν²t²)`; for a uniform velocity
/// range the mixture integrates in closed form through the Gaussian tail.
fn transition_time_survival(params: &MobilityParams, t: f64) -> f64 {
    if t <= 0.0 {
        return 1.0;
    }
    let lambda = params.lambda;
    match params.velocity {
        VelocityLaw::Constant(v) => (-lambda * PI * v * v * t * t).exp(),
        VelocityLaw::UniformRange { min, max } => {
            if min == max {
                return (-lambda * PI * min * min * t * t).exp();
            }
            let scale = (2.0 * lambda * PI).sqrt() * t;
            if scale * max < 1e-6 {
                // Series for tiny arguments, where the Q difference cancels.
                let m2 = (min * min + min * max + max * max) / 3.0;
                return 1.0 - lambda * PI * t * t * m2;
            }
            (q_raw(scale * min) - q_raw(scale * max)) / (lambda.sqrt() * t * (max - min))
        }
    }
}

/// Cdf of the transition time T.
pub fn transition_time_cdf(params: &MobilityParams, t: f64) -> Result<f64, AnalyticsError> {
    if !(t >= 0.0) {
        return Err(AnalyticsError::Domain(format!(
            "transition time must be nonnegative, got {t}"
        )));
    }
    Ok(1.0 - transition_time_survival(params, t))
}

/// Helper of the uniform-velocity transition-time density:
/// `g(x) = x e^{-λπt²x²} + Q(√(2πλ) t x)/(√λ t)`, non-increasing in x.
fn transition_time_g(lambda: f64, t: f64, x: f64) -> f64 {
    x * (-lambda * PI * t * t * x * x).exp()
        + q_raw((2.0 * PI * lambda).sqrt() * t * x) / (lambda.sqrt() * t)
}

/// Pdf of the transition time T.
pub fn transition_time_pdf(params: &MobilityParams, t: f64) -> Result<f64, AnalyticsError> {
    if !(t >= 0.0) {
        return Err(AnalyticsError::Domain(format!(
            "transition time must be nonnegative, got {t}"
        )));
    }
    if t == 0.0 {
        return Ok(0.0);
    }
    let lambda = params.lambda;
    Ok(match params.velocity {
        VelocityLaw::Constant(v) => {
            2.0 * PI * lambda * v * v * t * (-lambda * PI * v * v * t * t).exp()
        }
        VelocityLaw::UniformRange { min, max } => {
            if min == max {
                2.0 * PI * lambda * min * min * t * (-lambda * PI * min * min * t * t).exp()
            } else {
                (transition_time_g(lambda, t, min) - transition_time_g(lambda, t, max))
                    / ((max - min) * t)
            }
        }
    })
}

/// E[T] = E[L]·E[1/V]: `1/(2ν√λ)` for constant velocity and
/// `(ln v_max - ln v_min)/(2√λ (v_max - v_min))` for a uniform range.
pub fn mean_transition_time(params: &MobilityParams) -> Result<f64, AnalyticsError> {
    if let VelocityLaw::UniformRange { min, .. } = params.velocity {
        if min <= 0.0 {
            return Err(AnalyticsError::Divergence(
                "mean transition time diverges as v_min -> 0".into(),
            ));
        }
    }
    Ok(params.mean_transition_length() * params.velocity.mean_inverse())
}

/// Fraction of time spent moving: `p = E[T]/(E[T] + E[S])`.
pub fn moving_fraction(params: &MobilityParams) -> Result<f64, AnalyticsError> {
    let t = mean_transition_time(params)?;
    Ok(t / (t + params.pause.mean()))
}

/// Cdf of the direction switch rate `D = 1/(T + S)`:
/// `P(D <= d) = E_{V,S}[exp(-λπV²·max(1/d - S, 0)²)]`.
///
/// Derived from the definition; at `S = 0` it reduces to `P(T >= 1/d)`.
pub fn switch_rate_cdf(params: &MobilityParams, d: f64) -> Result<f64, AnalyticsError> {
    if !(d > 0.0) {
        return Err(AnalyticsError::Domain(format!(
            "switch rate must be positive, got {d}"
        )));
    }
    let horizon = 1.0 / d;
    match params.pause {
        PauseLaw::NoPause => Ok(transition_time_survival(params, horizon)),
        PauseLaw::Constant(s) => Ok(transition_time_survival(params, (horizon - s).max(0.0))),
        PauseLaw::TruncatedPowerLaw { beta, s_min, s_max } => {
            // Split at s = horizon: pauses at least that long force D <= d.
            let norm = beta / (s_min.powf(-beta) - s_max.powf(-beta));
            let cdf_s = |s: f64| -> f64 {
                if s <= s_min {
                    0.0
                } else if s >= s_max {
                    1.0
                } else {
                    (s_min.powf(-beta) - s.powf(-beta)) * norm / beta
                }
            };
            let mut total = 1.0 - cdf_s(horizon);
            if horizon > s_min {
                let hi = horizon.min(s_max);
                let q = integrate_1d(
                    |s| {
                        norm * s.powf(-1.0 - beta)
                            * transition_time_survival(params, horizon - s)
                    },
                    s_min,
                    hi,
                    &QuadSpec::default_1d(),
                )?;
                total += q.value;
            }
            Ok(total.clamp(0.0, 1.0))
        }
    }
}

/// Density of the next waypoint at distance r: `λ·exp(-λπr²)`.
pub fn waypoint_pdf(lambda: f64, r: f64) -> f64 {
    lambda * (-lambda * PI * r * r).exp()
}

/// Spatial node density between two waypoints, pause-free:
/// `(√λ/(πr))·exp(-λπr²)`. The pole at r = 0 is integrable.
pub fn spatial_pdf(lambda: f64, r: f64) -> Result<f64, AnalyticsError> {
    if r == 0.0 {
        return Err(AnalyticsError::SingularPoint);
    }
    if !(r > 0.0) {
        return Err(AnalyticsError::Domain(format!(
            "radius must be positive, got {r}"
        )));
    }
    Ok(lambda.sqrt() / (PI * r) * (-lambda * PI * r * r).exp())
}

/// Spatial node density with pauses: the moving-time fraction mixes the
/// pause-free density with the waypoint density.
pub fn spatial_pdf_with_pause(params: &MobilityParams, r: f64) -> Result<f64, AnalyticsError> {
    let p = moving_fraction(params)?;
    Ok(p * spatial_pdf(params.lambda, r)? + (1.0 - p) * waypoint_pdf(params.lambda, r))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::integrate_semi_infinite;

    fn constant(lambda: f64, v: f64) -> MobilityParams {
        MobilityParams::new(lambda, VelocityLaw::Constant(v), PauseLaw::NoPause).unwrap()
    }

    #[test]
    fn transition_time_cdf_examples() {
        let p = constant(1.0 / PI, 1.0);
        let got = transition_time_cdf(&p, 1.0).unwrap();
        assert!((got - (1.0 - (-1.0f64).exp())).abs() < 1e-14);
        assert_eq!(transition_time_cdf(&p, 0.0).unwrap(), 0.0);
        assert!(transition_time_cdf(&p, -1.0).is_err());
    }

    #[test]
    fn uniform_velocity_cdf_bracketed_by_constant_cases() {
        let uniform = MobilityParams::new(
            1.0,
            VelocityLaw::UniformRange { min: 1.0, max: 2.0 },
            PauseLaw::NoPause,
        )
        .unwrap();
        let got = transition_time_cdf(&uniform, 1.0).unwrap();
        let slow = 1.0 - (-PI).exp();
        let fast = 1.0 - (-4.0 * PI).exp();
        assert!(got > slow && got < fast, "got = {got}");
    }

    #[test]
    fn transition_time_cdf_monotone_and_saturates() {
        let cases = [
            constant(0.25, 2.0),
            MobilityParams::new(
                1.0,
                VelocityLaw::UniformRange { min: 0.5, max: 3.0 },
                PauseLaw::NoPause,
            )
            .unwrap(),
        ];
        for p in cases {
            let et = mean_transition_time(&p).unwrap();
            let mut prev = -1.0;
            for i in 0..200 {
                let t = et * i as f64 / 20.0;
                let c = transition_time_cdf(&p, t).unwrap();
                assert!(c >= prev - 1e-13, "not monotone at t={t}");
                prev = c;
            }
            let far = transition_time_cdf(&p, 1e3 * et).unwrap();
            assert!((far - 1.0).abs() < 1e-12, "cdf at 1e3 E[T] = {far}");
        }
    }

    #[test]
    fn pdf_matches_cdf_by_finite_differences() {
        let p = MobilityParams::new(
            2.0,
            VelocityLaw::UniformRange { min: 0.8, max: 2.5 },
            PauseLaw::NoPause,
        )
        .unwrap();
        let et = mean_transition_time(&p).unwrap();
        let h = 1e-6;
        for i in 1..=40 {
            let t = 0.1 * et + (3.0 * et) * i as f64 / 40.0;
            let pdf = transition_time_pdf(&p, t).unwrap();
            let fd = (transition_time_cdf(&p, t + h).unwrap()
                - transition_time_cdf(&p, t - h).unwrap())
                / (2.0 * h);
            assert!((pdf - fd).abs() <= 1e-5, "t={t}: pdf {pdf}, fd {fd}");
        }
    }

    #[test]
    fn g_helper_is_non_increasing() {
        for (lambda, t) in [(1.0, 0.5), (0.3, 2.0), (4.0, 0.1)] {
            let mut prev = f64::INFINITY;
            for i in 1..=100 {
                let x = 0.05 * i as f64;
                let g = transition_time_g(lambda, t, x);
                assert!(g <= prev + 1e-12, "g increased at x={x}");
                prev = g;
            }
        }
    }

    #[test]
    fn mean_transition_time_closed_forms() {
        assert!((mean_transition_time(&constant(1.0, 1.0)).unwrap() - 0.5).abs() < 1e-15);
        // lambda = 1/4, V ~ U(1, e): E[T] = 1/(e - 1).
        let p = MobilityParams::new(
            0.25,
            VelocityLaw::UniformRange {
                min: 1.0,
                max: std::f64::consts::E,
            },
            PauseLaw::NoPause,
        )
        .unwrap();
        let want = 1.0 / (std::f64::consts::E - 1.0);
        assert!((mean_transition_time(&p).unwrap() - want).abs() < 1e-14);
    }

    #[test]
    fn mean_transition_time_mc_cross_check() {
        use crate::models::sample_transition_length;
        use crate::numerics::RandomStream;
        let p = constant(1.0, 2.0);
        let mut stream = RandomStream::new(77, 0);
        let n = 1_000_000;
        let mean: f64 = (0..n)
            .map(|_| sample_transition_length(&p, &mut stream) / 2.0)
            .sum::<f64>()
            / n as f64;
        assert!((mean - 0.25).abs() < 0.001, "mean = {mean}");
    }

    #[test]
    fn switch_rate_examples() {
        // No pause: P(D <= 1) = P(T >= 1) = e^{-1} at lambda = 1/pi, v = 1.
        let p = constant(1.0 / PI, 1.0);
        let got = switch_rate_cdf(&p, 1.0).unwrap();
        assert!((got - (-1.0f64).exp()).abs() < 1e-14);

        // Constant pause s: D <= 1/s almost surely.
        let paused = MobilityParams::new(
            1.0,
            VelocityLaw::Constant(1.0),
            PauseLaw::Constant(0.5),
        )
        .unwrap();
        for d in [2.0, 3.0, 10.0] {
            assert_eq!(switch_rate_cdf(&paused, d).unwrap(), 1.0);
        }
        assert!(switch_rate_cdf(&paused, 1.9).unwrap() < 1.0);
        assert!(switch_rate_cdf(&p, 0.0).is_err());
    }

    #[test]
    fn switch_rate_cdf_with_power_law_pause_is_monotone() {
        let p = MobilityParams::new(
            1.0,
            VelocityLaw::UniformRange { min: 1.0, max: 2.0 },
            PauseLaw::TruncatedPowerLaw {
                beta: 1.5,
                s_min: 0.1,
                s_max: 5.0,
            },
        )
        .unwrap();
        let mut prev = 0.0;
        for i in 1..=60 {
            let d = 0.05 * i as f64;
            let c = switch_rate_cdf(&p, d).unwrap();
            assert!((0.0..=1.0).contains(&c));
            assert!(c >= prev - 1e-9, "decreasing at d={d}");
            prev = c;
        }
    }

    #[test]
    fn waypoint_pdf_examples() {
        assert_eq!(waypoint_pdf(2.0, 0.0), 2.0);
        let got = waypoint_pdf(1.0 / PI, 1.0);
        assert!((got - (-1.0f64).exp() / PI).abs() < 1e-15);
        // Normalization over the plane in polar form.
        let q = integrate_semi_infinite(
            |r| waypoint_pdf(0.7, r) * 2.0 * PI * r,
            &QuadSpec::default_1d(),
        )
        .unwrap();
        assert!((q.value - 1.0).abs() < 1e-8);
    }

    #[test]
    fn spatial_pdf_examples() {
        let got = spatial_pdf(1.0 / PI, 1.0).unwrap();
        let want = (-1.0f64).exp() / PI.powf(1.5);
        assert!((got - want).abs() < 1e-15, "got {got}, want {want}");
        assert!(matches!(
            spatial_pdf(1.0, 0.0),
            Err(AnalyticsError::SingularPoint)
        ));
        let q = integrate_semi_infinite(
            |r| {
                if r == 0.0 {
                    0.0
                } else {
                    spatial_pdf(2.3, r).unwrap() * 2.0 * PI * r
                }
            },
            &QuadSpec::default_1d(),
        )
        .unwrap();
        assert!((q.value - 1.0).abs() < 1e-8);
    }

    #[test]
    fn mixture_reduces_to_components() {
        let free = constant(1.0, 1.0);
        for r in [0.2, 1.0, 2.5] {
            assert_eq!(
                spatial_pdf_with_pause(&free, r).unwrap(),
                spatial_pdf(1.0, r).unwrap()
            );
        }

        // E[S] = E[T] = 0.5 gives weights (1/2, 1/2).
        let half = MobilityParams::new(
            1.0,
            VelocityLaw::Constant(1.0),
            PauseLaw::Constant(0.5),
        )
        .unwrap();
        assert!((moving_fraction(&half).unwrap() - 0.5).abs() < 1e-15);
        // Derived plug-in at r = 1, cross-checked by evaluating both
        // component densities independently: 0.5 e^{-pi} (1/pi + 1).
        let got = spatial_pdf_with_pause(&half, 1.0).unwrap();
        let want = 0.5 * (-PI).exp() * (1.0 / PI + 1.0);
        assert!((got - want).abs() < 1e-15, "got {got}, want {want}");
        assert!((got - 0.028484667833935).abs() < 1e-12);
    }

    #[test]
    fn mixture_dominates_min_of_components() {
        let p = MobilityParams::new(
            0.8,
            VelocityLaw::Constant(1.5),
            PauseLaw::TruncatedPowerLaw {
                beta: 1.2,
                s_min: 0.05,
                s_max: 3.0,
            },
        )
        .unwrap();
        for i in 1..100 {
            let r = 0.04 * i as f64;
            let mix = spatial_pdf_with_pause(&p, r).unwrap();
            let a = spatial_pdf(0.8, r).unwrap();
            let b = waypoint_pdf(0.8, r);
            assert!(mix >= a.min(b) - 1e-15, "r={r}");
        }
    }

    #[test]
    fn mixture_normalizes_over_plane() {
        let p = MobilityParams::new(
            1.3,
            VelocityLaw::UniformRange { min: 0.7, max: 2.0 },
            PauseLaw::Constant(0.4),
        )
        .unwrap();
        let q = integrate_semi_infinite(
            |r| {
                if r == 0.0 {
                    0.0
                } else {
                    spatial_pdf_with_pause(&p, r).unwrap() * 2.0 * PI * r
                }
            },
            &QuadSpec::default_1d(),
        )
        .unwrap();
        assert!((q.value - 1.0).abs() < 1e-8, "integral = {}", q.value);
    }
}
