//! Random-waypoint mobility on the infinite plane, its closed-form
//! stochastic properties, and the resulting handover-rate and sojourn-time
//! analytics for hexagonal and Poisson-Voronoi cellular networks,
//! cross-validated end to end by Monte-Carlo simulation.
//!
//! ```
//! use rwp_core::harness::{run_handover_experiment, Metric, NetworkSpec, Scenario};
//! use rwp_core::models::{MobilityParams, PauseLaw, VelocityLaw};
//! use rwp_core::voronoi::expected_handovers_pvt;
//!
//! let mobility = MobilityParams::new(
//!     1.0,
//!     VelocityLaw::Constant(1.0),
//!     PauseLaw::NoPause,
//! )?;
//! let scenario = Scenario {
//!     mobility,
//!     network: NetworkSpec::Ppp { mu: 25.0 },
//!     replications: 2000,
//!     master_seed: 42,
//!     outputs: vec![Metric::Handover],
//! };
//! let outcome = run_handover_experiment(&scenario, None)?;
//! let analytic = expected_handovers_pvt(25.0, mobility.lambda);
//! assert!((outcome.report.mean - analytic).abs() < 3.0 * outcome.report.ci95 / 1.96);
//! # Ok::<(), Box<dyn std::error::Error>>(())
//! ```

// Parameter guards use negated comparisons so NaN inputs are rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analytics;
pub mod geom;
pub mod harness;
pub mod hexgrid;
pub mod models;
pub mod numerics;
pub mod voronoi;

pub use geom::{Point, Rect, Segment};
pub use harness::{Metric, NetworkSpec, RunReport, Scenario};
pub use models::{LevyParams, MobilityParams, PauseLaw, Trace, VelocityLaw, Window};
pub use numerics::{NumericsError, QuadSpec, Quadrature, RandomStream};
