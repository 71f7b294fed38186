//! Shared numeric primitives: the Gaussian tail function and its inverse,
//! adaptive quadrature in one and two dimensions, and reproducible
//! splittable random streams.

mod gauss;
mod quad;
mod rng;

pub use gauss::{q_function, q_inverse};
pub(crate) use gauss::q_raw;
pub use quad::{integrate_1d, integrate_2d, integrate_semi_infinite, QuadSpec, Quadrature};
pub use rng::RandomStream;

/// Errors raised by the numeric primitives.
#[derive(Debug, Clone, thiserror::Error)]
pub enum NumericsError {
    #[error("domain error: {0}")]
    Domain(String),
    #[error(
        "quadrature did not converge after {subdivisions} subdivisions: \
         estimate {estimate:e}, error bound {error_bound:e}"
    )]
    Convergence {
        estimate: f64,
        error_bound: f64,
        subdivisions: usize,
    },
}
