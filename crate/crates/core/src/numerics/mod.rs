//! Quadrature, special functions and one-dimensional optimisation.

mod optimize;
mod quadrature;
mod special;

pub use optimize::{golden_section, Extremum, Goal};
pub use quadrature::{adaptive_integrate, adaptive_integrate_breaks, Integral, QuadratureSpec};
pub use special::{
    digamma, digamma_series, expm1_complex, hurwitz_zeta3, hurwitz_zeta3_direct, polylog,
    polylog_direct, shifted_geometric_sum, shifted_geometric_sum_direct, sqrt_upper,
};
