//! Overflow-safe scalars, Gauss-Legendre rules and the scaled `u0` kernel.

mod logreal;
mod quadrature;
mod scaled_u0;

pub use logreal::{LogAccumulator, LogReal};
pub use quadrature::{composite_rule, gauss_rule, QuadratureRule, MAX_GAUSS_NODES};
pub use scaled_u0::{u0_log, u0_scaled, u0_scaled_derivative};

/// `a + b` on log-domain values.
pub fn lr_add(a: LogReal, b: LogReal) -> LogReal {
    a + b
}

/// `a * b` on log-domain values.
pub fn lr_mul(a: LogReal, b: LogReal) -> LogReal {
    a * b
}
