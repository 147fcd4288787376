//! Adomian decomposition of `u_t + H(u_x) = 0`.

mod compositions;
mod oracle;
mod poly;
mod radius;
mod series;

pub use compositions::compositions;
pub use oracle::{oracle_polynomial, oracle_series, oracle_value, ORACLE_MAX_ORDER};
pub use poly::{recursion_polynomial, composition_polynomial, AbstractPoly, Monomial, MAX_ORDER};
pub use radius::{estimate_radius, RadiusEstimate, MIN_TERMS, RELIABLE_RATIOS};
pub use series::{build_series, AdmSeries, CapPolicy, SIGN};
