//! Numerical laboratory for the sharp trace-Sobolev curve `Phi_H(T)` on the
//! half-space `H = {x : x.e1 > 0}`.
//!
//! The crate solves the one-parameter family of variational problems
//!
//! ```text
//! Phi_H(T) = inf { ||grad u||_{L^p(H)} : ||u||_{L^{p*}(H)} = 1,
//!                                        ||u||_{L^{p#}(boundary)} = T }
//! ```
//!
//! from the three explicit extremal families (bulk-Sobolev, boundary-trace,
//! and the hyperbolic-type family above the trace point), certifies the
//! identities and inequalities the curve satisfies, measures strict binding
//! gaps for mass/trace splittings, runs exact small-instance optimal
//! transport probes, and quantifies deficit/distance stability experiments.
//!
//! Modules map onto the subsystems:
//! - [`num`]: quadrature, special functions, root finding, scalar
//!   minimisation, and the double-double scalar used for cancellation-heavy
//!   certificates.
//! - [`profiles`]: the extremal families and their half-space norms.
//! - [`curve`]: the solved curve `T -> Phi_H(T)`, fundamental constants,
//!   the transport identity check, and shape certificates.
//! - [`binding`]: strict binding (splitting) gaps and the two-bump
//!   competitor construction.
//! - [`transport`]: exact discrete optimal transport, cyclical monotonicity,
//!   cone exclusion, and the deficit Cauchy-Schwarz estimate.
//! - [`stability`]: deficit/distance experiments and the annulus trace
//!   lemma check.

pub mod binding;
pub mod curve;
pub mod field;
pub mod num;
pub mod params;
pub mod profiles;
pub mod stability;
pub mod transport;

mod error;

pub use error::Error;
pub use params::Params;

/// Crate-wide result type.
pub type Result<T> = std::result::Result<T, Error>;
