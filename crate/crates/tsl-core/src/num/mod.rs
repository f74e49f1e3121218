//! Numeric substrate: scalar abstraction, double-double arithmetic,
//! spherical-cap areas, adaptive quadrature, bracketed root finding and
//! derivative-free minimisation.
//!
//! Everything is pure: the same inputs give bitwise-identical outputs, and
//! all routines are safe to call concurrently.

pub mod dd;
pub mod gauss;
pub mod minimize;
pub mod quad;
pub mod real;
pub mod root;
pub mod sphere;

pub use dd::Dd;
pub use gauss::GlNodes;
pub use minimize::minimize_scalar;
pub use quad::{integrate, integrate_radial, Domain, QuadResult, QuadratureConfig, TailTransform};
pub use real::Real;
pub use root::{find_root_bracketed, Bracket};
pub use sphere::cap_area_fraction;
