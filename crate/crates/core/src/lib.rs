//! Vortex-patch desingularization of the Karman point-vortex street.
//!
//! The crate replaces the two rows of point vortices of a Karman street by
//! small uniform patches of size `eps` that translate rigidly, for three
//! active-scalar models sharing a radial interaction kernel:
//!
//! * 2D Euler, `G(r) = ln(r) / 2pi`;
//! * quasi-geostrophic shallow water, `G(r) = -K0(lambda r) / 2pi`;
//! * generalized SQG, `G(r) = C_beta / (2 pi) r^-beta`.
//!
//! Patch boundaries are parameterized by a perturbed conformal map of the unit
//! circle and the rigid-translation condition is solved by Newton continuation
//! in `eps`, starting from the point-vortex street. Solutions can be validated
//! by direct contour-dynamics evolution.
//!
//! Module map:
//!
//! * [`kernels`]: radial kernels, derivatives, modified Bessel functions.
//! * [`point_street`]: point-vortex streets, two-vortex motion, lattice ODE.
//! * [`lattice`]: lattice-summed kernels used by every boundary integral.
//! * [`boundary`], [`quadrature`]: sampled curves and periodic quadrature rules.
//! * [`periodic_field`]: velocity of a patch street at exterior points.
//! * [`contour_functional`]: the boundary functional and its residual.
//! * [`solver`]: Newton solve and continuation in `eps`.
//! * [`evolution`]: RK4 contour dynamics of a solved street.

pub mod boundary;
pub mod contour_functional;
pub mod error;
pub mod evolution;
pub mod exec;
pub mod kernels;
pub mod lattice;
pub mod periodic_field;
pub mod point_street;
pub mod quadrature;
pub mod solver;
pub mod special;

pub use error::{Error, Result};
pub use kernels::{KernelKind, RadialKernel};
pub use point_street::StreetGeometry;

pub use num_complex::Complex64;
