//! Curvature-adapted hypersurfaces in products of space forms.
//!
//! Given curvature-adapted hypersurfaces `M1 ⊂ X1`, `M2 ⊂ X2` and a closed
//! profile curve `u(θ) = (u1, u2)` around the origin, the map
//!
//! ```text
//! f(p1, p2, θ) = (exp(u1(θ) N1(p1)), exp(u2(θ) N2(p2)))
//! ```
//!
//! is a curvature-adapted hypersurface of `X1 × X2` whose shape operator and
//! normal Jacobi operator have closed-form spectra. This crate evaluates the
//! construction on spheres, hyperbolic spaces, Euclidean spaces and their
//! products, and checks every closed form against finite differences of the
//! immersion itself.
//!
//! Modules, bottom-up:
//! - [`matfun`]: symmetric eigendecomposition, `cos(s√S)`, `sin(s√S)/√S`,
//!   joint eigenspaces of commuting pairs.
//! - [`spaceform`]: geodesics, parallel transport and curvature of the model spaces.
//! - [`hypersurface`]: seed hypersurfaces with closed-form pointwise data.
//! - [`construct`]: profile curves and the tube construction.
//! - [`oracle`]: finite-difference and ODE verification.
//! - [`cli`]: JSON-configured batch front end.

pub mod cli;
pub mod construct;
pub mod error;
pub mod hypersurface;
pub mod matfun;
pub mod oracle;
pub mod spaceform;

pub use error::{Error, Result};
