//! Teleportation of coherent states through photon-subtracted two-mode
//! squeezed vacua.
//!
//! Three independent routes to the fidelity are provided: a general exact
//! engine acting on the Gaussian characteristic function ([`gaussian`]),
//! tabulated closed forms for small subtraction orders ([`closed`]) and a
//! Fock-space quadrature reference ([`fock`]). Non-Gaussianity of the
//! resource comes from its covariance matrix ([`nongauss`]).

pub mod closed;
pub mod error;
pub mod fock;
pub mod gaussian;
pub mod nongauss;
pub mod resource;
pub mod special;

pub use closed::{fidelity_closed, fidelity_zero_squeezing_limit, ClosedFormReport};
pub use error::{Error, Result};
pub use fock::{cm_numeric, fidelity_numeric, QuadratureScheme};
pub use gaussian::{chi12, fidelity_general};
pub use nongauss::{non_gaussianity, non_gaussianity_zero_squeezing_limit};
pub use resource::{covariance_matrix, fock_coefficients, normalization, FockState, SubtractionSpec, TwoModeCM};
