//! First-order minimal-length corrections to propagators, classical
//! actions, spectra and Green's functions, with numerical consistency checks.

pub mod algebra;
pub mod classical;
pub mod error;
pub mod green;
pub mod gup;
pub mod kernels;
pub mod model;
pub mod moments;
pub mod poly;
pub mod quadrature;
pub mod report;
pub mod spectral;
pub mod verify;

pub use error::{Error, Result};
pub use model::{Endpoints, ModelParams, TimeArg, TimeKind, VecD, C64};
