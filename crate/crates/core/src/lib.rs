pub mod accel;
pub mod cli;
pub mod error;
pub mod eval;
pub mod gfun;
pub mod hyper;
pub mod identities;
pub mod miller_paris;
pub mod oracle;
pub mod quad;
pub mod special;
pub mod verify;

pub use error::{Error, Result};
pub use eval::{ComplexEval, IdentityReport, Method};
pub use num_complex::Complex64;
