//! Quaternionic formulation of the time-dependent Maxwell system in a
//! homogeneous chiral (Drude-Born-Fedorov) medium.

pub mod bq;
pub mod convergence;
pub mod diffops;
pub mod error;
pub mod fundamental;
pub mod manufactured;
pub mod maxwell;
pub mod medium;
pub mod oracle;
pub mod presets;
pub mod solver;
pub mod specfun;
pub mod verify;

pub use bq::{Biquaternion, PureVector};
pub use error::{Error, Result};
pub use medium::MediumParams;
