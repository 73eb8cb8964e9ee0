//! Hermitian polynomial algebra, the Choi correspondence between maps and
//! biquadratic forms, exact sum-of-squares certificates and PPT tests.

pub mod choi;
pub mod error;
pub mod fixtures;
pub mod json;
pub mod linalg;
pub mod par;
pub mod poly;
pub mod repro;
pub mod scalar;
pub mod sdp;
pub mod sos;
pub mod states;
pub mod zeros;

pub use error::{Error, Result};
