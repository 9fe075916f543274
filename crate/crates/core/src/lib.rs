//! Mermin's spin-`s` Bell inequality for two effective spins carried by four
//! optical modes, with photodetection loss.
//!
//! The source is a pair of two-mode squeezers whose outputs are read as two
//! Schwinger spins. [`lossy`] evaluates the joint outcome distribution and
//! spin correlations after per-detector loss; [`ideal`] has the lossless
//! closed forms those reduce to.

pub mod error;
pub mod half_int;
pub mod ideal;
pub mod log_mag;
pub mod loss;
pub mod lossy;
pub mod optimize;
pub mod schwinger;
pub mod source;
pub mod special;
pub mod sweep;

pub use error::{Error, Result};
pub use half_int::HalfInt;
pub use ideal::{AngleTriple, InequalitySides};
pub use loss::LossConfig;
pub use lossy::{Convention, TruncationPolicy, ViolationRecord};
pub use source::SqueezeParam;
