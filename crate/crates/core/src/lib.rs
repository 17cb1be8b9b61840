//! Cooperative and non-cooperative bargaining over the rate regions of the
//! two-user Gaussian interference channel.

pub mod aobg;
pub mod bargain;
pub mod channel;
pub mod error;
pub mod gdof;
pub mod nbs;
pub mod regions;

pub use error::{Error, Result};
