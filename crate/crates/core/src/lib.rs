//! Inner and outer capacity bounds for the writing-onto-fast-fading-dirt
//! channel `Y = X + c·A·S + Z`, where the state `S` is known at the
//! transmitter and the fading `A` only at the receiver.
//!
//! All rates are in bits per channel use and clamped at zero.

pub mod bounds;
pub mod error;
pub mod fading;
pub mod gauss;
pub mod oracle;
mod par;
pub mod quad;
pub mod verify;

pub use error::{Error, Result};
