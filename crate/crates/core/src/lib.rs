//! Linear schemes, decodability checks and rate regions for parallel
//! two-user linear deterministic interference channels with bursty
//! interference on a subset of subcarriers.

pub mod channel;
pub mod cli;
pub mod entropy;
pub mod error;
pub mod field;
pub mod rational;
pub mod region;
pub mod schemes;
pub mod verifier;

pub use channel::{ChannelParams, ReceiverConfig};
pub use error::{Error, Result};
pub use field::{Field, Matrix};
pub use rational::Rational;
pub use region::{HalfPlane, RatePoint, RateRegion2D, Verdict};
pub use schemes::{Corner, CornerKind, LinearScheme, MessageClass, Setup};
pub use verifier::{verify, DecodeClass, VerifyReport};
