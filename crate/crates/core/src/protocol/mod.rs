//! Protocol messages, governance types and the wire codec.

mod codec;
pub mod fixtures;
mod types;
mod validate;

pub use codec::{decode, decode_message, encode, encode_message, DecodeError};
pub use types::*;
pub use validate::{Validate, Violation};
