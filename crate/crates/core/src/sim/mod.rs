//! Decoders and Monte-Carlo error-rate estimation. The all-zero codeword is
//! always sent, which is enough for symmetric channels and message-passing
//! decoders.

pub mod awgn;
pub mod bec;
pub mod code;
pub mod harness;

pub use awgn::{awgn_decode, AwgnOutcome, LLR_CLAMP};
pub use bec::{bec_decode, message_erasure_rates, BecOutcome, MessageRates};
pub use code::SparseCode;
pub use harness::{simulate, Channel, SimConfig, SimResult};
