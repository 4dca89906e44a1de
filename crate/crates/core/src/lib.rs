//! Protograph LDPC design toolkit.
//!
//! - [`proto`]: base matrices, protographs and structural checks
//! - [`de_bec`]: erasure-channel density evolution and thresholds
//! - [`stability`]: linearized stability of the recursion at the origin
//! - [`de_bms`]: Bhattacharyya bounds and BIAWGN thresholds by EXIT analysis
//! - [`lift`]: large-girth liftings by edge coloring and node splitting
//! - [`optimizer`]: differential-evolution search over base matrices
//! - [`sim`]: decoders and Monte-Carlo error-rate estimation

pub mod de_bec;
pub mod de_bms;
pub mod error;
pub mod exec;
pub mod lift;
pub mod optimizer;
pub mod proto;
pub mod registry;
pub mod sim;
pub mod stability;

pub use error::{Error, Result};
pub use exec::Execution;
pub use proto::{BaseMatrix, Protograph};
