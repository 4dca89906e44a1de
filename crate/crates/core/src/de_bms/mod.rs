//! Binary-input symmetric channels: Bhattacharyya bounds, the J-function and
//! BIAWGN thresholds by protograph EXIT analysis.

pub mod bhatt;
pub mod exit;
pub mod jfun;

pub use bhatt::{awgn_b0, bhatt_bound_threshold, bhatt_converges, bhatt_step, BhattState};
pub use exit::{
    awgn_threshold, awgn_threshold_rows, awgn_threshold_with, capacity_ebn0_db, exit_step,
    exit_converges, run_exit, AwgnThresholdRow, ExitRun, ExitState, SnrConvention,
};
pub use jfun::{jfun, jinv, JINV_CAP};
