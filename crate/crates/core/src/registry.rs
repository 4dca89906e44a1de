//! Built-in protographs.
//!
//! The `r*` entries were optimized for the erasure channel, the `awgn-*`
//! entries for the BIAWGN channel. Reported values are the published
//! thresholds; tests compare the crate's own computations against them.

use crate::error::{Error, Result};
use crate::proto::{parse_base_matrix, BaseMatrix, Protograph};

#[derive(Debug, Clone, Copy)]
pub struct BuiltinProtograph {
    pub name: &'static str,
    pub description: &'static str,
    text: &'static str,
    /// Published BEC threshold.
    pub bec_threshold: Option<f64>,
    /// Published BIAWGN threshold in dB, in the table's SNR convention
    /// (see [`crate::de_bms::SnrConvention::PerDimension`]).
    pub awgn_snr_db: Option<f64>,
    /// Published BIAWGN threshold in Eb/N0 dB, where the publication gives one.
    pub awgn_ebn0_db: Option<f64>,
    /// Prime `q` of the D(2, q) graph used to lift it, when `|E|` is that prime.
    pub lift_q: Option<u64>,
    pub note: Option<&'static str>,
}

impl BuiltinProtograph {
    pub fn base_matrix(&self) -> BaseMatrix {
        parse_base_matrix(self.text).expect("built-in matrix is valid")
    }

    pub fn protograph(&self) -> Protograph {
        Protograph::new(self.base_matrix()).expect("built-in matrix is valid")
    }
}

pub const BUILTINS: &[BuiltinProtograph] = &[
    BuiltinProtograph {
        name: "ex-2x4",
        description: "2x4 worked example with a degree-2 cycle",
        text: include_str!("../data/ex-2x4.bm"),
        bec_threshold: None,
        awgn_snr_db: None,
        awgn_ebn0_db: None,
        lift_q: None,
        note: None,
    },
    BuiltinProtograph {
        name: "r34-3x12",
        description: "rate-3/4 3x12, BEC-optimized",
        text: include_str!("../data/r34-3x12.bm"),
        bec_threshold: Some(0.238),
        awgn_snr_db: None,
        awgn_ebn0_db: None,
        lift_q: Some(61),
        note: None,
    },
    BuiltinProtograph {
        name: "r23-4x12",
        description: "rate-2/3 4x12, BEC-optimized",
        text: include_str!("../data/r23-4x12.bm"),
        bec_threshold: Some(0.32),
        awgn_snr_db: None,
        awgn_ebn0_db: None,
        lift_q: Some(61),
        note: None,
    },
    BuiltinProtograph {
        name: "r12-4x8",
        description: "rate-1/2 4x8, BEC-optimized",
        text: include_str!("../data/r12-4x8.bm"),
        bec_threshold: Some(0.479),
        awgn_snr_db: None,
        awgn_ebn0_db: None,
        lift_q: None,
        note: None,
    },
    BuiltinProtograph {
        name: "r12-8x16",
        description: "rate-1/2 8x16, BEC-optimized",
        text: include_str!("../data/r12-8x16.bm"),
        bec_threshold: Some(0.486),
        awgn_snr_db: None,
        awgn_ebn0_db: None,
        lift_q: None,
        note: None,
    },
    BuiltinProtograph {
        name: "r12-16x32",
        description: "rate-1/2 16x32, BEC-optimized",
        text: include_str!("../data/r12-16x32.bm"),
        bec_threshold: Some(0.4953),
        awgn_snr_db: None,
        awgn_ebn0_db: None,
        lift_q: Some(173),
        note: Some("threshold published as both 0.4952 and 0.4953"),
    },
    BuiltinProtograph {
        name: "awgn-r23-4x12",
        description: "rate-2/3 4x12, BIAWGN-optimized",
        text: include_str!("../data/awgn-r23-4x12.bm"),
        bec_threshold: None,
        awgn_snr_db: Some(2.429),
        awgn_ebn0_db: Some(1.18),
        lift_q: Some(67),
        note: None,
    },
    BuiltinProtograph {
        name: "awgn-r34-3x12",
        description: "rate-3/4 3x12, BIAWGN-optimized",
        text: include_str!("../data/awgn-r34-3x12.bm"),
        bec_threshold: None,
        awgn_snr_db: Some(3.551),
        awgn_ebn0_db: Some(1.79),
        lift_q: Some(71),
        note: None,
    },
    BuiltinProtograph {
        name: "awgn-r12-16x32",
        description: "rate-1/2 16x32, BIAWGN-optimized",
        text: include_str!("../data/awgn-r12-16x32.bm"),
        bec_threshold: None,
        awgn_snr_db: Some(0.3),
        awgn_ebn0_db: Some(0.3),
        lift_q: Some(173),
        note: None,
    },
];

pub fn builtin(name: &str) -> Result<&'static BuiltinProtograph> {
    BUILTINS
        .iter()
        .find(|b| b.name == name)
        .ok_or_else(|| Error::UnknownProtograph(name.to_string()))
}

pub fn builtin_protograph(name: &str) -> Result<Protograph> {
    builtin(name).map(BuiltinProtograph::protograph)
}
