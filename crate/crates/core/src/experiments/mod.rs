//! Verification harness: the quarter-arc projection identity, the decay of
//! the modulation error, the duality chain and `L^p` norm estimates.

mod decay;
mod duality;
mod hvs;
mod norms;

pub use decay::{fit_slope, modulation_decay_experiment, DecayRow, DecayTable};
pub use duality::{
    duality_chain_check, random_mean_zero_coeffs, random_test_family, riesz_vector_norm,
    test_family_norm, DualityConfig, DualityReport, FamilyBlock, TestFamily,
    MAX_ENUMERATED_TOSSES,
};
pub use hvs::{
    projected_riesz_table, verify_lemma_hvs, HvsParams, IndexBase, LemmaReport, ProjectionVar,
    C0_REFERENCE,
};
pub use norms::{
    dimension_free_check, hilbert_resolution_sweep, lp_norm_estimate, vector_norm,
    DimensionRow, HaarShiftOperator, Identity, LinearOperator, NormEstimate, NormOptions,
    TruncatedHilbert,
};
