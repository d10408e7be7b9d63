//! Sign-toss coding between the dyadic tree and products of tori.
//!
//! Toss `t = l d + m` is generated by the variable `θ^l_m` (flattened index
//! `t`): toss 0 is `sqcos θ^0_0`; for `t >= 1` the toss is `sqcos θ_t` if the
//! previous toss was `+` and `sqsin θ_t` otherwise. A `+` toss selects the
//! left child.

mod ek;
mod martingale;
mod modulation;
mod path;

pub use ek::{
    check_ek_membership, random_ek_elements, sliced_multiplier_apply, sliced_symbol, EkBlock,
    EkReport, EkSpaceElement, EkViolation, RandomEkSpec, ViolationKind,
};
pub use martingale::{
    martingale_decompose, MartingaleBlock, MartingaleExpansion, PredictableFactor,
};
pub use modulation::{
    duality_transfer, min_valid_modulus, modulate, modulated_riesz_multiplier,
    modulation_difference, stacked_frequencies_distinct, DualityTransfer, ModulatedTerm,
    ModulationDifference, ScaledFrequency,
};
pub use path::{encode_path, tosses_from_arcs, SignTossPath};
