//! Dyadic Riesz vector toolkit.
//!
//! The crate is organised bottom-up:
//!
//! * [`haar`]: the L²-normalised Haar system on `[0, 1)` and the d-step Haar
//!   system on the unit cube, with analysis/synthesis and slice bookkeeping.
//! * [`shift`]: the dyadic shift `S0`, the sliced shifts `Sj` and the dyadic
//!   Riesz vector acting on Haar coefficients, plus dense integer matrices.
//! * [`torus`]: sparse trigonometric polynomials on products of tori, the
//!   periodic Riesz and directional Hilbert multipliers, square waves and the
//!   quarter-arc projection.
//! * [`coding`]: sign-toss coding of dyadic paths by square waves, the
//!   martingale block decomposition, the constrained spaces `E_k`, sliced
//!   multipliers and the A-modulation machinery.
//! * [`experiments`]: the verification harness (projection identity, decay
//!   of the modulation error, duality chain, `L^p` norm estimates).
//!
//! Numerical code is generic over [`Real`] (`f32` / `f64`); the shift algebra
//! additionally works over exact integers. Concrete `f64` aliases live at the
//! crate root.

pub mod coding;
pub mod error;
pub mod experiments;
pub mod haar;
pub mod io;
pub mod shift;
pub mod torus;
pub mod value;

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FloatConst, FromPrimitive};

pub use error::{Error, Result};

/// Floating point scalar used by the numerical modules.
pub trait Real:
    Float + FloatConst + FromPrimitive + Sum + Debug + Display + Default + Send + Sync + 'static
{
    /// Lossy conversion from `f64` for constants.
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("f64 literal representable")
    }
}

impl Real for f32 {}
impl Real for f64 {}

pub type ValueVec64 = value::ValueVec<f64>;
pub type HaarCoeffs64 = haar::HaarCoeffs<f64>;
pub type TrigPoly64 = torus::TrigPoly<f64>;
pub type ArcBundle64 = torus::ArcBundle<f64>;
pub type EkSpaceElement64 = coding::EkSpaceElement<f64>;
pub type MartingaleExpansion64 = coding::MartingaleExpansion<f64>;
pub type Complex64 = num_complex::Complex<f64>;

pub type HaarCoeffs32 = haar::HaarCoeffs<f32>;
pub type TrigPoly32 = torus::TrigPoly<f32>;
