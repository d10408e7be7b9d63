//! The dyadic shift `S0`, the sliced shifts `Sj` and the dyadic Riesz vector.
//!
//! All shifts act on sibling pairs `(J+, J-)` by `h_{J+} ↦ h_{J-}`,
//! `h_{J-} ↦ -h_{J+}`; at the coefficient level the coefficient of `J+` moves
//! to `J-` and minus the coefficient of `J-` moves to `J+`. Both root modes are
//! annihilated. `Sj` (for `1 <= j <= d`) only keeps pairs at depths
//! `≡ j - 1 (mod d)`.

use std::ops::Neg;

use nalgebra::DMatrix;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::haar::{DyadicNode, HaarCoeffs};
use crate::value::ValueVec;

/// Largest depth limit accepted by [`operator_matrix`].
pub const MAX_MATRIX_DEPTH: u32 = 12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ShiftOperator {
    S0,
    Sj { j: u32, d: u32 },
}

impl ShiftOperator {
    pub fn sliced(j: u32, d: u32) -> Result<Self> {
        if d == 0 || j == 0 || j > d {
            return invalid(format!("need 1 <= j <= d, got j = {j}, d = {d}"));
        }
        Ok(Self::Sj { j, d })
    }

    /// Whether a sibling pair at `depth >= 1` is acted on.
    pub fn acts_at_depth(self, depth: u32) -> bool {
        match self {
            Self::S0 => depth >= 1,
            Self::Sj { j, d } => depth >= 1 && depth % d == j - 1,
        }
    }

    pub fn apply<T>(self, coeffs: &HaarCoeffs<T>) -> HaarCoeffs<T>
    where
        T: Clone + Zero + Neg<Output = T>,
    {
        let mut out = HaarCoeffs::zero(coeffs.depth_limit(), coeffs.value_dim());
        for (&node, c) in coeffs.entries() {
            if !self.acts_at_depth(node.depth()) {
                continue;
            }
            let target = node.sibling().expect("depth >= 1");
            let v = if node.is_plus() { c.clone() } else { -c.clone() };
            out = out
                .with_entry(target, v)
                .expect("sibling has the same depth and dimension");
        }
        out
    }
}

pub fn apply_s0<T>(coeffs: &HaarCoeffs<T>) -> HaarCoeffs<T>
where
    T: Clone + Zero + Neg<Output = T>,
{
    ShiftOperator::S0.apply(coeffs)
}

pub fn apply_sj<T>(j: u32, d: u32, coeffs: &HaarCoeffs<T>) -> Result<HaarCoeffs<T>>
where
    T: Clone + Zero + Neg<Output = T>,
{
    Ok(ShiftOperator::sliced(j, d)?.apply(coeffs))
}

/// `(S1 f, ..., Sd f)`.
pub fn apply_riesz_vector<T>(d: u32, coeffs: &HaarCoeffs<T>) -> Result<Vec<HaarCoeffs<T>>>
where
    T: Clone + Zero + Neg<Output = T>,
{
    if d == 0 {
        return invalid("d must be at least 1");
    }
    (1..=d).map(|j| apply_sj(j, d, coeffs)).collect()
}

/// Matrix of `op` on the truncated basis `(h¹, h_{I0}, depth 1, ..., depth L)`,
/// with `M[(out, in)]` the coefficient of basis vector `out` in `op(e_in)`.
pub fn operator_matrix(op: ShiftOperator, depth_limit: u32) -> Result<DMatrix<i64>> {
    if depth_limit > MAX_MATRIX_DEPTH {
        return Err(Error::Resource(format!(
            "basis of size 2^{} exceeds the dense limit (depth <= {MAX_MATRIX_DEPTH})",
            depth_limit + 1
        )));
    }
    let n = 1usize << (depth_limit + 1);
    let mut m = DMatrix::<i64>::zeros(n, n);
    for col in 2..n {
        let node = DyadicNode::from_basis_index(col).expect("col >= 1");
        if !op.acts_at_depth(node.depth()) {
            continue;
        }
        let row = node.sibling().expect("depth >= 1").basis_index();
        m[(row, col)] = if node.is_plus() { 1 } else { -1 };
    }
    Ok(m)
}

/// Apply a shift to scalar coefficients through its dense matrix.
pub fn apply_via_matrix<T>(m: &DMatrix<i64>, coeffs: &HaarCoeffs<T>) -> Result<HaarCoeffs<T>>
where
    T: Clone + Zero + Neg<Output = T>,
{
    if coeffs.value_dim() != 1 {
        return invalid("matrix application expects scalar coefficients");
    }
    let v = coeffs.to_basis_vector(0);
    if v.len() != m.ncols() {
        return Err(Error::DimensionMismatch {
            expected: m.ncols(),
            got: v.len(),
        });
    }
    let mut out = vec![T::zero(); v.len()];
    for row in 0..m.nrows() {
        for col in 0..m.ncols() {
            match m[(row, col)] {
                0 => {}
                1 => out[row] = out[row].clone() + v[col].clone(),
                -1 => out[row] = out[row].clone() + -v[col].clone(),
                _ => return invalid("shift matrices have entries in {-1, 0, 1}"),
            }
        }
    }
    HaarCoeffs::from_basis_vector(coeffs.depth_limit(), &out)
}

/// Coefficients with the two root modes removed.
pub fn strip_root_modes<T: Clone + Zero>(coeffs: &HaarCoeffs<T>) -> HaarCoeffs<T> {
    HaarCoeffs::from_parts(
        coeffs.depth_limit(),
        ValueVec::zeros(coeffs.value_dim()),
        ValueVec::zeros(coeffs.value_dim()),
        coeffs.entries().iter().map(|(n, v)| (*n, v.clone())),
    )
    .expect("same shape")
}
