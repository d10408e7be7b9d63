use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::torus::{
    quarter_arc_project, riesz_apply, square_wave, ArcBundle, QuarterArc, SquareKind, TrigPoly,
};
use crate::Real;

/// `8 G / π²` with `G` Catalan's constant: the quarter-arc average of the
/// conjugate square wave.
pub const C0_REFERENCE: f64 = 0.742_453_745_421_544_3;

/// How the wave index `i` of `φ_i(θ) = φ(θ_axis)` names its axis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum IndexBase {
    /// `axis = i`, `0 <= i <= d - 1`.
    Zero,
    /// `axis = i - 1`, `1 <= i <= d`.
    One,
}

impl IndexBase {
    pub fn axis(self, i: usize, d: usize) -> Result<usize> {
        let axis = match self {
            IndexBase::Zero => Some(i),
            IndexBase::One => i.checked_sub(1),
        };
        match axis {
            Some(a) if a < d => Ok(a),
            _ => invalid(format!("wave index {i} out of range for d = {d} ({self:?}-based)")),
        }
    }
}

/// The variable the quarter-arc projection acts on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProjectionVar {
    /// The variable the square wave depends on.
    Wave,
    /// A fixed variable, 1-based.
    Fixed(usize),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HvsParams {
    pub d: usize,
    pub j: usize,
    pub i: usize,
    pub index_base: IndexBase,
    /// `true` for `φ^+ = sqcos`.
    pub plus: bool,
    pub cutoff: i64,
    pub projection: ProjectionVar,
    pub tolerance: f64,
}

impl HvsParams {
    pub fn new(d: usize, j: usize, i: usize, plus: bool, cutoff: i64) -> Self {
        Self {
            d,
            j,
            i,
            index_base: IndexBase::Zero,
            plus,
            cutoff,
            projection: ProjectionVar::Wave,
            tolerance: 5e-3,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LemmaReport {
    pub lemma_id: String,
    pub params: HvsParams,
    /// Number of arcs in the projection.
    pub arcs: usize,
    pub matched: bool,
    /// Least-squares `c` in `π R̃_j φ ≈ c S_j φ`; `None` when `S_j φ = 0`.
    pub fitted_c0: Option<f64>,
    pub reference_c0: f64,
    /// `‖π R̃_j φ - c0 S_j φ‖` with the reference constant.
    pub residual: f64,
    /// Residual left after removing the fitted multiple.
    pub fit_residual: f64,
    pub lhs_norm: f64,
    pub rhs_norm: f64,
    pub pass: bool,
}

/// One arc piece of `S_j φ`: `scale · ψ(θ_var)` with `ψ` an exact square
/// wave, or the constant `scale` when `wave` is `None`.
#[derive(Debug, Clone, Copy, PartialEq)]
struct ExactPiece {
    scale: f64,
    wave: Option<(usize, SquareKind)>,
}

fn exact_pairing<T: Real>(p: &TrigPoly<T>, s: ExactPiece) -> f64 {
    let zero = vec![0i64; p.n_vars()];
    match s.wave {
        None => s.scale * p.coeff(&zero)[0].re.to_f64().unwrap_or(f64::NAN),
        Some((var, kind)) => {
            let mut acc = 0.0;
            for (l, c) in p.terms() {
                let axis_only = l.iter().enumerate().all(|(v, &x)| v == var || x == 0);
                if axis_only && l[var] != 0 {
                    let w = kind.coefficient(l[var]);
                    let c = Complex::new(
                        c[0].re.to_f64().unwrap_or(f64::NAN),
                        c[0].im.to_f64().unwrap_or(f64::NAN),
                    );
                    acc += (c * w.conj()).re;
                }
            }
            s.scale * acc
        }
    }
}

/// `‖p - c · s‖²` summed coefficient by coefficient, without the
/// cancellation of the expanded square.
fn residual_sq<T: Real>(p: &TrigPoly<T>, s: ExactPiece, c: f64) -> f64 {
    let to_c = |z: &Complex<T>| {
        Complex::new(
            z.re.to_f64().unwrap_or(f64::NAN),
            z.im.to_f64().unwrap_or(f64::NAN),
        )
    };
    let target = |l: &[i64]| -> Complex<f64> {
        match s.wave {
            None if l.iter().all(|&x| x == 0) => Complex::new(c * s.scale, 0.0),
            None => Complex::new(0.0, 0.0),
            Some((var, kind)) => {
                let axis_only = l.iter().enumerate().all(|(v, &x)| v == var || x == 0);
                if axis_only && l[var] != 0 {
                    kind.coefficient(l[var]) * (c * s.scale)
                } else {
                    Complex::new(0.0, 0.0)
                }
            }
        }
    };
    let mut acc = 0.0;
    let mut covered = 0.0;
    for (l, coeff) in p.terms() {
        let t = target(l);
        covered += t.norm_sqr();
        acc += (to_c(&coeff[0]) - t).norm_sqr();
    }
    // part of `c · s` outside the support of `p`
    let total = (c * s.scale).powi(2);
    acc + (total - covered).max(0.0)
}

/// The image of `φ^±` under the sliced shift: `sqcos ↦ sqsin`,
/// `sqsin ↦ -sqcos` on the matching slice.
fn shifted_wave(plus: bool) -> (f64, SquareKind) {
    if plus {
        (1.0, SquareKind::Sqsin)
    } else {
        (-1.0, SquareKind::Sqcos)
    }
}

fn exact_pieces(
    matched: bool,
    plus: bool,
    wave_var: usize,
    proj_var: usize,
) -> [ExactPiece; 4] {
    QuarterArc::ALL.map(|arc| {
        if !matched {
            return ExactPiece {
                scale: 0.0,
                wave: None,
            };
        }
        let (sign, kind) = shifted_wave(plus);
        if wave_var == proj_var {
            ExactPiece {
                scale: sign * f64::from(kind.arc_value(arc)),
                wave: None,
            }
        } else {
            ExactPiece {
                scale: sign,
                wave: Some((wave_var, kind)),
            }
        }
    })
}

/// Checks `π R̃_j φ_i^± = c0 S_j φ_i^±` on one cluster of `T^d`.
pub fn verify_lemma_hvs<T: Real>(params: &HvsParams) -> Result<LemmaReport> {
    let HvsParams { d, j, i, .. } = *params;
    if j == 0 || j > d {
        return invalid(format!("need 1 <= j <= d = {d}, got {j}"));
    }
    let axis = params.index_base.axis(i, d)?;
    let proj_var = match params.projection {
        ProjectionVar::Wave => axis,
        ProjectionVar::Fixed(v) if (1..=d).contains(&v) => v - 1,
        ProjectionVar::Fixed(v) => return invalid(format!("projection variable {v} out of range")),
    };
    let matched = axis == j - 1;

    let wave = square_wave::<T>(SquareKind::from_sign(params.plus), params.cutoff)?.embed(d, 1, axis)?;
    let lhs: ArcBundle<T> = quarter_arc_project(proj_var + 1, &riesz_apply(j, &wave)?)?;
    let rhs = exact_pieces(matched, params.plus, axis, proj_var);

    let mut lhs_sq = 0.0;
    let mut cross = 0.0;
    let mut rhs_sq = 0.0;
    for ((_, p), s) in lhs.pieces().zip(rhs) {
        lhs_sq += p.l2_norm_sq().to_f64().unwrap_or(f64::NAN) / 4.0;
        cross += exact_pairing(p, s) / 4.0;
        // exact square waves have unit L² norm
        rhs_sq += s.scale * s.scale / 4.0;
    }
    let residual_for = |c: f64| {
        lhs.pieces()
            .zip(rhs)
            .map(|((_, p), s)| residual_sq(p, s, c) / 4.0)
            .sum::<f64>()
            .sqrt()
    };
    let fitted = (rhs_sq > 0.0).then(|| cross / rhs_sq);
    let residual = residual_for(C0_REFERENCE);
    let fit_residual = residual_for(fitted.unwrap_or(0.0));
    Ok(LemmaReport {
        lemma_id: "hvs".into(),
        params: params.clone(),
        arcs: QuarterArc::ALL.len(),
        matched,
        fitted_c0: fitted,
        reference_c0: C0_REFERENCE,
        residual,
        fit_residual,
        lhs_norm: lhs_sq.sqrt(),
        rhs_norm: rhs_sq.sqrt(),
        pass: residual <= params.tolerance,
    })
}

/// Arc values of `π R̃_j φ^±_N` for a wave on axis `j - 1`, in arc order.
pub fn projected_riesz_table<T: Real>(d: usize, j: usize, plus: bool, cutoff: i64) -> Result<[T; 4]> {
    let wave = square_wave::<T>(SquareKind::from_sign(plus), cutoff)?.embed(d, 1, j - 1)?;
    let bundle = quarter_arc_project(j, &riesz_apply(j, &wave)?)?;
    let mut out = [T::zero(); 4];
    for (arc, p) in bundle.pieces() {
        out[arc.slot()] = p.mean()[0].re;
    }
    Ok(out)
}
