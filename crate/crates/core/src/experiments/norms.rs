//! Lower bounds for `L^p → L^p(ℓ²)` operator norms on finite grids.
//!
//! Functions are sampled on a uniform grid and normed by
//! `‖x‖_p = (mean_i |x_i|^p)^{1/p}`, with the Euclidean norm of the
//! components taken pointwise for vector-valued outputs. The estimate is the
//! largest ratio `‖Ax‖_p / ‖x‖_p` seen along a power-type iteration
//! `x ← ψ_q(A* ψ_p(Ax))`, `ψ_r(y) = |y|^{r-2} y`, so it is attained by the
//! stored test vector.

use std::sync::Arc;

use num_complex::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rustfft::{Fft, FftPlanner};
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::haar::{haar_analyze, haar_synthesize, HaarCoeffs};
use crate::shift::{strip_root_modes, ShiftOperator};
use crate::value::ValueVec;

/// A linear map between sampled functions on grids of the same size.
///
/// The adjoint is taken with respect to the mean-weighted inner product.
pub trait LinearOperator: Sync {
    fn id(&self) -> String;
    fn dim(&self) -> usize;
    fn components(&self) -> usize {
        1
    }
    fn apply(&self, x: &[f64]) -> Vec<Vec<f64>>;
    fn apply_adjoint(&self, y: &[Vec<f64>]) -> Vec<f64>;
    /// Projection onto the domain; the identity unless the operator is
    /// restricted to a subspace.
    fn project(&self, _x: &mut [f64]) {}
}

pub struct Identity {
    pub dim: usize,
}

impl LinearOperator for Identity {
    fn id(&self) -> String {
        format!("identity({})", self.dim)
    }
    fn dim(&self) -> usize {
        self.dim
    }
    fn apply(&self, x: &[f64]) -> Vec<Vec<f64>> {
        vec![x.to_vec()]
    }
    fn apply_adjoint(&self, y: &[Vec<f64>]) -> Vec<f64> {
        y[0].clone()
    }
}

/// The conjugate function on trigonometric polynomials of degree `<= n`,
/// sampled at `8n` points.
pub struct TruncatedHilbert {
    n: usize,
    m: usize,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

impl TruncatedHilbert {
    pub fn new(n: usize) -> Result<Self> {
        if n == 0 {
            return invalid("frequency cutoff must be positive");
        }
        let m = 8 * n;
        let mut planner = FftPlanner::new();
        Ok(Self {
            n,
            m,
            forward: planner.plan_fft_forward(m),
            inverse: planner.plan_fft_inverse(m),
        })
    }

    pub fn cutoff(&self) -> usize {
        self.n
    }

    /// Grid point `i`, the midpoint `-π + 2π(i + 1/2)/m`.
    pub fn grid_point(&self, i: usize) -> f64 {
        -std::f64::consts::PI + 2.0 * std::f64::consts::PI * (i as f64 + 0.5) / self.m as f64
    }

    fn spectrum(&self, x: &[f64]) -> Vec<Complex<f64>> {
        let mut buf: Vec<Complex<f64>> = x.iter().map(|&v| Complex::new(v, 0.0)).collect();
        self.forward.process(&mut buf);
        buf
    }

    fn signed_frequency(&self, k: usize) -> i64 {
        if k <= self.m / 2 {
            k as i64
        } else {
            k as i64 - self.m as i64
        }
    }

    fn filtered(&self, x: &[f64], symbol: impl Fn(i64) -> Complex<f64>) -> Vec<f64> {
        let mut buf = self.spectrum(x);
        for (k, z) in buf.iter_mut().enumerate() {
            let f = self.signed_frequency(k);
            *z = if f.unsigned_abs() as usize <= self.n {
                *z * symbol(f)
            } else {
                Complex::new(0.0, 0.0)
            };
        }
        self.inverse.process(&mut buf);
        let scale = 1.0 / self.m as f64;
        buf.into_iter().map(|z| z.re * scale).collect()
    }

    /// Samples of a polynomial of degree `<= self.cutoff()` on the grid of
    /// `other`, which must be at least as fine.
    pub fn resample(&self, x: &[f64], other: &TruncatedHilbert) -> Result<Vec<f64>> {
        if other.n < self.n {
            return invalid("can only resample onto a finer grid");
        }
        let spec = self.spectrum(x);
        let mut buf = vec![Complex::new(0.0, 0.0); other.m];
        for (k, z) in spec.iter().enumerate() {
            let f = self.signed_frequency(k);
            if f.unsigned_abs() as usize > self.n {
                continue;
            }
            // grids are offset by half a step; shift the phase accordingly
            let shift = std::f64::consts::PI * f as f64 * (1.0 / other.m as f64 - 1.0 / self.m as f64);
            let slot = f.rem_euclid(other.m as i64) as usize;
            buf[slot] = *z * Complex::from_polar(1.0, shift) / self.m as f64;
        }
        other.inverse.process(&mut buf);
        Ok(buf.into_iter().map(|z| z.re).collect())
    }

    /// `sign(θ) |cot(θ/2)|^α` projected to degree `n`, a near-extremal shape
    /// for the conjugate function on `L^p` with `α` slightly below `1/max(p, p')`.
    pub fn start_vector(&self, p: f64) -> Vec<f64> {
        let q = p / (p - 1.0);
        let alpha = 0.9 / p.max(q);
        let mut x: Vec<f64> = (0..self.m)
            .map(|i| {
                let th = self.grid_point(i);
                th.signum() * (1.0 / (th / 2.0).tan()).abs().powf(alpha)
            })
            .collect();
        self.project(&mut x);
        x
    }
}

impl LinearOperator for TruncatedHilbert {
    fn id(&self) -> String {
        format!("hilbert(N={})", self.n)
    }
    fn dim(&self) -> usize {
        self.m
    }
    fn apply(&self, x: &[f64]) -> Vec<Vec<f64>> {
        vec![self.filtered(x, |f| Complex::new(0.0, -(f.signum() as f64)))]
    }
    fn apply_adjoint(&self, y: &[Vec<f64>]) -> Vec<f64> {
        self.filtered(&y[0], |f| Complex::new(0.0, f.signum() as f64))
    }
    fn project(&self, x: &mut [f64]) {
        let p = self.filtered(x, |_| Complex::new(1.0, 0.0));
        x.copy_from_slice(&p);
    }
}

/// A list of dyadic shifts acting on `2^(depth_limit + 1)` grid averages,
/// one output component per shift.
pub struct HaarShiftOperator {
    ops: Vec<ShiftOperator>,
    depth_limit: u32,
    restrict: bool,
}

impl HaarShiftOperator {
    pub fn s0(depth_limit: u32) -> Self {
        Self {
            ops: vec![ShiftOperator::S0],
            depth_limit,
            restrict: false,
        }
    }

    /// `(S_1, ..., S_d)`.
    pub fn riesz_vector(d: u32, depth_limit: u32) -> Result<Self> {
        let ops = (1..=d)
            .map(|j| ShiftOperator::sliced(j, d))
            .collect::<Result<_>>()?;
        Ok(Self {
            ops,
            depth_limit,
            restrict: false,
        })
    }

    /// Restricts the domain to functions with zero mean and root coefficient.
    pub fn restricted(mut self) -> Self {
        self.restrict = true;
        self
    }

    fn analyze(&self, x: &[f64]) -> HaarCoeffs<f64> {
        let samples: Vec<ValueVec<f64>> = x.iter().map(|&v| ValueVec::scalar(v)).collect();
        haar_analyze(&samples).expect("grid length is a power of two")
    }

    fn synthesize(c: &HaarCoeffs<f64>) -> Vec<f64> {
        haar_synthesize(c)
            .into_iter()
            .map(|v| v.components()[0])
            .collect()
    }
}

impl LinearOperator for HaarShiftOperator {
    fn id(&self) -> String {
        let name = match self.ops.as_slice() {
            [ShiftOperator::S0] => "S0".to_string(),
            ops => format!("riesz_vector(d={})", ops.len()),
        };
        let tag = if self.restrict { ",restricted" } else { "" };
        format!("{name}(depth={}{tag})", self.depth_limit)
    }
    fn dim(&self) -> usize {
        1 << (self.depth_limit + 1)
    }
    fn components(&self) -> usize {
        self.ops.len()
    }
    fn apply(&self, x: &[f64]) -> Vec<Vec<f64>> {
        let c = self.analyze(x);
        self.ops.iter().map(|op| Self::synthesize(&op.apply(&c))).collect()
    }
    fn apply_adjoint(&self, y: &[Vec<f64>]) -> Vec<f64> {
        // shifts are antisymmetric and the Haar transform is orthogonal
        let mut out = vec![0.0; self.dim()];
        for (op, yc) in self.ops.iter().zip(y) {
            let back = Self::synthesize(&op.apply(&self.analyze(yc)));
            for (o, b) in out.iter_mut().zip(back) {
                *o -= b;
            }
        }
        out
    }
    fn project(&self, x: &mut [f64]) {
        if self.restrict {
            let p = Self::synthesize(&strip_root_modes(&self.analyze(x)));
            x.copy_from_slice(&p);
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NormOptions {
    pub max_iter: usize,
    /// Relative change of the ratio below which the iteration stops.
    pub tol: f64,
    pub seed: u64,
    /// Starting vector; seeded uniform noise when absent.
    pub start: Option<Vec<f64>>,
}

impl Default for NormOptions {
    fn default() -> Self {
        Self {
            max_iter: 500,
            tol: 1e-13,
            seed: 1,
            start: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NormEstimate {
    pub operator: String,
    pub p: f64,
    pub resolution: usize,
    /// `‖A x‖_p / ‖x‖_p` for the stored `test_vector`.
    pub estimate: f64,
    pub iterations: usize,
    pub converged: bool,
    pub trace: Vec<f64>,
    pub test_vector: Vec<f64>,
}

fn scalar_norm(x: &[f64], p: f64) -> f64 {
    (x.iter().map(|v| v.abs().powf(p)).sum::<f64>() / x.len() as f64).powf(1.0 / p)
}

fn pointwise_l2(y: &[Vec<f64>]) -> Vec<f64> {
    (0..y[0].len())
        .map(|i| y.iter().map(|c| c[i] * c[i]).sum::<f64>().sqrt())
        .collect()
}

/// `‖y‖_{L^p(ℓ²)}` on a uniform grid.
pub fn vector_norm(y: &[Vec<f64>], p: f64) -> f64 {
    scalar_norm(&pointwise_l2(y), p)
}

fn duality_map(y: &[Vec<f64>], p: f64) -> Vec<Vec<f64>> {
    let mag = pointwise_l2(y);
    y.iter()
        .map(|c| {
            c.iter()
                .zip(&mag)
                .map(|(&v, &r)| if r > 0.0 { v * r.powf(p - 2.0) } else { 0.0 })
                .collect()
        })
        .collect()
}

/// Power-type iteration for `‖A‖_{L^p → L^p(ℓ²)}`; `p = 2` is plain
/// singular-value iteration on `A*A`.
pub fn lp_norm_estimate(
    op: &dyn LinearOperator,
    p: f64,
    options: &NormOptions,
) -> Result<NormEstimate> {
    if !(p > 1.0 && p.is_finite()) {
        return invalid(format!("need 1 < p < ∞, got {p}"));
    }
    let n = op.dim();
    let mut x = match &options.start {
        Some(s) if s.len() == n => s.clone(),
        Some(s) => return invalid(format!("start vector has length {}, need {n}", s.len())),
        None => {
            let mut rng = ChaCha8Rng::seed_from_u64(options.seed);
            (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect()
        }
    };
    op.project(&mut x);
    let q = p / (p - 1.0);
    let mut best = (0.0, x.clone());
    let mut trace = Vec::new();
    let mut converged = false;
    let mut iterations = 0;
    for it in 0..options.max_iter {
        iterations = it + 1;
        let nx = scalar_norm(&x, p);
        if nx == 0.0 {
            break;
        }
        let y = op.apply(&x);
        let r = vector_norm(&y, p) / nx;
        if r > best.0 {
            best = (r, x.clone());
        }
        let prev = trace.last().copied();
        trace.push(r);
        if let Some(prev) = prev {
            if (r - prev).abs() <= options.tol * r.max(f64::MIN_POSITIVE) {
                converged = true;
                break;
            }
        }
        let mut next = op.apply_adjoint(&duality_map(&y, p));
        if p != 2.0 {
            for v in &mut next {
                *v = v.signum() * v.abs().powf(q - 1.0);
            }
        }
        op.project(&mut next);
        let nn = scalar_norm(&next, p);
        if nn == 0.0 {
            converged = true;
            break;
        }
        x = next.into_iter().map(|v| v / nn).collect();
    }
    Ok(NormEstimate {
        operator: op.id(),
        p,
        resolution: n,
        estimate: best.0,
        iterations,
        converged,
        trace,
        test_vector: best.1,
    })
}

/// Estimates for the truncated conjugate function at increasing cutoffs,
/// each warm-started from the previous optimiser (nested subspaces).
pub fn hilbert_resolution_sweep(p: f64, cutoffs: &[usize], options: &NormOptions) -> Result<Vec<NormEstimate>> {
    if cutoffs.windows(2).any(|w| w[0] >= w[1]) {
        return invalid("cutoffs must be increasing");
    }
    let mut out: Vec<NormEstimate> = Vec::with_capacity(cutoffs.len());
    let mut prev: Option<TruncatedHilbert> = None;
    for &n in cutoffs {
        let op = TruncatedHilbert::new(n)?;
        let start = match (&prev, out.last()) {
            (Some(coarse), Some(est)) => coarse.resample(&est.test_vector, &op)?,
            _ => options.start.clone().unwrap_or_else(|| op.start_vector(p)),
        };
        let est = lp_norm_estimate(
            &op,
            p,
            &NormOptions {
                start: Some(start),
                ..options.clone()
            },
        )?;
        out.push(est);
        prev = Some(op);
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DimensionRow {
    pub d: u32,
    pub depth: u32,
    pub norm: f64,
    pub iterations: usize,
}

/// `‖(S_1, ..., S_d)‖_{L² → L²(ℓ²)}` on mean-zero, root-zero functions.
pub fn dimension_free_check(d_list: &[u32], depth: u32, seed: u64) -> Result<Vec<DimensionRow>> {
    d_list
        .iter()
        .map(|&d| {
            let op = HaarShiftOperator::riesz_vector(d, depth)?.restricted();
            let est = lp_norm_estimate(
                &op,
                2.0,
                &NormOptions {
                    seed,
                    ..Default::default()
                },
            )?;
            Ok(DimensionRow {
                d,
                depth,
                norm: est.estimate,
                iterations: est.iterations,
            })
        })
        .collect()
}
