//! Sparse trigonometric polynomials on products of tori.
//!
//! A [`TrigPoly`] lives on `clusters` copies of `T^d`; its variables are
//! flattened cluster by cluster, so variable `s*d + m` is `θ^s_m`. Terms map a
//! stacked integer frequency vector to a complex coefficient in a
//! finite-dimensional value space:
//!
//! ```text
//! p(θ) = Σ_l c_l e^{i <l, θ>}
//! ```

use std::collections::BTreeMap;
use std::f64::consts::PI;

use num_complex::Complex;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::Real;

/// Default Fourier cutoff for truncated square waves.
pub const DEFAULT_CUTOFF: i64 = 4095;

#[derive(Debug, Clone, PartialEq)]
pub struct TrigPoly<T> {
    d: usize,
    clusters: usize,
    value_dim: usize,
    terms: BTreeMap<Vec<i64>, Vec<Complex<T>>>,
}

fn is_zero_coeff<T: Real>(c: &[Complex<T>]) -> bool {
    c.iter().all(|z| z.re == T::zero() && z.im == T::zero())
}

impl<T: Real> TrigPoly<T> {
    pub fn new(d: usize, clusters: usize, value_dim: usize) -> Result<Self> {
        if d == 0 || clusters == 0 || value_dim == 0 {
            return invalid("d, clusters and value_dim must all be positive");
        }
        Ok(Self {
            d,
            clusters,
            value_dim,
            terms: BTreeMap::new(),
        })
    }

    pub fn constant(d: usize, clusters: usize, value: Vec<Complex<T>>) -> Result<Self> {
        let p = Self::new(d, clusters, value.len())?;
        let zero = vec![0; d * clusters];
        p.with_term(zero, value)
    }

    /// Adds `coeff e^{i<freq, θ>}` to the polynomial.
    pub fn with_term(mut self, freq: Vec<i64>, coeff: Vec<Complex<T>>) -> Result<Self> {
        self.add_term(freq, coeff)?;
        Ok(self)
    }

    fn add_term(&mut self, freq: Vec<i64>, coeff: Vec<Complex<T>>) -> Result<()> {
        if freq.len() != self.n_vars() {
            return Err(Error::DimensionMismatch {
                expected: self.n_vars(),
                got: freq.len(),
            });
        }
        if coeff.len() != self.value_dim {
            return Err(Error::DimensionMismatch {
                expected: self.value_dim,
                got: coeff.len(),
            });
        }
        match self.terms.get_mut(&freq) {
            Some(c) => {
                for (a, b) in c.iter_mut().zip(coeff) {
                    *a = *a + b;
                }
                if is_zero_coeff(c) {
                    self.terms.remove(&freq);
                }
            }
            None => {
                if !is_zero_coeff(&coeff) {
                    self.terms.insert(freq, coeff);
                }
            }
        }
        Ok(())
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn clusters(&self) -> usize {
        self.clusters
    }

    pub fn n_vars(&self) -> usize {
        self.d * self.clusters
    }

    pub fn value_dim(&self) -> usize {
        self.value_dim
    }

    pub fn terms(&self) -> &BTreeMap<Vec<i64>, Vec<Complex<T>>> {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, freq: &[i64]) -> Vec<Complex<T>> {
        self.terms
            .get(freq)
            .cloned()
            .unwrap_or_else(|| vec![Complex::zero(); self.value_dim])
    }

    /// Zero-frequency coefficient, i.e. the normalised integral.
    pub fn mean(&self) -> Vec<Complex<T>> {
        self.coeff(&vec![0; self.n_vars()])
    }

    pub fn max_abs_frequency(&self) -> i64 {
        self.terms
            .keys()
            .flat_map(|l| l.iter().map(|x| x.abs()))
            .max()
            .unwrap_or(0)
    }

    fn same_shape(&self, other: &Self) -> Result<()> {
        if (self.d, self.clusters, self.value_dim) != (other.d, other.clusters, other.value_dim) {
            return invalid(format!(
                "shape mismatch: (d, clusters, dim) = ({}, {}, {}) vs ({}, {}, {})",
                self.d, self.clusters, self.value_dim, other.d, other.clusters, other.value_dim
            ));
        }
        Ok(())
    }

    /// Direct summation of `Σ c_l e^{i<l, θ>}`.
    pub fn eval(&self, point: &[T]) -> Result<Vec<Complex<T>>> {
        if point.len() != self.n_vars() {
            return Err(Error::DimensionMismatch {
                expected: self.n_vars(),
                got: point.len(),
            });
        }
        let mut out = vec![Complex::zero(); self.value_dim];
        for (l, c) in &self.terms {
            let phase = l
                .iter()
                .zip(point)
                .fold(T::zero(), |acc, (&k, &x)| acc + T::lit(k as f64) * x);
            let e = Complex::new(phase.cos(), phase.sin());
            for (o, &ci) in out.iter_mut().zip(c) {
                *o = *o + ci * e;
            }
        }
        Ok(out)
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.same_shape(other)?;
        let mut out = self.clone();
        for (l, c) in &other.terms {
            out.add_term(l.clone(), c.clone())?;
        }
        Ok(out)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.scale(-Complex::one()))
    }

    pub fn scale(&self, s: Complex<T>) -> Self {
        let mut out = Self {
            terms: BTreeMap::new(),
            ..*self
        };
        for (l, c) in &self.terms {
            let c: Vec<Complex<T>> = c.iter().map(|&z| z * s).collect();
            if !is_zero_coeff(&c) {
                out.terms.insert(l.clone(), c);
            }
        }
        out
    }

    /// Product of a scalar-valued polynomial with another polynomial on the
    /// same tori (spectral convolution).
    pub fn mul(&self, other: &Self) -> Result<Self> {
        if self.n_vars() != other.n_vars() || self.d != other.d {
            return invalid("product needs polynomials on the same tori");
        }
        let (scalar, vector) = match (self.value_dim, other.value_dim) {
            (1, _) => (self, other),
            (_, 1) => (other, self),
            _ => return invalid("product needs one scalar-valued factor"),
        };
        let mut out = Self::new(self.d, self.clusters, vector.value_dim)?;
        for (la, ca) in &scalar.terms {
            for (lb, cb) in &vector.terms {
                let l: Vec<i64> = la.iter().zip(lb).map(|(a, b)| a + b).collect();
                let c: Vec<Complex<T>> = cb.iter().map(|&z| z * ca[0]).collect();
                out.add_term(l, c)?;
            }
        }
        Ok(out)
    }

    /// Multiplies the coefficient at `l` by `symbol(l)`.
    pub fn apply_multiplier(&self, symbol: impl Fn(&[i64]) -> Complex<T>) -> Self {
        let mut out = Self {
            terms: BTreeMap::new(),
            ..*self
        };
        for (l, c) in &self.terms {
            let s = symbol(l);
            let c: Vec<Complex<T>> = c.iter().map(|&z| z * s).collect();
            if !is_zero_coeff(&c) {
                out.terms.insert(l.clone(), c);
            }
        }
        out
    }

    /// Places a one-variable polynomial at variable `var` of the product
    /// `(T^d)^clusters`.
    pub fn embed(&self, d: usize, clusters: usize, var: usize) -> Result<Self> {
        if self.n_vars() != 1 {
            return invalid("only one-variable polynomials can be embedded");
        }
        let mut out = Self::new(d, clusters, self.value_dim)?;
        if var >= out.n_vars() {
            return invalid(format!("variable {var} out of range"));
        }
        for (l, c) in &self.terms {
            let mut f = vec![0; out.n_vars()];
            f[var] = l[0];
            out.add_term(f, c.clone())?;
        }
        Ok(out)
    }

    /// Re-embeds into a larger number of clusters, padding frequencies with
    /// zeros (the polynomial does not depend on the added variables).
    pub fn pad_clusters(&self, clusters: usize) -> Result<Self> {
        if clusters < self.clusters {
            return invalid("cannot drop clusters");
        }
        let mut out = Self::new(self.d, clusters, self.value_dim)?;
        for (l, c) in &self.terms {
            let mut f = l.clone();
            f.resize(self.d * clusters, 0);
            out.terms.insert(f, c.clone());
        }
        Ok(out)
    }

    /// `Σ_l |c_l|²`, the squared `L²` norm on the product torus.
    pub fn l2_norm_sq(&self) -> T {
        self.terms
            .values()
            .flat_map(|c| c.iter().map(|z| z.norm_sqr()))
            .sum()
    }

    /// Conjugate symmetry `c_{-l} = conj(c_l)` within `tol`.
    pub fn is_real(&self, tol: T) -> bool {
        self.terms.iter().all(|(l, c)| {
            let neg: Vec<i64> = l.iter().map(|x| -x).collect();
            let cn = self.coeff(&neg);
            c.iter().zip(&cn).all(|(a, b)| (*a - b.conj()).norm() <= tol)
        })
    }
}

/// `Σ_l <p_l, conj(q_l)>`, the normalised integral of `<p, conj q>`.
pub fn inner_product<T: Real>(p: &TrigPoly<T>, q: &TrigPoly<T>) -> Result<Complex<T>> {
    p.same_shape(q)?;
    let mut acc = Complex::zero();
    for (l, a) in &p.terms {
        if let Some(b) = q.terms.get(l) {
            for (x, y) in a.iter().zip(b) {
                acc = acc + *x * y.conj();
            }
        }
    }
    Ok(acc)
}

fn check_var(j: usize, n_vars: usize) -> Result<()> {
    if j == 0 || j > n_vars {
        return invalid(format!("need 1 <= j <= {n_vars}, got {j}"));
    }
    Ok(())
}

/// Symbol `-i n_{j-1} / |n|` of the j-th Riesz transform on `T^d` (zero at 0).
pub fn riesz_symbol<T: Real>(j: usize, n: &[T]) -> Complex<T> {
    let norm = n.iter().fold(T::zero(), |acc, &x| acc + x * x).sqrt();
    if norm == T::zero() {
        return Complex::zero();
    }
    Complex::new(T::zero(), -(n[j - 1] / norm))
}

/// Symbol `-i sign(n_{j-1})` of the directional Hilbert transform.
pub fn hilbert_symbol<T: Real>(j: usize, n: &[i64]) -> Complex<T> {
    Complex::new(T::zero(), -T::lit(n[j - 1].signum() as f64))
}

/// Periodic Riesz transform `R̃_j` on a single cluster.
pub fn riesz_apply<T: Real>(j: usize, p: &TrigPoly<T>) -> Result<TrigPoly<T>> {
    if p.clusters != 1 {
        return invalid("Riesz transform acts on a single cluster");
    }
    check_var(j, p.d)?;
    Ok(p.apply_multiplier(|l| {
        let n: Vec<T> = l.iter().map(|&x| T::lit(x as f64)).collect();
        riesz_symbol(j, &n)
    }))
}

/// Hilbert transform in variable `j` (1-based over all flattened variables).
pub fn directional_hilbert<T: Real>(j: usize, p: &TrigPoly<T>) -> Result<TrigPoly<T>> {
    check_var(j, p.n_vars())?;
    Ok(p.apply_multiplier(|l| hilbert_symbol(j, l)))
}

/// `sqsin = sign ∘ sin` and `sqcos = sign ∘ cos`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SquareKind {
    Sqsin,
    Sqcos,
}

impl SquareKind {
    /// `φ⁺ = sqcos`, `φ⁻ = sqsin`.
    pub fn from_sign(plus: bool) -> Self {
        if plus {
            Self::Sqcos
        } else {
            Self::Sqsin
        }
    }

    pub fn other(self) -> Self {
        match self {
            Self::Sqsin => Self::Sqcos,
            Self::Sqcos => Self::Sqsin,
        }
    }

    /// Value of the square wave on a quarter arc (where it is constant).
    pub fn arc_value(self, arc: QuarterArc) -> i8 {
        match (self, arc.n()) {
            (Self::Sqsin, 0 | 1) => 1,
            (Self::Sqsin, _) => -1,
            (Self::Sqcos, 0 | -1) => 1,
            (Self::Sqcos, _) => -1,
        }
    }

    /// Exact sign evaluation, resolved by the half-open quarter arcs.
    pub fn eval_exact<T: Real>(self, theta: T) -> i8 {
        self.arc_value(QuarterArc::containing(theta))
    }

    /// Fourier coefficient at frequency `k`.
    pub fn coefficient(self, k: i64) -> Complex<f64> {
        if k % 2 == 0 {
            return Complex::zero();
        }
        let ka = k.abs() as f64;
        match self {
            // 4/(πk) sin kθ  ->  ∓ 2i/(πk) at ±k
            Self::Sqsin => Complex::new(0.0, -2.0 / (PI * k as f64)),
            // 4/π (-1)^{(k-1)/2} cos kθ / k  ->  2/π (-1)^{(k-1)/2} / k at ±k
            Self::Sqcos => {
                let s = if ((k.abs() - 1) / 2) % 2 == 0 { 1.0 } else { -1.0 };
                Complex::new(2.0 * s / (PI * ka), 0.0)
            }
        }
    }
}

/// Fourier truncation `|k| <= cutoff` of a square wave, as a one-variable
/// scalar polynomial.
pub fn square_wave<T: Real>(kind: SquareKind, cutoff: i64) -> Result<TrigPoly<T>> {
    if cutoff < 1 {
        return invalid("harmonic cutoff must be at least 1");
    }
    let mut p = TrigPoly::new(1, 1, 1)?;
    for k in (1..=cutoff).step_by(2) {
        for kk in [k, -k] {
            let c = kind.coefficient(kk);
            p.add_term(vec![kk], vec![Complex::new(T::lit(c.re), T::lit(c.im))])?;
        }
    }
    Ok(p)
}

/// The arc `[nπ/2, (n+1)π/2)` for `n ∈ {-2, -1, 0, 1}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct QuarterArc {
    n: i8,
}

impl QuarterArc {
    pub const ALL: [QuarterArc; 4] = [
        QuarterArc { n: -2 },
        QuarterArc { n: -1 },
        QuarterArc { n: 0 },
        QuarterArc { n: 1 },
    ];

    pub fn new(n: i8) -> Result<Self> {
        if !(-2..=1).contains(&n) {
            return invalid(format!("arc index {n} not in -2..=1"));
        }
        Ok(Self { n })
    }

    pub fn n(self) -> i8 {
        self.n
    }

    /// Position in [`QuarterArc::ALL`].
    pub fn slot(self) -> usize {
        (self.n + 2) as usize
    }

    pub fn start<T: Real>(self) -> T {
        T::lit(self.n as f64 * PI / 2.0)
    }

    /// The arc containing `theta` after reduction to `[-π, π)`.
    pub fn containing<T: Real>(theta: T) -> Self {
        let two_pi = T::lit(2.0 * PI);
        let mut t = (theta + T::lit(PI)) % two_pi;
        if t < T::zero() {
            t = t + two_pi;
        }
        let q = (t / T::lit(PI / 2.0)).floor().to_i64().unwrap_or(0).clamp(0, 3);
        Self { n: q as i8 - 2 }
    }

    /// `<e^{ilθ}>_{A_n} = (2/π) (i^{l(n+1)} - i^{ln}) / (il)`, exact up to the
    /// factor `2/π`.
    pub fn average_of_exponential<T: Real>(self, l: i64) -> Complex<T> {
        if l == 0 {
            return Complex::one();
        }
        fn ipow(e: i64) -> (i64, i64) {
            match e.rem_euclid(4) {
                0 => (1, 0),
                1 => (0, 1),
                2 => (-1, 0),
                _ => (0, -1),
            }
        }
        let n = self.n as i64;
        let (a_re, a_im) = ipow(l * (n + 1));
        let (b_re, b_im) = ipow(l * n);
        let diff = Complex::new(T::lit((a_re - b_re) as f64), T::lit((a_im - b_im) as f64));
        // diff / (i l) = -i diff / l
        let q = Complex::new(diff.im, -diff.re) / T::lit(l as f64);
        q * T::lit(2.0 / PI)
    }
}

/// Output of the quarter-arc projection in variable `var` (1-based): one
/// polynomial per arc, none of which depends on the projected variable.
#[derive(Debug, Clone, PartialEq)]
pub struct ArcBundle<T> {
    var: usize,
    pieces: Vec<TrigPoly<T>>,
}

impl<T: Real> ArcBundle<T> {
    pub fn var(&self) -> usize {
        self.var
    }

    /// Piece on `arc`.
    pub fn piece(&self, arc: QuarterArc) -> &TrigPoly<T> {
        &self.pieces[arc.slot()]
    }

    pub fn pieces(&self) -> impl Iterator<Item = (QuarterArc, &TrigPoly<T>)> {
        QuarterArc::ALL.into_iter().zip(&self.pieces)
    }

    pub fn eval(&self, point: &[T]) -> Result<Vec<Complex<T>>> {
        if self.var == 0 || self.var > point.len() {
            return invalid("point has too few variables");
        }
        let arc = QuarterArc::containing(point[self.var - 1]);
        self.piece(arc).eval(point)
    }

    /// Projects each piece again on its own arc.
    pub fn reproject(&self) -> Result<Self> {
        let pieces = QuarterArc::ALL
            .into_iter()
            .zip(&self.pieces)
            .map(|(arc, p)| project_on_arc(self.var, arc, p))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            var: self.var,
            pieces,
        })
    }

    /// `∫ <self, conj other>`: each arc carries weight 1/4.
    pub fn inner_product(&self, other: &Self) -> Result<Complex<T>> {
        if self.var != other.var {
            return invalid("bundles projected in different variables");
        }
        let quarter = T::lit(0.25);
        let mut acc = Complex::zero();
        for (a, b) in self.pieces.iter().zip(&other.pieces) {
            acc = acc + inner_product(a, b)? * quarter;
        }
        Ok(acc)
    }

    pub fn l2_norm_sq(&self) -> T {
        self.pieces.iter().map(TrigPoly::l2_norm_sq).sum::<T>() * T::lit(0.25)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        if self.var != other.var {
            return invalid("bundles projected in different variables");
        }
        let pieces = self
            .pieces
            .iter()
            .zip(&other.pieces)
            .map(|(a, b)| a.sub(b))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            var: self.var,
            pieces,
        })
    }

    pub fn scale(&self, s: Complex<T>) -> Self {
        Self {
            var: self.var,
            pieces: self.pieces.iter().map(|p| p.scale(s)).collect(),
        }
    }
}

fn project_on_arc<T: Real>(var: usize, arc: QuarterArc, p: &TrigPoly<T>) -> Result<TrigPoly<T>> {
    let mut out = TrigPoly::new(p.d, p.clusters, p.value_dim)?;
    for (l, c) in &p.terms {
        let avg = arc.average_of_exponential::<T>(l[var - 1]);
        if avg == Complex::zero() {
            continue;
        }
        let mut f = l.clone();
        f[var - 1] = 0;
        out.add_term(f, c.iter().map(|&z| z * avg).collect())?;
    }
    Ok(out)
}

/// Quarter-arc projection `π_j`: replaces the dependence on variable `j`
/// (1-based) by its average over the quarter arc containing it.
pub fn quarter_arc_project<T: Real>(j: usize, p: &TrigPoly<T>) -> Result<ArcBundle<T>> {
    check_var(j, p.n_vars())?;
    let pieces = QuarterArc::ALL
        .into_iter()
        .map(|arc| project_on_arc(j, arc, p))
        .collect::<Result<Vec<_>>>()?;
    Ok(ArcBundle { var: j, pieces })
}
