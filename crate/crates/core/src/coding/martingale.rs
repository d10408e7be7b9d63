use std::collections::BTreeMap;

use num_complex::Complex;
use num_traits::One;

use super::ek::EkSpaceElement;
use super::path::SignTossPath;
use crate::error::{invalid, Error, Result};
use crate::haar::{DyadicNode, HaarCoeffs};
use crate::torus::{square_wave, SquareKind, TrigPoly};
use crate::value::ValueVec;
use crate::Real;

/// Values of a predictable factor `dF^±_t` on the nodes of depth `t`.
///
/// `dF^±_t(θ)` equals the stored value at the depth-`t` node selected by the
/// first `t` tosses of `θ`; unlisted nodes carry zero.
#[derive(Debug, Clone, PartialEq)]
pub struct PredictableFactor<T> {
    depth: u32,
    value_dim: usize,
    values: BTreeMap<u64, ValueVec<T>>,
}

impl<T: Real> PredictableFactor<T> {
    pub fn depth(&self) -> u32 {
        self.depth
    }

    pub fn values(&self) -> &BTreeMap<u64, ValueVec<T>> {
        &self.values
    }

    pub fn is_zero(&self) -> bool {
        self.values.is_empty()
    }

    /// Value on the node `node` (which must have depth `self.depth()`).
    pub fn at(&self, node: DyadicNode) -> ValueVec<T> {
        debug_assert_eq!(node.depth(), self.depth);
        self.values
            .get(&node.index())
            .cloned()
            .unwrap_or_else(|| ValueVec::zeros(self.value_dim))
    }

    /// Fourier form on `clusters` copies of `T^d`, with every square wave of
    /// the path indicator truncated at `cutoff`.
    pub fn to_trig_poly(&self, d: usize, clusters: usize, cutoff: i64) -> Result<TrigPoly<T>> {
        let mut out = TrigPoly::new(d, clusters, self.value_dim)?;
        for (&index, v) in &self.values {
            let node = DyadicNode::new(self.depth, index)?;
            let value: Vec<Complex<T>> = v
                .components()
                .iter()
                .map(|&x| Complex::new(x, T::zero()))
                .collect();
            let term = indicator_poly(node, d, clusters, cutoff)?
                .mul(&TrigPoly::constant(d, clusters, value)?)?;
            out = out.add(&term)?;
        }
        Ok(out)
    }
}

/// `Π_s (1 ± φ_N(θ_s)) / 2`, the truncated indicator of reaching `node`.
fn indicator_poly<T: Real>(
    node: DyadicNode,
    d: usize,
    clusters: usize,
    cutoff: i64,
) -> Result<TrigPoly<T>> {
    if node.depth() as usize > d * clusters {
        return invalid("not enough clusters for the path indicator");
    }
    let half = Complex::new(T::lit(0.5), T::zero());
    let mut p = TrigPoly::constant(d, clusters, vec![Complex::one()])?;
    let mut prev = true;
    for s in 0..node.depth() {
        let toss = node.toss(s);
        let wave = square_wave::<T>(SquareKind::from_sign(prev), cutoff)?.embed(
            d,
            clusters,
            s as usize,
        )?;
        let factor = TrigPoly::constant(d, clusters, vec![half])?
            .add(&wave.scale(if toss { half } else { -half }))?;
        p = p.mul(&factor)?;
        prev = toss;
    }
    Ok(p)
}

/// One term `dF^±_{kd+m} · φ^±(θ^k_m)` of the pathwise expansion.
#[derive(Debug, Clone, PartialEq)]
pub struct MartingaleBlock<T> {
    k: usize,
    m: usize,
    plus: bool,
    factor: PredictableFactor<T>,
}

impl<T: Real> MartingaleBlock<T> {
    pub fn k(&self) -> usize {
        self.k
    }

    pub fn m(&self) -> usize {
        self.m
    }

    /// `true` for the `+` block (square wave `sqcos`).
    pub fn plus(&self) -> bool {
        self.plus
    }

    pub fn toss(&self, d: usize) -> usize {
        self.k * d + self.m
    }

    pub fn factor(&self) -> &PredictableFactor<T> {
        &self.factor
    }

    pub fn square_kind(&self) -> SquareKind {
        SquareKind::from_sign(self.plus)
    }

    /// `dF · φ_N(θ^k_m)` on clusters `0..=k`.
    pub fn to_trig_poly(&self, d: usize, cutoff: i64) -> Result<TrigPoly<T>> {
        let clusters = self.k + 1;
        let wave = square_wave::<T>(self.square_kind(), cutoff)?.embed(
            d,
            clusters,
            self.k * d + self.m,
        )?;
        self.factor.to_trig_poly(d, clusters, cutoff)?.mul(&wave)
    }
}

/// `f = dF_{-1} + Σ_t dF^±_t φ^±(θ_t)`.
#[derive(Debug, Clone, PartialEq)]
pub struct MartingaleExpansion<T> {
    d: usize,
    depth_limit: u32,
    mean: ValueVec<T>,
    blocks: Vec<MartingaleBlock<T>>,
}

impl<T: Real> MartingaleExpansion<T> {
    pub fn d(&self) -> usize {
        self.d
    }

    pub fn depth_limit(&self) -> u32 {
        self.depth_limit
    }

    /// `dF_{-1}`.
    pub fn mean(&self) -> &ValueVec<T> {
        &self.mean
    }

    /// All blocks in toss order, `+` before `-`.
    pub fn blocks(&self) -> &[MartingaleBlock<T>] {
        &self.blocks
    }

    pub fn nonzero_blocks(&self) -> impl Iterator<Item = &MartingaleBlock<T>> {
        self.blocks.iter().filter(|b| !b.factor.is_zero())
    }

    /// Number of tosses the expansion depends on.
    pub fn tosses_needed(&self) -> usize {
        self.depth_limit as usize + 1
    }

    /// Evaluates every block at the path with sign-exact square waves.
    pub fn eval_path(&self, path: &SignTossPath<T>) -> Result<ValueVec<T>> {
        if path.d() != self.d {
            return Err(Error::DimensionMismatch {
                expected: self.d,
                got: path.d(),
            });
        }
        let tosses = path.tosses(self.tosses_needed())?;
        let mut nodes = Vec::with_capacity(tosses.len());
        let mut node = DyadicNode::ROOT;
        for &plus in &tosses {
            nodes.push(node);
            node = node.child(plus);
        }
        let mut acc = self.mean.clone();
        for b in &self.blocks {
            let t = b.toss(self.d);
            let theta = path.variable(t).expect("tosses checked");
            let sign = b.square_kind().eval_exact(theta);
            let v = b.factor.at(nodes[t]);
            acc = acc.add(&v.scale(T::lit(sign as f64)));
        }
        Ok(acc)
    }

    /// Groups the Fourier-truncated blocks by cluster into `E_k` elements.
    pub fn to_ek_elements(&self, cutoff: i64) -> Result<Vec<EkSpaceElement<T>>> {
        let k_max = self.blocks.iter().map(|b| b.k).max().unwrap_or(0);
        let mut out: Vec<EkSpaceElement<T>> = (0..=k_max)
            .map(|k| EkSpaceElement::new(self.d, k, self.mean.dim()))
            .collect::<Result<_>>()?;
        for b in self.nonzero_blocks() {
            let poly = b.to_trig_poly(self.d, cutoff)?;
            out[b.k].push_block(b.m, b.plus, poly)?;
        }
        Ok(out)
    }
}

/// Splits a Haar expansion into sign-toss martingale blocks on `K + 1`
/// clusters of `T^d`.
///
/// The node `J` of depth `t` contributes `c_J 2^{t/2}` to the block of toss
/// `t` whose sign is the side of `J` within its parent (`+` at the root).
pub fn martingale_decompose<T: Real>(
    coeffs: &HaarCoeffs<T>,
    d: usize,
    k_max: usize,
) -> Result<MartingaleExpansion<T>> {
    if d == 0 {
        return invalid("d must be at least 1");
    }
    let tosses = coeffs.depth_limit() as usize + 1;
    let available = (k_max + 1) * d;
    if tosses > available {
        return invalid(format!(
            "coefficients up to depth {} need {tosses} tosses, {} clusters of dimension {d} give {available}",
            coeffs.depth_limit(),
            k_max + 1
        ));
    }
    let dim = coeffs.value_dim();
    let mut blocks = Vec::with_capacity(2 * tosses);
    for t in 0..tosses {
        let signs: &[bool] = if t == 0 { &[true] } else { &[true, false] };
        for &plus in signs {
            blocks.push(MartingaleBlock {
                k: t / d,
                m: t % d,
                plus,
                factor: PredictableFactor {
                    depth: t as u32,
                    value_dim: dim,
                    values: BTreeMap::new(),
                },
            });
        }
    }
    // block of toss t with sign s sits at 2t - 1 + (s == '-') for t >= 1
    let slot = |t: usize, plus: bool| if t == 0 { 0 } else { 2 * t - 1 + usize::from(!plus) };

    if !coeffs.root().is_zero() {
        blocks[0]
            .factor
            .values
            .insert(0, coeffs.root().clone());
    }
    for (node, c) in coeffs.entries() {
        let t = node.depth() as usize;
        let amp = T::lit(2f64.powf(t as f64 / 2.0));
        blocks[slot(t, node.is_plus())]
            .factor
            .values
            .insert(node.index(), c.scale(amp));
    }
    Ok(MartingaleExpansion {
        d,
        depth_limit: coeffs.depth_limit(),
        mean: coeffs.mean().clone(),
        blocks,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coding::{check_ek_membership, encode_path};
    use crate::haar::haar_synthesize;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;

    fn random_coeffs(rng: &mut ChaCha8Rng, depth_limit: u32, dim: usize) -> HaarCoeffs<f64> {
        let v = |rng: &mut ChaCha8Rng| {
            ValueVec::new((0..dim).map(|_| rng.gen_range(-1.0..1.0)).collect())
        };
        let mut c = HaarCoeffs::zero(depth_limit, dim)
            .with_mean(v(rng))
            .unwrap()
            .with_entry(DyadicNode::ROOT, v(rng))
            .unwrap();
        for depth in 1..=depth_limit {
            for index in 0..1u64 << depth {
                c = c
                    .with_entry(DyadicNode::new(depth, index).unwrap(), v(rng))
                    .unwrap();
            }
        }
        c
    }

    fn random_path(rng: &mut ChaCha8Rng, d: usize, clusters: usize) -> SignTossPath<f64> {
        let theta = (0..clusters)
            .map(|_| (0..d).map(|_| rng.gen_range(-PI..PI)).collect())
            .collect();
        SignTossPath::new(d, theta).unwrap()
    }

    #[test]
    fn constant_function_has_only_mean() {
        let c = HaarCoeffs::zero(3, 1)
            .with_mean(ValueVec::scalar(2.5))
            .unwrap();
        let e = martingale_decompose(&c, 2, 1).unwrap();
        assert_eq!(e.mean(), &ValueVec::scalar(2.5));
        assert_eq!(e.nonzero_blocks().count(), 0);
    }

    #[test]
    fn root_haar_function_is_first_toss() {
        let c = HaarCoeffs::zero(2, 1)
            .with_entry(DyadicNode::ROOT, ValueVec::scalar(1.0))
            .unwrap();
        let e = martingale_decompose(&c, 2, 1).unwrap();
        let blocks: Vec<_> = e.nonzero_blocks().collect();
        assert_eq!(blocks.len(), 1);
        let b = blocks[0];
        assert_eq!((b.k(), b.m(), b.plus()), (0, 0, true));
        assert_eq!(b.factor().at(DyadicNode::ROOT), ValueVec::scalar(1.0));
    }

    #[test]
    fn depth_mismatch_is_rejected() {
        let c = HaarCoeffs::<f64>::zero(4, 1);
        assert!(martingale_decompose(&c, 2, 1).is_err());
        assert!(martingale_decompose(&c, 2, 2).is_ok());
    }

    #[test]
    fn one_summand_per_toss_is_active() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let c = random_coeffs(&mut rng, 3, 1);
        let e = martingale_decompose(&c, 2, 1).unwrap();
        for b in e.blocks() {
            for &index in b.factor().values().keys() {
                let node = DyadicNode::new(b.factor().depth(), index).unwrap();
                assert_eq!(node.is_plus(), b.plus());
            }
        }
    }

    #[test]
    fn pathwise_reconstruction_depth4() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let c = random_coeffs(&mut rng, 4, 2);
        let grid = haar_synthesize(&c);
        let e = martingale_decompose(&c, 2, 2).unwrap();
        for _ in 0..1000 {
            let path = random_path(&mut rng, 2, 3);
            let cell = encode_path(&path, 5).unwrap();
            let got = e.eval_path(&path).unwrap();
            assert!(got.max_abs_diff(&grid[cell.index() as usize]) < 1e-12);
        }
    }

    #[test]
    fn fourier_blocks_lie_in_ek() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let c = random_coeffs(&mut rng, 3, 1);
        let e = martingale_decompose(&c, 2, 1).unwrap();
        for ek in e.to_ek_elements(5).unwrap() {
            let report = check_ek_membership(&ek);
            assert!(report.valid, "{:?}", report.violations);
        }
    }

    #[test]
    fn fourier_blocks_approach_the_function() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let c = random_coeffs(&mut rng, 1, 1);
        let grid = haar_synthesize(&c);
        let e = martingale_decompose(&c, 2, 0).unwrap();
        let total = e
            .to_ek_elements(201)
            .unwrap()
            .into_iter()
            .try_fold(
                TrigPoly::constant(2, 1, vec![Complex::new(e.mean().components()[0], 0.0)])
                    .unwrap(),
                |acc, ek| acc.add(&ek.total()?),
            )
            .unwrap();
        // centres of the quarter-arc squares stay away from the jumps
        for &(a, b) in &[(0.7, 0.9), (2.3, -0.6), (-2.0, 2.5), (-0.8, -2.2)] {
            let path = SignTossPath::new(2, vec![vec![a, b]]).unwrap();
            let cell = encode_path(&path, 2).unwrap();
            let got = total.eval(&[a, b]).unwrap()[0];
            assert!((got.re - grid[cell.index() as usize].components()[0]).abs() < 0.05);
            assert!(got.im.abs() < 1e-12);
        }
    }
}
