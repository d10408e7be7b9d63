//! The substitution `θ^s_i ↦ θ^s_i + A^{sd+i+1} η_i`.
//!
//! A term `e^{i<l, θ>}` of an `E_k` block acquires the η-frequency
//! `n_i = Σ_s l^s_i A^{sd+i+1}`. Since the Riesz symbol is homogeneous of
//! degree 0, frequencies are stored relative to the block's leading power
//! `A^{kd+m+1}`, leaving only non-positive powers of `A`.

use std::collections::{BTreeMap, HashMap};

use num_bigint::BigInt;
use num_complex::Complex;
use num_traits::Zero;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::ek::{check_ek_membership, sliced_symbol, EkSpaceElement};
use crate::error::{invalid, Result};
use crate::torus::{riesz_symbol, TrigPoly};
use crate::Real;

/// `n / A^P` as, per η-coordinate, a list of `(exponent, digit)` meaning
/// `digit · A^exponent`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ScaledFrequency {
    leading_power: u32,
    entries: Vec<Vec<(i32, i64)>>,
}

impl ScaledFrequency {
    pub fn new(leading_power: u32, entries: Vec<Vec<(i32, i64)>>) -> Self {
        Self {
            leading_power,
            entries,
        }
    }

    /// Scaled η-frequency of the flattened frequency `l` of a block `(k, m)`.
    pub fn of_term(d: usize, k: usize, m: usize, l: &[i64]) -> Self {
        let leading = (k * d + m + 1) as i32;
        let entries = (0..d)
            .map(|i| {
                (0..=k)
                    .filter(|&s| l[s * d + i] != 0)
                    .map(|s| ((s * d + i + 1) as i32 - leading, l[s * d + i]))
                    .collect()
            })
            .collect();
        Self {
            leading_power: leading as u32,
            entries,
        }
    }

    pub fn leading_power(&self) -> u32 {
        self.leading_power
    }

    pub fn entries(&self) -> &[Vec<(i32, i64)>] {
        &self.entries
    }

    /// `n / A^P` in floating point.
    pub fn values<T: Real>(&self, a: u64) -> Vec<T> {
        let a = T::lit(a as f64);
        self.entries
            .iter()
            .map(|row| {
                // smallest powers first
                let mut row = row.clone();
                row.sort_unstable();
                row.iter()
                    .fold(T::zero(), |acc, &(e, c)| acc + T::lit(c as f64) * a.powi(e))
            })
            .collect()
    }

    /// The unscaled stacked frequency `n`, exactly.
    pub fn stacked_exact(&self, a: u64) -> Vec<BigInt> {
        let a = BigInt::from(a);
        self.entries
            .iter()
            .map(|row| {
                row.iter().fold(BigInt::zero(), |acc, &(e, c)| {
                    let power = (e + self.leading_power as i32) as u32;
                    acc + BigInt::from(c) * a.pow(power)
                })
            })
            .collect()
    }
}

/// One term of a modulated `E_k` element.
#[derive(Debug, Clone, PartialEq)]
pub struct ModulatedTerm<T> {
    pub k: usize,
    pub m: usize,
    pub plus: bool,
    pub freq: Vec<i64>,
    pub scaled: ScaledFrequency,
    pub coeff: Vec<Complex<T>>,
}

/// `2 max |l_i| + 1`.
pub fn min_valid_modulus<T: Real>(e: &EkSpaceElement<T>) -> u64 {
    2 * e.max_abs_frequency() as u64 + 1
}

/// Stacked η-frequencies of every term of `e`.
pub fn modulate<T: Real>(e: &EkSpaceElement<T>, a: u64) -> Result<Vec<ModulatedTerm<T>>> {
    let report = check_ek_membership(e);
    if !report.valid {
        return invalid(format!(
            "element violates the E_k support pattern ({} terms)",
            report.violations.len()
        ));
    }
    let min = min_valid_modulus(e);
    if a < min {
        return invalid(format!(
            "A = {a} is too small for frequencies up to {}; need A >= {min}",
            e.max_abs_frequency()
        ));
    }
    let (d, k) = (e.d(), e.k());
    Ok(e.blocks()
        .iter()
        .flat_map(|b| {
            b.poly.terms().iter().map(move |(l, c)| ModulatedTerm {
                k,
                m: b.m,
                plus: b.plus,
                freq: l.clone(),
                scaled: ScaledFrequency::of_term(d, k, b.m, l),
                coeff: c.clone(),
            })
        })
        .collect())
}

/// `true` iff distinct spectral frequencies have distinct stacked frequencies.
pub fn stacked_frequencies_distinct<T>(terms: &[ModulatedTerm<T>], a: u64) -> bool {
    let mut seen: HashMap<Vec<BigInt>, &[i64]> = HashMap::new();
    for t in terms {
        let n = t.scaled.stacked_exact(a);
        match seen.get(&n) {
            Some(l) if *l != t.freq.as_slice() => return false,
            _ => {
                seen.insert(n, &t.freq);
            }
        }
    }
    true
}

/// `m̃_j` evaluated at a scaled frequency.
pub fn modulated_riesz_multiplier<T: Real>(j: usize, scaled: &ScaledFrequency, a: u64) -> Complex<T> {
    riesz_symbol(j, &scaled.values::<T>(a))
}

fn coeff_norm<T: Real>(c: &[Complex<T>]) -> T {
    c.iter().map(|z| z.norm_sqr()).sum::<T>().sqrt()
}

fn symbol_gap<T: Real>(j: usize, d: usize, t: &ModulatedTerm<T>, a: u64) -> Complex<T> {
    let last = &t.freq[t.k * d..];
    modulated_riesz_multiplier::<T>(j, &t.scaled, a) - sliced_symbol::<T>(j, t.m, last)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModulationDifference<T> {
    pub per_term: Vec<T>,
    pub aggregate: T,
}

/// `|m̃_j(n / A^P) - m̃^k_j(l^k)| · ‖c_l‖` per term, and the sum.
pub fn modulation_difference<T: Real>(
    j: usize,
    e: &EkSpaceElement<T>,
    a: u64,
) -> Result<ModulationDifference<T>> {
    if j == 0 || j > e.d() {
        return invalid(format!("need 1 <= j <= {}, got {j}", e.d()));
    }
    let terms = modulate(e, a)?;
    let d = e.d();
    let per_term: Vec<T> = terms
        .par_iter()
        .map(|t| symbol_gap(j, d, t, a).norm() * coeff_norm(&t.coeff))
        .collect();
    let aggregate = per_term.iter().copied().sum();
    Ok(ModulationDifference {
        per_term,
        aggregate,
    })
}

/// Both sides of the multiplier substitution in a duality pairing.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DualityTransfer<T> {
    /// `Σ_j <H̃^k_j Φ, Γ_j>`.
    pub sliced: Complex<T>,
    /// `Σ_j <R̃_{j,η} Φ_A, Γ_{j,A}>`.
    pub modulated: Complex<T>,
    /// `(Σ_j ‖D_j‖²)^{1/2} (Σ_j ‖Γ_j‖²)^{1/2}`.
    pub bound: T,
}

impl<T: Real> DualityTransfer<T> {
    pub fn gap(&self) -> T {
        (self.sliced - self.modulated).norm()
    }
}

/// Pairs `Φ = Σ phi` against `Γ_1, ..., Γ_d` before and after modulation.
///
/// Every `Γ_j` lives on a common number of clusters covering all of `phi`.
pub fn duality_transfer<T: Real>(
    phi: &[EkSpaceElement<T>],
    gamma: &[TrigPoly<T>],
    a: u64,
) -> Result<DualityTransfer<T>> {
    let Some(first) = phi.first() else {
        return invalid("empty family");
    };
    let d = first.d();
    if gamma.len() != d {
        return invalid(format!("need {d} test functions, got {}", gamma.len()));
    }
    let clusters = gamma[0].clusters();
    if gamma
        .iter()
        .any(|g| g.clusters() != clusters || g.d() != d)
        || phi.iter().any(|e| e.d() != d || e.k() + 1 > clusters)
    {
        return invalid("test functions must share d and cover every cluster of the family");
    }
    let mut terms = Vec::new();
    for e in phi {
        terms.extend(modulate(e, a)?);
    }
    if !stacked_frequencies_distinct(&terms, a) {
        return invalid("modulation is not injective on the spectrum");
    }
    // D_j collects terms with the same padded frequency
    let mut sliced = Complex::zero();
    let mut modulated = Complex::zero();
    let mut d_sq = T::zero();
    for j in 1..=d {
        let mut diff: BTreeMap<Vec<i64>, Vec<Complex<T>>> = BTreeMap::new();
        for t in &terms {
            let mut l = t.freq.clone();
            l.resize(clusters * d, 0);
            let g = gamma[j - 1].coeff(&l);
            let sym_s = sliced_symbol::<T>(j, t.m, &t.freq[t.k * d..]);
            let sym_m = modulated_riesz_multiplier::<T>(j, &t.scaled, a);
            for (c, gc) in t.coeff.iter().zip(&g) {
                sliced = sliced + sym_s * c * gc.conj();
                modulated = modulated + sym_m * c * gc.conj();
            }
            let entry = diff
                .entry(l)
                .or_insert_with(|| vec![Complex::zero(); t.coeff.len()]);
            for (x, c) in entry.iter_mut().zip(&t.coeff) {
                *x = *x + (sym_m - sym_s) * c;
            }
        }
        d_sq = d_sq
            + diff
                .values()
                .flat_map(|v| v.iter().map(|z| z.norm_sqr()))
                .sum::<T>();
    }
    let g_sq: T = gamma.iter().map(TrigPoly::l2_norm_sq).sum();
    Ok(DualityTransfer {
        sliced,
        modulated,
        bound: d_sq.sqrt() * g_sq.sqrt(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coding::{random_ek_elements, RandomEkSpec};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn single(d: usize, k: usize, m: usize, freq: Vec<i64>) -> EkSpaceElement<f64> {
        let p = TrigPoly::new(d, k + 1, 1)
            .unwrap()
            .with_term(freq, vec![Complex::new(1.0, 0.0)])
            .unwrap();
        EkSpaceElement::new(d, k, 1).unwrap().with_block(m, true, p).unwrap()
    }

    #[test]
    fn one_cluster_example() {
        let t = modulate(&single(2, 0, 0, vec![1, 0]), 100).unwrap();
        assert_eq!(t[0].scaled.stacked_exact(100), vec![100.into(), 0.into()]);
        assert_eq!(t[0].scaled.values::<f64>(100), vec![1.0, 0.0]);
    }

    #[test]
    fn two_cluster_example() {
        let t = modulate(&single(2, 1, 0, vec![1, 1, 2, 0]), 10).unwrap();
        let s = &t[0].scaled;
        assert_eq!(s.leading_power(), 3);
        // stacked = (A + 2A³, A²)
        assert_eq!(
            s.stacked_exact(10),
            vec![BigInt::from(10 + 2000), BigInt::from(100)]
        );
        for a in [10u64, 1000, 4096] {
            let af = a as f64;
            let v = s.values::<f64>(a);
            assert!((v[0] - (2.0 + af.powi(-2))).abs() < 1e-15);
            assert!((v[1] - 1.0 / af).abs() < 1e-15);
        }
    }

    #[test]
    fn small_modulus_is_rejected() {
        let e = single(2, 0, 0, vec![3, 0]);
        assert_eq!(min_valid_modulus(&e), 7);
        assert!(modulate(&e, 6).is_err());
        assert!(modulate(&e, 7).is_ok());
        assert!(modulate(&single(2, 0, 0, vec![0, 1]), 100).is_err());
    }

    #[test]
    fn stacking_is_injective() {
        let spec = RandomEkSpec {
            terms: 50,
            max_freq: 4,
            ..Default::default()
        };
        let elems = random_ek_elements::<f64>(&spec).unwrap();
        let a = elems.iter().map(min_valid_modulus).max().unwrap();
        let terms: Vec<_> = elems.iter().flat_map(|e| modulate(e, a).unwrap()).collect();
        assert!(stacked_frequencies_distinct(&terms, a));
        let mut keys: Vec<_> = terms.iter().map(|t| t.scaled.stacked_exact(a)).collect();
        let mut spectrum: Vec<_> = terms.iter().map(|t| t.freq.clone()).collect();
        keys.sort();
        keys.dedup();
        spectrum.sort();
        spectrum.dedup();
        assert_eq!(keys.len(), spectrum.len());
    }

    #[test]
    fn multiplier_examples() {
        let axis = ScaledFrequency::new(1, vec![vec![(0, 1)], vec![], vec![]]);
        assert_eq!(
            modulated_riesz_multiplier::<f64>(1, &axis, 100),
            Complex::new(0.0, -1.0)
        );
        let s = ScaledFrequency::new(1, vec![vec![(0, 1), (-1, 3)], vec![(-1, 2)]]);
        let a = 10_000;
        assert!((modulated_riesz_multiplier::<f64>(1, &s, a) - Complex::new(0.0, -1.0)).norm() < 1e-3);
        assert!(modulated_riesz_multiplier::<f64>(2, &s, a).norm() < 1e-3);
        let zero = ScaledFrequency::new(1, vec![vec![], vec![]]);
        assert_eq!(modulated_riesz_multiplier::<f64>(1, &zero, a), Complex::zero());
    }

    #[test]
    fn axis_frequencies_have_no_error() {
        let spec = RandomEkSpec {
            axis_only: true,
            ..Default::default()
        };
        for e in random_ek_elements::<f64>(&spec).unwrap() {
            for j in 1..=2 {
                assert_eq!(modulation_difference(j, &e, 64).unwrap().aggregate, 0.0);
            }
        }
    }

    #[test]
    fn doubling_a_halves_the_error() {
        let e = single(2, 1, 1, vec![1, -2, 3, 1]);
        let total = |a| -> f64 {
            (1..=2)
                .map(|j| modulation_difference(j, &e, a).unwrap().aggregate)
                .sum()
        };
        let mut prev = total(256);
        for a in [512u64, 1024, 2048] {
            let cur = total(a);
            let ratio = cur / prev;
            assert!((0.4..=0.6).contains(&ratio), "A = {a}: {ratio}");
            prev = cur;
        }
    }

    #[test]
    fn error_is_order_one_over_a() {
        let spec = RandomEkSpec::default();
        let elems = random_ek_elements::<f64>(&spec).unwrap();
        let mass: f64 = elems
            .iter()
            .flat_map(|e| modulate(e, 16).unwrap())
            .map(|t| coeff_norm(&t.coeff))
            .sum();
        let consts: Vec<f64> = (4..=12)
            .map(|p| {
                let a = 1u64 << p;
                let agg: f64 = elems
                    .iter()
                    .map(|e| modulation_difference(1, e, a).unwrap().aggregate)
                    .sum();
                agg * a as f64 / mass
            })
            .collect();
        let last = *consts.last().unwrap();
        assert!(last.is_finite() && last > 0.0);
        for c in &consts[4..] {
            assert!((c / last - 1.0).abs() < 0.1, "{consts:?}");
        }
    }

    #[test]
    fn transfer_gap_is_within_bound() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let spec = RandomEkSpec {
            value_dim: 1,
            ..Default::default()
        };
        let phi = random_ek_elements::<f64>(&spec).unwrap();
        let clusters = spec.k_max + 1;
        // Γ_j shares part of the spectrum of Φ and adds unrelated terms
        let gamma: Vec<TrigPoly<f64>> = (0..spec.d)
            .map(|_| {
                let mut g = TrigPoly::new(spec.d, clusters, 1).unwrap();
                for e in &phi {
                    for b in e.blocks() {
                        for l in b.poly.terms().keys() {
                            let mut l = l.clone();
                            l.resize(clusters * spec.d, 0);
                            let c = Complex::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
                            g = g.with_term(l, vec![c]).unwrap();
                        }
                    }
                }
                g.with_term(vec![1; clusters * spec.d], vec![Complex::new(1.0, 0.0)])
                    .unwrap()
            })
            .collect();
        let mut prev_bound = f64::INFINITY;
        for a in [16u64, 64, 256, 1024] {
            let r = duality_transfer(&phi, &gamma, a).unwrap();
            assert!(r.gap() <= r.bound * (1.0 + 1e-12) + 1e-15);
            assert!(r.bound < prev_bound);
            prev_bound = r.bound;
        }
    }
}
