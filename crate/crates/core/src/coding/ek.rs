use num_complex::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::torus::{riesz_symbol, TrigPoly};
use crate::Real;

/// The polynomial of one `(m, ±)` block of an `E_k` element.
#[derive(Debug, Clone, PartialEq)]
pub struct EkBlock<T> {
    pub m: usize,
    pub plus: bool,
    pub poly: TrigPoly<T>,
}

/// A finite sum of blocks `Φ^±_{kd+m}` living on clusters `0..=k`.
#[derive(Debug, Clone, PartialEq)]
pub struct EkSpaceElement<T> {
    d: usize,
    k: usize,
    value_dim: usize,
    blocks: Vec<EkBlock<T>>,
}

impl<T: Real> EkSpaceElement<T> {
    pub fn new(d: usize, k: usize, value_dim: usize) -> Result<Self> {
        if d == 0 || value_dim == 0 {
            return invalid("d and value_dim must be positive");
        }
        Ok(Self {
            d,
            k,
            value_dim,
            blocks: Vec::new(),
        })
    }

    pub fn with_block(mut self, m: usize, plus: bool, poly: TrigPoly<T>) -> Result<Self> {
        self.push_block(m, plus, poly)?;
        Ok(self)
    }

    /// Adds `poly` to block `(m, ±)`, creating it if needed.
    pub fn push_block(&mut self, m: usize, plus: bool, poly: TrigPoly<T>) -> Result<()> {
        if m >= self.d {
            return invalid(format!("block index m = {m} needs m < d = {}", self.d));
        }
        if poly.d() != self.d || poly.clusters() != self.k + 1 {
            return invalid(format!(
                "block polynomial must live on {} clusters of dimension {}",
                self.k + 1,
                self.d
            ));
        }
        if poly.value_dim() != self.value_dim {
            return Err(Error::DimensionMismatch {
                expected: self.value_dim,
                got: poly.value_dim(),
            });
        }
        match self.blocks.iter_mut().find(|b| b.m == m && b.plus == plus) {
            Some(b) => b.poly = b.poly.add(&poly)?,
            None => self.blocks.push(EkBlock { m, plus, poly }),
        }
        Ok(())
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn value_dim(&self) -> usize {
        self.value_dim
    }

    pub fn blocks(&self) -> &[EkBlock<T>] {
        &self.blocks
    }

    pub fn term_count(&self) -> usize {
        self.blocks.iter().map(|b| b.poly.len()).sum()
    }

    /// Largest `|l_i|` over all terms.
    pub fn max_abs_frequency(&self) -> i64 {
        self.blocks
            .iter()
            .map(|b| b.poly.max_abs_frequency())
            .max()
            .unwrap_or(0)
    }

    /// Sum of all blocks as one polynomial.
    pub fn total(&self) -> Result<TrigPoly<T>> {
        self.blocks.iter().try_fold(
            TrigPoly::new(self.d, self.k + 1, self.value_dim)?,
            |acc, b| acc.add(&b.poly),
        )
    }

    pub fn scale(&self, s: Complex<T>) -> Self {
        Self {
            blocks: self
                .blocks
                .iter()
                .map(|b| EkBlock {
                    m: b.m,
                    plus: b.plus,
                    poly: b.poly.scale(s),
                })
                .collect(),
            ..*self
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ViolationKind {
    /// `l^k_m = 0`: the term survives averaging in `θ^k_m`.
    ZeroLeadingEntry,
    /// `l^k_i != 0` for some `i > m`.
    TrailingEntry { position: usize },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EkViolation {
    pub block: usize,
    pub m: usize,
    pub plus: bool,
    pub freq: Vec<i64>,
    pub kind: ViolationKind,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EkReport {
    pub valid: bool,
    pub violations: Vec<EkViolation>,
}

/// Checks `l^k_m != 0` and `l^k_{m+1} = ... = l^k_{d-1} = 0` on every term.
pub fn check_ek_membership<T: Real>(e: &EkSpaceElement<T>) -> EkReport {
    let (d, k) = (e.d, e.k);
    let mut violations = Vec::new();
    for (bi, b) in e.blocks.iter().enumerate() {
        for l in b.poly.terms().keys() {
            let last = &l[k * d..];
            let mut push = |kind| {
                violations.push(EkViolation {
                    block: bi,
                    m: b.m,
                    plus: b.plus,
                    freq: l.clone(),
                    kind,
                })
            };
            if last[b.m] == 0 {
                push(ViolationKind::ZeroLeadingEntry);
            }
            for (position, &x) in last.iter().enumerate().skip(b.m + 1) {
                if x != 0 {
                    push(ViolationKind::TrailingEntry { position });
                }
            }
        }
    }
    EkReport {
        valid: violations.is_empty(),
        violations,
    }
}

/// `m̃^k_j(l^k)`: the Riesz symbol at `(0, ..., l^k_m, ..., 0)`.
pub fn sliced_symbol<T: Real>(j: usize, m: usize, last_cluster: &[i64]) -> Complex<T> {
    let mut axis = vec![T::zero(); last_cluster.len()];
    axis[m] = T::lit(last_cluster[m] as f64);
    riesz_symbol(j, &axis)
}

/// The sliced multiplier `H̃^k_j` applied block by block.
pub fn sliced_multiplier_apply<T: Real>(j: usize, e: &EkSpaceElement<T>) -> Result<EkSpaceElement<T>> {
    if j == 0 || j > e.d {
        return invalid(format!("need 1 <= j <= {}, got {j}", e.d));
    }
    let start = e.k * e.d;
    Ok(EkSpaceElement {
        blocks: e
            .blocks
            .iter()
            .map(|b| EkBlock {
                m: b.m,
                plus: b.plus,
                poly: b
                    .poly
                    .apply_multiplier(|l| sliced_symbol(j, b.m, &l[start..])),
            })
            .collect(),
        ..*e
    })
}

/// Parameters of a seeded random finite spectrum in `E_{k_min} ⊕ ... ⊕ E_{k_max}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RandomEkSpec {
    pub d: usize,
    pub k_min: usize,
    pub k_max: usize,
    pub terms: usize,
    pub max_freq: i64,
    pub value_dim: usize,
    /// Only frequencies `l^k_m e_m` (no other nonzero entry).
    pub axis_only: bool,
    pub seed: u64,
}

impl Default for RandomEkSpec {
    fn default() -> Self {
        Self {
            d: 2,
            k_min: 0,
            k_max: 2,
            terms: 30,
            max_freq: 3,
            value_dim: 2,
            axis_only: false,
            seed: 1,
        }
    }
}

/// One element per `k` in `k_min..=k_max`, with `terms` random terms in total.
pub fn random_ek_elements<T: Real>(spec: &RandomEkSpec) -> Result<Vec<EkSpaceElement<T>>> {
    if spec.k_min > spec.k_max || spec.max_freq < 1 {
        return invalid("random spectrum needs k_min <= k_max and max_freq >= 1");
    }
    let (d, f) = (spec.d, spec.max_freq);
    let mut out: Vec<EkSpaceElement<T>> = (spec.k_min..=spec.k_max)
        .map(|k| EkSpaceElement::new(d, k, spec.value_dim))
        .collect::<Result<_>>()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    for _ in 0..spec.terms {
        let k = rng.gen_range(spec.k_min..=spec.k_max);
        let m = rng.gen_range(0..d);
        let plus = rng.gen_bool(0.5);
        let mut freq = vec![0i64; (k + 1) * d];
        if !spec.axis_only {
            for x in &mut freq[..k * d + m] {
                *x = rng.gen_range(-f..=f);
            }
        }
        let lead = rng.gen_range(1..=f);
        freq[k * d + m] = if rng.gen_bool(0.5) { lead } else { -lead };
        let coeff = (0..spec.value_dim)
            .map(|_| {
                Complex::new(
                    T::lit(rng.gen_range(-1.0..1.0)),
                    T::lit(rng.gen_range(-1.0..1.0)),
                )
            })
            .collect();
        let poly = TrigPoly::new(d, k + 1, spec.value_dim)?.with_term(freq, coeff)?;
        out[k - spec.k_min].push_block(m, plus, poly)?;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::torus::directional_hilbert;
    use num_traits::Zero;

    fn c(re: f64, im: f64) -> Complex<f64> {
        Complex::new(re, im)
    }

    fn single(d: usize, k: usize, m: usize, freq: Vec<i64>) -> EkSpaceElement<f64> {
        let p = TrigPoly::new(d, k + 1, 1)
            .unwrap()
            .with_term(freq, vec![c(1.0, 0.0)])
            .unwrap();
        EkSpaceElement::new(d, k, 1).unwrap().with_block(m, true, p).unwrap()
    }

    #[test]
    fn membership_examples() {
        assert!(check_ek_membership(&single(2, 0, 0, vec![2, 0])).valid);
        let r = check_ek_membership(&single(2, 0, 0, vec![0, 0]));
        assert!(!r.valid);
        assert_eq!(r.violations[0].kind, ViolationKind::ZeroLeadingEntry);
        let r = check_ek_membership(&single(2, 0, 0, vec![1, 3]));
        assert!(!r.valid);
        assert_eq!(
            r.violations[0].kind,
            ViolationKind::TrailingEntry { position: 1 }
        );
        // earlier clusters are unconstrained
        assert!(check_ek_membership(&single(2, 1, 1, vec![0, 4, -2, 1])).valid);
    }

    #[test]
    fn sliced_multiplier_examples() {
        let e = single(3, 1, 1, vec![1, 2, 3, -4, 5, 0]);
        let out = sliced_multiplier_apply(2, &e).unwrap();
        assert_eq!(
            out.blocks()[0].poly.coeff(&[1, 2, 3, -4, 5, 0]),
            vec![c(0.0, -1.0)]
        );
        let out = sliced_multiplier_apply(1, &e).unwrap();
        assert!(out.blocks()[0].poly.is_empty());
        assert!(sliced_multiplier_apply(4, &e).is_err());
    }

    #[test]
    fn closure_under_sliced_multiplier() {
        let spec = RandomEkSpec {
            d: 3,
            ..Default::default()
        };
        for e in random_ek_elements::<f64>(&spec).unwrap() {
            assert!(check_ek_membership(&e).valid);
            for j in 1..=3 {
                let out = sliced_multiplier_apply(j, &e).unwrap();
                assert!(check_ek_membership(&out).valid);
                for (a, b) in e.blocks().iter().zip(out.blocks()) {
                    assert!(b.poly.terms().keys().all(|l| a.poly.terms().contains_key(l)));
                }
            }
        }
    }

    #[test]
    fn sliced_multiplier_is_hilbert_on_the_last_factor() {
        // dF ⊗ φ with φ a polynomial in θ^k_m: the sliced multiplier equals
        // dF ⊗ H_{kd+m} φ when m = j - 1.
        let (d, k) = (2, 1);
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for _ in 0..20 {
            let m = rng.gen_range(0..d);
            let mut df = TrigPoly::new(d, k + 1, 1).unwrap();
            for _ in 0..4 {
                let mut l = vec![0i64; (k + 1) * d];
                for x in &mut l[..k * d + m] {
                    *x = rng.gen_range(-3..=3);
                }
                df = df
                    .with_term(l, vec![c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))])
                    .unwrap();
            }
            let mut phi = TrigPoly::new(d, k + 1, 1).unwrap();
            for n in [-3i64, -1, 2, 5] {
                let mut l = vec![0i64; (k + 1) * d];
                l[k * d + m] = n;
                phi = phi.with_term(l, vec![c(rng.gen_range(-1.0..1.0), 0.0)]).unwrap();
            }
            let e = EkSpaceElement::new(d, k, 1)
                .unwrap()
                .with_block(m, true, df.mul(&phi).unwrap())
                .unwrap();
            for j in 1..=d {
                let got = sliced_multiplier_apply(j, &e).unwrap().total().unwrap();
                let want = if j - 1 == m {
                    df.mul(&directional_hilbert(k * d + m + 1, &phi).unwrap())
                        .unwrap()
                } else {
                    TrigPoly::new(d, k + 1, 1).unwrap()
                };
                let diff = got.sub(&want).unwrap();
                assert!(diff.l2_norm_sq() < 1e-24);
            }
        }
    }

    #[test]
    fn random_spec_is_seeded() {
        let spec = RandomEkSpec::default();
        let a = random_ek_elements::<f64>(&spec).unwrap();
        let b = random_ek_elements::<f64>(&spec).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.len(), 3);
        assert!(a.iter().map(EkSpaceElement::term_count).sum::<usize>() <= 30);
        let axis = random_ek_elements::<f64>(&RandomEkSpec {
            axis_only: true,
            ..spec
        })
        .unwrap();
        for e in &axis {
            for b in e.blocks() {
                for l in b.poly.terms().keys() {
                    assert_eq!(l.iter().filter(|x| !x.is_zero()).count(), 1);
                }
            }
        }
    }
}
