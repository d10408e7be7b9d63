//! The duality chain `Σ_j <S_j F, G_j>` on the sign-toss coded side.
//!
//! `F` is the coded `f = Σ dF^σ_t φ^σ(θ_t)`; the shift acts as
//! `dF^σ φ^σ ↦ σ dF^σ φ^{-σ}` on its slice. Test functions `G_j` are general
//! predictable block sums `Σ_t Σ_ρ dG^ρ_{j,t} φ^ρ(θ_t)` with `dG` taking
//! arbitrary values on the nodes of depth `t`.
//!
//! Expectations are exact: the node `J_t` reached after `t` tosses has
//! probability `2^{-t}`, and given `J_t` the arc of `θ_t` is uniform.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::hvs::{projected_riesz_table, C0_REFERENCE};
use crate::coding::{martingale_decompose, tosses_from_arcs};
use crate::error::{invalid, Error, Result};
use crate::haar::{haar_synthesize, DyadicNode, HaarCoeffs};
use crate::torus::{inner_product, riesz_apply, square_wave, QuarterArc, SquareKind};
use crate::value::ValueVec;

/// Largest number of tosses for which `‖G‖_q` is enumerated over all arcs.
pub const MAX_ENUMERATED_TOSSES: u32 = 10;

/// `value(J) · 2^{t/2} · φ^ρ(θ_t)`; with this scaling a single node with
/// value 1 has unit `L²` norm.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FamilyBlock {
    pub t: u32,
    pub plus: bool,
    pub values: BTreeMap<u64, Vec<f64>>,
}

/// `G = (G_1, ..., G_d)`, one list of blocks per component.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TestFamily {
    pub d: usize,
    pub depth_limit: u32,
    pub value_dim: usize,
    pub components: Vec<Vec<FamilyBlock>>,
}

impl TestFamily {
    pub fn empty(d: usize, depth_limit: u32, value_dim: usize) -> Self {
        Self {
            d,
            depth_limit,
            value_dim,
            components: vec![Vec::new(); d],
        }
    }

    /// Adds `value · 2^{t/2} 1_J φ^ρ(θ_t)` to component `j` (1-based).
    pub fn with_mode(mut self, j: usize, node: DyadicNode, plus: bool, value: Vec<f64>) -> Self {
        let t = node.depth();
        let comp = &mut self.components[j - 1];
        match comp.iter_mut().find(|b| b.t == t && b.plus == plus) {
            Some(b) => {
                b.values.insert(node.index(), value);
            }
            None => comp.push(FamilyBlock {
                t,
                plus,
                values: BTreeMap::from([(node.index(), value)]),
            }),
        }
        self
    }

    fn validate(&self) -> Result<()> {
        if self.components.len() != self.d {
            return invalid(format!(
                "test family needs {} components, got {}",
                self.d,
                self.components.len()
            ));
        }
        for b in self.components.iter().flatten() {
            if b.t > self.depth_limit {
                return invalid("test family block deeper than its depth limit");
            }
            for (&i, v) in &b.values {
                if i >> b.t != 0 {
                    return invalid(format!("node index {i} out of range at depth {}", b.t));
                }
                if v.len() != self.value_dim {
                    return Err(Error::DimensionMismatch {
                        expected: self.value_dim,
                        got: v.len(),
                    });
                }
            }
        }
        Ok(())
    }
}

/// `v(J_t) · a(arc of θ_t)` with `v` on the nodes of depth `t`.
#[derive(Debug, Clone)]
struct ArcTerm {
    t: u32,
    values: BTreeMap<u64, Vec<f64>>,
    table: [f64; 4],
}

fn sign_table(kind: SquareKind) -> [f64; 4] {
    QuarterArc::ALL.map(|arc| f64::from(kind.arc_value(arc)))
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Mean of `table` over the arcs of `θ_t` that produce toss `t` of `node`.
fn conditional_mean(table: &[f64; 4], node: DyadicNode, t: u32) -> f64 {
    let toss = node.toss(t);
    let active = SquareKind::from_sign(t == 0 || node.toss(t - 1));
    let (sum, count) = QuarterArc::ALL
        .into_iter()
        .filter(|&arc| (active.arc_value(arc) > 0) == toss)
        .fold((0.0, 0.0), |(s, c), arc| (s + table[arc.slot()], c + 1.0));
    sum / count
}

#[derive(Debug, Clone, Copy, Default)]
struct Pairing {
    diagonal: f64,
    diagonal_abs: f64,
    max_off_diagonal: f64,
}

/// `E <X, Y>` split into same-toss and different-toss block pairs.
fn pair_terms(xs: &[ArcTerm], ys: &[ArcTerm]) -> Pairing {
    let mut out = Pairing::default();
    for x in xs {
        for y in ys {
            if x.t == y.t {
                let arc_mean = dot(&x.table, &y.table) / 4.0;
                let weight = 0.5f64.powi(x.t as i32);
                for (i, vx) in &x.values {
                    if let Some(vy) = y.values.get(i) {
                        let term = weight * dot(vx, vy) * arc_mean;
                        out.diagonal += term;
                        out.diagonal_abs += term.abs();
                    }
                }
                continue;
            }
            let (early, late) = if x.t < y.t { (x, y) } else { (y, x) };
            // sum over the later variable's arcs first
            let late_mean = late.table.iter().sum::<f64>() / 4.0;
            let weight = 0.5f64.powi(late.t as i32);
            let mut acc = 0.0;
            for (&i, vl) in &late.values {
                let node = DyadicNode::new(late.t, i).expect("validated node");
                let anc = i >> (late.t - early.t);
                if let Some(ve) = early.values.get(&anc) {
                    acc += weight
                        * dot(ve, vl)
                        * conditional_mean(&early.table, node, early.t)
                        * late_mean;
                }
            }
            out.max_off_diagonal = out.max_off_diagonal.max(acc.abs());
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DualityConfig {
    pub d: usize,
    pub p: f64,
    pub cutoff: i64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DualityReport {
    pub d: usize,
    pub p: f64,
    pub cutoff: i64,
    /// `Σ_j <S_j F, G_j>`.
    pub a: f64,
    /// `c0^{-1} Σ_j <π R̃_j F, G_j>` with truncated square waves.
    pub b: f64,
    /// `c0^{-1} Σ_j <R̃_j F, G_j>` by Parseval.
    pub c: f64,
    pub c0: f64,
    /// `π R̃ φ^+_N` on the first arc: the truncated counterpart of `c0`.
    pub c_n: f64,
    pub truncation_bound: f64,
    /// Largest `|E <X_t, Y_s>|` over block pairs with `t != s`.
    pub max_off_diagonal: f64,
    pub agree: bool,
    pub norm_f: f64,
    pub norm_g: f64,
    pub riesz_norm: f64,
    /// `c0^{-1} ‖R⃗‖_p ‖f‖_p ‖G‖_{q}`.
    pub bound: f64,
    pub slack_ratio: f64,
    pub inequality_holds: bool,
}

/// `‖R⃗‖_{L^p → L^p(ℓ²)} = cot(π / (2 max(p, p')))`, which is 1 at `p = 2`.
pub fn riesz_vector_norm(p: f64) -> f64 {
    if p == 2.0 {
        return 1.0;
    }
    let q = p / (p - 1.0);
    1.0 / (std::f64::consts::PI / (2.0 * p.max(q))).tan()
}

fn lp_grid_norm(f: &[ValueVec<f64>], p: f64) -> f64 {
    let n = f.len() as f64;
    (f.iter().map(|v| v.squared_euclidean().sqrt().powf(p)).sum::<f64>() / n).powf(1.0 / p)
}

/// `‖G‖_{L^q(ℓ²)}` by enumerating the arcs of every toss variable.
pub fn test_family_norm(g: &TestFamily, q: f64) -> Result<f64> {
    g.validate()?;
    let tosses = g.depth_limit + 1;
    if tosses > MAX_ENUMERATED_TOSSES {
        return Err(Error::Resource(format!(
            "{tosses} toss variables exceed the enumeration limit {MAX_ENUMERATED_TOSSES}"
        )));
    }
    let total = 4usize.pow(tosses);
    let sum: f64 = (0..total)
        .into_par_iter()
        .map(|code| {
            let arcs: Vec<QuarterArc> = (0..tosses as usize)
                .map(|s| QuarterArc::ALL[(code >> (2 * s)) & 3])
                .collect();
            let path = tosses_from_arcs(&arcs);
            let mut nodes = Vec::with_capacity(path.len());
            let mut node = DyadicNode::ROOT;
            for &plus in &path {
                nodes.push(node);
                node = node.child(plus);
            }
            let mut sq = 0.0;
            for comp in &g.components {
                let mut v = vec![0.0; g.value_dim];
                for b in comp {
                    let t = b.t as usize;
                    if let Some(val) = b.values.get(&nodes[t].index()) {
                        let s = f64::from(SquareKind::from_sign(b.plus).arc_value(arcs[t]))
                            * 2f64.powf(t as f64 / 2.0);
                        for (o, x) in v.iter_mut().zip(val) {
                            *o += s * x;
                        }
                    }
                }
                sq += v.iter().map(|x| x * x).sum::<f64>();
            }
            sq.sqrt().powf(q)
        })
        .collect::<Vec<_>>()
        .into_iter()
        .sum();
    Ok((sum / total as f64).powf(1.0 / q))
}

fn family_terms(blocks: &[FamilyBlock]) -> Vec<ArcTerm> {
    blocks
        .iter()
        .map(|b| {
            let amp = 2f64.powf(b.t as f64 / 2.0);
            ArcTerm {
                t: b.t,
                values: b
                    .values
                    .iter()
                    .map(|(&i, v)| (i, v.iter().map(|x| x * amp).collect()))
                    .collect(),
                table: sign_table(SquareKind::from_sign(b.plus)),
            }
        })
        .collect()
}

/// Runs the three forms of the duality pairing and the norm inequality.
pub fn duality_chain_check(
    f: &HaarCoeffs<f64>,
    g: &TestFamily,
    config: &DualityConfig,
) -> Result<DualityReport> {
    let DualityConfig { d, p, cutoff } = *config;
    if !f.mean().is_zero() || !f.root().is_zero() {
        return invalid("f must have vanishing mean and root coefficient");
    }
    if !(p > 1.0 && p.is_finite()) {
        return invalid(format!("need 1 < p < ∞, got {p}"));
    }
    if g.d != d || g.depth_limit != f.depth_limit() || g.value_dim != f.value_dim() {
        return invalid("test family must match d, depth and value dimension of f");
    }
    g.validate()?;
    let k_max = f.depth_limit() as usize / d;
    let expansion = martingale_decompose(f, d, k_max)?;
    let f_terms: Vec<(bool, ArcTerm)> = expansion
        .nonzero_blocks()
        .map(|b| {
            (
                b.plus(),
                ArcTerm {
                    t: b.factor().depth(),
                    values: b
                        .factor()
                        .values()
                        .iter()
                        .map(|(&i, v)| (i, v.components().to_vec()))
                        .collect(),
                    table: sign_table(b.square_kind()),
                },
            )
        })
        .collect();

    let c0 = C0_REFERENCE;
    let (mut a, mut b, mut c) = (0.0, 0.0, 0.0);
    let mut diag_abs = 0.0;
    let mut off = 0.0f64;
    for j in 1..=d {
        let on_slice = |t: u32| t as usize % d == j - 1;
        let g_terms = family_terms(&g.components[j - 1]);

        let shifted: Vec<ArcTerm> = f_terms
            .iter()
            .filter(|(_, x)| x.t >= 1 && on_slice(x.t))
            .map(|(plus, x)| {
                let sign = if *plus { 1.0 } else { -1.0 };
                ArcTerm {
                    t: x.t,
                    values: x
                        .values
                        .iter()
                        .map(|(&i, v)| (i, v.iter().map(|y| sign * y).collect()))
                        .collect(),
                    table: sign_table(SquareKind::from_sign(!*plus)),
                }
            })
            .collect();
        let pa = pair_terms(&shifted, &g_terms);

        let tables = [
            projected_riesz_table::<f64>(d, j, false, cutoff)?,
            projected_riesz_table::<f64>(d, j, true, cutoff)?,
        ];
        let projected: Vec<ArcTerm> = f_terms
            .iter()
            .filter(|(_, x)| on_slice(x.t))
            .map(|(plus, x)| ArcTerm {
                table: tables[usize::from(*plus)],
                ..x.clone()
            })
            .collect();
        let pb = pair_terms(&projected, &g_terms);

        // Parseval: <R̃_j φ^σ_N, φ^ρ_N> on one cluster
        let wave = |plus| -> Result<_> {
            square_wave::<f64>(SquareKind::from_sign(plus), cutoff)?.embed(d, 1, j - 1)
        };
        let mut ip = [[0.0; 2]; 2];
        for sigma in [false, true] {
            let r = riesz_apply(j, &wave(sigma)?)?;
            for rho in [false, true] {
                ip[usize::from(sigma)][usize::from(rho)] = inner_product(&r, &wave(rho)?)?.re;
            }
        }
        let mut pc = 0.0;
        for (sigma, x) in f_terms.iter().filter(|(_, x)| on_slice(x.t)) {
            for (blk, y) in g.components[j - 1].iter().zip(&g_terms) {
                if y.t != x.t {
                    continue;
                }
                let rho = blk.plus;
                let weight = 0.5f64.powi(x.t as i32);
                let e: f64 = x
                    .values
                    .iter()
                    .filter_map(|(i, vx)| y.values.get(i).map(|vy| dot(vx, vy)))
                    .sum();
                pc += weight * e * ip[usize::from(*sigma)][usize::from(rho)];
            }
        }

        a += pa.diagonal;
        b += pb.diagonal / c0;
        c += pc / c0;
        diag_abs += pa.diagonal_abs;
        off = off.max(pa.max_off_diagonal).max(pb.max_off_diagonal);
    }

    let c_n = projected_riesz_table::<f64>(d, 1, true, cutoff)?[QuarterArc::new(0)?.slot()];
    let truncation_bound = (1.0 - c_n / c0).abs() * diag_abs + 1e-12 * (1.0 + diag_abs);
    let agree = (a - b).abs() <= truncation_bound
        && (a - c).abs() <= truncation_bound
        && (b - c).abs() <= truncation_bound;

    let q = p / (p - 1.0);
    let norm_f = lp_grid_norm(&haar_synthesize(f), p);
    let norm_g = test_family_norm(g, q)?;
    let riesz_norm = riesz_vector_norm(p);
    let bound = riesz_norm * norm_f * norm_g / c0;
    let slack_ratio = if bound > 0.0 { a.abs() / bound } else { 0.0 };
    Ok(DualityReport {
        d,
        p,
        cutoff,
        a,
        b,
        c,
        c0,
        c_n,
        truncation_bound,
        max_off_diagonal: off,
        agree,
        norm_f,
        norm_g,
        riesz_norm,
        bound,
        slack_ratio,
        inequality_holds: a.abs() <= bound * (1.0 + 1e-12),
    })
}

/// Seeded `f` with zero mean and root coefficient and every other mode drawn
/// uniformly from `[-1, 1]^value_dim`.
pub fn random_mean_zero_coeffs(depth_limit: u32, value_dim: usize, seed: u64) -> Result<HaarCoeffs<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut c = HaarCoeffs::zero(depth_limit, value_dim);
    for depth in 1..=depth_limit {
        for index in 0..1u64 << depth {
            let v = (0..value_dim).map(|_| rng.gen_range(-1.0..1.0)).collect();
            c = c.with_entry(DyadicNode::new(depth, index)?, ValueVec::new(v))?;
        }
    }
    Ok(c)
}

/// Seeded test family with values on every node, toss and sign.
pub fn random_test_family(d: usize, depth_limit: u32, value_dim: usize, seed: u64) -> TestFamily {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut g = TestFamily::empty(d, depth_limit, value_dim);
    for comp in &mut g.components {
        for t in 0..=depth_limit {
            for plus in [true, false] {
                let values = (0..1u64 << t)
                    .map(|i| (i, (0..value_dim).map(|_| rng.gen_range(-1.0..1.0)).collect()))
                    .collect();
                comp.push(FamilyBlock { t, plus, values });
            }
        }
    }
    g
}
