//! Acceptance suite: one line per criterion, nonzero exit if any fails.
//!
//! Run with `cargo test -p dyadic-riesz --test acceptance`.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::path::Path;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use nalgebra::DMatrix;
use num_complex::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use dyadic_riesz::coding::{martingale_decompose, random_ek_elements, RandomEkSpec, SignTossPath};
use dyadic_riesz::experiments::{
    dimension_free_check, duality_chain_check, hilbert_resolution_sweep, modulation_decay_experiment,
    random_mean_zero_coeffs, random_test_family, verify_lemma_hvs, DualityConfig, HvsParams,
    NormOptions,
};
use dyadic_riesz::haar::{haar_analyze, haar_synthesize, DyadicNode, HaarCoeffs};
use dyadic_riesz::shift::{operator_matrix, ShiftOperator};
use dyadic_riesz::torus::{riesz_apply, TrigPoly};
use dyadic_riesz::value::ValueVec;

mod tol {
    pub const HAAR: f64 = 1e-12;
    pub const DIMENSION_FREE: f64 = 1e-10;
    pub const HVS_RESIDUAL: f64 = 5e-3;
    pub const HVS_C0: f64 = 1e-6;
    pub const SLOPE: (f64, f64) = (-1.3, -0.8);
    pub const HILBERT_FRACTION: f64 = 0.9;
    pub const PATHWISE: f64 = 1e-12;
}

type Criterion = (&'static str, Duration, fn() -> Outcome);

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

fn random_samples(n: usize, dim: usize, rng: &mut ChaCha8Rng) -> Vec<ValueVec<f64>> {
    (0..n)
        .map(|_| ValueVec::new((0..dim).map(|_| rng.gen_range(-1.0..1.0)).collect()))
        .collect()
}

/// `h_I` sampled on the `2^(depth+1)` finest cells, with `h¹` at index 0.
fn haar_basis_oracle(depth: u32) -> DMatrix<f64> {
    let cells = 2usize << depth;
    DMatrix::from_fn(cells, cells, |b, c| {
        if b == 0 {
            return 1.0;
        }
        let t = usize::BITS - 1 - b.leading_zeros();
        let i = b - (1 << t);
        let width = cells >> t;
        let (lo, mid) = (i * width, i * width + width / 2);
        let amp = 2f64.powf(t as f64 / 2.0);
        if c < lo || c >= lo + width {
            0.0
        } else if c < mid {
            amp
        } else {
            -amp
        }
    })
}

fn criterion_1() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let samples = random_samples(1 << 11, 3, &mut rng);
    let back = haar_synthesize(&haar_analyze(&samples).unwrap());
    let roundtrip = samples
        .iter()
        .zip(&back)
        .map(|(a, b)| a.max_abs_diff(b))
        .fold(0.0, f64::max);

    let h = haar_basis_oracle(8);
    let n = h.ncols() as f64;
    let gram = &h * h.transpose() / n;
    let gram_err = (gram - DMatrix::identity(h.nrows(), h.nrows())).abs().max();

    // the library's coefficients of an oracle basis function are a unit vector
    let mut analysis_err: f64 = 0.0;
    for b in [0usize, 1, 2, 3, 100, 511] {
        let row: Vec<ValueVec<f64>> = h.row(b).iter().map(|&x| ValueVec::scalar(x)).collect();
        let v = haar_analyze(&row).unwrap().to_basis_vector(0);
        for (k, x) in v.iter().enumerate() {
            analysis_err = analysis_err.max((x - f64::from(u8::from(k == b))).abs());
        }
    }
    outcome(
        roundtrip <= tol::HAAR && gram_err <= tol::HAAR && analysis_err <= tol::HAAR,
        format!("roundtrip@10 {roundtrip:.1e}, gram@8 {gram_err:.1e}, analysis {analysis_err:.1e} (tol {:.0e})", tol::HAAR),
    )
}

type Sparse = Vec<BTreeMap<usize, i64>>;

/// Columns as sparse maps `row -> entry`.
fn sparse(m: &DMatrix<i64>) -> Sparse {
    (0..m.ncols())
        .map(|c| {
            m.column(c)
                .iter()
                .enumerate()
                .filter(|(_, &x)| x != 0)
                .map(|(r, &x)| (r, x))
                .collect()
        })
        .collect()
}

fn product(a: &Sparse, b: &Sparse) -> Sparse {
    b.iter()
        .map(|col| {
            let mut out = BTreeMap::new();
            for (&k, &x) in col {
                for (&r, &y) in &a[k] {
                    *out.entry(r).or_insert(0) += y * x;
                }
            }
            out.retain(|_, v| *v != 0);
            out
        })
        .collect()
}

fn transpose(a: &Sparse) -> Sparse {
    let mut out = vec![BTreeMap::new(); a.len()];
    for (c, col) in a.iter().enumerate() {
        for (&r, &x) in col {
            out[r].insert(c, x);
        }
    }
    out
}

fn negated(a: &Sparse) -> Sparse {
    a.iter()
        .map(|c| c.iter().map(|(&r, &x)| (r, -x)).collect())
        .collect()
}

fn criterion_2() -> Outcome {
    let mut failures = Vec::new();
    let mut checked = 0;
    for depth in [1u32, 4, 8] {
        let n = 2usize << depth;
        for d in 1..=4u32 {
            let ops: Vec<Sparse> = (1..=d)
                .map(|j| sparse(&operator_matrix(ShiftOperator::sliced(j, d).unwrap(), depth).unwrap()))
                .collect();
            let mut sum_sq: Vec<BTreeMap<usize, i64>> = vec![BTreeMap::new(); n];
            for (j, s) in ops.iter().enumerate() {
                if transpose(s) != negated(s) {
                    failures.push(format!("antisymmetry depth {depth} d {d} j {}", j + 1));
                }
                for (k, t) in ops.iter().enumerate() {
                    if j != k && product(&transpose(s), t).iter().any(|c| !c.is_empty()) {
                        failures.push(format!("cross depth {depth} d {d} ({}, {})", j + 1, k + 1));
                    }
                }
                for (c, col) in product(s, s).into_iter().enumerate() {
                    for (r, x) in col {
                        *sum_sq[c].entry(r).or_insert(0) += x;
                    }
                }
                checked += 1;
            }
            let minus_id: Vec<BTreeMap<usize, i64>> = (0..n)
                .map(|c| if c < 2 { BTreeMap::new() } else { BTreeMap::from([(c, -1)]) })
                .collect();
            sum_sq.iter_mut().for_each(|c| c.retain(|_, v| *v != 0));
            if sum_sq != minus_id {
                failures.push(format!("Σ S_j² depth {depth} d {d}"));
            }
        }
    }
    let s0 = sparse(&operator_matrix(ShiftOperator::S0, 8).unwrap());
    if transpose(&s0) != negated(&s0) {
        failures.push("S0 antisymmetry".into());
    }
    outcome(
        failures.is_empty(),
        if failures.is_empty() {
            format!("{checked} sliced shifts exact (antisymmetry, cross-orthogonality, Σ S_j² = -Id off the root modes)")
        } else {
            failures.join("; ")
        },
    )
}

fn criterion_3() -> Outcome {
    let rows = dimension_free_check(&[1, 2, 3, 4, 5, 6], 8, 1).unwrap();
    let worst = rows.iter().map(|r| (r.norm - 1.0).abs()).fold(0.0, f64::max);
    outcome(
        worst <= tol::DIMENSION_FREE,
        format!(
            "norms {:?}, max |norm - 1| {worst:.1e} (tol {:.0e})",
            rows.iter().map(|r| r.norm).collect::<Vec<_>>(),
            tol::DIMENSION_FREE
        ),
    )
}

/// `a e^{iθ1} + b e^{-iθ1}` on one cluster of `T^2`.
fn first_harmonic(a: Complex<f64>, b: Complex<f64>) -> TrigPoly<f64> {
    TrigPoly::new(2, 1, 1)
        .unwrap()
        .with_term(vec![1, 0], vec![a])
        .unwrap()
        .with_term(vec![-1, 0], vec![b])
        .unwrap()
}

fn criterion_4() -> Outcome {
    let i = Complex::new(0.0, 1.0);
    let half = Complex::new(0.5, 0.0);
    let sin = first_harmonic(-i * half, i * half);
    let cos = first_harmonic(half, half);
    let neg_cos = first_harmonic(-half, -half);
    let zero = TrigPoly::new(2, 1, 1).unwrap();
    let cases = [
        ("R1 sin = -cos", riesz_apply(1, &sin).unwrap() == neg_cos),
        ("R1 cos = sin", riesz_apply(1, &cos).unwrap() == sin),
        ("R2 cos = 0", riesz_apply(2, &cos).unwrap() == zero),
        ("R2 sin = 0", riesz_apply(2, &sin).unwrap() == zero),
    ];
    let bad: Vec<_> = cases.iter().filter(|c| !c.1).map(|c| c.0).collect();
    outcome(bad.is_empty(), if bad.is_empty() { "4 identities exact".into() } else { bad.join(", ") })
}

fn golden_c0() -> f64 {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../golden/c0.json");
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap();
    assert_eq!(v["schema"], 1);
    v["c0"].as_f64().unwrap()
}

fn criterion_5() -> Outcome {
    let golden = golden_c0();
    let cutoff = 1 << 14;
    let (mut worst_residual, mut worst_c0, mut matched, mut mismatched) = (0.0f64, 0.0f64, 0, 0);
    let mut failures = Vec::new();
    for d in 1..=4 {
        for j in 1..=d {
            for i in 0..d {
                for plus in [true, false] {
                    let r = verify_lemma_hvs::<f64>(&HvsParams::new(d, j, i, plus, cutoff)).unwrap();
                    if i == j - 1 {
                        matched += 1;
                        let c = r.fitted_c0.unwrap_or(f64::NAN);
                        worst_residual = worst_residual.max(r.residual);
                        worst_c0 = worst_c0.max((c - golden).abs());
                        if !(r.residual <= tol::HVS_RESIDUAL && (c - golden).abs() <= tol::HVS_C0) {
                            failures.push(format!("d {d} j {j} sign {plus}"));
                        }
                    } else {
                        mismatched += 1;
                        if !(r.lhs_norm == 0.0 && r.rhs_norm == 0.0 && r.residual == 0.0) {
                            failures.push(format!("mismatched d {d} j {j} i {i} not zero"));
                        }
                    }
                }
            }
        }
    }
    outcome(
        failures.is_empty(),
        format!(
            "{matched} matched: max residual {worst_residual:.2e} (tol {:.0e}), max |c0 - golden| {worst_c0:.2e} (tol {:.0e}); {mismatched} mismatched exactly 0{}",
            tol::HVS_RESIDUAL,
            tol::HVS_C0,
            if failures.is_empty() { String::new() } else { format!("; failed: {}", failures.join(", ")) }
        ),
    )
}

fn criterion_6() -> Outcome {
    let family = random_ek_elements::<f64>(&RandomEkSpec::default()).unwrap();
    let a_list: Vec<u64> = (4..=12).map(|e| 1u64 << e).collect();
    let table = modulation_decay_experiment(&family, &a_list).unwrap();
    // independent least-squares slope
    let pts: Vec<(f64, f64)> = table
        .rows
        .iter()
        .map(|r| ((r.a as f64).ln(), r.aggregate_error.ln()))
        .collect();
    let n = pts.len() as f64;
    let (mx, my) = (pts.iter().map(|p| p.0).sum::<f64>() / n, pts.iter().map(|p| p.1).sum::<f64>() / n);
    let slope = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum::<f64>()
        / pts.iter().map(|p| (p.0 - mx).powi(2)).sum::<f64>();
    let (lo, hi) = tol::SLOPE;
    outcome(
        (lo..=hi).contains(&slope) && table.rows.len() == 9,
        format!("slope {slope:.4} over A = 2^4..2^12 (window [{lo}, {hi}])"),
    )
}

fn criterion_7() -> Outcome {
    let mut failures = Vec::new();
    let mut worst_gap = 0.0f64;
    let mut worst_off = 0.0f64;
    for seed in 1..=20u64 {
        let d = 1 + (seed as usize % 3);
        let p = if seed % 2 == 0 { 2.0 } else { 3.0 };
        let depth = 5;
        let f = random_mean_zero_coeffs(depth, 2, seed).unwrap();
        let g = random_test_family(d, depth, 2, 1000 + seed);
        let r = duality_chain_check(&f, &g, &DualityConfig { d, p, cutoff: 4095 }).unwrap();
        let gap = (r.a - r.b).abs().max((r.a - r.c).abs()).max((r.b - r.c).abs());
        worst_gap = worst_gap.max(gap / r.truncation_bound);
        worst_off = worst_off.max(r.max_off_diagonal);
        if gap > r.truncation_bound || r.max_off_diagonal != 0.0 || !r.inequality_holds {
            failures.push(format!("seed {seed}"));
        }
    }
    outcome(
        failures.is_empty(),
        format!(
            "20 runs: max gap / truncation bound {worst_gap:.3}, max off-diagonal {worst_off:e}{}",
            if failures.is_empty() { String::new() } else { format!("; failed: {}", failures.join(", ")) }
        ),
    )
}

fn criterion_8() -> Outcome {
    let p = 4.0;
    let target = tol::HILBERT_FRACTION / (PI / (2.0 * p)).tan();
    let sweep = hilbert_resolution_sweep(p, &[128, 256, 512], &NormOptions::default()).unwrap();
    let est: Vec<f64> = sweep.iter().map(|e| e.estimate).collect();
    let monotone = est.windows(2).all(|w| w[1] >= w[0]);
    let last = *est.last().unwrap();
    outcome(
        last >= target && monotone,
        format!(
            "estimates {:?} at N = 128, 256, 512; need >= {target:.4} = 0.9 cot(π/8); monotone {monotone}",
            est.iter().map(|x| (x * 1e4).round() / 1e4).collect::<Vec<_>>()
        ),
    )
}

fn criterion_9() -> Outcome {
    let depth = 6u32;
    let mut worst = 0.0f64;
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for d in 1..=3usize {
        let samples = random_samples(2 << depth, 2, &mut rng);
        let coeffs: HaarCoeffs<f64> = haar_analyze(&samples).unwrap();
        let tosses = depth as usize + 1;
        let clusters = tosses.div_ceil(d);
        let expansion = martingale_decompose(&coeffs, d, clusters - 1).unwrap();
        for _ in 0..1000 {
            let theta: Vec<Vec<f64>> = (0..clusters)
                .map(|_| (0..d).map(|_| rng.gen_range(-PI..PI)).collect())
                .collect();
            let flat: Vec<f64> = theta.iter().flatten().copied().collect();
            let got = expansion
                .eval_path(&SignTossPath::new(d, theta).unwrap())
                .unwrap();
            // oracle: walk the tree with sign(cos) / sign(sin) tosses
            let mut want = coeffs.mean().clone();
            let mut node = DyadicNode::ROOT;
            let mut prev = true;
            for (t, &x) in flat.iter().take(tosses).enumerate() {
                let s = if prev { x.cos() } else { x.sin() };
                let plus = s > 0.0;
                let amp = 2f64.powf(t as f64 / 2.0) * if plus { 1.0 } else { -1.0 };
                want = want.add(&coeffs.coefficient(node).scale(amp));
                node = node.child(plus);
                prev = plus;
            }
            worst = worst.max(got.max_abs_diff(&want));
        }
    }
    outcome(
        worst <= tol::PATHWISE,
        format!("3000 paths at depth 6, d = 1..3: max error {worst:.1e} (tol {:.0e})", tol::PATHWISE),
    )
}

fn main() -> ExitCode {
    let criteria: [Criterion; 9] = [
        ("Haar roundtrip and Gram identity", Duration::from_secs(1), criterion_1),
        ("shift algebra, exact integers", Duration::from_secs(5), criterion_2),
        ("dimension-free L² norm of the shift vector", Duration::from_secs(30), criterion_3),
        ("Riesz multiplier table", Duration::from_millis(100), criterion_4),
        ("projection identity with fitted c0", Duration::from_secs(60), criterion_5),
        ("modulation error slope", Duration::from_secs(10), criterion_6),
        ("duality chain", Duration::from_secs(60), criterion_7),
        ("Hilbert L^4 lower bound", Duration::from_secs(120), criterion_8),
        ("pathwise martingale coding", Duration::from_secs(10), criterion_9),
    ];
    let mut failed = 0;
    for (k, (name, budget, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let result = std::panic::catch_unwind(check)
            .unwrap_or_else(|_| outcome(false, "panicked"));
        let elapsed = start.elapsed();
        failed += usize::from(!result.pass);
        println!(
            "criterion {}: {} | {name} | {} | {:.2}s (budget {}s{})",
            k + 1,
            if result.pass { "PASS" } else { "FAIL" },
            result.detail,
            elapsed.as_secs_f64(),
            budget.as_secs_f64(),
            if elapsed > *budget { ", over" } else { "" },
        );
    }
    println!("acceptance: {} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
