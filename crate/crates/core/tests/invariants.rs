use std::f64::consts::PI;

use proptest::prelude::*;

use dyadic_riesz::coding::{
    check_ek_membership, martingale_decompose, modulation_difference, random_ek_elements,
    sliced_multiplier_apply, RandomEkSpec, SignTossPath,
};
use dyadic_riesz::experiments::{hilbert_resolution_sweep, verify_lemma_hvs, HvsParams, NormOptions};
use dyadic_riesz::haar::{haar_analyze, haar_synthesize, DyadicNode};
use dyadic_riesz::io::{from_json, to_json, HaarCoeffsDoc};
use dyadic_riesz::shift::ShiftOperator;
use dyadic_riesz::value::ValueVec;
use num_complex::Complex;

fn samples(depth: u32) -> impl Strategy<Value = Vec<ValueVec<f64>>> {
    prop::collection::vec(prop::collection::vec(-10.0..10.0f64, 2), 2usize << depth)
        .prop_map(|rows| rows.into_iter().map(ValueVec::new).collect())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn haar_roundtrip(x in (0u32..7).prop_flat_map(samples)) {
        let back = haar_synthesize(&haar_analyze(&x).unwrap());
        for (a, b) in x.iter().zip(&back) {
            prop_assert!(a.max_abs_diff(b) < 1e-12);
        }
    }

    #[test]
    fn shifts_preserve_energy_off_the_root(x in samples(5), d in 1u32..4, j in 0u32..3) {
        let c = haar_analyze(&x).unwrap();
        let op = ShiftOperator::sliced(j % d + 1, d).unwrap();
        let s = op.apply(&c);
        let acted: f64 = c
            .entries()
            .iter()
            .filter(|(n, _)| op.acts_at_depth(n.depth()))
            .map(|(_, v)| v.squared_euclidean())
            .sum();
        prop_assert!((s.squared_l2() - acted).abs() <= 1e-9 * (1.0 + acted));
        // applying twice negates the acted part
        let ss = op.apply(&s);
        for (n, v) in ss.entries() {
            prop_assert!(v.add(&c.coefficient(*n)).norm() < 1e-12);
        }
    }

    #[test]
    fn coefficients_survive_json(x in samples(3)) {
        let c = haar_analyze(&x).unwrap();
        let back: HaarCoeffsDoc = from_json(&to_json(&HaarCoeffsDoc::from(&c)).unwrap()).unwrap();
        prop_assert_eq!(back.to_coeffs().unwrap(), c);
    }

    #[test]
    fn martingale_paths_reconstruct(
        x in samples(4),
        d in 1usize..4,
        theta in prop::collection::vec(-PI..PI, 12),
    ) {
        let c = haar_analyze(&x).unwrap();
        let tosses = 5usize;
        let clusters = tosses.div_ceil(d);
        let e = martingale_decompose(&c, d, clusters - 1).unwrap();
        let th: Vec<Vec<f64>> = theta.chunks(d).take(clusters).map(|c| c.to_vec()).collect();
        let path = SignTossPath::new(d, th).unwrap();
        let got = e.eval_path(&path).unwrap();
        let node = path
            .tosses(tosses)
            .unwrap()
            .into_iter()
            .fold(DyadicNode::ROOT, |n, plus| n.child(plus));
        let cell = haar_synthesize(&c)[node.index() as usize].clone();
        prop_assert!(got.max_abs_diff(&cell) < 1e-12);
    }

    #[test]
    fn sliced_multipliers_stay_in_ek(seed in any::<u64>(), d in 1usize..4, j in 0usize..3) {
        let spec = RandomEkSpec { d, seed, terms: 12, ..Default::default() };
        for e in random_ek_elements::<f64>(&spec).unwrap() {
            let out = sliced_multiplier_apply(j % d + 1, &e).unwrap();
            prop_assert!(check_ek_membership(&out).valid);
        }
    }

    #[test]
    fn modulation_error_is_homogeneous(seed in any::<u64>(), s in 0.1..5.0f64) {
        let spec = RandomEkSpec { seed, terms: 10, ..Default::default() };
        for e in random_ek_elements::<f64>(&spec).unwrap() {
            let a = modulation_difference(1, &e, 64).unwrap().aggregate;
            let b = modulation_difference(1, &e.scale(Complex::new(s, 0.0)), 64).unwrap().aggregate;
            prop_assert!((b - s * a).abs() <= 1e-12 * (1.0 + b.abs()));
        }
    }
}

#[test]
fn fitted_c0_is_one_constant() {
    let mut fits = Vec::new();
    for d in 1..=3 {
        for j in 1..=d {
            for plus in [true, false] {
                let r = verify_lemma_hvs::<f64>(&HvsParams::new(d, j, j - 1, plus, 4095)).unwrap();
                fits.push(r.fitted_c0.unwrap());
            }
        }
    }
    let (lo, hi) = fits.iter().fold((f64::MAX, f64::MIN), |(a, b), &x| (a.min(x), b.max(x)));
    assert!(hi - lo < 1e-6, "{lo} .. {hi}");
}

#[test]
fn hilbert_estimates_grow_with_resolution() {
    let sweep = hilbert_resolution_sweep(3.0, &[32, 64, 128], &NormOptions::default()).unwrap();
    let cot = 1.0 / (PI / 6.0).tan();
    for w in sweep.windows(2) {
        assert!(w[1].estimate >= w[0].estimate);
    }
    assert!(sweep.iter().all(|e| e.estimate > 1.0 && e.estimate < cot));
}
