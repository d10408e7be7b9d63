//! Quadrature oracle for the quarter-arc constant `c0`, independent of the
//! library's Fourier machinery. Set `DYADIC_RIESZ_BLESS=1` to rewrite
//! `golden/c0.json`.

use std::f64::consts::PI;
use std::num::NonZeroUsize;
use std::path::PathBuf;

use gauss_quad::GaussLegendre;
use serde_json::{json, Value};

const CUTOFF: usize = 4095;
const PANELS: usize = 4096;

fn rule() -> GaussLegendre {
    GaussLegendre::new(NonZeroUsize::new(16).unwrap())
}

/// `G = ∫_0^1 arctan(x) / x dx`.
fn catalan() -> f64 {
    let r = rule();
    (0..64)
        .map(|i| {
            let (a, b) = (i as f64 / 64.0, (i + 1) as f64 / 64.0);
            r.integrate(a, b, |x| if x == 0.0 { 1.0 } else { x.atan() / x })
        })
        .sum()
}

/// Conjugate series of the truncated square wave `sign(cos θ)` (or
/// `sign(sin θ)`), summed with the Chebyshev recurrence.
fn conjugate_square_wave(theta: f64, cosine: bool, cutoff: usize) -> f64 {
    let two_cos = 2.0 * (2.0 * theta).cos();
    let (mut prev, mut cur) = if cosine {
        ((-theta).sin(), theta.sin())
    } else {
        ((-theta).cos(), theta.cos())
    };
    let mut acc = 0.0;
    for k in (1..=cutoff).step_by(2) {
        let w = if cosine && (k / 2) % 2 == 1 { -1.0 } else { 1.0 };
        // H(cos kθ) = sin kθ, H(sin kθ) = -cos kθ
        acc += if cosine { w * cur } else { -cur } / k as f64;
        let next = two_cos * cur - prev;
        prev = cur;
        cur = next;
    }
    4.0 / PI * acc
}

fn first_arc_average(cosine: bool) -> f64 {
    let r = rule();
    let h = PI / 2.0 / PANELS as f64;
    let total: f64 = (0..PANELS)
        .map(|i| {
            r.integrate(i as f64 * h, (i + 1) as f64 * h, |t| {
                conjugate_square_wave(t, cosine, CUTOFF)
            })
        })
        .sum();
    total * 2.0 / PI
}

fn golden_path() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../golden/c0.json")
}

#[test]
fn quadrature_oracle_pins_c0() {
    let g = catalan();
    assert!((g - 0.915_965_594_177_219).abs() < 1e-14, "G = {g}");
    let closed_form = 8.0 * g / (PI * PI);

    let of_cos = first_arc_average(true);
    let of_sin = first_arc_average(false);
    assert!((of_cos + of_sin).abs() < 1e-12, "{of_cos} vs {of_sin}");
    assert!((of_cos - closed_form).abs() < 1e-6, "{of_cos} vs {closed_form}");

    let doc = json!({
        "schema": 1,
        "c0": closed_form,
        "catalan": g,
        "cutoff": CUTOFF,
        "truncated_average": of_cos,
        "tolerance": 1e-6,
    });
    if std::env::var_os("DYADIC_RIESZ_BLESS").is_some() {
        let text = serde_json::to_string_pretty(&doc).unwrap() + "\n";
        std::fs::write(golden_path(), text).unwrap();
        return;
    }
    let stored: Value = serde_json::from_str(&std::fs::read_to_string(golden_path()).unwrap()).unwrap();
    assert_eq!(stored["schema"], 1);
    let c0 = stored["c0"].as_f64().unwrap();
    assert!((c0 - closed_form).abs() < 1e-15, "golden {c0}, oracle {closed_form}");
    assert!((c0 - dyadic_riesz::experiments::C0_REFERENCE).abs() < 1e-15);
}
