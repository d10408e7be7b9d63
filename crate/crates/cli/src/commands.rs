use std::path::Path;

use anyhow::Result;
use serde::Serialize;

use dyadic_riesz::coding::{
    check_ek_membership, martingale_decompose, modulate, random_ek_elements,
    stacked_frequencies_distinct, EkReport, RandomEkSpec,
};
use dyadic_riesz::experiments::{
    dimension_free_check, duality_chain_check, lp_norm_estimate, modulation_decay_experiment,
    random_mean_zero_coeffs, random_test_family, verify_lemma_hvs, DualityConfig,
    HaarShiftOperator, HvsParams, Identity, IndexBase, LemmaReport, LinearOperator, NormOptions,
    ProjectionVar, TruncatedHilbert,
};
use dyadic_riesz::haar::{haar_analyze, haar_synthesize};
use dyadic_riesz::io::{
    ArcBundleDoc, EkFamilyDoc, HaarCoeffsDoc, MartingaleDoc, ModulatedTermDoc, ModulationDoc,
    TrigPolyDoc,
};
use dyadic_riesz::shift::{operator_matrix, ShiftOperator, MAX_MATRIX_DEPTH};
use dyadic_riesz::torus::{directional_hilbert, quarter_arc_project, riesz_apply, square_wave, SquareKind};
use dyadic_riesz::{EkSpaceElement64, HaarCoeffs64, TrigPoly64, ValueVec64};

use crate::cli::*;
use crate::config::Context;
use crate::failure::{lib, usage};
use crate::golden;
use crate::output::{emit, fmt_f64, json, parse_samples, read_doc, read_text, Table};

pub fn run(command: Command, ctx: &Context) -> Result<()> {
    match command {
        Command::Haar(c) => haar(c, ctx),
        Command::Shift(c) => shift(c, ctx),
        Command::Torus(c) => torus(c, ctx),
        Command::Code(c) => code(c, ctx),
        Command::Verify(VerifyCommand::Hvs {
            d,
            j,
            i,
            sign,
            index_base,
            projection,
            n,
            residual_tol,
            format,
        }) => {
            let setup = HvsSetup {
                d: ctx.d(d),
                j: ctx.j(j),
                i,
                sign,
                index_base,
                projection,
                cutoff: ctx.n(n),
                residual_tol,
            };
            verify_hvs(&setup, format, ctx)
        }
        Command::Experiment(c) => experiment(c, ctx),
        Command::Norm(c) => norm(c, ctx),
    }
}

fn out(ctx: &Context, text: &str) -> Result<()> {
    emit(ctx.output.as_deref(), text)
}

fn read_coeffs(path: &Path) -> Result<HaarCoeffs64> {
    read_doc::<HaarCoeffsDoc>(path)?.to_coeffs().map_err(lib)
}

fn read_poly(path: &Path) -> Result<TrigPoly64> {
    read_doc::<TrigPolyDoc>(path)?.to_poly().map_err(lib)
}

fn haar(c: HaarCommand, ctx: &Context) -> Result<()> {
    match c {
        HaarCommand::Analyze { input } => {
            let rows = parse_samples(&read_text(&input)?, &input.display().to_string())?;
            if rows.is_empty() {
                return Err(usage(format!("{}: no samples", input.display())));
            }
            let samples: Vec<ValueVec64> = rows.into_iter().map(ValueVec64::new).collect();
            let coeffs = haar_analyze(&samples).map_err(lib)?;
            out(ctx, &json(&HaarCoeffsDoc::from(&coeffs))?)
        }
        HaarCommand::Synthesize { input } => {
            let coeffs = read_coeffs(&input)?;
            let mut header = vec!["cell".to_string()];
            header.extend((1..=coeffs.value_dim()).map(|k| format!("v{k}")));
            let mut t = Table::new(&header.iter().map(String::as_str).collect::<Vec<_>>());
            for (cell, v) in haar_synthesize(&coeffs).iter().enumerate() {
                let mut row = vec![cell.to_string()];
                row.extend(v.components().iter().map(|&x| fmt_f64(x)));
                t.push(row);
            }
            out(ctx, &t.render()?)
        }
    }
}

fn shift_operator(s: &ShiftSelect, ctx: &Context) -> Result<ShiftOperator> {
    match s.op {
        ShiftOp::S0 => Ok(ShiftOperator::S0),
        ShiftOp::Sj => {
            let d = s.d.unwrap_or(ctx.d(None) as u32);
            let j = s.j.unwrap_or(ctx.j(None) as u32);
            ShiftOperator::sliced(j, d).map_err(lib)
        }
    }
}

fn shift(c: ShiftCommand, ctx: &Context) -> Result<()> {
    match c {
        ShiftCommand::Apply { select, input } => {
            let op = shift_operator(&select, ctx)?;
            let coeffs = read_coeffs(&input)?;
            out(ctx, &json(&HaarCoeffsDoc::from(&op.apply(&coeffs)))?)
        }
        ShiftCommand::Matrix { select, depth } => {
            let op = shift_operator(&select, ctx)?;
            let depth = ctx.depth(depth);
            if depth > MAX_MATRIX_DEPTH {
                return Err(usage(format!("matrix depth {depth} exceeds {MAX_MATRIX_DEPTH}")));
            }
            let m = operator_matrix(op, depth).map_err(lib)?;
            let mut header = vec!["row".to_string()];
            header.extend((0..m.ncols()).map(|c| format!("e{c}")));
            let mut t = Table::new(&header.iter().map(String::as_str).collect::<Vec<_>>());
            t.note("depth", depth);
            for r in 0..m.nrows() {
                let mut row = vec![r.to_string()];
                row.extend(m.row(r).iter().map(|x| x.to_string()));
                t.push(row);
            }
            out(ctx, &t.render()?)
        }
    }
}

fn torus(c: TorusCommand, ctx: &Context) -> Result<()> {
    match c {
        TorusCommand::Riesz { j, input } => {
            let p = riesz_apply(ctx.j(j), &read_poly(&input)?).map_err(lib)?;
            out(ctx, &json(&TrigPolyDoc::from(&p))?)
        }
        TorusCommand::Hilbert { j, input } => {
            let p = directional_hilbert(ctx.j(j), &read_poly(&input)?).map_err(lib)?;
            out(ctx, &json(&TrigPolyDoc::from(&p))?)
        }
        TorusCommand::Project { j, input } => {
            let b = quarter_arc_project(ctx.j(j), &read_poly(&input)?).map_err(lib)?;
            out(ctx, &json(&ArcBundleDoc::from(&b))?)
        }
        TorusCommand::Squarewave { kind, n, d, var } => {
            let kind = match kind {
                WaveKind::Sqcos => SquareKind::Sqcos,
                WaveKind::Sqsin => SquareKind::Sqsin,
            };
            let d = d.unwrap_or(1);
            if var == 0 || var > d {
                return Err(usage(format!("--var must lie in 1..={d}, got {var}")));
            }
            let mut p = square_wave::<f64>(kind, ctx.n(n)).map_err(lib)?;
            if d > 1 {
                p = p.embed(d, 1, var - 1).map_err(lib)?;
            }
            out(ctx, &json(&TrigPolyDoc::from(&p))?)
        }
    }
}

fn spectrum(args: &SpectrumArgs, ctx: &Context) -> Result<Vec<EkSpaceElement64>> {
    if let Some(path) = &args.input {
        return read_doc::<EkFamilyDoc>(path)?.to_family().map_err(lib);
    }
    let spec = RandomEkSpec {
        d: ctx.d(args.d),
        k_min: args.k_min,
        k_max: args.k_max,
        terms: args.terms,
        max_freq: args.max_freq,
        value_dim: args.value_dim,
        axis_only: args.axis_only,
        seed: ctx.seed,
    };
    random_ek_elements(&spec).map_err(lib)
}

#[derive(Serialize)]
struct EkCheck {
    valid: bool,
    elements: Vec<EkReport>,
}

#[derive(Serialize)]
struct ModulatedElement {
    k: usize,
    distinct: bool,
    terms: Vec<ModulatedTermDoc>,
}

#[derive(Serialize)]
struct ModulateOut {
    a: u64,
    elements: Vec<ModulatedElement>,
}

fn code(c: CodeCommand, ctx: &Context) -> Result<()> {
    match c {
        CodeCommand::Decompose { input, d, k_max } => {
            let coeffs = read_coeffs(&input)?;
            let d = ctx.d(d);
            if d == 0 {
                return Err(usage("d must be at least 1"));
            }
            let tosses = coeffs.depth_limit() as usize + 1;
            let k_max = k_max.unwrap_or(tosses.div_ceil(d) - 1);
            let e = martingale_decompose(&coeffs, d, k_max).map_err(lib)?;
            out(ctx, &json(&MartingaleDoc::from(&e))?)
        }
        CodeCommand::CheckEk { input } => {
            let family = read_doc::<EkFamilyDoc>(&input)?.to_family().map_err(lib)?;
            let elements: Vec<EkReport> = family.iter().map(check_ek_membership).collect();
            let valid = elements.iter().all(|r| r.valid);
            out(ctx, &json(&EkCheck { valid, elements })?)
        }
        CodeCommand::RandomEk { spectrum: s } => {
            let family = spectrum(&s, ctx)?;
            out(ctx, &json(&EkFamilyDoc::new(&family))?)
        }
        CodeCommand::Modulate { a, spectrum: s } => {
            let family = spectrum(&s, ctx)?;
            let elements = family
                .iter()
                .map(|e| {
                    let terms = modulate(e, a).map_err(lib)?;
                    Ok(ModulatedElement {
                        k: e.k(),
                        distinct: stacked_frequencies_distinct(&terms, a),
                        terms: ModulationDoc::new(a, &terms).terms,
                    })
                })
                .collect::<Result<_>>()?;
            out(ctx, &json(&ModulateOut { a, elements })?)
        }
        CodeCommand::DecaySweep { a_list, spectrum: s } => modulation_sweep(a_list, &s, None, ctx),
    }
}

fn modulation_sweep(a_list: Option<Vec<u64>>, s: &SpectrumArgs, report: Option<&Path>, ctx: &Context) -> Result<()> {
    let family = spectrum(s, ctx)?;
    let a_list = ctx.a_list(a_list);
    let table = modulation_decay_experiment(&family, &a_list).map_err(lib)?;
    let mut t = Table::new(&["A", "aggregate_error"]);
    if s.input.is_none() {
        t.note("seed", ctx.seed);
    }
    match table.slope {
        Some(slope) => t.note("slope", fmt_f64(slope)),
        None => t.note("slope", "undefined"),
    }
    t.note("exact", table.exact);
    for r in &table.rows {
        t.push(vec![r.a.to_string(), fmt_f64(r.aggregate_error)]);
    }
    match table.slope {
        Some(slope) => eprintln!("slope = {slope:.6}"),
        None if table.exact => eprintln!("all errors are exactly zero; slope undefined"),
        None => eprintln!("slope undefined"),
    }
    if let Some(path) = report {
        emit(Some(path), &json(&table)?)?;
    }
    out(ctx, &t.render()?)?;
    if ctx.compare_golden {
        let g = golden::load_table(&ctx.golden_dir, golden::MODULATION_FILE)?;
        golden::verdict(golden::compare_tables(&t, &g, "A", &["aggregate_error"], ctx.tolerance))?;
    }
    Ok(())
}

struct HvsSetup {
    d: usize,
    j: usize,
    i: Option<usize>,
    sign: SignChoice,
    index_base: BaseChoice,
    projection: Option<usize>,
    cutoff: i64,
    residual_tol: f64,
}

#[derive(Serialize)]
struct HvsEntry {
    index_base: IndexBase,
    plus: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    report: Option<LemmaReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    error: Option<String>,
}

#[derive(Serialize)]
struct HvsOut {
    golden_c0: Option<f64>,
    reports: Vec<HvsEntry>,
}

fn verify_hvs(s: &HvsSetup, format: Format, ctx: &Context) -> Result<()> {
    let bases: &[IndexBase] = match s.index_base {
        BaseChoice::Zero => &[IndexBase::Zero],
        BaseChoice::One => &[IndexBase::One],
        BaseChoice::Both => &[IndexBase::Zero, IndexBase::One],
    };
    let signs: &[bool] = match s.sign {
        SignChoice::Plus => &[true],
        SignChoice::Minus => &[false],
        SignChoice::Both => &[true, false],
    };
    if s.j == 0 || s.j > s.d {
        return Err(usage(format!("need 1 <= j <= d = {}, got {}", s.d, s.j)));
    }
    let mut entries = Vec::new();
    for &base in bases {
        let i = s.i.unwrap_or(match base {
            IndexBase::Zero => s.j - 1,
            IndexBase::One => s.j,
        });
        for &plus in signs {
            let params = HvsParams {
                index_base: base,
                projection: s.projection.map_or(ProjectionVar::Wave, ProjectionVar::Fixed),
                tolerance: s.residual_tol,
                ..HvsParams::new(s.d, s.j, i, plus, s.cutoff)
            };
            let (report, error) = match verify_lemma_hvs::<f64>(&params) {
                Ok(r) => (Some(r), None),
                Err(e) => (None, Some(e.to_string())),
            };
            entries.push(HvsEntry {
                index_base: base,
                plus,
                report,
                error,
            });
        }
    }
    if entries.iter().all(|e| e.report.is_none()) {
        let msg = entries.iter().filter_map(|e| e.error.clone()).next().unwrap_or_default();
        return Err(usage(msg));
    }

    let golden_c0 = if ctx.compare_golden {
        Some(golden::load_c0(&ctx.golden_dir)?)
    } else {
        None
    };
    let fitted: Vec<f64> = entries
        .iter()
        .filter_map(|e| e.report.as_ref().and_then(|r| r.fitted_c0))
        .collect();
    let text = match format {
        Format::Json => json(&HvsOut {
            golden_c0,
            reports: entries,
        })?,
        Format::Csv => hvs_table(s, &entries).render()?,
    };
    out(ctx, &text)?;
    if let Some(g) = golden_c0 {
        if fitted.is_empty() {
            eprintln!("golden: no matched configuration, nothing to compare");
        }
        let problems = fitted
            .iter()
            .filter(|&&c| !golden::close(c, g, ctx.tolerance))
            .map(|c| format!("fitted c0 {c} vs golden {g}"))
            .collect();
        golden::verdict(problems)?;
    }
    Ok(())
}

fn hvs_table(s: &HvsSetup, entries: &[HvsEntry]) -> Table {
    let mut t = Table::new(&[
        "index_base", "i", "sign", "matched", "fitted_c0", "residual", "fit_residual", "lhs_norm",
        "rhs_norm", "pass",
    ]);
    t.note("d", s.d);
    t.note("j", s.j);
    t.note("n", s.cutoff);
    for e in entries {
        let Some(r) = &e.report else { continue };
        t.push(vec![
            format!("{:?}", e.index_base).to_lowercase(),
            r.params.i.to_string(),
            if e.plus { "+" } else { "-" }.into(),
            r.matched.to_string(),
            r.fitted_c0.map_or(String::new(), fmt_f64),
            fmt_f64(r.residual),
            fmt_f64(r.fit_residual),
            fmt_f64(r.lhs_norm),
            fmt_f64(r.rhs_norm),
            r.pass.to_string(),
        ]);
    }
    t
}

fn experiment(c: ExperimentCommand, ctx: &Context) -> Result<()> {
    match c {
        ExperimentCommand::Modulation {
            a_list,
            spectrum: s,
            report,
        } => modulation_sweep(a_list, &s, report.as_deref(), ctx),
        ExperimentCommand::Duality {
            d,
            p,
            depth,
            n,
            runs,
            value_dim,
        } => {
            let config = DualityConfig {
                d: ctx.d(d),
                p: ctx.p(p),
                cutoff: ctx.n(n),
            };
            let depth = ctx.depth(depth);
            let mut t = Table::new(&[
                "seed", "a", "b", "c", "truncation_bound", "max_off_diagonal", "agree", "norm_f",
                "norm_g", "bound", "slack_ratio", "inequality_holds",
            ]);
            t.note("d", config.d);
            t.note("p", fmt_f64(config.p));
            t.note("depth", depth);
            t.note("n", config.cutoff);
            for seed in ctx.seed..ctx.seed + runs {
                let f = random_mean_zero_coeffs(depth, value_dim, seed).map_err(lib)?;
                let g = random_test_family(config.d, depth, value_dim, seed.wrapping_add(1 << 32));
                let r = duality_chain_check(&f, &g, &config).map_err(lib)?;
                t.push(vec![
                    seed.to_string(),
                    fmt_f64(r.a),
                    fmt_f64(r.b),
                    fmt_f64(r.c),
                    fmt_f64(r.truncation_bound),
                    fmt_f64(r.max_off_diagonal),
                    r.agree.to_string(),
                    fmt_f64(r.norm_f),
                    fmt_f64(r.norm_g),
                    fmt_f64(r.bound),
                    fmt_f64(r.slack_ratio),
                    r.inequality_holds.to_string(),
                ]);
            }
            out(ctx, &t.render()?)
        }
    }
}

fn norm(c: NormCommand, ctx: &Context) -> Result<()> {
    match c {
        NormCommand::Estimate {
            op,
            p,
            n,
            depth,
            d,
            restricted,
            max_iter,
            with_vector,
        } => {
            let p = ctx.p(p);
            let depth = ctx.depth(depth);
            let mut options = NormOptions {
                max_iter,
                seed: ctx.seed,
                ..Default::default()
            };
            let shift = |s: HaarShiftOperator| if restricted { s.restricted() } else { s };
            let operator: Box<dyn LinearOperator> = match op {
                NormOp::Hilbert => {
                    let n = ctx.n(n);
                    if n < 1 {
                        return Err(usage(format!("--n must be positive, got {n}")));
                    }
                    let h = TruncatedHilbert::new(n as usize).map_err(lib)?;
                    if p > 1.0 && p.is_finite() {
                        options.start = Some(h.start_vector(p));
                    }
                    Box::new(h)
                }
                NormOp::S0 => Box::new(shift(HaarShiftOperator::s0(depth))),
                NormOp::Riesz => {
                    let d = ctx.d(d) as u32;
                    Box::new(shift(HaarShiftOperator::riesz_vector(d, depth).map_err(lib)?))
                }
                NormOp::Identity => Box::new(Identity { dim: 2usize << depth }),
            };
            let mut est = lp_norm_estimate(operator.as_ref(), p, &options).map_err(lib)?;
            if !est.converged {
                eprintln!("warning: iteration cap reached; the estimate is still a lower bound");
            }
            if !with_vector {
                est.test_vector.clear();
            }
            out(ctx, &json(&est)?)
        }
        NormCommand::DimensionSweep { d_list, depth } => {
            let d_list = d_list.unwrap_or_else(|| (1..=6).collect());
            let depth = ctx.depth(depth);
            let rows = dimension_free_check(&d_list, depth, ctx.seed).map_err(lib)?;
            let mut t = Table::new(&["d", "depth", "norm", "iterations"]);
            t.note("seed", ctx.seed);
            for r in &rows {
                t.push(vec![
                    r.d.to_string(),
                    r.depth.to_string(),
                    fmt_f64(r.norm),
                    r.iterations.to_string(),
                ]);
            }
            out(ctx, &t.render()?)?;
            if ctx.compare_golden {
                let g = golden::load_table(&ctx.golden_dir, golden::DIMENSION_FILE)?;
                golden::verdict(golden::compare_tables(&t, &g, "d", &["norm"], ctx.tolerance))?;
            }
            Ok(())
        }
    }
}
