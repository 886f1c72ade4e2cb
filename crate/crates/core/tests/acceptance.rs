//! Acceptance criteria, one PASS/FAIL line each. Exits nonzero if any fails.

use std::time::{Duration, Instant};

use lambda_census::bounds::{
    asymptotic_constants, improved_bounds, lemma2_constants, lemma3_constants, BoundsContext,
    RemainderFactor,
};
use lambda_census::oracle::oracle_counts;
use lambda_census::report::annotate_bounds;
use lambda_census::series::{linf_coeffs, lm_coeffs, CoeffSeries, SeriesEngine};
use lambda_census::singularity::{dominant_singularity, puiseux_linf};
use lambda_census::{Real, SizeModel};

const DIGITS: u32 = 60;

/// Published table, natural model: h, c0_h, d0_h, c0_hH, d0_hH with H = h.
const TABLE: [(usize, [f64; 4]); 15] = [
    (1, [0.855448, -1.153959, 1.086200, -3.803686]),
    (2, [0.898032, -1.313246, 0.979519, -2.581823]),
    (3, [0.917305, -1.397536, 0.958215, -2.324953]),
    (4, [0.927248, -1.444672, 0.950295, -2.236290]),
    (5, [0.932849, -1.472308, 0.946185, -2.192353]),
    (6, [0.936128, -1.488826, 0.943824, -2.167379]),
    (7, [0.938055, -1.498647, 0.942443, -2.152790]),
    (8, [0.939174, -1.504385, 0.941643, -2.144335]),
    (9, [0.939813, -1.507673, 0.941187, -2.139511]),
    (10, [0.940172, -1.509525, 0.940931, -2.136799]),
    (11, [0.940372, -1.510556, 0.940788, -2.135291]),
    (12, [0.940482, -1.511125, 0.940710, -2.134460]),
    (13, [0.940543, -1.511438, 0.940667, -2.134004]),
    (14, [0.940576, -1.511608, 0.940643, -2.133755]),
    (15, [0.940594, -1.511701, 0.940630, -2.133619]),
];

type Criterion<'a> = (&'static str, Box<dyn Fn() -> Verdict + 'a>);

struct Verdict {
    passed: bool,
    detail: String,
}

fn verdict(passed: bool, detail: impl Into<String>) -> Verdict {
    Verdict {
        passed,
        detail: detail.into(),
    }
}

fn real(s: &str) -> Real {
    Real::parse(s, lambda_census::real::bits_for_digits(DIGITS)).unwrap()
}

fn within_abs(x: &Real, target: &str, tol: &str) -> bool {
    (x - real(target)).abs() <= real(tol)
}

fn fmt(x: &Real) -> String {
    x.to_sig_string(12)
}

fn timed<T>(f: impl FnOnce() -> T) -> (T, Duration) {
    let t = Instant::now();
    let v = f();
    (v, t.elapsed())
}

fn criterion_1() -> Verdict {
    let ((nat, bin, less), time) = timed(|| {
        (
            dominant_singularity(&SizeModel::natural(), DIGITS)
                .unwrap()
                .rho,
            dominant_singularity(&SizeModel::binary(), DIGITS)
                .unwrap()
                .rho,
            dominant_singularity(&SizeModel::less_natural(), DIGITS)
                .unwrap()
                .rho,
        )
    });
    let ok_nat = within_abs(&nat, "0.295598", "1e-6");
    let ok_bin = within_abs(&bin, "0.509308", "1e-6");
    let ok_less = (&less - &nat).abs() < real("1e-30");
    let fast = time < Duration::from_secs(1);
    verdict(
        ok_nat && ok_bin && ok_less && fast,
        format!(
            "rho natural {}, binary {}, lessnatural equal to 30 digits: {ok_less}, {time:.2?}",
            fmt(&nat),
            fmt(&bin)
        ),
    )
}

fn criterion_2() -> Verdict {
    let (e, time) = timed(|| puiseux_linf(&SizeModel::natural(), DIGITS).unwrap());
    let ok_a = within_abs(&e.c0, "1.19149", "1e-5");
    let ok_b = within_abs(&e.c1.abs(), "2.15093", "1e-5");
    let fast = time < Duration::from_secs(1);
    verdict(
        ok_a && ok_b && !e.c1.is_positive() && fast,
        format!(
            "a_inf {}, |b_inf| {}, {time:.2?}",
            fmt(&e.c0),
            fmt(&e.c1.abs())
        ),
    )
}

fn criterion_3(ctx: &BoundsContext) -> Verdict {
    let mut worst = Real::zero(64);
    let mut failures = 0;
    for (h, expected) in TABLE {
        let k = lemma2_constants(ctx, 0, h).unwrap();
        let kk = lemma3_constants(ctx, 0, h, h, RemainderFactor::Successor).unwrap();
        for (x, e) in [k.c, k.d, kk.c, kk.d].iter().zip(expected) {
            let dev = (x - real(&format!("{e:.6}"))).abs();
            if dev > real("1e-6") {
                failures += 1;
            }
            if dev > worst {
                worst = dev;
            }
        }
    }
    verdict(
        failures == 0,
        format!(
            "60 entries, {failures} outside 1e-6, max deviation {}",
            worst.to_sig_string(3)
        ),
    )
}

fn criterion_4(ctx: &BoundsContext) -> Verdict {
    let mut r = asymptotic_constants(ctx, 0, 15, 15).unwrap();
    let checks = annotate_bounds(ctx, &mut r);
    let ok_lower = within_abs(&r.c_lower, "0.00404525", "5e-3");
    let ok_upper = within_abs(&r.c_upper, "0.18086721", "5e-3");
    let reported = checks.len() == 2
        && r.notes
            .iter()
            .filter(|n| n.starts_with("reference"))
            .count()
            == 2;
    let trivial: Vec<usize> = (1..=15)
        .filter(|&h| asymptotic_constants(ctx, 0, h, h).unwrap().lower_trivial)
        .collect();
    let ok_trivial = trivial == (1..=7).collect::<Vec<_>>();
    verdict(
        ok_lower && ok_upper && reported && ok_trivial,
        format!(
            "C_lower {} (ref 0.00404525), C_upper {} (ref 0.18086721), discrepancy reported: {reported}, trivial for h in {trivial:?}",
            fmt(&r.c_lower),
            fmt(&r.c_upper)
        ),
    )
}

fn criterion_5() -> Verdict {
    let nat = BoundsContext::new(SizeModel::natural(), DIGITS).unwrap();
    let bin = BoundsContext::new(SizeModel::binary(), DIGITS).unwrap();
    let rn = improved_bounds(&nat, 0, 13, 13, 13).unwrap();
    let rb = improved_bounds(&bin, 0, 13, 13, 13).unwrap();
    let rel = |x: &Real, t: &str| (x - real(t)).abs() / real(t);
    let ok_nat = rel(&rn.c_lower, "0.07790995266") <= real("1e-8")
        && rel(&rn.c_upper, "0.07790998229") <= real("1e-8");
    let ok_bin = within_abs(&rb.c_lower, "0.01252417", "1e-6")
        && within_abs(&rb.c_upper, "0.01254593", "1e-6");
    verdict(
        ok_nat && ok_bin,
        format!(
            "natural {} / {}, binary {} / {}",
            fmt(&rn.c_lower),
            fmt(&rn.c_upper),
            fmt(&rb.c_lower),
            fmt(&rb.c_upper)
        ),
    )
}

fn criterion_6() -> Verdict {
    let mut mismatches = Vec::new();
    for (model, n_max) in [(SizeModel::natural(), 14), (SizeModel::binary(), 22)] {
        for bound in [Some(0), Some(1), Some(2), None] {
            let oracle = oracle_counts(&model, bound, n_max).unwrap();
            let series = match bound {
                Some(m) => lm_coeffs(&model, m, n_max),
                None => linf_coeffs(&model, n_max),
            };
            if series.coeffs != oracle {
                mismatches.push(format!("{model} m={bound:?}"));
            }
        }
    }
    verdict(
        mismatches.is_empty(),
        format!("8 families compared exactly, mismatches: {mismatches:?}"),
    )
}

fn criterion_7(ctx: &BoundsContext) -> Verdict {
    let model = SizeModel::natural();
    let engine = SeriesEngine::new(model, 150);
    let le = |a: &CoeffSeries, b: &CoeffSeries| a.dominated_by(b);
    let l_chain = le(&engine.lmh(0, 15), &engine.lm(0)) && le(&engine.lm(0), &engine.linf());
    let k_chain =
        le(&engine.kmh(0, 15), &engine.km(0)) && le(&engine.km(0), &engine.kmhh(0, 15, 15));
    let r = asymptotic_constants(ctx, 0, 15, 15).unwrap();
    let l0 = engine.lm(0);
    let bits = ctx.rho().bits();
    let outside: Vec<usize> = (10..=150)
        .filter(|&n| {
            let nn = Real::from_u64(n as u64, bits);
            let ratio = &nn
                * nn.sqrt()
                * ctx.rho().powi(n as u64)
                * Real::from_decimal_int(&l0.get(n).to_string(), bits);
            !(r.c_lower <= ratio && ratio <= r.c_upper)
        })
        .collect();
    verdict(
        l_chain && k_chain && outside.is_empty(),
        format!("L chain {l_chain}, K chain {k_chain}, figure ratios outside bounds: {outside:?}"),
    )
}

/// `[z^n] F / (C n^{-3/2} ρ^{-n})` at each `n`.
fn normalised(
    series: &CoeffSeries,
    ctx: &BoundsContext,
    constant: &Real,
    sizes: &[usize],
) -> Vec<f64> {
    let bits = ctx.rho().bits();
    sizes
        .iter()
        .map(|&n| {
            let nn = Real::from_u64(n as u64, bits);
            let v = &nn
                * nn.sqrt()
                * ctx.rho().powi(n as u64)
                * Real::from_decimal_int(&series.get(n).to_string(), bits);
            (v / constant).to_f64()
        })
        .collect()
}

fn coherent(q: &[f64]) -> bool {
    let dev: Vec<f64> = q.iter().map(|x| (x - 1.0).abs()).collect();
    dev.windows(2).all(|w| w[1] < w[0]) && dev[dev.len() - 1] < 0.05
}

fn criterion_8(ctx: &BoundsContext) -> Verdict {
    let sizes = [200, 300, 400];
    let engine = SeriesEngine::new(*ctx.model(), 400);
    let gamma = Real::gamma_minus_half(ctx.rho().bits());
    let q_inf = normalised(&engine.linf(), ctx, &(ctx.b_inf() / &gamma), &sizes);
    let mut ok = coherent(&q_inf);
    let mut detail = format!("L_inf ratios {q_inf:.5?}");
    for h in [1, 2] {
        let d = lemma2_constants(ctx, 0, h).unwrap().d;
        let q = normalised(&engine.kmh(0, h), ctx, &(d / &gamma), &sizes);
        ok &= coherent(&q);
        detail.push_str(&format!(", K_0^({h}) ratios {q:.5?}"));
    }
    verdict(ok, detail)
}

fn main() {
    let ctx = BoundsContext::new(SizeModel::natural(), DIGITS).expect("natural context");
    let criteria: Vec<Criterion> = vec![
        ("singularities", Box::new(criterion_1)),
        ("expansion of L_inf", Box::new(criterion_2)),
        ("published table", Box::new(|| criterion_3(&ctx))),
        ("constants at h = H = 15", Box::new(|| criterion_4(&ctx))),
        ("improved constants", Box::new(criterion_5)),
        ("oracle equivalence", Box::new(criterion_6)),
        ("sandwich and containment", Box::new(|| criterion_7(&ctx))),
        ("asymptotic coherence", Box::new(|| criterion_8(&ctx))),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let (v, time) = timed(check);
        let tag = if v.passed { "PASS" } else { "FAIL" };
        if !v.passed {
            failed += 1;
        }
        println!(
            "{tag} criterion {} ({name}) [{time:.2?}]: {}",
            i + 1,
            v.detail
        );
    }
    println!(
        "acceptance: {} of {} criteria passed",
        criteria.len() - failed,
        criteria.len()
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
