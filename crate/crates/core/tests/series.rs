use num_bigint::BigUint;
use num_traits::Zero;
use proptest::prelude::*;

use lambda_census::oracle::oracle_counts;
use lambda_census::series::SeriesEngine;
use lambda_census::SizeModel;

type Series = Vec<BigUint>;

fn zero(n: usize) -> Series {
    vec![BigUint::zero(); n + 1]
}

fn add(x: &Series, y: &Series) -> Series {
    x.iter().zip(y).map(|(a, b)| a + b).collect()
}

fn shift(x: &Series, k: usize) -> Series {
    let mut out = zero(x.len() - 1);
    if k < x.len() {
        out[k..].clone_from_slice(&x[..x.len() - k]);
    }
    out
}

fn mul(x: &Series, y: &Series) -> Series {
    let mut out = zero(x.len() - 1);
    for (i, a) in x.iter().enumerate() {
        for (j, b) in y.iter().enumerate().take(x.len() - i) {
            out[i + j] += a * b;
        }
    }
    out
}

/// `z^start + z^{start+b} + …` truncated at `n`.
fn geometric_tail(start: usize, step: usize, n: usize) -> Series {
    let mut out = zero(n);
    let mut k = start;
    while k <= n {
        out[k] = BigUint::from(1u8);
        k += step;
    }
    out
}

/// `Σ_{j<count} z^{a+bj}` truncated at `n`.
fn geometric_head(a: usize, b: usize, count: usize, n: usize) -> Series {
    let mut out = zero(n);
    for j in 0..count {
        if a + b * j <= n {
            out[a + b * j] += 1u8;
        }
    }
    out
}

/// Every bounded family obtained by iterating its defining equations from
/// zero. Needs `c, d >= 1` so that each pass fixes one more coefficient.
struct FixedPoint {
    linf: Series,
    /// `L_q^(h)` for `q = 0..=h`.
    lh: Vec<Series>,
    /// `K_q^(h)` for `q = 0..=h`.
    kh: Vec<Series>,
    /// `K_q^(h,H)` for `q = 0..=H`.
    khh: Vec<Series>,
}

fn fixed_point(model: &SizeModel, h: usize, big_h: usize, n: usize) -> FixedPoint {
    let [a, b, c, d] = model.weights().map(|w| w as usize);
    let mut linf = zero(n);
    for _ in 0..=n {
        let next = add(
            &add(&geometric_tail(a, b, n), &shift(&linf, c)),
            &shift(&mul(&linf, &linf), d),
        );
        linf = next;
    }
    let mut lh = vec![zero(n); h + 1];
    for _ in 0..=n {
        let mut next = lh.clone();
        next[h] = add(
            &add(&geometric_head(a, b, h, n), &shift(&lh[h], c)),
            &shift(&mul(&lh[h], &lh[h]), d),
        );
        for q in 0..h {
            next[q] = add(
                &add(&geometric_head(a, b, q, n), &shift(&lh[q + 1], c)),
                &shift(&mul(&lh[q], &lh[q]), d),
            );
        }
        lh = next;
    }
    let mut kh = vec![zero(n); h + 1];
    for _ in 0..=n {
        let mut next = kh.clone();
        for q in 0..=h {
            let upper = if q == h {
                shift(&kh[h], b + c)
            } else {
                shift(&kh[q + 1], c)
            };
            let factor = add(&linf, &lh[q]);
            next[q] = add(
                &add(&geometric_tail(a + b * q, b, n), &upper),
                &shift(&mul(&factor, &kh[q]), d),
            );
        }
        kh = next;
    }
    // K_q^(h) for q > h is the level-h series shifted by b(q − h)
    let kh_at = |q: usize| {
        if q <= h {
            kh[q].clone()
        } else {
            shift(&kh[h], b * (q - h))
        }
    };
    let two_linf = add(&linf, &linf);
    let mut khh = vec![zero(n); big_h + 1];
    for _ in 0..=n {
        let mut next = khh.clone();
        next[big_h] = add(
            &add(
                &geometric_tail(a + b * big_h, b, n),
                &shift(&khh[big_h], b + c),
            ),
            &shift(&mul(&two_linf, &khh[big_h]), d),
        );
        for q in 0..big_h {
            // 2L∞ − K_q^(h) has nonnegative coefficients since K^(h) <= L∞
            let factor: Series = two_linf.iter().zip(&kh_at(q)).map(|(x, y)| x - y).collect();
            next[q] = add(
                &add(&geometric_tail(a + b * q, b, n), &shift(&khh[q + 1], c)),
                &shift(&mul(&factor, &khh[q]), d),
            );
        }
        khh = next;
    }
    FixedPoint { linf, lh, kh, khh }
}

#[test]
fn engine_matches_fixed_point_iteration() {
    for model in [SizeModel::natural(), SizeModel::binary()] {
        for (h, big_h) in [(1, 1), (1, 3), (3, 3), (2, 4)] {
            let n = 40;
            let fp = fixed_point(&model, h, big_h, n);
            let engine = SeriesEngine::new(model, n);
            assert_eq!(engine.linf().coeffs, fp.linf, "{model}");
            for q in 0..=h {
                assert_eq!(engine.lmh(q, h).coeffs, fp.lh[q], "{model} L_{q}^({h})");
                assert_eq!(engine.kmh(q, h).coeffs, fp.kh[q], "{model} K_{q}^({h})");
            }
            for q in 0..=big_h {
                assert_eq!(
                    engine.kmhh(q, h, big_h).coeffs,
                    fp.khh[q],
                    "{model} K_{q}^({h},{big_h})"
                );
            }
            // levels past the cut are shifted copies
            assert_eq!(
                engine.kmh(h + 2, h).coeffs,
                shift(&fp.kh[h], 2 * model.b() as usize)
            );
            assert_eq!(engine.lmh(h + 3, h).coeffs, fp.lh[h]);
        }
    }
}

#[test]
fn open_and_non_open_terms_partition_all_terms() {
    let engine = SeriesEngine::new(SizeModel::natural(), 80);
    for m in 0..5 {
        assert_eq!(
            add(&engine.lm(m).coeffs, &engine.km(m).coeffs),
            engine.linf().coeffs
        );
    }
}

#[test]
fn less_natural_model_is_supported() {
    // here size-0 terms exist, so the convolution cannot skip the ends
    let model = SizeModel::less_natural();
    let engine = SeriesEngine::new(model, 9);
    for m in 0..3 {
        assert_eq!(
            engine.lm(m).coeffs,
            oracle_counts(&model, Some(m), 9).unwrap()
        );
    }
    assert_eq!(
        engine.linf().coeffs,
        oracle_counts(&model, None, 9).unwrap()
    );
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn sandwich_and_monotonicity(
        preset in 0usize..3,
        m in 0usize..4,
        h in 1usize..6,
        extra in 0usize..3,
    ) {
        let model = [SizeModel::natural(), SizeModel::less_natural(), SizeModel::binary()][preset];
        let big_h = h + extra;
        let n = 60;
        let e = SeriesEngine::new(model, n);
        let (lm, km, linf) = (e.lm(m), e.km(m), e.linf());
        prop_assert!(e.lmh(m, h).dominated_by(&lm));
        prop_assert!(lm.dominated_by(&linf));
        prop_assert!(e.kmh(m, h).dominated_by(&km));
        prop_assert!(km.dominated_by(&e.kmhh(m, h, big_h)));
        prop_assert!(e.lmh(m, h).dominated_by(&e.lmh(m, h + 1)));
        prop_assert!(e.kmh(m, h).dominated_by(&e.kmh(m, h + 1)));
        prop_assert!(lm.dominated_by(&e.lm(m + 1)));
        prop_assert!(e.kmhh(m, h, big_h + 1).dominated_by(&e.kmhh(m, h, big_h)));
    }
}
