//! Dominant singularities and square-root expansions at them.
//!
//! For a valid model, `L∞` has a square-root singularity at
//! `ρ = RootOf{(1 − z^b)(1 − z^c)² − 4z^{a+d}}` and
//!
//! ```text
//! L∞(z) = a∞ + b∞ (1 − z/ρ)^{1/2} + O(|1 − z/ρ|),   a∞ > 0 > b∞.
//! ```
//!
//! Restricting indices to at most `h` moves the singularity to the smallest
//! positive root `ρ^(h) > ρ` of `(1 − z^c)² − 4z^{a+d} Σ_{j<h} z^{bj}`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::SizeModel;
use crate::poly::{isolate_root_unit_interval, IntPoly, RootBracket};
use crate::real::{bits_for_digits, Real};

/// `(1 − z^b)(1 − z^c)² − 4z^{a+d}`.
pub fn characteristic_poly(model: &SizeModel) -> IntPoly {
    let one_minus = |k: u32| IntPoly::constant(1).sub(&IntPoly::monomial(1, k as usize));
    let c_part = one_minus(model.c());
    one_minus(model.b())
        .mul(&c_part)
        .mul(&c_part)
        .sub(&IntPoly::monomial(4, (model.a() + model.d()) as usize))
}

/// `(1 − z^c)² − 4z^{a+d}(1 + z^b + … + z^{b(h−1)})`: the radicand of
/// `L_h^(h)` with the factor `1/(1 − z^b)` divided out exactly.
pub fn truncated_poly(model: &SizeModel, h: usize) -> IntPoly {
    let one_minus_c = IntPoly::constant(1).sub(&IntPoly::monomial(1, model.c() as usize));
    let ad = (model.a() + model.d()) as usize;
    let b = model.b() as usize;
    let geometric = (0..h).fold(IntPoly::constant(0), |acc, j| {
        acc.add(&IntPoly::monomial(4, ad + b * j))
    });
    one_minus_c.mul(&one_minus_c).sub(&geometric)
}

/// Extra decimal digits the root is bisected to, so that quantities
/// derived from it keep the requested accuracy.
const ROOT_GUARD_DIGITS: u32 = 10;

/// A located singularity together with its certificate.
#[derive(Clone, Debug)]
pub struct Singularity {
    pub model: SizeModel,
    pub rho: Real,
    pub bracket: RootBracket,
    pub digits: u32,
}

fn locate(model: &SizeModel, poly: &IntPoly, digits: u32) -> Result<Singularity> {
    let bits = bits_for_digits(digits);
    let bracket = isolate_root_unit_interval(poly, digits + ROOT_GUARD_DIGITS, bits)?;
    Ok(Singularity {
        model: *model,
        rho: bracket.root.clone(),
        bracket,
        digits,
    })
}

/// Smallest positive root of the characteristic polynomial, the radius of
/// convergence shared by `L∞`, every `L_m` and every `K_m`.
///
/// `f(0) = 1 > 0`, `f(1) = −4 < 0` and `f` is strictly decreasing on
/// `(0, 1)`, so the root found by bisection is the unique one there.
pub fn dominant_singularity(model: &SizeModel, digits: u32) -> Result<Singularity> {
    locate(model, &characteristic_poly(model), digits)
}

/// Dominant singularity `ρ^(h)` of the index-bounded families.
pub fn rho_h(model: &SizeModel, h: usize, digits: u32) -> Result<Singularity> {
    if h == 0 {
        return Err(Error::InvalidParameter("h must be at least 1".into()));
    }
    locate(model, &truncated_poly(model, h), digits)
}

/// Constant and square-root coefficient of an expansion at `rho`.
#[derive(Clone, Debug, Serialize)]
pub struct PuiseuxExpansion {
    /// Which function was expanded, e.g. `Linf` or `Kh(0,15)`.
    pub label: String,
    pub rho: Real,
    pub c0: Real,
    pub c1: Real,
    pub precision_digits: u32,
}

/// `a∞ = (1 − ρ^c)/(2ρ^d)` and `b∞ = −√(−ρ g′(ρ))/(2ρ^d)` with
/// `g = (1 − z^c)² − 4z^{a+d}/(1 − z^b)`.
///
/// `g′(ρ)` comes from exact differentiation of the characteristic
/// polynomial: `f = (1 − z^b) g` and `g(ρ) = 0` give
/// `g′(ρ) = f′(ρ)/(1 − ρ^b)`.
pub fn puiseux_linf(model: &SizeModel, digits: u32) -> Result<PuiseuxExpansion> {
    let sing = dominant_singularity(model, digits)?;
    puiseux_linf_at(&sing)
}

pub fn puiseux_linf_at(sing: &Singularity) -> Result<PuiseuxExpansion> {
    let model = &sing.model;
    let rho = &sing.rho;
    let bits = rho.bits();
    let one = Real::one(bits);
    let two_rho_d = Real::from_i64(2, bits) * rho.powi(model.d() as u64);
    let a_inf = (&one - rho.powi(model.c() as u64)) / &two_rho_d;
    let f_prime = characteristic_poly(model).derivative().eval(rho);
    let g_prime = f_prime / (&one - rho.powi(model.b() as u64));
    let inner = -(rho * &g_prime);
    if !inner.is_positive() {
        return Err(Error::NegativeRadicand {
            context: "b∞ at ρ".into(),
        });
    }
    let b_inf = -(inner.sqrt() / &two_rho_d);
    if !a_inf.is_positive() || !b_inf.is_negative() {
        return Err(Error::GuardViolated("expected a∞ > 0 > b∞".into()));
    }
    Ok(PuiseuxExpansion {
        label: "Linf".into(),
        rho: rho.clone(),
        c0: a_inf,
        c1: b_inf,
        precision_digits: sing.digits,
    })
}

/// `Σ_{j<n} z^{bj}`.
pub(crate) fn geometric(z: &Real, b: u32, n: usize) -> Real {
    let step = z.powi(b as u64);
    let mut term = Real::one(z.bits());
    let mut acc = Real::zero(z.bits());
    for _ in 0..n {
        acc = acc + &term;
        term = term * &step;
    }
    acc
}

fn checked_sqrt(x: Real, context: impl FnOnce() -> String) -> Result<Real> {
    if x.is_negative() || !x.is_finite() {
        return Err(Error::NegativeRadicand { context: context() });
    }
    Ok(x.sqrt())
}

/// `L∞(z) = (1 − z^c − √((1 − z^c)² − 4z^{a+d}/(1 − z^b)))/(2z^d)` for `0 < z <= ρ`.
pub fn eval_linf_at(model: &SizeModel, z: &Real) -> Result<Real> {
    let bits = z.bits();
    let one = Real::one(bits);
    let zc = z.powi(model.c() as u64);
    let radicand = (&one - &zc) * (&one - &zc)
        - Real::from_i64(4, bits) * z.powi((model.a() + model.d()) as u64)
            / (&one - z.powi(model.b() as u64));
    let root = checked_sqrt(radicand, || format!("L∞ at z = {z:.12}"))?;
    Ok((one - zc - root) / (Real::from_i64(2, bits) * z.powi(model.d() as u64)))
}

/// `L_m^(h)(z)` through its nested-radical form, evaluated innermost first.
///
/// For `m >= h` this is the closed form of `L_h^(h)`. For `m < h`,
/// `L_m^(h)(z) = (1 − √(r_m + 2z^c √(r_{m+1} + … + 2z^c √r_h)))/(2z^d)` with
/// `r_j = 1 − 4z^{a+d} Σ_{i<j} z^{bi} − 2z^c` for `j < h − 1`, the extra
/// `+ 2z^{2c}` at `j = h − 1` and `r_h` the radicand of `L_h^(h)`.
pub fn eval_lmh_at(model: &SizeModel, m: usize, h: usize, z: &Real) -> Result<Real> {
    let mut chain = eval_lmh_chain(model, m.min(h), h, z)?;
    Ok(chain.swap_remove(0))
}

/// `[L_m^(h)(z), L_{m+1}^(h)(z), …, L_h^(h)(z)]` from a single pass.
pub fn eval_lmh_chain(model: &SizeModel, m: usize, h: usize, z: &Real) -> Result<Vec<Real>> {
    if h == 0 {
        return Err(Error::InvalidParameter("h must be at least 1".into()));
    }
    if m > h {
        return Err(Error::InvalidParameter("chain needs m <= h".into()));
    }
    if !z.is_positive() {
        return Err(Error::InvalidParameter("z must be positive".into()));
    }
    let bits = z.bits();
    let one = Real::one(bits);
    let two = Real::from_i64(2, bits);
    let four = Real::from_i64(4, bits);
    let zc = z.powi(model.c() as u64);
    let zad = z.powi((model.a() + model.d()) as u64);
    let two_zd = &two * z.powi(model.d() as u64);
    let two_zc = &two * &zc;

    let step = z.powi(model.b() as u64);
    let mut geo = Vec::with_capacity(h + 1);
    let mut acc = Real::zero(bits);
    let mut term = one.clone();
    for _ in 0..=h {
        geo.push(acc.clone());
        acc = acc + &term;
        term = term * &step;
    }

    let r_h = (&one - &zc) * (&one - &zc) - &four * &zad * &geo[h];
    let mut s = checked_sqrt(r_h, || format!("r_{h} at z = {z:.12}"))?;
    let mut out = vec![(&one - &zc - &s) / &two_zd];
    for j in (m..h).rev() {
        let mut r_j = &one - &four * &zad * &geo[j] - &two_zc;
        if j == h - 1 {
            r_j = r_j + &two * &zc * &zc;
        }
        s = checked_sqrt(r_j + &two_zc * &s, || {
            format!("level {j} of L^({h}) at z = {z:.12}")
        })?;
        out.push((&one - &s) / &two_zd);
    }
    out.reverse();
    Ok(out)
}

/// Machine-readable summary of the singularity of `L∞`.
#[derive(Clone, Debug, Serialize)]
pub struct SingularityReport {
    pub model: String,
    pub rho: Real,
    pub rho_digits: u32,
    pub bracket_lo: Real,
    pub bracket_hi: Real,
    pub a_inf: Real,
    pub b_inf: Real,
    pub b_inf_magnitude: Real,
    /// `|f(ρ)|` for the characteristic polynomial `f`.
    pub residual: Real,
    /// `b∞ / Γ(−1/2)`, the constant in `[z^n] L∞ ~ C n^{-3/2} ρ^{-n}`.
    pub linf_constant: Real,
}

pub fn singularity_report(model: &SizeModel, digits: u32) -> Result<SingularityReport> {
    let sing = dominant_singularity(model, digits)?;
    let exp = puiseux_linf_at(&sing)?;
    let gamma = Real::gamma_minus_half(sing.rho.bits());
    Ok(SingularityReport {
        model: model.to_string(),
        rho: sing.rho.clone(),
        rho_digits: digits,
        bracket_lo: sing.bracket.lo.clone(),
        bracket_hi: sing.bracket.hi.clone(),
        b_inf_magnitude: exp.c1.abs(),
        linf_constant: &exp.c1 / &gamma,
        a_inf: exp.c0,
        b_inf: exp.c1,
        residual: sing.bracket.residual.clone(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::real::DEFAULT_DIGITS;

    fn close(x: &Real, y: f64, tol: f64) -> bool {
        (x.to_f64() - y).abs() <= tol
    }

    #[test]
    fn characteristic_polynomials() {
        // natural: 1 − 3z − z² − z³
        assert_eq!(
            characteristic_poly(&SizeModel::natural()),
            IntPoly::from_i64(&[1, -3, -1, -1])
        );
        // binary: 1 − z − 2z² + 2z³ − 3z⁴ − z⁵
        assert_eq!(
            characteristic_poly(&SizeModel::binary()),
            IntPoly::from_i64(&[1, -1, -2, 2, -3, -1])
        );
        assert_eq!(
            characteristic_poly(&SizeModel::natural()),
            characteristic_poly(&SizeModel::less_natural())
        );
    }

    #[test]
    fn rho_values() {
        let nat = dominant_singularity(&SizeModel::natural(), 40).unwrap();
        assert!(close(&nat.rho, 0.295598, 1e-6));
        assert!(nat.bracket.lo <= nat.rho && nat.rho <= nat.bracket.hi);
        let bin = dominant_singularity(&SizeModel::binary(), 40).unwrap();
        assert!(close(&bin.rho, 0.509308, 1e-6));
    }

    #[test]
    fn rho_h_one_is_a_third() {
        let s = rho_h(&SizeModel::natural(), 1, 40).unwrap();
        let third = Real::one(s.rho.bits()) / Real::from_i64(3, s.rho.bits());
        assert!((&s.rho - &third).abs() < Real::parse("1e-40", s.rho.bits()).unwrap());
    }

    #[test]
    fn rho_h_decreases_towards_rho() {
        let model = SizeModel::natural();
        let rho = dominant_singularity(&model, 30).unwrap().rho;
        let mut prev = rho_h(&model, 1, 30).unwrap().rho;
        for h in 2..=12 {
            let cur = rho_h(&model, h, 30).unwrap().rho;
            assert!(cur < prev && cur > rho, "h = {h}");
            prev = cur;
        }
    }

    #[test]
    fn natural_puiseux_against_closed_forms() {
        let e = puiseux_linf(&SizeModel::natural(), DEFAULT_DIGITS).unwrap();
        assert!(close(&e.c0, 1.19149, 1e-5));
        assert!(close(&e.c1, -2.15093, 1e-5));
        // b∞ = √((1 + ρ + ρ² − ρ³)/(2ρ))/(ρ − 1), an independent closed form
        let rho = &e.rho;
        let bits = rho.bits();
        let one = Real::one(bits);
        let num = &one + rho + rho * rho - rho.powi(3);
        let alt = (num / (Real::from_i64(2, bits) * rho)).sqrt() / (rho - &one);
        assert!((&alt - &e.c1).abs() < Real::parse("1e-50", bits).unwrap());
    }

    #[test]
    fn a_inf_matches_limit_of_closed_form() {
        let model = SizeModel::binary();
        let e = puiseux_linf(&model, DEFAULT_DIGITS).unwrap();
        let bits = e.rho.bits();
        // closed form at ρ(1 − ε): a∞ + b∞ √ε + O(ε)
        let eps = Real::parse("1e-30", bits).unwrap();
        let z = &e.rho * (Real::one(bits) - &eps);
        let v = eval_linf_at(&model, &z).unwrap();
        let predicted = &e.c0 + &e.c1 * eps.sqrt();
        assert!((&v - &predicted).abs() < Real::parse("1e-25", bits).unwrap());
    }

    #[test]
    fn nested_radical_top_level_is_closed_form() {
        let model = SizeModel::binary();
        let bits = bits_for_digits(40);
        let z = Real::parse("0.4", bits).unwrap();
        let direct = eval_lmh_at(&model, 4, 4, &z).unwrap();
        let one = Real::one(bits);
        let zc = z.powi(2);
        let rad = (&one - &zc) * (&one - &zc)
            - Real::from_i64(4, bits) * z.powi(4) * (&one - z.powi(4)) / (&one - &z);
        let closed = (&one - &zc - rad.sqrt()) / (Real::from_i64(2, bits) * z.powi(2));
        assert!((&direct - &closed).abs() < Real::parse("1e-40", bits).unwrap());
        assert_eq!(eval_lmh_at(&model, 9, 4, &z).unwrap(), direct);
    }

    #[test]
    fn nested_radical_small_z_leading_term() {
        // the smallest closed natural term is `\1` of size 2
        let model = SizeModel::natural();
        let bits = bits_for_digits(40);
        let z = Real::parse("1e-8", bits).unwrap();
        let v = eval_lmh_at(&model, 0, 3, &z).unwrap();
        assert!(((v / z.powi(2)).to_f64() - 1.0).abs() < 1e-6);
    }

    #[test]
    fn nested_radical_matches_coefficient_sums() {
        let model = SizeModel::natural();
        let bits = bits_for_digits(40);
        let z = Real::parse("0.2", bits).unwrap();
        for (m, h) in [(0, 1), (0, 3), (1, 3), (2, 5)] {
            let coeffs = crate::series::lmh_coeffs(&model, m, h, 120);
            let mut partial = Real::zero(bits);
            let mut zn = Real::one(bits);
            for c in &coeffs.coeffs {
                partial = partial + Real::from_decimal_int(&c.to_string(), bits) * &zn;
                zn = zn * &z;
            }
            let value = eval_lmh_at(&model, m, h, &z).unwrap();
            // the omitted tail is below (0.2/ρ)^121 < 1e-20
            assert!(
                (&value - &partial).abs() < Real::parse("1e-18", bits).unwrap(),
                "m = {m}, h = {h}"
            );
        }
    }

    #[test]
    fn nested_radical_rejects_points_past_singularity() {
        let model = SizeModel::natural();
        let z = Real::parse("0.34", 192).unwrap();
        assert!(matches!(
            eval_lmh_at(&model, 0, 1, &z),
            Err(Error::NegativeRadicand { .. })
        ));
    }

    #[test]
    fn report_fields() {
        let r = singularity_report(&SizeModel::natural(), 30).unwrap();
        assert!(r.residual < Real::parse("1e-29", r.rho.bits()).unwrap());
        assert!(close(&r.linf_constant, 0.606767, 1e-6));
        let json = serde_json::to_value(&r).unwrap();
        assert!(json["rho"]
            .as_str()
            .unwrap()
            .starts_with("0.2955977425220847709809965928"));
    }
}
