//! Square-root expansions of the bounding families at `ρ` and the
//! asymptotic constants they pin down.
//!
//! For every `h <= H` the coefficients of `L_m` satisfy
//!
//! ```text
//! [z^n](L∞ − K_m^(h,H)) <= [z^n] L_m <= [z^n](L∞ − K_m^(h))
//! ```
//!
//! and both sides expand as `c + d (1 − z/ρ)^{1/2}` at `ρ`, which gives
//! `C̲ n^{-3/2} ρ^{-n} ≲ [z^n] L_m ≲ C̄ n^{-3/2} ρ^{-n}` with
//! `C = (b∞ − d)/Γ(−1/2)`.

use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::model::SizeModel;
use crate::real::{bits_for_digits, Real};
use crate::singularity::{dominant_singularity, eval_lmh_chain, geometric, puiseux_linf_at};

/// Denominator of the tail remainder in the upper family's constants.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum RemainderFactor {
    /// `1 − ρ^b`, from summing `z^{a+bj}` over the tail indices.
    #[default]
    Successor,
    /// `1 − ρ^d`. Kept for comparison only; it does not reproduce the
    /// published binary constants.
    Application,
}

impl RemainderFactor {
    pub fn describe(self) -> &'static str {
        match self {
            RemainderFactor::Successor => "1 - rho^b",
            RemainderFactor::Application => "1 - rho^d",
        }
    }
}

impl Serialize for RemainderFactor {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(self.describe())
    }
}

/// `c + d (1 − z/ρ)^{1/2}`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PuiseuxPair {
    pub c: Real,
    pub d: Real,
}

/// Quantities at `ρ` shared by every bound for one model.
#[derive(Clone, Debug)]
pub struct BoundsContext {
    model: SizeModel,
    digits: u32,
    rho: Real,
    a_inf: Real,
    b_inf: Real,
    gamma: Real,
}

impl BoundsContext {
    pub fn new(model: SizeModel, digits: u32) -> Result<Self> {
        let sing = dominant_singularity(&model, digits)?;
        let linf = puiseux_linf_at(&sing)?;
        let gamma = Real::gamma_minus_half(bits_for_digits(digits));
        Ok(BoundsContext {
            model,
            digits,
            rho: sing.rho,
            a_inf: linf.c0,
            b_inf: linf.c1,
            gamma,
        })
    }

    pub fn model(&self) -> &SizeModel {
        &self.model
    }

    pub fn digits(&self) -> u32 {
        self.digits
    }

    pub fn rho(&self) -> &Real {
        &self.rho
    }

    pub fn a_inf(&self) -> &Real {
        &self.a_inf
    }

    pub fn b_inf(&self) -> &Real {
        &self.b_inf
    }

    /// `(b∞ − d)/Γ(−1/2)`.
    pub fn constant_from(&self, d: &Real) -> Real {
        (&self.b_inf - d) / &self.gamma
    }

    fn one(&self) -> Real {
        Real::one(self.rho.bits())
    }

    fn pw(&self, k: u64) -> Real {
        self.rho.powi(k)
    }

    fn weights(&self) -> (u64, u64, u64, u64) {
        let [a, b, c, d] = self.model.weights();
        (a as u64, b as u64, c as u64, d as u64)
    }
}

fn require_positive(x: &Real, what: impl FnOnce() -> String) -> Result<()> {
    if x.is_positive() {
        Ok(())
    } else {
        Err(Error::GuardViolated(what()))
    }
}

fn check_levels(h: usize, big_h: usize) -> Result<()> {
    if h == 0 {
        return Err(Error::InvalidParameter("h must be at least 1".into()));
    }
    if big_h < h {
        return Err(Error::InvalidParameter(format!(
            "need h <= H, got h = {h}, H = {big_h}"
        )));
    }
    Ok(())
}

/// Expansion of `K_m^(h)` at `ρ`.
pub fn lemma2_constants(ctx: &BoundsContext, m: usize, h: usize) -> Result<PuiseuxPair> {
    check_levels(h, h)?;
    let (a, b, c, d) = ctx.weights();
    let one = ctx.one();
    let rho_d = ctx.pw(d);
    let denom = &one - ctx.pw(b);
    let chain = eval_lmh_chain(&ctx.model, m.min(h), h, &ctx.rho)?;
    let l_top = chain.last().expect("chain is never empty");
    let e = &one - ctx.pw(b + c) - &rho_d * (&ctx.a_inf + l_top);
    require_positive(&e, || format!("K^({h}) is not supercritical at rho"))?;

    if m >= h {
        let head = ctx.pw(a + b * m as u64) / (&denom * &e);
        let d_coef = &ctx.b_inf * &head * &rho_d / &e;
        return Ok(PuiseuxPair { c: head, d: d_coef });
    }

    let pre = ctx.pw(a) / ctx.pw(c * m as u64) / &denom;
    let step = ctx.pw(b + c);
    let mut level_pow = ctx.pw((b + c) * m as u64);
    let mut product = one.clone();
    let mut slope_sum = Real::zero(one.bits());
    let mut c_tilde_sum = Real::zero(one.bits());
    let mut c_acc = Real::zero(one.bits());
    let mut d_acc = Real::zero(one.bits());
    for (offset, l_i) in chain[..h - m].iter().enumerate() {
        let inv = &one - &rho_d * (&ctx.a_inf + l_i);
        require_positive(&inv, || {
            format!("level {} of K^({h}) is not supercritical", m + offset)
        })?;
        let c_tilde = &one / inv;
        product = product * &c_tilde;
        slope_sum = slope_sum + &rho_d * &ctx.b_inf * &c_tilde;
        c_tilde_sum = c_tilde_sum + &c_tilde;
        let term = &level_pow * &product;
        d_acc = d_acc + &term * &slope_sum;
        c_acc = c_acc + term;
        level_pow = level_pow * &step;
    }
    let tail = ctx.pw(a + b * h as u64 + c * (h - m) as u64) / (&denom * &e) * &product;
    let tail_d = &ctx.b_inf * &rho_d * &tail * (c_tilde_sum + &one / &e);
    Ok(PuiseuxPair {
        c: &pre * c_acc + tail,
        d: pre * d_acc + tail_d,
    })
}

/// Expansion of `K_m^(h,H)` at `ρ`.
pub fn lemma3_constants(
    ctx: &BoundsContext,
    m: usize,
    h: usize,
    big_h: usize,
    factor: RemainderFactor,
) -> Result<PuiseuxPair> {
    check_levels(h, big_h)?;
    let (a, b, c, d) = ctx.weights();
    let one = ctx.one();
    let two = Real::from_i64(2, one.bits());
    let rho_d = ctx.pw(d);
    let two_a = &two * &ctx.a_inf;
    let two_b = &two * &ctx.b_inf;
    let remainder_denom = match factor {
        RemainderFactor::Successor => &one - ctx.pw(b),
        RemainderFactor::Application => &one - &rho_d,
    };
    let e = &one - ctx.pw(b + c) - &rho_d * &two_a;
    require_positive(&e, || "K^(h,H) is not supercritical at rho".into())?;

    if m >= big_h {
        let head = ctx.pw(a + b * m as u64) / (&remainder_denom * &e);
        let d_coef = &two_b * &head * &rho_d / &e;
        return Ok(PuiseuxPair { c: head, d: d_coef });
    }

    let pre = ctx.pw(a) / ctx.pw(c * m as u64) / (&one - ctx.pw(b));
    let step = ctx.pw(b + c);
    let mut level_pow = ctx.pw((b + c) * m as u64);
    let mut product = one.clone();
    let mut slope_sum = Real::zero(one.bits());
    let mut c_acc = Real::zero(one.bits());
    let mut d_acc = Real::zero(one.bits());
    for i in m..big_h {
        let lower = lemma2_constants(ctx, i, h)?;
        let inv = &one - &rho_d * (&two_a - &lower.c);
        require_positive(&inv, || {
            format!("level {i} of K^(h,H) is not supercritical")
        })?;
        let c_dot = &one / inv;
        product = product * &c_dot;
        slope_sum = slope_sum + (&two_b - &lower.d) * &c_dot;
        let term = &level_pow * &product;
        d_acc = d_acc + &term * &rho_d * &slope_sum;
        c_acc = c_acc + term;
        level_pow = level_pow * &step;
    }
    let tail =
        ctx.pw(a + b * big_h as u64 + c * (big_h - m) as u64) / (&remainder_denom * &e) * &product;
    let tail_d = &tail * &rho_d * (&two_b / &e + slope_sum);
    Ok(PuiseuxPair {
        c: &pre * c_acc + tail,
        d: pre * d_acc + tail_d,
    })
}

/// Constants bounding `[z^n] L_m`, with the families they came from.
#[derive(Clone, Debug, Serialize)]
pub struct BoundsReport {
    pub model: String,
    pub m: usize,
    pub h: usize,
    #[serde(rename = "H")]
    pub big_h: usize,
    #[serde(rename = "M", skip_serializing_if = "Option::is_none")]
    pub big_m: Option<usize>,
    pub digits: u32,
    pub rho: Real,
    pub a_inf: Real,
    pub b_inf: Real,
    /// Expansion of `K^(h)` at index `m`, or at `M` for improved bounds.
    pub k_h: PuiseuxPair,
    /// Expansion of `K^(h,H)` at the same index.
    pub k_hh: PuiseuxPair,
    /// Expansions of the two surrogates of `L_m` after the improvement step.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub improved_upper: Option<PuiseuxPair>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub improved_lower: Option<PuiseuxPair>,
    pub c_lower: Real,
    pub c_upper: Real,
    /// The lower constant is not positive, so it says nothing.
    pub lower_trivial: bool,
    /// Leading decimal digits on which the two constants agree.
    pub agreement_digits: u32,
    pub remainder_factor: RemainderFactor,
    pub notes: Vec<String>,
}

/// Number of leading decimal digits shared by `lower` and `upper`.
///
/// Zero when the lower constant is not positive.
pub fn agreement_digits(lower: &Real, upper: &Real, cap: u32) -> u32 {
    if !lower.is_positive() || !upper.is_positive() {
        return 0;
    }
    let gap = (upper - lower).abs();
    if gap.is_zero() {
        return cap;
    }
    let rel = (gap / upper).neg_log10();
    if rel <= 0.0 {
        0
    } else {
        (rel.floor() as u32).min(cap)
    }
}

fn orientation(lower: &Real, upper: &Real, what: &str) -> Result<()> {
    if lower > upper {
        return Err(Error::Orientation(format!(
            "{what}: lower constant {} exceeds upper constant {}",
            lower.to_sig_string(12),
            upper.to_sig_string(12)
        )));
    }
    Ok(())
}

fn factor_note(factor: RemainderFactor) -> String {
    format!(
        "tail remainder of K^(h,H) uses the factor {}",
        factor.describe()
    )
}

/// `C̲` and `C̄` for `L_m` from the families `K_m^(h)` and `K_m^(h,H)`.
pub fn asymptotic_constants(
    ctx: &BoundsContext,
    m: usize,
    h: usize,
    big_h: usize,
) -> Result<BoundsReport> {
    asymptotic_constants_with(ctx, m, h, big_h, RemainderFactor::default())
}

pub fn asymptotic_constants_with(
    ctx: &BoundsContext,
    m: usize,
    h: usize,
    big_h: usize,
    factor: RemainderFactor,
) -> Result<BoundsReport> {
    let k_h = lemma2_constants(ctx, m, h)?;
    let k_hh = lemma3_constants(ctx, m, h, big_h, factor)?;
    let c_upper = ctx.constant_from(&k_h.d);
    let c_lower = ctx.constant_from(&k_hh.d);
    orientation(&c_lower, &c_upper, "asymptotic bounds")?;
    let mut notes = vec![factor_note(factor)];
    let lower_trivial = !c_lower.is_positive();
    if lower_trivial {
        notes.push(format!("lower bound is trivial for h = {h}, H = {big_h}"));
    }
    Ok(BoundsReport {
        model: ctx.model.to_string(),
        m,
        h,
        big_h,
        big_m: None,
        digits: ctx.digits,
        rho: ctx.rho.clone(),
        a_inf: ctx.a_inf.clone(),
        b_inf: ctx.b_inf.clone(),
        k_h,
        k_hh,
        improved_upper: None,
        improved_lower: None,
        agreement_digits: agreement_digits(&c_lower, &c_upper, ctx.digits),
        c_lower,
        c_upper,
        lower_trivial,
        remainder_factor: factor,
        notes,
    })
}

fn quadratic_step_with_source(
    ctx: &BoundsContext,
    source: &Real,
    tail: &PuiseuxPair,
) -> Result<PuiseuxPair> {
    let (_, _, c, d) = ctx.weights();
    let bits = ctx.rho.bits();
    let one = ctx.one();
    let four = Real::from_i64(4, bits);
    let rho_d = ctx.pw(d);
    let u = &one - &four * &rho_d * source;
    let v = -(&four * ctx.pw(c + d));
    let x = u + &v * &tail.c;
    if !x.is_positive() {
        return Err(Error::NegativeRadicand {
            context: "improvement step at rho".into(),
        });
    }
    let root = x.sqrt();
    let alpha = (&one - &root) / (Real::from_i64(2, bits) * &rho_d);
    let beta = -(&v * &tail.d) / (&four * &rho_d * &root);
    Ok(PuiseuxPair { c: alpha, d: beta })
}

/// Expansion of `(1 − √(1 − 4z^d S_m(z) − 4z^{c+d} T(z)))/(2z^d)` at `ρ`,
/// where `S_m = Σ_{j<m} z^{a+bj}` and `T` has expansion `tail`.
///
/// This is the step from a surrogate of `L_{m+1}` to one of `L_m`; the
/// linear term in `(1 − z/ρ)^{1/2}` passes through the square root to first
/// order.
pub fn puiseux_quadratic_step(
    ctx: &BoundsContext,
    m: usize,
    tail: &PuiseuxPair,
) -> Result<PuiseuxPair> {
    let (a, b, _, _) = ctx.weights();
    let source = ctx.pw(a) * geometric(&ctx.rho, b as u32, m);
    quadratic_step_with_source(ctx, &source, tail)
}

/// Bounds for `L_m` obtained by seeding `L∞ − K_M^(h)` and
/// `L∞ − K_M^(h,H)` at level `M` and lifting both to level `m`.
pub fn improved_bounds(
    ctx: &BoundsContext,
    m: usize,
    big_m: usize,
    h: usize,
    big_h: usize,
) -> Result<BoundsReport> {
    improved_bounds_with(ctx, m, big_m, h, big_h, RemainderFactor::default())
}

pub fn improved_bounds_with(
    ctx: &BoundsContext,
    m: usize,
    big_m: usize,
    h: usize,
    big_h: usize,
    factor: RemainderFactor,
) -> Result<BoundsReport> {
    if big_m < m {
        return Err(Error::InvalidParameter(format!(
            "need m <= M, got m = {m}, M = {big_m}"
        )));
    }
    let k_h = lemma2_constants(ctx, big_m, h)?;
    let k_hh = lemma3_constants(ctx, big_m, h, big_h, factor)?;
    let lift = |k: &PuiseuxPair| -> Result<PuiseuxPair> {
        let mut cur = PuiseuxPair {
            c: &ctx.a_inf - &k.c,
            d: &ctx.b_inf - &k.d,
        };
        for level in (m..big_m).rev() {
            cur = puiseux_quadratic_step(ctx, level, &cur)?;
        }
        Ok(cur)
    };
    let upper = lift(&k_h)?;
    let lower = lift(&k_hh)?;
    let c_upper = &upper.d / &ctx.gamma;
    let c_lower = &lower.d / &ctx.gamma;
    orientation(&c_lower, &c_upper, "improved bounds")?;
    let lower_trivial = !c_lower.is_positive();
    let mut notes = vec![factor_note(factor)];
    if lower_trivial {
        notes.push(format!(
            "lower bound is trivial for M = {big_m}, h = {h}, H = {big_h}"
        ));
    }
    Ok(BoundsReport {
        model: ctx.model.to_string(),
        m,
        h,
        big_h,
        big_m: Some(big_m),
        digits: ctx.digits,
        rho: ctx.rho.clone(),
        a_inf: ctx.a_inf.clone(),
        b_inf: ctx.b_inf.clone(),
        k_h,
        k_hh,
        improved_upper: Some(upper),
        improved_lower: Some(lower),
        agreement_digits: agreement_digits(&c_lower, &c_upper, ctx.digits),
        c_lower,
        c_upper,
        lower_trivial,
        remainder_factor: factor,
        notes,
    })
}
