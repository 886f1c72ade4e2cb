//! Configurable-precision reals.
//!
//! A thin wrapper over [`astro_float::BigFloat`] that carries its working
//! precision (in bits) and rounds to nearest-even on every operation. Binary
//! operations run at the larger of the two operand precisions.

use std::cell::RefCell;
use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use astro_float::{BigFloat, Consts, Radix, RoundingMode};
use serde::{Serialize, Serializer};

const RM: RoundingMode = RoundingMode::ToEven;

/// Default working precision in decimal digits.
pub const DEFAULT_DIGITS: u32 = 60;

/// Digits shown in reports by default.
pub const REPORT_DIGITS: u32 = 30;

thread_local! {
    static CONSTS: RefCell<Consts> = RefCell::new(Consts::new().expect("astro-float constant cache"));
}

/// Mantissa bits needed for `digits` decimal digits, plus a guard word.
pub fn bits_for_digits(digits: u32) -> usize {
    (digits as f64 * std::f64::consts::LOG2_10).ceil() as usize + 64
}

#[derive(Clone, Debug)]
pub struct Real {
    v: BigFloat,
    bits: usize,
}

impl Real {
    fn wrap(v: BigFloat, bits: usize) -> Real {
        Real { v, bits }
    }

    pub fn bits(&self) -> usize {
        self.bits
    }

    pub fn from_i64(x: i64, bits: usize) -> Real {
        Real::wrap(BigFloat::from_i64(x, bits), bits)
    }

    pub fn from_u64(x: u64, bits: usize) -> Real {
        Real::wrap(BigFloat::from_u64(x, bits), bits)
    }

    pub fn zero(bits: usize) -> Real {
        Real::from_i64(0, bits)
    }

    pub fn one(bits: usize) -> Real {
        Real::from_i64(1, bits)
    }

    /// Parses a decimal literal such as `0.295598` or `-1.5e-3`.
    pub fn parse(s: &str, bits: usize) -> Option<Real> {
        let v = CONSTS.with(|cc| BigFloat::parse(s, Radix::Dec, bits, RM, &mut cc.borrow_mut()));
        (!v.is_nan()).then(|| Real::wrap(v, bits))
    }

    /// Exact conversion of an integer given as decimal digits (rounded if
    /// wider than the precision).
    pub fn from_decimal_int(s: &str, bits: usize) -> Real {
        Real::parse(s, bits).expect("decimal integer")
    }

    pub fn pi(bits: usize) -> Real {
        let v = CONSTS.with(|cc| cc.borrow_mut().pi(bits, RM));
        Real::wrap(v, bits)
    }

    /// Γ(−1/2) = −2√π.
    pub fn gamma_minus_half(bits: usize) -> Real {
        -(Real::pi(bits).sqrt() * Real::from_i64(2, bits))
    }

    /// Same value re-rounded to `bits`.
    pub fn with_bits(&self, bits: usize) -> Real {
        let mut v = self.v.clone();
        v.set_precision(bits, RM).expect("precision change");
        Real::wrap(v, bits)
    }

    pub fn sqrt(&self) -> Real {
        Real::wrap(self.v.sqrt(self.bits, RM), self.bits)
    }

    pub fn powi(&self, n: u64) -> Real {
        if n == 0 {
            return Real::one(self.bits);
        }
        Real::wrap(self.v.powi(n as usize, self.bits, RM), self.bits)
    }

    /// Multiplies by `2^k` exactly.
    pub fn mul_pow2(&self, k: i64) -> Real {
        let two = Real::from_i64(2, self.bits);
        if k >= 0 {
            self * &two.powi(k as u64)
        } else {
            self / &two.powi(k.unsigned_abs())
        }
    }

    pub fn abs(&self) -> Real {
        Real::wrap(self.v.abs(), self.bits)
    }

    pub fn is_negative(&self) -> bool {
        self.v.is_negative() && !self.v.is_zero()
    }

    pub fn is_positive(&self) -> bool {
        self.v.is_positive() && !self.v.is_zero()
    }

    pub fn is_zero(&self) -> bool {
        self.v.is_zero()
    }

    pub fn is_finite(&self) -> bool {
        !self.v.is_nan() && !self.v.is_inf()
    }

    pub fn max(&self, other: &Real) -> Real {
        if self >= other {
            self.clone()
        } else {
            other.clone()
        }
    }

    pub fn min(&self, other: &Real) -> Real {
        if self <= other {
            self.clone()
        } else {
            other.clone()
        }
    }

    fn sci_parts(&self) -> Option<(bool, String, i64)> {
        if self.v.is_zero() {
            return Some((false, String::from("0"), 0));
        }
        let s = CONSTS
            .with(|cc| self.v.format(Radix::Dec, RM, &mut cc.borrow_mut()))
            .ok()?;
        let (neg, body) = match s.strip_prefix('-') {
            Some(rest) => (true, rest),
            None => (false, s.as_str()),
        };
        let (mant, exp) = body.split_once('e')?;
        let exp: i64 = exp.parse().ok()?;
        let (int_part, frac_part) = mant.split_once('.').unwrap_or((mant, ""));
        let mut digits = format!("{int_part}{frac_part}");
        // normalise so that the first digit is nonzero
        let lead = digits.bytes().take_while(|&b| b == b'0').count();
        if lead == digits.len() {
            return Some((false, String::from("0"), 0));
        }
        digits.drain(..lead);
        let exp = exp + int_part.len() as i64 - 1 - lead as i64;
        Some((neg, digits, exp))
    }

    /// Decimal string with `sig` significant digits, fixed-point for
    /// moderate exponents and scientific otherwise.
    pub fn to_sig_string(&self, sig: u32) -> String {
        if !self.is_finite() {
            return String::from("NaN");
        }
        let Some((neg, digits, mut exp)) = self.sci_parts() else {
            return String::from("NaN");
        };
        if digits == "0" {
            return String::from("0");
        }
        let sig = sig.max(1) as usize;
        let mut d: Vec<u8> = digits.bytes().map(|b| b - b'0').collect();
        if d.len() > sig {
            let round_up = d[sig] >= 5;
            d.truncate(sig);
            if round_up {
                let mut i = sig;
                loop {
                    if i == 0 {
                        d.insert(0, 1);
                        d.truncate(sig);
                        exp += 1;
                        break;
                    }
                    i -= 1;
                    if d[i] == 9 {
                        d[i] = 0;
                    } else {
                        d[i] += 1;
                        break;
                    }
                }
            }
        }
        while d.len() > 1 && d[d.len() - 1] == 0 {
            d.pop();
        }
        let text: String = d.iter().map(|&x| char::from(b'0' + x)).collect();
        let sign = if neg { "-" } else { "" };
        if (-30..30).contains(&exp) {
            if exp < 0 {
                format!("{sign}0.{}{}", "0".repeat((-exp - 1) as usize), text)
            } else {
                let int_len = exp as usize + 1;
                if text.len() <= int_len {
                    format!("{sign}{}{}", text, "0".repeat(int_len - text.len()))
                } else {
                    format!("{sign}{}.{}", &text[..int_len], &text[int_len..])
                }
            }
        } else {
            let (head, tail) = text.split_at(1);
            if tail.is_empty() {
                format!("{sign}{head}e{exp}")
            } else {
                format!("{sign}{head}.{tail}e{exp}")
            }
        }
    }

    /// Decimal digits carried by the working precision.
    pub fn digits(&self) -> u32 {
        ((self.bits.saturating_sub(64)) as f64 / std::f64::consts::LOG2_10).floor() as u32
    }

    pub fn to_f64(&self) -> f64 {
        self.to_sig_string(20).parse().unwrap_or(f64::NAN)
    }

    /// `-log10(|self|)`, the number of leading zero decimals of a small error.
    pub fn neg_log10(&self) -> f64 {
        match self.sci_parts() {
            Some((_, digits, exp)) if digits != "0" => {
                let lead: f64 = format!("0.{}", &digits[..digits.len().min(15)])
                    .parse()
                    .unwrap_or(0.1);
                -((exp + 1) as f64 + lead.log10())
            }
            _ => f64::INFINITY,
        }
    }
}

impl fmt::Display for Real {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sig = f
            .precision()
            .map(|p| p as u32)
            .unwrap_or_else(|| self.digits());
        f.write_str(&self.to_sig_string(sig))
    }
}

impl Serialize for Real {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_sig_string(self.digits()))
    }
}

impl PartialEq for Real {
    fn eq(&self, other: &Real) -> bool {
        self.partial_cmp(other) == Some(Ordering::Equal)
    }
}

impl PartialOrd for Real {
    fn partial_cmp(&self, other: &Real) -> Option<Ordering> {
        self.v.partial_cmp(&other.v)
    }
}

macro_rules! binop {
    ($tr:ident, $method:ident, $inner:ident) => {
        impl $tr<&Real> for &Real {
            type Output = Real;
            fn $method(self, rhs: &Real) -> Real {
                let bits = self.bits.max(rhs.bits);
                Real::wrap(self.v.$inner(&rhs.v, bits, RM), bits)
            }
        }
        impl $tr<Real> for Real {
            type Output = Real;
            fn $method(self, rhs: Real) -> Real {
                (&self).$method(&rhs)
            }
        }
        impl $tr<&Real> for Real {
            type Output = Real;
            fn $method(self, rhs: &Real) -> Real {
                (&self).$method(rhs)
            }
        }
        impl $tr<Real> for &Real {
            type Output = Real;
            fn $method(self, rhs: Real) -> Real {
                self.$method(&rhs)
            }
        }
    };
}

binop!(Add, add, add);
binop!(Sub, sub, sub);
binop!(Mul, mul, mul);
binop!(Div, div, div);

impl Neg for Real {
    type Output = Real;
    fn neg(self) -> Real {
        Real::wrap(self.v.neg(), self.bits)
    }
}

impl Neg for &Real {
    type Output = Real;
    fn neg(self) -> Real {
        Real::wrap(BigFloat::neg(&self.v), self.bits)
    }
}

impl std::iter::Sum for Real {
    fn sum<I: Iterator<Item = Real>>(iter: I) -> Real {
        let mut acc: Option<Real> = None;
        for x in iter {
            acc = Some(match acc {
                Some(a) => a + x,
                None => x,
            });
        }
        acc.expect("sum of an empty sequence of reals")
    }
}
