//! Integer polynomials and exact dyadic root bracketing.

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::real::Real;

/// Dense polynomial with integer coefficients, lowest degree first.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntPoly {
    coeffs: Vec<BigInt>,
}

impl IntPoly {
    pub fn new(mut coeffs: Vec<BigInt>) -> Self {
        while coeffs.len() > 1 && coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        if coeffs.is_empty() {
            coeffs.push(BigInt::zero());
        }
        IntPoly { coeffs }
    }

    pub fn from_i64(coeffs: &[i64]) -> Self {
        IntPoly::new(coeffs.iter().map(|&c| BigInt::from(c)).collect())
    }

    pub fn constant(c: i64) -> Self {
        IntPoly::from_i64(&[c])
    }

    /// `coeff * z^power`.
    pub fn monomial(coeff: i64, power: usize) -> Self {
        let mut v = vec![BigInt::zero(); power + 1];
        v[power] = BigInt::from(coeff);
        IntPoly::new(v)
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    pub fn add(&self, other: &IntPoly) -> IntPoly {
        let n = self.coeffs.len().max(other.coeffs.len());
        let zero = BigInt::zero();
        IntPoly::new(
            (0..n)
                .map(|i| self.coeffs.get(i).unwrap_or(&zero) + other.coeffs.get(i).unwrap_or(&zero))
                .collect(),
        )
    }

    pub fn sub(&self, other: &IntPoly) -> IntPoly {
        let n = self.coeffs.len().max(other.coeffs.len());
        let zero = BigInt::zero();
        IntPoly::new(
            (0..n)
                .map(|i| self.coeffs.get(i).unwrap_or(&zero) - other.coeffs.get(i).unwrap_or(&zero))
                .collect(),
        )
    }

    pub fn mul(&self, other: &IntPoly) -> IntPoly {
        let mut out = vec![BigInt::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, x) in self.coeffs.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (j, y) in other.coeffs.iter().enumerate() {
                out[i + j] += x * y;
            }
        }
        IntPoly::new(out)
    }

    pub fn derivative(&self) -> IntPoly {
        if self.coeffs.len() == 1 {
            return IntPoly::constant(0);
        }
        IntPoly::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| c * BigInt::from(i))
                .collect(),
        )
    }

    /// `2^(k·deg) · p(num / 2^k)`, computed exactly.
    fn scaled_eval_dyadic(&self, num: &BigInt, k: u64) -> BigInt {
        let deg = self.degree();
        let mut acc = self.coeffs[deg].clone();
        for i in (0..deg).rev() {
            acc = acc * num + (&self.coeffs[i] << (k as usize * (deg - i)));
        }
        acc
    }

    /// Sign of `p(num / 2^k)`: -1, 0 or 1.
    pub fn sign_at_dyadic(&self, num: &BigInt, k: u64) -> i32 {
        let v = self.scaled_eval_dyadic(num, k);
        if v.is_zero() {
            0
        } else if v.is_positive() {
            1
        } else {
            -1
        }
    }

    pub fn eval(&self, x: &Real) -> Real {
        let bits = x.bits();
        let mut acc = Real::from_decimal_int(&self.coeffs[self.degree()].to_string(), bits);
        for c in self.coeffs[..self.degree()].iter().rev() {
            acc = acc * x + Real::from_decimal_int(&c.to_string(), bits);
        }
        acc
    }
}

/// A root of a polynomial enclosed between two dyadic rationals.
#[derive(Clone, Debug)]
pub struct RootBracket {
    pub lo: Real,
    pub hi: Real,
    /// Midpoint of the bracket; the reported root.
    pub root: Real,
    /// `|p(root)|` at working precision.
    pub residual: Real,
    /// `|p'(root)|` at working precision.
    pub slope: Real,
    /// The bracket has width `2^-refinements`.
    pub refinements: u64,
}

fn dyadic_to_real(num: &BigInt, k: u64, bits: usize) -> Real {
    Real::from_decimal_int(&num.to_string(), bits + num.bits() as usize)
        .mul_pow2(-(k as i64))
        .with_bits(bits)
}

/// Isolates the unique root of `p` in `(0, 1)` by exact bisection over
/// dyadic rationals. Requires `p(0) > 0 > p(1)`.
///
/// Every sign decision is made in exact integer arithmetic, so the returned
/// bracket is guaranteed to contain a sign change. Stops once
/// `|p(root)| <= 10^-digits · |p'(root)|` and the bracket is narrower than
/// `10^-digits`.
pub fn isolate_root_unit_interval(p: &IntPoly, digits: u32, bits: usize) -> Result<RootBracket> {
    let one = BigInt::one();
    if p.sign_at_dyadic(&BigInt::zero(), 0) <= 0 || p.sign_at_dyadic(&one, 0) >= 0 {
        return Err(Error::PrecisionUnreachable { digits });
    }
    let derivative = p.derivative();
    let tol = Real::parse(&format!("1e-{digits}"), bits).expect("tolerance literal");
    // width 2^-k <= 10^-digits once k >= digits * log2(10)
    let min_k = (digits as f64 * std::f64::consts::LOG2_10).ceil() as u64 + 8;
    let max_k = (bits as u64).max(min_k + 64);
    // invariant: p(lo / 2^k) > 0 > p(hi / 2^k)
    let mut lo = BigInt::zero();
    let mut hi = BigInt::one();
    let mut k: u64 = 0;
    loop {
        lo <<= 1;
        hi <<= 1;
        k += 1;
        let mid = (&lo + &hi) >> 1;
        match p.sign_at_dyadic(&mid, k) {
            0 => {
                lo = mid.clone();
                hi = mid;
            }
            s if s > 0 => lo = mid,
            _ => hi = mid,
        }
        if k >= min_k || lo == hi {
            let mid_num = &lo + &hi;
            let root = dyadic_to_real(&mid_num, k + 1, bits);
            let residual = p.eval(&root).abs();
            let slope = derivative.eval(&root).abs();
            if residual <= &tol * &slope || lo == hi {
                return Ok(RootBracket {
                    lo: dyadic_to_real(&lo, k, bits),
                    hi: dyadic_to_real(&hi, k, bits),
                    root,
                    residual,
                    slope,
                    refinements: k,
                });
            }
            if k >= max_k {
                return Err(Error::PrecisionUnreachable { digits });
            }
        }
    }
}
