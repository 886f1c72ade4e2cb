//! Exact coefficients of the term-counting generating functions.
//!
//! Families, all truncated at a common order `N`:
//!
//! * `Linf`: all terms, `L∞ = z^a/(1-z^b) + z^c L∞ + z^d L∞²`.
//! * `L(m)`: m-open terms, `L_m = z^a Σ_{j<m} z^{bj} + z^c L_{m+1} + z^d L_m²`.
//! * `K(m) = Linf − L(m)`.
//! * `Lh(m, h)`: m-open terms with every index at most `h`.
//! * `Kh(m, h)`: lower bound for `K(m)`, obtained by replacing `L_m` with
//!   `Lh(m, h)` in the application term of the `K_m` equation.
//! * `KhH(m, h, H)`: upper bound for `K(m)`, using `Linf − Kh(m, h)` for
//!   `m < H` and `Linf` beyond.
//!
//! The recursion in `m` never ends by itself. It is cut off by size: a
//! variable with index `m + 1` alone costs `a + b·m`, so for `n < a + b·m`
//! every term of size `n` is already m-open and `L_{m,n} = L_{∞,n}`.

use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, Mutex, OnceLock};

use num_bigint::BigUint;
use num_traits::Zero;
use serde::Serialize;

use crate::model::SizeModel;
use crate::par::Execution;

/// Which generating function a coefficient table belongs to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(tag = "family")]
pub enum Family {
    Linf,
    L { m: usize },
    K { m: usize },
    Lh { m: usize, h: usize },
    Kh { m: usize, h: usize },
    KhH { m: usize, h: usize, big_h: usize },
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Family::Linf => write!(f, "Linf"),
            Family::L { m } => write!(f, "L({m})"),
            Family::K { m } => write!(f, "K({m})"),
            Family::Lh { m, h } => write!(f, "Lh({m},{h})"),
            Family::Kh { m, h } => write!(f, "Kh({m},{h})"),
            Family::KhH { m, h, big_h } => write!(f, "KhH({m},{h},{big_h})"),
        }
    }
}

/// A truncated power series with exact nonnegative coefficients.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoeffSeries {
    pub model: SizeModel,
    pub family: Family,
    pub coeffs: Vec<BigUint>,
}

#[derive(Serialize)]
struct Row<'a> {
    n: usize,
    count: &'a str,
}

impl CoeffSeries {
    /// Largest `n` for which the coefficient is known.
    pub fn truncation(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn get(&self, n: usize) -> &BigUint {
        &self.coeffs[n]
    }

    /// `[{"n": 0, "count": "0"}, ...]` with counts as decimal strings.
    pub fn to_json(&self) -> String {
        let text: Vec<String> = self.coeffs.iter().map(|c| c.to_string()).collect();
        let rows: Vec<Row<'_>> = text
            .iter()
            .enumerate()
            .map(|(n, s)| Row { n, count: s })
            .collect();
        serde_json::to_string_pretty(&rows).expect("rows serialise")
    }

    /// CSV with header `n,count`.
    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["n", "count"]).expect("in-memory write");
        for (n, c) in self.coeffs.iter().enumerate() {
            w.write_record([n.to_string(), c.to_string()])
                .expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("in-memory flush")).expect("ascii csv")
    }

    /// True when every coefficient is `<=` the matching one of `other`.
    pub fn dominated_by(&self, other: &CoeffSeries) -> bool {
        self.coeffs.iter().zip(&other.coeffs).all(|(x, y)| x <= y)
    }
}

type Coeffs = Arc<Vec<BigUint>>;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
enum RowKey {
    L(usize),
    Lh(usize, usize),
    Kh(usize, usize),
    KhH(usize, usize, usize),
}

/// Below this many products a convolution is summed on the calling thread.
const PAR_CONV_THRESHOLD: usize = 96;

/// Coefficient tables for one size model and truncation, with memoised rows.
///
/// Rows are shared across families and across values of `m`, and each row
/// is built at most once even under concurrent use.
pub struct SeriesEngine {
    model: SizeModel,
    n_max: usize,
    exec: Execution,
    linf: Coeffs,
    rows: Mutex<HashMap<RowKey, Arc<OnceLock<Coeffs>>>>,
}

impl SeriesEngine {
    pub fn new(model: SizeModel, n_max: usize) -> Self {
        Self::with_execution(model, n_max, Execution::default())
    }

    pub fn with_execution(model: SizeModel, n_max: usize, exec: Execution) -> Self {
        let mut engine = SeriesEngine {
            model,
            n_max,
            exec,
            linf: Arc::new(Vec::new()),
            rows: Mutex::new(HashMap::new()),
        };
        engine.linf = Arc::new(engine.build_linf());
        engine
    }

    pub fn model(&self) -> &SizeModel {
        &self.model
    }

    pub fn n_max(&self) -> usize {
        self.n_max
    }

    fn a(&self) -> usize {
        self.model.a() as usize
    }
    fn b(&self) -> usize {
        self.model.b() as usize
    }
    fn c(&self) -> usize {
        self.model.c() as usize
    }
    fn d(&self) -> usize {
        self.model.d() as usize
    }

    /// Index `j` with `n = a + b·j`, if any.
    fn var_slot(&self, n: usize) -> Option<usize> {
        (n >= self.a() && (n - self.a()).is_multiple_of(self.b()))
            .then(|| (n - self.a()) / self.b())
    }

    /// `[z^n] z^a Σ_{j<q} z^{bj}`.
    fn src_below(&self, q: usize, n: usize) -> bool {
        self.var_slot(n).is_some_and(|j| j < q)
    }

    /// `[z^n] z^a Σ_{j>=q} z^{bj}`.
    fn src_from(&self, q: usize, n: usize) -> bool {
        self.var_slot(n).is_some_and(|j| j >= q)
    }

    /// Every term of size `n` uses only indices `<= q`.
    fn saturated(&self, q: usize, n: usize) -> bool {
        self.a() + self.b() * q > n
    }

    /// `Σ_k x[k]·y[s-k]` over the indices present in both slices.
    fn conv(&self, x: &[BigUint], y: &[BigUint], s: usize) -> BigUint {
        if x.is_empty() || y.is_empty() {
            return BigUint::zero();
        }
        let lo = s.saturating_sub(y.len() - 1);
        let hi = s.min(x.len() - 1);
        if lo > hi {
            return BigUint::zero();
        }
        let term = |k: usize| -> BigUint {
            if x[k].is_zero() || y[s - k].is_zero() {
                BigUint::zero()
            } else {
                &x[k] * &y[s - k]
            }
        };
        if hi - lo + 1 >= PAR_CONV_THRESHOLD {
            self.exec.sum_range(lo..hi + 1, term)
        } else {
            (lo..=hi).map(term).sum()
        }
    }

    /// `Σ_k x[k]·x[s-k]` over indices below `x.len()`, using symmetry.
    fn conv_square(&self, x: &[BigUint], s: usize) -> BigUint {
        if x.is_empty() {
            return BigUint::zero();
        }
        let lo = s.saturating_sub(x.len() - 1);
        let hi = s.min(x.len() - 1);
        if lo > hi {
            return BigUint::zero();
        }
        // pairs (k, s-k) with k < s-k, then the diagonal
        let half_end = s.div_ceil(2); // k < s - k
        let term = |k: usize| -> BigUint {
            if x[k].is_zero() || x[s - k].is_zero() {
                BigUint::zero()
            } else {
                &x[k] * &x[s - k]
            }
        };
        let off: BigUint = if half_end > lo {
            if half_end - lo >= PAR_CONV_THRESHOLD {
                self.exec.sum_range(lo..half_end, term)
            } else {
                (lo..half_end).map(term).sum()
            }
        } else {
            BigUint::zero()
        };
        let mut total = off << 1usize;
        if s.is_multiple_of(2) && s / 2 >= lo && s / 2 <= hi {
            let mid = &x[s / 2];
            total += mid * mid;
        }
        total
    }

    fn build_linf(&self) -> Vec<BigUint> {
        let mut out: Vec<BigUint> = Vec::with_capacity(self.n_max + 1);
        for n in 0..=self.n_max {
            let mut v = BigUint::from(self.var_slot(n).is_some() as u8);
            if n >= self.c() {
                v += &out[n - self.c()];
            }
            if n >= self.d() {
                v += self.conv_square(&out, n - self.d());
            }
            out.push(v);
        }
        out
    }

    fn row(&self, key: RowKey) -> Coeffs {
        let cell = {
            let mut rows = self.rows.lock().expect("row cache poisoned");
            Arc::clone(rows.entry(key).or_default())
        };
        Arc::clone(cell.get_or_init(|| Arc::new(self.build_row(key))))
    }

    fn build_row(&self, key: RowKey) -> Vec<BigUint> {
        match key {
            RowKey::L(q) => self.build_l(q),
            RowKey::Lh(q, h) => self.build_lh(q, h),
            RowKey::Kh(q, h) => self.build_kh(q, h),
            RowKey::KhH(q, h, big_h) => self.build_khh(q, h, big_h),
        }
    }

    /// Smallest `q' >= q` whose row coincides with `L∞` up to `n_max`.
    fn l_top(&self, q: usize) -> usize {
        let mut top = q;
        while !self.saturated(top, self.n_max) {
            top += 1;
        }
        top
    }

    fn l_row(&self, q: usize) -> Coeffs {
        let top = self.l_top(q);
        if q == top {
            return Arc::clone(&self.linf);
        }
        // fill from the top so that each build finds its successor cached
        for r in (q..top).rev() {
            self.row(RowKey::L(r));
        }
        self.row(RowKey::L(q))
    }

    fn build_l(&self, q: usize) -> Vec<BigUint> {
        let next = if self.saturated(q + 1, self.n_max) {
            Arc::clone(&self.linf)
        } else {
            self.row(RowKey::L(q + 1))
        };
        let mut out: Vec<BigUint> = Vec::with_capacity(self.n_max + 1);
        for n in 0..=self.n_max {
            if self.saturated(q, n) {
                out.push(self.linf[n].clone());
                continue;
            }
            let mut v = BigUint::from(self.src_below(q, n) as u8);
            if n >= self.c() {
                v += &next[n - self.c()];
            }
            if n >= self.d() {
                v += self.conv_square(&out, n - self.d());
            }
            out.push(v);
        }
        out
    }

    fn lh_row(&self, q: usize, h: usize) -> Coeffs {
        let q = q.min(h);
        for r in (q..=h).rev() {
            self.row(RowKey::Lh(r, h));
        }
        self.row(RowKey::Lh(q, h))
    }

    fn build_lh(&self, q: usize, h: usize) -> Vec<BigUint> {
        let mut out: Vec<BigUint> = Vec::with_capacity(self.n_max + 1);
        if q >= h {
            // L_h^(h) = z^a Σ_{j<h} z^{bj} + z^c L_h^(h) + z^d L_h^(h)²
            for n in 0..=self.n_max {
                let mut v = BigUint::from(self.src_below(h, n) as u8);
                if n >= self.c() {
                    v += out[n - self.c()].clone();
                }
                if n >= self.d() {
                    v += self.conv_square(&out, n - self.d());
                }
                out.push(v);
            }
            return out;
        }
        let next = self.row(RowKey::Lh(q + 1, h));
        let top = self.row(RowKey::Lh(h, h));
        for n in 0..=self.n_max {
            if self.saturated(q, n) {
                out.push(top[n].clone());
                continue;
            }
            let mut v = BigUint::from(self.src_below(q, n) as u8);
            if n >= self.c() {
                v += &next[n - self.c()];
            }
            if n >= self.d() {
                v += self.conv_square(&out, n - self.d());
            }
            out.push(v);
        }
        out
    }

    /// Solves `K = src_{>=q} + z^shift·next + z^d·K·factor` coefficientwise,
    /// where `next` is `None` for the self-referential tail rows (then the
    /// shift term refers to `K` itself).
    fn solve_linear(
        &self,
        q: usize,
        shift: usize,
        next: Option<&[BigUint]>,
        factor: &[BigUint],
    ) -> Vec<BigUint> {
        let mut out: Vec<BigUint> = Vec::with_capacity(self.n_max + 1);
        for n in 0..=self.n_max {
            let mut v = BigUint::from(self.src_from(q, n) as u8);
            if n >= shift {
                match next {
                    Some(next) => v += &next[n - shift],
                    None => v += out[n - shift].clone(),
                }
            }
            if n >= self.d() {
                v += self.conv(&out, factor, n - self.d());
            }
            out.push(v);
        }
        out
    }

    fn shifted(&self, base: &[BigUint], by: usize) -> Vec<BigUint> {
        (0..=self.n_max)
            .map(|n| {
                if n >= by {
                    base[n - by].clone()
                } else {
                    BigUint::zero()
                }
            })
            .collect()
    }

    fn kh_row(&self, q: usize, h: usize) -> Coeffs {
        for r in (q.min(h)..=h).rev() {
            self.row(RowKey::Kh(r, h));
        }
        self.row(RowKey::Kh(q, h))
    }

    fn build_kh(&self, q: usize, h: usize) -> Vec<BigUint> {
        if q > h {
            let base = self.row(RowKey::Kh(h, h));
            return self.shifted(&base, self.b() * (q - h));
        }
        let lh = self.lh_row(q, h);
        let factor: Vec<BigUint> = self
            .linf
            .iter()
            .zip(lh.iter())
            .map(|(x, y)| x + y)
            .collect();
        if q == h {
            // K_q = z^b K_h for q >= h, so z^c K_{h+1} = z^{b+c} K_h
            return self.solve_linear(h, self.b() + self.c(), None, &factor);
        }
        let next = self.row(RowKey::Kh(q + 1, h));
        self.solve_linear(q, self.c(), Some(&next), &factor)
    }

    fn khh_row(&self, q: usize, h: usize, big_h: usize) -> Coeffs {
        for r in (q.min(big_h)..=big_h).rev() {
            self.row(RowKey::KhH(r, h, big_h));
        }
        self.row(RowKey::KhH(q, h, big_h))
    }

    fn build_khh(&self, q: usize, h: usize, big_h: usize) -> Vec<BigUint> {
        if q > big_h {
            let base = self.row(RowKey::KhH(big_h, h, big_h));
            return self.shifted(&base, self.b() * (q - big_h));
        }
        if q == big_h {
            let factor: Vec<BigUint> = self.linf.iter().map(|x| x << 1usize).collect();
            return self.solve_linear(big_h, self.b() + self.c(), None, &factor);
        }
        let kh = self.kh_row(q, h);
        // 2 L∞ − K_q^(h); nonnegative because K_q^(h) <= K_q <= L∞
        let factor: Vec<BigUint> = self
            .linf
            .iter()
            .zip(kh.iter())
            .map(|(x, k)| (x << 1usize) - k)
            .collect();
        let next = self.row(RowKey::KhH(q + 1, h, big_h));
        self.solve_linear(q, self.c(), Some(&next), &factor)
    }

    fn series(&self, family: Family, coeffs: &[BigUint]) -> CoeffSeries {
        CoeffSeries {
            model: self.model,
            family,
            coeffs: coeffs.to_vec(),
        }
    }

    pub fn linf(&self) -> CoeffSeries {
        self.series(Family::Linf, &self.linf)
    }

    pub fn lm(&self, m: usize) -> CoeffSeries {
        self.series(Family::L { m }, &self.l_row(m))
    }

    pub fn km(&self, m: usize) -> CoeffSeries {
        let l = self.l_row(m);
        let coeffs: Vec<BigUint> = self.linf.iter().zip(l.iter()).map(|(x, y)| x - y).collect();
        CoeffSeries {
            model: self.model,
            family: Family::K { m },
            coeffs,
        }
    }

    pub fn lmh(&self, m: usize, h: usize) -> CoeffSeries {
        assert!(h >= 1, "h must be positive");
        self.series(Family::Lh { m, h }, &self.lh_row(m, h))
    }

    pub fn kmh(&self, m: usize, h: usize) -> CoeffSeries {
        assert!(h >= 1, "h must be positive");
        self.series(Family::Kh { m, h }, &self.kh_row(m, h))
    }

    pub fn kmhh(&self, m: usize, h: usize, big_h: usize) -> CoeffSeries {
        assert!(h >= 1 && big_h >= 1, "h and H must be positive");
        self.series(Family::KhH { m, h, big_h }, &self.khh_row(m, h, big_h))
    }

    pub fn family(&self, family: Family) -> CoeffSeries {
        match family {
            Family::Linf => self.linf(),
            Family::L { m } => self.lm(m),
            Family::K { m } => self.km(m),
            Family::Lh { m, h } => self.lmh(m, h),
            Family::Kh { m, h } => self.kmh(m, h),
            Family::KhH { m, h, big_h } => self.kmhh(m, h, big_h),
        }
    }
}

pub fn linf_coeffs(model: &SizeModel, n_max: usize) -> CoeffSeries {
    SeriesEngine::new(*model, n_max).linf()
}

pub fn lm_coeffs(model: &SizeModel, m: usize, n_max: usize) -> CoeffSeries {
    SeriesEngine::new(*model, n_max).lm(m)
}

pub fn km_coeffs(model: &SizeModel, m: usize, n_max: usize) -> CoeffSeries {
    SeriesEngine::new(*model, n_max).km(m)
}

pub fn lmh_coeffs(model: &SizeModel, m: usize, h: usize, n_max: usize) -> CoeffSeries {
    SeriesEngine::new(*model, n_max).lmh(m, h)
}

pub fn kmh_coeffs(model: &SizeModel, m: usize, h: usize, n_max: usize) -> CoeffSeries {
    SeriesEngine::new(*model, n_max).kmh(m, h)
}

pub fn kmhh_coeffs(
    model: &SizeModel,
    m: usize,
    h: usize,
    big_h: usize,
    n_max: usize,
) -> CoeffSeries {
    SeriesEngine::new(*model, n_max).kmhh(m, h, big_h)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::oracle_counts;

    fn small(s: &CoeffSeries) -> Vec<u64> {
        s.coeffs.iter().map(|c| u64::try_from(c).unwrap()).collect()
    }

    #[test]
    fn natural_linf_prefix() {
        let s = linf_coeffs(&SizeModel::natural(), 8);
        assert_eq!(small(&s), [0, 1, 2, 4, 9, 22, 57, 154, 429]);
    }

    #[test]
    fn natural_closed_prefix() {
        let s = lm_coeffs(&SizeModel::natural(), 0, 10);
        assert_eq!(small(&s), [0, 0, 1, 1, 3, 6, 17, 41, 116, 313, 895]);
    }

    #[test]
    fn binary_closed_size_four() {
        let s = lm_coeffs(&SizeModel::binary(), 0, 4);
        assert_eq!(small(&s), [0, 0, 0, 0, 1]);
    }

    #[test]
    fn km_examples() {
        let s = km_coeffs(&SizeModel::natural(), 0, 2);
        assert_eq!(small(&s), [0, 1, 1]);
    }

    #[test]
    fn lmh_examples() {
        let nat = SizeModel::natural();
        // only `1` (and its abstraction-free combinations) survive with h = 1
        let s = lmh_coeffs(&nat, 2, 1, 2);
        assert_eq!(small(&s)[1], 1);
        assert_eq!(small(&s)[2], 1); // `\1`; `2` is excluded
        let full = lm_coeffs(&nat, 0, 12);
        assert_eq!(
            lmh_coeffs(&nat, 0, 12, 12),
            CoeffSeries {
                family: Family::Lh { m: 0, h: 12 },
                ..full.clone()
            }
        );
        assert!(lmh_coeffs(&nat, 0, 3, 12).dominated_by(&full));
    }

    #[test]
    fn agrees_with_oracle_less_natural() {
        let model = SizeModel::less_natural();
        let engine = SeriesEngine::new(model, 9);
        for m in [Some(0), Some(1), Some(3), None] {
            let oracle = oracle_counts(&model, m, 9).unwrap();
            let dp = match m {
                Some(m) => engine.lm(m),
                None => engine.linf(),
            };
            assert_eq!(dp.coeffs, oracle, "m = {m:?}");
        }
    }

    #[test]
    fn sequential_and_parallel_agree() {
        let model = SizeModel::natural();
        let seq = SeriesEngine::with_execution(model, 220, Execution::Sequential);
        let par = SeriesEngine::with_execution(model, 220, Execution::Parallel);
        assert_eq!(seq.linf(), par.linf());
        assert_eq!(seq.kmh(0, 3), par.kmh(0, 3));
    }

    #[test]
    fn exports() {
        let s = lm_coeffs(&SizeModel::natural(), 0, 3);
        assert_eq!(s.to_csv(), "n,count\n0,0\n1,0\n2,1\n3,1\n");
        let json: serde_json::Value = serde_json::from_str(&s.to_json()).unwrap();
        assert_eq!(json[2]["count"], "1");
        assert_eq!(json[3]["n"], 3);
    }

    #[test]
    fn tail_rows_shift() {
        let model = SizeModel::natural();
        let e = SeriesEngine::new(model, 30);
        let k3 = e.kmh(3, 2);
        let k2 = e.kmh(2, 2);
        assert_eq!(k3.coeffs[1..], k2.coeffs[..30]);
        assert!(k3.coeffs[0].is_zero());
    }
}
