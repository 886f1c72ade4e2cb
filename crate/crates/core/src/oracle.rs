//! Exhaustive enumeration of terms by size.
//!
//! This is deliberately a different algorithm from the coefficient
//! recurrences in [`crate::series`]: terms are materialised, bucketed by
//! exact size and filtered by [`Term::openness`], so agreement between the
//! two is a meaningful check.

use std::collections::HashMap;
use std::sync::Arc;

use num_bigint::BigUint;

use crate::error::{Error, Result};
use crate::model::SizeModel;
use crate::term::Term;

/// Openness bound for enumeration: `Some(m)` for m-open terms, `None` for all terms.
pub type OpennessBound = Option<usize>;

/// Default cap on the number of materialised terms.
pub const DEFAULT_TERM_CAP: u128 = 20_000_000;

struct Enumerator {
    model: SizeModel,
    terms: HashMap<(usize, OpennessBound), Arc<Vec<Term>>>,
    counts: HashMap<(usize, OpennessBound), u128>,
}

impl Enumerator {
    fn new(model: SizeModel) -> Self {
        Enumerator {
            model,
            terms: HashMap::new(),
            counts: HashMap::new(),
        }
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

    /// Indices `k` (within `bound`) with `a + (k-1) b == size`.
    fn var_index(&self, size: usize, bound: OpennessBound) -> Option<usize> {
        if size < self.a() || !(size - self.a()).is_multiple_of(self.b()) {
            return None;
        }
        let k = (size - self.a()) / self.b() + 1;
        match bound {
            Some(m) if k > m => None,
            _ => Some(k),
        }
    }

    fn inner(bound: OpennessBound) -> OpennessBound {
        bound.map(|m| m + 1)
    }

    /// Budgets for the left operand of an application of total size `size`.
    fn app_budgets(&self, size: usize) -> Option<std::ops::RangeInclusive<usize>> {
        if size < self.d() {
            return None;
        }
        // with d = 0 the split (0, size) is skipped by callers; it is empty anyway since a >= 1
        Some(0..=size - self.d())
    }

    fn count(&mut self, size: usize, bound: OpennessBound) -> u128 {
        if let Some(&n) = self.counts.get(&(size, bound)) {
            return n;
        }
        let mut total: u128 = self.var_index(size, bound).is_some() as u128;
        if size >= self.c() {
            total = total.saturating_add(self.count(size - self.c(), Self::inner(bound)));
        }
        if let Some(splits) = self.app_budgets(size) {
            let rest = size - self.d();
            for left in splits {
                if left == size || rest - left == size {
                    continue;
                }
                let l = self.count(left, bound);
                if l == 0 {
                    continue;
                }
                let r = self.count(rest - left, bound);
                total = total.saturating_add(l.saturating_mul(r));
            }
        }
        self.counts.insert((size, bound), total);
        total
    }

    fn terms(&mut self, size: usize, bound: OpennessBound) -> Arc<Vec<Term>> {
        if let Some(found) = self.terms.get(&(size, bound)) {
            return Arc::clone(found);
        }
        let mut out = Vec::new();
        if let Some(k) = self.var_index(size, bound) {
            out.push(Term::Var(k));
        }
        if size >= self.c() {
            let bodies = self.terms(size - self.c(), Self::inner(bound));
            out.extend(bodies.iter().map(|t| Term::Abs(Arc::new(t.clone()))));
        }
        if let Some(splits) = self.app_budgets(size) {
            let rest = size - self.d();
            for left in splits {
                if left == size || rest - left == size {
                    continue;
                }
                let lefts = self.terms(left, bound);
                if lefts.is_empty() {
                    continue;
                }
                let rights = self.terms(rest - left, bound);
                for l in lefts.iter() {
                    let l = Arc::new(l.clone());
                    for r in rights.iter() {
                        out.push(Term::App(Arc::clone(&l), Arc::new(r.clone())));
                    }
                }
            }
        }
        let out = Arc::new(out);
        self.terms.insert((size, bound), Arc::clone(&out));
        out
    }
}

/// Counts terms of every size `0..=n_max` whose openness is within `bound`,
/// by materialising them. Refuses with [`Error::BudgetExceeded`] when more
/// than `cap` terms would be built.
pub fn oracle_counts_capped(
    model: &SizeModel,
    bound: OpennessBound,
    n_max: usize,
    cap: u128,
) -> Result<Vec<BigUint>> {
    let mut en = Enumerator::new(*model);
    let predicted = (0..=n_max).fold(0u128, |acc, s| acc.saturating_add(en.count(s, bound)));
    if predicted > cap {
        return Err(Error::BudgetExceeded { predicted, cap });
    }
    let mut counts = Vec::with_capacity(n_max + 1);
    for size in 0..=n_max {
        let bucket = en.terms(size, bound);
        let hits = bucket
            .iter()
            .filter(|t| {
                debug_assert_eq!(t.size(model), size);
                match bound {
                    Some(m) => t.openness() <= m,
                    None => true,
                }
            })
            .count();
        counts.push(BigUint::from(hits));
    }
    Ok(counts)
}

pub fn oracle_counts(
    model: &SizeModel,
    bound: OpennessBound,
    n_max: usize,
) -> Result<Vec<BigUint>> {
    oracle_counts_capped(model, bound, n_max, DEFAULT_TERM_CAP)
}

/// Enumerates the actual terms of exactly `size` within `bound`.
pub fn enumerate_terms(model: &SizeModel, bound: OpennessBound, size: usize) -> Result<Vec<Term>> {
    let mut en = Enumerator::new(*model);
    let predicted = en.count(size, bound);
    if predicted > DEFAULT_TERM_CAP {
        return Err(Error::BudgetExceeded {
            predicted,
            cap: DEFAULT_TERM_CAP,
        });
    }
    Ok(en.terms(size, bound).as_ref().clone())
}

/// JSON array of decimal strings.
pub fn counts_to_json(counts: &[BigUint]) -> String {
    let strings: Vec<String> = counts.iter().map(|c| c.to_string()).collect();
    serde_json::to_string(&strings).expect("string array serialises")
}
