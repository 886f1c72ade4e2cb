//! Published reference values, embedded so checks run offline.

use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::real::Real;

const TABLE1: &str = include_str!("../data/table1_natural.csv");
const CONSTANTS: &str = include_str!("../data/constants.csv");

/// Absolute tolerance on each published table entry.
pub const TABLE1_TOLERANCE: f64 = 1e-6;

/// One published row: constants of `K_0^(h)` and `K_0^(h,H)`.
#[derive(Clone, Debug, Deserialize)]
pub struct Table1Reference {
    pub h: usize,
    #[serde(rename = "H")]
    pub big_h: usize,
    pub c0_h: String,
    pub d0_h: String,
    #[serde(rename = "c0_hH")]
    pub c0_hh: String,
    #[serde(rename = "d0_hH")]
    pub d0_hh: String,
}

impl Table1Reference {
    pub fn columns(&self) -> [&str; 4] {
        [&self.c0_h, &self.d0_h, &self.c0_hh, &self.d0_hh]
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Deserialize, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ToleranceMode {
    Abs,
    Rel,
}

#[derive(Clone, Debug, Deserialize)]
pub struct ConstantReference {
    pub quantity: String,
    pub model: String,
    pub m: Option<usize>,
    pub h: Option<usize>,
    #[serde(rename = "H")]
    pub big_h: Option<usize>,
    #[serde(rename = "M")]
    pub big_m: Option<usize>,
    pub value: String,
    pub tolerance: f64,
    pub mode: ToleranceMode,
}

fn parse<T: for<'de> Deserialize<'de>>(text: &str) -> Vec<T> {
    csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .from_reader(text.as_bytes())
        .deserialize()
        .collect::<Result<_, _>>()
        .expect("embedded reference data parses")
}

pub fn table1_reference() -> &'static [Table1Reference] {
    static ROWS: OnceLock<Vec<Table1Reference>> = OnceLock::new();
    ROWS.get_or_init(|| parse(TABLE1))
}

pub fn constant_references() -> &'static [ConstantReference] {
    static ROWS: OnceLock<Vec<ConstantReference>> = OnceLock::new();
    ROWS.get_or_init(|| parse(CONSTANTS))
}

/// Which computed quantity a reference value is attached to.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Levels {
    pub m: Option<usize>,
    pub h: Option<usize>,
    pub big_h: Option<usize>,
    pub big_m: Option<usize>,
}

impl Levels {
    pub const NONE: Levels = Levels {
        m: None,
        h: None,
        big_h: None,
        big_m: None,
    };
}

pub fn lookup(quantity: &str, model: &str, levels: Levels) -> Option<&'static ConstantReference> {
    constant_references().iter().find(|r| {
        r.quantity == quantity
            && r.model == model
            && r.m == levels.m
            && r.h == levels.h
            && r.big_h == levels.big_h
            && r.big_m == levels.big_m
    })
}

/// Outcome of comparing one computed value with its reference.
#[derive(Clone, Debug, Serialize)]
pub struct Comparison {
    pub quantity: String,
    pub expected: String,
    pub computed: Real,
    pub deviation: Real,
    pub tolerance: f64,
    pub mode: ToleranceMode,
    pub passed: bool,
}

impl Comparison {
    pub fn new(
        quantity: &str,
        expected: &str,
        computed: &Real,
        tolerance: f64,
        mode: ToleranceMode,
    ) -> Comparison {
        let bits = computed.bits();
        let reference = Real::parse(expected, bits).expect("reference values are decimal literals");
        let mut deviation = (computed - &reference).abs();
        if mode == ToleranceMode::Rel {
            deviation = deviation / reference.abs();
        }
        let passed =
            deviation <= Real::parse(&format!("{tolerance:e}"), bits).expect("tolerance literal");
        Comparison {
            quantity: quantity.to_string(),
            expected: expected.to_string(),
            computed: computed.clone(),
            deviation,
            tolerance,
            mode,
            passed,
        }
    }

    pub fn against(reference: &ConstantReference, computed: &Real) -> Comparison {
        Comparison::new(
            &reference.quantity,
            &reference.value,
            computed,
            reference.tolerance,
            reference.mode,
        )
    }

    pub fn summary(&self) -> String {
        let mode = match self.mode {
            ToleranceMode::Abs => "abs",
            ToleranceMode::Rel => "rel",
        };
        format!(
            "{}: computed {} vs reference {} ({} deviation {}, tolerance {:e})",
            self.quantity,
            self.computed.to_sig_string(12),
            self.expected,
            mode,
            self.deviation.to_sig_string(3),
            self.tolerance
        )
    }
}
