//! Size models: the weights of zeros, successors, abstractions and applications.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Weights `(a, b, c, d)` of zero, successor, abstraction and application.
///
/// A variable with De Bruijn index `k` therefore weighs `a + (k - 1) * b`.
/// Constructed only through [`SizeModel::new`], which enforces that every
/// size class is finite and that the generating function has a single
/// dominant singularity.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SizeModel {
    a: u32,
    b: u32,
    c: u32,
    d: u32,
}

fn gcd(mut x: u64, mut y: u64) -> u64 {
    while y != 0 {
        (x, y) = (y, x % y);
    }
    x
}

impl SizeModel {
    pub fn new(a: u32, b: u32, c: u32, d: u32) -> Result<Self> {
        if a as u64 + d as u64 == 0 {
            return Err(Error::ZeroSizeZeroAndApplication);
        }
        if b == 0 {
            return Err(Error::ZeroSizeSuccessor);
        }
        if c == 0 {
            return Err(Error::ZeroSizeAbstraction);
        }
        let g = gcd(gcd(b as u64, c as u64), a as u64 + d as u64);
        if g != 1 {
            return Err(Error::GcdNotOne(g));
        }
        Ok(SizeModel { a, b, c, d })
    }

    /// `a = b = c = d = 1`.
    pub fn natural() -> Self {
        SizeModel {
            a: 1,
            b: 1,
            c: 1,
            d: 1,
        }
    }

    /// `a = 0, b = c = 1, d = 2`.
    pub fn less_natural() -> Self {
        SizeModel {
            a: 0,
            b: 1,
            c: 1,
            d: 2,
        }
    }

    /// Tromp's binary lambda calculus: `b = 1, a = c = d = 2`.
    pub fn binary() -> Self {
        SizeModel {
            a: 2,
            b: 1,
            c: 2,
            d: 2,
        }
    }

    pub fn a(&self) -> u32 {
        self.a
    }
    pub fn b(&self) -> u32 {
        self.b
    }
    pub fn c(&self) -> u32 {
        self.c
    }
    pub fn d(&self) -> u32 {
        self.d
    }

    pub fn weights(&self) -> [u32; 4] {
        [self.a, self.b, self.c, self.d]
    }

    /// Size of the variable with De Bruijn index `index >= 1`.
    pub fn var_size(&self, index: usize) -> usize {
        debug_assert!(index >= 1);
        self.a as usize + (index - 1) * self.b as usize
    }

    /// Preset name if the weights coincide with one of the named models.
    pub fn preset_name(&self) -> Option<&'static str> {
        match self.weights() {
            [1, 1, 1, 1] => Some("natural"),
            [0, 1, 1, 2] => Some("lessnatural"),
            [2, 1, 2, 2] => Some("binary"),
            _ => None,
        }
    }
}

impl fmt::Display for SizeModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.preset_name() {
            Some(name) => f.write_str(name),
            None => write!(f, "custom:{},{},{},{}", self.a, self.b, self.c, self.d),
        }
    }
}

/// Accepts `natural`, `lessnatural`, `binary` and `custom:a,b,c,d`.
impl FromStr for SizeModel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "natural" => Ok(SizeModel::natural()),
            "lessnatural" | "less-natural" => Ok(SizeModel::less_natural()),
            "binary" => Ok(SizeModel::binary()),
            other => {
                let Some(rest) = other.strip_prefix("custom:") else {
                    return Err(Error::UnknownModel(other.to_string()));
                };
                let parts: Vec<u32> = rest
                    .split(',')
                    .map(|p| p.trim().parse::<u32>())
                    .collect::<std::result::Result<_, _>>()
                    .map_err(|_| Error::UnknownModel(other.to_string()))?;
                match parts[..] {
                    [a, b, c, d] => SizeModel::new(a, b, c, d),
                    _ => Err(Error::UnknownModel(other.to_string())),
                }
            }
        }
    }
}
