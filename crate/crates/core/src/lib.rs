//! Counting lambda terms in De Bruijn notation under a size model
//! `|n| = a + b(n − 1)`, `|λM| = c + |M|`, `|MN| = d + |M| + |N|`.
//!
//! Exact coefficient series for closed and `m`-open terms, their common
//! singularity `ρ`, and the upper and lower constants `C` in
//! `[z^n] L_m ≍ C n^{-3/2} ρ^{-n}`.

pub mod bounds;
pub mod error;
pub mod model;
pub mod oracle;
pub mod par;
pub mod poly;
pub mod real;
pub mod reference;
pub mod report;
pub mod series;
pub mod singularity;
pub mod term;

pub use bounds::{
    asymptotic_constants, improved_bounds, BoundsContext, BoundsReport, PuiseuxPair,
    RemainderFactor,
};
pub use error::{Error, Result};
pub use model::SizeModel;
pub use par::Execution;
pub use real::Real;
pub use series::{CoeffSeries, Family, SeriesEngine};
pub use singularity::{dominant_singularity, puiseux_linf, PuiseuxExpansion, Singularity};
pub use term::Term;
