//! Exact arithmetic for positive cones of rank-one ordered abelian groups.
//!
//! The crate builds and checks, with no floating point on any decision path:
//!
//! - supernatural numbers (generalized integers) and the subgroups of ℚ they
//!   encode ([`supernat`]);
//! - finitely generated submonoids of ℤ⁺ — membership, conductor, gap set,
//!   minimal generators ([`intcone`]);
//! - multiplication maps between simple components, order-embedding decisions,
//!   directed systems and commutative grids ([`embed`]);
//! - the rational block monoids generated by `k/r` and `(k'/r)(s/r)^n`, with
//!   two independent membership procedures ([`ratcone`]);
//! - countably generated intervals presented by monotone generator sequences,
//!   with three-valued verdicts for claims that quantify over infinitely many
//!   stages ([`intervals`]);
//! - the gap-engineering constructions: parameter selection, layered
//!   extensions `aH⁺ + p⟨c,d⟩`, chains with divergent states, and the combined
//!   grids ([`construct`]).
//!
//! Everything a verdict depends on is decided exactly; claims that can only be
//! examined on a finite prefix are reported as `verified_to_bound`, never as
//! `proved`.

pub mod construct;
pub mod embed;
pub mod intcone;
pub mod intervals;
pub mod oracle;
pub mod ratcone;
pub mod report;
pub mod sampling;
pub mod supernat;
pub mod verify;

mod error;

pub use error::Error;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

/// Bounds shared by verification runs. Every bound is positive; runs with
/// identical bounds and seed produce identical records.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
pub struct RunBounds {
    /// Prefix length for claims quantified over all levels `m`.
    pub level_bound: u32,
    /// Upper end of residue-coverage and similar sweeps.
    pub sweep_bound: u64,
    /// Number of pseudo-random samples drawn where sampling is called for.
    pub sample_count: usize,
    /// Cap on enumeration work for a single decision; exceeding it downgrades
    /// a verdict to `verified_to_bound` or refuses the run.
    pub work_limit: u64,
}

impl Default for RunBounds {
    fn default() -> Self {
        RunBounds {
            level_bound: 10,
            sweep_bound: 1000,
            sample_count: 100,
            work_limit: 2_000_000,
        }
    }
}
