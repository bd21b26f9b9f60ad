//! Maximal partial-sum operators for Dirichlet characters.
//!
//! The L2 maximal inequality for the characters mod N holds with some best
//! constant Delta(N); unlike its additive (Carleson-Hunt) counterpart, that
//! constant is not uniformly bounded. This crate computes Delta(N) exactly
//! for tiny N, produces certified lower bounds for larger N, and builds the
//! explicit subgroup-supported coefficient vectors whose maximal character
//! sums grow with p, verifying every intermediate identity numerically:
//!
//! - [`numtheory`]: primality, factorization, primitive roots, full
//!   discrete-log tables, subgroups of prime order, and the scan for primes
//!   p with a large prime factor of p - 1.
//! - [`chargroup`]: character evaluation, maximal partial sums on Z_M and
//!   Z_p^*, and the exact transport identity between them.
//! - [`delta`]: the exact cutoff-enumeration oracle, the alternating
//!   maximization lower bound, and the dyadic-chaining ceiling.
//! - [`rearrangement`]: search for adversarial orderings and the exact
//!   shift-discretization of level sets.
//! - [`discrepancy`]: subgroup orbit point sets, grid-box coverage, the
//!   Erdos-Turan-Koksma bound, Weil sums, and the ordered-element search.
//! - [`pipeline`]: the assembled construction and the reduction chain from
//!   characters mod p to the additive group Z_M.

pub mod chargroup;
pub mod config;
pub mod delta;
pub mod discrepancy;
pub mod error;
pub mod numtheory;
pub mod perm;
pub mod pipeline;
pub mod rearrangement;
pub mod report;

pub use error::{Error, Result};
pub use perm::Permutation;
