//! Exact-arithmetic construction and error analysis of (p,q)-Lorentz
//! polynomial operators on compact disks.
//!
//! The operator acts on an analytic function `f(z) = sum c_k z^k` through its
//! (p,q)-derivatives at the origin and produces a degree-`n` polynomial that
//! fixes affine functions and converges to `f` at the geometric rate
//! `p^n / [n]` on every admissible disk. The crate builds everything on an
//! exact rational path (floats enter only when values are evaluated on a
//! grid), derives certified error constants, and drives convergence-rate
//! experiments through a CLI.
//!
//! Module map:
//! - [`scalar`]: dual-path scalars (exact rationals / doubles) and complex pairs
//! - [`pq`]: (p,q)-integers, factorials, binomials, power products
//! - [`series`]: truncated power series with certified geometric tail majorants
//! - [`lorentz`]: the operator itself — multipliers, iterates, Voronovskaja term
//! - [`bounds`]: rate units, certified constants, hypothesis audits
//! - [`harness`]: circle-grid sup-norms, rate tables, exact-order audits
//! - [`cli`]: the `pq-lorentz` command-line front end

// Validation comparisons are written as `!(x > bound)` on purpose: scalars on
// the float path are only partially ordered, and an incomparable value (NaN)
// must fail validation rather than slip through an inverted `<=`.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bounds;
pub mod cli;
pub mod error;
pub mod harness;
pub mod lorentz;
pub mod pq;
pub mod scalar;
pub mod series;

pub use error::{Error, Result};
