//! Exact solvers for bilevel selection problems with a robust follower.
//!
//! A leader picks `X ⊆ E_l`, then the follower completes it greedily with
//! `Y ⊆ E_f \ X` so that `|X ∪ Y| = b`, minimising its own cost `d`; the
//! leader pays `c(X ∪ Y)`. When `d` is uncertain an adversary picks it from
//! an uncertainty set (discrete scenarios, intervals, or independent finite
//! value sets). The crate contains:
//!
//! * greedy primitives and the certain-case solver ([`greedy`], [`bsp`]),
//! * worst-case scenario computation ([`adversary`]),
//! * robust leader solvers, a 2-approximation, exact enumeration and an
//!   algorithm polynomial for a fixed number of scenarios ([`leader`]),
//! * an exact piecewise-linear-function algebra ([`plf`]) and continuous
//!   variants of all of the above ([`continuous`]),
//! * the robust bilevel continuous knapsack problem ([`knapsack`]),
//! * brute-force reference implementations ([`oracle`]).
//!
//! All arithmetic is exact over the rationals. The crate is `no_std` and
//! only needs `alloc`.
#![no_std]
extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod adversary;
pub mod bsp;
pub mod continuous;
pub mod error;
pub mod fixtures;
pub mod greedy;
pub mod knapsack;
pub mod leader;
pub mod model;
pub mod normalize;
pub mod oracle;
pub mod plf;
pub mod rational;
pub mod uncertainty;

pub use error::{Error, Result};
pub use model::{CostMap, Instance, ItemId, ItemSet, Policy, Scenario};
pub use rational::Rational;
pub use uncertainty::{DuSet, IntervalSet, UncertaintySet};
