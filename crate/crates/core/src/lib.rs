//! Two-way finite automata with quantum and classical states (2QCFA).
//!
//! The crate builds 2QCFA for several promise problems and language
//! recognition tasks, and analyses their runs exactly:
//!
//! * [`numerics`]: exact rationals, 5-adic amplitude vectors, rotation
//!   indices and certified intervals.
//! * [`automata`]: machine descriptions, validation and single steps.
//! * [`machines`]: builders for each family, machine intersection and
//!   the set-membership classifiers.
//! * [`engine`]: closed-form, truncated and sampled halting analyses.
//! * [`baselines`]: classical DFAs, distinguishability certificates and
//!   two-way lower-bound calculators.
//! * [`oracles`]: bounded checks of the number-theoretic lemmas.
//! * [`report`]: the size comparison table.
//!
//! ```
//! use qcfa::engine::{analyze_exact, EngineOptions};
//! use qcfa::machines::Family;
//! use qcfa::numerics::rat;
//!
//! let card = Family::Aeq(2).build(&rat(1, 4)).unwrap();
//! let s = analyze_exact(&card.machine, "aabb", &EngineOptions::default()).unwrap();
//! assert!(s.accept_prob().is_exact_one());
//! ```

pub mod automata;
pub mod baselines;
pub mod engine;
pub mod machines;
pub mod numerics;
pub mod oracles;
pub mod report;

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/numbers.md")]
    mod numbers {}
    #[doc = include_str!("../../../book/src/machines.md")]
    mod machines {}
    #[doc = include_str!("../../../book/src/engines.md")]
    mod engines {}
    #[doc = include_str!("../../../book/src/baselines.md")]
    mod baselines {}
    #[doc = include_str!("../../../book/src/oracles.md")]
    mod oracles {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
