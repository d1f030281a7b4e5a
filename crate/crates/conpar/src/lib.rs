//! Qualitative analysis of two-player concurrent stochastic parity games
//! under bounded-rationality strategy classes.
//!
//! Both players pick actions simultaneously; the joint action selects a
//! probability distribution over successor states. Player 1 tries to make the
//! maximum priority visited infinitely often even, player 2 odd. The library
//! computes, per strategy class, the states from which player 1 wins:
//!
//! - `P-M`: pure memoryless strategies (via a turn-based reduction),
//! - `U-M`: uniform memoryless strategies (nested fixpoint expressions),
//! - `FP-M(b)`: b-finite-precision memoryless strategies (turn-based reduction),
//! - `IP-M-limit`: limit-sure winning with infinite-precision memoryless
//!   strategies (fixpoint expressions over limit predecessor operators).
//!
//! Almost-sure winning asks for probability 1; limit-sure winning asks for
//! probability `1 - eps` for every `eps > 0` (the witness strategy may depend
//! on `eps`). All qualitative answers depend only on transition supports, not
//! on the precise probabilities.
//!
//! Alongside the solvers the library extracts witness strategies (uniform
//! supports for almost-sure, action-rank families instantiable at any `eps`
//! for limit-sure), verifies them through the player-2 decision process they
//! induce, and cross-checks everything against brute-force oracles on small
//! instances.
//!
//! Entry points:
//!
//! - [`game::ConcurrentGame`]: parse/serialize/generate game instances.
//! - [`mucalc::eval_formula`]: evaluate a winning-set expression.
//! - [`reduce::solve_class`]: decide the pure and finite-precision classes.
//! - [`strategy::extract_uniform_almost`] / [`strategy::extract_limit_eps`]:
//!   witness strategies.
//! - [`oracle::run_differential`]: randomized cross-validation harness.
//!
//! The `examples/` directory of this crate holds one runnable program per
//! capability; `conpar` (the single binary) exposes the same pipeline as
//! subcommands.

pub mod error;
pub mod game;
pub mod mdp;
pub mod mucalc;
pub mod oracle;
pub mod pred;
pub mod reduce;
pub mod stateset;
pub mod strategy;

pub use error::Error;
pub use game::{CaseForm, CaseTag, ConcurrentGame, SuccessorDist};
pub use stateset::StateSet;
