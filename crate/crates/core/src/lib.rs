//! Shadow sequences: run nonlinear integer recurrences over dual numbers
//! `a + αε` (`ε² = 0`) and study the ε-components they produce, including
//! the shadow of the Markov-number tree.

pub mod arith;
pub mod cli;
pub mod markov;
pub mod matching;
pub mod oracles;
pub mod recurrence;
pub mod verify;

pub use arith::{ArithError, BigRational, DualRational};
pub use markov::{generate_tree, markov_mutate, MarkovNode, MarkovTree, MarkovTriple, Side};
pub use recurrence::{parse_recurrence, run_convolution, run_window, shadow_of, RecurrenceSpec, SequenceRun};
