//! Linear rank 2 non-idempotent intersection types for the λ-calculus:
//! sound-and-complete type inference, a quantitative variant whose index
//! tracks leftmost-outermost evaluation length, derivation checkers for
//! the plain and quantitative systems, a deterministic evaluator and a
//! validation harness comparing the two step counts.

pub mod cli;
pub mod deriv;
pub mod eval;
pub mod harness;
pub mod infer;
pub mod syntax;
pub mod types;
pub mod unify;

pub use eval::{lo_step, normalize, EvalOutcome};
pub use infer::{infer, infer_q, InferResult};
pub use syntax::Term;
pub use types::{LinType, Rank2Type, Seq, TypeEnv};
