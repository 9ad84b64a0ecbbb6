//! Rational programs: a three-address IR whose only arithmetic is exact
//! rational `+ - *`, comparisons and integer-part division forms.
//!
//! Comparison results are ordinary variables holding `0/1` or `1/1`, and
//! `branch_if` transfers control when its condition is nonzero.

pub mod builder;
pub mod cfg;
pub mod interp;
pub mod ir;
pub mod text;
pub mod validate;

pub use builder::{Label, ProgramBuilder};
pub use cfg::{build_cfg, BasicBlock, Cfg, InvalidProgram};
pub use interp::{evaluate, evaluate_traced, Bindings, EvalError, Trace, DEFAULT_STEP_LIMIT};
pub use ir::{BinOp, Instr, Opcode, Operand, RationalProgram, UnaryOp, Var};
pub use text::{parse, serialize, ParseError};
pub use validate::{validate, ValidationReport, Violation};
