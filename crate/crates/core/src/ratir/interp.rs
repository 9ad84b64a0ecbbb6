use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use super::ir::{BinOp, Instr, Operand, RationalProgram, UnaryOp, Var};
use crate::rational::Rational;

pub const DEFAULT_STEP_LIMIT: u64 = 1_000_000;

pub type Bindings = BTreeMap<Var, Rational>;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum EvalError {
    #[error("no binding supplied for input `{0}`")]
    MissingBinding(Var),
    #[error("step limit of {0} instructions exceeded")]
    StepLimitExceeded(u64),
    #[error("division by zero at instruction {at}")]
    DivisionByZero { at: usize },
    #[error("instruction {at} reads `{var}` before it is assigned")]
    UndefinedVariable { at: usize, var: Var },
    #[error("control left the body at instruction {at}")]
    FellOffEnd { at: usize },
    #[error("step limit must be at least 1")]
    ZeroStepLimit,
}

/// Result of an execution together with its branch outcomes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Trace {
    pub value: Rational,
    pub branches: Vec<bool>,
    pub steps: u64,
}

pub fn evaluate(
    program: &RationalProgram,
    bindings: &Bindings,
    step_limit: u64,
) -> Result<Rational, EvalError> {
    evaluate_traced(program, bindings, step_limit).map(|t| t.value)
}

pub fn evaluate_traced(
    program: &RationalProgram,
    bindings: &Bindings,
    step_limit: u64,
) -> Result<Trace, EvalError> {
    if step_limit == 0 {
        return Err(EvalError::ZeroStepLimit);
    }
    let mut env: BTreeMap<&Var, Rational> = BTreeMap::new();
    for x in &program.inputs {
        let value = bindings
            .get(x)
            .ok_or_else(|| EvalError::MissingBinding(x.clone()))?;
        env.insert(x, value.clone());
    }

    let mut branches = Vec::new();
    let mut pc = 0usize;
    let mut steps = 0u64;
    loop {
        if steps == step_limit {
            return Err(EvalError::StepLimitExceeded(step_limit));
        }
        steps += 1;
        let instr = program
            .body
            .get(pc)
            .ok_or(EvalError::FellOffEnd { at: pc })?;
        let at = pc;
        let read = |env: &BTreeMap<&Var, Rational>, v: &Var| {
            env.get(v).cloned().ok_or_else(|| EvalError::UndefinedVariable {
                at,
                var: v.clone(),
            })
        };
        let value_of = |env: &BTreeMap<&Var, Rational>, o: &Operand| match o {
            Operand::Lit(r) => Ok(r.clone()),
            Operand::Var(v) => read(env, v),
        };
        match instr {
            Instr::Unary { op, dst, src } => {
                let x = value_of(&env, src)?;
                let y = match op {
                    UnaryOp::Assign => x,
                    UnaryOp::Neg => -x,
                };
                env.insert(dst, y);
                pc += 1;
            }
            Instr::Binary { op, dst, lhs, rhs } => {
                let a = value_of(&env, lhs)?;
                let b = value_of(&env, rhs)?;
                let div0 = EvalError::DivisionByZero { at };
                let y = match op {
                    BinOp::Add => &a + &b,
                    BinOp::Sub => &a - &b,
                    BinOp::Mul => &a * &b,
                    BinOp::EuclidQuot => a.euclid_quot(&b).ok_or(div0)?,
                    BinOp::EuclidRem => a.euclid_rem(&b).ok_or(div0)?,
                    BinOp::FloorDiv => a.floor_div(&b).ok_or(div0)?,
                    BinOp::CeilDiv => a.ceil_div(&b).ok_or(div0)?,
                    BinOp::CmpEq => Rational::from_bool(a == b),
                    BinOp::CmpLt => Rational::from_bool(a < b),
                };
                env.insert(dst, y);
                pc += 1;
            }
            Instr::BranchIf {
                cond,
                then_to,
                else_to,
            } => {
                let taken = !read(&env, cond)?.is_zero();
                branches.push(taken);
                pc = if taken { *then_to } else { *else_to };
            }
            Instr::Jump { to } => pc = *to,
            Instr::HaltReturn { var } => {
                return Ok(Trace {
                    value: read(&env, var)?,
                    branches,
                    steps,
                });
            }
        }
    }
}
