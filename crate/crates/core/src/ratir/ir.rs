use core::fmt;

use alloc::string::String;
use alloc::vec::Vec;

use crate::rational::Rational;

/// A program variable. Names start with a letter or `_` and continue with
/// alphanumerics, `_` or `.`.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Var(String);

impl Var {
    pub fn new(name: impl Into<String>) -> Self {
        Var(name.into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }

    pub fn is_valid_name(name: &str) -> bool {
        let mut chars = name.chars();
        match chars.next() {
            Some(c) if c.is_ascii_alphabetic() || c == '_' => {}
            _ => return false,
        }
        chars.all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '.')
    }
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl fmt::Debug for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl From<&str> for Var {
    fn from(s: &str) -> Self {
        Var::new(s)
    }
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub enum Operand {
    Var(Var),
    Lit(Rational),
}

impl Operand {
    pub fn var(name: &str) -> Self {
        Operand::Var(Var::new(name))
    }

    pub fn int(n: i64) -> Self {
        Operand::Lit(Rational::from_integer(n))
    }

    pub fn as_var(&self) -> Option<&Var> {
        match self {
            Operand::Var(v) => Some(v),
            Operand::Lit(_) => None,
        }
    }
}

impl From<Var> for Operand {
    fn from(v: Var) -> Self {
        Operand::Var(v)
    }
}

impl From<Rational> for Operand {
    fn from(r: Rational) -> Self {
        Operand::Lit(r)
    }
}

impl fmt::Display for Operand {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Operand::Var(v) => write!(f, "{v}"),
            Operand::Lit(r) => write!(f, "{r}"),
        }
    }
}

/// Every opcode admitted in a rational program.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Hash, PartialOrd, Ord)]
pub enum Opcode {
    Assign,
    Neg,
    Add,
    Sub,
    Mul,
    EuclidQuot,
    EuclidRem,
    FloorDiv,
    CeilDiv,
    CmpEq,
    CmpLt,
    BranchIf,
    Jump,
    HaltReturn,
}

impl Opcode {
    pub const ALL: [Opcode; 14] = [
        Opcode::Assign,
        Opcode::Neg,
        Opcode::Add,
        Opcode::Sub,
        Opcode::Mul,
        Opcode::EuclidQuot,
        Opcode::EuclidRem,
        Opcode::FloorDiv,
        Opcode::CeilDiv,
        Opcode::CmpEq,
        Opcode::CmpLt,
        Opcode::BranchIf,
        Opcode::Jump,
        Opcode::HaltReturn,
    ];

    pub fn mnemonic(self) -> &'static str {
        match self {
            Opcode::Assign => "assign",
            Opcode::Neg => "neg",
            Opcode::Add => "add",
            Opcode::Sub => "sub",
            Opcode::Mul => "mul",
            Opcode::EuclidQuot => "euclid_quot",
            Opcode::EuclidRem => "euclid_rem",
            Opcode::FloorDiv => "floor_div",
            Opcode::CeilDiv => "ceil_div",
            Opcode::CmpEq => "cmp_eq",
            Opcode::CmpLt => "cmp_lt",
            Opcode::BranchIf => "branch_if",
            Opcode::Jump => "jump",
            Opcode::HaltReturn => "halt_return",
        }
    }

    pub fn from_mnemonic(s: &str) -> Option<Opcode> {
        Opcode::ALL.into_iter().find(|op| op.mnemonic() == s)
    }

    pub fn is_comparison(self) -> bool {
        matches!(self, Opcode::CmpEq | Opcode::CmpLt)
    }

    /// Integer-part operations (the only division forms allowed).
    pub fn is_integer_part(self) -> bool {
        matches!(
            self,
            Opcode::EuclidQuot | Opcode::EuclidRem | Opcode::FloorDiv | Opcode::CeilDiv
        )
    }
}

impl fmt::Display for Opcode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.mnemonic())
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum UnaryOp {
    Assign,
    Neg,
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    EuclidQuot,
    EuclidRem,
    FloorDiv,
    CeilDiv,
    CmpEq,
    CmpLt,
}

impl UnaryOp {
    pub fn opcode(self) -> Opcode {
        match self {
            UnaryOp::Assign => Opcode::Assign,
            UnaryOp::Neg => Opcode::Neg,
        }
    }
}

impl BinOp {
    pub fn opcode(self) -> Opcode {
        match self {
            BinOp::Add => Opcode::Add,
            BinOp::Sub => Opcode::Sub,
            BinOp::Mul => Opcode::Mul,
            BinOp::EuclidQuot => Opcode::EuclidQuot,
            BinOp::EuclidRem => Opcode::EuclidRem,
            BinOp::FloorDiv => Opcode::FloorDiv,
            BinOp::CeilDiv => Opcode::CeilDiv,
            BinOp::CmpEq => Opcode::CmpEq,
            BinOp::CmpLt => Opcode::CmpLt,
        }
    }

    pub fn from_opcode(op: Opcode) -> Option<BinOp> {
        Some(match op {
            Opcode::Add => BinOp::Add,
            Opcode::Sub => BinOp::Sub,
            Opcode::Mul => BinOp::Mul,
            Opcode::EuclidQuot => BinOp::EuclidQuot,
            Opcode::EuclidRem => BinOp::EuclidRem,
            Opcode::FloorDiv => BinOp::FloorDiv,
            Opcode::CeilDiv => BinOp::CeilDiv,
            Opcode::CmpEq => BinOp::CmpEq,
            Opcode::CmpLt => BinOp::CmpLt,
            _ => return None,
        })
    }
}

/// One three-address instruction. Branches name both successors explicitly.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum Instr {
    Unary {
        op: UnaryOp,
        dst: Var,
        src: Operand,
    },
    Binary {
        op: BinOp,
        dst: Var,
        lhs: Operand,
        rhs: Operand,
    },
    /// Transfers to `then_to` when `cond` is nonzero, otherwise to `else_to`.
    BranchIf {
        cond: Var,
        then_to: usize,
        else_to: usize,
    },
    Jump {
        to: usize,
    },
    HaltReturn {
        var: Var,
    },
}

impl Instr {
    pub fn opcode(&self) -> Opcode {
        match self {
            Instr::Unary { op, .. } => op.opcode(),
            Instr::Binary { op, .. } => op.opcode(),
            Instr::BranchIf { .. } => Opcode::BranchIf,
            Instr::Jump { .. } => Opcode::Jump,
            Instr::HaltReturn { .. } => Opcode::HaltReturn,
        }
    }

    pub fn target(&self) -> Option<&Var> {
        match self {
            Instr::Unary { dst, .. } | Instr::Binary { dst, .. } => Some(dst),
            _ => None,
        }
    }

    pub fn operands(&self) -> Vec<&Operand> {
        match self {
            Instr::Unary { src, .. } => alloc::vec![src],
            Instr::Binary { lhs, rhs, .. } => alloc::vec![lhs, rhs],
            _ => Vec::new(),
        }
    }

    /// Variables this instruction reads.
    pub fn reads(&self) -> Vec<&Var> {
        match self {
            Instr::BranchIf { cond, .. } => alloc::vec![cond],
            Instr::HaltReturn { var } => alloc::vec![var],
            _ => self.operands().into_iter().filter_map(Operand::as_var).collect(),
        }
    }

    pub fn jump_targets(&self) -> Vec<usize> {
        match self {
            Instr::BranchIf {
                then_to, else_to, ..
            } => alloc::vec![*then_to, *else_to],
            Instr::Jump { to } => alloc::vec![*to],
            _ => Vec::new(),
        }
    }

    pub fn is_terminator(&self) -> bool {
        matches!(
            self,
            Instr::BranchIf { .. } | Instr::Jump { .. } | Instr::HaltReturn { .. }
        )
    }

    pub(crate) fn shift_targets(&mut self, by: usize) {
        match self {
            Instr::BranchIf {
                then_to, else_to, ..
            } => {
                *then_to += by;
                *else_to += by;
            }
            Instr::Jump { to } => *to += by,
            _ => {}
        }
    }
}

/// A rational program in its inputs evaluating `output`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct RationalProgram {
    pub inputs: Vec<Var>,
    pub output: Var,
    pub body: Vec<Instr>,
}

impl RationalProgram {
    pub fn new(inputs: Vec<Var>, output: Var, body: Vec<Instr>) -> Self {
        RationalProgram {
            inputs,
            output,
            body,
        }
    }

    pub fn len(&self) -> usize {
        self.body.len()
    }

    pub fn is_empty(&self) -> bool {
        self.body.is_empty()
    }

    /// Every literal appearing in the body.
    pub fn literals(&self) -> impl Iterator<Item = &Rational> {
        self.body.iter().flat_map(|i| {
            i.operands().into_iter().filter_map(|o| match o {
                Operand::Lit(r) => Some(r),
                Operand::Var(_) => None,
            })
        })
    }

    /// Turns the given inputs into constants: they are dropped from `inputs`
    /// and assigned their literal values by a prologue.
    pub fn specialize(&self, bindings: &[(Var, Rational)]) -> RationalProgram {
        let bound = |v: &Var| bindings.iter().any(|(b, _)| b == v);
        let inputs = self.inputs.iter().filter(|v| !bound(v)).cloned().collect();
        let mut body: Vec<Instr> = bindings
            .iter()
            .filter(|(v, _)| self.inputs.contains(v))
            .map(|(v, value)| Instr::Unary {
                op: UnaryOp::Assign,
                dst: v.clone(),
                src: Operand::Lit(value.clone()),
            })
            .collect();
        let shift = body.len();
        body.extend(self.body.iter().cloned().map(|mut i| {
            i.shift_targets(shift);
            i
        }));
        RationalProgram {
            inputs,
            output: self.output.clone(),
            body,
        }
    }
}
