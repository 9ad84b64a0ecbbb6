use alloc::format;
use alloc::vec::Vec;

use super::ir::{BinOp, Instr, Operand, RationalProgram, UnaryOp, Var};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Label(usize);

/// Incremental construction of a rational program with symbolic jump labels
/// and fresh temporaries.
#[derive(Debug, Default)]
pub struct ProgramBuilder {
    inputs: Vec<Var>,
    body: Vec<Instr>,
    labels: Vec<Option<usize>>,
    temps: usize,
}

impl ProgramBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn input(&mut self, name: &str) -> Operand {
        let v = Var::new(name);
        if !self.inputs.contains(&v) {
            self.inputs.push(v.clone());
        }
        Operand::Var(v)
    }

    pub fn fresh(&mut self, hint: &str) -> Var {
        self.temps += 1;
        Var::new(format!("{hint}_{}", self.temps))
    }

    pub fn assign(&mut self, dst: &Var, src: Operand) {
        self.body.push(Instr::Unary {
            op: UnaryOp::Assign,
            dst: dst.clone(),
            src,
        });
    }

    pub fn neg(&mut self, src: Operand) -> Operand {
        let dst = self.fresh("t");
        self.body.push(Instr::Unary {
            op: UnaryOp::Neg,
            dst: dst.clone(),
            src,
        });
        Operand::Var(dst)
    }

    pub fn bin_into(&mut self, op: BinOp, dst: &Var, lhs: Operand, rhs: Operand) {
        self.body.push(Instr::Binary {
            op,
            dst: dst.clone(),
            lhs,
            rhs,
        });
    }

    pub fn bin(&mut self, op: BinOp, lhs: Operand, rhs: Operand) -> Operand {
        let hint = if op.opcode().is_comparison() { "c" } else { "t" };
        let dst = self.fresh(hint);
        self.bin_into(op, &dst, lhs, rhs);
        Operand::Var(dst)
    }

    pub fn cmp(&mut self, op: BinOp, lhs: Operand, rhs: Operand) -> Var {
        debug_assert!(op.opcode().is_comparison());
        let dst = self.fresh("c");
        self.bin_into(op, &dst, lhs, rhs);
        dst
    }

    pub fn label(&mut self) -> Label {
        self.labels.push(None);
        Label(self.labels.len() - 1)
    }

    pub fn place(&mut self, label: Label) {
        debug_assert!(self.labels[label.0].is_none(), "label placed twice");
        self.labels[label.0] = Some(self.body.len());
    }

    pub fn branch(&mut self, cond: Var, then_to: Label, else_to: Label) {
        self.body.push(Instr::BranchIf {
            cond,
            then_to: then_to.0,
            else_to: else_to.0,
        });
    }

    pub fn jump(&mut self, to: Label) {
        self.body.push(Instr::Jump { to: to.0 });
    }

    pub fn halt(&mut self, var: &Var) {
        self.body.push(Instr::HaltReturn { var: var.clone() });
    }

    /// `min(a, b)` as a compare-and-branch diamond.
    pub fn min(&mut self, a: Operand, b: Operand) -> Operand {
        let r = self.fresh("min");
        let c = self.cmp(BinOp::CmpLt, b.clone(), a.clone());
        let (take_b, take_a, done) = (self.label(), self.label(), self.label());
        self.branch(c, take_b, take_a);
        self.place(take_b);
        self.assign(&r, b);
        self.jump(done);
        self.place(take_a);
        self.assign(&r, a);
        self.place(done);
        Operand::Var(r)
    }

    pub fn len(&self) -> usize {
        self.body.len()
    }

    pub fn is_empty(&self) -> bool {
        self.body.is_empty()
    }

    /// Resolves labels. Panics on a label that was referenced but never placed.
    pub fn finish(self, output: Var) -> RationalProgram {
        let resolve = |l: usize| self.labels[l].expect("unplaced label");
        let body = self
            .body
            .iter()
            .cloned()
            .map(|i| match i {
                Instr::BranchIf {
                    cond,
                    then_to,
                    else_to,
                } => Instr::BranchIf {
                    cond,
                    then_to: resolve(then_to),
                    else_to: resolve(else_to),
                },
                Instr::Jump { to } => Instr::Jump { to: resolve(to) },
                other => other,
            })
            .collect();
        RationalProgram::new(self.inputs, output, body)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ratir::interp::{evaluate, Bindings};
    use crate::ratir::validate::validate;
    use crate::rational::Rational;

    #[test]
    fn min_diamond_evaluates() {
        let mut b = ProgramBuilder::new();
        let x = b.input("X");
        let y = b.input("Y");
        let m = b.min(x, y);
        let out = Var::new("M");
        b.assign(&out, m);
        b.halt(&out);
        let p = b.finish(out);
        assert!(validate(&p).is_valid(), "{:?}", validate(&p).violations);
        for (x, y) in [(3, 5), (5, 3), (4, 4), (-2, 1)] {
            let env: Bindings = [("X", x), ("Y", y)]
                .into_iter()
                .map(|(k, v)| (Var::new(k), Rational::from_integer(v)))
                .collect();
            assert_eq!(evaluate(&p, &env, 100).unwrap(), x.min(y));
        }
    }
}
