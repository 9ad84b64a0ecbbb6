use core::fmt;

use alloc::collections::BTreeSet;
use alloc::vec::Vec;

use super::ir::{Instr, RationalProgram, Var};

/// A single reason a program fails to be a rational program.
///
/// Opcode admissibility is enforced by the instruction type itself: there is
/// no general division, only the integer-part forms.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Violation {
    UndeclaredFreeVariable(Var),
    InputAssigned { at: usize, var: Var },
    UnusedInput(Var),
    DuplicateInput(Var),
    OutputIsInput(Var),
    JumpOutOfRange { at: usize, target: usize },
    MissingHalt,
    MultipleHalts(usize),
    HaltNamesWrongVariable { at: usize, var: Var },
    BranchOnNonComparison { at: usize, var: Var },
    FallsOffEnd,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::UndeclaredFreeVariable(v) => write!(f, "undeclared free variable `{v}`"),
            Violation::InputAssigned { at, var } => {
                write!(f, "instruction {at} assigns input `{var}`")
            }
            Violation::UnusedInput(v) => write!(f, "declared input `{v}` never occurs"),
            Violation::DuplicateInput(v) => write!(f, "input `{v}` declared twice"),
            Violation::OutputIsInput(v) => write!(f, "output `{v}` is also an input"),
            Violation::JumpOutOfRange { at, target } => {
                write!(f, "instruction {at} jumps to out-of-range index {target}")
            }
            Violation::MissingHalt => f.write_str("no halt_return instruction"),
            Violation::MultipleHalts(n) => write!(f, "{n} halt_return instructions, expected 1"),
            Violation::HaltNamesWrongVariable { at, var } => {
                write!(f, "halt_return at {at} returns `{var}`, not the declared output")
            }
            Violation::BranchOnNonComparison { at, var } => {
                write!(f, "branch_if at {at} tests `{var}`, which is not a comparison result")
            }
            Violation::FallsOffEnd => f.write_str("control can fall off the end of the body"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
    /// Non-fatal: some literal is not an integer, so integer inputs may
    /// still produce a non-integer output.
    pub may_be_non_integer: bool,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

pub fn validate(program: &RationalProgram) -> ValidationReport {
    let mut violations = Vec::new();
    let body = &program.body;

    let mut declared = BTreeSet::new();
    for x in &program.inputs {
        if !declared.insert(x) {
            violations.push(Violation::DuplicateInput(x.clone()));
        }
    }
    if declared.contains(&program.output) {
        violations.push(Violation::OutputIsInput(program.output.clone()));
    }

    let mut assigned = BTreeSet::new();
    let mut occurring = BTreeSet::new();
    for (at, instr) in body.iter().enumerate() {
        if let Some(dst) = instr.target() {
            if declared.contains(dst) {
                violations.push(Violation::InputAssigned {
                    at,
                    var: dst.clone(),
                });
            }
            assigned.insert(dst);
            occurring.insert(dst);
        }
        occurring.extend(instr.reads());
    }
    for v in &occurring {
        if !assigned.contains(v) && !declared.contains(v) {
            violations.push(Violation::UndeclaredFreeVariable((*v).clone()));
        }
    }
    for x in &program.inputs {
        if !occurring.contains(x) {
            violations.push(Violation::UnusedInput(x.clone()));
        }
    }

    let mut halts = 0;
    for (at, instr) in body.iter().enumerate() {
        for target in instr.jump_targets() {
            if target >= body.len() {
                violations.push(Violation::JumpOutOfRange { at, target });
            }
        }
        match instr {
            Instr::HaltReturn { var } => {
                halts += 1;
                if *var != program.output {
                    violations.push(Violation::HaltNamesWrongVariable {
                        at,
                        var: var.clone(),
                    });
                }
            }
            Instr::BranchIf { cond, .. } => {
                let defs: Vec<_> = body.iter().filter(|i| i.target() == Some(cond)).collect();
                let from_cmp = !defs.is_empty()
                    && defs.iter().all(|i| match i {
                        Instr::Binary { op, .. } => op.opcode().is_comparison(),
                        _ => false,
                    });
                if !from_cmp {
                    violations.push(Violation::BranchOnNonComparison {
                        at,
                        var: cond.clone(),
                    });
                }
            }
            _ => {}
        }
    }
    match halts {
        0 => violations.push(Violation::MissingHalt),
        1 => {}
        n => violations.push(Violation::MultipleHalts(n)),
    }
    if body.last().is_some_and(|i| !i.is_terminator()) {
        violations.push(Violation::FallsOffEnd);
    }

    let may_be_non_integer = program.literals().any(|r| !r.is_integer());

    ValidationReport {
        violations,
        may_be_non_integer,
    }
}
