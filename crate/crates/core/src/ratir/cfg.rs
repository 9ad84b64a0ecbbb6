use core::ops::Range;

use alloc::collections::BTreeSet;
use alloc::vec::Vec;

use super::ir::{Instr, RationalProgram};
use super::validate::{validate, Violation};

/// Maximal branch-free instruction run `start..end` of the body.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BasicBlock {
    pub instrs: Range<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Cfg {
    pub blocks: Vec<BasicBlock>,
    /// Sorted, deduplicated `(from, to)` block pairs.
    pub edges: Vec<(usize, usize)>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("program is not a valid rational program ({} violations)", .0.len())]
pub struct InvalidProgram(pub Vec<Violation>);

impl Cfg {
    pub fn block_of(&self, instr: usize) -> Option<usize> {
        self.blocks.iter().position(|b| b.instrs.contains(&instr))
    }

    pub fn successors(&self, block: usize) -> impl Iterator<Item = usize> + '_ {
        self.edges
            .iter()
            .filter(move |(from, _)| *from == block)
            .map(|(_, to)| *to)
    }
}

pub fn build_cfg(program: &RationalProgram) -> Result<Cfg, InvalidProgram> {
    let report = validate(program);
    if !report.is_valid() {
        return Err(InvalidProgram(report.violations));
    }
    let body = &program.body;

    let mut leaders = BTreeSet::new();
    leaders.insert(0);
    for (i, instr) in body.iter().enumerate() {
        leaders.extend(instr.jump_targets());
        if instr.is_terminator() && i + 1 < body.len() {
            leaders.insert(i + 1);
        }
    }
    let starts: Vec<usize> = leaders.into_iter().collect();
    let blocks: Vec<BasicBlock> = starts
        .iter()
        .enumerate()
        .map(|(k, &s)| BasicBlock {
            instrs: s..starts.get(k + 1).copied().unwrap_or(body.len()),
        })
        .collect();
    let block_at = |instr: usize| starts.partition_point(|&s| s <= instr) - 1;

    let mut edges = BTreeSet::new();
    for (k, block) in blocks.iter().enumerate() {
        let last = block.instrs.end - 1;
        match &body[last] {
            Instr::HaltReturn { .. } => {}
            i @ (Instr::Jump { .. } | Instr::BranchIf { .. }) => {
                for t in i.jump_targets() {
                    edges.insert((k, block_at(t)));
                }
            }
            _ => {
                if k + 1 < blocks.len() {
                    edges.insert((k, k + 1));
                }
            }
        }
    }

    Ok(Cfg {
        blocks,
        edges: edges.into_iter().collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ratir::text::parse;

    #[test]
    fn straight_line_is_one_block() {
        let p = parse(
            "inputs: X\noutput: Y\n0: mul a X X\n1: add b a X\n2: sub c b 1\n\
             3: mul Y c 2\n4: halt_return Y\n",
        )
        .unwrap();
        let cfg = build_cfg(&p).unwrap();
        assert_eq!(cfg.blocks, [BasicBlock { instrs: 0..5 }]);
        assert!(cfg.edges.is_empty());
    }

    #[test]
    fn diamond() {
        let p = parse(
            "inputs: X\noutput: Y\n0: cmp_lt c X 0\n1: branch_if c -> 2 4\n\
             2: neg Y X\n3: jump -> 5\n4: assign Y X\n5: halt_return Y\n",
        )
        .unwrap();
        let cfg = build_cfg(&p).unwrap();
        assert_eq!(cfg.blocks.len(), 4);
        assert_eq!(cfg.edges, [(0, 1), (0, 2), (1, 3), (2, 3)]);
        assert_eq!(cfg.block_of(4), Some(2));
        assert_eq!(cfg.successors(0).collect::<Vec<_>>(), [1, 2]);
    }

    #[test]
    fn fallthrough_into_jump_target() {
        let p = parse(
            "inputs: X\noutput: Y\n0: cmp_lt c X 0\n1: branch_if c -> 3 2\n\
             2: neg X2 X\n3: assign Y X\n4: halt_return Y\n",
        )
        .unwrap();
        let cfg = build_cfg(&p).unwrap();
        assert_eq!(cfg.blocks.len(), 3);
        assert_eq!(cfg.edges, [(0, 1), (0, 2), (1, 2)]);
    }

    #[test]
    fn invalid_program_rejected() {
        let p = parse("inputs: X\noutput: Y\n0: add Y X Z\n1: halt_return Y\n").unwrap();
        let err = build_cfg(&p).unwrap_err();
        assert!(matches!(err.0[..], [Violation::UndeclaredFreeVariable(_)]));
    }
}
