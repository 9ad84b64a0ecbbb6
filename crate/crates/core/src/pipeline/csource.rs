//! C translation of a rational program.
//!
//! Lowering: when every literal is an integer in `int64_t` range the
//! program is translated over `int64_t`, otherwise over `double`. Variables
//! become locals `v0, v1, ...` in order of first appearance (inputs first),
//! instruction indices that are jump targets become labels `L<idx>`, and
//! the halt becomes `return`. Integer-part operations call static helpers:
//! over `int64_t` they correct C's truncating `/` for operands of mixed
//! sign, over `double` they use `floor` and `ceil`. Comparisons yield 1 or
//! 0. Division by zero and `int64_t` overflow are not checked. With
//! `-DRP_MAIN` the unit gets a `main` that reads one input tuple per line
//! from stdin and prints one result per line.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt::Write;

use crate::ratir::{BinOp, Instr, Operand, RationalProgram, UnaryOp, Var};
use crate::Rational;

/// Name of the generated entry function.
pub const C_ENTRY: &str = "rp_eval";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CLowering {
    Int64,
    Double,
}

impl CLowering {
    fn c_type(self) -> &'static str {
        match self {
            CLowering::Int64 => "int64_t",
            CLowering::Double => "double",
        }
    }
}

fn as_i64(r: &Rational) -> Option<i64> {
    r.to_i64().filter(|&n| n != i64::MIN)
}

pub fn c_lowering(rp: &RationalProgram) -> CLowering {
    if rp.literals().all(|r| as_i64(r).is_some()) {
        CLowering::Int64
    } else {
        CLowering::Double
    }
}

fn helper(op: BinOp, ty: CLowering) -> (&'static str, &'static str) {
    match (op, ty) {
        (BinOp::FloorDiv, CLowering::Int64) => (
            "rp_floor_div",
            "static int64_t rp_floor_div(int64_t a, int64_t b) {\n    int64_t q = a / b;\n    if (a % b != 0 && ((a < 0) != (b < 0))) q -= 1;\n    return q;\n}\n",
        ),
        (BinOp::CeilDiv, CLowering::Int64) => (
            "rp_ceil_div",
            "static int64_t rp_ceil_div(int64_t a, int64_t b) {\n    int64_t q = a / b;\n    if (a % b != 0 && ((a < 0) == (b < 0))) q += 1;\n    return q;\n}\n",
        ),
        (BinOp::EuclidQuot | BinOp::EuclidRem, CLowering::Int64) => (
            "rp_euclid_quot",
            "static int64_t rp_euclid_quot(int64_t a, int64_t b) {\n    int64_t q = a / b;\n    if (a % b < 0) q = b > 0 ? q - 1 : q + 1;\n    return q;\n}\n",
        ),
        (BinOp::FloorDiv, CLowering::Double) => (
            "rp_floor_div",
            "static double rp_floor_div(double a, double b) { return floor(a / b); }\n",
        ),
        (BinOp::CeilDiv, CLowering::Double) => (
            "rp_ceil_div",
            "static double rp_ceil_div(double a, double b) { return ceil(a / b); }\n",
        ),
        (_, CLowering::Double) => (
            "rp_euclid_quot",
            "static double rp_euclid_quot(double a, double b) { return b < 0 ? ceil(a / b) : floor(a / b); }\n",
        ),
        (_, CLowering::Int64) => unreachable!("only integer-part operations have helpers"),
    }
}

struct Names<'a> {
    index: BTreeMap<&'a Var, usize>,
    order: Vec<&'a Var>,
}

impl<'a> Names<'a> {
    fn new(rp: &'a RationalProgram) -> Self {
        let mut n = Names {
            index: BTreeMap::new(),
            order: Vec::new(),
        };
        for v in &rp.inputs {
            n.add(v);
        }
        for i in &rp.body {
            for v in i.target().into_iter().chain(i.reads()) {
                n.add(v);
            }
        }
        n
    }

    fn add(&mut self, v: &'a Var) {
        if !self.index.contains_key(v) {
            self.index.insert(v, self.order.len());
            self.order.push(v);
        }
    }

    fn of(&self, v: &Var) -> usize {
        self.index[v]
    }
}

fn literal(r: &Rational, ty: CLowering) -> String {
    match ty {
        CLowering::Int64 => alloc::format!("INT64_C({})", as_i64(r).expect("checked by c_lowering")),
        CLowering::Double => {
            let x = r.to_f64();
            if x < 0.0 {
                alloc::format!("({x:e})")
            } else {
                alloc::format!("{x:e}")
            }
        }
    }
}

/// Self-contained C source for `rp`, which should validate.
pub fn emit_c_source(rp: &RationalProgram) -> String {
    let ty = c_lowering(rp);
    let t = ty.c_type();
    let names = Names::new(rp);
    let operand = |o: &Operand| match o {
        Operand::Var(v) => alloc::format!("v{}", names.of(v)),
        Operand::Lit(r) => literal(r, ty),
    };

    let mut helpers: BTreeMap<&str, &str> = BTreeMap::new();
    let mut targets = BTreeSet::new();
    for i in &rp.body {
        if let Instr::Binary { op, .. } = i {
            if matches!(op, BinOp::FloorDiv | BinOp::CeilDiv | BinOp::EuclidQuot | BinOp::EuclidRem) {
                let (name, code) = helper(*op, ty);
                helpers.insert(name, code);
            }
        }
        targets.extend(i.jump_targets());
    }

    let mut out = String::new();
    out.push_str("/* rational program lowered to C */\n#include <stdint.h>\n");
    if ty == CLowering::Double {
        out.push_str("#include <math.h>\n");
    }
    out.push_str("#ifdef RP_MAIN\n#include <stdio.h>\n#endif\n\n");
    for code in helpers.values() {
        out.push_str(code);
        out.push('\n');
    }

    let params: Vec<String> = rp
        .inputs
        .iter()
        .map(|v| alloc::format!("{t} v{}", names.of(v)))
        .collect();
    let params = if params.is_empty() { String::from("void") } else { params.join(", ") };
    let _ = writeln!(out, "{t} {C_ENTRY}({params}) {{");
    for v in &rp.inputs {
        let _ = writeln!(out, "    /* v{} = {v} */", names.of(v));
    }
    for (k, v) in names.order.iter().enumerate().skip(rp.inputs.len()) {
        let _ = writeln!(out, "    {t} v{k} = 0; /* {v} */");
    }
    for (idx, instr) in rp.body.iter().enumerate() {
        if targets.contains(&idx) {
            let _ = writeln!(out, "L{idx}:;");
        }
        let line = match instr {
            Instr::Unary { op, dst, src } => {
                let sign = if *op == UnaryOp::Neg { "-" } else { "" };
                alloc::format!("v{} = {sign}{};", names.of(dst), operand(src))
            }
            Instr::Binary { op, dst, lhs, rhs } => {
                let (a, b) = (operand(lhs), operand(rhs));
                let d = names.of(dst);
                match op {
                    BinOp::Add => alloc::format!("v{d} = {a} + {b};"),
                    BinOp::Sub => alloc::format!("v{d} = {a} - {b};"),
                    BinOp::Mul => alloc::format!("v{d} = {a} * {b};"),
                    BinOp::FloorDiv => alloc::format!("v{d} = rp_floor_div({a}, {b});"),
                    BinOp::CeilDiv => alloc::format!("v{d} = rp_ceil_div({a}, {b});"),
                    BinOp::EuclidQuot => alloc::format!("v{d} = rp_euclid_quot({a}, {b});"),
                    BinOp::EuclidRem => alloc::format!("v{d} = {a} - rp_euclid_quot({a}, {b}) * {b};"),
                    BinOp::CmpEq => alloc::format!("v{d} = ({a} == {b}) ? 1 : 0;"),
                    BinOp::CmpLt => alloc::format!("v{d} = ({a} < {b}) ? 1 : 0;"),
                }
            }
            Instr::BranchIf {
                cond,
                then_to,
                else_to,
            } => alloc::format!("if (v{} != 0) goto L{then_to}; else goto L{else_to};", names.of(cond)),
            Instr::Jump { to } => alloc::format!("goto L{to};"),
            Instr::HaltReturn { var } => alloc::format!("return v{};", names.of(var)),
        };
        let _ = writeln!(out, "    {line}");
    }
    out.push_str("}\n\n#ifdef RP_MAIN\nint main(void) {\n");
    let n = rp.inputs.len();
    let (scan, print, cast) = match ty {
        CLowering::Int64 => ("%lld", "%lld\\n", "(long long)"),
        CLowering::Double => ("%lf", "%.17g\\n", ""),
    };
    let read_ty = if ty == CLowering::Int64 { "long long" } else { "double" };
    if n == 0 {
        let _ = writeln!(out, "    printf(\"{print}\", {cast}{C_ENTRY}());\n    return 0;");
    } else {
        let _ = writeln!(out, "    {read_ty} x[{n}];\n    for (;;) {{");
        let _ = writeln!(out, "        for (int i = 0; i < {n}; i++)\n            if (scanf(\"{scan}\", &x[i]) != 1) return 0;");
        let args: Vec<String> = (0..n).map(|i| alloc::format!("({t})x[{i}]")).collect();
        let _ = writeln!(out, "        printf(\"{print}\", {cast}{C_ENTRY}({}));\n    }}", args.join(", "));
    }
    out.push_str("}\n#endif\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ratir::parse;

    #[test]
    fn floor_div_lowering() {
        let rp = parse("inputs: A B\noutput: Q\n0: floor_div Q A B\n1: halt_return Q\n").unwrap();
        let c = emit_c_source(&rp);
        assert_eq!(c_lowering(&rp), CLowering::Int64);
        assert_eq!(c.matches(" / ").count(), 1);
        assert!(c.contains("((a < 0) != (b < 0))"));
        assert!(c.contains("int64_t rp_eval(int64_t v0, int64_t v1)"));
        assert_eq!(c, emit_c_source(&rp));
    }

    #[test]
    fn fractional_literals_use_double() {
        let rp = parse("inputs: X\noutput: Y\n0: mul Y X -1/4\n1: halt_return Y\n").unwrap();
        assert_eq!(c_lowering(&rp), CLowering::Double);
        assert!(emit_c_source(&rp).contains("v1 = v0 * (-2.5e-1);"));
    }
}
