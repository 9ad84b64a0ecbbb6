//! Line-oriented textual form of rational programs.
//!
//! ```text
//! # comment
//! inputs: A B
//! output: Q
//! 0: floor_div Q A B
//! 1: halt_return Q
//! ```
//!
//! Grammar (one item per line, `#` starts a comment anywhere):
//!
//! ```text
//! header  := "inputs:" VAR* | "output:" VAR
//! instr   := INDEX ":" body
//! body    := ("assign" | "neg") VAR operand
//!          | binop VAR operand operand
//!          | "branch_if" VAR "->" INDEX INDEX
//!          | "jump" "->" INDEX
//!          | "halt_return" VAR
//! binop   := "add" | "sub" | "mul" | "euclid_quot" | "euclid_rem"
//!          | "floor_div" | "ceil_div" | "cmp_eq" | "cmp_lt"
//! operand := VAR | LITERAL
//! LITERAL := "-"? DIGITS ("/" DIGITS)?
//! VAR     := [A-Za-z_][A-Za-z0-9_.]*
//! ```
//!
//! Both headers precede the body, instruction indices count up from 0, and
//! tokens are separated by ASCII whitespace. The serializer always writes
//! literals as `num/den` in lowest terms.

use core::fmt::{self, Write};

use alloc::string::{String, ToString};
use alloc::vec::Vec;

use super::ir::{BinOp, Instr, Opcode, Operand, RationalProgram, UnaryOp, Var};
use crate::rational::Rational;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("line {line}, column {column}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

pub fn serialize(program: &RationalProgram) -> String {
    let mut out = String::new();
    out.push_str("inputs:");
    for x in &program.inputs {
        let _ = write!(out, " {x}");
    }
    let _ = writeln!(out, "\noutput: {}", program.output);
    for (idx, instr) in program.body.iter().enumerate() {
        let _ = writeln!(out, "{idx}: {}", InstrDisplay(instr));
    }
    out
}

struct InstrDisplay<'a>(&'a Instr);

impl fmt::Display for InstrDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let op = self.0.opcode();
        match self.0 {
            Instr::Unary { dst, src, .. } => write!(f, "{op} {dst} {src}"),
            Instr::Binary { dst, lhs, rhs, .. } => write!(f, "{op} {dst} {lhs} {rhs}"),
            Instr::BranchIf {
                cond,
                then_to,
                else_to,
            } => write!(f, "{op} {cond} -> {then_to} {else_to}"),
            Instr::Jump { to } => write!(f, "{op} -> {to}"),
            Instr::HaltReturn { var } => write!(f, "{op} {var}"),
        }
    }
}

struct Token<'a> {
    text: &'a str,
    column: usize,
}

fn tokenize(line: &str) -> Vec<Token<'_>> {
    let code = match line.find('#') {
        Some(i) => &line[..i],
        None => line,
    };
    let mut tokens = Vec::new();
    let mut start = None;
    for (i, c) in code.char_indices() {
        if c.is_ascii_whitespace() {
            if let Some(s) = start.take() {
                tokens.push(Token {
                    text: &code[s..i],
                    column: s + 1,
                });
            }
        } else if start.is_none() {
            start = Some(i);
        }
    }
    if let Some(s) = start {
        tokens.push(Token {
            text: &code[s..],
            column: s + 1,
        });
    }
    tokens
}

struct LineCtx {
    line: usize,
    end_column: usize,
}

impl LineCtx {
    fn err(&self, column: usize, message: impl Into<String>) -> ParseError {
        ParseError {
            line: self.line,
            column,
            message: message.into(),
        }
    }

    fn var(&self, tok: Option<&Token<'_>>, what: &str) -> Result<Var, ParseError> {
        let tok = tok.ok_or_else(|| self.err(self.end_column, alloc::format!("expected {what}")))?;
        if Var::is_valid_name(tok.text) {
            Ok(Var::new(tok.text))
        } else {
            Err(self.err(
                tok.column,
                alloc::format!("expected {what}, found `{}`", tok.text),
            ))
        }
    }

    fn operand(&self, tok: Option<&Token<'_>>) -> Result<Operand, ParseError> {
        let tok = tok.ok_or_else(|| self.err(self.end_column, "expected operand"))?;
        if Var::is_valid_name(tok.text) {
            return Ok(Operand::Var(Var::new(tok.text)));
        }
        tok.text
            .parse::<Rational>()
            .map(Operand::Lit)
            .map_err(|e| self.err(tok.column, e.to_string()))
    }

    fn index(&self, tok: Option<&Token<'_>>) -> Result<usize, ParseError> {
        let tok = tok.ok_or_else(|| self.err(self.end_column, "expected instruction index"))?;
        tok.text.parse::<usize>().map_err(|_| {
            self.err(
                tok.column,
                alloc::format!("expected instruction index, found `{}`", tok.text),
            )
        })
    }

    fn arrow(&self, tok: Option<&Token<'_>>) -> Result<(), ParseError> {
        match tok {
            Some(t) if t.text == "->" => Ok(()),
            Some(t) => Err(self.err(t.column, alloc::format!("expected `->`, found `{}`", t.text))),
            None => Err(self.err(self.end_column, "expected `->`")),
        }
    }
}

pub fn parse(text: &str) -> Result<RationalProgram, ParseError> {
    let mut inputs: Option<Vec<Var>> = None;
    let mut output: Option<Var> = None;
    let mut body = Vec::new();

    for (lineno, line) in text.lines().enumerate() {
        let tokens = tokenize(line);
        let Some(first) = tokens.first() else {
            continue;
        };
        let ctx = LineCtx {
            line: lineno + 1,
            end_column: line.trim_end().len() + 1,
        };
        let mut rest = tokens[1..].iter();

        match first.text {
            "inputs:" => {
                if inputs.is_some() {
                    return Err(ctx.err(first.column, "duplicate `inputs:` header"));
                }
                if !body.is_empty() {
                    return Err(ctx.err(first.column, "`inputs:` header after body"));
                }
                inputs = Some(
                    rest.map(|t| ctx.var(Some(t), "input variable"))
                        .collect::<Result<_, _>>()?,
                );
                continue;
            }
            "output:" => {
                if output.is_some() {
                    return Err(ctx.err(first.column, "duplicate `output:` header"));
                }
                if !body.is_empty() {
                    return Err(ctx.err(first.column, "`output:` header after body"));
                }
                output = Some(ctx.var(rest.next(), "output variable")?);
                if let Some(extra) = rest.next() {
                    return Err(ctx.err(extra.column, "exactly one output variable expected"));
                }
                continue;
            }
            _ => {}
        }

        let idx_text = first.text.strip_suffix(':').ok_or_else(|| {
            ctx.err(
                first.column,
                alloc::format!("expected `INDEX:` or a header, found `{}`", first.text),
            )
        })?;
        let idx: usize = idx_text
            .parse()
            .map_err(|_| ctx.err(first.column, alloc::format!("bad instruction index `{idx_text}`")))?;
        if idx != body.len() {
            return Err(ctx.err(
                first.column,
                alloc::format!("instruction index {idx} out of sequence, expected {}", body.len()),
            ));
        }

        let op_tok = rest
            .next()
            .ok_or_else(|| ctx.err(ctx.end_column, "expected opcode"))?;
        let opcode = Opcode::from_mnemonic(op_tok.text).ok_or_else(|| {
            ctx.err(op_tok.column, alloc::format!("unknown opcode `{}`", op_tok.text))
        })?;

        let instr = match opcode {
            Opcode::Assign | Opcode::Neg => Instr::Unary {
                op: if opcode == Opcode::Assign {
                    UnaryOp::Assign
                } else {
                    UnaryOp::Neg
                },
                dst: ctx.var(rest.next(), "target variable")?,
                src: ctx.operand(rest.next())?,
            },
            Opcode::BranchIf => {
                let cond = ctx.var(rest.next(), "condition variable")?;
                ctx.arrow(rest.next())?;
                Instr::BranchIf {
                    cond,
                    then_to: ctx.index(rest.next())?,
                    else_to: ctx.index(rest.next())?,
                }
            }
            Opcode::Jump => {
                ctx.arrow(rest.next())?;
                Instr::Jump {
                    to: ctx.index(rest.next())?,
                }
            }
            Opcode::HaltReturn => Instr::HaltReturn {
                var: ctx.var(rest.next(), "returned variable")?,
            },
            _ => Instr::Binary {
                op: BinOp::from_opcode(opcode).expect("remaining opcodes are binary"),
                dst: ctx.var(rest.next(), "target variable")?,
                lhs: ctx.operand(rest.next())?,
                rhs: ctx.operand(rest.next())?,
            },
        };
        if let Some(extra) = rest.next() {
            return Err(ctx.err(
                extra.column,
                alloc::format!("unexpected trailing token `{}`", extra.text),
            ));
        }
        body.push(instr);
    }

    let missing = |what: &str| ParseError {
        line: text.lines().count().max(1),
        column: 1,
        message: alloc::format!("missing `{what}` header"),
    };
    Ok(RationalProgram {
        inputs: inputs.ok_or_else(|| missing("inputs:"))?,
        output: output.ok_or_else(|| missing("output:"))?,
        body,
    })
}
