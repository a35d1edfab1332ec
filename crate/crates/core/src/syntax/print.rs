//! Pretty-printing. `parse(print(f))` is the structural identity, so
//! parentheses are inserted wherever reparsing would rebuild the tree
//! differently (binary operators print left-associatively).

use std::fmt;

use super::{Direction, Formula, FormulaKind, Program, ProgramKind};

// Formula binding strength: Or = 0, And = 1, everything else atomic-ish.
fn formula_level(f: &Formula) -> u8 {
    match f.kind() {
        FormulaKind::Or(..) => 0,
        FormulaKind::And(..) => 1,
        _ => 2,
    }
}

fn fmt_formula(f: &Formula, min: u8, out: &mut fmt::Formatter<'_>) -> fmt::Result {
    let level = formula_level(f);
    if level < min {
        write!(out, "(")?;
        fmt_formula(f, 0, out)?;
        return write!(out, ")");
    }
    match f.kind() {
        FormulaKind::Top => write!(out, "true"),
        FormulaKind::Bot => write!(out, "false"),
        FormulaKind::Prop(p) => write!(out, "{p}"),
        FormulaKind::NegProp(p) => write!(out, "~{p}"),
        FormulaKind::Or(l, r) => {
            fmt_formula(l, 0, out)?;
            write!(out, " | ")?;
            fmt_formula(r, 1, out)
        }
        FormulaKind::And(l, r) => {
            fmt_formula(l, 1, out)?;
            write!(out, " & ")?;
            fmt_formula(r, 2, out)
        }
        FormulaKind::Dia(prog, body) => {
            write!(out, "<")?;
            fmt_program(prog, 0, out)?;
            write!(out, ">")?;
            fmt_formula(body, 2, out)
        }
        FormulaKind::Box(prog, body) => {
            write!(out, "[")?;
            fmt_program(prog, 0, out)?;
            write!(out, "]")?;
            fmt_formula(body, 2, out)
        }
    }
}

// Program binding strength: Choice = 0, Seq = 1, Star/Atom/Test = 2.
fn program_level(p: &Program) -> u8 {
    match p.kind() {
        ProgramKind::Choice(..) => 0,
        ProgramKind::Seq(..) => 1,
        _ => 2,
    }
}

fn fmt_program(p: &Program, min: u8, out: &mut fmt::Formatter<'_>) -> fmt::Result {
    let level = program_level(p);
    if level < min {
        write!(out, "(")?;
        fmt_program(p, 0, out)?;
        return write!(out, ")");
    }
    match p.kind() {
        ProgramKind::Atom(a) => match a.direction {
            Direction::Forward => write!(out, "{}", a.base),
            Direction::Backward => write!(out, "{}^", a.base),
        },
        ProgramKind::Choice(l, r) => {
            fmt_program(l, 0, out)?;
            write!(out, "+")?;
            fmt_program(r, 1, out)
        }
        ProgramKind::Seq(l, r) => {
            fmt_program(l, 1, out)?;
            write!(out, ";")?;
            fmt_program(r, 2, out)
        }
        ProgramKind::Star(b) => {
            fmt_program(b, 2, out)?;
            write!(out, "*")
        }
        ProgramKind::Test(f) => {
            // Only bare literals survive reparsing without parentheses.
            if formula_level(f) == 2 && !f.is_diamond() && !f.is_box() {
                fmt_formula(f, 2, out)?;
            } else {
                write!(out, "(")?;
                fmt_formula(f, 0, out)?;
                write!(out, ")")?;
            }
            write!(out, "?")
        }
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, out: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt_formula(self, 0, out)
    }
}

impl fmt::Display for Program {
    fn fmt(&self, out: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt_program(self, 0, out)
    }
}
