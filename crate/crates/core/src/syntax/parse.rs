//! Recursive-descent parser for the surface formula grammar.
//!
//! Surface negation `~φ` and implication `φ -> ψ` are sugar: the parser
//! eliminates them on the fly, so the result is always in negation normal
//! form. Propositions and actions share the identifier space; the role is
//! decided by position. A trailing `^` on an action denotes its converse.

use crate::error::Error;

use super::{AtomicAction, Formula, Program};

/// Parses `text` into a formula, or reports the byte offset of the first
/// offending character.
pub fn parse(text: &str) -> Result<Formula, Error> {
    let mut p = Parser { src: text.as_bytes(), pos: 0 };
    let f = p.formula()?;
    p.skip_ws();
    if p.pos != p.src.len() {
        return Err(p.err("unexpected trailing input"));
    }
    Ok(f)
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl<'a> Parser<'a> {
    fn err(&self, message: &str) -> Error {
        Error::Syntax { offset: self.pos, message: message.to_string() }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    /// Consumes `c` if it is next (after whitespace).
    fn eat(&mut self, c: u8) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: u8) -> Result<(), Error> {
        if self.eat(c) {
            Ok(())
        } else {
            Err(self.err(&format!("expected '{}'", c as char)))
        }
    }

    /// Consumes "->" if next.
    fn eat_arrow(&mut self) -> bool {
        self.skip_ws();
        if self.src[self.pos..].starts_with(b"->") {
            self.pos += 2;
            true
        } else {
            false
        }
    }

    fn ident(&mut self) -> Result<String, Error> {
        self.skip_ws();
        let start = self.pos;
        match self.src.get(self.pos) {
            Some(c) if c.is_ascii_lowercase() => self.pos += 1,
            _ => return Err(self.err("expected identifier")),
        }
        while let Some(c) = self.src.get(self.pos) {
            if c.is_ascii_alphanumeric() || *c == b'_' {
                self.pos += 1;
            } else {
                break;
            }
        }
        Ok(std::str::from_utf8(&self.src[start..self.pos]).unwrap().to_string())
    }

    fn formula(&mut self) -> Result<Formula, Error> {
        let lhs = self.or_formula()?;
        if self.eat_arrow() {
            let rhs = self.formula()?;
            Ok(Formula::implies(lhs, rhs))
        } else {
            Ok(lhs)
        }
    }

    fn or_formula(&mut self) -> Result<Formula, Error> {
        let mut f = self.and_formula()?;
        while self.eat(b'|') {
            let rhs = self.and_formula()?;
            f = Formula::or(f, rhs);
        }
        Ok(f)
    }

    fn and_formula(&mut self) -> Result<Formula, Error> {
        let mut f = self.unary_formula()?;
        while self.eat(b'&') {
            let rhs = self.unary_formula()?;
            f = Formula::and(f, rhs);
        }
        Ok(f)
    }

    fn unary_formula(&mut self) -> Result<Formula, Error> {
        match self.peek() {
            Some(b'~') => {
                self.pos += 1;
                Ok(self.unary_formula()?.negate())
            }
            Some(b'<') => {
                self.pos += 1;
                let prog = self.program()?;
                self.expect(b'>')?;
                Ok(Formula::dia(prog, self.unary_formula()?))
            }
            Some(b'[') => {
                self.pos += 1;
                let prog = self.program()?;
                self.expect(b']')?;
                Ok(Formula::boxm(prog, self.unary_formula()?))
            }
            Some(b'(') => {
                self.pos += 1;
                let f = self.formula()?;
                self.expect(b')')?;
                Ok(f)
            }
            Some(c) if c.is_ascii_lowercase() => {
                let name = self.ident()?;
                Ok(match name.as_str() {
                    "true" => Formula::top(),
                    "false" => Formula::bot(),
                    _ => Formula::prop(&name),
                })
            }
            _ => Err(self.err("expected formula")),
        }
    }

    fn program(&mut self) -> Result<Program, Error> {
        let mut p = self.seq_program()?;
        while self.eat(b'+') {
            let rhs = self.seq_program()?;
            p = Program::choice(p, rhs);
        }
        Ok(p)
    }

    fn seq_program(&mut self) -> Result<Program, Error> {
        let mut p = self.star_program()?;
        while self.eat(b';') {
            let rhs = self.star_program()?;
            p = Program::seq(p, rhs);
        }
        Ok(p)
    }

    fn star_program(&mut self) -> Result<Program, Error> {
        let mut p = self.atomic_program()?;
        while self.eat(b'*') {
            p = Program::star(p);
        }
        Ok(p)
    }

    fn atomic_program(&mut self) -> Result<Program, Error> {
        // A test is a full formula followed by '?', which overlaps with the
        // other alternatives on identifiers and parentheses, so try it first
        // and backtrack when the '?' is missing.
        let save = self.pos;
        if let Ok(f) = self.formula() {
            if self.eat(b'?') {
                return Ok(Program::test(f));
            }
        }
        self.pos = save;

        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let p = self.program()?;
                self.expect(b')')?;
                Ok(p)
            }
            Some(c) if c.is_ascii_lowercase() => {
                let name = self.ident()?;
                if name == "true" || name == "false" {
                    return Err(self.err("expected program"));
                }
                if self.eat(b'^') {
                    Ok(Program::atom(AtomicAction::backward(&name)))
                } else {
                    Ok(Program::atom(AtomicAction::forward(&name)))
                }
            }
            _ => Err(self.err("expected program")),
        }
    }
}
