//! A light cleanup pass over synthesized interpolants: unit and idempotence
//! laws, trivial tests, and star-of-test collapse. Every rewrite preserves
//! meaning and never grows the vocabulary, and verification always runs on
//! the simplified formula, so this pass cannot mask a synthesis bug.

use crate::syntax::{Formula, FormulaKind, Program, ProgramKind};

pub fn simplify(f: &Formula) -> Formula {
    match f.kind() {
        FormulaKind::Top
        | FormulaKind::Bot
        | FormulaKind::Prop(_)
        | FormulaKind::NegProp(_) => f.clone(),
        FormulaKind::And(l, r) => {
            let l = simplify(l);
            let r = simplify(r);
            match (l.kind(), r.kind()) {
                (FormulaKind::Bot, _) | (_, FormulaKind::Bot) => Formula::bot(),
                (FormulaKind::Top, _) => r,
                (_, FormulaKind::Top) => l,
                _ if l == r => l,
                _ => Formula::and(l, r),
            }
        }
        FormulaKind::Or(l, r) => {
            let l = simplify(l);
            let r = simplify(r);
            match (l.kind(), r.kind()) {
                (FormulaKind::Top, _) | (_, FormulaKind::Top) => Formula::top(),
                (FormulaKind::Bot, _) => r,
                (_, FormulaKind::Bot) => l,
                _ if l == r => l,
                _ => Formula::or(l, r),
            }
        }
        FormulaKind::Dia(prog, body) => {
            let prog = simplify_program(prog);
            let body = simplify(body);
            match (prog.kind(), body.kind()) {
                (_, FormulaKind::Bot) => Formula::bot(),
                (ProgramKind::Test(t), _) => match t.kind() {
                    FormulaKind::Top => body,
                    FormulaKind::Bot => Formula::bot(),
                    _ => Formula::dia(prog, body),
                },
                _ => Formula::dia(prog, body),
            }
        }
        FormulaKind::Box(prog, body) => {
            let prog = simplify_program(prog);
            let body = simplify(body);
            match (prog.kind(), body.kind()) {
                (_, FormulaKind::Top) => Formula::top(),
                (ProgramKind::Test(t), _) => match t.kind() {
                    FormulaKind::Top => body,
                    FormulaKind::Bot => Formula::top(),
                    _ => Formula::boxm(prog, body),
                },
                _ => Formula::boxm(prog, body),
            }
        }
    }
}

fn simplify_program(p: &Program) -> Program {
    let is_top_test = |p: &Program| {
        matches!(p.kind(), ProgramKind::Test(t) if matches!(t.kind(), FormulaKind::Top))
    };
    let is_bot_test = |p: &Program| {
        matches!(p.kind(), ProgramKind::Test(t) if matches!(t.kind(), FormulaKind::Bot))
    };
    match p.kind() {
        ProgramKind::Atom(_) => p.clone(),
        ProgramKind::Test(f) => Program::test(simplify(f)),
        ProgramKind::Seq(l, r) => {
            let l = simplify_program(l);
            let r = simplify_program(r);
            if is_bot_test(&l) || is_bot_test(&r) {
                Program::test(Formula::bot())
            } else if is_top_test(&l) {
                r
            } else if is_top_test(&r) {
                l
            } else {
                Program::seq(l, r)
            }
        }
        ProgramKind::Choice(l, r) => {
            let l = simplify_program(l);
            let r = simplify_program(r);
            if is_bot_test(&l) {
                r
            } else if is_bot_test(&r) {
                l
            } else if l == r {
                l
            } else {
                Program::choice(l, r)
            }
        }
        ProgramKind::Star(b) => {
            let b = simplify_program(b);
            match b.kind() {
                // Iterating a test reaches exactly the current state.
                ProgramKind::Test(_) => Program::test(Formula::top()),
                ProgramKind::Star(_) => b,
                _ => Program::star(b),
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::parse;

    #[test]
    fn units_and_tests() {
        let cases = [
            ("false | p", "p"),
            ("p & true", "p"),
            ("<true?>p", "p"),
            ("<true?;a>p", "<a>p"),
            ("[q?*]p", "p"),
            ("<a+a>p", "<a>p"),
            ("<(false?)+b>p", "<b>p"),
            ("<a><b>false", "false"),
            ("[a](p | true)", "true"),
        ];
        for (input, expected) in cases {
            assert_eq!(
                simplify(&parse(input).unwrap()),
                parse(expected).unwrap(),
                "simplify({input})"
            );
        }
    }

    #[test]
    fn vocabulary_never_grows() {
        for text in ["<(p?;a)*>(q & true)", "[a*](p | false) & <b^>true"] {
            let f = parse(text).unwrap();
            let s = simplify(&f);
            assert!(s.vocabulary().is_subset(&f.vocabulary()));
        }
    }
}
