//! The trace relation and the Fischer-Ladner closure.

use std::collections::BTreeSet;

use super::{Formula, FormulaKind, ProgramKind};

/// Direct trace successors of a formula: conjunction/disjunction projections,
/// modal stripping, and the unfolding steps for composition, choice, test and
/// iteration. A box over a test steps to the negated test.
pub fn trace_successors(f: &Formula) -> BTreeSet<Formula> {
    let mut out = BTreeSet::new();
    match f.kind() {
        FormulaKind::Top | FormulaKind::Bot | FormulaKind::Prop(_) | FormulaKind::NegProp(_) => {}
        FormulaKind::And(l, r) | FormulaKind::Or(l, r) => {
            out.insert(l.clone());
            out.insert(r.clone());
        }
        FormulaKind::Dia(prog, body) => match prog.kind() {
            ProgramKind::Atom(_) => {
                out.insert(body.clone());
            }
            ProgramKind::Seq(alpha, beta) => {
                out.insert(Formula::dia(
                    alpha.clone(),
                    Formula::dia(beta.clone(), body.clone()),
                ));
            }
            ProgramKind::Choice(alpha, beta) => {
                out.insert(Formula::dia(alpha.clone(), body.clone()));
                out.insert(Formula::dia(beta.clone(), body.clone()));
            }
            ProgramKind::Star(alpha) => {
                out.insert(Formula::dia(alpha.clone(), f.clone()));
                out.insert(body.clone());
            }
            ProgramKind::Test(tau) => {
                out.insert(tau.clone());
                out.insert(body.clone());
            }
        },
        FormulaKind::Box(prog, body) => match prog.kind() {
            ProgramKind::Atom(_) => {
                out.insert(body.clone());
            }
            ProgramKind::Seq(alpha, beta) => {
                out.insert(Formula::boxm(
                    alpha.clone(),
                    Formula::boxm(beta.clone(), body.clone()),
                ));
            }
            ProgramKind::Choice(alpha, beta) => {
                out.insert(Formula::boxm(alpha.clone(), body.clone()));
                out.insert(Formula::boxm(beta.clone(), body.clone()));
            }
            ProgramKind::Star(alpha) => {
                out.insert(Formula::boxm(alpha.clone(), f.clone()));
                out.insert(body.clone());
            }
            ProgramKind::Test(tau) => {
                out.insert(tau.negate());
                out.insert(body.clone());
            }
        },
    }
    out
}

/// Least superset of `seed` closed under [`trace_successors`]. Always finite.
pub fn fl_closure<'a>(seed: impl IntoIterator<Item = &'a Formula>) -> BTreeSet<Formula> {
    let mut closure: BTreeSet<Formula> = seed.into_iter().cloned().collect();
    let mut work: Vec<Formula> = closure.iter().cloned().collect();
    while let Some(f) = work.pop() {
        for succ in trace_successors(&f) {
            if closure.insert(succ.clone()) {
                work.push(succ);
            }
        }
    }
    closure
}

/// Closure of `seed` together with the closure of the negations of `seed`.
pub fn fl_closure_neg<'a>(seed: impl IntoIterator<Item = &'a Formula>) -> BTreeSet<Formula> {
    let seed: Vec<Formula> = seed.into_iter().cloned().collect();
    let negated: Vec<Formula> = seed.iter().map(Formula::negate).collect();
    let mut closure = fl_closure(&seed);
    closure.extend(fl_closure(&negated));
    closure
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::parse;

    #[test]
    fn star_unfolding_successors() {
        let f = parse("<a*>p").unwrap();
        let expected: BTreeSet<Formula> =
            [parse("<a><a*>p").unwrap(), parse("p").unwrap()].into_iter().collect();
        assert_eq!(trace_successors(&f), expected);
    }

    #[test]
    fn box_test_steps_to_negated_test() {
        let f = parse("[q?]p").unwrap();
        let expected: BTreeSet<Formula> =
            [parse("~q").unwrap(), parse("p").unwrap()].into_iter().collect();
        assert_eq!(trace_successors(&f), expected);
    }

    #[test]
    fn literals_have_no_successors() {
        assert!(trace_successors(&parse("p").unwrap()).is_empty());
        assert!(trace_successors(&parse("true").unwrap()).is_empty());
    }

    #[test]
    fn closure_of_star_diamond() {
        let f = parse("<a*>p").unwrap();
        let expected: BTreeSet<Formula> = [
            parse("<a*>p").unwrap(),
            parse("<a><a*>p").unwrap(),
            parse("p").unwrap(),
        ]
        .into_iter()
        .collect();
        assert_eq!(fl_closure([&f]), expected);
    }

    #[test]
    fn closure_of_literal_is_itself() {
        let f = parse("p").unwrap();
        assert_eq!(fl_closure([&f]), [f].into_iter().collect());
    }

    #[test]
    fn closure_of_conjunction() {
        let f = parse("p & q").unwrap();
        let expected: BTreeSet<Formula> =
            [f.clone(), parse("p").unwrap(), parse("q").unwrap()].into_iter().collect();
        assert_eq!(fl_closure([&f]), expected);
    }

    #[test]
    fn closure_neg_examples() {
        let p = parse("p").unwrap();
        let expected: BTreeSet<Formula> = [p.clone(), p.negate()].into_iter().collect();
        assert_eq!(fl_closure_neg([&p]), expected);

        let f = parse("p & q").unwrap();
        let expected: BTreeSet<Formula> = [
            f.clone(),
            parse("p").unwrap(),
            parse("q").unwrap(),
            parse("~p | ~q").unwrap(),
            parse("~p").unwrap(),
            parse("~q").unwrap(),
        ]
        .into_iter()
        .collect();
        assert_eq!(fl_closure_neg([&f]), expected);

        assert!(fl_closure_neg(std::iter::empty::<&Formula>()).is_empty());
    }
}
