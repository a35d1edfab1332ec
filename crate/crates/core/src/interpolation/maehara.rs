//! Interpolant combinators for singleton clusters.
//!
//! For a node outside every cycle the interpolant is assembled from the
//! children's interpolants by the shape of the rule: two-premise rules
//! conjoin on the left and disjoin on the right, single-premise rules pass
//! through, and the modal rule guards with the box on the left and the
//! diamond on the right. The two constants handle the degenerate sequents:
//! an unsatisfiable left component needs nothing from the right (take true),
//! and symmetrically (take false). Every combinator here is re-validated per
//! run by the end-to-end interpolant verification.

use crate::calculus::{Rule, Side, SplitSequent};
use crate::error::Error;
use crate::prover::CyclicProof;
use crate::syntax::{Formula, FormulaKind, ProgramKind};

/// Interpolant of a singleton-cluster node from its children's interpolants
/// (given in child order).
pub fn maehara_step(
    proof: &CyclicProof,
    node: usize,
    child_thetas: &[Formula],
) -> Result<Formula, Error> {
    let pn = &proof.nodes[node];
    if child_thetas.len() != pn.children.len() {
        return Err(Error::Internal("one interpolant per child is required".into()));
    }
    // Degenerate components decide the interpolant outright.
    if pn.sequent.left.is_empty() {
        return Ok(Formula::bot());
    }
    if pn.sequent.right.is_empty() {
        return Ok(Formula::top());
    }
    let Some(rule) = pn.rule else {
        return Err(Error::Internal("cannot interpolate an open leaf".into()));
    };
    let side = pn.side.unwrap_or(Side::Left);

    match rule {
        Rule::Ax1 | Rule::Ax2 => axiom_theta(&pn.sequent),
        Rule::Modal => {
            let premise = &proof.nodes[pn.children[0]].sequent;
            let action = modal_action(&pn.sequent)?;
            match side {
                Side::Left => {
                    if premise.right.is_empty() {
                        Ok(Formula::top())
                    } else {
                        Ok(Formula::boxm(action, child_thetas[0].clone()))
                    }
                }
                Side::Right => {
                    if premise.left.is_empty() {
                        Ok(Formula::bot())
                    } else {
                        Ok(Formula::dia(action, child_thetas[0].clone()))
                    }
                }
            }
        }
        _ => match child_thetas.len() {
            1 => Ok(child_thetas[0].clone()),
            2 => match side {
                Side::Left => {
                    Ok(Formula::and(child_thetas[0].clone(), child_thetas[1].clone()))
                }
                Side::Right => {
                    Ok(Formula::or(child_thetas[0].clone(), child_thetas[1].clone()))
                }
            },
            n => Err(Error::Internal(format!("rule {} with {n} premises", rule.name()))),
        },
    }
}

/// Interpolant of an axiom node, read off the label: a clash across the
/// components yields the right-hand member of the pair; a clash (or falsum)
/// confined to one component makes that component unsatisfiable on its own.
pub(crate) fn axiom_theta(seq: &SplitSequent) -> Result<Formula, Error> {
    for af in seq.left.iter() {
        if seq.right.contains_formula(&af.formula.negate()) {
            return Ok(af.formula.negate());
        }
    }
    let clash_inside = |comp: &crate::calculus::AnnotatedSequent| {
        comp.iter().any(|af| comp.contains_formula(&af.formula.negate()))
            || comp.contains_formula(&Formula::bot())
    };
    if clash_inside(&seq.left) {
        return Ok(Formula::top());
    }
    if clash_inside(&seq.right) {
        return Ok(Formula::bot());
    }
    Err(Error::Internal(format!("no axiom pattern in [{seq}]")))
}

/// The atomic action of the focused diamond of a modal conclusion.
pub(crate) fn modal_action(seq: &SplitSequent) -> Result<crate::syntax::Program, Error> {
    let Some((_, focus)) = seq.focus() else {
        return Err(Error::Internal("modal conclusion without focus".into()));
    };
    let FormulaKind::Dia(prog, _) = focus.kind() else {
        return Err(Error::Internal("modal focus is not a diamond".into()));
    };
    let ProgramKind::Atom(_) = prog.kind() else {
        return Err(Error::Internal("modal focus is not atomic".into()));
    };
    Ok(prog.clone())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::calculus::{AnnotatedFormula, AnnotatedSequent};
    use crate::syntax::parse;

    fn useq(formulas: &[&str]) -> AnnotatedSequent {
        AnnotatedSequent::unfocused(formulas.iter().map(|s| parse(s).unwrap()))
    }

    #[test]
    fn axiom_cases() {
        // Clash across: p on the left, ~p on the right -> ~p.
        let seq = SplitSequent::new(useq(&["p", "q"]), useq(&["~p"])).unwrap();
        assert_eq!(axiom_theta(&seq).unwrap(), parse("~p").unwrap());
        // Reversed polarity across: ~p left, p right -> p.
        let seq = SplitSequent::new(useq(&["~p"]), useq(&["p"])).unwrap();
        assert_eq!(axiom_theta(&seq).unwrap(), parse("p").unwrap());
        // Falsum decides by side.
        let seq = SplitSequent::new(useq(&["false"]), useq(&["q"])).unwrap();
        assert_eq!(axiom_theta(&seq).unwrap(), Formula::top());
        let seq = SplitSequent::new(useq(&["q"]), useq(&["false"])).unwrap();
        assert_eq!(axiom_theta(&seq).unwrap(), Formula::bot());
        // A clash confined to the left.
        let seq = SplitSequent::new(useq(&["p", "~p"]), useq(&["q"])).unwrap();
        assert_eq!(axiom_theta(&seq).unwrap(), Formula::top());
    }

    #[test]
    fn modal_action_reads_the_focus() {
        let left = AnnotatedSequent::new([AnnotatedFormula::focused(parse("<a^>p").unwrap())])
            .unwrap();
        let seq = SplitSequent::new(left, useq(&["q"])).unwrap();
        let prog = modal_action(&seq).unwrap();
        let expected = match parse("<a^>p").unwrap().kind() {
            crate::syntax::FormulaKind::Dia(p, _) => p.clone(),
            _ => unreachable!(),
        };
        assert_eq!(prog, expected);
    }
}
