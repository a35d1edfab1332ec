//! Rule instance enumeration, classification and schema validation.
//!
//! Instances are always enumerated against a closure context computed from
//! the root query, one formula universe per component: analytic cut draws its
//! cut formulas from the component's own closure, and the modal rule filters
//! the converse-wrapped side formulas through the closure of the component
//! they sit in. Rules whose principal keeps its annotation come in two
//! variants, one that retains the principal in the premise and one that
//! consumes it; both are legal readings of the schema on set-sequents.

use std::collections::BTreeSet;

use crate::error::Error;
use crate::syntax::{fl_closure_neg, Formula, FormulaKind, Program, ProgramKind};

use super::{Annotation, AnnotatedFormula, AnnotatedSequent, Rule, RuleInstance, Side, SplitSequent};

/// Per-component formula universes, computed once from the root query.
#[derive(Clone, Debug, Default)]
pub struct ClosureContext {
    pub left: BTreeSet<Formula>,
    pub right: BTreeSet<Formula>,
}

impl ClosureContext {
    /// Closure of the root split sequent, componentwise.
    pub fn for_root(root: &SplitSequent) -> ClosureContext {
        ClosureContext {
            left: fl_closure_neg(root.left.formulas()),
            right: fl_closure_neg(root.right.formulas()),
        }
    }

    pub fn side(&self, side: Side) -> &BTreeSet<Formula> {
        match side {
            Side::Left => &self.left,
            Side::Right => &self.right,
        }
    }

    pub fn admits(&self, seq: &SplitSequent) -> bool {
        seq.left.formulas().all(|f| self.left.contains(f))
            && seq.right.formulas().all(|f| self.right.contains(f))
    }

    #[must_use]
    pub fn mirrored(&self) -> ClosureContext {
        ClosureContext { left: self.right.clone(), right: self.left.clone() }
    }
}

/// All rule instances whose conclusion is `seq`. Rules with a non-diamond
/// principal require the principal unfocused; the modal rule requires its
/// principal diamond in focus; weakening and focusing are restricted to
/// unfocused principals.
pub fn enumerate_instances(
    seq: &SplitSequent,
    ctx: &ClosureContext,
) -> Result<Vec<RuleInstance>, Error> {
    if !ctx.admits(seq) {
        let offending = seq
            .left
            .formulas()
            .find(|f| !ctx.left.contains(f))
            .or_else(|| seq.right.formulas().find(|f| !ctx.right.contains(f)))
            .expect("admits failed, so an offender exists");
        return Err(Error::ContextViolation(offending.to_string()));
    }

    let mut out = Vec::new();
    axiom_instances(seq, &mut out);

    for side in [Side::Left, Side::Right] {
        let comp = seq.component(side);
        for af in comp.iter() {
            decomposition_instances(seq, side, af, &mut out);
        }
        // Analytic cut over the closure of the component as it stands; one
        // instance per unordered pair of a formula and its negation. An
        // empty component admits no cut, so once a component dies it stays
        // dead, which the interpolant construction relies on.
        for cut in &fl_closure_neg(comp.formulas()) {
            let neg = cut.negate();
            if neg < *cut {
                continue;
            }
            let plus = |f: &Formula| {
                seq.with_component(side, comp.inserted(AnnotatedFormula::unfocused(f.clone())))
            };
            out.push(RuleInstance {
                rule: Rule::Acut,
                side,
                conclusion: seq.clone(),
                premises: vec![plus(cut), plus(&neg)],
                principal: Some((side, AnnotatedFormula::unfocused(cut.clone()))),
            });
        }
        // Weakening of an unfocused formula.
        for af in comp.iter().filter(|af| !af.is_focused()) {
            out.push(RuleInstance {
                rule: Rule::Weak,
                side,
                conclusion: seq.clone(),
                premises: vec![seq.with_component(side, comp.removed(af))],
                principal: Some((side, af.clone())),
            });
        }
        // Placing and removing focus.
        if seq.focus().is_none() {
            for af in comp.iter() {
                let focused = AnnotatedFormula::focused(af.formula.clone());
                let kept = seq.with_component(side, comp.inserted(focused.clone()));
                let dropped =
                    seq.with_component(side, comp.removed(af).inserted(focused.clone()));
                out.push(RuleInstance {
                    rule: Rule::Focus,
                    side,
                    conclusion: seq.clone(),
                    premises: vec![kept],
                    principal: Some((side, af.clone())),
                });
                if dropped != *seq {
                    out.push(RuleInstance {
                        rule: Rule::Focus,
                        side,
                        conclusion: seq.clone(),
                        premises: vec![dropped],
                        principal: Some((side, af.clone())),
                    });
                }
            }
        } else if let Some(af) = comp.iter().find(|af| af.is_focused()) {
            let unfocused = AnnotatedFormula::unfocused(af.formula.clone());
            out.push(RuleInstance {
                rule: Rule::Unfocus,
                side,
                conclusion: seq.clone(),
                premises: vec![seq.with_component(side, comp.removed(af).inserted(unfocused))],
                principal: Some((side, af.clone())),
            });
        }
        // The modal rule, on the focused diamond of this component.
        if let Some(instance) = modal_instance(seq, side, ctx) {
            out.push(instance);
        }
    }
    out.dedup();
    Ok(out)
}

fn axiom_instances(seq: &SplitSequent, out: &mut Vec<RuleInstance>) {
    let mut clashes: BTreeSet<(Formula, Side, Side)> = BTreeSet::new();
    for side in [Side::Left, Side::Right] {
        for af in seq.component(side).iter() {
            let neg = af.formula.negate();
            if neg < af.formula {
                continue;
            }
            for other in [Side::Left, Side::Right] {
                if seq.component(other).contains_formula(&neg) {
                    clashes.insert((af.formula.clone(), side, other));
                }
            }
        }
    }
    for (formula, side, other) in clashes {
        let annotation = seq
            .component(side)
            .iter()
            .find(|af| af.formula == formula)
            .map(|af| af.annotation)
            .unwrap_or(Annotation::Unfocused);
        let _ = other;
        out.push(RuleInstance {
            rule: Rule::Ax1,
            side,
            conclusion: seq.clone(),
            premises: Vec::new(),
            principal: Some((side, AnnotatedFormula { formula, annotation })),
        });
    }
    for side in [Side::Left, Side::Right] {
        let bot = AnnotatedFormula::unfocused(Formula::bot());
        if seq.component(side).contains(&bot) {
            out.push(RuleInstance {
                rule: Rule::Ax2,
                side,
                conclusion: seq.clone(),
                premises: Vec::new(),
                principal: Some((side, bot)),
            });
        }
    }
    out.dedup();
}

/// Instances of the ten decomposition rules with principal `af`.
fn decomposition_instances(
    seq: &SplitSequent,
    side: Side,
    af: &AnnotatedFormula,
    out: &mut Vec<RuleInstance>,
) {
    let comp = seq.component(side);
    let focused = af.is_focused();
    let ann = af.annotation;
    // Premise bases: always the consuming one; also the retaining one when
    // the principal is unfocused.
    let bases: Vec<AnnotatedSequent> = if focused {
        vec![comp.removed(af)]
    } else {
        vec![comp.removed(af), comp.clone()]
    };

    let mut push = |rule: Rule, premise_elements: Vec<Vec<AnnotatedFormula>>| {
        for base in &bases {
            let mut premises = Vec::new();
            for elems in &premise_elements {
                let mut component = base.clone();
                for e in elems {
                    component = component.inserted(e.clone());
                }
                premises.push(seq.with_component(side, component));
            }
            let instance = RuleInstance {
                rule,
                side,
                conclusion: seq.clone(),
                premises,
                principal: Some((side, af.clone())),
            };
            if !out.contains(&instance) {
                out.push(instance);
            }
        }
    };

    match af.formula.kind() {
        FormulaKind::And(l, r) if !focused => {
            push(
                Rule::And,
                vec![vec![
                    AnnotatedFormula::unfocused(l.clone()),
                    AnnotatedFormula::unfocused(r.clone()),
                ]],
            );
        }
        FormulaKind::Or(l, r) if !focused => {
            push(
                Rule::Or,
                vec![
                    vec![AnnotatedFormula::unfocused(l.clone())],
                    vec![AnnotatedFormula::unfocused(r.clone())],
                ],
            );
        }
        FormulaKind::Dia(prog, body) => match prog.kind() {
            ProgramKind::Seq(alpha, beta) => {
                let derived = Formula::dia(alpha.clone(), Formula::dia(beta.clone(), body.clone()));
                push(Rule::DiaSeq, vec![vec![AnnotatedFormula { formula: derived, annotation: ann }]]);
            }
            ProgramKind::Choice(alpha, beta) => {
                push(
                    Rule::DiaChoice,
                    vec![
                        vec![AnnotatedFormula {
                            formula: Formula::dia(alpha.clone(), body.clone()),
                            annotation: ann,
                        }],
                        vec![AnnotatedFormula {
                            formula: Formula::dia(beta.clone(), body.clone()),
                            annotation: ann,
                        }],
                    ],
                );
            }
            ProgramKind::Star(alpha) => {
                push(
                    Rule::DiaStar,
                    vec![
                        vec![AnnotatedFormula {
                            formula: Formula::dia(alpha.clone(), af.formula.clone()),
                            annotation: ann,
                        }],
                        vec![AnnotatedFormula { formula: body.clone(), annotation: ann }],
                    ],
                );
            }
            ProgramKind::Test(tau) => {
                push(
                    Rule::DiaTest,
                    vec![vec![
                        AnnotatedFormula::unfocused(tau.clone()),
                        AnnotatedFormula { formula: body.clone(), annotation: ann },
                    ]],
                );
            }
            ProgramKind::Atom(_) => {}
        },
        FormulaKind::Box(prog, body) if !focused => match prog.kind() {
            ProgramKind::Seq(alpha, beta) => {
                let derived =
                    Formula::boxm(alpha.clone(), Formula::boxm(beta.clone(), body.clone()));
                push(Rule::BoxSeq, vec![vec![AnnotatedFormula::unfocused(derived)]]);
            }
            ProgramKind::Choice(alpha, beta) => {
                push(
                    Rule::BoxChoice,
                    vec![vec![
                        AnnotatedFormula::unfocused(Formula::boxm(alpha.clone(), body.clone())),
                        AnnotatedFormula::unfocused(Formula::boxm(beta.clone(), body.clone())),
                    ]],
                );
            }
            ProgramKind::Star(alpha) => {
                push(
                    Rule::BoxStar,
                    vec![vec![
                        AnnotatedFormula::unfocused(Formula::boxm(
                            alpha.clone(),
                            af.formula.clone(),
                        )),
                        AnnotatedFormula::unfocused(body.clone()),
                    ]],
                );
            }
            ProgramKind::Test(tau) => {
                push(
                    Rule::BoxTest,
                    vec![
                        vec![AnnotatedFormula::unfocused(tau.negate())],
                        vec![AnnotatedFormula::unfocused(body.clone())],
                    ],
                );
            }
            ProgramKind::Atom(_) => {}
        },
        _ => {}
    }
}

/// The modal rule: requires the focused formula to be an atomic diamond in
/// component `side`. All boxes over the same action are stripped; every
/// other formula survives wrapped in the converse diamond if and only if the
/// wrapped formula lies in the closure of the component it sits in.
fn modal_instance(seq: &SplitSequent, side: Side, _ctx: &ClosureContext) -> Option<RuleInstance> {
    let comp = seq.component(side);
    let principal = comp.iter().find(|af| af.is_focused())?;
    let FormulaKind::Dia(prog, body) = principal.formula.kind() else {
        return None;
    };
    let ProgramKind::Atom(action) = prog.kind() else {
        return None;
    };

    let transform = |component: &AnnotatedSequent, skip: Option<&AnnotatedFormula>|
     -> AnnotatedSequent {
        let closure = fl_closure_neg(component.formulas());
        let mut elements = Vec::new();
        for af in component.iter() {
            if Some(af) == skip {
                continue;
            }
            if let FormulaKind::Box(p, b) = af.formula.kind() {
                if let ProgramKind::Atom(box_action) = p.kind() {
                    if box_action == action {
                        elements.push(AnnotatedFormula::unfocused(b.clone()));
                        continue;
                    }
                }
            }
            let wrapped =
                Formula::dia(Program::atom(action.converse()), af.formula.clone());
            if closure.contains(&wrapped) {
                elements.push(AnnotatedFormula::unfocused(wrapped));
            }
        }
        AnnotatedSequent::new(elements).expect("all elements unfocused")
    };

    let mut principal_side = transform(comp, Some(principal));
    principal_side = principal_side.inserted(AnnotatedFormula::focused(body.clone()));
    let other = transform(seq.component(side.other()), None);

    let premise = match side {
        Side::Left => SplitSequent { left: principal_side, right: other },
        Side::Right => SplitSequent { left: other, right: principal_side },
    };
    Some(RuleInstance {
        rule: Rule::Modal,
        side,
        conclusion: seq.clone(),
        premises: vec![premise],
        principal: Some((side, principal.clone())),
    })
}

/// Flags of an instance used by the uniform proof discipline.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Classification {
    /// Every premise is a componentwise superset of the conclusion.
    pub cumulative: bool,
    /// Every premise differs from the conclusion.
    pub productive: bool,
    /// An unfocus step giving up a diamond.
    pub conceding: bool,
    /// An unfocus step on a non-diamond.
    pub unblocking: bool,
}

pub fn classify(instance: &RuleInstance) -> Classification {
    let cumulative = instance.premises.iter().all(|p| {
        p.left.is_superset(&instance.conclusion.left)
            && p.right.is_superset(&instance.conclusion.right)
    });
    let productive = instance.premises.iter().all(|p| *p != instance.conclusion);
    let diamond_principal = instance
        .principal
        .as_ref()
        .map(|(_, af)| af.formula.is_diamond())
        .unwrap_or(false);
    Classification {
        cumulative,
        productive,
        conceding: instance.rule == Rule::Unfocus && diamond_principal,
        unblocking: instance.rule == Rule::Unfocus && !diamond_principal,
    }
}

/// True iff neither an axiom nor a cumulative-and-productive saturating rule
/// applies to the unfocused copy of `component`.
pub fn is_saturated(component: &AnnotatedSequent, ctx_side: &BTreeSet<Formula>) -> bool {
    let seq = SplitSequent { left: component.dropped_focus(), right: AnnotatedSequent::empty() };
    let ctx = ClosureContext { left: ctx_side.clone(), right: BTreeSet::new() };
    let instances = enumerate_instances(&seq, &ctx).expect("component stays in its own closure");
    !instances.iter().any(|i| {
        if i.rule.is_axiom() {
            return true;
        }
        if !i.rule.is_saturating() {
            return false;
        }
        let c = classify(i);
        c.cumulative && c.productive
    })
}

/// The priority class of an instance, 1 (most urgent) to 6.
///
/// 1: axioms. 2: cumulative and productive saturating rules acting in an
/// unfocused component. 3: unfocusing a blocked non-diamond. 4: like 2 but
/// inside the focused component. 5: productive diamond decompositions of the
/// focused formula. 6: modal steps, cumulative focus placement, and
/// conceding unfocus steps.
pub fn priority_class(instance: &RuleInstance, seq: &SplitSequent) -> Result<u8, Error> {
    debug_assert_eq!(&instance.conclusion, seq);
    let class = classify(instance);
    if instance.rule.is_axiom() {
        return Ok(1);
    }
    if instance.rule.is_saturating() && class.cumulative && class.productive {
        let (principal_side, principal) = instance
            .principal
            .as_ref()
            .ok_or_else(|| Error::Internal("saturating instance without principal".into()))?;
        if !principal.is_focused() {
            let focus_side = seq.focus().map(|(side, _)| side);
            return Ok(if focus_side == Some(*principal_side) { 4 } else { 2 });
        }
    }
    if class.unblocking {
        return Ok(3);
    }
    if instance.rule.is_dia_decomposition()
        && class.productive
        && instance.principal.as_ref().map(|(_, af)| af.is_focused()).unwrap_or(false)
    {
        return Ok(5);
    }
    if instance.rule == Rule::Modal
        || (instance.rule == Rule::Focus && class.cumulative)
        || class.conceding
    {
        return Ok(6);
    }
    Err(Error::Unclassifiable)
}

/// Recomputes the admissible premise lists for `(rule, side, principal)`
/// against `conclusion` and checks the stored premises appear among them.
/// This is deliberately a second, direct implementation of the schemas.
pub fn validate_instance(instance: &RuleInstance, ctx: &ClosureContext) -> Result<(), String> {
    let seq = &instance.conclusion;
    if !ctx.admits(seq) {
        return Err("conclusion outside the closure context".into());
    }
    for premise in &instance.premises {
        if !ctx.admits(premise) {
            return Err("premise outside the closure context".into());
        }
        let focus_points = premise.left.iter().filter(|af| af.is_focused()).count()
            + premise.right.iter().filter(|af| af.is_focused()).count();
        if focus_points > 1 {
            return Err("premise has more than one focused formula".into());
        }
    }
    let candidates =
        enumerate_instances(seq, ctx).map_err(|e| format!("cannot enumerate: {e}"))?;
    let found = candidates.iter().any(|c| {
        c.rule == instance.rule && c.side == instance.side && c.premises == instance.premises
    });
    if found {
        Ok(())
    } else {
        Err(format!(
            "no {} instance at this sequent has the stated premises",
            instance.rule.name()
        ))
    }
}
