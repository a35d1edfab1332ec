//! Annotated sequents, split sequents and the rule inventory.
//!
//! A sequent is a finite set of formulas, each tagged unfocused (`u`) or
//! focused (`f`), read conjunctively; the calculus derives sequents that are
//! unsatisfiable. At most one formula is ever in focus, across both
//! components of a split sequent. A formula may occur with both tags at
//! once; the two occurrences are distinct elements.

mod rules;

pub use rules::{
    classify, enumerate_instances, is_saturated, priority_class, validate_instance, Classification,
    ClosureContext,
};

use std::fmt;

use crate::error::Error;
use crate::syntax::Formula;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Annotation {
    Unfocused,
    Focused,
}

impl Annotation {
    pub fn tag(self) -> &'static str {
        match self {
            Annotation::Unfocused => "u",
            Annotation::Focused => "f",
        }
    }

    pub fn from_tag(tag: &str) -> Option<Annotation> {
        match tag {
            "u" => Some(Annotation::Unfocused),
            "f" => Some(Annotation::Focused),
            _ => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct AnnotatedFormula {
    pub formula: Formula,
    pub annotation: Annotation,
}

impl AnnotatedFormula {
    pub fn unfocused(formula: Formula) -> Self {
        AnnotatedFormula { formula, annotation: Annotation::Unfocused }
    }

    pub fn focused(formula: Formula) -> Self {
        AnnotatedFormula { formula, annotation: Annotation::Focused }
    }

    pub fn is_focused(&self) -> bool {
        self.annotation == Annotation::Focused
    }
}

impl fmt::Display for AnnotatedFormula {
    fn fmt(&self, out: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(out, "{}^{}", self.formula, self.annotation.tag())
    }
}

/// A canonical set of annotated formulas: sorted by the global expression
/// order, at most one element in focus.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct AnnotatedSequent {
    elements: Vec<AnnotatedFormula>,
}

impl AnnotatedSequent {
    pub fn empty() -> Self {
        AnnotatedSequent::default()
    }

    pub fn new(elements: impl IntoIterator<Item = AnnotatedFormula>) -> Result<Self, Error> {
        let mut elements: Vec<AnnotatedFormula> = elements.into_iter().collect();
        elements.sort();
        elements.dedup();
        let seq = AnnotatedSequent { elements };
        if seq.focus_count() > 1 {
            return Err(Error::Internal("sequent with more than one focused formula".into()));
        }
        Ok(seq)
    }

    /// All formulas unfocused.
    pub fn unfocused(formulas: impl IntoIterator<Item = Formula>) -> Self {
        AnnotatedSequent::new(formulas.into_iter().map(AnnotatedFormula::unfocused))
            .expect("unfocused sequents always have zero focal points")
    }

    pub fn iter(&self) -> impl Iterator<Item = &AnnotatedFormula> {
        self.elements.iter()
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn contains(&self, f: &AnnotatedFormula) -> bool {
        self.elements.binary_search(f).is_ok()
    }

    pub fn contains_formula(&self, f: &Formula) -> bool {
        self.iter().any(|af| &af.formula == f)
    }

    fn focus_count(&self) -> usize {
        self.iter().filter(|af| af.is_focused()).count()
    }

    pub fn focused(&self) -> Option<&Formula> {
        self.iter().find(|af| af.is_focused()).map(|af| &af.formula)
    }

    /// The same set of formulas, all unfocused.
    pub fn dropped_focus(&self) -> AnnotatedSequent {
        AnnotatedSequent::unfocused(self.iter().map(|af| af.formula.clone()))
    }

    pub fn formulas(&self) -> impl Iterator<Item = &Formula> {
        self.iter().map(|af| &af.formula)
    }

    #[must_use]
    pub fn inserted(&self, f: AnnotatedFormula) -> AnnotatedSequent {
        let mut elements = self.elements.clone();
        if let Err(at) = elements.binary_search(&f) {
            elements.insert(at, f);
        }
        AnnotatedSequent { elements }
    }

    #[must_use]
    pub fn removed(&self, f: &AnnotatedFormula) -> AnnotatedSequent {
        let mut elements = self.elements.clone();
        if let Ok(at) = elements.binary_search(f) {
            elements.remove(at);
        }
        AnnotatedSequent { elements }
    }

    /// Componentwise superset test (on annotated elements).
    pub fn is_superset(&self, other: &AnnotatedSequent) -> bool {
        other.iter().all(|f| self.contains(f))
    }
}

impl fmt::Display for AnnotatedSequent {
    fn fmt(&self, out: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for af in self.iter() {
            if !first {
                write!(out, ", ")?;
            }
            first = false;
            write!(out, "{af}")?;
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Side {
    Left,
    Right,
}

impl Side {
    pub fn other(self) -> Side {
        match self {
            Side::Left => Side::Right,
            Side::Right => Side::Left,
        }
    }

    pub fn tag(self) -> &'static str {
        match self {
            Side::Left => "left",
            Side::Right => "right",
        }
    }

    pub fn from_tag(tag: &str) -> Option<Side> {
        match tag {
            "left" => Some(Side::Left),
            "right" => Some(Side::Right),
            _ => None,
        }
    }
}

/// A pair of annotated sequents with at most one focused formula overall.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SplitSequent {
    pub left: AnnotatedSequent,
    pub right: AnnotatedSequent,
}

impl SplitSequent {
    pub fn new(left: AnnotatedSequent, right: AnnotatedSequent) -> Result<Self, Error> {
        let seq = SplitSequent { left, right };
        if seq.left.focus_count() + seq.right.focus_count() > 1 {
            return Err(Error::Internal("split sequent with more than one focused formula".into()));
        }
        Ok(seq)
    }

    /// Both components from plain formulas, everything unfocused.
    pub fn unfocused(
        left: impl IntoIterator<Item = Formula>,
        right: impl IntoIterator<Item = Formula>,
    ) -> Self {
        SplitSequent {
            left: AnnotatedSequent::unfocused(left),
            right: AnnotatedSequent::unfocused(right),
        }
    }

    pub fn component(&self, side: Side) -> &AnnotatedSequent {
        match side {
            Side::Left => &self.left,
            Side::Right => &self.right,
        }
    }

    #[must_use]
    pub fn with_component(&self, side: Side, seq: AnnotatedSequent) -> SplitSequent {
        match side {
            Side::Left => SplitSequent { left: seq, right: self.right.clone() },
            Side::Right => SplitSequent { left: self.left.clone(), right: seq },
        }
    }

    /// The unique focused formula, if any, with its side.
    pub fn focus(&self) -> Option<(Side, &Formula)> {
        if let Some(f) = self.left.focused() {
            return Some((Side::Left, f));
        }
        self.right.focused().map(|f| (Side::Right, f))
    }

    #[must_use]
    pub fn mirrored(&self) -> SplitSequent {
        SplitSequent { left: self.right.clone(), right: self.left.clone() }
    }

    pub fn is_empty(&self) -> bool {
        self.left.is_empty() && self.right.is_empty()
    }
}

impl fmt::Display for SplitSequent {
    fn fmt(&self, out: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(out, "{} || {}", self.left, self.right)
    }
}

/// The rules of the split calculus. `Focus` places a formula in focus
/// (upwards) and `Unfocus` removes the focus; `Modal` is the step across an
/// atomic action, the only rule besides the axioms that looks at both
/// components.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Rule {
    Ax1,
    Ax2,
    And,
    Or,
    DiaSeq,
    BoxSeq,
    DiaChoice,
    BoxChoice,
    DiaStar,
    BoxStar,
    DiaTest,
    BoxTest,
    Modal,
    Acut,
    Weak,
    Focus,
    Unfocus,
}

impl Rule {
    pub fn name(self) -> &'static str {
        match self {
            Rule::Ax1 => "ax1",
            Rule::Ax2 => "ax2",
            Rule::And => "and",
            Rule::Or => "or",
            Rule::DiaSeq => "dia_seq",
            Rule::BoxSeq => "box_seq",
            Rule::DiaChoice => "dia_choice",
            Rule::BoxChoice => "box_choice",
            Rule::DiaStar => "dia_star",
            Rule::BoxStar => "box_star",
            Rule::DiaTest => "dia_test",
            Rule::BoxTest => "box_test",
            Rule::Modal => "dia_atom",
            Rule::Acut => "acut",
            Rule::Weak => "weak",
            Rule::Focus => "f",
            Rule::Unfocus => "u",
        }
    }

    pub fn from_name(name: &str) -> Option<Rule> {
        Some(match name {
            "ax1" => Rule::Ax1,
            "ax2" => Rule::Ax2,
            "and" => Rule::And,
            "or" => Rule::Or,
            "dia_seq" => Rule::DiaSeq,
            "box_seq" => Rule::BoxSeq,
            "dia_choice" => Rule::DiaChoice,
            "box_choice" => Rule::BoxChoice,
            "dia_star" => Rule::DiaStar,
            "box_star" => Rule::BoxStar,
            "dia_test" => Rule::DiaTest,
            "box_test" => Rule::BoxTest,
            "dia_atom" => Rule::Modal,
            "acut" => Rule::Acut,
            "weak" => Rule::Weak,
            "f" => Rule::Focus,
            "u" => Rule::Unfocus,
            _ => return None,
        })
    }

    pub fn is_axiom(self) -> bool {
        matches!(self, Rule::Ax1 | Rule::Ax2)
    }

    /// The ten decomposition rules plus analytic cut: the rules eligible for
    /// the saturation phases of the uniform discipline.
    pub fn is_saturating(self) -> bool {
        matches!(
            self,
            Rule::And
                | Rule::Or
                | Rule::DiaSeq
                | Rule::BoxSeq
                | Rule::DiaChoice
                | Rule::BoxChoice
                | Rule::DiaStar
                | Rule::BoxStar
                | Rule::DiaTest
                | Rule::BoxTest
                | Rule::Acut
        )
    }

    /// Diamond decomposition rules, the ones that may act on the focus.
    pub fn is_dia_decomposition(self) -> bool {
        matches!(self, Rule::DiaSeq | Rule::DiaChoice | Rule::DiaStar | Rule::DiaTest)
    }
}

/// One application of a rule: a conclusion, the ordered premises, and the
/// principal occurrence (the cut formula for `acut`, the (un)focused formula
/// for `f`/`u`, one of the clashing pair for `ax1`).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RuleInstance {
    pub rule: Rule,
    pub side: Side,
    pub conclusion: SplitSequent,
    pub premises: Vec<SplitSequent>,
    pub principal: Option<(Side, AnnotatedFormula)>,
}

impl fmt::Display for RuleInstance {
    fn fmt(&self, out: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(out, "{}^{} at [{}]", self.rule.name(), self.side.tag(), self.conclusion)?;
        if let Some((side, af)) = &self.principal {
            write!(out, " on {af}@{}", side.tag())?;
        }
        Ok(())
    }
}
