//! Expressions of Converse PDL in negation normal form.
//!
//! Formulas and programs are immutable, structurally shared trees. Negation
//! lives on propositions only; negating a compound formula is the derived
//! rewriting [`Formula::negate`]. Atomic actions come in forward/backward
//! pairs, and [`Program::converse`] pushes the pairing through compound
//! programs.
//!
//! The derived `Ord` on [`Formula`] and [`Program`] (variant order, then
//! lexicographic on the fields) is the canonical expression order used
//! everywhere else in the crate: sequents are kept sorted by it and all
//! tie-breaking goes through it.

mod closure;
mod parse;
mod print;

pub use closure::{fl_closure, fl_closure_neg, trace_successors};
pub use parse::parse;

use std::collections::BTreeSet;
use std::sync::Arc;

/// Orientation of an atomic action: `a` runs forward, `a^` backward.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Direction {
    Forward,
    Backward,
}

/// An atomic action `a` or its converse `a^`, sharing the base name.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct AtomicAction {
    pub base: Arc<str>,
    pub direction: Direction,
}

impl AtomicAction {
    pub fn forward(base: &str) -> Self {
        AtomicAction { base: base.into(), direction: Direction::Forward }
    }

    pub fn backward(base: &str) -> Self {
        AtomicAction { base: base.into(), direction: Direction::Backward }
    }

    /// The paired action: `converse(converse(a)) = a` and `converse(a) != a`.
    pub fn converse(&self) -> Self {
        AtomicAction {
            base: self.base.clone(),
            direction: match self.direction {
                Direction::Forward => Direction::Backward,
                Direction::Backward => Direction::Forward,
            },
        }
    }
}

#[derive(Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum FormulaKind {
    Top,
    Bot,
    Prop(Arc<str>),
    NegProp(Arc<str>),
    And(Formula, Formula),
    Or(Formula, Formula),
    Dia(Program, Formula),
    Box(Program, Formula),
}

/// A formula in negation normal form. Cheap to clone (shared tree).
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Formula(Arc<FormulaKind>);

#[derive(Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ProgramKind {
    Atom(AtomicAction),
    Seq(Program, Program),
    Choice(Program, Program),
    Star(Program),
    Test(Formula),
}

/// A program expression. Cheap to clone (shared tree).
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Program(Arc<ProgramKind>);

impl std::fmt::Debug for Formula {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{self}")
    }
}

impl std::fmt::Debug for Program {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{self}")
    }
}

impl Formula {
    pub fn kind(&self) -> &FormulaKind {
        &self.0
    }

    pub fn top() -> Formula {
        Formula(Arc::new(FormulaKind::Top))
    }

    pub fn bot() -> Formula {
        Formula(Arc::new(FormulaKind::Bot))
    }

    pub fn prop(name: &str) -> Formula {
        Formula(Arc::new(FormulaKind::Prop(name.into())))
    }

    pub fn neg_prop(name: &str) -> Formula {
        Formula(Arc::new(FormulaKind::NegProp(name.into())))
    }

    pub fn and(lhs: Formula, rhs: Formula) -> Formula {
        Formula(Arc::new(FormulaKind::And(lhs, rhs)))
    }

    pub fn or(lhs: Formula, rhs: Formula) -> Formula {
        Formula(Arc::new(FormulaKind::Or(lhs, rhs)))
    }

    pub fn dia(prog: Program, body: Formula) -> Formula {
        Formula(Arc::new(FormulaKind::Dia(prog, body)))
    }

    pub fn boxm(prog: Program, body: Formula) -> Formula {
        Formula(Arc::new(FormulaKind::Box(prog, body)))
    }

    /// `φ -> ψ` as `~φ | ψ`.
    pub fn implies(lhs: Formula, rhs: Formula) -> Formula {
        Formula::or(lhs.negate(), rhs)
    }

    pub fn is_diamond(&self) -> bool {
        matches!(self.kind(), FormulaKind::Dia(..))
    }

    pub fn is_box(&self) -> bool {
        matches!(self.kind(), FormulaKind::Box(..))
    }

    /// Diamond or box whose program is a star.
    pub fn is_fixpoint(&self) -> bool {
        matches!(
            self.kind(),
            FormulaKind::Dia(p, _) | FormulaKind::Box(p, _)
                if matches!(p.kind(), ProgramKind::Star(_))
        )
    }

    /// The involutive negation: swaps ⊤/⊥, p/~p, ∧/∨ and ⟨α⟩/[α].
    pub fn negate(&self) -> Formula {
        match self.kind() {
            FormulaKind::Top => Formula::bot(),
            FormulaKind::Bot => Formula::top(),
            FormulaKind::Prop(p) => Formula(Arc::new(FormulaKind::NegProp(p.clone()))),
            FormulaKind::NegProp(p) => Formula(Arc::new(FormulaKind::Prop(p.clone()))),
            FormulaKind::And(l, r) => Formula::or(l.negate(), r.negate()),
            FormulaKind::Or(l, r) => Formula::and(l.negate(), r.negate()),
            FormulaKind::Dia(a, f) => Formula::boxm(a.clone(), f.negate()),
            FormulaKind::Box(a, f) => Formula::dia(a.clone(), f.negate()),
        }
    }

    /// Replaces every occurrence of `p` by `replacement` and every `~p` by
    /// the negation of `replacement`.
    pub fn substitute(&self, p: &str, replacement: &Formula) -> Formula {
        match self.kind() {
            FormulaKind::Top | FormulaKind::Bot => self.clone(),
            FormulaKind::Prop(q) => {
                if q.as_ref() == p {
                    replacement.clone()
                } else {
                    self.clone()
                }
            }
            FormulaKind::NegProp(q) => {
                if q.as_ref() == p {
                    replacement.negate()
                } else {
                    self.clone()
                }
            }
            FormulaKind::And(l, r) => {
                Formula::and(l.substitute(p, replacement), r.substitute(p, replacement))
            }
            FormulaKind::Or(l, r) => {
                Formula::or(l.substitute(p, replacement), r.substitute(p, replacement))
            }
            FormulaKind::Dia(a, f) => {
                Formula::dia(a.substitute(p, replacement), f.substitute(p, replacement))
            }
            FormulaKind::Box(a, f) => {
                Formula::boxm(a.substitute(p, replacement), f.substitute(p, replacement))
            }
        }
    }

    pub fn vocabulary(&self) -> Vocabulary {
        let mut voc = Vocabulary::default();
        voc.scan_formula(self);
        voc
    }
}

impl Program {
    pub fn kind(&self) -> &ProgramKind {
        &self.0
    }

    pub fn atom(a: AtomicAction) -> Program {
        Program(Arc::new(ProgramKind::Atom(a)))
    }

    pub fn action(base: &str) -> Program {
        Program::atom(AtomicAction::forward(base))
    }

    pub fn seq(lhs: Program, rhs: Program) -> Program {
        Program(Arc::new(ProgramKind::Seq(lhs, rhs)))
    }

    pub fn choice(lhs: Program, rhs: Program) -> Program {
        Program(Arc::new(ProgramKind::Choice(lhs, rhs)))
    }

    pub fn star(body: Program) -> Program {
        Program(Arc::new(ProgramKind::Star(body)))
    }

    pub fn test(f: Formula) -> Program {
        Program(Arc::new(ProgramKind::Test(f)))
    }

    /// Converse of a program: `(α;β)^ = β^;α^`, `(α+β)^ = α^+β^`,
    /// `(α*)^ = (α^)*` and `(τ?)^ = τ?`.
    pub fn converse(&self) -> Program {
        match self.kind() {
            ProgramKind::Atom(a) => Program::atom(a.converse()),
            ProgramKind::Seq(l, r) => Program::seq(r.converse(), l.converse()),
            ProgramKind::Choice(l, r) => Program::choice(l.converse(), r.converse()),
            ProgramKind::Star(p) => Program::star(p.converse()),
            ProgramKind::Test(_) => self.clone(),
        }
    }

    pub fn substitute(&self, p: &str, replacement: &Formula) -> Program {
        match self.kind() {
            ProgramKind::Atom(_) => self.clone(),
            ProgramKind::Seq(l, r) => {
                Program::seq(l.substitute(p, replacement), r.substitute(p, replacement))
            }
            ProgramKind::Choice(l, r) => {
                Program::choice(l.substitute(p, replacement), r.substitute(p, replacement))
            }
            ProgramKind::Star(b) => Program::star(b.substitute(p, replacement)),
            ProgramKind::Test(f) => Program::test(f.substitute(p, replacement)),
        }
    }

    pub fn vocabulary(&self) -> Vocabulary {
        let mut voc = Vocabulary::default();
        voc.scan_program(self);
        voc
    }
}

/// Proposition names and action base names occurring in an expression.
/// Both directions of an atomic action count as the one base name.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Vocabulary {
    pub props: BTreeSet<Arc<str>>,
    pub actions: BTreeSet<Arc<str>>,
}

impl Vocabulary {
    fn scan_formula(&mut self, f: &Formula) {
        match f.kind() {
            FormulaKind::Top | FormulaKind::Bot => {}
            FormulaKind::Prop(p) | FormulaKind::NegProp(p) => {
                self.props.insert(p.clone());
            }
            FormulaKind::And(l, r) | FormulaKind::Or(l, r) => {
                self.scan_formula(l);
                self.scan_formula(r);
            }
            FormulaKind::Dia(a, g) | FormulaKind::Box(a, g) => {
                self.scan_program(a);
                self.scan_formula(g);
            }
        }
    }

    fn scan_program(&mut self, p: &Program) {
        match p.kind() {
            ProgramKind::Atom(a) => {
                self.actions.insert(a.base.clone());
            }
            ProgramKind::Seq(l, r) | ProgramKind::Choice(l, r) => {
                self.scan_program(l);
                self.scan_program(r);
            }
            ProgramKind::Star(b) => self.scan_program(b),
            ProgramKind::Test(f) => self.scan_formula(f),
        }
    }

    pub fn is_subset(&self, other: &Vocabulary) -> bool {
        self.props.is_subset(&other.props) && self.actions.is_subset(&other.actions)
    }

    pub fn intersection(&self, other: &Vocabulary) -> Vocabulary {
        Vocabulary {
            props: self.props.intersection(&other.props).cloned().collect(),
            actions: self.actions.intersection(&other.actions).cloned().collect(),
        }
    }

    pub fn union(&self, other: &Vocabulary) -> Vocabulary {
        Vocabulary {
            props: self.props.union(&other.props).cloned().collect(),
            actions: self.actions.union(&other.actions).cloned().collect(),
        }
    }
}

/// Vocabulary of a whole collection of formulas.
pub fn vocabulary_of<'a>(formulas: impl IntoIterator<Item = &'a Formula>) -> Vocabulary {
    let mut voc = Vocabulary::default();
    for f in formulas {
        voc.scan_formula(f);
    }
    voc
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::parse;

    fn p() -> Formula {
        Formula::prop("p")
    }

    fn q() -> Formula {
        Formula::prop("q")
    }

    #[test]
    fn negation_table() {
        // (p ∧ q)~ = ~p ∨ ~q
        assert_eq!(
            Formula::and(p(), q()).negate(),
            Formula::or(p().negate(), q().negate())
        );
        // ([α]φ)~ = ⟨α⟩~φ
        let a = Program::action("a");
        assert_eq!(
            Formula::boxm(a.clone(), p()).negate(),
            Formula::dia(a.clone(), p().negate())
        );
        // involution on a diamond fixpoint
        let f = Formula::dia(Program::star(a), p());
        assert_eq!(f.negate().negate(), f);
    }

    #[test]
    fn converse_rewriting() {
        let a = Program::action("a");
        let b = Program::action("b");
        let abar = Program::atom(AtomicAction::backward("a"));
        let bbar = Program::atom(AtomicAction::backward("b"));
        assert_eq!(
            Program::seq(a.clone(), b.clone()).converse(),
            Program::seq(bbar, abar.clone())
        );
        assert_eq!(Program::test(p()).converse(), Program::test(p()));
        assert_eq!(
            Program::star(a.clone()).converse(),
            Program::star(abar.clone())
        );
        assert_eq!(abar.converse(), a);
    }

    #[test]
    fn substitution() {
        let qr = Formula::and(q(), Formula::prop("r"));
        assert_eq!(p().substitute("p", &qr), qr);
        assert_eq!(p().negate().substitute("p", &q()), q().negate());
        // uniform replacement under a test
        let f = Formula::dia(Program::test(p()), p());
        assert_eq!(
            f.substitute("p", &Formula::top()),
            Formula::dia(Program::test(Formula::top()), Formula::top())
        );
    }

    #[test]
    fn vocabulary_examples() {
        let f = parse("<a^>p").unwrap();
        let voc = f.vocabulary();
        assert_eq!(voc.props.iter().map(|s| s.as_ref()).collect::<Vec<_>>(), ["p"]);
        assert_eq!(voc.actions.iter().map(|s| s.as_ref()).collect::<Vec<_>>(), ["a"]);

        assert_eq!(Formula::top().vocabulary(), Vocabulary::default());

        let g = parse("[a;q?]~p").unwrap();
        let voc = g.vocabulary();
        assert_eq!(
            voc.props.iter().map(|s| s.as_ref()).collect::<Vec<_>>(),
            ["p", "q"]
        );
        assert_eq!(voc.actions.iter().map(|s| s.as_ref()).collect::<Vec<_>>(), ["a"]);
    }

    #[test]
    fn vocabulary_invariant_under_involutions() {
        let f = parse("<(a;b^)*>(p & ~q)").unwrap();
        assert_eq!(f.vocabulary(), f.negate().vocabulary());
        if let FormulaKind::Dia(prog, _) = f.kind() {
            assert_eq!(prog.vocabulary(), prog.converse().vocabulary());
        } else {
            panic!("expected diamond");
        }
    }
}
