//! Deciding split sequents.
//!
//! [`decide`] runs proof search as a parity game. When Prover wins, a cyclic
//! proof is extracted from the winning strategy and re-checked by the
//! independent checker before it leaves this module; when Builder wins, a
//! countermodel is extracted from his strategy and verified against the
//! compositional semantics. Exactly one of the two happens.

mod countermodel;
mod ctx;
mod game;
mod proof;
mod strategy;

pub use countermodel::Countermodel;
pub use game::Limits;
pub use proof::{audit_uniform, check_proof, check_proof_with_assumptions, CyclicProof, ProofNode, Violation};

use crate::calculus::SplitSequent;
use crate::error::Error;
use crate::paritygame::{self, Player};
use crate::syntax::Formula;

use self::ctx::Ctx;
use self::game::SearchGame;

/// The two possible answers for a split sequent: a checked cyclic proof that
/// it is unsatisfiable, or a verified model satisfying all its formulas.
#[derive(Clone, Debug)]
pub enum Outcome {
    Proof(CyclicProof),
    Sat(Countermodel),
}

impl Outcome {
    pub fn is_proof(&self) -> bool {
        matches!(self, Outcome::Proof(_))
    }
}

/// Decides a split sequent.
pub fn decide(root: &SplitSequent, limits: &Limits) -> Result<Outcome, Error> {
    let ctx = Ctx::new(root);
    let root_pos = ctx.intern(root)?;
    let game = SearchGame::build(ctx, root_pos, limits)?;
    let solution = paritygame::solve(&game.pg);
    paritygame::validate(&game.pg, &solution)
        .map_err(|e| Error::Internal(format!("game solution failed validation: {e}")))?;
    limits.check_deadline()?;

    if solution.winner[game.seq_node[game.root as usize] as usize] == Player::Exists {
        let strat = strategy::uniform_strategy(&game, &solution)?;
        let proof = strategy::extract_cyclic_proof(&game, &strat)?;
        let violations = check_proof(&proof, root);
        if let Some(v) = violations.first() {
            return Err(Error::Internal(format!("extracted proof fails its own check: {v}")));
        }
        Ok(Outcome::Proof(proof))
    } else {
        let model = countermodel::extract_countermodel(&game, &solution)?;
        Ok(Outcome::Sat(model))
    }
}

/// Satisfiability of a single formula.
pub fn satisfiable(f: &Formula, limits: &Limits) -> Result<Outcome, Error> {
    decide(&SplitSequent::unfocused([f.clone()], []), limits)
}

/// Validity of a single formula: its negation goes on the left; a proof of
/// that sequent witnesses validity, a model witnesses a counterexample.
pub fn valid(f: &Formula, limits: &Limits) -> Result<Outcome, Error> {
    decide(&SplitSequent::unfocused([f.negate()], []), limits)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::calculus::{AnnotatedFormula, AnnotatedSequent};
    use crate::syntax::parse;

    fn decide_unfocused(left: &[&str], right: &[&str]) -> Outcome {
        let seq = SplitSequent::unfocused(
            left.iter().map(|s| parse(s).unwrap()),
            right.iter().map(|s| parse(s).unwrap()),
        );
        decide(&seq, &Limits::default()).unwrap()
    }

    #[test]
    fn clash_is_proved_by_a_single_axiom() {
        let outcome = decide_unfocused(&["p", "~p"], &[]);
        match outcome {
            Outcome::Proof(proof) => {
                assert_eq!(proof.len(), 1);
                assert!(proof.backlinks.is_empty());
            }
            Outcome::Sat(_) => panic!("expected a proof"),
        }
    }

    #[test]
    fn single_proposition_is_satisfiable() {
        match decide_unfocused(&["p"], &[]) {
            Outcome::Sat(cm) => {
                assert_eq!(cm.model.num_states(), 1);
                assert!(cm.model.satisfies(cm.witness, &parse("p").unwrap()));
            }
            Outcome::Proof(_) => panic!("expected a model"),
        }
    }

    #[test]
    fn converse_axiom_negation_is_unsatisfiable() {
        // p together with <a>[a^]~p clashes through the converse filter.
        match decide_unfocused(&["p", "<a>[a^]~p"], &[]) {
            Outcome::Proof(proof) => {
                assert!(check_proof(
                    &proof,
                    &SplitSequent::unfocused(
                        [parse("p").unwrap(), parse("<a>[a^]~p").unwrap()],
                        []
                    )
                )
                .is_empty());
            }
            Outcome::Sat(_) => panic!("expected a proof"),
        }
    }

    #[test]
    fn diamond_needs_a_successor_state() {
        match decide_unfocused(&["<a>p"], &["q"]) {
            Outcome::Sat(cm) => {
                assert_eq!(cm.model.num_states(), 2);
                assert!(cm.model.satisfies(cm.witness, &parse("<a>p").unwrap()));
                assert!(cm.model.satisfies(cm.witness, &parse("q").unwrap()));
            }
            Outcome::Proof(_) => panic!("expected a model"),
        }
    }

    #[test]
    fn box_constrains_the_successor() {
        match decide_unfocused(&["<a>true", "[a]p"], &[]) {
            Outcome::Sat(cm) => {
                assert!(cm.model.satisfies(cm.witness, &parse("<a>p").unwrap()));
            }
            Outcome::Proof(_) => panic!("expected a model"),
        }
    }

    #[test]
    fn star_repeat_proof_checks_out() {
        let seq = SplitSequent::unfocused(
            [parse("<a*>p").unwrap(), parse("[a*]~p").unwrap()],
            [],
        );
        match decide(&seq, &Limits::default()).unwrap() {
            Outcome::Proof(proof) => {
                assert!(check_proof(&proof, &seq).is_empty());
                assert!(audit_uniform(&proof, &seq).is_empty());
            }
            Outcome::Sat(_) => panic!("expected a proof"),
        }
    }

    #[test]
    fn focused_sequents_round_trip_through_decide() {
        let left = AnnotatedSequent::new([AnnotatedFormula::focused(parse("<a*>p").unwrap())])
            .unwrap();
        let seq = SplitSequent::new(left, AnnotatedSequent::empty()).unwrap();
        // <a*>p alone is satisfiable regardless of the focus.
        assert!(!decide(&seq, &Limits::default()).unwrap().is_proof());
    }

    #[test]
    fn budget_is_honored() {
        let seq = SplitSequent::unfocused([parse("<(a+b)*>(p & q)").unwrap()], []);
        let limits = Limits { max_positions: 8, deadline: None };
        assert!(matches!(decide(&seq, &limits), Err(Error::ResourceLimit(_))));
    }
}
