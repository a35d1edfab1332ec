//! Game-based model checking.
//!
//! The evaluation game is played on closure-formula/state pairs. Verifier
//! picks disjuncts, diamond successors and star exits; Refuter picks
//! conjuncts, box successors and which part of a diamond test to attack. An
//! infinite play is bad for Verifier exactly when it unfolds diamond
//! fixpoints forever, so two priorities suffice: diamond-star positions get
//! priority 1, everything else 0, under the max-even convention of
//! [`crate::paritygame`].

use std::collections::HashMap;

use crate::paritygame::{self, ParityGame, Player};
use crate::syntax::{fl_closure, Formula, FormulaKind, ProgramKind};

use super::KripkeModel;

/// True iff Verifier wins the evaluation game at `(f, state)`; agrees with
/// [`KripkeModel::mc_compositional`] on every model.
pub fn mc_game(model: &KripkeModel, state: usize, f: &Formula) -> bool {
    assert!(state < model.num_states());
    let closure: Vec<Formula> = fl_closure([f]).into_iter().collect();
    let index: HashMap<&Formula, usize> = closure.iter().enumerate().map(|(i, g)| (g, i)).collect();
    let n = model.num_states();
    let pos = |g: &Formula, s: usize| (index[g] * n + s) as u32;

    let mut game = ParityGame::default();
    for g in &closure {
        let priority = if matches!(
            g.kind(),
            FormulaKind::Dia(p, _) if matches!(p.kind(), ProgramKind::Star(_))
        ) {
            1
        } else {
            0
        };
        for s in 0..n {
            let owner = position_owner(model, g, s);
            game.add_position(owner, priority);
            debug_assert_eq!(game.len() as u32 - 1, pos(g, s));
        }
    }

    for g in &closure {
        for s in 0..n {
            let from = pos(g, s);
            match g.kind() {
                FormulaKind::Top
                | FormulaKind::Bot
                | FormulaKind::Prop(_)
                | FormulaKind::NegProp(_) => {}
                FormulaKind::And(l, r) | FormulaKind::Or(l, r) => {
                    game.add_move(from, pos(l, s));
                    game.add_move(from, pos(r, s));
                }
                FormulaKind::Dia(prog, body) | FormulaKind::Box(prog, body) => {
                    match prog.kind() {
                        ProgramKind::Atom(a) => {
                            for (x, y) in model.action_edges(a) {
                                if x == s {
                                    game.add_move(from, pos(body, y));
                                }
                            }
                        }
                        ProgramKind::Seq(alpha, beta) => {
                            let inner = Formula::dia(beta.clone(), body.clone());
                            let next = if g.is_diamond() {
                                Formula::dia(alpha.clone(), inner)
                            } else {
                                Formula::boxm(
                                    alpha.clone(),
                                    Formula::boxm(beta.clone(), body.clone()),
                                )
                            };
                            game.add_move(from, pos(&next, s));
                        }
                        ProgramKind::Choice(alpha, beta) => {
                            let (l, r) = if g.is_diamond() {
                                (
                                    Formula::dia(alpha.clone(), body.clone()),
                                    Formula::dia(beta.clone(), body.clone()),
                                )
                            } else {
                                (
                                    Formula::boxm(alpha.clone(), body.clone()),
                                    Formula::boxm(beta.clone(), body.clone()),
                                )
                            };
                            game.add_move(from, pos(&l, s));
                            game.add_move(from, pos(&r, s));
                        }
                        ProgramKind::Star(alpha) => {
                            let unfold = if g.is_diamond() {
                                Formula::dia(alpha.clone(), g.clone())
                            } else {
                                Formula::boxm(alpha.clone(), g.clone())
                            };
                            game.add_move(from, pos(&unfold, s));
                            game.add_move(from, pos(body, s));
                        }
                        ProgramKind::Test(tau) => {
                            if g.is_diamond() {
                                game.add_move(from, pos(tau, s));
                            } else {
                                game.add_move(from, pos(&tau.negate(), s));
                            }
                            game.add_move(from, pos(body, s));
                        }
                    }
                }
            }
        }
    }

    let solution = paritygame::solve(&game);
    debug_assert!(paritygame::validate(&game, &solution).is_ok());
    solution.winner[pos(f, state) as usize] == Player::Exists
}

fn position_owner(model: &KripkeModel, g: &Formula, s: usize) -> Player {
    match g.kind() {
        // Terminal positions are dead ends owned by the loser.
        FormulaKind::Top => Player::Forall,
        FormulaKind::Bot => Player::Exists,
        FormulaKind::Prop(p) => {
            if model.valuation(p).contains(&s) {
                Player::Forall
            } else {
                Player::Exists
            }
        }
        FormulaKind::NegProp(p) => {
            if model.valuation(p).contains(&s) {
                Player::Exists
            } else {
                Player::Forall
            }
        }
        FormulaKind::Or(..) => Player::Exists,
        FormulaKind::And(..) => Player::Forall,
        FormulaKind::Dia(prog, _) => match prog.kind() {
            // Both parts of a diamond test must hold, so Refuter attacks.
            ProgramKind::Test(_) => Player::Forall,
            _ => Player::Exists,
        },
        FormulaKind::Box(prog, _) => match prog.kind() {
            // A box test is a disjunction, so Verifier picks.
            ProgramKind::Test(_) => Player::Exists,
            _ => Player::Forall,
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::parse;

    #[test]
    fn top_wins_everywhere() {
        let m = KripkeModel::new(vec!["s0".into(), "s1".into()]).unwrap();
        for s in 0..2 {
            assert!(mc_game(&m, s, &Formula::top()));
        }
    }

    #[test]
    fn star_diamond_agrees_with_compositional() {
        let mut m = KripkeModel::new(vec!["s".into()]).unwrap();
        m.add_edge("a", 0, 0);
        m.add_val("p", 0);
        let f = parse("<a*>p").unwrap();
        assert!(mc_game(&m, 0, &f));

        let mut m2 = KripkeModel::new(vec!["s".into()]).unwrap();
        m2.add_edge("a", 0, 0);
        let f2 = parse("<a*>p").unwrap();
        assert!(!mc_game(&m2, 0, &f2));
        assert!(!m2.satisfies(0, &f2));
    }

    #[test]
    fn converse_steps() {
        let mut m = KripkeModel::new(vec!["s0".into(), "s1".into()]).unwrap();
        m.add_edge("a", 0, 1);
        m.add_val("p", 0);
        let f = parse("<a><a^>p").unwrap();
        assert!(mc_game(&m, 0, &f));
        assert!(m.satisfies(0, &f));
    }
}
