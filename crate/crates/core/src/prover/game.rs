//! The proof-search game over split sequents.
//!
//! Sequent positions belong to Prover, rule-instance positions to Builder,
//! who picks the premise to continue with. Prover's moves at a sequent are
//! pre-pruned to the uniform discipline: only instances of the minimal
//! applicable priority class are offered, the saturation classes offer a
//! single deterministic candidate, and the class-6 frontier offers the modal
//! step, conceding the focus, and every way of focusing a diamond. Instance
//! positions carry priority 3 when their conclusion has no focus, 2 for
//! focused modal steps and 1 otherwise, so an infinite play is won by Prover
//! exactly when it eventually keeps a focus and crosses modal steps forever.

use std::collections::HashMap;
use std::time::Instant;

use crate::calculus::{Annotation, Rule, Side};
use crate::error::Error;
use crate::paritygame::{ParityGame, Player};
use crate::syntax::AtomicAction;

use super::ctx::{Bits, Ctx, Pos, Shape};

/// Resource limits for one query.
#[derive(Clone, Debug)]
pub struct Limits {
    pub max_positions: usize,
    pub deadline: Option<Instant>,
}

impl Default for Limits {
    fn default() -> Limits {
        Limits { max_positions: 2_000_000, deadline: None }
    }
}

impl Limits {
    pub fn check_deadline(&self) -> Result<(), Error> {
        match self.deadline {
            Some(d) if Instant::now() > d => Err(Error::Timeout),
            _ => Ok(()),
        }
    }
}

/// A Prover move: one rule instance, premises interned.
#[derive(Clone)]
pub(crate) struct GameMove {
    pub rule: Rule,
    pub side: Side,
    pub principal: Option<(Side, u32, Annotation)>,
    pub premises: Vec<Pos>,
    pub class: u8,
}

/// Prover's pruned moves: the instances of the minimal applicable class.
pub(crate) fn pruned_moves(ctx: &Ctx, pos: &Pos) -> Vec<GameMove> {
    if let Some(ax) = axiom_move(ctx, pos) {
        return vec![ax];
    }
    let focus_side = pos.focus.map(|(s, _)| s);

    // Class 2: saturation outside the focused component.
    let class2 = [Side::Left, Side::Right]
        .into_iter()
        .filter(|d| focus_side != Some(*d))
        .filter_map(|d| best_saturating(ctx, pos, d, 2))
        .min_by_key(saturating_key);
    if let Some(m) = class2 {
        return vec![m];
    }

    if let Some((fs, fi)) = pos.focus {
        if !ctx.is_diamond[fi as usize] {
            // Class 3: unblock.
            let mut premise = pos.clone();
            premise.bits_mut(fs).set(fi);
            premise.focus = None;
            return vec![GameMove {
                rule: Rule::Unfocus,
                side: fs,
                principal: Some((fs, fi, Annotation::Focused)),
                premises: vec![premise],
                class: 3,
            }];
        }
        // Class 4: saturation inside the focused component.
        if let Some(m) = best_saturating(ctx, pos, fs, 4) {
            return vec![m];
        }
        // Conceding is always on the table once the focus is a diamond; the
        // countermodel construction needs the escape even where the uniform
        // discipline itself would keep decomposing.
        let mut concede_premise = pos.clone();
        concede_premise.bits_mut(fs).set(fi);
        concede_premise.focus = None;
        let concede = GameMove {
            rule: Rule::Unfocus,
            side: fs,
            principal: Some((fs, fi, Annotation::Focused)),
            premises: vec![concede_premise],
            class: 6,
        };
        // Class 5: decompose the focused diamond.
        let decomposition = match ctx.shape[fi as usize].clone() {
            Shape::DiaSeq(derived) => refocus_move(pos, Rule::DiaSeq, fs, fi, &[derived]),
            Shape::DiaChoice(l, r) => refocus_move(pos, Rule::DiaChoice, fs, fi, &[l, r]),
            Shape::DiaStar(unfold, exit) => {
                refocus_move(pos, Rule::DiaStar, fs, fi, &[unfold, exit])
            }
            Shape::DiaTest(test, body) => {
                let mut premise = pos.clone();
                premise.bits_mut(fs).set(test);
                premise.focus = Some((fs, body));
                GameMove {
                    rule: Rule::DiaTest,
                    side: fs,
                    principal: Some((fs, fi, Annotation::Focused)),
                    premises: vec![premise],
                    class: 5,
                }
            }
            Shape::DiaAtom(action, body) => {
                // Class 6 at a focused atomic diamond: step, or concede.
                let modal = GameMove {
                    rule: Rule::Modal,
                    side: fs,
                    principal: Some((fs, fi, Annotation::Focused)),
                    premises: vec![modal_premise(ctx, pos, fs, &action, body)],
                    class: 6,
                };
                return vec![modal, concede];
            }
            _ => unreachable!("diamond shapes only"),
        };
        return vec![decomposition, concede];
    }

    // Class 6 without a focus: place it on any diamond.
    let mut moves = Vec::new();
    for d in [Side::Left, Side::Right] {
        for i in pos.bits(d).ones() {
            if ctx.is_diamond[i as usize] {
                let mut premise = pos.clone();
                premise.focus = Some((d, i));
                moves.push(GameMove {
                    rule: Rule::Focus,
                    side: d,
                    principal: Some((d, i, Annotation::Unfocused)),
                    premises: vec![premise],
                    class: 6,
                });
            }
        }
    }
    moves
}

fn axiom_move(ctx: &Ctx, pos: &Pos) -> Option<GameMove> {
    for d in [Side::Left, Side::Right] {
        for i in pos.member_indices(d) {
            let neg = ctx.neg[i as usize];
            for other in [Side::Left, Side::Right] {
                let present = pos.bits(other).get(neg) || pos.focus == Some((other, neg));
                if present {
                    return Some(GameMove {
                        rule: Rule::Ax1,
                        side: d,
                        principal: Some((
                            d,
                            i,
                            if pos.focus == Some((d, i)) && !pos.bits(d).get(i) {
                                Annotation::Focused
                            } else {
                                Annotation::Unfocused
                            },
                        )),
                        premises: Vec::new(),
                        class: 1,
                    });
                }
            }
        }
    }
    for d in [Side::Left, Side::Right] {
        for i in pos.bits(d).ones() {
            if matches!(ctx.shape[i as usize], Shape::Bot) {
                return Some(GameMove {
                    rule: Rule::Ax2,
                    side: d,
                    principal: Some((d, i, Annotation::Unfocused)),
                    premises: Vec::new(),
                    class: 1,
                });
            }
        }
    }
    None
}

fn saturating_key(m: &GameMove) -> (u8, u8, u32, u8) {
    let (side, idx, _) = m.principal.expect("saturating moves carry a principal");
    (
        (m.rule == Rule::Acut) as u8,
        (side == Side::Right) as u8,
        idx,
        m.rule as u8,
    )
}

/// The least cumulative-and-productive saturating instance whose principal
/// sits in component `d`. Depends only on `d`'s contents and closure, which
/// is what makes rule choice uniform across sequents sharing a component.
fn best_saturating(ctx: &Ctx, pos: &Pos, d: Side, class: u8) -> Option<GameMove> {
    let bits = pos.bits(d);
    let mut best: Option<GameMove> = None;
    let mut consider = |m: GameMove| {
        if best.as_ref().map(|b| saturating_key(&m) < saturating_key(b)).unwrap_or(true) {
            best = Some(m);
        }
    };

    let single = |adds: &[u32], rule: Rule, i: u32| -> Option<GameMove> {
        if adds.iter().all(|&a| bits.get(a)) {
            return None;
        }
        let mut premise = pos.clone();
        for &a in adds {
            premise.bits_mut(d).set(a);
        }
        Some(GameMove {
            rule,
            side: d,
            principal: Some((d, i, Annotation::Unfocused)),
            premises: vec![premise],
            class,
        })
    };
    let branching = |adds: &[u32], rule: Rule, i: u32| -> Option<GameMove> {
        if adds.iter().any(|&a| bits.get(a)) {
            return None;
        }
        let premises = adds
            .iter()
            .map(|&a| {
                let mut premise = pos.clone();
                premise.bits_mut(d).set(a);
                premise
            })
            .collect();
        Some(GameMove {
            rule,
            side: d,
            principal: Some((d, i, Annotation::Unfocused)),
            premises,
            class,
        })
    };

    for i in bits.ones() {
        let m = match ctx.shape[i as usize].clone() {
            Shape::And(l, r) => single(&[l, r], Rule::And, i),
            Shape::Or(l, r) => branching(&[l, r], Rule::Or, i),
            Shape::DiaSeq(x) => single(&[x], Rule::DiaSeq, i),
            Shape::BoxSeq(x) => single(&[x], Rule::BoxSeq, i),
            Shape::DiaChoice(l, r) => branching(&[l, r], Rule::DiaChoice, i),
            Shape::BoxChoice(l, r) => single(&[l, r], Rule::BoxChoice, i),
            Shape::DiaStar(u, e) => branching(&[u, e], Rule::DiaStar, i),
            Shape::BoxStar(u, e) => single(&[u, e], Rule::BoxStar, i),
            Shape::DiaTest(t, b) => single(&[t, b], Rule::DiaTest, i),
            Shape::BoxTest(t, b) => branching(&[t, b], Rule::BoxTest, i),
            _ => None,
        };
        if let Some(m) = m {
            consider(m);
        }
    }
    // Analytic cut over the closure of the component as it stands,
    // canonical on the smaller of the pair.
    for i in ctx.component_closure(pos, d).ones() {
        let neg = ctx.neg[i as usize];
        if neg < i || bits.get(i) || bits.get(neg) {
            continue;
        }
        if let Some(m) = branching_acut(ctx, pos, d, class, i, neg) {
            consider(m);
        }
    }
    best
}

fn branching_acut(
    _ctx: &Ctx,
    pos: &Pos,
    d: Side,
    class: u8,
    cut: u32,
    neg: u32,
) -> Option<GameMove> {
    let mut p1 = pos.clone();
    p1.bits_mut(d).set(cut);
    let mut p2 = pos.clone();
    p2.bits_mut(d).set(neg);
    Some(GameMove {
        rule: Rule::Acut,
        side: d,
        principal: Some((d, cut, Annotation::Unfocused)),
        premises: vec![p1, p2],
        class,
    })
}

fn refocus_move(pos: &Pos, rule: Rule, fs: Side, fi: u32, targets: &[u32]) -> GameMove {
    let premises = targets
        .iter()
        .map(|&t| {
            let mut premise = pos.clone();
            premise.focus = Some((fs, t));
            premise
        })
        .collect();
    GameMove {
        rule,
        side: fs,
        principal: Some((fs, fi, Annotation::Focused)),
        premises,
        class: 5,
    }
}

/// Premise of the modal rule: strip the boxes over the same action, keep the
/// body of the focused diamond in focus, and wrap everything else in the
/// converse diamond where the component's closure admits it.
pub(crate) fn modal_premise(
    ctx: &Ctx,
    pos: &Pos,
    fs: Side,
    action: &AtomicAction,
    body: u32,
) -> Pos {
    let conv = action.converse();
    let mut premise = Pos {
        left: Bits::empty(ctx.words),
        right: Bits::empty(ctx.words),
        focus: Some((fs, body)),
    };
    for side in [Side::Left, Side::Right] {
        let closure = ctx.component_closure(pos, side);
        for i in pos.bits(side).ones() {
            match &ctx.shape[i as usize] {
                Shape::BoxAtom(a, b) if a == action => premise.bits_mut(side).set(*b),
                _ => {
                    if let Some(w) = ctx.wrap_index(&conv, i) {
                        if closure.get(w) {
                            premise.bits_mut(side).set(w);
                        }
                    }
                }
            }
        }
    }
    premise
}

/// A rule-instance position.
pub(crate) struct Inst {
    pub rule: Rule,
    pub side: Side,
    pub principal: Option<(Side, u32, Annotation)>,
    pub premises: Vec<u32>,
    pub class: u8,
}

/// The reachable game, built breadth-first from the root, with its parity
/// encoding. Sequent `s` is parity node `seq_node[s]`, instance `i` is
/// `inst_node[i]`.
pub(crate) struct SearchGame {
    pub ctx: Ctx,
    pub root: u32,
    pub seqs: Vec<Pos>,
    pub seq_moves: Vec<Vec<u32>>,
    pub insts: Vec<Inst>,
    pub pg: ParityGame,
    pub seq_node: Vec<u32>,
    pub inst_node: Vec<u32>,
}

impl SearchGame {
    pub fn build(ctx: Ctx, root: Pos, limits: &Limits) -> Result<SearchGame, Error> {
        let mut game = SearchGame {
            ctx,
            root: 0,
            seqs: Vec::new(),
            seq_moves: Vec::new(),
            insts: Vec::new(),
            pg: ParityGame::default(),
            seq_node: Vec::new(),
            inst_node: Vec::new(),
        };
        let mut lookup: HashMap<Pos, u32> = HashMap::new();
        let mut queue: Vec<u32> = Vec::new();

        let intern = |game: &mut SearchGame,
                          lookup: &mut HashMap<Pos, u32>,
                          queue: &mut Vec<u32>,
                          pos: Pos|
         -> u32 {
            if let Some(&id) = lookup.get(&pos) {
                return id;
            }
            let id = game.seqs.len() as u32;
            lookup.insert(pos.clone(), id);
            game.seqs.push(pos);
            game.seq_moves.push(Vec::new());
            game.seq_node.push(game.pg.add_position(Player::Exists, 0));
            queue.push(id);
            id
        };

        game.root = intern(&mut game, &mut lookup, &mut queue, root);

        let mut next = 0usize;
        while next < queue.len() {
            let seq_id = queue[next];
            next += 1;
            if game.pg.len() > limits.max_positions {
                return Err(Error::ResourceLimit(game.pg.len()));
            }
            if next % 1024 == 0 {
                limits.check_deadline()?;
            }
            let pos = game.seqs[seq_id as usize].clone();
            let has_focus = pos.has_focus();
            for m in pruned_moves(&game.ctx, &pos) {
                let priority = if !has_focus {
                    3
                } else if m.rule == Rule::Modal {
                    2
                } else {
                    1
                };
                let premise_ids: Vec<u32> = m
                    .premises
                    .iter()
                    .map(|p| intern(&mut game, &mut lookup, &mut queue, p.clone()))
                    .collect();
                let inst_id = game.insts.len() as u32;
                let node = game.pg.add_position(Player::Forall, priority);
                game.inst_node.push(node);
                game.pg.add_move(game.seq_node[seq_id as usize], node);
                for &p in &premise_ids {
                    game.pg.add_move(node, game.seq_node[p as usize]);
                }
                game.insts.push(Inst {
                    rule: m.rule,
                    side: m.side,
                    principal: m.principal,
                    premises: premise_ids,
                    class: m.class,
                });
                game.seq_moves[seq_id as usize].push(inst_id);
            }
        }
        Ok(game)
    }
}
