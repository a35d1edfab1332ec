//! Countermodel extraction from Builder's winning strategy.
//!
//! The model's states are the local paths of the strategy-pruned search
//! tree: maximal runs of saturation and focus-shuffling steps, Prover moving
//! by the uniform discipline and Builder picking premises by his winning
//! strategy. A crossing of the modal rule for an action `a` (possibly
//! prefixed by conceding the old focus and placing a new one) links two
//! local paths, and the converse direction is induced. The extracted model
//! is checked against the compositional semantics before it is returned:
//! every formula of the root sequent must hold at the witness state.

use std::collections::{BTreeMap, HashMap};

use crate::calculus::{Rule, Side, SplitSequent};
use crate::error::Error;
use crate::paritygame::{Player, Solution};
use crate::semantics::KripkeModel;
use crate::syntax::Direction;

use super::ctx::Shape;
use super::game::SearchGame;

/// A verified model for a satisfiable split sequent.
#[derive(Clone, Debug)]
pub struct Countermodel {
    pub model: KripkeModel,
    /// State at which every root formula holds.
    pub witness: usize,
    /// The local path each state came from.
    pub provenance: BTreeMap<usize, Vec<SplitSequent>>,
}

pub(crate) fn extract_countermodel(
    game: &SearchGame,
    solution: &Solution,
) -> Result<Countermodel, Error> {
    let builder = BuilderView::new(game, solution);

    // Discover all local paths, breadth-first over their start sequents.
    let mut state_of: HashMap<u32, usize> = HashMap::new();
    let mut paths: Vec<LocalPath> = Vec::new();

    let root_state = intern_path(game, &builder, game.root, &mut state_of, &mut paths)?;

    let mut edges: Vec<(String, usize, usize)> = Vec::new();
    let mut next = 0usize;
    while next < paths.len() {
        let state = next;
        next += 1;
        let end = paths[state].end;
        for (action_base, forward, target_start) in modal_successors(game, &builder, end)? {
            let target = intern_path(game, &builder, target_start, &mut state_of, &mut paths)?;
            if forward {
                edges.push((action_base, state, target));
            } else {
                edges.push((action_base, target, state));
            }
        }
        if paths.len() > game.seqs.len() {
            return Err(Error::Internal("more local paths than game positions".into()));
        }
    }

    let mut model = KripkeModel::new((0..paths.len()).map(|i| format!("s{i}")).collect())?;
    for (base, from, to) in edges {
        model.add_edge(&base, from, to);
    }
    let mut provenance = BTreeMap::new();
    for (state, path) in paths.iter().enumerate() {
        for &seq in &path.chain {
            let pos = &game.seqs[seq as usize];
            for side in [Side::Left, Side::Right] {
                for i in pos.member_indices(side) {
                    if let crate::syntax::FormulaKind::Prop(p) =
                        game.ctx.formula(i).kind()
                    {
                        let name = p.to_string();
                        model.add_val(&name, state);
                    }
                }
            }
        }
        provenance.insert(
            state,
            path.chain.iter().map(|&s| game.ctx.extern_seq(&game.seqs[s as usize])).collect(),
        );
    }

    // Verification: the witness satisfies everything in the root sequent.
    let root_seq = game.ctx.extern_seq(&game.seqs[game.root as usize]);
    for side in [Side::Left, Side::Right] {
        for af in root_seq.component(side).iter() {
            if !model.satisfies(root_state, &af.formula) {
                return Err(Error::VerificationFailure(format!(
                    "extracted model does not satisfy {} at the witness",
                    af.formula
                )));
            }
        }
    }

    Ok(Countermodel { model, witness: root_state, provenance })
}

struct LocalPath {
    chain: Vec<u32>,
    end: u32,
}

struct BuilderView<'a> {
    game: &'a SearchGame,
    solution: &'a Solution,
    /// parity node id -> sequent id
    seq_of_node: HashMap<u32, u32>,
}

impl<'a> BuilderView<'a> {
    fn new(game: &'a SearchGame, solution: &'a Solution) -> BuilderView<'a> {
        let seq_of_node =
            game.seq_node.iter().enumerate().map(|(s, &n)| (n, s as u32)).collect();
        BuilderView { game, solution, seq_of_node }
    }

    fn wins(&self, seq: u32) -> bool {
        self.solution.winner[self.game.seq_node[seq as usize] as usize] == Player::Forall
    }

    /// Builder's chosen premise at an instance.
    fn choice(&self, inst: u32) -> Result<u32, Error> {
        let im = &self.game.insts[inst as usize];
        if im.premises.len() == 1 {
            return Ok(im.premises[0]);
        }
        let node = self.game.inst_node[inst as usize];
        let target = self.solution.strategy[node as usize]
            .ok_or_else(|| Error::Internal("builder has no strategy at a rule instance".into()))?;
        self.seq_of_node
            .get(&target)
            .copied()
            .ok_or_else(|| Error::Internal("builder strategy leaves the sequent positions".into()))
    }
}

/// Follows the deterministic saturation/focus steps from `start` until a
/// class-6 frontier, a dead end, or a revisit. Memoized per start sequent.
fn intern_path(
    game: &SearchGame,
    builder: &BuilderView,
    start: u32,
    state_of: &mut HashMap<u32, usize>,
    paths: &mut Vec<LocalPath>,
) -> Result<usize, Error> {
    if let Some(&s) = state_of.get(&start) {
        return Ok(s);
    }
    if !builder.wins(start) {
        return Err(Error::Internal(
            "local path reaches a sequent Builder does not win".into(),
        ));
    }
    let mut chain = vec![start];
    let mut seen: HashMap<u32, ()> = HashMap::from([(start, ())]);
    let mut cur = start;
    loop {
        if chain.len() > game.seqs.len() + 1 {
            return Err(Error::Internal("local path longer than the position space".into()));
        }
        let moves = &game.seq_moves[cur as usize];
        if moves.is_empty() {
            break;
        }
        let min_class = moves.iter().map(|&i| game.insts[i as usize].class).min().unwrap();
        if min_class == 6 {
            break;
        }
        if min_class == 1 {
            return Err(Error::Internal(
                "axiom applies on a local path Builder should be winning".into(),
            ));
        }
        let step = moves
            .iter()
            .copied()
            .find(|&i| game.insts[i as usize].class == min_class)
            .expect("minimum is attained");
        let next = builder.choice(step)?;
        if seen.insert(next, ()).is_some() {
            break;
        }
        chain.push(next);
        cur = next;
    }
    let id = paths.len();
    state_of.insert(start, id);
    paths.push(LocalPath { chain, end: cur });
    Ok(id)
}

/// All modal crossings available at the end of a local path: for every
/// atomic diamond in the saturated set, concede the current focus if it sits
/// elsewhere, place the focus, and cross the modal step. Returns
/// `(action base, is_forward, premise sequent)` triples.
fn modal_successors(
    game: &SearchGame,
    builder: &BuilderView,
    end: u32,
) -> Result<Vec<(String, bool, u32)>, Error> {
    let mut out = Vec::new();
    let end_pos = game.seqs[end as usize].clone();
    if game.seq_moves[end as usize].is_empty() {
        return Ok(out);
    }

    // Candidate diamonds: every atomic diamond among the members.
    for side in [Side::Left, Side::Right] {
        for i in end_pos.member_indices(side) {
            let Shape::DiaAtom(action, _) = &game.ctx.shape[i as usize] else {
                continue;
            };
            let target = cross_modal(game, builder, end, side, i)?;
            out.push((
                action.base.to_string(),
                action.direction == Direction::Forward,
                target,
            ));
        }
    }
    Ok(out)
}

/// Walks `end --(concede?)--(focus?)--(modal)--> premise` through real game
/// positions, following the single-premise instances.
fn cross_modal(
    game: &SearchGame,
    builder: &BuilderView,
    end: u32,
    side: Side,
    diamond: u32,
) -> Result<u32, Error> {
    let mut cur = end;
    // Concede a focus resting on a different formula.
    let focus = game.seqs[cur as usize].focus;
    if let Some((fs, fi)) = focus {
        if (fs, fi) != (side, diamond) {
            let concede = find_move(game, cur, |inst| inst.rule == Rule::Unfocus)?;
            cur = builder.choice(concede)?;
        }
    }
    // Place the focus if it is not already on our diamond.
    if game.seqs[cur as usize].focus != Some((side, diamond)) {
        let focus_move = find_move(game, cur, |inst| {
            inst.rule == Rule::Focus && inst.principal.map(|(s, i, _)| (s, i)) == Some((side, diamond))
        })?;
        cur = builder.choice(focus_move)?;
    }
    // Cross the modal step.
    let modal = find_move(game, cur, |inst| inst.rule == Rule::Modal)?;
    builder.choice(modal)
}

fn find_move(
    game: &SearchGame,
    seq: u32,
    pred: impl Fn(&super::game::Inst) -> bool,
) -> Result<u32, Error> {
    game.seq_moves[seq as usize]
        .iter()
        .copied()
        .find(|&i| pred(&game.insts[i as usize]))
        .ok_or_else(|| {
            Error::Internal(format!(
                "expected move missing at [{}]",
                game.ctx.extern_seq(&game.seqs[seq as usize])
            ))
        })
}
