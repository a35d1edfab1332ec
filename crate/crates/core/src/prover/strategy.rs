//! Prover's positional strategy and the unfolding into a cyclic proof.
//!
//! The solver's strategy is already winning; on top of it we prefer the
//! modal step over conceding the focus wherever both win, then re-validate
//! and keep the refinement only if it stays winning. Unfolding closes a
//! branch at the first node whose sequent equals a proper ancestor's and
//! whose repeat path is successful; with a validated winning strategy every
//! strategy cycle keeps a focus and crosses a modal step, so the first
//! repeat qualifies and unfolding stays within the depth bound.

use std::collections::BTreeMap;

use crate::calculus::{Annotation, AnnotatedFormula, Rule};
use crate::error::Error;
use crate::paritygame::{self, Player, Solution};

use super::game::SearchGame;
use super::proof::{CyclicProof, ProofNode};

/// For every Prover-winning sequent, the chosen instance.
pub(crate) fn uniform_strategy(
    game: &SearchGame,
    solution: &Solution,
) -> Result<Vec<Option<u32>>, Error> {
    let mut node_to_inst: BTreeMap<u32, u32> = BTreeMap::new();
    for (i, &node) in game.inst_node.iter().enumerate() {
        node_to_inst.insert(node, i as u32);
    }

    let base: Vec<Option<u32>> = (0..game.seqs.len())
        .map(|s| {
            if solution.winner[game.seq_node[s] as usize] != Player::Exists {
                return None;
            }
            solution.strategy[game.seq_node[s] as usize]
                .and_then(|node| node_to_inst.get(&node).copied())
        })
        .collect();

    // The solver's strategy is winning but indifferent to the uniform
    // discipline: where several instances win, prefer the lowest class and,
    // within class 6, the modal step. Each switch is kept only if the
    // strategy stays winning (no odd cycle sneaks in).
    let preference = |inst: u32| -> (u8, u8) {
        let im = &game.insts[inst as usize];
        let within = match im.rule {
            Rule::Modal => 0,
            Rule::Unfocus => 2,
            _ => 1,
        };
        (im.class, within)
    };
    let mut switches: Vec<(usize, u32)> = Vec::new();
    for s in 0..game.seqs.len() {
        let Some(current) = base[s] else { continue };
        let best = game.seq_moves[s]
            .iter()
            .copied()
            .filter(|&i| solution.winner[game.inst_node[i as usize] as usize] == Player::Exists)
            .min_by_key(|&i| preference(i));
        if let Some(best) = best {
            if best != current && preference(best) < preference(current) {
                switches.push((s, best));
            }
        }
    }
    if switches.is_empty() {
        return Ok(base);
    }

    let validate_with = |refined: &[Option<u32>]| -> bool {
        let mut pg_strategy = solution.strategy.clone();
        for s in 0..game.seqs.len() {
            if let Some(inst) = refined[s] {
                pg_strategy[game.seq_node[s] as usize] = Some(game.inst_node[inst as usize]);
            }
        }
        let candidate = Solution { winner: solution.winner.clone(), strategy: pg_strategy };
        paritygame::validate(&game.pg, &candidate).is_ok()
    };

    // All switches at once is almost always fine; fall back to one at a time
    // when the batch introduces an odd cycle.
    let mut refined = base.clone();
    for &(s, inst) in &switches {
        refined[s] = Some(inst);
    }
    if validate_with(&refined) {
        return Ok(refined);
    }
    let mut refined = base.clone();
    for &(s, inst) in &switches {
        let previous = refined[s];
        refined[s] = Some(inst);
        if !validate_with(&refined) {
            refined[s] = previous;
        }
    }
    Ok(refined)
}

struct Frame {
    seq: u32,
    node: usize,
    inst: Option<u32>,
    next_premise: usize,
    companionable: bool,
}

/// Depth-first unfolding of the strategy into a finite proof tree with
/// backlinks.
pub(crate) fn extract_cyclic_proof(
    game: &SearchGame,
    strategy: &[Option<u32>],
) -> Result<CyclicProof, Error> {
    let depth_bound = game.seqs.len() * (game.ctx.formulas.len() + 1) + 1;
    let node_budget: usize = 2_000_000;

    let mut nodes: Vec<ProofNode> = Vec::new();
    let mut backlinks: BTreeMap<usize, usize> = BTreeMap::new();
    let mut stack: Vec<Frame> = Vec::new();
    // Proof-node ids of ancestors with a given sequent, innermost last.
    let mut active: BTreeMap<u32, Vec<usize>> = BTreeMap::new();

    let root_frame = open_node(game, strategy, &mut nodes, &mut backlinks, &stack, &active, game.root)?;
    push_frame(&mut stack, &mut active, root_frame);

    while let Some(top) = stack.last_mut() {
        let premises: &[u32] = match top.inst {
            Some(inst) => &game.insts[inst as usize].premises,
            None => &[],
        };
        if top.next_premise >= premises.len() {
            let done = stack.pop().expect("stack top exists");
            if done.companionable {
                if let Some(v) = active.get_mut(&done.seq) {
                    v.pop();
                }
            }
            continue;
        }
        let child_seq = premises[top.next_premise];
        top.next_premise += 1;
        let parent_node = top.node;

        if stack.len() >= depth_bound {
            return Err(Error::Internal(
                "proof unfolding exceeded its depth bound; the strategy is not winning".into(),
            ));
        }
        if nodes.len() >= node_budget {
            return Err(Error::ResourceLimit(nodes.len()));
        }

        let frame =
            open_node(game, strategy, &mut nodes, &mut backlinks, &stack, &active, child_seq)?;
        nodes[parent_node].children.push(frame.node);
        push_frame(&mut stack, &mut active, frame);
    }

    Ok(CyclicProof { nodes, root: 0, backlinks })
}

fn push_frame(stack: &mut Vec<Frame>, active: &mut BTreeMap<u32, Vec<usize>>, frame: Frame) {
    if frame.companionable {
        active.entry(frame.seq).or_default().push(frame.node);
    }
    stack.push(frame);
}

/// Creates the proof node for `seq`: a repeat leaf when the nearest equal
/// ancestor closes a successful path, otherwise the node for the strategy's
/// instance (axioms yield childless frames).
fn open_node(
    game: &SearchGame,
    strategy: &[Option<u32>],
    nodes: &mut Vec<ProofNode>,
    backlinks: &mut BTreeMap<usize, usize>,
    stack: &[Frame],
    active: &BTreeMap<u32, Vec<usize>>,
    seq: u32,
) -> Result<Frame, Error> {
    let node_id = nodes.len();
    if let Some(&companion) = active.get(&seq).and_then(|v| v.last()) {
        if repeat_path_successful(game, stack, companion, seq) {
            nodes.push(ProofNode {
                sequent: game.ctx.extern_seq(&game.seqs[seq as usize]),
                rule: None,
                side: None,
                principal: None,
                children: Vec::new(),
            });
            backlinks.insert(node_id, companion);
            return Ok(Frame {
                seq,
                node: node_id,
                inst: None,
                next_premise: 0,
                companionable: false,
            });
        }
    }
    let inst = strategy[seq as usize].ok_or_else(|| {
        Error::Internal(format!(
            "strategy undefined at a reachable winning sequent [{}]",
            game.ctx.extern_seq(&game.seqs[seq as usize])
        ))
    })?;
    let im = &game.insts[inst as usize];
    let principal = im.principal.map(|(side, idx, ann)| {
        let formula = game.ctx.formula(idx).clone();
        (
            side,
            match ann {
                Annotation::Focused => AnnotatedFormula::focused(formula),
                Annotation::Unfocused => AnnotatedFormula::unfocused(formula),
            },
        )
    });
    nodes.push(ProofNode {
        sequent: game.ctx.extern_seq(&game.seqs[seq as usize]),
        rule: Some(im.rule),
        side: Some(im.side),
        principal,
        children: Vec::new(),
    });
    Ok(Frame {
        seq,
        node: node_id,
        inst: Some(inst),
        next_premise: 0,
        companionable: !im.premises.is_empty(),
    })
}

/// Success of the candidate repeat path: every sequent from the companion
/// frame to the top of the stack (and the repeat itself) keeps a focus, and
/// somewhere on the path the applied instance acts on its focused formula.
fn repeat_path_successful(
    game: &SearchGame,
    stack: &[Frame],
    companion_node: usize,
    leaf_seq: u32,
) -> bool {
    let Some(start) = stack.iter().position(|f| f.node == companion_node) else {
        return false;
    };
    if game.seqs[leaf_seq as usize].focus.is_none() {
        return false;
    }
    let mut principal_somewhere = false;
    for frame in &stack[start..] {
        let pos = &game.seqs[frame.seq as usize];
        let Some(focus) = pos.focus else { return false };
        if let Some(inst) = frame.inst {
            let im = &game.insts[inst as usize];
            if im.principal == Some((focus.0, focus.1, Annotation::Focused)) {
                principal_somewhere = true;
            }
        }
    }
    principal_somewhere
}
