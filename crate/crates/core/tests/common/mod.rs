//! Deterministic random generators shared by the integration suites.

#![allow(dead_code)]

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

use cpdl_core::paritygame::{ParityGame, Player};
use cpdl_core::semantics::KripkeModel;
use cpdl_core::syntax::{AtomicAction, Formula, Program};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_formula(
    rng: &mut ChaCha8Rng,
    depth: usize,
    props: &[&str],
    actions: &[&str],
) -> Formula {
    if depth == 0 || rng.gen_bool(0.25) {
        return match rng.gen_range(0..6) {
            0 => Formula::top(),
            1 => Formula::bot(),
            2 | 3 => Formula::prop(props.choose(rng).unwrap()),
            _ => Formula::neg_prop(props.choose(rng).unwrap()),
        };
    }
    match rng.gen_range(0..4) {
        0 => Formula::and(
            random_formula(rng, depth - 1, props, actions),
            random_formula(rng, depth - 1, props, actions),
        ),
        1 => Formula::or(
            random_formula(rng, depth - 1, props, actions),
            random_formula(rng, depth - 1, props, actions),
        ),
        2 => Formula::dia(
            random_program(rng, depth - 1, props, actions),
            random_formula(rng, depth - 1, props, actions),
        ),
        _ => Formula::boxm(
            random_program(rng, depth - 1, props, actions),
            random_formula(rng, depth - 1, props, actions),
        ),
    }
}

pub fn random_program(
    rng: &mut ChaCha8Rng,
    depth: usize,
    props: &[&str],
    actions: &[&str],
) -> Program {
    if depth == 0 || rng.gen_bool(0.4) {
        let base = actions.choose(rng).unwrap();
        return Program::atom(if rng.gen_bool(0.5) {
            AtomicAction::forward(base)
        } else {
            AtomicAction::backward(base)
        });
    }
    match rng.gen_range(0..4) {
        0 => Program::seq(
            random_program(rng, depth - 1, props, actions),
            random_program(rng, depth - 1, props, actions),
        ),
        1 => Program::choice(
            random_program(rng, depth - 1, props, actions),
            random_program(rng, depth - 1, props, actions),
        ),
        2 => Program::star(random_program(rng, depth - 1, props, actions)),
        _ => Program::test(random_formula(rng, depth - 1, props, actions)),
    }
}

pub fn random_model(
    rng: &mut ChaCha8Rng,
    max_states: usize,
    actions: &[&str],
    props: &[&str],
) -> KripkeModel {
    let n = rng.gen_range(1..=max_states);
    let mut model =
        KripkeModel::new((0..n).map(|i| format!("s{i}")).collect()).expect("fresh names");
    for action in actions {
        for s in 0..n {
            for t in 0..n {
                if rng.gen_bool(0.3) {
                    model.add_edge(action, s, t);
                }
            }
        }
    }
    for prop in props {
        for s in 0..n {
            if rng.gen_bool(0.5) {
                model.add_val(prop, s);
            }
        }
    }
    model
}

pub fn random_game(rng: &mut ChaCha8Rng, max_positions: usize, max_priority: u32) -> ParityGame {
    let n = rng.gen_range(1..=max_positions);
    let mut game = ParityGame::default();
    for _ in 0..n {
        let owner = if rng.gen_bool(0.5) { Player::Exists } else { Player::Forall };
        game.add_position(owner, rng.gen_range(0..=max_priority));
    }
    for v in 0..n as u32 {
        let out_degree = rng.gen_range(0..=2);
        for _ in 0..out_degree {
            game.add_move(v, rng.gen_range(0..n as u32));
        }
    }
    game
}

/// Reference parity-game solver: enumerate Verifier's positional strategies
/// and evaluate the one-player game each leaves for Refuter. Verifier wins a
/// position iff some strategy defeats every Refuter behaviour from it.
pub fn brute_force_winners(game: &ParityGame) -> Vec<Player> {
    let n = game.len();
    let exists_nodes: Vec<usize> = (0..n)
        .filter(|&v| game.owner[v] == Player::Exists && !game.moves[v].is_empty())
        .collect();
    let mut exists_wins = vec![false; n];

    let mut choice: Vec<usize> = vec![0; exists_nodes.len()];
    loop {
        let strategy: Vec<Option<u32>> = {
            let mut s = vec![None; n];
            for (k, &v) in exists_nodes.iter().enumerate() {
                s[v] = Some(game.moves[v][choice[k]]);
            }
            s
        };
        let refuter_wins = refuter_wins_under(game, &strategy);
        for v in 0..n {
            if !refuter_wins[v] {
                exists_wins[v] = true;
            }
        }

        // Next strategy profile.
        let mut k = 0;
        loop {
            if k == exists_nodes.len() {
                return (0..n)
                    .map(|v| if exists_wins[v] { Player::Exists } else { Player::Forall })
                    .collect();
            }
            choice[k] += 1;
            if choice[k] < game.moves[exists_nodes[k]].len() {
                break;
            }
            choice[k] = 0;
            k += 1;
        }
    }
}

/// With Verifier's strategy fixed, Refuter wins from a position iff he can
/// steer the play to a stuck Verifier position or onto a cycle whose maximal
/// priority is odd.
fn refuter_wins_under(game: &ParityGame, strategy: &[Option<u32>]) -> Vec<bool> {
    let n = game.len();
    let succs: Vec<Vec<u32>> = (0..n)
        .map(|v| {
            if game.owner[v] == Player::Exists {
                strategy[v].into_iter().collect()
            } else {
                game.moves[v].clone()
            }
        })
        .collect();

    let mut bad = vec![false; n];
    for v in 0..n {
        if game.owner[v] == Player::Exists && game.moves[v].is_empty() {
            bad[v] = true;
        }
    }
    let max_priority = game.priority.iter().copied().max().unwrap_or(0);
    for d in (0..=max_priority).filter(|d| d % 2 == 1) {
        let allowed: Vec<bool> = (0..n).map(|v| game.priority[v] <= d).collect();
        mark_cyclic_through(game, &succs, &allowed, d, &mut bad);
    }

    // Backward reachability of a bad target along the restricted graph.
    let mut preds: Vec<Vec<usize>> = vec![Vec::new(); n];
    for v in 0..n {
        for &w in &succs[v] {
            preds[w as usize].push(v);
        }
    }
    let mut reach = bad.clone();
    let mut queue: Vec<usize> = (0..n).filter(|&v| reach[v]).collect();
    while let Some(w) = queue.pop() {
        for &v in &preds[w] {
            if !reach[v] {
                reach[v] = true;
                queue.push(v);
            }
        }
    }
    reach
}

/// Marks every position of priority `d` lying on a cycle within `allowed`.
fn mark_cyclic_through(
    game: &ParityGame,
    succs: &[Vec<u32>],
    allowed: &[bool],
    d: u32,
    bad: &mut [bool],
) {
    let n = game.len();
    // Repeatedly prune positions without allowed successors/predecessors to
    // find the cyclic core of the restriction.
    let mut alive: Vec<bool> = allowed.to_vec();
    loop {
        let mut changed = false;
        for v in 0..n {
            if !alive[v] {
                continue;
            }
            let has_succ = succs[v].iter().any(|&w| alive[w as usize]);
            if !has_succ {
                alive[v] = false;
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
    // Within the pruned core every position has a successor in the core, so
    // every core position reaches a cycle; a `d`-priority position on an
    // actual cycle is one that can reach itself.
    for v in 0..n {
        if !alive[v] || game.priority[v] != d {
            continue;
        }
        // BFS from v's successors back to v.
        let mut seen = vec![false; n];
        let mut queue: Vec<u32> = succs[v].iter().copied().filter(|&w| alive[w as usize]).collect();
        for &w in &queue {
            seen[w as usize] = true;
        }
        let mut hit = false;
        while let Some(w) = queue.pop() {
            if w as usize == v {
                hit = true;
                break;
            }
            for &u in &succs[w as usize] {
                if alive[u as usize] && !seen[u as usize] {
                    seen[u as usize] = true;
                    queue.push(u);
                }
            }
        }
        if hit {
            bad[v] = true;
        }
    }
}
