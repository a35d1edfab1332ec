//! Finite parity games with positional solving.
//!
//! Convention, fixed here once for all encoders: an infinite play is won by
//! [`Player::Exists`] iff the maximum priority occurring infinitely often is
//! even, and a player who gets stuck at a dead-end position they own loses.
//! The solver is Zielonka's recursive attractor decomposition, which is
//! plenty at the scale this crate works at (priorities never exceed 3).

use std::fmt::Write as _;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Player {
    Exists,
    Forall,
}

impl Player {
    pub fn opponent(self) -> Player {
        match self {
            Player::Exists => Player::Forall,
            Player::Forall => Player::Exists,
        }
    }

    /// The parity this player wants the maximal recurring priority to have.
    fn likes(self, priority: u32) -> bool {
        match self {
            Player::Exists => priority % 2 == 0,
            Player::Forall => priority % 2 == 1,
        }
    }
}

/// A finite game graph. Position `i` is owned by `owner[i]`, carries
/// `priority[i]`, and may move to each of `moves[i]`.
#[derive(Clone, Debug, Default)]
pub struct ParityGame {
    pub owner: Vec<Player>,
    pub priority: Vec<u32>,
    pub moves: Vec<Vec<u32>>,
}

impl ParityGame {
    pub fn len(&self) -> usize {
        self.owner.len()
    }

    pub fn is_empty(&self) -> bool {
        self.owner.is_empty()
    }

    pub fn add_position(&mut self, owner: Player, priority: u32) -> u32 {
        self.owner.push(owner);
        self.priority.push(priority);
        self.moves.push(Vec::new());
        (self.len() - 1) as u32
    }

    pub fn add_move(&mut self, from: u32, to: u32) {
        debug_assert!((to as usize) < self.len());
        self.moves[from as usize].push(to);
    }

    /// Graphviz dump of the (optionally solved) game, for debugging.
    pub fn to_dot(&self, solution: Option<&Solution>) -> String {
        let mut s = String::from("digraph parity {\n");
        for v in 0..self.len() {
            let shape = match self.owner[v] {
                Player::Exists => "ellipse",
                Player::Forall => "box",
            };
            let color = match solution.map(|sol| sol.winner[v]) {
                Some(Player::Exists) => ",color=green",
                Some(Player::Forall) => ",color=red",
                None => "",
            };
            let _ = writeln!(s, "  n{v} [shape={shape},label=\"{v}:{}\"{color}];", self.priority[v]);
        }
        for v in 0..self.len() {
            for &w in &self.moves[v] {
                let style = match solution.and_then(|sol| sol.strategy[v]) {
                    Some(t) if t == w => ",style=bold",
                    _ => "",
                };
                let _ = writeln!(s, "  n{v} -> n{w} [dir=forward{style}];");
            }
        }
        s.push_str("}\n");
        s
    }
}

/// Winner partition plus positional strategies. `strategy[v]` is defined
/// exactly when `v` is owned by its winner and has at least one move; it
/// always points back into that winner's region.
#[derive(Clone, Debug)]
pub struct Solution {
    pub winner: Vec<Player>,
    pub strategy: Vec<Option<u32>>,
}

/// Solves the game: every position is won by exactly one player, with a
/// positional strategy on that player's region.
pub fn solve(game: &ParityGame) -> Solution {
    // Totalize: a stuck owner loses, which is the same as being routed into
    // a sink that cycles at the priority of the opponent's parity.
    let n = game.len();
    let mut total = game.clone();
    let sink_exists_loses = total.add_position(Player::Exists, 1);
    total.add_move(sink_exists_loses, sink_exists_loses);
    let sink_forall_loses = total.add_position(Player::Forall, 0);
    total.add_move(sink_forall_loses, sink_forall_loses);
    for v in 0..n {
        if total.moves[v].is_empty() {
            let sink = match total.owner[v] {
                Player::Exists => sink_exists_loses,
                Player::Forall => sink_forall_loses,
            };
            total.add_move(v as u32, sink);
        }
    }

    let m = total.len();
    let mut preds: Vec<Vec<u32>> = vec![Vec::new(); m];
    for v in 0..m {
        for &w in &total.moves[v] {
            preds[w as usize].push(v as u32);
        }
    }
    let mut solver = Zielonka {
        game: &total,
        preds,
        winner: vec![Player::Exists; m],
        strategy: vec![None; m],
    };
    let alive = vec![true; m];
    solver.solve(&alive);
    let Zielonka { mut winner, mut strategy, .. } = solver;
    winner.truncate(n);
    strategy.truncate(n);
    // Attractor computations leave moves behind at positions later claimed by
    // the other player, and dead ends point at a sink; the strategy is only
    // meaningful where the winner owns the position and has a real move.
    for v in 0..n {
        if winner[v] != game.owner[v] || game.moves[v].is_empty() {
            strategy[v] = None;
        }
    }
    Solution { winner, strategy }
}

struct Zielonka<'a> {
    game: &'a ParityGame,
    preds: Vec<Vec<u32>>,
    winner: Vec<Player>,
    strategy: Vec<Option<u32>>,
}

impl<'a> Zielonka<'a> {
    /// Solves the subgame on `alive`, filling `winner` and `strategy` for
    /// every alive position. The carve-out loop keeps the recursion depth
    /// bounded by the number of distinct priorities.
    fn solve(&mut self, alive: &[bool]) {
        let mut alive = alive.to_vec();
        loop {
            let live: Vec<u32> =
                (0..self.game.len() as u32).filter(|&v| alive[v as usize]).collect();
            if live.is_empty() {
                return;
            }
            let top = live.iter().map(|&v| self.game.priority[v as usize]).max().unwrap();
            let player = if top % 2 == 0 { Player::Exists } else { Player::Forall };

            let targets: Vec<u32> = live
                .iter()
                .copied()
                .filter(|&v| self.game.priority[v as usize] == top)
                .collect();
            let in_attr = self.attract(&alive, player, &targets);

            let mut rest = alive.clone();
            for v in 0..self.game.len() {
                if in_attr[v] {
                    rest[v] = false;
                }
            }
            self.solve(&rest);

            let opponent = player.opponent();
            let escape: Vec<u32> = live
                .iter()
                .copied()
                .filter(|&v| rest[v as usize] && self.winner[v as usize] == opponent)
                .collect();

            if escape.is_empty() {
                // `player` wins the whole subgame: attracted positions follow
                // the attractor strategy, top-priority positions move
                // anywhere alive.
                for &v in &live {
                    if in_attr[v as usize] {
                        self.winner[v as usize] = player;
                    }
                }
                for &v in &targets {
                    if self.game.owner[v as usize] == player {
                        self.strategy[v as usize] = self.game.moves[v as usize]
                            .iter()
                            .copied()
                            .find(|&w| alive[w as usize]);
                    }
                }
                return;
            }
            // The opponent holds part of the subgame; carve out its
            // attractor and re-run on the remainder.
            let opp_attr = self.attract(&alive, opponent, &escape);
            for v in 0..self.game.len() {
                if opp_attr[v] {
                    alive[v] = false;
                    self.winner[v] = opponent;
                }
            }
        }
    }

    /// Attractor of `targets` for `player` inside `alive`. Records the
    /// attracting move for `player`-owned positions pulled in, and leaves the
    /// strategy of the targets themselves to the caller. A position of the
    /// opponent is attracted once all of its alive moves (possibly none) lead
    /// into the attractor, so opponent dead ends are attracted outright.
    fn attract(&mut self, alive: &[bool], player: Player, targets: &[u32]) -> Vec<bool> {
        let n = self.game.len();
        let mut in_attr = vec![false; n];
        let mut queue: Vec<u32> = Vec::new();
        for &v in targets {
            if !in_attr[v as usize] {
                in_attr[v as usize] = true;
                queue.push(v);
            }
        }
        let mut out_count = vec![0usize; n];
        for v in 0..n {
            if alive[v] && self.game.owner[v] != player {
                out_count[v] = self.game.moves[v].iter().filter(|&&w| alive[w as usize]).count();
                if out_count[v] == 0 && !in_attr[v] {
                    in_attr[v] = true;
                    queue.push(v as u32);
                }
            }
        }
        let mut i = 0;
        while i < queue.len() {
            let w = queue[i];
            i += 1;
            let preds = std::mem::take(&mut self.preds[w as usize]);
            for &v in &preds {
                let vu = v as usize;
                if !alive[vu] || in_attr[vu] {
                    continue;
                }
                if self.game.owner[vu] == player {
                    in_attr[vu] = true;
                    self.strategy[vu] = Some(w);
                    queue.push(v);
                } else {
                    out_count[vu] -= 1;
                    if out_count[vu] == 0 {
                        in_attr[vu] = true;
                        queue.push(v);
                    }
                }
            }
            self.preds[w as usize] = preds;
        }
        in_attr
    }
}

/// Checks that a solution is sound: strategies stay inside the winning
/// region, every cycle of the strategy-restricted subgraph has the winner's
/// parity, and the winner never owns a dead end of that subgraph. Returns a
/// description of the first defect found.
pub fn validate(game: &ParityGame, solution: &Solution) -> Result<(), String> {
    for player in [Player::Exists, Player::Forall] {
        validate_region(game, solution, player)?;
    }
    Ok(())
}

fn restricted_successors(
    game: &ParityGame,
    solution: &Solution,
    player: Player,
    v: u32,
) -> Vec<u32> {
    if game.owner[v as usize] == player {
        solution.strategy[v as usize].into_iter().collect()
    } else {
        game.moves[v as usize].clone()
    }
}

fn validate_region(game: &ParityGame, solution: &Solution, player: Player) -> Result<(), String> {
    let n = game.len();
    let in_region: Vec<bool> = (0..n).map(|v| solution.winner[v] == player).collect();

    for v in 0..n as u32 {
        if !in_region[v as usize] {
            continue;
        }
        if game.owner[v as usize] == player {
            if game.moves[v as usize].is_empty() {
                return Err(format!("winner owns dead end {v}"));
            }
            match solution.strategy[v as usize] {
                None => return Err(format!("winner has no strategy at position {v}")),
                Some(t) if !game.moves[v as usize].contains(&t) => {
                    return Err(format!("strategy at {v} is not a legal move"));
                }
                _ => {}
            }
        }
        for w in restricted_successors(game, solution, player, v) {
            if !in_region[w as usize] {
                return Err(format!("play can escape the winning region via {v} -> {w}"));
            }
        }
    }

    // No cycle whose maximal priority favours the opponent: for each
    // opponent-parity priority d, the restriction to priorities <= d must not
    // contain a cycle through a priority-d position.
    let opponent = player.opponent();
    let max_pri = game.priority.iter().copied().max().unwrap_or(0);
    for d in 0..=max_pri {
        if !opponent.likes(d) {
            continue;
        }
        let allowed: Vec<bool> = (0..n).map(|v| in_region[v] && game.priority[v] <= d).collect();
        if let Some(v) = cycle_through_priority(game, solution, player, &allowed, d) {
            return Err(format!(
                "strategy admits a cycle of maximal priority {d} through position {v}"
            ));
        }
    }
    Ok(())
}

/// Looks for a cycle, inside `allowed`, through a position of priority
/// exactly `d`, in the strategy-restricted subgraph.
fn cycle_through_priority(
    game: &ParityGame,
    solution: &Solution,
    player: Player,
    allowed: &[bool],
    d: u32,
) -> Option<u32> {
    let n = game.len();
    let succs: Vec<Vec<u32>> = (0..n as u32)
        .map(|v| {
            if allowed[v as usize] {
                restricted_successors(game, solution, player, v)
                    .into_iter()
                    .filter(|&w| allowed[w as usize])
                    .collect()
            } else {
                Vec::new()
            }
        })
        .collect();

    for comp in tarjan_sccs(n, &succs, allowed) {
        let cyclic = comp.len() > 1
            || succs[comp[0] as usize].contains(&comp[0]);
        if cyclic {
            if let Some(&v) = comp.iter().find(|&&v| game.priority[v as usize] == d) {
                return Some(v);
            }
        }
    }
    None
}

/// Iterative Tarjan over the listed successor sets.
fn tarjan_sccs(n: usize, succs: &[Vec<u32>], allowed: &[bool]) -> Vec<Vec<u32>> {
    let mut index = vec![usize::MAX; n];
    let mut low = vec![0usize; n];
    let mut on_stack = vec![false; n];
    let mut stack: Vec<u32> = Vec::new();
    let mut next = 0usize;
    let mut comps = Vec::new();

    for root in 0..n as u32 {
        if !allowed[root as usize] || index[root as usize] != usize::MAX {
            continue;
        }
        // (node, next successor offset)
        let mut call: Vec<(u32, usize)> = vec![(root, 0)];
        index[root as usize] = next;
        low[root as usize] = next;
        next += 1;
        stack.push(root);
        on_stack[root as usize] = true;

        while let Some(&mut (v, ref mut si)) = call.last_mut() {
            if *si < succs[v as usize].len() {
                let w = succs[v as usize][*si];
                *si += 1;
                if index[w as usize] == usize::MAX {
                    index[w as usize] = next;
                    low[w as usize] = next;
                    next += 1;
                    stack.push(w);
                    on_stack[w as usize] = true;
                    call.push((w, 0));
                } else if on_stack[w as usize] && index[w as usize] < low[v as usize] {
                    low[v as usize] = index[w as usize];
                }
            } else {
                if low[v as usize] == index[v as usize] {
                    let mut comp = Vec::new();
                    loop {
                        let w = stack.pop().unwrap();
                        on_stack[w as usize] = false;
                        comp.push(w);
                        if w == v {
                            break;
                        }
                    }
                    comps.push(comp);
                }
                call.pop();
                if let Some(&(p, _)) = call.last() {
                    if low[v as usize] < low[p as usize] {
                        low[p as usize] = low[v as usize];
                    }
                }
            }
        }
    }
    comps
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn even_self_loop_wins_for_exists() {
        let mut g = ParityGame::default();
        let v = g.add_position(Player::Exists, 0);
        g.add_move(v, v);
        let sol = solve(&g);
        assert_eq!(sol.winner[0], Player::Exists);
        assert_eq!(sol.strategy[0], Some(0));
        validate(&g, &sol).unwrap();
    }

    #[test]
    fn stuck_owner_loses() {
        let mut g = ParityGame::default();
        g.add_position(Player::Exists, 0);
        let sol = solve(&g);
        assert_eq!(sol.winner[0], Player::Forall);
        validate(&g, &sol).unwrap();
    }

    #[test]
    fn chain_with_choice_point() {
        // Exists chooses between an even self-loop and an odd self-loop.
        let mut g = ParityGame::default();
        let a = g.add_position(Player::Exists, 1);
        let b = g.add_position(Player::Forall, 2);
        let c = g.add_position(Player::Forall, 1);
        g.add_move(a, b);
        g.add_move(a, c);
        g.add_move(b, b);
        g.add_move(c, c);
        let sol = solve(&g);
        assert_eq!(sol.winner[a as usize], Player::Exists);
        assert_eq!(sol.winner[b as usize], Player::Exists);
        assert_eq!(sol.winner[c as usize], Player::Forall);
        assert_eq!(sol.strategy[a as usize], Some(b));
        validate(&g, &sol).unwrap();
    }

    #[test]
    fn forced_odd_cycle_wins_for_forall() {
        // Exists must enter a cycle whose max priority is odd.
        let mut g = ParityGame::default();
        let a = g.add_position(Player::Exists, 0);
        let b = g.add_position(Player::Forall, 3);
        g.add_move(a, b);
        g.add_move(b, a);
        let sol = solve(&g);
        assert_eq!(sol.winner[a as usize], Player::Forall);
        assert_eq!(sol.winner[b as usize], Player::Forall);
        validate(&g, &sol).unwrap();
    }
}
