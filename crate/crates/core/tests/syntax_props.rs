//! Property tests over the expression layer: the involutions, closure
//! behaviour, printing, and the shape of trace cycles.

mod common;

use std::collections::{BTreeMap, BTreeSet};

use proptest::prelude::*;

use cpdl_core::syntax::{
    fl_closure, fl_closure_neg, parse, trace_successors, Formula, FormulaKind, Program,
};

use common::{random_formula, random_program, rng};

fn formula_strategy() -> impl Strategy<Value = Formula> {
    // Drive the crate's own generator from proptest's seed stream.
    any::<u64>().prop_map(|seed| {
        let mut r = rng(seed);
        random_formula(&mut r, 4, &["p", "q", "r"], &["a", "b"])
    })
}

fn program_strategy() -> impl Strategy<Value = Program> {
    any::<u64>().prop_map(|seed| {
        let mut r = rng(seed.wrapping_add(1));
        random_program(&mut r, 3, &["p", "q"], &["a", "b"])
    })
}

proptest! {
    #[test]
    fn negation_is_an_involution(f in formula_strategy()) {
        prop_assert_eq!(f.negate().negate(), f);
    }

    #[test]
    fn converse_is_an_involution(p in program_strategy()) {
        prop_assert_eq!(p.converse().converse(), p);
    }

    #[test]
    fn involutions_preserve_vocabulary(f in formula_strategy(), p in program_strategy()) {
        prop_assert_eq!(f.vocabulary(), f.negate().vocabulary());
        prop_assert_eq!(p.vocabulary(), p.converse().vocabulary());
    }

    #[test]
    fn printing_round_trips(f in formula_strategy()) {
        prop_assert_eq!(parse(&f.to_string()).unwrap(), f);
    }

    #[test]
    fn closure_is_closed_and_contains_negated_closure(f in formula_strategy()) {
        let closure = fl_closure([&f]);
        for g in &closure {
            for succ in trace_successors(g) {
                prop_assert!(closure.contains(&succ));
            }
        }
        let with_neg = fl_closure_neg([&f]);
        for g in &closure {
            prop_assert!(with_neg.contains(g));
            prop_assert!(with_neg.contains(&g.negate()));
        }
    }
}

/// Any trace of length beyond the closure size revisits a formula.
#[test]
fn long_traces_revisit() {
    let mut r = rng(42);
    for _ in 0..200 {
        let f = random_formula(&mut r, 4, &["p", "q"], &["a", "b"]);
        let closure = fl_closure([&f]);
        let bound = closure.len();
        // Walk randomly along the trace relation.
        let mut seen = BTreeSet::new();
        let mut cur = f.clone();
        let mut revisited = false;
        for _ in 0..=bound {
            if !seen.insert(cur.clone()) {
                revisited = true;
                break;
            }
            let succs: Vec<Formula> = trace_successors(&cur).into_iter().collect();
            if succs.is_empty() {
                break;
            }
            cur = succs[(r.next_u32() as usize) % succs.len()].clone();
        }
        // Either the walk died at a literal or it revisited within the bound.
        assert!(revisited || seen.len() <= bound);
    }
}

use rand::RngCore;

/// On every cycle of the trace graph restricted to a closure, at least one
/// member is a fixpoint formula, and the modal members of the cycle are
/// either all diamonds or all boxes.
#[test]
fn trace_cycles_contain_fixpoints_of_constant_polarity() {
    let mut r = rng(43);
    for _ in 0..300 {
        let f = random_formula(&mut r, 4, &["p", "q"], &["a", "b"]);
        let closure: Vec<Formula> = fl_closure([&f]).into_iter().collect();
        let index: BTreeMap<&Formula, usize> =
            closure.iter().enumerate().map(|(i, g)| (g, i)).collect();
        let succs: Vec<Vec<usize>> = closure
            .iter()
            .map(|g| trace_successors(g).iter().map(|s| index[s]).collect())
            .collect();
        for scc in sccs(closure.len(), &succs) {
            let cyclic = scc.len() > 1 || succs[scc[0]].contains(&scc[0]);
            if !cyclic {
                continue;
            }
            assert!(
                scc.iter().any(|&v| closure[v].is_fixpoint()),
                "cycle without a fixpoint formula in the closure of {f}"
            );
            let diamonds = scc.iter().any(|&v| closure[v].is_diamond());
            let boxes = scc.iter().any(|&v| closure[v].is_box());
            assert!(
                !(diamonds && boxes),
                "trace cycle mixes diamond and box members in the closure of {f}"
            );
        }
    }
}

fn sccs(n: usize, succs: &[Vec<usize>]) -> Vec<Vec<usize>> {
    // Small iterative Tarjan; closures here have at most a few dozen nodes.
    let mut index = vec![usize::MAX; n];
    let mut low = vec![0usize; n];
    let mut on_stack = vec![false; n];
    let mut stack = Vec::new();
    let mut next = 0;
    let mut out = Vec::new();
    for root in 0..n {
        if index[root] != usize::MAX {
            continue;
        }
        let mut call = vec![(root, 0usize)];
        index[root] = next;
        low[root] = next;
        next += 1;
        stack.push(root);
        on_stack[root] = true;
        while let Some(&mut (v, ref mut si)) = call.last_mut() {
            if *si < succs[v].len() {
                let w = succs[v][*si];
                *si += 1;
                if index[w] == usize::MAX {
                    index[w] = next;
                    low[w] = next;
                    next += 1;
                    stack.push(w);
                    on_stack[w] = true;
                    call.push((w, 0));
                } else if on_stack[w] && index[w] < low[v] {
                    low[v] = index[w];
                }
            } else {
                if low[v] == index[v] {
                    let mut comp = Vec::new();
                    loop {
                        let w = stack.pop().unwrap();
                        on_stack[w] = false;
                        comp.push(w);
                        if w == v {
                            break;
                        }
                    }
                    out.push(comp);
                }
                call.pop();
                if let Some(&(p, _)) = call.last() {
                    if low[v] < low[p] {
                        low[p] = low[v];
                    }
                }
            }
        }
    }
    out
}
