//! Kripke models and the compositional model checker.
//!
//! Relations are stored once per base action; the backward direction is
//! derived, so the converse constraint `(s,t) ∈ R_a  iff  (t,s) ∈ R_a^`
//! holds by construction. States carry external string names and are densely
//! indexed internally.

mod game;

pub use game::mc_game;

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::syntax::{AtomicAction, Direction, Formula, FormulaKind, Program, ProgramKind};

/// A finite pointed-model carrier: states, one relation per base action, and
/// a valuation. Propositions missing from the valuation are false everywhere.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KripkeModel {
    states: Vec<String>,
    index: HashMap<String, usize>,
    rel: BTreeMap<Arc<str>, BTreeSet<(usize, usize)>>,
    val: BTreeMap<Arc<str>, BTreeSet<usize>>,
}

pub type Relation = BTreeSet<(usize, usize)>;

impl KripkeModel {
    pub fn new(states: Vec<String>) -> Result<KripkeModel, Error> {
        let mut index = HashMap::new();
        for (i, s) in states.iter().enumerate() {
            if index.insert(s.clone(), i).is_some() {
                return Err(Error::Model(format!("duplicate state {s:?}")));
            }
        }
        Ok(KripkeModel { states, index, rel: BTreeMap::new(), val: BTreeMap::new() })
    }

    pub fn num_states(&self) -> usize {
        self.states.len()
    }

    pub fn state_name(&self, id: usize) -> &str {
        &self.states[id]
    }

    pub fn state_id(&self, name: &str) -> Option<usize> {
        self.index.get(name).copied()
    }

    pub fn state_names(&self) -> impl Iterator<Item = &str> {
        self.states.iter().map(|s| s.as_str())
    }

    /// Adds a forward edge for the base action.
    pub fn add_edge(&mut self, base: &str, from: usize, to: usize) {
        debug_assert!(from < self.num_states() && to < self.num_states());
        self.rel.entry(base.into()).or_default().insert((from, to));
    }

    /// Makes `prop` true at `state`.
    pub fn add_val(&mut self, prop: &str, state: usize) {
        debug_assert!(state < self.num_states());
        self.val.entry(prop.into()).or_default().insert(state);
    }

    /// Edges of an atomic action, honoring its direction.
    pub fn action_edges(&self, action: &AtomicAction) -> Relation {
        let forward = self.rel.get(&action.base).cloned().unwrap_or_default();
        match action.direction {
            Direction::Forward => forward,
            Direction::Backward => forward.into_iter().map(|(s, t)| (t, s)).collect(),
        }
    }

    pub fn valuation(&self, prop: &str) -> BTreeSet<usize> {
        self.val.get(prop).cloned().unwrap_or_default()
    }

    /// The accessibility relation of an arbitrary program. Iteration is
    /// computed by repeated relational composition up to the fixpoint.
    pub fn program_relation(&self, prog: &Program) -> Relation {
        match prog.kind() {
            ProgramKind::Atom(a) => self.action_edges(a),
            ProgramKind::Seq(alpha, beta) => {
                compose(&self.program_relation(alpha), &self.program_relation(beta))
            }
            ProgramKind::Choice(alpha, beta) => {
                let mut r = self.program_relation(alpha);
                r.extend(self.program_relation(beta));
                r
            }
            ProgramKind::Star(alpha) => {
                let step = self.program_relation(alpha);
                let mut closure: Relation =
                    (0..self.num_states()).map(|s| (s, s)).collect();
                loop {
                    let next: Relation = closure
                        .iter()
                        .copied()
                        .chain(compose(&closure, &step))
                        .collect();
                    if next == closure {
                        break closure;
                    }
                    closure = next;
                }
            }
            ProgramKind::Test(f) => {
                self.mc_compositional(f).into_iter().map(|s| (s, s)).collect()
            }
        }
    }

    /// The set of states satisfying `f`, by mutual recursion on formulas and
    /// programs.
    pub fn mc_compositional(&self, f: &Formula) -> BTreeSet<usize> {
        match f.kind() {
            FormulaKind::Top => (0..self.num_states()).collect(),
            FormulaKind::Bot => BTreeSet::new(),
            FormulaKind::Prop(p) => self.val.get(p).cloned().unwrap_or_default(),
            FormulaKind::NegProp(p) => {
                let holds = self.val.get(p).cloned().unwrap_or_default();
                (0..self.num_states()).filter(|s| !holds.contains(s)).collect()
            }
            FormulaKind::And(l, r) => self
                .mc_compositional(l)
                .intersection(&self.mc_compositional(r))
                .copied()
                .collect(),
            FormulaKind::Or(l, r) => self
                .mc_compositional(l)
                .union(&self.mc_compositional(r))
                .copied()
                .collect(),
            FormulaKind::Dia(prog, body) => {
                let rel = self.program_relation(prog);
                let target = self.mc_compositional(body);
                (0..self.num_states())
                    .filter(|&s| rel.iter().any(|&(x, y)| x == s && target.contains(&y)))
                    .collect()
            }
            FormulaKind::Box(prog, body) => {
                let rel = self.program_relation(prog);
                let target = self.mc_compositional(body);
                (0..self.num_states())
                    .filter(|&s| {
                        rel.iter().all(|&(x, y)| x != s || target.contains(&y))
                    })
                    .collect()
            }
        }
    }

    pub fn satisfies(&self, state: usize, f: &Formula) -> bool {
        self.mc_compositional(f).contains(&state)
    }

    pub fn from_json(text: &str) -> Result<KripkeModel, Error> {
        let file: ModelFile =
            serde_json::from_str(text).map_err(|e| Error::Model(e.to_string()))?;
        let mut model = KripkeModel::new(file.states)?;
        for (action, edges) in file.rel {
            for (from, to) in edges {
                let f = model
                    .state_id(&from)
                    .ok_or_else(|| Error::Model(format!("unknown state {from:?}")))?;
                let t = model
                    .state_id(&to)
                    .ok_or_else(|| Error::Model(format!("unknown state {to:?}")))?;
                model.add_edge(&action, f, t);
            }
        }
        for (prop, states) in file.val {
            for name in states {
                let s = model
                    .state_id(&name)
                    .ok_or_else(|| Error::Model(format!("unknown state {name:?}")))?;
                model.add_val(&prop, s);
            }
        }
        Ok(model)
    }

    pub fn to_json(&self) -> String {
        let file = ModelFile {
            states: self.states.clone(),
            rel: self
                .rel
                .iter()
                .map(|(a, edges)| {
                    (
                        a.to_string(),
                        edges
                            .iter()
                            .map(|&(s, t)| (self.states[s].clone(), self.states[t].clone()))
                            .collect(),
                    )
                })
                .collect(),
            val: self
                .val
                .iter()
                .map(|(p, states)| {
                    (p.to_string(), states.iter().map(|&s| self.states[s].clone()).collect())
                })
                .collect(),
        };
        serde_json::to_string_pretty(&file).expect("model serialization cannot fail")
    }

    /// Graphviz rendering, for debugging.
    pub fn to_dot(&self) -> String {
        use std::fmt::Write as _;
        let mut out = String::from("digraph model {\n");
        for (i, name) in self.states.iter().enumerate() {
            let props: Vec<&str> = self
                .val
                .iter()
                .filter(|(_, states)| states.contains(&i))
                .map(|(p, _)| p.as_ref())
                .collect();
            let _ = writeln!(out, "  s{i} [label=\"{name}\\n{}\"];", props.join(","));
        }
        for (a, edges) in &self.rel {
            for &(s, t) in edges {
                let _ = writeln!(out, "  s{s} -> s{t} [label=\"{a}\"];");
            }
        }
        out.push_str("}\n");
        out
    }
}

fn compose(left: &Relation, right: &Relation) -> Relation {
    let mut by_source: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for &(s, t) in right {
        by_source.entry(s).or_default().push(t);
    }
    let mut out = Relation::new();
    for &(s, t) in left {
        if let Some(targets) = by_source.get(&t) {
            for &u in targets {
                out.insert((s, u));
            }
        }
    }
    out
}

#[derive(Serialize, Deserialize)]
struct ModelFile {
    states: Vec<String>,
    #[serde(default)]
    rel: BTreeMap<String, Vec<(String, String)>>,
    #[serde(default)]
    val: BTreeMap<String, Vec<String>>,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::parse;

    fn two_state_chain() -> KripkeModel {
        // 0 --a--> 1
        let mut m = KripkeModel::new(vec!["s0".into(), "s1".into()]).unwrap();
        m.add_edge("a", 0, 1);
        m
    }

    #[test]
    fn test_of_top_is_identity() {
        let m = two_state_chain();
        let rel = m.program_relation(&Program::test(Formula::top()));
        assert_eq!(rel, [(0, 0), (1, 1)].into_iter().collect());
    }

    #[test]
    fn star_is_reflexive_transitive() {
        let m = two_state_chain();
        let rel = m.program_relation(&Program::star(Program::action("a")));
        assert_eq!(rel, [(0, 0), (1, 1), (0, 1)].into_iter().collect());
    }

    #[test]
    fn backward_atom_inverts() {
        let m = two_state_chain();
        let rel = m.program_relation(&Program::atom(AtomicAction::backward("a")));
        assert_eq!(rel, [(1, 0)].into_iter().collect());
    }

    #[test]
    fn converse_of_program_is_inverse_relation() {
        let mut m = KripkeModel::new(vec!["s0".into(), "s1".into(), "s2".into()]).unwrap();
        m.add_edge("a", 0, 1);
        m.add_edge("b", 1, 2);
        m.add_val("p", 1);
        for text in ["a;b", "a+b^", "(a;b)*", "(p?;a)*"] {
            let f = parse(&format!("<{text}>true")).unwrap();
            let FormulaKind::Dia(prog, _) = f.kind() else { panic!() };
            let rel = m.program_relation(prog);
            let conv: Relation = m
                .program_relation(&prog.converse())
                .into_iter()
                .map(|(s, t)| (t, s))
                .collect();
            assert_eq!(rel, conv, "program {text}");
        }
    }

    #[test]
    fn mc_compositional_examples() {
        let m = two_state_chain();
        assert!(m.mc_compositional(&Formula::bot()).is_empty());

        // One reflexive state where p holds.
        let mut loopm = KripkeModel::new(vec!["s".into()]).unwrap();
        loopm.add_edge("a", 0, 0);
        loopm.add_val("p", 0);
        let dia = parse("<a*>p").unwrap();
        assert_eq!(loopm.mc_compositional(&dia), [0].into_iter().collect());

        let mut empty_val = KripkeModel::new(vec!["s".into()]).unwrap();
        empty_val.add_edge("a", 0, 0);
        let boxneg = parse("[a*]~p").unwrap();
        assert_eq!(empty_val.mc_compositional(&boxneg), [0].into_iter().collect());
    }

    #[test]
    fn duality() {
        let mut m = KripkeModel::new(vec!["s0".into(), "s1".into(), "s2".into()]).unwrap();
        m.add_edge("a", 0, 1);
        m.add_edge("a", 1, 2);
        m.add_edge("b", 2, 0);
        m.add_val("p", 0);
        m.add_val("q", 2);
        for text in ["<a*>p", "[a](p | <b^>q)", "<(a;b)*>(p & ~q)"] {
            let f = parse(text).unwrap();
            let pos = m.mc_compositional(&f);
            let neg = m.mc_compositional(&f.negate());
            let all: BTreeSet<usize> = (0..3).collect();
            assert_eq!(
                pos.union(&neg).copied().collect::<BTreeSet<_>>(),
                all,
                "{text}"
            );
            assert!(pos.intersection(&neg).next().is_none(), "{text}");
        }
    }

    #[test]
    fn converse_axiom_holds_everywhere() {
        let mut m = KripkeModel::new(vec!["s0".into(), "s1".into()]).unwrap();
        m.add_edge("a", 0, 1);
        m.add_edge("a", 1, 1);
        m.add_val("p", 0);
        m.add_val("p", 1);
        let f = parse("p -> [a]<a^>p").unwrap();
        assert_eq!(m.mc_compositional(&f), (0..2).collect());
    }

    #[test]
    fn json_round_trip() {
        let text = r#"{"states":["s0","s1"],"rel":{"a":[["s0","s1"]]},"val":{"p":["s0"]}}"#;
        let m = KripkeModel::from_json(text).unwrap();
        assert_eq!(m.num_states(), 2);
        assert_eq!(m.valuation("p"), [0].into_iter().collect());
        assert_eq!(m.valuation("unknown"), BTreeSet::new());
        let again = KripkeModel::from_json(&m.to_json()).unwrap();
        assert_eq!(m, again);
    }
}
