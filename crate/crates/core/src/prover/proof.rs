//! Cyclic proof objects, the independent proof checker, and serialization.
//!
//! A proof is a finite tree of sequent-labelled nodes. Internal nodes carry
//! the rule applied to their label; leaves are axioms, assumptions, or
//! repeats, where a repeat points back at its companion: the nearest proper
//! ancestor with the same label. A repeat is sound when every node from the
//! companion down to the leaf keeps a formula in focus and at least one of
//! them has that focused formula as its principal.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde_json::{json, Value};

use crate::calculus::{
    classify, enumerate_instances, is_saturated, priority_class, validate_instance, Annotation,
    AnnotatedFormula, AnnotatedSequent, ClosureContext, Rule, RuleInstance, Side, SplitSequent,
};
use crate::error::Error;
use crate::syntax::parse;

#[derive(Clone, Debug)]
pub struct ProofNode {
    pub sequent: SplitSequent,
    /// `None` for assumption and repeat leaves.
    pub rule: Option<Rule>,
    pub side: Option<Side>,
    pub principal: Option<(Side, AnnotatedFormula)>,
    pub children: Vec<usize>,
}

#[derive(Clone, Debug)]
pub struct CyclicProof {
    pub nodes: Vec<ProofNode>,
    pub root: usize,
    /// repeat leaf -> companion.
    pub backlinks: BTreeMap<usize, usize>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Violation {
    pub node: usize,
    pub reason: String,
}

impl std::fmt::Display for Violation {
    fn fmt(&self, out: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(out, "node {}: {}", self.node, self.reason)
    }
}

impl CyclicProof {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Parent indices, or usize::MAX at the root.
    fn parents(&self) -> Vec<usize> {
        let mut parent = vec![usize::MAX; self.nodes.len()];
        for (i, node) in self.nodes.iter().enumerate() {
            for &c in &node.children {
                if c < self.nodes.len() {
                    parent[c] = i;
                }
            }
        }
        parent
    }

    /// The tree path from `from` up to and including `to`, leaf first.
    fn path_up(&self, parents: &[usize], from: usize, to: usize) -> Option<Vec<usize>> {
        let mut path = vec![from];
        let mut cur = from;
        while cur != to {
            let p = parents[cur];
            if p == usize::MAX {
                return None;
            }
            cur = p;
            path.push(cur);
        }
        Some(path)
    }
}

/// Validates a proof of `root`: tree shape, rule legality at every internal
/// node (recomputed from the rule inventory), leaf discipline, and success of
/// every repeat path. Returns all violations found; an empty list means the
/// proof is good. Never panics on malformed input.
pub fn check_proof(proof: &CyclicProof, root: &SplitSequent) -> Vec<Violation> {
    check_proof_with_assumptions(proof, root, &[])
}

pub fn check_proof_with_assumptions(
    proof: &CyclicProof,
    root: &SplitSequent,
    assumptions: &[SplitSequent],
) -> Vec<Violation> {
    let mut out = Vec::new();
    let n = proof.nodes.len();
    if n == 0 {
        return vec![Violation { node: 0, reason: "empty proof".into() }];
    }
    if proof.root >= n {
        return vec![Violation { node: proof.root, reason: "root out of range".into() }];
    }

    // Tree shape: children in range, unique parent, all reachable from root.
    let mut seen_child = vec![false; n];
    for (i, node) in proof.nodes.iter().enumerate() {
        for &c in &node.children {
            if c >= n {
                out.push(Violation { node: i, reason: format!("child {c} out of range") });
            } else if seen_child[c] {
                out.push(Violation { node: c, reason: "node has two parents".into() });
            } else {
                seen_child[c] = true;
            }
        }
    }
    if seen_child[proof.root] {
        out.push(Violation { node: proof.root, reason: "root has a parent".into() });
    }
    if !out.is_empty() {
        return out;
    }
    let parents = proof.parents();
    let mut reachable = vec![false; n];
    let mut stack = vec![proof.root];
    while let Some(v) = stack.pop() {
        if !reachable[v] {
            reachable[v] = true;
            stack.extend(proof.nodes[v].children.iter().copied());
        }
    }
    for v in 0..n {
        if !reachable[v] {
            out.push(Violation { node: v, reason: "unreachable from root".into() });
        }
    }

    if proof.nodes[proof.root].sequent != *root {
        out.push(Violation {
            node: proof.root,
            reason: format!(
                "root label [{}] differs from the stated sequent [{}]",
                proof.nodes[proof.root].sequent, root
            ),
        });
    }

    let ctx = ClosureContext::for_root(root);

    for (i, node) in proof.nodes.iter().enumerate() {
        match node.rule {
            Some(rule) => {
                if rule.is_axiom() && !node.children.is_empty() {
                    out.push(Violation { node: i, reason: "axiom with children".into() });
                    continue;
                }
                let instance = RuleInstance {
                    rule,
                    side: node.side.unwrap_or(Side::Left),
                    conclusion: node.sequent.clone(),
                    premises: node
                        .children
                        .iter()
                        .map(|&c| proof.nodes[c].sequent.clone())
                        .collect(),
                    principal: node.principal.clone(),
                };
                if let Err(reason) = validate_instance(&instance, &ctx) {
                    // The stated side may be wrong even when the instance is
                    // fine on the other side; report only if neither works.
                    let mut flipped = instance.clone();
                    flipped.side = flipped.side.other();
                    if validate_instance(&flipped, &ctx).is_err() {
                        out.push(Violation { node: i, reason });
                    }
                }
            }
            None => {
                if !node.children.is_empty() {
                    out.push(Violation { node: i, reason: "leaf tag on an inner node".into() });
                    continue;
                }
                match proof.backlinks.get(&i) {
                    Some(&companion) => {
                        check_repeat(proof, &parents, i, companion, &mut out);
                    }
                    None => {
                        if !assumptions.contains(&node.sequent) {
                            out.push(Violation {
                                node: i,
                                reason: "open leaf: neither axiom, assumption nor repeat".into(),
                            });
                        }
                    }
                }
            }
        }
    }

    for (&leaf, _) in &proof.backlinks {
        if leaf >= n {
            out.push(Violation { node: leaf, reason: "backlink from unknown node".into() });
        } else if proof.nodes[leaf].rule.is_some() {
            out.push(Violation { node: leaf, reason: "backlink from an inner node".into() });
        }
    }
    out
}

fn check_repeat(
    proof: &CyclicProof,
    parents: &[usize],
    leaf: usize,
    companion: usize,
    out: &mut Vec<Violation>,
) {
    if companion >= proof.nodes.len() {
        out.push(Violation { node: leaf, reason: "companion out of range".into() });
        return;
    }
    let Some(path) = proof.path_up(parents, leaf, companion) else {
        out.push(Violation { node: leaf, reason: "companion is not a proper ancestor".into() });
        return;
    };
    if path.len() < 2 {
        out.push(Violation { node: leaf, reason: "companion must be a proper ancestor".into() });
        return;
    }
    if proof.nodes[companion].sequent != proof.nodes[leaf].sequent {
        out.push(Violation { node: leaf, reason: "companion label differs from repeat label".into() });
        return;
    }
    // Nearest: no strictly closer ancestor carries the same label.
    for &v in &path[1..path.len() - 1] {
        if proof.nodes[v].sequent == proof.nodes[leaf].sequent {
            out.push(Violation {
                node: leaf,
                reason: format!("companion is not the nearest equal ancestor (node {v} is closer)"),
            });
            return;
        }
    }
    // Success: every node on the repeat path is focused, and somewhere on it
    // the focused formula is principal.
    let mut principal_somewhere = false;
    for &v in &path {
        let node = &proof.nodes[v];
        let Some((side, focus)) = node.sequent.focus() else {
            out.push(Violation {
                node: leaf,
                reason: format!("repeat path node {v} has no formula in focus"),
            });
            return;
        };
        if let Some((pside, paf)) = &node.principal {
            if node.rule.is_some()
                && *pside == side
                && paf.formula == *focus
                && paf.annotation == Annotation::Focused
            {
                principal_somewhere = true;
            }
        }
    }
    if !principal_somewhere {
        out.push(Violation {
            node: leaf,
            reason: "repeat path never has its focused formula principal".into(),
        });
    }
}

/// The uniformity audit: every applied instance must be of the minimal
/// priority class available at its node, and nodes that share their focused
/// component while the other component is saturated must apply the same rule
/// to the same principal formula.
pub fn audit_uniform(proof: &CyclicProof, root: &SplitSequent) -> Vec<Violation> {
    let ctx = ClosureContext::for_root(root);
    let mut out = Vec::new();
    let mut groups: BTreeMap<(Side, AnnotatedSequent), Vec<usize>> = BTreeMap::new();

    for (i, node) in proof.nodes.iter().enumerate() {
        let Some(rule) = node.rule else { continue };
        let instance = RuleInstance {
            rule,
            side: node.side.unwrap_or(Side::Left),
            conclusion: node.sequent.clone(),
            premises: node.children.iter().map(|&c| proof.nodes[c].sequent.clone()).collect(),
            principal: node.principal.clone(),
        };
        let applied_class = match priority_class(&instance, &node.sequent) {
            Ok(c) => c,
            Err(_) => {
                out.push(Violation {
                    node: i,
                    reason: format!("applied {} instance is in no priority class", rule.name()),
                });
                continue;
            }
        };
        let min = minimal_class(&node.sequent, &ctx);
        if let Some(min) = min {
            if applied_class > min {
                out.push(Violation {
                    node: i,
                    reason: format!(
                        "applied class {applied_class} but class {min} is available"
                    ),
                });
            }
        }

        // Group for the focused-component determinism check.
        if let Some((fside, _)) = node.sequent.focus() {
            let other = node.sequent.component(fside.other());
            if is_saturated(other, ctx.side(fside.other()))
                && min.map(|m| m >= 4).unwrap_or(false)
            {
                groups
                    .entry((fside, node.sequent.component(fside).clone()))
                    .or_default()
                    .push(i);
            }
        }
    }

    for ((_, _), nodes) in groups {
        let mut signature: Option<(Rule, Option<(Side, AnnotatedFormula)>)> = None;
        for &i in &nodes {
            let node = &proof.nodes[i];
            let sig = (node.rule.unwrap(), node.principal.clone());
            match &signature {
                None => signature = Some(sig),
                Some(s) if *s != sig => {
                    out.push(Violation {
                        node: i,
                        reason: "focused component repeats with a different rule or principal"
                            .into(),
                    });
                }
                _ => {}
            }
        }
    }
    out
}

/// The least priority class among all instances available at `seq`, under
/// the same pruning the prover uses (no weakening, no non-cumulative focus
/// placement, focus only on diamonds).
fn minimal_class(seq: &SplitSequent, ctx: &ClosureContext) -> Option<u8> {
    let instances = enumerate_instances(seq, ctx).ok()?;
    instances
        .iter()
        .filter(|i| match i.rule {
            Rule::Weak => false,
            Rule::Focus => {
                classify(i).cumulative
                    && i.principal.as_ref().map(|(_, af)| af.formula.is_diamond()).unwrap_or(false)
            }
            _ => true,
        })
        .filter_map(|i| priority_class(i, seq).ok())
        .min()
}

// ---------------------------------------------------------------------------
// Serialization
// ---------------------------------------------------------------------------

fn sequent_to_json(seq: &SplitSequent) -> Value {
    let comp = |c: &AnnotatedSequent| {
        Value::Array(
            c.iter()
                .map(|af| json!([af.formula.to_string(), af.annotation.tag()]))
                .collect(),
        )
    };
    json!({ "left": comp(&seq.left), "right": comp(&seq.right) })
}

fn sequent_from_json(v: &Value) -> Result<SplitSequent, Error> {
    let comp = |key: &str| -> Result<AnnotatedSequent, Error> {
        let arr = v
            .get(key)
            .and_then(Value::as_array)
            .ok_or_else(|| Error::Model(format!("sequent missing {key:?} array")))?;
        let mut elements = Vec::new();
        for entry in arr {
            let pair = entry
                .as_array()
                .filter(|p| p.len() == 2)
                .ok_or_else(|| Error::Model("sequent entry is not a pair".into()))?;
            let formula = parse(
                pair[0]
                    .as_str()
                    .ok_or_else(|| Error::Model("formula entry is not a string".into()))?,
            )?;
            let annotation = pair[1]
                .as_str()
                .and_then(Annotation::from_tag)
                .ok_or_else(|| Error::Model("annotation must be \"u\" or \"f\"".into()))?;
            elements.push(AnnotatedFormula { formula, annotation });
        }
        AnnotatedSequent::new(elements)
    };
    SplitSequent::new(comp("left")?, comp("right")?)
}

impl CyclicProof {
    pub fn to_json(&self) -> String {
        let nodes: Vec<Value> = self
            .nodes
            .iter()
            .enumerate()
            .map(|(i, node)| {
                let mut obj = serde_json::Map::new();
                obj.insert("id".into(), json!(i));
                obj.insert("seq".into(), sequent_to_json(&node.sequent));
                match node.rule {
                    Some(rule) => {
                        obj.insert("rule".into(), json!(rule.name()));
                        if let Some(side) = node.side {
                            obj.insert("side".into(), json!(side.tag()));
                        }
                    }
                    None => {
                        obj.insert("rule".into(), json!("assumption"));
                    }
                }
                if let Some((_, af)) = &node.principal {
                    obj.insert("principal".into(), json!(af.formula.to_string()));
                }
                obj.insert("children".into(), json!(node.children));
                Value::Object(obj)
            })
            .collect();
        let backlinks: serde_json::Map<String, Value> = self
            .backlinks
            .iter()
            .map(|(l, c)| (l.to_string(), json!(c)))
            .collect();
        serde_json::to_string_pretty(&json!({
            "root": self.root,
            "nodes": nodes,
            "backlinks": backlinks,
        }))
        .expect("proof serialization cannot fail")
    }

    pub fn from_json(text: &str) -> Result<CyclicProof, Error> {
        let v: Value = serde_json::from_str(text).map_err(|e| Error::Model(e.to_string()))?;
        let root = v
            .get("root")
            .and_then(Value::as_u64)
            .ok_or_else(|| Error::Model("proof missing root".into()))? as usize;
        let raw_nodes = v
            .get("nodes")
            .and_then(Value::as_array)
            .ok_or_else(|| Error::Model("proof missing nodes".into()))?;

        struct RawNode {
            sequent: SplitSequent,
            rule: Option<Rule>,
            side: Option<Side>,
            principal_formula: Option<crate::syntax::Formula>,
            children: Vec<usize>,
        }

        // Nodes may appear in any order; ids must be dense.
        let mut nodes: Vec<Option<RawNode>> = vec![None; raw_nodes.len()];
        for raw in raw_nodes {
            let id = raw
                .get("id")
                .and_then(Value::as_u64)
                .ok_or_else(|| Error::Model("node missing id".into()))? as usize;
            if id >= nodes.len() || nodes[id].is_some() {
                return Err(Error::Model(format!("bad or duplicate node id {id}")));
            }
            let sequent = sequent_from_json(
                raw.get("seq").ok_or_else(|| Error::Model("node missing seq".into()))?,
            )?;
            let rule_name = raw
                .get("rule")
                .and_then(Value::as_str)
                .ok_or_else(|| Error::Model("node missing rule".into()))?;
            let (rule, side) = if rule_name == "assumption" {
                (None, None)
            } else {
                let rule = Rule::from_name(rule_name)
                    .ok_or_else(|| Error::Model(format!("unknown rule {rule_name:?}")))?;
                let side = raw
                    .get("side")
                    .and_then(Value::as_str)
                    .and_then(Side::from_tag)
                    .unwrap_or(Side::Left);
                (Some(rule), Some(side))
            };
            let principal_formula = match raw.get("principal").and_then(Value::as_str) {
                Some(text) => Some(parse(text)?),
                None => None,
            };
            let children: Vec<usize> = raw
                .get("children")
                .and_then(Value::as_array)
                .map(|cs| cs.iter().filter_map(Value::as_u64).map(|c| c as usize).collect())
                .unwrap_or_default();
            nodes[id] = Some(RawNode { sequent, rule, side, principal_formula, children });
        }
        let raws: Vec<RawNode> = nodes
            .into_iter()
            .collect::<Option<Vec<_>>>()
            .ok_or_else(|| Error::Model("node ids are not dense".into()))?;

        // The principal's annotation is determined by the rule; the diamond
        // decomposition rules may act on either occurrence of a formula that
        // is present both focused and unfocused, in which case the focused
        // reading moves the focus to a derivative in the premise.
        let nodes: Vec<ProofNode> = raws
            .iter()
            .map(|raw| {
                let principal = raw.principal_formula.clone().map(|formula| {
                    let side = raw.side.unwrap_or(Side::Left);
                    let annotation = match raw.rule {
                        Some(Rule::Modal) | Some(Rule::Unfocus) => Annotation::Focused,
                        Some(r) if r.is_dia_decomposition() => {
                            let focused_here = raw.sequent.focus()
                                == Some((side, &formula));
                            let premise_keeps_focus = raw
                                .children
                                .first()
                                .and_then(|&c| raws.get(c))
                                .map(|child| child.sequent.focus() == raw.sequent.focus())
                                .unwrap_or(false);
                            if focused_here && !premise_keeps_focus {
                                Annotation::Focused
                            } else {
                                Annotation::Unfocused
                            }
                        }
                        _ => Annotation::Unfocused,
                    };
                    (side, AnnotatedFormula { formula, annotation })
                });
                ProofNode {
                    sequent: raw.sequent.clone(),
                    rule: raw.rule,
                    side: raw.side,
                    principal,
                    children: raw.children.clone(),
                }
            })
            .collect();

        let mut backlinks = BTreeMap::new();
        if let Some(map) = v.get("backlinks").and_then(Value::as_object) {
            for (k, val) in map {
                let leaf: usize =
                    k.parse().map_err(|_| Error::Model(format!("bad backlink key {k:?}")))?;
                let companion = val
                    .as_u64
                    ()
                    .ok_or_else(|| Error::Model("backlink target must be a number".into()))?
                    as usize;
                backlinks.insert(leaf, companion);
            }
        }
        Ok(CyclicProof { nodes, root, backlinks })
    }

    /// Graphviz rendering: tree edges solid, backlinks dashed.
    pub fn to_dot(&self) -> String {
        let mut s = String::from("digraph proof {\n  node [shape=box,fontname=\"monospace\"];\n");
        for (i, node) in self.nodes.iter().enumerate() {
            let tag = node.rule.map(Rule::name).unwrap_or("repeat");
            let label = format!("{}\\n{}", node.sequent, tag).replace('"', "\\\"");
            let _ = writeln!(s, "  n{i} [label=\"{label}\"];");
            for &c in &node.children {
                let _ = writeln!(s, "  n{i} -> n{c};");
            }
        }
        for (leaf, companion) in &self.backlinks {
            let _ = writeln!(s, "  n{leaf} -> n{companion} [style=dashed,constraint=false];");
        }
        s.push_str("}\n");
        s
    }
}
