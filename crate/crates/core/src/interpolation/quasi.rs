//! Quasi-proofs: the typed trees behind proper-cluster interpolants.
//!
//! A proper cluster keeps its focus on one side; this module always works
//! with that side normalized to the right (callers mirror first). The
//! quasi-proof tracks only the right components occurring in the cluster.
//! Inner nodes come in triples of equal label and types 1, 2, 3: type 1
//! decides between repeat, exit and descent; type 2 is the point where the
//! exit interpolant of the label is spliced in; type 3 branches the way the
//! unique right rule applied at that label branches in the cluster. Repeat
//! leaves name their companion: the unique type-1 strict ancestor with the
//! same label.
//!
//! Pre-interpolants are then assigned leaf to root: a formula `psi` per node
//! and a program `alpha` per (node, reachable companion) pair, combined so
//! that companions tie their repeats' loops with a star.

use std::collections::{BTreeMap, BTreeSet};

use crate::calculus::{AnnotatedSequent, Rule, Side, SplitSequent};
use crate::error::Error;
use crate::prover::CyclicProof;
use crate::syntax::{Formula, FormulaKind, Program, ProgramKind};

use super::clusters::{Cluster, ClusterDecomposition};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum QKind {
    Inner,
    Repeat { companion: usize },
    Exit,
}

#[derive(Clone, Debug)]
pub struct QNode {
    pub ty: u8,
    pub label: AnnotatedSequent,
    pub children: Vec<usize>,
    pub kind: QKind,
    /// For type-3 nodes: whether the unique right rule at this label is the
    /// modal rule.
    pub modal: bool,
}

#[derive(Clone, Debug)]
pub struct QuasiProof {
    pub nodes: Vec<QNode>,
    pub root: usize,
    /// Repeats below-or-at each node whose companion is strictly above it.
    pub cycs: Vec<BTreeSet<usize>>,
    /// Companions of those repeats.
    pub k_set: Vec<BTreeSet<usize>>,
}

/// A cluster with its labels normalized so that the focused side is the
/// right component.
pub(crate) struct ClusterView<'a> {
    proof: &'a CyclicProof,
    pub cluster: &'a Cluster,
    pub mirror: bool,
}

impl<'a> ClusterView<'a> {
    pub fn new(
        proof: &'a CyclicProof,
        cluster: &'a Cluster,
    ) -> Result<ClusterView<'a>, Error> {
        let Some((side, _)) = proof.nodes[cluster.root].sequent.focus() else {
            return Err(Error::NonUniformProof(format!(
                "proper cluster root {} has no focus",
                cluster.root
            )));
        };
        Ok(ClusterView { proof, cluster, mirror: side == Side::Left })
    }

    pub fn left(&self, node: usize) -> &AnnotatedSequent {
        let seq = &self.proof.nodes[node].sequent;
        if self.mirror {
            &seq.right
        } else {
            &seq.left
        }
    }

    pub fn right(&self, node: usize) -> &AnnotatedSequent {
        let seq = &self.proof.nodes[node].sequent;
        if self.mirror {
            &seq.left
        } else {
            &seq.right
        }
    }

    /// The side of the applied rule, normalized.
    fn rule_side(&self, node: usize) -> Option<Side> {
        self.proof.nodes[node].side.map(|s| if self.mirror { s.other() } else { s })
    }

    fn rule(&self, node: usize) -> Option<Rule> {
        self.proof.nodes[node].rule
    }

    fn children(&self, node: usize) -> &[usize] {
        &self.proof.nodes[node].children
    }

    /// Normalized interpolant of an exit node: mirroring negates.
    pub fn exit_theta(&self, theta: &Formula) -> Formula {
        if self.mirror {
            theta.negate()
        } else {
            theta.clone()
        }
    }

    /// Audits the facts the construction relies on: both components
    /// non-empty, the focus on the normalized right, and at least one child
    /// (or the companion) inside the cluster.
    pub fn audit(&self, decomp: &ClusterDecomposition) -> Result<(), Error> {
        let ci = decomp.cluster_of[self.cluster.root];
        for &t in &self.cluster.nodes {
            if self.left(t).is_empty() || self.right(t).is_empty() {
                return Err(Error::NonUniformProof(format!(
                    "cluster node {t} has an empty component"
                )));
            }
            if self.right(t).focused().is_none() {
                return Err(Error::NonUniformProof(format!(
                    "cluster node {t} is not focused on the cluster side"
                )));
            }
            let internal_child = self
                .children(t)
                .iter()
                .any(|&c| decomp.cluster_of[c] == ci)
                || self.proof.backlinks.get(&t).is_some();
            if !internal_child {
                return Err(Error::NonUniformProof(format!(
                    "cluster node {t} has no successor inside its cluster"
                )));
            }
        }
        Ok(())
    }
}

/// The nodes of the cluster applying a right rule to a given right
/// component, with the shared shape of that rule application.
struct RightRule {
    rule: Rule,
    /// Right components of the premises, in premise order.
    premise_rights: Vec<AnnotatedSequent>,
}

fn right_rules(view: &ClusterView) -> Result<BTreeMap<AnnotatedSequent, RightRule>, Error> {
    let mut out: BTreeMap<AnnotatedSequent, RightRule> = BTreeMap::new();
    for &t in &view.cluster.nodes {
        if view.rule(t).is_none() || view.rule_side(t) != Some(Side::Right) {
            continue;
        }
        let rule = view.rule(t).unwrap();
        let premise_rights: Vec<AnnotatedSequent> =
            view.children(t).iter().map(|&c| view.right(c).clone()).collect();
        let label = view.right(t).clone();
        match out.get(&label) {
            None => {
                out.insert(label, RightRule { rule, premise_rights });
            }
            Some(existing) => {
                if existing.rule != rule || existing.premise_rights != premise_rights {
                    return Err(Error::NonUniformProof(format!(
                        "two right-rule applications at [{label}] disagree"
                    )));
                }
            }
        }
    }
    Ok(out)
}

/// Builds the quasi-proof of a proper cluster (labels already normalized by
/// the view). Exit labels are the right components occurring on exit nodes
/// but not inside the cluster.
pub(crate) fn build_quasi_proof(view: &ClusterView) -> Result<QuasiProof, Error> {
    let rules = right_rules(view)?;
    let cluster_labels: BTreeSet<AnnotatedSequent> =
        view.cluster.nodes.iter().map(|&t| view.right(t).clone()).collect();

    let budget = 4 * (cluster_labels.len() + 2) * (cluster_labels.len() + 2) + 64;
    let mut nodes: Vec<QNode> = Vec::new();

    let root_label = view.right(view.cluster.root).clone();
    nodes.push(QNode {
        ty: 1,
        label: root_label,
        children: Vec::new(),
        kind: QKind::Inner,
        modal: false,
    });

    // Depth-first construction; ancestors tracked for the repeat test.
    let mut stack: Vec<usize> = vec![0];
    let mut ancestors: Vec<Vec<usize>> = vec![Vec::new()]; // per node: type-1 ancestors
    while let Some(x) = stack.pop() {
        if nodes.len() > budget {
            return Err(Error::Internal("quasi-proof outgrew its budget".into()));
        }
        let label = nodes[x].label.clone();
        match nodes[x].ty {
            1 => {
                if let Some(&companion) =
                    ancestors[x].iter().rev().find(|&&y| nodes[y].label == label)
                {
                    nodes[x].kind = QKind::Repeat { companion };
                    continue;
                }
                if !cluster_labels.contains(&label) {
                    nodes[x].kind = QKind::Exit;
                    continue;
                }
                let child = push_child(&mut nodes, &mut ancestors, x, 2, label, true);
                nodes[x].children.push(child);
                stack.push(child);
            }
            2 => {
                let child = push_child(&mut nodes, &mut ancestors, x, 3, label, false);
                nodes[x].children.push(child);
                stack.push(child);
            }
            3 => {
                let rr = rules.get(&label).ok_or_else(|| {
                    Error::NonUniformProof(format!(
                        "no right rule is ever applied at cluster label [{label}]"
                    ))
                })?;
                nodes[x].modal = rr.rule == Rule::Modal;
                for premise_right in &rr.premise_rights {
                    let child = push_child(
                        &mut nodes,
                        &mut ancestors,
                        x,
                        1,
                        premise_right.clone(),
                        false,
                    );
                    nodes[x].children.push(child);
                    stack.push(child);
                }
            }
            _ => unreachable!(),
        }
    }

    let (cycs, k_set) = cycle_sets(&nodes);
    let q = QuasiProof { nodes, root: 0, cycs, k_set };
    audit_quasi(&q)?;
    Ok(q)
}

fn push_child(
    nodes: &mut Vec<QNode>,
    ancestors: &mut Vec<Vec<usize>>,
    parent: usize,
    ty: u8,
    label: AnnotatedSequent,
    parent_becomes_ancestor: bool,
) -> usize {
    let id = nodes.len();
    let mut anc = ancestors[parent].clone();
    if parent_becomes_ancestor {
        anc.push(parent);
    }
    nodes.push(QNode { ty, label, children: Vec::new(), kind: QKind::Inner, modal: false });
    ancestors.push(anc);
    id
}

fn cycle_sets(nodes: &[QNode]) -> (Vec<BTreeSet<usize>>, Vec<BTreeSet<usize>>) {
    let mut parent = vec![usize::MAX; nodes.len()];
    for (i, node) in nodes.iter().enumerate() {
        for &c in &node.children {
            parent[c] = i;
        }
    }
    let mut cycs: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); nodes.len()];
    for (z, node) in nodes.iter().enumerate() {
        let QKind::Repeat { companion } = node.kind else { continue };
        let mut cur = z;
        while cur != companion && cur != usize::MAX {
            cycs[cur].insert(z);
            cur = parent[cur];
        }
    }
    let k_set: Vec<BTreeSet<usize>> = cycs
        .iter()
        .map(|set| {
            set.iter()
                .map(|&z| match nodes[z].kind {
                    QKind::Repeat { companion } => companion,
                    _ => unreachable!(),
                })
                .collect()
        })
        .collect();
    (cycs, k_set)
}

/// Structural audits: triples, leaf/companion types, the cycle-set
/// recurrences, and the distinct-focus property of repeat paths.
fn audit_quasi(q: &QuasiProof) -> Result<(), Error> {
    let fail = |msg: String| Err(Error::Internal(format!("quasi-proof audit: {msg}")));
    if q.nodes[q.root].ty != 1 {
        return fail("root is not of type 1".into());
    }
    if !q.cycs[q.root].is_empty() || !q.k_set[q.root].is_empty() {
        return fail("root has pending cycles".into());
    }
    let mut companions: BTreeSet<usize> = BTreeSet::new();
    for node in &q.nodes {
        if let QKind::Repeat { companion } = node.kind {
            companions.insert(companion);
        }
    }
    for (x, node) in q.nodes.iter().enumerate() {
        match node.kind {
            QKind::Repeat { companion } => {
                if node.ty != 1 || q.nodes[companion].ty != 1 {
                    return fail(format!("repeat {x} or its companion is not of type 1"));
                }
                if q.nodes[companion].label != node.label {
                    return fail(format!("repeat {x} disagrees with its companion"));
                }
            }
            QKind::Exit => {
                if node.ty != 1 || !node.children.is_empty() {
                    return fail(format!("exit {x} malformed"));
                }
            }
            QKind::Inner => match node.ty {
                1 | 2 => {
                    if node.children.len() != 1 {
                        return fail(format!("type-{} node {x} must have one child", node.ty));
                    }
                    let c = node.children[0];
                    if q.nodes[c].label != node.label || q.nodes[c].ty != node.ty + 1 {
                        return fail(format!("triple broken under node {x}"));
                    }
                }
                3 => {
                    if node.children.is_empty() {
                        return fail(format!("type-3 node {x} has no children"));
                    }
                    for &c in &node.children {
                        if q.nodes[c].ty != 1 {
                            return fail(format!("type-3 node {x} has a non-type-1 child"));
                        }
                    }
                }
                t => return fail(format!("node {x} has type {t}")),
            },
        }
        if q.k_set[x].contains(&x) {
            return fail(format!("node {x} reaches itself as a companion"));
        }
        // Recurrences of the cycle sets.
        if !companions.contains(&x) && !node.children.is_empty() {
            let union: BTreeSet<usize> =
                node.children.iter().flat_map(|&c| q.k_set[c].iter().copied()).collect();
            if q.k_set[x] != union {
                return fail(format!("companion sets of node {x} break the union rule"));
            }
        }
        if node.children.len() == 1 {
            let c = node.children[0];
            if !q.k_set[x].is_subset(&q.k_set[c]) {
                return fail(format!("companion set of {x} is not below its child's"));
            }
        }
    }
    // Every repeat path sees at least two distinct focused formulas.
    let mut parent = vec![usize::MAX; q.nodes.len()];
    for (i, node) in q.nodes.iter().enumerate() {
        for &c in &node.children {
            parent[c] = i;
        }
    }
    for (z, node) in q.nodes.iter().enumerate() {
        let QKind::Repeat { companion } = node.kind else { continue };
        let mut focuses: BTreeSet<&Formula> = BTreeSet::new();
        let mut cur = z;
        loop {
            match q.nodes[cur].label.focused() {
                Some(f) => focuses.insert(f),
                None => return fail(format!("unfocused label on the repeat path of {z}")),
            };
            if cur == companion {
                break;
            }
            cur = parent[cur];
        }
        if focuses.len() < 2 {
            return fail(format!("repeat path of {z} keeps a single focused formula"));
        }
    }
    Ok(())
}

/// Leaf-to-root synthesis of the cluster interpolant from the quasi-proof
/// and the exit interpolants (`theta_of_label` maps an exit label to the
/// conjunction of the interpolants of the exit nodes carrying it).
pub(crate) fn pre_interpolants(
    q: &QuasiProof,
    theta_of_label: &BTreeMap<AnnotatedSequent, Formula>,
) -> Result<Formula, Error> {
    let n = q.nodes.len();
    let mut psi: Vec<Option<Formula>> = vec![None; n];
    let mut alpha: Vec<BTreeMap<usize, Program>> = vec![BTreeMap::new(); n];

    // The exit interpolant of a label; missing labels mean no exit node
    // carries it, and the empty conjunction is truth.
    let theta_for = |label: &AnnotatedSequent| -> Formula {
        theta_of_label.get(label).cloned().unwrap_or_else(Formula::top)
    };

    let mut companions: BTreeSet<usize> = BTreeSet::new();
    for node in &q.nodes {
        if let QKind::Repeat { companion } = node.kind {
            companions.insert(companion);
        }
    }

    // Children come after parents in construction order, so a reverse sweep
    // is a leaf-to-root induction.
    for x in (0..n).rev() {
        let node = &q.nodes[x];
        match node.kind {
            QKind::Repeat { companion } => {
                psi[x] = Some(Formula::bot());
                alpha[x].insert(companion, Program::test(Formula::top()));
            }
            QKind::Exit => {
                psi[x] = Some(theta_for(&node.label));
            }
            QKind::Inner => match node.ty {
                1 if companions.contains(&x) => {
                    let z = node.children[0];
                    let loop_prog = alpha[z].get(&x).cloned().ok_or_else(|| {
                        Error::Internal("companion unreachable from its own child".into())
                    })?;
                    let star = Program::star(loop_prog);
                    psi[x] = Some(Formula::dia(star.clone(), psi[z].clone().unwrap()));
                    for y in q.k_set[x].iter().copied() {
                        let tail = alpha[z].get(&y).cloned().ok_or_else(|| {
                            Error::Internal("missing loop program at a companion".into())
                        })?;
                        alpha[x].insert(y, Program::seq(star.clone(), tail));
                    }
                }
                1 => {
                    let z = node.children[0];
                    psi[x] = psi[z].clone();
                    alpha[x] = alpha[z].clone();
                }
                2 => {
                    let z = node.children[0];
                    let guard = Program::test(theta_for(&node.label));
                    psi[x] =
                        Some(Formula::dia(guard.clone(), psi[z].clone().unwrap()));
                    for (y, prog) in alpha[z].clone() {
                        alpha[x].insert(y, Program::seq(guard.clone(), prog));
                    }
                }
                3 => {
                    if node.modal {
                        let z = node.children[0];
                        let action = leading_action(&node.label)?;
                        psi[x] = Some(Formula::dia(action.clone(), psi[z].clone().unwrap()));
                        for (y, prog) in alpha[z].clone() {
                            alpha[x].insert(y, Program::seq(action.clone(), prog));
                        }
                    } else {
                        let mut disjunction: Option<Formula> = None;
                        for &z in &node.children {
                            let p = psi[z].clone().unwrap();
                            disjunction = Some(match disjunction {
                                None => p,
                                Some(d) => Formula::or(d, p),
                            });
                        }
                        psi[x] = Some(disjunction.expect("type-3 nodes have children"));
                        for y in q.k_set[x].iter().copied() {
                            let mut choice: Option<Program> = None;
                            for &z in &node.children {
                                if let Some(prog) = alpha[z].get(&y) {
                                    choice = Some(match choice {
                                        None => prog.clone(),
                                        Some(c) => Program::choice(c, prog.clone()),
                                    });
                                }
                            }
                            let prog = choice.ok_or_else(|| {
                                Error::Internal("companion unreachable below a branch".into())
                            })?;
                            alpha[x].insert(y, prog);
                        }
                    }
                }
                _ => unreachable!(),
            },
        }
    }

    if !q.k_set[q.root].is_empty() {
        return Err(Error::Internal("root of the quasi-proof has open loops".into()));
    }
    psi[q.root]
        .clone()
        .ok_or_else(|| Error::Internal("no interpolant at the quasi-proof root".into()))
}

fn leading_action(label: &AnnotatedSequent) -> Result<Program, Error> {
    let Some(focus) = label.focused() else {
        return Err(Error::Internal("modal label without focus".into()));
    };
    match focus.kind() {
        FormulaKind::Dia(prog, _) if matches!(prog.kind(), ProgramKind::Atom(_)) => {
            Ok(prog.clone())
        }
        _ => Err(Error::Internal("modal label's focus is not an atomic diamond".into())),
    }
}

/// Graphviz rendering of a quasi-proof, for debugging.
pub fn quasi_to_dot(q: &QuasiProof) -> String {
    use std::fmt::Write as _;
    let mut s = String::from("digraph quasi {\n  node [shape=box,fontname=\"monospace\"];\n");
    for (i, node) in q.nodes.iter().enumerate() {
        let kind = match node.kind {
            QKind::Inner => "",
            QKind::Repeat { .. } => " repeat",
            QKind::Exit => " exit",
        };
        let label = format!("k={}{kind}\\n{}", node.ty, node.label).replace('"', "\\\"");
        let _ = writeln!(s, "  q{i} [label=\"{label}\"];");
        for &c in &node.children {
            let _ = writeln!(s, "  q{i} -> q{c};");
        }
        if let QKind::Repeat { companion } = node.kind {
            let _ = writeln!(s, "  q{i} -> q{companion} [style=dashed,constraint=false];");
        }
    }
    s.push_str("}\n");
    s
}

/// The sequent a cluster-view label corresponds to, restored to the original
/// orientation; used in error messages.
#[allow(dead_code)]
pub(crate) fn denormalize(view: &ClusterView, label: &AnnotatedSequent) -> SplitSequent {
    if view.mirror {
        SplitSequent { left: label.clone(), right: AnnotatedSequent::empty() }
    } else {
        SplitSequent { left: AnnotatedSequent::empty(), right: label.clone() }
    }
}
