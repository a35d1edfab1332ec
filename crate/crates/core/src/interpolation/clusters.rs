//! Cluster decomposition of a cyclic proof.
//!
//! Clusters are the maximal strongly connected components of the proof tree
//! extended with its backlink edges. A proper (non-singleton) cluster is a
//! subtree of the underlying tree, so it has a root; its exit nodes are the
//! children of cluster members lying outside the cluster.

use crate::prover::CyclicProof;

#[derive(Clone, Debug)]
pub struct Cluster {
    pub nodes: Vec<usize>,
    pub proper: bool,
    /// The shallowest member; for singletons, the member itself.
    pub root: usize,
    /// Children of members outside the cluster, in tree order.
    pub exits: Vec<usize>,
}

#[derive(Clone, Debug)]
pub struct ClusterDecomposition {
    /// Clusters in processing order: every cluster appears after the
    /// clusters its exits belong to (reverse topological order of the
    /// condensation).
    pub clusters: Vec<Cluster>,
    pub cluster_of: Vec<usize>,
}

pub fn clusters(proof: &CyclicProof) -> ClusterDecomposition {
    let n = proof.nodes.len();
    let succs: Vec<Vec<u32>> = (0..n)
        .map(|v| {
            let mut out: Vec<u32> =
                proof.nodes[v].children.iter().map(|&c| c as u32).collect();
            if let Some(&companion) = proof.backlinks.get(&v) {
                out.push(companion as u32);
            }
            out
        })
        .collect();

    // Tarjan emits components children-first, which is the order the
    // interpolant recursion wants.
    let comps = tarjan(n, &succs);
    let mut cluster_of = vec![usize::MAX; n];
    for (ci, comp) in comps.iter().enumerate() {
        for &v in comp {
            cluster_of[v as usize] = ci;
        }
    }

    let clusters = comps
        .iter()
        .enumerate()
        .map(|(ci, comp)| {
            let mut nodes: Vec<usize> = comp.iter().map(|&v| v as usize).collect();
            nodes.sort();
            let proper = nodes.len() > 1;
            let mut exits = Vec::new();
            for &v in &nodes {
                for &c in &proof.nodes[v].children {
                    if cluster_of[c] != ci {
                        exits.push(c);
                    }
                }
            }
            exits.sort();
            exits.dedup();
            // The root is the member whose parent is outside (or missing).
            let parents = parent_map(proof);
            let root = nodes
                .iter()
                .copied()
                .find(|&v| {
                    let p = parents[v];
                    p == usize::MAX || cluster_of[p] != ci
                })
                .unwrap_or(nodes[0]);
            Cluster { nodes, proper, root, exits }
        })
        .collect();

    ClusterDecomposition { clusters, cluster_of }
}

fn parent_map(proof: &CyclicProof) -> Vec<usize> {
    let mut parent = vec![usize::MAX; proof.nodes.len()];
    for (i, node) in proof.nodes.iter().enumerate() {
        for &c in &node.children {
            parent[c] = i;
        }
    }
    parent
}

fn tarjan(n: usize, succs: &[Vec<u32>]) -> Vec<Vec<u32>> {
    let mut index = vec![usize::MAX; n];
    let mut low = vec![0usize; n];
    let mut on_stack = vec![false; n];
    let mut stack: Vec<u32> = Vec::new();
    let mut next = 0usize;
    let mut comps = Vec::new();

    for root in 0..n as u32 {
        if index[root as usize] != usize::MAX {
            continue;
        }
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
