//! Controllability-preserving graph augmentations.
//!
//! All three perturbations (delete / add / substitute) preserve the hop
//! distances between every leader and every node of the longest-PMI witness
//! set V_D, which keeps the witness sequence valid in the augmented graph
//! and therefore guarantees δ(G′) ≥ δ(G).

use std::collections::BTreeSet;

use rand::seq::SliceRandom;

use crate::graph::{bfs_distances, bfs_parents, num_components, Dist, Graph, LeaderConfig};
use crate::pmi::longest_pmi;
use crate::rng::{derive_seed, rng_from};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AugmentKind {
    Delete,
    Add,
    Substitute,
}

impl AugmentKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            AugmentKind::Delete => "delete",
            AugmentKind::Add => "add",
            AugmentKind::Substitute => "substitute",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "delete" => Ok(AugmentKind::Delete),
            "add" => Ok(AugmentKind::Add),
            "substitute" => Ok(AugmentKind::Substitute),
            other => Err(Error::InvalidGraph(format!(
                "unknown augmentation kind '{other}'"
            ))),
        }
    }
}

/// What to perturb and with which RNG stream.
#[derive(Debug, Clone, Copy)]
pub struct AugmentationSpec {
    pub kind: AugmentKind,
    pub k: usize,
    pub seed: u64,
}

/// Edges that must survive deletions: one deterministic shortest path from
/// every leader to every witness node.
#[derive(Debug, Clone)]
pub struct Backbone {
    pub edges: BTreeSet<(u32, u32)>,
    pub witness_nodes: Vec<u32>,
    pub delta: usize,
    pub exact: bool,
}

fn norm_edge(u: u32, v: u32) -> (u32, u32) {
    (u.min(v), u.max(v))
}

/// Computes V_D from the longest PMI and collects the BFS-tree edges of one
/// shortest path per (leader, witness node) pair. Deleting any edge outside
/// this set leaves every d(leader, witness) unchanged: the kept path still
/// realizes the old distance and deletions can never shorten one.
pub fn backbone(g: &Graph, lc: &LeaderConfig) -> Backbone {
    let bound = longest_pmi(g, lc);
    let witness_nodes = bound.witness_nodes();
    let mut edges = BTreeSet::new();
    for &leader in lc.leaders() {
        let parents = bfs_parents(g, leader);
        for &w in &witness_nodes {
            let mut v = w;
            while v != leader {
                match parents[v as usize] {
                    Some(p) => {
                        edges.insert(norm_edge(v, p));
                        v = p;
                    }
                    None => break, // unreachable from this leader; nothing to keep
                }
            }
        }
    }
    Backbone {
        edges,
        witness_nodes,
        delta: bound.delta,
        exact: bound.exact,
    }
}

/// Deletion sequence actually applied by [`edge_deletion`]: non-backbone
/// edges in seeded uniform order, each kept only if removing it (after the
/// prior removals) does not split a component.
fn deletion_sequence(g: &Graph, lc: &LeaderConfig, k: usize, seed: u64) -> (Graph, Vec<(u32, u32)>) {
    let bb = backbone(g, lc);
    let mut pot: Vec<(u32, u32)> = g
        .edges()
        .into_iter()
        .filter(|e| !bb.edges.contains(e))
        .collect();
    let mut rng = rng_from(derive_seed(seed, "delete"));
    pot.shuffle(&mut rng);

    let base_components = num_components(g);
    let mut out = g.clone();
    let mut removed = Vec::new();
    for (u, v) in pot {
        if removed.len() == k {
            break;
        }
        out.remove_edge(u, v).expect("potential edge present");
        if num_components(&out) > base_components {
            out.add_edge(u, v).expect("edge was just removed");
        } else {
            removed.push((u, v));
        }
    }
    (out, removed)
}

/// Removes up to `k` non-backbone, non-bridging edges chosen uniformly
/// without replacement. Oversize `k` deletes everything deletable.
pub fn edge_deletion(g: &Graph, lc: &LeaderConfig, spec: &AugmentationSpec) -> Graph {
    deletion_sequence(g, lc, spec.k, spec.seed).0
}

/// Non-edges that can all be added together without changing any
/// d(leader, witness) distance.
///
/// Candidates are scanned in lexicographic order and accepted greedily: the
/// shortcut test runs in the graph holding all previously accepted edges,
/// because two individually-safe edges can jointly create a shorter path.
/// A final BFS pass re-verifies every preserved distance.
pub fn maximal_addition_set(g: &Graph, lc: &LeaderConfig) -> Result<Vec<(u32, u32)>> {
    let bound = longest_pmi(g, lc);
    let witness = bound.witness_nodes();
    let leaders = lc.leaders();

    let original: Vec<Vec<Dist>> = leaders.iter().map(|&l| bfs_distances(g, l)).collect();

    let mut h = g.clone();
    let mut leader_dist = original.clone();
    let mut accepted = Vec::new();

    for (u, v) in g.non_edges() {
        // New candidate paths leader -> {u,v} -> witness must not undercut
        // any preserved distance.
        let du = bfs_distances(&h, u);
        let dv = bfs_distances(&h, v);
        let mut safe = true;
        'check: for (li, _) in leaders.iter().enumerate() {
            for &w in &witness {
                let current = leader_dist[li][w as usize];
                let via_uv = leader_dist[li][u as usize].through_edge(dv[w as usize]);
                let via_vu = leader_dist[li][v as usize].through_edge(du[w as usize]);
                if via_uv.min(via_vu) < current {
                    safe = false;
                    break 'check;
                }
            }
        }
        if safe {
            h.add_edge(u, v).expect("candidate is a non-edge");
            accepted.push((u, v));
            for (li, &l) in leaders.iter().enumerate() {
                leader_dist[li] = bfs_distances(&h, l);
            }
        }
    }

    for (li, &l) in leaders.iter().enumerate() {
        let d = bfs_distances(&h, l);
        for &w in &witness {
            if d[w as usize] != original[li][w as usize] {
                return Err(Error::Internal(format!(
                    "addition set changed d({l},{w}) from {} to {}",
                    original[li][w as usize], d[w as usize]
                )));
            }
        }
    }
    Ok(accepted)
}

/// Adds up to `k` edges sampled uniformly without replacement from the
/// maximal addition set. Any subset of a jointly-safe set is safe.
pub fn edge_addition(g: &Graph, lc: &LeaderConfig, spec: &AugmentationSpec) -> Result<Graph> {
    let mut pool = maximal_addition_set(g, lc)?;
    let mut rng = rng_from(derive_seed(spec.seed, "add"));
    pool.shuffle(&mut rng);
    let mut out = g.clone();
    for &(u, v) in pool.iter().take(spec.k) {
        out.add_edge(u, v).expect("addition candidate is a non-edge");
    }
    Ok(out)
}

/// Deletes k′ edges then adds k′ edges, k′ = min(k, deletable, addable).
/// The addition pool is computed on the original graph, so deleted edges
/// can never return. Each addition is re-verified against the post-deletion
/// graph before being kept.
pub fn edge_substitution(g: &Graph, lc: &LeaderConfig, spec: &AugmentationSpec) -> Result<Graph> {
    let (_, removable) = deletion_sequence(g, lc, spec.k, spec.seed);
    let mut pool = maximal_addition_set(g, lc)?;
    let mut rng = rng_from(derive_seed(spec.seed, "add"));
    pool.shuffle(&mut rng);

    let k_eff = spec.k.min(removable.len()).min(pool.len());

    let mut out = g.clone();
    for &(u, v) in removable.iter().take(k_eff) {
        out.remove_edge(u, v).expect("removable edge present");
    }

    let leaders = lc.leaders();
    let witness = longest_pmi(g, lc).witness_nodes();
    let original: Vec<Vec<Dist>> = leaders.iter().map(|&l| bfs_distances(g, l)).collect();

    let mut added = 0usize;
    for &(u, v) in &pool {
        if added == k_eff {
            break;
        }
        out.add_edge(u, v).expect("pool entry is a non-edge");
        let ok = leaders.iter().enumerate().all(|(li, &l)| {
            let d = bfs_distances(&out, l);
            witness.iter().all(|&w| d[w as usize] == original[li][w as usize])
        });
        if ok {
            added += 1;
        } else {
            // Safe in the original graph but not after deletions; skip it.
            out.remove_edge(u, v).expect("edge was just added");
        }
    }
    Ok(out)
}

/// Dispatch on the spec kind.
pub fn augment(g: &Graph, lc: &LeaderConfig, spec: &AugmentationSpec) -> Result<Graph> {
    match spec.kind {
        AugmentKind::Delete => Ok(edge_deletion(g, lc, spec)),
        AugmentKind::Add => edge_addition(g, lc, spec),
        AugmentKind::Substitute => edge_substitution(g, lc, spec),
    }
}

/// Uniform random edge perturbation with no controllability constraint
/// (the Random-CGCL ablation). Deletions still refuse to split components;
/// additions draw from all non-edges.
pub fn random_perturbation(g: &Graph, spec: &AugmentationSpec) -> Graph {
    let delete = |graph: &Graph, k: usize| -> (Graph, usize) {
        let mut edges = graph.edges();
        let mut rng = rng_from(derive_seed(spec.seed, "rand-delete"));
        edges.shuffle(&mut rng);
        let base = num_components(graph);
        let mut out = graph.clone();
        let mut removed = 0;
        for (u, v) in edges {
            if removed == k {
                break;
            }
            out.remove_edge(u, v).expect("edge present");
            if num_components(&out) > base {
                out.add_edge(u, v).expect("edge was just removed");
            } else {
                removed += 1;
            }
        }
        (out, removed)
    };
    let add = |graph: &Graph, pool_graph: &Graph, k: usize| -> Graph {
        let mut pool: Vec<(u32, u32)> = pool_graph.non_edges();
        let mut rng = rng_from(derive_seed(spec.seed, "rand-add"));
        pool.shuffle(&mut rng);
        let mut out = graph.clone();
        let mut added = 0;
        for (u, v) in pool {
            if added == k {
                break;
            }
            if !out.has_edge(u, v) {
                out.add_edge(u, v).expect("non-edge");
                added += 1;
            }
        }
        out
    };

    match spec.kind {
        AugmentKind::Delete => delete(g, spec.k).0,
        AugmentKind::Add => add(g, g, spec.k),
        AugmentKind::Substitute => {
            let (deleted, removed) = delete(g, spec.k);
            // Pool from the original graph: deleted edges stay deleted.
            add(&deleted, g, removed)
        }
    }
}
