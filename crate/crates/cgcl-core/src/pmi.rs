//! Distance-to-leader vectors and pseudo-monotonically increasing (PMI)
//! sequences.
//!
//! A PMI sequence orders follower DL vectors so each element is strictly
//! below every later element in some coordinate of its own choosing. The
//! longest such sequence length δ lower-bounds the controllable-subspace
//! dimension γ, which is what the augmentations preserve.

use std::collections::{BTreeMap, HashMap};

use crate::controllability::controllability_rank;
use crate::graph::{bfs_distances, Dist, Graph, LeaderConfig};
use crate::{Error, Result};

/// Follower counts up to this run the exact search; larger graphs fall back
/// to the greedy lower bound.
pub const DEFAULT_EXACT_LIMIT: usize = 64;

/// Hop distances from each leader to one node, in leader-list order.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct DlVector {
    pub entries: Vec<Dist>,
}

/// An ordered node list plus the coordinate choice π(i) per position.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PmiSequence {
    pub nodes: Vec<u32>,
    pub coords: Vec<usize>,
}

impl PmiSequence {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }
}

/// Longest-PMI result. `exact` is false when the greedy fallback produced
/// only a lower bound on δ.
#[derive(Debug, Clone)]
pub struct DeltaBound {
    pub delta: usize,
    pub witness: PmiSequence,
    pub exact: bool,
}

impl DeltaBound {
    /// The witness node set V_D, ascending.
    pub fn witness_nodes(&self) -> Vec<u32> {
        let mut nodes = self.witness.nodes.clone();
        nodes.sort_unstable();
        nodes
    }
}

/// DL vector of every follower, computed with one BFS per leader.
pub fn dl_vectors(g: &Graph, lc: &LeaderConfig) -> BTreeMap<u32, DlVector> {
    let per_leader: Vec<Vec<Dist>> = lc
        .leaders()
        .iter()
        .map(|&l| bfs_distances(g, l))
        .collect();
    lc.followers(g)
        .into_iter()
        .map(|v| {
            let entries = per_leader.iter().map(|d| d[v as usize]).collect();
            (v, DlVector { entries })
        })
        .collect()
}

/// Checks the strict-inequality property for every pair i < j.
pub fn is_valid_pmi(seq: &PmiSequence, dl: &BTreeMap<u32, DlVector>) -> Result<bool> {
    if seq.nodes.len() != seq.coords.len() {
        return Err(Error::ShapeMismatch(format!(
            "{} nodes but {} coordinates",
            seq.nodes.len(),
            seq.coords.len()
        )));
    }
    let vectors: Vec<&DlVector> = seq
        .nodes
        .iter()
        .map(|v| {
            dl.get(v)
                .ok_or_else(|| Error::InvalidLeaders(format!("node {v} not in DL map")))
        })
        .collect::<Result<_>>()?;
    for (i, vi) in vectors.iter().enumerate() {
        let p = seq.coords[i];
        if p >= vi.entries.len() {
            return Err(Error::ShapeMismatch(format!(
                "coordinate {p} out of range at position {i}"
            )));
        }
        for vj in vectors.iter().skip(i + 1) {
            if vi.entries[p] >= vj.entries[p] {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Longest PMI sequence with the default exact-search limit.
pub fn longest_pmi(g: &Graph, lc: &LeaderConfig) -> DeltaBound {
    longest_pmi_with_limit(g, lc, DEFAULT_EXACT_LIMIT)
}

/// Longest PMI sequence over follower DL vectors.
///
/// Exact when the follower count is at most `exact_limit`: best-first search
/// over remaining candidate sets, memoized on the set of distinct vectors
/// still available (equal vectors can never coexist in a PMI, so they
/// collapse to one candidate). Otherwise a deterministic greedy pass builds
/// a lower bound and flags the result as inexact.
pub fn longest_pmi_with_limit(g: &Graph, lc: &LeaderConfig, exact_limit: usize) -> DeltaBound {
    let dl = dl_vectors(g, lc);
    if dl.len() <= exact_limit {
        exact_longest(&dl)
    } else {
        greedy_longest(&dl)
    }
}

/// Returns (δ, γ, δ ≤ γ). Requires the exact-PMI regime.
pub fn delta_leq_gamma_check(g: &Graph, lc: &LeaderConfig) -> Result<(usize, usize, bool)> {
    let nf = g.n() - lc.num_leaders();
    if nf > DEFAULT_EXACT_LIMIT {
        return Err(Error::ShapeMismatch(format!(
            "exact PMI search supports at most {DEFAULT_EXACT_LIMIT} followers, got {nf}"
        )));
    }
    let bound = longest_pmi(g, lc);
    debug_assert!(bound.exact);
    let gamma = controllability_rank(g, lc)?.gamma;
    Ok((bound.delta, gamma, bound.delta <= gamma))
}

struct ExactSearch {
    /// Distinct DL vectors, sorted; index = candidate id.
    vectors: Vec<Vec<Dist>>,
    /// Smallest follower id holding each vector.
    rep_node: Vec<u32>,
    coords: usize,
    /// remaining-set -> (best additional length, best (candidate, coord)).
    memo: HashMap<Vec<u16>, (u16, Option<(u16, u8)>)>,
}

impl ExactSearch {
    /// Upper bound: per coordinate, picks assigned to it must be strictly
    /// increasing there, so at most #distinct values per coordinate in total
    /// (and never more than |S|).
    fn upper_bound(&self, set: &[u16]) -> usize {
        let mut total = 0usize;
        for p in 0..self.coords {
            let mut values: Vec<Dist> = set
                .iter()
                .map(|&ci| self.vectors[ci as usize][p])
                .collect();
            values.sort_unstable();
            values.dedup();
            total += values.len();
        }
        total.min(set.len())
    }

    fn solve(&mut self, set: Vec<u16>) -> u16 {
        if set.is_empty() {
            return 0;
        }
        if let Some(&(len, _)) = self.memo.get(&set) {
            return len;
        }
        let cap = self.upper_bound(&set) as u16;
        let mut best: u16 = 0;
        let mut best_move = None;

        // Children ordered by surviving-set size so strong candidates are
        // explored first and the bound prunes the rest.
        let mut children: Vec<(Vec<u16>, u16, u8)> = Vec::new();
        for &ci in &set {
            let v = &self.vectors[ci as usize];
            for p in 0..self.coords {
                let survivors: Vec<u16> = set
                    .iter()
                    .copied()
                    .filter(|&cj| {
                        cj != ci && self.vectors[cj as usize][p] > v[p]
                    })
                    .collect();
                children.push((survivors, ci, p as u8));
            }
        }
        children.sort_by(|a, b| b.0.len().cmp(&a.0.len()));

        for (survivors, ci, p) in children {
            if best >= cap {
                break;
            }
            if 1 + self.upper_bound(&survivors) as u16 <= best {
                continue;
            }
            let value = 1 + self.solve(survivors);
            if value > best {
                best = value;
                best_move = Some((ci, p));
            }
        }
        self.memo.insert(set, (best, best_move));
        best
    }
}

fn exact_longest(dl: &BTreeMap<u32, DlVector>) -> DeltaBound {
    if dl.is_empty() {
        return DeltaBound {
            delta: 0,
            witness: PmiSequence {
                nodes: Vec::new(),
                coords: Vec::new(),
            },
            exact: true,
        };
    }
    let coords = dl.values().next().unwrap().entries.len();

    // Equal vectors can never both appear (a strict inequality with itself
    // is impossible), so one representative per distinct vector suffices.
    let mut rep: BTreeMap<Vec<Dist>, u32> = BTreeMap::new();
    for (&node, v) in dl {
        rep.entry(v.entries.clone()).or_insert(node);
    }
    let vectors: Vec<Vec<Dist>> = rep.keys().cloned().collect();
    let rep_node: Vec<u32> = rep.values().copied().collect();

    let mut search = ExactSearch {
        vectors,
        rep_node,
        coords,
        memo: HashMap::new(),
    };
    let full: Vec<u16> = (0..search.vectors.len() as u16).collect();
    let delta = search.solve(full.clone()) as usize;

    // Replay the memoized moves to extract a witness.
    let mut nodes = Vec::with_capacity(delta);
    let mut coords_out = Vec::with_capacity(delta);
    let mut set = full;
    while let Some(&(len, Some((ci, p)))) = search.memo.get(&set) {
        if len == 0 {
            break;
        }
        nodes.push(search.rep_node[ci as usize]);
        coords_out.push(p as usize);
        let v = search.vectors[ci as usize].clone();
        set = set
            .into_iter()
            .filter(|&cj| cj != ci && search.vectors[cj as usize][p as usize] > v[p as usize])
            .collect();
    }
    debug_assert_eq!(nodes.len(), delta);

    DeltaBound {
        delta,
        witness: PmiSequence {
            nodes,
            coords: coords_out,
        },
        exact: true,
    }
}

/// Deterministic greedy lower bound: repeatedly append a vector that is the
/// strict unique minimum of the remaining set in some coordinate, breaking
/// ties by lexicographic vector then node id.
fn greedy_longest(dl: &BTreeMap<u32, DlVector>) -> DeltaBound {
    let mut remaining: Vec<(u32, &DlVector)> = dl.iter().map(|(&n, v)| (n, v)).collect();
    let coords = remaining
        .first()
        .map(|(_, v)| v.entries.len())
        .unwrap_or(0);

    let mut nodes = Vec::new();
    let mut coords_out = Vec::new();
    loop {
        // Minimum and its multiplicity per coordinate.
        let mut min_per_coord = vec![Dist::Inf; coords];
        let mut count_min = vec![0usize; coords];
        for (_, v) in &remaining {
            for p in 0..coords {
                if v.entries[p] < min_per_coord[p] {
                    min_per_coord[p] = v.entries[p];
                    count_min[p] = 1;
                } else if v.entries[p] == min_per_coord[p] {
                    count_min[p] += 1;
                }
            }
        }
        let mut pick: Option<(usize, usize)> = None; // (index in remaining, coord)
        for (idx, (node, v)) in remaining.iter().enumerate() {
            for p in 0..coords {
                if count_min[p] == 1 && v.entries[p] == min_per_coord[p] {
                    let better = match pick {
                        None => true,
                        Some((best_idx, _)) => {
                            let (bn, bv) = remaining[best_idx];
                            (v.entries.as_slice(), *node) < (bv.entries.as_slice(), bn)
                        }
                    };
                    if better {
                        pick = Some((idx, p));
                    }
                    break; // smallest coordinate for this node
                }
            }
        }
        match pick {
            Some((idx, p)) => {
                let (node, _) = remaining.remove(idx);
                nodes.push(node);
                coords_out.push(p);
            }
            None => break,
        }
    }

    DeltaBound {
        delta: nodes.len(),
        witness: PmiSequence {
            nodes,
            coords: coords_out,
        },
        exact: false,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn path(n: usize) -> Graph {
        let edges: Vec<(u32, u32)> = (0..n as u32 - 1).map(|i| (i, i + 1)).collect();
        Graph::from_edges(n, &edges).unwrap()
    }

    fn cycle4() -> Graph {
        Graph::from_edges(4, &[(0, 1), (1, 2), (2, 3), (3, 0)]).unwrap()
    }

    fn star4() -> Graph {
        Graph::from_edges(4, &[(0, 1), (0, 2), (0, 3)]).unwrap()
    }

    fn fin(d: u32) -> Dist {
        Dist::Finite(d)
    }

    #[test]
    fn dl_path4_leader0() {
        let g = path(4);
        let lc = LeaderConfig::new(vec![0], &g).unwrap();
        let dl = dl_vectors(&g, &lc);
        assert_eq!(dl[&1].entries, vec![fin(1)]);
        assert_eq!(dl[&2].entries, vec![fin(2)]);
        assert_eq!(dl[&3].entries, vec![fin(3)]);
    }

    #[test]
    fn dl_cycle4_leader0() {
        let g = cycle4();
        let lc = LeaderConfig::new(vec![0], &g).unwrap();
        let dl = dl_vectors(&g, &lc);
        assert_eq!(dl[&1].entries, vec![fin(1)]);
        assert_eq!(dl[&2].entries, vec![fin(2)]);
        assert_eq!(dl[&3].entries, vec![fin(1)]);
    }

    #[test]
    fn dl_two_leaders() {
        let g = path(3);
        let lc = LeaderConfig::new(vec![0, 2], &g).unwrap();
        let dl = dl_vectors(&g, &lc);
        assert_eq!(dl[&1].entries, vec![fin(1), fin(1)]);
    }

    #[test]
    fn valid_pmi_cases() {
        let g = path(4);
        let lc = LeaderConfig::new(vec![0], &g).unwrap();
        let dl = dl_vectors(&g, &lc);

        let empty = PmiSequence {
            nodes: vec![],
            coords: vec![],
        };
        assert!(is_valid_pmi(&empty, &dl).unwrap());

        let single = PmiSequence {
            nodes: vec![2],
            coords: vec![0],
        };
        assert!(is_valid_pmi(&single, &dl).unwrap());

        let full = PmiSequence {
            nodes: vec![1, 2, 3],
            coords: vec![0, 0, 0],
        };
        assert!(is_valid_pmi(&full, &dl).unwrap());

        let reversed = PmiSequence {
            nodes: vec![3, 2, 1],
            coords: vec![0, 0, 0],
        };
        assert!(!is_valid_pmi(&reversed, &dl).unwrap());

        let unknown = PmiSequence {
            nodes: vec![0],
            coords: vec![0],
        };
        assert!(is_valid_pmi(&unknown, &dl).is_err());
    }

    #[test]
    fn longest_path4() {
        let g = path(4);
        let lc = LeaderConfig::new(vec![0], &g).unwrap();
        let bound = longest_pmi(&g, &lc);
        assert_eq!(bound.delta, 3);
        assert!(bound.exact);
        let dl = dl_vectors(&g, &lc);
        assert!(is_valid_pmi(&bound.witness, &dl).unwrap());
    }

    #[test]
    fn longest_star_is_one() {
        let g = star4();
        let lc = LeaderConfig::new(vec![0], &g).unwrap();
        let bound = longest_pmi(&g, &lc);
        assert_eq!(bound.delta, 1);
    }

    #[test]
    fn longest_cycle4_is_two() {
        let g = cycle4();
        let lc = LeaderConfig::new(vec![0], &g).unwrap();
        let bound = longest_pmi(&g, &lc);
        assert_eq!(bound.delta, 2);
        let dl = dl_vectors(&g, &lc);
        assert!(is_valid_pmi(&bound.witness, &dl).unwrap());
    }

    #[test]
    fn delta_leq_gamma_examples() {
        let g = path(4);
        let lc = LeaderConfig::new(vec![0], &g).unwrap();
        assert_eq!(delta_leq_gamma_check(&g, &lc).unwrap(), (3, 3, true));

        let g = star4();
        let lc = LeaderConfig::new(vec![0], &g).unwrap();
        assert_eq!(delta_leq_gamma_check(&g, &lc).unwrap(), (1, 1, true));

        let g = cycle4();
        let lc = LeaderConfig::new(vec![0], &g).unwrap();
        let (delta, gamma, ok) = delta_leq_gamma_check(&g, &lc).unwrap();
        assert_eq!(delta, 2);
        assert!(ok && (2..=3).contains(&gamma));
    }

    #[test]
    fn greedy_respects_validity() {
        let g = path(5);
        let lc = LeaderConfig::new(vec![0], &g).unwrap();
        let bound = longest_pmi_with_limit(&g, &lc, 2); // force greedy
        assert!(!bound.exact);
        let dl = dl_vectors(&g, &lc);
        assert!(is_valid_pmi(&bound.witness, &dl).unwrap());
        // Single leader on a path: all follower distances distinct, greedy
        // finds them all.
        assert_eq!(bound.delta, 4);
    }
}
