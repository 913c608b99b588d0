//! Undirected simple graphs, Laplacians, and the leader/follower partition.
//!
//! Nodes are dense 0-based ids. TUDataset files use 1-based ids; the parser
//! shifts them once at read time so nothing downstream translates indices.

use std::collections::VecDeque;

use nalgebra::DMatrix;

use crate::{Error, Result};

/// Hop distance with a dedicated unreachable value. `Inf` compares greater
/// than every finite distance, which is what the PMI strict-inequality
/// comparisons and the edge-addition admissibility rule need.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Dist {
    Finite(u32),
    Inf,
}

impl Dist {
    pub fn is_finite(self) -> bool {
        matches!(self, Dist::Finite(_))
    }

    /// Length of a path that crosses one new edge: `self + 1 + other`.
    pub fn through_edge(self, other: Dist) -> Dist {
        match (self, other) {
            (Dist::Finite(a), Dist::Finite(b)) => Dist::Finite(a + 1 + b),
            _ => Dist::Inf,
        }
    }
}

impl PartialOrd for Dist {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Dist {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        use Dist::*;
        match (self, other) {
            (Finite(a), Finite(b)) => a.cmp(b),
            (Finite(_), Inf) => std::cmp::Ordering::Less,
            (Inf, Finite(_)) => std::cmp::Ordering::Greater,
            (Inf, Inf) => std::cmp::Ordering::Equal,
        }
    }
}

impl std::fmt::Display for Dist {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Dist::Finite(d) => write!(f, "{d}"),
            Dist::Inf => write!(f, "inf"),
        }
    }
}

/// Undirected simple graph. No self-loops, no duplicate edges, endpoints
/// always `< n`. Adjacency lists are kept sorted ascending so every
/// traversal order is deterministic.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    n: usize,
    adj: Vec<Vec<u32>>,
    n_edges: usize,
    pub node_labels: Option<Vec<i64>>,
    pub graph_label: Option<i64>,
}

impl Graph {
    pub fn new(n: usize) -> Self {
        Graph {
            n,
            adj: vec![Vec::new(); n],
            n_edges: 0,
            node_labels: None,
            graph_label: None,
        }
    }

    pub fn from_edges(n: usize, edges: &[(u32, u32)]) -> Result<Self> {
        let mut g = Graph::new(n);
        for &(u, v) in edges {
            g.add_edge(u, v)?;
        }
        Ok(g)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn num_edges(&self) -> usize {
        self.n_edges
    }

    pub fn degree(&self, v: u32) -> usize {
        self.adj[v as usize].len()
    }

    /// Neighbors of `v` in ascending id order.
    pub fn neighbors(&self, v: u32) -> &[u32] {
        &self.adj[v as usize]
    }

    pub fn has_edge(&self, u: u32, v: u32) -> bool {
        u != v
            && (u as usize) < self.n
            && (v as usize) < self.n
            && self.adj[u as usize].binary_search(&v).is_ok()
    }

    /// Adds the undirected edge (u, v). Re-adding an existing edge is an
    /// error: duplicates upstream are a data bug the caller must handle.
    pub fn add_edge(&mut self, u: u32, v: u32) -> Result<()> {
        if u == v {
            return Err(Error::InvalidGraph(format!("self-loop at node {u}")));
        }
        if u as usize >= self.n || v as usize >= self.n {
            return Err(Error::InvalidGraph(format!(
                "edge ({u},{v}) endpoint out of range for n={}",
                self.n
            )));
        }
        let pos = match self.adj[u as usize].binary_search(&v) {
            Ok(_) => return Err(Error::InvalidGraph(format!("duplicate edge ({u},{v})"))),
            Err(pos) => pos,
        };
        self.adj[u as usize].insert(pos, v);
        let pos = self.adj[v as usize].binary_search(&u).unwrap_err();
        self.adj[v as usize].insert(pos, u);
        self.n_edges += 1;
        Ok(())
    }

    pub fn remove_edge(&mut self, u: u32, v: u32) -> Result<()> {
        let pos = self.adj[u as usize]
            .binary_search(&v)
            .map_err(|_| Error::InvalidGraph(format!("edge ({u},{v}) not present")))?;
        self.adj[u as usize].remove(pos);
        let pos = self.adj[v as usize].binary_search(&u).unwrap();
        self.adj[v as usize].remove(pos);
        self.n_edges -= 1;
        Ok(())
    }

    /// Edges as (min, max) pairs in lexicographic order.
    pub fn edges(&self) -> Vec<(u32, u32)> {
        let mut out = Vec::with_capacity(self.n_edges);
        for u in 0..self.n as u32 {
            for &v in &self.adj[u as usize] {
                if u < v {
                    out.push((u, v));
                }
            }
        }
        out
    }

    /// Non-edges (u < v) in lexicographic order.
    pub fn non_edges(&self) -> Vec<(u32, u32)> {
        let mut out = Vec::new();
        for u in 0..self.n as u32 {
            for v in (u + 1)..self.n as u32 {
                if !self.has_edge(u, v) {
                    out.push((u, v));
                }
            }
        }
        out
    }
}

/// Ordered leader list. Followers are the remaining nodes in ascending id
/// order; their positions index the A/B blocks and the DL vectors.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LeaderConfig {
    leaders: Vec<u32>,
}

impl LeaderConfig {
    /// Validates: nonempty, distinct, in range, and every connected
    /// component holds at least one leader (Gramian stability needs the
    /// follower block positive definite, which fails for a leaderless
    /// component).
    pub fn new(leaders: Vec<u32>, g: &Graph) -> Result<Self> {
        if leaders.is_empty() {
            return Err(Error::InvalidLeaders("empty leader set".into()));
        }
        let mut seen = vec![false; g.n()];
        for &l in &leaders {
            if l as usize >= g.n() {
                return Err(Error::InvalidLeaders(format!(
                    "leader {l} out of range for n={}",
                    g.n()
                )));
            }
            if seen[l as usize] {
                return Err(Error::InvalidLeaders(format!("duplicate leader {l}")));
            }
            seen[l as usize] = true;
        }
        for comp in connected_components(g) {
            if !comp.iter().any(|&v| seen[v as usize]) {
                return Err(Error::InvalidLeaders(format!(
                    "component containing node {} has no leader",
                    comp[0]
                )));
            }
        }
        Ok(LeaderConfig { leaders })
    }

    pub fn leaders(&self) -> &[u32] {
        &self.leaders
    }

    pub fn num_leaders(&self) -> usize {
        self.leaders.len()
    }

    pub fn is_leader(&self, v: u32) -> bool {
        self.leaders.contains(&v)
    }

    /// Follower ids ascending.
    pub fn followers(&self, g: &Graph) -> Vec<u32> {
        let mut is_leader = vec![false; g.n()];
        for &l in &self.leaders {
            is_leader[l as usize] = true;
        }
        (0..g.n() as u32)
            .filter(|&v| !is_leader[v as usize])
            .collect()
    }

    /// Image of this config under a node relabeling.
    pub fn relabel(&self, perm: &[u32], g_new: &Graph) -> Result<LeaderConfig> {
        let mapped = self.leaders.iter().map(|&l| perm[l as usize]).collect();
        LeaderConfig::new(mapped, g_new)
    }
}

/// Laplacian blocks under the followers-first ordering: followers ascending,
/// then leaders in config order. `[[A, B], [Bᵀ, C]]` reassembles the full
/// Laplacian of the reordered graph.
#[derive(Debug, Clone)]
pub struct PartitionedLaplacian {
    pub a: DMatrix<f64>,
    pub b: DMatrix<f64>,
    pub c: DMatrix<f64>,
    pub followers: Vec<u32>,
    pub leaders: Vec<u32>,
}

/// Full N×N Laplacian: L[i][i] = degree(i), L[i][j] = −1 iff (i,j) ∈ E.
pub fn laplacian(g: &Graph) -> DMatrix<f64> {
    let n = g.n();
    let mut l = DMatrix::zeros(n, n);
    for v in 0..n as u32 {
        l[(v as usize, v as usize)] = g.degree(v) as f64;
        for &u in g.neighbors(v) {
            l[(v as usize, u as usize)] = -1.0;
        }
    }
    l
}

/// Extracts the A (follower-follower), B (follower-leader) and C
/// (leader-leader) blocks of the Laplacian.
pub fn partition_laplacian(g: &Graph, lc: &LeaderConfig) -> PartitionedLaplacian {
    let followers = lc.followers(g);
    let leaders = lc.leaders().to_vec();
    let nf = followers.len();
    let nl = leaders.len();

    let mut a = DMatrix::zeros(nf, nf);
    let mut b = DMatrix::zeros(nf, nl);
    let mut c = DMatrix::zeros(nl, nl);

    for (i, &fi) in followers.iter().enumerate() {
        a[(i, i)] = g.degree(fi) as f64;
        for (j, &fj) in followers.iter().enumerate() {
            if i != j && g.has_edge(fi, fj) {
                a[(i, j)] = -1.0;
            }
        }
        for (j, &lj) in leaders.iter().enumerate() {
            if g.has_edge(fi, lj) {
                b[(i, j)] = -1.0;
            }
        }
    }
    for (i, &li) in leaders.iter().enumerate() {
        c[(i, i)] = g.degree(li) as f64;
        for (j, &lj) in leaders.iter().enumerate() {
            if i != j && g.has_edge(li, lj) {
                c[(i, j)] = -1.0;
            }
        }
    }

    PartitionedLaplacian {
        a,
        b,
        c,
        followers,
        leaders,
    }
}

/// BFS hop distances from `source`; unreachable nodes get `Dist::Inf`.
/// Neighbor expansion is in ascending id order.
pub fn bfs_distances(g: &Graph, source: u32) -> Vec<Dist> {
    let mut dist = vec![Dist::Inf; g.n()];
    dist[source as usize] = Dist::Finite(0);
    let mut queue = VecDeque::new();
    queue.push_back(source);
    while let Some(v) = queue.pop_front() {
        let dv = match dist[v as usize] {
            Dist::Finite(d) => d,
            Dist::Inf => unreachable!(),
        };
        for &u in g.neighbors(v) {
            if dist[u as usize] == Dist::Inf {
                dist[u as usize] = Dist::Finite(dv + 1);
                queue.push_back(u);
            }
        }
    }
    dist
}

/// BFS parent array (ascending-id tie-break); used for deterministic
/// shortest-path extraction.
pub fn bfs_parents(g: &Graph, source: u32) -> Vec<Option<u32>> {
    let mut parent = vec![None; g.n()];
    let mut seen = vec![false; g.n()];
    seen[source as usize] = true;
    let mut queue = VecDeque::new();
    queue.push_back(source);
    while let Some(v) = queue.pop_front() {
        for &u in g.neighbors(v) {
            if !seen[u as usize] {
                seen[u as usize] = true;
                parent[u as usize] = Some(v);
                queue.push_back(u);
            }
        }
    }
    parent
}

/// Maximal connected node sets, each sorted ascending, ordered by smallest
/// member.
pub fn connected_components(g: &Graph) -> Vec<Vec<u32>> {
    let mut comp = vec![usize::MAX; g.n()];
    let mut out: Vec<Vec<u32>> = Vec::new();
    for start in 0..g.n() as u32 {
        if comp[start as usize] != usize::MAX {
            continue;
        }
        let id = out.len();
        let mut members = vec![start];
        comp[start as usize] = id;
        let mut queue = VecDeque::new();
        queue.push_back(start);
        while let Some(v) = queue.pop_front() {
            for &u in g.neighbors(v) {
                if comp[u as usize] == usize::MAX {
                    comp[u as usize] = id;
                    members.push(u);
                    queue.push_back(u);
                }
            }
        }
        members.sort_unstable();
        out.push(members);
    }
    out
}

pub fn num_components(g: &Graph) -> usize {
    connected_components(g).len()
}

pub fn is_connected(g: &Graph) -> bool {
    g.n() <= 1 || num_components(g) == 1
}

/// Relabels nodes by `perm` (node v becomes perm[v]); labels move with
/// their nodes.
pub fn relabel(g: &Graph, perm: &[u32]) -> Result<Graph> {
    if perm.len() != g.n() {
        return Err(Error::InvalidGraph(format!(
            "permutation length {} != n {}",
            perm.len(),
            g.n()
        )));
    }
    let mut seen = vec![false; g.n()];
    for &p in perm {
        if p as usize >= g.n() || seen[p as usize] {
            return Err(Error::InvalidGraph("not a bijection on 0..n-1".into()));
        }
        seen[p as usize] = true;
    }
    let mut out = Graph::new(g.n());
    for (u, v) in g.edges() {
        out.add_edge(perm[u as usize], perm[v as usize])?;
    }
    if let Some(labels) = &g.node_labels {
        let mut new_labels = vec![0; g.n()];
        for v in 0..g.n() {
            new_labels[perm[v] as usize] = labels[v];
        }
        out.node_labels = Some(new_labels);
    }
    out.graph_label = g.graph_label;
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn path(n: usize) -> Graph {
        let edges: Vec<(u32, u32)> = (0..n as u32 - 1).map(|i| (i, i + 1)).collect();
        Graph::from_edges(n, &edges).unwrap()
    }

    fn k3() -> Graph {
        Graph::from_edges(3, &[(0, 1), (0, 2), (1, 2)]).unwrap()
    }

    #[test]
    fn laplacian_triangle() {
        let l = laplacian(&k3());
        let expect = DMatrix::from_row_slice(
            3,
            3,
            &[2.0, -1.0, -1.0, -1.0, 2.0, -1.0, -1.0, -1.0, 2.0],
        );
        assert_eq!(l, expect);
    }

    #[test]
    fn laplacian_single_node() {
        let g = Graph::new(1);
        assert_eq!(laplacian(&g), DMatrix::from_row_slice(1, 1, &[0.0]));
    }

    #[test]
    fn laplacian_path3() {
        let l = laplacian(&path(3));
        let expect =
            DMatrix::from_row_slice(3, 3, &[1.0, -1.0, 0.0, -1.0, 2.0, -1.0, 0.0, -1.0, 1.0]);
        assert_eq!(l, expect);
    }

    #[test]
    fn partition_path3_leader2() {
        let g = path(3);
        let lc = LeaderConfig::new(vec![2], &g).unwrap();
        let p = partition_laplacian(&g, &lc);
        assert_eq!(p.a, DMatrix::from_row_slice(2, 2, &[1.0, -1.0, -1.0, 2.0]));
        assert_eq!(p.b, DMatrix::from_row_slice(2, 1, &[0.0, -1.0]));
        assert_eq!(p.c, DMatrix::from_row_slice(1, 1, &[1.0]));
        assert_eq!(p.followers, vec![0, 1]);
    }

    #[test]
    fn partition_k2_leader1() {
        let g = Graph::from_edges(2, &[(0, 1)]).unwrap();
        let lc = LeaderConfig::new(vec![1], &g).unwrap();
        let p = partition_laplacian(&g, &lc);
        assert_eq!(p.a, DMatrix::from_row_slice(1, 1, &[1.0]));
        assert_eq!(p.b, DMatrix::from_row_slice(1, 1, &[-1.0]));
        assert_eq!(p.c, DMatrix::from_row_slice(1, 1, &[1.0]));
    }

    #[test]
    fn partition_star_center_leader() {
        let g = Graph::from_edges(4, &[(0, 1), (0, 2), (0, 3)]).unwrap();
        let lc = LeaderConfig::new(vec![0], &g).unwrap();
        let p = partition_laplacian(&g, &lc);
        assert_eq!(p.a, DMatrix::identity(3, 3));
        assert_eq!(p.b, DMatrix::from_row_slice(3, 1, &[-1.0, -1.0, -1.0]));
    }

    #[test]
    fn partition_errors() {
        let g = path(3);
        assert!(LeaderConfig::new(vec![], &g).is_err());
        assert!(LeaderConfig::new(vec![3], &g).is_err());
        assert!(LeaderConfig::new(vec![1, 1], &g).is_err());
    }

    #[test]
    fn leaderless_component_rejected() {
        let g = Graph::from_edges(4, &[(0, 1), (2, 3)]).unwrap();
        assert!(LeaderConfig::new(vec![0], &g).is_err());
        assert!(LeaderConfig::new(vec![0, 2], &g).is_ok());
    }

    #[test]
    fn bfs_path4() {
        let d = bfs_distances(&path(4), 0);
        assert_eq!(
            d,
            vec![
                Dist::Finite(0),
                Dist::Finite(1),
                Dist::Finite(2),
                Dist::Finite(3)
            ]
        );
    }

    #[test]
    fn bfs_disconnected_sentinel() {
        let g = Graph::from_edges(4, &[(0, 1), (2, 3)]).unwrap();
        let d = bfs_distances(&g, 0);
        assert_eq!(d, vec![Dist::Finite(0), Dist::Finite(1), Dist::Inf, Dist::Inf]);
    }

    #[test]
    fn bfs_cycle4() {
        let g = Graph::from_edges(4, &[(0, 1), (1, 2), (2, 3), (3, 0)]).unwrap();
        let d = bfs_distances(&g, 0);
        assert_eq!(
            d,
            vec![
                Dist::Finite(0),
                Dist::Finite(1),
                Dist::Finite(2),
                Dist::Finite(1)
            ]
        );
    }

    #[test]
    fn components_cases() {
        assert_eq!(connected_components(&k3()), vec![vec![0, 1, 2]]);
        let isolated = Graph::new(4);
        assert_eq!(connected_components(&isolated).len(), 4);
        let g = Graph::from_edges(3, &[(0, 1)]).unwrap();
        assert_eq!(connected_components(&g), vec![vec![0, 1], vec![2]]);
    }

    #[test]
    fn relabel_identity_and_reverse() {
        let g = path(3);
        let id = relabel(&g, &[0, 1, 2]).unwrap();
        assert_eq!(id, g);
        let rev = relabel(&g, &[2, 1, 0]).unwrap();
        assert_eq!(rev.edges(), vec![(0, 1), (1, 2)]);
        let k = k3();
        assert_eq!(relabel(&k, &[1, 2, 0]).unwrap().edges(), k.edges());
        assert!(relabel(&g, &[0, 0, 1]).is_err());
    }

    #[test]
    fn dist_ordering() {
        assert!(Dist::Finite(5) < Dist::Inf);
        assert!(Dist::Inf <= Dist::Inf);
        assert_eq!(Dist::Finite(2).through_edge(Dist::Finite(3)), Dist::Finite(6));
        assert_eq!(Dist::Inf.through_edge(Dist::Finite(3)), Dist::Inf);
    }

    #[test]
    fn graph_invariants_enforced() {
        let mut g = Graph::new(3);
        assert!(g.add_edge(0, 0).is_err());
        assert!(g.add_edge(0, 5).is_err());
        g.add_edge(0, 1).unwrap();
        assert!(g.add_edge(1, 0).is_err());
        assert_eq!(g.num_edges(), 1);
    }
}
