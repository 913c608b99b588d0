//! Fixed-dimension control-based graph embeddings (CTRL).
//!
//! For each configured leader-set size the Gramian statistics of several
//! sampled leader configurations are aggregated (mean/min/max), then a
//! global block of graph size and Laplacian spectrum features is appended.
//! The dimension depends only on the policy, never on the graph, so graphs
//! of any size land in the same feature space.

use nalgebra::{DMatrix, SymmetricEigen};
use rayon::prelude::*;

use crate::controllability::gramian_report;
use crate::graph::{connected_components, laplacian, Graph, LeaderConfig};
use crate::rng::{derive_seed_indexed, rng_from, splitmix64};
use crate::{Error, Result};

pub const DEFAULT_LAPLACIAN_EIGS: usize = 8;

/// Gramian statistics aggregated per leader config: rank/N_f, trace,
/// min nonzero eigenvalue, log-determinant of the nonzero spectrum.
const GRAMIAN_METRICS: [&str; 4] = ["rank_norm", "trace", "min_nonzero_eig", "ld"];
const AGGREGATES: [&str; 3] = ["mean", "min", "max"];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LeaderStrategy {
    /// Uniform draws without replacement, reseeded per (graph, size, sample).
    SeededRandom,
    /// Highest-degree nodes, ties broken by id; identical for every sample.
    DegreeRanked,
}

impl LeaderStrategy {
    pub fn as_str(&self) -> &'static str {
        match self {
            LeaderStrategy::SeededRandom => "seeded-random",
            LeaderStrategy::DegreeRanked => "degree-ranked",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "seeded-random" => Ok(LeaderStrategy::SeededRandom),
            "degree-ranked" => Ok(LeaderStrategy::DegreeRanked),
            other => Err(Error::InvalidLeaders(format!(
                "unknown leader strategy '{other}'"
            ))),
        }
    }
}

/// How leader sets are probed per graph.
#[derive(Debug, Clone)]
pub struct LeaderPolicy {
    pub sizes: Vec<usize>,
    pub samples_per_size: usize,
    pub seed: u64,
    pub strategy: LeaderStrategy,
}

impl Default for LeaderPolicy {
    fn default() -> Self {
        LeaderPolicy {
            sizes: vec![1, 2, 3],
            samples_per_size: 5,
            seed: 0,
            strategy: LeaderStrategy::SeededRandom,
        }
    }
}

/// One embedding row.
#[derive(Debug, Clone, PartialEq)]
pub struct CtrlEmbedding {
    pub values: Vec<f64>,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct EmbeddingDiagnostics {
    pub non_finite_replaced: usize,
    pub gramian_failures: usize,
}

impl EmbeddingDiagnostics {
    fn merge(&mut self, other: EmbeddingDiagnostics) {
        self.non_finite_replaced += other.non_finite_replaced;
        self.gramian_failures += other.gramian_failures;
    }
}

/// Embedding matrix plus per-feature standardization statistics.
#[derive(Debug, Clone)]
pub struct EmbeddedDataset {
    /// Row i = embedding of graph i.
    pub matrix: DMatrix<f64>,
    pub schema: Vec<String>,
    pub means: Vec<f64>,
    pub stds: Vec<f64>,
    pub diagnostics: EmbeddingDiagnostics,
}

/// Feature names, fixed by the policy.
pub fn embedding_schema(policy: &LeaderPolicy, n_lap_eigs: usize) -> Vec<String> {
    let mut names = Vec::with_capacity(embedding_dim(policy, n_lap_eigs));
    for &s in &policy.sizes {
        for metric in GRAMIAN_METRICS {
            for agg in AGGREGATES {
                names.push(format!("leaders{s}_{metric}_{agg}"));
            }
        }
    }
    names.push("num_nodes".into());
    names.push("num_edges".into());
    for i in 0..n_lap_eigs {
        names.push(format!("lap_eig_small_nz_{i}"));
    }
    for i in 0..n_lap_eigs {
        names.push(format!("lap_eig_large_{i}"));
    }
    names
}

pub fn embedding_dim(policy: &LeaderPolicy, n_lap_eigs: usize) -> usize {
    GRAMIAN_METRICS.len() * AGGREGATES.len() * policy.sizes.len() + 2 + 2 * n_lap_eigs
}

/// Effective leader count for a requested size: clamped to n−1 (keeping at
/// least one follower when possible) and raised to the component count so
/// the Gramian stays defined on disconnected graphs. May reach n, in which
/// case there are no followers and the Gramian block is all zeros.
fn effective_count(requested: usize, n: usize, n_components: usize) -> usize {
    let clamped = requested.min((n - 1).max(1)).max(1);
    clamped.max(n_components).min(n)
}

/// Leader configurations probed for one graph: `samples_per_size` configs
/// per size, in (size-major, sample-minor) order. Deterministic in
/// (policy.seed, graph_index).
pub fn select_leaders(g: &Graph, policy: &LeaderPolicy, graph_index: usize) -> Vec<LeaderConfig> {
    let comps = connected_components(g);
    let mut out = Vec::with_capacity(policy.sizes.len() * policy.samples_per_size);
    for (si, &size) in policy.sizes.iter().enumerate() {
        for r in 0..policy.samples_per_size {
            let count = effective_count(size, g.n(), comps.len());
            let leaders = match policy.strategy {
                LeaderStrategy::DegreeRanked => degree_ranked_leaders(g, &comps, count),
                LeaderStrategy::SeededRandom => {
                    let stream = splitmix64(
                        (graph_index as u64) ^ ((si as u64) << 24) ^ ((r as u64) << 48),
                    );
                    let seed = derive_seed_indexed(policy.seed, "leaders", stream);
                    random_leaders(g, &comps, count, seed)
                }
            };
            out.push(LeaderConfig::new(leaders, g).expect("selected leaders are valid"));
        }
    }
    out
}

fn degree_ranked_leaders(g: &Graph, comps: &[Vec<u32>], count: usize) -> Vec<u32> {
    let mut chosen: Vec<u32> = comps
        .iter()
        .map(|c| {
            *c.iter()
                .max_by_key(|&&v| (g.degree(v), std::cmp::Reverse(v)))
                .unwrap()
        })
        .collect();
    let mut rest: Vec<u32> = (0..g.n() as u32).filter(|v| !chosen.contains(v)).collect();
    rest.sort_by_key(|&v| (std::cmp::Reverse(g.degree(v)), v));
    for v in rest {
        if chosen.len() >= count {
            break;
        }
        chosen.push(v);
    }
    chosen
}

fn random_leaders(g: &Graph, comps: &[Vec<u32>], count: usize, seed: u64) -> Vec<u32> {
    use rand::seq::SliceRandom;
    use rand::Rng;
    let mut rng = rng_from(seed);
    let mut chosen: Vec<u32> = comps
        .iter()
        .map(|c| c[rng.gen_range(0..c.len())])
        .collect();
    let mut rest: Vec<u32> = (0..g.n() as u32).filter(|v| !chosen.contains(v)).collect();
    rest.shuffle(&mut rng);
    for v in rest {
        if chosen.len() >= count {
            break;
        }
        chosen.push(v);
    }
    chosen
}

fn gramian_features(g: &Graph, lc: &LeaderConfig, diags: &mut EmbeddingDiagnostics) -> [f64; 4] {
    match gramian_report(g, lc) {
        Ok(rep) => {
            let nf = rep.nf();
            if nf == 0 {
                return [0.0; 4];
            }
            [
                rep.rank as f64 / nf as f64,
                rep.trace,
                rep.min_nonzero_eig,
                rep.ld,
            ]
        }
        Err(_) => {
            diags.gramian_failures += 1;
            [0.0; 4]
        }
    }
}

/// CTRL embedding of one graph. `graph_index` seeds the per-graph leader
/// draws; standalone callers can pass 0.
pub fn ctrl_embedding(
    g: &Graph,
    policy: &LeaderPolicy,
    n_lap_eigs: usize,
    graph_index: usize,
) -> (CtrlEmbedding, EmbeddingDiagnostics) {
    let mut diags = EmbeddingDiagnostics::default();
    let configs = select_leaders(g, policy, graph_index);
    let r = policy.samples_per_size;
    let mut values = Vec::with_capacity(embedding_dim(policy, n_lap_eigs));

    for (si, _) in policy.sizes.iter().enumerate() {
        let block: Vec<[f64; 4]> = configs[si * r..(si + 1) * r]
            .iter()
            .map(|lc| gramian_features(g, lc, &mut diags))
            .collect();
        for m in 0..GRAMIAN_METRICS.len() {
            let xs: Vec<f64> = block.iter().map(|f| f[m]).collect();
            let mean = xs.iter().sum::<f64>() / xs.len() as f64;
            let min = xs.iter().cloned().fold(f64::INFINITY, f64::min);
            let max = xs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            values.push(mean);
            values.push(min);
            values.push(max);
        }
    }

    values.push(g.n() as f64);
    values.push(g.num_edges() as f64);

    let lap = laplacian(g);
    let eig = SymmetricEigen::new(lap);
    let mut spectrum: Vec<f64> = eig.eigenvalues.iter().cloned().collect();
    spectrum.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let lambda_max = spectrum.last().cloned().unwrap_or(0.0);
    let threshold = g.n() as f64 * lambda_max.max(0.0) * 1e-10;

    let nonzero_asc: Vec<f64> = spectrum.iter().cloned().filter(|&x| x > threshold).collect();
    for i in 0..n_lap_eigs {
        values.push(nonzero_asc.get(i).cloned().unwrap_or(0.0));
    }
    for i in 0..n_lap_eigs {
        let idx = spectrum.len().checked_sub(i + 1);
        values.push(idx.map(|j| spectrum[j]).unwrap_or(0.0));
    }

    for v in values.iter_mut() {
        if !v.is_finite() {
            *v = 0.0;
            diags.non_finite_replaced += 1;
        }
    }

    (CtrlEmbedding { values }, diags)
}

/// Embeds every graph (in parallel, order-preserving) and computes
/// per-feature standardization statistics.
pub fn embed_dataset(
    graphs: &[Graph],
    policy: &LeaderPolicy,
    n_lap_eigs: usize,
) -> Result<EmbeddedDataset> {
    if graphs.is_empty() {
        return Err(Error::EmptyDataset);
    }
    let rows: Vec<(CtrlEmbedding, EmbeddingDiagnostics)> = graphs
        .par_iter()
        .enumerate()
        .map(|(i, g)| ctrl_embedding(g, policy, n_lap_eigs, i))
        .collect();

    let dim = embedding_dim(policy, n_lap_eigs);
    let mut matrix = DMatrix::zeros(graphs.len(), dim);
    let mut diagnostics = EmbeddingDiagnostics::default();
    for (i, (emb, d)) in rows.into_iter().enumerate() {
        debug_assert_eq!(emb.values.len(), dim);
        for (j, v) in emb.values.into_iter().enumerate() {
            matrix[(i, j)] = v;
        }
        diagnostics.merge(d);
    }

    let n = graphs.len() as f64;
    let mut means = vec![0.0; dim];
    let mut stds = vec![0.0; dim];
    for j in 0..dim {
        let col = matrix.column(j);
        let mean = col.sum() / n;
        let var = col.iter().map(|&x| (x - mean) * (x - mean)).sum::<f64>() / n;
        means[j] = mean;
        stds[j] = var.sqrt();
    }

    Ok(EmbeddedDataset {
        matrix,
        schema: embedding_schema(policy, n_lap_eigs),
        means,
        stds,
        diagnostics,
    })
}

/// Z-scores columns. Features whose deviation is zero — or negligible next
/// to their mean, i.e. constant up to floating-point noise — pass through
/// with std treated as 1 so they cannot blow up.
pub fn standardize(matrix: &DMatrix<f64>, means: &[f64], stds: &[f64]) -> DMatrix<f64> {
    let mut out = matrix.clone();
    for j in 0..out.ncols() {
        let constant = stds[j] <= 1e-12 * means[j].abs().max(1.0);
        let s = if constant { 1.0 } else { stds[j] };
        for i in 0..out.nrows() {
            out[(i, j)] = (out[(i, j)] - means[j]) / s;
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::relabel;
    use approx::assert_relative_eq;

    fn policy(sizes: Vec<usize>, r: usize, strategy: LeaderStrategy) -> LeaderPolicy {
        LeaderPolicy {
            sizes,
            samples_per_size: r,
            seed: 7,
            strategy,
        }
    }

    #[test]
    fn select_single_node() {
        let g = Graph::new(1);
        let p = policy(vec![1, 3], 2, LeaderStrategy::SeededRandom);
        for lc in select_leaders(&g, &p, 0) {
            assert_eq!(lc.leaders(), &[0]);
        }
    }

    #[test]
    fn select_degree_ranked_k3_tie() {
        let g = Graph::from_edges(3, &[(0, 1), (0, 2), (1, 2)]).unwrap();
        let p = policy(vec![1], 1, LeaderStrategy::DegreeRanked);
        let lcs = select_leaders(&g, &p, 0);
        assert_eq!(lcs[0].leaders(), &[0]);
    }

    #[test]
    fn select_degree_ranked_path3() {
        let g = Graph::from_edges(3, &[(0, 1), (1, 2)]).unwrap();
        let p = policy(vec![1], 1, LeaderStrategy::DegreeRanked);
        let lcs = select_leaders(&g, &p, 0);
        assert_eq!(lcs[0].leaders(), &[1]);
    }

    #[test]
    fn select_covers_components() {
        let g = Graph::from_edges(5, &[(0, 1), (2, 3), (3, 4)]).unwrap();
        let p = policy(vec![1], 3, LeaderStrategy::SeededRandom);
        for lc in select_leaders(&g, &p, 4) {
            // Requested one leader, but coverage needs one per component.
            assert_eq!(lc.num_leaders(), 2);
        }
    }

    #[test]
    fn embedding_k2() {
        let g = Graph::from_edges(2, &[(0, 1)]).unwrap();
        let p = policy(vec![1], 1, LeaderStrategy::SeededRandom);
        let (emb, diags) = ctrl_embedding(&g, &p, 2, 0);
        // rank/N_f mean/min/max then trace mean/min/max.
        assert_relative_eq!(emb.values[0], 1.0);
        assert_relative_eq!(emb.values[3], 0.5, max_relative = 1e-10);
        assert_eq!(diags, EmbeddingDiagnostics::default());
    }

    #[test]
    fn embedding_single_node_conventions() {
        let g = Graph::new(1);
        let p = policy(vec![1], 2, LeaderStrategy::SeededRandom);
        let (emb, _) = ctrl_embedding(&g, &p, 3, 0);
        // Gramian block all zero, then N=1, |E|=0, then spectrum padding.
        assert_eq!(&emb.values[..12], &[0.0; 12]);
        assert_relative_eq!(emb.values[12], 1.0);
        assert_relative_eq!(emb.values[13], 0.0);
        assert!(emb.values[14..].iter().all(|&x| x == 0.0));
    }

    #[test]
    fn embedding_dim_formula() {
        let p = policy(vec![1, 2, 3], 5, LeaderStrategy::SeededRandom);
        assert_eq!(embedding_dim(&p, 8), 12 * 3 + 2 + 16);
        assert_eq!(embedding_schema(&p, 8).len(), embedding_dim(&p, 8));
        for n in [1usize, 2, 5, 9] {
            let g = if n == 1 {
                Graph::new(1)
            } else {
                Graph::from_edges(n, &[(0, 1)]).unwrap()
            };
            let (emb, _) = ctrl_embedding(&g, &p, 8, 0);
            assert_eq!(emb.values.len(), embedding_dim(&p, 8));
        }
    }

    #[test]
    fn embed_dataset_deterministic() {
        let g1 = Graph::from_edges(4, &[(0, 1), (1, 2), (2, 3)]).unwrap();
        let g2 = Graph::from_edges(4, &[(0, 1), (1, 2), (2, 3), (3, 0)]).unwrap();
        let p = policy(vec![1, 2], 3, LeaderStrategy::SeededRandom);
        let a = embed_dataset(&[g1.clone(), g2.clone()], &p, 4).unwrap();
        let b = embed_dataset(&[g1, g2], &p, 4).unwrap();
        assert_eq!(a.matrix, b.matrix);
    }

    #[test]
    fn identical_graphs_identical_rows() {
        let g = Graph::from_edges(3, &[(0, 1), (1, 2)]).unwrap();
        let p = policy(vec![1], 2, LeaderStrategy::DegreeRanked);
        let ds = embed_dataset(&[g.clone(), g], &p, 4).unwrap();
        assert_eq!(
            ds.matrix.row(0).iter().cloned().collect::<Vec<_>>(),
            ds.matrix.row(1).iter().cloned().collect::<Vec<_>>()
        );
    }

    #[test]
    fn standardized_columns_are_zscored() {
        let g1 = Graph::from_edges(4, &[(0, 1), (1, 2), (2, 3)]).unwrap();
        let g2 = Graph::from_edges(5, &[(0, 1), (1, 2), (2, 3), (3, 4), (0, 4)]).unwrap();
        let g3 = Graph::from_edges(3, &[(0, 1), (1, 2), (0, 2)]).unwrap();
        let p = policy(vec![1, 2], 2, LeaderStrategy::SeededRandom);
        let ds = embed_dataset(&[g1, g2, g3], &p, 4).unwrap();
        let z = standardize(&ds.matrix, &ds.means, &ds.stds);
        for j in 0..z.ncols() {
            let col = z.column(j);
            let mean = col.sum() / 3.0;
            assert!(mean.abs() < 1e-10, "column {j} mean {mean}");
            let non_constant = ds.stds[j] > 1e-12 * ds.means[j].abs().max(1.0);
            if non_constant {
                let var = col.iter().map(|&x| (x - mean) * (x - mean)).sum::<f64>() / 3.0;
                assert_relative_eq!(var.sqrt(), 1.0, max_relative = 1e-8);
            }
        }
    }

    #[test]
    fn all_embeddings_finite() {
        let mut graphs = vec![Graph::new(1), Graph::new(2)];
        graphs.push(Graph::from_edges(2, &[(0, 1)]).unwrap());
        graphs.push(Graph::from_edges(6, &[(0, 1), (2, 3), (4, 5)]).unwrap());
        let p = LeaderPolicy::default();
        let ds = embed_dataset(&graphs, &p, 8).unwrap();
        assert!(ds.matrix.iter().all(|x| x.is_finite()));
    }

    #[test]
    fn degree_ranked_relabel_invariance() {
        // Degrees 4,3,2,2,1: the top-2 ranks are unambiguous, so the
        // degree-ranked leader sets for sizes 1 and 2 map under relabeling.
        let g = Graph::from_edges(5, &[(0, 1), (0, 2), (0, 3), (0, 4), (1, 2), (1, 3)]).unwrap();
        let mut degrees: Vec<usize> = (0..5).map(|v| g.degree(v)).collect();
        degrees.sort_unstable_by(|a, b| b.cmp(a));
        assert!(degrees[0] > degrees[1] && degrees[1] > degrees[2]);

        let perm = [3u32, 0, 4, 2, 1];
        let h = relabel(&g, &perm).unwrap();
        let p = policy(vec![1, 2], 1, LeaderStrategy::DegreeRanked);
        let (eg, _) = ctrl_embedding(&g, &p, 4, 0);
        let (eh, _) = ctrl_embedding(&h, &p, 4, 0);
        for (a, b) in eg.values.iter().zip(eh.values.iter()) {
            assert_relative_eq!(a, b, epsilon = 1e-8, max_relative = 1e-8);
        }
    }
}
