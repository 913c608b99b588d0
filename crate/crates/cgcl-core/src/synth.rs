//! Seeded synthetic graph generators. Test suites and audits use these, so
//! they live in the library rather than being duplicated per test target.

use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::graph::{connected_components, Graph, LeaderConfig};
use crate::rng::rng_from;

/// Random connected graph: a random recursive tree plus every remaining
/// pair independently with probability `extra_edge_prob`.
pub fn random_connected_graph(rng: &mut ChaCha8Rng, n: usize, extra_edge_prob: f64) -> Graph {
    let mut g = Graph::new(n);
    for v in 1..n as u32 {
        let parent = rng.gen_range(0..v);
        g.add_edge(parent, v).expect("tree edge");
    }
    for u in 0..n as u32 {
        for v in (u + 1)..n as u32 {
            if !g.has_edge(u, v) && rng.gen_bool(extra_edge_prob) {
                g.add_edge(u, v).expect("non-edge");
            }
        }
    }
    g
}

/// Distinct random leaders covering every component: one random node per
/// component first, then uniform fill without replacement.
pub fn random_leader_config(rng: &mut ChaCha8Rng, g: &Graph, count: usize) -> LeaderConfig {
    let comps = connected_components(g);
    let mut chosen: Vec<u32> = comps
        .iter()
        .map(|c| c[rng.gen_range(0..c.len())])
        .collect();
    let mut rest: Vec<u32> = (0..g.n() as u32)
        .filter(|v| !chosen.contains(v))
        .collect();
    rest.shuffle(rng);
    let want = count.clamp(chosen.len(), g.n());
    chosen.extend(rest.into_iter().take(want - chosen.len()));
    LeaderConfig::new(chosen, g).expect("constructed leaders are valid")
}

/// Deterministic (graph, leaders) pair for suite index `i`.
pub fn suite_case(seed: u64, i: u64, max_n: usize, max_leaders: usize) -> (Graph, LeaderConfig) {
    let mut rng = rng_from(seed.wrapping_add(i));
    let n = rng.gen_range(2..=max_n);
    let p = rng.gen_range(0.15..0.6);
    let g = random_connected_graph(&mut rng, n, p);
    let count = rng.gen_range(1..=max_leaders.min(n - 1).max(1));
    let lc = random_leader_config(&mut rng, &g, count);
    (g, lc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::is_connected;

    #[test]
    fn generated_graphs_are_connected() {
        let mut rng = rng_from(1);
        for n in 2..30 {
            let g = random_connected_graph(&mut rng, n, 0.2);
            assert!(is_connected(&g));
            assert_eq!(g.n(), n);
        }
    }

    #[test]
    fn suite_case_is_deterministic() {
        let (g1, lc1) = suite_case(5, 17, 20, 3);
        let (g2, lc2) = suite_case(5, 17, 20, 3);
        assert_eq!(g1, g2);
        assert_eq!(lc1.leaders(), lc2.leaders());
    }
}
