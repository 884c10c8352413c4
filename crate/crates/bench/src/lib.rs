//! Deterministic workloads shared by the benchmarks.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use si_maxcut::Graph;

/// Erdos-Renyi graph with unit weights.
pub fn random_graph(n: usize, density: f64, seed: u64) -> Graph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut triples = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            if rng.random_bool(density) {
                triples.push((i, j, 1.0));
            }
        }
    }
    Graph::from_triples(n, &triples).expect("generated edges are valid")
}

/// Toroidal grid with weights drawn from `{1, 2}`, similar in shape to the planar G-set instances.
pub fn torus(side: usize, seed: u64) -> Graph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = side * side;
    let mut triples = Vec::with_capacity(2 * n);
    for r in 0..side {
        for c in 0..side {
            let i = r * side + c;
            for j in [r * side + (c + 1) % side, ((r + 1) % side) * side + c] {
                let w = if rng.random_bool(0.5) { 1.0 } else { 2.0 };
                triples.push((i.min(j), i.max(j), w));
            }
        }
    }
    Graph::from_triples(n, &triples).expect("torus edges are valid")
}
