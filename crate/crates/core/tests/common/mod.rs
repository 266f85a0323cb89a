#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use ultrametric::{DataTable, Dendrogram, Merge, NodePermutation};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Random binary dendrogram with strictly increasing levels.
pub fn random_dendrogram(rng: &mut ChaCha8Rng, n: usize) -> Dendrogram {
    let mut live: Vec<usize> = (0..n).collect();
    let mut level = 0.0;
    let mut merges = Vec::with_capacity(n.saturating_sub(1));
    for k in 0..n.saturating_sub(1) {
        let a = live.swap_remove(rng.gen_range(0..live.len()));
        let b = live.swap_remove(rng.gen_range(0..live.len()));
        level += rng.gen_range(0.1..2.0);
        merges.push(Merge::new(a, b, level));
        live.push(n + k);
    }
    Dendrogram::new(n, merges).expect("random merges form a dendrogram")
}

/// Uniform values in `[lo, hi)`. Continuous draws make tied distances a
/// probability-zero event.
pub fn random_table(rng: &mut ChaCha8Rng, n: usize, m: usize, lo: f64, hi: f64) -> DataTable {
    let values = (0..n * m).map(|_| rng.gen_range(lo..hi)).collect();
    DataTable::new(n, m, values).expect("finite values")
}

/// Each internal node swapped with probability one half.
pub fn random_permutation(rng: &mut ChaCha8Rng, d: &Dendrogram) -> NodePermutation {
    NodePermutation::from_nodes((d.n_terminals()..d.n_nodes()).filter(|_| rng.gen_bool(0.5)))
}
