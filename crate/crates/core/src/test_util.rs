use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::datasets;
use crate::dendrogram::{Dendrogram, Merge};

pub fn ranked8() -> Dendrogram {
    datasets::ranked8()
}

/// Random binary dendrogram with strictly increasing levels.
pub fn random_dendrogram(seed: u64, n: usize) -> Dendrogram {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
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
