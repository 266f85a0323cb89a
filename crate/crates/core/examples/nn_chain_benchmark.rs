//! Times NN-chain clustering as n doubles. Quadratic work shows up as a
//! ratio near 4 between consecutive sizes.
//!
//! cargo run --release --example nn_chain_benchmark -- [criterion] [reps]

use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use ultrametric::dissim::euclidean_matrix;
use ultrametric::{naive_cluster, nn_chain_cluster, DataTable, MergeCriterion};

fn main() -> ultrametric::Result<()> {
    let mut args = std::env::args().skip(1);
    let crit: MergeCriterion = args.next().as_deref().unwrap_or("ward").parse()?;
    let reps: usize = args.next().and_then(|s| s.parse().ok()).unwrap_or(5);
    let mut rng = ChaCha8Rng::seed_from_u64(7);

    println!(
        "{:>6} {:>12} {:>12} {:>8}",
        "n", "chain (ms)", "naive (ms)", "ratio"
    );
    let mut prev: Option<f64> = None;
    for n in [128usize, 256, 512, 1024] {
        let values = (0..n * 4).map(|_| rng.gen_range(0.0..1.0)).collect();
        let m = euclidean_matrix(&DataTable::new(n, 4, values)?);
        let best = |f: &dyn Fn() -> ultrametric::Result<()>| -> ultrametric::Result<f64> {
            let mut t = f64::INFINITY;
            for _ in 0..reps {
                let start = Instant::now();
                f()?;
                t = t.min(start.elapsed().as_secs_f64() * 1e3);
            }
            Ok(t)
        };
        let chain = best(&|| nn_chain_cluster(&m, crit).map(drop))?;
        // the cubic reference only at sizes where it finishes quickly
        let naive = if n <= 256 {
            format!("{:12.2}", best(&|| naive_cluster(&m, crit).map(drop))?)
        } else {
            format!("{:>12}", "-")
        };
        let ratio = prev.map(|p| format!("{:8.2}", chain / p)).unwrap_or_default();
        println!("{n:>6} {chain:12.2} {naive} {ratio}");
        prev = Some(chain);
    }
    Ok(())
}
