//! Clusters the eight bundled iris rows under every criterion and prints the
//! merge sequence, then checks the tree is ultrametric.

use ultrametric::datasets;
use ultrametric::dissim::euclidean_matrix;
use ultrametric::pipeline::{cluster_table, Algorithm, LevelMode};
use ultrametric::{verify_metric, verify_ultrametric, MergeCriterion};

fn main() -> ultrametric::Result<()> {
    let data = datasets::iris8();
    let m = euclidean_matrix(&data);
    assert!(verify_metric(&m, 1e-12).is_empty());

    for crit in MergeCriterion::ALL {
        let d = cluster_table(&data, crit, Algorithm::Auto, LevelMode::Cost)?;
        println!("{crit} (node ids; terminal i is row i + 1):");
        for (k, merge) in d.merges().iter().enumerate() {
            println!(
                "  rank {}: node {} = {} + {} at {:.4}",
                k + 1,
                d.n_terminals() + k,
                merge.left,
                merge.right,
                merge.level
            );
        }
        let violations = verify_ultrametric(&d.cophenetic_matrix(), 1e-12);
        println!("  newick {}", d.to_newick());
        println!("  ultrametric violations: {}", violations.len());
    }
    Ok(())
}
