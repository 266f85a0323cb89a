//! Child swaps leave distances alone, flip the matching Haar details and
//! p-adic digits, and collapse to one canonical tree.

use ultrametric::datasets;
use ultrametric::haar;
use ultrametric::padic;
use ultrametric::pipeline::{cluster_table, Algorithm, LevelMode};
use ultrametric::symmetry::{apply_permutation, automorphism_count, canonicalize};
use ultrametric::{MergeCriterion, NodePermutation};

fn main() -> ultrametric::Result<()> {
    let data = datasets::iris8();
    let d = cluster_table(&data, MergeCriterion::Median, Algorithm::Auto, LevelMode::Cost)?;
    println!("group order: {}", automorphism_count(&d));

    let perm = NodePermutation::from_nodes([9, 14]);
    let swapped = apply_permutation(&d, &perm)?;
    println!("original {}", d.to_newick());
    println!("swapped  {}", swapped.to_newick());
    println!(
        "same distances: {}",
        swapped.cophenetic_matrix() == d.cophenetic_matrix()
    );

    let before = haar::forward(&d, &data)?;
    let after = haar::forward(&swapped, &data)?;
    for rank in 1..d.n_terminals() {
        let node = d.n_terminals() + rank - 1;
        let flipped = before.detail(rank) != after.detail(rank);
        println!("  d{rank} (node {node}) flipped: {flipped}");
    }

    let a = padic::encode(&d, 3, 7)?;
    let b = padic::encode(&swapped, 3, 7)?;
    println!("row 8 code {} -> {}", a.to_expression(), b.to_expression());

    let (canon, swaps) = canonicalize(&swapped);
    println!(
        "canonical {} via swaps {:?}",
        canon.to_newick(),
        swaps.swaps().collect::<Vec<_>>()
    );
    println!("same canonical form as original: {}", canon == canonicalize(&d).0);
    Ok(())
}
