//! Builds a dendrogram from a nested cluster list and reads distances off it.

use ultrametric::datasets;
use ultrametric::matrix::all_triangles_isosceles;
use ultrametric::verify_ultrametric;

fn main() -> ultrametric::Result<()> {
    let d = datasets::ranked8();
    let m = d.cophenetic_matrix();

    print!("{:>4}", "");
    for j in 0..m.len() {
        print!("{:>4}", d.terminal_name(j));
    }
    println!();
    for i in 0..m.len() {
        print!("{:>4}", d.terminal_name(i));
        for j in 0..m.len() {
            print!("{:>4}", m.get(i, j));
        }
        println!();
    }

    let lca = d.lowest_common_ancestor(0, 5);
    println!("x1 and x6 first meet at node {lca} (rank {:?})", d.rank(lca));
    println!("cluster of that node: {:?}", d.cluster_members(lca)?);
    println!("partition after 4 merges: {:?}", d.partition_after(4));
    println!(
        "strong triangle inequality holds: {}",
        verify_ultrametric(&m, 0.0).is_empty()
    );
    println!("every triangle isosceles: {}", all_triangles_isosceles(&m, 0.0));
    Ok(())
}
