//! Haar transform of the median-linkage iris tree: the coefficient table,
//! the exact inverse, and the approximation chain of one row.

use ultrametric::datasets;
use ultrametric::haar;
use ultrametric::pipeline::{cluster_table, coefficient_text, Algorithm, LevelMode};
use ultrametric::MergeCriterion;

fn main() -> ultrametric::Result<()> {
    let data = datasets::iris8();
    let dend = cluster_table(&data, MergeCriterion::Median, Algorithm::Auto, LevelMode::Cost)?;
    let t = haar::forward(&dend, &data)?;

    print!("{}", coefficient_text(&t));
    let err = t.inverse().max_abs_diff(&data).expect("same shape");
    println!("\nmax reconstruction error: {err:.2e}");

    let row = 0;
    println!("\napproximations of row {}:", data.row_name(row));
    for step in t.approximation_chain(row)? {
        let label = match step.rank {
            Some(r) => format!("{} d{r}", if step.sign > 0 { '+' } else { '-' }),
            None => "s".to_string(),
        };
        let approx: Vec<String> = step.approx.iter().map(|v| format!("{v:.4}")).collect();
        println!("  {label:<5} [{}]  error {:.4}", approx.join(", "), step.error);
    }
    Ok(())
}
