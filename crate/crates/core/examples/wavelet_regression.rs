//! Hard-thresholds detail vectors at increasing tau and shows how far the
//! smoothed table drifts from the data.

use ultrametric::datasets;
use ultrametric::haar::{self, ThresholdMode};
use ultrametric::pipeline::{cluster_table, Algorithm, LevelMode};
use ultrametric::MergeCriterion;

fn main() -> ultrametric::Result<()> {
    let data = datasets::iris8();
    let dend = cluster_table(&data, MergeCriterion::Median, Algorithm::Auto, LevelMode::Cost)?;
    let t = haar::forward(&dend, &data)?;

    let norms: Vec<String> = t.detail_norms().iter().map(|v| format!("{v:.4}")).collect();
    println!("detail norms d1..d{}: {}", norms.len(), norms.join(" "));

    for tau in [0.0, 0.05, 0.1, 0.2, 0.5] {
        for mode in [ThresholdMode::Norm, ThresholdMode::Coordinate] {
            let r = t.threshold_regress(tau, mode)?;
            let kept = (1..=r.details().len())
                .filter(|&k| r.detail(k).is_some_and(|d| d.iter().any(|&x| x != 0.0)))
                .count();
            let drift = r.inverse().max_abs_diff(&data).expect("same shape");
            println!("tau {tau:<4} {mode:?}: {kept} details kept, max drift {drift:.4}");
        }
    }

    println!(
        "\nsmoothed at tau = 0.1:\n{}",
        t.threshold_regress(0.1, ThresholdMode::Norm)?
            .inverse()
            .to_csv()?
    );
    Ok(())
}
