//! Pairwise dissimilarities: Euclidean distance between real rows, and the
//! set-valued matching dissimilarity between presence/absence rows.

use crate::data::{BooleanTable, DataTable};
use crate::genlattice::{AttrSet, SetValuedDistanceTable};
use crate::matrix::DistanceMatrix;

pub fn euclidean(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

pub fn euclidean_matrix(data: &DataTable) -> DistanceMatrix {
    DistanceMatrix::from_fn(data.n_rows(), |i, j| euclidean(data.row(i), data.row(j)))
        .expect("euclidean distances of finite rows are a valid matrix")
}

/// Attributes on which rows `i` and `j` are *not* both present.
///
/// Co-absence counts towards the distance just like disagreement; only
/// co-presence is a match.
pub fn simple_matching_setvalued(data: &BooleanTable, i: usize, j: usize) -> AttrSet {
    let (a, b) = (data.row(i), data.row(j));
    a.iter()
        .zip(b)
        .enumerate()
        .filter(|(_, (&x, &y))| !(x && y))
        .map(|(k, _)| k)
        .collect()
}

/// The set-valued distance for every unordered pair of distinct rows.
pub fn setvalued_table(data: &BooleanTable) -> SetValuedDistanceTable {
    let n = data.n_rows();
    let mut pairs = Vec::with_capacity(n * n.saturating_sub(1) / 2);
    for i in 0..n {
        for j in (i + 1)..n {
            pairs.push(((i, j), simple_matching_setvalued(data, i, j)));
        }
    }
    let objects = (0..n).map(|i| data.row_name(i)).collect();
    let attributes = (0..data.n_cols()).map(|j| data.column_name(j)).collect();
    SetValuedDistanceTable::from_pairs(objects, attributes, pairs)
        .expect("every pair is present exactly once")
}
