//! Small reference datasets bundled with the library.

use crate::data::{BooleanTable, DataTable};
use crate::dendrogram::Dendrogram;

/// The first eight rows of Fisher's iris measurements.
pub const IRIS8: [[f64; 4]; 8] = [
    [5.1, 3.5, 1.4, 0.2],
    [4.9, 3.0, 1.4, 0.2],
    [4.7, 3.2, 1.3, 0.2],
    [4.6, 3.1, 1.5, 0.2],
    [5.0, 3.6, 1.4, 0.2],
    [5.4, 3.9, 1.7, 0.4],
    [4.6, 3.4, 1.4, 0.3],
    [5.0, 3.4, 1.5, 0.2],
];

pub const IRIS_COLUMNS: [&str; 4] = ["Sepal.L", "Sepal.W", "Petal.L", "Petal.W"];

/// Expected Haar dendrogram transform of [`IRIS8`] under median linkage.
/// Columns are `s7, d7, d6, ..., d1`; rows follow [`IRIS_COLUMNS`].
pub const IRIS8_HAAR: [[f64; 8]; 4] = [
    [5.146875, 0.253125, 0.13125, 0.1375, -0.025, 0.05, -0.025, 0.05],
    [3.603125, 0.296875, 0.16875, -0.1375, 0.125, 0.05, -0.075, -0.05],
    [1.5625, 0.1375, 0.025, 0.0, 0.0, -0.10, 0.05, 0.0],
    [0.30625, 0.09375, -0.0125, -0.025, 0.05, 0.0, 0.0, 0.0],
];

/// Five objects described by three presence/absence attributes.
pub const PRESENCE5: [[bool; 3]; 5] = [
    [true, false, true],
    [false, true, true],
    [true, false, true],
    [true, false, false],
    [false, false, true],
];

pub const PRESENCE5_OBJECTS: [&str; 5] = ["a", "b", "c", "e", "f"];
pub const PRESENCE5_ATTRIBUTES: [&str; 3] = ["v1", "v2", "v3"];

/// Non-singleton clusters of the eight-terminal ranked example tree, in
/// rank order, 0-based.
pub fn ranked8_clusters() -> Vec<Vec<usize>> {
    vec![
        vec![0, 1],
        vec![0, 1, 2],
        vec![3, 4],
        vec![3, 4, 5],
        vec![0, 1, 2, 3, 4, 5],
        vec![6, 7],
        (0..8).collect(),
    ]
}

pub fn iris8() -> DataTable {
    DataTable::new(8, 4, IRIS8.iter().flatten().copied().collect())
        .and_then(|t| t.with_row_labels((1..=8).map(|i| i.to_string()).collect()))
        .and_then(|t| t.with_column_labels(IRIS_COLUMNS.iter().map(|s| s.to_string()).collect()))
        .expect("embedded iris table is well formed")
}

pub fn presence5() -> BooleanTable {
    BooleanTable::new(5, 3, PRESENCE5.iter().flatten().copied().collect())
        .and_then(|t| t.with_row_labels(PRESENCE5_OBJECTS.iter().map(|s| s.to_string()).collect()))
        .and_then(|t| t.with_column_labels(PRESENCE5_ATTRIBUTES.iter().map(|s| s.to_string()).collect()))
        .expect("embedded presence table is well formed")
}

/// The eight-terminal ranked tree, terminals labelled `x1..x8`.
pub fn ranked8() -> Dendrogram {
    Dendrogram::from_cluster_list(8, &ranked8_clusters())
        .and_then(|d| d.with_labels((1..=8).map(|i| format!("x{i}")).collect()))
        .expect("embedded cluster list is a hierarchy")
}

/// p-adic terms `(rank, coefficient)` of the terminals of [`ranked8`].
pub const RANKED8_CODES: [&[(usize, i8)]; 8] = [
    &[(1, 1), (2, 1), (5, 1), (7, 1)],
    &[(1, -1), (2, 1), (5, 1), (7, 1)],
    &[(2, -1), (5, 1), (7, 1)],
    &[(3, 1), (4, 1), (5, -1), (7, 1)],
    &[(3, -1), (4, 1), (5, -1), (7, 1)],
    &[(4, -1), (5, -1), (7, 1)],
    &[(6, 1), (7, -1)],
    &[(6, -1), (7, -1)],
];
