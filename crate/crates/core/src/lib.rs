//! Hierarchical structure in data: agglomerative clustering into ranked
//! dendrograms, the ultrametric they induce, p-adic codes of their terminals,
//! the Haar wavelet transform of a dendrogram, set-valued distances with
//! their join semilattice, and the child-swap symmetries of a tree.

pub mod data;
pub mod datasets;
pub mod dendrogram;
pub mod dissim;
pub mod error;
pub mod genlattice;
pub mod haar;
pub mod hclust;
pub mod matrix;
pub mod padic;
pub mod pipeline;
pub mod symmetry;

#[cfg(test)]
mod test_util;

pub use crate::data::{BooleanTable, DataTable};
pub use crate::dendrogram::{Dendrogram, Merge};
pub use crate::error::{Error, Result};
pub use crate::genlattice::{build_lattice, AttrSet, Semilattice, SetValuedDistanceTable};
pub use crate::haar::HaarTransform;
pub use crate::hclust::{naive_cluster, nn_chain_cluster, MergeCriterion};
pub use crate::matrix::{verify_metric, verify_ultrametric, DistanceMatrix, Violation};
pub use crate::padic::PadicCode;
pub use crate::symmetry::NodePermutation;
