//! Child swaps at internal nodes, the group they generate, and a canonical
//! representative of each orbit.

use std::collections::BTreeSet;

use num_bigint::BigUint;

use crate::dendrogram::Dendrogram;
use crate::error::{Error, Result};

/// Set of internal nodes whose two children are exchanged. Nodes not listed
/// are left alone.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct NodePermutation {
    swaps: BTreeSet<usize>,
}

impl NodePermutation {
    pub fn identity() -> NodePermutation {
        NodePermutation::default()
    }

    pub fn from_nodes(nodes: impl IntoIterator<Item = usize>) -> NodePermutation {
        NodePermutation {
            swaps: nodes.into_iter().collect(),
        }
    }

    pub fn swaps(&self) -> impl Iterator<Item = usize> + '_ {
        self.swaps.iter().copied()
    }

    pub fn swaps_at(&self, node: usize) -> bool {
        self.swaps.contains(&node)
    }

    pub fn is_identity(&self) -> bool {
        self.swaps.is_empty()
    }

    /// Group product. Swaps at a node commute with everything and have order
    /// two, so composition is the symmetric difference.
    pub fn compose(&self, other: &NodePermutation) -> NodePermutation {
        NodePermutation {
            swaps: self.swaps.symmetric_difference(&other.swaps).copied().collect(),
        }
    }
}

/// Swaps the children of every selected node. Node ids, ranks and levels
/// stay put; each swapped subtree moves as a block.
pub fn apply_permutation(dend: &Dendrogram, perm: &NodePermutation) -> Result<Dendrogram> {
    let mut out = dend.clone();
    for node in perm.swaps() {
        if dend.children(node).is_none() {
            return Err(Error::UnknownNode(format!("{node} is not an internal node")));
        }
        out.swap_children(node);
    }
    Ok(out)
}

/// Order of the group generated by independent swaps at the `n - 1`
/// internal nodes: `2^(n-1)`.
pub fn automorphism_count(dend: &Dendrogram) -> BigUint {
    BigUint::from(1u32) << (dend.n_terminals() - 1)
}

/// Puts the child holding the smaller terminal index on the left at every
/// node. Returns the canonical tree and the swaps that produced it.
pub fn canonicalize(dend: &Dendrogram) -> (Dendrogram, NodePermutation) {
    let n = dend.n_terminals();
    let mut min_terminal: Vec<usize> = (0..dend.n_nodes()).collect();
    let mut swaps = BTreeSet::new();
    for (k, m) in dend.merges().iter().enumerate() {
        let (l, r) = (min_terminal[m.left], min_terminal[m.right]);
        if r < l {
            swaps.insert(n + k);
        }
        min_terminal[n + k] = l.min(r);
    }
    let perm = NodePermutation { swaps };
    let canon = apply_permutation(dend, &perm).expect("swaps only name internal nodes");
    (canon, perm)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dendrogram::Merge;
    use crate::test_util::{random_dendrogram, ranked8};
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_perm(seed: u64, d: &Dendrogram) -> NodePermutation {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        NodePermutation::from_nodes((d.n_terminals()..d.n_nodes()).filter(|_| rng.gen_bool(0.5)))
    }

    #[test]
    fn identity_and_involution() {
        let d = ranked8();
        assert_eq!(apply_permutation(&d, &NodePermutation::identity()).unwrap(), d);
        let p = NodePermutation::from_nodes([10, 14]);
        let once = apply_permutation(&d, &p).unwrap();
        assert_ne!(once, d);
        assert_eq!(apply_permutation(&once, &p).unwrap(), d);
        assert!(p.compose(&p).is_identity());
    }

    #[test]
    fn root_swap_two_leaves() {
        let d = Dendrogram::new(2, vec![Merge::new(0, 1, 1.0)]).unwrap();
        let s = apply_permutation(&d, &NodePermutation::from_nodes([2])).unwrap();
        assert_eq!(s.children(2), Some((1, 0)));
        assert_eq!(s.cophenetic_matrix(), d.cophenetic_matrix());
    }

    #[test]
    fn unknown_nodes_rejected() {
        let d = ranked8();
        assert!(apply_permutation(&d, &NodePermutation::from_nodes([3])).is_err());
        assert!(apply_permutation(&d, &NodePermutation::from_nodes([99])).is_err());
    }

    #[test]
    fn group_orders() {
        let two = Dendrogram::new(2, vec![Merge::new(0, 1, 1.0)]).unwrap();
        assert_eq!(automorphism_count(&two), BigUint::from(2u32));
        assert_eq!(automorphism_count(&random_dendrogram(0, 3)), BigUint::from(4u32));
        assert_eq!(automorphism_count(&ranked8()), BigUint::from(128u32));
    }

    #[test]
    fn canonical_forms() {
        let d = ranked8();
        let (c, p) = canonicalize(&d);
        assert!(p.is_identity());
        assert_eq!(c, d);
        let rev = Dendrogram::new(2, vec![Merge::new(1, 0, 1.0)]).unwrap();
        let (c, p) = canonicalize(&rev);
        assert_eq!(c.children(2), Some((0, 1)));
        assert_eq!(p, NodePermutation::from_nodes([2]));
    }

    proptest! {
        #[test]
        fn orbit_invariants(seed in any::<u64>(), n in 2usize..=20) {
            let d = random_dendrogram(seed, n);
            let p = random_perm(seed.wrapping_add(1), &d);
            let moved = apply_permutation(&d, &p).unwrap();
            prop_assert_eq!(moved.cophenetic_matrix(), d.cophenetic_matrix());
            let (c1, _) = canonicalize(&d);
            let (c2, _) = canonicalize(&moved);
            prop_assert_eq!(&c1, &c2);
            let (c3, p3) = canonicalize(&c1);
            prop_assert_eq!(&c3, &c1);
            prop_assert!(p3.is_identity());
        }
    }
}
