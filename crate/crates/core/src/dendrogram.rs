//! Binary ranked dendrograms and the ultrametric they induce.
//!
//! Node ids follow the usual stepwise convention: terminals are `0..n`, and the
//! internal node created by the `k`-th merge (0-based) is `n + k`. Its rank is
//! `k + 1`, so the root has rank `n - 1`. The first child listed in a merge is
//! the *left* child and carries branch label `+1`; the second carries `-1`.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::DistanceMatrix;

const NO_PARENT: usize = usize::MAX;

/// One agglomeration: `left` and `right` are node ids, `level` is the value
/// of the new cluster.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Merge {
    pub left: usize,
    pub right: usize,
    pub level: f64,
}

impl Merge {
    pub fn new(left: usize, right: usize, level: f64) -> Merge {
        Merge { left, right, level }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Dendrogram {
    n: usize,
    merges: Vec<Merge>,
    parent: Vec<usize>,
    sizes: Vec<usize>,
    labels: Option<Vec<String>>,
    raw_levels: Option<Vec<f64>>,
}

impl Dendrogram {
    /// Validates and builds a dendrogram over `n_terminals` observations.
    ///
    /// Every node but the root must be used exactly once as a child, a merge
    /// may only reference nodes created before it, and levels must be finite,
    /// nonnegative and never smaller than the levels of the merged children.
    pub fn new(n_terminals: usize, merges: Vec<Merge>) -> Result<Dendrogram> {
        let n = n_terminals;
        if n == 0 {
            return Err(Error::InvalidDendrogram("no terminals".into()));
        }
        if merges.len() != n - 1 {
            return Err(Error::InvalidDendrogram(format!(
                "{} terminals need {} merges, got {}",
                n,
                n - 1,
                merges.len()
            )));
        }
        let total = 2 * n - 1;
        let mut parent = vec![NO_PARENT; total];
        let mut sizes = vec![1; total];
        let mut levels = vec![0.0; total];
        for (k, m) in merges.iter().enumerate() {
            let id = n + k;
            if !m.level.is_finite() || m.level < 0.0 {
                return Err(Error::InvalidDendrogram(format!(
                    "merge {k} has level {} (must be finite and nonnegative)",
                    m.level
                )));
            }
            if m.left == m.right {
                return Err(Error::InvalidDendrogram(format!(
                    "merge {k} joins node {} with itself",
                    m.left
                )));
            }
            for child in [m.left, m.right] {
                if child >= id {
                    return Err(Error::InvalidDendrogram(format!(
                        "merge {k} references node {child}, which does not exist yet"
                    )));
                }
                if parent[child] != NO_PARENT {
                    return Err(Error::InvalidDendrogram(format!("node {child} is merged twice")));
                }
                if levels[child] > m.level {
                    return Err(Error::InvalidDendrogram(format!(
                        "merge {k} at level {} lies below its child {child} at level {}",
                        m.level, levels[child]
                    )));
                }
                parent[child] = id;
            }
            sizes[id] = sizes[m.left] + sizes[m.right];
            levels[id] = m.level;
        }
        Ok(Dendrogram {
            n,
            merges,
            parent,
            sizes,
            labels: None,
            raw_levels: None,
        })
    }

    /// Builds a ranked dendrogram from its list of non-singleton clusters in
    /// rank order (`clusters[0]` has rank 1). Each cluster must be the union
    /// of exactly two clusters already present. The child holding the smaller
    /// terminal becomes the left child; levels are the ranks.
    pub fn from_cluster_list(n_terminals: usize, clusters: &[Vec<usize>]) -> Result<Dendrogram> {
        let n = n_terminals;
        // top-level clusters currently available: (node id, sorted members)
        let mut live: Vec<(usize, Vec<usize>)> = (0..n).map(|i| (i, vec![i])).collect();
        let mut merges = Vec::with_capacity(clusters.len());
        for (k, cluster) in clusters.iter().enumerate() {
            let mut want = cluster.clone();
            want.sort_unstable();
            want.dedup();
            if let Some(&bad) = want.iter().find(|&&t| t >= n) {
                return Err(Error::IndexOutOfRange { index: bad, len: n });
            }
            let parts: Vec<usize> = live
                .iter()
                .enumerate()
                .filter(|(_, (_, members))| members.iter().any(|t| want.binary_search(t).is_ok()))
                .map(|(pos, _)| pos)
                .collect();
            let covered: usize = parts.iter().map(|&p| live[p].1.len()).sum();
            if parts.len() != 2 || covered != want.len() {
                return Err(Error::InvalidDendrogram(format!(
                    "cluster {} is not the union of two existing clusters",
                    k + 1
                )));
            }
            let (a, b) = (parts[0], parts[1]);
            let (left, right) = if live[a].1[0] < live[b].1[0] {
                (a, b)
            } else {
                (b, a)
            };
            merges.push(Merge::new(live[left].0, live[right].0, (k + 1) as f64));
            // remove the higher position first so the lower stays valid
            let (hi, lo) = if a > b { (a, b) } else { (b, a) };
            live.remove(hi);
            live.remove(lo);
            live.push((n + k, want));
        }
        Dendrogram::new(n, merges)
    }

    pub fn n_terminals(&self) -> usize {
        self.n
    }

    /// Total node count, `2n - 1`.
    pub fn n_nodes(&self) -> usize {
        2 * self.n - 1
    }

    pub fn merges(&self) -> &[Merge] {
        &self.merges
    }

    pub fn root(&self) -> usize {
        self.n_nodes() - 1
    }

    pub fn is_terminal(&self, node: usize) -> bool {
        node < self.n
    }

    pub fn check_node(&self, node: usize) -> Result<()> {
        if node < self.n_nodes() {
            Ok(())
        } else {
            Err(Error::IndexOutOfRange {
                index: node,
                len: self.n_nodes(),
            })
        }
    }

    pub fn check_terminal(&self, terminal: usize) -> Result<()> {
        if terminal < self.n {
            Ok(())
        } else {
            Err(Error::IndexOutOfRange {
                index: terminal,
                len: self.n,
            })
        }
    }

    /// The merge that created `node`, or `None` for a terminal.
    pub fn merge_of(&self, node: usize) -> Option<&Merge> {
        node.checked_sub(self.n).and_then(|k| self.merges.get(k))
    }

    pub fn children(&self, node: usize) -> Option<(usize, usize)> {
        self.merge_of(node).map(|m| (m.left, m.right))
    }

    pub fn parent(&self, node: usize) -> Option<usize> {
        match self.parent.get(node) {
            Some(&p) if p != NO_PARENT => Some(p),
            _ => None,
        }
    }

    /// ν(node); terminals sit at level 0.
    pub fn level(&self, node: usize) -> f64 {
        self.merge_of(node).map_or(0.0, |m| m.level)
    }

    /// Agglomeration rank `1..n-1` of an internal node.
    pub fn rank(&self, node: usize) -> Option<usize> {
        if node >= self.n && node < self.n_nodes() {
            Some(node - self.n + 1)
        } else {
            None
        }
    }

    /// Node id of the internal node with the given rank.
    pub fn node_at_rank(&self, rank: usize) -> Option<usize> {
        if rank >= 1 && rank < self.n {
            Some(self.n + rank - 1)
        } else {
            None
        }
    }

    /// Number of terminals below `node`.
    pub fn size(&self, node: usize) -> usize {
        self.sizes[node]
    }

    /// `+1` when `node` is the left child of its parent, `-1` when it is the
    /// right child, `None` for the root.
    pub fn branch_label(&self, node: usize) -> Option<i8> {
        let m = self.merge_of(self.parent(node)?)?;
        Some(if m.left == node { 1 } else { -1 })
    }

    /// Internal nodes strictly above `node`, from its parent up to the root.
    pub fn ancestors(&self, node: usize) -> Vec<usize> {
        let mut out = Vec::new();
        let mut cur = node;
        while let Some(p) = self.parent(cur) {
            out.push(p);
            cur = p;
        }
        out
    }

    /// Lowest common ancestor. Parents always have larger ids than their
    /// children, so advancing the smaller id converges on the LCA.
    pub fn lowest_common_ancestor(&self, a: usize, b: usize) -> usize {
        let (mut a, mut b) = (a, b);
        while a != b {
            if a < b {
                a = self.parent[a];
            } else {
                b = self.parent[b];
            }
        }
        a
    }

    /// Level of the lowest cluster containing both terminals.
    pub fn cophenetic_distance(&self, i: usize, j: usize) -> Result<f64> {
        self.check_terminal(i)?;
        self.check_terminal(j)?;
        if i == j {
            return Ok(0.0);
        }
        Ok(self.level(self.lowest_common_ancestor(i, j)))
    }

    /// All pairwise cophenetic distances, filled merge by merge in `O(n²)`.
    pub fn cophenetic_matrix(&self) -> DistanceMatrix {
        let n = self.n;
        let mut values = vec![0.0; n * n];
        let mut members: Vec<Vec<usize>> = (0..n).map(|i| vec![i]).collect();
        members.resize(self.n_nodes(), Vec::new());
        for (k, m) in self.merges.iter().enumerate() {
            let left = std::mem::take(&mut members[m.left]);
            let right = std::mem::take(&mut members[m.right]);
            for &a in &left {
                for &b in &right {
                    values[a * n + b] = m.level;
                    values[b * n + a] = m.level;
                }
            }
            let mut joined = left;
            joined.extend(right);
            members[n + k] = joined;
        }
        DistanceMatrix::from_vec_unchecked(n, values)
    }

    /// The terminals below `node`, in ascending order.
    pub fn cluster_members(&self, node: usize) -> Result<Vec<usize>> {
        self.check_node(node)?;
        let mut out = Vec::with_capacity(self.size(node));
        let mut stack = vec![node];
        while let Some(v) = stack.pop() {
            match self.children(v) {
                Some((l, r)) => {
                    stack.push(r);
                    stack.push(l);
                }
                None => out.push(v),
            }
        }
        out.sort_unstable();
        Ok(out)
    }

    /// Terminals in left-to-right drawing order.
    pub fn leaf_order(&self) -> Vec<usize> {
        let mut out = Vec::with_capacity(self.n);
        let mut stack = vec![self.root()];
        while let Some(v) = stack.pop() {
            match self.children(v) {
                Some((l, r)) => {
                    stack.push(r);
                    stack.push(l);
                }
                None => out.push(v),
            }
        }
        out
    }

    /// The partition of the terminals formed by the first `k` merges.
    /// Blocks are sorted internally and by their smallest member.
    pub fn partition_after(&self, k: usize) -> Vec<Vec<usize>> {
        let k = k.min(self.merges.len());
        let mut tops: Vec<usize> = (0..self.n).collect();
        for (idx, m) in self.merges[..k].iter().enumerate() {
            tops.retain(|&t| t != m.left && t != m.right);
            tops.push(self.n + idx);
        }
        let mut blocks: Vec<Vec<usize>> = tops
            .into_iter()
            .map(|t| self.cluster_members(t).expect("valid node"))
            .collect();
        blocks.sort_unstable_by_key(|b| b[0]);
        blocks
    }

    /// Copy whose levels are the agglomeration ranks `1..n-1`.
    pub fn with_rank_levels(&self) -> Dendrogram {
        let mut out = self.clone();
        for (k, m) in out.merges.iter_mut().enumerate() {
            m.level = (k + 1) as f64;
        }
        out
    }

    pub fn labels(&self) -> Option<&[String]> {
        self.labels.as_deref()
    }

    pub fn with_labels(mut self, labels: Vec<String>) -> Result<Dendrogram> {
        if labels.len() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                found: labels.len(),
            });
        }
        self.labels = Some(labels);
        Ok(self)
    }

    /// Display name of a terminal: its label if one is set, else its index.
    pub fn terminal_name(&self, terminal: usize) -> String {
        match &self.labels {
            Some(l) => l[terminal].clone(),
            None => terminal.to_string(),
        }
    }

    /// Merge costs before any inversion repair, when the producer kept them.
    pub fn raw_levels(&self) -> Option<&[f64]> {
        self.raw_levels.as_deref()
    }

    pub(crate) fn set_raw_levels(&mut self, raw: Vec<f64>) {
        debug_assert_eq!(raw.len(), self.merges.len());
        self.raw_levels = Some(raw);
    }

    /// Replace the children of merges in place; used by permutations, which
    /// keep node ids, ranks and levels fixed.
    pub(crate) fn swap_children(&mut self, node: usize) {
        let k = node - self.n;
        let m = &mut self.merges[k];
        std::mem::swap(&mut m.left, &mut m.right);
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(&DendrogramFile::from(self))?)
    }

    pub fn from_json(text: &str) -> Result<Dendrogram> {
        let file: DendrogramFile = serde_json::from_str(text)?;
        Dendrogram::try_from(file)
    }

    /// Newick text with branch lengths equal to level differences.
    pub fn to_newick(&self) -> String {
        let mut out = String::new();
        self.write_newick(self.root(), &mut out);
        out.push(';');
        out
    }

    fn write_newick(&self, node: usize, out: &mut String) {
        match self.children(node) {
            Some((l, r)) => {
                out.push('(');
                self.write_newick(l, out);
                out.push(',');
                self.write_newick(r, out);
                out.push(')');
            }
            None => out.push_str(&newick_name(&self.terminal_name(node))),
        }
        if let Some(p) = self.parent(node) {
            let _ = write!(out, ":{}", self.level(p) - self.level(node));
        }
    }
}

fn newick_name(name: &str) -> String {
    if name
        .chars()
        .any(|c| matches!(c, '(' | ')' | ',' | ':' | ';' | '\'' | '[' | ']') || c.is_whitespace())
    {
        format!("'{}'", name.replace('\'', "''"))
    } else {
        name.to_string()
    }
}

/// On-disk form: `{"n_terminals": n, "merges": [[a, b, level], ...]}` plus
/// optional terminal labels and pre-repair levels.
#[derive(Debug, Serialize, Deserialize)]
pub struct DendrogramFile {
    pub n_terminals: usize,
    pub merges: Vec<(usize, usize, f64)>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub labels: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub raw_levels: Option<Vec<f64>>,
}

impl From<&Dendrogram> for DendrogramFile {
    fn from(d: &Dendrogram) -> DendrogramFile {
        DendrogramFile {
            n_terminals: d.n,
            merges: d.merges.iter().map(|m| (m.left, m.right, m.level)).collect(),
            labels: d.labels.clone(),
            raw_levels: d.raw_levels.clone(),
        }
    }
}

impl TryFrom<DendrogramFile> for Dendrogram {
    type Error = Error;

    fn try_from(f: DendrogramFile) -> Result<Dendrogram> {
        let merges = f
            .merges
            .into_iter()
            .map(|(a, b, level)| Merge::new(a, b, level))
            .collect();
        let mut d = Dendrogram::new(f.n_terminals, merges)?;
        if let Some(labels) = f.labels {
            d = d.with_labels(labels)?;
        }
        if let Some(raw) = f.raw_levels {
            if raw.len() != d.merges.len() {
                return Err(Error::DimensionMismatch {
                    expected: d.merges.len(),
                    found: raw.len(),
                });
            }
            d.raw_levels = Some(raw);
        }
        Ok(d)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::{all_triangles_isosceles, verify_ultrametric};
    use crate::test_util::{random_dendrogram, ranked8};
    use proptest::prelude::*;
    use std::collections::BTreeSet;

    #[test]
    fn three_point_tree_distances() {
        // x = 0, y = 1, z = 2; y and z join at 1.0, x joins them at 3.5
        let d = Dendrogram::new(3, vec![Merge::new(1, 2, 1.0), Merge::new(0, 3, 3.5)]).unwrap();
        assert_eq!(d.cophenetic_distance(0, 2).unwrap(), 3.5);
        assert_eq!(d.cophenetic_distance(0, 1).unwrap(), 3.5);
        assert_eq!(d.cophenetic_distance(1, 2).unwrap(), 1.0);
        assert_eq!(d.cophenetic_distance(2, 2).unwrap(), 0.0);
        assert!(d.cophenetic_distance(0, 3).is_err());
    }

    #[test]
    fn two_leaf_matrix() {
        let d = Dendrogram::new(2, vec![Merge::new(0, 1, 1.0)]).unwrap();
        assert_eq!(
            d.cophenetic_matrix().to_rows(),
            vec![vec![0.0, 1.0], vec![1.0, 0.0]]
        );
    }

    #[test]
    fn ranked8_ranked_distances() {
        let d = ranked8();
        let m = d.cophenetic_matrix();
        assert_eq!(m.get(0, 1), 1.0);
        assert_eq!(m.get(0, 2), 2.0);
        assert_eq!(m.get(0, 6), 7.0);
        assert_eq!(m.get(3, 5), 4.0);
        assert_eq!(m.get(6, 7), 6.0);
    }

    #[test]
    fn ranked8_members() {
        let d = ranked8();
        // q4 has rank 4
        let q4 = d.node_at_rank(4).unwrap();
        assert_eq!(d.cluster_members(q4).unwrap(), vec![3, 4, 5]);
        assert_eq!(d.cluster_members(d.root()).unwrap(), (0..8).collect::<Vec<_>>());
        assert_eq!(d.cluster_members(6).unwrap(), vec![6]);
        assert!(d.cluster_members(15).is_err());
    }

    #[test]
    fn ranked8_labels_follow_listing_order() {
        let d = ranked8();
        // x1 is left in q1, x3 is right in q2, x8 right in q6
        assert_eq!(d.branch_label(0), Some(1));
        assert_eq!(d.branch_label(1), Some(-1));
        assert_eq!(d.branch_label(2), Some(-1));
        assert_eq!(d.branch_label(7), Some(-1));
        assert_eq!(d.branch_label(d.root()), None);
    }

    #[test]
    fn rejects_malformed_merges() {
        assert!(Dendrogram::new(0, vec![]).is_err());
        assert!(Dendrogram::new(3, vec![Merge::new(0, 1, 1.0)]).is_err());
        assert!(Dendrogram::new(3, vec![Merge::new(0, 1, 1.0), Merge::new(1, 2, 2.0)]).is_err());
        assert!(Dendrogram::new(3, vec![Merge::new(0, 4, 1.0), Merge::new(1, 2, 2.0)]).is_err());
        assert!(Dendrogram::new(3, vec![Merge::new(0, 1, 2.0), Merge::new(3, 2, 1.0)]).is_err());
        assert!(Dendrogram::new(2, vec![Merge::new(0, 1, f64::NAN)]).is_err());
        assert!(Dendrogram::new(2, vec![Merge::new(0, 0, 1.0)]).is_err());
        assert!(Dendrogram::new(1, vec![]).is_ok());
    }

    #[test]
    fn from_cluster_list_rejects_non_nested() {
        assert!(Dendrogram::from_cluster_list(3, &[vec![0, 1], vec![1, 2]]).is_err());
        assert!(Dendrogram::from_cluster_list(3, &[vec![0, 1], vec![0, 1, 5]]).is_err());
    }

    #[test]
    fn json_and_newick() {
        let d = Dendrogram::new(3, vec![Merge::new(1, 2, 1.0), Merge::new(0, 3, 3.5)]).unwrap();
        let text = d.to_json().unwrap();
        let back = Dendrogram::from_json(&text).unwrap();
        assert_eq!(back, d);
        assert_eq!(d.to_newick(), "(0:3.5,(1:1,2:1):2.5);");
        let parsed: serde_json::Value = serde_json::from_str(&text).unwrap();
        assert_eq!(parsed["merges"][1], serde_json::json!([0, 3, 3.5]));
        let labelled = d.with_labels(vec!["x".into(), "y y".into(), "z".into()]).unwrap();
        assert_eq!(labelled.to_newick(), "(x:3.5,('y y':1,z:1):2.5);");
    }

    #[test]
    fn partition_after_merges() {
        let d = ranked8();
        assert_eq!(d.partition_after(0).len(), 8);
        assert_eq!(d.partition_after(7), vec![(0..8).collect::<Vec<_>>()]);
        assert_eq!(
            d.partition_after(4),
            vec![vec![0, 1, 2], vec![3, 4, 5], vec![6], vec![7]]
        );
    }

    /// Brute force: intersect ancestor sets and take the lowest one.
    fn lca_level_brute(d: &Dendrogram, i: usize, j: usize) -> f64 {
        if i == j {
            return 0.0;
        }
        let ai: BTreeSet<usize> = d.ancestors(i).into_iter().collect();
        let aj: BTreeSet<usize> = d.ancestors(j).into_iter().collect();
        let common = ai.intersection(&aj).copied();
        common
            .map(|v| (d.size(v), v))
            .min()
            .map(|(_, v)| d.level(v))
            .unwrap()
    }

    proptest! {
        #[test]
        fn cophenetic_agrees_with_brute_force(seed in any::<u64>(), n in 1usize..=12) {
            let d = random_dendrogram(seed, n);
            let m = d.cophenetic_matrix();
            for i in 0..n {
                for j in 0..n {
                    let c = d.cophenetic_distance(i, j).unwrap();
                    prop_assert_eq!(c, lca_level_brute(&d, i, j));
                    prop_assert_eq!(m.get(i, j), c);
                    prop_assert_eq!(c == 0.0, i == j);
                }
            }
        }

        #[test]
        fn cophenetic_is_ultrametric(seed in any::<u64>(), n in 2usize..=16) {
            let d = random_dendrogram(seed, n);
            let m = d.cophenetic_matrix();
            prop_assert!(verify_ultrametric(&m, 0.0).is_empty());
            prop_assert!(all_triangles_isosceles(&m, 0.0));
        }

        #[test]
        fn levels_rise_towards_root(seed in any::<u64>(), n in 2usize..=16) {
            let d = random_dendrogram(seed, n);
            for t in 0..n {
                let mut last = 0.0;
                for a in d.ancestors(t) {
                    prop_assert!(d.level(a) > last);
                    last = d.level(a);
                }
                prop_assert_eq!(d.ancestors(t).last().copied(), Some(d.root()));
            }
        }
    }
}
