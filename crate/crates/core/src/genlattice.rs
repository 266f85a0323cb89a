//! Set-valued (generalized ultrametric) distances and the join semilattice of
//! the distance sets that actually occur.
//!
//! A distance here is a subset of the attribute index set. The lattice holds
//! every observed distance set plus all unions of them, ordered by inclusion
//! and levelled by cardinality.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use serde::Serialize;

use crate::error::{Error, Result};

/// A subset of the attribute indices.
pub type AttrSet = BTreeSet<usize>;

/// Order used everywhere for rendering: by cardinality, then lexicographically.
pub fn attrset_order(a: &AttrSet, b: &AttrSet) -> Ordering {
    a.len().cmp(&b.len()).then_with(|| a.iter().cmp(b.iter()))
}

#[derive(Clone, Debug, PartialEq)]
pub struct SetValuedDistanceTable {
    objects: Vec<String>,
    attributes: Vec<String>,
    pairs: BTreeMap<(usize, usize), AttrSet>,
}

impl SetValuedDistanceTable {
    /// Every unordered pair of distinct objects must appear exactly once.
    pub fn from_pairs(
        objects: Vec<String>,
        attributes: Vec<String>,
        pairs: Vec<((usize, usize), AttrSet)>,
    ) -> Result<SetValuedDistanceTable> {
        let n = objects.len();
        let m = attributes.len();
        let mut map = BTreeMap::new();
        for ((i, j), set) in pairs {
            let key = (i.min(j), i.max(j));
            if i == j || key.1 >= n {
                return Err(Error::InvalidTable(format!("bad pair ({i}, {j})")));
            }
            if let Some(&bad) = set.iter().find(|&&a| a >= m) {
                return Err(Error::IndexOutOfRange { index: bad, len: m });
            }
            if map.insert(key, set).is_some() {
                return Err(Error::InvalidTable(format!("pair ({i}, {j}) given twice")));
            }
        }
        let expected = n * n.saturating_sub(1) / 2;
        if map.len() != expected {
            return Err(Error::DimensionMismatch {
                expected,
                found: map.len(),
            });
        }
        Ok(SetValuedDistanceTable {
            objects,
            attributes,
            pairs: map,
        })
    }

    pub fn n_objects(&self) -> usize {
        self.objects.len()
    }

    pub fn n_attributes(&self) -> usize {
        self.attributes.len()
    }

    pub fn n_pairs(&self) -> usize {
        self.pairs.len()
    }

    pub fn objects(&self) -> &[String] {
        &self.objects
    }

    pub fn attributes(&self) -> &[String] {
        &self.attributes
    }

    /// Distance between two distinct objects, in either order.
    pub fn get(&self, i: usize, j: usize) -> Option<&AttrSet> {
        self.pairs.get(&(i.min(j), i.max(j)))
    }

    /// Pairs `(i, j)` with `i < j`, in lexicographic order.
    pub fn pairs(&self) -> impl Iterator<Item = (&(usize, usize), &AttrSet)> {
        self.pairs.iter()
    }

    /// Triples `(i, j, k)` (with `i < k`) where `d(i,k)` is not contained in
    /// `d(i,j) ∪ d(j,k)`.
    pub fn verify_generalized_ultrametric(&self) -> Vec<(usize, usize, usize)> {
        let n = self.n_objects();
        let mut out = Vec::new();
        for i in 0..n {
            for j in 0..n {
                if j == i {
                    continue;
                }
                for k in (i + 1)..n {
                    if k == j {
                        continue;
                    }
                    let (dij, djk, dik) = (
                        &self.pairs[&(i.min(j), i.max(j))],
                        &self.pairs[&(j.min(k), j.max(k))],
                        &self.pairs[&(i, k)],
                    );
                    if dik.iter().any(|a| !dij.contains(a) && !djk.contains(a)) {
                        out.push((i, j, k));
                    }
                }
            }
        }
        out
    }

    /// Attribute names of a set joined with commas, e.g. `v1,v2`.
    pub fn set_name(&self, set: &AttrSet) -> String {
        if set.is_empty() {
            return "{}".to_string();
        }
        set.iter()
            .map(|&a| self.attributes[a].as_str())
            .collect::<Vec<_>>()
            .join(",")
    }

    fn pair_name(&self, (i, j): (usize, usize)) -> String {
        format!("d({},{})", self.objects[i], self.objects[j])
    }
}

/// Union-closed family of attribute sets, with its Hasse diagram.
#[derive(Clone, Debug, PartialEq)]
pub struct Semilattice {
    vertices: Vec<AttrSet>,
    /// Cover relations `(lower, upper)` as indices into `vertices`.
    edges: Vec<(usize, usize)>,
}

/// Union closure of the observed (off-diagonal) distance sets.
pub fn build_lattice(t: &SetValuedDistanceTable) -> Semilattice {
    let mut found: BTreeSet<Vec<usize>> = t.pairs.values().map(|s| s.iter().copied().collect()).collect();
    loop {
        let current: Vec<AttrSet> = found.iter().map(|v| v.iter().copied().collect()).collect();
        let mut grew = false;
        for (x, a) in current.iter().enumerate() {
            for b in &current[x + 1..] {
                let u: Vec<usize> = a.union(b).copied().collect();
                grew |= found.insert(u);
            }
        }
        if !grew {
            break;
        }
    }
    let mut vertices: Vec<AttrSet> = found.into_iter().map(|v| v.into_iter().collect()).collect();
    vertices.sort_by(attrset_order);

    let mut edges = Vec::new();
    for (lo, a) in vertices.iter().enumerate() {
        for (hi, b) in vertices.iter().enumerate() {
            if a.len() >= b.len() || !a.is_subset(b) {
                continue;
            }
            let covered = vertices
                .iter()
                .any(|c| c.len() > a.len() && c.len() < b.len() && a.is_subset(c) && c.is_subset(b));
            if !covered {
                edges.push((lo, hi));
            }
        }
    }
    Semilattice { vertices, edges }
}

impl Semilattice {
    /// Vertices ordered by level, then lexicographically.
    pub fn vertices(&self) -> &[AttrSet] {
        &self.vertices
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn index_of(&self, set: &AttrSet) -> Option<usize> {
        self.vertices.binary_search_by(|v| attrset_order(v, set)).ok()
    }

    pub fn contains(&self, set: &AttrSet) -> bool {
        self.index_of(set).is_some()
    }

    /// Level of a vertex is its cardinality.
    pub fn level(set: &AttrSet) -> usize {
        set.len()
    }

    /// Largest level present, 0 for an empty lattice.
    pub fn height(&self) -> usize {
        self.vertices.last().map_or(0, BTreeSet::len)
    }

    /// Pairs whose distance is exactly `node`.
    pub fn pairs_for_node(&self, t: &SetValuedDistanceTable, node: &AttrSet) -> Result<Vec<(usize, usize)>> {
        if !self.contains(node) {
            return Err(Error::UnknownNode(format!("{{{}}}", t.set_name(node))));
        }
        Ok(t.pairs
            .iter()
            .filter(|(_, d)| *d == node)
            .map(|(&p, _)| p)
            .collect())
    }

    /// Vertices of level `<= k` not strictly contained in another such vertex.
    pub fn maximal_at_or_below(&self, k: usize) -> Vec<&AttrSet> {
        let low: Vec<&AttrSet> = self.vertices.iter().filter(|v| v.len() <= k).collect();
        low.iter()
            .filter(|v| !low.iter().any(|w| w.len() > v.len() && v.is_subset(w)))
            .copied()
            .collect()
    }

    /// Object clusters at level `k`.
    ///
    /// For each maximal vertex of level `<= k`, the maximal groups of objects
    /// whose pairwise distances are all contained in that vertex. Groups that
    /// are contained in another group are dropped; objects in no group appear
    /// as singletons. Each cluster is sorted, and clusters are sorted.
    pub fn clusters_at_level(&self, t: &SetValuedDistanceTable, k: usize) -> Vec<Vec<usize>> {
        let n = t.n_objects();
        let mut found: BTreeSet<Vec<usize>> = BTreeSet::new();
        for node in self.maximal_at_or_below(k) {
            let adj: Vec<Vec<bool>> = (0..n)
                .map(|i| {
                    (0..n)
                        .map(|j| i != j && t.get(i, j).is_some_and(|d| d.is_subset(node)))
                        .collect()
                })
                .collect();
            let mut cliques = Vec::new();
            bron_kerbosch(&adj, Vec::new(), (0..n).collect(), Vec::new(), &mut cliques);
            found.extend(cliques);
        }
        for i in 0..n {
            if !found.iter().any(|c| c.contains(&i)) {
                found.insert(vec![i]);
            }
        }
        let all: Vec<Vec<usize>> = found.into_iter().collect();
        all.iter()
            .filter(|c| {
                !all.iter()
                    .any(|d| d.len() > c.len() && c.iter().all(|x| d.contains(x)))
            })
            .cloned()
            .collect()
    }

    pub fn report(&self, t: &SetValuedDistanceTable, levels: &[usize]) -> LatticeReport {
        let vertices = self
            .vertices
            .iter()
            .map(|v| VertexEntry {
                set: v.iter().map(|&a| t.attributes[a].clone()).collect(),
                level: v.len(),
            })
            .collect();
        let edges = self
            .edges
            .iter()
            .map(|&(lo, hi)| [t.set_name(&self.vertices[lo]), t.set_name(&self.vertices[hi])])
            .collect();
        let pairs = self
            .vertices
            .iter()
            .map(|v| {
                let ps = self
                    .pairs_for_node(t, v)
                    .expect("vertex of this lattice")
                    .into_iter()
                    .map(|(i, j)| [t.objects[i].clone(), t.objects[j].clone()])
                    .collect();
                (t.set_name(v), ps)
            })
            .collect();
        let clusters = levels
            .iter()
            .map(|&k| {
                let cs = self
                    .clusters_at_level(t, k)
                    .into_iter()
                    .map(|c| c.into_iter().map(|i| t.objects[i].clone()).collect())
                    .collect();
                (k.to_string(), cs)
            })
            .collect();
        LatticeReport {
            vertices,
            edges,
            pairs,
            clusters,
        }
    }

    /// Plain-text rendering: vertices by level (top first), the pairs behind
    /// each vertex, then clusters for each requested level.
    pub fn render_text(&self, t: &SetValuedDistanceTable, levels: &[usize]) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "{:<40}Level", "Lattice vertices found");
        let mut by_level: BTreeMap<usize, Vec<String>> = BTreeMap::new();
        for v in &self.vertices {
            by_level.entry(v.len()).or_default().push(t.set_name(v));
        }
        for (level, names) in by_level.iter().rev() {
            let _ = writeln!(out, "{:<40}{}", names.join("   "), level);
        }
        out.push('\n');
        for v in self.vertices.iter().rev() {
            let pairs = self.pairs_for_node(t, v).expect("vertex of this lattice");
            let listed = if pairs.is_empty() {
                "(no pair; union only)".to_string()
            } else {
                pairs
                    .iter()
                    .map(|&p| t.pair_name(p))
                    .collect::<Vec<_>>()
                    .join(", ")
            };
            let _ = writeln!(out, "{} corresponds to: {}", t.set_name(v), listed);
        }
        for &k in levels {
            let _ = writeln!(out, "\nClusters at level <= {k}:");
            for c in self.clusters_at_level(t, k) {
                let names: Vec<&str> = c.iter().map(|&i| t.objects[i].as_str()).collect();
                let _ = writeln!(out, "  {}", names.join(", "));
            }
        }
        out
    }
}

/// JSON form of a lattice and its interpretation.
#[derive(Debug, Serialize)]
pub struct LatticeReport {
    pub vertices: Vec<VertexEntry>,
    pub edges: Vec<[String; 2]>,
    pub pairs: BTreeMap<String, Vec<[String; 2]>>,
    pub clusters: BTreeMap<String, Vec<Vec<String>>>,
}

#[derive(Debug, Serialize)]
pub struct VertexEntry {
    pub set: Vec<String>,
    pub level: usize,
}

/// Maximal cliques with pivoting. Every vertex ends up in at least one
/// clique (isolated vertices form singletons).
fn bron_kerbosch(adj: &[Vec<bool>], r: Vec<usize>, p: Vec<usize>, x: Vec<usize>, out: &mut Vec<Vec<usize>>) {
    if p.is_empty() && x.is_empty() {
        let mut c = r;
        c.sort_unstable();
        out.push(c);
        return;
    }
    let pivot = p
        .iter()
        .chain(&x)
        .copied()
        .max_by_key(|&u| p.iter().filter(|&&v| adj[u][v]).count())
        .expect("p or x is nonempty");
    let candidates: Vec<usize> = p.iter().copied().filter(|&v| !adj[pivot][v]).collect();
    let (mut p, mut x) = (p, x);
    for v in candidates {
        let mut r2 = r.clone();
        r2.push(v);
        let p2 = p.iter().copied().filter(|&u| adj[v][u]).collect();
        let x2 = x.iter().copied().filter(|&u| adj[v][u]).collect();
        bron_kerbosch(adj, r2, p2, x2, out);
        p.retain(|&u| u != v);
        x.push(v);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::BooleanTable;
    use crate::datasets;
    use crate::dissim::setvalued_table;
    use proptest::prelude::*;

    fn set(xs: &[usize]) -> AttrSet {
        xs.iter().copied().collect()
    }

    fn presence() -> SetValuedDistanceTable {
        setvalued_table(&datasets::presence5())
    }

    #[test]
    fn presence_lattice_vertices() {
        let l = build_lattice(&presence());
        assert_eq!(
            l.vertices(),
            &[set(&[1]), set(&[0, 1]), set(&[1, 2]), set(&[0, 1, 2])]
        );
        assert_eq!(l.edges(), &[(0, 1), (0, 2), (1, 3), (2, 3)]);
        assert_eq!(l.height(), 3);
    }

    #[test]
    fn presence_node_pairs() {
        let t = presence();
        let l = build_lattice(&t);
        // a b c e f -> 0 1 2 3 4
        assert_eq!(
            l.pairs_for_node(&t, &set(&[0, 1])).unwrap(),
            vec![(0, 1), (0, 4), (1, 2), (1, 4), (2, 4)]
        );
        assert_eq!(l.pairs_for_node(&t, &set(&[1])).unwrap(), vec![(0, 2)]);
        assert_eq!(l.pairs_for_node(&t, &set(&[1, 2])).unwrap(), vec![(0, 3), (2, 3)]);
        assert_eq!(
            l.pairs_for_node(&t, &set(&[0, 1, 2])).unwrap(),
            vec![(1, 3), (3, 4)]
        );
        assert!(matches!(
            l.pairs_for_node(&t, &set(&[0, 2])),
            Err(Error::UnknownNode(_))
        ));
    }

    #[test]
    fn presence_clusters() {
        let t = presence();
        let l = build_lattice(&t);
        assert_eq!(l.clusters_at_level(&t, 3), vec![vec![0, 1, 2, 3, 4]]);
        assert_eq!(l.clusters_at_level(&t, 2), vec![vec![0, 1, 2, 4], vec![0, 2, 3]]);
        assert_eq!(
            l.clusters_at_level(&t, 1),
            vec![vec![0, 2], vec![1], vec![3], vec![4]]
        );
        assert_eq!(
            l.clusters_at_level(&t, 0),
            (0..5).map(|i| vec![i]).collect::<Vec<_>>()
        );
    }

    #[test]
    fn empty_distance_lattice() {
        let t = setvalued_table(&BooleanTable::from_rows(&[vec![true, true], vec![true, true]]).unwrap());
        let l = build_lattice(&t);
        assert_eq!(l.vertices(), &[AttrSet::new()]);
        assert_eq!(l.clusters_at_level(&t, 0), vec![vec![0, 1]]);
    }

    #[test]
    fn closure_adds_union() {
        let t = SetValuedDistanceTable::from_pairs(
            vec!["p".into(), "q".into(), "r".into()],
            vec!["a".into(), "b".into()],
            vec![((0, 1), set(&[0])), ((0, 2), set(&[1])), ((1, 2), set(&[1]))],
        )
        .unwrap();
        let l = build_lattice(&t);
        assert_eq!(l.vertices(), &[set(&[0]), set(&[1]), set(&[0, 1])]);
        assert!(l.pairs_for_node(&t, &set(&[0, 1])).unwrap().is_empty());
    }

    #[test]
    fn from_pairs_validation() {
        let names = |k: usize| (0..k).map(|i| i.to_string()).collect::<Vec<_>>();
        assert!(SetValuedDistanceTable::from_pairs(names(3), names(1), vec![((0, 1), set(&[0]))]).is_err());
        assert!(SetValuedDistanceTable::from_pairs(names(2), names(1), vec![((0, 1), set(&[3]))]).is_err());
        assert!(SetValuedDistanceTable::from_pairs(names(2), names(1), vec![((1, 1), set(&[0]))]).is_err());
    }

    #[test]
    fn text_and_json_render() {
        let t = presence();
        let l = build_lattice(&t);
        let text = l.render_text(&t, &[2, 3]);
        assert!(text.contains("v1,v2 corresponds to: d(a,b), d(a,f), d(b,c), d(b,f), d(c,f)"));
        assert!(text.contains("  a, b, c, e, f"));
        let report = serde_json::to_value(l.report(&t, &[2])).unwrap();
        assert_eq!(report["vertices"][0]["level"], 1);
        assert_eq!(report["pairs"]["v2"], serde_json::json!([["a", "c"]]));
        assert_eq!(
            report["clusters"]["2"][0],
            serde_json::json!(["a", "b", "c", "f"])
        );
    }

    fn random_table() -> impl Strategy<Value = BooleanTable> {
        (2usize..8, 1usize..5).prop_flat_map(|(n, m)| {
            prop::collection::vec(any::<bool>(), n * m).prop_map(move |v| BooleanTable::new(n, m, v).unwrap())
        })
    }

    proptest! {
        #[test]
        fn lattice_invariants(data in random_table()) {
            let t = setvalued_table(&data);
            let l = build_lattice(&t);
            for (_, d) in t.pairs() {
                prop_assert!(l.contains(d));
            }
            for a in l.vertices() {
                for b in l.vertices() {
                    prop_assert!(l.contains(&a.union(b).copied().collect()));
                }
            }
            let mut counted = 0;
            for v in l.vertices() {
                counted += l.pairs_for_node(&t, v).unwrap().len();
            }
            prop_assert_eq!(counted, t.n_pairs());
            prop_assert!(t.verify_generalized_ultrametric().is_empty());

            let all: Vec<usize> = (0..t.n_objects()).collect();
            prop_assert_eq!(l.clusters_at_level(&t, t.n_attributes()), vec![all]);
            for k in 0..t.n_attributes() {
                let upper = l.clusters_at_level(&t, k + 1);
                for c in l.clusters_at_level(&t, k) {
                    prop_assert!(upper.iter().any(|u| c.iter().all(|x| u.contains(x))));
                }
            }
        }
    }
}
