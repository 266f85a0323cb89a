//! Agglomerative hierarchical clustering.
//!
//! Two drivers share the same Lance–Williams update:
//!
//! * [`naive_cluster`] repeatedly merges the globally closest pair. It is
//!   `O(n³)` but works for every criterion, including median.
//! * [`nn_chain_cluster`] follows nearest-neighbor chains until it reaches a
//!   pair of reciprocal nearest neighbors and merges them on the spot. This
//!   is `O(n²)` and exact for reducible criteria only.
//!
//! Both produce a [`Dendrogram`] with merges in increasing-level order, node
//! ids in merge order, and the older of the two merged clusters (smaller node
//! id, so terminals before internal nodes) as the left child.
//!
//! Ward and median work on squared Euclidean distances: the input matrix is
//! squared on the way in and merge costs are square-rooted on the way out.

use std::fmt;
use std::str::FromStr;

use crate::dendrogram::{Dendrogram, Merge};
use crate::error::{Error, Result};
use crate::matrix::DistanceMatrix;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum MergeCriterion {
    Single,
    Complete,
    Average,
    /// Minimum increase of within-cluster variance.
    Ward,
    Median,
}

/// Lance–Williams coefficients for `d(k, i∪j) = αi·d(k,i) + αj·d(k,j) + β·d(i,j) + γ·|d(k,i) − d(k,j)|`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Coefficients {
    pub alpha_i: f64,
    pub alpha_j: f64,
    pub beta: f64,
    pub gamma: f64,
}

/// Result of one update step. `clamped` is set when a negative value (median
/// on non-Euclidean input) was raised to zero.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Update {
    pub value: f64,
    pub clamped: bool,
}

impl MergeCriterion {
    pub const ALL: [MergeCriterion; 5] = [
        MergeCriterion::Single,
        MergeCriterion::Complete,
        MergeCriterion::Average,
        MergeCriterion::Ward,
        MergeCriterion::Median,
    ];

    pub fn name(self) -> &'static str {
        match self {
            MergeCriterion::Single => "single",
            MergeCriterion::Complete => "complete",
            MergeCriterion::Average => "average",
            MergeCriterion::Ward => "ward",
            MergeCriterion::Median => "median",
        }
    }

    /// Whether merging two clusters can never bring a third one closer than
    /// both of them were. This is what makes NN-chains valid.
    pub fn is_reducible(self) -> bool {
        !matches!(self, MergeCriterion::Median)
    }

    pub fn on_squares(self) -> bool {
        matches!(self, MergeCriterion::Ward | MergeCriterion::Median)
    }

    /// Coefficients for merging `i` (size `n_i`) with `j` (size `n_j`), seen
    /// from `k` (size `n_k`).
    pub fn coefficients(self, n_i: usize, n_j: usize, n_k: usize) -> Coefficients {
        let (ni, nj, nk) = (n_i as f64, n_j as f64, n_k as f64);
        match self {
            MergeCriterion::Single => Coefficients {
                alpha_i: 0.5,
                alpha_j: 0.5,
                beta: 0.0,
                gamma: -0.5,
            },
            MergeCriterion::Complete => Coefficients {
                alpha_i: 0.5,
                alpha_j: 0.5,
                beta: 0.0,
                gamma: 0.5,
            },
            MergeCriterion::Average => Coefficients {
                alpha_i: ni / (ni + nj),
                alpha_j: nj / (ni + nj),
                beta: 0.0,
                gamma: 0.0,
            },
            MergeCriterion::Ward => {
                let total = ni + nj + nk;
                Coefficients {
                    alpha_i: (ni + nk) / total,
                    alpha_j: (nj + nk) / total,
                    beta: -nk / total,
                    gamma: 0.0,
                }
            }
            MergeCriterion::Median => Coefficients {
                alpha_i: 0.5,
                alpha_j: 0.5,
                beta: -0.25,
                gamma: 0.0,
            },
        }
    }
}

impl fmt::Display for MergeCriterion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for MergeCriterion {
    type Err = Error;

    fn from_str(s: &str) -> Result<MergeCriterion> {
        MergeCriterion::ALL
            .iter()
            .copied()
            .find(|c| c.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::UnknownCriterion(s.to_string()))
    }
}

/// Dissimilarity between `k` and the union of `i` and `j`.
///
/// `sizes` is `(n_i, n_j, n_k)`. Single and complete are evaluated as exact
/// `min`/`max`, which the general formula reproduces only up to rounding.
pub fn lance_williams_update(
    d_ki: f64,
    d_kj: f64,
    d_ij: f64,
    sizes: (usize, usize, usize),
    crit: MergeCriterion,
) -> Update {
    let value = match crit {
        MergeCriterion::Single => d_ki.min(d_kj),
        MergeCriterion::Complete => d_ki.max(d_kj),
        MergeCriterion::Average => {
            let (ni, nj) = (sizes.0 as f64, sizes.1 as f64);
            (ni * d_ki + nj * d_kj) / (ni + nj)
        }
        MergeCriterion::Ward => {
            let (ni, nj, nk) = (sizes.0 as f64, sizes.1 as f64, sizes.2 as f64);
            ((ni + nk) * d_ki + (nj + nk) * d_kj - nk * d_ij) / (ni + nj + nk)
        }
        MergeCriterion::Median => 0.5 * d_ki + 0.5 * d_kj - 0.25 * d_ij,
    };
    if value < 0.0 {
        Update {
            value: 0.0,
            clamped: true,
        }
    } else {
        Update {
            value,
            clamped: false,
        }
    }
}

/// Mutable working copy of the dissimilarities between active clusters.
/// Cluster `s` lives in slot `s`, which always contains terminal `s`.
struct Workspace {
    n: usize,
    dist: Vec<f64>,
    active: Vec<bool>,
    size: Vec<usize>,
    clamped: usize,
}

impl Workspace {
    fn new(m: &DistanceMatrix, crit: MergeCriterion) -> Workspace {
        let mut dist = m.as_slice().to_vec();
        if crit.on_squares() {
            dist.iter_mut().for_each(|d| *d *= *d);
        }
        Workspace {
            n: m.len(),
            dist,
            active: vec![true; m.len()],
            size: vec![1; m.len()],
            clamped: 0,
        }
    }

    #[inline]
    fn d(&self, a: usize, b: usize) -> f64 {
        self.dist[a * self.n + b]
    }

    #[inline]
    fn set(&mut self, a: usize, b: usize, v: f64) {
        self.dist[a * self.n + b] = v;
        self.dist[b * self.n + a] = v;
    }

    /// Merges slot `gone` into slot `keep` and updates distances to `keep`.
    fn merge(&mut self, keep: usize, gone: usize, crit: MergeCriterion) {
        let d_ij = self.d(keep, gone);
        let (n_i, n_j) = (self.size[keep], self.size[gone]);
        let n = self.n;
        for k in 0..n {
            if !self.active[k] || k == keep || k == gone {
                continue;
            }
            // rows of keep and gone are contiguous; the matrix is symmetric
            let up = lance_williams_update(
                self.dist[keep * n + k],
                self.dist[gone * n + k],
                d_ij,
                (n_i, n_j, self.size[k]),
                crit,
            );
            self.clamped += usize::from(up.clamped);
            self.set(k, keep, up.value);
        }
        self.active[gone] = false;
        self.size[keep] = n_i + n_j;
    }
}

fn check_input(m: &DistanceMatrix) -> Result<()> {
    if m.len() < 2 {
        return Err(Error::TooFewObservations(m.len()));
    }
    Ok(())
}

fn report_clamps(ws: &Workspace, crit: MergeCriterion) {
    if ws.clamped > 0 {
        log::warn!(
            "{crit} update produced {} negative dissimilarities, clamped to zero; \
             input is probably not Euclidean",
            ws.clamped
        );
    }
}

/// Cost, tie-break key and the two slots of a candidate merge.
type Candidate = (f64, (usize, usize), (usize, usize));

/// Merges the globally closest pair at every step.
///
/// Ties are broken by the lexicographically smallest `(min id, max id)` of
/// the two clusters' node ids. Levels that would fall below a child's level
/// (median inversions) are raised to the children's maximum, and the raw
/// merge costs are kept on the dendrogram.
pub fn naive_cluster(m: &DistanceMatrix, crit: MergeCriterion) -> Result<Dendrogram> {
    check_input(m)?;
    let n = m.len();
    let mut ws = Workspace::new(m, crit);
    // node id of the cluster held in each slot
    let mut node = (0..n).collect::<Vec<_>>();
    let mut merges = Vec::with_capacity(n - 1);
    let mut raw = Vec::with_capacity(n - 1);
    let mut levels = vec![0.0; 2 * n - 1];

    for step in 0..n - 1 {
        let mut best: Option<Candidate> = None;
        for a in 0..n {
            if !ws.active[a] {
                continue;
            }
            for b in (a + 1)..n {
                if !ws.active[b] {
                    continue;
                }
                let d = ws.d(a, b);
                let key = (node[a].min(node[b]), node[a].max(node[b]));
                let better = match best {
                    None => true,
                    Some((bd, bkey, _)) => d < bd || (d == bd && key < bkey),
                };
                if better {
                    best = Some((d, key, (a, b)));
                }
            }
        }
        let (cost, (left, right), (a, b)) = best.expect("at least two active clusters");
        let id = n + step;
        let cost = if crit.on_squares() { cost.sqrt() } else { cost };
        let level = cost.max(levels[left]).max(levels[right]);
        levels[id] = level;
        merges.push(Merge::new(left, right, level));
        raw.push(cost);
        ws.merge(a, b, crit);
        node[a] = id;
    }
    report_clamps(&ws, crit);

    let inverted = raw.iter().zip(&merges).any(|(r, m)| *r != m.level);
    let mut d = Dendrogram::new(n, merges)?;
    if inverted {
        d.set_raw_levels(raw);
    }
    Ok(d)
}

/// Nearest-neighbor chain clustering for reducible criteria.
///
/// The chain grows from an arbitrary active cluster to its nearest neighbor
/// until the last two elements are reciprocal nearest neighbors, which are
/// merged immediately. On ties the previous chain element is preferred, which
/// rules out cycles. Merges found out of order are sorted by level afterwards
/// and relabelled so node ids follow merge order.
pub fn nn_chain_cluster(m: &DistanceMatrix, crit: MergeCriterion) -> Result<Dendrogram> {
    if !crit.is_reducible() {
        return Err(Error::NotReducible(crit.name()));
    }
    check_input(m)?;
    let n = m.len();
    let mut ws = Workspace::new(m, crit);
    let mut chain: Vec<usize> = Vec::with_capacity(n);
    // (slot a, slot b, cost); each slot names a terminal inside its cluster
    let mut found: Vec<(usize, usize, f64)> = Vec::with_capacity(n - 1);
    let mut next_start = 0;

    while found.len() < n - 1 {
        if chain.is_empty() {
            while !ws.active[next_start] {
                next_start += 1;
            }
            chain.push(next_start);
        }
        let (a, b, cost) = loop {
            let a = *chain.last().expect("chain is nonempty");
            let prev = chain.len().checked_sub(2).map(|i| chain[i]);
            let (mut nearest, mut best) = match prev {
                Some(p) => (p, ws.d(a, p)),
                None => (usize::MAX, f64::INFINITY),
            };
            for x in 0..n {
                if x == a || !ws.active[x] {
                    continue;
                }
                let d = ws.d(a, x);
                if d < best {
                    best = d;
                    nearest = x;
                }
            }
            if Some(nearest) == prev {
                chain.pop();
                chain.pop();
                break (a, nearest, best);
            }
            chain.push(nearest);
        };
        let (keep, gone) = (a.min(b), a.max(b));
        ws.merge(keep, gone, crit);
        found.push((keep, gone, cost));
    }
    report_clamps(&ws, crit);

    // stable sort keeps discovery order among equal levels
    found.sort_by(|x, y| x.2.total_cmp(&y.2));
    let mut uf = UnionFind::new(n);
    let mut merges = Vec::with_capacity(n - 1);
    for (k, &(a, b, cost)) in found.iter().enumerate() {
        let (ra, rb) = (uf.find(a), uf.find(b));
        let (ia, ib) = (uf.node[ra], uf.node[rb]);
        let level = if crit.on_squares() { cost.sqrt() } else { cost };
        merges.push(Merge::new(ia.min(ib), ia.max(ib), level));
        uf.union(ra, rb, n + k);
    }
    Dendrogram::new(n, merges)
}

struct UnionFind {
    parent: Vec<usize>,
    node: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> UnionFind {
        UnionFind {
            parent: (0..n).collect(),
            node: (0..n).collect(),
        }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    fn union(&mut self, ra: usize, rb: usize, id: usize) {
        self.parent[rb] = ra;
        self.node[ra] = id;
    }
}
