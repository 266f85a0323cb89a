//! p-adic codes of dendrogram terminals.
//!
//! Walking from a terminal to the root, the node of rank `j` contributes the
//! branch label (`+1` left, `-1` right) of the edge the walk takes out of it,
//! as the coefficient of `p^j`. Ranks the walk skips contribute `0`.
//!
//! Dividing a code by `p` ([`dilate`]) shifts every rank down by one and drops
//! rank 1, which on the tree amounts to collapsing the lowest merge:
//! [`dilate_hierarchy`] builds that coarser tree.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use serde::Serialize;

use crate::dendrogram::{Dendrogram, Merge};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PadicCode {
    p: u64,
    coeffs: BTreeMap<usize, i8>,
}

impl PadicCode {
    /// A code from explicit `(rank, coefficient)` terms. Zero coefficients are
    /// dropped; other values outside `{-1, +1}` are rejected.
    pub fn new(p: u64, terms: impl IntoIterator<Item = (usize, i8)>) -> Result<PadicCode> {
        check_prime(p)?;
        let mut coeffs = BTreeMap::new();
        for (level, c) in terms {
            match c {
                0 => {}
                1 | -1 => {
                    coeffs.insert(level, c);
                }
                _ => {
                    return Err(Error::InvalidDendrogram(format!(
                        "coefficient {c} at level {level} is not in {{-1, 0, 1}}"
                    )))
                }
            }
        }
        Ok(PadicCode { p, coeffs })
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    /// Nonzero `(level, coefficient)` terms in increasing level order.
    pub fn terms(&self) -> impl Iterator<Item = (usize, i8)> + '_ {
        self.coeffs.iter().map(|(&l, &c)| (l, c))
    }

    pub fn coefficient(&self, level: usize) -> i8 {
        self.coeffs.get(&level).copied().unwrap_or(0)
    }

    pub fn levels(&self) -> Vec<usize> {
        self.coeffs.keys().copied().collect()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// `Σ coeff_j · p^j`, computed exactly.
    pub fn decimal_value(&self) -> BigInt {
        let p = BigInt::from(self.p);
        self.coeffs
            .iter()
            .map(|(&level, &c)| BigInt::from(c) * p.pow(level as u32))
            .sum()
    }

    /// Lossy floating-point version of [`PadicCode::decimal_value`].
    pub fn decimal_value_f64(&self) -> f64 {
        let p = self.p as f64;
        self.coeffs
            .iter()
            .map(|(&level, &c)| f64::from(c) * p.powi(level as i32))
            .sum()
    }

    /// Human readable form, e.g. `+1·p^1 -1·p^3`.
    pub fn to_expression(&self) -> String {
        if self.coeffs.is_empty() {
            return "0".to_string();
        }
        self.coeffs
            .iter()
            .map(|(l, &c)| format!("{}1·p^{l}", if c > 0 { '+' } else { '-' }))
            .collect::<Vec<_>>()
            .join(" ")
    }
}

pub fn is_prime(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= p {
        if p.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

fn check_prime(p: u64) -> Result<()> {
    if is_prime(p) {
        Ok(())
    } else {
        Err(Error::NotPrime(p))
    }
}

/// Code of one terminal. Uses merge ranks, not the real-valued levels.
pub fn encode(dend: &Dendrogram, p: u64, terminal: usize) -> Result<PadicCode> {
    check_prime(p)?;
    dend.check_terminal(terminal)?;
    let mut coeffs = BTreeMap::new();
    let mut cur = terminal;
    while let Some(parent) = dend.parent(cur) {
        let label = dend.branch_label(cur).expect("non-root node has a label");
        let rank = dend.rank(parent).expect("parent is internal");
        coeffs.insert(rank, label);
        cur = parent;
    }
    Ok(PadicCode { p, coeffs })
}

pub fn encode_all(dend: &Dendrogram, p: u64) -> Result<Vec<PadicCode>> {
    (0..dend.n_terminals()).map(|t| encode(dend, p, t)).collect()
}

/// True iff no two terminals share a decimal value.
pub fn check_uniqueness(dend: &Dendrogram, p: u64) -> Result<bool> {
    let mut values: Vec<BigInt> = encode_all(dend, p)?
        .iter()
        .map(PadicCode::decimal_value)
        .collect();
    values.sort();
    Ok(values.windows(2).all(|w| w[0] != w[1]))
}

/// Multiplication by `1/p`: level `j` moves to `j - 1`; the level-1 term,
/// which would land on `p^0`, is dropped.
pub fn dilate(code: &PadicCode) -> PadicCode {
    PadicCode {
        p: code.p,
        coeffs: code
            .coeffs
            .iter()
            .filter(|(&l, _)| l > 1)
            .map(|(&l, &c)| (l - 1, c))
            .collect(),
    }
}

/// The tree obtained by collapsing the rank-1 merge into a single terminal.
///
/// Returns the coarser dendrogram (on `n - 1` terminals, ranks shifted down
/// by one, labels preserved) and the terminal each original terminal maps
/// to. The two terminals of the lowest merge map to the same new terminal;
/// every other cluster is unchanged.
pub fn dilate_hierarchy(dend: &Dendrogram) -> Result<(Dendrogram, Vec<usize>)> {
    let n = dend.n_terminals();
    if n < 2 {
        return Err(Error::InvalidDendrogram(
            "a single terminal has no level to lose".into(),
        ));
    }
    let first = dend.merges()[0];
    let (low, high) = (first.left.min(first.right), first.left.max(first.right));
    // old node id -> new node id
    let mut remap = vec![usize::MAX; dend.n_nodes()];
    let mut next = 0;
    for (t, slot) in remap.iter_mut().enumerate().take(n) {
        if t != high {
            *slot = next;
            next += 1;
        }
    }
    remap[high] = remap[low];
    let new_n = n - 1;
    remap[n] = remap[low];
    for k in 1..dend.merges().len() {
        remap[n + k] = new_n + k - 1;
    }
    let merges = dend.merges()[1..]
        .iter()
        .map(|m| Merge::new(remap[m.left], remap[m.right], m.level))
        .collect();
    let mut coarse = Dendrogram::new(new_n, merges)?;
    if let Some(labels) = dend.labels() {
        let mut new_labels = vec![String::new(); new_n];
        for t in 0..n {
            if t == high {
                continue;
            }
            new_labels[remap[t]] = if t == low {
                format!("{}+{}", labels[low], labels[high])
            } else {
                labels[t].clone()
            };
        }
        coarse = coarse.with_labels(new_labels)?;
    }
    Ok((coarse, (0..n).map(|t| remap[t]).collect()))
}

/// Clusters from `{terminal}` up to the full set, each as sorted members.
pub fn cluster_chain(dend: &Dendrogram, terminal: usize) -> Result<Vec<Vec<usize>>> {
    dend.check_terminal(terminal)?;
    let mut chain = vec![vec![terminal]];
    for a in dend.ancestors(terminal) {
        chain.push(dend.cluster_members(a)?);
    }
    Ok(chain)
}

/// Enumerates every maximal descending chain of clusters (root to terminal)
/// and checks that its intersection is nonempty.
pub fn check_spherical_completeness(dend: &Dendrogram) -> bool {
    let mut stack = vec![(dend.root(), dend.cluster_members(dend.root()).expect("root"))];
    while let Some((node, running)) = stack.pop() {
        if running.is_empty() {
            return false;
        }
        if let Some((l, r)) = dend.children(node) {
            for child in [l, r] {
                let members = dend.cluster_members(child).expect("child");
                let meet: Vec<usize> = running
                    .iter()
                    .copied()
                    .filter(|t| members.binary_search(t).is_ok())
                    .collect();
                stack.push((child, meet));
            }
        }
    }
    true
}

/// JSON entry for one terminal: nonzero `[level, coeff]` terms and the exact
/// decimal value as a string.
#[derive(Debug, Serialize)]
pub struct CodeEntry {
    pub terms: Vec<(usize, i8)>,
    pub decimal: String,
}

#[derive(Debug, Serialize)]
pub struct CodeReport {
    pub p: u64,
    pub codes: BTreeMap<String, CodeEntry>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub unique: Option<bool>,
}

pub fn code_report(dend: &Dendrogram, p: u64, check_unique: bool) -> Result<CodeReport> {
    let mut codes = BTreeMap::new();
    for (t, code) in encode_all(dend, p)?.into_iter().enumerate() {
        codes.insert(
            dend.terminal_name(t),
            CodeEntry {
                terms: code.terms().collect(),
                decimal: code.decimal_value().to_string(),
            },
        );
    }
    let unique = if check_unique {
        Some(check_uniqueness(dend, p)?)
    } else {
        None
    };
    Ok(CodeReport { p, codes, unique })
}
