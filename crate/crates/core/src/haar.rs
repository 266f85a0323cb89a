//! Haar wavelet transform on a dendrogram.
//!
//! Every node carries a smooth vector. A terminal's smooth is its data row;
//! an internal node with left smooth `f'` and right smooth `f''` gets the
//! smooth `s = (f' + f'') / 2` and the detail `d = s - f''`, so that
//! `f' = s + d` and `f'' = s - d`. The transform keeps the root smooth and
//! the `n - 1` details. The left child is the one with branch label `+1`,
//! which makes the detail signs coincide with p-adic coefficients.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::data::{csv_string, DataTable};
use crate::dendrogram::Dendrogram;
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub struct HaarTransform {
    dend: Dendrogram,
    smooth: Vec<f64>,
    /// `details[k]` belongs to the internal node of rank `k + 1`.
    details: Vec<Vec<f64>>,
    columns: Option<Vec<String>>,
}

/// How [`HaarTransform::threshold_regress`] decides what is small.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum ThresholdMode {
    /// Zero a whole detail vector when its Euclidean norm is below `tau`.
    #[default]
    Norm,
    /// Zero individual coordinates whose magnitude is below `tau`.
    Coordinate,
}

/// One step of an approximation chain.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ChainStep {
    /// Node whose detail was added at this step (`None` for the root smooth).
    pub node: Option<usize>,
    /// Rank of that node.
    pub rank: Option<usize>,
    /// `+1` or `-1`: the sign the detail entered with.
    pub sign: i8,
    pub approx: Vec<f64>,
    /// Euclidean distance from `approx` to the reconstructed observation.
    pub error: f64,
}

/// Forward transform of `data` over `dend`.
pub fn forward(dend: &Dendrogram, data: &DataTable) -> Result<HaarTransform> {
    let n = dend.n_terminals();
    if data.n_rows() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: data.n_rows(),
        });
    }
    let m = data.n_cols();
    let mut smooths: Vec<Option<Vec<f64>>> = data.rows().map(|r| Some(r.to_vec())).collect();
    smooths.resize(dend.n_nodes(), None);
    let mut details = Vec::with_capacity(n - 1);
    for (k, merge) in dend.merges().iter().enumerate() {
        let left = smooths[merge.left].take().expect("left smooth computed");
        let right = smooths[merge.right].take().expect("right smooth computed");
        let mut s = vec![0.0; m];
        let mut d = vec![0.0; m];
        for c in 0..m {
            s[c] = (left[c] + right[c]) / 2.0;
            d[c] = s[c] - right[c];
        }
        details.push(d);
        smooths[n + k] = Some(s);
    }
    let smooth = smooths[dend.root()].take().expect("root smooth computed");
    Ok(HaarTransform {
        dend: dend.clone(),
        smooth,
        details,
        columns: data.column_labels().map(<[String]>::to_vec),
    })
}

/// Runs the transform defined by `dend` (typically built on other data) on
/// an external signal with one row per terminal.
pub fn apply_to_signal(dend: &Dendrogram, signal: &DataTable) -> Result<HaarTransform> {
    forward(dend, signal)
}

impl HaarTransform {
    /// Assembles a transform from parts, e.g. after reading coefficients back.
    pub fn from_parts(dend: Dendrogram, smooth: Vec<f64>, details: Vec<Vec<f64>>) -> Result<HaarTransform> {
        if details.len() != dend.merges().len() {
            return Err(Error::DimensionMismatch {
                expected: dend.merges().len(),
                found: details.len(),
            });
        }
        let m = smooth.len();
        if let Some(bad) = details.iter().find(|d| d.len() != m) {
            return Err(Error::DimensionMismatch {
                expected: m,
                found: bad.len(),
            });
        }
        Ok(HaarTransform {
            dend,
            smooth,
            details,
            columns: None,
        })
    }

    pub fn dendrogram(&self) -> &Dendrogram {
        &self.dend
    }

    /// The root smooth `s_{n-1}`.
    pub fn smooth(&self) -> &[f64] {
        &self.smooth
    }

    pub fn dim(&self) -> usize {
        self.smooth.len()
    }

    /// Detail of the internal node of the given rank (`d_rank`).
    pub fn detail(&self, rank: usize) -> Option<&[f64]> {
        rank.checked_sub(1)
            .and_then(|k| self.details.get(k))
            .map(Vec::as_slice)
    }

    /// Details in rank order, `d_1` first.
    pub fn details(&self) -> &[Vec<f64>] {
        &self.details
    }

    pub fn columns(&self) -> Option<&[String]> {
        self.columns.as_deref()
    }

    pub fn column_name(&self, j: usize) -> String {
        self.columns
            .as_ref()
            .map_or_else(|| format!("c{j}"), |c| c[j].clone())
    }

    /// Sign with which node `v`'s parent detail enters `v`'s smooth.
    pub fn sign(&self, node: usize) -> Option<i8> {
        self.dend.branch_label(node)
    }

    /// Exact inverse: rebuilds every row from the root down. Row labels come
    /// from the dendrogram's terminal labels.
    pub fn inverse(&self) -> DataTable {
        let n = self.dend.n_terminals();
        let m = self.dim();
        let mut smooths: Vec<Option<Vec<f64>>> = vec![None; self.dend.n_nodes()];
        smooths[self.dend.root()] = Some(self.smooth.clone());
        let mut out = DataTable::zeros(n, m);
        for v in (0..self.dend.n_nodes()).rev() {
            let s = smooths[v].take().expect("parent visited first");
            match self.dend.merge_of(v) {
                Some(merge) => {
                    let d = &self.details[v - n];
                    smooths[merge.left] = Some(s.iter().zip(d).map(|(a, b)| a + b).collect());
                    smooths[merge.right] = Some(s.iter().zip(d).map(|(a, b)| a - b).collect());
                }
                None => out.row_mut(v).copy_from_slice(&s),
            }
        }
        if let Some(c) = &self.columns {
            out = out.with_column_labels(c.clone()).expect("column count matches");
        }
        if let Some(l) = self.dend.labels() {
            out = out.with_row_labels(l.to_vec()).expect("one label per terminal");
        }
        out
    }

    /// One row: the root smooth plus the signed details along the path.
    pub fn reconstruct_one(&self, terminal: usize) -> Result<Vec<f64>> {
        Ok(self
            .approximation_chain(terminal)?
            .pop()
            .expect("chain starts with the smooth")
            .approx)
    }

    /// Partial sums from the root smooth down to the terminal, adding one
    /// signed detail per internal node on the path. The last element is the
    /// observation itself.
    pub fn approximation_chain(&self, terminal: usize) -> Result<Vec<ChainStep>> {
        self.dend.check_terminal(terminal)?;
        let mut path = self.dend.ancestors(terminal);
        path.reverse();
        let mut steps = Vec::with_capacity(path.len() + 1);
        let mut acc = self.smooth.clone();
        steps.push(ChainStep {
            node: None,
            rank: None,
            sign: 1,
            approx: acc.clone(),
            error: 0.0,
        });
        for (pos, &a) in path.iter().enumerate() {
            let child = path.get(pos + 1).copied().unwrap_or(terminal);
            let sign = self.dend.branch_label(child).expect("child has a parent");
            let d = &self.details[a - self.dend.n_terminals()];
            for (x, y) in acc.iter_mut().zip(d) {
                if sign > 0 {
                    *x += y;
                } else {
                    *x -= y;
                }
            }
            steps.push(ChainStep {
                node: Some(a),
                rank: self.dend.rank(a),
                sign,
                approx: acc.clone(),
                error: 0.0,
            });
        }
        for step in &mut steps {
            step.error = step
                .approx
                .iter()
                .zip(&acc)
                .map(|(a, b)| (a - b) * (a - b))
                .sum::<f64>()
                .sqrt();
        }
        Ok(steps)
    }

    /// Hard thresholding: returns a copy with small details set to zero.
    pub fn threshold_regress(&self, tau: f64, mode: ThresholdMode) -> Result<HaarTransform> {
        if tau.is_nan() || tau < 0.0 {
            return Err(Error::NegativeThreshold(tau));
        }
        let mut out = self.clone();
        for d in &mut out.details {
            match mode {
                ThresholdMode::Norm => {
                    if norm(d) < tau {
                        d.iter_mut().for_each(|x| *x = 0.0);
                    }
                }
                ThresholdMode::Coordinate => {
                    for x in d.iter_mut() {
                        if x.abs() < tau {
                            *x = 0.0;
                        }
                    }
                }
            }
        }
        Ok(out)
    }

    /// Euclidean norm of each detail, in rank order.
    pub fn detail_norms(&self) -> Vec<f64> {
        self.details.iter().map(|d| norm(d)).collect()
    }

    /// JSON coefficients: the smooth and, per internal node id, its detail
    /// vector and rank.
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(&self.to_file())?)
    }

    pub fn to_file(&self) -> CoefficientFile {
        let n = self.dend.n_terminals();
        CoefficientFile {
            smooth: self.smooth.clone(),
            details: self
                .details
                .iter()
                .enumerate()
                .map(|(k, d)| {
                    (
                        (n + k).to_string(),
                        DetailEntry {
                            vector: d.clone(),
                            level: k + 1,
                        },
                    )
                })
                .collect(),
            columns: self.columns.clone(),
        }
    }

    /// Reads coefficients written by [`HaarTransform::to_json`] back onto
    /// their dendrogram.
    pub fn from_json(dend: &Dendrogram, text: &str) -> Result<HaarTransform> {
        let file: CoefficientFile = serde_json::from_str(text)?;
        let n = dend.n_terminals();
        let mut details = vec![None; dend.merges().len()];
        for (key, entry) in file.details {
            let node: usize = key.parse().map_err(|_| Error::UnknownNode(key.clone()))?;
            let rank = dend.rank(node).ok_or_else(|| Error::UnknownNode(key.clone()))?;
            if rank != entry.level {
                return Err(Error::InvalidDendrogram(format!(
                    "node {node} has rank {rank}, coefficients say {}",
                    entry.level
                )));
            }
            details[node - n] = Some(entry.vector);
        }
        let details = details
            .into_iter()
            .enumerate()
            .map(|(k, d)| d.ok_or_else(|| Error::UnknownNode(format!("missing detail for node {}", n + k))))
            .collect::<Result<Vec<_>>>()?;
        let mut t = HaarTransform::from_parts(dend.clone(), file.smooth, details)?;
        if let Some(c) = file.columns {
            if c.len() != t.dim() {
                return Err(Error::DimensionMismatch {
                    expected: t.dim(),
                    found: c.len(),
                });
            }
            t.columns = Some(c);
        }
        Ok(t)
    }

    /// Coefficient matrix with one row per attribute and columns
    /// `s{n-1}, d{n-1}, ..., d1`, printed with six decimals.
    pub fn to_table_csv(&self) -> Result<String> {
        let top = self.details.len();
        let mut w = csv::Writer::from_writer(Vec::new());
        let mut header = vec![String::new(), format!("s{top}")];
        header.extend((1..=top).rev().map(|r| format!("d{r}")));
        w.write_record(&header)?;
        for j in 0..self.dim() {
            let mut rec = vec![self.column_name(j), fixed6(self.smooth[j])];
            rec.extend((0..top).rev().map(|k| fixed6(self.details[k][j])));
            w.write_record(&rec)?;
        }
        csv_string(w)
    }
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Six decimals, with negative zero printed as zero.
pub fn fixed6(x: f64) -> String {
    let s = format!("{x:.6}");
    if s == "-0.000000" {
        "0.000000".to_string()
    } else {
        s
    }
}

#[derive(Debug, Serialize, Deserialize)]
pub struct CoefficientFile {
    pub smooth: Vec<f64>,
    pub details: BTreeMap<String, DetailEntry>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub columns: Option<Vec<String>>,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct DetailEntry {
    pub vector: Vec<f64>,
    pub level: usize,
}
