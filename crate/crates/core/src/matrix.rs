use crate::error::{Error, Result};

/// A dense, symmetric, nonnegative dissimilarity matrix with a zero diagonal.
#[derive(Clone, Debug, PartialEq)]
pub struct DistanceMatrix {
    n: usize,
    values: Vec<f64>,
}

/// One failure of a triangle condition.
///
/// `(i, j, k)` reads as "the side `d(i, k)` is too long given the path through
/// `j`", and `slack` is by how much it exceeds the allowed bound.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Violation {
    pub i: usize,
    pub j: usize,
    pub k: usize,
    pub slack: f64,
}

impl DistanceMatrix {
    /// Builds a matrix from row-major values, checking every invariant.
    pub fn from_vec(n: usize, values: Vec<f64>) -> Result<DistanceMatrix> {
        if values.len() != n * n {
            return Err(Error::DimensionMismatch {
                expected: n * n,
                found: values.len(),
            });
        }
        for i in 0..n {
            if values[i * n + i] != 0.0 {
                return Err(Error::InvalidMatrix(format!("nonzero diagonal at {i}")));
            }
            for j in 0..n {
                let v = values[i * n + j];
                if !v.is_finite() || v < 0.0 {
                    return Err(Error::InvalidMatrix(format!(
                        "entry ({i}, {j}) = {v} is not a nonnegative real"
                    )));
                }
                if v != values[j * n + i] {
                    return Err(Error::InvalidMatrix(format!("asymmetric at ({i}, {j})")));
                }
            }
        }
        Ok(DistanceMatrix { n, values })
    }

    /// Builds a matrix from rows.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<DistanceMatrix> {
        let n = rows.len();
        let mut values = Vec::with_capacity(n * n);
        for row in rows {
            if row.len() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    found: row.len(),
                });
            }
            values.extend_from_slice(row);
        }
        DistanceMatrix::from_vec(n, values)
    }

    /// Builds a matrix by evaluating `f` on each pair `i < j`.
    pub fn from_fn<F>(n: usize, mut f: F) -> Result<DistanceMatrix>
    where
        F: FnMut(usize, usize) -> f64,
    {
        let mut values = vec![0.0; n * n];
        for i in 0..n {
            for j in (i + 1)..n {
                let v = f(i, j);
                values[i * n + j] = v;
                values[j * n + i] = v;
            }
        }
        DistanceMatrix::from_vec(n, values)
    }

    pub(crate) fn from_vec_unchecked(n: usize, values: Vec<f64>) -> DistanceMatrix {
        debug_assert_eq!(values.len(), n * n);
        DistanceMatrix { n, values }
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.n + j]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.values
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.values[i * self.n..(i + 1) * self.n]
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        (0..self.n).map(|i| self.row(i).to_vec()).collect()
    }

    /// Largest absolute entrywise difference between two matrices of equal size.
    pub fn max_abs_diff(&self, other: &DistanceMatrix) -> Option<f64> {
        if self.n != other.n {
            return None;
        }
        Some(
            self.values
                .iter()
                .zip(&other.values)
                .map(|(a, b)| (a - b).abs())
                .fold(0.0, f64::max),
        )
    }
}

/// Checks the strong triangle inequality `d(i,k) <= max(d(i,j), d(j,k)) + tol`
/// on every triple and returns the failures sorted by `(i, j, k)`.
pub fn verify_ultrametric(m: &DistanceMatrix, tol: f64) -> Vec<Violation> {
    verify_triangles(m, tol, f64::max)
}

/// Checks the ordinary triangle inequality `d(i,k) <= d(i,j) + d(j,k) + tol`.
pub fn verify_metric(m: &DistanceMatrix, tol: f64) -> Vec<Violation> {
    verify_triangles(m, tol, |a, b| a + b)
}

fn verify_triangles<F>(m: &DistanceMatrix, tol: f64, bound: F) -> Vec<Violation>
where
    F: Fn(f64, f64) -> f64,
{
    let n = m.len();
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
                let limit = bound(m.get(i, j), m.get(j, k));
                let side = m.get(i, k);
                if side > limit + tol {
                    out.push(Violation {
                        i,
                        j,
                        k,
                        slack: side - limit,
                    });
                }
            }
        }
    }
    out
}

/// True when every triangle is equilateral or isosceles with a short base,
/// i.e. the two largest of its three sides are equal within `tol`.
pub fn all_triangles_isosceles(m: &DistanceMatrix, tol: f64) -> bool {
    let n = m.len();
    for i in 0..n {
        for j in (i + 1)..n {
            for k in (j + 1)..n {
                let mut s = [m.get(i, j), m.get(j, k), m.get(i, k)];
                s.sort_by(f64::total_cmp);
                if (s[2] - s[1]).abs() > tol {
                    return false;
                }
            }
        }
    }
    true
}
