//! Rectangular observation tables and their CSV form.
//!
//! CSV input has a header row. The first column holds row labels when its
//! header is blank or when any of its cells is not a number.

use std::io::Read;

use crate::error::{Error, Result};
use crate::haar::fixed6;

#[derive(Clone, Debug, PartialEq)]
pub struct DataTable {
    n: usize,
    m: usize,
    values: Vec<f64>,
    row_labels: Option<Vec<String>>,
    column_labels: Option<Vec<String>>,
}

impl DataTable {
    pub fn new(n: usize, m: usize, values: Vec<f64>) -> Result<DataTable> {
        if values.len() != n * m {
            return Err(Error::DimensionMismatch {
                expected: n * m,
                found: values.len(),
            });
        }
        if let Some(pos) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidTable(format!(
                "non-finite value at row {}, column {}",
                pos / m.max(1),
                pos % m.max(1)
            )));
        }
        Ok(DataTable {
            n,
            m,
            values,
            row_labels: None,
            column_labels: None,
        })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<DataTable> {
        let n = rows.len();
        let m = rows.first().map_or(0, Vec::len);
        let mut values = Vec::with_capacity(n * m);
        for row in rows {
            if row.len() != m {
                return Err(Error::DimensionMismatch {
                    expected: m,
                    found: row.len(),
                });
            }
            values.extend_from_slice(row);
        }
        DataTable::new(n, m, values)
    }

    /// An `n × m` table of zeros.
    pub fn zeros(n: usize, m: usize) -> DataTable {
        DataTable {
            n,
            m,
            values: vec![0.0; n * m],
            row_labels: None,
            column_labels: None,
        }
    }

    pub fn with_row_labels(mut self, labels: Vec<String>) -> Result<DataTable> {
        check_len(self.n, labels.len())?;
        self.row_labels = Some(labels);
        Ok(self)
    }

    pub fn with_column_labels(mut self, labels: Vec<String>) -> Result<DataTable> {
        check_len(self.m, labels.len())?;
        self.column_labels = Some(labels);
        Ok(self)
    }

    pub fn n_rows(&self) -> usize {
        self.n
    }

    pub fn n_cols(&self) -> usize {
        self.m
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.values[i * self.m..(i + 1) * self.m]
    }

    pub(crate) fn row_mut(&mut self, i: usize) -> &mut [f64] {
        &mut self.values[i * self.m..(i + 1) * self.m]
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.m + j]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        (0..self.n).map(move |i| self.row(i))
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        self.rows().map(<[f64]>::to_vec).collect()
    }

    pub fn row_labels(&self) -> Option<&[String]> {
        self.row_labels.as_deref()
    }

    pub fn column_labels(&self) -> Option<&[String]> {
        self.column_labels.as_deref()
    }

    pub fn row_name(&self, i: usize) -> String {
        self.row_labels
            .as_ref()
            .map_or_else(|| i.to_string(), |l| l[i].clone())
    }

    pub fn column_name(&self, j: usize) -> String {
        self.column_labels
            .as_ref()
            .map_or_else(|| format!("c{j}"), |l| l[j].clone())
    }

    /// Largest absolute entrywise difference, `None` if shapes differ.
    pub fn max_abs_diff(&self, other: &DataTable) -> Option<f64> {
        if self.n != other.n || self.m != other.m {
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

    /// Keeps only the named columns. A selector matches a column header, or
    /// failing that is read as a 0-based column index.
    pub fn select_columns(&self, selectors: &[String]) -> Result<DataTable> {
        let idx = resolve_columns(self.column_labels.as_deref(), self.m, selectors)?;
        let mut values = Vec::with_capacity(self.n * idx.len());
        for i in 0..self.n {
            values.extend(idx.iter().map(|&j| self.get(i, j)));
        }
        let mut out = DataTable::new(self.n, idx.len(), values)?;
        out.row_labels = self.row_labels.clone();
        out.column_labels = self
            .column_labels
            .as_ref()
            .map(|l| idx.iter().map(|&j| l[j].clone()).collect());
        Ok(out)
    }

    pub fn from_csv<R: Read>(reader: R) -> Result<DataTable> {
        let raw = RawCsv::read(reader)?;
        let mut values = Vec::with_capacity(raw.cells.len() * raw.headers.len());
        for (i, row) in raw.cells.iter().enumerate() {
            for (j, cell) in row.iter().enumerate() {
                let v: f64 = cell.trim().parse().map_err(|_| {
                    Error::InvalidTable(format!(
                        "row {}, column {:?}: {:?} is not a number",
                        i + 1,
                        raw.headers[j],
                        cell
                    ))
                })?;
                values.push(v);
            }
        }
        let mut t = DataTable::new(raw.cells.len(), raw.headers.len(), values)?;
        t.row_labels = raw.row_labels;
        t.column_labels = Some(raw.headers);
        Ok(t)
    }

    pub fn from_csv_path(path: &std::path::Path) -> Result<DataTable> {
        DataTable::from_csv(open(path)?)
    }

    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        let mut header = vec![String::new()];
        header.extend((0..self.m).map(|j| self.column_name(j)));
        w.write_record(&header)?;
        for i in 0..self.n {
            let mut rec = vec![self.row_name(i)];
            rec.extend(self.row(i).iter().map(|&v| fixed6(v)));
            w.write_record(&rec)?;
        }
        csv_string(w)
    }
}

/// Presence/absence table: `n` objects, `m` boolean attributes.
#[derive(Clone, Debug, PartialEq)]
pub struct BooleanTable {
    n: usize,
    m: usize,
    values: Vec<bool>,
    row_labels: Option<Vec<String>>,
    column_labels: Option<Vec<String>>,
}

impl BooleanTable {
    pub fn new(n: usize, m: usize, values: Vec<bool>) -> Result<BooleanTable> {
        if values.len() != n * m {
            return Err(Error::DimensionMismatch {
                expected: n * m,
                found: values.len(),
            });
        }
        Ok(BooleanTable {
            n,
            m,
            values,
            row_labels: None,
            column_labels: None,
        })
    }

    pub fn from_rows(rows: &[Vec<bool>]) -> Result<BooleanTable> {
        let n = rows.len();
        let m = rows.first().map_or(0, Vec::len);
        let mut values = Vec::with_capacity(n * m);
        for row in rows {
            if row.len() != m {
                return Err(Error::DimensionMismatch {
                    expected: m,
                    found: row.len(),
                });
            }
            values.extend_from_slice(row);
        }
        BooleanTable::new(n, m, values)
    }

    pub fn with_row_labels(mut self, labels: Vec<String>) -> Result<BooleanTable> {
        check_len(self.n, labels.len())?;
        self.row_labels = Some(labels);
        Ok(self)
    }

    pub fn with_column_labels(mut self, labels: Vec<String>) -> Result<BooleanTable> {
        check_len(self.m, labels.len())?;
        self.column_labels = Some(labels);
        Ok(self)
    }

    pub fn n_rows(&self) -> usize {
        self.n
    }

    pub fn n_cols(&self) -> usize {
        self.m
    }

    pub fn get(&self, i: usize, j: usize) -> bool {
        self.values[i * self.m + j]
    }

    pub fn row(&self, i: usize) -> &[bool] {
        &self.values[i * self.m..(i + 1) * self.m]
    }

    pub fn row_labels(&self) -> Option<&[String]> {
        self.row_labels.as_deref()
    }

    pub fn column_labels(&self) -> Option<&[String]> {
        self.column_labels.as_deref()
    }

    pub fn row_name(&self, i: usize) -> String {
        self.row_labels
            .as_ref()
            .map_or_else(|| i.to_string(), |l| l[i].clone())
    }

    pub fn column_name(&self, j: usize) -> String {
        self.column_labels
            .as_ref()
            .map_or_else(|| format!("v{}", j + 1), |l| l[j].clone())
    }

    pub fn select_columns(&self, selectors: &[String]) -> Result<BooleanTable> {
        let idx = resolve_columns(self.column_labels.as_deref(), self.m, selectors)?;
        let mut values = Vec::with_capacity(self.n * idx.len());
        for i in 0..self.n {
            values.extend(idx.iter().map(|&j| self.get(i, j)));
        }
        let mut out = BooleanTable::new(self.n, idx.len(), values)?;
        out.row_labels = self.row_labels.clone();
        out.column_labels = self
            .column_labels
            .as_ref()
            .map(|l| idx.iter().map(|&j| l[j].clone()).collect());
        Ok(out)
    }

    /// Reads a table of `0`/`1` cells; anything else is an error.
    pub fn from_csv<R: Read>(reader: R) -> Result<BooleanTable> {
        let raw = RawCsv::read(reader)?;
        let mut values = Vec::with_capacity(raw.cells.len() * raw.headers.len());
        for (i, row) in raw.cells.iter().enumerate() {
            for (j, cell) in row.iter().enumerate() {
                let v = match cell.trim() {
                    "0" => false,
                    "1" => true,
                    other => match other.parse::<f64>() {
                        Ok(0.0) => false,
                        Ok(1.0) => true,
                        _ => {
                            return Err(Error::NotBoolean {
                                row: i + 1,
                                column: j + 1,
                                value: cell.clone(),
                            })
                        }
                    },
                };
                values.push(v);
            }
        }
        let mut t = BooleanTable::new(raw.cells.len(), raw.headers.len(), values)?;
        t.row_labels = raw.row_labels;
        t.column_labels = Some(raw.headers);
        Ok(t)
    }

    pub fn from_csv_path(path: &std::path::Path) -> Result<BooleanTable> {
        BooleanTable::from_csv(open(path)?)
    }
}

fn open(path: &std::path::Path) -> Result<std::fs::File> {
    std::fs::File::open(path)
        .map_err(|e| std::io::Error::new(e.kind(), format!("{}: {e}", path.display())).into())
}

fn check_len(expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, found })
    }
}

fn resolve_columns(labels: Option<&[String]>, m: usize, selectors: &[String]) -> Result<Vec<usize>> {
    selectors
        .iter()
        .map(|s| {
            if let Some(j) = labels.and_then(|l| l.iter().position(|h| h == s)) {
                return Ok(j);
            }
            match s.parse::<usize>() {
                Ok(j) if j < m => Ok(j),
                _ => Err(Error::InvalidTable(format!("no column named {s:?}"))),
            }
        })
        .collect()
}

pub(crate) fn csv_string(w: csv::Writer<Vec<u8>>) -> Result<String> {
    let bytes = w
        .into_inner()
        .map_err(|e| Error::Io(std::io::Error::other(e.to_string())))?;
    String::from_utf8(bytes).map_err(|e| Error::Io(std::io::Error::other(e)))
}

struct RawCsv {
    headers: Vec<String>,
    row_labels: Option<Vec<String>>,
    cells: Vec<Vec<String>>,
}

impl RawCsv {
    fn read<R: Read>(reader: R) -> Result<RawCsv> {
        let mut rdr = csv::ReaderBuilder::new()
            .has_headers(true)
            .trim(csv::Trim::All)
            .from_reader(reader);
        let mut headers: Vec<String> = rdr.headers()?.iter().map(str::to_string).collect();
        let mut cells: Vec<Vec<String>> = Vec::new();
        for rec in rdr.records() {
            let rec = rec?;
            if rec.iter().all(str::is_empty) {
                continue;
            }
            cells.push(rec.iter().map(str::to_string).collect());
        }
        if headers.is_empty() || headers.iter().all(String::is_empty) && cells.is_empty() {
            return Err(Error::InvalidTable("empty input".into()));
        }
        if cells.is_empty() {
            return Err(Error::InvalidTable("no data rows".into()));
        }
        let first_is_labels =
            headers[0].is_empty() || cells.iter().any(|r| r[0].trim().parse::<f64>().is_err());
        let row_labels = if first_is_labels {
            headers.remove(0);
            Some(cells.iter_mut().map(|r| r.remove(0)).collect())
        } else {
            None
        };
        if headers.is_empty() {
            return Err(Error::InvalidTable("no data columns".into()));
        }
        Ok(RawCsv {
            headers,
            row_labels,
            cells,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const IRIS_HEAD: &str = ",Sepal.L,Sepal.W,Petal.L,Petal.W\n1,5.1,3.5,1.4,0.2\n2,4.9,3.0,1.4,0.2\n";

    #[test]
    fn reads_labelled_csv() {
        let t = DataTable::from_csv(IRIS_HEAD.as_bytes()).unwrap();
        assert_eq!((t.n_rows(), t.n_cols()), (2, 4));
        assert_eq!(t.row_labels().unwrap(), &["1".to_string(), "2".to_string()]);
        assert_eq!(t.column_name(1), "Sepal.W");
        assert_eq!(t.row(1), &[4.9, 3.0, 1.4, 0.2]);
    }

    #[test]
    fn reads_unlabelled_csv() {
        let t = DataTable::from_csv("a,b\n1,2\n3,4\n".as_bytes()).unwrap();
        assert!(t.row_labels().is_none());
        assert_eq!(t.to_rows(), vec![vec![1.0, 2.0], vec![3.0, 4.0]]);
    }

    #[test]
    fn text_first_column_becomes_labels() {
        let t = DataTable::from_csv("name,x\nfoo,1\nbar,2\n".as_bytes()).unwrap();
        assert_eq!(t.n_cols(), 1);
        assert_eq!(t.row_name(1), "bar");
    }

    #[test]
    fn rejects_empty_and_ragged() {
        assert!(DataTable::from_csv("".as_bytes()).is_err());
        assert!(DataTable::from_csv("a,b\n".as_bytes()).is_err());
        assert!(DataTable::from_csv("a,b\n1,2\n3\n".as_bytes()).is_err());
        assert!(DataTable::from_csv(",a\nr,xyz\n".as_bytes()).is_err());
    }

    #[test]
    fn selects_columns_by_name_or_index() {
        let t = DataTable::from_csv(IRIS_HEAD.as_bytes()).unwrap();
        let s = t
            .select_columns(&["Petal.W".to_string(), "0".to_string()])
            .unwrap();
        assert_eq!(s.row(0), &[0.2, 5.1]);
        assert_eq!(s.column_name(0), "Petal.W");
        assert!(t.select_columns(&["nope".to_string()]).is_err());
    }

    #[test]
    fn boolean_csv() {
        let t = BooleanTable::from_csv(",v1,v2\na,1,0\nb,0,1\n".as_bytes()).unwrap();
        assert!(t.get(0, 0) && !t.get(0, 1));
        assert_eq!(t.row_name(1), "b");
        match BooleanTable::from_csv(",v1\na,2\n".as_bytes()) {
            Err(Error::NotBoolean {
                row: 1, column: 1, ..
            }) => {}
            other => panic!("expected NotBoolean, got {other:?}"),
        }
    }

    #[test]
    fn csv_round_trip() {
        let t = DataTable::from_csv(IRIS_HEAD.as_bytes()).unwrap();
        let again = DataTable::from_csv(t.to_csv().unwrap().as_bytes()).unwrap();
        assert_eq!(again, t);
    }
}
