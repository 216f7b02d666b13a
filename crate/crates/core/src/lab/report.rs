//! Tabular output shared by the experiment reports.

use serde::{Deserialize, Serialize};

use crate::entropy::EntropyValue;
use crate::error::{Error, Result};
use crate::hermitian::{CMatrix, C64};

/// One CSV line: index (rank or trial), value or `inf`, infinity reason.
#[derive(Clone, Debug, PartialEq)]
pub struct TableRow {
    pub index: usize,
    pub value: String,
    pub reason: String,
}

impl TableRow {
    pub fn new(index: usize, v: &EntropyValue) -> Self {
        Self { index, value: v.to_cell(), reason: v.reason().map(|r| r.to_string()).unwrap_or_default() }
    }

    pub fn with_number(index: usize, v: f64) -> Self {
        Self { index, value: format!("{v:.16e}"), reason: String::new() }
    }

    /// CSV with the given name for the index column.
    pub fn to_csv(rows: &[TableRow], index_name: &str) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        let io = |e: csv::Error| Error::Internal(e.to_string());
        w.write_record([index_name, "value", "reason"]).map_err(io)?;
        for r in rows {
            w.write_record([r.index.to_string(), r.value.clone(), r.reason.clone()]).map_err(io)?;
        }
        let bytes = w.into_inner().map_err(|e| Error::Internal(e.to_string()))?;
        String::from_utf8(bytes).map_err(|e| Error::Internal(e.to_string()))
    }
}

/// A possibly rectangular complex matrix in JSON form.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DenseMatrix {
    pub rows: usize,
    pub cols: usize,
    pub re: Vec<Vec<f64>>,
    pub im: Vec<Vec<f64>>,
}

impl DenseMatrix {
    pub fn from_matrix(m: &CMatrix) -> Self {
        let (r, c) = m.shape();
        Self {
            rows: r,
            cols: c,
            re: (0..r).map(|i| (0..c).map(|j| m[(i, j)].re).collect()).collect(),
            im: (0..r).map(|i| (0..c).map(|j| m[(i, j)].im).collect()).collect(),
        }
    }

    pub fn to_matrix(&self) -> Result<CMatrix> {
        for (name, part) in [("re", &self.re), ("im", &self.im)] {
            if part.len() != self.rows || part.iter().any(|row| row.len() != self.cols) {
                return Err(Error::Parse(format!("{name}: expected {}x{} entries", self.rows, self.cols)));
            }
        }
        Ok(CMatrix::from_fn(self.rows, self.cols, |i, j| C64::new(self.re[i][j], self.im[i][j])))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::entropy::InfinityReason;

    #[test]
    fn csv_marks_infinity() {
        let rows = vec![
            TableRow::new(1, &EntropyValue::Finite(0.25)),
            TableRow::new(2, &EntropyValue::PlusInfinity(InfinityReason::KernelMismatchAtOne)),
        ];
        let text = TableRow::to_csv(&rows, "rank").unwrap();
        assert_eq!(text, "rank,value,reason\n1,2.5000000000000000e-1,\n2,inf,KernelMismatchAtOne\n");
    }

    #[test]
    fn dense_matrix_round_trip() {
        let m = CMatrix::from_fn(2, 3, |i, j| C64::new(i as f64 + 0.1, j as f64 - 0.3));
        let back = DenseMatrix::from_matrix(&m).to_matrix().unwrap();
        assert_eq!(m, back);
        let mut bad = DenseMatrix::from_matrix(&m);
        bad.im.pop();
        assert!(bad.to_matrix().unwrap_err().to_string().contains("im"));
    }
}
