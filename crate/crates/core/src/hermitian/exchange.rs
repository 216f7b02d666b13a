//! Matrix exchange formats.
//!
//! JSON: `{"dim": n, "re": [[...]], "im": [[...]]}`.
//! CSV: `n` rows of `2n` cells, real and imaginary parts interleaved
//! (`re_00, im_00, re_01, im_01, ...`), written with 17 significant digits.

use serde::{Deserialize, Serialize};

use super::{CMatrix, HermitianMatrix, C64};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MatrixFile {
    pub dim: usize,
    pub re: Vec<Vec<f64>>,
    pub im: Vec<Vec<f64>>,
}

impl MatrixFile {
    pub fn from_matrix(m: &CMatrix) -> Self {
        let n = m.nrows();
        Self {
            dim: n,
            re: (0..n).map(|i| (0..n).map(|j| m[(i, j)].re).collect()).collect(),
            im: (0..n).map(|i| (0..n).map(|j| m[(i, j)].im).collect()).collect(),
        }
    }

    pub fn to_matrix(&self) -> Result<CMatrix> {
        let n = self.dim;
        if n == 0 {
            return Err(Error::Parse("dim: must be positive".into()));
        }
        for (name, part) in [("re", &self.re), ("im", &self.im)] {
            if part.len() != n {
                return Err(Error::Parse(format!("{name}: expected {n} rows, found {}", part.len())));
            }
            if let Some((i, row)) = part.iter().enumerate().find(|(_, r)| r.len() != n) {
                return Err(Error::Parse(format!("{name}[{i}]: expected {n} entries, found {}", row.len())));
            }
        }
        Ok(CMatrix::from_fn(n, n, |i, j| C64::new(self.re[i][j], self.im[i][j])))
    }
}

pub fn matrix_to_json(m: &HermitianMatrix) -> String {
    serde_json::to_string(&MatrixFile::from_matrix(m.matrix())).expect("matrix serializes")
}

pub fn matrix_from_json(text: &str) -> Result<HermitianMatrix> {
    let file: MatrixFile = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    HermitianMatrix::new(file.to_matrix()?)
}

pub fn matrix_to_csv(m: &HermitianMatrix) -> String {
    let a = m.matrix();
    let n = a.nrows();
    let mut out = String::new();
    for i in 0..n {
        let row: Vec<String> = (0..n)
            .flat_map(|j| [format!("{:.16e}", a[(i, j)].re), format!("{:.16e}", a[(i, j)].im)])
            .collect();
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

pub fn matrix_from_csv(text: &str) -> Result<HermitianMatrix> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let record = record.map_err(|e| Error::Parse(format!("row {i}: {e}")))?;
        let row = record
            .iter()
            .enumerate()
            .map(|(j, cell)| {
                cell.parse::<f64>()
                    .map_err(|e| Error::Parse(format!("row {i}, column {j}: {e}")))
            })
            .collect::<Result<Vec<_>>>()?;
        rows.push(row);
    }
    let n = rows.len();
    if n == 0 {
        return Err(Error::Parse("empty CSV matrix".into()));
    }
    if let Some((i, r)) = rows.iter().enumerate().find(|(_, r)| r.len() != 2 * n) {
        return Err(Error::Parse(format!("row {i}: expected {} cells, found {}", 2 * n, r.len())));
    }
    HermitianMatrix::new(CMatrix::from_fn(n, n, |i, j| C64::new(rows[i][2 * j], rows[i][2 * j + 1])))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hermitian::random_state;
    use proptest::prelude::*;

    #[test]
    fn json_shape_errors_name_the_field() {
        let bad = r#"{"dim": 2, "re": [[1, 0]], "im": [[0, 0], [0, 0]]}"#;
        let err = matrix_from_json(bad).unwrap_err().to_string();
        assert!(err.contains("re"), "{err}");
        let bad = r#"{"dim": 2, "re": [[1, 0], [0, 1]], "im": [[0, 0], [0]]}"#;
        let err = matrix_from_json(bad).unwrap_err().to_string();
        assert!(err.contains("im[1]"), "{err}");
    }

    #[test]
    fn csv_rejects_ragged_rows() {
        assert!(matrix_from_csv("1,0,0,0\n0,0\n").is_err());
        assert!(matrix_from_csv("").is_err());
        assert!(matrix_from_csv("1,x\n").is_err());
    }

    proptest! {
        #[test]
        fn exchange_round_trip_is_bit_exact(seed in 0u64..10_000, dim in 1usize..6) {
            let m = random_state(dim, 0.0, 1.0, seed).unwrap();
            let h = m.hermitian();
            prop_assert_eq!(&matrix_from_json(&matrix_to_json(h)).unwrap(), h);
            prop_assert_eq!(&matrix_from_csv(&matrix_to_csv(h)).unwrap(), h);
        }
    }
}
