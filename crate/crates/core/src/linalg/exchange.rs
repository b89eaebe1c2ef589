//! JSON matrix exchange format: `{"n": int, "re": [[...]], "im": [[...]]}`, row-major.

use std::path::Path;

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::hermitian::CMatrix;
use crate::scalar::Scalar;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MatrixJson {
    pub n: usize,
    pub re: Vec<Vec<f64>>,
    #[serde(default)]
    pub im: Vec<Vec<f64>>,
}

impl MatrixJson {
    pub fn from_matrix<T: Scalar>(m: &CMatrix<T>) -> Self {
        let n = m.nrows();
        let re = (0..n).map(|i| (0..n).map(|j| m[(i, j)].re.as_f64()).collect()).collect();
        let im = (0..n).map(|i| (0..n).map(|j| m[(i, j)].im.as_f64()).collect()).collect();
        Self { n, re, im }
    }

    pub fn to_matrix<T: Scalar>(&self) -> Result<CMatrix<T>> {
        let n = self.n;
        let rows_ok = |rows: &Vec<Vec<f64>>| rows.len() == n && rows.iter().all(|r| r.len() == n);
        if n == 0 || !rows_ok(&self.re) || !(self.im.is_empty() || rows_ok(&self.im)) {
            return Err(Error::Shape(format!("matrix file does not describe a {n}x{n} matrix")));
        }
        Ok(CMatrix::from_fn(n, n, |i, j| {
            let im = if self.im.is_empty() { 0.0 } else { self.im[i][j] };
            Complex::new(T::of(self.re[i][j]), T::of(im))
        }))
    }

    pub fn read(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Ok(serde_json::from_str(&text)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_real_only() {
        let j: MatrixJson = serde_json::from_str(r#"{"n":2,"re":[[2,1],[1,2]]}"#).unwrap();
        let m = j.to_matrix::<f64>().unwrap();
        assert_eq!(m[(0, 1)], Complex::new(1.0, 0.0));
    }

    #[test]
    fn rejects_ragged() {
        let j: MatrixJson = serde_json::from_str(r#"{"n":2,"re":[[2,1],[1]]}"#).unwrap();
        assert!(j.to_matrix::<f64>().is_err());
    }
}
