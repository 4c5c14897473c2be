//! JSON exchange format: `{"beta": b, "rows": n, "cols": m, "entries": [[c1..cb], ...]}`,
//! entries row-major.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

use super::decomp::Hermitian;
use super::matrix::Matrix;
use super::scalar::{Algebra, Scalar};

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct MatrixJson {
    beta: u32,
    rows: usize,
    cols: usize,
    entries: Vec<Vec<f64>>,
}

impl TryFrom<MatrixJson> for Matrix {
    type Error = Error;

    fn try_from(j: MatrixJson) -> Result<Matrix> {
        let alg = Algebra::from_beta(j.beta)?;
        if j.entries.len() != j.rows * j.cols {
            return Err(Error::DimensionMismatch(format!(
                "{} entries listed for a {}x{} matrix",
                j.entries.len(),
                j.rows,
                j.cols
            )));
        }
        let data = j
            .entries
            .iter()
            .map(|c| Scalar::from_components(alg, c))
            .collect::<Result<Vec<_>>>()?;
        if data.iter().any(|s| !s.is_finite()) {
            return Err(Error::Parse("matrix entries must be finite".into()));
        }
        Matrix::from_scalars(alg, j.rows, j.cols, data)
    }
}

impl From<&Matrix> for MatrixJson {
    fn from(m: &Matrix) -> Self {
        MatrixJson {
            beta: m.algebra().beta() as u32,
            rows: m.rows(),
            cols: m.cols(),
            entries: m.entries().iter().map(|s| s.components(m.algebra()).to_vec()).collect(),
        }
    }
}

impl Serialize for Matrix {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        MatrixJson::from(self).serialize(s)
    }
}

impl<'de> Deserialize<'de> for Matrix {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let j = MatrixJson::deserialize(d)?;
        Matrix::try_from(j).map_err(serde::de::Error::custom)
    }
}

impl Serialize for Hermitian {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.as_matrix().serialize(s)
    }
}

impl<'de> Deserialize<'de> for Hermitian {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let m = Matrix::deserialize(d)?;
        Hermitian::new(m).map_err(serde::de::Error::custom)
    }
}

pub fn matrix_from_json(text: &str) -> Result<Matrix> {
    serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))
}

pub fn matrix_to_json(m: &Matrix) -> String {
    serde_json::to_string(m).expect("matrix serialization cannot fail")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_quaternion() {
        let m = Matrix::from_coords(
            Algebra::Quaternion,
            2,
            1,
            &[1.0, 2.0, 3.0, 4.0, -0.5, 0.0, 1e-300, 7.25],
        );
        let text = matrix_to_json(&m);
        assert_eq!(matrix_from_json(&text).unwrap(), m);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(matrix_from_json(r#"{"beta":3,"rows":1,"cols":1,"entries":[[1,2,3]]}"#).is_err());
        assert!(matrix_from_json(r#"{"beta":2,"rows":1,"cols":1,"entries":[[1]]}"#).is_err());
        assert!(matrix_from_json(r#"{"beta":1,"rows":2,"cols":1,"entries":[[1]]}"#).is_err());
        assert!(matrix_from_json(r#"{"beta":1,"rows":1,"cols":1,"entries":[[1]],"x":0}"#).is_err());
    }

    #[test]
    fn hermitian_is_validated_on_load() {
        let bad = r#"{"beta":1,"rows":2,"cols":2,"entries":[[1],[2],[0],[1]]}"#;
        assert!(serde_json::from_str::<Hermitian>(bad).is_err());
        let good = r#"{"beta":1,"rows":2,"cols":2,"entries":[[1],[2],[2],[5]]}"#;
        assert!(serde_json::from_str::<Hermitian>(good).is_ok());
    }
}
