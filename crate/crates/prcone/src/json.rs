//! JSON schemas for matrices, witnesses, function models, and grids, as
//! consumed and produced by the CLI.

use serde::{Deserialize, Serialize};

use crate::cara::{CaraFunction, CaraModel, DiscGrid, HerglotzTerm};
use crate::error::{Error, Result};
use crate::linalg::CMatrix;
use crate::pr::{EquivWitness, PrecWitness};
use crate::C64;

/// Row-major complex matrix as `{"rows": n, "cols": m, "data": [[re, im], ...]}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MatrixJson {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<[f64; 2]>,
}

impl MatrixJson {
    pub fn from_matrix(m: &CMatrix) -> Self {
        let mut data = Vec::with_capacity(m.nrows() * m.ncols());
        for i in 0..m.nrows() {
            for j in 0..m.ncols() {
                data.push([m[(i, j)].re, m[(i, j)].im]);
            }
        }
        MatrixJson {
            rows: m.nrows(),
            cols: m.ncols(),
            data,
        }
    }

    pub fn to_matrix(&self) -> Result<CMatrix> {
        if self.data.len() != self.rows * self.cols {
            return Err(Error::InvalidArgument(format!(
                "matrix data has {} entries, expected {}",
                self.data.len(),
                self.rows * self.cols
            )));
        }
        let m = CMatrix::from_fn(self.rows, self.cols, |i, j| {
            let e = self.data[i * self.cols + j];
            C64::new(e[0], e[1])
        });
        crate::linalg::check_finite(&m)?;
        Ok(m)
    }
}

/// Pre-order witness, with the support basis included so the coordinates
/// are reproducible across eigensolver conventions.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PrecWitnessJson {
    pub x: MatrixJson,
    pub y: MatrixJson,
    /// `1/||X||`; absent when `X = 0`.
    pub r: Option<f64>,
    pub residual: f64,
    pub basis: MatrixJson,
}

impl PrecWitnessJson {
    pub fn from_witness(w: &PrecWitness) -> Self {
        PrecWitnessJson {
            x: MatrixJson::from_matrix(&w.x),
            y: MatrixJson::from_matrix(&w.y),
            r: w.r.is_finite().then_some(w.r),
            residual: w.residual,
            basis: MatrixJson::from_matrix(&w.basis),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EquivWitnessJson {
    pub xt: MatrixJson,
    pub yt: MatrixJson,
    pub m: MatrixJson,
    pub forward: PrecWitnessJson,
    pub backward: PrecWitnessJson,
    pub basis_a: MatrixJson,
    pub basis_b: MatrixJson,
}

impl EquivWitnessJson {
    pub fn from_witness(w: &EquivWitness) -> Self {
        EquivWitnessJson {
            xt: MatrixJson::from_matrix(&w.xt),
            yt: MatrixJson::from_matrix(&w.yt),
            m: MatrixJson::from_matrix(&w.m),
            forward: PrecWitnessJson::from_witness(&w.forward),
            backward: PrecWitnessJson::from_witness(&w.backward),
            basis_a: MatrixJson::from_matrix(&w.basis_a),
            basis_b: MatrixJson::from_matrix(&w.basis_b),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct HerglotzTermJson {
    pub beta: [f64; 2],
    #[serde(rename = "P")]
    pub p: MatrixJson,
}

/// Function model schema, tagged by `"model"`.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "model", rename_all = "lowercase")]
pub enum CaraModelJson {
    Herglotz {
        #[serde(rename = "H0")]
        h0: MatrixJson,
        #[serde(rename = "P0")]
        p0: MatrixJson,
        terms: Vec<HerglotzTermJson>,
    },
    Constant {
        value: MatrixJson,
    },
    Rational {
        num: Vec<MatrixJson>,
        den: Vec<MatrixJson>,
    },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CaraFunctionJson {
    pub dim: usize,
    #[serde(flatten)]
    pub model: CaraModelJson,
}

impl CaraFunctionJson {
    pub fn from_function(f: &CaraFunction) -> Result<Self> {
        let model = match &f.model {
            CaraModel::Herglotz { h0, p0, terms } => CaraModelJson::Herglotz {
                h0: MatrixJson::from_matrix(h0),
                p0: MatrixJson::from_matrix(p0),
                terms: terms
                    .iter()
                    .map(|t| HerglotzTermJson {
                        beta: [t.beta.re, t.beta.im],
                        p: MatrixJson::from_matrix(&t.p),
                    })
                    .collect(),
            },
            CaraModel::Constant(v) => CaraModelJson::Constant {
                value: MatrixJson::from_matrix(v),
            },
            CaraModel::Rational { num, den } => CaraModelJson::Rational {
                num: num.iter().map(MatrixJson::from_matrix).collect(),
                den: den.iter().map(MatrixJson::from_matrix).collect(),
            },
            CaraModel::LftComposed { .. } => {
                return Err(Error::InvalidArgument(
                    "composed functions have no standalone JSON form".into(),
                ))
            }
        };
        Ok(CaraFunctionJson { dim: f.dim, model })
    }

    pub fn to_function(&self, tol: f64) -> Result<CaraFunction> {
        let f = match &self.model {
            CaraModelJson::Herglotz { h0, p0, terms } => {
                let terms = terms
                    .iter()
                    .map(|t| {
                        Ok(HerglotzTerm {
                            beta: C64::new(t.beta[0], t.beta[1]),
                            p: t.p.to_matrix()?,
                        })
                    })
                    .collect::<Result<Vec<_>>>()?;
                CaraFunction::herglotz(h0.to_matrix()?, p0.to_matrix()?, terms, tol)?
            }
            CaraModelJson::Constant { value } => {
                CaraFunction::constant(&value.to_matrix()?, tol)?
            }
            CaraModelJson::Rational { num, den } => CaraFunction::rational(
                num.iter().map(|m| m.to_matrix()).collect::<Result<_>>()?,
                den.iter().map(|m| m.to_matrix()).collect::<Result<_>>()?,
                tol,
            )?,
        };
        if f.dim != self.dim {
            return Err(Error::DimMismatch {
                left: format!("declared dim {}", self.dim),
                right: format!("model dim {}", f.dim),
            });
        }
        Ok(f)
    }
}

/// Grid spec `{"radii": [...], "angles": k}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GridJson {
    pub radii: Vec<f64>,
    pub angles: usize,
}

impl GridJson {
    pub fn from_grid(g: &DiscGrid) -> Self {
        GridJson {
            radii: g.radii.clone(),
            angles: g.angles,
        }
    }

    pub fn to_grid(&self) -> Result<DiscGrid> {
        DiscGrid::new(self.radii.clone(), self.angles)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cara::sample_herglotz;
    use crate::linalg::opnorm;
    use crate::pr::{prec_check, sample_pr, sample_prec_pair};
    use num_complex::Complex;

    #[test]
    fn matrix_roundtrip() {
        let m = CMatrix::from_row_slice(
            2,
            2,
            &[
                Complex::new(1.0, -2.0),
                Complex::new(0.125, 3.5),
                Complex::new(-1e-17, 7.0),
                Complex::new(0.1 + 0.2, 0.0),
            ],
        );
        let j = MatrixJson::from_matrix(&m);
        let text = serde_json::to_string(&j).unwrap();
        let back: MatrixJson = serde_json::from_str(&text).unwrap();
        let m2 = back.to_matrix().unwrap();
        assert_eq!(m, m2, "serialization must be bit-exact");
    }

    #[test]
    fn matrix_shape_mismatch_rejected() {
        let bad = MatrixJson {
            rows: 2,
            cols: 2,
            data: vec![[1.0, 0.0]; 3],
        };
        assert!(bad.to_matrix().is_err());
        let nan = MatrixJson {
            rows: 1,
            cols: 1,
            data: vec![[f64::NAN, 0.0]],
        };
        assert!(nan.to_matrix().is_err());
    }

    #[test]
    fn witness_serialization_includes_basis() {
        let b = sample_pr(3, 2, 5).unwrap();
        let (a, _) = sample_prec_pair(&b, 0.4, 6).unwrap();
        let w = prec_check(&a, &b, 1e-9).unwrap();
        let j = PrecWitnessJson::from_witness(&w);
        assert_eq!(j.basis.rows, 3);
        assert_eq!(j.basis.cols, 2);
        let text = serde_json::to_string(&j).unwrap();
        let back: PrecWitnessJson = serde_json::from_str(&text).unwrap();
        assert_eq!(back.x.to_matrix().unwrap(), w.x);
    }

    #[test]
    fn cara_function_roundtrip() {
        let f = sample_herglotz(2, 2, true, 9).unwrap();
        let j = CaraFunctionJson::from_function(&f).unwrap();
        let text = serde_json::to_string(&j).unwrap();
        assert!(text.contains("\"model\":\"herglotz\""));
        assert!(text.contains("\"H0\""));
        let back: CaraFunctionJson = serde_json::from_str(&text).unwrap();
        let g = back.to_function(1e-10).unwrap();
        let l = C64::new(0.3, -0.4);
        let fv = f.eval(l, 1e-10).unwrap();
        let gv = g.eval(l, 1e-10).unwrap();
        assert!(opnorm(&(&fv.value - &gv.value)) < 1e-12);
    }

    #[test]
    fn grid_roundtrip() {
        let g = DiscGrid::standard(4, 8, 1e-2).unwrap();
        let j = GridJson::from_grid(&g);
        let text = serde_json::to_string(&j).unwrap();
        let back: GridJson = serde_json::from_str(&text).unwrap();
        let g2 = back.to_grid().unwrap();
        assert_eq!(g.points(), g2.points());
    }
}
