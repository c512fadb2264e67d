use nalgebra::DMatrix;

use super::RandomStream;
use crate::{Error, Result};

const ORTHO_TOL: f64 = 1e-10;

/// Square matrix with `M Mᵀ = I`. Vectors are treated as rows: a rotation
/// maps `x` to `x M`.
#[derive(Clone, Debug, PartialEq)]
pub struct OrthogonalMatrix {
    m: DMatrix<f64>,
}

impl OrthogonalMatrix {
    pub fn identity(dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidDimension(0));
        }
        Ok(Self {
            m: DMatrix::identity(dim, dim),
        })
    }

    /// Wraps `m` after checking `M Mᵀ = I` within 1e-10 per entry.
    pub fn from_matrix(m: DMatrix<f64>) -> Result<Self> {
        if m.nrows() == 0 || m.nrows() != m.ncols() {
            return Err(Error::InvalidDimension(m.nrows()));
        }
        let out = Self { m };
        let err = out.orthogonality_error();
        if !(err <= ORTHO_TOL) {
            return Err(Error::DegenerateInput(format!(
                "matrix is not orthogonal (max |M Mᵀ - I| = {err:e})"
            )));
        }
        Ok(out)
    }

    /// 2×2 rotation by `angle` radians (row-vector convention).
    pub fn rotation_2d(angle: f64) -> Self {
        let (s, c) = angle.sin_cos();
        Self {
            m: DMatrix::from_row_slice(2, 2, &[c, s, -s, c]),
        }
    }

    pub fn dim(&self) -> usize {
        self.m.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.m
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.m[(row, col)]
    }

    pub fn transpose(&self) -> Self {
        Self {
            m: self.m.transpose(),
        }
    }

    /// `x M` for a row vector `x`.
    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        let d = self.dim();
        assert_eq!(x.len(), d, "vector length must match matrix dimension");
        (0..d)
            .map(|j| (0..d).map(|i| x[i] * self.m[(i, j)]).sum())
            .collect()
    }

    /// `x Mᵀ`, the inverse rotation.
    pub fn apply_inverse(&self, x: &[f64]) -> Vec<f64> {
        let d = self.dim();
        assert_eq!(x.len(), d, "vector length must match matrix dimension");
        (0..d)
            .map(|j| (0..d).map(|i| x[i] * self.m[(j, i)]).sum())
            .collect()
    }

    /// Largest entry of `|M Mᵀ - I|`.
    pub fn orthogonality_error(&self) -> f64 {
        let d = self.dim();
        let prod = &self.m * self.m.transpose();
        let mut worst = 0.0f64;
        for i in 0..d {
            for j in 0..d {
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((prod[(i, j)] - target).abs());
            }
        }
        worst
    }

    pub fn determinant(&self) -> f64 {
        self.m.clone().determinant()
    }
}

/// Random orthogonal matrix, approximately Haar distributed.
///
/// Fills a `dim × dim` matrix with standard Gaussian draws (row-major,
/// `dim²` draws), takes its QR factorization and flips each column of `Q`
/// by the sign of the matching diagonal entry of `R`.
pub fn random_orthogonal(dim: usize, stream: &mut RandomStream) -> Result<OrthogonalMatrix> {
    if dim == 0 {
        return Err(Error::InvalidDimension(0));
    }
    let mut entries = Vec::with_capacity(dim * dim);
    for _ in 0..dim * dim {
        entries.push(stream.gaussian());
    }
    let a = DMatrix::from_row_slice(dim, dim, &entries);
    let qr = a.qr();
    let mut q = qr.q();
    let r = qr.r();
    for j in 0..dim {
        if r[(j, j)] < 0.0 {
            q.column_mut(j).neg_mut();
        }
    }
    Ok(OrthogonalMatrix { m: q })
}
