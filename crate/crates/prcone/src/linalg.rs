//! Dense complex matrix kernel: Hermitian spectral decompositions, PSD
//! functional calculus with a numerical rank tolerance, range bases, norms
//! and solves. Everything downstream is built on these primitives.

use nalgebra::DMatrix;
use num_complex::Complex;

use crate::error::{Error, Result};
use crate::C64;

/// Dense complex matrix, the universal numeric carrier.
pub type CMatrix = DMatrix<C64>;

/// Absolute floor under every relative tolerance.
pub const ABS_FLOOR: f64 = 1e-14;

/// Safety factor in the default numerical-rank rule.
pub const RANK_SAFETY: f64 = 64.0;

pub fn czero() -> C64 {
    Complex::new(0.0, 0.0)
}

pub fn cone() -> C64 {
    Complex::new(1.0, 0.0)
}

/// Relative tolerance scaled by `scale`, floored at [`ABS_FLOOR`].
pub fn scaled_tol(tol: f64, scale: f64) -> f64 {
    (tol * scale).max(ABS_FLOOR)
}

/// Default eigenvalue threshold below which a PSD matrix is treated as
/// rank-deficient: `n * eps * lambda_max * RANK_SAFETY`.
pub fn default_rank_tol(n: usize, lambda_max: f64) -> f64 {
    (n as f64 * f64::EPSILON * lambda_max * RANK_SAFETY).max(ABS_FLOOR)
}

fn check_square(a: &CMatrix) -> Result<()> {
    if a.nrows() != a.ncols() {
        return Err(Error::NonSquare {
            rows: a.nrows(),
            cols: a.ncols(),
        });
    }
    Ok(())
}

/// Errors if any entry is NaN or infinite.
pub fn check_finite(a: &CMatrix) -> Result<()> {
    for col in 0..a.ncols() {
        for row in 0..a.nrows() {
            let v = a[(row, col)];
            if !v.re.is_finite() || !v.im.is_finite() {
                return Err(Error::NonFinite { row, col });
            }
        }
    }
    Ok(())
}

/// Hermitian part `Re(A) = (A + A*)/2`, symmetrized exactly.
pub fn herm_part(a: &CMatrix) -> Result<CMatrix> {
    check_square(a)?;
    let m = (a + a.adjoint()) * Complex::new(0.5, 0.0);
    Ok(symmetrize(&m))
}

/// Skew part `Im(A) = (A - A*)/(2i)`, a Hermitian matrix.
pub fn skew_part(a: &CMatrix) -> Result<CMatrix> {
    check_square(a)?;
    let m = (a - a.adjoint()) * Complex::new(0.0, -0.5);
    Ok(symmetrize(&m))
}

/// Averages a nearly-Hermitian matrix with its adjoint so downstream
/// eigendecompositions see exact Hermitian symmetry.
pub fn symmetrize(a: &CMatrix) -> CMatrix {
    (a + a.adjoint()) * Complex::new(0.5, 0.0)
}

/// Spectral decomposition of a Hermitian matrix with eigenvalues sorted
/// in descending order.
#[derive(Debug, Clone)]
pub struct HermEig {
    /// Real eigenvalues, descending.
    pub eigenvalues: Vec<f64>,
    /// Unitary matrix whose columns are the matching eigenvectors.
    pub eigenvectors: CMatrix,
    /// Spectral norm of the decomposed matrix.
    pub source_norm: f64,
}

/// Eigendecomposition of a Hermitian input. The input is symmetrized first.
pub fn herm_eig(a: &CMatrix) -> Result<HermEig> {
    check_square(a)?;
    check_finite(a)?;
    let h = symmetrize(a);
    let se = h.symmetric_eigen();
    let n = se.eigenvalues.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| se.eigenvalues[j].partial_cmp(&se.eigenvalues[i]).unwrap());
    let eigenvalues: Vec<f64> = order.iter().map(|&i| se.eigenvalues[i]).collect();
    let mut eigenvectors = CMatrix::zeros(n, n);
    for (k, &i) in order.iter().enumerate() {
        eigenvectors.set_column(k, &se.eigenvectors.column(i));
    }
    let source_norm = eigenvalues
        .iter()
        .fold(0.0f64, |acc, &l| acc.max(l.abs()));
    Ok(HermEig {
        eigenvalues,
        eigenvectors,
        source_norm,
    })
}

/// Orthonormal basis of a support subspace, together with the rank and the
/// threshold that decided it.
#[derive(Debug, Clone)]
pub struct SupportBasis {
    pub ambient_dim: usize,
    /// `ambient_dim x rank` matrix with orthonormal columns.
    pub basis: CMatrix,
    pub rank: usize,
    pub tol_used: f64,
}

impl SupportBasis {
    /// Orthogonal projection onto the spanned subspace.
    pub fn projection(&self) -> CMatrix {
        &self.basis * self.basis.adjoint()
    }

    /// Compresses an ambient operator to coordinates on the basis.
    pub fn compress(&self, a: &CMatrix) -> CMatrix {
        self.basis.adjoint() * a * &self.basis
    }

    /// Embeds an operator given in basis coordinates back into ambient form.
    pub fn embed(&self, x: &CMatrix) -> CMatrix {
        &self.basis * x * self.basis.adjoint()
    }

    /// Orthonormal basis of the orthogonal complement.
    pub fn complement(&self) -> CMatrix {
        let n = self.ambient_dim;
        let perp = CMatrix::identity(n, n) - self.projection();
        // eigenvectors of the complementary projection with eigenvalue ~1
        let eig = herm_eig(&perp).expect("projection is square and finite");
        let k = n - self.rank;
        let mut out = CMatrix::zeros(n, k);
        for j in 0..k {
            out.set_column(j, &eig.eigenvectors.column(j));
        }
        out
    }
}

/// PSD square root with rank clipping. Eigenvalues below `rank_tol` are
/// zeroed; the support basis spans the eigenvectors that survive.
///
/// Fails with [`Error::NotPsd`] when an eigenvalue drops below
/// `-tol * ||P||`.
pub fn psd_sqrt(p: &CMatrix, tol: f64) -> Result<(CMatrix, SupportBasis)> {
    let eig = herm_eig(p)?;
    psd_sqrt_from_eig(&eig, tol, None)
}

/// Same as [`psd_sqrt`] but with an explicit rank threshold.
pub fn psd_sqrt_with_rank_tol(
    p: &CMatrix,
    tol: f64,
    rank_tol: f64,
) -> Result<(CMatrix, SupportBasis)> {
    let eig = herm_eig(p)?;
    psd_sqrt_from_eig(&eig, tol, Some(rank_tol))
}

fn psd_sqrt_from_eig(
    eig: &HermEig,
    tol: f64,
    rank_tol: Option<f64>,
) -> Result<(CMatrix, SupportBasis)> {
    let n = eig.eigenvalues.len();
    let neg_tol = scaled_tol(tol, eig.source_norm);
    if let Some(&lmin) = eig.eigenvalues.last() {
        if lmin < -neg_tol {
            return Err(Error::NotPsd { eigmin: lmin });
        }
    }
    let lmax = eig.eigenvalues.first().copied().unwrap_or(0.0).max(0.0);
    let thr = rank_tol.unwrap_or_else(|| default_rank_tol(n, lmax));
    let rank = eig.eigenvalues.iter().filter(|&&l| l > thr).count();
    let mut s = CMatrix::zeros(n, n);
    let mut basis = CMatrix::zeros(n, rank);
    for k in 0..rank {
        let sqrt_l = eig.eigenvalues[k].sqrt();
        let v = eig.eigenvectors.column(k);
        s += (&v * v.adjoint()) * Complex::new(sqrt_l, 0.0);
        basis.set_column(k, &v);
    }
    let s = symmetrize(&s);
    Ok((
        s,
        SupportBasis {
            ambient_dim: n,
            basis,
            rank,
            tol_used: thr,
        },
    ))
}

/// Moore-Penrose pseudo-inverse of the PSD square root: `S+` with
/// `S+ S = S S+ = projection onto the support`.
pub fn psd_pinv_sqrt(p: &CMatrix, tol: f64) -> Result<CMatrix> {
    let eig = herm_eig(p)?;
    let neg_tol = scaled_tol(tol, eig.source_norm);
    if let Some(&lmin) = eig.eigenvalues.last() {
        if lmin < -neg_tol {
            return Err(Error::NotPsd { eigmin: lmin });
        }
    }
    let n = eig.eigenvalues.len();
    let lmax = eig.eigenvalues.first().copied().unwrap_or(0.0).max(0.0);
    let thr = default_rank_tol(n, lmax);
    let mut s = CMatrix::zeros(n, n);
    for k in 0..n {
        let l = eig.eigenvalues[k];
        if l > thr {
            let v = eig.eigenvectors.column(k);
            s += (&v * v.adjoint()) * Complex::new(1.0 / l.sqrt(), 0.0);
        }
    }
    Ok(symmetrize(&s))
}

/// True iff `Ran A` is contained in `Ran B` up to `tol`, decided by
/// projecting `A` onto the orthogonal complement of `Ran B`.
pub fn range_included(a: &CMatrix, b: &CMatrix, tol: f64) -> Result<bool> {
    if a.nrows() != b.nrows() {
        return Err(Error::DimMismatch {
            left: format!("{} rows", a.nrows()),
            right: format!("{} rows", b.nrows()),
        });
    }
    let norm_a = opnorm(a);
    if norm_a <= ABS_FLOOR {
        return Ok(true);
    }
    let pi_b = range_projection(b);
    let n = a.nrows();
    let leak = (CMatrix::identity(n, n) - pi_b) * a;
    Ok(opnorm(&leak) <= scaled_tol(tol, norm_a))
}

/// Orthogonal projection onto the column space of `b` (numerical rank via
/// the default threshold on singular values).
pub fn range_projection(b: &CMatrix) -> CMatrix {
    let n = b.nrows();
    let svd = b.clone().svd(true, false);
    let u = svd.u.as_ref().expect("requested U");
    let smax = svd
        .singular_values
        .iter()
        .fold(0.0f64, |acc, &s| acc.max(s));
    let thr = default_rank_tol(n.max(b.ncols()), smax);
    let mut pi = CMatrix::zeros(n, n);
    for (k, &s) in svd.singular_values.iter().enumerate() {
        if s > thr {
            let col = u.column(k);
            pi += &col * col.adjoint();
        }
    }
    pi
}

/// Spectral (largest singular value) norm.
pub fn opnorm(a: &CMatrix) -> f64 {
    if a.nrows() == 0 || a.ncols() == 0 {
        return 0.0;
    }
    let svd = a.clone().svd(false, false);
    svd.singular_values
        .iter()
        .fold(0.0f64, |acc, &s| acc.max(s))
}

/// Smallest eigenvalue of a Hermitian input.
pub fn eigmin_herm(a: &CMatrix) -> Result<f64> {
    let eig = herm_eig(a)?;
    Ok(eig.eigenvalues.last().copied().unwrap_or(0.0))
}

/// Largest eigenvalue of a Hermitian input.
pub fn eigmax_herm(a: &CMatrix) -> Result<f64> {
    let eig = herm_eig(a)?;
    Ok(eig.eigenvalues.first().copied().unwrap_or(0.0))
}

/// Spectral condition number; `+inf` when numerically singular.
pub fn cond(a: &CMatrix) -> f64 {
    if a.nrows() == 0 {
        return 1.0;
    }
    let svd = a.clone().svd(false, false);
    let smax = svd
        .singular_values
        .iter()
        .fold(0.0f64, |acc, &s| acc.max(s));
    let smin = svd
        .singular_values
        .iter()
        .fold(f64::INFINITY, |acc, &s| acc.min(s));
    if smin <= 0.0 {
        f64::INFINITY
    } else {
        smax / smin
    }
}

/// Solves `A X = B`, failing when `cond(A) >= 1/tol`.
pub fn solve(a: &CMatrix, b: &CMatrix, tol: f64) -> Result<CMatrix> {
    check_square(a)?;
    let k = cond(a);
    if !k.is_finite() || k >= 1.0 / tol.max(ABS_FLOOR) {
        return Err(Error::Singular { cond: k });
    }
    a.clone()
        .lu()
        .solve(b)
        .ok_or(Error::Singular { cond: k })
}

/// Inverse with the same conditioning guard as [`solve`].
pub fn inv(a: &CMatrix, tol: f64) -> Result<CMatrix> {
    let n = a.nrows();
    solve(a, &CMatrix::identity(n, n), tol)
}
