//! Positive real matrices and the decision procedures for the pre-order
//! `A ≺ B` and the equivalence `A ~ B`, with witness extraction, the
//! Douglas-style factorization behind them, and seeded random instance
//! generators for property testing.

use num_complex::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::linalg::{
    self, czero, eigmin_herm, herm_part, opnorm, psd_pinv_sqrt, psd_sqrt, range_included,
    scaled_tol, skew_part, symmetrize, CMatrix, SupportBasis, ABS_FLOOR,
};

/// Default strictness margin, relative to the norm of the matrix.
pub const STRICT_RHO_REL: f64 = 1e-8;

/// A validated positive real matrix with its cached spectral data.
///
/// `re_sqrt` and `re_pinv_sqrt` are the PSD square root of the Hermitian
/// part and its pseudo-inverse; `support` spans the range of `Re(A)` and is
/// the coordinate system in which every witness lives.
#[derive(Debug, Clone)]
pub struct PRMatrix {
    pub value: CMatrix,
    pub re_part: CMatrix,
    pub im_part: CMatrix,
    pub re_sqrt: CMatrix,
    pub re_pinv_sqrt: CMatrix,
    pub support: SupportBasis,
    pub im_support: SupportBasis,
    /// Smallest eigenvalue of `Re(A)`.
    pub pr_margin: f64,
    /// True when `pr_margin >= STRICT_RHO_REL * ||A||`, i.e. membership in
    /// the strictly positive real class.
    pub strict: bool,
}

impl PRMatrix {
    pub fn dim(&self) -> usize {
        self.value.nrows()
    }

    pub fn norm(&self) -> f64 {
        opnorm(&self.value)
    }
}

/// Validates `A` as positive real and caches the spectral data.
pub fn make_pr(a: &CMatrix, tol: f64) -> Result<PRMatrix> {
    linalg::check_finite(a)?;
    let re_part = herm_part(a)?;
    let im_part = skew_part(a)?;
    let pr_margin = eigmin_herm(&re_part)?;
    let norm_a = opnorm(a);
    if pr_margin < -scaled_tol(tol, norm_a) {
        return Err(Error::NotPositiveReal { eigmin: pr_margin });
    }
    let (re_sqrt, support) = psd_sqrt(&re_part, tol)?;
    let re_pinv_sqrt = psd_pinv_sqrt(&re_part, tol)?;
    // Im(A) is Hermitian but in general indefinite; its support is the
    // range of Im(A), obtained from the square.
    let im_sq = symmetrize(&(&im_part * &im_part));
    let (_, im_support) = psd_sqrt(&im_sq, tol)?;
    let strict = pr_margin >= STRICT_RHO_REL * norm_a.max(ABS_FLOOR);
    Ok(PRMatrix {
        value: a.clone(),
        re_part,
        im_part,
        re_sqrt,
        re_pinv_sqrt,
        support,
        im_support,
        pr_margin,
        strict,
    })
}

/// Witness for `A ≺ B`: the operator `X` with
/// `A - B = Re(B)^{1/2} X Re(B)^{1/2}`, its companion `Y = X* + 2I`, and
/// the admissible disc radius `r = 1/||X||`.
///
/// `x` and `y` are stored in the orthonormal coordinates of the support
/// basis of `Re(B)`, not as ambient matrices.
#[derive(Debug, Clone)]
pub struct PrecWitness {
    pub x: CMatrix,
    pub y: CMatrix,
    /// `1/||X||`, `+inf` when `X = 0`.
    pub r: f64,
    /// Reconstruction residual `||(A-B) - Re(B)^{1/2} X Re(B)^{1/2}||`.
    pub residual: f64,
    /// Support basis of `Re(B)` in which `x` and `y` are expressed.
    pub basis: CMatrix,
}

impl PrecWitness {
    pub fn x_norm(&self) -> f64 {
        opnorm(&self.x)
    }

    /// Ambient-dimension form of `x`.
    pub fn x_ambient(&self) -> CMatrix {
        &self.basis * &self.x * self.basis.adjoint()
    }
}

/// Decides `A ≺ B` by explicit compression: computes
/// `X = Re(B)^{+1/2} (A-B) Re(B)^{+1/2}` restricted to the support of
/// `Re(B)` and accepts iff the reconstruction residual is below
/// `tol * (||A|| + ||B||)`. This residual test is the single source of
/// truth; failure means the defining equation has no solution supported on
/// the range of `Re(B)`.
pub fn prec_check(a: &PRMatrix, b: &PRMatrix, tol: f64) -> Result<PrecWitness> {
    if a.dim() != b.dim() {
        return Err(Error::DimMismatch {
            left: format!("dim {}", a.dim()),
            right: format!("dim {}", b.dim()),
        });
    }
    let diff = &a.value - &b.value;
    let scale = a.norm() + b.norm();
    let res_tol = scaled_tol(tol, scale);
    let x0 = &b.re_pinv_sqrt * &diff * &b.re_pinv_sqrt;
    let x = b.support.compress(&x0);
    let recon = &b.re_sqrt * b.support.embed(&x) * &b.re_sqrt;
    let residual = opnorm(&(&diff - recon));
    if residual > res_tol {
        return Err(Error::NotComparable {
            residual,
            tol: res_tol,
        });
    }
    let k = b.support.rank;
    let y = x.adjoint() + CMatrix::identity(k, k) * Complex::new(2.0, 0.0);
    let xn = opnorm(&x);
    let r = if xn <= ABS_FLOOR { f64::INFINITY } else { 1.0 / xn };
    Ok(PrecWitness {
        x,
        y,
        r,
        residual,
        basis: b.support.basis.clone(),
    })
}

/// Measurement report for the ε-disc characterization of the pre-order.
#[derive(Debug, Clone)]
pub struct EpsReport {
    pub radius: f64,
    pub samples: usize,
    /// Minimum over the sampled circle of `eigmin(Re(B + eps (A-B)))`.
    pub min_margin: f64,
    /// The sample where the minimum was attained.
    pub argmin: Complex<f64>,
}

/// Samples `eps` equispaced on the circle `|eps| = r` and measures the
/// worst positivity margin of `B + eps (A - B)`. Used as an independent
/// oracle for [`prec_check`]: the contract is measurement, not decision.
pub fn prec_check_eps(a: &PRMatrix, b: &PRMatrix, r: f64, n_samples: usize) -> Result<EpsReport> {
    if a.dim() != b.dim() {
        return Err(Error::DimMismatch {
            left: format!("dim {}", a.dim()),
            right: format!("dim {}", b.dim()),
        });
    }
    if r <= 0.0 || n_samples == 0 {
        return Err(Error::InvalidArgument(
            "prec_check_eps requires r > 0 and n_samples >= 1".into(),
        ));
    }
    let diff = &a.value - &b.value;
    let mut min_margin = f64::INFINITY;
    let mut argmin = czero();
    for k in 0..n_samples {
        let theta = 2.0 * std::f64::consts::PI * (k as f64) / (n_samples as f64);
        let eps = Complex::from_polar(r, theta);
        let shifted = &b.value + &diff * eps;
        let margin = eigmin_herm(&herm_part(&shifted)?)?;
        if margin < min_margin {
            min_margin = margin;
            argmin = eps;
        }
    }
    Ok(EpsReport {
        radius: r,
        samples: n_samples,
        min_margin,
        argmin,
    })
}

/// Witness for `A ~ B`: the mixed factorization operators together with
/// the invertible Douglas factor `M` linking the two square roots and the
/// one-sided witnesses in both directions.
#[derive(Debug, Clone)]
pub struct EquivWitness {
    /// `Xt` with `A - B = Re(A)^{1/2} Xt Re(B)^{1/2}`, coordinates mapping
    /// the support of `Re(B)` into the support of `Re(A)`.
    pub xt: CMatrix,
    /// `Yt` with `A* + B = Re(A)^{1/2} Yt Re(B)^{1/2}`.
    pub yt: CMatrix,
    /// Invertible `M` with `Re(A)^{1/2} = M Re(B)^{1/2}`.
    pub m: CMatrix,
    pub m_inv: CMatrix,
    pub forward: PrecWitness,
    pub backward: PrecWitness,
    pub basis_a: CMatrix,
    pub basis_b: CMatrix,
}

impl EquivWitness {
    pub fn xt_norm(&self) -> f64 {
        opnorm(&self.xt)
    }

    pub fn xt_ambient(&self) -> CMatrix {
        &self.basis_a * &self.xt * self.basis_b.adjoint()
    }

    pub fn yt_ambient(&self) -> CMatrix {
        &self.basis_a * &self.yt * self.basis_b.adjoint()
    }
}

/// Decides `A ~ B` by running [`prec_check`] in both directions and
/// extracting the invertible factor `M = Re(A)^{1/2} Re(B)^{+1/2}`
/// restricted to the supports. All witness identities are re-verified.
pub fn equiv_check(a: &PRMatrix, b: &PRMatrix, tol: f64) -> Result<EquivWitness> {
    let forward = prec_check(a, b, tol).map_err(|e| Error::NotEquivalent {
        direction: "forward",
        source: Box::new(e),
    })?;
    let backward = prec_check(b, a, tol).map_err(|e| Error::NotEquivalent {
        direction: "backward",
        source: Box::new(e),
    })?;
    let scale = a.norm() + b.norm() + 1.0;
    let check_tol = scaled_tol(tol, scale);

    if a.support.rank != b.support.rank {
        return Err(Error::NotEquivalent {
            direction: "support",
            source: Box::new(Error::DimMismatch {
                left: format!("rank {}", a.support.rank),
                right: format!("rank {}", b.support.rank),
            }),
        });
    }
    let m_amb = &a.re_sqrt * &b.re_pinv_sqrt;
    let m = a.support.basis.adjoint() * &m_amb * &b.support.basis;
    let cond_m = linalg::cond(&m);
    if !cond_m.is_finite() || cond_m >= 1.0 / tol.max(ABS_FLOOR) {
        return Err(Error::NotEquivalent {
            direction: "factor",
            source: Box::new(Error::Singular { cond: cond_m }),
        });
    }
    let m_inv = m
        .clone()
        .try_inverse()
        .ok_or(Error::Singular { cond: cond_m })?;
    let m_inv_adj = m_inv.adjoint();
    let xt = &m_inv_adj * &forward.x;
    let yt = &m_inv_adj * &forward.y;

    // (Xt + Yt) Re(B)^{1/2} = 2 Re(A)^{1/2}
    let sum_amb = &a.support.basis * (&xt + &yt) * b.support.basis.adjoint();
    let lhs = &sum_amb * &b.re_sqrt;
    let rhs = &a.re_sqrt * Complex::new(2.0, 0.0);
    let id_res = opnorm(&(lhs - rhs));
    if id_res > check_tol {
        return Err(Error::InvalidWitness {
            reason: "mixed-factorization identity failed",
            residual: id_res,
        });
    }
    // Re(A)^{1/2} = M Re(B)^{1/2}
    let m_emb = &a.support.basis * &m * b.support.basis.adjoint();
    let fac_res = opnorm(&(&a.re_sqrt - &m_emb * &b.re_sqrt));
    if fac_res > check_tol {
        return Err(Error::InvalidWitness {
            reason: "Douglas factor identity failed",
            residual: fac_res,
        });
    }
    // M^{-*} M^{-1} = (X' + Y')/2 from the reverse direction
    let half_back = (&backward.x + &backward.y) * Complex::new(0.5, 0.0);
    let gram_res = opnorm(&(&m_inv_adj * &m_inv - half_back));
    if gram_res > scaled_tol(tol, scale * cond_m * cond_m) {
        return Err(Error::InvalidWitness {
            reason: "inverse Gram identity failed",
            residual: gram_res,
        });
    }

    Ok(EquivWitness {
        xt,
        yt,
        m,
        m_inv,
        forward,
        backward,
        basis_a: a.support.basis.clone(),
        basis_b: b.support.basis.clone(),
    })
}

/// Extracts the Douglas factor `M` (support of `Re(B)` to support of
/// `Re(A)`) for a certified witness pair `(X, Y)` of `A ≺ B`, and verifies
/// `M* M = (X + Y)/2` and `Re(A)^{1/2} = M Re(B)^{1/2}`.
pub fn douglas_factor(
    a: &PRMatrix,
    b: &PRMatrix,
    x: &CMatrix,
    y: &CMatrix,
    tol: f64,
) -> Result<CMatrix> {
    let k = b.support.rank;
    if x.nrows() != k || x.ncols() != k || y.nrows() != k || y.ncols() != k {
        return Err(Error::DimMismatch {
            left: format!("witness {}x{}", x.nrows(), x.ncols()),
            right: format!("support rank {k}"),
        });
    }
    let scale = a.norm() + b.norm() + 1.0;
    let check_tol = scaled_tol(tol, scale);
    // recheck the witness before factoring
    let recon = &b.re_sqrt * b.support.embed(x) * &b.re_sqrt;
    let residual = opnorm(&(&a.value - &b.value - recon));
    if residual > check_tol {
        return Err(Error::InvalidWitness {
            reason: "reconstruction residual recheck failed",
            residual,
        });
    }
    let pair_res = opnorm(&(y - x.adjoint() - CMatrix::identity(k, k) * Complex::new(2.0, 0.0)));
    if pair_res > check_tol {
        return Err(Error::InvalidWitness {
            reason: "Y - X* = 2I failed",
            residual: pair_res,
        });
    }
    let m = a.support.basis.adjoint() * &a.re_sqrt * &b.re_pinv_sqrt * &b.support.basis;
    let gram = m.adjoint() * &m;
    let half_sum = (x + y) * Complex::new(0.5, 0.0);
    let gram_res = opnorm(&(gram - half_sum));
    if gram_res > check_tol {
        return Err(Error::InvalidWitness {
            reason: "M*M = (X+Y)/2 failed",
            residual: gram_res,
        });
    }
    let m_emb = &a.support.basis * &m * b.support.basis.adjoint();
    let fac_res = opnorm(&(&a.re_sqrt - &m_emb * &b.re_sqrt));
    if fac_res > check_tol {
        return Err(Error::InvalidWitness {
            reason: "Re(A)^{1/2} = M Re(B)^{1/2} failed",
            residual: fac_res,
        });
    }
    Ok(m)
}

/// Outcome of the four derived consequences of `A ≺ B`.
#[derive(Debug, Clone)]
pub struct DerivedPropsReport {
    /// `A* ≺ B*`
    pub adjoint_ok: bool,
    /// `Ran Re(A)` contained in `Ran Re(B)`
    pub range_ok: bool,
    /// `A` and `B` agree on the orthogonal complement of the support of
    /// `Re(B)`, and `Re(A)` vanishes there.
    pub perp_agree_ok: bool,
    /// `C*AC ≺ C*BC`
    pub congruence_ok: bool,
    pub failures: Vec<String>,
}

impl DerivedPropsReport {
    pub fn all_ok(&self) -> bool {
        self.adjoint_ok && self.range_ok && self.perp_agree_ok && self.congruence_ok
    }
}

/// Checks the four consequences of a certified `A ≺ B` against a congruence
/// factor `C` (possibly rectangular, mapping a smaller space into the
/// ambient one).
pub fn derived_props_check(
    a: &PRMatrix,
    b: &PRMatrix,
    c: &CMatrix,
    tol: f64,
) -> Result<DerivedPropsReport> {
    // the relation itself must hold
    prec_check(a, b, tol)?;
    let mut failures = Vec::new();

    let a_adj = make_pr(&a.value.adjoint(), tol)?;
    let b_adj = make_pr(&b.value.adjoint(), tol)?;
    let adjoint_ok = prec_check(&a_adj, &b_adj, tol).is_ok();
    if !adjoint_ok {
        failures.push("adjoint relation A* < B* failed".into());
    }

    let range_ok = range_included(&a.re_part, &b.re_part, tol)?;
    if !range_ok {
        failures.push("range inclusion Ran Re(A) in Ran Re(B) failed".into());
    }

    let scale = a.norm() + b.norm() + 1.0;
    let check_tol = scaled_tol(tol, scale);
    let perp = b.support.complement();
    let diff_leak = opnorm(&((&a.value - &b.value) * &perp));
    let re_leak = opnorm(&((&a.value + a.value.adjoint()) * &perp));
    let perp_agree_ok = diff_leak <= check_tol && re_leak <= check_tol;
    if !perp_agree_ok {
        failures.push(format!(
            "restriction to the complement of the support of Re(B) failed: \
             diff leak {diff_leak:.3e}, Re leak {re_leak:.3e}"
        ));
    }

    let congruence_ok = if c.nrows() != a.dim() {
        failures.push("congruence factor has wrong row count".into());
        false
    } else {
        let ca = make_pr(&(c.adjoint() * &a.value * c), tol)?;
        let cb = make_pr(&(c.adjoint() * &b.value * c), tol)?;
        let ok = prec_check(&ca, &cb, tol).is_ok();
        if !ok {
            failures.push("congruence relation C*AC < C*BC failed".into());
        }
        ok
    };

    Ok(DerivedPropsReport {
        adjoint_ok,
        range_ok,
        perp_agree_ok,
        congruence_ok,
        failures,
    })
}

pub fn seeded_rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

#[cfg(test)]
pub fn test_rng(seed: u64) -> ChaCha8Rng {
    seeded_rng(seed)
}

fn complex_gaussian(rng: &mut impl Rng) -> Complex<f64> {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

pub fn random_gaussian_matrix(rng: &mut impl Rng, rows: usize, cols: usize) -> CMatrix {
    CMatrix::from_fn(rows, cols, |_, _| complex_gaussian(rng))
}

pub fn random_hermitian(rng: &mut impl Rng, n: usize) -> CMatrix {
    let g = random_gaussian_matrix(rng, n, n);
    symmetrize(&g)
}

/// Gaussian factor with singular values clamped into `[0.3, 1.7]` so that
/// witness extraction through `Re^{+1/2}` stays well-conditioned on the
/// support.
fn conditioned_factor(rng: &mut impl Rng, rows: usize, cols: usize) -> CMatrix {
    let g = random_gaussian_matrix(rng, rows, cols);
    if rows == 0 {
        return g;
    }
    let svd = g.svd(true, true);
    let u = svd.u.unwrap();
    let vt = svd.v_t.unwrap();
    let k = svd.singular_values.len();
    let mut s = CMatrix::zeros(k, k);
    for i in 0..k {
        s[(i, i)] = Complex::new(svd.singular_values[i].clamp(0.3, 1.7), 0.0);
    }
    u * s * vt
}

/// Samples a positive real matrix `G*G + iH` with `rank(Re) = re_rank`,
/// deterministically per seed.
pub fn sample_pr(n: usize, re_rank: usize, seed: u64) -> Result<PRMatrix> {
    if re_rank > n {
        return Err(Error::InvalidArgument(format!(
            "re_rank {re_rank} exceeds dimension {n}"
        )));
    }
    let mut rng = seeded_rng(seed);
    let re = if re_rank == 0 {
        CMatrix::zeros(n, n)
    } else {
        let g = conditioned_factor(&mut rng, re_rank, n);
        symmetrize(&(g.adjoint() * &g))
    };
    let h = random_hermitian(&mut rng, n);
    let a = re + h * Complex::new(0.0, 1.0);
    make_pr(&a, 1e-10)
}

/// Samples a pair `A ≺ B` from a given `B` with ground-truth witness:
/// `A = B + Re(B)^{1/2} X Re(B)^{1/2}` where `X = H1 + i H2` lives on the
/// support of `Re(B)` and `||H1|| <= re_x_bound < 1`, which keeps `A`
/// positive real by construction.
pub fn sample_prec_pair(
    b: &PRMatrix,
    re_x_bound: f64,
    seed: u64,
) -> Result<(PRMatrix, CMatrix)> {
    if !(0.0..1.0).contains(&re_x_bound) {
        return Err(Error::InvalidArgument(format!(
            "re_x_bound must be in [0, 1), got {re_x_bound}"
        )));
    }
    let mut rng = seeded_rng(seed);
    let k = b.support.rank;
    let h1 = {
        let h = random_hermitian(&mut rng, k);
        let norm = opnorm(&h);
        if norm <= ABS_FLOOR || re_x_bound == 0.0 {
            CMatrix::zeros(k, k)
        } else {
            h * Complex::new(re_x_bound / norm, 0.0)
        }
    };
    let h2 = {
        let h = random_hermitian(&mut rng, k);
        let norm = opnorm(&h);
        if norm <= ABS_FLOOR {
            h
        } else {
            h * Complex::new(0.8 / norm, 0.0)
        }
    };
    let x = &h1 + &h2 * Complex::new(0.0, 1.0);
    let x_amb = b.support.embed(&x);
    let a_val = &b.value + &b.re_sqrt * x_amb * &b.re_sqrt;
    let a = make_pr(&a_val, 1e-10)?;
    Ok((a, x))
}
