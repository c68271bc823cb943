//! J-contractive 2x2-block matrices, the linear fractional transformation
//! `T_W[A] = (W11 A + W12)(W21 A + W22)^{-1}` in both of its
//! representations, and the explicit witness push-forwards realizing the
//! invariance of the pre-order and the equivalence relation under `T_W`.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::linalg::{
    self, eigmax_herm, eigmin_herm, herm_part, opnorm, scaled_tol, symmetrize, CMatrix, ABS_FLOOR,
};
use crate::pr::{self, make_pr, PRMatrix};

/// The signature matrices `J = [[0, -I], [-I, 0]]` and
/// `Jhat = [[I, 0], [0, -I]]` on a doubled space.
#[derive(Debug, Clone)]
pub struct SignaturePair {
    pub n: usize,
    pub j: CMatrix,
    pub jhat: CMatrix,
}

impl SignaturePair {
    pub fn new(n: usize) -> Self {
        let mut j = CMatrix::zeros(2 * n, 2 * n);
        let mut jhat = CMatrix::zeros(2 * n, 2 * n);
        for i in 0..n {
            j[(i, n + i)] = Complex::new(-1.0, 0.0);
            j[(n + i, i)] = Complex::new(-1.0, 0.0);
            jhat[(i, i)] = Complex::new(1.0, 0.0);
            jhat[(n + i, n + i)] = Complex::new(-1.0, 0.0);
        }
        SignaturePair { n, j, jhat }
    }
}

/// Extracts the `n x n` block at block position `(bi, bj)` of a `2n x 2n`
/// matrix.
pub fn block(w: &CMatrix, n: usize, bi: usize, bj: usize) -> CMatrix {
    w.view((bi * n, bj * n), (n, n)).into_owned()
}

/// A validated J-contractive block matrix `W` with its cached swapped
/// inverse `Wt = Jhat W^{-1} Jhat` (when `W` is invertible).
#[derive(Debug, Clone)]
pub struct JContractiveW {
    pub n: usize,
    pub w: CMatrix,
    pub w11: CMatrix,
    pub w12: CMatrix,
    pub w21: CMatrix,
    pub w22: CMatrix,
    /// `eigmin(J - W*JW)`; nonnegative up to tolerance.
    pub contractivity_margin: f64,
    pub invertible: bool,
    pub cond_w: f64,
    /// `Jhat W^{-1} Jhat`, present when `W` is invertible.
    pub wt: Option<CMatrix>,
}

impl JContractiveW {
    pub fn wt_block(&self, bi: usize, bj: usize) -> Option<CMatrix> {
        self.wt.as_ref().map(|wt| block(wt, self.n, bi, bj))
    }

    fn wt_ref(&self) -> Result<&CMatrix> {
        self.wt.as_ref().ok_or(Error::WNotInvertible { cond: self.cond_w })
    }
}

/// Validates `W*JW <= J`, the equivalent block criterion, invertibility of
/// `W22`, and (when `W` is invertible) the J-contractivity of the swapped
/// inverse `Wt`.
pub fn validate_w(w: &CMatrix, tol: f64) -> Result<JContractiveW> {
    linalg::check_finite(w)?;
    if w.nrows() != w.ncols() || w.nrows() % 2 != 0 {
        return Err(Error::NonSquare {
            rows: w.nrows(),
            cols: w.ncols(),
        });
    }
    let n = w.nrows() / 2;
    let sig = SignaturePair::new(n);
    let scale = 1.0 + opnorm(w).powi(2);
    let defect = symmetrize(&(&sig.j - w.adjoint() * &sig.j * w));
    let contractivity_margin = eigmin_herm(&defect)?;
    if contractivity_margin < -scaled_tol(tol, scale) {
        let excess = eigmax_herm(&(-&defect))?;
        return Err(Error::NotJContractive { excess });
    }

    let w11 = block(w, n, 0, 0);
    let w12 = block(w, n, 0, 1);
    let w21 = block(w, n, 1, 0);
    let w22 = block(w, n, 1, 1);

    // block form of the same condition
    let id = CMatrix::identity(n, n);
    let c11 = herm_part(&(w11.adjoint() * &w21))? * Complex::new(2.0, 0.0);
    let c12 = w21.adjoint() * &w12 + w11.adjoint() * &w22 - &id;
    let c22 = herm_part(&(w12.adjoint() * &w22))? * Complex::new(2.0, 0.0);
    let mut crit = CMatrix::zeros(2 * n, 2 * n);
    crit.view_mut((0, 0), (n, n)).copy_from(&c11);
    crit.view_mut((0, n), (n, n)).copy_from(&c12);
    crit.view_mut((n, 0), (n, n)).copy_from(&c12.adjoint());
    crit.view_mut((n, n), (n, n)).copy_from(&c22);
    let crit_min = eigmin_herm(&symmetrize(&crit))?;
    if crit_min < -scaled_tol(tol, scale) {
        return Err(Error::NotJContractive { excess: -crit_min });
    }

    let cond_w22 = linalg::cond(&w22);
    if !cond_w22.is_finite() || cond_w22 >= 1.0 / tol.max(ABS_FLOOR) {
        return Err(Error::NotJContractive { excess: cond_w22 });
    }

    let cond_w = linalg::cond(w);
    let invertible = cond_w.is_finite() && cond_w < 1.0 / tol.max(ABS_FLOOR);
    let wt = if invertible {
        let w_inv = linalg::inv(w, tol)?;
        let wt = &sig.jhat * w_inv * &sig.jhat;
        let defect_t = symmetrize(&(&sig.j - wt.adjoint() * &sig.j * &wt));
        let scale_t = 1.0 + opnorm(&wt).powi(2);
        let margin_t = eigmin_herm(&defect_t)?;
        if margin_t < -scaled_tol(tol, scale_t) {
            return Err(Error::NotJContractive { excess: -margin_t });
        }
        Some(wt)
    } else {
        None
    };

    Ok(JContractiveW {
        n,
        w: w.clone(),
        w11,
        w12,
        w21,
        w22,
        contractivity_margin,
        invertible,
        cond_w,
        wt,
    })
}

/// True iff `W21 A + W22` is comfortably invertible, i.e. `A` lies in the
/// domain of `T_W`. Always true for strictly positive real `A`.
pub fn in_domain(w: &JContractiveW, a: &PRMatrix, tol: f64) -> bool {
    if a.dim() != w.n {
        return false;
    }
    let denom = &w.w21 * &a.value + &w.w22;
    let k = linalg::cond(&denom);
    k.is_finite() && k < 1.0 / tol.max(ABS_FLOOR)
}

/// Applies `T_W` to `A` and validates the image as positive real. When `W`
/// is invertible the left-quotient representation through `Wt` is computed
/// as well and the two must agree.
pub fn apply(w: &JContractiveW, a: &PRMatrix, tol: f64) -> Result<PRMatrix> {
    if a.dim() != w.n {
        return Err(Error::DimMismatch {
            left: format!("dim {}", a.dim()),
            right: format!("block dim {}", w.n),
        });
    }
    if !in_domain(w, a, tol) {
        return Err(Error::OutOfDomain {
            detail: "W21 A + W22 is numerically singular".into(),
        });
    }
    let denom = &w.w21 * &a.value + &w.w22;
    let numer = &w.w11 * &a.value + &w.w12;
    // T_W[A] (W21 A + W22) = W11 A + W12
    let t = linalg::solve(&denom.transpose(), &numer.transpose(), tol)?.transpose();

    if let Some(wt) = &w.wt {
        let wt11 = block(wt, w.n, 0, 0);
        let wt12 = block(wt, w.n, 0, 1);
        let wt21 = block(wt, w.n, 1, 0);
        let wt22 = block(wt, w.n, 1, 1);
        let left = &wt11 + &a.value * &wt21;
        let k = linalg::cond(&left);
        if !k.is_finite() || k >= 1.0 / tol.max(ABS_FLOOR) {
            // the two domain criteria must agree
            return Err(Error::OutOfDomain {
                detail: "Wt11 + A Wt21 is singular while W21 A + W22 is not".into(),
            });
        }
        let alt = linalg::solve(&left, &(&wt12 + &a.value * &wt22), tol)?;
        let dev = opnorm(&(&t - &alt));
        let scale = opnorm(&t) + 1.0;
        if dev > scaled_tol(tol, scale) {
            return Err(Error::ReprMismatch { deviation: dev });
        }
    }
    make_pr(&t, tol)
}

/// Per-clause outcome of the quadratic-form inequalities and the difference
/// identity underlying the invariance theorems.
#[derive(Debug, Clone)]
pub struct UseIneqReport {
    /// `eigmin(Re T_W[A] - (W21 A + W22)^{-*} Re(A) (W21 A + W22)^{-1})`
    pub right_quotient_margin: f64,
    /// `eigmin(Re T_W[A] - (Wt11 + A Wt21)^{-1} Re(A) (Wt11 + A Wt21)^{-*})`
    pub left_quotient_margin: f64,
    /// Residual of
    /// `T_W[A] - T_W[B] = (Wt11 + A Wt21)^{-1} (A - B) (W22 + W21 B)^{-1}`.
    pub difference_residual: f64,
    pub tol_used: f64,
}

impl UseIneqReport {
    pub fn all_ok(&self) -> bool {
        self.right_quotient_margin >= -self.tol_used
            && self.left_quotient_margin >= -self.tol_used
            && self.difference_residual <= self.tol_used
    }
}

/// Verifies both positivity inequalities for `Re T_W[A]` and the exact
/// identity for `T_W[A] - T_W[B]`.
pub fn useineq_check(
    w: &JContractiveW,
    a: &PRMatrix,
    b: &PRMatrix,
    tol: f64,
) -> Result<UseIneqReport> {
    let wt = w.wt_ref()?;
    let ta = apply(w, a, tol)?;
    let tb = apply(w, b, tol)?;
    let scale = 1.0 + ta.norm() + tb.norm() + a.norm() + b.norm();
    let tol_used = scaled_tol(tol, scale);

    let denom_a = &w.w21 * &a.value + &w.w22;
    let denom_a_inv = linalg::inv(&denom_a, tol)?;
    let rhs1 = denom_a_inv.adjoint() * &a.re_part * &denom_a_inv;
    let right_quotient_margin = eigmin_herm(&symmetrize(&(&ta.re_part - rhs1)))?;

    let wt11 = block(wt, w.n, 0, 0);
    let wt21 = block(wt, w.n, 1, 0);
    let left_a = &wt11 + &a.value * &wt21;
    let left_a_inv = linalg::inv(&left_a, tol)?;
    let rhs2 = &left_a_inv * &a.re_part * left_a_inv.adjoint();
    let left_quotient_margin = eigmin_herm(&symmetrize(&(&ta.re_part - rhs2)))?;

    let denom_b = &w.w22 + &w.w21 * &b.value;
    let diff_rhs = &left_a_inv * (&a.value - &b.value) * linalg::inv(&denom_b, tol)?;
    let difference_residual = opnorm(&(&ta.value - &tb.value - diff_rhs));

    Ok(UseIneqReport {
        right_quotient_margin,
        left_quotient_margin,
        difference_residual,
        tol_used,
    })
}

/// The pair of contractions tying `Re(A)^{1/2}` to `Re(T_W[A])^{1/2}`:
/// `M_A Re(T_W[A])^{1/2} = Re(A)^{1/2} (W22 + W21 A)^{-1}` and
/// `Mt_A Re(T_W[A])^{1/2} = Re(A)^{1/2} (Wt11 + A Wt21)^{-*}`.
///
/// Both are solved through the pseudo-inverse square root; a norm above
/// `1 + tol` is a hard failure, never clipped.
pub fn contraction_witnesses(
    w: &JContractiveW,
    a: &PRMatrix,
    tol: f64,
) -> Result<(CMatrix, CMatrix)> {
    let ta = apply(w, a, tol)?;
    contraction_witnesses_with_image(w, a, &ta, tol)
}

/// Same as [`contraction_witnesses`] but reusing an already computed image
/// `T_W[A]`.
pub fn contraction_witnesses_with_image(
    w: &JContractiveW,
    a: &PRMatrix,
    ta: &PRMatrix,
    tol: f64,
) -> Result<(CMatrix, CMatrix)> {
    let wt = w.wt_ref()?;
    let scale = 1.0 + a.norm() + ta.norm();
    let check_tol = scaled_tol(tol, scale);

    let denom = &w.w22 + &w.w21 * &a.value;
    let rhs1 = &a.re_sqrt * linalg::inv(&denom, tol)?;
    let m_a = &rhs1 * &ta.re_pinv_sqrt;
    let res1 = opnorm(&(&m_a * &ta.re_sqrt - &rhs1));
    if res1 > check_tol {
        return Err(Error::InvalidWitness {
            reason: "right-quotient contraction residual",
            residual: res1,
        });
    }

    let wt11 = block(wt, w.n, 0, 0);
    let wt21 = block(wt, w.n, 1, 0);
    let left = &wt11 + &a.value * &wt21;
    let rhs2 = &a.re_sqrt * linalg::inv(&left, tol)?.adjoint();
    let mt_a = &rhs2 * &ta.re_pinv_sqrt;
    let res2 = opnorm(&(&mt_a * &ta.re_sqrt - &rhs2));
    if res2 > check_tol {
        return Err(Error::InvalidWitness {
            reason: "left-quotient contraction residual",
            residual: res2,
        });
    }

    let tol_norm = 1.0 + scaled_tol(tol, 1.0);
    let (n1, n2) = (opnorm(&m_a), opnorm(&mt_a));
    if n1 > tol_norm || n2 > tol_norm {
        return Err(Error::InvalidWitness {
            reason: "push-forward factor is not a contraction",
            residual: n1.max(n2) - 1.0,
        });
    }
    Ok((m_a, mt_a))
}

/// Result of pushing a witness through `T_W`: the new witness in the
/// support coordinates of the image pair, plus the images themselves.
#[derive(Debug, Clone)]
pub struct PushedWitness {
    /// Witness in support coordinates of the images.
    pub witness: CMatrix,
    /// Ambient-dimension form of the witness.
    pub witness_ambient: CMatrix,
    pub image_a: PRMatrix,
    pub image_b: PRMatrix,
    /// Residual of the defining factorization for the image pair.
    pub residual: f64,
}

/// Pushes an equivalence witness `Xt` (support coordinates, `A ~ B`)
/// through `T_W` via `Xt_W = Mt_A* Xt M_B`. The push never increases the
/// norm.
pub fn equiv_push(
    w: &JContractiveW,
    a: &PRMatrix,
    b: &PRMatrix,
    xt: &CMatrix,
    tol: f64,
) -> Result<PushedWitness> {
    let ta = apply(w, a, tol)?;
    let tb = apply(w, b, tol)?;
    let (_, mt_a) = contraction_witnesses_with_image(w, a, &ta, tol)?;
    let (m_b, _) = contraction_witnesses_with_image(w, b, &tb, tol)?;
    let xt_amb = &a.support.basis * xt * b.support.basis.adjoint();
    let pushed_amb = mt_a.adjoint() * xt_amb * &m_b;
    let witness = ta.support.basis.adjoint() * &pushed_amb * &tb.support.basis;
    let witness_ambient = &ta.support.basis * &witness * tb.support.basis.adjoint();

    let scale = ta.norm() + tb.norm() + 1.0;
    let recon = &ta.re_sqrt * &witness_ambient * &tb.re_sqrt;
    let residual = opnorm(&(&ta.value - &tb.value - recon));
    if residual > scaled_tol(tol, scale) {
        return Err(Error::InvalidWitness {
            reason: "pushed equivalence witness does not reconstruct the difference",
            residual,
        });
    }
    let norm_in = opnorm(xt);
    let norm_out = opnorm(&witness);
    if norm_out > norm_in + scaled_tol(tol, 1.0 + norm_in) {
        return Err(Error::InvalidWitness {
            reason: "pushed equivalence witness norm increased",
            residual: norm_out - norm_in,
        });
    }
    Ok(PushedWitness {
        witness,
        witness_ambient,
        image_a: ta,
        image_b: tb,
        residual,
    })
}

/// Pushes a pre-order witness `X` (support coordinates, `A ≺ B`) through
/// `T_W` via
/// `X_W = Mt_B* (I - X Re(B)^{1/2} Wt21 (Wt11 + A Wt21)^{-1} Re(B)^{1/2}) X M_B`.
pub fn prec_push(
    w: &JContractiveW,
    a: &PRMatrix,
    b: &PRMatrix,
    x: &CMatrix,
    tol: f64,
) -> Result<PushedWitness> {
    let wt = w.wt_ref()?;
    let ta = apply(w, a, tol)?;
    let tb = apply(w, b, tol)?;
    let (m_b, mt_b) = contraction_witnesses_with_image(w, b, &tb, tol)?;

    let wt11 = block(wt, w.n, 0, 0);
    let wt21 = block(wt, w.n, 1, 0);
    let left_a_inv = linalg::inv(&(&wt11 + &a.value * &wt21), tol)?;
    let x_amb = b.support.embed(x);
    let n = b.dim();
    let middle = CMatrix::identity(n, n)
        - &x_amb * &b.re_sqrt * &wt21 * &left_a_inv * &b.re_sqrt;
    let pushed_amb = mt_b.adjoint() * middle * &x_amb * &m_b;
    let witness = tb.support.compress(&pushed_amb);
    let witness_ambient = tb.support.embed(&witness);

    let scale = ta.norm() + tb.norm() + 1.0;
    let recon = &tb.re_sqrt * &witness_ambient * &tb.re_sqrt;
    let residual = opnorm(&(&ta.value - &tb.value - recon));
    if residual > scaled_tol(tol, scale) {
        return Err(Error::InvalidWitness {
            reason: "pushed pre-order witness does not reconstruct the difference",
            residual,
        });
    }
    Ok(PushedWitness {
        witness,
        witness_ambient,
        image_a: ta,
        image_b: tb,
        residual,
    })
}

/// Samples `W = exp(J N)` with `Re(N)` negative semidefinite, which is
/// J-contractive by construction and invertible as a matrix exponential.
///
/// With `invertible = false` the exponential is dented by a rank-one
/// near-projection `I - (1 - d) q q*` along a direction with `Jq = q`;
/// that keeps `W` J-contractive (`P J P = J - (1 - d^2) q q* <= J`) while
/// driving the smallest singular value to order `d`.
pub fn sample_jcontractive(n: usize, invertible: bool, seed: u64) -> Result<JContractiveW> {
    let mut rng = pr::seeded_rng(seed);
    let dim = 2 * n;
    let g = pr::random_gaussian_matrix(&mut rng, dim, dim);
    let neg = symmetrize(&(g.adjoint() * &g)) * Complex::new(-1.0, 0.0);
    let h = pr::random_hermitian(&mut rng, dim);
    let mut generator = &neg + &h * Complex::new(0.0, 1.0);
    let norm = opnorm(&generator);
    if norm > ABS_FLOOR {
        generator *= Complex::new(0.6 / norm, 0.0);
    }
    let sig = SignaturePair::new(n);
    let mut w = (&sig.j * generator).exp();
    if !invertible {
        let u = pr::random_gaussian_matrix(&mut rng, n, 1);
        let mut q = CMatrix::zeros(dim, 1);
        q.view_mut((0, 0), (n, 1)).copy_from(&u);
        q.view_mut((n, 0), (n, 1)).copy_from(&(-&u));
        let qn = q.norm();
        q /= Complex::new(qn, 0.0);
        let dent = CMatrix::identity(dim, dim) - &q * q.adjoint() * Complex::new(1.0 - 1e-12, 0.0);
        w = dent * w;
    }
    validate_w(&w, 1e-10)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{cone, czero};
    use crate::pr::{equiv_check, prec_check, sample_pr, sample_prec_pair, test_rng};

    #[test]
    fn signature_identities() {
        let sig = SignaturePair::new(3);
        let id = CMatrix::identity(6, 6);
        assert!(opnorm(&(&sig.j * &sig.j - &id)) < 1e-15);
        assert!(opnorm(&(&sig.jhat * &sig.jhat - &id)) < 1e-15);
        // Jhat J Jhat = -J
        assert!(opnorm(&(&sig.jhat * &sig.j * &sig.jhat + &sig.j)) < 1e-15);
    }

    #[test]
    fn identity_is_j_unitary() {
        let w = validate_w(&CMatrix::identity(4, 4), 1e-10).unwrap();
        assert!(w.contractivity_margin.abs() < 1e-12);
        assert!(w.invertible);
        let wt = w.wt.as_ref().unwrap();
        assert!(opnorm(&(wt - CMatrix::identity(4, 4))) < 1e-12);
    }

    #[test]
    fn rejects_non_contractive() {
        // W11 = 2I, W22 = I, off-diagonal zero
        let mut w = CMatrix::identity(2, 2);
        w[(0, 0)] = Complex::new(2.0, 0.0);
        match validate_w(&w, 1e-10) {
            Err(Error::NotJContractive { excess }) => {
                assert!((excess - 1.0).abs() < 1e-10, "excess {excess}")
            }
            other => panic!("expected NotJContractive, got {other:?}"),
        }
    }

    #[test]
    fn sampled_w_is_valid_and_deterministic() {
        let w1 = sample_jcontractive(3, true, 5).unwrap();
        let w2 = sample_jcontractive(3, true, 5).unwrap();
        assert_eq!(w1.w, w2.w);
        assert!(w1.invertible);
        assert!(w1.contractivity_margin >= -1e-10);
    }

    #[test]
    fn exp_of_minus_j_is_valid() {
        let sig = SignaturePair::new(2);
        let w = (-&sig.j).exp();
        let v = validate_w(&w, 1e-10).unwrap();
        assert!(v.invertible);
    }

    #[test]
    fn near_singular_flagged() {
        let w = sample_jcontractive(2, false, 9).unwrap();
        assert!(!w.invertible);
    }

    #[test]
    fn domain_membership() {
        let w = sample_jcontractive(3, true, 15).unwrap();
        let a = sample_pr(3, 3, 16).unwrap();
        assert!(a.strict);
        assert!(in_domain(&w, &a, 1e-10));
        let id_w = validate_w(&CMatrix::identity(6, 6), 1e-10).unwrap();
        let flat = sample_pr(3, 0, 17).unwrap();
        assert!(in_domain(&id_w, &flat, 1e-10));
    }

    #[test]
    fn apply_identity_and_scalar_example() {
        let a = sample_pr(3, 2, 21).unwrap();
        let id_w = validate_w(&CMatrix::identity(6, 6), 1e-10).unwrap();
        let ta = apply(&id_w, &a, 1e-10).unwrap();
        assert!(opnorm(&(&ta.value - &a.value)) < 1e-10);

        // scalar Mobius step: W = [[1/2, 3/2], [3/2, 1/2]] maps 0 to 3
        let w = validate_w(
            &CMatrix::from_row_slice(
                2,
                2,
                &[
                    Complex::new(0.5, 0.0),
                    Complex::new(1.5, 0.0),
                    Complex::new(1.5, 0.0),
                    Complex::new(0.5, 0.0),
                ],
            ),
            1e-10,
        )
        .unwrap();
        let zero = crate::pr::make_pr(&CMatrix::zeros(1, 1), 1e-10).unwrap();
        let t = apply(&w, &zero, 1e-10).unwrap();
        assert!((t.value[(0, 0)] - Complex::new(3.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn useineq_random_triple() {
        let w = sample_jcontractive(4, true, 31).unwrap();
        let b = sample_pr(4, 4, 32).unwrap();
        let (a, _) = sample_prec_pair(&b, 0.5, 33).unwrap();
        let rep = useineq_check(&w, &a, &b, 1e-8).unwrap();
        assert!(rep.all_ok(), "{rep:?}");
        // A = B collapses the difference clause to zero
        let rep = useineq_check(&w, &b, &b, 1e-8).unwrap();
        assert!(rep.difference_residual < rep.tol_used);
    }

    #[test]
    fn intertwining_identities() {
        let w = sample_jcontractive(3, true, 35).unwrap();
        let a = sample_pr(3, 3, 36).unwrap();
        let ta = apply(&w, &a, 1e-10).unwrap();
        let n = 3;
        let mut col = CMatrix::zeros(2 * n, n);
        col.view_mut((0, 0), (n, n)).copy_from(&a.value);
        col.view_mut((n, 0), (n, n)).copy_from(&CMatrix::identity(n, n));
        let mut tcol = CMatrix::zeros(2 * n, n);
        tcol.view_mut((0, 0), (n, n)).copy_from(&ta.value);
        tcol.view_mut((n, 0), (n, n)).copy_from(&CMatrix::identity(n, n));
        let denom = &w.w21 * &a.value + &w.w22;
        let res = opnorm(&(&w.w * &col - &tcol * denom));
        assert!(res < 1e-10 * (1.0 + opnorm(&w.w)) * (1.0 + a.norm()));

        let wt = w.wt.as_ref().unwrap();
        let mut row = CMatrix::zeros(n, 2 * n);
        row.view_mut((0, 0), (n, n)).copy_from(&CMatrix::identity(n, n));
        row.view_mut((0, n), (n, n)).copy_from(&a.value);
        let mut trow = CMatrix::zeros(n, 2 * n);
        trow.view_mut((0, 0), (n, n)).copy_from(&CMatrix::identity(n, n));
        trow.view_mut((0, n), (n, n)).copy_from(&ta.value);
        let wt11 = block(wt, n, 0, 0);
        let wt21 = block(wt, n, 1, 0);
        let left = &wt11 + &a.value * &wt21;
        let res = opnorm(&(&row * wt - left * trow));
        assert!(res < 1e-10 * (1.0 + opnorm(wt)) * (1.0 + a.norm()));
    }

    #[test]
    fn contraction_witnesses_identity_w() {
        let a = sample_pr(3, 2, 41).unwrap();
        let id_w = validate_w(&CMatrix::identity(6, 6), 1e-10).unwrap();
        let (m_a, mt_a) = contraction_witnesses(&id_w, &a, 1e-9).unwrap();
        // both collapse to the support projection
        let pi = a.support.projection();
        assert!(opnorm(&(&m_a - &pi)) < 1e-9);
        assert!(opnorm(&(&mt_a - &pi)) < 1e-9);
        assert!(opnorm(&m_a) <= 1.0 + 1e-10);
    }

    #[test]
    fn contraction_witnesses_zero_re() {
        let mut rng = test_rng(43);
        let h = pr::random_hermitian(&mut rng, 2);
        let a = make_pr(&(h * Complex::new(0.0, 1.0)), 1e-10).unwrap();
        let w = sample_jcontractive(2, true, 44).unwrap();
        if in_domain(&w, &a, 1e-10) {
            let (m_a, _) = contraction_witnesses(&w, &a, 1e-9).unwrap();
            assert!(opnorm(&m_a) < 1e-9);
        }
    }

    #[test]
    fn contraction_witnesses_random() {
        for seed in 0..5u64 {
            let w = sample_jcontractive(4, true, 50 + seed).unwrap();
            let a = sample_pr(4, 4, 60 + seed).unwrap();
            let (m_a, mt_a) = contraction_witnesses(&w, &a, 1e-9).unwrap();
            assert!(opnorm(&m_a) <= 1.0 + 1e-10);
            assert!(opnorm(&mt_a) <= 1.0 + 1e-10);
        }
    }

    #[test]
    fn equiv_push_norm_contraction() {
        let w = sample_jcontractive(4, true, 71).unwrap();
        let b = sample_pr(4, 4, 72).unwrap();
        let (a, _) = sample_prec_pair(&b, 0.4, 73).unwrap();
        let ew = equiv_check(&a, &b, 1e-8).unwrap();
        let pushed = equiv_push(&w, &a, &b, &ew.xt, 1e-8).unwrap();
        assert!(opnorm(&pushed.witness) <= opnorm(&ew.xt) + 1e-10);
        // oracle: independent equivalence check on the images
        let img_w = equiv_check(&pushed.image_a, &pushed.image_b, 1e-7).unwrap();
        assert!(opnorm(&(img_w.xt_ambient() - &pushed.witness_ambient)) < 1e-7);
    }

    #[test]
    fn prec_push_matches_recovered_witness() {
        let w = sample_jcontractive(5, true, 81).unwrap();
        let b = sample_pr(5, 5, 82).unwrap();
        let (a, _) = sample_prec_pair(&b, 0.5, 83).unwrap();
        let fw = prec_check(&a, &b, 1e-8).unwrap();
        let pushed = prec_push(&w, &a, &b, &fw.x, 1e-8).unwrap();
        assert!(pushed.residual <= 1e-8 * (pushed.image_a.norm() + pushed.image_b.norm() + 1.0));
        let rec = prec_check(&pushed.image_a, &pushed.image_b, 1e-7).unwrap();
        assert!(opnorm(&(rec.x_ambient() - &pushed.witness_ambient)) < 1e-7);
    }

    #[test]
    fn prec_push_zero_witness() {
        let w = sample_jcontractive(3, true, 85).unwrap();
        let b = sample_pr(3, 3, 86).unwrap();
        let k = b.support.rank;
        let x = CMatrix::zeros(k, k);
        let pushed = prec_push(&w, &b, &b, &x, 1e-8).unwrap();
        assert!(opnorm(&pushed.witness) < 1e-9);
    }

    #[test]
    fn push_requires_invertible_w() {
        let w = sample_jcontractive(2, false, 91).unwrap();
        let b = sample_pr(2, 2, 92).unwrap();
        let k = b.support.rank;
        let x = CMatrix::zeros(k, k);
        assert!(matches!(
            prec_push(&w, &b, &b, &x, 1e-8),
            Err(Error::WNotInvertible { .. })
        ));
    }

    #[test]
    fn block_extraction() {
        let m = CMatrix::from_row_slice(
            2,
            2,
            &[cone(), Complex::new(2.0, 0.0), Complex::new(3.0, 0.0), Complex::new(4.0, 0.0)],
        );
        assert_eq!(block(&m, 1, 0, 1)[(0, 0)], Complex::new(2.0, 0.0));
        assert_eq!(block(&m, 1, 1, 0)[(0, 0)], Complex::new(3.0, 0.0));
        let _ = czero();
    }
}
