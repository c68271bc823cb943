//! Matrix-valued Caratheodory functions on the unit disc: Herglotz models
//! that are positive real by construction, the uniform pre-order and
//! equivalence over finite sampling grids, pointwise linear fractional
//! transformations `T_Psi`, boundary probes, and the scalar Mobius
//! counterexample showing that the pre-order is not preserved on the full
//! domain.

use num_complex::Complex;
use rand::Rng;

use crate::error::{Error, Result};
use crate::lft::{block, JContractiveW, SignaturePair};
use crate::linalg::{
    self, eigmin_herm, herm_part, opnorm, psd_sqrt, scaled_tol, symmetrize, CMatrix, SupportBasis,
    ABS_FLOOR,
};
use crate::pr::{self, equiv_check, make_pr, prec_check, PRMatrix};
use crate::C64;

/// Cap used for grid-level H-infinity membership verdicts.
pub const HINF_CAP: f64 = 1.0e4;

fn cx(re: f64, im: f64) -> C64 {
    Complex::new(re, im)
}

fn check_interior(lambda: C64) -> Result<()> {
    if !(lambda.re.is_finite() && lambda.im.is_finite()) || lambda.norm() >= 1.0 {
        return Err(Error::OutsideDisc {
            point: format!("{lambda}"),
        });
    }
    Ok(())
}

/// One kernel term `((beta + lambda)/(beta - lambda)) P` of a Herglotz sum.
#[derive(Debug, Clone)]
pub struct HerglotzTerm {
    /// Unimodular pole location.
    pub beta: C64,
    /// PSD coefficient.
    pub p: CMatrix,
}

#[derive(Debug, Clone)]
pub enum CaraModel {
    /// `i H0 + P0 + sum_k ((beta_k + lambda)/(beta_k - lambda)) P_k` with
    /// `H0` Hermitian and `P0`, `P_k` PSD; positive real on the disc by
    /// construction.
    Herglotz {
        h0: CMatrix,
        p0: CMatrix,
        terms: Vec<HerglotzTerm>,
    },
    /// Constant positive real value.
    Constant(CMatrix),
    /// Right matrix-polynomial quotient `num(lambda) den(lambda)^{-1}`;
    /// membership is only established pointwise, every evaluation is
    /// re-validated.
    Rational { num: Vec<CMatrix>, den: Vec<CMatrix> },
    /// Lazy composition `T_Psi[inner]`.
    LftComposed {
        psi: Box<PsiBlock>,
        inner: Box<CaraFunction>,
    },
}

/// An evaluable holomorphic function on the disc with positive real values.
#[derive(Debug, Clone)]
pub struct CaraFunction {
    pub dim: usize,
    pub model: CaraModel,
    /// Support of `Re F(lambda)`; independent of the base point for a
    /// genuine Caratheodory function, cached from the construction probe.
    pub support: SupportBasis,
}

impl CaraFunction {
    pub fn herglotz(
        h0: CMatrix,
        p0: CMatrix,
        terms: Vec<HerglotzTerm>,
        tol: f64,
    ) -> Result<Self> {
        let dim = h0.nrows();
        if h0.ncols() != dim || p0.nrows() != dim || p0.ncols() != dim {
            return Err(Error::DimMismatch {
                left: format!("H0 {}x{}", h0.nrows(), h0.ncols()),
                right: format!("P0 {}x{}", p0.nrows(), p0.ncols()),
            });
        }
        let herm_dev = opnorm(&(&h0 - h0.adjoint())) / 2.0;
        if herm_dev > scaled_tol(tol, 1.0 + opnorm(&h0)) {
            return Err(Error::InvalidArgument(format!(
                "H0 is not Hermitian (deviation {herm_dev:.3e})"
            )));
        }
        psd_sqrt(&symmetrize(&p0), tol)?;
        for (k, t) in terms.iter().enumerate() {
            if (t.beta.norm() - 1.0).abs() > 1e-12 {
                return Err(Error::InvalidArgument(format!(
                    "beta_{k} is not unimodular: |beta| = {}",
                    t.beta.norm()
                )));
            }
            if t.p.nrows() != dim || t.p.ncols() != dim {
                return Err(Error::DimMismatch {
                    left: format!("P_{k} {}x{}", t.p.nrows(), t.p.ncols()),
                    right: format!("dim {dim}"),
                });
            }
            psd_sqrt(&symmetrize(&t.p), tol)?;
        }
        let model = CaraModel::Herglotz { h0, p0, terms };
        let support = probe_support(&model, dim, tol)?;
        Ok(CaraFunction { dim, model, support })
    }

    pub fn constant(value: &CMatrix, tol: f64) -> Result<Self> {
        let v = make_pr(value, tol)?;
        Ok(CaraFunction {
            dim: v.dim(),
            support: v.support.clone(),
            model: CaraModel::Constant(v.value),
        })
    }

    pub fn rational(num: Vec<CMatrix>, den: Vec<CMatrix>, tol: f64) -> Result<Self> {
        let dim = num
            .first()
            .or_else(|| den.first())
            .map(|c| c.nrows())
            .ok_or_else(|| Error::InvalidArgument("empty rational model".into()))?;
        for c in num.iter().chain(den.iter()) {
            if c.nrows() != dim || c.ncols() != dim {
                return Err(Error::DimMismatch {
                    left: format!("coefficient {}x{}", c.nrows(), c.ncols()),
                    right: format!("dim {dim}"),
                });
            }
        }
        let model = CaraModel::Rational { num, den };
        let support = probe_support(&model, dim, tol)?;
        Ok(CaraFunction { dim, model, support })
    }

    /// Scalar constant, convenience for the worked examples.
    pub fn scalar_constant(v: C64, tol: f64) -> Result<Self> {
        Self::constant(&CMatrix::from_element(1, 1, v), tol)
    }

    /// Evaluates `F(lambda)` and validates the value as positive real.
    pub fn eval(&self, lambda: C64, tol: f64) -> Result<PRMatrix> {
        check_interior(lambda)?;
        let raw = self.eval_raw(lambda, tol)?;
        make_pr(&raw, tol).map_err(|e| match e {
            Error::NotPositiveReal { eigmin } => Error::NotCaratheodory {
                point: format!("{lambda}"),
                eigmin,
            },
            other => other,
        })
    }

    /// Evaluates the model arithmetic without the positive-real check.
    pub fn eval_raw(&self, lambda: C64, tol: f64) -> Result<CMatrix> {
        match &self.model {
            CaraModel::Herglotz { h0, p0, terms } => {
                let mut v = h0 * cx(0.0, 1.0) + p0;
                for t in terms {
                    let c = (t.beta + lambda) / (t.beta - lambda);
                    v += &t.p * c;
                }
                Ok(v)
            }
            CaraModel::Constant(v) => Ok(v.clone()),
            CaraModel::Rational { num, den } => {
                let n = poly_eval(num, lambda, self.dim);
                let d = poly_eval(den, lambda, self.dim);
                let k = linalg::cond(&d);
                if !k.is_finite() || k >= 1.0 / tol.max(ABS_FLOOR) {
                    return Err(Error::OutOfDomain {
                        detail: format!("rational denominator singular at {lambda}"),
                    });
                }
                Ok(linalg::solve(&d.transpose(), &n.transpose(), tol)?.transpose())
            }
            CaraModel::LftComposed { psi, inner } => {
                let fv = inner.eval_raw(lambda, tol)?;
                psi.mobius(lambda, &fv, tol)
            }
        }
    }
}

fn poly_eval(coeffs: &[CMatrix], lambda: C64, dim: usize) -> CMatrix {
    let mut acc = CMatrix::zeros(dim, dim);
    for c in coeffs.iter().rev() {
        acc = acc * lambda + c;
    }
    acc
}

fn probe_support(model: &CaraModel, dim: usize, tol: f64) -> Result<SupportBasis> {
    let f = CaraFunction {
        dim,
        model: model.clone(),
        support: SupportBasis {
            ambient_dim: dim,
            basis: CMatrix::zeros(dim, 0),
            rank: 0,
            tol_used: 0.0,
        },
    };
    // probe slightly off-center so that odd kernels do not hide rank
    let v = f.eval(cx(0.11, 0.07), tol)?;
    Ok(v.support)
}

/// Finite polar sampling grid inside the disc.
#[derive(Debug, Clone)]
pub struct DiscGrid {
    pub radii: Vec<f64>,
    pub angles: usize,
}

impl DiscGrid {
    pub fn new(radii: Vec<f64>, angles: usize) -> Result<Self> {
        if radii.is_empty() || angles == 0 {
            return Err(Error::InvalidArgument("empty grid".into()));
        }
        for w in radii.windows(2) {
            if w[1] <= w[0] {
                return Err(Error::InvalidArgument(
                    "grid radii must be strictly increasing".into(),
                ));
            }
        }
        if radii[0] <= 0.0 || *radii.last().unwrap() >= 1.0 {
            return Err(Error::InvalidArgument(
                "grid radii must lie in (0, 1)".into(),
            ));
        }
        Ok(DiscGrid { radii, angles })
    }

    /// `rings x angles` grid with the outermost ring at `1 - delta_min`.
    /// Angle 0 (the positive real axis) is always included.
    pub fn standard(rings: usize, angles: usize, delta_min: f64) -> Result<Self> {
        if rings == 0 || !(0.0..1.0).contains(&delta_min) || delta_min == 0.0 {
            return Err(Error::InvalidArgument("bad grid parameters".into()));
        }
        let rmax = 1.0 - delta_min;
        let radii = (1..=rings).map(|i| rmax * i as f64 / rings as f64).collect();
        DiscGrid::new(radii, angles)
    }

    pub fn delta_min(&self) -> f64 {
        1.0 - self.radii.last().copied().unwrap_or(0.0)
    }

    /// Grid points ring by ring, angle `2*pi*j/angles` starting at `j = 0`.
    pub fn points(&self) -> Vec<C64> {
        let mut pts = Vec::with_capacity(self.radii.len() * self.angles);
        for &r in &self.radii {
            for j in 0..self.angles {
                let th = 2.0 * std::f64::consts::PI * j as f64 / self.angles as f64;
                pts.push(Complex::from_polar(r, th));
            }
        }
        pts
    }
}

/// Holomorphic `2n x 2n` block symbol `Psi` given by matrix-polynomial
/// blocks, validated for J-contractivity on a grid.
#[derive(Debug, Clone)]
pub struct PsiBlock {
    pub dim: usize,
    pub b11: Vec<CMatrix>,
    pub b12: Vec<CMatrix>,
    pub b21: Vec<CMatrix>,
    pub b22: Vec<CMatrix>,
    pub jcontr_margin_on_grid: f64,
    pub det_not_identically_zero: bool,
    /// Grid points where `|det Psi|` falls below the validation tolerance.
    pub singular_points: Vec<C64>,
}

impl PsiBlock {
    pub fn new(
        dim: usize,
        b11: Vec<CMatrix>,
        b12: Vec<CMatrix>,
        b21: Vec<CMatrix>,
        b22: Vec<CMatrix>,
    ) -> Result<Self> {
        for c in b11.iter().chain(&b12).chain(&b21).chain(&b22) {
            if c.nrows() != dim || c.ncols() != dim {
                return Err(Error::DimMismatch {
                    left: format!("block coefficient {}x{}", c.nrows(), c.ncols()),
                    right: format!("dim {dim}"),
                });
            }
            linalg::check_finite(c)?;
        }
        Ok(PsiBlock {
            dim,
            b11,
            b12,
            b21,
            b22,
            jcontr_margin_on_grid: f64::NAN,
            det_not_identically_zero: false,
            singular_points: Vec::new(),
        })
    }

    /// Constant symbol from an already validated J-contractive `W`.
    pub fn from_constant_w(w: &JContractiveW) -> Result<Self> {
        PsiBlock::new(
            w.n,
            vec![w.w11.clone()],
            vec![w.w12.clone()],
            vec![w.w21.clone()],
            vec![w.w22.clone()],
        )
    }

    /// The scalar Mobius symbol `(1/2) [[1 - l, 1 + l], [1 + l, 1 - l]]`.
    ///
    /// The 1/2 normalization is what makes the symbol J-contractive on the
    /// whole disc (`J - Psi*J Psi` has eigenvalues `0` and `1 - |l|^2`);
    /// it leaves the induced fractional transformation unchanged and gives
    /// `det Psi(l) = -l` exactly.
    pub fn example_4_1() -> Self {
        let h = |v: f64| CMatrix::from_element(1, 1, cx(v, 0.0));
        PsiBlock::new(
            1,
            vec![h(0.5), h(-0.5)],
            vec![h(0.5), h(0.5)],
            vec![h(0.5), h(0.5)],
            vec![h(0.5), h(-0.5)],
        )
        .expect("static coefficients")
    }

    pub fn eval_blocks(&self, lambda: C64) -> (CMatrix, CMatrix, CMatrix, CMatrix) {
        (
            poly_eval(&self.b11, lambda, self.dim),
            poly_eval(&self.b12, lambda, self.dim),
            poly_eval(&self.b21, lambda, self.dim),
            poly_eval(&self.b22, lambda, self.dim),
        )
    }

    pub fn eval(&self, lambda: C64) -> CMatrix {
        let (p11, p12, p21, p22) = self.eval_blocks(lambda);
        let n = self.dim;
        let mut w = CMatrix::zeros(2 * n, 2 * n);
        w.view_mut((0, 0), (n, n)).copy_from(&p11);
        w.view_mut((0, n), (n, n)).copy_from(&p12);
        w.view_mut((n, 0), (n, n)).copy_from(&p21);
        w.view_mut((n, n), (n, n)).copy_from(&p22);
        w
    }

    /// `Jhat Psi(lambda)^{-1} Jhat`, defined where `Psi` is invertible.
    pub fn eval_tilde(&self, lambda: C64, tol: f64) -> Result<CMatrix> {
        let w = self.eval(lambda);
        let sig = SignaturePair::new(self.dim);
        let inv = linalg::inv(&w, tol)?;
        Ok(&sig.jhat * inv * &sig.jhat)
    }

    /// Pointwise transformation value `(P11 F + P12)(P21 F + P22)^{-1}`.
    fn mobius(&self, lambda: C64, f_value: &CMatrix, tol: f64) -> Result<CMatrix> {
        let (p11, p12, p21, p22) = self.eval_blocks(lambda);
        let denom = &p21 * f_value + &p22;
        let k = linalg::cond(&denom);
        if !k.is_finite() || k >= 1.0 / tol.max(ABS_FLOOR) {
            return Err(Error::OutOfDomain {
                detail: format!("P21 F + P22 singular at {lambda}"),
            });
        }
        let numer = &p11 * f_value + &p12;
        Ok(linalg::solve(&denom.transpose(), &numer.transpose(), tol)?.transpose())
    }

    /// Grid validation: J-contractivity margin, the `det not identically
    /// zero` verdict, and the list of grid points where `Psi` is singular.
    pub fn validate(&mut self, grid: &DiscGrid, tol: f64) -> Result<()> {
        let sig = SignaturePair::new(self.dim);
        let mut margin = f64::INFINITY;
        let mut det_max = 0.0f64;
        let mut singular = Vec::new();
        for lambda in grid.points() {
            let w = self.eval(lambda);
            let scale = 1.0 + opnorm(&w).powi(2);
            let defect = symmetrize(&(&sig.j - w.adjoint() * &sig.j * &w));
            let m = eigmin_herm(&defect)?;
            margin = margin.min(m);
            if m < -scaled_tol(tol, scale) {
                return Err(Error::NotJContractive { excess: -m });
            }
            let det = w.determinant().norm();
            det_max = det_max.max(det);
            if det <= scaled_tol(tol, scale) {
                singular.push(lambda);
            }
        }
        self.jcontr_margin_on_grid = margin;
        self.det_not_identically_zero = det_max > tol;
        self.singular_points = singular;
        if !self.det_not_identically_zero {
            return Err(Error::InvalidArgument(
                "det Psi vanishes on the whole grid".into(),
            ));
        }
        Ok(())
    }

    fn is_singular_at(&self, lambda: C64) -> bool {
        self.singular_points
            .iter()
            .any(|s| (s - lambda).norm() < 1e-12)
    }
}

/// Pairwise pointwise-equivalence audit over a set of interior points.
#[derive(Debug, Clone)]
pub struct PointwiseEquivReport {
    pub pairs: usize,
    pub max_xt_norm: f64,
    /// Constant support rank observed across the points.
    pub support_rank: usize,
}

/// Checks `F(l1) ~ F(l2)` for every pair of sample points; failure means
/// the model is not a single Caratheodory function.
pub fn pointwise_equiv_audit(
    f: &CaraFunction,
    pts: &[C64],
    tol: f64,
) -> Result<PointwiseEquivReport> {
    let values: Vec<PRMatrix> = pts
        .iter()
        .map(|&l| f.eval(l, tol))
        .collect::<Result<_>>()?;
    let rank = values
        .first()
        .map(|v| v.support.rank)
        .ok_or_else(|| Error::InvalidArgument("no sample points".into()))?;
    for v in &values {
        if v.support.rank != rank {
            return Err(Error::InvalidArgument(format!(
                "support rank varies across points: {} vs {}",
                v.support.rank, rank
            )));
        }
    }
    let mut pairs = 0;
    let mut max_xt = 0.0f64;
    for i in 0..values.len() {
        for j in (i + 1)..values.len() {
            let w = equiv_check(&values[i], &values[j], tol)?;
            max_xt = max_xt.max(w.xt_norm());
            pairs += 1;
        }
    }
    Ok(PointwiseEquivReport {
        pairs,
        max_xt_norm: max_xt,
        support_rank: rank,
    })
}

/// Grid verdict for `F prec_C G`: per-point witness norms and the grid sup
/// of `||Q||`. The sup is an estimate relative to the grid, never a proof
/// of boundedness on the open disc.
#[derive(Debug, Clone)]
pub struct PrecCReport {
    pub q_norms: Vec<(C64, f64)>,
    pub sup_q_estimate: f64,
    pub delta_min: f64,
}

pub fn prec_c_check(
    f: &CaraFunction,
    g: &CaraFunction,
    grid: &DiscGrid,
    tol: f64,
) -> Result<PrecCReport> {
    if f.dim != g.dim {
        return Err(Error::DimMismatch {
            left: format!("dim {}", f.dim),
            right: format!("dim {}", g.dim),
        });
    }
    let mut q_norms = Vec::new();
    let mut sup = 0.0f64;
    for lambda in grid.points() {
        let fv = f.eval(lambda, tol)?;
        let gv = g.eval(lambda, tol)?;
        let w = prec_check(&fv, &gv, tol)?;
        let n = w.x_norm();
        sup = sup.max(n);
        q_norms.push((lambda, n));
    }
    Ok(PrecCReport {
        q_norms,
        sup_q_estimate: sup,
        delta_min: grid.delta_min(),
    })
}

/// Grid verdict for `F sim_C G` with witness-continuity spot checks along
/// each ring.
#[derive(Debug, Clone)]
pub struct EquivCReport {
    pub sup_qt_estimate: f64,
    pub sup_rt_estimate: f64,
    pub support_rank: usize,
    pub delta_min: f64,
    /// Largest `||Qt(l_{j+1}) - Qt(l_j)|| / |l_{j+1} - l_j|` along rings.
    pub max_increment_ratio: f64,
    /// Crude Lipschitz cap the increments were compared against.
    pub increment_cap: f64,
    pub continuity_ok: bool,
    /// Ambient witnesses per grid point, in grid order.
    pub qt_ambient: Vec<CMatrix>,
}

pub fn equiv_c_check(
    f: &CaraFunction,
    g: &CaraFunction,
    grid: &DiscGrid,
    tol: f64,
) -> Result<EquivCReport> {
    if f.dim != g.dim {
        return Err(Error::DimMismatch {
            left: format!("dim {}", f.dim),
            right: format!("dim {}", g.dim),
        });
    }
    let pts = grid.points();
    let mut sup_qt = 0.0f64;
    let mut sup_rt = 0.0f64;
    let mut qt_ambient = Vec::with_capacity(pts.len());
    let mut rank: Option<usize> = None;
    let mut sup_values = 0.0f64;
    for &lambda in &pts {
        let fv = f.eval(lambda, tol)?;
        let gv = g.eval(lambda, tol)?;
        sup_values = sup_values.max(fv.norm()).max(gv.norm());
        let w = equiv_check(&fv, &gv, tol)?;
        match rank {
            None => rank = Some(fv.support.rank),
            Some(r) if r != fv.support.rank => {
                return Err(Error::InvalidArgument(format!(
                    "support rank varies across the grid: {} vs {r}",
                    fv.support.rank
                )))
            }
            _ => {}
        }
        sup_qt = sup_qt.max(w.xt_norm());
        sup_rt = sup_rt.max(opnorm(&w.yt));
        qt_ambient.push(w.xt_ambient());
    }
    // continuity heuristic: successive samples on a ring should move at a
    // rate no worse than a crude derivative bound at distance delta_min
    // from the boundary
    let mut max_ratio = 0.0f64;
    let k = grid.angles;
    if k > 1 {
        for (ri, _) in grid.radii.iter().enumerate() {
            for j in 0..k {
                let a = ri * k + j;
                let b = ri * k + (j + 1) % k;
                let gap = (pts[a] - pts[b]).norm();
                if gap > ABS_FLOOR {
                    let diff = opnorm(&(&qt_ambient[a] - &qt_ambient[b]));
                    max_ratio = max_ratio.max(diff / gap);
                }
            }
        }
    }
    let increment_cap = 64.0 * (1.0 + sup_qt + sup_values) / grid.delta_min();
    Ok(EquivCReport {
        sup_qt_estimate: sup_qt,
        sup_rt_estimate: sup_rt,
        support_rank: rank.unwrap_or(0),
        delta_min: grid.delta_min(),
        max_increment_ratio: max_ratio,
        increment_cap,
        continuity_ok: max_ratio <= increment_cap,
        qt_ambient,
    })
}

/// Minimum of `eigmin(Re F)` over the grid; positive means strict at grid
/// scale.
pub fn is_strict(f: &CaraFunction, grid: &DiscGrid, tol: f64) -> Result<f64> {
    let mut rho = f64::INFINITY;
    for lambda in grid.points() {
        let v = f.eval(lambda, tol)?;
        rho = rho.min(eigmin_herm(&v.re_part)?);
    }
    Ok(rho)
}

/// Applies `T_Psi` to `F`, checking the domain condition at every grid
/// point, and returns the lazy composition.
pub fn t_psi_apply(
    psi: &PsiBlock,
    f: &CaraFunction,
    grid: &DiscGrid,
    tol: f64,
) -> Result<CaraFunction> {
    if psi.dim != f.dim {
        return Err(Error::DimMismatch {
            left: format!("Psi dim {}", psi.dim),
            right: format!("F dim {}", f.dim),
        });
    }
    for lambda in grid.points() {
        let fv = f.eval(lambda, tol)?;
        // domain + image validation in one evaluation
        let raw = psi.mobius(lambda, &fv.value, tol)?;
        make_pr(&raw, tol).map_err(|e| match e {
            Error::NotPositiveReal { eigmin } => Error::NotCaratheodory {
                point: format!("{lambda}"),
                eigmin,
            },
            other => other,
        })?;
    }
    let model = CaraModel::LftComposed {
        psi: Box::new(psi.clone()),
        inner: Box::new(f.clone()),
    };
    let support = probe_support(&model, f.dim, tol)?;
    Ok(CaraFunction {
        dim: f.dim,
        model,
        support,
    })
}

/// The literal textbook display `(P11 + P12 F)(P22 + P21 F)^{-1}`, exposed
/// for comparison against the convention actually used by [`t_psi_apply`].
pub fn t_psi_eval_literal(
    psi: &PsiBlock,
    f: &CaraFunction,
    lambda: C64,
    tol: f64,
) -> Result<CMatrix> {
    check_interior(lambda)?;
    let fv = f.eval_raw(lambda, tol)?;
    let (p11, p12, p21, p22) = psi.eval_blocks(lambda);
    let denom = &p22 + &p21 * &fv;
    let k = linalg::cond(&denom);
    if !k.is_finite() || k >= 1.0 / tol.max(ABS_FLOOR) {
        return Err(Error::OutOfDomain {
            detail: format!("P22 + P21 F singular at {lambda}"),
        });
    }
    let numer = &p11 + &p12 * &fv;
    Ok(linalg::solve(&denom.transpose(), &numer.transpose(), tol)?.transpose())
}

/// Grid proxy for membership in the reduced domain: `F` bounded and
/// Caratheodory on the grid with `(Pt11 + F Pt21)^{-1}` bounded away from
/// the flagged singular points of `Psi`.
#[derive(Debug, Clone)]
pub struct ReducedDomainReport {
    pub sup_f: f64,
    pub sup_resolvent: f64,
    pub in_reduced_domain: bool,
}

pub fn reduced_domain_check(
    psi: &PsiBlock,
    f: &CaraFunction,
    grid: &DiscGrid,
    tol: f64,
) -> Result<ReducedDomainReport> {
    let mut sup_f = 0.0f64;
    let mut sup_res = 0.0f64;
    for lambda in grid.points() {
        let fv = f.eval(lambda, tol)?;
        sup_f = sup_f.max(fv.norm());
        if psi.is_singular_at(lambda) {
            continue;
        }
        let wt = match psi.eval_tilde(lambda, tol) {
            Ok(wt) => wt,
            Err(_) => continue, // near-singular point missed by the flags
        };
        let pt11 = block(&wt, psi.dim, 0, 0);
        let pt21 = block(&wt, psi.dim, 1, 0);
        let m = &pt11 + &fv.value * &pt21;
        match linalg::inv(&m, tol) {
            Ok(inv) => sup_res = sup_res.max(opnorm(&inv)),
            Err(_) => sup_res = f64::INFINITY,
        }
    }
    Ok(ReducedDomainReport {
        sup_f,
        sup_resolvent: sup_res,
        in_reduced_domain: sup_f < HINF_CAP && sup_res < HINF_CAP,
    })
}

/// Equivalence-preservation audit for `T_Psi`: certifies `F sim_C G` on
/// the grid, pushes both functions through, re-checks on the images, and
/// asserts the pointwise norm control `||Qt_Psi|| <= sup||Qt|| + tol` at
/// grid points where `Psi` is invertible.
#[derive(Debug, Clone)]
pub struct EquivPreservationReport {
    pub base: EquivCReport,
    pub image: EquivCReport,
    pub norm_control_ok: bool,
    pub worst_excess: f64,
}

pub fn preservation_audit_equiv(
    psi: &PsiBlock,
    f: &CaraFunction,
    g: &CaraFunction,
    grid: &DiscGrid,
    tol: f64,
) -> Result<EquivPreservationReport> {
    let base = equiv_c_check(f, g, grid, tol)?;
    let tf = t_psi_apply(psi, f, grid, tol)?;
    let tg = t_psi_apply(psi, g, grid, tol)?;
    let image = equiv_c_check(&tf, &tg, grid, tol)?;
    let mut worst = f64::NEG_INFINITY;
    for (lambda, qt) in grid.points().iter().zip(image.qt_ambient.iter()) {
        if psi.is_singular_at(*lambda) {
            continue;
        }
        worst = worst.max(opnorm(qt) - base.sup_qt_estimate);
    }
    Ok(EquivPreservationReport {
        norm_control_ok: worst <= tol,
        worst_excess: worst,
        base,
        image,
    })
}

/// Pre-order preservation audit: certifies `F prec_C G` on the grid with
/// both functions in the reduced domain, then re-checks the pre-order on
/// the images. Outside the reduced domain the image sup is still reported
/// so divergence can be observed.
#[derive(Debug, Clone)]
pub struct PrecPreservationReport {
    pub base: PrecCReport,
    pub image: PrecCReport,
    pub f_reduced: ReducedDomainReport,
    pub g_reduced: ReducedDomainReport,
}

pub fn preservation_audit_prec(
    psi: &PsiBlock,
    f: &CaraFunction,
    g: &CaraFunction,
    grid: &DiscGrid,
    tol: f64,
) -> Result<PrecPreservationReport> {
    let base = prec_c_check(f, g, grid, tol)?;
    let f_reduced = reduced_domain_check(psi, f, grid, tol)?;
    let g_reduced = reduced_domain_check(psi, g, grid, tol)?;
    let tf = t_psi_apply(psi, f, grid, tol)?;
    let tg = t_psi_apply(psi, g, grid, tol)?;
    let image = prec_c_check(&tf, &tg, grid, tol)?;
    Ok(PrecPreservationReport {
        base,
        image,
        f_reduced,
        g_reduced,
    })
}

/// Values `||F((1 - delta) beta) u||` along a radius, for boundary-decay
/// probes.
#[derive(Debug, Clone)]
pub struct RadialProbe {
    pub samples: Vec<(f64, f64)>,
    pub decays_below: f64,
    pub decays: bool,
}

pub fn radial_limit_probe(
    f: &CaraFunction,
    u: &CMatrix,
    beta: C64,
    deltas: &[f64],
    tol: f64,
) -> Result<RadialProbe> {
    if (beta.norm() - 1.0).abs() > 1e-12 {
        return Err(Error::InvalidArgument(format!(
            "beta must be unimodular, |beta| = {}",
            beta.norm()
        )));
    }
    let mut samples = Vec::new();
    for &d in deltas {
        if !(0.0..1.0).contains(&d) || d == 0.0 {
            return Err(Error::InvalidArgument(format!("delta {d} out of (0,1)")));
        }
        let v = f.eval(beta * cx(1.0 - d, 0.0), tol)?;
        samples.push((d, (&v.value * u).norm()));
    }
    let last = samples.iter().map(|s| s.1).next_back().unwrap_or(f64::NAN);
    let decays = samples.windows(2).all(|w| w[1].1 <= w[0].1 + tol);
    Ok(RadialProbe {
        samples,
        decays_below: last,
        decays,
    })
}

/// Full reproduction of the scalar Mobius counterexample.
#[derive(Debug, Clone)]
pub struct Example41Report {
    /// (a) `eigmin(J - Psi*J Psi)` over a 32x32 grid (normalized symbol).
    pub j_margin_min: f64,
    /// The literal unscaled symbol is not `J2`-contractive; most negative
    /// eigenvalue of `J2 - Psi_raw* J2 Psi_raw` over the grid, recorded as
    /// the documented discrepancy.
    pub j2_literal_defect_min: f64,
    /// (b) `sup |T[1](l) - 1|` over the grid.
    pub t_one_sup_dev: f64,
    /// (c) per-delta relative deviation of `T[0](1 - d)` from `(2 - d)/d`.
    pub mobius_rel_devs: Vec<(f64, f64)>,
    /// (d) max deviation of `Re T[0](l)` from `(1 - |l|^2)/|1 - l|^2`.
    pub re_formula_dev: f64,
    /// (e) `(delta_min, sup||Q||)` ladder for the image pair.
    pub sup_q_ladder: Vec<(f64, f64)>,
    pub det_max_dev: f64,
    pub pass_a: bool,
    pub pass_b: bool,
    pub pass_c: bool,
    pub pass_d: bool,
    pub pass_e: bool,
}

impl Example41Report {
    pub fn all_pass(&self) -> bool {
        self.pass_a && self.pass_b && self.pass_c && self.pass_d && self.pass_e
    }
}

pub fn example_4_1(deltas: &[f64], tol: f64) -> Result<Example41Report> {
    let mut psi = PsiBlock::example_4_1();
    let grid = DiscGrid::standard(32, 32, 1e-2)?;
    psi.validate(&grid, tol)?;
    let pass_a = psi.jcontr_margin_on_grid >= -tol;

    // raw (unscaled) symbol against J2, kept as a record of the printed
    // display rather than a hypothesis check
    let raw = PsiBlock::new(
        1,
        psi.b11.iter().map(|c| c * cx(2.0, 0.0)).collect(),
        psi.b12.iter().map(|c| c * cx(2.0, 0.0)).collect(),
        psi.b21.iter().map(|c| c * cx(2.0, 0.0)).collect(),
        psi.b22.iter().map(|c| c * cx(2.0, 0.0)).collect(),
    )?;
    let sig = SignaturePair::new(1);
    let mut j2_defect = f64::INFINITY;
    let mut det_max_dev = 0.0f64;
    for lambda in grid.points() {
        let w = raw.eval(lambda);
        let defect = symmetrize(&(&sig.jhat - w.adjoint() * &sig.jhat * &w));
        j2_defect = j2_defect.min(eigmin_herm(&defect)?);
        // the normalized symbol matches the printed determinant exactly
        let det = psi.eval(lambda).determinant();
        det_max_dev = det_max_dev.max((det + lambda).norm());
    }

    let zero = CaraFunction::scalar_constant(cx(0.0, 0.0), tol)?;
    let one = CaraFunction::scalar_constant(cx(1.0, 0.0), tol)?;
    let t_zero = t_psi_apply(&psi, &zero, &grid, tol)?;
    let t_one = t_psi_apply(&psi, &one, &grid, tol)?;

    let mut t_one_sup_dev = 0.0f64;
    let mut re_formula_dev = 0.0f64;
    for lambda in grid.points() {
        let v1 = t_one.eval(lambda, tol)?;
        t_one_sup_dev = t_one_sup_dev.max((v1.value[(0, 0)] - cx(1.0, 0.0)).norm());
        let v0 = t_zero.eval(lambda, tol)?;
        let expected = (1.0 - lambda.norm_sqr()) / (cx(1.0, 0.0) - lambda).norm_sqr();
        re_formula_dev = re_formula_dev.max((v0.re_part[(0, 0)].re - expected).abs());
    }
    let pass_b = t_one_sup_dev <= 1e-12;
    let pass_d = re_formula_dev <= 1e-12;

    let mut mobius_rel_devs = Vec::new();
    let mut pass_c = true;
    for &d in deltas {
        let v = t_zero.eval(cx(1.0 - d, 0.0), tol)?;
        let expected = (2.0 - d) / d;
        let rel = (v.value[(0, 0)] - cx(expected, 0.0)).norm() / expected;
        pass_c &= rel <= 1e-12;
        mobius_rel_devs.push((d, rel));
    }

    let mut sup_q_ladder = Vec::new();
    let mut pass_e = true;
    let mut prev_sup = 0.0f64;
    for &dm in &[1e-2, 1e-3, 1e-4] {
        let ladder_grid = DiscGrid::standard(8, 16, dm)?;
        let rep = prec_c_check(&t_zero, &t_one, &ladder_grid, tol)?;
        pass_e &= rep.sup_q_estimate * dm >= 0.5 && rep.sup_q_estimate > prev_sup;
        prev_sup = rep.sup_q_estimate;
        sup_q_ladder.push((dm, rep.sup_q_estimate));
    }

    Ok(Example41Report {
        j_margin_min: psi.jcontr_margin_on_grid,
        j2_literal_defect_min: j2_defect,
        t_one_sup_dev,
        mobius_rel_devs,
        re_formula_dev,
        sup_q_ladder,
        det_max_dev,
        pass_a,
        pass_b,
        pass_c,
        pass_d,
        pass_e,
    })
}

/// Random Herglotz model with `n_terms` kernel terms. `strict` adds a
/// positive multiple of the identity to `P0`, which also pins the support
/// to the whole space.
pub fn sample_herglotz(
    dim: usize,
    n_terms: usize,
    strict: bool,
    seed: u64,
) -> Result<CaraFunction> {
    let mut rng = pr::seeded_rng(seed ^ 0xC0FFEE);
    let h0 = pr::random_hermitian(&mut rng, dim);
    let g = pr::random_gaussian_matrix(&mut rng, dim, dim);
    let mut p0 = symmetrize(&(g.adjoint() * &g)) * cx(0.5, 0.0);
    if strict {
        p0 += CMatrix::identity(dim, dim) * cx(0.3, 0.0);
    }
    let mut terms = Vec::with_capacity(n_terms);
    for _ in 0..n_terms {
        let th: f64 = rng.random::<f64>() * 2.0 * std::f64::consts::PI;
        let gk = pr::random_gaussian_matrix(&mut rng, dim, dim);
        let pk = symmetrize(&(gk.adjoint() * &gk)) * cx(0.2, 0.0);
        terms.push(HerglotzTerm {
            beta: Complex::from_polar(1.0, th),
            p: pk,
        });
    }
    CaraFunction::herglotz(h0, p0, terms, 1e-10)
}

/// Strict, uniformly bounded Caratheodory function via the Cayley
/// transform of a strict contraction: `F = (I + l S)(I - l S)^{-1}` with
/// `||S|| <= s < 1`, so `Re F >= (1 - s^2)/(1 + s)^2 > 0` on all of the
/// disc and `||F|| <= (1 + s)/(1 - s)`.
pub fn sample_cayley_bounded(dim: usize, s: f64, seed: u64) -> Result<CaraFunction> {
    if !(0.0..1.0).contains(&s) {
        return Err(Error::InvalidArgument(format!(
            "contraction bound must be in [0, 1), got {s}"
        )));
    }
    let mut rng = pr::seeded_rng(seed ^ 0xCA11EB);
    let g = pr::random_gaussian_matrix(&mut rng, dim, dim);
    let norm = opnorm(&g);
    let sc = if norm > ABS_FLOOR {
        g * cx(s / norm, 0.0)
    } else {
        g
    };
    let id = CMatrix::identity(dim, dim);
    CaraFunction::rational(vec![id.clone(), sc.clone()], vec![id, -sc], 1e-10)
}

/// Ensures the real part of a raw value is PSD up to `tol`; used by tests
/// that bypass [`CaraFunction::eval`].
pub fn re_margin(value: &CMatrix) -> Result<f64> {
    eigmin_herm(&herm_part(value)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lft::sample_jcontractive;

    fn one() -> C64 {
        cx(1.0, 0.0)
    }

    fn small_grid() -> DiscGrid {
        DiscGrid::standard(4, 8, 1e-1).unwrap()
    }

    #[test]
    fn grid_construction() {
        let g = DiscGrid::standard(4, 8, 1e-2).unwrap();
        assert_eq!(g.points().len(), 32);
        assert!((g.delta_min() - 1e-2).abs() < 1e-15);
        // angle zero present on each ring
        assert!(g.points()[0].im.abs() < 1e-15);
        assert!(DiscGrid::new(vec![0.5, 0.4], 4).is_err());
        assert!(DiscGrid::new(vec![0.5, 1.0], 4).is_err());
    }

    #[test]
    fn herglotz_scalar_mobius() {
        // single term beta = 1, P = 1 gives (1 + l)/(1 - l)
        let f = CaraFunction::herglotz(
            CMatrix::zeros(1, 1),
            CMatrix::zeros(1, 1),
            vec![HerglotzTerm {
                beta: one(),
                p: CMatrix::identity(1, 1),
            }],
            1e-10,
        )
        .unwrap();
        let v0 = f.eval(cx(0.0, 0.0), 1e-10).unwrap();
        assert!((v0.value[(0, 0)] - one()).norm() < 1e-14);
        for d in [0.5, 0.1, 1e-3] {
            let v = f.eval(cx(1.0 - d, 0.0), 1e-10).unwrap();
            let expected = (2.0 - d) / d;
            assert!((v.value[(0, 0)] - cx(expected, 0.0)).norm() / expected < 1e-12);
        }
    }

    #[test]
    fn herglotz_positivity_random() {
        let mut rng = pr::test_rng(7);
        for seed in 0..20u64 {
            let f = sample_herglotz(3, 3, false, seed).unwrap();
            for _ in 0..10 {
                let r: f64 = rng.random::<f64>().sqrt() * 0.999;
                let th: f64 = rng.random::<f64>() * 2.0 * std::f64::consts::PI;
                let v = f.eval(Complex::from_polar(r, th), 1e-10).unwrap();
                assert!(eigmin_herm(&v.re_part).unwrap() >= -1e-12);
            }
        }
    }

    #[test]
    fn eval_rejects_boundary() {
        let f = CaraFunction::scalar_constant(one(), 1e-10).unwrap();
        assert!(matches!(
            f.eval(cx(1.0, 0.0), 1e-10),
            Err(Error::OutsideDisc { .. })
        ));
    }

    #[test]
    fn rational_rejected_when_not_pr() {
        // F(l) = -1 constant via rational coefficients
        let f = CaraFunction::rational(
            vec![-CMatrix::identity(1, 1)],
            vec![CMatrix::identity(1, 1)],
            1e-10,
        );
        assert!(f.is_err());
    }

    #[test]
    fn cayley_model_strict_and_bounded() {
        let f = sample_cayley_bounded(3, 0.6, 11).unwrap();
        let grid = DiscGrid::standard(6, 12, 1e-3).unwrap();
        let rho = is_strict(&f, &grid, 1e-10).unwrap();
        assert!(rho > (1.0 - 0.36) / (1.6 * 1.6) - 1e-9, "rho = {rho}");
        let mut sup = 0.0f64;
        for l in grid.points() {
            sup = sup.max(f.eval(l, 1e-10).unwrap().norm());
        }
        assert!(sup <= 1.6 / 0.4 + 1e-9);
    }

    #[test]
    fn pointwise_audit_scalar_closed_form() {
        let f = CaraFunction::herglotz(
            CMatrix::zeros(1, 1),
            CMatrix::zeros(1, 1),
            vec![HerglotzTerm {
                beta: one(),
                p: CMatrix::identity(1, 1),
            }],
            1e-10,
        )
        .unwrap();
        let rep =
            pointwise_equiv_audit(&f, &[cx(0.0, 0.0), cx(0.5, 0.0)], 1e-10).unwrap();
        assert_eq!(rep.pairs, 1);
        // F(0) - F(1/2) = -2 = Re(F(0))^{1/2} Xt Re(F(1/2))^{1/2} = Xt*sqrt(3)
        assert!((rep.max_xt_norm - 2.0 / 3.0f64.sqrt()).abs() < 1e-10);
    }

    #[test]
    fn pointwise_audit_random_models() {
        for seed in 0..5u64 {
            let f = sample_herglotz(3, 2, false, 100 + seed).unwrap();
            let pts = [
                cx(0.0, 0.0),
                cx(0.4, 0.1),
                cx(-0.3, 0.5),
                cx(0.1, -0.6),
                cx(-0.5, -0.2),
                cx(0.7, 0.0),
            ];
            let rep = pointwise_equiv_audit(&f, &pts, 1e-8).unwrap();
            assert_eq!(rep.pairs, 15);
        }
    }

    #[test]
    fn prec_c_identity_and_bounded_vs_one() {
        let grid = small_grid();
        let f = sample_cayley_bounded(2, 0.5, 3).unwrap();
        let rep = prec_c_check(&f, &f, &grid, 1e-9).unwrap();
        assert!(rep.sup_q_estimate < 1e-9);

        // G = I: Q(l) = F(l) - I
        let g = CaraFunction::constant(&CMatrix::identity(2, 2), 1e-10).unwrap();
        let rep = prec_c_check(&f, &g, &grid, 1e-9).unwrap();
        let mut expected = 0.0f64;
        for l in grid.points() {
            let fv = f.eval(l, 1e-10).unwrap();
            expected = expected.max(opnorm(&(&fv.value - CMatrix::identity(2, 2))));
        }
        assert!((rep.sup_q_estimate - expected).abs() < 1e-8);
    }

    #[test]
    fn prec_c_mobius_divergence() {
        let zero = CaraFunction::scalar_constant(cx(0.0, 0.0), 1e-10).unwrap();
        let g = CaraFunction::herglotz(
            CMatrix::zeros(1, 1),
            CMatrix::zeros(1, 1),
            vec![HerglotzTerm {
                beta: one(),
                p: CMatrix::identity(1, 1),
            }],
            1e-10,
        )
        .unwrap();
        let mut prev = 0.0;
        for dm in [1e-1, 1e-2, 1e-3] {
            let grid = DiscGrid::standard(4, 8, dm).unwrap();
            let rep = prec_c_check(&zero, &g, &grid, 1e-8).unwrap();
            assert!(rep.sup_q_estimate > prev);
            prev = rep.sup_q_estimate;
        }
        // |Q| = |G|/Re(G) at l = 1 - dm is about 1/dm
        assert!(prev > 100.0);
    }

    #[test]
    fn equiv_c_strict_bounded_class() {
        let f = sample_cayley_bounded(2, 0.5, 21).unwrap();
        let g = sample_cayley_bounded(2, 0.4, 22).unwrap();
        let coarse = DiscGrid::standard(6, 12, 1e-2).unwrap();
        let fine = DiscGrid::standard(6, 12, 1e-3).unwrap();
        let rc = equiv_c_check(&f, &g, &coarse, 1e-8).unwrap();
        let rf = equiv_c_check(&f, &g, &fine, 1e-8).unwrap();
        assert!(rc.continuity_ok);
        assert!(rf.sup_qt_estimate <= 2.0 * rc.sup_qt_estimate + 1e-9);
        assert_eq!(rc.support_rank, 2);
    }

    #[test]
    fn equiv_c_unbounded_witness_growth() {
        let one_f = CaraFunction::scalar_constant(one(), 1e-10).unwrap();
        let g = CaraFunction::herglotz(
            CMatrix::zeros(1, 1),
            CMatrix::zeros(1, 1),
            vec![HerglotzTerm {
                beta: one(),
                p: CMatrix::identity(1, 1),
            }],
            1e-10,
        )
        .unwrap();
        let mut prev = 0.0;
        for dm in [1e-1, 1e-2, 1e-3] {
            let grid = DiscGrid::standard(4, 8, dm).unwrap();
            let rep = equiv_c_check(&one_f, &g, &grid, 1e-8).unwrap();
            assert!(rep.sup_qt_estimate > prev);
            prev = rep.sup_qt_estimate;
        }
        assert!(prev > 10.0);
    }

    #[test]
    fn strictness_values() {
        let grid = small_grid();
        let id = CaraFunction::constant(&CMatrix::identity(2, 2), 1e-10).unwrap();
        assert!((is_strict(&id, &grid, 1e-10).unwrap() - 1.0).abs() < 1e-12);

        // F(l) = 1 - l: minimum on the grid is delta_min
        let f = CaraFunction::rational(
            vec![CMatrix::identity(1, 1), -CMatrix::identity(1, 1)],
            vec![CMatrix::identity(1, 1)],
            1e-10,
        )
        .unwrap();
        let rho = is_strict(&f, &grid, 1e-10).unwrap();
        assert!((rho - grid.delta_min()).abs() < 1e-12);

        let imag = CaraFunction::scalar_constant(cx(0.0, 1.0), 1e-10).unwrap();
        assert!(is_strict(&imag, &grid, 1e-10).unwrap().abs() < 1e-14);
    }

    #[test]
    fn t_psi_identity_blocks() {
        let grid = small_grid();
        let id = CMatrix::identity(2, 2);
        let psi = {
            let mut p = PsiBlock::new(
                2,
                vec![id.clone()],
                vec![CMatrix::zeros(2, 2)],
                vec![CMatrix::zeros(2, 2)],
                vec![id.clone()],
            )
            .unwrap();
            p.validate(&grid, 1e-10).unwrap();
            p
        };
        let f = sample_herglotz(2, 1, true, 31).unwrap();
        let tf = t_psi_apply(&psi, &f, &grid, 1e-9).unwrap();
        for l in [cx(0.2, 0.1), cx(-0.4, 0.3)] {
            let a = f.eval(l, 1e-10).unwrap();
            let b = tf.eval(l, 1e-10).unwrap();
            assert!(opnorm(&(&a.value - &b.value)) < 1e-10);
        }
    }

    #[test]
    fn t_psi_example_values_and_literal_flag() {
        let grid = small_grid();
        let mut psi = PsiBlock::example_4_1();
        psi.validate(&grid, 1e-10).unwrap();
        assert!(psi.det_not_identically_zero);
        let zero = CaraFunction::scalar_constant(cx(0.0, 0.0), 1e-10).unwrap();
        let one_f = CaraFunction::scalar_constant(one(), 1e-10).unwrap();
        let t0 = t_psi_apply(&psi, &zero, &grid, 1e-10).unwrap();
        let t1 = t_psi_apply(&psi, &one_f, &grid, 1e-10).unwrap();
        let l = cx(0.3, 0.2);
        let expect = (one() + l) / (one() - l);
        assert!((t0.eval(l, 1e-10).unwrap().value[(0, 0)] - expect).norm() < 1e-13);
        assert!((t1.eval(l, 1e-10).unwrap().value[(0, 0)] - one()).norm() < 1e-13);
        // the literal display gives a different function for F = 0
        let lit = t_psi_eval_literal(&psi, &zero, l, 1e-10).unwrap();
        assert!((lit[(0, 0)] - expect).norm() > 0.1);
        assert!((lit[(0, 0)] - one()).norm() < 1e-13);
    }

    #[test]
    fn reduced_domain_verdicts() {
        let grid = small_grid();
        let id = CMatrix::identity(1, 1);
        let psi = {
            let mut p = PsiBlock::new(
                1,
                vec![id.clone()],
                vec![CMatrix::zeros(1, 1)],
                vec![CMatrix::zeros(1, 1)],
                vec![id.clone()],
            )
            .unwrap();
            p.validate(&grid, 1e-10).unwrap();
            p
        };
        let bounded = CaraFunction::scalar_constant(cx(2.0, 0.0), 1e-10).unwrap();
        assert!(reduced_domain_check(&psi, &bounded, &grid, 1e-9)
            .unwrap()
            .in_reduced_domain);

        // unbounded Mobius fails the cap on a fine grid
        let mobius = CaraFunction::herglotz(
            CMatrix::zeros(1, 1),
            CMatrix::zeros(1, 1),
            vec![HerglotzTerm {
                beta: one(),
                p: CMatrix::identity(1, 1),
            }],
            1e-10,
        )
        .unwrap();
        let fine = DiscGrid::standard(4, 8, 1e-6).unwrap();
        assert!(!reduced_domain_check(&psi, &mobius, &fine, 1e-9)
            .unwrap()
            .in_reduced_domain);
    }

    #[test]
    fn preservation_equiv_norm_control() {
        let grid = DiscGrid::standard(5, 10, 1e-2).unwrap();
        let f = sample_cayley_bounded(2, 0.5, 41).unwrap();
        let g = sample_cayley_bounded(2, 0.35, 42).unwrap();
        let w = sample_jcontractive(2, true, 43).unwrap();
        let psi = {
            let mut p = PsiBlock::from_constant_w(&w).unwrap();
            p.validate(&grid, 1e-10).unwrap();
            p
        };
        let rep = preservation_audit_equiv(&psi, &f, &g, &grid, 1e-8).unwrap();
        assert!(rep.norm_control_ok, "excess = {}", rep.worst_excess);
        assert!(rep.image.sup_qt_estimate <= rep.base.sup_qt_estimate + 1e-8);
    }

    #[test]
    fn preservation_prec_divergence_outside_reduced_domain() {
        let f = CaraFunction::scalar_constant(cx(0.0, 0.0), 1e-10).unwrap();
        let g = CaraFunction::scalar_constant(one(), 1e-10).unwrap();
        let psi_proto = PsiBlock::example_4_1();
        let mut prev = 0.0;
        for dm in [1e-2, 1e-3] {
            let grid = DiscGrid::standard(4, 8, dm).unwrap();
            let mut psi = psi_proto.clone();
            psi.validate(&grid, 1e-10).unwrap();
            let rep = preservation_audit_prec(&psi, &f, &g, &grid, 1e-8).unwrap();
            assert!(rep.base.sup_q_estimate <= 1.0 + 1e-9);
            assert!(rep.image.sup_q_estimate > prev);
            prev = rep.image.sup_q_estimate;
        }
        assert!(prev > 500.0);
    }

    #[test]
    fn radial_probe_cases() {
        let zero = CaraFunction::scalar_constant(cx(0.0, 0.0), 1e-10).unwrap();
        let u = CMatrix::identity(1, 1);
        let deltas = [0.5, 0.1, 1e-2, 1e-3];
        let p = radial_limit_probe(&zero, &u, one(), &deltas, 1e-12).unwrap();
        assert!(p.decays && p.decays_below < 1e-14);

        // G(l) = 1 - l along beta = 1 decays exactly like delta
        let g = CaraFunction::rational(
            vec![CMatrix::identity(1, 1), -CMatrix::identity(1, 1)],
            vec![CMatrix::identity(1, 1)],
            1e-10,
        )
        .unwrap();
        let p = radial_limit_probe(&g, &u, one(), &deltas, 1e-12).unwrap();
        assert!(p.decays);
        for (d, v) in &p.samples {
            assert!((v - d).abs() < 1e-13);
        }
    }

    #[test]
    fn example_4_1_full_report() {
        let rep = example_4_1(&[0.5, 1e-1, 1e-2, 1e-3], 1e-10).unwrap();
        assert!(rep.all_pass(), "{rep:?}");
        assert!(rep.det_max_dev < 1e-13);
        // the literal J2 form of the unscaled symbol is indefinite, which
        // is exactly the recorded discrepancy
        assert!(rep.j2_literal_defect_min < -0.5);
        // delta = 1/2 maps to 3, delta = 1e-3 to 1999
        assert!(rep.mobius_rel_devs.iter().all(|(_, r)| *r <= 1e-12));
    }

    #[test]
    fn support_constancy_low_rank() {
        // rank-deficient P0 and terms sharing the same range
        let mut p = CMatrix::zeros(2, 2);
        p[(0, 0)] = one();
        let f = CaraFunction::herglotz(
            CMatrix::zeros(2, 2),
            p.clone(),
            vec![HerglotzTerm {
                beta: cx(0.0, 1.0),
                p,
            }],
            1e-10,
        )
        .unwrap();
        assert_eq!(f.support.rank, 1);
        let pts = [cx(0.0, 0.0), cx(0.3, -0.2), cx(-0.6, 0.1)];
        let rep = pointwise_equiv_audit(&f, &pts, 1e-9).unwrap();
        assert_eq!(rep.support_rank, 1);
    }
}
