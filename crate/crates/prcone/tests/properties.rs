//! Randomized structural invariants, driven by proptest over seeds and
//! dimensions rather than raw matrix entries so every case stays inside
//! the documented samplers.

use num_complex::Complex;
use proptest::prelude::*;

use prcone::cara::sample_herglotz;
use prcone::lft::{apply, sample_jcontractive, useineq_check};
use prcone::linalg::{eigmin_herm, herm_part, opnorm, psd_sqrt, skew_part};
use prcone::pr::{equiv_check, prec_check, sample_pr, sample_prec_pair};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn hermitian_split_reconstructs(seed in 0u64..1_000_000, dim in 1usize..6) {
        let a = sample_pr(dim, dim, seed).unwrap();
        let h = herm_part(&a.value).unwrap();
        let s = skew_part(&a.value).unwrap();
        prop_assert!(opnorm(&(&h - h.adjoint())) < 1e-13 * (1.0 + opnorm(&h)));
        prop_assert!(opnorm(&(&h + s * Complex::new(0.0, 1.0) - &a.value)) < 1e-12 * (1.0 + a.norm()));
    }

    #[test]
    fn psd_sqrt_squares_back(seed in 0u64..1_000_000, dim in 1usize..6, drop in 0usize..2) {
        let rank = dim.saturating_sub(drop).max(1);
        let a = sample_pr(dim, rank, seed).unwrap();
        let (s, _) = psd_sqrt(&a.re_part, 1e-12).unwrap();
        prop_assert!(opnorm(&(&s * &s - &a.re_part)) < 1e-11 * (1.0 + opnorm(&a.re_part)));
    }

    #[test]
    fn sampled_pairs_always_certify(seed in 0u64..1_000_000, dim in 2usize..6) {
        let b = sample_pr(dim, dim, seed).unwrap();
        let (a, _) = sample_prec_pair(&b, 0.5, seed ^ 0x5EED).unwrap();
        let w = prec_check(&a, &b, 1e-8).unwrap();
        let k = w.x.nrows();
        let two_i = prcone::linalg::CMatrix::identity(k, k) * Complex::new(2.0, 0.0);
        prop_assert!(opnorm(&(&w.y - w.x.adjoint() - two_i)) < 1e-10);
        let rex = eigmin_herm(&(herm_part(&w.x).unwrap()
            + prcone::linalg::CMatrix::identity(k, k))).unwrap();
        prop_assert!(rex >= -1e-10);
        // strictly sampled pairs are equivalent both ways and the two-sided
        // witness certifies with controlled residuals
        let e = equiv_check(&a, &b, 1e-8).unwrap();
        let scale = a.norm() + b.norm();
        prop_assert!(e.forward.residual <= 1e-8 * scale.max(1.0));
        prop_assert!(e.backward.residual <= 1e-8 * scale.max(1.0));
    }

    #[test]
    fn lft_image_is_positive_real(seed in 0u64..1_000_000, dim in 2usize..5) {
        let w = sample_jcontractive(dim, true, seed).unwrap();
        let a = sample_pr(dim, dim, seed ^ 0xA11).unwrap();
        let ta = apply(&w, &a, 1e-9).unwrap();
        prop_assert!(eigmin_herm(&ta.re_part).unwrap() >= -1e-10 * (1.0 + ta.norm()));
        let b = sample_pr(dim, dim, seed ^ 0xB22).unwrap();
        let rep = useineq_check(&w, &a, &b, 1e-9).unwrap();
        prop_assert!(rep.all_ok());
    }

    #[test]
    fn herglotz_values_are_caratheodory(seed in 0u64..1_000_000, dim in 1usize..5,
                                        r in 0.0f64..0.95, th in 0.0f64..6.28) {
        let f = sample_herglotz(dim, 2, false, seed).unwrap();
        let l = Complex::from_polar(r, th);
        let v = f.eval(l, 1e-9).unwrap();
        prop_assert!(eigmin_herm(&v.re_part).unwrap() >= -1e-10 * (1.0 + v.norm()));
        // values outside the open disc are rejected
        prop_assert!(f.eval(Complex::from_polar(1.0 + r, th), 1e-9).is_err());
    }
}
