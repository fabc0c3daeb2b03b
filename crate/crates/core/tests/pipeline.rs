//! Cross-module checks through the public API: each test feeds one
//! module's output into another and compares against an independent value.

use hausdorff_core::canonical::{
    canonical_density_bound, canonical_from_moments, conv_group_power,
};
use hausdorff_core::densities::{density_cdf, density_moment, w_p, DensitySpec};
use hausdorff_core::fusscatalan::{binomial_sequence, fc_sequence, tau, FcParams};
use hausdorff_core::genfun::{eval_bp, eval_bpr, GenFun, C64};
use hausdorff_core::hausdorff::reconstruct_cdf;
use hausdorff_core::seqcore::{check_dilated_hausdorff, convolve, dilate_to_unit};
use hausdorff_core::{Scalar, Sequence};
use proptest::prelude::*;

fn params(p: Scalar, r: Scalar) -> FcParams {
    FcParams::new(p, r)
}

#[test]
fn fuss_catalan_moment_region() {
    // Moments on [0, tau_p] exactly when 0 <= r <= p (checked to order 24).
    for p in [Scalar::int(2), Scalar::int(3), Scalar::ratio(5, 2)] {
        let t = tau(&p).unwrap();
        for r in [Scalar::ratio(1, 2), Scalar::one(), p.clone()] {
            let a = fc_sequence(&params(p.clone(), r.clone()), 24);
            let rep = check_dilated_hausdorff(&a, &t, 0.0).unwrap();
            assert!(rep.verified(), "p={p} r={r}: {rep:?}");
        }
        let r = &p + &Scalar::one();
        let a = fc_sequence(&params(p.clone(), r.clone()), 24);
        assert!(
            !check_dilated_hausdorff(&a, &t, 0.0).unwrap().verified(),
            "p={p} r={r}"
        );
    }
}

#[test]
fn series_of_moments_matches_continuation() {
    let a = fc_sequence(&params(Scalar::int(2), Scalar::one()), 120);
    let f = GenFun::series(&a, Some(0.25)).unwrap();
    for z in [
        C64::new(0.1, 0.05),
        C64::new(-0.15, 0.1),
        C64::new(0.0, -0.2),
    ] {
        let s = f.eval(z, 1e-13).unwrap();
        let b = eval_bp(2.0, z, 1e-13).unwrap();
        assert!((s - b).norm() < 1e-10, "z={z}: {s} vs {b}");
    }
}

#[test]
fn convolution_power_is_power_of_generating_function() {
    // a^{(r)} has generating function B_p^r when c = A_n(p, 1).
    let a = fc_sequence(&params(Scalar::int(3), Scalar::one()), 60);
    let r = Scalar::ratio(5, 2);
    let ar = conv_group_power(&a, &r).unwrap();
    let f = GenFun::series(&ar.terms, Some(4.0 / 27.0)).unwrap();
    let z = C64::new(0.03, 0.04);
    let want = eval_bpr(3.0, 2.5, z, 1e-13).unwrap();
    assert!((f.eval(z, 1e-13).unwrap() - want).norm() < 1e-10);
    // And the exact terms are A_n(3, 5/2).
    assert_eq!(ar.terms, fc_sequence(&params(Scalar::int(3), r), 60));
}

#[test]
fn canonical_density_bound_matches_w_p() {
    // sup w_p = w_p(0+) = 1/p.
    for p in [2i64, 3] {
        let a = fc_sequence(&params(Scalar::int(p), Scalar::one()), 200);
        let d = canonical_density_bound(&a, &tau(&Scalar::int(p)).unwrap()).unwrap();
        let sup = w_p(p as f64, 1e-9, 1e-14).unwrap();
        assert!(d.rho <= sup + 1e-9, "p={p} rho={} sup={sup}", d.rho);
        assert!(d.rho > 0.9 * sup, "p={p} rho={} sup={sup}", d.rho);
    }
}

#[test]
fn binomial_moments_from_quadrature() {
    // C(pn, n) are the moments of 1 - p w_p on [0, tau_p].
    for p in [2i64, 3] {
        let exact = binomial_sequence(&params(Scalar::int(p), Scalar::one()), 8);
        let spec = DensitySpec::wp_inverse(p as f64).unwrap();
        for n in 0..=8 {
            let m = density_moment(&spec, n as u32, 512).unwrap();
            let want = exact[n].to_f64();
            assert!(
                (m - want).abs() <= 1e-9 * want,
                "p={p} n={n}: {m} vs {want}"
            );
        }
    }
}

#[test]
fn reconstruction_commutes_with_dilation_and_converges() {
    let a = fc_sequence(&params(Scalar::int(2), Scalar::one()), 200);
    let mp = DensitySpec::marchenko_pastur();
    let mut errs = Vec::new();
    for n in [120, 200] {
        let direct = reconstruct_cdf(&a, n, &Scalar::int(4)).unwrap();
        let unit = dilate_to_unit(&a, &Scalar::int(4)).unwrap();
        let via_unit = reconstruct_cdf(&unit, n, &Scalar::one()).unwrap();
        assert_eq!(direct.cdf, via_unit.cdf);
        errs.push(direct.sup_distance(|x| density_cdf(&mp, x, 256).unwrap()));
    }
    assert!(errs[1] < errs[0], "{errs:?}");
}

#[test]
fn json_round_trips() {
    let a = fc_sequence(&params(Scalar::int(2), Scalar::ratio(1, 3)), 10);
    let text = serde_json::to_string(&a).unwrap();
    assert!(text.starts_with(r#"["1","1/3""#));
    assert_eq!(serde_json::from_str::<Sequence>(&text).unwrap(), a);
    let b = canonical_from_moments(&a).unwrap();
    let text = serde_json::to_string(&b).unwrap();
    assert_eq!(serde_json::from_str::<Sequence>(&text).unwrap(), b);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn fc_convolution_adds_r(r in 1i64..6, s in 1i64..6, n in 1usize..20) {
        // A(p, r) * A(p, s) = A(p, r + s).
        let p = Scalar::int(3);
        let ar = fc_sequence(&params(p.clone(), Scalar::ratio(r, 2)), n);
        let as_ = fc_sequence(&params(p.clone(), Scalar::ratio(s, 2)), n);
        let sum = fc_sequence(&params(p, Scalar::ratio(r + s, 2)), n);
        prop_assert_eq!(convolve(&ar, &as_), sum);
    }
}
