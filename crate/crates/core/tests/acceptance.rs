//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any
//! criterion fails. Runtime limits are part of the criteria.

use std::time::{Duration, Instant};

use hausdorff_core::canonical::{
    canonical_from_moments, conv_group_power, group_law_defect, series_exp_identity,
};
use hausdorff_core::densities::{
    binom_integral, density_cdf, density_moment, w2, w_p, DensitySpec,
};
use hausdorff_core::fusscatalan::{fc_alternating_identity, fc_number, fc_sequence, FcParams};
use hausdorff_core::genfun::{eval_bp, pick_scan, ArcRegion, GenFun, Rect, Region, C64};
use hausdorff_core::hausdorff::reconstruct_cdf;
use hausdorff_core::rng::PhiloxStream;
use hausdorff_core::scalar::binomial_int;
use hausdorff_core::seqcore::{
    check_completely_monotone, check_concave_moments, check_convex_moments,
    check_dilated_hausdorff, convolve, leading_differences, DiscreteMeasure, Verdict,
};
use hausdorff_core::spectra::{compare_to_fc, sample_product_moments, SpectraConfig};
use hausdorff_core::{Scalar, Sequence};

type Check = std::result::Result<String, String>;

fn ensure(cond: bool, msg: impl Into<String>) -> std::result::Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn fc(p: i64, r: i64) -> FcParams {
    FcParams::new(Scalar::int(p), Scalar::int(r))
}

fn ac1() -> Check {
    let catalan = [1, 1, 2, 5, 14, 42, 132, 429];
    for (n, &c) in catalan.iter().enumerate() {
        let a = fc_number(&fc(2, 1), n);
        ensure(a == Scalar::int(c), format!("A_{n}(2,1) = {a}, want {c}"))?;
    }
    for p in [2, 3] {
        for n in 0..=20 {
            let lhs = fc_number(&fc(p, p), n);
            let rhs = fc_number(&fc(p, 1), n + 1);
            ensure(
                lhs == rhs,
                format!("A_{n}({p},{p}) = {lhs} != A_{}({p},1) = {rhs}", n + 1),
            )?;
        }
    }
    for p in [2, 3, 4] {
        for n in 1..=15 {
            let (lhs, rhs) =
                fc_alternating_identity(&Scalar::int(p), n).map_err(|e| e.to_string())?;
            ensure(
                lhs == rhs,
                format!("alternating identity p={p} n={n}: {lhs} != {rhs}"),
            )?;
        }
    }
    Ok("Catalan n<=7, shift identity n<=20, alternating identity n<=15 exact".into())
}

fn ac2() -> Check {
    let a = fc_sequence(&fc(2, 1), 30);
    let ok = check_dilated_hausdorff(&a, &Scalar::int(4), 0.0).map_err(|e| e.to_string())?;
    ensure(
        ok.verified() && ok.max_order == Some(30),
        format!("A_n(2,1) 4^-n not verified to order 30: {ok:?}"),
    )?;
    let bad = check_dilated_hausdorff(&a, &Scalar::int(3), 0.0).map_err(|e| e.to_string())?;
    let w3 = bad.witness.clone().ok_or("tau = 3 gave no witness")?;
    ensure(
        bad.verdict == Verdict::Violated && w3.value.is_negative(),
        "tau = 3 not violated",
    )?;
    let b = fc_sequence(&fc(2, 3), 30);
    let bad = check_dilated_hausdorff(&b, &Scalar::int(4), 0.0).map_err(|e| e.to_string())?;
    let w = bad.witness.clone().ok_or("(p,r) = (2,3) gave no witness")?;
    ensure(
        bad.verdict == Verdict::Violated && w.value.is_negative(),
        "(2,3) not violated",
    )?;
    Ok(format!(
        "order 30 verified; tau=3 witness (j={}, k={}); (2,3) witness (j={}, k={}, value={})",
        w3.j, w3.k, w.j, w.k, w.value
    ))
}

fn ac3() -> Check {
    let a = fc_sequence(&fc(2, 1), 31);
    let b = canonical_from_moments(&a).map_err(|e| e.to_string())?;
    // b[k] is the coefficient of z^k in F'/F, i.e. b_{k+1} in 1-based terms.
    for n in 1..=20u64 {
        let want = Scalar::Exact(binomial_int(2 * n - 1, n - 1).into());
        ensure(
            b[n as usize - 1] == want,
            format!("b_{n} = {}, want {want}", b[n as usize - 1]),
        )?;
    }
    let scaled = Sequence::from_fn(30, |k| {
        let n = k as i64 + 1;
        &b[k] * &Scalar::int(4).powi(-n).expect("4 != 0")
    });
    let r = check_completely_monotone(&scaled, 0.0);
    ensure(
        r.verified() && r.max_order == Some(30),
        format!("b_n 4^-n not verified to order 30: {r:?}"),
    )?;
    Ok("b_n = C(2n-1, n-1) for n<=20; b_n 4^-n verified to order 30".into())
}

fn closed_b2(z: C64) -> C64 {
    (1.0 - (1.0 - 4.0 * z).sqrt()) / (2.0 * z)
}

fn ac4() -> Check {
    let mut rng = PhiloxStream::new(4, 0);
    let mut points = Vec::new();
    while points.len() < 50 {
        let z = C64::new(
            -3.0 + 5.0 * rng.next_open01(),
            -2.0 + 4.0 * rng.next_open01(),
        );
        // Off the cut [1/4, inf) with some margin.
        if z.re >= 0.2 && z.im.abs() < 0.02 || z.norm() < 1e-3 {
            continue;
        }
        points.push(z);
    }
    let (mut worst_err, mut worst_res) = (0.0f64, 0.0f64);
    for z in &points {
        let b = eval_bp(2.0, *z, 1e-13).map_err(|e| format!("z = {z}: {e}"))?;
        worst_err = worst_err.max((b - closed_b2(*z)).norm());
        worst_res = worst_res.max((b - 1.0 - z * b * b).norm());
    }
    ensure(
        worst_err <= 1e-10,
        format!("closed-form error {worst_err:e}"),
    )?;
    ensure(
        worst_res <= 1e-10,
        format!("functional-equation residual {worst_res:e}"),
    )?;
    Ok(format!(
        "50 points: max error {worst_err:.1e}, max residual {worst_res:.1e}"
    ))
}

fn ac5() -> Check {
    let rect = Region::Rect(Rect::standard(2.0));
    let mut samples = 0;
    for (name, f) in [
        ("B_2", GenFun::FcB { p: 2.0 }),
        ("B_2^2", GenFun::FcBpr { p: 2.0, r: 2.0 }),
        ("E_2,2", GenFun::FcEpr { p: 2.0, r: 2.0 }),
    ] {
        let r = pick_scan(&f, &rect, 1e-12).map_err(|e| e.to_string())?;
        ensure(
            r.violations.is_empty() && r.failures.is_empty(),
            format!(
                "{name}: {} violations, {} failures",
                r.violations.len(),
                r.failures.len()
            ),
        )?;
        samples += r.samples_checked;
    }
    let f = GenFun::ZBpr { p: 2.0, r: 5.0 };
    let mut witness = None;
    for radius in [0.25, 0.5, 0.75, 1.0, 1.5, 2.0] {
        let r = pick_scan(&f, &Region::Arc(ArcRegion::upper(radius, 256)), 1e-12)
            .map_err(|e| e.to_string())?;
        if let Some(v) = r.violations.first() {
            witness = Some(v.clone());
            break;
        }
    }
    let w = witness.ok_or("no arg exceedance found for z B_2^5")?;
    let arg = w.value.im.atan2(w.value.re);
    Ok(format!(
        "{samples} grid samples clean; z B_2^5 at z = {:.4}{:+.4}i has arg {:.3} outside [0, pi]",
        w.z.re, w.z.im, arg
    ))
}

fn ac6() -> Check {
    let mp = DensitySpec::marchenko_pastur();
    let mut worst = 0.0f64;
    for n in 0..=10u32 {
        let m = density_moment(&mp, n, 512).map_err(|e| e.to_string())?;
        let want = fc_number(&fc(2, 1), n as usize).to_f64();
        worst = worst.max((m - want).abs());
    }
    ensure(
        worst <= 1e-8,
        format!("Marchenko-Pastur moments off by {worst:e}"),
    )?;
    let mut worst_arc = 0.0f64;
    for spec in [
        DensitySpec::wp_inverse(2.0).map_err(|e| e.to_string())?,
        DensitySpec::arcsine_binomial(2.0).map_err(|e| e.to_string())?,
    ] {
        for n in 0..=8u32 {
            let m = density_moment(&spec, n, 512).map_err(|e| e.to_string())?;
            let want = binomial_int(2 * n as u64, n as u64)
                .to_string()
                .parse::<f64>()
                .unwrap();
            worst_arc = worst_arc.max((m - want).abs());
        }
    }
    ensure(
        worst_arc <= 1e-8,
        format!("1 - 2 w_2 moments off by {worst_arc:e}"),
    )?;
    let mut worst_w = 0.0f64;
    for i in 1..=1000 {
        let t = 4.0 * i as f64 / 1001.0;
        let a = w_p(2.0, t, 1e-14).map_err(|e| e.to_string())?;
        let b = w2(t).map_err(|e| e.to_string())?;
        worst_w = worst_w.max((a - b).abs());
    }
    ensure(
        worst_w <= 1e-10,
        format!("sup |w_p(2,.) - w_2| = {worst_w:e}"),
    )?;
    let mut worst_b = 0.0f64;
    for r in 1..=12u64 {
        for k in 1..=r {
            let v = binom_integral(r as f64, k as u32, 512).map_err(|e| e.to_string())?;
            let want = binomial_int(r, k).to_string().parse::<f64>().unwrap();
            worst_b = worst_b.max((v - want).abs());
        }
    }
    ensure(
        worst_b <= 1e-8,
        format!("binom_integral off by {worst_b:e}"),
    )?;
    Ok(format!(
        "MP {worst:.1e}, 1-2w_2 {worst_arc:.1e}, w_p vs w_2 {worst_w:.1e}, binomials {worst_b:.1e}"
    ))
}

fn ac7() -> Check {
    let c = Sequence::from_fn(25, |j| Scalar::int(2).powi(-(j as i64)).expect("2 != 0"));
    let half = conv_group_power(&c, &Scalar::ratio(1, 2)).map_err(|e| e.to_string())?;
    let square = convolve(&half.terms, &half.terms);
    ensure(square == c, "a^(1/2) * a^(1/2) != c")?;

    let sequences = [
        c.clone(),
        fc_sequence(&fc(2, 1), 15),
        fc_sequence(&fc(3, 1), 15),
        Sequence::from_fn(15, |j| Scalar::ratio(1, j as i64 + 1)),
        Sequence::from_fn(15, |j| Scalar::ratio(2, (j as i64 + 1) * (j as i64 + 2))),
    ];
    let pairs = [(1, 2, 1, 3), (-1, 2, 5, 4), (2, 1, -3, 7), (0, 1, 1, 1)];
    for s in &sequences {
        for &(rn, rd, sn, sd) in &pairs {
            let d = group_law_defect(s, &Scalar::ratio(rn, rd), &Scalar::ratio(sn, sd))
                .map_err(|e| e.to_string())?;
            ensure(
                d.is_zero(),
                format!("group law defect {d} at r={rn}/{rd}, s={sn}/{sd}"),
            )?;
        }
        let d = series_exp_identity(s).map_err(|e| e.to_string())?;
        ensure(
            d.is_exact() && d.is_zero(),
            format!("exp identity defect {d}"),
        )?;
    }
    Ok("square root exact to N=25; group law and exp identity exact on 5 sequences".into())
}

fn ac8() -> Check {
    let uniform = Sequence::from_fn(200, |j| Scalar::ratio(1, j as i64 + 1));
    let est = reconstruct_cdf(&uniform, 200, &Scalar::one()).map_err(|e| e.to_string())?;
    let du = est.sup_distance(|x| x);
    ensure(du <= 0.06, format!("uniform sup error {du}"))?;
    let cat = fc_sequence(&fc(2, 1), 200);
    let est = reconstruct_cdf(&cat, 200, &Scalar::int(4)).map_err(|e| e.to_string())?;
    let mp = DensitySpec::marchenko_pastur();
    let quad_err = std::cell::RefCell::new(None);
    let dm = est.sup_distance(|x| match density_cdf(&mp, x, 256) {
        Ok(v) => v,
        Err(e) => {
            *quad_err.borrow_mut() = Some(e.to_string());
            f64::NAN
        }
    });
    if let Some(e) = quad_err.into_inner() {
        return Err(e);
    }
    ensure(dm <= 0.08, format!("Marchenko-Pastur sup error {dm}"))?;
    Ok(format!("uniform {du:.4}, Marchenko-Pastur {dm:.4}"))
}

fn ac9() -> Check {
    let cfg = SpectraConfig {
        m: 1,
        size: 200,
        n_max: 5,
        trials: 20,
        seed: 1,
    };
    let a = sample_product_moments(&cfg).map_err(|e| e.to_string())?;
    let cmp = compare_to_fc(&a.moments, 0.05);
    ensure(cmp.passed(), format!("flagged moments: {:?}", cmp.flags))?;
    ensure(
        a.max_imag_residue <= 1e-10,
        format!("imaginary residue {}", a.max_imag_residue),
    )?;
    let b = sample_product_moments(&cfg).map_err(|e| e.to_string())?;
    ensure(a == b, "rerun under the same seed differs")?;
    let rel: Vec<String> = a
        .moments
        .iter()
        .map(|m| format!("{:.3}", (m.mean - m.target) / m.target))
        .collect();
    Ok(format!(
        "relative deviations [{}]; rerun bit-identical",
        rel.join(", ")
    ))
}

fn random_rational(rng: &mut PhiloxStream) -> Scalar {
    let num = (rng.next_u32() % 201) as i64 - 100;
    let den = (rng.next_u32() % 50) as i64 + 1;
    Scalar::ratio(num, den)
}

fn ac10() -> Check {
    let mut rng = PhiloxStream::new(10, 0);
    for n in 0..=25 {
        let c = Sequence::from_fn(n, |_| random_rational(&mut rng));
        ensure(
            leading_differences(&leading_differences(&c)) == c,
            format!("involution fails at N={n}"),
        )?;
    }
    let mut rng = PhiloxStream::new(10, 1);
    let (mut both_true, mut both_false) = (0, 0);
    for i in 0..20 {
        let atoms: Vec<(i64, i64)> = (0..1 + rng.next_u32() % 4)
            .map(|_| {
                (
                    (rng.next_u32() % 13) as i64,
                    1 + (rng.next_u32() % 5) as i64,
                )
            })
            .collect();
        let total: i64 = atoms.iter().map(|a| a.1).sum();
        let weighted: Vec<(Scalar, Scalar)> = atoms
            .iter()
            .map(|&(t, w)| (Scalar::ratio(t, 12), Scalar::ratio(w, total)))
            .collect();
        // Even cases: the discrete measure itself. Odd cases: the same
        // measure mixing increasing densities 1_{[t,1]}/(1-t), whose
        // distribution functions are convex.
        let c = if i % 2 == 0 {
            DiscreteMeasure::on_unit(weighted)
                .map_err(|e| e.to_string())?
                .moments(16)
        } else {
            Sequence::from_fn(16, |n| {
                weighted.iter().fold(Scalar::zero(), |acc, (t, w)| {
                    let m = if *t == Scalar::one() {
                        Scalar::one()
                    } else {
                        let tn = t.powi(n as i64 + 1).expect("t^k");
                        (&Scalar::one() - &tn)
                            .checked_div(&(&Scalar::from_usize(n + 1) * &(&Scalar::one() - t)))
                            .expect("t < 1")
                    };
                    acc + &(w * &m)
                })
            })
        };
        let convex = check_convex_moments(&c, 0.0).verified();
        let concave = check_concave_moments(&leading_differences(&c), 0.0).verified();
        ensure(
            convex == concave,
            format!("case {i}: convex {convex} vs reflected concave {concave}"),
        )?;
        if convex {
            both_true += 1;
        } else {
            both_false += 1;
        }
    }
    Ok(format!(
        "involution exact for N<=25; 20 cases agree ({both_true} both verified, {both_false} both violated)"
    ))
}

/// Id, description, check and optional runtime limit.
type Criterion = (&'static str, &'static str, fn() -> Check, Option<Duration>);

fn main() {
    let criteria: [Criterion; 10] = [
        (
            "AC1",
            "exact Fuss-Catalan identities",
            ac1,
            Some(Duration::from_secs(1)),
        ),
        (
            "AC2",
            "dilated Hausdorff certificates and witnesses",
            ac2,
            Some(Duration::from_secs(5)),
        ),
        (
            "AC3",
            "canonical sequence of the Catalan numbers",
            ac3,
            None,
        ),
        ("AC4", "generating-function closed-form oracle", ac4, None),
        (
            "AC5",
            "Pick scans and non-Pick witness",
            ac5,
            Some(Duration::from_secs(30)),
        ),
        ("AC6", "density moments and binomial integrals", ac6, None),
        ("AC7", "infinite divisibility and group law", ac7, None),
        (
            "AC8",
            "distribution-function reconstruction",
            ac8,
            Some(Duration::from_secs(10)),
        ),
        (
            "AC9",
            "random-matrix trace moments",
            ac9,
            Some(Duration::from_secs(60)),
        ),
        ("AC10", "reflection duality", ac10, None),
    ];
    let mut failed = 0;
    for (id, title, f, limit) in criteria {
        let start = Instant::now();
        let result = std::panic::catch_unwind(f).unwrap_or_else(|_| Err("panicked".into()));
        let elapsed = start.elapsed();
        let result = match (result, limit) {
            (Ok(_), Some(l)) if elapsed > l => Err(format!("took {elapsed:.2?}, limit {l:?}")),
            (r, _) => r,
        };
        match result {
            Ok(detail) => println!("{id} PASS {title} ({elapsed:.2?}): {detail}"),
            Err(why) => {
                failed += 1;
                println!("{id} FAIL {title} ({elapsed:.2?}): {why}");
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", 10 - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
