//! Evaluation of `B_p`, `B_{p,r} = B_p^r`, `E_{p,r}` and generic generating
//! functions off the real axis, Pick-property grid scans and endpoint atom
//! masses.
//!
//! `B_p` is the branch of `psi_p(B) = z`, `psi_p(c) = (c - 1) / c^p`, with
//! `B_p(0) = 1`. It is analytic on the plane minus `[z_p, inf)`. Off the
//! axis it is reached by Newton continuation from `z = 0`; on `(-inf, z_p)`
//! a bracketed solve on `(0, p/(p-1))` is used instead. Powers and logs are
//! principal throughout.

use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::{
    DETOUR_RADIUS, GENFUN_TOL, MIN_STEP, NEWTON_MAX_ITER, SCAN_RESOLUTION, SERIES_RADIUS_FRACTION,
};
use crate::error::{invalid, Error, Result};
use crate::fusscatalan::tau_f64;
use crate::scalar::Sequence;

pub type C64 = Complex64;

/// Denominators of `E_{p,r}` below this magnitude are reported as blow-up.
const EPR_MIN_DENOMINATOR: f64 = 1e-10;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ComplexPoint {
    pub re: f64,
    pub im: f64,
}

impl From<C64> for ComplexPoint {
    fn from(z: C64) -> Self {
        ComplexPoint { re: z.re, im: z.im }
    }
}

impl From<ComplexPoint> for C64 {
    fn from(p: ComplexPoint) -> Self {
        C64::new(p.re, p.im)
    }
}

/// Branch point `z_p = 1 / tau_p`.
pub fn z_p(p: f64) -> f64 {
    1.0 / tau_f64(p)
}

/// `psi_p(c) = (c - 1) / c^p` with the principal power.
pub fn psi(p: f64, c: C64) -> Result<C64> {
    if c == C64::new(0.0, 0.0) {
        return Err(invalid("c", "psi_p is singular at c = 0"));
    }
    Ok((c - 1.0) * (-p * c.ln()).exp())
}

/// `psi_p'(c) = c^{-p-1} ((1 - p) c + p)`; vanishes at `c = p / (p - 1)`.
fn dpsi(p: f64, c: C64) -> C64 {
    ((1.0 - p) * c + p) * (-(p + 1.0) * c.ln()).exp()
}

fn check_p(p: f64) -> Result<()> {
    if !(p >= 1.0) || !p.is_finite() {
        return Err(invalid(
            "p",
            format!("must be a finite value >= 1, got {p}"),
        ));
    }
    Ok(())
}

fn check_z(z: C64) -> Result<()> {
    if !z.re.is_finite() || !z.im.is_finite() {
        return Err(invalid("z", "must be finite"));
    }
    Ok(())
}

/// `B_p(z)`. The residual satisfies `|psi_p(B) - z| <= tol * max(1, |z|)`.
pub fn eval_bp(p: f64, z: C64, tol: f64) -> Result<C64> {
    check_p(p)?;
    check_z(z)?;
    if !(tol > 0.0) {
        return Err(invalid("tol", "must be positive"));
    }
    let cut = z_p(p);
    if z.im == 0.0 && z.re >= cut {
        return Err(Error::OnBranchCut {
            re: z.re,
            im: z.im,
            cut,
        });
    }
    if p == 1.0 {
        return Ok(1.0 / (1.0 - z));
    }
    if z.im == 0.0 {
        return solve_real(p, z.re).map(|b| C64::new(b, 0.0));
    }
    if z.im < 0.0 {
        return eval_bp(p, z.conj(), tol).map(|b| b.conj());
    }
    let b = continue_path(p, z)?;
    let residual = (psi(p, b)? - z).norm();
    if residual > tol * z.norm().max(1.0) {
        return Err(Error::ContinuationFailure {
            re: z.re,
            im: z.im,
            reason: format!("final residual {residual:e} exceeds tolerance"),
        });
    }
    Ok(b)
}

/// Real branch on `(-inf, z_p)`: the root of `psi_p(b) = x` in `(0, p/(p-1))`,
/// where `psi_p` is strictly increasing.
fn solve_real(p: f64, x: f64) -> Result<f64> {
    if x == 0.0 {
        return Ok(1.0);
    }
    let f = |b: f64| (b - 1.0) * (-p * b.ln()).exp() - x;
    let (mut lo, mut hi) = if x > 0.0 {
        (1.0, p / (p - 1.0))
    } else {
        let mut lo: f64 = 0.5;
        let mut guard = 0;
        while f(lo) > 0.0 {
            lo *= 0.5;
            guard += 1;
            if guard > 2000 || lo == 0.0 {
                return Err(Error::NonConvergence(format!(
                    "no lower bracket for B_p({x})"
                )));
            }
        }
        (lo, 1.0)
    };
    let mut b = 0.5 * (lo + hi);
    for _ in 0..400 {
        let fb = f(b);
        if fb == 0.0 {
            return Ok(b);
        }
        if fb < 0.0 {
            lo = b;
        } else {
            hi = b;
        }
        let d = (b.powf(-p - 1.0)) * ((1.0 - p) * b + p);
        let mut next = b - fb / d;
        if !(next > lo && next < hi) {
            next = 0.5 * (lo + hi);
        }
        if (next - b).abs() <= 2.0 * f64::EPSILON * b || hi - lo <= 4.0 * f64::EPSILON * hi {
            return Ok(next);
        }
        b = next;
    }
    Ok(b)
}

/// Path `0 -> z` for `Im z > 0`, rerouted high above the real axis when the
/// straight segment passes near the cut tip.
fn path_waypoints(zp: f64, z: C64) -> Vec<C64> {
    let origin = C64::new(0.0, 0.0);
    let tip = C64::new(zp, 0.0);
    if segment_distance(origin, z, tip) >= DETOUR_RADIUS * zp {
        return vec![origin, z];
    }
    let h = zp.max(z.im);
    let mut pts = vec![origin, C64::new(0.0, h), C64::new(z.re, h), z];
    pts.dedup();
    pts
}

fn segment_distance(a: C64, b: C64, q: C64) -> f64 {
    let d = b - a;
    let len2 = d.norm_sqr();
    if len2 == 0.0 {
        return (q - a).norm();
    }
    let t = (((q - a) * d.conj()).re / len2).clamp(0.0, 1.0);
    (a + d * t - q).norm()
}

/// Newton continuation with an Euler predictor `dB = dz / psi_p'(B)`.
fn continue_path(p: f64, z: C64) -> Result<C64> {
    let fail = |reason: String| Error::ContinuationFailure {
        re: z.re,
        im: z.im,
        reason,
    };
    let zp = z_p(p);
    let pts = path_waypoints(zp, z);
    let mut b = C64::new(1.0, 0.0);
    for leg in pts.windows(2) {
        let (start, end) = (leg[0], leg[1]);
        let length = (end - start).norm();
        let mut s = 0.0;
        let mut step = (length / 16.0).min(0.25 * zp.max(start.norm()));
        while s < length {
            let ds = step.min(length - s);
            let z0 = start + (end - start) * (s / length);
            let z1 = if s + ds >= length {
                end
            } else {
                start + (end - start) * ((s + ds) / length)
            };
            let pred = b + (z1 - z0) / dpsi(p, b);
            match newton(p, z1, pred, NEWTON_MAX_ITER) {
                Some((next, iters))
                    if (next - pred).norm() <= 0.5 * (pred - b).norm() + 1e-10 * b.norm() =>
                {
                    b = next;
                    s += ds;
                    if iters <= 3 {
                        step *= 2.0;
                    }
                }
                _ => {
                    step *= 0.5;
                    if step < MIN_STEP {
                        return Err(fail(format!("step underflow at s = {s:.6} of {length:.6}")));
                    }
                }
            }
        }
    }
    // Polish to working precision at the endpoint.
    for _ in 0..30 {
        let d = dpsi(p, b);
        if d.norm() == 0.0 {
            return Err(fail("Jacobian vanished at the endpoint".into()));
        }
        let delta = (psi(p, b)? - z) / d;
        b -= delta;
        if delta.norm() <= 4.0 * f64::EPSILON * b.norm() {
            break;
        }
    }
    if !(b.re.is_finite() && b.im.is_finite()) {
        return Err(fail("non-finite iterate".into()));
    }
    Ok(b)
}

/// Returns the root and the iteration count, or `None` if Newton has not
/// settled within `max_iter` steps.
fn newton(p: f64, z: C64, mut b: C64, max_iter: usize) -> Option<(C64, usize)> {
    for it in 1..=max_iter {
        if b.norm() == 0.0 {
            return None;
        }
        let d = dpsi(p, b);
        if d.norm() == 0.0 {
            return None;
        }
        let delta = ((b - 1.0) * (-p * b.ln()).exp() - z) / d;
        b -= delta;
        if !(b.re.is_finite() && b.im.is_finite()) {
            return None;
        }
        if delta.norm() <= 1e-12 * b.norm() {
            return Some((b, it));
        }
    }
    None
}

/// `B_{p,r}(z) = exp(r Log B_p(z))`.
pub fn eval_bpr(p: f64, r: f64, z: C64, tol: f64) -> Result<C64> {
    if r == 0.0 {
        check_p(p)?;
        return Ok(C64::new(1.0, 0.0));
    }
    let b = eval_bp(p, z, tol)?;
    Ok((r * b.ln()).exp())
}

/// `E_{p,r}(z) = B_p(z)^r / (p - (p - 1) B_p(z))`.
pub fn eval_epr(p: f64, r: f64, z: C64, tol: f64) -> Result<C64> {
    let b = eval_bp(p, z, tol)?;
    let den = p - (p - 1.0) * b;
    if den.norm() < EPR_MIN_DENOMINATOR {
        return Err(Error::DivisionBlowup {
            magnitude: den.norm(),
        });
    }
    let num = if r == 0.0 {
        C64::new(1.0, 0.0)
    } else {
        (r * b.ln()).exp()
    };
    Ok(num / den)
}

/// Closed-form evaluator with a label and an optional real cut `[cut, inf)`.
#[derive(Clone)]
pub struct ClosedForm {
    tag: String,
    cut: Option<f64>,
    f: Arc<dyn Fn(C64) -> C64 + Send + Sync>,
}

impl ClosedForm {
    pub fn new(
        tag: impl Into<String>,
        cut: Option<f64>,
        f: impl Fn(C64) -> C64 + Send + Sync + 'static,
    ) -> Self {
        ClosedForm {
            tag: tag.into(),
            cut,
            f: Arc::new(f),
        }
    }

    pub fn identity() -> Self {
        Self::new("z", None, |z| z)
    }

    pub fn square() -> Self {
        Self::new("z^2", None, |z| z * z)
    }

    pub fn constant(c: f64) -> Self {
        Self::new(format!("{c}"), None, move |_| C64::new(c, 0.0))
    }

    pub fn tag(&self) -> &str {
        &self.tag
    }
}

impl fmt::Debug for ClosedForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ClosedForm")
            .field("tag", &self.tag)
            .field("cut", &self.cut)
            .finish()
    }
}

/// A generating function together with the domain on which it is evaluated.
#[derive(Clone, Debug)]
pub enum GenFun {
    FcB {
        p: f64,
    },
    FcBpr {
        p: f64,
        r: f64,
    },
    FcEpr {
        p: f64,
        r: f64,
    },
    /// `z B_p(z)^r`.
    ZBpr {
        p: f64,
        r: f64,
    },
    /// Evaluated by Horner only on `|z| <= 0.9 * radius`.
    TruncatedSeries {
        coeffs: Vec<f64>,
        radius: f64,
    },
    Closed(ClosedForm),
}

impl GenFun {
    /// Truncated series of `c`; the radius defaults to a root-test estimate
    /// over the upper half of the coefficients.
    pub fn series(c: &Sequence, radius: Option<f64>) -> Result<GenFun> {
        let coeffs = c.to_f64_vec();
        let radius = match radius {
            Some(r) if r > 0.0 && r.is_finite() => r,
            Some(r) => return Err(invalid("radius", format!("must be positive, got {r}"))),
            None => radius_estimate(&coeffs),
        };
        Ok(GenFun::TruncatedSeries { coeffs, radius })
    }

    /// Left end of the real cut `[cut, inf)`, if any.
    pub fn cut(&self) -> Option<f64> {
        match self {
            GenFun::FcB { p }
            | GenFun::FcBpr { p, .. }
            | GenFun::FcEpr { p, .. }
            | GenFun::ZBpr { p, .. } => Some(z_p(*p)),
            GenFun::TruncatedSeries { radius, .. } => Some(*radius),
            GenFun::Closed(c) => c.cut,
        }
    }

    pub fn eval(&self, z: C64, tol: f64) -> Result<C64> {
        match self {
            GenFun::FcB { p } => eval_bp(*p, z, tol),
            GenFun::FcBpr { p, r } => eval_bpr(*p, *r, z, tol),
            GenFun::FcEpr { p, r } => eval_epr(*p, *r, z, tol),
            GenFun::ZBpr { p, r } => Ok(z * eval_bpr(*p, *r, z, tol)?),
            GenFun::TruncatedSeries { coeffs, radius } => {
                check_z(z)?;
                let limit = SERIES_RADIUS_FRACTION * radius;
                if z.norm() > limit {
                    return Err(invalid(
                        "z",
                        format!(
                            "|z| = {} is outside the series disk |z| <= {limit}",
                            z.norm()
                        ),
                    ));
                }
                Ok(coeffs
                    .iter()
                    .rev()
                    .fold(C64::new(0.0, 0.0), |acc, &c| acc * z + c))
            }
            GenFun::Closed(c) => {
                check_z(z)?;
                if let Some(cut) = c.cut {
                    if z.im == 0.0 && z.re >= cut {
                        return Err(Error::OnBranchCut {
                            re: z.re,
                            im: z.im,
                            cut,
                        });
                    }
                }
                Ok((c.f)(z))
            }
        }
    }

    /// Real-axis evaluation; the imaginary part is discarded.
    pub fn eval_real(&self, x: f64, tol: f64) -> Result<f64> {
        self.eval(C64::new(x, 0.0), tol).map(|v| v.re)
    }
}

fn radius_estimate(coeffs: &[f64]) -> f64 {
    let n = coeffs.len();
    let est = coeffs
        .iter()
        .enumerate()
        .skip((n / 2).max(1))
        .filter(|(_, c)| **c != 0.0)
        .map(|(j, c)| c.abs().powf(-1.0 / j as f64))
        .fold(f64::INFINITY, f64::min);
    if est.is_finite() {
        est
    } else {
        f64::INFINITY
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Rect {
    pub re_min: f64,
    pub re_max: f64,
    pub im_min: f64,
    pub im_max: f64,
    pub nx: usize,
    pub ny: usize,
}

impl Rect {
    /// `[-3 z_p, 0.8 z_p] x [0.02, 3 z_p]` at the default resolution.
    pub fn standard(p: f64) -> Rect {
        let zp = z_p(p);
        Rect {
            re_min: -3.0 * zp,
            re_max: 0.8 * zp,
            im_min: 0.02,
            im_max: 3.0 * zp,
            nx: SCAN_RESOLUTION,
            ny: SCAN_RESOLUTION,
        }
    }
}

/// Arc `|z| = radius`, `theta_min <= arg z <= theta_max`, inside `(0, pi)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ArcRegion {
    pub radius: f64,
    pub theta_min: f64,
    pub theta_max: f64,
    pub n: usize,
}

impl ArcRegion {
    /// Open upper half of the circle `|z| = radius` sampled at `n` angles.
    pub fn upper(radius: f64, n: usize) -> ArcRegion {
        let h = std::f64::consts::PI / (n + 1) as f64;
        ArcRegion {
            radius,
            theta_min: h,
            theta_max: std::f64::consts::PI - h,
            n,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "shape", rename_all = "snake_case")]
pub enum Region {
    Rect(Rect),
    Arc(ArcRegion),
}

impl Region {
    fn validate(&self) -> Result<()> {
        match self {
            Region::Rect(r) => {
                let finite = [r.re_min, r.re_max, r.im_min, r.im_max]
                    .iter()
                    .all(|x| x.is_finite());
                if !finite || r.re_min > r.re_max || r.im_min > r.im_max {
                    return Err(invalid("rect", "bounds must be finite and ordered"));
                }
                if r.im_min <= 0.0 {
                    return Err(invalid("rect", "must lie in the open upper half plane"));
                }
                if r.nx == 0 || r.ny == 0 {
                    return Err(invalid("rect", "resolution must be positive"));
                }
            }
            Region::Arc(a) => {
                let pi = std::f64::consts::PI;
                if !(a.radius > 0.0 && a.radius.is_finite()) {
                    return Err(invalid("arc", "radius must be positive"));
                }
                if !(a.theta_min > 0.0 && a.theta_max < pi && a.theta_min <= a.theta_max) {
                    return Err(invalid("arc", "angles must satisfy 0 < min <= max < pi"));
                }
                if a.n == 0 {
                    return Err(invalid("arc", "resolution must be positive"));
                }
            }
        }
        Ok(())
    }

    /// Sample points, row-major for rectangles (rows of increasing `Im z`).
    fn rows(&self) -> Vec<Vec<C64>> {
        match self {
            Region::Rect(r) => (0..r.ny)
                .map(|iy| {
                    let y = linspace(r.im_min, r.im_max, r.ny, iy);
                    (0..r.nx)
                        .map(|ix| C64::new(linspace(r.re_min, r.re_max, r.nx, ix), y))
                        .collect()
                })
                .collect(),
            Region::Arc(a) => vec![(0..a.n)
                .map(|i| C64::from_polar(a.radius, linspace(a.theta_min, a.theta_max, a.n, i)))
                .collect()],
        }
    }
}

fn linspace(a: f64, b: f64, n: usize, i: usize) -> f64 {
    if n == 1 {
        a
    } else {
        a + (b - a) * i as f64 / (n - 1) as f64
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PickSample {
    pub z: ComplexPoint,
    pub value: ComplexPoint,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FailedPoint {
    pub z: ComplexPoint,
    pub error: String,
}

/// `violations` holds exactly the evaluated points with `Im f(z) < -tol`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PickScanReport {
    pub grid: Region,
    pub tol: f64,
    pub samples_checked: usize,
    /// `None` when no point could be evaluated.
    pub min_im_value: Option<f64>,
    pub violations: Vec<PickSample>,
    pub failures: Vec<FailedPoint>,
}

impl PickScanReport {
    pub fn is_pick(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Samples `f` over `region` and records every point with `Im f < -tol`.
/// Evaluation failures are recorded per point.
pub fn pick_scan(f: &GenFun, region: &Region, tol: f64) -> Result<PickScanReport> {
    region.validate()?;
    if !(tol >= 0.0) {
        return Err(invalid("tol", "must be nonnegative"));
    }
    let rows: Vec<Vec<(C64, Result<C64>)>> = region
        .rows()
        .into_par_iter()
        .map(|row| {
            row.into_iter()
                .map(|z| (z, f.eval(z, GENFUN_TOL)))
                .collect()
        })
        .collect();
    let mut report = PickScanReport {
        grid: region.clone(),
        tol,
        samples_checked: 0,
        min_im_value: None,
        violations: Vec::new(),
        failures: Vec::new(),
    };
    for (z, value) in rows.into_iter().flatten() {
        match value {
            Ok(v) if v.re.is_finite() && v.im.is_finite() => {
                report.samples_checked += 1;
                report.min_im_value = Some(report.min_im_value.map_or(v.im, |m| m.min(v.im)));
                if v.im < -tol {
                    report.violations.push(PickSample {
                        z: z.into(),
                        value: v.into(),
                    });
                }
            }
            Ok(v) => report.failures.push(FailedPoint {
                z: z.into(),
                error: format!("non-finite value {v}"),
            }),
            Err(e) => report.failures.push(FailedPoint {
                z: z.into(),
                error: e.to_string(),
            }),
        }
    }
    Ok(report)
}

/// Pick scan of `z B_p(z)^r`.
pub fn pick_scan_power(p: f64, r: f64, region: &Region, tol: f64) -> Result<PickScanReport> {
    check_p(p)?;
    pick_scan(&GenFun::ZBpr { p, r }, region, tol)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AtomMass {
    pub mass: f64,
    /// Difference of the last two extrapolated iterates.
    pub error: f64,
}

/// `mu{tau} = lim_{x -> 1/tau^-} (1 - tau x) F(x)`.
pub fn atom_mass_right(f: &GenFun, tau: f64, xs: &[f64]) -> Result<AtomMass> {
    if !(tau > 0.0 && tau.is_finite()) {
        return Err(invalid("tau", "must be positive"));
    }
    if xs.len() < 3 {
        return Err(invalid("x_sequence", "needs at least three points"));
    }
    if xs.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(invalid("x_sequence", "must be strictly increasing"));
    }
    if xs.iter().any(|&x| !(x < 1.0 / tau)) {
        return Err(invalid("x_sequence", "must stay below 1/tau"));
    }
    let values = xs
        .iter()
        .map(|&x| Ok((1.0 - tau * x) * f.eval_real(x, GENFUN_TOL)?))
        .collect::<Result<Vec<_>>>()?;
    extrapolate(&values)
}

/// `mu{0} = lim_{x -> -inf} F(x)`.
pub fn atom_mass_left(f: &GenFun, xs: &[f64]) -> Result<AtomMass> {
    if xs.len() < 3 {
        return Err(invalid("x_sequence", "needs at least three points"));
    }
    if xs.windows(2).any(|w| !(w[1] < w[0])) || xs[xs.len() - 1] >= 0.0 {
        return Err(invalid(
            "x_sequence",
            "must decrease through negative values",
        ));
    }
    let values = xs
        .iter()
        .map(|&x| f.eval_real(x, GENFUN_TOL))
        .collect::<Result<Vec<_>>>()?;
    extrapolate(&values)
}

/// `x_i = (1 - 2^{-i}) / tau`, `i = 1..=count`.
pub fn right_sequence(tau: f64, count: usize) -> Vec<f64> {
    (1..=count)
        .map(|i| (1.0 - 0.5f64.powi(i as i32)) / tau)
        .collect()
}

/// `x_i = -2^i`, `i = 1..=count`.
pub fn left_sequence(count: usize) -> Vec<f64> {
    (1..=count).map(|i| -(2f64.powi(i as i32))).collect()
}

/// Repeated Aitken extrapolation on the tail of `values`. Three successive
/// growing increments flag divergence.
fn extrapolate(values: &[f64]) -> Result<AtomMass> {
    if values.iter().any(|v| !v.is_finite()) {
        return Err(Error::Divergent("non-finite sample".into()));
    }
    let n = values.len();
    if n >= 4 {
        let d: Vec<f64> = values[n - 4..].windows(2).map(|w| w[1] - w[0]).collect();
        let growing = d
            .windows(2)
            .all(|w| w[1].abs() > w[0].abs() && w[1] * w[0] > 0.0);
        if growing && values[n - 1].abs() > values[n - 4].abs() {
            return Err(Error::Divergent(format!(
                "samples grow: {:e}, {:e}, {:e}, {:e}",
                values[n - 4],
                values[n - 3],
                values[n - 2],
                values[n - 1]
            )));
        }
    }
    let mut level: Vec<f64> = values[n.saturating_sub(9)..].to_vec();
    let mut error = (level[level.len() - 1] - level[level.len() - 2]).abs();
    while level.len() >= 3 {
        let next: Vec<f64> = level
            .windows(3)
            .map(|w| {
                let den = w[2] - 2.0 * w[1] + w[0];
                let scale = w.iter().fold(0.0f64, |m, x| m.max(x.abs())).max(1.0);
                if den.abs() <= 1e-14 * scale {
                    w[2]
                } else {
                    w[2] - (w[2] - w[1]).powi(2) / den
                }
            })
            .collect();
        if next.len() >= 2 {
            error = (next[next.len() - 1] - next[next.len() - 2]).abs();
        }
        level = next;
    }
    Ok(AtomMass {
        mass: level[level.len() - 1],
        error,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fusscatalan::{fc_number, FcParams};
    use crate::scalar::Scalar;
    use proptest::prelude::*;

    const TOL: f64 = 1e-13;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    /// Catalan generating function with the principal square root.
    fn catalan_gf(z: C64) -> C64 {
        if z.norm() < 1e-8 {
            return 1.0 + z + 2.0 * z * z;
        }
        (1.0 - (1.0 - 4.0 * z).sqrt()) / (2.0 * z)
    }

    #[test]
    fn psi_examples() {
        assert!((psi(2.0, c(2.0, 0.0)).unwrap() - 0.25).norm() < 1e-15);
        assert_eq!(psi(3.7, c(1.0, 0.0)).unwrap(), c(0.0, 0.0));
        assert!((psi(2.0, c(1.5, 0.0)).unwrap() - 2.0 / 9.0).norm() < 1e-15);
        assert!(psi(2.0, c(0.0, 0.0)).is_err());
    }

    #[test]
    fn bp_examples() {
        let b = eval_bp(2.0, c(0.125, 0.0), TOL).unwrap();
        assert!((b.re - 4.0 * (1.0 - 0.5f64.sqrt())).abs() < 1e-14 && b.im == 0.0);
        for p in [1.0, 1.5, 2.0, 3.0, 7.25] {
            assert_eq!(eval_bp(p, c(0.0, 0.0), TOL).unwrap(), c(1.0, 0.0));
        }
        let b = eval_bp(2.0, c(-1.0, 0.0), TOL).unwrap();
        assert!((b.re - (5f64.sqrt() - 1.0) / 2.0).abs() < 1e-14);
    }

    #[test]
    fn bp_rejects_cut_and_bad_input() {
        assert!(matches!(
            eval_bp(2.0, c(0.25, 0.0), TOL),
            Err(Error::OnBranchCut { .. })
        ));
        assert!(matches!(
            eval_bp(3.0, c(1.0, 0.0), TOL),
            Err(Error::OnBranchCut { .. })
        ));
        assert!(eval_bp(0.5, c(0.1, 0.0), TOL).is_err());
        assert!(eval_bp(2.0, c(f64::NAN, 0.0), TOL).is_err());
        assert!(eval_bp(2.0, c(0.1, 0.0), 0.0).is_err());
        assert!(eval_bp(1.0, c(1.0, 0.0), TOL).is_err());
    }

    fn oracle_points() -> Vec<C64> {
        let mut pts = Vec::new();
        for i in 0..10 {
            let t = i as f64 / 9.0;
            pts.push(c(-5.0 + 5.2 * t, 0.0));
            pts.push(c(-3.0 + 6.0 * t, 0.01 + t));
            pts.push(c(0.25 + 2.0 * t, 1e-3));
            pts.push(c(0.3 + t, -0.2 - t));
            pts.push(C64::from_polar(0.25 + 10.0 * t, 0.1 + 3.0 * t));
        }
        pts
    }

    #[test]
    fn catalan_closed_form_oracle() {
        let pts = oracle_points();
        assert_eq!(pts.len(), 50);
        for z in pts {
            let b = eval_bp(2.0, z, TOL).unwrap();
            let want = catalan_gf(z);
            assert!((b - want).norm() <= 1e-10, "z={z} got {b} want {want}");
            assert!((b - 1.0 - z * b * b).norm() <= 1e-10);
        }
    }

    #[test]
    fn p_one_is_geometric() {
        let z = c(0.5, 0.5);
        let b = eval_bp(1.0, z, TOL).unwrap();
        assert!((b - 1.0 / (1.0 - z)).norm() < 1e-15);
    }

    #[test]
    fn near_tip_points_converge() {
        for p in [1.5, 2.0, 3.0] {
            let zp = z_p(p);
            for z in [
                c(zp * 1.001, 1e-6),
                c(zp * 0.999, 1e-9),
                c(zp, 1e-4),
                c(zp * 1.02, 0.01 * zp),
            ] {
                let b = eval_bp(p, z, TOL).unwrap();
                let fe = b - 1.0 - z * (p * b.ln()).exp();
                assert!(fe.norm() < 1e-10, "p={p} z={z} fe={fe}");
                assert!(b.im > 0.0);
            }
        }
    }

    #[test]
    fn real_branch_increasing_and_bounded() {
        for p in [1.5, 2.0, 3.0, 4.5] {
            let zp = z_p(p);
            let cap = p / (p - 1.0);
            let mut prev = 0.0;
            for i in 0..200 {
                let x = -20.0 + (20.0 + zp) * i as f64 / 200.0;
                let b = eval_bp(p, c(x, 0.0), TOL).unwrap();
                assert_eq!(b.im, 0.0);
                assert!(b.re > prev && b.re > 0.0 && b.re <= cap, "p={p} x={x}");
                prev = b.re;
            }
        }
    }

    #[test]
    fn series_consistency() {
        for p in [1.5f64, 2.0, 3.0] {
            let tau = tau_f64(p);
            let params = FcParams::new(Scalar::float(p), Scalar::float(1.0));
            let a: Vec<f64> = (0..=30).map(|n| fc_number(&params, n).to_f64()).collect();
            for k in 0..12 {
                let z = C64::from_polar(0.8 / tau, 0.5 * k as f64);
                let sum = a.iter().rev().fold(c(0.0, 0.0), |acc, &x| acc * z + x);
                let q = tau * z.norm();
                let bound = q.powi(31) / (1.0 - q);
                let b = eval_bp(p, z, TOL).unwrap();
                assert!((b - sum).norm() <= bound + 1e-12, "p={p} z={z}");
            }
        }
    }

    #[test]
    fn bpr_and_epr_examples() {
        let z = c(0.125, 0.0);
        assert_eq!(
            eval_bpr(2.0, 1.0, z, TOL).unwrap(),
            eval_bp(2.0, z, TOL).unwrap()
        );
        assert_eq!(eval_bpr(2.0, 0.0, z, TOL).unwrap(), c(1.0, 0.0));
        assert!((eval_bpr(2.0, 2.0, z, TOL).unwrap().re - 1.372583).abs() < 1e-6);
        assert!((eval_epr(1.0, 1.0, c(0.5, 0.0), TOL).unwrap() - 2.0).norm() < 1e-14);
        for (p, r) in [(2.0, 1.0), (3.0, 2.5), (1.5, 0.0)] {
            assert!((eval_epr(p, r, c(0.0, 0.0), TOL).unwrap() - 1.0).norm() < 1e-15);
        }
        let e = eval_epr(2.0, 0.0, c(-1.0, 0.0), TOL).unwrap();
        assert!((e.re - 1.0 / (2.0 - (5f64.sqrt() - 1.0) / 2.0)).abs() < 1e-14);
        assert!((e.re - 0.723607).abs() < 1e-6);
        assert!(matches!(
            eval_epr(2.0, 1.0, c(0.25 - 1e-22, 0.0), TOL),
            Err(Error::DivisionBlowup { .. }) | Err(Error::OnBranchCut { .. })
        ));
    }

    #[test]
    fn pick_scan_closed_forms() {
        let rect = Region::Rect(Rect {
            re_min: -1.0,
            re_max: 1.0,
            im_min: 0.1,
            im_max: 1.0,
            nx: 11,
            ny: 11,
        });
        let id = GenFun::Closed(ClosedForm::identity());
        let report = pick_scan(&id, &rect, 1e-12).unwrap();
        assert!(report.is_pick());
        assert_eq!(report.samples_checked, 121);
        assert!(report.min_im_value.unwrap() > 0.0);

        let s = std::f64::consts::FRAC_1_SQRT_2;
        let rect = Region::Rect(Rect {
            re_min: -s,
            re_max: 0.0,
            im_min: s,
            im_max: 1.0,
            nx: 2,
            ny: 2,
        });
        let report = pick_scan(&GenFun::Closed(ClosedForm::square()), &rect, 1e-12).unwrap();
        let hit = report
            .violations
            .iter()
            .find(|v| (v.z.re + s).abs() < 1e-15 && (v.z.im - s).abs() < 1e-15)
            .expect("violation at exp(3 pi i / 4)");
        assert!((hit.value.im + 1.0).abs() < 1e-12);
    }

    #[test]
    fn pick_scan_b2_fine_rect() {
        let rect = Region::Rect(Rect {
            re_min: -2.0,
            re_max: 0.2,
            im_min: 0.05,
            im_max: 2.0,
            nx: 100,
            ny: 100,
        });
        let report = pick_scan(&GenFun::FcB { p: 2.0 }, &rect, 1e-12).unwrap();
        assert!(report.is_pick());
        assert!(report.failures.is_empty());
        assert_eq!(report.samples_checked, 10_000);
    }

    #[test]
    fn pick_scan_standard_rect_families() {
        for p in [1.5, 2.0, 3.0] {
            let region = Region::Rect(Rect::standard(p));
            for f in [
                GenFun::FcB { p },
                GenFun::FcBpr { p, r: p },
                GenFun::FcBpr { p, r: 0.5 * p },
                GenFun::FcEpr { p, r: p },
                GenFun::FcEpr { p, r: 1.0 },
            ] {
                let report = pick_scan(&f, &region, 1e-12).unwrap();
                assert!(
                    report.failures.is_empty(),
                    "{f:?}: {:?}",
                    report.failures.first()
                );
                assert!(report.is_pick(), "{f:?}: {:?}", report.violations.first());
            }
        }
    }

    #[test]
    fn power_scans_separate_r_le_p_from_r_gt_p() {
        let rect = Region::Rect(Rect::standard(2.0));
        assert!(pick_scan_power(2.0, 2.0, &rect, 1e-12).unwrap().is_pick());
        assert!(pick_scan_power(2.0, 0.0, &rect, 1e-12).unwrap().is_pick());
        let arc = Region::Arc(ArcRegion::upper(1.0, 2000));
        let report = pick_scan_power(2.0, 5.0, &arc, 1e-12).unwrap();
        assert!(!report.is_pick());
        assert!(report.min_im_value.unwrap() < -0.5);
    }

    #[test]
    fn violations_are_row_major() {
        let rect = Region::Rect(Rect {
            re_min: -2.0,
            re_max: -0.1,
            im_min: 0.1,
            im_max: 2.0,
            nx: 7,
            ny: 5,
        });
        let report = pick_scan(&GenFun::Closed(ClosedForm::square()), &rect, 0.0).unwrap();
        let keys: Vec<(f64, f64)> = report.violations.iter().map(|v| (v.z.im, v.z.re)).collect();
        let mut sorted = keys.clone();
        sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
        assert_eq!(keys, sorted);
        assert_eq!(report.violations.len(), 35);
    }

    #[test]
    fn scan_rejects_lower_half_plane() {
        let rect = Region::Rect(Rect {
            re_min: -1.0,
            re_max: 1.0,
            im_min: 0.0,
            im_max: 1.0,
            nx: 3,
            ny: 3,
        });
        assert!(pick_scan(&GenFun::FcB { p: 2.0 }, &rect, 1e-12).is_err());
    }

    #[test]
    fn series_domain_is_enforced() {
        let seq = Sequence::floats(&[1.0; 20]).unwrap();
        let f = GenFun::series(&seq, Some(1.0)).unwrap();
        assert!(f.eval(c(0.5, 0.3), TOL).is_ok());
        assert!(f.eval(c(0.95, 0.0), TOL).is_err());
        let rect = Region::Rect(Rect {
            re_min: -1.0,
            re_max: 1.0,
            im_min: 0.1,
            im_max: 1.0,
            nx: 5,
            ny: 5,
        });
        let report = pick_scan(&f, &rect, 1e-12).unwrap();
        assert!(!report.failures.is_empty());
        assert_eq!(report.samples_checked + report.failures.len(), 25);
    }

    #[test]
    fn atom_mass_examples() {
        let two_atoms = GenFun::Closed(ClosedForm::new("two-atom", Some(1.0), |z| {
            0.5 * (1.0 / (1.0 - z) + 1.0 / (1.0 - z / 2.0))
        }));
        let m = atom_mass_right(&two_atoms, 1.0, &right_sequence(1.0, 20)).unwrap();
        assert!((m.mass - 0.5).abs() < 1e-6);

        let m = atom_mass_right(&GenFun::FcB { p: 2.0 }, 4.0, &right_sequence(4.0, 30)).unwrap();
        assert!(m.mass.abs() < 1e-6, "{m:?}");

        let one = GenFun::Closed(ClosedForm::constant(1.0));
        let m = atom_mass_right(&one, 3.0, &right_sequence(3.0, 12)).unwrap();
        assert!(m.mass.abs() < 1e-9);

        let m = atom_mass_left(&GenFun::FcB { p: 2.0 }, &left_sequence(40)).unwrap();
        assert!(m.mass.abs() < 1e-4, "{m:?}");
        let m = atom_mass_left(&one, &left_sequence(10)).unwrap();
        assert!((m.mass - 1.0).abs() < 1e-12);
        let half = GenFun::Closed(ClosedForm::new("half", Some(1.0), |z| {
            0.5 + 0.5 / (1.0 - z)
        }));
        let m = atom_mass_left(&half, &left_sequence(30)).unwrap();
        assert!((m.mass - 0.5).abs() < 1e-8);
    }

    #[test]
    fn atom_mass_errors() {
        let growing = GenFun::Closed(ClosedForm::new("1-z", None, |z| 1.0 - z));
        assert!(matches!(
            atom_mass_left(&growing, &left_sequence(10)),
            Err(Error::Divergent(_))
        ));
        let f = GenFun::FcB { p: 2.0 };
        assert!(atom_mass_right(&f, 4.0, &[0.2, 0.1, 0.24]).is_err());
        assert!(atom_mass_right(&f, 4.0, &[0.1, 0.2, 0.3]).is_err());
        assert!(atom_mass_left(&f, &[-1.0, -2.0, 3.0]).is_err());
    }

    proptest! {
        #[test]
        fn conjugate_symmetry(p in 1.0f64..4.0, re in -5.0f64..5.0, im in 0.001f64..5.0) {
            let z = c(re, im);
            let up = eval_bp(p, z, TOL).unwrap();
            let down = eval_bp(p, z.conj(), TOL).unwrap();
            prop_assert!((up - down.conj()).norm() <= 1e-14 * up.norm().max(1.0));
        }

        #[test]
        fn functional_equation_residual(p in 1.0f64..5.0, re in -20.0f64..20.0, im in -10.0f64..10.0) {
            let z = c(re, im);
            if let Ok(b) = eval_bp(p, z, TOL) {
                let fe = b - 1.0 - z * (p * b.ln()).exp();
                prop_assert!(fe.norm() <= 10.0 * TOL * z.norm().max(1.0).max(b.norm()), "z={} fe={}", z, fe);
            } else {
                prop_assert!(im == 0.0 && re >= z_p(p));
            }
        }

        #[test]
        fn upper_half_plane_maps_into_closed_upper_half_plane(
            p in 1.0f64..4.0, re in -10.0f64..10.0, im in 0.001f64..10.0
        ) {
            let b = eval_bp(p, c(re, im), TOL).unwrap();
            prop_assert!(b.im >= -1e-14);
        }
    }
}
