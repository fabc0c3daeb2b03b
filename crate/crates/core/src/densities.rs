//! Densities on `[0, tau]` with known moment sequences, the inverse of
//! `f_p`, and moment quadrature.
//!
//! Moments of densities with inverse-square-root endpoint behavior are
//! computed after `t = tau sin^2(theta)`, which turns them into smooth
//! integrands on `[0, pi/2]`.

use std::f64::consts::{FRAC_PI_2, PI};

use serde::{Deserialize, Serialize};

use crate::config::{N_QUAD, WP_TOL};
use crate::error::{invalid, Error, Result};
use crate::fusscatalan::tau_f64;
use crate::quadrature::{composite, integrate, QuadResult};

/// `(1 / 2 pi) sqrt((4 - t) / t)` on `(0, 4)`.
pub fn mp_density(t: f64) -> Result<f64> {
    if !(t > 0.0 && t < 4.0) {
        return Err(invalid("t", format!("must lie in (0, 4), got {t}")));
    }
    Ok(((4.0 - t) / t).sqrt() / (2.0 * PI))
}

/// `w_2(t) = (1/pi) arccos sqrt(t / 4)` on `[0, 4]`.
pub fn w2(t: f64) -> Result<f64> {
    if !(0.0..=4.0).contains(&t) {
        return Err(invalid("t", format!("must lie in [0, 4], got {t}")));
    }
    Ok((t / 4.0).sqrt().acos() / PI)
}

/// `sin(x) / x` with a three-term series near zero.
fn sinc(x: f64) -> f64 {
    if x.abs() < 1e-4 {
        let x2 = x * x;
        1.0 - x2 / 6.0 + x2 * x2 / 120.0
    } else {
        x.sin() / x
    }
}

fn check_p(p: f64) -> Result<()> {
    if !(p > 1.0 && p.is_finite()) {
        return Err(invalid("p", format!("must be a finite value > 1, got {p}")));
    }
    Ok(())
}

/// `f_p(u) = sin^p(pi u) / (sin(pi u / p) sin^{p-1}((1 - 1/p) pi u))`,
/// written as `tau_p` times a ratio of sincs so both ends are stable.
/// Decreases from `f_p(0) = tau_p` to `f_p(1) = 0`.
pub fn f_p(p: f64, u: f64) -> Result<f64> {
    check_p(p)?;
    if !(0.0..=1.0).contains(&u) {
        return Err(invalid("u", format!("must lie in [0, 1], got {u}")));
    }
    Ok(f_p_unchecked(p, u))
}

fn f_p_unchecked(p: f64, u: f64) -> f64 {
    if u >= 1.0 {
        return 0.0;
    }
    // sin(pi u) from the nearer endpoint keeps full relative accuracy.
    let s = if u > 0.5 {
        (PI * (1.0 - u)).sin() / (PI * u)
    } else {
        sinc(PI * u)
    };
    let q = 1.0 - 1.0 / p;
    tau_f64(p) * (p * s.ln() - sinc(PI * u / p).ln() - (p - 1.0) * sinc(q * PI * u).ln()).exp()
}

/// `d/du ln f_p(u)`.
fn dlog_f_p(p: f64, u: f64) -> f64 {
    let q = 1.0 - 1.0 / p;
    let cot = |x: f64| x.cos() / x.sin();
    PI * (p * cot(PI * u) - cot(PI * u / p) / p - (p - 1.0) * q * cot(q * PI * u))
}

/// `w_p(t) = f_p^{-1}(t) / p` by bracketed Newton; nonincreasing, with
/// values in `(0, 1/p)`.
pub fn w_p(p: f64, t: f64, tol: f64) -> Result<f64> {
    check_p(p)?;
    let tau = tau_f64(p);
    if !(t > 0.0 && t < tau) {
        return Err(invalid("t", format!("must lie in (0, {tau}), got {t}")));
    }
    if !(tol > 0.0) {
        return Err(invalid("tol", "must be positive"));
    }
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    let mut u = 1.0 - t / tau;
    for _ in 0..200 {
        let f = f_p_unchecked(p, u);
        let g = f - t;
        if g.abs() <= tol * t.max(1.0) {
            return Ok(u / p);
        }
        if g > 0.0 {
            lo = u;
        } else {
            hi = u;
        }
        let mut next = u - g / (f * dlog_f_p(p, u));
        if !(next > lo && next < hi) {
            next = 0.5 * (lo + hi);
        }
        if hi - lo <= 2.0 * f64::EPSILON {
            return Ok(next / p);
        }
        u = next;
    }
    Err(Error::NonConvergence(format!("w_p({p}, {t})")))
}

/// `C(r, k) = (1/pi) int_0^pi (sin x / (sin^theta(theta x)
/// sin^{1-theta}((1-theta) x)))^r dx`, `theta = k / r`, integrand written
/// with sincs; `0^0 = 1` at `theta = 1`.
pub fn binom_integral(r: f64, k: u32, n_quad: usize) -> Result<f64> {
    Ok(binom_integral_with_error(r, k, n_quad)?.value)
}

pub fn binom_integral_with_error(r: f64, k: u32, n_quad: usize) -> Result<QuadResult> {
    if k == 0 {
        return Err(invalid("k", "must be positive"));
    }
    if !(r >= k as f64) || !r.is_finite() {
        return Err(invalid(
            "r",
            format!("must be finite and >= k = {k}, got {r}"),
        ));
    }
    let theta = k as f64 / r;
    let phi = 1.0 - theta;
    let xlogx = |x: f64| if x == 0.0 { 0.0 } else { x * x.ln() };
    let log_c = -(xlogx(theta) + xlogx(phi));
    let integrand = |x: f64| {
        let s = if x > FRAC_PI_2 {
            (PI - x).sin() / x
        } else {
            sinc(x)
        };
        let mut lg = s.ln() - theta * sinc(theta * x).ln() + log_c;
        if phi > 0.0 {
            lg -= phi * sinc(phi * x).ln();
        }
        (r * lg).exp()
    };
    let q = integrate(integrand, 0.0, PI, n_quad);
    Ok(QuadResult {
        value: q.value / PI,
        error: q.error / PI,
    })
}

/// Measures on `[0, tau]` with a built-in moment evaluator.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DensityKind {
    MarchenkoPastur,
    /// `t dmu_{p,1}(t)`; closed form only for `p = 2`.
    MuPp {
        p: f64,
    },
    /// `w_2(t) dt`.
    W2Closed,
    /// The distribution function `1 - p w_p(t)`, integrated by parts.
    WpInverse {
        p: f64,
    },
    /// Density `-p w_p'(t)`, the same measure through `t = f_p(u)`.
    ArcsineBinomial {
        p: f64,
    },
    /// Piecewise-linear density through `(t_i, w_i)`, `t` strictly
    /// increasing.
    Custom {
        points: Vec<(f64, f64)>,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DensitySpec {
    pub kind: DensityKind,
    pub tau: f64,
    /// Endpoint exponents `alpha`, `beta` in `t^alpha (tau - t)^beta`.
    pub left: f64,
    pub right: f64,
}

impl DensitySpec {
    pub fn marchenko_pastur() -> Self {
        DensitySpec {
            kind: DensityKind::MarchenkoPastur,
            tau: 4.0,
            left: -0.5,
            right: 0.5,
        }
    }

    pub fn mu_pp(p: f64) -> Result<Self> {
        if p != 2.0 {
            return Err(Error::UnsupportedDensity(format!(
                "mu_pp has a closed-form density only for p = 2, got {p}"
            )));
        }
        Ok(DensitySpec {
            kind: DensityKind::MuPp { p },
            tau: 4.0,
            left: 0.5,
            right: 0.5,
        })
    }

    pub fn w2_closed() -> Self {
        DensitySpec {
            kind: DensityKind::W2Closed,
            tau: 4.0,
            left: 0.0,
            right: 0.5,
        }
    }

    pub fn wp_inverse(p: f64) -> Result<Self> {
        check_p(p)?;
        Ok(DensitySpec {
            kind: DensityKind::WpInverse { p },
            tau: tau_f64(p),
            left: -0.5,
            right: 0.5,
        })
    }

    pub fn arcsine_binomial(p: f64) -> Result<Self> {
        check_p(p)?;
        Ok(DensitySpec {
            kind: DensityKind::ArcsineBinomial { p },
            tau: tau_f64(p),
            left: -0.5,
            right: if p == 2.0 { -0.5 } else { 0.5 },
        })
    }

    /// Piecewise-linear density; `t_0 >= 0`, strictly increasing `t`,
    /// nonnegative values.
    pub fn custom(points: Vec<(f64, f64)>) -> Result<Self> {
        if points.len() < 2 {
            return Err(invalid("grid", "needs at least two points"));
        }
        if points
            .iter()
            .any(|(t, w)| !t.is_finite() || !w.is_finite() || *w < 0.0)
        {
            return Err(invalid("grid", "values must be finite and nonnegative"));
        }
        if points[0].0 < 0.0 || points.windows(2).any(|w| !(w[1].0 > w[0].0)) {
            return Err(invalid(
                "grid",
                "t must start at >= 0 and increase strictly",
            ));
        }
        let tau = points[points.len() - 1].0;
        Ok(DensitySpec {
            kind: DensityKind::Custom { points },
            tau,
            left: 0.0,
            right: 0.0,
        })
    }

    /// Two-column CSV `t,w` with optional header and `#` comments.
    pub fn custom_from_csv(text: &str) -> Result<Self> {
        let mut points = Vec::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let cols: Vec<&str> = line.split(',').map(str::trim).collect();
            let parsed = match cols.as_slice() {
                [a, b] => a.parse::<f64>().ok().zip(b.parse::<f64>().ok()),
                _ => None,
            };
            match parsed {
                Some(pt) => points.push(pt),
                None if i == 0 && points.is_empty() => continue,
                None => return Err(Error::Parse(format!("line {}: expected `t,w`", i + 1))),
            }
        }
        Self::custom(points)
    }

    fn validate(&self) -> Result<()> {
        for e in [self.left, self.right] {
            if !(e > -1.0) {
                return Err(Error::Unintegrable(e));
            }
        }
        if !(self.tau > 0.0 && self.tau.is_finite()) {
            return Err(invalid("tau", "support must be finite and positive"));
        }
        Ok(())
    }

    /// Density value for the kinds that have one in closed form.
    /// Closed-form density at `t`; `rest = tau - t` is passed separately
    /// so callers that know it without cancellation keep endpoint accuracy.
    fn density(&self, t: f64, rest: f64) -> Option<f64> {
        // The endpoint-singular forms are set to 0 off the open support.
        let inside = t > 0.0 && rest > 0.0;
        let mp = || {
            if inside {
                (rest / t).sqrt() / (2.0 * PI)
            } else {
                0.0
            }
        };
        match &self.kind {
            DensityKind::MarchenkoPastur => Some(mp()),
            DensityKind::MuPp { .. } => Some(t * mp()),
            DensityKind::W2Closed => Some((rest / 4.0).clamp(0.0, 1.0).sqrt().asin() / PI),
            DensityKind::ArcsineBinomial { p } if *p == 2.0 => Some(if inside {
                1.0 / (PI * (t * rest).sqrt())
            } else {
                0.0
            }),
            _ => None,
        }
    }
}

/// `int_0^tau t^n dmu`.
pub fn density_moment(spec: &DensitySpec, n: u32, n_quad: usize) -> Result<f64> {
    Ok(density_moment_with_error(spec, n, n_quad)?.value)
}

pub fn density_moment_with_error(spec: &DensitySpec, n: u32, n_quad: usize) -> Result<QuadResult> {
    spec.validate()?;
    let n_quad = if n_quad == 0 { N_QUAD } else { n_quad };
    let tau = spec.tau;
    let ni = n as i32;
    match &spec.kind {
        DensityKind::WpInverse { p } => {
            // int t^n d(1 - p w_p) = tau^n - n int_0^tau t^{n-1} (1 - p w_p(t)) dt
            if n == 0 {
                return Ok(QuadResult {
                    value: 1.0,
                    error: 0.0,
                });
            }
            let p = *p;
            let g = |theta: f64| {
                let t = tau * theta.sin().powi(2);
                let jac = 2.0 * tau * theta.sin() * theta.cos();
                let w = if t <= 0.0 {
                    1.0 / p
                } else if t >= tau {
                    0.0
                } else {
                    w_p(p, t, WP_TOL).unwrap_or(f64::NAN)
                };
                t.powi(ni - 1) * (1.0 - p * w) * jac
            };
            let q = integrate(g, 0.0, FRAC_PI_2, n_quad);
            if !q.value.is_finite() {
                return Err(Error::NonConvergence(
                    "w_p inversion inside quadrature".into(),
                ));
            }
            Ok(QuadResult {
                value: tau.powi(ni) - n as f64 * q.value,
                error: n as f64 * q.error,
            })
        }
        DensityKind::ArcsineBinomial { p } if *p != 2.0 => {
            let p = *p;
            Ok(integrate(
                |u| f_p_unchecked(p, u).powi(ni),
                0.0,
                1.0,
                n_quad,
            ))
        }
        DensityKind::Custom { points } => {
            let mut value = 0.0;
            let mut error = 0.0;
            for seg in points.windows(2) {
                let ((t0, w0), (t1, w1)) = (seg[0], seg[1]);
                let lin = |t: f64| t.powi(ni) * (w0 + (w1 - w0) * (t - t0) / (t1 - t0));
                let coarse = composite(lin, t0, t1, 1);
                let fine = composite(lin, t0, t1, 2);
                value += fine;
                error += (fine - coarse).abs();
            }
            Ok(QuadResult { value, error })
        }
        _ => {
            let g = |theta: f64| {
                let (s, c) = theta.sin_cos();
                let t = tau * s * s;
                let d = spec.density(t, tau * c * c).unwrap_or(0.0);
                t.powi(ni) * d * 2.0 * tau * s * c
            };
            Ok(integrate(g, 0.0, FRAC_PI_2, n_quad))
        }
    }
}

/// `int_0^x dmu` for the kinds with a closed-form density, by
/// `t = x sin^2(theta)`.
pub fn density_cdf(spec: &DensitySpec, x: f64, n_quad: usize) -> Result<f64> {
    spec.validate()?;
    if x <= 0.0 {
        return Ok(0.0);
    }
    let x = x.min(spec.tau);
    if let DensityKind::Custom { points } = &spec.kind {
        let mut acc = 0.0;
        for seg in points.windows(2) {
            let ((t0, w0), (t1, w1)) = (seg[0], seg[1]);
            if t0 >= x {
                break;
            }
            let hi = t1.min(x);
            let w_hi = w0 + (w1 - w0) * (hi - t0) / (t1 - t0);
            acc += 0.5 * (w0 + w_hi) * (hi - t0);
        }
        return Ok(acc);
    }
    if spec.density(0.5 * spec.tau, 0.5 * spec.tau).is_none() {
        return Err(Error::UnsupportedDensity(format!(
            "no closed-form density for {:?}",
            spec.kind
        )));
    }
    let g = |theta: f64| {
        let (s, c) = theta.sin_cos();
        let t = x * s * s;
        let rest = (spec.tau - x) + x * c * c;
        spec.density(t, rest).unwrap_or(0.0) * 2.0 * x * s * c
    };
    Ok(integrate(g, 0.0, FRAC_PI_2, n_quad).value)
}
