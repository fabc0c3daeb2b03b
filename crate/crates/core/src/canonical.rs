//! Canonical sequences, convolution groups `a^{(r)}` with generating
//! functions `F^r`, and the canonical-density bound.
//!
//! All operations require `c_0 = 1`; exact inputs stay exact.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::config::{NORMALIZATION_TOL, RHO_GRID_ANGLES, RHO_GRID_ANGLES_PER_TERM};
use crate::error::{invalid, Error, Result};
use crate::scalar::{binomial, binomial_int, rational_to_f64, Scalar, Sequence};
use crate::seqcore::{convolve, dilate_to_unit};

/// `a^{(r)}_0..a^{(r)}_N`, coefficients of `F(z)^r`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConvGroupElement {
    pub r: Scalar,
    pub terms: Sequence,
}

fn require_normalized(c: &Sequence) -> Result<()> {
    let ok = match &c[0] {
        Scalar::Exact(q) => q.is_one(),
        Scalar::Float(x) => (x - 1.0).abs() <= NORMALIZATION_TOL,
    };
    if ok {
        Ok(())
    } else {
        Err(Error::NotNormalized {
            got: c[0].to_string(),
        })
    }
}

fn one_like(exact: bool) -> Scalar {
    if exact {
        Scalar::one()
    } else {
        Scalar::float(1.0)
    }
}

/// `b_0..b_{N-1}` from `(n+1) c_{n+1} = sum_{k<=n} c_{n-k} b_k`; empty for
/// `N = 0`.
fn canonical_terms(c: &Sequence) -> Result<Vec<Scalar>> {
    require_normalized(c)?;
    let mut b: Vec<Scalar> = Vec::with_capacity(c.order());
    for n in 0..c.order() {
        let mut acc = &Scalar::from_usize(n + 1) * &c[n + 1];
        for (k, bk) in b.iter().enumerate() {
            acc = acc - &c[n - k] * bk;
        }
        b.push(acc);
    }
    Ok(b)
}

/// Canonical sequence `(b_k)_{k<N}` of `c`, the coefficients of `F'/F`.
pub fn canonical_from_moments(c: &Sequence) -> Result<Sequence> {
    if c.len() < 2 {
        return Err(Error::TooShort {
            needed: 2,
            got: c.len(),
        });
    }
    Sequence::new(canonical_terms(c)?)
}

/// `a^{(r)}` by `(n+1) a_{n+1} = r sum_{k<=n} a_{n-k} b_k`, `a_0 = 1`.
/// Any real `r` is accepted.
pub fn conv_group_power(c: &Sequence, r: &Scalar) -> Result<ConvGroupElement> {
    let b = canonical_terms(c)?;
    let exact = c.is_exact() && r.is_exact();
    let r = if exact { r.clone() } else { r.to_float() };
    let b: Vec<Scalar> = if exact {
        b
    } else {
        b.iter().map(Scalar::to_float).collect()
    };
    let mut a = vec![one_like(exact)];
    for n in 0..b.len() {
        let mut acc = if exact {
            Scalar::zero()
        } else {
            Scalar::float(0.0)
        };
        for (k, bk) in b.iter().take(n + 1).enumerate() {
            acc = acc + &a[n - k] * bk;
        }
        a.push((&r * &acc).checked_div(&Scalar::from_usize(n + 1))?);
    }
    Ok(ConvGroupElement {
        r,
        terms: Sequence::new(a)?,
    })
}

/// `max_n |(a^{(r)} * a^{(s)})_n - a^{(r+s)}_n|`.
pub fn group_law_defect(c: &Sequence, r: &Scalar, s: &Scalar) -> Result<Scalar> {
    let ar = conv_group_power(c, r)?;
    let as_ = conv_group_power(c, s)?;
    let ars = conv_group_power(c, &(r + s))?;
    let prod = convolve(&ar.terms, &as_.terms);
    Ok(max_abs_difference(&prod, &ars.terms))
}

/// Exact inputs require a zero defect; floats allow
/// `tol * max(1, max |a^{(r+s)}|)`.
pub fn group_law_check(c: &Sequence, r: &Scalar, s: &Scalar, tol: f64) -> Result<bool> {
    let defect = group_law_defect(c, r, s)?;
    if defect.is_exact() {
        return Ok(defect.is_zero());
    }
    let scale = Scalar::max_abs(conv_group_power(c, &(r + s))?.terms.terms()).max(1.0);
    Ok(defect.to_f64() <= tol * scale)
}

fn max_abs_difference(a: &Sequence, b: &Sequence) -> Scalar {
    let exact = a.is_exact() && b.is_exact();
    let mut best = if exact {
        Scalar::zero()
    } else {
        Scalar::float(0.0)
    };
    for (x, y) in a.terms().iter().zip(b.terms()) {
        let d = (x - y).abs();
        if d > best {
            best = d;
        }
    }
    best
}

/// Both sides of `b_{n-1} / n = sum_{k=1}^n (-1)^{k-1}/k C(n,k) a^{(k)}_n`,
/// computed independently.
pub fn bn_alternating_crosscheck(c: &Sequence, n: usize) -> Result<(Scalar, Scalar)> {
    if n == 0 {
        return Err(invalid("n", "must be at least 1"));
    }
    if n > c.order() {
        return Err(Error::IndexOutOfRange {
            requested: n,
            max: c.order(),
        });
    }
    let prefix = c.truncate(n);
    let b = canonical_terms(&prefix)?;
    let lhs = b[n - 1].checked_div(&Scalar::from_usize(n))?;
    let mut rhs = if c.is_exact() {
        Scalar::zero()
    } else {
        Scalar::float(0.0)
    };
    for k in 1..=n {
        let ak = conv_group_power(&prefix, &Scalar::from_usize(k))?;
        let coeff =
            binomial(&Scalar::from_usize(n), k as u64).checked_div(&Scalar::from_usize(k))?;
        let term = &coeff * &ak.terms[n];
        rhs = if k % 2 == 1 { rhs + term } else { rhs - term };
    }
    Ok((lhs, rhs))
}

/// Largest coefficient defect between `exp(sum_n b_n z^{n+1} / (n+1))`
/// and `F`, by the formal recursion `e_n = (1/n) sum_{k=1}^n k g_k e_{n-k}`.
pub fn series_exp_identity(c: &Sequence) -> Result<Scalar> {
    let b = canonical_terms(c)?;
    let exact = c.is_exact();
    // g_k = b_{k-1} / k, so k g_k = b_{k-1}.
    let mut e = vec![one_like(exact)];
    for n in 1..=b.len() {
        let mut acc = if exact {
            Scalar::zero()
        } else {
            Scalar::float(0.0)
        };
        for k in 1..=n {
            acc = acc + &b[k - 1] * &e[n - k];
        }
        e.push(acc.checked_div(&Scalar::from_usize(n))?);
    }
    Ok(max_abs_difference(&Sequence::new(e)?, c))
}

/// Grid estimate of `rho_* = ess sup w` for the canonical density.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DensityBound {
    /// Lower estimate of `rho_*`.
    pub rho: f64,
    /// `1 / rho`, the right end of the maximal interval; `None` when `rho = 0`.
    pub r_star: Option<f64>,
    pub terms_used: usize,
    /// Angle `theta` in `(0, pi)` at which the sup was attained.
    pub theta: f64,
}

/// Float inputs drop terms whose re-expansion amplifies rounding past this.
const FLOAT_AMPLIFICATION_LIMIT: f64 = 1e-8;

/// Estimates `rho_*` with `arg F(H) = (0, pi rho_*)`.
///
/// The dilated `Log F = sum g_k z^k` is re-expanded through
/// `z = 4u / (1 + u)^2`, which maps the unit disk onto the plane minus
/// `[1, inf)` and the upper half disk onto the upper half plane. On
/// `|u| = 1` the imaginary part is the sine series `sum h_m sin(m theta)`;
/// Jackson-damped partial sums are averages against a positive kernel, so
/// their sup over `theta` divided by `pi` never exceeds `rho_*`.
pub fn canonical_density_bound(c: &Sequence, tau: &Scalar) -> Result<DensityBound> {
    let d = dilate_to_unit(c, tau)?;
    let b = canonical_terms(&d)?;
    if b.is_empty() {
        return Err(Error::TooShort { needed: 2, got: 1 });
    }
    let h = if d.is_exact() {
        disk_coefficients_exact(&b)?
    } else {
        disk_coefficients_float(&b)
    };
    let m = h.len() - 1;
    let weights = jackson_weights(m);
    let n_angles = RHO_GRID_ANGLES.max(RHO_GRID_ANGLES_PER_TERM * m);
    let pi = std::f64::consts::PI;
    let (best, theta) = (1..n_angles)
        .map(|j| {
            let theta = pi * j as f64 / n_angles as f64;
            let v: f64 = (1..=m)
                .map(|k| weights[k] * h[k] * (k as f64 * theta).sin())
                .sum();
            (v / pi, theta)
        })
        .fold((0.0, 0.0), |acc, x| if x.0 > acc.0 { x } else { acc });
    Ok(DensityBound {
        rho: best,
        r_star: (best > 0.0).then(|| 1.0 / best),
        terms_used: m,
        theta,
    })
}

/// Coefficient of `u^m` in `(4u / (1+u)^2)^k`:
/// `(-1)^{m-k} 4^k C(m+k-1, m-k)`.
fn map_weight(m: usize, k: usize) -> BigInt {
    let w = binomial_int((m + k - 1) as u64, (m - k) as u64) << (2 * k);
    if (m - k) % 2 == 1 {
        -w
    } else {
        w
    }
}

/// `h_0..h_M` from exact `b`, using a common denominator so the sums are
/// integer sums.
fn disk_coefficients_exact(b: &[Scalar]) -> Result<Vec<f64>> {
    let g: Vec<BigRational> = b
        .iter()
        .enumerate()
        .map(|(i, bi)| {
            let q = bi.as_exact().expect("exact input").clone();
            q / BigRational::from_integer(BigInt::from(i + 1))
        })
        .collect();
    let den = g.iter().fold(BigInt::one(), |acc, q| acc.lcm(q.denom()));
    let nums: Vec<BigInt> = g.iter().map(|q| q.numer() * (&den / q.denom())).collect();
    let mut h = vec![0.0];
    for m in 1..=g.len() {
        let mut acc = BigInt::zero();
        for k in 1..=m {
            if !nums[k - 1].is_zero() {
                acc += &nums[k - 1] * map_weight(m, k);
            }
        }
        h.push(rational_to_f64(&BigRational::new(acc, den.clone())));
    }
    Ok(h)
}

/// Float re-expansion, truncated where cancellation would exceed
/// [`FLOAT_AMPLIFICATION_LIMIT`].
fn disk_coefficients_float(b: &[Scalar]) -> Vec<f64> {
    let g: Vec<f64> = b
        .iter()
        .enumerate()
        .map(|(i, bi)| bi.to_f64() / (i + 1) as f64)
        .collect();
    let mut h = vec![0.0];
    for m in 1..=g.len() {
        let mut acc = 0.0;
        let mut mass = 0.0;
        for k in 1..=m {
            let w = rational_to_f64(&BigRational::from_integer(map_weight(m, k)));
            acc += g[k - 1] * w;
            mass += (g[k - 1] * w).abs();
        }
        if mass * f64::EPSILON > FLOAT_AMPLIFICATION_LIMIT {
            break;
        }
        h.push(acc);
    }
    h
}

/// Jackson damping factors `g_0..g_M` (positive kernel).
fn jackson_weights(m: usize) -> Vec<f64> {
    let n = (m + 1) as f64;
    let pi = std::f64::consts::PI;
    (0..=m)
        .map(|k| {
            let a = pi * k as f64 / n;
            ((n - k as f64) * a.cos() + a.sin() / (pi / n).tan()) / n
        })
        .collect()
}

/// `a^{(1/n)}` convolved with itself `n` times.
pub fn convolution_root_check(c: &Sequence, n: usize) -> Result<Sequence> {
    if n == 0 {
        return Err(invalid("n", "must be positive"));
    }
    let root = conv_group_power(c, &Scalar::ratio(1, n as i64))?.terms;
    let mut acc = root.clone();
    for _ in 1..n {
        acc = convolve(&acc, &root);
    }
    Ok(acc)
}
