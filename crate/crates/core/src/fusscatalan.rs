//! Fuss-Catalan (Raney) numbers, binomial sequences and their support
//! constants.
//!
//! Everything is evaluated by the product formulas directly, never through
//! gamma functions, so rational parameters give exact rationals and
//! negative-integer arguments cause no pole trouble.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::scalar::{binomial, Scalar, Sequence};

/// Parameter pair `(p, r)` of `A_n(p, r)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FcParams {
    pub p: Scalar,
    pub r: Scalar,
}

impl FcParams {
    pub fn new(p: Scalar, r: Scalar) -> Self {
        FcParams { p, r }
    }

    /// Support radius `tau_p`; requires `p >= 1`.
    pub fn tau_p(&self) -> Result<Scalar> {
        tau(&self.p)
    }

    /// Branch point `z_p = 1 / tau_p`.
    pub fn z_p(&self) -> Result<Scalar> {
        tau(&self.p)?.recip()
    }
}

/// `A_0 = 1`, `A_n = (r / n!) prod_{j=1}^{n-1} (pn + r - j)`.
pub fn fc_number(params: &FcParams, n: usize) -> Scalar {
    let FcParams { p, r } = params;
    let exact = p.is_exact() && r.is_exact();
    if n == 0 {
        return if exact {
            Scalar::one()
        } else {
            Scalar::float(1.0)
        };
    }
    let pn_r = &(p * &Scalar::from_usize(n)) + r;
    let mut acc = r.clone();
    for j in 1..n {
        acc = &acc * &(&pn_r - &Scalar::from_usize(j));
    }
    let mut fact = Scalar::one();
    for i in 2..=n {
        fact = &fact * &Scalar::from_usize(i);
    }
    acc.checked_div(&fact).expect("n! > 0")
}

/// `(A_0, ..., A_N)`.
pub fn fc_sequence(params: &FcParams, n_max: usize) -> Sequence {
    Sequence::from_fn(n_max, |n| fc_number(params, n))
}

/// `C(pn + r - 1, n)` for `n = 0..=N`.
pub fn binomial_sequence(params: &FcParams, n_max: usize) -> Sequence {
    let FcParams { p, r } = params;
    Sequence::from_fn(n_max, |n| {
        let upper = &(&(p * &Scalar::from_usize(n)) + r) - &Scalar::one();
        let v = binomial(&upper, n as u64);
        if p.is_exact() && r.is_exact() {
            v
        } else {
            v.to_float()
        }
    })
}

/// Canonical sequence of `(A_n(p, 1))`: `b_{n-1} = C(pn - 1, n - 1)`,
/// `n = 1..=N+1`.
pub fn fc_canonical_sequence(p: &Scalar, n_max: usize) -> Result<Sequence> {
    require_p_at_least_one(p)?;
    Ok(Sequence::from_fn(n_max, |i| {
        let n = i + 1;
        let upper = &(p * &Scalar::from_usize(n)) - &Scalar::one();
        binomial(&upper, i as u64)
    }))
}

/// Both sides of
/// `n sum_{k=1}^n (-1)^{k-1}/k C(n,k) A_n(p,k) = C(pn - 1, n - 1)`,
/// each computed on its own path.
pub fn fc_alternating_identity(p: &Scalar, n: usize) -> Result<(Scalar, Scalar)> {
    if n == 0 {
        return Err(invalid("n", "must be at least 1"));
    }
    if !p.is_exact() {
        return Err(invalid("p", "the alternating identity is an exact check"));
    }
    let mut sum = Scalar::zero();
    for k in 1..=n {
        let a = fc_number(&FcParams::new(p.clone(), Scalar::from_usize(k)), n);
        let c = binomial(&Scalar::from_usize(n), k as u64);
        let term = (&c * &a).checked_div(&Scalar::from_usize(k))?;
        sum = if k % 2 == 1 { sum + term } else { sum - term };
    }
    let lhs = &Scalar::from_usize(n) * &sum;
    let upper = &(p * &Scalar::from_usize(n)) - &Scalar::one();
    let rhs = binomial(&upper, (n - 1) as u64);
    Ok((lhs, rhs))
}

/// `tau_p = p^p / (p-1)^{p-1}` (`tau_1 = 1`); exact for integer `p`.
pub fn tau(p: &Scalar) -> Result<Scalar> {
    require_p_at_least_one(p)?;
    if *p == Scalar::one() {
        return Ok(if p.is_exact() {
            Scalar::one()
        } else {
            Scalar::float(1.0)
        });
    }
    if let Some(k) = p.to_i64_exact() {
        let num = Scalar::int(k).powi(k)?;
        let den = Scalar::int(k - 1).powi(k - 1)?;
        return num.checked_div(&den);
    }
    Ok(Scalar::float(tau_f64(p.to_f64())))
}

/// Float `tau_p` for `p >= 1`.
pub fn tau_f64(p: f64) -> f64 {
    if p == 1.0 {
        1.0
    } else if p.fract() == 0.0 && p <= 64.0 {
        p.powi(p as i32) / (p - 1.0).powi(p as i32 - 1)
    } else {
        (p * p.ln() - (p - 1.0) * (p - 1.0).ln()).exp()
    }
}

fn require_p_at_least_one(p: &Scalar) -> Result<()> {
    if p.to_f64() < 1.0 || *p < Scalar::one() {
        return Err(invalid("p", format!("must be >= 1, got {p}")));
    }
    Ok(())
}
