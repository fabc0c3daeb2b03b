//! Distribution-function estimates on `[0, tau]` from a finite moment
//! prefix, built on row `n` of the triangular array
//! `c_{n,m} = C(n,m) (I - S)^{n-m} c_m`.
//!
//! `F_hat(x) = sum_{m <= n x / tau} c_{n,m} / c_0`, a step function that is
//! right-continuous at `x_m = tau m / n`.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::scalar::{Scalar, Sequence};
use crate::seqcore::{default_tol, dilate_to_unit, triangular_row, DifferenceTable};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DistributionEstimate {
    pub tau: f64,
    pub order: usize,
    /// `x_m = tau m / n`, `m = 0..=n`.
    pub grid: Vec<f64>,
    /// `F_hat(x_m)`; nondecreasing, last entry 1.
    pub cdf: Vec<f64>,
}

impl DistributionEstimate {
    /// Step-function value; `0` left of the support, `1` right of it.
    pub fn eval(&self, x: f64) -> f64 {
        if x < 0.0 {
            return 0.0;
        }
        if x >= self.tau {
            return 1.0;
        }
        let m = ((self.order as f64) * x / self.tau).floor() as usize;
        self.cdf[m.min(self.order)]
    }

    /// `sup_x |F_hat(x) - F(x)|` for a continuous nondecreasing `F`, checked
    /// at both ends of every step.
    pub fn sup_distance(&self, f: impl Fn(f64) -> f64) -> f64 {
        let mut worst: f64 = 0.0;
        for m in 0..self.order {
            let v = self.cdf[m];
            worst = worst
                .max((v - f(self.grid[m])).abs())
                .max((v - f(self.grid[m + 1])).abs());
        }
        worst.max((self.cdf[self.order] - f(self.tau)).abs())
    }

    /// `G(x_m) = 1 - F_hat((tau - x_m)^-)` on the same grid.
    pub fn reflected(&self) -> Vec<f64> {
        (0..=self.order)
            .map(|m| {
                let k = self.order - m;
                if k == 0 {
                    1.0
                } else {
                    1.0 - self.cdf[k - 1]
                }
            })
            .collect()
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("x,cdf\n");
        for (x, f) in self.grid.iter().zip(&self.cdf) {
            out.push_str(&format!("{x},{f}\n"));
        }
        out
    }
}

/// Estimate from `c_0..c_n` on `[0, tau]`.
///
/// Errors with a witness when an entry of row `n` is negative; other
/// failures of complete monotonicity up to order `n` only log a warning.
pub fn reconstruct_cdf(c: &Sequence, n: usize, tau: &Scalar) -> Result<DistributionEstimate> {
    if n == 0 {
        return Err(invalid("n", "must be at least 1"));
    }
    if n > c.order() {
        return Err(Error::IndexOutOfRange {
            requested: n,
            max: c.order(),
        });
    }
    if c[0].is_zero() || c[0].is_negative() {
        return Err(invalid(
            "c_0",
            format!("total mass must be positive, got {}", c[0]),
        ));
    }
    let unit = dilate_to_unit(&c.truncate(n), tau)?;
    let tol = if unit.is_exact() {
        0.0
    } else {
        default_tol(&unit)
    };
    let table = DifferenceTable::new(&unit);
    let report = table.monotonicity_report(tol);
    if !report.verified() {
        log::warn!(
            "reconstruct_cdf: prefix is not completely monotone to order {n} (witness {:?})",
            report.witness
        );
    }
    let row = triangular_row(&table, n);
    for (m, v) in row.iter().enumerate() {
        let negative = match v {
            Scalar::Exact(_) => v.is_negative(),
            Scalar::Float(x) => *x < -tol,
        };
        if negative {
            return Err(Error::NegativeArrayEntry {
                order: n,
                row: n,
                index: m,
                value: v.to_string(),
            });
        }
    }
    let c0 = &unit[0];
    let mut acc = if unit.is_exact() {
        Scalar::zero()
    } else {
        Scalar::float(0.0)
    };
    let mut cdf = Vec::with_capacity(n + 1);
    for v in &row {
        acc = acc + v;
        cdf.push(acc.checked_div(c0)?.to_f64().clamp(0.0, 1.0));
    }
    // Row sums equal c_0, so exact input ends at 1 exactly.
    if unit.is_exact() {
        debug_assert_eq!(acc, *c0);
    }
    let t = tau.to_f64();
    Ok(DistributionEstimate {
        tau: t,
        order: n,
        grid: (0..=n).map(|m| t * m as f64 / n as f64).collect(),
        cdf,
    })
}
