//! Monte Carlo moments of `W = P P* / N^m`, `P = X_1 ... X_m` a product of
//! independent `N x N` standard complex Gaussian matrices.
//!
//! `(1/N) tr W^n` is accumulated per trial; trial `i` draws from Philox
//! stream `(seed, i)`, and trials are reduced in index order, so results
//! are bit-identical for a given seed whatever the thread count.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::SPECTRA_MAX_MOMENT;
use crate::error::{invalid, Result};
use crate::fusscatalan::{fc_number, FcParams};
use crate::rng::PhiloxStream;
use crate::scalar::Scalar;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectraConfig {
    pub m: usize,
    #[serde(rename = "N")]
    pub size: usize,
    pub n_max: usize,
    pub trials: usize,
    pub seed: u64,
}

impl SpectraConfig {
    pub fn validate(&self) -> Result<()> {
        if self.m == 0 {
            return Err(invalid("m", "at least one factor is required"));
        }
        if self.size == 0 {
            return Err(invalid("N", "matrix size must be positive"));
        }
        if self.n_max == 0 || self.n_max > SPECTRA_MAX_MOMENT {
            return Err(invalid(
                "n_max",
                format!("must lie in 1..={SPECTRA_MAX_MOMENT}, got {}", self.n_max),
            ));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MomentEstimate {
    pub n: usize,
    pub mean: f64,
    /// Sample standard deviation over `sqrt(trials)`; zero for one trial.
    pub stderr: f64,
    /// `A_n(m+1, 1)`.
    pub target: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectraReport {
    pub m: usize,
    #[serde(rename = "N")]
    pub size: usize,
    pub trials: usize,
    pub seed: u64,
    pub moments: Vec<MomentEstimate>,
    /// Largest `|Im tr W^n| / max(1, |Re tr W^n|)` seen.
    pub max_imag_residue: f64,
}

/// `A_n(m+1, 1)`, the `n`-th moment of the limiting law for `m` factors.
pub fn fc_target(m: usize, n: usize) -> f64 {
    fc_number(&FcParams::new(Scalar::from_usize(m + 1), Scalar::one()), n).to_f64()
}

pub fn sample_product_moments(cfg: &SpectraConfig) -> Result<SpectraReport> {
    cfg.validate()?;
    let per_trial: Vec<(Vec<f64>, f64)> = (0..cfg.trials as u64)
        .into_par_iter()
        .map(|i| trial_moments(cfg, i))
        .collect();
    let mut residue: f64 = 0.0;
    for (_, r) in &per_trial {
        residue = residue.max(*r);
    }
    let moments = if per_trial.is_empty() {
        Vec::new()
    } else {
        let t = per_trial.len() as f64;
        (1..=cfg.n_max)
            .map(|n| {
                let xs: Vec<f64> = per_trial.iter().map(|(v, _)| v[n - 1]).collect();
                let mean = xs.iter().sum::<f64>() / t;
                let stderr = if xs.len() < 2 {
                    0.0
                } else {
                    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (t - 1.0);
                    (var / t).sqrt()
                };
                MomentEstimate {
                    n,
                    mean,
                    stderr,
                    target: fc_target(cfg.m, n),
                }
            })
            .collect()
    };
    Ok(SpectraReport {
        m: cfg.m,
        size: cfg.size,
        trials: cfg.trials,
        seed: cfg.seed,
        moments,
        max_imag_residue: residue,
    })
}

fn gaussian_matrix(n: usize, rng: &mut PhiloxStream) -> DMatrix<Complex64> {
    DMatrix::from_fn(n, n, |_, _| rng.next_complex_gaussian())
}

/// `(1/N) Re tr W^n` for `n = 1..=n_max` and the imaginary residue.
fn trial_moments(cfg: &SpectraConfig, trial: u64) -> (Vec<f64>, f64) {
    let mut rng = PhiloxStream::new(cfg.seed, trial);
    let n = cfg.size;
    let mut p = gaussian_matrix(n, &mut rng);
    for _ in 1..cfg.m {
        p = &p * gaussian_matrix(n, &mut rng);
    }
    let scale = (n as f64).powi(cfg.m as i32);
    let w = (&p * p.adjoint()) / Complex64::new(scale, 0.0);
    // tr W^{a+b} = sum_ij (W^a)_ij (W^b)_ji with a, b <= ceil(n_max / 2).
    let half = cfg.n_max.div_ceil(2);
    let mut powers = vec![w.clone()];
    for _ in 1..half {
        let next = powers.last().unwrap() * &w;
        powers.push(next);
    }
    let mut out = Vec::with_capacity(cfg.n_max);
    let mut residue: f64 = 0.0;
    for k in 1..=cfg.n_max {
        let a = k.div_ceil(2);
        let b = k - a;
        let tr = if b == 0 {
            powers[a - 1].trace()
        } else {
            powers[a - 1]
                .iter()
                .zip(powers[b - 1].transpose().iter())
                .map(|(x, y)| x * y)
                .sum::<Complex64>()
        } / n as f64;
        residue = residue.max(tr.im.abs() / tr.re.abs().max(1.0));
        out.push(tr.re);
    }
    (out, residue)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MomentFlag {
    pub n: usize,
    pub mean: f64,
    pub target: f64,
    pub deviation: f64,
    /// `max(rel_tol * target, 3 * stderr)`.
    pub allowed: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Comparison {
    pub rel_tol: f64,
    pub flags: Vec<MomentFlag>,
}

impl Comparison {
    pub fn passed(&self) -> bool {
        self.flags.is_empty()
    }
}

/// Flags estimates with `|mean - target| > max(rel_tol * target, 3 stderr)`.
pub fn compare_to_fc(estimates: &[MomentEstimate], rel_tol: f64) -> Comparison {
    let flags = estimates
        .iter()
        .filter_map(|e| {
            let deviation = (e.mean - e.target).abs();
            let allowed = (rel_tol * e.target.abs()).max(3.0 * e.stderr);
            (deviation > allowed).then_some(MomentFlag {
                n: e.n,
                mean: e.mean,
                target: e.target,
                deviation,
                allowed,
            })
        })
        .collect();
    Comparison { rel_tol, flags }
}
