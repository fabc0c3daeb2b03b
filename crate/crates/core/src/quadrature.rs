//! Composite Gauss-Legendre rules with a doubling error estimate.

use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::config::PANEL_ORDER;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct QuadResult {
    pub value: f64,
    /// `|Q_{2n} - Q_n|`.
    pub error: f64,
}

/// Nodes and weights of the `n`-point Gauss-Legendre rule on `[-1, 1]`,
/// nodes ascending.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n > 0, "rule order must be positive");
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let pi = std::f64::consts::PI;
    for i in 0..n.div_ceil(2) {
        let mut x = (pi * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() <= 1e-16 {
                break;
            }
        }
        let (_, d) = legendre(n, x);
        dp = if d != 0.0 { d } else { dp };
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

/// `(P_n(x), P_n'(x))` by the three-term recurrence.
fn legendre(n: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    for k in 2..=n {
        let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
        p0 = p1;
        p1 = p2;
    }
    if n == 0 {
        return (1.0, 0.0);
    }
    (p1, n as f64 * (x * p1 - p0) / (x * x - 1.0))
}

fn panel_rule() -> &'static (Vec<f64>, Vec<f64>) {
    static RULE: OnceLock<(Vec<f64>, Vec<f64>)> = OnceLock::new();
    RULE.get_or_init(|| gauss_legendre(PANEL_ORDER))
}

/// `int_a^b f` with `panels` equal panels of the 16-point rule. Terms are
/// added by pairwise summation in node order.
pub fn composite(f: impl Fn(f64) -> f64, a: f64, b: f64, panels: usize) -> f64 {
    let (x, w) = panel_rule();
    let panels = panels.max(1);
    let h = (b - a) / panels as f64;
    let mut terms = Vec::with_capacity(panels * x.len());
    for j in 0..panels {
        let left = a + h * j as f64;
        let mid = left + 0.5 * h;
        for (xi, wi) in x.iter().zip(w) {
            terms.push(wi * f(mid + 0.5 * h * xi));
        }
    }
    0.5 * h * pairwise_sum(&terms)
}

/// Composite rule with about `n_nodes` nodes, and again with twice as
/// many; the finer value is returned.
pub fn integrate(f: impl Fn(f64) -> f64, a: f64, b: f64, n_nodes: usize) -> QuadResult {
    let panels = n_nodes.div_ceil(PANEL_ORDER).max(1);
    let coarse = composite(&f, a, b, panels);
    let fine = composite(&f, a, b, 2 * panels);
    QuadResult {
        value: fine,
        error: (fine - coarse).abs(),
    }
}

pub fn pairwise_sum(v: &[f64]) -> f64 {
    match v.len() {
        0 => 0.0,
        1 => v[0],
        n if n <= 8 => v.iter().sum(),
        n => pairwise_sum(&v[..n / 2]) + pairwise_sum(&v[n / 2..]),
    }
}
