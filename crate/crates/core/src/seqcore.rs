//! Finite differences, truncated complete-monotonicity tests and the
//! sequence-to-sequence transforms (dilation, exchangeable compounding,
//! convolution, composition, leading differences, triangular array).
//!
//! Every test here is a truncated-order certificate: a sequence with
//! `N + 1` known terms is checked on all cells `(j, k)` with `j + k <= N`,
//! and the report says "verified to order N", never more.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed};
use serde::{Deserialize, Serialize};

use crate::config;
use crate::error::{invalid, Error, Result};
use crate::scalar::{binomial_int, Scalar, ScalarKind, Sequence};

/// Table of all backward differences `(I - S)^k c_j` with `j + k <= K`.
///
/// Exact sequences are scaled to a common denominator so the table itself
/// is pure big-integer subtraction.
#[derive(Clone, Debug)]
pub struct DifferenceTable {
    repr: TableRepr,
}

#[derive(Clone, Debug)]
enum TableRepr {
    Exact {
        denom: BigInt,
        rows: Vec<Vec<BigInt>>,
    },
    Float(Vec<Vec<f64>>),
}

impl DifferenceTable {
    pub fn new(c: &Sequence) -> Self {
        let repr = match c.kind() {
            ScalarKind::Exact => {
                let qs: Vec<&BigRational> = c.terms().iter().filter_map(Scalar::as_exact).collect();
                let denom = qs.iter().fold(BigInt::one(), |acc, q| acc.lcm(q.denom()));
                let first: Vec<BigInt> = qs
                    .iter()
                    .map(|q| q.numer() * (&denom / q.denom()))
                    .collect();
                let mut rows = vec![first];
                while rows.last().map_or(0, Vec::len) > 1 {
                    let prev = rows.last().unwrap();
                    let next = prev.windows(2).map(|w| &w[0] - &w[1]).collect();
                    rows.push(next);
                }
                TableRepr::Exact { denom, rows }
            }
            ScalarKind::Float => {
                let mut rows = vec![c.to_f64_vec()];
                while rows.last().map_or(0, Vec::len) > 1 {
                    let prev = rows.last().unwrap();
                    let next = prev.windows(2).map(|w| w[0] - w[1]).collect();
                    rows.push(next);
                }
                TableRepr::Float(rows)
            }
        };
        DifferenceTable { repr }
    }

    /// Highest order `K = N`.
    pub fn order(&self) -> usize {
        match &self.repr {
            TableRepr::Exact { rows, .. } => rows.len() - 1,
            TableRepr::Float(rows) => rows.len() - 1,
        }
    }

    /// `(I - S)^k c_j`; requires `j + k <= N`.
    pub fn get(&self, k: usize, j: usize) -> Scalar {
        match &self.repr {
            TableRepr::Exact { denom, rows } => {
                Scalar::Exact(BigRational::new(rows[k][j].clone(), denom.clone()))
            }
            TableRepr::Float(rows) => Scalar::Float(rows[k][j]),
        }
    }

    /// Sign test against `-tol` (floats) or `0` (exact).
    fn is_violation(&self, k: usize, j: usize, tol: f64) -> bool {
        match &self.repr {
            TableRepr::Exact { rows, .. } => rows[k][j].is_negative(),
            TableRepr::Float(rows) => rows[k][j] < -tol,
        }
    }

    /// Scans cells in lexicographic `(k, j)` order.
    pub fn monotonicity_report(&self, tol: f64) -> MonotonicityReport {
        let n = self.order();
        let mut witness = None;
        let mut first_bad_total = usize::MAX;
        for k in 0..=n {
            for j in 0..=(n - k) {
                if self.is_violation(k, j, tol) {
                    if witness.is_none() {
                        witness = Some(Witness {
                            j,
                            k,
                            value: self.get(k, j),
                        });
                    }
                    first_bad_total = first_bad_total.min(j + k);
                }
            }
        }
        match witness {
            None => MonotonicityReport {
                verdict: Verdict::VerifiedToOrder,
                max_order: Some(n),
                witness: None,
            },
            Some(w) => MonotonicityReport {
                verdict: Verdict::Violated,
                max_order: first_bad_total.checked_sub(1),
                witness: Some(w),
            },
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    VerifiedToOrder,
    Violated,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    pub j: usize,
    pub k: usize,
    pub value: Scalar,
}

/// Outcome of a truncated complete-monotonicity test.
///
/// `max_order` is the largest `K` such that every cell with `j + k <= K`
/// is nonnegative (`None` if even `c_0` fails). The witness is the first
/// violating cell in `(k, j)` order.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MonotonicityReport {
    pub verdict: Verdict,
    pub max_order: Option<usize>,
    pub witness: Option<Witness>,
}

impl MonotonicityReport {
    pub fn verified(&self) -> bool {
        self.verdict == Verdict::VerifiedToOrder
    }
}

/// Default float threshold `1e-12 * max(1, max |c_j|)`.
pub fn default_tol(c: &Sequence) -> f64 {
    config::FLOAT_TOL_SCALE * Scalar::max_abs(c.terms()).max(1.0)
}

pub fn finite_difference(c: &Sequence, k: usize, j: usize) -> Result<Scalar> {
    let n = c.order();
    if j + k > n {
        return Err(Error::IndexOutOfRange {
            requested: j + k,
            max: n,
        });
    }
    let mut acc = Scalar::zero().with_kind(c.kind())?;
    for i in 0..=k {
        let coeff = Scalar::Exact(BigRational::from_integer(binomial_int(k as u64, i as u64)));
        let term = &coeff * &c[i + j];
        acc = if i % 2 == 0 { acc + term } else { acc - term };
    }
    Ok(acc)
}

pub fn check_completely_monotone(c: &Sequence, tol: f64) -> MonotonicityReport {
    DifferenceTable::new(c).monotonicity_report(tol)
}

/// Complete alternation: the increment sequence `(a_{n+1} - a_n)` is
/// completely monotone.
pub fn check_completely_alternating(a: &Sequence, tol: f64) -> Result<MonotonicityReport> {
    if a.len() < 2 {
        return Err(Error::TooShort {
            needed: 2,
            got: a.len(),
        });
    }
    let inc = increments(a);
    Ok(check_completely_monotone(&inc, tol))
}

fn increments(a: &Sequence) -> Sequence {
    let terms = a.terms().windows(2).map(|w| &w[1] - &w[0]).collect();
    Sequence::new(terms).expect("len >= 1")
}

/// `(c_j tau^{-j})` tested for complete monotonicity.
pub fn check_dilated_hausdorff(c: &Sequence, tau: &Scalar, tol: f64) -> Result<MonotonicityReport> {
    let scaled = dilate_to_unit(c, tau)?;
    Ok(check_completely_monotone(&scaled, tol))
}

/// `c_j tau^{-j}`; exact when both `c` and `tau` are exact.
pub fn dilate_to_unit(c: &Sequence, tau: &Scalar) -> Result<Sequence> {
    if !tau.is_positive() {
        return Err(invalid("tau", format!("must be positive, got {tau}")));
    }
    let inv = tau.recip()?;
    let mut pow = Scalar::one();
    let mut out = Vec::with_capacity(c.len());
    for t in c.terms() {
        out.push(t * &pow);
        pow = &pow * &inv;
    }
    Sequence::new(out)
}

/// Moments of a convex distribution function: `a_0 = 0`, `a_n = n c_{n-1}`
/// must be completely alternating.
pub fn check_convex_moments(c: &Sequence, tol: f64) -> MonotonicityReport {
    if c[0] != Scalar::one() {
        log::warn!("check_convex_moments: c_0 = {} is not 1", c[0]);
    }
    let mut a = vec![Scalar::zero().with_kind(c.kind()).expect("zero is exact")];
    for (i, t) in c.terms().iter().enumerate() {
        a.push(&Scalar::from_usize(i + 1) * t);
    }
    let a = Sequence::new(a).expect("nonempty");
    check_completely_alternating(&a, tol).expect("len >= 2")
}

/// Moments of a concave distribution function: `((n+1) c_n)` completely
/// monotone.
pub fn check_concave_moments(c: &Sequence, tol: f64) -> MonotonicityReport {
    let weighted = c.map(|i, t| &Scalar::from_usize(i + 1) * t);
    check_completely_monotone(&weighted, tol)
}

/// Finite measure `sum mass_i delta_{t_i}` with atoms in `[0, tau]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DiscreteMeasure {
    atoms: Vec<(Scalar, Scalar)>,
    tau: Scalar,
}

impl DiscreteMeasure {
    pub fn new(atoms: Vec<(Scalar, Scalar)>, tau: Scalar) -> Result<Self> {
        if !tau.is_positive() {
            return Err(invalid("tau", "must be positive"));
        }
        for (t, m) in &atoms {
            if t.is_negative() || *t > tau {
                return Err(invalid("atom", format!("location {t} outside [0, {tau}]")));
            }
            if m.is_negative() {
                return Err(invalid("atom", format!("negative mass {m}")));
            }
        }
        Ok(DiscreteMeasure { atoms, tau })
    }

    /// Measure on `[0, 1]`.
    pub fn on_unit(atoms: Vec<(Scalar, Scalar)>) -> Result<Self> {
        DiscreteMeasure::new(atoms, Scalar::one())
    }

    pub fn dirac(t: Scalar) -> Result<Self> {
        let tau = if t > Scalar::one() {
            t.clone()
        } else {
            Scalar::one()
        };
        DiscreteMeasure::new(vec![(t, Scalar::one())], tau)
    }

    pub fn atoms(&self) -> &[(Scalar, Scalar)] {
        &self.atoms
    }

    pub fn tau(&self) -> &Scalar {
        &self.tau
    }

    pub fn is_exact(&self) -> bool {
        self.tau.is_exact() && self.atoms.iter().all(|(t, m)| t.is_exact() && m.is_exact())
    }

    /// Power moments `sum mass * t^j`, `j = 0..=n` (with `0^0 = 1`).
    pub fn moments(&self, n: usize) -> Sequence {
        let exact = self.is_exact();
        Sequence::from_fn(n, |j| {
            let mut acc = if exact {
                Scalar::zero()
            } else {
                Scalar::float(0.0)
            };
            for (t, m) in &self.atoms {
                acc = acc + m * &t.powi(j as i64).expect("nonnegative exponent");
            }
            acc
        })
    }
}

/// Envelope `|c_j| <= scale * ratio^j` assumed for the unseen tail `j > N`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TailEnvelope {
    pub scale: f64,
    pub ratio: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CompoundOptions {
    pub tail_tol: f64,
    /// `None` means `scale = sup_j |c_j|` over the known prefix, `ratio = 1`.
    pub envelope: Option<TailEnvelope>,
}

impl CompoundOptions {
    pub fn new(tail_tol: f64) -> Self {
        CompoundOptions {
            tail_tol,
            envelope: None,
        }
    }

    pub fn with_envelope(mut self, scale: f64, ratio: f64) -> Self {
        self.envelope = Some(TailEnvelope { scale, ratio });
        self
    }
}

/// Bound on `sum_{j > n} C(j, k) a^{j-k} rho^j` (infinite when divergent).
fn binomial_tail(n: usize, k: usize, a: f64, rho: f64) -> f64 {
    if a == 0.0 || rho == 0.0 {
        return 0.0;
    }
    if a * rho >= 1.0 {
        return f64::INFINITY;
    }
    let j0 = n + 1;
    let mut log_c = 0.0;
    for i in 0..k {
        log_c += ((j0 - i) as f64).ln() - ((i + 1) as f64).ln();
    }
    let mut log_term = log_c + (j0 - k) as f64 * a.ln() + j0 as f64 * rho.ln();
    let mut sum = 0.0;
    for j in (j0..).take(10_000_000) {
        let term = log_term.exp();
        sum += term;
        let r = (j + 1) as f64 / (j + 1 - k) as f64 * a * rho;
        if r < 1.0 {
            let rem = term * r / (1.0 - r);
            if rem <= 1e-17 * sum || rem < 1e-300 {
                return sum + rem;
            }
        }
        log_term += r.ln();
    }
    f64::INFINITY
}

/// Compounding against exchangeable trials with mixing measure `nu`:
/// `b_k = sum_{j >= k} c_j C(j,k) sum_atoms mass (1-t)^{j-k} t^k`.
///
/// The output stops at the largest `M` such that the tail bound for every
/// `k <= M` is below `opts.tail_tol`; `0^0` is taken as `1`.
pub fn exchangeable_compound(
    c: &Sequence,
    nu: &DiscreteMeasure,
    opts: &CompoundOptions,
) -> Result<Sequence> {
    for (t, _) in nu.atoms() {
        if t.is_negative() || t.to_f64() >= 2.0 {
            return Err(invalid("nu", format!("atom {t} outside [0, 2)")));
        }
    }
    let n = c.order();
    let env = opts.envelope.unwrap_or(TailEnvelope {
        scale: Scalar::max_abs(c.terms()),
        ratio: 1.0,
    });

    let mut m = None;
    let mut worst = 0.0;
    for k in 0..=n {
        let mut bound = 0.0;
        for (t, mass) in nu.atoms() {
            let tf = t.to_f64();
            let tk = if k == 0 { 1.0 } else { tf.abs().powi(k as i32) };
            if tk == 0.0 || env.scale == 0.0 || mass.is_zero() {
                continue;
            }
            bound +=
                mass.to_f64() * tk * env.scale * binomial_tail(n, k, (1.0 - tf).abs(), env.ratio);
        }
        if k == 0 {
            worst = bound;
        }
        if !(bound < opts.tail_tol) {
            break;
        }
        m = Some(k);
    }
    let m = m.ok_or(Error::TailBoundUnachievable {
        bound: worst,
        tol: opts.tail_tol,
    })?;

    let exact = c.is_exact() && nu.is_exact();
    let zero = if exact {
        Scalar::zero()
    } else {
        Scalar::float(0.0)
    };
    let mut out = vec![zero; m + 1];
    for (t, mass) in nu.atoms() {
        let q = &Scalar::one() - t;
        // q^i for i = 0..=n, with 0^0 = 1
        let mut qpow = Vec::with_capacity(n + 1);
        let mut acc = Scalar::one();
        for _ in 0..=n {
            qpow.push(acc.clone());
            acc = &acc * &q;
        }
        let mut tk = Scalar::one();
        for (k, slot) in out.iter_mut().enumerate() {
            let mut inner = zero_like(exact);
            for j in k..=n {
                let coeff =
                    Scalar::Exact(BigRational::from_integer(binomial_int(j as u64, k as u64)));
                inner = inner + &(&coeff * &c[j]) * &qpow[j - k];
            }
            *slot = slot.clone() + &(mass * &tk) * &inner;
            tk = &tk * t;
        }
    }
    Sequence::new(out)
}

fn zero_like(exact: bool) -> Scalar {
    if exact {
        Scalar::zero()
    } else {
        Scalar::float(0.0)
    }
}

/// Generating function `G(z) = F(pz + 1 - p)`; the single-atom case of
/// [`exchangeable_compound`].
pub fn dilate_compound(c: &Sequence, p: &Scalar, opts: &CompoundOptions) -> Result<Sequence> {
    let pf = p.to_f64();
    if !(pf > 0.0 && pf < 2.0) {
        return Err(invalid("p", format!("must lie in (0, 2), got {p}")));
    }
    let nu = DiscreteMeasure::new(vec![(p.clone(), Scalar::one())], p.clone())?;
    exchangeable_compound(c, &nu, opts)
}

/// Cauchy product truncated to the shorter length.
pub fn convolve(b: &Sequence, c: &Sequence) -> Sequence {
    let len = b.len().min(c.len());
    let exact = b.is_exact() && c.is_exact();
    let terms = (0..len)
        .map(|k| {
            let mut acc = zero_like(exact);
            for i in 0..=k {
                acc = acc + &b[i] * &c[k - i];
            }
            acc
        })
        .collect();
    Sequence::new(terms).expect("nonempty")
}

/// Coefficients of `G(F(z))`: `a_k = sum_j b_j (c^{*j})_k`, `k < len(c)`.
///
/// `b` is used as given (terms past its end count as zero). When
/// `c_0 = 0` only `j <= k` contribute, so the result is exact whenever
/// `len(b) >= len(c)`; otherwise see [`compose_truncation_bound`].
pub fn compound_compose(b: &Sequence, c: &Sequence) -> Sequence {
    let len = c.len();
    let exact = b.is_exact() && c.is_exact();
    let mut power = Sequence::new(
        (0..len)
            .map(|i| {
                if i == 0 {
                    Scalar::one()
                } else {
                    Scalar::zero()
                }
            })
            .collect(),
    )
    .expect("nonempty");
    if !exact {
        power = power.map(|_, t| t.to_float());
    }
    let mut acc = vec![zero_like(exact); len];
    let c0_zero = c[0].is_zero();
    for (j, bj) in b.terms().iter().enumerate() {
        if c0_zero && j >= len {
            break;
        }
        for (slot, pk) in acc.iter_mut().zip(power.terms()) {
            *slot = slot.clone() + bj * pk;
        }
        power = convolve(&power, c);
    }
    Sequence::new(acc).expect("nonempty")
}

/// Worst-case error of [`compound_compose`] from the unseen tail of `b`
/// when `b` is a probability prefix and `c` a probability distribution:
/// `1 - sum b_j`. `None` when the composition is exact.
pub fn compose_truncation_bound(b: &Sequence, c: &Sequence) -> Option<f64> {
    if c[0].is_zero() && b.len() >= c.len() {
        return None;
    }
    let mass: f64 = b.to_f64_vec().iter().sum();
    Some((1.0 - mass).max(0.0))
}

/// `hat c_k = (I - S)^k c_0`. An involution.
pub fn leading_differences(c: &Sequence) -> Sequence {
    let table = DifferenceTable::new(c);
    Sequence::new((0..=table.order()).map(|k| table.get(k, 0)).collect()).expect("nonempty")
}

/// Row `n` of the triangular array `c_{n,m} = C(n,m) (I-S)^{n-m} c_m`,
/// `m = 0..=n`.
pub fn diaconis_freedman_array(c: &Sequence, n: usize) -> Result<Vec<Scalar>> {
    if n > c.order() {
        return Err(Error::IndexOutOfRange {
            requested: n,
            max: c.order(),
        });
    }
    let table = DifferenceTable::new(&c.truncate(n));
    Ok(triangular_row(&table, n))
}

pub(crate) fn triangular_row(table: &DifferenceTable, n: usize) -> Vec<Scalar> {
    (0..=n)
        .map(|m| {
            let coeff = Scalar::Exact(BigRational::from_integer(binomial_int(n as u64, m as u64)));
            &coeff * &table.get(n - m, m)
        })
        .collect()
}
