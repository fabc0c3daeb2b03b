//! Exact-or-float scalars and finite sequence prefixes.
//!
//! A [`Scalar`] is either an arbitrary-precision rational (always kept in
//! lowest terms by `num-rational`) or a binary float. Arithmetic between two
//! exact values stays exact; anything touching a float becomes a float.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{de, Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{invalid, Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ScalarKind {
    Exact,
    Float,
}

impl FromStr for ScalarKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "exact" => Ok(ScalarKind::Exact),
            "float" => Ok(ScalarKind::Float),
            other => Err(Error::Parse(format!("unknown precision mode '{other}'"))),
        }
    }
}

#[derive(Clone, Debug)]
pub enum Scalar {
    Exact(BigRational),
    Float(f64),
}

impl Scalar {
    pub fn zero() -> Self {
        Scalar::Exact(BigRational::zero())
    }

    pub fn one() -> Self {
        Scalar::Exact(BigRational::one())
    }

    pub fn int(n: i64) -> Self {
        Scalar::Exact(BigRational::from_integer(BigInt::from(n)))
    }

    /// Exact `num/den`. Panics if `den == 0`.
    pub fn ratio(num: i64, den: i64) -> Self {
        assert!(den != 0, "zero denominator");
        Scalar::Exact(BigRational::new(BigInt::from(num), BigInt::from(den)))
    }

    pub fn float(x: f64) -> Self {
        Scalar::Float(x)
    }

    pub fn kind(&self) -> ScalarKind {
        match self {
            Scalar::Exact(_) => ScalarKind::Exact,
            Scalar::Float(_) => ScalarKind::Float,
        }
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, Scalar::Exact(_))
    }

    pub fn as_exact(&self) -> Option<&BigRational> {
        match self {
            Scalar::Exact(q) => Some(q),
            Scalar::Float(_) => None,
        }
    }

    /// Nearest `f64` (correctly rounded for exact values that fit).
    pub fn to_f64(&self) -> f64 {
        match self {
            Scalar::Exact(q) => rational_to_f64(q),
            Scalar::Float(x) => *x,
        }
    }

    /// Same value converted to the float kind.
    pub fn to_float(&self) -> Scalar {
        Scalar::Float(self.to_f64())
    }

    /// Exact rational with the same value. Floats convert bit-exactly;
    /// non-finite floats have no rational value.
    pub fn to_exact(&self) -> Option<BigRational> {
        match self {
            Scalar::Exact(q) => Some(q.clone()),
            Scalar::Float(x) => BigRational::from_float(*x),
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Scalar::Exact(q) => q.is_zero(),
            Scalar::Float(x) => *x == 0.0,
        }
    }

    pub fn is_negative(&self) -> bool {
        match self {
            Scalar::Exact(q) => q.is_negative(),
            Scalar::Float(x) => *x < 0.0,
        }
    }

    pub fn is_positive(&self) -> bool {
        match self {
            Scalar::Exact(q) => q.is_positive(),
            Scalar::Float(x) => *x > 0.0,
        }
    }

    pub fn is_integer(&self) -> bool {
        match self {
            Scalar::Exact(q) => q.is_integer(),
            Scalar::Float(x) => x.fract() == 0.0,
        }
    }

    pub fn abs(&self) -> Scalar {
        match self {
            Scalar::Exact(q) => Scalar::Exact(q.abs()),
            Scalar::Float(x) => Scalar::Float(x.abs()),
        }
    }

    pub fn recip(&self) -> Result<Scalar> {
        if self.is_zero() {
            return Err(invalid("divisor", "division by zero"));
        }
        Ok(match self {
            Scalar::Exact(q) => Scalar::Exact(q.recip()),
            Scalar::Float(x) => Scalar::Float(1.0 / x),
        })
    }

    pub fn checked_div(&self, rhs: &Scalar) -> Result<Scalar> {
        Ok(self * &rhs.recip()?)
    }

    /// Integer power; negative exponents need a nonzero base.
    pub fn powi(&self, e: i64) -> Result<Scalar> {
        if e < 0 {
            return self.recip()?.powi(-e);
        }
        Ok(match self {
            Scalar::Exact(q) => Scalar::Exact(num_traits::pow(q.clone(), e as usize)),
            Scalar::Float(x) => Scalar::Float(x.powi(e as i32)),
        })
    }

    /// Integer value of an exact integral scalar that fits in `i64`.
    pub fn to_i64_exact(&self) -> Option<i64> {
        match self {
            Scalar::Exact(q) if q.is_integer() => q.to_integer().to_i64(),
            _ => None,
        }
    }

    pub fn from_usize(n: usize) -> Scalar {
        Scalar::Exact(BigRational::from_integer(BigInt::from(n)))
    }

    /// Parses a literal in the requested precision mode.
    ///
    /// Exact mode accepts integers, `a/b`, and terminating decimals with an
    /// optional exponent; anything else (names, `nan`, `inf`, ...) is refused.
    pub fn parse(s: &str, kind: ScalarKind) -> Result<Scalar> {
        match kind {
            ScalarKind::Exact => parse_rational(s).map(Scalar::Exact),
            ScalarKind::Float => parse_float(s).map(Scalar::Float),
        }
    }

    /// Same value in the requested kind (float to exact is bit-exact).
    pub fn with_kind(&self, kind: ScalarKind) -> Result<Scalar> {
        match kind {
            ScalarKind::Float => Ok(self.to_float()),
            ScalarKind::Exact => self
                .to_exact()
                .map(Scalar::Exact)
                .ok_or_else(|| Error::Parse(format!("{self} has no exact value"))),
        }
    }

    /// Exact when both operands are exact, float otherwise.
    pub fn max_abs<'a>(values: impl IntoIterator<Item = &'a Scalar>) -> f64 {
        values
            .into_iter()
            .map(|v| v.to_f64().abs())
            .fold(0.0, f64::max)
    }
}

pub(crate) fn rational_to_f64(q: &BigRational) -> f64 {
    if let Some(x) = q.to_f64() {
        if x.is_finite() {
            return x;
        }
    }
    // Fallback for extreme magnitudes: scale by powers of two.
    let n = q.numer();
    let d = q.denom();
    let shift = n.bits() as i64 - d.bits() as i64;
    let scaled = if shift > 0 {
        BigRational::new(n.clone(), d.clone() << (shift as usize))
    } else {
        BigRational::new(n.clone() << ((-shift) as usize), d.clone())
    };
    scaled.to_f64().unwrap_or(f64::NAN) * 2f64.powi(shift.clamp(-2000, 2000) as i32)
}

fn parse_float(s: &str) -> Result<f64> {
    let t = s.trim();
    if let Some((a, b)) = t.split_once('/') {
        let num = parse_float(a)?;
        let den = parse_float(b)?;
        return Ok(num / den);
    }
    t.parse::<f64>()
        .map_err(|_| Error::Parse(format!("'{t}' is not a number")))
}

fn parse_rational(s: &str) -> Result<BigRational> {
    let t = s.trim();
    if let Some((a, b)) = t.split_once('/') {
        let num = parse_rational(a)?;
        let den = parse_rational(b)?;
        if den.is_zero() {
            return Err(Error::Parse(format!("'{t}' has a zero denominator")));
        }
        return Ok(num / den);
    }
    let refuse = || {
        Error::Parse(format!(
            "'{t}' is not a rational literal; exact mode accepts integers, a/b and decimals only (use --precision float for irrational values)"
        ))
    };
    let (mantissa, exponent) = match t.find(['e', 'E']) {
        Some(pos) => {
            let e: i64 = t[pos + 1..].parse().map_err(|_| refuse())?;
            (&t[..pos], e)
        }
        None => (t, 0),
    };
    let (neg, digits) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = digits.split_once('.').unwrap_or((digits, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(refuse());
    }
    if !int_part
        .bytes()
        .chain(frac_part.bytes())
        .all(|b| b.is_ascii_digit())
    {
        return Err(refuse());
    }
    let all: String = format!("{int_part}{frac_part}");
    let mut value = BigRational::from_integer(all.parse::<BigInt>().unwrap_or_default());
    let scale = exponent - frac_part.len() as i64;
    let ten = BigRational::from_integer(BigInt::from(10));
    if scale >= 0 {
        value *= num_traits::pow(ten, scale as usize);
    } else {
        value /= num_traits::pow(ten, (-scale) as usize);
    }
    if neg {
        value = -value;
    }
    Ok(value)
}

impl FromStr for Scalar {
    type Err = Error;

    /// Exact if the literal is rational, float otherwise.
    fn from_str(s: &str) -> Result<Scalar> {
        parse_rational(s)
            .map(Scalar::Exact)
            .or_else(|_| parse_float(s).map(Scalar::Float))
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Exact(q) if q.is_integer() => write!(f, "{}", q.numer()),
            Scalar::Exact(q) => write!(f, "{}/{}", q.numer(), q.denom()),
            Scalar::Float(x) => write!(f, "{x}"),
        }
    }
}

impl PartialEq for Scalar {
    fn eq(&self, other: &Scalar) -> bool {
        match (self, other) {
            (Scalar::Exact(a), Scalar::Exact(b)) => a == b,
            _ => self.to_f64() == other.to_f64(),
        }
    }
}

impl PartialOrd for Scalar {
    fn partial_cmp(&self, other: &Scalar) -> Option<Ordering> {
        match (self, other) {
            (Scalar::Exact(a), Scalar::Exact(b)) => Some(a.cmp(b)),
            _ => self.to_f64().partial_cmp(&other.to_f64()),
        }
    }
}

impl From<i64> for Scalar {
    fn from(n: i64) -> Self {
        Scalar::int(n)
    }
}

impl From<f64> for Scalar {
    fn from(x: f64) -> Self {
        Scalar::Float(x)
    }
}

impl From<BigRational> for Scalar {
    fn from(q: BigRational) -> Self {
        Scalar::Exact(q)
    }
}

macro_rules! binop {
    ($trait:ident, $method:ident, $op:tt) => {
        impl<'a, 'b> $trait<&'b Scalar> for &'a Scalar {
            type Output = Scalar;
            fn $method(self, rhs: &'b Scalar) -> Scalar {
                match (self, rhs) {
                    (Scalar::Exact(a), Scalar::Exact(b)) => Scalar::Exact(a $op b),
                    _ => Scalar::Float(self.to_f64() $op rhs.to_f64()),
                }
            }
        }
        impl $trait<Scalar> for Scalar {
            type Output = Scalar;
            fn $method(self, rhs: Scalar) -> Scalar {
                match (self, rhs) {
                    (Scalar::Exact(a), Scalar::Exact(b)) => Scalar::Exact(a $op b),
                    (a, b) => Scalar::Float(a.to_f64() $op b.to_f64()),
                }
            }
        }
        impl<'b> $trait<&'b Scalar> for Scalar {
            type Output = Scalar;
            fn $method(self, rhs: &'b Scalar) -> Scalar {
                &self $op rhs
            }
        }
    };
}

binop!(Add, add, +);
binop!(Sub, sub, -);
binop!(Mul, mul, *);

impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        match self {
            Scalar::Exact(q) => Scalar::Exact(-q),
            Scalar::Float(x) => Scalar::Float(-x),
        }
    }
}

impl Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        -(self.clone())
    }
}

impl Serialize for Scalar {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Scalar::Exact(_) => serializer.serialize_str(&self.to_string()),
            Scalar::Float(x) => serializer.serialize_f64(*x),
        }
    }
}

impl<'de> Deserialize<'de> for Scalar {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Repr {
            Str(String),
            Num(f64),
        }
        match Repr::deserialize(deserializer)? {
            Repr::Str(s) => parse_rational(&s)
                .map(Scalar::Exact)
                .map_err(de::Error::custom),
            Repr::Num(x) => Ok(Scalar::Float(x)),
        }
    }
}

/// Generalized binomial coefficient `C(upper, k)` as the falling-factorial
/// product `upper (upper-1) ... (upper-k+1) / k!`.
pub fn binomial(upper: &Scalar, k: u64) -> Scalar {
    match upper {
        Scalar::Exact(a) => {
            let mut num = BigRational::one();
            let mut den = BigInt::one();
            for i in 0..k {
                num *= a - BigRational::from_integer(BigInt::from(i));
                den *= BigInt::from(i + 1);
            }
            Scalar::Exact(num / BigRational::from_integer(den))
        }
        Scalar::Float(a) => {
            let mut v = 1.0;
            for i in 0..k {
                v *= (a - i as f64) / (i + 1) as f64;
            }
            Scalar::Float(v)
        }
    }
}

/// Integer binomial `C(n, k)` as a big integer.
pub fn binomial_int(n: u64, k: u64) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigInt::one();
    for i in 0..k {
        acc = acc * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    acc
}

/// Finite prefix `c_0..c_N` of a real sequence with a single scalar kind.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Scalar>", into = "Vec<Scalar>")]
pub struct Sequence {
    terms: Vec<Scalar>,
}

impl Sequence {
    /// Builds a sequence; mixed kinds are promoted to float.
    pub fn new(terms: Vec<Scalar>) -> Result<Self> {
        if terms.is_empty() {
            return Err(Error::EmptySequence);
        }
        let all_exact = terms.iter().all(Scalar::is_exact);
        let terms = if all_exact {
            terms
        } else {
            terms.into_iter().map(|t| t.to_float()).collect()
        };
        Ok(Sequence { terms })
    }

    pub fn exact(terms: Vec<BigRational>) -> Result<Self> {
        Sequence::new(terms.into_iter().map(Scalar::Exact).collect())
    }

    pub fn floats(terms: &[f64]) -> Result<Self> {
        Sequence::new(terms.iter().copied().map(Scalar::Float).collect())
    }

    /// `(f(0), ..., f(n_max))`.
    pub fn from_fn(n_max: usize, f: impl FnMut(usize) -> Scalar) -> Self {
        Sequence::new((0..=n_max).map(f).collect()).expect("nonempty by construction")
    }

    pub fn kind(&self) -> ScalarKind {
        self.terms[0].kind()
    }

    pub fn is_exact(&self) -> bool {
        self.kind() == ScalarKind::Exact
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Highest index `N`.
    pub fn order(&self) -> usize {
        self.terms.len() - 1
    }

    pub fn terms(&self) -> &[Scalar] {
        &self.terms
    }

    pub fn into_terms(self) -> Vec<Scalar> {
        self.terms
    }

    pub fn get(&self, i: usize) -> Option<&Scalar> {
        self.terms.get(i)
    }

    pub fn to_f64_vec(&self) -> Vec<f64> {
        self.terms.iter().map(Scalar::to_f64).collect()
    }

    pub fn map(&self, f: impl FnMut(usize, &Scalar) -> Scalar) -> Sequence {
        let mut f = f;
        Sequence::new(
            self.terms
                .iter()
                .enumerate()
                .map(|(i, t)| f(i, t))
                .collect(),
        )
        .expect("nonempty")
    }

    /// Prefix `c_0..c_n`.
    pub fn truncate(&self, n: usize) -> Sequence {
        let end = (n + 1).min(self.terms.len());
        Sequence {
            terms: self.terms[..end].to_vec(),
        }
    }

    /// Exact rationals of every term (floats convert bit-exactly).
    pub fn to_exact_vec(&self) -> Result<Vec<BigRational>> {
        self.terms
            .iter()
            .map(|t| {
                t.to_exact()
                    .ok_or_else(|| Error::Parse(format!("non-finite term {t}")))
            })
            .collect()
    }

    /// Parses one value per line (blank lines and `#` comments skipped).
    pub fn parse_lines(text: &str, kind: ScalarKind) -> Result<Sequence> {
        let terms = text
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty() && !l.starts_with('#'))
            .map(|l| Scalar::parse(l.split(',').next().unwrap_or(l), kind))
            .collect::<Result<Vec<_>>>()?;
        Sequence::new(terms)
    }

    /// Parses a comma-separated inline list.
    pub fn parse_list(text: &str, kind: ScalarKind) -> Result<Sequence> {
        let terms = text
            .split(',')
            .map(str::trim)
            .filter(|t| !t.is_empty())
            .map(|t| Scalar::parse(t, kind))
            .collect::<Result<Vec<_>>>()?;
        Sequence::new(terms)
    }
}

impl TryFrom<Vec<Scalar>> for Sequence {
    type Error = Error;
    fn try_from(v: Vec<Scalar>) -> Result<Self> {
        Sequence::new(v)
    }
}

impl From<Sequence> for Vec<Scalar> {
    fn from(s: Sequence) -> Self {
        s.terms
    }
}

impl std::ops::Index<usize> for Sequence {
    type Output = Scalar;
    fn index(&self, i: usize) -> &Scalar {
        &self.terms[i]
    }
}
