//! Exact scalars over ℚ and real quadratic fields ℚ(√D).
//!
//! Every coordinate in an exact-mode surface is an [`ExactReal`]. Values are
//! kept in canonical form: both rational parts reduced with positive
//! denominators, the radicand square-free, and `D = 0` whenever the
//! irrational part vanishes. Canonical form makes structural equality agree
//! with numeric equality, so `==` and `Hash` can be derived.
//!
//! Sign and comparison never consult floating point. A value `a + b√D` with
//! `a` and `b` of opposite signs is resolved by comparing `a²` with `b²D`.

use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::fmt;
use core::ops::{Add, Div, Mul, Neg, Sub};
use core::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::Ratio;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Arbitrary-precision rational.
pub type Rational = Ratio<BigInt>;

/// The coordinate field of a value or surface.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Field {
    Rational,
    /// ℚ(√D) with `D > 1` square-free.
    Sqrt(u64),
}

impl Field {
    pub fn radicand(self) -> u64 {
        match self {
            Field::Rational => 0,
            Field::Sqrt(d) => d,
        }
    }

    /// The smallest field containing both, or an error for two distinct
    /// quadratic fields.
    pub fn join(self, other: Field) -> Result<Field, ArithError> {
        match (self, other) {
            (Field::Rational, f) | (f, Field::Rational) => Ok(f),
            (Field::Sqrt(a), Field::Sqrt(b)) if a == b => Ok(self),
            (Field::Sqrt(a), Field::Sqrt(b)) => Err(ArithError::MixedField { left: a, right: b }),
        }
    }

    pub fn contains(self, other: Field) -> bool {
        other == Field::Rational || other == self
    }
}

impl fmt::Display for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Field::Rational => f.write_str("rational"),
            Field::Sqrt(d) => write!(f, "sqrt({d})"),
        }
    }
}

/// Parses `rational` or `sqrt(D)` with `D > 1` square-free.
impl FromStr for Field {
    type Err = ArithError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = |reason: &'static str| ArithError::Parse { input: s.into(), reason: reason.into() };
        let t = s.trim();
        if t == "rational" {
            return Ok(Field::Rational);
        }
        let inner = t
            .strip_prefix("sqrt(")
            .and_then(|r| r.strip_suffix(')'))
            .ok_or_else(|| bad("expected `rational` or `sqrt(D)`"))?;
        let d: u64 = inner.trim().parse().map_err(|_| bad("radicand must be a positive integer"))?;
        if d < 2 || square_free_split(d).0 != 1 {
            return Err(bad("radicand must be square-free and greater than 1"));
        }
        Ok(Field::Sqrt(d))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ArithError {
    MixedField { left: u64, right: u64 },
    DivisionByZero,
    ZeroInput,
    EmptyInput,
    Parse { input: String, reason: &'static str },
}

impl fmt::Display for ArithError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ArithError::MixedField { left, right } => {
                write!(f, "values live in different fields: sqrt({left}) and sqrt({right})")
            }
            ArithError::DivisionByZero => f.write_str("division by zero"),
            ArithError::ZeroInput => f.write_str("zero input where a nonzero value is required"),
            ArithError::EmptyInput => f.write_str("empty input list"),
            ArithError::Parse { input, reason } => write!(f, "cannot parse scalar `{input}`: {reason}"),
        }
    }
}

impl core::error::Error for ArithError {}

/// `a + b·√D`, exact.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ExactReal {
    a: Rational,
    b: Rational,
    d: u64,
}

/// Splits `n` as `k²·m` with `m` square-free; returns `(k, m)`.
pub(crate) fn square_free_split(mut n: u64) -> (u64, u64) {
    let mut k = 1u64;
    let mut m = 1u64;
    let mut p = 2u64;
    while p.saturating_mul(p) <= n {
        let mut e = 0;
        while n % p == 0 {
            n /= p;
            e += 1;
        }
        for _ in 0..e / 2 {
            k *= p;
        }
        if e % 2 == 1 {
            m *= p;
        }
        p += if p == 2 { 1 } else { 2 };
    }
    (k, m * n)
}

fn rat_sign(r: &Rational) -> i8 {
    if r.is_zero() {
        0
    } else if r.is_negative() {
        -1
    } else {
        1
    }
}

fn rat_to_f64(r: &Rational) -> f64 {
    // `Ratio<BigInt>::to_f64` handles huge numerators/denominators gracefully.
    r.to_f64().unwrap_or(f64::NAN)
}

fn sqrt_rational(r: &Rational) -> Option<Rational> {
    if r.is_negative() {
        return None;
    }
    let n = r.numer().sqrt();
    let d = r.denom().sqrt();
    if &(&n * &n) == r.numer() && &(&d * &d) == r.denom() {
        Some(Rational::new(n, d))
    } else {
        None
    }
}

impl ExactReal {
    pub fn zero() -> Self {
        Self::from_rational(Rational::zero())
    }

    pub fn one() -> Self {
        Self::from_int(1)
    }

    pub fn from_int(n: i64) -> Self {
        Self::from_rational(Rational::from_integer(BigInt::from(n)))
    }

    pub fn from_ratio(num: i64, den: i64) -> Self {
        Self::from_rational(Rational::new(BigInt::from(num), BigInt::from(den)))
    }

    pub fn from_rational(a: Rational) -> Self {
        ExactReal { a, b: Rational::zero(), d: 0 }
    }

    /// `a + b√d` for any `d ≥ 0`; square factors of `d` are pulled into `b`.
    pub fn new(a: Rational, b: Rational, d: u64) -> Self {
        if d == 0 || b.is_zero() {
            return Self::from_rational(a);
        }
        let (k, m) = square_free_split(d);
        let b = b * Rational::from_integer(BigInt::from(k));
        if m == 1 {
            return Self::from_rational(a + b);
        }
        ExactReal { a, b, d: m }
    }

    /// `√d`.
    pub fn sqrt_of(d: u64) -> Self {
        Self::new(Rational::zero(), Rational::one(), d)
    }

    pub fn rational_part(&self) -> &Rational {
        &self.a
    }

    pub fn irrational_part(&self) -> &Rational {
        &self.b
    }

    pub fn radicand(&self) -> u64 {
        self.d
    }

    pub fn field(&self) -> Field {
        if self.d == 0 {
            Field::Rational
        } else {
            Field::Sqrt(self.d)
        }
    }

    pub fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }

    pub fn is_rational(&self) -> bool {
        self.d == 0
    }

    pub fn as_rational(&self) -> Option<&Rational> {
        self.is_rational().then_some(&self.a)
    }

    fn common_d(&self, other: &Self) -> Result<u64, ArithError> {
        Ok(self.field().join(other.field())?.radicand())
    }

    pub fn try_add(&self, other: &Self) -> Result<Self, ArithError> {
        let d = self.common_d(other)?;
        Ok(Self::new(&self.a + &other.a, &self.b + &other.b, d))
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self, ArithError> {
        let d = self.common_d(other)?;
        Ok(Self::new(&self.a - &other.a, &self.b - &other.b, d))
    }

    pub fn try_mul(&self, other: &Self) -> Result<Self, ArithError> {
        let d = self.common_d(other)?;
        let dd = Rational::from_integer(BigInt::from(d));
        let a = &self.a * &other.a + &self.b * &other.b * dd;
        let b = &self.a * &other.b + &self.b * &other.a;
        Ok(Self::new(a, b, d))
    }

    pub fn try_div(&self, other: &Self) -> Result<Self, ArithError> {
        let inv = other.try_recip()?;
        self.try_mul(&inv)
    }

    pub fn try_recip(&self) -> Result<Self, ArithError> {
        if self.is_zero() {
            return Err(ArithError::DivisionByZero);
        }
        if self.d == 0 {
            return Ok(Self::from_rational(self.a.recip()));
        }
        // 1/(a + b√D) = (a − b√D)/(a² − b²D); the norm is nonzero for D square-free.
        let n = self.norm();
        Ok(Self::new(&self.a / &n, -(&self.b / &n), self.d))
    }

    /// Galois conjugate `a − b√D`.
    pub fn conjugate(&self) -> Self {
        ExactReal { a: self.a.clone(), b: -self.b.clone(), d: self.d }
    }

    /// Field norm `a² − b²D`.
    pub fn norm(&self) -> Rational {
        let dd = Rational::from_integer(BigInt::from(self.d));
        &self.a * &self.a - &self.b * &self.b * dd
    }

    /// Exact sign: −1, 0 or 1.
    pub fn signum(&self) -> i8 {
        let sa = rat_sign(&self.a);
        let sb = rat_sign(&self.b);
        if sb == 0 {
            return sa;
        }
        if sa == 0 || sa == sb {
            return sb;
        }
        let dd = Rational::from_integer(BigInt::from(self.d));
        let a2 = &self.a * &self.a;
        let b2d = &self.b * &self.b * dd;
        if a2 > b2d {
            sa
        } else {
            sb
        }
    }

    pub fn is_positive(&self) -> bool {
        self.signum() > 0
    }

    pub fn is_negative(&self) -> bool {
        self.signum() < 0
    }

    pub fn abs(&self) -> Self {
        if self.is_negative() {
            -self
        } else {
            self.clone()
        }
    }

    pub fn square(&self) -> Self {
        self * self
    }

    /// Square root when it lies in ℚ or ℚ(√D') for the value's own field
    /// (for a rational input, any quadratic field may be chosen).
    pub fn sqrt_exact(&self) -> Option<Self> {
        match self.signum() {
            -1 => return None,
            0 => return Some(Self::zero()),
            _ => {}
        }
        if self.d == 0 {
            if let Some(r) = sqrt_rational(&self.a) {
                return Some(Self::from_rational(r));
            }
            // √(n/m) = √(n·m)/m
            let nm = self.a.numer() * self.a.denom();
            let nm = nm.to_u64()?;
            let (k, m) = square_free_split(nm);
            let coeff = Rational::new(BigInt::from(k), self.a.denom().clone());
            return Some(Self::new(Rational::zero(), coeff, m));
        }
        // (x + y√D)² = a + b√D  ⇒  x² + D y² = a, 2xy = b.
        let disc = sqrt_rational(&self.norm())?;
        let two = Rational::from_integer(BigInt::from(2));
        let dd = Rational::from_integer(BigInt::from(self.d));
        for cand in [(&self.a + &disc) / &two, (&self.a - &disc) / &two] {
            if let Some(x) = sqrt_rational(&cand) {
                if x.is_zero() {
                    continue;
                }
                let y = &self.b / (&two * &x);
                let r = Self::new(x.clone(), y.clone(), self.d);
                if &r.a * &r.a + &r.b * &r.b * &dd == self.a && r.is_positive() {
                    return Some(r);
                }
                let r = -r;
                if r.is_positive() {
                    return Some(r);
                }
            }
        }
        // y√D alone: a = D y², b = 0 handled above; remaining case x = 0.
        if self.b.is_zero() {
            let y = sqrt_rational(&(&self.a / &dd))?;
            return Some(Self::new(Rational::zero(), y, self.d));
        }
        None
    }

    /// Floating approximation, avoiding cancellation when `a` and `b√D`
    /// have opposite signs.
    pub fn to_f64(&self) -> f64 {
        if self.d == 0 {
            return rat_to_f64(&self.a);
        }
        let s = libm::sqrt(self.d as f64);
        let fa = rat_to_f64(&self.a);
        let fb = rat_to_f64(&self.b);
        if rat_sign(&self.a) * rat_sign(&self.b) >= 0 {
            fa + fb * s
        } else {
            rat_to_f64(&self.norm()) / (fa - fb * s)
        }
    }

    /// Parses an integer or finite decimal literal (`-3`, `2/7`, `1.25`).
    pub fn parse_rational(s: &str) -> Result<Rational, ArithError> {
        parse_rational(s)
    }

    pub fn floor_to_int(&self) -> BigInt {
        // exact floor via comparison with the float guess
        let guess = libm::floor(self.to_f64());
        let mut n = BigInt::from(guess as i64);
        loop {
            let nv = Self::from_rational(Rational::from_integer(n.clone()));
            if nv > *self {
                n -= 1;
                continue;
            }
            let next = Self::from_rational(Rational::from_integer(&n + 1));
            if next <= *self {
                n += 1;
                continue;
            }
            return n;
        }
    }
}

impl From<i64> for ExactReal {
    fn from(n: i64) -> Self {
        Self::from_int(n)
    }
}

impl From<Rational> for ExactReal {
    fn from(r: Rational) -> Self {
        Self::from_rational(r)
    }
}

macro_rules! forward_binop {
    ($tr:ident, $method:ident, $checked:ident) => {
        impl $tr<&ExactReal> for &ExactReal {
            type Output = ExactReal;
            fn $method(self, rhs: &ExactReal) -> ExactReal {
                self.$checked(rhs).expect("exact arithmetic on incompatible operands")
            }
        }
        impl $tr<ExactReal> for ExactReal {
            type Output = ExactReal;
            fn $method(self, rhs: ExactReal) -> ExactReal {
                (&self).$method(&rhs)
            }
        }
        impl $tr<&ExactReal> for ExactReal {
            type Output = ExactReal;
            fn $method(self, rhs: &ExactReal) -> ExactReal {
                (&self).$method(rhs)
            }
        }
        impl $tr<ExactReal> for &ExactReal {
            type Output = ExactReal;
            fn $method(self, rhs: ExactReal) -> ExactReal {
                self.$method(&rhs)
            }
        }
    };
}

// Operators panic on mixed fields and on division by zero, like integer
// division does. Surfaces check their field once at construction.
forward_binop!(Add, add, try_add);
forward_binop!(Sub, sub, try_sub);
forward_binop!(Mul, mul, try_mul);
forward_binop!(Div, div, try_div);

impl Neg for &ExactReal {
    type Output = ExactReal;
    fn neg(self) -> ExactReal {
        ExactReal { a: -self.a.clone(), b: -self.b.clone(), d: self.d }
    }
}

impl Neg for ExactReal {
    type Output = ExactReal;
    fn neg(self) -> ExactReal {
        -&self
    }
}

impl Zero for ExactReal {
    fn zero() -> Self {
        ExactReal::zero()
    }
    fn is_zero(&self) -> bool {
        ExactReal::is_zero(self)
    }
}

/// Sign of `x + z√e` where `x` lies in some ℚ(√D) and `z` is rational.
fn sign_with_extra_root(x: &ExactReal, z: &Rational, e: u64) -> i8 {
    let sx = x.signum();
    let sz = rat_sign(z);
    if sz == 0 {
        return sx;
    }
    if sx == 0 || sx == sz {
        return sz;
    }
    let ee = Rational::from_integer(BigInt::from(e));
    let z2 = ExactReal::from_rational(z * z * ee);
    let diff = &x.square() - &z2;
    if diff.signum() > 0 {
        sx
    } else {
        sz
    }
}

impl Ord for ExactReal {
    fn cmp(&self, other: &Self) -> Ordering {
        let s = match self.try_sub(other) {
            Ok(diff) => diff.signum(),
            Err(_) => {
                // (a1 − a2 + b1√D1) − b2√D2 across two quadratic fields
                let x = ExactReal::new(&self.a - &other.a, self.b.clone(), self.d);
                sign_with_extra_root(&x, &-other.b.clone(), other.d)
            }
        };
        s.cmp(&0)
    }
}

impl PartialOrd for ExactReal {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

fn fmt_rational(r: &Rational, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    if r.denom().is_one() {
        write!(f, "{}", r.numer())
    } else {
        write!(f, "{}/{}", r.numer(), r.denom())
    }
}

/// Canonical text form: `p`, `p/q`, `a+b*sqrt(D)` or `a-b*sqrt(D)`.
impl fmt::Display for ExactReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt_rational(&self.a, f)?;
        if self.d != 0 {
            if self.b.is_negative() {
                f.write_str("-")?;
                fmt_rational(&-self.b.clone(), f)?;
            } else {
                f.write_str("+")?;
                fmt_rational(&self.b, f)?;
            }
            write!(f, "*sqrt({})", self.d)?;
        }
        Ok(())
    }
}

fn perr(input: &str, reason: &'static str) -> ArithError {
    ArithError::Parse { input: input.to_string(), reason }
}

fn parse_bigint(s: &str, whole: &str) -> Result<BigInt, ArithError> {
    let digits = s.strip_prefix('-').unwrap_or(s);
    if digits.is_empty() || !digits.bytes().all(|c| c.is_ascii_digit()) {
        return Err(perr(whole, "expected an integer"));
    }
    BigInt::parse_bytes(s.as_bytes(), 10).ok_or_else(|| perr(whole, "expected an integer"))
}

fn parse_rational(s: &str) -> Result<Rational, ArithError> {
    let s = s.trim();
    if let Some((n, d)) = s.split_once('/') {
        let n = parse_bigint(n, s)?;
        let d = parse_bigint(d, s)?;
        if d.is_zero() {
            return Err(perr(s, "zero denominator"));
        }
        return Ok(Rational::new(n, d));
    }
    if let Some((ip, fp)) = s.split_once('.') {
        if fp.is_empty() || !fp.bytes().all(|c| c.is_ascii_digit()) {
            return Err(perr(s, "malformed decimal"));
        }
        let neg = ip.starts_with('-');
        let ip_digits = ip.strip_prefix('-').unwrap_or(ip);
        let ip_val = if ip_digits.is_empty() { BigInt::zero() } else { parse_bigint(ip_digits, s)? };
        let scale = num_traits::pow(BigInt::from(10), fp.len());
        let frac = parse_bigint(fp, s)?;
        let mag = Rational::new(ip_val * &scale + frac, scale);
        return Ok(if neg { -mag } else { mag });
    }
    Ok(Rational::from_integer(parse_bigint(s, s)?))
}

impl FromStr for ExactReal {
    type Err = ArithError;

    fn from_str(input: &str) -> Result<Self, ArithError> {
        let s = input.trim();
        if s.is_empty() {
            return Err(perr(input, "empty"));
        }
        let Some(pos) = s.find("sqrt(") else {
            return Ok(ExactReal::from_rational(parse_rational(s)?));
        };
        let tail = &s[pos + 5..];
        let radicand = tail.strip_suffix(')').ok_or_else(|| perr(input, "missing `)`"))?;
        if !radicand.bytes().all(|c| c.is_ascii_digit()) || radicand.is_empty() {
            return Err(perr(input, "radicand must be a nonnegative integer"));
        }
        let d: u64 = radicand.parse().map_err(|_| perr(input, "radicand out of range"))?;
        let head = &s[..pos];
        let head = head.strip_suffix('*').unwrap_or(head);
        // split `a±b` at the last sign that is not leading
        let split = head
            .char_indices()
            .rev()
            .find(|&(i, c)| i > 0 && (c == '+' || c == '-'))
            .map(|(i, _)| i);
        let (a, coeff) = match split {
            Some(i) => (parse_rational(&head[..i])?, &head[i..]),
            None => (Rational::zero(), head),
        };
        let coeff = coeff.strip_prefix('+').unwrap_or(coeff);
        let b = match coeff {
            "" => Rational::one(),
            "-" => -Rational::one(),
            c => parse_rational(c)?,
        };
        Ok(ExactReal::new(a, b, d))
    }
}

#[cfg(feature = "serde")]
impl serde::Serialize for ExactReal {
    fn serialize<S: serde::Serializer>(&self, ser: S) -> Result<S::Ok, S::Error> {
        ser.collect_str(self)
    }
}

#[cfg(feature = "serde")]
impl<'de> serde::Deserialize<'de> for ExactReal {
    fn deserialize<D: serde::Deserializer<'de>>(de: D) -> Result<Self, D::Error> {
        let s = <String as serde::Deserialize>::deserialize(de)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

pub fn exact_add(x: &ExactReal, y: &ExactReal) -> Result<ExactReal, ArithError> {
    x.try_add(y)
}

pub fn exact_mul(x: &ExactReal, y: &ExactReal) -> Result<ExactReal, ArithError> {
    x.try_mul(y)
}

pub fn exact_div(x: &ExactReal, y: &ExactReal) -> Result<ExactReal, ArithError> {
    x.try_div(y)
}

/// Dimension of the ℚ-span of a list of scalars, with the relations that
/// witness every dependency.
#[derive(Clone, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct QSpanReport {
    pub dimension: usize,
    /// Indices of a greedy basis, in input order.
    pub basis_indices: Vec<usize>,
    /// One vector per dependent input `j`: coefficients on the basis
    /// entries and `−1` at `j`, summing the inputs to zero.
    #[cfg_attr(feature = "serde", serde(with = "rational_rows"))]
    pub relations: Vec<Vec<Rational>>,
}

/// Rationals as `n/d` strings.
#[cfg(feature = "serde")]
mod rational_rows {
    use super::{ExactReal, Rational};
    use alloc::string::{String, ToString};
    use alloc::vec::Vec;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(rows: &[Vec<Rational>], s: S) -> Result<S::Ok, S::Error> {
        let text: Vec<Vec<String>> = rows.iter().map(|r| r.iter().map(|x| x.to_string()).collect()).collect();
        text.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Vec<Rational>>, D::Error> {
        let text: Vec<Vec<String>> = Vec::deserialize(d)?;
        text.iter()
            .map(|r| r.iter().map(|x| ExactReal::parse_rational(x).map_err(serde::de::Error::custom)).collect())
            .collect()
    }
}

fn list_field(values: &[ExactReal]) -> Result<Field, ArithError> {
    values.iter().try_fold(Field::Rational, |f, v| f.join(v.field()))
}

/// ℚ-dimension of the span of `values`. Inside one quadratic field every
/// value is a vector `(a, b)` in ℚ², so the dimension is at most 2.
pub fn qspan_dim(values: &[ExactReal]) -> Result<QSpanReport, ArithError> {
    if values.is_empty() {
        return Err(ArithError::EmptyInput);
    }
    list_field(values)?;
    let n = values.len();
    let mut basis: Vec<usize> = Vec::new();
    let mut relations = Vec::new();
    for (j, v) in values.iter().enumerate() {
        let mut rel = vec![Rational::zero(); n];
        let dependent = match basis.as_slice() {
            [] => {
                if v.is_zero() {
                    rel[j] = -Rational::one();
                    true
                } else {
                    false
                }
            }
            [u] => {
                let u = &values[*u];
                let det = &v.a * &u.b - &u.a * &v.b;
                if det.is_zero() {
                    let lambda = if !u.a.is_zero() { &v.a / &u.a } else { &v.b / &u.b };
                    rel[basis[0]] = lambda;
                    rel[j] = -Rational::one();
                    true
                } else {
                    false
                }
            }
            [i0, i1] => {
                let (u, w) = (&values[*i0], &values[*i1]);
                // v = α u + β w, solved by Cramer's rule in ℚ².
                let det = &u.a * &w.b - &w.a * &u.b;
                let alpha = (&v.a * &w.b - &w.a * &v.b) / &det;
                let beta = (&u.a * &v.b - &v.a * &u.b) / &det;
                rel[*i0] = alpha;
                rel[*i1] = beta;
                rel[j] = -Rational::one();
                true
            }
            _ => unreachable!("a quadratic field is two-dimensional over ℚ"),
        };
        if dependent {
            relations.push(rel);
        } else {
            basis.push(j);
        }
    }
    Ok(QSpanReport { dimension: basis.len(), basis_indices: basis, relations })
}

/// `Some(x/y)` when the ratio is rational.
pub fn commensurable(x: &ExactReal, y: &ExactReal) -> Result<Option<Rational>, ArithError> {
    if x.is_zero() || y.is_zero() {
        return Err(ArithError::ZeroInput);
    }
    let q = x.try_div(y)?;
    Ok(q.as_rational().cloned())
}

/// Least common multiple of a list of positive integers.
pub(crate) fn lcm_all<'a>(it: impl IntoIterator<Item = &'a BigInt>) -> BigInt {
    it.into_iter().fold(BigInt::one(), |acc, x| acc.lcm(x))
}


#[cfg(test)]
mod tests {
    use super::*;
    use alloc::format;

    fn q(s: &str) -> ExactReal {
        s.parse().unwrap()
    }

    fn phi() -> ExactReal {
        q("1/2+1/2*sqrt(5)")
    }

    #[test]
    fn norm_identity() {
        let x = q("1+1*sqrt(5)");
        let y = q("1-1*sqrt(5)");
        assert_eq!(&x * &y, ExactReal::from_int(-4));
        assert!((&x * &y).is_rational());
    }

    #[test]
    fn golden_ratio_square() {
        // (1/2 + √5/2)² = 1/4 + √5/2 + 5/4 = 3/2 + √5/2
        let p = phi();
        assert_eq!(p.square(), q("3/2+1/2*sqrt(5)"));
        assert_eq!(p.square(), &p + &ExactReal::one());
    }

    #[test]
    fn self_division_is_one() {
        for s in ["7/3", "1/2+1/2*sqrt(5)", "-2-3*sqrt(7)", "0+1*sqrt(2)"] {
            let x = q(s);
            assert_eq!(exact_div(&x, &x).unwrap(), ExactReal::one());
        }
    }

    #[test]
    fn errors() {
        assert_eq!(
            exact_add(&q("sqrt(2)"), &q("sqrt(3)")),
            Err(ArithError::MixedField { left: 2, right: 3 })
        );
        assert_eq!(exact_div(&q("1"), &ExactReal::zero()), Err(ArithError::DivisionByZero));
        assert!(exact_mul(&q("1/3"), &q("sqrt(3)")).is_ok());
        assert_eq!(commensurable(&q("0"), &q("1")), Err(ArithError::ZeroInput));
    }

    #[test]
    fn canonical_form() {
        assert_eq!(ExactReal::sqrt_of(8), q("0+2*sqrt(2)"));
        assert_eq!(ExactReal::sqrt_of(9), ExactReal::from_int(3));
        assert_eq!(q("2/4"), ExactReal::from_ratio(1, 2));
        let x = q("1+1*sqrt(2)") - q("0+1*sqrt(2)");
        assert!(x.is_rational());
        assert_eq!(x.field(), Field::Rational);
    }

    #[test]
    fn signs() {
        assert_eq!(q("1-1*sqrt(2)").signum(), -1);
        assert_eq!(q("-1+1*sqrt(2)").signum(), 1);
        assert_eq!(q("3-2*sqrt(2)").signum(), 1);
        assert_eq!(q("-3+2*sqrt(2)").signum(), -1);
        assert!(q("sqrt(2)") < q("3/2"));
        assert!(q("sqrt(2)") > q("7/5"));
        // across fields: √2 < √3, √3 + 0 vs 1 + √2/2
        assert!(q("sqrt(2)") < q("sqrt(3)"));
        assert!(q("1+1*sqrt(2)") > q("sqrt(5)"));
    }

    #[test]
    fn qspan_examples() {
        let r = qspan_dim(&[q("1/2"), q("1")]).unwrap();
        assert_eq!(r.dimension, 1);
        let r = qspan_dim(&[q("1"), q("sqrt(2)")]).unwrap();
        assert_eq!(r.dimension, 2);
        assert!(r.relations.is_empty());
        let p = phi();
        let r = qspan_dim(&[q("1"), p.clone(), p.square()]).unwrap();
        assert_eq!(r.dimension, 2);
        assert_eq!(r.basis_indices, vec![0, 1]);
        let one = Rational::one();
        assert_eq!(r.relations, vec![vec![one.clone(), one.clone(), -one]]);
        assert!(matches!(qspan_dim(&[q("sqrt(2)"), q("sqrt(3)")]), Err(ArithError::MixedField { .. })));
        assert_eq!(qspan_dim(&[]), Err(ArithError::EmptyInput));
    }

    #[test]
    fn commensurable_examples() {
        assert_eq!(
            commensurable(&q("1/2"), &q("1")).unwrap(),
            Some(Rational::new(1.into(), 2.into()))
        );
        assert_eq!(commensurable(&phi(), &phi()).unwrap(), Some(Rational::one()));
        assert_eq!(commensurable(&q("1"), &q("sqrt(2)")).unwrap(), None);
    }

    #[test]
    fn grammar_round_trip() {
        for s in ["0", "-7", "3/4", "-1/2+1/2*sqrt(5)", "0-1*sqrt(2)", "2+3/7*sqrt(11)"] {
            assert_eq!(format!("{}", q(s)), s);
        }
        assert_eq!(q("sqrt(5)"), q("0+1*sqrt(5)"));
        assert_eq!(q("-sqrt(2)"), q("0-1*sqrt(2)"));
        assert_eq!(q("1/2*sqrt(5)"), q("0+1/2*sqrt(5)"));
        assert_eq!(q("1.25"), q("5/4"));
        assert_eq!(q("-0.5"), q("-1/2"));
        for bad in ["", "abc", "1/0", "1+sqrt(x)", "1+2*sqrt(3", "1..2"] {
            assert!(bad.parse::<ExactReal>().is_err(), "{bad}");
        }
    }

    #[test]
    fn sqrt_exact_cases() {
        assert_eq!(q("9/4").sqrt_exact(), Some(q("3/2")));
        assert_eq!(q("5").sqrt_exact(), Some(q("sqrt(5)")));
        assert_eq!(q("1/2").sqrt_exact(), Some(q("0+1/2*sqrt(2)")));
        assert_eq!(q("3+2*sqrt(2)").sqrt_exact(), Some(q("1+1*sqrt(2)")));
        assert_eq!(phi().square().sqrt_exact(), Some(phi()));
        assert_eq!(q("1+1*sqrt(2)").sqrt_exact(), None);
        assert_eq!(q("-1").sqrt_exact(), None);
    }

    #[test]
    fn float_conversion_without_cancellation() {
        // φ⁻²⁰ = (a − b√5) with large a, b
        let mut x = ExactReal::one();
        let inv = phi().try_recip().unwrap();
        for _ in 0..20 {
            x = &x * &inv;
        }
        let expect = libm::pow(1.618033988749895f64, -20.0);
        assert!((x.to_f64() - expect).abs() / expect < 1e-12);
    }

    #[test]
    fn floor() {
        assert_eq!(q("7/2").floor_to_int(), BigInt::from(3));
        assert_eq!(q("-7/2").floor_to_int(), BigInt::from(-4));
        assert_eq!(q("0+1*sqrt(2)").floor_to_int(), BigInt::from(1));
        assert_eq!(q("3").floor_to_int(), BigInt::from(3));
    }
}
