//! Scalars of the max-times semiring.
//!
//! Every algorithm in the crate is written against [`Scalar`], whose
//! semantics are always max-times: `⊕` is the maximum, `⊗` is the product,
//! the zero is `0` and the unit is `1`. Four carriers implement it:
//!
//! | carrier                | domain    | mode  | stored value      |
//! |------------------------|-----------|-------|-------------------|
//! | [`Rational`]           | max-times | exact | `a`               |
//! | `f64`                  | max-times | float | `a`               |
//! | [`MaxPlus<Rational>`]  | max-plus  | exact | `log a`           |
//! | [`MaxPlus<f64>`]       | max-plus  | float | `log a`           |
//!
//! The max-plus carriers keep exact arithmetic additive, so geometric means
//! (roots) are always representable there.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::Rng;
use serde_json::Value;

pub type Rational = BigRational;

/// Default relative tolerance of float mode.
pub const DEFAULT_TOLERANCE: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Domain {
    MaxTimes,
    MaxPlus,
}

impl Domain {
    pub fn name(self) -> &'static str {
        match self {
            Domain::MaxTimes => "maxtimes",
            Domain::MaxPlus => "maxplus",
        }
    }
}

/// A nonnegative element of the max-times semiring.
///
/// `PartialEq` is structural. Algorithms compare through [`Scalar::cmp_tol`],
/// which is exact for exact carriers and relative-tolerance based for floats.
pub trait Scalar: Clone + fmt::Debug + PartialEq + Send + Sync + 'static {
    const EXACT: bool;
    const DOMAIN: Domain;

    fn zero() -> Self;
    fn one() -> Self;
    fn is_zero(&self) -> bool;

    fn mul(&self, rhs: &Self) -> Self;
    /// `rhs` must be nonzero.
    fn div(&self, rhs: &Self) -> Self;
    fn pow(&self, k: u32) -> Self;
    /// The `k`-th root, when the carrier can represent it.
    fn root(&self, k: u32) -> Option<Self>;
    /// Ordinary (non-tropical) sum, when the carrier can represent it.
    fn ordinary_add(&self, rhs: &Self) -> Option<Self>;

    fn cmp_tol(&self, rhs: &Self, tol: f64) -> Ordering;

    /// Compares the geometric means `w1^(1/l1)` and `w2^(1/l2)` without
    /// taking roots.
    fn cmp_mean(w1: &Self, l1: usize, w2: &Self, l2: usize, tol: f64) -> Ordering {
        let lhs = w1.pow(l2 as u32);
        let rhs = w2.pow(l1 as u32);
        lhs.cmp_tol(&rhs, tol)
    }

    /// Natural logarithm of the max-times value (`-inf` for zero).
    fn ln(&self) -> f64;
    fn is_valid(&self) -> bool;

    fn parse_token(token: &str) -> Result<Self, String>;
    fn to_token(&self) -> String;
    fn to_json(&self) -> Value;

    /// A random positive element, used for sampling scalings.
    fn random_positive<R: Rng + ?Sized>(rng: &mut R) -> Self;

    fn max_of(&self, rhs: &Self, tol: f64) -> Self {
        if rhs.cmp_tol(self, tol) == Ordering::Greater {
            rhs.clone()
        } else {
            self.clone()
        }
    }

    fn inv(&self) -> Self {
        Self::one().div(self)
    }
}

fn tol_eq(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * 1f64.max(a.abs()).max(b.abs())
}

fn cmp_f64_tol(a: f64, b: f64, tol: f64) -> Ordering {
    if a == b || tol_eq(a, b, tol) {
        Ordering::Equal
    } else if a < b {
        Ordering::Less
    } else {
        Ordering::Greater
    }
}

/// Parses `p/q`, integers and decimals (with optional exponent) exactly.
pub fn parse_rational(token: &str) -> Result<Rational, String> {
    let t = token.trim();
    if t.is_empty() {
        return Err("empty token".into());
    }
    if let Some((p, q)) = t.split_once('/') {
        let p = BigInt::from_str(p.trim()).map_err(|_| format!("bad numerator in `{t}`"))?;
        let q = BigInt::from_str(q.trim()).map_err(|_| format!("bad denominator in `{t}`"))?;
        if q.is_zero() {
            return Err(format!("zero denominator in `{t}`"));
        }
        return Ok(Rational::new(p, q));
    }
    let (mantissa, exponent) = match t.find(['e', 'E']) {
        Some(pos) => {
            let e = t[pos + 1..]
                .parse::<i32>()
                .map_err(|_| format!("bad exponent in `{t}`"))?;
            (&t[..pos], e)
        }
        None => (t, 0),
    };
    let (negative, digits) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = digits.split_once('.').unwrap_or((digits, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(format!("not a number: `{t}`"));
    }
    if !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit()) {
        return Err(format!("not a number: `{t}`"));
    }
    let all_digits = format!("{int_part}{frac_part}");
    let mut num = BigInt::from_str(if all_digits.is_empty() { "0" } else { &all_digits })
        .map_err(|_| format!("not a number: `{t}`"))?;
    if negative {
        num = -num;
    }
    let scale = exponent - frac_part.len() as i32;
    let ten = BigInt::from(10u32);
    let value = if scale >= 0 {
        Rational::from_integer(num * num_traits::pow(ten, scale as usize))
    } else {
        Rational::new(num, num_traits::pow(ten, (-scale) as usize))
    };
    Ok(value)
}

pub fn rational_token(r: &Rational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

pub fn rational_pow(r: &Rational, k: u32) -> Rational {
    Rational::new_raw(
        num_traits::pow(r.numer().clone(), k as usize),
        num_traits::pow(r.denom().clone(), k as usize),
    )
}

fn exact_int_root(n: &BigInt, k: u32) -> Option<BigInt> {
    if n.is_negative() {
        return None;
    }
    let r = n.nth_root(k);
    (num_traits::pow(r.clone(), k as usize) == *n).then_some(r)
}

/// Exact `k`-th root of a nonnegative rational, if it is rational.
pub fn rational_root(r: &Rational, k: u32) -> Option<Rational> {
    if k == 0 {
        return None;
    }
    if k == 1 {
        return Some(r.clone());
    }
    let p = exact_int_root(r.numer(), k)?;
    let q = exact_int_root(r.denom(), k)?;
    Some(Rational::new(p, q))
}

pub fn rational_ln(r: &Rational) -> f64 {
    if Zero::is_zero(r) {
        return f64::NEG_INFINITY;
    }
    // Split off powers of two so huge numerators/denominators stay in range.
    let (n, nb) = scaled_bits(r.numer());
    let (d, db) = scaled_bits(r.denom());
    n.ln() - d.ln() + (nb as f64 - db as f64) * std::f64::consts::LN_2
}

fn scaled_bits(x: &BigInt) -> (f64, i64) {
    let bits = x.bits() as i64;
    if bits <= 1000 {
        return (x.to_f64().unwrap_or(f64::NAN).abs(), 0);
    }
    let shift = bits - 64;
    let top: BigInt = x.abs() >> (shift as usize);
    (top.to_f64().unwrap_or(f64::NAN), shift)
}

impl Scalar for Rational {
    const EXACT: bool = true;
    const DOMAIN: Domain = Domain::MaxTimes;

    fn zero() -> Self {
        Zero::zero()
    }
    fn one() -> Self {
        One::one()
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn mul(&self, rhs: &Self) -> Self {
        self * rhs
    }
    fn div(&self, rhs: &Self) -> Self {
        self / rhs
    }
    fn pow(&self, k: u32) -> Self {
        rational_pow(self, k)
    }
    fn root(&self, k: u32) -> Option<Self> {
        rational_root(self, k)
    }
    fn ordinary_add(&self, rhs: &Self) -> Option<Self> {
        Some(self + rhs)
    }
    fn cmp_tol(&self, rhs: &Self, _tol: f64) -> Ordering {
        self.cmp(rhs)
    }
    fn ln(&self) -> f64 {
        rational_ln(self)
    }
    fn is_valid(&self) -> bool {
        !self.is_negative()
    }
    fn parse_token(token: &str) -> Result<Self, String> {
        if token == "." {
            return Ok(Zero::zero());
        }
        let r = parse_rational(token)?;
        if r.is_negative() {
            return Err(format!("negative entry `{token}` in max-times domain"));
        }
        Ok(r)
    }
    fn to_token(&self) -> String {
        if Zero::is_zero(self) {
            ".".into()
        } else {
            rational_token(self)
        }
    }
    fn to_json(&self) -> Value {
        Value::String(rational_token(self))
    }
    fn random_positive<R: Rng + ?Sized>(rng: &mut R) -> Self {
        Rational::new(
            BigInt::from(rng.gen_range(1..=32u32)),
            BigInt::from(8u32),
        )
    }
}

impl Scalar for f64 {
    const EXACT: bool = false;
    const DOMAIN: Domain = Domain::MaxTimes;

    fn zero() -> Self {
        0.0
    }
    fn one() -> Self {
        1.0
    }
    fn is_zero(&self) -> bool {
        *self == 0.0
    }
    fn mul(&self, rhs: &Self) -> Self {
        self * rhs
    }
    fn div(&self, rhs: &Self) -> Self {
        self / rhs
    }
    fn pow(&self, k: u32) -> Self {
        self.powi(k as i32)
    }
    fn root(&self, k: u32) -> Option<Self> {
        (k > 0).then(|| self.powf(1.0 / k as f64))
    }
    fn ordinary_add(&self, rhs: &Self) -> Option<Self> {
        Some(self + rhs)
    }
    fn cmp_tol(&self, rhs: &Self, tol: f64) -> Ordering {
        // The semiring zero is only ever equal to itself.
        match (*self == 0.0, *rhs == 0.0) {
            (true, true) => Ordering::Equal,
            (true, false) => Ordering::Less,
            (false, true) => Ordering::Greater,
            _ => cmp_f64_tol(*self, *rhs, tol),
        }
    }
    fn cmp_mean(w1: &Self, l1: usize, w2: &Self, l2: usize, tol: f64) -> Ordering {
        match (*w1 == 0.0, *w2 == 0.0) {
            (true, true) => Ordering::Equal,
            (true, false) => Ordering::Less,
            (false, true) => Ordering::Greater,
            _ => {
                let a = (w1.ln() / l1 as f64).exp();
                let b = (w2.ln() / l2 as f64).exp();
                cmp_f64_tol(a, b, tol)
            }
        }
    }
    fn ln(&self) -> f64 {
        f64::ln(*self)
    }
    fn is_valid(&self) -> bool {
        self.is_finite() && *self >= 0.0
    }
    fn parse_token(token: &str) -> Result<Self, String> {
        if token == "." {
            return Ok(0.0);
        }
        let v = if token.contains('/') {
            ToPrimitive::to_f64(&parse_rational(token)?)
                .ok_or_else(|| format!("cannot represent `{token}`"))?
        } else {
            token
                .parse::<f64>()
                .map_err(|_| format!("not a number: `{token}`"))?
        };
        if v.is_nan() {
            return Err(format!("NaN entry `{token}`"));
        }
        if !v.is_finite() || v < 0.0 {
            return Err(format!("entry `{token}` is not a finite nonnegative number"));
        }
        Ok(v)
    }
    fn to_token(&self) -> String {
        if *self == 0.0 {
            ".".into()
        } else {
            format!("{self}")
        }
    }
    fn to_json(&self) -> Value {
        serde_json::Number::from_f64(*self)
            .map(Value::Number)
            .unwrap_or(Value::Null)
    }
    fn random_positive<R: Rng + ?Sized>(rng: &mut R) -> Self {
        rng.gen_range(0.125..4.0)
    }
}

/// Values that can serve as exponents (logarithms) in the max-plus carrier.
pub trait LogValue: Clone + fmt::Debug + PartialEq + Send + Sync + 'static {
    const EXACT: bool;
    fn origin() -> Self;
    fn add(&self, rhs: &Self) -> Self;
    fn sub(&self, rhs: &Self) -> Self;
    fn mul_int(&self, k: u32) -> Self;
    fn div_int(&self, k: u32) -> Self;
    fn cmp_log(&self, rhs: &Self, tol: f64) -> Ordering;
    fn as_f64(&self) -> f64;
    fn parse(token: &str) -> Result<Self, String>;
    fn token(&self) -> String;
    fn json(&self) -> Value;
    fn random<R: Rng + ?Sized>(rng: &mut R) -> Self;
}

impl LogValue for Rational {
    const EXACT: bool = true;
    fn origin() -> Self {
        Zero::zero()
    }
    fn add(&self, rhs: &Self) -> Self {
        self + rhs
    }
    fn sub(&self, rhs: &Self) -> Self {
        self - rhs
    }
    fn mul_int(&self, k: u32) -> Self {
        self * Rational::from_integer(BigInt::from(k))
    }
    fn div_int(&self, k: u32) -> Self {
        self / Rational::from_integer(BigInt::from(k))
    }
    fn cmp_log(&self, rhs: &Self, _tol: f64) -> Ordering {
        self.cmp(rhs)
    }
    fn as_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }
    fn parse(token: &str) -> Result<Self, String> {
        parse_rational(token)
    }
    fn token(&self) -> String {
        rational_token(self)
    }
    fn json(&self) -> Value {
        Value::String(rational_token(self))
    }
    fn random<R: Rng + ?Sized>(rng: &mut R) -> Self {
        Rational::new(BigInt::from(rng.gen_range(-16..=16i32)), BigInt::from(4u32))
    }
}

impl LogValue for f64 {
    const EXACT: bool = false;
    fn origin() -> Self {
        0.0
    }
    fn add(&self, rhs: &Self) -> Self {
        self + rhs
    }
    fn sub(&self, rhs: &Self) -> Self {
        self - rhs
    }
    fn mul_int(&self, k: u32) -> Self {
        self * k as f64
    }
    fn div_int(&self, k: u32) -> Self {
        self / k as f64
    }
    fn cmp_log(&self, rhs: &Self, tol: f64) -> Ordering {
        cmp_f64_tol(*self, *rhs, tol)
    }
    fn as_f64(&self) -> f64 {
        *self
    }
    fn parse(token: &str) -> Result<Self, String> {
        let v = if token.contains('/') {
            ToPrimitive::to_f64(&parse_rational(token)?)
                .ok_or_else(|| format!("cannot represent `{token}`"))?
        } else {
            token
                .parse::<f64>()
                .map_err(|_| format!("not a number: `{token}`"))?
        };
        if !v.is_finite() {
            return Err(format!("entry `{token}` is not finite"));
        }
        Ok(v)
    }
    fn token(&self) -> String {
        format!("{self}")
    }
    fn json(&self) -> Value {
        serde_json::Number::from_f64(*self)
            .map(Value::Number)
            .unwrap_or(Value::Null)
    }
    fn random<R: Rng + ?Sized>(rng: &mut R) -> Self {
        rng.gen_range(-4.0..4.0)
    }
}

/// A max-times value stored by its logarithm; `None` is the semiring zero
/// (`-inf` in max-plus notation).
#[derive(Clone, Debug, PartialEq)]
pub struct MaxPlus<T>(pub Option<T>);

impl<T: LogValue> MaxPlus<T> {
    pub fn finite(v: T) -> Self {
        MaxPlus(Some(v))
    }

    pub fn neg_inf() -> Self {
        MaxPlus(None)
    }

    pub fn log_value(&self) -> Option<&T> {
        self.0.as_ref()
    }
}

impl<T: LogValue> Scalar for MaxPlus<T> {
    const EXACT: bool = T::EXACT;
    const DOMAIN: Domain = Domain::MaxPlus;

    fn zero() -> Self {
        MaxPlus(None)
    }
    fn one() -> Self {
        MaxPlus(Some(T::origin()))
    }
    fn is_zero(&self) -> bool {
        self.0.is_none()
    }
    fn mul(&self, rhs: &Self) -> Self {
        match (&self.0, &rhs.0) {
            (Some(a), Some(b)) => MaxPlus(Some(a.add(b))),
            _ => MaxPlus(None),
        }
    }
    fn div(&self, rhs: &Self) -> Self {
        match (&self.0, &rhs.0) {
            (Some(a), Some(b)) => MaxPlus(Some(a.sub(b))),
            (None, _) => MaxPlus(None),
            (Some(_), None) => panic!("division by the semiring zero"),
        }
    }
    fn pow(&self, k: u32) -> Self {
        if k == 0 {
            return Self::one();
        }
        MaxPlus(self.0.as_ref().map(|a| a.mul_int(k)))
    }
    fn root(&self, k: u32) -> Option<Self> {
        (k > 0).then(|| MaxPlus(self.0.as_ref().map(|a| a.div_int(k))))
    }
    fn ordinary_add(&self, _rhs: &Self) -> Option<Self> {
        None
    }
    fn cmp_tol(&self, rhs: &Self, tol: f64) -> Ordering {
        match (&self.0, &rhs.0) {
            (None, None) => Ordering::Equal,
            (None, Some(_)) => Ordering::Less,
            (Some(_), None) => Ordering::Greater,
            (Some(a), Some(b)) => a.cmp_log(b, tol),
        }
    }
    fn cmp_mean(w1: &Self, l1: usize, w2: &Self, l2: usize, tol: f64) -> Ordering {
        w1.pow(l2 as u32).cmp_tol(&w2.pow(l1 as u32), tol)
    }
    fn ln(&self) -> f64 {
        self.0.as_ref().map_or(f64::NEG_INFINITY, |a| a.as_f64())
    }
    fn is_valid(&self) -> bool {
        self.0.as_ref().is_none_or(|a| a.as_f64().is_finite() || T::EXACT)
    }
    fn parse_token(token: &str) -> Result<Self, String> {
        if token == "-inf" {
            return Ok(MaxPlus(None));
        }
        T::parse(token).map(|v| MaxPlus(Some(v)))
    }
    fn to_token(&self) -> String {
        self.0.as_ref().map_or_else(|| "-inf".into(), |a| a.token())
    }
    fn to_json(&self) -> Value {
        self.0
            .as_ref()
            .map_or_else(|| Value::String("-inf".into()), |a| a.json())
    }
    fn random_positive<R: Rng + ?Sized>(rng: &mut R) -> Self {
        MaxPlus(Some(T::random(rng)))
    }
}

/// Converts a small integer ratio into an exact rational.
pub fn ratio(p: i64, q: i64) -> Rational {
    Rational::new(BigInt::from(p), BigInt::from(q))
}

/// Exponent `r` with `base^r = value`, when it is rational with a
/// denominator of at most `max_denominator`. Verified exactly.
pub fn rational_log(value: &Rational, base: &Rational, max_denominator: u32) -> Option<Rational> {
    if !value.is_positive() || !base.is_positive() || base.is_one() {
        return None;
    }
    if value.is_one() {
        return Some(Zero::zero());
    }
    let approx = rational_ln(value) / rational_ln(base);
    for q in 1..=max_denominator {
        let p = (approx * q as f64).round();
        if p.abs() > 1e6 {
            continue;
        }
        let p = p as i64;
        let lhs = rational_pow(value, q);
        let rhs = if p >= 0 {
            rational_pow(base, p as u32)
        } else {
            rational_pow(&base.recip(), (-p) as u32)
        };
        if lhs == rhs {
            return Some(ratio(p, q as i64));
        }
    }
    None
}

/// Greatest common divisor of machine integers.
pub fn gcd(a: usize, b: usize) -> usize {
    a.gcd(&b)
}

/// Least common multiple of machine integers.
pub fn lcm(a: usize, b: usize) -> usize {
    a.lcm(&b)
}
