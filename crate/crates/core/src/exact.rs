//! Exact rationals, intervals with rational endpoints, and outward-rounded
//! enclosures of exp, sqrt, arctan and pi.
//!
//! Every endpoint is an exact rational. Transcendental enclosures come from
//! truncated series with explicit rational remainder bounds, rounded outward
//! to a dyadic grid whose resolution grows with the precision parameter.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

pub type Rational = BigRational;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ArithError {
    #[error("division by zero-straddling interval {0}")]
    ZeroStraddle(String),
    #[error("interval endpoints out of order: {lo} > {hi}")]
    Inverted { lo: String, hi: String },
    #[error("square root of interval with negative lower endpoint {0}")]
    NegativeSqrt(String),
    #[error("malformed rational {0:?}")]
    Parse(String),
    #[error("precision parameter must be positive")]
    ZeroPrecision,
}

pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// `10^-k` as an exact rational.
pub fn ten_pow_neg(k: u32) -> Rational {
    Rational::new(BigInt::one(), BigInt::from(10u32).pow(k))
}

/// Canonical "p/q" text; the slash is always present so the form is unambiguous.
pub fn fmt_rational(r: &Rational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

/// Accepts "p/q", an integer "p", or a plain decimal such as "-0.03" or "2e-5".
pub fn parse_rational(s: &str) -> Result<Rational, ArithError> {
    let s = s.trim();
    let bad = || ArithError::Parse(s.to_string());
    if let Some((p, q)) = s.split_once('/') {
        let p = BigInt::from_str(p.trim()).map_err(|_| bad())?;
        let q = BigInt::from_str(q.trim()).map_err(|_| bad())?;
        if q.is_zero() {
            return Err(bad());
        }
        return Ok(Rational::new(p, q));
    }
    let (mant, exp) = match s.split_once(['e', 'E']) {
        Some((m, e)) => (m, e.parse::<i32>().map_err(|_| bad())?),
        None => (s, 0),
    };
    let (neg, mant) = match mant.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mant.strip_prefix('+').unwrap_or(mant)),
    };
    let (ip, fp) = mant.split_once('.').unwrap_or((mant, ""));
    if ip.is_empty() && fp.is_empty() {
        return Err(bad());
    }
    if !ip.chars().chain(fp.chars()).all(|c| c.is_ascii_digit()) {
        return Err(bad());
    }
    let digits = format!("{ip}{fp}");
    let mut v = Rational::from_integer(BigInt::from_str(&digits).map_err(|_| bad())?);
    let shift = exp - fp.len() as i32;
    let ten = Rational::from_integer(BigInt::from(10));
    if shift >= 0 {
        v *= num_traits::pow(ten, shift as usize);
    } else {
        v /= num_traits::pow(ten, (-shift) as usize);
    }
    Ok(if neg { -v } else { v })
}

/// Serde adapter storing a rational as its "p/q" string.
pub mod rat_serde {
    use super::*;

    pub fn serialize<S: Serializer>(r: &Rational, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&fmt_rational(r))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Rational, D::Error> {
        let s = String::deserialize(d)?;
        parse_rational(&s).map_err(serde::de::Error::custom)
    }
}

pub mod rat_vec_serde {
    use super::*;

    pub fn serialize<S: Serializer>(v: &[Rational], s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(v.iter().map(fmt_rational))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Rational>, D::Error> {
        let v = Vec::<String>::deserialize(d)?;
        v.iter()
            .map(|s| parse_rational(s).map_err(serde::de::Error::custom))
            .collect()
    }
}

pub fn floor_dyadic(v: &Rational, bits: u32) -> Rational {
    let scale = BigInt::one() << bits;
    Rational::new((v * Rational::from_integer(scale.clone())).floor().to_integer(), scale)
}

pub fn ceil_dyadic(v: &Rational, bits: u32) -> Rational {
    let scale = BigInt::one() << bits;
    Rational::new((v * Rational::from_integer(scale.clone())).ceil().to_integer(), scale)
}

/// Closed interval `[lo, hi]` with exact rational endpoints.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Interval {
    lo: Rational,
    hi: Rational,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum IvOp {
    Add,
    Sub,
    Mul,
    Div,
}

impl Interval {
    pub fn new(lo: Rational, hi: Rational) -> Result<Self, ArithError> {
        if lo > hi {
            return Err(ArithError::Inverted { lo: fmt_rational(&lo), hi: fmt_rational(&hi) });
        }
        Ok(Interval { lo, hi })
    }

    /// Builds `[min(a,b), max(a,b)]`.
    pub fn spanning(a: Rational, b: Rational) -> Self {
        if a <= b {
            Interval { lo: a, hi: b }
        } else {
            Interval { lo: b, hi: a }
        }
    }

    pub fn point(a: Rational) -> Self {
        Interval { lo: a.clone(), hi: a }
    }

    pub fn from_ints(lo: i64, hi: i64) -> Self {
        Interval::spanning(int(lo), int(hi))
    }

    pub fn zero() -> Self {
        Interval::point(Rational::zero())
    }

    pub fn lo(&self) -> &Rational {
        &self.lo
    }

    pub fn hi(&self) -> &Rational {
        &self.hi
    }

    pub fn width(&self) -> Rational {
        &self.hi - &self.lo
    }

    pub fn mid(&self) -> Rational {
        (&self.lo + &self.hi) / int(2)
    }

    pub fn is_point(&self) -> bool {
        self.lo == self.hi
    }

    pub fn contains(&self, x: &Rational) -> bool {
        &self.lo <= x && x <= &self.hi
    }

    pub fn contains_zero(&self) -> bool {
        !self.lo.is_positive() && !self.hi.is_negative()
    }

    pub fn subset_of(&self, other: &Interval) -> bool {
        other.lo <= self.lo && self.hi <= other.hi
    }

    pub fn hull(&self, other: &Interval) -> Interval {
        Interval {
            lo: self.lo.clone().min(other.lo.clone()),
            hi: self.hi.clone().max(other.hi.clone()),
        }
    }

    /// Largest absolute value over the interval.
    pub fn mag(&self) -> Rational {
        self.lo.abs().max(self.hi.abs())
    }

    pub fn neg(&self) -> Interval {
        Interval { lo: -&self.hi, hi: -&self.lo }
    }

    pub fn add(&self, o: &Interval) -> Interval {
        Interval { lo: &self.lo + &o.lo, hi: &self.hi + &o.hi }
    }

    pub fn sub(&self, o: &Interval) -> Interval {
        Interval { lo: &self.lo - &o.hi, hi: &self.hi - &o.lo }
    }

    pub fn mul(&self, o: &Interval) -> Interval {
        if !self.lo.is_negative() && !o.lo.is_negative() {
            return Interval { lo: &self.lo * &o.lo, hi: &self.hi * &o.hi };
        }
        let p = [&self.lo * &o.lo, &self.lo * &o.hi, &self.hi * &o.lo, &self.hi * &o.hi];
        let lo = p.iter().min().unwrap().clone();
        let hi = p.iter().max().unwrap().clone();
        Interval { lo, hi }
    }

    pub fn scale(&self, c: &Rational) -> Interval {
        Interval::spanning(&self.lo * c, &self.hi * c)
    }

    pub fn recip(&self) -> Result<Interval, ArithError> {
        if self.contains_zero() {
            return Err(ArithError::ZeroStraddle(self.to_string()));
        }
        Ok(Interval { lo: self.hi.recip(), hi: self.lo.recip() })
    }

    pub fn div(&self, o: &Interval) -> Result<Interval, ArithError> {
        Ok(self.mul(&o.recip()?))
    }

    /// Tight square (the plain product overestimates when 0 is interior).
    pub fn square(&self) -> Interval {
        if self.contains_zero() {
            Interval { lo: Rational::zero(), hi: self.mag() * self.mag() }
        } else {
            let (a, b) = (&self.lo * &self.lo, &self.hi * &self.hi);
            Interval::spanning(a, b)
        }
    }

    pub fn abs(&self) -> Interval {
        if self.contains_zero() {
            Interval { lo: Rational::zero(), hi: self.mag() }
        } else if self.lo.is_positive() {
            self.clone()
        } else {
            self.neg()
        }
    }

    /// Rounds endpoints outward to the grid `2^-bits`.
    pub fn round_out(&self, bits: u32) -> Interval {
        Interval { lo: floor_dyadic(&self.lo, bits), hi: ceil_dyadic(&self.hi, bits) }
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", fmt_rational(&self.lo), fmt_rational(&self.hi))
    }
}

impl FromStr for Interval {
    type Err = ArithError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || ArithError::Parse(s.to_string());
        let inner = s.trim().strip_prefix('[').and_then(|t| t.strip_suffix(']')).ok_or_else(bad)?;
        let (a, b) = inner.split_once(',').ok_or_else(bad)?;
        Interval::new(parse_rational(a)?, parse_rational(b)?)
    }
}

impl Serialize for Interval {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Interval {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

pub fn iv_ops(op: IvOp, x: &Interval, y: &Interval) -> Result<Interval, ArithError> {
    Ok(match op {
        IvOp::Add => x.add(y),
        IvOp::Sub => x.sub(y),
        IvOp::Mul => x.mul(y),
        IvOp::Div => x.div(y)?,
    })
}

/// Grid resolution (bits after the binary point) used for a series precision.
fn grid_bits(terms: usize) -> u32 {
    4 * terms as u32 + 32
}

/// Smallest k with b / 2^k <= 1/2, for b >= 0.
fn halvings(b: &Rational) -> u32 {
    let half = rat(1, 2);
    let mut k = 0u32;
    let mut r = b.clone();
    while r > half {
        r /= int(2);
        k += 1;
    }
    k
}

/// Partial sum of e^r over terms 0..n.
fn exp_partial(r: &Rational, n: usize) -> Rational {
    let mut sum = Rational::zero();
    let mut term = Rational::one();
    for j in 0..n {
        sum += &term;
        term = term * r / int(j as i64 + 1);
    }
    sum
}

fn factorial(n: usize) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, j| acc * BigInt::from(j))
}

fn pow2k(mut v: Rational, k: u32) -> Rational {
    for _ in 0..k {
        v = &v * &v;
    }
    v
}

// Lower bound S_n(r)^(2^k) with r rounded down; nondecreasing in b because more
// halvings only raise it (S_n(r/2)^2 >= S_n(r) termwise for r >= 0).
fn exp_lower_nonneg(b: &Rational, n: usize, bits: u32) -> Rational {
    let k = halvings(b);
    let r = floor_dyadic(&(b / Rational::from_integer(BigInt::one() << k)), bits);
    pow2k(exp_partial(&r, n), k)
}

fn exp_upper_at(b: &Rational, k: u32, n: usize, bits: u32) -> Rational {
    let r = ceil_dyadic(&(b / Rational::from_integer(BigInt::one() << k)), bits);
    let rem = Rational::new(BigInt::from(2), factorial(n)) * num_traits::pow(r.clone(), n);
    pow2k(exp_partial(&r, n) + rem, k)
}

// Upper bound made nondecreasing by taking the running max over the right ends
// of the earlier halving ranges.
fn exp_upper_nonneg(b: &Rational, n: usize, bits: u32) -> Rational {
    let k = halvings(b);
    let mut u = exp_upper_at(b, k, n, bits);
    for j in 0..k {
        let end = if j == 0 { rat(1, 2) } else { Rational::from_integer(BigInt::one() << (j - 1)) };
        let v = exp_upper_at(&end, j, n, bits);
        if v > u {
            u = v;
        }
    }
    u
}

fn exp_lower_point(a: &Rational, n: usize, bits: u32) -> Rational {
    if a.is_negative() {
        floor_dyadic(&exp_upper_nonneg(&-a, n, bits).recip(), bits)
    } else {
        floor_dyadic(&exp_lower_nonneg(a, n, bits), bits)
    }
}

fn exp_upper_point(a: &Rational, n: usize, bits: u32) -> Rational {
    if a.is_negative() {
        ceil_dyadic(&exp_lower_nonneg(&-a, n, bits).recip(), bits)
    } else {
        ceil_dyadic(&exp_upper_nonneg(a, n, bits), bits)
    }
}

/// Outward enclosure of `exp` over `x`; endpoints are monotone functions of the
/// interval endpoints, so the map is inclusion monotone.
pub fn iv_exp(x: &Interval, terms: usize) -> Interval {
    let n = terms.max(1);
    let bits = grid_bits(n);
    Interval { lo: exp_lower_point(&x.lo, n, bits), hi: exp_upper_point(&x.hi, n, bits) }
}

fn isqrt_floor(v: &Rational, bits: u32) -> Rational {
    let scaled = (v * Rational::from_integer(BigInt::one() << (2 * bits))).floor().to_integer();
    let root = scaled.to_biguint().unwrap_or_default().sqrt();
    Rational::new(BigInt::from(root), BigInt::one() << bits)
}

fn isqrt_ceil(v: &Rational, bits: u32) -> Rational {
    let scaled = (v * Rational::from_integer(BigInt::one() << (2 * bits))).ceil().to_integer();
    let su: BigUint = scaled.to_biguint().unwrap_or_default();
    let mut root = su.sqrt();
    if &root * &root < su {
        root += 1u32;
    }
    Rational::new(BigInt::from(root), BigInt::one() << bits)
}

/// Outward enclosure of `sqrt` over `x` at resolution `2^-bits`.
pub fn iv_sqrt(x: &Interval, bits: u32) -> Result<Interval, ArithError> {
    if x.lo.is_negative() {
        return Err(ArithError::NegativeSqrt(fmt_rational(&x.lo)));
    }
    if bits == 0 {
        return Err(ArithError::ZeroPrecision);
    }
    Ok(Interval { lo: isqrt_floor(&x.lo, bits), hi: isqrt_ceil(&x.hi, bits) })
}

// arctan(x) for |x| <= 1 lies between consecutive alternating partial sums.
fn atan_series(x: &Rational, n: usize) -> Interval {
    let x2 = x * x;
    let mut pow = x.clone();
    let mut sum = Rational::zero();
    for j in 0..n {
        let term = &pow / int(2 * j as i64 + 1);
        if j % 2 == 0 {
            sum += term;
        } else {
            sum -= term;
        }
        pow *= &x2;
    }
    let next = &pow / int(2 * n as i64 + 1);
    let sum_next = if n % 2 == 0 { &sum + next } else { &sum - next };
    Interval::spanning(sum, sum_next)
}

fn pi_raw(n: usize) -> Interval {
    atan_series(&rat(1, 5), n).scale(&int(16)).sub(&atan_series(&rat(1, 239), n).scale(&int(4)))
}

fn atan_point(s: &Rational, n: usize, pi: &Interval) -> Interval {
    if s.is_negative() {
        return atan_point(&-s, n, pi).neg();
    }
    if s.is_zero() {
        return Interval::zero();
    }
    if s > &Rational::one() {
        return pi.scale(&rat(1, 2)).sub(&atan_point(&s.recip(), n, pi));
    }
    if s > &rat(1, 2) {
        let t = (s - Rational::one()) / (s + Rational::one());
        return pi.scale(&rat(1, 4)).add(&atan_series(&t, n));
    }
    atan_series(s, n)
}

/// Enclosures of arctan over `x` and of pi (Machin's formula).
pub fn iv_arctan_pi(x: &Interval, terms: usize) -> (Interval, Interval) {
    let n = terms.max(1);
    let bits = grid_bits(n);
    let pi = pi_raw(n);
    let lo = atan_point(&x.lo, n, &pi).round_out(bits).lo;
    let hi = atan_point(&x.hi, n, &pi).round_out(bits).hi;
    (Interval { lo, hi }, pi.round_out(bits))
}

/// Total order helper used by sorting code.
pub fn cmp_rational(a: &Rational, b: &Rational) -> Ordering {
    a.cmp(b)
}

/// Approximate value for display only; never used in a verdict.
pub fn to_f64(r: &Rational) -> f64 {
    use num_traits::ToPrimitive;
    r.to_f64().unwrap_or(f64::NAN)
}

pub fn is_reduced(r: &Rational) -> bool {
    r.denom().is_positive() && r.numer().gcd(r.denom()).is_one()
}

#[cfg(test)]
mod tests {
    use super::*;

    // `x` is within `tol` of the decimal `v` (decimals are not exact values).
    fn near(x: &Interval, v: &str, tol: u32) -> bool {
        let v = parse_rational(v).unwrap();
        let t = ten_pow_neg(tol);
        x.lo() <= &(&v + &t) && x.hi() >= &(&v - &t)
    }

    fn iv(a: (i64, i64), b: (i64, i64)) -> Interval {
        Interval::new(rat(a.0, a.1), rat(b.0, b.1)).unwrap()
    }

    #[test]
    fn definition_examples() {
        let u = Interval::from_ints(0, 1);
        assert_eq!(iv_ops(IvOp::Mul, &u, &u).unwrap(), u);
        assert_eq!(iv_ops(IvOp::Add, &u, &Interval::from_ints(-1, 0)).unwrap(), Interval::from_ints(-1, 1));
        assert_eq!(
            iv_ops(IvOp::Mul, &Interval::from_ints(1, 2), &Interval::from_ints(-3, -1)).unwrap(),
            Interval::from_ints(-6, -1)
        );
        assert_eq!(
            iv_ops(IvOp::Div, &Interval::from_ints(1, 1), &Interval::from_ints(2, 4)).unwrap(),
            iv((1, 4), (1, 2))
        );
    }

    #[test]
    fn div_by_straddling_interval_errors() {
        let e = iv_ops(IvOp::Div, &Interval::from_ints(1, 1), &Interval::from_ints(-1, 1));
        assert!(matches!(e, Err(ArithError::ZeroStraddle(_))));
        assert!(Interval::from_ints(1, 1).div(&Interval::from_ints(0, 2)).is_err());
    }

    #[test]
    fn inverted_rejected() {
        assert!(Interval::new(int(2), int(1)).is_err());
    }

    #[test]
    fn exp_at_zero_is_exact() {
        for k in 1..6 {
            assert_eq!(iv_exp(&Interval::zero(), k), Interval::point(int(1)));
        }
    }

    #[test]
    fn exp_on_unit_interval_brackets_e() {
        let e = iv_exp(&Interval::from_ints(0, 1), 20);
        assert_eq!(e.lo(), &int(1));
        assert!(e.hi() >= &parse_rational("2.718281828459045").unwrap());
        assert!(e.hi() < &parse_rational("2.7182818284591").unwrap());
    }

    #[test]
    fn exp_negative_and_large() {
        let e = iv_exp(&Interval::point(int(-3)), 24);
        assert!(near(&e, "0.049787068367863944", 17));
        let e = iv_exp(&Interval::point(int(10)), 24);
        assert!(near(&e, "22026.465794806718", 11));
        assert!(e.width() < ten_pow_neg(20));
    }

    #[test]
    fn sqrt_examples() {
        assert_eq!(iv_sqrt(&Interval::point(int(4)), 10).unwrap(), Interval::point(int(2)));
        let s = iv_sqrt(&Interval::point(int(2)), 64).unwrap();
        assert!(s.width() <= Rational::new(BigInt::one(), BigInt::one() << 60));
        assert!(s.lo() * s.lo() <= int(2) && s.hi() * s.hi() >= int(2));
        assert_eq!(iv_sqrt(&Interval::from_ints(0, 1), 8).unwrap(), Interval::from_ints(0, 1));
        assert!(iv_sqrt(&Interval::from_ints(-1, 1), 8).is_err());
    }

    #[test]
    fn arctan_examples() {
        let (a, _) = iv_arctan_pi(&Interval::zero(), 10);
        assert_eq!(a, Interval::zero());
        let (a1, pi) = iv_arctan_pi(&Interval::point(int(1)), 30);
        let slack = Rational::new(BigInt::one(), BigInt::one() << grid_bits(30));
        let quarter = pi.scale(&rat(1, 4));
        let widened = Interval::new(quarter.lo() - &slack, quarter.hi() + &slack).unwrap();
        assert!(a1.subset_of(&widened));
        assert!(pi.width() < ten_pow_neg(10));
        assert!(near(&pi, "3.14159265358979323846", 19));
    }

    #[test]
    fn arctan_large_and_negative() {
        let (a, _) = iv_arctan_pi(&Interval::point(int(3)), 30);
        assert!(near(&a, "1.2490457723982544258", 18));
        let (a, _) = iv_arctan_pi(&Interval::point(rat(-3, 4)), 30);
        assert!(near(&a, "-0.64350110879328438680", 19));
    }

    #[test]
    fn parse_and_format() {
        assert_eq!(fmt_rational(&rat(-6, 4)), "-3/2");
        assert_eq!(fmt_rational(&int(5)), "5/1");
        assert_eq!(parse_rational("-3/2").unwrap(), rat(-3, 2));
        assert_eq!(parse_rational("0.03").unwrap(), rat(3, 100));
        assert_eq!(parse_rational("2e-5").unwrap(), rat(1, 50000));
        assert_eq!(parse_rational("7").unwrap(), int(7));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("abc").is_err());
        let i = Interval::new(rat(-1, 3), rat(5, 2)).unwrap();
        assert_eq!(i.to_string(), "[-1/3, 5/2]");
        assert_eq!(i.to_string().parse::<Interval>().unwrap(), i);
        let js = serde_json::to_string(&i).unwrap();
        assert_eq!(serde_json::from_str::<Interval>(&js).unwrap(), i);
    }

    #[test]
    fn widths_shrink_with_precision() {
        let x = Interval::new(rat(-7, 3), rat(9, 4)).unwrap();
        let mut prev = iv_exp(&x, 1).width();
        for k in 2..30 {
            let w = iv_exp(&x, k).width();
            assert!(w <= prev, "exp width grew at {k}");
            prev = w;
        }
        let y = Interval::new(rat(2, 1), rat(3, 1)).unwrap();
        let mut prev = iv_sqrt(&y, 1).unwrap().width();
        for b in 2..80 {
            let w = iv_sqrt(&y, b).unwrap().width();
            assert!(w <= prev);
            prev = w;
        }
        let z = Interval::new(rat(3, 5), rat(11, 3)).unwrap();
        let (a, p) = iv_arctan_pi(&z, 1);
        let (mut pa, mut pp) = (a.width(), p.width());
        for k in 2..30 {
            let (a, p) = iv_arctan_pi(&z, k);
            assert!(a.width() <= pa && p.width() <= pp);
            pa = a.width();
            pp = p.width();
        }
    }

    #[test]
    fn square_is_tight() {
        assert_eq!(Interval::from_ints(-2, 3).square(), Interval::from_ints(0, 9));
        assert_eq!(Interval::from_ints(-3, -2).square(), Interval::from_ints(4, 9));
    }
}
