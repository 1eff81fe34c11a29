//! Exact univariate polynomials over Q, gcds, Chebyshev polynomials and the
//! (non-binomial) Bernstein basis `x^i (1-x)^(n-i)`.
//!
//! A polynomial is stored as integer coefficients over one positive common
//! denominator. Products then run on plain integers, with a single content
//! reduction at the end.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::exact::{fmt_rational, int, parse_rational, Interval, Rational};
use crate::modp;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum PolyError {
    #[error("division by the zero polynomial")]
    ZeroDivisor,
    #[error("denominator vanishes at {0}")]
    PoleAt(String),
    #[error("{0}")]
    Malformed(String),
}

/// `Σ num[i] x^i / den`, canonical: `den > 0`, `gcd(content(num), den) = 1`,
/// no trailing zeros.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Polynomial {
    num: Vec<BigInt>,
    den: BigInt,
}

pub(crate) fn content(v: &[BigInt]) -> BigInt {
    let mut g = BigInt::zero();
    for c in v {
        if c.is_zero() {
            continue;
        }
        g = g.gcd(c);
        if g.is_one() {
            break;
        }
    }
    g
}

pub(crate) fn trim_int(v: &mut Vec<BigInt>) {
    while v.last().is_some_and(|c| c.is_zero()) {
        v.pop();
    }
}

pub(crate) fn mul_int(a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![BigInt::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            if !y.is_zero() {
                out[i + j] += x * y;
            }
        }
    }
    out
}

/// Content-free copy with positive leading coefficient.
pub(crate) fn primitive_int(v: &[BigInt]) -> Vec<BigInt> {
    let mut v = v.to_vec();
    trim_int(&mut v);
    if v.is_empty() {
        return v;
    }
    let mut g = content(&v);
    if v.last().unwrap().is_negative() {
        g = -g;
    }
    v.iter().map(|c| c / &g).collect()
}

/// Exact quotient `a / b` over Z when `b` divides `a`, else `None`.
pub(crate) fn exact_div_int(a: &[BigInt], b: &[BigInt]) -> Option<Vec<BigInt>> {
    let mut r = a.to_vec();
    trim_int(&mut r);
    if r.is_empty() {
        return Some(Vec::new());
    }
    let db = b.len() - 1;
    if r.len() < b.len() {
        return None;
    }
    let lc = b.last().unwrap();
    let mut q = vec![BigInt::zero(); r.len() - db];
    while r.len() > db && !r.is_empty() {
        let dr = r.len() - 1;
        let (c, rem) = r[dr].div_rem(lc);
        if !rem.is_zero() {
            return None;
        }
        let shift = dr - db;
        for (i, bi) in b.iter().enumerate() {
            r[shift + i] -= &c * bi;
        }
        q[shift] = c;
        trim_int(&mut r);
    }
    if r.is_empty() {
        Some(q)
    } else {
        None
    }
}

fn crt_combine(h: &mut [BigInt], m: &BigInt, g: &[u64], p: u64) {
    let minv = modp::inv_mod(modp::reduce(m, p), p);
    for (hi, gi) in h.iter_mut().zip(g) {
        let hr = modp::reduce(hi, p);
        let t = modp::mul_mod(modp::sub_mod(*gi, hr, p), minv, p);
        *hi += m * BigInt::from(t);
    }
}

fn symmetric(h: &[BigInt], m: &BigInt) -> Vec<BigInt> {
    let half: BigInt = m >> 1;
    h.iter().map(|c| if c > &half { c - m } else { c.clone() }).collect()
}

/// Gcd of two nonzero integer polynomials via Brown's modular algorithm:
/// gcds modulo large primes, CRT lifting, and an exact trial-division check.
/// Returns a primitive polynomial with positive leading coefficient.
pub(crate) fn gcd_int(a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
    let a = primitive_int(a);
    let b = primitive_int(b);
    if a.is_empty() {
        return b;
    }
    if b.is_empty() {
        return a;
    }
    if a.len() == 1 || b.len() == 1 {
        return vec![BigInt::one()];
    }
    let gamma = a.last().unwrap().gcd(b.last().unwrap());
    let mut acc: Option<(Vec<BigInt>, BigInt, usize)> = None;
    let mut prev_sym: Option<Vec<BigInt>> = None;
    for &p in modp::primes() {
        let ga = modp::reduce(&gamma, p);
        if ga == 0 || modp::reduce(a.last().unwrap(), p) == 0 || modp::reduce(b.last().unwrap(), p) == 0 {
            continue;
        }
        let ap = modp::reduce_poly(&a, p);
        let bp = modp::reduce_poly(&b, p);
        let g = modp::gcd(&ap, &bp, p);
        let d = g.len() - 1;
        if d == 0 {
            return vec![BigInt::one()];
        }
        let g: Vec<u64> = g.iter().map(|c| modp::mul_mod(*c, ga, p)).collect();
        match &mut acc {
            Some((_, _, cur)) if d > *cur => continue,
            Some((h, m, cur)) if d == *cur => {
                crt_combine(h, m, &g, p);
                *m *= BigInt::from(p);
            }
            _ => {
                acc = Some((g.iter().map(|c| BigInt::from(*c)).collect(), BigInt::from(p), d));
                prev_sym = None;
                continue;
            }
        }
        let (h, m, _) = acc.as_ref().unwrap();
        let sym = symmetric(h, m);
        if prev_sym.as_ref() == Some(&sym) {
            let cand = primitive_int(&sym);
            if exact_div_int(&a, &cand).is_some() && exact_div_int(&b, &cand).is_some() {
                return cand;
            }
        }
        prev_sym = Some(sym);
    }
    gcd_subresultant_int(&a, &b)
}

fn pseudo_rem(a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
    // lc(b)^(deg a - deg b + 1) * a  mod  b, one scaling per eliminated degree
    let mut r = a.to_vec();
    let db = b.len() - 1;
    let lc = b.last().unwrap();
    if r.len() <= db {
        return r;
    }
    for k in (db..r.len()).rev() {
        let c = r[k].clone();
        for x in r.iter_mut() {
            *x *= lc;
        }
        if !c.is_zero() {
            for (i, bi) in b.iter().enumerate() {
                r[k - db + i] -= &c * bi;
            }
        }
    }
    trim_int(&mut r);
    r
}

/// Subresultant polynomial remainder sequence gcd (fraction-free).
pub(crate) fn gcd_subresultant_int(a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
    let (mut f, mut g) = (primitive_int(a), primitive_int(b));
    if f.is_empty() {
        return g;
    }
    if g.is_empty() {
        return f;
    }
    if f.len() < g.len() {
        std::mem::swap(&mut f, &mut g);
    }
    let mut big_g = BigInt::one();
    let mut h = BigInt::one();
    loop {
        let delta = (f.len() - g.len()) as u32;
        let r = pseudo_rem(&f, &g);
        if r.is_empty() {
            return primitive_int(&g);
        }
        if r.len() == 1 {
            return vec![BigInt::one()];
        }
        let divisor = &big_g * num_traits::pow(h.clone(), delta as usize);
        f = g;
        g = r.iter().map(|c| c / &divisor).collect();
        big_g = f.last().unwrap().clone();
        h = if delta == 0 {
            h
        } else {
            num_traits::pow(big_g.clone(), delta as usize) / num_traits::pow(h.clone(), delta as usize - 1)
        };
    }
}

impl Polynomial {
    fn from_parts(mut num: Vec<BigInt>, mut den: BigInt) -> Self {
        trim_int(&mut num);
        if num.is_empty() {
            return Polynomial::zero();
        }
        if den.is_negative() {
            den = -den;
            for c in num.iter_mut() {
                *c = -&*c;
            }
        }
        let g = content(&num).gcd(&den);
        if !g.is_one() {
            for c in num.iter_mut() {
                *c = &*c / &g;
            }
            den /= &g;
        }
        Polynomial { num, den }
    }

    pub fn zero() -> Self {
        Polynomial { num: Vec::new(), den: BigInt::one() }
    }

    pub fn one() -> Self {
        Polynomial::constant(Rational::one())
    }

    pub fn x() -> Self {
        Polynomial::from_ints(&[0, 1])
    }

    pub fn constant(c: Rational) -> Self {
        Polynomial::from_parts(vec![c.numer().clone()], c.denom().clone())
    }

    pub fn monomial(c: Rational, k: usize) -> Self {
        let mut num = vec![BigInt::zero(); k + 1];
        num[k] = c.numer().clone();
        Polynomial::from_parts(num, c.denom().clone())
    }

    pub fn from_ints(c: &[i64]) -> Self {
        Polynomial::from_parts(c.iter().map(|&v| BigInt::from(v)).collect(), BigInt::one())
    }

    pub fn from_bigints(c: Vec<BigInt>) -> Self {
        Polynomial::from_parts(c, BigInt::one())
    }

    pub fn from_rationals(c: &[Rational]) -> Self {
        let den = c.iter().fold(BigInt::one(), |acc, r| acc.lcm(r.denom()));
        let num = c.iter().map(|r| r.numer() * (&den / r.denom())).collect();
        Polynomial::from_parts(num, den)
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_empty()
    }

    /// Degree; the zero polynomial reports 0.
    pub fn degree(&self) -> usize {
        self.num.len().saturating_sub(1)
    }

    pub fn len(&self) -> usize {
        self.num.len()
    }

    pub fn is_empty(&self) -> bool {
        self.num.is_empty()
    }

    pub fn coeff(&self, i: usize) -> Rational {
        match self.num.get(i) {
            Some(c) => Rational::new(c.clone(), self.den.clone()),
            None => Rational::zero(),
        }
    }

    pub fn coefficients(&self) -> Vec<Rational> {
        (0..self.num.len()).map(|i| self.coeff(i)).collect()
    }

    pub fn leading(&self) -> Rational {
        self.coeff(self.degree())
    }

    /// Integer numerator coefficients and the common denominator.
    pub fn int_parts(&self) -> (&[BigInt], &BigInt) {
        (&self.num, &self.den)
    }

    /// Primitive integer coefficients with positive leading coefficient.
    pub fn primitive(&self) -> Vec<BigInt> {
        primitive_int(&self.num)
    }

    pub fn scale(&self, c: &Rational) -> Polynomial {
        if c.is_zero() {
            return Polynomial::zero();
        }
        Polynomial::from_parts(self.num.iter().map(|v| v * c.numer()).collect(), &self.den * c.denom())
    }

    pub fn eval(&self, x: &Rational) -> Rational {
        // Horner on integers: Σ num_i p^i q^(n-i) / (den q^n)
        if self.num.is_empty() {
            return Rational::zero();
        }
        let (p, q) = (x.numer(), x.denom());
        let n = self.num.len() - 1;
        let mut acc = self.num[n].clone();
        let mut qpow = BigInt::one();
        for i in (0..n).rev() {
            qpow *= q;
            acc = acc * p + &self.num[i] * &qpow;
        }
        Rational::new(acc, &self.den * qpow)
    }

    /// Naive Horner interval evaluation.
    pub fn eval_interval(&self, x: &Interval) -> Interval {
        let mut acc = Interval::zero();
        for c in self.coefficients().iter().rev() {
            acc = acc.mul(x).add(&Interval::point(c.clone()));
        }
        acc
    }

    pub fn derivative(&self) -> Polynomial {
        let num = self.num.iter().enumerate().skip(1).map(|(i, c)| c * BigInt::from(i)).collect();
        Polynomial::from_parts(num, self.den.clone())
    }

    pub fn pow(&self, k: u32) -> Polynomial {
        let mut out = Polynomial::one();
        let mut base = self.clone();
        let mut e = k;
        while e > 0 {
            if e & 1 == 1 {
                out = &out * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        out
    }

    /// `self(inner(x))`.
    pub fn compose(&self, inner: &Polynomial) -> Polynomial {
        let mut acc = Polynomial::zero();
        for c in self.coefficients().iter().rev() {
            acc = &(&acc * inner) + &Polynomial::constant(c.clone());
        }
        acc
    }

    /// Homogenised evaluation `Σ c_i a^i b^(n-i)` with `n = deg(self)`.
    pub fn homogenize(&self, a: &Polynomial, b: &Polynomial, n: usize) -> Polynomial {
        if self.is_zero() {
            return Polynomial::zero();
        }
        let d = self.degree();
        assert!(n >= d);
        let mut bpow = vec![Polynomial::one()];
        for i in 1..=n {
            bpow.push(&bpow[i - 1] * b);
        }
        let coeffs = self.coefficients();
        let mut acc = Polynomial::constant(coeffs[d].clone());
        for i in (0..d).rev() {
            acc = &(&acc * a) + &bpow[d - i].scale(&coeffs[i]);
        }
        &acc * &bpow[n - d]
    }

    pub fn div_rem(&self, b: &Polynomial) -> Result<(Polynomial, Polynomial), PolyError> {
        if b.is_zero() {
            return Err(PolyError::ZeroDivisor);
        }
        let mut r = self.coefficients();
        let bc = b.coefficients();
        let db = b.degree();
        let lc = bc[db].clone();
        if r.len() <= db {
            return Ok((Polynomial::zero(), self.clone()));
        }
        let mut q = vec![Rational::zero(); r.len() - db];
        for k in (db..r.len()).rev() {
            let c = &r[k] / &lc;
            if c.is_zero() {
                continue;
            }
            for (i, bi) in bc.iter().enumerate() {
                r[k - db + i] -= &c * bi;
            }
            q[k - db] = c;
        }
        r.truncate(db);
        Ok((Polynomial::from_rationals(&q), Polynomial::from_rationals(&r)))
    }

    /// Exact quotient when `b | self`.
    pub fn exact_div(&self, b: &Polynomial) -> Option<Polynomial> {
        if b.is_zero() {
            return None;
        }
        let q = exact_div_int(&self.num, &primitive_int(&b.num))?;
        // self = qn/self.den * bprim ; b = bprim * c  =>  self / b = qn / (self.den * c)
        let c = b.coeff(b.degree()) / Rational::from_integer(primitive_int(&b.num).last().unwrap().clone());
        Some(Polynomial::from_parts(q, self.den.clone()).scale(&c.recip()))
    }

    /// Monic gcd (modular algorithm); gcd(0, 0) = 0.
    pub fn gcd(&self, other: &Polynomial) -> Polynomial {
        if self.is_zero() && other.is_zero() {
            return Polynomial::zero();
        }
        Polynomial::from_bigints(gcd_int(&self.num, &other.num)).monic()
    }

    /// Monic gcd through the subresultant remainder sequence.
    pub fn gcd_subresultant(&self, other: &Polynomial) -> Polynomial {
        if self.is_zero() && other.is_zero() {
            return Polynomial::zero();
        }
        Polynomial::from_bigints(gcd_subresultant_int(&self.num, &other.num)).monic()
    }

    pub fn monic(&self) -> Polynomial {
        if self.is_zero() {
            return self.clone();
        }
        self.scale(&self.leading().recip())
    }

    /// Highest power `k` with `x^k | self` and the cofactor.
    pub fn split_x_power(&self) -> (usize, Polynomial) {
        let k = self.num.iter().take_while(|c| c.is_zero()).count();
        if self.is_zero() {
            return (0, self.clone());
        }
        (k, Polynomial::from_parts(self.num[k..].to_vec(), self.den.clone()))
    }

    /// `p(1 - x)`.
    pub fn reflect(&self) -> Polynomial {
        self.compose(&Polynomial::from_ints(&[1, -1]))
    }

    /// `p(a + (b - a) s)` as a polynomial in `s`.
    pub fn rescale(&self, a: &Rational, b: &Rational) -> Polynomial {
        let lin = Polynomial::from_rationals(&[a.clone(), b - a]);
        self.compose(&lin)
    }

    /// Odd coefficients vanish.
    pub fn is_even(&self) -> bool {
        self.num.iter().skip(1).step_by(2).all(|c| c.is_zero())
    }

    pub fn is_odd(&self) -> bool {
        self.num.iter().step_by(2).all(|c| c.is_zero())
    }

    /// For an even polynomial `p(x) = q(x^2)`, returns `q`.
    pub fn even_to_square(&self) -> Option<Polynomial> {
        if !self.is_even() {
            return None;
        }
        Some(Polynomial::from_parts(self.num.iter().step_by(2).cloned().collect(), self.den.clone()))
    }

    /// `q(x^2)`.
    pub fn in_square(&self) -> Polynomial {
        let mut num = vec![BigInt::zero(); 2 * self.num.len()];
        for (i, c) in self.num.iter().enumerate() {
            num[2 * i] = c.clone();
        }
        Polynomial::from_parts(num, self.den.clone())
    }

    /// Even and odd parts.
    pub fn parity_split(&self) -> (Polynomial, Polynomial) {
        let mut e = self.num.clone();
        let mut o = self.num.clone();
        for (i, (ei, oi)) in e.iter_mut().zip(o.iter_mut()).enumerate() {
            if i % 2 == 0 {
                *oi = BigInt::zero();
            } else {
                *ei = BigInt::zero();
            }
        }
        (Polynomial::from_parts(e, self.den.clone()), Polynomial::from_parts(o, self.den.clone()))
    }

    pub fn to_strings(&self) -> Vec<String> {
        self.coefficients().iter().map(fmt_rational).collect()
    }

    pub fn from_strings(v: &[String]) -> Result<Polynomial, PolyError> {
        let c: Result<Vec<_>, _> = v.iter().map(|s| parse_rational(s)).collect();
        Ok(Polynomial::from_rationals(&c.map_err(|e| PolyError::Malformed(e.to_string()))?))
    }

    /// Largest coefficient bit length of the integer numerator.
    pub fn height_bits(&self) -> u64 {
        self.num.iter().map(|c| c.bits()).max().unwrap_or(0)
    }
}

impl fmt::Debug for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Polynomial{:?}", self.to_strings())
    }
}

impl Serialize for Polynomial {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        self.to_strings().serialize(s)
    }
}

impl<'de> Deserialize<'de> for Polynomial {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let v = Vec::<String>::deserialize(d)?;
        Polynomial::from_strings(&v).map_err(serde::de::Error::custom)
    }
}

impl Add for &Polynomial {
    type Output = Polynomial;

    fn add(self, o: &Polynomial) -> Polynomial {
        if self.is_zero() {
            return o.clone();
        }
        if o.is_zero() {
            return self.clone();
        }
        let l = self.den.lcm(&o.den);
        let (fa, fb) = (&l / &self.den, &l / &o.den);
        let n = self.num.len().max(o.num.len());
        let mut num = vec![BigInt::zero(); n];
        for (i, c) in self.num.iter().enumerate() {
            num[i] += c * &fa;
        }
        for (i, c) in o.num.iter().enumerate() {
            num[i] += c * &fb;
        }
        Polynomial::from_parts(num, l)
    }
}

impl Neg for &Polynomial {
    type Output = Polynomial;

    fn neg(self) -> Polynomial {
        Polynomial { num: self.num.iter().map(|c| -c).collect(), den: self.den.clone() }
    }
}

impl Sub for &Polynomial {
    type Output = Polynomial;

    fn sub(self, o: &Polynomial) -> Polynomial {
        self + &(-o)
    }
}

impl Mul for &Polynomial {
    type Output = Polynomial;

    fn mul(self, o: &Polynomial) -> Polynomial {
        Polynomial::from_parts(mul_int(&self.num, &o.num), &self.den * &o.den)
    }
}

pub fn binomial(n: usize, k: usize) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    let k = k.min(n - k);
    let mut r = BigInt::one();
    for i in 0..k {
        r = r * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    r
}

/// Chebyshev `T_n` by the three-term recurrence.
pub fn cheb_generate(n: usize) -> Polynomial {
    let mut prev = Polynomial::one();
    if n == 0 {
        return prev;
    }
    let mut cur = Polynomial::x();
    let two_x = Polynomial::from_ints(&[0, 2]);
    for _ in 1..n {
        let next = &(&two_x * &cur) - &prev;
        prev = cur;
        cur = next;
    }
    cur
}

/// `P_n` with `T_{2n+1}(x) = x P_n(x^2)`.
pub fn cheb_odd_factor(n: usize) -> Polynomial {
    let t = cheb_generate(2 * n + 1);
    let (k, rest) = t.split_x_power();
    debug_assert_eq!(k, 1);
    rest.even_to_square().expect("odd Chebyshev polynomial")
}

/// `E_n` with `T_{2n}(x) = E_n(x^2)`.
pub fn cheb_even_factor(n: usize) -> Polynomial {
    cheb_generate(2 * n).even_to_square().expect("even Chebyshev polynomial")
}

pub const BERNSTEIN_BASIS_TAG: &str = "x^i(1-x)^(n-i)";

/// Coefficients in the basis `x^i (1-x)^(n-i)` (no binomial weights).
/// The conventional binomial coefficient is `a_i / C(n, i)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BernsteinForm {
    pub basis: String,
    pub degree: usize,
    #[serde(with = "crate::exact::rat_vec_serde")]
    pub coefficients: Vec<Rational>,
}

impl BernsteinForm {
    pub fn new(coefficients: Vec<Rational>) -> Result<Self, PolyError> {
        if coefficients.is_empty() {
            return Err(PolyError::Malformed("empty Bernstein coefficient list".into()));
        }
        Ok(BernsteinForm { basis: BERNSTEIN_BASIS_TAG.into(), degree: coefficients.len() - 1, coefficients })
    }

    /// Raises the degree by one: `a'_i = a_i + a_{i-1}`.
    pub fn elevate(&self) -> BernsteinForm {
        let n = self.degree;
        let mut c = Vec::with_capacity(n + 2);
        for i in 0..=n + 1 {
            let mut v = Rational::zero();
            if i <= n {
                v += &self.coefficients[i];
            }
            if i >= 1 {
                v += &self.coefficients[i - 1];
            }
            c.push(v);
        }
        BernsteinForm { basis: self.basis.clone(), degree: n + 1, coefficients: c }
    }

    pub fn elevate_to(&self, n: usize) -> BernsteinForm {
        let mut b = self.clone();
        while b.degree < n {
            b = b.elevate();
        }
        b
    }

    pub fn eval(&self, x: &Rational) -> Rational {
        let n = self.degree;
        let one_m = Rational::one() - x;
        self.coefficients
            .iter()
            .enumerate()
            .map(|(i, a)| a * num_traits::pow(x.clone(), i) * num_traits::pow(one_m.clone(), n - i))
            .fold(Rational::zero(), |acc, v| acc + v)
    }
}

/// Power basis to Bernstein basis of degree `max(deg p, degree)`:
/// `a_i = Σ_{j<=i} C(n-j, i-j) p_j`.
pub fn to_bernstein(p: &Polynomial, degree: Option<usize>) -> BernsteinForm {
    let n = degree.unwrap_or(0).max(p.degree());
    let pc = p.coefficients();
    let coeffs = (0..=n)
        .map(|i| {
            (0..=i.min(pc.len().saturating_sub(1)))
                .filter(|&j| j < pc.len())
                .map(|j| &pc[j] * Rational::from_integer(binomial(n - j, i - j)))
                .fold(Rational::zero(), |acc, v| acc + v)
        })
        .collect();
    BernsteinForm { basis: BERNSTEIN_BASIS_TAG.into(), degree: n, coefficients: coeffs }
}

pub fn from_bernstein(b: &BernsteinForm) -> Polynomial {
    let n = b.degree;
    let mut out = vec![Rational::zero(); n + 1];
    for (i, a) in b.coefficients.iter().enumerate() {
        if a.is_zero() {
            continue;
        }
        for k in 0..=n - i {
            let c = a * Rational::from_integer(binomial(n - i, k));
            if k % 2 == 0 {
                out[i + k] += c;
            } else {
                out[i + k] -= c;
            }
        }
    }
    Polynomial::from_rationals(&out)
}

/// All coefficients nonnegative and at least one positive.
pub fn denom_positive(b: &BernsteinForm) -> bool {
    b.coefficients.iter().all(|a| !a.is_negative()) && b.coefficients.iter().any(|a| a.is_positive())
}

/// Reduced quotient `num / den`; `den` is primitive over Z with positive
/// leading coefficient, so equal functions have equal representations.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct RationalFunction {
    num: Polynomial,
    den: Polynomial,
}

impl RationalFunction {
    pub fn new(num: Polynomial, den: Polynomial) -> Result<Self, PolyError> {
        if den.is_zero() {
            return Err(PolyError::ZeroDivisor);
        }
        let g = num.gcd(&den);
        let (n, d) = if g.degree() == 0 {
            (num, den)
        } else {
            (num.exact_div(&g).expect("gcd divides"), den.exact_div(&g).expect("gcd divides"))
        };
        Ok(RationalFunction::normalized(n, d))
    }

    // Scales so the denominator is primitive integral with lc > 0; assumes coprime.
    fn normalized(num: Polynomial, den: Polynomial) -> Self {
        if num.is_zero() {
            return RationalFunction { num, den: Polynomial::one() };
        }
        let prim = Polynomial::from_bigints(den.primitive());
        let c = den.leading() / prim.leading();
        RationalFunction { num: num.scale(&c.recip()), den: prim }
    }

    pub fn from_poly(p: Polynomial) -> Self {
        RationalFunction { num: p, den: Polynomial::one() }
    }

    pub fn constant(c: Rational) -> Self {
        RationalFunction::from_poly(Polynomial::constant(c))
    }

    pub fn zero() -> Self {
        RationalFunction::constant(Rational::zero())
    }

    pub fn one() -> Self {
        RationalFunction::constant(Rational::one())
    }

    pub fn x() -> Self {
        RationalFunction::from_poly(Polynomial::x())
    }

    pub fn num(&self) -> &Polynomial {
        &self.num
    }

    pub fn den(&self) -> &Polynomial {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_constant(&self) -> bool {
        self.num.degree() == 0 && self.den.degree() == 0
    }

    pub fn as_constant(&self) -> Option<Rational> {
        if self.is_constant() {
            Some(self.num.coeff(0) / self.den.coeff(0))
        } else {
            None
        }
    }

    pub fn degrees(&self) -> (usize, usize) {
        (self.num.degree(), self.den.degree())
    }

    pub fn eval(&self, x: &Rational) -> Result<Rational, PolyError> {
        let d = self.den.eval(x);
        if d.is_zero() {
            return Err(PolyError::PoleAt(fmt_rational(x)));
        }
        Ok(self.num.eval(x) / d)
    }

    pub fn add(&self, o: &RationalFunction) -> RationalFunction {
        if self.is_zero() {
            return o.clone();
        }
        if o.is_zero() {
            return self.clone();
        }
        if self.den == o.den {
            let num = &self.num + &o.num;
            return RationalFunction::new(num, self.den.clone()).unwrap();
        }
        let g = self.den.gcd(&o.den);
        if g.degree() == 0 {
            let num = &(&self.num * &o.den) + &(&o.num * &self.den);
            return RationalFunction::normalized(num, &self.den * &o.den);
        }
        let b1 = self.den.exact_div(&g).unwrap();
        let d1 = o.den.exact_div(&g).unwrap();
        let num = &(&self.num * &d1) + &(&o.num * &b1);
        let h = num.gcd(&g);
        let (num, g) = if h.degree() == 0 {
            (num, g)
        } else {
            (num.exact_div(&h).unwrap(), g.exact_div(&h).unwrap())
        };
        RationalFunction::normalized(num, &(&g * &b1) * &d1)
    }

    pub fn neg(&self) -> RationalFunction {
        RationalFunction { num: -&self.num, den: self.den.clone() }
    }

    pub fn sub(&self, o: &RationalFunction) -> RationalFunction {
        self.add(&o.neg())
    }

    pub fn mul(&self, o: &RationalFunction) -> RationalFunction {
        if self.is_zero() || o.is_zero() {
            return RationalFunction::zero();
        }
        let g1 = self.num.gcd(&o.den);
        let g2 = o.num.gcd(&self.den);
        let cut = |p: &Polynomial, g: &Polynomial| if g.degree() == 0 { p.clone() } else { p.exact_div(g).unwrap() };
        let num = &cut(&self.num, &g1) * &cut(&o.num, &g2);
        let den = &cut(&self.den, &g2) * &cut(&o.den, &g1);
        RationalFunction::normalized(num, den)
    }

    pub fn scale(&self, c: &Rational) -> RationalFunction {
        if c.is_zero() {
            return RationalFunction::zero();
        }
        RationalFunction { num: self.num.scale(c), den: self.den.clone() }
    }

    pub fn recip(&self) -> Result<RationalFunction, PolyError> {
        if self.is_zero() {
            return Err(PolyError::ZeroDivisor);
        }
        Ok(RationalFunction::normalized(self.den.clone(), self.num.clone()))
    }

    pub fn div(&self, o: &RationalFunction) -> Result<RationalFunction, PolyError> {
        Ok(self.mul(&o.recip()?))
    }

    pub fn pow(&self, k: i32) -> RationalFunction {
        let base = if k < 0 { self.recip().expect("nonzero base") } else { self.clone() };
        let e = k.unsigned_abs();
        RationalFunction { num: base.num.pow(e), den: base.den.pow(e) }
    }

    pub fn mul_poly(&self, p: &Polynomial) -> RationalFunction {
        self.mul(&RationalFunction::from_poly(p.clone()))
    }

    pub fn derivative(&self) -> RationalFunction {
        // (n/d)' = (n' d - n d') / d^2, cancelled against the square-free part of d
        let dn = self.num.derivative();
        let dd = self.den.derivative();
        if dd.is_zero() {
            return RationalFunction { num: dn.scale(&self.den.coeff(0).recip()), den: Polynomial::one() };
        }
        let g = self.den.gcd(&dd);
        let dd_g = dd.exact_div(&g).unwrap();
        let d_g = self.den.exact_div(&g).unwrap();
        let num = &(&dn * &d_g) - &(&self.num * &dd_g);
        RationalFunction::new(num, &self.den * &d_g).unwrap()
    }

    /// `self(inner(x))`.
    pub fn compose(&self, inner: &RationalFunction) -> Result<RationalFunction, PolyError> {
        let (a, b) = (&inner.num, &inner.den);
        let dn = self.num.degree();
        let dd = self.den.degree();
        let nh = self.num.homogenize(a, b, dn);
        let dh = self.den.homogenize(a, b, dd);
        let (nh, dh) = if dd >= dn {
            (&nh * &b.pow((dd - dn) as u32), dh)
        } else {
            (nh, &dh * &b.pow((dn - dd) as u32))
        };
        RationalFunction::new(nh, dh)
    }

    /// For an even function `f(x) = g(x^2)`, returns `g`.
    pub fn even_to_square(&self) -> Option<RationalFunction> {
        let n = self.num.even_to_square()?;
        let d = self.den.even_to_square()?;
        Some(RationalFunction::normalized(n, d))
    }

    /// `f(x) = x^k g(x)` with `g(0)` finite and nonzero; returns `(k, g)`.
    pub fn order_at_zero(&self) -> (i64, RationalFunction) {
        if self.is_zero() {
            return (0, self.clone());
        }
        let (kn, n) = self.num.split_x_power();
        let (kd, d) = self.den.split_x_power();
        (kn as i64 - kd as i64, RationalFunction::normalized(n, d))
    }

    /// Exact limit at 0 when finite.
    pub fn value_at_zero(&self) -> Option<Rational> {
        let (k, g) = self.order_at_zero();
        match k.cmp(&0) {
            std::cmp::Ordering::Greater => Some(Rational::zero()),
            std::cmp::Ordering::Equal => g.eval(&Rational::zero()).ok(),
            std::cmp::Ordering::Less => None,
        }
    }

    /// Exact limit as x -> ∞ when finite.
    pub fn limit_at_infinity(&self) -> Option<Rational> {
        let (dn, dd) = self.degrees();
        if self.is_zero() || dn < dd {
            Some(Rational::zero())
        } else if dn == dd {
            Some(self.num.leading() / self.den.leading())
        } else {
            None
        }
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({ "num": self.num, "den": self.den })
    }
}

impl fmt::Debug for RationalFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({:?}) / ({:?})", self.num, self.den)
    }
}

impl From<Polynomial> for RationalFunction {
    fn from(p: Polynomial) -> Self {
        RationalFunction::from_poly(p)
    }
}

pub fn rf_int(c: i64) -> RationalFunction {
    RationalFunction::constant(int(c))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::rat;

    #[test]
    fn differentiate_example() {
        let p = Polynomial::from_ints(&[0, 1, -1]);
        assert_eq!(p.derivative(), Polynomial::from_ints(&[1, -2]));
    }

    #[test]
    fn gcd_reduce_example() {
        let f = RationalFunction::new(Polynomial::from_ints(&[-1, 0, 1]), Polynomial::from_ints(&[-1, 1])).unwrap();
        assert_eq!(f.num(), &Polynomial::from_ints(&[1, 1]));
        assert_eq!(f.den(), &Polynomial::one());
    }

    #[test]
    fn compose_chebyshev() {
        let t3 = cheb_generate(3);
        assert_eq!(t3, Polynomial::from_ints(&[0, -3, 0, 4]));
        let t = Polynomial::x();
        assert_eq!(t3.compose(&t), t3);
        assert_eq!(cheb_generate(1), Polynomial::x());
        assert_eq!(cheb_odd_factor(1), Polynomial::from_ints(&[-3, 4]));
    }

    #[test]
    fn chebyshev_odd_identity() {
        for n in 0..=14 {
            let lhs = cheb_generate(2 * n + 1);
            let rhs = &Polynomial::x() * &cheb_odd_factor(n).in_square();
            assert!((&lhs - &rhs).is_zero());
        }
    }

    #[test]
    fn chebyshev_endpoint_values() {
        for n in 0..30 {
            let t = cheb_generate(n);
            assert_eq!(t.eval(&int(1)), int(1));
            let at0 = t.eval(&int(0));
            if n % 2 == 1 {
                assert!(at0.is_zero());
            } else {
                assert_eq!(at0, int(if (n / 2) % 2 == 0 { 1 } else { -1 }));
            }
        }
    }

    #[test]
    fn bernstein_examples() {
        let b = to_bernstein(&Polynomial::from_ints(&[0, 1, -1]), None);
        assert_eq!(b.degree, 2);
        assert_eq!(b.coefficients, vec![int(0), int(1), int(0)]);
        let b = to_bernstein(&Polynomial::one(), None);
        assert_eq!(b.degree, 0);
        assert_eq!(b.coefficients, vec![int(1)]);
        assert!(denom_positive(&BernsteinForm::new(vec![int(1), int(2), int(3)]).unwrap()));
        assert!(!denom_positive(&BernsteinForm::new(vec![int(0), int(0)]).unwrap()));
    }

    #[test]
    fn bernstein_elevation_preserves_value() {
        let p = Polynomial::from_rationals(&[rat(1, 3), rat(-2, 5), rat(7, 2), rat(-1, 7)]);
        let b = to_bernstein(&p, None);
        let e = b.elevate_to(9);
        assert_eq!(from_bernstein(&e), p);
        assert_eq!(to_bernstein(&p, Some(9)), e);
    }

    #[test]
    fn gcd_routes_agree() {
        let a = &Polynomial::from_ints(&[1, 2, 3]) * &Polynomial::from_ints(&[-5, 0, 7, 1]);
        let b = &Polynomial::from_ints(&[1, 2, 3]) * &Polynomial::from_ints(&[4, 4, 1]);
        let g = a.gcd(&b);
        assert_eq!(g, Polynomial::from_ints(&[1, 2, 3]).monic());
        assert_eq!(a.gcd_subresultant(&b), g);
        let c = Polynomial::from_ints(&[2, 0, 1]);
        assert_eq!(c.gcd(&Polynomial::from_ints(&[4, 0, 1])), Polynomial::one());
    }

    #[test]
    fn gcd_with_large_common_factor() {
        let f = Polynomial::from_ints(&[2, 0, 1]).pow(40);
        let a = &f * &Polynomial::from_ints(&[3, 1]);
        let b = &f * &Polynomial::from_ints(&[-7, 0, 0, 1]);
        assert_eq!(a.gcd(&b), f.monic());
    }

    #[test]
    fn rational_function_arithmetic() {
        let x = RationalFunction::x();
        let one = RationalFunction::one();
        let f = one.div(&x.add(&one)).unwrap();
        let g = one.div(&x.sub(&one)).unwrap();
        let s = f.add(&g);
        // 1/(x+1) + 1/(x-1) = 2x/(x^2-1)
        let expect = RationalFunction::new(Polynomial::from_ints(&[0, 2]), Polynomial::from_ints(&[-1, 0, 1])).unwrap();
        assert_eq!(s, expect);
        assert_eq!(s.derivative().eval(&int(2)).unwrap(), rat(-10, 9));
        let h = f.mul(&x.add(&one));
        assert_eq!(h, one);
    }

    #[test]
    fn compose_and_parity() {
        let f = RationalFunction::new(Polynomial::from_ints(&[1, 0, 1]), Polynomial::from_ints(&[2, 0, 1])).unwrap();
        let g = f.even_to_square().unwrap();
        assert_eq!(g.compose(&RationalFunction::from_poly(Polynomial::from_ints(&[0, 0, 1]))).unwrap(), f);
        assert_eq!(f.limit_at_infinity(), Some(int(1)));
        assert_eq!(f.value_at_zero(), Some(rat(1, 2)));
    }

    #[test]
    fn exact_division() {
        let a = Polynomial::from_rationals(&[rat(1, 2), rat(3, 4)]);
        let b = &a * &Polynomial::from_rationals(&[rat(-2, 3), rat(5, 7), int(1)]);
        assert_eq!(b.exact_div(&a).unwrap(), Polynomial::from_rationals(&[rat(-2, 3), rat(5, 7), int(1)]));
        assert!(b.exact_div(&Polynomial::from_ints(&[1, 1, 1, 1])).is_none());
    }
}
