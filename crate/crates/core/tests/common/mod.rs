//! Shared test support: an independent fixed-point oracle and per-sample
//! property checkers used by the property, oracle and acceptance suites.
#![allow(dead_code)]

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use hmcert::build::{FundamentalSystem, ProfileAnsatz};
use hmcert::exact::{int, is_reduced, iv_ops, rat, Interval, IvOp, Rational};
use hmcert::poly::{from_bernstein, to_bernstein, Polynomial, RationalFunction};
use hmcert::tables::Tables;
use hmcert::tower::TowerElement;

// ------------------------------------------------------------ fixed point

/// Binary fixed point with `FX_BITS` fractional bits. Every operation is
/// truncated, so results carry a few ulps of error; that is far below the
/// tolerances the oracles are used with.
pub const FX_BITS: u32 = 400;

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct Fx(pub BigInt);

impl Fx {
    pub fn from_rational(r: &Rational) -> Fx {
        Fx((r.numer() << FX_BITS) / r.denom())
    }
    pub fn int(n: i64) -> Fx {
        Fx(BigInt::from(n) << FX_BITS)
    }
    pub fn to_rational(&self) -> Rational {
        Rational::new(self.0.clone(), BigInt::one() << FX_BITS)
    }
    pub fn add(&self, o: &Fx) -> Fx {
        Fx(&self.0 + &o.0)
    }
    pub fn sub(&self, o: &Fx) -> Fx {
        Fx(&self.0 - &o.0)
    }
    pub fn neg(&self) -> Fx {
        Fx(-&self.0)
    }
    pub fn mul(&self, o: &Fx) -> Fx {
        Fx((&self.0 * &o.0) >> FX_BITS)
    }
    pub fn div(&self, o: &Fx) -> Fx {
        Fx((&self.0 << FX_BITS) / &o.0)
    }
    pub fn muli(&self, k: i64) -> Fx {
        Fx(&self.0 * k)
    }
    pub fn divi(&self, k: i64) -> Fx {
        Fx(&self.0 / k)
    }
    pub fn sqrt(&self) -> Fx {
        assert!(!self.0.is_negative());
        Fx((&self.0 << FX_BITS).sqrt())
    }
    pub fn abs(&self) -> Fx {
        Fx(self.0.abs())
    }
    /// `|self − o| < 2^-bits`
    pub fn close(&self, o: &Fx, bits: u32) -> bool {
        (&self.0 - &o.0).abs() < (BigInt::one() << (FX_BITS - bits))
    }

    /// Taylor series after halving the argument `k` times.
    pub fn exp(&self) -> Fx {
        let k = 12;
        let x = Fx(&self.0 >> k);
        let (mut sum, mut term) = (Fx::int(1), Fx::int(1));
        for n in 1..80 {
            term = term.mul(&x).divi(n);
            sum = sum.add(&term);
        }
        for _ in 0..k {
            sum = sum.mul(&sum);
        }
        sum
    }

    /// Three half-angle reductions, then the alternating series.
    pub fn atan(&self) -> Fx {
        let one = Fx::int(1);
        let mut x = self.clone();
        for _ in 0..3 {
            x = x.div(&one.add(&one.add(&x.mul(&x)).sqrt()));
        }
        let x2 = x.mul(&x);
        let (mut sum, mut pow) = (Fx::int(0), x.clone());
        for k in 0..120i64 {
            let t = pow.divi(2 * k + 1);
            sum = if k % 2 == 0 { sum.add(&t) } else { sum.sub(&t) };
            pow = pow.mul(&x2);
        }
        sum.muli(8)
    }

    pub fn sin(&self) -> Fx {
        let x2 = self.mul(self);
        let (mut sum, mut term) = (self.clone(), self.clone());
        for k in 1..150i64 {
            term = term.mul(&x2).divi((2 * k) * (2 * k + 1)).neg();
            sum = sum.add(&term);
        }
        sum
    }
}

/// Dawson's integral `e^{−z²}∫₀^z e^{t²}dt` from `terms` Taylor terms,
/// `Σ (−1)^n 2^n z^{2n+1}/(2n+1)!!`.
pub fn dawson_taylor(z: &Fx, terms: usize) -> Fx {
    let z2 = z.mul(z).muli(2);
    let (mut sum, mut term) = (z.clone(), z.clone());
    for n in 1..terms as i64 {
        term = term.mul(&z2).divi(2 * n + 1).neg();
        sum = sum.add(&term);
    }
    sum
}

/// `3(−y + (2+y²)D(y/2))/y²`, the free solution `v0` without its
/// exponential factor, and its derivative via `D′ = 1 − 2zD`.
pub fn v0_oracle(y: &Fx) -> (Fx, Fx) {
    let z = y.divi(2);
    let d = dawson_taylor(&z, 200);
    let dp = Fx::int(1).sub(&z.mul(&d).muli(2));
    let y2 = y.mul(y);
    let s = Fx::int(2).add(&y2);
    let inner = y.neg().add(&s.mul(&d));
    let a = inner.muli(3).div(&y2);
    let inner_p = Fx::int(-1).add(&y.mul(&d).muli(2)).add(&s.mul(&dp).divi(2));
    let ap = inner_p.muli(3).div(&y2).sub(&inner.muli(6).div(&y2.mul(y)));
    (a, ap)
}

/// `e^{−y²/4}·W(v0, v1) + 6/y²`, which must vanish; `v1 = 1 + 2/y²`.
pub fn wronskian_defect(y: &Fx) -> Fx {
    let (a, ap) = v0_oracle(y);
    let y2 = y.mul(y);
    let v1 = Fx::int(1).add(&Fx::int(2).div(&y2));
    let v1p = Fx::int(-4).div(&y2.mul(y));
    // v0 = e^{y²/4} a  ⇒  v0′ = e^{y²/4}(a′ + y a/2)
    let w = a.mul(&v1p).sub(&ap.add(&y.mul(&a).divi(2)).mul(&v1));
    w.add(&Fx::int(6).div(&y2))
}

/// Profile generator `½ Σ (f0)_n T_{2n+1}(y/√(2+y²))` by the Chebyshev
/// recurrence.
pub fn g0_oracle(f0: &[Rational], y: &Fx) -> Fx {
    g0_oracle_x(f0, &y.div(&Fx::int(2).add(&y.mul(y)).sqrt()))
}

/// The same series in the variable `x = y/√(2+y²)`.
pub fn g0_oracle_x(f0: &[Rational], x: &Fx) -> Fx {
    let x = x.clone();
    let (mut t_prev, mut t) = (Fx::int(1), x.clone());
    let mut sum = Fx::int(0);
    for (n, c) in f0.iter().enumerate() {
        sum = sum.add(&Fx::from_rational(c).mul(&t));
        if n + 1 < f0.len() {
            // T_{k+2} = 2x T_{k+1} − T_k, twice
            for _ in 0..2 {
                let next = x.mul(&t).muli(2).sub(&t_prev);
                t_prev = t;
                t = next;
            }
        }
    }
    sum.divi(2)
}

// ------------------------------------------------------------ generators

pub fn rng(seed: u64) -> StdRng {
    StdRng::seed_from_u64(seed)
}

pub fn rand_rational(r: &mut StdRng, mag: i64) -> Rational {
    let d = r.gen_range(1..=997i64);
    rat(r.gen_range(-mag * d..=mag * d), d)
}

pub fn rand_interval(r: &mut StdRng) -> Interval {
    Interval::spanning(rand_rational(r, 10), rand_rational(r, 10))
}

/// A point `lo + (hi − lo)·k/n`.
pub fn point_in(x: &Interval, k: i64, n: i64) -> Rational {
    x.lo() + x.width() * rat(k, n)
}

pub fn rand_point(r: &mut StdRng, x: &Interval) -> Rational {
    point_in(x, r.gen_range(0..=1000), 1000)
}

/// Sub-interval between two random points.
pub fn rand_sub(r: &mut StdRng, x: &Interval) -> Interval {
    Interval::spanning(rand_point(r, x), rand_point(r, x))
}

pub fn rand_poly(r: &mut StdRng, max_deg: usize) -> Polynomial {
    let deg = r.gen_range(0..=max_deg);
    let c: Vec<Rational> = (0..=deg).map(|_| rand_rational(r, 5)).collect();
    Polynomial::from_rationals(&c)
}

pub fn rand_tower(r: &mut StdRng) -> TowerElement {
    let mut part = || {
        let c: Vec<i64> = (0..r.gen_range(1..=3)).map(|_| r.gen_range(-4..=4)).collect();
        let p = RationalFunction::from_poly(Polynomial::from_ints(&c));
        if r.gen_bool(0.3) {
            p.div(&RationalFunction::from_poly(Polynomial::from_ints(&[1, 0, 1]))).unwrap()
        } else {
            p
        }
    };
    TowerElement::new(part(), part(), part(), part())
}

// ------------------------------------------------------------ checkers

pub type Check = Result<(), String>;

const OPS: [IvOp; 4] = [IvOp::Add, IvOp::Sub, IvOp::Mul, IvOp::Div];

fn scalar(op: IvOp, p: &Rational, q: &Rational) -> Rational {
    match op {
        IvOp::Add => p + q,
        IvOp::Sub => p - q,
        IvOp::Mul => p * q,
        IvOp::Div => p / q,
    }
}

/// `p ∈ x`, `q ∈ y` ⇒ `p∘q ∈ x∘y` for all four ops; endpoints reduced.
pub fn soundness_case(x: &Interval, y: &Interval, p: &Rational, q: &Rational) -> Check {
    for op in OPS {
        if op == IvOp::Div && y.contains_zero() {
            if iv_ops(op, x, y).is_ok() {
                return Err(format!("division by {y} accepted"));
            }
            continue;
        }
        let z = iv_ops(op, x, y).map_err(|e| e.to_string())?;
        let v = scalar(op, p, q);
        if !z.contains(&v) {
            return Err(format!("{op:?}: {p} ∘ {q} = {v} not in {x} ∘ {y} = {z}"));
        }
        for e in [z.lo(), z.hi()] {
            if !is_reduced(e) || !e.denom().is_positive() {
                return Err(format!("{op:?}: endpoint {e} not canonical"));
            }
        }
    }
    Ok(())
}

pub fn monotonicity_case(x: &Interval, xs: &Interval, y: &Interval, ys: &Interval) -> Check {
    for op in OPS {
        if op == IvOp::Div && y.contains_zero() {
            continue;
        }
        let big = iv_ops(op, x, y).map_err(|e| e.to_string())?;
        let small = iv_ops(op, xs, ys).map_err(|e| e.to_string())?;
        if !small.subset_of(&big) {
            return Err(format!("{op:?}: {small} not inside {big}"));
        }
    }
    Ok(())
}

/// Power and Bernstein evaluation agree exactly; the basis change inverts.
pub fn bernstein_case(p: &Polynomial, points: &[Rational]) -> Check {
    let b = to_bernstein(p, None);
    let b2 = to_bernstein(p, Some(p.degree() + 3));
    if from_bernstein(&b) != *p || from_bernstein(&b2) != *p {
        return Err(format!("round trip lost {p:?}"));
    }
    for x in points {
        let v = p.eval(x);
        if b.eval(x) != v || b2.eval(x) != v {
            return Err(format!("{p:?} at {x}: power {v}, bernstein {}", b.eval(x)));
        }
    }
    Ok(())
}

pub fn tower_case(a: &TowerElement, b: &TowerElement, c: &TowerElement) -> Check {
    if a.mul(b) != b.mul(a) {
        return Err("mul not commutative".into());
    }
    if a.mul(b).mul(c) != a.mul(&b.mul(c)) {
        return Err("mul not associative".into());
    }
    if a.mul(&b.add(c)) != a.mul(b).add(&a.mul(c)) {
        return Err("mul not distributive".into());
    }
    Ok(())
}

/// `ṽ0 ≤ v0 ≤ ṽ0/(1 − c_ε)` against the 200-term Taylor oracle; both sides
/// carry the same `e^{y²/4}`, so only the rational parts are compared.
pub fn dawson_bracket_case(fs: &FundamentalSystem, y: &Rational) -> Check {
    let lower = Fx::from_rational(&fs.v0_tilde.r.eval(y).map_err(|e| e.to_string())?);
    let (exact, _) = v0_oracle(&Fx::from_rational(y));
    let upper = lower.mul(&Fx::from_rational(&(Rational::one() / (Rational::one() - rat(1, 500)))));
    let slack = Fx(BigInt::one() << (FX_BITS - 300));
    if lower.sub(&slack) > exact || exact > upper.add(&slack) {
        return Err(format!("y = {y}: bracket violated"));
    }
    Ok(())
}

pub fn wronskian_case(y: &Rational) -> Check {
    let d = wronskian_defect(&Fx::from_rational(y));
    // 2^-100 < 10^-30
    if !d.close(&Fx::int(0), 100) {
        return Err(format!("y = {y}: defect {}", hmcert::exact::to_f64(&d.to_rational())));
    }
    Ok(())
}

/// `sin(2f̃0)` with `f̃0 = 2 arctan g0`, computed by series, against the
/// closed form carried by the profile.
pub fn trig_case(tables: &Tables, profile: &ProfileAnsatz, y: &Rational) -> Check {
    let g = g0_oracle(&tables.f0, &Fx::from_rational(y));
    let s = g.atan().muli(4).sin();
    let lib = profile.sin2f.eval(y, 200).map_err(|e| e.to_string())?;
    let mid = Fx::from_rational(&lib.mid());
    if !mid.close(&s, 100) {
        return Err(format!("y = {y}: series {} vs closed form {}", hmcert::exact::to_f64(&s.to_rational()), lib));
    }
    let libg = profile.g0.eval(y, 200).map_err(|e| e.to_string())?;
    if !Fx::from_rational(&libg.mid()).close(&g, 100) {
        return Err(format!("y = {y}: g0 disagrees"));
    }
    Ok(())
}

/// Random rational in (0, hi) with denominator 1000.
pub fn rand_positive(r: &mut StdRng, hi: i64) -> Rational {
    rat(r.gen_range(1..hi * 1000), 1000)
}

// ------------------------------------------------------------ suites

/// Runs `n` seeded samples of a checker; returns the number run.
pub fn run_samples(n: usize, seed: u64, mut f: impl FnMut(&mut StdRng) -> Check) -> Result<usize, String> {
    let mut r = rng(seed);
    for i in 0..n {
        f(&mut r).map_err(|e| format!("sample {i}: {e}"))?;
    }
    Ok(n)
}

pub fn soundness_suite(n: usize) -> Result<usize, String> {
    run_samples(n, 1, |r| {
        let (x, y) = (rand_interval(r), rand_interval(r));
        let (p, q) = (rand_point(r, &x), rand_point(r, &y));
        soundness_case(&x, &y, &p, &q)
    })
}

pub fn monotonicity_suite(n: usize) -> Result<usize, String> {
    run_samples(n, 2, |r| {
        let (x, y) = (rand_interval(r), rand_interval(r));
        let (xs, ys) = (rand_sub(r, &x), rand_sub(r, &y));
        monotonicity_case(&x, &xs, &y, &ys)
    })
}

pub fn bernstein_suite(functions: usize, points: usize) -> Result<usize, String> {
    run_samples(functions, 3, |r| {
        let p = rand_poly(r, 10);
        let pts: Vec<Rational> = (0..points).map(|_| rand_rational(r, 2)).collect();
        bernstein_case(&p, &pts)
    })
}

pub fn tower_suite(n: usize) -> Result<usize, String> {
    run_samples(n, 4, |r| {
        let (a, b, c) = (rand_tower(r), rand_tower(r), rand_tower(r));
        tower_case(&a, &b, &c)
    })
}

pub fn dawson_suite(fs: &FundamentalSystem, n: usize) -> Result<usize, String> {
    run_samples(n, 5, |r| dawson_bracket_case(fs, &rand_positive(r, 8)))
}

pub fn wronskian_suite(n: usize) -> Result<usize, String> {
    run_samples(n, 6, |r| wronskian_case(&rand_positive(r, 8)))
}

pub fn trig_suite(tables: &Tables, profile: &ProfileAnsatz, n: usize) -> Result<usize, String> {
    run_samples(n, 7, |r| trig_case(tables, profile, &rand_positive(r, 10)))
}

pub fn ints(v: &[i64]) -> Vec<Rational> {
    v.iter().map(|&k| int(k)).collect()
}

pub fn zero() -> Rational {
    Rational::zero()
}
