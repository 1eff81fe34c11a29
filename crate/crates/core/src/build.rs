//! Exact symbolic construction of every bounded quantity: the profile and
//! its residual, the weights, the approximate fundamental system with its
//! Dawson enclosure, P/Q, the ratio factors, the envelope expressions near
//! the origin, the gauge-mode positivity form and the far-field gap.
//!
//! Conventions: `S2 = √(2+y²)`, `S4 = √(4+y²)`. The weights carry a factor
//! `1/√2` that is not in the tower, so `p_i = p̂_i/√2` and only the hatted
//! forms are built symbolically; the `√2` re-enters as a `Sqrt` node or as a
//! certified rational bound.

use num_traits::{One, Signed, Zero};

use crate::exact::{int, iv_arctan_pi, iv_sqrt, rat, ArithError, Interval, Rational};
use crate::expr::{Chart, ExpRational, Expr, ExprError, NamedExpression};
use crate::poly::{
    cheb_even_factor, cheb_generate, cheb_odd_factor, to_bernstein, BernsteinForm, PolyError, Polynomial,
    RationalFunction,
};
use crate::tables::Tables;
use crate::tower::{radicand2, radicand4, TowerElement, TowerError};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum BuildError {
    #[error("surviving radical in {0}: {1}")]
    SurvivingRadical(String, String),
    #[error("singular tail system")]
    SingularTails,
    #[error("negative factored prefactor")]
    NegativePrefactor,
    #[error("identity check failed: {0}")]
    Identity(String),
    #[error(transparent)]
    Expr(#[from] ExprError),
    #[error(transparent)]
    Poly(#[from] PolyError),
    #[error(transparent)]
    Tower(#[from] TowerError),
    #[error(transparent)]
    Arith(#[from] ArithError),
}

/// Dawson truncation tolerance `c_ε`.
pub fn c_eps() -> Rational {
    rat(1, 500)
}

/// Partial denominators of the Dawson continued fraction used for `ṽ0`.
pub const DAWSON_DENOMINATORS: usize = 13;
/// ... and for the `v0` factor inside `w̃0`.
pub const W0_DAWSON_DENOMINATORS: usize = 3;

/// Degree of the gauge-mode Bernstein forms.
pub const GAUGE_DEGREE: usize = 59;

fn rf(p: &[i64]) -> RationalFunction {
    RationalFunction::from_poly(Polynomial::from_ints(p))
}

fn rfq(n: &[i64], d: &[i64]) -> RationalFunction {
    RationalFunction::new(Polynomial::from_ints(n), Polynomial::from_ints(d)).expect("nonzero denominator")
}

fn y() -> RationalFunction {
    RationalFunction::x()
}

fn rational_part(what: &str, t: TowerElement) -> Result<RationalFunction, BuildError> {
    t.into_rational().map_err(|e| match e {
        TowerError::SurvivingRadical(r) => BuildError::SurvivingRadical(what.into(), r),
        other => other.into(),
    })
}

/// Multiplier of `S2` when `t = c2·S2`.
fn s2_part(what: &str, t: &TowerElement) -> Result<RationalFunction, BuildError> {
    if !(t.c1.is_zero() && t.c4.is_zero() && t.c24.is_zero()) {
        return Err(BuildError::SurvivingRadical(what.into(), "expected a pure S2 multiple".into()));
    }
    Ok(t.c2.clone())
}

// ---------------------------------------------------------------- profile

#[derive(Debug, Clone)]
pub struct ProfileAnsatz {
    pub coefficients: Vec<Rational>,
    /// `g0 = x·Q(x²)`, `x = y/S2`.
    pub q: Polynomial,
    pub g0: TowerElement,
    pub g0_sq: RationalFunction,
    pub sin2f: TowerElement,
    pub cos2f: RationalFunction,
    pub sin_sq: RationalFunction,
}

/// `g0 = ½ Σ (f0)_n T_{2n+1}(y/S2)`; see the decisions ledger for the ½.
pub fn build_profile(tables: &Tables) -> ProfileAnsatz {
    let mut q = Polynomial::zero();
    for (n, c) in tables.f0.iter().enumerate() {
        q = &q + &cheb_odd_factor(n).scale(&(c / int(2)));
    }
    // x = y S2/(2+y²), x² = y²/(2+y²)
    let t = rfq(&[0, 0, 1], &[2, 0, 1]);
    let qt = RationalFunction::from_poly(q.clone()).compose(&t).expect("polynomial composition");
    let g_over_s2 = y().div(&radicand2()).unwrap().mul(&qt);
    let z = RationalFunction::zero();
    let g0 = TowerElement::new(z.clone(), g_over_s2, z.clone(), z);
    let g0_sq = g0.mul(&g0).c1;
    let one = RationalFunction::one();
    let den = one.add(&g0_sq);
    let den2 = den.mul(&den);
    let sin2f = g0.scale(&one.sub(&g0_sq).scale(&int(4)).div(&den2).unwrap());
    let cos2f = g0_sq.mul(&g0_sq).sub(&g0_sq.scale(&int(6))).add(&one).div(&den2).unwrap();
    let sin_sq = g0_sq.scale(&int(4)).div(&den2).unwrap();
    ProfileAnsatz { coefficients: tables.f0.clone(), q, g0, g0_sq, sin2f, cos2f, sin_sq }
}

impl ProfileAnsatz {
    /// `Q` as a polynomial in x: `g0 = G(x)`, `G(x) = x Q(x²)`.
    pub fn g_of_x(&self) -> Polynomial {
        &self.q.in_square() * &Polynomial::x()
    }

    /// Exact `g0(∞) = G(1) = ½ Σ (f0)_n`.
    pub fn g_at_infinity(&self) -> Rational {
        self.q.eval(&Rational::one())
    }
}

// ---------------------------------------------------------------- weights

/// `p̂1 = S2/y`, `p̂2 = (2+y²)² S2/(3y(4+y²))`, `p̂3 = (2+y²) S2/2`.
#[derive(Debug, Clone)]
pub struct WeightFamily {
    pub p1: TowerElement,
    pub p2: TowerElement,
    pub p3: TowerElement,
}

pub fn build_weights() -> WeightFamily {
    let s2 = TowerElement::s2();
    let a = radicand2();
    WeightFamily {
        p1: s2.scale(&y().recip().unwrap()),
        p2: s2.scale(&a.mul(&a).div(&y().mul(&radicand4()).scale(&int(3))).unwrap()),
        p3: s2.scale(&a.scale(&rat(1, 2))),
    }
}

/// `𝓛0 δ = −δ″ − (2/y − y/2)δ′ + (2/y²)δ` on tower elements.
pub fn free_operator(d: &TowerElement) -> TowerElement {
    let c1 = rfq(&[4, 0, -1], &[0, 2]);
    let c0 = rfq(&[2], &[0, 0, 1]);
    let d1 = d.derivative();
    d1.derivative().neg().sub(&d1.scale(&c1)).add(&d.scale(&c0))
}

fn free_operator_exp(d: &ExpRational) -> ExpRational {
    let c1 = rfq(&[4, 0, -1], &[0, 2]);
    let c0 = rfq(&[2], &[0, 0, 1]);
    let d1 = d.derivative();
    let d2 = d1.derivative();
    ExpRational::new(d.ledger, d2.r.neg().sub(&d1.r.mul(&c1)).add(&d.r.mul(&c0)))
}

/// `(1/p1)′ = 1/p3` and `𝓛0(1/p1) = 1/p2`, as exact zeros.
pub fn check_weight_identities(w: &WeightFamily) -> Result<(), BuildError> {
    let one = TowerElement::one();
    let inv1 = one.div(&w.p1)?;
    let r1 = inv1.derivative().sub(&one.div(&w.p3)?);
    if !r1.is_zero() {
        return Err(BuildError::Identity("(1/p1)' - 1/p3".into()));
    }
    let r2 = free_operator(&inv1).sub(&one.div(&w.p2)?);
    if !r2.is_zero() {
        return Err(BuildError::Identity("L0(1/p1) - 1/p2".into()));
    }
    Ok(())
}

// ---------------------------------------------------------------- residual

/// `p̂2·R(f̃0)` as a rational function of y (even).
pub fn residual_rational(p: &ProfileAnsatz) -> Result<RationalFunction, BuildError> {
    let g = &p.g0;
    let g1 = g.derivative();
    let g2 = g1.derivative();
    let one = RationalFunction::one();
    let den = one.add(&p.g0_sq);
    let two_y = rfq(&[4, 0, -1], &[0, 2]);
    // g″ − 2g g′²/(1+g²) + (2/y − y/2) g′ − 2g(1−g²)/((1+g²)y²)
    let inner = g2
        .sub(&g.mul(&g1).mul(&g1).scale(&den.recip()?.scale(&int(2))))
        .add(&g1.scale(&two_y))
        .sub(&g.scale(&one.sub(&p.g0_sq).scale(&int(2)).div(&den.mul(&rf(&[0, 0, 1])))?));
    let r = inner.scale(&den.recip()?.scale(&int(2)));
    let w = build_weights();
    rational_part("p2 R", w.p2.mul(&r))
}

/// `C1:residual`: `p2·R(f̃0) = (1/√2)·U(t)/V(t)`, t = y²/(2+y²).
pub fn build_residual(p: &ProfileAnsatz) -> Result<NamedExpression, BuildError> {
    let r = residual_rational(p)?;
    let rt = Chart::T2.pull_back(&r)?;
    Ok(NamedExpression::new(
        "C1:residual",
        Chart::T2,
        Expr::mul(Expr::sqrt(Expr::constant(rat(1, 2))), Expr::ratio(&rt)),
    ))
}

/// `C2:sinfactor` = `2p2/(p1²y²)·sin(2f̃0)` (√2 · rational) and
/// `C3:weightfactor` = `4p2/(3p1³y²)` = `8(2+y²)/(9(4+y²))`.
pub fn build_nonlinearity_factors(p: &ProfileAnsatz) -> Result<(NamedExpression, NamedExpression), BuildError> {
    let w = build_weights();
    let y2 = rf(&[0, 0, 1]);
    // 2p2/(p1²y²) = 2·(p̂2/√2)/(p̂1²/2·y²) = √2·2p̂2/(p̂1²y²)
    let f2 = w.p2.scale_q(&int(2)).div(&w.p1.mul(&w.p1).scale(&y2))?.mul(&p.sin2f);
    let f2 = rational_part("C2", f2)?;
    // 4p2/(3p1³y²) = 4(p̂2/√2)/(3 p̂1³/(2√2) y²) = 8p̂2/(3p̂1³y²)
    let f3 = w.p2.scale_q(&int(8)).div(&w.p1.pow(3).scale(&y2.scale(&int(3))))?;
    let f3 = rational_part("C3", f3)?;
    if f3 != rfq(&[16, 0, 8], &[36, 0, 9]) {
        return Err(BuildError::Identity("weight factor closed form".into()));
    }
    let c2 = NamedExpression::new(
        "C2:sinfactor",
        Chart::T2,
        Expr::mul(Expr::sqrt(Expr::constant(int(2))), Expr::ratio(&Chart::T2.pull_back(&f2)?)),
    );
    let c3 = NamedExpression::rational("C3:weightfactor", Chart::T2, &f3)?;
    Ok((c2, c3))
}

// ---------------------------------------------------------------- fundamental system

/// `D_K(z) = z/(1+2z² − 4z²/(3+2z² − 8z²/(5+2z² − …)))` with `k`
/// partial denominators.
pub fn dawson_cf(k: usize) -> RationalFunction {
    assert!(k >= 1);
    let z2 = rf(&[0, 0, 1]);
    let mut acc = RationalFunction::zero();
    for j in (1..k).rev() {
        let d = rf(&[2 * j as i64 + 1, 0, 2]).sub(&acc);
        acc = z2.scale(&int(4 * j as i64)).div(&d).unwrap();
    }
    y().div(&rf(&[1, 0, 2]).sub(&acc)).unwrap()
}

/// `e^{y²/4}·3(−y + (2+y²)D_K(y/2))/y²`.
pub fn v0_truncated(k: usize) -> ExpRational {
    let d = dawson_cf(k).compose(&rfq(&[0, 1], &[2])).unwrap();
    let a = y().neg().add(&radicand2().mul(&d));
    ExpRational::new(1, a.scale(&int(3)).div(&rf(&[0, 0, 1])).unwrap())
}

#[derive(Debug, Clone)]
pub struct FundamentalSystem {
    /// `1 + 2/y²`
    pub v1: RationalFunction,
    /// `ṽ0` (lower Dawson bracket)
    pub v0_tilde: ExpRational,
    pub w0: ExpRational,
    pub w1: RationalFunction,
    /// `S(y) = Σ (w0)_n T_{2n}(y/S4)`, rational since only x² enters.
    pub s: RationalFunction,
    /// `T(z) = Σ (w1)_n T_n(z)` as a polynomial in `z = (y−2)/(y+2)`.
    pub t_z: Polynomial,
    /// Stored and solved coefficients (w1)_0..(w1)_37.
    pub w1_coeffs: Vec<Rational>,
    pub tails: [Rational; 2],
}

/// `z = (y−2)/(y+2)`
pub fn z_of_y() -> RationalFunction {
    rfq(&[-2, 1], &[2, 1])
}

fn cheb_series(c: &[Rational]) -> Polynomial {
    let mut p = Polynomial::zero();
    for (n, v) in c.iter().enumerate() {
        p = &p + &cheb_generate(n).scale(v);
    }
    p
}

/// Solves for (w1)_36, (w1)_37 from `d/dy T(z(y)) = 0` at y = 0 and at
/// y = ∞ (in u = 1/y). With `dz/dy|_0 = 1` and `dz/du|_0 = −4` both are
/// `T′(∓1) = 0`.
pub fn solve_tails(stored: &[Rational]) -> Result<[Rational; 2], BuildError> {
    let n = stored.len();
    let dt = |z: i64, c: &[Rational]| cheb_series(c).derivative().eval(&int(z));
    let unit = |k: usize| {
        let mut v = vec![Rational::zero(); k + 1];
        v[k] = Rational::one();
        v
    };
    // rows: endpoint z = −1 (y = 0), z = 1 (y = ∞)
    let mut m = [[Rational::zero(), Rational::zero()], [Rational::zero(), Rational::zero()]];
    let mut rhs = [Rational::zero(), Rational::zero()];
    for (row, z) in [-1i64, 1].into_iter().enumerate() {
        rhs[row] = -dt(z, stored);
        m[row][0] = dt(z, &unit(n));
        m[row][1] = dt(z, &unit(n + 1));
    }
    let det = &m[0][0] * &m[1][1] - &m[0][1] * &m[1][0];
    if det.is_zero() {
        return Err(BuildError::SingularTails);
    }
    let a = (&rhs[0] * &m[1][1] - &m[0][1] * &rhs[1]) / &det;
    let b = (&m[0][0] * &rhs[1] - &rhs[0] * &m[1][0]) / &det;
    Ok([a, b])
}

/// The two endpoint conditions `d/dy (w̃1/v1)` at y = 0 and (in u) at y = ∞,
/// computed by full composition rather than the chain rule.
pub fn tail_conditions(fs: &FundamentalSystem) -> Result<[Rational; 2], BuildError> {
    let h = RationalFunction::from_poly(fs.t_z.clone()).compose(&z_of_y())?;
    let at0 = h.derivative().value_at_zero().ok_or(BuildError::Identity("pole at 0".into()))?;
    let hu = Chart::U.pull_back(&h)?;
    let at_inf = hu.derivative().value_at_zero().ok_or(BuildError::Identity("pole at ∞".into()))?;
    Ok([at0, at_inf])
}

pub fn build_fundamental_system(tables: &Tables) -> Result<FundamentalSystem, BuildError> {
    let v1 = rfq(&[2, 0, 1], &[0, 0, 1]);
    let v0_tilde = v0_truncated(DAWSON_DENOMINATORS);
    let v0_hat = v0_truncated(W0_DAWSON_DENOMINATORS);
    // T_{2n}(x) = E_n(x²), x² = y²/(4+y²)
    let mut e = Polynomial::zero();
    for (n, c) in tables.w0.iter().enumerate() {
        e = &e + &cheb_even_factor(n).scale(c);
    }
    let s = RationalFunction::from_poly(e).compose(&rfq(&[0, 0, 1], &[4, 0, 1]))?;
    let w0 = v0_hat.mul_rf(&s);
    let tails = solve_tails(&tables.w1)?;
    let mut w1_coeffs = tables.w1.clone();
    w1_coeffs.extend(tails.iter().cloned());
    let t_z = cheb_series(&w1_coeffs);
    let w1 = v1.mul(&RationalFunction::from_poly(t_z.clone()).compose(&z_of_y())?);
    Ok(FundamentalSystem { v1, v0_tilde, w0, w1, s, t_z, w1_coeffs, tails })
}

impl FundamentalSystem {
    /// Exact `w̃0′(0)` (the exponential factor is 1 there).
    pub fn w0_prime_at_zero(&self) -> Result<Rational, BuildError> {
        self.w0.derivative().r.value_at_zero().ok_or(BuildError::Identity("w0' has a pole at 0".into()))
    }

    /// `W̃ = e^{−y²/4}(w̃0 w̃1′ − w̃0′ w̃1)`.
    pub fn wronskian_normalized(&self) -> Result<RationalFunction, BuildError> {
        let w1 = ExpRational::plain(self.w1.clone());
        let w = self.w0.mul(&w1.derivative()).sub(&self.w0.derivative().mul(&w1))?;
        Ok(ExpRational::new(w.ledger - 1, w.r).normalized("W~")?)
    }

    /// `h1(∞) = T(1) = Σ (w1)_n`.
    pub fn h1_at_infinity(&self) -> Rational {
        self.w1_coeffs.iter().fold(Rational::zero(), |a, b| a + b)
    }
}

// ---------------------------------------------------------------- Dawson enclosure

/// `ε = 1 − (ṽ0/v1)′·v1²y²e^{−y²/4}/6`, exp-normalized.
pub fn epsilon_rational(fs: &FundamentalSystem) -> Result<RationalFunction, BuildError> {
    let ratio = fs.v0_tilde.mul_rf(&fs.v1.recip()?).derivative();
    let f = fs.v1.mul(&fs.v1).mul(&rf(&[0, 0, 1])).scale(&rat(1, 6));
    let prod = ExpRational::new(ratio.ledger - 1, ratio.r.mul(&f));
    Ok(RationalFunction::one().sub(&prod.normalized("epsilon")?))
}

pub fn build_epsilon_check(fs: &FundamentalSystem) -> Result<NamedExpression, BuildError> {
    Ok(NamedExpression::rational("C10:dawson-eps", Chart::T4, &epsilon_rational(fs)?)?)
}

/// `1/(1 + (cε/(1−cε))(v1′/v1)(ṽ0/ṽ0′))`: upper bound of `ṽ0′/v0′`.
pub fn derivative_correction(fs: &FundamentalSystem) -> Result<RationalFunction, BuildError> {
    let c = c_eps();
    let k = &c / (Rational::one() - &c);
    let l1 = fs.v1.derivative().div(&fs.v1)?;
    let r = fs.v0_tilde.div(&fs.v0_tilde.derivative())?.normalized("v0/v0'")?;
    Ok(RationalFunction::one().add(&l1.mul(&r).scale(&k)).recip()?)
}

/// `1/(1 + 6cε e^{y²/4}/(v1 y² ṽ0′))`: lower bound of `ṽ0′/v0′`.
pub fn derivative_correction_lower(fs: &FundamentalSystem) -> Result<RationalFunction, BuildError> {
    let d = fs.v0_tilde.derivative();
    let e = ExpRational::new(1, RationalFunction::constant(c_eps() * int(6)));
    let q = e.div(&d.mul_rf(&fs.v1.mul(&rf(&[0, 0, 1]))))?.normalized("lower correction")?;
    Ok(RationalFunction::one().add(&q).recip()?)
}

/// Positivity prerequisites of the Dawson brackets, as even functions of y
/// in the m-chart, certified on the open chart interval: `ṽ0 > 0`,
/// `ṽ0′ > 0`, the denominator of the derivative correction (which makes
/// `v0′ ≥ ṽ0′/corr > 0`), and `1/v1 > 0`. `w̃0` itself changes sign
/// (its Chebyshev factor tends to Σ(w0)_n < 0), which the ratio bounds do
/// not need.
pub fn build_nonnegativity(fs: &FundamentalSystem) -> Result<Vec<NamedExpression>, BuildError> {
    let strip = |e: &ExpRational| ExpRational::new(e.ledger - 1, e.r.clone());
    let v0 = strip(&fs.v0_tilde).normalized("v0~")?.mul(&y().recip()?);
    let dv0 = strip(&fs.v0_tilde.derivative()).normalized("v0~'")?;
    let corr_den = derivative_correction(fs)?.recip()?;
    let out = [
        ("C6:pos-v0", v0),
        ("C6:pos-dv0", dv0),
        ("C6:pos-corr", corr_den),
        ("C6:pos-v1", fs.v1.recip()?),
    ];
    out.iter().map(|(id, f)| Ok(NamedExpression::rational(id, Chart::T4, f)?)).collect()
}

/// `(p2/p3)·P` and `(p2/p1)·Q` with `P = W̃′/W̃ + 2/y`, `Q = Q0 − Ṽ0`.
pub fn pq_rational(p: &ProfileAnsatz, fs: &FundamentalSystem) -> Result<(RationalFunction, RationalFunction), BuildError> {
    let wt = fs.wronskian_normalized()?;
    let pp = wt.derivative().div(&wt)?.add(&rfq(&[2], &[0, 1]));
    let w1 = ExpRational::plain(fs.w1.clone());
    let l0w0 = free_operator_exp(&fs.w0);
    let l0w1 = free_operator_exp(&w1);
    let w = ExpRational::new(1, wt.clone());
    let q0 = l0w1.mul(&fs.w0.derivative()).sub(&l0w0.mul(&w1.derivative()))?.div(&w)?.normalized("Q0")?;
    // Ṽ0 = −4 sin² f̃0 / y²
    let v_pot = p.sin_sq.scale(&int(-4)).div(&rf(&[0, 0, 1]))?;
    let qq = q0.sub(&v_pot);
    let p2_p3 = rfq(&[4, 0, 2], &[0, 12, 0, 3]);
    let p2_p1 = rfq(&[4, 0, 4, 0, 1], &[12, 0, 3]);
    Ok((pp.mul(&p2_p3), qq.mul(&p2_p1)))
}

pub fn build_pq(p: &ProfileAnsatz, fs: &FundamentalSystem) -> Result<(NamedExpression, NamedExpression), BuildError> {
    let (pw, qw) = pq_rational(p, fs)?;
    Ok((
        NamedExpression::rational("C8:P-weighted", Chart::W, &pw)?,
        NamedExpression::rational("C8:Q-weighted", Chart::W, &qw)?,
    ))
}

/// h0, dh0 (with the Dawson brackets as atoms), h1, dh1 and the Wronskian
/// ratio `W(v0,v1)/W(w̃0,w̃1) = (−6/y²)/W̃`.
pub fn build_ratio_factors(fs: &FundamentalSystem) -> Result<Vec<NamedExpression>, BuildError> {
    let ce = c_eps();
    let m = Chart::T4;
    let h0 = fs.w0.div(&fs.v0_tilde)?.normalized("h0")?;
    let h0_expr = Expr::mul(
        Expr::ratio(&m.pull_back(&h0)?),
        Expr::atom("v0~/v0", Expr::constant(Rational::one() - &ce), Expr::constant(Rational::one())),
    );
    let dh0 = fs.w0.derivative().div(&fs.v0_tilde.derivative())?.normalized("dh0")?;
    let lo = m.pull_back(&derivative_correction_lower(fs)?)?;
    let hi = m.pull_back(&derivative_correction(fs)?)?;
    let dh0_expr =
        Expr::mul(Expr::ratio(&m.pull_back(&dh0)?), Expr::atom("v0~'/v0'", Expr::ratio(&lo), Expr::ratio(&hi)));
    let h1 = fs.w1.div(&fs.v1)?;
    let dh1 = fs.w1.derivative().div(&fs.v1.derivative())?;
    let wr = rfq(&[-6], &[0, 0, 1]).div(&fs.wronskian_normalized()?)?;
    Ok(vec![
        NamedExpression::new("C6:h0", m, h0_expr),
        NamedExpression::new("C6:dh0", m, dh0_expr),
        NamedExpression::rational("C6:h1", Chart::W, &h1)?,
        NamedExpression::rational("C6:dh1", Chart::W, &dh1)?,
        NamedExpression::rational("C7:wronskian-ratio", Chart::W, &wr)?,
    ])
}

// ---------------------------------------------------------------- near-origin envelopes

/// Envelope radius of the near-origin ball.
pub fn near_origin_radius() -> Rational {
    rat(3, 100)
}

fn exp_y2_over_4() -> Expr {
    Expr::exp(Expr::poly(Polynomial::monomial(rat(1, 4), 2)))
}

fn sqrt_half_radicand() -> Expr {
    // √(1 + y²/2) = S2/√2
    Expr::sqrt(Expr::poly(Polynomial::from_rationals(&[int(1), int(0), rat(1, 2)])))
}

/// y-chart expressions: `C11:p1w0`, `C11:p3w0'` (sup on [0,3]), `C14:q3`,
/// `C14:dq3` (evaluated at y = 3), `C15:q-pos` (lower q envelope on [0,1]),
/// `C15:dq-neg` (upper q′ envelope on [1,3]).
pub fn build_near_origin_exprs(fs: &FundamentalSystem) -> Result<Vec<NamedExpression>, BuildError> {
    let strip = |e: &ExpRational, what: &str| ExpRational::new(e.ledger - 1, e.r.clone()).normalized(what);
    let w0 = strip(&fs.w0, "w0")?;
    let dw0 = strip(&fs.w0.derivative(), "w0'")?;
    let r = near_origin_radius();
    let half = Polynomial::from_rationals(&[int(1), int(0), rat(1, 2)]);
    let inv_y = y().recip()?;
    // p1 w̃0 = √(1+y²/2) e^{y²/4} w0/y
    let p1w0 = Expr::mul(sqrt_half_radicand(), Expr::mul(exp_y2_over_4(), Expr::ratio(&w0.mul(&inv_y))));
    // p3 w̃0′ = (1+y²/2)^{3/2} e^{y²/4} w0′
    let p3dw0 = Expr::mul(
        sqrt_half_radicand(),
        Expr::mul(exp_y2_over_4(), Expr::ratio(&dw0.mul_poly(&half))),
    );
    // q envelopes: q = W0/y; 0.03/(p1 y) = 0.03/√(1+y²/2)
    let q_core = Expr::mul(exp_y2_over_4(), Expr::ratio(&w0.mul(&inv_y)));
    let shift = Expr::div(Expr::constant(r.clone()), sqrt_half_radicand());
    let q_hi = Expr::add(q_core.clone(), shift.clone());
    let q_lo = Expr::sub(q_core, shift);
    // q′ upper: (w̃0′ + r/p3)/y − (w̃0 − r/p1)/y²
    //         = e^{y²/4}(w0′/y − w0/y²) + r(2 + y²/2)/(y(1+y²/2)√(1+y²/2))
    let core = dw0.mul(&inv_y).sub(&w0.mul(&inv_y).mul(&inv_y));
    let tail = RationalFunction::from_poly(Polynomial::from_rationals(&[int(2), int(0), rat(1, 2)]))
        .div(&RationalFunction::from_poly(half.clone()).mul(&y()))?
        .scale(&r);
    let dq_hi = Expr::add(
        Expr::mul(exp_y2_over_4(), Expr::ratio(&core)),
        Expr::div(Expr::ratio(&tail), sqrt_half_radicand()),
    );
    let ne = |id: &str, e: Expr| NamedExpression::new(id, Chart::Y, e);
    Ok(vec![
        ne("C11:p1w0", p1w0),
        ne("C11:p3w0'", p3dw0),
        ne("C14:q3", q_hi),
        ne("C14:dq3", dq_hi.clone()),
        ne("C15:q-pos", q_lo),
        ne("C15:dq-neg", dq_hi),
    ])
}

// ---------------------------------------------------------------- gauge mode

#[derive(Debug, Clone)]
pub struct GaugeForms {
    pub numerator: BernsteinForm,
    pub denominator: BernsteinForm,
    /// Degrees before elevation.
    pub minimal_degrees: (usize, usize),
    /// Rational upper bound used for √2.
    pub sqrt2_upper: Rational,
}

/// `y f̃0′ − 5·10⁻⁴ y/p3 ≥ x(1−x²)·N(x²)/D(x²)` with N, D returned in the
/// basis `u^i(1−u)^{59−i}`, `u = x²`.
pub fn build_gauge_positivity(p: &ProfileAnsatz) -> Result<GaugeForms, BuildError> {
    let one = RationalFunction::one();
    // y f̃0′ = 2y g0′/(1+g0²)
    let yf = p.g0.derivative().scale(&y().scale(&int(2)).div(&one.add(&p.g0_sq))?);
    // y/p̂3 = 2y/(2+y²)^{3/2}, which is exactly x(1−x²)
    let w = build_weights();
    let pref = TowerElement::y().div(&w.p3)?;
    let xs = TowerElement::y().div(&TowerElement::s2())?;
    let expect = xs.mul(&TowerElement::one().sub(&xs.mul(&xs)));
    if pref != expect {
        return Err(BuildError::Identity("y/p3 = x(1-x²)".into()));
    }
    let ratio = rational_part("gauge", yf.div(&pref)?)?;
    let f_t = Chart::T2.pull_back(&ratio)?;
    // x(1−x²) ≥ 0 on the chart: the quotient must not have flipped sign
    if s2_part("prefactor", &pref)?.num().leading().is_negative() {
        return Err(BuildError::NegativePrefactor);
    }
    let sqrt2 = iv_sqrt(&Interval::point(int(2)), 64)?;
    let c = rat(5, 10000) * sqrt2.hi();
    let g = f_t.sub(&RationalFunction::constant(c));
    let (dn, dd) = g.degrees();
    let n = GAUGE_DEGREE.max(dn).max(dd);
    Ok(GaugeForms {
        numerator: to_bernstein(g.num(), Some(n)),
        denominator: to_bernstein(g.den(), Some(n)),
        minimal_degrees: (dn, dd),
        sqrt2_upper: sqrt2.hi().clone(),
    })
}

// ---------------------------------------------------------------- far field

#[derive(Debug, Clone)]
pub struct FarfieldGap {
    /// Σ (f0)_n
    pub sum: Rational,
    /// g0(∞)
    pub g_inf: Rational,
    /// Enclosure of 2·arctan(g0(∞)) − π/2.
    pub gap: Interval,
    /// Enclosure of 0.56 + √2·5·10⁻⁴.
    pub threshold: Interval,
    pub certified: bool,
}

pub fn farfield_gap_for(g_inf: &Rational, sum: Rational) -> FarfieldGap {
    let (atan, pi) = iv_arctan_pi(&Interval::point(g_inf.clone()), 40);
    let gap = atan.scale(&int(2)).sub(&pi.scale(&rat(1, 2)));
    let sqrt2 = iv_sqrt(&Interval::point(int(2)), 64).expect("positive");
    let threshold = sqrt2.scale(&rat(5, 10000)).add(&Interval::point(rat(56, 100)));
    let certified = gap.lo() > threshold.hi();
    FarfieldGap { sum, g_inf: g_inf.clone(), gap, threshold, certified }
}

pub fn build_farfield_gap(p: &ProfileAnsatz) -> FarfieldGap {
    let sum = p.coefficients.iter().fold(Rational::zero(), |a, b| a + b);
    farfield_gap_for(&p.g_at_infinity(), sum)
}

// ---------------------------------------------------------------- Wronskian identity

/// `e^{y²/4}(a(y) + b(y)·D(y/2))` with D treated as a symbol, `D′(z) = 1 − 2zD`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DawsonLinear {
    pub a: RationalFunction,
    pub b: RationalFunction,
}

impl DawsonLinear {
    pub fn derivative(&self) -> DawsonLinear {
        // d/dy D(y/2) = ½ − (y/2) D; the (y/2)·b·D terms cancel against the exponential
        let half_y = rfq(&[0, 1], &[2]);
        DawsonLinear {
            a: self.a.derivative().add(&self.b.scale(&rat(1, 2))).add(&self.a.mul(&half_y)),
            b: self.b.derivative(),
        }
    }
}

/// `v0 = e^{y²/4}·3(−y + (2+y²)D(y/2))/y²`.
pub fn v0_symbolic() -> DawsonLinear {
    let y2 = rf(&[0, 0, 1]);
    DawsonLinear { a: rfq(&[-3], &[0, 1]), b: radicand2().scale(&int(3)).div(&y2).unwrap() }
}

/// `W(v0, v1)·e^{−y²/4}` computed symbolically; the D-coefficient must vanish.
pub fn wronskian_v0_v1() -> Result<RationalFunction, BuildError> {
    let v0 = v0_symbolic();
    let d0 = v0.derivative();
    let v1 = rfq(&[2, 0, 1], &[0, 0, 1]);
    let dv1 = v1.derivative();
    let dcoef = v0.b.mul(&dv1).sub(&d0.b.mul(&v1));
    if !dcoef.is_zero() {
        return Err(BuildError::Identity("Dawson term survives in W(v0,v1)".into()));
    }
    Ok(v0.a.mul(&dv1).sub(&d0.a.mul(&v1)))
}

/// `W(v0,v1) = −6y⁻²e^{y²/4}` and `𝓛0 v0 = 𝓛0 v1 = 0`, all exact.
pub fn check_free_system() -> Result<(), BuildError> {
    if wronskian_v0_v1()? != rfq(&[-6], &[0, 0, 1]) {
        return Err(BuildError::Identity("W(v0,v1) = -6 y^-2 e^{y²/4}".into()));
    }
    let v0 = v0_symbolic();
    let d1 = v0.derivative();
    let d2 = d1.derivative();
    let c1 = rfq(&[4, 0, -1], &[0, 2]);
    let c0 = rfq(&[2], &[0, 0, 1]);
    // the e^{y²/4} factor is common to all three terms
    let la = d2.a.neg().sub(&d1.a.mul(&c1)).add(&v0.a.mul(&c0));
    let lb = d2.b.neg().sub(&d1.b.mul(&c1)).add(&v0.b.mul(&c0));
    if !(la.is_zero() && lb.is_zero()) {
        return Err(BuildError::Identity("L0 v0 = 0".into()));
    }
    let v1 = TowerElement::rational(rfq(&[2, 0, 1], &[0, 0, 1]));
    if !free_operator(&v1).is_zero() {
        return Err(BuildError::Identity("L0 v1 = 0".into()));
    }
    Ok(())
}
