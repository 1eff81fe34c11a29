//! Expression trees consumed by the range bounder, charts, and the
//! exponential ledger `e^{k y²/4} · r(y)` used to cancel Gaussian growth
//! symbolically before anything is bounded.

use serde::{Deserialize, Serialize};

use crate::exact::{rat_serde, Rational};
use crate::poly::{PolyError, Polynomial, RationalFunction};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ExprError {
    #[error("exponent ledgers differ ({0} vs {1}); sum is not a single exp-rational term")]
    LedgerMismatch(i32, i32),
    #[error("nonzero residual exponent ledger {0} in {1}")]
    ResidualLedger(i32, String),
    #[error(transparent)]
    Poly(#[from] PolyError),
}

/// Compactification of `y ∈ [0, ∞)` or a plain sub-box of it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Chart {
    /// t = y²/(2+y²)
    T2,
    /// m = y²/(4+y²)
    T4,
    /// w = y/(y+2)
    W,
    /// y itself
    Y,
    /// u = 1/y
    U,
}

impl Chart {
    pub fn name(&self) -> &'static str {
        match self {
            Chart::T2 => "t2",
            Chart::T4 => "t4",
            Chart::W => "w",
            Chart::Y => "y",
            Chart::U => "u",
        }
    }

    pub fn parse(s: &str) -> Option<Chart> {
        Some(match s {
            "t2" | "t" => Chart::T2,
            "t4" | "m" => Chart::T4,
            "w" => Chart::W,
            "y" => Chart::Y,
            "u" => Chart::U,
            _ => return None,
        })
    }

    /// Approximate y for a chart coordinate (display only).
    pub fn to_y_f64(&self, s: f64) -> f64 {
        match self {
            Chart::T2 => (2.0 * s / (1.0 - s)).sqrt(),
            Chart::T4 => (4.0 * s / (1.0 - s)).sqrt(),
            Chart::W => 2.0 * s / (1.0 - s),
            Chart::Y => s,
            Chart::U => 1.0 / s,
        }
    }

    /// Rewrites `f(y)` as a rational function of the chart variable. The
    /// square-root charts need `f` even.
    pub fn pull_back(&self, f: &RationalFunction) -> Result<RationalFunction, PolyError> {
        let s = RationalFunction::x();
        let one = RationalFunction::one();
        match self {
            Chart::Y => Ok(f.clone()),
            Chart::U => f.compose(&one.div(&s)?),
            // y = 2w/(1-w)
            Chart::W => f.compose(&s.scale(&crate::exact::int(2)).div(&one.sub(&s))?),
            // y² = 2t/(1-t), y² = 4m/(1-m)
            Chart::T2 | Chart::T4 => {
                let even = f
                    .even_to_square()
                    .ok_or_else(|| PolyError::Malformed("square-root chart needs an even function".into()))?;
                let c = crate::exact::int(if *self == Chart::T2 { 2 } else { 4 });
                even.compose(&s.scale(&c).div(&one.sub(&s))?)
            }
        }
    }
}

/// `e^{k y²/4} · r(y)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExpRational {
    pub ledger: i32,
    pub r: RationalFunction,
}

impl ExpRational {
    pub fn new(ledger: i32, r: RationalFunction) -> Self {
        ExpRational { ledger, r }
    }

    pub fn plain(r: RationalFunction) -> Self {
        ExpRational { ledger: 0, r }
    }

    pub fn add(&self, o: &ExpRational) -> Result<ExpRational, ExprError> {
        if self.r.is_zero() {
            return Ok(o.clone());
        }
        if o.r.is_zero() {
            return Ok(self.clone());
        }
        if self.ledger != o.ledger {
            return Err(ExprError::LedgerMismatch(self.ledger, o.ledger));
        }
        Ok(ExpRational::new(self.ledger, self.r.add(&o.r)))
    }

    pub fn sub(&self, o: &ExpRational) -> Result<ExpRational, ExprError> {
        self.add(&o.neg())
    }

    pub fn neg(&self) -> ExpRational {
        ExpRational::new(self.ledger, self.r.neg())
    }

    pub fn mul(&self, o: &ExpRational) -> ExpRational {
        ExpRational::new(self.ledger + o.ledger, self.r.mul(&o.r))
    }

    pub fn mul_rf(&self, o: &RationalFunction) -> ExpRational {
        ExpRational::new(self.ledger, self.r.mul(o))
    }

    pub fn div(&self, o: &ExpRational) -> Result<ExpRational, ExprError> {
        Ok(ExpRational::new(self.ledger - o.ledger, self.r.div(&o.r)?))
    }

    pub fn scale(&self, c: &Rational) -> ExpRational {
        ExpRational::new(self.ledger, self.r.scale(c))
    }

    /// (e^{k y²/4} r)' = e^{k y²/4} (r' + k y r / 2)
    pub fn derivative(&self) -> ExpRational {
        let mut d = self.r.derivative();
        if self.ledger != 0 {
            let f = RationalFunction::from_poly(Polynomial::monomial(Rational::new(self.ledger.into(), 2.into()), 1));
            d = d.add(&self.r.mul(&f));
        }
        ExpRational::new(self.ledger, d)
    }

    /// The rational part, provided the ledger cancelled.
    pub fn normalized(&self, what: &str) -> Result<RationalFunction, ExprError> {
        if self.ledger != 0 {
            return Err(ExprError::ResidualLedger(self.ledger, what.to_string()));
        }
        Ok(self.r.clone())
    }
}

/// Evaluation tree over one chart variable.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "op", rename_all = "snake_case")]
pub enum Expr {
    Const {
        #[serde(with = "rat_serde")]
        value: Rational,
    },
    Var,
    Poly {
        p: Polynomial,
    },
    Ratio {
        num: Polynomial,
        den: Polynomial,
    },
    Add {
        a: Box<Expr>,
        b: Box<Expr>,
    },
    Sub {
        a: Box<Expr>,
        b: Box<Expr>,
    },
    Mul {
        a: Box<Expr>,
        b: Box<Expr>,
    },
    Div {
        a: Box<Expr>,
        b: Box<Expr>,
    },
    Neg {
        a: Box<Expr>,
    },
    Exp {
        a: Box<Expr>,
    },
    Sqrt {
        a: Box<Expr>,
    },
    /// An unknown quantity known only through certified pointwise brackets.
    Atom {
        name: String,
        lo: Box<Expr>,
        hi: Box<Expr>,
    },
}

impl Expr {
    pub fn constant(c: Rational) -> Expr {
        Expr::Const { value: c }
    }

    pub fn poly(p: Polynomial) -> Expr {
        Expr::Poly { p }
    }

    pub fn ratio(f: &RationalFunction) -> Expr {
        if f.den().degree() == 0 {
            let p = f.num().scale(&f.den().coeff(0).recip());
            return Expr::Poly { p };
        }
        Expr::Ratio { num: f.num().clone(), den: f.den().clone() }
    }

    pub fn add(a: Expr, b: Expr) -> Expr {
        Expr::Add { a: Box::new(a), b: Box::new(b) }
    }

    pub fn sub(a: Expr, b: Expr) -> Expr {
        Expr::Sub { a: Box::new(a), b: Box::new(b) }
    }

    pub fn mul(a: Expr, b: Expr) -> Expr {
        Expr::Mul { a: Box::new(a), b: Box::new(b) }
    }

    pub fn div(a: Expr, b: Expr) -> Expr {
        Expr::Div { a: Box::new(a), b: Box::new(b) }
    }

    pub fn neg(a: Expr) -> Expr {
        Expr::Neg { a: Box::new(a) }
    }

    pub fn exp(a: Expr) -> Expr {
        Expr::Exp { a: Box::new(a) }
    }

    pub fn sqrt(a: Expr) -> Expr {
        Expr::Sqrt { a: Box::new(a) }
    }

    pub fn atom(name: &str, lo: Expr, hi: Expr) -> Expr {
        Expr::Atom { name: name.to_string(), lo: Box::new(lo), hi: Box::new(hi) }
    }

    /// `e^{k y²/4} r(y)` as a tree in the y-chart.
    pub fn from_exp_rational(e: &ExpRational) -> Expr {
        let body = Expr::ratio(&e.r);
        if e.ledger == 0 {
            return body;
        }
        let arg = Polynomial::monomial(Rational::new(e.ledger.into(), 4.into()), 2);
        Expr::mul(Expr::exp(Expr::poly(arg)), body)
    }

    pub fn node_count(&self) -> usize {
        match self {
            Expr::Const { .. } | Expr::Var | Expr::Poly { .. } | Expr::Ratio { .. } => 1,
            Expr::Add { a, b } | Expr::Sub { a, b } | Expr::Mul { a, b } | Expr::Div { a, b } => {
                1 + a.node_count() + b.node_count()
            }
            Expr::Neg { a } | Expr::Exp { a } | Expr::Sqrt { a } => 1 + a.node_count(),
            Expr::Atom { lo, hi, .. } => 1 + lo.node_count() + hi.node_count(),
        }
    }
}

/// A bounded quantity: tree, chart and the residual exponent ledger
/// (must be 0 before bounding).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NamedExpression {
    pub id: String,
    pub chart: Chart,
    pub body: Expr,
    #[serde(default)]
    pub exp_ledger: i32,
}

impl NamedExpression {
    pub fn new(id: &str, chart: Chart, body: Expr) -> Self {
        NamedExpression { id: id.to_string(), chart, body, exp_ledger: 0 }
    }

    /// Rational function of y pulled back to `chart`.
    pub fn rational(id: &str, chart: Chart, f: &RationalFunction) -> Result<Self, PolyError> {
        Ok(NamedExpression::new(id, chart, Expr::ratio(&chart.pull_back(f)?)))
    }

    pub fn check_ledger(&self) -> Result<(), ExprError> {
        if self.exp_ledger != 0 {
            return Err(ExprError::ResidualLedger(self.exp_ledger, self.id.clone()));
        }
        Ok(())
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("expression serializes")
    }

    pub fn from_json(s: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{int, rat};

    #[test]
    fn ledger_arithmetic() {
        let a = ExpRational::new(1, RationalFunction::x());
        let b = ExpRational::new(-1, RationalFunction::one());
        assert_eq!(a.mul(&b).ledger, 0);
        assert!(a.add(&b).is_err());
        // (e^{y²/4} y)' = e^{y²/4}(1 + y²/2)
        let d = a.derivative();
        assert_eq!(d.r, RationalFunction::from_poly(Polynomial::from_rationals(&[int(1), int(0), rat(1, 2)])));
        assert!(a.normalized("a").is_err());
    }

    #[test]
    fn chart_pull_backs() {
        // f = y²/(2+y²) is the identity in the t2 chart
        let f = RationalFunction::new(Polynomial::from_ints(&[0, 0, 1]), Polynomial::from_ints(&[2, 0, 1])).unwrap();
        assert_eq!(Chart::T2.pull_back(&f).unwrap(), RationalFunction::x());
        // y/(y+2) is the identity in the w chart
        let g = RationalFunction::new(Polynomial::from_ints(&[0, 1]), Polynomial::from_ints(&[2, 1])).unwrap();
        assert_eq!(Chart::W.pull_back(&g).unwrap(), RationalFunction::x());
        assert!(Chart::T2.pull_back(&g).is_err());
        let h = RationalFunction::x();
        let u = Chart::U.pull_back(&h).unwrap();
        assert_eq!(u.eval(&rat(1, 4)).unwrap(), int(4));
    }

    #[test]
    fn expression_json_round_trip() {
        let e = NamedExpression::new(
            "demo",
            Chart::Y,
            Expr::mul(Expr::Var, Expr::sub(Expr::constant(int(1)), Expr::Var)),
        );
        let back = NamedExpression::from_json(&e.to_json()).unwrap();
        assert_eq!(back, e);
    }
}
