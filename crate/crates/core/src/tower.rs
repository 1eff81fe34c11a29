//! The field Q(y)(S2, S4) with S2 = √(2+y²), S4 = √(4+y²).
//!
//! Elements are `c1 + c2·S2 + c4·S4 + c24·S2·S4` with reduced rational-function
//! components, so equality is componentwise.

use crate::exact::{iv_sqrt, ArithError, Interval, Rational};
use crate::poly::{PolyError, Polynomial, RationalFunction};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum TowerError {
    #[error("division by a tower element of zero norm")]
    ZeroNorm,
    #[error("radical survives where a rational function was required: {0}")]
    SurvivingRadical(String),
    #[error(transparent)]
    Poly(#[from] PolyError),
    #[error(transparent)]
    Arith(#[from] ArithError),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct TowerElement {
    pub c1: RationalFunction,
    pub c2: RationalFunction,
    pub c4: RationalFunction,
    pub c24: RationalFunction,
}

/// 2 + y²
pub fn radicand2() -> RationalFunction {
    RationalFunction::from_poly(Polynomial::from_ints(&[2, 0, 1]))
}

/// 4 + y²
pub fn radicand4() -> RationalFunction {
    RationalFunction::from_poly(Polynomial::from_ints(&[4, 0, 1]))
}

impl TowerElement {
    pub fn new(c1: RationalFunction, c2: RationalFunction, c4: RationalFunction, c24: RationalFunction) -> Self {
        TowerElement { c1, c2, c4, c24 }
    }

    pub fn rational(c: RationalFunction) -> Self {
        let z = RationalFunction::zero();
        TowerElement::new(c, z.clone(), z.clone(), z)
    }

    pub fn constant(c: Rational) -> Self {
        TowerElement::rational(RationalFunction::constant(c))
    }

    pub fn zero() -> Self {
        TowerElement::rational(RationalFunction::zero())
    }

    pub fn one() -> Self {
        TowerElement::rational(RationalFunction::one())
    }

    pub fn y() -> Self {
        TowerElement::rational(RationalFunction::x())
    }

    pub fn s2() -> Self {
        let z = RationalFunction::zero();
        TowerElement::new(z.clone(), RationalFunction::one(), z.clone(), z)
    }

    pub fn s4() -> Self {
        let z = RationalFunction::zero();
        TowerElement::new(z.clone(), z.clone(), RationalFunction::one(), z)
    }

    pub fn is_zero(&self) -> bool {
        self.c1.is_zero() && self.c2.is_zero() && self.c4.is_zero() && self.c24.is_zero()
    }

    /// The rational component, failing if any radical part is nonzero.
    pub fn into_rational(self) -> Result<RationalFunction, TowerError> {
        if !(self.c2.is_zero() && self.c4.is_zero() && self.c24.is_zero()) {
            let which: Vec<&str> = [("S2", &self.c2), ("S4", &self.c4), ("S2*S4", &self.c24)]
                .iter()
                .filter(|(_, c)| !c.is_zero())
                .map(|(n, _)| *n)
                .collect();
            return Err(TowerError::SurvivingRadical(which.join(", ")));
        }
        Ok(self.c1)
    }

    pub fn add(&self, o: &TowerElement) -> TowerElement {
        TowerElement::new(self.c1.add(&o.c1), self.c2.add(&o.c2), self.c4.add(&o.c4), self.c24.add(&o.c24))
    }

    pub fn neg(&self) -> TowerElement {
        TowerElement::new(self.c1.neg(), self.c2.neg(), self.c4.neg(), self.c24.neg())
    }

    pub fn sub(&self, o: &TowerElement) -> TowerElement {
        self.add(&o.neg())
    }

    pub fn scale(&self, r: &RationalFunction) -> TowerElement {
        TowerElement::new(self.c1.mul(r), self.c2.mul(r), self.c4.mul(r), self.c24.mul(r))
    }

    pub fn scale_q(&self, c: &Rational) -> TowerElement {
        TowerElement::new(self.c1.scale(c), self.c2.scale(c), self.c4.scale(c), self.c24.scale(c))
    }

    pub fn mul(&self, o: &TowerElement) -> TowerElement {
        let (a, b) = (radicand2(), radicand4());
        let m = |x: &RationalFunction, y: &RationalFunction| x.mul(y);
        let c1 = m(&self.c1, &o.c1)
            .add(&m(&self.c2, &o.c2).mul(&a))
            .add(&m(&self.c4, &o.c4).mul(&b))
            .add(&m(&self.c24, &o.c24).mul(&a).mul(&b));
        let c2 = m(&self.c1, &o.c2).add(&m(&self.c2, &o.c1)).add(&m(&self.c4, &o.c24).add(&m(&self.c24, &o.c4)).mul(&b));
        let c4 = m(&self.c1, &o.c4).add(&m(&self.c4, &o.c1)).add(&m(&self.c2, &o.c24).add(&m(&self.c24, &o.c2)).mul(&a));
        let c24 = m(&self.c1, &o.c24).add(&m(&self.c24, &o.c1)).add(&m(&self.c2, &o.c4)).add(&m(&self.c4, &o.c2));
        TowerElement::new(c1, c2, c4, c24)
    }

    /// S2 -> -S2.
    pub fn conj2(&self) -> TowerElement {
        TowerElement::new(self.c1.clone(), self.c2.neg(), self.c4.clone(), self.c24.neg())
    }

    /// S4 -> -S4.
    pub fn conj4(&self) -> TowerElement {
        TowerElement::new(self.c1.clone(), self.c2.clone(), self.c4.neg(), self.c24.neg())
    }

    /// Product of all four conjugates, a rational function.
    pub fn norm(&self) -> RationalFunction {
        let z = self.mul(&self.conj2());
        z.mul(&z.conj4()).c1
    }

    pub fn recip(&self) -> Result<TowerElement, TowerError> {
        let z = self.mul(&self.conj2());
        let zc = z.conj4();
        let n = z.mul(&zc).c1;
        if n.is_zero() {
            return Err(TowerError::ZeroNorm);
        }
        let inv = n.recip()?;
        Ok(self.conj2().mul(&zc).scale(&inv))
    }

    pub fn div(&self, o: &TowerElement) -> Result<TowerElement, TowerError> {
        // rational divisors skip the conjugate product
        if o.c2.is_zero() && o.c4.is_zero() && o.c24.is_zero() {
            let inv = o.c1.recip().map_err(|_| TowerError::ZeroNorm)?;
            return Ok(self.scale(&inv));
        }
        Ok(self.mul(&o.recip()?))
    }

    pub fn pow(&self, k: u32) -> TowerElement {
        let mut out = TowerElement::one();
        for _ in 0..k {
            out = out.mul(self);
        }
        out
    }

    /// d/dy using S2' = y/S2 and S4' = y/S4.
    pub fn derivative(&self) -> TowerElement {
        let y = RationalFunction::x();
        let ya = y.div(&radicand2()).unwrap();
        let yb = y.div(&radicand4()).unwrap();
        TowerElement::new(
            self.c1.derivative(),
            self.c2.derivative().add(&self.c2.mul(&ya)),
            self.c4.derivative().add(&self.c4.mul(&yb)),
            self.c24.derivative().add(&self.c24.mul(&ya.add(&yb))),
        )
    }

    /// Interval enclosure of the value at a rational point.
    pub fn eval(&self, y: &Rational, bits: u32) -> Result<Interval, TowerError> {
        let y2 = y * y;
        let s2 = iv_sqrt(&Interval::point(y2.clone() + Rational::from_integer(2.into())), bits)?;
        let s4 = iv_sqrt(&Interval::point(y2 + Rational::from_integer(4.into())), bits)?;
        let pt = |c: &RationalFunction| -> Result<Interval, TowerError> { Ok(Interval::point(c.eval(y)?)) };
        Ok(pt(&self.c1)?.add(&pt(&self.c2)?.mul(&s2)).add(&pt(&self.c4)?.mul(&s4)).add(&pt(&self.c24)?.mul(&s2.mul(&s4))))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{int, rat};

    #[test]
    fn defining_relations() {
        let s2 = TowerElement::s2();
        assert_eq!(s2.mul(&s2), TowerElement::rational(radicand2()));
        let inv = TowerElement::one().div(&s2).unwrap();
        let z = RationalFunction::zero();
        assert_eq!(inv, TowerElement::new(z.clone(), radicand2().recip().unwrap(), z.clone(), z.clone()));
        let d = TowerElement::s4().derivative();
        let expect = RationalFunction::x().div(&radicand4()).unwrap();
        assert_eq!(d, TowerElement::new(z.clone(), z.clone(), expect, z));
    }

    #[test]
    fn reciprocal_of_mixed_element() {
        let e = TowerElement::new(
            RationalFunction::x(),
            RationalFunction::constant(rat(1, 3)),
            RationalFunction::constant(int(-2)),
            RationalFunction::one(),
        );
        let inv = e.recip().unwrap();
        assert_eq!(e.mul(&inv), TowerElement::one());
    }

    #[test]
    fn zero_norm_rejected() {
        assert!(TowerElement::zero().recip().is_err());
    }

    #[test]
    fn radical_check() {
        assert!(TowerElement::s2().into_rational().is_err());
        assert!(TowerElement::s2().mul(&TowerElement::s2()).into_rational().is_ok());
    }

    #[test]
    fn derivative_product_rule() {
        let a = TowerElement::s2().mul(&TowerElement::s4()).add(&TowerElement::y());
        let b = TowerElement::s2().scale(&RationalFunction::x());
        let lhs = a.mul(&b).derivative();
        let rhs = a.derivative().mul(&b).add(&a.mul(&b.derivative()));
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn point_evaluation() {
        let v = TowerElement::s2().eval(&int(7), 64).unwrap();
        assert!(!v.contains(&int(1)));
        assert!(v.lo() * v.lo() <= int(51) && v.hi() * v.hi() >= int(51));
    }
}
