//! Certified range bounding by adaptive bisection.
//!
//! Two evaluation modes share one driver:
//! * tree mode: naive interval evaluation of the expression tree, with
//!   polynomial leaves enclosed by their Bernstein patches;
//! * polynomial mode, for `K·N/D` with `K` a positive constant: the claim is
//!   rewritten into polynomial inequalities `σD > 0`, `σ(βD − N) ≥ 0`, ...
//!   which are certified on Bernstein patches directly.
//!
//! Patches hold integer binomial-basis coefficients over `base·2^shift`, so
//! midpoint subdivision is exact integer de Casteljau.

use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::exact::{fmt_rational, int, iv_exp, iv_sqrt, rat_serde, to_f64, ArithError, Interval, Rational};
use crate::expr::{Chart, Expr, ExprError, NamedExpression};
use crate::poly::{binomial, Polynomial};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum BoundError {
    #[error("indeterminate on box: {0}")]
    Indeterminate(String),
    #[error("empty or inverted domain")]
    BadDomain,
    #[error("target must be positive")]
    NonPositiveTarget,
    #[error(transparent)]
    Expr(#[from] ExprError),
    #[error(transparent)]
    Arith(#[from] ArithError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Budget {
    pub max_depth: u32,
    pub max_boxes: u64,
}

impl Default for Budget {
    fn default() -> Self {
        Budget { max_depth: 48, max_boxes: 1_000_000 }
    }
}

/// Resolution of the transcendental nodes in tree mode.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Precision {
    /// Taylor terms in `exp` enclosures.
    pub exp_terms: usize,
    /// Node results are rounded outward to multiples of `2^-bits`.
    pub bits: u32,
}

impl Default for Precision {
    fn default() -> Self {
        Precision { exp_terms: 24, bits: 96 }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Claim {
    /// `|e| ≤ target`
    SupAbs {
        #[serde(with = "rat_serde")]
        target: Rational,
    },
    /// `e ≥ bound`, or `e > bound` when strict
    AtLeast {
        #[serde(with = "rat_serde")]
        bound: Rational,
        strict: bool,
    },
    /// `e ≤ bound`, or `e < bound` when strict
    AtMost {
        #[serde(with = "rat_serde")]
        bound: Rational,
        strict: bool,
    },
    /// `lo ≤ e ≤ hi`
    Within {
        #[serde(with = "rat_serde")]
        lo: Rational,
        #[serde(with = "rat_serde")]
        hi: Rational,
    },
}

impl Claim {
    pub fn sup(target: Rational) -> Claim {
        Claim::SupAbs { target }
    }

    pub fn positive() -> Claim {
        Claim::AtLeast { bound: Rational::zero(), strict: true }
    }

    pub fn negative() -> Claim {
        Claim::AtMost { bound: Rational::zero(), strict: true }
    }

    fn accepts(&self, h: &Interval) -> bool {
        match self {
            Claim::SupAbs { target } => &h.mag() <= target,
            Claim::AtLeast { bound, strict } => {
                if *strict {
                    h.lo() > bound
                } else {
                    h.lo() >= bound
                }
            }
            Claim::AtMost { bound, strict } => {
                if *strict {
                    h.hi() < bound
                } else {
                    h.hi() <= bound
                }
            }
            Claim::Within { lo, hi } => h.lo() >= lo && h.hi() <= hi,
        }
    }

    /// Amount by which `h` overshoots the claim (positive when it does).
    fn excess(&self, h: &Interval) -> Rational {
        match self {
            Claim::SupAbs { target } => h.mag() - target,
            Claim::AtLeast { bound, .. } => bound - h.lo(),
            Claim::AtMost { bound, .. } => h.hi() - bound,
            Claim::Within { lo, hi } => (lo - h.lo()).max(h.hi() - hi),
        }
    }

    /// A point value that certainly violates the claim.
    fn violated_by(&self, v: &Interval) -> bool {
        match self {
            Claim::SupAbs { target } => v.lo() > target || v.hi() < &-target,
            Claim::AtLeast { bound, strict } => {
                if *strict {
                    v.hi() <= bound
                } else {
                    v.hi() < bound
                }
            }
            Claim::AtMost { bound, strict } => {
                if *strict {
                    v.lo() >= bound
                } else {
                    v.lo() > bound
                }
            }
            Claim::Within { lo, hi } => v.hi() < lo || v.lo() > hi,
        }
    }

    pub fn describe(&self) -> String {
        match self {
            Claim::SupAbs { target } => format!("sup |e| <= {}", fmt_rational(target)),
            Claim::AtLeast { bound, strict } => format!("e {} {}", if *strict { ">" } else { ">=" }, fmt_rational(bound)),
            Claim::AtMost { bound, strict } => format!("e {} {}", if *strict { "<" } else { "<=" }, fmt_rational(bound)),
            Claim::Within { lo, hi } => format!("e in [{}, {}]", fmt_rational(lo), fmt_rational(hi)),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Domain {
    pub chart: Chart,
    #[serde(rename = "box")]
    pub bx: Interval,
}

impl Domain {
    pub fn new(chart: Chart, lo: Rational, hi: Rational) -> Result<Domain, BoundError> {
        Ok(Domain { chart, bx: Interval::new(lo, hi).map_err(|_| BoundError::BadDomain)? })
    }

    pub fn unit(chart: Chart) -> Domain {
        Domain { chart, bx: Interval::from_ints(0, 1) }
    }

    pub fn point(chart: Chart, x: Rational) -> Domain {
        Domain { chart, bx: Interval::point(x) }
    }

    /// Chart coordinate of the local parameter `s ∈ [0, 1]`.
    pub fn at(&self, s: &Rational) -> Rational {
        self.bx.lo() + self.bx.width() * s
    }

    fn sub_box(&self, s: &Interval) -> Interval {
        Interval::spanning(self.at(s.lo()), self.at(s.hi()))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Status {
    Certified,
    Failed {
        witness_box: Interval,
        hull: Option<Interval>,
        #[serde(with = "rat_serde")]
        point: Rational,
        value: Option<Interval>,
    },
    BudgetExhausted {
        worst_box: Interval,
        hull: Option<Interval>,
        reason: String,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Stats {
    pub boxes: u64,
    pub leaves: u64,
    pub max_depth: u32,
    /// Union of accepted leaf hulls (tree mode).
    pub leaf_hull: Option<Interval>,
    /// Range of exact point values at leaf endpoints (polynomial mode);
    /// a lower estimate of the true range, for comparison with targets.
    pub sampled_range: Option<Interval>,
    /// Orders of contact at the domain ends removed before certifying.
    pub endpoint_contact: Option<(usize, usize)>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PrecisionRecord {
    pub method: String,
    pub exp_terms: usize,
    pub bits: u32,
    pub max_depth: u32,
    pub max_boxes: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoundCertificate {
    pub id: String,
    pub claim: Claim,
    pub domain: Domain,
    pub status: Status,
    pub stats: Stats,
    pub precision: PrecisionRecord,
    #[serde(rename = "splitting-trace-digest")]
    pub digest: String,
}

impl BoundCertificate {
    pub fn is_certified(&self) -> bool {
        self.status == Status::Certified
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("certificate serializes")
    }

    /// One-line human summary.
    pub fn summary(&self) -> String {
        let st = match &self.status {
            Status::Certified => "certified".to_string(),
            Status::Failed { point, value, .. } => format!(
                "FAILED at {}={} (y≈{:.6}) value {}",
                self.domain.chart.name(),
                fmt_rational(point),
                self.domain.chart.to_y_f64(to_f64(point)),
                value.as_ref().map(|v| format!("≈{:.6e}", to_f64(&v.mid()))).unwrap_or_else(|| "undefined".into())
            ),
            Status::BudgetExhausted { worst_box, reason, .. } => format!("budget exhausted ({reason}) at {worst_box}"),
        };
        format!("{}: {} on {}{} -- {} [{} boxes, depth {}]", self.id, self.claim.describe(), self.domain.chart.name(), self.domain.bx, st, self.stats.boxes, self.stats.max_depth)
    }
}

// ---------------------------------------------------------------- patches

/// Bernstein patch: value at `s` on the current box is
/// `Σ c_i C(n,i) s^i (1−s)^(n−i) / (base·2^shift)`.
#[derive(Debug, Clone)]
struct Patch {
    c: Vec<BigInt>,
    base: Arc<BigInt>,
    shift: u64,
}

impl Patch {
    /// Patch of `p(s)` on `s ∈ [0, 1]`.
    fn new(p: &Polynomial) -> Patch {
        if p.is_zero() {
            return Patch { c: vec![BigInt::zero()], base: Arc::new(BigInt::one()), shift: 0 };
        }
        let (num, den) = p.int_parts();
        let n = p.degree();
        let binoms: Vec<BigInt> = (0..=n).map(|i| binomial(n, i)).collect();
        let l = binoms.iter().fold(BigInt::one(), |acc, b| num_integer::Integer::lcm(&acc, b));
        let c = (0..=n)
            .map(|i| {
                let a: BigInt = (0..=i).map(|j| &num[j] * binomial(n - j, i - j)).sum();
                a * (&l / &binoms[i])
            })
            .collect();
        let mut out = Patch { c, base: Arc::new(den * &l), shift: 0 };
        out.reduce();
        out
    }

    fn reduce(&mut self) {
        let tz = self.c.iter().filter(|c| !c.is_zero()).filter_map(|c| c.trailing_zeros()).min();
        if let Some(t) = tz {
            let k = t.min(self.shift);
            if k > 0 {
                for c in self.c.iter_mut() {
                    *c = &*c >> k;
                }
                self.shift -= k;
            }
        }
    }

    fn denom(&self) -> BigInt {
        &*self.base << self.shift
    }

    fn range(&self) -> Interval {
        let lo = self.c.iter().min().unwrap().clone();
        let hi = self.c.iter().max().unwrap().clone();
        let d = self.denom();
        Interval::spanning(Rational::new(lo, d.clone()), Rational::new(hi, d))
    }

    /// Midpoint de Casteljau on integers.
    fn split(&self) -> (Patch, Patch) {
        let n = self.c.len() - 1;
        let mut w = self.c.clone();
        let mut left = Vec::with_capacity(n + 1);
        let mut right = vec![BigInt::zero(); n + 1];
        left.push(&w[0] << n);
        right[n] = &w[n] << n;
        for r in 1..=n {
            for i in 0..=n - r {
                w[i] = &w[i] + &w[i + 1];
            }
            left.push(&w[0] << (n - r));
            right[n - r] = &w[n - r] << (n - r);
        }
        let mk = |c| {
            let mut p = Patch { c, base: self.base.clone(), shift: self.shift + n as u64 };
            p.reduce();
            p
        };
        (mk(left), mk(right))
    }

    /// All coefficients ≥ 0 certifies `≥ 0` on the box; positive end values
    /// on top certify `> 0`.
    fn certifies(&self, strict: bool) -> bool {
        self.c.iter().all(|c| !c.is_negative())
            && (!strict || (self.c[0].is_positive() && self.c[self.c.len() - 1].is_positive()))
    }

    /// Normalized smallest coefficient, for ordering only.
    fn slack(&self) -> Rational {
        let min = self.c.iter().min().unwrap().clone();
        let mag = self.c.iter().map(|c| c.abs()).max().unwrap();
        if mag.is_zero() {
            return Rational::zero();
        }
        Rational::new(min, mag)
    }
}

// ---------------------------------------------------------------- compiled trees

#[derive(Debug, Clone)]
enum Node {
    Const(Interval),
    Var,
    Leaf(usize),
    Ratio(usize, usize),
    Add(Box<Node>, Box<Node>),
    Sub(Box<Node>, Box<Node>),
    Mul(Box<Node>, Box<Node>),
    Div(Box<Node>, Box<Node>),
    Neg(Box<Node>),
    Exp(Box<Node>),
    Sqrt(Box<Node>),
    Atom(Box<Node>, Box<Node>),
}

struct Compiler<'a> {
    domain: &'a Domain,
    leaves: Vec<Polynomial>,
    precision: Precision,
}

impl Compiler<'_> {
    fn leaf(&mut self, p: &Polynomial) -> usize {
        let q = p.rescale(self.domain.bx.lo(), self.domain.bx.hi());
        self.leaves.push(q);
        self.leaves.len() - 1
    }

    fn compile(&mut self, e: &Expr) -> Result<Node, BoundError> {
        let b = |s: &mut Self, x: &Expr| -> Result<Box<Node>, BoundError> { Ok(Box::new(s.compile(x)?)) };
        Ok(match e {
            Expr::Const { value } => Node::Const(Interval::point(value.clone())),
            Expr::Var => Node::Var,
            Expr::Poly { p } => Node::Leaf(self.leaf(p)),
            Expr::Ratio { num, den } => {
                let n = self.leaf(num);
                let d = self.leaf(den);
                Node::Ratio(n, d)
            }
            Expr::Add { a, b: c } => Node::Add(b(self, a)?, b(self, c)?),
            Expr::Sub { a, b: c } => Node::Sub(b(self, a)?, b(self, c)?),
            Expr::Mul { a, b: c } => Node::Mul(b(self, a)?, b(self, c)?),
            Expr::Div { a, b: c } => Node::Div(b(self, a)?, b(self, c)?),
            Expr::Neg { a } => Node::Neg(b(self, a)?),
            Expr::Exp { a } => Node::Exp(b(self, a)?),
            Expr::Sqrt { a } => Node::Sqrt(b(self, a)?),
            Expr::Atom { lo, hi, .. } => Node::Atom(b(self, lo)?, b(self, hi)?),
        })
    }
}

fn eval_node(n: &Node, var: &Interval, patches: &[Patch], pr: &Precision) -> Result<Interval, BoundError> {
    let ev = |m: &Node| eval_node(m, var, patches, pr);
    let out = match n {
        Node::Const(c) => return Ok(c.clone()),
        Node::Var => return Ok(var.clone()),
        Node::Leaf(i) => patches[*i].range(),
        Node::Ratio(a, b) => {
            let d = patches[*b].range();
            patches[*a].range().div(&d).map_err(|_| BoundError::Indeterminate("denominator straddles 0".into()))?
        }
        Node::Add(a, b) => ev(a)?.add(&ev(b)?),
        Node::Sub(a, b) => ev(a)?.sub(&ev(b)?),
        Node::Mul(a, b) => ev(a)?.mul(&ev(b)?),
        Node::Div(a, b) => {
            ev(a)?.div(&ev(b)?).map_err(|_| BoundError::Indeterminate("divisor straddles 0".into()))?
        }
        Node::Neg(a) => ev(a)?.neg(),
        Node::Exp(a) => iv_exp(&ev(a)?.round_out(pr.bits), pr.exp_terms),
        Node::Sqrt(a) => {
            iv_sqrt(&ev(a)?, pr.bits).map_err(|_| BoundError::Indeterminate("sqrt of a negative range".into()))?
        }
        Node::Atom(lo, hi) => Interval::spanning(ev(lo)?.lo().clone(), ev(hi)?.hi().clone()),
    };
    Ok(out.round_out(pr.bits))
}

/// Enclosure of `e` at the chart point `x`.
pub fn eval_point(e: &Expr, x: &Rational, pr: &Precision) -> Result<Interval, BoundError> {
    let ev = |m: &Expr| eval_point(m, x, pr);
    let out = match e {
        Expr::Const { value } => return Ok(Interval::point(value.clone())),
        Expr::Var => return Ok(Interval::point(x.clone())),
        Expr::Poly { p } => return Ok(Interval::point(p.eval(x))),
        Expr::Ratio { num, den } => {
            let d = den.eval(x);
            if d.is_zero() {
                return Err(BoundError::Indeterminate(format!("pole at {}", fmt_rational(x))));
            }
            return Ok(Interval::point(num.eval(x) / d));
        }
        Expr::Add { a, b } => ev(a)?.add(&ev(b)?),
        Expr::Sub { a, b } => ev(a)?.sub(&ev(b)?),
        Expr::Mul { a, b } => ev(a)?.mul(&ev(b)?),
        Expr::Div { a, b } => ev(a)?.div(&ev(b)?).map_err(|_| BoundError::Indeterminate("division by 0".into()))?,
        Expr::Neg { a } => ev(a)?.neg(),
        Expr::Exp { a } => iv_exp(&ev(a)?.round_out(pr.bits), pr.exp_terms),
        Expr::Sqrt { a } => iv_sqrt(&ev(a)?, pr.bits)?,
        Expr::Atom { lo, hi, .. } => Interval::spanning(ev(lo)?.lo().clone(), ev(hi)?.hi().clone()),
    };
    Ok(out.round_out(pr.bits))
}

/// Interval enclosure of the range of `e` over the chart box `bx`.
pub fn bound_hull(e: &NamedExpression, bx: &Interval, pr: &Precision) -> Result<Interval, BoundError> {
    e.check_ledger()?;
    let domain = Domain { chart: e.chart, bx: bx.clone() };
    let mut comp = Compiler { domain: &domain, leaves: Vec::new(), precision: *pr };
    let node = comp.compile(&e.body)?;
    let patches: Vec<Patch> = comp.leaves.iter().map(Patch::new).collect();
    eval_node(&node, bx, &patches, &comp.precision)
}

// ---------------------------------------------------------------- problems

/// Constant multiplier `K` and rational body `N/D` when `e` has that shape.
fn split_constant(e: &Expr) -> Option<(Vec<&Expr>, &Polynomial, Option<&Polynomial>)> {
    fn is_const(e: &Expr) -> bool {
        match e {
            Expr::Const { .. } => true,
            Expr::Sqrt { a } | Expr::Neg { a } | Expr::Exp { a } => is_const(a),
            Expr::Mul { a, b } | Expr::Div { a, b } | Expr::Add { a, b } | Expr::Sub { a, b } => {
                is_const(a) && is_const(b)
            }
            _ => false,
        }
    }
    match e {
        Expr::Ratio { num, den } => Some((vec![], num, Some(den))),
        Expr::Poly { p } => Some((vec![], p, None)),
        Expr::Mul { a, b } => {
            if is_const(a) {
                let (mut k, n, d) = split_constant(b)?;
                k.push(a);
                Some((k, n, d))
            } else if is_const(b) {
                let (mut k, n, d) = split_constant(a)?;
                k.push(b);
                Some((k, n, d))
            } else {
                None
            }
        }
        _ => None,
    }
}

/// Polynomial-mode data: requirements that must be positive on (0,1) in the
/// local parameter, after removing endpoint contact factors.
struct PolyProblem {
    reqs: Vec<Polynomial>,
    strict: Vec<bool>,
    contact: (usize, usize),
}

fn strip_contact(q: &Polynomial) -> (usize, usize, Polynomial) {
    let (a, rest) = q.split_x_power();
    let (b, rest) = rest.reflect().split_x_power();
    (a, b, rest.reflect())
}

fn poly_problem(
    claim: &Claim,
    k: &Interval,
    num: &Polynomial,
    den: &Polynomial,
    domain: &Domain,
) -> Result<PolyProblem, BoundError> {
    let (lo, hi) = (domain.bx.lo(), domain.bx.hi());
    let n = num.rescale(lo, hi);
    let d = den.rescale(lo, hi);
    // orient so that the denominator is positive at the left end
    let d0 = d.eval(&Rational::zero());
    if d0.is_zero() {
        return Err(BoundError::Indeterminate("denominator vanishes at the domain end".into()));
    }
    let (n, d) = if d0.is_negative() { (-&n, -&d) } else { (n, d) };
    // k > 0 with k·f ≤ β  ⟸  f ≤ min(β/k_lo, β/k_hi), and dually
    let upper = |b: &Rational| (b / k.lo()).min(b / k.hi());
    let lower = |b: &Rational| (b / k.lo()).max(b / k.hi());
    let mut raw: Vec<Polynomial> = Vec::new();
    let mut push_upper = |b: Rational| raw.push(&d.scale(&b) - &n);
    match claim {
        Claim::SupAbs { target } => {
            push_upper(upper(target));
            raw.push(&n - &d.scale(&lower(&-target)));
        }
        Claim::AtMost { bound, .. } => push_upper(upper(bound)),
        Claim::AtLeast { bound, .. } => raw.push(&n - &d.scale(&lower(bound))),
        Claim::Within { lo, hi } => {
            push_upper(upper(hi));
            raw.push(&n - &d.scale(&lower(lo)));
        }
    }
    let strict = match claim {
        Claim::AtLeast { strict, .. } | Claim::AtMost { strict, .. } => *strict,
        _ => false,
    };
    let mut contact = (0, 0);
    let mut reqs = vec![d];
    let mut flags = vec![true];
    for r in raw {
        if r.is_zero() {
            return Err(BoundError::Indeterminate("claim holds with equality identically".into()));
        }
        let (a, b, rest) = strip_contact(&r);
        contact = (contact.0.max(a), contact.1.max(b));
        reqs.push(rest);
        flags.push(strict);
    }
    Ok(PolyProblem { reqs, strict: flags, contact })
}

enum Mode {
    Poly { k: Interval, num: Polynomial, den: Polynomial, strict: Vec<bool> },
    Tree { node: Node },
}

struct Problem<'a> {
    expr: &'a NamedExpression,
    claim: &'a Claim,
    domain: &'a Domain,
    precision: Precision,
    budget: Budget,
    mode: Mode,
    contact: Option<(usize, usize)>,
}

#[derive(Clone)]
struct Cell {
    s: Interval,
    patches: Vec<Patch>,
}

enum Look {
    Accept { hull: Option<Interval>, sample: Option<Interval> },
    Violated { point: Rational, hull: Option<Interval> },
    Split { badness: Rational, hull: Option<Interval>, reason: String },
}

#[derive(Clone)]
enum Outcome {
    Ok,
    Failed { cell_s: Interval, point_s: Rational, hull: Option<Interval> },
    Exhausted { cell_s: Interval, hull: Option<Interval>, reason: String },
}

#[derive(Clone)]
struct Run {
    outcome: Outcome,
    boxes: u64,
    leaves: u64,
    depth: u32,
    digest: [u8; 32],
    hull: Option<Interval>,
    sample: Option<Interval>,
}

fn join_hull(a: &Option<Interval>, b: &Option<Interval>) -> Option<Interval> {
    match (a, b) {
        (Some(x), Some(y)) => Some(x.hull(y)),
        (Some(x), None) | (None, Some(x)) => Some(x.clone()),
        (None, None) => None,
    }
}

fn leaf_digest(tag: &str, s: &Interval) -> [u8; 32] {
    let mut h = Sha256::new();
    h.update(tag.as_bytes());
    h.update(s.to_string().as_bytes());
    h.finalize().into()
}

fn node_digest(left: &[u8; 32], right: &[u8; 32]) -> [u8; 32] {
    let mut h = Sha256::new();
    h.update(b"node");
    h.update(left);
    h.update(right);
    h.finalize().into()
}

const PARALLEL_DEPTH: u32 = 14;

impl Problem<'_> {
    fn evaluate_tree(&self, node: &Node, cell: &Cell) -> Result<Interval, BoundError> {
        let var = self.domain.sub_box(&cell.s);
        eval_node(node, &var, &cell.patches, &self.precision)
    }

    fn value_at(&self, s: &Rational) -> Option<Interval> {
        eval_point(&self.expr.body, &self.domain.at(s), &self.precision).ok()
    }

    fn look(&self, cell: &Cell) -> Look {
        match &self.mode {
            Mode::Poly { k, num, den, strict } => {
                if cell.patches.iter().zip(strict).all(|(p, s)| p.certifies(*s)) {
                    // exact sample at the left end, and the right end of the domain
                    let mut sample = None;
                    for s in [cell.s.lo(), cell.s.hi()] {
                        let x = self.domain.at(s);
                        let dv = den.eval(&x);
                        if !dv.is_zero() {
                            let v = k.scale(&(num.eval(&x) / dv));
                            sample = join_hull(&sample, &Some(v));
                        }
                    }
                    return Look::Accept { hull: None, sample };
                }
                for p in &cell.patches {
                    let last = p.c.len() - 1;
                    if p.c[0].is_negative() {
                        return Look::Violated { point: cell.s.lo().clone(), hull: None };
                    }
                    if p.c[last].is_negative() {
                        return Look::Violated { point: cell.s.hi().clone(), hull: None };
                    }
                }
                let badness = cell.patches.iter().map(Patch::slack).min().unwrap();
                Look::Split { badness: -badness, hull: None, reason: "bernstein coefficients not positive".into() }
            }
            Mode::Tree { node } => match self.evaluate_tree(node, cell) {
                Ok(h) => {
                    if self.claim.accepts(&h) {
                        return Look::Accept { hull: Some(h), sample: None };
                    }
                    let mut worst: Option<(Rational, Rational)> = None;
                    for s in [cell.s.lo().clone(), cell.s.mid(), cell.s.hi().clone()] {
                        if let Some(v) = self.value_at(&s) {
                            if self.claim.violated_by(&v) {
                                let ex = self.claim.excess(&v);
                                if worst.as_ref().is_none_or(|(e, _)| &ex > e) {
                                    worst = Some((ex, s));
                                }
                            }
                        }
                    }
                    if let Some((_, s)) = worst {
                        return Look::Violated { point: s, hull: Some(h) };
                    }
                    Look::Split { badness: self.claim.excess(&h), hull: Some(h), reason: "hull too wide".into() }
                }
                Err(e) => Look::Split { badness: int(1_000_000_000), hull: None, reason: e.to_string() },
            },
        }
    }

    fn split(&self, cell: &Cell) -> (Cell, Cell) {
        let m = cell.s.mid();
        let (mut l, mut r) = (Vec::new(), Vec::new());
        for p in &cell.patches {
            let (a, b) = p.split();
            l.push(a);
            r.push(b);
        }
        (
            Cell { s: Interval::spanning(cell.s.lo().clone(), m.clone()), patches: l },
            Cell { s: Interval::spanning(m, cell.s.hi().clone()), patches: r },
        )
    }

    fn badness_of(&self, cell: &Cell) -> Rational {
        match self.look(cell) {
            Look::Split { badness, .. } => badness,
            Look::Violated { .. } => int(2_000_000_000),
            Look::Accept { .. } => int(-2_000_000_000),
        }
    }

    fn solve(&self, cell: Cell, depth: u32, budget: u64, parallel: bool) -> Run {
        if budget == 0 {
            return Run {
                outcome: Outcome::Exhausted { cell_s: cell.s.clone(), hull: None, reason: "max_boxes".into() },
                boxes: 0,
                leaves: 0,
                depth,
                digest: leaf_digest("exhausted", &cell.s),
                hull: None,
                sample: None,
            };
        }
        let base = |outcome, tag: &str, hull: Option<Interval>, sample: Option<Interval>| Run {
            outcome,
            boxes: 1,
            leaves: 1,
            depth,
            digest: leaf_digest(tag, &cell.s),
            hull,
            sample,
        };
        match self.look(&cell) {
            Look::Accept { hull, sample } => base(Outcome::Ok, "leaf", hull, sample),
            Look::Violated { point, hull } => {
                base(Outcome::Failed { cell_s: cell.s.clone(), point_s: point, hull: hull.clone() }, "failed", hull, None)
            }
            Look::Split { hull, reason, .. } if depth >= self.budget.max_depth => base(
                Outcome::Exhausted { cell_s: cell.s.clone(), hull: hull.clone(), reason: format!("max_depth: {reason}") },
                "exhausted",
                hull,
                None,
            ),
            Look::Split { .. } => {
                let (l, r) = self.split(&cell);
                drop(cell);
                // worst child first
                let left_first = self.badness_of(&l) >= self.badness_of(&r);
                let (first, second) = if left_first { (l, r) } else { (r, l) };
                let remaining = budget - 1;
                let go_parallel = parallel && depth < PARALLEL_DEPTH && rayon::current_num_threads() > 1;
                let (a, b) = if go_parallel {
                    let second_copy = second.clone();
                    let (a, b) = rayon::join(
                        || self.solve(first, depth + 1, remaining, parallel),
                        || self.solve(second, depth + 1, remaining, parallel),
                    );
                    if !matches!(a.outcome, Outcome::Ok) {
                        (a, None)
                    } else {
                        let left = remaining - a.boxes;
                        let redo = matches!(b.outcome, Outcome::Exhausted { .. }) || b.boxes > left;
                        let b = if redo { self.solve(second_copy, depth + 1, left, parallel) } else { b };
                        (a, Some(b))
                    }
                } else {
                    let a = self.solve(first, depth + 1, remaining, parallel);
                    if !matches!(a.outcome, Outcome::Ok) {
                        (a, None)
                    } else {
                        let left = remaining - a.boxes;
                        let b = self.solve(second, depth + 1, left, parallel);
                        (a, Some(b))
                    }
                };
                match b {
                    None => Run { boxes: a.boxes + 1, depth: a.depth.max(depth), ..a },
                    Some(b) => {
                        let (dl, dr) = if left_first { (&a.digest, &b.digest) } else { (&b.digest, &a.digest) };
                        Run {
                            digest: node_digest(dl, dr),
                            boxes: 1 + a.boxes + b.boxes,
                            leaves: a.leaves + b.leaves,
                            depth: a.depth.max(b.depth),
                            hull: join_hull(&a.hull, &b.hull),
                            sample: join_hull(&a.sample, &b.sample),
                            outcome: b.outcome,
                        }
                    }
                }
            }
        }
    }
}

/// Certifies `claim` for `e` on `domain`.
pub fn certify(
    e: &NamedExpression,
    domain: &Domain,
    claim: &Claim,
    budget: Budget,
    precision: Precision,
) -> Result<BoundCertificate, BoundError> {
    certify_with(e, domain, claim, budget, precision, true)
}

/// As [`certify`], optionally forcing a single-threaded traversal.
pub fn certify_with(
    e: &NamedExpression,
    domain: &Domain,
    claim: &Claim,
    budget: Budget,
    precision: Precision,
    parallel: bool,
) -> Result<BoundCertificate, BoundError> {
    e.check_ledger()?;
    if let Claim::SupAbs { target } = claim {
        if !target.is_positive() {
            return Err(BoundError::NonPositiveTarget);
        }
    }
    let mut poly = None;
    if let Some((ks, num, den)) = split_constant(&e.body) {
        let mut k = Interval::point(Rational::one());
        for c in &ks {
            k = k.mul(&eval_point(c, &Rational::zero(), &precision)?);
        }
        if k.contains_zero() {
            return Err(BoundError::Indeterminate("constant factor straddles 0".into()));
        }
        let (k, num) = if k.hi().is_negative() { (k.neg(), -num) } else { (k, num.clone()) };
        let den = den.cloned().unwrap_or_else(Polynomial::one);
        poly = Some((k, num, den));
    }
    let (mode, root, contact, method) = match poly {
        Some((k, num, den)) => {
            let pp = poly_problem(claim, &k, &num, &den, domain)?;
            let patches = pp.reqs.iter().map(Patch::new).collect();
            (Mode::Poly { k, num, den, strict: pp.strict }, patches, Some(pp.contact), "bernstein-polynomial")
        }
        None => {
            let mut comp = Compiler { domain, leaves: Vec::new(), precision };
            let node = comp.compile(&e.body)?;
            let patches = comp.leaves.iter().map(Patch::new).collect();
            (Mode::Tree { node }, patches, None, "interval-tree")
        }
    };
    let problem = Problem { expr: e, claim, domain, precision, budget, mode, contact };
    let run = problem.solve(Cell { s: Interval::from_ints(0, 1), patches: root }, 0, budget.max_boxes, parallel);
    let status = match &run.outcome {
        Outcome::Ok => Status::Certified,
        Outcome::Failed { cell_s, point_s, hull } => Status::Failed {
            witness_box: domain.sub_box(cell_s),
            hull: hull.clone(),
            point: domain.at(point_s),
            value: problem.value_at(point_s),
        },
        Outcome::Exhausted { cell_s, hull, reason } => {
            Status::BudgetExhausted { worst_box: domain.sub_box(cell_s), hull: hull.clone(), reason: reason.clone() }
        }
    };
    Ok(BoundCertificate {
        id: e.id.clone(),
        claim: claim.clone(),
        domain: domain.clone(),
        status,
        stats: Stats {
            boxes: run.boxes,
            leaves: run.leaves,
            max_depth: run.depth,
            leaf_hull: run.hull,
            sampled_range: run.sample,
            endpoint_contact: problem.contact,
        },
        precision: PrecisionRecord {
            method: method.into(),
            exp_terms: precision.exp_terms,
            bits: precision.bits,
            max_depth: budget.max_depth,
            max_boxes: budget.max_boxes,
        },
        digest: run.digest.iter().map(|b| format!("{b:02x}")).collect(),
    })
}

pub fn certify_sup(
    e: &NamedExpression,
    domain: &Domain,
    target: Rational,
    budget: Budget,
    precision: Precision,
) -> Result<BoundCertificate, BoundError> {
    certify(e, domain, &Claim::sup(target), budget, precision)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Sign {
    NonNegative,
    NonPositive,
    Above(Rational),
    Below(Rational),
}

/// `≥ 0`, `≤ 0`, `> ε`, `< −ε`.
pub fn certify_sign(
    e: &NamedExpression,
    domain: &Domain,
    sign: Sign,
    budget: Budget,
    precision: Precision,
) -> Result<BoundCertificate, BoundError> {
    let claim = match sign {
        Sign::NonNegative => Claim::AtLeast { bound: Rational::zero(), strict: false },
        Sign::NonPositive => Claim::AtMost { bound: Rational::zero(), strict: false },
        Sign::Above(eps) => Claim::AtLeast { bound: eps, strict: true },
        Sign::Below(eps) => Claim::AtMost { bound: -eps, strict: true },
    };
    certify(e, domain, &claim, budget, precision)
}

/// Runs `f` on a dedicated pool of `threads` workers.
pub fn with_threads<T: Send>(threads: usize, f: impl FnOnce() -> T + Send) -> T {
    rayon::ThreadPoolBuilder::new().num_threads(threads.max(1)).build().expect("thread pool").install(f)
}
