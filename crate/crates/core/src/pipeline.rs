//! Certificate catalogue C1–C19, dependency-ordered execution, the constants
//! ledger, exact scalar chains and the proof report.

use std::collections::{BTreeMap, BTreeSet};
use std::path::PathBuf;
use std::sync::OnceLock;
use std::time::Instant;

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::bound::{certify, BoundCertificate, Budget, Claim, Domain, Precision, Status};
use crate::build::{self, BuildError, FundamentalSystem, ProfileAnsatz};
use crate::exact::{fmt_rational, int, parse_rational, rat, ten_pow_neg, to_f64, Rational};
use crate::expr::{Chart, NamedExpression};
use crate::tables::{builtin_tables, ingest_tables, Checksums, TableError, Tables};

#[derive(Debug, thiserror::Error)]
pub enum PipelineError {
    #[error("config line {0}: {1}")]
    Config(usize, String),
    #[error("unknown certificate id {0:?}")]
    UnknownId(String),
    #[error(transparent)]
    Tables(#[from] TableError),
    #[error("report parse: {0}")]
    Report(#[from] serde_json::Error),
}

// ---------------------------------------------------------------- config

/// Plain `key = value` lines; `#` starts a comment. Recognized keys:
/// `tables`, and `<ID|default>.{max_depth,max_boxes,exp_terms,bits}`.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Config {
    entries: BTreeMap<String, String>,
}

const PARAMS: [&str; 4] = ["max_depth", "max_boxes", "exp_terms", "bits"];

impl Config {
    pub fn parse(text: &str) -> Result<Config, PipelineError> {
        let mut entries = BTreeMap::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap().trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| PipelineError::Config(i + 1, format!("expected key = value, got {raw:?}")))?;
            let (k, v) = (k.trim().to_string(), v.trim().to_string());
            if k != "tables" {
                let (scope, param) = k
                    .split_once('.')
                    .ok_or_else(|| PipelineError::Config(i + 1, format!("unknown key {k:?}")))?;
                if scope != "default" && cert_index(scope).is_none() {
                    return Err(PipelineError::Config(i + 1, format!("unknown certificate {scope:?}")));
                }
                if !PARAMS.contains(&param) {
                    return Err(PipelineError::Config(i + 1, format!("unknown parameter {param:?}")));
                }
                v.parse::<u64>().map_err(|_| PipelineError::Config(i + 1, format!("{k}: not an integer")))?;
            }
            entries.insert(k, v);
        }
        Ok(Config { entries })
    }

    pub fn set(&mut self, key: &str, value: &str) {
        self.entries.insert(key.to_string(), value.to_string());
    }

    /// Canonical text: sorted `key = value` lines.
    pub fn canonical(&self) -> String {
        self.entries.iter().map(|(k, v)| format!("{k} = {v}\n")).collect()
    }

    fn num(&self, id: &str, param: &str) -> Option<u64> {
        self.entries
            .get(&format!("{id}.{param}"))
            .or_else(|| self.entries.get(&format!("default.{param}")))
            .and_then(|v| v.parse().ok())
    }

    pub fn budget(&self, id: &str) -> Budget {
        let d = Budget::default();
        Budget {
            max_depth: self.num(id, "max_depth").map(|v| v as u32).unwrap_or(d.max_depth),
            max_boxes: self.num(id, "max_boxes").unwrap_or(d.max_boxes),
        }
    }

    pub fn precision(&self, id: &str) -> Precision {
        let d = Precision::default();
        Precision {
            exp_terms: self.num(id, "exp_terms").map(|v| v as usize).unwrap_or(d.exp_terms),
            bits: self.num(id, "bits").map(|v| v as u32).unwrap_or(d.bits),
        }
    }

    pub fn tables(&self) -> Result<Tables, TableError> {
        match self.entries.get("tables") {
            Some(dir) => ingest_tables(&PathBuf::from(dir)),
            None => Ok(builtin_tables()),
        }
    }
}

// ---------------------------------------------------------------- catalogue

pub struct CatalogueEntry {
    pub id: &'static str,
    pub title: &'static str,
    pub depends_on: &'static [&'static str],
}

/// In execution (topological) order.
pub const CATALOGUE: [CatalogueEntry; 19] = [
    CatalogueEntry { id: "C4", title: "weight identities (1/p1)' = 1/p3, L0(1/p1) = 1/p2", depends_on: &[] },
    CatalogueEntry { id: "C5", title: "free Wronskian W(v0,v1) = -6 y^-2 e^{y^2/4}", depends_on: &[] },
    CatalogueEntry { id: "C18", title: "w1 tail coefficients: endpoint conditions and size", depends_on: &[] },
    CatalogueEntry { id: "C10", title: "Dawson truncation 0 <= eps <= c_eps = 1/500", depends_on: &[] },
    CatalogueEntry { id: "C1", title: "residual |p2 R(f0~)| <= c_R = 1e-6", depends_on: &[] },
    CatalogueEntry { id: "C2", title: "sin-factor |2p2/(p1^2 y^2) sin 2f0~| <= 3.9", depends_on: &[] },
    CatalogueEntry { id: "C3", title: "weight-factor 4p2/(3p1^3 y^2) <= 1 (exact sup 8/9)", depends_on: &[] },
    CatalogueEntry { id: "C19", title: "c_N = 4 from 3.9 + |delta|", depends_on: &["C2", "C3"] },
    CatalogueEntry { id: "C6", title: "ratio factors h0, h1, h0', h1' <= 1.01", depends_on: &["C10", "C18"] },
    CatalogueEntry { id: "C7", title: "Wronskian ratio <= 28 and c_L = (1+5)*30 = 180", depends_on: &["C5", "C6", "C10", "C18"] },
    CatalogueEntry { id: "C8", title: "c_P, c_Q <= 2e-5, c_L~ = 4e-5", depends_on: &["C10", "C18"] },
    CatalogueEntry { id: "C9", title: "contraction chain 3636/10^7 < 5e-4, Lipschitz 7272/10^4 < 1", depends_on: &["C1", "C2", "C3", "C7", "C8", "C19"] },
    CatalogueEntry { id: "C11", title: "|p1 w0~| <= 1.2, |p3 w0~'| <= 4 on (0,3), c_w0 = 2.6", depends_on: &["C10"] },
    CatalogueEntry { id: "C12", title: "near-origin chain c_L c_L~ (2.6+0.03) <= 0.0216 < 0.03", depends_on: &["C8", "C11"] },
    CatalogueEntry { id: "C13", title: "w0~'(0) > 1, c0 well defined", depends_on: &["C12"] },
    CatalogueEntry { id: "C14", title: "envelopes q(3) <= -0.06, q'(3) <= -0.05", depends_on: &["C12"] },
    CatalogueEntry { id: "C15", title: "q > 0 on [0,1], q' < 0 on [1,3]", depends_on: &["C12"] },
    CatalogueEntry { id: "C16", title: "gauge mode Bernstein positivity, N = K = 59", depends_on: &[] },
    CatalogueEntry { id: "C17", title: "far-field gap 2 arctan g0(inf) - pi/2 > 0.56 + sqrt2*5e-4", depends_on: &[] },
];

fn cert_index(id: &str) -> Option<usize> {
    CATALOGUE.iter().position(|c| c.id == id)
}

/// Dependency closure of `ids`, in catalogue order.
pub fn closure(ids: &[String]) -> Result<Vec<&'static str>, PipelineError> {
    let mut need = BTreeSet::new();
    let mut stack: Vec<String> = ids.to_vec();
    while let Some(id) = stack.pop() {
        let i = cert_index(&id).ok_or_else(|| PipelineError::UnknownId(id.clone()))?;
        if need.insert(i) {
            stack.extend(CATALOGUE[i].depends_on.iter().map(|s| s.to_string()));
        }
    }
    Ok(need.into_iter().map(|i| CATALOGUE[i].id).collect())
}

// ---------------------------------------------------------------- records

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Relation {
    Lt,
    Le,
    Eq,
    Gt,
    Ge,
}

impl Relation {
    fn symbol(&self) -> &'static str {
        match self {
            Relation::Lt => "<",
            Relation::Le => "<=",
            Relation::Eq => "=",
            Relation::Gt => ">",
            Relation::Ge => ">=",
        }
    }

    fn holds(&self, a: &Rational, b: &Rational) -> bool {
        match self {
            Relation::Lt => a < b,
            Relation::Le => a <= b,
            Relation::Eq => a == b,
            Relation::Gt => a > b,
            Relation::Ge => a >= b,
        }
    }
}

/// An exact rational comparison.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScalarCheck {
    pub name: String,
    pub statement: String,
    pub lhs: String,
    pub relation: Relation,
    pub rhs: String,
    pub holds: bool,
}

pub fn check(name: &str, statement: &str, lhs: &Rational, rel: Relation, rhs: &Rational) -> ScalarCheck {
    ScalarCheck {
        name: name.into(),
        statement: statement.into(),
        lhs: fmt_rational(lhs),
        relation: rel,
        rhs: fmt_rational(rhs),
        holds: rel.holds(lhs, rhs),
    }
}

fn flag(name: &str, statement: &str, holds: bool) -> ScalarCheck {
    let one = Rational::one();
    let v = if holds { one.clone() } else { Rational::zero() };
    check(name, statement, &v, Relation::Eq, &one)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CertStatus {
    Verified,
    Failed,
    Inconclusive,
    Blocked,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CertificateRecord {
    pub id: String,
    pub title: String,
    pub depends_on: Vec<String>,
    pub status: CertStatus,
    pub bounds: Vec<BoundCertificate>,
    pub checks: Vec<ScalarCheck>,
    pub notes: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LedgerEntry {
    pub name: String,
    pub value: String,
    pub provenance: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Timing {
    pub total_ms: u64,
    pub per_certificate_ms: BTreeMap<String, u64>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProofReport {
    pub verdict: String,
    pub requested: Vec<String>,
    pub certificates: Vec<CertificateRecord>,
    pub ledger: Vec<LedgerEntry>,
    pub chains: Vec<ScalarCheck>,
    pub tables: Checksums,
    pub config: String,
    /// Wall-clock data; excluded from the canonical serialization.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub timing: Option<Timing>,
}

impl ProofReport {
    /// Deterministic JSON without timing.
    pub fn canonical_json(&self) -> String {
        let mut r = self.clone();
        r.timing = None;
        serde_json::to_string_pretty(&r).expect("report serializes")
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn from_json(s: &str) -> Result<ProofReport, PipelineError> {
        Ok(serde_json::from_str(s)?)
    }

    pub fn all_verified(&self) -> bool {
        self.certificates.iter().all(|c| c.status == CertStatus::Verified)
    }

    pub fn record(&self, id: &str) -> Option<&CertificateRecord> {
        self.certificates.iter().find(|c| c.id == id)
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("verdict: {}\n\n", self.verdict));
        out.push_str(&format!("{:<5} {:<13} {}\n", "id", "status", "claim"));
        for c in &self.certificates {
            out.push_str(&format!("{:<5} {:<13} {}\n", c.id, format!("{:?}", c.status).to_lowercase(), c.title));
            for b in &c.bounds {
                out.push_str(&format!("        {}\n", b.summary()));
            }
            for k in &c.checks {
                out.push_str(&format!(
                    "        [{}] {}: {} {} {}\n",
                    if k.holds { "ok" } else { "FAIL" },
                    k.statement,
                    short(&k.lhs),
                    k.relation.symbol(),
                    short(&k.rhs)
                ));
            }
            for n in &c.notes {
                out.push_str(&format!("        note: {n}\n"));
            }
        }
        out.push_str("\nledger:\n");
        for l in &self.ledger {
            out.push_str(&format!("  {:<10} = {:<14} ({})\n", l.name, l.value, l.provenance));
        }
        out.push_str(&format!(
            "\ntables: f0 {} / w0 {} / w1 {}\n",
            &self.tables.f0[..16],
            &self.tables.w0[..16],
            &self.tables.w1[..16]
        ));
        if let Some(t) = &self.timing {
            out.push_str(&format!("total wall time: {:.1} s\n", t.total_ms as f64 / 1000.0));
        }
        out
    }
}

/// Long exact values are abbreviated in the text view only.
fn short(v: &str) -> String {
    match parse_rational(v) {
        Ok(r) if v.len() > 24 => format!("~{:.12e}", to_f64(&r)),
        _ => v.trim_end_matches("/1").to_string(),
    }
}

pub const VERDICT_OK: &str =
    "existence constants: VERIFIED; near-origin numerics: VERIFIED; gauge positivity: VERIFIED";

fn verdict(records: &[CertificateRecord]) -> String {
    let missing: Vec<&str> = CATALOGUE.iter().map(|c| c.id).filter(|id| !records.iter().any(|r| r.id == *id)).collect();
    let bad: Vec<String> = records
        .iter()
        .filter(|r| r.status != CertStatus::Verified)
        .map(|r| format!("{} {:?}", r.id, r.status).to_lowercase().replacen('c', "C", 1))
        .collect();
    if bad.is_empty() && missing.is_empty() {
        return VERDICT_OK.into();
    }
    let mut parts = bad;
    if !missing.is_empty() {
        parts.push(format!("not run: {}", missing.join(", ")));
    }
    format!("INCOMPLETE: {}", parts.join("; "))
}

// ---------------------------------------------------------------- constants

/// Existence-ball radius.
pub fn radius() -> Rational {
    rat(5, 10000)
}

pub struct Constants;

impl Constants {
    pub fn c_r() -> Rational {
        ten_pow_neg(6)
    }
    pub fn sin_factor() -> Rational {
        rat(39, 10)
    }
    pub fn c_n() -> Rational {
        int(4)
    }
    pub fn ratio_bound() -> Rational {
        rat(101, 100)
    }
    pub fn wronskian_bound() -> Rational {
        int(28)
    }
    /// Bound on the Green kernel integrals, analytic input.
    pub fn kernel_integrals() -> Rational {
        int(5)
    }
    pub fn h_bound() -> Rational {
        int(30)
    }
    pub fn c_l() -> Rational {
        int(180)
    }
    pub fn c_p() -> Rational {
        rat(2, 100000)
    }
    pub fn c_q() -> Rational {
        rat(2, 100000)
    }
    pub fn c_lt() -> Rational {
        rat(4, 100000)
    }
    pub fn sup_p1w0() -> Rational {
        rat(6, 5)
    }
    pub fn sup_p3w0p() -> Rational {
        int(4)
    }
    pub fn c_w0() -> Rational {
        rat(13, 5)
    }
}

// ---------------------------------------------------------------- context

/// Lazily built symbolic objects shared between certificates.
pub struct Context {
    pub config: Config,
    pub tables: Tables,
    profile: OnceLock<ProfileAnsatz>,
    fs: OnceLock<Result<FundamentalSystem, BuildError>>,
}

impl Context {
    pub fn new(config: Config) -> Result<Context, PipelineError> {
        let tables = config.tables()?;
        Ok(Context { config, tables, profile: OnceLock::new(), fs: OnceLock::new() })
    }

    pub fn profile(&self) -> &ProfileAnsatz {
        self.profile.get_or_init(|| build::build_profile(&self.tables))
    }

    pub fn fs(&self) -> Result<&FundamentalSystem, BuildError> {
        self.fs.get_or_init(|| build::build_fundamental_system(&self.tables)).as_ref().map_err(Clone::clone)
    }

    fn bound(&self, cert: &str, e: &NamedExpression, domain: Domain, claim: Claim) -> Result<BoundCertificate, String> {
        certify(e, &domain, &claim, self.config.budget(cert), self.config.precision(cert)).map_err(|x| format!("{}: {x}", e.id))
    }
}

struct Outcome {
    bounds: Vec<BoundCertificate>,
    checks: Vec<ScalarCheck>,
    notes: Vec<String>,
}

impl Outcome {
    fn new() -> Outcome {
        Outcome { bounds: Vec::new(), checks: Vec::new(), notes: Vec::new() }
    }
}

fn unit(chart: Chart) -> Domain {
    Domain::unit(chart)
}

fn y_box(lo: i64, hi: i64) -> Domain {
    Domain::new(Chart::Y, int(lo), int(hi)).expect("ordered box")
}

fn run_one(ctx: &Context, id: &str) -> Result<Outcome, String> {
    let mut o = Outcome::new();
    let e = |x: BuildError| x.to_string();
    let r = radius();
    match id {
        "C1" => {
            let res = build::build_residual(ctx.profile()).map_err(e)?;
            if let crate::expr::Expr::Mul { b, .. } = &res.body {
                if let crate::expr::Expr::Ratio { num, den } = b.as_ref() {
                    o.notes.push(format!("p2 R = U(t)/(sqrt2 V(t)), deg U = {}, deg V = {}", num.degree(), den.degree()));
                }
            }
            o.bounds.push(ctx.bound(id, &res, unit(Chart::T2), Claim::sup(Constants::c_r()))?);
        }
        "C2" => {
            let (c2, _) = build::build_nonlinearity_factors(ctx.profile()).map_err(e)?;
            o.bounds.push(ctx.bound(id, &c2, unit(Chart::T2), Claim::sup(Constants::sin_factor()))?);
        }
        "C3" => {
            let (_, c3) = build::build_nonlinearity_factors(ctx.profile()).map_err(e)?;
            let claim = Claim::Within { lo: rat(4, 9), hi: rat(8, 9) };
            o.bounds.push(ctx.bound(id, &c3, unit(Chart::T2), claim)?);
            o.checks.push(check("C3.sup", "exact sup 8/9 (limit y -> inf) below 1", &rat(8, 9), Relation::Le, &int(1)));
        }
        "C4" => {
            let ok = build::check_weight_identities(&build::build_weights());
            o.checks.push(flag("C4.identities", "(1/p1)' - 1/p3 and L0(1/p1) - 1/p2 are the zero element", ok.is_ok()));
        }
        "C5" => {
            let ok = build::check_free_system();
            o.checks.push(flag(
                "C5.wronskian",
                "W(v0,v1) e^{-y^2/4} = -6/y^2, L0 v0 = L0 v1 = 0 (D symbolic, D' = 1 - 2zD)",
                ok.is_ok(),
            ));
        }
        "C6" => {
            let fs = ctx.fs().map_err(e)?;
            for p in build::build_nonnegativity(fs).map_err(e)? {
                o.bounds.push(ctx.bound(id, &p, unit(p.chart), Claim::positive())?);
            }
            for f in build::build_ratio_factors(fs).map_err(e)?.into_iter().filter(|f| f.id.starts_with("C6")) {
                o.bounds.push(ctx.bound(id, &f, unit(f.chart), Claim::sup(Constants::ratio_bound()))?);
            }
            let h1_inf = fs.h1_at_infinity();
            o.checks.push(check("C6.h1inf", "|h1(inf)| = |sum (w1)_n|", &h1_inf.abs(), Relation::Le, &Constants::ratio_bound()));
        }
        "C7" => {
            let fs = ctx.fs().map_err(e)?;
            let w = build::build_ratio_factors(fs).map_err(e)?.into_iter().find(|f| f.id.starts_with("C7")).unwrap();
            o.bounds.push(ctx.bound(id, &w, unit(w.chart), Claim::sup(Constants::wronskian_bound()))?);
            let rb = Constants::ratio_bound();
            let h = &rb * &rb * Constants::wronskian_bound();
            o.checks.push(check("C7.H", "|H| <= 1.01^2 * 28", &h, Relation::Lt, &Constants::h_bound()));
            let cl = (Rational::one() + Constants::kernel_integrals()) * Constants::h_bound();
            o.checks.push(check("C7.cL", "c_L = (1+5)*30", &cl, Relation::Eq, &Constants::c_l()));
        }
        "C8" => {
            let fs = ctx.fs().map_err(e)?;
            let (p, q) = build::build_pq(ctx.profile(), fs).map_err(e)?;
            o.bounds.push(ctx.bound(id, &p, unit(Chart::W), Claim::sup(Constants::c_p()))?);
            o.bounds.push(ctx.bound(id, &q, unit(Chart::W), Claim::sup(Constants::c_q()))?);
            o.checks.push(check("C8.cLt", "c_L~ = c_P + c_Q", &(Constants::c_p() + Constants::c_q()), Relation::Eq, &Constants::c_lt()));
        }
        "C9" => {
            let cl = Constants::c_l();
            let selfmap = &cl * (Constants::c_r() + Constants::c_lt() * &r + Constants::c_n() * &r * &r);
            o.checks.push(check("C9.value", "180(1e-6 + 4e-5*5e-4 + 4*(5e-4)^2)", &selfmap, Relation::Eq, &rat(3636, 10_000_000)));
            o.checks.push(check("C9.selfmap", "self-map bound below the radius", &selfmap, Relation::Lt, &r));
            let lip = &cl * (int(2) * Constants::c_n() * &r + Constants::c_lt());
            o.checks.push(check("C9.lipvalue", "180(2*4*5e-4 + 4e-5)", &lip, Relation::Eq, &rat(7272, 10_000)));
            o.checks.push(check("C9.lipschitz", "Lipschitz constant below 1", &lip, Relation::Lt, &Rational::one()));
        }
        "C10" => {
            let fs = ctx.fs().map_err(e)?;
            let eps = build::build_epsilon_check(fs).map_err(e)?;
            let claim = Claim::Within { lo: Rational::zero(), hi: build::c_eps() };
            o.bounds.push(ctx.bound(id, &eps, unit(Chart::T4), claim.clone())?);
            // the same enclosure split over the near (y <= 4) and far (u = 1/y <= 1/4) charts
            let er = build::epsilon_rational(fs).map_err(e)?;
            let near = NamedExpression::rational("C10:dawson-eps-near", Chart::Y, &er).map_err(|x| x.to_string())?;
            let far = NamedExpression::rational("C10:dawson-eps-far", Chart::U, &er).map_err(|x| x.to_string())?;
            o.bounds.push(ctx.bound(id, &near, y_box(0, 4), claim.clone())?);
            let ubox = Domain::new(Chart::U, Rational::zero(), rat(1, 4)).expect("ordered box");
            o.bounds.push(ctx.bound(id, &far, ubox, claim)?);
            let at0 = er.value_at_zero().unwrap_or_else(|| int(1));
            o.checks.push(check("C10.origin", "eps(0) = 0 exactly", &at0, Relation::Eq, &Rational::zero()));
        }
        "C11" => {
            let fs = ctx.fs().map_err(e)?;
            let v = build::build_near_origin_exprs(fs).map_err(e)?;
            o.bounds.push(ctx.bound(id, &v[0], y_box(0, 3), Claim::sup(Constants::sup_p1w0()))?);
            o.bounds.push(ctx.bound(id, &v[1], y_box(0, 3), Claim::sup(Constants::sup_p3w0p()))?);
            let c = (Constants::sup_p1w0() + Constants::sup_p3w0p()) / int(2);
            o.checks.push(check("C11.cw0", "c_w0 = (1.2 + 4)/2", &c, Relation::Eq, &Constants::c_w0()));
        }
        "C12" => {
            let prod = Constants::c_l() * Constants::c_lt();
            let rad = rat(3, 100);
            o.checks.push(check("C12.cLcLt", "c_L c_L~ = 0.0072", &prod, Relation::Eq, &rat(72, 10000)));
            o.checks.push(check("C12.contraction", "c_L c_L~ < 1", &prod, Relation::Lt, &Rational::one()));
            let m = &prod * (Constants::c_w0() + &rad);
            o.checks.push(check("C12.selfmap", "c_L c_L~ (2.6 + 0.03) <= 0.0216", &m, Relation::Le, &rat(216, 10000)));
            o.checks.push(check("C12.radius", "0.0072 * 3 = 0.0216 < 0.03", &(&prod * int(3)), Relation::Lt, &rad));
        }
        "C13" => {
            let fs = ctx.fs().map_err(e)?;
            let d0 = fs.w0_prime_at_zero().map_err(e)?;
            let alt = ctx.tables.w0.iter().enumerate().fold(Rational::zero(), |a, (n, c)| if n % 2 == 0 { a + c } else { a - c });
            o.checks.push(check("C13.sum", "w0~'(0) = sum (-1)^n (w0)_n", &d0, Relation::Eq, &alt));
            o.checks.push(check("C13.gt1", "w0~'(0) > 1", &d0, Relation::Gt, &Rational::one()));
            o.checks.push(check("C13.c0", "w0~'(0) - 0.03 > 0, so c0 is finite and positive", &(&d0 - rat(3, 100)), Relation::Gt, &Rational::zero()));
        }
        "C14" => {
            let fs = ctx.fs().map_err(e)?;
            let v = build::build_near_origin_exprs(fs).map_err(e)?;
            let at3 = Domain::point(Chart::Y, int(3));
            o.bounds.push(ctx.bound(id, &v[2], at3.clone(), Claim::AtMost { bound: rat(-6, 100), strict: false })?);
            o.bounds.push(ctx.bound(id, &v[3], at3, Claim::AtMost { bound: rat(-5, 100), strict: false })?);
        }
        "C15" => {
            let fs = ctx.fs().map_err(e)?;
            let v = build::build_near_origin_exprs(fs).map_err(e)?;
            o.bounds.push(ctx.bound(id, &v[4], y_box(0, 1), Claim::positive())?);
            o.bounds.push(ctx.bound(id, &v[5], y_box(1, 3), Claim::negative())?);
        }
        "C16" => {
            let g = build::build_gauge_positivity(ctx.profile()).map_err(e)?;
            let n = int(build::GAUGE_DEGREE as i64);
            o.checks.push(check("C16.N", "numerator degree N", &int(g.numerator.degree as i64), Relation::Eq, &n));
            o.checks.push(check("C16.K", "denominator degree K", &int(g.denominator.degree as i64), Relation::Eq, &n));
            let min_a = g.numerator.coefficients.iter().min().unwrap().clone();
            let min_b = g.denominator.coefficients.iter().min().unwrap().clone();
            o.checks.push(check("C16.a", "min a_n > 0", &min_a, Relation::Gt, &Rational::zero()));
            o.checks.push(check("C16.b", "min b_k > 0", &min_b, Relation::Gt, &Rational::zero()));
            o.notes.push(format!(
                "minimal degrees ({}, {}) elevated to {}; sqrt2 <= {:.20}",
                g.minimal_degrees.0,
                g.minimal_degrees.1,
                build::GAUGE_DEGREE,
                to_f64(&g.sqrt2_upper)
            ));
        }
        "C17" => {
            let gap = build::build_farfield_gap(ctx.profile());
            o.checks.push(check("C17.gap", "lower end of 2 arctan g0(inf) - pi/2 exceeds upper end of 0.56 + sqrt2*5e-4", gap.gap.lo(), Relation::Gt, gap.threshold.hi()));
            let w = ten_pow_neg(8);
            o.checks.push(check("C17.width", "enclosure width of the gap", &gap.gap.width(), Relation::Lt, &w));
            o.notes.push(format!(
                "g0(inf) = sum (f0)_n / 2 ~ {:.15}, gap ~ [{:.12}, {:.12}]",
                to_f64(&gap.g_inf),
                to_f64(gap.gap.lo()),
                to_f64(gap.gap.hi())
            ));
        }
        "C18" => {
            let fs = ctx.fs().map_err(e)?;
            let [c0, ci] = build::tail_conditions(fs).map_err(e)?;
            o.checks.push(check("C18.y0", "d/dy (w1~/v1) at y = 0", &c0, Relation::Eq, &Rational::zero()));
            o.checks.push(check("C18.yinf", "d/du (w1~/v1) at u = 1/y = 0", &ci, Relation::Eq, &Rational::zero()));
            for (k, t) in fs.tails.iter().enumerate() {
                let a = t.abs();
                o.checks.push(check(&format!("C18.lo{}", 36 + k), &format!("|(w1)_{}| > 1e-13", 36 + k), &a, Relation::Gt, &ten_pow_neg(13)));
                o.checks.push(check(&format!("C18.hi{}", 36 + k), &format!("|(w1)_{}| < 1e-11", 36 + k), &a, Relation::Lt, &ten_pow_neg(11)));
            }
        }
        "C19" => {
            let s = Constants::sin_factor();
            o.checks.push(check("C19.ball", "3.9 + 5e-4 <= c_N", &(&s + &r), Relation::Le, &Constants::c_n()));
            o.checks.push(check("C19.lip", "3.9 + 2*5e-4 <= c_N", &(&s + int(2) * &r), Relation::Le, &Constants::c_n()));
        }
        other => return Err(format!("unknown certificate {other}")),
    }
    Ok(o)
}

fn status_of(o: &Outcome) -> CertStatus {
    let failed = o.bounds.iter().any(|b| matches!(b.status, Status::Failed { .. })) || o.checks.iter().any(|c| !c.holds);
    if failed {
        CertStatus::Failed
    } else if o.bounds.iter().any(|b| !b.is_certified()) {
        CertStatus::Inconclusive
    } else {
        CertStatus::Verified
    }
}

fn ledger(records: &[CertificateRecord]) -> Vec<LedgerEntry> {
    let ok = |id: &str| records.iter().any(|r| r.id == id && r.status == CertStatus::Verified);
    let entries = [
        ("c_R", Constants::c_r(), "C1"),
        ("c_N", Constants::c_n(), "C19"),
        ("c_L", Constants::c_l(), "C7"),
        ("c_P", Constants::c_p(), "C8"),
        ("c_Q", Constants::c_q(), "C8"),
        ("c_L~", Constants::c_lt(), "C8"),
        ("c_eps", build::c_eps(), "C10"),
        ("c_w0", Constants::c_w0(), "C11"),
        ("r_exist", radius(), "C9"),
        ("r_near_origin", rat(3, 100), "C12"),
    ];
    entries
        .iter()
        .filter(|(_, _, p)| ok(p))
        .map(|(n, v, p)| LedgerEntry { name: n.to_string(), value: fmt_rational(v), provenance: p.to_string() })
        .collect()
}

const CHAIN_IDS: [&str; 5] = ["C7", "C8", "C9", "C12", "C19"];

/// Runs the requested certificates and their dependencies.
pub fn run(config: &Config, requested: &[String]) -> Result<ProofReport, PipelineError> {
    let start = Instant::now();
    let ctx = Context::new(config.clone())?;
    let ids = closure(requested)?;
    let mut records: Vec<CertificateRecord> = Vec::new();
    let mut times = BTreeMap::new();
    for id in ids {
        let entry = &CATALOGUE[cert_index(id).unwrap()];
        let blockers: Vec<&str> = entry
            .depends_on
            .iter()
            .copied()
            .filter(|d| records.iter().find(|r| r.id == *d).is_none_or(|r| r.status != CertStatus::Verified))
            .collect();
        let t = Instant::now();
        let mut rec = CertificateRecord {
            id: id.into(),
            title: entry.title.into(),
            depends_on: entry.depends_on.iter().map(|s| s.to_string()).collect(),
            status: CertStatus::Blocked,
            bounds: Vec::new(),
            checks: Vec::new(),
            notes: Vec::new(),
        };
        if !blockers.is_empty() {
            rec.notes.push(format!("blocked by {}", blockers.join(", ")));
        } else {
            match run_one(&ctx, id) {
                Ok(o) => {
                    rec.status = status_of(&o);
                    rec.bounds = o.bounds;
                    rec.checks = o.checks;
                    rec.notes = o.notes;
                }
                Err(msg) => {
                    rec.status = CertStatus::Failed;
                    rec.notes.push(format!("error: {msg}"));
                }
            }
        }
        times.insert(id.to_string(), t.elapsed().as_millis() as u64);
        records.push(rec);
    }
    let chains = records
        .iter()
        .filter(|r| CHAIN_IDS.contains(&r.id.as_str()))
        .flat_map(|r| r.checks.iter().cloned())
        .collect();
    Ok(ProofReport {
        verdict: verdict(&records),
        requested: requested.to_vec(),
        ledger: ledger(&records),
        chains,
        certificates: records,
        tables: ctx.tables.checksums.clone(),
        config: config.canonical(),
        timing: Some(Timing { total_ms: start.elapsed().as_millis() as u64, per_certificate_ms: times }),
    })
}

pub fn run_all(config: &Config) -> Result<ProofReport, PipelineError> {
    let all: Vec<String> = CATALOGUE.iter().map(|c| c.id.to_string()).collect();
    run(config, &all)
}

/// Re-runs a report under its embedded configuration.
pub fn rerun(report: &ProofReport) -> Result<ProofReport, PipelineError> {
    run(&Config::parse(&report.config)?, &report.requested)
}

/// Exit status convention: success iff every requested certificate (and its
/// dependencies) verified.
pub fn success(report: &ProofReport) -> bool {
    report.all_verified()
}

/// Parses `P/Q`, decimals or integers for CLI targets.
pub fn parse_target(s: &str) -> Option<Rational> {
    parse_rational(s).ok().filter(|r| r.is_positive())
}
