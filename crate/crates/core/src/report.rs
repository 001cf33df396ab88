//! Gap reports: generate an instance, certify its fractional point, compute
//! the integer optimum and optionally the LP optimum, and set them beside
//! the closed-form lemma bounds.
//!
//! Every reported number is an exact rational with a display-only decimal
//! rendering and a provenance tag saying whether it was computed here or
//! comes from a closed-form bound.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::Signed;
use serde::{Deserialize, Serialize};

use crate::frames::{build_frame_family, FrameError};
use crate::graph::{GraphError, NodeId};
use crate::instances::{
    build_cgk_l, build_sym_pair, cheung_vector, extend_to_complete, objective, unit_extension, CgkParams,
    InstanceError, SymPathParams,
};
use crate::lift::{build_cgk_matrix, verify_one_round, LiftError, OneRoundReport, VerifyMode};
use crate::polytopes::{check_point, ConstraintWitness, PolytopeError, PolytopeKind};
use crate::rational::Rational;
use crate::solvers::{held_karp_path, held_karp_tour, lp_optimize, SolverError, MAX_DP_NODES};

/// Largest k accepted for CGK closed forms, which expand r^(k-1) exactly.
pub const MAX_FORMULA_K: u32 = 10_000;

/// Significant digits of decimal renderings.
pub const DECIMAL_DIGITS: usize = 20;

/// Renders `x` with `sig` significant digits, rounding half to even.
/// Magnitudes of 10^sig and above use scientific notation.
pub fn decimal(x: &Rational, sig: usize) -> String {
    let sig = sig.max(1);
    if x.is_zero() {
        return "0".to_string();
    }
    let p = x.numer().abs();
    let q = x.denom().clone();
    let ten = BigInt::from(10);
    let pow = |e: i64| ten.pow(e.unsigned_abs() as u32);
    // p/q compared with 10^e.
    let cmp = |e: i64| if e >= 0 { p.cmp(&(&q * pow(e))) } else { (&p * pow(e)).cmp(&q) };
    let mut e = p.to_string().len() as i64 - q.to_string().len() as i64;
    while cmp(e) == std::cmp::Ordering::Less {
        e -= 1;
    }
    while cmp(e + 1) != std::cmp::Ordering::Less {
        e += 1;
    }
    let shift = sig as i64 - 1 - e;
    let (num, den) = if shift >= 0 { (&p * pow(shift), q.clone()) } else { (p.clone(), &q * pow(shift)) };
    let (mut quo, rem) = num.div_rem(&den);
    let twice = &rem * 2u32;
    if twice > den || (twice == den && quo.is_odd()) {
        quo += 1u32;
    }
    if quo == pow(sig as i64) {
        quo /= 10u32;
        e += 1;
    }
    let digits = quo.to_string();
    let body = if e >= sig as i64 {
        format!("{}.{}e{e}", &digits[..1], &digits[1..])
    } else if e >= 0 {
        let int_len = (e + 1) as usize;
        if int_len >= digits.len() {
            format!("{digits}{}", "0".repeat(int_len - digits.len()))
        } else {
            format!("{}.{}", &digits[..int_len], &digits[int_len..])
        }
    } else {
        format!("0.{}{digits}", "0".repeat((-e - 1) as usize))
    };
    if x.is_negative() {
        format!("-{body}")
    } else {
        body
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Provenance {
    /// Computed exactly by this pipeline.
    Computed,
    /// A closed-form lower or upper bound evaluated at the parameters.
    LemmaBound,
    /// A closed-form ratio expression evaluated at the parameters.
    LemmaFormula,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Value {
    pub exact: Rational,
    pub decimal: String,
    pub provenance: Provenance,
}

impl Value {
    pub fn new(exact: Rational, provenance: Provenance) -> Value {
        Value { decimal: decimal(&exact, DECIMAL_DIGITS), exact, provenance }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum GapParams {
    Cgk { k: u32, r: u32 },
    Sympath { ell: u32, q: u32 },
}

impl GapParams {
    pub fn id(&self) -> String {
        match self {
            GapParams::Cgk { k, r } => format!("cgk-k{k}-r{r}"),
            GapParams::Sympath { ell, q } => format!("sympath-l{ell}-q{q}"),
        }
    }

    /// Lower bound on the integer optimum.
    pub fn int_bound(&self) -> Rational {
        match *self {
            GapParams::Cgk { k, r } => {
                let rk = BigInt::from(r).pow(k - 1);
                Rational::from(BigInt::from(2 * k as i64 - 1) * BigInt::from(r - 1) * rk)
            }
            GapParams::Sympath { ell, .. } => Rational::from_integer(3 * ell as i64 - 2),
        }
    }

    /// Upper bound on the fractional optimum.
    pub fn frac_bound(&self) -> Rational {
        match *self {
            GapParams::Cgk { k, r } => {
                let rk = BigInt::from(r).pow(k - 1);
                Rational::from(BigInt::from(k) * BigInt::from(r + 1) * rk * 4) / Rational::from_integer(3)
            }
            GapParams::Sympath { ell, q } => Rational::from_integer(2 * ell as i64 + 6 * q as i64 + 9),
        }
    }

    /// `(3/2)(k - 1/2)(r - 1) / (k (r + 1))` or `(3 ell - 2) / (2 ell + 6 q + 9)`.
    pub fn lemma_ratio(&self) -> Rational {
        match *self {
            GapParams::Cgk { k, r } => {
                let (k, r) = (k as i64, r as i64);
                Rational::new(3, 2) * (Rational::from_integer(k) - Rational::new(1, 2)) * Rational::from_integer(r - 1)
                    / Rational::from_integer(k * (r + 1))
            }
            GapParams::Sympath { ell, q } => Rational::new(3 * ell as i64 - 2, 2 * ell as i64 + 6 * q as i64 + 9),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CertificateKind {
    /// The point itself lies in the relaxation.
    RoundZero,
    /// A protection matrix certifies the point after one lift round.
    OneRound,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GapReport {
    pub id: String,
    pub params: GapParams,
    pub nodes: Option<usize>,
    pub edges: Option<usize>,
    pub total_weight: Option<Value>,
    pub int_bound: Value,
    pub int_opt: Option<Value>,
    pub int_witness: Option<Vec<NodeId>>,
    pub frac_bound: Value,
    pub fractional: Option<Value>,
    pub certificate: Option<CertificateKind>,
    pub lp_polytope: Option<PolytopeKind>,
    pub lp: Option<Value>,
    pub lemma_ratio: Value,
    pub observed_ratio: Option<Value>,
    pub limit: Rational,
    pub note: Option<String>,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct GapOptions {
    /// Also solve the LP relaxation on the metric.
    pub lp: bool,
    /// Evaluate the closed forms only; build no graphs.
    pub formula_only: bool,
}

#[derive(Debug, thiserror::Error)]
pub enum ReportError {
    #[error(transparent)]
    Instance(#[from] InstanceError),
    #[error(transparent)]
    Frame(#[from] FrameError),
    #[error(transparent)]
    Lift(#[from] LiftError),
    #[error(transparent)]
    Solver(#[from] SolverError),
    #[error(transparent)]
    Polytope(#[from] PolytopeError),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error("protection matrix rejected with {} violation(s)", .0.violations.len())]
    Certificate(Box<OneRoundReport>),
    #[error("{stage}: point rejected: {witness}")]
    Point { stage: &'static str, witness: Box<ConstraintWitness> },
}

impl GapReport {
    fn skeleton(params: GapParams) -> GapReport {
        GapReport {
            id: params.id(),
            params,
            nodes: None,
            edges: None,
            total_weight: None,
            int_bound: Value::new(params.int_bound(), Provenance::LemmaBound),
            int_opt: None,
            int_witness: None,
            frac_bound: Value::new(params.frac_bound(), Provenance::LemmaBound),
            fractional: None,
            certificate: None,
            lp_polytope: None,
            lp: None,
            lemma_ratio: Value::new(params.lemma_ratio(), Provenance::LemmaFormula),
            observed_ratio: None,
            limit: Rational::new(3, 2),
            note: None,
        }
    }

    fn finish(mut self) -> GapReport {
        if let (Some(i), Some(f)) = (&self.int_opt, &self.fractional) {
            if f.exact.is_positive() {
                self.observed_ratio = Some(Value::new(&i.exact / &f.exact, Provenance::Computed));
            }
        }
        if self.int_opt.is_none() && self.note.is_none() && self.nodes.is_some() {
            self.note = Some(format!("integer side above {MAX_DP_NODES} nodes: lemma bound only"));
        }
        self
    }

    /// Recomputes every derived field from the stored exact values; returns
    /// the name of the first field that disagrees.
    pub fn recheck(&self) -> Result<(), &'static str> {
        let p = self.params;
        if self.lemma_ratio.exact != p.lemma_ratio()
            || self.lemma_ratio.exact != &self.int_bound.exact / &self.frac_bound.exact
        {
            return Err("lemma_ratio");
        }
        if self.int_bound.exact != p.int_bound() {
            return Err("int_bound");
        }
        if self.frac_bound.exact != p.frac_bound() {
            return Err("frac_bound");
        }
        let expected = match (&self.int_opt, &self.fractional) {
            (Some(i), Some(f)) if f.exact.is_positive() => Some(&i.exact / &f.exact),
            _ => None,
        };
        if self.observed_ratio.as_ref().map(|v| v.exact.clone()) != expected {
            return Err("observed_ratio");
        }
        let values = [
            Some(&self.int_bound),
            Some(&self.frac_bound),
            Some(&self.lemma_ratio),
            self.total_weight.as_ref(),
            self.int_opt.as_ref(),
            self.fractional.as_ref(),
            self.lp.as_ref(),
            self.observed_ratio.as_ref(),
        ];
        if values.into_iter().flatten().any(|v| v.decimal != decimal(&v.exact, DECIMAL_DIGITS)) {
            return Err("decimal");
        }
        Ok(())
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

impl fmt::Display for GapReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let show = |v: &Option<Value>| v.as_ref().map_or("-".to_string(), |v| format!("{} ({})", v.exact, v.decimal));
        writeln!(f, "{}", self.id)?;
        if let (Some(n), Some(m)) = (self.nodes, self.edges) {
            writeln!(f, "  nodes {n}, edges {m}, total weight {}", show(&self.total_weight))?;
        }
        writeln!(f, "  integer optimum      {}", show(&self.int_opt))?;
        writeln!(f, "  integer lower bound  {} ({})", self.int_bound.exact, self.int_bound.decimal)?;
        let cert = match self.certificate {
            Some(CertificateKind::OneRound) => " [one-round certificate]",
            Some(CertificateKind::RoundZero) => " [feasible in the relaxation]",
            None => "",
        };
        writeln!(f, "  fractional value     {}{cert}", show(&self.fractional))?;
        writeln!(f, "  fractional bound     {} ({})", self.frac_bound.exact, self.frac_bound.decimal)?;
        writeln!(f, "  lp optimum           {}", show(&self.lp))?;
        writeln!(f, "  observed ratio       {}", show(&self.observed_ratio))?;
        write!(f, "  lemma ratio          {} ({})", self.lemma_ratio.exact, self.lemma_ratio.decimal)?;
        if let Some(note) = &self.note {
            write!(f, "\n  note: {note}")?;
        }
        Ok(())
    }
}

/// CGK pipeline on L_{k,r}: frames, protection matrix against AT_bal,
/// metric, Held-Karp tour and optionally the AT_bal LP.
pub fn cgk_gap_report(k: u32, r: u32, opts: GapOptions) -> Result<GapReport, ReportError> {
    if k < 1 || r < 2 {
        return Err(InstanceError::InvalidCgk { k, r }.into());
    }
    if k > MAX_FORMULA_K {
        return Err(InstanceError::TooLarge { limit: MAX_FORMULA_K as u64 }.into());
    }
    let mut report = GapReport::skeleton(GapParams::Cgk { k, r });
    if opts.formula_only {
        report.note = Some("formula only: lemma ratio approaches 3/2 as k and r grow".to_string());
        return Ok(report);
    }
    let l = build_cgk_l(CgkParams::new(k, r)?)?;
    let fam = build_frame_family(&l)?;
    let (x, mat) = build_cgk_matrix(&l, &fam)?;
    let check = verify_one_round(PolytopeKind::AtBal, &l, &x, &mat, VerifyMode::FailFast)?;
    if !check.certified() {
        return Err(ReportError::Certificate(Box::new(check)));
    }
    let (inst, xhat) = extend_to_complete(&l, &x)?;
    report.nodes = Some(l.n());
    report.edges = Some(l.m());
    report.total_weight = Some(Value::new(l.total_weight(), Provenance::Computed));
    report.fractional = Some(Value::new(objective(&inst, &xhat), Provenance::Computed));
    report.certificate = Some(CertificateKind::OneRound);
    if inst.n() <= MAX_DP_NODES {
        let dp = held_karp_tour(&inst)?;
        report.int_opt = Some(Value::new(dp.value, Provenance::Computed));
        report.int_witness = Some(dp.witness);
    }
    if opts.lp {
        let lp = lp_optimize(PolytopeKind::AtBal, &inst)?;
        report.lp_polytope = Some(PolytopeKind::AtBal);
        report.lp = Some(Value::new(lp.value, Provenance::Computed));
    }
    Ok(report.finish())
}

/// Symmetric-path pipeline on G_{ell,q}: Cheung point checked in SP and its
/// unit extension in ST of G', metric, Held-Karp path and optionally the SP LP.
pub fn sympath_gap_report(ell: u32, q: u32, opts: GapOptions) -> Result<GapReport, ReportError> {
    if ell < 1 {
        return Err(InstanceError::InvalidSym { ell, q }.into());
    }
    let mut report = GapReport::skeleton(GapParams::Sympath { ell, q });
    if opts.formula_only {
        report.note = Some("formula only: lemma ratio approaches 3/2 as ell grows with q small".to_string());
        return Ok(report);
    }
    let p = SymPathParams::new(ell, q)?;
    let (g, gp) = build_sym_pair(p)?;
    let (s, t) = (g.s().expect("generator sets s"), g.t().expect("generator sets t"));
    let x = cheung_vector(p)?;
    let sp = PolytopeKind::Sp { s, t };
    if let Some(w) = check_point(sp, &g, &x)? {
        return Err(ReportError::Point { stage: "cheung point in SP", witness: Box::new(w) });
    }
    if let Some(w) = check_point(PolytopeKind::St, &gp, &unit_extension(&gp, &x))? {
        return Err(ReportError::Point { stage: "unit extension in ST", witness: Box::new(w) });
    }
    let (inst, xhat) = extend_to_complete(&g, &x)?;
    report.nodes = Some(g.n());
    report.edges = Some(g.m());
    report.total_weight = Some(Value::new(g.total_weight(), Provenance::Computed));
    report.fractional = Some(Value::new(objective(&inst, &xhat), Provenance::Computed));
    report.certificate = Some(CertificateKind::RoundZero);
    if inst.n() <= MAX_DP_NODES {
        let dp = held_karp_path(&inst, s, t)?;
        report.int_opt = Some(Value::new(dp.value, Provenance::Computed));
        report.int_witness = Some(dp.witness);
    }
    if opts.lp {
        let lp = lp_optimize(sp, &inst)?;
        report.lp_polytope = Some(sp);
        report.lp = Some(Value::new(lp.value, Provenance::Computed));
    }
    Ok(report.finish())
}

pub fn gap_report(params: GapParams, opts: GapOptions) -> Result<GapReport, ReportError> {
    match params {
        GapParams::Cgk { k, r } => cgk_gap_report(k, r, opts),
        GapParams::Sympath { ell, q } => sympath_gap_report(ell, q, opts),
    }
}

/// Header of the sweep table; the first two columns are ell and q for the
/// symmetric-path family.
pub const CSV_HEADER: &str = "k,r,n,m,W,IntOPT_bound,IntOPT,frac_value,lp_value,lemma_ratio";

/// One CSV row with exact rationals; missing values are empty cells.
pub fn csv_row(report: &GapReport) -> String {
    let (a, b) = match report.params {
        GapParams::Cgk { k, r } => (k, r),
        GapParams::Sympath { ell, q } => (ell, q),
    };
    let opt = |v: &Option<Value>| v.as_ref().map_or(String::new(), |v| v.exact.to_string());
    let count = |c: Option<usize>| c.map_or(String::new(), |c| c.to_string());
    [
        a.to_string(),
        b.to_string(),
        count(report.nodes),
        count(report.edges),
        opt(&report.total_weight),
        report.int_bound.exact.to_string(),
        opt(&report.int_opt),
        opt(&report.fractional),
        opt(&report.lp),
        report.lemma_ratio.exact.to_string(),
    ]
    .join(",")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::q;

    #[test]
    fn decimal_rendering() {
        assert_eq!(decimal(&q(9, 16), 20), "0.56250000000000000000");
        assert_eq!(decimal(&q(1, 3), 5), "0.33333");
        assert_eq!(decimal(&q(2, 3), 5), "0.66667");
        assert_eq!(decimal(&q(-28, 1), 4), "-28.00");
        assert_eq!(decimal(&q(123456, 1), 6), "123456");
        assert_eq!(decimal(&q(123456, 1), 3), "1.23e5");
        assert_eq!(decimal(&q(1, 700), 2), "0.0014");
        assert_eq!(decimal(&q(0, 1), 20), "0");
        // Ties go to the even neighbour.
        assert_eq!(decimal(&q(25, 1000), 1), "0.02");
        assert_eq!(decimal(&q(35, 1000), 1), "0.04");
        assert_eq!(decimal(&q(999, 1000), 2), "1.0");
    }

    #[test]
    fn cgk_formulas() {
        let p = GapParams::Cgk { k: 2, r: 3 };
        assert_eq!(p.lemma_ratio(), q(9, 16));
        assert_eq!(p.int_bound(), q(18, 1));
        assert_eq!(p.frac_bound(), q(32, 1));
        let big = GapParams::Cgk { k: 100, r: 100 }.lemma_ratio();
        assert_eq!(decimal(&big, 5), "1.4629");
        assert!(big < q(3, 2));
    }

    #[test]
    fn formula_only_report_builds_no_graph() {
        let r = cgk_gap_report(100, 100, GapOptions { lp: false, formula_only: true }).unwrap();
        assert!(r.nodes.is_none());
        assert!(r.note.as_deref().unwrap().contains("approaches 3/2"));
        assert_eq!(r.lemma_ratio.provenance, Provenance::LemmaFormula);
        r.recheck().unwrap();
    }

    #[test]
    fn sympath_report_small() {
        let r = sympath_gap_report(1, 0, GapOptions::default()).unwrap();
        assert_eq!(r.fractional.as_ref().unwrap().exact, q(11, 1));
        assert_eq!(r.certificate, Some(CertificateKind::RoundZero));
        r.recheck().unwrap();
        assert_eq!(csv_row(&r).split(',').count(), CSV_HEADER.split(',').count());
    }

    #[test]
    fn tampered_report_fails_recheck() {
        let mut r = cgk_gap_report(1, 3, GapOptions::default()).unwrap();
        r.recheck().unwrap();
        r.observed_ratio = Some(Value::new(q(1, 1), Provenance::Computed));
        assert_eq!(r.recheck(), Err("observed_ratio"));
    }
}
