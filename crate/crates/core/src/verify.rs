//! The batch verification suite and its schema-versioned JSON report.
//!
//! Reports carry no timings or host data, so a fixed [`RunConfig`] always
//! yields the same bytes.

use std::fmt::Write as _;

use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use crate::ajohnson::{factor_witt_sum, l1_rank, lower_bound_certificate};
use crate::conj::{conjugacy, SearchBudget};
use crate::decomp::{build_relators, gr_rank_table, verify_direct_sum_with, verify_t_sum, Graded};
use crate::endos::check_mccool_relations;
use crate::error::Error;
use crate::igroup::{check_relations, evaluate_yword, random_yword, render_yword, RelationKind};
use crate::rng::Lcg64;
use crate::IElem;

pub const SCHEMA: &str = "pik/1";

/// Longest random word in the normal-form fuzz.
pub const NORMAL_FORM_MAX_LEN: usize = 30;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Text,
}

/// Search bounds for the conjugacy fuzz. Planted conjugators and base words
/// have length at most `len`, and each planted search is seeded with the
/// length of its own conjugator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Budgets {
    pub len: usize,
    pub coset: usize,
    pub nilpotency: usize,
}

impl Default for Budgets {
    fn default() -> Self {
        Budgets { len: 8, coset: 8, nilpotency: 4 }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RunConfig {
    pub n: usize,
    pub max_degree: usize,
    pub budgets: Budgets,
    pub seed: u64,
    /// Cases per fuzz suite.
    pub cases: usize,
    /// Drops this type-(3) relator (0-based among that kind) before the
    /// decomposition checks.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub drop_relator: Option<usize>,
    #[serde(skip)]
    pub format: Format,
    #[serde(skip)]
    pub output: Option<std::path::PathBuf>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            n: 3,
            max_degree: 4,
            budgets: Budgets::default(),
            seed: 2024,
            cases: 200,
            drop_relator: None,
            format: Format::Json,
            output: None,
        }
    }
}

impl RunConfig {
    pub fn validate(&self) -> Result<(), Error> {
        let positive = [
            ("n", self.n),
            ("max_degree", self.max_degree),
            ("budget len", self.budgets.len),
            ("budget coset", self.budgets.coset),
            ("budget nilpotency", self.budgets.nilpotency),
            ("cases", self.cases),
        ];
        if let Some((name, _)) = positive.iter().find(|(_, v)| *v == 0) {
            return Err(Error::Precondition(format!("{name} must be positive")));
        }
        if self.n < 2 {
            return Err(Error::Precondition("n must be at least 2".into()));
        }
        if self.max_degree < 2 {
            return Err(Error::Precondition("max_degree must be at least 2".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub status: Status,
    pub details: Value,
}

impl Check {
    pub fn new(name: &str, passed: bool, details: Value) -> Self {
        let status = if passed { Status::Pass } else { Status::Fail };
        Check { name: name.to_string(), status, details }
    }

    fn errored(name: &str, e: &Error) -> Self {
        Check::new(name, false, json!({ "error": e.to_string() }))
    }

    pub fn passed(&self) -> bool {
        self.status == Status::Pass
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report {
    pub schema: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub config: Option<RunConfig>,
    pub checks: Vec<Check>,
}

impl Report {
    pub fn new(config: Option<RunConfig>, checks: Vec<Check>) -> Self {
        Report { schema: SCHEMA, config, checks }
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(Check::passed)
    }

    pub fn failing(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed())
    }

    /// Compact JSON with fields in declaration order.
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("report values serialize")
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for c in &self.checks {
            let tag = if c.passed() { "PASS" } else { "FAIL" };
            let _ = writeln!(out, "{tag} {}", c.name);
            if !c.passed() {
                let _ = writeln!(out, "  {}", c.details);
            }
        }
        let _ = writeln!(
            out,
            "{}",
            if self.passed() { "all checks passed" } else { "some checks failed" }
        );
        out
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Json => self.to_json(),
            Format::Text => self.to_text(),
        }
    }
}

pub fn emit_report(config: Option<RunConfig>, checks: Vec<Check>) -> String {
    Report::new(config, checks).to_json()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FuzzReport {
    pub n: usize,
    pub cases: usize,
    pub failures: Vec<String>,
}

impl FuzzReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Random generator words of length `1..=max_len`: collecting to normal form
/// and evaluating must agree with evaluating the word letter by letter.
pub fn normal_form_fuzz(n: usize, cases: usize, max_len: usize, rng: &mut Lcg64) -> FuzzReport {
    let words: Vec<_> = (0..cases)
        .map(|_| {
            let len = rng.range(1, max_len);
            random_yword(n, len, rng)
        })
        .collect();
    let failures = words
        .par_iter()
        .filter_map(|w| {
            let direct = evaluate_yword(n, w);
            match IElem::collect(n, w) {
                Ok(nf) if nf.to_endo() == direct => None,
                Ok(_) => Some(format!("mismatch for {}", render_yword(w))),
                Err(e) => Some(format!("{}: {e}", render_yword(w))),
            }
        })
        .collect();
    FuzzReport { n, cases, failures }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ConjFuzzReport {
    pub n: usize,
    pub planted: usize,
    pub found: usize,
    pub distinct: usize,
    pub refuted: usize,
    pub failures: Vec<String>,
}

impl ConjFuzzReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty() && self.found == self.planted && self.refuted == self.distinct
    }
}

/// Planted pairs `(x, g x g⁻¹)` with `|x|, |g| ≤ budgets.len`, each searched
/// with length budget `|g|`, followed by pairs with different
/// abelianizations, which must be refuted.
pub fn conjugacy_fuzz(
    n: usize,
    planted: usize,
    distinct: usize,
    budgets: Budgets,
    rng: &mut Lcg64,
) -> Result<ConjFuzzReport, Error> {
    let base = SearchBudget {
        coset: budgets.coset,
        nilpotency: budgets.nilpotency,
        ..SearchBudget::default()
    };
    let mut cases = Vec::with_capacity(planted);
    for _ in 0..planted {
        let x = IElem::collect(n, &random_yword(n, rng.range(1, budgets.len), rng))?;
        let lg = rng.range(1, budgets.len);
        let g = IElem::collect(n, &random_yword(n, lg, rng))?;
        let y = g.imul(&x)?.imul(&g.iinv())?;
        cases.push((x, y, g, lg));
    }
    let mut pairs = Vec::with_capacity(distinct);
    while pairs.len() < distinct {
        let x = IElem::collect(n, &random_yword(n, rng.range(1, budgets.len), rng))?;
        let y = IElem::collect(n, &random_yword(n, rng.range(1, budgets.len), rng))?;
        if x.abelianize() != y.abelianize() {
            pairs.push((x, y));
        }
    }
    let planted_out = cases
        .par_iter()
        .map(|(x, y, g, lg)| {
            let r = conjugacy(x, y, &SearchBudget { len: *lg, ..base })?;
            Ok(if r.is_conjugate() {
                None
            } else {
                Some(format!("planted x={x} g={g}: {:?}", r.verdict))
            })
        })
        .collect::<Result<Vec<_>, Error>>()?;
    let distinct_out = pairs
        .par_iter()
        .map(|(x, y)| {
            let r = conjugacy(x, y, &SearchBudget { len: budgets.len, ..base })?;
            Ok(if r.is_not_conjugate() {
                None
            } else {
                Some(format!("distinct x={x} y={y}: {:?}", r.verdict))
            })
        })
        .collect::<Result<Vec<_>, Error>>()?;
    let found = planted_out.iter().filter(|f| f.is_none()).count();
    let refuted = distinct_out.iter().filter(|f| f.is_none()).count();
    let failures = planted_out.into_iter().chain(distinct_out).flatten().collect();
    Ok(ConjFuzzReport { n, planted, found, distinct, refuted, failures })
}

fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("report values serialize")
}

fn run(name: &str, f: impl FnOnce() -> Result<(bool, Value), Error>) -> Check {
    match f() {
        Ok((passed, details)) => Check::new(name, passed, details),
        Err(e) => Check::errored(name, &e),
    }
}

/// Runs every check for the configured `n` and degree bound.
pub fn verify_all(config: &RunConfig) -> Result<Report, Error> {
    config.validate()?;
    let n = config.n;
    let max_m = config.max_degree;
    let mut rng = Lcg64::new(config.seed);
    let mut checks = Vec::new();

    checks.push(run("mccool_relations", || {
        let reports: Vec<_> = (2..=n).map(check_mccool_relations).collect();
        Ok((reports.iter().all(|r| r.passed()), to_value(&reports)))
    }));
    checks.push(run("presentation_relations", || {
        let reports: Vec<_> = (2..=n).map(check_relations).collect();
        Ok((reports.iter().all(|r| r.passed()), to_value(&reports)))
    }));
    let mut nf_rng = rng.fork();
    checks.push(run("normal_form_fuzz", || {
        let r = normal_form_fuzz(n, config.cases, NORMAL_FORM_MAX_LEN, &mut nf_rng);
        Ok((r.passed(), to_value(&r)))
    }));
    let mut conj_rng = rng.fork();
    checks.push(run("conjugacy_fuzz", || {
        let r = conjugacy_fuzz(n, config.cases, config.cases / 2, config.budgets, &mut conj_rng)?;
        Ok((r.passed(), to_value(&r)))
    }));

    let graded = Graded::new(n, max_m)?;
    let mut relators = build_relators(&graded)?;
    if let Some(k) = config.drop_relator {
        let idx = relators
            .relators
            .iter()
            .enumerate()
            .filter(|(_, r)| r.relation.kind == RelationKind::Three)
            .nth(k)
            .map(|(idx, _)| idx)
            .ok_or_else(|| Error::Index(format!("type-(3) relator {k} for n = {n}")))?;
        relators = relators.without(idx);
    }
    checks.push(run("direct_sum", || {
        let r = verify_direct_sum_with(&graded, &relators, max_m)?;
        Ok((r.passed(), to_value(&r)))
    }));
    checks.push(run("t_sum", || {
        let r = verify_t_sum(n, max_m)?;
        Ok((r.passed(), to_value(&r)))
    }));
    checks.push(run("gr_rank_table", || {
        let rows = gr_rank_table(n, max_m)?;
        Ok((rows.iter().all(|r| r.agrees()), to_value(&rows)))
    }));

    let weights = 1..max_m;
    checks.push(run("l1_rank", || {
        let mut rows = Vec::new();
        let mut ok = true;
        for c in weights.clone() {
            let rank = l1_rank(n, c, c + 2)?;
            let expected = factor_witt_sum(n, c);
            ok &= rank as u64 == expected;
            rows.push(json!({ "c": c, "rank": rank, "factor_sum": expected }));
        }
        Ok((ok, Value::Array(rows)))
    }));
    checks.push(run("rank_lower_bound", || {
        let mut rows = Vec::new();
        let mut ok = true;
        for c in weights.clone() {
            let b = lower_bound_certificate(n, c)?;
            ok &= b.certified;
            rows.push(json!({ "c": c, "lhs": b.lhs, "certified": b.certified }));
        }
        Ok((ok, Value::Array(rows)))
    }));
    Ok(Report::new(Some(config.clone()), checks))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_report() {
        assert_eq!(emit_report(None, vec![]), r#"{"schema":"pik/1","checks":[]}"#);
    }

    #[test]
    fn statuses() {
        let pass = emit_report(None, vec![Check::new("a", true, json!({}))]);
        assert_eq!(
            pass,
            r#"{"schema":"pik/1","checks":[{"name":"a","status":"pass","details":{}}]}"#
        );
        let fail = Report::new(None, vec![Check::new("b", false, json!({ "deficit": 1 }))]);
        assert!(!fail.passed());
        assert!(fail.to_json().contains(r#""status":"fail","details":{"deficit":1}"#));
    }

    #[test]
    fn rejects_zero_bounds() {
        let cfg = RunConfig { cases: 0, ..RunConfig::default() };
        assert!(verify_all(&cfg).is_err());
    }

    #[test]
    fn small_run_is_deterministic() {
        let cfg = RunConfig { n: 3, max_degree: 3, cases: 20, ..RunConfig::default() };
        let a = verify_all(&cfg).unwrap();
        let b = verify_all(&cfg).unwrap();
        assert!(a.passed(), "{}", a.to_text());
        assert_eq!(a.to_json(), b.to_json());
    }

    #[test]
    fn dropped_relator_fails() {
        let cfg = RunConfig {
            n: 3,
            max_degree: 2,
            cases: 5,
            drop_relator: Some(0),
            ..RunConfig::default()
        };
        let r = verify_all(&cfg).unwrap();
        let names: Vec<_> = r.failing().map(|c| c.name.as_str()).collect();
        assert_eq!(names, ["direct_sum"]);
        let ds = r.checks.iter().find(|c| c.name == "direct_sum").unwrap();
        assert_eq!(ds.details["per_degree"][0]["deficit"], 1);
    }
}
