//! Identity fixtures: "let name = expr" and "check name: lhs == rhs" stanzas.
//!
//! A stanza starts on a line whose first character is not blank; indented lines continue
//! it. "#" starts a comment.

use std::collections::BTreeMap;
use std::path::Path;

use rayon::prelude::*;
use serde_json::{json, Value};

use crate::dsl::{self, Env, Expr, ExprKind, Pos, TensorEnv};
use crate::error::{Error, Result};
use crate::partlin::PartLin;
use crate::poly::PolyQ;
use crate::scalar::HybridRational;
use crate::tensor::SparseTensor;
use crate::wedge::{self, eval_wedge, WedgeEnv};

#[derive(Clone, Debug, PartialEq)]
pub enum Stanza {
    Let { name: String, expr: Expr },
    Check { name: String, lhs: Expr, rhs: Expr },
}

#[derive(Clone, Debug, PartialEq)]
pub struct Fixture {
    pub name: String,
    pub stanzas: Vec<Stanza>,
}

fn pos_at(text: &str, offset: usize) -> Pos {
    let before = &text[..offset];
    let line = before.matches('\n').count() + 1;
    let col = before.rsplit('\n').next().map_or(0, |l| l.chars().count()) + 1;
    Pos { line, col }
}

fn err_at<T>(text: &str, offset: usize, msg: impl Into<String>) -> Result<T> {
    let p = pos_at(text, offset);
    Err(Error::Parse { line: p.line, col: p.col, msg: msg.into() })
}

/// Byte offset of `part` inside `whole`, both from the same allocation.
fn offset_in(whole: &str, part: &str) -> usize {
    part.as_ptr() as usize - whole.as_ptr() as usize
}

fn valid_name(s: &str) -> bool {
    !s.is_empty() && s.chars().all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '-' || c == '.')
}

fn strip_comment(line: &str) -> &str {
    line.split('#').next().unwrap_or("")
}

impl Fixture {
    pub fn parse(name: &str, text: &str) -> Result<Fixture> {
        // stanza spans as (start, end) byte offsets
        let mut spans: Vec<(usize, usize)> = Vec::new();
        let mut offset = 0;
        for line in text.split_inclusive('\n') {
            let body = strip_comment(line);
            if !body.trim().is_empty() {
                if line.starts_with(char::is_whitespace) {
                    match spans.last_mut() {
                        Some(s) => s.1 = offset + line.len(),
                        None => return err_at(text, offset, "continuation line without a stanza"),
                    }
                } else {
                    spans.push((offset, offset + line.len()));
                }
            }
            offset += line.len();
        }
        let mut stanzas = Vec::with_capacity(spans.len());
        let mut names = std::collections::BTreeSet::new();
        for (a, b) in spans {
            let s = parse_stanza(text, &text[a..b])?;
            if let Stanza::Let { name, .. } = &s {
                if !names.insert(name.clone()) {
                    return err_at(text, a, format!("{name:?} is already defined"));
                }
            }
            stanzas.push(s);
        }
        Ok(Fixture { name: name.to_string(), stanzas })
    }

    /// Reads `path`, or `path` with a ".fix" extension when the bare path does not exist.
    pub fn load(path: &Path) -> Result<Fixture> {
        let candidates = [path.to_path_buf(), path.with_extension("fix")];
        let found = candidates.iter().find(|p| p.is_file());
        let Some(file) = found else {
            return Err(Error::InvalidInput(format!("fixture {} not found", path.display())));
        };
        let text = std::fs::read_to_string(file)
            .map_err(|e| Error::InvalidInput(format!("cannot read {}: {e}", file.display())))?;
        let name = file.file_stem().and_then(|s| s.to_str()).unwrap_or("fixture");
        Fixture::parse(name, &text)
    }
}

fn parse_stanza(text: &str, stanza: &str) -> Result<Stanza> {
    let start = offset_in(text, stanza);
    let expr_at = |part: &str| {
        let body = strip_comment_block(part);
        dsl::parse_at(&body, pos_at(text, offset_in(text, part)))
    };
    if let Some(rest) = stanza.strip_prefix("let ") {
        let Some((name, expr)) = rest.split_once('=') else {
            return err_at(text, start, "expected 'let name = expr'");
        };
        let name = name.trim();
        if !valid_name(name) {
            return err_at(text, start + 4, format!("invalid name {name:?}"));
        }
        return Ok(Stanza::Let { name: name.to_string(), expr: expr_at(expr)? });
    }
    if let Some(rest) = stanza.strip_prefix("check ") {
        let Some((name, body)) = rest.split_once(':') else {
            return err_at(text, start, "expected 'check name: lhs == rhs'");
        };
        let name = name.trim();
        if !valid_name(name) {
            return err_at(text, start + 6, format!("invalid name {name:?}"));
        }
        let Some((lhs, rhs)) = body.split_once("==") else {
            return err_at(text, offset_in(text, body), "expected 'lhs == rhs'");
        };
        return Ok(Stanza::Check { name: name.to_string(), lhs: expr_at(lhs)?, rhs: expr_at(rhs)? });
    }
    err_at(text, start, "expected 'let' or 'check'")
}

/// Blanks out comments while keeping byte positions.
fn strip_comment_block(part: &str) -> String {
    part.split_inclusive('\n')
        .map(|line| match line.find('#') {
            Some(i) => {
                let tail = if line.ends_with('\n') { "\n" } else { "" };
                format!("{}{}{}", &line[..i], " ".repeat(line[i..].trim_end_matches('\n').len()), tail)
            }
            None => line.to_string(),
        })
        .collect()
}

/// Outcome of one check: formal comparison plus the tensor oracle at each N.
#[derive(Clone, Debug)]
pub struct CheckOutcome {
    pub name: String,
    pub lhs: PartLin,
    pub rhs: PartLin,
    pub formal: bool,
    pub difference: PartLin,
    /// c when the right-hand side is written scale(c, …).
    pub scale: Option<PolyQ>,
    pub oracle: Vec<(usize, bool)>,
}

impl CheckOutcome {
    pub fn passed(&self) -> bool {
        self.formal && self.oracle.iter().all(|(_, ok)| *ok)
    }

    /// The scale of the right-hand side, or the coefficient when a side is a single multiple
    /// of one partition.
    pub fn coefficient(&self) -> Option<PolyQ> {
        self.scale.clone().or_else(|| {
            dsl::single_coefficient(&self.rhs).or_else(|| dsl::single_coefficient(&self.lhs)).map(|(c, _)| c)
        })
    }

    pub fn to_json(&self) -> Value {
        let oracle: Vec<Value> = self.oracle.iter().map(|(n, ok)| json!({"n": n, "equal": ok})).collect();
        json!({
            "check": self.name,
            "formal": self.formal,
            "oracle": oracle,
            "coefficient": self.coefficient().map(|c| c.factored()),
            "difference": if self.formal { Value::Null } else { self.difference.to_json() },
            "lhs_terms": self.lhs.len(),
            "rhs_terms": self.rhs.len(),
        })
    }
}

#[derive(Clone, Debug)]
pub struct FixtureReport {
    pub fixture: String,
    pub checks: Vec<CheckOutcome>,
}

impl FixtureReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(CheckOutcome::passed)
    }

    pub fn to_json(&self) -> Value {
        json!({
            "fixture": self.fixture,
            "passed": self.passed(),
            "checks": self.checks.iter().map(CheckOutcome::to_json).collect::<Vec<_>>(),
        })
    }
}

/// Evaluates every stanza in order; checks are compared formally and at each oracle N.
pub fn run(f: &Fixture, oracle_ns: &[usize]) -> Result<FixtureReport> {
    let mut env = Env::new();
    let mut checks = Vec::new();
    for s in &f.stanzas {
        match s {
            Stanza::Let { name, expr } => {
                let v = dsl::eval(expr, &env)?;
                env.bind(name, v);
            }
            Stanza::Check { name, lhs, rhs } => {
                let (l, r) = (dsl::eval(lhs, &env)?, dsl::eval(rhs, &env)?);
                if l.arity() != r.arity() {
                    return Err(Error::Arity(format!(
                        "{}: check {name} compares P{:?} with P{:?}",
                        lhs.pos,
                        l.arity(),
                        r.arity()
                    )));
                }
                let difference = l.sub(&r)?;
                checks.push(CheckOutcome {
                    name: name.clone(),
                    formal: difference.is_empty(),
                    lhs: l,
                    rhs: r,
                    difference,
                    scale: match &rhs.kind {
                        ExprKind::Scale(c, _) => Some(c.clone()),
                        _ => None,
                    },
                    oracle: Vec::new(),
                });
            }
        }
    }
    let verdicts: Vec<Vec<(usize, bool)>> = oracle_ns
        .par_iter()
        .map(|&n| oracle_at(f, n))
        .collect::<Result<_>>()?;
    for (i, c) in checks.iter_mut().enumerate() {
        c.oracle = oracle_ns.iter().zip(&verdicts).map(|(&n, v)| (n, v[i].1)).collect();
    }
    Ok(FixtureReport { fixture: f.name.clone(), checks })
}

/// Evaluates the whole fixture as tensors at N, returning one verdict per check.
///
/// Checks between antisymmetric expressions use the restricted two-point form; the rest
/// fall back to full tensors, computing referenced lets on demand.
fn oracle_at(f: &Fixture, n: usize) -> Result<Vec<(usize, bool)>> {
    let mut wedges: WedgeEnv<HybridRational> = WedgeEnv::new();
    let mut full = FullEnv { lets: BTreeMap::new(), values: TensorEnv::new(), n };
    let mut inline: BTreeMap<String, Expr> = BTreeMap::new();
    let mut out = Vec::new();
    for s in &f.stanzas {
        match s {
            Stanza::Let { name, expr } => {
                full.lets.insert(name.clone(), expr.clone());
                let expr = dsl::substitute(expr, &inline);
                if wedge::deferred(&expr).is_some() {
                    inline.insert(name.clone(), expr);
                    wedges.remove(name);
                    continue;
                }
                match eval_wedge(&expr, &wedges, n)? {
                    Some(w) => wedges.insert(name.clone(), w),
                    None => wedges.remove(name),
                };
            }
            Stanza::Check { lhs, rhs, .. } => {
                let (l, r) = (dsl::substitute(lhs, &inline), dsl::substitute(rhs, &inline));
                let fast = match (eval_wedge(&l, &wedges, n)?, eval_wedge(&r, &wedges, n)?) {
                    (Some(l), Some(r)) if l.is_antisymmetric() && r.is_antisymmetric() => Some(l.t == r.t),
                    _ => None,
                };
                let equal = match fast {
                    Some(v) => v,
                    None => full.eval(lhs)? == full.eval(rhs)?,
                };
                out.push((n, equal));
            }
        }
    }
    Ok(out)
}

/// Full tensor values of lets, computed only when a check needs them.
struct FullEnv {
    lets: BTreeMap<String, Expr>,
    values: TensorEnv<HybridRational>,
    n: usize,
}

impl FullEnv {
    fn eval(&mut self, e: &Expr) -> Result<SparseTensor<HybridRational>> {
        for name in dsl::names_in(e) {
            if !self.values.contains_key(&name) {
                if let Some(expr) = self.lets.get(&name).cloned() {
                    let v = self.eval(&expr)?;
                    self.values.insert(name, v);
                }
            }
        }
        dsl::eval_tensor(e, &self.values, self.n)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const SAMPLE: &str = "# antisymmetrizer facts
let a = asym(id2)
check idempotent: a * a == a
check loop:
    cap * cup
    == scale(n, P(0,0){})   # trailing comment
check wrong: a == id2
";

    #[test]
    fn parses_and_runs() {
        let f = Fixture::parse("sample", SAMPLE).unwrap();
        assert_eq!(f.stanzas.len(), 4);
        let r = run(&f, &[2, 3]).unwrap();
        assert!(r.checks[0].passed() && r.checks[1].passed());
        assert!(!r.checks[2].formal);
        assert_eq!(r.checks[2].oracle, vec![(2, false), (3, false)]);
        assert_eq!(r.checks[1].coefficient(), Some(PolyQ::n()));
        assert!(!r.passed());
    }

    #[test]
    fn error_positions_are_file_relative() {
        let text = "let a = id2\ncheck c:\n    a * )\n    == a\n";
        match Fixture::parse("x", text) {
            Err(Error::Parse { line, col, .. }) => assert_eq!((line, col), (3, 9)),
            other => panic!("{other:?}"),
        }
        assert!(Fixture::parse("x", "  let a = id2\n").is_err());
        assert!(Fixture::parse("x", "frobnicate\n").is_err());
        assert!(Fixture::parse("x", "let a = id2\nlet a = cross\n").is_err());
    }

    #[test]
    fn oracle_can_disagree_with_formal_result() {
        // at N = 1 every partition has the same tensor
        let f = Fixture::parse("x", "check c: id2 == cross\n").unwrap();
        let r = run(&f, &[1, 2]).unwrap();
        assert!(!r.checks[0].formal);
        assert_eq!(r.checks[0].oracle, vec![(1, true), (2, false)]);
    }
}
