//! The shipped identity fixtures for antisymmetrized pairings, checked as one suite.

use rayon::prelude::*;
use serde_json::{json, Value};

use crate::dsl::parse_poly;
use crate::error::Result;
use crate::fixture::{self, Fixture, FixtureReport};
use crate::poly::PolyQ;

/// Fixture name and text, in suite order.
pub const FIXTURES: &[(&str, &str)] = &[
    ("L1-k4", include_str!("../../../fixtures/L1-k4.fix")),
    ("L1-k5", include_str!("../../../fixtures/L1-k5.fix")),
    ("L1-k6", include_str!("../../../fixtures/L1-k6.fix")),
    ("L2-square", include_str!("../../../fixtures/L2-square.fix")),
    ("L2-alpha", include_str!("../../../fixtures/L2-alpha.fix")),
    ("L3", include_str!("../../../fixtures/L3.fix")),
];

/// Dimensions at which every fixture is also evaluated through the tensor functor.
pub const ORACLE_NS: [usize; 3] = [8, 9, 10];

#[derive(Clone, Debug)]
pub struct LemmaReport {
    pub fixtures: Vec<FixtureReport>,
    /// Coefficient of the "alpha" check of L2-alpha, if it reduced to a single term.
    pub alpha: Option<PolyQ>,
}

impl LemmaReport {
    pub fn expected_alpha() -> PolyQ {
        parse_poly("(n-4)(n-6)(n-8)").expect("valid polynomial")
    }

    pub fn alpha_matches(&self) -> bool {
        self.alpha.as_ref() == Some(&Self::expected_alpha())
    }

    pub fn passed(&self) -> bool {
        self.alpha_matches() && self.fixtures.iter().all(FixtureReport::passed)
    }

    pub fn to_json(&self) -> Value {
        json!({
            "passed": self.passed(),
            "alpha": self.alpha.as_ref().map(PolyQ::factored),
            "alpha_expected": Self::expected_alpha().factored(),
            "fixtures": self.fixtures.iter().map(FixtureReport::to_json).collect::<Vec<_>>(),
        })
    }
}

pub fn parsed_fixtures() -> Result<Vec<Fixture>> {
    FIXTURES.iter().map(|(name, text)| Fixture::parse(name, text)).collect()
}

/// Runs every fixture formally and under the tensor oracle at `oracle_ns`.
pub fn lemma_suite_at(oracle_ns: &[usize]) -> Result<LemmaReport> {
    let fixtures = parsed_fixtures()?;
    let reports: Vec<FixtureReport> =
        fixtures.par_iter().map(|f| fixture::run(f, oracle_ns)).collect::<Result<_>>()?;
    let alpha = reports
        .iter()
        .find(|r| r.fixture == "L2-alpha")
        .and_then(|r| r.checks.iter().find(|c| c.name == "alpha"))
        .filter(|c| c.formal)
        .and_then(|c| c.coefficient());
    Ok(LemmaReport { fixtures: reports, alpha })
}

pub fn lemma_suite() -> Result<LemmaReport> {
    lemma_suite_at(&ORACLE_NS)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn formal_checks() {
        let r = lemma_suite_at(&[]).unwrap();
        assert!(r.alpha_matches(), "{:?}", r.alpha);
        let failing: Vec<String> = r
            .fixtures
            .iter()
            .flat_map(|f| f.checks.iter().filter(|c| !c.formal).map(move |c| format!("{}/{}", f.fixture, c.name)))
            .collect();
        assert_eq!(failing, ["L3/connecter", "L3/final"]);
    }

    #[test]
    fn oracle_at_small_dimension() {
        let r = lemma_suite_at(&[4]).unwrap();
        for f in &r.fixtures {
            for c in &f.checks {
                assert_eq!(c.oracle, vec![(4, c.formal)], "{}/{}", f.fixture, c.name);
            }
        }
    }
}
