//! Named, versioned verification suites, one per acceptance criterion.
//!
//! A suite returns scalar checks of the form `value <relation> tolerance`. Tolerances can be
//! overridden by check name; the pass flag is then recomputed from the stored value.

mod kernel;
mod norms;
mod solve;
mod spectral;
mod tent;

use crate::error::{LabError, Result};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::Instant;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Relation {
    #[serde(rename = "<=")]
    AtMost,
    #[serde(rename = "<")]
    Below,
    #[serde(rename = "==")]
    Equal,
}

impl Relation {
    pub fn holds(self, value: f64, tol: f64) -> bool {
        match self {
            Relation::AtMost => value <= tol,
            Relation::Below => value < tol,
            Relation::Equal => value == tol,
        }
    }

    pub fn symbol(self) -> &'static str {
        match self {
            Relation::AtMost => "<=",
            Relation::Below => "<",
            Relation::Equal => "==",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckOutcome {
    pub name: String,
    pub pass: bool,
    pub value: f64,
    pub relation: Relation,
    pub tolerance: f64,
    pub detail: String,
}

impl CheckOutcome {
    pub fn new(name: &str, value: f64, relation: Relation, tolerance: f64, detail: impl Into<String>) -> Self {
        Self {
            name: name.to_string(),
            pass: relation.holds(value, tolerance),
            value,
            relation,
            tolerance,
            detail: detail.into(),
        }
    }

    pub fn at_most(name: &str, value: f64, tolerance: f64, detail: impl Into<String>) -> Self {
        Self::new(name, value, Relation::AtMost, tolerance, detail)
    }

    pub fn below(name: &str, value: f64, tolerance: f64, detail: impl Into<String>) -> Self {
        Self::new(name, value, Relation::Below, tolerance, detail)
    }

    /// A count of failures that must be zero.
    pub fn none(name: &str, violations: usize, detail: impl Into<String>) -> Self {
        Self::new(name, violations as f64, Relation::Equal, 0.0, detail)
    }

    fn failed(name: &str, detail: String) -> Self {
        Self { name: name.to_string(), pass: false, value: f64::NAN, relation: Relation::AtMost, tolerance: 0.0, detail }
    }
}

/// A line of plot data attached to a suite report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Series {
    pub name: String,
    pub x_label: String,
    pub y_label: String,
    pub x: Vec<f64>,
    pub y: Vec<f64>,
}

impl Series {
    pub fn new(name: impl Into<String>, x_label: &str, y_label: &str, x: Vec<f64>, y: Vec<f64>) -> Self {
        Self { name: name.into(), x_label: x_label.into(), y_label: y_label.into(), x, y }
    }
}

#[derive(Debug, Clone, Default)]
pub struct SuiteOutput {
    pub checks: Vec<CheckOutcome>,
    pub series: Vec<Series>,
}

impl SuiteOutput {
    fn push(&mut self, c: CheckOutcome) {
        self.checks.push(c);
    }
}

pub struct Suite {
    pub criterion: u8,
    pub name: &'static str,
    pub version: u32,
    pub title: &'static str,
    /// Wall-clock budget in seconds, when the criterion sets one.
    pub runtime_limit: Option<f64>,
    run: fn() -> Result<SuiteOutput>,
}

/// Deterministic part of a suite run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub criterion: u8,
    pub name: String,
    pub version: u32,
    pub title: String,
    pub pass: bool,
    pub runtime_limit: Option<f64>,
    pub within_runtime: bool,
    pub checks: Vec<CheckOutcome>,
    pub series: Vec<Series>,
}

#[derive(Debug, Clone)]
pub struct SuiteRun {
    pub report: SuiteReport,
    pub seconds: f64,
}

pub static SUITES: [Suite; 15] = [
    Suite {
        criterion: 1,
        name: "semigroup",
        version: 1,
        title: "spectral identities: semigroup law, Leray projection, transform round trip",
        runtime_limit: Some(5.0),
        run: spectral::semigroup,
    },
    Suite {
        criterion: 2,
        name: "kernels",
        version: 1,
        title: "kernel fidelity: Gaussian limit, self-similarity, Oseen trace",
        runtime_limit: Some(30.0),
        run: kernel::fidelity,
    },
    Suite {
        criterion: 3,
        name: "decay",
        version: 1,
        title: "kernel decay envelopes M_k^(1/k), k = 1..6",
        runtime_limit: Some(120.0),
        run: kernel::decay,
    },
    Suite { criterion: 4, name: "qnorm-oracle", version: 1, title: "Q-norm against brute-force sums", runtime_limit: None, run: norms::oracle },
    Suite { criterion: 5, name: "scaling", version: 1, title: "scaling invariance of the discrete Q-norm", runtime_limit: None, run: norms::scaling },
    Suite { criterion: 6, name: "monotonicity", version: 1, title: "per-cube monotonicity in alpha", runtime_limit: None, run: norms::monotonicity },
    Suite {
        criterion: 7,
        name: "characterization",
        version: 1,
        title: "Q-norm against Carleson-type norms",
        runtime_limit: None,
        run: norms::characterization,
    },
    Suite {
        criterion: 8,
        name: "tent",
        version: 1,
        title: "tent atoms, decompositions, pairing, capacity",
        runtime_limit: None,
        run: tent::machinery,
    },
    Suite {
        criterion: 9,
        name: "capacitary-embedding",
        version: 1,
        title: "Carleson measure against Choquet integral",
        runtime_limit: None,
        run: tent::embedding,
    },
    Suite {
        criterion: 10,
        name: "picard",
        version: 1,
        title: "Picard contraction below the located threshold",
        runtime_limit: Some(60.0),
        run: solve::contraction,
    },
    Suite { criterion: 11, name: "residual", version: 1, title: "mild-solution PDE residual", runtime_limit: None, run: solve::residuals },
    Suite {
        criterion: 12,
        name: "covariance",
        version: 1,
        title: "scaling covariance of solutions",
        runtime_limit: None,
        run: solve::covariance,
    },
    Suite {
        criterion: 13,
        name: "regularity",
        version: 1,
        title: "weighted derivative norms and their refinement stability",
        runtime_limit: None,
        run: solve::regularity,
    },
    Suite { criterion: 14, name: "lemmas", version: 1, title: "quadrature of the auxiliary estimates", runtime_limit: None, run: solve::lemmas },
    Suite {
        criterion: 15,
        name: "embeddings",
        version: 1,
        title: "Besov and Q-type embedding ratios",
        runtime_limit: None,
        run: norms::embeddings,
    },
];

/// Resolve a suite by name or criterion number; `all` selects every suite.
pub fn find(name: &str) -> Result<Vec<&'static Suite>> {
    let name = name.trim();
    if name == "all" {
        return Ok(SUITES.iter().collect());
    }
    let by_number = name.trim_start_matches('c').parse::<u8>().ok();
    SUITES
        .iter()
        .find(|s| s.name == name || Some(s.criterion) == by_number)
        .map(|s| vec![s])
        .ok_or_else(|| {
            let names: Vec<&str> = SUITES.iter().map(|s| s.name).collect();
            LabError::Usage(format!("unknown suite `{name}`; known: all, {}", names.join(", ")))
        })
}

impl Suite {
    /// Run the suite. Errors and panics become a failed `error` check.
    pub fn run(&self, overrides: &BTreeMap<String, f64>) -> SuiteRun {
        let start = Instant::now();
        let out = match catch_unwind(AssertUnwindSafe(|| (self.run)())) {
            Ok(Ok(out)) => out,
            Ok(Err(e)) => SuiteOutput { checks: vec![CheckOutcome::failed("error", e.to_string())], series: vec![] },
            Err(p) => {
                let msg = p
                    .downcast_ref::<String>()
                    .cloned()
                    .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                    .unwrap_or_else(|| "panic".into());
                SuiteOutput { checks: vec![CheckOutcome::failed("error", msg)], series: vec![] }
            }
        };
        let seconds = start.elapsed().as_secs_f64();
        let mut checks = out.checks;
        for c in &mut checks {
            if let Some(&tol) = overrides.get(&c.name) {
                c.tolerance = tol;
                c.pass = c.relation.holds(c.value, tol);
            }
        }
        let within_runtime = self.runtime_limit.is_none_or(|l| seconds < l);
        let pass = !checks.is_empty() && checks.iter().all(|c| c.pass) && within_runtime;
        SuiteRun {
            report: SuiteReport {
                criterion: self.criterion,
                name: self.name.to_string(),
                version: self.version,
                title: self.title.to_string(),
                pass,
                runtime_limit: self.runtime_limit,
                within_runtime,
                checks,
                series: out.series,
            },
            seconds,
        }
    }
}

/// Largest element, `0` for an empty slice.
pub(crate) fn max_of(v: impl IntoIterator<Item = f64>) -> f64 {
    v.into_iter().fold(0.0, f64::max)
}

pub(crate) fn min_of(v: impl IntoIterator<Item = f64>) -> f64 {
    v.into_iter().fold(f64::INFINITY, f64::min)
}
