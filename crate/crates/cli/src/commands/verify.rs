use std::str::FromStr;

use clap::Args;
use gupqm::report::format_float;
use gupqm::verify::{run_suite, Bound, SuiteKind, SuiteReport, VerifyConfig};
use serde::{Deserialize, Serialize};

use super::{CommandSpec, FlagList, Report};
use crate::error::{usage, CliResult};
use crate::output::{Format, Tabular};
use crate::settings::{Entry, Settings};

pub const SPEC: CommandSpec = CommandSpec {
    name: "verify",
    keys: &["suite", "trials", "seed", "dim", "alpha", "euclidean", "tol"],
    sweepable: &["alpha"],
    default_format: Format::Json,
};

pub const SEED_VAR: &str = "GUPQM_SEED";

#[derive(Args, Debug, Default)]
pub struct VerifyArgs {
    /// composition, schrodinger, delta-limit, moments, eom or all
    #[arg(value_parser = ["composition", "schrodinger", "delta-limit", "moments", "eom", "all"])]
    pub suite: Option<String>,
    /// Random trials per suite [default: 20]
    #[arg(long)]
    pub trials: Option<usize>,
    /// RNG seed; falls back to GUPQM_SEED
    #[arg(long)]
    pub seed: Option<u64>,
    /// Fixed dimension 1..=3; cycles through all three when absent
    #[arg(long)]
    pub dim: Option<usize>,
    /// GUP parameter, 0 < alpha <= 1e-2 [default: 1e-3]
    #[arg(long)]
    pub alpha: Option<f64>,
    /// Run in Euclidean time where the suite supports it
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    pub euclidean: Option<bool>,
    /// Override a stored tolerance: [suite.]check=limit or [suite.]check=lo,hi
    #[arg(long = "tol", value_name = "CHECK=LIMIT")]
    pub tol: Vec<String>,
}

impl VerifyArgs {
    pub fn flags(&self, out: &mut FlagList) {
        out.opt("suite", &self.suite)
            .opt("trials", &self.trials)
            .opt("seed", &self.seed)
            .opt("dim", &self.dim)
            .opt("alpha", &self.alpha)
            .opt("euclidean", &self.euclidean)
            .many("tol", &self.tol);
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifyOut {
    pub passed: bool,
    pub suites: Vec<SuiteReport>,
}

impl Tabular for VerifyOut {
    fn header() -> Vec<&'static str> {
        vec!["suite", "trial", "description", "check", "value", "passed"]
    }

    fn rows(&self) -> Vec<Vec<String>> {
        let mut rows = Vec::new();
        for suite in &self.suites {
            for r in &suite.records {
                let lead = [suite.suite.to_string(), r.trial.to_string(), r.description.clone()];
                for c in &r.checks {
                    let mut row = lead.to_vec();
                    row.extend([c.name.clone(), format_float(c.value), c.passed.to_string()]);
                    rows.push(row);
                }
                if let Some(err) = &r.error {
                    let mut row = lead.to_vec();
                    row.extend(["error".into(), err.clone(), "false".into()]);
                    rows.push(row);
                }
            }
        }
        rows
    }
}

impl Report for VerifyOut {
    fn passed(&self) -> bool {
        self.passed
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ToleranceOverride {
    pub suite: Option<SuiteKind>,
    pub check: String,
    pub limit: Limit,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Limit {
    Single(f64),
    Range(f64, f64),
}

impl ToleranceOverride {
    pub fn parse(e: &Entry) -> CliResult<Self> {
        let bad = |why: &str| usage(format!("{}: tol '{}': {why}", e.origin, e.raw));
        let (name, value) = e.raw.split_once('=').ok_or_else(|| bad("expected [suite.]check=limit"))?;
        let (suite, check) = match name.trim().split_once('.') {
            Some((s, c)) => (Some(SuiteKind::from_str(s.trim()).map_err(|_| bad("unknown suite"))?), c.trim()),
            None => (None, name.trim()),
        };
        let number = |s: &str| s.trim().parse::<f64>().ok().filter(|x| !x.is_nan());
        let limit = match value.split_once(',') {
            Some((lo, hi)) => {
                let (lo, hi) = number(lo).zip(number(hi)).ok_or_else(|| bad("limits must be numbers"))?;
                if lo > hi {
                    return Err(bad("lower limit exceeds upper limit"));
                }
                Limit::Range(lo, hi)
            }
            None => Limit::Single(number(value).ok_or_else(|| bad("limit must be a number"))?),
        };
        Ok(Self { suite, check: check.to_string(), limit })
    }
}

/// Replaces matching bounds, re-evaluates every affected check and the pass flags.
pub fn apply_overrides(reports: &mut [SuiteReport], overrides: &[ToleranceOverride]) -> CliResult<()> {
    for o in overrides {
        let mut matched = false;
        for report in reports.iter_mut().filter(|r| o.suite.is_none_or(|s| s == r.suite)) {
            for check in report.records.iter_mut().flat_map(|r| r.checks.iter_mut()).filter(|c| c.name == o.check) {
                check.bound = match (check.bound, o.limit) {
                    (Bound::AtMost(_), Limit::Single(x)) => Bound::AtMost(x),
                    (Bound::AtLeast(_), Limit::Single(x)) => Bound::AtLeast(x),
                    (Bound::Within(..), Limit::Range(lo, hi)) => Bound::Within(lo, hi),
                    (Bound::Within(..), Limit::Single(_)) => {
                        return Err(usage(format!("tol '{}' needs a range lo,hi", o.check)));
                    }
                    (_, Limit::Range(..)) => return Err(usage(format!("tol '{}' takes a single limit", o.check))),
                };
                check.passed = check.bound.holds(check.value);
                matched = true;
            }
        }
        if !matched {
            return Err(usage(format!("tol '{}' matches no check in the selected suites", o.check)));
        }
    }
    for report in reports.iter_mut() {
        report.failed_trials = report.records.iter().filter(|r| !r.passed()).count();
        report.passed = report.failed_trials == 0;
    }
    Ok(())
}

pub fn evaluate(s: &Settings) -> CliResult<VerifyOut> {
    let suite = s.text("suite").ok_or_else(|| usage("verify needs a suite"))?;
    let kind = SuiteKind::from_str(suite)?;
    let defaults = VerifyConfig::default();
    let cfg = VerifyConfig {
        trials: s.usize("trials")?.unwrap_or(defaults.trials),
        seed: s.u64("seed")?.unwrap_or(defaults.seed),
        dim: s.usize("dim")?,
        alpha: s.f64_or("alpha", defaults.alpha)?,
        euclidean: s.bool_or("euclidean", false)?,
    };
    let overrides = s.list("tol").iter().map(ToleranceOverride::parse).collect::<CliResult<Vec<_>>>()?;
    let mut suites = run_suite(kind, &cfg)?;
    apply_overrides(&mut suites, &overrides)?;
    Ok(VerifyOut { passed: suites.iter().all(|r| r.passed), suites })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::settings::Origin;

    fn entry(raw: &str) -> Entry {
        Entry { raw: raw.into(), origin: Origin::Flag }
    }

    #[test]
    fn parses_overrides() {
        let o = ToleranceOverride::parse(&entry("relative_residual=1e-3")).unwrap();
        assert_eq!((o.suite, o.limit), (None, Limit::Single(1e-3)));
        let o = ToleranceOverride::parse(&entry("eom.alpha_halving_ratio=3,5")).unwrap();
        assert_eq!((o.suite, o.limit), (Some(SuiteKind::Eom), Limit::Range(3.0, 5.0)));
        for raw in ["x", "bogus.x=1", "x=a", "x=5,3"] {
            assert!(ToleranceOverride::parse(&entry(raw)).is_err(), "{raw}");
        }
    }

    #[test]
    fn tightened_tolerance_fails_the_suite() {
        let cfg = VerifyConfig { trials: 3, ..VerifyConfig::default() };
        let mut reports = run_suite(SuiteKind::Schrodinger, &cfg).unwrap();
        assert!(reports.iter().all(|r| r.passed));
        let tight = ToleranceOverride::parse(&entry("relative_residual=1e-30")).unwrap();
        apply_overrides(&mut reports, &[tight]).unwrap();
        assert!(!reports[0].passed);
        assert_eq!(reports[0].failed_trials, 3);
        let unknown = ToleranceOverride::parse(&entry("nothing=1")).unwrap();
        assert!(apply_overrides(&mut reports, &[unknown]).is_err());
        let wrong_shape = ToleranceOverride::parse(&entry("alpha_halving_ratio=4")).unwrap();
        assert!(apply_overrides(&mut reports, &[wrong_shape]).is_err());
    }
}
