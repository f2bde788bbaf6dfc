//! Seeded randomized suites over the checks, with deterministic reports.
//!
//! Trial `i` of a suite draws from the ChaCha stream `i` of the configured
//! seed, so results do not depend on scheduling; trials run in parallel and
//! are collected in index order.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::classical::sho_trajectory_2d;
use crate::error::{Error, Result};
use crate::kernels::PrefactorSpec;
use crate::model::{Endpoints, ModelParams, TimeArg, VecD, C64};
use crate::moments::{closed_moment, gaussian_expectation, quadrature_oracle, GaussianWeight, MomentKind};

use super::composition::{composition_check_analytic, composition_check_quadrature};
use super::delta::{delta_limit_check, TestFunction};
use super::schrodinger::{schrodinger_residual, FdSteps};
use super::tolerances as tol;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SuiteKind {
    Moments,
    Composition,
    Schrodinger,
    DeltaLimit,
    Eom,
    All,
}

impl SuiteKind {
    pub const SINGLE: [SuiteKind; 5] =
        [SuiteKind::Moments, SuiteKind::Composition, SuiteKind::Schrodinger, SuiteKind::DeltaLimit, SuiteKind::Eom];

    pub fn name(self) -> &'static str {
        match self {
            SuiteKind::Moments => "moments",
            SuiteKind::Composition => "composition",
            SuiteKind::Schrodinger => "schrodinger",
            SuiteKind::DeltaLimit => "delta-limit",
            SuiteKind::Eom => "eom",
            SuiteKind::All => "all",
        }
    }
}

impl fmt::Display for SuiteKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SuiteKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        [SuiteKind::All]
            .into_iter()
            .chain(SuiteKind::SINGLE)
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::InvalidParameter(format!("unknown suite '{s}'")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VerifyConfig {
    pub trials: usize,
    pub seed: u64,
    /// Fixed dimension, or cycle through 1, 2, 3 when absent.
    pub dim: Option<usize>,
    pub alpha: f64,
    pub euclidean: bool,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        Self { trials: 20, seed: 20_240_601, dim: None, alpha: 1e-3, euclidean: false }
    }
}

impl VerifyConfig {
    fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(Error::InvalidParameter("trials must be >= 1".into()));
        }
        if let Some(d) = self.dim {
            if !(1..=3).contains(&d) {
                return Err(Error::InvalidParameter(format!("verify supports D in 1..=3, got {d}")));
            }
        }
        if !(self.alpha > 0.0 && self.alpha <= 1e-2) {
            return Err(Error::InvalidParameter(format!("verify needs 0 < alpha <= 1e-2, got {}", self.alpha)));
        }
        Ok(())
    }

    fn dim_for(&self, trial: usize) -> usize {
        self.dim.unwrap_or(1 + trial % 3)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Bound {
    AtMost(f64),
    AtLeast(f64),
    Within(f64, f64),
}

impl Bound {
    pub fn holds(&self, v: f64) -> bool {
        match *self {
            Bound::AtMost(x) => v <= x,
            Bound::AtLeast(x) => v >= x,
            Bound::Within(lo, hi) => (lo..=hi).contains(&v),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub bound: Bound,
    pub passed: bool,
}

impl Check {
    pub fn new(name: impl Into<String>, value: f64, bound: Bound) -> Self {
        Self { name: name.into(), value, passed: bound.holds(value), bound }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub trial: usize,
    pub description: String,
    pub checks: Vec<Check>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

impl TrialRecord {
    pub fn passed(&self) -> bool {
        self.error.is_none() && self.checks.iter().all(|c| c.passed)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub suite: SuiteKind,
    pub config: VerifyConfig,
    pub passed: bool,
    pub failed_trials: usize,
    pub records: Vec<TrialRecord>,
}

impl SuiteReport {
    /// Largest value of the named check over all trials.
    pub fn worst(&self, check: &str) -> Option<f64> {
        self.values(check).reduce(f64::max)
    }

    /// Smallest value of the named check over all trials.
    pub fn best(&self, check: &str) -> Option<f64> {
        self.values(check).reduce(f64::min)
    }

    fn values<'a>(&'a self, check: &'a str) -> impl Iterator<Item = f64> + 'a {
        self.records.iter().flat_map(|r| r.checks.iter()).filter(move |c| c.name == check).map(|c| c.value)
    }
}

fn trial_rng(seed: u64, trial: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial as u64);
    rng
}

fn random_point(rng: &mut ChaCha8Rng, dim: usize, half_width: f64) -> VecD {
    VecD::from((0..dim).map(|_| rng.random_range(-half_width..half_width)).collect::<Vec<f64>>())
}

fn fmt_vec(v: &VecD) -> String {
    let parts: Vec<String> = v.iter().map(|x| format!("{x:.6}")).collect();
    format!("({})", parts.join(", "))
}

fn time_arg(euclidean: bool, t: f64) -> Result<TimeArg> {
    if euclidean {
        TimeArg::euclidean(t)
    } else {
        TimeArg::real(t)
    }
}

type TrialOutcome = Result<(String, Vec<Check>)>;

fn moments_trial(cfg: &VerifyConfig, trial: usize) -> TrialOutcome {
    let mut rng = trial_rng(cfg.seed, trial);
    let dim = cfg.dim_for(trial);
    // |Im a| <= Re a / 2 keeps the oscillation resolvable by the Hermite grid.
    let re_a = rng.random_range(0.5..2.0);
    let a = C64::new(re_a, re_a * rng.random_range(-0.5..0.5));
    let b: Vec<C64> = (0..dim).map(|_| C64::new(rng.random_range(-0.5..0.5), rng.random_range(-0.3..0.3))).collect();
    let x: Vec<C64> = (0..dim).map(|_| C64::new(rng.random_range(-1.0..1.0), 0.0)).collect();
    let w = GaussianWeight::new(a, b)?;
    let nodes = match dim {
        1 => 64,
        2 => 48,
        _ => 32,
    };
    let scale = w.total().norm();
    let mut checks = Vec::new();
    for kind in MomentKind::ALL {
        let xs = kind.needs_x().then_some(&x[..]);
        let closed = closed_moment(kind, &w, xs)?;
        let poly = kind.polynomial(dim, xs)?;
        let oracle = quadrature_oracle(&poly, &w, nodes)?;
        let engine = gaussian_expectation(&poly, &w)? * w.total();
        let denom = closed.norm().max(scale);
        checks.push(Check::new(
            format!("{}_vs_quadrature", kind.name()),
            (closed - oracle).norm() / denom,
            Bound::AtMost(tol::MOMENT_ORACLE),
        ));
        checks.push(Check::new(
            format!("{}_engine_vs_closed", kind.name()),
            (closed - engine).norm() / denom,
            Bound::AtMost(tol::MOMENT_ENGINE),
        ));
    }
    Ok((format!("D={dim} a={a} nodes={nodes}"), checks))
}

fn perturbed(spec: PrefactorSpec, which: usize, delta: f64) -> PrefactorSpec {
    let mut s = spec;
    match which {
        0 => s.beta1 += delta,
        1 => s.beta2 += delta,
        _ => s.beta3 += delta,
    }
    s
}

fn composition_trial(cfg: &VerifyConfig, trial: usize) -> TrialOutcome {
    let mut rng = trial_rng(cfg.seed, trial);
    let dim = cfg.dim_for(trial);
    let free = trial % 2 == 0;
    let omega = if free { 0.0 } else { rng.random_range(0.5..1.2) };
    let q0 = random_point(&mut rng, dim, 1.0);
    let qf = random_point(&mut rng, dim, 1.0);
    let total = rng.random_range(0.5..2.5);
    let t1 = total * rng.random_range(0.2..0.8);
    let e = Endpoints::new(q0, qf, time_arg(cfg.euclidean, total)?)?;
    let params = ModelParams::new(1.0, 1.0, omega, cfg.alpha, dim)?;
    let canonical = PrefactorSpec::canonical(dim);

    let floor = composition_check_analytic(&params, &e, t1, &canonical)?.relative();
    let mut checks = vec![Check::new("canonical_residual", floor, Bound::AtMost(tol::COMPOSITION_ANALYTIC))];

    // The free prefactor does not involve beta3.
    let which = if free { trial / 2 % 2 } else { trial / 2 % 3 };
    let sign = if trial / 6 % 2 == 0 { 1.0 } else { -1.0 };
    let wrong = perturbed(canonical, which, sign * tol::PREFACTOR_PERTURBATION);
    let control = params.with_alpha(tol::PERTURBED_ALPHA);
    let control_floor = composition_check_analytic(&control, &e, t1, &canonical)?.relative();
    let bad = composition_check_analytic(&control, &e, t1, &wrong)?.relative();
    checks.push(Check::new(format!("beta{}_perturbed_residual", which + 1), bad, Bound::AtLeast(tol::COMPOSITION_PERTURBED_MIN)));
    checks.push(Check::new(
        "perturbed_over_canonical",
        bad / control_floor.max(f64::EPSILON),
        Bound::AtLeast(1e3),
    ));
    if cfg.euclidean && dim <= 2 {
        let quad = composition_check_quadrature(&params, &e, t1, 64)?.relative();
        checks.push(Check::new("quadrature_residual", quad, Bound::AtMost(tol::COMPOSITION_QUADRATURE)));
    }
    let system = if free { "free".to_string() } else { format!("sho omega={omega:.6}") };
    Ok((
        format!("D={dim} {system} q0={} qf={} T={total:.6} T1={t1:.6}", fmt_vec(&e.q0), fmt_vec(&e.qf)),
        checks,
    ))
}

/// Evaluation time and frequency of the Schrodinger suite.
pub const SCHRODINGER_TIME: f64 = 3.0;
pub const SCHRODINGER_OMEGA: f64 = 0.5;

fn schrodinger_trial(cfg: &VerifyConfig, trial: usize) -> TrialOutcome {
    let mut rng = trial_rng(cfg.seed, trial);
    let dim = cfg.dim_for(trial);
    let omega = if trial % 2 == 0 { 0.0 } else { SCHRODINGER_OMEGA };
    let e = Endpoints::new(
        random_point(&mut rng, dim, 0.5),
        random_point(&mut rng, dim, 0.5),
        time_arg(cfg.euclidean, SCHRODINGER_TIME)?,
    )?;
    let params = ModelParams::new(1.0, 1.0, omega, cfg.alpha, dim)?;
    let r = schrodinger_residual(&params, &e, &FdSteps::for_system(&params, &e))?;
    let (lo, hi) = tol::ALPHA_SCALING;
    let checks = vec![
        Check::new("relative_residual", r.relative(), Bound::AtMost(tol::SCHRODINGER_RELATIVE)),
        Check::new("alpha_halving_ratio", r.report.scaling_ratio.unwrap_or(f64::NAN), Bound::Within(lo, hi)),
        Check::new("difference_floor", r.floor_relative, Bound::AtMost(0.01 * r.half_alpha_relative)),
    ];
    Ok((format!("D={dim} omega={omega} q0={} qf={} T={SCHRODINGER_TIME}", fmt_vec(&e.q0), fmt_vec(&e.qf)), checks))
}

/// Euclidean time of the initial-condition suite.
pub const DELTA_TAU: f64 = 1e-3;

fn delta_trial(cfg: &VerifyConfig, trial: usize) -> TrialOutcome {
    let mut rng = trial_rng(cfg.seed, trial);
    let dim = cfg.dim_for(trial);
    let omega = if trial % 2 == 0 { 0.0 } else { 1.0 };
    let qf = random_point(&mut rng, dim, 0.5);
    let offset = random_point(&mut rng, dim, 0.3);
    let g = TestFunction::Gaussian { center: &qf + &offset, width: 1.0 };
    let params = ModelParams::new(1.0, 1.0, omega, cfg.alpha, dim)?;
    let r = delta_limit_check(&params, &qf, &g, DELTA_TAU)?;
    let (lo, hi) = tol::TAU_HALVING;
    let checks = vec![
        Check::new("deviation", r.report.residual_norm, Bound::AtMost(tol::DELTA_DEVIATION)),
        Check::new("tau_halving_ratio", r.halving_ratio, Bound::Within(lo, hi)),
        Check::new("tau_slope", r.tau_slope, Bound::Within(f64::NEG_INFINITY, f64::INFINITY)),
        Check::new("normalization_defect", (r.normalization - 1.0).norm(), Bound::AtMost(DELTA_TAU)),
    ];
    Ok((format!("D={dim} omega={omega} qf={} tau={DELTA_TAU}", fmt_vec(&qf)), checks))
}

fn eom_trial(cfg: &VerifyConfig, trial: usize) -> TrialOutcome {
    let mut rng = trial_rng(cfg.seed, trial);
    let q0 = random_point(&mut rng, 2, 1.0);
    let qf = random_point(&mut rng, 2, 1.0);
    let t = rng.random_range(0.3..2.5);
    let e = Endpoints::new(q0, qf, TimeArg::real(t)?)?;
    let params = ModelParams::new(1.0, 1.0, 1.0, cfg.alpha, 2)?;
    let full = sho_trajectory_2d(&params, &e)?.max_eom_residual(100)?;
    let half = sho_trajectory_2d(&params.with_alpha(cfg.alpha / 2.0), &e)?.max_eom_residual(100)?;
    let (lo, hi) = tol::ALPHA_SCALING;
    let checks = vec![
        Check::new("max_residual", full, Bound::AtLeast(0.0)),
        Check::new("alpha_halving_ratio", full / half, Bound::Within(lo, hi)),
    ];
    Ok((format!("q0={} qf={} T={t:.6}", fmt_vec(&e.q0), fmt_vec(&e.qf)), checks))
}

fn run_single(kind: SuiteKind, cfg: &VerifyConfig) -> SuiteReport {
    let trial_fn: fn(&VerifyConfig, usize) -> TrialOutcome = match kind {
        SuiteKind::Moments => moments_trial,
        SuiteKind::Composition => composition_trial,
        SuiteKind::Schrodinger => schrodinger_trial,
        SuiteKind::DeltaLimit => delta_trial,
        SuiteKind::Eom => eom_trial,
        SuiteKind::All => unreachable!("expanded by run_suite"),
    };
    let records: Vec<TrialRecord> = (0..cfg.trials)
        .into_par_iter()
        .map(|trial| match trial_fn(cfg, trial) {
            Ok((description, checks)) => TrialRecord { trial, description, checks, error: None },
            Err(e) => TrialRecord { trial, description: String::new(), checks: Vec::new(), error: Some(e.to_string()) },
        })
        .collect();
    let failed_trials = records.iter().filter(|r| !r.passed()).count();
    SuiteReport { suite: kind, config: *cfg, passed: failed_trials == 0, failed_trials, records }
}

/// Runs one suite, or every suite for [`SuiteKind::All`].
pub fn run_suite(kind: SuiteKind, cfg: &VerifyConfig) -> Result<Vec<SuiteReport>> {
    cfg.validate()?;
    let kinds: Vec<SuiteKind> = if kind == SuiteKind::All { SuiteKind::SINGLE.to_vec() } else { vec![kind] };
    Ok(kinds.into_iter().map(|k| run_single(k, cfg)).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small(trials: usize) -> VerifyConfig {
        VerifyConfig { trials, ..VerifyConfig::default() }
    }

    #[test]
    fn suite_names_round_trip() {
        for k in [SuiteKind::All].into_iter().chain(SuiteKind::SINGLE) {
            assert_eq!(k.name().parse::<SuiteKind>().unwrap(), k);
        }
        assert!("nope".parse::<SuiteKind>().is_err());
    }

    #[test]
    fn all_suites_pass() {
        for report in run_suite(SuiteKind::All, &small(6)).unwrap() {
            for r in &report.records {
                assert!(r.passed(), "{}: {:?}", report.suite, r);
            }
            assert!(report.passed);
        }
        let euclid = VerifyConfig { euclidean: true, ..small(6) };
        for kind in [SuiteKind::Composition, SuiteKind::Schrodinger] {
            let report = &run_suite(kind, &euclid).unwrap()[0];
            assert!(report.passed, "{:?}", report.records.iter().find(|r| !r.passed()));
        }
    }

    #[test]
    fn reports_are_reproducible() {
        let cfg = small(4);
        let a = run_suite(SuiteKind::Composition, &cfg).unwrap();
        let b = run_suite(SuiteKind::Composition, &cfg).unwrap();
        assert_eq!(crate::report::to_json(&a, true).unwrap(), crate::report::to_json(&b, true).unwrap());
        let other = run_suite(SuiteKind::Composition, &VerifyConfig { seed: 1, ..cfg }).unwrap();
        assert_ne!(a, other);
    }

    #[test]
    fn config_validation() {
        assert!(run_suite(SuiteKind::Eom, &VerifyConfig { trials: 0, ..small(1) }).is_err());
        assert!(run_suite(SuiteKind::Eom, &VerifyConfig { dim: Some(4), ..small(1) }).is_err());
        assert!(run_suite(SuiteKind::Eom, &VerifyConfig { alpha: 0.5, ..small(1) }).is_err());
    }
}
