//! Runs every state of a configuration, in parallel, in a fixed order.

use log::info;
use pslet::effective::{build_effective, EquationKind};
use pslet::exact::{kg_coulomb_exact, mixed_coulomb_exact, CoulombKind};
use pslet::power_sum::{Exponent, PowerSum};
use pslet::real::Real;
use pslet::recursion::solve_state;
use pslet::shooting::{shoot_eigenvalue, OracleResult};
use pslet::summation::{pade, partial_sums, stabilization, PadeValue, DEFAULT_STABILIZATION_TOL};
use rayon::prelude::*;

use crate::config::{RunConfig, StateSel};
use crate::error::{CliError, Result};

#[derive(Clone, Debug)]
pub struct StateReport {
    pub k: u32,
    pub ell: u32,
    pub kappa: i64,
    pub r0: Real,
    pub lbar: Real,
    /// E^(−1), E^(0), …
    pub coefficients: Vec<Real>,
    /// E(1), …, E(N)
    pub partial: Vec<Real>,
    pub pade: Vec<PadeValue>,
    pub stabilization: Option<(usize, Real)>,
    pub oracle: Option<OracleResult>,
    pub exact: Option<Real>,
    pub max_residual: f64,
}

#[derive(Clone, Debug)]
pub struct StateOutcome {
    pub state: StateSel,
    pub kappa: i64,
    pub result: std::result::Result<StateReport, String>,
}

#[derive(Clone, Copy, Debug, Default)]
pub struct RunFlags {
    pub oracle: bool,
    pub jobs: Option<usize>,
}

pub fn with_pool<T: Send>(jobs: Option<usize>, f: impl FnOnce() -> T + Send) -> Result<T> {
    let mut b = rayon::ThreadPoolBuilder::new();
    if let Some(j) = jobs {
        if j == 0 {
            return Err(CliError::Validation("--jobs must be at least 1".into()));
        }
        b = b.num_threads(j);
    }
    let pool = b
        .build()
        .map_err(|e| CliError::Validation(format!("thread pool: {e}")))?;
    Ok(pool.install(f))
}

pub fn run_config(cfg: &RunConfig, flags: RunFlags) -> Result<Vec<StateOutcome>> {
    cfg.validate()?;
    let states = cfg.sorted_states();
    with_pool(flags.jobs, || {
        states
            .par_iter()
            .map(|s| {
                let kappa = cfg.kappa_for(s).unwrap_or_default();
                let result = solve_one(cfg, s, flags.oracle).map_err(|e| e.to_string());
                StateOutcome { state: *s, kappa, result }
            })
            .collect()
    })
}

fn solve_one(cfg: &RunConfig, s: &StateSel, with_oracle: bool) -> Result<StateReport> {
    let spec = cfg.spec_for(s)?;
    let prob = build_effective(&spec, s.ell).map_err(|e| CliError::Solver(e.to_string()))?;
    let opts = cfg.expansion_options()?;
    let sol = solve_state(&prob, s.k, cfg.order, &opts).map_err(|e| CliError::Solver(e.to_string()))?;
    info!("solved k={} l={} kappa={}", s.k, s.ell, prob.kappa);
    let series = &sol.series;
    let mut pades = Vec::new();
    for [i, j] in cfg.pade.iter().flatten() {
        pades.push(pade(series, *i, *j).map_err(|e| CliError::Solver(e.in_state(s.k, s.ell, prob.kappa).to_string()))?);
    }
    let oracle = if with_oracle {
        let r = shoot_eigenvalue(&prob, s.k, &cfg.oracle_config())
            .map_err(|e| CliError::Solver(e.in_state(s.k, s.ell, prob.kappa).to_string()))?;
        Some(r)
    } else {
        None
    };
    Ok(StateReport {
        k: s.k,
        ell: s.ell,
        kappa: prob.kappa,
        r0: sol.point.r0.clone(),
        lbar: series.lbar.clone(),
        coefficients: series.coeffs.clone(),
        partial: partial_sums(series),
        pade: pades,
        stabilization: stabilization(series, DEFAULT_STABILIZATION_TOL).ok(),
        oracle,
        exact: closed_form(cfg, s)?,
        max_residual: sol.max_residual.to_f64(),
    })
}

/// A when `ps` is exactly −A/r with A > 0.
fn pure_coulomb(ps: &PowerSum) -> Option<Real> {
    match ps.terms() {
        [(p, c)] if *p == Exponent::int(-1) && *c < 0 => Some(-c.clone()),
        _ => None,
    }
}

/// Closed-form energy of the configured problem, when one is known.
pub fn closed_form(cfg: &RunConfig, s: &StateSel) -> Result<Option<Real>> {
    let (v, sc) = cfg.potential_sums()?;
    let m = cfg.mass()?;
    let branch = cfg.branch()?;
    let kind: EquationKind = cfg.equation.into();
    if v == sc {
        if let Some(a) = pure_coulomb(&v) {
            return Ok(Some(mixed_coulomb_exact(&m, &a, s.k, s.ell)));
        }
    }
    if kind == EquationKind::KleinGordon {
        if let (Some(a), true) = (pure_coulomb(&v), sc.is_empty()) {
            return Ok(kg_coulomb_exact(CoulombKind::Vector, &m, &a, s.k, s.ell, branch).ok());
        }
        if let (Some(a), true) = (pure_coulomb(&sc), v.is_empty()) {
            return Ok(kg_coulomb_exact(CoulombKind::Scalar, &m, &a, s.k, s.ell, branch).ok());
        }
    }
    Ok(None)
}

/// Error summary for the failed states, if any.
pub fn failures(outcomes: &[StateOutcome]) -> Option<String> {
    let msgs: Vec<String> = outcomes
        .iter()
        .filter_map(|o| o.result.as_ref().err().map(|e| format!("(k={}, l={}): {e}", o.state.k, o.state.ell)))
        .collect();
    if msgs.is_empty() {
        None
    } else {
        Some(msgs.join("; "))
    }
}
