//! JSON run configuration.
//!
//! Numbers are kept as their source text (serde_json is built with
//! `arbitrary_precision`), so `0.137` reaches the solver as the decimal
//! 0.137 and not as the nearest double.

use std::path::Path;

use pslet::effective::{EquationKind, PotentialSpec};
use pslet::expansion::{Branch, ExpansionOptions};
use pslet::power_sum::{Exponent, PowerSum};
use pslet::real::{Precision, Real};
use pslet::shooting::ShootingConfig;
use serde::{Deserialize, Serialize};
use serde_json::Number;

use crate::error::{CliError, Result};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Equation {
    Dirac,
    Kg,
}

impl From<Equation> for EquationKind {
    fn from(e: Equation) -> Self {
        match e {
            Equation::Dirac => EquationKind::Dirac,
            Equation::Kg => EquationKind::KleinGordon,
        }
    }
}

/// A power given either as a JSON number or as a string such as "1/2".
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Power {
    Number(Number),
    Text(String),
}

impl Power {
    pub fn exponent(&self) -> std::result::Result<Exponent, pslet::error::PsletError> {
        match self {
            Power::Number(n) => n.to_string().parse(),
            Power::Text(t) => t.parse(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Term {
    pub coeff: Number,
    pub power: Power,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Potential {
    #[serde(default)]
    pub vector: Vec<Term>,
    #[serde(default)]
    pub scalar: Vec<Term>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StateSel {
    pub k: u32,
    pub ell: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kappa: Option<i64>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OracleOverrides {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub r_min: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub r_max: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub steps: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bisection_tol: Option<f64>,
}

impl OracleOverrides {
    pub fn to_config(&self) -> ShootingConfig {
        let d = ShootingConfig::default();
        ShootingConfig {
            r_min: self.r_min.or(d.r_min),
            r_max: self.r_max.or(d.r_max),
            steps: self.steps.unwrap_or(d.steps),
            bisection_tol: self.bisection_tol.unwrap_or(d.bisection_tol),
            energy_bracket: None,
        }
    }
}

fn default_order() -> usize {
    14
}

fn default_digits() -> u32 {
    60
}

fn default_branch() -> String {
    "+".into()
}

fn default_check_tolerance() -> f64 {
    2e-3
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub schema: u32,
    pub equation: Equation,
    pub mass: Number,
    pub potential: Potential,
    pub states: Vec<StateSel>,
    #[serde(default = "default_order")]
    pub order: usize,
    #[serde(default = "default_digits")]
    pub precision_digits: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pade: Option<Vec<[usize; 2]>>,
    #[serde(default = "default_branch")]
    pub branch: String,
    #[serde(default)]
    pub report_mass: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub oracle: Option<OracleOverrides>,
    /// Drop Taylor coefficients of the spin-orbit term above this order.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub spin_orbit_cutoff: Option<usize>,
    /// Relative PSLET-vs-oracle tolerance used by `compare --check`.
    #[serde(default = "default_check_tolerance")]
    pub check_tolerance: f64,
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let de = &mut serde_json::Deserializer::from_str(text);
        let cfg: RunConfig = serde_path_to_error::deserialize(de).map_err(|e| {
            let path = e.path().to_string();
            let inner = e.into_inner();
            CliError::Validation(format!(
                "config error at line {} column {}, field `{}`: {}",
                inner.line(),
                inner.column(),
                path,
                inner
            ))
        })?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Validation(format!("cannot read {}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(CliError::Validation(m));
        if self.schema != SCHEMA_VERSION {
            return bad(format!("unsupported schema {} (expected {SCHEMA_VERSION})", self.schema));
        }
        if self.states.is_empty() {
            return bad("states must not be empty".into());
        }
        if self.order < 1 {
            return bad("order must be at least 1".into());
        }
        if self.precision_digits < 30 {
            return bad(format!("precision_digits = {} (needs at least 30)", self.precision_digits));
        }
        self.branch()?;
        let mass = self.mass()?;
        if mass <= 0 {
            return bad("mass must be positive".into());
        }
        self.potential_sums()?;
        for s in &self.states {
            self.kappa_for(s)?;
        }
        for [i, j] in self.pade.iter().flatten() {
            if i + j + 1 > self.order {
                return bad(format!("pade [{i},{j}] needs order >= {}", i + j + 1));
            }
        }
        if let Some(o) = &self.oracle {
            o.to_config().validate()?;
        }
        if self.check_tolerance <= 0.0 {
            return bad("check_tolerance must be positive".into());
        }
        Ok(())
    }

    pub fn precision(&self) -> Precision {
        Precision::from_digits(self.precision_digits)
    }

    pub fn branch(&self) -> Result<Branch> {
        match self.branch.as_str() {
            "+" => Ok(Branch::Plus),
            "-" | "\u{2212}" => Ok(Branch::Minus),
            other => Err(CliError::Validation(format!("branch must be \"+\" or \"-\", got {other:?}"))),
        }
    }

    pub fn mass(&self) -> Result<Real> {
        Ok(self.precision().parse(&self.mass.to_string())?)
    }

    fn sum_of(&self, terms: &[Term], which: &str) -> Result<PowerSum> {
        let prec = self.precision();
        let mut parsed = Vec::with_capacity(terms.len());
        for (i, t) in terms.iter().enumerate() {
            let p = t
                .power
                .exponent()
                .map_err(|e| CliError::Validation(format!("potential.{which}[{i}].power: {e}")))?;
            let c = prec
                .parse(&t.coeff.to_string())
                .map_err(|e| CliError::Validation(format!("potential.{which}[{i}].coeff: {e}")))?;
            parsed.push((p, c));
        }
        Ok(PowerSum::from_terms(prec, parsed))
    }

    /// (V, S)
    pub fn potential_sums(&self) -> Result<(PowerSum, PowerSum)> {
        Ok((self.sum_of(&self.potential.vector, "vector")?, self.sum_of(&self.potential.scalar, "scalar")?))
    }

    /// κ of a state: the explicit value, else −(ℓ+1) for Dirac and ℓ for KG.
    pub fn kappa_for(&self, s: &StateSel) -> Result<i64> {
        let ell = i64::from(s.ell);
        match (self.equation, s.kappa) {
            (Equation::Kg, _) => Ok(ell),
            (Equation::Dirac, None) => Ok(-(ell + 1)),
            (Equation::Dirac, Some(kap)) if kap == ell && ell > 0 || kap == -(ell + 1) => Ok(kap),
            (Equation::Dirac, Some(kap)) => Err(CliError::Validation(format!(
                "kappa = {kap} does not belong to ell = {ell} (allowed: {}{})",
                -(ell + 1),
                if ell > 0 { format!(" or {ell}") } else { String::new() }
            ))),
        }
    }

    pub fn spec_for(&self, s: &StateSel) -> Result<PotentialSpec> {
        let (v, sc) = self.potential_sums()?;
        Ok(PotentialSpec::new(v, sc, self.mass()?, self.equation.into(), self.kappa_for(s)?)?)
    }

    pub fn expansion_options(&self) -> Result<ExpansionOptions> {
        Ok(ExpansionOptions {
            branch: self.branch()?,
            spin_orbit_cutoff: self.spin_orbit_cutoff,
            ..ExpansionOptions::default()
        })
    }

    pub fn oracle_config(&self) -> ShootingConfig {
        self.oracle.clone().unwrap_or_default().to_config()
    }

    /// Deterministic (k, ℓ, κ) order without duplicates.
    pub fn sorted_states(&self) -> Vec<StateSel> {
        let mut v = self.states.clone();
        v.sort_by_key(|s| (s.k, s.ell, self.kappa_for(s).unwrap_or(0)));
        v.dedup_by_key(|s| (s.k, s.ell, self.kappa_for(s).unwrap_or(0)));
        v
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }
}

/// Builds a JSON number from decimal text.
pub fn number(text: &str) -> Number {
    text.parse().expect("valid JSON number literal")
}

pub fn term(coeff: &str, power: &str) -> Term {
    let power = if power.contains('/') { Power::Text(power.into()) } else { Power::Number(number(power)) };
    Term { coeff: number(coeff), power }
}
