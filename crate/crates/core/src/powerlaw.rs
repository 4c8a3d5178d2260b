//! Equally mixed power-law confinement.
//!
//! For V = S = (A r^ν + B₀)/2 the problem reduces to the parameter-free
//! equation [−d²/dq² + ℓ(ℓ+1)/q² + q^ν] φ = Ě φ; the physical energy then
//! follows from
//!
//! ```text
//! Ě = (E − m − 2B₀)·[(E + m)(2A)^{−2/ν}]^{ν/(ν+2)}
//! ```

use log::debug;
use rug::ops::Pow;
use rug::Float;

use crate::effective::{EffectiveProblem, EquationKind};
use crate::error::{PsletError, Result};
use crate::expansion::ExpansionOptions;
use crate::power_sum::{pow_exact, Exponent, PowerSum};
use crate::real::{Precision, Real};
use crate::recursion::{energy_corrections, EnergySeries};
use crate::summation::{partial_sums, stabilization_of};

#[derive(Clone, Debug)]
pub struct PowerLawCase {
    pub nu: Exponent,
    pub a: Real,
    pub b0: Real,
    pub m: Real,
    pub k: u32,
    pub ell: u32,
}

impl PowerLawCase {
    pub fn new(nu: Exponent, a: Real, b0: Real, m: Real, k: u32, ell: u32) -> Result<Self> {
        if *nu.ratio().numer() <= 0 {
            return Err(PsletError::Domain(format!("power-law exponent must be positive, got {nu}")));
        }
        if a <= 0 {
            return Err(PsletError::Domain("power-law strength A must be positive".into()));
        }
        if m <= 0 {
            return Err(PsletError::Domain("mass must be positive".into()));
        }
        Ok(PowerLawCase { nu, a, b0, m, k, ell })
    }

    pub fn precision(&self) -> Precision {
        Precision::from_bits(self.m.prec())
    }
}

/// Γ = q^ν, V = 0, ℓ' = ℓ, nothing else.
pub fn reduced_problem(prec: Precision, nu: Exponent, ell: u32) -> EffectiveProblem {
    EffectiveProblem::from_parts(
        PowerSum::monomial(prec, prec.one(), nu),
        PowerSum::zero(prec),
        prec.int(i64::from(ell)),
        PowerSum::zero(prec),
        prec.one(),
        ell,
        i64::from(ell),
        EquationKind::KleinGordon,
    )
}

/// Series of the reduced equation with both readings of Ě(N).
#[derive(Clone, Debug)]
pub struct ReducedSeries {
    pub series: EnergySeries,
    /// Ě(N) = E(N)², N = 1..
    pub squared: Vec<Real>,
    /// Partial sums of the Cauchy square of the series, truncated at the
    /// same order as E(N).
    pub direct: Vec<Real>,
}

impl ReducedSeries {
    /// Smallest N whose next two squared readings agree within `rel_tol`.
    pub fn stabilization(&self, rel_tol: f64) -> Result<(usize, Real)> {
        stabilization_of(&self.squared, rel_tol)
    }
}

pub fn reduced_eigenvalue(case: &PowerLawCase, n: usize, opts: &ExpansionOptions) -> Result<ReducedSeries> {
    let prec = case.precision();
    let prob = reduced_problem(prec, case.nu, case.ell);
    let series = energy_corrections(&prob, case.k, n, opts)?;
    let bits = prec.bits();
    let squared = partial_sums(&series)
        .into_iter()
        .map(|e| Float::with_val(bits, e.square_ref()))
        .collect();
    let direct = direct_readings(&series);
    Ok(ReducedSeries { series, squared, direct })
}

/// Partial sums of the Cauchy square Σ_t c_t l̄^{−t}, c_t = Σ_p a_p a_{t−p}
/// over the stored coefficients a, truncated at t = N like E(N).
fn direct_readings(series: &EnergySeries) -> Vec<Real> {
    let prec = series.prec;
    let bits = prec.bits();
    let c = &series.coeffs;
    let z = Float::with_val(bits, 1u32 / &series.lbar);
    let mut out = Vec::with_capacity(series.n_corrections);
    let mut acc = prec.zero();
    let mut zp = prec.one();
    for total in 0..=series.n_corrections.min(c.len().saturating_sub(1)) {
        let mut ct = prec.zero();
        for p in 0..=total {
            ct += Float::with_val(bits, &c[p] * &c[total - p]);
        }
        acc += Float::with_val(bits, &ct * &zp);
        zp *= &z;
        if total >= 1 {
            out.push(acc.clone());
        }
    }
    out
}

/// Ě as a function of the physical energy.
pub fn check_energy(case: &PowerLawCase, e: &Real) -> Result<Real> {
    let bits = case.precision().bits();
    let em = Float::with_val(bits, e + &case.m);
    if em <= 0 {
        return Err(PsletError::Domain("E must exceed -m".into()));
    }
    let nu = case.nu.ratio();
    let neg_two_over_nu = Exponent::new(-2 * nu.denom(), *nu.numer())?;
    let outer = Exponent::new(*nu.numer(), nu.numer() + 2 * nu.denom())?;
    let two_a = Float::with_val(bits, &case.a * 2u32);
    let inner = em * pow_exact(case.precision(), &two_a, neg_two_over_nu);
    let first = Float::with_val(bits, e - &case.m) - Float::with_val(bits, &case.b0 * 2u32);
    Ok(first * pow_exact(case.precision(), &inner, outer))
}

/// Solves Ě(E) = `e_check` for E > −m. Exactly one root is expected; none
/// or several are errors.
pub fn invert_energy(case: &PowerLawCase, e_check: &Real) -> Result<Real> {
    let prec = case.precision();
    let bits = prec.bits();
    let f = |e: &Real| -> Result<Real> { Ok(check_energy(case, e)? - e_check) };

    // bracket: (−m, hi], hi grown until Ě(hi) exceeds the target
    let zero_at = Float::with_val(bits, &case.m + Float::with_val(bits, &case.b0 * 2u32));
    let mut hi = Float::with_val(bits, zero_at.abs_ref()) + Float::with_val(bits, case.m.abs_ref()) + 1u32;
    let mut grow = 0;
    while f(&hi)? <= 0 {
        hi *= 2u32;
        grow += 1;
        if grow > 200 {
            return Err(PsletError::RootSearch("no root: check value too large to bracket".into()));
        }
    }

    // geometric scan in E + m, then bisection on every sign change
    let points = 2000;
    let span = Float::with_val(bits, &hi + &case.m);
    let tiny = Float::with_val(bits, &span * prec.tolerance(30));
    let ratio = Float::with_val(bits, &span / &tiny);
    let e_at = |i: usize| -> Real {
        let t = Float::with_val(bits, ratio.clone().pow(&prec.ratio(i as i64, points as i64)));
        Float::with_val(bits, &tiny * t) - &case.m
    };
    let mut roots: Vec<Real> = Vec::new();
    let mut prev_e = e_at(0);
    let mut prev_f = f(&prev_e)?;
    for i in 1..=points {
        let e = e_at(i);
        let fe = f(&e)?;
        if fe.is_zero() {
            roots.push(e.clone());
        } else if !prev_f.is_zero() && (fe > 0) != (prev_f > 0) {
            roots.push(bisect_root(&f, prev_e.clone(), e.clone(), prec)?);
        }
        prev_e = e;
        prev_f = fe;
    }
    debug!("power-law inversion found {} root(s)", roots.len());
    match roots.len() {
        0 => Err(PsletError::RootSearch("no root E > -m".into())),
        1 => Ok(roots.pop().expect("one root")),
        _ => Err(PsletError::RootSearch(format!(
            "multiple roots: {}",
            roots.iter().map(|r| r.to_f64().to_string()).collect::<Vec<_>>().join(", ")
        ))),
    }
}

fn bisect_root(f: &dyn Fn(&Real) -> Result<Real>, mut lo: Real, mut hi: Real, prec: Precision) -> Result<Real> {
    let bits = prec.bits();
    let tol = prec.tolerance(25);
    let lo_pos = f(&lo)? > 0;
    for _ in 0..400 {
        let width = Float::with_val(bits, &hi - &lo).abs();
        let scale = Float::with_val(bits, hi.abs_ref()).max(&prec.one());
        if width <= Float::with_val(bits, &tol * &scale) * prec.ratio(1, 1000) {
            break;
        }
        let mid = Float::with_val(bits, &lo + &hi) / 2u32;
        let fm = f(&mid)?;
        if fm.is_zero() {
            return Ok(mid);
        }
        if (fm > 0) == lo_pos {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(Float::with_val(bits, &lo + &hi) / 2u32)
}
