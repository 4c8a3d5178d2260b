//! Closed-form energies for the exactly solvable cases.

use rug::Float;

use crate::effective::{EffectiveProblem, EquationKind};
use crate::error::{PsletError, Result};
use crate::expansion::Branch;
use crate::power_sum::{Exponent, PowerSum};
use crate::real::{Precision, Real};

/// Which potential carries the Coulomb tail.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum CoulombKind {
    Vector,
    Scalar,
}

/// The exactly solvable families, with their parameters.
#[derive(Clone, Debug)]
pub enum ExactCase {
    /// V = S = −A/r.
    MixedCoulomb { m: Real, a: Real, k: u32, ell: u32 },
    /// Klein-Gordon with a pure vector or pure scalar Coulomb potential.
    KgCoulomb { kind: CoulombKind, m: Real, a: Real, k: u32, ell: u32 },
    /// Dirac oscillator, `two_j` = 2j, `eps` and `beta` = ±1.
    DiracOscillator { m: Real, b: Real, k: u32, ell: u32, two_j: u32, eps: i32, beta: i32 },
    /// Dirac equation with a vector or scalar Coulomb potential; `s` = ±1.
    DiracCoulomb { kind: CoulombKind, m: Real, a: Real, k: u32, kappa: i64, s: i32 },
}

impl ExactCase {
    pub fn energy(&self, branch: Branch) -> Result<Real> {
        match self {
            ExactCase::MixedCoulomb { m, a, k, ell } => Ok(mixed_coulomb_exact(m, a, *k, *ell)),
            ExactCase::KgCoulomb { kind, m, a, k, ell } => kg_coulomb_exact(*kind, m, a, *k, *ell, branch),
            ExactCase::DiracOscillator { m, b, k, ell, two_j, eps, beta } => {
                dirac_oscillator_exact(m, b, *k, *ell, *two_j, *eps, *beta, branch)
            }
            ExactCase::DiracCoulomb { kind, m, a, k, kappa, s } => dirac_coulomb_exact(*kind, m, a, *k, *kappa, *s),
        }
    }
}

fn bits_of(x: &Real) -> u32 {
    x.prec()
}

/// E = m[1 − 2A²/((k+ℓ+1)² + A²)].
pub fn mixed_coulomb_exact(m: &Real, a: &Real, k: u32, ell: u32) -> Real {
    let bits = bits_of(m);
    let n = Float::with_val(bits, k + ell + 1);
    let a2 = Float::with_val(bits, a.square_ref());
    let den = Float::with_val(bits, n.square_ref()) + &a2;
    let frac = Float::with_val(bits, &a2 * 2u32) / den;
    Float::with_val(bits, m * (1u32 - frac))
}

/// Vector: E = m[1 + A²/n₁²]^{−1/2}, n₁ = k + 1/2 + sqrt((ℓ+1/2)² − A²).
/// Scalar: E = ±m[1 − A²/n₂²]^{1/2}, n₂ = k + 1/2 + sqrt((ℓ+1/2)² + A²).
pub fn kg_coulomb_exact(kind: CoulombKind, m: &Real, a: &Real, k: u32, ell: u32, branch: Branch) -> Result<Real> {
    let bits = bits_of(m);
    let l = Float::with_val(bits, f64::from(ell) + 0.5);
    let l2 = Float::with_val(bits, l.square_ref());
    let a2 = Float::with_val(bits, a.square_ref());
    let kh = Float::with_val(bits, f64::from(k) + 0.5);
    match kind {
        CoulombKind::Vector => {
            let rad = Float::with_val(bits, &l2 - &a2);
            if rad < 0 {
                return Err(PsletError::Supercritical(format!("A1^2 >= (l+1/2)^2 for l = {ell}")));
            }
            let n1 = kh + rad.sqrt();
            let x = 1u32 + a2 / Float::with_val(bits, n1.square_ref());
            Ok(Float::with_val(bits, m / x.sqrt()))
        }
        CoulombKind::Scalar => {
            let n2 = kh + Float::with_val(bits, &l2 + &a2).sqrt();
            let x = 1u32 - a2 / Float::with_val(bits, n2.square_ref());
            let e = Float::with_val(bits, m * x.sqrt());
            Ok(match branch {
                Branch::Plus => e,
                Branch::Minus => -e,
            })
        }
    }
}

/// E² = m² + 2mB(2k + ℓ + 3/2) + mB(ε(2j+1) − β).
#[allow(clippy::too_many_arguments)]
pub fn dirac_oscillator_exact(m: &Real, b: &Real, k: u32, ell: u32, two_j: u32, eps: i32, beta: i32, branch: Branch) -> Result<Real> {
    let bits = bits_of(m);
    let e2 = dirac_oscillator_energy_squared(m, b, k, ell, two_j, eps, beta);
    if e2 < 0 {
        return Err(PsletError::NegativeEnergySquared(e2.to_f64().to_string()));
    }
    let e = Float::with_val(bits, e2.sqrt_ref());
    Ok(match branch {
        Branch::Plus => e,
        Branch::Minus => -e,
    })
}

fn spin_shift(two_j: u32, eps: i32, beta: i32) -> i64 {
    i64::from(eps) * (i64::from(two_j) + 1) - i64::from(beta)
}

fn dirac_oscillator_energy_squared(m: &Real, b: &Real, k: u32, ell: u32, two_j: u32, eps: i32, beta: i32) -> Real {
    let bits = bits_of(m);
    let mb = Float::with_val(bits, m * b);
    let level = Float::with_val(bits, f64::from(2 * k + ell) + 1.5);
    Float::with_val(bits, m.square_ref())
        + Float::with_val(bits, &mb * &level) * 2u32
        + mb * spin_shift(two_j, eps, beta)
}

/// Reduced problem of the Dirac oscillator: V = 0, ℓ' = ℓ and
/// Γ = m²B²r² + m² + mB(ε(2j+1) − β).
pub fn dirac_oscillator_problem(prec: Precision, m: &Real, b: &Real, ell: u32, two_j: u32, eps: i32, beta: i32) -> EffectiveProblem {
    let bits = prec.bits();
    let mb = Float::with_val(bits, m * b);
    let harmonic = Float::with_val(bits, mb.square_ref());
    let konst = Float::with_val(bits, m.square_ref()) + Float::with_val(bits, &mb * spin_shift(two_j, eps, beta));
    let gamma = PowerSum::from_terms(prec, vec![(Exponent::int(2), harmonic), (Exponent::int(0), konst)]);
    let kappa = if i64::from(two_j) == 2 * i64::from(ell) + 1 { -(i64::from(ell) + 1) } else { i64::from(ell) };
    EffectiveProblem::from_parts(
        gamma,
        PowerSum::zero(prec),
        prec.int(i64::from(ell)),
        PowerSum::zero(prec),
        prec.widen(m),
        ell,
        kappa,
        EquationKind::Dirac,
    )
}

/// Vector: E = m[1 + A²/Q]^{−1/2}; scalar: E = m[1 − A²/Q]^{1/2}, with
/// Q = (k + 1/2 + s/2 + sqrt(κ² ∓ A²))².
pub fn dirac_coulomb_exact(kind: CoulombKind, m: &Real, a: &Real, k: u32, kappa: i64, s: i32) -> Result<Real> {
    let bits = bits_of(m);
    let a2 = Float::with_val(bits, a.square_ref());
    let kap2 = Float::with_val(bits, kappa * kappa);
    let gamma2 = match kind {
        CoulombKind::Vector => Float::with_val(bits, &kap2 - &a2),
        CoulombKind::Scalar => Float::with_val(bits, &kap2 + &a2),
    };
    if gamma2 <= 0 {
        return Err(PsletError::Supercritical(format!("A^2 >= kappa^2 for kappa = {kappa}")));
    }
    let shift = Float::with_val(bits, f64::from(k) + 0.5 + 0.5 * f64::from(s));
    let q = Float::with_val(bits, shift + gamma2.sqrt()).square();
    Ok(match kind {
        CoulombKind::Vector => {
            let x = 1u32 + a2 / q;
            Float::with_val(bits, m / x.sqrt())
        }
        CoulombKind::Scalar => {
            let x = 1u32 - a2 / q;
            Float::with_val(bits, m * x.sqrt())
        }
    })
}
