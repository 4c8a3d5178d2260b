//! The reduced radial problem
//!
//! ```text
//! −Φ'' + [ℓ'(ℓ'+1)/r² + Γ(r) + 2E·V(r)] Φ = E² Φ
//! ```
//!
//! built from a vector potential V, a scalar potential S and the mass. The
//! Coulomb tails of V and S are folded into the centrifugal term, which is
//! what shifts ℓ to ℓ'.

use std::fmt;

use rug::Float;

use crate::error::{PsletError, Result};
use crate::power_sum::{Exponent, PowerSum};
use crate::real::{Precision, Real};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum EquationKind {
    KleinGordon,
    Dirac,
}

impl EquationKind {
    /// The λ switch in front of the spin-orbit term.
    pub fn lambda(self) -> u32 {
        match self {
            EquationKind::KleinGordon => 0,
            EquationKind::Dirac => 1,
        }
    }
}

impl fmt::Display for EquationKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            EquationKind::KleinGordon => "kg",
            EquationKind::Dirac => "dirac",
        })
    }
}

/// Physical input: potentials, mass, equation type and κ.
#[derive(Clone, Debug)]
pub struct PotentialSpec {
    pub vector: PowerSum,
    pub scalar: PowerSum,
    pub mass: Real,
    pub kind: EquationKind,
    pub kappa: i64,
}

impl PotentialSpec {
    pub fn new(vector: PowerSum, scalar: PowerSum, mass: Real, kind: EquationKind, kappa: i64) -> Result<Self> {
        if mass <= 0 {
            return Err(PsletError::Config("mass must be positive".into()));
        }
        if kind == EquationKind::Dirac && kappa == 0 {
            return Err(PsletError::Config("kappa must be nonzero".into()));
        }
        Ok(PotentialSpec { vector, scalar, mass, kind, kappa })
    }

    pub fn precision(&self) -> Precision {
        self.vector.precision()
    }

    /// A₁, minus the coefficient of `1/r` in V.
    pub fn coulomb_vector_strength(&self) -> Real {
        -self.vector.coefficient(Exponent::int(-1))
    }

    /// A₂, minus the coefficient of `1/r` in S.
    pub fn coulomb_scalar_strength(&self) -> Real {
        -self.scalar.coefficient(Exponent::int(-1))
    }
}

/// ℓ for a Dirac κ: κ = −(ℓ+1) when j = ℓ+1/2 and κ = ℓ when j = ℓ−1/2.
pub fn ell_of_kappa(kappa: i64) -> Result<u32> {
    match kappa {
        0 => Err(PsletError::Config("kappa must be nonzero".into())),
        k if k < 0 => Ok((-k - 1) as u32),
        k => Ok(k as u32),
    }
}

/// The reduced problem handed to the expansion.
#[derive(Clone, Debug)]
pub struct EffectiveProblem {
    pub gamma: PowerSum,
    pub vector: PowerSum,
    pub ell_eff: Real,
    pub spin_orbit: PowerSum,
    pub mass: Real,
    pub ell: u32,
    pub kappa: i64,
    pub kind: EquationKind,
}

impl EffectiveProblem {
    /// Assembles a problem from an explicit Γ, for cases that are not
    /// written as vector/scalar potentials (oscillator-type Γ, the reduced
    /// power-law equation).
    #[allow(clippy::too_many_arguments)]
    pub fn from_parts(
        gamma: PowerSum,
        vector: PowerSum,
        ell_eff: Real,
        spin_orbit: PowerSum,
        mass: Real,
        ell: u32,
        kappa: i64,
        kind: EquationKind,
    ) -> Self {
        EffectiveProblem { gamma, vector, ell_eff, spin_orbit, mass, ell, kappa, kind }
    }

    pub fn precision(&self) -> Precision {
        self.gamma.precision()
    }
}

pub fn build_y(spec: &PotentialSpec) -> PowerSum {
    spec.vector.sub(&spec.scalar)
}

/// `U = (λ/4m)[y'' − 2κy'/r + 3y'²/(4m)]`.
pub fn build_u(y: &PowerSum, kappa: i64, mass: &Real, lambda: u32) -> PowerSum {
    let prec = y.precision();
    if lambda == 0 || y.is_empty() {
        return PowerSum::zero(prec);
    }
    let bits = prec.bits();
    let yp = y.derivative(1);
    let ypp = y.derivative(2);
    let inv_r = PowerSum::monomial(prec, prec.one(), Exponent::int(-1));
    let four_m = Float::with_val(bits, mass * 4u32);
    let spin = yp.product(&inv_r).scale(&prec.int(-2 * kappa));
    let square = yp.product(&yp).scale(&Float::with_val(bits, 3u32 / &four_m));
    let bracket = ypp.add(&spin).add(&square);
    bracket.scale(&Float::with_val(bits, f64::from(lambda) / four_m))
}

/// ℓ' = −1/2 + sqrt((ℓ+1/2)² − A₁² + A₂²).
pub fn shifted_ell(prec: Precision, ell: u32, a1: &Real, a2: &Real) -> Result<Real> {
    let bits = prec.bits();
    let half = prec.ratio(1, 2);
    let l = Float::with_val(bits, prec.int(i64::from(ell)) + &half);
    let rad = Float::with_val(bits, l.square_ref()) - Float::with_val(bits, a1.square_ref())
        + Float::with_val(bits, a2.square_ref());
    // rad = 0 (ℓ' = −1/2) is the critical coupling, still bound
    if rad < 0 {
        return Err(PsletError::Subcritical(format!("{}", rad.to_f64())));
    }
    Ok(rad.sqrt() - half)
}

/// Builds Γ = −V_r + S_r + 2mS + m² + U and ℓ' for orbital quantum number ℓ.
///
/// For the Dirac equation κ must belong to ℓ; for Klein-Gordon κ plays no
/// role and is replaced by ℓ.
pub fn build_effective(spec: &PotentialSpec, ell: u32) -> Result<EffectiveProblem> {
    let prec = spec.precision();
    let bits = prec.bits();
    let kappa = match spec.kind {
        EquationKind::Dirac => {
            if ell_of_kappa(spec.kappa)? != ell {
                return Err(PsletError::Config(format!(
                    "kappa = {} does not belong to l = {ell}",
                    spec.kappa
                )));
            }
            spec.kappa
        }
        EquationKind::KleinGordon => i64::from(ell),
    };
    let a1 = spec.coulomb_vector_strength();
    let a2 = spec.coulomb_scalar_strength();
    let ell_eff = shifted_ell(prec, ell, &a1, &a2)?;

    let r_m2 = Exponent::int(-2);
    let v = &spec.vector;
    let s = &spec.scalar;
    let v_r = v
        .product(v)
        .sub(&PowerSum::monomial(prec, Float::with_val(bits, a1.square_ref()), r_m2));
    let s_r = s
        .product(s)
        .sub(&PowerSum::monomial(prec, Float::with_val(bits, a2.square_ref()), r_m2));
    let two_m = Float::with_val(bits, &spec.mass * 2u32);
    let m2 = Float::with_val(bits, spec.mass.square_ref());
    let u = build_u(&build_y(spec), kappa, &spec.mass, spec.kind.lambda());
    let gamma = s_r
        .sub(&v_r)
        .add(&s.scale(&two_m))
        .add(&PowerSum::constant(prec, m2))
        .add(&u);

    Ok(EffectiveProblem {
        gamma,
        vector: v.clone(),
        ell_eff,
        spin_orbit: u,
        mass: spec.mass.clone(),
        ell,
        kappa,
        kind: spec.kind,
    })
}
