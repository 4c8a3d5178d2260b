//! The expansion point r₀ and the coefficient arrays that feed the
//! hierarchy.
//!
//! Given r₀, the minimization of the leading energy fixes Q, then E^(−1), ω
//! and the shift β₀. The closure Q = l̄² turns this into a one-dimensional
//! root problem in r₀, solved by a geometric scan plus bisection.

use log::{debug, warn};
use rug::Float;

use crate::effective::EffectiveProblem;
use crate::error::{PsletError, Result};
use crate::power_sum::Exponent;
use crate::real::{Precision, Real};

/// Sign of the square root in the leading energy.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default)]
pub enum Branch {
    #[default]
    Plus,
    Minus,
}

impl Branch {
    fn sign(self) -> i32 {
        match self {
            Branch::Plus => 1,
            Branch::Minus => -1,
        }
    }
}

#[derive(Clone, Debug)]
pub struct ExpansionOptions {
    pub branch: Branch,
    /// Highest Taylor order stored in the coefficient arrays.
    pub order_max: usize,
    /// When set, the Taylor coefficients of the spin-orbit term U above this
    /// order are dropped from bₙ. `None` keeps U exact.
    pub spin_orbit_cutoff: Option<usize>,
    /// Scan range as multiples of the length scale.
    pub scan_lo: f64,
    pub scan_hi: f64,
    pub scan_points: usize,
}

impl Default for ExpansionOptions {
    fn default() -> Self {
        ExpansionOptions {
            branch: Branch::Plus,
            order_max: 30,
            spin_orbit_cutoff: None,
            scan_lo: 1e-3,
            scan_hi: 1e3,
            scan_points: 600,
        }
    }
}

#[derive(Clone, Debug)]
pub struct ExpansionPoint {
    pub prec: Precision,
    pub k: u32,
    pub r0: Real,
    pub q: Real,
    pub lbar: Real,
    pub beta0: Real,
    pub omega: Real,
    pub e_lead: Real,
    /// aₙ = (−1)ⁿ(n+1)
    pub a: Vec<Real>,
    /// Taylor coefficients of Γ
    pub b: Vec<Real>,
    /// Taylor coefficients of V
    pub c: Vec<Real>,
    /// Tₙ = aₙ + (r₀²/Q)·bₙ
    pub t: Vec<Real>,
    pub order_max: usize,
    /// |Q·a₁ + r₀²b₁ + 2r₀²E^(−1)c₁|, the vanishing linear coefficient.
    pub linear_residual: Real,
    /// d²E^(−1)/dr₀² at fixed Q.
    pub curvature: Real,
    /// Other roots of the closure found by the scan, as (r₀, E^(−1)).
    pub other_roots: Vec<(Real, Real)>,
}

impl ExpansionPoint {
    pub fn precision(&self) -> Precision {
        self.prec
    }

    /// |Q − l̄²|/Q
    pub fn closure_residual(&self) -> Real {
        let bits = self.r0.prec();
        let l2 = Float::with_val(bits, self.lbar.square_ref());
        Float::with_val(bits, &self.q - l2).abs() / &self.q
    }
}

struct Local {
    v: Real,
    vp: Real,
    vpp: Real,
    g: Real,
    gp: Real,
    gpp: Real,
}

fn local(prob: &EffectiveProblem, r0: &Real) -> Result<Local> {
    let v = prob.vector.eval(r0)?;
    let vp = prob.vector.derivative(1).eval(r0)?;
    let vpp = prob.vector.derivative(2).eval(r0)?;
    let g = prob.gamma.eval(r0)?;
    let gp = prob.gamma.derivative(1).eval(r0)?;
    let gpp = prob.gamma.derivative(2).eval(r0)?;
    Ok(Local { v, vp, vpp, g, gp, gpp })
}

fn q_from_local(prec: Precision, l: &Local, r0: &Real) -> Result<Real> {
    let bits = prec.bits();
    let r3 = Float::with_val(bits, r0 * r0) * r0;
    let r6 = Float::with_val(bits, r3.square_ref());
    let vvp = Float::with_val(bits, &l.v * &l.vp);
    let vp2 = Float::with_val(bits, l.vp.square_ref());
    // h = r₀³[2VV' + Γ' + r₀V'²]
    let h = Float::with_val(bits, &vvp * 2u32) + &l.gp + Float::with_val(bits, r0 * &vp2);
    let h = h * &r3;
    // g = r₀⁶[Γ'² + 4VV'Γ' − 4ΓV'²]
    let g = Float::with_val(bits, l.gp.square_ref()) + Float::with_val(bits, &vvp * &l.gp) * 4u32
        - Float::with_val(bits, &l.g * &vp2) * 4u32;
    let g = g * &r6;
    let h2 = Float::with_val(bits, h.square_ref());
    let mut disc = Float::with_val(bits, &h2 - &g);
    if disc < 0 {
        // V ≡ 0 makes h² = g exactly; keep rounding noise from flipping the
        // branch.
        let noise = Float::with_val(bits, &h2 * prec.tolerance(prec.digits() as i32 - 10));
        if Float::with_val(bits, -&disc) <= noise {
            disc = prec.zero();
        } else {
            return Err(PsletError::Branch {
                r0: r0.to_f64().to_string(),
                disc: disc.to_f64().to_string(),
            });
        }
    }
    Ok((h + disc.sqrt()) / 2u32)
}

/// Q = [h + sqrt(h² − g)]/2.
pub fn q_of_r0(prob: &EffectiveProblem, r0: &Real) -> Result<Real> {
    let l = local(prob, r0)?;
    q_from_local(prob.precision(), &l, r0)
}

fn lead_from_local(prec: Precision, l: &Local, r0: &Real, q: &Real, branch: Branch) -> Result<Real> {
    let bits = prec.bits();
    let rad = Float::with_val(bits, l.v.square_ref()) + &l.g + Float::with_val(bits, q / Float::with_val(bits, r0 * r0));
    if rad < 0 {
        return Err(PsletError::Radicand(r0.to_f64().to_string()));
    }
    Ok(Float::with_val(bits, &l.v + rad.sqrt() * branch.sign()))
}

/// E^(−1) = V(r₀) ± sqrt(V(r₀)² + Γ(r₀) + Q/r₀²).
pub fn leading_energy(prob: &EffectiveProblem, r0: &Real, q: &Real, branch: Branch) -> Result<Real> {
    let l = local(prob, r0)?;
    lead_from_local(prob.precision(), &l, r0, q, branch)
}

fn omega_from_local(prec: Precision, l: &Local, r0: &Real, q: &Real, e_lead: &Real) -> Result<Real> {
    let bits = prec.bits();
    let r4q = Float::with_val(bits, r0 * r0).square() / q;
    let w2 = prec.int(12)
        + Float::with_val(bits, &r4q * &l.gpp) * 2u32
        + Float::with_val(bits, &r4q * e_lead) * &l.vpp * 4u32;
    if w2 <= 0 {
        return Err(PsletError::ImaginaryFrequency {
            r0: r0.to_f64().to_string(),
            omega2: w2.to_f64().to_string(),
        });
    }
    Ok(w2.sqrt())
}

/// ω = sqrt(12 + (2r₀⁴/Q)Γ'' + (4r₀⁴/Q)E^(−1)V'').
pub fn omega_of(prob: &EffectiveProblem, r0: &Real, q: &Real, e_lead: &Real) -> Result<Real> {
    let l = local(prob, r0)?;
    omega_from_local(prob.precision(), &l, r0, q, e_lead)
}

/// β₀ = −[1 + (k+1/2)ω]/2, the shift that makes E^(0) vanish.
pub fn beta_shift(k: u32, omega: &Real) -> Real {
    let bits = omega.prec();
    let kh = Float::with_val(bits, f64::from(k) + 0.5);
    -(Float::with_val(bits, &kh * omega) + 1u32) / 2u32
}

struct Trial {
    q: Real,
    e_lead: Real,
    omega: Real,
    beta0: Real,
    lbar: Real,
    f: Real,
}

fn trial(prob: &EffectiveProblem, k: u32, r0: &Real, branch: Branch) -> Result<Trial> {
    let prec = prob.precision();
    let bits = prec.bits();
    let l = local(prob, r0)?;
    let q = q_from_local(prec, &l, r0)?;
    let e_lead = lead_from_local(prec, &l, r0, &q, branch)?;
    let omega = omega_from_local(prec, &l, r0, &q, &e_lead)?;
    let beta0 = beta_shift(k, &omega);
    let lbar = Float::with_val(bits, &prob.ell_eff - &beta0);
    let f = Float::with_val(bits, &q - Float::with_val(bits, lbar.square_ref()));
    Ok(Trial { q, e_lead, omega, beta0, lbar, f })
}

/// Scale on which the well sits, used to place the scan.
///
/// A confining leading term c·r^s balances the centrifugal barrier at
/// ((ℓ+k+1)²/c)^{1/(s+2)}; without one the Coulombic (ℓ+k+1)²/(m·A) is used.
pub fn length_scale(prob: &EffectiveProblem, k: u32) -> f64 {
    let n = f64::from(prob.ell + k + 1);
    if let Some((p, c)) = prob.gamma.terms().last() {
        if *p > Exponent::int(0) && c.to_f64() > 0.0 {
            let s = p.to_f64();
            return (n * n / c.to_f64()).powf(1.0 / (s + 2.0));
        }
    }
    let a1 = -prob.vector.coefficient(Exponent::int(-1)).to_f64();
    let g1 = -prob.gamma.coefficient(Exponent::int(-1)).to_f64();
    let m = prob.mass.to_f64().abs().max(f64::MIN_POSITIVE);
    let strength = a1.abs().max(g1.abs() / (2.0 * m)).max(1.0);
    n * n / (m * strength)
}

fn bisect(prob: &EffectiveProblem, k: u32, branch: Branch, lo: Real, hi: Real) -> Result<Real> {
    let prec = prob.precision();
    let bits = prec.bits();
    let tol = prec.tolerance(32);
    let (mut a, mut b) = (lo, hi);
    let mut fa_pos = trial(prob, k, &a, branch)?.f > 0;
    for _ in 0..400 {
        let width = Float::with_val(bits, &b - &a);
        if width <= Float::with_val(bits, &b * &tol) {
            break;
        }
        let mid = Float::with_val(bits, &a + &b) / 2u32;
        let fm = match trial(prob, k, &mid, branch) {
            Ok(t) => t.f,
            Err(_) => break,
        };
        if fm.is_zero() {
            return Ok(mid);
        }
        if (fm > 0) == fa_pos {
            a = mid;
            fa_pos = fm > 0;
        } else {
            b = mid;
        }
    }
    Ok(Float::with_val(bits, &a + &b) / 2u32)
}

fn curvature(prec: Precision, l: &Local, r0: &Real, q: &Real) -> Real {
    let bits = prec.bits();
    let r2 = Float::with_val(bits, r0 * r0);
    let r3 = Float::with_val(bits, &r2 * r0);
    let r4 = Float::with_val(bits, r2.square_ref());
    let rad = Float::with_val(bits, l.v.square_ref()) + &l.g + Float::with_val(bits, q / &r2);
    let d1 = Float::with_val(bits, &l.v * &l.vp) * 2u32 + &l.gp - Float::with_val(bits, q / &r3) * 2u32;
    let d2 = Float::with_val(bits, l.vp.square_ref()) * 2u32
        + Float::with_val(bits, &l.v * &l.vpp) * 2u32
        + &l.gpp
        + Float::with_val(bits, q / &r4) * 6u32;
    let sq = Float::with_val(bits, rad.sqrt_ref());
    let rad32 = Float::with_val(bits, &rad * &sq);
    Float::with_val(bits, &l.vpp + Float::with_val(bits, &d2 / &sq) / 2u32)
        - Float::with_val(bits, d1.square_ref()) / rad32 / 4u32
}

/// Finds r₀ with Q(r₀) = l̄(r₀)² and fills the coefficient arrays.
pub fn solve_expansion_point(prob: &EffectiveProblem, k: u32, opts: &ExpansionOptions) -> Result<ExpansionPoint> {
    let prec = prob.precision();
    let bits = prec.bits();
    let scale = length_scale(prob, k);
    let lo = scale * opts.scan_lo;
    let hi = scale * opts.scan_hi;
    let n = opts.scan_points.max(8);

    let mut roots: Vec<Real> = Vec::new();
    let mut prev: Option<(Real, bool)> = None;
    for i in 0..=n {
        let r = prec.f64(lo * (hi / lo).powf(i as f64 / n as f64));
        let f = match trial(prob, k, &r, opts.branch) {
            Ok(t) => t.f,
            Err(_) => {
                prev = None;
                continue;
            }
        };
        let pos = f > 0;
        if let Some((pr, ppos)) = &prev {
            if *ppos != pos {
                roots.push(bisect(prob, k, opts.branch, pr.clone(), r.clone())?);
            }
        }
        prev = Some((r, pos));
    }

    let tol = prec.tolerance(25);
    let mut accepted: Vec<(Real, Trial)> = Vec::new();
    for r in roots {
        let t = trial(prob, k, &r, opts.branch)?;
        let rel = Float::with_val(bits, t.f.abs_ref()) / Float::with_val(bits, t.q.abs_ref());
        if rel <= tol {
            accepted.push((r, t));
        } else {
            debug!("discarding sign change at r0 = {} (closure {})", r.to_f64(), rel.to_f64());
        }
    }
    if accepted.is_empty() {
        return Err(PsletError::NoRoot {
            lo: lo.to_string(),
            hi: hi.to_string(),
        });
    }
    accepted.sort_by(|a, b| a.1.e_lead.partial_cmp(&b.1.e_lead).unwrap_or(std::cmp::Ordering::Equal));
    if accepted.len() > 1 {
        warn!(
            "{} expansion points for k = {}, l = {}; using r0 = {} with the lowest E^(-1)",
            accepted.len(),
            k,
            prob.ell,
            accepted[0].0.to_f64()
        );
    }
    let mut it = accepted.into_iter();
    let (r0, t) = it.next().expect("non-empty");
    let other_roots = it.map(|(r, t)| (r, t.e_lead)).collect();

    let order_max = opts.order_max;
    let a: Vec<Real> = (0..=order_max)
        .map(|n| prec.int(if n % 2 == 0 { 1 } else { -1 } * (n as i64 + 1)))
        .collect();
    let mut b = prob.gamma.taylor(&r0, order_max)?;
    if let Some(cut) = opts.spin_orbit_cutoff {
        let u = prob.spin_orbit.taylor(&r0, order_max)?;
        for (bn, un) in b.iter_mut().zip(u).skip(cut + 1) {
            *bn -= un;
        }
    }
    let c = prob.vector.taylor(&r0, order_max)?;
    let rq = Float::with_val(bits, &r0 * &r0) / &t.q;
    let tn = a
        .iter()
        .zip(&b)
        .map(|(an, bn)| Float::with_val(bits, an + Float::with_val(bits, &rq * bn)))
        .collect();

    let r2 = Float::with_val(bits, &r0 * &r0);
    let linear_residual = Float::with_val(
        bits,
        Float::with_val(bits, &t.q * &a[1])
            + Float::with_val(bits, &r2 * &b[1])
            + Float::with_val(bits, &r2 * &t.e_lead) * &c[1] * 2u32,
    )
    .abs();
    let l = local(prob, &r0)?;
    let curvature = curvature(prec, &l, &r0, &t.q);

    Ok(ExpansionPoint {
        prec,
        k,
        r0,
        q: t.q,
        lbar: t.lbar,
        beta0: t.beta0,
        omega: t.omega,
        e_lead: t.e_lead,
        a,
        b,
        c,
        t: tn,
        order_max,
        linear_residual,
        curvature,
        other_roots,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::effective::{build_effective, EquationKind, PotentialSpec};
    use crate::power_sum::PowerSum;

    fn p() -> Precision {
        Precision::default()
    }

    fn mixed_coulomb(m: &str, a: &str, ell: u32) -> EffectiveProblem {
        let v = PowerSum::monomial(p(), -p().parse(a).unwrap(), Exponent::int(-1));
        let spec = PotentialSpec::new(v.clone(), v, p().parse(m).unwrap(), EquationKind::Dirac, -(i64::from(ell) + 1)).unwrap();
        build_effective(&spec, ell).unwrap()
    }

    fn near(x: &Real, want: f64, tol: f64) -> bool {
        (x.to_f64() - want).abs() <= tol
    }

    #[test]
    fn q_for_mixed_coulomb() {
        let prob = mixed_coulomb("1", "1", 0);
        assert!(near(&q_of_r0(&prob, &p().one()).unwrap(), 1.0, 1e-40));
        assert!(near(&q_of_r0(&prob, &p().parse("2.5").unwrap()).unwrap(), 4.0, 1e-40));
    }

    #[test]
    fn leading_energy_for_mixed_coulomb() {
        let prob = mixed_coulomb("1", "1", 0);
        let e = leading_energy(&prob, &p().one(), &p().one(), Branch::Plus).unwrap();
        assert!(near(&e, 0.0, 1e-40));
        let prob = mixed_coulomb("1", "1", 1);
        let e = leading_energy(&prob, &p().parse("2.5").unwrap(), &p().int(4), Branch::Plus).unwrap();
        assert!(near(&e, 0.6, 1e-40));
    }

    #[test]
    fn omega_and_shift_for_mixed_coulomb() {
        let prob = mixed_coulomb("1", "1", 0);
        let w = omega_of(&prob, &p().one(), &p().one(), &p().zero()).unwrap();
        assert!(near(&w, 2.0, 1e-40));
        assert!(near(&beta_shift(0, &w), -1.0, 0.0));
        assert!(near(&beta_shift(2, &w), -3.0, 0.0));
        assert!(near(&beta_shift(0, &p().int(4)), -1.5, 0.0));
    }

    #[test]
    fn expansion_point_for_mixed_coulomb() {
        let prob = mixed_coulomb("1", "1", 0);
        let pt = solve_expansion_point(&prob, 0, &ExpansionOptions::default()).unwrap();
        assert!(near(&pt.r0, 1.0, 1e-28));
        assert!(near(&pt.q, 1.0, 1e-28));
        assert!(pt.closure_residual() < p().tolerance(25));
        assert!(pt.curvature > 0);
    }

    #[test]
    fn free_particle_has_no_well() {
        let spec = PotentialSpec::new(PowerSum::zero(p()), PowerSum::zero(p()), p().one(), EquationKind::Dirac, -1).unwrap();
        let prob = build_effective(&spec, 0).unwrap();
        assert!(solve_expansion_point(&prob, 0, &ExpansionOptions::default()).is_err());
    }
}
