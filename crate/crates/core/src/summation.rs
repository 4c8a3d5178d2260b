//! Partial sums, the mass prescription and Padé approximants of the energy
//! series.

use std::collections::BTreeMap;

use num_complex::Complex64;
use rug::Float;

use crate::error::{PsletError, Result};
use crate::real::{Precision, Real};
use crate::recursion::EnergySeries;

/// Default relative tolerance for [`stabilization`].
pub const DEFAULT_STABILIZATION_TOL: f64 = 5e-5;

/// E(N) = Σ_{n=−1}^{N−1} E^(n)·l̄^{−(n+1)}.
pub fn partial_sum(series: &EnergySeries, n: usize) -> Result<Real> {
    if n == 0 || n > series.n_corrections || n + 1 > series.coeffs.len() {
        return Err(PsletError::Range {
            requested: n,
            available: series.n_corrections,
        });
    }
    let bits = series.prec.bits();
    let z = Float::with_val(bits, 1u32 / &series.lbar);
    let mut zp = series.prec.one();
    let mut acc = series.prec.zero();
    for c in series.coeffs.iter().take(n + 1) {
        acc += Float::with_val(bits, c * &zp);
        zp *= &z;
    }
    Ok(acc)
}

/// [E(1), …, E(N)].
pub fn partial_sums(series: &EnergySeries) -> Vec<Real> {
    (1..=series.n_corrections)
        .map(|n| partial_sum(series, n).expect("n within range"))
        .collect()
}

/// M = 2E.
pub fn mass_of(e: &Real) -> Real {
    Float::with_val(e.prec(), e * 2u32)
}

/// Which function the rational approximant is built for.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default)]
pub enum PadeConvention {
    /// f(z) = Σ_{n≥−1} E^(n) z^{n+1}, leading term included.
    #[default]
    LeadingIncluded,
    /// f(z) = E^(−1) + z·g(z) with the approximant built for
    /// g(z) = Σ_{n≥0} E^(n) z^n.
    LeadingExcluded,
}

#[derive(Clone, Debug)]
pub struct PadeValue {
    pub i: usize,
    pub j: usize,
    /// Energy value at z = 1/l̄.
    pub value: Real,
    /// Some root of the denominator lies in |z| ≤ 1/l̄.
    pub pole_in_disc: bool,
    pub numerator: Vec<Real>,
    pub denominator: Vec<Real>,
}

/// Numerator and denominator of the [i/j] approximant of the power series
/// `f`, with the denominator normalized to q₀ = 1.
pub fn pade_coefficients(prec: Precision, f: &[Real], i: usize, j: usize) -> Result<(Vec<Real>, Vec<Real>)> {
    if f.len() < i + j + 1 {
        return Err(PsletError::Range {
            requested: i + j + 1,
            available: f.len(),
        });
    }
    let bits = prec.bits();
    let at = |n: i64| -> Real {
        if n < 0 {
            prec.zero()
        } else {
            f[n as usize].clone()
        }
    };
    let mut q = vec![prec.one()];
    if j > 0 {
        // Σ_{t=1..j} q_t f_{i+r−t} = −f_{i+r},  r = 1..j
        let mut m: Vec<Vec<Real>> = (1..=j)
            .map(|r| (1..=j).map(|t| at(i as i64 + r as i64 - t as i64)).collect())
            .collect();
        let mut rhs: Vec<Real> = (1..=j).map(|r| -at((i + r) as i64)).collect();
        let sol = gauss_solve(prec, &mut m, &mut rhs).ok_or(PsletError::DegenerateDenominator { i, j })?;
        q.extend(sol);
    }
    let p = (0..=i)
        .map(|n| {
            let mut acc = prec.zero();
            for (t, qt) in q.iter().enumerate().take(n.min(j) + 1) {
                acc += Float::with_val(bits, qt * &f[n - t]);
            }
            acc
        })
        .collect();
    Ok((p, q))
}

/// Gaussian elimination with partial pivoting; `None` when singular to the
/// working precision.
fn gauss_solve(prec: Precision, m: &mut [Vec<Real>], rhs: &mut [Real]) -> Option<Vec<Real>> {
    let n = rhs.len();
    let bits = prec.bits();
    let scale = m
        .iter()
        .flatten()
        .map(|x| Float::with_val(bits, x.abs_ref()))
        .fold(prec.zero(), |a, b| if b > a { b } else { a });
    if scale.is_zero() {
        return None;
    }
    let tiny = Float::with_val(bits, &scale * prec.tolerance(prec.digits() as i32 - 5));
    for col in 0..n {
        let piv = (col..n)
            .max_by(|&a, &b| {
                m[a][col]
                    .clone()
                    .abs()
                    .partial_cmp(&m[b][col].clone().abs())
                    .unwrap_or(std::cmp::Ordering::Equal)
            })
            .expect("non-empty range");
        if Float::with_val(bits, m[piv][col].abs_ref()) <= tiny {
            return None;
        }
        m.swap(col, piv);
        rhs.swap(col, piv);
        for row in col + 1..n {
            let factor = Float::with_val(bits, &m[row][col] / &m[col][col]);
            if factor.is_zero() {
                continue;
            }
            for c in col..n {
                let d = Float::with_val(bits, &factor * &m[col][c]);
                m[row][c] -= d;
            }
            let d = Float::with_val(bits, &factor * &rhs[col]);
            rhs[row] -= d;
        }
    }
    let mut x = vec![prec.zero(); n];
    for row in (0..n).rev() {
        let mut acc = rhs[row].clone();
        for c in row + 1..n {
            acc -= Float::with_val(bits, &m[row][c] * &x[c]);
        }
        x[row] = acc / &m[row][row];
    }
    Some(x)
}

fn horner(prec: Precision, c: &[Real], z: &Real) -> Real {
    let bits = prec.bits();
    c.iter().rev().fold(prec.zero(), |acc, a| Float::with_val(bits, &acc * z) + a)
}

/// Roots of Σ cₜ zᵗ by Durand-Kerner, in double precision.
pub fn polynomial_roots(c: &[f64]) -> Vec<Complex64> {
    let deg = match c.iter().rposition(|x| *x != 0.0) {
        Some(d) if d > 0 => d,
        _ => return Vec::new(),
    };
    let lead = c[deg];
    let monic: Vec<f64> = c[..=deg].iter().map(|x| x / lead).collect();
    let bound = 1.0 + monic[..deg].iter().fold(0.0f64, |a, x| a.max(x.abs()));
    let seed = Complex64::from_polar(0.4 + 0.5 * bound.min(1e6).sqrt(), 0.9);
    let mut roots: Vec<Complex64> = (0..deg).map(|i| seed.powu(i as u32 + 1)).collect();
    let eval = |z: Complex64| monic.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, a| acc * z + a);
    for _ in 0..2000 {
        let mut delta = 0.0f64;
        for i in 0..deg {
            let mut den = Complex64::new(1.0, 0.0);
            for (j, rj) in roots.iter().enumerate() {
                if i != j {
                    den *= roots[i] - rj;
                }
            }
            if den.norm() == 0.0 {
                den = Complex64::new(1e-12, 1e-12);
            }
            let step = eval(roots[i]) / den;
            roots[i] -= step;
            delta = delta.max(step.norm());
        }
        if delta < 1e-15 {
            break;
        }
    }
    roots
}

fn series_coefficients(series: &EnergySeries, conv: PadeConvention, len: usize) -> Vec<Real> {
    let skip = match conv {
        PadeConvention::LeadingIncluded => 0,
        PadeConvention::LeadingExcluded => 1,
    };
    series.coeffs.iter().skip(skip).take(len).cloned().collect()
}

/// [i/j] approximant in z = 1/l̄, evaluated at z = 1/l̄.
pub fn pade(series: &EnergySeries, i: usize, j: usize) -> Result<PadeValue> {
    pade_with(series, i, j, PadeConvention::LeadingIncluded)
}

pub fn pade_with(series: &EnergySeries, i: usize, j: usize, conv: PadeConvention) -> Result<PadeValue> {
    if i + j + 1 > series.n_corrections {
        return Err(PsletError::Range {
            requested: i + j + 1,
            available: series.n_corrections,
        });
    }
    let prec = series.prec;
    let bits = prec.bits();
    let f = series_coefficients(series, conv, i + j + 1);
    let (p, q) = pade_coefficients(prec, &f, i, j)?;
    let z = Float::with_val(bits, 1u32 / &series.lbar);
    let den = horner(prec, &q, &z);
    if den.is_zero() {
        return Err(PsletError::DegenerateDenominator { i, j });
    }
    let mut value = horner(prec, &p, &z) / den;
    if conv == PadeConvention::LeadingExcluded {
        value = Float::with_val(bits, &value * &z) + series.leading();
    }
    let qf: Vec<f64> = q.iter().map(|x| x.to_f64()).collect();
    let radius = z.to_f64();
    let pole_in_disc = polynomial_roots(&qf).iter().any(|r| r.norm() <= radius);
    Ok(PadeValue {
        i,
        j,
        value,
        pole_in_disc,
        numerator: p,
        denominator: q,
    })
}

/// Every [i/j] with i+j+1 ≤ N; singular entries are omitted.
#[derive(Clone, Debug, Default)]
pub struct PadeTable {
    pub entries: BTreeMap<(usize, usize), PadeValue>,
}

impl PadeTable {
    pub fn get(&self, i: usize, j: usize) -> Option<&PadeValue> {
        self.entries.get(&(i, j))
    }
}

pub fn pade_table(series: &EnergySeries, conv: PadeConvention) -> PadeTable {
    let mut entries = BTreeMap::new();
    let n = series.n_corrections;
    for i in 0..n {
        for j in 0..n - i {
            if let Ok(v) = pade_with(series, i, j, conv) {
                entries.insert((i, j), v);
            }
        }
    }
    PadeTable { entries }
}

/// First index N (1-based) where the next two values agree with value N to
/// within `rel_tol` relative, as (N, value N).
pub fn stabilization_of(values: &[Real], rel_tol: f64) -> Result<(usize, Real)> {
    for n in 0..values.len().saturating_sub(2) {
        let base = &values[n];
        let bits = base.prec();
        let tol = Float::with_val(bits, base.abs_ref()) * rel_tol;
        let d1 = Float::with_val(bits, &values[n + 1] - base).abs();
        let d2 = Float::with_val(bits, &values[n + 2] - base).abs();
        if d1 <= tol && d2 <= tol {
            return Ok((n + 1, base.clone()));
        }
    }
    Err(PsletError::NoStabilization(values.len()))
}

/// Stabilization point of the partial sums E(1), E(2), ….
pub fn stabilization(series: &EnergySeries, rel_tol: f64) -> Result<(usize, Real)> {
    stabilization_of(&partial_sums(series), rel_tol)
}
