//! Finite sums of real-power monomials `Σ cᵢ·r^sᵢ`.
//!
//! Every potential the solver handles, and every function derived from one
//! (the spin-orbit term, the effective potential), lives in this algebra. It
//! is closed under products and derivatives, so Taylor coefficients of any
//! order come out exact up to the working precision.
//!
//! Exponents are exact rationals. A decimal exponent such as `0.1` is stored
//! as `1/10`, which makes exponent matching exact when terms are merged.

use std::fmt;
use std::str::FromStr;

use num_rational::Ratio;
use num_traits::{One, ToPrimitive, Zero};
use rug::ops::Pow;
use rug::{Float, Rational};

use crate::error::{PsletError, Result};
use crate::real::{Precision, Real};

/// Exact rational exponent.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Exponent(Ratio<i64>);

impl Exponent {
    pub fn int(n: i64) -> Self {
        Exponent(Ratio::from_integer(n))
    }

    pub fn new(num: i64, den: i64) -> Result<Self> {
        if den == 0 {
            return Err(PsletError::Parse("exponent with zero denominator".into()));
        }
        Ok(Exponent(Ratio::new(num, den)))
    }

    pub fn ratio(&self) -> Ratio<i64> {
        self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_integer(&self) -> bool {
        self.0.is_integer()
    }

    pub fn to_f64(&self) -> f64 {
        self.0.to_f64().unwrap_or(f64::NAN)
    }

    pub fn to_rational(&self) -> Rational {
        Rational::from((*self.0.numer(), *self.0.denom()))
    }

    pub fn to_real(&self, prec: Precision) -> Real {
        Float::with_val(prec.bits(), self.to_rational())
    }

    fn shifted(&self, by: i64) -> Self {
        Exponent(self.0 + Ratio::from_integer(by))
    }
}

impl std::ops::Add for Exponent {
    type Output = Exponent;
    fn add(self, rhs: Exponent) -> Exponent {
        Exponent(self.0 + rhs.0)
    }
}

impl fmt::Display for Exponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_integer() {
            write!(f, "{}", self.0.numer())
        } else {
            write!(f, "{}/{}", self.0.numer(), self.0.denom())
        }
    }
}

impl FromStr for Exponent {
    type Err = PsletError;

    /// Accepts integers, fractions (`1/10`) and plain decimals (`0.1`,
    /// `-2.5`). Decimal input is converted exactly.
    fn from_str(text: &str) -> Result<Self> {
        let s = text.trim();
        let bad = || PsletError::Parse(format!("bad exponent {text:?}"));
        if let Some((n, d)) = s.split_once('/') {
            let n: i64 = n.trim().parse().map_err(|_| bad())?;
            let d: i64 = d.trim().parse().map_err(|_| bad())?;
            return Exponent::new(n, d);
        }
        if s.contains(['e', 'E']) {
            return Err(PsletError::Parse(format!(
                "exponent {text:?}: scientific notation is not accepted, use a decimal or p/q"
            )));
        }
        let (neg, body) = match s.strip_prefix('-') {
            Some(rest) => (true, rest),
            None => (false, s.strip_prefix('+').unwrap_or(s)),
        };
        let (int_part, frac_part) = body.split_once('.').unwrap_or((body, ""));
        if int_part.is_empty() && frac_part.is_empty() {
            return Err(bad());
        }
        if !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit()) {
            return Err(bad());
        }
        if frac_part.len() > 15 {
            return Err(PsletError::Parse(format!(
                "exponent {text:?} has too many decimals"
            )));
        }
        let den = 10i64.pow(frac_part.len() as u32);
        let digits = format!("{int_part}{frac_part}");
        let num: i64 = if digits.is_empty() { 0 } else { digits.parse().map_err(|_| bad())? };
        Exponent::new(if neg { -num } else { num }, den)
    }
}

/// Sum of monomials, kept sorted by exponent with no zero coefficients.
#[derive(Clone, Debug)]
pub struct PowerSum {
    prec: Precision,
    terms: Vec<(Exponent, Real)>,
}

impl PartialEq for PowerSum {
    fn eq(&self, other: &Self) -> bool {
        self.terms.len() == other.terms.len()
            && self
                .terms
                .iter()
                .zip(&other.terms)
                .all(|((p, c), (q, d))| p == q && c == d)
    }
}

impl PowerSum {
    pub fn zero(prec: Precision) -> Self {
        PowerSum { prec, terms: Vec::new() }
    }

    pub fn constant(prec: Precision, c: Real) -> Self {
        Self::monomial(prec, c, Exponent::int(0))
    }

    pub fn monomial(prec: Precision, coeff: Real, power: Exponent) -> Self {
        Self::from_terms(prec, vec![(power, coeff)])
    }

    /// Builds the canonical form: merges equal exponents, drops zeros, sorts.
    pub fn from_terms(prec: Precision, terms: impl IntoIterator<Item = (Exponent, Real)>) -> Self {
        let mut raw: Vec<(Exponent, Real)> = terms
            .into_iter()
            .map(|(p, c)| (p, prec.widen(&c)))
            .collect();
        raw.sort_by_key(|a| a.0);
        let mut merged: Vec<(Exponent, Real)> = Vec::with_capacity(raw.len());
        for (p, c) in raw {
            match merged.last_mut() {
                Some((q, acc)) if *q == p => *acc += c,
                _ => merged.push((p, c)),
            }
        }
        merged.retain(|(_, c)| !c.is_zero());
        PowerSum { prec, terms: merged }
    }

    pub fn precision(&self) -> Precision {
        self.prec
    }

    pub fn terms(&self) -> &[(Exponent, Real)] {
        &self.terms
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Coefficient of `r^power`, zero if absent.
    pub fn coefficient(&self, power: Exponent) -> Real {
        self.terms
            .iter()
            .find(|(p, _)| *p == power)
            .map(|(_, c)| c.clone())
            .unwrap_or_else(|| self.prec.zero())
    }

    pub fn max_power(&self) -> Option<Exponent> {
        self.terms.last().map(|(p, _)| *p)
    }

    pub fn eval(&self, r: &Real) -> Result<Real> {
        if *r <= 0 {
            return Err(PsletError::Domain(format!(
                "power sum evaluated at r = {} (needs r > 0)",
                r.to_f64()
            )));
        }
        let mut acc = self.prec.zero();
        for (p, c) in &self.terms {
            acc += Float::with_val(self.prec.bits(), c * pow_exact(self.prec, r, *p));
        }
        Ok(acc)
    }

    pub fn scale(&self, s: &Real) -> Self {
        Self::from_terms(
            self.prec,
            self.terms
                .iter()
                .map(|(p, c)| (*p, Float::with_val(self.prec.bits(), c * s))),
        )
    }

    pub fn add(&self, other: &PowerSum) -> Self {
        Self::from_terms(
            self.prec,
            self.terms.iter().chain(other.terms.iter()).cloned(),
        )
    }

    pub fn sub(&self, other: &PowerSum) -> Self {
        self.add(&other.scale(&self.prec.int(-1)))
    }

    pub fn product(&self, other: &PowerSum) -> Self {
        let mut out = Vec::with_capacity(self.terms.len() * other.terms.len());
        for (p, c) in &self.terms {
            for (q, d) in &other.terms {
                out.push((*p + *q, Float::with_val(self.prec.bits(), c * d)));
            }
        }
        Self::from_terms(self.prec, out)
    }

    pub fn derivative(&self, order: usize) -> Self {
        let mut cur = self.clone();
        for _ in 0..order {
            let terms = cur
                .terms
                .iter()
                .filter(|(p, _)| !p.is_zero())
                .map(|(p, c)| {
                    let s = p.to_real(self.prec);
                    (p.shifted(-1), Float::with_val(self.prec.bits(), c * s))
                })
                .collect::<Vec<_>>();
            cur = Self::from_terms(self.prec, terms);
        }
        cur
    }

    /// `[p(r0), p'(r0)·r0/1!, …, p⁽ⁿ⁾(r0)·r0ⁿ/n!]` for n up to `n_max`.
    ///
    /// Uses `p⁽ⁿ⁾(r0)·r0ⁿ/n! = Σ c·binom(s, n)·r0^s`, with the generalized
    /// binomial computed in exact rationals.
    pub fn taylor(&self, r0: &Real, n_max: usize) -> Result<Vec<Real>> {
        if *r0 <= 0 {
            return Err(PsletError::Domain(format!(
                "Taylor expansion about r0 = {} (needs r0 > 0)",
                r0.to_f64()
            )));
        }
        let bits = self.prec.bits();
        let mut out = vec![self.prec.zero(); n_max + 1];
        for (p, c) in &self.terms {
            let base = Float::with_val(bits, c * pow_exact(self.prec, r0, *p));
            let s = p.to_rational();
            let mut binom = Rational::from(1);
            for (n, slot) in out.iter_mut().enumerate() {
                if n > 0 {
                    binom *= Rational::from(&s - (n as i64 - 1));
                    binom /= n as i64;
                    if binom.is_zero() {
                        break;
                    }
                }
                *slot += Float::with_val(bits, &base * &binom);
            }
        }
        Ok(out)
    }
}

/// `r^p` for rational `p`, computed as an integer power of a root so that
/// exponents like `1/10` carry no representation error.
pub fn pow_exact(prec: Precision, r: &Real, p: Exponent) -> Real {
    let bits = prec.bits();
    let ratio = p.ratio();
    let num = *ratio.numer();
    let den = *ratio.denom();
    let base = if den.is_one() {
        Float::with_val(bits, r)
    } else {
        Float::with_val(bits, r).root(den as u32)
    };
    if num.abs() <= i64::from(i32::MAX) {
        base.pow(num as i32)
    } else {
        base.pow(Float::with_val(bits, num))
    }
}

impl fmt::Display for PowerSum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (p, c)) in self.terms.iter().enumerate() {
            let v = c.to_f64();
            if i > 0 {
                write!(f, " {} ", if v < 0.0 { '-' } else { '+' })?;
            } else if v < 0.0 {
                write!(f, "-")?;
            }
            write!(f, "{}", v.abs())?;
            if !p.is_zero() {
                write!(f, "·r^{p}")?;
            }
        }
        Ok(())
    }
}
