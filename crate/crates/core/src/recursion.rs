//! The order-by-order hierarchy in powers of h = l̄^{−1/2}.
//!
//! With x = l̄^{1/2}(r − r₀)/r₀ and Φ = F(x)·exp(∫Y), the reduced equation
//! becomes, order by order in h,
//!
//! ```text
//! Σᵢ Fᵢ(W_{s−i} − Y'_{s−i}) − 2Σᵢ Fᵢ'Y_{s−i} − Σᵢ Fᵢ·(YY)_{s−i} − F_s'' = 0
//! ```
//!
//! where W_s is the order-s piece of the shifted potential and (YY)_m is the
//! order-m piece of Y². F₀ is the monic nodal polynomial x^k + …, every
//! higher Fₛ has degree below k, and Yₛ has degree s+1. Each order is a
//! triangular linear system: Yₛ comes from the powers above x^k, the newest
//! energy coefficient from x^k, and Fₛ from the powers below.

use rug::Float;

use crate::effective::EffectiveProblem;
use crate::error::{PsletError, Result};
use crate::expansion::{solve_expansion_point, ExpansionOptions, ExpansionPoint};
use crate::real::{max_abs, Precision, Real};

/// Relative residual allowed after an order is solved.
pub const RESIDUAL_EXP10: i32 = 20;

/// Dense polynomial in x, index = power.
#[derive(Clone, Debug, PartialEq)]
pub struct Poly {
    bits: u32,
    pub coeffs: Vec<Real>,
}

impl Poly {
    pub fn zeros(prec: Precision, len: usize) -> Self {
        Poly { bits: prec.bits(), coeffs: vec![prec.zero(); len] }
    }

    pub fn monomial(prec: Precision, c: Real, power: usize) -> Self {
        let mut p = Poly::zeros(prec, power + 1);
        p.coeffs[power] = c;
        p
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn coeff(&self, power: usize) -> Option<&Real> {
        self.coeffs.get(power)
    }

    /// Highest power with a nonzero coefficient.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.iter().rposition(|c| !c.is_zero())
    }

    fn grow(&mut self, len: usize) {
        if self.coeffs.len() < len {
            self.coeffs.resize(len, Float::new(self.bits));
        }
    }

    pub fn add_scaled(&mut self, other: &Poly, s: &Real) {
        self.grow(other.len());
        for (a, b) in self.coeffs.iter_mut().zip(&other.coeffs) {
            if !b.is_zero() {
                *a += Float::with_val(self.bits, b * s);
            }
        }
    }

    pub fn add_assign(&mut self, other: &Poly) {
        self.grow(other.len());
        for (a, b) in self.coeffs.iter_mut().zip(&other.coeffs) {
            *a += b;
        }
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        if self.is_empty() || other.is_empty() {
            return Poly { bits: self.bits, coeffs: Vec::new() };
        }
        let bits = self.bits;
        let mut out = vec![Float::new(bits); self.len() + other.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                if !b.is_zero() {
                    out[i + j] += Float::with_val(bits, a * b);
                }
            }
        }
        Poly { bits, coeffs: out }
    }

    pub fn derivative(&self) -> Poly {
        Poly {
            bits: self.bits,
            coeffs: self
                .coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| Float::with_val(self.bits, c * i as u32))
                .collect(),
        }
    }

    pub fn scaled(&self, s: &Real) -> Poly {
        Poly {
            bits: self.bits,
            coeffs: self.coeffs.iter().map(|c| Float::with_val(self.bits, c * s)).collect(),
        }
    }

    pub fn eval_f64(&self, x: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, c| acc * x + c.to_f64())
    }
}

/// Known pieces of the shifted potential at one order.
///
/// For order s: υ^(s) always; J^(s/2) when s is even, K^((s−1)/2) when s is
/// odd; ε^((s−2)/2) when s ≥ 2 is even. The newest energy coefficient
/// E^(s/2) is left out of J and ε and reported separately through
/// `energy_coupling`, the factor it multiplies in W_s.
#[derive(Clone, Debug)]
pub struct OrderTerms {
    pub order: usize,
    pub upsilon: Poly,
    pub j: Poly,
    pub k: Poly,
    pub eps: Real,
    pub energy_coupling: Option<Real>,
}

impl OrderTerms {
    /// υ + J + K − ε, without the newest energy coefficient.
    pub fn known(&self) -> Poly {
        let mut w = self.upsilon.clone();
        w.add_assign(&self.j);
        w.add_assign(&self.k);
        if !self.eps.is_zero() {
            w.grow(1);
            w.coeffs[0] -= &self.eps;
        }
        w
    }
}

/// Assembles υ^(s), J, K, ε for order `s` from the energy coefficients known
/// so far (`energies[n+1]` = E^(n)).
pub fn build_order_terms(pt: &ExpansionPoint, energies: &[Real], s: usize) -> Result<OrderTerms> {
    let prec = pt.precision();
    let bits = prec.bits();
    if s + 2 >= pt.t.len() {
        return Err(PsletError::Range {
            requested: s + 2,
            available: pt.t.len().saturating_sub(1),
        });
    }
    // E^(m) must be known for every m below the newest one.
    let needed: i64 = if s.is_multiple_of(2) { s as i64 / 2 - 1 } else { (s as i64 - 1) / 2 };
    let have = energies.len() as i64 - 2;
    if have < needed {
        return Err(PsletError::Dependency { order: s, missing: have + 1 });
    }
    let e = |n: i64| -> &Real { &energies[(n + 1) as usize] };

    let beta = &pt.beta0;
    let two_beta_1 = Float::with_val(bits, beta * 2u32) + 1u32;
    let rq = Float::with_val(bits, &pt.r0 * &pt.r0) / &pt.q;
    let two_rq = Float::with_val(bits, &rq * 2u32);

    let mut upsilon = Poly::monomial(prec, pt.t[s + 2].clone(), s + 2);
    upsilon.add_assign(&Poly::monomial(prec, Float::with_val(bits, &two_beta_1 * &pt.a[s]), s));
    if s >= 2 {
        let bb = Float::with_val(bits, beta * Float::with_val(bits, beta + 1u32));
        upsilon.add_assign(&Poly::monomial(prec, bb * &pt.a[s - 2], s - 2));
    }

    let mut j = Poly::zeros(prec, 0);
    let mut k = Poly::zeros(prec, 0);
    let mut eps = prec.zero();
    let mut energy_coupling = None;
    if s.is_multiple_of(2) {
        let n = (s / 2) as i64;
        for p in 0..=(n + 1) {
            let m = n - p;
            if m == n && n > 0 {
                continue;
            }
            let cp = &pt.c[2 * p as usize];
            j.add_assign(&Poly::monomial(prec, Float::with_val(bits, &two_rq * e(m)) * cp, 2 * p as usize));
        }
        if n >= 1 {
            let nm = n - 1;
            for p in -1..=(nm + 1) {
                let (a, b) = (nm - p, p);
                if a == n || b == n {
                    continue;
                }
                eps += Float::with_val(bits, e(a) * e(b));
            }
            eps *= &rq;
            // E^(n) enters through J (c₀ term) and through the two boundary
            // terms of ε.
            let c0_minus_lead = Float::with_val(bits, &pt.c[0] - &pt.e_lead);
            energy_coupling = Some(Float::with_val(bits, &two_rq * &c0_minus_lead));
        }
    } else {
        let n = ((s - 1) / 2) as i64;
        for p in 0..=(n + 1) {
            let cp = &pt.c[2 * p as usize + 1];
            k.add_assign(&Poly::monomial(prec, Float::with_val(bits, &two_rq * e(n - p)) * cp, 2 * p as usize + 1));
        }
    }
    Ok(OrderTerms { order: s, upsilon, j, k, eps, energy_coupling })
}

/// Coefficient tables of the wavefunction factors.
///
/// Yₛ is split by parity: `d[s][p]` is the coefficient of x^{2p−1} (so
/// `d[s][0]` is always zero) and `c[s][p]` that of x^{2p}. `a[s][p]` is the
/// coefficient of x^p in Fₛ for p < k; F₀ also carries the leading x^k.
#[derive(Clone, Debug, Default)]
pub struct WaveCoefficients {
    pub d: Vec<Vec<Real>>,
    pub c: Vec<Vec<Real>>,
    pub a: Vec<Vec<Real>>,
}

#[derive(Clone, Debug)]
pub struct EnergySeries {
    /// E^(n) at index n+1, for n = −1, 0, …, N.
    pub coeffs: Vec<Real>,
    pub lbar: Real,
    pub q: Real,
    pub k: u32,
    pub ell: u32,
    pub kappa: i64,
    pub n_corrections: usize,
    pub prec: Precision,
}

impl EnergySeries {
    pub fn coefficient(&self, n: i64) -> Option<&Real> {
        usize::try_from(n + 1).ok().and_then(|i| self.coeffs.get(i))
    }

    pub fn leading(&self) -> &Real {
        &self.coeffs[0]
    }
}

/// Running state of the hierarchy for one (k, ℓ).
pub struct Hierarchy<'a> {
    pt: &'a ExpansionPoint,
    prec: Precision,
    k: usize,
    f: Vec<Poly>,
    y: Vec<Poly>,
    w: Vec<Poly>,
    yy: Vec<Poly>,
    energies: Vec<Real>,
    residuals: Vec<Real>,
}

impl<'a> Hierarchy<'a> {
    /// Sets up order zero: Y₀ = −ωx/2 and the monic F₀ of degree k.
    pub fn new(pt: &'a ExpansionPoint) -> Result<Self> {
        let prec = pt.precision();
        let bits = prec.bits();
        let k = pt.k as usize;
        let omega = &pt.omega;

        let y0 = Poly {
            bits,
            coeffs: vec![prec.zero(), -Float::with_val(bits, omega / 2u32)],
        };
        let mut f0 = Poly::monomial(prec, prec.one(), k);
        for p in (0..k).rev() {
            // (p−k)ω·A_p = (p+2)(p+1)·A_{p+2}
            let above = f0.coeffs.get(p + 2).cloned().unwrap_or_else(|| prec.zero());
            let num = above * ((p as u32 + 2) * (p as u32 + 1));
            let den = Float::with_val(bits, omega * (p as i64 - k as i64));
            f0.coeffs[p] = num / den;
        }
        let energies = vec![pt.e_lead.clone(), prec.zero()];
        let terms = build_order_terms(pt, &energies, 0)?;
        let w0 = terms.known();
        let yy0 = y0.mul(&y0);
        let mut h = Hierarchy {
            pt,
            prec,
            k,
            f: vec![f0],
            y: vec![y0],
            w: vec![w0],
            yy: vec![yy0],
            energies,
            residuals: Vec::new(),
        };
        let (res, scale) = h.residual(0);
        h.check(0, res, scale)?;
        Ok(h)
    }

    pub fn point(&self) -> &ExpansionPoint {
        self.pt
    }

    pub fn solved_orders(&self) -> usize {
        self.f.len() - 1
    }

    /// E^(n) at index n+1.
    pub fn energies(&self) -> &[Real] {
        &self.energies
    }

    /// Relative residual of each solved order.
    pub fn residuals(&self) -> &[Real] {
        &self.residuals
    }

    pub fn f(&self) -> &[Poly] {
        &self.f
    }

    pub fn y(&self) -> &[Poly] {
        &self.y
    }

    fn degree_bound(&self, s: usize) -> usize {
        self.k + s + 2
    }

    /// Full relation at order s with the current F, Y, W; returns the largest
    /// coefficient and the largest individual term entering it.
    fn residual(&self, s: usize) -> (Real, Real) {
        let prec = self.prec;
        let mut total = Poly::zeros(prec, self.degree_bound(s) + 1);
        let mut scale = prec.zero();
        let mut push = |total: &mut Poly, piece: Poly, sign: i32| {
            let m = max_abs(prec, &piece.coeffs);
            if m > scale {
                scale = m;
            }
            total.add_scaled(&piece, &prec.int(i64::from(sign)));
        };
        for i in 0..=s {
            let j = s - i;
            let mut wy = self.w[j].clone();
            wy.add_scaled(&self.y[j].derivative(), &prec.int(-1));
            push(&mut total, self.f[i].mul(&wy), 1);
            push(&mut total, self.f[i].derivative().mul(&self.y[j]), -2);
            push(&mut total, self.f[i].mul(&self.yy[j]), -1);
        }
        push(&mut total, self.f[s].derivative().derivative(), -1);
        (max_abs(prec, &total.coeffs), scale)
    }

    fn check(&mut self, s: usize, res: Real, scale: Real) -> Result<()> {
        let bits = self.prec.bits();
        let floor = self.prec.tolerance(self.prec.digits() as i32);
        let denom = if scale > floor { scale.clone() } else { floor };
        let rel = Float::with_val(bits, &res / &denom);
        if rel > self.prec.tolerance(RESIDUAL_EXP10) {
            return Err(PsletError::Tolerance {
                order: s,
                residual: res.to_f64().to_string(),
                scale: scale.to_f64().to_string(),
            });
        }
        self.residuals.push(rel);
        Ok(())
    }

    /// Solves order s = (solved orders) + 1.
    pub fn solve_next(&mut self) -> Result<()> {
        let s = self.f.len();
        let prec = self.prec;
        let bits = prec.bits();
        let k = self.k;
        let bound = self.degree_bound(s);
        let omega = self.pt.omega.clone();

        let terms = build_order_terms(self.pt, &self.energies, s)?;
        self.w.push(terms.known());
        self.y.push(Poly::zeros(prec, 0));
        self.f.push(Poly::zeros(prec, 0));
        let mut yy_partial = Poly::zeros(prec, 0);
        for j in 1..s {
            yy_partial.add_assign(&self.y[j].mul(&self.y[s - j]));
        }
        self.yy.push(yy_partial);

        // residual with the unknowns at zero
        let mut r = Poly::zeros(prec, bound + 1);
        for i in 0..s {
            let j = s - i;
            let mut wy = self.w[j].clone();
            wy.add_scaled(&self.y[j].derivative(), &prec.int(-1));
            r.add_assign(&self.f[i].mul(&wy));
            r.add_scaled(&self.f[i].derivative().mul(&self.y[j]), &prec.int(-2));
            r.add_scaled(&self.f[i].mul(&self.yy[j]), &prec.int(-1));
        }
        if let Some(d) = r.degree() {
            if d > bound {
                return Err(PsletError::DegreeBound { order: s, degree: d, bound });
            }
        }
        r.grow(bound + 1);

        // Yₛ: x^q ↦ −F₀·q·x^{q−1} + ωx^{q+1}F₀ − 2F₀'x^q, leading power k+q+1
        let f0 = self.f[0].clone();
        let f0p = f0.derivative();
        let mut ys = Poly::zeros(prec, s + 2);
        for q in (0..=s + 1).rev() {
            let lead = &r.coeffs[k + q + 1];
            let yq = -Float::with_val(bits, lead / &omega);
            let mut op = Poly::monomial(prec, omega.clone(), 1).mul(&f0);
            op.add_scaled(&f0p, &prec.int(-2));
            let mut op = op.mul(&Poly::monomial(prec, prec.one(), q));
            if q > 0 {
                op.add_scaled(
                    &f0.mul(&Poly::monomial(prec, prec.int(q as i64), q - 1)),
                    &prec.int(-1),
                );
            }
            r.add_scaled(&op, &yq);
            ys.coeffs[q] = yq;
        }

        // newest energy coefficient from x^k
        if let Some(coupling) = &terms.energy_coupling {
            if coupling.is_zero() {
                return Err(PsletError::Singular { order: s, power: k });
            }
            let delta = -Float::with_val(bits, &r.coeffs[k] / coupling);
            let dw = Float::with_val(bits, &delta * coupling);
            r.add_scaled(&f0, &dw);
            self.w[s].add_assign(&Poly::monomial(prec, dw, 0));
            self.energies.push(delta);
        }

        // Fₛ: x^p ↦ (p−k)ω·x^p − p(p−1)·x^{p−2}
        let mut fs = Poly::zeros(prec, k);
        for p in (0..k).rev() {
            let diag = Float::with_val(bits, &omega * (p as i64 - k as i64));
            let ap = -Float::with_val(bits, &r.coeffs[p] / &diag);
            let mut op = Poly::monomial(prec, diag, p);
            if p >= 2 {
                op.add_assign(&Poly::monomial(prec, prec.int(-((p * (p - 1)) as i64)), p - 2));
            }
            r.add_scaled(&op, &ap);
            fs.coeffs[p] = ap;
        }

        let yy_full = {
            let mut t = self.yy[s].clone();
            t.add_scaled(&self.y[0].mul(&ys), &prec.int(2));
            t
        };
        self.y[s] = ys;
        self.f[s] = fs;
        self.yy[s] = yy_full;

        let (res, scale) = self.residual(s);
        self.check(s, res, scale)
    }

    pub fn wave_coefficients(&self) -> WaveCoefficients {
        let prec = self.prec;
        let mut out = WaveCoefficients::default();
        for ys in &self.y {
            let half = ys.len() / 2 + 1;
            let mut d = vec![prec.zero(); half + 1];
            let mut c = vec![prec.zero(); half + 1];
            for (i, v) in ys.coeffs.iter().enumerate() {
                if i % 2 == 1 {
                    d[(i + 1) / 2] = v.clone();
                } else {
                    c[i / 2] = v.clone();
                }
            }
            out.d.push(d);
            out.c.push(c);
        }
        for fs in &self.f {
            out.a.push(fs.coeffs.iter().take(self.k).cloned().collect());
        }
        out
    }

    /// Sign changes of F₀ + hF₁ + … + h^m F_m on x ∈ (−√l̄, x_max), the image
    /// of r > 0.
    pub fn node_count(&self, orders: usize) -> usize {
        let lbar = self.pt.lbar.to_f64();
        let h = 1.0 / lbar.sqrt();
        let mut total = self.f[0].clone();
        let mut hp = 1.0;
        for fs in self.f.iter().take(orders + 1).skip(1) {
            hp *= h;
            total.add_scaled(fs, &self.prec.f64(hp));
        }
        let lo = -lbar.sqrt();
        let hi = lbar.sqrt().max(20.0);
        let n = 20_000;
        let samples: Vec<f64> = (1..n)
            .map(|i| total.eval_f64(lo + (hi - lo) * i as f64 / n as f64))
            .collect();
        crate::shooting::count_nodes(&samples)
    }
}

/// Everything the hierarchy produced for one state.
#[derive(Clone, Debug)]
pub struct StateSolution {
    pub point: ExpansionPoint,
    pub series: EnergySeries,
    pub wave: WaveCoefficients,
    /// Largest relative residual over the solved orders.
    pub max_residual: Real,
    pub nodes: usize,
}

/// Solves the expansion point and the hierarchy up to `n` corrections
/// (E^(n) is the last coefficient computed).
pub fn solve_state(prob: &EffectiveProblem, k: u32, n: usize, opts: &ExpansionOptions) -> Result<StateSolution> {
    let ctx = |e: PsletError| e.in_state(k, prob.ell, prob.kappa);
    if n < 1 {
        return Err(ctx(PsletError::Config("at least one correction is required".into())));
    }
    let mut opts = opts.clone();
    opts.order_max = opts.order_max.max(2 * n + 2);
    let point = solve_expansion_point(prob, k, &opts).map_err(ctx)?;
    let prec = point.precision();
    let mut h = Hierarchy::new(&point).map_err(ctx)?;
    for _ in 0..2 * n {
        h.solve_next().map_err(ctx)?;
    }
    let coeffs = h.energies().to_vec();
    let series = EnergySeries {
        coeffs,
        lbar: point.lbar.clone(),
        q: point.q.clone(),
        k,
        ell: prob.ell,
        kappa: prob.kappa,
        n_corrections: n,
        prec,
    };
    let max_residual = max_abs(prec, h.residuals());
    let wave = h.wave_coefficients();
    let nodes = h.node_count(2);
    drop(h);
    Ok(StateSolution { point, series, wave, max_residual, nodes })
}

/// The energy series with `n` corrections for radial quantum number `k`.
pub fn energy_corrections(prob: &EffectiveProblem, k: u32, n: usize, opts: &ExpansionOptions) -> Result<EnergySeries> {
    solve_state(prob, k, n, opts).map(|s| s.series)
}
