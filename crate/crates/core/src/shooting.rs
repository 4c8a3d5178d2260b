//! Brute-force eigenvalues of the reduced radial equation by outward
//! shooting, in plain `f64`.
//!
//! With r = eᵗ and Φ = e^{t/2}·u the equation becomes
//!
//! ```text
//! u'' = [(ℓ'+1/2)² + r²(Γ(r) + 2E·V(r) − E²)] u
//! ```
//!
//! which has no centrifugal singularity and resolves both Coulombic and
//! confining tails on one uniform grid in t. For a trial E the outward
//! solution is integrated with classical RK4 and its nodes counted; the
//! count jumps from k to k+1 as E crosses the k-th eigenvalue, and bisection
//! on that jump gives E_num.

use log::warn;

use crate::effective::EffectiveProblem;
use crate::error::{PsletError, Result};
use crate::expansion::length_scale;

#[derive(Clone, Debug)]
pub struct ShootingConfig {
    /// Inner end of the mesh; `None` picks one from the potential.
    pub r_min: Option<f64>,
    /// Outer end of the mesh; `None` places it past the turning point.
    pub r_max: Option<f64>,
    pub steps: usize,
    /// Relative width at which the energy bisection stops.
    pub bisection_tol: f64,
    pub energy_bracket: Option<(f64, f64)>,
}

impl Default for ShootingConfig {
    fn default() -> Self {
        ShootingConfig {
            r_min: None,
            r_max: None,
            steps: 20_000,
            bisection_tol: 1e-13,
            energy_bracket: None,
        }
    }
}

impl ShootingConfig {
    pub fn validate(&self) -> Result<()> {
        if self.steps < 10_000 {
            return Err(PsletError::Config(format!("oracle steps = {} (needs at least 10000)", self.steps)));
        }
        if self.bisection_tol <= 0.0 {
            return Err(PsletError::Config("oracle bisection_tol must be positive".into()));
        }
        if let (Some(a), Some(b)) = (self.r_min, self.r_max) {
            if !(a > 0.0 && a < b) {
                return Err(PsletError::Config("oracle needs 0 < r_min < r_max".into()));
            }
        }
        if let Some((lo, hi)) = self.energy_bracket {
            if lo >= hi {
                return Err(PsletError::Config("oracle energy bracket must have lo < hi".into()));
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug)]
pub struct OracleResult {
    pub e_num: f64,
    pub nodes: usize,
    /// Bisection converged, the node count jumped from k to k+1 across the
    /// final bracket, outward and inward solutions join smoothly at the
    /// turning point, and the spliced tail is below 1e-8 of the peak.
    pub matched: bool,
    /// |E(2·steps) − E(steps)| relative to max(|E|, m).
    pub mesh_halving_delta: f64,
    pub tail_ratio: f64,
    pub r_min: f64,
    pub r_max: f64,
}

/// Number of strict sign changes; zeros are skipped.
pub fn count_nodes(samples: &[f64]) -> usize {
    let mut last = 0.0f64;
    let mut n = 0;
    for &s in samples {
        if s == 0.0 || !s.is_finite() {
            continue;
        }
        if last != 0.0 && (s > 0.0) != (last > 0.0) {
            n += 1;
        }
        last = s;
    }
    n
}

/// f64 image of the problem.
struct Model {
    gamma: Vec<(f64, f64)>,
    vector: Vec<(f64, f64)>,
    nu2: f64,
    mass: f64,
    scale: f64,
}

impl Model {
    fn new(prob: &EffectiveProblem, k: u32) -> Self {
        let conv = |ps: &crate::power_sum::PowerSum| {
            ps.terms()
                .iter()
                .map(|(p, c)| (c.to_f64(), p.to_f64()))
                .collect::<Vec<_>>()
        };
        let l = prob.ell_eff.to_f64();
        Model {
            gamma: conv(&prob.gamma),
            vector: conv(&prob.vector),
            nu2: (l + 0.5) * (l + 0.5),
            mass: prob.mass.to_f64(),
            scale: length_scale(prob, k),
        }
    }

    fn eval(terms: &[(f64, f64)], r: f64) -> f64 {
        terms.iter().map(|(c, p)| c * r.powf(*p)).sum()
    }

    /// ℓ'(ℓ'+1)/r² + Γ + 2EV − E², the local "potential minus energy".
    fn q(&self, r: f64, e: f64) -> f64 {
        (self.nu2 - 0.25) / (r * r) + Self::eval(&self.gamma, r) + 2.0 * e * Self::eval(&self.vector, r) - e * e
    }

    /// The most singular term of Γ when it beats the centrifugal barrier.
    fn singular_wall(&self) -> Option<(f64, f64)> {
        self.gamma
            .iter()
            .filter(|(_, p)| *p < -2.0)
            .min_by(|a, b| a.1.total_cmp(&b.1))
            .copied()
    }

    /// Outermost r where q turns from negative to positive.
    fn outer_turning_point(&self, e: f64) -> Option<f64> {
        let lo = self.scale * 1e-4;
        let hi = self.scale * 1e5;
        let n = 4000;
        let mut last = None;
        let mut prev = self.q(lo, e);
        for i in 1..=n {
            let r = lo * (hi / lo).powf(i as f64 / n as f64);
            let cur = self.q(r, e);
            if prev < 0.0 && cur >= 0.0 {
                last = Some(r);
            }
            prev = cur;
        }
        last
    }

    /// Innermost r where q turns from positive to negative.
    fn inner_turning_point(&self, e: f64) -> Option<f64> {
        let lo = self.scale * 1e-8;
        let hi = self.scale * 1e4;
        let n = 4000;
        let mut prev = self.q(lo, e);
        for i in 1..=n {
            let r = lo * (hi / lo).powf(i as f64 / n as f64);
            let cur = self.q(r, e);
            if prev > 0.0 && cur <= 0.0 {
                return Some(r);
            }
            prev = cur;
        }
        None
    }

    /// Walks from `start` in direction `dir` (±1, log steps) until the WKB
    /// exponent ∫sqrt(q)dr reaches `target`.
    fn wkb_distance(&self, start: f64, e: f64, dir: f64, target: f64) -> f64 {
        let mut r = start;
        let mut acc = 0.0;
        let step = 1.002f64;
        for _ in 0..200_000 {
            let next = if dir > 0.0 { r * step } else { r / step };
            let q = self.q(0.5 * (r + next), e).max(0.0);
            acc += q.sqrt() * (next - r).abs();
            r = next;
            if acc >= target {
                break;
            }
        }
        r
    }
}

/// Mesh quantities at every full and half step, so that a trial E costs only
/// arithmetic.
struct Mesh {
    t0: f64,
    h: f64,
    steps: usize,
    /// r²Γ, 2r²V, r² at t0 + i·h/2
    g: Vec<f64>,
    v: Vec<f64>,
    r2: Vec<f64>,
    nu2: f64,
    start_log_slope: Option<f64>,
}

impl Mesh {
    fn new(model: &Model, r_min: f64, r_max: f64, steps: usize) -> Self {
        let t0 = r_min.ln();
        let h = (r_max.ln() - t0) / steps as f64;
        let n = 2 * steps + 1;
        let mut g = Vec::with_capacity(n);
        let mut v = Vec::with_capacity(n);
        let mut r2 = Vec::with_capacity(n);
        for i in 0..n {
            let r = (t0 + 0.5 * h * i as f64).exp();
            g.push(r * r * Model::eval(&model.gamma, r));
            v.push(2.0 * r * r * Model::eval(&model.vector, r));
            r2.push(r * r);
        }
        let start_log_slope = model.singular_wall().map(|_| 0.0);
        Mesh { t0, h, steps, g, v, r2, nu2: model.nu2, start_log_slope }
    }

    fn coef(&self, i: usize, e: f64) -> f64 {
        self.nu2 + self.g[i] + e * self.v[i] - e * e * self.r2[i]
    }

    /// Integrates outward, returning node count and the sampled solution.
    fn shoot(&self, e: f64, keep: bool) -> (usize, Vec<f64>) {
        let c0 = self.coef(0, e);
        let slope = match self.start_log_slope {
            // inside a repulsive wall: WKB start
            Some(_) => c0.max(0.0).sqrt(),
            None => self.nu2.sqrt(),
        };
        let mut u = 1e-30f64;
        let mut du = slope * u;
        let h = self.h;
        let mut samples = if keep { Vec::with_capacity(self.steps + 1) } else { Vec::new() };
        let mut nodes = 0usize;
        let mut last_sign = 0.0f64;
        if keep {
            samples.push(u);
        }
        for i in 0..self.steps {
            (u, du) = rk4(self.coef(2 * i, e), self.coef(2 * i + 1, e), self.coef(2 * i + 2, e), h, u, du);
            let mag = u.abs().max(du.abs());
            if mag > 1e200 {
                u *= 1e-200;
                du *= 1e-200;
                if keep {
                    for s in samples.iter_mut() {
                        *s *= 1e-200;
                    }
                }
            }
            if u != 0.0 {
                if last_sign != 0.0 && (u > 0.0) != (last_sign > 0.0) {
                    nodes += 1;
                }
                last_sign = u;
            }
            if keep {
                samples.push(u);
            }
        }
        (nodes, samples)
    }

    /// Outward solution up to the outer turning point spliced to an inward
    /// decaying solution from r_max. Returns the relative log-derivative
    /// mismatch at the splice and |Φ(r_max)| / max|Φ|.
    fn splice(&self, e: f64) -> (f64, f64) {
        let (_, out) = self.shoot(e, true);
        let n = self.steps;
        let turn = (0..=n).rev().find(|&i| self.coef(2 * i, e) < 0.0);
        let m = match turn {
            Some(i) if i > 0 && i < n => i,
            _ => out
                .iter()
                .enumerate()
                .max_by(|a, b| a.1.abs().total_cmp(&b.1.abs()))
                .map_or(n / 2, |(i, _)| i.clamp(1, n - 1)),
        };
        // outward log-derivative at m by central difference on the samples
        let d_out = (out[m + 1] - out[m - 1]) / (2.0 * self.h * out[m]);

        let mut inward = vec![0.0f64; n + 1];
        let mut u = 1e-30f64;
        let mut du = -self.coef(2 * n, e).max(0.0).sqrt() * u;
        inward[n] = u;
        for i in (1..=n).rev() {
            (u, du) = rk4(self.coef(2 * i, e), self.coef(2 * i - 1, e), self.coef(2 * i - 2, e), -self.h, u, du);
            inward[i - 1] = u;
            if u.abs() > 1e200 {
                for s in inward[i - 1..].iter_mut() {
                    *s *= 1e-200;
                }
                u *= 1e-200;
                du *= 1e-200;
            }
            if i - 1 < m {
                break;
            }
        }
        let d_in = (inward[m + 1] - inward[m - 1]) / (2.0 * self.h * inward[m]);
        let mismatch = (d_out - d_in).abs() / (d_out.abs() + 1.0);

        let scale = out[m] / inward[m];
        let phi = |i: usize, v: f64| v * (0.5 * (self.t0 + self.h * i as f64)).exp();
        let peak = (0..=n)
            .map(|i| phi(i, if i <= m { out[i] } else { scale * inward[i] }).abs())
            .fold(0.0, f64::max);
        let end = phi(n, scale * inward[n]).abs();
        (mismatch, if peak > 0.0 { end / peak } else { f64::INFINITY })
    }

    fn stiffness(&self, e: f64) -> f64 {
        (0..self.g.len())
            .map(|i| self.coef(i, e).abs().sqrt() * self.h)
            .fold(0.0, f64::max)
    }
}

/// One classical RK4 step of u'' = a·u with a sampled at start, middle, end.
fn rk4(a0: f64, a1: f64, a2: f64, h: f64, u: f64, du: f64) -> (f64, f64) {
    let k1u = du;
    let k1v = a0 * u;
    let k2u = du + 0.5 * h * k1v;
    let k2v = a1 * (u + 0.5 * h * k1u);
    let k3u = du + 0.5 * h * k2v;
    let k3v = a1 * (u + 0.5 * h * k2u);
    let k4u = du + h * k3v;
    let k4v = a2 * (u + h * k3u);
    (
        u + h / 6.0 * (k1u + 2.0 * k2u + 2.0 * k3u + k4u),
        du + h / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v),
    )
}

fn bisect(mesh: &Mesh, k: usize, mut lo: f64, mut hi: f64, tol: f64) -> (f64, f64, f64) {
    for _ in 0..200 {
        if (hi - lo).abs() <= tol * hi.abs().max(lo.abs()).max(1e-300) {
            break;
        }
        let mid = 0.5 * (lo + hi);
        if mesh.shoot(mid, false).0 > k {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    (0.5 * (lo + hi), lo, hi)
}

fn bracket(mesh: &Mesh, k: usize, model: &Model, cfg: &ShootingConfig) -> Result<(f64, f64)> {
    if let Some((lo, hi)) = cfg.energy_bracket {
        if mesh.shoot(lo, false).0 > k || mesh.shoot(hi, false).0 <= k {
            return Err(PsletError::Shooting(format!(
                "bracket [{lo}, {hi}] does not straddle the k = {k} eigenvalue"
            )));
        }
        return Ok((lo, hi));
    }
    let m = model.mass.abs().max(1.0);
    // with V = 0 only E² enters and the node count is even in E; E = 0 has
    // the fewest nodes and the positive branch lies above it
    let even = model.vector.is_empty();
    let mut lo = if even { 0.0 } else { -model.mass.abs() };
    if even && mesh.shoot(lo, false).0 > k {
        return Err(PsletError::Shooting(format!("the k = {k} level has E² < 0")));
    }
    let mut step = m;
    let mut tries = 0;
    while mesh.shoot(lo, false).0 > k {
        lo -= step;
        step *= 2.0;
        tries += 1;
        if tries > 60 {
            return Err(PsletError::Shooting("no lower energy bracket".into()));
        }
    }
    let mut hi = model.mass.abs().max(lo + m);
    let mut step = m * 0.5;
    tries = 0;
    while mesh.shoot(hi, false).0 <= k {
        lo = hi;
        hi += step;
        step *= 2.0;
        tries += 1;
        if tries > 80 {
            return Err(PsletError::Shooting("no upper energy bracket".into()));
        }
    }
    Ok((lo, hi))
}

fn mesh_ends(model: &Model, e: f64, cfg: &ShootingConfig) -> (f64, f64) {
    let r_min = cfg.r_min.unwrap_or_else(|| match model.singular_wall() {
        Some(_) => {
            let start = model.inner_turning_point(e).unwrap_or(model.scale);
            model.wkb_distance(start, e, -1.0, 30.0)
        }
        None => 1e-6 * model.scale,
    });
    let r_max = cfg.r_max.unwrap_or_else(|| match model.outer_turning_point(e) {
        Some(rt) => model.wkb_distance(rt, e, 1.0, 40.0).max(2.0 * rt),
        None => 1e3 * model.scale,
    });
    (r_min, r_max)
}

fn solve_on(model: &Model, k: usize, cfg: &ShootingConfig, steps: usize, guess: Option<f64>) -> Result<(f64, Mesh, f64, f64)> {
    let e_ref = guess.unwrap_or(model.mass);
    let (r_min, r_max) = mesh_ends(model, e_ref, cfg);
    let mesh = Mesh::new(model, r_min, r_max, steps);
    let (lo, hi) = match guess {
        Some(g) => {
            let mut d = 1e-3 * g.abs().max(model.mass.abs()).max(1e-3);
            let mut found = None;
            for _ in 0..40 {
                let a = if model.vector.is_empty() { (g - d).max(0.0) } else { g - d };
                let b = g + d;
                if mesh.shoot(a, false).0 <= k && mesh.shoot(b, false).0 > k {
                    found = Some((a, b));
                    break;
                }
                d *= 2.0;
            }
            match found {
                Some(br) => br,
                None => bracket(&mesh, k, model, cfg)?,
            }
        }
        None => bracket(&mesh, k, model, cfg)?,
    };
    let (e, lo, hi) = bisect(&mesh, k, lo, hi, cfg.bisection_tol);
    Ok((e, mesh, lo, hi))
}

/// k-th eigenvalue of the reduced equation.
pub fn shoot_eigenvalue(prob: &EffectiveProblem, k: u32, cfg: &ShootingConfig) -> Result<OracleResult> {
    cfg.validate()?;
    let model = Model::new(prob, k);
    let k = k as usize;

    // First pass places the mesh from the mass scale, second from the
    // first-pass eigenvalue.
    let (e1, _, _, _) = solve_on(&model, k, cfg, cfg.steps, None)?;
    let (e, mesh, lo, hi) = solve_on(&model, k, cfg, cfg.steps, Some(e1))?;
    let (e_fine, _, _, _) = solve_on(&model, k, cfg, 2 * cfg.steps, Some(e))?;

    let n_lo = mesh.shoot(lo, false).0;
    let n_hi = mesh.shoot(hi, false).0;
    if n_lo != k || n_hi != k + 1 {
        return Err(PsletError::Shooting(format!(
            "node count jumps from {n_lo} to {n_hi} across E = {e} (expected {k} to {})",
            k + 1
        )));
    }
    if mesh.stiffness(e) > 0.5 {
        warn!("oracle mesh is coarse: max sqrt|q|*h = {:.3}", mesh.stiffness(e));
    }

    let (mismatch, tail_ratio) = mesh.splice(e);
    let converged = (hi - lo).abs() <= 10.0 * cfg.bisection_tol * hi.abs().max(lo.abs()).max(1e-300);
    let matched = converged && mismatch < 1e-6 && tail_ratio < 1e-8;

    let denom = e_fine.abs().max(model.mass.abs()).max(f64::MIN_POSITIVE);
    Ok(OracleResult {
        e_num: e_fine,
        nodes: k,
        matched,
        mesh_halving_delta: (e_fine - e).abs() / denom,
        tail_ratio,
        r_min: (mesh.t0).exp(),
        r_max: (mesh.t0 + mesh.h * mesh.steps as f64).exp(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn node_counting() {
        assert_eq!(count_nodes(&[1.0, 2.0, 3.0]), 0);
        assert_eq!(count_nodes(&[1.0, -1.0, 1.0]), 2);
        assert_eq!(count_nodes(&[1.0, 0.0, -1.0]), 1);
        assert_eq!(count_nodes(&[]), 0);
    }

    #[test]
    fn config_validation() {
        assert!(ShootingConfig::default().validate().is_ok());
        let bad = ShootingConfig { steps: 100, ..Default::default() };
        assert!(bad.validate().is_err());
        let bad = ShootingConfig { r_min: Some(2.0), r_max: Some(1.0), ..Default::default() };
        assert!(bad.validate().is_err());
    }
}
