//! Closed-form cases: the series must terminate at the leading term.

use pslet::effective::{build_effective, EffectiveProblem, EquationKind, PotentialSpec};
use pslet::exact::{dirac_oscillator_exact, dirac_oscillator_problem, kg_coulomb_exact, mixed_coulomb_exact, CoulombKind};
use pslet::expansion::{Branch, ExpansionOptions};
use pslet::power_sum::{Exponent, PowerSum};
use pslet::real::{Precision, Real};
use pslet::recursion::solve_state;
use rug::Float;

fn p() -> Precision {
    Precision::default()
}

fn r(s: &str) -> Real {
    p().parse(s).unwrap()
}

fn coulomb(a: &str) -> PowerSum {
    PowerSum::from_terms(p(), vec![(Exponent::int(-1), -r(a))])
}

/// Relative error of E^(−1) against `exact` (scale m when exact is 0) and the
/// largest |E^(n)|, n ≥ 0, relative to |E^(−1)| (or m).
fn check(prob: &EffectiveProblem, k: u32, exact: &Real, m: &Real) -> (f64, f64) {
    let sol = solve_state(prob, k, 14, &ExpansionOptions::default()).unwrap();
    let lead = sol.series.leading();
    let bits = p().bits();
    let scale = if exact.is_zero() { m.clone() } else { Float::with_val(bits, exact.abs_ref()) };
    let lead_err = Float::with_val(bits, lead - exact).abs() / &scale;
    let corr_scale = if lead.is_zero() { m.clone() } else { Float::with_val(bits, lead.abs_ref()) };
    let corr = sol.series.coeffs[1..]
        .iter()
        .map(|c| (Float::with_val(bits, c.abs_ref()) / &corr_scale).to_f64())
        .fold(0.0, f64::max);
    (lead_err.to_f64(), corr)
}

#[test]
fn mixed_coulomb_series_terminates() {
    for a in ["0.5", "1"] {
        for kind in [EquationKind::KleinGordon, EquationKind::Dirac] {
            for k in 0..=3u32 {
                for ell in 0..=(3 - k) {
                    let kappa = -(i64::from(ell) + 1);
                    let spec = PotentialSpec::new(coulomb(a), coulomb(a), r("1"), kind, kappa).unwrap();
                    let prob = build_effective(&spec, ell).unwrap();
                    let exact = mixed_coulomb_exact(&r("1"), &r(a), k, ell);
                    let (lead, corr) = check(&prob, k, &exact, &r("1"));
                    assert!(lead < 1e-20, "A={a} {kind} k={k} l={ell}: leading error {lead:e}");
                    assert!(corr < 1e-20, "A={a} {kind} k={k} l={ell}: correction {corr:e}");
                }
            }
        }
    }
}

#[test]
fn kg_coulomb_series_terminates() {
    for (kind, a) in [(CoulombKind::Vector, "0.5"), (CoulombKind::Scalar, "0.75")] {
        for k in 0..=2u32 {
            for ell in 0..=2u32 {
                let (v, s) = match kind {
                    CoulombKind::Vector => (coulomb(a), PowerSum::zero(p())),
                    CoulombKind::Scalar => (PowerSum::zero(p()), coulomb(a)),
                };
                let spec = PotentialSpec::new(v, s, r("1"), EquationKind::KleinGordon, 0).unwrap();
                let prob = build_effective(&spec, ell).unwrap();
                let exact = kg_coulomb_exact(kind, &r("1"), &r(a), k, ell, Branch::Plus).unwrap();
                let (lead, corr) = check(&prob, k, &exact, &r("1"));
                assert!(lead < 1e-20, "{kind:?} k={k} l={ell}: leading error {lead:e}");
                assert!(corr < 1e-20, "{kind:?} k={k} l={ell}: correction {corr:e}");
            }
        }
    }
}

#[test]
fn kg_vector_critical_coupling_example() {
    let spec = PotentialSpec::new(coulomb("0.5"), PowerSum::zero(p()), r("1"), EquationKind::KleinGordon, 0).unwrap();
    let prob = build_effective(&spec, 0).unwrap();
    let sol = solve_state(&prob, 0, 5, &ExpansionOptions::default()).unwrap();
    assert!((sol.series.leading().to_f64() - 0.5f64.sqrt()).abs() < 1e-15);
}

#[test]
fn dirac_oscillator_series_terminates() {
    let (m, b) = (r("1"), r("1"));
    for eps in [1, -1] {
        for k in 0..=2u32 {
            for ell in 0..=2u32 {
                // ε labels the two spin alignments j = ℓ ± 1/2
                let two_j = if eps > 0 { 2 * ell + 1 } else if ell > 0 { 2 * ell - 1 } else { continue };
                let prob = dirac_oscillator_problem(p(), &m, &b, ell, two_j, eps, 1);
                let exact = dirac_oscillator_exact(&m, &b, k, ell, two_j, eps, 1, Branch::Plus).unwrap();
                let (lead, corr) = check(&prob, k, &exact, &m);
                assert!(lead < 1e-20, "eps={eps} k={k} l={ell}: leading error {lead:e}");
                assert!(corr < 1e-20, "eps={eps} k={k} l={ell}: correction {corr:e}");
            }
        }
    }
}

#[test]
fn dirac_oscillator_spec_example() {
    let e = dirac_oscillator_exact(&r("1"), &r("1"), 0, 0, 1, -1, 1, Branch::Plus).unwrap();
    assert!((e.to_f64() - 1.0).abs() < 1e-40);
    let prob = dirac_oscillator_problem(p(), &r("1"), &r("1"), 0, 1, -1, 1);
    let sol = solve_state(&prob, 0, 4, &ExpansionOptions::default()).unwrap();
    assert!((sol.series.leading().to_f64() - 1.0).abs() < 1e-30);
}

#[test]
fn mixed_coulomb_degeneracy_in_k_plus_l() {
    let m = r("1.3");
    let a = r("0.4");
    for n in 0..4u32 {
        let base = mixed_coulomb_exact(&m, &a, n, 0);
        for k in 0..=n {
            assert_eq!(mixed_coulomb_exact(&m, &a, k, n - k), base);
        }
    }
}

#[test]
fn kg_vector_decreases_with_coupling() {
    let m = r("1");
    let mut last = kg_coulomb_exact(CoulombKind::Vector, &m, &r("0"), 1, 1, Branch::Plus).unwrap();
    assert_eq!(last, m);
    for a in ["0.1", "0.4", "0.8", "1.2", "1.49"] {
        let e = kg_coulomb_exact(CoulombKind::Vector, &m, &r(a), 1, 1, Branch::Plus).unwrap();
        assert!(e < last);
        last = e;
    }
}
