//! Randomized invariants.

use proptest::prelude::*;
use pslet::effective::{build_effective, EquationKind, PotentialSpec};
use pslet::exact::{kg_coulomb_exact, CoulombKind};
use pslet::expansion::{solve_expansion_point, Branch, ExpansionOptions};
use pslet::power_sum::{Exponent, PowerSum};
use pslet::powerlaw::{check_energy, invert_energy, reduced_eigenvalue, PowerLawCase};
use pslet::real::{Precision, Real};
use pslet::recursion::solve_state;
use pslet::summation::{mass_of, pade, pade_coefficients, partial_sum};
use rug::Float;

fn p() -> Precision {
    Precision::default()
}

fn real(x: f64) -> Real {
    p().f64(x)
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(1e-300)
}

fn exponent() -> impl Strategy<Value = Exponent> {
    (-4i64..=4, prop::sample::select(vec![1i64, 2, 3, 5])).prop_map(|(n, d)| Exponent::new(n, d).unwrap())
}

fn power_sum() -> impl Strategy<Value = PowerSum> {
    prop::collection::vec((exponent(), -3.0f64..3.0), 1..4)
        .prop_map(|t| PowerSum::from_terms(p(), t.into_iter().map(|(e, c)| (e, real(c)))))
}

fn eval(ps: &PowerSum, r: f64) -> f64 {
    ps.eval(&real(r)).unwrap().to_f64()
}

/// Confining mixed potential: V = −a/r + b·r, S = −c/r + d·r.
#[derive(Clone, Debug)]
struct Mixed {
    a: f64,
    b: f64,
    c: f64,
    d: f64,
    m: f64,
    ell: u32,
}

impl Mixed {
    fn sums(&self) -> (PowerSum, PowerSum) {
        let two = |x: f64, y: f64| {
            PowerSum::from_terms(p(), vec![(Exponent::int(-1), real(-x)), (Exponent::int(1), real(y))])
        };
        (two(self.a, self.b), two(self.c, self.d))
    }
}

fn mixed() -> impl Strategy<Value = Mixed> {
    (0.0f64..0.4, 0.0f64..0.3, 0.0f64..0.4, 0.2f64..0.6, 0.5f64..2.0, 0u32..3)
        .prop_map(|(a, b, c, d, m, ell)| Mixed { a, b, c, d, m, ell })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn leibniz_rule(f in power_sum(), g in power_sum(), r in 0.3f64..3.0) {
        let lhs = f.product(&g).derivative(1);
        let rhs = f.derivative(1).product(&g).add(&f.product(&g.derivative(1)));
        let (x, y) = (eval(&lhs, r), eval(&rhs, r));
        prop_assert!((x - y).abs() <= 1e-12 * (1.0 + y.abs()), "{x} vs {y}");
    }

    #[test]
    fn taylor_matches_finite_differences(f in power_sum(), r0 in 0.5f64..2.0) {
        let t = f.taylor(&real(r0), 2).unwrap();
        let h = 1e-4 * r0;
        let (fm, f0, fp) = (eval(&f, r0 - h), eval(&f, r0), eval(&f, r0 + h));
        let d1 = (fp - fm) / (2.0 * h) * r0;
        let d2 = (fp - 2.0 * f0 + fm) / (h * h) * r0 * r0 / 2.0;
        let scale = 1.0 + f0.abs() + d1.abs() + d2.abs();
        prop_assert!((t[0].to_f64() - f0).abs() <= 1e-12 * scale);
        prop_assert!((t[1].to_f64() - d1).abs() <= 1e-6 * scale);
        prop_assert!((t[2].to_f64() - d2).abs() <= 1e-4 * scale);
    }

    #[test]
    fn canonical_form_ignores_order_and_splits(
        terms in prop::collection::vec((exponent(), -3.0f64..3.0), 1..6),
        seed in any::<u64>(),
    ) {
        let base = PowerSum::from_terms(p(), terms.iter().map(|(e, c)| (*e, real(*c))));
        // split each coefficient in two and shuffle
        let mut split: Vec<(Exponent, Real)> = terms
            .iter()
            .flat_map(|(e, c)| [(*e, real(c * 0.25)), (*e, real(c * 0.75))])
            .collect();
        let n = split.len();
        for i in 0..n {
            let j = (seed.rotate_left(i as u32) as usize) % n;
            split.swap(i, j);
        }
        let merged = PowerSum::from_terms(p(), split);
        prop_assert_eq!(merged.terms().len(), base.terms().len());
        for ((e1, c1), (e2, c2)) in merged.terms().iter().zip(base.terms()) {
            prop_assert_eq!(e1, e2);
            prop_assert!((c1.to_f64() - c2.to_f64()).abs() <= 1e-14 * (1.0 + c2.to_f64().abs()));
        }
        let exps: Vec<f64> = merged.terms().iter().map(|(e, _)| e.to_f64()).collect();
        prop_assert!(exps.windows(2).all(|w| w[0] < w[1]));
        prop_assert!(merged.terms().iter().all(|(_, c)| !c.is_zero()));
    }

    #[test]
    fn effective_potential_is_pointwise_consistent(
        mx in mixed(), dirac in any::<bool>(), down in any::<bool>(), r in 0.2f64..4.0,
    ) {
        let (v, s) = mx.sums();
        let ell = mx.ell;
        let kappa = if down && ell > 0 { i64::from(ell) } else { -(i64::from(ell) + 1) };
        let kind = if dirac { EquationKind::Dirac } else { EquationKind::KleinGordon };
        let spec = PotentialSpec::new(v, s, real(mx.m), kind, kappa).unwrap();
        let prob = build_effective(&spec, ell).unwrap();
        let lp = prob.ell_eff.to_f64();
        let lhs = lp * (lp + 1.0) / (r * r) + eval(&prob.gamma, r);

        // the original radial terms, with U from finite differences of y = V − S
        let vf = |x: f64| -mx.a / x + mx.b * x;
        let sf = |x: f64| -mx.c / x + mx.d * x;
        let y = |x: f64| vf(x) - sf(x);
        let h = 1e-4 * r;
        let y1 = (y(r + h) - y(r - h)) / (2.0 * h);
        let y2 = (y(r + h) - 2.0 * y(r) + y(r - h)) / (h * h);
        let (m, kf) = (mx.m, if dirac { kappa as f64 } else { 0.0 });
        let u = if dirac { (y2 - 2.0 * kf * y1 / r + 3.0 * y1 * y1 / (4.0 * m)) / (4.0 * m) } else { 0.0 };
        let l = f64::from(ell);
        let rhs = l * (l + 1.0) / (r * r) + sf(r).powi(2) - vf(r).powi(2) + 2.0 * m * sf(r) + m * m + u;
        prop_assert!((lhs - rhs).abs() <= 1e-6 * (1.0 + rhs.abs()), "{lhs} vs {rhs}");
    }

    #[test]
    fn kg_ignores_kappa(mx in mixed(), k1 in -4i64..4, k2 in -4i64..4) {
        let (v, s) = mx.sums();
        let a = build_effective(&PotentialSpec::new(v.clone(), s.clone(), real(mx.m), EquationKind::KleinGordon, k1).unwrap(), mx.ell).unwrap();
        let b = build_effective(&PotentialSpec::new(v, s, real(mx.m), EquationKind::KleinGordon, k2).unwrap(), mx.ell).unwrap();
        prop_assert_eq!(&a.gamma, &b.gamma);
        prop_assert_eq!(a.ell_eff, b.ell_eff);
    }

    #[test]
    fn mass_is_linear(x in -1e3f64..1e3, y in -1e3f64..1e3, c in -5i32..5) {
        let sum = Float::with_val(p().bits(), real(x) + real(y));
        let lhs = mass_of(&sum);
        let rhs = Float::with_val(p().bits(), mass_of(&real(x)) + mass_of(&real(y)));
        prop_assert_eq!(&lhs, &rhs);
        let scaled = mass_of(&Float::with_val(p().bits(), real(x) * c));
        prop_assert_eq!(scaled, Float::with_val(p().bits(), mass_of(&real(x)) * c));
    }

    #[test]
    fn kg_vector_energy_decreases_with_coupling(a in 0.0f64..1.4, da in 1e-3f64..0.1, k in 0u32..4, ell in 1u32..3) {
        let m = real(1.0);
        let e1 = kg_coulomb_exact(CoulombKind::Vector, &m, &real(a), k, ell, Branch::Plus).unwrap();
        let e2 = kg_coulomb_exact(CoulombKind::Vector, &m, &real(a + da), k, ell, Branch::Plus).unwrap();
        prop_assert!(e2 < e1);
    }

    #[test]
    fn pade_reexpands_to_the_series(
        f in prop::collection::vec(-2.0f64..2.0, 7),
        i in 0usize..4, j in 0usize..3,
    ) {
        let mut f: Vec<Real> = f.into_iter().map(real).collect();
        f[0] = real(1.0);
        f.truncate(i + j + 1);
        if let Ok((num, den)) = pade_coefficients(p(), &f, i, j) {
            prop_assert!(den[0] == 1);
            // (den·f − num) vanishes through z^(i+j)
            for n in 0..=(i + j) {
                let mut acc = Float::with_val(p().bits(), 0);
                for (t, q) in den.iter().enumerate().take(n + 1) {
                    acc += Float::with_val(p().bits(), q * &f[n - t]);
                }
                if n < num.len() {
                    acc -= &num[n];
                }
                prop_assert!(acc.to_f64().abs() < 1e-30, "order {n}: {}", acc.to_f64());
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn expansion_point_closes(mx in mixed(), k in 0u32..3) {
        let (v, s) = mx.sums();
        let spec = PotentialSpec::new(v, s, real(mx.m), EquationKind::KleinGordon, 0).unwrap();
        let prob = build_effective(&spec, mx.ell).unwrap();
        let pt = solve_expansion_point(&prob, k, &ExpansionOptions::default()).unwrap();
        prop_assert!(pt.closure_residual().to_f64() <= 1e-25);
        let r0 = pt.r0.to_f64();
        let scale = pt.q.to_f64().abs().max(r0 * r0 * pt.b[1].to_f64().abs());
        prop_assert!(pt.linear_residual.to_f64() <= 1e-25 * scale);
    }

    #[test]
    fn every_order_is_solved(mx in mixed(), k in 0u32..3, dirac in any::<bool>()) {
        let (v, s) = mx.sums();
        let kind = if dirac { EquationKind::Dirac } else { EquationKind::KleinGordon };
        let spec = PotentialSpec::new(v, s, real(mx.m), kind, -(i64::from(mx.ell) + 1)).unwrap();
        let prob = build_effective(&spec, mx.ell).unwrap();
        let sol = solve_state(&prob, k, 8, &ExpansionOptions::default()).unwrap();
        prop_assert!(sol.max_residual.to_f64() < 1e-20);
        prop_assert_eq!(sol.series.coeffs.len(), 10);
        // an [n/0] approximant is the partial sum E(n)
        for n in 1..=6 {
            let pv = pade(&sol.series, n, 0).unwrap();
            let ps = partial_sum(&sol.series, n).unwrap();
            prop_assert!(rel(pv.value.to_f64(), ps.to_f64()) < 1e-14);
        }
    }

    #[test]
    fn powerlaw_check_energy_roundtrip(
        nu_num in 1i64..5, nu_den in prop::sample::select(vec![1i64, 2, 10]),
        a in 0.2f64..3.0, b0 in -1.0f64..1.0, m in 0.2f64..3.0, x in 0.05f64..20.0,
    ) {
        let nu = Exponent::new(nu_num, nu_den).unwrap();
        let case = PowerLawCase::new(nu, real(a), real(b0), real(m), 0, 0).unwrap();
        // pick E above the threshold m + 2B0, where the map is monotone
        let e = real(m + 2.0 * b0 + x);
        let check = check_energy(&case, &e).unwrap();
        let back = invert_energy(&case, &check).unwrap();
        prop_assert!(rel(back.to_f64(), e.to_f64()) < 1e-15);
    }

    #[test]
    fn reduced_series_ignores_physical_parameters(
        a in 0.2f64..3.0, b0 in -1.0f64..1.0, m in 0.2f64..3.0, k in 0u32..2, ell in 0u32..2,
    ) {
        let nu = Exponent::new(1, 2).unwrap();
        let one = real(1.0);
        let unit = PowerLawCase::new(nu, one.clone(), real(0.0), one, k, ell).unwrap();
        let other = PowerLawCase::new(nu, real(a), real(b0), real(m), k, ell).unwrap();
        let opts = ExpansionOptions::default();
        let x = reduced_eigenvalue(&unit, 5, &opts).unwrap();
        let y = reduced_eigenvalue(&other, 5, &opts).unwrap();
        prop_assert_eq!(x.squared, y.squared);
    }
}
