//! Acceptance run: one PASS/FAIL line per criterion, details indented below.
//! Exits nonzero when any criterion fails.

use std::process::ExitCode;
use std::time::Instant;

use pslet::effective::{build_effective, EffectiveProblem, EquationKind, PotentialSpec};
use pslet::exact::{dirac_oscillator_exact, dirac_oscillator_problem, kg_coulomb_exact, mixed_coulomb_exact, CoulombKind};
use pslet::expansion::{solve_expansion_point, Branch, ExpansionOptions};
use pslet::power_sum::{Exponent, PowerSum};
use pslet::powerlaw::{check_energy, invert_energy, PowerLawCase};
use pslet::real::{Precision, Real};
use pslet::recursion::solve_state;
use pslet::shooting::{shoot_eigenvalue, ShootingConfig};
use pslet::summation::pade_coefficients;
use pslet_cli::presets::{self, TablePreset};
use pslet_cli::report::Format;
use pslet_cli::run::{run_config, RunFlags};
use pslet_cli::tables::{render_table, run_table, Row, TableOptions, TableReport};
use rug::Float;

struct Verdict {
    pass: bool,
    summary: String,
    details: Vec<String>,
}

impl Verdict {
    fn new(pass: bool, summary: impl Into<String>, details: Vec<String>) -> Self {
        Verdict { pass, summary: summary.into(), details }
    }
}

fn p() -> Precision {
    Precision::default()
}

fn r(s: &str) -> Real {
    p().parse(s).unwrap()
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(1e-300)
}

fn coulomb(a: &str) -> PowerSum {
    PowerSum::from_terms(p(), vec![(Exponent::int(-1), -r(a))])
}

/// A closed-form case: label, problem, k, exact E, mass scale.
struct Closed {
    label: String,
    prob: EffectiveProblem,
    k: u32,
    exact: Real,
}

fn closed_cases() -> Vec<Closed> {
    let one = r("1");
    let mut out = Vec::new();
    for a in ["0.5", "1"] {
        for kind in [EquationKind::KleinGordon, EquationKind::Dirac] {
            for k in 0..=3u32 {
                for ell in 0..=(3 - k) {
                    let kappa = -(i64::from(ell) + 1);
                    let spec = PotentialSpec::new(coulomb(a), coulomb(a), one.clone(), kind, kappa).unwrap();
                    out.push(Closed {
                        label: format!("mixed Coulomb {kind} A={a} (k={k}, l={ell})"),
                        prob: build_effective(&spec, ell).unwrap(),
                        k,
                        exact: mixed_coulomb_exact(&one, &r(a), k, ell),
                    });
                }
            }
        }
    }
    for (kind, a) in [(CoulombKind::Vector, "0.5"), (CoulombKind::Scalar, "0.75")] {
        for k in 0..=2u32 {
            for ell in 0..=2u32 {
                let (v, s) = match kind {
                    CoulombKind::Vector => (coulomb(a), PowerSum::zero(p())),
                    CoulombKind::Scalar => (PowerSum::zero(p()), coulomb(a)),
                };
                let spec = PotentialSpec::new(v, s, one.clone(), EquationKind::KleinGordon, 0).unwrap();
                out.push(Closed {
                    label: format!("KG {kind:?} Coulomb A={a} (k={k}, l={ell})"),
                    prob: build_effective(&spec, ell).unwrap(),
                    k,
                    exact: kg_coulomb_exact(kind, &one, &r(a), k, ell, Branch::Plus).unwrap(),
                });
            }
        }
    }
    for eps in [1, -1] {
        for k in 0..=2u32 {
            for ell in 0..=2u32 {
                let two_j = if eps > 0 { 2 * ell + 1 } else if ell > 0 { 2 * ell - 1 } else { continue };
                out.push(Closed {
                    label: format!("Dirac oscillator eps={eps} (k={k}, l={ell})"),
                    prob: dirac_oscillator_problem(p(), &one, &one, ell, two_j, eps, 1),
                    k,
                    exact: dirac_oscillator_exact(&one, &one, k, ell, two_j, eps, 1, Branch::Plus).unwrap(),
                });
            }
        }
    }
    out
}

fn criterion1(cases: &[Closed]) -> Verdict {
    let start = Instant::now();
    let mut details = Vec::new();
    let bits = p().bits();
    for c in cases {
        let sol = match solve_state(&c.prob, c.k, 14, &ExpansionOptions::default()) {
            Ok(s) => s,
            Err(e) => {
                details.push(format!("{}: {e}", c.label));
                continue;
            }
        };
        let lead = sol.series.leading();
        let scale = if c.exact.is_zero() { c.prob.mass.clone() } else { Float::with_val(bits, c.exact.abs_ref()) };
        let lead_err = (Float::with_val(bits, lead - &c.exact).abs() / &scale).to_f64();
        let corr_scale = if lead.is_zero() { c.prob.mass.clone() } else { Float::with_val(bits, lead.abs_ref()) };
        let corr = sol.series.coeffs[1..]
            .iter()
            .map(|x| (Float::with_val(bits, x.abs_ref()) / &corr_scale).to_f64())
            .fold(0.0, f64::max);
        if lead_err >= 1e-20 || corr >= 1e-20 {
            details.push(format!("{}: leading rel err {lead_err:.2e}, max correction {corr:.2e}", c.label));
        }
    }
    let secs = start.elapsed().as_secs_f64();
    if secs >= 10.0 {
        details.push(format!("runtime {secs:.2} s exceeds 10 s"));
    }
    Verdict::new(
        details.is_empty(),
        format!("exactness suite, {} closed-form states, {secs:.2} s", cases.len()),
        details,
    )
}

/// Checked rows of `t` selected by `pick`, as a verdict.
fn rows_verdict(t: &TableReport, what: &str, pick: impl Fn(&Row) -> bool) -> (bool, String, Vec<String>) {
    let rows: Vec<&Row> = t.rows.iter().filter(|r| r.pass.is_some() && pick(r)).collect();
    let bad: Vec<String> = rows
        .iter()
        .filter(|r| r.pass != Some(true))
        .map(|r| {
            format!(
                "{} {}: computed {:.7}, printed {}, diff {:.2e}, tol {:.1e}{}",
                r.state,
                r.quantity,
                r.computed.as_ref().map_or(f64::NAN, |c| c.to_f64()),
                r.printed.as_deref().unwrap_or("-"),
                r.diff.unwrap_or(f64::NAN),
                r.tol.unwrap_or(f64::NAN),
                if r.note.is_empty() { String::new() } else { format!(" ({})", r.note) },
            )
        })
        .chain(t.errors.iter().map(|e| format!("error: {e}")))
        .collect();
    let pass = bad.is_empty() && !rows.is_empty();
    (pass, format!("{what}: {}/{} rows within tolerance", rows.len() - bad.iter().filter(|b| !b.starts_with("error")).count(), rows.len()), bad)
}

fn is_partial(r: &Row, orders: &[usize]) -> bool {
    orders.iter().any(|n| r.quantity == format!("M({n})") || r.quantity == format!("E({n})"))
}

fn table_options(jobs: Option<usize>, oracle: bool) -> TableOptions {
    TableOptions { flags: RunFlags { oracle, jobs }, ..TableOptions::default() }
}

fn load(id: u8) -> TablePreset {
    presets::table(id).expect("table preset")
}

fn criterion8(cases: &[Closed], tables: &[(u8, &TableReport)]) -> Verdict {
    let mut details = Vec::new();
    let cfg = ShootingConfig::default();
    let mut worst_closed = 0.0f64;
    let mut worst_delta = 0.0f64;
    for c in cases {
        match shoot_eigenvalue(&c.prob, c.k, &cfg) {
            Ok(o) => {
                let exact = c.exact.to_f64();
                let err = if exact == 0.0 { o.e_num.abs() / c.prob.mass.to_f64() } else { rel(o.e_num, exact) };
                worst_closed = worst_closed.max(err);
                worst_delta = worst_delta.max(o.mesh_halving_delta);
                if err >= 1e-6 || !o.matched {
                    details.push(format!("{}: oracle {:.10} vs exact {exact:.10} (rel {err:.2e}, matched {})", c.label, o.e_num, o.matched));
                }
                if o.mesh_halving_delta >= 1e-7 {
                    details.push(format!("{}: mesh-halving delta {:.2e}", c.label, o.mesh_halving_delta));
                }
            }
            Err(e) => details.push(format!("{}: {e}", c.label)),
        }
    }

    let mut numeric_rows = 0;
    for (id, t) in tables {
        let (_, _, bad) = rows_verdict(t, "", |r| r.quantity.ends_with("_num") && !r.quantity.contains("vs"));
        numeric_rows += t.rows.iter().filter(|r| r.pass.is_some() && r.quantity.ends_with("_num") && !r.quantity.contains("vs")).count();
        details.extend(bad.into_iter().map(|b| format!("table {id} {b}")));
        // mesh deltas of the table states
        let cfg = load(*id).config.expect("potential table");
        match run_config(&cfg, RunFlags { oracle: true, jobs: None }) {
            Ok(outcomes) => {
                for o in outcomes {
                    match o.result {
                        Ok(rep) => {
                            let d = rep.oracle.map_or(f64::NAN, |x| x.mesh_halving_delta);
                            worst_delta = worst_delta.max(d);
                            if d.is_nan() || d >= 1e-7 {
                                details.push(format!("table {id} (k={}, l={}): mesh-halving delta {d:.2e}", o.state.k, o.state.ell));
                            }
                        }
                        Err(e) => details.push(format!("table {id}: {e}")),
                    }
                }
            }
            Err(e) => details.push(format!("table {id}: {e}")),
        }
    }
    Verdict::new(
        details.is_empty(),
        format!(
            "oracle: {} closed forms (worst rel {worst_closed:.1e}), {numeric_rows} printed numerical values, worst mesh delta {worst_delta:.1e}",
            cases.len()
        ),
        details,
    )
}

fn criterion9() -> Verdict {
    let mut details = Vec::new();
    let bits = p().bits();

    // Leibniz and Taylor on a fixed sum with rational exponents
    let f = PowerSum::from_terms(
        p(),
        vec![(Exponent::int(-1), r("-0.3")), (Exponent::new(1, 2).unwrap(), r("1.7")), (Exponent::int(2), r("0.2"))],
    );
    let g = PowerSum::from_terms(p(), vec![(Exponent::new(-3, 5).unwrap(), r("0.9")), (Exponent::int(1), r("-2.1"))]);
    let lhs = f.product(&g).derivative(1);
    let rhs = f.derivative(1).product(&g).add(&f.product(&g.derivative(1)));
    for x in ["0.4", "1.3", "2.9"] {
        let d = Float::with_val(bits, lhs.eval(&r(x)).unwrap() - rhs.eval(&r(x)).unwrap()).abs().to_f64();
        if d > 1e-40 {
            details.push(format!("Leibniz rule off by {d:.1e} at r = {x}"));
        }
    }
    let t = f.taylor(&r("1.3"), 1).unwrap();
    let d1 = Float::with_val(bits, f.derivative(1).eval(&r("1.3")).unwrap() * r("1.3"));
    if Float::with_val(bits, &t[1] - d1).abs().to_f64() > 1e-40 {
        details.push("Taylor coefficient disagrees with the derivative".into());
    }

    // expansion point closure and the per-order residual, on every table state
    for id in 1..=5u8 {
        let cfg = load(id).config.expect("potential table");
        let opts = cfg.expansion_options().unwrap();
        for s in cfg.sorted_states() {
            let prob = build_effective(&cfg.spec_for(&s).unwrap(), s.ell).unwrap();
            match solve_expansion_point(&prob, s.k, &opts) {
                Ok(pt) => {
                    let c = pt.closure_residual().to_f64();
                    let r0 = pt.r0.to_f64();
                    let scale = pt.q.to_f64().abs().max(r0 * r0 * pt.b[1].to_f64().abs());
                    let lin = pt.linear_residual.to_f64() / scale;
                    if c > 1e-25 || lin > 1e-25 {
                        details.push(format!("table {id} (k={}, l={}): closure {c:.1e}, linear {lin:.1e}", s.k, s.ell));
                    }
                }
                Err(e) => details.push(format!("table {id}: {e}")),
            }
            match solve_state(&prob, s.k, 14, &opts) {
                Ok(sol) => {
                    let res = sol.max_residual.to_f64();
                    if res > 1e-20 {
                        details.push(format!("table {id} (k={}, l={}): order residual {res:.1e}", s.k, s.ell));
                    }
                    // Padé re-expansion identity on the actual series
                    let (i, j) = (3usize, 3usize);
                    let fz = &sol.series.coeffs[..=i + j];
                    if let Ok((num, den)) = pade_coefficients(p(), fz, i, j) {
                        for n in 0..=i + j {
                            let mut acc = Float::with_val(bits, 0);
                            for (tt, q) in den.iter().enumerate().take(n + 1) {
                                acc += Float::with_val(bits, q * &fz[n - tt]);
                            }
                            if n < num.len() {
                                acc -= &num[n];
                            }
                            if acc.to_f64().abs() > 1e-30 {
                                details.push(format!("table {id} (k={}, l={}): Pade [3,3] mismatch at z^{n}", s.k, s.ell));
                            }
                        }
                    }
                }
                Err(e) => details.push(format!("table {id}: {e}")),
            }
        }
    }

    // KG ignores the sign of κ
    let cfg = load(5).config.expect("kg table");
    let (v, s) = cfg.potential_sums().unwrap();
    let m = cfg.mass().unwrap();
    let a = build_effective(&PotentialSpec::new(v.clone(), s.clone(), m.clone(), EquationKind::KleinGordon, -2).unwrap(), 1).unwrap();
    let b = build_effective(&PotentialSpec::new(v, s, m, EquationKind::KleinGordon, 1).unwrap(), 1).unwrap();
    if a.gamma != b.gamma || a.ell_eff != b.ell_eff {
        details.push("Klein-Gordon problem depends on the sign of kappa".into());
    }

    // power-law energy map roundtrip
    for (nu, e) in [("1/10", "3.7"), ("2", "2.5"), ("1", "9")] {
        let case = PowerLawCase::new(nu.parse().unwrap(), r("0.8"), r("0.1"), r("1.5"), 0, 0).unwrap();
        let back = check_energy(&case, &r(e)).and_then(|c| invert_energy(&case, &c));
        match back {
            Ok(x) if rel(x.to_f64(), r(e).to_f64()) < 1e-15 => {}
            Ok(x) => details.push(format!("power-law roundtrip nu={nu}: {e} -> {}", x.to_f64())),
            Err(err) => details.push(format!("power-law roundtrip nu={nu}: {err}")),
        }
    }
    Verdict::new(
        details.is_empty(),
        "properties: Leibniz/Taylor, closure and linear residual, order residuals, Pade identity, KG kappa, power-law roundtrip (randomized suite in the core tests)",
        details,
    )
}

fn criterion10() -> Verdict {
    let mut details = Vec::new();
    for id in 1..=6u8 {
        let preset = load(id);
        let render = |jobs| -> Result<Vec<String>, String> {
            let t = run_table(&preset, &table_options(Some(jobs), true)).map_err(|e| e.to_string())?;
            [Format::Text, Format::Csv, Format::Json]
                .into_iter()
                .map(|f| render_table(&t, f).map_err(|e| e.to_string()))
                .collect()
        };
        match (render(1), render(1), render(4)) {
            (Ok(a), Ok(b), Ok(c)) => {
                if a != b {
                    details.push(format!("table {id}: two runs differ"));
                }
                if a != c {
                    details.push(format!("table {id}: --jobs 1 and --jobs 4 differ"));
                }
            }
            (a, b, c) => {
                for e in [a.err(), b.err(), c.err()].into_iter().flatten() {
                    details.push(format!("table {id}: {e}"));
                }
            }
        }
    }
    Verdict::new(details.is_empty(), "determinism: tables 1-6, text/csv/json, repeated and --jobs 1 vs 4", details)
}

fn main() -> ExitCode {
    let cases = closed_cases();
    let mut verdicts: Vec<(u32, Verdict)> = Vec::new();
    verdicts.push((1, criterion1(&cases)));

    let mut tables = Vec::new();
    let mut timings = Vec::new();
    for id in 1..=6u8 {
        let start = Instant::now();
        let t = run_table(&load(id), &table_options(None, true)).expect("table runs");
        timings.push(start.elapsed().as_secs_f64());
        tables.push(t);
    }

    let (pass, summary, mut details) = rows_verdict(&tables[0], "table 1 M(1), M(2), M(14)", |r| is_partial(r, &[1, 2, 14]));
    if timings[0] >= 120.0 {
        details.push(format!("runtime {:.1} s exceeds 2 min", timings[0]));
    }
    verdicts.push((2, Verdict::new(pass && timings[0] < 120.0, format!("{summary}, {:.2} s", timings[0]), details)));

    let (pass, summary, details) = rows_verdict(&tables[1], "table 2 M(14)", |r| is_partial(r, &[14]));
    verdicts.push((3, Verdict::new(pass, summary, details)));

    let (p1, s1, mut d1) = rows_verdict(&tables[2], "table 3 M(14)", |r| is_partial(r, &[14]));
    let (p2, s2, d2) = rows_verdict(&tables[2], "gap to printed M_num", |r| r.quantity.contains(" vs "));
    d1.extend(d2);
    verdicts.push((4, Verdict::new(p1 && p2, format!("{s1}; {s2}"), d1)));

    let (pass, summary, details) = rows_verdict(&tables[3], "table 4 Pade values", |r| r.quantity.starts_with("M["));
    verdicts.push((5, Verdict::new(pass, summary, details)));

    let (pass, summary, details) = rows_verdict(&tables[4], "table 5 E(1)..E(4), E(14)", |r| is_partial(r, &[1, 2, 3, 4, 14]));
    verdicts.push((6, Verdict::new(pass, summary, details)));

    let (pass, summary, details) = rows_verdict(&tables[5], "table 6 stabilized values", |r| r.quantity.contains("N*"));
    let orders: Vec<String> = tables[5]
        .rows
        .iter()
        .filter(|r| r.quantity.contains("[printed"))
        .map(|r| format!("{} {}", r.state, r.note))
        .collect();
    verdicts.push((7, Verdict::new(pass, format!("{summary}; {}", orders.join(", ")), details)));

    let numeric: Vec<(u8, &TableReport)> = [1u8, 3, 5].iter().map(|&id| (id, &tables[usize::from(id) - 1])).collect();
    verdicts.push((8, criterion8(&cases, &numeric)));
    verdicts.push((9, criterion9()));
    verdicts.push((10, criterion10()));

    let mut failed = 0;
    for (n, v) in &verdicts {
        println!("{}: criterion {n}: {}", if v.pass { "PASS" } else { "FAIL" }, v.summary);
        for d in &v.details {
            println!("    {d}");
        }
        if !v.pass {
            failed += 1;
        }
    }
    println!("{} of {} criteria passed", verdicts.len() - failed, verdicts.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
