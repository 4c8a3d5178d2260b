//! Runs a table preset and lines the results up with the printed values.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use pslet::expansion::ExpansionOptions;
use pslet::powerlaw::{reduced_eigenvalue, reduced_problem, PowerLawCase};
use pslet::real::{format_fixed, Precision, Real};
use pslet::shooting::{shoot_eigenvalue, ShootingConfig};
use pslet::summation::{mass_of, DEFAULT_STABILIZATION_TOL};
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::error::{CliError, Result};
use crate::presets::{table6_states, Quantity, Reading, Reference, TablePreset};
use crate::report::Format;
use crate::run::{run_config, with_pool, RunFlags, StateReport};

#[derive(Clone, Debug, PartialEq)]
pub struct Row {
    pub state: String,
    pub quantity: String,
    pub computed: Option<Real>,
    pub printed: Option<String>,
    pub diff: Option<f64>,
    pub tol: Option<f64>,
    /// None when the row is informational.
    pub pass: Option<bool>,
    pub note: String,
}

#[derive(Clone, Debug)]
pub struct TableReport {
    pub id: u8,
    pub title: String,
    pub rows: Vec<Row>,
    pub errors: Vec<String>,
}

impl TableReport {
    pub fn failed_checks(&self) -> Vec<&Row> {
        self.rows.iter().filter(|r| r.pass == Some(false)).collect()
    }

    pub fn find(&self, state: &str, quantity: &str) -> Option<&Row> {
        self.rows.iter().find(|r| r.state == state && r.quantity == quantity)
    }
}

#[derive(Clone, Debug, Default)]
pub struct TableOptions {
    pub flags: RunFlags,
    pub order: Option<usize>,
    pub precision: Option<u32>,
    pub oracle_config: ShootingConfig,
}

fn label(k: u32, ell: u32, kappa: Option<i64>) -> String {
    match kappa {
        Some(kap) => format!("({k},{ell},{kap})"),
        None => format!("({k},{ell})"),
    }
}

fn quantity_label(q: Quantity, sym: &str) -> String {
    match q {
        Quantity::Partial(n) => format!("{sym}({n})"),
        Quantity::Pade(i, j) => format!("{sym}[{i},{j}]"),
        Quantity::Numeric => format!("{sym}_num"),
        Quantity::SeriesVsNumeric => format!("{sym}(14) vs {sym}_num"),
        Quantity::Stabilized(n) => format!("{sym}(N*) [printed N={n}]"),
    }
}

fn symbol(r: Reading) -> &'static str {
    match r {
        Reading::Mass => "M",
        Reading::Energy => "E",
        Reading::Check => "Ec",
    }
}

fn compare(reference: &Reference, computed: Option<Real>, sym: &str, note: String) -> Row {
    let printed: f64 = reference.printed.parse().expect("printed number");
    let diff = computed.as_ref().map(|c| (c.to_f64() - printed).abs());
    let pass = match (reference.checked, diff) {
        (true, Some(d)) => Some(d <= reference.tol),
        _ => None,
    };
    let mut note = note;
    if !reference.note.is_empty() {
        if !note.is_empty() {
            note.push_str("; ");
        }
        note.push_str(reference.note);
    }
    Row {
        state: label(reference.k, reference.ell, reference.kappa),
        quantity: quantity_label(reference.quantity, sym),
        computed,
        printed: Some(reference.printed.to_string()),
        diff,
        tol: reference.checked.then_some(reference.tol),
        pass,
        note,
    }
}

fn scale(reading: Reading, e: &Real) -> Real {
    match reading {
        Reading::Mass => mass_of(e),
        _ => e.clone(),
    }
}

pub fn run_table(preset: &TablePreset, opts: &TableOptions) -> Result<TableReport> {
    if preset.nu.is_some() {
        return run_powerlaw_table(preset, opts);
    }
    let mut cfg = preset.config.clone().expect("potential table has a config");
    if let Some(n) = opts.order {
        cfg.order = n;
    }
    if let Some(d) = opts.precision {
        cfg.precision_digits = d;
    }
    let sym = symbol(preset.reading);
    let outcomes = run_config(&cfg, opts.flags)?;
    let mut by_state: BTreeMap<(u32, u32), &StateReport> = BTreeMap::new();
    let mut errors = Vec::new();
    for o in &outcomes {
        match &o.result {
            Ok(r) => {
                by_state.insert((o.state.k, o.state.ell), r);
            }
            Err(e) => errors.push(e.clone()),
        }
    }

    // alternate convention: exact spin-orbit term
    let mut alternate: BTreeMap<(u32, u32), StateReport> = BTreeMap::new();
    if preset.exact_u_alternate && cfg.spin_orbit_cutoff.is_some() {
        let mut alt = cfg.clone();
        alt.spin_orbit_cutoff = None;
        alt.pade = None;
        for o in run_config(&alt, RunFlags { oracle: false, ..opts.flags })? {
            if let Ok(r) = o.result {
                alternate.insert((o.state.k, o.state.ell), r);
            }
        }
    }

    let mut rows = Vec::new();
    for reference in &preset.references {
        let Some(r) = by_state.get(&(reference.k, reference.ell)) else { continue };
        let (computed, note) = match reference.quantity {
            Quantity::Partial(n) => (r.partial.get(n - 1).map(|e| scale(preset.reading, e)), String::new()),
            Quantity::Pade(i, j) => match r.pade.iter().find(|p| p.i == i && p.j == j) {
                Some(p) => (
                    Some(scale(preset.reading, &p.value)),
                    if p.pole_in_disc { "pole inside |z| <= 1/lbar".into() } else { String::new() },
                ),
                None => (None, "not computed".into()),
            },
            Quantity::Numeric => match &r.oracle {
                Some(o) => {
                    let e = Precision::default().f64(o.e_num);
                    let note = if o.matched { String::new() } else { "oracle not matched".into() };
                    (Some(scale(preset.reading, &e)), note)
                }
                None => (None, "run with --oracle".into()),
            },
            Quantity::SeriesVsNumeric => (r.partial.last().map(|e| scale(preset.reading, e)), String::new()),
            Quantity::Stabilized(_) => (None, String::new()),
        };
        rows.push(compare(reference, computed, sym, note));
        if let (Quantity::Partial(n), Some(alt)) = (reference.quantity, alternate.get(&(reference.k, reference.ell))) {
            if n == cfg.order && reference.checked {
                let mut row = compare(reference, alt.partial.get(n - 1).map(|e| scale(preset.reading, e)), sym, String::new());
                row.quantity = format!("{sym}({n}) exact U");
                row.tol = None;
                row.pass = None;
                row.note = "alternate convention, not checked".into();
                rows.push(row);
            }
        }
    }
    Ok(TableReport { id: preset.id, title: preset.title.to_string(), rows, errors })
}

struct PowerLawState {
    k: u32,
    ell: u32,
    stabilized: std::result::Result<(usize, Real, Real), String>,
    numeric: Option<std::result::Result<Real, String>>,
}

fn run_powerlaw_table(preset: &TablePreset, opts: &TableOptions) -> Result<TableReport> {
    let prec = Precision::from_digits(opts.precision.unwrap_or(60));
    let order = opts.order.unwrap_or(14);
    let nu: pslet::power_sum::Exponent = preset.nu.expect("power-law table").parse()?;
    let oracle_cfg = opts.oracle_config.clone();
    let states = table6_states();
    let computed: Vec<PowerLawState> = with_pool(opts.flags.jobs, || {
        states
            .par_iter()
            .map(|&(k, ell)| {
                // Ě does not depend on m, A, B₀; unit values stand in for them
                let case = PowerLawCase::new(nu, prec.one(), prec.zero(), prec.one(), k, ell).expect("valid case");
                let stabilized = reduced_eigenvalue(&case, order, &ExpansionOptions::default())
                    .and_then(|r| {
                        let (n, v) = r.stabilization(DEFAULT_STABILIZATION_TOL)?;
                        Ok((n, v, r.direct[n - 1].clone()))
                    })
                    .map_err(|e| e.in_state(k, ell, i64::from(ell)).to_string());
                let numeric = opts.flags.oracle.then(|| {
                    shoot_eigenvalue(&reduced_problem(prec, nu, ell), k, &oracle_cfg)
                        .map(|o| prec.f64(o.e_num * o.e_num))
                        .map_err(|e| e.in_state(k, ell, i64::from(ell)).to_string())
                });
                PowerLawState { k, ell, stabilized, numeric }
            })
            .collect()
    })?;

    let sym = symbol(preset.reading);
    let mut rows = Vec::new();
    let mut errors = Vec::new();
    for reference in &preset.references {
        let Some(st) = computed.iter().find(|s| s.k == reference.k && s.ell == reference.ell) else { continue };
        match reference.quantity {
            Quantity::Stabilized(_) => match &st.stabilized {
                Ok((n, v, direct)) => {
                    let mut row = compare(reference, Some(v.clone()), sym, format!("N* = {n}"));
                    row.quantity = format!("{sym}(N*) [printed N={}]", printed_n(reference));
                    rows.push(row);
                    let mut d = compare(reference, Some(direct.clone()), sym, format!("direct reading at N* = {n}"));
                    d.quantity = format!("{sym}(N*) direct");
                    d.tol = None;
                    d.pass = None;
                    rows.push(d);
                }
                Err(e) => errors.push(e.clone()),
            },
            Quantity::Numeric => {
                let (computed, note) = match &st.numeric {
                    Some(Ok(v)) => (Some(v.clone()), String::new()),
                    Some(Err(e)) => {
                        errors.push(e.clone());
                        (None, "oracle failed".into())
                    }
                    None => (None, "run with --oracle".into()),
                };
                rows.push(compare(reference, computed, sym, note));
            }
            _ => {}
        }
    }
    Ok(TableReport { id: preset.id, title: preset.title.to_string(), rows, errors })
}

fn printed_n(r: &Reference) -> usize {
    match r.quantity {
        Quantity::Stabilized(n) => n,
        _ => 0,
    }
}

/// Decimals shown for a computed value: two more than the printed value.
fn shown_decimals(printed: Option<&str>) -> usize {
    printed.and_then(|p| p.split_once('.')).map_or(6, |(_, f)| f.len() + 2)
}

fn pass_text(p: Option<bool>) -> &'static str {
    match p {
        Some(true) => "ok",
        Some(false) => "OFF",
        None => "-",
    }
}

pub fn render_table(t: &TableReport, format: Format) -> Result<String> {
    match format {
        Format::Text => Ok(render_text(t)),
        Format::Csv => render_csv(t),
        Format::Json => Ok(render_json(t)),
    }
}

fn computed_text(r: &Row) -> String {
    r.computed
        .as_ref()
        .map_or_else(|| "-".into(), |c| format_fixed(c, shown_decimals(r.printed.as_deref())))
}

fn render_text(t: &TableReport) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "Table {}: {}", t.id, t.title);
    let _ = writeln!(
        s,
        "{:<10} {:<24} {:>13} {:>11} {:>10} {:>8} {:>4}  note",
        "state", "quantity", "computed", "printed", "|diff|", "tol", ""
    );
    for r in &t.rows {
        let _ = writeln!(
            s,
            "{:<10} {:<24} {:>13} {:>11} {:>10} {:>8} {:>4}  {}",
            r.state,
            r.quantity,
            computed_text(r),
            r.printed.as_deref().unwrap_or("-"),
            r.diff.map_or_else(|| "-".into(), |d| format!("{d:.2e}")),
            r.tol.map_or_else(|| "-".into(), |d| format!("{d:.1e}")),
            pass_text(r.pass),
            r.note
        );
    }
    for e in &t.errors {
        let _ = writeln!(s, "error: {e}");
    }
    s
}

fn render_csv(t: &TableReport) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let io = |e: csv::Error| CliError::Validation(format!("csv: {e}"));
    w.write_record(["state", "order", "value", "method", "printed", "abs_diff", "tol", "status"]).map_err(io)?;
    for r in &t.rows {
        let order = order_of(&r.quantity);
        w.write_record([
            r.state.as_str(),
            &order,
            &computed_text(r),
            &r.quantity,
            r.printed.as_deref().unwrap_or(""),
            &r.diff.map_or_else(String::new, |d| format!("{d:.3e}")),
            &r.tol.map_or_else(String::new, |d| format!("{d:.1e}")),
            pass_text(r.pass),
        ])
        .map_err(io)?;
    }
    for e in &t.errors {
        w.write_record(["", "", "", &format!("error: {e}"), "", "", "", ""]).map_err(io)?;
    }
    let bytes = w.into_inner().map_err(|e| CliError::Validation(format!("csv: {e}")))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

/// The N in "M(14)" or i+j+1 in "M[4,4]"; empty otherwise.
fn order_of(q: &str) -> String {
    if let Some(rest) = q.split_once('(').map(|x| x.1) {
        if let Some((n, _)) = rest.split_once(')') {
            if n.chars().all(|c| c.is_ascii_digit()) {
                return n.to_string();
            }
        }
    }
    if let Some(rest) = q.split_once('[').map(|x| x.1) {
        if let Some((ij, _)) = rest.split_once(']') {
            if let Some((i, j)) = ij.split_once(',') {
                if let (Ok(i), Ok(j)) = (i.parse::<usize>(), j.parse::<usize>()) {
                    return (i + j + 1).to_string();
                }
            }
        }
    }
    String::new()
}

fn render_json(t: &TableReport) -> String {
    let rows: Vec<Value> = t
        .rows
        .iter()
        .map(|r| {
            json!({
                "state": r.state,
                "quantity": r.quantity,
                "computed": r.computed.as_ref().map(|c| computed_text(&Row { computed: Some(c.clone()), ..r.clone() })),
                "printed": r.printed,
                "abs_diff": r.diff.map(|d| format!("{d:.3e}")),
                "tol": r.tol,
                "pass": r.pass,
                "note": r.note,
            })
        })
        .collect();
    let mut s = serde_json::to_string_pretty(&json!({
        "table": t.id,
        "title": t.title,
        "rows": rows,
        "errors": t.errors,
    }))
    .expect("json renders");
    s.push('\n');
    s
}
