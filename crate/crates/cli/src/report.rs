//! Text, CSV and JSON renderings of solver output.

use std::fmt::Write as _;

use pslet::real::{format_real, Real};
use pslet::summation::mass_of;
use serde_json::{json, Value};

use crate::error::{CliError, Result};
use crate::run::{StateOutcome, StateReport};

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Text,
    Csv,
    Json,
}

/// Significant digits in aligned text output.
pub const TEXT_DIGITS: usize = 12;

pub struct Rendering {
    /// Report M = 2E instead of E.
    pub mass: bool,
    /// Significant digits for CSV and JSON.
    pub digits: usize,
}

impl Rendering {
    fn scaled(&self, e: &Real) -> Real {
        if self.mass {
            mass_of(e)
        } else {
            e.clone()
        }
    }

    fn symbol(&self) -> &'static str {
        if self.mass {
            "M"
        } else {
            "E"
        }
    }
}

fn state_label(o: &StateOutcome) -> String {
    format!("({},{},{})", o.state.k, o.state.ell, o.kappa)
}

/// A JSON number carrying all the digits of the text.
fn json_num(text: &str) -> Value {
    text.parse::<serde_json::Number>().map(Value::Number).unwrap_or_else(|_| Value::String(text.into()))
}

struct Line {
    order: String,
    value: String,
    method: String,
}

fn lines(r: &StateReport, rd: &Rendering, digits: usize, compare: bool) -> Vec<Line> {
    let sym = rd.symbol();
    let mut out = Vec::new();
    let fmt = |x: &Real| format_real(&rd.scaled(x), digits);
    if !compare {
        out.push(Line { order: "-1".into(), value: format_real(&r.coefficients[0], digits), method: "E^(-1)".into() });
        for (i, v) in r.partial.iter().enumerate() {
            out.push(Line { order: (i + 1).to_string(), value: fmt(v), method: format!("{sym}(N)") });
        }
        for p in &r.pade {
            let flag = if p.pole_in_disc { " pole" } else { "" };
            out.push(Line {
                order: (p.i + p.j + 1).to_string(),
                value: fmt(&p.value),
                method: format!("{sym}[{},{}]{flag}", p.i, p.j),
            });
        }
        if let Some((n, v)) = &r.stabilization {
            out.push(Line { order: n.to_string(), value: fmt(v), method: "stabilized".into() });
        }
    } else if let Some(last) = r.partial.last() {
        out.push(Line { order: r.partial.len().to_string(), value: fmt(last), method: "pslet".into() });
    }
    if let Some(o) = &r.oracle {
        let e = pslet::real::Precision::default().f64(o.e_num);
        out.push(Line { order: String::new(), value: format_real(&rd.scaled(&e), 15.min(digits)), method: "oracle".into() });
    }
    if let Some(x) = &r.exact {
        out.push(Line { order: String::new(), value: fmt(x), method: "exact".into() });
    }
    out
}

pub fn render(outcomes: &[StateOutcome], format: Format, rd: &Rendering, compare: bool) -> Result<String> {
    match format {
        Format::Text => Ok(render_text(outcomes, rd, compare)),
        Format::Csv => render_csv(outcomes, rd, compare),
        Format::Json => Ok(render_json(outcomes, rd, compare)),
    }
}

fn render_text(outcomes: &[StateOutcome], rd: &Rendering, compare: bool) -> String {
    let mut s = String::new();
    for o in outcomes {
        let _ = writeln!(s, "state k={} l={} kappa={}", o.state.k, o.state.ell, o.kappa);
        match &o.result {
            Err(e) => {
                let _ = writeln!(s, "  FAILED: {e}");
            }
            Ok(r) => {
                let _ = writeln!(
                    s,
                    "  r0 = {}  lbar = {}",
                    format_real(&r.r0, TEXT_DIGITS),
                    format_real(&r.lbar, TEXT_DIGITS)
                );
                for l in lines(r, rd, TEXT_DIGITS, compare) {
                    let _ = writeln!(s, "  {:<14} {:>4}  {}", l.method, l.order, l.value);
                }
                if compare {
                    compare_summary(&mut s, r, rd);
                }
            }
        }
    }
    s
}

fn compare_summary(s: &mut String, r: &StateReport, rd: &Rendering) {
    let (Some(p), Some(o)) = (r.partial.last(), &r.oracle) else { return };
    let p = rd.scaled(p).to_f64();
    let o = if rd.mass { 2.0 * o.e_num } else { o.e_num };
    let _ = writeln!(s, "  {:<14} {:>4}  {:.3e}", "|pslet-oracle|", "", (p - o).abs());
    if let Some(x) = &r.exact {
        let x = rd.scaled(x).to_f64();
        let _ = writeln!(s, "  {:<14} {:>4}  {:.3e}", "|pslet-exact|", "", (p - x).abs());
    }
}

fn render_csv(outcomes: &[StateOutcome], rd: &Rendering, compare: bool) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let io = |e: csv::Error| CliError::Validation(format!("csv: {e}"));
    w.write_record(["state", "order", "value", "method"]).map_err(io)?;
    for o in outcomes {
        let label = state_label(o);
        match &o.result {
            Err(e) => w.write_record([label.as_str(), "", "", &format!("error: {e}")]).map_err(io)?,
            Ok(r) => {
                for l in lines(r, rd, rd.digits, compare) {
                    w.write_record([label.as_str(), &l.order, &l.value, &l.method]).map_err(io)?;
                }
            }
        }
    }
    let bytes = w.into_inner().map_err(|e| CliError::Validation(format!("csv: {e}")))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

fn render_json(outcomes: &[StateOutcome], rd: &Rendering, compare: bool) -> String {
    let d = rd.digits;
    let states: Vec<Value> = outcomes
        .iter()
        .map(|o| {
            let mut v = json!({ "k": o.state.k, "ell": o.state.ell, "kappa": o.kappa });
            match &o.result {
                Err(e) => v["error"] = Value::String(e.clone()),
                Ok(r) => {
                    v["quantity"] = Value::String(rd.symbol().into());
                    v["r0"] = json_num(&format_real(&r.r0, d));
                    v["lbar"] = json_num(&format_real(&r.lbar, d));
                    v["leading"] = json_num(&format_real(&r.coefficients[0], d));
                    if !compare {
                        v["coefficients"] = r.coefficients.iter().map(|c| json_num(&format_real(c, d))).collect();
                    }
                    v["partial"] = r.partial.iter().map(|x| json_num(&format_real(&rd.scaled(x), d))).collect();
                    v["pade"] = r
                        .pade
                        .iter()
                        .map(|p| {
                            json!({
                                "i": p.i, "j": p.j,
                                "value": json_num(&format_real(&rd.scaled(&p.value), d)),
                                "pole_in_disc": p.pole_in_disc,
                            })
                        })
                        .collect();
                    if let Some((n, x)) = &r.stabilization {
                        v["stabilization"] = json!({ "n": n, "value": json_num(&format_real(&rd.scaled(x), d)) });
                    }
                    if let Some(o) = &r.oracle {
                        v["oracle"] = json!({
                            "e_num": o.e_num,
                            "nodes": o.nodes,
                            "matched": o.matched,
                            "mesh_halving_delta": o.mesh_halving_delta,
                        });
                    }
                    if let Some(x) = &r.exact {
                        v["exact"] = json_num(&format_real(&rd.scaled(x), d));
                    }
                }
            }
            v
        })
        .collect();
    let mut s = serde_json::to_string_pretty(&json!({ "states": states })).expect("json renders");
    s.push('\n');
    s
}
