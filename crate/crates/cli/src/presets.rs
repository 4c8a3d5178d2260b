//! Built-in configurations for the six reference tables, with the printed
//! values they are compared against.

use crate::config::{number, term, Equation, Potential, RunConfig, StateSel};

/// What a reference value is compared with.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Quantity {
    /// Partial sum with N corrections.
    Partial(usize),
    /// Padé approximant [i/j].
    Pade(usize, usize),
    /// The shooting oracle.
    Numeric,
    /// Last partial sum against the printed numerical value, i.e. the
    /// series-vs-numerics gap of the reference table.
    SeriesVsNumeric,
    /// Stabilized Ě of the power-law table; the payload is the printed N.
    Stabilized(usize),
}

#[derive(Clone, Debug)]
pub struct Reference {
    pub k: u32,
    pub ell: u32,
    pub kappa: Option<i64>,
    pub quantity: Quantity,
    /// The value as printed.
    pub printed: &'static str,
    pub tol: f64,
    /// When false the row is shown but never checked.
    pub checked: bool,
    pub note: &'static str,
}

impl Reference {
    fn new(k: u32, ell: u32, kappa: Option<i64>, quantity: Quantity, printed: &'static str, base_tol: f64) -> Self {
        Reference { k, ell, kappa, quantity, printed, tol: printed_tol(printed, base_tol), checked: true, note: "" }
    }

    fn unchecked(mut self, note: &'static str) -> Self {
        self.checked = false;
        self.note = note;
        self
    }

    fn tol(mut self, tol: f64) -> Self {
        self.tol = tol;
        self
    }
}

/// `base` widened to half a unit in the last printed digit.
pub fn printed_tol(printed: &str, base: f64) -> f64 {
    let decimals = printed.split_once('.').map_or(0, |(_, f)| f.len());
    base.max(0.5 * 10f64.powi(-(decimals as i32)))
}

/// What a table row holds: M = 2E, E, or Ě.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Reading {
    Mass,
    Energy,
    Check,
}

#[derive(Clone, Debug)]
pub struct TablePreset {
    pub id: u8,
    pub title: &'static str,
    pub reading: Reading,
    /// None for the power-law table, which is not a potential run.
    pub config: Option<RunConfig>,
    /// Power-law exponent of the reduced equation.
    pub nu: Option<&'static str>,
    pub references: Vec<Reference>,
    /// Also report M(N) with the exact spin-orbit term.
    pub exact_u_alternate: bool,
}

/// Taylor order of the spin-orbit term kept in the Dirac tables.
pub const DIRAC_TABLE_CUTOFF: usize = 3;

/// Tolerance on M(N), E(N) and Ě against printed values.
pub const SERIES_TOL: f64 = 5e-4;
/// Relative tolerance of the oracle against printed numerics.
pub const NUMERIC_REL_TOL: f64 = 2e-3;
/// The printed series-vs-numerics gap on the funnel table.
pub const GAP_TOL: f64 = 6e-3;

fn base_config(equation: Equation, mass: &str, potential: Potential, states: Vec<StateSel>) -> RunConfig {
    RunConfig {
        schema: 1,
        equation,
        mass: number(mass),
        potential,
        states,
        order: 14,
        precision_digits: 60,
        pade: None,
        branch: "+".into(),
        report_mass: true,
        oracle: None,
        spin_orbit_cutoff: None,
        check_tolerance: NUMERIC_REL_TOL,
    }
}

fn linear() -> Potential {
    Potential { vector: vec![], scalar: vec![term("0.137", "1")] }
}

/// V = −2α/(3r) with α = 0.39, S = br/2 with b = 0.21055.
fn dirac_funnel() -> Potential {
    Potential { vector: vec![term("-0.26", "-1")], scalar: vec![term("0.105275", "1")] }
}

/// V = −a/r, S = br with a = 0.26, b = 0.10429.
fn kg_funnel() -> Potential {
    Potential { vector: vec![term("-0.26", "-1")], scalar: vec![term("0.10429", "1")] }
}

fn sel(k: u32, ell: u32, kappa: i64) -> StateSel {
    StateSel { k, ell, kappa: Some(kappa) }
}

/// Column of printed M(1), M(2), …; `None` marks a skipped entry.
type Column = (u32, u32, &'static [Option<&'static str>], &'static str, &'static str);

fn series_refs(columns: &[Column], kappa_of: fn(u32) -> i64, gap: bool, out: &mut Vec<Reference>) {
    for &(k, ell, printed, m14, num) in columns {
        let kappa = Some(kappa_of(ell));
        for (i, p) in printed.iter().enumerate() {
            if let Some(p) = p {
                out.push(Reference::new(k, ell, kappa, Quantity::Partial(i + 1), p, SERIES_TOL));
            }
        }
        out.push(Reference::new(k, ell, kappa, Quantity::Partial(14), m14, SERIES_TOL));
        let rel = num.parse::<f64>().expect("printed number") * NUMERIC_REL_TOL;
        out.push(Reference::new(k, ell, kappa, Quantity::Numeric, num, 0.0).tol(rel));
        if gap {
            out.push(Reference::new(k, ell, kappa, Quantity::SeriesVsNumeric, num, 0.0).tol(GAP_TOL));
        }
    }
}

fn minus(ell: u32) -> i64 {
    -(i64::from(ell) + 1)
}

fn plus(ell: u32) -> i64 {
    i64::from(ell)
}

pub fn table1() -> TablePreset {
    let cols: [Column; 8] = [
        (0, 0, &[Some("3.0919"), Some("3.0961"), Some("3.0963"), Some("3.0961"), Some("3.0961")], "3.0961", "3.103"),
        // M(4) is printed as 4.43256, a typo for 3.43256
        (0, 1, &[Some("3.43078"), Some("3.43252"), Some("3.43259"), None, Some("3.43256")], "3.43256", "3.442"),
        (0, 2, &[Some("3.711960"), Some("3.712914"), Some("3.712947"), Some("3.712940"), Some("3.712939")], "3.712939", "3.725"),
        (0, 3, &[Some("3.9581219"), Some("3.9587277"), Some("3.9587465"), Some("3.9587436"), Some("3.9587434")], "3.9587434", "3.973"),
        (2, 0, &[Some("4.131"), Some("4.142"), Some("4.148"), Some("4.150"), Some("4.151"), Some("4.152"), Some("4.152")], "4.152", "4.158"),
        (2, 1, &[Some("4.3395"), Some("4.3468"), Some("4.3502"), Some("4.3515"), Some("4.3519"), Some("4.3520"), Some("4.3521")], "4.3521", "4.36"),
        (2, 2, &[Some("4.5325"), Some("4.5378"), Some("4.5401"), Some("4.5408"), Some("4.5410"), Some("4.5411"), Some("4.5411")], "4.5411", "4.551"),
        (2, 3, &[Some("4.71334"), Some("4.71739"), Some("4.71905"), Some("4.71950"), Some("4.71961"), Some("4.71965"), Some("4.71966")], "4.71966", "4.732"),
    ];
    let mut refs = Vec::new();
    series_refs(&cols, minus, false, &mut refs);
    refs.push(
        Reference::new(0, 1, Some(-2), Quantity::Partial(4), "4.43256", SERIES_TOL)
            .unchecked("printed value; typo for 3.43256"),
    );
    let states = cols.iter().map(|c| sel(c.0, c.1, minus(c.1))).collect();
    let mut config = base_config(Equation::Dirac, "1.12", linear(), states);
    config.spin_orbit_cutoff = Some(DIRAC_TABLE_CUTOFF);
    TablePreset {
        id: 1,
        title: "Dirac, S = 0.137 r, V = 0, m = 1.12, kappa = -(l+1): M(N) = 2E(N)",
        reading: Reading::Mass,
        config: Some(config),
        nu: None,
        references: refs,
        exact_u_alternate: true,
    }
}

pub fn table2() -> TablePreset {
    let cols: [Column; 8] = [
        (0, 1, &[Some("3.47090"), Some("3.47183"), Some("3.47188"), Some("3.47186"), Some("3.47186")], "3.47186", "3.47"),
        (0, 2, &[Some("3.760125"), Some("3.760677"), Some("3.760700"), Some("3.760696"), Some("3.760695")], "3.760695", "3.757"),
        (0, 3, &[Some("4.0111817"), Some("4.0115488"), Some("4.0115615"), Some("4.0115597"), Some("4.0115595")], "4.0115595", "4.006"),
        (0, 4, &[Some("4.2364739"), Some("4.2367365"), Some("4.2367444"), Some("4.2367435"), Some("4.2367435")], "4.2367435", "4.23"),
        (1, 1, &[Some("3.9570"), Some("3.9624"), Some("3.9640"), Some("3.9644"), Some("3.9646"), Some("3.9646")], "3.9646", "3.965"),
        (1, 2, &[Some("4.19083"), Some("4.19451"), Some("4.19537"), Some("4.19557"), Some("4.19561"), Some("4.19563")], "4.19563", "4.194"),
        (1, 3, &[Some("4.40310"), Some("4.40578"), Some("4.40631"), Some("4.40642"), Some("4.40644"), Some("4.40644")], "4.40644", "4.403"),
        (1, 4, &[Some("4.599080"), Some("4.601126"), Some("4.601482"), Some("4.601542"), Some("4.601552"), Some("4.601554")], "4.601554", "4.597"),
    ];
    let mut refs = Vec::new();
    series_refs(&cols, plus, false, &mut refs);
    let states = cols.iter().map(|c| sel(c.0, c.1, plus(c.1))).collect();
    let mut config = base_config(Equation::Dirac, "1.12", linear(), states);
    config.spin_orbit_cutoff = Some(DIRAC_TABLE_CUTOFF);
    TablePreset {
        id: 2,
        title: "Dirac, S = 0.137 r, V = 0, m = 1.12, kappa = l: M(N) = 2E(N)",
        reading: Reading::Mass,
        config: Some(config),
        nu: None,
        references: refs,
        exact_u_alternate: true,
    }
}

pub fn table3() -> TablePreset {
    let cols: [Column; 6] = [
        (0, 1, &[Some("3.5071"), Some("3.5062"), Some("3.5056"), Some("3.5055"), Some("3.5055"), Some("3.5055"), Some("3.5055"), Some("3.5055")], "3.5055", "3.4998"),
        (0, 2, &[Some("3.8012"), Some("3.8007"), Some("3.8006"), Some("3.8005"), Some("3.8005"), Some("3.8005"), Some("3.8005"), Some("3.8005")], "3.8005", "3.7974"),
        (1, 1, &[Some("3.966"), Some("3.963"), Some("3.961"), Some("3.959"), Some("3.959"), Some("3.958"), Some("3.958"), Some("3.958")], "3.958", "3.9499"),
        (1, 3, &[Some("4.3862"), Some("4.3857"), Some("4.3853"), Some("4.3852"), Some("4.3851"), Some("4.3851"), Some("4.3850"), Some("4.3850")], "4.3850", "4.3812"),
        (2, 1, &[Some("4.333"), Some("4.331"), Some("4.329"), Some("4.327"), Some("4.326"), Some("4.325"), Some("4.325"), Some("4.324")], "4.324", "4.315"),
        (2, 3, &[Some("4.6906"), Some("4.6908"), Some("4.6905"), Some("4.6901"), Some("4.6899"), Some("4.6898"), Some("4.6897"), Some("4.6897")], "4.6897", "4.6858"),
    ];
    let mut refs = Vec::new();
    series_refs(&cols, plus, true, &mut refs);
    let states = cols.iter().map(|c| sel(c.0, c.1, plus(c.1))).collect();
    let mut config = base_config(Equation::Dirac, "1.358", dirac_funnel(), states);
    config.spin_orbit_cutoff = Some(DIRAC_TABLE_CUTOFF);
    TablePreset {
        id: 3,
        title: "Dirac funnel, V = -2a/(3r), S = br/2, m = 1.358, a = 0.39, b = 0.21055, kappa = l: M(N)",
        reading: Reading::Mass,
        config: Some(config),
        nu: None,
        references: refs,
        exact_u_alternate: true,
    }
}

pub fn table4() -> TablePreset {
    // (k, l, N, M(N), i, j, M[i,j])
    let rows: [(u32, u32, usize, &str, usize, usize, &str); 10] = [
        (0, 0, 6, "3.0333", 4, 4, "3.0333"),
        (0, 1, 5, "3.4918", 2, 3, "3.4918"),
        (0, 2, 4, "3.7787", 2, 3, "3.7787"),
        (0, 3, 4, "4.0129", 2, 3, "4.0129"),
        (0, 4, 4, "4.2177", 2, 3, "4.2177"),
        (1, 0, 7, "3.65", 5, 5, "3.6502"),
        (1, 1, 7, "3.946", 4, 4, "3.9462"),
        (1, 2, 7, "4.1690", 4, 4, "4.1690"),
        (2, 0, 9, "4.08", 6, 6, "4.0789"),
        (2, 1, 9, "4.314", 4, 5, "4.3139"),
    ];
    let mut refs = Vec::new();
    let mut pades: Vec<[usize; 2]> = Vec::new();
    for &(k, ell, n, mn, i, j, mij) in &rows {
        let kappa = Some(minus(ell));
        refs.push(Reference::new(k, ell, kappa, Quantity::Partial(n), mn, SERIES_TOL));
        refs.push(Reference::new(k, ell, kappa, Quantity::Pade(i, j), mij, SERIES_TOL));
        if !pades.contains(&[i, j]) {
            pades.push([i, j]);
        }
    }
    pades.sort();
    let states = rows.iter().map(|r| sel(r.0, r.1, minus(r.1))).collect();
    let mut config = base_config(Equation::Dirac, "1.358", dirac_funnel(), states);
    config.spin_orbit_cutoff = Some(DIRAC_TABLE_CUTOFF);
    config.pade = Some(pades);
    TablePreset {
        id: 4,
        title: "Dirac funnel as table 3, kappa = -(l+1): M(N) and Pade M[i,j]",
        reading: Reading::Mass,
        config: Some(config),
        nu: None,
        references: refs,
        exact_u_alternate: true,
    }
}

pub fn table5() -> TablePreset {
    let cols: [(u32, &[&str], &str, &str, f64); 3] = [
        (0, &["1.541", "1.535", "1.534", "1.533"], "1.533", "1.533", SERIES_TOL),
        (1, &["1.76167", "1.76064", "1.76037", "1.76033"], "1.76033", "1.760", 5e-5),
        (2, &["1.90420", "1.90388", "1.90380", "1.90379"], "1.90379", "1.904", 5e-5),
    ];
    let mut refs = Vec::new();
    for &(ell, printed, e14, num, tol) in &cols {
        for (i, p) in printed.iter().enumerate() {
            refs.push(Reference::new(0, ell, None, Quantity::Partial(i + 1), p, tol));
        }
        refs.push(Reference::new(0, ell, None, Quantity::Partial(14), e14, tol));
        let rel = num.parse::<f64>().expect("printed number") * NUMERIC_REL_TOL;
        refs.push(Reference::new(0, ell, None, Quantity::Numeric, num, 0.0).tol(rel));
    }
    let states = cols.iter().map(|c| StateSel { k: 0, ell: c.0, kappa: None }).collect();
    let mut config = base_config(Equation::Kg, "1.370", kg_funnel(), states);
    config.report_mass = false;
    TablePreset {
        id: 5,
        title: "Klein-Gordon funnel, V = -a/r, S = br, m = 1.370, a = 0.26, b = 0.10429: E(N)",
        reading: Reading::Energy,
        config: Some(config),
        nu: None,
        references: refs,
        exact_u_alternate: false,
    }
}

pub fn table6() -> TablePreset {
    let rows: [(u32, u32, usize, &str, &str); 6] = [
        (0, 0, 2, "1.2358", "1.2364"),
        (1, 0, 7, "1.3347", "1.3347"),
        (2, 0, 4, "1.3922", "1.3923"),
        (0, 1, 1, "1.3072", "1.3071"),
        (1, 1, 4, "1.3731", "1.3731"),
        (0, 2, 1, "1.3540", "1.3544"),
    ];
    let mut refs = Vec::new();
    for &(k, ell, n, v, num) in &rows {
        refs.push(Reference::new(k, ell, None, Quantity::Stabilized(n), v, SERIES_TOL));
        let rel = num.parse::<f64>().expect("printed number") * NUMERIC_REL_TOL;
        refs.push(Reference::new(k, ell, None, Quantity::Numeric, num, 0.0).tol(rel));
    }
    TablePreset {
        id: 6,
        title: "Power law nu = 0.1, reduced equation [-d2/dq2 + l(l+1)/q2 + q^nu]: stabilized E-check = E(N)^2",
        reading: Reading::Check,
        config: None,
        nu: Some("0.1"),
        references: refs,
        exact_u_alternate: false,
    }
}

pub fn table(id: u8) -> Option<TablePreset> {
    match id {
        1 => Some(table1()),
        2 => Some(table2()),
        3 => Some(table3()),
        4 => Some(table4()),
        5 => Some(table5()),
        6 => Some(table6()),
        _ => None,
    }
}

/// States of the power-law table in printed order.
pub fn table6_states() -> Vec<(u32, u32)> {
    vec![(0, 0), (1, 0), (2, 0), (0, 1), (1, 1), (0, 2)]
}
