use thiserror::Error;

pub type Result<T> = std::result::Result<T, PsletError>;

#[derive(Debug, Error)]
pub enum PsletError {
    #[error("parse error: {0}")]
    Parse(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("subcritical coupling: (l+1/2)^2 - A1^2 + A2^2 = {0} is not positive")]
    Subcritical(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("no real Q at r0 = {r0}: h^2 - g = {disc}")]
    Branch { r0: String, disc: String },

    #[error("leading-energy radicand is negative at r0 = {0}")]
    Radicand(String),

    #[error("imaginary frequency at r0 = {r0}: omega^2 = {omega2}")]
    ImaginaryFrequency { r0: String, omega2: String },

    #[error("no expansion point found for r0 in [{lo}, {hi}]")]
    NoRoot { lo: String, hi: String },

    #[error("order {order} needs E^({missing}) which is not yet known")]
    Dependency { order: usize, missing: i64 },

    #[error("singular system at order {order}, x^{power}")]
    Singular { order: usize, power: usize },

    #[error("order {order}: residual {residual} exceeds tolerance (scale {scale})")]
    Tolerance {
        order: usize,
        residual: String,
        scale: String,
    },

    #[error("order {order}: polynomial degree {degree} exceeds bound {bound}")]
    DegreeBound {
        order: usize,
        degree: usize,
        bound: usize,
    },

    #[error("requested {requested} terms but only {available} are available")]
    Range { requested: usize, available: usize },

    #[error("Pade [{i}/{j}]: Hankel system is singular")]
    DegenerateDenominator { i: usize, j: usize },

    #[error("series did not stabilize within {0} corrections")]
    NoStabilization(usize),

    #[error("supercritical coupling: {0}")]
    Supercritical(String),

    #[error("negative E^2 = {0}")]
    NegativeEnergySquared(String),

    #[error("root search: {0}")]
    RootSearch(String),

    #[error("shooting: {0}")]
    Shooting(String),

    #[error("state (k={k}, l={ell}, kappa={kappa}): {source}")]
    State {
        k: u32,
        ell: u32,
        kappa: i64,
        #[source]
        source: Box<PsletError>,
    },
}

impl PsletError {
    pub fn in_state(self, k: u32, ell: u32, kappa: i64) -> Self {
        match self {
            e @ PsletError::State { .. } => e,
            other => PsletError::State {
                k,
                ell,
                kappa,
                source: Box::new(other),
            },
        }
    }
}
