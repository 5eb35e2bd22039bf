use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("series order mismatch: {left} vs {right}")]
    OrderMismatch { left: usize, right: usize },

    #[error("{name} = {value} is outside its domain ({expected})")]
    Domain {
        name: &'static str,
        value: f64,
        expected: &'static str,
    },

    #[error("derivative order {n} exceeds series order {order}")]
    OutOfRange { n: usize, order: usize },

    #[error("mode index {index} is invalid for a {modes}-mode state")]
    ModeIndex { index: usize, modes: usize },

    #[error("contract violation: {0}")]
    Contract(String),

    #[error("degenerate probe: normalization sum {sum:e} is below the numeric floor")]
    DegenerateProbe { sum: f64 },

    #[error("singular Fisher matrix (f_d = {f_d:e}, f_o = {f_o:e}, d = {d})")]
    Singular { f_d: f64, f_o: f64, d: usize },

    #[error("optimizer did not converge after {iterations} iterations (bracket [{lo}, {hi}])")]
    NonConvergence { iterations: usize, lo: f64, hi: f64 },

    #[error("no crossover in total mean photon window [{lo}, {hi}]")]
    NoCrossover { lo: f64, hi: f64 },

    #[error("state needs {required} amplitudes, budget is {budget}")]
    MemoryBudget { required: usize, budget: usize },

    #[error("heralding pattern has zero probability")]
    NoSupport,

    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("invalid configuration: {0}")]
    Config(String),
}

impl Error {
    /// Short stable tag used in emitted tables.
    pub fn code(&self) -> &'static str {
        match self {
            Error::OrderMismatch { .. } => "order-mismatch",
            Error::Domain { .. } => "domain",
            Error::OutOfRange { .. } => "out-of-range",
            Error::ModeIndex { .. } => "mode-index",
            Error::Contract(_) => "contract",
            Error::DegenerateProbe { .. } => "degenerate",
            Error::Singular { .. } => "singular",
            Error::NonConvergence { .. } => "non-convergence",
            Error::NoCrossover { .. } => "no-crossover",
            Error::MemoryBudget { .. } => "memory-budget",
            Error::NoSupport => "no-support",
            Error::ShapeMismatch(_) => "shape",
            Error::Config(_) => "config",
        }
    }

    /// True for failures of the numerics (as opposed to bad input).
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::DegenerateProbe { .. }
                | Error::Singular { .. }
                | Error::NonConvergence { .. }
                | Error::NoCrossover { .. }
                | Error::NoSupport
        )
    }
}

pub(crate) fn check_domain(
    name: &'static str,
    value: f64,
    ok: bool,
    expected: &'static str,
) -> Result<()> {
    if ok && value.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain {
            name,
            value,
            expected,
        })
    }
}
