/// Arithmetic mode for predicates that support exact evaluation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Mode {
    #[default]
    Float,
    ExactRational,
}

/// Tolerance and arithmetic mode threaded through predicates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NumericContext {
    pub tolerance: f64,
    pub mode: Mode,
}

impl Default for NumericContext {
    fn default() -> Self {
        NumericContext { tolerance: 1e-9, mode: Mode::Float }
    }
}

impl NumericContext {
    pub fn with_tolerance(tolerance: f64) -> Self {
        NumericContext { tolerance, ..Self::default() }
    }

    pub fn exact() -> Self {
        NumericContext { mode: Mode::ExactRational, ..Self::default() }
    }
}
