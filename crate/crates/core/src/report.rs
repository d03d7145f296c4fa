/// One residual of a verification sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct Residual {
    /// Human-readable key, e.g. `n=3` or `N=4,k=2`.
    pub label: String,
    /// Numeric key matching `label`.
    pub index: Vec<usize>,
    /// Largest trace-norm deviation found for this key.
    pub value: f64,
}

/// Per-item residuals of a verification against a brute-force oracle.
#[derive(Debug, Clone, PartialEq)]
pub struct VerificationReport {
    pub tolerance: f64,
    pub residuals: Vec<Residual>,
}

impl VerificationReport {
    pub fn new(tolerance: f64, residuals: Vec<Residual>) -> Self {
        Self {
            tolerance,
            residuals,
        }
    }

    pub fn max_residual(&self) -> f64 {
        self.residuals.iter().map(|r| r.value).fold(0.0, f64::max)
    }

    /// Every residual is finite and at most the tolerance.
    pub fn pass(&self) -> bool {
        self.residuals
            .iter()
            .all(|r| r.value.is_finite() && r.value <= self.tolerance)
    }

    /// Residuals above the tolerance.
    pub fn failures(&self) -> impl Iterator<Item = &Residual> {
        self.residuals
            .iter()
            .filter(move |r| r.value.is_nan() || r.value > self.tolerance)
    }
}
