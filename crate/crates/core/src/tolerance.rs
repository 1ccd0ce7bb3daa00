/// Absolute Frobenius tolerance for matrix and map equality.
pub const EQ: f64 = 1e-10;
/// Tolerance for quantities obtained through an eigensolve or span closure.
pub const DERIVED: f64 = 1e-8;
/// Slack allowed on negative eigenvalues in positivity tests.
pub const PSD: f64 = 1e-9;

/// Tolerance set used by the verification suites.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Tolerances {
    pub eq: f64,
    pub derived: f64,
    pub psd: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self { eq: EQ, derived: DERIVED, psd: PSD }
    }
}
