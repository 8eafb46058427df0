use serde::{Deserialize, Serialize};

/// Numerical thresholds shared by every decision in the crate.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    /// Allowed deviation of a state's norm from 1.
    pub eps_norm: f64,
    /// Rank and product decisions (concurrence, determinant quadratic).
    pub eps_zero: f64,
    /// Pairwise inner-product modulus accepted as orthogonal.
    pub eps_orth: f64,
    /// Smallest overlap accepted as "nonzero" for a witness.
    pub tau_overlap: f64,
}

impl Tolerances {
    pub const DEFAULT: Tolerances = Tolerances {
        eps_norm: 1e-12,
        eps_zero: 1e-9,
        eps_orth: 1e-9,
        tau_overlap: 1e-7,
    };

    /// Discriminant threshold (relative to the squared largest coefficient)
    /// under which the determinant quadratic has a double root.
    pub const EPS_DISC: f64 = 1e-8;

    /// Upper edge of the witness warning band, as a multiple of `tau_overlap`.
    pub const WARNING_BAND: f64 = 1e3;
}

impl Default for Tolerances {
    fn default() -> Self {
        Self::DEFAULT
    }
}
