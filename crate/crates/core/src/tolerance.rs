//! Numerical tolerances shared across the crate.

/// Input validation: norms, traces, Hermiticity, row sums.
pub const NORM_TOL: f64 = 1e-9;
/// Reconstruction error allowed for Schmidt and spectral decompositions.
pub const RECON_TOL: f64 = 1e-10;
/// Spectral weight below this is treated as zero and discarded.
pub const ZERO_TOL: f64 = 1e-12;
/// Two coefficients closer than this are reported as degenerate.
pub const DEGEN_TOL: f64 = 1e-9;
/// Maximum entry of `|Gram - I|` for a response tensor to count as an isometry.
pub const PHYS_TOL: f64 = 1e-9;

/// Default state-dependent (MHI) threshold on the off-diagonal ratio.
pub const DEFAULT_DELTA: f64 = 0.1;
/// Default channel triviality tolerance for `channel_reliable`.
pub const DEFAULT_EPSILON: f64 = 0.05;
/// Default tolerance in bits for channel classification.
pub const DEFAULT_EPSILON_BITS: f64 = 1e-9;
