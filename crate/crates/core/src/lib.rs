//! Measuring apparatus modeled as Shannon channels.
//!
//! A device is characterized by its response tensor: for every input
//! eigenstate `|a_k>` it yields a composite system-pointer amplitude array
//! `gamma[i][j][k]`. From the tensor we derive the channel matrix
//! `Pr(p_j | a_k)`, simulate calibration runs, and compute Shannon
//! quantities that rate the device independently of the measured state.
//!
//! Module map:
//!
//! - [`quantum`]: pure states, bipartite states, density operators and
//!   their Schmidt / spectral decompositions.
//! - [`device`]: the response tensor and its ideal, imperfect, disturbing
//!   and generic constructors.
//! - [`calibration`]: exact and sampled channel matrices, frequency
//!   measurements, and the quantum-vs-classical prediction gap.
//! - [`info`]: entropies, equivocation, noise, mutual information and the
//!   reliability index.
//! - [`interpretation`]: preferred-context ascriptions of competing
//!   interpretations and their misalignment with the pointer basis.
//! - [`io`]: device and scenario files, composite reports, JSON/CSV output.

pub mod calibration;
pub mod device;
pub mod error;
pub mod info;
pub mod interpretation;
pub mod io;
pub mod quantum;
pub mod tolerance;

pub use num_complex::Complex64;



pub use error::{Error, Result};


pub use calibration::{CalibrationReport, ChannelMatrix, Frequencies};
pub use info::{Classification, InfoReport, JointDistribution, SourceDistribution};
pub use device::{DeviceKind, MeasurementDevice, MhiReport, ValidationReport};
pub use interpretation::{AscriptionComparison, ContextAssignment, Interpretation, Misalignment};
pub use quantum::{
    BipartiteState, DensityOperator, PureState, SchmidtDecomposition, Side, SpectralDecomposition,
};
