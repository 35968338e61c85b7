//! Preferred contexts assigned to the pointer by competing readings of the
//! post-measurement state, and how far they stray from the pointer basis.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::quantum::{BipartiteState, Side};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Interpretation {
    /// Schmidt (biorthogonal) decomposition of the composite state.
    KochenDieks,
    /// Spectral decomposition of the reduced pointer state.
    VermaasDieks,
    /// Decoherence into the product basis.
    Collapse,
    /// The pointer observable itself is always definite-valued.
    PointerBasis,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ContextAssignment {
    pub interpretation: Interpretation,
    /// Definite-valued pointer-side vectors, in the computational pointer basis.
    pub pointer_side_basis: Vec<Vec<Complex64>>,
    pub probabilities: Vec<f64>,
    pub degenerate: bool,
}

fn computational_basis(m: usize) -> Vec<Vec<Complex64>> {
    (0..m)
        .map(|j| {
            (0..m)
                .map(|x| Complex64::new(if x == j { 1.0 } else { 0.0 }, 0.0))
                .collect()
        })
        .collect()
}

/// Pointer-side Schmidt vectors with nonzero weight, weighted by the
/// squared Schmidt coefficients.
pub fn kochen_dieks_context(state: &BipartiteState) -> ContextAssignment {
    let sd = state.schmidt_decompose();
    let support = sd.support_len();
    ContextAssignment {
        interpretation: Interpretation::KochenDieks,
        pointer_side_basis: sd.right_vectors[..support]
            .iter()
            .map(|v| v.iter().cloned().collect())
            .collect(),
        probabilities: sd.coefficients[..support].iter().map(|c| c * c).collect(),
        degenerate: sd.degenerate,
    }
}

/// Eigenvectors of the reduced pointer state. Each eigenvector of a
/// projector `Pi_i` carries `gamma_i`, so a projector's total weight is
/// `Tr(rho Pi_i)`.
pub fn vermaas_dieks_context(state: &BipartiteState) -> Result<ContextAssignment> {
    let spectral = state.partial_trace(Side::System).spectral_decompose()?;
    let mut basis = Vec::new();
    let mut probabilities = Vec::new();
    for (gamma, vectors) in spectral.eigenvalues.iter().zip(&spectral.eigenvectors) {
        for v in vectors {
            basis.push(v.iter().cloned().collect());
            probabilities.push(*gamma);
        }
    }
    Ok(ContextAssignment {
        interpretation: Interpretation::VermaasDieks,
        pointer_side_basis: basis,
        probabilities,
        degenerate: spectral.multiplicities.iter().any(|k| *k > 1),
    })
}

/// Pointer marginal of the decohered mixture.
pub fn collapse_context(state: &BipartiteState) -> ContextAssignment {
    let (n, m) = (state.n(), state.m());
    let diag = state.collapse_mixture().diagonal();
    let probabilities = (0..m).map(|j| (0..n).map(|i| diag[i * m + j]).sum()).collect();
    ContextAssignment {
        interpretation: Interpretation::Collapse,
        pointer_side_basis: computational_basis(m),
        probabilities,
        degenerate: false,
    }
}

pub fn pointer_basis_context(state: &BipartiteState) -> ContextAssignment {
    ContextAssignment {
        interpretation: Interpretation::PointerBasis,
        pointer_side_basis: computational_basis(state.m()),
        probabilities: state.pointer_distribution(),
        degenerate: false,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Misalignment {
    pub value: f64,
    /// The Schmidt spectrum is degenerate, so the basis compared is one
    /// arbitrary choice among many.
    pub degenerate: bool,
}

/// `1 - min_i max_j |<p_j|p'_i>|^2` over the weighted Schmidt pointer
/// vectors `p'_i`. Zero exactly when each of them is a pointer eigenstate
/// up to phase.
pub fn pointer_misalignment(state: &BipartiteState) -> Misalignment {
    let kd = kochen_dieks_context(state);
    let worst = kd
        .pointer_side_basis
        .iter()
        .map(|v| v.iter().map(|x| x.norm_sqr()).fold(0.0, f64::max))
        .fold(1.0, f64::min);
    Misalignment {
        value: (1.0 - worst).clamp(0.0, 1.0),
        degenerate: kd.degenerate,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AscriptionComparison {
    pub assignments: Vec<ContextAssignment>,
    pub misalignment: Misalignment,
}

impl AscriptionComparison {
    pub fn get(&self, which: Interpretation) -> Option<&ContextAssignment> {
        self.assignments.iter().find(|a| a.interpretation == which)
    }
}

/// The four ascriptions side by side, in the order Kochen-Dieks,
/// Vermaas-Dieks, collapse, pointer basis.
pub fn ascription_comparison(state: &BipartiteState) -> Result<AscriptionComparison> {
    Ok(AscriptionComparison {
        assignments: vec![
            kochen_dieks_context(state),
            vermaas_dieks_context(state)?,
            collapse_context(state),
            pointer_basis_context(state),
        ],
        misalignment: pointer_misalignment(state),
    })
}
