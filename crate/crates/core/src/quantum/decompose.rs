use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use super::{hermitian_deviation, hermitize, BipartiteState};
use crate::error::{Error, Result};
use crate::tolerance::{DEGEN_TOL, NORM_TOL, ZERO_TOL};

/// Biorthogonal decomposition `beta = sum_k c_k left_k (x) right_k`.
///
/// Coefficients are sorted descending. Each left vector has its first
/// significant component real and positive; the right vector carries the
/// compensating phase.
#[derive(Debug, Clone)]
pub struct SchmidtDecomposition {
    pub coefficients: Vec<f64>,
    pub left_vectors: Vec<DVector<Complex64>>,
    pub right_vectors: Vec<DVector<Complex64>>,
    /// Set when two coefficients with nonzero weight coincide within
    /// [`DEGEN_TOL`]; the basis is then not unique.
    pub degenerate: bool,
}

impl SchmidtDecomposition {
    pub(crate) fn of(state: &BipartiteState) -> Self {
        let svd = state.beta().clone().svd(true, true);
        let u = svd.u.expect("requested U");
        let v_t = svd.v_t.expect("requested V^T");

        let mut order: Vec<usize> = (0..svd.singular_values.len()).collect();
        order.sort_by(|&a, &b| svd.singular_values[b].total_cmp(&svd.singular_values[a]));

        let mut coefficients = Vec::with_capacity(order.len());
        let mut left_vectors = Vec::with_capacity(order.len());
        let mut right_vectors = Vec::with_capacity(order.len());
        for k in order {
            let mut left: DVector<Complex64> = u.column(k).into_owned();
            let mut right: DVector<Complex64> = v_t.row(k).transpose();
            let phase = leading_phase(&left);
            left *= phase.conj();
            right *= phase;
            coefficients.push(svd.singular_values[k]);
            left_vectors.push(left);
            right_vectors.push(right);
        }

        let support = support_len(&coefficients);
        let degenerate = coefficients[..support]
            .windows(2)
            .any(|w| (w[0] - w[1]).abs() < DEGEN_TOL);

        Self {
            coefficients,
            left_vectors,
            right_vectors,
            degenerate,
        }
    }

    /// Number of coefficients carrying nonzero weight (`c^2 > ZERO_TOL`).
    pub fn support_len(&self) -> usize {
        support_len(&self.coefficients)
    }

    pub fn reconstruct(&self) -> DMatrix<Complex64> {
        let n = self.left_vectors.first().map_or(0, |v| v.len());
        let m = self.right_vectors.first().map_or(0, |v| v.len());
        let mut out = DMatrix::zeros(n, m);
        for ((c, l), r) in self
            .coefficients
            .iter()
            .zip(&self.left_vectors)
            .zip(&self.right_vectors)
        {
            out += (l * r.transpose()).scale(*c);
        }
        out
    }
}

fn support_len(coefficients: &[f64]) -> usize {
    coefficients.iter().take_while(|c| *c * *c > ZERO_TOL).count()
}

/// Unit phase of the first component whose magnitude is significant
/// relative to the largest one.
fn leading_phase(v: &DVector<Complex64>) -> Complex64 {
    let max = v.iter().map(|x| x.norm()).fold(0.0, f64::max);
    v.iter()
        .find(|x| x.norm() > 1e-8 * max && x.norm() > 0.0)
        .map(|x| x / x.norm())
        .unwrap_or(Complex64::new(1.0, 0.0))
}

/// `rho = sum_i gamma_i Pi_i` over the distinct nonzero eigenvalues.
#[derive(Debug, Clone)]
pub struct SpectralDecomposition {
    /// Distinct eigenvalues, descending.
    pub eigenvalues: Vec<f64>,
    pub projectors: Vec<DMatrix<Complex64>>,
    pub multiplicities: Vec<usize>,
    /// Orthonormal eigenvectors spanning each projector's range.
    pub eigenvectors: Vec<Vec<DVector<Complex64>>>,
}

impl SpectralDecomposition {
    pub fn reconstruct(&self, dim: usize) -> DMatrix<Complex64> {
        let mut out = DMatrix::zeros(dim, dim);
        for (g, p) in self.eigenvalues.iter().zip(&self.projectors) {
            out += p.scale(*g);
        }
        out
    }

    /// Weight `Tr(rho Pi_i) = gamma_i * rank(Pi_i)` of each projector.
    pub fn weights(&self) -> Vec<f64> {
        self.eigenvalues
            .iter()
            .zip(&self.multiplicities)
            .map(|(g, k)| g * *k as f64)
            .collect()
    }
}

/// Spectral decomposition of a Hermitian matrix. Eigenvalues below
/// [`ZERO_TOL`] in magnitude are dropped; eigenvalues within [`DEGEN_TOL`]
/// of each other share one projector.
pub fn spectral_decompose_hermitian(matrix: &DMatrix<Complex64>) -> Result<SpectralDecomposition> {
    if !matrix.is_square() {
        return Err(Error::InvalidOperator(format!(
            "spectral decomposition needs a square matrix, got {:?}",
            matrix.shape()
        )));
    }
    let dev = hermitian_deviation(matrix);
    if dev > NORM_TOL {
        return Err(Error::InvalidOperator(format!(
            "not Hermitian (max deviation {dev:e})"
        )));
    }
    let eig = hermitize(matrix.clone()).symmetric_eigen();
    let mut pairs: Vec<(f64, DVector<Complex64>)> = eig
        .eigenvalues
        .iter()
        .zip(eig.eigenvectors.column_iter())
        .filter(|(g, _)| g.abs() >= ZERO_TOL)
        .map(|(g, v)| (*g, v.into_owned()))
        .collect();
    pairs.sort_by(|a, b| b.0.total_cmp(&a.0));

    let mut groups: Vec<Vec<(f64, DVector<Complex64>)>> = Vec::new();
    for pair in pairs {
        match groups.last_mut() {
            Some(g) if (g[0].0 - pair.0).abs() < DEGEN_TOL => g.push(pair),
            _ => groups.push(vec![pair]),
        }
    }

    let dim = matrix.nrows();
    let mut out = SpectralDecomposition {
        eigenvalues: Vec::with_capacity(groups.len()),
        projectors: Vec::with_capacity(groups.len()),
        multiplicities: Vec::with_capacity(groups.len()),
        eigenvectors: Vec::with_capacity(groups.len()),
    };
    for group in groups {
        let mean = group.iter().map(|(g, _)| g).sum::<f64>() / group.len() as f64;
        let mut proj = DMatrix::zeros(dim, dim);
        for (_, v) in &group {
            proj += v * v.adjoint();
        }
        out.eigenvalues.push(mean);
        out.multiplicities.push(group.len());
        out.projectors.push(proj);
        out.eigenvectors.push(group.into_iter().map(|(_, v)| v).collect());
    }
    Ok(out)
}
