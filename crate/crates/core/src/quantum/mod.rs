//! Finite-dimensional state algebra: pure states, system-pointer composites,
//! density operators, and the decompositions built on them.

mod decompose;

pub use decompose::{spectral_decompose_hermitian, SchmidtDecomposition, SpectralDecomposition};

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::tolerance::NORM_TOL;

pub(crate) fn default_labels(prefix: &str, n: usize) -> Vec<String> {
    (0..n).map(|i| format!("{prefix}{i}")).collect()
}

fn check_labels(len: usize, labels: &[String], what: &str) -> Result<()> {
    if labels.len() != len {
        return Err(Error::Shape(format!(
            "{what}: {} labels for dimension {len}",
            labels.len()
        )));
    }
    Ok(())
}

fn check_norm(norm_sq: f64) -> Result<()> {
    if (norm_sq - 1.0).abs() > NORM_TOL || !norm_sq.is_finite() {
        return Err(Error::NotNormalized { norm_sq });
    }
    Ok(())
}

/// Normalized amplitude vector of the measured system over a labeled
/// orthonormal eigenbasis `|a_i>`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PureState {
    amplitudes: Vec<Complex64>,
    labels: Vec<String>,
}

impl PureState {
    pub fn new(amplitudes: Vec<Complex64>, labels: Vec<String>) -> Result<Self> {
        if amplitudes.is_empty() {
            return Err(Error::InvalidDimension("state needs at least one amplitude".into()));
        }
        check_labels(amplitudes.len(), &labels, "pure state")?;
        check_norm(amplitudes.iter().map(|a| a.norm_sqr()).sum())?;
        Ok(Self { amplitudes, labels })
    }

    /// State with default labels `a0, a1, ...`.
    pub fn from_amplitudes(amplitudes: Vec<Complex64>) -> Result<Self> {
        let labels = default_labels("a", amplitudes.len());
        Self::new(amplitudes, labels)
    }

    pub fn from_real(amplitudes: &[f64]) -> Result<Self> {
        Self::from_amplitudes(amplitudes.iter().map(|&a| Complex64::new(a, 0.0)).collect())
    }

    /// Rescales arbitrary nonzero amplitudes to unit norm.
    pub fn normalized(amplitudes: Vec<Complex64>) -> Result<Self> {
        let norm = amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::NotNormalized { norm_sq: norm * norm });
        }
        Self::from_amplitudes(amplitudes.into_iter().map(|a| a / norm).collect())
    }

    /// Equiprobable standard state with every amplitude `sqrt(1/n)`.
    pub fn uniform(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidDimension("n must be at least 1".into()));
        }
        let a = Complex64::new((1.0 / n as f64).sqrt(), 0.0);
        Self::from_amplitudes(vec![a; n])
    }

    /// The eigenstate `|a_k>`.
    pub fn basis(n: usize, k: usize) -> Result<Self> {
        if k >= n {
            return Err(Error::Index { index: k, len: n });
        }
        let mut amps = vec![Complex64::new(0.0, 0.0); n];
        amps[k] = Complex64::new(1.0, 0.0);
        Self::from_amplitudes(amps)
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    /// Born weights `|alpha_i|^2`.
    pub fn probabilities(&self) -> Vec<f64> {
        self.amplitudes.iter().map(|a| a.norm_sqr()).collect()
    }
}

/// Composite system-pointer pure state `sum_ij beta_ij |a_i> (x) |p_j>`,
/// stored as an `n x m` matrix (rows: system, columns: pointer).
#[derive(Debug, Clone, PartialEq)]
pub struct BipartiteState {
    beta: DMatrix<Complex64>,
    system_labels: Vec<String>,
    pointer_labels: Vec<String>,
}

/// Which factor a partial trace removes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    System,
    Pointer,
}

impl BipartiteState {
    pub fn new(
        beta: DMatrix<Complex64>,
        system_labels: Vec<String>,
        pointer_labels: Vec<String>,
    ) -> Result<Self> {
        if beta.nrows() == 0 || beta.ncols() == 0 {
            return Err(Error::InvalidDimension("empty bipartite state".into()));
        }
        check_labels(beta.nrows(), &system_labels, "system")?;
        check_labels(beta.ncols(), &pointer_labels, "pointer")?;
        check_norm(beta.iter().map(|b| b.norm_sqr()).sum())?;
        Ok(Self {
            beta,
            system_labels,
            pointer_labels,
        })
    }

    pub fn from_matrix(beta: DMatrix<Complex64>) -> Result<Self> {
        let (n, m) = beta.shape();
        Self::new(beta, default_labels("a", n), default_labels("p", m))
    }

    /// Builds a state without the normalization check. Used for output of
    /// deliberately unphysical devices, which renormalize before calling.
    pub(crate) fn from_parts(
        beta: DMatrix<Complex64>,
        system_labels: Vec<String>,
        pointer_labels: Vec<String>,
    ) -> Self {
        Self {
            beta,
            system_labels,
            pointer_labels,
        }
    }

    /// Product state `|psi> (x) |p_index>` with `m` pointer outcomes.
    pub fn tensor_compose(sys: &PureState, pointer_index: usize, m: usize) -> Result<Self> {
        if pointer_index >= m {
            return Err(Error::Index {
                index: pointer_index,
                len: m,
            });
        }
        let n = sys.dim();
        let mut beta = DMatrix::zeros(n, m);
        for (i, a) in sys.amplitudes().iter().enumerate() {
            beta[(i, pointer_index)] = *a;
        }
        Ok(Self::from_parts(
            beta,
            sys.labels().to_vec(),
            default_labels("p", m),
        ))
    }

    pub fn beta(&self) -> &DMatrix<Complex64> {
        &self.beta
    }

    pub fn n(&self) -> usize {
        self.beta.nrows()
    }

    pub fn m(&self) -> usize {
        self.beta.ncols()
    }

    pub fn system_labels(&self) -> &[String] {
        &self.system_labels
    }

    pub fn pointer_labels(&self) -> &[String] {
        &self.pointer_labels
    }

    pub fn norm_sq(&self) -> f64 {
        self.beta.iter().map(|b| b.norm_sqr()).sum()
    }

    /// Reduced state after tracing out `side`.
    ///
    /// Tracing out the pointer gives `rho_S[i][i'] = sum_j beta_ij conj(beta_i'j)`;
    /// tracing out the system gives `rho_M[j][j'] = sum_i beta_ij conj(beta_ij')`.
    pub fn partial_trace(&self, side: Side) -> DensityOperator {
        let (matrix, labels) = match side {
            Side::Pointer => (&self.beta * self.beta.adjoint(), self.system_labels.clone()),
            Side::System => (
                self.beta.transpose() * self.beta.conjugate(),
                self.pointer_labels.clone(),
            ),
        };
        DensityOperator {
            matrix: hermitize(matrix),
            labels,
        }
    }

    /// Decoheres the state in the product basis: `sum_ij |beta_ij|^2 |a_i p_j><a_i p_j|`.
    /// The composite index is `i * m + j`.
    pub fn collapse_mixture(&self) -> DensityOperator {
        let (n, m) = self.beta.shape();
        let mut matrix = DMatrix::zeros(n * m, n * m);
        let mut labels = Vec::with_capacity(n * m);
        for i in 0..n {
            for j in 0..m {
                let idx = i * m + j;
                matrix[(idx, idx)] = Complex64::new(self.beta[(i, j)].norm_sqr(), 0.0);
                labels.push(format!("{}|{}", self.system_labels[i], self.pointer_labels[j]));
            }
        }
        DensityOperator { matrix, labels }
    }

    pub fn schmidt_decompose(&self) -> SchmidtDecomposition {
        SchmidtDecomposition::of(self)
    }

    /// Pointer marginal `Pr(p_j) = sum_i |beta_ij|^2`.
    pub fn pointer_distribution(&self) -> Vec<f64> {
        self.beta
            .column_iter()
            .map(|col| col.iter().map(|b| b.norm_sqr()).sum())
            .collect()
    }
}

fn hermitize(m: DMatrix<Complex64>) -> DMatrix<Complex64> {
    let adj = m.adjoint();
    (m + adj).scale(0.5)
}

/// Density operator on a labeled basis. Hermitian, unit trace, positive
/// semidefinite within [`NORM_TOL`].
#[derive(Debug, Clone, PartialEq)]
pub struct DensityOperator {
    matrix: DMatrix<Complex64>,
    labels: Vec<String>,
}

impl DensityOperator {
    pub fn new(matrix: DMatrix<Complex64>, labels: Vec<String>) -> Result<Self> {
        if !matrix.is_square() || matrix.nrows() == 0 {
            return Err(Error::InvalidOperator(format!(
                "density operator must be square and non-empty, got {:?}",
                matrix.shape()
            )));
        }
        check_labels(matrix.nrows(), &labels, "density operator")?;
        let herm_dev = hermitian_deviation(&matrix);
        if herm_dev > NORM_TOL {
            return Err(Error::InvalidOperator(format!(
                "not Hermitian (max deviation {herm_dev:e})"
            )));
        }
        let matrix = hermitize(matrix);
        let trace = matrix.trace().re;
        if (trace - 1.0).abs() > NORM_TOL {
            return Err(Error::InvalidOperator(format!("trace {trace} != 1")));
        }
        let min_eig = matrix
            .clone()
            .symmetric_eigenvalues()
            .iter()
            .cloned()
            .fold(f64::INFINITY, f64::min);
        if min_eig < -NORM_TOL {
            return Err(Error::InvalidOperator(format!(
                "negative eigenvalue {min_eig:e}"
            )));
        }
        Ok(Self { matrix, labels })
    }

    pub fn from_matrix(matrix: DMatrix<Complex64>) -> Result<Self> {
        let labels = default_labels("e", matrix.nrows());
        Self::new(matrix, labels)
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.matrix
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn trace(&self) -> f64 {
        self.matrix.trace().re
    }

    pub fn diagonal(&self) -> Vec<f64> {
        self.matrix.diagonal().iter().map(|d| d.re).collect()
    }

    /// Eigenvalues in descending order.
    pub fn eigenvalues(&self) -> Vec<f64> {
        let mut ev: Vec<f64> = self.matrix.clone().symmetric_eigenvalues().iter().cloned().collect();
        ev.sort_by(|a, b| b.total_cmp(a));
        ev
    }

    pub fn spectral_decompose(&self) -> Result<SpectralDecomposition> {
        spectral_decompose_hermitian(&self.matrix)
    }
}

pub(crate) fn hermitian_deviation(m: &DMatrix<Complex64>) -> f64 {
    let adj = m.adjoint();
    m.iter()
        .zip(adj.iter())
        .map(|(a, b)| (a - b).norm())
        .fold(0.0, f64::max)
}
