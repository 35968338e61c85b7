//! Measuring devices as response tensors.
//!
//! Feeding the eigenstate `|a_k> (x) |p_0>` into the device yields
//! `sum_ij gamma[i][j][k] |a_i> (x) |p_j>`. The tensor is stored as one
//! `n x m` response matrix per input index `k`.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quantum::{default_labels, BipartiteState, PureState};
use crate::tolerance::PHYS_TOL;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DeviceKind {
    Ideal,
    Imperfect,
    Disturbing,
    Generic,
}

impl std::fmt::Display for DeviceKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            DeviceKind::Ideal => "ideal",
            DeviceKind::Imperfect => "imperfect",
            DeviceKind::Disturbing => "disturbing",
            DeviceKind::Generic => "generic",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub ok: bool,
    /// Largest entry of `|Gram - I|` over the input columns.
    pub max_deviation: f64,
    /// The device was built with the physicality check disabled.
    pub unchecked: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MeasurementDevice {
    name: String,
    kind: DeviceKind,
    n: usize,
    m: usize,
    responses: Vec<DMatrix<Complex64>>,
    unchecked: bool,
}

fn zero() -> Complex64 {
    Complex64::new(0.0, 0.0)
}

fn one() -> Complex64 {
    Complex64::new(1.0, 0.0)
}

impl MeasurementDevice {
    /// Builds a device from its response matrices (`responses[k][(i, j)]`).
    ///
    /// With `unchecked` set the isometry test is skipped and the device is
    /// marked unphysical wherever it is reported.
    pub fn from_responses(
        name: impl Into<String>,
        kind: DeviceKind,
        responses: Vec<DMatrix<Complex64>>,
        unchecked: bool,
    ) -> Result<Self> {
        let n = responses.len();
        if n == 0 {
            return Err(Error::InvalidDimension("device needs n >= 1".into()));
        }
        let (rows, m) = responses[0].shape();
        if responses.iter().any(|r| r.shape() != (n, m)) || rows != n {
            return Err(Error::Shape(format!(
                "every response must be {n} x {m} (system x pointer)"
            )));
        }
        if m < n {
            return Err(Error::InvalidDimension(format!(
                "pointer outcome count m = {m} must be at least n = {n}"
            )));
        }
        let dev = Self {
            name: name.into(),
            kind,
            n,
            m,
            responses,
            unchecked,
        };
        if !unchecked {
            let report = dev.validate();
            if !report.ok {
                return Err(Error::NotAnIsometry {
                    max_deviation: report.max_deviation,
                });
            }
        }
        Ok(dev)
    }

    /// Perfect correlation: `gamma[i][j][k] = delta_ji delta_ik`.
    pub fn make_ideal(n: usize) -> Result<Self> {
        if n < 1 {
            return Err(Error::InvalidDimension("n must be at least 1".into()));
        }
        let responses = (0..n)
            .map(|k| DMatrix::from_fn(n, n, |i, j| if i == k && j == k { one() } else { zero() }))
            .collect();
        Self::from_responses(format!("ideal-{n}"), DeviceKind::Ideal, responses, false)
    }

    /// Non-disturbing but imperfect: the system eigenstate is kept and the
    /// pointer lands on `p_j` with amplitude `cross[(k, j)]`.
    pub fn make_imperfect(n: usize, cross: &DMatrix<Complex64>) -> Result<Self> {
        if n < 1 || cross.nrows() != n {
            return Err(Error::InvalidDimension(format!(
                "cross matrix has {} rows, expected n = {n}",
                cross.nrows()
            )));
        }
        for (k, row) in cross.row_iter().enumerate() {
            let norm_sq: f64 = row.iter().map(|c| c.norm_sqr()).sum();
            if (norm_sq - 1.0).abs() > PHYS_TOL {
                return Err(Error::InvalidDevice(format!(
                    "cross row {k} has squared norm {norm_sq}"
                )));
            }
        }
        let m = cross.ncols();
        let responses = (0..n)
            .map(|k| DMatrix::from_fn(n, m, |i, j| if i == k { cross[(k, j)] } else { zero() }))
            .collect();
        Self::from_responses(format!("imperfect-{n}"), DeviceKind::Imperfect, responses, false)
    }

    /// Perfect pointer tracking with disturbed system states:
    /// `|a_k> (x) |p_0> -> |a_k^d> (x) |p_k>`. The disturbed vectors need
    /// not be orthogonal.
    pub fn make_disturbing(n: usize, disturbed: &[Vec<Complex64>]) -> Result<Self> {
        if n < 1 || disturbed.len() != n {
            return Err(Error::InvalidDimension(format!(
                "expected {n} disturbed vectors, got {}",
                disturbed.len()
            )));
        }
        for (k, v) in disturbed.iter().enumerate() {
            if v.len() != n {
                return Err(Error::Dimension {
                    expected: n,
                    actual: v.len(),
                });
            }
            let norm_sq: f64 = v.iter().map(|c| c.norm_sqr()).sum();
            if (norm_sq - 1.0).abs() > PHYS_TOL {
                return Err(Error::InvalidDevice(format!(
                    "disturbed vector {k} has squared norm {norm_sq}"
                )));
            }
        }
        let responses = (0..n)
            .map(|k| DMatrix::from_fn(n, n, |i, j| if j == k { disturbed[k][i] } else { zero() }))
            .collect();
        Self::from_responses(format!("disturbing-{n}"), DeviceKind::Disturbing, responses, false)
    }

    /// Generic device from the isometry columns: `columns[k][i * m + j]`
    /// is the amplitude of `|a_i> (x) |p_j>` produced by input `k`.
    pub fn from_unitary(n: usize, m: usize, columns: &[Vec<Complex64>]) -> Result<Self> {
        if n < 1 || m < n {
            return Err(Error::InvalidDimension(format!("need 1 <= n <= m, got n={n}, m={m}")));
        }
        if columns.len() != n {
            return Err(Error::Dimension {
                expected: n,
                actual: columns.len(),
            });
        }
        if let Some(bad) = columns.iter().find(|c| c.len() != n * m) {
            return Err(Error::Dimension {
                expected: n * m,
                actual: bad.len(),
            });
        }
        let responses = columns
            .iter()
            .map(|col| DMatrix::from_fn(n, m, |i, j| col[i * m + j]))
            .collect();
        Self::from_responses(format!("generic-{n}x{m}"), DeviceKind::Generic, responses, false)
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn kind(&self) -> DeviceKind {
        self.kind
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn is_unchecked(&self) -> bool {
        self.unchecked
    }

    /// `gamma[i][j][k]`.
    pub fn gamma(&self, i: usize, j: usize, k: usize) -> Complex64 {
        self.responses[k][(i, j)]
    }

    /// Response matrix for input eigenstate `k`.
    pub fn response(&self, k: usize) -> &DMatrix<Complex64> {
        &self.responses[k]
    }

    pub fn responses(&self) -> &[DMatrix<Complex64>] {
        &self.responses
    }

    pub fn system_labels(&self) -> Vec<String> {
        default_labels("a", self.n)
    }

    pub fn pointer_labels(&self) -> Vec<String> {
        default_labels("p", self.m)
    }

    /// Gram matrix of the input columns, `G[k][k'] = sum_ij conj(gamma^k_ij) gamma^k'_ij`.
    pub fn gram(&self) -> DMatrix<Complex64> {
        DMatrix::from_fn(self.n, self.n, |k, kp| {
            self.responses[k]
                .iter()
                .zip(self.responses[kp].iter())
                .map(|(a, b)| a.conj() * b)
                .sum()
        })
    }

    pub fn validate(&self) -> ValidationReport {
        let gram = self.gram();
        let max_deviation = gram
            .iter()
            .enumerate()
            .map(|(idx, g)| {
                // column-major: idx = k' * n + k
                let (k, kp) = (idx % self.n, idx / self.n);
                let target = if k == kp { one() } else { zero() };
                (g - target).norm()
            })
            .fold(0.0, f64::max);
        ValidationReport {
            ok: max_deviation <= PHYS_TOL,
            max_deviation,
            unchecked: self.unchecked,
        }
    }

    /// Composite state `beta_ij = sum_k alpha_k gamma[i][j][k]`.
    ///
    /// Output of an unchecked device is rescaled to unit norm.
    pub fn apply(&self, input: &PureState) -> Result<BipartiteState> {
        if input.dim() != self.n {
            return Err(Error::Dimension {
                expected: self.n,
                actual: input.dim(),
            });
        }
        let mut beta = DMatrix::zeros(self.n, self.m);
        for (alpha, resp) in input.amplitudes().iter().zip(&self.responses) {
            beta += resp * *alpha;
        }
        if self.unchecked {
            let norm = beta.iter().map(|b| b.norm_sqr()).sum::<f64>().sqrt();
            if norm == 0.0 {
                return Err(Error::InvalidDevice(
                    "unphysical device annihilates the input state".into(),
                ));
            }
            beta /= Complex64::new(norm, 0.0);
        }
        Ok(BipartiteState::from_parts(
            beta,
            input.labels().to_vec(),
            self.pointer_labels(),
        ))
    }
}

/// Report-valued physicality check.
pub fn validate_device(dev: &MeasurementDevice) -> ValidationReport {
    dev.validate()
}

pub fn apply_device(dev: &MeasurementDevice, input: &PureState) -> Result<BipartiteState> {
    dev.apply(input)
}

/// `Pr(p_j) = sum_i |beta_ij|^2`.
pub fn pointer_distribution(state: &BipartiteState) -> Vec<f64> {
    state.pointer_distribution()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MhiReport {
    /// `sum_{n != i} |beta_ni|^2 / |beta_ii|^2` per pointer outcome.
    #[serde(with = "crate::io::extended_f64_vec")]
    pub ratios: Vec<f64>,
    pub delta: f64,
    pub reliable: bool,
}

/// State-dependent reliability test on the composite state: outcome `i` is
/// trustworthy when the mass in column `i` away from the diagonal is small
/// compared to `|beta_ii|^2`. The ratio is infinite when `beta_ii = 0` but
/// the column is not, and zero for an empty column.
pub fn mhi_reliability(state: &BipartiteState, delta: f64) -> Result<MhiReport> {
    let (n, m) = (state.n(), state.m());
    if n != m {
        return Err(Error::Shape(format!(
            "MHI criterion needs a square state, got {n} x {m}"
        )));
    }
    let beta = state.beta();
    let ratios: Vec<f64> = (0..n)
        .map(|i| {
            let diag = beta[(i, i)].norm_sqr();
            let off: f64 = (0..n).filter(|&r| r != i).map(|r| beta[(r, i)].norm_sqr()).sum();
            if off == 0.0 {
                0.0
            } else if diag == 0.0 {
                f64::INFINITY
            } else {
                off / diag
            }
        })
        .collect();
    let reliable = ratios.iter().all(|r| *r <= delta);
    Ok(MhiReport {
        ratios,
        delta,
        reliable,
    })
}

/// Ready-made devices used by the demo and the tests.
pub mod showcase {
    use super::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    /// Two-outcome imperfect device whose channel is the binary symmetric
    /// channel with flip probability `q`.
    pub fn symmetric_imperfect(q: f64) -> Result<MeasurementDevice> {
        if !(0.0..=1.0).contains(&q) {
            return Err(Error::InvalidArgument(format!("flip probability {q} outside [0, 1]")));
        }
        let (a, b) = ((1.0 - q).sqrt(), q.sqrt());
        let cross = DMatrix::from_row_slice(2, 2, &[c(a), c(b), c(b), c(a)]);
        Ok(MeasurementDevice::make_imperfect(2, &cross)?.with_name(format!("bsc-q{q}")))
    }

    /// Generic two-level device whose two outputs share system index 0, so
    /// superposed inputs interfere at the pointer:
    /// `v1 = (sqrt(1-q), sqrt(q), 0, 0)`, `v2 = (sqrt(q), -sqrt(1-q), 0, 0)`.
    pub fn interference(q: f64) -> Result<MeasurementDevice> {
        if !(0.0..=1.0).contains(&q) {
            return Err(Error::InvalidArgument(format!("mixing parameter {q} outside [0, 1]")));
        }
        let (a, b) = ((1.0 - q).sqrt(), q.sqrt());
        let cols = vec![vec![c(a), c(b), c(0.0), c(0.0)], vec![c(b), c(-a), c(0.0), c(0.0)]];
        Ok(MeasurementDevice::from_unitary(2, 2, &cols)?.with_name(format!("interference-q{q}")))
    }

    /// Two-level disturbing device: `|a_0> -> |a_0>`, `|a_1> -> cos t |a_1> + sin t |a_0>`.
    pub fn disturbing_rotation(theta: f64) -> Result<MeasurementDevice> {
        let d = vec![
            vec![c(1.0), c(0.0)],
            vec![c(theta.sin()), c(theta.cos())],
        ];
        Ok(MeasurementDevice::make_disturbing(2, &d)?.with_name(format!("disturbing-t{theta}")))
    }
}
