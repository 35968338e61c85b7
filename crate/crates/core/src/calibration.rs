//! Calibration: the channel matrix `Pr(p_j | a_k)` of a device, exactly and
//! from simulated frequency measurements.
//!
//! Sampling uses ChaCha8 as a counter-based generator. Shot `t` of stream
//! `s` is the `t`-th 64-bit word of stream `s` under the user seed, so every
//! (input, shot) pair has a fixed random draw no matter how the shots are
//! split across threads or how many are requested.

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::device::MeasurementDevice;
use crate::error::{Error, Result};
use crate::quantum::{default_labels, PureState};
use crate::tolerance::NORM_TOL;

/// Stream used by single and frequency measurements on arbitrary states.
/// Calibration of input `k` uses stream `k`.
pub const MEASUREMENT_STREAM: u64 = 1 << 32;

const CHUNK: u64 = 1 << 16;

/// Row-stochastic matrix, `probs[k][j] = Pr(p_j | a_k)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChannelMatrix {
    pub probs: Vec<Vec<f64>>,
    pub input_labels: Vec<String>,
    pub output_labels: Vec<String>,
    /// Raw counts when the matrix was estimated from samples.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub counts: Option<Vec<Vec<u64>>>,
}

impl ChannelMatrix {
    pub fn new(
        probs: Vec<Vec<f64>>,
        input_labels: Vec<String>,
        output_labels: Vec<String>,
    ) -> Result<Self> {
        let n = probs.len();
        if n == 0 {
            return Err(Error::InvalidDimension("channel needs at least one input".into()));
        }
        let m = probs[0].len();
        if m == 0 || probs.iter().any(|r| r.len() != m) {
            return Err(Error::Shape("channel rows must share a nonzero length".into()));
        }
        if input_labels.len() != n || output_labels.len() != m {
            return Err(Error::Shape("channel label count mismatch".into()));
        }
        for (k, row) in probs.iter().enumerate() {
            if row.iter().any(|p| !(-NORM_TOL..=1.0 + NORM_TOL).contains(p)) {
                return Err(Error::InvalidDistribution(format!(
                    "channel row {k} has an entry outside [0, 1]"
                )));
            }
            let sum: f64 = row.iter().sum();
            if (sum - 1.0).abs() > NORM_TOL {
                return Err(Error::InvalidDistribution(format!(
                    "channel row {k} sums to {sum}"
                )));
            }
        }
        Ok(Self {
            probs,
            input_labels,
            output_labels,
            counts: None,
        })
    }

    pub fn from_rows(probs: Vec<Vec<f64>>) -> Result<Self> {
        let n = probs.len();
        let m = probs.first().map_or(0, |r| r.len());
        Self::new(probs, default_labels("a", n), default_labels("p", m))
    }

    pub fn identity(n: usize) -> Result<Self> {
        Self::from_rows(
            (0..n)
                .map(|k| (0..n).map(|j| if j == k { 1.0 } else { 0.0 }).collect())
                .collect(),
        )
    }

    pub fn n(&self) -> usize {
        self.probs.len()
    }

    pub fn m(&self) -> usize {
        self.probs[0].len()
    }

    pub fn get(&self, k: usize, j: usize) -> f64 {
        self.probs[k][j]
    }

    pub fn max_abs_diff(&self, other: &ChannelMatrix) -> f64 {
        self.probs
            .iter()
            .flatten()
            .zip(other.probs.iter().flatten())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CalibrationReport {
    pub exact: ChannelMatrix,
    pub estimated: ChannelMatrix,
    pub shots_per_input: u64,
    pub seed: u64,
    pub max_abs_error: f64,
}

/// Empirical pointer distribution from repeated single measurements.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Frequencies {
    pub labels: Vec<String>,
    pub counts: Vec<u64>,
    pub frequencies: Vec<f64>,
    pub shots: u64,
    pub seed: u64,
}

/// `Pr(p_j | a_k) = sum_i |gamma[i][j][k]|^2`.
///
/// Rows of an unchecked (unphysical) device are rescaled to sum to one.
pub fn exact_channel(dev: &MeasurementDevice) -> Result<ChannelMatrix> {
    let probs = dev
        .responses()
        .iter()
        .map(|resp| {
            let row: Vec<f64> = resp
                .column_iter()
                .map(|col| col.iter().map(|g| g.norm_sqr()).sum())
                .collect();
            if dev.is_unchecked() {
                let total: f64 = row.iter().sum();
                if total == 0.0 {
                    return Err(Error::InvalidDevice("input with zero response".into()));
                }
                Ok(row.into_iter().map(|p| p / total).collect())
            } else {
                Ok(row)
            }
        })
        .collect::<Result<Vec<Vec<f64>>>>()?;
    ChannelMatrix::new(probs, dev.system_labels(), dev.pointer_labels())
}

fn uniform_draw(word: u64) -> f64 {
    (word >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// Inverse-CDF lookup of a uniform draw in `[0, 1)`.
fn categorical(probs: &[f64], u: f64) -> usize {
    let mut acc = 0.0;
    let mut last_positive = 0;
    for (j, p) in probs.iter().enumerate() {
        if *p > 0.0 {
            acc += p;
            last_positive = j;
            if u < acc {
                return j;
            }
        }
    }
    last_positive
}

fn stream_rng(seed: u64, stream: u64, shot: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    // one u64 = two 32-bit words
    rng.set_word_pos(2 * shot as u128);
    rng
}

fn count_chunk(probs: &[f64], seed: u64, stream: u64, start: u64, len: u64) -> Vec<u64> {
    let mut rng = stream_rng(seed, stream, start);
    let mut counts = vec![0u64; probs.len()];
    for _ in 0..len {
        counts[categorical(probs, uniform_draw(rng.next_u64()))] += 1;
    }
    counts
}

/// Histogram of `shots` draws from `probs` on `stream`. The result does not
/// depend on how the work is partitioned.
fn sample_counts(probs: &[f64], shots: u64, seed: u64, stream: u64) -> Vec<u64> {
    let chunks: Vec<(u64, u64)> = (0..shots.div_ceil(CHUNK))
        .map(|c| (c * CHUNK, CHUNK.min(shots - c * CHUNK)))
        .collect();
    let merge = |mut a: Vec<u64>, b: Vec<u64>| {
        a.iter_mut().zip(b).for_each(|(x, y)| *x += y);
        a
    };
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        chunks
            .par_iter()
            .map(|&(start, len)| count_chunk(probs, seed, stream, start, len))
            .reduce(|| vec![0; probs.len()], merge)
    }
    #[cfg(not(feature = "parallel"))]
    {
        chunks
            .iter()
            .map(|&(start, len)| count_chunk(probs, seed, stream, start, len))
            .fold(vec![0; probs.len()], merge)
    }
}

fn check_shots(shots: u64) -> Result<()> {
    if shots < 1 {
        return Err(Error::InvalidArgument("shots must be at least 1".into()));
    }
    Ok(())
}

/// Index of the pointer outcome registered in a single measurement.
pub fn sample_pointer_index(dev: &MeasurementDevice, input: &PureState, seed: u64) -> Result<usize> {
    let probs = dev.apply(input)?.pointer_distribution();
    let mut rng = stream_rng(seed, MEASUREMENT_STREAM, 0);
    Ok(categorical(&probs, uniform_draw(rng.next_u64())))
}

/// Label of the pointer outcome registered in a single measurement.
pub fn sample_pointer(dev: &MeasurementDevice, input: &PureState, seed: u64) -> Result<String> {
    let j = sample_pointer_index(dev, input, seed)?;
    Ok(dev.pointer_labels().swap_remove(j))
}

/// Repeats the single measurement `shots` times. The first shot agrees with
/// [`sample_pointer`] under the same seed.
pub fn frequency_measurement(
    dev: &MeasurementDevice,
    input: &PureState,
    shots: u64,
    seed: u64,
) -> Result<Frequencies> {
    check_shots(shots)?;
    let probs = dev.apply(input)?.pointer_distribution();
    let counts = sample_counts(&probs, shots, seed, MEASUREMENT_STREAM);
    Ok(Frequencies {
        labels: dev.pointer_labels(),
        frequencies: counts.iter().map(|c| *c as f64 / shots as f64).collect(),
        counts,
        shots,
        seed,
    })
}

/// Feeds each eigenstate `|a_k>` into the device `shots` times and records
/// the pointer frequencies as the estimated channel row `k`.
pub fn estimate_channel(dev: &MeasurementDevice, shots: u64, seed: u64) -> Result<CalibrationReport> {
    check_shots(shots)?;
    let exact = exact_channel(dev)?;
    let counts: Vec<Vec<u64>> = exact
        .probs
        .iter()
        .enumerate()
        .map(|(k, row)| sample_counts(row, shots, seed, k as u64))
        .collect();
    let probs = counts
        .iter()
        .map(|row| row.iter().map(|c| *c as f64 / shots as f64).collect())
        .collect();
    let mut estimated = ChannelMatrix::new(probs, exact.input_labels.clone(), exact.output_labels.clone())?;
    estimated.counts = Some(counts);
    let max_abs_error = exact.max_abs_diff(&estimated);
    Ok(CalibrationReport {
        exact,
        estimated,
        shots_per_input: shots,
        seed,
        max_abs_error,
    })
}

/// Classical push-forward `out[j] = sum_k source[k] Pr(p_j | a_k)`.
pub fn classical_prediction(ch: &ChannelMatrix, source: &[f64]) -> Result<Vec<f64>> {
    if source.len() != ch.n() {
        return Err(Error::Dimension {
            expected: ch.n(),
            actual: source.len(),
        });
    }
    let sum: f64 = source.iter().sum();
    if (sum - 1.0).abs() > NORM_TOL || source.iter().any(|p| *p < -NORM_TOL) {
        return Err(Error::InvalidDistribution(format!("source sums to {sum}")));
    }
    Ok((0..ch.m())
        .map(|j| source.iter().zip(&ch.probs).map(|(s, row)| s * row[j]).sum())
        .collect())
}

/// `max_j |Pr_quantum(p_j) - Pr_classical(p_j)|`: how far the pointer
/// statistics of a superposed input depart from pushing the Born weights
/// `|alpha_k|^2` through the calibrated channel.
pub fn interference_gap(dev: &MeasurementDevice, input: &PureState) -> Result<f64> {
    let quantum = dev.apply(input)?.pointer_distribution();
    let classical = classical_prediction(&exact_channel(dev)?, &input.probabilities())?;
    Ok(quantum
        .iter()
        .zip(&classical)
        .map(|(q, c)| (q - c).abs())
        .fold(0.0, f64::max))
}
