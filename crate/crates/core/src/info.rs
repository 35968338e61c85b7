//! Shannon analysis of a source/channel pair. All quantities are in bits.
//!
//! With source `S` (the measured state's eigenvalue distribution) and
//! destination `D` (the pointer), the channel matrix `p(d_j | s_i)` gives
//! the joint `p(s_i, d_j)`, from which follow equivocation `E = H(S|D)`,
//! noise `N = H(D|S)` and mutual information `H(S;D) = H(S) - E = H(D) - N`.

use serde::{Deserialize, Serialize};

use crate::calibration::{exact_channel, ChannelMatrix};
use crate::device::MeasurementDevice;
use crate::error::{Error, Result};
use crate::quantum::default_labels;
use crate::tolerance::NORM_TOL;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SourceDistribution {
    pub probs: Vec<f64>,
    pub labels: Vec<String>,
}

impl SourceDistribution {
    pub fn new(probs: Vec<f64>, labels: Vec<String>) -> Result<Self> {
        if probs.is_empty() || probs.len() != labels.len() {
            return Err(Error::InvalidDistribution(format!(
                "{} probabilities with {} labels",
                probs.len(),
                labels.len()
            )));
        }
        validate_distribution(&probs)?;
        Ok(Self { probs, labels })
    }

    pub fn from_probs(probs: Vec<f64>) -> Result<Self> {
        let labels = default_labels("s", probs.len());
        Self::new(probs, labels)
    }

    /// Equiprobable source, `p(s_i) = 1/n`.
    pub fn uniform(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidDimension("empty source".into()));
        }
        Self::from_probs(vec![1.0 / n as f64; n])
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }
}

fn validate_distribution(probs: &[f64]) -> Result<()> {
    if probs.iter().any(|p| !(-NORM_TOL..=1.0 + NORM_TOL).contains(p)) {
        return Err(Error::InvalidDistribution("entry outside [0, 1]".into()));
    }
    let sum: f64 = probs.iter().sum();
    if (sum - 1.0).abs() > NORM_TOL {
        return Err(Error::InvalidDistribution(format!("sums to {sum}")));
    }
    Ok(())
}

/// Joint distribution `p(s_i, d_j)` with both marginals.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JointDistribution {
    pub joint: Vec<Vec<f64>>,
    pub source: Vec<f64>,
    pub destination: Vec<f64>,
}

impl JointDistribution {
    pub fn from_matrix(joint: Vec<Vec<f64>>) -> Result<Self> {
        let m = joint.first().map_or(0, |r| r.len());
        if m == 0 || joint.iter().any(|r| r.len() != m) {
            return Err(Error::Shape("joint rows must share a nonzero length".into()));
        }
        if joint.iter().flatten().any(|p| *p < 0.0 || !p.is_finite()) {
            return Err(Error::InvalidDistribution("negative joint probability".into()));
        }
        let source: Vec<f64> = joint.iter().map(|r| r.iter().sum()).collect();
        let destination: Vec<f64> = (0..m).map(|j| joint.iter().map(|r| r[j]).sum()).collect();
        validate_distribution(&source)?;
        Ok(Self {
            joint,
            source,
            destination,
        })
    }

    pub fn n(&self) -> usize {
        self.source.len()
    }

    pub fn m(&self) -> usize {
        self.destination.len()
    }
}

/// `-log2 p`, the information generated by an event of probability `p`.
pub fn surprisal(p: f64) -> Result<f64> {
    if !(p > 0.0 && p <= 1.0 + NORM_TOL) {
        return Err(Error::Domain(format!("surprisal of probability {p}")));
    }
    Ok(-p.log2())
}

/// `-p log2 p` with `0 log 0 = 0`.
fn plogp(p: f64) -> f64 {
    if p > 0.0 {
        -p * p.log2()
    } else {
        0.0
    }
}

pub fn entropy_of(probs: &[f64]) -> f64 {
    probs.iter().map(|p| plogp(*p)).sum()
}

pub fn entropy(dist: &SourceDistribution) -> f64 {
    entropy_of(&dist.probs)
}

/// `p(s_i, d_j) = p(d_j | s_i) p(s_i)`.
pub fn joint_distribution(source: &SourceDistribution, ch: &ChannelMatrix) -> Result<JointDistribution> {
    if source.len() != ch.n() {
        return Err(Error::Dimension {
            expected: ch.n(),
            actual: source.len(),
        });
    }
    let joint = source
        .probs
        .iter()
        .zip(&ch.probs)
        .map(|(p, row)| row.iter().map(|c| p * c).collect())
        .collect();
    JointDistribution::from_matrix(joint)
}

/// `E = -sum_j p(d_j) sum_i p(s_i|d_j) log2 p(s_i|d_j)`, with the backward
/// probabilities from Bayes' rule. Destinations of zero probability are
/// skipped.
pub fn equivocation(joint: &JointDistribution) -> f64 {
    joint
        .destination
        .iter()
        .enumerate()
        .filter(|(_, pd)| **pd > 0.0)
        .map(|(j, pd)| {
            let h: f64 = joint.joint.iter().map(|row| plogp(row[j] / pd)).sum();
            pd * h
        })
        .sum()
}

/// `N = -sum_i p(s_i) sum_j p(d_j|s_i) log2 p(d_j|s_i)`.
pub fn noise(joint: &JointDistribution) -> f64 {
    joint
        .source
        .iter()
        .zip(&joint.joint)
        .filter(|(ps, _)| **ps > 0.0)
        .map(|(ps, row)| ps * row.iter().map(|p| plogp(p / ps)).sum::<f64>())
        .sum()
}

/// `-sum_ij p(s_i, d_j) log2 p(s_i, d_j)`.
pub fn joint_entropy(joint: &JointDistribution) -> f64 {
    joint.joint.iter().flatten().map(|p| plogp(*p)).sum()
}

/// Mutual information computed both as `H(S) - E` and `H(D) - N`; the two
/// must agree within [`NORM_TOL`].
pub fn mutual_information(joint: &JointDistribution) -> Result<f64> {
    let via_source = entropy_of(&joint.source) - equivocation(joint);
    let via_destination = entropy_of(&joint.destination) - noise(joint);
    if (via_source - via_destination).abs() > NORM_TOL {
        return Err(Error::NumericalInconsistency(format!(
            "H(S) - E = {via_source} but H(D) - N = {via_destination}"
        )));
    }
    Ok(via_source.max(0.0))
}

/// Mutual information of the channel under the equiprobable source,
/// normalized by `log2 n`. Equals 1 for the identity channel.
pub fn reliability_index(ch: &ChannelMatrix) -> Result<f64> {
    let n = ch.n();
    if n < 2 {
        return Err(Error::Domain("reliability index needs n >= 2".into()));
    }
    let joint = joint_distribution(&SourceDistribution::uniform(n)?, ch)?;
    Ok(mutual_information(&joint)? / (n as f64).log2())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Classification {
    Deterministic,
    Noisy,
    Equivocal,
    NoisyAndEquivocal,
}

impl Classification {
    pub fn from_bits(equivocation: f64, noise: f64, epsilon_bits: f64) -> Self {
        match (noise > epsilon_bits, equivocation > epsilon_bits) {
            (false, false) => Classification::Deterministic,
            (true, false) => Classification::Noisy,
            (false, true) => Classification::Equivocal,
            (true, true) => Classification::NoisyAndEquivocal,
        }
    }

    pub fn is_noisy(self) -> bool {
        matches!(self, Classification::Noisy | Classification::NoisyAndEquivocal)
    }

    pub fn is_equivocal(self) -> bool {
        matches!(self, Classification::Equivocal | Classification::NoisyAndEquivocal)
    }
}

impl std::fmt::Display for Classification {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Classification::Deterministic => "deterministic",
            Classification::Noisy => "noisy",
            Classification::Equivocal => "equivocal",
            Classification::NoisyAndEquivocal => "noisy_and_equivocal",
        })
    }
}

pub fn classify_channel(
    ch: &ChannelMatrix,
    source: &SourceDistribution,
    epsilon_bits: f64,
) -> Result<Classification> {
    let joint = joint_distribution(source, ch)?;
    Ok(Classification::from_bits(
        equivocation(&joint),
        noise(&joint),
        epsilon_bits,
    ))
}

/// `max_{k,j} |Pr(p_j|a_k) - delta_jk|`, defined for any `m >= n`.
pub fn triviality_deviation(ch: &ChannelMatrix) -> f64 {
    ch.probs
        .iter()
        .enumerate()
        .flat_map(|(k, row)| {
            row.iter()
                .enumerate()
                .map(move |(j, p)| (p - if j == k { 1.0 } else { 0.0 }).abs())
        })
        .fold(0.0, f64::max)
}

/// State-independent criterion: the channel is approximately trivial,
/// `Pr(p_j|a_k) ~ delta_jk` within `epsilon`.
pub fn channel_reliable(ch: &ChannelMatrix, epsilon: f64) -> Result<bool> {
    if ch.n() != ch.m() {
        return Err(Error::Shape(format!(
            "channel reliability needs a square channel, got {} x {}",
            ch.n(),
            ch.m()
        )));
    }
    Ok(triviality_deviation(ch) <= epsilon)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InfoReport {
    pub h_source: f64,
    pub h_destination: f64,
    pub equivocation: f64,
    pub noise: f64,
    pub mutual: f64,
    /// Joint entropy `H(S, D)`; reported for inspection only.
    pub joint_entropy: f64,
    pub reliability: f64,
    pub classification: Classification,
    pub channel_reliable: bool,
    pub triviality_deviation: f64,
    pub epsilon: f64,
    pub epsilon_bits: f64,
}

/// Shannon report of a channel under the equiprobable standard source.
pub fn analyze_channel(ch: &ChannelMatrix, epsilon: f64, epsilon_bits: f64) -> Result<InfoReport> {
    let source = SourceDistribution::uniform(ch.n())?;
    let joint = joint_distribution(&source, ch)?;
    let e = equivocation(&joint);
    let nz = noise(&joint);
    let mutual = mutual_information(&joint)?;
    let deviation = triviality_deviation(ch);
    Ok(InfoReport {
        h_source: entropy(&source),
        h_destination: entropy_of(&joint.destination),
        equivocation: e,
        noise: nz,
        mutual,
        joint_entropy: joint_entropy(&joint),
        reliability: reliability_index(ch)?,
        classification: Classification::from_bits(e, nz, epsilon_bits),
        channel_reliable: deviation <= epsilon,
        triviality_deviation: deviation,
        epsilon,
        epsilon_bits,
    })
}

/// Full device analysis: exact channel, then [`analyze_channel`].
pub fn analyze(dev: &MeasurementDevice, epsilon: f64, epsilon_bits: f64) -> Result<InfoReport> {
    analyze_channel(&exact_channel(dev)?, epsilon, epsilon_bits)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::device::showcase::symmetric_imperfect;

    fn binary_entropy(q: f64) -> f64 {
        -q * q.log2() - (1.0 - q) * (1.0 - q).log2()
    }

    fn bsc(q: f64) -> ChannelMatrix {
        ChannelMatrix::from_rows(vec![vec![1.0 - q, q], vec![q, 1.0 - q]]).unwrap()
    }

    #[test]
    fn surprisal_values() {
        assert_eq!(surprisal(1.0).unwrap(), 0.0);
        assert_eq!(surprisal(0.5).unwrap(), 1.0);
        assert_eq!(surprisal(0.25).unwrap(), 2.0);
        assert!(matches!(surprisal(0.0), Err(Error::Domain(_))));
        assert!(surprisal(-0.1).is_err());
    }

    #[test]
    fn entropy_values() {
        assert_eq!(entropy(&SourceDistribution::uniform(4).unwrap()), 2.0);
        assert_eq!(entropy(&SourceDistribution::from_probs(vec![0.0, 1.0, 0.0]).unwrap()), 0.0);
        let h = entropy(&SourceDistribution::from_probs(vec![0.9, 0.1]).unwrap());
        assert!((h - 0.468_995_593_589_281_16).abs() < 1e-12);
    }

    #[test]
    fn joint_examples() {
        let u = SourceDistribution::uniform(2).unwrap();
        let j = joint_distribution(&u, &ChannelMatrix::identity(2).unwrap()).unwrap();
        assert_eq!(j.joint, vec![vec![0.5, 0.0], vec![0.0, 0.5]]);
        let j = joint_distribution(&u, &bsc(0.1)).unwrap();
        for (row, want) in j.joint.iter().zip([[0.45, 0.05], [0.05, 0.45]]) {
            for (a, b) in row.iter().zip(want) {
                assert!((a - b).abs() < 1e-15);
            }
        }
        assert!((j.destination[0] - 0.5).abs() < 1e-15);
        assert!(matches!(
            joint_distribution(&SourceDistribution::uniform(3).unwrap(), &bsc(0.1)),
            Err(Error::Dimension { .. })
        ));
    }

    #[test]
    fn bsc_quantities() {
        let u = SourceDistribution::uniform(2).unwrap();
        let j = joint_distribution(&u, &bsc(0.1)).unwrap();
        let h = binary_entropy(0.1);
        // direct Bayes evaluation for one column: p(s|d0) = (0.9, 0.1)
        assert!((equivocation(&j) - h).abs() < 1e-12);
        assert!((noise(&j) - h).abs() < 1e-12);
        assert!((mutual_information(&j).unwrap() - (1.0 - h)).abs() < 1e-12);
        assert!((reliability_index(&bsc(0.1)).unwrap() - 0.531_004_406_410_718_8).abs() < 1e-12);
    }

    #[test]
    fn extremal_channels() {
        let src = SourceDistribution::from_probs(vec![0.2, 0.5, 0.3]).unwrap();
        let constant = ChannelMatrix::from_rows(vec![vec![0.6, 0.4]; 3]).unwrap();
        let j = joint_distribution(&src, &constant).unwrap();
        assert!((equivocation(&j) - entropy(&src)).abs() < 1e-12);
        assert!((noise(&j) - binary_entropy(0.4)).abs() < 1e-12);
        assert!(mutual_information(&j).unwrap().abs() < 1e-12);
        assert!(reliability_index(&constant).unwrap().abs() < 1e-12);

        let j = joint_distribution(&src, &ChannelMatrix::identity(3).unwrap()).unwrap();
        assert_eq!(equivocation(&j), 0.0);
        assert_eq!(noise(&j), 0.0);
        assert_eq!(reliability_index(&ChannelMatrix::identity(3).unwrap()).unwrap(), 1.0);
    }

    #[test]
    fn reliability_needs_two_inputs() {
        assert!(matches!(
            reliability_index(&ChannelMatrix::identity(1).unwrap()),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn mutual_information_detects_inconsistency() {
        // marginals that do not match the joint table
        let j = JointDistribution {
            joint: vec![vec![0.5, 0.0], vec![0.0, 0.5]],
            source: vec![0.5, 0.5],
            destination: vec![0.9, 0.1],
        };
        assert!(matches!(
            mutual_information(&j),
            Err(Error::NumericalInconsistency(_))
        ));
    }

    #[test]
    fn classification_examples() {
        let u = SourceDistribution::uniform(2).unwrap();
        assert_eq!(
            classify_channel(&ChannelMatrix::identity(2).unwrap(), &u, 1e-9).unwrap(),
            Classification::Deterministic
        );
        assert_eq!(
            classify_channel(&bsc(0.1), &u, 1e-9).unwrap(),
            Classification::NoisyAndEquivocal
        );
        let skew = ChannelMatrix::from_rows(vec![vec![1.0, 0.0], vec![0.5, 0.5]]).unwrap();
        let c = classify_channel(&skew, &u, 1e-9).unwrap();
        assert!(c.is_noisy() && c.is_equivocal());
        let point = SourceDistribution::from_probs(vec![1.0, 0.0]).unwrap();
        assert_eq!(
            classify_channel(&skew, &point, 1e-9).unwrap(),
            Classification::Deterministic
        );
        // merging channel: noiseless but equivocal
        let merge = ChannelMatrix::from_rows(vec![vec![1.0], vec![1.0]]).unwrap();
        assert_eq!(classify_channel(&merge, &u, 1e-9).unwrap(), Classification::Equivocal);
        // splitting channel: noisy but not equivocal
        let split = ChannelMatrix::from_rows(vec![vec![0.5, 0.5, 0.0, 0.0], vec![0.0, 0.0, 0.5, 0.5]])
            .unwrap();
        assert_eq!(classify_channel(&split, &u, 1e-9).unwrap(), Classification::Noisy);
    }

    #[test]
    fn channel_reliable_examples() {
        assert!(channel_reliable(&ChannelMatrix::identity(3).unwrap(), 0.0).unwrap());
        assert!(!channel_reliable(&bsc(0.1), 0.05).unwrap());
        assert!(channel_reliable(&bsc(0.1), 0.15).unwrap());
        let rect = ChannelMatrix::from_rows(vec![vec![1.0, 0.0, 0.0], vec![0.0, 1.0, 0.0]]).unwrap();
        assert!(matches!(channel_reliable(&rect, 0.1), Err(Error::Shape(_))));
    }

    #[test]
    fn analyze_examples() {
        let r = analyze(&MeasurementDevice::make_ideal(4).unwrap(), 0.05, 1e-9).unwrap();
        assert_eq!(r.h_source, 2.0);
        assert_eq!((r.equivocation, r.noise, r.reliability), (0.0, 0.0, 1.0));
        assert_eq!(r.classification, Classification::Deterministic);
        assert!(r.channel_reliable);
        assert_eq!(r.joint_entropy, 2.0);

        let r = analyze(&symmetric_imperfect(0.1).unwrap(), 0.05, 1e-9).unwrap();
        assert!((r.reliability - 0.5310).abs() < 1e-4);
        assert_eq!(r.classification, Classification::NoisyAndEquivocal);
        assert!(!r.channel_reliable);

        let r05 = analyze(&symmetric_imperfect(0.05).unwrap(), 0.05, 1e-9).unwrap();
        let r20 = analyze(&symmetric_imperfect(0.2).unwrap(), 0.05, 1e-9).unwrap();
        assert!(r05.reliability > r20.reliability);
    }
}
