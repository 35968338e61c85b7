//! Device and scenario files, composite reports, and report emission.
//!
//! Complex numbers are written as `[re, im]` pairs. A device file holds the
//! response tensor as nested arrays indexed `gamma[i][j][k]` (system out,
//! pointer, system in).

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::calibration::{
    classical_prediction, estimate_channel, exact_channel, interference_gap, CalibrationReport,
    ChannelMatrix,
};
use crate::device::{mhi_reliability, DeviceKind, MeasurementDevice, MhiReport, ValidationReport};
use crate::error::{Error, Result};
use crate::info::{analyze_channel, InfoReport};
use crate::interpretation::{ascription_comparison, AscriptionComparison};
use crate::quantum::PureState;
use crate::tolerance::{DEFAULT_DELTA, DEFAULT_EPSILON, DEFAULT_EPSILON_BITS};

/// Serde adapter for `Vec<f64>` that keeps infinities and NaN, which plain
/// JSON numbers cannot carry. Non-finite values become the strings `"inf"`,
/// `"-inf"` and `"nan"`.
pub mod extended_f64_vec {
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    #[derive(Serialize, Deserialize)]
    #[serde(untagged)]
    enum Repr {
        Num(f64),
        Text(String),
    }

    pub fn serialize<S: Serializer>(values: &[f64], s: S) -> Result<S::Ok, S::Error> {
        values
            .iter()
            .map(|v| match *v {
                v if v.is_finite() => Repr::Num(v),
                v if v.is_nan() => Repr::Text("nan".into()),
                v if v > 0.0 => Repr::Text("inf".into()),
                _ => Repr::Text("-inf".into()),
            })
            .collect::<Vec<_>>()
            .serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<f64>, D::Error> {
        Vec::<Repr>::deserialize(d)?
            .into_iter()
            .map(|r| match r {
                Repr::Num(v) => Ok(v),
                Repr::Text(t) => match t.as_str() {
                    "inf" => Ok(f64::INFINITY),
                    "-inf" => Ok(f64::NEG_INFINITY),
                    "nan" => Ok(f64::NAN),
                    other => Err(serde::de::Error::custom(format!("bad number {other:?}"))),
                },
            })
            .collect()
    }
}

fn is_false(b: &bool) -> bool {
    !*b
}

fn pair(c: Complex64) -> [f64; 2] {
    [c.re, c.im]
}

fn complex([re, im]: [f64; 2]) -> Complex64 {
    Complex64::new(re, im)
}

fn json_error(e: serde_json::Error) -> Error {
    Error::Parse {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    }
}

/// On-disk form of a [`MeasurementDevice`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DeviceFile {
    pub name: String,
    pub n: usize,
    pub m: usize,
    pub kind: DeviceKind,
    /// `gamma[i][j][k]` as `[re, im]`.
    pub gamma: Vec<Vec<Vec<[f64; 2]>>>,
    #[serde(default, skip_serializing_if = "is_false")]
    pub unchecked: bool,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub metadata: BTreeMap<String, serde_json::Value>,
}

impl DeviceFile {
    pub fn from_device(dev: &MeasurementDevice) -> Self {
        let (n, m) = (dev.n(), dev.m());
        let gamma = (0..n)
            .map(|i| {
                (0..m)
                    .map(|j| (0..n).map(|k| pair(dev.gamma(i, j, k))).collect())
                    .collect()
            })
            .collect();
        Self {
            name: dev.name().to_string(),
            n,
            m,
            kind: dev.kind(),
            gamma,
            unchecked: dev.is_unchecked(),
            metadata: BTreeMap::new(),
        }
    }

    pub fn to_device(&self) -> Result<MeasurementDevice> {
        let (n, m) = (self.n, self.m);
        let shape_ok = self.gamma.len() == n
            && self
                .gamma
                .iter()
                .all(|plane| plane.len() == m && plane.iter().all(|row| row.len() == n));
        if !shape_ok {
            return Err(Error::Shape(format!(
                "gamma must be nested {n} x {m} x {n} (system out, pointer, system in)"
            )));
        }
        let responses = (0..n)
            .map(|k| DMatrix::from_fn(n, m, |i, j| complex(self.gamma[i][j][k])))
            .collect();
        MeasurementDevice::from_responses(self.name.clone(), self.kind, responses, self.unchecked)
    }
}

/// Parses and validates a device from JSON text.
pub fn parse_device(text: &str) -> Result<MeasurementDevice> {
    let file: DeviceFile = serde_json::from_str(text).map_err(json_error)?;
    file.to_device()
}

pub fn serialize_device(dev: &MeasurementDevice) -> String {
    serde_json::to_string_pretty(&DeviceFile::from_device(dev)).expect("device file serializes")
}

pub fn load_device(path: &Path) -> Result<MeasurementDevice> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::from(e).context(format!("reading {}", path.display())))?;
    parse_device(&text).map_err(|e| e.context(format!("device {}", path.display())))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum DeviceSource {
    Path(PathBuf),
    Inline(DeviceFile),
}

fn default_shots() -> u64 {
    100_000
}

fn default_epsilon() -> f64 {
    DEFAULT_EPSILON
}

fn default_delta() -> f64 {
    DEFAULT_DELTA
}

fn default_epsilon_bits() -> f64 {
    DEFAULT_EPSILON_BITS
}

/// On-disk scenario: a device, an optional input state (default: the
/// equiprobable state), sampling parameters and tolerances.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioFile {
    pub device: DeviceSource,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub state: Option<Vec<[f64; 2]>>,
    #[serde(default = "default_shots")]
    pub shots: u64,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_epsilon")]
    pub epsilon: f64,
    #[serde(default = "default_delta")]
    pub delta: f64,
    #[serde(default = "default_epsilon_bits")]
    pub epsilon_bits: f64,
    /// Skip sampling and report only the exact channel.
    #[serde(default, skip_serializing_if = "is_false")]
    pub exact: bool,
}

/// A scenario with its device loaded and its state validated.
#[derive(Debug, Clone)]
pub struct Scenario {
    pub device: MeasurementDevice,
    pub state: PureState,
    pub shots: u64,
    pub seed: u64,
    pub epsilon: f64,
    pub delta: f64,
    pub epsilon_bits: f64,
    pub exact: bool,
}

impl Scenario {
    /// Default settings around `device`, with the equiprobable state.
    pub fn new(device: MeasurementDevice) -> Result<Self> {
        let state = PureState::uniform(device.n())?;
        Ok(Self {
            device,
            state,
            shots: default_shots(),
            seed: 0,
            epsilon: DEFAULT_EPSILON,
            delta: DEFAULT_DELTA,
            epsilon_bits: DEFAULT_EPSILON_BITS,
            exact: false,
        })
    }
}

impl ScenarioFile {
    /// Resolves the device (paths relative to `base_dir`) and the state.
    pub fn resolve(&self, base_dir: &Path) -> Result<Scenario> {
        let device = match &self.device {
            DeviceSource::Path(p) => load_device(&base_dir.join(p))?,
            DeviceSource::Inline(file) => file.to_device()?,
        };
        let state = match &self.state {
            Some(amps) => PureState::from_amplitudes(amps.iter().copied().map(complex).collect())
                .map_err(|e| e.context("scenario state"))?,
            None => PureState::uniform(device.n())?,
        };
        Ok(Scenario {
            device,
            state,
            shots: self.shots,
            seed: self.seed,
            epsilon: self.epsilon,
            delta: self.delta,
            epsilon_bits: self.epsilon_bits,
            exact: self.exact,
        })
    }
}

pub fn parse_scenario(text: &str, base_dir: &Path) -> Result<Scenario> {
    let file: ScenarioFile = serde_json::from_str(text).map_err(json_error)?;
    file.resolve(base_dir)
}

pub fn load_scenario(path: &Path) -> Result<Scenario> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::from(e).context(format!("reading {}", path.display())))?;
    let base = path.parent().unwrap_or(Path::new("."));
    parse_scenario(&text, base).map_err(|e| e.context(format!("scenario {}", path.display())))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DeviceSummary {
    pub name: String,
    pub kind: DeviceKind,
    pub n: usize,
    pub m: usize,
    pub validation: ValidationReport,
}

impl DeviceSummary {
    pub fn of(dev: &MeasurementDevice) -> Self {
        Self {
            name: dev.name().to_string(),
            kind: dev.kind(),
            n: dev.n(),
            m: dev.m(),
            validation: dev.validate(),
        }
    }
}

/// Everything known about one device/state pair.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompositeReport {
    pub device: DeviceSummary,
    pub state: Vec<Complex64>,
    pub channel: ChannelMatrix,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub calibration: Option<CalibrationReport>,
    pub info: InfoReport,
    /// Quantum pointer distribution of the scenario state.
    pub pointer_distribution: Vec<f64>,
    /// Born weights of the state pushed through the channel.
    pub classical_prediction: Vec<f64>,
    pub interference_gap: f64,
    /// State-dependent criterion; absent when `n != m`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mhi: Option<MhiReport>,
    pub ascription: AscriptionComparison,
}

pub fn run_scenario(sc: &Scenario) -> Result<CompositeReport> {
    let dev = &sc.device;
    let channel = exact_channel(dev)?;
    let calibration = if sc.exact {
        None
    } else {
        Some(estimate_channel(dev, sc.shots, sc.seed).map_err(|e| e.context("calibration"))?)
    };
    let info = analyze_channel(&channel, sc.epsilon, sc.epsilon_bits)
        .map_err(|e| e.context("information analysis"))?;
    let output = dev.apply(&sc.state)?;
    let mhi = if dev.n() == dev.m() {
        Some(mhi_reliability(&output, sc.delta)?)
    } else {
        None
    };
    Ok(CompositeReport {
        device: DeviceSummary::of(dev),
        state: sc.state.amplitudes().to_vec(),
        pointer_distribution: output.pointer_distribution(),
        classical_prediction: classical_prediction(&channel, &sc.state.probabilities())?,
        interference_gap: interference_gap(dev, &sc.state)?,
        ascription: ascription_comparison(&output)?,
        channel,
        calibration,
        info,
        mhi,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    Json,
    Csv,
}

impl FromStr for ReportFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "json" => Ok(ReportFormat::Json),
            "csv" => Ok(ReportFormat::Csv),
            other => Err(Error::InvalidArgument(format!("unknown format {other:?}"))),
        }
    }
}

/// One flat CSV row per device, for plotting sweeps.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryRow {
    pub device: String,
    pub n: usize,
    pub m: usize,
    #[serde(rename = "R")]
    pub reliability: f64,
    #[serde(rename = "E")]
    pub equivocation: f64,
    #[serde(rename = "N")]
    pub noise: f64,
    pub mutual: f64,
    pub classification: String,
    pub reliable: bool,
    pub max_channel_error: Option<f64>,
    pub interference_gap: Option<f64>,
}

impl SummaryRow {
    pub fn new(dev: &DeviceSummary, info: &InfoReport) -> Self {
        Self {
            device: dev.name.clone(),
            n: dev.n,
            m: dev.m,
            reliability: info.reliability,
            equivocation: info.equivocation,
            noise: info.noise,
            mutual: info.mutual,
            classification: info.classification.to_string(),
            reliable: info.channel_reliable,
            max_channel_error: None,
            interference_gap: None,
        }
    }
}

impl From<&CompositeReport> for SummaryRow {
    fn from(r: &CompositeReport) -> Self {
        Self {
            max_channel_error: r.calibration.as_ref().map(|c| c.max_abs_error),
            interference_gap: Some(r.interference_gap),
            ..Self::new(&r.device, &r.info)
        }
    }
}

/// Writes rows as CSV with a header line.
pub fn summary_csv(rows: &[SummaryRow]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for row in rows {
        w.serialize(row).map_err(|e| Error::InvalidArgument(e.to_string()))?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Io(e.into_error()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

pub fn emit_report(report: &CompositeReport, format: ReportFormat) -> Result<String> {
    emit_reports(std::slice::from_ref(report), format)
}

/// JSON: a single report as an object, several as an array. CSV: one
/// summary row per report.
pub fn emit_reports(reports: &[CompositeReport], format: ReportFormat) -> Result<String> {
    match format {
        ReportFormat::Json => {
            let text = if let [single] = reports {
                serde_json::to_string_pretty(single)
            } else {
                serde_json::to_string_pretty(reports)
            };
            Ok(text.expect("report serializes") + "\n")
        }
        ReportFormat::Csv => summary_csv(&reports.iter().map(SummaryRow::from).collect::<Vec<_>>()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::device::showcase::{interference, symmetric_imperfect};

    #[test]
    fn device_round_trip() {
        let dev = interference(0.3).unwrap();
        let back = parse_device(&serialize_device(&dev)).unwrap();
        assert_eq!(back, dev);
    }

    #[test]
    fn parse_error_has_position() {
        match parse_device("{\n  \"name\": \"x\",\n  \"n\": oops\n}") {
            Err(Error::Parse { line, column, .. }) => {
                assert_eq!(line, 3);
                assert!(column > 0);
            }
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn scaled_column_file() {
        let mut file = DeviceFile::from_device(&MeasurementDevice::make_ideal(2).unwrap());
        file.gamma[1][1][1] = [0.9, 0.0];
        let text = serde_json::to_string(&file).unwrap();
        match parse_device(&text) {
            Err(Error::NotAnIsometry { max_deviation }) => {
                assert!((max_deviation - 0.19).abs() < 1e-12)
            }
            other => panic!("expected NotAnIsometry, got {other:?}"),
        }
        file.unchecked = true;
        let dev = parse_device(&serde_json::to_string(&file).unwrap()).unwrap();
        assert!(dev.is_unchecked());
        let report = run_scenario(&Scenario::new(dev).unwrap()).unwrap();
        assert!(!report.device.validation.ok);
        assert!(report.device.validation.unchecked);
    }

    #[test]
    fn bad_gamma_shape() {
        let mut file = DeviceFile::from_device(&MeasurementDevice::make_ideal(2).unwrap());
        file.gamma[0].pop();
        assert!(matches!(file.to_device(), Err(Error::Shape(_))));
    }

    #[test]
    fn extended_floats_round_trip() {
        #[derive(Serialize, Deserialize)]
        struct W(#[serde(with = "extended_f64_vec")] Vec<f64>);
        let text = serde_json::to_string(&W(vec![1.5, f64::INFINITY, f64::NEG_INFINITY])).unwrap();
        assert_eq!(text, r#"[1.5,"inf","-inf"]"#);
        let W(back) = serde_json::from_str(&text).unwrap();
        assert_eq!(back, vec![1.5, f64::INFINITY, f64::NEG_INFINITY]);
    }

    #[test]
    fn scenario_defaults_and_inline_device() {
        let dev = DeviceFile::from_device(&symmetric_imperfect(0.1).unwrap());
        let text = serde_json::json!({ "device": dev, "seed": 4 }).to_string();
        let sc = parse_scenario(&text, Path::new(".")).unwrap();
        assert_eq!(sc.shots, 100_000);
        assert_eq!(sc.seed, 4);
        assert_eq!(sc.delta, DEFAULT_DELTA);
        assert_eq!(sc.state, PureState::uniform(2).unwrap());
    }

    #[test]
    fn scenario_rejects_unnormalized_state() {
        let dev = DeviceFile::from_device(&MeasurementDevice::make_ideal(2).unwrap());
        let text = serde_json::json!({ "device": dev, "state": [[1.0, 0.0], [1.0, 0.0]] }).to_string();
        assert!(matches!(
            parse_scenario(&text, Path::new(".")).unwrap_err().root(),
            Error::NotNormalized { .. }
        ));
    }

    #[test]
    fn ideal_report_csv_row() {
        let mut sc = Scenario::new(MeasurementDevice::make_ideal(2).unwrap()).unwrap();
        sc.exact = true;
        let report = run_scenario(&sc).unwrap();
        let csv = emit_report(&report, ReportFormat::Csv).unwrap();
        let mut lines = csv.lines();
        assert_eq!(
            lines.next().unwrap(),
            "device,n,m,R,E,N,mutual,classification,reliable,max_channel_error,interference_gap"
        );
        assert_eq!(lines.next().unwrap(), "ideal-2,2,2,1.0,0.0,0.0,1.0,deterministic,true,,0.0");
    }

    #[test]
    fn json_round_trip() {
        let mut sc = Scenario::new(interference(0.25).unwrap()).unwrap();
        sc.shots = 2000;
        sc.state = PureState::from_real(&[0.6, 0.8]).unwrap();
        let report = run_scenario(&sc).unwrap();
        assert!(report.mhi.as_ref().unwrap().ratios.iter().any(|r| r.is_infinite()));
        let text = emit_report(&report, ReportFormat::Json).unwrap();
        let back: CompositeReport = serde_json::from_str(&text).unwrap();
        assert_eq!(back, report);
    }
}
