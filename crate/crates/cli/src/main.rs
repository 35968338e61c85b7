//! `qmeter`: calibrate, measure and rate measuring devices from the command line.

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use qmeter_core::calibration::{estimate_channel, exact_channel, frequency_measurement};
use qmeter_core::device::showcase;
use qmeter_core::info::analyze;
use qmeter_core::io::{
    emit_reports, load_device, load_scenario, run_scenario, serialize_device, summary_csv,
    CompositeReport, DeviceSummary, ReportFormat, Scenario, SummaryRow,
};
use qmeter_core::tolerance::{DEFAULT_DELTA, DEFAULT_EPSILON, DEFAULT_EPSILON_BITS};
use qmeter_core::{Error, MeasurementDevice, PureState};

#[derive(Parser, Debug)]
#[command(name = "qmeter", version, about = "Rate measuring devices as information channels")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    common: Common,
}

#[derive(Args, Debug)]
struct Common {
    /// RNG seed for simulated measurements.
    #[arg(long, global = true, env = "QMETER_SEED", default_value_t = 0)]
    seed: u64,
    /// Shots per input (calibration) or per state (measurement).
    #[arg(long, global = true, default_value_t = 100_000)]
    shots: u64,
    /// Tolerance on |Pr(p_j|a_k) - delta_jk| for a reliable channel.
    #[arg(long, global = true, default_value_t = DEFAULT_EPSILON)]
    epsilon: f64,
    /// Threshold on the state-dependent off-diagonal ratio.
    #[arg(long, global = true, default_value_t = DEFAULT_DELTA)]
    delta: f64,
    /// Tolerance in bits when classifying a channel as noisy or equivocal.
    #[arg(long = "epsilon-bits", global = true, default_value_t = DEFAULT_EPSILON_BITS)]
    epsilon_bits: f64,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Skip sampling; report exact quantities only.
    #[arg(long, global = true)]
    exact: bool,
    /// Write the report here instead of standard output.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Format {
    Json,
    Csv,
}

impl From<Format> for ReportFormat {
    fn from(f: Format) -> Self {
        match f {
            Format::Json => ReportFormat::Json,
            Format::Csv => ReportFormat::Csv,
        }
    }
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Channel matrix of a device, exact and estimated from simulated runs.
    Calibrate {
        #[arg(long)]
        device: PathBuf,
    },
    /// Frequency measurement of a state through a device.
    Measure {
        #[arg(long)]
        device: PathBuf,
        /// Comma-separated amplitudes, e.g. `0.6,0.8i` or `0.5+0.5i,0.7071`.
        #[arg(long)]
        state: String,
        /// Rescale the amplitudes to unit norm.
        #[arg(long)]
        normalize: bool,
    },
    /// Entropies, equivocation, noise and reliability index of a device.
    Analyze {
        #[arg(long)]
        device: PathBuf,
    },
    /// Rank several devices by reliability index.
    Compare {
        #[arg(long = "device", required = true)]
        devices: Vec<PathBuf>,
    },
    /// Full report for a scenario file.
    Run {
        #[arg(long)]
        scenario: PathBuf,
    },
    /// Ideal, imperfect, disturbing and interference showcase devices.
    Demo {
        /// Also write the showcase device files into this directory.
        #[arg(long)]
        save: Option<PathBuf>,
        /// Append a sweep of this many symmetric imperfect devices, q in [0, 0.5].
        #[arg(long, default_value_t = 0)]
        sweep: usize,
    },
}

fn parse_state(text: &str, normalize: bool) -> Result<PureState, Error> {
    let amps = text
        .split(',')
        .map(|s| {
            let s = s.trim();
            Complex64::from_str(s)
                .map_err(|_| Error::InvalidArgument(format!("cannot parse amplitude {s:?}")))
        })
        .collect::<Result<Vec<_>, _>>()?;
    if normalize {
        PureState::normalized(amps)
    } else {
        PureState::from_amplitudes(amps)
    }
}

fn json(value: &impl serde::Serialize) -> String {
    serde_json::to_string_pretty(value).expect("serializable") + "\n"
}

fn calibrate(dev: &MeasurementDevice, c: &Common) -> Result<String, Error> {
    let exact = exact_channel(dev)?;
    let report = if c.exact {
        None
    } else {
        Some(estimate_channel(dev, c.shots, c.seed)?)
    };
    match c.format {
        Format::Json => Ok(match &report {
            Some(r) => json(r),
            None => json(&exact),
        }),
        Format::Csv => {
            let mut out = String::from("input,output,exact,estimated,count\n");
            for k in 0..exact.n() {
                for j in 0..exact.m() {
                    let (est, count) = match &report {
                        Some(r) => (
                            r.estimated.probs[k][j].to_string(),
                            r.estimated.counts.as_ref().map_or(String::new(), |c| c[k][j].to_string()),
                        ),
                        None => (String::new(), String::new()),
                    };
                    out += &format!(
                        "{},{},{},{est},{count}\n",
                        exact.input_labels[k], exact.output_labels[j], exact.probs[k][j]
                    );
                }
            }
            Ok(out)
        }
    }
}

fn measure(dev: &MeasurementDevice, state: &PureState, c: &Common) -> Result<String, Error> {
    let exact = dev.apply(state)?.pointer_distribution();
    let freq = if c.exact {
        None
    } else {
        Some(frequency_measurement(dev, state, c.shots, c.seed)?)
    };
    match c.format {
        Format::Json => Ok(json(&serde_json::json!({
            "device": dev.name(),
            "state": state.amplitudes(),
            "labels": dev.pointer_labels(),
            "probabilities": exact,
            "frequencies": freq,
        }))),
        Format::Csv => {
            let mut out = String::from("label,probability,frequency,count\n");
            for (j, label) in dev.pointer_labels().iter().enumerate() {
                let (f, n) = freq.as_ref().map_or((String::new(), String::new()), |f| {
                    (f.frequencies[j].to_string(), f.counts[j].to_string())
                });
                out += &format!("{label},{},{f},{n}\n", exact[j]);
            }
            Ok(out)
        }
    }
}

fn summary_rows(devices: &[MeasurementDevice], c: &Common) -> Result<Vec<SummaryRow>, Error> {
    devices
        .iter()
        .map(|d| {
            let info = analyze(d, c.epsilon, c.epsilon_bits).map_err(|e| e.context(d.name().to_string()))?;
            Ok(SummaryRow::new(&DeviceSummary::of(d), &info))
        })
        .collect()
}

fn scenario_for(dev: MeasurementDevice, c: &Common) -> Result<Scenario, Error> {
    let mut sc = Scenario::new(dev)?;
    sc.shots = c.shots;
    sc.seed = c.seed;
    sc.epsilon = c.epsilon;
    sc.delta = c.delta;
    sc.epsilon_bits = c.epsilon_bits;
    sc.exact = c.exact;
    Ok(sc)
}

fn showcase_devices() -> Result<Vec<MeasurementDevice>, Error> {
    Ok(vec![
        MeasurementDevice::make_ideal(2)?,
        showcase::symmetric_imperfect(0.1)?,
        showcase::disturbing_rotation(0.6)?,
        showcase::interference(0.25)?,
    ])
}

fn demo(save: Option<&Path>, sweep: usize, c: &Common) -> Result<String, Error> {
    let mut devices = showcase_devices()?;
    if let Some(dir) = save {
        std::fs::create_dir_all(dir)?;
        for d in &devices {
            std::fs::write(dir.join(format!("{}.json", d.name())), serialize_device(d))?;
        }
    }
    for i in 0..sweep {
        let q = if sweep > 1 { 0.5 * i as f64 / (sweep - 1) as f64 } else { 0.0 };
        devices.push(showcase::symmetric_imperfect(q)?);
    }
    let reports = devices
        .into_iter()
        .map(|d| run_scenario(&scenario_for(d, c)?))
        .collect::<Result<Vec<CompositeReport>, Error>>()?;
    emit_reports(&reports, c.format.into())
}

fn execute(cli: &Cli) -> Result<String, Error> {
    let c = &cli.common;
    match &cli.command {
        Command::Calibrate { device } => calibrate(&load_device(device)?, c),
        Command::Measure { device, state, normalize } => {
            let dev = load_device(device)?;
            measure(&dev, &parse_state(state, *normalize)?, c)
        }
        Command::Analyze { device } => {
            let dev = load_device(device)?;
            match c.format {
                Format::Json => Ok(json(&analyze(&dev, c.epsilon, c.epsilon_bits)?)),
                Format::Csv => summary_csv(&summary_rows(&[dev], c)?),
            }
        }
        Command::Compare { devices } => {
            let devs = devices.iter().map(|p| load_device(p)).collect::<Result<Vec<_>, _>>()?;
            let mut rows = summary_rows(&devs, c)?;
            rows.sort_by(|a, b| b.reliability.total_cmp(&a.reliability));
            match c.format {
                Format::Json => Ok(json(&rows)),
                Format::Csv => summary_csv(&rows),
            }
        }
        Command::Run { scenario } => {
            let report = run_scenario(&load_scenario(scenario)?)?;
            emit_reports(std::slice::from_ref(&report), c.format.into())
        }
        Command::Demo { save, sweep } => demo(save.as_deref(), *sweep, c),
    }
}

fn exit_code(e: &Error) -> u8 {
    if e.is_physicality() {
        2
    } else if matches!(e.root(), Error::NumericalInconsistency(_)) {
        3
    } else {
        1
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    let result = execute(&cli).and_then(|text| match &cli.common.out {
        Some(path) => std::fs::write(path, text).map_err(Error::from),
        None => {
            print!("{text}");
            Ok(())
        }
    });
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
