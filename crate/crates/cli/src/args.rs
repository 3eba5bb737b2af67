use std::path::PathBuf;

use clap::{ArgGroup, Args, Parser, Subcommand, ValueEnum};

use crate::io::{BiasMode, DEFAULT_SERIES_OHM};

#[derive(Debug, Parser)]
#[command(name = "nitrq", version, about = "Simulate, fit and budget nitride-junction transmon devices")]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalOpts,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct GlobalOpts {
    /// Output directory (created if missing).
    #[arg(long, global = true, default_value = ".")]
    pub out: PathBuf,
    /// Seed for every random draw.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Also write SVG plots.
    #[arg(long, global = true)]
    pub svg: bool,
    /// Override a named parameter (device fields, fit and analysis options).
    #[arg(long = "set", global = true, value_name = "KEY=VALUE", value_parser = parse_override)]
    pub overrides: Vec<(String, f64)>,
}

fn parse_override(s: &str) -> Result<(String, f64), String> {
    let (k, v) = s.split_once('=').ok_or_else(|| format!("expected KEY=VALUE, got {s:?}"))?;
    let v: f64 = v.trim().parse().map_err(|_| format!("value of {k} is not a number: {v:?}"))?;
    Ok((k.trim().to_string(), v))
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate synthetic data files.
    #[command(subcommand)]
    Simulate(SimulateCmd),
    /// Fit models to data files.
    #[command(subcommand)]
    Fit(FitCmd),
    /// Device parameter, spectrum and coupling reports.
    #[command(subcommand)]
    Device(DeviceCmd),
    /// Combine loss channels into a quality-factor budget.
    LossBudget(LossBudgetArgs),
}

#[derive(Debug, Subcommand)]
pub enum SimulateCmd {
    /// Current-biased IV sweep of one junction, or a wafer of junctions.
    Iv(SimIvArgs),
    /// Rabi chevron over drive detuning and pulse duration.
    Chevron(SimChevronArgs),
    /// Energy-relaxation trace.
    T1(SimT1Args),
    /// Ramsey fringe trace.
    Ramsey(SimRamseyArgs),
    /// T1 against temperature for the thermal models.
    T1VsTemp(SimT1TempArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ShapeArg {
    Saturating,
    Linear,
}

#[derive(Debug, Args)]
pub struct SimIvArgs {
    /// Critical current; defaults to Jc times the junction area.
    #[arg(long)]
    pub ic_a: Option<f64>,
    #[arg(long, default_value_t = 6.0)]
    pub jc_a_cm2: f64,
    #[arg(long, default_value_t = 2.0)]
    pub diameter_um: f64,
    #[arg(long, default_value_t = 14.6e3)]
    pub rn_ohm: f64,
    #[arg(long, default_value_t = 0.80e6)]
    pub rsg_ohm: f64,
    #[arg(long, default_value_t = 4.3e-3)]
    pub vg_v: f64,
    #[arg(long, default_value_t = 50e-9)]
    pub isw_a: f64,
    #[arg(long, default_value_t = 0.0)]
    pub noise_v: f64,
    #[arg(long, default_value_t = 4001)]
    pub points: usize,
    #[arg(long, value_enum, default_value_t = ShapeArg::Saturating)]
    pub shape: ShapeArg,
    #[arg(long, value_enum, default_value_t = BiasMode::Current)]
    pub bias_mode: BiasMode,
    #[arg(long, default_value_t = DEFAULT_SERIES_OHM)]
    pub series_ohm: f64,
    /// Write a wafer batch (one file per diameter and cycle count).
    #[arg(long, conflicts_with_all = ["ic_a", "rn_ohm", "rsg_ohm", "isw_a", "diameter_um"])]
    pub wafer: bool,
    #[arg(long, value_delimiter = ',', default_value = "1,1.5,2,3")]
    pub diameters: Vec<f64>,
    #[arg(long, value_delimiter = ',', default_value = "18,21,24")]
    pub cycles: Vec<u32>,
    /// log10(Jc) change per ALD cycle.
    #[arg(long, default_value_t = -0.34, allow_hyphen_values = true)]
    pub jc_slope: f64,
    /// Cycle count at which Jc equals --jc-a-cm2.
    #[arg(long, default_value_t = 21)]
    pub cycles_ref: u32,
    /// Ic Rn product shared by the wafer.
    #[arg(long, default_value_t = 2.75e-3)]
    pub icrn_v: f64,
    #[arg(long, default_value_t = 55.0)]
    pub quality_ratio: f64,
    /// Switching current as a fraction of Ic on the wafer.
    #[arg(long, default_value_t = 0.5)]
    pub isw_fraction: f64,
}

#[derive(Debug, Args)]
pub struct SimChevronArgs {
    /// Resonant Rabi frequency [Hz].
    #[arg(long, default_value_t = 18e6)]
    pub omega_r: f64,
    /// Detunings span +-this [Hz].
    #[arg(long, default_value_t = 30e6)]
    pub detuning_span: f64,
    #[arg(long, default_value_t = 61)]
    pub detuning_points: usize,
    /// Longest pulse [s].
    #[arg(long, default_value_t = 100e-9)]
    pub duration_max: f64,
    #[arg(long, default_value_t = 1001)]
    pub duration_points: usize,
    /// Drive-induced decay time [s]; undamped when absent.
    #[arg(long)]
    pub t2_drive: Option<f64>,
    #[arg(long, default_value_t = 0.0)]
    pub noise: f64,
}

#[derive(Debug, Args)]
pub struct SimT1Args {
    #[arg(long, default_value_t = 3.0e-6)]
    pub t1: f64,
    #[arg(long, default_value_t = 0.9)]
    pub amplitude: f64,
    #[arg(long, default_value_t = 0.05)]
    pub offset: f64,
    #[arg(long, default_value_t = 15e-6)]
    pub t_max: f64,
    #[arg(long, default_value_t = 151)]
    pub points: usize,
    #[arg(long, default_value_t = 0.01)]
    pub noise: f64,
}

#[derive(Debug, Args)]
pub struct SimRamseyArgs {
    #[arg(long, default_value_t = 1.2e-6)]
    pub t2star: f64,
    /// Drive detuning [Hz].
    #[arg(long, default_value_t = 5.2e6)]
    pub detuning: f64,
    #[arg(long, default_value_t = 0.5)]
    pub a0: f64,
    #[arg(long, default_value_t = 0.45)]
    pub amplitude: f64,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub phi0: f64,
    #[arg(long, default_value_t = 2e-6)]
    pub t_max: f64,
    #[arg(long, default_value_t = 200)]
    pub points: usize,
    #[arg(long, default_value_t = 0.01)]
    pub noise: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ThermalArg {
    SpinBoson,
    Quasiparticle,
    Both,
}

#[derive(Debug, Args)]
pub struct SimT1TempArgs {
    #[arg(long, default_value_t = 4.057)]
    pub fq_ghz: f64,
    /// Reference T1 [s] at --t-ref.
    #[arg(long, default_value_t = 3.0e-6)]
    pub t1_ref: f64,
    /// Reference temperature [K].
    #[arg(long, default_value_t = 0.026)]
    pub t_ref: f64,
    #[arg(long, default_value_t = 0.026)]
    pub t_min: f64,
    #[arg(long, default_value_t = 0.400)]
    pub t_max: f64,
    #[arg(long, default_value_t = 40)]
    pub points: usize,
    #[arg(long, value_enum, default_value_t = ThermalArg::Both)]
    pub model: ThermalArg,
    /// Aluminium gap for the quasiparticle model [ueV].
    #[arg(long, default_value_t = nitrq_core::thermal::DEFAULT_DELTA_AL_UEV)]
    pub delta_uev: f64,
}

#[derive(Debug, Subcommand)]
pub enum FitCmd {
    /// Exponential decay on a `t_s,y` trace.
    T1(FitTraceArgs),
    /// Decaying cosine on a `t_s,y` trace.
    Ramsey(FitTraceArgs),
    /// Rabi oscillation on a trace, or the resonant Rabi rate from a chevron.
    Rabi(FitTraceArgs),
    /// log10(Jc) against ALD cycles (`cycles,jc_a_cm2`).
    JcCycles(FitTableArgs),
    /// Resistance-area product (`diameter_um` with `rn_ohm` or `resistance_ohm`).
    Ra(FitTableArgs),
    /// IV analysis of one sweep file or a wafer batch.
    Iv(FitIvArgs),
}

#[derive(Debug, Args)]
pub struct FitTraceArgs {
    #[arg(long = "in")]
    pub input: PathBuf,
}

#[derive(Debug, Args)]
pub struct FitTableArgs {
    #[arg(long = "in")]
    pub input: PathBuf,
    /// Keep only rows with this cycle count.
    #[arg(long)]
    pub cycles: Option<u32>,
}

#[derive(Debug, Args)]
#[command(group(ArgGroup::new("source").required(true).args(["input", "batch"])))]
pub struct FitIvArgs {
    #[arg(long = "in")]
    pub input: Option<PathBuf>,
    /// Wafer batch JSON: [{junction_id, diameter_um, csv_path, cycles?}].
    #[arg(long)]
    pub batch: Option<PathBuf>,
    /// Junction diameter for Jc (single-file mode).
    #[arg(long, conflicts_with = "batch")]
    pub diameter_um: Option<f64>,
    #[arg(long, conflicts_with = "batch")]
    pub cycles: Option<u32>,
    #[arg(long, value_enum, default_value_t = BiasMode::Current)]
    pub bias_mode: BiasMode,
    #[arg(long, default_value_t = DEFAULT_SERIES_OHM)]
    pub series_ohm: f64,
}

#[derive(Debug, Args)]
#[command(group(ArgGroup::new("which").required(true).args(["device", "reference"])))]
pub struct DeviceSel {
    /// Device JSON file.
    #[arg(long)]
    pub device: Option<PathBuf>,
    /// Built-in reference qubit (A1, A2, A3, B1, B2).
    #[arg(long)]
    pub reference: Option<String>,
}

#[derive(Debug, Subcommand)]
pub enum DeviceCmd {
    /// Write a built-in reference device as a device JSON file.
    Export {
        #[arg(long)]
        reference: String,
    },
    /// Echo parameters with derived circuit quantities.
    Params(DeviceSel),
    /// Transmon levels, anharmonicity and charge dispersion.
    Spectrum {
        #[command(flatten)]
        sel: DeviceSel,
        #[arg(long, default_value_t = 5)]
        levels: usize,
        #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
        ng: f64,
    },
    /// Dispersive cavity pull and vacuum-Rabi splitting.
    Dispersive(DeviceSel),
}

#[derive(Debug, Args)]
#[command(group(ArgGroup::new("loss_device").args(["device", "reference"])))]
pub struct LossBudgetArgs {
    /// Device JSON file.
    #[arg(long)]
    pub device: Option<PathBuf>,
    /// Built-in reference qubit (A1, A2, A3, B1, B2).
    #[arg(long)]
    pub reference: Option<String>,
    /// Channels JSON: {name: Q | {"formula": ...}}.
    #[arg(long, required_unless_present = "template", conflicts_with = "template")]
    pub channels: Option<PathBuf>,
    /// Write an example channels file and exit.
    #[arg(long, conflicts_with = "loss_device")]
    pub template: bool,
}
