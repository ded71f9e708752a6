//! Experiment parameters. Every parameter struct is both a set of command-line
//! flags and a JSON object; the flag defaults are the only defaults.

use std::path::PathBuf;

use clap::{Args, FromArgMatches, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use crate::angle;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BranchArg {
    Plus,
    Minus,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Initial {
    /// Singlet at the origin.
    Singlet,
    /// Both particles at the origin in `|↑↑⟩`.
    UpUp,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GasInitial {
    /// Both modes of one cell filled.
    Pair,
    /// One particle in one mode.
    Single,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Spin {
    Up,
    Down,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Picture {
    Bose,
    Fermi,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Block {
    /// `H⊗H` restricted to the symmetric pair space.
    Hadamard,
    /// Haar-random 3×3 unitaries, one per seed.
    Random,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputArgs {
    /// Output file; standard output when absent.
    #[arg(long = "output")]
    pub path: Option<PathBuf>,
    /// Output format; each experiment has its own default.
    #[arg(long, value_enum)]
    pub format: Option<Format>,
}

macro_rules! clap_default {
    ($($t:ty),* $(,)?) => {$(
        impl Default for $t {
            fn default() -> Self {
                let cmd = <$t as Args>::augment_args(clap::Command::new("defaults").no_binary_name(true));
                let matches = cmd.get_matches_from(std::iter::empty::<String>());
                <$t as FromArgMatches>::from_arg_matches(&matches).expect("every flag has a default")
            }
        }
    )*};
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields, rename_all = "kebab-case")]
pub struct EvolveArgs {
    /// Collision phase angle g, with γ = e^{ig} on the singlet.
    #[arg(long, default_value = "pi", value_parser = angle::parse, allow_hyphen_values = true)]
    #[serde(deserialize_with = "angle::deserialize")]
    pub g: f64,
    /// Number of steps.
    #[arg(long, default_value_t = 50)]
    pub t: usize,
    /// Ring size; an open window of radius t+1 when absent.
    #[arg(long = "M")]
    #[serde(rename = "M")]
    pub ring: Option<usize>,
    #[arg(long, value_enum, default_value = "singlet")]
    pub initial: Initial,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields, rename_all = "kebab-case")]
pub struct SpectrumArgs {
    /// Ring size.
    #[arg(long = "M", default_value_t = 28)]
    #[serde(rename = "M")]
    pub ring: usize,
    #[arg(long, default_value = "pi", value_parser = angle::parse, allow_hyphen_values = true)]
    #[serde(deserialize_with = "angle::deserialize")]
    pub g: f64,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields, rename_all = "kebab-case")]
pub struct DispersionArgs {
    #[arg(long, default_value = "pi", value_parser = angle::parse, allow_hyphen_values = true)]
    #[serde(deserialize_with = "angle::deserialize")]
    pub g: f64,
    /// Momenta from −π to π inclusive.
    #[arg(long, default_value_t = 101)]
    pub grid: usize,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields, rename_all = "kebab-case")]
pub struct ScanArgs {
    /// Single collision phase; a scan over g in [0, π] when absent.
    #[arg(long, value_parser = angle::parse, allow_hyphen_values = true)]
    #[serde(deserialize_with = "angle::deserialize_opt")]
    pub g: Option<f64>,
    /// Number of g values in the scan.
    #[arg(long, default_value_t = 65)]
    pub g_points: usize,
    /// Momentum samples per g.
    #[arg(long, default_value_t = 4096)]
    pub grid: usize,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields, rename_all = "kebab-case")]
pub struct BoundStateArgs {
    /// Total momentum.
    #[arg(long, default_value = "0.5pi", value_parser = angle::parse, allow_hyphen_values = true)]
    #[serde(deserialize_with = "angle::deserialize")]
    pub p: f64,
    #[arg(long, default_value = "pi", value_parser = angle::parse, allow_hyphen_values = true)]
    #[serde(deserialize_with = "angle::deserialize")]
    pub g: f64,
    #[arg(long, value_enum, default_value = "plus")]
    pub branch: BranchArg,
    /// Relative sites kept on each side.
    #[arg(long, default_value_t = 40)]
    pub cutoff: usize,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields, rename_all = "kebab-case")]
pub struct AsymptoticArgs {
    #[arg(long, default_value = "pi", value_parser = angle::parse, allow_hyphen_values = true)]
    #[serde(deserialize_with = "angle::deserialize")]
    pub g: f64,
    /// Velocity bins on [−1, 1].
    #[arg(long, default_value_t = 200)]
    pub bins: usize,
    /// Momentum samples.
    #[arg(long, default_value_t = 4096)]
    pub grid: usize,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields, rename_all = "kebab-case")]
pub struct QcaArgs {
    /// Number of cells.
    #[arg(long = "M", default_value_t = 12)]
    #[serde(rename = "M")]
    pub ring: usize,
    #[arg(long, default_value_t = 6)]
    pub t: usize,
    /// Phase angle on the doubly occupied cell state.
    #[arg(long, default_value = "pi", value_parser = angle::parse, allow_hyphen_values = true)]
    #[serde(deserialize_with = "angle::deserialize")]
    pub g: f64,
    #[arg(long, value_enum, default_value = "pair")]
    pub initial: GasInitial,
    /// Starting cell; the middle cell when absent.
    #[arg(long)]
    pub cell: Option<usize>,
    /// Mode of a single particle.
    #[arg(long, value_enum, default_value = "up")]
    pub spin: Spin,
    /// Walk picture compared against a pair start.
    #[arg(long, value_enum, default_value = "bose")]
    pub picture: Picture,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields, rename_all = "kebab-case")]
pub struct FastMolArgs {
    #[arg(long, value_enum, default_value = "hadamard")]
    pub block: Block,
    #[arg(long, default_value_t = 50)]
    pub t: usize,
    /// First seed of a random-block sweep.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Number of consecutive seeds.
    #[arg(long, default_value_t = 1)]
    pub seeds: u64,
    /// Largest |x1 − x2| counted as bound.
    #[arg(long, default_value_t = 4)]
    pub width: i64,
    /// Distance past t/√2 the centre of mass must reach.
    #[arg(long, default_value_t = 2.0)]
    pub margin: f64,
    /// Mass above which a seed counts as outrunning the free walk.
    #[arg(long, default_value_t = 0.01)]
    pub threshold: f64,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields, rename_all = "kebab-case")]
pub struct DefectArgs {
    /// Rotation angle of the three coins in the flat walk.
    #[arg(long, default_value = "0.1", value_parser = angle::parse, allow_hyphen_values = true)]
    #[serde(deserialize_with = "angle::deserialize")]
    pub eps: f64,
    /// Momentum grid for locating the gap.
    #[arg(long, default_value_t = 256)]
    pub grid: usize,
    /// Initial quadrature points per axis.
    #[arg(long, default_value_t = 64)]
    pub quadrature: usize,
    /// Largest quadrature grid per axis.
    #[arg(long, default_value_t = 512)]
    pub max_quadrature: usize,
    /// Quadrature residual target.
    #[arg(long, default_value_t = 1e-13)]
    pub tol: f64,
    /// Torus size for the eigenvalue check; 0 skips it.
    #[arg(long, default_value_t = 32)]
    pub torus: usize,
    #[command(flatten)]
    pub output: OutputArgs,
}

clap_default!(
    OutputArgs,
    EvolveArgs,
    SpectrumArgs,
    DispersionArgs,
    ScanArgs,
    BoundStateArgs,
    AsymptoticArgs,
    QcaArgs,
    FastMolArgs,
    DefectArgs,
);

#[derive(Debug, Clone, PartialEq, Subcommand, Serialize, Deserialize)]
#[serde(tag = "experiment", content = "parameters", rename_all = "kebab-case", deny_unknown_fields)]
pub enum Experiment {
    /// Joint position distribution of the interacting Hadamard pair.
    Evolve(EvolveArgs),
    /// Eigenphases on a ring, one row per total momentum.
    Spectrum(SpectrumArgs),
    /// Both molecule branches over total momentum.
    Dispersion(DispersionArgs),
    /// Largest molecule group velocity per collision phase.
    Velocity(ScanArgs),
    /// Integrated capture probability per collision phase.
    Capture(ScanArgs),
    /// Bound-state amplitudes at one total momentum.
    Boundstate(BoundStateArgs),
    /// Asymptotic molecule velocity density.
    Asymptotic(AsymptoticArgs),
    /// Lattice-gas automaton occupations and pair-sector check.
    Qca(QcaArgs),
    /// Symmetric collision blocks that move faster than the free walk.
    Fastmol(FastMolArgs),
    /// Defect coin with a prescribed eigenvalue in a band gap.
    DefectSynthesis(DefectArgs),
}

impl Experiment {
    pub fn output(&self) -> &OutputArgs {
        match self {
            Experiment::Evolve(a) => &a.output,
            Experiment::Spectrum(a) => &a.output,
            Experiment::Dispersion(a) => &a.output,
            Experiment::Velocity(a) | Experiment::Capture(a) => &a.output,
            Experiment::Boundstate(a) => &a.output,
            Experiment::Asymptotic(a) => &a.output,
            Experiment::Qca(a) => &a.output,
            Experiment::Fastmol(a) => &a.output,
            Experiment::DefectSynthesis(a) => &a.output,
        }
    }

    pub fn output_mut(&mut self) -> &mut OutputArgs {
        match self {
            Experiment::Evolve(a) => &mut a.output,
            Experiment::Spectrum(a) => &mut a.output,
            Experiment::Dispersion(a) => &mut a.output,
            Experiment::Velocity(a) | Experiment::Capture(a) => &mut a.output,
            Experiment::Boundstate(a) => &mut a.output,
            Experiment::Asymptotic(a) => &mut a.output,
            Experiment::Qca(a) => &mut a.output,
            Experiment::Fastmol(a) => &mut a.output,
            Experiment::DefectSynthesis(a) => &mut a.output,
        }
    }

    fn default_format(&self) -> Format {
        match self {
            Experiment::Evolve(_) | Experiment::Dispersion(_) | Experiment::Asymptotic(_) => Format::Csv,
            Experiment::Velocity(_) | Experiment::Capture(_) => Format::Csv,
            _ => Format::Json,
        }
    }

    /// Fills every optional parameter that has a derived default.
    pub fn resolve(mut self) -> Self {
        let format = self.output().format.unwrap_or(self.default_format());
        self.output_mut().format = Some(format);
        if let Experiment::Qca(a) = &mut self {
            a.cell.get_or_insert(a.ring / 2);
        }
        self
    }
}

impl Experiment {
    /// Reads a bare configuration or the `config` block of a JSON result.
    pub fn from_json(text: &str) -> anyhow::Result<Experiment> {
        let mut value: serde_json::Value = serde_json::from_str(text)?;
        if let Some(inner) = value.get_mut("config") {
            value = inner.take();
        }
        Ok(serde_json::from_value(value)?)
    }
}
