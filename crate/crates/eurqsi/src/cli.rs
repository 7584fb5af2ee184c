use std::path::PathBuf;
use std::str::FromStr;

use clap::{Parser, Subcommand, ValueEnum};
use eurqsi_core::eur::{self, FuzzConfig, PvmChoice, RelationId};
use eurqsi_core::gallery;
use eurqsi_core::recovery::Quadrature;
use eurqsi_core::simx::{self, NoiseSpec};

use crate::report::{
    self, CheckReport, EurJson, ExamplesReport, ExperimentReport, Format, FuzzReport,
};
use crate::scenario;
use crate::{CliError, Outcome};

/// Default slack tolerance for `check` and `fuzz`.
pub const DEFAULT_TOLERANCE: f64 = 1e-6;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum FormatArg {
    Json,
    Csv,
    Table,
}

impl From<FormatArg> for Format {
    fn from(f: FormatArg) -> Self {
        match f {
            FormatArg::Json => Format::Json,
            FormatArg::Csv => Format::Csv,
            FormatArg::Table => Format::Table,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum RelationArg {
    Bipartite,
    Tripartite,
}

impl From<RelationArg> for RelationId {
    fn from(r: RelationArg) -> Self {
        match r {
            RelationArg::Bipartite => RelationId::BipartiteRefined,
            RelationArg::Tripartite => RelationId::TripartiteRefined,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum PvmArg {
    Pauli,
    Random,
}

impl From<PvmArg> for PvmChoice {
    fn from(p: PvmArg) -> Self {
        match p {
            PvmArg::Pauli => PvmChoice::Pauli,
            PvmArg::Random => PvmChoice::Random,
        }
    }
}

/// `depolarizing=P,readout=Q`; either key may be omitted, `none` means noiseless.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct NoiseArg {
    pub depolarizing: f64,
    pub readout: f64,
}

impl FromStr for NoiseArg {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut n = NoiseArg::default();
        if s.trim() == "none" {
            return Ok(n);
        }
        for part in s.split(',').filter(|p| !p.trim().is_empty()) {
            let (key, value) = part
                .split_once('=')
                .ok_or_else(|| format!("expected key=value, got {part:?}"))?;
            let v: f64 = value
                .trim()
                .parse()
                .map_err(|_| format!("{:?} is not a number", value.trim()))?;
            match key.trim() {
                "depolarizing" => n.depolarizing = v,
                "readout" => n.readout = v,
                other => return Err(format!("unknown noise key {other:?}")),
            }
        }
        Ok(n)
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "eurqsi",
    version,
    about = "Check entropic uncertainty relations with quantum side information and their recovery refinement"
)]
pub struct Cli {
    /// Output format; JSON is canonical.
    #[arg(long, value_enum, default_value = "json", global = true)]
    pub format: FormatArg,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run the four worked examples against their closed-form values.
    Examples {
        /// Use this tolerance for every ledger row instead of the per-class defaults.
        #[arg(long)]
        tolerance: Option<f64>,
    },
    /// Evaluate the relations for the state and measurements in a scenario file.
    Check {
        #[arg(long)]
        scenario: PathBuf,
        /// Override the relation named in the scenario.
        #[arg(long, value_enum)]
        relation: Option<RelationArg>,
        #[arg(long, default_value_t = DEFAULT_TOLERANCE)]
        tolerance: f64,
    },
    /// Check the relations on seeded random states.
    Fuzz {
        #[arg(long, default_value_t = 1000)]
        trials: usize,
        /// Dimension of A and of B.
        #[arg(long, default_value_t = 2)]
        dim: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_enum, default_value = "bipartite")]
        relation: RelationArg,
        #[arg(long, value_enum, default_value = "pauli")]
        pvm: PvmArg,
        #[arg(long, default_value_t = DEFAULT_TOLERANCE)]
        tolerance: f64,
    },
    /// Simulate one of the six measurement-reversal experiments.
    Experiment {
        /// Experiment number, 1 to 6.
        id: u8,
        #[arg(long, default_value_t = 8192)]
        shots: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value = "none")]
        noise: NoiseArg,
    },
}

fn check_tolerance(t: f64) -> Result<f64, CliError> {
    if t.is_finite() && t > 0.0 {
        Ok(t)
    } else {
        Err(CliError::Validation(format!(
            "tolerance must be positive and finite, got {t}"
        )))
    }
}

pub fn run(cli: &Cli) -> Result<Outcome, CliError> {
    let format = Format::from(cli.format);
    match &cli.command {
        Command::Examples { tolerance } => {
            let tolerance = tolerance.map(check_tolerance).transpose()?;
            let ledger = gallery::run_all(&Quadrature::default(), tolerance)?;
            let r = ExamplesReport::new(&ledger, tolerance);
            Ok(Outcome {
                pass: r.pass,
                body: report::render_examples(&r, format),
                stem: "examples".into(),
            })
        }
        Command::Check {
            scenario: path,
            relation,
            tolerance,
        } => {
            let tolerance = check_tolerance(*tolerance)?;
            let problem = scenario::load(path)?.validate(relation.map(RelationId::from))?;
            let rep = if problem.relation.is_tripartite() {
                eur::check_tripartite(&problem.rho, &problem.x_pvm, &problem.z_pvm, problem.purify)?
            } else {
                eur::check_bipartite(&problem.rho, &problem.x_pvm, &problem.z_pvm)?
            };
            let r = CheckReport {
                command: "check",
                scenario: path.display().to_string(),
                name: problem.name,
                tolerance,
                pass: rep.holds(tolerance),
                report: EurJson::from(&rep),
            };
            Ok(Outcome {
                pass: r.pass,
                body: report::render_check(&r, format),
                stem: "check".into(),
            })
        }
        Command::Fuzz {
            trials,
            dim,
            seed,
            relation,
            pvm,
            tolerance,
        } => {
            let tolerance = check_tolerance(*tolerance)?;
            if *trials == 0 || *dim < 2 {
                return Err(CliError::Validation(format!(
                    "fuzzing needs trials >= 1 and dim >= 2, got trials {trials}, dim {dim}"
                )));
            }
            let config = FuzzConfig::new(
                RelationId::from(*relation),
                *trials,
                *dim,
                PvmChoice::from(*pvm),
                *seed,
            );
            let summary = eur::fuzz(&config)?;
            let pass = summary.holds(tolerance);
            let r = FuzzReport::new(&summary, tolerance, pass);
            Ok(Outcome {
                pass,
                body: report::render_fuzz(&r, format),
                stem: "fuzz".into(),
            })
        }
        Command::Experiment {
            id,
            shots,
            seed,
            noise,
        } => {
            let noise = NoiseSpec::new(noise.depolarizing, noise.readout)?;
            let result = simx::run_experiment(*id, *shots, &noise, *seed)?;
            let r = ExperimentReport::new(&result, result.exact_fidelity()?);
            Ok(Outcome {
                pass: true,
                body: report::render_experiment(&r, format),
                stem: format!("experiment{id}"),
            })
        }
    }
}
