//! Command-line front end. Exit status: 0 when every check passes, 1 on a
//! verification or constraint failure, 2 on usage, parse or input errors.

mod commands;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser)]
#[command(name = "polarblend", version, about = "Laminate analysis, ply-count discretisation and blended stack recovery")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
pub struct Global {
    /// Random seed for the stochastic solvers.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Evaluation budget of the stochastic solvers.
    #[arg(long, global = true)]
    budget: Option<u64>,
    /// Constraint tolerance.
    #[arg(long, global = true)]
    tolerance: Option<f64>,
    #[arg(long, global = true, value_enum, default_value_t = OutputFormat::Text)]
    format: OutputFormat,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Text,
    Json,
    Csv,
}

#[derive(Clone, Copy, ValueEnum)]
pub enum Norm {
    Frobenius,
    PolarModuli,
}

#[derive(Clone, Copy, ValueEnum)]
pub enum Mode {
    General,
    Scheme,
}

#[derive(Clone, Copy, ValueEnum)]
pub enum SectionArg {
    Material,
    Feasibility,
    StandAlone,
    Skins,
    Blending,
}

#[derive(Subcommand)]
enum Command {
    /// Homogenised matrices, polar sets and panel variables of stacks.
    Analyze {
        /// Stack in slash notation, e.g. `[0/45/-45/90]s`.
        #[arg(allow_hyphen_values = true)]
        stack: Option<String>,
        /// File with one stack per line.
        #[arg(long, conflicts_with = "stack")]
        file: Option<PathBuf>,
        /// Material file (JSON or TOML); bundled T300/5208 by default.
        #[arg(long)]
        material: Option<PathBuf>,
        /// Residual target `rho0K,rho1[,phi1]`.
        #[arg(long, allow_hyphen_values = true)]
        target: Option<String>,
        #[arg(long, value_enum, default_value_t = Norm::Frobenius)]
        norm: Norm,
    },
    /// Polar parameters of a plane tensor, or the tensor of a polar set.
    Polar {
        /// `L1111,L2222,L1122,L1112,L2212,L1212`.
        #[arg(long, allow_hyphen_values = true, required_unless_present = "inverse")]
        components: Option<String>,
        /// `T0,T1,R0,R1,Phi0,Phi1` (deg).
        #[arg(long, allow_hyphen_values = true, conflicts_with = "components")]
        inverse: Option<String>,
        /// Frame rotation (deg) applied to the result.
        #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
        rotate: f64,
    },
    /// Lamination-domain feasibility of every panel in a file.
    Feasibility {
        #[arg(long)]
        input: PathBuf,
    },
    /// Ply-continuity between a thicker and a thinner stack.
    BlendCheck {
        #[arg(allow_hyphen_values = true)]
        parent: String,
        #[arg(allow_hyphen_values = true)]
        thinner: String,
        #[arg(long, value_enum, default_value_t = Mode::General)]
        mode: Mode,
        #[arg(long, default_value_t = 2)]
        covering: usize,
    },
    /// Round a continuous design to integer ply counts.
    Discretize {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        adjacency: PathBuf,
        #[arg(long, default_value_t = 4)]
        dnmin: u32,
        #[arg(long, default_value_t = 150)]
        nref: u32,
        /// Discrete panel file to write.
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Blended stacking sequences matching panel targets.
    Recover {
        #[arg(long)]
        targets: PathBuf,
        /// Scheme file; without it, an adjacency file builds a nested scheme,
        /// otherwise every panel is recovered on its own.
        #[arg(long)]
        scheme: Option<PathBuf>,
        #[arg(long, conflicts_with = "scheme")]
        adjacency: Option<PathBuf>,
        #[arg(long, default_value_t = 2)]
        covering: usize,
        #[arg(long, default_value_t = 1)]
        step: u32,
        #[arg(long, default_value_t = 1)]
        restarts: usize,
        #[arg(long, default_value_t = 150)]
        nref: u32,
        #[arg(long, value_enum, default_value_t = Norm::Frobenius)]
        norm: Norm,
        /// Stack file to write.
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Discretise, recover and re-check a project.
    Pipeline {
        /// Project file (TOML or JSON).
        #[arg(long)]
        config: PathBuf,
    },
    /// Check the library against the bundled reference data.
    VerifyPaper {
        #[arg(long, value_enum)]
        section: Vec<SectionArg>,
    },
}

/// Outcome of a command that ran to completion.
pub enum Status {
    Pass,
    Fail,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let g = &cli.global;
    let result = match cli.command {
        Command::Analyze {
            stack,
            file,
            material,
            target,
            norm,
        } => commands::analyze(g, stack, file, material, target, norm),
        Command::Polar { components, inverse, rotate } => commands::polar(g, components, inverse, rotate),
        Command::Feasibility { input } => commands::feasibility(g, &input),
        Command::BlendCheck {
            parent,
            thinner,
            mode,
            covering,
        } => commands::blend_check(g, &parent, &thinner, mode, covering),
        Command::Discretize {
            input,
            adjacency,
            dnmin,
            nref,
            output,
        } => commands::discretize(g, &input, &adjacency, dnmin, nref, output),
        Command::Recover {
            targets,
            scheme,
            adjacency,
            covering,
            step,
            restarts,
            nref,
            norm,
            output,
        } => commands::recover(
            g,
            commands::RecoverArgs {
                targets,
                scheme,
                adjacency,
                covering,
                step,
                restarts,
                nref,
                norm,
                output,
            },
        ),
        Command::Pipeline { config } => commands::pipeline(g, &config),
        Command::VerifyPaper { section } => commands::verify_paper(g, &section),
    };
    match result {
        Ok(Status::Pass) => ExitCode::SUCCESS,
        Ok(Status::Fail) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            let checksum = e.chain().any(|c| matches!(c.downcast_ref(), Some(polarblend::Error::ChecksumMismatch { .. })));
            ExitCode::from(if checksum { 1 } else { 2 })
        }
    }
}
