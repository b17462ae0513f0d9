use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use unialg::limits::Limits;
use unialg_cli::{Format, InputError, Mode, Report, Workspace};

#[derive(Parser)]
#[command(
    name = "unialg",
    version,
    about = "Checks models, proofs and clones of equational presentations"
)]
struct Cli {
    /// Limit overrides, e.g. `max_term_size=7,max_rounds=4`.
    #[arg(long, global = true, value_name = "K=V,...")]
    limits: Option<String>,
    #[arg(long, global = true, value_enum, default_value_t = FormatArg::Human)]
    format: FormatArg,
    /// Directory of extra `*.alg` models used as separating certificates.
    #[arg(long, global = true, value_name = "DIR")]
    fixtures: Option<PathBuf>,
    /// Report elapsed wall-clock time.
    #[arg(long, global = true)]
    timing: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Human,
    Machine,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Finite,
    Clone,
}

#[derive(Subcommand)]
enum Command {
    /// Checks every axiom of a presentation in a finite algebra.
    CheckModel {
        presentation: PathBuf,
        algebra: PathBuf,
    },
    /// Checks a proof script against a presentation.
    CheckProof {
        presentation: PathBuf,
        proof: PathBuf,
    },
    /// Searches for a proof of `LHS = RHS @N` within the limits.
    Prove {
        presentation: PathBuf,
        goal: String,
        /// Writes the proof script here when one is found.
        #[arg(long)]
        emit: Option<PathBuf>,
    },
    /// Looks for a countermodel (finite) or decides equality in the quotient clone (clone).
    Consequence {
        presentation: PathBuf,
        goal: String,
        #[arg(long, value_enum, default_value_t = ModeArg::Finite)]
        mode: ModeArg,
    },
    /// Builds the bounded free model on N generators.
    FreeModel {
        presentation: PathBuf,
        n: usize,
        /// Writes the operation tables here when the model is complete.
        #[arg(long)]
        emit: Option<PathBuf>,
    },
    /// Clone constructions and checks.
    #[command(subcommand)]
    Clone(CloneCommand),
}

#[derive(Subcommand)]
enum CloneCommand {
    /// The clone of all operations on M elements.
    End {
        m: usize,
        #[arg(long)]
        arity_cap: Option<usize>,
        #[arg(long)]
        check_axioms: bool,
    },
    /// Checks the clone laws on a clone file.
    Axioms { clone: PathBuf },
    /// The clone model of an algebra and its factorization through the quotient clone.
    Hom {
        presentation: PathBuf,
        algebra: PathBuf,
    },
    /// The bounded quotient clone of a presentation.
    Quotient {
        presentation: PathBuf,
        #[arg(long)]
        arity_cap: Option<usize>,
        #[arg(long)]
        check_axioms: bool,
        /// Writes the tabulated clone here.
        #[arg(long)]
        emit: Option<PathBuf>,
    },
    /// The subclone generated by an algebra's operations.
    Generate {
        algebra: PathBuf,
        /// Reads the algebra against this presentation's signature.
        #[arg(long)]
        presentation: Option<PathBuf>,
        #[arg(long)]
        arity_cap: Option<usize>,
        /// Largest number of generated elements.
        #[arg(long, default_value_t = 1 << 16)]
        budget: usize,
        #[arg(long)]
        emit: Option<PathBuf>,
    },
    /// The kernel presentation of a clone file (or of a presentation's quotient).
    Kernel {
        clone: PathBuf,
        #[arg(long, default_value_t = 4)]
        size_budget: usize,
    },
    /// The embedding of a clone into a product of operation clones.
    Embed { clone: PathBuf },
}

fn run(cli: Cli) -> Result<Report, InputError> {
    let limits = match &cli.limits {
        Some(spec) => Limits::default()
            .apply_overrides(spec)
            .map_err(InputError::Invalid)?,
        None => Limits::default(),
    };
    let mut ws = Workspace::new(limits, cli.fixtures);
    match cli.command {
        Command::CheckModel {
            presentation,
            algebra,
        } => ws.check_model(&presentation, &algebra),
        Command::CheckProof {
            presentation,
            proof,
        } => ws.check_proof(&presentation, &proof),
        Command::Prove {
            presentation,
            goal,
            emit,
        } => ws.prove(&presentation, &goal, emit.as_deref()),
        Command::Consequence {
            presentation,
            goal,
            mode,
        } => {
            let mode = match mode {
                ModeArg::Finite => Mode::Finite,
                ModeArg::Clone => Mode::Clone,
            };
            ws.consequence(&presentation, &goal, mode)
        }
        Command::FreeModel {
            presentation,
            n,
            emit,
        } => ws.free_model(&presentation, n, emit.as_deref()),
        Command::Clone(c) => match c {
            CloneCommand::End {
                m,
                arity_cap,
                check_axioms,
            } => ws.clone_end(m, arity_cap, check_axioms),
            CloneCommand::Axioms { clone } => ws.clone_axioms(&clone),
            CloneCommand::Hom {
                presentation,
                algebra,
            } => ws.clone_hom(&presentation, &algebra),
            CloneCommand::Quotient {
                presentation,
                arity_cap,
                check_axioms,
                emit,
            } => ws.clone_quotient(&presentation, arity_cap, check_axioms, emit.as_deref()),
            CloneCommand::Generate {
                algebra,
                presentation,
                arity_cap,
                budget,
                emit,
            } => {
                if let Some(k) = arity_cap {
                    ws.limits = ws.limits.with_arity_cap(k);
                }
                ws.clone_generate(&algebra, presentation.as_deref(), budget, emit.as_deref())
            }
            CloneCommand::Kernel { clone, size_budget } => ws.clone_kernel(&clone, size_budget),
            CloneCommand::Embed { clone } => ws.clone_embed(&clone),
        },
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let format = match cli.format {
        FormatArg::Human => Format::Human,
        FormatArg::Machine => Format::Machine,
    };
    let timing = cli.timing;
    let start = Instant::now();
    match run(cli) {
        Ok(mut report) => {
            if timing {
                report.field("elapsed_ms", start.elapsed().as_millis() as u64);
            }
            print!("{}", report.render(format));
            ExitCode::from(report.exit_code() as u8)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
