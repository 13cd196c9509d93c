use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use entkit::tol::Tolerances;
use entkit_cli::commands::{
    cmd_analyze, cmd_ef, cmd_generate, cmd_search, EfParams, GenerateKind, GenerateParams,
    GlobalOpts, SearchParams,
};

/// Bipartite mixed-state toolkit: distillability and separability criteria,
/// local filtering, entanglement-of-formation bounds, and candidate search.
#[derive(Parser)]
#[command(name = "entkit", version, about)]
struct Cli {
    /// Master seed; all randomness derives from it deterministically.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,

    /// Write the machine-readable report to this path.
    #[arg(long, global = true, value_name = "PATH")]
    json: Option<PathBuf>,

    /// Relative eigenvalue cutoff for numerical ranks.
    #[arg(long, global = true, default_value_t = 1e-10, value_name = "X")]
    epsilon_rank: f64,

    /// Positive semi-definiteness tolerance for verdicts.
    #[arg(long, global = true, default_value_t = 1e-9, value_name = "X")]
    tol_psd: f64,

    #[command(subcommand)]
    command: Command,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum KindArg {
    Bell,
    Product,
    Tiles,
    Random,
    RandomSeparable,
    Mixture,
}

#[derive(Subcommand)]
enum Command {
    /// Run every criterion on a state file and report the verdicts.
    Analyze {
        /// State file (JSON, schema version 1).
        input: PathBuf,
    },
    /// Write a state file for a fixture, a random draw, or a mixture.
    Generate {
        kind: KindArg,
        /// Local dimensions, e.g. 3x3.
        #[arg(long, value_name = "MxN")]
        dims: Option<String>,
        /// Rank for `random`.
        #[arg(long)]
        rank: Option<usize>,
        /// Product terms for `random-separable`.
        #[arg(long)]
        terms: Option<usize>,
        /// Product-state weight for `mixture`: (p|00><00| + |psi><psi|)/(1+p).
        #[arg(long)]
        p: Option<f64>,
        /// Amplitudes "a,b,c,d" of psi for `mixture` (normalized here).
        #[arg(long)]
        psi: Option<String>,
        /// Output path; stdout when omitted.
        #[arg(long, short, value_name = "PATH")]
        out: Option<PathBuf>,
    },
    /// Upper-bound the entanglement of formation of a state file.
    Ef {
        input: PathBuf,
        /// Ensemble size; defaults to rank².
        #[arg(long)]
        k: Option<usize>,
        #[arg(long, default_value_t = 20)]
        restarts: usize,
        /// Rotation-trial cap per restart.
        #[arg(long, default_value_t = 10_000)]
        max_iterations: usize,
        /// Also bound E_f for tensor powers up to this n.
        #[arg(long, value_name = "N")]
        tensor_n: Option<usize>,
        /// Ensemble-size cap for the tensor-power explorer.
        #[arg(long, default_value_t = 64)]
        k_cap: usize,
        /// Wall-clock budget for the tensor-power explorer, seconds.
        #[arg(long, default_value_t = 120)]
        budget_secs: u64,
    },
    /// Sweep seeded random states and keep bound-entanglement candidates.
    Search {
        #[arg(long, value_name = "MxN")]
        dims: String,
        #[arg(long)]
        rank: usize,
        #[arg(long)]
        trials: usize,
        /// Directory for survivor states, reports, and the histogram.
        #[arg(long, short, value_name = "DIR")]
        out: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let opts = GlobalOpts {
        seed: cli.seed,
        json: cli.json.clone(),
        tolerances: Tolerances {
            rank_epsilon: cli.epsilon_rank,
            psd: cli.tol_psd,
        },
    };

    let outcome = match cli.command {
        Command::Analyze { input } => cmd_analyze(&input, &opts),
        Command::Generate {
            kind,
            dims,
            rank,
            terms,
            p,
            psi,
            out,
        } => {
            let kind = match kind {
                KindArg::Bell => GenerateKind::Bell,
                KindArg::Product => GenerateKind::Product,
                KindArg::Tiles => GenerateKind::Tiles,
                KindArg::Random => GenerateKind::Random,
                KindArg::RandomSeparable => GenerateKind::RandomSeparable,
                KindArg::Mixture => GenerateKind::Mixture,
            };
            cmd_generate(
                &GenerateParams {
                    kind,
                    dims,
                    rank,
                    terms,
                    p,
                    psi,
                    out,
                },
                &opts,
            )
        }
        Command::Ef {
            input,
            k,
            restarts,
            max_iterations,
            tensor_n,
            k_cap,
            budget_secs,
        } => cmd_ef(
            &EfParams {
                input,
                k,
                restarts,
                max_iterations,
                tensor_n,
                k_cap,
                budget_secs,
            },
            &opts,
        ),
        Command::Search {
            dims,
            rank,
            trials,
            out,
        } => cmd_search(
            &SearchParams {
                dims,
                rank,
                trials,
                out,
            },
            &opts,
        ),
    };

    match outcome {
        Ok(text) => {
            print!("{text}");
            ExitCode::SUCCESS
        }
        Err(err) => {
            eprintln!("error: {}", err.message);
            ExitCode::from(err.code as u8)
        }
    }
}
