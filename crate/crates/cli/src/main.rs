mod bench;
mod commands;
mod io;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

/// Structural parameters, kernels and reductions for ground disjunctive programs.
#[derive(Parser)]
#[command(name = "aspstruct", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Dump the primal, incidence or rule-typed primal graphs.
    Graph {
        file: PathBuf,
        #[arg(long, value_enum, default_value_t = GraphKind::Primal)]
        kind: GraphKind,
        #[arg(long, value_enum, default_value_t = GraphFormat::Dot)]
        format: GraphFormat,
    },
    /// Compute and verify structural parameters; all of them when no flag is given.
    Params(ParamsArgs),
    /// Vertex-cover kernel.
    Kernel {
        file: PathBuf,
        #[arg(long, value_enum, default_value_t = KernelMode::Primal)]
        mode: KernelMode,
        /// Maximum rule size; defaults to the largest rule of the input.
        #[arg(long)]
        c: Option<usize>,
        /// Whitespace-separated atom names (and rule labels for --mode incidence).
        #[arg(long)]
        cover: Option<PathBuf>,
        #[arg(short, long)]
        output: Option<PathBuf>,
        /// Write the JSON report (removal log, bounds) here.
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Apply a reduction; writes program.lp and sidecar.json into the output directory.
    Reduce {
        file: PathBuf,
        #[arg(long, value_enum)]
        mode: ReduceMode,
        /// Atom names of S for fvs modes, a PACE .td file over the primal graph otherwise.
        #[arg(long)]
        witness: Option<PathBuf>,
        #[arg(short, long)]
        out: PathBuf,
        /// td modes: emit the construction verbatim instead of the sound variant.
        #[arg(long)]
        literal: bool,
        #[arg(long, value_enum, default_value_t = Scheme::Paired)]
        scheme: Scheme,
    },
    /// Decide consistency. Exit code 10 when consistent, 20 when not.
    Solve {
        file: PathBuf,
        #[arg(long, value_enum, default_value_t = SolveMethod::Oracle)]
        method: SolveMethod,
        #[arg(long)]
        c: Option<usize>,
        /// Count answer sets (oracle method).
        #[arg(long)]
        count: bool,
        /// List answer sets (oracle method).
        #[arg(long)]
        models: bool,
    },
    /// Compare a source program with a reduction output directory.
    Verify {
        src: PathBuf,
        out_dir: PathBuf,
        #[arg(long, value_enum, default_value_t = VerifyMode::Set)]
        mode: VerifyMode,
    },
    /// Encode a DIMACS CNF (clauses of at most three literals) as a program.
    Sat2asp {
        file: PathBuf,
        /// Add x, x_bar exclusion constraints.
        #[arg(long)]
        exclusive: bool,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Parameters before and after R_fvs and R_td on seeded random programs.
    Bench(bench::BenchArgs),
}

#[derive(clap::Args)]
pub struct ParamsArgs {
    file: PathBuf,
    #[arg(long)]
    vc: bool,
    #[arg(long)]
    fvs: bool,
    #[arg(long)]
    sparse_fvs: bool,
    #[arg(long)]
    td: bool,
    #[arg(long)]
    pd: bool,
    /// Bandwidth and cutwidth.
    #[arg(long)]
    layout: bool,
    #[arg(long)]
    tremaux: bool,
    /// Exact routines where the graph is small enough.
    #[arg(long)]
    exact: bool,
}

#[derive(Clone, Copy, ValueEnum)]
pub enum GraphKind {
    Primal,
    Incidence,
    Typed,
}

#[derive(Clone, Copy, ValueEnum)]
pub enum GraphFormat {
    Dot,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
pub enum KernelMode {
    Primal,
    Extended,
    Incidence,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ReduceMode {
    Fvs,
    FvsPaths,
    Td,
    TdLocal,
    Degree,
}

#[derive(Clone, Copy, ValueEnum)]
pub enum Scheme {
    Paired,
    Ring,
}

#[derive(Clone, Copy, ValueEnum)]
pub enum SolveMethod {
    Oracle,
    Vc,
}

#[derive(Clone, Copy, ValueEnum)]
pub enum VerifyMode {
    Set,
    Bijection,
    Consistency,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Graph { file, kind, format } => commands::graph(&file, kind, format),
        Command::Params(args) => commands::params(&args),
        Command::Kernel { file, mode, c, cover, output, report } => {
            commands::kernel(&file, mode, c, cover.as_deref(), output.as_deref(), report.as_deref())
        }
        Command::Reduce { file, mode, witness, out, literal, scheme } => {
            commands::reduce(&file, mode, witness.as_deref(), &out, literal, scheme)
        }
        Command::Solve { file, method, c, count, models } => commands::solve(&file, method, c, count, models),
        Command::Verify { src, out_dir, mode } => commands::verify(&src, &out_dir, mode),
        Command::Sat2asp { file, exclusive, output } => commands::sat2asp(&file, exclusive, output.as_deref()),
        Command::Bench(args) => bench::run(&args),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
