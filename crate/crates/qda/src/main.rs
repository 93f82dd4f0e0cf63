use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use qda::experiment::{cmd_experiment, ExperimentName, ExperimentOptions};
use qda::generate::{cmd_gen, cmd_replay, CircleBlock, GenSpec};
use qda::io::{read_matrix, read_permutation, write_json};
use qda::manifest::RunManifest;
use qda::solve::{exit_code, residuals, solve, summarize, write_outputs, Algorithm, IdeaArg, SolveOptions, StopArg, VariantArg};
use qda::{CliError, Result};
use qda_core::sfq::{basis_from_x, GeneralPencil};
use qda_core::ComplexMatrix;

#[derive(Parser)]
#[command(name = "qda", version, about = "Split eigenspaces of matrix pencils by guarded doubling")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a test instance into --out.
    Gen {
        #[command(subcommand)]
        family: GenCommand,
    },
    /// Solve A − λB for its stable/anti-stable split.
    Solve(SolveArgs),
    /// Run a batch experiment and write its tables into --out.
    Experiment(ExperimentArgs),
    /// Residuals of a stable basis, given as Z or as X with Q1.
    Residual(ResidualArgs),
}

#[derive(Subcommand)]
enum GenCommand {
    /// A = U·T·U⁻¹, B = I, with the top block of the stable basis scaled by eta.
    Split {
        #[arg(long)]
        m: usize,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 8.0)]
        alpha: f64,
        #[arg(long, default_value_t = 1.0)]
        eta: f64,
        #[command(flatten)]
        common: GenCommon,
    },
    /// Hamiltonian-like [[A, B], [−B̄, −Ā]] with A Hermitian, B symmetric.
    Bse {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 2.0)]
        gap_scale: f64,
        #[command(flatten)]
        common: GenCommon,
    },
    /// Pencil with even-size Jordan blocks on the unit circle.
    Critical {
        #[arg(long)]
        m_prime: usize,
        #[arg(long)]
        n_prime: usize,
        /// Circle block SIZE:RE:IM (repeatable); contributes J_{2·SIZE}(RE + i·IM).
        #[arg(long = "block", required = true)]
        blocks: Vec<CircleBlock>,
        #[arg(long, default_value_t = 0.3)]
        rho_stable: f64,
        #[arg(long, default_value_t = 0.3)]
        rho_anti: f64,
        #[command(flatten)]
        common: GenCommon,
    },
    /// Regenerate the instance described by a gen manifest.
    Replay {
        #[arg(long)]
        manifest: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Args)]
struct GenCommon {
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct SolveArgs {
    #[arg(long = "a")]
    a: PathBuf,
    /// Defaults to the identity.
    #[arg(long = "b")]
    b: Option<PathBuf>,
    #[arg(long)]
    m: usize,
    /// Defaults to dim − m.
    #[arg(long)]
    n: Option<usize>,
    #[arg(long, value_enum, default_value_t = Algorithm::Qda)]
    algorithm: Algorithm,
    /// Cayley shift, must be negative.
    #[arg(long, default_value_t = -1.0, allow_negative_numbers = true)]
    gamma: f64,
    /// The pencil already splits about the unit circle; skip the Cayley transform.
    #[arg(long)]
    disk: bool,
    #[arg(long, default_value_t = 1e-14)]
    rtol: f64,
    #[arg(long, value_enum, default_value_t = StopArg::Kahan)]
    stop: StopArg,
    /// Entry bound for X and Y; default max(1e3, 10·√(mn + 1)).
    #[arg(long)]
    tau: Option<f64>,
    #[arg(long, value_enum, default_value_t = IdeaArg::Three)]
    idea: IdeaArg,
    #[arg(long, value_enum, default_value_t = VariantArg::Afirst)]
    variant: VariantArg,
    #[arg(long, default_value_t = 50)]
    max_iter: usize,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct ExperimentArgs {
    #[arg(value_enum)]
    name: ExperimentName,
    /// First seed; runs use seed, seed+1, ….
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long, default_value_t = 3)]
    runs: usize,
    #[arg(long, default_value_t = 50)]
    m: usize,
    #[arg(long, default_value_t = 60)]
    n: usize,
    #[arg(long, default_value_t = 8.0)]
    alpha: f64,
    #[arg(long, value_delimiter = ',', default_values_t = [1e-4, 1e-5, 1e-6, 1e-7])]
    etas: Vec<f64>,
    /// bse_like half-sizes.
    #[arg(long, value_delimiter = ',', default_values_t = [64])]
    sizes: Vec<usize>,
    #[arg(long, default_value_t = 2.0)]
    gap_scale: f64,
    #[arg(long, default_value_t = 3)]
    m_prime: usize,
    #[arg(long, default_value_t = 3)]
    n_prime: usize,
    /// critical_rate Jordan half-sizes, one column each (ω = 1).
    #[arg(long, value_delimiter = ',', default_values_t = [2])]
    block_sizes: Vec<usize>,
    #[arg(long, default_value_t = 0.3)]
    rho: f64,
    #[arg(long)]
    rtol: Option<f64>,
    #[arg(long)]
    max_iter: Option<usize>,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct ResidualArgs {
    #[arg(long = "a")]
    a: PathBuf,
    #[arg(long = "b")]
    b: Option<PathBuf>,
    #[arg(long, conflicts_with_all = ["x", "q1"], required_unless_present = "x")]
    z: Option<PathBuf>,
    #[arg(long, requires = "q1")]
    x: Option<PathBuf>,
    #[arg(long)]
    q1: Option<PathBuf>,
}

fn load_pencil(a: &Path, b: Option<&Path>, m: usize, n: Option<usize>) -> Result<GeneralPencil> {
    let a = read_matrix(a)?;
    let b = match b {
        Some(p) => read_matrix(p)?,
        None => ComplexMatrix::identity(a.rows()),
    };
    let n = n.unwrap_or_else(|| a.rows().saturating_sub(m));
    Ok(GeneralPencil::new(a, b, m, n)?)
}

fn print_json<T: serde::Serialize>(v: &T) {
    println!("{}", serde_json::to_string_pretty(v).expect("serializable"));
}

fn run_solve(s: SolveArgs) -> Result<u8> {
    let opts = SolveOptions {
        algorithm: s.algorithm,
        gamma: s.gamma,
        disk: s.disk,
        rtol: s.rtol,
        stop: s.stop,
        tau: s.tau,
        idea: s.idea,
        variant: s.variant,
        max_iter: s.max_iter,
    };
    let params = serde_json::json!({
        "a": s.a, "b": s.b, "m": s.m, "n": s.n, "options": opts,
    });
    let manifest = RunManifest::start("solve", params, None);
    let g = load_pencil(&s.a, s.b.as_deref(), s.m, s.n)?;
    let outcome = solve(&g, &opts)?;
    let summary = summarize(&g, &opts, &outcome);
    write_outputs(&s.out, &summary, &outcome)?;
    write_json(&s.out.join("manifest.json"), &manifest.finish())?;
    print_json(&summary);
    Ok(exit_code(outcome.status))
}

fn run_residual(r: ResidualArgs) -> Result<u8> {
    let a = read_matrix(&r.a)?;
    let b = r.b.as_deref().map(read_matrix).transpose()?;
    let (z, x_norm) = match (&r.z, &r.x, &r.q1) {
        (Some(z), _, _) => (read_matrix(z)?, None),
        (None, Some(x), Some(q1)) => {
            let x = read_matrix(x)?;
            let q1 = read_permutation(q1)?;
            if q1.len() != a.rows() || x.rows() + x.cols() != a.rows() {
                return Err(CliError::Invalid("X and Q1 do not match the size of A".into()));
            }
            (basis_from_x(&q1, &x), Some(x.norm_fro()))
        }
        _ => return Err(CliError::Invalid("give --z, or --x with --q1".into())),
    };
    print_json(&residuals(&a, b.as_ref(), &z, x_norm)?);
    Ok(0)
}

fn run(cli: Cli) -> Result<u8> {
    match cli.command {
        Command::Gen { family } => {
            let info = match family {
                GenCommand::Split { m, n, alpha, eta, common } => {
                    cmd_gen(&GenSpec::Split { m, n, alpha, eta }, common.seed, &common.out)?
                }
                GenCommand::Bse { n, gap_scale, common } => cmd_gen(&GenSpec::Bse { n, gap_scale }, common.seed, &common.out)?,
                GenCommand::Critical { m_prime, n_prime, blocks, rho_stable, rho_anti, common } => cmd_gen(
                    &GenSpec::Critical { m_prime, n_prime, blocks, rho_stable, rho_anti },
                    common.seed,
                    &common.out,
                )?,
                GenCommand::Replay { manifest, out } => cmd_replay(&manifest, &out)?,
            };
            print_json(&info);
            Ok(0)
        }
        Command::Solve(s) => run_solve(s),
        Command::Experiment(e) => {
            let o = ExperimentOptions {
                seed: e.seed,
                runs: e.runs,
                m: e.m,
                n: e.n,
                alpha: e.alpha,
                etas: e.etas,
                sizes: e.sizes,
                gap_scale: e.gap_scale,
                m_prime: e.m_prime,
                n_prime: e.n_prime,
                block_sizes: e.block_sizes,
                rho: e.rho,
                rtol: e.rtol,
                max_iter: e.max_iter,
            };
            let records = cmd_experiment(e.name, &o, &e.out)?;
            let failed = records.iter().filter(|r| r.failed).count();
            println!("{} runs, {failed} failed; tables in {}", records.len(), e.out.display());
            Ok(0)
        }
        Command::Residual(r) => run_residual(r),
    }
}

fn main() -> ExitCode {
    // clap's own usage-error code is 2, which would read as MaxIter
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("qda: {e}");
            ExitCode::from(1)
        }
    }
}
