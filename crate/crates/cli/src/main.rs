//! `gidnet` command-line driver.
//!
//! Exit codes: 0 success, 1 I/O or other failure, 2 bad input (parse errors,
//! invalid flags or specs), 3 internal invariant breach, 4 a `verify` run
//! that found the circuits inequivalent.

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use gidnet::benchgen::{gen_grcs, gen_qaoa, GrcsSpec, QaoaSpec, DEFAULT_BETA, DEFAULT_GAMMA};
use gidnet::harness::{fit_rows, read_csv, run_bench, write_csv, write_json, BenchConfig, Family};
use gidnet::rewrite::validate_solution;
use gidnet::search::{search, SolutionReport};
use gidnet::verify::{equivalence_check, VerifyError, DEFAULT_TOLERANCE};
use gidnet::{parse_circuit, rewrite_dynamic, Circuit, CircuitDag, Iterations, ReuseMatrices, SearchConfig};

/// Seed used when `--seed` is not given, so bare runs are reproducible.
const DEFAULT_SEED: u64 = 0x6769_646e_6574;

#[derive(Parser)]
#[command(name = "gidnet", version, about = "Qubit reuse compiler for static quantum circuits")]
struct Cli {
    /// Master seed: an unsigned integer (decimal or 0x hex), or `random` to
    /// draw one from the OS [default: 0x6769646e6574]
    #[arg(long, global = true, value_parser = parse_seed)]
    seed: Option<SeedArg>,
    /// Search passes per compile: a positive integer or `auto` (ceil(log2 n))
    #[arg(long, global = true, default_value = "auto")]
    iterations: Iterations,
    /// Suppress informational output
    #[arg(long, short, global = true)]
    quiet: bool,
    /// Print machine-readable JSON instead of text
    #[arg(long, global = true)]
    json: bool,
    /// Worker threads for independent search passes
    #[arg(long, global = true, default_value_t = 1)]
    threads: usize,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy)]
enum SeedArg {
    Fixed(u64),
    Random,
}

fn parse_seed(s: &str) -> Result<SeedArg, String> {
    if s == "random" {
        return Ok(SeedArg::Random);
    }
    let parsed = match s.strip_prefix("0x") {
        Some(hex) => u64::from_str_radix(hex, 16),
        None => s.parse(),
    };
    parsed
        .map(SeedArg::Fixed)
        .map_err(|_| format!("expected an unsigned integer or `random`, found `{s}`"))
}

#[derive(Subcommand)]
enum Command {
    /// Compile a static circuit into a dynamic one
    Compile(CompileArgs),
    /// Generate a benchmark circuit
    #[command(subcommand)]
    Gen(GenCommand),
    /// Benchmark compiled widths and runtimes
    Bench(BenchArgs),
    /// Check that two circuits have the same outcome distribution
    Verify(VerifyArgs),
    /// Fit a polynomial to benchmark runtimes
    Fit(FitArgs),
}

#[derive(Args)]
struct CompileArgs {
    /// Static circuit in OpenQASM 2 form
    input: PathBuf,
    /// Dynamic circuit output [default: <input stem>.dyn.qasm]
    #[arg(short, long)]
    output: Option<PathBuf>,
    /// Solution JSON output [default: <input stem>.solution.json]
    #[arg(long)]
    solution: Option<PathBuf>,
    /// Check the result against the input with the branching simulator
    #[arg(long)]
    verify: bool,
    /// Print the biadjacency and candidate matrices
    #[arg(long)]
    dump_matrices: bool,
}

#[derive(Subcommand)]
enum GenCommand {
    /// Lattice random-circuit-sampling circuit
    Grcs {
        #[arg(long)]
        rows: usize,
        #[arg(long)]
        cols: usize,
        #[arg(long)]
        depth: usize,
        #[arg(short, long)]
        output: PathBuf,
    },
    /// QAOA MaxCut circuit on a random 3-regular graph
    Qaoa {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        p: usize,
        /// Cost angle, repeated for every layer
        #[arg(long, default_value_t = DEFAULT_GAMMA)]
        gamma: f64,
        /// Mixer angle, repeated for every layer
        #[arg(long, default_value_t = DEFAULT_BETA)]
        beta: f64,
        #[arg(short, long)]
        output: PathBuf,
        /// Also write the graph as an edge list
        #[arg(long)]
        graph_out: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum OutFormat {
    Csv,
    Json,
}

#[derive(Args)]
struct BenchArgs {
    #[arg(long)]
    family: Family,
    /// Comma-separated qubit counts
    #[arg(long, value_delimiter = ',', required = true)]
    sizes: Vec<usize>,
    /// GRCS cycle count
    #[arg(long, conflicts_with = "p")]
    depth: Option<usize>,
    /// QAOA layer count
    #[arg(long)]
    p: Option<usize>,
    /// Compilations per instance; the narrowest width is kept
    #[arg(long, default_value_t = 10)]
    repeats: usize,
    /// Timed compilations per instance
    #[arg(long, default_value_t = 7)]
    time_reps: usize,
    /// Instances per size
    #[arg(long, default_value_t = 1)]
    instances: usize,
    #[arg(long, value_enum, default_value = "csv")]
    out: OutFormat,
    /// Output file [default: stdout]
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    /// Static circuit
    reference: PathBuf,
    /// Dynamic circuit [default: compile the static circuit]
    candidate: Option<PathBuf>,
    /// Largest accepted total variation distance
    #[arg(long, default_value_t = DEFAULT_TOLERANCE)]
    tol: f64,
}

#[derive(Args)]
struct FitArgs {
    #[arg(long, default_value_t = 3)]
    degree: usize,
    /// Benchmark CSV
    #[arg(long = "in")]
    input: PathBuf,
}

struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn input(message: impl ToString) -> Failure {
        Failure {
            code: 2,
            message: message.to_string(),
        }
    }

    fn invariant(message: impl ToString) -> Failure {
        Failure {
            code: 3,
            message: message.to_string(),
        }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Failure {
        Failure {
            code: 1,
            message: e.to_string(),
        }
    }
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Failure {
        Failure {
            code: 1,
            message: format!("{e:#}"),
        }
    }
}

struct Context {
    seed: u64,
    iterations: Iterations,
    quiet: bool,
    json: bool,
    threads: usize,
}

impl Context {
    fn search_config(&self) -> SearchConfig {
        SearchConfig {
            iterations: self.iterations,
            seed: self.seed,
            threads: self.threads.max(1),
            ..SearchConfig::default()
        }
    }

    fn info(&self, msg: impl std::fmt::Display) {
        if !self.quiet {
            eprintln!("{msg}");
        }
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure {
        code: 1,
        message: format!("{}: {e}", path.display()),
    })
}

fn write(path: &Path, contents: &str) -> Result<(), Failure> {
    fs::write(path, contents).map_err(|e| Failure {
        code: 1,
        message: format!("{}: {e}", path.display()),
    })
}

fn load_circuit(path: &Path) -> Result<Circuit, Failure> {
    parse_circuit(&read(path)?).map_err(|e| Failure::input(format!("{}: {e}", path.display())))
}

fn sibling(input: &Path, suffix: &str) -> PathBuf {
    let stem = input.file_stem().map_or_else(|| "circuit".into(), |s| s.to_string_lossy().into_owned());
    input.with_file_name(format!("{stem}{suffix}"))
}

fn compile(ctx: &Context, args: &CompileArgs) -> Result<(), Failure> {
    let circuit = load_circuit(&args.input)?;
    let dag = CircuitDag::build(&circuit).map_err(Failure::input)?;
    let matrices = ReuseMatrices::of(&dag);
    if args.dump_matrices {
        print!("{}", matrices.dump());
    }
    let config = ctx.search_config();
    let solution = search(&matrices.candidate, &config).map_err(Failure::invariant)?;

    let report = validate_solution(&circuit, &solution).map_err(Failure::input)?;
    if !report.pass {
        let detail = serde_json::to_string(&report).unwrap_or_default();
        return Err(Failure::invariant(format!("search produced an invalid solution: {detail}")));
    }
    let dynamic = rewrite_dynamic(&circuit, &solution).map_err(Failure::invariant)?;

    let out_path = args.output.clone().unwrap_or_else(|| sibling(&args.input, ".dyn.qasm"));
    let sol_path = args.solution.clone().unwrap_or_else(|| sibling(&args.input, ".solution.json"));
    let iterations = config.iterations.resolve(circuit.num_qubits());
    let solution_json = serde_json::to_string_pretty(&SolutionReport::new(&solution, iterations, config.seed))
        .map_err(anyhow::Error::from)?;
    write(&out_path, &dynamic.to_qasm())?;
    write(&sol_path, &(solution_json + "\n"))?;

    let mut tvd = None;
    if args.verify {
        match equivalence_check(&circuit, &dynamic, DEFAULT_TOLERANCE) {
            Ok(r) if r.pass => tvd = Some(r.tvd),
            Ok(r) => {
                return Err(Failure::invariant(format!(
                    "dynamic circuit is not equivalent to the input (tvd {})",
                    r.tvd
                )))
            }
            Err(e @ (VerifyError::TooManyWires { .. } | VerifyError::TooManyClbits { .. })) => {
                ctx.info(format!("verification skipped: {e}"));
            }
            Err(e) => return Err(Failure::invariant(e)),
        }
    }

    let n = circuit.num_qubits();
    let irreducible = matrices.candidate.is_zero();
    if ctx.json {
        let summary = json!({
            "input_width": n,
            "width": solution.width(),
            "irreducible": irreducible,
            "sequences": solution.sequences().iter().map(|s| s.indices()).collect::<Vec<_>>(),
            "output": out_path.display().to_string(),
            "solution": sol_path.display().to_string(),
            "tvd": tvd,
        });
        println!("{summary}");
    } else if !ctx.quiet {
        println!("width {n} -> {}", solution.width());
        if irreducible {
            println!("irreducible");
        }
        if let Some(t) = tvd {
            println!("verified tvd {t:e}");
        }
    }
    Ok(())
}

fn generate(ctx: &Context, cmd: &GenCommand) -> Result<(), Failure> {
    let (circuit, path) = match cmd {
        GenCommand::Grcs {
            rows,
            cols,
            depth,
            output,
        } => {
            let spec = GrcsSpec::new(*rows, *cols, *depth, ctx.seed).map_err(Failure::input)?;
            (gen_grcs(&spec), output)
        }
        GenCommand::Qaoa {
            n,
            p,
            gamma,
            beta,
            output,
            graph_out,
        } => {
            let graph = gidnet::benchgen::gen_u3r(*n, ctx.seed).map_err(Failure::input)?;
            if let Some(g) = graph_out {
                write(g, &graph.to_edge_list())?;
            }
            let spec = QaoaSpec::with_angles(graph, vec![*gamma; *p], vec![*beta; *p], ctx.seed)
                .map_err(Failure::input)?;
            (gen_qaoa(&spec), output)
        }
    };
    write(path, &circuit.to_string())?;
    if ctx.json {
        println!(
            "{}",
            json!({"output": path.display().to_string(), "qubits": circuit.num_qubits(), "gates": circuit.gate_count()})
        );
    } else {
        ctx.info(format!(
            "wrote {} ({} qubits, {} gates)",
            path.display(),
            circuit.num_qubits(),
            circuit.gate_count()
        ));
    }
    Ok(())
}

fn bench(ctx: &Context, args: &BenchArgs) -> Result<(), Failure> {
    let depth_or_p = match (args.family, args.depth, args.p) {
        (_, Some(d), None) | (_, None, Some(d)) => d,
        (Family::Grcs, None, None) => 11,
        (Family::Qaoa, None, None) => 1,
        (_, Some(_), Some(_)) => unreachable!("clap rejects --depth with --p"),
    };
    let config = BenchConfig {
        repeats: args.repeats,
        time_reps: args.time_reps,
        seed: ctx.seed,
        instances: args.instances,
        iterations: ctx.iterations,
        threads: ctx.threads.max(1),
        ..BenchConfig::new(args.family, args.sizes.clone(), depth_or_p)
    };
    let records = run_bench(&config).map_err(Failure::input)?;
    let mut buf = Vec::new();
    match args.out {
        OutFormat::Csv => write_csv(&records, &mut buf),
        OutFormat::Json => write_json(&records, &mut buf),
    }
    .map_err(|e| Failure {
        code: 1,
        message: e.to_string(),
    })?;
    match &args.output {
        Some(path) => fs::write(path, &buf)?,
        None => io::stdout().write_all(&buf)?,
    }
    Ok(())
}

fn verify(ctx: &Context, args: &VerifyArgs) -> Result<(), Failure> {
    let reference = load_circuit(&args.reference)?;
    let candidate = match &args.candidate {
        Some(path) => load_circuit(path)?,
        None => {
            let solution = gidnet::gidnet(&reference, &ctx.search_config()).map_err(Failure::input)?;
            rewrite_dynamic(&reference, &solution)
                .map_err(Failure::invariant)?
                .circuit()
                .clone()
        }
    };
    let report = equivalence_check(&reference, &candidate, args.tol).map_err(Failure::input)?;
    println!("{}", json!({"pass": report.pass, "tvd": report.tvd, "branches": report.branches}));
    if !report.pass {
        return Err(Failure {
            code: 4,
            message: format!("circuits differ: tvd {} exceeds {}", report.tvd, args.tol),
        });
    }
    Ok(())
}

fn fit(args: &FitArgs) -> Result<(), Failure> {
    let rows = read_csv(read(&args.input)?.as_bytes()).map_err(Failure::input)?;
    let report = fit_rows(&rows, args.degree).map_err(Failure::input)?;
    if let Some(w) = &report.warning {
        eprintln!("warning: {w}");
    }
    println!("{}", serde_json::to_string(&report).map_err(anyhow::Error::from)?);
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let seed = match cli.seed {
        None => DEFAULT_SEED,
        Some(SeedArg::Fixed(s)) => s,
        Some(SeedArg::Random) => {
            let s = rand::random();
            if !cli.quiet {
                eprintln!("seed {s}");
            }
            s
        }
    };
    let ctx = Context {
        seed,
        iterations: cli.iterations,
        quiet: cli.quiet,
        json: cli.json,
        threads: cli.threads,
    };
    let result = match &cli.command {
        Command::Compile(args) => compile(&ctx, args),
        Command::Gen(cmd) => generate(&ctx, cmd),
        Command::Bench(args) => bench(&ctx, args),
        Command::Verify(args) => verify(&ctx, args),
        Command::Fit(args) => fit(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
