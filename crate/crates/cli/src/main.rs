use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use alwdr::dag::{build_basic_dag, build_improved_dag, build_refined_dag, Dag};
use alwdr::driver::{
    approximate_alwdr, bench, gap_search, round_once, summarize, write_report, Algorithm, BenchSpec, DriverCaps,
    DriverError,
};
use alwdr::formulations::{build_dual_lp, build_edge_lp, build_path_lp, enumerate_segment_paths};
use alwdr::instance::{
    format_rational, generate_from_3dm, generate_random, instance_to_json, read_instance, segment_map,
    serialize_instance, GenParams, Instance, SegmentMap,
};
use alwdr::oracle::{brute_force_optimal, enumerate_optimal, fpt_exact, validate_schedule, Caps, OracleResult};
use alwdr::rounding::RandomSource;
use alwdr::Rational;
use alwdr_lp::{solve, write_lp_format, Backend, LpProblem, LpSolution};
use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser, Debug)]
#[command(name = "alwdr", version, about = "Multi-antenna broadcast retrieval: LP rounding and exact oracles")]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
struct Common {
    /// Random seed for generators and randomized rounding
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// LP arithmetic; rounding and exact solvers need `rational`
    #[arg(long, global = true, default_value = "rational")]
    backend: Backend,
    /// Resource cap for the command's search (paths, DP states, 2^B·|E|, instances)
    #[arg(long, global = true)]
    cap: Option<u64>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Generate a random instance
    Gen(GenArgs),
    /// Run the phase pipeline with a rounding algorithm, or an exact method
    Solve(SolveArgs),
    /// Exact optimum
    Oracle(OracleArgs),
    /// Round the LP optimum of an instance on its own segments
    Round(RoundArgs),
    /// Run algorithms over a corpus and write a CSV report
    Bench(BenchArgs),
    /// Search small two-channel instances for a large LP/optimum ratio
    GapSearch(GapArgs),
    /// Build the instance for a 3-dimensional matching problem
    #[command(name = "reduce-3dm")]
    Reduce3dm(ReduceArgs),
    /// Print an auxiliary DAG in Graphviz DOT format
    DumpDag(DagArgs),
    /// Print an LP relaxation in CPLEX LP format
    ExportLp(ExportArgs),
}

#[derive(Args, Debug)]
struct GenArgs {
    #[arg(long, default_value_t = 6)]
    items: usize,
    #[arg(long, default_value_t = 2)]
    channels: usize,
    #[arg(long, default_value_t = 8)]
    slots: usize,
    #[arg(long, default_value_t = 1)]
    antennae: usize,
    #[arg(long, default_value_t = 0.6)]
    density: f64,
    #[arg(long, default_value_t = 2)]
    max_occurrences: usize,
    /// Integer weight range `lo:hi`
    #[arg(long, default_value = "1:10", value_parser = parse_range)]
    weights: (u32, u32),
    /// Vacant slot after every `gamma` slots
    #[arg(long)]
    gamma: Option<usize>,
    /// Every item broadcast exactly once
    #[arg(long)]
    single: bool,
    /// No item repeats inside a segment
    #[arg(long)]
    once_per_segment: bool,
    #[arg(long)]
    json: bool,
    /// Output file (stdout if omitted)
    #[arg(short, long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct InstanceArg {
    /// Instance file (text or JSON)
    instance: PathBuf,
    /// Override the instance's antenna count
    #[arg(long)]
    antennae: Option<usize>,
}

#[derive(Args, Debug)]
struct SolveArgs {
    #[command(flatten)]
    input: InstanceArg,
    #[arg(long, default_value = "derandomized")]
    algorithm: Algorithm,
    /// Phase parameter in (0, 1], e.g. `1/4`; omit to round the instance as given
    #[arg(long)]
    eps: Option<Rational>,
    #[arg(long)]
    json: bool,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum OracleMethod {
    Dp,
    Enumerate,
    Fpt,
}

#[derive(Args, Debug)]
struct OracleArgs {
    #[command(flatten)]
    input: InstanceArg,
    #[arg(long, value_enum, default_value = "dp")]
    method: OracleMethod,
    #[arg(long)]
    json: bool,
}

#[derive(Args, Debug)]
struct RoundArgs {
    #[command(flatten)]
    input: InstanceArg,
    #[arg(long, default_value = "collective")]
    algorithm: Algorithm,
    #[arg(long)]
    json: bool,
}

#[derive(Args, Debug)]
struct BenchArgs {
    /// Instance files or directories of them
    #[arg(required = true)]
    corpus: Vec<PathBuf>,
    /// Comma-separated: lp, path-rounding, collective, derandomized, fpt
    #[arg(long, value_delimiter = ',', default_value = "lp,derandomized")]
    algorithms: Vec<Algorithm>,
    /// Number of seeds for randomized algorithms, starting at --seed
    #[arg(long, default_value_t = 10)]
    runs: u64,
    #[arg(long)]
    eps: Option<Rational>,
    /// Also compute the brute-force optimum
    #[arg(long)]
    oracle: bool,
    /// Report directory
    #[arg(short, long, default_value = "bench-out")]
    out: PathBuf,
}

#[derive(Args, Debug)]
struct GapArgs {
    #[arg(long, default_value_t = 4)]
    max_slots: usize,
    /// Broadcasts allowed per item
    #[arg(long, default_value_t = 2)]
    max_occurrences: usize,
    /// Write the best instance here
    #[arg(short, long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct ReduceArgs {
    /// File with one `x y z` triple per line
    triples: PathBuf,
    /// Size of each ground set (default: largest coordinate)
    #[arg(long)]
    x_size: Option<usize>,
    #[arg(short, long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, ValueEnum, PartialEq, Eq)]
enum DagVariant {
    Basic,
    Refined,
    Improved,
}

#[derive(Args, Debug)]
struct DagArgs {
    #[command(flatten)]
    input: InstanceArg,
    #[arg(long, value_enum, default_value = "basic")]
    variant: DagVariant,
    /// Duplicate over the whole horizon instead of per segment (improved only)
    #[arg(long)]
    horizon: bool,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Formulation {
    Edge,
    Dual,
    Path,
}

#[derive(Args, Debug)]
struct ExportArgs {
    #[command(flatten)]
    input: InstanceArg,
    #[arg(long, value_enum, default_value = "edge")]
    formulation: Formulation,
    /// DAG for the edge and dual formulations
    #[arg(long, value_enum)]
    variant: Option<DagVariant>,
    #[arg(long)]
    horizon: bool,
}

#[derive(Debug)]
enum Failure {
    Validation(String),
    Cap(String),
}

impl From<DriverError> for Failure {
    fn from(e: DriverError) -> Self {
        if e.is_cap() {
            Failure::Cap(e.to_string())
        } else {
            Failure::Validation(e.to_string())
        }
    }
}

fn fail<E: std::fmt::Display>(e: E) -> Failure {
    Failure::Validation(e.to_string())
}

fn parse_range(s: &str) -> Result<(u32, u32), String> {
    let (a, b) = s.split_once(':').ok_or("expected lo:hi")?;
    Ok((
        a.parse().map_err(|e| format!("{e}"))?,
        b.parse().map_err(|e| format!("{e}"))?,
    ))
}

fn emit(out: Option<&Path>, text: &str) -> Result<(), Failure> {
    match out {
        Some(p) => fs::write(p, text).map_err(|e| fail(format!("{}: {e}", p.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn load(arg: &InstanceArg) -> Result<Instance, Failure> {
    let text = fs::read_to_string(&arg.instance).map_err(|e| fail(format!("{}: {e}", arg.instance.display())))?;
    let inst = read_instance(&text).map_err(|e| fail(format!("{}: {e}", arg.instance.display())))?;
    match arg.antennae {
        Some(d) => inst.with_antennae(d).map_err(fail),
        None => Ok(inst),
    }
}

fn require_rational(c: &Common, what: &str) -> Result<(), Failure> {
    match c.backend {
        Backend::Rational => Ok(()),
        Backend::Float => Err(fail(format!("{what} needs exact LP values; use --backend rational"))),
    }
}

fn caps(c: &Common) -> DriverCaps {
    let mut caps = DriverCaps::default();
    if let Some(cap) = c.cap {
        caps.paths = cap as usize;
        caps.oracle = Caps {
            max_states: cap,
            max_enumeration: cap,
        };
        caps.fpt = cap;
    }
    caps
}

fn print_oracle(inst: &Instance, r: &OracleResult, json: bool) -> Result<(), Failure> {
    validate_schedule(inst, &r.witness).map_err(fail)?;
    if json {
        let v = serde_json::json!({
            "optimum": format_rational(&r.optimum),
            "witness": r.witness,
            "optimal_count": r.optimal_count,
            "stats": r.stats,
        });
        println!("{v}");
    } else {
        println!("optimum {}", format_rational(&r.optimum));
        if let Some(n) = r.optimal_count {
            println!("optimal assignments {n}");
        }
        println!("explored {} peak {}", r.stats.explored, r.stats.peak);
        print!("{}", r.witness);
    }
    Ok(())
}

fn build_dag(inst: &Instance, variant: DagVariant, horizon: bool) -> Dag {
    match variant {
        DagVariant::Basic => build_basic_dag(inst),
        DagVariant::Refined => build_refined_dag(inst),
        DagVariant::Improved => {
            let seg = if horizon {
                SegmentMap::whole_horizon(inst.slots())
            } else {
                segment_map(inst)
            };
            build_improved_dag(&build_refined_dag(inst), &seg)
        }
    }
}

fn corpus_files(paths: &[PathBuf]) -> Result<Vec<PathBuf>, Failure> {
    let mut files = Vec::new();
    for p in paths {
        if p.is_dir() {
            let mut inner: Vec<PathBuf> = fs::read_dir(p)
                .map_err(|e| fail(format!("{}: {e}", p.display())))?
                .filter_map(|e| e.ok().map(|e| e.path()))
                .filter(|f| f.is_file())
                .collect();
            inner.sort();
            files.extend(inner);
        } else {
            files.push(p.clone());
        }
    }
    Ok(files)
}

fn run(cli: Cli) -> Result<(), Failure> {
    let c = &cli.common;
    match cli.command {
        Command::Gen(a) => {
            let params = GenParams {
                items: a.items,
                channels: a.channels,
                slots: a.slots,
                antennae: a.antennae,
                weight_range: a.weights,
                density: a.density,
                max_occurrences: a.max_occurrences,
                single_occurrence: a.single,
                gamma: a.gamma,
                once_per_segment: a.once_per_segment,
            };
            let inst = generate_random(&params, c.seed).map_err(fail)?;
            let text = if a.json {
                instance_to_json(&inst) + "\n"
            } else {
                serialize_instance(&inst)
            };
            emit(a.out.as_deref(), &text)
        }
        Command::Solve(a) => {
            let inst = load(&a.input)?;
            match a.algorithm {
                Algorithm::Lp => {
                    let g = build_basic_dag(&inst);
                    let lp = build_edge_lp(&g, inst.antennae());
                    print_lp_value(&lp.problem, c.backend)
                }
                Algorithm::Fpt => {
                    require_rational(c, "fpt")?;
                    let r = fpt_exact(&inst, inst.antennae(), caps(c).fpt).map_err(DriverError::from)?;
                    print_oracle(&inst, &r, a.json)
                }
                alg => {
                    require_rational(c, "rounding")?;
                    let (s, rec) = approximate_alwdr(&inst, a.eps.as_ref(), alg, c.seed, &caps(c))?;
                    validate_schedule(&inst, &s).map_err(fail)?;
                    if a.json {
                        println!("{}", serde_json::json!({ "schedule": s, "record": rec }));
                    } else {
                        print!("{s}");
                        println!(
                            "weight {} lp {} phases {}",
                            rec.weight.unwrap_or_default(),
                            rec.lp_value.unwrap_or_default(),
                            rec.phase_weights
                        );
                    }
                    Ok(())
                }
            }
        }
        Command::Oracle(a) => {
            require_rational(c, "oracle")?;
            let inst = load(&a.input)?;
            let caps = caps(c);
            let r = match a.method {
                OracleMethod::Dp => brute_force_optimal(&inst, inst.antennae(), &caps.oracle),
                OracleMethod::Enumerate => enumerate_optimal(&inst, inst.antennae(), &caps.oracle),
                OracleMethod::Fpt => fpt_exact(&inst, inst.antennae(), caps.fpt),
            }
            .map_err(DriverError::from)?;
            print_oracle(&inst, &r, a.json)
        }
        Command::Round(a) => {
            require_rational(c, "rounding")?;
            let inst = load(&a.input)?;
            let mut rng = RandomSource::new(c.seed);
            let (s, lp) = round_once(&inst, a.algorithm, &mut rng, &caps(c))?;
            validate_schedule(&inst, &s).map_err(fail)?;
            if a.json {
                println!("{}", serde_json::json!({ "schedule": s, "lp": format_rational(&lp), "weight": format_rational(&s.weight(&inst)) }));
            } else {
                print!("{s}");
                println!("weight {} lp {}", format_rational(&s.weight(&inst)), format_rational(&lp));
            }
            Ok(())
        }
        Command::Bench(a) => {
            require_rational(c, "bench")?;
            let mut corpus = Vec::new();
            for f in corpus_files(&a.corpus)? {
                let text = fs::read_to_string(&f).map_err(|e| fail(format!("{}: {e}", f.display())))?;
                let inst = read_instance(&text).map_err(|e| fail(format!("{}: {e}", f.display())))?;
                corpus.push((f.display().to_string(), inst));
            }
            let spec = BenchSpec {
                algorithms: a.algorithms,
                seeds: (c.seed..c.seed + a.runs).collect(),
                eps: a.eps,
                oracle: a.oracle,
                caps: caps(c),
            };
            let rows = bench(&corpus, &spec);
            write_report(&a.out, &rows).map_err(fail)?;
            print!("{}", summarize(&rows));
            let failed = rows.iter().filter(|r| r.error.is_some()).count();
            if failed > 0 {
                eprintln!("{failed} cells failed; see {}", a.out.join("failures.txt").display());
            }
            Ok(())
        }
        Command::GapSearch(a) => {
            let cap = c.cap.unwrap_or(20_000) as usize;
            let report = gap_search(a.max_slots, a.max_occurrences, cap)?;
            println!("examined {}{}", report.examined, if report.partial { " (partial: cap reached)" } else { "" });
            if let Some(best) = report.best {
                println!(
                    "best ratio {} (lp {}, optimum {})",
                    format_rational(&best.ratio),
                    format_rational(&best.lp),
                    format_rational(&best.optimum)
                );
                emit(a.out.as_deref(), &serialize_instance(&best.instance))?;
            }
            if report.partial {
                return Err(Failure::Cap(format!("gap search stopped after {cap} instances")));
            }
            Ok(())
        }
        Command::Reduce3dm(a) => {
            let text = fs::read_to_string(&a.triples).map_err(|e| fail(format!("{}: {e}", a.triples.display())))?;
            let mut triples = Vec::new();
            for (i, line) in text.lines().enumerate() {
                let line = line.trim();
                if line.is_empty() || line.starts_with('#') {
                    continue;
                }
                let v: Vec<usize> = line
                    .split_whitespace()
                    .map(str::parse)
                    .collect::<Result<_, _>>()
                    .map_err(|e| fail(format!("line {}: {e}", i + 1)))?;
                match v[..] {
                    [x, y, z] => triples.push((x, y, z)),
                    _ => return Err(fail(format!("line {}: expected three integers", i + 1))),
                }
            }
            let x_size = a
                .x_size
                .unwrap_or_else(|| triples.iter().map(|&(x, y, z)| x.max(y).max(z)).max().unwrap_or(0));
            let inst = generate_from_3dm(&triples, x_size).map_err(fail)?;
            emit(a.out.as_deref(), &serialize_instance(&inst))
        }
        Command::DumpDag(a) => {
            let inst = load(&a.input)?;
            print!("{}", build_dag(&inst, a.variant, a.horizon).to_dot());
            Ok(())
        }
        Command::ExportLp(a) => {
            let inst = load(&a.input)?;
            let delta = inst.antennae();
            let problem = match a.formulation {
                Formulation::Edge => {
                    build_edge_lp(&build_dag(&inst, a.variant.unwrap_or(DagVariant::Basic), a.horizon), delta).problem
                }
                Formulation::Dual => {
                    let v = a.variant.unwrap_or(DagVariant::Refined);
                    if v == DagVariant::Basic {
                        return Err(fail("the dual LP needs the refined or improved DAG"));
                    }
                    build_dual_lp(&build_dag(&inst, v, a.horizon), delta).problem
                }
                Formulation::Path => {
                    let paths = enumerate_segment_paths(&inst, &segment_map(&inst), caps(c).paths)
                        .map_err(|e| Failure::Cap(e.to_string()))?;
                    build_path_lp(&inst, &paths, delta).problem
                }
            };
            print!("{}", write_lp_format(&problem));
            Ok(())
        }
    }
}

fn print_lp_value(problem: &LpProblem, backend: Backend) -> Result<(), Failure> {
    match backend {
        Backend::Rational => {
            let sol: LpSolution<Rational> = solve(problem).map_err(fail)?;
            println!("status {:?}", sol.status);
            println!("lp {}", format_rational(&sol.objective));
        }
        Backend::Float => {
            let sol: LpSolution<f64> = solve(problem).map_err(fail)?;
            println!("status {:?}", sol.status);
            println!("lp {}", sol.objective);
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Validation(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Cap(msg)) => {
            eprintln!("resource cap: {msg}");
            ExitCode::from(2)
        }
    }
}
