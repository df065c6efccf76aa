//! Command-line front end: generate instances, run the solvers, validate
//! files, and drive the benchmark harness.
//!
//! Exit codes: 0 success, 1 failed checks or solver errors, 2 unusable
//! input (unreadable or malformed files, bad option values).

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use pickroute_core::datagen::{
    default_catalog, generate_instance, parse_catalog, synthetic_base, GenSpec, RobotCatalogEntry,
};
use pickroute_core::experiment::{
    comparisons_csv, run_experiment, runs_csv, summary_csv, timings_csv, Algorithm,
    ExperimentConfig, ExperimentInstance,
};
use pickroute_core::io::{read_instance, read_solution, write_instance, write_solution};
use pickroute_core::model::{
    brute_force_optimum, validate_instance, validate_solution, Family, Instance,
};
use pickroute_core::rng::derive_seed;

#[derive(Parser)]
#[command(
    name = "pickroute",
    version,
    about = "Multi-robot order picking: instance tools, solvers, and benchmarks"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate benchmark instances.
    Generate(GenerateArgs),
    /// Solve an instance file with one of the solvers.
    Solve(SolveArgs),
    /// Validate an instance file, optionally with a solution file.
    Validate(ValidateArgs),
    /// Run the benchmark harness and export CSV reports.
    Bench(BenchArgs),
    /// Exact optimum of a tiny instance by exhaustive search.
    Oracle(OracleArgs),
}

#[derive(Args)]
struct GenerateArgs {
    /// Output directory for instance files.
    #[arg(long, default_value = ".")]
    out: PathBuf,
    /// Family to generate: XMT, RMT, WMT, SMT, or `all`.
    #[arg(long, default_value = "all")]
    family: String,
    /// Base seed; each generated file derives its own seed from it.
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Number of seeded variations per family.
    #[arg(long, default_value_t = 1)]
    count: u32,
    /// Base instance file (native or classic CVRP). Defaults to a
    /// synthetic single-depot base built from the options below.
    #[arg(long)]
    base: Option<PathBuf>,
    /// Robot catalog TSV (name, capacity, speed); defaults to the built-in
    /// catalog.
    #[arg(long)]
    catalog: Option<PathBuf>,
    /// Synthetic base: number of picking tasks.
    #[arg(long, default_value_t = 100)]
    tasks: usize,
    /// Synthetic base: fleet size.
    #[arg(long, default_value_t = 10)]
    robots: usize,
    /// Synthetic base: vehicle capacity.
    #[arg(long, default_value_t = 100)]
    capacity: u32,
    /// Synthetic base: grid side length.
    #[arg(long, default_value_t = 60)]
    extent: i32,
    /// Synthetic base: largest task demand.
    #[arg(long, default_value_t = 30)]
    max_demand: u32,
}

#[derive(Args)]
struct SolveArgs {
    /// Instance file to solve.
    #[arg(long)]
    instance: PathBuf,
    /// Solver: `done-cpta` or `a-ncar`.
    #[arg(long, default_value = "done-cpta")]
    algo: String,
    /// Write the solution as JSON to this path.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ValidateArgs {
    /// Instance file to check.
    #[arg(long)]
    instance: PathBuf,
    /// Solution file to check against the instance.
    #[arg(long)]
    solution: Option<PathBuf>,
}

#[derive(Args)]
struct BenchArgs {
    /// Output directory for the CSV reports.
    #[arg(long, default_value = "bench-out")]
    out: PathBuf,
    /// Base seed for the whole experiment.
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Seeded variations per instance.
    #[arg(long, default_value_t = 30)]
    variations: u32,
    /// Solvers to run: `all` or a comma list of done-cpta,a-ncar.
    #[arg(long, default_value = "all")]
    algos: String,
    /// Families for generated instances: `all` or a comma list.
    #[arg(long, default_value = "all")]
    families: String,
    /// Task counts for generated instances, comma separated.
    #[arg(long, default_value = "100,200")]
    sizes: String,
    /// Fleet size of the generated bases.
    #[arg(long, default_value_t = 10)]
    robots: usize,
    /// Benchmark these instance files instead of generated instances.
    #[arg(long, num_args = 1..)]
    instances: Vec<PathBuf>,
    /// Attach brute-force optima to runs on tiny instances.
    #[arg(long, default_value_t = false)]
    optimum: bool,
}

#[derive(Args)]
struct OracleArgs {
    /// Instance file to solve exactly.
    #[arg(long)]
    instance: PathBuf,
    /// Write the optimal solution as JSON to this path.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let code = match cli.command {
        Command::Generate(args) => cmd_generate(&args),
        Command::Solve(args) => cmd_solve(&args),
        Command::Validate(args) => cmd_validate(&args),
        Command::Bench(args) => cmd_bench(&args),
        Command::Oracle(args) => cmd_oracle(&args),
    };
    ExitCode::from(code)
}

fn load_instance(path: &Path) -> Result<Instance, u8> {
    read_instance(path).map_err(|e| {
        eprintln!("error: {}: {e}", path.display());
        2
    })
}

fn parse_families(spec: &str) -> Result<Vec<Family>, u8> {
    if spec.eq_ignore_ascii_case("all") {
        return Ok(Family::ALL.to_vec());
    }
    spec.split(',')
        .map(|s| {
            Family::parse(s.trim()).ok_or_else(|| {
                eprintln!("error: unknown family `{}`", s.trim());
                2
            })
        })
        .collect()
}

fn parse_algorithms(spec: &str) -> Result<Vec<Algorithm>, u8> {
    if spec.eq_ignore_ascii_case("all") || spec.eq_ignore_ascii_case("both") {
        return Ok(Algorithm::ALL.to_vec());
    }
    spec.split(',')
        .map(|s| {
            Algorithm::parse(s.trim()).ok_or_else(|| {
                eprintln!("error: unknown algorithm `{}`", s.trim());
                2
            })
        })
        .collect()
}

fn load_catalog(path: Option<&Path>) -> Result<Vec<RobotCatalogEntry>, u8> {
    match path {
        None => Ok(default_catalog()),
        Some(path) => {
            let text = fs::read_to_string(path).map_err(|e| {
                eprintln!("error: {}: {e}", path.display());
                2
            })?;
            parse_catalog(&text).map_err(|e| {
                eprintln!("error: {}: {e}", path.display());
                2
            })
        }
    }
}

fn cmd_generate(args: &GenerateArgs) -> u8 {
    let families = match parse_families(&args.family) {
        Ok(f) => f,
        Err(code) => return code,
    };
    let catalog = match load_catalog(args.catalog.as_deref()) {
        Ok(c) => c,
        Err(code) => return code,
    };
    let base = match &args.base {
        Some(path) => match load_instance(path) {
            Ok(instance) => instance,
            Err(code) => return code,
        },
        None => match synthetic_base(
            args.tasks,
            args.robots,
            args.capacity,
            args.extent,
            args.max_demand,
            args.seed,
        ) {
            Ok(instance) => instance,
            Err(e) => {
                eprintln!("error: building synthetic base: {e}");
                return 1;
            }
        },
    };
    if let Err(e) = fs::create_dir_all(&args.out) {
        eprintln!("error: {}: {e}", args.out.display());
        return 1;
    }

    for family in families {
        for k in 0..args.count {
            let seed = derive_seed(args.seed, u64::from(k));
            let spec = GenSpec::new(&base, family, seed, &catalog);
            let instance = match generate_instance(&spec) {
                Ok(instance) => instance,
                Err(e) => {
                    eprintln!("error: generating {family} variation {k}: {e}");
                    return 1;
                }
            };
            let file = if args.count == 1 {
                format!("{}.vrp", instance.name)
            } else {
                format!("{}-v{k}.vrp", instance.name)
            };
            let path = args.out.join(file);
            if let Err(e) = write_instance(&path, &instance) {
                eprintln!("error: {}: {e}", path.display());
                return 1;
            }
            println!("wrote {}", path.display());
        }
    }
    0
}

fn cmd_solve(args: &SolveArgs) -> u8 {
    let algorithm = match Algorithm::parse(&args.algo) {
        Some(a) => a,
        None => {
            eprintln!("error: unknown algorithm `{}`", args.algo);
            return 2;
        }
    };
    let instance = match load_instance(&args.instance) {
        Ok(i) => i,
        Err(code) => return code,
    };
    let check = validate_instance(&instance);
    if !check.is_valid() {
        eprintln!("error: instance {} is invalid:\n{check}", instance.name);
        return 1;
    }
    let solution = match algorithm.run(&instance) {
        Ok(s) => s,
        Err(e) => {
            eprintln!("error: {algorithm} on {}: {e}", instance.name);
            return 1;
        }
    };
    let check = validate_solution(&instance, &solution);
    if !check.is_valid() {
        eprintln!(
            "error: {algorithm} produced an invalid solution on {}:\n{check}",
            instance.name
        );
        return 1;
    }
    println!(
        "algorithm={algorithm} instance={} cost={:.3} used_robots={} depot_visits={} wall={:.4}s",
        instance.name,
        solution.total_cost,
        solution.used_robots,
        solution.depot_visits,
        solution.wall_time
    );
    if let Some(out) = &args.out {
        if let Err(e) = write_solution(out, &solution) {
            eprintln!("error: {}: {e}", out.display());
            return 1;
        }
        println!("wrote {}", out.display());
    }
    0
}

fn cmd_validate(args: &ValidateArgs) -> u8 {
    let instance = match load_instance(&args.instance) {
        Ok(i) => i,
        Err(code) => return code,
    };
    let check = validate_instance(&instance);
    if !check.is_valid() {
        println!("instance {}: INVALID\n{check}", instance.name);
        return 1;
    }
    println!(
        "instance {}: OK ({} tasks, {} stations, {} robots)",
        instance.name,
        instance.tasks.len(),
        instance.stations.len(),
        instance.robots.len()
    );
    if let Some(path) = &args.solution {
        let solution = match read_solution(path) {
            Ok(s) => s,
            Err(e) => {
                eprintln!("error: {}: {e}", path.display());
                return 2;
            }
        };
        let check = validate_solution(&instance, &solution);
        if !check.is_valid() {
            println!("solution {}: INVALID\n{check}", path.display());
            return 1;
        }
        println!(
            "solution {}: OK (algorithm={}, cost={:.3})",
            path.display(),
            solution.algorithm,
            solution.total_cost
        );
    }
    0
}

/// Grid side for a generated base, keeping task density roughly constant.
fn bench_extent(tasks: usize) -> i32 {
    (((tasks * 8) as f64).sqrt().ceil() as i32).max(20)
}

fn cmd_bench(args: &BenchArgs) -> u8 {
    let algorithms = match parse_algorithms(&args.algos) {
        Ok(a) => a,
        Err(code) => return code,
    };
    let mut config = ExperimentConfig {
        algorithms,
        variations: args.variations,
        base_seed: args.seed,
        compute_optimum: args.optimum,
        ..ExperimentConfig::default()
    };

    if args.instances.is_empty() {
        let families = match parse_families(&args.families) {
            Ok(f) => f,
            Err(code) => return code,
        };
        let mut sizes = Vec::new();
        for part in args.sizes.split(',') {
            match part.trim().parse::<usize>() {
                Ok(n) if n > 0 => sizes.push(n),
                _ => {
                    eprintln!("error: bad task count `{}`", part.trim());
                    return 2;
                }
            }
        }
        for (i, &size) in sizes.iter().enumerate() {
            let base_seed = derive_seed(args.seed, 0x5EED_0000 + i as u64);
            let base =
                match synthetic_base(size, args.robots, 100, bench_extent(size), 30, base_seed) {
                    Ok(b) => b,
                    Err(e) => {
                        eprintln!("error: building base with {size} tasks: {e}");
                        return 1;
                    }
                };
            for &family in &families {
                config.instances.push(ExperimentInstance::Regenerate {
                    base: base.clone(),
                    family,
                });
            }
        }
    } else {
        for path in &args.instances {
            match load_instance(path) {
                Ok(instance) => config.instances.push(ExperimentInstance::Fixed(instance)),
                Err(code) => return code,
            }
        }
    }

    let report = match run_experiment(&config) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return 1;
        }
    };

    if let Err(e) = fs::create_dir_all(&args.out) {
        eprintln!("error: {}: {e}", args.out.display());
        return 1;
    }
    for (file, text) in [
        ("runs.csv", runs_csv(&report)),
        ("summary.csv", summary_csv(&report)),
        ("comparisons.csv", comparisons_csv(&report)),
        ("timings.csv", timings_csv(&report)),
    ] {
        let path = args.out.join(file);
        if let Err(e) = fs::write(&path, text) {
            eprintln!("error: {}: {e}", path.display());
            return 1;
        }
    }

    println!(
        "{} runs over {} instance set(s), reports in {}",
        report.runs.len(),
        config.instances.len(),
        args.out.display()
    );
    for c in &report.comparisons {
        println!(
            "{}: {} mean={:.3} vs {} mean={:.3} (U={}, p={:.4})",
            c.instance, c.algorithm_a, c.mean_a, c.algorithm_b, c.mean_b, c.u, c.p_value
        );
    }
    0
}

fn cmd_oracle(args: &OracleArgs) -> u8 {
    let instance = match load_instance(&args.instance) {
        Ok(i) => i,
        Err(code) => return code,
    };
    let solution = match brute_force_optimum(&instance) {
        Ok(s) => s,
        Err(e) => {
            eprintln!("error: {}: {e}", instance.name);
            return 1;
        }
    };
    println!(
        "instance={} optimum={:.3} depot_visits={}",
        instance.name, solution.total_cost, solution.depot_visits
    );
    if let Some(out) = &args.out {
        if let Err(e) = write_solution(out, &solution) {
            eprintln!("error: {}: {e}", out.display());
            return 1;
        }
        println!("wrote {}", out.display());
    }
    0
}
