use std::fs::File;
use std::io::BufWriter;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;

use hermite_cd::analysis::{infsup_estimate, InfSupForm};
use hermite_cd::harness::{rates_path, run_sweep, SweepConfig, CSV_HEADER, RATES_HEADER};
use hermite_cd::{builtin_problem, Method, SourceMode};

/// Convergence studies for the Hermite and mixed convection-diffusion methods.
#[derive(Debug, Parser)]
#[command(name = "hermite-cd", version)]
struct Args {
    /// Test problem: 1 (unit square) or 2 (quarter disk).
    #[arg(long)]
    problem: u32,
    /// A, hA, B or hB.
    #[arg(long)]
    method: Method,
    #[arg(long, default_value_t = 1.0)]
    peclet: f64,
    /// Mesh levels, comma separated (2 L^2 triangles each).
    #[arg(long = "L", value_delimiter = ',', required = true)]
    levels: Vec<usize>,
    /// CSV output; rates go next to it as `<stem>.rates.csv`.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    plot_dir: Option<PathBuf>,
    /// Exactness degree of the assembly quadrature.
    #[arg(long, default_value_t = 6)]
    quad_degree: u32,
    /// Source of problem 2: fixed-f or regen-f.
    #[arg(long, default_value = "fixed-f")]
    mode: SourceMode,
    /// Also print the discrete inf-sup estimate of method hA for each L.
    #[arg(long)]
    infsup: bool,
    /// Write the mesh of the first L to this path.
    #[arg(long)]
    dump_mesh: Option<PathBuf>,
}

fn run(args: Args) -> hermite_cd::Result<()> {
    let mut config = SweepConfig::new(args.problem, args.method, args.peclet, args.levels.clone());
    config.mode = args.mode;
    config.assembly_quad_degree = args.quad_degree;
    config.out = args.out.clone();
    config.plot_dir = args.plot_dir.clone();
    config.validate()?;
    let problem = builtin_problem(args.problem, args.peclet, args.mode)?;

    if let Some(path) = &args.dump_mesh {
        problem.mesh(args.levels[0])?.write_dump(BufWriter::new(File::create(path)?))?;
    }

    let result = run_sweep(&config)?;
    println!("{CSV_HEADER}");
    for case in &result.cases {
        println!("{}", case.csv_row());
    }
    if let Some(rates) = &result.rates {
        println!("{RATES_HEADER}");
        for row in &rates.rows {
            let cols: Vec<String> = row.iter().map(|r| r.map_or("nan".into(), |v| format!("{v:.4}"))).collect();
            println!("{}", cols.join(","));
        }
        if let Some(out) = &args.out {
            eprintln!("rates written to {}", rates_path(out).display());
        }
    }
    if args.infsup {
        for &l in &args.levels {
            let mesh = problem.mesh(l)?;
            let alpha = infsup_estimate(&mesh, &problem, InfSupForm::Discrete)?;
            let alpha_star = infsup_estimate(&mesh, &problem, InfSupForm::Auxiliary)?;
            println!("infsup L={l} alpha_h={alpha:.6e} alpha_star_h={alpha_star:.6e}");
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Args::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            let mut source = std::error::Error::source(&e);
            while let Some(s) = source {
                eprintln!("  caused by: {s}");
                source = s.source();
            }
            ExitCode::FAILURE
        }
    }
}
