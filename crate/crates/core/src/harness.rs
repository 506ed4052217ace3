//! Single cases and mesh sweeps with CSV, rate and plot-data output.

use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use crate::analysis::{convergence_rates, error_norms, ErrorReport, RateTable};
use crate::assembly::{solve_problem, AssemblyOptions, Method};
use crate::error::{Error, Result};
use crate::problem::{builtin_problem, ProblemSpec, SourceMode};

pub const CSV_HEADER: &str = "method,problem,peclet,L,h,dofs,e_u_l2,e_grad_l2,e_divflux_l2,e_max_centroid";

/// Comment line written above the header: how the mixed methods' derivative columns are formed.
pub const CSV_NOTE: &str = "# e_grad/e_divflux for A: -K^-1 p_h, -div p_h; for B: K^-1(w u_h - p_h), \
-div p_h + div(w) u_h + w.grad_h; Hermite methods evaluate u_h directly";

pub const RATES_HEADER: &str = "rate_u,rate_grad,rate_divflux,rate_max";

/// Error norms use this rule unless overridden.
pub const ERROR_QUAD_DEGREE: u32 = 10;

#[derive(Debug, Clone, PartialEq)]
pub struct SweepConfig {
    pub problem: u32,
    pub method: Method,
    pub peclet: f64,
    pub levels: Vec<usize>,
    pub mode: SourceMode,
    pub assembly_quad_degree: u32,
    pub error_quad_degree: u32,
    pub out: Option<PathBuf>,
    pub plot_dir: Option<PathBuf>,
}

impl SweepConfig {
    pub fn new(problem: u32, method: Method, peclet: f64, levels: Vec<usize>) -> Self {
        SweepConfig {
            problem,
            method,
            peclet,
            levels,
            mode: SourceMode::default(),
            assembly_quad_degree: AssemblyOptions::default().quad_degree,
            error_quad_degree: ERROR_QUAD_DEGREE,
            out: None,
            plot_dir: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.levels.is_empty() {
            return Err(Error::Config("at least one L is required".into()));
        }
        if self.levels.iter().any(|&l| l == 0) {
            return Err(Error::Config("L must be positive".into()));
        }
        if self.levels.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Config("L values must be strictly increasing".into()));
        }
        builtin_problem(self.problem, self.peclet, self.mode).map(|_| ())
    }
}

/// One row of a sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct CaseResult {
    pub method: Method,
    pub problem: u32,
    pub peclet: f64,
    pub l: usize,
    pub report: ErrorReport,
}

impl CaseResult {
    pub fn csv_row(&self) -> String {
        let r = &self.report;
        format!(
            "{},{},{},{},{:.10e},{},{:.10e},{:.10e},{:.10e},{:.10e}",
            self.method, self.problem, self.peclet, self.l, r.h, r.dofs, r.e_u, r.e_grad, r.e_divflux, r.e_max
        )
    }
}

/// Mesh, assemble, constrain, solve, reconstruct and measure one case.
pub fn run_case(problem: &ProblemSpec, method: Method, l: usize, assembly_quad_degree: u32, error_quad_degree: u32) -> Result<ErrorReport> {
    let context = || {
        format!(
            "problem {} method {} Pe {} L {}",
            problem.id.map_or_else(|| "custom".to_string(), |i| i.to_string()),
            method,
            problem.peclet,
            l
        )
    };
    let wrap = |e: Error| Error::Case { context: context(), source: Box::new(e) };
    let mesh = problem.mesh(l).map_err(wrap)?;
    let options = AssemblyOptions { quad_degree: assembly_quad_degree, ..AssemblyOptions::default() };
    let solution = solve_problem(method, &mesh, problem, &options).map_err(wrap)?;
    error_norms(&mesh, &solution, problem, error_quad_degree).map_err(wrap)
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    pub cases: Vec<CaseResult>,
    /// Present when at least two levels ran.
    pub rates: Option<RateTable>,
}

fn fmt_rate(r: Option<f64>) -> String {
    r.map_or_else(|| "nan".to_string(), |v| format!("{v:.6}"))
}

pub fn rates_path(out: &Path) -> PathBuf {
    out.with_extension("rates.csv")
}

/// Runs every level in order. The CSV is written row by row, so a failing case
/// leaves the completed rows on disk.
pub fn run_sweep(config: &SweepConfig) -> Result<SweepResult> {
    config.validate()?;
    let problem = builtin_problem(config.problem, config.peclet, config.mode)?;
    let mut csv = match &config.out {
        Some(path) => {
            let mut w = BufWriter::new(File::create(path)?);
            writeln!(w, "{CSV_NOTE}")?;
            writeln!(w, "{CSV_HEADER}")?;
            w.flush()?;
            Some(w)
        }
        None => None,
    };
    let mut cases = Vec::new();
    for &l in &config.levels {
        let report = run_case(&problem, config.method, l, config.assembly_quad_degree, config.error_quad_degree)?;
        let case = CaseResult { method: config.method, problem: config.problem, peclet: config.peclet, l, report };
        if let Some(w) = csv.as_mut() {
            writeln!(w, "{}", case.csv_row())?;
            w.flush()?;
        }
        cases.push(case);
    }
    let reports: Vec<ErrorReport> = cases.iter().map(|c| c.report).collect();
    let rates = if reports.len() >= 2 { Some(convergence_rates(&reports)?) } else { None };
    if let (Some(out), Some(table)) = (&config.out, &rates) {
        let mut w = BufWriter::new(File::create(rates_path(out))?);
        writeln!(w, "{RATES_HEADER}")?;
        for row in &table.rows {
            let cols: Vec<String> = row.iter().map(|&r| fmt_rate(r)).collect();
            writeln!(w, "{}", cols.join(","))?;
        }
        w.flush()?;
    }
    if let Some(dir) = &config.plot_dir {
        write_plot_data(dir, config, &reports)?;
    }
    Ok(SweepResult { cases, rates })
}

/// Two-column `h error` files per measure, plus the reference slopes `h` and `h^2`.
pub fn write_plot_data(dir: &Path, config: &SweepConfig, reports: &[ErrorReport]) -> Result<()> {
    fs::create_dir_all(dir)?;
    let stem = format!("p{}_{}_pe{}", config.problem, config.method, config.peclet);
    let measures: [(&str, fn(&ErrorReport) -> f64); 4] = [
        ("e_u_l2", |r| r.e_u),
        ("e_grad_l2", |r| r.e_grad),
        ("e_divflux_l2", |r| r.e_divflux),
        ("e_max_centroid", |r| r.e_max),
    ];
    for (name, get) in measures {
        let mut w = BufWriter::new(File::create(dir.join(format!("{stem}_{name}.dat")))?);
        for r in reports {
            writeln!(w, "{:.10e} {:.10e}", r.h, get(r))?;
        }
        w.flush()?;
    }
    for (name, power) in [("ref_h", 1), ("ref_h2", 2)] {
        let mut w = BufWriter::new(File::create(dir.join(format!("{stem}_{name}.dat")))?);
        for r in reports {
            writeln!(w, "{:.10e} {:.10e}", r.h, r.h.powi(power))?;
        }
        w.flush()?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn config_validation() {
        assert!(SweepConfig::new(1, Method::HA, 1.0, vec![2, 4]).validate().is_ok());
        assert!(SweepConfig::new(1, Method::HA, 1.0, vec![4, 2]).validate().is_err());
        assert!(SweepConfig::new(1, Method::HA, 1.0, vec![]).validate().is_err());
        assert!(SweepConfig::new(3, Method::HA, 1.0, vec![2]).validate().is_err());
    }

    #[test]
    fn sweep_writes_rows_and_rates() {
        let dir = tempfile::tempdir().unwrap();
        let mut config = SweepConfig::new(1, Method::HA, 1.0, vec![2, 4, 8]);
        config.out = Some(dir.path().join("run.csv"));
        config.plot_dir = Some(dir.path().join("plots"));
        let result = run_sweep(&config).unwrap();
        assert_eq!(result.cases.len(), 3);
        assert_eq!(result.rates.as_ref().unwrap().rows.len(), 2);
        let text = fs::read_to_string(dir.path().join("run.csv")).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[1], CSV_HEADER);
        assert_eq!(lines.len(), 5);
        let rates = fs::read_to_string(dir.path().join("run.rates.csv")).unwrap();
        assert_eq!(rates.lines().count(), 3);
        assert_eq!(fs::read_dir(dir.path().join("plots")).unwrap().count(), 6);
        // deterministic rows
        let again = run_sweep(&config).unwrap();
        assert_eq!(again.cases, result.cases);
        assert_eq!(fs::read_to_string(dir.path().join("run.csv")).unwrap(), text);
    }
}
