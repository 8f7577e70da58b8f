//! Command orchestration: load a problem file, run the requested solver,
//! write plot-ready CSV artifacts and print a short summary.
//!
//! Exit codes: 0 success, 2 problem-file or expression parse error, 3 data
//! compatibility violation, 4 solver failure, 1 anything else (I/O).

use std::fs;
use std::path::{Path, PathBuf};

use transheat_core::grid::{Grid, GridFunction};
use transheat_core::{
    cauchy_solution, crank_nicolson, solve_ibvp, AlphaStrategy, CauchyProblem, Error as CoreError,
    FormalPowersBasis, SolveParams,
};

use crate::problem::{parse_problem_file, ProblemFile, ProblemKind};

pub const EXIT_OK: i32 = 0;
pub const EXIT_IO: i32 = 1;
pub const EXIT_PARSE: i32 = 2;
pub const EXIT_INCOMPATIBLE: i32 = 3;
pub const EXIT_SOLVER: i32 = 4;

/// The subcommands of the binary.
#[derive(Debug, Clone)]
pub enum Command {
    Solve,
    Table { orders: Vec<usize> },
    Cauchy,
    Oracle,
}

/// Shared flags.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub out_dir: PathBuf,
    /// Overrides the file's grid size when set.
    pub grid_m: Option<usize>,
    /// Overrides the file's pseudoinverse cutoff when set.
    pub rcond: Option<f64>,
    /// Worker-thread cap for mesh evaluation.
    pub threads: usize,
}

/// Reads the thread cap from `TRANSHEAT_THREADS`, defaulting to the machine
/// parallelism.
pub fn thread_cap_from_env() -> usize {
    let available = std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1);
    match std::env::var("TRANSHEAT_THREADS") {
        Ok(raw) => match raw.parse::<usize>() {
            Ok(n) if n >= 1 => n.min(available),
            _ => {
                eprintln!("warning: ignoring invalid TRANSHEAT_THREADS = '{raw}'");
                available
            }
        },
        Err(_) => available,
    }
}

fn classify_core_error(err: &CoreError) -> i32 {
    match err {
        CoreError::CompatibilityViolation(_) => EXIT_INCOMPATIBLE,
        _ => EXIT_SOLVER,
    }
}

fn fail(code: i32, message: impl std::fmt::Display) -> i32 {
    eprintln!("error: {message}");
    code
}

/// Runs one command against one problem file, returning the process exit
/// code.
pub fn run(path: &Path, command: Command, config: &RunConfig) -> i32 {
    let text = match fs::read_to_string(path) {
        Ok(text) => text,
        Err(err) => return fail(EXIT_IO, format!("cannot read {}: {err}", path.display())),
    };
    let mut file = match parse_problem_file(&text) {
        Ok(file) => file,
        Err(err) => return fail(EXIT_PARSE, err),
    };
    if let Some(m) = config.grid_m {
        file.grid_m = Some(m);
    }
    if let Some(rcond) = config.rcond {
        file.rcond = Some(rcond);
    }
    let stem = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_else(|| "problem".into());
    if let Err(err) = fs::create_dir_all(&config.out_dir) {
        return fail(EXIT_IO, format!("cannot create {}: {err}", config.out_dir.display()));
    }

    match command {
        Command::Solve => run_solve(&file, &stem, config),
        Command::Table { orders } => run_table(&file, &stem, config, &orders),
        Command::Cauchy => run_cauchy(&file, &stem, config),
        Command::Oracle => run_oracle(&file, &stem, config),
    }
}

fn solve_params(file: &ProblemFile, order: usize) -> SolveParams {
    let mut params = SolveParams::new(order);
    params.collocation_points = file.points;
    if let Some(m) = file.grid_m {
        params.grid_size = m;
    }
    params.rcond = file.rcond;
    params
}

fn require_ibvp(file: &ProblemFile) -> Result<(), String> {
    if file.kind != ProblemKind::Ibvp {
        return Err("this command needs kind = ibvp".into());
    }
    Ok(())
}

fn write_artifact(dir: &Path, name: &str, contents: &str) -> Result<PathBuf, String> {
    let path = dir.join(name);
    fs::write(&path, contents).map_err(|err| format!("cannot write {}: {err}", path.display()))?;
    Ok(path)
}

fn run_solve(file: &ProblemFile, stem: &str, config: &RunConfig) -> i32 {
    if let Err(msg) = require_ibvp(file) {
        return fail(EXIT_PARSE, msg);
    }
    let problem = match file.to_ibvp() {
        Ok(problem) => problem,
        Err(err) => return fail(classify_core_error(&err), err),
    };
    let order = file.order.expect("validated");
    let solution = match solve_ibvp(&problem, &solve_params(file, order)) {
        Ok(solution) => solution,
        Err(err) => return fail(classify_core_error(&err), err),
    };
    let mesh = match solution.evaluate_on_mesh_threaded(file.nx, file.nt, config.threads) {
        Ok(mesh) => mesh,
        Err(err) => return fail(classify_core_error(&err), err),
    };
    let out = match write_artifact(&config.out_dir, &format!("{stem}_mesh.csv"), &mesh.to_csv()) {
        Ok(path) => path,
        Err(msg) => return fail(EXIT_IO, msg),
    };

    let report = solution.report();
    println!(
        "solved: N = {order}, M = {}, m = {}, rank = {}/{}",
        file.points.unwrap_or(order + 1),
        file.grid_m.unwrap_or(transheat_core::collocation::DEFAULT_GRID_SIZE),
        report.rank_used,
        order + 1
    );
    println!("condition number = {:.2e}", report.condition_number);
    println!("boundary residual = {:.2e}", solution.boundary_residual_max());
    if let (Some(abs), Some(rel)) = (mesh.max_abs_err, mesh.max_rel_err) {
        println!("max abs error = {abs:.2e}");
        println!("max rel error = {rel:.2e}");
    }
    println!("mesh: {}x{} -> {}", file.nx, file.nt, out.display());
    EXIT_OK
}

fn run_table(file: &ProblemFile, stem: &str, config: &RunConfig, orders: &[usize]) -> i32 {
    if let Err(msg) = require_ibvp(file) {
        return fail(EXIT_PARSE, msg);
    }
    if file.exact.is_none() {
        return fail(EXIT_PARSE, "table requires an 'exact' expression for error reporting");
    }
    if orders.is_empty() {
        return fail(EXIT_PARSE, "table needs at least one order in --N");
    }
    let problem = match file.to_ibvp() {
        Ok(problem) => problem,
        Err(err) => return fail(classify_core_error(&err), err),
    };
    let mut csv = String::from("N,max_abs,max_rel,cond\n");
    println!("{:>5} {:>12} {:>12} {:>12}", "N", "max_abs", "max_rel", "cond");
    for &order in orders {
        let solution = match solve_ibvp(&problem, &solve_params(file, order)) {
            Ok(solution) => solution,
            Err(err) => return fail(classify_core_error(&err), err),
        };
        let mesh = match solution.evaluate_on_mesh_threaded(file.nx, file.nt, config.threads) {
            Ok(mesh) => mesh,
            Err(err) => return fail(classify_core_error(&err), err),
        };
        let abs = mesh.max_abs_err.expect("exact present");
        let rel = mesh.max_rel_err.expect("exact present");
        let cond = solution.report().condition_number;
        csv.push_str(&format!("{order},{abs:.2e},{rel:.2e},{cond:.2e}\n"));
        println!("{order:>5} {abs:>12.2e} {rel:>12.2e} {cond:>12.2e}");
    }
    match write_artifact(&config.out_dir, &format!("{stem}_table.csv"), &csv) {
        Ok(path) => {
            println!("table -> {}", path.display());
            EXIT_OK
        }
        Err(msg) => fail(EXIT_IO, msg),
    }
}

fn run_cauchy(file: &ProblemFile, stem: &str, config: &RunConfig) -> i32 {
    if file.kind != ProblemKind::Cauchy {
        return fail(EXIT_PARSE, "this command needs kind = cauchy");
    }
    let order = file.cauchy_order.expect("validated");
    let grid_m = file.grid_m.unwrap_or(transheat_core::collocation::DEFAULT_GRID_SIZE);
    let grid = match Grid::chebyshev(file.b, grid_m) {
        Ok(grid) => grid,
        Err(err) => return fail(classify_core_error(&err), err),
    };
    let q_expr = file.q.clone();
    let q = GridFunction::sample(&grid, move |x| q_expr.eval(x, 0.0));
    let ps = match transheat_core::nonvanishing_solution(&q, AlphaStrategy::Auto) {
        Ok(ps) => ps,
        Err(err) => return fail(classify_core_error(&err), err),
    };
    let basis = FormalPowersBasis::build(ps, 2 * order + 1);
    let (f_derivs, g_derivs) = file.cauchy_providers();
    let problem = CauchyProblem { f_derivs, g_derivs, tau: file.tau, order };

    // interior tensor mesh of (-b, b) x (-tau, tau)
    let nx = file.nx;
    let nt = file.nt;
    let xs: Vec<f64> =
        (1..=nx).map(|i| -file.b + 2.0 * file.b * i as f64 / (nx + 1) as f64).collect();
    let ts: Vec<f64> =
        (1..=nt).map(|j| -file.tau + 2.0 * file.tau * j as f64 / (nt + 1) as f64).collect();
    let exact = file.exact.clone();

    let with_errors = exact.is_some();
    let mut csv = String::from(if with_errors {
        "x,t,re_u,im_u,abs_err,rel_err\n"
    } else {
        "x,t,re_u,im_u\n"
    });
    let mut max_tail: f64 = 0.0;
    let mut max_abs: f64 = 0.0;
    let mut max_rel: f64 = 0.0;
    for &t in &ts {
        for &x in &xs {
            let value = match cauchy_solution(&problem, &basis, x, t) {
                Ok(value) => value,
                Err(err) => return fail(classify_core_error(&err), err),
            };
            max_tail = max_tail.max(value.tail);
            match &exact {
                Some(exact) => {
                    let truth = exact.eval(x, t);
                    let abs = (value.value - truth).norm();
                    let rel = abs / truth.norm().max(1e-300);
                    max_abs = max_abs.max(abs);
                    max_rel = max_rel.max(rel);
                    csv.push_str(&format!(
                        "{},{},{:.15e},{:.15e},{:.15e},{:.15e}\n",
                        x, t, value.value.re, value.value.im, abs, rel
                    ));
                }
                None => csv.push_str(&format!(
                    "{},{},{:.15e},{:.15e}\n",
                    x, t, value.value.re, value.value.im
                )),
            }
        }
    }
    let out = match write_artifact(&config.out_dir, &format!("{stem}_cauchy.csv"), &csv) {
        Ok(path) => path,
        Err(msg) => return fail(EXIT_IO, msg),
    };
    println!("cauchy series: J = {order}, m = {grid_m}");
    println!("max tail indicator = {max_tail:.2e}");
    if with_errors {
        println!("max abs error = {max_abs:.2e}");
        println!("max rel error = {max_rel:.2e}");
    }
    println!("mesh: {nx}x{nt} -> {}", out.display());
    EXIT_OK
}

fn run_oracle(file: &ProblemFile, stem: &str, config: &RunConfig) -> i32 {
    if let Err(msg) = require_ibvp(file) {
        return fail(EXIT_PARSE, msg);
    }
    let problem = match file.to_ibvp() {
        Ok(problem) => problem,
        Err(err) => return fail(classify_core_error(&err), err),
    };
    // the output mesh doubles as the finite-difference resolution
    let (nx, nt) = (file.nx.max(4), file.nt.max(4));
    let fd = match crank_nicolson(&problem, nx, nt) {
        Ok(fd) => fd,
        Err(err) => return fail(classify_core_error(&err), err),
    };
    let exact_fn = problem.exact().cloned();
    let csv = fd.to_csv(exact_fn.as_ref());
    let out = match write_artifact(&config.out_dir, &format!("{stem}_oracle.csv"), &csv) {
        Ok(path) => path,
        Err(msg) => return fail(EXIT_IO, msg),
    };
    println!("finite differences: {nx}x{nt} lattice -> {}", out.display());
    if let Some(exact) = &exact_fn {
        println!("fd max error vs exact = {:.2e}", fd.max_error_vs(exact));
    }

    // cross-compare against the collocation solve on the lattice interior
    let order = file.order.expect("validated");
    let solution = match solve_ibvp(&problem, &solve_params(file, order)) {
        Ok(solution) => solution,
        Err(err) => return fail(classify_core_error(&err), err),
    };
    let xs: Vec<f64> = (1..nx).map(|i| fd.x(i)).collect();
    let ts: Vec<f64> = (1..=nt).map(|j| fd.t(j)).collect();
    let fitted = match solution.values_on_grid(&xs, &ts, config.threads) {
        Ok(values) => values,
        Err(err) => return fail(classify_core_error(&err), err),
    };
    let mut sup_diff: f64 = 0.0;
    for (row, t_index) in (1..=nt).enumerate() {
        for (col, x_index) in (1..nx).enumerate() {
            let diff = (fitted[row * xs.len() + col] - fd.value(x_index, t_index)).norm();
            sup_diff = sup_diff.max(diff);
        }
    }
    println!("collocation (N = {order}) vs finite differences: sup diff = {sup_diff:.2e}");
    if let Some(exact) = &exact_fn {
        let mut worst: f64 = 0.0;
        for (row, &t) in ts.iter().enumerate() {
            for (col, &x) in xs.iter().enumerate() {
                worst = worst.max((fitted[row * xs.len() + col] - exact(x, t)).norm());
            }
        }
        println!("collocation max error vs exact = {worst:.2e}");
    }
    EXIT_OK
}
