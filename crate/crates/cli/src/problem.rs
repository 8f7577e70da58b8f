//! The problem-file format: flat `key = value` lines under `[problem]`,
//! `[solver]` and `[output]` sections, with `#` comments.
//!
//! ```text
//! [problem]
//! kind = ibvp              # or: cauchy
//! b = 1
//! tau = 1
//! q = x^2
//! phi = exp(-0.5*x^2)      # ibvp: initial datum (expression in x)
//! psi1 = exp(-0.5-t)       # ibvp: data at x = -b (expression in t)
//! psi2 = exp(-0.5-t)       # ibvp: data at x = +b (expression in t)
//! exact = exp(-0.5*x^2-t)  # optional, enables error reporting
//! # cauchy instead uses:  F = ...  G = ...  (expressions in t)
//!
//! [solver]
//! N = 26                   # basis order (ibvp)
//! # M = 27                 # collocation points, default N + 1
//! # J = 15                 # series order (cauchy)
//! # rcond = 1e-12          # pseudoinverse cutoff, default eps*max(M, N+1)
//! # m = 257                # Chebyshev grid size
//!
//! [output]
//! nx = 200
//! nt = 100
//! ```

use std::collections::BTreeMap;
use std::sync::Arc;

use num_complex::Complex64;
use thiserror::Error;
use transheat_core::{DerivativeProvider, IBVProblem, ScalarFn, SpaceTimeFn};

use crate::expr::{parse_expr, Expr, ParseError, Var};

/// Which solver a file drives.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProblemKind {
    Ibvp,
    Cauchy,
}

/// A parsed and validated problem file.
#[derive(Debug, Clone)]
pub struct ProblemFile {
    pub kind: ProblemKind,
    pub b: f64,
    pub tau: f64,
    pub q: Expr,
    pub phi: Option<Expr>,
    pub psi1: Option<Expr>,
    pub psi2: Option<Expr>,
    pub exact: Option<Expr>,
    pub f_data: Option<Expr>,
    pub g_data: Option<Expr>,
    /// Basis order `N` (ibvp).
    pub order: Option<usize>,
    /// Collocation point count `M`; defaults to `N + 1`.
    pub points: Option<usize>,
    /// Cauchy truncation order `J`.
    pub cauchy_order: Option<usize>,
    pub rcond: Option<f64>,
    pub grid_m: Option<usize>,
    pub nx: usize,
    pub nt: usize,
}

/// Problem-file rejection: location plus reason.
#[derive(Debug, Error)]
pub enum FileError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("line {line}, key '{key}': {source}")]
    Expression {
        line: usize,
        key: String,
        #[source]
        source: ParseError,
    },
    #[error("missing required key '{key}' for kind {kind:?}")]
    Missing { key: &'static str, kind: ProblemKind },
    #[error("key '{key}': {message}")]
    Invalid { key: String, message: String },
}

#[derive(Debug, Clone)]
struct RawEntry {
    line: usize,
    value: String,
}

/// Parses the three-section key/value layout.
pub fn parse_problem_file(text: &str) -> Result<ProblemFile, FileError> {
    let mut sections: BTreeMap<String, BTreeMap<String, RawEntry>> = BTreeMap::new();
    let mut current: Option<String> = None;
    for (index, raw_line) in text.lines().enumerate() {
        let line = index + 1;
        let before_comment = match raw_line.find('#') {
            Some(pos) => &raw_line[..pos],
            None => raw_line,
        };
        let trimmed = before_comment.trim();
        if trimmed.is_empty() {
            continue;
        }
        if let Some(name) = trimmed.strip_prefix('[') {
            let name = name.strip_suffix(']').ok_or_else(|| FileError::Syntax {
                line,
                message: "unterminated section header".into(),
            })?;
            let name = name.trim().to_lowercase();
            if !matches!(name.as_str(), "problem" | "solver" | "output") {
                return Err(FileError::Syntax {
                    line,
                    message: format!("unknown section [{name}] (expected problem, solver, output)"),
                });
            }
            sections.entry(name.clone()).or_default();
            current = Some(name);
            continue;
        }
        let (key, value) = trimmed.split_once('=').ok_or_else(|| FileError::Syntax {
            line,
            message: "expected 'key = value'".into(),
        })?;
        let section = current.clone().ok_or_else(|| FileError::Syntax {
            line,
            message: "key outside any [section]".into(),
        })?;
        let key = key.trim().to_string();
        let entry = RawEntry { line, value: value.trim().to_string() };
        if sections.get_mut(&section).unwrap().insert(key.clone(), entry).is_some() {
            return Err(FileError::Syntax { line, message: format!("duplicate key '{key}'") });
        }
    }

    let mut problem = sections.remove("problem").unwrap_or_default();
    let mut solver = sections.remove("solver").unwrap_or_default();
    let mut output = sections.remove("output").unwrap_or_default();

    let kind = {
        let entry = problem
            .remove("kind")
            .ok_or(FileError::Missing { key: "kind", kind: ProblemKind::Ibvp })?;
        match entry.value.as_str() {
            "ibvp" => ProblemKind::Ibvp,
            "cauchy" => ProblemKind::Cauchy,
            other => {
                return Err(FileError::Invalid {
                    key: "kind".into(),
                    message: format!("expected 'ibvp' or 'cauchy', got '{other}'"),
                })
            }
        }
    };

    fn number(entry: &RawEntry, key: &str) -> Result<f64, FileError> {
        entry.value.parse::<f64>().map_err(|_| FileError::Invalid {
            key: key.into(),
            message: format!("not a number: '{}'", entry.value),
        })
    }
    fn count(entry: &RawEntry, key: &str) -> Result<usize, FileError> {
        entry.value.parse::<usize>().map_err(|_| FileError::Invalid {
            key: key.into(),
            message: format!("not a count: '{}'", entry.value),
        })
    }
    fn expression(entry: &RawEntry, key: &str, allowed: &[Var]) -> Result<Expr, FileError> {
        let expr = parse_expr(&entry.value).map_err(|source| FileError::Expression {
            line: entry.line,
            key: key.into(),
            source,
        })?;
        for var in [Var::X, Var::T] {
            if expr.uses(var) && !allowed.contains(&var) {
                return Err(FileError::Invalid {
                    key: key.into(),
                    message: format!("expression may not reference '{var:?}'"),
                });
            }
        }
        Ok(expr)
    }

    let b = number(
        &problem.remove("b").ok_or(FileError::Missing { key: "b", kind })?,
        "b",
    )?;
    let tau = number(
        &problem.remove("tau").ok_or(FileError::Missing { key: "tau", kind })?,
        "tau",
    )?;
    let q = expression(
        &problem.remove("q").ok_or(FileError::Missing { key: "q", kind })?,
        "q",
        &[Var::X],
    )?;

    let take_expr = |map: &mut BTreeMap<String, RawEntry>,
                         key: &str,
                         allowed: &[Var]|
     -> Result<Option<Expr>, FileError> {
        map.remove(key).map(|entry| expression(&entry, key, allowed)).transpose()
    };

    let phi = take_expr(&mut problem, "phi", &[Var::X])?;
    let psi1 = take_expr(&mut problem, "psi1", &[Var::T])?;
    let psi2 = take_expr(&mut problem, "psi2", &[Var::T])?;
    let exact = take_expr(&mut problem, "exact", &[Var::X, Var::T])?;
    let f_data = take_expr(&mut problem, "F", &[Var::T])?;
    let g_data = take_expr(&mut problem, "G", &[Var::T])?;

    if let Some((key, entry)) = problem.into_iter().next() {
        return Err(FileError::Syntax {
            line: entry.line,
            message: format!("unknown key '{key}' in [problem]"),
        });
    }

    let order = solver.remove("N").map(|e| count(&e, "N")).transpose()?;
    let points = solver.remove("M").map(|e| count(&e, "M")).transpose()?;
    let cauchy_order = solver.remove("J").map(|e| count(&e, "J")).transpose()?;
    let rcond = solver.remove("rcond").map(|e| number(&e, "rcond")).transpose()?;
    let grid_m = solver.remove("m").map(|e| count(&e, "m")).transpose()?;
    if let Some((key, entry)) = solver.into_iter().next() {
        return Err(FileError::Syntax {
            line: entry.line,
            message: format!("unknown key '{key}' in [solver]"),
        });
    }

    let nx = output.remove("nx").map(|e| count(&e, "nx")).transpose()?.unwrap_or(200);
    let nt = output.remove("nt").map(|e| count(&e, "nt")).transpose()?.unwrap_or(100);
    if let Some((key, entry)) = output.into_iter().next() {
        return Err(FileError::Syntax {
            line: entry.line,
            message: format!("unknown key '{key}' in [output]"),
        });
    }

    // per-kind completeness
    match kind {
        ProblemKind::Ibvp => {
            if phi.is_none() {
                return Err(FileError::Missing { key: "phi", kind });
            }
            if psi1.is_none() {
                return Err(FileError::Missing { key: "psi1", kind });
            }
            if psi2.is_none() {
                return Err(FileError::Missing { key: "psi2", kind });
            }
            if order.is_none() {
                return Err(FileError::Missing { key: "N", kind });
            }
        }
        ProblemKind::Cauchy => {
            if f_data.is_none() {
                return Err(FileError::Missing { key: "F", kind });
            }
            if g_data.is_none() {
                return Err(FileError::Missing { key: "G", kind });
            }
            if cauchy_order.is_none() {
                return Err(FileError::Missing { key: "J", kind });
            }
        }
    }

    Ok(ProblemFile {
        kind,
        b,
        tau,
        q,
        phi,
        psi1,
        psi2,
        exact,
        f_data,
        g_data,
        order,
        points,
        cauchy_order,
        rcond,
        grid_m,
        nx,
        nt,
    })
}

fn scalar_in_x(expr: &Expr) -> ScalarFn {
    let expr = expr.clone();
    Arc::new(move |x| expr.eval(x, 0.0))
}

fn scalar_in_t(expr: &Expr) -> ScalarFn {
    let expr = expr.clone();
    Arc::new(move |t| expr.eval(0.0, t))
}

impl ProblemFile {
    /// Builds the core problem for the ibvp kind (compatibility is checked by
    /// the core constructor).
    pub fn to_ibvp(&self) -> Result<IBVProblem, transheat_core::Error> {
        let exact: Option<SpaceTimeFn> = self.exact.as_ref().map(|e| {
            let e = e.clone();
            let f: SpaceTimeFn = Arc::new(move |x, t| e.eval(x, t));
            f
        });
        IBVProblem::new(
            self.b,
            self.tau,
            scalar_in_x(&self.q),
            scalar_in_x(self.phi.as_ref().expect("validated")),
            scalar_in_t(self.psi1.as_ref().expect("validated")),
            scalar_in_t(self.psi2.as_ref().expect("validated")),
            exact,
        )
    }

    /// Exact derivative providers for the Cauchy data, built by repeated
    /// symbolic differentiation up to order `J`.
    pub fn cauchy_providers(&self) -> (DerivativeProvider, DerivativeProvider) {
        let order = self.cauchy_order.expect("validated");
        let build = |expr: &Expr| -> DerivativeProvider {
            let mut derivatives: Vec<Expr> = Vec::with_capacity(order + 2);
            derivatives.push(expr.clone());
            for j in 0..=order {
                let next = derivatives[j].differentiate(Var::T);
                derivatives.push(next);
            }
            Arc::new(move |j: usize, t: f64| -> Complex64 {
                derivatives
                    .get(j)
                    .unwrap_or_else(|| panic!("derivative order {j} beyond J = {order}"))
                    .eval(0.0, t)
            })
        };
        (
            build(self.f_data.as_ref().expect("validated")),
            build(self.g_data.as_ref().expect("validated")),
        )
    }
}
