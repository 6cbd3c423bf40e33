//! Line protocol for driving the black box from an external solver process.
//!
//! The adapter writes a header to the solver's stdin:
//!
//! ```text
//! DIM n
//! X0 x1 ... xn
//! LB l1 ... ln
//! UB u1 ... un
//! BUDGET b
//! ```
//!
//! The solver then sends `EVAL x1 ... xn` lines and receives one line
//! `f c1 ... cm` per request, where `f` may be `inf`. After `b` evaluations
//! every further request, or any request past the wall-clock deadline, is
//! answered with `STOP`. The solver ends the session with `DONE` or by
//! closing its stdout.

use std::io::{BufRead, BufReader, Write};
use std::process::{Command, Stdio};
use std::time::Instant;

use super::search::Evaluated;
use super::BlackBox;
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct ExternalOutcome {
    pub best: Option<Evaluated>,
    pub evaluations: usize,
}

fn join(xs: &[f64]) -> String {
    xs.iter().map(|v| format!("{v:?}")).collect::<Vec<_>>().join(" ")
}

/// Writes the session header.
pub fn write_header(out: &mut impl Write, x0: &[f64], lower: &[f64], upper: &[f64], budget: usize) -> std::io::Result<()> {
    writeln!(out, "DIM {}", x0.len())?;
    writeln!(out, "X0 {}", join(x0))?;
    writeln!(out, "LB {}", join(lower))?;
    writeln!(out, "UB {}", join(upper))?;
    writeln!(out, "BUDGET {budget}")?;
    out.flush()
}

/// Parses an `EVAL` request. `Ok(None)` marks the end of the session.
pub fn parse_request(line: &str, dim: usize) -> Result<Option<Vec<f64>>> {
    let mut words = line.split_whitespace();
    match words.next() {
        Some("DONE") | None => Ok(None),
        Some("EVAL") => {
            let x: Vec<f64> = words
                .map(|w| w.parse::<f64>().map_err(|e| Error::Solver(format!("bad coordinate {w:?}: {e}"))))
                .collect::<Result<_>>()?;
            if x.len() != dim {
                return Err(Error::Solver(format!("EVAL with {} coordinates, expected {dim}", x.len())));
            }
            if x.iter().any(|v| !v.is_finite()) {
                return Err(Error::Solver("EVAL with a non-finite coordinate".into()));
            }
            Ok(Some(x))
        }
        Some(other) => Err(Error::Solver(format!("unknown request {other:?}"))),
    }
}

/// Formats the reply to one evaluation.
pub fn format_reply(objective: f64, constraints: &[f64]) -> String {
    let f = if objective.is_finite() { format!("{objective:?}") } else { "inf".to_string() };
    if constraints.is_empty() {
        f
    } else {
        format!("{f} {}", join(constraints))
    }
}

/// Runs `program args...` as the solver, starting from `x0`.
///
/// Evaluation `i` of the session uses index `index_base + i`. Past the
/// deadline every request is answered with `STOP`. `on_improve` sees each
/// new best feasible point.
#[allow(clippy::too_many_arguments)]
pub fn run_external(
    bb: &dyn BlackBox,
    program: &str,
    args: &[String],
    x0: &[f64],
    lower: &[f64],
    upper: &[f64],
    budget: usize,
    index_base: u64,
    deadline: Option<Instant>,
    on_improve: &mut dyn FnMut(&Evaluated),
) -> Result<ExternalOutcome> {
    let solver_err = |e: std::io::Error| Error::Solver(format!("{program}: {e}"));
    let mut child = Command::new(program)
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .spawn()
        .map_err(solver_err)?;
    let mut stdin = child.stdin.take().expect("piped stdin");
    let stdout = BufReader::new(child.stdout.take().expect("piped stdout"));
    let session = (|| -> Result<ExternalOutcome> {
        write_header(&mut stdin, x0, lower, upper, budget).map_err(solver_err)?;
        let mut best: Option<Evaluated> = None;
        let mut used = 0usize;
        for line in stdout.lines() {
            let line = line.map_err(solver_err)?;
            let Some(x) = parse_request(&line, bb.dim())? else {
                break;
            };
            if used >= budget || deadline.is_some_and(|d| Instant::now() >= d) {
                writeln!(stdin, "STOP").map_err(solver_err)?;
                stdin.flush().map_err(solver_err)?;
                continue;
            }
            let r = bb.evaluate(&x, index_base + used as u64, 1.0)?;
            used += 1;
            writeln!(stdin, "{}", format_reply(r.objective, &r.constraints)).map_err(solver_err)?;
            stdin.flush().map_err(solver_err)?;
            if r.feasible && best.as_ref().is_none_or(|b| r.objective < b.result.objective) {
                let e = Evaluated { x, result: r };
                on_improve(&e);
                best = Some(e);
            }
        }
        Ok(ExternalOutcome { best, evaluations: used })
    })();
    drop(stdin);
    let status = child.wait().map_err(solver_err)?;
    let outcome = session?;
    if !status.success() {
        return Err(Error::Solver(format!("{program} exited with {status}")));
    }
    Ok(outcome)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn requests_parse() {
        assert_eq!(parse_request("EVAL 1 2.5 -3", 3).unwrap(), Some(vec![1.0, 2.5, -3.0]));
        assert_eq!(parse_request("DONE", 3).unwrap(), None);
        assert!(parse_request("EVAL 1 2", 3).is_err());
        assert!(parse_request("EVAL 1 nan 2", 3).is_err());
        assert!(parse_request("HELLO", 3).is_err());
    }

    #[test]
    fn replies_format() {
        assert_eq!(format_reply(f64::INFINITY, &[1.0, -0.5]), "inf 1.0 -0.5");
        assert_eq!(format_reply(2.0, &[]), "2.0");
    }
}
