//! Triple-path agreement matrix and invariant suite.

use std::fmt;

use cvtelefi_core::closed::{fidelity_closed, printed_m3};
use cvtelefi_core::fock::{cm_numeric, fidelity_numeric};
use cvtelefi_core::nongauss::non_gaussianity_from_cm;
use cvtelefi_core::{covariance_matrix, fock_coefficients, non_gaussianity, SubtractionSpec};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::CliResult;
use crate::eval::{engine_fidelity, EvalConfig};

pub const CLOSED_ENGINE_TOL: f64 = 1e-10;
pub const ENGINE_ORACLE_TOL: f64 = 1e-8;
pub const MATRIX_LAMS: [f64; 5] = [0.1, 0.3, 0.5, 0.7, 0.8];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Status {
    Pass,
    Fail,
    KnownDeviation,
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Status::Pass => "PASS",
            Status::Fail => "FAIL",
            Status::KnownDeviation => "KNOWN-DEVIATION",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Cell {
    pub name: String,
    pub status: Status,
    pub detail: String,
    /// Largest observed error or deviation, when one is measured.
    pub magnitude: Option<f64>,
}

impl Cell {
    fn bound(name: impl Into<String>, err: f64, tol: f64) -> Self {
        let status = if err < tol { Status::Pass } else { Status::Fail };
        Cell { name: name.into(), status, detail: format!("max error {err:.3e} (tol {tol:.0e})"), magnitude: Some(err) }
    }

    fn flag(name: impl Into<String>, ok: bool, detail: impl Into<String>) -> Self {
        Cell { name: name.into(), status: if ok { Status::Pass } else { Status::Fail }, detail: detail.into(), magnitude: None }
    }

    fn failed(name: impl Into<String>, err: impl fmt::Display) -> Self {
        Cell { name: name.into(), status: Status::Fail, detail: format!("error: {err}"), magnitude: None }
    }
}

impl fmt::Display for Cell {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:<16} {:<34} {}", self.status.to_string(), self.name, self.detail)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report {
    pub cells: Vec<Cell>,
}

impl Report {
    pub fn passed(&self) -> bool {
        self.cells.iter().all(|c| c.status != Status::Fail)
    }
}

fn lam_grid() -> Vec<f64> {
    (1..=18).map(|k| k as f64 / 20.0).collect()
}

fn spec(m: u32, n: u32, lam: f64) -> cvtelefi_core::Result<SubtractionSpec> {
    SubtractionSpec::new(m, n, lam)
}

fn triple_path(m: u32, n: u32, cfg: &EvalConfig) -> Cell {
    let name = format!("triple-path ({m},{n})");
    let run = || -> CliResult<(f64, f64)> {
        let mut ce = 0.0f64;
        let mut eo = 0.0f64;
        for lam in MATRIX_LAMS {
            let s = spec(m, n, lam)?;
            let c = fidelity_closed(m, n, lam)?.value;
            let e = engine_fidelity(&s, cfg)?;
            let st = fock_coefficients(&s, cfg.tail_eps)?;
            let o = fidelity_numeric(&st, Complex64::new(0.0, 0.0), &cfg.scheme(m, n))?;
            ce = ce.max((c - e).abs());
            eo = eo.max((e - o).abs());
        }
        Ok((ce, eo))
    };
    match run() {
        Ok((ce, eo)) => {
            let ok = ce < CLOSED_ENGINE_TOL && eo < ENGINE_ORACLE_TOL;
            Cell {
                name,
                status: if ok { Status::Pass } else { Status::Fail },
                detail: format!("|closed-engine| {ce:.2e}, |engine-oracle| {eo:.2e}"),
                magnitude: Some(ce.max(eo)),
            }
        }
        Err(e) => Cell::failed(name, e),
    }
}

fn gaussian_baseline(cfg: &EvalConfig) -> Cell {
    let run = || -> CliResult<f64> {
        let mut err = 0.0f64;
        for k in 1..=19 {
            let lam = k as f64 / 20.0;
            let s = spec(0, 0, lam)?;
            let want = (1.0 + lam) / 2.0;
            let st = fock_coefficients(&s, cfg.tail_eps)?;
            let o = fidelity_numeric(&st, Complex64::new(0.0, 0.0), &cfg.scheme(0, 0))?;
            for v in [fidelity_closed(0, 0, lam)?.value, engine_fidelity(&s, cfg)?, o] {
                err = err.max((v - want).abs());
            }
        }
        Ok(err)
    };
    match run() {
        Ok(err) => Cell::bound("gaussian baseline (3 paths)", err, 1e-12),
        Err(e) => Cell::failed("gaussian baseline (3 paths)", e),
    }
}

fn swap_symmetry(cfg: &EvalConfig) -> Cell {
    let run = || -> CliResult<f64> {
        let mut err = 0.0f64;
        for m in 0..=5 {
            for n in (m + 1)..=5 {
                for k in 1..=9 {
                    let s = spec(m, n, k as f64 / 10.0)?;
                    err = err.max((engine_fidelity(&s, cfg)? - engine_fidelity(&s.swapped(), cfg)?).abs());
                }
            }
        }
        Ok(err)
    };
    match run() {
        Ok(err) => Cell::bound("mode-swap symmetry", err, 1e-10),
        Err(e) => Cell::failed("mode-swap symmetry", e),
    }
}

fn dominance(cfg: &EvalConfig) -> Cell {
    let run = || -> CliResult<Vec<String>> {
        let mut bad = Vec::new();
        for c in [2u32, 3, 4, 10] {
            for lam in lam_grid() {
                let values = (0..=c / 2)
                    .map(|m| engine_fidelity(&spec(m, c - m, lam)?, cfg))
                    .collect::<CliResult<Vec<f64>>>()?;
                let top = *values.last().expect("non-empty");
                if values.iter().any(|&v| v > top) {
                    bad.push(format!("C={c} lam={lam}"));
                }
            }
        }
        Ok(bad)
    };
    match run() {
        Ok(bad) => Cell::flag("symmetric dominance", bad.is_empty(), if bad.is_empty() { "C in {2,3,4,10}".into() } else { bad.join("; ") }),
        Err(e) => Cell::failed("symmetric dominance", e),
    }
}

fn ng_closed_cases() -> Cell {
    let run = || -> CliResult<f64> {
        let mut err = 0.0f64;
        for n in 0..=5u32 {
            let nf = n as f64;
            let want = if n == 0 { 0.0 } else { (nf + 1.0) * (nf + 1.0).ln() - nf * nf.ln() };
            for r in [0.05, 0.2, 0.5, 1.0, 1.5] {
                err = err.max((non_gaussianity(&SubtractionSpec::from_squeezing(0, n, r)?)? - want).abs());
            }
        }
        Ok(err)
    };
    match run() {
        Ok(err) => Cell::bound("nG single-mode subtraction", err, 1e-6),
        Err(e) => Cell::failed("nG single-mode subtraction", e),
    }
}

fn cm_equivalence(cfg: &EvalConfig) -> Cell {
    let run = || -> CliResult<(f64, f64)> {
        let mut cm_err = 0.0f64;
        let mut ng_err = 0.0f64;
        for m in 0..=4 {
            for n in 0..=4 {
                for lam in [0.2, 0.5, 0.8] {
                    let s = spec(m, n, lam)?;
                    let closed = covariance_matrix(&s);
                    let numeric = cm_numeric(&fock_coefficients(&s, cfg.tail_eps)?)?;
                    cm_err = cm_err.max(closed.max_abs_diff(&numeric));
                    ng_err = ng_err.max((non_gaussianity_from_cm(&closed)? - non_gaussianity_from_cm(&numeric)?).abs());
                }
            }
        }
        Ok((cm_err, ng_err))
    };
    match run() {
        Ok((a, b)) => {
            let ok = a < 1e-8 && b < 1e-6;
            Cell {
                name: "covariance matrix paths".into(),
                status: if ok { Status::Pass } else { Status::Fail },
                detail: format!("max entry error {a:.2e}, max nG error {b:.2e}"),
                magnitude: Some(a),
            }
        }
        Err(e) => Cell::failed("covariance matrix paths", e),
    }
}

fn mu_independence(cfg: &EvalConfig) -> Cell {
    let mus = [
        Complex64::new(0.0, 0.0),
        Complex64::new(1.0, 0.0),
        Complex64::new(0.0, 1.0),
        Complex64::new(1.0, 2.0),
        Complex64::new(0.0, -3.0),
    ];
    let run = || -> CliResult<f64> {
        let mut spread = 0.0f64;
        for (m, n) in [(0, 0), (0, 1), (1, 1), (2, 2)] {
            let st = fock_coefficients(&spec(m, n, 0.5)?, cfg.tail_eps)?;
            let vals = mus
                .iter()
                .map(|&mu| fidelity_numeric(&st, mu, &cfg.scheme(m, n)))
                .collect::<cvtelefi_core::Result<Vec<f64>>>()?;
            let hi = vals.iter().cloned().fold(f64::MIN, f64::max);
            let lo = vals.iter().cloned().fold(f64::MAX, f64::min);
            spread = spread.max(hi - lo);
        }
        Ok(spread)
    };
    match run() {
        Ok(s) => Cell::bound("input-amplitude independence", s, 1e-8),
        Err(e) => Cell::failed("input-amplitude independence", e),
    }
}

fn printed_m3_deviation(cfg: &EvalConfig) -> Cell {
    let name = "printed m=3 closed form";
    let run = || -> CliResult<f64> {
        let mut dev = 0.0f64;
        for n in 3..=6 {
            for lam in lam_grid() {
                dev = dev.max((printed_m3(n, lam) - engine_fidelity(&spec(3, n, lam)?, cfg)?).abs());
            }
        }
        Ok(dev)
    };
    match run() {
        Ok(dev) if dev > 0.0 => Cell {
            name: name.into(),
            status: Status::KnownDeviation,
            detail: format!("max |printed - engine| = {dev:.4e} (regenerated table in use)"),
            magnitude: Some(dev),
        },
        Ok(_) => Cell::flag(name, false, "printed literal unexpectedly agrees with the engine"),
        Err(e) => Cell::failed(name, e),
    }
}

/// Runs every cell; the matrix cells are evaluated in parallel and reported in a fixed order.
pub fn run(cfg: &EvalConfig) -> Report {
    let pairs: Vec<(u32, u32)> = (0..=3).flat_map(|m| (0..=4).map(move |n| (m, n))).collect();
    let mut cells: Vec<Cell> = pairs.par_iter().map(|&(m, n)| triple_path(m, n, cfg)).collect();
    let suite: Vec<Box<dyn Fn() -> Cell + Sync>> = vec![
        Box::new(|| gaussian_baseline(cfg)),
        Box::new(|| swap_symmetry(cfg)),
        Box::new(|| dominance(cfg)),
        Box::new(ng_closed_cases),
        Box::new(|| cm_equivalence(cfg)),
        Box::new(|| mu_independence(cfg)),
        Box::new(|| printed_m3_deviation(cfg)),
    ];
    cells.extend(suite.par_iter().map(|f| f()).collect::<Vec<_>>());
    Report { cells }
}
