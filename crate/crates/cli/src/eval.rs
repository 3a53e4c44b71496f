//! Single-point evaluation and the sweep / compare drivers.

use std::str::FromStr;

use cvtelefi_core::closed::{fidelity_closed, fidelity_zero_squeezing_limit, MAX_CLOSED_ORDER};
use cvtelefi_core::fock::{cm_numeric, fidelity_numeric, QuadratureScheme, ORACLE_TAIL_EPS};
use cvtelefi_core::gaussian::{fidelity_from_polynomial, resource_polynomial, teleport_substitution};
use cvtelefi_core::nongauss::{non_gaussianity_from_cm, non_gaussianity_zero_squeezing_limit};
use cvtelefi_core::resource::MAX_ORDER;
use cvtelefi_core::{fock_coefficients, non_gaussianity, Error, SubtractionSpec};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{CliError, CliResult};

/// Which machinery produced a fidelity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Path {
    Closed,
    Engine,
    Oracle,
}

/// A requested path; `Auto` picks the closed form when one exists.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PathChoice {
    #[default]
    Auto,
    Fixed(Path),
}

impl PathChoice {
    pub fn resolve(self, m: u32, n: u32) -> Path {
        match self {
            PathChoice::Fixed(p) => p,
            PathChoice::Auto if m.min(n) <= MAX_CLOSED_ORDER => Path::Closed,
            PathChoice::Auto => Path::Engine,
        }
    }
}

impl FromStr for PathChoice {
    type Err = CliError;

    fn from_str(s: &str) -> CliResult<Self> {
        match s {
            "auto" => Ok(PathChoice::Auto),
            "closed" => Ok(PathChoice::Fixed(Path::Closed)),
            "engine" => Ok(PathChoice::Fixed(Path::Engine)),
            "oracle" => Ok(PathChoice::Fixed(Path::Oracle)),
            _ => Err(CliError::Usage(format!("unknown path {s:?}; expected auto, closed, engine or oracle"))),
        }
    }
}

/// One output row.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRecord {
    pub m: u32,
    pub n: u32,
    pub lam: f64,
    pub r: f64,
    pub fidelity: f64,
    pub ng: Option<f64>,
    pub path: Path,
    /// Set when `lam = 0` and the value is the one-sided limit.
    pub limit_flag: bool,
}

/// Numerical knobs shared by every command.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvalConfig {
    pub tail_eps: f64,
    pub radial_nodes: Option<usize>,
    pub angular_nodes: Option<usize>,
    /// Test hook: corrupt one engine coefficient before integrating.
    pub inject_fault: bool,
}

impl Default for EvalConfig {
    fn default() -> Self {
        EvalConfig { tail_eps: ORACLE_TAIL_EPS, radial_nodes: None, angular_nodes: None, inject_fault: false }
    }
}

impl EvalConfig {
    pub fn scheme(&self, m: u32, n: u32) -> QuadratureScheme {
        let base = QuadratureScheme::for_orders(m, n);
        QuadratureScheme {
            radial_nodes: self.radial_nodes.unwrap_or(base.radial_nodes),
            angular_nodes: self.angular_nodes.unwrap_or(base.angular_nodes),
        }
    }
}

pub fn engine_fidelity(spec: &SubtractionSpec, cfg: &EvalConfig) -> CliResult<f64> {
    let mut g = resource_polynomial(spec);
    if cfg.inject_fault {
        let target = g
            .monomials()
            .copied()
            .filter(|&mono| {
                let (zp, zc) = teleport_substitution(mono);
                zp == zc && mono != [0; 4]
            })
            .last()
            .unwrap_or([0; 4]);
        g.scale_coefficient(target, 2);
    }
    Ok(fidelity_from_polynomial(&g)?)
}

/// Evaluates one `(m, n, lam)` point along the chosen path.
pub fn evaluate(m: u32, n: u32, lam: f64, choice: PathChoice, with_ng: bool, cfg: &EvalConfig) -> CliResult<SweepRecord> {
    let path = choice.resolve(m, n);
    if lam == 0.0 && m + n > 0 {
        if m > MAX_ORDER || n > MAX_ORDER {
            return Err(Error::OrderTooLarge { m, n, max: MAX_ORDER }.into());
        }
        return Ok(SweepRecord {
            m,
            n,
            lam,
            r: 0.0,
            fidelity: fidelity_zero_squeezing_limit(m, n),
            ng: with_ng.then(|| non_gaussianity_zero_squeezing_limit(m, n)),
            path,
            limit_flag: true,
        });
    }
    let spec = SubtractionSpec::new(m, n, lam)?;
    let (fidelity, ng) = match path {
        Path::Closed => (fidelity_closed(m, n, lam)?.value, None),
        Path::Engine => (engine_fidelity(&spec, cfg)?, None),
        Path::Oracle => {
            let state = fock_coefficients(&spec, cfg.tail_eps)?;
            let f = fidelity_numeric(&state, Complex64::new(0.0, 0.0), &cfg.scheme(m, n))?;
            let ng = if with_ng { Some(non_gaussianity_from_cm(&cm_numeric(&state)?)?) } else { None };
            (f, ng)
        }
    };
    let ng = match (with_ng, ng) {
        (true, None) => Some(non_gaussianity(&spec)?),
        (_, ng) => ng,
    };
    Ok(SweepRecord { m, n, lam, r: spec.r(), fidelity, ng, path, limit_flag: false })
}

/// Like [`evaluate`] but parameterized by `r`; the record keeps `r` as given.
pub fn evaluate_r(m: u32, n: u32, r: f64, choice: PathChoice, with_ng: bool, cfg: &EvalConfig) -> CliResult<SweepRecord> {
    let mut rec = evaluate(m, n, r.tanh(), choice, with_ng, cfg)?;
    rec.r = r;
    Ok(rec)
}

/// Rows ordered by pair, then grid point. Evaluation is parallel, output order is not affected.
pub fn sweep(pairs: &[(u32, u32)], grid: &[f64], choice: PathChoice, with_ng: bool, cfg: &EvalConfig) -> CliResult<Vec<SweepRecord>> {
    let jobs: Vec<(u32, u32, f64)> = pairs.iter().flat_map(|&(m, n)| grid.iter().map(move |&l| (m, n, l))).collect();
    jobs.par_iter().map(|&(m, n, lam)| evaluate(m, n, lam, choice, with_ng, cfg)).collect()
}

/// Same as [`sweep`] over an `r` grid.
pub fn sweep_r(pairs: &[(u32, u32)], grid: &[f64], choice: PathChoice, with_ng: bool, cfg: &EvalConfig) -> CliResult<Vec<SweepRecord>> {
    let jobs: Vec<(u32, u32, f64)> = pairs.iter().flat_map(|&(m, n)| grid.iter().map(move |&r| (m, n, r))).collect();
    jobs.par_iter().map(|&(m, n, r)| evaluate_r(m, n, r, choice, with_ng, cfg)).collect()
}

/// A comparison row: a sweep record plus the best split at its `lam`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CompareRecord {
    pub m: u32,
    pub n: u32,
    pub lam: f64,
    pub r: f64,
    pub fidelity: f64,
    pub ng: Option<f64>,
    pub path: Path,
    pub limit_flag: bool,
    /// Best split at this `lam`, written `m:n`.
    pub argmax: String,
}

impl CompareRecord {
    fn new(rec: SweepRecord, argmax: String) -> Self {
        let SweepRecord { m, n, lam, r, fidelity, ng, path, limit_flag } = rec;
        CompareRecord { m, n, lam, r, fidelity, ng, path, limit_flag, argmax }
    }
}

/// Every split `(m, C - m)` with `m <= C/2` over the grid.
pub fn compare(total: u32, grid: &[f64], choice: PathChoice, cfg: &EvalConfig) -> CliResult<Vec<CompareRecord>> {
    if total == 0 {
        return Err(CliError::Usage("total photon budget must be at least 1".into()));
    }
    let pairs: Vec<(u32, u32)> = (0..=total / 2).map(|m| (m, total - m)).collect();
    let rows = sweep(&pairs, grid, choice, false, cfg)?;
    let best: Vec<(u32, u32)> = (0..grid.len())
        .map(|i| {
            let mut top = &rows[i];
            for p in 1..pairs.len() {
                let row = &rows[p * grid.len() + i];
                if row.fidelity > top.fidelity {
                    top = row;
                }
            }
            (top.m, top.n)
        })
        .collect();
    Ok(rows
        .into_iter()
        .enumerate()
        .map(|(i, record)| {
            let (m, n) = best[i % grid.len()];
            CompareRecord::new(record, format!("{m}:{n}"))
        })
        .collect())
}
