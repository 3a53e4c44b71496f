//! The photon-subtracted two-mode squeezed vacuum `a^m b^n S(r)|00>`:
//! parameters, normalization, truncated Fock expansion and the closed-form
//! covariance matrix.
//!
//! Squeezing is always given as `lam = tanh r`. Quadrature covariances use
//! vacuum variance 1/2.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::special::{jacobi_p, log_factorial};

/// Largest number of photons that may be subtracted from either mode.
pub const MAX_ORDER: u32 = 12;

/// Default discarded-tail bound for [`fock_coefficients`].
pub const DEFAULT_TAIL_EPS: f64 = 1e-14;

/// Hard cap on the retained pre-subtraction index.
pub const TRUNCATION_CAP: usize = 4096;

/// Resource descriptor: `m` photons subtracted from mode 1, `n` from mode 2,
/// squeezing `lam = tanh r`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SubtractionSpec {
    m: u32,
    n: u32,
    lam: f64,
}

impl SubtractionSpec {
    pub fn new(m: u32, n: u32, lam: f64) -> Result<Self> {
        if !(0.0..1.0).contains(&lam) {
            return Err(Error::Domain(format!("squeezing lam must lie in [0, 1), got {lam}")));
        }
        if m > MAX_ORDER || n > MAX_ORDER {
            return Err(Error::OrderTooLarge { m, n, max: MAX_ORDER });
        }
        if lam == 0.0 && m + n > 0 {
            return Err(Error::DegenerateState { m, n });
        }
        Ok(SubtractionSpec { m, n, lam })
    }

    /// Builds a spec from the squeezing parameter `r` instead of `lam`.
    pub fn from_squeezing(m: u32, n: u32, r: f64) -> Result<Self> {
        if !(r >= 0.0 && r.is_finite()) {
            return Err(Error::Domain(format!("squeezing r must be finite and >= 0, got {r}")));
        }
        Self::new(m, n, r.tanh())
    }

    pub fn m(&self) -> u32 {
        self.m
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn lam(&self) -> f64 {
        self.lam
    }

    /// `r = atanh(lam)`.
    pub fn r(&self) -> f64 {
        self.lam.atanh()
    }

    /// Same resource with the two modes exchanged.
    pub fn swapped(&self) -> Self {
        SubtractionSpec { m: self.n, n: self.m, lam: self.lam }
    }

    pub fn is_gaussian(&self) -> bool {
        self.m == 0 && self.n == 0
    }
}

/// `sinh^2 r` and `cosh 2r` written in terms of `lam`.
fn hyperbolic(lam: f64) -> (f64, f64) {
    let l2 = lam * lam;
    (l2 / (1.0 - l2), (1.0 + l2) / (1.0 - l2))
}

/// Squared norm of `a^m b^n S(r)|00>` with no order ceiling. Requires `lam > 0`
/// unless `m = n = 0`.
pub(crate) fn normalization_unchecked(m: u32, n: u32, lam: f64) -> f64 {
    let (lo, hi) = if m <= n { (m, n) } else { (n, m) };
    if hi == 0 {
        return 1.0;
    }
    let (sinh2, cosh2r) = hyperbolic(lam);
    let p = jacobi_p(lo as i32, (hi - lo) as i32, 0, cosh2r).expect("parameters in domain");
    (log_factorial(lo) + log_factorial(hi) + hi as f64 * sinh2.ln() + p.ln()).exp()
}

/// `N_{r,m,n}`, the squared norm of the unnormalized state.
pub fn normalization(spec: &SubtractionSpec) -> f64 {
    normalization_unchecked(spec.m, spec.n, spec.lam)
}

/// Truncated two-mode Fock expansion of a normalized resource.
///
/// Support lies on the shifted diagonal `(j, l) = (k - m, k - n)` for
/// `k = max(m, n) ..= truncation`; amplitudes are real.
#[derive(Debug, Clone, PartialEq)]
pub struct FockState {
    m: u32,
    n: u32,
    k_min: u32,
    amps: Vec<f64>,
    raw_norm_sq: f64,
}

impl FockState {
    pub fn m(&self) -> u32 {
        self.m
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    /// Largest retained pre-subtraction index `K`.
    pub fn truncation(&self) -> u32 {
        self.k_min + self.amps.len() as u32 - 1
    }

    /// Squared norm of the retained unnormalized amplitudes.
    pub fn raw_norm_sq(&self) -> f64 {
        self.raw_norm_sq
    }

    /// `(j, l, amplitude)` over the support, in increasing `j`.
    pub fn entries(&self) -> impl Iterator<Item = (u32, u32, f64)> + '_ {
        self.amps
            .iter()
            .enumerate()
            .map(move |(i, &a)| (self.k_min + i as u32 - self.m, self.k_min + i as u32 - self.n, a))
    }

    /// Amplitude `<j, l|psi>`.
    pub fn amplitude(&self, j: u32, l: u32) -> f64 {
        let k = j + self.m;
        if k != l + self.n || k < self.k_min {
            return 0.0;
        }
        self.amps.get((k - self.k_min) as usize).copied().unwrap_or(0.0)
    }

    /// Normalized amplitudes indexed by `k - max(m, n)`.
    pub(crate) fn diagonal(&self) -> &[f64] {
        &self.amps
    }

    pub fn norm_sq(&self) -> f64 {
        self.amps.iter().map(|a| a * a).sum()
    }
}

/// Fock expansion truncated at an explicit pre-subtraction index `k_max`.
pub fn fock_coefficients_truncated(spec: &SubtractionSpec, k_max: u32) -> Result<FockState> {
    let (m, n, lam) = (spec.m, spec.n, spec.lam);
    let k_min = m.max(n);
    if k_max < k_min {
        return Err(Error::Domain(format!("truncation {k_max} below the support start {k_min}")));
    }
    if lam == 0.0 {
        return Ok(FockState { m, n, k_min, amps: vec![1.0], raw_norm_sq: 1.0 });
    }
    let log_amps = log_amplitudes(m, n, lam, (k_max - k_min) as usize + 1);
    Ok(assemble(m, n, k_min, &log_amps))
}

fn log_amplitude_step(m: u32, n: u32, ln_lam: f64, k: usize) -> f64 {
    // ln(a_{k+1} / a_k)
    let k1 = (k + 1) as f64;
    ln_lam + k1.ln() - 0.5 * (k1 - m as f64).ln() - 0.5 * (k1 - n as f64).ln()
}

/// `ln a_k` for the unnormalized amplitudes
/// `sqrt(1-lam^2) lam^k k! / sqrt((k-m)! (k-n)!)`, `k = max(m,n), ...`.
fn log_amplitudes(m: u32, n: u32, lam: f64, count: usize) -> Vec<f64> {
    let k_min = m.max(n);
    let ln_lam = lam.ln();
    let mut la = 0.5 * (1.0 - lam * lam).ln() + k_min as f64 * ln_lam + log_factorial(k_min)
        - 0.5 * log_factorial(k_min - m)
        - 0.5 * log_factorial(k_min - n);
    let mut out = Vec::with_capacity(count);
    out.push(la);
    for i in 1..count {
        la += log_amplitude_step(m, n, ln_lam, k_min as usize + i - 1);
        out.push(la);
    }
    out
}

fn assemble(m: u32, n: u32, k_min: u32, log_amps: &[f64]) -> FockState {
    let peak = log_amps.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let partial: f64 = log_amps.iter().map(|&la| (2.0 * (la - peak)).exp()).sum();
    let raw_norm_sq = partial * (2.0 * peak).exp();
    let scale = 1.0 / partial.sqrt();
    let amps = log_amps.iter().map(|&la| (la - peak).exp() * scale).collect();
    FockState { m, n, k_min, amps, raw_norm_sq }
}

/// Truncated Fock expansion with discarded squared-amplitude tail below
/// `tail_eps` (relative to the squared norm).
pub fn fock_coefficients(spec: &SubtractionSpec, tail_eps: f64) -> Result<FockState> {
    if !(tail_eps > 0.0) {
        return Err(Error::Domain(format!("tail_eps must be positive, got {tail_eps}")));
    }
    let (m, n, lam) = (spec.m, spec.n, spec.lam);
    let k_min = m.max(n);
    if lam == 0.0 {
        return Ok(FockState { m, n, k_min, amps: vec![1.0], raw_norm_sq: 1.0 });
    }

    let l2 = lam * lam;
    let ln_lam = lam.ln();
    let guess = ((tail_eps * (1.0 - l2)).ln() / (2.0 * ln_lam)).ceil().max(0.0) as usize;
    let mut count = (guess + 11).min(TRUNCATION_CAP + 1 - k_min as usize);
    loop {
        let log_amps = log_amplitudes(m, n, lam, count);
        let k_last = k_min as usize + count - 1;
        // Successive ratios a_{k+1}^2 / a_k^2 decrease monotonically, so the
        // tail is bounded by a geometric series started at k_last + 1.
        let next = log_amps[count - 1] + log_amplitude_step(m, n, ln_lam, k_last);
        let ratio = (2.0 * log_amplitude_step(m, n, ln_lam, k_last + 1)).exp();
        let peak = log_amps.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let partial: f64 = log_amps.iter().map(|&la| (2.0 * (la - peak)).exp()).sum();
        if ratio < 1.0 && (2.0 * (next - peak)).exp() / (1.0 - ratio) < tail_eps * partial {
            return Ok(assemble(m, n, k_min, &log_amps));
        }
        if k_last >= TRUNCATION_CAP {
            return Err(Error::TruncationFailure { cap: TRUNCATION_CAP });
        }
        count = (count + count / 4 + 10).min(TRUNCATION_CAP + 1 - k_min as usize);
    }
}

/// Block-form two-mode covariance matrix `[[a I, C], [C, b I]]` with
/// `C = diag(c, -c)`, vacuum variance 1/2, zero first moments.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TwoModeCM {
    a_diag: f64,
    b_diag: f64,
    c_diag: f64,
}

/// Slack allowed below the vacuum variance in [`TwoModeCM::new`].
const LOCAL_VARIANCE_TOL: f64 = 1e-10;

impl TwoModeCM {
    pub fn new(a_diag: f64, b_diag: f64, c_diag: f64) -> Result<Self> {
        if !(a_diag.is_finite() && b_diag.is_finite() && c_diag.is_finite()) {
            return Err(Error::Domain("covariance entries must be finite".into()));
        }
        if a_diag < 0.5 - LOCAL_VARIANCE_TOL || b_diag < 0.5 - LOCAL_VARIANCE_TOL {
            return Err(Error::Domain(format!(
                "local variances must be >= 1/2, got a={a_diag}, b={b_diag}"
            )));
        }
        Ok(TwoModeCM { a_diag, b_diag, c_diag })
    }

    pub fn a_diag(&self) -> f64 {
        self.a_diag
    }

    pub fn b_diag(&self) -> f64 {
        self.b_diag
    }

    pub fn c_diag(&self) -> f64 {
        self.c_diag
    }

    pub fn swap_modes(&self) -> Self {
        TwoModeCM { a_diag: self.b_diag, b_diag: self.a_diag, c_diag: self.c_diag }
    }

    /// Full 4x4 matrix in the ordering `(x1, p1, x2, p2)`.
    pub fn to_matrix(&self) -> [[f64; 4]; 4] {
        let (a, b, c) = (self.a_diag, self.b_diag, self.c_diag);
        [[a, 0.0, c, 0.0], [0.0, a, 0.0, -c], [c, 0.0, b, 0.0], [0.0, -c, 0.0, b]]
    }

    pub fn max_abs_diff(&self, other: &TwoModeCM) -> f64 {
        (self.a_diag - other.a_diag)
            .abs()
            .max((self.b_diag - other.b_diag).abs())
            .max((self.c_diag - other.c_diag).abs())
    }
}

/// Closed-form covariance matrix of the normalized resource.
///
/// `a = 1/2 + N_{m+1,n}/N_{m,n}`, `b = 1/2 + N_{m,n+1}/N_{m,n}` and, for
/// `n >= m`, `c = (n+1)/2 sinh 2r P_m^{(n-m,1)}(cosh 2r) / P_m^{(n-m,0)}(cosh 2r)`.
/// For `m > n` the modes are swapped, evaluated, and swapped back.
///
/// First moments vanish identically: every ladder operator moves the state
/// off its shifted-diagonal support.
pub fn covariance_matrix(spec: &SubtractionSpec) -> TwoModeCM {
    if spec.m > spec.n {
        return covariance_matrix(&spec.swapped()).swap_modes();
    }
    let (m, n, lam) = (spec.m, spec.n, spec.lam);
    if lam == 0.0 {
        return TwoModeCM { a_diag: 0.5, b_diag: 0.5, c_diag: 0.0 };
    }
    let norm = normalization_unchecked(m, n, lam);
    let a_diag = 0.5 + normalization_unchecked(m + 1, n, lam) / norm;
    let b_diag = 0.5 + normalization_unchecked(m, n + 1, lam) / norm;

    let (_, cosh2r) = hyperbolic(lam);
    let sinh2r = 2.0 * lam / (1.0 - lam * lam);
    let alpha = (n - m) as i32;
    let ratio = jacobi_p(m as i32, alpha, 1, cosh2r).expect("parameters in domain")
        / jacobi_p(m as i32, alpha, 0, cosh2r).expect("parameters in domain");
    let c_diag = 0.5 * (n as f64 + 1.0) * sinh2r * ratio;
    TwoModeCM { a_diag, b_diag, c_diag }
}
