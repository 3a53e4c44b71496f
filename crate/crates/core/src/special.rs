//! Special functions: Jacobi and associated Laguerre polynomials, the
//! symplectic entropy function, and the factorial/binomial plumbing the
//! rest of the crate leans on.
//!
//! Everything here is a pure function of its arguments.

use crate::error::{Error, Result};

/// Largest `k` for which `k!` is an exact `u64`.
const EXACT_FACTORIAL_MAX: u32 = 20;

/// Clamp tolerance for arguments of [`h_entropy`] slightly below 1/2.
pub const H_ENTROPY_TOL: f64 = 1e-10;

/// Value of a polynomial evaluation together with an optional log-magnitude
/// of the terms that produced it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PolyEvalResult {
    pub value: f64,
    /// `ln` of the sum of absolute term magnitudes, when the value came out of
    /// a finite sum. A hint `>> ln|value|` signals cancellation.
    pub log_scale_hint: Option<f64>,
}

fn exact_factorial(k: u32) -> u64 {
    (1..=k as u64).product()
}

/// `ln(k!)`. Exact (up to the final `ln`) for `k <= 20`, accumulated in the
/// log domain beyond that.
pub fn log_factorial(k: u32) -> f64 {
    if k <= EXACT_FACTORIAL_MAX {
        return (exact_factorial(k) as f64).ln();
    }
    let head = (exact_factorial(EXACT_FACTORIAL_MAX) as f64).ln();
    (EXACT_FACTORIAL_MAX + 1..=k).fold(head, |acc, i| acc + (i as f64).ln())
}

/// `k!` as a float; exact for `k <= 20`.
pub fn factorial(k: u32) -> f64 {
    if k <= EXACT_FACTORIAL_MAX {
        exact_factorial(k) as f64
    } else {
        log_factorial(k).exp()
    }
}

/// Binomial coefficient `C(n, k)`, zero outside `0 <= k <= n`.
pub fn binomial(n: i64, k: i64) -> f64 {
    if k < 0 || n < 0 || k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 1..=k {
        // acc * (n - k + i) / i stays integral at every step.
        match acc.checked_mul((n - k + i) as u128) {
            Some(p) => acc = p / i as u128,
            None => {
                let ln = log_factorial(n as u32) - log_factorial(k as u32) - log_factorial((n - k) as u32);
                return ln.exp();
            }
        }
    }
    acc as f64
}

/// Jacobi polynomial `P_m^{(alpha, beta)}(x)`.
pub fn jacobi_p(m: i32, alpha: i32, beta: i32, x: f64) -> Result<f64> {
    jacobi_eval(m, alpha, beta, x).map(|r| r.value)
}

/// Jacobi polynomial with scale diagnostics.
///
/// Outside `(-1, 1)` the polynomial is evaluated as the finite sum
///
/// `sum_k C(m+alpha, k) C(m+beta, m-k) ((x-1)/2)^(m-k) ((x+1)/2)^k`,
///
/// which has no removable singularity at `x = 1` and whose terms all share a
/// sign for `x >= 1`. Inside `(-1, 1)` the sum cancels heavily, so for
/// non-negative parameters the standard three-term recurrence is used there.
pub fn jacobi_eval(m: i32, alpha: i32, beta: i32, x: f64) -> Result<PolyEvalResult> {
    if m < 0 {
        return Err(Error::Domain(format!("Jacobi degree must be non-negative, got {m}")));
    }
    if alpha < -m || beta < 0 {
        return Err(Error::Domain(format!(
            "Jacobi parameters out of range: m={m}, alpha={alpha}, beta={beta}"
        )));
    }
    if !x.is_finite() {
        return Err(Error::Domain(format!("Jacobi argument must be finite, got {x}")));
    }
    if m == 0 {
        return Ok(PolyEvalResult { value: 1.0, log_scale_hint: Some(0.0) });
    }
    if x.abs() < 1.0 && alpha >= 0 && m >= 2 {
        return Ok(PolyEvalResult { value: jacobi_recurrence(m, alpha, beta, x), log_scale_hint: None });
    }

    let lo = (x - 1.0) / 2.0;
    let hi = (x + 1.0) / 2.0;
    let (m64, a64, b64) = (m as i64, alpha as i64, beta as i64);
    let mut value = 0.0;
    let mut scale = 0.0;
    for k in 0..=m64 {
        let c = binomial(m64 + a64, k) * binomial(m64 + b64, m64 - k);
        if c == 0.0 {
            continue;
        }
        let term = c * lo.powi((m64 - k) as i32) * hi.powi(k as i32);
        value += term;
        scale += term.abs();
    }
    let log_scale_hint = if scale > 0.0 { Some(scale.ln()) } else { None };
    Ok(PolyEvalResult { value, log_scale_hint })
}

fn jacobi_recurrence(m: i32, alpha: i32, beta: i32, x: f64) -> f64 {
    let (a, b) = (alpha as f64, beta as f64);
    let mut prev = 1.0;
    let mut cur = (a + 1.0) + (a + b + 2.0) * (x - 1.0) / 2.0;
    for k in 2..=m {
        let k = k as f64;
        let s = 2.0 * k + a + b;
        let denom = 2.0 * k * (k + a + b) * (s - 2.0);
        let next = ((s - 1.0) * (s * (s - 2.0) * x + a * a - b * b) * cur
            - 2.0 * (k + a - 1.0) * (k + b - 1.0) * s * prev)
            / denom;
        prev = cur;
        cur = next;
    }
    cur
}

/// Associated Laguerre polynomial `L_n^{(k)}(x)` by forward recurrence.
pub fn laguerre_assoc(n: i32, k: i32, x: f64) -> Result<f64> {
    if n < 0 || n + k < 0 {
        return Err(Error::Domain(format!("Laguerre order out of range: n={n}, k={k}")));
    }
    if x.is_nan() {
        return Err(Error::Domain("Laguerre argument is NaN".into()));
    }
    Ok(*laguerre_sequence(n as usize, k as f64, x).last().unwrap())
}

/// `[L_0^{(k)}(x), ..., L_nmax^{(k)}(x)]` in one pass of the recurrence.
pub(crate) fn laguerre_sequence(nmax: usize, k: f64, x: f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(nmax + 1);
    out.push(1.0);
    if nmax == 0 {
        return out;
    }
    out.push(1.0 + k - x);
    for i in 1..nmax {
        let fi = i as f64;
        let next = ((2.0 * fi + 1.0 + k - x) * out[i] - (fi + k) * out[i - 1]) / (fi + 1.0);
        out.push(next);
    }
    out
}

/// `h(x) = (x + 1/2) ln(x + 1/2) - (x - 1/2) ln(x - 1/2)`, the entropy of a
/// thermal mode with symplectic eigenvalue `x` (vacuum at `x = 1/2`).
///
/// Arguments within [`H_ENTROPY_TOL`] below 1/2 are clamped to 1/2.
pub fn h_entropy(x: f64) -> Result<f64> {
    if x.is_nan() || x < 0.5 - H_ENTROPY_TOL {
        return Err(Error::Domain(format!("h(x) requires x >= 1/2, got {x}")));
    }
    let x = x.max(0.5);
    let xlogx = |y: f64| if y > 0.0 { y * y.ln() } else { 0.0 };
    Ok(xlogx(x + 0.5) - xlogx(x - 0.5))
}
