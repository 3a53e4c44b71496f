//! Relative-entropy non-Gaussianity of the (pure) resource from its
//! covariance matrix.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::resource::{covariance_matrix, SubtractionSpec, TwoModeCM};
use crate::special::h_entropy;

/// Slack below 1/2 beyond which a symplectic eigenvalue is an error rather
/// than rounding noise.
pub const UNPHYSICAL_TOL: f64 = 1e-6;

/// Multiple of `eps (a b + c^2)` within which a symplectic eigenvalue is
/// taken to be exactly 1/2.
const ROUNDING_FLOOR: f64 = 8.0;

/// Relative tolerance on a negative discriminant before it is an error.
pub const DISCRIMINANT_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SymplecticSpectrum {
    pub d_plus: f64,
    pub d_minus: f64,
    /// `(det A, det B, det C, det sigma)`.
    pub invariants: [f64; 4],
    /// `det A + det B + 2 det C`.
    pub delta_sigma: f64,
}

/// Symplectic eigenvalues of a standard-form two-mode covariance matrix.
///
/// `d_pm^2 = (Delta +- sqrt(Delta^2 - 4 I4)) / 2`. The discriminant is
/// evaluated in the factored form `(a-b)^2 ((a+b)^2 - 4c^2)`, which is exactly
/// zero for symmetric states, and `d_minus` is recovered as
/// `sqrt(I4) / d_plus` to avoid cancellation under strong squeezing.
pub fn symplectic_eigenvalues(cm: &TwoModeCM) -> Result<SymplecticSpectrum> {
    let (a, b, c) = (cm.a_diag(), cm.b_diag(), cm.c_diag());
    let i1 = a * a;
    let i2 = b * b;
    let i3 = -c * c;
    let c2 = c * c;
    let sqrt_i4 = a.mul_add(b, -c2) - c.mul_add(c, -c2);
    let i4 = sqrt_i4 * sqrt_i4;
    let delta = i1 + i2 + 2.0 * i3;

    let mut disc = (a - b) * (a - b) * ((a + b) * (a + b) - 4.0 * c * c);
    if disc < 0.0 {
        if disc < -DISCRIMINANT_TOL * delta.abs().max(1.0).powi(2) {
            return Err(Error::UnphysicalCovariance { d_minus: f64::NAN });
        }
        disc = 0.0;
    }
    let d_plus_sq = (delta + disc.sqrt()) / 2.0;
    if !(d_plus_sq > 0.0) || sqrt_i4 <= 0.0 {
        return Err(Error::UnphysicalCovariance { d_minus: 0.0 });
    }
    let d_plus = d_plus_sq.sqrt();
    let mut d_minus = sqrt_i4 / d_plus;
    if d_minus < 0.5 - UNPHYSICAL_TOL {
        return Err(Error::UnphysicalCovariance { d_minus });
    }
    // `a b - c^2` is only known to a few ulps of `a b`; eigenvalues that close to
    // 1/2 are vacuum, not a tiny entropy blown up by the infinite slope of h.
    let noise = ROUNDING_FLOOR * f64::EPSILON * (a * b + c2);
    let snap = |d: f64| if d - 0.5 <= noise { 0.5 } else { d };
    d_minus = snap(d_minus);
    let d_plus = snap(d_plus.max(d_minus));
    Ok(SymplecticSpectrum { d_plus, d_minus, invariants: [i1, i2, i3, i4], delta_sigma: delta })
}

/// `h(d_-) + h(d_+)`: the relative-entropy non-Gaussianity of a pure state
/// with this covariance matrix.
pub fn non_gaussianity_from_cm(cm: &TwoModeCM) -> Result<f64> {
    let s = symplectic_eigenvalues(cm)?;
    Ok(h_entropy(s.d_minus)? + h_entropy(s.d_plus)?)
}

/// Non-Gaussianity of the photon-subtracted resource. The state is pure, so
/// its own entropy term vanishes.
pub fn non_gaussianity(spec: &SubtractionSpec) -> Result<f64> {
    non_gaussianity_from_cm(&covariance_matrix(spec))
}

/// One-sided limit as `lam -> 0+`: the state tends to `|n-m>|0>`, a single
/// Fock state of `d = |n-m|` photons with `h(d + 1/2) = (d+1) ln(d+1) - d ln d`.
pub fn non_gaussianity_zero_squeezing_limit(m: u32, n: u32) -> f64 {
    let d = m.abs_diff(n) as f64;
    h_entropy(d + 0.5).expect("d >= 0")
}
