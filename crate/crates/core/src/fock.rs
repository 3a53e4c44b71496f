//! Independent Fock-space reference: the resource is expanded in number
//! states, `chi_12` is assembled from displacement matrix elements and the
//! teleportation fidelity is integrated numerically in polar coordinates.
//!
//! Nothing here uses the Gaussian-derivative engine.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::resource::{FockState, TwoModeCM};
use crate::special::{laguerre_sequence, log_factorial};

/// Tail bound used when the oracle builds its own Fock expansion.
pub const ORACLE_TAIL_EPS: f64 = 1e-16;

/// Largest tolerated disagreement between a scheme and the same scheme with
/// twice the radial nodes.
pub const QUADRATURE_SELF_CHECK: f64 = 1e-8;

/// Largest tolerated imaginary part of an integrated fidelity.
pub const IMAGINARY_RESIDUE_TOL: f64 = 1e-10;

/// Tolerance on moments that must vanish by symmetry.
const ZERO_MOMENT_TOL: f64 = 1e-12;

/// Gauss-Laguerre in `t = |alpha|^2` times an equispaced rule in the angle.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct QuadratureScheme {
    pub radial_nodes: usize,
    pub angular_nodes: usize,
}

impl Default for QuadratureScheme {
    fn default() -> Self {
        QuadratureScheme { radial_nodes: 64, angular_nodes: 48 }
    }
}

impl QuadratureScheme {
    /// Fewest angular nodes that integrate every phase `e^{i d theta}` of an
    /// `(m, n)` resource exactly.
    pub fn min_angular(m: u32, n: u32) -> usize {
        4 * (m + n) as usize + 8
    }

    /// Default scheme widened, if needed, for the given orders.
    pub fn for_orders(m: u32, n: u32) -> Self {
        let d = Self::default();
        QuadratureScheme { radial_nodes: d.radial_nodes, angular_nodes: d.angular_nodes.max(Self::min_angular(m, n)) }
    }

    pub fn validate(&self, m: u32, n: u32) -> Result<()> {
        if self.radial_nodes < 2 {
            return Err(Error::InvalidScheme(format!("need at least 2 radial nodes, got {}", self.radial_nodes)));
        }
        let min = Self::min_angular(m, n);
        if self.angular_nodes < min {
            return Err(Error::InvalidScheme(format!(
                "{} angular nodes is below the minimum {min} for (m, n) = ({m}, {n})",
                self.angular_nodes
            )));
        }
        Ok(())
    }
}

/// Nodes and weights of the `n`-point Gauss-Laguerre rule for weight `e^{-t}`.
///
/// Newton residuals and weights use a double-double evaluation of the
/// three-term recurrence; in plain `f64` the smallest nodes drift by a few
/// hundred ulps, and the weights inherit that error amplified by `n`.
pub fn gauss_laguerre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    let nf = n as f64;
    let mut z = 0.0f64;
    for i in 0..n {
        z = match i {
            0 => 3.0 / (1.0 + 2.4 * nf),
            1 => z + 15.0 / (1.0 + 2.5 * nf),
            _ => {
                let ai = (i - 1) as f64;
                z + (1.0 + 2.55 * ai) / (1.9 * ai) * (z - x[i - 2])
            }
        };
        // One polishing step after the update first drops to ulp size.
        let mut polished = false;
        for _ in 0..100 {
            let (p1, p0) = laguerre_pair(n, z);
            let dp = nf * (p1.hi - p0.hi) / z;
            let dz = (p1.hi + p1.lo) / dp;
            z -= dz;
            if polished {
                break;
            }
            polished = dz.abs() <= 4.0 * f64::EPSILON * z.abs();
        }
        x[i] = z;
        // w = x / ((n+1)^2 L_{n+1}(x)^2)
        let (next, _) = laguerre_pair(n + 1, z);
        let l = next.hi + next.lo;
        let wi = z / ((nf + 1.0) * (nf + 1.0) * l * l);
        w[i] = if wi.is_finite() { wi } else { 0.0 };
    }
    (x, w)
}

/// Unevaluated sum `hi + lo` with `|lo| <= ulp(hi) / 2`.
#[derive(Debug, Clone, Copy)]
struct DoubleDouble {
    hi: f64,
    lo: f64,
}

impl DoubleDouble {
    fn new(hi: f64) -> Self {
        DoubleDouble { hi, lo: 0.0 }
    }

    fn renorm(s: f64, e: f64) -> Self {
        let hi = s + e;
        DoubleDouble { hi, lo: e - (hi - s) }
    }

    fn add(self, o: Self) -> Self {
        let s = self.hi + o.hi;
        let bb = s - self.hi;
        let e = (self.hi - (s - bb)) + (o.hi - bb) + self.lo + o.lo;
        Self::renorm(s, e)
    }

    fn mul(self, o: Self) -> Self {
        let p = self.hi * o.hi;
        let e = self.hi.mul_add(o.hi, -p) + self.hi * o.lo + self.lo * o.hi;
        Self::renorm(p, e)
    }

    fn scale(self, k: f64) -> Self {
        self.mul(Self::new(k))
    }

    fn div(self, d: f64) -> Self {
        let q = self.hi / d;
        let p = q * d;
        let pe = q.mul_add(d, -p);
        let r = ((self.hi - p) - pe + self.lo) / d;
        Self::renorm(q, r)
    }
}

/// `(L_n(z), L_{n-1}(z))` by the three-term recurrence in double-double.
fn laguerre_pair(n: usize, z: f64) -> (DoubleDouble, DoubleDouble) {
    let mut p1 = DoubleDouble::new(1.0);
    let mut p2 = DoubleDouble::new(0.0);
    let mz = DoubleDouble::new(-z);
    for j in 0..n {
        let p3 = p2;
        p2 = p1;
        let jf = j as f64;
        let a = DoubleDouble::new(2.0 * jf + 1.0).add(mz);
        p1 = a.mul(p2).add(p3.scale(-jf)).div(jf + 1.0);
    }
    (p1, p2)
}

/// `<j|D(alpha)|k>` for the displacement operator `D(alpha) = exp(alpha a^dag - alpha* a)`.
pub fn displacement_element(j: u32, k: u32, alpha: Complex64) -> Complex64 {
    let r = alpha.norm();
    let (lo, d) = if j >= k { (k, j - k) } else { (j, k - j) };
    let radial = radial_element(lo, d, r);
    if j >= k {
        radial * Complex64::from_polar(1.0, d as f64 * alpha.arg())
    } else {
        // (-alpha*)^d
        let sign = if d % 2 == 0 { 1.0 } else { -1.0 };
        sign * radial * Complex64::from_polar(1.0, -(d as f64) * alpha.arg())
    }
}

/// `sqrt(lo!/(lo+d)!) r^d e^{-r^2/2} L_lo^{(d)}(r^2)`.
fn radial_element(lo: u32, d: u32, r: f64) -> f64 {
    let x = r * r;
    let l = *laguerre_sequence(lo as usize, d as f64, x).last().expect("non-empty");
    scaled_radial(lo, d, r, l)
}

fn scaled_radial(lo: u32, d: u32, r: f64, laguerre: f64) -> f64 {
    if laguerre == 0.0 {
        return 0.0;
    }
    if r == 0.0 {
        return if d == 0 { laguerre } else { 0.0 };
    }
    let log_pref = 0.5 * (log_factorial(lo) - log_factorial(lo + d)) - 0.5 * r * r + d as f64 * r.ln();
    laguerre.signum() * (log_pref + laguerre.abs().ln()).exp()
}

/// Real radial parts of `<j|D(r e^{i theta})|k>` for `j, k < size`; the full
/// element is `table[j][k] e^{i (j-k) theta}`.
struct RadialTable {
    size: usize,
    values: Vec<f64>,
}

impl RadialTable {
    /// For each offset `d` the normalized elements
    /// `R_k = sqrt(k!/(k+d)!) r^d e^{-x/2} L_k^{(d)}(x)` obey
    /// `R_{k+1} = q_k [(2k+1+d-x) R_k - (k+d) q_{k-1} R_{k-1}] / (k+1)` with
    /// `q_k = sqrt((k+1)/(k+d+1))`, so only the starting value needs logs.
    fn new(size: usize, r: f64) -> Self {
        let x = r * r;
        let mut values = vec![0.0; size * size];
        let mut log_fact_d = 0.0;
        for d in 0..size {
            if d > 0 {
                log_fact_d += (d as f64).ln();
            }
            let df = d as f64;
            let start = if r == 0.0 {
                if d == 0 { 1.0 } else { 0.0 }
            } else {
                (-0.5 * log_fact_d + df * r.ln() - 0.5 * x).exp()
            };
            let sign = if d % 2 == 0 { 1.0 } else { -1.0 };
            let mut prev = 0.0;
            let mut cur = start;
            let mut q_prev = 0.0;
            for lo in 0..size - d {
                values[(lo + d) * size + lo] = cur;
                values[lo * size + lo + d] = sign * cur;
                let k = lo as f64;
                let q = ((k + 1.0) / (k + df + 1.0)).sqrt();
                let next = q * ((2.0 * k + 1.0 + df - x) * cur - (k + df) * q_prev * prev) / (k + 1.0);
                prev = cur;
                cur = next;
                q_prev = q;
            }
        }
        RadialTable { size, values }
    }

    fn get(&self, j: usize, k: usize) -> f64 {
        self.values[j * self.size + k]
    }
}

/// `S_d = sum_k c_{k+d} c_k R1[k+d-m][k-m] R2[k+d-n][k-n]` for every
/// offset `d` in `-(K-k_min) ..= K-k_min`, indexed by `d + K - k_min`.
fn phase_sums(state: &FockState, t1: &RadialTable, t2: &RadialTable) -> Vec<f64> {
    let c = state.diagonal();
    let len = c.len();
    let k_min = state.m().max(state.n()) as usize;
    let (m, n) = (state.m() as usize, state.n() as usize);
    let mut out = vec![0.0; 2 * len - 1];
    for (i1, &c1) in c.iter().enumerate() {
        let k1 = k_min + i1;
        for (i2, &c2) in c.iter().enumerate() {
            let k2 = k_min + i2;
            out[i1 + len - 1 - i2] += c1 * c2 * t1.get(k1 - m, k2 - m) * t2.get(k1 - n, k2 - n);
        }
    }
    out
}

fn combine_phases(sums: &[f64], phase: f64) -> Complex64 {
    let half = (sums.len() - 1) / 2;
    // Offsets d and -d share |e^{i d phase}|; pair them and step the phase by rotation.
    let step = Complex64::from_polar(1.0, phase);
    let mut rot = Complex64::new(1.0, 0.0);
    let mut acc = Complex64::new(sums[half], 0.0);
    for d in 1..=half {
        rot *= step;
        acc += sums[half + d] * rot + sums[half - d] * rot.conj();
    }
    acc
}

/// `chi_12(alpha, beta) = <psi| D(alpha) (x) D(beta) |psi>` from the Fock expansion.
pub fn chi12_numeric(state: &FockState, alpha: Complex64, beta: Complex64) -> Complex64 {
    let size = state.truncation() as usize + 1;
    let t1 = RadialTable::new(size, alpha.norm());
    let t2 = RadialTable::new(size, beta.norm());
    combine_phases(&phase_sums(state, &t1, &t2), alpha.arg() + beta.arg())
}

/// Pairwise summation in a fixed order.
fn pairwise_sum(v: &[Complex64]) -> Complex64 {
    if v.len() <= 8 {
        return v.iter().sum();
    }
    let (a, b) = v.split_at(v.len() / 2);
    pairwise_sum(a) + pairwise_sum(b)
}

fn integrate(state: &FockState, mu: Complex64, radial_nodes: usize, angular_nodes: usize) -> Complex64 {
    let (nodes, weights) = gauss_laguerre(radial_nodes);
    let size = state.truncation() as usize + 1;
    let per_node: Vec<Vec<Complex64>> = nodes
        .par_iter()
        .zip(weights.par_iter())
        .map(|(&t, &w)| {
            let r = t.sqrt();
            let table = RadialTable::new(size, r);
            let sums = phase_sums(state, &table, &table);
            (0..angular_nodes)
                .map(|j| {
                    let theta = 2.0 * std::f64::consts::PI * j as f64 / angular_nodes as f64;
                    let a = Complex64::from_polar(r, theta);
                    // chi_in(a) chi_in(-a) e^{t}, kept in the exponent.
                    let phase = 2.0 * (a * mu.conj()).im;
                    let expo = Complex64::new(-t / 2.0, phase) + Complex64::new(-t / 2.0, -phase) + t;
                    let arg1 = -a.conj();
                    let arg2 = -a;
                    let chi = combine_phases(&sums, arg1.arg() + arg2.arg());
                    w * expo.exp() * chi / angular_nodes as f64
                })
                .collect()
        })
        .collect();
    let flat: Vec<Complex64> = per_node.into_iter().flatten().collect();
    pairwise_sum(&flat)
}

/// Fidelity of teleporting the coherent state `|mu>` through `state`:
/// `(1/pi) int chi_in(alpha) chi_in(-alpha) chi_12(-alpha*, -alpha) d^2 alpha`.
///
/// The rule is run at `radial_nodes` and at twice as many; if the two differ
/// by more than [`QUADRATURE_SELF_CHECK`] the call fails, otherwise the finer
/// value is returned.
pub fn fidelity_numeric(state: &FockState, mu: Complex64, scheme: &QuadratureScheme) -> Result<f64> {
    scheme.validate(state.m(), state.n())?;
    let coarse = integrate(state, mu, scheme.radial_nodes, scheme.angular_nodes);
    let fine = integrate(state, mu, 2 * scheme.radial_nodes, scheme.angular_nodes);
    for v in [coarse, fine] {
        if v.im.abs() > IMAGINARY_RESIDUE_TOL {
            return Err(Error::Consistency(format!("fidelity has imaginary residue {:e}", v.im)));
        }
    }
    let delta = (fine.re - coarse.re).abs();
    if !(delta <= QUADRATURE_SELF_CHECK) {
        return Err(Error::QuadratureInsufficient { delta });
    }
    Ok(fine.re)
}

/// Covariance matrix from Fock-space moments, checking that every moment
/// which must vanish for this family does so.
pub fn cm_numeric(state: &FockState) -> Result<TwoModeCM> {
    let amp = |j: i64, l: i64| if j < 0 || l < 0 { 0.0 } else { state.amplitude(j as u32, l as u32) };
    let mut n1 = 0.0;
    let mut n2 = 0.0;
    let mut ab = 0.0;
    let mut first = [0.0f64; 2];
    let mut second = [0.0f64; 3];
    for (j, l, c) in state.entries() {
        let (jf, lf) = (j as f64, l as f64);
        let (ji, li) = (j as i64, l as i64);
        n1 += c * c * jf;
        n2 += c * c * lf;
        ab += amp(ji - 1, li - 1) * c * (jf * lf).sqrt();
        first[0] += amp(ji - 1, li) * c * jf.sqrt();
        first[1] += amp(ji, li - 1) * c * lf.sqrt();
        second[0] += amp(ji - 2, li) * c * (jf * (jf - 1.0)).max(0.0).sqrt();
        second[1] += amp(ji, li - 2) * c * (lf * (lf - 1.0)).max(0.0).sqrt();
        second[2] += amp(ji + 1, li - 1) * c * ((jf + 1.0) * lf).sqrt();
    }
    let scale = 1.0 + n1 + n2;
    for (name, v) in [("<a>", first[0]), ("<b>", first[1]), ("<a^2>", second[0]), ("<b^2>", second[1]), ("<a^dag b>", second[2])] {
        if v.abs() > ZERO_MOMENT_TOL * scale {
            return Err(Error::Consistency(format!("moment {name} = {v:e} should vanish")));
        }
    }
    TwoModeCM::new(0.5 + n1, 0.5 + n2, ab)
}
