//! Closed-form fidelities for `min(m, n) <= 5`.
//!
//! Each order `m` has the form `F^{(m,n)} = B_m(n, lam) f^{(m,n)}` with the
//! prefactor
//!
//! `f^{(m,n)} = lam^{2n} / N_{m,n} * m! n! (1 + lam) / (2^{m+n+1} (1 - lam)^{m+n})`
//!
//! and a bracket `B_m` that is a degree-`2m` polynomial in `lam` whose
//! coefficients are degree-`m` polynomials in `n`. The brackets ship as
//! data tables below.
//!
//! The published `m = 3` bracket is known to be misprinted; it is kept as
//! [`PRINTED_BRACKET_M3`] so that reports can quantify the deviation, while
//! values always come from [`BRACKETS`], whose `m = 3` row was regenerated
//! from the exact engine.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::resource::{normalization_unchecked, SubtractionSpec};
use crate::special::factorial;

/// Version tag of the embedded bracket tables.
pub const BRACKET_TABLE_VERSION: &str = "1.0.0";

/// Largest `min(m, n)` covered by a closed form.
pub const MAX_CLOSED_ORDER: u32 = 5;

/// One `lam^k` coefficient: `(sum_i numer[i] n^i) / denom`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NPoly {
    pub denom: i64,
    pub numer: &'static [i64],
}

impl NPoly {
    pub fn eval(&self, n: f64) -> f64 {
        self.numer.iter().rev().fold(0.0, |acc, &c| acc * n + c as f64) / self.denom as f64
    }
}

const fn p(denom: i64, numer: &'static [i64]) -> NPoly {
    NPoly { denom, numer }
}

/// Bracket coefficients indexed by `[m][k]` for `lam^k`.
pub const BRACKETS: [&[NPoly]; 6] = [
    &[p(1, &[1])],
    &[p(1, &[0, 4]), p(1, &[0, -4]), p(1, &[1, 1])],
    &[p(1, &[0, -8, 8]), p(1, &[0, 16, -16]), p(1, &[0, -4, 12]), p(1, &[0, -4, -4]), p(2, &[2, 3, 1])],
    // Regenerated. Differences from the printed bracket: n(n-1)(n-2) instead
    // of n(n-1)(n-3) in the first two coefficients, and the lam^3 and lam^4
    // powers that the printed third and fourth terms lack.
    &[
        p(3, &[0, 64, -96, 32]),
        p(1, &[0, -64, 96, -32]),
        p(1, &[0, 56, -96, 40]),
        p(3, &[0, -16, 96, -80]),
        p(1, &[0, -4, 6, 10]),
        p(1, &[0, -4, -6, -2]),
        p(6, &[6, 11, 6, 1]),
    ],
    &[
        p(3, &[0, -192, 352, -192, 32]),
        p(3, &[0, 768, -1408, 768, -128]),
        p(3, &[0, -1088, 2080, -1216, 224]),
        p(3, &[0, 576, -1312, 960, -224]),
        p(3, &[0, -24, 244, -360, 140]),
        p(3, &[0, -16, 56, 16, -56]),
        p(3, &[0, -12, 10, 36, 14]),
        p(3, &[0, -12, -22, -12, -2]),
        p(24, &[24, 50, 35, 10, 1]),
    ],
    &[
        p(15, &[0, 3072, -6400, 4480, -1280, 128]),
        p(3, &[0, -3072, 6400, -4480, 1280, -128]),
        p(3, &[0, 5952, -12640, 9120, -2720, 288]),
        p(3, &[0, -5376, 12160, -9600, 3200, -384]),
        p(3, &[0, 1984, -5440, 5360, -2240, 336]),
        p(15, &[0, -192, 3200, -6480, 4480, -1008]),
        p(3, &[0, -24, 140, -60, -140, 84]),
        p(3, &[0, -16, 40, 40, -40, -24]),
        p(6, &[0, -24, 10, 75, 50, 9]),
        p(6, &[0, -24, -50, -35, -10, -1]),
        p(120, &[120, 274, 225, 85, 15, 1]),
    ],
];

/// The `m = 3` bracket exactly as published, expanded in `lam`: the two
/// power-less terms land in the constant coefficient. It multiplies the
/// `f^{(2,n)}` prefactor, also as published.
pub const PRINTED_BRACKET_M3: &[NPoly] = &[
    p(3, &[0, 68, -14, -18]),
    p(1, &[0, -96, 128, -32]),
    p(1, &[0, 56, -96, 40]),
    p(1, &[0]),
    p(1, &[0]),
    p(1, &[0, -4, -6, -2]),
    p(6, &[6, 11, 6, 1]),
];

fn eval_bracket(table: &[NPoly], n: u32, lam: f64) -> f64 {
    table.iter().rev().fold(0.0, |acc, c| acc * lam + c.eval(n as f64))
}

/// The prefactor `f^{(m,n)}`, taking the modes in either order.
pub fn f_prefactor(m: u32, n: u32, lam: f64) -> Result<f64> {
    let (m, n) = if m <= n { (m, n) } else { (n, m) };
    let spec = SubtractionSpec::new(m, n, lam)?;
    Ok(prefactor_unchecked(spec.m(), spec.n(), spec.lam()))
}

fn prefactor_unchecked(m: u32, n: u32, lam: f64) -> f64 {
    let norm = normalization_unchecked(m, n, lam);
    lam.powi(2 * n as i32) / norm * factorial(m) * factorial(n) * (1.0 + lam)
        / (2f64.powi((m + n + 1) as i32) * (1.0 - lam).powi((m + n) as i32))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClosedFormReport {
    /// Fidelity from the (corrected where needed) closed form.
    pub value: f64,
    /// Which bracket produced the value, e.g. `"bracket-m3-regenerated"`.
    pub formula_id: String,
    /// `|printed - value|` for orders whose published formula is defective.
    pub printed_formula_deviation: Option<f64>,
}

/// Closed-form fidelity. The modes are ordered so that `m <= n` first.
pub fn fidelity_closed(m: u32, n: u32, lam: f64) -> Result<ClosedFormReport> {
    let (m, n) = if m <= n { (m, n) } else { (n, m) };
    if m > MAX_CLOSED_ORDER {
        return Err(Error::UnsupportedOrder { m });
    }
    let spec = SubtractionSpec::new(m, n, lam)?;
    let lam = spec.lam();
    let value = eval_bracket(BRACKETS[m as usize], n, lam) * prefactor_unchecked(m, n, lam);
    if m == 3 {
        let printed = printed_m3(n, lam);
        return Ok(ClosedFormReport {
            value,
            formula_id: "bracket-m3-regenerated".into(),
            printed_formula_deviation: Some((printed - value).abs()),
        });
    }
    Ok(ClosedFormReport { value, formula_id: format!("bracket-m{m}"), printed_formula_deviation: None })
}

/// The published `m = 3` expression, literal: misprinted bracket times `f^{(2,n)}`.
pub fn printed_m3(n: u32, lam: f64) -> f64 {
    eval_bracket(PRINTED_BRACKET_M3, n, lam) * prefactor_unchecked(2, n, lam)
}

/// One-sided limit of the fidelity as `lam -> 0+` for `m + n > 0`.
///
/// The normalized state tends to the product `|n-m>|0>` (or its mirror),
/// whose teleportation fidelity is `int_0^inf e^{-2t} L_d(t) dt = 2^{-d-1}`.
pub fn fidelity_zero_squeezing_limit(m: u32, n: u32) -> f64 {
    0.5f64.powi(m.abs_diff(n) as i32 + 1)
}

/// JSON-friendly dump of the bracket tables.
#[derive(Debug, Clone, Serialize)]
pub struct BracketTableExport {
    pub version: &'static str,
    pub description: &'static str,
    pub brackets: Vec<BracketExport>,
    pub printed_m3: BracketExport,
}

#[derive(Debug, Clone, Serialize)]
pub struct BracketExport {
    pub m: u32,
    pub prefactor_order: u32,
    /// `coefficients[k]` multiplies `lam^k`.
    pub coefficients: Vec<NPoly>,
}

pub fn bracket_table_export() -> BracketTableExport {
    BracketTableExport {
        version: BRACKET_TABLE_VERSION,
        description: "F(m,n) = [sum_k lam^k (sum_i numer[i] n^i)/denom] * f(m,n) for n >= m",
        brackets: BRACKETS
            .iter()
            .enumerate()
            .map(|(m, t)| BracketExport { m: m as u32, prefactor_order: m as u32, coefficients: t.to_vec() })
            .collect(),
        printed_m3: BracketExport { m: 3, prefactor_order: 2, coefficients: PRINTED_BRACKET_M3.to_vec() },
    }
}
