//! Curve families behind each figure panel.

use std::fmt;
use std::str::FromStr;

use crate::error::{CliError, CliResult};
use crate::eval::{sweep, sweep_r, EvalConfig, PathChoice, SweepRecord};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Panel {
    /// Fixed `m` in `{0, 1, 2, 5}`, varying `n >= m`.
    Fixed(char),
    /// Fixed budget `C` in `{2, 3, 4, 10}`.
    Budget(char),
    /// Symmetric `m = n`.
    Symmetric,
    /// Non-Gaussianity against `r`, and fidelity against non-Gaussianity.
    Ng(char),
}

pub const ALL_PANELS: [&str; 13] = ["1a", "1b", "1c", "1d", "2a", "2b", "2c", "2d", "3", "4a", "4b", "4c", "4d"];

impl FromStr for Panel {
    type Err = CliError;

    fn from_str(s: &str) -> CliResult<Self> {
        let mut chars = s.chars();
        let panel = match (chars.next(), chars.next(), chars.next()) {
            (Some('1'), Some(c @ 'a'..='d'), None) => Panel::Fixed(c),
            (Some('2'), Some(c @ 'a'..='d'), None) => Panel::Budget(c),
            (Some('3'), None, None) => Panel::Symmetric,
            (Some('4'), Some(c @ 'a'..='d'), None) => Panel::Ng(c),
            _ => return Err(CliError::Usage(format!("unknown figure panel {s:?}; expected one of {}", ALL_PANELS.join(", ")))),
        };
        Ok(panel)
    }
}

impl fmt::Display for Panel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Panel::Fixed(c) => write!(f, "1{c}"),
            Panel::Budget(c) => write!(f, "2{c}"),
            Panel::Symmetric => write!(f, "3"),
            Panel::Ng(c) => write!(f, "4{c}"),
        }
    }
}

fn letter_index(c: char) -> usize {
    (c as u8 - b'a') as usize
}

impl Panel {
    /// Whether the panel is parameterized by `r` (and carries non-Gaussianity).
    pub fn uses_r(&self) -> bool {
        matches!(self, Panel::Ng(_))
    }

    /// `(m, n)` curves of the panel. `family` overrides the `n` values of
    /// the fixed-`m` panels.
    pub fn pairs(&self, family: Option<&[u32]>) -> Vec<(u32, u32)> {
        let mut pairs = match *self {
            Panel::Fixed(c) => {
                let m = [0, 1, 2, 5][letter_index(c)];
                match family {
                    Some(ns) => ns.iter().map(|&n| (m, n)).collect(),
                    None => (m..=m + 5).map(|n| (m, n)).collect::<Vec<_>>(),
                }
            }
            Panel::Budget(c) => {
                let total = [2, 3, 4, 10][letter_index(c)];
                (0..=total / 2).map(|m| (m, total - m)).collect()
            }
            Panel::Symmetric => (0..=10).map(|k| (k, k)).collect(),
            Panel::Ng('a') => [1u32, 2].iter().flat_map(|&d| (0..=2).map(move |m| (m, m + d))).collect(),
            Panel::Ng('b') => (0..=5).map(|m| (m, 10 - m)).collect(),
            Panel::Ng(_) => (1..=5).map(|k| (k, k)).collect(),
        };
        if !self.uses_r() && !pairs.contains(&(0, 0)) {
            pairs.push((0, 0));
        }
        pairs
    }
}

/// Rows for one panel. Fidelity panels run over the `lam` grid, the
/// non-Gaussianity panels over the `r` grid with `ng` populated.
pub fn figure(
    panel: Panel,
    lam_grid: &[f64],
    r_grid: &[f64],
    family: Option<&[u32]>,
    choice: PathChoice,
    cfg: &EvalConfig,
) -> CliResult<Vec<SweepRecord>> {
    let pairs = panel.pairs(family);
    if panel.uses_r() {
        sweep_r(&pairs, r_grid, choice, true, cfg)
    } else {
        sweep(&pairs, lam_grid, choice, false, cfg)
    }
}

/// Discrete initial slope `dF/d delta` of one curve of panel 4d.
pub fn initial_slope(rows: &[SweepRecord], m: u32, n: u32) -> Option<f64> {
    let curve: Vec<&SweepRecord> = rows.iter().filter(|r| r.m == m && r.n == n).collect();
    let (a, b) = (curve.first()?, curve.get(1)?);
    Some((b.fidelity - a.fidelity) / (b.ng? - a.ng?))
}
