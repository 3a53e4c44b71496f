//! `start:stop:count` grids and `m,n` pair arguments.

use crate::error::{CliError, CliResult};

pub const DEFAULT_LAM_GRID: &str = "0.05:0.95:19";
pub const DEFAULT_R_GRID: &str = "0.05:2:40";

/// Evenly spaced points, each rounded to 1e-12 so that decimal grids print cleanly.
pub fn parse_grid(text: &str) -> CliResult<Vec<f64>> {
    let bad = || CliError::Usage(format!("grid must look like start:stop:count, got {text:?}"));
    let parts: Vec<&str> = text.split(':').collect();
    if parts.len() != 3 {
        return Err(bad());
    }
    let start: f64 = parts[0].trim().parse().map_err(|_| bad())?;
    let stop: f64 = parts[1].trim().parse().map_err(|_| bad())?;
    let count: usize = parts[2].trim().parse().map_err(|_| bad())?;
    if count == 0 || !start.is_finite() || !stop.is_finite() {
        return Err(bad());
    }
    if count == 1 {
        return Ok(vec![start]);
    }
    if stop <= start {
        return Err(CliError::Usage(format!("grid {text:?} is not strictly increasing")));
    }
    let step = (stop - start) / (count - 1) as f64;
    Ok((0..count).map(|i| ((start + i as f64 * step) * 1e12).round() / 1e12).collect())
}

/// A squeezing grid in `lam`, every point inside `(0, 1)`.
pub fn parse_lam_grid(text: &str) -> CliResult<Vec<f64>> {
    let g = parse_grid(text)?;
    if g.iter().any(|&l| !(l > 0.0 && l < 1.0)) {
        return Err(CliError::Usage(format!("lam grid {text:?} must lie strictly inside (0, 1)")));
    }
    Ok(g)
}

/// A squeezing grid in `r`, every point positive.
pub fn parse_r_grid(text: &str) -> CliResult<Vec<f64>> {
    let g = parse_grid(text)?;
    if g.iter().any(|&r| !(r > 0.0)) {
        return Err(CliError::Usage(format!("r grid {text:?} must be positive")));
    }
    Ok(g)
}

/// `"m,n"`.
pub fn parse_pair(text: &str) -> CliResult<(u32, u32)> {
    let bad = || CliError::Usage(format!("pair must look like m,n, got {text:?}"));
    let (a, b) = text.split_once(',').ok_or_else(bad)?;
    Ok((a.trim().parse().map_err(|_| bad())?, b.trim().parse().map_err(|_| bad())?))
}
