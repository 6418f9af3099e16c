use std::path::Path;

use serde::{Deserialize, Serialize};

use super::minimize::TraceRow;
use super::{Grid1D, MagnetizationProfile};
use crate::error::{NeelError, Result};

#[derive(Debug, Serialize, Deserialize)]
struct ProfileRow {
    x: f64,
    phi: f64,
    m1: f64,
    m2: f64,
}

fn csv_err(e: csv::Error) -> NeelError {
    NeelError::Io(e.to_string())
}

/// Writes `x, phi, m1, m2`.
pub fn write_profile_csv<W: std::io::Write>(profile: &MagnetizationProfile, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for (i, p) in profile.phi.iter().enumerate() {
        w.serialize(ProfileRow { x: profile.grid.x(i), phi: *p, m1: p.cos(), m2: p.sin() }).map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}

/// Reads a profile written by [`write_profile_csv`]; the nodes must be uniform.
pub fn read_profile_csv(path: &Path) -> Result<MagnetizationProfile> {
    let mut r = csv::Reader::from_path(path).map_err(csv_err)?;
    let mut xs = Vec::new();
    let mut phi = Vec::new();
    for row in r.deserialize() {
        let row: ProfileRow = row.map_err(|e| NeelError::Parse(e.to_string()))?;
        xs.push(row.x);
        phi.push(row.phi);
    }
    if xs.len() < 16 {
        return Err(NeelError::Parse(format!("profile has {} rows, need at least 16", xs.len())));
    }
    let grid = Grid1D::new(xs[0], xs[xs.len() - 1], xs.len())?;
    if xs.iter().enumerate().any(|(i, x)| (x - grid.x(i)).abs() > 1e-9 * (1.0 + x.abs())) {
        return Err(NeelError::Parse("profile nodes are not uniformly spaced".into()));
    }
    MagnetizationProfile::new(grid, phi)
}

/// Writes `iteration, exchange, anisotropy, stray, total`.
pub fn write_trace_csv<W: std::io::Write>(trace: &[TraceRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for row in trace {
        w.serialize(row).map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}
