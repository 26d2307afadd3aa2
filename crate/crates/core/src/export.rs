//! Trajectory CSV export and import.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::integrator::Trajectory;
use crate::soliton::SolitonState;

/// One CSV row. Floats are written in shortest round-trip form.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CsvRow {
    pub r: f64,
    pub psi: f64,
    pub dpsi: f64,
    pub ddpsi: Option<f64>,
    #[serde(rename = "F")]
    pub potential: f64,
    #[serde(rename = "Fprime")]
    pub potential_slope: f64,
    #[serde(rename = "R")]
    pub curvature: f64,
    pub rbar_residual: f64,
}

impl CsvRow {
    pub fn state(&self) -> SolitonState {
        SolitonState {
            r: self.r,
            psi: self.psi,
            dpsi: self.dpsi,
            potential: self.potential,
            ddpsi: self.ddpsi,
        }
    }
}

/// Rows for every `stride`-th sample, always ending with the last one.
pub fn csv_rows(traj: &Trajectory, stride: usize) -> Vec<CsvRow> {
    let stride = stride.max(1);
    let n = traj.samples.len();
    let mut idx: Vec<usize> = (0..n).step_by(stride).collect();
    if idx.last() != Some(&(n - 1)) {
        idx.push(n - 1);
    }
    let c = traj.params.c;
    idx.into_iter()
        .map(|i| {
            let s = &traj.samples[i];
            CsvRow {
                r: s.r,
                psi: s.psi,
                dpsi: s.dpsi,
                ddpsi: s.ddpsi,
                potential: s.potential,
                potential_slope: s.psi * (c * s.potential).exp(),
                curvature: traj.diagnostics.curvature[i],
                rbar_residual: traj.diagnostics.rbar_residual[i],
            }
        })
        .collect()
}

pub fn write_csv<W: std::io::Write>(traj: &Trajectory, stride: usize, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for row in csv_rows(traj, stride) {
        w.serialize(row)
            .map_err(|e| Error::io(Path::new("<writer>"), e))?;
    }
    w.flush().map_err(|e| Error::io(Path::new("<writer>"), e))?;
    Ok(())
}

pub fn export_trajectory(traj: &Trajectory, path: &Path, stride: usize) -> Result<()> {
    let file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
    write_csv(traj, stride, std::io::BufWriter::new(file)).map_err(|e| match e {
        Error::Io { message, .. } => Error::io(path, message),
        other => other,
    })
}

pub fn read_csv(path: &Path) -> Result<Vec<CsvRow>> {
    let mut rdr = csv::Reader::from_path(path).map_err(|e| Error::io(path, e))?;
    rdr.deserialize()
        .collect::<std::result::Result<Vec<CsvRow>, _>>()
        .map_err(|e| Error::io(path, e))
}
