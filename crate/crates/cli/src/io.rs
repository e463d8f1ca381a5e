//! Artifact writers and the matching readers.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use clebsch::dynamics::Trajectory;
use clebsch::linearize::ResidualSample;
use clebsch::BodyState;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

pub type IoResult<T> = Result<T, Box<dyn std::error::Error + Send + Sync>>;

/// One trajectory row, header `t,K1,K2,K3,p1,p2,p3`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryRow {
    pub t: f64,
    #[serde(rename = "K1")]
    pub k1: f64,
    #[serde(rename = "K2")]
    pub k2: f64,
    #[serde(rename = "K3")]
    pub k3: f64,
    pub p1: f64,
    pub p2: f64,
    pub p3: f64,
}

impl TrajectoryRow {
    pub fn new(t: f64, s: &BodyState) -> Self {
        let [k1, k2, k3, p1, p2, p3] = s.to_array();
        TrajectoryRow { t, k1, k2, k3, p1, p2, p3 }
    }

    pub fn state(&self) -> BodyState {
        BodyState::new([self.k1, self.k2, self.k3], [self.p1, self.p2, self.p3])
    }
}

/// Separation coordinates along a run, header `t,x1,x2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SeparationRow {
    pub t: f64,
    pub x1: f64,
    pub x2: f64,
}

/// Kummer image and its relative residual, header `t,X1,X2,X3,X4,residual`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuarticResidualRow {
    pub t: f64,
    #[serde(rename = "X1")]
    pub x1: f64,
    #[serde(rename = "X2")]
    pub x2: f64,
    #[serde(rename = "X3")]
    pub x3: f64,
    #[serde(rename = "X4")]
    pub x4: f64,
    pub residual: f64,
}

pub fn write_csv<T: Serialize>(path: &Path, rows: &[T]) -> IoResult<()> {
    let mut w = csv::Writer::from_path(path)?;
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_csv<T: DeserializeOwned>(path: &Path) -> IoResult<Vec<T>> {
    let mut r = csv::Reader::from_path(path)?;
    Ok(r.deserialize().collect::<Result<Vec<T>, _>>()?)
}

/// Pretty JSON with a trailing newline.
pub fn write_json<T: Serialize + ?Sized>(path: &Path, value: &T) -> IoResult<()> {
    let mut w = BufWriter::new(File::create(path)?);
    serde_json::to_writer_pretty(&mut w, value)?;
    w.write_all(b"\n")?;
    w.flush()?;
    Ok(())
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> IoResult<T> {
    Ok(serde_json::from_reader(std::io::BufReader::new(File::open(path)?))?)
}

pub fn trajectory_rows(tr: &Trajectory) -> Vec<TrajectoryRow> {
    tr.times.iter().zip(&tr.states).map(|(t, s)| TrajectoryRow::new(*t, s)).collect()
}

pub fn read_trajectory(path: &Path) -> IoResult<(Vec<f64>, Vec<BodyState>)> {
    let rows: Vec<TrajectoryRow> = read_csv(path)?;
    Ok(rows.iter().map(|r| (r.t, r.state())).unzip())
}

pub fn read_residual_series(path: &Path) -> IoResult<Vec<ResidualSample>> {
    read_csv(path)
}
