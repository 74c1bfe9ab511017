//! JSON and CSV file formats.

use std::io::{self, Write};

use serde::{Deserialize, Serialize};

use crate::classify::grid_classify;
use crate::conserved::Quantity;
use crate::error::{Error, Result};
use crate::orbit::{Direction, OrbitTrajectory, Termination};
use crate::polygon::{CornerInvariants, TwistedPolygon};
use crate::projective::{AffinePoint, HomogeneousPoint, ProjectiveTransform};
use crate::scalar::{ExtReal, Scalar};

/// `{ "n", "vertices": [[x,y,z], ...], "monodromy": [9 reals, row-major] }`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PolygonJson {
    pub n: usize,
    pub vertices: Vec<[f64; 3]>,
    pub monodromy: Vec<f64>,
}

impl PolygonJson {
    pub fn from_polygon(p: &TwistedPolygon<f64>) -> Self {
        PolygonJson {
            n: p.n(),
            vertices: p.vertices().iter().map(|v| *v.coords()).collect(),
            monodromy: p.monodromy().row_major(),
        }
    }

    pub fn to_polygon(&self) -> Result<TwistedPolygon<f64>> {
        if self.vertices.len() != self.n {
            return Err(Error::InvalidInput(format!("n = {} but {} vertices given", self.n, self.vertices.len())));
        }
        let vertices = self.vertices.iter().map(|&c| HomogeneousPoint::from_coords(c)).collect::<Result<Vec<_>>>()?;
        TwistedPolygon::new(vertices, ProjectiveTransform::from_row_major(&self.monodromy)?)
    }
}

/// `{ "n", "x": [2n reals] }`, optionally with the seed that produced it.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InvariantsJson {
    pub n: usize,
    pub x: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

impl InvariantsJson {
    /// Fails on infinite entries, which the format does not carry.
    pub fn from_invariants<S: Scalar>(x: &CornerInvariants<S>, seed: Option<u64>) -> Result<Self> {
        let vals = x.to_f64().finite_values()?;
        Ok(InvariantsJson { n: x.n(), x: vals, seed })
    }

    pub fn to_invariants(&self) -> Result<CornerInvariants<f64>> {
        if self.x.len() != 2 * self.n {
            return Err(Error::InvalidInput(format!("n = {} needs {} entries, got {}", self.n, 2 * self.n, self.x.len())));
        }
        if let Some(v) = self.x.iter().find(|v| !v.is_finite()) {
            return Err(Error::InvalidInput(format!("non-finite corner invariant {v}")));
        }
        CornerInvariants::from_f64(&self.x)
    }
}

/// Either input document accepted by the CLI and the protocol.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Document {
    Polygon(PolygonJson),
    Invariants(InvariantsJson),
}

impl Document {
    pub fn parse(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::InvalidInput(format!("unrecognized document: {e}")))
    }

    /// Corner invariants, measured from the polygon when one is given.
    pub fn invariants(&self) -> Result<CornerInvariants<f64>> {
        match self {
            Document::Polygon(p) => p.to_polygon()?.corner_invariants(),
            Document::Invariants(x) => x.to_invariants(),
        }
    }
}

/// Fixed 17-significant-digit rendering used in CSV output.
pub fn fmt_float(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.16e}")
    } else if v.is_nan() {
        "nan".into()
    } else if v > 0.0 {
        "inf".into()
    } else {
        "-inf".into()
    }
}

fn fmt_quantity<S: Scalar>(q: &Quantity<S>) -> String {
    match q {
        Quantity::Value(v) => fmt_float(v.to_f64_lossy()),
        Quantity::Infinite => "inf".into(),
        Quantity::Undefined => "nan".into(),
    }
}

pub fn trajectory_header(n: usize) -> String {
    let mut cols = vec!["step".to_string()];
    cols.extend((0..2 * n).map(|i| format!("x{i}")));
    cols.extend(["F1", "F2", "F3", "F4"].map(String::from));
    cols.join(",")
}

/// Header `step,x0,...,x{2n-1},F1,F2,F3,F4`, then one row per iterate.
pub fn write_trajectory_csv<W: Write, S: Scalar>(mut w: W, traj: &OrbitTrajectory<S>) -> io::Result<()> {
    writeln!(w, "{}", trajectory_header(traj.n()))?;
    for (m, (x, q)) in traj.steps.iter().zip(&traj.quantities).enumerate() {
        let mut row = vec![m.to_string()];
        row.extend(x.entries().iter().map(|v| fmt_float(v.to_f64())));
        row.extend(q.f.iter().map(fmt_quantity));
        writeln!(w, "{}", row.join(","))?;
    }
    Ok(())
}

#[derive(Clone, Debug, Serialize)]
pub struct StepJson {
    pub step: usize,
    pub x: Vec<f64>,
    #[serde(rename = "F1")]
    pub f1: Quantity<f64>,
    #[serde(rename = "F2")]
    pub f2: Quantity<f64>,
    #[serde(rename = "F3")]
    pub f3: Quantity<f64>,
    #[serde(rename = "F4")]
    pub f4: Quantity<f64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct TrajectoryJson {
    pub n: usize,
    pub direction: Direction,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    pub square: String,
    pub termination: Termination,
    pub steps: Vec<StepJson>,
}

impl TrajectoryJson {
    pub fn from_trajectory<S: Scalar>(traj: &OrbitTrajectory<S>, seed: Option<u64>) -> Self {
        let q = |v: &Quantity<S>| match v {
            Quantity::Value(v) => Quantity::Value(v.to_f64_lossy()),
            Quantity::Infinite => Quantity::Infinite,
            Quantity::Undefined => Quantity::Undefined,
        };
        TrajectoryJson {
            n: traj.n(),
            direction: traj.direction,
            seed,
            square: grid_classify(&traj.steps[0]).to_string(),
            termination: traj.termination,
            steps: traj
                .steps
                .iter()
                .zip(&traj.quantities)
                .enumerate()
                .map(|(step, (x, f))| StepJson {
                    step,
                    x: x.entries().iter().map(ExtReal::to_f64).collect(),
                    f1: q(&f.f[0]),
                    f2: q(&f.f[1]),
                    f3: q(&f.f[2]),
                    f4: q(&f.f[3]),
                })
                .collect(),
        }
    }
}

/// Header `step,px,py`.
pub fn write_projection_csv<W: Write>(mut w: W, points: &[AffinePoint<f64>]) -> io::Result<()> {
    writeln!(w, "step,px,py")?;
    for (m, p) in points.iter().enumerate() {
        writeln!(w, "{m},{},{}", fmt_float(p.x), fmt_float(p.y))?;
    }
    Ok(())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProjectedPoint {
    pub step: usize,
    pub px: f64,
    pub py: f64,
}

pub fn projection_json(points: &[AffinePoint<f64>]) -> Vec<ProjectedPoint> {
    points.iter().enumerate().map(|(step, p)| ProjectedPoint { step, px: p.x, py: p.y }).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::orbit::iterate;
    use crate::polygon::reconstruct;

    #[test]
    fn polygon_json_roundtrip() {
        let x = CornerInvariants::from_f64(&[2.5, 0.3, 1.7, 0.6, 4.0, 0.2]).unwrap();
        let p = reconstruct(&x, None).unwrap();
        let doc = PolygonJson::from_polygon(&p);
        let text = serde_json::to_string(&doc).unwrap();
        let back: PolygonJson = serde_json::from_str(&text).unwrap();
        assert_eq!(back, doc);
        let q = back.to_polygon().unwrap();
        assert!(q.corner_invariants().unwrap().max_abs_diff(&x) < 1e-9);
        assert!(matches!(Document::parse(&text).unwrap(), Document::Polygon(_)));
    }

    #[test]
    fn invariants_json_rejects_bad_input() {
        let ok = Document::parse(r#"{"n":2,"x":[2.0,0.5,3.0,0.25],"seed":7}"#).unwrap();
        assert!(matches!(ok, Document::Invariants(InvariantsJson { seed: Some(7), .. })));
        let short = InvariantsJson { n: 3, x: vec![1.5, 0.5], seed: None };
        assert!(short.to_invariants().is_err());
        assert!(Document::parse(r#"{"n":2,"x":[2.0,null,3.0,0.25]}"#).is_err());
        let inf = CornerInvariants::new(vec![ExtReal::Infinite, ExtReal::Finite(0.5), ExtReal::Finite(2.0), ExtReal::Finite(0.5)]).unwrap();
        assert!(InvariantsJson::from_invariants(&inf, None).is_err());
    }

    #[test]
    fn csv_layout() {
        let x = CornerInvariants::from_f64(&[2.5, 0.3, 1.7, 0.6]).unwrap();
        let t = iterate(&x, 3, Direction::Forward);
        let mut buf = Vec::new();
        write_trajectory_csv(&mut buf, &t).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "step,x0,x1,x2,x3,F1,F2,F3,F4");
        assert_eq!(lines.len(), 5);
        assert!(lines[1].starts_with("0,2.5000000000000000e0,"));
        let back: f64 = lines[2].split(',').nth(1).unwrap().parse().unwrap();
        assert_eq!(back, t.steps[1].entries()[0].to_f64());
    }
}
