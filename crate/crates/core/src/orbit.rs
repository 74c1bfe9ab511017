//! Orbit iteration of `T_3` in corner-invariant coordinates, sampling,
//! boundedness diagnostics and the unit-square projection.

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::classify::{grid_classify, GridSquare, Interval};
use crate::conserved::{f_invariants, invariant_drift, ConservedQuantities};
use crate::dynamics::{t3_coords_forward, t3_coords_inverse};
use crate::error::{Error, Result};
use crate::polygon::{extend_from_invariants, square_seed, CornerInvariants};
use crate::projective::AffinePoint;
use crate::scalar::{rationalize, Rational, Scalar};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    Forward,
    Backward,
}

impl FromStr for Direction {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "forward" | "fwd" => Ok(Direction::Forward),
            "backward" | "back" | "bwd" => Ok(Direction::Backward),
            _ => Err(Error::InvalidInput(format!("unknown direction {s:?}"))),
        }
    }
}

impl fmt::Display for Direction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Direction::Forward => "forward",
            Direction::Backward => "backward",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "lowercase")]
pub enum Termination {
    Completed,
    /// The map was undefined at `step`; `index` names the vanishing denominator slot.
    Singular { step: usize, index: usize },
}

/// An orbit segment with per-step diagnostics.
#[derive(Clone, Debug)]
pub struct OrbitTrajectory<S = f64> {
    /// `steps[m]` is the m-th iterate; `steps[0]` is the starting point.
    pub steps: Vec<CornerInvariants<S>>,
    pub direction: Direction,
    pub quantities: Vec<ConservedQuantities<S>>,
    /// Running minimum of each coordinate over the whole trajectory.
    pub coord_min: Vec<f64>,
    pub coord_max: Vec<f64>,
    pub termination: Termination,
}

impl<S: Scalar> OrbitTrajectory<S> {
    pub fn n(&self) -> usize {
        self.steps[0].n()
    }

    pub fn last(&self) -> &CornerInvariants<S> {
        self.steps.last().expect("trajectories hold at least the starting point")
    }

    pub fn is_completed(&self) -> bool {
        self.termination == Termination::Completed
    }

    /// Per-quantity maximum relative drift from the starting values.
    pub fn drift(&self) -> Result<[f64; 4]> {
        invariant_drift(&self.quantities)
    }
}

/// Observed coordinate ranges of a completed orbit.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundsReport {
    /// `[a, b]`: range of the odd coordinates.
    pub odd_bounds: [f64; 2],
    /// `[c, d]`: range of the even coordinates.
    pub even_bounds: [f64; 2],
    pub square: GridSquare,
    /// Smallest distance from any coordinate to its interval's endpoints.
    pub margin: f64,
}

/// Draws corner invariants inside a tic-tac-toe square.
pub fn sample_in_square(square: GridSquare, n: usize, seed: u64) -> Result<CornerInvariants<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    sample_with(square, n, &mut rng)
}

/// Sampling ranges: `I -> (-5, -0.1)`, `J -> (0.05, 0.95)`, `K -> (1.1, 6)`.
fn range(i: Interval) -> (f64, f64) {
    match i {
        Interval::I => (-5.0, -0.1),
        Interval::J => (0.05, 0.95),
        _ => (1.1, 6.0),
    }
}

/// [`sample_in_square`] with a caller-supplied generator.
pub fn sample_with<R: Rng>(square: GridSquare, n: usize, rng: &mut R) -> Result<CornerInvariants<f64>> {
    if !(square.is_side() || square == GridSquare::JJ) {
        return Err(Error::InvalidInput(format!("cannot sample square {square}")));
    }
    if n < 2 {
        return Err(Error::InvalidInput(format!("n must be at least 2, got {n}")));
    }
    let (e, o) = (range(square.even), range(square.odd));
    let mut x = Vec::with_capacity(2 * n);
    for _ in 0..n {
        x.push(rng.gen_range(e.0..e.1));
        x.push(rng.gen_range(o.0..o.1));
    }
    CornerInvariants::from_values(x)
}

/// Exact rational sample: each entry is a multiple of `1/denom` inside the same ranges.
pub fn sample_rational_with<R: Rng>(square: GridSquare, n: usize, denom: i64, rng: &mut R) -> Result<CornerInvariants<Rational>> {
    let x = sample_with(square, n, rng)?;
    let vals = x.finite_values()?.into_iter().map(|v| rationalize(v, denom)).collect();
    CornerInvariants::from_values(vals)
}

/// Iterates `T_3` (or its inverse) `steps` times, stopping at a singular point.
pub fn iterate<S: Scalar>(x0: &CornerInvariants<S>, steps: usize, direction: Direction) -> OrbitTrajectory<S> {
    let f0: Vec<f64> = x0.to_f64().entries().iter().map(|v| v.to_f64()).collect();
    let mut traj = OrbitTrajectory {
        steps: vec![x0.clone()],
        direction,
        quantities: vec![f_invariants(x0)],
        coord_min: f0.clone(),
        coord_max: f0,
        termination: Termination::Completed,
    };
    for m in 1..=steps {
        let next = match direction {
            Direction::Forward => t3_coords_forward(traj.last()),
            Direction::Backward => t3_coords_inverse(traj.last()),
        };
        match next {
            Ok(x) => {
                for (i, v) in x.entries().iter().enumerate() {
                    let v = v.to_f64();
                    traj.coord_min[i] = traj.coord_min[i].min(v);
                    traj.coord_max[i] = traj.coord_max[i].max(v);
                }
                traj.quantities.push(f_invariants(&x));
                traj.steps.push(x);
            }
            Err(e) => {
                let index = match e {
                    Error::SingularOrbitPoint { index } => index,
                    _ => usize::MAX,
                };
                traj.termination = Termination::Singular { step: m, index };
                break;
            }
        }
    }
    traj
}

/// Coordinate bounds of a completed orbit, checked against the containment
/// expected for its starting square.
pub fn precompactness_report<S: Scalar>(traj: &OrbitTrajectory<S>) -> Result<BoundsReport> {
    if !traj.is_completed() {
        return Err(Error::IncompleteTrajectory);
    }
    let square = grid_classify(&traj.steps[0]);
    let range_of = |parity: usize| {
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for i in (parity..traj.coord_min.len()).step_by(2) {
            lo = lo.min(traj.coord_min[i]);
            hi = hi.max(traj.coord_max[i]);
        }
        [lo, hi]
    };
    let (even_bounds, odd_bounds) = (range_of(0), range_of(1));
    let mut margin = f64::INFINITY;
    if square.is_side() {
        for (step, x) in traj.steps.iter().enumerate() {
            for (index, v) in x.entries().iter().enumerate() {
                let v = v.to_f64();
                let want = if index % 2 == 0 { square.even } else { square.odd };
                if !want.contains(v) {
                    return Err(Error::BoundViolation { step, index, value: v });
                }
                margin = margin.min(want.margin(v));
            }
        }
    } else {
        margin = traj
            .steps
            .iter()
            .flat_map(|x| x.entries().iter().map(|v| v.to_f64()))
            .map(|v| v.abs().min((v - 1.0).abs()))
            .fold(f64::INFINITY, f64::min);
    }
    Ok(BoundsReport { odd_bounds, even_bounds, square, margin })
}

/// Affine position of `P[3]` after sending `P[-2], P[-1], P[0], P[1]` to the unit square.
pub fn project_point(x: &CornerInvariants<f64>) -> Result<AffinePoint<f64>> {
    let v = x.generic_values()?;
    let s = square_seed::<f64>();
    // With the frame at P[-2..=1], P[2] uses the invariants at vertex 0 and P[3] those at vertex 1.
    let p2 = extend_from_invariants([&s[0], &s[1], &s[2], &s[3]], &v[0], &v[1])?;
    let p3 = extend_from_invariants([&s[1], &s[2], &s[3], &p2], &v[2], &v[3])?;
    p3.to_affine().ok_or(Error::NonAffineVertex { index: 3 })
}

/// Projected points for iterates `0 .. steps` of the forward orbit.
pub fn orbit_projection(x0: &CornerInvariants<f64>, steps: usize) -> Result<Vec<AffinePoint<f64>>> {
    let mut out = Vec::with_capacity(steps);
    let mut x = x0.clone();
    for m in 0..steps {
        out.push(project_point(&x).map_err(|_| Error::ProjectionFailure { step: m })?);
        if m + 1 < steps {
            x = t3_coords_forward(&x).map_err(|_| Error::ProjectionFailure { step: m + 1 })?;
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sampling_is_deterministic_and_in_square() {
        let a = sample_in_square(GridSquare::KJ, 4, 42).unwrap();
        let b = sample_in_square(GridSquare::KJ, 4, 42).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.len(), 8);
        assert_eq!(grid_classify(&a), GridSquare::KJ);
        assert_eq!(grid_classify(&sample_in_square(GridSquare::JJ, 5, 1).unwrap()), GridSquare::JJ);
        assert!(sample_in_square(GridSquare { even: Interval::I, odd: Interval::K }, 4, 1).is_err());
    }

    #[test]
    fn constant_orbit_is_constant() {
        let x = CornerInvariants::constant(4, 2.0).unwrap();
        let t = iterate(&x, 20, Direction::Forward);
        assert!(t.is_completed());
        assert!(t.steps.iter().all(|s| s.max_abs_diff(&x) < 1e-14));
        let b = precompactness_report(&t).unwrap();
        assert_eq!(b.even_bounds, [2.0, 2.0]);
        let p = orbit_projection(&x, 5).unwrap();
        assert!(p.iter().all(|q| (q.x - p[0].x).abs() < 1e-12 && (q.y - p[0].y).abs() < 1e-12));
    }

    #[test]
    fn singular_orbit_terminates_with_state() {
        let x = CornerInvariants::constant(3, 0.5).unwrap();
        let t = iterate(&x, 10, Direction::Forward);
        assert!(matches!(t.termination, Termination::Singular { step: 1, .. }));
        assert_eq!(t.steps.len(), 1);
        assert_eq!(precompactness_report(&t), Err(Error::IncompleteTrajectory));
    }

    #[test]
    fn forward_backward_roundtrip() {
        let x = sample_in_square(GridSquare::IJ, 6, 3).unwrap();
        let f = iterate(&x, 100, Direction::Forward);
        let b = iterate(f.last(), 100, Direction::Backward);
        assert!(b.last().max_abs_diff(&x) < 1e-6);
    }

    #[test]
    fn bounded_kj_orbit() {
        let x = sample_in_square(GridSquare::KJ, 8, 11).unwrap();
        let t = iterate(&x, 1000, Direction::Forward);
        let r = precompactness_report(&t).unwrap();
        assert!(r.odd_bounds[0] > 0.0 && r.odd_bounds[1] < 1.0 && r.even_bounds[0] > 1.0);
        assert!(r.margin > 0.0);
        assert!(t.drift().unwrap().iter().all(|d| *d <= 1e-6));
    }
}
