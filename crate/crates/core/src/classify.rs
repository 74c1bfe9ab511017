//! Tic-tac-toe squares, k-niceness, and windowed spiral certification.
//!
//! Spiral windows are walked in a sliding affine chart: starting from four
//! frame vertices, later vertices are regenerated from the corner invariants
//! and the last few points are rescaled to unit size after every step. Affine
//! rescaling preserves orientation signs and triangle interiors, so the
//! predicates are unaffected while strongly contracting spirals stay well
//! conditioned.

use std::collections::VecDeque;
use std::fmt;
use std::str::FromStr;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::polygon::{alpha_seed, extend_from_invariants, square_seed, CornerInvariants, TwistedPolygon};
use crate::projective::{in_triangle_interior, orientation, AffinePoint, HomogeneousPoint, ProjectiveTransform};
use crate::scalar::{ExtReal, Scalar};

/// Open intervals `I = (-inf, 0)`, `J = (0, 1)`, `K = (1, inf)` plus the two
/// degenerate verdicts for a set of entries.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Interval {
    I,
    J,
    K,
    #[serde(rename = "boundary")]
    Boundary,
    #[serde(rename = "mixed")]
    Mixed,
}

impl Interval {
    pub fn of<S: Scalar>(v: &ExtReal<S>) -> Interval {
        match v {
            ExtReal::Infinite => Interval::Boundary,
            ExtReal::Finite(v) => {
                if v.is_zero() || v.is_one() {
                    Interval::Boundary
                } else if v.is_negative() {
                    Interval::I
                } else if *v < S::one() {
                    Interval::J
                } else {
                    Interval::K
                }
            }
        }
    }

    /// Combined verdict for a collection of entries.
    pub fn of_all<'a, S: Scalar>(vals: impl IntoIterator<Item = &'a ExtReal<S>>) -> Interval {
        let mut seen: Option<Interval> = None;
        let mut mixed = false;
        for v in vals {
            let c = Interval::of(v);
            if c == Interval::Boundary {
                return Interval::Boundary;
            }
            match seen {
                None => seen = Some(c),
                Some(s) if s != c => mixed = true,
                _ => {}
            }
        }
        if mixed {
            Interval::Mixed
        } else {
            seen.unwrap_or(Interval::Mixed)
        }
    }

    /// True iff `v` lies in this open interval.
    pub fn contains(self, v: f64) -> bool {
        match self {
            Interval::I => v < 0.0,
            Interval::J => v > 0.0 && v < 1.0,
            Interval::K => v > 1.0 && v.is_finite(),
            _ => false,
        }
    }

    /// Distance from `v` to the nearest endpoint of this interval.
    pub fn margin(self, v: f64) -> f64 {
        match self {
            Interval::I => -v,
            Interval::J => v.min(1.0 - v),
            Interval::K => v - 1.0,
            _ => f64::NAN,
        }
    }

    fn letter(self) -> Option<char> {
        match self {
            Interval::I => Some('I'),
            Interval::J => Some('J'),
            Interval::K => Some('K'),
            _ => None,
        }
    }

    fn from_letter(c: char) -> Option<Interval> {
        match c.to_ascii_uppercase() {
            'I' => Some(Interval::I),
            'J' => Some(Interval::J),
            'K' => Some(Interval::K),
            _ => None,
        }
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.letter() {
            Some(c) => write!(f, "{c}"),
            None if *self == Interval::Boundary => f.write_str("boundary"),
            None => f.write_str("mixed"),
        }
    }
}

/// Which intervals the even-indexed and odd-indexed corner invariants occupy.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct GridSquare {
    pub even: Interval,
    pub odd: Interval,
}

impl GridSquare {
    pub const IJ: GridSquare = GridSquare { even: Interval::I, odd: Interval::J };
    pub const KJ: GridSquare = GridSquare { even: Interval::K, odd: Interval::J };
    pub const JI: GridSquare = GridSquare { even: Interval::J, odd: Interval::I };
    pub const JK: GridSquare = GridSquare { even: Interval::J, odd: Interval::K };
    pub const JJ: GridSquare = GridSquare { even: Interval::J, odd: Interval::J };

    pub const SIDES: [GridSquare; 4] = [Self::IJ, Self::KJ, Self::JI, Self::JK];

    pub fn is_side(&self) -> bool {
        Self::SIDES.contains(self)
    }

    /// The square occupied by the reversed polygon.
    pub fn reversed(&self) -> GridSquare {
        GridSquare { even: self.odd, odd: self.even }
    }
}

impl fmt::Display for GridSquare {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.even.letter(), self.odd.letter()) {
            (Some(a), Some(b)) => write!(f, "{a}{b}"),
            _ => write!(f, "({},{})", self.even, self.odd),
        }
    }
}

impl FromStr for GridSquare {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let letters: Vec<char> = s.trim().chars().filter(|c| c.is_alphabetic()).collect();
        match letters.as_slice() {
            [a, b] => match (Interval::from_letter(*a), Interval::from_letter(*b)) {
                (Some(even), Some(odd)) => Ok(GridSquare { even, odd }),
                _ => Err(Error::InvalidInput(format!("unknown square {s:?}"))),
            },
            _ => Err(Error::InvalidInput(format!("a square is two letters from I, J, K; got {s:?}"))),
        }
    }
}

/// Classifies even and odd entries separately.
pub fn grid_classify<S: Scalar>(x: &CornerInvariants<S>) -> GridSquare {
    GridSquare { even: Interval::of_all(x.even()), odd: Interval::of_all(x.odd()) }
}

/// Free-function form of [`TwistedPolygon::is_k_nice`].
pub fn is_k_nice<S: Scalar>(p: &TwistedPolygon<S>, k: usize) -> bool {
    p.is_k_nice(k)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SpiralType {
    Alpha,
    Beta,
    None,
}

impl FromStr for SpiralType {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "alpha" | "a" => Ok(SpiralType::Alpha),
            "beta" | "b" => Ok(SpiralType::Beta),
            "none" => Ok(SpiralType::None),
            _ => Err(Error::InvalidInput(format!("unknown spiral type {s:?}"))),
        }
    }
}

/// One failed condition in a spiral window.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WindowFailure {
    pub index: i64,
    pub condition: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpiralReport {
    pub k: usize,
    #[serde(rename = "type")]
    pub spiral_type: SpiralType,
    pub window_start: i64,
    pub window_length: usize,
    pub failures: Vec<WindowFailure>,
}

/// How the four vertices at the window start are placed before walking.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum WindowFrame {
    /// Use the representative's own coordinates.
    AsGiven,
    /// Send the frame to the unit square.
    Square,
    /// Send the frame to `(-1,0), (1,0), (0,2), (0,1)`.
    Alpha,
}

impl WindowFrame {
    /// Frame suited to certifying the given type.
    pub fn for_type(t: SpiralType) -> WindowFrame {
        match t {
            SpiralType::Alpha => WindowFrame::Alpha,
            _ => WindowFrame::Square,
        }
    }
}

/// Outcome of the transversal orientation checks over a window.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TransversalReport {
    /// `O(P[i], P[i+k], P[i+2k]) > 0` throughout.
    pub alpha: bool,
    /// `O(P[i+2k], P[i+k], P[i]) > 0` throughout.
    pub beta: bool,
}

type Pt = AffinePoint<f64>;

/// Walks vertices `start ..= last` in a sliding chart and calls `visit(i, pts)`
/// with `width` consecutive points starting at `P[i]`, for `i` in
/// `start ..= last - width + 1`. Returns the index of the first vertex that
/// falls outside the affine patch, if any.
fn walk(x: &[f64], frame: [Pt; 4], start: i64, last: i64, width: usize, mut visit: impl FnMut(i64, &[Pt])) -> Option<i64> {
    let m = x.len() as i64;
    let keep = width.max(4);
    let mut pts: VecDeque<Pt> = frame.into_iter().collect();
    let mut front = start;
    let mut next_visit = start;
    let visit_last = last - width as i64 + 1;
    loop {
        let back = front + pts.len() as i64 - 1;
        while next_visit <= visit_last && next_visit + width as i64 - 1 <= back {
            let off = (next_visit - front) as usize;
            let slice: Vec<Pt> = pts.range(off..off + width).cloned().collect();
            visit(next_visit, &slice);
            next_visit += 1;
        }
        if back >= last {
            return None;
        }
        while pts.len() > keep && front < next_visit {
            pts.pop_front();
            front += 1;
        }
        // New vertex P[back+1] from P[back-3 ..= back] and the invariants at vertex back-1.
        let j = back - 1;
        let h: Vec<HomogeneousPoint<f64>> = pts.range(pts.len() - 4..).map(|p| p.to_homogeneous()).collect();
        let xe = x[(2 * j).rem_euclid(m) as usize];
        let xo = x[(2 * j + 1).rem_euclid(m) as usize];
        let next = match extend_from_invariants([&h[0], &h[1], &h[2], &h[3]], &xe, &xo).ok().and_then(|p| p.to_affine()) {
            Some(p) if p.x.is_finite() && p.y.is_finite() => p,
            _ => return Some(back + 1),
        };
        pts.push_back(next);
        renormalize(&mut pts);
    }
}

/// Translate and uniformly rescale so the points fit a unit box at the origin.
fn renormalize(pts: &mut VecDeque<Pt>) {
    let (mut x0, mut x1, mut y0, mut y1) = (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
    for p in pts.iter() {
        x0 = x0.min(p.x);
        x1 = x1.max(p.x);
        y0 = y0.min(p.y);
        y1 = y1.max(p.y);
    }
    let s = (x1 - x0).max(y1 - y0);
    if !(s > 0.0) || !s.is_finite() {
        return;
    }
    let (cx, cy) = ((x0 + x1) / 2.0, (y0 + y1) / 2.0);
    for p in pts.iter_mut() {
        p.x = (p.x - cx) / s;
        p.y = (p.y - cy) / s;
    }
}

fn seed_points(frame: WindowFrame) -> Option<[Pt; 4]> {
    let seed = match frame {
        WindowFrame::AsGiven => return None,
        WindowFrame::Square => square_seed::<f64>(),
        WindowFrame::Alpha => alpha_seed::<f64>(),
    };
    Some(seed.map(|p| p.to_affine().expect("seed frames are affine")))
}

fn given_frame(p: &TwistedPolygon<f64>, start: i64) -> Result<[Pt; 4]> {
    let w = p.window(start, 4);
    let mut out = [Pt::xy(0.0, 0.0), Pt::xy(0.0, 0.0), Pt::xy(0.0, 0.0), Pt::xy(0.0, 0.0)];
    for (j, v) in w.iter().enumerate() {
        out[j] = v.to_affine().ok_or(Error::NonAffineVertex { index: start + j as i64 })?;
    }
    Ok(out)
}

fn check_k(k: usize) -> Result<()> {
    if k < 2 {
        return Err(Error::InvalidInput(format!("k must be at least 2, got {k}")));
    }
    Ok(())
}

fn positive(o: f64) -> bool {
    o > 0.0
}

fn interior(w: &Pt, a: &Pt, b: &Pt, c: &Pt) -> bool {
    in_triangle_interior(w, a, b, c).unwrap_or(false)
}

fn alpha_holds(p: &[Pt], k: usize) -> bool {
    positive(orientation(&p[0], &p[1], &p[k + 1])) && interior(&p[k], &p[0], &p[1], &p[k + 1])
}

fn beta_holds(p: &[Pt], k: usize) -> bool {
    positive(orientation(&p[0], &p[1], &p[k])) && interior(&p[k + 1], &p[0], &p[1], &p[k])
}

/// Spiral window check on corner invariants, with the frame at `start` placed
/// on a seed. Both types are tested; the report names the one that holds.
pub fn certify_invariants<S: Scalar>(
    x: &CornerInvariants<S>,
    k: usize,
    start: i64,
    horizon: usize,
    frame: WindowFrame,
) -> Result<SpiralReport> {
    check_k(k)?;
    let seed = seed_points(frame).ok_or_else(|| Error::InvalidInput("invariants need a seed frame".into()))?;
    let vals: Vec<f64> = x.to_f64().generic_values()?;
    Ok(run_spiral_walk(&vals, seed, k, start, horizon))
}

fn run_spiral_walk(x: &[f64], frame: [Pt; 4], k: usize, start: i64, horizon: usize) -> SpiralReport {
    let width = k + 2;
    let last = start + horizon as i64 + width as i64 - 1;
    let mut pos_fail = Vec::new();
    let mut a_fail = Vec::new();
    let mut b_fail = Vec::new();
    let stray = walk(x, frame, start, last, width, |i, p| {
        if !positive(orientation(&p[0], &p[1], &p[2])) {
            pos_fail.push(i);
        }
        if !alpha_holds(p, k) {
            a_fail.push(i);
        }
        if !beta_holds(p, k) {
            b_fail.push(i);
        }
    });
    let clean = pos_fail.is_empty() && stray.is_none();
    let spiral_type = if clean && a_fail.is_empty() {
        SpiralType::Alpha
    } else if clean && b_fail.is_empty() {
        SpiralType::Beta
    } else {
        SpiralType::None
    };
    let mut failures = Vec::new();
    if spiral_type == SpiralType::None {
        let tag = |v: Vec<i64>, c: &'static str| v.into_iter().map(move |index| WindowFailure { index, condition: c.to_string() });
        failures.extend(tag(pos_fail, "positive"));
        failures.extend(tag(a_fail, "alpha"));
        failures.extend(tag(b_fail, "beta"));
        if let Some(index) = stray {
            failures.push(WindowFailure { index, condition: "affine".into() });
        }
        failures.sort_by_key(|f| f.index);
    }
    SpiralReport { k, spiral_type, window_start: start, window_length: horizon + 1, failures }
}

fn polygon_frame(p: &TwistedPolygon<f64>, k: usize, start: i64, frame: WindowFrame) -> Result<(Vec<f64>, [Pt; 4])> {
    check_k(k)?;
    if let Some(index) = p.first_not_k_nice(k) {
        return Err(Error::NotKNice { k, index });
    }
    let x = p.corner_invariants()?.finite_values()?;
    let f = match seed_points(frame) {
        Some(s) => s,
        None => given_frame(p, start)?,
    };
    Ok((x, f))
}

/// Checks the spiral conditions for `i` in `start ..= start + horizon` on the
/// representative as given.
pub fn spiral_window_check(p: &TwistedPolygon<f64>, k: usize, start: i64, horizon: usize) -> Result<SpiralReport> {
    spiral_window_check_framed(p, k, start, horizon, WindowFrame::AsGiven)
}

/// [`spiral_window_check`] with an explicit choice of frame at `start`.
pub fn spiral_window_check_framed(
    p: &TwistedPolygon<f64>,
    k: usize,
    start: i64,
    horizon: usize,
    frame: WindowFrame,
) -> Result<SpiralReport> {
    let (x, f) = polygon_frame(p, k, start, frame)?;
    Ok(run_spiral_walk(&x, f, k, start, horizon))
}

/// Orientation of the transversal triples `(P[i], P[i+k], P[i+2k])` for `i` in
/// `start ..= start + horizon`.
pub fn transversal_check(
    p: &TwistedPolygon<f64>,
    k: usize,
    start: i64,
    horizon: usize,
    frame: WindowFrame,
) -> Result<TransversalReport> {
    let (x, f) = polygon_frame(p, k, start, frame)?;
    let width = 2 * k + 1;
    let last = start + horizon as i64 + width as i64 - 1;
    let (mut alpha, mut beta) = (true, true);
    let stray = walk(&x, f, start, last, width, |_, p| {
        alpha &= positive(orientation(&p[0], &p[k], &p[2 * k]));
        beta &= positive(orientation(&p[2 * k], &p[k], &p[0]));
    });
    if let Some(index) = stray {
        return Err(Error::NonAffineVertex { index });
    }
    Ok(TransversalReport { alpha, beta })
}

/// Spiral verdict for corner invariants: type alpha is tested in the alpha
/// frame and type beta in the unit-square frame.
pub fn classify_spiral<S: Scalar>(x: &CornerInvariants<S>, k: usize, start: i64, horizon: usize) -> Result<SpiralReport> {
    let a = certify_invariants(x, k, start, horizon, WindowFrame::Alpha)?;
    if a.spiral_type == SpiralType::Alpha {
        return Ok(a);
    }
    let b = certify_invariants(x, k, start, horizon, WindowFrame::Square)?;
    if b.spiral_type == SpiralType::Beta {
        return Ok(b);
    }
    let mut failures: Vec<WindowFailure> =
        a.failures.into_iter().filter(|f| f.condition != "beta").chain(b.failures.into_iter().filter(|f| f.condition != "alpha")).collect();
    failures.sort_by_key(|f| f.index);
    failures.dedup();
    Ok(SpiralReport { failures, ..b })
}

/// Heuristic sampler for k-spirals of a given type.
///
/// Draws a logarithmic spiral `P[i] = (rho R(theta))^i (1, 0)`, keeps it when
/// the pure spiral satisfies the requested conditions, jitters the `n`
/// fundamental vertices, and accepts the result only if it certifies as given
/// on `start ..= start + horizon`. Returns `None` after `attempts` rejections.
pub fn sample_k_spiral<R: Rng>(
    k: usize,
    n: usize,
    spiral_type: SpiralType,
    start: i64,
    horizon: usize,
    attempts: usize,
    rng: &mut R,
) -> Option<TwistedPolygon<f64>> {
    if k < 2 || n < 2 || spiral_type == SpiralType::None {
        return None;
    }
    for _ in 0..attempts {
        let rho: f64 = rng.gen_range(0.5..0.99);
        let theta: f64 = rng.gen_range(0.05..3.1);
        let at = |i: f64| Pt::xy(rho.powf(i) * (i * theta).cos(), rho.powf(i) * (i * theta).sin());
        let probe: Vec<Pt> = (0..k + 2).map(|i| at(i as f64)).collect();
        let ok = positive(orientation(&probe[0], &probe[1], &probe[2]))
            && match spiral_type {
                SpiralType::Alpha => alpha_holds(&probe, k),
                _ => beta_holds(&probe, k),
            };
        if !ok {
            continue;
        }
        let jitter = 0.03;
        let vertices = (0..n)
            .map(|i| {
                let p = at(i as f64);
                let s = jitter * rho.powi(i as i32);
                HomogeneousPoint::from_affine(p.x + s * rng.gen_range(-1.0..1.0), p.y + s * rng.gen_range(-1.0..1.0))
            })
            .collect();
        let (c, s) = (rho.powi(n as i32) * (n as f64 * theta).cos(), rho.powi(n as i32) * (n as f64 * theta).sin());
        let Ok(m) = ProjectiveTransform::new([[c, -s, 0.0], [s, c, 0.0], [0.0, 0.0, 1.0]]) else { continue };
        let Ok(poly) = TwistedPolygon::new(vertices, m) else { continue };
        match spiral_window_check(&poly, k, start, horizon) {
            Ok(r) if r.spiral_type == spiral_type => return Some(poly),
            _ => continue,
        }
    }
    None
}
