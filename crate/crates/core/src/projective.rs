//! Homogeneous-coordinate primitives on the real projective plane.
//!
//! Points, lines and transforms are stored as triples (or 3x3 matrices)
//! rescaled so the largest absolute entry is 1. Every type is generic over
//! [`Scalar`], so the same code runs in `f64` or in exact rationals.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::{ExtReal, Scalar, INCIDENCE_EPS, SINGULAR_EPS};

type Triple<S> = [S; 3];

pub(crate) fn cross_raw<S: Scalar>(a: &[S; 3], b: &[S; 3]) -> [S; 3] {
    cross(a, b)
}

pub(crate) fn dot_raw<S: Scalar>(a: &[S; 3], b: &[S; 3]) -> S {
    dot(a, b)
}

fn cross<S: Scalar>(a: &Triple<S>, b: &Triple<S>) -> Triple<S> {
    [
        a[1].clone() * b[2].clone() - a[2].clone() * b[1].clone(),
        a[2].clone() * b[0].clone() - a[0].clone() * b[2].clone(),
        a[0].clone() * b[1].clone() - a[1].clone() * b[0].clone(),
    ]
}

fn dot<S: Scalar>(a: &Triple<S>, b: &Triple<S>) -> S {
    a[0].clone() * b[0].clone() + a[1].clone() * b[1].clone() + a[2].clone() * b[2].clone()
}

fn norm_f64<S: Scalar>(a: &Triple<S>) -> f64 {
    a.iter().map(|v| v.to_f64_lossy().powi(2)).sum::<f64>().sqrt()
}

fn det3<S: Scalar>(a: &Triple<S>, b: &Triple<S>, c: &Triple<S>) -> S {
    dot(&cross(a, b), c)
}

/// Rescale so the largest absolute component is exactly 1 in magnitude.
fn normalize<S: Scalar>(v: Triple<S>) -> Result<Triple<S>> {
    if !S::EXACT && v.iter().any(|c| !c.to_f64_lossy().is_finite()) {
        return Err(Error::DegenerateInput("non-finite coordinate"));
    }
    let m = v
        .iter()
        .map(|c| c.abs())
        .fold(S::zero(), |acc, c| if c > acc { c } else { acc });
    if m.is_zero() {
        return Err(Error::DegenerateInput("all coordinates vanish"));
    }
    Ok([v[0].clone() / m.clone(), v[1].clone() / m.clone(), v[2].clone() / m])
}

/// Sine-like collinearity measure: zero iff the three points are collinear,
/// and independent of how close together the points are.
fn collinear_triple<S: Scalar>(a: &Triple<S>, b: &Triple<S>, c: &Triple<S>) -> bool {
    let d = det3(a, b, c);
    if S::EXACT {
        return d.is_zero();
    }
    let ab = norm_f64(&cross(a, b));
    let bc = norm_f64(&cross(b, c));
    if ab == 0.0 || bc == 0.0 {
        return true;
    }
    d.to_f64_lossy().abs() * norm_f64(b) / (ab * bc) <= INCIDENCE_EPS
}

/// A point of the real projective plane, `[x:y:z]`.
#[derive(Clone, Debug)]
pub struct HomogeneousPoint<S = f64> {
    coords: Triple<S>,
}

/// A line `a x + b y + c z = 0`.
#[derive(Clone, Debug)]
pub struct ProjectiveLine<S = f64> {
    coeffs: Triple<S>,
}

/// A point of the affine patch `z = 1`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AffinePoint<S = f64> {
    pub x: S,
    pub y: S,
}

impl<S: Scalar> AffinePoint<S> {
    pub fn new(x: S, y: S) -> Self {
        AffinePoint { x, y }
    }

    pub fn to_homogeneous(&self) -> HomogeneousPoint<S> {
        HomogeneousPoint::from_affine(self.x.clone(), self.y.clone())
    }
}

impl AffinePoint<f64> {
    pub fn xy(x: f64, y: f64) -> Self {
        AffinePoint { x, y }
    }
}

impl<S: Scalar> HomogeneousPoint<S> {
    pub fn new(x: S, y: S, z: S) -> Result<Self> {
        Ok(HomogeneousPoint { coords: normalize([x, y, z])? })
    }

    pub fn from_coords(c: [S; 3]) -> Result<Self> {
        let [x, y, z] = c;
        Self::new(x, y, z)
    }

    pub fn from_affine(x: S, y: S) -> Self {
        HomogeneousPoint::new(x, y, S::one()).expect("affine points are never zero")
    }

    pub fn coords(&self) -> &[S; 3] {
        &self.coords
    }

    /// Affine chart coordinates, if the point is off the line at infinity.
    pub fn to_affine(&self) -> Option<AffinePoint<S>> {
        let z = &self.coords[2];
        if z.negligible(1.0, SINGULAR_EPS) {
            return None;
        }
        Some(AffinePoint { x: self.coords[0].clone() / z.clone(), y: self.coords[1].clone() / z.clone() })
    }

    pub fn is_affine(&self) -> bool {
        !self.coords[2].negligible(1.0, SINGULAR_EPS)
    }

    /// Projective equality: one triple is a nonzero multiple of the other.
    pub fn proj_eq(&self, other: &Self) -> bool {
        proj_eq_triples(&self.coords, &other.coords)
    }

    /// Incidence with a line, scale invariant.
    pub fn lies_on(&self, line: &ProjectiveLine<S>) -> bool {
        incident(&self.coords, &line.coeffs)
    }

    pub fn to_f64(&self) -> HomogeneousPoint<f64> {
        HomogeneousPoint { coords: [0, 1, 2].map(|i| self.coords[i].to_f64_lossy()) }
    }
}

impl HomogeneousPoint<f64> {
    pub fn xyz(x: f64, y: f64, z: f64) -> Result<Self> {
        Self::new(x, y, z)
    }

    /// Distance between the Euclidean-normalized representatives, sign-agnostic.
    pub fn distance(&self, other: &Self) -> f64 {
        let a = unit(&self.coords);
        let b = unit(&other.coords);
        let plus = (0..3).map(|i| (a[i] + b[i]).powi(2)).sum::<f64>().sqrt();
        let minus = (0..3).map(|i| (a[i] - b[i]).powi(2)).sum::<f64>().sqrt();
        plus.min(minus)
    }
}

fn unit(v: &[f64; 3]) -> [f64; 3] {
    let n = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
    [v[0] / n, v[1] / n, v[2] / n]
}

fn proj_eq_triples<S: Scalar>(a: &Triple<S>, b: &Triple<S>) -> bool {
    let c = cross(a, b);
    if S::EXACT {
        return c.iter().all(|v| v.is_zero());
    }
    norm_f64(&c) <= INCIDENCE_EPS * norm_f64(a) * norm_f64(b)
}

fn incident<S: Scalar>(p: &Triple<S>, l: &Triple<S>) -> bool {
    dot(p, l).negligible(norm_f64(p) * norm_f64(l), INCIDENCE_EPS)
}

impl<S: Scalar> ProjectiveLine<S> {
    pub fn new(a: S, b: S, c: S) -> Result<Self> {
        Ok(ProjectiveLine { coeffs: normalize([a, b, c])? })
    }

    pub fn from_coeffs(c: [S; 3]) -> Result<Self> {
        let [a, b, cc] = c;
        Self::new(a, b, cc)
    }

    pub fn coeffs(&self) -> &[S; 3] {
        &self.coeffs
    }

    pub fn proj_eq(&self, other: &Self) -> bool {
        proj_eq_triples(&self.coeffs, &other.coeffs)
    }

    pub fn contains(&self, p: &HomogeneousPoint<S>) -> bool {
        p.lies_on(self)
    }
}

fn cross_nondegenerate<S: Scalar>(a: &Triple<S>, b: &Triple<S>) -> Option<Triple<S>> {
    let c = cross(a, b);
    let bound = norm_f64(a) * norm_f64(b);
    if c.iter().all(|v| v.negligible(bound, SINGULAR_EPS)) {
        None
    } else {
        Some(c)
    }
}

/// The line through two distinct points.
pub fn join<S: Scalar>(p: &HomogeneousPoint<S>, q: &HomogeneousPoint<S>) -> Result<ProjectiveLine<S>> {
    let c = cross_nondegenerate(&p.coords, &q.coords).ok_or(Error::DegenerateInput("join of coincident points"))?;
    ProjectiveLine::from_coeffs(c)
}

/// The intersection point of two distinct lines.
pub fn meet<S: Scalar>(l: &ProjectiveLine<S>, m: &ProjectiveLine<S>) -> Result<HomogeneousPoint<S>> {
    let c = cross_nondegenerate(&l.coeffs, &m.coeffs).ok_or(Error::DegenerateInput("meet of coincident lines"))?;
    HomogeneousPoint::from_coords(c)
}

/// True iff the three points lie on a common line.
pub fn collinear<S: Scalar>(a: &HomogeneousPoint<S>, b: &HomogeneousPoint<S>, c: &HomogeneousPoint<S>) -> bool {
    collinear_triple(&a.coords, &b.coords, &c.coords)
}

/// True iff no three of the points are collinear.
pub fn in_general_position<S: Scalar>(pts: &[&HomogeneousPoint<S>]) -> bool {
    let n = pts.len();
    for i in 0..n {
        for j in i + 1..n {
            for k in j + 1..n {
                if collinear(pts[i], pts[j], pts[k]) {
                    return false;
                }
            }
        }
    }
    true
}

/// Signed area form of an affine triangle: positive iff counterclockwise.
pub fn orientation<S: Scalar>(v1: &AffinePoint<S>, v2: &AffinePoint<S>, v3: &AffinePoint<S>) -> S {
    (v2.x.clone() - v1.x.clone()) * (v3.y.clone() - v1.y.clone())
        - (v2.y.clone() - v1.y.clone()) * (v3.x.clone() - v1.x.clone())
}

/// Strict interior membership; points on the boundary are outside.
pub fn in_triangle_interior<S: Scalar>(
    w: &AffinePoint<S>,
    v1: &AffinePoint<S>,
    v2: &AffinePoint<S>,
    v3: &AffinePoint<S>,
) -> Result<bool> {
    let o = orientation(v1, v2, v3);
    if o.is_zero() {
        return Err(Error::DegenerateInput("triangle vertices are collinear"));
    }
    let s = o.signum();
    Ok([orientation(v1, v2, w), orientation(v2, v3, w), orientation(v3, v1, w)]
        .iter()
        .all(|t| !t.is_zero() && t.signum() == s))
}

/// Inverse cross ratio `(a-b)(c-d) / ((a-c)(b-d))` of four collinear points,
/// evaluated with 2x2 brackets so points at infinity need no special case.
pub fn cross_ratio_points<S: Scalar>(
    a: &HomogeneousPoint<S>,
    b: &HomogeneousPoint<S>,
    c: &HomogeneousPoint<S>,
    d: &HomogeneousPoint<S>,
) -> Result<ExtReal<S>> {
    let pts = [&a.coords, &b.coords, &c.coords, &d.coords];
    let mut line: Option<(f64, Triple<S>)> = None;
    for i in 0..4 {
        for j in i + 1..4 {
            let w = cross(pts[i], pts[j]);
            let size = norm_f64(&w);
            let better = match &line {
                None => true,
                Some((best, _)) => size > *best,
            };
            if better {
                line = Some((size, w));
            }
        }
    }
    let (size, line) = line.expect("four points always give a pair");
    if size == 0.0 || line.iter().all(|v| v.is_zero()) {
        return Err(Error::DegenerateInput("cross ratio of coincident points"));
    }
    if pts.iter().any(|p| !incident(p, &line)) {
        return Err(Error::NotCollinear);
    }
    let bracket = |u: &Triple<S>, v: &Triple<S>| {
        let val = dot(&cross(u, v), &line);
        let zero = val.negligible(norm_f64(u) * norm_f64(v) * size, SINGULAR_EPS);
        (val, zero)
    };
    let (ab, ab0) = bracket(pts[0], pts[1]);
    let (cd, cd0) = bracket(pts[2], pts[3]);
    let (ac, ac0) = bracket(pts[0], pts[2]);
    let (bd, bd0) = bracket(pts[1], pts[3]);
    let num_zero = ab0 || cd0;
    let den_zero = ac0 || bd0;
    match (num_zero, den_zero) {
        (true, true) => Err(Error::DegenerateInput("cross ratio is 0/0")),
        (false, true) => Ok(ExtReal::Infinite),
        (true, false) => Ok(ExtReal::Finite(S::zero())),
        (false, false) => Ok(ExtReal::Finite(ab * cd / (ac * bd))),
    }
}

/// Cross ratio of four concurrent lines, read off along a chosen auxiliary
/// line `omega` that avoids the common point.
pub fn cross_ratio_lines_with<S: Scalar>(
    lines: [&ProjectiveLine<S>; 4],
    omega: &ProjectiveLine<S>,
) -> Result<ExtReal<S>> {
    let center = concurrency_point(lines)?;
    if center.lies_on(omega) {
        return Err(Error::DegenerateInput("auxiliary line passes through the pencil center"));
    }
    let p = lines.map(|l| meet(l, omega));
    let [a, b, c, d] = p;
    cross_ratio_points(&a?, &b?, &c?, &d?)
}

/// Cross ratio of four concurrent lines.
pub fn cross_ratio_lines<S: Scalar>(
    l: &ProjectiveLine<S>,
    m: &ProjectiveLine<S>,
    n: &ProjectiveLine<S>,
    k: &ProjectiveLine<S>,
) -> Result<ExtReal<S>> {
    let center = concurrency_point([l, m, n, k])?;
    // Coordinate line farthest from containing the center.
    let axis = (0..3)
        .max_by(|&i, &j| {
            let a = center.coords[i].to_f64_lossy().abs();
            let b = center.coords[j].to_f64_lossy().abs();
            a.partial_cmp(&b).unwrap_or(std::cmp::Ordering::Equal)
        })
        .unwrap_or(2);
    let mut e = [S::zero(), S::zero(), S::zero()];
    e[axis] = S::one();
    cross_ratio_lines_with([l, m, n, k], &ProjectiveLine::from_coeffs(e)?)
}

fn concurrency_point<S: Scalar>(lines: [&ProjectiveLine<S>; 4]) -> Result<HomogeneousPoint<S>> {
    let mut best: Option<(f64, Triple<S>)> = None;
    for i in 0..4 {
        for j in i + 1..4 {
            let w = cross(&lines[i].coeffs, &lines[j].coeffs);
            let size = norm_f64(&w);
            if best.as_ref().map_or(true, |(b, _)| size > *b) {
                best = Some((size, w));
            }
        }
    }
    let (_, w) = best.expect("four lines always give a pair");
    let center = HomogeneousPoint::from_coords(w).map_err(|_| Error::DegenerateInput("coincident lines"))?;
    if lines.iter().any(|l| !center.lies_on(l)) {
        return Err(Error::NotConcurrent);
    }
    Ok(center)
}

/// An element of PGL(3), stored as a 3x3 matrix with max-abs entry 1.
#[derive(Clone, Debug)]
pub struct ProjectiveTransform<S = f64> {
    m: [[S; 3]; 3],
}

impl<S: Scalar> ProjectiveTransform<S> {
    pub fn new(m: [[S; 3]; 3]) -> Result<Self> {
        let t = ProjectiveTransform { m };
        let d = t.det();
        if d.is_zero() || (!S::EXACT && !d.to_f64_lossy().is_finite()) {
            return Err(Error::DegenerateInput("singular matrix"));
        }
        Ok(t.normalized())
    }

    pub fn from_row_major(v: &[S]) -> Result<Self> {
        if v.len() != 9 {
            return Err(Error::InvalidInput(format!("expected 9 matrix entries, got {}", v.len())));
        }
        Self::new([
            [v[0].clone(), v[1].clone(), v[2].clone()],
            [v[3].clone(), v[4].clone(), v[5].clone()],
            [v[6].clone(), v[7].clone(), v[8].clone()],
        ])
    }

    pub fn identity() -> Self {
        let z = S::zero;
        let o = S::one;
        ProjectiveTransform { m: [[o(), z(), z()], [z(), o(), z()], [z(), z(), o()]] }
    }

    pub fn matrix(&self) -> &[[S; 3]; 3] {
        &self.m
    }

    pub fn row_major(&self) -> Vec<S> {
        self.m.iter().flat_map(|r| r.iter().cloned()).collect()
    }

    fn normalized(self) -> Self {
        let mx = self
            .m
            .iter()
            .flatten()
            .map(|v| v.abs())
            .fold(S::zero(), |a, v| if v > a { v } else { a });
        if mx.is_zero() {
            return self;
        }
        ProjectiveTransform { m: self.m.map(|r| r.map(|v| v / mx.clone())) }
    }

    pub fn det(&self) -> S {
        let m = &self.m;
        det3(&[m[0][0].clone(), m[1][0].clone(), m[2][0].clone()], &[m[0][1].clone(), m[1][1].clone(), m[2][1].clone()], &[
            m[0][2].clone(),
            m[1][2].clone(),
            m[2][2].clone(),
        ])
    }

    fn apply_raw(&self, v: &Triple<S>) -> Triple<S> {
        [0, 1, 2].map(|i| dot(&self.m[i], v))
    }

    pub fn apply(&self, p: &HomogeneousPoint<S>) -> HomogeneousPoint<S> {
        HomogeneousPoint::from_coords(self.apply_raw(&p.coords)).expect("nonsingular transforms map points to points")
    }

    /// Image of a line: coefficients transform by the inverse transpose.
    pub fn apply_line(&self, l: &ProjectiveLine<S>) -> ProjectiveLine<S> {
        let adj = self.adjugate();
        let c = [0, 1, 2].map(|i| (0..3).map(|j| adj[j][i].clone() * l.coeffs[j].clone()).fold(S::zero(), |a, b| a + b));
        ProjectiveLine::from_coeffs(c).expect("nonsingular transforms map lines to lines")
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &Self) -> Self {
        let m = [0, 1, 2].map(|i| {
            [0, 1, 2].map(|j| (0..3).map(|k| self.m[i][k].clone() * other.m[k][j].clone()).fold(S::zero(), |a, b| a + b))
        });
        ProjectiveTransform { m }.normalized()
    }

    fn adjugate(&self) -> [[S; 3]; 3] {
        let m = &self.m;
        let c = |r0: usize, r1: usize, c0: usize, c1: usize| {
            m[r0][c0].clone() * m[r1][c1].clone() - m[r0][c1].clone() * m[r1][c0].clone()
        };
        [
            [c(1, 2, 1, 2), -c(0, 2, 1, 2), c(0, 1, 1, 2)],
            [-c(1, 2, 0, 2), c(0, 2, 0, 2), -c(0, 1, 0, 2)],
            [c(1, 2, 0, 1), -c(0, 2, 0, 1), c(0, 1, 0, 1)],
        ]
    }

    /// Inverse up to scale (the adjugate, renormalized).
    pub fn inverse(&self) -> Self {
        ProjectiveTransform { m: self.adjugate() }.normalized()
    }

    pub fn proj_eq(&self, other: &Self) -> bool {
        let a: Vec<S> = self.row_major();
        let b: Vec<S> = other.row_major();
        // Proportional iff every 2x2 minor of the pair (a_i, b_i) vanishes against the pivot.
        let pivot = (0..9)
            .max_by(|&i, &j| a[i].to_f64_lossy().abs().partial_cmp(&a[j].to_f64_lossy().abs()).unwrap_or(std::cmp::Ordering::Equal))
            .unwrap_or(0);
        (0..9).all(|i| {
            let minor = a[pivot].clone() * b[i].clone() - a[i].clone() * b[pivot].clone();
            minor.negligible(1.0, INCIDENCE_EPS)
        }) && !b[pivot].negligible(1.0, INCIDENCE_EPS)
    }

    pub fn to_f64(&self) -> ProjectiveTransform<f64> {
        ProjectiveTransform { m: self.m.clone().map(|r| r.map(|v| v.to_f64_lossy())) }
    }
}

/// Matrix whose columns are the first three points, scaled so their sum is the fourth.
fn projective_basis<S: Scalar>(q: &[&HomogeneousPoint<S>; 4]) -> Result<[[S; 3]; 3]> {
    if !in_general_position(q) {
        return Err(Error::DegeneratePosition("three of the four points are collinear"));
    }
    let cols = [&q[0].coords, &q[1].coords, &q[2].coords];
    let a = ProjectiveTransform { m: [0, 1, 2].map(|i| [cols[0][i].clone(), cols[1][i].clone(), cols[2][i].clone()]) };
    // adj(A) q4 = det(A) * lambda; the common det factor is irrelevant projectively.
    let adj = a.adjugate();
    let lam = [0, 1, 2].map(|i| dot(&adj[i], &q[3].coords));
    Ok([0, 1, 2].map(|i| [0, 1, 2].map(|j| cols[j][i].clone() * lam[j].clone())))
}

/// The unique projective transform sending `src[i]` to `dst[i]` for all four points.
pub fn transform_from_correspondence<S: Scalar>(
    src: [&HomogeneousPoint<S>; 4],
    dst: [&HomogeneousPoint<S>; 4],
) -> Result<ProjectiveTransform<S>> {
    let bs = ProjectiveTransform { m: projective_basis(&src)? };
    let bd = ProjectiveTransform { m: projective_basis(&dst)? };
    let inv = ProjectiveTransform { m: bs.adjugate() };
    let t = bd.compose(&inv);
    ProjectiveTransform::new(t.m)
}
