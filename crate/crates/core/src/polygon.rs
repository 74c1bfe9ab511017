//! Twisted polygons, their corner invariants, and reconstruction from invariants.

use crate::error::{Error, Result};
use crate::projective::{
    collinear, cross_ratio_points, in_general_position, join, meet, transform_from_correspondence, HomogeneousPoint,
    ProjectiveLine, ProjectiveTransform,
};
use crate::scalar::{ExtReal, Scalar, SINGULAR_EPS};

/// A bi-infinite vertex sequence with `P[i + n] = M(P[i])`.
#[derive(Clone, Debug)]
pub struct TwistedPolygon<S = f64> {
    vertices: Vec<HomogeneousPoint<S>>,
    monodromy: ProjectiveTransform<S>,
    monodromy_inv: ProjectiveTransform<S>,
}

/// The `2n` corner invariants of a twisted `n`-gon, indexed cyclically.
#[derive(Clone, Debug, PartialEq)]
pub struct CornerInvariants<S = f64> {
    x: Vec<ExtReal<S>>,
}

/// Relabelings of the vertex sequence.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Reindex {
    /// `Q[j] = P[j + s]`.
    Shift(i64),
    /// `Q[j] = P[-j]`.
    Reverse,
}

fn hp<S: Scalar>(x: i64, y: i64) -> HomogeneousPoint<S> {
    HomogeneousPoint::from_affine(S::from_i64(x).unwrap(), S::from_i64(y).unwrap())
}

/// Unit square `(0,0), (1,0), (1,1), (0,1)`: the default reconstruction frame.
pub fn square_seed<S: Scalar>() -> [HomogeneousPoint<S>; 4] {
    [hp(0, 0), hp(1, 0), hp(1, 1), hp(0, 1)]
}

/// Frame `(-1,0), (1,0), (0,2), (0,1)` used for type-alpha windows.
pub fn alpha_seed<S: Scalar>() -> [HomogeneousPoint<S>; 4] {
    [hp(-1, 0), hp(1, 0), hp(0, 2), hp(0, 1)]
}

impl<S: Scalar> TwistedPolygon<S> {
    /// Builds a polygon, checking that consecutive triples are not collinear.
    pub fn new(vertices: Vec<HomogeneousPoint<S>>, monodromy: ProjectiveTransform<S>) -> Result<Self> {
        if vertices.len() < 2 {
            return Err(Error::InvalidInput(format!("a twisted polygon needs n >= 2 vertices, got {}", vertices.len())));
        }
        let monodromy_inv = monodromy.inverse();
        let p = TwistedPolygon { vertices, monodromy, monodromy_inv };
        for i in 0..p.n() as i64 {
            if collinear(&p.vertex_at(i), &p.vertex_at(i + 1), &p.vertex_at(i + 2)) {
                return Err(Error::DegenerateConfiguration { index: i, what: "three consecutive vertices are collinear" });
            }
        }
        Ok(p)
    }

    /// A closed polygon (identity monodromy).
    pub fn closed(vertices: Vec<HomogeneousPoint<S>>) -> Result<Self> {
        Self::new(vertices, ProjectiveTransform::identity())
    }

    pub fn n(&self) -> usize {
        self.vertices.len()
    }

    pub fn vertices(&self) -> &[HomogeneousPoint<S>] {
        &self.vertices
    }

    pub fn monodromy(&self) -> &ProjectiveTransform<S> {
        &self.monodromy
    }

    pub fn monodromy_inverse(&self) -> &ProjectiveTransform<S> {
        &self.monodromy_inv
    }

    /// `P[i]` for any integer `i`, via powers of the monodromy.
    pub fn vertex_at(&self, i: i64) -> HomogeneousPoint<S> {
        let n = self.n() as i64;
        let q = i.div_euclid(n);
        let mut p = self.vertices[i.rem_euclid(n) as usize].clone();
        let step = if q >= 0 { &self.monodromy } else { &self.monodromy_inv };
        for _ in 0..q.unsigned_abs() {
            p = step.apply(&p);
        }
        p
    }

    /// Consecutive vertices `P[start], ..., P[start + len - 1]`.
    pub fn window(&self, start: i64, len: usize) -> Vec<HomogeneousPoint<S>> {
        let n = self.n() as i64;
        let mut out: Vec<HomogeneousPoint<S>> = Vec::with_capacity(len);
        for j in 0..len as i64 {
            // Past one period, the previous period's image is one monodromy step away.
            let v = if j >= n { self.monodromy.apply(&out[(j - n) as usize]) } else { self.vertex_at(start + j) };
            out.push(v);
        }
        out
    }

    /// Image under a projective transform, with the monodromy conjugated.
    pub fn transformed(&self, phi: &ProjectiveTransform<S>) -> Result<Self> {
        let vertices = self.vertices.iter().map(|p| phi.apply(p)).collect();
        let m = phi.compose(&self.monodromy).compose(&phi.inverse());
        Self::new(vertices, m)
    }

    pub fn reindex(&self, mode: Reindex) -> Result<Self> {
        let n = self.n() as i64;
        match mode {
            Reindex::Shift(s) => Self::new(self.window(s, n as usize), self.monodromy.clone()),
            Reindex::Reverse => {
                let vertices = (0..n).map(|j| self.vertex_at(-j)).collect();
                Self::new(vertices, self.monodromy_inv.clone())
            }
        }
    }

    /// True iff `P[i], P[i+1], P[i+k], P[i+k+1]` are in general position for every `i`.
    pub fn is_k_nice(&self, k: usize) -> bool {
        self.first_not_k_nice(k).is_none()
    }

    pub(crate) fn first_not_k_nice(&self, k: usize) -> Option<i64> {
        let k = k as i64;
        let pts = self.window(0, self.n() + k as usize + 1);
        (0..self.n() as i64).find(|&i| {
            let i_ = i as usize;
            let k_ = k as usize;
            !in_general_position(&[&pts[i_], &pts[i_ + 1], &pts[i_ + k_], &pts[i_ + k_ + 1]])
        })
    }

    pub fn corner_invariants(&self) -> Result<CornerInvariants<S>> {
        let n = self.n();
        let pts = self.window(-2, n + 4);
        let mut x = Vec::with_capacity(2 * n);
        for i in 0..n {
            let (e, o) = corner_pair(&pts[i..i + 5]).map_err(|what| Error::DegenerateConfiguration { index: i as i64, what })?;
            x.push(e);
            x.push(o);
        }
        Ok(CornerInvariants { x })
    }

    pub fn to_f64(&self) -> TwistedPolygon<f64> {
        TwistedPolygon {
            vertices: self.vertices.iter().map(|p| p.to_f64()).collect(),
            monodromy: self.monodromy.to_f64(),
            monodromy_inv: self.monodromy_inv.to_f64(),
        }
    }
}

/// Corner invariants at the middle vertex of a five-vertex window.
fn corner_pair<S: Scalar>(w: &[HomogeneousPoint<S>]) -> std::result::Result<(ExtReal<S>, ExtReal<S>), &'static str> {
    let ln = |a: &HomogeneousPoint<S>, b: &HomogeneousPoint<S>| join(a, b).map_err(|_| "coincident vertices");
    let mt = |l: &ProjectiveLine<S>, m: &ProjectiveLine<S>| meet(l, m).map_err(|_| "coincident lines in a corner");
    let chi = |a: &HomogeneousPoint<S>, b: &HomogeneousPoint<S>, c: &HomogeneousPoint<S>, d: &HomogeneousPoint<S>| {
        cross_ratio_points(a, b, c, d).map_err(|_| "cross ratio undefined")
    };
    let (pm2, pm1, p0, p1, p2) = (&w[0], &w[1], &w[2], &w[3], &w[4]);

    let back = ln(pm2, pm1)?;
    let (c, d) = (mt(&back, &ln(p0, p1)?)?, mt(&back, &ln(p1, p2)?)?);
    let even = chi(pm2, pm1, &c, &d)?;
    let fwd = ln(p2, p1)?;
    let (c, d) = (mt(&fwd, &ln(p0, pm1)?)?, mt(&fwd, &ln(pm1, pm2)?)?);
    let odd = chi(p2, p1, &c, &d)?;
    Ok((even, odd))
}

/// Coefficients `(p, q)` with `target = p*a + q*b` for three lines of one pencil.
fn pencil_coefficients<S: Scalar>(a: &ProjectiveLine<S>, b: &ProjectiveLine<S>, target: &ProjectiveLine<S>) -> Option<(S, S)> {
    let (a, b, t) = (a.coeffs(), b.coeffs(), target.coeffs());
    let w = crate::projective::cross_raw(a, b);
    let ww = crate::projective::dot_raw(&w, &w);
    if ww.negligible(1.0, SINGULAR_EPS * SINGULAR_EPS) {
        return None;
    }
    let p = crate::projective::dot_raw(&crate::projective::cross_raw(t, b), &w) / ww.clone();
    let q = crate::projective::dot_raw(&crate::projective::cross_raw(a, t), &w) / ww;
    Some((p, q))
}

/// Solves for the next vertex `P[i+2]` given `P[i-2], P[i-1], P[i], P[i+1]` and
/// the two corner invariants at vertex `i`.
pub fn extend_from_invariants<S: Scalar>(frame: [&HomogeneousPoint<S>; 4], x_even: &S, x_odd: &S) -> Result<HomogeneousPoint<S>> {
    let [pm2, pm1, p0, p1] = frame;
    let bad = |what: &str| Error::DegenerateInvariants(what.to_string());
    let ln = |a, b| join(a, b).map_err(|_| bad("frame has coincident vertices"));

    // Pencil through P[i+1]: the even invariant fixes the line toward P[i+2].
    let (l1, l2, l3) = (ln(p1, pm2)?, ln(p1, pm1)?, ln(p1, p0)?);
    let (p, q) = pencil_coefficients(&l1, &l2, &l3).ok_or_else(|| bad("singular pencil at P[i+1]"))?;
    let c2 = q * (S::one() - x_even.clone());
    let l = combine_lines(&l1, &p, &l2, &c2).ok_or_else(|| bad("solved line through P[i+1] vanishes"))?;

    // Pencil through P[i-1]: the odd invariant fixes the line toward P[i+2].
    let (m2, m3, m4) = (ln(pm1, p1)?, ln(pm1, p0)?, ln(pm1, pm2)?);
    let (p, q) = pencil_coefficients(&m2, &m3, &m4).ok_or_else(|| bad("singular pencil at P[i-1]"))?;
    let c3 = x_odd.clone() * q;
    let m = combine_lines(&m2, &p, &m3, &c3).ok_or_else(|| bad("solved line through P[i-1] vanishes"))?;

    meet(&l, &m).map_err(|_| bad("solved lines coincide"))
}

fn combine_lines<S: Scalar>(a: &ProjectiveLine<S>, ca: &S, b: &ProjectiveLine<S>, cb: &S) -> Option<ProjectiveLine<S>> {
    let c = [0, 1, 2].map(|i| a.coeffs()[i].clone() * ca.clone() + b.coeffs()[i].clone() * cb.clone());
    let size = c.iter().map(|v| v.to_f64_lossy().abs()).fold(0.0, f64::max);
    let scale = ca.to_f64_lossy().abs() + cb.to_f64_lossy().abs();
    if c.iter().all(|v| v.is_zero()) || (!S::EXACT && size <= SINGULAR_EPS * scale) {
        return None;
    }
    ProjectiveLine::from_coeffs(c).ok()
}

/// Rebuilds a representative polygon whose corner invariants are `x`, with
/// `P[0..4]` placed at `seed` (the unit square by default).
pub fn reconstruct<S: Scalar>(x: &CornerInvariants<S>, seed: Option<&[HomogeneousPoint<S>; 4]>) -> Result<TwistedPolygon<S>> {
    let vals = x.generic_values()?;
    let n = x.n();
    let default;
    let seed = match seed {
        Some(s) => s,
        None => {
            default = square_seed();
            &default
        }
    };
    if !in_general_position(&[&seed[0], &seed[1], &seed[2], &seed[3]]) {
        return Err(Error::DegeneratePosition("seed frame has three collinear points"));
    }
    let mut pts: Vec<HomogeneousPoint<S>> = seed.to_vec();
    for j in 2..n + 2 {
        let next = extend_from_invariants(
            [&pts[j - 2], &pts[j - 1], &pts[j], &pts[j + 1]],
            &vals[(2 * j) % (2 * n)],
            &vals[(2 * j + 1) % (2 * n)],
        )?;
        pts.push(next);
    }
    let m = transform_from_correspondence([&pts[0], &pts[1], &pts[2], &pts[3]], [&pts[n], &pts[n + 1], &pts[n + 2], &pts[n + 3]])
        .map_err(|_| Error::MonodromyFailure)?;
    pts.truncate(n);
    TwistedPolygon::new(pts, m)
}

/// Seed frame for float reconstruction of strongly contracting polygons.
///
/// A spiral's vertices accumulate at a fixed point of the monodromy. With the
/// unit-square seed that point sits at distance ~1 from the origin, so the
/// tail of a fast spiral is resolved only to `1e-16 / scale`. This seed puts
/// the isolated fixed point at the origin and its invariant line at infinity,
/// where float coordinates keep their relative precision. Falls back to the
/// unit square when the monodromy has no isolated real fixed point.
pub fn conditioned_seed(x: &CornerInvariants<f64>) -> Result<[HomogeneousPoint<f64>; 4]> {
    let square = square_seed::<f64>();
    let p = reconstruct(x, Some(&square))?;
    let Some((c, l)) = dominant_rank_one(p.monodromy().matrix()).or_else(|| dominant_rank_one(p.monodromy_inverse().matrix()))
    else {
        return Ok(square);
    };
    let unit = |v: [f64; 3]| {
        let n = v.iter().map(|a| a * a).sum::<f64>().sqrt();
        v.map(|a| a / n)
    };
    let c = unit(c);
    let helper = if c[0].abs() < 0.6 { [1.0, 0.0, 0.0] } else { [0.0, 1.0, 0.0] };
    let r1 = unit(crate::projective::cross_raw(&c, &helper));
    let r2 = crate::projective::cross_raw(&c, &r1);
    let Ok(g) = ProjectiveTransform::new([r1, r2, l]) else { return Ok(square) };
    let Some(aff) = square.iter().map(|q| g.apply(q).to_affine()).collect::<Option<Vec<_>>>() else { return Ok(square) };
    let scale = aff.iter().fold(0.0_f64, |m, a| m.max(a.x.abs()).max(a.y.abs()));
    if !(scale.is_finite() && scale > 0.0) {
        return Ok(square);
    }
    let seed = [0, 1, 2, 3].map(|i| HomogeneousPoint::from_affine(aff[i].x / scale, aff[i].y / scale));
    if !in_general_position(&[&seed[0], &seed[1], &seed[2], &seed[3]]) {
        return Ok(square);
    }
    Ok(seed)
}

/// [`reconstruct`] on the [`conditioned_seed`] frame.
pub fn reconstruct_conditioned(x: &CornerInvariants<f64>) -> Result<TwistedPolygon<f64>> {
    reconstruct(x, Some(&conditioned_seed(x)?))
}

/// Column and row spaces of `m^(2^k)` when it converges to rank one: the
/// dominant eigenvector and the matching left eigenvector (a line).
fn dominant_rank_one(m: &[[f64; 3]; 3]) -> Option<([f64; 3], [f64; 3])> {
    let normalize = |a: &mut [[f64; 3]; 3]| {
        let s = a.iter().flatten().fold(0.0_f64, |s, v| s.max(v.abs()));
        if s > 0.0 && s.is_finite() {
            a.iter_mut().flatten().for_each(|v| *v /= s);
        }
    };
    let mut a = *m;
    normalize(&mut a);
    for _ in 0..80 {
        let mut b = [[0.0; 3]; 3];
        for i in 0..3 {
            for j in 0..3 {
                b[i][j] = (0..3).map(|k| a[i][k] * a[k][j]).sum();
            }
        }
        a = b;
        normalize(&mut a);
    }
    if a.iter().flatten().any(|v| !v.is_finite()) {
        return None;
    }
    let pairs = [(0, 1), (0, 2), (1, 2)];
    let minor = pairs
        .iter()
        .flat_map(|&(i, j)| pairs.iter().map(move |&(k, l)| (i, j, k, l)))
        .map(|(i, j, k, l)| (a[i][k] * a[j][l] - a[i][l] * a[j][k]).abs())
        .fold(0.0, f64::max);
    if minor > 1e-10 {
        return None;
    }
    let (mut bi, mut bj) = (0, 0);
    for i in 0..3 {
        for j in 0..3 {
            if a[i][j].abs() > a[bi][bj].abs() {
                (bi, bj) = (i, j);
            }
        }
    }
    Some(([a[0][bj], a[1][bj], a[2][bj]], a[bi]))
}

impl<S: Scalar> CornerInvariants<S> {
    pub fn new(x: Vec<ExtReal<S>>) -> Result<Self> {
        if x.len() < 4 || x.len() % 2 != 0 {
            return Err(Error::InvalidInput(format!("corner invariants need an even count >= 4, got {}", x.len())));
        }
        Ok(CornerInvariants { x })
    }

    pub fn from_values(x: Vec<S>) -> Result<Self> {
        Self::new(x.into_iter().map(ExtReal::Finite).collect())
    }

    /// `2n` copies of `c`.
    pub fn constant(n: usize, c: S) -> Result<Self> {
        Self::from_values(vec![c; 2 * n])
    }

    pub fn n(&self) -> usize {
        self.x.len() / 2
    }

    pub fn len(&self) -> usize {
        self.x.len()
    }

    pub fn is_empty(&self) -> bool {
        self.x.is_empty()
    }

    pub fn entries(&self) -> &[ExtReal<S>] {
        &self.x
    }

    /// Entry `i` taken modulo `2n`.
    pub fn get(&self, i: i64) -> &ExtReal<S> {
        &self.x[i.rem_euclid(self.x.len() as i64) as usize]
    }

    pub fn even(&self) -> impl Iterator<Item = &ExtReal<S>> {
        self.x.iter().step_by(2)
    }

    pub fn odd(&self) -> impl Iterator<Item = &ExtReal<S>> {
        self.x.iter().skip(1).step_by(2)
    }

    /// All entries as finite values; fails on any infinite entry.
    pub fn finite_values(&self) -> Result<Vec<S>> {
        self.x
            .iter()
            .enumerate()
            .map(|(i, v)| v.finite().cloned().ok_or_else(|| Error::DegenerateInvariants(format!("entry {i} is infinite"))))
            .collect()
    }

    /// Finite values avoiding `{0, 1}`.
    pub fn generic_values(&self) -> Result<Vec<S>> {
        let vals = self.finite_values()?;
        for (i, v) in vals.iter().enumerate() {
            if is_zero_or_one(v) {
                return Err(Error::DegenerateInvariants(format!("entry {i} is {}", v.to_f64_lossy())));
            }
        }
        Ok(vals)
    }

    pub fn is_generic(&self) -> bool {
        self.generic_values().is_ok()
    }

    /// Invariants of the shifted polygon `Q[j] = P[j + s]`.
    pub fn shifted(&self, s: i64) -> Self {
        let m = self.x.len() as i64;
        CornerInvariants { x: (0..m).map(|i| self.get(i + 2 * s).clone()).collect() }
    }

    /// Invariants of the reversed polygon `Q[j] = P[-j]`.
    pub fn reversed(&self) -> Self {
        let m = self.x.len() as i64;
        CornerInvariants { x: (0..m).map(|i| self.get(1 - i).clone()).collect() }
    }

    /// Cyclic rotation by whole slots: entry `i` of the result is entry `i - r` here.
    pub fn rotated_slots(&self, r: i64) -> Self {
        let m = self.x.len() as i64;
        CornerInvariants { x: (0..m).map(|i| self.get(i - r).clone()).collect() }
    }

    pub fn to_f64(&self) -> CornerInvariants<f64> {
        CornerInvariants {
            x: self
                .x
                .iter()
                .map(|v| match v {
                    ExtReal::Finite(s) => ExtReal::Finite(s.to_f64_lossy()),
                    ExtReal::Infinite => ExtReal::Infinite,
                })
                .collect(),
        }
    }

    /// Largest entrywise absolute difference; infinite if the tags disagree.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        if self.len() != other.len() {
            return f64::INFINITY;
        }
        self.x
            .iter()
            .zip(&other.x)
            .map(|(a, b)| match (a, b) {
                (ExtReal::Finite(a), ExtReal::Finite(b)) => (a.clone() - b.clone()).abs().to_f64_lossy(),
                (ExtReal::Infinite, ExtReal::Infinite) => 0.0,
                _ => f64::INFINITY,
            })
            .fold(0.0, f64::max)
    }
}

impl CornerInvariants<f64> {
    pub fn from_f64(x: &[f64]) -> Result<Self> {
        Self::from_values(x.to_vec())
    }

    /// Exact rational copy of these float values.
    pub fn to_rational(&self) -> Result<CornerInvariants<crate::scalar::Rational>> {
        let vals = self
            .finite_values()?
            .into_iter()
            .map(|v| crate::scalar::Rational::from_f64_value(v).ok_or_else(|| Error::InvalidInput(format!("{v} is not finite"))))
            .collect::<Result<Vec<_>>>()?;
        CornerInvariants::from_values(vals)
    }
}

pub(crate) fn is_zero_or_one<S: Scalar>(v: &S) -> bool {
    v.is_zero() || v.is_one()
}
