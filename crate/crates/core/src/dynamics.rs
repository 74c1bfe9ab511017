//! The deep diagonal maps `T_k`, geometrically on polygons and, for `k = 3`,
//! as a birational map on corner invariants.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::polygon::{CornerInvariants, TwistedPolygon};
use crate::projective::{join, meet, HomogeneousPoint};
use crate::scalar::{Scalar, SINGULAR_EPS};

/// Vertex labeling of the image polygon.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MapLabeling {
    /// `P'[i] = P[i]P[i+k] ∩ P[i+1]P[i+k+1]`.
    ForwardShift,
    /// `P'[i] = P[i-2]P[i+1] ∩ P[i-1]P[i+2]`, defined for `k = 3` only.
    Centered3,
}

/// Slot offset between the invariants of the two labelings: entry `j` of the
/// centered image equals entry `j - 4` of the forward-shift image.
pub const CENTERED_SLOT_SHIFT: i64 = 4;

fn check_k(k: usize) -> Result<()> {
    if k < 2 {
        return Err(Error::InvalidInput(format!("k must be at least 2, got {k}")));
    }
    Ok(())
}

/// Image of `p` under `T_k`.
pub fn t_k_forward<S: Scalar>(p: &TwistedPolygon<S>, k: usize, labeling: MapLabeling) -> Result<TwistedPolygon<S>> {
    check_k(k)?;
    let offset: i64 = match labeling {
        MapLabeling::ForwardShift => 0,
        MapLabeling::Centered3 if k == 3 => -2,
        MapLabeling::Centered3 => return Err(Error::InvalidInput(format!("centered labeling needs k = 3, got {k}"))),
    };
    if let Some(index) = p.first_not_k_nice(k) {
        return Err(Error::NotKNice { k, index });
    }
    let n = p.n();
    let pts = p.window(offset, n + k + 1);
    let vertices = (0..n)
        .map(|i| diagonal_meet(&pts[i], &pts[i + k], &pts[i + 1], &pts[i + k + 1]).ok_or(Error::NotKNice { k, index: i as i64 }))
        .collect::<Result<Vec<_>>>()?;
    TwistedPolygon::new(vertices, p.monodromy().clone()).map_err(|_| Error::NotKNice { k, index: 0 })
}

/// Preimage under the forward-shift `T_k`: `P[i] = P'[i-k-1]P'[i-k] ∩ P'[i-1]P'[i]`.
pub fn t_k_inverse<S: Scalar>(p: &TwistedPolygon<S>, k: usize) -> Result<TwistedPolygon<S>> {
    check_k(k)?;
    if let Some(index) = p.first_not_k_nice(k) {
        return Err(Error::NotKNice { k, index });
    }
    let n = p.n();
    let pts = p.window(-(k as i64) - 1, n + k + 1);
    let vertices = (0..n)
        .map(|i| diagonal_meet(&pts[i], &pts[i + 1], &pts[i + k], &pts[i + k + 1]).ok_or(Error::NotKNice { k, index: i as i64 }))
        .collect::<Result<Vec<_>>>()?;
    TwistedPolygon::new(vertices, p.monodromy().clone()).map_err(|_| Error::NotKNice { k, index: 0 })
}

fn diagonal_meet<S: Scalar>(
    a: &HomogeneousPoint<S>,
    b: &HomogeneousPoint<S>,
    c: &HomogeneousPoint<S>,
    d: &HomogeneousPoint<S>,
) -> Option<HomogeneousPoint<S>> {
    meet(&join(a, b).ok()?, &join(c, d).ok()?).ok()
}

/// `num / den`, failing when the denominator vanishes relative to its terms.
fn ratio<S: Scalar>(num: S, left: S, right: S, slot: usize) -> Result<S> {
    let scale = left.to_f64_lossy().abs() + right.to_f64_lossy().abs();
    let den = left - right;
    if den.is_zero() || den.negligible(scale.max(1.0), SINGULAR_EPS) {
        return Err(Error::SingularOrbitPoint { index: slot });
    }
    Ok(num / den)
}

/// One step of `T_3` in corner-invariant coordinates (centered labeling).
pub fn t3_coords_forward<S: Scalar>(x: &CornerInvariants<S>) -> Result<CornerInvariants<S>> {
    let v = x.finite_values()?;
    let m = v.len() as i64;
    let at = |i: i64| v[i.rem_euclid(m) as usize].clone();
    let one = S::one;
    let mut out = Vec::with_capacity(v.len());
    for i in 0..m / 2 {
        let (e, o) = (2 * i, 2 * i + 1);
        out.push(ratio(
            at(e - 2) * (at(e - 4) + at(e - 1) - one()),
            at(e - 2) * at(e - 1),
            (one() - at(e + 1)) * (one() - at(e - 4)),
            e as usize,
        )?);
        out.push(ratio(
            at(o + 2) * (at(o + 1) + at(o + 4) - one()),
            at(o + 1) * at(o + 2),
            (one() - at(o + 4)) * (one() - at(o - 1)),
            o as usize,
        )?);
    }
    CornerInvariants::from_values(out)
}

/// One step of `T_3^{-1}` in corner-invariant coordinates.
pub fn t3_coords_inverse<S: Scalar>(x: &CornerInvariants<S>) -> Result<CornerInvariants<S>> {
    let v = x.finite_values()?;
    let m = v.len() as i64;
    let at = |i: i64| v[i.rem_euclid(m) as usize].clone();
    let one = S::one;
    let mut out = Vec::with_capacity(v.len());
    for i in 0..m / 2 {
        let (e, o) = (2 * i, 2 * i + 1);
        out.push(ratio(
            at(e + 2) * (at(e + 4) + at(e + 1) - one()),
            at(e + 1) * at(e + 2),
            (one() - at(e - 1)) * (one() - at(e + 4)),
            e as usize,
        )?);
        out.push(ratio(
            at(o - 2) * (at(o - 4) + at(o - 1) - one()),
            at(o - 1) * at(o - 2),
            (one() - at(o + 1)) * (one() - at(o - 4)),
            o as usize,
        )?);
    }
    CornerInvariants::from_values(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polygon::reconstruct;
    use crate::scalar::{rational, Rational};

    fn sample() -> CornerInvariants {
        CornerInvariants::from_f64(&[2.5, 0.3, 1.7, 0.6, 4.0, 0.2, 1.2, 0.9, 3.3, 0.45]).unwrap()
    }

    #[test]
    fn constant_is_fixed_exactly() {
        for (p, q) in [(-1, 1), (3, 10), (2, 1)] {
            let x = CornerInvariants::<Rational>::constant(4, rational(p, q)).unwrap();
            assert_eq!(t3_coords_forward(&x).unwrap(), x);
            assert_eq!(t3_coords_inverse(&x).unwrap(), x);
        }
        let half = CornerInvariants::<Rational>::constant(4, rational(1, 2)).unwrap();
        assert!(matches!(t3_coords_forward(&half), Err(Error::SingularOrbitPoint { .. })));
        assert!(matches!(t3_coords_forward(&CornerInvariants::constant(3, 0.5).unwrap()), Err(Error::SingularOrbitPoint { .. })));
    }

    #[test]
    fn coordinate_pair_is_mutually_inverse() {
        let x = sample();
        let y = t3_coords_inverse(&t3_coords_forward(&x).unwrap()).unwrap();
        assert!(x.max_abs_diff(&y) < 1e-10);
        let z = t3_coords_forward(&t3_coords_inverse(&x).unwrap()).unwrap();
        assert!(x.max_abs_diff(&z) < 1e-10);
    }

    #[test]
    fn geometric_centered_matches_coordinates() {
        let x = sample();
        let p = reconstruct(&x, None).unwrap();
        let img = t_k_forward(&p, 3, MapLabeling::Centered3).unwrap();
        let geo = img.corner_invariants().unwrap();
        assert!(geo.max_abs_diff(&t3_coords_forward(&x).unwrap()) < 1e-8);
    }

    #[test]
    fn labelings_differ_by_fixed_slot_shift() {
        let p = reconstruct(&sample(), None).unwrap();
        let c = t_k_forward(&p, 3, MapLabeling::Centered3).unwrap().corner_invariants().unwrap();
        let f = t_k_forward(&p, 3, MapLabeling::ForwardShift).unwrap().corner_invariants().unwrap();
        assert!(c.max_abs_diff(&f.rotated_slots(CENTERED_SLOT_SHIFT)) < 1e-8);
        assert!(c.max_abs_diff(&f.shifted(-2)) < 1e-8);
    }

    #[test]
    fn geometric_pair_is_mutually_inverse() {
        let p = reconstruct(&sample(), None).unwrap();
        for k in 2..6 {
            let Ok(img) = t_k_forward(&p, k, MapLabeling::ForwardShift) else { continue };
            let back = t_k_inverse(&img, k).unwrap();
            for i in 0..p.n() as i64 {
                assert!(back.vertex_at(i).proj_eq(&p.vertex_at(i)), "k={k} i={i}");
            }
        }
    }

    #[test]
    fn centered_needs_k3() {
        let p = reconstruct(&sample(), None).unwrap();
        assert!(matches!(t_k_forward(&p, 4, MapLabeling::Centered3), Err(Error::InvalidInput(_))));
    }
}
