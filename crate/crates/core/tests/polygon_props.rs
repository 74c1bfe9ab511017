use proptest::prelude::*;
use spiralgram::{
    conditioned_seed, reconstruct, reconstruct_conditioned, square_seed, t3_coords_forward, t3_coords_inverse, t_k_forward, t_k_inverse, transform_from_correspondence,
    CornerInvariants, GridSquare, HomogeneousPoint, Interval, MapLabeling, ProjectiveTransform, Reindex, TwistedPolygon,
};

fn interval_range(i: Interval) -> std::ops::Range<f64> {
    match i {
        Interval::I => -5.0..-0.1,
        Interval::J => 0.05..0.95,
        _ => 1.1..6.0,
    }
}

/// Corner invariants inside a side square (or the center square).
fn invariants_in(square: GridSquare, n: std::ops::RangeInclusive<usize>) -> impl Strategy<Value = CornerInvariants> {
    n.prop_flat_map(move |n| {
        prop::collection::vec((interval_range(square.even), interval_range(square.odd)), n)
            .prop_map(|pairs| CornerInvariants::from_values(pairs.into_iter().flat_map(|(e, o)| [e, o]).collect()).unwrap())
    })
}

fn any_square() -> impl Strategy<Value = GridSquare> {
    prop::sample::select(vec![GridSquare::IJ, GridSquare::KJ, GridSquare::JI, GridSquare::JK, GridSquare::JJ])
}

fn invariants(n: std::ops::RangeInclusive<usize>) -> impl Strategy<Value = CornerInvariants> {
    any_square().prop_flat_map(move |s| invariants_in(s, n.clone()))
}

fn transform() -> impl Strategy<Value = ProjectiveTransform> {
    prop::array::uniform9(-2.0..2.0f64)
        .prop_map(|m| ProjectiveTransform::from_row_major(&m))
        .prop_filter("well conditioned", |t| t.as_ref().map(|t| t.det().abs() > 0.2).unwrap_or(false))
        .prop_map(Result::unwrap)
}

/// Random twisted polygons: vertices in a box, monodromy near the identity.
fn polygon(n: std::ops::RangeInclusive<usize>) -> impl Strategy<Value = TwistedPolygon> {
    let n = n.prop_flat_map(|n| prop::collection::vec((-5.0..5.0f64, -5.0..5.0f64), n));
    (n, prop::array::uniform9(-0.3..0.3f64)).prop_filter_map("degenerate polygon", |(v, d)| {
        let m: Vec<f64> = d.iter().enumerate().map(|(i, e)| e + if i % 4 == 0 { 1.0 } else { 0.0 }).collect();
        let m = ProjectiveTransform::from_row_major(&m).ok()?;
        let p = TwistedPolygon::new(v.into_iter().map(|(x, y)| HomogeneousPoint::from_affine(x, y)).collect(), m).ok()?;
        let w = p.window(-2, p.n() + 4);
        let spread = w.windows(3).all(|t| match (t[0].to_affine(), t[1].to_affine(), t[2].to_affine()) {
            (Some(a), Some(b), Some(c)) => spiralgram::orientation(&a, &b, &c).abs() > 0.5,
            _ => false,
        });
        (spread && p.corner_invariants().ok()?.is_generic()).then_some(p)
    })
}

fn rel_diff(a: &CornerInvariants, b: &CornerInvariants) -> f64 {
    a.entries()
        .iter()
        .zip(b.entries())
        .map(|(u, v)| {
            let (u, v) = (u.to_f64(), v.to_f64());
            (u - v).abs() / u.abs().max(v.abs()).max(1.0)
        })
        .fold(0.0, f64::max)
}

/// Affine chart check: every vertex of the first period is a finite point.
fn affine(p: &TwistedPolygon) -> bool {
    p.vertices().iter().all(|v| v.to_affine().map(|a| a.x.is_finite() && a.y.is_finite()).unwrap_or(false))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn invariants_ignore_the_representative(p in polygon(3..=7), t in transform()) {
        let x = p.corner_invariants().unwrap();
        let Ok(q) = p.transformed(&t) else { return Ok(()) };
        let y = q.corner_invariants().unwrap();
        prop_assert!(rel_diff(&x, &y) <= 1e-9, "{}", rel_diff(&x, &y));
    }

    #[test]
    fn invariants_are_periodic(p in polygon(3..=6), s in -3i64..=3) {
        let x = p.corner_invariants().unwrap();
        let n = p.n() as i64;
        let Ok(shifted) = TwistedPolygon::new(p.window(s * n, n as usize), p.monodromy().clone()) else { return Ok(()) };
        let y = shifted.corner_invariants().unwrap();
        prop_assert!(rel_diff(&x, &y) <= 1e-8, "{}", rel_diff(&x, &y));
    }

    #[test]
    fn reconstruction_is_faithful(x in invariants(2..=8)) {
        let y = reconstruct_conditioned(&x).unwrap().corner_invariants().unwrap();
        prop_assert!(x.max_abs_diff(&y) <= 1e-8, "{}", x.max_abs_diff(&y));
    }

    #[test]
    fn reconstruction_does_not_depend_on_the_seed(x in invariants(3..=7), a in prop::array::uniform4(-2.0..2.0f64)) {
        // A second seed: the conditioned frame moved by a linear map of the chart.
        prop_assume!((a[0] * a[3] - a[1] * a[2]).abs() > 0.2);
        let base = conditioned_seed(&x).unwrap();
        let seed = base.clone().map(|q| {
            let v = q.to_affine().unwrap();
            HomogeneousPoint::from_affine(a[0] * v.x + a[1] * v.y, a[2] * v.x + a[3] * v.y)
        });
        let p = reconstruct(&x, Some(&base)).unwrap();
        let q = reconstruct(&x, Some(&seed)).unwrap();
        let w = |r: &TwistedPolygon| r.window(0, 4);
        let (u, v) = (w(&p), w(&q));
        let phi = transform_from_correspondence([&u[0], &u[1], &u[2], &u[3]], [&v[0], &v[1], &v[2], &v[3]]).unwrap();
        for i in 0..p.n() as i64 {
            prop_assert!(phi.apply(&p.vertex_at(i)).proj_eq(&q.vertex_at(i)), "vertex {}", i);
        }
    }

    #[test]
    fn geometric_maps_are_mutually_inverse(x in invariants(3..=7), k in 3usize..=5) {
        let p = reconstruct_conditioned(&x).unwrap();
        prop_assume!(p.is_k_nice(k));
        let img = t_k_forward(&p, k, MapLabeling::ForwardShift).unwrap();
        let back = t_k_inverse(&img, k).unwrap();
        prop_assert!(rel_diff(&x, &back.corner_invariants().unwrap()) <= 1e-7);
        let pre = t_k_inverse(&p, k).unwrap();
        let again = t_k_forward(&pre, k, MapLabeling::ForwardShift).unwrap();
        prop_assert!(rel_diff(&x, &again.corner_invariants().unwrap()) <= 1e-7);
    }

    #[test]
    fn coordinate_maps_are_mutually_inverse(x in invariants(2..=8)) {
        if let Ok(y) = t3_coords_forward(&x) {
            if let Ok(z) = t3_coords_inverse(&y) {
                prop_assert!(rel_diff(&x, &z) <= 1e-9);
            }
        }
        if let Ok(y) = t3_coords_inverse(&x) {
            if let Ok(z) = t3_coords_forward(&y) {
                prop_assert!(rel_diff(&x, &z) <= 1e-9);
            }
        }
    }

    #[test]
    fn maps_commute_with_transforms(p in polygon(3..=6), k in 3usize..=5, t in transform()) {
        prop_assume!(p.is_k_nice(k));
        let Ok(q) = p.transformed(&t) else { return Ok(()) };
        let Ok(a) = t_k_forward(&p, k, MapLabeling::ForwardShift).and_then(|r| r.corner_invariants()) else { return Ok(()) };
        let b = t_k_forward(&q, k, MapLabeling::ForwardShift).unwrap().corner_invariants().unwrap();
        prop_assert!(rel_diff(&a, &b) <= 1e-7, "{}", rel_diff(&a, &b));
    }

    #[test]
    fn labelings_differ_by_four_slots(x in invariants(3..=7)) {
        let p = reconstruct_conditioned(&x).unwrap();
        let c = t_k_forward(&p, 3, MapLabeling::Centered3).unwrap().corner_invariants().unwrap();
        let f = t_k_forward(&p, 3, MapLabeling::ForwardShift).unwrap().corner_invariants().unwrap();
        prop_assert!(rel_diff(&c, &f.rotated_slots(spiralgram::dynamics::CENTERED_SLOT_SHIFT)) <= 1e-8);
    }

    #[test]
    fn geometric_and_coordinate_maps_agree(x in invariants(4..=8)) {
        let p = reconstruct_conditioned(&x).unwrap();
        let geo = t_k_forward(&p, 3, MapLabeling::Centered3).unwrap().corner_invariants().unwrap();
        if let Ok(c) = t3_coords_forward(&x) {
            prop_assert!(geo.max_abs_diff(&c) <= 1e-8);
        }
    }

    #[test]
    fn maps_preserve_k_niceness(x in invariants(3..=7), k in 3usize..=5) {
        let p = reconstruct_conditioned(&x).unwrap();
        prop_assume!(p.is_k_nice(k));
        prop_assert!(t_k_forward(&p, k, MapLabeling::ForwardShift).unwrap().is_k_nice(k));
        prop_assert!(t_k_inverse(&p, k).unwrap().is_k_nice(k));
    }

    #[test]
    fn reindexing_acts_on_invariants(x in invariants(3..=7), s in -4i64..=4) {
        let p = reconstruct_conditioned(&x).unwrap();
        let rev = p.reindex(Reindex::Reverse).unwrap().corner_invariants().unwrap();
        prop_assert!(rel_diff(&rev, &x.reversed()) <= 1e-8);
        let sh = p.reindex(Reindex::Shift(s)).unwrap().corner_invariants().unwrap();
        prop_assert!(rel_diff(&sh, &x.shifted(s)) <= 1e-8);
    }
}

#[test]
fn square_seed_reconstructions_start_on_the_seed() {
    let x = CornerInvariants::from_f64(&[2.0, 0.5, 3.0, 0.25, 1.5, 0.75]).unwrap();
    let p = reconstruct(&x, None).unwrap();
    assert!(affine(&p));
    for (v, s) in p.window(0, 4).iter().zip(square_seed::<f64>()) {
        assert!(v.proj_eq(&s));
    }
}
