use std::f64::consts::PI;

use proptest::prelude::*;

use shapevec::geometry::io::{decode_pbm, encode_pbm};
use shapevec::{
    decode_one, distance_transform, evaluate, fit_samples, iou, rasterize, shape_loss, BasisKind, BinaryMask,
    CoefficientVector, Contour, Point2, ShapeVector,
};

fn mask_strategy(max: usize) -> impl Strategy<Value = BinaryMask> {
    (1..=max, 1..=max).prop_flat_map(|(w, h)| {
        proptest::collection::vec(any::<bool>(), w * h).prop_map(move |bits| BinaryMask::new(w, h, bits).unwrap())
    })
}

fn coeffs_strategy(basis: BasisKind, l: usize) -> impl Strategy<Value = CoefficientVector> {
    proptest::collection::vec(-3.0f64..3.0, l).prop_map(move |mut c| {
        match basis {
            BasisKind::FourierFixed => c[0] = 1.0,
            BasisKind::FourierFree => c[0] = c[0].abs() + 0.25,
            _ => {}
        }
        c[if basis.is_fourier() { 1 } else { 0 }] += 20.0;
        CoefficientVector::new(basis, c).unwrap()
    })
}

fn basis_strategy() -> impl Strategy<Value = BasisKind> {
    prop_oneof![
        Just(BasisKind::Chebyshev),
        Just(BasisKind::Monomial),
        Just(BasisKind::FourierFixed),
        Just(BasisKind::FourierFree),
    ]
}

proptest! {
    #[test]
    fn pbm_round_trip_is_bit_exact(m in mask_strategy(40)) {
        let bytes = encode_pbm(&m);
        let back = decode_pbm(&bytes).unwrap();
        prop_assert_eq!(&back, &m);
        prop_assert_eq!(encode_pbm(&back), bytes);
    }

    #[test]
    fn iou_is_symmetric_and_bounded(a in mask_strategy(12), seed in any::<u64>()) {
        let b = BinaryMask::from_fn(a.width(), a.height(), |x, y| (seed >> ((x * 7 + y * 3) % 64)) & 1 == 1);
        let ab = iou(&a, &b).unwrap();
        prop_assert_eq!(ab, iou(&b, &a).unwrap());
        prop_assert!((0.0..=1.0).contains(&ab));
        prop_assert_eq!(iou(&a, &a).unwrap(), 1.0);
    }

    #[test]
    fn distance_is_zero_exactly_on_background(m in mask_strategy(16)) {
        prop_assume!(!m.is_empty());
        let df = distance_transform(&m).unwrap();
        for y in 0..m.height() {
            for x in 0..m.width() {
                let d = df.get(x, y);
                if m.get(x, y) { prop_assert!(d >= 1.0) } else { prop_assert_eq!(d, 0.0) }
            }
        }
    }

    #[test]
    fn decode_is_translation_equivariant(
        cv in basis_strategy().prop_flat_map(|b| coeffs_strategy(b, 8)),
        dx in -50.0f64..50.0,
        dy in -50.0f64..50.0,
    ) {
        let a = ShapeVector::new(Point2::new(10.0, 20.0), cv.clone(), None).unwrap();
        let b = ShapeVector::new(Point2::new(10.0 + dx, 20.0 + dy), cv, None).unwrap();
        let (ca, cb) = (decode_one(&a, 90).unwrap(), decode_one(&b, 90).unwrap());
        let shift = b.center - a.center;
        for (p, q) in ca.vertices().iter().zip(cb.vertices()) {
            let moved = *p + shift;
            prop_assert!((moved.x - q.x).abs() <= 1e-12 * (1.0 + q.x.abs()));
            prop_assert!((moved.y - q.y).abs() <= 1e-12 * (1.0 + q.y.abs()));
        }
    }

    #[test]
    fn shape_loss_symmetric_and_zero_iff_equal(
        a in proptest::collection::vec(-5.0f64..5.0, 6),
        b in proptest::collection::vec(-5.0f64..5.0, 6),
        cx in -5.0f64..5.0,
    ) {
        let ka = CoefficientVector::new(BasisKind::Chebyshev, a.clone()).unwrap();
        let kb = CoefficientVector::new(BasisKind::Chebyshev, b.clone()).unwrap();
        let (pa, pb) = (Point2::new(cx, 0.0), Point2::new(0.0, cx));
        let ab = shape_loss(pa, &ka, pb, &kb).unwrap();
        prop_assert_eq!(ab, shape_loss(pb, &kb, pa, &ka).unwrap());
        prop_assert_eq!(shape_loss(pa, &ka, pa, &ka).unwrap(), 0.0);
        prop_assert_eq!(ab == 0.0, a == b && cx == 0.0);
    }

    #[test]
    fn fit_recovers_exact_polynomials(c in proptest::collection::vec(-2.0f64..2.0, 1..=12)) {
        let l = c.len();
        let truth = CoefficientVector::new(BasisKind::Chebyshev, c.clone()).unwrap();
        let thetas: Vec<f64> = (0..360).map(|j| 2.0 * PI * j as f64 / 360.0).collect();
        let values = evaluate(&truth, &thetas);
        let fitted = fit_samples(&values, BasisKind::Chebyshev, l).unwrap();
        for (f, t) in fitted.coeffs.iter().zip(&c) {
            prop_assert!((f - t).abs() < 1e-8, "{} vs {}", f, t);
        }
    }

    #[test]
    fn coefficient_bytes_round_trip(
        cv in (basis_strategy(), 1usize..10)
            .prop_flat_map(|(b, l)| coeffs_strategy(b, if b.is_fourier() { 2 * l } else { l })),
    ) {
        prop_assert_eq!(CoefficientVector::from_bytes(&cv.to_bytes()).unwrap(), cv.clone());
        let sv = ShapeVector::new(Point2::new(1.25, -3.5), cv, Some(2.0)).unwrap();
        prop_assert_eq!(ShapeVector::from_json(&sv.to_json()).unwrap(), sv);
    }

    #[test]
    fn rasterized_square_has_exact_area(x0 in 0i32..20, y0 in 0i32..20, s in 1i32..12) {
        let (x0, y0, s) = (x0 as f64, y0 as f64, s as f64);
        let c = Contour::new(vec![
            Point2::new(x0, y0),
            Point2::new(x0 + s, y0),
            Point2::new(x0 + s, y0 + s),
            Point2::new(x0, y0 + s),
        ]).unwrap();
        let r = rasterize(&c, 40, 40).unwrap();
        prop_assert_eq!(r.mask.count() as f64, s * s);
    }
}
