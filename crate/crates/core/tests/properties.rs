use proptest::prelude::*;

use heightbound::arith::{q, Q};
use heightbound::bounds::{general_bound, transverse_bound, Branch, C0Choice, CurveDescriptor, PolyInput};
use heightbound::cm::{CMOrder, EndElement, KNum};
use heightbound::constants::bezout_c0;
use heightbound::elliptic::{EPoint, EllipticCurveQ};
use heightbound::error::Error;
use heightbound::gnum::decompose_form;
use heightbound::heights::{canonical_height, height_gap_check, DEFAULT_EPS};
use heightbound::klattice::{successive_minima, KLattice};
use heightbound::search::{brute_force_pairs, curve_membership, search_rational_points, MWInput};

const DS: [i64; 5] = [-1, -2, -3, -7, -11];

fn e02() -> EllipticCurveQ {
    EllipticCurveQ::from_i64(0, -2).unwrap()
}

fn g() -> EPoint {
    EPoint::from_ints(3, 5)
}

fn order() -> impl Strategy<Value = CMOrder> {
    prop::sample::select(DS.to_vec()).prop_map(|d| CMOrder::new(d, 1).unwrap())
}

fn entry() -> impl Strategy<Value = EndElement> {
    (-3i64..=3, -3i64..=3).prop_map(|(a, b)| EndElement::new(a, b))
}

fn knum() -> impl Strategy<Value = KNum> {
    (-20i64..=20, 1i64..=9, -20i64..=20, 1i64..=9).prop_map(|(a, da, b, db)| KNum {
        a: Q::new(a.into(), da.into()),
        b: Q::new(b.into(), db.into()),
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn group_law_is_associative(a in -4i64..=4, b in -4i64..=4, c in -4i64..=4) {
        let e = e02();
        let (p, q_, r) = (e.scalar_mul(a, &g()).unwrap(), e.scalar_mul(b, &g()).unwrap(), e.scalar_mul(c, &g()).unwrap());
        let left = e.add(&e.add(&p, &q_).unwrap(), &r).unwrap();
        let right = e.add(&p, &e.add(&q_, &r).unwrap()).unwrap();
        prop_assert_eq!(left, right);
    }

    #[test]
    fn scalar_multiplication_is_additive(m in -6i64..=6, n in -6i64..=6) {
        let e = e02();
        let sum = e.add(&e.scalar_mul(m, &g()).unwrap(), &e.scalar_mul(n, &g()).unwrap()).unwrap();
        prop_assert_eq!(e.scalar_mul(m + n, &g()).unwrap(), sum);
        prop_assert_eq!(e.add(&e.scalar_mul(m, &g()).unwrap(), &e.scalar_mul(-m, &g()).unwrap()).unwrap(), EPoint::Infinity);
    }

    #[test]
    fn torsion_subgroup_is_closed((a, b) in prop::sample::select(vec![(0i64, 1i64), (-1, 0), (0, -2), (-4, 0), (1, 0), (0, 4)])) {
        let e = EllipticCurveQ::from_i64(a, b).unwrap();
        let t = e.torsion_subgroup().unwrap();
        prop_assert!(t.contains(&EPoint::Infinity));
        for p in &t {
            prop_assert!(e.is_torsion(p));
            prop_assert!(t.contains(&e.neg(p).unwrap()));
            for q_ in &t {
                prop_assert!(t.contains(&e.add(p, q_).unwrap()));
            }
        }
    }

    #[test]
    fn canonical_height_is_quadratic(a in 1i64..=5) {
        let e = e02();
        let h1 = canonical_height(&e, &g(), DEFAULT_EPS).unwrap().value;
        let ha = canonical_height(&e, &e.scalar_mul(a, &g()).unwrap(), DEFAULT_EPS).unwrap().value;
        prop_assert!((ha / ((a * a) as f64 * h1) - 1.0).abs() < 1e-6);
    }

    #[test]
    fn h2_is_within_c_e_of_canonical(ks in prop::collection::vec(-5i64..=5, 1..=3)) {
        let e = e02();
        let pts: Vec<EPoint> = ks.iter().map(|&k| e.scalar_mul(k, &g()).unwrap()).collect();
        let w = height_gap_check(&e, &pts, DEFAULT_EPS).unwrap();
        prop_assert!(w.holds, "gap {} allowance {}", w.gap, w.allowance);
    }

    #[test]
    fn decomposition_identity(ord in order(), l in prop::collection::vec(knum(), 1..=4), seed in prop::collection::vec(entry(), 4)) {
        let t = &seed[..l.len()];
        let d = decompose_form(&l, t, &ord).unwrap();
        prop_assert!(d.identity_holds());
        prop_assert_eq!(&d.value, &d.assembled);
        prop_assert!(d.first_norm_ok && d.second_norm_ok);
    }

    #[test]
    fn transverse_bound_is_monotone(
        n in 2u32..=4,
        r_seed in 0u32..4,
        deg in 1u64..500,
        h2 in 0.0f64..1e4,
        bump in 1.0f64..100.0,
        di in 0usize..4,
    ) {
        let r = r_seed % n;
        let e = EllipticCurveQ::from_i64(0, 1).unwrap();
        let ords: Vec<CMOrder> = DS.iter().map(|&d| CMOrder::new(d, 1).unwrap()).collect();
        let mut sorted = ords.clone();
        sorted.sort_by_key(|o| o.abs_dk());
        let bound = |deg: u64, h2: f64, ord: CMOrder, e: &EllipticCurveQ| {
            transverse_bound(&CurveDescriptor::transverse(n, deg, h2, r, ord, e.clone()), C0Choice::Rigorous).unwrap().bound_ln
        };
        let base = bound(deg, h2, sorted[di], &e);
        prop_assert!(bound(deg, h2 + bump, sorted[di], &e) > base);
        prop_assert!(bound(deg + bump as u64, h2, sorted[di], &e) > base);
        prop_assert!(bound(deg, h2, sorted[di + 1], &e) >= base);
        let bigger = EllipticCurveQ::from_i64(0, 1000).unwrap();
        prop_assert!(bigger.c_e() > e.c_e());
        prop_assert!(bound(deg, h2, sorted[di], &bigger) > base);
    }

    #[test]
    fn general_bound_rejects_large_rank(n in 2u32..=5, t_c in 1u32..=5, r_c in 1u32..=5, r in 0u32..5) {
        prop_assume!(t_c <= r_c && r_c <= n && t_c < n);
        let desc = CurveDescriptor {
            n, deg_c: 7, h2_c: 3.0, h_c: 0.0, t_c, r_c, r,
            ord: CMOrder::new(-1, 1).unwrap(),
            curve: EllipticCurveQ::from_i64(-1, 0).unwrap(),
        };
        let res = general_bound(&desc, C0Choice::Rigorous);
        if r >= (r_c - t_c).max(t_c) {
            prop_assert!(matches!(res, Err(Error::OutOfRange(_))));
        } else if r_c - t_c >= t_c {
            prop_assert_eq!(res.unwrap().branch, Branch::EmptyCertificate);
        } else {
            prop_assert!(res.unwrap().bound_ln.is_finite());
        }
    }

    #[test]
    fn bezout_constant_grows_with_ambient_dimension(d1 in 0u64..4, d2 in 0u64..4, m in 0u64..40) {
        prop_assert!(bezout_c0(d1, d2, m + 1) > bezout_c0(d1, d2, m));
    }

    #[test]
    fn minkowski_holds_on_random_lattices(ord in order(), rows in prop::collection::vec(prop::collection::vec(entry(), 3), 1..=2)) {
        let l = match KLattice::new(rows, ord) {
            Ok(l) => l,
            Err(_) => return Ok(()),
        };
        let m = successive_minima(&l).unwrap();
        prop_assert!(m.minkowski_ok, "{} > {}", m.minkowski_lhs, m.minkowski_rhs);
        prop_assert!(m.lambdas.windows(2).all(|w| w[0] <= w[1] + 1e-12));
    }

    #[test]
    fn search_results_lie_on_the_curve(coeffs in prop::collection::vec(-3i64..=3, 1..=3)) {
        let p = match PolyInput::new(coeffs.iter().map(|&c| q(c)).collect()) {
            Ok(p) => p,
            Err(_) => return Ok(()),
        };
        let ord = CMOrder::new(-3, 1).unwrap();
        let e = EllipticCurveQ::from_i64(0, 1).unwrap();
        let mw = MWInput::new(&e, None, 0).unwrap();
        let rep = search_rational_points(&e, &ord, &p, &mw, 10).unwrap();
        prop_assert!(rep.fully_certified);
        prop_assert_eq!(&rep.points_found, &brute_force_pairs(&e, &p, &mw, 0).unwrap());

        let mw1 = MWInput::new(&e02(), Some(g()), 1).unwrap();
        let rep = search_rational_points(&e02(), &ord, &p, &mw1, 8).unwrap();
        prop_assert!(!rep.fully_certified);
        for f in &rep.points_found {
            let p1 = e02().add(&e02().scalar_mul(f.a, &g()).unwrap(), &mw1.torsion[f.t1]).unwrap();
            let p2 = e02().add(&e02().scalar_mul(f.b, &g()).unwrap(), &mw1.torsion[f.t2]).unwrap();
            prop_assert!(curve_membership(&p, &p1, &p2).unwrap());
        }
        prop_assert_eq!(&rep.points_found, &brute_force_pairs(&e02(), &p, &mw1, 8).unwrap());
    }
}
