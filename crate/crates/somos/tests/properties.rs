//! Property tests for the algebraic invariants: exact field axioms,
//! generation/verification round-trips, coherence, and the derived
//! relation families on randomized inputs.

use proptest::prelude::*;

use somos::curve::{constants_from_e, CurveModel, Point};
use somos::eds::{eds_generate, verify_ward_general, EdsInitials};
use somos::lift::{companion_eds, fit_somos4, lift_somos4, somos_k_relation, twist_equivalence};
use somos::quad::QuadScalar;
use somos::rat::{rat, Rat};
use somos::seq::{
    e_of, e_sequence_of, extend_somos4, extend_somos5, verify_relation, SomosRelation,
    TwoSidedSequence, Value,
};
use somos::somos5::{fit_somos5, interleave_split};

fn small_rat() -> impl Strategy<Value = Rat> {
    (-6i64..=6, 1i64..=3).prop_map(|(n, d)| rat(n, d))
}

fn nonzero_rat() -> impl Strategy<Value = Rat> {
    (prop_oneof![-6i64..=-1, 1i64..=6], 1i64..=3).prop_map(|(n, d)| rat(n, d))
}

fn quad(d: i64) -> impl Strategy<Value = QuadScalar> {
    (small_rat(), small_rat()).prop_map(move |(a, b)| QuadScalar::new(a, b, rat(d, 1)))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn quad_mul_inverse(x in quad(5)) {
        prop_assume!(!x.is_zero());
        let inv = x.inv().unwrap();
        prop_assert!(x.checked_mul(&inv).unwrap().is_one());
    }

    #[test]
    fn quad_normalization_is_idempotent(x in quad(5)) {
        let renorm = QuadScalar::new(x.a().clone(), x.b().clone(), x.d().clone());
        prop_assert_eq!(&renorm, &x);
        // Square discriminants always collapse.
        let collapsed = QuadScalar::new(x.a().clone(), x.b().clone(), rat(9, 4));
        prop_assert!(collapsed.is_rational());
    }

    #[test]
    fn quad_ring_axioms(x in quad(7), y in quad(7), z in quad(7)) {
        let xy = x.checked_mul(&y).unwrap();
        let yx = y.checked_mul(&x).unwrap();
        prop_assert_eq!(&xy, &yx);
        let assoc_l = xy.checked_mul(&z).unwrap();
        let assoc_r = x.checked_mul(&y.checked_mul(&z).unwrap()).unwrap();
        prop_assert_eq!(&assoc_l, &assoc_r);
        let dist_l = x.checked_mul(&y.checked_add(&z).unwrap()).unwrap();
        let dist_r = x
            .checked_mul(&y)
            .unwrap()
            .checked_add(&x.checked_mul(&z).unwrap())
            .unwrap();
        prop_assert_eq!(&dist_l, &dist_r);
    }

    #[test]
    fn quad_display_parse_round_trip(x in quad(5)) {
        let back: QuadScalar = x.to_string().parse().unwrap();
        prop_assert_eq!(back, x);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn somos4_generation_verifies_its_own_relation(
        lambda in nonzero_rat(),
        mu in nonzero_rat(),
        inits in prop::array::uniform4(nonzero_rat()),
    ) {
        let rel = SomosRelation::new(
            4,
            QuadScalar::from_rat(lambda),
            QuadScalar::from_rat(mu),
        ).unwrap();
        let init = inits.map(QuadScalar::from_rat);
        let Ok(seq) = extend_somos4(0, init, &rel, -8..=12) else {
            // A vanishing divisor aborts generation; nothing to check.
            return Ok(());
        };
        let report = verify_relation(&seq, &rel, rel.checkable_range(-8, 12)).unwrap();
        prop_assert!(report.holds());
        prop_assert_eq!(report.checked, 17);
    }

    #[test]
    fn somos5_generation_verifies_its_own_relation(
        lambda in nonzero_rat(),
        mu in nonzero_rat(),
        inits in prop::array::uniform5(nonzero_rat()),
    ) {
        let rel = SomosRelation::new(
            5,
            QuadScalar::from_rat(lambda),
            QuadScalar::from_rat(mu),
        ).unwrap();
        let init = inits.map(QuadScalar::from_rat);
        let Ok(seq) = extend_somos5(0, init, &rel, -6..=12) else {
            return Ok(());
        };
        let report = verify_relation(&seq, &rel, rel.checkable_range(-6, 12)).unwrap();
        prop_assert!(report.holds());
        let fitted = fit_somos5(&seq, None).unwrap();
        prop_assert_eq!(fitted, rel);
    }

    #[test]
    fn somos4_fit_round_trip(
        lambda in nonzero_rat(),
        mu in nonzero_rat(),
        inits in prop::array::uniform4(nonzero_rat()),
    ) {
        let rel = SomosRelation::new(
            4,
            QuadScalar::from_rat(lambda),
            QuadScalar::from_rat(mu),
        ).unwrap();
        let init = inits.map(QuadScalar::from_rat);
        let Ok(seq) = extend_somos4(0, init, &rel, 0..=10) else {
            return Ok(());
        };
        // Degenerate windows happen (constant sequences and kin); a
        // successful fit must reproduce the generating coefficients.
        if let Ok(fitted) = fit_somos4(&seq, None) {
            prop_assert_eq!(fitted, rel);
        }
    }

    #[test]
    fn elliptic_sequence_from_curve_quotients(a in -4i64..=4, b in 1i64..=5) {
        // e-sequence consistency: building A by A_{h+1} = e_h A_h²/A_{h-1}
        // and taking quotients lands back on e.
        let curve = CurveModel::new(rat(a, 1), rat(7, 1), rat(6, 1), rat(b, 1)).unwrap();
        let e = curve.e_sequence(&curve.s(), 0..=8).unwrap();
        let mut a_seq = TwoSidedSequence::new();
        a_seq.insert(1, Value::Finite(QuadScalar::one())).unwrap();
        a_seq.insert(2, Value::Finite(QuadScalar::one())).unwrap();
        let mut top = 2i64;
        while top < 8 {
            let h = top;
            let (Some(Value::Finite(eh)), prev, here) =
                (e.get(h), a_seq.require_finite(h - 1), a_seq.require_finite(h))
            else {
                break;
            };
            if eh.is_zero() {
                break;
            }
            let (prev, here) = (prev.unwrap().clone(), here.unwrap().clone());
            let next = &(eh * &(&here * &here)) / &prev;
            a_seq.insert(h + 1, Value::Finite(next)).unwrap();
            top += 1;
        }
        for h in 2..top {
            prop_assert_eq!(
                e_of(&a_seq, h).unwrap(),
                e.require(h).unwrap().clone(),
                "h = {}", h
            );
        }
    }

    #[test]
    fn ward_coherence_small(
        w2 in nonzero_rat(),
        w3 in nonzero_rat(),
        w4 in small_rat(),
    ) {
        let init = EdsInitials::new(
            QuadScalar::from_rat(w2),
            QuadScalar::from_rat(w3),
            QuadScalar::from_rat(w4),
        ).unwrap();
        let Ok(seq) = eds_generate(&init, -1..=18) else {
            return Ok(());
        };
        for m in 2..=5 {
            let report = verify_ward_general(&seq, m, m..=12).unwrap();
            prop_assert!(report.holds(), "m = {}", m);
        }
    }

    #[test]
    fn derived_coefficients_are_rational(
        lambda in nonzero_rat(),
        mu in nonzero_rat(),
        gamma in small_rat(),
    ) {
        use somos::curve::EllipticData;
        let data = EllipticData::new(lambda, -&mu, gamma);
        let Ok(w) = companion_eds(&data, 0..=12) else {
            return Ok(());
        };
        for k in 4..=20 {
            let rel = somos_k_relation(&w, k).unwrap();
            prop_assert!(rel.lambda().is_rational(), "k = {}", k);
            prop_assert!(rel.mu().is_rational(), "k = {}", k);
        }
    }

    #[test]
    fn every_somos4_is_a_somos_k_small(
        lambda in nonzero_rat(),
        mu in nonzero_rat(),
        inits in prop::array::uniform4(nonzero_rat()),
    ) {
        let rel = SomosRelation::new(
            4,
            QuadScalar::from_rat(lambda),
            QuadScalar::from_rat(mu),
        ).unwrap();
        let init = inits.map(QuadScalar::from_rat);
        let Ok(seq) = extend_somos4(0, init, &rel, -10..=12) else {
            return Ok(());
        };
        let Ok(out) = lift_somos4(&seq, &[5, 6, 7, 8, 9]) else {
            // Degenerate windows (e.g. constant-e sequences) cannot be
            // lifted; they are excluded by the preconditions.
            return Ok(());
        };
        prop_assert_eq!(&out.fitted, &rel);
        prop_assert!(out.all_verified());
        // k = 4 round-trips to the fitted relation.
        let k4 = somos_k_relation(&out.companion, 4).unwrap();
        prop_assert_eq!(&k4, &out.fitted);
    }

    #[test]
    fn twist_carries_coefficients(
        alpha in nonzero_rat(),
        mu in nonzero_rat(),
        inits in prop::array::uniform4(nonzero_rat()),
    ) {
        // A'_h = α^{-h(h-1)/2} A_h maps (λ, μ) to (λα^{-3}, μα^{-4}).
        let lambda = &alpha * &alpha;
        let rel = SomosRelation::new(
            4,
            QuadScalar::from_rat(lambda.clone()),
            QuadScalar::from_rat(mu.clone()),
        ).unwrap();
        let init = inits.map(QuadScalar::from_rat);
        let Ok(seq) = extend_somos4(0, init, &rel, -6..=8) else {
            return Ok(());
        };
        let a = QuadScalar::from_rat(alpha.clone());
        let twisted = twist_equivalence(&seq, &a).unwrap();
        let expected = SomosRelation::new(
            4,
            QuadScalar::from_rat(&lambda / &(&(&alpha * &alpha) * &alpha)),
            QuadScalar::from_rat(&mu / &(&(&alpha * &alpha) * &(&alpha * &alpha))),
        ).unwrap();
        let report = verify_relation(&twisted, &expected, -4..=6).unwrap();
        prop_assert!(report.holds());
        prop_assert!(report.checked > 0);
    }

    #[test]
    fn somos5_parity_split_yields_somos4_pairs(
        lambda in nonzero_rat(),
        mu in nonzero_rat(),
    ) {
        let rel = SomosRelation::new(
            5,
            QuadScalar::from_rat(lambda),
            QuadScalar::from_rat(mu),
        ).unwrap();
        let init = std::array::from_fn(|_| QuadScalar::one());
        let Ok(seq) = extend_somos5(0, init, &rel, 0..=15) else {
            return Ok(());
        };
        let split = interleave_split(&seq);
        if let Ok(even_fit) = &split.even_fit {
            let (lo, hi) = split.even.span().unwrap();
            let report =
                verify_relation(&split.even, even_fit, even_fit.checkable_range(lo, hi)).unwrap();
            prop_assert!(report.holds());
        }
        if let Ok(odd_fit) = &split.odd_fit {
            let (lo, hi) = split.odd.span().unwrap();
            let report =
                verify_relation(&split.odd, odd_fit, odd_fit.checkable_range(lo, hi)).unwrap();
            prop_assert!(report.holds());
        }
    }
}

#[test]
fn constants_extraction_matches_curve_route() {
    // Consistency of routes: a gap-4 sequence built from a curve's
    // e-sequence has the same invariants either way.
    let curve = CurveModel::new(rat(1, 1), rat(7, 1), rat(6, 1), rat(12, 1)).unwrap();
    let m = Point::affine(rat(-2, 1), rat(-2, 1));
    let e = curve.e_sequence(&m, -8..=8).unwrap();
    let from_curve = constants_from_e(&e, None).unwrap();

    let mut a_seq = TwoSidedSequence::new();
    a_seq.insert(0, Value::Finite(QuadScalar::one())).unwrap();
    a_seq.insert(1, Value::Finite(QuadScalar::one())).unwrap();
    for h in 1..8i64 {
        let eh = e.require_finite(h).unwrap().clone();
        let prev = a_seq.require_finite(h - 1).unwrap().clone();
        let here = a_seq.require_finite(h).unwrap().clone();
        let next = &(&eh * &(&here * &here)) / &prev;
        a_seq.insert(h + 1, Value::Finite(next)).unwrap();
    }
    let fitted = fit_somos4(&a_seq, None).unwrap();
    let from_seq = somos::lift::elliptic_data_from_somos4(&a_seq, &fitted).unwrap();
    assert_eq!(from_seq, from_curve);
    // And the quotients agree index by index.
    let quotients = e_sequence_of(&a_seq, 1..=7);
    for h in 1..=7 {
        assert_eq!(quotients.require(h).unwrap(), e.require(h).unwrap());
    }
}
