use annuli::enumerate::{count, stream, FamilyKind, FamilySpec};
use annuli::formulas::{dim_isotropic, dim_isotropic_limit, dim_weighted, threshold, PhiLimit};
use annuli::geometry::json::{record_from_json, record_to_json};
use annuli::geometry::sample::sample_interior;
use annuli::geometry::{ball, rect_annulus, rect_annulus_decompose, Norm, RationalPoint};
use annuli::mtp::{select_exponents, select_weights, ww_lower_bound, ww_terms, MtpInstance};
use annuli::numeric::{q, qi, DEFAULT_BITS};
use annuli::{ExponentProfile, Q};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Positive rationals k/8 with k in 1..=max.
fn eighths(max: i64) -> impl Strategy<Value = Q> {
    (1..=max).prop_map(|k| q(k, 8))
}

fn profile(n: usize) -> impl Strategy<Value = ExponentProfile> {
    (prop::collection::vec(eighths(24), n), prop::collection::vec(eighths(24), n))
        .prop_map(|(tp, tf)| ExponentProfile::new(tp, tf).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn weighted_reduces_to_isotropic(n in 1usize..=4, tp in eighths(40), tf in eighths(40)) {
        let iso = dim_isotropic(n, &tp, &tf).unwrap();
        prop_assume!(iso.hypotheses.satisfied());
        let w = dim_weighted(&ExponentProfile::isotropic(n, tp, tf).unwrap()).unwrap();
        prop_assert_eq!(w.value, iso.value);
    }

    #[test]
    fn threshold_makes_thickness_irrelevant(n in 2usize..=6, tf in eighths(80)) {
        let t = threshold(n).unwrap();
        let d = dim_isotropic(n, &t, &tf).unwrap();
        prop_assert_eq!(d.value, qi(n as i64 + 1) / (qi(1) + t));
    }

    #[test]
    fn above_threshold_is_jarnik(n in 2usize..=6, extra in eighths(40), tf in eighths(80)) {
        let tp = threshold(n).unwrap() + extra;
        let d = dim_isotropic(n, &tp, &tf).unwrap();
        prop_assert_eq!(d.value, qi(n as i64 + 1) / (qi(1) + tp));
    }

    #[test]
    fn monotone_in_both_exponents(n in 1usize..=4, a in eighths(40), b in eighths(40), tf in eighths(40)) {
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        let d_lo = dim_isotropic(n, &lo, &tf).unwrap().value;
        let d_hi = dim_isotropic(n, &hi, &tf).unwrap().value;
        prop_assert!(d_hi <= d_lo);
        let thin = dim_isotropic(n, &tf, &hi).unwrap().value;
        let thick = dim_isotropic(n, &tf, &lo).unwrap().value;
        prop_assert!(thin <= thick);
    }

    #[test]
    fn value_between_limits_in_regime(n in 2usize..=5, num in 1i64..=64, tf in eighths(80)) {
        let tp = threshold(n).unwrap() * q(num, 64);
        let d = dim_isotropic(n, &tp, &tf).unwrap().value;
        let thin = dim_isotropic_limit(n, &tp, PhiLimit::Infinity).unwrap().value;
        let thick = dim_isotropic_limit(n, &tp, PhiLimit::Zero).unwrap().value;
        prop_assert!(thin <= d && d <= thick, "{} <= {} <= {}", thin, d, thick);
    }

    #[test]
    fn weighted_is_permutation_invariant(p in profile(3), perm in Just([0usize, 1, 2]).prop_shuffle()) {
        let tp: Vec<Q> = perm.iter().map(|&i| p.tau_psi()[i].clone()).collect();
        let tf: Vec<Q> = perm.iter().map(|&i| p.tau_phi()[i].clone()).collect();
        let shuffled = ExponentProfile::new(tp, tf).unwrap();
        prop_assert_eq!(dim_weighted(&shuffled).unwrap().value, dim_weighted(&p).unwrap().value);
    }

    #[test]
    fn ww_terms_partition_coordinates(
        a in prop::collection::vec(eighths(32), 1..=5),
        t_seed in prop::collection::vec(0i64..=32, 5),
    ) {
        let n = a.len();
        let t: Vec<Q> = t_seed[..n].iter().map(|&k| q(k, 8)).collect();
        let inst = MtpInstance::lebesgue(a, t).unwrap();
        for term in ww_terms(&inst) {
            prop_assert!(term.partition.is_partition_of(n));
        }
        let d = ww_lower_bound(&inst).value;
        prop_assert!(d <= qi(n as i64));
    }

    #[test]
    fn no_stretch_gives_full_dimension(a in prop::collection::vec(eighths(32), 1..=5)) {
        let n = a.len();
        let inst = MtpInstance::lebesgue(a, vec![qi(0); n]).unwrap();
        prop_assert_eq!(ww_lower_bound(&inst).value, qi(n as i64));
    }

    #[test]
    fn selection_weights_sum_to_one(tp in prop::collection::vec(eighths(24), 1..=5)) {
        let total: Q = tp.iter().sum();
        prop_assume!(total >= qi(1));
        let w = select_weights(&tp).unwrap();
        prop_assert_eq!(w.b.iter().sum::<Q>(), qi(1));
        for (b, t) in w.b.iter().zip(&tp) {
            prop_assert!(*b > qi(0) && b <= t);
        }
    }

    #[test]
    fn selection_stretch_is_nonnegative(p in profile(3), j in 0usize..3) {
        let total: Q = p.tau_psi().iter().sum();
        prop_assume!(total >= qi(1));
        let s = select_exponents(&p, j).unwrap();
        for (a, b) in s.a.iter().zip(&s.b) {
            prop_assert_eq!(a.clone(), qi(1) + b);
        }
        prop_assert!(s.t.iter().all(|t| *t >= qi(0)));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn shifted_rects_lie_in_rect_annulus(
        tp in prop::collection::vec((1i64..=3).prop_map(qi), 2),
        tf in prop::collection::vec((1i64..=3).prop_map(qi), 2),
        qq in 2u64..=5,
        seed in any::<u64>(),
    ) {
        let prof = ExponentProfile::new(tp, tf).unwrap();
        let p = RationalPoint::new(vec![1, qq - 1], qq).unwrap();
        let ann = rect_annulus(&p, &prof, DEFAULT_BITS).unwrap().shape;
        let parts = rect_annulus_decompose(&p, &prof, DEFAULT_BITS).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for part in &parts {
            let x = sample_interior(&part.shape, &mut rng, 10_000).unwrap();
            prop_assert!(ann.contains(&x).unwrap(), "{:?} outside", x);
        }
    }

    #[test]
    fn rect_annulus_is_mirror_symmetric(
        x in prop::collection::vec(0i64..=64, 2),
        qq in 1u64..=4,
    ) {
        let prof = ExponentProfile::new(vec![qi(1), qi(2)], vec![qi(1), qi(1)]).unwrap();
        let p = RationalPoint::new(vec![0, qq], qq).unwrap();
        let shape = rect_annulus(&p, &prof, DEFAULT_BITS).unwrap().shape;
        let c = p.coords();
        let pt: Vec<Q> = x.iter().map(|&k| q(k, 64)).collect();
        let mirrored: Vec<Q> = pt.iter().zip(&c).map(|(v, ci)| qi(2) * ci - v).collect();
        prop_assert_eq!(shape.membership(&pt).unwrap(), shape.membership(&mirrored).unwrap());
    }

    #[test]
    fn norm_balls_are_nested(x in prop::collection::vec(0i64..=256, 3), qq in 1u64..=3) {
        let p = RationalPoint::origin(3, qq).unwrap();
        let tp = qi(1);
        let pt: Vec<Q> = x.iter().map(|&k| q(k, 256)).collect();
        let l1 = ball(&p, &tp, Norm::l1(), DEFAULT_BITS).unwrap().shape;
        let l2 = ball(&p, &tp, Norm::l2(), DEFAULT_BITS).unwrap().shape;
        let max = ball(&p, &tp, Norm::Max, DEFAULT_BITS).unwrap().shape;
        if l1.contains(&pt).unwrap() {
            prop_assert!(l2.contains(&pt).unwrap());
        }
        if l2.contains(&pt).unwrap() {
            prop_assert!(max.contains(&pt).unwrap());
        }
    }

    #[test]
    fn stream_length_matches_count(n in 1usize..=3, lo in 1u64..=4, span in 0u64..=3, coprime in any::<bool>()) {
        let prof = ExponentProfile::isotropic(n, qi(1), qi(1)).unwrap();
        let spec = FamilySpec::new(FamilyKind::Annulus, prof, None).unwrap();
        let hi = lo + span;
        let all = stream(&spec, lo, hi).unwrap().count() as u64;
        prop_assert_eq!(all, count(n, lo, hi).unwrap());
        let prim = stream(&spec.clone().coprime(coprime), lo, hi).unwrap().count() as u64;
        prop_assert!(prim <= all);
    }

    #[test]
    fn records_round_trip_through_json(
        tp in prop::collection::vec(eighths(24), 2),
        tf in prop::collection::vec(eighths(24), 2),
        qq in 1u64..=9,
    ) {
        let prof = ExponentProfile::new(tp, tf).unwrap();
        let p = RationalPoint::new(vec![0, qq / 2], qq).unwrap();
        for rec in std::iter::once(rect_annulus(&p, &prof, DEFAULT_BITS).unwrap())
            .chain(rect_annulus_decompose(&p, &prof, DEFAULT_BITS).unwrap())
        {
            let back = record_from_json(&record_to_json(&rec)).unwrap();
            prop_assert_eq!(back, rec);
        }
    }
}
