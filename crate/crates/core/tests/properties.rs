//! Randomized laws. Where the acceptance suite pins named values, these
//! tests throw generated inputs at the algebra and insist the structural
//! invariants never bend: field laws for the exact numbers, the three
//! staircase rules on unfolded systems, involution/duality symmetries, and
//! byte-stable wire forms.

use pgn_core::builder::{chain, validate_division_seq, SelfSimilarSeed};
use pgn_core::exactnum::Rational;
use pgn_core::invariants::{chi_pair_at, chi_pair_backwards, chi_pair_periodic};
use pgn_core::nsystem::NSystem;
use pgn_core::search::Pattern;
use pgn_core::verify::check_global_bounds;
use proptest::prelude::*;

const PAIRS: [(usize, usize); 10] =
    [(1, 3), (2, 3), (1, 4), (2, 4), (3, 4), (2, 5), (3, 5), (1, 6), (3, 6), (5, 6)];

fn int(v: i64) -> Rational {
    Rational::from_int(v)
}

fn rational() -> impl Strategy<Value = Rational> {
    (-1000i64..1000, 1i64..60).prop_map(|(num, den)| Rational::new(num, den).unwrap())
}

/// A strictly increasing prescription with the tie at `m`, closed by the
/// smallest admissible wrap ratio (possibly stretched). Mirrors the cheap
/// flavour of the audit-suite generator, but driven by shrinkable draws.
fn prescription(
    m: usize,
    n: usize,
    start: i64,
    gaps: &[i64],
    denom: i64,
    stretch: usize,
) -> SelfSimilarSeed {
    let mut v = vec![int(start)];
    for j in 1..n {
        let gap = if j == m { 0 } else { gaps[j - 1] };
        v.push(&v[j - 1] + &int(gap));
    }
    let denom = int(denom);
    let v: Vec<Rational> = v.into_iter().map(|c| c / &denom).collect();
    let mut rho = Rational::one();
    for j in 1..n {
        rho = rho.max(&v[j] / &v[j - 1]);
    }
    if rho == Rational::one() {
        rho = int(2);
    }
    let stretch = [int(1), Rational::new(3, 2).unwrap(), int(2)][stretch].clone();
    SelfSimilarSeed::new(m, rho * stretch, vec![v]).expect("a scaled single point always chains")
}

fn seed_strategy() -> impl Strategy<Value = SelfSimilarSeed> {
    (0..PAIRS.len(), 1i64..=6, prop::collection::vec(1i64..=6, 5), 1i64..=4, 0..3usize)
        .prop_map(|(pi, start, gaps, denom, stretch)| {
            let (m, n) = PAIRS[pi];
            prescription(m, n, start, &gaps, denom, stretch)
        })
}

fn pattern_strategy() -> impl Strategy<Value = Pattern> {
    (0..PAIRS.len()).prop_flat_map(|pi| {
        let (m, n) = PAIRS[pi];
        prop::collection::vec((1..=m, m + 1..=n), 1..=4)
            .prop_map(move |ranges| Pattern::new(m, n, ranges).unwrap())
    })
}

/// The three staircase rules, replayed from raw evaluations: sorted
/// components summing to `q` at every breakpoint, and exactly one component
/// rising with slope 1 on every linear piece.
fn assert_staircase(sys: &NSystem) {
    let qs: Vec<Rational> = sys.breakpoints().cloned().collect();
    for q in &qs {
        let v = sys.evaluate(q).unwrap();
        for j in 1..v.len() {
            assert!(v[j - 1] <= v[j], "components out of order at q = {q}");
        }
        assert_eq!(v.iter().sum::<Rational>(), *q, "components must sum to q at q = {q}");
    }
    for w in qs.windows(2) {
        let (a, b) = (&w[0], &w[1]);
        let va = sys.evaluate(a).unwrap();
        let vb = sys.evaluate(b).unwrap();
        let diffs: Vec<Rational> = va.iter().zip(&vb).map(|(x, y)| y - x).collect();
        assert!(diffs.iter().all(|d| !d.is_negative()), "a component fell on [{a}, {b}]");
        assert_eq!(diffs.iter().filter(|d| d.is_positive()).count(), 1, "one riser on [{a}, {b}]");
        assert_eq!(diffs.iter().sum::<Rational>(), b - a, "the riser has slope 1 on [{a}, {b}]");

        // interior of the piece is the straight line between the endpoints
        let mid = &(a + b) / &int(2);
        let vm = sys.evaluate(&mid).unwrap();
        for j in 0..va.len() {
            assert_eq!(&(&va[j] + &vb[j]) / &int(2), vm[j], "kink inside a piece at index {j}");
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn rational_field_laws(a in rational(), b in rational(), c in rational()) {
        prop_assert_eq!(&a + &b, &b + &a);
        prop_assert_eq!(&(&a + &b) + &c, &a + &(&b + &c));
        prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
        prop_assert_eq!(&a + &(-&a), Rational::zero());
        if !b.is_zero() {
            prop_assert_eq!(&(&a / &b) * &b, a.clone());
        }
    }

    #[test]
    fn rational_text_and_json_round_trip(a in rational()) {
        prop_assert_eq!(a.to_string().parse::<Rational>().unwrap(), a.clone());
        let json = serde_json::to_string(&a).unwrap();
        prop_assert_eq!(serde_json::from_str::<Rational>(&json).unwrap(), a);
    }

    #[test]
    fn pattern_text_round_trip(p in pattern_strategy()) {
        let reparsed = Pattern::parse(&p.to_string(), p.m(), p.n()).unwrap();
        prop_assert_eq!(reparsed, p);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn unfolded_systems_satisfy_the_three_rules(
        seed in seed_strategy(),
        periods in 1usize..=2,
    ) {
        let sys = seed.unfold(periods).unwrap();
        assert_staircase(&sys);
    }

    #[test]
    fn opposite_is_a_rule_preserving_involution(seed in seed_strategy()) {
        let sys = seed.unfold(1).unwrap();
        let opp = sys.opposite();
        assert_staircase(&opp);
        prop_assert_eq!(opp.opposite(), sys);
    }

    #[test]
    fn wire_forms_round_trip(seed in seed_strategy()) {
        let json = serde_json::to_string(&seed).unwrap();
        prop_assert_eq!(serde_json::from_str::<SelfSimilarSeed>(&json).unwrap(), seed.clone());

        let sys = seed.unfold(1).unwrap();
        let json = serde_json::to_string(&sys).unwrap();
        prop_assert_eq!(serde_json::from_str::<NSystem>(&json).unwrap(), sys);
    }

    #[test]
    fn backwards_trace_agrees_with_the_direct_pair(seed in seed_strategy()) {
        let pair = chi_pair_backwards(&seed, seed.n() - seed.m()).unwrap();
        prop_assert_eq!(pair, chi_pair_periodic(&seed));
        for level in 1..seed.n() {
            prop_assert!(chi_pair_at(&seed, level).is_ok(), "level {} must be ordered", level);
        }
    }

    #[test]
    fn global_bounds_hold_on_prescriptions(seed in seed_strategy()) {
        let report = check_global_bounds(&seed);
        prop_assert!(report.passed(), "{:?}", report.violations());
    }

    #[test]
    fn division_sequences_round_trip_their_anchors(seed in seed_strategy()) {
        let m = seed.m();
        let points = seed.unfolded_points(1);
        let seq = validate_division_seq(&points, m).unwrap();

        for (point, anchor) in seq.points.iter().zip(&seq.anchors) {
            prop_assert_eq!(&point.iter().sum::<Rational>(), anchor);
            prop_assert_eq!(&point[m - 1], &point[m], "prescriptions tie at the level");
        }
        for w in seq.anchors.windows(2) {
            prop_assert!(w[0] < w[1], "anchors must increase strictly");
        }

        let sys = chain(&seq).unwrap();
        prop_assert_eq!(sys.division_numbers(m).unwrap().numbers(), seq.anchors);
    }
}
