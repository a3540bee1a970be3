mod common;

use common::*;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::sync::OnceLock;
use sympconfig::arith::{rat, Rational};
use sympconfig::bounds::degree_cap;
use sympconfig::configspec::ConfigSpec;
use sympconfig::cremona::{apply_cremona, CremonaError};
use sympconfig::eliminate::{decide, robustness, DecideOptions, Robustness, Verdict};
use sympconfig::enumerate::Assignment;
use sympconfig::lattice::{self, ClassVector, LatticeContext, TwoClass};
use sympconfig::nearness::{build_combinatorial_type, check_isomorphism, normalize_order, types_isomorphic};
use sympconfig::scenarios::{builtin_scenario, SCENARIO_NAMES};

fn config(cases: u32) -> ProptestConfig {
    ProptestConfig { cases, failure_persistence: None, ..ProptestConfig::default() }
}

fn class(n: usize) -> impl Strategy<Value = ClassVector> {
    (-6i64..8, prop::collection::vec(-4i64..5, n)).prop_map(|(a, b)| ClassVector::from_i64(a, &b))
}

fn two_class(n: usize) -> BoxedStrategy<TwoClass> {
    let ee = Just((1..=n).collect::<Vec<_>>()).prop_shuffle().prop_map(|v| TwoClass::EE(v[0], v[1]));
    if n < 3 {
        return ee.boxed();
    }
    let heee = Just((1..=n).collect::<Vec<_>>())
        .prop_shuffle()
        .prop_map(|v| TwoClass::HEEE(v[0], v[1], v[2]));
    prop_oneof![ee, heee].boxed()
}

fn reflection_case() -> impl Strategy<Value = (ClassVector, ClassVector, TwoClass)> {
    (2usize..=10).prop_flat_map(|n| (class(n), class(n), two_class(n)))
}

fn column_perm(n: usize) -> impl Strategy<Value = Vec<usize>> {
    Just((0..n).collect::<Vec<_>>()).prop_shuffle()
}

proptest! {
    #![proptest_config(config(512))]

    #[test]
    fn reflection_is_an_involutive_isometry_fixing_k((x, y, g) in reflection_case()) {
        let n = x.n();
        let rx = lattice::reflect(&g, &x).unwrap();
        let ry = lattice::reflect(&g, &y).unwrap();
        prop_assert_eq!(lattice::reflect(&g, &rx).unwrap(), x.clone());
        prop_assert_eq!(lattice::pair(&rx, &ry).unwrap(), lattice::pair(&x, &y).unwrap());
        let k = LatticeContext::new(n).canonical_class();
        prop_assert_eq!(lattice::reflect(&g, &k).unwrap(), k);
        prop_assert_eq!(lattice::virtual_genus(&rx), lattice::virtual_genus(&x));
    }

    #[test]
    fn reflection_matches_the_coordinate_formula(x in class(8), g in two_class(8)) {
        if let TwoClass::HEEE(r, s, t) = g {
            let want = reflect_heee(&small(&x), r, s, t);
            prop_assert_eq!(small(&lattice::reflect(&g, &x).unwrap()), want);
        }
    }

    #[test]
    fn light_cone_is_nonnegative_on_c_lambda(seed in any::<u64>(), n in 3usize..=9) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let l = sample_c_lambda(&mut rng, n);
        prop_assert!(in_c_lambda(&l));
        let q = lorentz(&l);
        prop_assert!(q >= Rational::from_integer(0.into()));
        if q == Rational::from_integer(0.into()) {
            prop_assert!(n == 9 && on_monotone_ray(&l));
        }
    }
}

fn verdict_kind(v: &Verdict) -> &'static str {
    match v {
        Verdict::Eliminated { .. } => "eliminated",
        Verdict::Realizable { .. } => "realizable",
        Verdict::LinearFeasibleQuadUndecided { .. } => "undecided",
    }
}

proptest! {
    #![proptest_config(config(24))]

    /// Relabeling the E-classes never changes whether δ is realizable.
    #[test]
    fn verdicts_are_invariant_under_column_relabeling(
        perm in column_perm(7),
        delta in prop::collection::vec(1i64..12, 7),
    ) {
        let a = fano();
        let d: Vec<Rational> = delta.iter().map(|&x| rat(x, 1)).collect();
        let opts = DecideOptions::default();
        let v1 = decide(&a, 7, &d, &opts).unwrap();
        let v2 = decide(&a.relabeled(&perm), 7, &d, &opts).unwrap();
        prop_assert_eq!(verdict_kind(&v1), verdict_kind(&v2));
    }

    /// A certificate survives scaling and a consistent relabeling.
    #[test]
    fn robust_certificates_are_stable(perm in column_perm(12), scale in 1i64..20, den in 1i64..7) {
        let (a, x) = robust_pair();
        let c = rat(scale, den);
        let scaled: Vec<Rational> = x.iter().map(|v| v * &c).collect();
        let opts = DecideOptions::default();
        let ok = |r: Robustness| matches!(r, Robustness::RobustCertified { .. });
        prop_assert!(ok(robustness(a, 12, Some(&scaled), &opts).unwrap()));
        let mut moved = vec![x[0].clone()];
        moved.extend(permute(&x[1..], &perm));
        prop_assert!(ok(robustness(&a.relabeled(&perm), 12, Some(&moved), &opts).unwrap()));
    }

    /// Relabeling the E-classes and components, then restoring positivity,
    /// leaves the combinatorial type unchanged up to isomorphism.
    #[test]
    fn types_survive_relabeling(which in 0usize..3, cols in column_perm(8), rows in column_perm(7)) {
        let name = ["def110", "d2Extended8", "fanoExtended8"][which];
        let s = builtin_scenario(name).unwrap();
        let a = s.assignment.unwrap();
        let t = build_combinatorial_type(&a, 8).unwrap();
        let moved = permute(&a.relabeled(&cols).vectors, &rows);
        let (b, _) = normalize_order(&moved).unwrap();
        let u = build_combinatorial_type(&b, 8).unwrap();
        let w = types_isomorphic(&t, &u).unwrap();
        prop_assert!(w.is_some());
        prop_assert!(check_isomorphism(&t, &u, &w.unwrap()));
    }
}

/// nineNeg3N12 and the null-space vector found by search mode.
fn robust_pair() -> (&'static Assignment, &'static Vec<Rational>) {
    static CELL: OnceLock<(Assignment, Vec<Rational>)> = OnceLock::new();
    let (a, x) = CELL.get_or_init(|| {
        let a = builtin_scenario("nineNeg3N12").unwrap().assignment.unwrap();
        match robustness(&a, 12, None, &DecideOptions::default()).unwrap() {
            Robustness::RobustCertified { x, .. } => (a, x),
            other => panic!("search mode found no certificate: {other:?}"),
        }
    });
    (a, x)
}

#[test]
fn search_and_check_modes_agree() {
    let (a, x) = robust_pair();
    let opts = DecideOptions::default();
    assert!(matches!(robustness(a, 12, Some(x), &opts).unwrap(), Robustness::RobustCertified { .. }));
    // The fano7 null space has no interior point with q > 0.
    let f = fano();
    assert!(!matches!(robustness(&f, 7, None, &opts).unwrap(), Robustness::RobustCertified { .. }));
}

#[test]
fn degree_caps_leave_no_gap() {
    for alpha in -3..=7 {
        for g in 0..=3 {
            for n in 1..=9 {
                let Some(c) = degree_cap(alpha, g, n) else { continue };
                let found = classes_with(alpha, g, n, c + 1..=c + 3);
                assert!(found.is_empty(), "α={alpha} g={g} N={n} cap {c}: {found:?}");
            }
        }
    }
}

#[test]
fn caps_are_attained_where_expected() {
    // The exceptional class 6H - 3E1 - 2E2 - ... - 2E8 sits under the N = 8 cap.
    assert!(classes_with(1, 0, 8, 6..=6).contains(&(6, vec![3, 2, 2, 2, 2, 2, 2, 2])));
    // A cubic through seven points with a node at one of them.
    assert!(classes_with(1, 0, 7, 3..=3).contains(&(3, vec![2, 1, 1, 1, 1, 1, 1])));
}

/// Every reflection that goes through keeps squares, genera and
/// intersections, and the output type satisfies Bezout.
#[test]
fn cremona_preserves_the_configuration_on_every_scenario() {
    let mut applied = 0;
    for name in SCENARIO_NAMES {
        let s = builtin_scenario(name).unwrap();
        let Some(a) = &s.assignment else { continue };
        let n = s.n();
        let want = invariants(a);
        for r in 1..=n {
            for t1 in r + 1..=n {
                for t2 in t1 + 1..=n {
                    match apply_cremona(a, &s.spec, r, t1, t2, true) {
                        Ok(rep) => {
                            applied += 1;
                            assert_eq!(invariants(&rep.reflected), want, "{name} ({r},{t1},{t2})");
                            assert_bezout(&rep.output, n);
                        }
                        Err(CremonaError::Invariance(e)) => panic!("{name} ({r},{t1},{t2}): {e}"),
                        Err(_) => {}
                    }
                }
            }
        }
    }
    assert!(applied > 0);
}

fn assert_bezout(a: &Assignment, n: usize) {
    let t = build_combinatorial_type(a, n).unwrap();
    let roots = t.forest.roots();
    for p in 0..t.components.len() {
        for q in p + 1..t.components.len() {
            let local: i64 = roots.iter().map(|&r| t.local_multiplicity(p, q, r)).sum();
            let (x, y) = (small(&a.vectors[t.components[p].component - 1]), small(&a.vectors[t.components[q].component - 1]));
            assert!(t.residuals[p][q] >= 0);
            assert_eq!(local + t.residuals[p][q], x.0 * y.0);
            assert_eq!(t.residuals[p][q], dot(&x, &y));
        }
    }
}

#[test]
fn bezout_on_every_scenario() {
    for name in SCENARIO_NAMES {
        let s = builtin_scenario(name).unwrap();
        if let Some(a) = &s.assignment {
            assert_bezout(a, s.n());
        }
    }
}

#[test]
fn disjoint_spec_matches_fixture() {
    assert_eq!(builtin_scenario("fano7").unwrap().spec, ConfigSpec::disjoint(7, 7, -2, 0));
}
