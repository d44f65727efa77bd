use contraction_kit::auxfn::AuxFn;
use contraction_kit::counterexample::{CounterexampleFamily, GammaSchedule};
use contraction_kit::picard::picard_iterate;
use contraction_kit::real::{Rational, Real};
use num_bigint::BigInt;
use proptest::prelude::*;

fn r(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

fn family(t0: Rational) -> CounterexampleFamily {
    let f = AuxFn::step_linear(Real::from_rational(t0.clone()), 1).unwrap();
    CounterexampleFamily::build(f, Real::from_rational(t0)).unwrap()
}

#[test]
fn default_gamma_stays_in_range_up_to_a_million() {
    for t0 in [r(1, 3), r(1, 2), r(1, 1), r(7, 5), r(5, 2)] {
        let fam = family(t0);
        let gap = fam.gap();
        let mut ms: Vec<u64> = (1..=2000).collect();
        ms.extend((1..=100).map(|i| i * 10_000));
        ms.push(999_999);
        for &m in &ms {
            let (g, next) = (fam.gamma(m), fam.gamma(m + 1));
            assert!(g > Rational::from_integer(0.into()) && g < gap, "m={m}");
            assert!(next < g, "m={m}");
        }
    }
}

#[test]
fn geometric_schedules_are_validated() {
    let fam = family(r(1, 1));
    let ok = GammaSchedule::Geometric { first: "0.9".parse().unwrap(), ratio: "0.5".parse().unwrap() };
    assert!(ok.validate(&fam.gap()).is_ok());
    let too_big = GammaSchedule::Geometric { first: "1".parse().unwrap(), ratio: "0.5".parse().unwrap() };
    assert!(too_big.validate(&fam.gap()).is_err());
    let not_shrinking = GammaSchedule::Geometric { first: "0.5".parse().unwrap(), ratio: "1".parse().unwrap() };
    assert!(not_shrinking.validate(&fam.gap()).is_err());
    let f = AuxFn::step_linear(1, 1).unwrap();
    assert!(CounterexampleFamily::build_with(f, 1, Some(too_big)).is_err());
}

#[test]
fn truncation_orbits_reach_zero() {
    let t = family(r(3, 4)).enumerate_points(40).unwrap();
    let zero = t.space.index_of("0").unwrap();
    for x in 0..t.space.len() {
        let trace = picard_iterate(&t.space, &t.map, x, 0.0, 10).unwrap();
        assert!(trace.first_hit(&zero).unwrap() <= 2);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn witnesses_hold_for_any_delta(q in 1i64..40, num in 1i64..1000, den in 1i64..100_000) {
        let fam = family(r(q, 8));
        let delta = r(num, den);
        let w = fam.mk_falsification_witness(Real::from_rational(delta.clone())).unwrap();
        prop_assert!(w.holds());
        prop_assert_eq!(w.d_txy.exact(), fam.t0.exact());
        prop_assert!(fam.gamma(w.n) < delta);
        if w.n > 1 {
            prop_assert!(fam.gamma(w.n - 1) >= delta);
        }
    }
}
