//! The explicit construction at exponents strictly inside the admissible
//! range, where both bounds are expected to hold.

mod common;

use ffda::construct::{build_theta, build_xi, theta_avoids_lattice, verify_lower, verify_upper, GrowthSpec, Nu, Omega, ThetaBuild};
use ffda::Field;
use num_rational::Ratio;

fn spec(w: (i64, i64), v: (i64, i64)) -> GrowthSpec {
    GrowthSpec::new(Omega::Finite(Ratio::new(w.0, w.1)), Nu::Finite(Ratio::new(v.0, v.1))).unwrap()
}

fn deepest_materialized(s: GrowthSpec, f: &Field) -> ThetaBuild {
    (3..=10)
        .rev()
        .filter_map(|l| build_theta(build_xi(s, l, f).ok()?, f).ok())
        .find(|tb| tb.materialized())
        .expect("some shallow build is materialized")
}

/// `(ω, ν)` as `(numerator, denominator)` pairs.
type Pair = ((i64, i64), (i64, i64));

const INTERIOR: &[Pair] = &[((2, 1), (1, 1)), ((3, 1), (1, 1)), ((3, 1), (1, 2)), ((2, 1), (3, 2)), ((5, 2), (2, 3))];

#[test]
fn upper_chain_and_measured_distance() {
    for q in [2u32, 3] {
        let f = common::field(q);
        for &(w, v) in INTERIOR {
            let mut tb = deepest_materialized(spec(w, v), &f);
            let levels = tb.xi.levels;
            for n in 1..levels - 1 {
                let rep = verify_upper(&mut tb, n, &f);
                assert!(rep.status.passed(), "q={q} ω={w:?} ν={v:?} n={n}: {rep:?}");
                assert_eq!(rep.measured, Some(rep.dist_exp), "q={q} ω={w:?} ν={v:?} n={n}");
            }
        }
    }
}

#[test]
fn lower_bound_at_small_heights() {
    let f = common::field(2);
    for &(w, v) in INTERIOR {
        let tb = deepest_materialized(spec(w, v), &f);
        let mut checked = 0;
        for n in 1..tb.xi.levels {
            if tb.deg_v(n) > 12 {
                break;
            }
            let rep = verify_lower(&tb, n, &f).unwrap();
            // u_n = A_(n+1) makes u_(n-1) D_(n-1) + u_n D_n telescope, so a
            // failure is admissible only under that rounding coincidence
            let coincident = tb.u_degrees[n] == tb.xi.degrees[n + 1] - tb.xi.degrees[n];
            assert!(rep.status.passed() || coincident, "ω={w:?} ν={v:?} n={n}: {rep:?}");
            checked += 1;
        }
        assert!(checked >= 2, "ω={w:?} ν={v:?}: only {checked} lower checks");
        assert!(theta_avoids_lattice(&tb, 8, &f).unwrap().passed(), "ω={w:?} ν={v:?}");
    }
}

#[test]
fn infinite_branch_upper_in_identity_mode() {
    let f = common::field(2);
    for nu in [Nu::Finite(Ratio::from_integer(1)), Nu::Infinite] {
        let s = GrowthSpec::new(Omega::Infinite, nu).unwrap();
        let mut tb = build_theta(build_xi(s, 10, &f).unwrap(), &f).unwrap();
        assert!(!tb.materialized());
        for n in 1..=8 {
            let rep = verify_upper(&mut tb, n, &f);
            assert!(rep.status.passed(), "ν={nu:?} n={n}: {rep:?}");
            assert_eq!(rep.measured, None);
        }
    }
}
