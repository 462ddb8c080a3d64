//! Ostrowski digits on random targets.

mod common;

use common::*;
use ffda::ostrowski::{cylinder_of, decompose_poly, enumerate_prefixes, expand_beta, reconstruct, recompose_poly};
use ffda::NormExp;

#[test]
fn random_targets_round_trip() {
    for (q, seed) in [(2u32, 1u64), (3, 2), (4, 3)] {
        let f = field(q);
        let mut r = rng(seed);
        for mut cf in [all_z(&f), growing(&f)] {
            let depth = 5;
            cf.ensure(depth, &f).unwrap();
            let dq = cf.deg_q(depth) as i64;
            for _ in 0..35 {
                let beta = unit_series(&mut r, 48, &f);
                let digits = expand_beta(&beta, &mut cf, depth, &f).unwrap().digits;
                for (i, s) in digits.iter().enumerate() {
                    assert!(s.deg_or_neg() < cf.a(i + 1).deg().unwrap() as i64);
                }
                let back = reconstruct(&digits, &mut cf, 48, &f).unwrap();
                match beta.sub(&back, &f).norm() {
                    Ok(NormExp::Fin(e)) => assert!(e < -dq, "residual q^{e} above the cylinder radius"),
                    Ok(NormExp::NegInf) | Err(_) => {}
                }
            }
        }
    }
}

#[test]
fn polynomial_digits_are_unique() {
    for q in [2u32, 3] {
        let f = field(q);
        let mut cf = growing(&f);
        cf.ensure(3, &f).unwrap();
        // deg Q_3 = 6: every polynomial below it has exactly one admissible tuple
        let mut seen = std::collections::BTreeSet::new();
        for p in ffda::Poly::all_below(&f, cf.deg_q(3)) {
            let d = decompose_poly(&p, &mut cf, 3, &f).unwrap();
            assert_eq!(recompose_poly(&d, &cf, &f), p);
            assert!(seen.insert(d));
        }
        assert_eq!(seen.len(), enumerate_prefixes(&mut cf, 3, &f).unwrap().len());
    }
}

/// Cylinders of one depth partition the unit ball: every target lies in the
/// cylinder of its own prefix and in no other.
#[test]
fn cylinders_partition() {
    let f = field(2);
    let mut r = rng(9);
    for mut cf in [all_z(&f), growing(&f)] {
        for n in 1..=3 {
            let cyls: Vec<_> = enumerate_prefixes(&mut cf, n, &f).unwrap().iter().map(|p| cylinder_of(p, &mut cf, &f).unwrap()).collect();
            for _ in 0..20 {
                let beta = unit_series(&mut r, 40, &f);
                let own = expand_beta(&beta, &mut cf, n, &f).unwrap().digits;
                let hits: Vec<_> = cyls.iter().filter(|c| c.contains(&beta, &f).unwrap()).collect();
                assert_eq!(hits.len(), 1);
                assert_eq!(hits[0].prefix, own);
            }
        }
    }
}
