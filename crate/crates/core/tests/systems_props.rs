use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_traits::Signed;
use proptest::prelude::*;
use subspace_lab::arith::max_norm;
use subspace_lab::config::parse_form_system;
use subspace_lab::systems::{enumerate_solutions, is_solution, FormSystem};

const SYSTEMS: [&str; 4] = [
    include_str!("../../cli/examples/unit_sum.toml"),
    include_str!("../../cli/examples/line.toml"),
    include_str!("../../cli/examples/two_places.toml"),
    include_str!("../../cli/examples/cubic.toml"),
];

fn system(k: usize) -> FormSystem {
    parse_form_system(SYSTEMS[k]).unwrap()
}

/// Every integer vector in the box, tested one by one.
fn brute_force(sys: &FormSystem, b: i64) -> BTreeSet<Vec<BigInt>> {
    let n = sys.n;
    let mut out = BTreeSet::new();
    let mut x = vec![-b; n];
    loop {
        let v: Vec<BigInt> = x.iter().map(|&c| BigInt::from(c)).collect();
        let first = v.iter().find(|c| c.sign() != num_bigint::Sign::NoSign);
        if first.is_some_and(|c| c.is_positive()) && is_solution(sys, &v).unwrap() {
            out.insert(v);
        }
        let mut i = 0;
        while i < n && x[i] == b {
            x[i] = -b;
            i += 1;
        }
        if i == n {
            return out;
        }
        x[i] += 1;
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn restriction_matches_smaller_bound(k in 0usize..3, small in 1i64..12, extra in 1i64..8) {
        let sys = system(k);
        let big = enumerate_solutions(&sys, &BigInt::from(small + extra)).unwrap();
        let little = enumerate_solutions(&sys, &BigInt::from(small)).unwrap();
        let restricted: Vec<_> = big.solutions.iter().filter(|s| s.height <= BigInt::from(small)).cloned().collect();
        prop_assert_eq!(restricted, little.solutions);
    }

    #[test]
    fn records_are_canonical(k in 0usize..4, b in 1i64..10) {
        let sys = system(k);
        let e = enumerate_solutions(&sys, &BigInt::from(b)).unwrap();
        let mut seen = BTreeSet::new();
        for s in &e.solutions {
            let neg: Vec<BigInt> = s.x.iter().map(|c| -c).collect();
            prop_assert!(!seen.contains(&neg));
            prop_assert!(seen.insert(s.x.clone()));
            prop_assert_eq!(&s.height, &max_norm(&s.x));
            prop_assert!(is_solution(&sys, &s.x).unwrap());
        }
    }
}

#[test]
fn pruned_enumeration_matches_brute_force() {
    for (k, b) in [(0, 5), (1, 9), (2, 9), (3, 4)] {
        let sys = system(k);
        let got: BTreeSet<Vec<BigInt>> = enumerate_solutions(&sys, &BigInt::from(b)).unwrap().solutions.into_iter().map(|s| s.x).collect();
        assert_eq!(got, brute_force(&sys, b), "system {k}");
    }
}
