use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use proptest::prelude::*;
use subspace_lab::arith::{abs_value, int, rat, NfElem, Place};
use subspace_lab::filtration::{exceptional_subspace, mu, nu_v, vojta_closure, DEFAULT_CLOSURE_CAP};
use subspace_lab::linalg::{det, Subspace};
use subspace_lab::systems::{ensure_valid, FormSystem, PlaceBlock};
use subspace_lab::Rational;

fn matrix(n: usize) -> impl Strategy<Value = Vec<Vec<i64>>> {
    prop::collection::vec(prop::collection::vec(-2i64..=2, n), n)
        .prop_filter("invertible", |m| !det(&to_rational(m)).is_zero())
}

fn to_rational(m: &[Vec<i64>]) -> Vec<Vec<Rational>> {
    m.iter().map(|r| r.iter().map(|&c| int(c)).collect()).collect()
}

fn to_forms(m: &[Vec<i64>]) -> Vec<Vec<NfElem>> {
    m.iter().map(|r| r.iter().map(|&c| NfElem::integer(c)).collect()).collect()
}

/// A valid system: exponents at ∞ top out at 1, at 2 at 0, and sum to at most `-δ`. The forms at
/// 2 are a permutation of those at ∞, which keeps the closure finite for `n = 3`.
fn random_system() -> impl Strategy<Value = FormSystem> {
    (2usize..=3)
        .prop_flat_map(|n| {
            (
                Just(n),
                matrix(n),
                prop::collection::vec(-8i64..=2, n - 1),
                prop::option::of((Just((0..n).collect::<Vec<usize>>()).prop_shuffle(), prop::collection::vec(-6i64..=0, n - 1))),
                1i64..=4,
            )
        })
        .prop_map(|(n, inf, inf_exp, two, delta_q)| {
            let delta = rat(1, delta_q);
            let mut inf_exps: Vec<Rational> = std::iter::once(int(1)).chain(inf_exp.iter().map(|&e| rat(e, 2))).collect();
            let mut blocks = Vec::new();
            let mut two_block = two.map(|(perm, e)| {
                let m: Vec<Vec<i64>> = perm.iter().map(|&i| inf[i].clone()).collect();
                let exps: Vec<Rational> = std::iter::once(int(0)).chain(e.iter().map(|&c| rat(c, 2))).collect();
                let d = det(&to_rational(&m));
                let a = abs_value(&d, &Place::Prime(BigInt::from(2)));
                // largest power of 1/2 with C^n <= |det|_2
                let mut c = Rational::one();
                while subspace_lab::arith::enclosure::pow_rational(&c, n as i64) > a {
                    c /= int(2);
                }
                PlaceBlock { place: Place::Prime(BigInt::from(2)), forms: to_forms(&m), exponents: exps, constant: c }
            });
            let total: Rational = inf_exps.iter().chain(two_block.iter().flat_map(|b| b.exponents.iter())).sum();
            if total > -&delta {
                inf_exps[n - 1] -= total + &delta;
            }
            blocks.push(PlaceBlock { place: Place::Infinity, forms: to_forms(&inf), exponents: inf_exps, constant: int(1) });
            blocks.extend(two_block.take());
            FormSystem::new(n, delta, None, blocks, None).unwrap()
        })
}

fn rational_rows(forms: &[Vec<NfElem>]) -> Vec<Vec<Rational>> {
    forms.iter().map(|f| f.iter().map(|c| c.as_rational().unwrap()).collect()).collect()
}

/// Least exponent sum over all `dim U`-subsets of forms whose restrictions to `U` are independent.
fn nu_v_oracle(u: &Subspace, block: &PlaceBlock) -> Rational {
    let k = u.dim();
    if k == 0 {
        return Rational::zero();
    }
    let forms = rational_rows(&block.forms);
    let m = forms.len();
    let mut best: Option<Rational> = None;
    for mask in 0u32..1 << m {
        if mask.count_ones() as usize != k {
            continue;
        }
        let chosen: Vec<usize> = (0..m).filter(|i| mask >> i & 1 == 1).collect();
        let restricted: Vec<Vec<Rational>> =
            chosen.iter().map(|&i| u.basis().iter().map(|b| forms[i].iter().zip(b).map(|(x, y)| x * y).sum()).collect()).collect();
        if det(&restricted).is_zero() {
            continue;
        }
        let sum: Rational = chosen.iter().map(|&i| block.exponents[i].clone()).sum();
        if best.as_ref().is_none_or(|b| sum < *b) {
            best = Some(sum);
        }
    }
    best.unwrap()
}

fn subspace(n: usize) -> impl Strategy<Value = Subspace> {
    prop::collection::vec(prop::collection::vec(-3i64..=3, n), 0..n).prop_map(move |rows| Subspace::span(n, &to_rational(&rows)))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn nu_v_is_the_least_independent_sum((sys, u) in random_system().prop_flat_map(|s| { let n = s.n; (Just(s), subspace(n)) })) {
        prop_assert!(ensure_valid(&sys).is_ok());
        for b in &sys.blocks {
            prop_assert_eq!(nu_v(&u, b).unwrap(), nu_v_oracle(&u, b));
        }
    }

    #[test]
    fn exceptional_subspace_characterization(sys in random_system()) {
        let r = exceptional_subspace(&sys).unwrap();
        prop_assert!(r.diagnostics.is_empty(), "{:?}", r.diagnostics);
        for c in &r.candidates {
            prop_assert!(r.mu0 <= c.mu);
        }
        for m in &r.minimizers {
            prop_assert!(r.u0.is_subspace_of(m));
            prop_assert_eq!(mu(m, &sys).unwrap(), r.mu0.clone());
        }
        prop_assert_eq!(mu(&r.u0, &sys).unwrap(), r.mu0.clone());
        prop_assert_eq!(r.semistable, r.u0.is_zero());
        prop_assert!(!r.u0.is_full());
    }

    #[test]
    fn closure_is_idempotent(sys in random_system()) {
        let kernels: Vec<Subspace> = sys
            .blocks
            .iter()
            .flat_map(|b| rational_rows(&b.forms))
            .map(|f| Subspace::kernel(sys.n, &[f]))
            .collect();
        let once = vojta_closure(&kernels, DEFAULT_CLOSURE_CAP).unwrap();
        let twice = vojta_closure(&once, DEFAULT_CLOSURE_CAP).unwrap();
        let a: BTreeSet<_> = once.iter().cloned().collect();
        let b: BTreeSet<_> = twice.iter().cloned().collect();
        prop_assert_eq!(a, b);
        for x in &once {
            for y in &once {
                prop_assert!(once.contains(&x.sum(y)) && once.contains(&x.intersect(y)));
            }
        }
    }
}

/// Four planes in general position in ℚ³ generate infinitely many subspaces.
#[test]
fn closure_of_four_general_planes_hits_the_cap() {
    let planes: Vec<Subspace> = [[1, 0, 0], [0, 1, 0], [0, 0, 1], [1, 1, 1]]
        .iter()
        .map(|f| Subspace::kernel(3, &[f.iter().map(|&c| int(c)).collect()]))
        .collect();
    assert!(matches!(vojta_closure(&planes, 500), Err(subspace_lab::Error::ClosureCap { cap: 500 })));
    assert_eq!(vojta_closure(&planes[..3], 500).unwrap().len(), 8);
}
