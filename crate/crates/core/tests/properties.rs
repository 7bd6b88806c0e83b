mod common;

use std::collections::HashSet;

use common::*;
use cpol::bounds::{fibonacci, gh_counts, q_value};
use cpol::enumerate::{canonical_relabel, census_stats, enumerate_orders, is_canonical};
use cpol::flips::{facet_count, flip};
use cpol::represent::random_witness_search;
use cpol::utility::maclagan_special_atom;
use cpol::{
    cone_from_order, find_trading_transform, flippable_pairs, is_representable,
    lexicographic_utilities, maclagan_utilities, neighbors, order_from_utilities, validate_order,
    ComparativeOrder, UtilityVector,
};
use num_bigint::BigUint;
use num_traits::{ToPrimitive, Zero};
use proptest::prelude::*;

fn mac(n: usize) -> (Vec<u128>, ComparativeOrder) {
    let u = fibonacci_construction(n);
    (
        u.clone(),
        order_from_utilities(&maclagan_utilities(n).unwrap()).unwrap(),
    )
}

#[test]
fn binary_utilities_rank_by_mask() {
    for n in 1..=16 {
        let o = order_from_utilities(&lexicographic_utilities(n).unwrap()).unwrap();
        assert!(
            o.ranked_masks()
                .iter()
                .enumerate()
                .all(|(i, &m)| m as usize == i),
            "n = {n}"
        );
    }
}

#[test]
fn construction_gaps_are_one_or_two() {
    for n in 3..=12 {
        let (u, o) = mac(n);
        let s = sums(&u);
        for w in o.ranked_masks().windows(2) {
            let gap = s[w[1] as usize] - s[w[0] as usize];
            assert!(gap == 1 || gap == 2, "n = {n}: gap {gap}");
        }
    }
}

#[test]
fn special_atom_alternates() {
    for n in 3..=12 {
        let (u, o) = mac(n);
        let s = sums(&u);
        let j = 1u32 << (maclagan_special_atom(n).unwrap() - 1);
        assert_eq!(u[maclagan_special_atom(n).unwrap() - 1], q_closed_form(n));
        let r = o.ranked_masks();
        let start = o.rank_of_mask(j);
        let end = r.iter().rposition(|&m| m & j == 0).unwrap();
        assert!(start < end);
        for k in start..end {
            let (a, b) = (r[k], r[k + 1]);
            assert_ne!(a & j == 0, b & j == 0, "n = {n}, ranks {k}, {}", k + 1);
            assert_eq!(s[b as usize] - s[a as usize], 1, "n = {n}, rank {k}");
        }
        assert!(r[end + 1..].iter().all(|&m| m & j != 0));
    }
}

#[test]
fn q_closed_form_agrees_with_recurrence() {
    for n in 3..=64 {
        let q = q_value(n).unwrap();
        let pow = BigUint::from(1u8) << n;
        let expected = if n % 2 == 1 {
            (pow + 1u8) / 3u8
        } else {
            (pow - 1u8) / 3u8
        };
        assert_eq!(q.q, expected, "n = {n}");
    }
    for n in 3..=63 {
        let (a, b) = (q_value(n).unwrap(), q_value(n + 1).unwrap());
        let two = |x: &BigUint| x * 2u8;
        if n % 2 == 1 {
            assert_eq!(b.q_minus, two(&a.q_minus));
            assert_eq!(b.q_plus + 2u8, two(&a.q_plus));
        } else {
            assert_eq!(b.q_minus, two(&a.q_minus) + 2u8);
            assert_eq!(b.q_plus, two(&a.q_plus));
        }
    }
}

#[test]
fn gh_counts_are_fibonacci() {
    for n in 3..=18 {
        let gh = gh_counts(n).unwrap();
        let f = |k| fibonacci(k).to_u128().unwrap();
        let expected = if n % 2 == 1 {
            (f(n), f(n + 1))
        } else {
            (f(n + 1), f(n))
        };
        assert_eq!((gh.g, gh.h), expected, "n = {n}");
        assert_eq!(fib(n), f(n));
    }
}

#[test]
fn census_closed_under_flips() {
    for n in 3..=5 {
        let c = enumerate_orders(n, None).unwrap();
        let index: HashSet<&[u32]> = c.orders.iter().map(|o| o.ranked_masks()).collect();
        for o in &c.orders {
            assert!(validate_order(o).is_valid() && is_canonical(o));
            for x in neighbors(o) {
                let canon = match canonical_relabel(&x) {
                    Some(p) => x.relabel(&p),
                    None => x,
                };
                assert!(index.contains(canon.ranked_masks()));
            }
        }
        let s = census_stats(&c);
        assert!(s.edges_symmetric);
        assert!(s.representable_subgraph_connected);
        assert!(s.facets_max <= s.m, "M(n) ≤ m(n)");
        if n <= 4 {
            assert_eq!(s.representable, s.orders);
        } else {
            assert!(s.representable < s.orders);
        }
    }
}

#[test]
fn facets_never_exceed_flippable_pairs() {
    let c = enumerate_orders(5, None).unwrap();
    for (i, o) in c.orders.iter().enumerate() {
        if c.representable[i] {
            assert!(facet_count(o).unwrap() <= flippable_pairs(o).len());
        } else {
            assert!(facet_count(o).is_err());
        }
    }
}

#[test]
fn no_transform_for_representable_orders() {
    let c = enumerate_orders(5, None).unwrap();
    let mut nonrep_with_transform = 0;
    for (i, o) in c.orders.iter().enumerate() {
        let t = find_trading_transform(o, 4);
        if c.representable[i] {
            assert!(t.is_none(), "{}", o.to_line());
        } else if t.is_some() {
            nonrep_with_transform += 1;
        }
    }
    assert!(nonrep_with_transform > 0);
}

#[test]
fn nonrepresentable_orders_resist_random_utilities() {
    let c = enumerate_orders(5, None).unwrap();
    let nonrep: Vec<_> = (0..c.len())
        .filter(|&i| !c.representable[i])
        .take(5)
        .collect();
    for i in nonrep {
        assert!(random_witness_search(&c.orders[i], 1000, i as u64).is_none());
    }
}

#[test]
fn flips_touch_exactly_the_translates() {
    for n in 3..=8 {
        let (_, o) = mac(n);
        for p in flippable_pairs(&o)
            .into_iter()
            .filter(|p| !p.a().is_empty())
        {
            let x = flip(&o, &p).unwrap();
            let changed = (0..o.len())
                .filter(|&k| o.ranked_masks()[k] != x.ranked_masks()[k])
                .count();
            assert_eq!(changed as u64, 2 * p.adjacencies);
            assert_eq!(x, flip_by_definition(&o, p.a().mask(), p.b().mask()));
        }
    }
}

fn utilities(max_n: usize) -> impl Strategy<Value = Vec<u64>> {
    prop::collection::vec(1u64..1 << 20, 2..=max_n)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn utility_orders_are_valid_and_representable(u in utilities(7)) {
        let uv = UtilityVector::from_u64(&u).unwrap();
        if let Ok(o) = order_from_utilities(&uv) {
            prop_assert!(validate_order(&o).is_valid());
            let positions = o.positions();
            prop_assert!(o.ranked_masks().iter().enumerate().all(|(k, &m)| positions[m as usize] as usize == k));
            let cert = is_representable(&o);
            let w = cert.utilities().unwrap();
            prop_assert_eq!(&order_from_utilities(w).unwrap(), &o);
            let scaled = w.scaled(&BigUint::from(7u8)).unwrap();
            prop_assert_eq!(&order_from_utilities(&scaled).unwrap(), &o);
            prop_assert!(find_trading_transform(&o, 3).is_none());
        }
    }

    #[test]
    fn theorem_two_bijection(u in utilities(8)) {
        let wide: Vec<u128> = u.iter().map(|&x| x as u128).collect();
        if let Some(o) = order_by_sorting(&wide) {
            let flips: HashSet<Tv> = flippable_by_definition(&o).iter().map(|&(a, b)| chi(a, b)).collect();
            let irr: HashSet<Tv> = cpol::irreducible_elements(&cone_from_order(&o).unwrap())
                .iter()
                .map(|v| (v.plus_mask(), v.minus_mask()))
                .collect();
            prop_assert_eq!(&flips, &irr);
            let pairs = flippable_pairs(&o);
            prop_assert_eq!(pairs.len(), flips.len());
            let total: u64 = pairs.iter().map(|p| p.adjacencies).sum();
            prop_assert!(total < 1 << o.n());
        }
    }

    #[test]
    fn cone_cardinality(u in utilities(6)) {
        let wide: Vec<u128> = u.iter().map(|&x| x as u128).collect();
        if let Some(o) = order_by_sorting(&wide) {
            let c = cone_from_order(&o).unwrap();
            prop_assert_eq!(c.len(), (3usize.pow(o.n() as u32) - 1) / 2 + 1);
            prop_assert!(c.check_axioms(true).is_ok());
        }
    }
}

#[test]
fn zero_utility_is_rejected() {
    assert!(UtilityVector::new(vec![BigUint::zero(), BigUint::from(1u8)]).is_err());
}
