//! Oracles shared by the integration tests. They work from definitions only:
//! ranks, utility sums and whole ternary vectors.
#![allow(dead_code)]

use std::collections::HashSet;

use cpol::ComparativeOrder;

pub fn full(n: usize) -> u32 {
    (1u32 << n) - 1
}

/// `(A, B)` on consecutive ranks, disjoint, with `(A ∪ D, B ∪ D)` consecutive
/// for every `D` outside `A ∪ B`.
pub fn flippable_by_definition(o: &ComparativeOrder) -> Vec<(u32, u32)> {
    let n = o.n();
    let r = o.ranked_masks();
    let mut out = Vec::new();
    for w in r.windows(2) {
        let (a, b) = (w[0], w[1]);
        if a & b != 0 {
            continue;
        }
        let free = full(n) & !(a | b);
        let ok = (0..=full(n))
            .filter(|d| d & !free == 0)
            .all(|d| o.rank_of_mask(b | d) == o.rank_of_mask(a | d) + 1);
        if ok {
            out.push((a, b));
        }
    }
    out
}

/// Swaps every translate of a flippable pair with `A ≠ ∅`.
pub fn flip_by_definition(o: &ComparativeOrder, a: u32, b: u32) -> ComparativeOrder {
    let n = o.n();
    let free = full(n) & !(a | b);
    let mut ranked = o.ranked_masks().to_vec();
    for d in (0..=full(n)).filter(|d| d & !free == 0) {
        let (i, j) = (o.rank_of_mask(a | d), o.rank_of_mask(b | d));
        ranked.swap(i, j);
    }
    ComparativeOrder::from_ranked(n, ranked).unwrap()
}

/// Ternary vectors as `(plus, minus)` masks.
pub type Tv = (u32, u32);

pub fn chi(a: u32, b: u32) -> Tv {
    (b & !a, a & !b)
}

/// `{χ(A, B) : A ⪯ B}` over all ordered pairs, not just disjoint ones.
pub fn cone_by_definition(o: &ComparativeOrder) -> HashSet<Tv> {
    let r = o.ranked_masks();
    let mut c = HashSet::new();
    for i in 0..r.len() {
        for j in i..r.len() {
            c.insert(chi(r[i], r[j]));
        }
    }
    c
}

pub fn add(x: Tv, y: Tv) -> Option<Tv> {
    // entries in {-1, 0, 1} stay in range unless both are +1 or both −1
    if x.0 & y.0 != 0 || x.1 & y.1 != 0 {
        return None;
    }
    let plus = (x.0 | y.0) & !(x.1 | y.1);
    let minus = (x.1 | y.1) & !(x.0 | y.0);
    Some((plus, minus))
}

pub fn sub(x: Tv, y: Tv) -> Option<Tv> {
    add(x, (y.1, y.0))
}

/// Nonzero members not expressible as a sum of two nonzero members.
pub fn irreducibles_by_definition(c: &HashSet<Tv>) -> HashSet<Tv> {
    c.iter()
        .copied()
        .filter(|&w| w != (0, 0))
        .filter(|&w| {
            !c.iter()
                .any(|&u| u != (0, 0) && u != w && sub(w, u).is_some_and(|d| c.contains(&d)))
        })
        .collect()
}

/// Subset sums of `u`, masks as indices.
pub fn sums(u: &[u128]) -> Vec<u128> {
    (0..1u32 << u.len())
        .map(|m| (0..u.len()).filter(|i| m >> i & 1 == 1).map(|i| u[i]).sum())
        .collect()
}

/// The order of `u` by sorting subset sums; `None` on a tie.
pub fn order_by_sorting(u: &[u128]) -> Option<ComparativeOrder> {
    let s = sums(u);
    let mut ranked: Vec<u32> = (0..s.len() as u32).collect();
    ranked.sort_by_key(|&m| s[m as usize]);
    if ranked
        .windows(2)
        .any(|w| s[w[0] as usize] == s[w[1] as usize])
    {
        return None;
    }
    Some(ComparativeOrder::from_ranked(u.len(), ranked).unwrap())
}

/// True when `u` ranks every subset exactly as `o` does.
pub fn utilities_reproduce(u: &[u128], o: &ComparativeOrder) -> bool {
    let s = sums(u);
    o.ranked_masks()
        .windows(2)
        .all(|w| s[w[0] as usize] < s[w[1] as usize])
}

/// `(2^n + (−1)^{n+1}) / 3`.
pub fn q_closed_form(n: usize) -> u128 {
    if n % 2 == 1 {
        ((1u128 << n) + 1) / 3
    } else {
        ((1u128 << n) - 1) / 3
    }
}

/// `{2, 4, …, 2^n, q_n}` in increasing order; `q_n` lands on atom `n − 1`.
pub fn fibonacci_construction(n: usize) -> Vec<u128> {
    let mut u: Vec<u128> = (1..=n).map(|i| 1u128 << i).collect();
    u.push(q_closed_form(n));
    u.sort();
    u
}

/// de Finetti in its original form: `A ⪯ B ⟺ A ∪ C ⪯ B ∪ C` for all `C`
/// disjoint from `A ∪ B`, and `∅` strictly first.
pub fn satisfies_de_finetti(o: &ComparativeOrder) -> bool {
    let n = o.n();
    if o.ranked_masks()[0] != 0 {
        return false;
    }
    for a in 0..=full(n) {
        for b in 0..=full(n) {
            for c in 0..=full(n) {
                if c & (a | b) == 0 && o.precedes(a, b) != o.precedes(a | c, b | c) && a != b {
                    return false;
                }
            }
        }
    }
    true
}

pub fn fib(k: usize) -> u128 {
    let (mut a, mut b) = (0u128, 1u128);
    for _ in 0..k {
        (a, b) = (b, a + b);
    }
    a
}
