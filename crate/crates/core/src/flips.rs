//! Critical and flippable pairs, flips, and facet counting through
//! representable flip-neighbours.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::order::ComparativeOrder;
use crate::represent::is_representable;
use crate::subset::{full_mask, submasks, Subset};

/// Disjoint `A ≺ B` on consecutive ranks `rank`, `rank + 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct CriticalPair {
    pub a: Subset,
    pub b: Subset,
    pub rank: usize,
}

/// A critical pair whose every translate `(A ∪ D, B ∪ D)` is adjacent.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct FlippablePair {
    pub base: CriticalPair,
    /// `2^r` with `r = |(A ∪ B)^c|`.
    pub adjacencies: u64,
}

/// JSON form of a flippable pair.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FlippablePairReport {
    #[serde(rename = "A")]
    pub a: Vec<usize>,
    #[serde(rename = "B")]
    pub b: Vec<usize>,
    pub rank: usize,
    pub adjacencies: u64,
}

impl FlippablePair {
    pub fn a(&self) -> Subset {
        self.base.a
    }

    pub fn b(&self) -> Subset {
        self.base.b
    }

    /// Mask of atoms outside `A ∪ B`.
    pub fn free_mask(&self) -> u32 {
        full_mask(self.base.a.n()) & !(self.base.a.mask() | self.base.b.mask())
    }

    pub fn report(&self) -> FlippablePairReport {
        FlippablePairReport {
            a: self.base.a.atoms(),
            b: self.base.b.atoms(),
            rank: self.base.rank,
            adjacencies: self.adjacencies,
        }
    }
}

pub fn critical_pairs(o: &ComparativeOrder) -> Vec<CriticalPair> {
    let n = o.n();
    o.ranked_masks()
        .windows(2)
        .enumerate()
        .filter(|(_, w)| w[0] & w[1] == 0)
        .map(|(rank, w)| CriticalPair {
            a: Subset::from_raw(w[0], n),
            b: Subset::from_raw(w[1], n),
            rank,
        })
        .collect()
}

/// Every `(A ∪ D, B ∪ D)` with `D ⊆ (A ∪ B)^c` sits on consecutive ranks.
pub fn is_flippable(o: &ComparativeOrder, p: &CriticalPair) -> bool {
    let (a, b) = (p.a.mask(), p.b.mask());
    let free = full_mask(o.n()) & !(a | b);
    submasks(free).all(|d| o.rank_of_mask(b | d) == o.rank_of_mask(a | d) + 1)
}

pub fn flippable_pairs(o: &ComparativeOrder) -> Vec<FlippablePair> {
    critical_pairs(o)
        .into_iter()
        .filter(|p| is_flippable(o, p))
        .map(|base| {
            let r = o.n() - base.a.len() - base.b.len();
            FlippablePair {
                base,
                adjacencies: 1 << r,
            }
        })
        .collect()
}

/// Reverses every comparison `A ∪ D ≺ B ∪ D` of a flippable pair.
pub fn flip(o: &ComparativeOrder, p: &FlippablePair) -> Result<ComparativeOrder> {
    if p.base.a.is_empty() {
        return Err(Error::EmptySide);
    }
    if !is_flippable(o, &p.base) || o.rank_of(&p.base.a) != p.base.rank {
        return Err(Error::NotFlippable);
    }
    Ok(flip_unchecked(o, p.base.a.mask(), p.base.b.mask()))
}

pub(crate) fn flip_unchecked(o: &ComparativeOrder, a: u32, b: u32) -> ComparativeOrder {
    let mut ranked = o.ranked_masks().to_vec();
    let free = full_mask(o.n()) & !(a | b);
    for d in submasks(free) {
        let ra = o.rank_of_mask(a | d);
        ranked.swap(ra, ra + 1);
    }
    let flipped = ComparativeOrder::from_ranked_unchecked(o.n(), ranked);
    debug_assert!(o.n() > 8 || crate::order::validate_order(&flipped).is_valid());
    flipped
}

/// One flipped order per flippable pair with nonempty lower side, paired
/// with the pair that produced it.
pub fn neighbors_with_pairs(o: &ComparativeOrder) -> Vec<(FlippablePair, ComparativeOrder)> {
    flippable_pairs(o)
        .into_iter()
        .filter(|p| !p.base.a.is_empty())
        .map(|p| {
            let next = flip_unchecked(o, p.base.a.mask(), p.base.b.mask());
            (p, next)
        })
        .collect()
}

pub fn neighbors(o: &ComparativeOrder) -> Vec<ComparativeOrder> {
    neighbors_with_pairs(o)
        .into_iter()
        .map(|(_, x)| x)
        .collect()
}

/// Whether the pair `(∅, ranked[1])` is flippable.
pub fn bottom_pair_flippable(o: &ComparativeOrder) -> bool {
    let base = CriticalPair {
        a: o.at(0),
        b: o.at(1),
        rank: 0,
    };
    is_flippable(o, &base)
}

/// Number of facets of the region of a representable order: representable
/// flip-neighbours, plus one when `(∅, ranked[1])` is flippable.
pub fn facet_count(o: &ComparativeOrder) -> Result<usize> {
    if !is_representable(o).is_representable() {
        return Err(Error::NotRepresentable);
    }
    let representable = neighbors(o)
        .par_iter()
        .filter(|x| is_representable(x).is_representable())
        .count();
    Ok(representable + usize::from(bottom_pair_flippable(o)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::order::{order_from_utilities, validate_order};
    use crate::utility::{lexicographic_utilities, maclagan_utilities};

    fn lex(n: usize) -> ComparativeOrder {
        order_from_utilities(&lexicographic_utilities(n).unwrap()).unwrap()
    }

    fn mac(n: usize) -> ComparativeOrder {
        order_from_utilities(&maclagan_utilities(n).unwrap()).unwrap()
    }

    fn set(atoms: &[usize], n: usize) -> Subset {
        Subset::from_atoms(atoms, n).unwrap()
    }

    fn pair_atoms(p: &CriticalPair) -> (Vec<usize>, Vec<usize>) {
        (p.a.atoms(), p.b.atoms())
    }

    #[test]
    fn lexicographic_three_critical_pairs() {
        let pairs: Vec<_> = critical_pairs(&lex(3)).iter().map(pair_atoms).collect();
        assert_eq!(
            pairs,
            vec![(vec![], vec![1]), (vec![1], vec![2]), (vec![1, 2], vec![3])]
        );
        let flippable = flippable_pairs(&lex(3));
        assert_eq!(flippable.len(), 3);
        assert_eq!(
            flippable.iter().map(|p| p.adjacencies).collect::<Vec<_>>(),
            vec![4, 2, 1]
        );
    }

    #[test]
    fn lexicographic_four_pairs() {
        let o = lex(4);
        let crit = critical_pairs(&o);
        let find = |a: &[usize], b: &[usize]| {
            *crit
                .iter()
                .find(|p| p.a == set(a, 4) && p.b == set(b, 4))
                .unwrap()
        };
        assert!(is_flippable(&o, &find(&[1], &[2])));
        assert!(is_flippable(&o, &find(&[], &[1])));
    }

    #[test]
    fn empty_set_pair_is_always_critical() {
        for n in 1..=6 {
            let o = lex(n);
            let first = critical_pairs(&o)[0];
            assert!(first.a.is_empty() && first.rank == 0);
        }
    }

    #[test]
    fn central_pair_is_flippable() {
        for o in [lex(4), mac(3), mac(4), mac(6)] {
            let half = o.len() / 2;
            let (a, b) = (o.at(half - 1), o.at(half));
            assert_eq!(a.complement(), b);
            let p = CriticalPair {
                a,
                b,
                rank: half - 1,
            };
            assert!(is_flippable(&o, &p));
        }
    }

    #[test]
    fn flip_lexicographic_three() {
        let o = lex(3);
        let p = flippable_pairs(&o)[1];
        let f = flip(&o, &p).unwrap();
        let expected = ComparativeOrder::parse("3\n-\n2\n1\n1,2\n3\n2,3\n1,3\n1,2,3\n").unwrap();
        assert_eq!(f, expected);
        assert!(validate_order(&f).is_valid());
        let back = flippable_pairs(&f)
            .into_iter()
            .find(|q| q.a() == p.b() && q.b() == p.a())
            .unwrap();
        assert_eq!(flip(&f, &back).unwrap(), o);
        assert_eq!(flip(&o, &flippable_pairs(&o)[0]), Err(Error::EmptySide));
    }

    #[test]
    fn flip_changes_exactly_the_translates() {
        let o = mac(4);
        for (p, f) in neighbors_with_pairs(&o) {
            let changed = (0..o.len()).filter(|&r| o.at(r) != f.at(r)).count() as u64;
            assert_eq!(changed, 2 * p.adjacencies);
        }
    }

    #[test]
    fn neighbor_counts() {
        assert_eq!(neighbors(&lex(3)).len(), 2);
        let o = mac(4);
        let flips = flippable_pairs(&o);
        assert_eq!(flips.len(), 8);
        let eligible = flips.iter().filter(|p| !p.a().is_empty()).count();
        assert_eq!(neighbors(&o).len(), eligible);
        assert_eq!(flippable_pairs(&mac(5)).len(), 13);
    }

    #[test]
    fn neighbors_are_symmetric() {
        let o = mac(4);
        for x in neighbors(&o) {
            assert!(neighbors(&x).contains(&o));
        }
    }

    #[test]
    fn facets_of_known_orders() {
        assert_eq!(facet_count(&lex(3)).unwrap(), 3);
        assert_eq!(facet_count(&mac(4)).unwrap(), 8);
    }

    #[test]
    fn maclagan_critical_gaps_are_one_or_two() {
        let m = maclagan_utilities(3).unwrap();
        let o = order_from_utilities(&m).unwrap();
        for p in critical_pairs(&o) {
            let gap = m.utility(&p.b) - m.utility(&p.a);
            assert!(gap == 1u32.into() || gap == 2u32.into());
        }
    }

    #[test]
    fn report_shape() {
        let p = flippable_pairs(&lex(3))[2];
        let json = serde_json::to_string(&p.report()).unwrap();
        assert_eq!(json, r#"{"A":[1,2],"B":[3],"rank":3,"adjacencies":1}"#);
    }
}
