//! Linear orders on `2^[n]` and the de Finetti check.

use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::subset::{check_atoms, full_mask, parse_token, Subset};
use crate::utility::UtilityVector;

/// A ranking of all `2^n` subsets, smallest first, with its inverse.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct ComparativeOrder {
    n: usize,
    ranked: Vec<u32>,
    position: Vec<u32>,
}

/// Outcome of [`validate_order`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum Validation {
    Valid,
    /// `∅` is not ranked first; `first` is the subset at rank 0.
    EmptyNotFirst {
        first: Vec<usize>,
    },
    /// `lower ∪ context ≺ upper ∪ context` while `upper ≺ lower`.
    DeFinetti {
        lower: Vec<usize>,
        upper: Vec<usize>,
        context: Vec<usize>,
    },
}

impl Validation {
    pub fn is_valid(&self) -> bool {
        matches!(self, Validation::Valid)
    }
}

impl ComparativeOrder {
    /// Builds an order from a ranking of masks. Only the permutation property
    /// is checked here; use [`validate_order`] for the order axioms.
    pub fn from_ranked(n: usize, ranked: Vec<u32>) -> Result<Self> {
        check_atoms(n)?;
        let size = 1usize << n;
        if ranked.len() != size {
            return Err(Error::Parse(format!(
                "expected {size} subsets, found {}",
                ranked.len()
            )));
        }
        let mut position = vec![u32::MAX; size];
        for (rank, &mask) in ranked.iter().enumerate() {
            if mask > full_mask(n) {
                return Err(Error::MaskRange { mask, n });
            }
            if position[mask as usize] != u32::MAX {
                return Err(Error::Parse(format!(
                    "subset {} listed twice",
                    Subset::from_raw(mask, n)
                )));
            }
            position[mask as usize] = rank as u32;
        }
        Ok(ComparativeOrder {
            n,
            ranked,
            position,
        })
    }

    pub(crate) fn from_ranked_unchecked(n: usize, ranked: Vec<u32>) -> Self {
        let mut position = vec![0u32; ranked.len()];
        for (rank, &mask) in ranked.iter().enumerate() {
            position[mask as usize] = rank as u32;
        }
        ComparativeOrder {
            n,
            ranked,
            position,
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.ranked.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ranked.is_empty()
    }

    /// Subset masks from smallest to largest.
    pub fn ranked_masks(&self) -> &[u32] {
        &self.ranked
    }

    /// Rank of every mask, indexed by mask.
    pub fn positions(&self) -> &[u32] {
        &self.position
    }

    pub fn at(&self, rank: usize) -> Subset {
        Subset::from_raw(self.ranked[rank], self.n)
    }

    pub fn rank_of(&self, s: &Subset) -> usize {
        self.position[s.mask() as usize] as usize
    }

    #[inline]
    pub fn rank_of_mask(&self, mask: u32) -> usize {
        self.position[mask as usize] as usize
    }

    /// `a ≺ b`.
    #[inline]
    pub fn precedes(&self, a: u32, b: u32) -> bool {
        self.position[a as usize] < self.position[b as usize]
    }

    pub fn iter(&self) -> impl Iterator<Item = Subset> + '_ {
        self.ranked
            .iter()
            .map(move |&m| Subset::from_raw(m, self.n))
    }

    /// Parses the multi-line order file format: `n`, then one subset per line.
    pub fn parse(text: &str) -> Result<Self> {
        let mut lines = text.lines().map(str::trim).filter(|l| !l.is_empty());
        let n: usize = lines
            .next()
            .ok_or_else(|| Error::Parse("empty order file".into()))?
            .parse()
            .map_err(|_| Error::Parse("first line must be the atom count".into()))?;
        check_atoms(n)?;
        let ranked = lines
            .map(|l| parse_token(l, n))
            .collect::<Result<Vec<_>>>()?;
        Self::checked_with_empty_first(n, ranked)
    }

    /// Parses the single-line variant: subsets separated by `;`.
    pub fn parse_line(n: usize, line: &str) -> Result<Self> {
        check_atoms(n)?;
        let ranked = line
            .trim()
            .split(';')
            .map(|t| parse_token(t, n))
            .collect::<Result<Vec<_>>>()?;
        Self::checked_with_empty_first(n, ranked)
    }

    fn checked_with_empty_first(n: usize, ranked: Vec<u32>) -> Result<Self> {
        let order = Self::from_ranked(n, ranked)?;
        if order.ranked[0] != 0 {
            return Err(Error::Parse("the empty set must be ranked first".into()));
        }
        Ok(order)
    }

    /// Multi-line order file text, newline terminated.
    pub fn to_file_string(&self) -> String {
        let mut out = format!("{}\n", self.n);
        for s in self.iter() {
            out.push_str(&s.to_string());
            out.push('\n');
        }
        out
    }

    pub fn to_line(&self) -> String {
        let parts: Vec<String> = self.iter().map(|s| s.to_string()).collect();
        parts.join(";")
    }

    /// Renames atoms: atom `i` becomes `perm[i - 1]` (both 1-based).
    pub fn relabel(&self, perm: &[usize]) -> ComparativeOrder {
        assert_eq!(perm.len(), self.n);
        let size = 1usize << self.n;
        let mut image = vec![0u32; size];
        for mask in 1..size {
            let low = mask.trailing_zeros() as usize;
            image[mask] = image[mask & (mask - 1)] | 1 << (perm[low] - 1);
        }
        let ranked = self.ranked.iter().map(|&m| image[m as usize]).collect();
        ComparativeOrder::from_ranked_unchecked(self.n, ranked)
    }
}

impl fmt::Debug for ComparativeOrder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ComparativeOrder[{}]({})", self.n, self.to_line())
    }
}

/// Sorts subsets by exact utility. Ties are an error.
pub fn order_from_utilities(u: &UtilityVector) -> Result<ComparativeOrder> {
    let n = u.n();
    let sums = u.subset_sums();
    let mut ranked: Vec<u32> = (0..sums.len() as u32).collect();
    ranked.sort_by(|&a, &b| sums[a as usize].cmp(&sums[b as usize]));
    if let Some(w) = ranked
        .windows(2)
        .find(|w| sums[w[0] as usize] == sums[w[1] as usize])
    {
        let (a, b) = (w[0].min(w[1]), w[0].max(w[1]));
        return Err(Error::Tie {
            a: Subset::from_raw(a, n).atoms(),
            b: Subset::from_raw(b, n).atoms(),
        });
    }
    Ok(ComparativeOrder::from_ranked_unchecked(n, ranked))
}

/// `count` orders from random integer utilities in `1..=2^bits`, seeded.
/// Draws with ties are skipped.
pub fn random_utility_orders(
    n: usize,
    count: usize,
    bits: u32,
    seed: u64,
) -> Result<Vec<ComparativeOrder>> {
    use rand::{Rng, SeedableRng};
    check_atoms(n)?;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let entries: Vec<u64> = (0..n).map(|_| rng.random_range(1..=1u64 << bits)).collect();
        if let Ok(o) = order_from_utilities(&UtilityVector::from_u64(&entries)?) {
            out.push(o);
        }
    }
    Ok(out)
}

/// Checks `∅` first and de Finetti's axiom through the equivalent pairwise
/// form `A ≺ B ⟺ A \ B ≺ B \ A`. Reports the first violation in rank order.
pub fn validate_order(o: &ComparativeOrder) -> Validation {
    let n = o.n();
    if o.ranked[0] != 0 {
        return Validation::EmptyNotFirst {
            first: Subset::from_raw(o.ranked[0], n).atoms(),
        };
    }
    for (i, &a) in o.ranked.iter().enumerate() {
        for &b in &o.ranked[i + 1..] {
            let (lo, hi) = (a & !b, b & !a);
            if !o.precedes(lo, hi) {
                let atoms = |m| Subset::from_raw(m, n).atoms();
                return Validation::DeFinetti {
                    lower: atoms(lo),
                    upper: atoms(hi),
                    context: atoms(a & b),
                };
            }
        }
    }
    Validation::Valid
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::utility::{lexicographic_utilities, maclagan_utilities};

    fn masks(o: &ComparativeOrder) -> Vec<u32> {
        o.ranked_masks().to_vec()
    }

    #[test]
    fn binary_utilities_give_lexicographic_order() {
        let o = order_from_utilities(&UtilityVector::from_u64(&[1, 2, 4]).unwrap()).unwrap();
        assert_eq!(masks(&o), vec![0, 1, 2, 3, 4, 5, 6, 7]);
        for n in 1..=12 {
            let o = order_from_utilities(&lexicographic_utilities(n).unwrap()).unwrap();
            assert!(o
                .ranked_masks()
                .iter()
                .enumerate()
                .all(|(r, &m)| r as u32 == m));
        }
    }

    #[test]
    fn ties_are_rejected() {
        let err = order_from_utilities(&UtilityVector::from_u64(&[1, 1, 2]).unwrap());
        assert_eq!(
            err,
            Err(Error::Tie {
                a: vec![1],
                b: vec![2]
            })
        );
    }

    #[test]
    fn inserted_atom_rank() {
        // sums of (2,4,8,3) sorted: 0,2,3,4,5,...
        let o = order_from_utilities(&UtilityVector::from_u64(&[2, 4, 8, 3]).unwrap()).unwrap();
        let four = Subset::from_atoms(&[4], 4).unwrap();
        assert_eq!(o.rank_of(&four), 2);
        assert_eq!(o.at(1), Subset::from_atoms(&[1], 4).unwrap());
        assert_eq!(o.at(3), Subset::from_atoms(&[2], 4).unwrap());
        assert!(validate_order(&o).is_valid());
    }

    #[test]
    fn swapped_order_fails_validation() {
        // lexicographic n = 3 with {2} and {1,2} exchanged
        let o = ComparativeOrder::from_ranked(3, vec![0, 1, 3, 2, 4, 5, 6, 7]).unwrap();
        assert_eq!(
            validate_order(&o),
            Validation::DeFinetti {
                lower: vec![1],
                upper: vec![],
                context: vec![2]
            }
        );
        let bad = ComparativeOrder::from_ranked(2, vec![1, 0, 2, 3]).unwrap();
        assert_eq!(
            validate_order(&bad),
            Validation::EmptyNotFirst { first: vec![1] }
        );
    }

    #[test]
    fn exhaustive_triple_check_agrees() {
        // brute force over (A, B, C) for every ranking of 8 subsets with ∅ first
        use itertools::Itertools;
        let full = |o: &ComparativeOrder| {
            for a in 0..8u32 {
                for b in 0..8u32 {
                    for c in 0..8u32 {
                        if (a | b) & c != 0 {
                            continue;
                        }
                        if o.precedes(a, b) != o.precedes(a | c, b | c) && a != b {
                            return false;
                        }
                    }
                }
            }
            true
        };
        for perm in (1..8u32).permutations(7).step_by(7) {
            let mut ranked = vec![0];
            ranked.extend(perm);
            let o = ComparativeOrder::from_ranked(3, ranked).unwrap();
            assert_eq!(validate_order(&o).is_valid(), full(&o));
        }
    }

    #[test]
    fn file_round_trip() {
        let o = order_from_utilities(&maclagan_utilities(3).unwrap()).unwrap();
        let text = o.to_file_string();
        assert!(text.starts_with("4\n-\n1\n2\n"));
        assert_eq!(ComparativeOrder::parse(&text).unwrap(), o);
        assert_eq!(ComparativeOrder::parse_line(4, &o.to_line()).unwrap(), o);
    }

    #[test]
    fn parser_rejects_broken_files() {
        assert!(ComparativeOrder::parse("2\n1\n-\n2\n1,2\n").is_err());
        assert!(ComparativeOrder::parse("2\n-\n1\n1\n1,2\n").is_err());
        assert!(ComparativeOrder::parse("2\n-\n1\n2\n").is_err());
        assert!(ComparativeOrder::parse("").is_err());
    }

    #[test]
    fn positions_invert_ranking() {
        let o = order_from_utilities(&maclagan_utilities(6).unwrap()).unwrap();
        for r in 0..o.len() {
            assert_eq!(o.rank_of_mask(o.ranked_masks()[r]), r);
        }
    }
}
