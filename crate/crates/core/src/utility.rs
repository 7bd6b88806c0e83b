//! Integer utility vectors and the standard constructions built from them:
//! the binary (lexicographic) utilities, insertion of a new utility into an
//! increasing vector, and the doubled-binary vector with the `q_n` atom that
//! yields Fibonacci many flippable pairs.

use std::fmt;

use num_bigint::BigUint;
use num_traits::{One, Zero};

use crate::bounds::q_value;
use crate::error::{Error, Result};
use crate::subset::{check_atoms, Subset, MAX_ATOMS};

/// Positive integer utilities, one per atom.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct UtilityVector(Vec<BigUint>);

impl UtilityVector {
    pub fn new(entries: Vec<BigUint>) -> Result<Self> {
        check_atoms(entries.len())?;
        if let Some(i) = entries.iter().position(|e| e.is_zero()) {
            return Err(Error::NonPositiveUtility(i + 1));
        }
        Ok(UtilityVector(entries))
    }

    pub fn from_u64(entries: &[u64]) -> Result<Self> {
        UtilityVector::new(entries.iter().map(|&e| BigUint::from(e)).collect())
    }

    pub fn n(&self) -> usize {
        self.0.len()
    }

    pub fn entries(&self) -> &[BigUint] {
        &self.0
    }

    pub fn into_entries(self) -> Vec<BigUint> {
        self.0
    }

    /// `u(A)`, exact.
    pub fn utility(&self, subset: &Subset) -> BigUint {
        subset.atoms().iter().map(|&a| &self.0[a - 1]).sum()
    }

    /// Utilities of every mask `0..2^n`, indexed by mask.
    pub fn subset_sums(&self) -> Vec<BigUint> {
        let size = 1usize << self.n();
        let mut sums = vec![BigUint::zero(); size];
        for mask in 1..size {
            let low = mask.trailing_zeros() as usize;
            sums[mask] = &sums[mask & (mask - 1)] + &self.0[low];
        }
        sums
    }

    /// Multiplies every entry by `c`.
    pub fn scaled(&self, c: &BigUint) -> Result<Self> {
        UtilityVector::new(self.0.iter().map(|e| e * c).collect())
    }

    pub fn is_strictly_increasing(&self) -> bool {
        self.0.windows(2).all(|w| w[0] < w[1])
    }
}

impl fmt::Debug for UtilityVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for UtilityVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|e| e.to_string()).collect();
        write!(f, "({})", parts.join(","))
    }
}

/// `(1, 2, 4, ..., 2^{n-1})`.
pub fn lexicographic_utilities(n: usize) -> Result<UtilityVector> {
    check_atoms(n)?;
    UtilityVector::new((0..n).map(|i| BigUint::one() << i).collect())
}

/// Merges `q` into the strictly increasing vector `u`, keeping it increasing.
///
/// `q` above every entry is allowed and lands last.
pub fn insert_utility(u: &UtilityVector, q: &BigUint) -> Result<UtilityVector> {
    if !u.is_strictly_increasing() {
        return Err(Error::NotSorted);
    }
    if q.is_zero() {
        return Err(Error::NonPositiveUtility(0));
    }
    if u.0.contains(q) {
        return Err(Error::Duplicate(q.to_string()));
    }
    let j = u.0.partition_point(|e| e < q);
    let mut out = u.0.clone();
    out.insert(j, q.clone());
    UtilityVector::new(out)
}

/// `(2ℓ_n, q_n)`: the vector `(2, 4, ..., 2^n)` with
/// `q_n = ((-1)^{n+1} + 2^n) / 3` inserted, giving an order on `n + 1` atoms.
pub fn maclagan_utilities(n: usize) -> Result<UtilityVector> {
    if !(3..MAX_ATOMS).contains(&n) {
        return Err(Error::AtomCount(n));
    }
    let doubled = UtilityVector::new((1..=n).map(|i| BigUint::one() << i).collect())?;
    insert_utility(&doubled, &q_value(n)?.q)
}

/// 1-based atom holding utility `q_n` in [`maclagan_utilities`]`(n)`.
pub fn maclagan_special_atom(n: usize) -> Result<usize> {
    let m = maclagan_utilities(n)?;
    let q = q_value(n)?.q;
    Ok(m.0.iter().position(|e| *e == q).expect("q_n was inserted") + 1)
}
