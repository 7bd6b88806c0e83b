//! Subsets of the atom set `[n]` packed into bit masks.
//!
//! Atom `i` (1-based) lives in bit `i - 1`. The universe size travels with the
//! mask so that complements are well defined.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest supported atom count.
pub const MAX_ATOMS: usize = 16;

#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Subset {
    mask: u32,
    n: u8,
}

/// All-ones mask over `n` atoms.
#[inline]
pub fn full_mask(n: usize) -> u32 {
    ((1u64 << n) - 1) as u32
}

pub(crate) fn check_atoms(n: usize) -> Result<()> {
    if (1..=MAX_ATOMS).contains(&n) {
        Ok(())
    } else {
        Err(Error::AtomCount(n))
    }
}

/// Iterates every submask of `mask`, including `0` and `mask` itself.
pub fn submasks(mask: u32) -> impl Iterator<Item = u32> {
    let mut next = Some(mask);
    std::iter::from_fn(move || {
        let cur = next?;
        next = if cur == 0 {
            None
        } else {
            Some((cur - 1) & mask)
        };
        Some(cur)
    })
}

/// 1-based atoms contained in `mask`, ascending.
pub fn mask_atoms(mask: u32) -> Vec<usize> {
    (0..32)
        .filter(|i| mask >> i & 1 == 1)
        .map(|i| i + 1)
        .collect()
}

impl Subset {
    pub fn new(mask: u32, n: usize) -> Result<Self> {
        check_atoms(n)?;
        if mask > full_mask(n) {
            return Err(Error::MaskRange { mask, n });
        }
        Ok(Subset { mask, n: n as u8 })
    }

    /// Builds a subset from 1-based atom labels.
    pub fn from_atoms(atoms: &[usize], n: usize) -> Result<Self> {
        check_atoms(n)?;
        let mut mask = 0u32;
        for &a in atoms {
            if a == 0 || a > n {
                return Err(Error::Parse(format!("atom {a} outside 1..={n}")));
            }
            mask |= 1 << (a - 1);
        }
        Ok(Subset { mask, n: n as u8 })
    }

    pub(crate) fn from_raw(mask: u32, n: usize) -> Self {
        debug_assert!(mask <= full_mask(n));
        Subset { mask, n: n as u8 }
    }

    pub fn empty(n: usize) -> Result<Self> {
        Subset::new(0, n)
    }

    pub fn full(n: usize) -> Result<Self> {
        Subset::new(full_mask(n), n)
    }

    pub fn mask(&self) -> u32 {
        self.mask
    }

    pub fn n(&self) -> usize {
        self.n as usize
    }

    pub fn len(&self) -> usize {
        self.mask.count_ones() as usize
    }

    pub fn is_empty(&self) -> bool {
        self.mask == 0
    }

    pub fn contains(&self, atom: usize) -> bool {
        atom >= 1 && atom <= self.n() && self.mask >> (atom - 1) & 1 == 1
    }

    pub fn atoms(&self) -> Vec<usize> {
        mask_atoms(self.mask)
    }

    pub fn union(&self, other: &Subset) -> Subset {
        debug_assert_eq!(self.n, other.n);
        Subset {
            mask: self.mask | other.mask,
            n: self.n,
        }
    }

    pub fn intersection(&self, other: &Subset) -> Subset {
        debug_assert_eq!(self.n, other.n);
        Subset {
            mask: self.mask & other.mask,
            n: self.n,
        }
    }

    pub fn difference(&self, other: &Subset) -> Subset {
        debug_assert_eq!(self.n, other.n);
        Subset {
            mask: self.mask & !other.mask,
            n: self.n,
        }
    }

    pub fn complement(&self) -> Subset {
        Subset {
            mask: !self.mask & full_mask(self.n()),
            n: self.n,
        }
    }

    pub fn is_disjoint(&self, other: &Subset) -> bool {
        self.mask & other.mask == 0
    }
}

impl fmt::Debug for Subset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (k, a) in self.atoms().iter().enumerate() {
            if k > 0 {
                write!(f, ",")?;
            }
            write!(f, "{a}")?;
        }
        write!(f, "}}")
    }
}

/// Order-file token: ascending comma-separated atoms, `-` for the empty set.
impl fmt::Display for Subset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.mask == 0 {
            return write!(f, "-");
        }
        let atoms: Vec<String> = self.atoms().iter().map(|a| a.to_string()).collect();
        write!(f, "{}", atoms.join(","))
    }
}

/// Parses an order-file token back into a mask.
pub(crate) fn parse_token(token: &str, n: usize) -> Result<u32> {
    let token = token.trim();
    if token == "-" {
        return Ok(0);
    }
    let mut mask = 0u32;
    let mut last = 0usize;
    for part in token.split(',') {
        let a: usize = part
            .trim()
            .parse()
            .map_err(|_| Error::Parse(format!("bad atom `{part}` in `{token}`")))?;
        if a == 0 || a > n {
            return Err(Error::Parse(format!("atom {a} outside 1..={n}")));
        }
        if a <= last {
            return Err(Error::Parse(format!("atoms not ascending in `{token}`")));
        }
        last = a;
        mask |= 1 << (a - 1);
    }
    Ok(mask)
}
