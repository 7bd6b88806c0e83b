//! Discrete cones in `T^n`, `T = {-1, 0, 1}`, and their irreducible elements.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::order::{validate_order, ComparativeOrder, Validation};
use crate::subset::{full_mask, submasks, Subset};

/// Largest dimension for which cones are materialised.
pub const MAX_CONE_ATOMS: usize = 12;

/// A vector in `{-1, 0, 1}^n` stored as two disjoint masks.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TernaryVector {
    plus: u32,
    minus: u32,
    n: u8,
}

impl TernaryVector {
    pub fn zero(n: usize) -> Self {
        TernaryVector {
            plus: 0,
            minus: 0,
            n: n as u8,
        }
    }

    pub fn basis(i: usize, n: usize) -> Self {
        assert!((1..=n).contains(&i));
        TernaryVector {
            plus: 1 << (i - 1),
            minus: 0,
            n: n as u8,
        }
    }

    pub fn from_entries(entries: &[i8]) -> Result<Self> {
        let n = entries.len();
        let (mut plus, mut minus) = (0u32, 0u32);
        for (i, &e) in entries.iter().enumerate() {
            match e {
                1 => plus |= 1 << i,
                -1 => minus |= 1 << i,
                0 => {}
                _ => return Err(Error::Parse(format!("entry {e} is not ternary"))),
            }
        }
        Ok(TernaryVector {
            plus,
            minus,
            n: n as u8,
        })
    }

    pub(crate) fn from_masks(plus: u32, minus: u32, n: usize) -> Self {
        debug_assert_eq!(plus & minus, 0);
        TernaryVector {
            plus,
            minus,
            n: n as u8,
        }
    }

    pub fn n(&self) -> usize {
        self.n as usize
    }

    pub fn plus_mask(&self) -> u32 {
        self.plus
    }

    pub fn minus_mask(&self) -> u32 {
        self.minus
    }

    pub fn is_zero(&self) -> bool {
        self.plus == 0 && self.minus == 0
    }

    pub fn entries(&self) -> Vec<i8> {
        (0..self.n())
            .map(|i| (self.plus >> i & 1) as i8 - (self.minus >> i & 1) as i8)
            .collect()
    }

    pub fn neg(&self) -> Self {
        TernaryVector {
            plus: self.minus,
            minus: self.plus,
            n: self.n,
        }
    }

    /// `self + other`, or `None` when some entry leaves `T`.
    pub fn checked_add(&self, other: &Self) -> Option<Self> {
        if self.plus & other.plus != 0 || self.minus & other.minus != 0 {
            return None;
        }
        let cancel = (self.plus & other.minus) | (self.minus & other.plus);
        Some(TernaryVector {
            plus: (self.plus | other.plus) & !cancel,
            minus: (self.minus | other.minus) & !cancel,
            n: self.n,
        })
    }

    /// `self - other`, or `None` when some entry leaves `T`.
    pub fn checked_sub(&self, other: &Self) -> Option<Self> {
        self.checked_add(&other.neg())
    }

    /// The subsets `(A, B)` with `χ(A, B) = self`, `A` and `B` disjoint.
    pub fn pair(&self) -> (Subset, Subset) {
        (
            Subset::from_raw(self.minus, self.n()),
            Subset::from_raw(self.plus, self.n()),
        )
    }
}

/// `χ(A, B) = χ_B − χ_A`.
pub fn characteristic_vector(a: &Subset, b: &Subset) -> TernaryVector {
    debug_assert_eq!(a.n(), b.n());
    let (am, bm) = (a.mask(), b.mask());
    TernaryVector::from_masks(bm & !am, am & !bm, a.n())
}

impl fmt::Debug for TernaryVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

/// `-`, `0`, `+` per entry, atom 1 first.
impl fmt::Display for TernaryVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s: String = self
            .entries()
            .iter()
            .map(|e| match e {
                1 => '+',
                -1 => '-',
                _ => '0',
            })
            .collect();
        f.write_str(&s)
    }
}

impl FromStr for TernaryVector {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let entries = s
            .chars()
            .map(|c| match c {
                '+' => Ok(1),
                '-' => Ok(-1),
                '0' => Ok(0),
                _ => Err(Error::Parse(format!("bad ternary symbol `{c}`"))),
            })
            .collect::<Result<Vec<i8>>>()?;
        TernaryVector::from_entries(&entries)
    }
}

/// A discrete cone with constant-time membership.
#[derive(Clone)]
pub struct DiscreteCone {
    n: usize,
    members: Vec<TernaryVector>,
    bits: Vec<u64>,
}

#[inline]
fn key(plus: u32, minus: u32, n: usize) -> usize {
    ((plus as usize) << n) | minus as usize
}

impl DiscreteCone {
    /// Builds a cone from an explicit member list. Fails unless D1–D3 hold.
    pub fn from_members(n: usize, members: Vec<TernaryVector>) -> Result<Self> {
        let cone = Self::assemble(n, members)?;
        cone.check_axioms(true)?;
        Ok(cone)
    }

    fn assemble(n: usize, mut members: Vec<TernaryVector>) -> Result<Self> {
        if n == 0 || n > MAX_CONE_ATOMS {
            return Err(Error::AtomCount(n));
        }
        members.sort();
        members.dedup();
        let mut bits = vec![0u64; (1usize << (2 * n)).div_ceil(64)];
        for v in &members {
            if v.n() != n {
                return Err(Error::Parse("member of the wrong dimension".into()));
            }
            let k = key(v.plus, v.minus, n);
            bits[k / 64] |= 1 << (k % 64);
        }
        Ok(DiscreteCone { n, members, bits })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn members(&self) -> &[TernaryVector] {
        &self.members
    }

    #[inline]
    pub fn contains(&self, v: &TernaryVector) -> bool {
        self.contains_masks(v.plus, v.minus)
    }

    #[inline]
    fn contains_masks(&self, plus: u32, minus: u32) -> bool {
        let k = key(plus, minus, self.n);
        self.bits[k / 64] >> (k % 64) & 1 == 1
    }

    /// Checks D1, D2 and (optionally, `O(|C|²)`) D3.
    pub fn check_axioms(&self, with_d3: bool) -> Result<()> {
        let n = self.n;
        for i in 1..=n {
            if !self.contains(&TernaryVector::basis(i, n)) {
                return Err(Error::ConeAxiom {
                    axiom: "D1",
                    detail: format!("e_{i} missing"),
                });
            }
        }
        // every x ∈ T^n is a disjoint (minus, plus) pair
        for minus in 0..=full_mask(n) {
            for plus in submasks(full_mask(n) & !minus) {
                let here = self.contains_masks(plus, minus);
                let there = self.contains_masks(minus, plus);
                let ok = if plus == 0 && minus == 0 {
                    here
                } else {
                    here != there
                };
                if !ok {
                    let x = TernaryVector::from_masks(plus, minus, n);
                    return Err(Error::ConeAxiom {
                        axiom: "D2",
                        detail: format!("exactly one of ±{x} required"),
                    });
                }
            }
        }
        if self.members.len() != (3usize.pow(n as u32) - 1) / 2 + 1 {
            return Err(Error::ConeAxiom {
                axiom: "D2",
                detail: "wrong cardinality".into(),
            });
        }
        if with_d3 {
            for x in &self.members {
                for y in &self.members {
                    if let Some(s) = x.checked_add(y) {
                        if !self.contains(&s) {
                            return Err(Error::ConeAxiom {
                                axiom: "D3",
                                detail: format!("{x} + {y} = {s} missing"),
                            });
                        }
                    }
                }
            }
        }
        Ok(())
    }

    /// Members as `{-,0,+}` strings, sorted.
    pub fn to_strings(&self) -> Vec<String> {
        let mut out: Vec<String> = self.members.iter().map(|v| v.to_string()).collect();
        out.sort();
        out
    }
}

impl fmt::Debug for DiscreteCone {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("DiscreteCone")
            .field("n", &self.n)
            .field("members", &self.to_strings())
            .finish()
    }
}

/// `C(⪯) = {χ(A, B) : A ⪯ B}`, built from disjoint pairs only.
pub fn cone_from_order(o: &ComparativeOrder) -> Result<DiscreteCone> {
    let n = o.n();
    if n > MAX_CONE_ATOMS {
        return Err(Error::AtomCount(n));
    }
    match validate_order(o) {
        Validation::Valid => {}
        Validation::EmptyNotFirst { first } => {
            return Err(Error::ConeAxiom {
                axiom: "D1",
                detail: format!("{first:?} ranked below the empty set"),
            })
        }
        Validation::DeFinetti {
            lower,
            upper,
            context,
        } => {
            return Err(Error::ConeAxiom {
                axiom: "D2",
                detail: format!(
                    "both orientations of χ({lower:?}, {upper:?}) via context {context:?}"
                ),
            })
        }
    }
    let full = full_mask(n);
    let mut members = Vec::with_capacity((3usize.pow(n as u32) - 1) / 2 + 1);
    for a in 0..=full {
        for b in submasks(full & !a) {
            if o.precedes(a, b) || a == b {
                members.push(TernaryVector::from_masks(b, a, n));
            }
        }
    }
    let cone = DiscreteCone::assemble(n, members)?;
    debug_assert!(cone.check_axioms(n <= 6).is_ok());
    Ok(cone)
}

/// `Irr(C)`: nonzero `w ∈ C` with no `u, v ∈ C \ {w}` such that `w = u + v`.
pub fn irreducible_elements(c: &DiscreteCone) -> Vec<TernaryVector> {
    c.members
        .par_iter()
        .filter(|w| !w.is_zero() && is_irreducible(c, w))
        .copied()
        .collect()
}

fn is_irreducible(c: &DiscreteCone, w: &TernaryVector) -> bool {
    !c.members.iter().any(|u| {
        if u.is_zero() || u == w {
            return false;
        }
        match w.checked_sub(u) {
            Some(v) => c.contains_masks(v.plus, v.minus),
            None => false,
        }
    })
}
