//! Representability: the exact LP decision, trading-transform certificates
//! and the friendly-flip predicate.

use std::collections::HashMap;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::flips::neighbors;
use crate::lp::{Feasibility, FeasibilityProblem};
use crate::order::{order_from_utilities, ComparativeOrder};
use crate::subset::{full_mask, submasks, Subset};
use crate::utility::UtilityVector;

/// `(A_1, …, A_k; B_1, …, B_k)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TradingTransform {
    pub lower: Vec<Subset>,
    pub upper: Vec<Subset>,
}

impl TradingTransform {
    pub fn len(&self) -> usize {
        self.lower.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lower.is_empty()
    }

    /// Every atom occurs equally often on both sides.
    pub fn is_balanced(&self) -> Result<bool> {
        if self.lower.len() != self.upper.len() {
            return Err(Error::LengthMismatch(self.lower.len(), self.upper.len()));
        }
        let mut count = [0i64; 32];
        for s in &self.lower {
            for a in s.atoms() {
                count[a] += 1;
            }
        }
        for s in &self.upper {
            for a in s.atoms() {
                count[a] -= 1;
            }
        }
        Ok(count.iter().all(|&c| c == 0))
    }

    pub fn to_json(&self) -> Value {
        let sets = |v: &[Subset]| v.iter().map(|s| json!(s.atoms())).collect::<Vec<_>>();
        json!({ "As": sets(&self.lower), "Bs": sets(&self.upper) })
    }
}

/// Outcome of [`is_representable`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Certificate {
    Representable {
        utilities: UtilityVector,
    },
    /// The LP is infeasible. `transform` is the Farkas ray read as a trading
    /// transform when its total length stays below [`FARKAS_TRANSFORM_LIMIT`].
    Nonrepresentable {
        transform: Option<TradingTransform>,
    },
}

/// Longest trading transform expanded from a Farkas certificate.
pub const FARKAS_TRANSFORM_LIMIT: u64 = 100_000;

impl Certificate {
    pub fn is_representable(&self) -> bool {
        matches!(self, Certificate::Representable { .. })
    }

    pub fn utilities(&self) -> Option<&UtilityVector> {
        match self {
            Certificate::Representable { utilities } => Some(utilities),
            _ => None,
        }
    }

    pub fn to_json(&self) -> Value {
        match self {
            Certificate::Representable { utilities } => json!({
                "verdict": "representable",
                "utilities": utilities.entries().iter().map(big_to_json).collect::<Vec<_>>(),
            }),
            Certificate::Nonrepresentable { transform } => {
                let mut v = json!({ "verdict": "nonrepresentable", "lp_infeasible": true });
                if let Some(t) = transform {
                    v["transform"] = t.to_json();
                }
                v
            }
        }
    }
}

fn big_to_json(x: &BigUint) -> Value {
    match x.to_u64() {
        Some(v) => json!(v),
        None => json!(x.to_string()),
    }
}

/// `u_i ≥ 1` for every atom and `u(ranked[k+1]) − u(ranked[k]) ≥ 1`.
pub fn representability_lp(o: &ComparativeOrder) -> FeasibilityProblem {
    let n = o.n();
    let mut lp = FeasibilityProblem::new(n);
    let mut row = vec![0i64; n];
    for i in 0..n {
        row.iter_mut().for_each(|c| *c = 0);
        row[i] = 1;
        lp.push_row(&row);
    }
    for w in o.ranked_masks().windows(2) {
        for (i, c) in row.iter_mut().enumerate() {
            *c = (w[1] >> i & 1) as i64 - (w[0] >> i & 1) as i64;
        }
        lp.push_row(&row);
    }
    lp
}

/// Decides representability exactly. Both verdicts are re-checked.
pub fn is_representable(o: &ComparativeOrder) -> Certificate {
    let lp = representability_lp(o);
    match lp.solve() {
        Feasibility::Feasible(x) => {
            assert!(lp.is_solution(&x), "simplex returned a non-solution");
            let utilities = integer_witness(&x);
            assert_eq!(
                order_from_utilities(&utilities).as_ref(),
                Ok(o),
                "witness does not reproduce the order"
            );
            Certificate::Representable { utilities }
        }
        Feasibility::Infeasible(cert) => {
            assert!(
                lp.is_infeasibility_proof(&cert),
                "invalid Farkas certificate"
            );
            let transform = farkas_transform(o, &cert.row_weights, &cert.slack_weights);
            if let Some(t) = &transform {
                debug_assert_eq!(check_trading_transform(t, o), Ok(true));
            }
            Certificate::Nonrepresentable { transform }
        }
    }
}

/// Clears denominators and divides out the common factor.
fn integer_witness(x: &[BigRational]) -> UtilityVector {
    let den = x.iter().fold(BigInt::one(), |acc, v| acc.lcm(v.denom()));
    let ints: Vec<BigInt> = x.iter().map(|v| v.numer() * (&den / v.denom())).collect();
    let g = ints.iter().fold(BigInt::zero(), |acc, v| acc.gcd(v));
    let entries = ints
        .iter()
        .map(|v| (v / &g).to_biguint().expect("nonnegative"))
        .collect();
    UtilityVector::new(entries).expect("rows u_i ≥ 1 keep entries positive")
}

/// Reads `Σ y_k a_k + z = 0` as a multiset of pairs `A ≺ B`. Row `i < n`
/// and slack `i` both stand for the pair `(∅, {i})`.
fn farkas_transform(
    o: &ComparativeOrder,
    rows: &[BigRational],
    slacks: &[BigRational],
) -> Option<TradingTransform> {
    let n = o.n();
    let den = rows
        .iter()
        .chain(slacks)
        .fold(BigInt::one(), |acc, v| acc.lcm(v.denom()));
    let mult = |v: &BigRational| (v * BigRational::from_integer(den.clone())).to_integer();
    let mut pairs: Vec<(u32, u32, u64)> = Vec::new();
    let mut total = 0u64;
    let mut push = |a: u32, b: u32, w: BigInt| -> Option<()> {
        if w.is_positive() {
            let w = w.to_u64()?;
            total = total.checked_add(w)?;
            pairs.push((a, b, w));
        }
        Some(())
    };
    for i in 0..n {
        let w = mult(&rows[i]) + mult(&slacks[i]);
        push(0, 1 << i, w)?;
    }
    for (k, w) in o.ranked_masks().windows(2).enumerate() {
        let (a, b) = (w[0], w[1]);
        push(a & !b, b & !a, mult(&rows[n + k]))?;
    }
    if total > FARKAS_TRANSFORM_LIMIT {
        return None;
    }
    let mut t = TradingTransform {
        lower: Vec::new(),
        upper: Vec::new(),
    };
    for (a, b, w) in pairs {
        for _ in 0..w {
            t.lower.push(Subset::from_raw(a, n));
            t.upper.push(Subset::from_raw(b, n));
        }
    }
    Some(t)
}

/// True iff `t` is balanced and `A_i ≺ B_i` in `o` for every `i`.
pub fn check_trading_transform(t: &TradingTransform, o: &ComparativeOrder) -> Result<bool> {
    if !t.is_balanced()? || t.is_empty() {
        return Ok(false);
    }
    Ok(t.lower
        .iter()
        .zip(&t.upper)
        .all(|(a, b)| a.n() == o.n() && b.n() == o.n() && o.precedes(a.mask(), b.mask())))
}

/// Bounded search for a trading transform of length at most `k_max` made of
/// disjoint pairs `A_i ≺ B_i`. Returns a shortest one found.
pub fn find_trading_transform(o: &ComparativeOrder, k_max: usize) -> Option<TradingTransform> {
    let n = o.n();
    let full = full_mask(n);
    // χ(A, B) for disjoint A ≺ B, B nonempty
    let mut vectors: Vec<(u32, u32)> = Vec::new();
    for a in 0..=full {
        for b in submasks(full & !a) {
            if b != 0 && o.precedes(a, b) {
                vectors.push((b, a));
            }
        }
    }
    let index: HashMap<(u32, u32), usize> =
        vectors.iter().enumerate().map(|(i, &v)| (v, i)).collect();
    let mut search = TransformSearch {
        n,
        vectors: &vectors,
        index: &index,
        chosen: Vec::new(),
    };
    for k in 2..=k_max {
        if search.extend(0, &mut [0i8; 32], k) {
            let lower = search
                .chosen
                .iter()
                .map(|&i| Subset::from_raw(vectors[i].1, n))
                .collect();
            let upper = search
                .chosen
                .iter()
                .map(|&i| Subset::from_raw(vectors[i].0, n))
                .collect();
            return Some(TradingTransform { lower, upper });
        }
    }
    None
}

struct TransformSearch<'a> {
    n: usize,
    vectors: &'a [(u32, u32)],
    index: &'a HashMap<(u32, u32), usize>,
    chosen: Vec<usize>,
}

impl TransformSearch<'_> {
    fn add(&self, sum: &mut [i8; 32], v: (u32, u32), sign: i8) {
        for (i, s) in sum.iter_mut().enumerate().take(self.n) {
            *s += sign * ((v.0 >> i & 1) as i8 - (v.1 >> i & 1) as i8);
        }
    }

    /// Chooses `left` more vectors with index at least `from` so that the
    /// running sum returns to zero.
    fn extend(&mut self, from: usize, sum: &mut [i8; 32], left: usize) -> bool {
        if left == 1 {
            let (mut plus, mut minus) = (0u32, 0u32);
            for (i, &s) in sum.iter().enumerate().take(self.n) {
                match s {
                    0 => {}
                    -1 => plus |= 1 << i,
                    1 => minus |= 1 << i,
                    _ => return false,
                }
            }
            return match self.index.get(&(plus, minus)) {
                Some(&i) if i >= from => {
                    self.chosen.push(i);
                    true
                }
                _ => false,
            };
        }
        for i in from..self.vectors.len() {
            let v = self.vectors[i];
            self.add(sum, v, 1);
            let reachable = sum.iter().all(|s| (s.unsigned_abs() as usize) < left);
            if reachable {
                self.chosen.push(i);
                if self.extend(i, sum, left - 1) {
                    self.add(sum, v, -1);
                    return true;
                }
                self.chosen.pop();
            }
            self.add(sum, v, -1);
        }
        false
    }
}

/// Both orders representable or both not. `o2` must be a flip of `o`.
pub fn friendly(o: &ComparativeOrder, o2: &ComparativeOrder) -> Result<bool> {
    if !neighbors(o).contains(o2) {
        return Err(Error::NotNeighbors);
    }
    Ok(is_representable(o).is_representable() == is_representable(o2).is_representable())
}

/// Draws `trials` random integer vectors and returns the first one that
/// reproduces `o`, if any.
pub fn random_witness_search(
    o: &ComparativeOrder,
    trials: usize,
    seed: u64,
) -> Option<UtilityVector> {
    let n = o.n();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let bound = 1u64 << (n + 4).min(40);
    (0..trials).find_map(|_| {
        let entries: Vec<u64> = (0..n).map(|_| rng.random_range(1..=bound)).collect();
        let u = UtilityVector::from_u64(&entries).ok()?;
        match order_from_utilities(&u) {
            Ok(x) if &x == o => Some(u),
            _ => None,
        }
    })
}
