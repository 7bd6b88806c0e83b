//! Counting behind the Fibonacci lower bound and the adjacency-counting
//! upper bound on the number of flippable pairs.

use std::collections::HashMap;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::flips::{critical_pairs, flippable_pairs, is_flippable, neighbors};
use crate::order::order_from_utilities;
use crate::precise::{self, Interval};
use crate::represent::is_representable;
use crate::utility::maclagan_utilities;

/// `q_n` with its neighbours `q_n ∓ 1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QSequence {
    pub n: usize,
    pub q: BigUint,
    pub q_minus: BigUint,
    pub q_plus: BigUint,
}

/// `q_n = (2^n + (−1)^{n+1}) / 3`, cross-checked against
/// `q_n = q_{n−1} + 2 q_{n−2}` from `q_3 = 3`, `q_4 = 5`.
pub fn q_value(n: usize) -> Result<QSequence> {
    if n < 3 {
        return Err(Error::Range(n.to_string(), "n ≥ 3".into()));
    }
    let pow = BigUint::one() << n;
    let numer = if n % 2 == 1 { pow + 1u32 } else { pow - 1u32 };
    let three = BigUint::from(3u32);
    assert!((&numer % &three).is_zero(), "closed form must be integral");
    let closed = numer / three;

    let (mut prev, mut cur) = (BigUint::from(3u32), BigUint::from(5u32));
    if n == 3 {
        cur = prev.clone();
    }
    for _ in 5..=n {
        let next = &cur + 2u32 * &prev;
        prev = std::mem::replace(&mut cur, next);
    }
    assert_eq!(
        closed, cur,
        "closed form and recurrence disagree at n = {n}"
    );

    let four = BigUint::from(4u32);
    let m4 = |x: &BigUint| (x % &four).to_u32().unwrap();
    let odd = n % 2 == 1;
    assert_eq!(m4(&closed), if odd { 3 } else { 1 });
    let q_minus = &closed - 1u32;
    let q_plus = &closed + 1u32;
    assert_eq!(m4(&q_minus), if odd { 2 } else { 0 });
    assert_eq!(m4(&q_plus), if odd { 0 } else { 2 });
    Ok(QSequence {
        n,
        q: closed,
        q_minus,
        q_plus,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct GhCounts {
    pub n: usize,
    pub g: u128,
    pub h: u128,
}

/// Ordered disjoint pairs `(A, B)` of subsets of `[n]` under the utilities
/// `(2, 4, …, 2^n)` with `u(B) − u(A) = diff`.
///
/// Equivalently, sign vectors `ε ∈ {−1, 0, 1}^n` with `Σ ε_i 2^i = diff`,
/// counted digit by digit from the least significant atom.
pub fn count_pairs_with_gap(n: usize, diff: i128) -> u128 {
    if diff % 2 != 0 {
        return 0;
    }
    fn go(t: i128, digits: usize, memo: &mut HashMap<(i128, usize), u128>) -> u128 {
        if digits == 0 {
            return u128::from(t == 0);
        }
        // remaining digits reach at most 2^digits − 1 in absolute value
        if t.unsigned_abs() >= 1u128 << digits {
            return 0;
        }
        if let Some(&c) = memo.get(&(t, digits)) {
            return c;
        }
        let c = if t % 2 == 0 {
            go(t / 2, digits - 1, memo)
        } else {
            go((t - 1) / 2, digits - 1, memo) + go((t + 1) / 2, digits - 1, memo)
        };
        memo.insert((t, digits), c);
        c
    }
    go(diff / 2, n, &mut HashMap::new())
}

/// Largest base for [`gh_counts`].
pub const MAX_GH_N: usize = 120;

/// `g_n` and `h_n`: pairs with gap `q_n + 1` and `q_n − 1` in the doubled
/// binary order on `n` atoms.
pub fn gh_counts(n: usize) -> Result<GhCounts> {
    if !(3..=MAX_GH_N).contains(&n) {
        return Err(Error::Range(n.to_string(), format!("3..={MAX_GH_N}")));
    }
    let q = q_value(n)?;
    let to_i128 = |x: &BigUint| x.to_i128().expect("q_n fits i128");
    Ok(GhCounts {
        n,
        g: count_pairs_with_gap(n, to_i128(&q.q_plus)),
        h: count_pairs_with_gap(n, to_i128(&q.q_minus)),
    })
}

/// `F_1 = F_2 = 1`. `F_0 = 0` is accepted too.
pub fn fibonacci(k: usize) -> BigUint {
    let (mut a, mut b) = (BigUint::zero(), BigUint::one());
    for _ in 0..k {
        let next = &a + &b;
        a = std::mem::replace(&mut b, next);
    }
    a
}

/// Nearest integer to `φ^k / √5`, evaluated in fixed point.
pub fn fibonacci_by_rounding(k: usize) -> BigUint {
    let bits = k + 64;
    let one = BigUint::one() << bits;
    let sqrt5 = (BigUint::from(5u32) << (2 * bits)).sqrt();
    let phi = (&one + &sqrt5) >> 1;
    let mut pow = one.clone();
    for _ in 0..k {
        pow = (&pow * &phi) >> bits;
    }
    let scaled = (&pow << bits) / &sqrt5;
    (scaled + (BigUint::one() << (bits - 1))) >> bits
}

/// Result of [`verify_fibonacci_construction`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FibonacciReport {
    pub base: usize,
    pub atoms: usize,
    pub special_atom: usize,
    pub flippable: usize,
    pub g: u128,
    pub h: u128,
    pub fibonacci_index: usize,
    pub fibonacci: String,
    pub critical_pairs: usize,
    pub neighbors: usize,
    pub representable_neighbors: usize,
    pub friendly: bool,
}

/// Largest base checked by default.
pub const MAX_CHECKED_BASE: usize = 11;

/// Builds the order of `(2ℓ_n, q_n)` on `n + 1` atoms and checks the flippable
/// count against `g_n + h_n = F_{n+2}`, the three-way characterisation of
/// flippable critical pairs, and representability of every flip.
pub fn verify_fibonacci_construction(n: usize) -> Result<FibonacciReport> {
    if !(3..=MAX_CHECKED_BASE).contains(&n) {
        return Err(Error::Range(
            n.to_string(),
            format!("3..={MAX_CHECKED_BASE}"),
        ));
    }
    verify_fibonacci_construction_unchecked_range(n)
}

/// As [`verify_fibonacci_construction`] without the default range cap.
pub fn verify_fibonacci_construction_unchecked_range(n: usize) -> Result<FibonacciReport> {
    let fail = |msg: String| Error::Verification(format!("n = {n}: {msg}"));
    let m = maclagan_utilities(n)?;
    let o = order_from_utilities(&m)?;
    let special = n - 1;
    let gh = gh_counts(n)?;
    let fib = fibonacci(n + 2);
    let flips = flippable_pairs(&o);
    if BigUint::from(flips.len()) != fib || u128::from(flips.len() as u64) != gh.g + gh.h {
        return Err(fail(format!(
            "flippable = {}, g + h = {}, F_{} = {fib}",
            flips.len(),
            gh.g + gh.h,
            n + 2
        )));
    }
    let crit = critical_pairs(&o);
    for p in &crit {
        let flippable = is_flippable(&o, p);
        let one_side = p.a.contains(special) != p.b.contains(special);
        let gap_one = m.utility(&p.b) - m.utility(&p.a) == BigUint::one();
        if flippable != one_side || one_side != gap_one {
            return Err(fail(format!(
                "critical pair ({:?}, {:?}): flippable {flippable}, one side holds {special}: {one_side}, gap one: {gap_one}",
                p.a, p.b
            )));
        }
    }
    if !is_representable(&o).is_representable() {
        return Err(fail("the construction is not representable".into()));
    }
    let nbrs = neighbors(&o);
    let representable = nbrs
        .par_iter()
        .filter(|x| is_representable(x).is_representable())
        .count();
    if representable != nbrs.len() {
        return Err(fail(format!(
            "{} of {} flips are not friendly",
            nbrs.len() - representable,
            nbrs.len()
        )));
    }
    Ok(FibonacciReport {
        base: n,
        atoms: n + 1,
        special_atom: special,
        flippable: flips.len(),
        g: gh.g,
        h: gh.h,
        fibonacci_index: n + 2,
        fibonacci: fib.to_string(),
        critical_pairs: crit.len(),
        neighbors: nbrs.len(),
        representable_neighbors: representable,
        friendly: true,
    })
}

fn binomial(n: usize, k: usize) -> BigUint {
    let mut c = BigUint::one();
    for i in 0..k {
        c = c * (n - i) / (i + 1);
    }
    c
}

/// Adjacency-counting bound for `n` atoms.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BoundReport {
    pub n: usize,
    /// `F_{n+1}`.
    pub fib_lower: String,
    /// Least `s` with `Σ_{i≤s} 2^i C(n, i) ≥ 2^n − 1`.
    pub s_star: usize,
    /// `Σ_{i≤s_star} C(n, i)`.
    pub count_upper: String,
}

impl BoundReport {
    pub fn fib_lower_value(&self) -> BigUint {
        self.fib_lower.parse().unwrap()
    }

    pub fn count_upper_value(&self) -> BigUint {
        self.count_upper.parse().unwrap()
    }
}

pub fn upper_bound(n: usize) -> Result<BoundReport> {
    if n == 0 {
        return Err(Error::Range("0".into(), "n ≥ 1".into()));
    }
    let target = (BigUint::one() << n) - 1u32;
    let mut weighted = BigUint::zero();
    let mut plain = BigUint::zero();
    for s in 0..=n {
        let c = binomial(n, s);
        weighted += (&c) << s;
        plain += c;
        if weighted >= target {
            return Ok(BoundReport {
                n,
                fib_lower: fibonacci(n + 1).to_string(),
                s_star: s,
                count_upper: plain.to_string(),
            });
        }
    }
    unreachable!("Σ 2^i C(n, i) = 3^n ≥ 2^n − 1")
}

/// Entropy rate for a parameter `c ∈ (λ, 1/2)`.
#[derive(Debug, Clone, PartialEq)]
pub struct EntropyBound {
    pub n: usize,
    pub c: BigRational,
    /// Enclosure of `H(c)`.
    pub entropy: Interval,
    /// `2^{H(c)}`, nearest double.
    pub rate: f64,
    /// `2^{H(c) n}`, nearest double.
    pub bound: f64,
}

impl EntropyBound {
    /// Certifies `2^{H(c)} < r` from the enclosures of `H(c)` and `log₂ r`.
    pub fn rate_below(&self, r: &BigRational) -> bool {
        self.entropy.hi < precise::log2(r).lo
    }

    pub fn rate_above(&self, r: &BigRational) -> bool {
        self.entropy.lo > precise::log2(r).hi
    }
}

pub fn entropy_bound(n: usize, c: &BigRational) -> Result<EntropyBound> {
    let lambda = precise::lambda_default();
    let half = BigRational::new(1.into(), 2.into());
    if !(c > &lambda.hi && c < &half) {
        return Err(Error::Range(
            c.to_string(),
            "(λ, 1/2) with λ ≈ 0.2271".into(),
        ));
    }
    let entropy = precise::binary_entropy(c);
    let h = entropy.midpoint_f64();
    Ok(EntropyBound {
        n,
        c: c.clone(),
        entropy,
        rate: h.exp2(),
        bound: (h * n as f64).exp2(),
    })
}

/// `(2^{H(p/q)})^q = q^q / (p^p (q − p)^{q−p})`, exactly.
pub fn entropy_rate_power(c: &BigRational) -> (BigRational, u32) {
    let p = c.numer().to_u32().expect("small numerator");
    let q = c.denom().to_u32().expect("small denominator");
    let pw = |b: u32, e: u32| BigInt::from(b).pow(e);
    (BigRational::new(pw(q, q), pw(p, p) * pw(q - p, q - p)), q)
}

/// Enclosure of `2^{H(λ)} = 2^{1−λ}` given as bounds on `H(λ)` in bits.
pub fn lambda_entropy() -> Interval {
    let l = precise::lambda_default();
    let one = BigRational::one();
    Interval {
        lo: &one - &l.hi,
        hi: &one - &l.lo,
    }
}

/// Both sides of the Example-style chain for `s = ⌊c n⌋`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct EntropyChain {
    pub n: usize,
    pub s: usize,
    /// `Σ_{i≤s} 2^i C(n, i) ≥ 2^n`.
    pub weighted_exceeds: bool,
    /// `Σ_{i≤s} C(n, i) ≤ 2^{H(c) n}`, decided exactly.
    pub binomial_within_entropy: bool,
}

pub fn entropy_chain(n: usize, c: &BigRational) -> EntropyChain {
    let s = (c * BigRational::from_integer(n.into()))
        .floor()
        .to_integer()
        .to_usize()
        .unwrap();
    let mut weighted = BigUint::zero();
    let mut plain = BigUint::zero();
    for i in 0..=s {
        let b = binomial(n, i);
        weighted += (&b) << i;
        plain += b;
    }
    let (rate_q, q) = entropy_rate_power(c);
    let lhs = BigRational::from_integer(BigInt::from(plain).pow(q));
    let rhs = num_traits::pow(rate_q, n);
    EntropyChain {
        n,
        s,
        weighted_exceeds: weighted >= BigUint::one() << n,
        binomial_within_entropy: lhs <= rhs,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn brute_gap_count(n: usize, diff: i128) -> u128 {
        // all 3^n assignments atom → {A, B, neither}
        let mut count = 0;
        let total = 3usize.pow(n as u32);
        for code in 0..total {
            let mut c = code;
            let mut d = 0i128;
            for i in 1..=n {
                match c % 3 {
                    1 => d -= 1 << i,
                    2 => d += 1 << i,
                    _ => {}
                }
                c /= 3;
            }
            if d == diff {
                count += 1;
            }
        }
        count
    }

    #[test]
    fn q_values() {
        assert_eq!(q_value(3).unwrap().q, 3u32.into());
        assert_eq!(q_value(4).unwrap().q, 5u32.into());
        assert_eq!(q_value(5).unwrap().q, 11u32.into());
        assert_eq!(q_value(6).unwrap().q, 21u32.into());
        assert!(q_value(2).is_err());
        for n in 3..=64 {
            q_value(n).unwrap();
        }
    }

    #[test]
    fn q_doubling_identities() {
        for n in 3..=63 {
            let (a, b) = (q_value(n).unwrap(), q_value(n + 1).unwrap());
            if n % 2 == 1 {
                assert_eq!(b.q_minus, 2u32 * &a.q_minus);
                assert_eq!(b.q_plus, 2u32 * &a.q_plus - 2u32);
            } else {
                assert_eq!(b.q_minus, 2u32 * &a.q_minus + 2u32);
                assert_eq!(b.q_plus, 2u32 * &a.q_plus);
            }
        }
    }

    #[test]
    fn digit_count_matches_brute_force() {
        for n in 1..=9 {
            for diff in -(1i128 << (n + 1))..=(1 << (n + 1)) {
                assert_eq!(
                    count_pairs_with_gap(n, diff),
                    brute_gap_count(n, diff),
                    "{n} {diff}"
                );
            }
        }
        for n in 3..=12 {
            let q = q_value(n).unwrap();
            let g = brute_gap_count(n, q.q_plus.to_i128().unwrap());
            let h = brute_gap_count(n, q.q_minus.to_i128().unwrap());
            assert_eq!(gh_counts(n).unwrap(), GhCounts { n, g, h });
        }
    }

    #[test]
    fn gh_small_values() {
        assert_eq!(gh_counts(3).unwrap(), GhCounts { n: 3, g: 2, h: 3 });
        assert_eq!(gh_counts(4).unwrap(), GhCounts { n: 4, g: 5, h: 3 });
        assert_eq!(gh_counts(5).unwrap(), GhCounts { n: 5, g: 5, h: 8 });
    }

    #[test]
    fn gh_recurrences_and_fibonacci() {
        for n in 3..=60 {
            let (a, b) = (gh_counts(n).unwrap(), gh_counts(n + 1).unwrap());
            if n % 2 == 1 {
                assert_eq!((b.g, b.h), (a.g + a.h, a.h));
            } else {
                assert_eq!((b.g, b.h), (a.g, a.g + a.h));
            }
            let f = |k| fibonacci(k).to_u128().unwrap();
            let expected = if n % 2 == 1 {
                (f(n), f(n + 1))
            } else {
                (f(n + 1), f(n))
            };
            assert_eq!((a.g, a.h), expected);
        }
    }

    #[test]
    fn fibonacci_values() {
        let f = |k| fibonacci(k).to_u64().unwrap();
        assert_eq!((f(1), f(2), f(4), f(5), f(7), f(10)), (1, 1, 3, 5, 13, 55));
        for k in 1..=300 {
            assert_eq!(fibonacci_by_rounding(k), fibonacci(k), "k = {k}");
        }
    }

    #[test]
    fn upper_bounds() {
        let b = upper_bound(5).unwrap();
        assert_eq!(
            (b.s_star, b.count_upper.as_str(), b.fib_lower.as_str()),
            (2, "16", "8")
        );
        let b = upper_bound(6).unwrap();
        assert_eq!((b.s_star, b.count_upper.as_str()), (2, "22"));
        let b = upper_bound(1).unwrap();
        assert_eq!((b.s_star, b.count_upper.as_str()), (0, "1"));
        for n in 3..=24 {
            let b = upper_bound(n).unwrap();
            assert!(b.fib_lower_value() <= b.count_upper_value());
        }
    }

    #[test]
    fn entropy_range() {
        let quarter = BigRational::new(1.into(), 4.into());
        let e = entropy_bound(10, &quarter).unwrap();
        assert!(e.rate_below(&BigRational::new(17548.into(), 10000.into())));
        assert!(e.rate_above(&BigRational::new(17547.into(), 10000.into())));
        assert!(entropy_bound(10, &BigRational::new(1.into(), 2.into())).is_err());
        assert!(entropy_bound(10, &BigRational::new(1.into(), 5.into())).is_err());
    }

    #[test]
    fn exact_rate_power() {
        let (r, q) = entropy_rate_power(&BigRational::new(1.into(), 4.into()));
        assert_eq!((r, q), (BigRational::new(256.into(), 27.into()), 4));
    }

    #[test]
    fn maclagan_small_verifies() {
        let r = verify_fibonacci_construction(4).unwrap();
        assert_eq!((r.flippable, r.atoms, r.fibonacci.as_str()), (8, 5, "8"));
        assert!(verify_fibonacci_construction(12).is_err());
    }
}
