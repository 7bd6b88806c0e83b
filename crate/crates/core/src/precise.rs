//! Rigorous enclosures of logarithms and binary entropy.
//!
//! Enclosures are closed rational intervals whose endpoints are rounded
//! outward onto a dyadic grid of `PRECISION_BITS` fractional bits: lower ends
//! are rounded down, upper ends up.

use std::sync::OnceLock;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

pub const PRECISION_BITS: u32 = 128;

/// Closed interval `[lo, hi]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Interval {
    pub lo: BigRational,
    pub hi: BigRational,
}

fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(n.into(), d.into())
}

fn grid() -> BigRational {
    BigRational::from_integer(BigInt::one() << PRECISION_BITS)
}

fn round_down(x: &BigRational) -> BigRational {
    let g = grid();
    (x * &g).floor() / g
}

fn round_up(x: &BigRational) -> BigRational {
    let g = grid();
    (x * &g).ceil() / g
}

impl Interval {
    pub fn point(x: BigRational) -> Self {
        Interval {
            lo: x.clone(),
            hi: x,
        }
    }

    fn outward(lo: BigRational, hi: BigRational) -> Self {
        debug_assert!(lo <= hi);
        Interval {
            lo: round_down(&lo),
            hi: round_up(&hi),
        }
    }

    pub fn width(&self) -> BigRational {
        &self.hi - &self.lo
    }

    pub fn contains(&self, x: &BigRational) -> bool {
        &self.lo <= x && x <= &self.hi
    }

    pub fn add(&self, other: &Interval) -> Interval {
        Interval::outward(&self.lo + &other.lo, &self.hi + &other.hi)
    }

    pub fn neg(&self) -> Interval {
        Interval {
            lo: -&self.hi,
            hi: -&self.lo,
        }
    }

    pub fn scale(&self, c: &BigRational) -> Interval {
        if c.is_negative() {
            Interval::outward(&self.hi * c, &self.lo * c)
        } else {
            Interval::outward(&self.lo * c, &self.hi * c)
        }
    }

    /// Division by an interval lying strictly above zero.
    pub fn div_positive(&self, d: &Interval) -> Interval {
        assert!(d.lo.is_positive());
        let cands = [
            &self.lo / &d.lo,
            &self.lo / &d.hi,
            &self.hi / &d.lo,
            &self.hi / &d.hi,
        ];
        let lo = cands.iter().min().unwrap().clone();
        let hi = cands.iter().max().unwrap().clone();
        Interval::outward(lo, hi)
    }

    pub fn midpoint_f64(&self) -> f64 {
        let mid = (&self.lo + &self.hi) / rat(2, 1);
        to_f64(&mid)
    }
}

pub fn to_f64(x: &BigRational) -> f64 {
    use num_traits::ToPrimitive;
    x.to_f64().unwrap_or(f64::NAN)
}

/// `2 atanh(t)` for `0 ≤ t < 1`: partial sums plus a geometric tail bound.
fn two_atanh(t: &BigRational) -> Interval {
    assert!(!t.is_negative() && t < &BigRational::one());
    let t2 = t * t;
    let eps = BigRational::new(BigInt::one(), BigInt::one() << (PRECISION_BITS + 8));
    let mut power = t.clone();
    let mut sum = BigRational::zero();
    let mut j = 0i64;
    loop {
        sum += &power / rat(2 * j + 1, 1);
        power *= &t2;
        j += 1;
        let tail = &power / (rat(2 * j + 1, 1) * (BigRational::one() - &t2));
        if tail < eps || power.is_zero() {
            let two = rat(2, 1);
            return Interval::outward(&sum * &two, (&sum + tail) * two);
        }
    }
}

/// Enclosure of `ln 2`.
pub fn ln2() -> Interval {
    static LN2: OnceLock<Interval> = OnceLock::new();
    LN2.get_or_init(|| two_atanh(&rat(1, 3))).clone()
}

/// Enclosure of the natural logarithm of `x > 0`.
pub fn ln(x: &BigRational) -> Interval {
    assert!(x.is_positive(), "logarithm of a nonpositive number");
    // x = m · 2^k with 1 ≤ m < 2
    let two = rat(2, 1);
    let mut m = x.clone();
    let mut k = 0i64;
    while m >= two {
        m /= &two;
        k += 1;
    }
    while m < BigRational::one() {
        m *= &two;
        k -= 1;
    }
    let t = (&m - BigRational::one()) / (&m + BigRational::one());
    two_atanh(&t).add(&ln2().scale(&rat(k, 1)))
}

pub fn log2(x: &BigRational) -> Interval {
    ln(x).div_positive(&ln2())
}

/// `H(x) = −x log₂ x − (1 − x) log₂ (1 − x)` for `0 < x < 1`.
pub fn binary_entropy(x: &BigRational) -> Interval {
    let one = BigRational::one();
    assert!(x.is_positive() && x < &one);
    let y = &one - x;
    log2(x).scale(&-x.clone()).add(&log2(&y).scale(&-y.clone()))
}

/// Root of `λ + H(λ) = 1` in `(0, 1/2)`, by bisection with certified signs.
pub fn lambda(iterations: u32) -> Interval {
    let one = BigRational::one();
    let mut lo = rat(1, 64);
    let mut hi = rat(1, 2);
    for _ in 0..iterations {
        let mid = (&lo + &hi) / rat(2, 1);
        let f = binary_entropy(&mid).add(&Interval::point(&mid - &one));
        if f.lo.is_positive() {
            hi = mid;
        } else if f.hi.is_negative() {
            lo = mid;
        } else {
            break;
        }
    }
    Interval { lo, hi }
}

/// Default enclosure of λ, width below `2^-60`.
pub fn lambda_default() -> Interval {
    static LAMBDA: OnceLock<Interval> = OnceLock::new();
    LAMBDA.get_or_init(|| lambda(59)).clone()
}
