//! Exact feasibility of `{x ≥ 0 : a_k · x ≥ 1 for all k}` over the rationals.
//!
//! The system is decided through its homogeneous dual
//!
//! ```text
//! maximise Σ y_k   subject to   Σ_k y_k a_k + z = 0,   y, z ≥ 0
//! ```
//!
//! which is always feasible at `y = z = 0`. It is bounded exactly when the
//! primal is feasible, in which case the simplex multipliers of the optimal
//! basis are a primal solution. Otherwise the simplex finds an unbounded ray,
//! which is a Farkas certificate. Every basic solution of the dual is zero, so
//! all pivots are degenerate and Bland's rule is used to rule out cycling.
//! Arithmetic is exact throughout.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Rows `a_k` of the system `a_k · x ≥ 1`, `x ≥ 0`.
#[derive(Debug, Clone)]
pub struct FeasibilityProblem {
    dim: usize,
    coeffs: Vec<i64>,
}

/// Proof that no `x ≥ 0` satisfies every row: `y ≥ 0`, `z ≥ 0`,
/// `Σ y_k a_k + z = 0` and `Σ y_k > 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct FarkasCertificate {
    pub row_weights: Vec<BigRational>,
    pub slack_weights: Vec<BigRational>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Feasibility {
    Feasible(Vec<BigRational>),
    Infeasible(FarkasCertificate),
}

/// Statistics of one solve.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct SolveStats {
    pub pivots: usize,
}

impl FeasibilityProblem {
    pub fn new(dim: usize) -> Self {
        FeasibilityProblem {
            dim,
            coeffs: Vec::new(),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn rows(&self) -> usize {
        self.coeffs.len() / self.dim.max(1)
    }

    pub fn row(&self, k: usize) -> &[i64] {
        &self.coeffs[k * self.dim..(k + 1) * self.dim]
    }

    pub fn push_row(&mut self, row: &[i64]) {
        assert_eq!(row.len(), self.dim);
        self.coeffs.extend_from_slice(row);
    }

    pub fn solve(&self) -> Feasibility {
        self.solve_with_stats().0
    }

    pub fn solve_with_stats(&self) -> (Feasibility, SolveStats) {
        Simplex::new(self).run()
    }

    /// Exact check that `x ≥ 0` and every row is at least 1.
    pub fn is_solution(&self, x: &[BigRational]) -> bool {
        if x.len() != self.dim || x.iter().any(|v| v.is_negative()) {
            return false;
        }
        let one = BigRational::one();
        (0..self.rows()).all(|k| self.dot_row(k, x) >= one)
    }

    /// Exact check of a Farkas certificate.
    pub fn is_infeasibility_proof(&self, cert: &FarkasCertificate) -> bool {
        if cert.row_weights.len() != self.rows() || cert.slack_weights.len() != self.dim {
            return false;
        }
        if cert
            .row_weights
            .iter()
            .chain(&cert.slack_weights)
            .any(|w| w.is_negative())
        {
            return false;
        }
        if cert.row_weights.iter().all(|w| w.is_zero()) {
            return false;
        }
        (0..self.dim).all(|i| {
            let mut total = cert.slack_weights[i].clone();
            for (k, w) in cert.row_weights.iter().enumerate() {
                let c = self.row(k)[i];
                if c != 0 && !w.is_zero() {
                    total += w * BigRational::from_integer(c.into());
                }
            }
            total.is_zero()
        })
    }

    fn dot_row(&self, k: usize, x: &[BigRational]) -> BigRational {
        self.row(k)
            .iter()
            .zip(x)
            .filter(|(c, _)| **c != 0)
            .map(|(c, v)| v * BigRational::from_integer((*c).into()))
            .sum()
    }
}

/// Multipliers scaled to a common positive denominator.
enum Prices {
    Small { num: Vec<i128>, den: i128 },
    Big { num: Vec<BigInt>, den: BigInt },
}

struct Simplex<'a> {
    lp: &'a FeasibilityProblem,
    /// Basic variable of each row: `k < m` is `y_k`, `m + i` is `z_i`.
    basis: Vec<usize>,
    is_basic: Vec<bool>,
    /// Dense inverse of the basis matrix.
    binv: Vec<Vec<BigRational>>,
}

impl<'a> Simplex<'a> {
    fn new(lp: &'a FeasibilityProblem) -> Self {
        let (d, m) = (lp.dim, lp.rows());
        let basis: Vec<usize> = (m..m + d).collect();
        let mut is_basic = vec![false; m + d];
        for &b in &basis {
            is_basic[b] = true;
        }
        let binv = (0..d)
            .map(|r| {
                (0..d)
                    .map(|c| {
                        if r == c {
                            BigRational::one()
                        } else {
                            BigRational::zero()
                        }
                    })
                    .collect()
            })
            .collect();
        Simplex {
            lp,
            basis,
            is_basic,
            binv,
        }
    }

    fn cost(&self, var: usize) -> bool {
        var < self.lp.rows()
    }

    /// `π = c_B^T B^{-1}`.
    fn multipliers(&self) -> Vec<BigRational> {
        let d = self.lp.dim;
        let mut pi = vec![BigRational::zero(); d];
        for (r, &var) in self.basis.iter().enumerate() {
            if self.cost(var) {
                for (p, b) in pi.iter_mut().zip(&self.binv[r]) {
                    if !b.is_zero() {
                        *p += b;
                    }
                }
            }
        }
        pi
    }

    fn prices(pi: &[BigRational]) -> Prices {
        let den = pi.iter().fold(BigInt::one(), |acc, p| acc.lcm(p.denom()));
        let num: Vec<BigInt> = pi.iter().map(|p| p.numer() * (&den / p.denom())).collect();
        let small = |v: &BigInt| v.to_i64().map(i128::from);
        match (
            small(&den),
            num.iter().map(small).collect::<Option<Vec<i128>>>(),
        ) {
            (Some(den), Some(num)) => Prices::Small { num, den },
            _ => Prices::Big { num, den },
        }
    }

    /// Smallest-index nonbasic variable with positive reduced cost.
    fn entering(&self, prices: &Prices) -> Option<usize> {
        let (d, m) = (self.lp.dim, self.lp.rows());
        for k in 0..m {
            if self.is_basic[k] {
                continue;
            }
            let row = self.lp.row(k);
            // reduced cost 1 − π·a_k > 0  ⟺  den > num·a_k
            let positive = match prices {
                Prices::Small { num, den } => {
                    let dot: i128 = row
                        .iter()
                        .zip(num)
                        .filter(|(c, _)| **c != 0)
                        .map(|(c, p)| *c as i128 * p)
                        .sum();
                    *den > dot
                }
                Prices::Big { num, den } => {
                    let mut dot = BigInt::zero();
                    for (c, p) in row.iter().zip(num) {
                        match *c {
                            0 => {}
                            1 => dot += p,
                            -1 => dot -= p,
                            c => dot += p * BigInt::from(c),
                        }
                    }
                    *den > dot
                }
            };
            if positive {
                return Some(k);
            }
        }
        (0..d).map(|i| m + i).find(|&var| {
            !self.is_basic[var]
                && match prices {
                    Prices::Small { num, .. } => num[var - m] < 0,
                    Prices::Big { num, .. } => num[var - m].is_negative(),
                }
        })
    }

    /// `B^{-1}` times the column of `var`.
    fn column(&self, var: usize) -> Vec<BigRational> {
        let m = self.lp.rows();
        if var >= m {
            return self.binv.iter().map(|row| row[var - m].clone()).collect();
        }
        let col = self.lp.row(var);
        self.binv
            .iter()
            .map(|row| {
                let mut acc = BigRational::zero();
                for (c, b) in col.iter().zip(row) {
                    match *c {
                        0 => {}
                        1 => acc += b,
                        -1 => acc -= b,
                        c => acc += b * BigRational::from_integer(c.into()),
                    }
                }
                acc
            })
            .collect()
    }

    fn pivot(&mut self, row: usize, entering: usize, alpha: &[BigRational]) {
        let pivot = alpha[row].clone();
        for v in self.binv[row].iter_mut() {
            if !v.is_zero() {
                *v /= &pivot;
            }
        }
        let pivot_row = self.binv[row].clone();
        for (r, a) in alpha.iter().enumerate() {
            if r == row || a.is_zero() {
                continue;
            }
            for (v, p) in self.binv[r].iter_mut().zip(&pivot_row) {
                if !p.is_zero() {
                    *v -= a * p;
                }
            }
        }
        self.is_basic[self.basis[row]] = false;
        self.is_basic[entering] = true;
        self.basis[row] = entering;
    }

    fn run(mut self) -> (Feasibility, SolveStats) {
        let (d, m) = (self.lp.dim, self.lp.rows());
        let mut stats = SolveStats::default();
        loop {
            let pi = self.multipliers();
            let prices = Self::prices(&pi);
            let Some(enter) = self.entering(&prices) else {
                return (Feasibility::Feasible(pi), stats);
            };
            let alpha = self.column(enter);
            // all basic values are zero: ratios tie, Bland picks the smallest variable
            let leave = (0..d)
                .filter(|&r| alpha[r].is_positive())
                .min_by_key(|&r| self.basis[r]);
            match leave {
                Some(r) => {
                    self.pivot(r, enter, &alpha);
                    stats.pivots += 1;
                }
                None => {
                    let mut row_weights = vec![BigRational::zero(); m];
                    let mut slack_weights = vec![BigRational::zero(); d];
                    let mut put = |var: usize, w: BigRational| {
                        if var < m {
                            row_weights[var] = w;
                        } else {
                            slack_weights[var - m] = w;
                        }
                    };
                    put(enter, BigRational::one());
                    for (r, a) in alpha.iter().enumerate() {
                        put(self.basis[r], -a.clone());
                    }
                    let cert = FarkasCertificate {
                        row_weights,
                        slack_weights,
                    };
                    return (Feasibility::Infeasible(cert), stats);
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn problem(dim: usize, rows: &[&[i64]]) -> FeasibilityProblem {
        let mut lp = FeasibilityProblem::new(dim);
        for r in rows {
            lp.push_row(r);
        }
        lp
    }

    #[test]
    fn feasible_chain() {
        // x1 ≥ 1, x2 − x1 ≥ 1, x3 − x2 ≥ 1
        let lp = problem(3, &[&[1, 0, 0], &[-1, 1, 0], &[0, -1, 1]]);
        match lp.solve() {
            Feasibility::Feasible(x) => assert!(lp.is_solution(&x)),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn infeasible_cycle() {
        // x2 − x1 ≥ 1, x1 − x2 ≥ 1
        let lp = problem(2, &[&[-1, 1], &[1, -1]]);
        match lp.solve() {
            Feasibility::Infeasible(cert) => assert!(lp.is_infeasibility_proof(&cert)),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn infeasible_through_nonnegativity() {
        // −x1 ≥ 1 has no nonnegative solution
        let lp = problem(1, &[&[-1]]);
        match lp.solve() {
            Feasibility::Infeasible(cert) => {
                assert!(lp.is_infeasibility_proof(&cert));
                assert!(cert.slack_weights[0].is_positive());
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn fractional_vertex() {
        // 2x ≥ 1 and 3y − x ≥ 1 force rational multipliers
        let lp = problem(2, &[&[2, 0], &[-1, 3], &[1, 1]]);
        match lp.solve() {
            Feasibility::Feasible(x) => assert!(lp.is_solution(&x)),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn bogus_certificates_are_rejected() {
        let lp = problem(2, &[&[-1, 1], &[1, -1]]);
        let half = BigRational::new(1.into(), 2.into());
        assert!(!lp.is_solution(&[half.clone(), half.clone()]));
        let zero = FarkasCertificate {
            row_weights: vec![BigRational::zero(); 2],
            slack_weights: vec![BigRational::zero(); 2],
        };
        assert!(!lp.is_infeasibility_proof(&zero));
        let unbalanced = FarkasCertificate {
            row_weights: vec![BigRational::one(), BigRational::zero()],
            slack_weights: vec![BigRational::zero(); 2],
        };
        assert!(!lp.is_infeasibility_proof(&unbalanced));
    }
}
