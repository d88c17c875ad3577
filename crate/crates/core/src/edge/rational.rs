//! Sparse exact rows over the rationals.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};

pub type Rational = BigRational;

pub fn rat(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

pub fn to_f64(r: &Rational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

/// A sparse vector keyed by column.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct SparseVec(pub BTreeMap<usize, Rational>);

impl SparseVec {
    pub fn get(&self, col: usize) -> Option<&Rational> {
        self.0.get(&col)
    }

    pub fn add_entry(&mut self, col: usize, v: Rational) {
        let e = self.0.entry(col).or_insert_with(Rational::zero);
        *e += v;
        if e.is_zero() {
            self.0.remove(&col);
        }
    }

    /// self -= f * other
    pub fn sub_scaled(&mut self, f: &Rational, other: &SparseVec) {
        for (&c, v) in &other.0 {
            self.add_entry(c, -(f * v));
        }
    }

    pub fn scale(&mut self, f: &Rational) {
        for v in self.0.values_mut() {
            *v *= f;
        }
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    pub fn first(&self) -> Option<(usize, &Rational)> {
        self.0.iter().next().map(|(&c, v)| (c, v))
    }
}

/// Row of an augmented linear system: lhs over unknowns, rhs over symbols.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct SparseRow {
    pub lhs: SparseVec,
    pub rhs: SparseVec,
}

impl SparseRow {
    pub fn sub_scaled(&mut self, f: &Rational, other: &SparseRow) {
        self.lhs.sub_scaled(f, &other.lhs);
        self.rhs.sub_scaled(f, &other.rhs);
    }

    pub fn scale(&mut self, f: &Rational) {
        self.lhs.scale(f);
        self.rhs.scale(f);
    }
}

/// Incremental echelon basis that detects dependent vectors exactly and
/// records how each dependent vector combines the accepted ones.
#[derive(Debug, Default)]
pub struct IncrementalBasis {
    basis: Vec<(usize, SparseVec, SparseVec)>,
    accepted: usize,
}

pub enum Insert {
    /// Independent; index among accepted vectors.
    Independent(usize),
    /// Dependent; coefficients over accepted vectors.
    Dependent(SparseVec),
}

impl IncrementalBasis {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn rank(&self) -> usize {
        self.accepted
    }

    pub fn insert(&mut self, v: &SparseVec) -> Insert {
        let mut rem = v.clone();
        let mut comb = SparseVec::default();
        for (pivot, bv, bc) in &self.basis {
            if let Some(x) = rem.get(*pivot) {
                let f = x / bv.get(*pivot).expect("pivot entry present");
                rem.sub_scaled(&f, bv);
                for (&c, w) in &bc.0 {
                    comb.add_entry(c, &f * w);
                }
            }
        }
        match rem.first() {
            None => Insert::Dependent(comb),
            Some((pivot, _)) => {
                let idx = self.accepted;
                let mut own = SparseVec::default();
                own.add_entry(idx, rat(1, 1));
                own.sub_scaled(&rat(1, 1), &comb);
                self.basis.push((pivot, rem, own));
                self.accepted += 1;
                Insert::Independent(idx)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sv(entries: &[(usize, i64)]) -> SparseVec {
        let mut v = SparseVec::default();
        for &(c, x) in entries {
            v.add_entry(c, rat(x, 1));
        }
        v
    }

    #[test]
    fn dependent_vector_reports_combination() {
        let mut b = IncrementalBasis::new();
        assert!(matches!(b.insert(&sv(&[(0, 1), (1, 1)])), Insert::Independent(0)));
        assert!(matches!(b.insert(&sv(&[(1, 1), (2, 1)])), Insert::Independent(1)));
        match b.insert(&sv(&[(0, 2), (1, 3), (2, 1)])) {
            Insert::Dependent(c) => {
                assert_eq!(c.get(0), Some(&rat(2, 1)));
                assert_eq!(c.get(1), Some(&rat(1, 1)));
            }
            Insert::Independent(_) => panic!("expected dependence"),
        }
        assert_eq!(b.rank(), 2);
    }
}
