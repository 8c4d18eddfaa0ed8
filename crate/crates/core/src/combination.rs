//! Finite rational linear combinations over an ordered key type.

use std::collections::BTreeMap;
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};

use num::{One, Zero};

use crate::linalg::Rational;

/// A finitely supported map `K → ℚ` with no zero coefficients.
///
/// The key order fixes the canonical term order used when printing and
/// serializing.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Combination<K: Ord> {
    terms: BTreeMap<K, Rational>,
}

impl<K: Ord> Default for Combination<K> {
    fn default() -> Self {
        Combination {
            terms: BTreeMap::new(),
        }
    }
}

impl<K: Ord + Clone> Combination<K> {
    pub fn zero() -> Self {
        Self::default()
    }

    /// The single term `coeff · key`.
    pub fn term(key: K, coeff: Rational) -> Self {
        let mut c = Self::zero();
        c.add_term(key, &coeff);
        c
    }

    /// The key with coefficient one.
    pub fn basis(key: K) -> Self {
        Self::term(key, Rational::one())
    }

    pub fn from_terms<I: IntoIterator<Item = (K, Rational)>>(terms: I) -> Self {
        let mut c = Self::zero();
        for (k, q) in terms {
            c.add_term(k, &q);
        }
        c
    }

    pub fn add_term(&mut self, key: K, coeff: &Rational) {
        if coeff.is_zero() {
            return;
        }
        match self.terms.get_mut(&key) {
            Some(slot) => {
                *slot += coeff;
                if slot.is_zero() {
                    self.terms.remove(&key);
                }
            }
            None => {
                self.terms.insert(key, coeff.clone());
            }
        }
    }

    /// `self += factor * other`.
    pub fn add_scaled(&mut self, other: &Self, factor: &Rational) {
        if factor.is_zero() {
            return;
        }
        for (k, q) in &other.terms {
            self.add_term(k.clone(), &(q * factor));
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Number of nonzero terms.
    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, key: &K) -> Rational {
        self.terms.get(key).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn iter(&self) -> impl DoubleEndedIterator<Item = (&K, &Rational)> + '_ {
        self.terms.iter()
    }

    pub fn keys(&self) -> impl Iterator<Item = &K> + '_ {
        self.terms.keys()
    }

    pub fn scaled(&self, factor: &Rational) -> Self {
        let mut out = Self::zero();
        out.add_scaled(self, factor);
        out
    }

    /// Terms whose key satisfies `keep`.
    pub fn filtered(&self, keep: impl Fn(&K) -> bool) -> Self {
        Combination {
            terms: self
                .terms
                .iter()
                .filter(|(k, _)| keep(k))
                .map(|(k, q)| (k.clone(), q.clone()))
                .collect(),
        }
    }

    /// Linear extension of `f` on keys.
    pub fn map_linear<L: Ord + Clone>(&self, f: impl Fn(&K) -> Combination<L>) -> Combination<L> {
        let mut out = Combination::zero();
        for (k, q) in &self.terms {
            out.add_scaled(&f(k), q);
        }
        out
    }

    /// Bilinear extension of `f` on pairs of keys.
    pub fn map_bilinear<L: Ord + Clone, M: Ord + Clone>(
        &self,
        other: &Combination<L>,
        f: impl Fn(&K, &L) -> Combination<M>,
    ) -> Combination<M> {
        let mut out = Combination::zero();
        for (k, p) in &self.terms {
            for (l, q) in &other.terms {
                out.add_scaled(&f(k, l), &(p * q));
            }
        }
        out
    }
}

impl<K: Ord + Clone> FromIterator<(K, Rational)> for Combination<K> {
    fn from_iter<I: IntoIterator<Item = (K, Rational)>>(iter: I) -> Self {
        Self::from_terms(iter)
    }
}

impl<K: Ord + Clone> AddAssign<&Combination<K>> for Combination<K> {
    fn add_assign(&mut self, rhs: &Combination<K>) {
        self.add_scaled(rhs, &Rational::one());
    }
}

impl<K: Ord + Clone> SubAssign<&Combination<K>> for Combination<K> {
    fn sub_assign(&mut self, rhs: &Combination<K>) {
        self.add_scaled(rhs, &-Rational::one());
    }
}

impl<K: Ord + Clone> Add for &Combination<K> {
    type Output = Combination<K>;
    fn add(self, rhs: Self) -> Combination<K> {
        let mut out = self.clone();
        out += rhs;
        out
    }
}

impl<K: Ord + Clone> Sub for &Combination<K> {
    type Output = Combination<K>;
    fn sub(self, rhs: Self) -> Combination<K> {
        let mut out = self.clone();
        out -= rhs;
        out
    }
}

impl<K: Ord + Clone> Add for Combination<K> {
    type Output = Combination<K>;
    fn add(mut self, rhs: Self) -> Combination<K> {
        self += &rhs;
        self
    }
}

impl<K: Ord + Clone> Sub for Combination<K> {
    type Output = Combination<K>;
    fn sub(mut self, rhs: Self) -> Combination<K> {
        self -= &rhs;
        self
    }
}

impl<K: Ord + Clone> Neg for &Combination<K> {
    type Output = Combination<K>;
    fn neg(self) -> Combination<K> {
        self.scaled(&-Rational::one())
    }
}

impl<K: Ord + Clone> Neg for Combination<K> {
    type Output = Combination<K>;
    fn neg(self) -> Combination<K> {
        -&self
    }
}

impl<K: Ord + Clone> Mul<&Rational> for &Combination<K> {
    type Output = Combination<K>;
    fn mul(self, rhs: &Rational) -> Combination<K> {
        self.scaled(rhs)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{int, ratio};

    #[test]
    fn cancellation_removes_terms() {
        let mut c = Combination::term("a", int(2));
        c.add_term("a", &int(-2));
        assert!(c.is_zero());
        let d = &Combination::term("b", ratio(1, 2)) - &Combination::term("b", ratio(1, 2));
        assert!(d.is_zero());
    }

    #[test]
    fn bilinear_extension() {
        let a = Combination::from_terms([(1, int(1)), (2, int(3))]);
        let b = Combination::from_terms([(10, int(2))]);
        let prod = a.map_bilinear(&b, |x, y| Combination::basis(x + y));
        assert_eq!(prod, Combination::from_terms([(11, int(2)), (12, int(6))]));
    }
}
