//! Exact sparse linear algebra over the rationals.
//!
//! Every computation in the crate reduces to rank, span-membership and
//! solve questions over ℚ. Vectors are sparse maps from coordinate index to a
//! nonzero [`Rational`]; matrices are stored as a list of sparse rows.

use std::collections::BTreeMap;
use std::fmt;

use num::{BigInt, BigRational, One, Zero};

use crate::error::AlgebraError;

/// Arbitrary-precision rational, always in lowest terms with positive denominator.
pub type Rational = BigRational;

/// Shorthand for the rational `numer / denom`.
///
/// Panics if `denom == 0`.
pub fn ratio(numer: i64, denom: i64) -> Rational {
    Rational::new(BigInt::from(numer), BigInt::from(denom))
}

/// The rational integer `n`.
pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// Renders a rational as `p` or `p/q`.
pub fn format_rational(q: &Rational) -> String {
    if q.is_integer() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

/// Parses `p` or `p/q` (optionally signed).
pub fn parse_rational(s: &str) -> Option<Rational> {
    let s = s.trim();
    let (n, d) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s, "1"),
    };
    let n: BigInt = n.parse().ok()?;
    let d: BigInt = d.parse().ok()?;
    if d.is_zero() {
        return None;
    }
    Some(Rational::new(n, d))
}

fn numerator_bits(q: &Rational) -> u64 {
    q.numer().bits()
}

/// A sparse vector of fixed dimension. Zero entries are never stored.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct SparseVector {
    dim: usize,
    entries: BTreeMap<usize, Rational>,
}

impl fmt::Debug for SparseVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "SparseVector[{}]{{", self.dim)?;
        for (i, (k, v)) in self.entries.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{k}: {}", format_rational(v))?;
        }
        write!(f, "}}")
    }
}

impl SparseVector {
    pub fn zero(dim: usize) -> Self {
        SparseVector {
            dim,
            entries: BTreeMap::new(),
        }
    }

    /// The standard basis vector `e_index`.
    pub fn unit(dim: usize, index: usize) -> Self {
        let mut v = Self::zero(dim);
        v.set(index, Rational::one());
        v
    }

    /// Builds a vector from `(index, value)` pairs, summing duplicates.
    pub fn from_entries<I>(dim: usize, entries: I) -> Self
    where
        I: IntoIterator<Item = (usize, Rational)>,
    {
        let mut v = Self::zero(dim);
        for (i, q) in entries {
            v.add_at(i, &q);
        }
        v
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn nnz(&self) -> usize {
        self.entries.len()
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, index: usize) -> Option<&Rational> {
        self.entries.get(&index)
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, &Rational)> + '_ {
        self.entries.iter().map(|(k, v)| (*k, v))
    }

    /// Smallest index carrying a nonzero entry.
    pub fn leading(&self) -> Option<(usize, &Rational)> {
        self.entries.iter().next().map(|(k, v)| (*k, v))
    }

    pub fn set(&mut self, index: usize, value: Rational) {
        assert!(index < self.dim, "index {index} out of range {}", self.dim);
        if value.is_zero() {
            self.entries.remove(&index);
        } else {
            self.entries.insert(index, value);
        }
    }

    pub fn add_at(&mut self, index: usize, value: &Rational) {
        assert!(index < self.dim, "index {index} out of range {}", self.dim);
        if value.is_zero() {
            return;
        }
        let slot = self.entries.entry(index).or_insert_with(Rational::zero);
        *slot += value;
        if slot.is_zero() {
            self.entries.remove(&index);
        }
    }

    /// `self += factor * other`.
    pub fn add_scaled(&mut self, other: &SparseVector, factor: &Rational) {
        if factor.is_zero() {
            return;
        }
        for (i, v) in other.iter() {
            self.add_at(i, &(v * factor));
        }
    }

    pub fn scaled(&self, factor: &Rational) -> SparseVector {
        let mut out = SparseVector::zero(self.dim);
        out.add_scaled(self, factor);
        out
    }

    /// Same entries viewed in a space of another dimension.
    pub fn with_dim(&self, dim: usize) -> SparseVector {
        assert!(self.entries.keys().all(|&k| k < dim));
        SparseVector {
            dim,
            entries: self.entries.clone(),
        }
    }

    /// Reindexes entries through `map`.
    pub fn remap(&self, dim: usize, map: impl Fn(usize) -> usize) -> SparseVector {
        SparseVector::from_entries(dim, self.iter().map(|(i, q)| (map(i), q.clone())))
    }

    /// Linear combination `Σ coeffs[i] * vectors[i]`.
    pub fn combine(dim: usize, vectors: &[SparseVector], coeffs: &SparseVector) -> SparseVector {
        let mut out = SparseVector::zero(dim);
        for (i, c) in coeffs.iter() {
            out.add_scaled(&vectors[i], c);
        }
        out
    }
}

/// A sparse matrix stored by rows.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SparseMatrix {
    rows: usize,
    cols: usize,
    data: Vec<SparseVector>,
}

impl SparseMatrix {
    pub fn zero(rows: usize, cols: usize) -> Self {
        SparseMatrix {
            rows,
            cols,
            data: vec![SparseVector::zero(cols); rows],
        }
    }

    pub fn identity(n: usize) -> Self {
        SparseMatrix {
            rows: n,
            cols: n,
            data: (0..n).map(|i| SparseVector::unit(n, i)).collect(),
        }
    }

    /// Builds a matrix from row vectors, all of dimension `cols`.
    pub fn from_rows(cols: usize, rows: Vec<SparseVector>) -> Result<Self, AlgebraError> {
        if let Some(bad) = rows.iter().find(|r| r.dim() != cols) {
            return Err(AlgebraError::DimensionMismatch {
                expected: cols,
                found: bad.dim(),
            });
        }
        Ok(SparseMatrix {
            rows: rows.len(),
            cols,
            data: rows,
        })
    }

    pub fn from_dense(rows: &[Vec<Rational>]) -> Self {
        let cols = rows.first().map_or(0, Vec::len);
        let data = rows
            .iter()
            .map(|r| SparseVector::from_entries(cols, r.iter().cloned().enumerate()))
            .collect();
        SparseMatrix {
            rows: rows.len(),
            cols,
            data,
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &SparseVector {
        &self.data[i]
    }

    pub fn row_vectors(&self) -> &[SparseVector] {
        &self.data
    }

    pub fn get(&self, i: usize, j: usize) -> Rational {
        self.data[i].get(j).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn set(&mut self, i: usize, j: usize, value: Rational) {
        self.data[i].set(j, value);
    }

    pub fn nnz(&self) -> usize {
        self.data.iter().map(SparseVector::nnz).sum()
    }

    pub fn transpose(&self) -> SparseMatrix {
        let mut t = SparseMatrix::zero(self.cols, self.rows);
        for (i, row) in self.data.iter().enumerate() {
            for (j, q) in row.iter() {
                t.data[j].set(i, q.clone());
            }
        }
        t
    }

    /// Matrix-vector product `self * v`.
    pub fn apply(&self, v: &SparseVector) -> SparseVector {
        assert_eq!(v.dim(), self.cols);
        let mut out = SparseVector::zero(self.rows);
        for (i, row) in self.data.iter().enumerate() {
            let mut acc = Rational::zero();
            for (j, q) in row.iter() {
                if let Some(x) = v.get(j) {
                    acc += q * x;
                }
            }
            out.set(i, acc);
        }
        out
    }

    /// Column `j` as a vector.
    pub fn column(&self, j: usize) -> SparseVector {
        SparseVector::from_entries(
            self.rows,
            self.data
                .iter()
                .enumerate()
                .filter_map(|(i, r)| r.get(j).map(|q| (i, q.clone()))),
        )
    }

    /// Matrix product `self * other`.
    pub fn mul(&self, other: &SparseMatrix) -> SparseMatrix {
        assert_eq!(self.cols, other.rows);
        let data = self
            .data
            .iter()
            .map(|row| {
                let mut out = SparseVector::zero(other.cols);
                for (k, q) in row.iter() {
                    out.add_scaled(&other.data[k], q);
                }
                out
            })
            .collect();
        SparseMatrix {
            rows: self.rows,
            cols: other.cols,
            data,
        }
    }
}

/// Rank over ℚ by Gaussian elimination.
///
/// Columns are processed left to right; among the candidate pivot rows the one
/// whose entry has the smallest numerator bit-length wins, ties going to the
/// lower row index.
pub fn rank(m: &SparseMatrix) -> usize {
    let mut pending: Vec<SparseVector> = m.data.iter().filter(|r| !r.is_zero()).cloned().collect();
    let mut rank = 0;
    for col in 0..m.cols {
        let pivot = pending
            .iter()
            .enumerate()
            .filter_map(|(i, r)| r.get(col).map(|q| (numerator_bits(q), i)))
            .min();
        let Some((_, pivot_idx)) = pivot else {
            continue;
        };
        let pivot_row = pending.swap_remove(pivot_idx);
        let pivot_val = pivot_row.get(col).cloned().expect("pivot entry");
        for row in pending.iter_mut() {
            if let Some(q) = row.get(col).cloned() {
                row.add_scaled(&pivot_row, &(-(q / &pivot_val)));
            }
        }
        pending.retain(|r| !r.is_zero());
        rank += 1;
        if pending.is_empty() {
            break;
        }
    }
    rank
}

/// Basis of the right kernel `{ v : m v = 0 }`.
pub fn kernel(m: &SparseMatrix) -> Vec<SparseVector> {
    let span = Span::from_vectors(m.cols, m.data.iter().cloned());
    let rref = span.reduced_rows();
    let pivot_cols: BTreeMap<usize, &SparseVector> =
        rref.iter().map(|r| (r.leading().expect("nonzero row").0, r)).collect();
    (0..m.cols)
        .filter(|c| !pivot_cols.contains_key(c))
        .map(|free| {
            let mut v = SparseVector::unit(m.cols, free);
            for (&pc, row) in &pivot_cols {
                if let Some(q) = row.get(free) {
                    v.set(pc, -q.clone());
                }
            }
            v
        })
        .collect()
}

/// Expresses `target` in the span of `basis`.
///
/// Returns `Ok(None)` when `target` is not in the span. When the basis is
/// linearly dependent the returned coefficients vanish on the dependent
/// vectors (in insertion order).
pub fn solve_in_span(
    basis: &[SparseVector],
    target: &SparseVector,
) -> Result<Option<Vec<Rational>>, AlgebraError> {
    let dim = target.dim();
    if let Some(bad) = basis.iter().find(|b| b.dim() != dim) {
        return Err(AlgebraError::DimensionMismatch {
            expected: dim,
            found: bad.dim(),
        });
    }
    let mut span = Span::tracking(dim);
    for b in basis {
        span.insert(b);
    }
    Ok(span.solve(target).map(|c| {
        (0..basis.len())
            .map(|i| c.get(i).cloned().unwrap_or_else(Rational::zero))
            .collect()
    }))
}

/// Row-echelon span of a growing set of vectors.
///
/// Each stored row has a distinct leading column. With tracking enabled, every
/// row also records its expression in terms of the inserted generators so that
/// membership queries can return coefficients.
#[derive(Clone, Debug)]
pub struct Span {
    dim: usize,
    rows: Vec<SparseVector>,
    pivot_of: BTreeMap<usize, usize>,
    combos: Option<Vec<SparseVector>>,
    generators: usize,
}

impl Span {
    pub fn new(dim: usize) -> Self {
        Span {
            dim,
            rows: Vec::new(),
            pivot_of: BTreeMap::new(),
            combos: None,
            generators: 0,
        }
    }

    /// A span that remembers how each row arises from the inserted vectors.
    pub fn tracking(dim: usize) -> Self {
        Span {
            combos: Some(Vec::new()),
            ..Span::new(dim)
        }
    }

    pub fn from_vectors<I: IntoIterator<Item = SparseVector>>(dim: usize, vectors: I) -> Self {
        let mut s = Span::new(dim);
        for v in vectors {
            s.insert(&v);
        }
        s
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn is_zero(&self) -> bool {
        self.rows.is_empty()
    }

    /// Echelon basis rows.
    pub fn basis(&self) -> &[SparseVector] {
        &self.rows
    }

    pub fn pivot_columns(&self) -> impl Iterator<Item = usize> + '_ {
        self.pivot_of.keys().copied()
    }

    fn reduce_tracked(&self, v: &SparseVector, mut combo: Option<&mut SparseVector>) -> SparseVector {
        assert_eq!(v.dim(), self.dim, "dimension mismatch in span reduction");
        let mut rem = v.clone();
        let mut from = 0;
        loop {
            let hit = rem
                .entries
                .range(from..)
                .find(|(c, _)| self.pivot_of.contains_key(c))
                .map(|(c, q)| (*c, q.clone()));
            let Some((col, q)) = hit else {
                break;
            };
            let r = self.pivot_of[&col];
            let row = &self.rows[r];
            let factor = -(q / row.get(col).expect("pivot entry"));
            rem.add_scaled(row, &factor);
            if let (Some(c), Some(combos)) = (combo.as_deref_mut(), self.combos.as_ref()) {
                c.add_scaled(&combos[r], &factor);
            }
            from = col + 1;
        }
        rem
    }

    /// Remainder of `v` after eliminating every pivot column.
    pub fn reduce(&self, v: &SparseVector) -> SparseVector {
        self.reduce_tracked(v, None)
    }

    pub fn contains(&self, v: &SparseVector) -> bool {
        self.reduce(v).is_zero()
    }

    /// True if every vector of `other` lies in `self`.
    pub fn contains_span(&self, other: &Span) -> bool {
        other.rows.iter().all(|r| self.contains(r))
    }

    /// Inserts `v` as the next generator; returns whether it enlarged the span.
    pub fn insert(&mut self, v: &SparseVector) -> bool {
        let g = self.generators;
        self.generators += 1;
        let mut combo = self.combos.as_ref().map(|_| SparseVector::zero(usize::MAX));
        let rem = self.reduce_tracked(v, combo.as_mut());
        if rem.is_zero() {
            return false;
        }
        let lead = rem.leading().expect("nonzero").0;
        self.pivot_of.insert(lead, self.rows.len());
        self.rows.push(rem);
        if let (Some(combos), Some(mut c)) = (self.combos.as_mut(), combo) {
            // the fresh generator enters with coefficient one
            c.add_at(g, &Rational::one());
            combos.push(c);
        }
        true
    }

    /// Coefficients over the inserted generators reproducing `v`, if `v` lies
    /// in the span. Requires a tracking span.
    pub fn solve(&self, v: &SparseVector) -> Option<SparseVector> {
        assert!(self.combos.is_some(), "solve requires a tracking span");
        let mut combo = SparseVector::zero(usize::MAX);
        let rem = self.reduce_tracked(v, Some(&mut combo));
        if !rem.is_zero() {
            return None;
        }
        // reduce_tracked accumulated the combination of -v; flip it
        Some(combo.scaled(&-Rational::one()).with_dim(self.generators.max(1)))
    }

    /// Fully reduced rows with unit pivots (reduced row-echelon form).
    pub fn reduced_rows(&self) -> Vec<SparseVector> {
        let mut order: Vec<usize> = self.pivot_of.keys().copied().collect();
        order.reverse();
        let mut done: BTreeMap<usize, SparseVector> = BTreeMap::new();
        for col in order {
            let mut row = self.rows[self.pivot_of[&col]].clone();
            let lead = row.get(col).cloned().expect("pivot");
            row = row.scaled(&lead.recip());
            let later: Vec<(usize, Rational)> = row
                .iter()
                .filter(|(c, _)| *c != col && done.contains_key(c))
                .map(|(c, q)| (c, q.clone()))
                .collect();
            for (c, q) in later {
                row.add_scaled(&done[&c], &-q);
            }
            done.insert(col, row);
        }
        done.into_values().collect()
    }

    /// Adds all vectors of `other`.
    pub fn extend_from(&mut self, other: &Span) {
        for r in &other.rows {
            self.insert(r);
        }
    }
}

impl PartialEq for Span {
    fn eq(&self, other: &Self) -> bool {
        self.dim == other.dim
            && self.rank() == other.rank()
            && self.contains_span(other)
    }
}

/// Splits the span of `vectors` against a coordinate subspace.
///
/// Returns a basis of `span(vectors) ∩ span{ e_i : keep(i) }`. Columns outside
/// the subspace are eliminated first, so every echelon row whose pivot falls
/// inside it lies entirely inside it.
pub fn intersect_with_coordinates(
    dim: usize,
    vectors: impl IntoIterator<Item = SparseVector>,
    keep: impl Fn(usize) -> bool,
) -> Vec<SparseVector> {
    let (outside, inside): (Vec<usize>, Vec<usize>) = (0..dim).partition(|&i| !keep(i));
    let order: Vec<usize> = outside.iter().chain(inside.iter()).copied().collect();
    let mut position = vec![0; dim];
    for (p, &c) in order.iter().enumerate() {
        position[c] = p;
    }
    let boundary = outside.len();
    let span = Span::from_vectors(dim, vectors.into_iter().map(|v| v.remap(dim, |i| position[i])));
    span.basis()
        .iter()
        .filter(|r| r.leading().is_some_and(|(c, _)| c >= boundary))
        .map(|r| r.remap(dim, |p| order[p]))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(dim: usize, xs: &[i64]) -> SparseVector {
        SparseVector::from_entries(dim, xs.iter().enumerate().map(|(i, &x)| (i, int(x))))
    }

    #[test]
    fn rank_examples() {
        assert_eq!(rank(&SparseMatrix::zero(3, 3)), 0);
        assert_eq!(rank(&SparseMatrix::identity(4)), 4);
        let m = SparseMatrix::from_dense(&[vec![int(1), int(2)], vec![int(2), int(4)]]);
        assert_eq!(rank(&m), 1);
    }

    #[test]
    fn solve_examples() {
        let e1 = v(2, &[1, 0]);
        let e2 = v(2, &[0, 1]);
        assert_eq!(solve_in_span(std::slice::from_ref(&e1), &e1).unwrap(), Some(vec![int(1)]));
        assert_eq!(solve_in_span(std::slice::from_ref(&e1), &e2).unwrap(), None);
        let plus = v(2, &[1, 1]);
        let minus = v(2, &[1, -1]);
        assert_eq!(
            solve_in_span(&[plus, minus], &e1).unwrap(),
            Some(vec![ratio(1, 2), ratio(1, 2)])
        );
    }

    #[test]
    fn solve_rejects_mixed_dimensions() {
        let err = solve_in_span(&[v(3, &[1, 0, 0])], &v(2, &[1, 0])).unwrap_err();
        assert!(matches!(err, AlgebraError::DimensionMismatch { .. }));
    }

    #[test]
    fn dependent_basis_gets_zero_coefficients() {
        let a = v(2, &[1, 0]);
        let coeffs = solve_in_span(&[a.clone(), a.scaled(&int(2)), v(2, &[0, 1])], &v(2, &[3, 5]))
            .unwrap()
            .unwrap();
        assert_eq!(coeffs, vec![int(3), int(0), int(5)]);
    }

    #[test]
    fn kernel_of_rank_one() {
        let m = SparseMatrix::from_dense(&[vec![int(1), int(2), int(3)], vec![int(2), int(4), int(6)]]);
        let k = kernel(&m);
        assert_eq!(k.len(), 2);
        for x in &k {
            assert!(m.apply(x).is_zero());
        }
    }

    #[test]
    fn coordinate_intersection() {
        // span{e0 + e1, e1 + e2, e0 - e2} ∩ span{e1, e2}: the first and third
        // generators combine to e1 + e2, which is also the second one
        let vs = vec![v(3, &[1, 1, 0]), v(3, &[0, 1, 1]), v(3, &[1, 0, -1])];
        let inter = intersect_with_coordinates(3, vs, |i| i >= 1);
        assert_eq!(inter.len(), 1);
        assert!(inter[0].get(0).is_none());
    }

    #[test]
    fn reduced_rows_have_unit_pivots() {
        let s = Span::from_vectors(3, vec![v(3, &[2, 4, 0]), v(3, &[0, 3, 3])]);
        let r = s.reduced_rows();
        assert_eq!(r[0], v(3, &[1, 0, -2]));
        assert_eq!(r[1], v(3, &[0, 1, 1]));
    }
}

#[cfg(test)]
mod props {
    use super::*;
    use proptest::prelude::*;

    fn matrix() -> impl Strategy<Value = SparseMatrix> {
        (1usize..=50, 1usize..=50).prop_flat_map(|(r, c)| {
            proptest::collection::vec((0..r, 0..c, -4i64..=4, 1i64..=3), 0..=(r * c).min(120))
                .prop_map(move |trip| {
                    let mut m = SparseMatrix::zero(r, c);
                    for (i, j, n, d) in trip {
                        m.set(i, j, ratio(n, d));
                    }
                    m
                })
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn rank_is_transpose_invariant(m in matrix()) {
            prop_assert_eq!(rank(&m), rank(&m.transpose()));
        }

        #[test]
        fn solutions_recombine_exactly(m in matrix(), pick in proptest::collection::vec(-3i64..=3, 50)) {
            let basis = m.row_vectors().to_vec();
            let mut target = SparseVector::zero(m.cols());
            for (row, c) in basis.iter().zip(&pick) {
                target.add_scaled(row, &int(*c));
            }
            let coeffs = solve_in_span(&basis, &target).unwrap().expect("target built in span");
            let mut back = SparseVector::zero(m.cols());
            for (row, c) in basis.iter().zip(&coeffs) {
                back.add_scaled(row, c);
            }
            prop_assert_eq!(back, target);
        }

        #[test]
        fn span_rank_matches_elimination_rank(m in matrix()) {
            let span = Span::from_vectors(m.cols(), m.row_vectors().iter().cloned());
            prop_assert_eq!(span.rank(), rank(&m));
            prop_assert_eq!(kernel(&m).len() + span.rank(), m.cols());
        }
    }
}
