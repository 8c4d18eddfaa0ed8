//! Finite-rank algebras given by structure constants, their commutator and
//! nil-Poisson filtrations, associated graded algebras, and the contraction
//! test for endomorphisms inducing the identity modulo `F_1`.

use num::One;

use crate::error::AlgebraError;
use crate::freelie::factorial;
use crate::linalg::{format_rational, Rational, SparseMatrix, SparseVector, Span};

/// A unital algebra with basis `e_0, …, e_{dim-1}`.
///
/// `product[i][j]` is `e_i e_j` in coordinates. An optional `bracket` table
/// makes it a Poisson algebra. `grading` tags each basis element with a
/// degree when the basis is homogeneous for some grading.
#[derive(Clone, Debug, PartialEq)]
pub struct TruncatedAlgebra {
    labels: Vec<String>,
    product: Vec<Vec<SparseVector>>,
    unit: usize,
    bracket: Option<Vec<Vec<SparseVector>>>,
    grading: Option<Vec<usize>>,
}

fn check_table(dim: usize, table: &[Vec<SparseVector>]) -> Result<(), AlgebraError> {
    if table.len() != dim {
        return Err(AlgebraError::DimensionMismatch {
            expected: dim,
            found: table.len(),
        });
    }
    for row in table {
        if row.len() != dim {
            return Err(AlgebraError::DimensionMismatch {
                expected: dim,
                found: row.len(),
            });
        }
        if let Some(v) = row.iter().find(|v| v.dim() != dim) {
            return Err(AlgebraError::DimensionMismatch {
                expected: dim,
                found: v.dim(),
            });
        }
    }
    Ok(())
}

impl TruncatedAlgebra {
    /// Checks table shapes only; see [`TruncatedAlgebra::validate`] for the
    /// algebraic axioms.
    pub fn new(
        labels: Vec<String>,
        product: Vec<Vec<SparseVector>>,
        unit: usize,
        bracket: Option<Vec<Vec<SparseVector>>>,
    ) -> Result<Self, AlgebraError> {
        let dim = labels.len();
        check_table(dim, &product)?;
        if let Some(b) = &bracket {
            check_table(dim, b)?;
        }
        if unit >= dim {
            return Err(AlgebraError::InvalidAlgebra(format!(
                "unit index {unit} out of range for dimension {dim}"
            )));
        }
        Ok(TruncatedAlgebra {
            labels,
            product,
            unit,
            bracket,
            grading: None,
        })
    }

    /// Builds the tables from sparse `(i, j, k, c)` triples meaning
    /// `e_i e_j ∋ c e_k`.
    pub fn from_triples(
        labels: Vec<String>,
        unit: usize,
        product: &[(usize, usize, usize, Rational)],
        bracket: Option<&[(usize, usize, usize, Rational)]>,
    ) -> Result<Self, AlgebraError> {
        let dim = labels.len();
        let build = |triples: &[(usize, usize, usize, Rational)]| -> Result<Vec<Vec<SparseVector>>, AlgebraError> {
            let mut t = vec![vec![SparseVector::zero(dim); dim]; dim];
            for (i, j, k, c) in triples {
                if *i >= dim || *j >= dim || *k >= dim {
                    return Err(AlgebraError::InvalidAlgebra(format!(
                        "structure constant index ({i}, {j}, {k}) out of range for dimension {dim}"
                    )));
                }
                t[*i][*j].add_at(*k, c);
            }
            Ok(t)
        };
        let product = build(product)?;
        let bracket = bracket.map(build).transpose()?;
        Self::new(labels, product, unit, bracket)
    }

    pub fn with_grading(mut self, grading: Vec<usize>) -> Result<Self, AlgebraError> {
        if grading.len() != self.dim() {
            return Err(AlgebraError::DimensionMismatch {
                expected: self.dim(),
                found: grading.len(),
            });
        }
        self.grading = Some(grading);
        Ok(self)
    }

    pub fn dim(&self) -> usize {
        self.labels.len()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn unit(&self) -> usize {
        self.unit
    }

    pub fn unit_vector(&self) -> SparseVector {
        SparseVector::unit(self.dim(), self.unit)
    }

    pub fn basis_vector(&self, i: usize) -> SparseVector {
        SparseVector::unit(self.dim(), i)
    }

    pub fn grading(&self) -> Option<&[usize]> {
        self.grading.as_deref()
    }

    pub fn has_bracket(&self) -> bool {
        self.bracket.is_some()
    }

    pub fn product_of_basis(&self, i: usize, j: usize) -> &SparseVector {
        &self.product[i][j]
    }

    pub fn bracket_of_basis(&self, i: usize, j: usize) -> Option<&SparseVector> {
        self.bracket.as_ref().map(|b| &b[i][j])
    }

    /// Nonzero structure constants as `(i, j, k, c)`.
    pub fn product_triples(&self) -> Vec<(usize, usize, usize, Rational)> {
        triples(&self.product)
    }

    pub fn bracket_triples(&self) -> Option<Vec<(usize, usize, usize, Rational)>> {
        self.bracket.as_ref().map(|b| triples(b))
    }

    fn bilinear(&self, table: &[Vec<SparseVector>], a: &SparseVector, b: &SparseVector) -> SparseVector {
        let mut out = SparseVector::zero(self.dim());
        for (i, p) in a.iter() {
            for (j, q) in b.iter() {
                out.add_scaled(&table[i][j], &(p * q));
            }
        }
        out
    }

    pub fn mul(&self, a: &SparseVector, b: &SparseVector) -> SparseVector {
        self.bilinear(&self.product, a, b)
    }

    /// `ab − ba`.
    pub fn commutator(&self, a: &SparseVector, b: &SparseVector) -> SparseVector {
        let mut out = self.mul(a, b);
        out.add_scaled(&self.mul(b, a), &-Rational::one());
        out
    }

    /// The Poisson bracket, if the algebra carries one.
    pub fn bracket(&self, a: &SparseVector, b: &SparseVector) -> Option<SparseVector> {
        self.bracket.as_ref().map(|t| self.bilinear(t, a, b))
    }

    pub fn is_commutative(&self) -> bool {
        (0..self.dim()).all(|i| (i..self.dim()).all(|j| self.product[i][j] == self.product[j][i]))
    }

    /// Associativity on basis triples and the two unit laws.
    pub fn check_associative(&self) -> Result<(), AlgebraError> {
        let n = self.dim();
        for i in 0..n {
            if self.product[self.unit][i] != self.basis_vector(i) || self.product[i][self.unit] != self.basis_vector(i) {
                return Err(AlgebraError::InvalidAlgebra(format!(
                    "unit law fails at basis element {}",
                    self.labels[i]
                )));
            }
        }
        for i in 0..n {
            for j in 0..n {
                let ij = &self.product[i][j];
                for k in 0..n {
                    let left = self.mul(ij, &self.basis_vector(k));
                    let right = self.mul(&self.basis_vector(i), &self.product[j][k]);
                    if left != right {
                        return Err(AlgebraError::NotAssociative(i, j, k));
                    }
                }
            }
        }
        Ok(())
    }

    /// Antisymmetry, Jacobi and Leibniz on basis elements.
    pub fn check_bracket(&self) -> Result<(), AlgebraError> {
        let Some(table) = &self.bracket else {
            return Err(AlgebraError::InvalidBracket("no bracket present".into()));
        };
        let n = self.dim();
        let e = |i: usize| self.basis_vector(i);
        for i in 0..n {
            for j in 0..n {
                let mut s = table[i][j].clone();
                s.add_scaled(&table[j][i], &Rational::one());
                if !s.is_zero() {
                    return Err(AlgebraError::InvalidBracket(format!(
                        "not antisymmetric on ({}, {})",
                        self.labels[i], self.labels[j]
                    )));
                }
            }
        }
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    let br = |a: &SparseVector, b: &SparseVector| self.bilinear(table, a, b);
                    let mut jac = br(&e(i), &table[j][k]);
                    jac.add_scaled(&br(&e(j), &table[k][i]), &Rational::one());
                    jac.add_scaled(&br(&e(k), &table[i][j]), &Rational::one());
                    if !jac.is_zero() {
                        return Err(AlgebraError::InvalidBracket(format!(
                            "Jacobi fails on ({}, {}, {})",
                            self.labels[i], self.labels[j], self.labels[k]
                        )));
                    }
                    // {e_i, e_j e_k} = {e_i, e_j} e_k + e_j {e_i, e_k}
                    let lhs = br(&e(i), &self.product[j][k]);
                    let mut rhs = self.mul(&table[i][j], &e(k));
                    rhs.add_scaled(&self.mul(&e(j), &table[i][k]), &Rational::one());
                    if lhs != rhs {
                        return Err(AlgebraError::InvalidBracket(format!(
                            "Leibniz fails on ({}, {}, {})",
                            self.labels[i], self.labels[j], self.labels[k]
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    /// Associativity, unit laws and, if present, the Poisson axioms.
    pub fn validate(&self) -> Result<(), AlgebraError> {
        self.check_associative()?;
        if self.bracket.is_some() {
            if !self.is_commutative() {
                return Err(AlgebraError::InvalidBracket(
                    "a Poisson bracket needs a commutative product".into(),
                ));
            }
            self.check_bracket()?;
        }
        Ok(())
    }

    /// Span of the basis elements of degree at least `n` under the grading.
    pub fn degree_at_least(&self, n: usize) -> Option<Span> {
        let g = self.grading.as_ref()?;
        Some(Span::from_vectors(
            self.dim(),
            (0..self.dim()).filter(|&i| g[i] >= n).map(|i| self.basis_vector(i)),
        ))
    }
}

fn triples(table: &[Vec<SparseVector>]) -> Vec<(usize, usize, usize, Rational)> {
    let mut out = Vec::new();
    for (i, row) in table.iter().enumerate() {
        for (j, v) in row.iter().enumerate() {
            for (k, c) in v.iter() {
                out.push((i, j, k, c.clone()));
            }
        }
    }
    out
}

/// Descending chain `F_0 ⊇ F_1 ⊇ …`, stored up to the first index after
/// which it is constant.
#[derive(Clone, Debug)]
pub struct FiltrationChain {
    pieces: Vec<Span>,
}

impl FiltrationChain {
    /// A chain from explicit pieces; the last piece is taken as the stable
    /// value.
    pub fn from_pieces(pieces: Vec<Span>) -> Self {
        assert!(!pieces.is_empty(), "a filtration has at least F_0");
        FiltrationChain { pieces }
    }

    /// `F_n`; indices past the stored range return the stable value.
    pub fn piece(&self, n: usize) -> &Span {
        &self.pieces[n.min(self.pieces.len() - 1)]
    }

    pub fn pieces(&self) -> &[Span] {
        &self.pieces
    }

    /// Index from which the chain is constant.
    pub fn stable_index(&self) -> usize {
        self.pieces.len() - 1
    }

    pub fn ranks(&self) -> Vec<usize> {
        self.pieces.iter().map(Span::rank).collect()
    }

    /// True if the chain reaches zero.
    pub fn vanishes(&self) -> bool {
        self.pieces.last().is_some_and(Span::is_zero)
    }

    /// Least `d` with `F_{d+1} = 0`, if the chain vanishes.
    pub fn nil_order(&self) -> Option<usize> {
        if !self.vanishes() {
            return None;
        }
        let first_zero = self.pieces.iter().position(Span::is_zero).expect("vanishes");
        Some(first_zero.saturating_sub(1))
    }

    pub fn is_descending(&self) -> bool {
        self.pieces.windows(2).all(|w| w[0].contains_span(&w[1]))
    }
}

/// Which bilinear operation enters the second sum of the recursion.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FiltrationKind {
    /// `[a, b] = ab − ba`.
    Commutator,
    /// The Poisson bracket of the algebra.
    NilPoisson,
}

fn lie_op(alg: &TruncatedAlgebra, kind: FiltrationKind, a: &SparseVector, b: &SparseVector) -> SparseVector {
    match kind {
        FiltrationKind::Commutator => alg.commutator(a, b),
        FiltrationKind::NilPoisson => alg.bracket(a, b).expect("checked bracket"),
    }
}

/// Two-sided ideal generated by `span`.
pub fn two_sided_ideal(alg: &TruncatedAlgebra, span: &Span) -> Span {
    let mut ideal = Span::new(alg.dim());
    let mut queue: Vec<SparseVector> = span.basis().to_vec();
    while let Some(v) = queue.pop() {
        if !ideal.insert(&v) {
            continue;
        }
        for i in 0..alg.dim() {
            let e = alg.basis_vector(i);
            for w in [alg.mul(&e, &v), alg.mul(&v, &e)] {
                if !w.is_zero() && !ideal.contains(&w) {
                    queue.push(w);
                }
            }
        }
    }
    ideal
}

/// Span of `{ab : a ∈ A, b ∈ B}`.
pub fn product_span(alg: &TruncatedAlgebra, a: &Span, b: &Span) -> Span {
    let mut out = Span::new(alg.dim());
    for u in a.basis() {
        for v in b.basis() {
            out.insert(&alg.mul(u, v));
        }
    }
    out
}

fn lie_span(alg: &TruncatedAlgebra, kind: FiltrationKind, a: &Span, b: &Span) -> Span {
    let mut out = Span::new(alg.dim());
    for u in a.basis() {
        for v in b.basis() {
            out.insert(&lie_op(alg, kind, u, v));
        }
    }
    out
}

fn iterate(alg: &TruncatedAlgebra, kind: FiltrationKind) -> FiltrationChain {
    let dim = alg.dim();
    let full = Span::from_vectors(dim, (0..dim).map(|i| alg.basis_vector(i)));
    let mut pieces = vec![full];
    // once F_n = F_{2n} every later piece equals F_n as well
    loop {
        let n = pieces.len() - 1;
        if pieces[n].is_zero() {
            break;
        }
        if let Some(h) = (0..=n / 2).find(|&h| pieces[h] == pieces[n] && 2 * h <= n && h > 0) {
            pieces.truncate(h + 1);
            break;
        }
        let mut next = Span::new(dim);
        for p in 1..=n {
            next.extend_from(&product_span(alg, &pieces[p], &pieces[n + 1 - p]));
        }
        for p in 0..=n {
            let lie = lie_span(alg, kind, &pieces[p], &pieces[n - p]);
            next.extend_from(&two_sided_ideal(alg, &lie));
        }
        pieces.push(two_sided_ideal(alg, &next));
    }
    FiltrationChain { pieces }
}

/// The commutator filtration: `F_0 = R` and
/// `F_{n+1} = Σ_{p=1}^{n} F_p F_{n+1−p} + Σ_{p=0}^{n} ⟨[F_p, F_{n−p}]⟩`.
pub fn commutator_filtration(alg: &TruncatedAlgebra) -> Result<FiltrationChain, AlgebraError> {
    alg.check_associative()?;
    Ok(iterate(alg, FiltrationKind::Commutator))
}

/// The Poisson analogue with `⟨{F_p, F_{n−p}}⟩` in the second sum.
pub fn nil_poisson_filtration(alg: &TruncatedAlgebra) -> Result<FiltrationChain, AlgebraError> {
    alg.validate()?;
    if !alg.has_bracket() {
        return Err(AlgebraError::InvalidBracket("no bracket present".into()));
    }
    Ok(iterate(alg, FiltrationKind::NilPoisson))
}

/// Checks `F_p F_q ⊆ F_{p+q}` and `[F_p, F_q] ⊆ F_{p+q+1}` for all indices
/// up to the stable index.
pub fn is_admissible(alg: &TruncatedAlgebra, chain: &FiltrationChain, kind: FiltrationKind) -> bool {
    let top = chain.stable_index();
    chain.is_descending()
        && (0..=top).all(|p| {
            (0..=top).all(|q| {
                chain.piece(p + q).contains_span(&product_span(alg, chain.piece(p), chain.piece(q)))
                    && chain
                        .piece(p + q + 1)
                        .contains_span(&lie_span(alg, kind, chain.piece(p), chain.piece(q)))
            })
        })
}

/// The basis of `gr A` chosen by [`associated_graded`], as `(degree,
/// representative)` pairs in the original coordinates, unit first.
pub fn graded_representatives(alg: &TruncatedAlgebra, chain: &FiltrationChain) -> Vec<(usize, SparseVector)> {
    let mut reps = Vec::new();
    for n in 0..chain.stable_index() {
        let lower = chain.piece(n + 1);
        let mut seen = lower.clone();
        let candidates = std::iter::once(alg.unit_vector())
            .filter(|_| n == 0)
            .chain(chain.piece(n).basis().iter().cloned());
        for v in candidates {
            let r = lower.reduce(&v);
            if seen.insert(&r) {
                reps.push((n, r));
            }
        }
    }
    reps
}

/// The associated graded algebra `⊕ F_n / F_{n+1}` with the induced product
/// and the bracket induced by the commutator (or by the Poisson bracket for
/// [`FiltrationKind::NilPoisson`]), which raises the degree by one.
///
/// Basis elements are representatives of complements of `F_{n+1}` in `F_n`;
/// the unit comes first in degree zero.
pub fn associated_graded(
    alg: &TruncatedAlgebra,
    chain: &FiltrationChain,
    kind: FiltrationKind,
) -> Result<TruncatedAlgebra, AlgebraError> {
    if !is_admissible(alg, chain, kind) {
        return Err(AlgebraError::InvalidAlgebra(
            "chain is not a multiplicative filtration of the algebra".into(),
        ));
    }
    let top = chain.stable_index();
    // (degree, representative) pairs, and per-degree tracking spans with
    // F_{n+1} inserted first
    let mut reps: Vec<(usize, SparseVector)> = Vec::new();
    // per degree: tracking span with F_{n+1} inserted first, and the map
    // from generator index to representative index
    let mut solvers: Vec<(Span, Vec<Option<usize>>)> = Vec::new();
    for n in 0..top {
        let lower = chain.piece(n + 1);
        let mut solver = Span::tracking(alg.dim());
        let mut gen_to_rep = Vec::new();
        for r in lower.basis() {
            solver.insert(r);
            gen_to_rep.push(None);
        }
        let candidates = std::iter::once(alg.unit_vector())
            .filter(|_| n == 0)
            .chain(chain.piece(n).basis().iter().cloned());
        for v in candidates {
            let r = lower.reduce(&v);
            if solver.insert(&r) {
                gen_to_rep.push(Some(reps.len()));
                reps.push((n, r));
            } else {
                gen_to_rep.push(None);
            }
        }
        solvers.push((solver, gen_to_rep));
    }
    if reps.is_empty() || chain.piece(1).contains(&alg.unit_vector()) {
        return Err(AlgebraError::InvalidAlgebra(
            "the unit lies in F_1; the associated graded algebra is zero".into(),
        ));
    }
    let dim = reps.len();
    let project = |v: &SparseVector, m: usize| -> SparseVector {
        let mut out = SparseVector::zero(dim);
        if m >= top {
            return out;
        }
        let (solver, gen_to_rep) = &solvers[m];
        let coeffs = solver.solve(v).expect("lands in the expected piece");
        for (g, q) in coeffs.iter() {
            if let Some(Some(r)) = gen_to_rep.get(g) {
                out.add_at(*r, q);
            }
        }
        out
    };
    let mut product = vec![vec![SparseVector::zero(dim); dim]; dim];
    let mut bracket = vec![vec![SparseVector::zero(dim); dim]; dim];
    for (i, (p, a)) in reps.iter().enumerate() {
        for (j, (q, b)) in reps.iter().enumerate() {
            product[i][j] = project(&alg.mul(a, b), p + q);
            bracket[i][j] = project(&lie_op(alg, kind, a, b), p + q + 1);
        }
    }
    let labels = reps
        .iter()
        .map(|(n, v)| format!("[{}]_{n}", vector_label(alg, v)))
        .collect();
    let grading = reps.iter().map(|(n, _)| *n).collect();
    TruncatedAlgebra::new(labels, product, 0, Some(bracket))?.with_grading(grading)
}

fn vector_label(alg: &TruncatedAlgebra, v: &SparseVector) -> String {
    let parts: Vec<String> = v
        .iter()
        .map(|(i, q)| {
            if q.is_one() {
                alg.labels[i].clone()
            } else {
                format!("{}*{}", format_rational(q), alg.labels[i])
            }
        })
        .collect();
    parts.join(" + ")
}

/// A linear endomorphism; row `i` of `matrix` is the image of `e_i`.
#[derive(Clone, Debug, PartialEq)]
pub struct EndoMap {
    pub matrix: SparseMatrix,
}

impl EndoMap {
    pub fn identity(dim: usize) -> Self {
        EndoMap {
            matrix: SparseMatrix::identity(dim),
        }
    }

    pub fn from_images(images: Vec<SparseVector>) -> Result<Self, AlgebraError> {
        let dim = images.len();
        Ok(EndoMap {
            matrix: SparseMatrix::from_rows(dim, images)?,
        })
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    pub fn image(&self, i: usize) -> &SparseVector {
        self.matrix.row(i)
    }

    pub fn apply(&self, v: &SparseVector) -> SparseVector {
        let mut out = SparseVector::zero(self.dim());
        for (i, q) in v.iter() {
            out.add_scaled(self.matrix.row(i), q);
        }
        out
    }

    /// `exp(δ) = Σ δ^k / k!` for a nilpotent linear map `δ` (same row
    /// convention).
    pub fn exp_nilpotent(delta: &EndoMap) -> Result<Self, AlgebraError> {
        let dim = delta.dim();
        let mut images: Vec<SparseVector> = (0..dim).map(|i| SparseVector::unit(dim, i)).collect();
        let mut power: Vec<SparseVector> = images.clone();
        for k in 1..=dim + 1 {
            power = power.iter().map(|v| delta.apply(v)).collect();
            if power.iter().all(SparseVector::is_zero) {
                return EndoMap::from_images(images);
            }
            let inv = factorial(k).recip();
            for (img, p) in images.iter_mut().zip(&power) {
                img.add_scaled(p, &inv);
            }
        }
        Err(AlgebraError::NotEndomorphism("derivation is not nilpotent".into()))
    }

    /// `D = f − id`.
    pub fn minus_identity(&self) -> EndoMap {
        let images = (0..self.dim())
            .map(|i| {
                let mut v = self.image(i).clone();
                v.add_at(i, &-Rational::one());
                v
            })
            .collect();
        EndoMap::from_images(images).expect("square")
    }
}

/// `a ↦ {c, a}`.
pub fn hamiltonian_derivation(alg: &TruncatedAlgebra, c: &SparseVector) -> Result<EndoMap, AlgebraError> {
    if !alg.has_bracket() {
        return Err(AlgebraError::InvalidBracket("no bracket present".into()));
    }
    EndoMap::from_images(
        (0..alg.dim())
            .map(|i| alg.bracket(c, &alg.basis_vector(i)).expect("bracket"))
            .collect(),
    )
}

/// `a ↦ ca − ac`.
pub fn inner_derivation(alg: &TruncatedAlgebra, c: &SparseVector) -> EndoMap {
    EndoMap::from_images(
        (0..alg.dim())
            .map(|i| alg.commutator(c, &alg.basis_vector(i)))
            .collect(),
    )
    .expect("square")
}

/// Outcome of a successful contraction check.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ContractionReport {
    /// `D ≠ 0`.
    pub nontrivial: bool,
    /// Largest `n` with `D(F_n) ⊆ F_{n+1}` verified (all `n` up to the stable
    /// index).
    pub levels_checked: usize,
    /// `D` vanishes on the last nonzero piece, so `f` is the identity there.
    pub identity_on_top: bool,
}

/// Verifies that `f` is an endomorphism (bracket preserving for
/// [`FiltrationKind::NilPoisson`]) inducing the identity on `F_0/F_1`, then
/// checks for `D = id − f` the identities
/// `D{p,q} = {Dp,q} + {p,Dq} − {Dp,Dq}` and `D(pq) = p·Dq + Dp·q − Dp·Dq`
/// on basis pairs, and finally `D(F_n) ⊆ F_{n+1}` for every `n`.
///
/// With `D = f − id` the last terms change sign; the containments are the
/// same either way.
pub fn endo_contraction_check(
    alg: &TruncatedAlgebra,
    f: &EndoMap,
    chain: &FiltrationChain,
    kind: FiltrationKind,
) -> Result<ContractionReport, AlgebraError> {
    let n = alg.dim();
    if f.dim() != n {
        return Err(AlgebraError::DimensionMismatch {
            expected: n,
            found: f.dim(),
        });
    }
    if f.apply(&alg.unit_vector()) != alg.unit_vector() {
        return Err(AlgebraError::NotEndomorphism("unit not preserved".into()));
    }
    let e = |i: usize| alg.basis_vector(i);
    for i in 0..n {
        for j in 0..n {
            if f.apply(alg.product_of_basis(i, j)) != alg.mul(f.image(i), f.image(j)) {
                return Err(AlgebraError::NotEndomorphism(format!(
                    "not multiplicative on ({}, {})",
                    alg.labels[i], alg.labels[j]
                )));
            }
            if kind == FiltrationKind::NilPoisson {
                let b = alg.bracket_of_basis(i, j).ok_or_else(|| AlgebraError::InvalidBracket("no bracket present".into()))?;
                if f.apply(b) != alg.bracket(f.image(i), f.image(j)).expect("bracket") {
                    return Err(AlgebraError::NotEndomorphism(format!(
                        "bracket not preserved on ({}, {})",
                        alg.labels[i], alg.labels[j]
                    )));
                }
            }
        }
    }
    let d = EndoMap::from_images(
        (0..n).map(|i| f.minus_identity().image(i).scaled(&-Rational::one())).collect(),
    )?;
    let f1 = chain.piece(1);
    if let Some(i) = (0..n).find(|&i| !f1.contains(d.image(i))) {
        return Err(AlgebraError::NotIdentityModF1(format!(
            "f({}) − {} is not in F_1",
            alg.labels[i], alg.labels[i]
        )));
    }
    let one = Rational::one();
    for i in 0..n {
        for j in 0..n {
            let (di, dj) = (d.image(i), d.image(j));
            let mut rhs = alg.mul(di, &e(j));
            rhs.add_scaled(&alg.mul(&e(i), dj), &one);
            rhs.add_scaled(&alg.mul(di, dj), &-one.clone());
            if d.apply(alg.product_of_basis(i, j)) != rhs {
                return Err(AlgebraError::NotMultiplicative(format!(
                    "D(pq) identity fails on ({}, {})",
                    alg.labels[i], alg.labels[j]
                )));
            }
            let op = |a: &SparseVector, b: &SparseVector| lie_op(alg, kind, a, b);
            let mut rhs = op(di, &e(j));
            rhs.add_scaled(&op(&e(i), dj), &one);
            rhs.add_scaled(&op(di, dj), &-one.clone());
            if d.apply(&op(&e(i), &e(j))) != rhs {
                return Err(AlgebraError::NotMultiplicative(format!(
                    "D bracket identity fails on ({}, {})",
                    alg.labels[i], alg.labels[j]
                )));
            }
        }
    }
    let top = chain.stable_index();
    for level in 0..=top {
        let next = chain.piece(level + 1);
        if let Some(v) = chain.piece(level).basis().iter().find(|v| !next.contains(&d.apply(v))) {
            return Err(AlgebraError::NotMultiplicative(format!(
                "D does not map F_{level} into F_{}: fails on {}",
                level + 1,
                vector_label(alg, v)
            )));
        }
    }
    let last_nonzero = chain.pieces().iter().rposition(|s| !s.is_zero()).unwrap_or(0);
    let identity_on_top = chain.vanishes()
        && chain
            .piece(last_nonzero)
            .basis()
            .iter()
            .all(|v| d.apply(v).is_zero());
    Ok(ContractionReport {
        nontrivial: (0..n).any(|i| !d.image(i).is_zero()),
        levels_checked: top,
        identity_on_top,
    })
}

/// Upper-triangular `2×2` matrices with basis `e11, e12, e22`.
pub fn upper_triangular_2x2() -> TruncatedAlgebra {
    let one = Rational::one();
    // unit is e11 + e22, so use the basis 1 = e11 + e22, e11, e12
    let labels = vec!["1".to_string(), "e11".to_string(), "e12".to_string()];
    let mut triples = Vec::new();
    for i in 0..3 {
        triples.push((0, i, i, one.clone()));
        if i != 0 {
            triples.push((i, 0, i, one.clone()));
        }
    }
    triples.push((1, 1, 1, one.clone()));
    triples.push((1, 2, 2, one.clone()));
    TruncatedAlgebra::from_triples(labels, 0, &triples, None).expect("well formed")
}

/// A basis vector combination helper for tests and callers.
pub fn combination(dim: usize, terms: &[(usize, Rational)]) -> SparseVector {
    SparseVector::from_entries(dim, terms.iter().cloned())
}
