//! Truncated Poisson envelopes `PA / P_{>d}A` of finitely presented
//! commutative algebras `A = SV / I`, computed in finite windows of `SLV`.
//!
//! A window fixes a star degree bound `d` and a weight bound `N` (weight is
//! the total letter count of a monomial, see [`crate::freepoisson`]). The
//! Poisson ideal `⟨⟨I⟩⟩` is homogeneous for the star degree. For relations
//! homogeneous in weight it is also weight homogeneous, and the window
//! quotient is exact. Otherwise ideal generators are multiplied up to weight
//! `N + s` and intersected with the window, which only gives a lower bound
//! on the ideal.

use std::collections::{BTreeMap, HashMap};

use indexmap::IndexMap;
use num::{One, Zero};

use crate::error::AlgebraError;
use crate::filtration::TruncatedAlgebra;
use crate::freelie::{lie_bracket, lie_generator, LieElement, LyndonWord};
use crate::freepoisson::{
    from_lie, generator, monomials_up_to_weight, multiply, nested_bracket, one, poisson_bracket,
    poisson_hom, truncate_star, PoissonElement, PoissonMonomial,
};
use crate::linalg::{intersect_with_coordinates, Rational, SparseMatrix, SparseVector, Span};

/// Generators, polynomial relations and window bounds.
#[derive(Clone, Debug, PartialEq)]
pub struct EnvelopePresentation {
    n_gens: u8,
    relations: Vec<PoissonElement>,
    d: usize,
    max_weight: usize,
    slack: Option<usize>,
}

/// Whether a window computation is exact or only bounds the ideal from
/// below (and so the quotient rank from above).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Exactness {
    Exact,
    IdealLowerBound,
}

impl Exactness {
    pub fn as_str(self) -> &'static str {
        match self {
            Exactness::Exact => "exact",
            Exactness::IdealLowerBound => "lower-bound",
        }
    }
}

fn is_polynomial(a: &PoissonElement) -> bool {
    a.keys().all(|m| m.lie_factor_count() == 0)
}

fn is_weight_homogeneous(a: &PoissonElement) -> bool {
    let mut w = a.keys().map(PoissonMonomial::weight);
    match w.next() {
        Some(first) => w.all(|x| x == first),
        None => true,
    }
}

fn max_weight_of(a: &PoissonElement) -> usize {
    a.keys().map(PoissonMonomial::weight).max().unwrap_or(0)
}

impl EnvelopePresentation {
    /// Relations must be nonzero polynomials in `x_1..x_{n_gens}` of degree at
    /// most `max_weight`.
    pub fn new(
        n_gens: u8,
        relations: Vec<PoissonElement>,
        d: usize,
        max_weight: usize,
    ) -> Result<Self, AlgebraError> {
        if n_gens == 0 {
            return Err(AlgebraError::InvalidPresentation("at least one generator is required".into()));
        }
        for (k, f) in relations.iter().enumerate() {
            if f.is_zero() {
                return Err(AlgebraError::InvalidPresentation(format!("relation {} is zero", k + 1)));
            }
            if !is_polynomial(f) {
                return Err(AlgebraError::InvalidPresentation(format!(
                    "relation {} is not a polynomial in the generators",
                    k + 1
                )));
            }
            let top = f.keys().map(PoissonMonomial::max_letter).max().unwrap_or(0);
            if top > n_gens {
                return Err(AlgebraError::UnknownGenerator {
                    index: top as usize,
                    n_gens: n_gens as usize,
                });
            }
            if max_weight_of(f) > max_weight {
                return Err(AlgebraError::InvalidPresentation(format!(
                    "relation {} has degree {} above the window bound {max_weight}",
                    k + 1,
                    max_weight_of(f)
                )));
            }
        }
        Ok(EnvelopePresentation {
            n_gens,
            relations,
            d,
            max_weight,
            slack: None,
        })
    }

    /// Overrides the default slack (the largest relation degree) used for
    /// inhomogeneous relations.
    pub fn with_slack(mut self, slack: usize) -> Self {
        self.slack = Some(slack);
        self
    }

    pub fn n_gens(&self) -> u8 {
        self.n_gens
    }

    pub fn relations(&self) -> &[PoissonElement] {
        &self.relations
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn max_weight(&self) -> usize {
        self.max_weight
    }

    pub fn with_bounds(&self, d: usize, max_weight: usize) -> Result<Self, AlgebraError> {
        let mut p = Self::new(self.n_gens, self.relations.clone(), d, max_weight)?;
        p.slack = self.slack;
        Ok(p)
    }

    pub fn is_homogeneous(&self) -> bool {
        self.relations.iter().all(is_weight_homogeneous)
    }

    pub fn exactness(&self) -> Exactness {
        if self.is_homogeneous() {
            Exactness::Exact
        } else {
            Exactness::IdealLowerBound
        }
    }

    fn slack(&self) -> usize {
        if self.is_homogeneous() {
            0
        } else {
            self.slack
                .unwrap_or_else(|| self.relations.iter().map(max_weight_of).max().unwrap_or(0))
        }
    }
}

/// All tuples in `1..=n_gens` of length `k`.
fn tuples(n_gens: u8, k: usize) -> Vec<Vec<u8>> {
    let mut out = vec![Vec::new()];
    for _ in 0..k {
        out = out
            .into_iter()
            .flat_map(|t| {
                (1..=n_gens).map(move |i| {
                    let mut t = t.clone();
                    t.push(i);
                    t
                })
            })
            .collect();
    }
    out
}

/// `g_i(x_{j_1}, …, x_{j_k}; y)`: the right-nested bracket of the `x`'s with
/// `y` inserted after the first `i` of them.
pub fn ideal_generator(js: &[u8], i: usize, y: &PoissonElement) -> PoissonElement {
    let mut leaves: Vec<PoissonElement> = js.iter().map(|&j| generator(j)).collect();
    leaves.insert(i, y.clone());
    nested_bracket(&leaves)
}

/// The ideal generators of star degree `n`: every `g_i(x_{j_1..j_n}; f)` for
/// each relation `f`, each tuple of generators and `0 ≤ i ≤ n`. Zero
/// elements are dropped.
pub fn poisson_ideal_generators(pres: &EnvelopePresentation, n: usize) -> Result<Vec<PoissonElement>, AlgebraError> {
    if n > pres.d {
        return Err(AlgebraError::DegreeOutOfRange {
            requested: n,
            bound: pres.d,
        });
    }
    let mut out = Vec::new();
    for f in &pres.relations {
        for js in tuples(pres.n_gens, n) {
            for i in 0..=n {
                let g = ideal_generator(&js, i, f);
                if !g.is_zero() {
                    out.push(g);
                }
            }
        }
    }
    Ok(out)
}

/// One star degree of a truncated envelope.
#[derive(Clone, Debug, PartialEq)]
pub struct GradedQuotientPiece {
    pub star_degree: usize,
    /// Monomials of this star degree and weight at most `N`.
    pub ambient_basis: Vec<PoissonMonomial>,
    /// Echelon basis of the ideal inside the window, one row per vector.
    pub ideal_span: SparseMatrix,
    pub quotient_rank: usize,
    pub exactness: Exactness,
}

fn coordinates(a: &PoissonElement, index: &IndexMap<PoissonMonomial, usize>) -> SparseVector {
    SparseVector::from_entries(
        index.len(),
        a.iter().map(|(m, q)| (*index.get(m).expect("term inside the ambient window"), q.clone())),
    )
}

/// Ideal inside the window of star degree `n`, as vectors over `ambient`.
fn ideal_block(pres: &EnvelopePresentation, n: usize, ambient: &[PoissonMonomial]) -> Span {
    let index: IndexMap<PoissonMonomial, usize> = ambient.iter().cloned().enumerate().map(|(i, m)| (m, i)).collect();
    let mut span = Span::new(ambient.len());
    if pres.relations.is_empty() {
        return span;
    }
    let cap = pres.max_weight + pres.slack();
    let multipliers = monomials_up_to_weight(pres.n_gens, cap);
    let mut products = Vec::new();
    for k in 0..=n {
        let gens = poisson_ideal_generators(pres, k).expect("k ≤ n ≤ d");
        for g in &gens {
            let gw = max_weight_of(g);
            for m in multipliers.iter().filter(|m| m.star_degree() == n - k && m.weight() + gw <= cap) {
                products.push(multiply(&PoissonElement::basis(m.clone()), g));
            }
        }
    }
    if pres.is_homogeneous() {
        for p in &products {
            span.insert(&coordinates(p, &index));
        }
        return span;
    }
    // inhomogeneous: work in the larger window and keep what falls inside
    let big: Vec<PoissonMonomial> = multipliers.into_iter().filter(|m| m.star_degree() == n).collect();
    let big_index: IndexMap<PoissonMonomial, usize> = big.iter().cloned().enumerate().map(|(i, m)| (m, i)).collect();
    let inside = intersect_with_coordinates(
        big.len(),
        products.iter().map(|p| coordinates(p, &big_index)),
        |i| big[i].weight() <= pres.max_weight,
    );
    for v in inside {
        span.insert(&SparseVector::from_entries(
            ambient.len(),
            v.iter().map(|(i, q)| (index[&big[i]], q.clone())),
        ));
    }
    span
}

fn ambient_monomials(n_gens: u8, star: usize, max_weight: usize) -> Vec<PoissonMonomial> {
    monomials_up_to_weight(n_gens, max_weight)
        .into_iter()
        .filter(|m| m.star_degree() == star)
        .collect()
}

/// Window quotients of `S_nLV` by the Poisson ideal, for every `n ≤ d`.
pub fn envelope_truncated(pres: &EnvelopePresentation) -> Vec<GradedQuotientPiece> {
    (0..=pres.d)
        .map(|n| {
            let ambient = ambient_monomials(pres.n_gens, n, pres.max_weight);
            let span = ideal_block(pres, n, &ambient);
            let rows = span.basis().to_vec();
            GradedQuotientPiece {
                star_degree: n,
                quotient_rank: ambient.len() - span.rank(),
                ideal_span: SparseMatrix::from_rows(ambient.len(), rows).expect("same width"),
                ambient_basis: ambient,
                exactness: pres.exactness(),
            }
        })
        .collect()
}

/// The whole window `star ≤ d, weight ≤ N` modulo the ideal, with normal
/// forms.
#[derive(Clone, Debug)]
pub struct PoissonWindow {
    n_gens: u8,
    d: usize,
    max_weight: usize,
    ambient: IndexMap<PoissonMonomial, usize>,
    ideal: Span,
    /// Ambient indices of the quotient basis (the non-pivot monomials).
    basis: Vec<usize>,
    position: HashMap<usize, usize>,
    exactness: Exactness,
}

impl PoissonWindow {
    pub fn new(pres: &EnvelopePresentation) -> Self {
        let mut ambient: Vec<PoissonMonomial> = monomials_up_to_weight(pres.n_gens, pres.max_weight)
            .into_iter()
            .filter(|m| m.star_degree() <= pres.d)
            .collect();
        ambient.sort_by(|a, b| (a.star_degree(), a.weight(), a).cmp(&(b.star_degree(), b.weight(), b)));
        let index: IndexMap<PoissonMonomial, usize> = ambient.iter().cloned().enumerate().map(|(i, m)| (m, i)).collect();
        let mut ideal = Span::new(ambient.len());
        for n in 0..=pres.d {
            let block: Vec<PoissonMonomial> = ambient.iter().filter(|m| m.star_degree() == n).cloned().collect();
            let span = ideal_block(pres, n, &block);
            for r in span.basis() {
                ideal.insert(&r.remap(ambient.len(), |i| index[&block[i]]));
            }
        }
        let pivots: std::collections::BTreeSet<usize> = ideal.pivot_columns().collect();
        let basis: Vec<usize> = (0..ambient.len()).filter(|i| !pivots.contains(i)).collect();
        let position = basis.iter().enumerate().map(|(p, &i)| (i, p)).collect();
        PoissonWindow {
            n_gens: pres.n_gens,
            d: pres.d,
            max_weight: pres.max_weight,
            ambient: index,
            ideal,
            basis,
            position,
            exactness: pres.exactness(),
        }
    }

    /// The free window: no relations.
    pub fn free(n_gens: u8, d: usize, max_weight: usize) -> Self {
        let pres = EnvelopePresentation::new(n_gens, Vec::new(), d, max_weight).expect("no relations");
        Self::new(&pres)
    }

    pub fn n_gens(&self) -> u8 {
        self.n_gens
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn max_weight(&self) -> usize {
        self.max_weight
    }

    pub fn exactness(&self) -> Exactness {
        self.exactness
    }

    /// Dimension of the quotient.
    pub fn rank(&self) -> usize {
        self.basis.len()
    }

    /// Quotient basis monomials.
    pub fn basis_monomials(&self) -> Vec<PoissonMonomial> {
        self.basis.iter().map(|&i| self.ambient.get_index(i).expect("index").0.clone()).collect()
    }

    pub fn basis_monomial(&self, i: usize) -> &PoissonMonomial {
        self.ambient.get_index(self.basis[i]).expect("index").0
    }

    /// Coordinates in the quotient basis after dropping terms outside the
    /// window.
    pub fn project(&self, a: &PoissonElement) -> SparseVector {
        let v = SparseVector::from_entries(
            self.ambient.len(),
            a.iter().filter_map(|(m, q)| self.ambient.get(m).map(|&i| (i, q.clone()))),
        );
        let r = self.ideal.reduce(&v);
        SparseVector::from_entries(self.rank(), r.iter().map(|(i, q)| (self.position[&i], q.clone())))
    }

    /// Normal form of `a` in the window.
    pub fn normal_form(&self, a: &PoissonElement) -> PoissonElement {
        self.lift(&self.project(a))
    }

    pub fn lift(&self, v: &SparseVector) -> PoissonElement {
        v.iter().map(|(i, q)| (self.basis_monomial(i).clone(), q.clone())).collect()
    }

    /// True if `a` vanishes in the window quotient.
    pub fn is_zero(&self, a: &PoissonElement) -> bool {
        self.project(a).is_zero()
    }

    /// The window as a finite-dimensional algebra with the given product
    /// and optional bracket on basis monomials, graded by star degree.
    pub fn algebra_with(
        &self,
        product: impl Fn(&PoissonMonomial, &PoissonMonomial) -> PoissonElement,
        bracket: Option<&dyn Fn(&PoissonMonomial, &PoissonMonomial) -> PoissonElement>,
    ) -> Result<TruncatedAlgebra, AlgebraError> {
        if self.exactness != Exactness::Exact {
            return Err(AlgebraError::InvalidPresentation(
                "window algebras need relations homogeneous in degree".into(),
            ));
        }
        let monos = self.basis_monomials();
        let unit = monos
            .iter()
            .position(PoissonMonomial::is_one)
            .ok_or_else(|| AlgebraError::InvalidPresentation("the relations generate the unit ideal".into()))?;
        let table = |f: &dyn Fn(&PoissonMonomial, &PoissonMonomial) -> PoissonElement| -> Vec<Vec<SparseVector>> {
            monos
                .iter()
                .map(|a| monos.iter().map(|b| self.project(&f(a, b))).collect())
                .collect()
        };
        let product = table(&product);
        let bracket = bracket.map(table);
        let labels = monos.iter().map(|m| format!("{m:?}")).collect();
        TruncatedAlgebra::new(labels, product, unit, bracket)?
            .with_grading(monos.iter().map(PoissonMonomial::star_degree).collect())
    }

    /// The window of `PA / P_{>d}A` as a Poisson algebra.
    pub fn poisson_algebra(&self) -> Result<TruncatedAlgebra, AlgebraError> {
        let bracket = |a: &PoissonMonomial, b: &PoissonMonomial| {
            poisson_bracket(&PoissonElement::basis(a.clone()), &PoissonElement::basis(b.clone()))
        };
        self.algebra_with(
            |a, b| PoissonElement::basis(a.mul(b)),
            Some(&bracket),
        )
    }

    /// Matrix (row convention) of a linear map of `SLV` preserving the
    /// window ideals.
    pub fn matrix_of(&self, f: impl Fn(&PoissonElement) -> PoissonElement) -> Vec<SparseVector> {
        self.basis_monomials()
            .into_iter()
            .map(|m| self.project(&f(&PoissonElement::basis(m))))
            .collect()
    }
}

/// Ranks of `P_1A` computed two ways.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct P1Check {
    /// From the envelope window at star degree one.
    pub computed_rank: usize,
    /// From `Ω²_A = Ω²_{SV} / (I Ω²_{SV} + dI ∧ Ω¹_{SV})` in the same window.
    pub omega2_rank: usize,
    pub exactness: Exactness,
}

type ExpPoly = BTreeMap<Vec<u32>, Rational>;

fn to_exponents(n: usize, f: &PoissonElement) -> ExpPoly {
    let mut out = ExpPoly::new();
    for (m, q) in f.iter() {
        let mut e = vec![0u32; n];
        for w in m.factors() {
            e[(w.letters()[0] - 1) as usize] += 1;
        }
        *out.entry(e).or_insert_with(Rational::zero) += q;
    }
    out.retain(|_, q| !q.is_zero());
    out
}

fn exponent_vectors(n: usize, max_deg: usize) -> Vec<Vec<u32>> {
    let mut out = vec![Vec::new()];
    for _ in 0..n {
        out = out
            .into_iter()
            .flat_map(|e: Vec<u32>| {
                let used: u32 = e.iter().sum();
                (0..=(max_deg as u32 - used)).map(move |k| {
                    let mut e = e.clone();
                    e.push(k);
                    e
                })
            })
            .collect();
    }
    out
}

/// Compares the star-degree-one envelope rank with an independent
/// elimination for `Ω²_A`, where `m·dx_i∧dx_j` has weight `deg m + 2`.
pub fn p1_rank_check(pres: &EnvelopePresentation) -> P1Check {
    let with_one = pres.with_bounds(pres.d.max(1), pres.max_weight).expect("same relations");
    let computed_rank = envelope_truncated(&with_one)[1].quotient_rank;

    let n = pres.n_gens as usize;
    let big = pres.max_weight + pres.slack();
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect();
    let mut index: IndexMap<(Vec<u32>, (usize, usize)), usize> = IndexMap::new();
    for e in exponent_vectors(n, big.saturating_sub(2)) {
        for &p in &pairs {
            let k = index.len();
            index.insert((e.clone(), p), k);
        }
    }
    let weight = |e: &Vec<u32>| e.iter().sum::<u32>() as usize + 2;
    let in_window: Vec<bool> = index.keys().map(|(e, _)| weight(e) <= pres.max_weight).collect();
    let window_size = in_window.iter().filter(|&&b| b).count();
    let dim = index.len();
    let form = |e: &Vec<u32>, i: usize, j: usize, q: &Rational, v: &mut SparseVector| {
        if i == j {
            return;
        }
        let (key, sign) = if i < j { ((e.clone(), (i, j)), q.clone()) } else { ((e.clone(), (j, i)), -q.clone()) };
        if let Some(&c) = index.get(&key) {
            v.add_at(c, &sign);
        } else {
            unreachable!("form inside the enlarged window")
        }
    };
    let add = |a: &[u32], b: &[u32]| -> Vec<u32> { a.iter().zip(b).map(|(x, y)| x + y).collect() };
    let mut relations: Vec<SparseVector> = Vec::new();
    for f in &pres.relations {
        let poly = to_exponents(n, f);
        let fdeg = poly.keys().map(|e| e.iter().sum::<u32>() as usize).max().unwrap_or(0);
        // f · m · dx_i ∧ dx_j
        let room = (big >= 2 + fdeg).then(|| big - 2 - fdeg);
        for m in room.map(|r| exponent_vectors(n, r)).unwrap_or_default() {
            for &(i, j) in &pairs {
                let mut v = SparseVector::zero(dim);
                for (e, q) in &poly {
                    form(&add(e, &m), i, j, q, &mut v);
                }
                relations.push(v);
            }
        }
        // m · df ∧ dx_k
        if fdeg >= 1 && big > fdeg {
            for m in exponent_vectors(n, big - fdeg - 1) {
                for k in 0..n {
                    let mut v = SparseVector::zero(dim);
                    for (e, q) in &poly {
                        for l in 0..n {
                            if e[l] == 0 {
                                continue;
                            }
                            let mut de = e.clone();
                            de[l] -= 1;
                            let c = q * Rational::from_integer(e[l].into());
                            form(&add(&de, &m), l, k, &c, &mut v);
                        }
                    }
                    if !v.is_zero() {
                        relations.push(v);
                    }
                }
            }
        }
    }
    let inside = intersect_with_coordinates(dim, relations, |c| in_window[c]);
    let omega2_rank = window_size - Span::from_vectors(dim, inside).rank();
    P1Check {
        computed_rank,
        omega2_rank,
        exactness: pres.exactness(),
    }
}

/// The two sides of the counterexample to the naive map
/// `b{a_0,{a_1,…}} ↦ b[da_0,[da_1,…]]`.
#[derive(Clone, Debug, PartialEq)]
pub struct GapWitness {
    /// `{a1, a3{a2,a4}} + {a1, a2{a3,a4}} − {a1, {a2a3, a4}}` in `SLV`.
    pub envelope_side: PoissonElement,
    /// The same combination pushed through the naive rule.
    pub naive_image: PoissonElement,
}

/// `coeff · b · Π {c_0,{c_1,…}}` with polynomial `b` and leaves `c_i`.
#[derive(Clone, Debug)]
struct FormalTerm {
    coeff: Rational,
    b: PoissonElement,
    chains: Vec<Vec<PoissonElement>>,
}

impl FormalTerm {
    /// `{a, b·Π C_j} = {a,b}·Π C_j + b·Σ_j {a, C_j}·Π_{k≠j} C_k`, keeping each
    /// bracket of polynomials as a formal chain.
    fn bracket_with(&self, a: &PoissonElement) -> Vec<FormalTerm> {
        let mut out = Vec::new();
        let b_constant = self.b.keys().all(PoissonMonomial::is_one);
        if !b_constant {
            let mut chains = self.chains.clone();
            chains.push(vec![a.clone(), self.b.clone()]);
            out.push(FormalTerm {
                coeff: self.coeff.clone(),
                b: one(),
                chains,
            });
        }
        for j in 0..self.chains.len() {
            let mut chains = self.chains.clone();
            chains[j].insert(0, a.clone());
            out.push(FormalTerm {
                coeff: self.coeff.clone(),
                b: self.b.clone(),
                chains,
            });
        }
        out
    }

    fn envelope_value(&self) -> PoissonElement {
        self.chains
            .iter()
            .fold(self.b.clone(), |acc, c| multiply(&acc, &nested_bracket(c)))
            .scaled(&self.coeff)
    }

    fn naive_value(&self) -> PoissonElement {
        self.chains
            .iter()
            .fold(self.b.clone(), |acc, c| multiply(&acc, &naive_chain(c)))
            .scaled(&self.coeff)
    }
}

/// `∂a/∂x_k` of a polynomial.
fn partial(a: &PoissonElement, k: u8) -> PoissonElement {
    let x = LyndonWord::letter(k);
    let mut out = PoissonElement::zero();
    for (m, q) in a.iter() {
        if let Some(pos) = m.factors().iter().position(|f| f == &x) {
            let mult = m.factors().iter().filter(|f| *f == &x).count();
            out.add_term(m.without(pos), &(q * Rational::from_integer(mult.into())));
        }
    }
    out
}

/// `[da_0,[da_1,…]]` with `d` and the bracket both `A`-linear.
fn naive_chain(chain: &[PoissonElement]) -> PoissonElement {
    let n_gens = chain.iter().flat_map(|c| c.keys().map(PoissonMonomial::max_letter)).max().unwrap_or(0);
    // pairs (polynomial coefficient, Lie element) for the partial chain
    let mut acc: Vec<(PoissonElement, LieElement)> = Vec::new();
    for (pos, c) in chain.iter().enumerate().rev() {
        let mut next = Vec::new();
        for k in 1..=n_gens {
            let dk = partial(c, k);
            if dk.is_zero() {
                continue;
            }
            if pos == chain.len() - 1 {
                next.push((dk, lie_generator(k)));
            } else {
                for (coef, l) in &acc {
                    let br = lie_bracket(&lie_generator(k), l);
                    if !br.is_zero() {
                        next.push((multiply(&dk, coef), br));
                    }
                }
            }
        }
        acc = next;
    }
    let mut out = PoissonElement::zero();
    for (coef, l) in acc {
        out += &multiply(&coef, &from_lie(&l));
    }
    out
}

/// The three terms of the counterexample before the outer bracket with `a_1`.
fn gap_terms(js: [u8; 4]) -> [FormalTerm; 3] {
    let [_, a2, a3, a4] = js.map(generator);
    [
        FormalTerm {
            coeff: Rational::one(),
            b: a3.clone(),
            chains: vec![vec![a2.clone(), a4.clone()]],
        },
        FormalTerm {
            coeff: Rational::one(),
            b: a2.clone(),
            chains: vec![vec![a3.clone(), a4.clone()]],
        },
        FormalTerm {
            coeff: -Rational::one(),
            b: one(),
            chains: vec![vec![multiply(&a2, &a3), a4]],
        },
    ]
}

/// The counterexample with `a_1..a_4 = x_{j_1}..x_{j_4}`.
pub fn gap_witness_with(n_gens: u8, js: [u8; 4]) -> Result<GapWitness, AlgebraError> {
    if n_gens < 4 {
        return Err(AlgebraError::InvalidPresentation("the counterexample needs four generators".into()));
    }
    if let Some(&bad) = js.iter().find(|&&j| j == 0 || j > n_gens) {
        return Err(AlgebraError::UnknownGenerator {
            index: bad as usize,
            n_gens: n_gens as usize,
        });
    }
    let [a1, a2, a3, a4] = js.map(generator);
    let envelope_side = &(&poisson_bracket(&a1, &multiply(&a3, &poisson_bracket(&a2, &a4)))
        + &poisson_bracket(&a1, &multiply(&a2, &poisson_bracket(&a3, &a4))))
        - &poisson_bracket(&a1, &poisson_bracket(&multiply(&a2, &a3), &a4));
    let mut naive_image = PoissonElement::zero();
    for t in &gap_terms(js) {
        for expanded in t.bracket_with(&a1) {
            naive_image += &expanded.naive_value();
        }
    }
    Ok(GapWitness {
        envelope_side,
        naive_image,
    })
}

/// The counterexample on `x_1..x_4`.
pub fn gap_witness(n_gens: u8) -> Result<GapWitness, AlgebraError> {
    gap_witness_with(n_gens, [1, 2, 3, 4])
}

/// Envelope values of the formally expanded terms; their sum vanishes.
pub fn gap_formal_envelope_sum(js: [u8; 4]) -> PoissonElement {
    let a1 = generator(js[0]);
    let mut sum = PoissonElement::zero();
    for t in &gap_terms(js) {
        for expanded in t.bracket_with(&a1) {
            sum += &expanded.envelope_value();
        }
    }
    sum
}

/// The differential `D = τ∘(d_A ⊗ id) + id ⊗ d_{SL₊}` of a monomial of
/// `A ⊗ SL₊V`, as a map `(coefficient monomial, L-leg) → ℚ`. Letters are the
/// coordinates of `A`; `dx_i` is the generator `i` of `L`.
pub fn local_model_differential(m: &PoissonMonomial) -> BTreeMap<(PoissonMonomial, LyndonWord), Rational> {
    let mut out = BTreeMap::new();
    let factors = m.factors();
    let mut i = 0;
    while i < factors.len() {
        let f = &factors[i];
        let mult = factors[i..].iter().take_while(|g| *g == f).count();
        // both the d_A leg (letters) and the d_{SL₊} leg (Lie factors) remove
        // one copy of the factor and record it as the L-leg
        out.insert((m.without(i), f.clone()), Rational::from_integer(mult.into()));
        i += mult;
    }
    out
}

/// `{p, q} = φ(Dp ∧ Dq)` with `φ` the Lie bracket of `L` on the legs.
pub fn local_model_bracket(p: &PoissonElement, q: &PoissonElement) -> PoissonElement {
    let diff = |a: &PoissonElement| {
        let mut acc: BTreeMap<(PoissonMonomial, LyndonWord), Rational> = BTreeMap::new();
        for (m, c) in a.iter() {
            for (key, v) in local_model_differential(m) {
                *acc.entry(key).or_insert_with(Rational::zero) += c * v;
            }
        }
        acc.retain(|_, v| !v.is_zero());
        acc
    };
    let (dp, dq) = (diff(p), diff(q));
    let mut out = PoissonElement::zero();
    for ((c1, l1), v1) in &dp {
        for ((c2, l2), v2) in &dq {
            let br = lie_bracket(&LieElement::basis(l1.clone()), &LieElement::basis(l2.clone()));
            if br.is_zero() {
                continue;
            }
            let coeff = PoissonElement::basis(c1.mul(c2));
            out.add_scaled(&multiply(&coeff, &from_lie(&br)), &(v1 * v2));
        }
    }
    out
}

/// The Poisson homomorphism `θ` out of `A ⊗ SL₊V` determined by generator
/// images: coefficients map through the images and each Lyndon factor maps
/// to the iterated bracket of images along its standard bracketing.
pub fn induced_hom(images: &BTreeMap<u8, PoissonElement>, a: &PoissonElement) -> Result<PoissonElement, AlgebraError> {
    for m in a.keys() {
        for f in m.factors() {
            if let Some(&l) = f.letters().iter().find(|l| !images.contains_key(l)) {
                return Err(AlgebraError::UnknownGenerator {
                    index: l as usize,
                    n_gens: images.len(),
                });
            }
        }
    }
    Ok(poisson_hom(&|i| images[&i].clone(), a))
}

/// The window of `PA/P_{>d}A` with its commutative product and bracket,
/// keeping only terms of star degree at most `d`.
pub fn truncated_envelope_algebra(pres: &EnvelopePresentation) -> Result<(PoissonWindow, TruncatedAlgebra), AlgebraError> {
    let window = PoissonWindow::new(pres);
    let d = pres.d;
    let bracket = move |a: &PoissonMonomial, b: &PoissonMonomial| {
        truncate_star(
            &poisson_bracket(&PoissonElement::basis(a.clone()), &PoissonElement::basis(b.clone())),
            d,
        )
    };
    let alg = window.algebra_with(|a, b| PoissonElement::basis(a.mul(b)), Some(&bracket))?;
    Ok((window, alg))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::freepoisson::lie_factor;
    use crate::linalg::int;

    fn x(i: u8) -> PoissonElement {
        generator(i)
    }

    fn lie(s: &str) -> PoissonElement {
        lie_factor(&LyndonWord::new(s.bytes().map(|b| b - b'0').collect()).unwrap())
    }

    fn pres(n: u8, rels: Vec<PoissonElement>, d: usize, big_n: usize) -> EnvelopePresentation {
        EnvelopePresentation::new(n, rels, d, big_n).unwrap()
    }

    #[test]
    fn ideal_generator_examples() {
        let x1sq = multiply(&x(1), &x(1));
        let p = pres(2, vec![x1sq.clone()], 1, 3);
        assert_eq!(poisson_ideal_generators(&p, 0).unwrap(), vec![x1sq.clone()]);
        let g1 = poisson_ideal_generators(&p, 1).unwrap();
        let expected = multiply(&x(1), &lie("12")).scaled(&int(-2));
        assert!(g1.contains(&expected));
        assert_eq!(poisson_bracket(&x(2), &x1sq), expected);
        let free = pres(2, vec![], 2, 3);
        assert!(poisson_ideal_generators(&free, 2).unwrap().is_empty());
        assert!(matches!(
            poisson_ideal_generators(&p, 2),
            Err(AlgebraError::DegreeOutOfRange { .. })
        ));
    }

    #[test]
    fn free_envelope_matches_monomial_counts() {
        let p = pres(2, vec![], 2, 2);
        let pieces = envelope_truncated(&p);
        for piece in &pieces {
            let count = monomials_up_to_weight(2, 2)
                .iter()
                .filter(|m| m.star_degree() == piece.star_degree)
                .count();
            assert_eq!(piece.quotient_rank, count);
        }
        assert_eq!(pieces[1].quotient_rank, 1);
    }

    #[test]
    fn dual_numbers_in_degree_zero() {
        let p = pres(1, vec![multiply(&x(1), &x(1))], 0, 3);
        assert_eq!(envelope_truncated(&p)[0].quotient_rank, 2);
    }

    #[test]
    fn coordinate_relation_kills_two_forms() {
        for n in 1..=4 {
            let p = pres(2, vec![x(1)], 1, n);
            assert_eq!(envelope_truncated(&p)[1].quotient_rank, 0);
        }
    }

    #[test]
    fn p1_examples() {
        let free = pres(2, vec![], 1, 3);
        let c = p1_rank_check(&free);
        assert_eq!(c.computed_rank, c.omega2_rank);
        // SV-window of degree ≤ 1 tensored with Λ²V
        assert_eq!(c.omega2_rank, 3);
        let line = pres(1, vec![], 1, 3);
        let c = p1_rank_check(&line);
        assert_eq!((c.computed_rank, c.omega2_rank), (0, 0));
        let cross = pres(2, vec![multiply(&x(1), &x(2))], 1, 2);
        let c = p1_rank_check(&cross);
        assert_eq!(c.computed_rank, c.omega2_rank);
        assert_eq!(c.exactness, Exactness::Exact);
    }

    #[test]
    fn inhomogeneous_relation_is_flagged() {
        let p = pres(2, vec![&x(1) - &multiply(&x(2), &x(2))], 1, 3);
        assert_eq!(p.exactness(), Exactness::IdealLowerBound);
        let c = p1_rank_check(&p);
        // A ≅ k[x2] so Ω²_A = 0; both lower-bound computations see it here
        assert_eq!(c.omega2_rank, 0);
        assert_eq!(c.computed_rank, 0);
    }

    #[test]
    fn gap_example() {
        let w = gap_witness(4).unwrap();
        assert!(w.envelope_side.is_zero());
        let expected = &multiply(&lie("13"), &lie("24")) + &multiply(&lie("12"), &lie("34"));
        assert_eq!(w.naive_image, expected);
        assert!(gap_formal_envelope_sum([1, 2, 3, 4]).is_zero());
        assert!(gap_witness(3).is_err());
    }

    #[test]
    fn local_model_examples() {
        assert_eq!(local_model_bracket(&x(1), &x(2)), lie("12"));
        let nested = local_model_bracket(&x(1), &local_model_bracket(&x(1), &x(2)));
        assert_eq!(nested, lie("112"));
        let x1sq = multiply(&x(1), &x(1));
        assert_eq!(
            local_model_bracket(&x1sq, &lie("12")),
            multiply(&x(1), &lie("112")).scaled(&int(2))
        );
    }

    #[test]
    fn induced_hom_examples() {
        let id: BTreeMap<u8, PoissonElement> = (1..=2).map(|i| (i, x(i))).collect();
        let a = &multiply(&x(1), &lie("12")) + &lie("112");
        assert_eq!(induced_hom(&id, &a).unwrap(), a);
        let swap: BTreeMap<u8, PoissonElement> = [(1, x(2)), (2, x(1))].into();
        assert_eq!(induced_hom(&swap, &lie("12")).unwrap(), -lie("12"));
        let square: BTreeMap<u8, PoissonElement> = [(1, multiply(&x(1), &x(1))), (2, x(2))].into();
        assert_eq!(
            induced_hom(&square, &lie("12")).unwrap(),
            multiply(&x(1), &lie("12")).scaled(&int(2))
        );
        let partial: BTreeMap<u8, PoissonElement> = [(1, x(1))].into();
        assert!(matches!(
            induced_hom(&partial, &lie("12")),
            Err(AlgebraError::UnknownGenerator { index: 2, .. })
        ));
    }

    #[test]
    fn window_algebra_is_poisson() {
        let p = pres(1, vec![multiply(&x(1), &x(1))], 1, 3);
        let (_, alg) = truncated_envelope_algebra(&p).unwrap();
        alg.validate().unwrap();
        let p = pres(2, vec![multiply(&x(1), &x(2))], 1, 3);
        let (window, alg) = truncated_envelope_algebra(&p).unwrap();
        alg.validate().unwrap();
        assert!(window.is_zero(&multiply(&x(1), &x(2))));
    }
}
