//! The free Poisson algebra `SLV`, symmetrization into `TV` and the PBW star
//! product.
//!
//! A monomial is a multiset of Lyndon basis elements. It carries three
//! gradings:
//!
//! * star degree: the sum of the factors' star degrees;
//! * symmetric degree: the number of factors;
//! * weight: the total number of letters, equal to star degree plus symmetric
//!   degree. Symmetrization sends weight `w` into words of length `w`, so the
//!   star product preserves weight and a drop of `p` in symmetric degree is
//!   the same thing as a rise of `p` in star degree.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::{Arc, Mutex, OnceLock};

use indexmap::IndexSet;
use num::One;

use crate::combination::Combination;
use crate::freelie::{
    expand_basis_element, factorial, lie_bracket, lyndon_words, multiset_permutations,
    tensor_mul, LieElement, LyndonWord, TensorElement, Word,
};
use crate::linalg::{Rational, SparseVector, Span};

/// A commutative monomial in Lyndon basis elements, factors kept sorted.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct PoissonMonomial(Vec<LyndonWord>);

impl PoissonMonomial {
    pub fn one() -> Self {
        PoissonMonomial(Vec::new())
    }

    pub fn letter(i: u8) -> Self {
        PoissonMonomial(vec![LyndonWord::letter(i)])
    }

    pub fn from_factors(mut factors: Vec<LyndonWord>) -> Self {
        factors.sort();
        PoissonMonomial(factors)
    }

    pub fn factors(&self) -> &[LyndonWord] {
        &self.0
    }

    pub fn is_one(&self) -> bool {
        self.0.is_empty()
    }

    pub fn star_degree(&self) -> usize {
        self.0.iter().map(LyndonWord::star_degree).sum()
    }

    /// Number of factors.
    pub fn sym_degree(&self) -> usize {
        self.0.len()
    }

    /// Number of factors of positive star degree.
    pub fn lie_factor_count(&self) -> usize {
        self.0.iter().filter(|f| !f.is_letter()).count()
    }

    /// Number of factors of star degree zero: the degree of the `SV` part.
    pub fn letter_count(&self) -> usize {
        self.0.iter().filter(|f| f.is_letter()).count()
    }

    /// Total number of letters.
    pub fn weight(&self) -> usize {
        self.0.iter().map(LyndonWord::len).sum()
    }

    pub fn max_letter(&self) -> u8 {
        self.0.iter().map(LyndonWord::max_letter).max().unwrap_or(0)
    }

    /// Sorted multiset of all letters.
    pub fn content(&self) -> Vec<u8> {
        let mut c: Vec<u8> = self.0.iter().flat_map(|f| f.letters().iter().copied()).collect();
        c.sort_unstable();
        c
    }

    pub fn mul(&self, other: &PoissonMonomial) -> PoissonMonomial {
        let mut v = Vec::with_capacity(self.0.len() + other.0.len());
        v.extend_from_slice(&self.0);
        v.extend_from_slice(&other.0);
        PoissonMonomial::from_factors(v)
    }

    pub fn with_factor(&self, f: LyndonWord) -> PoissonMonomial {
        let mut v = self.0.clone();
        let pos = v.partition_point(|g| g <= &f);
        v.insert(pos, f);
        PoissonMonomial(v)
    }

    /// The monomial with the factor at position `i` removed.
    pub fn without(&self, i: usize) -> PoissonMonomial {
        let mut v = self.0.clone();
        v.remove(i);
        PoissonMonomial(v)
    }
}

impl fmt::Debug for PoissonMonomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "1");
        }
        let parts: Vec<String> = self.0.iter().map(|w| w.to_string()).collect();
        write!(f, "{}", parts.join("*"))
    }
}

/// Element of `SLV`.
pub type PoissonElement = Combination<PoissonMonomial>;

pub fn one() -> PoissonElement {
    PoissonElement::basis(PoissonMonomial::one())
}

/// The generator `x_i`.
pub fn generator(i: u8) -> PoissonElement {
    PoissonElement::basis(PoissonMonomial::letter(i))
}

/// A single Lyndon basis element viewed in `SLV`.
pub fn lie_factor(w: &LyndonWord) -> PoissonElement {
    PoissonElement::basis(PoissonMonomial(vec![w.clone()]))
}

/// `LV ⊂ SLV` as the symmetric-degree-one part.
pub fn from_lie(a: &LieElement) -> PoissonElement {
    a.map_linear(lie_factor)
}

/// The symmetric-degree-one part of `a` read back as a Lie element, if `a` is
/// purely of symmetric degree one.
pub fn to_lie(a: &PoissonElement) -> Option<LieElement> {
    a.iter()
        .map(|(m, q)| (m.sym_degree() == 1).then(|| (m.factors()[0].clone(), q.clone())))
        .collect()
}

/// Commutative product.
pub fn multiply(a: &PoissonElement, b: &PoissonElement) -> PoissonElement {
    a.map_bilinear(b, |m, n| PoissonElement::basis(m.mul(n)))
}

/// `a^k` for the commutative product.
pub fn power(a: &PoissonElement, k: usize) -> PoissonElement {
    (0..k).fold(one(), |acc, _| multiply(&acc, a))
}

fn bracket_monomials(m: &PoissonMonomial, n: &PoissonMonomial) -> PoissonElement {
    let mut out = PoissonElement::zero();
    for (i, u) in m.factors().iter().enumerate() {
        for (j, v) in n.factors().iter().enumerate() {
            let l = lie_bracket(&LieElement::basis(u.clone()), &LieElement::basis(v.clone()));
            if l.is_zero() {
                continue;
            }
            let rest = m.without(i).mul(&n.without(j));
            for (w, q) in l.iter() {
                out.add_term(rest.with_factor(w.clone()), q);
            }
        }
    }
    out
}

/// Poisson bracket: the biderivation extending the Lie bracket of `LV`.
pub fn poisson_bracket(a: &PoissonElement, b: &PoissonElement) -> PoissonElement {
    a.map_bilinear(b, bracket_monomials)
}

/// Right-nested bracket `{a_0, {a_1, …, {a_{k-1}, a_k}…}}`.
pub fn nested_bracket(args: &[PoissonElement]) -> PoissonElement {
    match args {
        [] => PoissonElement::zero(),
        [a] => a.clone(),
        [a, rest @ ..] => poisson_bracket(a, &nested_bracket(rest)),
    }
}

fn cache<K, V>(cell: &'static OnceLock<Mutex<HashMap<K, V>>>) -> &'static Mutex<HashMap<K, V>> {
    cell.get_or_init(|| Mutex::new(HashMap::new()))
}

fn symmetrize_monomial(m: &PoissonMonomial) -> TensorElement {
    static SYM: OnceLock<Mutex<HashMap<PoissonMonomial, TensorElement>>> = OnceLock::new();
    if let Some(t) = cache(&SYM).lock().unwrap().get(m) {
        return t.clone();
    }
    let factors = m.factors();
    // identical factors are adjacent; label them by class
    let mut labels = Vec::with_capacity(factors.len());
    let mut classes: Vec<&LyndonWord> = Vec::new();
    let mut multiplicity = Vec::new();
    for f in factors {
        if classes.last() != Some(&f) {
            classes.push(f);
            multiplicity.push(0usize);
        }
        *multiplicity.last_mut().unwrap() += 1;
        labels.push((classes.len() - 1) as u8);
    }
    let weight = multiplicity
        .iter()
        .fold(Rational::one(), |acc, &k| acc * factorial(k))
        / factorial(factors.len());
    let expansions: Vec<TensorElement> = classes.iter().map(|c| expand_basis_element(c)).collect();
    let mut t = TensorElement::zero();
    for arrangement in multiset_permutations(&labels) {
        let prod = arrangement.iter().fold(
            TensorElement::basis(Word(Vec::new())),
            |acc, &c| tensor_mul(&acc, &expansions[c as usize]),
        );
        t.add_scaled(&prod, &weight);
    }
    cache(&SYM).lock().unwrap().insert(m.clone(), t.clone());
    t
}

/// Symmetrization map `e : SLV → TV`, averaging each monomial over all
/// orders of its factors.
pub fn symmetrize(a: &PoissonElement) -> TensorElement {
    a.map_linear(symmetrize_monomial)
}

/// All Lyndon factorizations of a letter content as commutative monomials.
///
/// By PBW there are exactly as many as there are words with that content.
pub fn monomials_with_content(content: &[u8]) -> Vec<PoissonMonomial> {
    let mut counts: BTreeMap<u8, usize> = BTreeMap::new();
    for &l in content {
        *counts.entry(l).or_default() += 1;
    }
    let max_letter = content.iter().copied().max().unwrap_or(0);
    let mut candidates: Vec<LyndonWord> = lyndon_words(max_letter, content.len())
        .into_iter()
        .filter(|w| {
            let mut c: BTreeMap<u8, usize> = BTreeMap::new();
            for &l in w {
                *c.entry(l).or_default() += 1;
            }
            c.iter().all(|(l, k)| counts.get(l).is_some_and(|have| have >= k))
        })
        .filter_map(LyndonWord::new)
        .collect();
    candidates.sort();
    let mut out = Vec::new();
    let mut current = Vec::new();
    choose_factors(&candidates, 0, &mut counts, &mut current, &mut out);
    out
}

fn choose_factors(
    candidates: &[LyndonWord],
    start: usize,
    remaining: &mut BTreeMap<u8, usize>,
    current: &mut Vec<LyndonWord>,
    out: &mut Vec<PoissonMonomial>,
) {
    if remaining.values().all(|&k| k == 0) {
        out.push(PoissonMonomial(current.clone()));
        return;
    }
    for (i, w) in candidates.iter().enumerate().skip(start) {
        let fits = {
            let mut need: BTreeMap<u8, usize> = BTreeMap::new();
            for &l in w.letters() {
                *need.entry(l).or_default() += 1;
            }
            need.iter().all(|(l, k)| remaining[l] >= *k)
        };
        if !fits {
            continue;
        }
        for &l in w.letters() {
            *remaining.get_mut(&l).unwrap() -= 1;
        }
        current.push(w.clone());
        choose_factors(candidates, i, remaining, current, out);
        current.pop();
        for &l in w.letters() {
            *remaining.get_mut(&l).unwrap() += 1;
        }
    }
}

/// All monomials in generators `1..=n_gens` of weight at most `max_weight`,
/// in canonical order.
pub fn monomials_up_to_weight(n_gens: u8, max_weight: usize) -> Vec<PoissonMonomial> {
    let mut candidates: Vec<LyndonWord> = lyndon_words(n_gens, max_weight)
        .into_iter()
        .map(|w| LyndonWord::new(w).expect("generated words are Lyndon"))
        .collect();
    candidates.sort();
    let mut out = Vec::new();
    let mut current = Vec::new();
    fn rec(
        cands: &[LyndonWord],
        start: usize,
        budget: usize,
        current: &mut Vec<LyndonWord>,
        out: &mut Vec<PoissonMonomial>,
    ) {
        out.push(PoissonMonomial(current.clone()));
        for (i, w) in cands.iter().enumerate().skip(start) {
            if w.len() <= budget {
                current.push(w.clone());
                rec(cands, i, budget - w.len(), current, out);
                current.pop();
            }
        }
    }
    rec(&candidates, 0, max_weight, &mut current, &mut out);
    out.sort();
    out
}

struct PbwBlock {
    words: IndexSet<Word>,
    monomials: Vec<PoissonMonomial>,
    span: Span,
    // e⁻¹ of each word, entries sorted by star degree of the monomial
    inverse: OnceLock<Vec<Vec<(usize, Rational)>>>,
}

impl PbwBlock {
    fn inverse(&self) -> &[Vec<(usize, Rational)>] {
        self.inverse.get_or_init(|| {
            (0..self.words.len())
                .map(|w| {
                    let coeffs = self
                        .span
                        .solve(&SparseVector::unit(self.words.len(), w))
                        .expect("symmetrization is onto");
                    let mut row: Vec<(usize, Rational)> = coeffs.iter().map(|(i, q)| (i, q.clone())).collect();
                    row.sort_by_key(|(i, _)| self.monomials[*i].star_degree());
                    row
                })
                .collect()
        })
    }
}

fn pbw_block(content: &[u8]) -> Arc<PbwBlock> {
    static BLOCKS: OnceLock<Mutex<HashMap<Vec<u8>, Arc<PbwBlock>>>> = OnceLock::new();
    if let Some(b) = cache(&BLOCKS).lock().unwrap().get(content) {
        return b.clone();
    }
    let words: IndexSet<Word> = multiset_permutations(content).into_iter().map(Word).collect();
    let monomials = monomials_with_content(content);
    assert_eq!(monomials.len(), words.len(), "PBW count for content {content:?}");
    // lowest symmetric degree first: single Lie factors expand to few words,
    // so the echelon form stays sparse far longer than in the reverse order
    let mut order: Vec<usize> = (0..monomials.len()).collect();
    order.sort_by_key(|&i| monomials[i].sym_degree());
    let monomials: Vec<PoissonMonomial> = order.into_iter().map(|i| monomials[i].clone()).collect();
    let mut span = Span::tracking(words.len());
    for m in &monomials {
        let t = symmetrize_monomial(m);
        let v = SparseVector::from_entries(
            words.len(),
            t.iter().map(|(w, q)| (words.get_index_of(w).expect("content preserved"), q.clone())),
        );
        let fresh = span.insert(&v);
        assert!(fresh, "symmetrization is injective");
    }
    let block = Arc::new(PbwBlock {
        words,
        monomials,
        span,
        inverse: OnceLock::new(),
    });
    cache(&BLOCKS).lock().unwrap().insert(content.to_vec(), block.clone());
    block
}

/// Inverse of [`symmetrize`].
///
/// `e` preserves letter content, so each content block of `t` is solved on
/// its own against the symmetrized monomials of that content.
pub fn e_inverse(t: &TensorElement) -> PoissonElement {
    let mut groups: BTreeMap<Vec<u8>, TensorElement> = BTreeMap::new();
    for (w, q) in t.iter() {
        groups.entry(w.content()).or_default().add_term(w.clone(), q);
    }
    let mut out = PoissonElement::zero();
    for (content, part) in groups {
        if content.is_empty() {
            out.add_term(PoissonMonomial::one(), &part.coeff(&Word(Vec::new())));
            continue;
        }
        let block = pbw_block(&content);
        let v = SparseVector::from_entries(
            block.words.len(),
            part.iter().map(|(w, q)| (block.words.get_index_of(w).expect("same content"), q.clone())),
        );
        let coeffs = block.span.solve(&v).expect("symmetrization is onto");
        for (i, q) in coeffs.iter() {
            out.add_term(block.monomials[i].clone(), q);
        }
    }
    out
}

/// The part of [`e_inverse`] of star degree at most `max_star`, read off
/// from cached inverse rows instead of a fresh solve.
pub fn e_inverse_truncated(t: &TensorElement, max_star: usize) -> PoissonElement {
    let mut groups: BTreeMap<Vec<u8>, TensorElement> = BTreeMap::new();
    for (w, q) in t.iter() {
        groups.entry(w.content()).or_default().add_term(w.clone(), q);
    }
    let mut out = PoissonElement::zero();
    for (content, part) in groups {
        if content.is_empty() {
            out.add_term(PoissonMonomial::one(), &part.coeff(&Word(Vec::new())));
            continue;
        }
        let block = pbw_block(&content);
        let inverse = block.inverse();
        for (w, q) in part.iter() {
            let row = &inverse[block.words.get_index_of(w).expect("same content")];
            for (i, c) in row {
                let m = &block.monomials[*i];
                if m.star_degree() > max_star {
                    break;
                }
                out.add_term(m.clone(), &(q * c));
            }
        }
    }
    out
}

fn truncated_star_monomials(m: &PoissonMonomial, n: &PoissonMonomial, max_star: usize) -> PoissonElement {
    static STAR: OnceLock<Mutex<HashMap<(PoissonMonomial, PoissonMonomial, usize), PoissonElement>>> =
        OnceLock::new();
    if m.star_degree() + n.star_degree() > max_star {
        return PoissonElement::zero();
    }
    let key = (m.clone(), n.clone(), max_star);
    if let Some(r) = cache(&STAR).lock().unwrap().get(&key) {
        return r.clone();
    }
    let r = e_inverse_truncated(&tensor_mul(&symmetrize_monomial(m), &symmetrize_monomial(n)), max_star);
    cache(&STAR).lock().unwrap().insert(key, r.clone());
    r
}

/// `truncate_star(star_product(a, b), max_star)` without computing the
/// discarded components.
pub fn truncated_star_product(a: &PoissonElement, b: &PoissonElement, max_star: usize) -> PoissonElement {
    a.map_bilinear(b, |m, n| truncated_star_monomials(m, n, max_star))
}

fn star_monomials(m: &PoissonMonomial, n: &PoissonMonomial) -> PoissonElement {
    static STAR: OnceLock<Mutex<HashMap<(PoissonMonomial, PoissonMonomial), PoissonElement>>> =
        OnceLock::new();
    let key = (m.clone(), n.clone());
    if let Some(r) = cache(&STAR).lock().unwrap().get(&key) {
        return r.clone();
    }
    let r = e_inverse(&tensor_mul(&symmetrize_monomial(m), &symmetrize_monomial(n)));
    cache(&STAR).lock().unwrap().insert(key, r.clone());
    r
}

/// The PBW star product `B(a ⊗ b) = e⁻¹(e(a) e(b))`.
pub fn star_product(a: &PoissonElement, b: &PoissonElement) -> PoissonElement {
    a.map_bilinear(b, star_monomials)
}

/// Component `B_p`: the part of the star product whose symmetric degree is
/// `p` below the sum of the inputs' symmetric degrees, applied bilinearly to
/// the monomial components of `a` and `b`.
pub fn star_component(a: &PoissonElement, b: &PoissonElement, p: usize) -> PoissonElement {
    a.map_bilinear(b, |m, n| {
        let target = m.sym_degree() + n.sym_degree();
        match target.checked_sub(p) {
            Some(s) => star_monomials(m, n).filtered(|k| k.sym_degree() == s),
            None => PoissonElement::zero(),
        }
    })
}

/// The part of the star product whose star degree is `p` above the sum of
/// the inputs' star degrees, again monomial by monomial.
pub fn star_component_by_star_degree(a: &PoissonElement, b: &PoissonElement, p: usize) -> PoissonElement {
    a.map_bilinear(b, |m, n| {
        let target = m.star_degree() + n.star_degree() + p;
        star_monomials(m, n).filtered(|k| k.star_degree() == target)
    })
}

/// Projection onto symmetric degree `p` and star degree `q`.
pub fn bigraded_component(a: &PoissonElement, p: usize, q: usize) -> PoissonElement {
    a.filtered(|m| m.sym_degree() == p && m.star_degree() == q)
}

pub fn star_degree_component(a: &PoissonElement, q: usize) -> PoissonElement {
    a.filtered(|m| m.star_degree() == q)
}

pub fn sym_degree_component(a: &PoissonElement, p: usize) -> PoissonElement {
    a.filtered(|m| m.sym_degree() == p)
}

/// Drops every term of star degree above `d`.
pub fn truncate_star(a: &PoissonElement, d: usize) -> PoissonElement {
    a.filtered(|m| m.star_degree() <= d)
}

/// Drops every term of weight above `n`.
pub fn truncate_weight(a: &PoissonElement, n: usize) -> PoissonElement {
    a.filtered(|m| m.weight() <= n)
}

/// Star degree of `a` if all its terms share one, `None` otherwise (or zero).
pub fn homogeneous_star_degree(a: &PoissonElement) -> Option<usize> {
    let mut it = a.keys().map(PoissonMonomial::star_degree);
    let first = it.next()?;
    it.all(|d| d == first).then_some(first)
}

/// Largest weight among the terms of `a`.
pub fn max_weight(a: &PoissonElement) -> usize {
    a.keys().map(PoissonMonomial::weight).max().unwrap_or(0)
}

/// The Poisson homomorphism out of `SLV` determined by generator images:
/// multiplicative on monomials, and on a Lyndon element the iterated bracket
/// of the images along its standard bracketing.
pub fn poisson_hom(image: &dyn Fn(u8) -> PoissonElement, a: &PoissonElement) -> PoissonElement {
    let mut memo: HashMap<LyndonWord, PoissonElement> = HashMap::new();
    let mut out = PoissonElement::zero();
    for (m, q) in a.iter() {
        let mut img = one();
        for f in m.factors() {
            img = multiply(&img, &hom_on_lyndon(image, f, &mut memo));
        }
        out.add_scaled(&img, q);
    }
    out
}

fn hom_on_lyndon(
    image: &dyn Fn(u8) -> PoissonElement,
    w: &LyndonWord,
    memo: &mut HashMap<LyndonWord, PoissonElement>,
) -> PoissonElement {
    if let Some(v) = memo.get(w) {
        return v.clone();
    }
    let v = match w.standard_factorization() {
        None => image(w.letters()[0]),
        Some((u, v)) => {
            let tu = hom_on_lyndon(image, &u, memo);
            let tv = hom_on_lyndon(image, &v, memo);
            poisson_bracket(&tu, &tv)
        }
    };
    memo.insert(w.clone(), v.clone());
    v
}

/// The Poisson derivation of `SLV` with `x_i ↦ image(i)`: Leibniz on
/// monomials, and `δ[u,v] = {δu, v} + {u, δv}` along standard bracketings.
pub fn poisson_derivation(image: &dyn Fn(u8) -> PoissonElement, a: &PoissonElement) -> PoissonElement {
    let mut memo: HashMap<LyndonWord, PoissonElement> = HashMap::new();
    let mut out = PoissonElement::zero();
    for (m, q) in a.iter() {
        for (i, f) in m.factors().iter().enumerate() {
            let rest = PoissonElement::basis(m.without(i));
            out.add_scaled(&multiply(&rest, &derivation_on_lyndon(image, f, &mut memo)), q);
        }
    }
    out
}

fn derivation_on_lyndon(
    image: &dyn Fn(u8) -> PoissonElement,
    w: &LyndonWord,
    memo: &mut HashMap<LyndonWord, PoissonElement>,
) -> PoissonElement {
    if let Some(v) = memo.get(w) {
        return v.clone();
    }
    let v = match w.standard_factorization() {
        None => image(w.letters()[0]),
        Some((u, v)) => {
            let du = derivation_on_lyndon(image, &u, memo);
            let dv = derivation_on_lyndon(image, &v, memo);
            &poisson_bracket(&du, &lie_factor(&v)) + &poisson_bracket(&lie_factor(&u), &dv)
        }
    };
    memo.insert(w.clone(), v.clone());
    v
}

/// Abelianization `TV → SV`: forget the order of letters.
pub fn abelianize(t: &TensorElement) -> PoissonElement {
    t.map_linear(|w| {
        PoissonElement::basis(PoissonMonomial::from_factors(
            w.letters().iter().map(|&l| LyndonWord::letter(l)).collect(),
        ))
    })
}
