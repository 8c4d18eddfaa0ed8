//! The free Lie algebra `LV` inside the tensor algebra `TV`.
//!
//! Generators are the letters `1..=n`. The Lie algebra is graded by star
//! degree, word length minus one, so generators sit in degree zero and a
//! bracket of homogeneous elements lands in degree `|a| + |b| + 1`. The
//! concrete basis is the Lyndon basis with standard bracketing.
//!
//! Brackets are computed by expanding into `TV`, multiplying there and
//! solving back against the expanded Lyndon basis. `TV` and `LV` are both
//! graded by letter content (the multiset of letters), so every solve is
//! confined to one small content block.

use std::cmp::Ordering;
use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::{Arc, Mutex, OnceLock};

use indexmap::IndexSet;
use num::One;

use crate::combination::Combination;
use crate::linalg::{int, Rational, SparseVector, Span};

/// A word in the letters `1..=n`: a monomial of the tensor algebra.
///
/// Words order first by length, then lexicographically.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Word(pub Vec<u8>);

impl Word {
    pub fn new(letters: Vec<u8>) -> Self {
        Word(letters)
    }

    pub fn letters(&self) -> &[u8] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Sorted multiset of letters.
    pub fn content(&self) -> Vec<u8> {
        let mut c = self.0.clone();
        c.sort_unstable();
        c
    }

    pub fn concat(&self, other: &Word) -> Word {
        let mut v = Vec::with_capacity(self.len() + other.len());
        v.extend_from_slice(&self.0);
        v.extend_from_slice(&other.0);
        Word(v)
    }
}

impl Ord for Word {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.len().cmp(&other.0.len()).then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Word {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", letters_to_string(&self.0))
    }
}

pub(crate) fn letters_to_string(letters: &[u8]) -> String {
    if letters.iter().all(|&l| l < 10) {
        letters.iter().map(|l| l.to_string()).collect()
    } else {
        letters.iter().map(|l| l.to_string()).collect::<Vec<_>>().join(".")
    }
}

/// True if `w` is nonempty and strictly smaller than each proper rotation.
pub fn is_lyndon(w: &[u8]) -> bool {
    if w.is_empty() {
        return false;
    }
    (1..w.len()).all(|i| {
        let rotated = w[i..].iter().chain(&w[..i]);
        w.iter().cmp(rotated) == Ordering::Less
    })
}

/// A Lyndon word, naming one element of the Lyndon basis of `LV`.
///
/// Ordered like [`Word`]: by star degree, then lexicographically.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct LyndonWord(Vec<u8>);

impl LyndonWord {
    /// Checks the Lyndon property and that letters are positive.
    pub fn new(letters: Vec<u8>) -> Option<Self> {
        (letters.iter().all(|&l| l >= 1) && is_lyndon(&letters)).then_some(LyndonWord(letters))
    }

    /// The generator `x_i` as a length-one Lyndon word.
    pub fn letter(i: u8) -> Self {
        assert!(i >= 1, "generators are 1-based");
        LyndonWord(vec![i])
    }

    pub fn letters(&self) -> &[u8] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Word length minus one.
    pub fn star_degree(&self) -> usize {
        self.0.len() - 1
    }

    pub fn is_letter(&self) -> bool {
        self.0.len() == 1
    }

    pub fn word(&self) -> Word {
        Word(self.0.clone())
    }

    pub fn max_letter(&self) -> u8 {
        *self.0.iter().max().expect("nonempty")
    }

    /// `w = uv` with `v` the longest proper Lyndon suffix; `None` for letters.
    pub fn standard_factorization(&self) -> Option<(LyndonWord, LyndonWord)> {
        if self.is_letter() {
            return None;
        }
        let split = (1..self.0.len())
            .find(|&i| is_lyndon(&self.0[i..]))
            .expect("a single trailing letter is always Lyndon");
        Some((
            LyndonWord(self.0[..split].to_vec()),
            LyndonWord(self.0[split..].to_vec()),
        ))
    }

    pub fn bracketing(&self) -> Bracketing {
        match self.standard_factorization() {
            None => Bracketing::Letter(self.0[0]),
            Some((u, v)) => Bracketing::Bracket(Box::new(u.bracketing()), Box::new(v.bracketing())),
        }
    }
}

impl Ord for LyndonWord {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.len().cmp(&other.0.len()).then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for LyndonWord {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for LyndonWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({})", letters_to_string(&self.0))
    }
}

impl fmt::Display for LyndonWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_letter() {
            write!(f, "x{}", self.0[0])
        } else {
            write!(f, "({})", letters_to_string(&self.0))
        }
    }
}

/// A binary bracket tree over letters.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Bracketing {
    Letter(u8),
    Bracket(Box<Bracketing>, Box<Bracketing>),
}

impl fmt::Display for Bracketing {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Bracketing::Letter(i) => write!(f, "x{i}"),
            Bracketing::Bracket(a, b) => write!(f, "[{a},{b}]"),
        }
    }
}

/// A Lyndon basis element together with its standard bracketing.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LieBasisElement {
    pub word: LyndonWord,
    pub bracketing: Bracketing,
}

impl LieBasisElement {
    pub fn star_degree(&self) -> usize {
        self.word.star_degree()
    }
}

/// Element of the tensor algebra `TV`.
pub type TensorElement = Combination<Word>;

/// Element of `LV` in Lyndon coordinates.
pub type LieElement = Combination<LyndonWord>;

/// All Lyndon words over `1..=alphabet` of length at most `max_len`, in
/// lexicographic order (Duval's algorithm).
pub fn lyndon_words(alphabet: u8, max_len: usize) -> Vec<Vec<u8>> {
    let mut out = Vec::new();
    if alphabet == 0 || max_len == 0 {
        return out;
    }
    let mut w: Vec<u8> = vec![1];
    while !w.is_empty() {
        out.push(w.clone());
        let m = w.len();
        while w.len() < max_len {
            w.push(w[w.len() - m]);
        }
        while w.last() == Some(&alphabet) {
            w.pop();
        }
        if let Some(last) = w.last_mut() {
            *last += 1;
        }
    }
    out
}

/// Lyndon basis of `LV` on `n_gens` generators up to `max_star_degree`,
/// sorted by star degree and then lexicographically.
pub fn lyndon_basis(n_gens: u8, max_star_degree: usize) -> Vec<LieBasisElement> {
    let mut words: Vec<LyndonWord> = lyndon_words(n_gens, max_star_degree + 1)
        .into_iter()
        .map(LyndonWord)
        .collect();
    words.sort();
    words
        .into_iter()
        .map(|word| LieBasisElement {
            bracketing: word.bracketing(),
            word,
        })
        .collect()
}

fn mobius(mut n: usize) -> i64 {
    let mut result = 1;
    let mut p = 2;
    while p * p <= n {
        if n.is_multiple_of(p) {
            n /= p;
            if n.is_multiple_of(p) {
                return 0;
            }
            result = -result;
        }
        p += 1;
    }
    if n > 1 {
        result = -result;
    }
    result
}

/// Witt's dimension formula: number of Lyndon words of length `len` over
/// `n_gens` letters, `(1/len) Σ_{d | len} μ(d) n^{len/d}`.
pub fn witt_number(n_gens: u64, len: usize) -> u64 {
    if len == 0 {
        return 0;
    }
    let total: i128 = (1..=len)
        .filter(|d| len.is_multiple_of(*d))
        .map(|d| mobius(d) as i128 * (n_gens as i128).pow((len / d) as u32))
        .sum();
    (total / len as i128) as u64
}

/// All distinct rearrangements of a multiset, in lexicographic order.
pub fn multiset_permutations(content: &[u8]) -> Vec<Vec<u8>> {
    let mut cur = content.to_vec();
    cur.sort_unstable();
    let mut out = vec![cur.clone()];
    loop {
        let n = cur.len();
        if n < 2 {
            return out;
        }
        let Some(i) = (0..n - 1).rev().find(|&i| cur[i] < cur[i + 1]) else {
            return out;
        };
        let j = (i + 1..n).rev().find(|&j| cur[j] > cur[i]).expect("successor exists");
        cur.swap(i, j);
        cur[i + 1..].reverse();
        out.push(cur.clone());
    }
}

/// Concatenation product in `TV`.
pub fn tensor_mul(a: &TensorElement, b: &TensorElement) -> TensorElement {
    a.map_bilinear(b, |u, v| TensorElement::basis(u.concat(v)))
}

/// `ab - ba` in `TV`.
pub fn tensor_commutator(a: &TensorElement, b: &TensorElement) -> TensorElement {
    &tensor_mul(a, b) - &tensor_mul(b, a)
}

/// The generator `x_i` in `TV`.
pub fn tensor_letter(i: u8) -> TensorElement {
    TensorElement::basis(Word(vec![i]))
}

/// The unit of `TV`.
pub fn tensor_one() -> TensorElement {
    TensorElement::basis(Word(Vec::new()))
}

fn cache<K, V>(cell: &'static OnceLock<Mutex<HashMap<K, V>>>) -> &'static Mutex<HashMap<K, V>> {
    cell.get_or_init(|| Mutex::new(HashMap::new()))
}

/// Tensor expansion of a single Lyndon basis element.
pub fn expand_basis_element(w: &LyndonWord) -> TensorElement {
    static EXPANSIONS: OnceLock<Mutex<HashMap<LyndonWord, TensorElement>>> = OnceLock::new();
    if let Some(t) = cache(&EXPANSIONS).lock().unwrap().get(w) {
        return t.clone();
    }
    let t = match w.standard_factorization() {
        None => TensorElement::basis(w.word()),
        Some((u, v)) => tensor_commutator(&expand_basis_element(&u), &expand_basis_element(&v)),
    };
    cache(&EXPANSIONS).lock().unwrap().insert(w.clone(), t.clone());
    t
}

/// Image under the inclusion `LV ⊂ TV`.
pub fn expand_to_tensor(a: &LieElement) -> TensorElement {
    a.map_linear(expand_basis_element)
}

/// The Lyndon words of one letter content with their expansions in echelon form.
struct LieBlock {
    words: IndexSet<Word>,
    lyndon: Vec<LyndonWord>,
    span: Span,
}

fn lie_block(content: &[u8]) -> Arc<LieBlock> {
    static BLOCKS: OnceLock<Mutex<HashMap<Vec<u8>, Arc<LieBlock>>>> = OnceLock::new();
    if let Some(b) = cache(&BLOCKS).lock().unwrap().get(content) {
        return b.clone();
    }
    let perms = multiset_permutations(content);
    let words: IndexSet<Word> = perms.iter().cloned().map(Word).collect();
    let lyndon: Vec<LyndonWord> = perms.into_iter().filter_map(LyndonWord::new).collect();
    let mut span = Span::tracking(words.len());
    for l in &lyndon {
        let v = tensor_to_vector(&expand_basis_element(l), &words);
        let fresh = span.insert(&v);
        debug_assert!(fresh, "Lyndon expansions are linearly independent");
    }
    let block = Arc::new(LieBlock { words, lyndon, span });
    cache(&BLOCKS).lock().unwrap().insert(content.to_vec(), block.clone());
    block
}

fn tensor_to_vector(t: &TensorElement, words: &IndexSet<Word>) -> SparseVector {
    SparseVector::from_entries(
        words.len(),
        t.iter()
            .map(|(w, q)| (words.get_index_of(w).expect("word in block"), q.clone())),
    )
}

fn group_by_content(t: &TensorElement) -> BTreeMap<Vec<u8>, TensorElement> {
    let mut groups: BTreeMap<Vec<u8>, TensorElement> = BTreeMap::new();
    for (w, q) in t.iter() {
        groups.entry(w.content()).or_default().add_term(w.clone(), q);
    }
    groups
}

/// Lyndon coordinates of `t`, or `None` if `t` is not in the image of `LV`.
pub fn rewrite_in_basis(t: &TensorElement) -> Option<LieElement> {
    let mut out = LieElement::zero();
    for (content, part) in group_by_content(t) {
        if content.is_empty() || content.contains(&0) {
            return None;
        }
        let block = lie_block(&content);
        let coeffs = block.span.solve(&tensor_to_vector(&part, &block.words))?;
        for (i, q) in coeffs.iter() {
            out.add_term(block.lyndon[i].clone(), q);
        }
    }
    Some(out)
}

fn bracket_basis(u: &LyndonWord, v: &LyndonWord) -> LieElement {
    static BRACKETS: OnceLock<Mutex<HashMap<(LyndonWord, LyndonWord), LieElement>>> = OnceLock::new();
    match u.cmp(v) {
        Ordering::Equal => return LieElement::zero(),
        Ordering::Greater => return -bracket_basis(v, u),
        Ordering::Less => {}
    }
    let key = (u.clone(), v.clone());
    if let Some(r) = cache(&BRACKETS).lock().unwrap().get(&key) {
        return r.clone();
    }
    let t = tensor_commutator(&expand_basis_element(u), &expand_basis_element(v));
    let r = rewrite_in_basis(&t).expect("commutators of Lie elements are Lie elements");
    cache(&BRACKETS).lock().unwrap().insert(key, r.clone());
    r
}

/// Lie bracket in `LV`, expressed in the Lyndon basis.
pub fn lie_bracket(a: &LieElement, b: &LieElement) -> LieElement {
    a.map_bilinear(b, bracket_basis)
}

/// The generator `x_i` of `LV`.
pub fn lie_generator(i: u8) -> LieElement {
    LieElement::basis(LyndonWord::letter(i))
}

/// Homogeneous component of star degree `s`.
pub fn lie_component(a: &LieElement, s: usize) -> LieElement {
    a.filtered(|w| w.star_degree() == s)
}

/// All words of length `len` over `n_gens` letters, in lexicographic order.
pub fn all_words(n_gens: u8, len: usize) -> Vec<Word> {
    let mut out = vec![Vec::new()];
    for _ in 0..len {
        out = out
            .into_iter()
            .flat_map(|w: Vec<u8>| {
                (1..=n_gens).map(move |l| {
                    let mut w = w.clone();
                    w.push(l);
                    w
                })
            })
            .collect();
    }
    out.into_iter().map(Word).collect()
}

/// Vector of coordinates of `t` against an indexed word list.
pub fn tensor_coordinates(t: &TensorElement, words: &IndexSet<Word>) -> Option<SparseVector> {
    let mut v = SparseVector::zero(words.len());
    for (w, q) in t.iter() {
        v.add_at(words.get_index_of(w)?, q);
    }
    Some(v)
}

/// Inverse of [`tensor_coordinates`].
pub fn tensor_from_coordinates(v: &SparseVector, words: &IndexSet<Word>) -> TensorElement {
    v.iter().map(|(i, q)| (words[i].clone(), q.clone())).collect()
}

/// Basis of `F_nTV` in word length `word_len`.
///
/// `F_nTV` is spanned by products `l_1 ⋯ l_r` of Lie elements with star
/// degrees summing to at least `n`; the spanning products of expanded Lyndon
/// elements are reduced to a basis by elimination.
pub fn tensor_filtration_basis(n_gens: u8, word_len: usize, n: usize) -> Vec<TensorElement> {
    let words: IndexSet<Word> = all_words(n_gens, word_len).into_iter().collect();
    let lyndon: Vec<LyndonWord> = lyndon_basis(n_gens, word_len.saturating_sub(1))
        .into_iter()
        .map(|b| b.word)
        .collect();
    let mut span = Span::new(words.len());
    // depth-first over ordered sequences of Lyndon factors
    let mut stack: Vec<(usize, usize, TensorElement)> = vec![(0, 0, tensor_one())];
    while let Some((len, star, prod)) = stack.pop() {
        if len == word_len {
            if star >= n {
                span.insert(&tensor_coordinates(&prod, &words).expect("length matches"));
            }
            continue;
        }
        for l in lyndon.iter().filter(|l| len + l.len() <= word_len) {
            let next = tensor_mul(&prod, &expand_basis_element(l));
            stack.push((len + l.len(), star + l.star_degree(), next));
        }
    }
    span.basis()
        .iter()
        .map(|r| tensor_from_coordinates(r, &words))
        .collect()
}

/// Letter content of a Lie basis element, useful for grouping.
pub fn lyndon_content(w: &LyndonWord) -> Vec<u8> {
    let mut c = w.letters().to_vec();
    c.sort_unstable();
    c
}

/// `n!` as a rational.
pub(crate) fn factorial(n: usize) -> Rational {
    (1..=n as i64).fold(Rational::one(), |acc, k| acc * int(k))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lw(s: &str) -> LyndonWord {
        LyndonWord::new(s.bytes().map(|b| b - b'0').collect()).expect("lyndon")
    }

    fn word(s: &str) -> Word {
        Word(s.bytes().map(|b| b - b'0').collect())
    }

    fn tensor(terms: &[(&str, i64)]) -> TensorElement {
        terms.iter().map(|(w, c)| (word(w), int(*c))).collect()
    }

    fn words_by_degree(n: u8, d: usize) -> Vec<Vec<String>> {
        let basis = lyndon_basis(n, d);
        (0..=d)
            .map(|s| {
                basis
                    .iter()
                    .filter(|b| b.star_degree() == s)
                    .map(|b| letters_to_string(b.word.letters()))
                    .collect()
            })
            .collect()
    }

    /// Brute-force oracle: rotation-minimal words among all words.
    fn brute_lyndon(n: u8, len: usize) -> Vec<String> {
        all_words(n, len)
            .into_iter()
            .filter(|w| {
                let l = w.letters();
                (1..l.len()).all(|i| {
                    let mut r = l[i..].to_vec();
                    r.extend_from_slice(&l[..i]);
                    l < &r[..]
                })
            })
            .map(|w| letters_to_string(w.letters()))
            .collect()
    }

    #[test]
    fn lyndon_basis_examples() {
        assert_eq!(words_by_degree(2, 1), vec![vec!["1", "2"], vec!["12"]]);
        assert_eq!(words_by_degree(2, 2)[2], vec!["112", "122"]);
        let one = words_by_degree(1, 3);
        assert_eq!(one[0], vec!["1"]);
        assert!(one[1..].iter().all(Vec::is_empty));
    }

    #[test]
    fn lyndon_generation_matches_brute_force() {
        for n in 1..=3u8 {
            for len in 1..=6 {
                let mut gen: Vec<String> = lyndon_basis(n, len - 1)
                    .into_iter()
                    .filter(|b| b.word.len() == len)
                    .map(|b| letters_to_string(b.word.letters()))
                    .collect();
                gen.sort();
                assert_eq!(gen, brute_lyndon(n, len), "n={n} len={len}");
                assert_eq!(gen.len() as u64, witt_number(n as u64, len));
            }
        }
    }

    #[test]
    fn standard_bracketing() {
        assert_eq!(lw("112").bracketing().to_string(), "[x1,[x1,x2]]");
        assert_eq!(lw("122").bracketing().to_string(), "[[x1,x2],x2]");
        assert_eq!(lw("1122").bracketing().to_string(), "[x1,[[x1,x2],x2]]");
    }

    #[test]
    fn expansion_examples() {
        assert_eq!(expand_basis_element(&lw("1")), tensor(&[("1", 1)]));
        assert_eq!(expand_basis_element(&lw("12")), tensor(&[("12", 1), ("21", -1)]));
        assert_eq!(
            expand_basis_element(&lw("112")),
            tensor(&[("112", 1), ("121", -2), ("211", 1)])
        );
    }

    #[test]
    fn bracket_examples() {
        let x1 = lie_generator(1);
        let x2 = lie_generator(2);
        assert!(lie_bracket(&x1, &x1).is_zero());
        assert_eq!(lie_bracket(&x1, &x2), LieElement::basis(lw("12")));
        let inner = lie_bracket(&x1, &x2);
        assert_eq!(lie_bracket(&inner, &x1), -LieElement::basis(lw("112")));
    }

    #[test]
    fn rewrite_examples() {
        assert_eq!(
            rewrite_in_basis(&tensor(&[("12", 1), ("21", -1)])),
            Some(LieElement::basis(lw("12")))
        );
        assert_eq!(rewrite_in_basis(&tensor(&[("12", 1), ("21", 1)])), None);
        assert_eq!(
            rewrite_in_basis(&tensor(&[("112", 1), ("121", -2), ("211", 1)])),
            Some(LieElement::basis(lw("112")))
        );
        assert_eq!(rewrite_in_basis(&tensor_one()), None);
    }

    #[test]
    fn filtration_basis_examples() {
        assert_eq!(tensor_filtration_basis(2, 2, 0).len(), 4);
        let f1 = tensor_filtration_basis(2, 2, 1);
        assert_eq!(f1.len(), 1);
        assert!(rewrite_in_basis(&f1[0]).is_some());
        let f2 = tensor_filtration_basis(2, 3, 2);
        assert_eq!(f2.len(), 2);
        let lie: Vec<TensorElement> = ["112", "122"].iter().map(|w| expand_basis_element(&lw(w))).collect();
        let words: IndexSet<Word> = all_words(2, 3).into_iter().collect();
        let span = Span::from_vectors(8, lie.iter().map(|t| tensor_coordinates(t, &words).unwrap()));
        for b in &f2 {
            assert!(span.contains(&tensor_coordinates(b, &words).unwrap()));
        }
    }

    #[test]
    fn filtration_is_nested_and_multiplicative() {
        for len in 1..=4 {
            let words: IndexSet<Word> = all_words(2, len).into_iter().collect();
            let spans: Vec<Span> = (0..=len)
                .map(|n| {
                    Span::from_vectors(
                        words.len(),
                        tensor_filtration_basis(2, len, n)
                            .iter()
                            .map(|t| tensor_coordinates(t, &words).unwrap()),
                    )
                })
                .collect();
            for n in 0..len {
                assert!(spans[n].contains_span(&spans[n + 1]));
            }
        }
        // F_p · F_q ⊆ F_{p+q} at total length 4
        let words: IndexSet<Word> = all_words(2, 4).into_iter().collect();
        for (lp, lq) in [(1, 3), (2, 2), (3, 1)] {
            for p in 0..lp {
                for q in 0..lq {
                    let target = Span::from_vectors(
                        words.len(),
                        tensor_filtration_basis(2, 4, p + q)
                            .iter()
                            .map(|t| tensor_coordinates(t, &words).unwrap()),
                    );
                    for a in tensor_filtration_basis(2, lp, p) {
                        for b in tensor_filtration_basis(2, lq, q) {
                            let prod = tensor_coordinates(&tensor_mul(&a, &b), &words).unwrap();
                            assert!(target.contains(&prod));
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn multiset_permutation_count() {
        assert_eq!(multiset_permutations(&[1, 1, 2, 2]).len(), 6);
        assert_eq!(multiset_permutations(&[3]).len(), 1);
        assert_eq!(multiset_permutations(&[]).len(), 1);
    }
}
