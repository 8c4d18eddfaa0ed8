//! Surface syntax: a recursive-descent expression parser, a canonical
//! printer, JSON interchange and the two text file formats used by the CLI.
//!
//! Grammar, loosest binding first:
//!
//! ```text
//! expr   := term (('+' | '-') term)*
//! term   := unary (('*' | '**') unary)*
//! unary  := '-' unary | power
//! power  := atom ('^' digits)?
//! atom   := digits ('/' digits)? | 'x' digits | '(' digits ')'
//!         | '(' expr ')' | '{' expr ',' expr '}' | '[' expr ',' expr ']'
//! ```
//!
//! `(112)` is the Lyndon basis element with that word; parentheses around a
//! bare digit string always mean a Lyndon literal. `**` is the star product.
//! Offsets in errors are 1-based byte positions.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::error::AlgebraError;
use crate::filtration::TruncatedAlgebra;
use crate::freelie::{
    expand_basis_element, lie_bracket, tensor_commutator, tensor_letter, tensor_mul, LyndonWord, TensorElement, Word,
};
use crate::freepoisson::{
    from_lie, generator, lie_factor, multiply, one, poisson_bracket, star_product, to_lie, PoissonElement,
    PoissonMonomial,
};
use crate::linalg::{format_rational, parse_rational, Rational};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("syntax error at offset {offset}: {message}")]
    Syntax { offset: usize, message: String },

    #[error("unknown generator x{index} at offset {offset} ({n_gens} generators)")]
    UnknownGenerator { offset: usize, index: usize, n_gens: usize },

    #[error("line {line}: {inner}")]
    InLine { line: usize, inner: Box<ParseError> },
}

impl ParseError {
    /// 1-based byte offset within the parsed string.
    pub fn offset(&self) -> usize {
        match self {
            ParseError::Syntax { offset, .. } | ParseError::UnknownGenerator { offset, .. } => *offset,
            ParseError::InLine { inner, .. } => inner.offset(),
        }
    }
}

/// Which algebra an expression is read in.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    /// `SLV`: `*` is the commutative product.
    Poisson,
    /// `TV`: `*` is concatenation and `(w)` expands the Lie basis element.
    Tensor,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Element {
    Poisson(PoissonElement),
    Tensor(TensorElement),
}

impl Element {
    fn add(self, other: Element) -> Element {
        match (self, other) {
            (Element::Poisson(a), Element::Poisson(b)) => Element::Poisson(a + b),
            (Element::Tensor(a), Element::Tensor(b)) => Element::Tensor(a + b),
            _ => unreachable!("one mode per parse"),
        }
    }

    fn scaled(&self, q: &Rational) -> Element {
        match self {
            Element::Poisson(a) => Element::Poisson(a.scaled(q)),
            Element::Tensor(a) => Element::Tensor(a.scaled(q)),
        }
    }
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
    n_gens: u8,
    mode: Mode,
}

type PResult<T> = Result<T, ParseError>;

impl<'a> Parser<'a> {
    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn error<T>(&self, at: usize, message: impl Into<String>) -> PResult<T> {
        Err(ParseError::Syntax {
            offset: at + 1,
            message: message.into(),
        })
    }

    fn unexpected<T>(&mut self, wanted: &str) -> PResult<T> {
        match self.peek() {
            None => self.error(self.pos, format!("unexpected end of input, expected {wanted}")),
            Some(c) => self.error(self.pos, format!("unexpected '{}', expected {wanted}", c as char)),
        }
    }

    fn expect(&mut self, c: u8) -> PResult<()> {
        if self.peek() == Some(c) {
            self.pos += 1;
            Ok(())
        } else {
            self.unexpected(&format!("'{}'", c as char))
        }
    }

    fn digits(&mut self) -> Option<&'a str> {
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        (self.pos > start).then(|| std::str::from_utf8(&self.src[start..self.pos]).expect("ascii"))
    }

    fn constant(&self, q: Rational) -> Element {
        match self.mode {
            Mode::Poisson => Element::Poisson(one().scaled(&q)),
            Mode::Tensor => Element::Tensor(TensorElement::basis(Word(Vec::new())).scaled(&q)),
        }
    }

    fn expr(&mut self) -> PResult<Element> {
        let mut acc = self.term()?;
        loop {
            match self.peek() {
                Some(b'+') => {
                    self.pos += 1;
                    acc = acc.add(self.term()?);
                }
                Some(b'-') => {
                    self.pos += 1;
                    acc = acc.add(self.term()?.scaled(&-Rational::from_integer(1.into())));
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> PResult<Element> {
        let mut acc = self.unary()?;
        while self.peek() == Some(b'*') {
            let at = self.pos;
            self.pos += 1;
            let star = self.src.get(self.pos) == Some(&b'*');
            if star {
                self.pos += 1;
            }
            let rhs = self.unary()?;
            acc = match (acc, rhs, star) {
                (Element::Poisson(a), Element::Poisson(b), false) => Element::Poisson(multiply(&a, &b)),
                (Element::Poisson(a), Element::Poisson(b), true) => Element::Poisson(star_product(&a, &b)),
                (Element::Tensor(a), Element::Tensor(b), false) => Element::Tensor(tensor_mul(&a, &b)),
                _ => return self.error(at, "'**' is only available for Poisson expressions"),
            };
        }
        Ok(acc)
    }

    fn unary(&mut self) -> PResult<Element> {
        if self.peek() == Some(b'-') {
            self.pos += 1;
            let inner = self.unary()?;
            return Ok(inner.scaled(&-Rational::from_integer(1.into())));
        }
        self.power()
    }

    fn power(&mut self) -> PResult<Element> {
        let base = self.atom()?;
        if self.peek() != Some(b'^') {
            return Ok(base);
        }
        self.pos += 1;
        self.skip_ws();
        let at = self.pos;
        let Some(k) = self.digits() else {
            return self.unexpected("an exponent");
        };
        let Ok(k) = k.parse::<usize>() else {
            return self.error(at, "exponent too large");
        };
        let mut acc = self.constant(Rational::from_integer(1.into()));
        for _ in 0..k {
            acc = match (acc, &base) {
                (Element::Poisson(a), Element::Poisson(b)) => Element::Poisson(multiply(&a, b)),
                (Element::Tensor(a), Element::Tensor(b)) => Element::Tensor(tensor_mul(&a, b)),
                _ => unreachable!("one mode per parse"),
            };
        }
        Ok(acc)
    }

    fn generator(&self, at: usize, index: usize) -> PResult<Element> {
        if index == 0 || index > self.n_gens as usize {
            return Err(ParseError::UnknownGenerator {
                offset: at + 1,
                index,
                n_gens: self.n_gens as usize,
            });
        }
        Ok(match self.mode {
            Mode::Poisson => Element::Poisson(generator(index as u8)),
            Mode::Tensor => Element::Tensor(tensor_letter(index as u8)),
        })
    }

    fn atom(&mut self) -> PResult<Element> {
        let at = match self.peek() {
            Some(_) => self.pos,
            None => return self.unexpected("an operand"),
        };
        match self.src[at] {
            b'0'..=b'9' => {
                let numer = self.digits().expect("at a digit");
                let mut text = numer.to_string();
                if self.src.get(self.pos) == Some(&b'/') {
                    self.pos += 1;
                    let Some(denom) = self.digits() else {
                        return self.unexpected("a denominator");
                    };
                    text = format!("{numer}/{denom}");
                }
                match parse_rational(&text) {
                    Some(q) => Ok(self.constant(q)),
                    None => self.error(at, "zero denominator"),
                }
            }
            b'x' => {
                self.pos += 1;
                let Some(d) = self.digits() else {
                    return self.unexpected("a generator index");
                };
                let index = d.parse::<usize>().unwrap_or(usize::MAX);
                self.generator(at, index)
            }
            b'(' => {
                self.pos += 1;
                let save = self.pos;
                if let Some(d) = self.digits() {
                    if self.src.get(self.pos) == Some(&b')') {
                        self.pos += 1;
                        return self.lyndon_literal(save, d);
                    }
                }
                self.pos = save;
                let inner = self.expr()?;
                self.expect(b')')?;
                Ok(inner)
            }
            b'{' => {
                self.pos += 1;
                let a = self.expr()?;
                self.expect(b',')?;
                let b = self.expr()?;
                self.expect(b'}')?;
                match (a, b) {
                    (Element::Poisson(a), Element::Poisson(b)) => Ok(Element::Poisson(poisson_bracket(&a, &b))),
                    _ => self.error(at, "'{a,b}' is only available for Poisson expressions"),
                }
            }
            b'[' => {
                self.pos += 1;
                let a = self.expr()?;
                self.expect(b',')?;
                let b = self.expr()?;
                self.expect(b']')?;
                match (a, b) {
                    (Element::Poisson(a), Element::Poisson(b)) => match (to_lie(&a), to_lie(&b)) {
                        (Some(a), Some(b)) => Ok(Element::Poisson(from_lie(&lie_bracket(&a, &b)))),
                        _ => self.error(at, "'[a,b]' needs two Lie elements"),
                    },
                    (Element::Tensor(a), Element::Tensor(b)) => Ok(Element::Tensor(tensor_commutator(&a, &b))),
                    _ => unreachable!("one mode per parse"),
                }
            }
            c => self.error(at, format!("unexpected '{}', expected an operand", c as char)),
        }
    }

    fn lyndon_literal(&self, start: usize, digits: &str) -> PResult<Element> {
        let mut letters = Vec::with_capacity(digits.len());
        for (k, c) in digits.bytes().enumerate() {
            let i = (c - b'0') as usize;
            if i == 0 || i > self.n_gens as usize {
                return Err(ParseError::UnknownGenerator {
                    offset: start + k + 1,
                    index: i,
                    n_gens: self.n_gens as usize,
                });
            }
            letters.push(i as u8);
        }
        let Some(w) = LyndonWord::new(letters) else {
            return self.error(start, format!("({digits}) is not a Lyndon word"));
        };
        Ok(match self.mode {
            Mode::Poisson => Element::Poisson(lie_factor(&w)),
            Mode::Tensor => Element::Tensor(expand_basis_element(&w)),
        })
    }
}

/// Parses a whole string in the given mode.
pub fn parse_element(src: &str, n_gens: u8, mode: Mode) -> Result<Element, ParseError> {
    let mut p = Parser {
        src: src.as_bytes(),
        pos: 0,
        n_gens,
        mode,
    };
    let e = p.expr()?;
    if p.peek().is_some() {
        return p.unexpected("an operator or end of input");
    }
    Ok(e)
}

pub fn parse_poisson(src: &str, n_gens: u8) -> Result<PoissonElement, ParseError> {
    match parse_element(src, n_gens, Mode::Poisson)? {
        Element::Poisson(a) => Ok(a),
        Element::Tensor(_) => unreachable!("mode is Poisson"),
    }
}

pub fn parse_tensor(src: &str, n_gens: u8) -> Result<TensorElement, ParseError> {
    match parse_element(src, n_gens, Mode::Tensor)? {
        Element::Tensor(a) => Ok(a),
        Element::Poisson(_) => unreachable!("mode is Tensor"),
    }
}

/// `x1^2*x2*(12)`; the empty monomial is `1`.
pub fn format_monomial(m: &PoissonMonomial) -> String {
    if m.is_one() {
        return "1".into();
    }
    let mut runs: Vec<(&LyndonWord, usize)> = Vec::new();
    for f in m.factors() {
        match runs.last_mut() {
            Some((g, k)) if *g == f => *k += 1,
            _ => runs.push((f, 1)),
        }
    }
    runs.iter()
        .map(|(f, k)| if *k == 1 { f.to_string() } else { format!("{f}^{k}") })
        .collect::<Vec<_>>()
        .join("*")
}

fn format_word(w: &Word) -> String {
    if w.0.is_empty() {
        return "1".into();
    }
    w.0.iter().map(|l| format!("x{l}")).collect::<Vec<_>>().join("*")
}

fn format_terms<'a>(terms: impl Iterator<Item = (String, &'a Rational, bool)>) -> String {
    let mut out = String::new();
    for (k, (body, q, is_one)) in terms.enumerate() {
        let negative = q < &Rational::from_integer(0.into());
        let abs = if negative { -q.clone() } else { q.clone() };
        let unit = abs == Rational::from_integer(1.into());
        let piece = if is_one {
            format_rational(&abs)
        } else if unit {
            body
        } else {
            format!("{}*{body}", format_rational(&abs))
        };
        match (k, negative) {
            (0, false) => out.push_str(&piece),
            (0, true) => {
                out.push('-');
                out.push_str(&piece);
            }
            (_, false) => {
                out.push_str(" + ");
                out.push_str(&piece);
            }
            (_, true) => {
                out.push_str(" - ");
                out.push_str(&piece);
            }
        }
    }
    if out.is_empty() {
        out.push('0');
    }
    out
}

/// Canonical text of a Poisson element; reparses to the same element.
pub fn format_poisson(a: &PoissonElement) -> String {
    format_terms(a.iter().map(|(m, q)| (format_monomial(m), q, m.is_one())))
}

/// Canonical text of a tensor element, words written as products of letters.
pub fn format_tensor(t: &TensorElement) -> String {
    format_terms(t.iter().map(|(w, q)| (format_word(w), q, w.0.is_empty())))
}

/// Display form with factors juxtaposed, terms in descending order and no
/// spaces: `(13)(24)+(12)(34)`. Not meant to be reparsed.
pub fn format_compact(a: &PoissonElement) -> String {
    let mut out = String::new();
    for (k, (m, q)) in a.iter().rev().enumerate() {
        let negative = q < &Rational::from_integer(0.into());
        let abs = if negative { -q.clone() } else { q.clone() };
        if negative {
            out.push('-');
        } else if k > 0 {
            out.push('+');
        }
        let body: String = m.factors().iter().map(|f| f.to_string()).collect();
        if abs != Rational::from_integer(1.into()) || m.is_one() {
            out.push_str(&format_rational(&abs));
        }
        out.push_str(&body);
    }
    if out.is_empty() {
        out.push('0');
    }
    out
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FactorJson {
    pub word: Vec<u8>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PoissonTermJson {
    pub coeff: String,
    pub factors: Vec<FactorJson>,
}

/// JSON form of a Poisson element, terms in canonical order.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PoissonJson {
    pub terms: Vec<PoissonTermJson>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TensorTermJson {
    pub coeff: String,
    pub word: Vec<u8>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TensorJson {
    pub terms: Vec<TensorTermJson>,
}

pub fn poisson_to_json(a: &PoissonElement) -> PoissonJson {
    PoissonJson {
        terms: a
            .iter()
            .map(|(m, q)| PoissonTermJson {
                coeff: format_rational(q),
                factors: m
                    .factors()
                    .iter()
                    .map(|f| FactorJson {
                        word: f.letters().to_vec(),
                    })
                    .collect(),
            })
            .collect(),
    }
}

fn coeff_from_json(s: &str) -> Result<Rational, AlgebraError> {
    parse_rational(s).ok_or_else(|| AlgebraError::InvalidPresentation(format!("bad coefficient {s:?}")))
}

pub fn poisson_from_json(j: &PoissonJson) -> Result<PoissonElement, AlgebraError> {
    let mut out = PoissonElement::zero();
    for t in &j.terms {
        let factors = t
            .factors
            .iter()
            .map(|f| {
                LyndonWord::new(f.word.clone())
                    .ok_or_else(|| AlgebraError::NotALieElement(format!("{:?} is not a Lyndon word", f.word)))
            })
            .collect::<Result<Vec<_>, _>>()?;
        out.add_term(PoissonMonomial::from_factors(factors), &coeff_from_json(&t.coeff)?);
    }
    Ok(out)
}

pub fn tensor_to_json(t: &TensorElement) -> TensorJson {
    TensorJson {
        terms: t
            .iter()
            .map(|(w, q)| TensorTermJson {
                coeff: format_rational(q),
                word: w.0.clone(),
            })
            .collect(),
    }
}

pub fn tensor_from_json(j: &TensorJson) -> Result<TensorElement, AlgebraError> {
    let mut out = TensorElement::zero();
    for t in &j.terms {
        if t.word.contains(&0) {
            return Err(AlgebraError::UnknownGenerator {
                index: 0,
                n_gens: t.word.iter().copied().max().unwrap_or(0) as usize,
            });
        }
        out.add_term(Word(t.word.clone()), &coeff_from_json(&t.coeff)?);
    }
    Ok(out)
}

/// A presentation file: `gens N`, then one relation per line. Blank lines
/// and `#` comments are ignored.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PresentationText {
    pub n_gens: u8,
    pub relations: Vec<PoissonElement>,
}

pub fn parse_presentation(text: &str) -> Result<PresentationText, ParseError> {
    let mut n_gens: Option<u8> = None;
    let mut relations = Vec::new();
    for (k, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("");
        if line.trim().is_empty() {
            continue;
        }
        let in_line = |e: ParseError| ParseError::InLine {
            line: k + 1,
            inner: Box::new(e),
        };
        match n_gens {
            None => {
                let rest = line.trim_start();
                let lead = line.len() - rest.len();
                let Some(count) = rest.strip_prefix("gens") else {
                    return Err(in_line(ParseError::Syntax {
                        offset: lead + 1,
                        message: "expected 'gens N'".into(),
                    }));
                };
                match count.trim().parse::<u8>() {
                    Ok(n) if n > 0 && n <= 9 => n_gens = Some(n),
                    _ => {
                        return Err(in_line(ParseError::Syntax {
                            offset: lead + 5,
                            message: "generator count must be between 1 and 9".into(),
                        }))
                    }
                }
            }
            Some(n) => relations.push(parse_poisson(line, n).map_err(in_line)?),
        }
    }
    match n_gens {
        Some(n_gens) => Ok(PresentationText { n_gens, relations }),
        None => Err(ParseError::Syntax {
            offset: 1,
            message: "missing 'gens N' line".into(),
        }),
    }
}

/// JSON form of a finite-dimensional algebra: structure constants as
/// `[i, j, k, "p/q"]` meaning `e_i e_j` has `p/q` on `e_k`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AlgebraJson {
    pub labels: Vec<String>,
    pub unit: usize,
    pub product: Vec<(usize, usize, usize, String)>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bracket: Option<Vec<(usize, usize, usize, String)>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grading: Option<Vec<usize>>,
}

fn triples_to_json(t: Vec<(usize, usize, usize, Rational)>) -> Vec<(usize, usize, usize, String)> {
    t.into_iter().map(|(i, j, k, q)| (i, j, k, format_rational(&q))).collect()
}

fn triples_from_json(t: &[(usize, usize, usize, String)]) -> Result<Vec<(usize, usize, usize, Rational)>, AlgebraError> {
    t.iter()
        .map(|(i, j, k, q)| Ok((*i, *j, *k, coeff_from_json(q)?)))
        .collect()
}

pub fn algebra_to_json(alg: &TruncatedAlgebra) -> AlgebraJson {
    AlgebraJson {
        labels: alg.labels().to_vec(),
        unit: alg.unit(),
        product: triples_to_json(alg.product_triples()),
        bracket: alg.bracket_triples().map(triples_to_json),
        grading: alg.grading().map(<[usize]>::to_vec),
    }
}

/// Builds the algebra and checks it (associativity, unit, bracket axioms).
pub fn algebra_from_json(j: &AlgebraJson) -> Result<TruncatedAlgebra, AlgebraError> {
    let product = triples_from_json(&j.product)?;
    let bracket = j.bracket.as_deref().map(triples_from_json).transpose()?;
    let mut alg = TruncatedAlgebra::from_triples(j.labels.clone(), j.unit, &product, bracket.as_deref())?;
    if let Some(g) = &j.grading {
        alg = alg.with_grading(g.clone())?;
    }
    alg.validate()?;
    Ok(alg)
}

/// Lyndon words as digit strings, grouped by star degree.
pub fn group_by_star_degree(words: &[LyndonWord]) -> BTreeMap<usize, Vec<String>> {
    let mut out: BTreeMap<usize, Vec<String>> = BTreeMap::new();
    for w in words {
        out.entry(w.star_degree())
            .or_default()
            .push(w.letters().iter().map(|l| l.to_string()).collect());
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::freelie::lyndon_words;
    use crate::linalg::ratio;
    use proptest::prelude::*;

    fn lw(s: &str) -> LyndonWord {
        LyndonWord::new(s.bytes().map(|b| b - b'0').collect()).unwrap()
    }

    #[test]
    fn parse_examples() {
        assert_eq!(parse_poisson("{x1,x2}", 2).unwrap(), lie_factor(&lw("12")));
        let b = parse_poisson("x1*x2 + 1/2*{x1,x2}", 2).unwrap();
        assert_eq!(b, star_product(&generator(1), &generator(2)));
        assert_eq!(parse_poisson("x1 ** x2", 2).unwrap(), b);
        let err = parse_poisson("{x1,", 2).unwrap_err();
        assert_eq!(err.offset(), 5);
        assert!(matches!(parse_poisson("x3", 2), Err(ParseError::UnknownGenerator { index: 3, offset: 1, .. })));
        assert_eq!(parse_poisson("[x1,[x1,x2]]", 2).unwrap(), lie_factor(&lw("112")));
        assert_eq!(parse_poisson("-x1^2", 1).unwrap(), multiply(&generator(1), &generator(1)).scaled(&ratio(-1, 1)));
        assert!(parse_poisson("(21)", 2).is_err());
        assert!(parse_poisson("1/0", 2).is_err());
        assert!(parse_poisson("x1 x2", 2).is_err());
        assert!(parse_poisson("[x1*x2,x1]", 2).is_err());
    }

    #[test]
    fn tensor_examples() {
        let t = parse_tensor("[x1,x2]", 2).unwrap();
        assert_eq!(t, parse_tensor("x1*x2 - x2*x1", 2).unwrap());
        assert_eq!(parse_tensor("(12)", 2).unwrap(), t);
        assert!(parse_tensor("{x1,x2}", 2).is_err());
        assert_eq!(format_tensor(&t), "x1*x2 - x2*x1");
    }

    #[test]
    fn printer_examples() {
        let b = star_product(&generator(1), &generator(2));
        assert_eq!(format_poisson(&b), "x1*x2 + 1/2*(12)");
        assert_eq!(format_poisson(&multiply(&generator(1), &generator(1))), "x1^2");
        assert_eq!(format_poisson(&PoissonElement::zero()), "0");
        assert_eq!(format_poisson(&one().scaled(&ratio(-3, 4))), "-3/4");
        let g = &multiply(&lie_factor(&lw("13")), &lie_factor(&lw("24")))
            + &multiply(&lie_factor(&lw("12")), &lie_factor(&lw("34")));
        assert_eq!(format_compact(&g), "(13)(24)+(12)(34)");
    }

    #[test]
    fn presentation_file() {
        let p = parse_presentation("# nodal curve\ngens 2\nx1*x2\n\nx1^2 - x2^3  # cusp\n").unwrap();
        assert_eq!(p.n_gens, 2);
        assert_eq!(p.relations.len(), 2);
        let e = parse_presentation("gens 2\nx1 +\n").unwrap_err();
        assert!(matches!(e, ParseError::InLine { line: 2, .. }));
        assert!(parse_presentation("x1\n").is_err());
    }

    #[test]
    fn algebra_json_round_trip() {
        let alg = crate::filtration::upper_triangular_2x2();
        let j = algebra_to_json(&alg);
        let text = serde_json::to_string(&j).unwrap();
        let back: AlgebraJson = serde_json::from_str(&text).unwrap();
        let alg2 = algebra_from_json(&back).unwrap();
        assert_eq!(alg2.product_triples(), alg.product_triples());
        assert!(text.contains("[1,2,2,\"1\"]"));
    }

    #[test]
    fn grouping() {
        let words: Vec<LyndonWord> = lyndon_words(2, 3).into_iter().filter_map(LyndonWord::new).collect();
        let g = group_by_star_degree(&words);
        assert_eq!(g[&0], vec!["1", "2"]);
        assert_eq!(g[&2], vec!["112", "122"]);
    }

    fn monomial_strategy() -> impl Strategy<Value = PoissonMonomial> {
        let words: Vec<LyndonWord> = lyndon_words(3, 3).into_iter().filter_map(LyndonWord::new).collect();
        proptest::collection::vec(proptest::sample::select(words), 0..4).prop_map(PoissonMonomial::from_factors)
    }

    fn element_strategy() -> impl Strategy<Value = PoissonElement> {
        proptest::collection::vec((monomial_strategy(), -20i64..20, 1i64..12), 0..6).prop_map(|terms| {
            let mut a = PoissonElement::zero();
            for (m, p, q) in terms {
                a.add_term(m, &ratio(p, q));
            }
            a
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(200))]

        #[test]
        fn print_parse_round_trip(a in element_strategy()) {
            let text = format_poisson(&a);
            prop_assert_eq!(parse_poisson(&text, 3).unwrap(), a.clone());
            let j = serde_json::to_string(&poisson_to_json(&a)).unwrap();
            let back: PoissonJson = serde_json::from_str(&j).unwrap();
            prop_assert_eq!(poisson_from_json(&back).unwrap(), a);
        }

        #[test]
        fn tensor_round_trip(terms in proptest::collection::vec((proptest::collection::vec(1u8..4, 0..5), -9i64..9, 1i64..5), 0..6)) {
            let t: TensorElement = terms.into_iter().map(|(w, p, q)| (Word(w), ratio(p, q))).collect();
            prop_assert_eq!(parse_tensor(&format_tensor(&t), 3).unwrap(), t.clone());
            prop_assert_eq!(tensor_from_json(&tensor_to_json(&t)).unwrap(), t);
        }
    }
}
