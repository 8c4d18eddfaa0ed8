//! Values derived by small independent computations written out here, not
//! by the routines under test.

use nilcomm::envelope::{ideal_generator, induced_hom, poisson_ideal_generators, EnvelopePresentation};
use nilcomm::filtration::{
    associated_graded, commutator_filtration, nil_poisson_filtration, upper_triangular_2x2, FiltrationKind,
};
use nilcomm::freelie::{lyndon_basis, witt_number, LyndonWord, Word};
use nilcomm::freepoisson::{
    e_inverse, generator, lie_factor, monomials_with_content, multiply, poisson_bracket, star_product, symmetrize,
    PoissonElement,
};
use nilcomm::linalg::{int, ratio, Rational};
use nilcomm::quantize::QuantizedAlgebra;
use nilcomm::syntax::parse_poisson;
use nilcomm::TensorElement;
use num::{One, Zero};
use std::collections::BTreeMap;

fn x(i: u8) -> PoissonElement {
    generator(i)
}

fn lie(s: &str) -> PoissonElement {
    lie_factor(&LyndonWord::new(s.bytes().map(|b| b - b'0').collect()).unwrap())
}

/// Solves `Σ c_k cols[k] = target` by dense Gauss-Jordan elimination.
fn dense_solve(cols: &[Vec<Rational>], target: &[Rational]) -> Vec<Rational> {
    let n = cols.len();
    let rows = target.len();
    let mut m: Vec<Vec<Rational>> = (0..rows)
        .map(|r| {
            let mut row: Vec<Rational> = cols.iter().map(|c| c[r].clone()).collect();
            row.push(target[r].clone());
            row
        })
        .collect();
    let mut pivot_row = 0;
    let mut pivots = Vec::new();
    for col in 0..n {
        let Some(p) = (pivot_row..rows).find(|&r| !m[r][col].is_zero()) else {
            continue;
        };
        m.swap(pivot_row, p);
        let inv = Rational::one() / m[pivot_row][col].clone();
        for v in m[pivot_row].iter_mut() {
            *v = &*v * &inv;
        }
        for r in 0..rows {
            if r != pivot_row && !m[r][col].is_zero() {
                let f = m[r][col].clone();
                for c in 0..=n {
                    let sub = &f * &m[pivot_row][c];
                    m[r][c] = &m[r][c] - &sub;
                }
            }
        }
        pivots.push(col);
        pivot_row += 1;
    }
    assert_eq!(pivots.len(), n, "columns are independent");
    let mut out = vec![Rational::zero(); n];
    for (r, &c) in pivots.iter().enumerate() {
        out[c] = m[r][n].clone();
    }
    out
}

/// `e⁻¹` of a tensor with a single letter content, by brute force.
fn oracle_e_inverse(t: &TensorElement, content: &[u8]) -> PoissonElement {
    let monos = monomials_with_content(content);
    let mut words: Vec<Word> = Vec::new();
    let images: Vec<TensorElement> = monos.iter().map(|m| symmetrize(&PoissonElement::basis(m.clone()))).collect();
    for img in images.iter().chain(std::iter::once(t)) {
        for (w, _) in img.iter() {
            if !words.contains(w) {
                words.push(w.clone());
            }
        }
    }
    let column = |e: &TensorElement| words.iter().map(|w| e.coeff(w)).collect::<Vec<_>>();
    let cols: Vec<Vec<Rational>> = images.iter().map(column).collect();
    let coeffs = dense_solve(&cols, &column(t));
    monos.into_iter().zip(coeffs).filter(|(_, c)| !c.is_zero()).collect()
}

#[test]
fn star_product_of_two_letters_matches_brute_force() {
    let t: TensorElement = [(Word(vec![1, 2]), Rational::one())].into_iter().collect();
    let oracle = oracle_e_inverse(&t, &[1, 2]);
    assert_eq!(oracle, &multiply(&x(1), &x(2)) + &lie("12").scaled(&ratio(1, 2)));
    assert_eq!(star_product(&x(1), &x(2)), oracle);
    assert_eq!(parse_poisson("x1*x2 + 1/2*{x1,x2}", 2).unwrap(), oracle);
}

#[test]
fn e_inverse_matches_brute_force_on_every_word_of_a_content() {
    for content in [vec![1, 1, 2], vec![1, 2, 2, 3], vec![1, 1, 2, 2]] {
        let mut perms = vec![content.clone()];
        // all distinct rearrangements, by repeated adjacent swaps
        let mut k = 0;
        while k < perms.len() {
            for i in 0..content.len() - 1 {
                let mut p = perms[k].clone();
                p.swap(i, i + 1);
                if !perms.contains(&p) {
                    perms.push(p);
                }
            }
            k += 1;
        }
        for p in perms {
            let t: TensorElement = [(Word(p), Rational::one())].into_iter().collect();
            assert_eq!(e_inverse(&t), oracle_e_inverse(&t, &content));
        }
    }
}

#[test]
fn witt_numbers_match_necklace_counts() {
    // primitive necklaces of length L over n letters, counted by rotation
    fn count(n: u8, len: usize) -> usize {
        let total = (n as usize).pow(len as u32);
        (0..total)
            .filter(|&code| {
                let w: Vec<usize> = (0..len).map(|k| (code / (n as usize).pow(k as u32)) % n as usize).collect();
                let rotations: Vec<Vec<usize>> = (1..len).map(|r| [&w[r..], &w[..r]].concat()).collect();
                rotations.iter().all(|r| &w < r)
            })
            .count()
    }
    for n in 1..=3u8 {
        for len in 1..=5 {
            assert_eq!(witt_number(n as u64, len) as usize, count(n, len), "n={n} len={len}");
            let basis = lyndon_basis(n, len - 1);
            assert_eq!(basis.iter().filter(|b| b.word.len() == len).count(), count(n, len));
        }
    }
}

#[test]
fn bracket_with_a_square_follows_leibniz() {
    // {x2, x1²} = 2·x1·{x2, x1} = −2·x1·(12)
    let g = ideal_generator(&[2], 0, &multiply(&x(1), &x(1)));
    let expected = multiply(&x(1), &lie("12")).scaled(&int(-2));
    assert_eq!(poisson_bracket(&x(2), &multiply(&x(1), &x(1))), expected);
    let pres = EnvelopePresentation::new(2, vec![multiply(&x(1), &x(1))], 1, 3).unwrap();
    let gens = poisson_ideal_generators(&pres, 1).unwrap();
    assert!(gens.contains(&g) || gens.contains(&g.scaled(&int(-1))));
}

#[test]
fn induced_hom_on_a_swap_and_a_square() {
    let swap = BTreeMap::from([(1, x(2)), (2, x(1))]);
    assert_eq!(induced_hom(&swap, &lie("12")).unwrap(), lie("12").scaled(&int(-1)));
    let square = BTreeMap::from([(1, multiply(&x(1), &x(1))), (2, x(2))]);
    assert_eq!(induced_hom(&square, &lie("12")).unwrap(), multiply(&x(1), &lie("12")).scaled(&int(2)));
    assert!(induced_hom(&BTreeMap::from([(1, x(1))]), &lie("12")).is_err());
}

#[test]
fn upper_triangular_filtration_is_the_strict_upper_part() {
    let alg = upper_triangular_2x2();
    let chain = commutator_filtration(&alg).unwrap();
    // [e11, e12] = e12 regenerates e12 at every step
    for n in 1..=5 {
        assert_eq!(chain.piece(n).rank(), 1);
        assert!(chain.piece(n).contains(&alg.basis_vector(2)), "e12 in F_{n}");
    }
    assert!(!chain.vanishes());
    assert_eq!(chain.nil_order(), None);
}

#[test]
fn graded_algebra_has_its_degree_filtration() {
    let q = QuantizedAlgebra::new(2, 2).unwrap();
    let (_, alg) = q.window_algebra(3);
    let chain = commutator_filtration(&alg).unwrap();
    let gr = associated_graded(&alg, &chain, FiltrationKind::Commutator).unwrap();
    gr.validate().unwrap();
    let again = nil_poisson_filtration(&gr).unwrap();
    for n in 0..=3 {
        assert_eq!(again.piece(n), &gr.degree_at_least(n).unwrap(), "F_{n}");
    }
}

#[test]
fn dual_numbers_keep_one_and_x() {
    let pres = EnvelopePresentation::new(1, vec![multiply(&x(1), &x(1))], 0, 3).unwrap();
    let pieces = nilcomm::envelope::envelope_truncated(&pres);
    assert_eq!(pieces[0].quotient_rank, 2);
}
