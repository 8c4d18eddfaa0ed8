//! Values stated explicitly in the source text of the theory.

use nilcomm::envelope::{envelope_truncated, gap_witness, local_model_bracket, p1_rank_check, EnvelopePresentation};
use nilcomm::filtration::nil_poisson_filtration;
use nilcomm::freelie::{lie_bracket, lie_generator, LyndonWord, Word};
use nilcomm::freepoisson::{
    from_lie, generator, lie_factor, monomials_up_to_weight, multiply, poisson_bracket, star_component, star_product,
    symmetrize, PoissonElement,
};
use nilcomm::linalg::ratio;
use nilcomm::quantize::{bx_component, QuantizedAlgebra};
use nilcomm::syntax::format_compact;
use nilcomm::TensorElement;

fn x(i: u8) -> PoissonElement {
    generator(i)
}

fn lie(s: &str) -> PoissonElement {
    lie_factor(&LyndonWord::new(s.bytes().map(|b| b - b'0').collect()).unwrap())
}

#[test]
fn symmetrization_of_two_letters_averages_both_orders() {
    let expected: TensorElement = [(Word(vec![1, 2]), ratio(1, 2)), (Word(vec![2, 1]), ratio(1, 2))]
        .into_iter()
        .collect();
    assert_eq!(symmetrize(&multiply(&x(1), &x(2))), expected);
}

#[test]
fn first_two_star_components_are_product_and_half_bracket() {
    assert_eq!(star_product(&x(1), &x(2)), &multiply(&x(1), &x(2)) + &lie("12").scaled(&ratio(1, 2)));
    let x1sq = multiply(&x(1), &x(1));
    let x2sq = multiply(&x(2), &x(2));
    assert_eq!(star_component(&x1sq, &x(2), 0), multiply(&x1sq, &x(2)));
    // ½{x1², x2²} = 2·x1·x2·(12)
    let expected = multiply(&multiply(&x(1), &x(2)), &lie("12")).scaled(&ratio(2, 1));
    assert_eq!(star_component(&x1sq, &x2sq, 1), expected);
    assert_eq!(bx_component(&x(1), &x(2), 1), lie("12").scaled(&ratio(1, 2)));
}

#[test]
fn gap_counterexample_image() {
    let w = gap_witness(4).unwrap();
    assert!(w.envelope_side.is_zero());
    assert_eq!(format_compact(&w.naive_image), "(13)(24)+(12)(34)");
}

#[test]
fn free_envelope_pieces_are_symmetric_powers_of_lie() {
    // P_n SV = S_n LV: quotient ranks are plain monomial counts
    let pres = EnvelopePresentation::new(2, vec![], 2, 2).unwrap();
    let pieces = envelope_truncated(&pres);
    let monos = monomials_up_to_weight(2, 2);
    for piece in &pieces {
        let count = monos.iter().filter(|m| m.star_degree() == piece.star_degree).count();
        assert_eq!(piece.quotient_rank, count);
    }
    assert_eq!(pieces.iter().map(|p| p.quotient_rank).collect::<Vec<_>>(), vec![6, 1, 0]);
}

#[test]
fn two_forms_of_the_free_algebra() {
    // P_1 SV = SV ⊗ Λ²V; with weight ≤ 3 on two generators that is 1 + 2
    let pres = EnvelopePresentation::new(2, vec![], 1, 3).unwrap();
    let c = p1_rank_check(&pres);
    assert_eq!((c.computed_rank, c.omega2_rank), (3, 3));
    let one_gen = EnvelopePresentation::new(1, vec![], 1, 3).unwrap();
    assert_eq!(p1_rank_check(&one_gen).computed_rank, 0);
}

#[test]
fn nested_brackets_of_generators_are_nested_lie_brackets() {
    let br = local_model_bracket(&x(1), &local_model_bracket(&x(2), &x(3)));
    let expected = from_lie(&lie_bracket(&lie_generator(1), &lie_bracket(&lie_generator(2), &lie_generator(3))));
    assert_eq!(br, expected);
    assert_eq!(poisson_bracket(&x(1), &poisson_bracket(&x(2), &x(3))), expected);
}

#[test]
fn nil_poisson_filtration_of_a_free_window_is_the_star_grading() {
    let pres = EnvelopePresentation::new(2, vec![], 2, 3).unwrap();
    let (_, alg) = nilcomm::envelope::truncated_envelope_algebra(&pres).unwrap();
    let chain = nil_poisson_filtration(&alg).unwrap();
    for r in 0..=3 {
        assert_eq!(chain.piece(r), &alg.degree_at_least(r).unwrap(), "F_{r}");
    }
    assert!(chain.vanishes());
}

#[test]
fn truncation_above_d_is_nilcommutative_of_order_d() {
    for d in 0..=2 {
        let q = QuantizedAlgebra::new(2, d).unwrap();
        let r = q.commutator_filtration_q(d + 1, 3).unwrap();
        assert_eq!(r.rank, 0);
    }
}

#[test]
fn first_graded_piece_of_q_is_two_forms() {
    let q = QuantizedAlgebra::new(2, 1).unwrap();
    // weight ≤ 1 leaves no room for (12); weight ≤ 2 gives SV_0 ⊗ Λ²V
    assert_eq!(q.graded_of_q(1)[1].rank, 0);
    assert_eq!(q.graded_of_q(2)[1].rank, 1);
    assert_eq!(q.graded_of_q(3)[1].rank, 3);
}
