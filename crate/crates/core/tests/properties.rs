//! Randomized invariants over small free algebras.

use std::collections::BTreeMap;

use nilcomm::envelope::{gap_witness_with, induced_hom, local_model_bracket};
use nilcomm::freepoisson::{
    e_inverse, monomials_up_to_weight, multiply, one, poisson_bracket, star_component, star_product, symmetrize,
    PoissonElement, PoissonMonomial,
};
use nilcomm::linalg::ratio;
use nilcomm::quantize::QuantizedAlgebra;
use proptest::prelude::*;

fn element(n_gens: u8, max_weight: usize, max_terms: usize) -> impl Strategy<Value = PoissonElement> {
    let pool: Vec<PoissonMonomial> = monomials_up_to_weight(n_gens, max_weight);
    proptest::collection::vec((proptest::sample::select(pool), -5i64..=5, 1i64..=4), 1..=max_terms).prop_map(
        |terms| {
            let mut a = PoissonElement::zero();
            for (m, p, q) in terms {
                a.add_term(m, &ratio(p, q));
            }
            a
        },
    )
    .prop_filter("nonzero", |a| !a.is_zero())
}

fn max_star(a: &PoissonElement) -> usize {
    a.keys().map(PoissonMonomial::star_degree).max().unwrap_or(0)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn star_product_is_associative(a in element(2, 2, 2), b in element(2, 2, 2), c in element(2, 2, 2)) {
        prop_assert_eq!(
            star_product(&star_product(&a, &b), &c),
            star_product(&a, &star_product(&b, &c))
        );
    }

    #[test]
    fn symmetrization_round_trips(a in element(3, 4, 4)) {
        prop_assert_eq!(e_inverse(&symmetrize(&a)), a);
    }

    #[test]
    fn bracket_is_a_biderivation_satisfying_jacobi(a in element(3, 2, 2), b in element(3, 2, 2), c in element(3, 2, 2)) {
        let leibniz = &poisson_bracket(&a, &multiply(&b, &c))
            - &(&multiply(&poisson_bracket(&a, &b), &c) + &multiply(&b, &poisson_bracket(&a, &c)));
        prop_assert!(leibniz.is_zero());
        let jacobi = &(&poisson_bracket(&a, &poisson_bracket(&b, &c)) + &poisson_bracket(&b, &poisson_bracket(&c, &a)))
            + &poisson_bracket(&c, &poisson_bracket(&a, &b));
        prop_assert!(jacobi.is_zero());
    }

    #[test]
    fn star_components_preserve_weight_and_shift_star_degree(a in element(2, 3, 1), b in element(2, 3, 1), p in 0usize..4) {
        let (ma, mb) = (a.keys().next().unwrap().clone(), b.keys().next().unwrap().clone());
        for m in star_component(&a, &b, p).keys() {
            prop_assert_eq!(m.weight(), ma.weight() + mb.weight());
            prop_assert_eq!(m.star_degree(), ma.star_degree() + mb.star_degree() + p);
        }
    }

    #[test]
    fn truncated_product_has_a_two_sided_unit(a in element(2, 3, 3), d in 0usize..4) {
        let q = QuantizedAlgebra::new(2, d).unwrap();
        let a = nilcomm::freepoisson::truncate_star(&a, d);
        prop_assert_eq!(q.truncated_product(&one(), &a).unwrap(), a.clone());
        prop_assert_eq!(q.truncated_product(&a, &one()).unwrap(), a);
    }

    #[test]
    fn induced_hom_respects_brackets(
        a in element(2, 3, 2),
        b in element(2, 3, 2),
        p1 in element(2, 2, 2),
        p2 in element(2, 2, 2),
    ) {
        // polynomial images of degree ≤ 2
        let poly = |e: PoissonElement| e.filtered(|m| m.star_degree() == 0);
        let images = BTreeMap::from([(1, poly(p1)), (2, poly(p2))]);
        let theta = |e: &PoissonElement| induced_hom(&images, e).unwrap();
        prop_assert_eq!(theta(&poisson_bracket(&a, &b)), poisson_bracket(&theta(&a), &theta(&b)));
        prop_assert_eq!(theta(&multiply(&a, &b)), multiply(&theta(&a), &theta(&b)));
    }

    #[test]
    fn local_model_bracket_agrees_with_the_free_bracket(a in element(2, 4, 2), b in element(2, 4, 2)) {
        prop_assume!(max_star(&a) + max_star(&b) <= 3);
        prop_assert_eq!(local_model_bracket(&a, &b), poisson_bracket(&a, &b));
    }

    #[test]
    fn gap_image_is_nonzero_for_injective_assignments(
        (n, js) in (4u8..=6).prop_flat_map(|n| {
            Just((1..=n).collect::<Vec<u8>>()).prop_shuffle().prop_map(move |v| (n, [v[0], v[1], v[2], v[3]]))
        })
    ) {
        let w = gap_witness_with(n, js).unwrap();
        prop_assert!(w.envelope_side.is_zero());
        prop_assert!(!w.naive_image.is_zero());
        // products of two brackets of letters
        prop_assert!(w.naive_image.keys().all(|m| m.factors().len() == 2 && m.factors().iter().all(|f| f.len() == 2)));
    }
}
