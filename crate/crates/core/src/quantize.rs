//! The quantized algebras `Q^{(d)}`: `SLV` modulo star degree above `d`
//! with the truncated star product `Σ_p B_p`.
//!
//! Everything happens on polynomial representatives. The star product
//! preserves weight and raises star degree, so both "star degree above `d`"
//! and "weight above `N`" span two-sided ideals and every window is an
//! honest finite-dimensional quotient algebra.

use crate::envelope::PoissonWindow;
use crate::error::AlgebraError;
use crate::filtration::{
    associated_graded, commutator_filtration, graded_representatives, product_span, two_sided_ideal, FiltrationChain, FiltrationKind,
    TruncatedAlgebra,
};
use crate::freepoisson::{
    generator, multiply, one, poisson_bracket, star_component, star_degree_component, truncated_star_product,
    truncate_star, PoissonElement,
};
use crate::linalg::{SparseVector, Span};

/// `Q^{(d)}` on `n_gens` generators.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct QuantizedAlgebra {
    n_gens: u8,
    d: usize,
}

/// A rank in a window compared with its predicted value.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WindowRank {
    pub n: usize,
    pub rank: usize,
    pub expected: usize,
    /// The subspaces agree, not only their dimensions.
    pub equal: bool,
}

/// `B_p` on polynomial representatives: the `p`-th star-product component.
pub fn bx_component(a: &PoissonElement, b: &PoissonElement, p: usize) -> PoissonElement {
    star_component(a, b, p)
}

impl QuantizedAlgebra {
    pub fn new(n_gens: u8, d: usize) -> Result<Self, AlgebraError> {
        if n_gens == 0 {
            return Err(AlgebraError::InvalidPresentation("at least one generator is required".into()));
        }
        Ok(QuantizedAlgebra { n_gens, d })
    }

    pub fn n_gens(&self) -> u8 {
        self.n_gens
    }

    pub fn d(&self) -> usize {
        self.d
    }

    fn check(&self, a: &PoissonElement) -> Result<(), AlgebraError> {
        if let Some(m) = a.keys().find(|m| m.star_degree() > self.d) {
            return Err(AlgebraError::DegreeOutOfRange {
                requested: m.star_degree(),
                bound: self.d,
            });
        }
        if let Some(m) = a.keys().find(|m| m.max_letter() > self.n_gens) {
            return Err(AlgebraError::UnknownGenerator {
                index: m.max_letter() as usize,
                n_gens: self.n_gens as usize,
            });
        }
        Ok(())
    }

    /// `Σ_{p ≤ d} B_p(a ⊗ b)` with every term of star degree above `d`
    /// dropped.
    pub fn truncated_product(&self, a: &PoissonElement, b: &PoissonElement) -> Result<PoissonElement, AlgebraError> {
        self.check(a)?;
        self.check(b)?;
        Ok(self.product_unchecked(a, b))
    }

    fn product_unchecked(&self, a: &PoissonElement, b: &PoissonElement) -> PoissonElement {
        truncated_star_product(a, b, self.d)
    }

    /// `x_{w_1} ⋆ x_{w_2} ⋆ …`, the image of a noncommutative monomial.
    pub fn nc_embed(&self, word: &[u8]) -> Result<PoissonElement, AlgebraError> {
        let mut acc = one();
        for &i in word {
            if i == 0 || i > self.n_gens {
                return Err(AlgebraError::UnknownGenerator {
                    index: i as usize,
                    n_gens: self.n_gens as usize,
                });
            }
            acc = self.product_unchecked(&acc, &generator(i));
        }
        Ok(acc)
    }

    /// Monomials of star degree at most `d` and weight at most `max_weight`.
    pub fn window(&self, max_weight: usize) -> PoissonWindow {
        PoissonWindow::free(self.n_gens, self.d, max_weight)
    }

    /// The window as an associative algebra under the truncated product,
    /// graded by star degree.
    pub fn window_algebra(&self, max_weight: usize) -> (PoissonWindow, TruncatedAlgebra) {
        let window = self.window(max_weight);
        let d = self.d;
        let alg = window
            .algebra_with(
                |a, b| {
                    if a.weight() + b.weight() > max_weight || a.star_degree() + b.star_degree() > d {
                        return PoissonElement::zero();
                    }
                    truncated_star_product(&PoissonElement::basis(a.clone()), &PoissonElement::basis(b.clone()), d)
                },
                None,
            )
            .expect("free windows are exact");
        (window, alg)
    }

    /// The commutator filtration of the window algebra.
    pub fn window_filtration(&self, max_weight: usize) -> (PoissonWindow, TruncatedAlgebra, FiltrationChain) {
        let (window, alg) = self.window_algebra(max_weight);
        let chain = commutator_filtration(&alg).expect("the truncated product is associative");
        (window, alg, chain)
    }

    /// `F_n` of the window algebra against `⊕_{e ≥ n} P_e`.
    pub fn commutator_filtration_q(&self, n: usize, max_weight: usize) -> Result<WindowRank, AlgebraError> {
        if n > self.d + 1 {
            return Err(AlgebraError::DegreeOutOfRange {
                requested: n,
                bound: self.d + 1,
            });
        }
        let (_, alg, chain) = self.window_filtration(max_weight);
        Ok(compare_with_degrees(&alg, &chain, n))
    }

    /// [`Self::commutator_filtration_q`] for every `n ≤ d + 1` from one
    /// filtration computation.
    pub fn commutator_filtration_ranks(&self, max_weight: usize) -> Vec<WindowRank> {
        let (_, alg, chain) = self.window_filtration(max_weight);
        (0..=self.d + 1).map(|n| compare_with_degrees(&alg, &chain, n)).collect()
    }

    /// Ranks of `F_n / F_{n+1}` in the window against the number of window
    /// monomials of star degree `n`, for `n ≤ d`.
    pub fn graded_of_q(&self, max_weight: usize) -> Vec<WindowRank> {
        let (window, alg, chain) = self.window_filtration(max_weight);
        let gr = associated_graded(&alg, &chain, FiltrationKind::Commutator).expect("admissible");
        let grading = gr.grading().expect("graded").to_vec();
        (0..=self.d)
            .map(|n| {
                let rank = grading.iter().filter(|&&g| g == n).count();
                let expected = window.basis_monomials().iter().filter(|m| m.star_degree() == n).count();
                WindowRank {
                    n,
                    rank,
                    expected,
                    equal: rank == expected,
                }
            })
            .collect()
    }

    /// Checks that sending each graded basis element of `gr Q` to the
    /// degree-`n` part of its representative is an isomorphism onto the
    /// window of `PA/P_{>d}A`, for both the product and the bracket.
    pub fn graded_isomorphism_holds(&self, max_weight: usize) -> bool {
        let (window, alg, chain) = self.window_filtration(max_weight);
        let Ok(gr) = associated_graded(&alg, &chain, FiltrationKind::Commutator) else {
            return false;
        };
        let images: Vec<PoissonElement> = graded_representatives(&alg, &chain)
            .into_iter()
            .map(|(n, r)| star_degree_component(&window.lift(&r), n))
            .collect();
        if images.len() != gr.dim() {
            return false;
        }
        let coords: Vec<SparseVector> = images.iter().map(|p| window.project(p)).collect();
        if Span::from_vectors(window.rank(), coords.iter().cloned()).rank() != window.rank() {
            return false;
        }
        let image_of = |v: &SparseVector| -> PoissonElement {
            let mut out = PoissonElement::zero();
            for (i, q) in v.iter() {
                out.add_scaled(&images[i], q);
            }
            out
        };
        let cut = |a: &PoissonElement| window.normal_form(&truncate_star(a, self.d));
        for i in 0..gr.dim() {
            for j in 0..gr.dim() {
                let prod = image_of(gr.product_of_basis(i, j));
                if prod != cut(&multiply(&images[i], &images[j])) {
                    return false;
                }
                let br = image_of(gr.bracket_of_basis(i, j).expect("graded bracket"));
                if br != cut(&poisson_bracket(&images[i], &images[j])) {
                    return false;
                }
            }
        }
        true
    }
}

fn compare_with_degrees(alg: &TruncatedAlgebra, chain: &FiltrationChain, n: usize) -> WindowRank {
    let target = alg.degree_at_least(n).expect("graded window");
    let piece = chain.piece(n);
    WindowRank {
        n,
        rank: piece.rank(),
        expected: target.rank(),
        equal: piece == &target,
    }
}

/// Result of the window check of the topology comparison: `J^{⋆N} ⊆ I^m G +
/// G_{≥m}` for `N = m α^d`, and the chain `J^{⋆m} ⊇ M_{m α^d} ⊇ I^{m α^d}`
/// with `M_{m α^d} = Σ_{j ≤ d} I^{m α^{d-j}} G_{≥j}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TopologyCheck {
    pub d: usize,
    pub m: usize,
    pub alpha: usize,
    /// `N = m α^d`.
    pub power: usize,
    pub max_weight: usize,
    /// `J` is everything of positive weight in the window.
    pub ideal_is_augmentation: bool,
    pub forward_inclusion: bool,
    pub middle_inclusion: bool,
    pub bottom_inclusion: bool,
}

impl TopologyCheck {
    pub fn holds(&self) -> bool {
        self.ideal_is_augmentation && self.forward_inclusion && self.middle_inclusion && self.bottom_inclusion
    }
}

/// Window check in `Q^{(d)}` with `G` graded by star degree, `I = (x_1, …,
/// x_n) ⊂ G_0` and `J` the two-sided `⋆`-ideal generated by `I`, using
/// `α = max(d, 2)`.
///
/// `I^k G_{≥j}` is the span of monomials with at least `k` letter factors and
/// star degree at least `j`, so every target is a coordinate subspace.
pub fn topology_check(n_gens: u8, d: usize, m: usize) -> Result<TopologyCheck, AlgebraError> {
    if m == 0 {
        return Err(AlgebraError::DegreeOutOfRange { requested: 0, bound: 1 });
    }
    let q = QuantizedAlgebra::new(n_gens, d)?;
    let alpha = d.max(2);
    let power = m * alpha.pow(d as u32);
    let max_weight = power + 1;
    let (window, alg) = q.window_algebra(max_weight);
    let monos = window.basis_monomials();
    let dim = alg.dim();
    let gens = Span::from_vectors(dim, (1..=n_gens).map(|i| window.project(&generator(i))));
    let j = two_sided_ideal(&alg, &gens);
    let positive = Span::from_vectors(
        dim,
        (0..dim).filter(|&i| monos[i].weight() > 0).map(|i| alg.basis_vector(i)),
    );
    let ideal_is_augmentation = j == positive;
    let mut powers = vec![j.clone()];
    while powers.len() < power {
        let next = product_span(&alg, powers.last().expect("nonempty"), &j);
        powers.push(next);
    }
    let in_forward_target = |i: usize| monos[i].letter_count() >= m || monos[i].star_degree() >= m;
    let forward_inclusion = powers[power - 1]
        .basis()
        .iter()
        .all(|v| v.iter().all(|(i, _)| in_forward_target(i)));
    let in_middle = |i: usize| {
        (0..=d).any(|k| monos[i].star_degree() >= k && monos[i].letter_count() >= m * alpha.pow((d - k) as u32))
    };
    let jm = &powers[m - 1];
    let middle_inclusion = (0..dim).filter(|&i| in_middle(i)).all(|i| jm.contains(&alg.basis_vector(i)));
    let bottom_inclusion = (0..dim)
        .filter(|&i| monos[i].lie_factor_count() == 0 && monos[i].letter_count() >= power)
        .all(in_middle);
    Ok(TopologyCheck {
        d,
        m,
        alpha,
        power,
        max_weight,
        ideal_is_augmentation,
        forward_inclusion,
        middle_inclusion,
        bottom_inclusion,
    })
}
