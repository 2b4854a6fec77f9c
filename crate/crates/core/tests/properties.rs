//! Randomized invariants on elements well outside the exhaustive windows.

use hypemb_core::chain::Simplex;
use hypemb_core::cochain::{alternation_at, coboundary_at, Alt, Cochain, CochainSpec, Delta, Domain};
use hypemb_core::group::{FactorElem, GroupElement, GroupModel};
use hypemb_core::rational::{frac, int, root_le_scaled, root_le_sum};
use hypemb_core::{
    Chain, CoefficientKind, ConedSpace, ConedVertex, Coset, Extension, FamilyCochain, NormSq, RelativeMetric,
};
use hypemb_testkit::freered;
use hypemb_testkit::models::{free_ab, z2_t};
use proptest::prelude::*;

use RelativeMetric::{InfinityOffDiagonal as Inf, WordMetric as Word};

/// Random words in ⟨a⟩*⟨b⟩ as (factor, exponent) runs, not yet reduced.
fn raw_free() -> impl Strategy<Value = Vec<(usize, i32)>> {
    prop::collection::vec((0usize..2, -3i32..=3), 0..6)
}

fn build_free(m: &GroupModel, raw: &[(usize, i32)]) -> GroupElement {
    raw.iter().fold(GroupElement::identity(), |acc, &(f, e)| {
        if e == 0 {
            return acc;
        }
        let l = if e < 0 { -1 } else { 1 };
        let s = m.factor_element(f, FactorElem::Word((0..e.unsigned_abs()).map(|_| l).collect()));
        m.mul(&acc, &s)
    })
}

/// Random elements of ℤ² * ⟨t⟩.
fn raw_z2t() -> impl Strategy<Value = Vec<(bool, i64, i64)>> {
    prop::collection::vec((any::<bool>(), -3i64..=3, -3i64..=3), 0..5)
}

fn build_z2t(m: &GroupModel, raw: &[(bool, i64, i64)]) -> GroupElement {
    raw.iter().fold(GroupElement::identity(), |acc, &(is_t, x, y)| {
        let s = if is_t {
            if x == 0 {
                return acc;
            }
            let l = if x < 0 { -1 } else { 1 };
            m.factor_element(1, FactorElem::Word((0..x.unsigned_abs()).map(|_| l).collect()))
        } else {
            m.factor_element(0, FactorElem::Vector([x, y].into_iter().collect()))
        };
        m.mul(&acc, &s)
    })
}

fn el(g: &GroupElement) -> ConedVertex {
    ConedVertex::Element(g.clone())
}

fn spaces() -> [ConedSpace; 4] {
    [free_ab(Inf, 1), free_ab(Word, 1), free_ab(Word, 2), z2_t(Word, 1)]
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 256, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn group_axioms(x in raw_free(), y in raw_free(), z in raw_free()) {
        let s = free_ab(Inf, 1);
        let m = s.model();
        let (x, y, z) = (build_free(m, &x), build_free(m, &y), build_free(m, &z));
        prop_assert_eq!(m.mul(&m.mul(&x, &y), &z), m.mul(&x, &m.mul(&y, &z)));
        prop_assert!(m.mul(&x, &m.inverse(&x)).is_identity());
        prop_assert_eq!(m.mul(&x, &GroupElement::identity()), x.clone());
        prop_assert_eq!(m.left_quotient(&x, &y), m.mul(&m.inverse(&x), &y));
        prop_assert!(m.validate(&m.mul(&x, &y)).is_ok());
    }

    #[test]
    fn products_match_free_reduction(x in raw_free(), y in raw_free()) {
        let s = free_ab(Inf, 1);
        let m = s.model();
        let (x, y) = (build_free(m, &x), build_free(m, &y));
        prop_assert_eq!(m.mul(&x, &y), freered::product(m, &x, &y));
    }

    #[test]
    fn coned_metric(x in raw_z2t(), y in raw_z2t(), z in raw_z2t()) {
        for s in [z2_t(Inf, 1), z2_t(Word, 1)] {
            let m = s.model();
            let (x, y, z) = (build_z2t(m, &x), build_z2t(m, &y), build_z2t(m, &z));
            let d = |a: &GroupElement, b: &GroupElement| s.hat_distance(&el(a), &el(b));
            prop_assert_eq!(d(&x, &y), d(&y, &x));
            prop_assert!(d(&x, &z) <= d(&x, &y) + d(&y, &z));
            prop_assert_eq!(d(&x, &y), frac(m.left_quotient(&x, &y).syllable_length() as i128, 2));
            let g = s.geodesic(&el(&x), &el(&y));
            prop_assert_eq!(g.length, d(&x, &y));
        }
    }

    #[test]
    fn separated_cosets_are_few(x in raw_free(), y in raw_free()) {
        for s in spaces().iter().take(3) {
            let m = s.model();
            let (x, y) = (build_free(m, &x), build_free(m, &y));
            let sep = s.separating_cosets(&x, &y);
            prop_assert!(int(sep.len() as i128) <= int(2) * s.hat_distance(&el(&x), &el(&y)));
        }
    }

    #[test]
    fn projection_is_equivariant(g in raw_free(), x in raw_free(), r in raw_free(), f in 0usize..2) {
        let s = free_ab(Word, 1);
        let m = s.model();
        let (g, x, r) = (build_free(m, &g), build_free(m, &x), build_free(m, &r));
        let b = Coset::of(f, &r);
        let moved = s.project(&b.translate(m, &g), &m.mul(&g, &x));
        prop_assert_eq!(moved, m.mul(&g, &s.project(&b, &x)));
        prop_assert!(b.contains(&s.project(&b, &x)));
    }

    #[test]
    fn far_projection(x in raw_free(), y in raw_free(), r in raw_free(), f in 0usize..2) {
        // projections at relative distance ≥ D put the cone on the geodesic
        for s in spaces().iter().take(3) {
            let m = s.model();
            let (x, y, r) = (build_free(m, &x), build_free(m, &y), build_free(m, &r));
            let b = Coset::of(f, &r);
            let px = s.project(&b, &x);
            let py = s.project(&b, &y);
            if s.relative_distance(&b, &px, &py).unwrap().at_least(s.d()) {
                let g = s.geodesic(&el(&x), &el(&y));
                prop_assert!(g.vertices.contains(&ConedVertex::Cone(b.clone())));
            }
        }
    }

    #[test]
    fn boundary_squares_to_zero(raw in prop::collection::vec(raw_free(), 4), coef in -3i128..=3) {
        let s = free_ab(Inf, 1);
        let m = s.model();
        let pts: Vec<GroupElement> = raw.iter().map(|r| build_free(m, r)).collect();
        let mut c = Chain::simplex(pts.clone());
        let mut rev = pts.clone();
        rev.reverse();
        c.add_term(Simplex(rev), int(coef));
        prop_assert!(c.boundary().unwrap().boundary().unwrap().is_empty());
    }

    #[test]
    fn cochain_identities(raw in prop::collection::vec((-3i64..=3, -3i64..=3), 5)) {
        let s = z2_t(Inf, 1);
        let m = s.model();
        let pts: Vec<GroupElement> = raw
            .iter()
            .map(|&(x, y)| m.factor_element(0, FactorElem::Vector([x, y].into_iter().collect())))
            .collect();
        let cup = CochainSpec::cup(m, 0, vec![int(1), int(2)], vec![int(-1), int(1)]).unwrap();
        let hom = CochainSpec::homomorphism(m, 0, vec![int(3), int(-1)]).unwrap();
        // δ² = 0
        prop_assert!(coboundary_at(&Delta(&hom), m, &pts[..4]).unwrap().is_zero());
        prop_assert!(coboundary_at(&Delta(&cup), m, &pts[..5]).unwrap().is_zero());
        // alt is idempotent and commutes with δ
        let a = Alt(&cup);
        prop_assert_eq!(alternation_at(&a, m, &pts[..3]).unwrap(), a.evaluate_simplex(m, &pts[..3]).unwrap());
        prop_assert_eq!(
            coboundary_at(&Alt(&cup), m, &pts[..4]).unwrap(),
            alternation_at(&Delta(&cup), m, &pts[..4]).unwrap()
        );
        // ⟨δφ, σ⟩ = ⟨φ, ∂σ⟩
        let sigma = Chain::simplex(pts[..4].to_vec());
        prop_assert_eq!(
            Delta(&cup).evaluate(m, &sigma).unwrap(),
            cup.evaluate(m, &sigma.boundary().unwrap()).unwrap()
        );
        // volume is alternating
        let vol = CochainSpec::volume(m, 0).unwrap();
        prop_assert_eq!(Alt(&vol).evaluate_simplex(m, &pts[..3]).unwrap(), vol.evaluate_simplex(m, &pts[..3]).unwrap());
    }

    #[test]
    fn theta_invariance_and_alternation(raw in prop::collection::vec(raw_z2t(), 4), perm in 0usize..6) {
        for s in [z2_t(Inf, 1), z2_t(Word, 1)] {
            let m = s.model();
            let fam = FamilyCochain::one_hot(m, 0, CochainSpec::volume(m, 0).unwrap()).unwrap();
            let th = Extension::new(&s, &fam);
            let pts: Vec<GroupElement> = raw.iter().map(|r| build_z2t(m, r)).collect();
            let (g, t) = (&pts[0], &pts[1..]);
            let moved: Vec<GroupElement> = t.iter().map(|x| m.mul(g, x)).collect();
            prop_assert_eq!(th.evaluate_simplex(m, t).unwrap(), th.evaluate_simplex(m, &moved).unwrap());
            let (p, sign) = &hypemb_core::chain::permutations(3)[perm];
            let permuted: Vec<GroupElement> = p.iter().map(|&i| t[i].clone()).collect();
            let mut expected = th.evaluate_simplex(m, t).unwrap().as_scalar().unwrap();
            expected *= int(*sign as i128);
            prop_assert_eq!(th.evaluate_simplex(m, &permuted).unwrap().as_scalar().unwrap(), expected);
        }
    }

    #[test]
    fn squared_norm_comparisons(obs in 0i64..400, c in 0i64..6, a in 0i64..50, c2 in 0i64..6, a2 in 0i64..50) {
        let (fo, fc, fa, fc2, fa2) = (obs as f64, c as f64, a as f64, c2 as f64, a2 as f64);
        let sc = root_le_scaled(NormSq(int(obs as i128)), int(c as i128), NormSq(int(a as i128)));
        // skip float ties
        let lhs = fo.sqrt();
        let rhs = fc * fa.sqrt();
        if (lhs - rhs).abs() > 1e-9 {
            prop_assert_eq!(sc, lhs <= rhs);
        }
        let sum = root_le_sum(NormSq(int(obs as i128)), int(c as i128), NormSq(int(a as i128)), int(c2 as i128), NormSq(int(a2 as i128)));
        let rhs = fc * fa.sqrt() + fc2 * fa2.sqrt();
        if (lhs - rhs).abs() > 1e-9 {
            prop_assert_eq!(sum, lhs <= rhs);
        }
    }
}

#[test]
fn zero_family_entries_are_zero() {
    let s = z2_t(Inf, 1);
    let m = s.model();
    let z = CochainSpec::zero(2, CoefficientKind::Scalar, Domain::Factor(1));
    let t = [GroupElement::identity(), m.factor_element(1, FactorElem::Word([1].into_iter().collect())), GroupElement::identity()];
    assert!(z.evaluate_simplex(m, &t).unwrap().is_zero());
}
