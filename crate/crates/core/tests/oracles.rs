//! Library values against independent oracles from hypemb-testkit. The
//! oracles build the relevant finite objects explicitly (balls of the
//! coned-off graph, Leibniz determinants, BFS path enumeration, letter by
//! letter reduction) and share no code with the library beyond the types.

use std::collections::BTreeSet;

use hypemb_core::cochain::{Cochain, CochainSpec};
use hypemb_core::group::{FactorElem, FactorSpec, GroupElement, GroupModel, RelativeGenerators, Window};
use hypemb_core::rational::{frac, int};
use hypemb_core::reconstruction::{c_h, probe_simplex, probes, psi, recover_projection_general};
use hypemb_core::{
    Chain, ConedSpace, ConedVertex, Coset, Extension, FamilyCochain, ModuleVector, Rational, RelativeMetric,
};
use hypemb_testkit::cayley;
use hypemb_testkit::coned_ball::ConedBall;
use hypemb_testkit::det::simplex_volume;
use hypemb_testkit::freered;
use hypemb_testkit::models::{free_ab, point, window, word, z2_t};
use hypemb_testkit::orbit::volume_k_plane;

use RelativeMetric::{InfinityOffDiagonal as Inf, WordMetric as Word};

fn el(g: &GroupElement) -> ConedVertex {
    ConedVertex::Element(g.clone())
}

fn cone(b: &Coset) -> ConedVertex {
    ConedVertex::Cone(b.clone())
}

fn quarters(q: u64) -> Rational {
    frac(q as i128, 4)
}

#[test]
fn free_reduction_merges_outer_syllables() {
    let s = free_ab(Inf, 1);
    let m = s.model();
    let x = word(m, &[(0, 1), (1, 1)]);
    let y = word(m, &[(1, -1), (0, 2)]);
    let expected = word(m, &[(0, 3)]);
    assert_eq!(freered::product(m, &x, &y), expected);
    assert_eq!(m.mul(&x, &y), expected);
}

#[test]
fn products_match_letter_reduction_on_a_ball() {
    let s = free_ab(Inf, 1);
    let m = s.model();
    let ball = m.enumerate_ball(&window(2, &[2, 2])).unwrap();
    for x in &ball {
        for y in &ball {
            assert_eq!(m.mul(x, y), freered::product(m, x, y));
        }
    }
}

#[test]
fn ball_counts() {
    let s = free_ab(Inf, 1);
    assert_eq!(s.model().enumerate_ball(&window(1, &[2, 2])).unwrap().len(), 9);

    // ℤ/2 * ℤ/2: closure of generator words of length ≤ 3
    let m = GroupModel::new(
        vec![FactorSpec::cyclic(2, "u".into()).unwrap(), FactorSpec::cyclic(2, "v".into()).unwrap()],
        RelativeGenerators::None,
    )
    .unwrap();
    let gens = [m.factor_element(0, FactorElem::Residue(1)), m.factor_element(1, FactorElem::Residue(1))];
    let mut reached: BTreeSet<GroupElement> = BTreeSet::from([GroupElement::identity()]);
    let mut frontier = reached.clone();
    for _ in 0..3 {
        let next: BTreeSet<GroupElement> = frontier.iter().flat_map(|g| gens.iter().map(|s| m.mul(g, s))).collect();
        reached.extend(next.iter().cloned());
        frontier = next;
    }
    assert_eq!(reached.len(), 7);
    let ball = m.enumerate_ball(&Window::new(3, vec![None, None])).unwrap();
    assert_eq!(ball.into_iter().collect::<BTreeSet<_>>(), reached);
}

#[test]
fn cyclic_word_length_matches_bfs() {
    let f = FactorSpec::cyclic(5, "g".into()).unwrap();
    // BFS on the 5-cycle from 0
    let mut dist = [u64::MAX; 5];
    dist[0] = 0;
    let mut queue = std::collections::VecDeque::from([0u64]);
    while let Some(v) = queue.pop_front() {
        for w in [(v + 1) % 5, (v + 4) % 5] {
            if dist[w as usize] == u64::MAX {
                dist[w as usize] = dist[v as usize] + 1;
                queue.push_back(w);
            }
        }
    }
    assert_eq!(dist[3], 2);
    for r in 0..5u64 {
        assert_eq!(f.word_length(&FactorElem::Residue(r)), dist[r as usize]);
    }
}

#[test]
fn hat_distance_examples() {
    for metric in [Inf, Word] {
        let s = free_ab(metric, 1);
        let m = s.model();
        let g = word(m, &[(0, 2), (1, -1), (0, 1)]);
        let a = Coset::subgroup(0);
        let ab_a = Coset::of(0, &word(m, &[(0, 1), (1, 1)]));
        let ball = m.enumerate_ball(&window(3, &[2, 2])).unwrap();
        let oracle = ConedBall::build(&s, &ball);
        let from_one = oracle.dijkstra(oracle.index_of(&el(&GroupElement::identity())).unwrap());
        assert_eq!(quarters(from_one.dist[oracle.index_of(&el(&g)).unwrap()]), frac(3, 2));
        assert_eq!(s.hat_distance(&el(&GroupElement::identity()), &el(&g)), frac(3, 2));
        let from_cone = oracle.dijkstra(oracle.index_of(&cone(&a)).unwrap());
        assert_eq!(quarters(from_cone.dist[oracle.index_of(&cone(&ab_a)).unwrap()]), int(1));
        assert_eq!(s.hat_distance(&cone(&a), &cone(&ab_a)), int(1));
    }
}

/// Every vertex pair of a materialized ball: distances and geodesics.
fn check_against_ball(s: &ConedSpace, sources: &[GroupElement], ball: &[GroupElement]) {
    let oracle = ConedBall::build(s, ball);
    let mut sources: Vec<ConedVertex> = sources.iter().map(el).collect();
    sources.extend(sources.clone().iter().filter_map(|v| match v {
        ConedVertex::Element(g) => Some(cone(&Coset::of(0, g))),
        _ => None,
    }));
    for u in &sources {
        let search = oracle.dijkstra(oracle.index_of(u).unwrap());
        for (j, v) in oracle.vertices.iter().enumerate() {
            assert_eq!(s.hat_distance(u, v), quarters(search.dist[j]), "{u:?} {v:?}");
            let mut paths = oracle.paths(&search, j);
            paths.sort();
            let mut ours: Vec<Vec<ConedVertex>> = s.geodesics(u, v).into_iter().map(|g| g.vertices).collect();
            ours.sort();
            assert_eq!(ours, paths, "{u:?} {v:?}");
        }
    }
}

#[test]
fn distances_and_geodesics_match_dijkstra() {
    for metric in [Inf, Word] {
        let s = free_ab(metric, 1);
        let m = s.model();
        let ball = m.enumerate_ball(&window(3, &[2, 2])).unwrap();
        let sources = m.enumerate_ball(&window(1, &[2, 2])).unwrap();
        check_against_ball(&s, &sources, &ball);
        let s = z2_t(metric, 1);
        let m = s.model();
        let ball = m.enumerate_ball(&window(2, &[1, 1])).unwrap();
        let sources = m.enumerate_ball(&window(1, &[1, 1])).unwrap();
        check_against_ball(&s, &sources, &ball);
    }
}

#[test]
fn geodesic_examples() {
    let s = free_ab(Inf, 1);
    let m = s.model();
    let one = GroupElement::identity();
    let a = word(m, &[(0, 1)]);
    let ab = word(m, &[(0, 1), (1, 1)]);
    let g = s.geodesics(&el(&one), &el(&ab));
    assert_eq!(g.len(), 1);
    assert_eq!(g[0].vertices, vec![el(&one), cone(&Coset::subgroup(0)), el(&a), cone(&Coset::of(1, &a)), el(&ab)]);
    assert_eq!(g[0].length, int(1));
    let a5 = word(m, &[(0, 5)]);
    let g = s.geodesics(&el(&one), &el(&a5));
    assert_eq!(g.len(), 1);
    assert_eq!(g[0].vertices, vec![el(&one), cone(&Coset::subgroup(0)), el(&a5)]);
    assert_eq!(g[0].length, frac(1, 2));
}

#[test]
fn projections_and_gates_match_dijkstra() {
    for metric in [Inf, Word] {
        let s = free_ab(metric, 1);
        let m = s.model();
        let one = GroupElement::identity();
        let abab = word(m, &[(0, 1), (1, 1), (0, 1), (1, 1)]);
        let ab = word(m, &[(0, 1), (1, 1)]);
        assert_eq!(s.projection(&Coset::subgroup(0), &el(&abab)).unwrap(), vec![word(m, &[(0, 1)])]);
        assert_eq!(s.projection(&Coset::of(0, &ab), &el(&one)).unwrap(), vec![ab.clone()]);
        assert_eq!(s.coset_gate(&Coset::subgroup(0), &Coset::subgroup(1)).unwrap(), vec![one.clone()]);
        assert_eq!(s.coset_gate(&Coset::subgroup(0), &Coset::of(0, &ab)).unwrap(), vec![word(m, &[(0, 1)])]);

        let ball = m.enumerate_ball(&window(4, &[2, 2])).unwrap();
        let oracle = ConedBall::build(&s, &ball);
        let inner = m.enumerate_ball(&window(2, &[2, 2])).unwrap();
        let cosets: BTreeSet<Coset> = inner.iter().flat_map(|g| [Coset::of(0, g), Coset::of(1, g)]).collect();
        for b in &cosets {
            for x in &inner {
                assert_eq!(s.projection(b, &el(x)).unwrap(), oracle.projection(b, &el(x)), "{b:?} {x:?}");
            }
            for other in cosets.iter().filter(|c| *c != b) {
                assert_eq!(s.coset_gate(b, other).unwrap(), oracle.projection(b, &cone(other)), "{b:?} {other:?}");
            }
        }
    }
}

#[test]
fn separating_cosets_example() {
    let s = free_ab(Inf, 1);
    let m = s.model();
    let one = GroupElement::identity();
    let abab = word(m, &[(0, 1), (1, 1), (0, 1), (1, 1)]);
    let expected = vec![
        Coset::subgroup(0),
        Coset::of(1, &word(m, &[(0, 1)])),
        Coset::of(0, &word(m, &[(0, 1), (1, 1)])),
        Coset::of(1, &word(m, &[(0, 1), (1, 1), (0, 1)])),
    ];
    // oracle: cones on the Dijkstra geodesic whose projections of the ends differ
    let ball = m.enumerate_ball(&window(4, &[1, 1])).unwrap();
    let oracle = ConedBall::build(&s, &ball);
    let search = oracle.dijkstra(oracle.index_of(&el(&one)).unwrap());
    let paths = oracle.paths(&search, oracle.index_of(&el(&abab)).unwrap());
    assert_eq!(paths.len(), 1);
    let found: Vec<Coset> = paths[0]
        .iter()
        .filter_map(|v| match v {
            ConedVertex::Cone(b) if oracle.projection(b, &el(&one)) != oracle.projection(b, &el(&abab)) => Some(b.clone()),
            _ => None,
        })
        .collect();
    assert_eq!(found, expected);
    assert_eq!(s.separating_cosets(&one, &abab), expected);
    let relevant: Vec<Coset> = s.relevant_cosets(&[one, abab]).into_iter().collect();
    let mut sorted = expected.clone();
    sorted.sort();
    assert_eq!(relevant, sorted);
}

#[test]
fn trace_example() {
    let s = free_ab(Inf, 1);
    let m = s.model();
    let ab = word(m, &[(0, 1), (1, 1)]);
    let aba = word(m, &[(0, 1), (1, 1), (0, 1)]);
    let abab = word(m, &[(0, 1), (1, 1), (0, 1), (1, 1)]);
    let b = Coset::of(0, &ab);
    let t = [GroupElement::identity(), abab, ab.clone()];
    let tr = s.trace(&t, &b);
    assert_eq!(tr, Chain::simplex(vec![ab.clone(), aba, ab]));
    assert!(tr.is_degenerate());
}

#[test]
fn volume_matches_leibniz() {
    let s = z2_t(Inf, 1);
    let m = s.model();
    let vol = CochainSpec::volume(m, 0).unwrap();
    let pts = [vec![0, 0], vec![3, 0], vec![0, 4]];
    assert_eq!(simplex_volume(&pts), int(6));
    let t: Vec<GroupElement> = pts.iter().map(|p| point(m, 0, p)).collect();
    assert_eq!(vol.evaluate_simplex(m, &t).unwrap(), ModuleVector::Scalar(int(6)));
    let coords: Vec<Vec<i64>> = (-2..=2).flat_map(|x| (-2..=2).map(move |y| vec![x, y])).collect();
    for p in &coords {
        for q in &coords {
            let pts = [vec![1, -1], p.clone(), q.clone()];
            let t: Vec<GroupElement> = pts.iter().map(|c| point(m, 0, c)).collect();
            assert_eq!(vol.evaluate_simplex(m, &t).unwrap(), ModuleVector::Scalar(simplex_volume(&pts)));
        }
    }
}

#[test]
fn cup_example() {
    let s = z2_t(Inf, 1);
    let m = s.model();
    let cup = CochainSpec::cup(m, 0, vec![int(1), int(0)], vec![int(0), int(1)]).unwrap();
    let t = [point(m, 0, &[3, 0]), GroupElement::identity(), point(m, 0, &[0, 3])];
    assert_eq!(cup.evaluate_simplex(m, &t).unwrap(), ModuleVector::Scalar(int(-9)));
}

#[test]
fn small_in_word_mode_with_d2() {
    let s = z2_t(Word, 2);
    let m = s.model();
    let t: Vec<GroupElement> = [[0, 0], [1, 0], [0, 1]].iter().map(|p| point(m, 0, p)).collect();
    assert!(s.is_small(&t));
}

fn volume_family(s: &ConedSpace) -> FamilyCochain {
    let m = s.model();
    FamilyCochain::one_hot(m, 0, CochainSpec::volume(m, 0).unwrap()).unwrap()
}

#[test]
fn k_matches_orbit_enumeration() {
    for d in [1u64, 2] {
        let s = z2_t(Word, d);
        let fam = volume_family(&s);
        let trunc = 2 * d;
        let (k, _) = s.k_of(&fam, &window(1, &[trunc, 1])).unwrap();
        let oracle = volume_k_plane(trunc as i64 + 1, d);
        assert_eq!(k.value(), oracle * oracle, "D = {d}");
    }
    // frozen
    let s = z2_t(Word, 1);
    assert!(s.k_of(&volume_family(&s), &window(1, &[1, 1])).unwrap().0.is_zero());
    let s = z2_t(Word, 2);
    assert_eq!(s.k_of(&volume_family(&s), &window(1, &[3, 1])).unwrap().0.value(), int(4));
}

#[test]
fn theta_examples() {
    let s = z2_t(Inf, 1);
    let m = s.model();
    let fam = volume_family(&s);
    let th = Extension::new(&s, &fam);
    let pts = [vec![0, 0], vec![3, 0], vec![0, 4]];
    let t: Vec<GroupElement> = pts.iter().map(|p| point(m, 0, p)).collect();
    assert_eq!(th.evaluate_simplex(m, &t).unwrap(), ModuleVector::Scalar(simplex_volume(&pts)));
    let tt = word(m, &[(1, 1)]);
    let t = [tt, point(m, 0, &[1, 0]), point(m, 0, &[0, 1])];
    let traced = [vec![0, 0], vec![1, 0], vec![0, 1]];
    assert_eq!(th.evaluate_simplex(m, &t).unwrap(), ModuleVector::Scalar(simplex_volume(&traced)));
    assert_eq!(simplex_volume(&traced), frac(1, 2));
}

#[test]
fn c_h_free_example() {
    let s = free_ab(Inf, 1);
    let m = s.model();
    let e = FactorElem::Word(Default::default());
    let a3 = FactorElem::Word([1, 1, 1].into_iter().collect());
    let f = c_h(m, 0, &e, &a3).unwrap();
    let mut forward = 0;
    for (edge, w) in f.iter() {
        if edge.inverse {
            assert_eq!(*w, frac(-3, 2));
        } else {
            assert_eq!(*w, frac(3, 2));
            forward += 1;
        }
    }
    assert_eq!(forward, 3);
    assert_eq!(f.len(), 6);
}

#[test]
fn c_h_matches_path_enumeration() {
    let s = z2_t(Inf, 1);
    let m = s.model();
    let vec2 = |x: i64, y: i64| FactorElem::Vector([x, y].into_iter().collect());
    let box3: Vec<FactorElem> = (-3..=3).flat_map(|x| (-3..=3).map(move |y| vec2(x, y))).collect();
    let diag = c_h(m, 0, &vec2(0, 0), &vec2(1, 1)).unwrap();
    assert_eq!(diag.len(), 8);
    for (e, w) in diag.iter() {
        assert!(*w == frac(1, 2) || *w == frac(-1, 2), "{e:?}");
    }
    let l0 = vec2(-1, 1);
    for x in -2..=2 {
        for y in -2..=2 {
            let l1 = vec2(x, y);
            assert_eq!(c_h(m, 0, &l0, &l1).unwrap(), cayley::flow(m, 0, &box3, &l0, &l1), "{l1:?}");
        }
    }
    let t = FactorSpec::free(1, vec!["t".into()]).unwrap();
    let words: Vec<FactorElem> = t.window(Some(4)).unwrap().into_iter().chain([t.identity()]).collect();
    for l1 in t.window(Some(3)).unwrap() {
        let l0 = t.identity();
        assert_eq!(c_h(m, 1, &l0, &l1).unwrap(), cayley::flow(m, 1, &words, &l0, &l1));
    }
}

#[test]
fn psi_of_c_h() {
    let s = z2_t(Inf, 1);
    let m = s.model();
    let vec2 = |x: i64, y: i64| FactorElem::Vector([x, y].into_iter().collect());
    let (l0, l1) = (vec2(0, 0), vec2(2, -1));
    let f = c_h(m, 0, &l0, &l1).unwrap();
    let p = psi(m, &f);
    let d = int(3);
    for (v, value) in &p {
        let coords = m.in_factor(v, 0).unwrap();
        if coords == l0 {
            assert_eq!(*value, -d);
        } else if coords == l1 {
            assert_eq!(*value, d);
        } else {
            assert_eq!(*value, int(0), "{v:?}");
        }
    }
}

#[test]
fn general_recovery_example() {
    let s = free_ab(Inf, 1);
    let m = s.model();
    let y = word(m, &[(0, 3), (1, 1), (0, 1)]);
    let b = Coset::subgroup(0);
    let n = hypemb_core::reconstruction::minimal_admissible_n(&s, &b, &y).unwrap();
    let r = recover_projection_general(&s, &b, &y, n).unwrap();
    assert_eq!(r.support, vec![word(m, &[(0, 3)])]);
    let ball = m.enumerate_ball(&window(3, &[3, 3])).unwrap();
    let oracle = ConedBall::build(&s, &ball);
    assert_eq!(r.support, oracle.projection(&b, &el(&y)));
}

#[test]
fn probe_volume_example() {
    let s = z2_t(Inf, 1);
    let m = s.model();
    let ys = probes(&s, 0, 4).unwrap();
    let z = point(m, 0, &[7, 5]);
    let simplex = probe_simplex(&ys, 1, &z);
    let coords: Vec<Vec<i64>> = simplex
        .iter()
        .map(|g| match m.in_factor(g, 0).unwrap() {
            FactorElem::Vector(v) => v.to_vec(),
            _ => unreachable!(),
        })
        .collect();
    assert_eq!(coords, vec![vec![4, 0], vec![7, 5], vec![4, 4]]);
    let vol = CochainSpec::volume(m, 0).unwrap();
    assert_eq!(vol.evaluate_simplex(m, &simplex).unwrap(), ModuleVector::Scalar(simplex_volume(&coords)));
    assert_eq!(simplex_volume(&coords), int(6));
}

#[test]
fn bbf_pairwise_example() {
    let s = free_ab(Word, 1);
    let m = s.model();
    let a = Coset::subgroup(0);
    let d = hypemb_core::bbf::pairwise_distance(&s, &a, &Coset::subgroup(1), &Coset::of(1, &word(m, &[(0, 3)]))).unwrap();
    assert_eq!(d, int(3));
}
