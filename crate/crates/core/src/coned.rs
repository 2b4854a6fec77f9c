//! The coned-off graph Ĝ: one cone vertex per coset of a factor, joined to
//! every element of the coset by an edge of length 1/4.
//!
//! For a free product Ĝ is a tree once the X-edges are ignored, and X-edges
//! (length 1) never beat the length-1/2 detour through a cone. Everything
//! below is therefore read off normal forms: the geodesic from `g` to `h`
//! walks the syllables of `g⁻¹h`, visiting one cone per syllable.

use alloc::collections::BTreeSet;
use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::group::{FactorElem, GroupElement, GroupModel, RelativeGenerators};
use crate::rational::{frac, int, Dist, Rational};
use crate::{Error, Result};

/// How the relative metric d_λ on each factor is measured.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RelativeMetric {
    /// 0 on the diagonal, +∞ elsewhere (no relative generators).
    InfinityOffDiagonal,
    /// Word metric of the factor generators.
    WordMetric,
}

/// A left coset `rep · H_factor`, with `rep` canonical: no trailing syllable
/// in `factor`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Coset {
    pub factor: usize,
    pub rep: GroupElement,
}

impl Coset {
    /// The coset `g · H_factor`.
    pub fn of(factor: usize, g: &GroupElement) -> Coset {
        Coset { factor, rep: g.strip_trailing(factor) }
    }

    /// The factor subgroup itself.
    pub fn subgroup(factor: usize) -> Coset {
        Coset { factor, rep: GroupElement::identity() }
    }

    pub fn contains(&self, g: &GroupElement) -> bool {
        let s = g.syllables();
        let r = self.rep.syllables();
        match s.len().checked_sub(r.len()) {
            Some(0) => s == r,
            Some(1) => s[..r.len()] == *r && s[r.len()].factor == self.factor,
            _ => false,
        }
    }

    /// `g · self`.
    pub fn translate(&self, model: &GroupModel, g: &GroupElement) -> Coset {
        Coset::of(self.factor, &model.mul(g, &self.rep))
    }

    /// The factor element `rep⁻¹ g` for a member `g`.
    pub fn coordinate(&self, model: &GroupModel, g: &GroupElement) -> Result<FactorElem> {
        if !self.contains(g) {
            return Err(Error::NotInCoset);
        }
        Ok(match g.syllables().get(self.rep.syllable_length()) {
            Some(s) => s.value.clone(),
            None => model.factor(self.factor).identity(),
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ConedVertex {
    Element(GroupElement),
    Cone(Coset),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Geodesic {
    pub vertices: Vec<ConedVertex>,
    pub length: Rational,
}

impl Geodesic {
    fn from_vertices(vertices: Vec<ConedVertex>) -> Self {
        let length = frac(vertices.len() as i128 - 1, 4);
        Geodesic { vertices, length }
    }

    /// Cone vertices strictly inside the path, with their entry and exit points.
    pub fn interior_cones(&self) -> Vec<(&Coset, &GroupElement, &GroupElement)> {
        let mut out = Vec::new();
        for w in self.vertices.windows(3) {
            if let [ConedVertex::Element(a), ConedVertex::Cone(b), ConedVertex::Element(c)] = w {
                out.push((b, a, c));
            }
        }
        out
    }
}

/// A separating coset together with the projections of the two endpoints.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Crossing {
    pub coset: Coset,
    pub entry: GroupElement,
    pub exit: GroupElement,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConedSpace {
    model: GroupModel,
    separation: u64,
    metric: RelativeMetric,
}

impl ConedSpace {
    pub fn new(model: GroupModel, separation: u64, metric: RelativeMetric) -> Result<Self> {
        if separation == 0 {
            return Err(Error::InvalidSpace("separation constant D must be positive".into()));
        }
        match (metric, model.relative_generators()) {
            (RelativeMetric::InfinityOffDiagonal, RelativeGenerators::None)
            | (RelativeMetric::WordMetric, RelativeGenerators::FactorGenerators) => {}
            (m, g) => {
                return Err(Error::InvalidSpace(format!(
                    "relative metric {m:?} is incompatible with relative generators {g:?}"
                )))
            }
        }
        Ok(ConedSpace { model, separation, metric })
    }

    pub fn model(&self) -> &GroupModel {
        &self.model
    }

    pub fn separation(&self) -> u64 {
        self.separation
    }

    pub fn metric(&self) -> RelativeMetric {
        self.metric
    }

    /// The thresholds D and 2D as distances.
    pub fn d(&self) -> Rational {
        int(self.separation as i128)
    }

    pub fn two_d(&self) -> Rational {
        int(2 * self.separation as i128)
    }

    /// d_λ(1, h) for a factor element `h`.
    pub fn factor_distance(&self, factor: usize, h: &FactorElem) -> Dist {
        let f = self.model.factor(factor);
        if f.is_identity(h) {
            return Dist::ZERO;
        }
        match self.metric {
            RelativeMetric::InfinityOffDiagonal => Dist::Infinite,
            RelativeMetric::WordMetric => Dist::Finite(int(f.word_length(h) as i128)),
        }
    }

    /// d_B(p, q) for two members of `B`.
    pub fn relative_distance(&self, b: &Coset, p: &GroupElement, q: &GroupElement) -> Result<Dist> {
        let x = b.coordinate(&self.model, p)?;
        let y = b.coordinate(&self.model, q)?;
        let f = self.model.factor(b.factor);
        Ok(self.factor_distance(b.factor, &f.mul(&f.inv(&x), &y)))
    }

    /// diam_B of a set of members of `B` (0 for the empty set).
    pub fn diam(&self, b: &Coset, points: &[GroupElement]) -> Result<Dist> {
        let coords = points.iter().map(|p| b.coordinate(&self.model, p)).collect::<Result<Vec<_>>>()?;
        Ok(self.diam_of_coordinates(b.factor, &coords))
    }

    fn diam_of_coordinates(&self, factor: usize, coords: &[FactorElem]) -> Dist {
        let f = self.model.factor(factor);
        let mut best = Dist::ZERO;
        for (i, x) in coords.iter().enumerate() {
            let xi = f.inv(x);
            for y in &coords[i + 1..] {
                best = best.max(self.factor_distance(factor, &f.mul(&xi, y)));
                if best.is_infinite() {
                    return best;
                }
            }
        }
        best
    }

    /// The unique point of `B` nearest to the element `x`.
    pub fn project(&self, b: &Coset, x: &GroupElement) -> GroupElement {
        let u = self.model.left_quotient(&b.rep, x);
        match u.first() {
            Some(s) if s.factor == b.factor => self.model.mul(&b.rep, &self.model.factor_element(s.factor, s.value.clone())),
            _ => b.rep.clone(),
        }
    }

    /// The point of `B` through which every geodesic from `c(B′)` enters `B`.
    fn gate_point(&self, b: &Coset, other: &Coset) -> GroupElement {
        let w = self.model.left_quotient(&b.rep, &other.rep).strip_trailing(other.factor);
        match w.first() {
            Some(s) if s.factor == b.factor => self.model.mul(&b.rep, &self.model.factor_element(s.factor, s.value.clone())),
            _ => b.rep.clone(),
        }
    }

    /// π_B(x). The projection of the cone `c(B)` onto `B` is all of `B` and
    /// is rejected.
    pub fn projection(&self, b: &Coset, x: &ConedVertex) -> Result<Vec<GroupElement>> {
        match x {
            ConedVertex::Element(g) => Ok(vec![self.project(b, g)]),
            ConedVertex::Cone(c) if c == b => Err(Error::InfiniteProjection),
            ConedVertex::Cone(c) => Ok(vec![self.gate_point(b, c)]),
        }
    }

    /// π_B(B′), computed through the cone point of `B′`.
    pub fn coset_gate(&self, b: &Coset, other: &Coset) -> Result<Vec<GroupElement>> {
        if b == other {
            return Err(Error::IdenticalCosets);
        }
        Ok(vec![self.gate_point(b, other)])
    }

    pub fn hat_distance(&self, u: &ConedVertex, v: &ConedVertex) -> Rational {
        let half = |g: &GroupElement, h: &GroupElement| frac(self.model.left_quotient(g, h).syllable_length() as i128, 2);
        let quarter = frac(1, 4);
        match (u, v) {
            (ConedVertex::Element(g), ConedVertex::Element(h)) => half(g, h),
            (ConedVertex::Cone(b), ConedVertex::Element(x)) | (ConedVertex::Element(x), ConedVertex::Cone(b)) => {
                quarter + half(&self.project(b, x), x)
            }
            (ConedVertex::Cone(b), ConedVertex::Cone(c)) if b == c => int(0),
            (ConedVertex::Cone(b), ConedVertex::Cone(c)) => {
                quarter + quarter + half(&self.gate_point(b, c), &self.gate_point(c, b))
            }
        }
    }

    fn element_path(&self, g: &GroupElement, h: &GroupElement, out: &mut Vec<ConedVertex>) {
        let w = self.model.left_quotient(g, h);
        let mut at = g.clone();
        out.push(ConedVertex::Element(at.clone()));
        for s in w.syllables() {
            out.push(ConedVertex::Cone(Coset::of(s.factor, &at)));
            at = self.model.mul(&at, &self.model.factor_element(s.factor, s.value.clone()));
            out.push(ConedVertex::Element(at.clone()));
        }
    }

    /// The geodesic from `u` to `v`. Ĝ is a tree on the built-in models, so
    /// it is unique.
    pub fn geodesic(&self, u: &ConedVertex, v: &ConedVertex) -> Geodesic {
        let mut vertices = Vec::new();
        match (u, v) {
            (ConedVertex::Element(g), ConedVertex::Element(h)) => self.element_path(g, h, &mut vertices),
            (ConedVertex::Cone(b), ConedVertex::Element(x)) => {
                vertices.push(u.clone());
                self.element_path(&self.project(b, x), x, &mut vertices);
            }
            (ConedVertex::Element(_), ConedVertex::Cone(_)) => {
                let mut back = self.geodesic(v, u);
                back.vertices.reverse();
                return back;
            }
            (ConedVertex::Cone(b), ConedVertex::Cone(c)) if b == c => vertices.push(u.clone()),
            (ConedVertex::Cone(b), ConedVertex::Cone(c)) => {
                vertices.push(u.clone());
                self.element_path(&self.gate_point(b, c), &self.gate_point(c, b), &mut vertices);
                vertices.push(v.clone());
            }
        }
        Geodesic::from_vertices(vertices)
    }

    /// All geodesics from `u` to `v`.
    pub fn geodesics(&self, u: &ConedVertex, v: &ConedVertex) -> Vec<Geodesic> {
        vec![self.geodesic(u, v)]
    }

    /// The cones on the geodesic from `v0` to `v1`, each with its entry and
    /// exit point, in order along the geodesic.
    pub fn crossings(&self, v0: &GroupElement, v1: &GroupElement) -> Vec<Crossing> {
        let w = self.model.left_quotient(v0, v1);
        let mut at = v0.clone();
        let mut out = Vec::with_capacity(w.syllable_length());
        for s in w.syllables() {
            let coset = Coset::of(s.factor, &at);
            let next = self.model.mul(&at, &self.model.factor_element(s.factor, s.value.clone()));
            out.push(Crossing { coset, entry: at, exit: next.clone() });
            at = next;
        }
        out
    }

    /// 𝓢(v0, v1): cosets on which `v0` and `v1` project at relative distance
    /// at least D, ordered by distance from `v0`.
    pub fn separating_crossings(&self, v0: &GroupElement, v1: &GroupElement) -> Vec<Crossing> {
        let w = self.model.left_quotient(v0, v1);
        let d = self.d();
        self.crossings(v0, v1)
            .into_iter()
            .zip(w.syllables())
            .filter(|(_, s)| self.factor_distance(s.factor, &s.value).at_least(d))
            .map(|(c, _)| c)
            .collect()
    }

    pub fn separating_cosets(&self, v0: &GroupElement, v1: &GroupElement) -> Vec<Coset> {
        self.separating_crossings(v0, v1).into_iter().map(|c| c.coset).collect()
    }

    /// diam_B(π_B(ḡ)).
    pub fn projection_diam(&self, b: &Coset, tuple: &[GroupElement]) -> Dist {
        let coords: Vec<FactorElem> = tuple
            .iter()
            .map(|g| b.coordinate(&self.model, &self.project(b, g)).expect("projection lies in the coset"))
            .collect();
        self.diam_of_coordinates(b.factor, &coords)
    }

    /// 𝓡(ḡ): cosets on which the projections of ḡ have diameter at least 2D.
    pub fn relevant_cosets(&self, tuple: &[GroupElement]) -> BTreeSet<Coset> {
        self.relevant_projections(tuple).into_iter().map(|(b, _)| b).collect()
    }

    /// 𝓡(ḡ) in coset order, each coset with the projections of ḡ onto it.
    pub fn relevant_projections(&self, tuple: &[GroupElement]) -> Vec<(Coset, Vec<GroupElement>)> {
        let mut candidates = BTreeSet::new();
        for (i, a) in tuple.iter().enumerate() {
            for b in &tuple[i + 1..] {
                candidates.extend(self.separating_cosets(a, b));
            }
        }
        let two_d = self.two_d();
        candidates
            .into_iter()
            .filter_map(|b| {
                let points: Vec<GroupElement> = tuple.iter().map(|g| self.project(&b, g)).collect();
                let coords: Vec<FactorElem> =
                    points.iter().map(|p| b.coordinate(&self.model, p).expect("projection lies in the coset")).collect();
                self.diam_of_coordinates(b.factor, &coords).at_least(two_d).then_some((b, points))
            })
            .collect()
    }

    /// Whether ḡ lies in a single coset with relative diameter below 2D.
    pub fn is_small(&self, tuple: &[GroupElement]) -> bool {
        self.supporting_coset(tuple).is_some()
    }

    /// A coset witnessing smallness of ḡ; `None` if ḡ is not small. For a
    /// constant tuple any coset through the vertex works and the first
    /// factor is reported.
    pub fn supporting_coset(&self, tuple: &[GroupElement]) -> Option<Coset> {
        let first = tuple.first()?;
        let other = match tuple.iter().find(|g| *g != first) {
            Some(g) => g,
            None => return Some(Coset::of(0, first)),
        };
        if self.metric == RelativeMetric::InfinityOffDiagonal {
            return None;
        }
        let q = self.model.left_quotient(first, other);
        if q.syllable_length() != 1 {
            return None;
        }
        let b = Coset::of(q.syllables()[0].factor, first);
        let coords = tuple.iter().map(|g| b.coordinate(&self.model, g).ok()).collect::<Option<Vec<_>>>()?;
        let diam = self.diam_of_coordinates(b.factor, &coords);
        (!diam.at_least(self.two_d())).then_some(b)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::{FactorSpec, Syllable};
    use alloc::string::ToString;
    use smallvec::SmallVec;

    pub(crate) fn fab(generators: RelativeGenerators) -> GroupModel {
        GroupModel::new(
            vec![FactorSpec::free(1, vec!["a".to_string()]).unwrap(), FactorSpec::free(1, vec!["b".to_string()]).unwrap()],
            generators,
        )
        .unwrap()
    }

    fn word(m: &GroupModel, powers: &[(usize, i32)]) -> GroupElement {
        let syl = powers
            .iter()
            .map(|&(f, e)| {
                let l = if e < 0 { -1 } else { 1 };
                Syllable { factor: f, value: FactorElem::Word((0..e.unsigned_abs()).map(|_| l).collect::<SmallVec<_>>()) }
            })
            .collect();
        m.from_syllables(syl).unwrap()
    }

    fn space() -> (ConedSpace, GroupModel) {
        let m = fab(RelativeGenerators::None);
        (ConedSpace::new(m.clone(), 1, RelativeMetric::InfinityOffDiagonal).unwrap(), m)
    }

    #[test]
    fn mode_must_match_generators() {
        assert!(ConedSpace::new(fab(RelativeGenerators::None), 1, RelativeMetric::WordMetric).is_err());
        assert!(ConedSpace::new(fab(RelativeGenerators::FactorGenerators), 1, RelativeMetric::InfinityOffDiagonal).is_err());
        assert!(ConedSpace::new(fab(RelativeGenerators::None), 0, RelativeMetric::InfinityOffDiagonal).is_err());
    }

    #[test]
    fn projections_and_gates() {
        let (s, m) = space();
        let abab = word(&m, &[(0, 1), (1, 1), (0, 1), (1, 1)]);
        let a = word(&m, &[(0, 1)]);
        let ab = word(&m, &[(0, 1), (1, 1)]);
        let one = GroupElement::identity();
        assert_eq!(s.project(&Coset::subgroup(0), &abab), a);
        assert_eq!(s.project(&Coset::of(0, &ab), &one), ab);
        assert_eq!(s.coset_gate(&Coset::subgroup(0), &Coset::subgroup(1)).unwrap(), vec![one.clone()]);
        assert_eq!(s.coset_gate(&Coset::subgroup(0), &Coset::of(0, &ab)).unwrap(), vec![a]);
        assert_eq!(s.coset_gate(&Coset::subgroup(0), &Coset::subgroup(0)), Err(Error::IdenticalCosets));
        let cone = ConedVertex::Cone(Coset::subgroup(0));
        assert_eq!(s.projection(&Coset::subgroup(0), &cone), Err(Error::InfiniteProjection));
    }

    #[test]
    fn cone_to_cone_distance() {
        let (s, m) = space();
        let ab = word(&m, &[(0, 1), (1, 1)]);
        let u = ConedVertex::Cone(Coset::subgroup(0));
        let v = ConedVertex::Cone(Coset::of(0, &ab));
        assert_eq!(s.hat_distance(&u, &v), int(1));
        assert_eq!(s.geodesic(&u, &v).length, int(1));
        assert_eq!(s.hat_distance(&u, &u), int(0));
    }

    #[test]
    fn separating_order_and_reversal() {
        let (s, m) = space();
        let abab = word(&m, &[(0, 1), (1, 1), (0, 1), (1, 1)]);
        let one = GroupElement::identity();
        let forward = s.separating_cosets(&one, &abab);
        let expected = vec![
            Coset::subgroup(0),
            Coset::of(1, &word(&m, &[(0, 1)])),
            Coset::of(0, &word(&m, &[(0, 1), (1, 1)])),
            Coset::of(1, &word(&m, &[(0, 1), (1, 1), (0, 1)])),
        ];
        assert_eq!(forward, expected);
        let mut back = s.separating_cosets(&abab, &one);
        back.reverse();
        assert_eq!(back, forward);
        let relevant: Vec<Coset> = s.relevant_cosets(&[one, abab]).into_iter().collect();
        let mut sorted = expected;
        sorted.sort();
        assert_eq!(relevant, sorted);
    }

    #[test]
    fn relative_distance_modes() {
        let (s, m) = space();
        let a2 = word(&m, &[(0, 2)]);
        let h = Coset::subgroup(0);
        assert_eq!(s.relative_distance(&h, &a2, &a2).unwrap(), Dist::ZERO);
        assert_eq!(s.relative_distance(&h, &GroupElement::identity(), &a2).unwrap(), Dist::Infinite);
        assert_eq!(s.relative_distance(&h, &word(&m, &[(1, 1)]), &a2), Err(Error::NotInCoset));
        let w = ConedSpace::new(fab(RelativeGenerators::FactorGenerators), 1, RelativeMetric::WordMetric).unwrap();
        assert_eq!(w.relative_distance(&h, &GroupElement::identity(), &a2).unwrap(), Dist::Finite(int(2)));
    }

    #[test]
    fn smallness_depends_on_mode() {
        let (s, m) = space();
        let t = [GroupElement::identity(), word(&m, &[(0, 1)]), word(&m, &[(0, 2)])];
        assert!(!s.is_small(&t));
        assert!(s.is_small(&[t[1].clone(), t[1].clone()]));
        let w = ConedSpace::new(fab(RelativeGenerators::FactorGenerators), 1, RelativeMetric::WordMetric).unwrap();
        assert!(w.is_small(&t[..2]));
        assert!(!w.is_small(&t));
        let w2 = ConedSpace::new(fab(RelativeGenerators::FactorGenerators), 2, RelativeMetric::WordMetric).unwrap();
        assert!(w2.is_small(&t));
    }
}
