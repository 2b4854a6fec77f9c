//! Chains with exact rational coefficients, and the coefficient modules:
//! scalars, or finitely supported functions on oriented edges.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use num_traits::{Signed, Zero};

use crate::group::{GroupElement, GroupModel};
use crate::rational::{frac, int, NormSq, Rational};
use crate::{Error, Result};

/// An (n+1)-tuple of group elements.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Simplex(pub Vec<GroupElement>);

impl Simplex {
    pub fn degree(&self) -> usize {
        self.0.len().saturating_sub(1)
    }

    pub fn vertices(&self) -> &[GroupElement] {
        &self.0
    }

    /// The j-th face, omitting vertex j.
    pub fn face(&self, j: usize) -> Simplex {
        let mut v = self.0.clone();
        v.remove(j);
        Simplex(v)
    }

    pub fn translate(&self, model: &GroupModel, g: &GroupElement) -> Simplex {
        Simplex(self.0.iter().map(|x| model.mul(g, x)).collect())
    }

    pub fn has_repeat(&self) -> bool {
        self.0.iter().enumerate().any(|(i, x)| self.0[i + 1..].contains(x))
    }
}

/// A finite formal combination of simplices of a fixed degree. Zero
/// coefficients are never stored.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Chain {
    degree: usize,
    terms: BTreeMap<Simplex, Rational>,
}

impl Chain {
    pub fn zero(degree: usize) -> Self {
        Chain { degree, terms: BTreeMap::new() }
    }

    pub fn simplex(vertices: Vec<GroupElement>) -> Self {
        let s = Simplex(vertices);
        let mut c = Chain::zero(s.degree());
        c.add_term(s, int(1));
        c
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Simplex, &Rational)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coefficient(&self, s: &Simplex) -> Rational {
        self.terms.get(s).copied().unwrap_or_else(Rational::zero)
    }

    /// Adds `coef · s`. Panics if the degree does not match.
    pub fn add_term(&mut self, s: Simplex, coef: Rational) {
        assert_eq!(s.degree(), self.degree, "simplex degree does not match chain degree");
        if coef.is_zero() {
            return;
        }
        let entry = self.terms.entry(s);
        match entry {
            alloc::collections::btree_map::Entry::Vacant(v) => {
                v.insert(coef);
            }
            alloc::collections::btree_map::Entry::Occupied(mut o) => {
                let sum = *o.get() + coef;
                if sum.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = sum;
                }
            }
        }
    }

    pub fn add_scaled(&mut self, other: &Chain, coef: Rational) -> Result<()> {
        if other.degree != self.degree {
            return Err(Error::DegreeMismatch { expected: self.degree, found: other.degree });
        }
        for (s, c) in &other.terms {
            self.add_term(s.clone(), *c * coef);
        }
        Ok(())
    }

    pub fn l1_norm(&self) -> Rational {
        self.terms.values().map(|c| c.abs()).sum()
    }

    pub fn boundary(&self) -> Result<Chain> {
        if self.degree == 0 {
            return Err(Error::DegreeZero);
        }
        let mut out = Chain::zero(self.degree - 1);
        for (s, c) in &self.terms {
            for j in 0..=self.degree {
                let sign = if j % 2 == 0 { int(1) } else { int(-1) };
                out.add_term(s.face(j), *c * sign);
            }
        }
        Ok(out)
    }

    /// alt_n: the signed average over all vertex permutations.
    pub fn alternate(&self) -> Chain {
        let perms = permutations(self.degree + 1);
        let weight = frac(1, perms.len() as i128);
        let mut out = Chain::zero(self.degree);
        for (s, c) in &self.terms {
            for (p, sign) in &perms {
                let permuted = Simplex(p.iter().map(|&i| s.0[i].clone()).collect());
                out.add_term(permuted, *c * weight * int(*sign as i128));
            }
        }
        out
    }

    pub fn is_degenerate(&self) -> bool {
        self.alternate().is_empty()
    }

    pub fn translate(&self, model: &GroupModel, g: &GroupElement) -> Chain {
        let mut out = Chain::zero(self.degree);
        for (s, c) in &self.terms {
            out.add_term(s.translate(model, g), *c);
        }
        out
    }
}

/// All permutations of `0..n` with their signs, in lexicographic order.
pub fn permutations(n: usize) -> Vec<(Vec<usize>, i8)> {
    let mut out = Vec::new();
    let mut p: Vec<usize> = (0..n).collect();
    loop {
        out.push((p.clone(), permutation_sign(&p)));
        // next lexicographic permutation
        let Some(i) = (1..n).rev().find(|&i| p[i - 1] < p[i]) else { break };
        let j = (i..n).rev().find(|&j| p[j] > p[i - 1]).expect("a larger element exists");
        p.swap(i - 1, j);
        p[i..].reverse();
    }
    out
}

pub fn permutation_sign(p: &[usize]) -> i8 {
    let mut inversions = 0;
    for i in 0..p.len() {
        for j in i + 1..p.len() {
            if p[i] > p[j] {
                inversions += 1;
            }
        }
    }
    if inversions % 2 == 0 {
        1
    } else {
        -1
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum CoefficientKind {
    Scalar,
    EdgeFunction,
}

/// An oriented edge of the Cayley graph of G with respect to the union of
/// the factor generators: from `origin` to `origin · s^{±1}`, where `s` is
/// generator `generator` of factor `factor`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct OrientedEdge {
    pub origin: GroupElement,
    pub factor: usize,
    pub generator: usize,
    pub inverse: bool,
}

impl OrientedEdge {
    pub fn terminal(&self, model: &GroupModel) -> GroupElement {
        let s = model.factor(self.factor).generator(self.generator, self.inverse);
        model.mul(&self.origin, &model.factor_element(self.factor, s))
    }

    pub fn reversed(&self, model: &GroupModel) -> OrientedEdge {
        OrientedEdge {
            origin: self.terminal(model),
            factor: self.factor,
            generator: self.generator,
            inverse: !self.inverse,
        }
    }

    pub fn translate(&self, model: &GroupModel, g: &GroupElement) -> OrientedEdge {
        OrientedEdge { origin: model.mul(g, &self.origin), ..self.clone() }
    }
}

/// A finitely supported rational function on oriented edges.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct EdgeFunction {
    weights: BTreeMap<OrientedEdge, Rational>,
}

impl EdgeFunction {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, e: OrientedEdge, w: Rational) {
        if w.is_zero() {
            return;
        }
        let v = self.weights.entry(e.clone()).or_insert_with(Rational::zero);
        *v += w;
        if v.is_zero() {
            self.weights.remove(&e);
        }
    }

    pub fn get(&self, e: &OrientedEdge) -> Rational {
        self.weights.get(e).copied().unwrap_or_else(Rational::zero)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&OrientedEdge, &Rational)> {
        self.weights.iter()
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn norm_sq(&self) -> Rational {
        self.weights.values().map(|w| w * w).sum()
    }

    pub fn translate(&self, model: &GroupModel, g: &GroupElement) -> EdgeFunction {
        EdgeFunction { weights: self.weights.iter().map(|(e, w)| (e.translate(model, g), *w)).collect() }
    }

    /// Ψ(f)(v) = Σ_{t(e)=v} f(e) − Σ_{o(e)=v} f(e), on its finite support.
    pub fn psi(&self, model: &GroupModel) -> BTreeMap<GroupElement, Rational> {
        let mut out: BTreeMap<GroupElement, Rational> = BTreeMap::new();
        for (e, w) in &self.weights {
            *out.entry(e.terminal(model)).or_insert_with(Rational::zero) += *w;
            *out.entry(e.origin.clone()).or_insert_with(Rational::zero) -= *w;
        }
        out.retain(|_, v| !v.is_zero());
        out
    }
}

/// A value of a cochain: a scalar, or an edge function.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ModuleVector {
    Scalar(Rational),
    Edges(EdgeFunction),
}

impl ModuleVector {
    pub fn zero(kind: CoefficientKind) -> Self {
        match kind {
            CoefficientKind::Scalar => ModuleVector::Scalar(Rational::zero()),
            CoefficientKind::EdgeFunction => ModuleVector::Edges(EdgeFunction::new()),
        }
    }

    pub fn kind(&self) -> CoefficientKind {
        match self {
            ModuleVector::Scalar(_) => CoefficientKind::Scalar,
            ModuleVector::Edges(_) => CoefficientKind::EdgeFunction,
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            ModuleVector::Scalar(x) => x.is_zero(),
            ModuleVector::Edges(f) => f.is_empty(),
        }
    }

    pub fn as_scalar(&self) -> Option<Rational> {
        match self {
            ModuleVector::Scalar(x) => Some(*x),
            ModuleVector::Edges(_) => None,
        }
    }

    pub fn as_edges(&self) -> Option<&EdgeFunction> {
        match self {
            ModuleVector::Edges(f) => Some(f),
            ModuleVector::Scalar(_) => None,
        }
    }

    pub fn norm_sq(&self) -> NormSq {
        match self {
            ModuleVector::Scalar(x) => NormSq::of_scalar(*x),
            ModuleVector::Edges(f) => NormSq(f.norm_sq()),
        }
    }

    /// `self += coef · other`.
    pub fn add_scaled(&mut self, other: &ModuleVector, coef: Rational) -> Result<()> {
        match (self, other) {
            (ModuleVector::Scalar(x), ModuleVector::Scalar(y)) => *x += coef * y,
            (ModuleVector::Edges(f), ModuleVector::Edges(g)) => {
                for (e, w) in g.iter() {
                    f.add(e.clone(), coef * w);
                }
            }
            _ => return Err(Error::KindMismatch),
        }
        Ok(())
    }

    pub fn difference(&self, other: &ModuleVector) -> Result<ModuleVector> {
        let mut out = self.clone();
        out.add_scaled(other, int(-1))?;
        Ok(out)
    }

    /// The G-action: trivial on scalars, left translation of edges.
    pub fn translate(&self, model: &GroupModel, g: &GroupElement) -> ModuleVector {
        match self {
            ModuleVector::Scalar(x) => ModuleVector::Scalar(*x),
            ModuleVector::Edges(f) => ModuleVector::Edges(f.translate(model, g)),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::{FactorElem, FactorSpec, RelativeGenerators};
    use alloc::string::ToString;
    use alloc::vec;

    fn model() -> GroupModel {
        GroupModel::new(
            vec![FactorSpec::free(1, vec!["a".to_string()]).unwrap(), FactorSpec::free(1, vec!["b".to_string()]).unwrap()],
            RelativeGenerators::None,
        )
        .unwrap()
    }

    fn gen(m: &GroupModel, f: usize) -> GroupElement {
        m.factor_element(f, FactorElem::Word(smallvec::smallvec![1]))
    }

    #[test]
    fn boundary_of_a_triangle() {
        let m = model();
        let (one, a, b) = (GroupElement::identity(), gen(&m, 0), gen(&m, 1));
        let d = Chain::simplex(vec![one.clone(), a.clone(), b.clone()]).boundary().unwrap();
        assert_eq!(d.coefficient(&Simplex(vec![a.clone(), b.clone()])), int(1));
        assert_eq!(d.coefficient(&Simplex(vec![one.clone(), b.clone()])), int(-1));
        assert_eq!(d.coefficient(&Simplex(vec![one.clone(), a.clone()])), int(1));
        assert!(d.boundary().unwrap().is_empty());
        assert_eq!(Chain::simplex(vec![one]).boundary(), Err(Error::DegreeZero));
    }

    #[test]
    fn alternation_basics() {
        let m = model();
        let (one, a, b) = (GroupElement::identity(), gen(&m, 0), gen(&m, 1));
        assert!(Chain::simplex(vec![a.clone(), a.clone(), b.clone()]).is_degenerate());
        let alt = Chain::simplex(vec![one.clone(), a.clone(), b.clone()]).alternate();
        assert_eq!(alt.len(), 6);
        assert_eq!(alt.coefficient(&Simplex(vec![a.clone(), one.clone(), b.clone()])), frac(-1, 6));
        assert_eq!(alt.coefficient(&Simplex(vec![b, one, a])), frac(1, 6));
        assert_eq!(alt.alternate(), alt);
    }

    #[test]
    fn permutation_signs() {
        let p = permutations(3);
        assert_eq!(p.len(), 6);
        assert_eq!(p.iter().map(|(_, s)| *s as i32).sum::<i32>(), 0);
        assert_eq!(permutations(1), vec![(vec![0], 1)]);
    }

    #[test]
    fn psi_of_a_single_edge() {
        let m = model();
        let e = OrientedEdge { origin: GroupElement::identity(), factor: 0, generator: 0, inverse: false };
        let mut f = EdgeFunction::new();
        f.add(e.clone(), int(2));
        let psi = f.psi(&m);
        assert_eq!(psi[&GroupElement::identity()], int(-2));
        assert_eq!(psi[&gen(&m, 0)], int(2));
        assert_eq!(e.reversed(&m).reversed(&m), e);
    }
}
