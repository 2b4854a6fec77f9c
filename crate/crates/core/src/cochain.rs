//! Invariant cochains: a catalog of kernels, coboundary, alternation and
//! windowed sup norms.

use alloc::boxed::Box;
use alloc::collections::BTreeMap;
use alloc::format;
use alloc::vec::Vec;

use num_traits::Zero;

use crate::chain::{permutations, Chain, CoefficientKind, ModuleVector};
use crate::group::{FactorElem, FactorKind, GroupElement, GroupModel, Window};
use crate::rational::{frac, int, NormSq, Rational};
use crate::reconstruction::c_h;
use crate::{Error, Result};

/// Anything that can be evaluated on (n+1)-tuples of group elements.
pub trait Cochain {
    fn degree(&self) -> usize;
    fn kind(&self) -> CoefficientKind;
    fn domain(&self) -> Domain {
        Domain::Group
    }
    fn evaluate_simplex(&self, model: &GroupModel, tuple: &[GroupElement]) -> Result<ModuleVector>;

    /// Linear extension to chains.
    fn evaluate(&self, model: &GroupModel, chain: &Chain) -> Result<ModuleVector> {
        if chain.degree() != self.degree() {
            return Err(Error::DegreeMismatch { expected: self.degree(), found: chain.degree() });
        }
        let mut out = ModuleVector::zero(self.kind());
        for (s, c) in chain.terms() {
            out.add_scaled(&self.evaluate_simplex(model, s.vertices())?, *c)?;
        }
        Ok(out)
    }
}

/// δφ(g₀,…,g_{n+1}) = Σ (−1)^j φ(…, ĝ_j, …).
pub fn coboundary_at<C: Cochain + ?Sized>(c: &C, model: &GroupModel, tuple: &[GroupElement]) -> Result<ModuleVector> {
    check_len(c.degree() + 2, tuple)?;
    let mut out = ModuleVector::zero(c.kind());
    let mut face = Vec::with_capacity(tuple.len() - 1);
    for j in 0..tuple.len() {
        face.clear();
        face.extend(tuple.iter().enumerate().filter(|(i, _)| *i != j).map(|(_, g)| g.clone()));
        let sign = if j % 2 == 0 { int(1) } else { int(-1) };
        out.add_scaled(&c.evaluate_simplex(model, &face)?, sign)?;
    }
    Ok(out)
}

/// altⁿφ(ḡ) = φ(alt_n ḡ).
pub fn alternation_at<C: Cochain + ?Sized>(c: &C, model: &GroupModel, tuple: &[GroupElement]) -> Result<ModuleVector> {
    check_len(c.degree() + 1, tuple)?;
    let perms = permutations(tuple.len());
    let weight = frac(1, perms.len() as i128);
    let mut out = ModuleVector::zero(c.kind());
    let mut permuted = Vec::with_capacity(tuple.len());
    for (p, sign) in &perms {
        permuted.clear();
        permuted.extend(p.iter().map(|&i| tuple[i].clone()));
        out.add_scaled(&c.evaluate_simplex(model, &permuted)?, weight * int(*sign as i128))?;
    }
    Ok(out)
}

fn check_len(expected: usize, tuple: &[GroupElement]) -> Result<()> {
    if tuple.len() != expected {
        return Err(Error::DegreeMismatch { expected: expected - 1, found: tuple.len().saturating_sub(1) });
    }
    Ok(())
}

/// The coboundary of any cochain, by reference.
pub struct Delta<'a, C: ?Sized>(pub &'a C);

impl<C: Cochain + ?Sized> Cochain for Delta<'_, C> {
    fn degree(&self) -> usize {
        self.0.degree() + 1
    }
    fn kind(&self) -> CoefficientKind {
        self.0.kind()
    }
    fn domain(&self) -> Domain {
        self.0.domain()
    }
    fn evaluate_simplex(&self, model: &GroupModel, tuple: &[GroupElement]) -> Result<ModuleVector> {
        coboundary_at(self.0, model, tuple)
    }
}

/// The alternation of any cochain, by reference.
pub struct Alt<'a, C: ?Sized>(pub &'a C);

impl<C: Cochain + ?Sized> Cochain for Alt<'_, C> {
    fn degree(&self) -> usize {
        self.0.degree()
    }
    fn kind(&self) -> CoefficientKind {
        self.0.kind()
    }
    fn domain(&self) -> Domain {
        self.0.domain()
    }
    fn evaluate_simplex(&self, model: &GroupModel, tuple: &[GroupElement]) -> Result<ModuleVector> {
        alternation_at(self.0, model, tuple)
    }
}

/// Where a cochain lives: on all of G, or on one factor subgroup.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Domain {
    Group,
    Factor(usize),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Kernel {
    Zero,
    /// Signed volume det[z_j − z₀]/n! on a free abelian factor of rank n.
    Volume,
    /// The homomorphism x ↦ Σ wᵢxᵢ of a free abelian factor, as a 1-cochain.
    Homomorphism { weights: Vec<Rational> },
    /// (α∪β)(x₀,x₁,x₂) = α(x₁−x₀)·β(x₂−x₁) for homomorphisms α, β.
    HomomorphismCup { alpha: Vec<Rational>, beta: Vec<Rational> },
    /// The geodesic flow c_H on an infinite factor.
    EdgeFlow,
    /// δ¹c_H.
    EdgeFlowDelta,
    /// Explicit values on based tuples (g₀⁻¹g₁, …, g₀⁻¹gₙ); zero elsewhere.
    Table { entries: BTreeMap<Vec<GroupElement>, Rational> },
    Coboundary(Box<CochainSpec>),
    Alternation(Box<CochainSpec>),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CochainSpec {
    kernel: Kernel,
    degree: usize,
    kind: CoefficientKind,
    domain: Domain,
}

impl CochainSpec {
    pub fn zero(degree: usize, kind: CoefficientKind, domain: Domain) -> Self {
        CochainSpec { kernel: Kernel::Zero, degree, kind, domain }
    }

    pub fn volume(model: &GroupModel, factor: usize) -> Result<Self> {
        let rank = free_abelian_rank(model, factor)?;
        Ok(CochainSpec { kernel: Kernel::Volume, degree: rank, kind: CoefficientKind::Scalar, domain: Domain::Factor(factor) })
    }

    pub fn homomorphism(model: &GroupModel, factor: usize, weights: Vec<Rational>) -> Result<Self> {
        check_weights(model, factor, &weights)?;
        Ok(CochainSpec {
            kernel: Kernel::Homomorphism { weights },
            degree: 1,
            kind: CoefficientKind::Scalar,
            domain: Domain::Factor(factor),
        })
    }

    pub fn cup(model: &GroupModel, factor: usize, alpha: Vec<Rational>, beta: Vec<Rational>) -> Result<Self> {
        check_weights(model, factor, &alpha)?;
        check_weights(model, factor, &beta)?;
        Ok(CochainSpec {
            kernel: Kernel::HomomorphismCup { alpha, beta },
            degree: 2,
            kind: CoefficientKind::Scalar,
            domain: Domain::Factor(factor),
        })
    }

    pub fn edge_flow(model: &GroupModel, factor: usize) -> Result<Self> {
        check_infinite(model, factor)?;
        Ok(CochainSpec { kernel: Kernel::EdgeFlow, degree: 1, kind: CoefficientKind::EdgeFunction, domain: Domain::Factor(factor) })
    }

    pub fn edge_flow_delta(model: &GroupModel, factor: usize) -> Result<Self> {
        check_infinite(model, factor)?;
        Ok(CochainSpec {
            kernel: Kernel::EdgeFlowDelta,
            degree: 2,
            kind: CoefficientKind::EdgeFunction,
            domain: Domain::Factor(factor),
        })
    }

    /// A scalar cochain from explicit values on based n-tuples.
    pub fn table(degree: usize, domain: Domain, entries: BTreeMap<Vec<GroupElement>, Rational>) -> Result<Self> {
        if degree == 0 {
            return Err(Error::Config("table kernels need degree at least 1".into()));
        }
        if entries.keys().any(|k| k.len() != degree) {
            return Err(Error::Config(format!("table keys must be based tuples of {degree} elements")));
        }
        Ok(CochainSpec { kernel: Kernel::Table { entries }, degree, kind: CoefficientKind::Scalar, domain })
    }

    pub fn coboundary(self) -> Self {
        let (degree, kind, domain) = (self.degree + 1, self.kind, self.domain);
        if self.kernel == Kernel::Zero {
            return CochainSpec::zero(degree, kind, domain);
        }
        CochainSpec { kernel: Kernel::Coboundary(Box::new(self)), degree, kind, domain }
    }

    pub fn alternation(self) -> Self {
        let (degree, kind, domain) = (self.degree, self.kind, self.domain);
        if self.kernel == Kernel::Zero {
            return self;
        }
        CochainSpec { kernel: Kernel::Alternation(Box::new(self)), degree, kind, domain }
    }

    pub fn kernel(&self) -> &Kernel {
        &self.kernel
    }

    pub fn is_zero_kernel(&self) -> bool {
        self.kernel == Kernel::Zero
    }

    fn factor_coords(&self, model: &GroupModel, factor: usize, tuple: &[GroupElement]) -> Result<Vec<FactorElem>> {
        tuple
            .iter()
            .map(|g| model.in_factor(g, factor).ok_or(Error::DomainViolation { factor }))
            .collect()
    }
}

fn free_abelian_rank(model: &GroupModel, factor: usize) -> Result<usize> {
    match model.factors().get(factor).map(|f| f.kind()) {
        Some(FactorKind::FreeAbelian { rank }) => Ok(*rank),
        _ => Err(Error::UnsupportedFactor(format!("factor {factor} is not free abelian"))),
    }
}

fn check_weights(model: &GroupModel, factor: usize, weights: &[Rational]) -> Result<()> {
    if free_abelian_rank(model, factor)? != weights.len() {
        return Err(Error::Config("homomorphism weights must match the factor rank".into()));
    }
    Ok(())
}

fn check_infinite(model: &GroupModel, factor: usize) -> Result<()> {
    match model.factors().get(factor) {
        Some(f) if f.is_infinite() => Ok(()),
        _ => Err(Error::UnsupportedFactor(format!("factor {factor} is not an infinite factor with declared generators"))),
    }
}

fn vector(x: &FactorElem) -> &[i64] {
    match x {
        FactorElem::Vector(v) => v,
        _ => unreachable!("free abelian factors hold vectors"),
    }
}

fn apply(weights: &[Rational], x: &[i64], y: &[i64]) -> Rational {
    weights.iter().zip(x.iter().zip(y)).map(|(w, (a, b))| *w * int((*b - *a) as i128)).sum()
}

/// det[z_j − z₀]/n! for n+1 points of ℤⁿ.
pub fn signed_volume(points: &[&[i64]]) -> Rational {
    let n = points.len() - 1;
    let rows: Vec<Vec<i128>> =
        points[1..].iter().map(|z| z.iter().zip(points[0]).map(|(a, b)| (*a - *b) as i128).collect()).collect();
    let factorial: i128 = (1..=n as i128).product();
    Rational::new(bareiss_det(rows), factorial)
}

/// Fraction-free Gaussian elimination.
fn bareiss_det(mut m: Vec<Vec<i128>>) -> i128 {
    let n = m.len();
    if n == 0 {
        return 1;
    }
    let mut sign = 1;
    let mut prev = 1i128;
    for k in 0..n - 1 {
        if m[k][k] == 0 {
            match (k + 1..n).find(|&r| m[r][k] != 0) {
                Some(r) => {
                    m.swap(k, r);
                    sign = -sign;
                }
                None => return 0,
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) / prev;
            }
        }
        prev = m[k][k];
    }
    sign * m[n - 1][n - 1]
}

impl Cochain for CochainSpec {
    fn degree(&self) -> usize {
        self.degree
    }

    fn kind(&self) -> CoefficientKind {
        self.kind
    }

    fn domain(&self) -> Domain {
        self.domain
    }

    fn evaluate_simplex(&self, model: &GroupModel, tuple: &[GroupElement]) -> Result<ModuleVector> {
        check_len(self.degree + 1, tuple)?;
        let coords = match self.domain {
            Domain::Factor(f) => Some((f, self.factor_coords(model, f, tuple)?)),
            Domain::Group => None,
        };
        let scalar = |x: Rational| Ok(ModuleVector::Scalar(x));
        match &self.kernel {
            Kernel::Zero => Ok(ModuleVector::zero(self.kind)),
            Kernel::Volume => {
                let (_, c) = coords.ok_or_else(|| Error::Config("volume needs a factor domain".into()))?;
                let pts: Vec<&[i64]> = c.iter().map(vector).collect();
                scalar(signed_volume(&pts))
            }
            Kernel::Homomorphism { weights } => {
                let (_, c) = coords.ok_or_else(|| Error::Config("homomorphism needs a factor domain".into()))?;
                scalar(apply(weights, vector(&c[0]), vector(&c[1])))
            }
            Kernel::HomomorphismCup { alpha, beta } => {
                let (_, c) = coords.ok_or_else(|| Error::Config("cup product needs a factor domain".into()))?;
                scalar(apply(alpha, vector(&c[0]), vector(&c[1])) * apply(beta, vector(&c[1]), vector(&c[2])))
            }
            Kernel::EdgeFlow => {
                let (f, c) = coords.ok_or_else(|| Error::Config("edge flow needs a factor domain".into()))?;
                Ok(ModuleVector::Edges(c_h(model, f, &c[0], &c[1])?))
            }
            Kernel::EdgeFlowDelta => {
                let (f, c) = coords.ok_or_else(|| Error::Config("edge flow needs a factor domain".into()))?;
                let mut out = ModuleVector::Edges(c_h(model, f, &c[1], &c[2])?);
                out.add_scaled(&ModuleVector::Edges(c_h(model, f, &c[0], &c[2])?), int(-1))?;
                out.add_scaled(&ModuleVector::Edges(c_h(model, f, &c[0], &c[1])?), int(1))?;
                Ok(out)
            }
            Kernel::Table { entries } => {
                let based: Vec<GroupElement> = tuple[1..].iter().map(|g| model.left_quotient(&tuple[0], g)).collect();
                scalar(entries.get(&based).copied().unwrap_or_else(Rational::zero))
            }
            Kernel::Coboundary(inner) => coboundary_at(inner.as_ref(), model, tuple),
            Kernel::Alternation(inner) => alternation_at(inner.as_ref(), model, tuple),
        }
    }
}

/// Largest value norm over a finite list of tuples, with a witness.
pub fn sup_norm_over<C: Cochain + ?Sized, I>(
    c: &C,
    model: &GroupModel,
    tuples: I,
) -> Result<(NormSq, Option<Vec<GroupElement>>)>
where
    I: IntoIterator<Item = Vec<GroupElement>>,
{
    let mut best = NormSq::ZERO;
    let mut witness = None;
    for t in tuples {
        let v = c.evaluate_simplex(model, &t)?.norm_sq();
        if v > best || witness.is_none() {
            best = best.max(v);
            witness = Some(t);
        }
    }
    Ok((best, witness))
}

/// Windowed ‖φ‖∞ (squared): the maximum over all (n+1)-tuples of window
/// elements, restricted to the factor subgroup for factor cochains. This is
/// a lower bound for the true sup.
pub fn sup_norm_over_window<C: Cochain + ?Sized>(c: &C, model: &GroupModel, window: &Window) -> Result<NormSq> {
    let mut elements = model.enumerate_ball(window)?;
    if let Domain::Factor(f) = c.domain() {
        elements.retain(|g| model.in_factor(g, f).is_some());
    }
    let n = c.degree() + 1;
    let mut best = NormSq::ZERO;
    let mut idx = alloc::vec![0usize; n];
    if elements.is_empty() {
        return Ok(best);
    }
    let mut tuple: Vec<GroupElement> = alloc::vec![elements[0].clone(); n];
    loop {
        for (slot, &i) in tuple.iter_mut().zip(&idx) {
            *slot = elements[i].clone();
        }
        best = best.max(c.evaluate_simplex(model, &tuple)?.norm_sq());
        let mut k = 0;
        while k < n && idx[k] + 1 == elements.len() {
            idx[k] = 0;
            k += 1;
        }
        if k == n {
            break;
        }
        idx[k] += 1;
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::{FactorSpec, RelativeGenerators};
    use alloc::string::ToString;
    use alloc::vec;

    fn z2t() -> GroupModel {
        GroupModel::new(
            vec![
                FactorSpec::free_abelian(2, vec!["x".to_string(), "y".to_string()]).unwrap(),
                FactorSpec::free(1, vec!["t".to_string()]).unwrap(),
            ],
            RelativeGenerators::None,
        )
        .unwrap()
    }

    fn pt(m: &GroupModel, x: i64, y: i64) -> GroupElement {
        m.factor_element(0, FactorElem::Vector(smallvec::smallvec![x, y]))
    }

    #[test]
    fn volume_of_a_right_triangle() {
        let m = z2t();
        let v = CochainSpec::volume(&m, 0).unwrap();
        let t = [pt(&m, 0, 0), pt(&m, 3, 0), pt(&m, 0, 4)];
        assert_eq!(v.evaluate_simplex(&m, &t).unwrap(), ModuleVector::Scalar(int(6)));
        let rep = [pt(&m, 1, 1), pt(&m, 1, 1), pt(&m, 0, 4)];
        assert_eq!(v.evaluate_simplex(&m, &rep).unwrap(), ModuleVector::Scalar(int(0)));
        assert!(CochainSpec::volume(&m, 1).is_err());
    }

    #[test]
    fn cup_product_values() {
        let m = z2t();
        let cup = CochainSpec::cup(&m, 0, vec![int(1), int(0)], vec![int(0), int(1)]).unwrap();
        let one = pt(&m, 0, 0);
        let t = [pt(&m, 3, 0), one.clone(), pt(&m, 0, 3)];
        assert_eq!(cup.evaluate_simplex(&m, &t).unwrap(), ModuleVector::Scalar(int(-9)));
        let s = [one, pt(&m, 0, 3), pt(&m, 3, 0)];
        assert_eq!(cup.evaluate_simplex(&m, &s).unwrap(), ModuleVector::Scalar(int(0)));
    }

    #[test]
    fn domain_and_degree_errors() {
        let m = z2t();
        let v = CochainSpec::volume(&m, 0).unwrap();
        let t_elem = m.factor_element(1, FactorElem::Word(smallvec::smallvec![1]));
        let bad = [pt(&m, 0, 0), t_elem, pt(&m, 0, 1)];
        assert_eq!(v.evaluate_simplex(&m, &bad), Err(Error::DomainViolation { factor: 0 }));
        assert!(matches!(v.evaluate_simplex(&m, &bad[..2]), Err(Error::DegreeMismatch { .. })));
    }

    #[test]
    fn determinant_with_pivoting() {
        assert_eq!(bareiss_det(vec![vec![0, 1], vec![1, 0]]), -1);
        assert_eq!(bareiss_det(vec![vec![2, 0, 1], vec![1, 3, 2], vec![1, 1, 2]]), 6);
        assert_eq!(bareiss_det(vec![vec![1, 2], vec![2, 4]]), 0);
    }

    #[test]
    fn coboundary_of_zero_is_zero() {
        let z = CochainSpec::zero(1, CoefficientKind::Scalar, Domain::Group);
        assert!(z.coboundary().is_zero_kernel());
    }
}
