//! Traces of simplices on cosets and the extension operator Θⁿ.

use alloc::collections::BTreeSet;
use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::chain::{Chain, CoefficientKind, ModuleVector, Simplex};
use crate::cochain::{coboundary_at, Cochain, CochainSpec, Domain};
use crate::coned::{ConedSpace, Coset, RelativeMetric};
use crate::group::{FactorKind, GroupElement, GroupModel, Window};
use crate::rational::{frac, int, NormSq, Rational};
use crate::{Error, Result};

/// One cochain per factor, all of the same degree and coefficient kind.
/// Entries must be alternating; the operator relies on it to skip
/// degenerate traces.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FamilyCochain {
    degree: usize,
    kind: CoefficientKind,
    entries: Vec<CochainSpec>,
}

impl FamilyCochain {
    pub fn new(model: &GroupModel, entries: Vec<CochainSpec>) -> Result<Self> {
        if entries.len() != model.factors().len() {
            return Err(Error::Config(format!(
                "family has {} entries for {} factors",
                entries.len(),
                model.factors().len()
            )));
        }
        let degree = entries[0].degree();
        let kind = entries[0].kind();
        for (i, e) in entries.iter().enumerate() {
            if e.degree() != degree {
                return Err(Error::DegreeMismatch { expected: degree, found: e.degree() });
            }
            if e.kind() != kind {
                return Err(Error::KindMismatch);
            }
            if e.domain() != Domain::Factor(i) {
                return Err(Error::Config(format!("family entry {i} must live on factor {i}")));
            }
        }
        Ok(FamilyCochain { degree, kind, entries })
    }

    /// `spec` on factor `factor`, zero on every other factor.
    pub fn one_hot(model: &GroupModel, factor: usize, spec: CochainSpec) -> Result<Self> {
        let (degree, kind) = (spec.degree(), spec.kind());
        let mut spec = Some(spec);
        let entries = (0..model.factors().len())
            .map(|i| if i == factor { spec.take().expect("taken once") } else { CochainSpec::zero(degree, kind, Domain::Factor(i)) })
            .collect();
        Self::new(model, entries)
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn kind(&self) -> CoefficientKind {
        self.kind
    }

    pub fn entry(&self, factor: usize) -> &CochainSpec {
        &self.entries[factor]
    }

    pub fn entries(&self) -> &[CochainSpec] {
        &self.entries
    }

    /// (δφ_λ)_λ.
    pub fn coboundary(&self) -> FamilyCochain {
        FamilyCochain {
            degree: self.degree + 1,
            kind: self.kind,
            entries: self.entries.iter().cloned().map(CochainSpec::coboundary).collect(),
        }
    }
}

/// The average of all simplices with j-th vertex drawn from `sets[j]`.
pub fn projected_average(sets: &[Vec<GroupElement>]) -> Chain {
    let degree = sets.len().saturating_sub(1);
    let mut out = Chain::zero(degree);
    if sets.iter().any(|s| s.is_empty()) {
        return out;
    }
    let count: i128 = sets.iter().map(|s| s.len() as i128).product();
    let weight = frac(1, count);
    let mut idx = vec![0usize; sets.len()];
    loop {
        out.add_term(Simplex(idx.iter().zip(sets).map(|(&i, s)| s[i].clone()).collect()), weight);
        let mut k = 0;
        while k < sets.len() && idx[k] + 1 == sets[k].len() {
            idx[k] = 0;
            k += 1;
        }
        if k == sets.len() {
            break;
        }
        idx[k] += 1;
    }
    out
}

fn has_repeat(points: &[GroupElement]) -> bool {
    points.iter().enumerate().any(|(i, p)| points[i + 1..].contains(p))
}

impl ConedSpace {
    pub fn is_relevant(&self, b: &Coset, tuple: &[GroupElement]) -> bool {
        self.projection_diam(b, tuple).at_least(self.two_d())
    }

    /// tr^B(ḡ): the averaged projection of ḡ onto `B`, or zero when `B` is
    /// not relevant for ḡ.
    pub fn trace(&self, tuple: &[GroupElement], b: &Coset) -> Chain {
        if !self.is_relevant(b, tuple) {
            return Chain::zero(tuple.len().saturating_sub(1));
        }
        let sets: Vec<Vec<GroupElement>> = tuple.iter().map(|g| vec![self.project(b, g)]).collect();
        projected_average(&sets)
    }

    /// Linear extension of the trace to chains.
    pub fn trace_chain(&self, chain: &Chain, b: &Coset) -> Chain {
        let mut out = Chain::zero(chain.degree());
        for (s, c) in chain.terms() {
            out.add_scaled(&self.trace(s.vertices(), b), *c).expect("same degree");
        }
        out
    }

    /// Relevant cosets whose trace is not degenerate.
    pub fn nondegenerate_trace_cosets(&self, tuple: &[GroupElement]) -> BTreeSet<Coset> {
        self.relevant_projections(tuple).into_iter().filter(|(_, p)| !has_repeat(p)).map(|(b, _)| b).collect()
    }

    /// ∂tr^B(ḡ) − tr^B(∂ḡ).
    pub fn almost_chain_defect(&self, tuple: &[GroupElement], b: &Coset) -> Result<Chain> {
        if tuple.len() < 3 {
            return Err(Error::DegreeMismatch { expected: 2, found: tuple.len().saturating_sub(1) });
        }
        let mut out = self.trace(tuple, b).boundary()?;
        let faces = Chain::simplex(tuple.to_vec()).boundary()?;
        out.add_scaled(&self.trace_chain(&faces, b), int(-1))?;
        Ok(out)
    }

    /// φ_B(b̄) = b₀·φ_λ(b₀⁻¹b̄) for a tuple inside `B = bH_λ`.
    pub fn phi_b(&self, phi: &CochainSpec, b: &Coset, tuple: &[GroupElement]) -> Result<ModuleVector> {
        let model = self.model();
        let base = &tuple[0];
        let based: Vec<GroupElement> = tuple.iter().map(|g| model.left_quotient(base, g)).collect();
        if based.iter().any(|g| model.in_factor(g, b.factor).is_none()) {
            return Err(Error::NotInCoset);
        }
        Ok(phi.evaluate_simplex(model, &based)?.translate(model, base))
    }

    /// φ′_B: zero on small simplices, φ_B elsewhere.
    pub fn phi_prime_b(&self, phi: &CochainSpec, b: &Coset, tuple: &[GroupElement]) -> Result<ModuleVector> {
        if self.is_small(tuple) {
            return Ok(ModuleVector::zero(phi.kind()));
        }
        self.phi_b(phi, b, tuple)
    }

    /// Based small simplices (first vertex the identity) in factor `factor`:
    /// all vertices pairwise at relative distance below 2D.
    pub fn based_small_simplices(&self, factor: usize, degree: usize, window: &Window) -> Result<Vec<Vec<GroupElement>>> {
        let model = self.model();
        let identity = GroupElement::identity();
        let near: Vec<GroupElement> = match self.metric() {
            RelativeMetric::InfinityOffDiagonal => vec![identity.clone()],
            RelativeMetric::WordMetric => {
                let reach = 2 * self.separation() - 1;
                let f = model.factor(factor);
                let enough = match (f.kind(), window.truncation(factor)) {
                    (FactorKind::FreeAbelian { .. } | FactorKind::Free { .. }, Some(t)) => t >= reach,
                    (FactorKind::FreeAbelian { .. } | FactorKind::Free { .. }, None) => false,
                    _ => true,
                };
                if !enough {
                    return Err(Error::Config(format!(
                        "factor {factor} truncation must be at least {reach} to enumerate small simplices"
                    )));
                }
                let mut near = vec![identity.clone()];
                near.extend(
                    f.window(window.truncation(factor))?
                        .into_iter()
                        .filter(|h| (f.word_length(h) as u128) <= reach as u128)
                        .map(|h| model.factor_element(factor, h)),
                );
                near
            }
        };
        let mut out = Vec::new();
        let mut idx = vec![0usize; degree];
        loop {
            let mut t = vec![identity.clone()];
            t.extend(idx.iter().map(|&i| near[i].clone()));
            if self.is_small(&t) {
                out.push(t);
            }
            let mut k = 0;
            while k < degree && idx[k] + 1 == near.len() {
                idx[k] = 0;
                k += 1;
            }
            if k == degree {
                break;
            }
            idx[k] += 1;
        }
        Ok(out)
    }

    /// K(φ) as a squared norm, with a maximizing based small simplex.
    pub fn k_of(&self, family: &FamilyCochain, window: &Window) -> Result<(NormSq, Option<Vec<GroupElement>>)> {
        let mut best = NormSq::ZERO;
        let mut witness = None;
        for (factor, phi) in family.entries().iter().enumerate() {
            if phi.is_zero_kernel() {
                continue;
            }
            for t in self.based_small_simplices(factor, family.degree(), window)? {
                let v = phi.evaluate_simplex(self.model(), &t)?.norm_sq();
                if v > best {
                    best = v;
                    witness = Some(t);
                }
            }
        }
        Ok((best, witness))
    }
}

/// Θⁿ(φ) evaluated lazily, one tuple at a time.
#[derive(Clone, Copy, Debug)]
pub struct Extension<'a> {
    pub space: &'a ConedSpace,
    pub family: &'a FamilyCochain,
}

/// Θφ(ḡ) with bookkeeping used by the bound checks.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ThetaValue {
    pub value: ModuleVector,
    /// Largest ‖φ_λ‖² over the non-small traced simplices.
    pub max_term: NormSq,
    /// Number of cosets with a non-degenerate trace.
    pub nondegenerate: usize,
}

impl<'a> Extension<'a> {
    pub fn new(space: &'a ConedSpace, family: &'a FamilyCochain) -> Self {
        Extension { space, family }
    }

    pub fn theta_detailed(&self, tuple: &[GroupElement]) -> Result<ThetaValue> {
        if tuple.len() != self.family.degree() + 1 {
            return Err(Error::DegreeMismatch { expected: self.family.degree(), found: tuple.len().saturating_sub(1) });
        }
        let model = self.space.model();
        let mut value = ModuleVector::zero(self.family.kind());
        let mut max_term = NormSq::ZERO;
        let mut nondegenerate = 0;
        for (b, traced) in self.space.relevant_projections(tuple) {
            let phi = self.family.entry(b.factor);
            if has_repeat(&traced) {
                continue;
            }
            nondegenerate += 1;
            if phi.is_zero_kernel() || self.space.is_small(&traced) {
                continue;
            }
            let base = &traced[0];
            let based: Vec<GroupElement> = traced.iter().map(|g| model.left_quotient(base, g)).collect();
            let term = phi.evaluate_simplex(model, &based)?;
            max_term = max_term.max(term.norm_sq());
            value.add_scaled(&term.translate(model, base), int(1))?;
        }
        Ok(ThetaValue { value, max_term, nondegenerate })
    }
}

impl Cochain for Extension<'_> {
    fn degree(&self) -> usize {
        self.family.degree()
    }

    fn kind(&self) -> CoefficientKind {
        self.family.kind()
    }

    fn evaluate_simplex(&self, _model: &GroupModel, tuple: &[GroupElement]) -> Result<ModuleVector> {
        Ok(self.theta_detailed(tuple)?.value)
    }
}

/// One checked inequality, aggregated over a window.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct BoundCheck {
    pub checked: u64,
    pub violations: u64,
    /// Largest observed squared norm.
    pub observed: NormSq,
    /// The bound (squared) at the aggregate level, when one applies.
    pub bound: Option<NormSq>,
    pub witness: Option<Vec<GroupElement>>,
}

impl BoundCheck {
    fn record(&mut self, observed: NormSq, ok: bool, tuple: &[GroupElement]) {
        self.checked += 1;
        let first_violation = !ok && self.violations == 0;
        if !ok {
            self.violations += 1;
        }
        if first_violation || (self.violations == 0 && (observed > self.observed || self.witness.is_none())) {
            self.witness = Some(tuple.to_vec());
        }
        self.observed = self.observed.max(observed);
    }

    pub fn pass(&self) -> bool {
        self.violations == 0
    }

    pub fn merge(&mut self, other: &BoundCheck) {
        self.checked += other.checked;
        if self.violations == 0 && (other.violations > 0 || other.observed > self.observed) {
            self.witness = other.witness.clone();
        }
        self.violations += other.violations;
        self.observed = self.observed.max(other.observed);
        self.bound = match (self.bound, other.bound) {
            (Some(a), Some(b)) => Some(a.max(b)),
            (a, b) => a.or(b),
        };
    }
}

/// Results for the four conditions on Θⁿ and the defect bound.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExtensionReport {
    pub degree: usize,
    /// K(φ)².
    pub k: NormSq,
    /// Values on factor tuples stay in the factor's edge module.
    pub support: BoundCheck,
    /// ‖Θφ − φ_λ‖ ≤ K on factor tuples.
    pub restriction: BoundCheck,
    /// Θφ = φ′_λ exactly on factor tuples.
    pub restriction_exact: BoundCheck,
    /// ‖Θφ(ḡ)‖ ≤ n(n+1)·max traced ‖φ‖, for n ≥ 2.
    pub sup: BoundCheck,
    /// ‖δΘφ − Θ(δφ)‖ ≤ 2(n+1)(n+2)K.
    pub quasi_chain: BoundCheck,
    /// ‖δΘφ‖ ≤ (n+1)(n+2)(D(φ) + 2K).
    pub defect: BoundCheck,
    /// ‖δΘφ − δφ_λ‖ ≤ (n+1)K on factor (n+2)-tuples.
    pub coboundary_restriction: BoundCheck,
    /// Windowed lower bound for D(φ), squared.
    pub windowed_defect: NormSq,
}

impl ExtensionReport {
    pub fn pass(&self) -> bool {
        [
            &self.support,
            &self.restriction,
            &self.restriction_exact,
            &self.sup,
            &self.quasi_chain,
            &self.defect,
            &self.coboundary_restriction,
        ]
        .iter()
        .all(|c| c.pass())
    }

    pub fn merge(&mut self, other: &ExtensionReport) {
        self.support.merge(&other.support);
        self.restriction.merge(&other.restriction);
        self.restriction_exact.merge(&other.restriction_exact);
        self.sup.merge(&other.sup);
        self.quasi_chain.merge(&other.quasi_chain);
        self.defect.merge(&other.defect);
        self.coboundary_restriction.merge(&other.coboundary_restriction);
        self.windowed_defect = self.windowed_defect.max(other.windowed_defect);
        self.finish();
    }

    /// Recomputes the aggregate bounds from K and the windowed defect.
    fn finish(&mut self) {
        let n = self.degree as i128;
        let k = self.k.value();
        let sq = |c: Rational| c * c;
        self.restriction.bound = Some(self.k);
        self.quasi_chain.bound = Some(NormSq(sq(int(2 * (n + 1) * (n + 2))) * k));
        let c = int((n + 1) * (n + 2));
        let (dw, k_root) = (self.windowed_defect.sqrt(), self.k.sqrt());
        self.defect.bound = match (dw, k_root) {
            (Some(d), Some(kr)) => Some(NormSq::of_scalar(c * (d + int(2) * kr))),
            _ => None,
        };
        self.coboundary_restriction.bound = Some(NormSq(sq(int(n + 1)) * k));
    }
}

/// Streaming verifier for Θⁿ(φ): feed it tuples, read the report.
pub struct ExtensionVerifier<'a> {
    theta: Extension<'a>,
    delta_family: FamilyCochain,
    report: ExtensionReport,
}

impl<'a> ExtensionVerifier<'a> {
    pub fn new(space: &'a ConedSpace, family: &'a FamilyCochain, window: &Window) -> Result<Self> {
        let (k, _) = space.k_of(family, window)?;
        let mut report = ExtensionReport {
            degree: family.degree(),
            k,
            support: BoundCheck::default(),
            restriction: BoundCheck::default(),
            restriction_exact: BoundCheck::default(),
            sup: BoundCheck::default(),
            quasi_chain: BoundCheck::default(),
            defect: BoundCheck::default(),
            coboundary_restriction: BoundCheck::default(),
            windowed_defect: NormSq::ZERO,
        };
        report.finish();
        Ok(ExtensionVerifier { theta: Extension::new(space, family), delta_family: family.coboundary(), report })
    }

    pub fn report(&self) -> &ExtensionReport {
        &self.report
    }

    pub fn into_report(mut self) -> ExtensionReport {
        self.report.finish();
        self.report
    }

    fn n(&self) -> i128 {
        self.theta.family.degree() as i128
    }

    /// Conditions (1) and (2) and exact restriction, on an (n+1)-tuple of
    /// `H_factor`.
    pub fn check_factor_tuple(&mut self, factor: usize, tuple: &[GroupElement]) -> Result<()> {
        let space = self.theta.space;
        let model = space.model();
        let theta = self.theta.theta_detailed(tuple)?.value;
        let phi = self.theta.family.entry(factor);
        let direct = phi.evaluate_simplex(model, tuple)?;
        let gap = theta.difference(&direct)?.norm_sq();
        self.report.restriction.record(gap, gap <= self.report.k, tuple);
        let expected = if space.is_small(tuple) { ModuleVector::zero(phi.kind()) } else { direct };
        self.report.restriction_exact.record(theta.difference(&expected)?.norm_sq(), theta == expected, tuple);
        let inside = match &theta {
            ModuleVector::Scalar(_) => true,
            ModuleVector::Edges(f) => f.iter().all(|(e, _)| e.factor == factor && model.in_factor(&e.origin, factor).is_some()),
        };
        self.report.support.record(NormSq::ZERO, inside, tuple);
        Ok(())
    }

    /// Condition (3), on an (n+1)-tuple of G; recorded without a bound when n = 1.
    pub fn check_sup(&mut self, tuple: &[GroupElement]) -> Result<()> {
        let t = self.theta.theta_detailed(tuple)?;
        let n = self.n();
        let obs = t.value.norm_sq();
        let ok = n < 2 || crate::rational::root_le_scaled(obs, int(n * (n + 1)), t.max_term);
        self.report.sup.record(obs, ok, tuple);
        Ok(())
    }

    /// Condition (4) and the defect bound, on an (n+2)-tuple of G.
    pub fn check_coboundary(&mut self, tuple: &[GroupElement]) -> Result<()> {
        let d_theta = coboundary_at(&self.theta, self.theta.space.model(), tuple)?;
        self.check_coboundary_given(tuple, d_theta)
    }

    /// As [`Self::check_coboundary`], with δΘφ(tuple) supplied by the caller
    /// (for callers that memoize Θφ on faces).
    pub fn check_coboundary_given(&mut self, tuple: &[GroupElement], d_theta: ModuleVector) -> Result<()> {
        let n = self.n();
        let theta_delta = Extension::new(self.theta.space, &self.delta_family).theta_detailed(tuple)?;
        let k = self.report.k;
        let gap = d_theta.difference(&theta_delta.value)?.norm_sq();
        let ok = crate::rational::root_le_scaled(gap, int(2 * (n + 1) * (n + 2)), k);
        self.report.quasi_chain.record(gap, ok, tuple);
        let obs = d_theta.norm_sq();
        let local = theta_delta.max_term;
        self.report.windowed_defect = self.report.windowed_defect.max(local);
        let c = int((n + 1) * (n + 2));
        let ok = crate::rational::root_le_sum(obs, c, local, int(2) * c, k);
        self.report.defect.record(obs, ok, tuple);
        Ok(())
    }

    /// ‖(δΘφ − δφ_λ)(h̄)‖ ≤ (n+1)K on an (n+2)-tuple of `H_factor`.
    pub fn check_factor_coboundary(&mut self, factor: usize, tuple: &[GroupElement]) -> Result<()> {
        let model = self.theta.space.model();
        let d_theta = coboundary_at(&self.theta, model, tuple)?;
        let d_phi = coboundary_at(self.theta.family.entry(factor), model, tuple)?;
        let gap = d_theta.difference(&d_phi)?.norm_sq();
        self.report.windowed_defect = self.report.windowed_defect.max(d_phi.norm_sq());
        let ok = crate::rational::root_le_scaled(gap, int(self.n() + 1), self.report.k);
        self.report.coboundary_restriction.record(gap, ok, tuple);
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::{FactorElem, FactorSpec, RelativeGenerators};
    use alloc::string::ToString;

    fn z2t(generators: RelativeGenerators) -> GroupModel {
        GroupModel::new(
            vec![
                FactorSpec::free_abelian(2, vec!["x".to_string(), "y".to_string()]).unwrap(),
                FactorSpec::free(1, vec!["t".to_string()]).unwrap(),
            ],
            generators,
        )
        .unwrap()
    }

    fn pt(m: &GroupModel, x: i64, y: i64) -> GroupElement {
        m.factor_element(0, FactorElem::Vector(smallvec::smallvec![x, y]))
    }

    #[test]
    fn theta_of_volume() {
        let m = z2t(RelativeGenerators::None);
        let s = ConedSpace::new(m.clone(), 1, RelativeMetric::InfinityOffDiagonal).unwrap();
        let fam = FamilyCochain::one_hot(&m, 0, CochainSpec::volume(&m, 0).unwrap()).unwrap();
        let th = Extension::new(&s, &fam);
        let v = th.evaluate_simplex(&m, &[pt(&m, 0, 0), pt(&m, 3, 0), pt(&m, 0, 4)]).unwrap();
        assert_eq!(v, ModuleVector::Scalar(int(6)));
        let t = m.factor_element(1, FactorElem::Word(smallvec::smallvec![1]));
        let v = th.evaluate_simplex(&m, &[t, pt(&m, 1, 0), pt(&m, 0, 1)]).unwrap();
        assert_eq!(v, ModuleVector::Scalar(frac(1, 2)));
        let c = pt(&m, 2, 2);
        assert!(th.evaluate_simplex(&m, &[c.clone(), c.clone(), c]).unwrap().is_zero());
    }

    #[test]
    fn multi_valued_average() {
        let m = z2t(RelativeGenerators::None);
        let sets = vec![vec![pt(&m, 0, 0), pt(&m, 1, 0)], vec![pt(&m, 0, 1)], vec![pt(&m, 5, 5)]];
        let c = projected_average(&sets);
        assert_eq!(c.len(), 2);
        assert!(c.terms().all(|(_, w)| *w == frac(1, 2)));
        assert_eq!(c.l1_norm(), int(1));
    }

    #[test]
    fn k_of_word_metric() {
        let m = z2t(RelativeGenerators::FactorGenerators);
        let fam = FamilyCochain::one_hot(&m, 0, CochainSpec::volume(&m, 0).unwrap()).unwrap();
        let w = Window::new(1, vec![Some(3), Some(3)]);
        let s1 = ConedSpace::new(m.clone(), 1, RelativeMetric::WordMetric).unwrap();
        assert_eq!(s1.k_of(&fam, &w).unwrap().0, NormSq::ZERO);
        let s2 = ConedSpace::new(m.clone(), 2, RelativeMetric::WordMetric).unwrap();
        assert!(s2.k_of(&fam, &w).unwrap().0 > NormSq::ZERO);
        let tiny = Window::new(1, vec![Some(2), Some(2)]);
        assert!(matches!(s2.k_of(&fam, &tiny), Err(Error::Config(_))));
    }

    #[test]
    fn family_shape_is_validated() {
        let m = z2t(RelativeGenerators::None);
        let v = CochainSpec::volume(&m, 0).unwrap();
        assert!(FamilyCochain::new(&m, vec![v.clone()]).is_err());
        let wrong = CochainSpec::zero(1, CoefficientKind::Scalar, Domain::Factor(1));
        assert!(FamilyCochain::new(&m, vec![v, wrong]).is_err());
    }
}
