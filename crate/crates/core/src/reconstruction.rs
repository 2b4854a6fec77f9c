//! Recovering coset projections from extended cocycles: the geodesic flow
//! c_H with the divergence map Ψ, and the volume cocycle on ℤⁿ.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use num_traits::{ToPrimitive, Zero};
use smallvec::SmallVec;

use crate::chain::{EdgeFunction, OrientedEdge};
use crate::cochain::{signed_volume, Cochain, CochainSpec};
use crate::coned::{ConedSpace, Coset};
use crate::extension::{Extension, FamilyCochain};
use crate::group::{FactorElem, FactorKind, GroupElement, GroupModel};
use crate::rational::{frac, int, Dist, Rational};
use crate::{Error, Result};

/// Σ_γ (χ_γ − χ_γ̄) over all geodesics from `l0` to `l1` in the Cayley graph
/// of one factor, with the number of geodesics and their length.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GeodesicBundle {
    pub l0: FactorElem,
    pub l1: FactorElem,
    pub distance: u64,
    pub count: i128,
    pub edge_weights: EdgeFunction,
}

fn multinomial(parts: &[u64]) -> Result<i128> {
    // Product of binomials, each exact.
    let mut total: u64 = 0;
    let mut acc: i128 = 1;
    for &p in parts {
        for k in 1..=p {
            total += 1;
            acc = acc
                .checked_mul(total as i128)
                .ok_or_else(|| Error::Config("geodesic count overflows i128".into()))?
                / k as i128;
        }
    }
    Ok(acc)
}

/// Geodesics are counted, never enumerated: an edge from `x` to `x + s` lies
/// on N(l0, x)·N(x + s, l1) of them.
pub fn geodesic_bundle(model: &GroupModel, factor: usize, l0: &FactorElem, l1: &FactorElem) -> Result<GeodesicBundle> {
    let f = model.factor(factor);
    f.validate(l0)?;
    f.validate(l1)?;
    let mut weights = EdgeFunction::new();
    let edge = |x: &FactorElem, generator: usize, inverse: bool| OrientedEdge {
        origin: model.factor_element(factor, x.clone()),
        factor,
        generator,
        inverse,
    };
    match f.kind() {
        FactorKind::FreeAbelian { rank } => {
            let (a, b) = match (l0, l1) {
                (FactorElem::Vector(a), FactorElem::Vector(b)) => (a, b),
                _ => unreachable!("validated"),
            };
            let span: Vec<u64> = a.iter().zip(b).map(|(p, q)| (q - p).unsigned_abs()).collect();
            let dir: Vec<i64> = a.iter().zip(b).map(|(p, q)| (q - p).signum()).collect();
            let distance: u64 = span.iter().sum();
            let count = multinomial(&span)?;
            // Walk the box of offsets k with 0 ≤ k ≤ span.
            let mut k = vec![0u64; *rank];
            loop {
                let before = multinomial(&k)?;
                for i in 0..*rank {
                    if k[i] < span[i] {
                        let rest: Vec<u64> = (0..*rank).map(|j| span[j] - k[j] - u64::from(j == i)).collect();
                        let through = before * multinomial(&rest)?;
                        let x: SmallVec<[i64; 2]> = (0..*rank).map(|j| a[j] + dir[j] * k[j] as i64).collect();
                        let mut y = x.clone();
                        y[i] += dir[i];
                        let inverse = dir[i] < 0;
                        let w = int(through);
                        weights.add(edge(&FactorElem::Vector(x), i, inverse), w);
                        weights.add(edge(&FactorElem::Vector(y), i, !inverse), -w);
                    }
                }
                let mut i = 0;
                while i < *rank && k[i] == span[i] {
                    k[i] = 0;
                    i += 1;
                }
                if i == *rank {
                    break;
                }
                k[i] += 1;
            }
            Ok(GeodesicBundle { l0: l0.clone(), l1: l1.clone(), distance, count, edge_weights: weights })
        }
        FactorKind::Free { .. } => {
            let path = match f.mul(&f.inv(l0), l1) {
                FactorElem::Word(w) => w,
                _ => unreachable!("validated"),
            };
            let mut at = l0.clone();
            for &letter in &path {
                let generator = letter.unsigned_abs() as usize - 1;
                let step = f.generator(generator, letter < 0);
                let next = f.mul(&at, &step);
                weights.add(edge(&at, generator, letter < 0), int(1));
                weights.add(edge(&next, generator, letter > 0), int(-1));
                at = next;
            }
            Ok(GeodesicBundle { l0: l0.clone(), l1: l1.clone(), distance: path.len() as u64, count: 1, edge_weights: weights })
        }
        _ => Err(Error::UnsupportedFactor(format!("factor {factor} is finite; c_H needs an infinite factor"))),
    }
}

/// c_H(l0, l1) = d/(2·#geodesics) · Σ_γ (χ_γ − χ_γ̄).
pub fn c_h(model: &GroupModel, factor: usize, l0: &FactorElem, l1: &FactorElem) -> Result<EdgeFunction> {
    let bundle = geodesic_bundle(model, factor, l0, l1)?;
    let mut out = EdgeFunction::new();
    if bundle.distance == 0 {
        return Ok(out);
    }
    let scale = frac(bundle.distance as i128, 2 * bundle.count);
    for (e, w) in bundle.edge_weights.iter() {
        out.add(e.clone(), *w * scale);
    }
    Ok(out)
}

/// Ψ(f)(v) = Σ_{t(e)=v} f(e) − Σ_{o(e)=v} f(e).
pub fn psi(model: &GroupModel, f: &EdgeFunction) -> BTreeMap<GroupElement, Rational> {
    f.psi(model)
}

/// h_n = s₁^{n³}, with s₁ the first declared generator of the factor.
pub fn h_sequence(model: &GroupModel, factor: usize, n: u64) -> Result<GroupElement> {
    let f = model.factor(factor);
    if !f.is_infinite() {
        return Err(Error::UnsupportedFactor(format!("factor {factor} is finite")));
    }
    let power = n.checked_pow(3).filter(|p| *p <= 1 << 20).ok_or_else(|| Error::Config("n is too large".into()))?;
    let value = match f.kind() {
        FactorKind::FreeAbelian { rank } => {
            let mut v: SmallVec<[i64; 2]> = SmallVec::from_elem(0, *rank);
            v[0] = power as i64;
            FactorElem::Vector(v)
        }
        _ => FactorElem::Word((0..power).map(|_| 1).collect()),
    };
    Ok(model.factor_element(factor, value))
}

fn check_target(space: &ConedSpace, factor: usize) -> Result<()> {
    match space.model().factors().get(factor) {
        Some(f) if f.is_infinite() => Ok(()),
        Some(_) => Err(Error::UnsupportedFactor(format!("factor {factor} is finite"))),
        None => Err(Error::ModelMismatch(format!("no factor {factor}"))),
    }
}

/// Whether n satisfies the thresholds for coset `B` and point `y`: the three
/// relative distances among g·h_n, g·h_{n+1} and π_B(y) all exceed 2D.
pub fn admissible_n(space: &ConedSpace, b: &Coset, y: &GroupElement, n: u64) -> Result<bool> {
    check_target(space, b.factor)?;
    let model = space.model();
    let p = space.project(b, y);
    let a0 = model.mul(&b.rep, &h_sequence(model, b.factor, n)?);
    let a1 = model.mul(&b.rep, &h_sequence(model, b.factor, n + 1)?);
    let far = |u: &GroupElement, v: &GroupElement| -> Result<bool> {
        Ok(match space.relative_distance(b, u, v)? {
            Dist::Infinite => true,
            Dist::Finite(d) => d > space.two_d(),
        })
    };
    Ok(far(&a0, &p)? && far(&a1, &p)? && far(&a0, &a1)?)
}

pub fn minimal_admissible_n(space: &ConedSpace, b: &Coset, y: &GroupElement) -> Result<u64> {
    for n in 1..=100 {
        if admissible_n(space, b, y, n)? {
            return Ok(n);
        }
    }
    Err(Error::Recovery("no admissible n below 100".into()))
}

/// The outcome of the general recovery at one n.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GeneralRecovery {
    pub n: u64,
    /// Ψ_G(C_G(g·h_n, g·h_{n+1}, y)) restricted to the coset, with g·h_n and
    /// g·h_{n+1} removed.
    pub values: BTreeMap<GroupElement, Rational>,
    pub support: Vec<GroupElement>,
}

/// Recovers π_B(y) from Θ² of the one-hot family δ¹c_H.
pub fn recover_projection_general(space: &ConedSpace, b: &Coset, y: &GroupElement, n: u64) -> Result<GeneralRecovery> {
    if !admissible_n(space, b, y, n)? {
        return Err(Error::RetryLarger { minimal: minimal_admissible_n(space, b, y)? });
    }
    let model = space.model();
    let family = FamilyCochain::one_hot(model, b.factor, CochainSpec::edge_flow_delta(model, b.factor)?)?;
    let a0 = model.mul(&b.rep, &h_sequence(model, b.factor, n)?);
    let a1 = model.mul(&b.rep, &h_sequence(model, b.factor, n + 1)?);
    let value = Extension::new(space, &family).evaluate_simplex(model, &[a0.clone(), a1.clone(), y.clone()])?;
    let edges = value.as_edges().ok_or(Error::KindMismatch)?;
    let mut values = psi(model, edges);
    values.retain(|v, w| b.contains(v) && *v != a0 && *v != a1 && !w.is_zero());
    let support = values.keys().cloned().collect();
    Ok(GeneralRecovery { n, values, support })
}

/// α(z̄): signed volume of the simplex spanned by n+1 points of ℤⁿ.
pub fn volume_cocycle(points: &[&[i64]]) -> Rational {
    signed_volume(points)
}

fn zn_rank(space: &ConedSpace, factor: usize) -> Result<usize> {
    match space.model().factors().get(factor).map(|f| f.kind()) {
        Some(FactorKind::FreeAbelian { rank }) => Ok(*rank),
        _ => Err(Error::UnsupportedFactor(format!("factor {factor} is not free abelian"))),
    }
}

/// The probe points y₀ = m·e₁ and y_i = m·e₁ + m·e_i.
pub fn probes(space: &ConedSpace, factor: usize, m: i64) -> Result<Vec<GroupElement>> {
    let rank = zn_rank(space, factor)?;
    let model = space.model();
    Ok((0..=rank)
        .map(|i| {
            let mut v: SmallVec<[i64; 2]> = SmallVec::from_elem(0, rank);
            v[0] = m;
            if i > 0 {
                v[i - 1] += m;
            }
            model.factor_element(factor, FactorElem::Vector(v))
        })
        .collect())
}

/// s̄_i(w): the probes with vertex i replaced by `w`.
pub fn probe_simplex(probes: &[GroupElement], i: usize, w: &GroupElement) -> Vec<GroupElement> {
    let mut s = probes.to_vec();
    s[i] = w.clone();
    s
}

/// Whether every probe is at relative distance above D from π(w), and every
/// probe simplex is relevant and non-small on the factor subgroup.
pub fn admissible_m(space: &ConedSpace, factor: usize, w: &GroupElement, m: i64) -> Result<bool> {
    if m < 1 {
        return Ok(false);
    }
    let h = Coset::subgroup(factor);
    let p = space.project(&h, w);
    let ys = probes(space, factor, m)?;
    for y in &ys {
        let far = match space.relative_distance(&h, y, &p)? {
            Dist::Infinite => true,
            Dist::Finite(d) => d > space.d(),
        };
        if !far {
            return Ok(false);
        }
    }
    for i in 1..ys.len() {
        let traced: Vec<GroupElement> = probe_simplex(&ys, i, &p);
        if !space.is_relevant(&h, &traced) || space.is_small(&traced) {
            return Ok(false);
        }
    }
    Ok(true)
}

pub fn minimal_admissible_m(space: &ConedSpace, factor: usize, w: &GroupElement) -> Result<i64> {
    (1..=1000)
        .find_map(|m| admissible_m(space, factor, w, m).map(|ok| ok.then_some(m)).transpose())
        .unwrap_or_else(|| Err(Error::Recovery("no admissible m below 1000".into())))
}

/// The next admissible m after `m`.
pub fn next_admissible_m(space: &ConedSpace, factor: usize, w: &GroupElement, m: i64) -> Result<i64> {
    (m + 1..=m + 1000)
        .find_map(|k| admissible_m(space, factor, w, k).map(|ok| ok.then_some(k)).transpose())
        .unwrap_or_else(|| Err(Error::Recovery("no further admissible m".into())))
}

/// Recovers π_{gℤⁿ}(z) from A = Θⁿ(α) on the probe simplices, by the floor
/// formula.
pub fn recover_projection_zn(space: &ConedSpace, factor: usize, g: &GroupElement, z: &GroupElement, m: i64) -> Result<GroupElement> {
    let rank = zn_rank(space, factor)?;
    let model = space.model();
    let w = model.left_quotient(g, z);
    if !admissible_m(space, factor, &w, m)? {
        return Err(Error::RetryLarger { minimal: minimal_admissible_m(space, factor, &w)? as u64 });
    }
    let family = FamilyCochain::one_hot(model, factor, CochainSpec::volume(model, factor)?)?;
    let theta = Extension::new(space, &family);
    let ys = probes(space, factor, m)?;
    let scale = Rational::from_integer((1..=rank as i128).product::<i128>()) / int(m as i128).pow(rank as i32 - 1);
    let mut coords: SmallVec<[i64; 2]> = SmallVec::with_capacity(rank);
    for i in 1..=rank {
        let a = theta
            .evaluate_simplex(model, &probe_simplex(&ys, i, &w))?
            .as_scalar()
            .ok_or(Error::KindMismatch)?;
        let mut c = scale * a;
        if i == 1 {
            c += int(m as i128);
        }
        coords.push(c.floor().to_integer().to_i64().ok_or_else(|| Error::Recovery("coordinate overflow".into()))?);
    }
    Ok(model.mul(g, &model.factor_element(factor, FactorElem::Vector(coords))))
}
