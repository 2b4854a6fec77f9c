//! Projection axioms for the family of coset gates, and the linear
//! geometric separation diagnostic.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use crate::coned::{ConedSpace, Coset, RelativeMetric};
use crate::group::GroupElement;
use crate::rational::{int, Dist, Rational};
use crate::{Error, Result};

fn require_word_metric(space: &ConedSpace) -> Result<()> {
    if space.metric() != RelativeMetric::WordMetric {
        return Err(Error::InvalidSpace("projection distances need the word metric on the factors".into()));
    }
    Ok(())
}

fn finite(d: Dist) -> Rational {
    d.as_finite().expect("word metric distances are finite")
}

/// d_Y(X, Z) = diam of the gates of X and Z on Y.
pub fn pairwise_distance(space: &ConedSpace, y: &Coset, x: &Coset, z: &Coset) -> Result<Rational> {
    require_word_metric(space)?;
    let mut points = space.coset_gate(y, x)?;
    points.extend(space.coset_gate(y, z)?);
    Ok(finite(space.diam(y, &points)?))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BbfReport {
    pub xi: Rational,
    /// Largest gate diameter over (Y, X).
    pub axiom0_max: Rational,
    /// Largest value of min{d_Y(X,Z), d_Z(X,Y)}: the minimal passing ξ.
    pub axiom3_min_max: Rational,
    pub axiom3_triples: u64,
    pub axiom3_witness: Option<(Coset, Coset, Coset)>,
    /// Histogram of |{Y : d_Y(X,Z) ≥ ξ₄}| over pairs (X, Z).
    pub axiom4_counts: BTreeMap<usize, u64>,
    /// Pairs where that count differs from the separated cosets between
    /// the two gate points.
    pub axiom4_mismatches: u64,
    /// Pairs whose count exceeds 2·d̂(x, z) + 1 for the gate points x, z.
    pub axiom4_over_bound: u64,
    pub axiom4_pairs: u64,
}

impl BbfReport {
    pub fn pass0(&self) -> bool {
        self.axiom0_max < self.xi
    }

    pub fn pass3(&self) -> bool {
        self.axiom3_min_max <= self.xi
    }

    pub fn pass4(&self) -> bool {
        self.axiom4_mismatches == 0 && self.axiom4_over_bound == 0
    }

    pub fn pass(&self) -> bool {
        self.pass0() && self.pass3() && self.pass4()
    }
}

/// Checks axioms (0), (3) and (4) with Y (resp. X for axiom 4) ranging over
/// `anchors` and the remaining cosets over `cosets`. Axiom (4) counts use the
/// threshold D, which makes them comparable with 𝓢.
pub fn check_axioms(space: &ConedSpace, anchors: &[Coset], cosets: &[Coset], xi: Rational) -> Result<BbfReport> {
    require_word_metric(space)?;
    let mut report = BbfReport {
        xi,
        axiom0_max: int(0),
        axiom3_min_max: int(0),
        axiom3_triples: 0,
        axiom3_witness: None,
        axiom4_counts: BTreeMap::new(),
        axiom4_mismatches: 0,
        axiom4_over_bound: 0,
        axiom4_pairs: 0,
    };
    for y in anchors {
        let others: Vec<&Coset> = cosets.iter().filter(|c| *c != y).collect();
        // gate of every other coset on Y, and of Y on every other coset
        let on_y: Vec<GroupElement> = others.iter().map(|x| space.coset_gate(y, x).map(|g| g[0].clone())).collect::<Result<_>>()?;
        for x in &others {
            let g = space.coset_gate(y, x)?;
            report.axiom0_max = report.axiom0_max.max(finite(space.diam(y, &g)?));
        }
        for (i, x) in others.iter().enumerate() {
            for (j, z) in others.iter().enumerate() {
                if i == j {
                    continue;
                }
                report.axiom3_triples += 1;
                let dy = finite(space.relative_distance(y, &on_y[i], &on_y[j])?);
                if dy <= report.axiom3_min_max {
                    continue;
                }
                let dz = pairwise_distance(space, z, x, y)?;
                let m = dy.min(dz);
                if m > report.axiom3_min_max {
                    report.axiom3_min_max = m;
                    report.axiom3_witness = Some((y.clone(), (*x).clone(), (*z).clone()));
                }
            }
        }
    }
    let d = space.d();
    for x in anchors {
        for z in cosets.iter().filter(|c| *c != x) {
            report.axiom4_pairs += 1;
            let mut count = 0;
            for y in cosets.iter().filter(|c| *c != x && *c != z) {
                if pairwise_distance(space, y, x, z)? >= d {
                    count += 1;
                }
            }
            *report.axiom4_counts.entry(count).or_insert(0) += 1;
            let gx = space.coset_gate(x, z)?.remove(0);
            let gz = space.coset_gate(z, x)?.remove(0);
            let separated = space.separating_cosets(&gx, &gz);
            let in_window = separated.iter().filter(|c| cosets.contains(c)).count();
            if in_window != count {
                report.axiom4_mismatches += 1;
            }
            let hat = space.hat_distance(
                &crate::coned::ConedVertex::Element(gx),
                &crate::coned::ConedVertex::Element(gz),
            );
            if int(count as i128) > int(2) * hat + int(1) {
                report.axiom4_over_bound += 1;
            }
        }
    }
    Ok(report)
}

/// Word-metric distance from `x` to the coset `B`.
pub fn distance_to_coset(space: &ConedSpace, b: &Coset, x: &GroupElement) -> u64 {
    let model = space.model();
    let u = model.left_quotient(&b.rep, x);
    let full = model.word_length(&u);
    match u.first() {
        Some(s) if s.factor == b.factor => full - model.factor(s.factor).word_length(&s.value),
        _ => full,
    }
}

/// One row of the diagnostic: the smallest K with diam(N_D(A) ∩ B) ≤ K·D
/// over the tested pairs, at neighbourhood radius D.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KlgsRow {
    pub radius: u64,
    pub max_diam: u64,
    pub k: Rational,
    pub witness: Option<(Coset, Coset)>,
}

/// For A in `anchors` and distinct B in `cosets`, intersects the radius-D
/// neighbourhood of A with the members of B among `elements`. Window
/// intersections under-approximate the true ones.
pub fn klgs_diagnostic(
    space: &ConedSpace,
    anchors: &[Coset],
    cosets: &[Coset],
    elements: &[GroupElement],
    max_radius: u64,
) -> Result<Vec<KlgsRow>> {
    require_word_metric(space)?;
    let model = space.model();
    let mut rows: Vec<KlgsRow> =
        (1..=max_radius).map(|r| KlgsRow { radius: r, max_diam: 0, k: int(0), witness: None }).collect();
    for a in anchors {
        let dist_a: Vec<u64> = elements.iter().map(|x| distance_to_coset(space, a, x)).collect();
        for b in cosets.iter().filter(|c| *c != a) {
            let members: Vec<(usize, &GroupElement)> =
                elements.iter().enumerate().filter(|(_, x)| b.contains(x)).collect();
            for row in rows.iter_mut() {
                let near: Vec<&GroupElement> =
                    members.iter().filter(|(i, _)| dist_a[*i] <= row.radius).map(|(_, x)| *x).collect();
                let mut diam = 0;
                for (i, p) in near.iter().enumerate() {
                    for q in &near[i + 1..] {
                        diam = diam.max(model.word_length(&model.left_quotient(p, q)));
                    }
                }
                if diam > row.max_diam {
                    row.max_diam = diam;
                    row.witness = Some((a.clone(), b.clone()));
                }
            }
        }
    }
    for row in rows.iter_mut() {
        row.k = Rational::new(row.max_diam as i128, row.radius as i128);
    }
    Ok(rows)
}
