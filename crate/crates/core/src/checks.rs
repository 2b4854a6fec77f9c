//! Validators for the geometric properties of coset projections, run over
//! caller-supplied finite windows. Each check counts what it examined and
//! keeps the first violation as a witness.

use alloc::string::String;
use alloc::vec::Vec;

use crate::coned::{ConedSpace, ConedVertex, Coset};
use crate::group::GroupElement;
use crate::rational::{int, Rational};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CheckOutcome {
    pub name: &'static str,
    pub property: &'static str,
    pub checked: u64,
    pub violations: u64,
    pub witness: Option<String>,
    pub max_observed: Option<Rational>,
}

impl CheckOutcome {
    pub fn new(name: &'static str, property: &'static str) -> Self {
        CheckOutcome { name, property, checked: 0, violations: 0, witness: None, max_observed: None }
    }

    pub fn pass(&self) -> bool {
        self.violations == 0
    }

    fn record(&mut self, ok: bool, witness: impl FnOnce() -> String) {
        self.checked += 1;
        if !ok {
            if self.violations == 0 {
                self.witness = Some(witness());
            }
            self.violations += 1;
        }
    }

    fn observe(&mut self, value: Rational) {
        self.max_observed = Some(self.max_observed.map_or(value, |m| m.max(value)));
    }

    pub fn merge(&mut self, other: &CheckOutcome) {
        self.checked += other.checked;
        if self.violations == 0 {
            self.witness = other.witness.clone();
        }
        self.violations += other.violations;
        if let Some(v) = other.max_observed {
            self.observe(v);
        }
    }
}

/// All geometry checks with their counters.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GeometryChecks {
    pub farproj: CheckOutcome,
    pub smallproj: CheckOutcome,
    pub linearord: CheckOutcome,
    pub three_points: CheckOutcome,
    pub separated_count: CheckOutcome,
    pub equivariance: CheckOutcome,
}

impl Default for GeometryChecks {
    fn default() -> Self {
        GeometryChecks {
            farproj: CheckOutcome::new("farproj", "projections at relative distance at least D force the cone onto the geodesic"),
            smallproj: CheckOutcome::new("smallproj", "gates and point projections have relative diameter below D"),
            linearord: CheckOutcome::new("linearord", "separated cosets are linearly ordered along the geodesic"),
            three_points: CheckOutcome::new("three_points", "at most two relevant cosets of a pair see a third point elsewhere"),
            separated_count: CheckOutcome::new("separated_count", "the number of separated cosets is at most twice the coned distance"),
            equivariance: CheckOutcome::new("equivariance", "distances, projections, separated and relevant cosets commute with translation"),
        }
    }
}

impl GeometryChecks {
    pub fn outcomes(&self) -> [&CheckOutcome; 6] {
        [&self.farproj, &self.smallproj, &self.linearord, &self.three_points, &self.separated_count, &self.equivariance]
    }

    pub fn pass(&self) -> bool {
        self.outcomes().iter().all(|c| c.pass())
    }

    pub fn merge(&mut self, other: &GeometryChecks) {
        self.farproj.merge(&other.farproj);
        self.smallproj.merge(&other.smallproj);
        self.linearord.merge(&other.linearord);
        self.three_points.merge(&other.three_points);
        self.separated_count.merge(&other.separated_count);
        self.equivariance.merge(&other.equivariance);
    }

    /// farproj for one pair against every coset in `cosets`, plus smallproj
    /// for the two point projections.
    pub fn check_far_projection(&mut self, space: &ConedSpace, x: &GroupElement, y: &GroupElement, cosets: &[Coset]) {
        let geodesic = space.geodesic(&ConedVertex::Element(x.clone()), &ConedVertex::Element(y.clone()));
        let d = space.d();
        let model = space.model();
        for b in cosets {
            let px = space.project(b, x);
            let py = space.project(b, y);
            let sep = space.diam(b, &[px.clone(), py.clone()]).expect("projections lie in the coset");
            if sep.at_least(d) {
                let cone = ConedVertex::Cone(b.clone());
                self.farproj.record(geodesic.vertices.contains(&cone), || {
                    alloc::format!("x={} y={} coset={}", model.format(x), model.format(y), format_coset(space, b))
                });
            } else {
                self.farproj.checked += 1;
            }
            for p in [&px, &py] {
                let diam = space.diam(b, core::slice::from_ref(p)).expect("projection lies in the coset");
                self.smallproj.record(!diam.at_least(d), || alloc::format!("coset={}", format_coset(space, b)));
            }
        }
    }

    /// smallproj for the gate of `other` on `b`.
    pub fn check_gate(&mut self, space: &ConedSpace, b: &Coset, other: &Coset) {
        if b == other {
            return;
        }
        let gate = space.coset_gate(b, other).expect("distinct cosets");
        let ok = !gate.is_empty() && !space.diam(b, &gate).expect("gate lies in the coset").at_least(space.d());
        self.smallproj.record(ok, || alloc::format!("B={} B'={}", format_coset(space, b), format_coset(space, other)));
    }

    /// linearord and the size bound on 𝓢(v0, v1).
    pub fn check_order(&mut self, space: &ConedSpace, v0: &GroupElement, v1: &GroupElement) {
        let model = space.model();
        let s = space.separating_cosets(v0, v1);
        let hat = space.hat_distance(&ConedVertex::Element(v0.clone()), &ConedVertex::Element(v1.clone()));
        let size = int(s.len() as i128);
        self.separated_count.observe(size);
        self.separated_count.record(size <= int(2) * hat, || alloc::format!("v0={} v1={}", model.format(v0), model.format(v1)));
        for (i, b0) in s.iter().enumerate() {
            for b1 in &s[i + 1..] {
                let a = space.projection(b1, &ConedVertex::Element(v0.clone())).expect("element");
                let b = space.projection(b1, &ConedVertex::Cone(b0.clone())).expect("distinct");
                let c = space.projection(b0, &ConedVertex::Cone(b1.clone())).expect("distinct");
                let d = space.projection(b0, &ConedVertex::Element(v1.clone())).expect("element");
                self.linearord.record(a == b && c == d, || {
                    alloc::format!(
                        "v0={} v1={} B0={} B1={}",
                        model.format(v0),
                        model.format(v1),
                        format_coset(space, b0),
                        format_coset(space, b1)
                    )
                });
            }
        }
    }

    /// The three points property, given 𝓡(g0, g1) precomputed.
    pub fn check_three_points(&mut self, space: &ConedSpace, g: [&GroupElement; 3], relevant01: &[Coset]) {
        let count = relevant01
            .iter()
            .filter(|b| {
                let p2 = space.project(b, g[2]);
                p2 != space.project(b, g[0]) && p2 != space.project(b, g[1])
            })
            .count();
        self.three_points.observe(int(count as i128));
        let model = space.model();
        self.three_points.record(count <= 2, || {
            alloc::format!("g0={} g1={} g2={}", model.format(g[0]), model.format(g[1]), model.format(g[2]))
        });
    }

    /// Translation by `g` against d̂, π_B, 𝓢 and 𝓡 for the pair (x, y).
    pub fn check_equivariance(&mut self, space: &ConedSpace, g: &GroupElement, x: &GroupElement, y: &GroupElement, b: &Coset) {
        let m = space.model();
        let (gx, gy, gb) = (m.mul(g, x), m.mul(g, y), b.translate(m, g));
        let e = |v: &GroupElement| ConedVertex::Element(v.clone());
        let dist_ok = space.hat_distance(&e(x), &e(y)) == space.hat_distance(&e(&gx), &e(&gy));
        let proj_ok = m.mul(g, &space.project(b, x)) == space.project(&gb, &gx);
        let sep: Vec<Coset> = space.separating_cosets(x, y).iter().map(|c| c.translate(m, g)).collect();
        let sep_ok = sep == space.separating_cosets(&gx, &gy);
        let rel: alloc::collections::BTreeSet<Coset> =
            space.relevant_cosets(&[x.clone(), y.clone()]).iter().map(|c| c.translate(m, g)).collect();
        let rel_ok = rel == space.relevant_cosets(&[gx.clone(), gy.clone()]);
        self.equivariance.record(dist_ok && proj_ok && sep_ok && rel_ok, || {
            alloc::format!("g={} x={} y={} coset={}", m.format(g), m.format(x), m.format(y), format_coset(space, b))
        });
    }
}

pub fn format_coset(space: &ConedSpace, b: &Coset) -> String {
    let names = space.model().factor(b.factor).names().join(",");
    alloc::format!("{}<{}>", space.model().format(&b.rep), names)
}

/// All cosets `r·H_λ` with canonical representative `r` among `elements`.
pub fn cosets_with_reps(space: &ConedSpace, elements: &[GroupElement]) -> Vec<Coset> {
    let mut out = Vec::new();
    for r in elements {
        for factor in 0..space.model().factors().len() {
            if r.last().map(|s| s.factor) != Some(factor) {
                out.push(Coset { factor, rep: r.clone() });
            }
        }
    }
    out.sort();
    out
}

/// Lexicographic enumeration of `len`-tuples over `elements`.
pub struct Tuples<'a> {
    elements: &'a [GroupElement],
    idx: Vec<usize>,
    done: bool,
}

impl<'a> Tuples<'a> {
    pub fn new(elements: &'a [GroupElement], len: usize) -> Self {
        Tuples { elements, idx: alloc::vec![0; len], done: elements.is_empty() && len > 0 }
    }
}

impl Iterator for Tuples<'_> {
    type Item = Vec<GroupElement>;

    fn next(&mut self) -> Option<Self::Item> {
        if self.done {
            return None;
        }
        let out = self.idx.iter().map(|&i| self.elements[i].clone()).collect();
        let mut k = self.idx.len();
        loop {
            if k == 0 {
                self.done = true;
                break;
            }
            k -= 1;
            if self.idx[k] + 1 < self.elements.len() {
                self.idx[k] += 1;
                break;
            }
            self.idx[k] = 0;
        }
        Some(out)
    }
}
