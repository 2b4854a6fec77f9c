//! Geodesic flows by BFS and exhaustive path enumeration in the Cayley graph
//! of a single factor, restricted to a finite vertex set.

use std::collections::{BTreeMap, HashMap, VecDeque};

use hypemb_core::group::{FactorElem, GroupModel};
use hypemb_core::{EdgeFunction, OrientedEdge};
use num_rational::Ratio;

/// Every geodesic from `l0` to `l1` inside `vertices`, as lists of
/// (origin, generator, inverse) steps.
pub fn all_geodesics(
    model: &GroupModel,
    factor: usize,
    vertices: &[FactorElem],
    l0: &FactorElem,
    l1: &FactorElem,
) -> Vec<Vec<(FactorElem, usize, bool)>> {
    let f = model.factor(factor);
    let index: HashMap<&FactorElem, usize> = vertices.iter().enumerate().map(|(i, v)| (v, i)).collect();
    let mut dist = vec![usize::MAX; vertices.len()];
    let start = index[l0];
    dist[start] = 0;
    let mut queue = VecDeque::from([start]);
    while let Some(i) = queue.pop_front() {
        for g in 0..f.generator_count() {
            for inv in [false, true] {
                let y = f.mul(&vertices[i], &f.generator(g, inv));
                if let Some(&j) = index.get(&y) {
                    if dist[j] == usize::MAX {
                        dist[j] = dist[i] + 1;
                        queue.push_back(j);
                    }
                }
            }
        }
    }
    let mut out = Vec::new();
    let mut path = Vec::new();
    fn walk(
        f: &hypemb_core::FactorSpec,
        vertices: &[FactorElem],
        index: &HashMap<&FactorElem, usize>,
        dist: &[usize],
        at: usize,
        target: usize,
        path: &mut Vec<(FactorElem, usize, bool)>,
        out: &mut Vec<Vec<(FactorElem, usize, bool)>>,
    ) {
        if at == target {
            out.push(path.clone());
            return;
        }
        for g in 0..f.generator_count() {
            for inv in [false, true] {
                let y = f.mul(&vertices[at], &f.generator(g, inv));
                if let Some(&j) = index.get(&y) {
                    // stay on shortest paths towards the target: distance from start grows by one and
                    // the target stays reachable in the remaining budget
                    if dist[j] == dist[at] + 1 && dist[j] <= dist[target] {
                        path.push((vertices[at].clone(), g, inv));
                        walk(f, vertices, index, dist, j, target, path, out);
                        path.pop();
                    }
                }
            }
        }
    }
    walk(f, vertices, &index, &dist, start, index[l1], &mut path, &mut out);
    // keep only paths of geodesic length (dead ends never reach the target)
    out.retain(|p| p.len() == dist[index[l1]]);
    out
}

/// c_H(l0, l1) from the enumerated geodesics.
pub fn flow(model: &GroupModel, factor: usize, vertices: &[FactorElem], l0: &FactorElem, l1: &FactorElem) -> EdgeFunction {
    let paths = all_geodesics(model, factor, vertices, l0, l1);
    let f = model.factor(factor);
    let mut sums: BTreeMap<OrientedEdge, i128> = BTreeMap::new();
    for p in &paths {
        for (origin, g, inv) in p {
            let e = OrientedEdge { origin: model.factor_element(factor, origin.clone()), factor, generator: *g, inverse: *inv };
            let target = f.mul(origin, &f.generator(*g, *inv));
            let back = OrientedEdge { origin: model.factor_element(factor, target), factor, generator: *g, inverse: !*inv };
            *sums.entry(e).or_default() += 1;
            *sums.entry(back).or_default() -= 1;
        }
    }
    let mut out = EdgeFunction::new();
    let d = paths.first().map_or(0, |p| p.len()) as i128;
    if d == 0 {
        return out;
    }
    for (e, s) in sums {
        out.add(e, Ratio::new(d * s, 2 * paths.len() as i128));
    }
    out
}
