//! The coned-off graph materialized on a finite set of elements, with
//! Dijkstra (distances in quarter units) and predecessor sets.

use std::cmp::Reverse;
use std::collections::{BinaryHeap, HashMap};

use hypemb_core::group::GroupElement;
use hypemb_core::{ConedSpace, ConedVertex, Coset, RelativeGenerators};

pub struct ConedBall {
    pub vertices: Vec<ConedVertex>,
    index: HashMap<ConedVertex, usize>,
    /// (neighbour, length in quarters)
    adjacency: Vec<Vec<(usize, u64)>>,
}

pub struct Search {
    pub dist: Vec<u64>,
    pub preds: Vec<Vec<usize>>,
}

impl ConedBall {
    /// Elements, one cone per coset meeting them, cone edges of length 1,
    /// and (with relative generators) Cayley edges of length 4.
    pub fn build(space: &ConedSpace, elements: &[GroupElement]) -> Self {
        let model = space.model();
        let mut vertices: Vec<ConedVertex> = elements.iter().cloned().map(ConedVertex::Element).collect();
        let mut index: HashMap<ConedVertex, usize> = vertices.iter().cloned().enumerate().map(|(i, v)| (v, i)).collect();
        let mut adjacency: Vec<Vec<(usize, u64)>> = vec![Vec::new(); vertices.len()];
        for (i, g) in elements.iter().enumerate() {
            for factor in 0..model.factors().len() {
                let cone = ConedVertex::Cone(Coset::of(factor, g));
                let c = *index.entry(cone.clone()).or_insert_with(|| {
                    vertices.push(cone);
                    adjacency.push(Vec::new());
                    vertices.len() - 1
                });
                adjacency[i].push((c, 1));
                adjacency[c].push((i, 1));
            }
        }
        if model.relative_generators() == RelativeGenerators::FactorGenerators {
            for (i, g) in elements.iter().enumerate() {
                for factor in 0..model.factors().len() {
                    let f = model.factor(factor);
                    for gen in 0..f.generator_count() {
                        for inv in [false, true] {
                            let h = model.mul(g, &model.factor_element(factor, f.generator(gen, inv)));
                            if let Some(&j) = index.get(&ConedVertex::Element(h)) {
                                adjacency[i].push((j, 4));
                            }
                        }
                    }
                }
            }
        }
        ConedBall { vertices, index, adjacency }
    }

    pub fn index_of(&self, v: &ConedVertex) -> Option<usize> {
        self.index.get(v).copied()
    }

    pub fn dijkstra(&self, source: usize) -> Search {
        let n = self.vertices.len();
        let mut dist = vec![u64::MAX; n];
        let mut preds = vec![Vec::new(); n];
        let mut heap = BinaryHeap::new();
        dist[source] = 0;
        heap.push(Reverse((0u64, source)));
        while let Some(Reverse((d, u))) = heap.pop() {
            if d > dist[u] {
                continue;
            }
            for &(v, w) in &self.adjacency[u] {
                let nd = d + w;
                if nd < dist[v] {
                    dist[v] = nd;
                    preds[v] = vec![u];
                    heap.push(Reverse((nd, v)));
                } else if nd == dist[v] && !preds[v].contains(&u) {
                    preds[v].push(u);
                }
            }
        }
        Search { dist, preds }
    }

    /// Every shortest path from the search source to `target`.
    pub fn paths(&self, search: &Search, target: usize) -> Vec<Vec<ConedVertex>> {
        if search.dist[target] == u64::MAX {
            return Vec::new();
        }
        if search.preds[target].is_empty() {
            return vec![vec![self.vertices[target].clone()]];
        }
        let mut out = Vec::new();
        for &p in &search.preds[target] {
            for mut path in self.paths(search, p) {
                path.push(self.vertices[target].clone());
                out.push(path);
            }
        }
        out
    }

    /// Members of `b` nearest to `x`, among the materialized elements.
    pub fn projection(&self, b: &Coset, x: &ConedVertex) -> Vec<GroupElement> {
        let s = self.dijkstra(self.index_of(x).expect("vertex in ball"));
        let members: Vec<(u64, &GroupElement)> = self
            .vertices
            .iter()
            .enumerate()
            .filter_map(|(i, v)| match v {
                ConedVertex::Element(g) if b.contains(g) => Some((s.dist[i], g)),
                _ => None,
            })
            .collect();
        let best = members.iter().map(|(d, _)| *d).min().unwrap_or(u64::MAX);
        let mut out: Vec<GroupElement> = members.into_iter().filter(|(d, _)| *d == best).map(|(_, g)| g.clone()).collect();
        out.sort();
        out
    }
}
