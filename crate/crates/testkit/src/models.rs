//! The standard desk-scale models.

use hypemb_core::group::{FactorElem, FactorSpec, GroupElement, GroupModel, RelativeGenerators, Syllable, Window};
use hypemb_core::{ConedSpace, RelativeMetric};

fn names(list: &[&str]) -> Vec<String> {
    list.iter().map(|s| s.to_string()).collect()
}

fn generators(metric: RelativeMetric) -> RelativeGenerators {
    match metric {
        RelativeMetric::InfinityOffDiagonal => RelativeGenerators::None,
        RelativeMetric::WordMetric => RelativeGenerators::FactorGenerators,
    }
}

/// ⟨a⟩ * ⟨b⟩.
pub fn free_ab(metric: RelativeMetric, d: u64) -> ConedSpace {
    let m = GroupModel::new(
        vec![FactorSpec::free(1, names(&["a"])).unwrap(), FactorSpec::free(1, names(&["b"])).unwrap()],
        generators(metric),
    )
    .unwrap();
    ConedSpace::new(m, d, metric).unwrap()
}

/// ℤ² * ⟨t⟩.
pub fn z2_t(metric: RelativeMetric, d: u64) -> ConedSpace {
    let m = GroupModel::new(
        vec![FactorSpec::free_abelian(2, names(&["x", "y"])).unwrap(), FactorSpec::free(1, names(&["t"])).unwrap()],
        generators(metric),
    )
    .unwrap();
    ConedSpace::new(m, d, metric).unwrap()
}

/// ℤ/2 * ℤ/3.
pub fn z2_z3(metric: RelativeMetric) -> ConedSpace {
    let m = GroupModel::new(
        vec![FactorSpec::cyclic(2, "u".into()).unwrap(), FactorSpec::cyclic(3, "v".into()).unwrap()],
        generators(metric),
    )
    .unwrap();
    ConedSpace::new(m, 1, metric).unwrap()
}

pub fn window(radius: usize, truncation: &[u64]) -> Window {
    Window::new(radius, truncation.iter().map(|&t| Some(t)).collect())
}

/// A product of powers of single-letter free factors, e.g. `[(0, 2), (1, -1)]`
/// for a²b⁻¹.
pub fn word(model: &GroupModel, powers: &[(usize, i32)]) -> GroupElement {
    let syllables = powers
        .iter()
        .map(|&(f, e)| {
            let l = if e < 0 { -1 } else { 1 };
            Syllable { factor: f, value: FactorElem::Word((0..e.unsigned_abs()).map(|_| l).collect()) }
        })
        .collect();
    model.from_syllables(syllables).unwrap()
}

pub fn point(model: &GroupModel, factor: usize, coords: &[i64]) -> GroupElement {
    model.factor_element(factor, FactorElem::Vector(coords.iter().copied().collect()))
}
