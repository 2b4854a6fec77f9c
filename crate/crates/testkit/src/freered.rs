//! Letter-by-letter free reduction for free products of free factors.

use hypemb_core::group::{FactorElem, GroupElement, GroupModel, Syllable};

/// (factor, signed letter)
pub type Letter = (usize, i32);

pub fn letters(g: &GroupElement) -> Vec<Letter> {
    let mut out = Vec::new();
    for s in g.syllables() {
        match &s.value {
            FactorElem::Word(w) => out.extend(w.iter().map(|&l| (s.factor, l))),
            other => panic!("free reduction oracle only handles free factors, got {other:?}"),
        }
    }
    out
}

pub fn reduce(word: &[Letter]) -> Vec<Letter> {
    let mut stack: Vec<Letter> = Vec::new();
    for &(f, l) in word {
        if stack.last() == Some(&(f, -l)) {
            stack.pop();
        } else {
            stack.push((f, l));
        }
    }
    stack
}

pub fn to_element(model: &GroupModel, reduced: &[Letter]) -> GroupElement {
    let mut syllables: Vec<Syllable> = Vec::new();
    for &(f, l) in reduced {
        match syllables.last_mut() {
            Some(Syllable { factor, value: FactorElem::Word(w) }) if *factor == f => w.push(l),
            _ => syllables.push(Syllable { factor: f, value: FactorElem::Word(std::iter::once(l).collect()) }),
        }
    }
    let g = GroupElement::from_syllables_unchecked(syllables);
    model.validate(&g).expect("reduced words give normal forms");
    g
}

pub fn product(model: &GroupModel, a: &GroupElement, b: &GroupElement) -> GroupElement {
    let mut w = letters(a);
    w.extend(letters(b));
    to_element(model, &reduce(&w))
}
