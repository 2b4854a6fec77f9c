//! Free products of base factors in syllable normal form.

use alloc::collections::{BTreeSet, VecDeque};
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;
use core::fmt::Write;

use smallvec::SmallVec;

use crate::{Error, Result};

/// The four kinds of base factor.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FactorKind {
    /// ℤᵈ with the standard basis as generators.
    FreeAbelian { rank: usize },
    /// ℤ/k with generator 1.
    Cyclic { order: u64 },
    /// Free group on `rank` letters.
    Free { rank: usize },
    /// A finite group given by its multiplication table. Index 0 is the
    /// identity; `generators` are table indices.
    FiniteTable {
        table: Vec<Vec<u32>>,
        generators: Vec<u32>,
        inverses: Vec<u32>,
        lengths: Vec<u32>,
    },
}

/// An element of a single factor.
///
/// Free-group words use signed letters: `g+1` for generator `g`, `-(g+1)`
/// for its inverse.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum FactorElem {
    Vector(SmallVec<[i64; 2]>),
    Residue(u64),
    Word(SmallVec<[i32; 4]>),
    Table(u32),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FactorSpec {
    kind: FactorKind,
    names: Vec<String>,
}

impl FactorSpec {
    pub fn free_abelian(rank: usize, names: Vec<String>) -> Result<Self> {
        if rank == 0 {
            return Err(Error::InvalidFactor("free abelian rank must be at least 1".into()));
        }
        Self::with_names(FactorKind::FreeAbelian { rank }, names, rank)
    }

    pub fn cyclic(order: u64, name: String) -> Result<Self> {
        if order < 2 {
            return Err(Error::InvalidFactor("cyclic order must be at least 2".into()));
        }
        Self::with_names(FactorKind::Cyclic { order }, vec![name], 1)
    }

    pub fn free(rank: usize, names: Vec<String>) -> Result<Self> {
        if rank == 0 {
            return Err(Error::InvalidFactor("free rank must be at least 1".into()));
        }
        Self::with_names(FactorKind::Free { rank }, names, rank)
    }

    /// Validates the table (closure, identity at index 0, inverses and
    /// associativity by enumeration) and precomputes word lengths by BFS.
    pub fn finite_table(table: Vec<Vec<u32>>, generators: Vec<u32>, names: Vec<String>) -> Result<Self> {
        let n = table.len();
        if n < 2 {
            return Err(Error::InvalidFactor("a finite factor needs at least 2 elements".into()));
        }
        if table.iter().any(|row| row.len() != n || row.iter().any(|&x| x as usize >= n)) {
            return Err(Error::InvalidFactor("multiplication table must be square with entries in range".into()));
        }
        for (i, row) in table.iter().enumerate() {
            if row[0] as usize != i || table[0][i] as usize != i {
                return Err(Error::InvalidFactor("index 0 must be the identity of the table".into()));
            }
        }
        let mut inverses = Vec::with_capacity(n);
        for (i, row) in table.iter().enumerate() {
            match row.iter().position(|&x| x == 0) {
                Some(j) if table[j][i] == 0 => inverses.push(j as u32),
                _ => return Err(Error::InvalidFactor("table has an element without inverse".into())),
            }
        }
        for a in 0..n {
            for b in 0..n {
                let ab = table[a][b] as usize;
                for c in 0..n {
                    if table[ab][c] != table[a][table[b][c] as usize] {
                        return Err(Error::InvalidFactor("multiplication table is not associative".into()));
                    }
                }
            }
        }
        if generators.is_empty() || generators.iter().any(|&g| g as usize >= n || g == 0) {
            return Err(Error::InvalidFactor("generators must be non-identity table indices".into()));
        }
        let mut lengths = vec![u32::MAX; n];
        lengths[0] = 0;
        let mut queue = VecDeque::from([0usize]);
        while let Some(x) = queue.pop_front() {
            for &g in &generators {
                for s in [g as usize, inverses[g as usize] as usize] {
                    let y = table[x][s] as usize;
                    if lengths[y] == u32::MAX {
                        lengths[y] = lengths[x] + 1;
                        queue.push_back(y);
                    }
                }
            }
        }
        if lengths.contains(&u32::MAX) {
            return Err(Error::InvalidFactor("declared generators do not generate the table".into()));
        }
        let count = generators.len();
        Self::with_names(FactorKind::FiniteTable { table, generators, inverses, lengths }, names, count)
    }

    fn with_names(kind: FactorKind, names: Vec<String>, expected: usize) -> Result<Self> {
        if names.len() != expected {
            return Err(Error::InvalidFactor(format!("expected {expected} generator names, got {}", names.len())));
        }
        let distinct: BTreeSet<&String> = names.iter().collect();
        if distinct.len() != names.len() || names.iter().any(|s| s.is_empty() || s.contains([' ', '^'])) {
            return Err(Error::InvalidFactor("generator names must be distinct, non-empty, without spaces or '^'".into()));
        }
        Ok(FactorSpec { kind, names })
    }

    pub fn kind(&self) -> &FactorKind {
        &self.kind
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self.kind, FactorKind::FreeAbelian { .. } | FactorKind::Free { .. })
    }

    pub fn generator_count(&self) -> usize {
        self.names.len()
    }

    pub fn identity(&self) -> FactorElem {
        match &self.kind {
            FactorKind::FreeAbelian { rank } => FactorElem::Vector(SmallVec::from_elem(0, *rank)),
            FactorKind::Cyclic { .. } => FactorElem::Residue(0),
            FactorKind::Free { .. } => FactorElem::Word(SmallVec::new()),
            FactorKind::FiniteTable { .. } => FactorElem::Table(0),
        }
    }

    pub fn is_identity(&self, x: &FactorElem) -> bool {
        match x {
            FactorElem::Vector(v) => v.iter().all(|&c| c == 0),
            FactorElem::Residue(r) => *r == 0,
            FactorElem::Word(w) => w.is_empty(),
            FactorElem::Table(t) => *t == 0,
        }
    }

    pub fn validate(&self, x: &FactorElem) -> Result<()> {
        let ok = match (&self.kind, x) {
            (FactorKind::FreeAbelian { rank }, FactorElem::Vector(v)) => v.len() == *rank,
            (FactorKind::Cyclic { order }, FactorElem::Residue(r)) => r < order,
            (FactorKind::Free { rank }, FactorElem::Word(w)) => {
                w.iter().all(|&l| l != 0 && l.unsigned_abs() as usize <= *rank)
                    && w.windows(2).all(|p| p[0] != -p[1])
            }
            (FactorKind::FiniteTable { table, .. }, FactorElem::Table(t)) => (*t as usize) < table.len(),
            _ => false,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::ModelMismatch(format!("{x:?} is not an element of this factor")))
        }
    }

    pub fn mul(&self, a: &FactorElem, b: &FactorElem) -> FactorElem {
        match (&self.kind, a, b) {
            (FactorKind::FreeAbelian { .. }, FactorElem::Vector(x), FactorElem::Vector(y)) => {
                FactorElem::Vector(x.iter().zip(y).map(|(p, q)| p + q).collect())
            }
            (FactorKind::Cyclic { order }, FactorElem::Residue(x), FactorElem::Residue(y)) => {
                FactorElem::Residue((x + y) % order)
            }
            (FactorKind::Free { .. }, FactorElem::Word(x), FactorElem::Word(y)) => {
                let mut out = x.clone();
                for &l in y {
                    if out.last() == Some(&-l) {
                        out.pop();
                    } else {
                        out.push(l);
                    }
                }
                FactorElem::Word(out)
            }
            (FactorKind::FiniteTable { table, .. }, FactorElem::Table(x), FactorElem::Table(y)) => {
                FactorElem::Table(table[*x as usize][*y as usize])
            }
            _ => panic!("factor element kinds do not match the factor"),
        }
    }

    pub fn inv(&self, a: &FactorElem) -> FactorElem {
        match (&self.kind, a) {
            (_, FactorElem::Vector(x)) => FactorElem::Vector(x.iter().map(|c| -c).collect()),
            (FactorKind::Cyclic { order }, FactorElem::Residue(x)) => FactorElem::Residue((order - x) % order),
            (_, FactorElem::Word(w)) => FactorElem::Word(w.iter().rev().map(|l| -l).collect()),
            (FactorKind::FiniteTable { inverses, .. }, FactorElem::Table(t)) => {
                FactorElem::Table(inverses[*t as usize])
            }
            _ => panic!("factor element kinds do not match the factor"),
        }
    }

    /// Length of a shortest word in the declared generators and their inverses.
    pub fn word_length(&self, x: &FactorElem) -> u64 {
        match (&self.kind, x) {
            (_, FactorElem::Vector(v)) => v.iter().map(|c| c.unsigned_abs()).sum(),
            (FactorKind::Cyclic { order }, FactorElem::Residue(r)) => (*r).min(order - r),
            (_, FactorElem::Word(w)) => w.len() as u64,
            (FactorKind::FiniteTable { lengths, .. }, FactorElem::Table(t)) => lengths[*t as usize] as u64,
            _ => panic!("factor element kinds do not match the factor"),
        }
    }

    /// Generator `index` (or its inverse) as a factor element.
    pub fn generator(&self, index: usize, inverse: bool) -> FactorElem {
        let g = match &self.kind {
            FactorKind::FreeAbelian { rank } => {
                let mut v = SmallVec::from_elem(0, *rank);
                v[index] = 1;
                FactorElem::Vector(v)
            }
            FactorKind::Cyclic { .. } => FactorElem::Residue(1),
            FactorKind::Free { .. } => FactorElem::Word(smallvec::smallvec![index as i32 + 1]),
            FactorKind::FiniteTable { generators, .. } => FactorElem::Table(generators[index]),
        };
        if inverse {
            self.inv(&g)
        } else {
            g
        }
    }

    /// The non-identity elements inside the truncation window, sorted.
    ///
    /// The truncation bounds the ℓ∞ norm for free abelian factors and the
    /// reduced length for free factors; finite factors ignore it.
    pub fn window(&self, truncation: Option<u64>) -> Result<Vec<FactorElem>> {
        let mut out = match &self.kind {
            FactorKind::FreeAbelian { rank } => {
                let t = required(truncation)? as i64;
                let mut out = Vec::new();
                let mut v: SmallVec<[i64; 2]> = SmallVec::from_elem(-t, *rank);
                loop {
                    if v.iter().any(|&c| c != 0) {
                        out.push(FactorElem::Vector(v.clone()));
                    }
                    let mut i = 0;
                    while i < *rank && v[i] == t {
                        v[i] = -t;
                        i += 1;
                    }
                    if i == *rank {
                        break;
                    }
                    v[i] += 1;
                }
                out
            }
            FactorKind::Free { rank } => {
                let t = required(truncation)? as usize;
                let mut out = Vec::new();
                let mut layer: Vec<SmallVec<[i32; 4]>> = vec![SmallVec::new()];
                for _ in 0..t {
                    let mut next = Vec::new();
                    for w in &layer {
                        for g in 1..=*rank as i32 {
                            for l in [g, -g] {
                                if w.last() != Some(&-l) {
                                    let mut x = w.clone();
                                    x.push(l);
                                    next.push(x);
                                }
                            }
                        }
                    }
                    out.extend(next.iter().cloned().map(FactorElem::Word));
                    layer = next;
                }
                out
            }
            FactorKind::Cyclic { order } => (1..*order).map(FactorElem::Residue).collect(),
            FactorKind::FiniteTable { table, .. } => (1..table.len() as u32).map(FactorElem::Table).collect(),
        };
        out.sort();
        Ok(out)
    }

    /// Human-readable form, e.g. `a^3 b^-1`, `(3,-4)`, `c^2`, `s[3]`.
    pub fn format(&self, x: &FactorElem) -> String {
        let mut s = String::new();
        match x {
            FactorElem::Vector(v) => {
                s.push('(');
                for (i, c) in v.iter().enumerate() {
                    if i > 0 {
                        s.push(',');
                    }
                    let _ = write!(s, "{c}");
                }
                s.push(')');
            }
            FactorElem::Residue(r) => {
                let _ = write!(s, "{}^{}", self.names[0], r);
            }
            FactorElem::Word(w) => s = self.word_string(w),
            FactorElem::Table(t) => {
                let _ = write!(s, "[{t}]");
            }
        }
        s
    }

    /// Serializes a reduced word as space-separated powers, `a^3 b^-1 a`.
    pub fn word_string(&self, w: &[i32]) -> String {
        let mut out = String::new();
        let mut i = 0;
        while i < w.len() {
            let g = w[i];
            let mut j = i;
            while j < w.len() && w[j] == g {
                j += 1;
            }
            if !out.is_empty() {
                out.push(' ');
            }
            let e = (j - i) as i64 * g.signum() as i64;
            out.push_str(&self.names[g.unsigned_abs() as usize - 1]);
            if e != 1 {
                let _ = write!(out, "^{e}");
            }
            i = j;
        }
        out
    }

    /// Parses the output of [`FactorSpec::word_string`] (powers may be any
    /// nonzero integer, and the word is freely reduced on input).
    pub fn parse_word(&self, text: &str) -> Result<FactorElem> {
        if !matches!(self.kind, FactorKind::Free { .. }) {
            return Err(Error::ModelMismatch("words only encode elements of free factors".into()));
        }
        let mut acc = self.identity();
        for token in text.split_whitespace() {
            let (name, exp) = match token.split_once('^') {
                Some((n, e)) => (
                    n,
                    e.parse::<i64>().map_err(|_| Error::ModelMismatch(format!("bad exponent in {token:?}")))?,
                ),
                None => (token, 1),
            };
            let g = self
                .names
                .iter()
                .position(|n| n == name)
                .ok_or_else(|| Error::ModelMismatch(format!("unknown generator {name:?}")))?;
            let letter = self.generator(g, exp < 0);
            for _ in 0..exp.unsigned_abs() {
                acc = self.mul(&acc, &letter);
            }
        }
        Ok(acc)
    }
}

fn required(truncation: Option<u64>) -> Result<u64> {
    truncation.ok_or_else(|| Error::Config("infinite factor needs a truncation bound for enumeration".into()))
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Syllable {
    pub factor: usize,
    pub value: FactorElem,
}

/// Normal form of an element of the free product: adjacent syllables lie in
/// distinct factors and no syllable is a factor identity. The empty list is
/// the identity.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct GroupElement {
    syllables: Vec<Syllable>,
}

impl GroupElement {
    pub fn identity() -> Self {
        GroupElement { syllables: Vec::new() }
    }

    /// Builds an element without validation. Callers must supply a normal form.
    pub fn from_syllables_unchecked(syllables: Vec<Syllable>) -> Self {
        GroupElement { syllables }
    }

    pub fn syllables(&self) -> &[Syllable] {
        &self.syllables
    }

    pub fn syllable_length(&self) -> usize {
        self.syllables.len()
    }

    pub fn is_identity(&self) -> bool {
        self.syllables.is_empty()
    }

    pub fn first(&self) -> Option<&Syllable> {
        self.syllables.first()
    }

    pub fn last(&self) -> Option<&Syllable> {
        self.syllables.last()
    }

    /// Drops the last syllable when it lies in `factor`.
    pub fn strip_trailing(&self, factor: usize) -> GroupElement {
        match self.syllables.last() {
            Some(s) if s.factor == factor => GroupElement { syllables: self.syllables[..self.syllables.len() - 1].to_vec() },
            _ => self.clone(),
        }
    }

    /// Splits off a leading syllable in `factor`, if there is one.
    pub fn split_leading(&self, factor: usize) -> (Option<&Syllable>, &[Syllable]) {
        match self.syllables.first() {
            Some(s) if s.factor == factor => (Some(s), &self.syllables[1..]),
            _ => (None, &self.syllables[..]),
        }
    }
}

/// Whether the family of factors also contributes its generators to the
/// relative generating set.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RelativeGenerators {
    None,
    FactorGenerators,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GroupModel {
    factors: Vec<FactorSpec>,
    generators: RelativeGenerators,
}

/// A finite enumeration window: syllable radius plus one truncation bound per
/// factor (`None` is only allowed for finite factors).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Window {
    pub radius: usize,
    pub truncation: Vec<Option<u64>>,
}

impl Window {
    pub fn new(radius: usize, truncation: Vec<Option<u64>>) -> Self {
        Window { radius, truncation }
    }

    pub fn with_radius(&self, radius: usize) -> Self {
        Window { radius, truncation: self.truncation.clone() }
    }

    pub fn truncation(&self, factor: usize) -> Option<u64> {
        self.truncation.get(factor).copied().flatten()
    }
}

impl GroupModel {
    pub fn new(factors: Vec<FactorSpec>, generators: RelativeGenerators) -> Result<Self> {
        if factors.len() < 2 {
            return Err(Error::InvalidModel("the family must have at least two factors".into()));
        }
        Ok(GroupModel { factors, generators })
    }

    pub fn factors(&self) -> &[FactorSpec] {
        &self.factors
    }

    pub fn factor(&self, index: usize) -> &FactorSpec {
        &self.factors[index]
    }

    pub fn relative_generators(&self) -> RelativeGenerators {
        self.generators
    }

    pub fn validate(&self, g: &GroupElement) -> Result<()> {
        for (i, s) in g.syllables.iter().enumerate() {
            let f = self
                .factors
                .get(s.factor)
                .ok_or_else(|| Error::ModelMismatch(format!("factor index {} out of range", s.factor)))?;
            f.validate(&s.value)?;
            if f.is_identity(&s.value) {
                return Err(Error::ModelMismatch("syllable equal to a factor identity".into()));
            }
            if i > 0 && g.syllables[i - 1].factor == s.factor {
                return Err(Error::ModelMismatch("adjacent syllables in the same factor".into()));
            }
        }
        Ok(())
    }

    /// Builds a normal form from arbitrary syllables, merging and cancelling.
    pub fn from_syllables(&self, syllables: Vec<Syllable>) -> Result<GroupElement> {
        let mut out = GroupElement::identity();
        for s in syllables {
            let f = self
                .factors
                .get(s.factor)
                .ok_or_else(|| Error::ModelMismatch(format!("factor index {} out of range", s.factor)))?;
            f.validate(&s.value)?;
            self.push_syllable(&mut out, s);
        }
        Ok(out)
    }

    /// The element of factor `factor` with the given value.
    pub fn factor_element(&self, factor: usize, value: FactorElem) -> GroupElement {
        if self.factors[factor].is_identity(&value) {
            GroupElement::identity()
        } else {
            GroupElement { syllables: vec![Syllable { factor, value }] }
        }
    }

    /// The factor value of `g` when `g` lies in the factor subgroup.
    pub fn in_factor(&self, g: &GroupElement, factor: usize) -> Option<FactorElem> {
        match g.syllables.as_slice() {
            [] => Some(self.factors[factor].identity()),
            [s] if s.factor == factor => Some(s.value.clone()),
            _ => None,
        }
    }

    fn push_syllable(&self, out: &mut GroupElement, s: Syllable) {
        match out.syllables.last_mut() {
            Some(last) if last.factor == s.factor => {
                let f = &self.factors[s.factor];
                let merged = f.mul(&last.value, &s.value);
                if f.is_identity(&merged) {
                    out.syllables.pop();
                } else {
                    last.value = merged;
                }
            }
            _ => {
                if !self.factors[s.factor].is_identity(&s.value) {
                    out.syllables.push(s);
                }
            }
        }
    }

    /// Product of two normal forms, without validating the inputs.
    pub fn mul(&self, a: &GroupElement, b: &GroupElement) -> GroupElement {
        let mut out = GroupElement { syllables: Vec::with_capacity(a.syllables.len() + b.syllables.len()) };
        out.syllables.extend_from_slice(&a.syllables);
        for s in &b.syllables {
            self.push_syllable(&mut out, s.clone());
        }
        out
    }

    /// Product of two normal forms; both must belong to this model.
    pub fn multiply(&self, a: &GroupElement, b: &GroupElement) -> Result<GroupElement> {
        self.validate(a)?;
        self.validate(b)?;
        Ok(self.mul(a, b))
    }

    pub fn inverse(&self, a: &GroupElement) -> GroupElement {
        GroupElement {
            syllables: a
                .syllables
                .iter()
                .rev()
                .map(|s| Syllable { factor: s.factor, value: self.factors[s.factor].inv(&s.value) })
                .collect(),
        }
    }

    /// `a⁻¹ b`.
    pub fn left_quotient(&self, a: &GroupElement, b: &GroupElement) -> GroupElement {
        // Cancel the common prefix first; only the first differing syllables can merge.
        let common = a.syllables.iter().zip(&b.syllables).take_while(|(x, y)| x == y).count();
        let mut out = GroupElement {
            syllables: a.syllables[common..]
                .iter()
                .rev()
                .map(|s| Syllable { factor: s.factor, value: self.factors[s.factor].inv(&s.value) })
                .collect(),
        };
        for s in &b.syllables[common..] {
            self.push_syllable(&mut out, s.clone());
        }
        out
    }

    /// Word length with respect to the union of the factor generating sets.
    pub fn word_length(&self, g: &GroupElement) -> u64 {
        g.syllables.iter().map(|s| self.factors[s.factor].word_length(&s.value)).sum()
    }

    /// Whether every syllable value of `g` lies inside the window truncation.
    pub fn within_truncation(&self, g: &GroupElement, window: &Window) -> bool {
        g.syllables.iter().all(|s| match (&s.value, window.truncation(s.factor)) {
            (FactorElem::Vector(v), Some(t)) => v.iter().all(|c| c.unsigned_abs() <= t),
            (FactorElem::Word(w), Some(t)) => w.len() as u64 <= t,
            (FactorElem::Vector(_) | FactorElem::Word(_), None) => false,
            _ => true,
        })
    }

    /// All elements of syllable length at most `window.radius` whose
    /// syllables lie in the per-factor truncation windows, ordered by
    /// syllable length and then lexicographically.
    pub fn enumerate_ball(&self, window: &Window) -> Result<Vec<GroupElement>> {
        let factor_windows = self
            .factors
            .iter()
            .enumerate()
            .map(|(i, f)| f.window(window.truncation(i)))
            .collect::<Result<Vec<_>>>()?;
        let mut out = vec![GroupElement::identity()];
        let mut layer = vec![GroupElement::identity()];
        for _ in 0..window.radius {
            let mut next = Vec::new();
            for g in &layer {
                let last = g.last().map(|s| s.factor);
                for (i, values) in factor_windows.iter().enumerate() {
                    if Some(i) == last {
                        continue;
                    }
                    for v in values {
                        let mut syllables = g.syllables.clone();
                        syllables.push(Syllable { factor: i, value: v.clone() });
                        next.push(GroupElement { syllables });
                    }
                }
            }
            next.sort();
            out.extend(next.iter().cloned());
            layer = next;
        }
        Ok(out)
    }

    /// Human-readable form; factors are joined by `*`.
    pub fn format(&self, g: &GroupElement) -> String {
        if g.is_identity() {
            return "1".to_string();
        }
        let parts: Vec<String> = g.syllables.iter().map(|s| self.factors[s.factor].format(&s.value)).collect();
        parts.join("*")
    }
}
