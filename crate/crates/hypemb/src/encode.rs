//! JSON encodings of elements, cosets, rationals and edge functions.

use anyhow::{anyhow, bail, Context, Result};
use hypemb_core::group::{FactorElem, FactorKind, GroupElement, GroupModel, Syllable};
use hypemb_core::{Coset, Dist, EdgeFunction, ModuleVector, NormSq, Rational};
use serde_json::{json, Value};

/// Rationals are always written as "p/q".
pub fn rational(x: &Rational) -> Value {
    Value::String(format!("{}/{}", x.numer(), x.denom()))
}

pub fn parse_rational(v: &Value) -> Result<Rational> {
    match v {
        Value::Number(n) => Ok(Rational::from_integer(n.as_i64().ok_or_else(|| anyhow!("expected an integer, got {n}"))? as i128)),
        Value::String(s) => {
            let (p, q) = match s.split_once('/') {
                Some((p, q)) => (p.trim(), q.trim()),
                None => (s.trim(), "1"),
            };
            let p: i128 = p.parse().with_context(|| format!("bad rational {s:?}"))?;
            let q: i128 = q.parse().with_context(|| format!("bad rational {s:?}"))?;
            if q == 0 {
                bail!("zero denominator in {s:?}");
            }
            Ok(Rational::new(p, q))
        }
        other => bail!("expected a rational, got {other}"),
    }
}

pub fn dist(d: &Dist) -> Value {
    match d {
        Dist::Finite(x) => rational(x),
        Dist::Infinite => Value::String("inf".into()),
    }
}

/// A squared norm, with the norm itself when it is rational.
pub fn norm(n: &NormSq) -> Value {
    json!({
        "squared": rational(&n.value()),
        "norm": n.sqrt().map(|r| rational(&r)).unwrap_or(Value::Null),
    })
}

pub fn factor_value(model: &GroupModel, factor: usize, x: &FactorElem) -> Value {
    match x {
        FactorElem::Vector(v) => json!(v.as_slice()),
        FactorElem::Residue(r) => json!(r),
        FactorElem::Word(w) => Value::String(model.factor(factor).word_string(w)),
        FactorElem::Table(t) => json!(t),
    }
}

pub fn element(model: &GroupModel, g: &GroupElement) -> Value {
    Value::Array(g.syllables().iter().map(|s| json!([s.factor, factor_value(model, s.factor, &s.value)])).collect())
}

pub fn tuple(model: &GroupModel, t: &[GroupElement]) -> Value {
    Value::Array(t.iter().map(|g| element(model, g)).collect())
}

pub fn parse_factor_value(model: &GroupModel, factor: usize, v: &Value) -> Result<FactorElem> {
    let f = model.factors().get(factor).ok_or_else(|| anyhow!("factor index {factor} out of range"))?;
    let x = match (f.kind(), v) {
        (FactorKind::FreeAbelian { .. }, Value::Array(items)) => FactorElem::Vector(
            items.iter().map(|c| c.as_i64().ok_or_else(|| anyhow!("vector entries must be integers"))).collect::<Result<_>>()?,
        ),
        (FactorKind::Cyclic { order }, Value::Number(n)) => {
            let r = n.as_i64().ok_or_else(|| anyhow!("residues must be integers"))?;
            FactorElem::Residue(r.rem_euclid(*order as i64) as u64)
        }
        (FactorKind::Free { .. }, Value::String(s)) => f.parse_word(s)?,
        (FactorKind::FiniteTable { .. }, Value::Number(n)) => {
            FactorElem::Table(n.as_u64().ok_or_else(|| anyhow!("table indices must be non-negative"))? as u32)
        }
        (_, other) => bail!("value {other} does not encode an element of factor {factor}"),
    };
    f.validate(&x)?;
    Ok(x)
}

pub fn parse_element(model: &GroupModel, v: &Value) -> Result<GroupElement> {
    let items = v.as_array().ok_or_else(|| anyhow!("elements are arrays of [factor, value] pairs"))?;
    let mut syllables = Vec::with_capacity(items.len());
    for item in items {
        let pair = item.as_array().filter(|p| p.len() == 2).ok_or_else(|| anyhow!("bad syllable {item}"))?;
        let factor = pair[0].as_u64().ok_or_else(|| anyhow!("bad factor index {}", pair[0]))? as usize;
        syllables.push(Syllable { factor, value: parse_factor_value(model, factor, &pair[1])? });
    }
    Ok(model.from_syllables(syllables)?)
}

pub fn parse_tuple(model: &GroupModel, v: &Value) -> Result<Vec<GroupElement>> {
    v.as_array().ok_or_else(|| anyhow!("tuples are arrays of elements"))?.iter().map(|g| parse_element(model, g)).collect()
}

pub fn coset(model: &GroupModel, b: &Coset) -> Value {
    json!({"factor": b.factor, "rep": element(model, &b.rep)})
}

pub fn parse_coset(model: &GroupModel, v: &Value) -> Result<Coset> {
    let factor = v.get("factor").and_then(Value::as_u64).ok_or_else(|| anyhow!("coset needs a factor index"))? as usize;
    if factor >= model.factors().len() {
        bail!("factor index {factor} out of range");
    }
    let rep = parse_element(model, v.get("rep").ok_or_else(|| anyhow!("coset needs a rep"))?)?;
    Ok(Coset::of(factor, &rep))
}

pub fn edge_function(model: &GroupModel, f: &EdgeFunction) -> Value {
    Value::Array(
        f.iter()
            .map(|(e, w)| {
                let name = &model.factor(e.factor).names()[e.generator];
                let generator = if e.inverse { format!("{name}^-1") } else { name.clone() };
                json!([element(model, &e.origin), generator, rational(w)])
            })
            .collect(),
    )
}

pub fn module_vector(model: &GroupModel, v: &ModuleVector) -> Value {
    match v {
        ModuleVector::Scalar(x) => rational(x),
        ModuleVector::Edges(f) => edge_function(model, f),
    }
}
