//! The CLI commands. Each one turns a loaded configuration into a JSON
//! report with a top-level pass flag.

use std::path::PathBuf;

use anyhow::{anyhow, bail, Result};
use hypemb_core::bbf::{check_axioms, klgs_diagnostic, BbfReport, KlgsRow};
use hypemb_core::checks::{cosets_with_reps, format_coset, CheckOutcome};
use hypemb_core::cochain::{Cochain, CochainSpec};
use hypemb_core::extension::BoundCheck;
use hypemb_core::group::{FactorKind, GroupElement, GroupModel};
use hypemb_core::rational::int;
use hypemb_core::{Chain, Coset, Extension, Rational};
use serde_json::{json, Map, Value};

use crate::config::{ConfigError, Loaded};
use crate::encode;
use crate::sweeps;

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Command {
    VerifyGeometry,
    VerifyExtension,
    Trace,
    Theta,
    ReconstructGeneral,
    ReconstructZn,
    BbfCheck,
    RemarkCup,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::VerifyGeometry => "verify-geometry",
            Command::VerifyExtension => "verify-extension",
            Command::Trace => "trace",
            Command::Theta => "theta",
            Command::ReconstructGeneral => "reconstruct-general",
            Command::ReconstructZn => "reconstruct-zn",
            Command::BbfCheck => "bbf-check",
            Command::RemarkCup => "remark-cup",
        }
    }
}

#[derive(Clone, Debug)]
pub struct Options {
    pub seed: u64,
    pub jobs: usize,
    /// Tuple file for `trace` and `theta`.
    pub input: Option<PathBuf>,
}

impl Default for Options {
    fn default() -> Self {
        Options { seed: 0, jobs: 1, input: None }
    }
}

pub struct Report {
    pub pass: bool,
    pub body: Value,
    /// Extra CSV output, when the command produces one.
    pub csv: Option<String>,
}

impl Report {
    fn new(command: Command, pass: bool, mut fields: Map<String, Value>) -> Report {
        fields.insert("command".into(), json!(command.name()));
        fields.insert("pass".into(), json!(pass));
        Report { pass, body: Value::Object(fields), csv: None }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(&self.body).expect("reports serialize");
        s.push('\n');
        s
    }
}

pub fn run(command: Command, loaded: &Loaded, opts: &Options) -> Result<Report> {
    match command {
        Command::VerifyGeometry => verify_geometry(loaded, opts),
        Command::VerifyExtension => verify_extension(loaded, opts),
        Command::Trace => trace(loaded, opts),
        Command::Theta => theta(loaded, opts),
        Command::ReconstructGeneral => reconstruct_general(loaded, opts),
        Command::ReconstructZn => reconstruct_zn(loaded, opts),
        Command::BbfCheck => bbf_check(loaded, opts),
        Command::RemarkCup => remark_cup(loaded),
    }
}

fn radius_param(loaded: &Loaded, key: &str, default: usize) -> Result<usize> {
    Ok(loaded.param_u64(key, default as u64)? as usize)
}

fn ball(loaded: &Loaded, radius: usize) -> Result<Vec<GroupElement>> {
    Ok(loaded.model().enumerate_ball(&loaded.window.with_radius(radius))?)
}

pub fn outcome_row(c: &CheckOutcome) -> Value {
    json!({
        "check": c.name,
        "property": c.property,
        "checked": c.checked,
        "violations": c.violations,
        "observed_max": c.max_observed.map(|r| encode::rational(&r)),
        "witness_tuple": c.witness,
        "pass": c.pass(),
    })
}

pub fn bound_row(model: &GroupModel, name: &str, property: &str, c: &BoundCheck) -> Value {
    json!({
        "check": name,
        "property": property,
        "checked": c.checked,
        "violations": c.violations,
        "bound": c.bound.map(|b| encode::norm(&b)),
        "observed_max": encode::norm(&c.observed),
        "witness_tuple": c.witness.as_ref().map(|t| encode::tuple(model, t)),
        "pass": c.pass(),
    })
}

fn fields(v: Value) -> Map<String, Value> {
    match v {
        Value::Object(m) => m,
        _ => unreachable!("fields are built from objects"),
    }
}

/// Geometry of projections on the window. The pair sweep uses the whole
/// ball, the triple and coset sweeps smaller balls set by params.
pub fn geometry_window(loaded: &Loaded) -> Result<sweeps::GeometryWindow> {
    let r = loaded.window.radius;
    let space = &loaded.space;
    let below = r.saturating_sub(1);
    let coset_points = ball(loaded, radius_param(loaded, "coset_radius", below)?)?;
    let gate_points = ball(loaded, radius_param(loaded, "gate_radius", below.min(2))?)?;
    let triple_first = ball(loaded, radius_param(loaded, "triple_radius", below.min(2))?)?;
    let triple_second = ball(loaded, radius_param(loaded, "triple_second_radius", below.min(2))?)?;
    let translations = ball(loaded, radius_param(loaded, "translation_radius", 1)?)?;
    let translated_points = ball(loaded, radius_param(loaded, "translated_radius", r.min(2))?)?;
    let translated_reps = ball(loaded, radius_param(loaded, "translated_coset_radius", 1)?)?;
    Ok(sweeps::GeometryWindow {
        pair_points: ball(loaded, r)?,
        cosets: cosets_with_reps(space, &coset_points),
        gate_cosets: cosets_with_reps(space, &gate_points),
        triple_first,
        triple_second,
        translations,
        translated_points,
        translated_cosets: cosets_with_reps(space, &translated_reps),
    })
}

fn verify_geometry(loaded: &Loaded, opts: &Options) -> Result<Report> {
    let w = geometry_window(loaded)?;
    let checks = sweeps::geometry(&loaded.space, &w, opts.jobs);
    let rows: Vec<Value> = checks.outcomes().iter().map(|c| outcome_row(c)).collect();
    let body = json!({
        "radius": loaded.window.radius,
        "pair_points": w.pair_points.len(),
        "cosets": w.cosets.len(),
        "rows": rows,
    });
    Ok(Report::new(Command::VerifyGeometry, checks.pass(), fields(body)))
}

pub fn extension_window(loaded: &Loaded, opts: &Options) -> Result<sweeps::ExtensionWindow> {
    let model = loaded.model();
    let group_points = ball(loaded, radius_param(loaded, "tuple_radius", loaded.window.radius)?)?;
    let mut factor_points = Vec::new();
    for (i, f) in model.factors().iter().enumerate() {
        let t = match loaded.params.get("factor_truncation") {
            Some(v) => Some(v.as_u64().ok_or_else(|| ConfigError::new("params.factor_truncation must be an integer"))?),
            None => loaded.window.truncation(i),
        };
        let mut pts = vec![GroupElement::identity()];
        pts.extend(f.window(t)?.into_iter().map(|x| model.factor_element(i, x)));
        factor_points.push(pts);
    }
    Ok(sweeps::ExtensionWindow {
        group_points,
        factor_points,
        skip_coboundary: loaded.params.get("skip_coboundary").and_then(Value::as_bool).unwrap_or(false),
        alternation_samples: loaded.param_u64("alternation_samples", 200)? as usize,
        seed: opts.seed,
    })
}

pub fn extension_rows(model: &GroupModel, s: &sweeps::ExtensionSweep) -> Vec<Value> {
    let r = &s.report;
    vec![
        bound_row(model, "support", "values on factor tuples lie in the factor module", &r.support),
        bound_row(model, "restriction", "Θφ differs from φ by at most K on factor tuples", &r.restriction),
        bound_row(model, "restriction_exact", "Θφ equals φ' on factor tuples", &r.restriction_exact),
        bound_row(model, "sup", "‖Θφ‖ ≤ n(n+1)·max traced ‖φ‖", &r.sup),
        bound_row(model, "quasi_chain", "‖δΘφ − Θ(δφ)‖ ≤ 2(n+1)(n+2)K", &r.quasi_chain),
        bound_row(model, "defect", "‖δΘφ‖ ≤ (n+1)(n+2)(D(φ)+2K)", &r.defect),
        bound_row(model, "coboundary_restriction", "‖δΘφ − δφ‖ ≤ (n+1)K on factor tuples", &r.coboundary_restriction),
        bound_row(model, "alternation", "Θφ(σḡ) = sgn(σ)Θφ(ḡ)", &s.alternation),
    ]
}

fn verify_extension(loaded: &Loaded, opts: &Options) -> Result<Report> {
    let family = loaded.family()?;
    let w = extension_window(loaded, opts)?;
    let s = sweeps::extension(&loaded.space, family, &loaded.window, &w, opts.jobs)?;
    let model = loaded.model();
    let body = json!({
        "degree": s.report.degree,
        "k": encode::norm(&s.report.k),
        "windowed_defect": encode::norm(&s.report.windowed_defect),
        "tuple_points": w.group_points.len(),
        "rows": extension_rows(model, &s),
    });
    Ok(Report::new(Command::VerifyExtension, s.pass(), fields(body)))
}

fn input_tuples(loaded: &Loaded, opts: &Options) -> Result<Option<Vec<Vec<GroupElement>>>> {
    let value = match (&opts.input, loaded.params.get("tuples")) {
        (Some(path), _) => {
            let text = std::fs::read_to_string(path).map_err(|e| ConfigError::new(format!("reading {}: {e}", path.display())))?;
            serde_json::from_str(&text).map_err(|e| ConfigError::new(format!("parsing {}: {e}", path.display())))?
        }
        (None, Some(v)) => v.clone(),
        (None, None) => return Ok(None),
    };
    let items = value.as_array().ok_or_else(|| ConfigError::new("the tuple file holds an array of tuples"))?;
    let tuples = items
        .iter()
        .map(|t| encode::parse_tuple(loaded.model(), t).map_err(|e| ConfigError::new(format!("{e:#}")).into()))
        .collect::<Result<Vec<_>>>()?;
    Ok(Some(tuples))
}

fn chain_json(model: &GroupModel, c: &Chain) -> Value {
    Value::Array(c.terms().map(|(s, w)| json!([encode::tuple(model, s.vertices()), encode::rational(w)])).collect())
}

fn trace(loaded: &Loaded, opts: &Options) -> Result<Report> {
    let space = &loaded.space;
    let model = loaded.model();
    let Some(tuples) = input_tuples(loaded, opts)? else {
        let points = ball(loaded, loaded.window.radius)?;
        let r = sweeps::traces(space, &points, opts.jobs)?;
        let histogram: Map<String, Value> = r.histogram.iter().map(|(k, v)| (k.to_string(), json!(v))).collect();
        let body = json!({
            "radius": loaded.window.radius,
            "points": points.len(),
            "nondegenerate_histogram": histogram,
            "rows": [outcome_row(&r.natmost), outcome_row(&r.almost_chain), outcome_row(&r.trace_norm)],
        });
        return Ok(Report::new(Command::Trace, r.pass(), fields(body)));
    };
    let mut results = Vec::new();
    for t in &tuples {
        let relevant = space.relevant_cosets(t);
        let traces: Vec<Value> = relevant
            .iter()
            .map(|b| json!({"coset": encode::coset(model, b), "trace": chain_json(model, &space.trace(t, b))}))
            .collect();
        let nondegenerate: Vec<Value> = space.nondegenerate_trace_cosets(t).iter().map(|b| encode::coset(model, b)).collect();
        results.push(json!({
            "tuple": encode::tuple(model, t),
            "small": space.is_small(t),
            "traces": traces,
            "nondegenerate_cosets": nondegenerate,
        }));
    }
    Ok(Report::new(Command::Trace, true, fields(json!({"results": results}))))
}

fn theta(loaded: &Loaded, opts: &Options) -> Result<Report> {
    let family = loaded.family()?;
    let model = loaded.model();
    let tuples = input_tuples(loaded, opts)?.ok_or_else(|| ConfigError::new("theta needs --input or params.tuples"))?;
    let ext = Extension::new(&loaded.space, family);
    let mut results = Vec::new();
    for t in &tuples {
        if t.len() != family.degree() + 1 {
            return Err(ConfigError::new(format!("tuples must have {} entries", family.degree() + 1)).into());
        }
        let v = ext.theta_detailed(t)?;
        results.push(json!({
            "tuple": encode::tuple(model, t),
            "value": encode::module_vector(model, &v.value),
            "nondegenerate_cosets": v.nondegenerate,
            "max_term": encode::norm(&v.max_term),
        }));
    }
    Ok(Report::new(Command::Theta, true, fields(json!({"results": results}))))
}

fn factor_param(loaded: &Loaded) -> Result<usize> {
    let f = loaded.param_u64("factor", 0)? as usize;
    if f >= loaded.model().factors().len() {
        return Err(ConfigError::new(format!("params.factor {f} out of range")).into());
    }
    Ok(f)
}

/// Cosets gH_λ with g in the ball of radius `params.coset_radius`.
fn target_cosets(loaded: &Loaded, factor: usize, default_radius: usize) -> Result<Vec<Coset>> {
    let reps = ball(loaded, radius_param(loaded, "coset_radius", default_radius)?)?;
    let mut cosets: Vec<Coset> = reps.iter().map(|g| Coset::of(factor, g)).collect();
    cosets.sort();
    cosets.dedup();
    Ok(cosets)
}

fn max_rows(loaded: &Loaded) -> Result<usize> {
    Ok(loaded.param_u64("max_rows", 50)? as usize)
}

fn reconstruct_general(loaded: &Loaded, opts: &Options) -> Result<Report> {
    let model = loaded.model();
    let factor = factor_param(loaded)?;
    let cosets = target_cosets(loaded, factor, loaded.window.radius.saturating_sub(2))?;
    let points = ball(loaded, loaded.window.radius)?;
    let r = sweeps::general_recovery(&loaded.space, &cosets, &points, max_rows(loaded)?, opts.jobs)?;
    let rows: Vec<Value> = r
        .rows
        .iter()
        .map(|row| {
            json!({
                "target_coset": encode::coset(model, &row.coset),
                "input_point": encode::element(model, &row.point),
                "n_or_m_used": row.n,
                "recovered": encode::tuple(model, &row.recovered),
                "oracle": encode::tuple(model, &row.oracle),
                "vertex_value": row.value.map(|v| encode::rational(&v)),
                "distance_gap": encode::rational(&row.expected_value),
                "growth_floor": encode::rational(&row.growth_floor),
                "match": row.matches(),
            })
        })
        .collect();
    let body = json!({
        "cosets": cosets.len(),
        "points": points.len(),
        "checked": r.checked,
        "mismatches": r.mismatches,
        "value_mismatches": r.value_mismatches,
        "growth_violations": r.growth_violations,
        "max_n": r.max_n,
        "rows": rows,
    });
    Ok(Report::new(Command::ReconstructGeneral, r.pass(), fields(body)))
}

fn reconstruct_zn(loaded: &Loaded, opts: &Options) -> Result<Report> {
    let model = loaded.model();
    let factor = factor_param(loaded)?;
    if !matches!(model.factor(factor).kind(), FactorKind::FreeAbelian { .. }) {
        return Err(ConfigError::new("reconstruct-zn needs a free abelian factor").into());
    }
    let reps: Vec<GroupElement> =
        target_cosets(loaded, factor, 1)?.into_iter().map(|c| c.rep).collect();
    let points = ball(loaded, loaded.window.radius)?;
    let r = sweeps::zn_recovery(&loaded.space, factor, &reps, &points, max_rows(loaded)?, opts.jobs)?;
    let rows: Vec<Value> = r
        .rows
        .iter()
        .map(|row| {
            json!({
                "target_coset": encode::coset(model, &Coset::of(factor, &row.g)),
                "input_point": encode::element(model, &row.point),
                "n_or_m_used": [row.m.0, row.m.1],
                "recovered": [encode::element(model, &row.recovered.0), encode::element(model, &row.recovered.1)],
                "oracle": encode::element(model, &row.oracle),
                "match": row.matches(),
            })
        })
        .collect();
    let body = json!({
        "cosets": reps.len(),
        "points": points.len(),
        "checked": r.checked,
        "mismatches": r.mismatches,
        "unstable": r.unstable,
        "max_m": r.max_m,
        "rows": rows,
    });
    Ok(Report::new(Command::ReconstructZn, r.pass(), fields(body)))
}

/// Anchors, cosets and window elements for the projection axioms.
pub fn bbf_window(loaded: &Loaded) -> Result<(Vec<Coset>, Vec<Coset>, Vec<GroupElement>)> {
    let n = loaded.model().factors().len();
    let anchors: Vec<Coset> = (0..n).map(Coset::subgroup).collect();
    let reps = ball(loaded, radius_param(loaded, "coset_radius", loaded.window.radius.saturating_sub(1))?)?;
    let cosets = cosets_with_reps(&loaded.space, &reps);
    Ok((anchors, cosets, ball(loaded, loaded.window.radius)?))
}

fn csv_tables(report: &BbfReport, klgs: &[KlgsRow]) -> String {
    let mut s = String::from("table,key,value\n");
    for (count, pairs) in &report.axiom4_counts {
        s.push_str(&format!("axiom4_count,{count},{pairs}\n"));
    }
    for row in klgs {
        s.push_str(&format!("klgs_max_diam,{},{}\n", row.radius, row.max_diam));
        s.push_str(&format!("klgs_k,{},{}\n", row.radius, row.k));
    }
    s
}

fn bbf_check(loaded: &Loaded, _opts: &Options) -> Result<Report> {
    let space = &loaded.space;
    let xi = match loaded.params.get("xi") {
        Some(v) => encode::parse_rational(v).map_err(|e| ConfigError::new(format!("params.xi: {e:#}")))?,
        None => space.d(),
    };
    let (anchors, cosets, elements) = bbf_window(loaded)?;
    let report = check_axioms(space, &anchors, &cosets, xi)?;
    let klgs = klgs_diagnostic(space, &anchors, &cosets, &elements, loaded.param_u64("klgs_radius", 3)?)?;
    let counts: Map<String, Value> = report.axiom4_counts.iter().map(|(k, v)| (k.to_string(), json!(v))).collect();
    let witness = |w: &Option<(Coset, Coset)>| w.as_ref().map(|(a, b)| json!([format_coset(space, a), format_coset(space, b)]));
    let body = json!({
        "xi": encode::rational(&report.xi),
        "cosets": cosets.len(),
        "rows": [
            {"check": "gate_singletons", "property": "gates have diameter below ξ", "observed_max": encode::rational(&report.axiom0_max), "pass": report.pass0()},
            {"check": "projection_min", "property": "min(d_Y(X,Z), d_Z(X,Y)) ≤ ξ", "observed_max": encode::rational(&report.axiom3_min_max),
             "checked": report.axiom3_triples,
             "witness_tuple": report.axiom3_witness.as_ref().map(|(y, x, z)| json!([format_coset(space, y), format_coset(space, x), format_coset(space, z)])),
             "pass": report.pass3()},
            {"check": "finite_large_projections", "property": "|{Y : d_Y(X,Z) ≥ D}| matches the separating cosets", "checked": report.axiom4_pairs,
             "mismatches": report.axiom4_mismatches, "over_bound": report.axiom4_over_bound, "counts": counts, "pass": report.pass4()},
        ],
        "minimal_xi": encode::rational(&report.axiom3_min_max),
        "klgs": klgs.iter().map(|r| json!({"radius": r.radius, "max_diam": r.max_diam, "k": encode::rational(&r.k), "witness": witness(&r.witness)})).collect::<Vec<_>>(),
    });
    let mut out = Report::new(Command::BbfCheck, report.pass(), fields(body));
    out.csv = Some(csv_tables(&report, &klgs));
    Ok(out)
}

/// (α∪β)(1, bⁿ, aⁿ) and (α∪β)(aⁿ, 1, bⁿ) for a = e₁, b = e₂ of a rank-2
/// free abelian factor.
pub fn remark_cup_rows(model: &GroupModel, factor: usize, up_to: i64) -> Result<Vec<(i64, Rational, Rational)>> {
    if !matches!(model.factor(factor).kind(), FactorKind::FreeAbelian { rank: 2 }) {
        bail!(ConfigError::new("remark-cup needs a rank-2 free abelian factor"));
    }
    let cup = CochainSpec::cup(model, factor, vec![int(1), int(0)], vec![int(0), int(1)])?;
    let pt = |x: i64, y: i64| model.factor_element(factor, hypemb_core::FactorElem::Vector([x, y].into_iter().collect()));
    let scalar = |t: &[GroupElement]| -> Result<Rational> {
        cup.evaluate_simplex(model, t)?.as_scalar().ok_or_else(|| anyhow!("scalar cochain"))
    };
    (1..=up_to)
        .map(|n| {
            let (one, a, b) = (GroupElement::identity(), pt(n, 0), pt(0, n));
            Ok((n, scalar(&[one.clone(), b.clone(), a.clone()])?, scalar(&[a, one, b])?))
        })
        .collect()
}

fn remark_cup(loaded: &Loaded) -> Result<Report> {
    let factor = factor_param(loaded)?;
    let up_to = loaded.param_u64("n_max", 10)? as i64;
    let rows = remark_cup_rows(loaded.model(), factor, up_to)?;
    let mut pass = true;
    let json_rows: Vec<Value> = rows
        .iter()
        .map(|(n, first, second)| {
            let ok = *first == int(0) && *second == int(-(*n as i128) * (*n as i128));
            pass &= ok;
            json!({
                "n": n,
                "cup_1_bn_an": encode::rational(first),
                "cup_an_1_bn": encode::rational(second),
                "expected": [encode::rational(&int(0)), encode::rational(&int(-(*n as i128) * (*n as i128)))],
                "pass": ok,
            })
        })
        .collect();
    Ok(Report::new(Command::RemarkCup, pass, fields(json!({"rows": json_rows}))))
}

/// True when an error came from invalid input rather than a failed run.
pub fn is_config_error(e: &anyhow::Error) -> bool {
    use hypemb_core::Error as E;
    e.chain().any(|c| {
        c.downcast_ref::<ConfigError>().is_some()
            || matches!(
                c.downcast_ref::<E>(),
                Some(
                    E::ModelMismatch(_)
                        | E::InvalidFactor(_)
                        | E::InvalidModel(_)
                        | E::InvalidSpace(_)
                        | E::Config(_)
                        | E::DegreeMismatch { .. }
                        | E::DegreeZero
                        | E::KindMismatch
                        | E::UnsupportedFactor(_)
                )
            )
    })
}

