//! Exhaustive verification sweeps over finite windows, split across worker
//! threads. Results are merged in chunk order, so reports do not depend on
//! the number of jobs.

use std::collections::BTreeSet;

use anyhow::Result;
use hypemb_core::chain::{permutations, Simplex};
use hypemb_core::checks::{CheckOutcome, GeometryChecks};
use hypemb_core::cochain::Cochain;
use hypemb_core::extension::{BoundCheck, ExtensionReport, ExtensionVerifier};
use hypemb_core::group::{GroupElement, Window};
use hypemb_core::reconstruction::{
    minimal_admissible_m, minimal_admissible_n, next_admissible_m, recover_projection_general, recover_projection_zn,
};
use hypemb_core::{ConedSpace, Coset, Extension, FamilyCochain, ModuleVector, Rational};
use rand::seq::{IndexedRandom, SliceRandom};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Applies `f` to contiguous chunks of `items` on up to `jobs` threads and
/// returns the results in chunk order.
pub fn parallel_chunks<T: Sync, R: Send>(items: &[T], jobs: usize, f: impl Fn(&[T]) -> R + Sync) -> Vec<R> {
    let jobs = jobs.max(1).min(items.len().max(1));
    if jobs == 1 {
        return vec![f(items)];
    }
    let size = items.len().div_ceil(jobs);
    std::thread::scope(|scope| {
        let handles: Vec<_> = items.chunks(size).map(|chunk| scope.spawn(|| f(chunk))).collect();
        handles.into_iter().map(|h| h.join().expect("worker panicked")).collect()
    })
}

/// Which tuples and cosets the geometry checks run over. Pairs and triples
/// are based at the identity; translations are tested separately.
pub struct GeometryWindow {
    pub pair_points: Vec<GroupElement>,
    pub cosets: Vec<Coset>,
    pub gate_cosets: Vec<Coset>,
    pub triple_first: Vec<GroupElement>,
    pub triple_second: Vec<GroupElement>,
    pub translations: Vec<GroupElement>,
    pub translated_points: Vec<GroupElement>,
    pub translated_cosets: Vec<Coset>,
}

pub fn geometry(space: &ConedSpace, w: &GeometryWindow, jobs: usize) -> GeometryChecks {
    let one = GroupElement::identity();
    let mut total = GeometryChecks::default();
    for part in parallel_chunks(&w.pair_points, jobs, |ys| {
        let mut c = GeometryChecks::default();
        for y in ys {
            c.check_far_projection(space, &one, y, &w.cosets);
            c.check_order(space, &one, y);
            c.check_order(space, y, &one);
        }
        c
    }) {
        total.merge(&part);
    }
    for part in parallel_chunks(&w.gate_cosets, jobs, |bs| {
        let mut c = GeometryChecks::default();
        for b in bs {
            for other in &w.gate_cosets {
                c.check_gate(space, b, other);
            }
        }
        c
    }) {
        total.merge(&part);
    }
    for part in parallel_chunks(&w.triple_first, jobs, |xs| {
        let mut c = GeometryChecks::default();
        for x in xs {
            let relevant: Vec<Coset> = space.relevant_cosets(&[one.clone(), x.clone()]).into_iter().collect();
            for y in &w.triple_second {
                c.check_three_points(space, [&one, x, y], &relevant);
            }
        }
        c
    }) {
        total.merge(&part);
    }
    for part in parallel_chunks(&w.translations, jobs, |gs| {
        let mut c = GeometryChecks::default();
        for g in gs {
            for x in &w.translated_points {
                for b in &w.translated_cosets {
                    c.check_equivariance(space, g, &one, x, b);
                }
            }
        }
        c
    }) {
        total.merge(&part);
    }
    total
}

/// Results of the trace sweep on based triples.
#[derive(Clone, Debug)]
pub struct TraceReport {
    pub natmost: CheckOutcome,
    pub almost_chain: CheckOutcome,
    pub trace_norm: CheckOutcome,
    /// count of non-degenerate cosets → number of tuples
    pub histogram: std::collections::BTreeMap<usize, u64>,
}

impl TraceReport {
    fn new() -> Self {
        TraceReport {
            natmost: CheckOutcome::new("natmost", "at most n(n+1) cosets carry a non-degenerate trace"),
            almost_chain: CheckOutcome::new("almost_chain", "the trace commutes with the boundary up to small simplices"),
            trace_norm: CheckOutcome::new("trace_norm", "traces have l1 norm at most 1"),
            histogram: Default::default(),
        }
    }

    pub fn pass(&self) -> bool {
        self.natmost.pass() && self.almost_chain.pass() && self.trace_norm.pass()
    }

    fn merge(&mut self, o: &TraceReport) {
        self.natmost.merge(&o.natmost);
        self.almost_chain.merge(&o.almost_chain);
        self.trace_norm.merge(&o.trace_norm);
        for (k, v) in &o.histogram {
            *self.histogram.entry(*k).or_default() += v;
        }
    }
}

/// Checks one tuple of degree n ≥ 2 against the trace properties.
pub fn check_trace_tuple(space: &ConedSpace, tuple: &[GroupElement], r: &mut TraceReport) -> Result<()> {
    let n = tuple.len() - 1;
    let model = space.model();
    let show = || format!("{:?}", tuple.iter().map(|g| model.format(g)).collect::<Vec<_>>());
    let nondegenerate = space.nondegenerate_trace_cosets(tuple).len();
    *r.histogram.entry(nondegenerate).or_default() += 1;
    r.natmost.max_observed = Some(r.natmost.max_observed.map_or(Rational::from_integer(nondegenerate as i128), |m| {
        m.max(Rational::from_integer(nondegenerate as i128))
    }));
    r.natmost.checked += 1;
    if nondegenerate > n * (n + 1) {
        if r.natmost.violations == 0 {
            r.natmost.witness = Some(show());
        }
        r.natmost.violations += 1;
    }
    // cosets where either side of the defect can be nonzero
    let mut cosets: BTreeSet<Coset> = space.relevant_cosets(tuple);
    for j in 0..tuple.len() {
        cosets.extend(space.relevant_cosets(Simplex(tuple.to_vec()).face(j).vertices()));
    }
    for b in &cosets {
        let tr = space.trace(tuple, b);
        r.trace_norm.checked += 1;
        if tr.l1_norm() > Rational::from_integer(1) {
            if r.trace_norm.violations == 0 {
                r.trace_norm.witness = Some(show());
            }
            r.trace_norm.violations += 1;
        }
        let defect = space.almost_chain_defect(tuple, b)?;
        r.almost_chain.checked += 1;
        if !defect.terms().all(|(s, _)| space.is_small(s.vertices())) {
            if r.almost_chain.violations == 0 {
                r.almost_chain.witness = Some(format!("{} on {}", show(), hypemb_core::checks::format_coset(space, b)));
            }
            r.almost_chain.violations += 1;
        }
    }
    Ok(())
}

/// Trace properties on all triples (1, x, y) with x and y from `points`.
pub fn traces(space: &ConedSpace, points: &[GroupElement], jobs: usize) -> Result<TraceReport> {
    let one = GroupElement::identity();
    let mut total = TraceReport::new();
    for part in parallel_chunks(points, jobs, |xs| -> Result<TraceReport> {
        let mut r = TraceReport::new();
        for x in xs {
            for y in points {
                check_trace_tuple(space, &[one.clone(), x.clone(), y.clone()], &mut r)?;
            }
        }
        Ok(r)
    }) {
        total.merge(&part?);
    }
    Ok(total)
}

/// Which tuples the extension verifier sees. All tuples are based at the
/// identity.
pub struct ExtensionWindow {
    /// Elements of G for the (n+1)- and (n+2)-tuples.
    pub group_points: Vec<GroupElement>,
    /// Per factor, elements of that factor for the factor tuples.
    pub factor_points: Vec<Vec<GroupElement>>,
    /// Skip the (n+2)-tuples on G (the expensive part).
    pub skip_coboundary: bool,
    /// Number of sampled permutation checks of alternation.
    pub alternation_samples: usize,
    pub seed: u64,
}

#[derive(Clone, Debug)]
pub struct ExtensionSweep {
    pub report: ExtensionReport,
    pub alternation: BoundCheck,
}

impl ExtensionSweep {
    pub fn pass(&self) -> bool {
        self.report.pass() && self.alternation.pass()
    }
}

fn based(prefix: &[&GroupElement]) -> Vec<GroupElement> {
    let mut t = vec![GroupElement::identity()];
    t.extend(prefix.iter().map(|g| (*g).clone()));
    t
}

/// Calls `f` on every based tuple (1, x₁, …, x_k) over `points`, with x₁
/// drawn from `first`.
fn for_based<E>(
    first: &[GroupElement],
    points: &[GroupElement],
    k: usize,
    mut f: impl FnMut(&[GroupElement]) -> Result<(), E>,
) -> Result<(), E> {
    if k == 0 {
        return f(&[GroupElement::identity()]);
    }
    let mut idx = vec![0usize; k - 1];
    for x in first {
        loop {
            let mut refs = vec![x];
            refs.extend(idx.iter().map(|&i| &points[i]));
            f(&based(&refs))?;
            let mut j = 0;
            while j < idx.len() && idx[j] + 1 == points.len() {
                idx[j] = 0;
                j += 1;
            }
            if j == idx.len() {
                break;
            }
            idx[j] += 1;
        }
    }
    Ok(())
}

pub fn extension(
    space: &ConedSpace,
    family: &FamilyCochain,
    k_window: &Window,
    w: &ExtensionWindow,
    jobs: usize,
) -> Result<ExtensionSweep> {
    let n = family.degree();
    let mut verifier = ExtensionVerifier::new(space, family, k_window)?;
    for (factor, points) in w.factor_points.iter().enumerate() {
        for_based(points, points, n, |t| verifier.check_factor_tuple(factor, t))?;
        for_based(points, points, n + 1, |t| verifier.check_factor_coboundary(factor, t))?;
    }
    for_based(&w.group_points, &w.group_points, n, |t| verifier.check_sup(t))?;
    let mut report = verifier.into_report();
    if !w.skip_coboundary {
        for part in parallel_chunks(&w.group_points, jobs, |xs| -> Result<ExtensionReport> {
            let mut v = ExtensionVerifier::new(space, family, k_window)?;
            coboundary_sweep(space, family, xs, &w.group_points, &mut v)?;
            Ok(v.into_report())
        }) {
            report.merge(&part?);
        }
    }
    let alternation = alternation_samples(space, family, &w.group_points, w.alternation_samples, w.seed)?;
    Ok(ExtensionSweep { report, alternation })
}

/// Feeds every based (n+2)-tuple (1, x, p₂, …) with x from `first` to the
/// verifier. Θφ on the faces through the identity is memoized by index.
fn coboundary_sweep(
    space: &ConedSpace,
    family: &FamilyCochain,
    first: &[GroupElement],
    points: &[GroupElement],
    v: &mut ExtensionVerifier<'_>,
) -> Result<()> {
    let n = family.degree();
    let theta = Extension::new(space, family);
    let model = space.model();
    let position: std::collections::HashMap<&GroupElement, usize> = points.iter().enumerate().map(|(i, p)| (p, i)).collect();
    let mut memo: std::collections::HashMap<Vec<usize>, ModuleVector> = Default::default();
    for x in first {
        let xi = *position.get(x).ok_or_else(|| anyhow::anyhow!("first points must be among the points"))?;
        let mut idx = vec![0usize; n];
        loop {
            let mut all = vec![xi];
            all.extend_from_slice(&idx);
            let mut tuple = vec![GroupElement::identity()];
            tuple.extend(all.iter().map(|&i| points[i].clone()));
            // face 0 does not contain the identity
            let mut d_theta = theta.evaluate_simplex(model, &tuple[1..])?;
            for j in 1..tuple.len() {
                let key: Vec<usize> = all.iter().enumerate().filter(|(k, _)| k + 1 != j).map(|(_, &i)| i).collect();
                let value = match memo.get(&key) {
                    Some(val) => val.clone(),
                    None => {
                        let mut face = vec![GroupElement::identity()];
                        face.extend(key.iter().map(|&i| points[i].clone()));
                        let val = theta.evaluate_simplex(model, &face)?;
                        memo.insert(key, val.clone());
                        val
                    }
                };
                let sign = if j % 2 == 0 { 1 } else { -1 };
                d_theta.add_scaled(&value, Rational::from_integer(sign))?;
            }
            v.check_coboundary_given(&tuple, d_theta)?;
            let mut j = 0;
            while j < idx.len() && idx[j] + 1 == points.len() {
                idx[j] = 0;
                j += 1;
            }
            if j == idx.len() {
                break;
            }
            idx[j] += 1;
        }
    }
    Ok(())
}

/// Θφ(σḡ) = sgn(σ)·Θφ(ḡ) on random based tuples and permutations.
pub fn alternation_samples(
    space: &ConedSpace,
    family: &FamilyCochain,
    points: &[GroupElement],
    samples: usize,
    seed: u64,
) -> Result<BoundCheck> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let theta = Extension::new(space, family);
    let model = space.model();
    let perms = permutations(family.degree() + 1);
    let mut check = BoundCheck::default();
    if points.is_empty() {
        return Ok(check);
    }
    for _ in 0..samples {
        let mut t = vec![GroupElement::identity()];
        t.extend((0..family.degree()).map(|_| points.choose(&mut rng).expect("nonempty").clone()));
        let (p, sign) = &perms[rng.random_range(0..perms.len())];
        let permuted: Vec<GroupElement> = p.iter().map(|&i| t[i].clone()).collect();
        let a = theta.evaluate_simplex(model, &t)?;
        let b = theta.evaluate_simplex(model, &permuted)?;
        let mut expected = ModuleVector::zero(family.kind());
        expected.add_scaled(&a, Rational::from_integer(*sign as i128))?;
        let gap = b.difference(&expected)?.norm_sq();
        check.checked += 1;
        if !gap.is_zero() {
            if check.violations == 0 {
                check.witness = Some(permuted);
            }
            check.violations += 1;
        }
        check.observed = check.observed.max(gap);
    }
    Ok(check)
}

/// One general-recovery comparison.
#[derive(Clone, Debug)]
pub struct RecoveryRow {
    pub coset: Coset,
    pub point: GroupElement,
    pub n: u64,
    pub recovered: Vec<GroupElement>,
    pub oracle: Vec<GroupElement>,
    pub value: Option<Rational>,
    pub expected_value: Rational,
    pub growth_floor: Rational,
}

impl RecoveryRow {
    pub fn matches(&self) -> bool {
        self.recovered == self.oracle && self.value == Some(self.expected_value) && self.expected_value > self.growth_floor
    }
}

#[derive(Clone, Debug, Default)]
pub struct GeneralRecoveryReport {
    pub checked: u64,
    pub mismatches: u64,
    pub value_mismatches: u64,
    pub growth_violations: u64,
    pub max_n: u64,
    pub rows: Vec<RecoveryRow>,
}

impl GeneralRecoveryReport {
    pub fn pass(&self) -> bool {
        self.mismatches == 0 && self.value_mismatches == 0 && self.growth_violations == 0
    }
}

/// Recovery at the minimal admissible n for every coset and point. Rows are
/// kept for the first `keep_rows` comparisons and for every failure.
pub fn general_recovery(
    space: &ConedSpace,
    cosets: &[Coset],
    points: &[GroupElement],
    keep_rows: usize,
    jobs: usize,
) -> Result<GeneralRecoveryReport> {
    let model = space.model();
    let mut total = GeneralRecoveryReport::default();
    for part in parallel_chunks(cosets, jobs, |bs| -> Result<GeneralRecoveryReport> {
        let mut r = GeneralRecoveryReport::default();
        for b in bs {
            let f = model.factor(b.factor);
            for y in points {
                let n = minimal_admissible_n(space, b, y)?;
                let rec = recover_projection_general(space, b, y, n)?;
                let p = space.project(b, y);
                let z = b.coordinate(model, &p)?;
                let h = |k: u64| -> Result<hypemb_core::FactorElem> {
                    Ok(hypemb_core::reconstruction::h_sequence(model, b.factor, k)?.syllables()[0].value.clone())
                };
                let dist = |a: &hypemb_core::FactorElem| f.word_length(&f.mul(&f.inv(a), &z)) as i128;
                let expected = Rational::from_integer(dist(&h(n + 1)?) - dist(&h(n)?));
                let c = f.word_length(&z) as i128;
                let floor = Rational::from_integer(3 * (n as i128) * (n as i128) - 2 * c);
                let row = RecoveryRow {
                    coset: b.clone(),
                    point: y.clone(),
                    n,
                    recovered: rec.support.clone(),
                    oracle: vec![p.clone()],
                    value: rec.values.get(&p).copied(),
                    expected_value: expected,
                    growth_floor: floor,
                };
                r.checked += 1;
                r.max_n = r.max_n.max(n);
                let ok = row.matches();
                if row.recovered != row.oracle {
                    r.mismatches += 1;
                }
                if row.value != Some(row.expected_value) {
                    r.value_mismatches += 1;
                }
                if row.expected_value <= row.growth_floor {
                    r.growth_violations += 1;
                }
                if !ok || r.rows.len() < keep_rows {
                    r.rows.push(row);
                }
            }
        }
        Ok(r)
    }) {
        let part = part?;
        total.checked += part.checked;
        total.mismatches += part.mismatches;
        total.value_mismatches += part.value_mismatches;
        total.growth_violations += part.growth_violations;
        total.max_n = total.max_n.max(part.max_n);
        for row in part.rows {
            if !row.matches() || total.rows.len() < keep_rows {
                total.rows.push(row);
            }
        }
    }
    Ok(total)
}

#[derive(Clone, Debug)]
pub struct ZnRow {
    pub g: GroupElement,
    pub point: GroupElement,
    pub m: (i64, i64),
    pub recovered: (GroupElement, GroupElement),
    pub oracle: GroupElement,
}

impl ZnRow {
    pub fn matches(&self) -> bool {
        self.recovered.0 == self.oracle && self.recovered.1 == self.oracle
    }
}

#[derive(Clone, Debug, Default)]
pub struct ZnRecoveryReport {
    pub checked: u64,
    pub mismatches: u64,
    pub unstable: u64,
    pub max_m: i64,
    pub rows: Vec<ZnRow>,
}

impl ZnRecoveryReport {
    pub fn pass(&self) -> bool {
        self.mismatches == 0 && self.unstable == 0
    }
}

/// ℤⁿ recovery at the two smallest admissible m for every coset
/// representative `g` and point `z`.
pub fn zn_recovery(
    space: &ConedSpace,
    factor: usize,
    reps: &[GroupElement],
    points: &[GroupElement],
    keep_rows: usize,
    jobs: usize,
) -> Result<ZnRecoveryReport> {
    let model = space.model();
    let mut total = ZnRecoveryReport::default();
    for part in parallel_chunks(reps, jobs, |gs| -> Result<ZnRecoveryReport> {
        let mut r = ZnRecoveryReport::default();
        for g in gs {
            let coset = Coset::of(factor, g);
            for z in points {
                let w = model.left_quotient(g, z);
                let m0 = minimal_admissible_m(space, factor, &w)?;
                let m1 = next_admissible_m(space, factor, &w, m0)?;
                let a = recover_projection_zn(space, factor, g, z, m0)?;
                let b = recover_projection_zn(space, factor, g, z, m1)?;
                let row = ZnRow { g: g.clone(), point: z.clone(), m: (m0, m1), recovered: (a, b), oracle: space.project(&coset, z) };
                r.checked += 1;
                r.max_m = r.max_m.max(m1);
                if row.recovered.0 != row.oracle {
                    r.mismatches += 1;
                }
                if row.recovered.0 != row.recovered.1 {
                    r.unstable += 1;
                }
                if !row.matches() || r.rows.len() < keep_rows {
                    r.rows.push(row);
                }
            }
        }
        Ok(r)
    }) {
        let part = part?;
        total.checked += part.checked;
        total.mismatches += part.mismatches;
        total.unstable += part.unstable;
        total.max_m = total.max_m.max(part.max_m);
        for row in part.rows {
            if !row.matches() || total.rows.len() < keep_rows {
                total.rows.push(row);
            }
        }
    }
    Ok(total)
}

/// A deterministic sample of `count` items.
pub fn sample<T: Clone>(items: &[T], count: usize, seed: u64) -> Vec<T> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut v = items.to_vec();
    v.shuffle(&mut rng);
    v.truncate(count);
    v
}
