use std::collections::BTreeMap;

use super::{run_tasks, synthesize_pair_maps, ExtensionMap, Qch, VerifyOptions};
use crate::causal::AcausalSet;
use crate::channel::{compose, reduce_map, restrict_input, star_homomorphism_residual, KrausMap, LinearMap, ReductionMode};
use crate::error::Result;
use crate::matkernel::Matrix;
use crate::report::{Check, Report};
use crate::scalar::Real;

fn collect(results: Vec<Result<Vec<Check>>>) -> Result<Report> {
    let mut report = Report::new();
    for r in results {
        report.checks.extend(r?);
    }
    Ok(report)
}

/// Scales a unital future extension so that it becomes trace preserving:
/// `s * Phi_F` with `s = dim(x) / tr(Phi_F(1))`.
fn normalized_future<T: Real>(map: &KrausMap<T>) -> Result<KrausMap<T>> {
    let image = map.apply(&Matrix::identity(map.in_dim()))?;
    let t = image.trace().re;
    if t <= T::zero() {
        return Ok(map.clone());
    }
    let s = (T::lit(map.in_dim() as f64) / t).sqrt();
    KrausMap::new(map.in_dim(), map.out_dim(), map.kraus().iter().map(|a| a.scale_real(s)).collect())
}

fn future_checks<T: Real>(q: &Qch<T>, f: &ExtensionMap<T>, tol: f64) -> Result<Vec<Check>> {
    let base = format!("extension/future/{}->{}", f.vertex, f.set.label());
    let mut checks = vec![
        Check::below(format!("{base}/homomorphism"), star_homomorphism_residual(&f.map)?.as_f64(), tol),
        Check::below(format!("{base}/dual_tp"), f.map.dual().trace_preservation_residual().as_f64(), tol),
    ];
    let layout = f.set.layout(&q.graph)?;
    let dual = f.map.dual();
    for z in f.set.members() {
        if let Some(edge_map) = q.required_map(&f.vertex, z)? {
            let reduced = restrict_input(&dual, z, &layout, ReductionMode::Channel)?;
            let d = reduced.choi_distance(&edge_map.dual())?;
            checks.push(Check::below(format!("{base}/reduction/{z}"), d.as_f64(), tol));
        }
    }
    Ok(checks)
}

fn past_checks<T: Real>(q: &Qch<T>, p: &ExtensionMap<T>, tol: f64) -> Result<Vec<Check>> {
    let base = format!("extension/past/{}->{}", p.set.label(), p.vertex);
    let mut checks = vec![
        Check::below(format!("{base}/tp"), p.map.trace_preservation_residual().as_f64(), tol),
        Check::below(format!("{base}/dual_homomorphism"), star_homomorphism_residual(&p.map.dual())?.as_f64(), tol),
    ];
    let layout = p.set.layout(&q.graph)?;
    for x in p.set.members() {
        if let Some(edge_map) = q.required_map(x, &p.vertex)? {
            // the normalised reduction of Phi_P^dagger to A(x) is the dual of this map
            let reduced = restrict_input(&p.map, x, &layout, ReductionMode::Channel)?;
            let d = reduced.dual().choi_distance(&edge_map.dual())?;
            checks.push(Check::below(format!("{base}/reduction/{x}"), d.as_f64(), tol));
        }
    }
    Ok(checks)
}

fn missing_extensions<T: Real>(q: &Qch<T>, futures: &[ExtensionMap<T>], pasts: &[ExtensionMap<T>], tol: f64) -> Result<Vec<Check>> {
    let g = &q.graph;
    let sets = g.acausal_sets()?;
    let mut checks = Vec::new();
    for v in g.vertices() {
        for s in &sets {
            if g.is_complete_future(s.members(), &v.id)? && !futures.iter().any(|f| f.vertex == v.id && &f.set == s) {
                checks.push(
                    Check::below(format!("extension/future/{}->{}/missing", v.id, s.label()), 1.0, tol)
                        .with_detail("no future extension map supplied"),
                );
            }
            if g.is_complete_past(s.members(), &v.id)? && !pasts.iter().any(|p| p.vertex == v.id && &p.set == s) {
                checks.push(
                    Check::below(format!("extension/past/{}->{}/missing", s.label(), v.id), 1.0, tol)
                        .with_detail("no past extension map supplied"),
                );
            }
        }
    }
    Ok(checks)
}

/// Axiom (i): every future extension is a *-homomorphism with trace
/// preserving dual whose reductions reproduce the dual edge maps, and the
/// mirror conditions for past extensions.
pub fn check_extension<T: Real>(q: &Qch<T>, opts: &VerifyOptions) -> Result<Report> {
    let tol = opts.tol.derived;
    let futures = q.future_maps()?;
    let pasts = q.past_maps()?;
    let mut report = collect(run_tasks(opts.parallel, &futures, |f| future_checks(q, f, tol)))?;
    report.extend(collect(run_tasks(opts.parallel, &pasts, |p| past_checks(q, p, tol)))?);
    if opts.exhaustive {
        report.checks.extend(missing_extensions(q, &futures, &pasts, tol)?);
    }
    Ok(report)
}

fn max_commutator<T: Real>(a: &[Matrix<T>], b: &[Matrix<T>]) -> T {
    let mut worst = T::zero();
    for x in a {
        for y in b {
            worst = worst.max(x.commutator(y).frobenius_norm());
        }
    }
    worst
}

fn group_by_set<T: Real>(maps: Vec<ExtensionMap<T>>) -> BTreeMap<AcausalSet, Vec<ExtensionMap<T>>> {
    let mut groups: BTreeMap<AcausalSet, Vec<ExtensionMap<T>>> = BTreeMap::new();
    for m in maps {
        groups.entry(m.set.clone()).or_default().push(m);
    }
    groups
}

fn commutation_checks<T: Real>(
    q: &Qch<T>,
    groups: BTreeMap<AcausalSet, Vec<ExtensionMap<T>>>,
    dualize: bool,
    opts: &VerifyOptions,
) -> Result<Report> {
    let mut tasks = Vec::new();
    for (set, maps) in &groups {
        for (i, a) in maps.iter().enumerate() {
            for b in &maps[i + 1..] {
                if a.vertex != b.vertex && q.graph.causal_relation(&a.vertex, &b.vertex)? == crate::Relation::Spacelike {
                    tasks.push((set, a, b));
                }
            }
        }
    }
    let tol = opts.tol.derived;
    collect(run_tasks(opts.parallel, &tasks, |(set, a, b)| {
        let images = |m: &ExtensionMap<T>| if dualize { m.map.dual().unit_images() } else { m.map.unit_images() };
        let worst = max_commutator(&images(a)?, &images(b)?);
        let name = if dualize {
            format!("spacelike/past/{}->{{{},{}}}", set.label(), a.vertex, b.vertex)
        } else {
            format!("spacelike/future/{{{},{}}}->{}", a.vertex, b.vertex, set.label())
        };
        Ok(vec![Check::below(name, worst.as_f64(), tol)])
    }))
}

/// Axiom (ii): images of future extensions of spacelike events into a
/// shared complete future commute, and likewise for dual past extensions.
pub fn check_spacelike_commutativity<T: Real>(q: &Qch<T>, opts: &VerifyOptions) -> Result<Report> {
    let mut report = commutation_checks(q, group_by_set(q.future_maps()?), false, opts)?;
    report.extend(commutation_checks(q, group_by_set(q.past_maps()?), true, opts)?);
    Ok(report)
}

/// Axiom (iii): `Phi(x, y) = Phi_P(zeta, y) o Phi_F(x, zeta)` whenever
/// `zeta` is a complete future of `x` and a complete past of `y`. The unital
/// `Phi_F` is rescaled to be trace preserving before composing.
pub fn check_composition<T: Real>(q: &Qch<T>, opts: &VerifyOptions) -> Result<Report> {
    let futures = q.future_maps()?;
    let pasts = q.past_maps()?;
    let mut tasks = Vec::new();
    for f in &futures {
        for p in pasts.iter().filter(|p| p.set == f.set) {
            if let Some(target) = q.required_map(&f.vertex, &p.vertex)? {
                tasks.push((f, p, target));
            }
        }
    }
    let tol = opts.tol.derived;
    collect(run_tasks(opts.parallel, &tasks, |(f, p, target)| {
        let composed = compose(&p.map, &normalized_future(&f.map)?)?;
        let d = composed.choi_distance(target)?;
        Ok(vec![Check::below(format!("composition/{}->{}->{}", f.vertex, f.set.label(), p.vertex), d.as_f64(), tol)])
    }))
}

/// Channel-mode reductions of `U(xi, zeta)` conjugation reproduce `Phi(x, y)` for every related `x` in `xi`, `y` in `zeta`.
pub fn verify_complete_pair_reductions<T: Real>(q: &Qch<T>, index: usize, opts: &VerifyOptions) -> Result<Report> {
    synthesize_pair_maps(q, index)?;
    let pair = &q.complete_pairs[index];
    let xi = pair.xi.layout(&q.graph)?;
    let zeta = pair.zeta.layout(&q.graph)?;
    let conj = KrausMap::conjugation(pair.unitary.clone());
    let mut report = Report::new();
    for x in pair.xi.members() {
        for y in pair.zeta.members() {
            if let Some(target) = q.required_map(x, y)? {
                let reduced = reduce_map(&conj, x, &xi, y, &zeta, ReductionMode::Channel)?;
                let d = reduced.choi_distance(target)?;
                report.push(Check::below(format!("pair[{index}]/reduction/{x}->{y}"), d.as_f64(), opts.tol.derived));
            }
        }
    }
    Ok(report)
}

/// Named sections: extension, spacelike commutativity, composition and pair reductions.
pub fn verify_all<T: Real>(q: &Qch<T>, opts: &VerifyOptions) -> Result<Vec<(&'static str, Report)>> {
    let mut reductions = Report::new();
    for i in 0..q.complete_pairs.len() {
        reductions.extend(verify_complete_pair_reductions(q, i, opts)?);
    }
    Ok(vec![
        ("extension", check_extension(q, opts)?),
        ("spacelike_commutativity", check_spacelike_commutativity(q, opts)?),
        ("composition", check_composition(q, opts)?),
        ("pair_reductions", reductions),
    ])
}
