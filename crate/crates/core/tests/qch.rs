mod common;

use std::collections::BTreeMap;

use common::*;
use qchlab::channel::{embedding_map, is_star_homomorphism, TensorLayout};
use qchlab::circuit::{circuit_to_qch, parse_circuit};
use qchlab::qch::{
    check_composition, check_extension, check_spacelike_commutativity, synthesize_pair_maps, validate_qch,
    verify_all, verify_complete_pair_reductions, VerifyOptions,
};
use qchlab::{CausalGraph, ComplexMatrix, Edge, KrausChannel, QchInstance, Tolerances, Vertex};

const BELL: &str = r#"{"qubits": 2, "layers": [[{"gate": "H", "targets": [0]}], [{"gate": "CNOT", "targets": [0, 1]}]]}"#;

fn graph(vertices: &[(&str, usize)], edges: &[(&str, &str)]) -> CausalGraph {
    CausalGraph::new(
        vertices.iter().map(|&(id, dim)| Vertex { id: id.into(), dim }).collect(),
        edges.iter().map(|&(s, t)| Edge { id: format!("{s}-{t}"), source: s.into(), target: t.into() }).collect(),
    )
    .unwrap()
}

fn maps(entries: &[(&str, KrausChannel)]) -> BTreeMap<String, KrausChannel> {
    entries.iter().map(|(k, v)| (k.to_string(), v.clone())).collect()
}

fn opts() -> VerifyOptions {
    VerifyOptions::default()
}

fn bell() -> QchInstance {
    circuit_to_qch(&parse_circuit(BELL).unwrap()).unwrap()
}

/// CNOT pair on {a, b} -> {c, d} (control a -> c) with the given edge maps.
fn cnot_pair(edges: [KrausChannel; 4]) -> QchInstance {
    let g = graph(
        &[("a", 2), ("b", 2), ("c", 2), ("d", 2)],
        &[("a", "c"), ("a", "d"), ("b", "c"), ("b", "d")],
    );
    let [ac, ad, bc, bd] = edges;
    QchInstance::new(g, maps(&[("a-c", ac), ("a-d", ad), ("b-c", bc), ("b-d", bd)]))
        .unwrap()
        .with_pair(&["a", "b"], &["c", "d"], cnot())
        .unwrap()
}

/// `Tr_c(CNOT (I/2 (x) rho) CNOT^dagger)` as a Choi-extracted channel.
fn target_edge_oracle() -> KrausChannel {
    qchlab::Superoperator::from_fn(2, 2, |rho| {
        let lifted = qchlab::matkernel::tensor(&ComplexMatrix::identity(2).scale_real(0.5), rho);
        Ok(trace_first(&(&(&cnot() * &lifted) * &cnot().adjoint()), 2, 2))
    })
    .unwrap()
    .kraus_from_choi(1e-9)
    .unwrap()
}

/// `Tr_t(CNOT (rho (x) I/2) CNOT^dagger)` restricted to the target output: the fully mixing control-to-target channel.
fn cross_oracle(control_out: bool, from_control: bool) -> KrausChannel {
    qchlab::Superoperator::from_fn(2, 2, |rho| {
        let half = ComplexMatrix::identity(2).scale_real(0.5);
        let lifted = if from_control {
            qchlab::matkernel::tensor(rho, &half)
        } else {
            qchlab::matkernel::tensor(&half, rho)
        };
        let out = &(&cnot() * &lifted) * &cnot().adjoint();
        Ok(if control_out { trace_second(&out, 2, 2) } else { trace_first(&out, 2, 2) })
    })
    .unwrap()
    .kraus_from_choi(1e-9)
    .unwrap()
}

#[test]
fn validate_examples() {
    let diamond = graph(&[("x", 2), ("a", 2), ("b", 2), ("z", 2)], &[("x", "a"), ("x", "b"), ("a", "z"), ("b", "z")]);
    let id = KrausChannel::identity(2);
    let good = QchInstance::new(
        diamond.clone(),
        maps(&[("x-a", id.clone()), ("x-b", dephasing()), ("a-z", amplitude_damping(0.3)), ("b-z", id.clone())]),
    )
    .unwrap();
    assert!(validate_qch(&good, &Tolerances::default()).unwrap().pass());

    let wrong = KrausChannel::new(3, 2, vec![ComplexMatrix::zeros(2, 3)]).unwrap();
    let mut bad = good.clone();
    bad.edge_maps.insert("x-a".into(), wrong);
    let r = validate_qch(&bad, &Tolerances::default()).unwrap();
    let dims = r.get("edge[x-a]/dims").unwrap();
    assert!(!dims.pass);
    assert!(dims.detail.as_deref().unwrap().starts_with("E_DOMAIN"));

    let mut lossy = good.clone();
    lossy.edge_maps.insert("x-b".into(), KrausChannel::new(2, 2, vec![ComplexMatrix::unit(2, 0, 0)]).unwrap());
    let r = validate_qch(&lossy, &Tolerances::default()).unwrap();
    let tp = r.get("edge[x-b]/tp").unwrap();
    assert!(!tp.pass);
    assert!((tp.residual - 1.0).abs() < 1e-15);

    let cyclic = graph(&[("x", 1), ("y", 1)], &[("x", "y"), ("y", "x")]);
    let one = KrausChannel::identity(1);
    let q = QchInstance::new(cyclic, maps(&[("x-y", one.clone()), ("y-x", one)])).unwrap();
    assert_eq!(validate_qch(&q, &Tolerances::default()).unwrap_err().code(), "E_CTC");
}

#[test]
fn missing_edge_map_is_rejected() {
    let g = graph(&[("x", 2), ("y", 2)], &[("x", "y")]);
    let err = QchInstance::new(g, BTreeMap::new()).unwrap_err();
    assert_eq!(err.code(), "E_MISSING_EDGE");
}

#[test]
fn synthesis_examples() {
    let g = graph(&[("x", 2), ("y", 2)], &[("x", "y")]);
    let q = QchInstance::new(g, maps(&[("x-y", KrausChannel::identity(2))]))
        .unwrap()
        .with_pair(&["x"], &["y"], ComplexMatrix::identity(2))
        .unwrap();
    let pm = synthesize_pair_maps(&q, 0).unwrap();
    assert!(pm.futures[0].1.choi_distance(&KrausChannel::identity(2)).unwrap() < 1e-15);

    let q = cnot_pair([dephasing(), cross_oracle(false, true), cross_oracle(true, false), target_edge_oracle()]);
    let pm = synthesize_pair_maps(&q, 0).unwrap();
    let (fa, fb) = (&pm.futures[0].1, &pm.futures[1].1);
    let (ia, ib) = (fa.unit_images().unwrap(), fb.unit_images().unwrap());
    let mut worst = 0.0f64;
    for a in &ia {
        for b in &ib {
            worst = worst.max(a.commutator(b).frobenius_norm());
        }
    }
    assert!(worst < 1e-10);
    for (_, f) in &pm.futures {
        assert!(is_star_homomorphism(f, 1e-10).unwrap());
        assert!(f.dual().trace_preservation_residual() < 1e-10);
    }

    let g = graph(&[("x", 2), ("y", 2)], &[("x", "y")]);
    let off = ComplexMatrix::identity(2).scale_real(1.0 + 0.05 / 2f64.sqrt());
    let q = QchInstance::new(g, maps(&[("x-y", KrausChannel::identity(2))]))
        .unwrap()
        .with_pair(&["x"], &["y"], off)
        .unwrap();
    assert_eq!(synthesize_pair_maps(&q, 0).unwrap_err().code(), "E_NOT_UNITARY");
}

use qchlab::LinearMap;

#[test]
fn star_homomorphism_examples() {
    let l = TensorLayout::new(vec!["a".into(), "b".into()], vec![2, 3]).unwrap();
    assert!(is_star_homomorphism(&embedding_map::<f64>("a", &l).unwrap(), 1e-10).unwrap());
    assert!(is_star_homomorphism(&KrausChannel::conjugation(hadamard()), 1e-10).unwrap());
    let ad = amplitude_damping(0.5);
    assert!(!is_star_homomorphism(&ad, 1e-10).unwrap());
    // multiplicativity fails on E12 E21
    let lhs = &ad.apply(&ComplexMatrix::unit(2, 0, 1)).unwrap() * &ad.apply(&ComplexMatrix::unit(2, 1, 0)).unwrap();
    let rhs = ad.apply(&ComplexMatrix::unit(2, 0, 0)).unwrap();
    assert!(lhs.distance(&rhs) > 0.1);
}

#[test]
fn bell_extension_passes_tightly() {
    let q = bell();
    let r = check_extension(&q, &opts()).unwrap();
    assert!(!r.is_empty());
    assert!(r.pass());
    assert!(r.max_residual() < 1e-10, "{}", r.max_residual());
}

#[test]
fn perturbed_edge_fails_extension_proportionally() {
    let mut q = bell();
    let id = "q0_t0->q0_t1";
    let original = q.edge_maps[id].clone();
    let deph = dephasing();
    let perturbed = KrausChannel::convex_combination(&[(1.0 - 1e-3, &original), (1e-3, &deph)]).unwrap();
    let oracle = 1e-3 * original.choi_distance(&deph).unwrap();
    q.edge_maps.insert(id.into(), perturbed);
    let r = check_extension(&q, &opts()).unwrap();
    assert!(!r.pass());
    let worst = r.failures().map(|c| c.residual).fold(0.0, f64::max);
    assert!((1e-4..=1e-2).contains(&worst), "{worst}");
    assert!((worst - oracle).abs() < 1e-9);
}

#[test]
fn vertex_without_future_is_vacuous() {
    let g = graph(&[("x", 2)], &[]);
    let q = QchInstance::new(g, BTreeMap::new()).unwrap();
    for (_, r) in verify_all(&q, &opts()).unwrap() {
        assert!(r.is_empty());
    }
}

#[test]
fn spacelike_examples() {
    let q = cnot_pair([dephasing(), cross_oracle(false, true), cross_oracle(true, false), target_edge_oracle()]);
    let r = check_spacelike_commutativity(&q, &opts()).unwrap();
    assert_eq!(r.len(), 2);
    assert!(r.pass());

    // x ~ w with futures into the same factor of zeta = {z1, z2}
    let g = graph(
        &[("w", 2), ("x", 2), ("z1", 2), ("z2", 2)],
        &[("x", "z1"), ("x", "z2"), ("w", "z1"), ("w", "z2")],
    );
    let zeta = TensorLayout::new(vec!["z1".into(), "z2".into()], vec![2, 2]).unwrap();
    let into_z1: KrausChannel = embedding_map("z1", &zeta).unwrap();
    let into_z2: KrausChannel = embedding_map("z2", &zeta).unwrap();
    let edges = maps(&[
        ("x-z1", KrausChannel::identity(2)),
        ("x-z2", dephasing()),
        ("w-z1", KrausChannel::identity(2)),
        ("w-z2", dephasing()),
    ]);
    let same = QchInstance::new(g.clone(), edges.clone())
        .unwrap()
        .with_declared_future("x", &["z1", "z2"], into_z1.clone())
        .unwrap()
        .with_declared_future("w", &["z1", "z2"], into_z1.clone())
        .unwrap();
    let r = check_spacelike_commutativity(&same, &opts()).unwrap();
    assert!(!r.pass());
    // ||[E12 (x) 1, E21 (x) 1]||_F = ||[E12, E21]||_F * sqrt(2)
    let e = ComplexMatrix::unit(2, 0, 1).commutator(&ComplexMatrix::unit(2, 1, 0)).frobenius_norm();
    assert!((r.max_residual() - e * 2f64.sqrt()).abs() < 1e-12);

    let disjoint = QchInstance::new(g, edges)
        .unwrap()
        .with_declared_future("x", &["z1", "z2"], into_z1)
        .unwrap()
        .with_declared_future("w", &["z1", "z2"], into_z2)
        .unwrap();
    let r = check_spacelike_commutativity(&disjoint, &opts()).unwrap();
    assert_eq!(r.len(), 1);
    assert!(r.pass() && r.max_residual() == 0.0);
}

fn composition_instance(direct: KrausChannel) -> QchInstance {
    let g = graph(&[("x", 2), ("m", 2), ("y", 2)], &[("x", "m"), ("m", "y")]);
    QchInstance::new(g, maps(&[("x-m", KrausChannel::identity(2)), ("m-y", dephasing())]))
        .unwrap()
        .with_pair(&["x"], &["m"], ComplexMatrix::identity(2))
        .unwrap()
        .with_declared_past(&["m"], "y", dephasing())
        .unwrap()
        .with_related_map("x", "y", direct)
        .unwrap()
}

#[test]
fn composition_examples() {
    let by_construction = qchlab::channel::compose(&dephasing(), &KrausChannel::identity(2)).unwrap();
    let r = check_composition(&composition_instance(by_construction), &opts()).unwrap();
    assert_eq!(r.len(), 1);
    assert!(r.pass());

    let r = check_composition(&composition_instance(KrausChannel::identity(2)), &opts()).unwrap();
    assert!(!r.pass());
    // choi(id) - choi(dephasing) = E12 (x) E12 + E21 (x) E21
    assert!((r.checks[0].residual - 2f64.sqrt()).abs() < 1e-6);
}

#[test]
fn unitary_chain_satisfies_every_axiom() {
    let mut g = rng(12);
    let u1 = qchlab::algebra::haar_unitary::<f64, _>(2, &mut g);
    let u2 = qchlab::algebra::haar_unitary::<f64, _>(2, &mut g);
    let gr = graph(&[("x", 2), ("m", 2), ("y", 2)], &[("x", "m"), ("m", "y")]);
    let q = QchInstance::new(
        gr,
        maps(&[("x-m", KrausChannel::conjugation(u1.clone())), ("m-y", KrausChannel::conjugation(u2.clone()))]),
    )
    .unwrap()
    .with_pair(&["x"], &["m"], u1.clone())
    .unwrap()
    .with_pair(&["m"], &["y"], u2.clone())
    .unwrap()
    .with_related_map("x", "y", KrausChannel::conjugation(&u2 * &u1))
    .unwrap();
    assert!(validate_qch(&q, &Tolerances::default()).unwrap().pass());
    let comp = check_composition(&q, &opts()).unwrap();
    assert_eq!(comp.len(), 1);
    for (name, r) in verify_all(&q, &opts()).unwrap() {
        assert!(r.pass(), "{name}");
    }
}

#[test]
fn missing_related_map_is_an_error_for_composition() {
    let g = graph(&[("x", 2), ("m", 2), ("y", 2)], &[("x", "m"), ("m", "y")]);
    let q = QchInstance::new(g, maps(&[("x-m", KrausChannel::identity(2)), ("m-y", KrausChannel::identity(2))]))
        .unwrap()
        .with_pair(&["x"], &["m"], ComplexMatrix::identity(2))
        .unwrap()
        .with_pair(&["m"], &["y"], ComplexMatrix::identity(2))
        .unwrap();
    assert_eq!(check_composition(&q, &opts()).unwrap_err().code(), "E_MISSING_EDGE");
}

#[test]
fn pair_reduction_examples() {
    let g = graph(
        &[("a", 2), ("b", 2), ("c", 2), ("d", 2)],
        &[("a", "c"), ("a", "d"), ("b", "c"), ("b", "d")],
    );
    // SWAP sends a to d and b to c; the crossed edges carry the identity
    let full_mix = qchlab::Superoperator::from_fn(2, 2, |rho| Ok(ComplexMatrix::identity(2).scale(rho.trace() * 0.5)))
        .unwrap()
        .kraus_from_choi(1e-9)
        .unwrap();
    let q = QchInstance::new(
        g,
        maps(&[
            ("a-d", KrausChannel::identity(2)),
            ("b-c", KrausChannel::identity(2)),
            ("a-c", full_mix.clone()),
            ("b-d", full_mix),
        ]),
    )
    .unwrap()
    .with_pair(&["a", "b"], &["c", "d"], swap())
    .unwrap();
    let r = verify_complete_pair_reductions(&q, 0, &opts()).unwrap();
    assert_eq!(r.len(), 4);
    assert!(r.pass());

    let cnot_ok = cnot_pair([dephasing(), cross_oracle(false, true), cross_oracle(true, false), target_edge_oracle()]);
    assert!(verify_complete_pair_reductions(&cnot_ok, 0, &opts()).unwrap().pass());
    for (name, r) in verify_all(&cnot_ok, &opts()).unwrap() {
        assert!(r.pass(), "{name}");
    }

    let id = KrausChannel::identity(2);
    let cnot_id = cnot_pair([id.clone(), id.clone(), id.clone(), id]);
    let r = verify_complete_pair_reductions(&cnot_id, 0, &opts()).unwrap();
    assert!(!r.pass());
    assert!(!r.get("pair[0]/reduction/a->c").unwrap().pass);
}

#[test]
fn exhaustive_mode_flags_uncovered_futures() {
    let g = graph(&[("x", 2), ("y", 2)], &[("x", "y")]);
    let q = QchInstance::new(g, maps(&[("x-y", KrausChannel::identity(2))])).unwrap();
    let ex = VerifyOptions { exhaustive: true, ..VerifyOptions::default() };
    let r = check_extension(&q, &ex).unwrap();
    assert_eq!(r.len(), 2);
    assert!(!r.pass());
    let bell = bell();
    let r = check_extension(&bell, &ex).unwrap();
    assert!(r.failures().all(|c| c.name.ends_with("/missing")));
}

#[test]
fn reports_are_bitwise_deterministic_and_parallel_safe() {
    let q = bell();
    let a = verify_all(&q, &opts()).unwrap();
    let b = verify_all(&q, &opts()).unwrap();
    let par = verify_all(&q, &VerifyOptions { parallel: true, ..VerifyOptions::default() }).unwrap();
    for ((x, y), z) in a.iter().zip(&b).zip(&par) {
        assert_eq!(x.1, y.1);
        assert_eq!(x.1, z.1);
    }
}
