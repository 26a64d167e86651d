mod common;

use common::{random_lattice, rng};
use diagflow::flows::{
    self, apply_diagonal, apply_unipotent, escape_run, escape_step, renormalize, root_value, AppliedElement,
    Component, DiagonalElement, EscapePlan, LieAlgebraElement, RootIndex,
};
use diagflow::lattice::UnimodularLattice;
use nalgebra::DMatrix;
use proptest::prelude::*;
use rand::Rng;

fn logs3() -> impl Strategy<Value = DiagonalElement> {
    (-3.0f64..3.0, -3.0f64..3.0).prop_map(|(a, b)| DiagonalElement::new(vec![a, b, -a - b]).unwrap())
}

fn elementary(n: usize, r: RootIndex) -> DMatrix<f64> {
    let mut m = DMatrix::zeros(n, n);
    m[(r.i - 1, r.j - 1)] = 1.0;
    m
}

proptest! {
    #[test]
    fn conjugation_matches_root_value(a in logs3(), ri in 0usize..6) {
        let r = RootIndex::all(3)[ri];
        // Ad(a)E_ij computed as a plain matrix product
        let am = a.matrix();
        let conj = &am * elementary(3, r) * am.try_inverse().unwrap();
        let expected = elementary(3, r) * root_value(&a, r);
        prop_assert!((conj - &expected).norm() <= 1e-10 * expected.norm().max(1.0));
        let x = LieAlgebraElement::from_parts(3, &[0.0; 3], &[(r, 1.0)]).unwrap();
        prop_assert!((x.adjoint(&a).matrix() - &expected).norm() <= 1e-10 * expected.norm().max(1.0));
    }

    #[test]
    fn root_values_multiply(a in logs3(), b in logs3(), ri in 0usize..6) {
        let r = RootIndex::all(3)[ri];
        let lhs = root_value(&a.compose(&b), r);
        let rhs = root_value(&a, r) * root_value(&b, r);
        prop_assert!((lhs - rhs).abs() <= 1e-10 * lhs.abs().max(1.0));
    }

    #[test]
    fn diagonal_action_composes(a in logs3(), b in logs3(), seed in 0u64..1000) {
        let mut r = rng(seed);
        let l = random_lattice(&mut r, 3, 10.0);
        let two_steps = apply_diagonal(&a, &apply_diagonal(&b, &l).unwrap()).unwrap();
        let one_step = apply_diagonal(&a.compose(&b), &l).unwrap();
        let diff = two_steps.basis() - one_step.basis();
        prop_assert!(diff.norm() <= 1e-10 * one_step.basis().norm());
    }

    #[test]
    fn opposite_roots_invert(a in logs3(), ri in 0usize..6) {
        let r = RootIndex::all(3)[ri];
        let opp = RootIndex::new(r.j, r.i).unwrap();
        prop_assert!((root_value(&a, r) * root_value(&a, opp) - 1.0).abs() <= 1e-10);
    }
}

#[test]
fn unipotent_zeroes_coordinate() {
    let l = UnimodularLattice::identity(3);
    let moved = apply_unipotent(RootIndex::new(2, 1).unwrap(), -1.0, &l).unwrap();
    let v = moved.vector(&[1, 1, 0]).unwrap();
    assert_eq!(v.embedding, vec![1.0, 0.0, 0.0]);
}

#[test]
fn escape_on_standard_lattice() {
    let l = UnimodularLattice::identity(3);
    let u = RootIndex::new(2, 1).unwrap();

    let v = l.vector(&[0, 1, 0]).unwrap();
    let out = escape_run(&l, &v, u, 1e-3, 20.0).unwrap();
    assert_eq!(out.unipotent_steps(), 0);
    assert!((out.t - 1e3f64.ln()).abs() < 1e-5);
    assert!(out.final_systole <= 1e-3);

    let v = l.vector(&[1, 1, 0]).unwrap();
    let out = escape_run(&l, &v, u, 1e-3, 20.0).unwrap();
    assert_eq!(out.unipotent_steps(), 1);
    assert!(out.final_systole <= 1e-3);
    assert!(out.image_length < 1e-3);
}

#[test]
fn escape_budget_error() {
    let l = UnimodularLattice::identity(3);
    let v = l.vector(&[0, 1, 0]).unwrap();
    let err = escape_run(&l, &v, RootIndex::new(2, 1).unwrap(), 1e-3, 1.0).unwrap_err();
    assert!(err.to_string().contains("flow budget exceeded"));
}

#[test]
fn escape_batch_certificates() {
    let mut r = rng(21);
    let u = RootIndex::new(2, 1).unwrap();
    for _ in 0..30 {
        let l = random_lattice(&mut r, 3, 10.0);
        let s = l.systole().unwrap();
        let vs = l.shortest_vectors(2.0 * s).unwrap();
        let v = &vs[r.gen_range(0..vs.len())];
        let out = escape_run(&l, v, u, 1e-3, 20.0).unwrap();
        // every applied element is diagonal or I + sE_{i1}
        let mut current = l.clone();
        for rec in &out.trace {
            current = match &rec.element {
                AppliedElement::Diag { logs } => {
                    apply_diagonal(&DiagonalElement::new(logs.clone()).unwrap(), &current).unwrap()
                }
                AppliedElement::Unipotent { i, j, s } => {
                    assert_eq!(*j, 1);
                    apply_unipotent(RootIndex::new(*i, *j).unwrap(), *s, &current).unwrap()
                }
            };
        }
        assert!(current.vector(&v.coords).unwrap().length() < 1e-3);
        assert!(out.final_systole < 1e-3);
        assert!(out.unipotent_steps() <= 1 && out.t <= 20.0);
    }
}

#[test]
fn escape_plan_zeroes_target() {
    let mut r = rng(22);
    for i in 2..=3 {
        let u = RootIndex::new(i, 1).unwrap();
        let l = random_lattice(&mut r, 3, 10.0);
        let v = l.vector(&[1, 0, 0]).unwrap();
        match escape_step(&l, &v, u).unwrap() {
            EscapePlan::UnipotentThenFlow { root, s, k } => {
                assert_eq!(k, i);
                let moved = apply_unipotent(root, s, &l).unwrap();
                let w = moved.vector(&v.coords).unwrap().embedding;
                assert!(w[i - 1].abs() < 1e-12 * l.basis().norm());
            }
            other => panic!("unexpected plan {other:?}"),
        }
    }
}

#[test]
fn trace_jsonl_shape() {
    let l = UnimodularLattice::identity(3);
    let v = l.vector(&[1, 1, 0]).unwrap();
    let out = escape_run(&l, &v, RootIndex::new(2, 1).unwrap(), 1e-3, 20.0).unwrap();
    let mut buf = Vec::new();
    out.write_jsonl(&mut buf).unwrap();
    let text = String::from_utf8(buf).unwrap();
    let lines: Vec<serde_json::Value> = text.lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    assert_eq!(lines.len(), 2);
    assert_eq!(lines[0]["type"], "unipotent");
    assert_eq!(lines[1]["type"], "diag");
    assert!(lines[1]["params"]["logs"].as_array().unwrap().len() == 3);
    assert!(lines[1]["systole"].as_f64().unwrap() <= 1e-3);
}

fn sequence(n_max: usize, f: impl Fn(f64) -> Vec<(RootIndex, f64)>) -> Vec<LieAlgebraElement> {
    (1..=n_max)
        .map(|n| LieAlgebraElement::from_parts(2, &[0.0, 0.0], &f(n as f64)).unwrap())
        .collect()
}

#[test]
fn renormalize_rates() {
    let e12 = RootIndex::new(1, 2).unwrap();
    let e21 = RootIndex::new(2, 1).unwrap();

    let seq = sequence(200, |n| vec![(e12, 1.0 / n), (e21, 1.0 / (n * n))]);
    let r = renormalize(&seq).unwrap();
    assert_eq!(r.root_class, e12);
    assert!((r.limit.root_coefficient(e12) - 1.0).abs() < 1e-9);
    assert!((r.decay_of(Component::Root(e21)).unwrap() + 3.0).abs() < 1e-6);

    let seq = sequence(200, |n| vec![(e12, 1.0 / n), (e21, 1.0 / n)]);
    let r = renormalize(&seq).unwrap();
    assert_eq!(r.root_class, e12);
    assert!((r.decay_of(Component::Root(e21)).unwrap() + 2.0).abs() < 1e-6);
    assert_eq!(r.decay_of(Component::Cartan), None);
}

#[test]
fn renormalize_conjugators_follow_scaling() {
    let e12 = RootIndex::new(1, 2).unwrap();
    let seq = sequence(10, |n| vec![(e12, 1.0 / n)]);
    let r = renormalize(&seq).unwrap();
    for (k, a) in r.conjugators.iter().enumerate() {
        // e^{t_n} = n^{1/2}, a = t_n (e_1 − e_2)
        let t = 0.5 * ((k + 1) as f64).ln();
        assert!((a.logs()[0] - t).abs() < 1e-12);
        assert!((a.logs()[1] + t).abs() < 1e-12);
    }
}

#[test]
fn grid_is_symmetric() {
    let g = flows::log_ball_grid(3, 2.0, 0.5).unwrap();
    for a in &g {
        let neg = a.inverse();
        assert!(g.iter().any(|b| (b.logs()[0] - neg.logs()[0]).abs() < 1e-12
            && (b.logs()[1] - neg.logs()[1]).abs() < 1e-12));
    }
}
