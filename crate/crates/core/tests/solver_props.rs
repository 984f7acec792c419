mod common;

use altproj::completion::{generate_gaussian, STREAM_LANCZOS};
use altproj::sets::IntervalUnion;
use altproj::solver::{
    eval_l, run, step_irapm, step_rapm, FeasibilityProblem, IntervalProblem, IterationRecord, ProjectionContext,
    SolverConfig, Variant,
};
use altproj::{DenseMatrix, RngSpec};
use common::{dist, truncation};

fn ctx(seed: u64) -> ProjectionContext {
    ProjectionContext {
        rng: RngSpec::new(seed, 3),
        ritz_tol_multiplier: 16.0,
        ell_cap: None,
    }
}

fn toy() -> IntervalProblem {
    IntervalProblem {
        a: IntervalUnion::new(vec![(0.0, 2.0)]).unwrap(),
        b: IntervalUnion::new(vec![(0.0, 1.0), (2.0, 3.0)]).unwrap(),
        x0: 0.0,
        y0: 3.0,
    }
}

fn config(variant: Variant, zeta: f64, iters: usize) -> SolverConfig {
    let mut c = SolverConfig::new(variant, 16.0, RngSpec::new(1, 0).derive(STREAM_LANCZOS));
    c.zeta = zeta;
    c.max_iter = iters;
    c.record_l = true;
    c
}

fn assert_descent(records: &[IterationRecord], initial: f64) {
    let mut prev = initial;
    for r in records {
        let l = r.l_value.unwrap();
        assert!(l <= prev + 1e-10 * (1.0 + prev), "k={} L {prev} -> {l}", r.k);
        prev = l;
    }
}

#[test]
fn toy_step_rejects_the_point_that_only_passes_the_first_test() {
    let p = toy();
    let step = step_irapm(&p, &0.0, &3.0, 1.0, 10.0, 0.5, 0.1, &ctx(0)).unwrap();
    assert_eq!(step.x, 1.5);
    let cert = step.cert.unwrap();
    assert!(cert.first_test() && cert.second_test());
    assert!(step.y >= 2.0 && step.y <= 3.0, "y={} should stay on the upper interval", step.y);
    assert!(!p.candidates(18.0 / 11.0).is_empty());
}

#[test]
fn toy_runs_descend_and_bound_their_steps() {
    let p = toy();
    for (variant, zeta) in [(Variant::Rapm, 1.0), (Variant::Irapm, 1e-3), (Variant::Irapm, 0.5), (Variant::Irapm, 1.0)] {
        let trace = run(&p, &config(variant, zeta, 40)).unwrap();
        assert_descent(&trace.records, trace.initial_l.unwrap());
        for r in &trace.records {
            if let Some(q) = r.q_value {
                assert!(q <= 1e-12);
                assert!(r.d_k + 1e-15 >= (-q).sqrt());
            }
        }
    }
}

#[test]
fn d_k_dominates_the_step_length() {
    let inst = generate_gaussian(30, 25, 3, 2.6, RngSpec::new(2, 0)).unwrap();
    let problem = inst.problem();
    for variant in [Variant::Apm, Variant::Rapm, Variant::Irapm] {
        let mut cfg = config(variant, 1e-3, 1);
        let start = ProjectionContext {
            rng: cfg.rng.derive(0),
            ..ctx(0)
        };
        let mut prev = problem.initial(&start).unwrap();
        for k in 1..=10 {
            cfg.max_iter = k;
            let trace = run(&problem, &cfg).unwrap();
            let r = trace.records.last().unwrap();
            let step = (dist(&trace.final_x, &prev.0).powi(2) + dist(&trace.final_y, &prev.1).powi(2)).sqrt();
            assert!(r.d_k + 1e-12 >= step, "{variant:?} k={k}");
            if let Some(q) = r.q_value {
                assert!(r.d_k + 1e-12 >= (-q).max(0.0).sqrt());
            }
            prev = (trace.final_x, trace.final_y);
        }
    }
}

#[test]
fn one_iteration_budget() {
    let inst = generate_gaussian(30, 25, 3, 2.6, RngSpec::new(3, 0)).unwrap();
    for variant in [Variant::Apm, Variant::Rapm, Variant::Irapm] {
        let trace = run(&inst.problem(), &config(variant, 1e-7, 1)).unwrap();
        assert_eq!(trace.records.len(), 1);
        let r = &trace.records[0];
        assert_eq!(r.cost, r.ell_bar - 3);
    }
    let mut bad = config(Variant::Rapm, 1e-7, 0);
    bad.max_iter = 0;
    assert!(run(&inst.problem(), &bad).is_err());
}

#[test]
fn zeta_one_step_equals_the_regularized_step() {
    let inst = generate_gaussian(40, 30, 4, 2.6, RngSpec::new(4, 0)).unwrap();
    let p = inst.problem();
    let (x, y) = p.initial(&ctx(4)).unwrap();
    let a = step_rapm(&p, &x, &y, 16.0, 16.0, &ctx(5)).unwrap();
    let b = step_irapm(&p, &x, &y, 16.0, 16.0, 1.0, 0.1, &ctx(5)).unwrap();
    assert!(dist(&a.y, &b.y) <= 1e-8);
    assert_eq!(a.x, b.x);
}

/// Each accepted matrix step checked against a dense exact projection.
#[test]
fn inexact_steps_satisfy_both_conditions_a_posteriori() {
    let r = 3;
    let mu = 16.0;
    for (seed, zeta) in [(5u64, 1e-7), (6, 1e-3), (7, 0.3)] {
        let inst = generate_gaussian(30, 25, r, 2.6, RngSpec::new(seed, 0)).unwrap();
        let p = inst.problem();
        let (mut x, mut y) = p.initial(&ctx(seed)).unwrap();
        let mut l_prev = eval_l(&x, &y).unwrap();
        for k in 0..25 {
            let out = step_irapm(&p, &x, &y, 16.0, mu, zeta, 0.1, &ctx(seed * 100 + k)).unwrap();
            let cert = out.cert.unwrap();
            let y_reg = y.lincomb(1.0 / (1.0 + mu), &out.x, mu / (1.0 + mu)).unwrap();
            let d_prev = y.dist_sq(&y_reg).unwrap();
            assert!(cert.q_value <= 1e-12 * (1.0 + d_prev));
            if !cert.forced {
                let y_hat = truncation(&y_reg, r);
                let d_w = out.y.dist_sq(&y_reg).unwrap();
                let d_hat = y_hat.dist_sq(&y_reg).unwrap();
                assert!(d_w <= zeta * d_hat + (1.0 - zeta) * d_prev + 1e-8);
                let rhs = (-(1.0 - zeta) / zeta * cert.q_value).max(0.0).sqrt();
                assert!(dist(&out.y, &y_hat) <= rhs + 1e-6);
                let l = eval_l(&out.x, &out.y).unwrap();
                assert!(l <= l_prev + 1e-10 * (1.0 + l_prev));
                l_prev = l;
            } else {
                l_prev = eval_l(&out.x, &out.y).unwrap();
            }
            x = out.x;
            y = out.y;
        }
    }
}

#[test]
fn runs_are_deterministic_and_descend() {
    let inst = generate_gaussian(48, 40, 4, 2.6, RngSpec::new(8, 0)).unwrap();
    for variant in [Variant::Rapm, Variant::Irapm] {
        let cfg = config(variant, 1e-7, 60);
        let a = run(&inst.problem(), &cfg).unwrap();
        let b = run(&inst.problem(), &cfg).unwrap();
        assert_eq!(a.records, b.records);
        assert_eq!(a.final_y, b.final_y);
        if !a.records.iter().any(|r| r.forced) {
            assert_descent(&a.records, a.initial_l.unwrap());
        }
        let last = a.records.last().unwrap();
        assert_eq!(last.cost, a.records.iter().map(|r| r.ell_bar - 4).sum::<usize>());
    }
}

#[test]
fn variant_names_parse() {
    assert_eq!("IRAPM".parse::<Variant>().unwrap(), Variant::Irapm);
    assert_eq!("apm".parse::<Variant>().unwrap(), Variant::Apm);
    assert!("sgd".parse::<Variant>().is_err());
    assert_eq!(Variant::Irapm.label(), "iRAPM");
}

#[test]
fn zero_targets_do_not_break_the_solver() {
    let data = altproj::sets::ObservedData::new(6, 5, vec![(0, 0, 0.0), (3, 2, 0.0)]).unwrap();
    let p = altproj::completion::CompletionProblem {
        observed: &data,
        rank: 2,
    };
    let (x, y) = p.initial(&ctx(0)).unwrap();
    assert_eq!(y, DenseMatrix::zeros(6, 5));
    let out = step_irapm(&p, &x, &y, 16.0, 16.0, 1e-7, 0.1, &ctx(1)).unwrap();
    assert_eq!(out.y, DenseMatrix::zeros(6, 5));
}
