use rand::{Rng, SeedableRng};
use si_maxcut::oracle::{brute_force_maxcut, dense_laplacian_eigenvalues, grid_inner_min, max_subgradient_l1};
use si_maxcut::perturb::flip_probability;
use si_maxcut::{
    max_laplacian_eigenvector, perturb, run_si_p, si_perturb, solve_inner, Graph, NormParam, PerturbConfig,
    SolverConfig, SolverRng, StateVector,
};

fn triangle() -> Graph {
    Graph::from_triples(3, &[(0, 1, 1.0), (0, 2, 1.0), (1, 2, 1.0)]).unwrap()
}

fn cycle(n: usize) -> Graph {
    let t: Vec<_> = (0..n).map(|i| (i, (i + 1) % n, 1.0)).collect();
    Graph::from_triples(n, &t).unwrap()
}

#[test]
fn grid_oracle_examples() {
    let m = grid_inner_min(&[3.0, 1.0], 1.0, NormParam::Finite(2.0), 1e-3).unwrap();
    assert!((m + 5f64.sqrt()).abs() < 2e-3);
    let closed = solve_inner(&[3.0, 1.0], 1.0, NormParam::Finite(2.0), 1e-9).unwrap().objective;
    assert!(m >= closed - 1e-12);
    for p in [NormParam::One, NormParam::Finite(3.0), NormParam::Infinity] {
        assert_eq!(grid_inner_min(&[1.0], 1.0, p, 1e-2).unwrap(), 0.0);
    }
    let m = grid_inner_min(&[2.0, 2.0], 1.0, NormParam::One, 1e-3).unwrap();
    assert!((m + 1.5).abs() < 2e-3);
    assert!(grid_inner_min(&[1.0; 4], 1.0, NormParam::One, 1e-2).is_err());
}

#[test]
fn subgradient_oracle_examples() {
    let e = Graph::from_triples(2, &[(0, 1, 1.0)]).unwrap();
    assert_eq!(max_subgradient_l1(&e, &[1.0, -1.0]).unwrap(), 2.0);
    assert_eq!(max_subgradient_l1(&e, &[1.0, 1.0]).unwrap(), 2.0);
    assert_eq!(max_subgradient_l1(&triangle(), &[1.0, 1.0, -1.0]).unwrap(), 4.0);
    let dense: Vec<_> = (0..8).flat_map(|i| (i + 1..8).map(move |j| (i, j, 1.0))).collect();
    let k8 = Graph::from_triples(8, &dense).unwrap();
    assert!(max_subgradient_l1(&k8, &[1.0; 8]).is_err());
}

#[test]
fn brute_force_single_edge() {
    let e = Graph::from_triples(2, &[(0, 1, 3.0)]).unwrap();
    assert_eq!(brute_force_maxcut(&e).unwrap().value, 3.0);
}

#[test]
fn flip_probabilities() {
    assert!((flip_probability(0.5, 2.0) - 0.367_879_441_171_442_3).abs() < 1e-15);
    assert_eq!(flip_probability(123.0, 0.0), 1.0);
    // expected flip count strictly decreases in beta
    let p_bar = [1.0, -2.0, 0.5, 3.0];
    let expected = |b: f64| p_bar.iter().map(|&p| flip_probability(b, p)).sum::<f64>();
    let mut prev = f64::INFINITY;
    for k in 1..50 {
        let e = expected(k as f64 * 0.1);
        assert!(e < prev);
        prev = e;
    }
}

#[test]
fn small_beta_negates_the_state() {
    let x = StateVector::new(vec![1.0, -1.0, -1.0, 1.0]).unwrap();
    let mut rng = SolverRng::seed_from_u64(4);
    let y = perturb(&x, &[1.0, 2.0, 3.0, 4.0], 1e-12, &mut rng).unwrap();
    assert_eq!(y.as_slice(), &[-1.0, 1.0, 1.0, -1.0]);
}

#[test]
fn huge_beta_leaves_the_state_alone() {
    let x = StateVector::new(vec![1.0, -1.0, -1.0, 1.0]).unwrap();
    let mut rng = SolverRng::seed_from_u64(4);
    for _ in 0..100 {
        let y = perturb(&x, &[1.0, -2.0, 3.0, -4.0], 1e9, &mut rng).unwrap();
        assert_eq!(y, x);
    }
}

#[test]
fn si_perturb_never_loses_the_optimum() {
    let pcfg = PerturbConfig {
        iters: 100,
        ..PerturbConfig::default()
    };
    for seed in 0..20 {
        let mut rng = SolverRng::seed_from_u64(seed);
        let out = si_perturb(&triangle(), &[1.0, 1.0, -1.0], &SolverConfig::default(), &pcfg, 0.4, &mut rng).unwrap();
        assert_eq!(out.r_opt, 4.0);
    }
}

#[test]
fn four_cycle_escapes_its_stall_state() {
    let pcfg = PerturbConfig {
        stall: 1,
        iters: 200,
        ..PerturbConfig::default()
    };
    let mut escaped = 0;
    let trials = 50;
    for seed in 0..trials {
        let mut rng = SolverRng::seed_from_u64(seed);
        let beta = rng.random_range(0.01..1.0);
        let out = si_perturb(&cycle(4), &[1.0, 1.0, -1.0, -1.0], &SolverConfig::default(), &pcfg, beta, &mut rng)
            .unwrap();
        assert!(out.r_opt >= 4.0);
        if out.r_opt == 8.0 {
            escaped += 1;
        }
    }
    assert!(escaped >= 45, "{escaped} of {trials}");
}

#[test]
fn optimum_start_stops_after_one_turn() {
    let pcfg = PerturbConfig {
        restarts: 5,
        iters: 50,
        ..PerturbConfig::default()
    };
    let out = run_si_p(&cycle(8), &[1.0, -1.0, 1.0, -1.0, 1.0, -1.0, 1.0, -1.0], &SolverConfig::default(), &pcfg)
        .unwrap();
    assert_eq!(out.count, 1);
    assert_eq!(out.total_iterations, 5 * 50);
    assert_eq!(out.cut.value, 8.0);
}

#[test]
fn spectral_examples() {
    let e = max_laplacian_eigenvector(&triangle(), 1e-10, 1000, 3).unwrap();
    assert!((e.value - 3.0).abs() < 1e-9);
    assert!(e.vector.iter().sum::<f64>().abs() < 1e-8);
    let star = Graph::from_triples(4, &[(0, 1, 1.0), (0, 2, 1.0), (0, 3, 1.0)]).unwrap();
    let lmax = *dense_laplacian_eigenvalues(&star).unwrap().last().unwrap();
    assert!((lmax - 4.0).abs() < 1e-12);
    assert!((max_laplacian_eigenvector(&star, 1e-10, 1000, 0).unwrap().value - lmax).abs() < 1e-9);
}

#[test]
fn spectral_vector_dominates_random_rayleigh_quotients() {
    let mut rng = SolverRng::seed_from_u64(17);
    let mut t = Vec::new();
    for i in 0..60 {
        for j in i + 1..60 {
            if rng.random_bool(0.1) {
                t.push((i, j, f64::from(rng.random_range(1..4u8))));
            }
        }
    }
    let g = Graph::from_triples(60, &t).unwrap();
    let e = max_laplacian_eigenvector(&g, 1e-8, 2000, 1).unwrap();
    let rq = |x: &[f64]| {
        let lx = si_maxcut::laplacian_apply(&g, x).unwrap();
        x.iter().zip(&lx).map(|(a, b)| a * b).sum::<f64>() / x.iter().map(|a| a * a).sum::<f64>()
    };
    let top = rq(&e.vector);
    for _ in 0..50 {
        let x: Vec<f64> = (0..60).map(|_| rng.random_range(-1.0..1.0)).collect();
        assert!(rq(&x) <= top + 1e-9);
    }
}
