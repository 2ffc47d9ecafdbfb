//! End-to-end properties of compile, rewrite and verify.

use gidnet::benchgen::{gen_grcs, gen_qaoa, gen_u3r, random_circuit, GrcsSpec, QaoaSpec};
use gidnet::harness::{run_bench, BenchConfig, Family};
use gidnet::rewrite::validate_solution;
use gidnet::verify::{brute_force_min_width, equivalence_check, DEFAULT_TOLERANCE};
use gidnet::{gidnet, rewrite_dynamic, Iterations, SearchConfig};
use proptest::prelude::*;

#[test]
fn qaoa_width_ignores_angles() {
    for seed in 0..10 {
        let g = gen_u3r(12, seed).unwrap();
        let a = gen_qaoa(&QaoaSpec::new(g.clone(), 2, seed));
        let b = gen_qaoa(&QaoaSpec::with_angles(g, vec![0.11, -2.5], vec![1.9, 0.01], seed).unwrap());
        let config = SearchConfig::with_seed(seed);
        assert_eq!(gidnet(&a, &config).unwrap(), gidnet(&b, &config).unwrap());
    }
}

#[test]
fn qaoa_sixteen_compresses() {
    for seed in 0..5 {
        let c = gen_qaoa(&QaoaSpec::random(16, 1, seed).unwrap());
        assert!(gidnet(&c, &SearchConfig::with_seed(seed)).unwrap().width() < 16);
    }
}

#[test]
fn grcs_solutions_are_valid() {
    for seed in 0..5 {
        let c = gen_grcs(&GrcsSpec::new(4, 4, 11, seed).unwrap());
        let sol = gidnet(&c, &SearchConfig::with_seed(seed)).unwrap();
        assert!(validate_solution(&c, &sol).unwrap().pass);
        assert!(sol.width() <= 16);
    }
}

#[test]
fn small_grcs_rewrite_is_equivalent() {
    // 2x3 lattice keeps the simulation at six wires
    for seed in 0..4 {
        let c = gen_grcs(&GrcsSpec::new(2, 3, 6, seed).unwrap());
        let sol = gidnet(&c, &SearchConfig::with_seed(seed)).unwrap();
        let d = rewrite_dynamic(&c, &sol).unwrap();
        let r = equivalence_check(&c, &d, DEFAULT_TOLERANCE).unwrap();
        assert!(r.pass, "seed {seed}: tvd {}", r.tvd);
    }
}

#[test]
fn bench_widths_repeat_for_same_seed() {
    let mut config = BenchConfig::new(Family::Grcs, vec![16, 25], 8);
    config.repeats = 3;
    config.time_reps = 1;
    config.seed = 99;
    let a = run_bench(&config).unwrap();
    let b = run_bench(&config).unwrap();
    let widths = |r: &[gidnet::harness::BenchRecord]| -> Vec<(u64, Vec<usize>)> {
        r.iter().map(|x| (x.seed, x.widths.clone())).collect()
    };
    assert_eq!(widths(&a), widths(&b));
    assert!(a.iter().all(|r| r.best_width <= r.orig_width));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn search_output_is_valid_and_equivalent(n in 1usize..7, gates in 0usize..13, seed in any::<u64>()) {
        let c = random_circuit(n, gates, seed);
        let sol = gidnet(&c, &SearchConfig::with_seed(seed)).unwrap();
        prop_assert!(validate_solution(&c, &sol).unwrap().pass);
        prop_assert!(sol.width() >= brute_force_min_width(&c).unwrap());
        let d = rewrite_dynamic(&c, &sol).unwrap();
        prop_assert!(equivalence_check(&c, &d, DEFAULT_TOLERANCE).unwrap().pass);
    }

    #[test]
    fn extra_passes_never_widen(n in 2usize..14, gates in 0usize..40, seed in any::<u64>()) {
        let c = random_circuit(n, gates, seed);
        let w = |k| gidnet(&c, &SearchConfig::with_seed(seed).iterations(Iterations::Fixed(k))).unwrap().width();
        prop_assert!(w(4) <= w(2));
        prop_assert!(w(2) <= w(1));
    }
}
