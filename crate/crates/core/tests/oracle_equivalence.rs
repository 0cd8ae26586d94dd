mod common;

use common::{as_set, brute_gamma, canonical, enumerate_simple_cycles, random_graph};
use cycleswitch::{detect_cycle, Cycle, RngSeed, TimedCycle};

#[test]
fn enumerator_finds_known_cycles() {
    let g = common::complete_stable(4);
    // 4·3/2 two-cycles + 4·2 three-cycles + 3! four-cycles
    assert_eq!(enumerate_simple_cycles(&g).len(), 6 + 8 + 6);
}

#[test]
fn contractivity_matches_exhaustive_classification() {
    let mut classified = 0;
    for seed in 0..20u64 {
        let n = 3 + (seed as usize % 6);
        let g = random_graph(seed, n, 0.45, 2.0, (1, 3));
        let window = g.window();
        for cycle in enumerate_simple_cycles(&g) {
            let mut exists_oracle = false;
            let mut exists_impl = false;
            for delta in window.min..=window.max {
                let dwell = vec![delta; cycle.len()];
                let oracle = brute_gamma(&g, &cycle, &dwell);
                let timed = TimedCycle::new(Cycle::new(cycle.iter().copied()), dwell);
                let gamma = g.gamma(&timed).unwrap();
                assert_eq!(gamma.to_bits(), oracle.to_bits(), "graph {seed}, cycle {cycle:?}, Δ = {delta}");
                assert_eq!(g.is_delta_contractive(&timed).unwrap(), oracle < 0.0);
                exists_oracle |= oracle < 0.0;
                exists_impl |= g.is_delta_contractive(&timed).unwrap();
                classified += 1;
            }
            assert_eq!(exists_oracle, exists_impl);
        }
    }
    assert!(classified > 100, "too few cycles exercised: {classified}");
}

#[test]
fn detected_cycles_are_enumerated_cycles() {
    for seed in 0..20u64 {
        let g = random_graph(100 + seed, 8, 0.5, 1.0, (1, 2));
        let all = as_set(&enumerate_simple_cycles(&g));
        for s in 0..30 {
            if let Ok(r) = detect_cycle(&g, RngSeed(s)) {
                assert!(all.contains(&canonical(&r.cycle)), "{:?} not a simple cycle", r.cycle);
                assert!(r.cycle.vertices.iter().all(|v| g.is_stable(*v)));
            }
        }
    }
}
