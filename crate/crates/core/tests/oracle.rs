//! Prover verdicts against ground satisfiability on function-free inputs.

mod common;

use std::time::Duration;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use common::*;
use litsel::harness::collect_problems;
use litsel::saturation::{saturate, SaturationConfig, SaturationResult};
use litsel::selection::StrategyId;
use litsel::tptp::parse_file;

fn verdict_agrees(result: &SaturationResult, satisfiable: bool) -> bool {
    match result {
        SaturationResult::Unsatisfiable(_) => !satisfiable,
        SaturationResult::SaturatedSatisfiable => satisfiable,
        SaturationResult::SaturatedUnknown | SaturationResult::ResourceOut => true,
    }
}

#[test]
fn corpus_verdicts_match_ground_oracle() {
    let mut checked = 0;
    for path in collect_problems(&corpus_dir()).unwrap() {
        let problem = parse_file(&path, &[]).unwrap();
        let input = problem.literal_lists();
        let Some(sat) = function_free_satisfiable(&problem.bank, &input) else {
            continue;
        };
        if path.parent().unwrap().ends_with("soundness") {
            assert!(
                !sat,
                "{} is labelled unsatisfiable but has a model",
                path.display()
            );
        }
        for n in [0, 1, 10, 1011] {
            let mut problem = parse_file(&path, &[]).unwrap();
            let input = problem.literal_lists();
            let mut config = SaturationConfig::new(StrategyId::new(n).unwrap());
            config.time_limit = Some(Duration::from_secs(10));
            config.max_activations = Some(400);
            let run = saturate(&mut problem.bank, &input, &config).unwrap();
            assert!(
                verdict_agrees(&run.result, sat),
                "{}: strategy {n} says {}, oracle says satisfiable={sat}",
                path.display(),
                run.result.szs_status()
            );
        }
        checked += 1;
    }
    assert!(checked >= 10, "only {checked} function-free problems");
}

#[test]
fn random_function_free_sets_match_ground_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x0a11);
    let mut decided = 0;
    for _ in 0..300 {
        let mut g = Gen::new();
        g.max_depth = 0;
        g.max_var = 2;
        let n = rng.gen_range(2..=7);
        let set: Vec<_> = (0..n).map(|_| g.clause(&mut rng, 3)).collect();
        let sat = function_free_satisfiable(&g.bank, &set).expect("no function symbols");
        for n in [0, 1, 3, 20, 33] {
            let mut config = SaturationConfig::new(StrategyId::new(n).unwrap());
            config.time_limit = Some(Duration::from_millis(500));
            config.max_activations = Some(300);
            let run = saturate(&mut g.bank, &set, &config).unwrap();
            assert!(
                verdict_agrees(&run.result, sat),
                "strategy {n} says {}, oracle says satisfiable={sat}",
                run.result.szs_status()
            );
            decided += usize::from(matches!(
                run.result,
                SaturationResult::Unsatisfiable(_) | SaturationResult::SaturatedSatisfiable
            ));
        }
    }
    assert!(decided > 1000, "only {decided} runs reached a verdict");
}
